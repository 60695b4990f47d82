//! Teleportation of photon A's polarization onto photon B's OAM.
//!
//! The pipeline is `spdc_state → prepare_input → bell_measurement →
//! pauli_correction`. Photon B's polarization is always `|H⟩` and never
//! touched, so it is carried as a fact about the source rather than as a
//! simulated subsystem; the joint space is `(polA, oamA, oamB)`, 8 dimensions.

mod bell;
mod jones;

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;

pub use bell::{
    bell_measurement, bell_states, dove_prism, pauli_correction, psi_dp_unitary, sagnac_dove, BellLabel,
    BellOutcome, DovePrismSetting, MeasurementMode,
};
pub use jones::{retarder_matrix, waveplate_jones, WavePlate};

use crate::error::{Error, Result};
use crate::hilbert::{apply, Ket, OamBasis, OamOrder, Operator, OperatorKind, SubsystemLabel, EXACT_TOL};
use crate::linalg::{CMatrix, ONE, ZERO};
use crate::rng;

/// Polarization prepared on photon A, as a point `(γ, δ)` on the Poincaré sphere:
/// `α = sin(γ/2)`, `β = cos(γ/2)·e^{iδ}`, state `α|H⟩ + β|V⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputPolarization {
    gamma: f64,
    delta: f64,
}

impl InputPolarization {
    /// `gamma` must lie in `[0, π]`; `delta` is wrapped into `[0, 2π)`.
    pub fn new(gamma: f64, delta: f64) -> Result<Self> {
        if !gamma.is_finite() || !(0.0..=PI).contains(&gamma) {
            return Err(Error::OutOfRange(format!("gamma must be in [0, pi], got {gamma}")));
        }
        if !delta.is_finite() {
            return Err(Error::OutOfRange(format!("delta must be finite, got {delta}")));
        }
        let mut delta = delta.rem_euclid(TAU);
        if delta >= TAU {
            delta = 0.0;
        }
        Ok(Self { gamma, delta })
    }

    pub fn named(state: NamedPolarization) -> Self {
        let (gamma, delta) = state.angles();
        Self { gamma, delta }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn alpha(&self) -> Complex64 {
        Complex64::new((0.5 * self.gamma).sin(), 0.0)
    }

    pub fn beta(&self) -> Complex64 {
        Complex64::from_polar((0.5 * self.gamma).cos(), self.delta)
    }

    /// SU(2) rotation taking `|H⟩` to `α|H⟩ + β|V⟩`.
    pub fn preparation_matrix(&self) -> CMatrix {
        let (a, b) = (self.alpha(), self.beta());
        CMatrix::from_rows2([[a, -b.conj()], [b, a.conj()]])
    }

    /// `α|h_ℓ⟩ + β|v_ℓ⟩` on `oamB`: what B should end up holding.
    pub fn target_b_state(&self, order: OamOrder) -> Ket {
        Ket::new(
            vec![SubsystemLabel::oam_b(OamBasis::Linear)],
            vec![self.alpha(), self.beta()],
            order,
        )
        .expect("|alpha|^2 + |beta|^2 = 1")
    }
}

/// The six polarization states of the tomography table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NamedPolarization {
    H,
    V,
    D,
    A,
    L,
    R,
}

impl NamedPolarization {
    pub const ALL: [NamedPolarization; 6] = [
        NamedPolarization::H,
        NamedPolarization::V,
        NamedPolarization::D,
        NamedPolarization::A,
        NamedPolarization::L,
        NamedPolarization::R,
    ];

    /// `(γ, δ)` with `D = (H+V)/√2`, `A = (H−V)/√2`, `L = (H+iV)/√2`, `R = (H−iV)/√2`.
    pub fn angles(self) -> (f64, f64) {
        match self {
            NamedPolarization::H => (PI, 0.0),
            NamedPolarization::V => (0.0, 0.0),
            NamedPolarization::D => (FRAC_PI_2, 0.0),
            NamedPolarization::A => (FRAC_PI_2, PI),
            NamedPolarization::L => (FRAC_PI_2, FRAC_PI_2),
            NamedPolarization::R => (FRAC_PI_2, 3.0 * FRAC_PI_2),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            NamedPolarization::H => "H",
            NamedPolarization::V => "V",
            NamedPolarization::D => "D",
            NamedPolarization::A => "A",
            NamedPolarization::L => "L",
            NamedPolarization::R => "R",
        }
    }
}

impl fmt::Display for NamedPolarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for NamedPolarization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "H" => Ok(NamedPolarization::H),
            "V" => Ok(NamedPolarization::V),
            "D" => Ok(NamedPolarization::D),
            "A" => Ok(NamedPolarization::A),
            "L" => Ok(NamedPolarization::L),
            "R" => Ok(NamedPolarization::R),
            _ => Err(Error::OutOfRange(format!("unknown polarization '{s}'"))),
        }
    }
}

/// Pair-source state restricted to one `|ℓ|` subspace:
/// `|H⟩_A ⊗ (|−ℓ⟩_A|+ℓ⟩_B + |+ℓ⟩_A|−ℓ⟩_B)/√2`, OAM in the circular basis.
pub fn spdc_state(order: OamOrder) -> Ket {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    // index = 4·pol + 2·oamA + oamB, with 0 = +ℓ and 1 = −ℓ
    let mut amplitudes = vec![ZERO; 8];
    amplitudes[0b001] = s; // H, +ℓ, −ℓ
    amplitudes[0b010] = s; // H, −ℓ, +ℓ
    Ket::new(
        vec![
            SubsystemLabel::pol_a(),
            SubsystemLabel::oam_a(OamBasis::Circular),
            SubsystemLabel::oam_b(OamBasis::Circular),
        ],
        amplitudes,
        order,
    )
    .expect("source state is normalized")
}

/// Rotates photon A's polarization from `|H⟩` to `α|H⟩ + β|V⟩`.
///
/// Fails if `chi` already has weight on `|V⟩_A`.
pub fn prepare_input(chi: &Ket, pol: &InputPolarization) -> Result<Ket> {
    let label = chi.label_of(crate::hilbert::Subsystem::PolA)?;
    let pos = chi.position(label.subsystem()).expect("label exists");
    let shift = chi.labels().len() - 1 - pos;
    let v_weight: f64 = chi
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(idx, _)| (idx >> shift) & 1 == 1)
        .map(|(_, z)| z.norm_sqr())
        .sum();
    if v_weight.sqrt() > EXACT_TOL {
        return Err(Error::Precondition(format!(
            "photon A must start horizontally polarized (|V> weight {v_weight:e})"
        )));
    }
    let op = Operator::new(vec![label], pol.preparation_matrix(), OperatorKind::Unitary)?;
    apply(&op, chi)
}

/// Output of one teleportation run.
#[derive(Debug, Clone, PartialEq)]
pub struct Teleported {
    /// B's corrected OAM state, linear basis.
    pub b_state: Ket,
    pub outcome: BellLabel,
    pub probability: f64,
}

/// Runs the full protocol. Without a forced `outcome`, the Bell result is
/// drawn by inverse CDF from a ChaCha8 stream seeded with `seed` (0 if absent).
pub fn teleport(
    pol: &InputPolarization,
    order: OamOrder,
    outcome: Option<BellLabel>,
    seed: Option<u64>,
) -> Result<Teleported> {
    teleport_with_mode(pol, order, outcome, seed, MeasurementMode::Direct)
}

pub fn teleport_with_mode(
    pol: &InputPolarization,
    order: OamOrder,
    outcome: Option<BellLabel>,
    seed: Option<u64>,
    mode: MeasurementMode,
) -> Result<Teleported> {
    let chi = prepare_input(&spdc_state(order), pol)?;
    let outcomes = bell_measurement(&chi, mode)?;
    let label = match outcome {
        Some(label) => label,
        None => sample_outcome(&outcomes, seed.unwrap_or(0)),
    };
    let chosen = &outcomes[label.index()];
    let conditional = chosen.conditional_b.as_ref().ok_or_else(|| {
        Error::Precondition(format!("outcome {label} has zero probability"))
    })?;
    let b_state = apply(&pauli_correction(label), conditional)?;
    Ok(Teleported {
        b_state,
        outcome: label,
        probability: chosen.probability,
    })
}

fn sample_outcome(outcomes: &[BellOutcome; 4], seed: u64) -> BellLabel {
    let u: f64 = rng::seeded(seed).random();
    let mut cumulative = 0.0;
    let mut last = outcomes[0].label;
    for outcome in outcomes {
        if outcome.probability <= 0.0 {
            continue;
        }
        cumulative += outcome.probability;
        last = outcome.label;
        if u < cumulative {
            return outcome.label;
        }
    }
    last
}

/// Unit vector on `polA` for a named polarization, convenient in tests and docs.
pub fn polarization_ket(pol: &InputPolarization, order: OamOrder) -> Ket {
    Ket::new(vec![SubsystemLabel::pol_a()], vec![pol.alpha(), pol.beta()], order).expect("normalized")
}

#[allow(dead_code)]
fn horizontal(order: OamOrder) -> Ket {
    Ket::new(vec![SubsystemLabel::pol_a()], vec![ONE, ZERO], order).expect("normalized")
}
