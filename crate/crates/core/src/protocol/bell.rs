//! Single-photon spin-OAM Bell analysis on photon A.
//!
//! Bell states live on `(polA, oamA)` with the OAM written in the linear
//! `(h_ℓ, v_ℓ)` basis:
//!
//! ```text
//! |Φ±⟩ = (|h_ℓ, H⟩ ± |v_ℓ, V⟩)/√2
//! |Ψ±⟩ = (|v_ℓ, H⟩ ± |h_ℓ, V⟩)/√2
//! ```
//!
//! The sorter is a polarizing Sagnac loop with a Dove prism in it. At the
//! prism angle `θ = π/(8ℓ)` it turns the four Bell states into four orthogonal
//! product states, which a π/8 half-wave plate, a polarizer and a sector
//! hologram then read out one by one.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_8};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{
    self, pauli, Ket, OamBasis, OamOrder, Operator, OperatorKind, Subsystem, SubsystemLabel, EXACT_TOL,
};
use crate::linalg::{CMatrix, ONE, ZERO};
use crate::protocol::jones::{waveplate_jones, WavePlate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellLabel {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [
        BellLabel::PhiPlus,
        BellLabel::PhiMinus,
        BellLabel::PsiPlus,
        BellLabel::PsiMinus,
    ];

    /// Two classical bits sent to B: `[parity, phase]`, where parity is set
    /// for `Ψ` and phase is set for the minus states.
    pub fn bits(self) -> [u8; 2] {
        match self {
            BellLabel::PhiPlus => [0, 0],
            BellLabel::PhiMinus => [0, 1],
            BellLabel::PsiPlus => [1, 0],
            BellLabel::PsiMinus => [1, 1],
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn cli_name(self) -> &'static str {
        match self {
            BellLabel::PhiPlus => "phi-plus",
            BellLabel::PhiMinus => "phi-minus",
            BellLabel::PsiPlus => "psi-plus",
            BellLabel::PsiMinus => "psi-minus",
        }
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for BellLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        match key.as_str() {
            "phiplus" => Ok(BellLabel::PhiPlus),
            "phiminus" => Ok(BellLabel::PhiMinus),
            "psiplus" => Ok(BellLabel::PsiPlus),
            "psiminus" => Ok(BellLabel::PsiMinus),
            _ => Err(Error::OutOfRange(format!("unknown Bell outcome '{s}'"))),
        }
    }
}

/// Result of projecting photon A onto one Bell state.
#[derive(Debug, Clone, PartialEq)]
pub struct BellOutcome {
    pub label: BellLabel,
    pub probability: f64,
    /// Normalized state of B's OAM in the linear basis; `None` when the
    /// outcome has zero probability.
    pub conditional_b: Option<Ket>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementMode {
    /// Project straight onto the Bell states.
    Direct,
    /// Run the Sagnac sorter, then project onto product states.
    Physical,
}

fn bell_labels() -> Vec<SubsystemLabel> {
    vec![SubsystemLabel::pol_a(), SubsystemLabel::oam_a(OamBasis::Linear)]
}

/// Amplitudes over `(H h, H v, V h, V v)`.
fn bell_amplitudes(label: BellLabel) -> [Complex64; 4] {
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    match label {
        BellLabel::PhiPlus => [s, ZERO, ZERO, s],
        BellLabel::PhiMinus => [s, ZERO, ZERO, -s],
        BellLabel::PsiPlus => [ZERO, s, s, ZERO],
        BellLabel::PsiMinus => [ZERO, s, -s, ZERO],
    }
}

/// The four spin-OAM Bell states, in [`BellLabel::ALL`] order.
pub fn bell_states(order: OamOrder) -> [Ket; 4] {
    BellLabel::ALL.map(|label| {
        Ket::new(bell_labels(), bell_amplitudes(label).to_vec(), order).expect("Bell states are normalized")
    })
}

/// Orientation of the Dove prism inside the Sagnac loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DovePrismSetting {
    pub theta: f64,
    pub order: OamOrder,
}

impl DovePrismSetting {
    /// `θ = π/(8ℓ)`, where the loop sorts the Bell states.
    pub fn canonical(order: OamOrder) -> Self {
        Self {
            theta: FRAC_PI_8 / order.as_f64(),
            order,
        }
    }

    pub fn new(theta: f64, order: OamOrder) -> Self {
        Self { theta, order }
    }

    pub fn is_canonical(&self) -> bool {
        (self.theta - FRAC_PI_8 / self.order.as_f64()).abs() <= 1e-14
    }
}

/// Dove prism rotated by `theta` acting on `oamA` in the circular basis:
/// `|±ℓ⟩ → e^{±2iℓθ}|∓ℓ⟩`.
pub fn dove_prism(theta: f64, order: OamOrder) -> Operator {
    let phase = 2.0 * order.as_f64() * theta;
    let matrix = CMatrix::from_rows2([
        [ZERO, Complex64::from_polar(1.0, -phase)],
        [Complex64::from_polar(1.0, phase), ZERO],
    ]);
    Operator::new(vec![SubsystemLabel::oam_a(OamBasis::Circular)], matrix, OperatorKind::Unitary)
        .expect("Dove prism is unitary")
}

/// Polarizing Sagnac loop: `H` circulates through the prism at `+θ`, `V` at `−θ`.
/// Acts on `(polA, oamA)` with the OAM in the circular basis.
pub fn sagnac_dove(setting: DovePrismSetting) -> Operator {
    let h = CMatrix::diag(&[ONE, ZERO]);
    let v = CMatrix::diag(&[ZERO, ONE]);
    let forward = dove_prism(setting.theta, setting.order);
    let backward = dove_prism(-setting.theta, setting.order);
    let matrix = &h.kron(forward.matrix()) + &v.kron(backward.matrix());
    Operator::new(
        vec![SubsystemLabel::pol_a(), SubsystemLabel::oam_a(OamBasis::Circular)],
        matrix,
        OperatorKind::Unitary,
    )
    .expect("Sagnac loop is unitary")
}

/// Polarization × OAM product state each Bell state is sorted into:
/// `Φ+ → |v_ℓ, A⟩`, `Φ− → |v_ℓ, D⟩`, `Ψ+ → |h_ℓ, A⟩`, `Ψ− → |h_ℓ, D⟩`.
/// Returns `(polarization amplitudes, OAM amplitudes)`.
fn sorted_output(label: BellLabel) -> ([Complex64; 2], [Complex64; 2]) {
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let diag = [s, s];
    let anti = [s, -s];
    let h = [ONE, ZERO];
    let v = [ZERO, ONE];
    match label {
        BellLabel::PhiPlus => (anti, v),
        BellLabel::PhiMinus => (diag, v),
        BellLabel::PsiPlus => (anti, h),
        BellLabel::PsiMinus => (diag, h),
    }
}

fn product(pol: [Complex64; 2], oam: [Complex64; 2]) -> Vec<Complex64> {
    pol.iter().flat_map(|p| oam.iter().map(move |o| p * o)).collect()
}

/// Sorter unitary on `(polA, oamA)`, linear OAM basis, built as
/// `Σ_i |out_i⟩⟨Bell_i|` with every output taken at phase zero.
///
/// Only the sorting angle is accepted; use [`sagnac_dove`] to study other
/// prism angles.
pub fn psi_dp_unitary(setting: DovePrismSetting) -> Result<Operator> {
    if !setting.is_canonical() {
        return Err(Error::Precondition(format!(
            "sorter requires theta = pi/(8*{}), got {}",
            setting.order, setting.theta
        )));
    }
    let mut matrix = CMatrix::zeros(4);
    for label in BellLabel::ALL {
        let (pol, oam) = sorted_output(label);
        let out = product(pol, oam);
        let bell = bell_amplitudes(label);
        matrix = &matrix + &CMatrix::outer(&out, &bell);
    }
    Operator::new(bell_labels(), matrix, OperatorKind::Unitary)
}

fn check_protocol_state(state: &Ket) -> Result<Ket> {
    let expected = [Subsystem::PolA, Subsystem::OamA, Subsystem::OamB];
    let found: Vec<Subsystem> = state.labels().iter().map(|l| l.subsystem()).collect();
    if found != expected {
        return Err(Error::Precondition(format!(
            "expected a (polA, oamA, oamB) state, got {found:?}"
        )));
    }
    let n = state.norm();
    if (n - 1.0).abs() > EXACT_TOL {
        return Err(Error::NotNormalized(n));
    }
    state.with_oam_basis(OamBasis::Linear)
}

/// Contracts the `(polA, oamA)` factor of `state` with `bra` and returns B's
/// unnormalized OAM amplitudes.
fn contract_a(state: &Ket, bra: &[Complex64]) -> [Complex64; 2] {
    let amps = state.amplitudes();
    let mut b = [ZERO; 2];
    for (k, coeff) in bra.iter().enumerate() {
        for (j, slot) in b.iter_mut().enumerate() {
            *slot += coeff.conj() * amps[2 * k + j];
        }
    }
    b
}

fn outcome_from(label: BellLabel, b: [Complex64; 2], order: OamOrder) -> BellOutcome {
    let probability = b[0].norm_sqr() + b[1].norm_sqr();
    let conditional_b = if probability > 0.0 {
        Ket::normalized(vec![SubsystemLabel::oam_b(OamBasis::Linear)], b.to_vec(), order).ok()
    } else {
        None
    };
    BellOutcome {
        label,
        probability,
        conditional_b,
    }
}

/// Bell analysis of photon A in a `(polA, oamA, oamB)` state.
///
/// In physical mode the state passes the sorter, then a half-wave plate at
/// `π/8` maps `D → H` and `A → V`; detection is a projection on
/// `{H, V} ⊗ {h_ℓ, v_ℓ}`, relabelled back to Bell outcomes. Conditional states
/// may then differ from direct mode by a global phase.
pub fn bell_measurement(state: &Ket, mode: MeasurementMode) -> Result<[BellOutcome; 4]> {
    let state = check_protocol_state(state)?;
    let order = state.order();
    match mode {
        MeasurementMode::Direct => Ok(BellLabel::ALL.map(|label| {
            let b = contract_a(&state, &bell_amplitudes(label));
            outcome_from(label, b, order)
        })),
        MeasurementMode::Physical => {
            let sorter = psi_dp_unitary(DovePrismSetting::canonical(order))?;
            let plate = waveplate_jones(WavePlate::Half, FRAC_PI_8);
            let sorted = hilbert::apply(&plate, &hilbert::apply(&sorter, &state)?)?;
            Ok(BellLabel::ALL.map(|label| {
                let (_, oam) = sorted_output(label);
                // D leaves the plate as H, A as V
                let pol = match label {
                    BellLabel::PhiPlus | BellLabel::PsiPlus => [ZERO, ONE],
                    BellLabel::PhiMinus | BellLabel::PsiMinus => [ONE, ZERO],
                };
                let b = contract_a(&sorted, &product(pol, oam));
                outcome_from(label, b, order)
            }))
        }
    }
}

/// Unitary B applies on `oamB` (linear basis) after hearing `label`:
/// `Φ+ → 1`, `Φ− → σz`, `Ψ+ → σx`, `Ψ− → iσy`.
pub fn pauli_correction(label: BellLabel) -> Operator {
    let matrix = match label {
        BellLabel::PhiPlus => pauli::identity(),
        BellLabel::PhiMinus => pauli::z(),
        BellLabel::PsiPlus => pauli::x(),
        BellLabel::PsiMinus => pauli::y().scale(Complex64::new(0.0, 1.0)),
    };
    Operator::new(vec![SubsystemLabel::oam_b(OamBasis::Linear)], matrix, OperatorKind::Unitary)
        .expect("Pauli matrices are unitary")
}
