//! Projective tomography of photon B's OAM qubit.
//!
//! Measurements project onto the six eigenstates of the Pauli operators in the
//! linear `(h, v)` basis:
//!
//! | label | state          | Bloch axis |
//! |-------|----------------|------------|
//! | h, v  | `h`, `v`        | ±z         |
//! | d, a  | `(h ± v)/√2`    | ±x         |
//! | l, r  | `(h ± iv)/√2`   | ±y         |
//!
//! `l_ℓ = |+ℓ⟩` and `r_ℓ = |−ℓ⟩`.

mod mle;
mod report;

pub use mle::{log_likelihood, mle_reconstruct, Likelihood, MleOptions, MleResult};
pub use report::{
    density_to_json, mub_inputs, tomography_report, write_counts_csv, write_report_csv, ReportConfig,
    ReportInput, TomographyReport,
};

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{DensityMatrix, Ket, OamBasis, OamOrder, SubsystemLabel};
use crate::linalg::{CMatrix, HermitianEigen2, I, ONE, ZERO};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MubLabel {
    H,
    V,
    D,
    A,
    L,
    R,
}

impl MubLabel {
    pub const ALL: [MubLabel; 6] = [
        MubLabel::H,
        MubLabel::V,
        MubLabel::D,
        MubLabel::A,
        MubLabel::L,
        MubLabel::R,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            MubLabel::H => "h",
            MubLabel::V => "v",
            MubLabel::D => "d",
            MubLabel::A => "a",
            MubLabel::L => "l",
            MubLabel::R => "r",
        }
    }

    /// Amplitudes in the `(h, v)` basis.
    pub fn amplitudes(self) -> [Complex64; 2] {
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        match self {
            MubLabel::H => [ONE, ZERO],
            MubLabel::V => [ZERO, ONE],
            MubLabel::D => [s, s],
            MubLabel::A => [s, -s],
            MubLabel::L => [s, s * I],
            MubLabel::R => [s, -s * I],
        }
    }

    pub fn ket(self, order: OamOrder) -> Ket {
        let [c0, c1] = self.amplitudes();
        Ket::qubit(SubsystemLabel::oam_b(OamBasis::Linear), c0, c1, order)
            .expect("MUB states are normalized")
    }

    /// Unit Bloch vector of the state.
    pub fn bloch_axis(self) -> [f64; 3] {
        match self {
            MubLabel::H => [0.0, 0.0, 1.0],
            MubLabel::V => [0.0, 0.0, -1.0],
            MubLabel::D => [1.0, 0.0, 0.0],
            MubLabel::A => [-1.0, 0.0, 0.0],
            MubLabel::L => [0.0, 1.0, 0.0],
            MubLabel::R => [0.0, -1.0, 0.0],
        }
    }

    /// `|ψ⟩⟨ψ|` in the `(h, v)` basis.
    pub fn projector(self) -> CMatrix {
        let amps = self.amplitudes();
        CMatrix::outer(&amps, &amps)
    }
}

impl fmt::Display for MubLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for MubLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MubLabel::ALL
            .into_iter()
            .find(|l| l.symbol().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::OutOfRange(format!("unknown MUB label '{s}'")))
    }
}

/// The six MUB projectors, grouped as `{h, v}`, `{d, a}`, `{l, r}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorSet {
    pub order: OamOrder,
    pub projectors: [(MubLabel, CMatrix); 6],
}

impl ProjectorSet {
    pub fn bases(&self) -> [[&(MubLabel, CMatrix); 2]; 3] {
        let p = &self.projectors;
        [[&p[0], &p[1]], [&p[2], &p[3]], [&p[4], &p[5]]]
    }
}

pub fn mub_projectors(order: OamOrder) -> ProjectorSet {
    ProjectorSet {
        order,
        projectors: MubLabel::ALL.map(|l| (l, l.projector())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoiseModel {
    /// Independent Poisson counts with mean `N·p`.
    Poisson,
    /// Exact expectations `N·p`.
    Noiseless,
}

/// Counts for one projector. `count` is an integer under Poisson noise and
/// the real expectation `N·p` in noiseless mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub label: MubLabel,
    pub shots: u64,
    pub count: f64,
    pub seed: u64,
}

/// Born probabilities `Tr(Π ρ)` for the six projectors, in [`MubLabel::ALL`] order.
pub fn mub_probabilities(rho: &DensityMatrix) -> Result<[f64; 6]> {
    let rho = rho.in_basis(OamBasis::Linear)?;
    Ok(MubLabel::ALL.map(|l| rho.expectation(&l.projector()).max(0.0)))
}

/// One counting run per projector. Poisson draws come from a single ChaCha8
/// stream seeded with `seed`, in [`MubLabel::ALL`] order.
pub fn simulate_counts(
    rho: &DensityMatrix,
    shots: u64,
    seed: u64,
    noise: NoiseModel,
) -> Result<[CountRecord; 6]> {
    if shots == 0 {
        return Err(Error::OutOfRange("shots must be at least 1".into()));
    }
    let probs = mub_probabilities(rho)?;
    let mut rng = rng::seeded(seed);
    let mut out = [CountRecord {
        label: MubLabel::H,
        shots,
        count: 0.0,
        seed,
    }; 6];
    for (k, (label, p)) in MubLabel::ALL.into_iter().zip(probs).enumerate() {
        let mean = shots as f64 * p;
        let count = match noise {
            NoiseModel::Noiseless => mean,
            NoiseModel::Poisson if mean > 0.0 => Poisson::new(mean)
                .map_err(|e| Error::OutOfRange(e.to_string()))?
                .sample(&mut rng),
            NoiseModel::Poisson => 0.0,
        };
        out[k] = CountRecord {
            label,
            shots,
            count,
            seed,
        };
    }
    Ok(out)
}

fn comparable(a: &DensityMatrix, b: &DensityMatrix) -> Result<(DensityMatrix, DensityMatrix)> {
    if a.label().subsystem().is_oam() && b.label().subsystem().is_oam() {
        return Ok((a.in_basis(OamBasis::Linear)?, b.in_basis(OamBasis::Linear)?));
    }
    if a.label() != b.label() {
        return Err(Error::BasisMismatch {
            subsystem: b.label().subsystem(),
            expected: a.label().basis().name(),
            found: b.label().basis().name(),
        });
    }
    Ok((a.clone(), b.clone()))
}

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`, clamped to `[0, 1]`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let (rho, sigma) = comparable(rho, sigma)?;
    let sqrt_rho = rho.eigen().map(|x| x.max(0.0).sqrt());
    let inner = &(&sqrt_rho * sigma.matrix()) * &sqrt_rho;
    let eig = HermitianEigen2::new(&inner);
    let root: f64 = eig.values.iter().map(|x| x.max(0.0).sqrt()).sum();
    Ok((root * root).clamp(0.0, 1.0))
}

/// `‖ρ − σ‖₁ / 2`, comparing OAM states in a common basis.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let (rho, sigma) = comparable(rho, sigma)?;
    rho.trace_distance(&sigma)
}

/// Bloch vector `(x, y, z)` of a qubit state in the `(h, v)` basis.
pub fn bloch_vector(rho: &DensityMatrix) -> Result<[f64; 3]> {
    let m = rho.in_basis(OamBasis::Linear)?.matrix().clone();
    Ok([
        2.0 * m[(0, 1)].re,
        -2.0 * m[(0, 1)].im,
        (m[(0, 0)] - m[(1, 1)]).re,
    ])
}

/// `(I + xX + yY + zZ)/2` on photon B, linear basis.
pub fn density_from_bloch(r: [f64; 3]) -> Result<DensityMatrix> {
    let [x, y, z] = r;
    let m = CMatrix::from_rows2([
        [Complex64::new(0.5 * (1.0 + z), 0.0), Complex64::new(0.5 * x, -0.5 * y)],
        [Complex64::new(0.5 * x, 0.5 * y), Complex64::new(0.5 * (1.0 - z), 0.0)],
    ]);
    DensityMatrix::new(SubsystemLabel::oam_b(OamBasis::Linear), m)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn order(n: i64) -> OamOrder {
        OamOrder::new(n).unwrap()
    }

    pub(crate) fn pure(c0: Complex64, c1: Complex64) -> DensityMatrix {
        let k = Ket::normalized(
            vec![SubsystemLabel::oam_b(OamBasis::Linear)],
            vec![c0, c1],
            order(1),
        )
        .unwrap();
        DensityMatrix::from_ket(&k).unwrap()
    }

    fn mixed() -> DensityMatrix {
        DensityMatrix::maximally_mixed(SubsystemLabel::oam_b(OamBasis::Linear))
    }

    /// Closed form for qubits: `Tr(ρσ) + 2√(det ρ · det σ)`.
    fn fidelity_oracle(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
        let (a, b) = (a.matrix(), b.matrix());
        let det = |m: &CMatrix| (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re.max(0.0);
        ((a * b).trace().re + 2.0 * (det(a) * det(b)).sqrt()).clamp(0.0, 1.0)
    }

    #[test]
    fn projectors_are_complete_and_idempotent() {
        let set = mub_projectors(order(2));
        for [a, b] in set.bases() {
            assert!((&a.1 + &b.1).max_abs_diff(&CMatrix::identity(2)) < 1e-12);
        }
        for (_, p) in &set.projectors {
            assert!((p * p).max_abs_diff(p) < 1e-12);
            assert!(p.hermiticity_defect() < 1e-12);
        }
    }

    #[test]
    fn cross_basis_overlaps_are_one_half() {
        let o = order(1);
        let mut pairs = 0;
        for (i, a) in MubLabel::ALL.iter().enumerate() {
            for b in &MubLabel::ALL[i + 1..] {
                if i / 2 == MubLabel::ALL.iter().position(|x| x == b).unwrap() / 2 {
                    continue;
                }
                let ov = a.ket(o).overlap(&b.ket(o)).unwrap();
                assert!((ov - 0.5).abs() < 1e-12, "{a} {b}");
                pairs += 1;
            }
        }
        assert_eq!(pairs, 12);
        assert!((MubLabel::H.ket(o).overlap(&MubLabel::D.ket(o)).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn l_is_plus_ell() {
        let l = MubLabel::L.ket(order(3)).with_oam_basis(OamBasis::Circular).unwrap();
        assert!((l.amplitudes()[0] - ONE).norm() < 1e-15);
        let r = MubLabel::R.ket(order(3)).with_oam_basis(OamBasis::Circular).unwrap();
        assert!((r.amplitudes()[1] - ONE).norm() < 1e-15);
    }

    #[test]
    fn noiseless_counts_for_h() {
        let counts = simulate_counts(&pure(ONE, ZERO), 1000, 0, NoiseModel::Noiseless).unwrap();
        let expected = [1000.0, 0.0, 500.0, 500.0, 500.0, 500.0];
        for (c, e) in counts.iter().zip(expected) {
            assert!((c.count - e).abs() < 1e-9);
        }
        let labels: Vec<_> = counts.iter().map(|c| c.label).collect();
        assert_eq!(labels, MubLabel::ALL);
    }

    #[test]
    fn noiseless_counts_for_mixed_state() {
        let counts = simulate_counts(&mixed(), 400, 0, NoiseModel::Noiseless).unwrap();
        assert!(counts.iter().all(|c| (c.count - 200.0).abs() < 1e-9));
    }

    #[test]
    fn circular_input_is_converted() {
        let plus = Ket::basis_state(SubsystemLabel::oam_b(OamBasis::Circular), 0, order(2));
        let counts =
            simulate_counts(&DensityMatrix::from_ket(&plus).unwrap(), 10, 0, NoiseModel::Noiseless).unwrap();
        assert!((counts[4].count - 10.0).abs() < 1e-12);
        assert!(counts[5].count.abs() < 1e-12);
    }

    #[test]
    fn poisson_counts_are_seeded() {
        let rho = pure(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8));
        let a = simulate_counts(&rho, 10_000, 42, NoiseModel::Poisson).unwrap();
        let b = simulate_counts(&rho, 10_000, 42, NoiseModel::Poisson).unwrap();
        let c = simulate_counts(&rho, 10_000, 43, NoiseModel::Poisson).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        for rec in &a {
            assert_eq!(rec.count.fract(), 0.0);
            assert!(rec.count >= 0.0);
        }
    }

    #[test]
    fn poisson_counts_have_poisson_moments() {
        let rho = pure(ONE, ONE);
        let n = 2000;
        let samples: Vec<f64> = (0..n)
            .map(|s| simulate_counts(&rho, 100, s, NoiseModel::Poisson).unwrap()[0].count)
            .collect();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        // λ = 50; standard error of the mean is √(50/2000) ≈ 0.16
        assert!((mean - 50.0).abs() < 0.8, "{mean}");
        assert!((var - 50.0).abs() < 8.0, "{var}");
    }

    #[test]
    fn zero_probability_gives_zero_counts() {
        let counts = simulate_counts(&pure(ONE, ZERO), 10_000, 5, NoiseModel::Poisson).unwrap();
        assert_eq!(counts[1].count, 0.0);
    }

    #[test]
    fn zero_shots_rejected() {
        assert!(simulate_counts(&mixed(), 0, 0, NoiseModel::Poisson).is_err());
    }

    #[test]
    fn fidelity_identities() {
        let h = pure(ONE, ZERO);
        let v = pure(ZERO, ONE);
        let rho = density_from_bloch([0.3, -0.2, 0.5]).unwrap();
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-10);
        assert!(fidelity(&h, &v).unwrap().abs() < 1e-10);
        assert!((fidelity(&h, &mixed()).unwrap() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn fidelity_with_pure_state_is_expectation() {
        let psi = pure(Complex64::new(0.2, 0.4), Complex64::new(-0.7, 0.1));
        let sigma = density_from_bloch([-0.1, 0.6, 0.2]).unwrap();
        let expect = sigma.expectation(psi.matrix());
        assert!((fidelity(&psi, &sigma).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn fidelity_across_oam_bases() {
        let plus = Ket::basis_state(SubsystemLabel::oam_b(OamBasis::Circular), 0, order(1));
        let plus = DensityMatrix::from_ket(&plus).unwrap();
        let l = DensityMatrix::from_ket(&MubLabel::L.ket(order(1))).unwrap();
        assert!((fidelity(&plus, &l).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bloch_axes() {
        let o = order(1);
        let axes = [
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0],
            [1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0],
        ];
        for (label, axis) in MubLabel::ALL.into_iter().zip(axes) {
            assert_eq!(label.bloch_axis(), axis);
            let r = bloch_vector(&DensityMatrix::from_ket(&label.ket(o)).unwrap()).unwrap();
            for k in 0..3 {
                assert!((r[k] - axis[k]).abs() < 1e-12, "{label}");
            }
        }
    }

    #[test]
    fn mub_label_parsing() {
        assert_eq!("D".parse::<MubLabel>().unwrap(), MubLabel::D);
        assert!("x".parse::<MubLabel>().is_err());
    }

    pub(crate) fn arb_bloch() -> impl Strategy<Value = [f64; 3]> {
        (0.0..1.0f64, -1.0..1.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, cos_t, phi)| {
            let sin_t = (1.0 - cos_t * cos_t).sqrt();
            [r * sin_t * phi.cos(), r * sin_t * phi.sin(), r * cos_t]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn fidelity_bounds_and_symmetry(a in arb_bloch(), b in arb_bloch()) {
            let (ra, rb) = (density_from_bloch(a).unwrap(), density_from_bloch(b).unwrap());
            let f = fidelity(&ra, &rb).unwrap();
            prop_assert!((0.0..=1.0).contains(&f));
            prop_assert!((f - fidelity(&rb, &ra).unwrap()).abs() < 1e-10);
            prop_assert!((f - fidelity_oracle(&ra, &rb)).abs() < 1e-10);
            // Fuchs–van de Graaf
            let t = trace_distance(&ra, &rb).unwrap();
            prop_assert!(1.0 - f.sqrt() <= t + 1e-10);
            prop_assert!(t <= (1.0 - f).max(0.0).sqrt() + 1e-10);
        }

        #[test]
        fn near_identical_states_have_unit_fidelity(a in arb_bloch(), eps in 0.0..1e-9f64) {
            let ra = density_from_bloch(a).unwrap();
            let shifted = [a[0] * (1.0 - eps), a[1] * (1.0 - eps), a[2] * (1.0 - eps)];
            let rb = density_from_bloch(shifted).unwrap();
            let t = trace_distance(&ra, &rb).unwrap();
            prop_assert!(t <= 1e-8);
            prop_assert!(fidelity(&ra, &rb).unwrap() >= (1.0 - t).powi(2) - 1e-12);
            prop_assert!((fidelity(&ra, &ra).unwrap() - 1.0).abs() < 1e-10);
        }
    }
}
