//! Labeled two-level subsystems and the states and operators built on them.
//!
//! Three qubit-like subsystems take part in the protocol: the polarization of
//! photon A and the OAM of photons A and B. Each is two-dimensional. A joint
//! ket stores its amplitudes row-major over the subsystem order it declares,
//! so `[polA, oamA, oamB]` puts polarization in the most significant position.
//!
//! OAM subsystems can be written in the circular basis `(|+ℓ⟩, |−ℓ⟩)` or in
//! the linear basis `(|h_ℓ⟩, |v_ℓ⟩)`, related by
//!
//! ```text
//! |±ℓ⟩ = (|h_ℓ⟩ ± i|v_ℓ⟩)/√2
//! ```
//!
//! The basis is part of a label, and operators only act on kets written in the
//! same basis, so a sign or phase convention can never be mixed up silently.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, HermitianEigen2, I, ONE, ZERO};

/// Tolerance for identities that hold exactly in exact arithmetic.
pub const EXACT_TOL: f64 = 1e-12;
/// Lowest eigenvalue still accepted as positive semidefinite.
pub const PSD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subsystem {
    PolA,
    OamA,
    OamB,
}

impl Subsystem {
    pub fn is_oam(self) -> bool {
        matches!(self, Subsystem::OamA | Subsystem::OamB)
    }
}

impl fmt::Display for Subsystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Subsystem::PolA => "polA",
            Subsystem::OamA => "oamA",
            Subsystem::OamB => "oamB",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    /// `(|H⟩, |V⟩)`
    Polarization,
    /// `(|+ℓ⟩, |−ℓ⟩)`
    Circular,
    /// `(|h_ℓ⟩, |v_ℓ⟩)`
    Linear,
}

impl Basis {
    pub fn name(self) -> &'static str {
        match self {
            Basis::Polarization => "H/V",
            Basis::Circular => "circular",
            Basis::Linear => "linear",
        }
    }

    pub fn labels(self) -> [&'static str; 2] {
        match self {
            Basis::Polarization => ["H", "V"],
            Basis::Circular => ["+l", "-l"],
            Basis::Linear => ["h", "v"],
        }
    }
}

/// A subsystem together with the basis its amplitudes are written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SubsystemLabel {
    subsystem: Subsystem,
    basis: Basis,
}

impl SubsystemLabel {
    pub fn new(subsystem: Subsystem, basis: Basis) -> Result<Self> {
        let ok = match subsystem {
            Subsystem::PolA => basis == Basis::Polarization,
            Subsystem::OamA | Subsystem::OamB => basis != Basis::Polarization,
        };
        if !ok {
            return Err(Error::IncompatibleBasis {
                subsystem,
                basis: basis.name(),
            });
        }
        Ok(Self { subsystem, basis })
    }

    pub const fn pol_a() -> Self {
        Self {
            subsystem: Subsystem::PolA,
            basis: Basis::Polarization,
        }
    }

    pub const fn oam_a(basis: OamBasis) -> Self {
        Self {
            subsystem: Subsystem::OamA,
            basis: basis.as_basis(),
        }
    }

    pub const fn oam_b(basis: OamBasis) -> Self {
        Self {
            subsystem: Subsystem::OamB,
            basis: basis.as_basis(),
        }
    }

    pub fn subsystem(self) -> Subsystem {
        self.subsystem
    }

    pub fn basis(self) -> Basis {
        self.basis
    }

    pub fn dim(self) -> usize {
        2
    }
}

impl fmt::Display for SubsystemLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.subsystem, self.basis.name())
    }
}

/// The two bases available to an OAM subsystem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OamBasis {
    Circular,
    Linear,
}

impl OamBasis {
    pub const fn as_basis(self) -> Basis {
        match self {
            OamBasis::Circular => Basis::Circular,
            OamBasis::Linear => Basis::Linear,
        }
    }
}

/// Magnitude of the OAM carried by the post-selected subspace, in units of ħ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OamOrder(u32);

impl OamOrder {
    /// Rejects zero and negative values: the Dove-prism angle `π/(8ℓ)` is
    /// singular at zero and the `h`/`v` modes coincide there.
    pub fn new(ell: i64) -> Result<Self> {
        if ell < 1 || ell > u32::MAX as i64 {
            return Err(Error::InvalidOamOrder(ell));
        }
        Ok(Self(ell as u32))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }
}

impl fmt::Display for OamOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

fn check_distinct(labels: &[SubsystemLabel]) -> Result<()> {
    for (i, a) in labels.iter().enumerate() {
        if labels[..i].iter().any(|b| b.subsystem == a.subsystem) {
            return Err(Error::LabelCollision(a.subsystem));
        }
    }
    Ok(())
}

fn joint_dim(labels: &[SubsystemLabel]) -> usize {
    labels.iter().map(|l| l.dim()).product()
}

/// Normalized pure state over an ordered list of subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    labels: Vec<SubsystemLabel>,
    amplitudes: Vec<Complex64>,
    order: OamOrder,
}

impl Ket {
    /// Requires unit norm within [`EXACT_TOL`].
    pub fn new(labels: Vec<SubsystemLabel>, amplitudes: Vec<Complex64>, order: OamOrder) -> Result<Self> {
        check_distinct(&labels)?;
        let expected = joint_dim(&labels);
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: amplitudes.len(),
            });
        }
        let n = linalg::norm(&amplitudes);
        if (n - 1.0).abs() > EXACT_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self {
            labels,
            amplitudes,
            order,
        })
    }

    /// Rescales `amplitudes` to unit norm. Fails on the zero vector.
    pub fn normalized(labels: Vec<SubsystemLabel>, amplitudes: Vec<Complex64>, order: OamOrder) -> Result<Self> {
        let n = linalg::norm(&amplitudes);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::NotNormalized(n));
        }
        let amplitudes = amplitudes.into_iter().map(|z| z / n).collect();
        Self::new(labels, amplitudes, order)
    }

    /// Single-subsystem ket `c0|0⟩ + c1|1⟩`, normalized on construction.
    pub fn qubit(label: SubsystemLabel, c0: Complex64, c1: Complex64, order: OamOrder) -> Result<Self> {
        Self::normalized(vec![label], vec![c0, c1], order)
    }

    /// Basis vector `index` of a single subsystem.
    pub fn basis_state(label: SubsystemLabel, index: usize, order: OamOrder) -> Self {
        assert!(index < 2, "basis index out of range");
        let mut amplitudes = vec![ZERO; 2];
        amplitudes[index] = ONE;
        Self {
            labels: vec![label],
            amplitudes,
            order,
        }
    }

    pub fn labels(&self) -> &[SubsystemLabel] {
        &self.labels
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn order(&self) -> OamOrder {
        self.order
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.amplitudes)
    }

    pub fn position(&self, subsystem: Subsystem) -> Option<usize> {
        self.labels.iter().position(|l| l.subsystem == subsystem)
    }

    pub fn label_of(&self, subsystem: Subsystem) -> Result<SubsystemLabel> {
        self.position(subsystem)
            .map(|p| self.labels[p])
            .ok_or(Error::UnknownSubsystem(subsystem))
    }

    /// Amplitude at the given per-subsystem basis indices, in declared order.
    pub fn amplitude(&self, indices: &[usize]) -> Complex64 {
        assert_eq!(indices.len(), self.labels.len());
        let flat = indices.iter().fold(0, |acc, &i| {
            assert!(i < 2);
            acc * 2 + i
        });
        self.amplitudes[flat]
    }

    fn check_same_space(&self, other: &Ket) -> Result<()> {
        if self.order != other.order {
            return Err(Error::OamOrderMismatch(self.order.get(), other.order.get()));
        }
        if self.labels.len() != other.labels.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amplitudes.len(),
                found: other.amplitudes.len(),
            });
        }
        for (a, b) in self.labels.iter().zip(&other.labels) {
            if a.subsystem != b.subsystem {
                return Err(Error::UnknownSubsystem(b.subsystem));
            }
            if a.basis != b.basis {
                return Err(Error::BasisMismatch {
                    subsystem: a.subsystem,
                    expected: a.basis.name(),
                    found: b.basis.name(),
                });
            }
        }
        Ok(())
    }

    /// `⟨self|other⟩`; both kets must share subsystems, bases and order.
    pub fn inner(&self, other: &Ket) -> Result<Complex64> {
        self.check_same_space(other)?;
        Ok(linalg::inner(&self.amplitudes, &other.amplitudes))
    }

    /// `|⟨self|other⟩|²`
    pub fn overlap(&self, other: &Ket) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Kronecker product in declared order: `self` occupies the leading positions.
    pub fn tensor(&self, other: &Ket) -> Result<Ket> {
        if self.order != other.order {
            return Err(Error::OamOrderMismatch(self.order.get(), other.order.get()));
        }
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        check_distinct(&labels)?;
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Ok(Ket {
            labels,
            amplitudes,
            order: self.order,
        })
    }

    /// Same amplitudes with a global phase `e^{iφ}` applied.
    pub fn with_phase(&self, phase: f64) -> Ket {
        let factor = Complex64::from_polar(1.0, phase);
        Ket {
            labels: self.labels.clone(),
            amplitudes: self.amplitudes.iter().map(|z| z * factor).collect(),
            order: self.order,
        }
    }

    /// Rewrites an OAM subsystem in `basis`; a no-op when it already is.
    pub fn in_basis(&self, subsystem: Subsystem, basis: OamBasis) -> Result<Ket> {
        let label = self.label_of(subsystem)?;
        match (label.basis, basis) {
            (Basis::Circular, OamBasis::Linear) => oam_basis_change(self, subsystem, BasisChange::CircularToLinear),
            (Basis::Linear, OamBasis::Circular) => oam_basis_change(self, subsystem, BasisChange::LinearToCircular),
            (Basis::Polarization, _) => Err(Error::IncompatibleBasis {
                subsystem,
                basis: basis.as_basis().name(),
            }),
            _ => Ok(self.clone()),
        }
    }

    /// Writes every OAM subsystem in `basis`.
    pub fn with_oam_basis(&self, basis: OamBasis) -> Result<Ket> {
        let mut out = self.clone();
        for label in &self.labels {
            if label.subsystem.is_oam() {
                out = out.in_basis(label.subsystem, basis)?;
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Unitary,
    Projector,
    General,
}

/// Square matrix acting on an ordered list of subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    labels: Vec<SubsystemLabel>,
    matrix: CMatrix,
    kind: OperatorKind,
}

impl Operator {
    /// Validates the matrix against `kind` within [`EXACT_TOL`].
    pub fn new(labels: Vec<SubsystemLabel>, matrix: CMatrix, kind: OperatorKind) -> Result<Self> {
        check_distinct(&labels)?;
        let expected = joint_dim(&labels);
        if matrix.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: matrix.dim(),
            });
        }
        match kind {
            OperatorKind::Unitary => {
                let deviation = matrix.unitarity_defect();
                if deviation > EXACT_TOL {
                    return Err(Error::InvalidOperator {
                        kind: "unitary",
                        deviation,
                    });
                }
            }
            OperatorKind::Projector => {
                let deviation = matrix
                    .hermiticity_defect()
                    .max((&matrix * &matrix).max_abs_diff(&matrix));
                if deviation > EXACT_TOL {
                    return Err(Error::InvalidOperator {
                        kind: "a projector",
                        deviation,
                    });
                }
            }
            OperatorKind::General => {}
        }
        Ok(Self { labels, matrix, kind })
    }

    pub fn identity(labels: Vec<SubsystemLabel>) -> Result<Self> {
        let dim = joint_dim(&labels);
        Self::new(labels, CMatrix::identity(dim), OperatorKind::Unitary)
    }

    /// Rank-one projector `|ψ⟩⟨ψ|`.
    pub fn projector(ket: &Ket) -> Self {
        Self {
            labels: ket.labels.clone(),
            matrix: CMatrix::outer(&ket.amplitudes, &ket.amplitudes),
            kind: OperatorKind::Projector,
        }
    }

    pub fn labels(&self) -> &[SubsystemLabel] {
        &self.labels
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn adjoint(&self) -> Operator {
        Operator {
            labels: self.labels.clone(),
            matrix: self.matrix.adjoint(),
            kind: self.kind,
        }
    }

    /// Kronecker product; unitary ⊗ unitary stays unitary, likewise projectors.
    pub fn tensor(&self, other: &Operator) -> Result<Operator> {
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        check_distinct(&labels)?;
        let kind = if self.kind == other.kind {
            self.kind
        } else {
            OperatorKind::General
        };
        Ok(Operator {
            labels,
            matrix: self.matrix.kron(&other.matrix),
            kind,
        })
    }

    /// Matrix product `self · other` on identical label lists.
    pub fn compose(&self, other: &Operator) -> Result<Operator> {
        if self.labels != other.labels {
            return Err(Error::Precondition(
                "operators act on different subsystem lists".into(),
            ));
        }
        let kind = if self.kind == OperatorKind::Unitary && other.kind == OperatorKind::Unitary {
            OperatorKind::Unitary
        } else {
            OperatorKind::General
        };
        Ok(Operator {
            labels: self.labels.clone(),
            matrix: &self.matrix * &other.matrix,
            kind,
        })
    }
}

/// Applies `op` to `psi`, padding with the identity on every subsystem `op`
/// does not name. Returns the unnormalized image for non-unitary operators.
pub fn apply(op: &Operator, psi: &Ket) -> Result<Ket> {
    let n = psi.labels.len();
    let mut shifts = Vec::with_capacity(op.labels.len());
    for label in &op.labels {
        let pos = psi
            .position(label.subsystem)
            .ok_or(Error::UnknownSubsystem(label.subsystem))?;
        let found = psi.labels[pos].basis;
        if found != label.basis {
            return Err(Error::BasisMismatch {
                subsystem: label.subsystem,
                expected: label.basis.name(),
                found: found.name(),
            });
        }
        shifts.push(n - 1 - pos);
    }

    let m = shifts.len();
    let op_dim = 1usize << m;
    let mask: usize = shifts.iter().map(|s| 1usize << s).sum();
    let gather = |idx: usize| -> usize {
        shifts
            .iter()
            .enumerate()
            .map(|(t, s)| ((idx >> s) & 1) << (m - 1 - t))
            .sum()
    };
    let scatter = |base: usize, local: usize| -> usize {
        shifts
            .iter()
            .enumerate()
            .fold(base & !mask, |acc, (t, s)| acc | (((local >> (m - 1 - t)) & 1) << s))
    };

    let amplitudes = (0..psi.amplitudes.len())
        .map(|idx| {
            let row = gather(idx);
            (0..op_dim)
                .map(|col| op.matrix[(row, col)] * psi.amplitudes[scatter(idx, col)])
                .sum()
        })
        .collect();

    Ok(Ket {
        labels: psi.labels.clone(),
        amplitudes,
        order: psi.order,
    })
}

/// Reduced state of one subsystem: `Σ_env ⟨env|ψ⟩⟨ψ|env⟩`.
pub fn partial_trace(psi: &Ket, keep: Subsystem) -> Result<DensityMatrix> {
    let pos = psi.position(keep).ok_or(Error::UnknownSubsystem(keep))?;
    let shift = psi.labels.len() - 1 - pos;
    let mut rho = CMatrix::zeros(2);
    for (idx, amp) in psi.amplitudes.iter().enumerate() {
        let row = (idx >> shift) & 1;
        if row != 0 {
            continue;
        }
        let partner = idx | (1 << shift);
        let pair = [*amp, psi.amplitudes[partner]];
        for i in 0..2 {
            for j in 0..2 {
                rho[(i, j)] += pair[i] * pair[j].conj();
            }
        }
    }
    DensityMatrix::new(psi.labels[pos], rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisChange {
    CircularToLinear,
    LinearToCircular,
}

/// Columns are `|+ℓ⟩` and `|−ℓ⟩` written in `(h_ℓ, v_ℓ)` rows:
/// `[[1, 1], [i, −i]]/√2`.
pub fn circular_to_linear() -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_rows2([[ONE * s, ONE * s], [I * s, -I * s]])
}

/// Re-expresses the amplitudes of one OAM subsystem in the other basis.
pub fn oam_basis_change(psi: &Ket, subsystem: Subsystem, direction: BasisChange) -> Result<Ket> {
    let label = psi.label_of(subsystem)?;
    if !subsystem.is_oam() {
        return Err(Error::IncompatibleBasis {
            subsystem,
            basis: "OAM",
        });
    }
    let (from, to, matrix) = match direction {
        BasisChange::CircularToLinear => (Basis::Circular, Basis::Linear, circular_to_linear()),
        BasisChange::LinearToCircular => (Basis::Linear, Basis::Circular, circular_to_linear().adjoint()),
    };
    if label.basis != from {
        return Err(Error::BasisMismatch {
            subsystem,
            expected: from.name(),
            found: label.basis.name(),
        });
    }
    let op = Operator {
        labels: vec![label],
        matrix,
        kind: OperatorKind::Unitary,
    };
    let mut out = apply(&op, psi)?;
    let pos = out.position(subsystem).expect("label checked above");
    out.labels[pos] = SubsystemLabel { subsystem, basis: to };
    Ok(out)
}

/// Pauli matrices in the order `(1, σx, σy, σz)`.
pub mod pauli {
    use super::*;

    pub fn identity() -> CMatrix {
        CMatrix::identity(2)
    }

    pub fn x() -> CMatrix {
        CMatrix::from_rows2([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn y() -> CMatrix {
        CMatrix::from_rows2([[ZERO, -I], [I, ZERO]])
    }

    pub fn z() -> CMatrix {
        CMatrix::from_rows2([[ONE, ZERO], [ZERO, -ONE]])
    }
}

/// Mixed state of a single two-level subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    label: SubsystemLabel,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Accepts matrices that are Hermitian and unit-trace within
    /// [`EXACT_TOL`] and have no eigenvalue below `-PSD_TOL`.
    pub fn new(label: SubsystemLabel, matrix: CMatrix) -> Result<Self> {
        if matrix.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: matrix.dim(),
            });
        }
        if matrix.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidDensityMatrix("non-finite entry".into()));
        }
        let herm = matrix.hermiticity_defect();
        if herm > EXACT_TOL {
            return Err(Error::InvalidDensityMatrix(format!("not Hermitian (defect {herm:e})")));
        }
        let trace = matrix.trace();
        if (trace - ONE).norm() > EXACT_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace is {trace}")));
        }
        let min_eig = HermitianEigen2::new(&matrix).values[0];
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self { label, matrix })
    }

    /// `|ψ⟩⟨ψ|` for a single-subsystem ket.
    pub fn from_ket(psi: &Ket) -> Result<Self> {
        if psi.labels.len() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: psi.amplitudes.len(),
            });
        }
        Self::new(psi.labels[0], CMatrix::outer(&psi.amplitudes, &psi.amplitudes))
    }

    pub fn maximally_mixed(label: SubsystemLabel) -> Self {
        Self {
            label,
            matrix: CMatrix::identity(2).scale(ONE * 0.5),
        }
    }

    pub fn label(&self) -> SubsystemLabel {
        self.label
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn eigen(&self) -> HermitianEigen2 {
        HermitianEigen2::new(&self.matrix)
    }

    /// Same state written in another OAM basis.
    pub fn in_basis(&self, basis: OamBasis) -> Result<Self> {
        let target = basis.as_basis();
        let u = match (self.label.basis, target) {
            (Basis::Polarization, _) => {
                return Err(Error::IncompatibleBasis {
                    subsystem: self.label.subsystem,
                    basis: target.name(),
                })
            }
            (from, to) if from == to => return Ok(self.clone()),
            (Basis::Circular, _) => circular_to_linear(),
            _ => circular_to_linear().adjoint(),
        };
        let matrix = &(&u * &self.matrix) * &u.adjoint();
        Ok(Self {
            label: SubsystemLabel::new(self.label.subsystem, target)?,
            matrix,
        })
    }

    /// `‖ρ − σ‖₁ / 2`
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.label != other.label {
            return Err(Error::BasisMismatch {
                subsystem: other.label.subsystem,
                expected: self.label.basis.name(),
                found: other.label.basis.name(),
            });
        }
        let diff = &self.matrix - &other.matrix;
        let eig = HermitianEigen2::new(&diff);
        Ok(0.5 * (eig.values[0].abs() + eig.values[1].abs()))
    }

    /// `Tr(Π ρ)`, real part.
    pub fn expectation(&self, op: &CMatrix) -> f64 {
        (op * &self.matrix).trace().re
    }
}
