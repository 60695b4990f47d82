//! Small dense complex matrices.
//!
//! Everything in this simulator lives in at most eight dimensions, so a flat
//! row-major `Vec<Complex64>` is all the structure needed. The only
//! decomposition required is the closed-form eigensystem of a 2×2 Hermitian
//! matrix, used for density-matrix square roots and trace distances.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major entries. Panics if the length is not a square.
    pub fn from_row_major(data: Vec<Complex64>) -> Self {
        let dim = (data.len() as f64).sqrt().round() as usize;
        assert_eq!(dim * dim, data.len(), "row-major data is not square");
        Self { dim, data }
    }

    pub fn from_rows2(rows: [[Complex64; 2]; 2]) -> Self {
        Self {
            dim: 2,
            data: vec![rows[0][0], rows[0][1], rows[1][0], rows[1][1]],
        }
    }

    /// `|a⟩⟨b|`
    pub fn outer(a: &[Complex64], b: &[Complex64]) -> Self {
        assert_eq!(a.len(), b.len());
        Self::from_fn(a.len(), |i, j| a[i] * b[j].conj())
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        Self::from_fn(entries.len(), |i, j| if i == j { entries[i] } else { ZERO })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &CMatrix) -> Self {
        let (n, m) = (self.dim, other.dim);
        Self::from_fn(n * m, |i, j| self[(i / m, j / m)] * other[(i % m, j % m)])
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// `‖U†U − I‖_max`
    pub fn unitarity_defect(&self) -> f64 {
        (&self.adjoint() * self).max_abs_diff(&CMatrix::identity(self.dim))
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        CMatrix::from_fn(n, |i, j| (0..n).map(|k| self[(i, k)] * rhs[(k, j)]).sum())
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigensystem of a 2×2 Hermitian matrix.
#[derive(Debug, Clone, Copy)]
pub struct HermitianEigen2 {
    /// Ascending.
    pub values: [f64; 2],
    /// `vectors[k]` is the unit eigenvector for `values[k]`.
    pub vectors: [[Complex64; 2]; 2],
}

impl HermitianEigen2 {
    /// Only the Hermitian part of `m` is used.
    pub fn new(m: &CMatrix) -> Self {
        assert_eq!(m.dim(), 2, "HermitianEigen2 needs a 2x2 matrix");
        let a = m[(0, 0)].re;
        let d = m[(1, 1)].re;
        let b = (m[(0, 1)] + m[(1, 0)].conj()) * 0.5;
        let mean = 0.5 * (a + d);
        let half_gap = 0.5 * (a - d);
        let radius = half_gap.hypot(b.norm());

        if b.norm() <= f64::EPSILON * radius.max(f64::MIN_POSITIVE) {
            // already diagonal
            return if a <= d {
                Self {
                    values: [a, d],
                    vectors: [[ONE, ZERO], [ZERO, ONE]],
                }
            } else {
                Self {
                    values: [d, a],
                    vectors: [[ZERO, ONE], [ONE, ZERO]],
                }
            };
        }

        // Eigenvector of the upper eigenvalue, picking the better-conditioned row.
        let upper = if half_gap >= 0.0 {
            [Complex64::new(radius + half_gap, 0.0), b.conj()]
        } else {
            [b, Complex64::new(radius - half_gap, 0.0)]
        };
        let n = norm(&upper);
        let upper = [upper[0] / n, upper[1] / n];
        let lower = [-upper[1].conj(), upper[0].conj()];
        Self {
            values: [mean - radius, mean + radius],
            vectors: [lower, upper],
        }
    }

    /// `Σ f(λ_k) |v_k⟩⟨v_k|`
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let mut out = CMatrix::zeros(2);
        for (value, vector) in self.values.iter().zip(&self.vectors) {
            let weight = Complex64::new(f(*value), 0.0);
            let proj = CMatrix::outer(vector, vector).scale(weight);
            out = &out + &proj;
        }
        out
    }
}
