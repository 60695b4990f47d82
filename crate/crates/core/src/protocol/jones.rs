//! Jones matrices for ideal wave plates acting on photon A's polarization.
//!
//! A retarder with retardance `φ` and fast axis at angle `θ` from horizontal is
//!
//! ```text
//! J(φ, θ) = R(−θ) · diag(e^{iφ/2}, e^{−iφ/2}) · R(θ),   R(θ) = [[cos θ, sin θ], [−sin θ, cos θ]]
//! ```
//!
//! written in the `(H, V)` basis. With this sign choice a quarter-wave plate
//! at `π/4` turns `|H⟩` into `|L⟩ = (|H⟩ + i|V⟩)/√2` exactly.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::hilbert::{Operator, OperatorKind, SubsystemLabel};
use crate::linalg::CMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WavePlate {
    Half,
    Quarter,
}

impl WavePlate {
    pub fn retardance(self) -> f64 {
        match self {
            WavePlate::Half => PI,
            WavePlate::Quarter => FRAC_PI_2,
        }
    }
}

pub fn retarder_matrix(retardance: f64, fast_axis: f64) -> CMatrix {
    let (s, c) = fast_axis.sin_cos();
    let fast = Complex64::from_polar(1.0, 0.5 * retardance);
    let slow = fast.conj();
    let off = (fast - slow) * c * s;
    CMatrix::from_rows2([
        [fast * c * c + slow * s * s, off],
        [off, fast * s * s + slow * c * c],
    ])
}

/// Jones operator on `polA` for a plate with its fast axis at `angle` radians.
pub fn waveplate_jones(plate: WavePlate, angle: f64) -> Operator {
    Operator::new(
        vec![SubsystemLabel::pol_a()],
        retarder_matrix(plate.retardance(), angle),
        OperatorKind::Unitary,
    )
    .expect("retarder matrices are unitary")
}
