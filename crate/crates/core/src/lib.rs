//! Numerical simulator of hybrid quantum teleportation from the polarization
//! of one photon to the orbital angular momentum (OAM) of its entangled
//! partner.
//!
//! The crate is organised bottom-up:
//!
//! - [`hilbert`]: labeled two-level subsystems, kets, operators, partial traces.
//! - [`protocol`]: pair-source state, input preparation, spin-OAM Bell
//!   analysis and the Pauli correction applied by the receiver.
//! - [`optics`]: Laguerre-Gauss fields, far-field intensity images, sector
//!   holograms and Poincaré-sphere coordinates.
//! - [`tomography`]: six-projector tomography with Poisson counts, maximum
//!   likelihood reconstruction and Uhlmann fidelity.
//!
//! Conventions used throughout:
//!
//! | state | amplitudes |
//! |-------|------------|
//! | `D`, `A` | `(H ± V)/√2` |
//! | `L`, `R` | `(H ± iV)/√2` |
//! | `|±ℓ⟩` | `(|h_ℓ⟩ ± i|v_ℓ⟩)/√2` |
//! | `d_ℓ`, `a_ℓ` | `(h_ℓ ± v_ℓ)/√2` |
//! | `l_ℓ`, `r_ℓ` | `|+ℓ⟩`, `|−ℓ⟩` |
//!
//! With these, `|L⟩` on photon A arrives as `|+ℓ⟩` on photon B.

pub mod error;
pub mod hilbert;
pub mod linalg;
pub mod optics;
pub mod protocol;
pub mod rng;
pub mod tomography;

pub use error::{Error, Result};
pub use hilbert::{DensityMatrix, Ket, OamBasis, OamOrder, Operator, Subsystem, SubsystemLabel};
