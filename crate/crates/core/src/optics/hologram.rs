//! Sector holograms for the SLM that projects onto `h_ℓ`/`v_ℓ` modes.
//!
//! The phase written at column `x` is
//!
//! ```text
//! Mod(sgn(sin(ℓφ)) + 2πx/Λ, 2π)
//! ```
//!
//! for the `v_ℓ` mask. The `h_ℓ` mask uses `cos(ℓφ)` and the plain blazed
//! grating drops the sign term. `sgn(0)` is `+1`. The sign of `sin(ℓφ)` is
//! read off `Im((x + iy)^ℓ)`, so the mask is built only from IEEE
//! multiplications, additions and `fmod`, and is bit-identical across
//! platforms.

use std::f64::consts::TAU;
use std::str::FromStr;

use num_complex::Complex64;

use super::{cpow, GridSpec, Image, ImageKind};
use crate::error::{Error, Result};
use crate::hilbert::OamOrder;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HologramTarget {
    SectorV,
    SectorH,
    Blazed,
}

impl FromStr for HologramTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sector-v" | "sector_v" => Ok(HologramTarget::SectorV),
            "sector-h" | "sector_h" => Ok(HologramTarget::SectorH),
            "blazed" => Ok(HologramTarget::Blazed),
            _ => Err(Error::OutOfRange(format!("unknown hologram target '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HologramSpec {
    pub order: OamOrder,
    /// Grating period in pixels.
    pub pitch: f64,
    pub target: HologramTarget,
}

impl HologramSpec {
    pub fn new(order: OamOrder, pitch: f64, target: HologramTarget) -> Result<Self> {
        if !(pitch >= 2.0) || !pitch.is_finite() {
            return Err(Error::OutOfRange(format!("pitch must be at least 2 pixels, got {pitch}")));
        }
        Ok(Self { order, pitch, target })
    }
}

fn sign(v: f64) -> f64 {
    if v < 0.0 {
        -1.0
    } else {
        1.0
    }
}

fn wrap(phase: f64) -> f64 {
    let w = phase.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Phase mask for the SLM, values in `[0, 2π)`.
pub fn sector_hologram(spec: &HologramSpec, grid: &GridSpec) -> Image {
    let ell = spec.order.get();
    let mut values = Vec::with_capacity(grid.len());
    for row in 0..grid.height {
        for col in 0..grid.width {
            let sector = match spec.target {
                HologramTarget::Blazed => 0.0,
                target => {
                    let (x, y) = grid.coords(col, row);
                    let z = cpow(Complex64::new(x, y), ell);
                    sign(if target == HologramTarget::SectorV { z.im } else { z.re })
                }
            };
            values.push(wrap(sector + TAU * col as f64 / spec.pitch));
        }
    }
    Image {
        grid: *grid,
        values,
        kind: ImageKind::Phase,
    }
}
