//! Transverse-mode physics for photon B.
//!
//! `|±ℓ⟩` are Laguerre-Gauss modes with radial index `p = 0`:
//!
//! ```text
//! u_ℓ(r, φ) = N · (r/w)^{|ℓ|} · exp(−r²/w²) · exp(iℓφ)
//! ```
//!
//! sampled on a square-pixel grid centred on the beam axis. `N` is fixed
//! numerically so that the discrete sum `Σ |u|² · pixel_area` is exactly one.
//! `(r/w)^{|ℓ|} e^{iℓφ}` is evaluated as `((x ± iy)/w)^{|ℓ|}`, which keeps the
//! azimuthal factor free of `atan2`.
//!
//! Pixel `(0, 0)` is the top-left corner; columns grow to the right and rows
//! grow downwards. Physical coordinates put the origin at the grid centre with
//! `y` pointing up, so `φ = 0` is the `+x` direction and `φ` grows
//! counter-clockwise as the image is displayed.

mod hologram;
mod pnm;

pub use hologram::{sector_hologram, HologramSpec, HologramTarget};
pub use pnm::{read_pgm, to_gray, write_pgm, write_raw_f64};

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{Ket, OamBasis};

/// Sampling grid for transverse images.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub width: usize,
    pub height: usize,
    /// Half-width of the frame in units of the waist.
    pub extent: f64,
    pub waist: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            width: 256,
            height: 256,
            extent: 3.0,
            waist: 1.0,
        }
    }
}

impl GridSpec {
    pub fn new(width: usize, height: usize, extent: f64, waist: f64) -> Result<Self> {
        if width < 2 || height < 2 {
            return Err(Error::OutOfRange(format!("grid must be at least 2x2, got {width}x{height}")));
        }
        if !(extent > 0.0) || !extent.is_finite() {
            return Err(Error::OutOfRange(format!("extent must be positive, got {extent}")));
        }
        if !(waist > 0.0) || !waist.is_finite() {
            return Err(Error::OutOfRange(format!("waist must be positive, got {waist}")));
        }
        Ok(Self {
            width,
            height,
            extent,
            waist,
        })
    }

    pub fn square(size: usize) -> Result<Self> {
        Self::new(size, size, 3.0, 1.0)
    }

    pub fn pixel_size(&self) -> f64 {
        2.0 * self.extent * self.waist / self.width as f64
    }

    pub fn pixel_area(&self) -> f64 {
        self.pixel_size() * self.pixel_size()
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Physical coordinates of a pixel centre.
    pub fn coords(&self, col: usize, row: usize) -> (f64, f64) {
        let p = self.pixel_size();
        let x = (col as f64 + 0.5 - 0.5 * self.width as f64) * p;
        let y = (0.5 * self.height as f64 - row as f64 - 0.5) * p;
        (x, y)
    }

    /// Inverse of [`coords`](Self::coords), in fractional pixel units.
    pub fn to_pixel(&self, x: f64, y: f64) -> (f64, f64) {
        let p = self.pixel_size();
        let col = x / p + 0.5 * self.width as f64 - 0.5;
        let row = 0.5 * self.height as f64 - 0.5 - y / p;
        (col, row)
    }

    fn pixels(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.height).flat_map(move |row| (0..self.width).map(move |col| (col, row)))
    }
}

/// `z^n` by repeated multiplication.
pub(crate) fn cpow(z: Complex64, n: u32) -> Complex64 {
    (0..n).fold(Complex64::new(1.0, 0.0), |acc, _| acc * z)
}

/// Unnormalized `p = 0` Laguerre-Gauss amplitude at a physical point.
pub fn lg_amplitude(ell_signed: i32, x: f64, y: f64, waist: f64) -> Complex64 {
    let z = if ell_signed >= 0 {
        Complex64::new(x / waist, y / waist)
    } else {
        Complex64::new(x / waist, -y / waist)
    };
    let r2 = (x * x + y * y) / (waist * waist);
    cpow(z, ell_signed.unsigned_abs()) * (-r2).exp()
}

/// Complex transverse field on a grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
}

/// Discretely normalized LG mode with signed OAM `ell_signed`.
pub fn lg_field(ell_signed: i32, grid: &GridSpec) -> Result<Field> {
    if ell_signed == 0 {
        return Err(Error::InvalidOamOrder(0));
    }
    let mut values: Vec<Complex64> = grid
        .pixels()
        .map(|(col, row)| {
            let (x, y) = grid.coords(col, row);
            lg_amplitude(ell_signed, x, y, grid.waist)
        })
        .collect();
    let power: f64 = values.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.pixel_area();
    let scale = 1.0 / power.sqrt();
    for v in &mut values {
        *v *= scale;
    }
    Ok(Field {
        grid: *grid,
        values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageKind {
    /// Non-negative.
    Intensity,
    /// In `[0, 2π)`.
    Phase,
}

/// Real-valued image, row-major from the top-left pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub kind: ImageKind,
}

impl Image {
    pub fn get(&self, col: usize, row: usize) -> f64 {
        self.values[row * self.grid.width + col]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `Σ value · pixel_area`
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.pixel_area()
    }

    /// Bilinear interpolation at a physical point; zero outside the frame.
    pub fn sample(&self, x: f64, y: f64) -> f64 {
        let (fc, fr) = self.grid.to_pixel(x, y);
        let (c0, r0) = (fc.floor(), fr.floor());
        if c0 < 0.0 || r0 < 0.0 {
            return 0.0;
        }
        let (c0, r0) = (c0 as usize, r0 as usize);
        if c0 + 1 >= self.grid.width || r0 + 1 >= self.grid.height {
            return 0.0;
        }
        let (tc, tr) = (fc - c0 as f64, fr - r0 as f64);
        let top = self.get(c0, r0) * (1.0 - tc) + self.get(c0 + 1, r0) * tc;
        let bottom = self.get(c0, r0 + 1) * (1.0 - tc) + self.get(c0 + 1, r0 + 1) * tc;
        top * (1.0 - tr) + bottom * tr
    }
}

/// Circular-basis amplitudes `(c₊, c₋)` of a single OAM qubit.
fn circular_amplitudes(b_state: &Ket) -> Result<[Complex64; 2]> {
    if b_state.labels().len() != 1 || !b_state.labels()[0].subsystem().is_oam() {
        return Err(Error::Precondition("expected a single OAM subsystem".into()));
    }
    let circ = b_state.in_basis(b_state.labels()[0].subsystem(), OamBasis::Circular)?;
    Ok([circ.amplitudes()[0], circ.amplitudes()[1]])
}

/// `c₊ F₊ + c₋ F₋` for an OAM qubit, renormalized on the grid.
///
/// For even `ℓ` the sampled `F₊` and `F₋` are not exactly orthogonal on a
/// square grid (the cross term `e^{2iℓφ}` has 4-fold symmetry), so the
/// superposition is rescaled to unit discrete power.
pub fn superposition_field(b_state: &Ket, grid: &GridSpec) -> Result<Field> {
    let [c_plus, c_minus] = circular_amplitudes(b_state)?;
    let ell = b_state.order().get() as i32;
    let plus = lg_field(ell, grid)?;
    let minus = lg_field(-ell, grid)?;
    let mut values: Vec<Complex64> = plus
        .values
        .iter()
        .zip(&minus.values)
        .map(|(p, m)| c_plus * p + c_minus * m)
        .collect();
    let power: f64 = values.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.pixel_area();
    let scale = 1.0 / power.sqrt();
    for v in &mut values {
        *v *= scale;
    }
    Ok(Field {
        grid: *grid,
        values,
    })
}

/// Far-field intensity of photon B in the OAM state `b_state`.
pub fn intensity_image(b_state: &Ket, grid: &GridSpec) -> Result<Image> {
    let field = superposition_field(b_state, grid)?;
    Ok(Image {
        grid: *grid,
        values: field.values.iter().map(|z| z.norm_sqr()).collect(),
        kind: ImageKind::Intensity,
    })
}

/// Radius of peak intensity for `|ℓ|`: `w·√(|ℓ|/2)`.
pub fn peak_radius(ell: u32, waist: f64) -> f64 {
    waist * (ell as f64 / 2.0).sqrt()
}

/// Intensity sampled on a circle of `radius`, `samples` points from `φ = 0`.
pub fn azimuthal_profile(image: &Image, radius: f64, samples: usize) -> Vec<f64> {
    (0..samples)
        .map(|k| {
            let phi = TAU * k as f64 / samples as f64;
            image.sample(radius * phi.cos(), radius * phi.sin())
        })
        .collect()
}

/// Number of bright lobes on a closed azimuthal profile: separate arcs whose
/// value reaches `threshold · max`. A profile that never dips below the
/// threshold (a ring) has no lobes.
pub fn count_lobes(profile: &[f64], threshold: f64) -> usize {
    let max = profile.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if profile.is_empty() || !(max > 0.0) {
        return 0;
    }
    let level = threshold * max;
    let above: Vec<bool> = profile.iter().map(|&v| v >= level).collect();
    if above.iter().all(|&a| a) {
        return 0;
    }
    (0..above.len())
        .filter(|&i| above[i] && !above[(i + above.len() - 1) % above.len()])
        .count()
}

/// Pearson correlation of two equally sized images.
pub fn normalized_cross_correlation(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        cov += dx * dy;
        va += dx * dx;
        vb += dy * dy;
    }
    cov / (va * vb).sqrt()
}

/// Bloch vector of an OAM qubit on the Poincaré sphere with `|+ℓ⟩` at the
/// south pole `(0, 0, −1)` and `|−ℓ⟩` at the north pole. `|h_ℓ⟩` sits at
/// `(1, 0, 0)` and `|v_ℓ⟩` at `(−1, 0, 0)`.
pub fn poincare_coords(b_state: &Ket) -> Result<[f64; 3]> {
    let [c_plus, c_minus] = circular_amplitudes(b_state)?;
    let n2 = c_plus.norm_sqr() + c_minus.norm_sqr();
    if (n2 - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized(n2.sqrt()));
    }
    let cross = c_plus.conj() * c_minus;
    Ok([
        2.0 * cross.re,
        2.0 * cross.im,
        c_minus.norm_sqr() - c_plus.norm_sqr(),
    ])
}
