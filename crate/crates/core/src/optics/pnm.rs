//! Binary PGM (P5) export and raw float dumps.

use std::f64::consts::TAU;
use std::io::{Read, Write};

use super::{Image, ImageKind};
use crate::error::{Error, Result};

/// 8-bit grey levels. Intensities are scaled linearly so the maximum maps to
/// 255. Phases are quantized to the nearest of 256 levels per `2π`, wrapping
/// so that phases just below `2π` read as 0.
pub fn to_gray(image: &Image) -> Vec<u8> {
    match image.kind {
        ImageKind::Intensity => {
            let max = image.max();
            if !(max > 0.0) {
                return vec![0; image.values.len()];
            }
            image
                .values
                .iter()
                .map(|v| (v / max * 255.0).round().clamp(0.0, 255.0) as u8)
                .collect()
        }
        ImageKind::Phase => image
            .values
            .iter()
            .map(|v| ((v / TAU * 256.0).round().clamp(0.0, 256.0) as u32 % 256) as u8)
            .collect(),
    }
}

pub fn write_pgm<W: Write>(image: &Image, mut out: W) -> Result<()> {
    write!(out, "P5\n{} {}\n255\n", image.grid.width, image.grid.height)?;
    out.write_all(&to_gray(image))?;
    Ok(())
}

/// Little-endian `f64`, row-major, no header.
pub fn write_raw_f64<W: Write>(image: &Image, mut out: W) -> Result<()> {
    for v in &image.values {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

/// Parses a P5 file with maxval 255: `(width, height, pixels)`.
pub fn read_pgm<R: Read>(mut input: R) -> Result<(usize, usize, Vec<u8>)> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let bad = |msg: &str| Error::Io(format!("malformed PGM: {msg}"));
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    pos += 1;
    if fields[0] != "P5" || fields[3] != "255" {
        return Err(bad("expected P5 with maxval 255"));
    }
    let width: usize = fields[1].parse().map_err(|_| bad("width"))?;
    let height: usize = fields[2].parse().map_err(|_| bad("height"))?;
    let pixels = bytes.get(pos..).unwrap_or_default().to_vec();
    if pixels.len() != width * height {
        return Err(bad("pixel count"));
    }
    Ok((width, height, pixels))
}
