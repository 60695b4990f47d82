use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use hybrid_teleport::hilbert::{Ket, OamOrder};
use hybrid_teleport::optics::{
    intensity_image, poincare_coords, sector_hologram, to_gray, write_pgm, write_raw_f64, GridSpec,
    HologramSpec, HologramTarget,
};
use hybrid_teleport::protocol::{
    teleport_with_mode, BellLabel, InputPolarization, MeasurementMode, NamedPolarization,
};
use hybrid_teleport::tomography::{
    density_to_json, mub_inputs, tomography_report, write_counts_csv, write_report_csv, MleOptions,
    MubLabel, NoiseModel, ReportConfig, ReportInput,
};
use hybrid_teleport::Error;

use crate::{HoloArgs, RenderArgs, TableArgs, TeleportArgs};

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments; nothing was computed.
    Validation(String),
    Internal(String),
}

impl CliError {
    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Internal(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidOamOrder(_) | Error::OutOfRange(_) => CliError::Validation(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn order(ell: i64) -> Result<OamOrder> {
    OamOrder::new(ell).map_err(|_| invalid(format!("ell must be an integer >= 1, got {ell}")))
}

fn angle(value: f64, degrees: bool) -> f64 {
    if degrees {
        value.to_radians()
    } else {
        value
    }
}

/// Validates γ; values within 1e-12 of the ends are snapped onto `[0, π]`
/// so that degree conversions of 0° and 180° are accepted.
fn polarization(gamma: f64, delta: f64) -> Result<InputPolarization> {
    use std::f64::consts::PI;
    let gamma = if (gamma - PI).abs() <= 1e-12 {
        PI
    } else if gamma.abs() <= 1e-12 {
        0.0
    } else {
        gamma
    };
    if !gamma.is_finite() || !(0.0..=PI).contains(&gamma) {
        return Err(invalid(format!("gamma must be in [0, pi], got {gamma}")));
    }
    Ok(InputPolarization::new(gamma, delta)?)
}

fn grid(spec: &str, extent: f64) -> Result<GridSpec> {
    let bad = || invalid(format!("grid must look like WxH, got '{spec}'"));
    let (w, h) = spec.split_once(['x', 'X']).ok_or_else(bad)?;
    let w: usize = w.trim().parse().map_err(|_| bad())?;
    let h: usize = h.trim().parse().map_err(|_| bad())?;
    Ok(GridSpec::new(w, h, extent, 1.0)?)
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))
}

fn emit(value: &serde_json::Value, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
    match out {
        Some(path) => {
            let mut f = create(path)?;
            writeln!(f, "{text}")?;
            f.flush()?;
        }
        None => ignore_broken_pipe(writeln!(io::stdout().lock(), "{text}"))?,
    }
    Ok(())
}

/// A closed downstream pipe (`| head`) is not an error.
fn ignore_broken_pipe(r: io::Result<()>) -> io::Result<()> {
    match r {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        other => other,
    }
}

pub fn teleport(args: &TeleportArgs) -> Result<()> {
    let order = order(args.ell)?;
    let gamma = angle(args.gamma, args.angles.degrees);
    let delta = angle(args.delta, args.angles.degrees);
    let pol = polarization(gamma, delta)?;
    let outcome = args.outcome.as_deref().map(str::parse::<BellLabel>).transpose()?;
    let mode = if args.physical {
        MeasurementMode::Physical
    } else {
        MeasurementMode::Direct
    };

    let run = teleport_with_mode(&pol, order, outcome, Some(args.seed), mode)?;
    let amps = run.b_state.amplitudes();
    let poincare = poincare_coords(&run.b_state)?;
    let value = json!({
        "input": {
            "gamma": pol.gamma(),
            "delta": pol.delta(),
            "alpha": pair(pol.alpha()),
            "beta": pair(pol.beta()),
        },
        "ell": order.get(),
        "seed": args.seed,
        "outcome": {
            "label": run.outcome.to_string(),
            "bits": run.outcome.bits(),
            "probability": run.probability,
            "forced": outcome.is_some(),
        },
        "b_state": {
            "basis": "h,v",
            "amplitudes": [pair(amps[0]), pair(amps[1])],
        },
        "poincare": poincare,
    });
    emit(&value, args.out.as_deref())
}

/// Photon B state for a `--state` token.
fn render_state(token: &str, order: OamOrder) -> Result<Ket> {
    let direct = |label: MubLabel| Ok(label.ket(order));
    match token {
        "h" => direct(MubLabel::H),
        "v" => direct(MubLabel::V),
        "d" => direct(MubLabel::D),
        "a" => direct(MubLabel::A),
        "l" | "plus" => direct(MubLabel::L),
        "r" | "minus" => direct(MubLabel::R),
        _ => {
            let named: NamedPolarization = token
                .parse()
                .map_err(|_| invalid(format!("unknown state '{token}'")))?;
            let pol = InputPolarization::named(named);
            let run = teleport_with_mode(&pol, order, Some(BellLabel::PhiPlus), None, MeasurementMode::Direct)?;
            Ok(run.b_state)
        }
    }
}

#[derive(Serialize)]
struct Rendered {
    state: String,
    path: PathBuf,
    poincare: [f64; 3],
}

pub fn render(args: &RenderArgs) -> Result<()> {
    let order = order(args.ell)?;
    let grid = grid(&args.grid.grid, args.grid.extent)?;
    let tokens: Vec<String> = if args.states.is_empty() {
        ["L", "H", "A", "V", "D"].map(String::from).to_vec()
    } else {
        args.states.clone()
    };
    let states = tokens
        .iter()
        .map(|t| render_state(t, order).map(|k| (t.clone(), k)))
        .collect::<Result<Vec<_>>>()?;

    fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Internal(format!("cannot create {}: {e}", args.out.display())))?;
    let mut files = Vec::new();
    for (index, (token, ket)) in states.iter().enumerate() {
        let image = intensity_image(ket, &grid)?;
        let stem = format!("{:02}_{}_ell{}", index + 1, token, order.get());
        let path = args.out.join(format!("{stem}.pgm"));
        let mut f = create(&path)?;
        write_pgm(&image, &mut f)?;
        f.flush()?;
        if args.raw {
            let mut f = create(&args.out.join(format!("{stem}.f64")))?;
            write_raw_f64(&image, &mut f)?;
            f.flush()?;
        }
        files.push(Rendered {
            state: token.clone(),
            path,
            poincare: poincare_coords(ket)?,
        });
    }
    emit(
        &json!({ "ell": order.get(), "grid": [grid.width, grid.height], "extent": grid.extent, "files": files }),
        None,
    )
}

pub fn holo(args: &HoloArgs) -> Result<()> {
    let order = order(args.ell)?;
    if !(args.pitch >= 2.0) {
        return Err(invalid(format!("pitch must be at least 2 pixels, got {}", args.pitch)));
    }
    let target: HologramTarget = args.target.parse()?;
    let grid = grid(&args.grid.grid, args.grid.extent)?;
    let spec = HologramSpec::new(order, args.pitch, target)?;

    let image = sector_hologram(&spec, &grid);
    let mut f = create(&args.out)?;
    write_pgm(&image, &mut f)?;
    f.flush()?;
    if let Some(raw) = &args.raw {
        let mut f = create(raw)?;
        write_raw_f64(&image, &mut f)?;
        f.flush()?;
    }
    let gray = to_gray(&image);
    emit(
        &json!({
            "path": args.out,
            "ell": order.get(),
            "pitch": args.pitch,
            "target": args.target,
            "grid": [grid.width, grid.height],
            "gray_min": gray.iter().min(),
            "gray_max": gray.iter().max(),
        }),
        None,
    )
}

fn parse_row(spec: &str, degrees: bool) -> Result<ReportInput> {
    let bad = || invalid(format!("row must look like label:gamma:delta, got '{spec}'"));
    let mut parts = spec.rsplitn(3, ':');
    let delta: f64 = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
    let gamma: f64 = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
    let label = parts.next().ok_or_else(bad)?.trim();
    if label.is_empty() {
        return Err(bad());
    }
    let pol = polarization(angle(gamma, degrees), angle(delta, degrees))?;
    Ok(ReportInput::new(label, pol.gamma(), pol.delta()))
}

pub fn table1(args: &TableArgs) -> Result<()> {
    let order = order(args.ell)?;
    if args.shots == 0 {
        return Err(invalid("shots must be at least 1"));
    }
    if args.trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    let mut inputs = mub_inputs();
    for row in &args.rows {
        inputs.push(parse_row(row, args.angles.degrees)?);
    }
    let config = ReportConfig {
        order,
        shots: args.shots,
        trials: args.trials,
        seed: args.seed,
        noise: if args.noiseless {
            NoiseModel::Noiseless
        } else {
            NoiseModel::Poisson
        },
        mle: MleOptions::default(),
    };

    let reports = tomography_report(&inputs, &config)?;
    match &args.out {
        Some(path) => {
            let mut f = create(path)?;
            write_report_csv(&reports, &mut f)?;
            f.flush()?;
        }
        None => match write_report_csv(&reports, io::stdout().lock()) {
            Err(Error::Io(msg)) if msg.contains("Broken pipe") => {}
            other => other?,
        },
    }
    if let Some(path) = &args.counts {
        let rows: Vec<(&str, &[_])> = reports
            .iter()
            .map(|r| (r.input.label.as_str(), &r.first_counts[..]))
            .collect();
        let mut f = create(path)?;
        write_counts_csv(&rows, &mut f)?;
        f.flush()?;
    }
    if let Some(path) = &args.density {
        let entries = reports
            .iter()
            .map(|r| {
                Ok(json!({
                    "label": r.input.label,
                    "true": density_to_json(&r.true_state)?,
                    "reconstructed": density_to_json(&r.reconstructed)?,
                }))
            })
            .collect::<Result<Vec<_>>>()?;
        emit(&serde_json::Value::Array(entries), Some(path))?;
    }
    let grand = reports.iter().map(|r| r.fidelity_mean).sum::<f64>() / reports.len() as f64;
    eprintln!("grand mean F = {grand:.6} over {} rows", reports.len());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use hybrid_teleport::hilbert::OamBasis;

    #[test]
    fn grid_parsing() {
        let g = grid("64x32", 3.0).unwrap();
        assert_eq!((g.width, g.height), (64, 32));
        assert!(matches!(grid("64", 3.0), Err(CliError::Validation(_))));
        assert!(matches!(grid("1x1", 3.0), Err(CliError::Validation(_))));
        assert!(matches!(grid("8x8", -1.0), Err(CliError::Validation(_))));
    }

    #[test]
    fn row_parsing() {
        let r = parse_row("zeta:1.2:0.4", false).unwrap();
        assert_eq!(r.label, "zeta");
        assert_eq!((r.gamma, r.delta), (1.2, 0.4));
        let r = parse_row("eta:90:45", true).unwrap();
        assert!((r.gamma - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!(parse_row("x:4:0", false).is_err());
        assert!(parse_row(":1:0", false).is_err());
        assert!(parse_row("1:0", false).is_err());
    }

    #[test]
    fn gamma_endpoints_in_degrees() {
        assert!(polarization(angle(180.0, true), 0.0).is_ok());
        assert!(polarization(angle(0.0, true), 0.0).is_ok());
        assert!(polarization(3.2, 0.0).is_err());
        assert!(polarization(-0.1, 0.0).is_err());
    }

    #[test]
    fn uppercase_states_teleport_to_lowercase_ones() {
        let o = OamOrder::new(2).unwrap();
        for (upper, lower) in [("H", "h"), ("V", "v"), ("D", "d"), ("A", "a"), ("L", "l"), ("R", "r")] {
            let a = render_state(upper, o).unwrap();
            let b = render_state(lower, o).unwrap();
            assert!((a.overlap(&b).unwrap() - 1.0).abs() < 1e-12, "{upper}");
        }
        let plus = render_state("plus", o).unwrap();
        let circ = plus.in_basis(plus.labels()[0].subsystem(), OamBasis::Circular).unwrap();
        assert!((circ.amplitudes()[0].norm() - 1.0).abs() < 1e-12);
        assert!(render_state("q", o).is_err());
    }
}
