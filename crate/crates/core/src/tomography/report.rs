//! Repeated-trial fidelity table for teleported states.

use std::io::Write;

use serde::Serialize;

use super::{fidelity, mle_reconstruct, simulate_counts, CountRecord, MleOptions, NoiseModel};
use crate::error::{Error, Result};
use crate::hilbert::{DensityMatrix, OamBasis, OamOrder, SubsystemLabel};
use crate::linalg::{CMatrix, ONE};
use crate::protocol::{teleport, BellLabel, InputPolarization, NamedPolarization};
use crate::rng::derive_seed;

/// One row of the table: an input polarization and its display label.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportInput {
    pub label: String,
    pub gamma: f64,
    pub delta: f64,
}

impl ReportInput {
    pub fn new(label: impl Into<String>, gamma: f64, delta: f64) -> Self {
        Self {
            label: label.into(),
            gamma,
            delta,
        }
    }

    pub fn named(state: NamedPolarization) -> Self {
        let (gamma, delta) = state.angles();
        Self::new(state.symbol(), gamma, delta)
    }
}

/// `H, V, D, A, L, R`.
pub fn mub_inputs() -> Vec<ReportInput> {
    NamedPolarization::ALL.into_iter().map(ReportInput::named).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportConfig {
    pub order: OamOrder,
    pub shots: u64,
    pub trials: usize,
    pub seed: u64,
    pub noise: NoiseModel,
    pub mle: MleOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TomographyReport {
    pub input: ReportInput,
    /// Ideal teleported state, linear basis.
    pub true_state: DensityMatrix,
    /// Average of the per-trial reconstructions.
    pub reconstructed: DensityMatrix,
    pub fidelities: Vec<f64>,
    pub fidelity_mean: f64,
    /// Sample standard deviation (`n − 1`), zero for a single trial.
    pub fidelity_std: f64,
    pub shots: u64,
    /// Counts of the first trial.
    pub first_counts: [CountRecord; 6],
}

/// Seed of trial `trial` in row `row`.
pub fn trial_seed(seed: u64, row: usize, trial: usize) -> u64 {
    derive_seed(derive_seed(seed, row as u64), trial as u64)
}

/// Teleports each input with the Bell outcome fixed to Φ⁺, then runs
/// `trials` rounds of counting, reconstruction and fidelity.
pub fn tomography_report(inputs: &[ReportInput], config: &ReportConfig) -> Result<Vec<TomographyReport>> {
    if config.trials == 0 {
        return Err(Error::OutOfRange("trials must be at least 1".into()));
    }
    inputs
        .iter()
        .enumerate()
        .map(|(row, input)| report_row(row, input, config))
        .collect()
}

fn report_row(row: usize, input: &ReportInput, config: &ReportConfig) -> Result<TomographyReport> {
    let pol = InputPolarization::new(input.gamma, input.delta)?;
    let out = teleport(&pol, config.order, Some(BellLabel::PhiPlus), None)?;
    let truth = DensityMatrix::from_ket(&out.b_state)?.in_basis(OamBasis::Linear)?;

    let mut fidelities = Vec::with_capacity(config.trials);
    let mut sum = CMatrix::zeros(2);
    let mut first_counts = None;
    for trial in 0..config.trials {
        let counts = simulate_counts(&truth, config.shots, trial_seed(config.seed, row, trial), config.noise)?;
        let fit = mle_reconstruct(&counts, &config.mle)?;
        fidelities.push(fidelity(&truth, &fit.rho)?);
        sum = &sum + fit.rho.matrix();
        first_counts.get_or_insert(counts);
    }

    let n = fidelities.len() as f64;
    let mean = fidelities.iter().sum::<f64>() / n;
    let std = if fidelities.len() > 1 {
        (fidelities.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let avg = sum.scale(ONE / n);
    let avg = (&avg + &avg.adjoint()).scale(ONE * 0.5);
    Ok(TomographyReport {
        input: input.clone(),
        true_state: truth,
        reconstructed: DensityMatrix::new(SubsystemLabel::oam_b(OamBasis::Linear), avg)?,
        fidelities,
        fidelity_mean: mean,
        fidelity_std: std,
        shots: config.shots,
        first_counts: first_counts.expect("at least one trial"),
    })
}

/// `label,projector,shots,count`
pub fn write_counts_csv<W: Write>(rows: &[(&str, &[CountRecord])], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["label", "projector", "shots", "count"])?;
    for (label, records) in rows {
        for r in *records {
            w.write_record([
                label.to_string(),
                r.label.to_string(),
                r.shots.to_string(),
                r.count.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `label,gamma,delta,F_mean,F_std,trials,N`
pub fn write_report_csv<W: Write>(reports: &[TomographyReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["label", "gamma", "delta", "F_mean", "F_std", "trials", "N"])?;
    for r in reports {
        w.write_record([
            r.input.label.clone(),
            format!("{:.6}", r.input.gamma),
            format!("{:.6}", r.input.delta),
            format!("{:.6}", r.fidelity_mean),
            format!("{:.6}", r.fidelity_std),
            r.fidelities.len().to_string(),
            r.shots.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `[[[re, im], [re, im]], [[re, im], [re, im]]]`, row-major in `(h, v)`.
pub fn density_to_json(rho: &DensityMatrix) -> Result<serde_json::Value> {
    let m = if rho.label().subsystem().is_oam() {
        rho.in_basis(OamBasis::Linear)?.matrix().clone()
    } else {
        rho.matrix().clone()
    };
    let entry = |i, j| {
        let z = m[(i, j)];
        serde_json::json!([z.re, z.im])
    };
    Ok(serde_json::json!([[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]]))
}
