//! Maximum-likelihood reconstruction by the diluted RρR iteration.
//!
//! With frequencies `f_i = n_i / Σn` and `p_i = Tr(Π_i ρ)`,
//!
//! ```text
//! R(ρ) = Σ_i (f_i / p_i) Π_i
//! ρ'   = (I + εR) ρ (I + εR) / Tr(…)
//! ```
//!
//! starting from `I/2` with `ε = 0.5`. A step that lowers the log-likelihood
//! is rejected and retried with `ε/2`. Every iterate is PSD by construction.
//!
//! RρR closes the gap to a rank-deficient optimum only like `1/k`, so the
//! result is then refined by a projected Newton ascent in Bloch coordinates,
//! `p_i = (1 + r·n_i)/2`, projecting back onto the unit ball and accepting
//! only steps that do not lower the likelihood.
//!
//! The six MUB projectors sum to `3I`, so `Σ p_i = 3` for every state and the
//! Poisson and multinomial likelihoods differ by a constant: both options
//! share the same maximizer and only the reported value changes.

use serde::{Deserialize, Serialize};

use super::CountRecord;
use crate::error::{Error, Result};
use crate::hilbert::{DensityMatrix, OamBasis, SubsystemLabel};
use crate::linalg::{CMatrix, ONE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Likelihood {
    /// `Σ n_i ln p_i − N Σ p_i`
    Poisson,
    /// `Σ n_i ln p_i`, each basis pair summing to one.
    Multinomial,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleOptions {
    pub dilution: f64,
    /// Stop once an accepted step gains less than this.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub likelihood: Likelihood,
    pub record_history: bool,
    /// Newton refinement after the RρR stage.
    pub polish: bool,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self {
            dilution: 0.5,
            tolerance: 1e-12,
            max_iterations: 100_000,
            likelihood: Likelihood::Poisson,
            record_history: false,
            polish: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MleResult {
    /// Linear `(h, v)` basis on photon B.
    pub rho: DensityMatrix,
    /// RρR iterations.
    pub iterations: usize,
    /// Accepted Newton steps.
    pub polish_steps: usize,
    pub converged: bool,
    pub log_likelihood: f64,
    /// Log-likelihood after each accepted step, starting with `I/2`.
    pub history: Vec<f64>,
}

struct Data {
    projectors: Vec<CMatrix>,
    axes: Vec<[f64; 3]>,
    counts: Vec<f64>,
    shots: f64,
}

fn prepare(counts: &[CountRecord]) -> Result<Data> {
    if counts.is_empty() {
        return Err(Error::NoCounts);
    }
    let shots = counts[0].shots;
    if counts.iter().any(|c| c.shots != shots) {
        return Err(Error::Precondition("all projectors must share the same shot count".into()));
    }
    for (i, c) in counts.iter().enumerate() {
        if !(c.count >= 0.0) || !c.count.is_finite() {
            return Err(Error::Precondition(format!("invalid count {} for {}", c.count, c.label)));
        }
        if counts[..i].iter().any(|d| d.label == c.label) {
            return Err(Error::Precondition(format!("duplicate projector {}", c.label)));
        }
    }
    if counts.len() != 6 {
        return Err(Error::Precondition(format!(
            "expected one record per MUB projector, got {}",
            counts.len()
        )));
    }
    if counts.iter().all(|c| c.count == 0.0) {
        return Err(Error::NoCounts);
    }
    Ok(Data {
        projectors: counts.iter().map(|c| c.label.projector()).collect(),
        axes: counts.iter().map(|c| c.label.bloch_axis()).collect(),
        counts: counts.iter().map(|c| c.count).collect(),
        shots: shots as f64,
    })
}

fn probabilities(data: &Data, rho: &CMatrix) -> Vec<f64> {
    data.projectors.iter().map(|p| (p * rho).trace().re).collect()
}

fn evaluate(data: &Data, rho: &CMatrix, likelihood: Likelihood) -> f64 {
    let probs = probabilities(data, rho);
    let mut ll = 0.0;
    for (n, p) in data.counts.iter().zip(&probs) {
        if *n > 0.0 {
            ll += if *p > 0.0 { n * p.ln() } else { f64::NEG_INFINITY };
        }
    }
    match likelihood {
        Likelihood::Poisson => ll - data.shots * probs.iter().sum::<f64>(),
        Likelihood::Multinomial => ll,
    }
}

/// Log-likelihood of `rho` given `counts` under the chosen model.
pub fn log_likelihood(counts: &[CountRecord], rho: &DensityMatrix, likelihood: Likelihood) -> Result<f64> {
    let data = prepare(counts)?;
    let rho = rho.in_basis(OamBasis::Linear)?;
    Ok(evaluate(&data, rho.matrix(), likelihood))
}

fn physical(m: CMatrix) -> CMatrix {
    let herm = (&m + &m.adjoint()).scale(ONE * 0.5);
    let tr = herm.trace().re;
    herm.scale(ONE / tr)
}

pub fn mle_reconstruct(counts: &[CountRecord], options: &MleOptions) -> Result<MleResult> {
    let data = prepare(counts)?;
    let total: f64 = data.counts.iter().sum();
    let freqs: Vec<f64> = data.counts.iter().map(|n| n / total).collect();
    let id = CMatrix::identity(2);

    let mut rho = id.scale(ONE * 0.5);
    let mut ll = evaluate(&data, &rho, options.likelihood);
    let mut history = Vec::new();
    if options.record_history {
        history.push(ll);
    }
    let mut eps = options.dilution;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < options.max_iterations {
        iterations += 1;
        let probs = probabilities(&data, &rho);
        let mut r = CMatrix::zeros(2);
        for ((p, f), proj) in probs.iter().zip(&freqs).zip(&data.projectors) {
            if *f > 0.0 {
                r = &r + &proj.scale(ONE * (f / p));
            }
        }
        let step = &id + &r.scale(ONE * eps);
        let candidate = physical(&(&step * &rho) * &step);
        let candidate_ll = evaluate(&data, &candidate, options.likelihood);
        if !(candidate_ll >= ll) {
            eps *= 0.5;
            if eps < 1e-12 {
                converged = true;
                break;
            }
            continue;
        }
        let gain = candidate_ll - ll;
        rho = candidate;
        ll = candidate_ll;
        if options.record_history {
            history.push(ll);
        }
        if gain < options.tolerance {
            converged = true;
            break;
        }
    }

    let mut polish_steps = 0;
    if options.polish {
        let polished = newton_polish(&data, &rho, options.likelihood);
        if polished.ll >= ll {
            rho = polished.rho;
            ll = polished.ll;
            polish_steps = polished.steps;
            converged |= polished.converged;
            if options.record_history {
                history.extend(polished.history);
            }
        }
    }

    Ok(MleResult {
        rho: DensityMatrix::new(SubsystemLabel::oam_b(OamBasis::Linear), rho)?,
        iterations,
        polish_steps,
        converged,
        log_likelihood: ll,
        history,
    })
}

fn to_bloch(rho: &CMatrix) -> [f64; 3] {
    [
        2.0 * rho[(0, 1)].re,
        -2.0 * rho[(0, 1)].im,
        (rho[(0, 0)] - rho[(1, 1)]).re,
    ]
}

fn from_bloch(r: [f64; 3]) -> CMatrix {
    use num_complex::Complex64;
    CMatrix::from_rows2([
        [Complex64::new(0.5 * (1.0 + r[2]), 0.0), Complex64::new(0.5 * r[0], -0.5 * r[1])],
        [Complex64::new(0.5 * r[0], 0.5 * r[1]), Complex64::new(0.5 * (1.0 - r[2]), 0.0)],
    ])
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn into_ball(r: [f64; 3]) -> [f64; 3] {
    let len = dot(r, r).sqrt();
    if len > 1.0 {
        r.map(|x| x / len)
    } else {
        r
    }
}

/// Solves `m x = b` for symmetric positive definite `m` by Cholesky.
fn solve_spd(m: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let mut l = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..=i {
            let s = m[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    let mut y = [0.0; 3];
    for i in 0..3 {
        y[i] = (b[i] - (0..i).map(|k| l[i][k] * y[k]).sum::<f64>()) / l[i][i];
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        x[i] = (y[i] - (i + 1..3).map(|k| l[k][i] * x[k]).sum::<f64>()) / l[i][i];
    }
    Some(x)
}

struct Polished {
    rho: CMatrix,
    ll: f64,
    steps: usize,
    converged: bool,
    history: Vec<f64>,
}

fn newton_polish(data: &Data, start: &CMatrix, likelihood: Likelihood) -> Polished {
    let mut r = into_ball(to_bloch(start));
    let mut ll = evaluate(data, &from_bloch(r), likelihood);
    let mut history = Vec::new();
    let mut converged = false;
    for _ in 0..100 {
        let mut grad = [0.0; 3];
        let mut neg_hess = [[0.0; 3]; 3];
        for (n, a) in data.counts.iter().zip(&data.axes) {
            if *n == 0.0 {
                continue;
            }
            let q = 1.0 + dot(r, *a);
            for i in 0..3 {
                grad[i] += n * a[i] / q;
                for j in 0..3 {
                    neg_hess[i][j] += n * a[i] * a[j] / (q * q);
                }
            }
        }
        let scale = neg_hess[0][0] + neg_hess[1][1] + neg_hess[2][2];
        for (i, row) in neg_hess.iter_mut().enumerate() {
            row[i] += 1e-12 * scale;
        }
        let Some(delta) = solve_spd(neg_hess, grad) else {
            break;
        };
        let mut t = 1.0;
        let mut accepted = None;
        while t > 1e-6 {
            let trial = into_ball([r[0] + t * delta[0], r[1] + t * delta[1], r[2] + t * delta[2]]);
            let trial_ll = evaluate(data, &from_bloch(trial), likelihood);
            if trial_ll >= ll {
                accepted = Some((trial, trial_ll));
                break;
            }
            t *= 0.5;
        }
        let Some((next, next_ll)) = accepted else {
            converged = true;
            break;
        };
        let moved = dot(
            [next[0] - r[0], next[1] - r[1], next[2] - r[2]],
            [next[0] - r[0], next[1] - r[1], next[2] - r[2]],
        )
        .sqrt();
        r = next;
        ll = next_ll;
        history.push(ll);
        if moved < 1e-15 {
            converged = true;
            break;
        }
    }
    Polished {
        rho: from_bloch(r),
        ll,
        steps: history.len(),
        converged,
        history,
    }
}
