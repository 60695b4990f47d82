//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::{FRAC_PI_4, PI, TAU};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::Rng;

use hybrid_teleport::hilbert::{DensityMatrix, Ket, OamBasis, OamOrder, SubsystemLabel};
use hybrid_teleport::optics::{intensity_image, sector_hologram, write_pgm, GridSpec, HologramSpec, HologramTarget, Image};
use hybrid_teleport::protocol::{
    bell_measurement, prepare_input, spdc_state, teleport, BellLabel, InputPolarization, MeasurementMode,
    NamedPolarization,
};
use hybrid_teleport::rng::seeded;
use hybrid_teleport::tomography::{
    fidelity, mle_reconstruct, mub_inputs, simulate_counts, tomography_report, MleOptions, NoiseModel,
    ReportConfig,
};

const GOLDEN: &[u8] = include_bytes!("golden/holo_ell2_pitch16_sector_v_256.pgm");

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn order(n: i64) -> OamOrder {
    OamOrder::new(n).unwrap()
}

fn random_inputs(count: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = seeded(seed);
    (0..count)
        .map(|_| (rng.random_range(0.0..=PI), rng.random_range(0.0..TAU)))
        .collect()
}

fn elapsed_ok(t: Duration, limit: f64) -> bool {
    t.as_secs_f64() < limit
}

/// Corrected B state against `sin(γ/2)|h⟩ + cos(γ/2)e^{iδ}|v⟩`, every outcome forced.
fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for (gamma, delta) in random_inputs(200, 1) {
        let pol = InputPolarization::new(gamma, delta).unwrap();
        let target = [
            Complex64::new((gamma / 2.0).sin(), 0.0),
            Complex64::from_polar((gamma / 2.0).cos(), delta),
        ];
        for ell in 1..=3 {
            for label in BellLabel::ALL {
                let out = teleport(&pol, order(ell), Some(label), None).unwrap();
                let b = out.b_state.with_oam_basis(OamBasis::Linear).unwrap();
                let a = b.amplitudes();
                let overlap = (target[0].conj() * a[0] + target[1].conj() * a[1]).norm_sqr();
                worst = worst.max(1.0 - overlap);
            }
        }
    }
    let t = start.elapsed();
    outcome(
        worst <= 1e-12 && elapsed_ok(t, 1.0),
        format!("worst 1-overlap {worst:.1e}, {:.3} s", t.as_secs_f64()),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for (gamma, delta) in random_inputs(200, 2) {
        let pol = InputPolarization::new(gamma, delta).unwrap();
        for ell in 1..=3 {
            let chi = prepare_input(&spdc_state(order(ell)), &pol).unwrap();
            for mode in [MeasurementMode::Direct, MeasurementMode::Physical] {
                for o in bell_measurement(&chi, mode).unwrap() {
                    worst = worst.max((o.probability - 0.25).abs());
                }
            }
        }
    }
    let t = start.elapsed();
    outcome(
        worst <= 1e-12 && elapsed_ok(t, 1.0),
        format!("worst |p-1/4| {worst:.1e}, {:.3} s", t.as_secs_f64()),
    )
}

/// Arbitrary three-qubit states, half written in the circular OAM basis.
fn criterion_3() -> Outcome {
    let mut rng = seeded(3);
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let basis = if k % 2 == 0 { OamBasis::Linear } else { OamBasis::Circular };
        let amps: Vec<Complex64> = (0..8)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let psi = Ket::normalized(
            vec![SubsystemLabel::pol_a(), SubsystemLabel::oam_a(basis), SubsystemLabel::oam_b(basis)],
            amps,
            order(1 + (k % 4) as i64),
        )
        .unwrap();
        let direct = bell_measurement(&psi, MeasurementMode::Direct).unwrap();
        let physical = bell_measurement(&psi, MeasurementMode::Physical).unwrap();
        for (d, p) in direct.iter().zip(&physical) {
            worst = worst.max((d.probability - p.probability).abs());
        }
    }
    outcome(worst <= 1e-10, format!("worst probability gap {worst:.1e} over 100 states"))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let inputs = mub_inputs();
    let mut config = ReportConfig {
        order: order(2),
        shots: 10_000,
        trials: 1,
        seed: 1,
        noise: NoiseModel::Noiseless,
        mle: MleOptions::default(),
    };
    let exact = tomography_report(&inputs, &config).unwrap();
    let exact_worst = exact.iter().map(|r| (1.0 - r.fidelity_mean).abs()).fold(0.0, f64::max);

    config.noise = NoiseModel::Poisson;
    config.trials = 100;
    let noisy = tomography_report(&inputs, &config).unwrap();
    let row_min = noisy.iter().map(|r| r.fidelity_mean).fold(f64::INFINITY, f64::min);
    let grand = noisy.iter().map(|r| r.fidelity_mean).sum::<f64>() / noisy.len() as f64;
    let t = start.elapsed();
    outcome(
        exact_worst <= 1e-6 && row_min >= 0.984 && grand >= 0.99 && elapsed_ok(t, 60.0),
        format!(
            "noiseless worst |1-F| {exact_worst:.1e}; N=1e4 x100: min row F {row_min:.6}, grand mean {grand:.6}; {:.2} s",
            t.as_secs_f64()
        ),
    )
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut c, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        c += (x - ma) * (y - mb);
        va += (x - ma).powi(2);
        vb += (y - mb).powi(2);
    }
    c / (va * vb).sqrt()
}

/// Pixel centre with `y` up, origin at the grid centre.
fn xy(grid: &GridSpec, col: usize, row: usize) -> (f64, f64) {
    let p = 2.0 * grid.extent * grid.waist / grid.width as f64;
    (
        (col as f64 + 0.5 - grid.width as f64 / 2.0) * p,
        (grid.height as f64 / 2.0 - row as f64 - 0.5) * p,
    )
}

fn lobes_at_peak(image: &Image) -> usize {
    let grid = image.grid;
    let radius = 1.0; // w·√(ℓ/2) for ℓ = 2
    let p = 2.0 * grid.extent * grid.waist / grid.width as f64;
    let samples: Vec<f64> = (0..720)
        .map(|k| {
            let phi = TAU * k as f64 / 720.0;
            let col = (radius * phi.cos() / p + grid.width as f64 / 2.0 - 0.5).round() as usize;
            let row = (grid.height as f64 / 2.0 - 0.5 - radius * phi.sin() / p).round() as usize;
            image.values[row * grid.width + col]
        })
        .collect();
    let max = samples.iter().copied().fold(0.0, f64::max);
    let above: Vec<bool> = samples.iter().map(|v| *v >= 0.5 * max).collect();
    if above.iter().all(|a| *a) {
        return 0;
    }
    (0..above.len()).filter(|&i| above[i] && !above[(i + above.len() - 1) % above.len()]).count()
}

fn criterion_5() -> Outcome {
    let grid = GridSpec::default();
    let panels: [(NamedPolarization, fn(f64) -> f64, usize); 5] = [
        (NamedPolarization::L, |_| 1.0, 0),
        (NamedPolarization::H, |p| (2.0 * p).cos().powi(2), 4),
        (NamedPolarization::A, |p| (2.0 * p + FRAC_PI_4).cos().powi(2), 4),
        (NamedPolarization::V, |p| (2.0 * p).sin().powi(2), 4),
        (NamedPolarization::D, |p| (2.0 * p - FRAC_PI_4).cos().powi(2), 4),
    ];
    let mut pass = true;
    let mut notes = Vec::new();
    for (named, angular, lobes) in panels {
        let out = teleport(&InputPolarization::named(named), order(2), Some(BellLabel::PhiPlus), None).unwrap();
        let image = intensity_image(&out.b_state, &grid).unwrap();
        let mut analytic = Vec::with_capacity(grid.len());
        for row in 0..grid.height {
            for col in 0..grid.width {
                let (x, y) = xy(&grid, col, row);
                let r2 = x * x + y * y;
                analytic.push(r2 * r2 * (-2.0 * r2).exp() * angular(y.atan2(x)));
            }
        }
        let ncc = pearson(&image.values, &analytic);
        let counted = lobes_at_peak(&image);
        pass &= ncc >= 0.999 && counted == lobes;
        notes.push(format!("{named}: ncc {ncc:.6} lobes {counted}"));
    }
    outcome(pass, notes.join("; "))
}

fn criterion_6() -> Outcome {
    let mut rng = seeded(6);
    let mut worst_herm: f64 = 0.0;
    let mut worst_trace: f64 = 0.0;
    let mut min_eig = f64::INFINITY;
    let mut monotone = true;
    let options = MleOptions {
        record_history: true,
        ..MleOptions::default()
    };
    let mut runs = 0;
    while runs < 1000 {
        let r: f64 = rng.random_range(0.0f64..1.0).cbrt();
        let cos_t: f64 = rng.random_range(-1.0..1.0);
        let phi: f64 = rng.random_range(0.0..TAU);
        let sin_t = (1.0 - cos_t * cos_t).sqrt();
        let truth = bloch_density([r * sin_t * phi.cos(), r * sin_t * phi.sin(), r * cos_t]);
        let shots = rng.random_range(10..=10_000);
        let counts = simulate_counts(&truth, shots, rng.random(), NoiseModel::Poisson).unwrap();
        if counts.iter().all(|c| c.count == 0.0) {
            continue;
        }
        runs += 1;
        let fit = mle_reconstruct(&counts, &options).unwrap();
        let m = fit.rho.matrix();
        worst_herm = worst_herm.max(m.hermiticity_defect());
        worst_trace = worst_trace.max((m.trace().re - 1.0).abs());
        min_eig = min_eig.min(fit.rho.eigen().values[0]);
        monotone &= fit.history.windows(2).all(|w| w[1] >= w[0]);
    }

    let mut worst_td: f64 = 0.0;
    for _ in 0..100 {
        let theta: f64 = rng.random_range(0.0..PI);
        let phi: f64 = rng.random_range(0.0..TAU);
        let ket = Ket::qubit(
            SubsystemLabel::oam_b(OamBasis::Linear),
            Complex64::new((theta / 2.0).cos(), 0.0),
            Complex64::from_polar((theta / 2.0).sin(), phi),
            order(2),
        )
        .unwrap();
        let truth = DensityMatrix::from_ket(&ket).unwrap();
        let counts = simulate_counts(&truth, 10_000, 0, NoiseModel::Noiseless).unwrap();
        let fit = mle_reconstruct(&counts, &MleOptions::default()).unwrap();
        worst_td = worst_td.max(fit.rho.trace_distance(&truth).unwrap());
    }
    outcome(
        worst_herm <= 1e-12 && worst_trace <= 1e-12 && min_eig >= -1e-10 && monotone && worst_td <= 1e-6,
        format!(
            "1000 fits: herm {worst_herm:.1e}, |tr-1| {worst_trace:.1e}, min eig {min_eig:.1e}, monotone {monotone}; noiseless worst TD {worst_td:.1e}"
        ),
    )
}

fn bloch_density(r: [f64; 3]) -> DensityMatrix {
    use hybrid_teleport::linalg::CMatrix;
    let m = CMatrix::from_rows2([
        [Complex64::new(0.5 * (1.0 + r[2]), 0.0), Complex64::new(0.5 * r[0], -0.5 * r[1])],
        [Complex64::new(0.5 * r[0], 0.5 * r[1]), Complex64::new(0.5 * (1.0 - r[2]), 0.0)],
    ]);
    DensityMatrix::new(SubsystemLabel::oam_b(OamBasis::Linear), m).unwrap()
}

fn criterion_7() -> Outcome {
    let label = SubsystemLabel::oam_b(OamBasis::Linear);
    let h = DensityMatrix::from_ket(&Ket::basis_state(label, 0, order(1))).unwrap();
    let v = DensityMatrix::from_ket(&Ket::basis_state(label, 1, order(1))).unwrap();
    let mixed = DensityMatrix::maximally_mixed(label);
    let rho = bloch_density([0.2, -0.4, 0.3]);
    let errs = [
        (fidelity(&rho, &rho).unwrap() - 1.0).abs(),
        (fidelity(&h, &h).unwrap() - 1.0).abs(),
        fidelity(&h, &v).unwrap().abs(),
        (fidelity(&h, &mixed).unwrap() - 0.5).abs(),
    ];
    let worst = errs.iter().copied().fold(0.0, f64::max);
    outcome(worst <= 1e-10, format!("worst deviation {worst:.1e}"))
}

fn criterion_8() -> Outcome {
    let grid = GridSpec::default();
    let spec = HologramSpec::new(order(2), 16.0, HologramTarget::SectorV).unwrap();
    let render = || {
        let mut buf = Vec::new();
        write_pgm(&sector_hologram(&spec, &grid), &mut buf).unwrap();
        buf
    };
    let (a, b) = (render(), render());

    // spot-check pixels away from sector edges against the printed formula
    let image = sector_hologram(&spec, &grid);
    let mut spot = true;
    for (col, row) in [(200, 40), (40, 40), (40, 200), (200, 200), (131, 17)] {
        let (x, y) = xy(&grid, col, row);
        let sign = if (2.0 * y.atan2(x)).sin() >= 0.0 { 1.0 } else { -1.0 };
        let expected = (sign + TAU * col as f64 / 16.0).rem_euclid(TAU);
        spot &= (image.values[row * grid.width + col] - expected).abs() < 1e-12;
    }
    outcome(
        a == b && a == GOLDEN && spot,
        format!("{} bytes, matches golden {}, reproducible {}, formula spot-check {spot}", a.len(), a == GOLDEN, a == b),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("end-to-end teleportation identity", criterion_1),
        ("uniform Bell statistics", criterion_2),
        ("physical vs direct measurement chain", criterion_3),
        ("fidelity table at desk scale", criterion_4),
        ("rendered panels vs closed forms", criterion_5),
        ("MLE validity suite", criterion_6),
        ("fidelity unit identities", criterion_7),
        ("hologram bit-exactness", criterion_8),
    ];
    let mut passed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let result = run();
        let tag = if result.pass { "PASS" } else { "FAIL" };
        println!("{tag} [{}] {name}: {}", k + 1, result.detail);
        passed += result.pass as usize;
    }
    println!("acceptance: {passed}/{} criteria passed", criteria.len());
    if passed == criteria.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
