//! Acceptance criteria 1–11, one line each.
//!
//! Runs without the libtest harness so every line is printed. The process
//! fails if a criterion fails that is not in `EXPECTED_FAILURES`, or if an
//! expected failure starts passing.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fkpi_core::evolution::{propagate_linear, solve, EvolutionConfig, Scheme};
use fkpi_core::norms::{energy_alpha, mass, sobolev_aniso, AnisoIndex, MixedNormSpec};
use fkpi_core::probes::{
    bilinear_sweep, expected_sign, illposedness_growth_study, linear_strichartz_sweep, lowfreq_sweep, lw_sweep,
    nonresonant_sweep, scaling_exponent_fit, trilinear_integral, trilinear_integral_direct, Criterion, ExperimentRecord,
    Lattice3, LatticeFunction, SweepSummary,
};
use fkpi_core::spectral::{FrequencyGrid, SpectralField};
use fkpi_core::symbols::{
    grad_omega, normal_determinant_closed, normal_determinant_numeric, omega, resonance_difference,
    resonance_fraction, resonance_size_scan, DispersionParams, FreqPair, FreqPoint, IllposedBoxes,
};

/// Criterion 4 asks both size-law ratios to stay in [1/8, 8]. `|Ω|` is a
/// difference of two terms of the same size that changes sign inside the
/// sampled boxes, so its ratio has no positive lower bound.
const EXPECTED_FAILURES: &[u32] = &[4];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn params(a: f64) -> DispersionParams {
    DispersionParams::new(a).unwrap()
}

fn random_pair(rng: &mut ChaCha8Rng) -> FreqPair {
    loop {
        let mut xi = || {
            let m: f64 = rng.gen_range(0.05..10.0);
            if rng.gen() {
                m
            } else {
                -m
            }
        };
        let (x1, x2) = (xi(), xi());
        let (e1, e2) = (rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
        if (x1 + x2).abs() >= 0.05 {
            return FreqPair::from_coords(x1, e1, x2, e2).unwrap();
        }
    }
}

/// Relative to the largest of `ω(p₁)`, `ω(p₂)`, `ω(p₁+p₂)`.
fn identity_error(p: &DispersionParams, q: FreqPair) -> f64 {
    let scale = [omega(p, q.p1), omega(p, q.p2), omega(p, q.sum())].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    (resonance_fraction(p, q) - resonance_difference(p, q)).abs() / scale
}

fn c1_symbol_identity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for k in 0..100_000 {
        let p = params(2.0 + 1.99 * (k as f64 / 100_000.0));
        worst = worst.max(identity_error(&p, random_pair(&mut rng)));
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(worst <= 1e-10 && secs < 5.0, format!("max relative gap {worst:.2e} over 1e5 pairs, {secs:.2}s"))
}

fn c2_determinant() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for k in 0..100_000 {
        let p = params(2.0 + 1.99 * (k as f64 / 100_000.0));
        let q = random_pair(&mut rng);
        let (n1, n2, n3) = (grad_omega(&p, q.p1), grad_omega(&p, q.p2), grad_omega(&p, q.sum()));
        // Size of the largest 2×2 minor entering the expansion.
        let scale = [n1, n2, n3].iter().flat_map(|a| [n1, n2, n3].map(|b| (a.0 * b.1).abs())).fold(1.0f64, f64::max);
        let e = (normal_determinant_numeric(&p, q) - normal_determinant_closed(&p, q)).abs() / scale;
        worst = worst.max(e);
    }
    let hand = FreqPair::from_coords(1.0, 1.0, 1.0, -1.0).unwrap();
    let (hn, hc) = (normal_determinant_numeric(&params(2.0), hand), normal_determinant_closed(&params(2.0), hand));
    let ok = worst <= 1e-10 && (hn - 40.0).abs() < 1e-12 && (hc - 40.0).abs() < 1e-12;
    outcome(ok, format!("max relative gap {worst:.2e}; hand case numeric {hn}, closed {hc}"))
}

fn c3_gradient() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for k in 0..10_000 {
        let p = params(2.0 + 1.99 * (k as f64 / 10_000.0));
        let xi: f64 = rng.gen_range(0.2..5.0) * if rng.gen() { 1.0 } else { -1.0 };
        let eta: f64 = rng.gen_range(-5.0..5.0);
        let (hx, hy) = (1e-5 * xi.abs(), 1e-5 * eta.abs().max(1.0));
        let w = |x: f64, y: f64| omega(&p, FreqPoint::new(x, y).unwrap());
        let fd = ((w(xi + hx, eta) - w(xi - hx, eta)) / (2.0 * hx), (w(xi, eta + hy) - w(xi, eta - hy)) / (2.0 * hy));
        let g = grad_omega(&p, FreqPoint::new(xi, eta).unwrap());
        worst = worst.max((g.0 - fd.0).hypot(g.1 - fd.1) / g.0.hypot(g.1));
    }
    outcome(worst <= 1e-6, format!("max relative gap {worst:.2e} over 1e4 points"))
}

fn c4_size_law() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for a in [2.2, 2.5] {
        let p = params(a);
        let (mut r1, mut r2) = ((f64::INFINITY, 0.0f64), (f64::INFINITY, 0.0f64));
        for k in 4..=10 {
            let n = 2f64.powi(k);
            let s = resonance_size_scan(&p, n, IllposedBoxes::gamma_for(a, n, 0.05), 10_000, k as u64).unwrap();
            ok &= s.omega1_ratio.within(0.125, 8.0) && s.omega_ratio.within(0.125, 8.0);
            r1 = (r1.0.min(s.omega1_ratio.min), r1.1.max(s.omega1_ratio.max));
            r2 = (r2.0.min(s.omega_ratio.min), r2.1.max(s.omega_ratio.max));
        }
        parts.push(format!("α={a}: |Ω¹| ratio [{:.3}, {:.3}], |Ω| ratio [{:.2e}, {:.3}]", r1.0, r1.1, r2.0, r2.1));
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(ok && secs < 30.0, format!("{}; {secs:.1}s", parts.join("; ")))
}

fn dipole(grid: FrequencyGrid, width: f64, l2: f64) -> SpectralField {
    let w2 = width * width;
    let f = SpectralField::from_fn(grid, true, |xi, eta| Complex64::new(0.0, xi * (-0.5 * w2 * (xi * xi + eta * eta)).exp()));
    let n = f.l2_norm();
    f.scale(l2 / n)
}

fn c5_conservation() -> Outcome {
    let start = Instant::now();
    let p = params(3.0);
    let grid = FrequencyGrid::new(2.0 * PI * 16.0, 2.0 * PI * 16.0, 256, 256).unwrap();
    let u0 = dipole(grid, 2.0, 0.1);
    let cfg = EvolutionConfig { dt: 1e-3, t_final: 1.0, scheme: Scheme::Etdrk4, snapshot_stride: 100, ..Default::default() };
    let traj = solve(&p, &u0, &cfg).unwrap();
    let (m0, e0) = (mass(&u0), energy_alpha(&p, &u0).unwrap());
    let mut dm = 0.0f64;
    let mut de = 0.0f64;
    for f in &traj.fields {
        dm = dm.max((mass(f) - m0).abs() / m0);
        de = de.max((energy_alpha(&p, f).unwrap() - e0).abs() / e0.abs());
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(dm <= 1e-6 && de <= 1e-4, format!("mass drift {dm:.2e}, energy drift {de:.2e}, {secs:.1}s"))
}

fn c6_propagator() -> Outcome {
    let p = params(3.0);
    let grid = FrequencyGrid::new(2.0 * PI * 8.0, 2.0 * PI * 8.0, 128, 128).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let coeffs = (0..grid.len())
        .map(|idx| {
            let (ix, iy) = grid.split(idx);
            let (xi, eta) = (grid.xi(ix), grid.eta(iy));
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * (-(xi * xi + eta * eta) / 8.0).exp()
        })
        .collect();
    let f = SpectralField::from_coeffs(grid, coeffs, true).unwrap().without_x_mean();
    let mut iso = 0.0f64;
    for idx in [AnisoIndex::L2, AnisoIndex::new(1.0, 0.5), AnisoIndex::new(-0.5, 2.0)] {
        let n0 = sobolev_aniso(&f, idx, false).unwrap();
        for t in [0.37, -1.3, 5.0] {
            let n1 = sobolev_aniso(&propagate_linear(&p, &f, t).unwrap(), idx, false).unwrap();
            iso = iso.max((n1 - n0).abs() / n0);
        }
    }
    let mut group = 0.0f64;
    for (t, s) in [(0.3, 0.45), (-0.7, 1.1), (2.0, -2.0)] {
        let a = propagate_linear(&p, &propagate_linear(&p, &f, s).unwrap(), t).unwrap();
        let b = propagate_linear(&p, &f, t + s).unwrap();
        group = group.max(a.max_abs_diff(&b) / f.max_abs());
    }
    outcome(iso <= 1e-12 && group <= 1e-12, format!("isometry gap {iso:.2e}, group-law gap {group:.2e}"))
}

fn c7_scaling() -> Outcome {
    let p = params(3.0);
    let lambdas: Vec<f64> = (0..5).map(|k| 2f64.powf(k as f64 / 4.0)).collect();
    let mut ok = true;
    let mut parts = Vec::new();
    for idx in [AnisoIndex::new(0.0, 0.0), AnisoIndex::new(1.0, 0.0)] {
        let f = scaling_exponent_fit(&p, idx, &lambdas).unwrap();
        ok &= (f.slope - f.predicted).abs() <= 0.02;
        parts.push(format!("(s₁,s₂)=({},{}): slope {:.4} vs {:.4}", idx.s1, idx.s2, f.slope, f.predicted));
    }
    outcome(ok, parts.join("; "))
}

fn c8_illposedness() -> Outcome {
    let start = Instant::now();
    let ns: Vec<f64> = (8..=13).map(|k| 2f64.powi(k)).collect();
    let mut ok = true;
    let mut parts = Vec::new();
    for a in [2.0, 2.2, 2.6] {
        let s = illposedness_growth_study(&params(a), 0.05, &ns, (0.0, 0.0), 1.0, 24).unwrap();
        let target = (s.summary.slope - s.predicted).abs() <= 0.1;
        let sign = match expected_sign(a, 0.05) {
            Some(true) => s.summary.slope > 0.0,
            Some(false) => s.summary.slope < 0.0,
            None => true,
        };
        // α = 2.6 is checked for sign only.
        ok &= sign && s.max_rel_change < 0.01 && (a == 2.6 || target);
        parts.push(format!(
            "α={a}: slope {:.3} vs {:.3}, quad change {:.1e}",
            s.summary.slope, s.predicted, s.max_rel_change
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(ok && secs < 600.0, format!("{}; {secs:.0}s", parts.join("; ")))
}

fn trend(name: &str, variable: &str, records: &[ExperimentRecord], bound: f64) -> (bool, String) {
    let s = SweepSummary::fit(name, 3.0, variable, records, Criterion::UpperBound { bound });
    let control = s.with_comparator_shift(0.25);
    let ok = s.pass && s.xs.len() >= 4 && !control.pass;
    (ok, format!("{name} slope {:.3} (control {:.3})", s.slope, control.slope))
}

fn c9_strichartz() -> Outcome {
    let p = params(3.0);
    let ns = [8.0, 16.0, 32.0, 64.0];
    let spec = MixedNormSpec::new(4.0, 4.0).unwrap();
    let runs = [
        trend("linear", "N", &linear_strichartz_sweep(&p, spec, &ns, 64).unwrap(), 0.1),
        trend("lowfreq", "N", &lowfreq_sweep(&p, &ns, 64).unwrap(), 0.1),
        trend("bilinear", "N1", &bilinear_sweep(&p, &ns, 2.0, 2, 9).unwrap(), 0.1),
        trend("lw", "N1", &lw_sweep(&p, &ns, 2.0, [1.0; 3], 4, 9).unwrap(), 0.2),
        trend("nonresonant", "N2", &nonresonant_sweep(&p, 1.0, &ns, 16.0, 4, 9).unwrap(), 0.2),
    ];
    let ok = runs.iter().all(|r| r.0);
    outcome(ok, runs.iter().map(|r| r.1.clone()).collect::<Vec<_>>().join("; "))
}

fn random_lattice_function(rng: &mut ChaCha8Rng, lattice: Lattice3) -> LatticeFunction {
    let dims = [rng.gen_range(1..=16), rng.gen_range(1..=16), rng.gen_range(1..=16)];
    let origin = [rng.gen_range(-8..8), rng.gen_range(-8..8), rng.gen_range(-8..8)];
    let mut f = LatticeFunction::zeros(lattice, origin, dims);
    for v in f.values.iter_mut() {
        *v = if rng.gen_bool(0.2) { 0.0 } else { rng.gen() };
    }
    f
}

fn c10_trilinear_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let lattice = Lattice3 {
            basis: [
                [rng.gen_range(0.1..2.0), 0.0, 0.0],
                [rng.gen_range(-3.0..3.0), rng.gen_range(0.1..2.0), 0.0],
                [rng.gen_range(-3.0..3.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.1..2.0)],
            ],
        };
        let f = [0, 1, 2].map(|_| random_lattice_function(&mut rng, lattice));
        let fast = trilinear_integral(&f[0], &f[1], &f[2]).unwrap();
        let slow = trilinear_integral_direct(&f[0], &f[1], &f[2]).unwrap();
        let scale: f64 = f[0].values.iter().sum::<f64>() * f[1].values.iter().sum::<f64>();
        worst = worst.max((fast - slow).abs() / slow.max(1e-300 + 1e-10 * scale));
    }
    outcome(worst <= 1e-10, format!("max relative gap {worst:.2e} over 100 lattices"))
}

fn cli_records(dir: &Path, args: &[&str]) -> Vec<u8> {
    let status = Command::new(env!("CARGO_BIN_EXE_fkpi-lab"))
        .args(args)
        .arg("--output-dir")
        .arg(dir)
        .status()
        .expect("binary runs");
    assert!(status.code().is_some_and(|c| c == 0 || c == 2), "{args:?}: {status}");
    std::fs::read(dir.join("records.csv")).expect("records written")
}

fn c11_determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 4] = [
        &["resonance-scan", "--set", "alpha=2.5", "--set", "resonance.samples=5000", "--seed", "4"],
        &["transversality", "--set", "alpha=3", "--set", "transversality.samples=500"],
        &["trilinear", "--set", "alpha=3", "--set", "probe.dyadic_range=[8,16,32,64]", "--set", "probe.tolerance_band=[-10,0.2]"],
        &[
            "conserve",
            "--set",
            "alpha=3",
            "--set",
            r#"evolution={"dt":0.01,"T":0.2,"scheme":"etdrk4"}"#,
            "--set",
            r#"grid={"length_x":50.26548245743669,"length_y":50.26548245743669,"modes_x":64,"modes_y":64}"#,
        ],
    ];
    let mut same = true;
    for (k, args) in runs.iter().enumerate() {
        let a = cli_records(&tmp.path().join(format!("{k}a")), args);
        let b = cli_records(&tmp.path().join(format!("{k}b")), args);
        same &= !a.is_empty() && a == b;
    }
    outcome(same, format!("{} CLI commands rerun with identical config and seed", runs.len()))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 11] = [
        (1, "symbol identity", c1_symbol_identity),
        (2, "normal determinant", c2_determinant),
        (3, "gradient", c3_gradient),
        (4, "resonance size law", c4_size_law),
        (5, "conservation", c5_conservation),
        (6, "linear propagator", c6_propagator),
        (7, "scaling exponent", c7_scaling),
        (8, "ill-posedness exponent", c8_illposedness),
        (9, "Strichartz trend suite", c9_strichartz),
        (10, "trilinear oracle", c10_trilinear_oracle),
        (11, "determinism", c11_determinism),
    ];
    let filter: Vec<u32> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect())
        .unwrap_or_default();
    let mut unexpected = Vec::new();
    for (n, name, f) in criteria {
        if !filter.is_empty() && !filter.contains(&n) {
            continue;
        }
        let o = f();
        let expected_fail = EXPECTED_FAILURES.contains(&n);
        let tag = match (o.pass, expected_fail) {
            (true, false) => "PASS",
            (false, true) => "FAIL (expected)",
            (false, false) => "FAIL",
            (true, true) => "PASS (unexpected)",
        };
        println!("criterion {n:>2} {name}: {tag} | {}", o.detail);
        if o.pass == expected_fail {
            unexpected.push(n);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
