use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fkpi_core::evolution::{
    nonlinearity, picard_iterate, propagate_linear, solve, step, EvolutionConfig, Scheme, Trajectory,
};
use fkpi_core::norms::{
    energy_space_norm, lebesgue_norm, mass, mass_spectral, quadratic_energy, sobolev_aniso, spacetime_norm, AnisoIndex, MixedNormSpec,
};
use fkpi_core::probes::{
    bilinear_l2, linear_strichartz_ratio, lowfreq_data, lowfreq_l4_ratio, lw_ratio, lw_ratio_at, nonresonant_ratio,
    scaled_band_data, trilinear_integral, trilinear_integral_direct, Lattice3, LatticeFunction, Status,
};
use fkpi_core::spectral::{
    dyadic_bands, io, product, project_dyadic, to_physical, to_spectral, x_antiderivative, x_derivative,
    FrequencyGrid, SpectralField,
};
use fkpi_core::symbols::{
    normal_determinant_closed, normal_determinant_numeric, omega, omega1_part, omega1_stable, resonance_difference,
    resonance_fraction, DispersionParams, FreqPair, FreqPoint,
};

fn params(a: f64) -> DispersionParams {
    DispersionParams::new(a).unwrap()
}

fn grid16() -> FrequencyGrid {
    FrequencyGrid::new(2.0 * PI * 2.0, 2.0 * PI * 3.0, 16, 16).unwrap()
}

/// Smooth random real field with zero x-mean.
fn random_field(grid: FrequencyGrid, seed: u64, amp: f64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = (0..grid.len())
        .map(|idx| {
            let (ix, iy) = grid.split(idx);
            let decay = (-0.3 * (grid.kx(ix).pow(2) + grid.ky(iy).pow(2)) as f64).exp();
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * (amp * decay)
        })
        .collect();
    SpectralField::from_coeffs(grid, coeffs, true).unwrap().without_x_mean()
}

fn xi_strategy() -> impl Strategy<Value = f64> {
    (0.05f64..20.0, any::<bool>()).prop_map(|(m, s)| if s { m } else { -m })
}

fn pair_strategy() -> impl Strategy<Value = FreqPair> {
    (xi_strategy(), -20.0f64..20.0, xi_strategy(), -20.0f64..20.0)
        .prop_filter("nonzero output frequency", |(a, _, b, _)| (a + b).abs() > 0.05)
        .prop_map(|(a, e, b, f)| FreqPair::from_coords(a, e, b, f).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn omega_is_odd(alpha in 2.0f64..3.99, xi in xi_strategy(), eta in -20.0f64..20.0) {
        let p = params(alpha);
        let a = omega(&p, FreqPoint::new(xi, eta).unwrap());
        let b = omega(&p, FreqPoint::new(-xi, -eta).unwrap());
        prop_assert!((a + b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn resonance_forms_agree_and_are_symmetric(alpha in 2.0f64..3.99, q in pair_strategy()) {
        let p = params(alpha);
        let scale = [q.p1, q.p2, q.sum()].iter().map(|x| omega(&p, *x).abs()).fold(0.0, f64::max);
        let f = resonance_fraction(&p, q);
        prop_assert!((f - resonance_difference(&p, q)).abs() <= 1e-10 * scale);
        prop_assert!((f - resonance_fraction(&p, q.swapped())).abs() <= 1e-12 * f.abs().max(scale * 1e-3));
    }

    #[test]
    fn stable_omega1_matches_direct(alpha in 2.0f64..3.99, a in xi_strategy(), b in xi_strategy()) {
        prop_assume!((a + b).abs() > 0.05);
        let p = params(alpha);
        let q = FreqPair::from_coords(a, 0.0, b, 0.0).unwrap();
        let direct = omega1_part(&p, q);
        let scale = (a.abs() + b.abs()).powf(alpha + 1.0);
        prop_assert!((omega1_stable(alpha, a, b) - direct).abs() <= 1e-12 * scale);
    }

    #[test]
    fn determinant_closed_form(alpha in 2.0f64..3.99, q in pair_strategy()) {
        let p = params(alpha);
        let (n, c) = (normal_determinant_numeric(&p, q), normal_determinant_closed(&p, q));
        let scale = [q.p1, q.p2, q.sum()].iter().map(|x| omega(&p, *x).abs() / x.xi.abs()).fold(1.0, f64::max);
        prop_assert!((n - c).abs() <= 1e-10 * scale * scale);
    }

    #[test]
    fn physical_round_trip_and_plancherel(seed in any::<u64>()) {
        let u = random_field(grid16(), seed, 1.0);
        let back = to_spectral(&to_physical(&u), u.grid()).unwrap();
        prop_assert!(back.max_abs_diff(&u) <= 1e-13);
        prop_assert!(back.is_real() && back.is_hermitian());
        let (m1, m2) = (mass(&u), mass_spectral(&u));
        prop_assert!((m1 - m2).abs() <= 1e-12 * m2);
    }

    #[test]
    fn antiderivative_inverts_derivative(seed in any::<u64>()) {
        let u = random_field(grid16(), seed, 1.0);
        let v = x_antiderivative(&x_derivative(&u)).unwrap();
        prop_assert!(v.max_abs_diff(&u) <= 1e-13);
    }

    #[test]
    fn real_products_stay_hermitian(s1 in any::<u64>(), s2 in any::<u64>(), dealias in any::<bool>()) {
        let g = grid16();
        let w = product(&random_field(g, s1, 1.0), &random_field(g, s2, 1.0), dealias).unwrap();
        prop_assert!(w.is_real() && w.is_hermitian());
        prop_assert!(nonlinearity(&random_field(g, s1, 1.0)).unwrap().has_zero_x_mean());
    }

    #[test]
    fn dyadic_pieces_sum_to_field(seed in any::<u64>()) {
        let g = FrequencyGrid::new(2.0 * PI / 4.0, 2.0 * PI, 64, 16).unwrap();
        let u = random_field(g, seed, 1.0);
        let mut acc = SpectralField::zeros(g, true);
        for b in dyadic_bands(&g) {
            acc = acc.add(&project_dyadic(&u, b)).unwrap();
        }
        prop_assert!(acc.max_abs_diff(&u) <= 1e-15);
    }

    #[test]
    fn field_files_round_trip(seed in any::<u64>()) {
        let u = random_field(grid16(), seed, 1.0);
        let mut buf = Vec::new();
        io::write_field(&mut buf, &u).unwrap();
        let v = io::read_field(&mut buf.as_slice()).unwrap();
        prop_assert_eq!(v, u);
    }

    #[test]
    fn propagator_isometry_and_group_law(
        alpha in 2.0f64..3.99, seed in any::<u64>(), t in -3.0f64..3.0, s in -3.0f64..3.0,
        s1 in -1.0f64..2.0, s2 in -1.0f64..2.0,
    ) {
        let p = params(alpha);
        let u = random_field(grid16(), seed, 1.0);
        let idx = AnisoIndex::new(s1, s2);
        let n0 = sobolev_aniso(&u, idx, false).unwrap();
        let ut = propagate_linear(&p, &u, t).unwrap();
        prop_assert!((sobolev_aniso(&ut, idx, false).unwrap() - n0).abs() <= 1e-12 * n0);
        let uts = propagate_linear(&p, &ut, s).unwrap();
        prop_assert!(uts.max_abs_diff(&propagate_linear(&p, &u, t + s).unwrap()) <= 1e-12 * u.max_abs());
        prop_assert!(ut.is_real() && ut.has_zero_x_mean());
    }

    #[test]
    fn norms_are_homogeneous(seed in any::<u64>(), c in 0.01f64..100.0, r in 2.0f64..8.0) {
        let u = random_field(grid16(), seed, 1.0);
        let cu = u.scale(c);
        let rel = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs();
        prop_assert!(rel(lebesgue_norm(&cu, r), c * lebesgue_norm(&u, r)));
        prop_assert!(rel(sobolev_aniso(&cu, AnisoIndex::new(1.0, -0.5), false).unwrap(),
                         c * sobolev_aniso(&u, AnisoIndex::new(1.0, -0.5), false).unwrap()));
    }

    #[test]
    fn energy_space_norm_is_equivalent_to_energy(alpha in 2.0f64..3.99, seed in any::<u64>()) {
        let p = params(alpha);
        let u = random_field(grid16(), seed, 1.0);
        let e = energy_space_norm(&p, &u).unwrap();
        let oracle = (mass_spectral(&u) + 2.0 * quadratic_energy(&p, &u).unwrap()).sqrt();
        prop_assert!(e >= mass_spectral(&u).sqrt() * (1.0 - 1e-12));
        prop_assert!(e >= oracle / 3.0 && e <= 3.0 * oracle, "{} vs {}", e, oracle);
    }

    #[test]
    fn trilinear_transform_matches_direct(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lat = Lattice3 { basis: [[0.5, 0.0, 0.0], [1.5, 1.0, 0.0], [-0.5, 0.3, 2.0]] };
        let f: Vec<LatticeFunction> = (0..3).map(|_| {
            let dims = [rng.gen_range(1..=6), rng.gen_range(1..=6), rng.gen_range(1..=6)];
            let mut f = LatticeFunction::zeros(lat, [rng.gen_range(-4..4), rng.gen_range(-4..4), rng.gen_range(-4..4)], dims);
            f.values.iter_mut().for_each(|v| *v = rng.gen());
            f
        }).collect();
        let a = trilinear_integral(&f[0], &f[1], &f[2]).unwrap();
        let b = trilinear_integral_direct(&f[0], &f[1], &f[2]).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * b.max(1.0));
        // Homogeneity in each argument.
        let c = 3.7;
        let a1 = trilinear_integral(&f[0].scale(c), &f[1], &f[2]).unwrap();
        let a3 = trilinear_integral(&f[0], &f[1], &f[2].scale(c)).unwrap();
        prop_assert!((a1 - c * a).abs() <= 1e-10 * (c * a).max(1.0) && (a3 - c * a).abs() <= 1e-10 * (c * a).max(1.0));
    }
}

#[test]
fn disjoint_supports_give_zero() {
    let lat = Lattice3::unit();
    let mut f = LatticeFunction::zeros(lat, [0, 0, 0], [2, 2, 2]);
    f.values.iter_mut().for_each(|v| *v = 1.0);
    let far = LatticeFunction { origin: [100, 0, 0], ..f.clone() };
    assert_eq!(trilinear_integral(&f, &f, &far).unwrap(), 0.0);
    assert_eq!(trilinear_integral_direct(&f, &f, &far).unwrap(), 0.0);
}

#[test]
fn etdrk4_is_fourth_order_and_strang_second() {
    let p = params(2.5);
    let g = FrequencyGrid::new(2.0 * PI * 2.0, 2.0 * PI * 2.0, 32, 32).unwrap();
    let u0 = random_field(g, 5, 0.5);
    let t = 0.2;
    let run = |dt: f64, scheme: Scheme| {
        let cfg = EvolutionConfig { dt, t_final: t, scheme, snapshot_stride: 1_000_000, ..Default::default() };
        solve(&p, &u0, &cfg).unwrap().last().clone()
    };
    let reference = run(t / 512.0, Scheme::Etdrk4);
    let err = |dt: f64, s: Scheme| run(dt, s).max_abs_diff(&reference);
    let (e1, e2) = (err(t / 8.0, Scheme::Etdrk4), err(t / 16.0, Scheme::Etdrk4));
    assert!(e1 / e2 > 12.0, "ETDRK4 ratio {}", e1 / e2);
    let (s1, s2) = (err(t / 32.0, Scheme::Strang), err(t / 64.0, Scheme::Strang));
    assert!(s1 / s2 > 3.5 && s1 / s2 < 4.5, "Strang ratio {}", s1 / s2);
}

#[test]
fn single_step_matches_solver_and_conserves_mass() {
    let p = params(3.0);
    let u0 = random_field(grid16(), 8, 0.05);
    let cfg = EvolutionConfig { dt: 0.01, t_final: 0.01, ..Default::default() };
    let a = step(&p, &u0, 0.01, Scheme::Etdrk4).unwrap();
    let b = solve(&p, &u0, &cfg).unwrap().last().clone();
    assert!(a.max_abs_diff(&b) < 1e-15);
    assert!((mass(&a) - mass(&u0)).abs() <= 1e-8 * mass(&u0));
}

#[test]
fn picard_third_iterate_error_is_fifth_order() {
    let p = params(2.5);
    let g = FrequencyGrid::new(2.0 * PI * 2.0, 2.0 * PI * 2.0, 32, 32).unwrap();
    let t = 0.25;
    let gap = |eps: f64| {
        let u0 = random_field(g, 3, eps);
        let cfg = EvolutionConfig { dt: t / 400.0, t_final: t, snapshot_stride: 1_000_000, ..Default::default() };
        let exact = solve(&p, &u0, &cfg).unwrap().last().clone();
        picard_iterate(&p, &u0, 3, t, t / 400.0).unwrap().max_abs_diff(&exact)
    };
    let (a, b) = (gap(0.4), gap(0.2));
    assert!(a / b >= 8.0, "halving ratio {}", a / b);
}

#[test]
fn spacetime_norm_of_constant_trajectory() {
    let u = random_field(grid16(), 2, 1.0);
    let traj = Trajectory { times: (0..5).map(|k| k as f64 * 0.25).collect(), fields: vec![u.clone(); 5] };
    let l4 = lebesgue_norm(&u, 4.0);
    let v = spacetime_norm(&traj, MixedNormSpec::new(4.0, 4.0).unwrap()).unwrap();
    assert!((v - l4).abs() < 1e-12 * l4);
    let sup = spacetime_norm(&traj, MixedNormSpec::new(f64::INFINITY, 4.0).unwrap()).unwrap();
    assert!((sup - l4).abs() < 1e-12 * l4);
}

#[test]
fn ratio_probes_are_homogeneous() {
    let p = params(3.0);
    let spec = MixedNormSpec::new(4.0, 4.0).unwrap();
    let (u0, t) = scaled_band_data(&p, 16.0).unwrap();
    let a = linear_strichartz_ratio(&p, spec, &u0, t, 32).unwrap();
    let b = linear_strichartz_ratio(&p, spec, &u0.scale(7.5), t, 32).unwrap();
    assert!((a.ratio - b.ratio).abs() < 1e-12 * a.ratio);

    let w = lowfreq_data(16.0).unwrap();
    let a = lowfreq_l4_ratio(&p, &w, 16.0, 16.0, 32).unwrap();
    let b = lowfreq_l4_ratio(&p, &w.scale(0.01), 16.0, 16.0, 32).unwrap();
    assert!((a.ratio - b.ratio).abs() < 1e-12 * a.ratio);

    let (u, _) = scaled_band_data(&p, 8.0).unwrap();
    let m = bilinear_l2(&p, &u, &u, 1e-3, 32).unwrap();
    let m2 = bilinear_l2(&p, &u.scale(2.0), &u.scale(3.0), 1e-3, 32).unwrap();
    assert!((m2 - 6.0 * m).abs() < 1e-12 * m2);
}

#[test]
fn zero_data_is_degenerate() {
    let p = params(3.0);
    let (u0, t) = scaled_band_data(&p, 8.0).unwrap();
    let z = SpectralField::zeros(*u0.grid(), true);
    let r = linear_strichartz_ratio(&p, MixedNormSpec::new(4.0, 4.0).unwrap(), &z, t, 32).unwrap();
    assert_eq!(r.status, Status::Degenerate);
}

#[test]
fn lattice_probes_are_deterministic() {
    let p = params(3.0);
    let a = lw_ratio(&p, 16.0, 2.0, [1.0; 3], 3, 11).unwrap();
    let b = lw_ratio(&p, 16.0, 2.0, [1.0; 3], 3, 11).unwrap();
    assert_eq!(a, b);
    let c = nonresonant_ratio(&p, 1.0, 16.0, 16.0, 3, 11).unwrap();
    assert_eq!(c, nonresonant_ratio(&p, 1.0, 16.0, 16.0, 3, 11).unwrap());
    assert!(a.ratio > 0.0 && c.ratio > 0.0);
}

#[test]
fn collinear_configuration_is_outside_hypothesis() {
    let p = params(3.0);
    let p1 = FreqPoint::new(12.0, 30.0).unwrap();
    let p2 = FreqPoint::new(1.5, 30.0 * 1.5 / 12.0).unwrap();
    let r = lw_ratio_at(&p, p1, p2, 16.0, 2.0, [1.0; 3], 2, 1).unwrap();
    assert_eq!(r.status, Status::OutsideHypothesis);
    assert!(!r.pass);
}

#[test]
fn modulation_above_hypothesis_is_rejected() {
    let p = params(3.0);
    assert!(lw_ratio(&p, 8.0, 2.0, [1e6, 1.0, 1.0], 1, 0).is_err());
    assert!(nonresonant_ratio(&p, 4.0, 8.0, 16.0, 1, 0).is_err());
}
