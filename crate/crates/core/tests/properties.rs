//! Property-based checks of the structural invariants of every module:
//! symmetries of the linear operators, gauge and reversibility structure of
//! the reduced fields, invariant sets of the flows, realness of the
//! reconstructed fronts and conservation in the direct simulation.

use modfront_core::dynamics::{shoot_scenario, ShootOptions};
use modfront_core::front::{reconstruct, HeteroclinicData};
use modfront_core::model::{dispersion, ModelParams, Scenario, ScenarioTag};
use modfront_core::ode::{integrate, IntegrateOptions, VectorField};
use modfront_core::pdesim::{PdeState, Stepper};
use modfront_core::reduced::{build_s1, build_s2, build_s3, build_s5, second_harmonics};
use modfront_core::spectrum::{block_eigenvalues, build_block};
use modfront_core::wave::{cubic_coefficient, leading_order, leading_order_residual};
use modfront_core::Complex64 as C64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn params(alpha0: f64, cu: f64, cv: f64, gamma1: f64, gamma2: f64, epsilon: f64) -> ModelParams {
    ModelParams { alpha0, cu, cv, gamma1, gamma2, epsilon, b: 0.0 }
}

/// Sorted-by-matching distance between two multisets of complex numbers.
fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("same cardinality");
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn dispersion_is_neutral_only_at_critical_wavenumber(k in -3.0f64..3.0, cu in -2.0f64..2.0, cv in -2.0f64..2.0) {
        prop_assume!(cu != 0.0);
        let p = params(1.0, cu, cv, 0.0, 0.0, 0.0);
        let re = dispersion(&p, k).lambda_u.re;
        prop_assert!(re <= 0.0);
        if (k.abs() - 1.0).abs() > 1e-3 {
            prop_assert!(re < 0.0);
        }
        prop_assert_eq!(dispersion(&p, 1.0).lambda_u.re, 0.0);
        prop_assert_eq!(dispersion(&p, 0.0).lambda_v, C64::new(0.0, 0.0));
    }

    #[test]
    fn dispersion_has_real_field_symmetry(k in -3.0f64..3.0, cu in -2.0f64..2.0, cv in -2.0f64..2.0, eps in 0.0f64..0.3) {
        let p = params(1.0, cu, cv, 0.0, 0.0, eps);
        let plus = dispersion(&p, k);
        let minus = dispersion(&p, -k);
        prop_assert!((minus.lambda_u - plus.lambda_u.conj()).norm() <= 1e-14 * (1.0 + plus.lambda_u.norm()));
        prop_assert!((minus.lambda_v - plus.lambda_v.conj()).norm() <= 1e-14 * (1.0 + plus.lambda_v.norm()));
    }

    #[test]
    fn onset_opens_an_unstable_band(alpha0 in 0.1f64..3.0, eps in 0.01f64..0.3, cu in 0.1f64..2.0) {
        let p = params(alpha0, cu, 0.0, 0.0, 0.0, eps);
        // |1 − k²| < ε√α0 is unstable; sample inside and just outside that band.
        let half = eps * alpha0.sqrt();
        for frac in [-0.9, -0.5, 0.0, 0.5, 0.9] {
            let k = (1.0 + frac * half).sqrt();
            prop_assert!(dispersion(&p, k).lambda_u.re > 0.0);
            prop_assert!(dispersion(&p, -k).lambda_u.re > 0.0);
        }
        let k_out = (1.0 + 1.5 * half).sqrt();
        prop_assert!(dispersion(&p, k_out).lambda_u.re < 0.0);
    }

    #[test]
    fn spatial_blocks_are_conjugate_in_the_fourier_index(
        n in 1i64..40, cu in 0.2f64..1.5, cv in -3.0f64..3.0, c in -5.0f64..5.0, eps in 0.0f64..0.1,
    ) {
        let p = params(1.0, cu, cv, 0.0, 0.0, eps);
        let cp = cu;
        let plus = block_eigenvalues(&build_block(&p, c, cp, n)).unwrap();
        let minus = block_eigenvalues(&build_block(&p, c, cp, -n)).unwrap();
        let conj_sh: Vec<C64> = plus.sh.iter().map(|z| z.conj()).collect();
        let conj_con: Vec<C64> = plus.con.iter().map(|z| z.conj()).collect();
        let scale = 1.0 + (n * n) as f64;
        prop_assert!(multiset_distance(&minus.sh, &conj_sh) <= 1e-8 * scale);
        prop_assert!(multiset_distance(&minus.con, &conj_con) <= 1e-8 * scale);
    }

    #[test]
    fn companion_blocks_have_shift_structure(n in -20i64..20, cu in -1.5f64..1.5, c in -5.0f64..5.0) {
        prop_assume!(cu != 0.0);
        let p = params(1.0, cu, 0.5, 0.0, 0.0, 0.05);
        let b = build_block(&p, c, cu, n);
        for row in 0..3 {
            for col in 0..4 {
                let want = if col == row + 1 { 1.0 } else { 0.0 };
                prop_assert_eq!(b.lsh[(row, col)], C64::new(want, 0.0));
            }
        }
        for col in 0..4 {
            prop_assert_eq!(b.lsh[(3, col)], b.entries[col]);
        }
        prop_assert_eq!(b.lcon[(0, 0)], C64::new(0.0, 0.0));
        prop_assert_eq!(b.lcon[(0, 1)], C64::new(1.0, 0.0));
        prop_assert_eq!(b.lcon[(1, 0)], b.entries[4]);
        prop_assert_eq!(b.lcon[(1, 1)], b.entries[5]);
    }

    #[test]
    fn wave_frequency_makes_the_amplitude_real(alpha0 in 0.1f64..3.0, b in -0.05f64..2.0, cu in -3.0f64..3.0) {
        prop_assume!(cu.abs() > 1e-3);
        let p = ModelParams { alpha0, cu, b, epsilon: 0.0, ..ModelParams::default() };
        let w = leading_order(&p).unwrap();
        let q = (C64::new(3.0, 0.0) + 1.0 / C64::new(9.0, 6.0 * cu)).inv() * C64::new(alpha0 + b, w.omega0_star);
        prop_assert!(q.im.abs() <= 1e-14 * (1.0 + q.norm()));
        prop_assert!((w.a_star * w.a_star - q.re).abs() <= 1e-13 * (1.0 + q.re));
        prop_assert_eq!(w.cp - cu, 0.0);
    }

    #[test]
    fn stationary_wave_is_a_gauge_family(alpha0 in 0.1f64..3.0, cu in -3.0f64..3.0, phi in 0.0f64..(2.0 * PI)) {
        prop_assume!(cu.abs() > 1e-3);
        let p = ModelParams { alpha0, cu, epsilon: 0.0, ..ModelParams::default() };
        let w = leading_order(&p).unwrap();
        prop_assert!(leading_order_residual(&p)(w.a_star, w.omega0_star).norm() < 1e-13);
        let kappa = cubic_coefficient(&p);
        let a = C64::from_polar(w.a_star, phi);
        let g = C64::new(alpha0, w.omega0_star) * a + kappa * a * a.norm_sqr();
        prop_assert!(g.norm() < 1e-13);
    }

    #[test]
    fn gauge_equivariance_of_complex_amplitude_fields(
        cu in 0.3f64..1.5, gamma1 in 0.0f64..0.1, phi in 0.0f64..(2.0 * PI),
        ar in -0.8f64..0.8, ai in -0.8f64..0.8, b1 in -0.5f64..0.5,
    ) {
        let rot = C64::from_polar(1.0, phi);
        let a = C64::new(ar, ai);
        let ra = a * rot;
        let p1 = params(1.0, cu, 0.0, gamma1, 0.05, 0.05);
        let f1 = build_s1(&p1, 3.0 * cu - 1.0).unwrap();
        let y = f1.rhs(&[ar, ai]);
        let yr = f1.rhs(&[ra.re, ra.im]);
        let want = C64::new(y[0], y[1]) * rot;
        prop_assert!((C64::new(yr[0], yr[1]) - want).norm() < 1e-13);

        let p3 = params(1.0, cu, -3.0 * cu - 1.0, gamma1, 0.0, 0.05);
        let f3 = build_s3(&p3, 1.0).unwrap();
        let y = f3.rhs(&[ar, ai, b1]);
        let yr = f3.rhs(&[ra.re, ra.im, b1]);
        let want = C64::new(y[0], y[1]) * rot;
        prop_assert!((C64::new(yr[0], yr[1]) - want).norm() < 1e-13);
        prop_assert!((yr[2] - y[2]).abs() < 1e-13);
    }

    #[test]
    fn scenario_two_is_reversible_under_speed_flip(
        c0 in 0.3f64..3.0, x in proptest::collection::vec(-0.5f64..0.5, 4),
    ) {
        let p = ModelParams::default();
        let f = build_s2(&p, c0).unwrap();
        let g = build_s2(&p, -c0).unwrap();
        let t = 1.5;
        let y = integrate(&f, &x, 0.0, t, &IntegrateOptions::with_tol(1e-12)).unwrap();
        let y_end = y.last();
        let back = integrate(&g, &[y_end[0], y_end[1], -y_end[2], -y_end[3]], 0.0, t, &IntegrateOptions::with_tol(1e-12)).unwrap();
        let z = back.last();
        let err = (z[0] - x[0]).abs() + (z[1] - x[1]).abs() + (z[2] + x[2]).abs() + (z[3] + x[3]).abs();
        prop_assert!(err < 1e-8, "reversal error {err:e}");
    }

    #[test]
    fn scenario_two_origin_linearization(c0 in -3.0f64..3.0, gamma1 in 0.0f64..0.1) {
        prop_assume!(c0.abs() > 0.05);
        let p = ModelParams { gamma1, ..ModelParams::default() };
        let f = build_s2(&p, c0).unwrap();
        let dp = f.coeffs.delta_plus.unwrap();
        let dm = f.coeffs.delta_minus.unwrap();
        let want = [dp, dm, dp.conj(), dm.conj()];
        let j = f.jacobian(&f.origin);
        let eig: Vec<C64> = j.complex_eigenvalues().iter().copied().collect();
        prop_assert!(multiset_distance(&eig, &want) < 1e-9 * (1.0 + dp.norm() + dm.norm()));
    }

    #[test]
    fn scenario_five_keeps_the_uncoupled_plane(
        c0 in 0.5f64..3.0, x in proptest::collection::vec(-0.5f64..0.5, 4),
    ) {
        let p = params(1.0, 1.0, -3.0, 0.0, 0.0, 0.05);
        let f = build_s5(&p, c0).unwrap();
        let x0 = [x[0], x[1], x[2], x[3], 0.0];
        let traj = integrate(&f, &x0, 0.0, 2.0, &IntegrateOptions::with_tol(1e-10)).unwrap();
        for s in &traj.states {
            prop_assert!(s[4].abs() < 1e-10);
        }
    }

    #[test]
    fn dense_output_matches_the_exact_flow(rate in -2.0f64..-0.1, x0 in 0.1f64..2.0, frac in 0.0f64..1.0) {
        struct Decay(f64);
        impl VectorField for Decay {
            fn dim(&self) -> usize { 1 }
            fn eval(&self, x: &[f64], out: &mut [f64]) { out[0] = self.0 * x[0]; }
        }
        let tol = 1e-9;
        let traj = integrate(&Decay(rate), &[x0], 0.0, 3.0, &IntegrateOptions::with_tol(tol)).unwrap();
        prop_assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
        let t = 3.0 * frac;
        let got = traj.at(t).unwrap()[0];
        prop_assert!((got - x0 * (rate * t).exp()).abs() < 100.0 * tol * x0);
    }

    #[test]
    fn reconstructed_front_is_real_with_prescribed_harmonics(
        ar in -1.0f64..1.0, ai in -1.0f64..1.0, gamma2 in -0.2f64..0.2, eps in 0.02f64..0.2,
    ) {
        let p = params(1.0, 1.0, 0.0, 0.0, gamma2, eps);
        let field = build_s1(&p, 2.0).unwrap();
        let a = C64::new(ar, ai);
        let data = HeteroclinicData { scenario: ScenarioTag::I, s: vec![0.0, 1.0], a: vec![a, a], b1: None };
        let m = 32;
        let prof = reconstruct(&field, &data, &p, m).unwrap();
        // Discrete Fourier coefficients of each real row in p.
        let coeff = |row: &[f64], k: i32| -> C64 {
            row.iter().zip(&prof.p_grid).map(|(&x, &p)| x * C64::from_polar(1.0, -(k as f64) * p)).sum::<C64>() / m as f64
        };
        let h = second_harmonics(&p, a);
        let u = &prof.u[0];
        let v = &prof.v[0];
        prop_assert!(u.iter().chain(v.iter()).all(|x| x.is_finite()));
        prop_assert!((coeff(u, 1) - eps * a).norm() < 1e-12);
        prop_assert!((coeff(u, -1) - eps * a.conj()).norm() < 1e-12);
        prop_assert!((coeff(u, 2) - eps * eps * h.hu2).norm() < 1e-12);
        prop_assert!(coeff(u, 0).norm() < 1e-12);
        prop_assert!((coeff(v, 2) - eps * eps * h.hv2).norm() < 1e-12);
        prop_assert!((coeff(v, 0).re - prof.v_mean(0)).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(config(8))]

    #[test]
    fn direct_simulation_conserves_the_mean_of_v(
        seed_u in proptest::collection::vec(-0.2f64..0.2, 8),
        seed_v in proptest::collection::vec(-0.2f64..0.2, 8),
        gamma1 in -0.5f64..0.5, gamma2 in -0.5f64..0.5,
    ) {
        let p = params(1.0, 0.7, 0.3, gamma1, gamma2, 0.1);
        let (n, l) = (128, 8.0 * PI);
        let mut st = PdeState::zeros(n, l);
        let x = st.x();
        for (i, xi) in x.iter().enumerate() {
            let k = |j: usize| ((j + 1) as f64) * 2.0 * PI / l;
            st.u[i] = (0..8).map(|j| seed_u[j] * (k(j) * xi).cos()).sum();
            st.v[i] = 0.05 + (0..8).map(|j| seed_v[j] * (k(j) * xi).sin()).sum::<f64>();
        }
        let m0 = st.mean_v();
        let mut stepper = Stepper::new(&p, n, l, 0.01).unwrap();
        stepper.advance(&mut st, 500).unwrap();
        prop_assert!((st.mean_v() - m0).abs() < 1e-12);
    }
}

/// The classification, final distance and eigen-direction of a shot do not
/// depend on the initial offset along the unstable direction.
#[test]
fn shooting_is_insensitive_to_the_offset() {
    let p = ModelParams { cu: 0.5, cv: -4.0, epsilon: 0.05, ..ModelParams::default() };
    for scenario in [Scenario::one(-2.0), Scenario::three(1.0)] {
        let mut classes = Vec::new();
        for offset in [1e-6, 1e-5, 1e-4] {
            let opts = ShootOptions { offset, ..ShootOptions::default() };
            let (_, shot) = shoot_scenario(&p, &scenario, &opts).unwrap();
            classes.push((shot.target_class, shot.diagnostics.eigenvalue));
        }
        for w in classes.windows(2) {
            assert_eq!(w[0].0, w[1].0, "{:?}", scenario.tag);
            assert!((w[0].1 - w[1].1).norm() < 1e-12);
        }
    }
}

/// With weak coupling the Scenario III connection persists and the
/// conserved-mode excursion grows linearly in the coupling strength.
#[test]
fn scenario_three_conserved_excursion_is_linear_in_coupling() {
    let base = ModelParams { cu: 0.5, cv: -4.0, epsilon: 0.05, ..ModelParams::default() };
    let gammas = [0.01, 0.03, 0.05];
    let mut sup = Vec::new();
    for &g in &gammas {
        let p = ModelParams { gamma1: g, ..base };
        let (field, shot) = shoot_scenario(&p, &Scenario::three(1.0), &ShootOptions::default()).unwrap();
        assert_eq!(shot.target_class, modfront_core::dynamics::OmegaLimit::Origin, "gamma1 = {g}");
        let m = shot.trajectory.states.iter().map(|x| field.b1(x).unwrap().abs()).fold(0.0, f64::max);
        sup.push(m);
    }
    // Least-squares slope through the origin and the relative misfit.
    let slope = gammas.iter().zip(&sup).map(|(g, s)| g * s).sum::<f64>() / gammas.iter().map(|g| g * g).sum::<f64>();
    assert!(slope > 0.0);
    for (g, s) in gammas.iter().zip(&sup) {
        assert!((s - slope * g).abs() <= 0.05 * slope * g, "sup {s:e} at gamma1 {g} vs slope {slope:e}");
    }
}
