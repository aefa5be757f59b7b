//! Acceptance suite: twelve end-to-end checks of the library against the
//! known closed forms and reference values, each reported as one pass/fail
//! line. Shared by the `acceptance` integration test and `modfront verify`.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bifurcation::{continue_periodic_orbit, find_hopf, find_torus_bifurcation, floquet_multipliers, orbit_seed, TRIVIAL_MULTIPLIER_TOL};
use crate::dynamics::{analytic_s1_heteroclinic, compare_with_analytic, fixed_point_eigens, shoot_scenario, OmegaLimit, ShootOptions};
use crate::error::Result;
use crate::model::{ModelParams, Scenario, ScenarioTag};
use crate::ode::{fd_jacobian, integrate, IntegrateOptions, VectorField};
use crate::pdesim::{validate_front, FrontRun};
use crate::reduced::{build_s1, build_s2, build_s3, build_s4, build_s5, S4System};
use crate::spectrum::{central_eigen_expansion, central_partition, matched_central, PartitionOptions, DEFAULT_MIN_GAP, DEFAULT_N_MAX};
use crate::wave::{leading_order, refine};

type C64 = Complex64;

/// Reference Hopf point.
pub const HOPF_REFERENCE: f64 = 1.55172;
/// Tolerance on the Hopf point.
pub const HOPF_TOL: f64 = 1e-3;
/// Reference torus point.
pub const TORUS_REFERENCE: f64 = 1.015;
/// Tolerance on the torus point.
pub const TORUS_TOL: f64 = 1e-2;

/// Result of one criterion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    /// Criterion number (1–12).
    pub id: u8,
    /// Short name.
    pub name: &'static str,
    /// Whether every check of the criterion held.
    pub passed: bool,
    /// Measured values and failing checks.
    pub summary: String,
    /// Wall-clock time in seconds.
    pub seconds: f64,
}

impl std::fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {:>2} {:<34} {:>8.2}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.summary
        )
    }
}

/// Collects named checks.
#[derive(Default)]
struct Checks {
    ok: bool,
    notes: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Self { ok: true, notes: Vec::new() }
    }
    fn check(&mut self, cond: bool, note: impl Into<String>) {
        let note = note.into();
        if cond {
            self.notes.push(note);
        } else {
            self.ok = false;
            self.notes.push(format!("VIOLATED: {note}"));
        }
    }
    fn info(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }
}

/// A criterion: number, name, and body.
pub type Criterion = (u8, &'static str, fn() -> Result<(bool, String)>);

/// All criteria in order.
pub fn criteria() -> Vec<Criterion> {
    vec![
        (1, "spectral partition (Scenario I grid)", spectral_partition),
        (2, "central eigenvalue expansions", central_expansions),
        (3, "traveling wave", traveling_wave),
        (4, "Scenario I heteroclinic", scenario_one_heteroclinic),
        (5, "Hopf point", hopf_point),
        (6, "torus point and Floquet structure", torus_point),
        (7, "invading-state spectrum", invading_spectrum),
        (8, "omega-limit classification", omega_limits),
        (9, "Scenario III/IV persistence", scenario_three_four_persistence),
        (10, "Scenario V restriction", scenario_five_restriction),
        (11, "PDE front validation", pde_validation),
        (12, "reduced-field Jacobians", jacobians),
    ]
}

/// Runs one criterion, timing it and converting errors into failures.
pub fn run(c: &Criterion) -> CriterionResult {
    let t = Instant::now();
    let (passed, summary) = match (c.2)() {
        Ok(v) => v,
        Err(e) => (false, format!("error {}: {e}", e.name())),
    };
    CriterionResult { id: c.0, name: c.1, passed, summary, seconds: t.elapsed().as_secs_f64() }
}

/// Runs the selected criteria (all if `only` is empty).
pub fn run_all(only: &[u8]) -> Vec<CriterionResult> {
    criteria().iter().filter(|c| only.is_empty() || only.contains(&c.0)).map(run).collect()
}

fn finish(c: Checks) -> Result<(bool, String)> {
    Ok((c.ok, c.notes.join("; ")))
}

fn params(alpha0: f64, cu: f64, cv: f64, eps: f64) -> ModelParams {
    ModelParams { alpha0, cu, cv, gamma1: 0.0, gamma2: 0.0, epsilon: eps, b: 0.0 }
}

/// 1. Scenario I grid: exactly the predicted central count and a hyperbolic gap ≥ 0.1, under 10 s.
pub fn spectral_partition() -> Result<(bool, String)> {
    let t = Instant::now();
    let mut c = Checks::new();
    let mut min_gap = f64::INFINITY;
    let mut cases = 0;
    for cu in [0.2, 0.3, 0.4, 0.5, 0.6] {
        for speed in [-5.0, -4.0, -3.0, -2.0, -1.5] {
            for eps in [0.0, 0.02, 0.05] {
                let p = params(1.0, cu, 0.0, eps);
                let cp = cu + eps * eps * leading_order(&p)?.omega0_star;
                let opts = PartitionOptions { n_max: DEFAULT_N_MAX, ..PartitionOptions::for_scenario(ScenarioTag::I, eps) };
                let rep = central_partition(&p, speed, cp, &opts)?;
                cases += 1;
                if rep.central_count() != ScenarioTag::I.central_count() {
                    c.check(false, format!("cu={cu} c={speed} eps={eps}: {} central", rep.central_count()));
                }
                min_gap = min_gap.min(rep.hyperbolic_gap);
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    c.check(true, format!("{cases} cases with 3 central eigenvalues"));
    c.check(min_gap >= DEFAULT_MIN_GAP, format!("min hyperbolic gap {min_gap:.4} >= 0.1"));
    c.check(secs < 10.0, format!("runtime {secs:.2}s < 10s"));
    finish(c)
}

fn fit_exponent(eps: &[f64], err: &[f64]) -> f64 {
    let lx: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let ly: Vec<f64> = err.iter().map(|e| e.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / lx.iter().map(|x| (x - mx).powi(2)).sum::<f64>()
}

/// 2. Computed central eigenvalues minus their expansions: exponent ≥ 2.7 (I), ≥ 1.7 (II).
pub fn central_expansions() -> Result<(bool, String)> {
    let mut c = Checks::new();
    let eps = [0.04, 0.02, 0.01];
    let mut err1 = Vec::new();
    let mut err2 = Vec::new();
    for &e in &eps {
        let p = params(1.0, 1.0, 0.0, e);
        let cp = 1.0 + e * e * leading_order(&p)?.omega0_star;
        let s1 = Scenario::one(5.0);
        let ex = central_eigen_expansion(&p, &s1)?;
        let num = matched_central(&p, 5.0, cp, &ex.sh)?;
        err1.push((num[0] - ex.sh[0]).norm());
        let s2 = Scenario::two(2.0);
        let ex = central_eigen_expansion(&p, &s2)?;
        let num = matched_central(&p, 3.0 + e * 2.0, cp, &ex.sh)?;
        err2.push(num.iter().zip(&ex.sh).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max));
    }
    let k1 = fit_exponent(&eps, &err1);
    let k2 = fit_exponent(&eps, &err2);
    c.check(k1 >= 2.7, format!("Scenario I exponent {k1:.3} >= 2.7"));
    c.check(k2 >= 1.7, format!("Scenario II exponent {k2:.3} >= 1.7"));
    finish(c)
}

/// 3. Closed-form wave values and the size of the Newton correction.
pub fn traveling_wave() -> Result<(bool, String)> {
    let mut c = Checks::new();
    let w = leading_order(&params(1.0, 1.0, 0.0, 0.0))?;
    let a2 = w.a_star * w.a_star;
    c.check((a2 - 0.325).abs() < 1e-12, format!("A*^2 = {a2:.15}"));
    c.check((w.omega0_star + 1.0 / 60.0).abs() < 1e-12, format!("omega0* = {:.15}", w.omega0_star));
    let p = ModelParams { gamma1: 0.01, ..params(1.0, 1.0, 0.0, 0.05) };
    let lo = leading_order(&p)?;
    let (sol, r) = refine(&p)?;
    let moved = (sol.a_star - lo.a_star).abs().max((sol.omega0_star - lo.omega0_star).abs());
    c.check(moved <= 0.01, format!("refinement moved the root by {moved:.2e} <= 0.01 (residual {:.1e})", r.residual));
    finish(c)
}

/// 4. Scenario I shooting against the closed form, and the limits for `c ≷ 3c_u`.
pub fn scenario_one_heteroclinic() -> Result<(bool, String)> {
    let mut c = Checks::new();
    let p = params(1.0, 1.0, 0.0, 0.05);
    for speed in [5.0, 1.5] {
        let (field, shot) = shoot_scenario(&p, &Scenario::one(speed), &ShootOptions::default())?;
        let exact = analytic_s1_heteroclinic(&p, speed)?;
        let (_, err) = compare_with_analytic(&shot.trajectory, &exact);
        c.check(err < 1e-6, format!("c={speed}: sup error {err:.2e} < 1e-6"));
        let (l, r) = exact.limits();
        let expected = if speed > 3.0 { (field.a_star(), 0.0) } else { (0.0, field.a_star()) };
        let traj = &shot.trajectory;
        let (first, last) = if traj.t_last() > traj.times[0] { (traj.states[0][0], traj.last()[0]) } else { (traj.last()[0], traj.states[0][0]) };
        c.check(
            (l - expected.0).abs() < 1e-12 && (r - expected.1).abs() < 1e-12 && (first - expected.0).abs() < 1e-5 && (last - expected.1).abs() < 1e-5,
            format!("c={speed}: limits ({first:.5}, {last:.5})"),
        );
        c.check(shot.target_class == OmegaLimit::Origin, format!("c={speed}: connects to the origin"));
    }
    finish(c)
}

/// 5. Hopf point of the Scenario II origin.
pub fn hopf_point() -> Result<(bool, String)> {
    let t = Instant::now();
    let mut c = Checks::new();
    let h = find_hopf(&params(1.0, 1.0, 0.0, 0.05), ScenarioTag::II, (1.1, 2.5))?;
    let secs = t.elapsed().as_secs_f64();
    c.check((h.c0 - HOPF_REFERENCE).abs() <= HOPF_TOL, format!("c0* = {:.6} vs {HOPF_REFERENCE} ± {HOPF_TOL}", h.c0));
    c.check(h.certificate.im.abs() > 0.0 && h.certificate.re.abs() < 1e-10, format!("crossing pair {:.3e} ± {:.6}i", h.certificate.re, h.certificate.im));
    c.check(secs < 30.0, format!("runtime {secs:.2}s < 30s"));
    finish(c)
}

/// 6. Torus point and multiplier structure on `(c0**, c0*)`.
pub fn torus_point() -> Result<(bool, String)> {
    let t = Instant::now();
    let mut c = Checks::new();
    let p = params(1.0, 1.0, 0.0, 0.05);
    let tor = find_torus_bifurcation(&p, ScenarioTag::II, (0.9, 1.3))?;
    c.check((tor.c0 - TORUS_REFERENCE).abs() <= TORUS_TOL, format!("c0** = {:.6} vs {TORUS_REFERENCE} ± {TORUS_TOL}", tor.c0));
    c.check(tor.certificate.im.abs() > 1e-6, format!("critical multiplier {:.6}{:+.6}i", tor.certificate.re, tor.certificate.im));
    let hopf = find_hopf(&p, ScenarioTag::II, (1.1, 2.5))?;
    let mut worst_trivial: f64 = 0.0;
    let mut max_nontrivial: f64 = 0.0;
    for k in 1..=8 {
        let c0 = tor.c0 + (hopf.c0 - tor.c0) * k as f64 / 9.0;
        let orbit = continue_periodic_orbit(&p, ScenarioTag::II, c0, &orbit_seed(&p, ScenarioTag::II, c0)?)?;
        let fl = floquet_multipliers(&p, ScenarioTag::II, &orbit)?;
        worst_trivial = worst_trivial.max((fl.trivial - 1.0).norm());
        max_nontrivial = max_nontrivial.max(fl.max_nontrivial_modulus());
    }
    c.check(worst_trivial < TRIVIAL_MULTIPLIER_TOL, format!("trivial multiplier within {worst_trivial:.1e} of 1"));
    c.check(max_nontrivial < 1.0, format!("max nontrivial |mu| = {max_nontrivial:.6} < 1 on (c0**, c0*)"));
    let below = tor.c0 - 0.02;
    let orbit = continue_periodic_orbit(&p, ScenarioTag::II, below, &orbit_seed(&p, ScenarioTag::II, below)?)?;
    let fl = floquet_multipliers(&p, ScenarioTag::II, &orbit)?;
    c.check(fl.max_nontrivial_modulus() > 1.0, format!("below c0**: |mu| = {:.6} > 1", fl.max_nontrivial_modulus()));
    let secs = t.elapsed().as_secs_f64();
    c.check(secs < 300.0, format!("runtime {secs:.2}s < 300s"));
    finish(c)
}

/// 7. Eigen-counts of the invading state.
pub fn invading_spectrum() -> Result<(bool, String)> {
    let mut c = Checks::new();
    let p = params(1.0, 1.0, 0.0, 0.05);
    let mut counts = Vec::new();
    for c0 in [0.5, 1.0, 2.0, 5.0, 10.0] {
        let f = build_s2(&p, c0)?;
        let s = fixed_point_eigens(&f, &f.invading)?;
        counts.push(format!("{c0}:({},{},{})", s.unstable, s.center, s.stable));
        c.check((s.unstable, s.center, s.stable) == (1, 1, 2), format!("c0={c0}"));
    }
    c.info(format!("2A* = {:.4}", 2.0 * build_s2(&p, 2.0)?.a_star()));
    c.info(counts.join(" "));
    finish(c)
}

/// 8. ω-limits of the Scenario II shooting.
pub fn omega_limits() -> Result<(bool, String)> {
    let mut c = Checks::new();
    let p = params(1.0, 1.0, 0.0, 0.05);
    for (c0, expected) in [(2.0, OmegaLimit::Origin), (1.3, OmegaLimit::PeriodicOrbit), (0.98, OmegaLimit::Quasiperiodic)] {
        let t = Instant::now();
        let (_, shot) = shoot_scenario(&p, &Scenario::two(c0), &ShootOptions::default())?;
        let secs = t.elapsed().as_secs_f64();
        c.check(shot.target_class == expected && secs < 60.0, format!("c0={c0}: {:?} ({secs:.2}s)", shot.target_class));
    }
    finish(c)
}

/// 9. Persistence of the connection to the origin in Scenarios III and IV.
pub fn scenario_three_four_persistence() -> Result<(bool, String)> {
    let mut c = Checks::new();
    let mut n3 = 0;
    for (cu, cv) in [(1.0, -4.0), (0.5, -2.0), (-0.5, 1.0)] {
        for c0 in [0.5, 1.0, 2.0] {
            for g1 in [0.0, 0.01, 0.05] {
                let p = ModelParams { gamma1: g1, ..params(1.0, cu, cv, 0.05) };
                let (_, shot) = shoot_scenario(&p, &Scenario::three(c0), &ShootOptions::default())?;
                n3 += 1;
                if shot.target_class != OmegaLimit::Origin {
                    c.check(false, format!("III cu={cu} cv={cv} c0={c0} g1={g1}: {:?}", shot.target_class));
                }
            }
        }
    }
    c.check(true, format!("III: {n3} cases connect to the origin"));
    let mut n4 = 0;
    let mut worst_b1: f64 = 0.0;
    for eps in [0.05, 0.02] {
        for c0 in [0.5, 1.0, 2.0] {
            for g20 in [-0.4, -0.1, 0.3, 1.0] {
                if g20 <= S4System::gamma2_0_condition(c0, 1.0) {
                    continue;
                }
                let p = params(1.0, 1.0, -4.0, eps);
                let (f, shot) = shoot_scenario(&p, &Scenario::four(c0, g20), &ShootOptions::default())?;
                n4 += 1;
                if shot.target_class != OmegaLimit::Origin {
                    c.check(false, format!("IV eps={eps} c0={c0} g20={g20}: {:?}", shot.target_class));
                }
                let b1 = shot.trajectory.states[0][2];
                let expected = -2.0 * g20 * f.a_star().powi(2) / c0;
                worst_b1 = worst_b1.max((b1 - expected).abs());
            }
        }
    }
    c.check(true, format!("IV: {n4} cases connect to the origin"));
    c.check(worst_b1 <= 1e-3, format!("IV: B1 endpoint deviation {worst_b1:.2e} <= 1e-3"));
    finish(c)
}

/// 10. The `B₁ = 0` plane of Scenario V carries the Scenario II dynamics.
pub fn scenario_five_restriction() -> Result<(bool, String)> {
    let mut c = Checks::new();
    let p = params(1.0, 1.0, -3.0, 0.05);
    let f2 = build_s2(&p, 2.0)?;
    let f5 = build_s5(&p, 2.0)?;
    let x2 = [0.4, -0.1, 0.05, 0.2];
    let x5 = [0.4, -0.1, 0.05, 0.2, 0.0];
    let opts = IntegrateOptions::with_tol(1e-13);
    let t2 = integrate(&f2, &x2, 0.0, 10.0, &opts)?;
    let t5 = integrate(&f5, &x5, 0.0, 10.0, &opts)?;
    let mut worst: f64 = 0.0;
    for k in 0..=100 {
        let t = 0.1 * k as f64;
        let (a, b) = (t2.at(t).expect("in range"), t5.at(t).expect("in range"));
        for i in 0..4 {
            worst = worst.max((a[i] - b[i]).abs());
        }
        worst = worst.max(b[4].abs());
    }
    c.check(worst < 1e-8, format!("gamma1=0: max deviation {worst:.2e} < 1e-8"));
    let p = ModelParams { gamma1: 0.02, ..p };
    let (_, shot) = shoot_scenario(&p, &Scenario::five(2.0), &ShootOptions::default())?;
    c.check(shot.target_class == OmegaLimit::Origin, format!("gamma1=0.02, c0=2: {:?}", shot.target_class));
    finish(c)
}

/// 11. Direct simulation of a Scenario I front at `ε = 0.1`.
pub fn pde_validation() -> Result<(bool, String)> {
    let t = Instant::now();
    let mut c = Checks::new();
    let p = params(1.0, -0.5, 0.0, 0.1);
    let speed = 0.5;
    let v = validate_front(&p, speed, &FrontRun::default())?;
    let secs = t.elapsed().as_secs_f64();
    c.check((v.front_speed - speed).abs() <= 0.05, format!("front speed {:.4} vs {speed} ± 0.05", v.front_speed));
    c.check((v.phase_speed - v.cp_predicted).abs() <= 5e-3, format!("phase speed {:.6} vs {:.6} ± 5e-3", v.phase_speed, v.cp_predicted));
    c.check(v.mean_v_drift < 1e-10, format!("mean(v) drift {:.1e} < 1e-10", v.mean_v_drift));
    c.info(format!("plateau {:.4} vs 2eps A* = {:.4}", v.plateau, v.plateau_predicted));
    c.check(secs < 600.0, format!("runtime {secs:.1}s < 600s"));
    finish(c)
}

/// 12. Analytic against central-difference Jacobians, ten random states per field.
pub fn jacobians() -> Result<(bool, String)> {
    let mut c = Checks::new();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let p = ModelParams { alpha0: 1.0, cu: 0.7, cv: -2.5, gamma1: 0.03, gamma2: 0.0, epsilon: 0.05, b: 0.0 };
    let p1 = ModelParams { gamma2: 0.04, ..p };
    let p5 = ModelParams { cv: -2.1, ..p };
    let fields = vec![
        ("S1", build_s1(&p1, 5.0)?),
        ("S2", build_s2(&p, 1.3)?),
        ("S3", build_s3(&p, 1.0)?),
        ("S4", build_s4(&p, 1.0, 0.4)?.full.expect("epsilon > 0")),
        ("S5", build_s5(&p5, 2.0)?),
    ];
    for (name, f) in &fields {
        let mut worst: f64 = 0.0;
        for _ in 0..10 {
            let x: Vec<f64> = (0..f.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let an = f.jacobian(&x);
            let fd = fd_jacobian(f, &x);
            let rel = (&an - &fd).norm() / an.norm().max(1e-12);
            worst = worst.max(rel);
        }
        c.check(worst < 1e-6, format!("{name}: {worst:.1e}"));
    }
    finish(c)
}

/// Eigenvalue helper for summaries.
pub fn format_complex(z: C64) -> String {
    format!("{:.6}{:+.6}i", z.re, z.im)
}
