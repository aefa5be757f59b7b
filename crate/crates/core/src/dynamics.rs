//! Trajectory machinery for the reduced systems: equilibrium eigenstructure,
//! heteroclinic shooting from the invading state, classification of the
//! ω-limit set, and the closed-form Scenario I front.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{complexify, eigenvalues_real, null_vector, sort_by_real_desc};
use crate::model::{ModelParams, Scenario, ScenarioTag};
use crate::ode::{integrate, IntegrateOptions, Termination, Trajectory, VectorField};
use crate::reduced::{build_s1_radius, build_s2, build_s3_polar, build_s4, build_s5, Form, ReducedVectorField};

type C64 = Complex64;

/// Eigenvalues with `|Re λ|` below this are counted as center directions.
pub const CENTER_THRESHOLD: f64 = 1e-8;

/// Eigenstructure of the Jacobian at an equilibrium.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointSpectrum {
    /// Eigenvalues sorted by descending real part.
    pub eigenvalues: Vec<C64>,
    /// Unit eigenvectors (same order).
    pub eigenvectors: Vec<DVector<C64>>,
    /// Number of eigenvalues with `Re λ > 10⁻⁸`.
    pub unstable: usize,
    /// Number of eigenvalues with `|Re λ| ≤ 10⁻⁸`.
    pub center: usize,
    /// Number of eigenvalues with `Re λ < −10⁻⁸`.
    pub stable: usize,
}

/// Eigen-decomposition of `Df(x_fp)`; requires `‖f(x_fp)‖ < 10⁻⁸` (`NotAFixedPoint`).
pub fn fixed_point_eigens<F: VectorField + ?Sized>(field: &F, x_fp: &[f64]) -> Result<FixedPointSpectrum> {
    let res = norm(&field.rhs(x_fp));
    if !(res < 1e-8) {
        return Err(Error::NotAFixedPoint(res));
    }
    let jac = field.jacobian(x_fp);
    let mut eigenvalues = eigenvalues_real(&jac)?;
    sort_by_real_desc(&mut eigenvalues);
    let cj = complexify(&jac);
    let eigenvectors = eigenvalues.iter().map(|&l| null_vector(&cj, l)).collect();
    let unstable = eigenvalues.iter().filter(|z| z.re > CENTER_THRESHOLD).count();
    let stable = eigenvalues.iter().filter(|z| z.re < -CENTER_THRESHOLD).count();
    Ok(FixedPointSpectrum { center: eigenvalues.len() - unstable - stable, eigenvalues, eigenvectors, unstable, stable })
}

/// Newton polish of an equilibrium with a pseudo-inverse (tolerates the
/// zero eigenvalue of the gauge symmetry).
pub fn polish_fixed_point<F: VectorField + ?Sized>(field: &F, x0: &[f64], tol: f64) -> Result<Vec<f64>> {
    let mut x = DVector::from_column_slice(x0);
    for it in 0..50 {
        let f = DVector::from_vec(field.rhs(x.as_slice()));
        if f.norm() < tol {
            return Ok(x.as_slice().to_vec());
        }
        let jac = field.jacobian(x.as_slice());
        let svd = jac.svd(true, true);
        let step = svd
            .solve(&f, 1e-10 * svd.singular_values.max())
            .map_err(|_| Error::NewtonDiverged { iterations: it, residual: f.norm() })?;
        x -= step;
    }
    let res = norm(&field.rhs(x.as_slice()));
    if res < tol {
        Ok(x.as_slice().to_vec())
    } else {
        Err(Error::NewtonDiverged { iterations: 50, residual: res })
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// ω-limit classes of a shooting trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OmegaLimit {
    /// Converges to the origin.
    Origin,
    /// Converges to a periodic orbit.
    PeriodicOrbit,
    /// Bounded, non-periodic recurrence (invariant torus).
    Quasiperiodic,
    /// Leaves every bounded set.
    Divergent,
}

/// Thresholds of [`classify_omega_limit`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassifyOptions {
    /// Terminal norm below which the limit is the origin.
    pub origin_tol: f64,
    /// Divergence once the norm exceeds `divergence_factor · scale`.
    pub divergence_factor: f64,
    /// Amplitude scale (typically `A*`).
    pub scale: f64,
    /// Maximal spread of section returns for a periodic orbit.
    pub section_spread: f64,
    /// Longest period multiple checked.
    pub max_period_multiple: usize,
    /// Minimal number of section returns required for a decision.
    pub min_returns: usize,
}

impl ClassifyOptions {
    /// Defaults (`10⁻⁶`, `10³·scale`, spread `10⁻⁴`, periods up to 8).
    pub fn with_scale(scale: f64) -> Self {
        Self { origin_tol: 1e-6, divergence_factor: 1e3, scale, section_spread: 1e-4, max_period_multiple: 8, min_returns: 12 }
    }
}

/// Poincaré-section diagnostics of a trajectory tail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectionDiagnostics {
    /// Number of recorded returns.
    pub returns: usize,
    /// Smallest spread over period multiples `k = 1..=K`.
    pub spread: f64,
    /// Period multiple achieving the smallest spread.
    pub period_multiple: usize,
    /// Times of the returns.
    pub return_times: Vec<f64>,
    /// Minimum and maximum norm over the tail.
    pub envelope: (f64, f64),
}

/// Classifies the ω-limit set from the last 25% of `traj`.
///
/// Origin if the terminal (quotient) norm is below `origin_tol`; divergent if
/// the integration blew up or the norm exceeds `divergence_factor · scale`;
/// otherwise the returns to the hyperplane through the tail mean with normal
/// `f(x_end)` decide: returns repeating (for some period multiple `k ≤ 8`)
/// within `section_spread` mean a periodic orbit, bounded non-repeating
/// returns a quasiperiodic set.
pub fn classify_omega_limit<F: VectorField + ?Sized>(
    traj: &Trajectory,
    field: &F,
    quotient: &dyn Fn(&[f64]) -> Vec<f64>,
    opts: &ClassifyOptions,
) -> Result<(OmegaLimit, Option<SectionDiagnostics>)> {
    let last = traj.last();
    let qn = norm(&quotient(last));
    if traj.termination == Termination::Diverged || qn > opts.divergence_factor * opts.scale || !qn.is_finite() {
        return Ok((OmegaLimit::Divergent, None));
    }
    if qn < opts.origin_tol {
        return Ok((OmegaLimit::Origin, None));
    }
    let (t0, t1) = (traj.times[0], traj.t_last());
    let t_tail = t1 - 0.25 * (t1 - t0);
    let start = traj.times.partition_point(|&t| if t1 >= t0 { t < t_tail } else { t > t_tail });
    let tail = &traj.states[start..];
    let tail_times = &traj.times[start..];
    if tail.len() < 4 {
        return Err(Error::Inconclusive("trajectory tail too short".into()));
    }
    let n = last.len();
    let mean: Vec<f64> = (0..n).map(|i| tail.iter().map(|s| s[i]).sum::<f64>() / tail.len() as f64).collect();
    let normal = field.rhs(last);
    let nn = norm(&normal);
    if nn < 1e-12 {
        return Err(Error::Inconclusive(format!("trajectory converged to a non-trivial equilibrium (|x| = {qn:.3e})")));
    }
    let h = |x: &[f64]| -> f64 { x.iter().zip(&mean).zip(&normal).map(|((a, m), v)| (a - m) * v).sum::<f64>() / nn };
    let mut points: Vec<Vec<f64>> = Vec::new();
    let mut times = Vec::new();
    for k in 1..tail.len() {
        let (ha, hb) = (h(&tail[k - 1]), h(&tail[k]));
        if ha < 0.0 && hb >= 0.0 {
            // Secant/bisection on the dense output for an accurate crossing.
            let (mut ta, mut tb) = (tail_times[k - 1], tail_times[k]);
            let (mut fa, mut fb) = (ha, hb);
            let mut tm = tb;
            for _ in 0..60 {
                tm = if fb != fa { tb - fb * (tb - ta) / (fb - fa) } else { 0.5 * (ta + tb) };
                if !(tm > ta.min(tb) && tm < ta.max(tb)) {
                    tm = 0.5 * (ta + tb);
                }
                let fm = h(&traj.at(tm).expect("inside"));
                if fm.abs() < 1e-13 {
                    break;
                }
                if fm < 0.0 {
                    ta = tm;
                    fa = fm;
                } else {
                    tb = tm;
                    fb = fm;
                }
                if (tb - ta).abs() < 1e-13 {
                    break;
                }
            }
            points.push(traj.at(tm).expect("inside"));
            times.push(tm);
        }
    }
    let envelope = tail.iter().map(|s| norm(&quotient(s))).fold((f64::INFINITY, 0.0_f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if points.len() < opts.min_returns {
        return Err(Error::Inconclusive(format!("only {} section returns in the trajectory tail", points.len())));
    }
    let mut best = (f64::INFINITY, 1);
    for k in 1..=opts.max_period_multiple.min(points.len() / 3) {
        let spread = (k..points.len())
            .map(|i| norm(&points[i].iter().zip(&points[i - k]).map(|(a, b)| a - b).collect::<Vec<_>>()))
            .fold(0.0, f64::max);
        if spread < best.0 {
            best = (spread, k);
        }
        if spread < opts.section_spread {
            break;
        }
    }
    let diag = SectionDiagnostics { returns: points.len(), spread: best.0, period_multiple: best.1, return_times: times, envelope };
    let class = if best.0 < opts.section_spread { OmegaLimit::PeriodicOrbit } else { OmegaLimit::Quasiperiodic };
    Ok((class, Some(diag)))
}

/// Direction of time for shooting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ShootDirection {
    /// Forward along the unique unstable direction.
    Forward,
    /// Backward along the unique stable direction (reversed fronts).
    Backward,
}

/// Options of [`shoot_heteroclinic`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShootOptions {
    /// Initial displacement along the eigenvector, in `[10⁻⁸, 10⁻²]`.
    pub offset: f64,
    /// Integration horizon (in the reduced spatial variable).
    pub t_max: f64,
    /// Integrator tolerance.
    pub tol: f64,
    /// Time direction; `None` chooses forward if possible, else backward.
    pub direction: Option<ShootDirection>,
    /// Sign of the displacement: `true` toward decreasing amplitude.
    pub toward_origin: bool,
}

impl Default for ShootOptions {
    fn default() -> Self {
        Self { offset: 1e-6, t_max: 2000.0, tol: 1e-10, direction: None, toward_origin: true }
    }
}

/// Diagnostics of a shooting run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShootDiagnostics {
    /// Quotient norm of the final state.
    pub final_distance: f64,
    /// Eigenvalue of the direction used.
    pub eigenvalue: C64,
    /// Time direction used.
    pub direction: ShootDirection,
    /// Final time reached.
    pub t_end: f64,
    /// Section diagnostics, if computed.
    pub section: Option<SectionDiagnostics>,
    /// Classification of the orbit seeded with the opposite offset sign
    /// (`None` if it could not be classified).
    pub opposite: Option<OmegaLimit>,
}

/// Outcome of [`shoot_heteroclinic`].
#[derive(Debug, Clone, PartialEq)]
pub struct HeteroclinicResult {
    /// The computed orbit.
    pub trajectory: Trajectory,
    /// Equilibrium the orbit departs from.
    pub source: Vec<f64>,
    /// Classification of the ω-limit (α-limit for backward shooting).
    pub target_class: OmegaLimit,
    /// Initial displacement.
    pub offset: f64,
    /// Diagnostics.
    pub diagnostics: ShootDiagnostics,
}

/// Gauge direction `i·A` (rotation of every complex amplitude) for complex forms.
fn gauge_direction(field: &ReducedVectorField, x: &[f64]) -> Option<Vec<f64>> {
    match field.form {
        Form::S1Complex | Form::S3Complex => Some({
            let mut g = vec![0.0; x.len()];
            g[0] = -x[1];
            g[1] = x[0];
            g
        }),
        Form::S2 | Form::S5 => Some({
            let mut g = vec![0.0; x.len()];
            g[0] = -x[1];
            g[1] = x[0];
            g[2] = -x[3];
            g[3] = x[2];
            g
        }),
        _ => None,
    }
}

/// Quotient coordinates for distance measurements (drops the cyclic phase of polar forms).
pub fn quotient_coordinates(field: &ReducedVectorField, x: &[f64]) -> Vec<f64> {
    match field.form {
        Form::S4Full | Form::S4Fast => vec![x[0], x[2]],
        Form::S4Slow => vec![x[0]],
        _ => x.to_vec(),
    }
}

/// Seeds on the one-dimensional unstable (or, backward, stable) manifold of
/// `from_fp`, integrates, and classifies the limit set.
///
/// The eigen-direction is taken orthogonal to the gauge direction; its sign
/// points toward decreasing amplitude unless `toward_origin` is false.
pub fn shoot_heteroclinic(field: &ReducedVectorField, from_fp: &[f64], opts: &ShootOptions) -> Result<HeteroclinicResult> {
    if !(1e-8..=1e-2).contains(&opts.offset) {
        return Err(Error::InvalidParameter(format!("offset {} outside [1e-8, 1e-2]", opts.offset)));
    }
    let res = norm(&field.rhs(from_fp));
    if !(res < 1e-10) {
        return Err(Error::NotAFixedPoint(res));
    }
    let spec = fixed_point_eigens(field, from_fp)?;
    let direction = match opts.direction {
        Some(d) => d,
        None if spec.unstable == 1 => ShootDirection::Forward,
        None if spec.stable == 1 => ShootDirection::Backward,
        None => {
            return Err(Error::NoUnstableDirection(format!(
                "equilibrium has {} unstable and {} stable eigenvalues; expected exactly one in some direction",
                spec.unstable, spec.stable
            )))
        }
    };
    let pick: Vec<usize> = (0..spec.eigenvalues.len())
        .filter(|&i| match direction {
            ShootDirection::Forward => spec.eigenvalues[i].re > CENTER_THRESHOLD,
            ShootDirection::Backward => spec.eigenvalues[i].re < -CENTER_THRESHOLD,
        })
        .collect();
    if pick.len() != 1 || spec.eigenvalues[pick[0]].im.abs() > 1e-8 {
        return Err(Error::NoUnstableDirection(format!("{} candidate directions ({direction:?})", pick.len())));
    }
    let lambda = spec.eigenvalues[pick[0]];
    let v = &spec.eigenvectors[pick[0]];
    // Rotate the complex eigenvector so its largest component is real.
    let imax = v.icamax();
    let phase = v[imax] / v[imax].norm();
    let mut dir: Vec<f64> = v.iter().map(|z| (z / phase).re).collect();
    if let Some(g) = gauge_direction(field, from_fp) {
        let gg: f64 = g.iter().map(|a| a * a).sum();
        if gg > 0.0 {
            let proj: f64 = dir.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>() / gg;
            dir.iter_mut().zip(&g).for_each(|(a, b)| *a -= proj * b);
        }
    }
    let dn = norm(&dir);
    if dn < 1e-12 {
        return Err(Error::NoUnstableDirection("eigen-direction is parallel to the gauge direction".into()));
    }
    dir.iter_mut().for_each(|a| *a /= dn);
    let x_plus: Vec<f64> = from_fp.iter().zip(&dir).map(|(x, d)| x + opts.offset * d).collect();
    let x_minus: Vec<f64> = from_fp.iter().zip(&dir).map(|(x, d)| x - opts.offset * d).collect();
    let decreasing = field.amplitude(&x_plus) <= field.amplitude(&x_minus);
    let (x0, x_other) = if decreasing == opts.toward_origin { (x_plus, x_minus) } else { (x_minus, x_plus) };

    let (traj, class, section) = integrate_and_classify(field, &x0, direction, opts)?;
    let opposite = integrate_and_classify(field, &x_other, direction, opts).ok().map(|r| r.1);
    let diagnostics = ShootDiagnostics {
        final_distance: norm(&quotient_coordinates(field, traj.last())),
        eigenvalue: lambda,
        direction,
        t_end: traj.t_last(),
        section,
        opposite,
    };
    Ok(HeteroclinicResult { trajectory: traj, source: from_fp.to_vec(), target_class: class, offset: opts.offset, diagnostics })
}

fn integrate_and_classify(
    field: &ReducedVectorField,
    x0: &[f64],
    direction: ShootDirection,
    opts: &ShootOptions,
) -> Result<(Trajectory, OmegaLimit, Option<SectionDiagnostics>)> {
    let scale = field.a_star().max(1e-12);
    let copts = ClassifyOptions::with_scale(scale);
    let quotient = |x: &[f64]| quotient_coordinates(field, x);
    let stop = |_t: f64, x: &[f64]| -> Option<Termination> {
        let q = norm(&quotient(x));
        if !q.is_finite() || q > copts.divergence_factor * scale {
            Some(Termination::Diverged)
        } else if q < 0.1 * copts.origin_tol {
            Some(Termination::ConvergedToPoint)
        } else {
            None
        }
    };
    let iopts = IntegrateOptions { tol: opts.tol, stop: Some(&stop), ..IntegrateOptions::default() };
    let t_end = match direction {
        ShootDirection::Forward => opts.t_max,
        ShootDirection::Backward => -opts.t_max,
    };
    let traj = integrate(field, x0, 0.0, t_end, &iopts)?;
    let (class, section) = classify_omega_limit(&traj, field, &quotient, &copts)?;
    Ok((traj, class, section))
}

/// The shooting form used for a scenario: polar forms for the gauge-symmetric
/// Scenarios I, III and IV, `(A, Ã)` forms for II and V.
pub fn shooting_field(params: &ModelParams, scenario: &Scenario) -> Result<ReducedVectorField> {
    match scenario.tag {
        ScenarioTag::I => build_s1_radius(params, scenario.c.ok_or_else(|| Error::InvalidParameter("scenario I needs a speed c".into()))?),
        ScenarioTag::II => build_s2(params, scenario.c0),
        ScenarioTag::III => build_s3_polar(params, scenario.c0),
        ScenarioTag::IV => build_s4(params, scenario.c0, scenario.gamma2_0)?
            .full
            .ok_or_else(|| Error::InvalidParameter("the full Scenario IV system needs epsilon > 0".into())),
        ScenarioTag::V => build_s5(params, scenario.c0),
    }
}

/// Shoots from the invading equilibrium of the scenario's shooting field.
pub fn shoot_scenario(params: &ModelParams, scenario: &Scenario, opts: &ShootOptions) -> Result<(ReducedVectorField, HeteroclinicResult)> {
    let field = shooting_field(params, scenario)?;
    let source = field.invading.clone();
    let res = shoot_heteroclinic(&field, &source, opts)?;
    Ok((field, res))
}

/// Closed-form Scenario I front `r(ξ̃)² = a/(b + (a/r0² − b) e^{−2aξ̃})` of
/// `∂r = a r − b r³`, normalized so that `r(0) = A*/√2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct S1Heteroclinic {
    /// Linear coefficient `a = α0/(3c_u − c)`.
    pub a: f64,
    /// Cubic coefficient `b = (3 + 1/(9+4c_u²))/(3c_u − c)`.
    pub b: f64,
}

impl S1Heteroclinic {
    /// Invading amplitude `A* = √(a/b)`.
    pub fn a_star(&self) -> f64 {
        (self.a / self.b).sqrt()
    }

    /// `r(ξ̃)`.
    pub fn r(&self, xi: f64) -> f64 {
        self.a_star() / (1.0 + (-2.0 * self.a * xi).exp()).sqrt()
    }

    /// `r'(ξ̃)`.
    pub fn dr(&self, xi: f64) -> f64 {
        let r = self.r(xi);
        self.a * r - self.b * r * r * r
    }

    /// Position `ξ̃` where `r(ξ̃) = r` (for `0 < r < A*`).
    pub fn position_of(&self, r: f64) -> f64 {
        let q = (self.a_star() / r).powi(2) - 1.0;
        -q.ln() / (2.0 * self.a)
    }

    /// Limits `(r(−∞), r(+∞))`.
    pub fn limits(&self) -> (f64, f64) {
        if self.a < 0.0 {
            (self.a_star(), 0.0)
        } else {
            (0.0, self.a_star())
        }
    }
}

/// Closed-form Scenario I heteroclinic (requires `γ1 = γ2 = 0`, `c ≠ 3c_u`).
pub fn analytic_s1_heteroclinic(params: &ModelParams, c: f64) -> Result<S1Heteroclinic> {
    if params.gamma1 != 0.0 || params.gamma2 != 0.0 {
        return Err(Error::InvalidParameter("the closed-form front needs gamma1 = gamma2 = 0".into()));
    }
    let den = 3.0 * params.cu - c;
    if den == 0.0 {
        return Err(Error::DegenerateScenario("3c_u − c vanishes".into()));
    }
    let cu2 = params.cu * params.cu;
    Ok(S1Heteroclinic { a: params.alpha0 / den, b: (3.0 + 1.0 / (9.0 + 4.0 * cu2)) / den })
}

/// Translation aligning `traj` (radius in component 0) with the closed form
/// at the half-height crossing `r = A*/√2`, and the resulting sup-norm error.
///
/// Fronts are translation invariant; the alignment is made where the profile
/// is steepest because errors committed near the repelling end point only
/// shift the front.
pub fn compare_with_analytic(traj: &Trajectory, exact: &S1Heteroclinic) -> (f64, f64) {
    let target = exact.a_star() / std::f64::consts::SQRT_2;
    let g = |x: &[f64]| x[0] - target;
    let k = (1..traj.states.len()).find(|&k| g(&traj.states[k - 1]) * g(&traj.states[k]) <= 0.0);
    let shift = match k {
        Some(k) => {
            let (mut ta, mut tb) = (traj.times[k - 1], traj.times[k]);
            let ga = g(&traj.states[k - 1]);
            for _ in 0..80 {
                let tm = 0.5 * (ta + tb);
                let gm = g(&traj.at(tm).expect("inside"));
                if gm * ga > 0.0 {
                    ta = tm;
                } else {
                    tb = tm;
                }
            }
            -0.5 * (ta + tb)
        }
        None => exact.position_of(traj.states[0][0]) - traj.times[0],
    };
    let err = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, x)| (x[0] - exact.r(t + shift)).abs())
        .fold(0.0, f64::max);
    (shift, err)
}
