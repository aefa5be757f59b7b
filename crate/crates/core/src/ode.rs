//! Autonomous vector fields and an adaptive Dormand–Prince 5(4) integrator
//! with continuous (dense) output.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};

/// An autonomous vector field `x' = f(x)` on `ℝ^dim`.
pub trait VectorField {
    /// Real dimension of the state.
    fn dim(&self) -> usize;

    /// Writes `f(x)` into `out`.
    fn eval(&self, x: &[f64], out: &mut [f64]);

    /// Jacobian `Df(x)`; the default uses central differences.
    fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        fd_jacobian(self, x)
    }

    /// Convenience wrapper returning `f(x)` as a vector.
    fn rhs(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.eval(x, &mut out);
        out
    }
}

/// Central-difference Jacobian with relative step `10⁻⁶`.
pub fn fd_jacobian<F: VectorField + ?Sized>(f: &F, x: &[f64]) -> DMatrix<f64> {
    let n = f.dim();
    let mut jac = DMatrix::zeros(n, n);
    let mut xp = x.to_vec();
    let mut fp = vec![0.0; n];
    let mut fm = vec![0.0; n];
    for j in 0..n {
        let h = 1e-6 * (1.0 + x[j].abs());
        xp[j] = x[j] + h;
        f.eval(&xp, &mut fp);
        xp[j] = x[j] - h;
        f.eval(&xp, &mut fm);
        xp[j] = x[j];
        for i in 0..n {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    jac
}

/// A vector field given by a closure (and optionally an analytic Jacobian).
pub struct FnField<F, J = fn(&[f64]) -> DMatrix<f64>> {
    dim: usize,
    f: F,
    jac: Option<J>,
}

impl<F: Fn(&[f64], &mut [f64])> FnField<F> {
    /// Field without analytic Jacobian.
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f, jac: None }
    }
}

impl<F: Fn(&[f64], &mut [f64]), J: Fn(&[f64]) -> DMatrix<f64>> FnField<F, J> {
    /// Field with analytic Jacobian.
    pub fn with_jacobian(dim: usize, f: F, jac: J) -> Self {
        Self { dim, f, jac: Some(jac) }
    }
}

impl<F: Fn(&[f64], &mut [f64]), J: Fn(&[f64]) -> DMatrix<f64>> VectorField for FnField<F, J> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[f64], out: &mut [f64]) {
        (self.f)(x, out)
    }

    fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        match &self.jac {
            Some(j) => j(x),
            None => fd_jacobian(self, x),
        }
    }
}

/// Augmented field `(x, Φ)' = (f(x), Df(x) Φ)` for monodromy computations;
/// `Φ` is stored column-major after the state.
pub struct Variational<'a, F: VectorField + ?Sized> {
    field: &'a F,
}

impl<'a, F: VectorField + ?Sized> Variational<'a, F> {
    /// Wraps `field`.
    pub fn new(field: &'a F) -> Self {
        Self { field }
    }

    /// Initial augmented state `(x0, I)`.
    pub fn initial(&self, x0: &[f64]) -> Vec<f64> {
        let n = self.field.dim();
        let mut out = x0.to_vec();
        let id = DMatrix::<f64>::identity(n, n);
        out.extend(id.iter());
        out
    }

    /// Splits an augmented state into `(x, Φ)`.
    pub fn split(&self, y: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
        let n = self.field.dim();
        (y[..n].to_vec(), DMatrix::from_column_slice(n, n, &y[n..n + n * n]))
    }
}

impl<F: VectorField + ?Sized> VectorField for Variational<'_, F> {
    fn dim(&self) -> usize {
        let n = self.field.dim();
        n + n * n
    }

    fn eval(&self, y: &[f64], out: &mut [f64]) {
        let n = self.field.dim();
        self.field.eval(&y[..n], &mut out[..n]);
        let jac = self.field.jacobian(&y[..n]);
        let phi = DMatrix::from_column_slice(n, n, &y[n..n + n * n]);
        let prod = jac * phi;
        out[n..n + n * n].copy_from_slice(prod.as_slice());
    }
}

/// How an integration ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Termination {
    /// The final time was reached.
    ReachedTmax,
    /// A stop criterion detected convergence to an equilibrium.
    ConvergedToPoint,
    /// Blow-up: step-size underflow, non-finite state, or a divergence criterion.
    Diverged,
}

/// Dense-output coefficients of one accepted step.
#[derive(Debug, Clone, PartialEq)]
struct DenseStep {
    t0: f64,
    h: f64,
    r: [Vec<f64>; 5],
}

/// A computed trajectory with continuous extension.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Accepted time points (monotone in the direction of integration).
    pub times: Vec<f64>,
    /// States at `times`.
    pub states: Vec<Vec<f64>>,
    /// Why the integration stopped.
    pub termination: Termination,
    dense: Vec<DenseStep>,
}

impl Trajectory {
    /// Final state.
    pub fn last(&self) -> &[f64] {
        self.states.last().expect("trajectory has at least the initial state")
    }

    /// Final time.
    pub fn t_last(&self) -> f64 {
        *self.times.last().expect("trajectory has at least the initial time")
    }

    /// State at time `t` from the fourth-order continuous extension.
    /// Returns `None` outside the integrated interval.
    pub fn at(&self, t: f64) -> Option<Vec<f64>> {
        let (t0, t1) = (self.times[0], self.t_last());
        let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
        if t < lo || t > hi {
            return None;
        }
        if self.dense.is_empty() {
            return Some(self.states[0].clone());
        }
        let forward = t1 >= t0;
        let idx = self.dense.partition_point(|s| if forward { s.t0 + s.h < t } else { s.t0 + s.h > t });
        let step = &self.dense[idx.min(self.dense.len() - 1)];
        let theta = (t - step.t0) / step.h;
        let th1 = 1.0 - theta;
        let [r1, r2, r3, r4, r5] = &step.r;
        Some(
            (0..r1.len())
                .map(|i| r1[i] + theta * (r2[i] + th1 * (r3[i] + theta * (r4[i] + th1 * r5[i]))))
                .collect(),
        )
    }

    /// Resamples the trajectory at `n ≥ 2` equally spaced times.
    pub fn resample(&self, n: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
        let (t0, t1) = (self.times[0], self.t_last());
        let ts: Vec<f64> = (0..n).map(|k| t0 + (t1 - t0) * k as f64 / (n - 1).max(1) as f64).collect();
        let xs = ts.iter().map(|&t| self.at(t).expect("inside interval")).collect();
        (ts, xs)
    }
}

/// Stop criterion evaluated after every accepted step.
pub type StopFn<'a> = &'a dyn Fn(f64, &[f64]) -> Option<Termination>;

/// Integration controls.
#[derive(Clone, Copy)]
pub struct IntegrateOptions<'a> {
    /// Absolute and relative local error tolerance.
    pub tol: f64,
    /// Maximum number of accepted plus rejected steps.
    pub max_steps: usize,
    /// Largest allowed `|h|`.
    pub h_max: f64,
    /// Optional stop criterion.
    pub stop: Option<StopFn<'a>>,
    /// Whether to keep dense output (needed for [`Trajectory::at`]).
    pub dense: bool,
}

impl Default for IntegrateOptions<'_> {
    fn default() -> Self {
        Self { tol: 1e-10, max_steps: 5_000_000, h_max: f64::INFINITY, stop: None, dense: true }
    }
}

impl<'a> IntegrateOptions<'a> {
    /// Options with the given tolerance.
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

// Dormand–Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Integrates `x' = f(x)` from `(t0, x0)` to `t_end` (forward or backward)
/// with local error per step ≤ `tol` in a mixed absolute/relative norm.
///
/// Step-size underflow or non-finite states end the run with
/// [`Termination::Diverged`] rather than an error, so callers can classify
/// blow-up.
pub fn integrate<F: VectorField + ?Sized>(f: &F, x0: &[f64], t0: f64, t_end: f64, opts: &IntegrateOptions) -> Result<Trajectory> {
    if !(1e-14..=1e-2).contains(&opts.tol) {
        return Err(Error::InvalidParameter(format!("integrator tolerance {} outside [1e-14, 1e-2]", opts.tol)));
    }
    let n = f.dim();
    if x0.len() != n {
        return Err(Error::InvalidParameter(format!("initial state has length {}, field dimension is {n}", x0.len())));
    }
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut traj = Trajectory { times: vec![t0], states: vec![x0.to_vec()], termination: Termination::ReachedTmax, dense: Vec::new() };
    if t_end == t0 {
        return Ok(traj);
    }
    let tol = opts.tol;
    let mut t = t0;
    let mut x = x0.to_vec();
    let mut k1 = f.rhs(&x);
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut xn = vec![0.0; n];

    // Initial step from the derivative scale.
    let scale = |v: &[f64], w: &[f64]| -> f64 {
        (v.iter().zip(w).map(|(a, b)| (a / (tol + tol * b.abs())).powi(2)).sum::<f64>() / n.max(1) as f64).sqrt()
    };
    let d0 = scale(&x, &x);
    let d1 = scale(&k1, &x);
    let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h = h.min(opts.h_max).min((t_end - t0).abs());
    let mut h_abs = h;
    let mut last_err: f64 = 1e-4;

    for _ in 0..opts.max_steps {
        if (t_end - t) * dir <= 0.0 {
            return Ok(traj);
        }
        if h_abs < 1e-14 * (1.0 + t.abs()) {
            traj.termination = Termination::Diverged;
            return Ok(traj);
        }
        let last_step = h_abs >= (t_end - t).abs();
        let hs = if last_step { t_end - t } else { dir * h_abs };

        for i in 0..n {
            y[i] = x[i] + hs * A21 * k1[i];
        }
        f.eval(&y, &mut k2);
        for i in 0..n {
            y[i] = x[i] + hs * (A31 * k1[i] + A32 * k2[i]);
        }
        f.eval(&y, &mut k3);
        for i in 0..n {
            y[i] = x[i] + hs * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        f.eval(&y, &mut k4);
        for i in 0..n {
            y[i] = x[i] + hs * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        f.eval(&y, &mut k5);
        for i in 0..n {
            y[i] = x[i] + hs * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        f.eval(&y, &mut k6);
        for i in 0..n {
            xn[i] = x[i] + hs * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        f.eval(&xn, &mut k7);
        let mut err = 0.0;
        for i in 0..n {
            let e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = tol + tol * x[i].abs().max(xn[i].abs());
            err += (e / sc).powi(2);
        }
        let err = (err / n.max(1) as f64).sqrt();
        if !err.is_finite() || xn.iter().any(|v| !v.is_finite()) {
            h_abs *= 0.2;
            continue;
        }
        if err <= 1.0 {
            if opts.dense {
                let r1 = x.clone();
                let r2: Vec<f64> = (0..n).map(|i| xn[i] - x[i]).collect();
                let r3: Vec<f64> = (0..n).map(|i| hs * k1[i] - r2[i]).collect();
                let r4: Vec<f64> = (0..n).map(|i| r2[i] - hs * k7[i] - r3[i]).collect();
                let r5: Vec<f64> = (0..n)
                    .map(|i| hs * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]))
                    .collect();
                traj.dense.push(DenseStep { t0: t, h: hs, r: [r1, r2, r3, r4, r5] });
            }
            t = if last_step { t_end } else { t + hs };
            std::mem::swap(&mut x, &mut xn);
            std::mem::swap(&mut k1, &mut k7);
            traj.times.push(t);
            traj.states.push(x.clone());
            if let Some(stop) = opts.stop {
                if let Some(term) = stop(t, &x) {
                    traj.termination = term;
                    return Ok(traj);
                }
            }
            // PI step-size control.
            let fac = 0.9 * err.max(1e-10).powf(-0.7 / 5.0) * last_err.powf(0.4 / 5.0);
            last_err = err.max(1e-4);
            h_abs = (h_abs * fac.clamp(0.2, 10.0)).min(opts.h_max);
        } else {
            let fac = 0.9 * err.powf(-0.2);
            h_abs *= fac.clamp(0.2, 1.0);
        }
    }
    Err(Error::NoConvergence(format!("integrator exceeded {} steps at t = {t}", opts.max_steps)))
}

/// Flow map: the state reached from `x0` after time `t`.
pub fn flow<F: VectorField + ?Sized>(f: &F, x0: &[f64], t: f64, tol: f64) -> Result<Vec<f64>> {
    let opts = IntegrateOptions { tol, dense: false, ..IntegrateOptions::default() };
    let traj = integrate(f, x0, 0.0, t, &opts)?;
    if traj.termination == Termination::Diverged {
        return Err(Error::StepUnderflow(traj.t_last()));
    }
    Ok(traj.last().to_vec())
}
