//! Pseudo-spectral simulation of the full system on a periodic domain:
//! exponential time differencing (ETDRK4, contour-integral coefficients) with
//! 2/3 dealiasing, envelope/phase measurements, and a front-validation run.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::dynamics::{shoot_scenario, ShootOptions};
use crate::error::{Error, Result};
use crate::front::HeteroclinicData;
use crate::model::{dispersion, ModelParams, Scenario};
use crate::reduced::{second_harmonics, slaved_b};
use crate::wave::invading_state;

type C64 = Complex64;

/// Default time step.
pub const DEFAULT_DT: f64 = 0.01;
/// Number of contour points for the ETDRK4 coefficients.
const CONTOUR_POINTS: usize = 32;

/// Fields on a periodic grid `x_j = jL/N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PdeState {
    /// Domain length (a multiple of 2π).
    #[serde(rename = "L")]
    pub l: f64,
    /// Number of grid points (power of two).
    #[serde(rename = "N")]
    pub n: usize,
    /// `u(x_j)`.
    pub u: Vec<f64>,
    /// `v(x_j)`.
    pub v: Vec<f64>,
    /// Time.
    pub t: f64,
}

impl PdeState {
    /// Zero fields.
    pub fn zeros(n: usize, l: f64) -> Self {
        Self { l, n, u: vec![0.0; n], v: vec![0.0; n], t: 0.0 }
    }

    /// Grid points.
    pub fn x(&self) -> Vec<f64> {
        (0..self.n).map(|j| j as f64 * self.l / self.n as f64).collect()
    }

    /// Spatial mean of `v`.
    pub fn mean_v(&self) -> f64 {
        self.v.iter().sum::<f64>() / self.n as f64
    }

    fn check(&self) -> Result<()> {
        if !self.n.is_power_of_two() || self.n < 8 {
            return Err(Error::InvalidParameter(format!("N = {} must be a power of two ≥ 8", self.n)));
        }
        if self.u.len() != self.n || self.v.len() != self.n {
            return Err(Error::GridMismatch(format!("fields of length {}/{} on {} points", self.u.len(), self.v.len(), self.n)));
        }
        let periods = self.l / (2.0 * PI);
        if !(self.l > 0.0) || (periods - periods.round()).abs() > 1e-9 * periods.max(1.0) {
            return Err(Error::InvalidParameter(format!("L = {} is not a multiple of 2π", self.l)));
        }
        Ok(())
    }
}

struct Fourier {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch: Vec<C64>,
}

impl Fourier {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        Self { fwd, inv, scratch: vec![C64::new(0.0, 0.0); len] }
    }

    fn forward(&mut self, data: &mut [C64]) {
        self.fwd.process_with_scratch(data, &mut self.scratch);
    }

    fn inverse(&mut self, data: &mut [C64]) {
        self.inv.process_with_scratch(data, &mut self.scratch);
        let s = 1.0 / data.len() as f64;
        data.iter_mut().for_each(|z| *z *= s);
    }

    fn to_spectral(&mut self, real: &[f64]) -> Vec<C64> {
        let mut d: Vec<C64> = real.iter().map(|&a| C64::new(a, 0.0)).collect();
        self.forward(&mut d);
        d
    }

    fn to_physical(&mut self, spec: &[C64]) -> Vec<f64> {
        let mut d = spec.to_vec();
        self.inverse(&mut d);
        d.iter().map(|z| z.re).collect()
    }
}

/// Angular wavenumbers in FFT order.
fn wavenumbers(n: usize, l: f64) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let m = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
            if j == n / 2 {
                // Nyquist mode: set to zero for odd derivatives, it is dealiased anyway.
                0.0
            } else {
                2.0 * PI * m / l
            }
        })
        .collect()
}

/// ETDRK4 coefficients for one diagonal linear operator.
#[derive(Clone)]
struct EtdCoefficients {
    e: Vec<C64>,
    e2: Vec<C64>,
    q: Vec<C64>,
    f1: Vec<C64>,
    f2: Vec<C64>,
    f3: Vec<C64>,
}

impl EtdCoefficients {
    /// Contour-integral evaluation (full circle of radius 1 around `h·L`),
    /// stable for `|hL| → 0`.
    fn new(lin: &[C64], h: f64) -> Self {
        let roots: Vec<C64> = (1..=CONTOUR_POINTS)
            .map(|j| C64::from_polar(1.0, 2.0 * PI * (j as f64 - 0.5) / CONTOUR_POINTS as f64))
            .collect();
        let m = CONTOUR_POINTS as f64;
        let n = lin.len();
        let mut c = Self {
            e: Vec::with_capacity(n),
            e2: Vec::with_capacity(n),
            q: Vec::with_capacity(n),
            f1: Vec::with_capacity(n),
            f2: Vec::with_capacity(n),
            f3: Vec::with_capacity(n),
        };
        for &l in lin {
            let hl = l * h;
            c.e.push(hl.exp());
            c.e2.push((hl * 0.5).exp());
            let (mut q, mut f1, mut f2, mut f3) = (C64::default(), C64::default(), C64::default(), C64::default());
            for &r in &roots {
                let z = hl + r;
                let ez = z.exp();
                let z3 = z * z * z;
                q += ((z * 0.5).exp() - 1.0) / z;
                f1 += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
                f2 += (2.0 + z + ez * (z - 2.0)) / z3;
                f3 += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
            }
            c.q.push(h * q / m);
            c.f1.push(h * f1 / m);
            c.f2.push(h * f2 / m);
            c.f3.push(h * f3 / m);
        }
        c
    }
}

/// ETDRK4 integrator for the full system with precomputed coefficients.
pub struct Stepper {
    params: ModelParams,
    n: usize,
    l: f64,
    dt: f64,
    k: Vec<f64>,
    dealias: Vec<bool>,
    cu: EtdCoefficients,
    cv: EtdCoefficients,
    fft: Fourier,
}

impl Stepper {
    /// Linear operators `−(1−k²)² + ε²α0 − i c_u k³` and `−k² + i c_v k`
    /// (symbols of `c_u∂³ₓ` and `c_v∂ₓ`); 2/3-rule dealiasing mask.
    pub fn new(params: &ModelParams, n: usize, l: f64, dt: f64) -> Result<Self> {
        params.validate()?;
        PdeState::zeros(n, l).check()?;
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParameter(format!("dt = {dt} must be positive")));
        }
        let k = wavenumbers(n, l);
        let eps2 = params.epsilon * params.epsilon;
        let lin_u: Vec<C64> = k
            .iter()
            .map(|&k| C64::new(-(1.0 - k * k).powi(2) + eps2 * params.alpha0, -params.cu * k * k * k))
            .collect();
        let lin_v: Vec<C64> = k.iter().map(|&k| C64::new(-k * k, params.cv * k)).collect();
        let kmax = k.iter().fold(0.0_f64, |m, &k| m.max(k.abs()));
        let dealias = k.iter().enumerate().map(|(j, &k)| j != n / 2 && k.abs() < 2.0 / 3.0 * kmax).collect();
        Ok(Self {
            params: *params,
            n,
            l,
            dt,
            cu: EtdCoefficients::new(&lin_u, dt),
            cv: EtdCoefficients::new(&lin_v, dt),
            k,
            dealias,
            fft: Fourier::new(n),
        })
    }

    /// Time step.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Nonlinear terms in Fourier space:
    /// `N_u = F(uv − u³) + ½ik F(u²)`, `N_v = (−γ1k² + iγ2k) F(u²)`.
    fn nonlinear(&mut self, uh: &[C64], vh: &[C64]) -> (Vec<C64>, Vec<C64>) {
        let u = self.fft.to_physical(uh);
        let v = self.fft.to_physical(vh);
        let mut a: Vec<C64> = u.iter().zip(&v).map(|(&u, &v)| C64::new(u * v - u * u * u, 0.0)).collect();
        let mut u2: Vec<C64> = u.iter().map(|&u| C64::new(u * u, 0.0)).collect();
        self.fft.forward(&mut a);
        self.fft.forward(&mut u2);
        let (g1, g2) = (self.params.gamma1, self.params.gamma2);
        let mut nu = Vec::with_capacity(self.n);
        let mut nv = Vec::with_capacity(self.n);
        for j in 0..self.n {
            if self.dealias[j] {
                let k = self.k[j];
                nu.push(a[j] + C64::new(0.0, 0.5 * k) * u2[j]);
                nv.push(C64::new(-g1 * k * k, g2 * k) * u2[j]);
            } else {
                nu.push(C64::default());
                nv.push(C64::default());
            }
        }
        (nu, nv)
    }

    /// One ETDRK4 step on spectral data.
    pub fn step_spectral(&mut self, uh: &mut [C64], vh: &mut [C64]) {
        let n = self.n;
        let (nu, nv) = self.nonlinear(uh, vh);
        let au: Vec<C64> = (0..n).map(|j| self.cu.e2[j] * uh[j] + self.cu.q[j] * nu[j]).collect();
        let av: Vec<C64> = (0..n).map(|j| self.cv.e2[j] * vh[j] + self.cv.q[j] * nv[j]).collect();
        let (nau, nav) = self.nonlinear(&au, &av);
        let bu: Vec<C64> = (0..n).map(|j| self.cu.e2[j] * uh[j] + self.cu.q[j] * nau[j]).collect();
        let bv: Vec<C64> = (0..n).map(|j| self.cv.e2[j] * vh[j] + self.cv.q[j] * nav[j]).collect();
        let (nbu, nbv) = self.nonlinear(&bu, &bv);
        let cu: Vec<C64> = (0..n).map(|j| self.cu.e2[j] * au[j] + self.cu.q[j] * (2.0 * nbu[j] - nu[j])).collect();
        let cv: Vec<C64> = (0..n).map(|j| self.cv.e2[j] * av[j] + self.cv.q[j] * (2.0 * nbv[j] - nv[j])).collect();
        let (ncu, ncv) = self.nonlinear(&cu, &cv);
        for j in 0..n {
            let c = &self.cu;
            uh[j] = c.e[j] * uh[j] + c.f1[j] * nu[j] + 2.0 * c.f2[j] * (nau[j] + nbu[j]) + c.f3[j] * ncu[j];
            let c = &self.cv;
            vh[j] = c.e[j] * vh[j] + c.f1[j] * nv[j] + 2.0 * c.f2[j] * (nav[j] + nbv[j]) + c.f3[j] * ncv[j];
        }
    }

    /// Advances `state` by `steps` steps (`NaNDetected` on blow-up).
    pub fn advance(&mut self, state: &mut PdeState, steps: usize) -> Result<()> {
        state.check()?;
        if state.n != self.n || (state.l - self.l).abs() > 1e-12 * self.l {
            return Err(Error::GridMismatch("state grid differs from the stepper grid".into()));
        }
        let mut uh = self.fft.to_spectral(&state.u);
        let mut vh = self.fft.to_spectral(&state.v);
        for s in 0..steps {
            self.step_spectral(&mut uh, &mut vh);
            if s % 64 == 63 || s + 1 == steps {
                if uh.iter().chain(vh.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(Error::NaNDetected(state.t + (s + 1) as f64 * self.dt));
                }
            }
        }
        state.u = self.fft.to_physical(&uh);
        state.v = self.fft.to_physical(&vh);
        state.t += steps as f64 * self.dt;
        Ok(())
    }

    /// Band-passed (`0.5 < k < 1.5`) complex field `z` with `u ≈ 2 Re z` near
    /// the carrier `k = 1`.
    pub fn demodulate(&mut self, u: &[f64]) -> Vec<C64> {
        demodulate_with(&mut self.fft, &self.k, u)
    }
}

fn demodulate_with(fft: &mut Fourier, k: &[f64], u: &[f64]) -> Vec<C64> {
    let mut d = fft.to_spectral(u);
    for (j, z) in d.iter_mut().enumerate() {
        if !(k[j] > 0.5 && k[j] < 1.5) {
            *z = C64::default();
        }
    }
    fft.inverse(&mut d);
    d
}

/// One ETDRK4 step of size `dt` (convenience wrapper building a fresh stepper).
pub fn step(state: &PdeState, dt: f64, params: &ModelParams) -> Result<PdeState> {
    let mut s = state.clone();
    Stepper::new(params, state.n, state.l, dt)?.advance(&mut s, 1)?;
    Ok(s)
}

/// Which edge of the pattern is tracked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FrontEdge {
    /// Pattern on the left, rest state on the right.
    Right,
    /// Pattern on the right, rest state on the left.
    Left,
}

/// Measurement windows (positions in `[0, L)`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrontProbe {
    /// Window where the plateau amplitude is taken (median of the envelope).
    pub plateau: (f64, f64),
    /// Window searched for the half-plateau crossing.
    pub search: (f64, f64),
    /// Position where the carrier phase is tracked.
    pub phase_at: f64,
    /// Edge tracked.
    pub edge: FrontEdge,
}

impl FrontProbe {
    /// Windows for a right-facing front initially at `x0`: plateau in
    /// `[x0−350, x0−250]`, crossing search in `[x0−300, x0+600]`, phase at `x0`.
    pub fn around(x0: f64) -> Self {
        Self { plateau: (x0 - 350.0, x0 - 250.0), search: (x0 - 300.0, x0 + 600.0), phase_at: x0, edge: FrontEdge::Right }
    }
}

/// Envelope observables of one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Observation {
    /// Time.
    pub t: f64,
    /// Position of the half-plateau crossing.
    pub front_position: f64,
    /// Plateau amplitude of the envelope `2|z|`.
    pub plateau: f64,
    /// Carrier phase `arg(z e^{−ix})` at the probe (wrapped).
    pub phase: f64,
    /// Spatial mean of `v`.
    pub mean_v: f64,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn observe_with(fft: &mut Fourier, k: &[f64], state: &PdeState, probe: &FrontProbe) -> Result<Observation> {
    let x = state.x();
    let z = demodulate_with(fft, k, &state.u);
    let env: Vec<f64> = z.iter().map(|z| 2.0 * z.norm()).collect();
    let inside = |a: f64, (lo, hi): (f64, f64)| a >= lo && a <= hi;
    let plat: Vec<f64> = (0..state.n).filter(|&j| inside(x[j], probe.plateau)).map(|j| env[j]).collect();
    if plat.is_empty() {
        return Err(Error::NoFrontDetected("plateau window contains no grid points".into()));
    }
    let plateau = median(plat);
    if !(plateau > 1e-10) {
        return Err(Error::NoFrontDetected(format!("plateau amplitude {plateau:.3e} is zero")));
    }
    let half = 0.5 * plateau;
    let idx: Vec<usize> = (0..state.n).filter(|&j| inside(x[j], probe.search)).collect();
    if idx.len() < 2 {
        return Err(Error::NoFrontDetected("search window contains no grid points".into()));
    }
    let above: Vec<bool> = idx.iter().map(|&j| env[j] > half).collect();
    if above.iter().all(|&a| a) {
        return Err(Error::NoFrontDetected("pattern fills the search window".into()));
    }
    let pos = match probe.edge {
        FrontEdge::Right => {
            let m = above.iter().rposition(|&a| a).ok_or_else(|| Error::NoFrontDetected("no pattern in the search window".into()))?;
            let (j, j1) = (idx[m], idx[(m + 1).min(idx.len() - 1)]);
            if j == j1 {
                return Err(Error::NoFrontDetected("crossing at the edge of the search window".into()));
            }
            x[j] + (env[j] - half) / (env[j] - env[j1]) * (x[j1] - x[j])
        }
        FrontEdge::Left => {
            let m = above.iter().position(|&a| a).ok_or_else(|| Error::NoFrontDetected("no pattern in the search window".into()))?;
            if m == 0 {
                return Err(Error::NoFrontDetected("crossing at the edge of the search window".into()));
            }
            let (j0, j) = (idx[m - 1], idx[m]);
            x[j0] + (half - env[j0]) / (env[j] - env[j0]) * (x[j] - x[j0])
        }
    };
    let jp = ((probe.phase_at / state.l * state.n as f64).round() as usize) % state.n;
    let phase = (z[jp] * C64::from_polar(1.0, -x[jp])).arg();
    Ok(Observation { t: state.t, front_position: pos, plateau, phase, mean_v: state.mean_v() })
}

/// Envelope observables of a state.
pub fn observe(state: &PdeState, probe: &FrontProbe) -> Result<Observation> {
    state.check()?;
    let mut fft = Fourier::new(state.n);
    observe_with(&mut fft, &wavenumbers(state.n, state.l), state, probe)
}

fn slope(t: &[f64], y: &[f64]) -> f64 {
    let n = t.len() as f64;
    let mt = t.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = t.iter().zip(y).map(|(a, b)| (a - mt) * (b - my)).sum();
    let sxx: f64 = t.iter().map(|a| (a - mt) * (a - mt)).sum();
    sxy / sxx
}

fn observe_history(history: &[PdeState], probe: &FrontProbe) -> Result<Vec<Observation>> {
    if history.len() < 2 {
        return Err(Error::InvalidParameter("history needs at least two states".into()));
    }
    let first = &history[0];
    first.check()?;
    let mut fft = Fourier::new(first.n);
    let k = wavenumbers(first.n, first.l);
    history.iter().map(|s| observe_with(&mut fft, &k, s, probe)).collect()
}

/// Front speed: slope of the half-plateau crossing position over time.
pub fn measure_front_speed(history: &[PdeState], probe: &FrontProbe) -> Result<f64> {
    let obs = observe_history(history, probe)?;
    Ok(front_speed_of(&obs))
}

/// Phase speed `c_p = −d/dt arg(z e^{−ix})` at the probe (unwrapped).
pub fn measure_phase_speed(history: &[PdeState], probe: &FrontProbe) -> Result<f64> {
    let obs = observe_history(history, probe).map_err(|e| match e {
        Error::NoFrontDetected(m) => Error::NoPattern(m),
        other => other,
    })?;
    phase_speed_of(&obs)
}

fn front_speed_of(obs: &[Observation]) -> f64 {
    let t: Vec<f64> = obs.iter().map(|o| o.t).collect();
    let x: Vec<f64> = obs.iter().map(|o| o.front_position).collect();
    slope(&t, &x)
}

fn phase_speed_of(obs: &[Observation]) -> Result<f64> {
    if obs.iter().any(|o| !o.phase.is_finite()) {
        return Err(Error::NoPattern("undefined carrier phase".into()));
    }
    let t: Vec<f64> = obs.iter().map(|o| o.t).collect();
    let mut ph = Vec::with_capacity(obs.len());
    let mut offset = 0.0;
    for (i, o) in obs.iter().enumerate() {
        if i > 0 {
            let d = o.phase - obs[i - 1].phase;
            offset -= 2.0 * PI * (d / (2.0 * PI)).round();
        }
        ph.push(o.phase + offset);
    }
    Ok(-slope(&t, &ph))
}

/// Phase speed from a pattern-only history (no front): tracks
/// `arg(z e^{−ix})` at `x_probe`.
pub fn measure_pattern_phase_speed(history: &[PdeState], x_probe: f64) -> Result<f64> {
    if history.len() < 2 {
        return Err(Error::InvalidParameter("history needs at least two states".into()));
    }
    let first = &history[0];
    first.check()?;
    let mut fft = Fourier::new(first.n);
    let k = wavenumbers(first.n, first.l);
    let obs: Result<Vec<Observation>> = history
        .iter()
        .map(|s| {
            let z = demodulate_with(&mut fft, &k, &s.u);
            let jp = ((x_probe / s.l * s.n as f64).round() as usize) % s.n;
            let xj = jp as f64 * s.l / s.n as f64;
            if z[jp].norm() < 1e-12 {
                return Err(Error::NoPattern(format!("no carrier at x = {x_probe}")));
            }
            Ok(Observation { t: s.t, front_position: f64::NAN, plateau: 2.0 * z[jp].norm(), phase: (z[jp] * C64::from_polar(1.0, -xj)).arg(), mean_v: s.mean_v() })
        })
        .collect();
    phase_speed_of(&obs?)
}

/// Configuration of a front-validation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrontRun {
    /// Grid points.
    #[serde(rename = "N")]
    pub n: usize,
    /// Domain length.
    #[serde(rename = "L")]
    pub l: f64,
    /// Time step.
    pub dt: f64,
    /// Final time.
    pub t_end: f64,
    /// Observation interval.
    pub sample_every: f64,
    /// Length of the fitting window at the end of the run.
    pub fit_window: f64,
    /// Initial front position as a fraction of `L`.
    pub front_fraction: f64,
    /// Window (left edge as fraction of `L`, right edge offset past the front, tanh width).
    pub window: (f64, f64, f64),
}

impl Default for FrontRun {
    fn default() -> Self {
        Self {
            n: 2048,
            l: 2.0 * PI * 195.0,
            dt: 0.02,
            t_end: 100.0,
            sample_every: 1.0,
            fit_window: 60.0,
            front_fraction: 0.35,
            window: (0.02, 520.0, 15.0),
        }
    }
}

/// Report of a front-validation run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontValidation {
    /// Run configuration.
    pub run: FrontRun,
    /// Constructed front speed `c`.
    pub c: f64,
    /// Predicted phase speed `c_u + ε² ω0`.
    pub cp_predicted: f64,
    /// Measured front speed.
    pub front_speed: f64,
    /// Measured phase speed.
    pub phase_speed: f64,
    /// Predicted plateau `2εA*`.
    pub plateau_predicted: f64,
    /// Final measured plateau.
    pub plateau: f64,
    /// `max |mean v(t) − mean v(0)|`.
    pub mean_v_drift: f64,
    /// Observations.
    pub observations: Vec<Observation>,
}

/// Initial data `u = 2ε Re(A e^{ix}) + 2ε² Re(h_u A² e^{2ix})`,
/// `v = ε²(B + 2Re(h_v A² e^{2ix}))` with `A(x) = W(x)·A_het(ε²(x − x0))`
/// from a Scenario I shooting (centered so that `|A| = A*/√2` at `x0`) and a
/// smooth tanh window `W` that makes the data periodic.
pub fn front_initial_data(params: &ModelParams, c: f64, run: &FrontRun) -> Result<PdeState> {
    let scenario = Scenario::one(c);
    let (field, shot) = shoot_scenario(params, &scenario, &ShootOptions::default())?;
    let data = HeteroclinicData::from_shooting(&field, &shot, 8001)?;
    let a_star = field.a_star();
    // Center the orbit at the half-amplitude point.
    let target = a_star / std::f64::consts::SQRT_2;
    let kc = (1..data.s.len())
        .find(|&k| (data.a[k - 1].norm() - target) * (data.a[k].norm() - target) <= 0.0)
        .ok_or_else(|| Error::NoFrontDetected("orbit never crosses half amplitude".into()))?;
    let (r0, r1) = (data.a[kc - 1].norm(), data.a[kc].norm());
    let s_half = data.s[kc - 1] + (target - r0) / (r1 - r0) * (data.s[kc] - data.s[kc - 1]);
    let data = data.shifted(-s_half);

    let mut state = PdeState::zeros(run.n, run.l);
    state.check()?;
    let eps = params.epsilon;
    let x0 = run.front_fraction * run.l;
    let (wl, wr, ww) = (run.window.0 * run.l, x0 + run.window.1, run.window.2);
    let slaved = slaved_b(crate::model::ScenarioTag::I, params, c)?;
    for (j, x) in state.x().into_iter().enumerate() {
        let w = 0.5 * (((x - wl) / ww).tanh() - ((x - wr) / ww).tanh());
        let (a, _) = data.at(eps * eps * (x - x0));
        let a = a * w;
        let h = second_harmonics(params, a);
        let e1 = C64::from_polar(1.0, x);
        state.u[j] = 2.0 * eps * (a * e1).re + 2.0 * eps * eps * (h.hu2 * e1 * e1).re;
        state.v[j] = eps * eps * (slaved.b_of(a.norm_sqr()) + 2.0 * (h.hv2 * e1 * e1).re);
    }
    Ok(state)
}

/// Runs the front validation: evolves Scenario I front data and measures
/// the front speed, the phase speed and the drift of `mean(v)`.
pub fn validate_front(params: &ModelParams, c: f64, run: &FrontRun) -> Result<FrontValidation> {
    let mut state = front_initial_data(params, c, run)?;
    let x0 = run.front_fraction * run.l;
    let probe = FrontProbe::around(x0);
    let mut stepper = Stepper::new(params, run.n, run.l, run.dt)?;
    let per_sample = (run.sample_every / run.dt).round().max(1.0) as usize;
    let n_samples = (run.t_end / (per_sample as f64 * run.dt)).round() as usize;
    let mean0 = state.mean_v();
    let mut fft = Fourier::new(run.n);
    let k = wavenumbers(run.n, run.l);
    let mut observations = vec![observe_with(&mut fft, &k, &state, &probe)?];
    let mut drift: f64 = 0.0;
    for _ in 0..n_samples {
        stepper.advance(&mut state, per_sample)?;
        drift = drift.max((state.mean_v() - mean0).abs());
        observations.push(observe_with(&mut fft, &k, &state, &probe)?);
    }
    let t_end = state.t;
    let fit: Vec<Observation> = observations.iter().copied().filter(|o| o.t >= t_end - run.fit_window - 1e-9).collect();
    let s1 = crate::reduced::build_s1(params, c)?;
    let (a_star, _) = invading_state(params.alpha0, s1.coeffs.k_eff)?;
    Ok(FrontValidation {
        run: *run,
        c,
        cp_predicted: params.cu + params.epsilon * params.epsilon * s1.coeffs.omega0,
        front_speed: front_speed_of(&fit),
        phase_speed: phase_speed_of(&fit)?,
        plateau_predicted: 2.0 * params.epsilon * a_star,
        plateau: observations.last().map_or(f64::NAN, |o| o.plateau),
        mean_v_drift: drift,
        observations,
    })
}

/// Growth factor of a single Fourier mode under the linear dispersion.
pub fn linear_growth_factor(params: &ModelParams, k: f64, dt: f64) -> C64 {
    // The solver uses the symbol of c_u∂³ₓ, i.e. −i c_u k³, for e^{ikx}.
    let d = dispersion(params, k);
    (C64::new(d.lambda_u.re, -d.lambda_u.im) * dt).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ModelParams {
        ModelParams { alpha0: 1.0, cu: 1.0, cv: 0.3, gamma1: 0.1, gamma2: 0.2, epsilon: 0.1, b: 0.0 }
    }

    #[test]
    fn zero_state_stays_zero() {
        let s = PdeState::zeros(64, 2.0 * PI * 4.0);
        let out = step(&s, 0.01, &base()).unwrap();
        assert!(out.u.iter().chain(&out.v).all(|&a| a == 0.0));
    }

    #[test]
    fn linear_mode_growth() {
        let p = base();
        let l = 2.0 * PI * 4.0;
        let mut s = PdeState::zeros(64, l);
        let x = s.x();
        let kk = 1.25;
        s.u = x.iter().map(|&x| 1e-9 * (kk * x).cos()).collect();
        let out = step(&s, 0.05, &p).unwrap();
        let mut fft = Fourier::new(64);
        let h0 = fft.to_spectral(&s.u);
        let h1 = fft.to_spectral(&out.u);
        let j = 5; // k = 2π·5/L = 1.25
        let g = h1[j] / h0[j];
        let expected = linear_growth_factor(&p, kk, 0.05);
        assert!((g - expected).norm() < 1e-8, "{g} vs {expected}");
    }

    #[test]
    fn mean_v_conserved() {
        let p = base();
        let l = 2.0 * PI * 8.0;
        let mut s = PdeState::zeros(128, l);
        let x = s.x();
        s.u = x.iter().map(|&x| 0.2 * x.cos() + 0.05 * (0.25 * x).sin()).collect();
        s.v = x.iter().map(|&x| 0.03 + 0.01 * (0.5 * x).cos()).collect();
        let m0 = s.mean_v();
        let mut st = Stepper::new(&p, 128, l, 0.01).unwrap();
        st.advance(&mut s, 10_000).unwrap();
        assert!((s.mean_v() - m0).abs() < 1e-10);
    }

    #[test]
    fn blow_up_reported() {
        let p = ModelParams { alpha0: 1.0, cu: 0.5, cv: 0.0, gamma1: 0.0, gamma2: 0.0, epsilon: 0.1, b: 0.0 };
        let mut s = PdeState::zeros(32, 2.0 * PI);
        s.u = vec![1e200; 32];
        let mut st = Stepper::new(&p, 32, 2.0 * PI, 0.1).unwrap();
        assert!(matches!(st.advance(&mut s, 64), Err(Error::NaNDetected(_))));
    }

    #[test]
    fn invalid_grids_rejected() {
        assert!(Stepper::new(&base(), 100, 2.0 * PI, 0.01).is_err());
        assert!(Stepper::new(&base(), 64, 7.0, 0.01).is_err());
    }

    fn manufactured(speed: f64, t: f64, n: usize, l: f64) -> PdeState {
        let mut s = PdeState::zeros(n, l);
        let x = s.x();
        s.u = x.iter().map(|&x| 0.1 * 0.5 * (1.0 - ((x - 300.0 - speed * t) / 20.0).tanh()) * (x - 0.2 * t).cos()).collect();
        s.t = t;
        s
    }

    #[test]
    fn manufactured_translation_speed() {
        let (n, l) = (2048, 2.0 * PI * 160.0);
        let hist: Vec<PdeState> = (0..=40).map(|i| manufactured(0.7, i as f64 * 2.0, n, l)).collect();
        let probe = FrontProbe { plateau: (60.0, 160.0), search: (100.0, 800.0), phase_at: 150.0, edge: FrontEdge::Right };
        let s = measure_front_speed(&hist, &probe).unwrap();
        assert!((s - 0.7).abs() < 1e-3, "{s}");
        let cp = measure_phase_speed(&hist, &probe).unwrap();
        assert!((cp - 0.2).abs() < 1e-6, "{cp}");
    }

    #[test]
    fn filling_pattern_has_no_front() {
        let (n, l) = (512, 2.0 * PI * 40.0);
        let mut s = PdeState::zeros(n, l);
        s.u = s.x().iter().map(|&x| 0.1 * x.cos()).collect();
        let probe = FrontProbe { plateau: (10.0, 50.0), search: (20.0, 200.0), phase_at: 30.0, edge: FrontEdge::Right };
        assert!(matches!(observe(&s, &probe), Err(Error::NoFrontDetected(_))));
        let z = PdeState::zeros(n, l);
        assert!(matches!(measure_phase_speed(&[z.clone(), z], &probe), Err(Error::NoPattern(_))));
    }

    #[test]
    fn wave_train_phase_speed_and_parity() {
        // Commensurate domain carrying the wave train; c_p = c_u + ε²ω0*.
        let p = ModelParams { alpha0: 1.0, cu: 1.0, cv: 0.0, gamma1: 0.0, gamma2: 0.0, epsilon: 0.1, b: 0.0 };
        let mut speeds = Vec::new();
        for cu in [1.0, -1.0] {
            let pp = ModelParams { cu, ..p };
            let w = crate::wave::leading_order(&pp).unwrap();
            let l = 2.0 * PI * 8.0;
            let mut s = PdeState::zeros(256, l);
            let samples = crate::wave::wave_profile(&w, &s.x());
            s.u = samples.iter().map(|q| q.u).collect();
            s.v = samples.iter().map(|q| q.v).collect();
            let mut st = Stepper::new(&pp, 256, l, 0.01).unwrap();
            let mut hist = Vec::new();
            for _ in 0..=30 {
                hist.push(s.clone());
                st.advance(&mut s, 100).unwrap();
            }
            let cp = measure_pattern_phase_speed(&hist[10..], 3.0).unwrap();
            let predicted = cu + 0.01 * w.omega0_star;
            assert!((cp - predicted).abs() < 1e-3, "cu = {cu}: {cp} vs {predicted}");
            speeds.push(cp);
        }
        assert!(speeds[0] > 0.0 && speeds[1] < 0.0);
    }
}
