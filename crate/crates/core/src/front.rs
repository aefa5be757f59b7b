//! Modulating-front profiles `(ξ, p) ↦ (u, v)` assembled from heteroclinic
//! orbits of the reduced systems, and physical-space snapshots
//! `u(t, x) = U(x − ct, x − c_p t)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::{HeteroclinicResult, ShootDirection};
use crate::error::{Error, Result};
use crate::model::{ModelParams, ScenarioTag};
use crate::reduced::{second_harmonics, slaved_b, Form, ReducedVectorField};

type C64 = Complex64;

/// Default number of points of the `p` grid.
pub const DEFAULT_P_POINTS: usize = 64;

/// A heteroclinic orbit expressed as `(A(s), B₁(s))` on a uniform grid of the
/// reduced spatial variable `s` (increasing).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeteroclinicData {
    /// Scenario the orbit belongs to.
    pub scenario: ScenarioTag,
    /// Uniform grid of the reduced variable.
    pub s: Vec<f64>,
    /// Complex amplitude on the grid.
    pub a: Vec<C64>,
    /// Dynamic conserved mode `B₁` (Scenarios III–V).
    pub b1: Option<Vec<f64>>,
}

impl HeteroclinicData {
    /// Checks grid consistency (`GridMismatch`).
    pub fn validate(&self) -> Result<()> {
        if self.s.len() < 2 || self.a.len() != self.s.len() {
            return Err(Error::GridMismatch(format!("{} grid points vs {} amplitudes", self.s.len(), self.a.len())));
        }
        if let Some(b) = &self.b1 {
            if b.len() != self.s.len() {
                return Err(Error::GridMismatch(format!("{} grid points vs {} B1 values", self.s.len(), b.len())));
            }
        } else if matches!(self.scenario, ScenarioTag::III | ScenarioTag::IV | ScenarioTag::V) {
            return Err(Error::GridMismatch(format!("scenario {} requires B1 data", self.scenario)));
        }
        if self.s.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::GridMismatch("reduced grid must be strictly increasing".into()));
        }
        Ok(())
    }

    /// Linear interpolation of `(A, B₁)` at `s` (clamped to the grid ends).
    pub fn at(&self, s: f64) -> (C64, f64) {
        let n = self.s.len();
        let k = self.s.partition_point(|&x| x <= s).clamp(1, n - 1);
        let (s0, s1) = (self.s[k - 1], self.s[k]);
        let w = ((s - s0) / (s1 - s0)).clamp(0.0, 1.0);
        let a = self.a[k - 1] * (1.0 - w) + self.a[k] * w;
        let b = self.b1.as_ref().map_or(0.0, |b| b[k - 1] * (1.0 - w) + b[k] * w);
        (a, b)
    }

    /// Shifts the orbit by `s0` (`A(s) ↦ A(s − s0)`).
    pub fn shifted(&self, s0: f64) -> Self {
        Self { s: self.s.iter().map(|s| s + s0).collect(), ..self.clone() }
    }

    /// Resamples a shooting result on `n` uniform points.
    ///
    /// Polar forms carry the phase implicitly; it is recovered by integrating
    /// `∂φ = Im(linear) + Im(coupling)·B₁ + Im(cubic)·r²` from the source
    /// end, where the phase is set to zero.
    pub fn from_shooting(field: &ReducedVectorField, shot: &HeteroclinicResult, n: usize) -> Result<Self> {
        let traj = &shot.trajectory;
        let n = n.max(2);
        let (t0, t1) = (traj.times[0], traj.t_last());
        let (lo, hi) = (t0.min(t1), t0.max(t1));
        let s: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
        let states: Vec<Vec<f64>> = s.iter().map(|&t| traj.at(t).unwrap_or_else(|| traj.last().to_vec())).collect();
        let k = &field.coeffs;
        let polar_phase = |r: &[f64], b1: &[f64]| -> Vec<f64> {
            let rate: Vec<f64> = r
                .iter()
                .zip(b1)
                .map(|(&r, &b)| k.linear.im + k.coupling.unwrap_or_default().im * b + k.cubic.im * r * r)
                .collect();
            let mut phi = vec![0.0; n];
            let h = (hi - lo) / (n - 1) as f64;
            if shot.diagnostics.direction == ShootDirection::Forward {
                for i in 1..n {
                    phi[i] = phi[i - 1] + 0.5 * h * (rate[i] + rate[i - 1]);
                }
            } else {
                for i in (0..n - 1).rev() {
                    phi[i] = phi[i + 1] - 0.5 * h * (rate[i] + rate[i + 1]);
                }
            }
            phi
        };
        let (a, b1) = match field.form {
            Form::S1Radius => {
                let r: Vec<f64> = states.iter().map(|x| x[0]).collect();
                let phi = polar_phase(&r, &vec![0.0; n]);
                (r.iter().zip(&phi).map(|(&r, &p)| C64::from_polar(r, p)).collect(), None)
            }
            Form::S3Polar => {
                let r: Vec<f64> = states.iter().map(|x| x[0]).collect();
                let b: Vec<f64> = states.iter().map(|x| x[1]).collect();
                let phi = polar_phase(&r, &b);
                (r.iter().zip(&phi).map(|(&r, &p)| C64::from_polar(r, p)).collect(), Some(b))
            }
            Form::S4Full => (
                states.iter().map(|x| C64::from_polar(x[0], x[1])).collect(),
                Some(states.iter().map(|x| x[2]).collect()),
            ),
            Form::S4Slow => (
                states.iter().map(|x| C64::from_polar(x[0], x[1])).collect(),
                Some(states.iter().map(|x| field.critical_manifold(x[0])).collect()),
            ),
            Form::S1Complex | Form::S2 => (states.iter().map(|x| C64::new(x[0], x[1])).collect(), None),
            Form::S3Complex => (states.iter().map(|x| C64::new(x[0], x[1])).collect(), Some(states.iter().map(|x| x[2]).collect())),
            Form::S5 => (states.iter().map(|x| C64::new(x[0], x[1])).collect(), Some(states.iter().map(|x| x[4]).collect())),
            Form::S4Fast => return Err(Error::InvalidParameter("the fast subsystem carries no front".into())),
        };
        let data = Self { scenario: field.scenario.tag, s, a, b1 };
        data.validate()?;
        Ok(data)
    }
}

/// A modulating-front profile on a `(ξ, p)` grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontProfile {
    /// Scenario.
    pub scenario: ScenarioTag,
    /// Co-moving coordinate grid (uniform, increasing).
    pub xi_grid: Vec<f64>,
    /// Phase grid on `[0, 2π)` (uniform).
    pub p_grid: Vec<f64>,
    /// `u[i][j] = U(ξ_i, p_j)`.
    pub u: Vec<Vec<f64>>,
    /// `v[i][j] = V(ξ_i, p_j)`.
    pub v: Vec<Vec<f64>>,
    /// Front speed.
    pub c: f64,
    /// Phase velocity.
    pub cp: f64,
    /// Bifurcation parameter.
    pub epsilon: f64,
}

/// Physical-space sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    /// Position.
    pub x: f64,
    /// `u(t, x)`.
    pub u: f64,
    /// `v(t, x)`.
    pub v: f64,
}

/// Assembles the profile
/// `u = 2ε Re(A e^{ip}) + 2ε² Re(h_u A² e^{2ip})`,
/// `v = ε²(B + 2 Re(h_v A² e^{2ip}))`,
/// with `A` evaluated at `ε²ξ` (I, III, IV) or `εξ` (II, V), `B` the slaved
/// mode (I, II) or the orbit's `B₁` (III–V).
pub fn reconstruct(field: &ReducedVectorField, data: &HeteroclinicData, params: &ModelParams, p_points: usize) -> Result<FrontProfile> {
    data.validate()?;
    if data.scenario != field.scenario.tag {
        return Err(Error::GridMismatch(format!("orbit of scenario {} for a scenario {} field", data.scenario, field.scenario.tag)));
    }
    let eps = params.epsilon;
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("front reconstruction needs epsilon > 0".into()));
    }
    let tag = data.scenario;
    let scale = if tag.uses_linear_scaling() { eps } else { eps * eps };
    let c = field.coeffs.c;
    let cp = params.cu + eps * eps * field.coeffs.omega0;
    let slaved = match tag {
        ScenarioTag::I | ScenarioTag::II => Some(slaved_b(tag, params, c)?),
        _ => None,
    };
    let m = p_points.max(4);
    let p_grid: Vec<f64> = (0..m).map(|j| 2.0 * std::f64::consts::PI * j as f64 / m as f64).collect();
    let xi_grid: Vec<f64> = data.s.iter().map(|s| s / scale).collect();
    let mut u = Vec::with_capacity(xi_grid.len());
    let mut v = Vec::with_capacity(xi_grid.len());
    for (i, _) in xi_grid.iter().enumerate() {
        let a = data.a[i];
        let b = match &slaved {
            Some(sl) => sl.b_of(a.norm_sqr()),
            None => data.b1.as_ref().map_or(0.0, |b| b[i]),
        };
        let h = second_harmonics(params, a);
        let (ur, vr): (Vec<f64>, Vec<f64>) = p_grid
            .iter()
            .map(|&p| {
                let e1 = C64::from_polar(1.0, p);
                let e2 = e1 * e1;
                (
                    2.0 * eps * (a * e1).re + 2.0 * eps * eps * (h.hu2 * e2).re,
                    eps * eps * (b + 2.0 * (h.hv2 * e2).re),
                )
            })
            .unzip();
        u.push(ur);
        v.push(vr);
    }
    Ok(FrontProfile { scenario: tag, xi_grid, p_grid, u, v, c, cp, epsilon: eps })
}

impl FrontProfile {
    fn bilinear(&self, grid: &[Vec<f64>], xi: f64, p: f64) -> f64 {
        let n = self.xi_grid.len();
        let k = self.xi_grid.partition_point(|&x| x <= xi).clamp(1, n - 1);
        let (x0, x1) = (self.xi_grid[k - 1], self.xi_grid[k]);
        let wx = ((xi - x0) / (x1 - x0)).clamp(0.0, 1.0);
        let m = self.p_grid.len();
        let dp = 2.0 * std::f64::consts::PI / m as f64;
        let q = p.rem_euclid(2.0 * std::f64::consts::PI) / dp;
        let j0 = (q.floor() as usize) % m;
        let j1 = (j0 + 1) % m;
        let wp = q - q.floor();
        let row = |r: &Vec<f64>| r[j0] * (1.0 - wp) + r[j1] * wp;
        row(&grid[k - 1]) * (1.0 - wx) + row(&grid[k]) * wx
    }

    /// Samples `(u, v)(t, x) = (U, V)(x − ct, (x − c_p t) mod 2π)` by bilinear
    /// interpolation; every `x − ct` must lie inside the `ξ` grid.
    pub fn physical_snapshot(&self, t: f64, x_grid: &[f64]) -> Result<Vec<Sample>> {
        let (lo, hi) = (self.xi_grid[0], *self.xi_grid.last().expect("nonempty"));
        x_grid
            .iter()
            .map(|&x| {
                let xi = x - self.c * t;
                if xi < lo - 1e-12 || xi > hi + 1e-12 {
                    return Err(Error::OutOfCoverage(format!("ξ = {xi} outside [{lo}, {hi}]")));
                }
                let p = x - self.cp * t;
                Ok(Sample { x, u: self.bilinear(&self.u, xi, p), v: self.bilinear(&self.v, xi, p) })
            })
            .collect()
    }

    /// Mean over `p` of `v` at row `i`.
    pub fn v_mean(&self, i: usize) -> f64 {
        self.v[i].iter().sum::<f64>() / self.v[i].len() as f64
    }

    /// Amplitude of the first `p`-harmonic of `u` at row `i`.
    pub fn u_first_harmonic(&self, i: usize) -> f64 {
        let m = self.p_grid.len() as f64;
        let z: C64 = self.u[i].iter().zip(&self.p_grid).map(|(u, &p)| C64::from_polar(*u, -p)).sum::<C64>() / m;
        2.0 * z.norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{shoot_scenario, ShootOptions};
    use crate::model::Scenario;
    use crate::wave::{leading_order, wave_profile, WaveSolution};

    fn base() -> ModelParams {
        ModelParams { alpha0: 1.0, cu: 1.0, cv: 0.0, gamma1: 0.0, gamma2: 0.0, epsilon: 0.1, b: 0.0 }
    }

    fn profile(p: &ModelParams, s: &Scenario) -> (ReducedVectorField, HeteroclinicData, FrontProfile) {
        let (f, r) = shoot_scenario(p, s, &ShootOptions::default()).unwrap();
        let d = HeteroclinicData::from_shooting(&f, &r, 801).unwrap();
        let prof = reconstruct(&f, &d, p, DEFAULT_P_POINTS).unwrap();
        (f, d, prof)
    }

    #[test]
    fn scenario_one_limits_and_zero_mean() {
        let p = base();
        let (_, _, prof) = profile(&p, &Scenario::one(5.0));
        let eps2 = p.epsilon * p.epsilon;
        for i in 0..prof.xi_grid.len() {
            assert!(prof.v_mean(i).abs() < 1e-15);
        }
        let last = prof.u.len() - 1;
        assert!(prof.u[last].iter().all(|u| u.abs() < 10.0 * eps2));
        let w: WaveSolution = leading_order(&ModelParams { epsilon: p.epsilon, ..p }).unwrap();
        let tw = wave_profile(&w, &prof.p_grid);
        for (j, s) in tw.iter().enumerate() {
            assert!((prof.u[0][j] - s.u).abs() < 10.0 * eps2, "{} vs {}", prof.u[0][j], s.u);
        }
    }

    #[test]
    fn reversed_front_swaps_limits() {
        let p = base();
        let (_, _, prof) = profile(&p, &Scenario::one(1.5));
        let first = prof.u_first_harmonic(0);
        let last = prof.u_first_harmonic(prof.u.len() - 1);
        assert!(first < 1e-5 && (last - 2.0 * p.epsilon * (0.325f64).sqrt()).abs() < 1e-5, "{first} {last}");
    }

    #[test]
    fn scenario_four_mean_matches_critical_manifold() {
        let p = ModelParams { cv: -4.0, epsilon: 0.05, ..base() };
        let (f, _, prof) = profile(&p, &Scenario::four(1.0, 0.5));
        let eps2 = p.epsilon * p.epsilon;
        let expected = eps2 * (-2.0 * 0.5 / 1.0) * f.a_star().powi(2);
        assert!((prof.v_mean(0) - expected).abs() < 1e-8 * eps2.max(1.0), "{} vs {}", prof.v_mean(0), expected);
    }

    #[test]
    fn snapshot_at_zero_is_diagonal_resampling() {
        let p = base();
        let (_, _, prof) = profile(&p, &Scenario::one(5.0));
        let xs: Vec<f64> = prof.xi_grid.iter().step_by(37).copied().collect();
        let snap = prof.physical_snapshot(0.0, &xs).unwrap();
        for s in &snap {
            let i = prof.xi_grid.iter().position(|&x| x == s.x).unwrap();
            let direct = prof.bilinear(&prof.u, prof.xi_grid[i], s.x);
            assert!((s.u - direct).abs() < 1e-14);
        }
        let far = prof.xi_grid.last().unwrap() + 1.0;
        assert!(matches!(prof.physical_snapshot(0.0, &[far]), Err(Error::OutOfCoverage(_))));
    }

    #[test]
    fn snapshot_envelope_moves_with_front_speed() {
        let p = base();
        let (_, _, prof) = profile(&p, &Scenario::one(5.0));
        let (lo, hi) = (prof.xi_grid[0], *prof.xi_grid.last().unwrap());
        let delta = 3.0;
        let xs: Vec<f64> = (0..20000).map(|k| lo + delta * prof.c + 1.0 + (hi - lo - delta * prof.c - 2.0) * k as f64 / 19999.0).collect();
        let half = |t: f64| {
            let snap = prof.physical_snapshot(t, &xs).unwrap();
            // envelope position: where the local maximum of |u| over a period drops below half the plateau
            let target = 0.5 * 2.0 * p.epsilon * (0.325f64).sqrt();
            let k = (0..snap.len()).rev().find(|&k| snap[k].u.abs() > target).unwrap();
            snap[k].x
        };
        let shift = half(delta) - half(0.0);
        assert!((shift - prof.c * delta).abs() < 2.0 * std::f64::consts::PI, "{shift}");
    }

    #[test]
    fn grid_mismatch_detected() {
        let d = HeteroclinicData { scenario: ScenarioTag::III, s: vec![0.0, 1.0], a: vec![C64::new(1.0, 0.0); 2], b1: None };
        assert!(matches!(d.validate(), Err(Error::GridMismatch(_))));
        let d = HeteroclinicData { scenario: ScenarioTag::I, s: vec![0.0, 1.0, 2.0], a: vec![C64::new(1.0, 0.0); 2], b1: None };
        assert!(matches!(d.validate(), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn translation_shifts_profile() {
        let p = base();
        let (f, d, prof) = profile(&p, &Scenario::one(5.0));
        let s0 = 0.37;
        let shifted = reconstruct(&f, &d.shifted(s0), &p, DEFAULT_P_POINTS).unwrap();
        let dxi = s0 / (p.epsilon * p.epsilon);
        for (i, xi) in prof.xi_grid.iter().enumerate() {
            assert!((shifted.xi_grid[i] - xi - dxi).abs() < 1e-9);
            assert_eq!(shifted.u[i], prof.u[i]);
        }
    }
}
