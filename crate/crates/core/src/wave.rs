//! Bifurcating spatially periodic traveling waves.
//!
//! To leading order the wave is `u = ε A* e^{ip} + c.c.` with
//! `p = x − c_p t` and `c_p = c_u + ε² ω0*`, where `(A*, ω0*)` make the
//! stationary amplitude equation
//!
//! ```text
//! 0 = (α0 + B + i ω0) A + κ A |A|² + g(A, ε),   κ = −3 − 1/(9+6ic_u) + (−2γ1+iγ2)/(2−i(c_u+c_v))
//! ```
//!
//! hold with real `A > 0` (the gauge symmetry `A ↦ A e^{iφ}` fixes the phase).
//! The remainder `g = O(ε²)` has no closed form; [`GalerkinResidual`] evaluates
//! the full stationary amplitude equation by a Lyapunov–Schmidt reduction of a
//! truncated Fourier (Galerkin) discretization of the PDE in the co-moving frame.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ModelParams;

type C64 = Complex64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Leading-order description of the bifurcating traveling wave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveSolution {
    /// Amplitude of the first harmonic (positive gauge representative).
    pub a_star: f64,
    /// Frequency correction of the phase velocity.
    pub omega0_star: f64,
    /// Phase velocity `c_u + ε² ω0*`.
    pub cp: f64,
    /// Coefficient of `A² e^{2ip}` in `u` (times `ε²`).
    pub h2_u: C64,
    /// Coefficient of `A² e^{2ip}` in `v` (times `ε²`).
    pub h2_v: C64,
    /// Background of the conserved mode.
    pub b: f64,
    /// Small parameter the solution was computed for.
    pub epsilon: f64,
}

/// Second-harmonic coefficient of `u`: `i / (9 + 6 i c_u)`.
pub fn h2_u(cu: f64) -> C64 {
    I / C64::new(9.0, 6.0 * cu)
}

/// Second-harmonic coefficient of `v`: `(−2γ1 + iγ2) / (2 − i(c_u + c_v))`.
pub fn h2_v(params: &ModelParams) -> C64 {
    C64::new(-2.0 * params.gamma1, params.gamma2) / C64::new(2.0, -(params.cu + params.cv))
}

/// Cubic coefficient `κ = −3 − 1/(9+6ic_u) + (−2γ1+iγ2)/(2−i(c_u+c_v))` of the
/// temporal amplitude equation; its real and imaginary parts are `a_cub`, `b_cub`.
pub fn cubic_coefficient(params: &ModelParams) -> C64 {
    C64::new(-3.0, 0.0) - C64::new(1.0, 0.0) / C64::new(9.0, 6.0 * params.cu) + h2_v(params)
}

/// Closed-form leading-order wave (Lemma-type formulas).
///
/// `A*² = (9+4c_u²)(B+α0) / (4(7+3c_u²))`, `ω0* = −c_u(B+α0) / (6(7+3c_u²))`.
pub fn leading_order(params: &ModelParams) -> Result<WaveSolution> {
    params.validate()?;
    let s = params.b + params.alpha0;
    if s <= 0.0 {
        return Err(Error::NoWave(s));
    }
    let cu2 = params.cu * params.cu;
    let a_star = ((9.0 + 4.0 * cu2) * s / (4.0 * (7.0 + 3.0 * cu2))).sqrt();
    let omega0_star = -params.cu * s / (6.0 * (7.0 + 3.0 * cu2));
    Ok(WaveSolution {
        a_star,
        omega0_star,
        cp: params.cu + params.epsilon * params.epsilon * omega0_star,
        h2_u: h2_u(params.cu),
        h2_v: h2_v(params),
        b: params.b,
        epsilon: params.epsilon,
    })
}

/// Nontrivial equilibrium of `0 = (μ + iω) A + K A|A|²` with real `A > 0`:
/// returns `(A, ω)` with `A² = −μ / Re K` and `ω = −Im K · A²`.
///
/// This is the `ε = 0` solution of the stationary amplitude equation for an
/// arbitrary effective cubic coefficient `K` (e.g. including slaved or
/// stationary conserved-mode contributions).
pub fn invading_state(mu: f64, cubic: C64) -> Result<(f64, f64)> {
    if cubic.re == 0.0 {
        return Err(Error::DegenerateScenario("real part of the effective cubic coefficient vanishes".into()));
    }
    let r2 = -mu / cubic.re;
    if r2 <= 0.0 || !r2.is_finite() {
        return Err(Error::NoWave(mu));
    }
    Ok((r2.sqrt(), -cubic.im * r2))
}

/// Stationary amplitude equation `G(A, ω0) = G1 + i G2` for real `A`.
pub trait StationaryResidual {
    /// Evaluates the residual at amplitude `a` and frequency correction `omega0`.
    fn residual(&self, a: f64, omega0: f64) -> C64;
}

impl<F: Fn(f64, f64) -> C64> StationaryResidual for F {
    fn residual(&self, a: f64, omega0: f64) -> C64 {
        self(a, omega0)
    }
}

/// Leading-order residual `(α0 + B + iω0) A + κ A³` (no `O(ε²)` remainder).
pub fn leading_order_residual(params: &ModelParams) -> impl Fn(f64, f64) -> C64 {
    let kappa = cubic_coefficient(params);
    let mu = params.alpha0 + params.b;
    move |a, omega0| C64::new(mu, omega0) * a + kappa * a * a * a
}

/// Full stationary amplitude equation obtained from a truncated Fourier
/// discretization of the PDE in the frame moving with `c_p = c_u + ε² ω0`.
///
/// For given `(A, ω0)` the first harmonic is pinned to `u_1 = ε A`, the mean
/// of `v` to `ε² B`, and all remaining harmonics are slaved by solving their
/// (hyperbolic) equations with a contraction iteration. The returned value is
/// the first-harmonic equation divided by `ε³`, which equals
/// `(α0 + B + iω0) A + κ A³ + g(A, ε)`.
#[derive(Debug, Clone)]
pub struct GalerkinResidual {
    params: ModelParams,
    modes: usize,
    grid: usize,
}

impl GalerkinResidual {
    /// Residual with `modes` retained harmonics (grid size chosen alias-free for cubic terms).
    pub fn new(params: ModelParams, modes: usize) -> Result<Self> {
        params.validate()?;
        if params.epsilon <= 0.0 {
            return Err(Error::InvalidParameter("Galerkin residual needs epsilon > 0".into()));
        }
        let modes = modes.max(3);
        Ok(Self { params, modes, grid: 4 * modes + 8 })
    }

    fn to_grid(&self, coeffs: &[C64]) -> Vec<f64> {
        // coeffs[n] for n = 0..=M, real field with u_{-n} = conj(u_n).
        let g = self.grid;
        (0..g)
            .map(|j| {
                let p = 2.0 * std::f64::consts::PI * j as f64 / g as f64;
                let mut s = coeffs[0].re;
                for (n, c) in coeffs.iter().enumerate().skip(1) {
                    s += 2.0 * (c * C64::from_polar(1.0, n as f64 * p)).re;
                }
                s
            })
            .collect()
    }

    fn to_modes(&self, values: &[f64]) -> Vec<C64> {
        let g = self.grid;
        (0..=self.modes)
            .map(|n| {
                let mut s = C64::new(0.0, 0.0);
                for (j, &v) in values.iter().enumerate() {
                    let p = 2.0 * std::f64::consts::PI * j as f64 / g as f64;
                    s += v * C64::from_polar(1.0, -(n as f64) * p);
                }
                s / g as f64
            })
            .collect()
    }

    fn linear_u(&self, n: f64, cp: f64) -> C64 {
        let p = &self.params;
        let one_minus = 1.0 - n * n;
        C64::new(-one_minus * one_minus + p.epsilon * p.epsilon * p.alpha0, -p.cu * n * n * n + cp * n)
    }

    fn linear_v(&self, n: f64, cp: f64) -> C64 {
        C64::new(-n * n, (self.params.cv + cp) * n)
    }

    /// Nonlinear terms projected on harmonics `0..=M`.
    fn nonlinear(&self, u: &[C64], v: &[C64]) -> (Vec<C64>, Vec<C64>) {
        let ug = self.to_grid(u);
        let vg = self.to_grid(v);
        let uv_minus_u3: Vec<f64> = ug.iter().zip(&vg).map(|(a, b)| a * b - a * a * a).collect();
        let u2: Vec<f64> = ug.iter().map(|a| a * a).collect();
        let a = self.to_modes(&uv_minus_u3);
        let q = self.to_modes(&u2);
        let p = &self.params;
        let nu = (0..=self.modes)
            .map(|n| a[n] + 0.5 * I * n as f64 * q[n])
            .collect();
        let nv = (0..=self.modes)
            .map(|n| {
                let nf = n as f64;
                C64::new(-nf * nf * p.gamma1, nf * p.gamma2) * q[n]
            })
            .collect();
        (nu, nv)
    }

    /// Slaved harmonics for given `(A, ω0)`; returns `(u_n, v_n)` for `n = 0..=M`.
    pub fn slaved_modes(&self, a: f64, omega0: f64) -> (Vec<C64>, Vec<C64>) {
        let p = &self.params;
        let eps = p.epsilon;
        let cp = p.cu + eps * eps * omega0;
        let m = self.modes;
        let mut u = vec![C64::new(0.0, 0.0); m + 1];
        let mut v = vec![C64::new(0.0, 0.0); m + 1];
        u[1] = C64::new(eps * a, 0.0);
        v[0] = C64::new(eps * eps * p.b, 0.0);
        for _ in 0..200 {
            let (nu, nv) = self.nonlinear(&u, &v);
            let mut change: f64 = 0.0;
            for n in 0..=m {
                if n != 1 {
                    let new = -nu[n] / self.linear_u(n as f64, cp);
                    change = change.max((new - u[n]).norm());
                    u[n] = new;
                }
                if n != 0 {
                    let new = -nv[n] / self.linear_v(n as f64, cp);
                    change = change.max((new - v[n]).norm());
                    v[n] = new;
                }
            }
            if change <= 1e-17 * (1.0 + eps * a.abs()) {
                break;
            }
        }
        (u, v)
    }
}

impl StationaryResidual for GalerkinResidual {
    fn residual(&self, a: f64, omega0: f64) -> C64 {
        let eps = self.params.epsilon;
        let cp = self.params.cu + eps * eps * omega0;
        let (u, v) = self.slaved_modes(a, omega0);
        let (nu, _) = self.nonlinear(&u, &v);
        (self.linear_u(1.0, cp) * u[1] + nu[1]) / (eps * eps * eps)
    }
}

/// Outcome of a Newton refinement on `(A, ω0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Refinement {
    /// Refined amplitude.
    pub a: f64,
    /// Refined frequency correction.
    pub omega0: f64,
    /// Final residual `|G|`.
    pub residual: f64,
    /// Newton iterations used.
    pub iterations: usize,
}

/// Newton iteration on `(A, ω0) ∈ ℝ²` for `Re G = Im G = 0`, starting from `seed`.
///
/// The Jacobian is formed by central differences; full steps are halved while
/// the residual increases.
pub fn refine_fixed_point(residual: &dyn StationaryResidual, seed: (f64, f64), tol: f64) -> Result<Refinement> {
    let (mut a, mut w) = seed;
    let mut g = residual.residual(a, w);
    let mut res = g.norm();
    const MAX_ITER: usize = 50;
    for it in 0..MAX_ITER {
        if res < tol {
            return Ok(Refinement { a, omega0: w, residual: res, iterations: it });
        }
        let ha = 1e-6 * (1.0 + a.abs());
        let hw = 1e-6 * (1.0 + w.abs());
        let da = (residual.residual(a + ha, w) - residual.residual(a - ha, w)) / (2.0 * ha);
        let dw = (residual.residual(a, w + hw) - residual.residual(a, w - hw)) / (2.0 * hw);
        // Solve [da.re dw.re; da.im dw.im] [δa; δw] = −[g.re; g.im].
        let det = da.re * dw.im - dw.re * da.im;
        if det == 0.0 || !det.is_finite() {
            return Err(Error::NewtonDiverged { iterations: it, residual: res });
        }
        let step_a = -(dw.im * g.re - dw.re * g.im) / det;
        let step_w = -(-da.im * g.re + da.re * g.im) / det;
        let mut lambda = 1.0;
        loop {
            let (na, nw) = (a + lambda * step_a, w + lambda * step_w);
            let ng = residual.residual(na, nw);
            if ng.norm() < res || lambda < 1e-4 {
                a = na;
                w = nw;
                g = ng;
                res = ng.norm();
                break;
            }
            lambda *= 0.5;
        }
        if !res.is_finite() {
            return Err(Error::NewtonDiverged { iterations: it + 1, residual: res });
        }
    }
    if res < tol {
        Ok(Refinement { a, omega0: w, residual: res, iterations: MAX_ITER })
    } else {
        Err(Error::NewtonDiverged { iterations: MAX_ITER, residual: res })
    }
}

/// Number of harmonics used by [`refine`].
pub const DEFAULT_GALERKIN_MODES: usize = 12;

/// Refines the leading-order wave against the full stationary amplitude
/// equation (Galerkin residual for `ε > 0`, leading-order residual at `ε = 0`).
pub fn refine(params: &ModelParams) -> Result<(WaveSolution, Refinement)> {
    let seed = leading_order(params)?;
    let refinement = if params.epsilon > 0.0 {
        let galerkin = GalerkinResidual::new(*params, DEFAULT_GALERKIN_MODES)?;
        refine_fixed_point(&galerkin, (seed.a_star, seed.omega0_star), 1e-12)?
    } else {
        let lo = leading_order_residual(params);
        refine_fixed_point(&lo, (seed.a_star, seed.omega0_star), 1e-12)?
    };
    let eps2 = params.epsilon * params.epsilon;
    let sol = WaveSolution {
        a_star: refinement.a,
        omega0_star: refinement.omega0,
        cp: params.cu + eps2 * refinement.omega0,
        ..seed
    };
    Ok((sol, refinement))
}

/// One sample of the traveling-wave profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveSample {
    /// Phase coordinate `p = x − c_p t`.
    pub p: f64,
    /// `u_tw(p)`.
    pub u: f64,
    /// `v_tw(p)`.
    pub v: f64,
}

/// Samples `u_tw = 2εA cos p + 2ε² Re(h2_u A² e^{2ip})` and
/// `v_tw = ε²B + 2ε² Re(h2_v A² e^{2ip})`.
pub fn wave_profile(sol: &WaveSolution, p_grid: &[f64]) -> Vec<WaveSample> {
    let eps = sol.epsilon;
    let a = sol.a_star;
    p_grid
        .iter()
        .map(|&p| {
            let e2 = C64::from_polar(a * a, 2.0 * p);
            WaveSample {
                p,
                u: 2.0 * eps * a * p.cos() + 2.0 * eps * eps * (sol.h2_u * e2).re,
                v: eps * eps * sol.b + 2.0 * eps * eps * (sol.h2_v * e2).re,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn base() -> ModelParams {
        ModelParams { alpha0: 1.0, cu: 1.0, cv: 0.0, gamma1: 0.0, gamma2: 0.0, epsilon: 0.0, b: 0.0 }
    }

    #[test]
    fn leading_order_rational_values() {
        let w = leading_order(&base()).unwrap();
        assert_abs_diff_eq!(w.a_star * w.a_star, 13.0 / 40.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w.omega0_star, -1.0 / 60.0, epsilon = 1e-16);
    }

    #[test]
    fn no_wave_below_threshold() {
        let p = ModelParams { b: -1.0, ..base() };
        assert!(matches!(leading_order(&p), Err(Error::NoWave(_))));
    }

    #[test]
    fn cubic_coefficient_rational_values() {
        let k = cubic_coefficient(&base());
        assert_abs_diff_eq!(k.re, -40.0 / 13.0, epsilon = 1e-14);
        assert_abs_diff_eq!(k.im, 2.0 / 39.0, epsilon = 1e-15);
        let k2 = cubic_coefficient(&ModelParams { cv: 17.0, ..base() });
        assert_eq!(k, k2);
    }

    #[test]
    fn omega_star_makes_amplitude_real() {
        for cu in [-2.0, -0.3, 0.7, 1.0, 4.0] {
            for b in [-0.4, 0.0, 0.8] {
                let p = ModelParams { cu, b, ..base() };
                let w = leading_order(&p).unwrap();
                let q = C64::new(p.alpha0 + p.b, w.omega0_star) / (C64::new(3.0, 0.0) + C64::new(1.0, 0.0) / C64::new(9.0, 6.0 * cu));
                assert!(q.im.abs() < 1e-14, "cu={cu} b={b}: {}", q.im);
                assert_abs_diff_eq!(q.re, w.a_star * w.a_star, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn invading_state_matches_closed_form_without_coupling() {
        let p = base();
        let (r, w) = invading_state(p.alpha0, cubic_coefficient(&p)).unwrap();
        let lo = leading_order(&p).unwrap();
        assert_abs_diff_eq!(r, lo.a_star, epsilon = 1e-15);
        assert_abs_diff_eq!(w, lo.omega0_star, epsilon = 1e-16);
    }

    #[test]
    fn refine_at_onset_is_identity() {
        let (sol, r) = refine(&base()).unwrap();
        let lo = leading_order(&base()).unwrap();
        assert_eq!(r.iterations, 0);
        assert_eq!(sol.a_star, lo.a_star);
        assert_eq!(sol.omega0_star, lo.omega0_star);
    }

    #[test]
    fn galerkin_residual_reduces_to_leading_order() {
        // The remainder g(A, ε) is O(ε²): halving ε shrinks the gap about fourfold.
        let gap = |eps: f64| {
            let p = ModelParams { epsilon: eps, gamma1: 0.05, gamma2: 0.02, ..base() };
            let g = GalerkinResidual::new(p, 10).unwrap();
            let lo = leading_order_residual(&p);
            (g.residual(0.5, -0.02) - lo(0.5, -0.02)).norm()
        };
        let (g1, g2) = (gap(0.04), gap(0.02));
        assert!(g1 < 1e-2, "gap {g1}");
        let ratio = g1 / g2;
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn jacobian_determinant_at_seed() {
        let p = ModelParams { b: 0.3, ..base() };
        let lo = leading_order(&p).unwrap();
        let g = leading_order_residual(&p);
        let (a, w) = (lo.a_star, lo.omega0_star);
        let h = 1e-6;
        let da = (g(a + h, w) - g(a - h, w)) / (2.0 * h);
        let dw = (g(a, w + h) - g(a, w - h)) / (2.0 * h);
        let det = da.re * dw.im - dw.re * da.im;
        assert_abs_diff_eq!(det, -2.0 * (p.b + p.alpha0) * a, epsilon = 1e-8);
    }

    #[test]
    fn refinement_moves_root_by_order_eps_squared() {
        let p = ModelParams { epsilon: 0.05, gamma1: 0.01, ..base() };
        let (sol, r) = refine(&p).unwrap();
        let lo = leading_order(&p).unwrap();
        assert!(r.residual < 1e-12);
        let shift = (sol.a_star - lo.a_star).abs();
        assert!(shift <= 0.01, "shift {shift}");
        // Idempotence: restarting from the refined root changes nothing.
        let galerkin = GalerkinResidual::new(p, DEFAULT_GALERKIN_MODES).unwrap();
        let again = refine_fixed_point(&galerkin, (sol.a_star, sol.omega0_star), 1e-12).unwrap();
        assert!((again.a - sol.a_star).abs() < 1e-12);
        assert!((again.omega0 - sol.omega0_star).abs() < 1e-12);
    }

    #[test]
    fn profile_means_and_periodicity() {
        let p = ModelParams { epsilon: 0.1, b: 0.4, gamma1: 0.2, gamma2: -0.1, ..base() };
        let sol = leading_order(&p).unwrap();
        let n = 64;
        let grid: Vec<f64> = (0..n).map(|j| 2.0 * std::f64::consts::PI * j as f64 / n as f64).collect();
        let prof = wave_profile(&sol, &grid);
        let mean_u: f64 = prof.iter().map(|s| s.u).sum::<f64>() / n as f64;
        let mean_v: f64 = prof.iter().map(|s| s.v).sum::<f64>() / n as f64;
        assert!(mean_u.abs() < 1e-15);
        assert_abs_diff_eq!(mean_v, 0.01 * 0.4, epsilon = 1e-15);
        let shifted: Vec<f64> = grid.iter().map(|p| p + 2.0 * std::f64::consts::PI).collect();
        for (a, b) in prof.iter().zip(wave_profile(&sol, &shifted)) {
            assert_abs_diff_eq!(a.u, b.u, epsilon = 1e-13);
            assert_abs_diff_eq!(a.v, b.v, epsilon = 1e-13);
        }
    }
}
