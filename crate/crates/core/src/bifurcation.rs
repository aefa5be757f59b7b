//! Bifurcations of the Scenario II reduced system: the Hopf point where the
//! origin loses stability, the bifurcating periodic orbits (rotating waves),
//! their Floquet multipliers and the secondary torus bifurcation.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues_real, sort_by_real_desc};
use crate::model::{ModelParams, ScenarioTag};
use crate::ode::{integrate, IntegrateOptions, Variational, VectorField};
use crate::reduced::{build_s2, build_s5, ReducedVectorField};

type C64 = Complex64;

/// Integrator tolerance used for orbits and monodromy matrices.
pub const ORBIT_TOL: f64 = 1e-12;
/// Newton residual required of a periodic orbit.
pub const ORBIT_RESIDUAL: f64 = 1e-9;
/// Deviation of the trivial multiplier from 1 that is accepted.
pub const TRIVIAL_MULTIPLIER_TOL: f64 = 1e-6;

/// The (A, Ã) field whose origin and orbits are analyzed: Scenario II, or
/// Scenario V (whose `B₁ = 0` plane carries the same dynamics when `γ1 = 0`).
pub fn orbit_field(params: &ModelParams, tag: ScenarioTag, c0: f64) -> Result<ReducedVectorField> {
    match tag {
        ScenarioTag::II => build_s2(params, c0),
        ScenarioTag::V => build_s5(params, c0),
        other => Err(Error::InvalidParameter(format!("bifurcation analysis needs scenario II or V, got {other}"))),
    }
}

/// Eigenvalues of the origin Jacobian at one offset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OriginSpectrum {
    /// Speed offset.
    pub c0: f64,
    /// Eigenvalues of the (A, Ã) block, continuously ordered along a scan.
    pub eigenvalues: Vec<C64>,
}

/// Eigenvalues of the `(A, Ã)` block of the origin Jacobian, sorted by
/// descending real part.
pub fn origin_eigenvalues(params: &ModelParams, tag: ScenarioTag, c0: f64) -> Result<Vec<C64>> {
    let f = orbit_field(params, tag, c0)?;
    let j = f.jacobian(&f.origin);
    let block = j.view((0, 0), (4, 4)).into_owned();
    let mut ev = eigenvalues_real(&block)?;
    sort_by_real_desc(&mut ev);
    Ok(ev)
}

/// Samples the origin spectrum on a uniform `c0` grid; eigenvalues are
/// matched between neighbouring samples by nearest distance.
pub fn origin_spectrum_scan(params: &ModelParams, tag: ScenarioTag, c0_range: (f64, f64), n_samples: usize) -> Result<Vec<OriginSpectrum>> {
    let n = n_samples.max(2);
    let mut out: Vec<OriginSpectrum> = Vec::with_capacity(n);
    for i in 0..n {
        let c0 = c0_range.0 + (c0_range.1 - c0_range.0) * i as f64 / (n - 1) as f64;
        let mut ev = origin_eigenvalues(params, tag, c0)?;
        if let Some(prev) = out.last() {
            let mut ordered = Vec::with_capacity(ev.len());
            for p in &prev.eigenvalues {
                let k = (0..ev.len()).min_by(|&a, &b| (ev[a] - p).norm().total_cmp(&(ev[b] - p).norm())).expect("nonempty");
                ordered.push(ev.swap_remove(k));
            }
            ev = ordered;
        }
        out.push(OriginSpectrum { c0, eigenvalues: ev });
    }
    Ok(out)
}

/// Kind of a located bifurcation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BifurcationKind {
    /// A complex pair of origin eigenvalues crosses the imaginary axis.
    Hopf,
    /// A complex pair of Floquet multipliers crosses the unit circle.
    Torus,
}

/// A located bifurcation with its certificate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BifurcationPoint {
    /// Kind.
    pub kind: BifurcationKind,
    /// Critical offset.
    pub c0: f64,
    /// Critical eigenvalue (Hopf) or multiplier (torus) with positive imaginary part.
    pub certificate: C64,
    /// Derivative of the crossing quantity with respect to `c0` (transversality).
    pub transversality: f64,
}

fn hopf_indicator(params: &ModelParams, tag: ScenarioTag, c0: f64) -> Result<(f64, C64)> {
    let ev = origin_eigenvalues(params, tag, c0)?;
    Ok((ev[0].re, ev[0]))
}

/// Locates `c0*` where the leading origin eigenvalue pair crosses the
/// imaginary axis: bisection followed by secant polish to `|Re λ| < 10⁻¹⁰`.
pub fn find_hopf(params: &ModelParams, tag: ScenarioTag, bracket: (f64, f64)) -> Result<BifurcationPoint> {
    let g = |c0: f64| hopf_indicator(params, tag, c0).map(|v| v.0);
    let (mut lo, mut hi) = bracket;
    let (mut glo, ghi) = (g(lo)?, g(hi)?);
    if glo * ghi > 0.0 {
        return Err(Error::NoSignChange(lo, hi));
    }
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid)?;
        if gm * glo > 0.0 {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
        if (hi - lo).abs() < 1e-9 {
            break;
        }
    }
    // Secant polish.
    let (mut x0, mut x1) = (lo, hi);
    let (mut g0, mut g1) = (g(x0)?, g(x1)?);
    for _ in 0..30 {
        if g1.abs() < 1e-13 || g1 == g0 {
            break;
        }
        let x2 = x1 - g1 * (x1 - x0) / (g1 - g0);
        x0 = x1;
        g0 = g1;
        x1 = x2;
        g1 = g(x1)?;
    }
    let c0 = if g1.abs() <= g0.abs() { x1 } else { x0 };
    let (re, lam) = hopf_indicator(params, tag, c0)?;
    if re.abs() >= 1e-10 {
        return Err(Error::NoConvergence(format!("Hopf polish stalled at |Re λ| = {:.3e}", re.abs())));
    }
    let h = 1e-5;
    let transversality = (g(c0 + h)? - g(c0 - h)?) / (2.0 * h);
    Ok(BifurcationPoint { kind: BifurcationKind::Hopf, c0, certificate: C64::new(lam.re, lam.im.abs()), transversality })
}

/// A periodic orbit of the (A, Ã) system.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicOrbit {
    /// Speed offset.
    pub c0: f64,
    /// Minimal period.
    pub period: f64,
    /// A state on the orbit.
    pub anchor_state: Vec<f64>,
    /// Vector field at the anchor (normal of the phase-condition section).
    pub section_normal: Vec<f64>,
    /// Maximal Euclidean norm over the orbit.
    pub amplitude: f64,
    /// `‖φ_T(anchor) − anchor‖` after Newton.
    pub residual: f64,
}

/// Rotating-wave solution `A = R e^{iWξ}` of `A'' = bA' + aA + c̃A|A|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RotatingWave {
    /// Radius `R`.
    pub radius: f64,
    /// Rotation rate `W`.
    pub rate: f64,
}

/// Rotating waves: `W² + ibW + a + c̃R² = 0` splits into
/// `R² = −(Im a + Re b · W)/Im c̃` and a real quadratic in `W`; returns the
/// solutions with `R² > 0`, smallest radius first.
pub fn rotating_waves(field: &ReducedVectorField) -> Vec<RotatingWave> {
    let k = &field.coeffs;
    let (a, b, c) = (k.linear, k.damping.unwrap_or_default(), k.cubic);
    if c.im == 0.0 {
        return Vec::new();
    }
    // W² − Im b·W + Re a − Re c̃ (Im a + Re b W)/Im c̃ = 0
    let q1 = -b.im - c.re * b.re / c.im;
    let q0 = a.re - c.re * a.im / c.im;
    let disc = q1 * q1 - 4.0 * q0;
    if disc < 0.0 {
        return Vec::new();
    }
    let mut out: Vec<RotatingWave> = [(-q1 + disc.sqrt()) / 2.0, (-q1 - disc.sqrt()) / 2.0]
        .into_iter()
        .filter_map(|w| {
            let s = -(a.im + b.re * w) / c.im;
            (s > 0.0 && w != 0.0).then(|| RotatingWave { radius: s.sqrt(), rate: w })
        })
        .collect();
    out.sort_by(|x, y| x.radius.total_cmp(&y.radius));
    out
}

/// Seed orbit from the smallest rotating wave (the one born at the Hopf point).
pub fn orbit_seed(params: &ModelParams, tag: ScenarioTag, c0: f64) -> Result<PeriodicOrbit> {
    let f = orbit_field(params, tag, c0)?;
    let rw = rotating_waves(&f)
        .into_iter()
        .next()
        .ok_or_else(|| Error::NoConvergence(format!("no rotating wave at c0 = {c0}")))?;
    let mut x = vec![0.0; f.dim()];
    x[0] = rw.radius;
    x[3] = rw.radius * rw.rate;
    let normal = f.rhs(&x);
    Ok(PeriodicOrbit {
        c0,
        period: 2.0 * std::f64::consts::PI / rw.rate.abs(),
        amplitude: rw.radius * (1.0 + rw.rate * rw.rate).sqrt(),
        anchor_state: x,
        section_normal: normal,
        residual: f64::NAN,
    })
}

struct Shot {
    end: Vec<f64>,
    monodromy: DMatrix<f64>,
    max_norm: f64,
}

fn shoot_period<F: VectorField + ?Sized>(field: &F, x: &[f64], period: f64) -> Result<Shot> {
    let var = Variational::new(field);
    let y0 = var.initial(x);
    let traj = integrate(&var, &y0, 0.0, period, &IntegrateOptions::with_tol(ORBIT_TOL))?;
    let (end, monodromy) = var.split(traj.last());
    let n = x.len();
    let max_norm = traj.states.iter().map(|y| y[..n].iter().map(|a| a * a).sum::<f64>().sqrt()).fold(0.0, f64::max);
    Ok(Shot { end, monodromy, max_norm })
}

/// Single-shooting Newton on `(anchor, period)` with the phase condition
/// `f(x_seed)·(x − x_seed) = 0`; converges to residual `< 10⁻⁹`.
pub fn continue_periodic_orbit(params: &ModelParams, tag: ScenarioTag, c0: f64, seed: &PeriodicOrbit) -> Result<PeriodicOrbit> {
    let field = orbit_field(params, tag, c0)?;
    let n = field.dim();
    if seed.anchor_state.len() != n {
        return Err(Error::InvalidParameter("seed dimension does not match the field".into()));
    }
    let x_ref = seed.anchor_state.clone();
    let f_ref = field.rhs(&x_ref);
    let mut x = x_ref.clone();
    let mut period = seed.period;
    let mut residual = f64::INFINITY;
    for _ in 0..40 {
        let shot = shoot_period(&field, &x, period)?;
        let r: Vec<f64> = shot.end.iter().zip(&x).map(|(a, b)| a - b).collect();
        residual = r.iter().map(|a| a * a).sum::<f64>().sqrt();
        let phase: f64 = f_ref.iter().zip(x.iter().zip(&x_ref)).map(|(f, (a, b))| f * (a - b)).sum();
        if residual < ORBIT_RESIDUAL && phase.abs() < ORBIT_RESIDUAL {
            return Ok(PeriodicOrbit {
                c0,
                period,
                section_normal: field.rhs(&x),
                anchor_state: x,
                amplitude: shot.max_norm,
                residual,
            });
        }
        let f_end = field.rhs(&shot.end);
        let mut jac = DMatrix::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in 0..n {
                jac[(i, j)] = shot.monodromy[(i, j)] - if i == j { 1.0 } else { 0.0 };
            }
            jac[(i, n)] = f_end[i];
            jac[(n, i)] = f_ref[i];
        }
        let mut rhs = DVector::zeros(n + 1);
        for i in 0..n {
            rhs[i] = r[i];
        }
        rhs[n] = phase;
        let svd = jac.svd(true, true);
        let step = match svd.solve(&rhs, 1e-13 * svd.singular_values.max()) {
            Ok(s) => s,
            Err(_) => break,
        };
        for i in 0..n {
            x[i] -= step[i];
        }
        period -= step[n];
        if !(period > 0.0) || x.iter().any(|v| !v.is_finite()) {
            break;
        }
    }
    Err(Error::OrbitNewtonDiverged { c0, residual })
}

/// Floquet multipliers of a periodic orbit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FloquetResult {
    /// Multiplier nearest to 1 (the trivial one).
    pub trivial: C64,
    /// Remaining multipliers, sorted by descending modulus.
    pub nontrivial: Vec<C64>,
    /// `|det M − exp(∫ tr Df)| / exp(∫ tr Df)`.
    pub liouville_error: f64,
    /// Condition number of the monodromy matrix.
    pub condition: f64,
}

impl FloquetResult {
    /// Largest nontrivial modulus.
    pub fn max_nontrivial_modulus(&self) -> f64 {
        self.nontrivial.iter().map(|m| m.norm()).fold(0.0, f64::max)
    }
}

/// Eigenvalues of the monodromy matrix over one period.
pub fn floquet_multipliers(params: &ModelParams, tag: ScenarioTag, orbit: &PeriodicOrbit) -> Result<FloquetResult> {
    let field = orbit_field(params, tag, orbit.c0)?;
    let shot = shoot_period(&field, &orbit.anchor_state, orbit.period)?;
    let svd = shot.monodromy.clone().svd(false, false);
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { svd.singular_values.max() / smin } else { f64::INFINITY };
    if condition > 1e12 {
        return Err(Error::MonodromyIllConditioned(condition));
    }
    let mut mu = eigenvalues_real(&shot.monodromy)?;
    let k = (0..mu.len())
        .min_by(|&a, &b| (mu[a] - 1.0).norm().total_cmp(&(mu[b] - 1.0).norm()))
        .expect("nonempty");
    let trivial = mu.swap_remove(k);
    mu.sort_by(|a, b| b.norm().total_cmp(&a.norm()).then(b.im.total_cmp(&a.im)));
    // Liouville: trace integral by composite Simpson along the orbit.
    let m = 512;
    let traj = integrate(&field, &orbit.anchor_state, 0.0, orbit.period, &IntegrateOptions::with_tol(ORBIT_TOL))?;
    let h = orbit.period / m as f64;
    let mut integral = 0.0;
    for i in 0..=m {
        let t = i as f64 * h;
        let x = traj.at(t).unwrap_or_else(|| traj.last().to_vec());
        let w = if i == 0 || i == m { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        integral += w * field.jacobian(&x).trace();
    }
    integral *= h / 3.0;
    let expected = integral.exp();
    let liouville_error = (shot.monodromy.determinant() - expected).abs() / expected.abs();
    Ok(FloquetResult { trivial, nontrivial: mu, liouville_error, condition })
}

/// One point of a continued orbit branch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchPoint {
    /// The orbit.
    pub orbit: PeriodicOrbit,
    /// Its multipliers.
    pub floquet: FloquetResult,
}

/// Continues the orbit branch from `c0_start` toward `c0_end` in
/// natural-parameter steps with a secant predictor; steps halve on Newton
/// failure (down to `10⁻⁶`).
pub fn continue_branch(params: &ModelParams, tag: ScenarioTag, c0_start: f64, c0_end: f64, step: f64) -> Result<Vec<BranchPoint>> {
    let dir = (c0_end - c0_start).signum();
    let mut h = step.abs().max(1e-6);
    let first = continue_periodic_orbit(params, tag, c0_start, &orbit_seed(params, tag, c0_start)?)?;
    let mut out = vec![BranchPoint { floquet: floquet_multipliers(params, tag, &first)?, orbit: first }];
    while (c0_end - out.last().expect("nonempty").orbit.c0) * dir > 1e-12 {
        let cur = &out.last().expect("nonempty").orbit;
        let c_next = if ((c0_end - cur.c0) * dir) < h { c0_end } else { cur.c0 + dir * h };
        let mut pred = cur.clone();
        if out.len() >= 2 {
            let prev = &out[out.len() - 2].orbit;
            let s = (c_next - cur.c0) / (cur.c0 - prev.c0);
            pred.anchor_state = cur.anchor_state.iter().zip(&prev.anchor_state).map(|(a, b)| a + s * (a - b)).collect();
            pred.period = cur.period + s * (cur.period - prev.period);
        }
        match continue_periodic_orbit(params, tag, c_next, &pred) {
            Ok(orbit) => {
                let floquet = floquet_multipliers(params, tag, &orbit)?;
                out.push(BranchPoint { orbit, floquet });
                h = (h * 1.5).min(step.abs());
            }
            Err(e) => {
                h *= 0.5;
                if h < 1e-6 {
                    return Err(e);
                }
            }
        }
    }
    Ok(out)
}

/// Largest nontrivial multiplier modulus minus one, with the critical multiplier.
fn torus_indicator(params: &ModelParams, tag: ScenarioTag, c0: f64, seed: Option<&PeriodicOrbit>) -> Result<(f64, C64, PeriodicOrbit)> {
    let seed = match seed {
        Some(s) => s.clone(),
        None => orbit_seed(params, tag, c0)?,
    };
    let orbit = continue_periodic_orbit(params, tag, c0, &seed)?;
    let fl = floquet_multipliers(params, tag, &orbit)?;
    if (fl.trivial - 1.0).norm() > TRIVIAL_MULTIPLIER_TOL {
        return Err(Error::NoConvergence(format!("trivial multiplier off by {:.3e}", (fl.trivial - 1.0).norm())));
    }
    let crit = fl.nontrivial[0];
    Ok((crit.norm() - 1.0, crit, orbit))
}

/// Locates `c0**` by bisection on `max |μ_nontrivial| − 1` along the branch.
pub fn find_torus_bifurcation(params: &ModelParams, tag: ScenarioTag, bracket: (f64, f64)) -> Result<BifurcationPoint> {
    let (mut lo, mut hi) = bracket;
    let (mut glo, _, mut orb_lo) = torus_indicator(params, tag, lo, None)?;
    let (ghi, _, _) = torus_indicator(params, tag, hi, None)?;
    if glo * ghi > 0.0 {
        return Err(Error::NoSignChange(lo, hi));
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let seed = orbit_seed(params, tag, mid).unwrap_or_else(|_| orb_lo.clone());
        let (gm, _, orb) = torus_indicator(params, tag, mid, Some(&seed))?;
        if gm * glo > 0.0 {
            lo = mid;
            glo = gm;
            orb_lo = orb;
        } else {
            hi = mid;
        }
        if (hi - lo).abs() < 1e-11 {
            break;
        }
    }
    let c0 = 0.5 * (lo + hi);
    let (_, crit, _) = torus_indicator(params, tag, c0, None)?;
    if crit.im.abs() < 1e-6 {
        return Err(Error::FoldOrFlip(crit.re));
    }
    let h = 1e-5;
    let transversality = (torus_indicator(params, tag, c0 + h, None)?.0 - torus_indicator(params, tag, c0 - h, None)?.0) / (2.0 * h);
    Ok(BifurcationPoint { kind: BifurcationKind::Torus, c0, certificate: C64::new(crit.re, crit.im.abs()), transversality })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ModelParams {
        ModelParams { alpha0: 1.0, cu: 1.0, cv: 0.0, gamma1: 0.0, gamma2: 0.0, epsilon: 0.05, b: 0.0 }
    }

    #[test]
    fn origin_stability_regimes() {
        let ev = origin_eigenvalues(&base(), ScenarioTag::II, 3.0).unwrap();
        assert!(ev.iter().all(|z| z.re < 0.0));
        let ev = origin_eigenvalues(&base(), ScenarioTag::II, 1.0).unwrap();
        assert!(ev[0].re > 0.0);
        for z in &ev {
            assert!(ev.iter().any(|w| (w - z.conj()).norm() < 1e-10));
        }
    }

    #[test]
    fn hopf_point_and_certificate() {
        let h = find_hopf(&base(), ScenarioTag::II, (1.1, 2.5)).unwrap();
        assert!((h.c0 - 23.0 / 15.0).abs() < 1e-9, "{}", h.c0);
        assert!(h.certificate.re.abs() < 1e-10 && h.certificate.im > 0.0);
        assert!(h.transversality < 0.0);
        let h2 = find_hopf(&base(), ScenarioTag::II, (1.0, 3.0)).unwrap();
        assert!((h.c0 - h2.c0).abs() < 1e-6);
        assert!(matches!(find_hopf(&base(), ScenarioTag::II, (2.0, 3.0)), Err(Error::NoSignChange(..))));
    }

    #[test]
    fn scan_is_continuous() {
        let scan = origin_spectrum_scan(&base(), ScenarioTag::II, (1.0, 3.0), 41).unwrap();
        for w in scan.windows(2) {
            for (a, b) in w[0].eigenvalues.iter().zip(&w[1].eigenvalues) {
                assert!((a - b).norm() < 0.1);
            }
        }
    }

    #[test]
    fn orbit_newton_and_floquet() {
        let p = base();
        let seed = orbit_seed(&p, ScenarioTag::II, 1.3).unwrap();
        let orbit = continue_periodic_orbit(&p, ScenarioTag::II, 1.3, &seed).unwrap();
        assert!(orbit.residual < ORBIT_RESIDUAL);
        assert!((orbit.period - seed.period).abs() < 1e-8);
        let fl = floquet_multipliers(&p, ScenarioTag::II, &orbit).unwrap();
        assert!((fl.trivial - 1.0).norm() < TRIVIAL_MULTIPLIER_TOL);
        assert!(fl.max_nontrivial_modulus() < 1.0);
        assert!(fl.liouville_error < 1e-6);
        let fl = floquet_multipliers(&p, ScenarioTag::II, &continue_periodic_orbit(&p, ScenarioTag::II, 0.95, &orbit_seed(&p, ScenarioTag::II, 0.95).unwrap()).unwrap()).unwrap();
        assert!(fl.max_nontrivial_modulus() > 1.0);
    }

    #[test]
    fn floquet_matches_rotating_frame_exponents() {
        // In the co-rotating frame the orbit is an equilibrium; multipliers are e^{λT}.
        let p = base();
        let c0 = 1.2;
        let f = orbit_field(&p, ScenarioTag::II, c0).unwrap();
        let rw = rotating_waves(&f)[0];
        let orbit = continue_periodic_orbit(&p, ScenarioTag::II, c0, &orbit_seed(&p, ScenarioTag::II, c0).unwrap()).unwrap();
        let fl = floquet_multipliers(&p, ScenarioTag::II, &orbit).unwrap();
        // Rotating-frame Jacobian: A = e^{iWξ}(X + iY), Ã = e^{iWξ}(P + iQ).
        let w = rw.rate;
        let mut rot = DMatrix::zeros(4, 4);
        rot[(0, 1)] = w;
        rot[(1, 0)] = -w;
        rot[(2, 3)] = w;
        rot[(3, 2)] = -w;
        let xs = [rw.radius, 0.0, 0.0, rw.radius * w];
        let jac = f.jacobian(&xs) + rot;
        let mut lam = eigenvalues_real(&jac).unwrap();
        sort_by_real_desc(&mut lam);
        let mods: Vec<f64> = lam.iter().map(|l| (l.re * orbit.period).exp()).collect();
        assert!((mods[0] - 1.0).abs() < 1e-8, "{lam:?}");
        let expected = mods[1];
        assert!((fl.max_nontrivial_modulus() - expected).abs() < 1e-7, "{} vs {}", fl.max_nontrivial_modulus(), expected);
    }

    #[test]
    fn supercritical_amplitude_scaling() {
        let p = base();
        let c_star = 23.0 / 15.0;
        let d: Vec<f64> = vec![1e-3, 2e-3, 4e-3, 8e-3];
        let amps: Vec<f64> = d
            .iter()
            .map(|&dd| continue_periodic_orbit(&p, ScenarioTag::II, c_star - dd, &orbit_seed(&p, ScenarioTag::II, c_star - dd).unwrap()).unwrap().amplitude)
            .collect();
        let (lx, ly): (Vec<f64>, Vec<f64>) = d.iter().zip(&amps).map(|(a, b)| (a.ln(), b.ln())).unzip();
        let mx = lx.iter().sum::<f64>() / 4.0;
        let my = ly.iter().sum::<f64>() / 4.0;
        let slope = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / lx.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
        assert!((slope - 0.5).abs() < 0.05, "{slope}");
        let seed = orbit_seed(&p, ScenarioTag::II, c_star - 1e-4).unwrap();
        let hopf = origin_eigenvalues(&p, ScenarioTag::II, c_star).unwrap()[0];
        assert!((seed.period - 2.0 * std::f64::consts::PI / hopf.im.abs()).abs() < 1e-2);
    }

    #[test]
    fn torus_point() {
        let t = find_torus_bifurcation(&base(), ScenarioTag::II, (0.9, 1.3)).unwrap();
        assert!((t.c0 - 1.015).abs() < 1e-2, "{}", t.c0);
        assert!(t.certificate.im > 1e-6);
        assert!((t.certificate.norm() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn scenario_five_restriction_reproduces_hopf() {
        let p = ModelParams { cv: -3.0, ..base() };
        let h2 = find_hopf(&p, ScenarioTag::II, (1.1, 2.5)).unwrap();
        let h5 = find_hopf(&p, ScenarioTag::V, (1.1, 2.5)).unwrap();
        assert!((h2.c0 - h5.c0).abs() < 1e-12);
    }
}
