//! Reduced (center-manifold) amplitude equations for the five front-speed
//! scenarios.
//!
//! State layouts (realification `z ↦ (Re z, Im z)`):
//!
//! | form          | state                          | spatial variable |
//! |---------------|--------------------------------|------------------|
//! | `S1Complex`   | `(A_r, A_i)`                   | `ε²ξ`            |
//! | `S1Radius`    | `(r)`                          | `ε²ξ`            |
//! | `S2`          | `(A_r, A_i, Ã_r, Ã_i)`         | `εξ`             |
//! | `S3Complex`   | `(A_r, A_i, B₁)`               | `ε²ξ`            |
//! | `S3Polar`     | `(r, B₁)`                      | `ε²ξ`            |
//! | `S4Full`      | `(r, φ, B₁)`, `ε ∂B₁ = …`      | `ε²ξ`            |
//! | `S4Slow`      | `(r, φ)` on the critical manifold | `ε²ξ`         |
//! | `S4Fast`      | `(r, φ, B₁)`, `r`, `φ` frozen  | `ξ`              |
//! | `S5`          | `(A_r, A_i, Ã_r, Ã_i, B₁)`     | `εξ`             |
//!
//! **Frequency convention.** The frequency correction `ω0` entering every
//! field is chosen so that the invading pattern is an exact equilibrium:
//! writing the stationary equation as `α0 + iω0 + K_eff r² = 0`, where
//! `K_eff` collects the cubic coefficient and the (real) contribution of the
//! slaved or stationary conserved mode, gives `r² = −α0/Re K_eff` and
//! `ω0 = −Im K_eff · r²`. Without coupling (`γ1 = γ2 = 0`) this is exactly
//! the traveling-wave frequency `ω0*`. The background `B` of
//! [`ModelParams`] is not used: the conserved mode is slaved or dynamic.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{front_speed, ModelParams, Scenario, ScenarioTag};
use crate::ode::VectorField;
use crate::spectrum::{delta, deltas};
use crate::wave::{cubic_coefficient, h2_u, h2_v, invading_state};

type C64 = Complex64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Which reduced system a [`ReducedVectorField`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Form {
    /// Scenario I, complex amplitude.
    S1Complex,
    /// Scenario I, radius equation.
    S1Radius,
    /// Scenario II, `(A, Ã)` system.
    S2,
    /// Scenario III, complex amplitude plus `B₁`.
    S3Complex,
    /// Scenario III, polar `(r, B₁)` subsystem.
    S3Polar,
    /// Scenario IV, full fast–slow system in `(r, φ, B₁)`.
    S4Full,
    /// Scenario IV, slow subsystem on the critical manifold.
    S4Slow,
    /// Scenario IV, fast subsystem (frozen `r`, `φ`).
    S4Fast,
    /// Scenario V, `(A, Ã, B₁)` system.
    S5,
}

/// Named coefficients of a reduced system (complex values serialize as `[re, im]`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientTable {
    /// Scenario tag.
    pub scenario: ScenarioTag,
    /// Front speed `c`.
    pub c: f64,
    /// Speed offset `c0` (0 for Scenario I).
    pub c0: f64,
    /// Frequency correction `ω0` (consistent with the invading equilibrium).
    pub omega0: f64,
    /// Amplitude `r*` of the invading equilibrium.
    pub invading_amplitude: f64,
    /// Cubic coefficient `κ` of the temporal amplitude equation.
    pub kappa: C64,
    /// Effective cubic coefficient `K_eff` at the invading equilibrium.
    pub k_eff: C64,
    /// `3c_u − c` (Scenarios I, III, IV).
    pub denominator: Option<f64>,
    /// Coefficient of `A` (`(α0+iω0)/(3c_u−c)` or `a`).
    pub linear: C64,
    /// Coefficient of `A|A|²`.
    pub cubic: C64,
    /// Coefficient `b` of `Ã` (Scenarios II, V).
    pub damping: Option<C64>,
    /// `Δ` (Scenarios II, V).
    pub delta: Option<C64>,
    /// `δ₊` (Scenarios II, V).
    pub delta_plus: Option<C64>,
    /// `δ₋` (Scenarios II, V).
    pub delta_minus: Option<C64>,
    /// `ã_cub` (Scenario II) or `â_cub` (Scenario V).
    pub a_cub: Option<C64>,
    /// Coefficient of `A B₁` in the amplitude equation (Scenarios III–V).
    pub coupling: Option<C64>,
    /// Coefficient of `B₁` in its own equation (`−c0`).
    pub b1_decay: Option<f64>,
    /// Coefficient of `|A|²` (III, IV) or `Re(A Ã̄)` (V) in the `B₁` equation.
    pub b1_source: Option<f64>,
    /// `γ₂⁰` (Scenario IV).
    pub gamma2_0: Option<f64>,
    /// `ε` multiplying `∂B₁` (Scenario IV full system).
    pub epsilon: f64,
}

/// A reduced vector field with its coefficients and invading equilibrium.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducedVectorField {
    /// Scenario the field belongs to.
    pub scenario: Scenario,
    /// Which system is evaluated.
    pub form: Form,
    /// Named coefficients.
    pub coeffs: CoefficientTable,
    /// Invading equilibrium in this form's coordinates.
    pub invading: Vec<f64>,
    /// Origin in this form's coordinates.
    pub origin: Vec<f64>,
}

/// `f = λA + kA|A|²` and its partial derivatives with respect to `Re A`, `Im A`.
fn cubic_part(lin: C64, cub: C64, a: C64) -> (C64, C64, C64) {
    let m = a.norm_sqr();
    let f = lin * a + cub * a * m;
    let dx = lin + cub * (m + 2.0 * a.re * a);
    let dy = lin * I + cub * (I * m + 2.0 * a.im * a);
    (f, dx, dy)
}

impl ReducedVectorField {
    fn c(&self) -> &CoefficientTable {
        &self.coeffs
    }

    /// Amplitude of the invading equilibrium.
    pub fn a_star(&self) -> f64 {
        self.coeffs.invading_amplitude
    }

    /// Whether the form carries the gauge phase explicitly (complex amplitude).
    pub fn is_complex_form(&self) -> bool {
        matches!(self.form, Form::S1Complex | Form::S2 | Form::S3Complex | Form::S5)
    }

    /// Amplitude `|A|` (or `r`) of a state.
    pub fn amplitude(&self, x: &[f64]) -> f64 {
        match self.form {
            Form::S1Radius | Form::S3Polar | Form::S4Full | Form::S4Slow | Form::S4Fast => x[0].abs(),
            _ => x[0].hypot(x[1]),
        }
    }

    /// Complex amplitude `A` of a state (polar forms use `r e^{iφ}` or `r`).
    pub fn complex_amplitude(&self, x: &[f64]) -> C64 {
        match self.form {
            Form::S1Radius | Form::S3Polar => C64::new(x[0], 0.0),
            Form::S4Full | Form::S4Slow | Form::S4Fast => C64::from_polar(x[0], x[1]),
            _ => C64::new(x[0], x[1]),
        }
    }

    /// Conserved-mode component `B₁` of a state, if dynamic in this form.
    pub fn b1(&self, x: &[f64]) -> Option<f64> {
        match self.form {
            Form::S3Complex | Form::S4Full | Form::S4Fast => Some(x[2]),
            Form::S3Polar => Some(x[1]),
            Form::S5 => Some(x[4]),
            Form::S4Slow => Some(self.critical_manifold(x[0])),
            _ => None,
        }
    }

    /// Scenario IV critical manifold `B₁ = −2γ₂⁰ r²/c0` (zero for other scenarios).
    pub fn critical_manifold(&self, r: f64) -> f64 {
        match self.coeffs.gamma2_0 {
            Some(g) => -2.0 * g * r * r / self.coeffs.c0,
            None => 0.0,
        }
    }

    /// Residual `‖f(x)‖` at the stored invading equilibrium.
    pub fn invading_residual(&self) -> f64 {
        self.rhs(&self.invading).iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl VectorField for ReducedVectorField {
    fn dim(&self) -> usize {
        match self.form {
            Form::S1Radius => 1,
            Form::S1Complex | Form::S3Polar | Form::S4Slow => 2,
            Form::S3Complex | Form::S4Full | Form::S4Fast => 3,
            Form::S2 => 4,
            Form::S5 => 5,
        }
    }

    fn eval(&self, x: &[f64], out: &mut [f64]) {
        let k = self.c();
        match self.form {
            Form::S1Complex => {
                let (f, _, _) = cubic_part(k.linear, k.cubic, C64::new(x[0], x[1]));
                out[0] = f.re;
                out[1] = f.im;
            }
            Form::S1Radius => {
                let r = x[0];
                out[0] = k.linear.re * r + k.cubic.re * r * r * r;
            }
            Form::S2 => {
                let a = C64::new(x[0], x[1]);
                let at = C64::new(x[2], x[3]);
                let (f, _, _) = cubic_part(k.linear, k.cubic, a);
                let g = k.damping.unwrap_or_default() * at + f;
                out[0] = at.re;
                out[1] = at.im;
                out[2] = g.re;
                out[3] = g.im;
            }
            Form::S3Complex => {
                let a = C64::new(x[0], x[1]);
                let (f, _, _) = cubic_part(k.linear, k.cubic, a);
                let g = f + k.coupling.unwrap_or_default() * a * x[2];
                out[0] = g.re;
                out[1] = g.im;
                out[2] = k.b1_decay.unwrap_or(0.0) * x[2] + k.b1_source.unwrap_or(0.0) * a.norm_sqr();
            }
            Form::S3Polar => {
                let (r, b1) = (x[0], x[1]);
                let g = k.coupling.unwrap_or_default().re;
                out[0] = k.linear.re * r + g * r * b1 + k.cubic.re * r * r * r;
                out[1] = k.b1_decay.unwrap_or(0.0) * b1 + k.b1_source.unwrap_or(0.0) * r * r;
            }
            Form::S4Full | Form::S4Fast | Form::S4Slow => {
                let r = x[0];
                let b1 = if self.form == Form::S4Slow { self.critical_manifold(r) } else { x[2] };
                let g = k.coupling.unwrap_or_default().re;
                if self.form == Form::S4Fast {
                    out[0] = 0.0;
                    out[1] = 0.0;
                } else {
                    out[0] = k.linear.re * r + g * r * b1 + k.cubic.re * r * r * r;
                    out[1] = k.linear.im + k.cubic.im * r * r;
                }
                let g20 = k.gamma2_0.unwrap_or(0.0);
                let fast = k.b1_decay.unwrap_or(0.0) * b1 - 2.0 * g20 * r * r + k.epsilon * k.b1_source.unwrap_or(0.0) * r * r;
                match self.form {
                    Form::S4Full => out[2] = fast / k.epsilon,
                    Form::S4Fast => out[2] = k.b1_decay.unwrap_or(0.0) * b1 - 2.0 * g20 * r * r,
                    _ => {}
                }
            }
            Form::S5 => {
                let a = C64::new(x[0], x[1]);
                let at = C64::new(x[2], x[3]);
                let (f, _, _) = cubic_part(k.linear, k.cubic, a);
                let g = k.damping.unwrap_or_default() * at + f + k.coupling.unwrap_or_default() * a * x[4];
                out[0] = at.re;
                out[1] = at.im;
                out[2] = g.re;
                out[3] = g.im;
                out[4] = k.b1_decay.unwrap_or(0.0) * x[4] + k.b1_source.unwrap_or(0.0) * (a.re * at.re + a.im * at.im);
            }
        }
    }

    fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let k = self.c();
        let n = self.dim();
        let mut j = DMatrix::zeros(n, n);
        let put_complex = |j: &mut DMatrix<f64>, row: usize, col: usize, d: C64| {
            j[(row, col)] = d.re;
            j[(row + 1, col)] = d.im;
        };
        match self.form {
            Form::S1Complex => {
                let (_, dx, dy) = cubic_part(k.linear, k.cubic, C64::new(x[0], x[1]));
                put_complex(&mut j, 0, 0, dx);
                put_complex(&mut j, 0, 1, dy);
            }
            Form::S1Radius => {
                j[(0, 0)] = k.linear.re + 3.0 * k.cubic.re * x[0] * x[0];
            }
            Form::S2 | Form::S5 => {
                let a = C64::new(x[0], x[1]);
                let (_, dx, dy) = cubic_part(k.linear, k.cubic, a);
                let b = k.damping.unwrap_or_default();
                j[(0, 2)] = 1.0;
                j[(1, 3)] = 1.0;
                let (mut dx, mut dy) = (dx, dy);
                if self.form == Form::S5 {
                    let g = k.coupling.unwrap_or_default();
                    dx += g * x[4];
                    dy += g * I * x[4];
                    put_complex(&mut j, 2, 4, g * a);
                    let s = k.b1_source.unwrap_or(0.0);
                    j[(4, 0)] = s * x[2];
                    j[(4, 1)] = s * x[3];
                    j[(4, 2)] = s * x[0];
                    j[(4, 3)] = s * x[1];
                    j[(4, 4)] = k.b1_decay.unwrap_or(0.0);
                }
                put_complex(&mut j, 2, 0, dx);
                put_complex(&mut j, 2, 1, dy);
                put_complex(&mut j, 2, 2, b);
                put_complex(&mut j, 2, 3, b * I);
            }
            Form::S3Complex => {
                let a = C64::new(x[0], x[1]);
                let g = k.coupling.unwrap_or_default();
                let (_, dx, dy) = cubic_part(k.linear, k.cubic, a);
                put_complex(&mut j, 0, 0, dx + g * x[2]);
                put_complex(&mut j, 0, 1, dy + g * I * x[2]);
                put_complex(&mut j, 0, 2, g * a);
                let s = k.b1_source.unwrap_or(0.0);
                j[(2, 0)] = 2.0 * s * x[0];
                j[(2, 1)] = 2.0 * s * x[1];
                j[(2, 2)] = k.b1_decay.unwrap_or(0.0);
            }
            Form::S3Polar => {
                let (r, b1) = (x[0], x[1]);
                let g = k.coupling.unwrap_or_default().re;
                j[(0, 0)] = k.linear.re + g * b1 + 3.0 * k.cubic.re * r * r;
                j[(0, 1)] = g * r;
                j[(1, 0)] = 2.0 * k.b1_source.unwrap_or(0.0) * r;
                j[(1, 1)] = k.b1_decay.unwrap_or(0.0);
            }
            Form::S4Full | Form::S4Fast | Form::S4Slow => {
                let r = x[0];
                let g = k.coupling.unwrap_or_default().re;
                let g20 = k.gamma2_0.unwrap_or(0.0);
                let decay = k.b1_decay.unwrap_or(0.0);
                match self.form {
                    Form::S4Slow => {
                        let m = -2.0 * g20 / k.c0;
                        j[(0, 0)] = k.linear.re + 3.0 * (k.cubic.re + g * m) * r * r;
                        j[(1, 0)] = 2.0 * k.cubic.im * r;
                    }
                    Form::S4Full => {
                        let b1 = x[2];
                        j[(0, 0)] = k.linear.re + g * b1 + 3.0 * k.cubic.re * r * r;
                        j[(0, 2)] = g * r;
                        j[(1, 0)] = 2.0 * k.cubic.im * r;
                        j[(2, 0)] = (-4.0 * g20 * r + 2.0 * k.epsilon * k.b1_source.unwrap_or(0.0) * r) / k.epsilon;
                        j[(2, 2)] = decay / k.epsilon;
                    }
                    _ => {
                        j[(2, 0)] = -4.0 * g20 * r;
                        j[(2, 2)] = decay;
                    }
                }
            }
        }
        j
    }
}

fn nonzero(value: f64, what: &str) -> Result<f64> {
    if value == 0.0 || !value.is_finite() {
        Err(Error::DegenerateScenario(format!("{what} vanishes")))
    } else {
        Ok(value)
    }
}

fn base_table(tag: ScenarioTag, c: f64, c0: f64, kappa: C64) -> CoefficientTable {
    let zero = C64::new(0.0, 0.0);
    CoefficientTable {
        scenario: tag,
        c,
        c0,
        omega0: 0.0,
        invading_amplitude: 0.0,
        kappa,
        k_eff: kappa,
        denominator: None,
        linear: zero,
        cubic: zero,
        damping: None,
        delta: None,
        delta_plus: None,
        delta_minus: None,
        a_cub: None,
        coupling: None,
        b1_decay: None,
        b1_source: None,
        gamma2_0: None,
        epsilon: 0.0,
    }
}

/// Cubic coefficient `−3 − 1/(9+6ic_u) − 2γ1/(2−i(c_u+c_v))` of Scenarios III–V (`γ₂` dropped).
pub fn kappa_hat(params: &ModelParams) -> C64 {
    C64::new(-3.0, 0.0) - C64::new(1.0, 0.0) / C64::new(9.0, 6.0 * params.cu)
        - 2.0 * params.gamma1 / C64::new(2.0, -(params.cu + params.cv))
}

/// Scenario I: `∂A = [(α0+iω0)A + κ_I A|A|²]/(3c_u−c)` with `κ_I = 2γ2/(c_v+c) + κ`.
pub fn build_s1(params: &ModelParams, c: f64) -> Result<ReducedVectorField> {
    params.validate()?;
    let den = nonzero(3.0 * params.cu - c, "3c_u − c")?;
    let kappa = cubic_coefficient(params);
    let k_eff = if params.gamma2 != 0.0 { kappa + 2.0 * params.gamma2 / nonzero(c + params.cv, "c + c_v")? } else { kappa };
    let (r, w) = invading_state(params.alpha0, k_eff)?;
    let mut t = base_table(ScenarioTag::I, c, 0.0, kappa);
    t.k_eff = k_eff;
    t.omega0 = w;
    t.invading_amplitude = r;
    t.denominator = Some(den);
    t.linear = C64::new(params.alpha0, w) / den;
    t.cubic = k_eff / den;
    t.epsilon = params.epsilon;
    Ok(ReducedVectorField { scenario: Scenario::one(c), form: Form::S1Complex, coeffs: t, invading: vec![r, 0.0], origin: vec![0.0, 0.0] })
}

/// Scenario I radius equation `∂r = [α0 r + Re(κ_I) r³]/(3c_u − c)`.
pub fn build_s1_radius(params: &ModelParams, c: f64) -> Result<ReducedVectorField> {
    let mut f = build_s1(params, c)?;
    f.form = Form::S1Radius;
    f.invading = vec![f.coeffs.invading_amplitude];
    f.origin = vec![0.0];
    Ok(f)
}

/// Scenario II: `∂A = Ã`, `∂Ã = bÃ + aA + c̃ A|A|²` with
/// `a = (Δ² − c0²)/(8+6ic_u)²`, `b = −2c0/(8+6ic_u)`, `c̃ = −2ã_cub/(8+6ic_u)`.
pub fn build_s2(params: &ModelParams, c0: f64) -> Result<ReducedVectorField> {
    params.validate()?;
    let scenario = Scenario::two(c0);
    let c = front_speed(params, &scenario)?;
    let kappa = cubic_coefficient(params);
    let a_tilde = if params.gamma1 != 0.0 { kappa + 2.0 * params.gamma1 / nonzero(c + params.cv, "c + c_v")? } else { kappa };
    let (r, w) = invading_state(params.alpha0, a_tilde)?;
    let mut t = base_table(ScenarioTag::II, c, c0, kappa);
    s2_core(&mut t, params.cu, c0, params.alpha0, w, a_tilde)?;
    t.invading_amplitude = r;
    t.epsilon = params.epsilon;
    Ok(ReducedVectorField { scenario, form: Form::S2, coeffs: t, invading: vec![r, 0.0, 0.0, 0.0], origin: vec![0.0; 4] })
}

fn s2_core(t: &mut CoefficientTable, cu: f64, c0: f64, alpha0: f64, w: f64, a_cub: C64) -> Result<()> {
    let mu = C64::new(alpha0, w);
    let d = delta(cu, c0, mu);
    if d.norm() == 0.0 {
        return Err(Error::DegenerateScenario("Δ = 0: the two central eigenvalues collide".into()));
    }
    let (dp, dm) = deltas(cu, c0, mu);
    let den = C64::new(8.0, 6.0 * cu);
    t.omega0 = w;
    t.k_eff = a_cub;
    t.delta = Some(d);
    t.delta_plus = Some(dp);
    t.delta_minus = Some(dm);
    t.a_cub = Some(a_cub);
    t.linear = (d * d - c0 * c0) / (den * den);
    t.damping = Some(-2.0 * c0 / den);
    t.cubic = -2.0 * a_cub / den;
    Ok(())
}

/// Scenario III: `∂A = [(α0+iω0)A + AB₁ + κ̂ A|A|²]/(3c_u−c)`,
/// `∂B₁ = −c0 B₁ − 4γ1α0|A|²/(3c_u−c)`.
pub fn build_s3(params: &ModelParams, c0: f64) -> Result<ReducedVectorField> {
    params.validate()?;
    if params.gamma2 != 0.0 {
        return Err(Error::Gamma2NotZero(params.gamma2));
    }
    let scenario = Scenario::three(c0);
    let c = front_speed(params, &scenario)?;
    let den = nonzero(3.0 * params.cu - c, "3c_u − c")?;
    let kh = kappa_hat(params);
    let source = -4.0 * params.gamma1 * params.alpha0 / den;
    // Stationary B₁ = source·r²/c0 adds a real contribution to the cubic coefficient.
    let k_eff = kh + source / c0;
    let (r, w) = invading_state(params.alpha0, k_eff)?;
    let mut t = base_table(ScenarioTag::III, c, c0, cubic_coefficient(params));
    t.k_eff = k_eff;
    t.omega0 = w;
    t.invading_amplitude = r;
    t.denominator = Some(den);
    t.linear = C64::new(params.alpha0, w) / den;
    t.cubic = kh / den;
    t.a_cub = Some(kh);
    t.coupling = Some(C64::new(1.0 / den, 0.0));
    t.b1_decay = Some(-c0);
    t.b1_source = Some(source);
    t.epsilon = params.epsilon;
    let b1 = source * r * r / c0;
    Ok(ReducedVectorField { scenario, form: Form::S3Complex, coeffs: t, invading: vec![r, 0.0, b1], origin: vec![0.0; 3] })
}

/// Scenario III polar subsystem in `(r, B₁)`.
pub fn build_s3_polar(params: &ModelParams, c0: f64) -> Result<ReducedVectorField> {
    let mut f = build_s3(params, c0)?;
    f.form = Form::S3Polar;
    f.invading = vec![f.invading[0], f.invading[2]];
    f.origin = vec![0.0; 2];
    Ok(f)
}

/// The Scenario IV fast–slow family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct S4System {
    /// Full system with `ε ∂B₁` (present for `ε > 0`).
    pub full: Option<ReducedVectorField>,
    /// Slow subsystem on the critical manifold.
    pub slow: ReducedVectorField,
    /// Fast subsystem.
    pub fast: ReducedVectorField,
    /// `γ₂⁰`.
    pub gamma2_0: f64,
    /// `c0`.
    pub c0: f64,
}

impl S4System {
    /// Critical manifold `B₁ = −2γ₂⁰ r²/c0`.
    pub fn critical_manifold(&self, r: f64) -> f64 {
        -2.0 * self.gamma2_0 * r * r / self.c0
    }

    /// Linearization of the slow radius equation at the uncoupled invading
    /// amplitude `A*` (`A*² = −α0/Re κ̂`):
    /// `L = −2α0/(3c_u−c) − 6A*²γ₂⁰/(c0(3c_u−c))`, positive exactly when
    /// `γ₂⁰ > −c0 α0/(3A*²)` (which at `α0 = 1` reads `γ₂⁰ > −c0(1 + 1/(3(9+4c_u²)))`).
    pub fn slow_linearization_at_pf(&self, params: &ModelParams) -> f64 {
        let den = self.slow.coeffs.denominator.expect("Scenario IV has a denominator");
        let a2 = -params.alpha0 / kappa_hat(&ModelParams { gamma1: 0.0, ..*params }).re;
        -2.0 * params.alpha0 / den - 6.0 * a2 * self.gamma2_0 / (self.c0 * den)
    }

    /// The condition on `γ₂⁰` under which the slow flow connects the invading state to the origin.
    pub fn gamma2_0_condition(c0: f64, cu: f64) -> f64 {
        -c0 * (1.0 + 1.0 / (3.0 * (9.0 + 4.0 * cu * cu)))
    }
}

/// Scenario IV (`c = −c_v + εc0`, `γ2 = εγ₂⁰`) in polar form:
///
/// ```text
/// ∂r  = [α0 r + r B₁ + Re κ̂ r³]/(3c_u − c)
/// ∂φ  = [ω0 + Im κ̂ r²]/(3c_u − c)
/// ε∂B₁ = −c0 B₁ − 2γ₂⁰ r² − ε 4γ1α0 r²/(3c_u − c)
/// ```
pub fn build_s4(params: &ModelParams, c0: f64, gamma2_0: f64) -> Result<S4System> {
    params.validate()?;
    nonzero(c0, "c0")?;
    let scenario = Scenario::four(c0, gamma2_0);
    let p = scenario.apply(params);
    let c = front_speed(&p, &scenario)?;
    let den = nonzero(3.0 * p.cu - c, "3c_u − c")?;
    let kh = kappa_hat(&p);
    let source = -4.0 * p.gamma1 * p.alpha0 / den;
    let make = |eps: f64, form: Form| -> Result<ReducedVectorField> {
        let k_eff = kh + (-2.0 * gamma2_0 + eps * source) / c0;
        let (r, w) = invading_state(p.alpha0, k_eff)?;
        let mut t = base_table(ScenarioTag::IV, c, c0, cubic_coefficient(&p));
        t.k_eff = k_eff;
        t.omega0 = w;
        t.invading_amplitude = r;
        t.denominator = Some(den);
        t.linear = C64::new(p.alpha0, w) / den;
        t.cubic = kh / den;
        t.a_cub = Some(kh);
        t.coupling = Some(C64::new(1.0 / den, 0.0));
        t.b1_decay = Some(-c0);
        t.b1_source = Some(source);
        t.gamma2_0 = Some(gamma2_0);
        t.epsilon = eps;
        let b1 = (-2.0 * gamma2_0 + eps * source) * r * r / c0;
        let (invading, origin) = match form {
            Form::S4Slow => (vec![r, 0.0], vec![0.0; 2]),
            _ => (vec![r, 0.0, b1], vec![0.0; 3]),
        };
        Ok(ReducedVectorField { scenario, form, coeffs: t, invading, origin })
    };
    let full = if p.epsilon > 0.0 { Some(make(p.epsilon, Form::S4Full)?) } else { None };
    Ok(S4System { full, slow: make(0.0, Form::S4Slow)?, fast: make(0.0, Form::S4Fast)?, gamma2_0, c0 })
}

/// Scenario V (`c_v = −3c_u`, `γ2 = 0`): Scenario II core with `â_cub = κ̂`, coupling
/// `−2AB₁/(8+6ic_u)` and `∂B₁ = −c0 B₁ − 4γ1 Re(A Ã̄)`.
pub fn build_s5(params: &ModelParams, c0: f64) -> Result<ReducedVectorField> {
    params.validate()?;
    let scenario = Scenario::five(c0);
    scenario.check(params, crate::model::DEFAULT_SCENARIO_TOL)?;
    let c = front_speed(params, &scenario)?;
    let kh = kappa_hat(params);
    let (r, w) = invading_state(params.alpha0, kh)?;
    let mut t = base_table(ScenarioTag::V, c, c0, cubic_coefficient(params));
    s2_core(&mut t, params.cu, c0, params.alpha0, w, kh)?;
    t.invading_amplitude = r;
    t.coupling = Some(-2.0 / C64::new(8.0, 6.0 * params.cu));
    t.b1_decay = Some(-c0);
    t.b1_source = Some(-4.0 * params.gamma1);
    t.epsilon = params.epsilon;
    Ok(ReducedVectorField { scenario, form: Form::S5, coeffs: t, invading: vec![r, 0.0, 0.0, 0.0, 0.0], origin: vec![0.0; 5] })
}

/// Builds the default reduced field for a scenario (complex forms for I–III and V,
/// the full fast–slow system for IV).
pub fn build(params: &ModelParams, scenario: &Scenario) -> Result<ReducedVectorField> {
    match scenario.tag {
        ScenarioTag::I => build_s1(params, scenario.c.ok_or_else(|| Error::InvalidParameter("scenario I needs a speed c".into()))?),
        ScenarioTag::II => build_s2(params, scenario.c0),
        ScenarioTag::III => build_s3(params, scenario.c0),
        ScenarioTag::IV => build_s4(params, scenario.c0, scenario.gamma2_0)?
            .full
            .ok_or_else(|| Error::InvalidParameter("the full Scenario IV system needs epsilon > 0".into())),
        ScenarioTag::V => build_s5(params, scenario.c0),
    }
}

/// Conserved mode slaved to the amplitude: `B = coefficient · |A|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlavedMode {
    /// Scenario tag.
    pub scenario: ScenarioTag,
    /// `2γ2/(c+c_v)` (Scenario I) or `2γ1/(c+c_v)` (Scenario II).
    pub coefficient: f64,
}

impl SlavedMode {
    /// `B(|A|²)`.
    pub fn b_of(&self, a2: f64) -> f64 {
        self.coefficient * a2
    }
}

/// Slaved conserved mode: Scenario I `B = 2γ2|A|²/(c+c_v)`, Scenario II
/// `B = 2γ1|A₊+A₋|²/(c+c_v)`. Scenarios III–V have a dynamic `B₁` (`NotSlaved`).
pub fn slaved_b(tag: ScenarioTag, params: &ModelParams, c: f64) -> Result<SlavedMode> {
    let gamma = match tag {
        ScenarioTag::I => params.gamma2,
        ScenarioTag::II => params.gamma1,
        other => return Err(Error::NotSlaved(other.to_string())),
    };
    let coefficient = if gamma == 0.0 { 0.0 } else { 2.0 * gamma / nonzero(c + params.cv, "c + c_v")? };
    Ok(SlavedMode { scenario: tag, coefficient })
}

/// Second-harmonic amplitudes of `e^{2ip}` in `u` and `v` (times `ε²`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecondHarmonics {
    /// `i S²/(9+6ic_u)`.
    pub hu2: C64,
    /// `(−2γ1+iγ2) S²/(2−i(c_u+c_v))`.
    pub hv2: C64,
}

/// Second harmonics for first-harmonic amplitude `S` (`A`, or `A₊+A₋` in II/V).
pub fn second_harmonics(params: &ModelParams, s: C64) -> SecondHarmonics {
    let s2 = s * s;
    SecondHarmonics { hu2: h2_u(params.cu) * s2, hv2: h2_v(params) * s2 }
}

/// Maps diagonal coordinates `(A₊, A₋)` to `(A, Ã)`:
/// `A = A₊ + A₋`, `Ã = (−c0(A₊+A₋) + Δ(A₊−A₋))/(8+6ic_u)`.
pub fn diagonal_to_reduced(cu: f64, c0: f64, delta: C64, ap: C64, am: C64) -> (C64, C64) {
    let den = C64::new(8.0, 6.0 * cu);
    (ap + am, (-c0 * (ap + am) + delta * (ap - am)) / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::fd_jacobian;
    use crate::wave::leading_order;

    fn base() -> ModelParams {
        ModelParams { alpha0: 1.0, cu: 1.0, cv: 0.0, gamma1: 0.0, gamma2: 0.0, epsilon: 0.05, b: 0.0 }
    }

    #[test]
    fn s1_circle_of_fixed_points() {
        let f = build_s1(&base(), 5.0).unwrap();
        assert!((f.a_star().powi(2) - 13.0 / 40.0).abs() < 1e-14);
        for k in 0..8 {
            let z = C64::from_polar(f.a_star(), k as f64 * 0.7);
            assert!(f.rhs(&[z.re, z.im]).iter().all(|v| v.abs() < 1e-14));
        }
    }

    #[test]
    fn s1_radius_rational_coefficient() {
        let f = build_s1_radius(&base(), 5.0).unwrap();
        let den = 3.0 - 5.0;
        assert!((f.coeffs.cubic.re * den + 40.0 / 13.0).abs() < 1e-14);
        assert!((f.coeffs.linear.re * den - 1.0).abs() < 1e-15);
    }

    #[test]
    fn s1_frequency_equals_wave_frequency_without_coupling() {
        let p = ModelParams { cu: -0.7, ..base() };
        let f = build_s1(&p, 2.0).unwrap();
        assert!((f.coeffs.omega0 - leading_order(&p).unwrap().omega0_star).abs() < 1e-15);
    }

    #[test]
    fn s2_vieta_and_substitution() {
        let f = build_s2(&base(), 1.3).unwrap();
        let t = &f.coeffs;
        let (dp, dm) = (t.delta_plus.unwrap(), t.delta_minus.unwrap());
        assert!((t.linear + dp * dm).norm() < 1e-14, "a = −δ₊δ₋ for λ² − bλ + a form");
        assert!((t.damping.unwrap() - (dp + dm)).norm() < 1e-14);
        // Diagonal δ±-system maps onto the linear part of the (A, Ã) system.
        let (ap, am) = (C64::new(0.3, -0.1), C64::new(-0.2, 0.4));
        let (a, at) = diagonal_to_reduced(1.0, 1.3, t.delta.unwrap(), ap, am);
        let (da, dat) = diagonal_to_reduced(1.0, 1.3, t.delta.unwrap(), dp * ap, dm * am);
        assert!((da - at).norm() < 1e-14);
        assert!((dat - (t.damping.unwrap() * at + t.linear * a)).norm() < 1e-14);
    }

    #[test]
    fn s2_invading_fixed_point_and_reversibility() {
        let f = build_s2(&base(), 2.0).unwrap();
        assert!(f.invading_residual() < 1e-12);
        assert!((f.a_star().powi(2) - 0.325).abs() < 1e-14);
        let g = build_s2(&base(), -2.0).unwrap();
        let x = [0.3, -0.2, 0.1, 0.05];
        let fx = f.rhs(&x);
        let gx = g.rhs(&[x[0], x[1], -x[2], -x[3]]);
        // d/dt (A, −Ã)(−t) = (−Ȧ, Ã̇): reversed field equals R∘(−f).
        assert!((gx[0] + fx[0]).abs() < 1e-14 && (gx[1] + fx[1]).abs() < 1e-14);
        assert!((gx[2] - fx[2]).abs() < 1e-14 && (gx[3] - fx[3]).abs() < 1e-14);
    }

    #[test]
    fn s3_reduces_to_s1_without_coupling() {
        let p = ModelParams { cv: -4.0, ..base() };
        let f3 = build_s3(&p, 1.0).unwrap();
        let c = f3.coeffs.c;
        let f1 = build_s1(&p, c).unwrap();
        let x = [0.3, -0.4];
        let r3 = f3.rhs(&[x[0], x[1], 0.0]);
        let r1 = f1.rhs(&x);
        assert!((r3[0] - r1[0]).abs() < 1e-14 && (r3[1] - r1[1]).abs() < 1e-14 && r3[2] == 0.0);
        assert!(f3.invading_residual() < 1e-14);
        assert!(matches!(build_s3(&ModelParams { gamma2: 0.1, ..p }, 1.0), Err(Error::Gamma2NotZero(_))));
    }

    #[test]
    fn s4_fast_slow_structure() {
        let p = ModelParams { cv: -4.0, gamma1: 0.0, ..base() };
        let sys = build_s4(&p, 1.0, 0.3).unwrap();
        let full = sys.full.as_ref().unwrap();
        assert!(full.invading_residual() < 1e-12);
        assert!((full.invading[2] - sys.critical_manifold(full.a_star())).abs() < 1e-14);
        for r in [0.1, 0.4, 0.7] {
            let fast = sys.fast.rhs(&[r, 0.2, 0.5]);
            assert_eq!(fast[0], 0.0);
            let slow = sys.slow.rhs(&[r, 0.2]);
            let on_c0 = full.rhs(&[r, 0.2, sys.critical_manifold(r)]);
            assert!((slow[0] - on_c0[0]).abs() < 1e-14 && (slow[1] - on_c0[1]).abs() < 1e-14);
        }
        assert!(sys.slow_linearization_at_pf(&p) > 0.0);
    }

    #[test]
    fn s5_restriction_to_s2() {
        let p = ModelParams { cv: -3.0, ..base() };
        let f5 = build_s5(&p, 2.0).unwrap();
        let f2 = build_s2(&p, 2.0).unwrap();
        let x = [0.3, -0.2, 0.1, 0.05];
        let r5 = f5.rhs(&[x[0], x[1], x[2], x[3], 0.0]);
        let r2 = f2.rhs(&x);
        for i in 0..4 {
            assert!((r5[i] - r2[i]).abs() < 1e-14);
        }
        assert_eq!(r5[4], 0.0);
    }

    #[test]
    fn jacobians_match_finite_differences() {
        let fields = vec![
            build_s1(&ModelParams { gamma2: 0.1, gamma1: 0.05, ..base() }, 5.0).unwrap(),
            build_s1_radius(&base(), -2.0).unwrap(),
            build_s2(&ModelParams { gamma1: 0.05, ..base() }, 1.3).unwrap(),
            build_s3(&ModelParams { cv: -4.0, gamma1: 0.05, ..base() }, 1.0).unwrap(),
            build_s3_polar(&ModelParams { cv: -4.0, gamma1: 0.05, ..base() }, 1.0).unwrap(),
            build_s4(&ModelParams { cv: -4.0, gamma1: 0.05, ..base() }, 1.0, 0.2).unwrap().full.unwrap(),
            build_s4(&ModelParams { cv: -4.0, gamma1: 0.05, ..base() }, 1.0, 0.2).unwrap().slow,
            build_s4(&ModelParams { cv: -4.0, gamma1: 0.05, ..base() }, 1.0, 0.2).unwrap().fast,
            build_s5(&ModelParams { cv: -3.0, gamma1: 0.02, ..base() }, 2.0).unwrap(),
        ];
        for f in &fields {
            let x: Vec<f64> = (0..f.dim()).map(|i| 0.3 - 0.17 * i as f64).collect();
            let ja = f.jacobian(&x);
            let jf = fd_jacobian(f, &x);
            assert!((&ja - &jf).norm() <= 1e-6 * ja.norm().max(1.0), "{:?}: {ja} vs {jf}", f.form);
        }
    }

    #[test]
    fn slaved_mode_values() {
        let p = ModelParams { gamma2: 0.1, ..base() };
        let s = slaved_b(ScenarioTag::I, &p, 5.0).unwrap();
        assert!((s.b_of(0.325) - 0.013).abs() < 1e-15);
        assert_eq!(slaved_b(ScenarioTag::I, &base(), 5.0).unwrap().b_of(1.0), 0.0);
        assert!(matches!(slaved_b(ScenarioTag::III, &p, 5.0), Err(Error::NotSlaved(_))));
    }

    #[test]
    fn second_harmonics_match_wave() {
        let p = ModelParams { gamma1: 0.2, gamma2: -0.1, ..base() };
        let a = C64::new(0.4, 0.1);
        let h = second_harmonics(&p, a);
        let w = leading_order(&p).unwrap();
        assert!((h.hu2 - w.h2_u * a * a).norm() < 1e-15);
        assert!((h.hv2 - w.h2_v * a * a).norm() < 1e-15);
        assert_eq!(second_harmonics(&base(), a).hv2, C64::new(0.0, 0.0));
    }
}
