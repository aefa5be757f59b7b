//! Model parameters, linear dispersion relations and scenario classification.
//!
//! The system under study is a dispersive Swift–Hohenberg equation coupled to a
//! conservation law,
//!
//! ```text
//! ∂t u = −(1+∂x²)² u + ε²α0 u + c_u ∂x³ u + u v + u ∂x u − u³
//! ∂t v = ∂x² v + c_v ∂x v + γ1 ∂x²(u²) + γ2 ∂x(u²)
//! ```
//!
//! Dispersion relations are written for Fourier modes `e^{−ikx}` so that the
//! phase velocity of the Swift–Hohenberg part is `+c_u` at the critical
//! wavenumber `k_c = 1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance used to decide whether a speed sits on a scenario relation.
pub const DEFAULT_SCENARIO_TOL: f64 = 1e-8;

/// Physical and bifurcation parameters of the coupled system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Bifurcation strength (instability for `alpha0 > 0`).
    pub alpha0: f64,
    /// Linear dispersion in the Swift–Hohenberg equation; must be nonzero.
    pub cu: f64,
    /// Linear dispersion (advection) in the conservation law.
    pub cv: f64,
    /// Coefficient of `∂x²(u²)` in the conservation law.
    pub gamma1: f64,
    /// Coefficient of `∂x(u²)` in the conservation law.
    pub gamma2: f64,
    /// Small parameter measuring the distance to onset.
    pub epsilon: f64,
    /// Background value of the conserved mode, `v0 = ε² B`.
    #[serde(rename = "B")]
    pub b: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self { alpha0: 1.0, cu: 1.0, cv: 0.0, gamma1: 0.0, gamma2: 0.0, epsilon: 0.1, b: 0.0 }
    }
}

impl ModelParams {
    /// Checks the standing assumptions: finite values, `c_u ≠ 0`, `ε ≥ 0`.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("alpha0", self.alpha0),
            ("cu", self.cu),
            ("cv", self.cv),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("epsilon", self.epsilon),
            ("B", self.b),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite, got {value}")));
            }
        }
        if self.cu == 0.0 {
            return Err(Error::InvalidParameter("cu must be nonzero".into()));
        }
        if self.epsilon < 0.0 {
            return Err(Error::InvalidParameter(format!("epsilon must be >= 0, got {}", self.epsilon)));
        }
        Ok(())
    }

    /// Returns a copy with both coupling coefficients set to zero.
    pub fn uncoupled(&self) -> Self {
        Self { gamma1: 0.0, gamma2: 0.0, ..*self }
    }
}

/// The five speed regimes for which modulating fronts are constructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScenarioTag {
    /// `c` away from both group velocities.
    I,
    /// `c = 3c_u + ε c0` (close to the Swift–Hohenberg group velocity).
    II,
    /// `c = −c_v + ε² c0`, `γ2 = 0`.
    III,
    /// `c = −c_v + ε c0`, `γ2 = ε γ2⁰` (fast–slow structure).
    IV,
    /// `−c_v = 3c_u`, `c = 3c_u + ε c0`, `γ2 = 0`.
    V,
}

impl ScenarioTag {
    /// Number of central eigenvalues (complex eigenvalues counted individually).
    pub fn central_count(self) -> usize {
        match self {
            ScenarioTag::I => 3,
            ScenarioTag::II => 5,
            ScenarioTag::III | ScenarioTag::IV => 4,
            ScenarioTag::V => 6,
        }
    }

    /// Whether the reduced system is written in the `ε ξ` spatial scaling
    /// (otherwise the `ε² ξ` scaling applies).
    pub fn uses_linear_scaling(self) -> bool {
        matches!(self, ScenarioTag::II | ScenarioTag::V)
    }
}

impl std::fmt::Display for ScenarioTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ScenarioTag::I => "I",
            ScenarioTag::II => "II",
            ScenarioTag::III => "III",
            ScenarioTag::IV => "IV",
            ScenarioTag::V => "V",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for ScenarioTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(ScenarioTag::I),
            "II" | "2" => Ok(ScenarioTag::II),
            "III" | "3" => Ok(ScenarioTag::III),
            "IV" | "4" => Ok(ScenarioTag::IV),
            "V" | "5" => Ok(ScenarioTag::V),
            other => Err(Error::InvalidParameter(format!("unknown scenario '{other}'"))),
        }
    }
}

/// A speed regime together with the data that fixes the front speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    /// Which regime.
    pub tag: ScenarioTag,
    /// Speed offset (Scenarios II–V).
    pub c0: f64,
    /// Rescaled coupling `γ2 = ε γ2⁰` (Scenario IV only).
    pub gamma2_0: f64,
    /// User-supplied front speed (Scenario I only).
    pub c: Option<f64>,
}

impl Scenario {
    /// Scenario I with front speed `c`.
    pub fn one(c: f64) -> Self {
        Self { tag: ScenarioTag::I, c0: 0.0, gamma2_0: 0.0, c: Some(c) }
    }
    /// Scenario II with offset `c0`.
    pub fn two(c0: f64) -> Self {
        Self { tag: ScenarioTag::II, c0, gamma2_0: 0.0, c: None }
    }
    /// Scenario III with offset `c0`.
    pub fn three(c0: f64) -> Self {
        Self { tag: ScenarioTag::III, c0, gamma2_0: 0.0, c: None }
    }
    /// Scenario IV with offset `c0` and rescaled coupling `γ2⁰`.
    pub fn four(c0: f64, gamma2_0: f64) -> Self {
        Self { tag: ScenarioTag::IV, c0, gamma2_0, c: None }
    }
    /// Scenario V with offset `c0`.
    pub fn five(c0: f64) -> Self {
        Self { tag: ScenarioTag::V, c0, gamma2_0: 0.0, c: None }
    }

    /// Returns the parameters with the scenario's structural constraints imposed
    /// (`γ2 = ε γ2⁰` in Scenario IV); other scenarios return `params` unchanged.
    pub fn apply(&self, params: &ModelParams) -> ModelParams {
        match self.tag {
            ScenarioTag::IV => ModelParams { gamma2: params.epsilon * self.gamma2_0, ..*params },
            _ => *params,
        }
    }

    /// Checks the scenario invariants against `params` (after [`Scenario::apply`]).
    pub fn check(&self, params: &ModelParams, tol: f64) -> Result<()> {
        params.validate()?;
        match self.tag {
            ScenarioTag::I => {
                let c = self.c.ok_or_else(|| {
                    Error::InvalidParameter("scenario I requires a front speed c".into())
                })?;
                if !c.is_finite() {
                    return Err(Error::InvalidParameter("front speed c must be finite".into()));
                }
            }
            tag => {
                if self.c0 == 0.0 || !self.c0.is_finite() {
                    return Err(Error::MissingSpeedOffset(tag.to_string()));
                }
            }
        }
        if matches!(self.tag, ScenarioTag::III | ScenarioTag::V) && params.gamma2 != 0.0 {
            return Err(Error::Gamma2NotZero(params.gamma2));
        }
        if self.tag == ScenarioTag::V && (params.cv + 3.0 * params.cu).abs() > tol {
            return Err(Error::InvalidParameter(format!(
                "scenario V requires cv = -3 cu, got cv = {} and cu = {}",
                params.cv, params.cu
            )));
        }
        Ok(())
    }
}

/// Linear growth rates of a Fourier mode with wavenumber `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersionSample {
    /// Wavenumber.
    pub k: f64,
    /// Swift–Hohenberg branch `−(1−k²)² + ε²α0 + i c_u k³`.
    pub lambda_u: Complex64,
    /// Conservation-law branch `−k² − i c_v k`.
    pub lambda_v: Complex64,
}

/// Evaluates both linear dispersion relations at wavenumber `k`.
pub fn dispersion(params: &ModelParams, k: f64) -> DispersionSample {
    let eps2 = params.epsilon * params.epsilon;
    let one_minus = 1.0 - k * k;
    let lambda_u = Complex64::new(-one_minus * one_minus + eps2 * params.alpha0, params.cu * k * k * k);
    let lambda_v = Complex64::new(-k * k, -params.cv * k);
    DispersionSample { k, lambda_u, lambda_v }
}

/// Linear phase and group velocities at the critical wavenumber `k_c = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Velocities {
    /// Phase velocity of the Swift–Hohenberg part, `c_u`.
    pub c_phase_u: f64,
    /// Group velocity of the Swift–Hohenberg part, `3 c_u`.
    pub c_group_u: f64,
    /// Phase and group velocity of the conservation law, `−c_v`.
    pub c_group_v: f64,
}

/// Returns `(c_u, 3c_u, −c_v)`.
pub fn group_phase_velocities(params: &ModelParams) -> Velocities {
    Velocities { c_phase_u: params.cu, c_group_u: 3.0 * params.cu, c_group_v: -params.cv }
}

/// Front speed `c` selected by the scenario.
///
/// Scenario I returns the user-supplied speed; II: `3c_u + εc0`;
/// III: `−c_v + ε²c0`; IV and V: `−c_v + εc0`.
pub fn front_speed(params: &ModelParams, scenario: &Scenario) -> Result<f64> {
    let eps = params.epsilon;
    match scenario.tag {
        ScenarioTag::I => scenario
            .c
            .ok_or_else(|| Error::InvalidParameter("scenario I requires a front speed c".into())),
        tag => {
            if scenario.c0 == 0.0 || !scenario.c0.is_finite() {
                return Err(Error::MissingSpeedOffset(tag.to_string()));
            }
            Ok(match tag {
                ScenarioTag::II => 3.0 * params.cu + eps * scenario.c0,
                ScenarioTag::III => -params.cv + eps * eps * scenario.c0,
                _ => -params.cv + eps * scenario.c0,
            })
        }
    }
}

/// Classifies the speed at onset, `c|_{ε=0}`, into one of the five scenarios.
///
/// The relations `c = 3c_u` and `c = −c_v` are tested with tolerance `tol`.
/// Near `−c_v`, Scenario IV is returned when `γ2 ≠ 0` and Scenario III otherwise.
pub fn classify_and_validate(params: &ModelParams, c_onset: f64, tol: f64) -> Result<ScenarioTag> {
    params.validate()?;
    if !c_onset.is_finite() {
        return Err(Error::InvalidParameter("front speed must be finite".into()));
    }
    if (c_onset - params.cu).abs() <= tol {
        return Err(Error::SpeedAtPhaseVelocity { cu: params.cu });
    }
    let d_group_u = (c_onset - 3.0 * params.cu).abs();
    let d_group_v = (c_onset + params.cv).abs();
    let near_u = d_group_u <= tol;
    let near_v = d_group_v <= tol;
    // Group velocities closer than the band width but not both hit: the
    // tolerance cannot tell the regimes apart.
    let resonance_gap = (3.0 * params.cu + params.cv).abs();
    if near_u != near_v && resonance_gap <= 2.0 * tol && resonance_gap > tol {
        return Err(Error::AmbiguousScenario(format!(
            "group velocities 3cu = {} and -cv = {} differ by {resonance_gap:e}, within twice the tolerance {tol:e}",
            3.0 * params.cu,
            -params.cv
        )));
    }
    Ok(match (near_u, near_v) {
        (true, true) => ScenarioTag::V,
        (true, false) => ScenarioTag::II,
        (false, true) if params.gamma2 != 0.0 => ScenarioTag::IV,
        (false, true) => ScenarioTag::III,
        (false, false) => ScenarioTag::I,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(cu: f64, cv: f64) -> ModelParams {
        ModelParams { cu, cv, ..ModelParams::default() }
    }

    #[test]
    fn dispersion_at_critical_wavenumber_onset() {
        let p = ModelParams { epsilon: 0.0, ..params(1.0, 0.0) };
        let s = dispersion(&p, 1.0);
        assert_abs_diff_eq!(s.lambda_u.re, 0.0);
        assert_abs_diff_eq!(s.lambda_u.im, 1.0);
    }

    #[test]
    fn conserved_zero_mode() {
        let p = ModelParams { cv: 2.7, gamma1: 0.3, ..ModelParams::default() };
        assert_eq!(dispersion(&p, 0.0).lambda_v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn dispersion_at_zero_wavenumber_is_direct_substitution() {
        let p = ModelParams { epsilon: 0.1, alpha0: 1.0, cu: 1.0, ..ModelParams::default() };
        let s = dispersion(&p, 0.0);
        assert_abs_diff_eq!(s.lambda_u.re, -1.0 + 0.01, epsilon = 1e-15);
        assert_abs_diff_eq!(s.lambda_u.im, 0.0);
    }

    #[test]
    fn velocities() {
        let v = group_phase_velocities(&params(1.0, 2.0));
        assert_eq!((v.c_phase_u, v.c_group_u, v.c_group_v), (1.0, 3.0, -2.0));
        let v = group_phase_velocities(&params(-0.5, 0.0));
        assert_eq!((v.c_phase_u, v.c_group_u, v.c_group_v), (-0.5, -1.5, 0.0));
        let v = group_phase_velocities(&params(1.0, -3.0));
        assert_eq!(v.c_group_u, v.c_group_v);
    }

    #[test]
    fn front_speeds_per_scenario() {
        let p = ModelParams { epsilon: 0.1, ..params(1.0, 2.0) };
        assert_abs_diff_eq!(front_speed(&p, &Scenario::two(2.0)).unwrap(), 3.2, epsilon = 1e-14);
        assert_abs_diff_eq!(front_speed(&p, &Scenario::three(1.0)).unwrap(), -1.99, epsilon = 1e-14);
        let p5 = ModelParams { epsilon: 0.0, ..params(1.0, -3.0) };
        assert_eq!(front_speed(&p5, &Scenario::five(5.0)).unwrap(), 3.0);
        assert_eq!(front_speed(&p, &Scenario::one(7.5)).unwrap(), 7.5);
        assert!(matches!(front_speed(&p, &Scenario::two(0.0)), Err(Error::MissingSpeedOffset(_))));
    }

    #[test]
    fn classification_examples() {
        let tol = DEFAULT_SCENARIO_TOL;
        assert_eq!(classify_and_validate(&params(1.0, 2.0), 5.0, tol).unwrap(), ScenarioTag::I);
        assert!(matches!(
            classify_and_validate(&params(1.0, 2.0), 1.0, tol),
            Err(Error::SpeedAtPhaseVelocity { .. })
        ));
        assert_eq!(classify_and_validate(&params(1.0, -3.0), 3.0, tol).unwrap(), ScenarioTag::V);
        assert_eq!(classify_and_validate(&params(1.0, 2.0), 3.0, tol).unwrap(), ScenarioTag::II);
        assert_eq!(classify_and_validate(&params(1.0, 2.0), -2.0, tol).unwrap(), ScenarioTag::III);
        let p4 = ModelParams { gamma2: 0.01, ..params(1.0, 2.0) };
        assert_eq!(classify_and_validate(&p4, -2.0, tol).unwrap(), ScenarioTag::IV);
    }

    #[test]
    fn ambiguous_when_group_velocities_nearly_coincide() {
        let p = params(1.0, -3.0 + 1.5e-8);
        let err = classify_and_validate(&p, 3.0, 1e-8).unwrap_err();
        assert_eq!(err.name(), "AmbiguousScenario");
    }

    #[test]
    fn scenario_invariants() {
        let p = ModelParams { gamma2: 0.1, ..params(1.0, 2.0) };
        assert!(matches!(Scenario::three(1.0).check(&p, 1e-8), Err(Error::Gamma2NotZero(_))));
        assert!(Scenario::five(1.0).check(&params(1.0, 2.0), 1e-8).is_err());
        assert!(Scenario::five(1.0).check(&params(1.0, -3.0), 1e-8).is_ok());
        let applied = Scenario::four(1.0, 0.3).apply(&ModelParams { epsilon: 0.05, ..p });
        assert_abs_diff_eq!(applied.gamma2, 0.015, epsilon = 1e-15);
    }

    #[test]
    fn rejects_zero_cu() {
        assert!(params(0.0, 1.0).validate().is_err());
    }
}
