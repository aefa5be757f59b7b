//! Run configuration: the flat `key=value` file format, its merge with
//! command-line flags, and the resolved [`RunConfig`] echoed into every
//! JSON record.
//!
//! The file format is one `key = value` pair per line; blank lines and lines
//! starting with `#` are ignored. Recognized keys are
//! `alpha0 cu cv gamma1 gamma2 epsilon B scenario c0 c gamma2_0 seed`;
//! anything else is rejected.

use crate::CliError;
use modfront_core::model::{Scenario, ScenarioTag};
use modfront_core::ModelParams;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Keys accepted in a configuration file, in canonical order.
pub const CONFIG_KEYS: [&str; 12] = ["alpha0", "cu", "cv", "gamma1", "gamma2", "epsilon", "B", "scenario", "c0", "c", "gamma2_0", "seed"];

/// Partially specified run settings, as read from a file or from flags.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    /// Bifurcation strength.
    pub alpha0: Option<f64>,
    /// Swift–Hohenberg dispersion.
    pub cu: Option<f64>,
    /// Conservation-law advection.
    pub cv: Option<f64>,
    /// Coefficient of `∂x²(u²)`.
    pub gamma1: Option<f64>,
    /// Coefficient of `∂x(u²)`.
    pub gamma2: Option<f64>,
    /// Distance to onset.
    pub epsilon: Option<f64>,
    /// Background of the conserved mode.
    pub b: Option<f64>,
    /// Speed regime.
    pub scenario: Option<ScenarioTag>,
    /// Speed offset (II–V).
    pub c0: Option<f64>,
    /// Front speed (I).
    pub c: Option<f64>,
    /// Rescaled coupling (IV).
    pub gamma2_0: Option<f64>,
    /// Seed for randomized runs.
    pub seed: Option<u64>,
}

impl Overrides {
    /// Values of `top` where present, otherwise those of `self`.
    pub fn overridden_by(self, top: Overrides) -> Overrides {
        Overrides {
            alpha0: top.alpha0.or(self.alpha0),
            cu: top.cu.or(self.cu),
            cv: top.cv.or(self.cv),
            gamma1: top.gamma1.or(self.gamma1),
            gamma2: top.gamma2.or(self.gamma2),
            epsilon: top.epsilon.or(self.epsilon),
            b: top.b.or(self.b),
            scenario: top.scenario.or(self.scenario),
            c0: top.c0.or(self.c0),
            c: top.c.or(self.c),
            gamma2_0: top.gamma2_0.or(self.gamma2_0),
            seed: top.seed.or(self.seed),
        }
    }
}

fn parse_number(key: &str, value: &str, line: usize) -> Result<f64, CliError> {
    let v: f64 = value
        .parse()
        .map_err(|_| CliError::Usage(format!("config line {line}: value of {key} is not a number: {value:?}")))?;
    if !v.is_finite() {
        return Err(CliError::Usage(format!("config line {line}: value of {key} must be finite")));
    }
    Ok(v)
}

/// Parses the text of a configuration file.
pub fn parse_config(text: &str) -> Result<Overrides, CliError> {
    let mut o = Overrides::default();
    let mut seen: Vec<&str> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {line}: expected key=value, got {content:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        let known = CONFIG_KEYS
            .iter()
            .find(|k| **k == key)
            .ok_or_else(|| CliError::Usage(format!("config line {line}: unknown key {key:?} (known keys: {})", CONFIG_KEYS.join(", "))))?;
        if seen.contains(known) {
            return Err(CliError::Usage(format!("config line {line}: duplicate key {key:?}")));
        }
        seen.push(known);
        let num = || parse_number(key, value, line);
        match key {
            "alpha0" => o.alpha0 = Some(num()?),
            "cu" => o.cu = Some(num()?),
            "cv" => o.cv = Some(num()?),
            "gamma1" => o.gamma1 = Some(num()?),
            "gamma2" => o.gamma2 = Some(num()?),
            "epsilon" => o.epsilon = Some(num()?),
            "B" => o.b = Some(num()?),
            "c0" => o.c0 = Some(num()?),
            "c" => o.c = Some(num()?),
            "gamma2_0" => o.gamma2_0 = Some(num()?),
            "scenario" => {
                o.scenario = Some(
                    value
                        .parse()
                        .map_err(|_| CliError::Usage(format!("config line {line}: unknown scenario {value:?} (use I, II, III, IV or V)")))?,
                )
            }
            "seed" => {
                o.seed = Some(
                    value
                        .parse()
                        .map_err(|_| CliError::Usage(format!("config line {line}: seed must be a nonnegative integer, got {value:?}")))?,
                )
            }
            _ => unreachable!("key checked against CONFIG_KEYS"),
        }
    }
    Ok(o)
}

/// Reads and parses a configuration file.
pub fn read_config(path: &Path) -> Result<Overrides, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Model parameters (with the scenario's structural constraints applied).
    pub params: ModelParams,
    /// Speed regime, if the command needs one.
    pub scenario: Option<Scenario>,
    /// Seed for randomized runs.
    pub seed: u64,
}

impl RunConfig {
    /// Resolves overrides against the model defaults. `default_tag` is the
    /// scenario assumed when neither a tag nor a speed is given; a bare
    /// speed `c` selects Scenario I.
    pub fn resolve(o: &Overrides, default_tag: Option<ScenarioTag>) -> Result<Self, CliError> {
        let d = ModelParams::default();
        let mut params = ModelParams {
            alpha0: o.alpha0.unwrap_or(d.alpha0),
            cu: o.cu.unwrap_or(d.cu),
            cv: o.cv.unwrap_or(d.cv),
            gamma1: o.gamma1.unwrap_or(d.gamma1),
            gamma2: o.gamma2.unwrap_or(d.gamma2),
            epsilon: o.epsilon.unwrap_or(d.epsilon),
            b: o.b.unwrap_or(d.b),
        };
        let tag = o.scenario.or(if o.c.is_some() { Some(ScenarioTag::I) } else { default_tag });
        let scenario = tag.map(|tag| Scenario {
            tag,
            c0: if tag == ScenarioTag::I { 0.0 } else { o.c0.unwrap_or(0.0) },
            gamma2_0: if tag == ScenarioTag::IV { o.gamma2_0.unwrap_or(0.0) } else { 0.0 },
            c: if tag == ScenarioTag::I { o.c } else { None },
        });
        if let Some(s) = &scenario {
            params = s.apply(&params);
        }
        params.validate()?;
        Ok(Self { params, scenario, seed: o.seed.unwrap_or(0) })
    }

    /// The scenario, or a usage error naming the command that needs it.
    pub fn require_scenario(&self, command: &str) -> Result<Scenario, CliError> {
        self.scenario
            .ok_or_else(|| CliError::Usage(format!("{command} needs a scenario: pass --scenario (with --c0) or a front speed --c")))
    }

    /// Renders the configuration in the `key=value` file format.
    pub fn to_config_text(&self) -> String {
        let p = &self.params;
        let mut lines = vec![
            format!("alpha0={:?}", p.alpha0),
            format!("cu={:?}", p.cu),
            format!("cv={:?}", p.cv),
            format!("gamma1={:?}", p.gamma1),
            format!("gamma2={:?}", p.gamma2),
            format!("epsilon={:?}", p.epsilon),
            format!("B={:?}", p.b),
        ];
        if let Some(s) = &self.scenario {
            lines.push(format!("scenario={}", s.tag));
            match s.tag {
                ScenarioTag::I => {
                    if let Some(c) = s.c {
                        lines.push(format!("c={c:?}"));
                    }
                }
                tag => {
                    lines.push(format!("c0={:?}", s.c0));
                    if tag == ScenarioTag::IV {
                        lines.push(format!("gamma2_0={:?}", s.gamma2_0));
                    }
                }
            }
        }
        lines.push(format!("seed={}", self.seed));
        lines.join("\n") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_blank_lines_and_spacing() {
        let o = parse_config("# header\n\nalpha0 = 2\n  cu=-0.5  \nscenario = iv\nB=0.25\nseed=7\n").unwrap();
        assert_eq!(o.alpha0, Some(2.0));
        assert_eq!(o.cu, Some(-0.5));
        assert_eq!(o.b, Some(0.25));
        assert_eq!(o.scenario, Some(ScenarioTag::IV));
        assert_eq!(o.seed, Some(7));
    }

    #[test]
    fn malformed_input_is_a_usage_error() {
        for bad in ["speed=1", "cu", "cu=abc", "cu=1\ncu=2", "scenario=VI", "epsilon=inf", "seed=-1"] {
            assert!(matches!(parse_config(bad), Err(CliError::Usage(_))), "{bad}");
        }
    }

    #[test]
    fn flags_override_file_values() {
        let file = Overrides { alpha0: Some(2.0), cu: Some(0.5), ..Overrides::default() };
        let flags = Overrides { cu: Some(0.7), ..Overrides::default() };
        let m = file.overridden_by(flags);
        assert_eq!((m.alpha0, m.cu), (Some(2.0), Some(0.7)));
    }

    #[test]
    fn scenario_four_imposes_scaled_coupling() {
        let o = Overrides { scenario: Some(ScenarioTag::IV), c0: Some(1.0), gamma2_0: Some(0.3), epsilon: Some(0.05), ..Overrides::default() };
        let rc = RunConfig::resolve(&o, None).unwrap();
        assert!((rc.params.gamma2 - 0.015).abs() < 1e-15);
    }

    #[test]
    fn bare_speed_selects_scenario_one() {
        let rc = RunConfig::resolve(&Overrides { c: Some(-2.0), ..Overrides::default() }, Some(ScenarioTag::II)).unwrap();
        assert_eq!(rc.scenario.unwrap().tag, ScenarioTag::I);
    }
}
