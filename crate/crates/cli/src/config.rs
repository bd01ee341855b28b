//! Flat `key = value` run configuration.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use cavstat::{ModelParams, PhysicalParams};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{key}`: cannot parse `{value}` ({reason})")]
    BadValue {
        key: String,
        value: String,
        reason: String,
    },
    #[error("unknown preset `{0}` (expected fig1..fig5)")]
    UnknownPreset(String),
    #[error("invalid grid: {0}")]
    Grid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Rates are effective-model parameters in units of Gamma.
    Model,
    /// Rates are laboratory parameters converted through the dressed-state map.
    Physical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepVariable {
    KappaOverGamma,
    BetaOverGamma,
    NBar,
    G0OverGamma,
}

impl SweepVariable {
    pub const ALL: [SweepVariable; 4] = [
        Self::KappaOverGamma,
        Self::BetaOverGamma,
        Self::NBar,
        Self::G0OverGamma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::KappaOverGamma => "kappa_over_Gamma",
            Self::BetaOverGamma => "beta_over_Gamma",
            Self::NBar => "n_bar",
            Self::G0OverGamma => "g0_over_Gamma",
        }
    }

    fn get(self, p: &ModelParams) -> f64 {
        match self {
            Self::KappaOverGamma => p.kappa,
            Self::BetaOverGamma => p.beta,
            Self::NBar => p.n_bar,
            Self::G0OverGamma => p.g0,
        }
    }

    pub fn set(self, p: &mut ModelParams, value: f64) {
        match self {
            Self::KappaOverGamma => p.kappa = value,
            Self::BetaOverGamma => p.beta = value,
            Self::NBar => p.n_bar = value,
            Self::G0OverGamma => p.g0 = value,
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepVariable {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| {
                "expected one of kappa_over_Gamma, beta_over_Gamma, n_bar, g0_over_Gamma"
                    .to_string()
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl Grid {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.start < self.stop) {
            return Err(ConfigError::Grid(format!(
                "start {} must be below stop {}",
                self.start, self.stop
            )));
        }
        if self.points < 2 {
            return Err(ConfigError::Grid(format!(
                "points = {} must be >= 2",
                self.points
            )));
        }
        if self.spacing == Spacing::Log && !(self.start > 0.0) {
            return Err(ConfigError::Grid(format!(
                "log spacing needs start > 0, got {}",
                self.start
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.start + t * (self.stop - self.start),
                    Spacing::Log => {
                        (self.start.ln() + t * (self.stop.ln() - self.start.ln())).exp()
                    }
                }
            })
            .map(|v| if v > self.stop { self.stop } else { v })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Output {
    N,
    G2,
    G3,
    Dg2,
    Dg3,
}

impl FromStr for Output {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "n" => Ok(Self::N),
            "g2" => Ok(Self::G2),
            "g3" => Ok(Self::G3),
            "dg2" => Ok(Self::Dg2),
            "dg3" => Ok(Self::Dg3),
            _ => Err("expected a subset of n, g2, g3, dg2, dg3".into()),
        }
    }
}

/// A second swept quantity producing one curve per value.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

/// Laboratory rates for physical mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalInputs {
    pub omega: f64,
    pub g: f64,
    pub gamma: f64,
    pub gamma_d: f64,
    pub kappa: f64,
    pub delta: f64,
}

impl Default for PhysicalInputs {
    fn default() -> Self {
        Self {
            omega: 250.0,
            g: 10.0,
            gamma: 2.0,
            gamma_d: 2.0,
            kappa: 1.0,
            delta: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub mode: Mode,
    pub sweep: SweepVariable,
    pub grid: Grid,
    pub series: Option<Series>,
    /// Model-mode values in units of Gamma.
    pub g0: f64,
    pub beta: f64,
    pub kappa: f64,
    pub n_bar: f64,
    pub physical: PhysicalInputs,
    pub outputs: Vec<Output>,
    pub order: u32,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Model,
            sweep: SweepVariable::KappaOverGamma,
            grid: Grid {
                start: 0.01,
                stop: 3.0,
                points: 60,
                spacing: Spacing::Log,
            },
            series: None,
            g0: 5.0,
            beta: 0.1,
            kappa: 1.0,
            n_bar: 0.0,
            physical: PhysicalInputs::default(),
            outputs: vec![Output::N, Output::G2, Output::G3, Output::Dg2, Output::Dg3],
            order: 6,
        }
    }
}

pub const PRESETS: [&str; 5] = ["fig1", "fig2", "fig3", "fig4", "fig5"];

impl SweepConfig {
    /// Built-in figure configurations. The κ/Γ axis `[0.01, 3]`, 60 log-spaced
    /// points, is a fixed sampling choice.
    pub fn preset(name: &str) -> Result<Self, ConfigError> {
        let base = Self {
            g0: 5.0,
            n_bar: 0.0,
            ..Self::default()
        };
        let series = |variable, values: &[f64]| {
            Some(Series {
                variable,
                values: values.to_vec(),
            })
        };
        let cfg = match name {
            "fig1" => Self {
                series: series(SweepVariable::BetaOverGamma, &[0.0, 0.1]),
                outputs: vec![Output::N],
                ..base
            },
            "fig2" => Self {
                series: series(SweepVariable::BetaOverGamma, &[0.0, 0.05, 0.1]),
                outputs: vec![Output::N, Output::G2],
                ..base
            },
            "fig3" => Self {
                beta: 0.05,
                series: series(SweepVariable::NBar, &[1.0, 5.0, 10.0]),
                outputs: vec![Output::G2, Output::Dg2],
                ..base
            },
            "fig4" => Self {
                series: series(SweepVariable::BetaOverGamma, &[0.0, 0.05, 0.1]),
                outputs: vec![Output::N, Output::G3],
                ..base
            },
            "fig5" => Self {
                beta: 0.05,
                series: series(SweepVariable::NBar, &[1.0, 5.0, 10.0]),
                outputs: vec![Output::G3, Output::Dg3],
                ..base
            },
            other => return Err(ConfigError::UnknownPreset(other.to_string())),
        };
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        cfg.apply_file(path)?;
        Ok(cfg)
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        self.apply_text(&text)
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                text: raw.to_string(),
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| ConfigError::Syntax {
                line: 0,
                text: assignment.to_string(),
            })?;
        self.set(key.trim(), value.trim())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = |reason: String| ConfigError::BadValue {
            key: key.into(),
            value: value.into(),
            reason,
        };
        let num = || value.parse::<f64>().map_err(|e| bad(e.to_string()));
        match key {
            "mode" => {
                self.mode = match value {
                    "model" => Mode::Model,
                    "physical" => Mode::Physical,
                    _ => return Err(bad("expected model or physical".into())),
                }
            }
            "sweep" => self.sweep = value.parse().map_err(bad)?,
            "start" => self.grid.start = num()?,
            "stop" => self.grid.stop = num()?,
            "points" => {
                self.grid.points = value
                    .parse()
                    .map_err(|e: std::num::ParseIntError| bad(e.to_string()))?
            }
            "spacing" => {
                self.grid.spacing = match value {
                    "linear" => Spacing::Linear,
                    "log" => Spacing::Log,
                    _ => return Err(bad("expected linear or log".into())),
                }
            }
            "series" => self.series = parse_series(value).map_err(bad)?,
            "g0_over_Gamma" => self.g0 = num()?,
            "beta_over_Gamma" => self.beta = num()?,
            "kappa_over_Gamma" => self.kappa = num()?,
            "n_bar" => self.n_bar = num()?,
            "omega" => self.physical.omega = num()?,
            "g" => self.physical.g = num()?,
            "gamma" => self.physical.gamma = num()?,
            "gamma_d" => self.physical.gamma_d = num()?,
            "kappa" => self.physical.kappa = num()?,
            "delta" => self.physical.delta = num()?,
            "outputs" => {
                self.outputs = value
                    .split(',')
                    .map(|s| s.trim().parse::<Output>())
                    .collect::<Result<_, _>>()
                    .map_err(bad)?
            }
            "order" => {
                self.order = value
                    .parse()
                    .map_err(|e: std::num::ParseIntError| bad(e.to_string()))?
            }
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.grid.validate()?;
        if self.order < 2 || !self.order.is_multiple_of(2) {
            return Err(ConfigError::BadValue {
                key: "order".into(),
                value: self.order.to_string(),
                reason: "must be an even integer >= 2".into(),
            });
        }
        if self.outputs.is_empty() {
            return Err(ConfigError::BadValue {
                key: "outputs".into(),
                value: String::new(),
                reason: "at least one output is required".into(),
            });
        }
        Ok(())
    }

    /// Fixed parameters in units of Gamma, before the sweep variable is applied.
    pub fn base_params(&self) -> cavstat::Result<ModelParams> {
        match self.mode {
            Mode::Model => ModelParams::in_gamma_units(self.g0, self.beta, self.kappa, self.n_bar),
            Mode::Physical => {
                let ph = PhysicalParams {
                    omega: self.physical.omega,
                    g: self.physical.g,
                    gamma: self.physical.gamma,
                    gamma_d: self.physical.gamma_d,
                    kappa: self.physical.kappa,
                    n_bar: self.n_bar,
                    delta: self.physical.delta,
                };
                let p = ph.to_model()?;
                Ok(p.rescaled(1.0 / p.gamma))
            }
        }
    }

    /// Value of the sweep variable at the fixed parameters.
    pub fn fixed_sweep_value(&self) -> cavstat::Result<f64> {
        Ok(self.sweep.get(&self.base_params()?))
    }

    pub fn wants(&self, output: Output) -> bool {
        self.outputs.contains(&output)
    }
}

fn parse_series(value: &str) -> Result<Option<Series>, String> {
    if value.is_empty() || value == "none" {
        return Ok(None);
    }
    let (var, list) = value
        .split_once(':')
        .ok_or_else(|| "expected `variable:v1,v2,...`".to_string())?;
    let variable = var.trim().parse()?;
    let values = list
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err("series needs at least one value".into());
    }
    Ok(Some(Series { variable, values }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_file_text_with_comments() {
        let mut cfg = SweepConfig::default();
        cfg.apply_text(
            "# comment\nsweep = n_bar  # trailing\nstart = 0\nstop = 10\npoints = 11\nspacing = linear\n\noutputs = n, g2\nseries = beta_over_Gamma:0,0.1\n",
        )
        .unwrap();
        assert_eq!(cfg.sweep, SweepVariable::NBar);
        assert_eq!(cfg.grid.values()[3], 3.0);
        assert_eq!(cfg.outputs, vec![Output::N, Output::G2]);
        assert_eq!(cfg.series.as_ref().unwrap().values, vec![0.0, 0.1]);
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_bad_input() {
        let mut cfg = SweepConfig::default();
        assert!(matches!(
            cfg.apply_text("oops"),
            Err(ConfigError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            cfg.set("colour", "red"),
            Err(ConfigError::UnknownKey(_))
        ));
        assert!(matches!(
            cfg.set("g0_over_Gamma", "five"),
            Err(ConfigError::BadValue { .. })
        ));
        cfg.set("order", "5").unwrap();
        assert!(cfg.validate().is_err());
        let mut cfg = SweepConfig::default();
        cfg.set("start", "4").unwrap();
        assert!(matches!(cfg.validate(), Err(ConfigError::Grid(_))));
        assert!(SweepConfig::preset("fig9").is_err());
    }

    #[test]
    fn log_grid_hits_both_ends() {
        let grid = Grid {
            start: 0.01,
            stop: 3.0,
            points: 60,
            spacing: Spacing::Log,
        };
        let v = grid.values();
        assert_eq!(v.len(), 60);
        assert!((v[0] - 0.01).abs() < 1e-15 && (v[59] - 3.0).abs() < 1e-12);
        assert!(v.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn physical_mode_converts_to_gamma_units() {
        let mut cfg = SweepConfig::default();
        cfg.apply_text("mode = physical\nomega = 100\ng = 4\ngamma = 1\ngamma_d = 3\nkappa = 2")
            .unwrap();
        let p = cfg.base_params().unwrap();
        // Gamma = 1, so rates are unchanged; g0 = 2, beta = 4/100
        assert!((p.gamma - 1.0).abs() < 1e-15);
        assert!(
            (p.g0 - 2.0).abs() < 1e-15
                && (p.beta - 0.04).abs() < 1e-15
                && (p.kappa - 2.0).abs() < 1e-15
        );
        cfg.set("delta", "0.5").unwrap();
        assert!(cfg.base_params().is_err());
    }
}
