//! Point and sweep evaluation.

use std::io::{self, Write};

use cavstat::closedform::{g2_cf, mean_photon_cf};
use cavstat::steady::steady_state;
use cavstat::{ModelParams, SteadyStateResult};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Output, SweepConfig, SweepVariable};

pub const CSV_HEADER: [&str; 11] = [
    "sweep_var",
    "value",
    "n",
    "n_cf",
    "g2",
    "g2_cf",
    "g3",
    "dg2",
    "dg3",
    "residual",
    "flags",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    /// Swept variable; a series is appended as `@name=value`.
    pub sweep_var: String,
    pub value: f64,
    pub n: Option<f64>,
    pub n_cf: Option<f64>,
    pub g2: Option<f64>,
    pub g2_cf: Option<f64>,
    pub g3: Option<f64>,
    pub dg2: Option<f64>,
    pub dg3: Option<f64>,
    pub residual: Option<f64>,
    /// Warnings and errors, `;`-separated.
    pub flags: String,
}

impl ResultRow {
    fn empty(sweep_var: String, value: f64) -> Self {
        Self {
            sweep_var,
            value,
            n: None,
            n_cf: None,
            g2: None,
            g2_cf: None,
            g3: None,
            dg2: None,
            dg3: None,
            residual: None,
            flags: String::new(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.flags.contains("error(")
    }

    fn push_flag(&mut self, flag: impl AsRef<str>) {
        if !self.flags.is_empty() {
            self.flags.push(';');
        }
        self.flags.push_str(&sanitize(flag.as_ref()));
    }
}

fn sanitize(text: &str) -> String {
    text.replace([',', ';', '\n'], " ")
}

fn describe(p: &ModelParams) -> String {
    format!(
        "g0/Gamma={} beta/Gamma={} kappa/Gamma={} n_bar={}",
        p.g0, p.beta, p.kappa, p.n_bar
    )
}

/// A solver failure with the offending parameters attached.
#[derive(Debug, Clone, PartialEq)]
pub struct PointError {
    pub context: String,
    pub source: cavstat::Error,
}

impl std::fmt::Display for PointError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "at {}: {}", self.context, self.source)
    }
}

impl std::error::Error for PointError {}

fn solve(p: &ModelParams, order: u32) -> Result<SteadyStateResult, PointError> {
    steady_state(p, order / 2).map_err(|source| PointError {
        context: describe(p),
        source,
    })
}

/// Evaluates one parameter point.
pub fn evaluate(
    cfg: &SweepConfig,
    p: &ModelParams,
    sweep_var: String,
    value: f64,
) -> Result<ResultRow, PointError> {
    let mut row = ResultRow::empty(sweep_var, value);
    let solved = solve(p, cfg.order)?;
    row.residual = Some(solved.residual_norm);
    for w in &solved.warnings {
        row.push_flag(w.to_string());
    }

    if cfg.wants(Output::N) || cfg.wants(Output::G2) || cfg.wants(Output::G3) {
        row.n = Some(solved.n);
        match mean_photon_cf(p) {
            Ok(v) => row.n_cf = Some(v),
            Err(e) => row.push_flag(format!("n_cf({e})")),
        }
    }
    if cfg.wants(Output::G2) {
        row.g2 = solved.g2;
        match g2_cf(p) {
            Ok(v) => row.g2_cf = Some(v),
            Err(e) => row.push_flag(format!("g2_cf({e})")),
        }
    }
    if cfg.wants(Output::G3) {
        row.g3 = solved.g3;
    }

    let wants_delta = cfg.wants(Output::Dg2) || cfg.wants(Output::Dg3);
    if wants_delta {
        // The vacuum-bath reference can be empty (no photons) while the
        // thermal point is fine; only the delta columns are lost then.
        let reference = if p.n_bar == 0.0 {
            Ok(solved.clone())
        } else {
            solve(&ModelParams { n_bar: 0.0, ..*p }, cfg.order)
        };
        match reference {
            Ok(reference) => {
                let diff = |a: Option<f64>, b: Option<f64>| a.zip(b).map(|(a, b)| a - b);
                if cfg.wants(Output::Dg2) {
                    row.dg2 = diff(solved.g2, reference.g2);
                }
                if cfg.wants(Output::Dg3) {
                    row.dg3 = diff(solved.g3, reference.g3);
                }
            }
            Err(e) => row.push_flag(format!("delta_reference({})", e.source)),
        }
    }
    Ok(row)
}

/// Evaluates the configuration's fixed point.
pub fn run_point(cfg: &SweepConfig) -> Result<ResultRow, PointError> {
    let p = cfg.base_params().map_err(|source| PointError {
        context: "configured parameters".into(),
        source,
    })?;
    let value = cfg.fixed_sweep_value().unwrap_or(f64::NAN);
    evaluate(cfg, &p, cfg.sweep.name().to_string(), value)
}

struct GridPoint {
    label: String,
    value: f64,
    params: cavstat::Result<ModelParams>,
}

fn grid_points(cfg: &SweepConfig) -> Vec<GridPoint> {
    let base = cfg.base_params();
    let series: Vec<Option<(SweepVariable, f64)>> = match &cfg.series {
        Some(s) => s.values.iter().map(|v| Some((s.variable, *v))).collect(),
        None => vec![None],
    };
    let mut points = Vec::new();
    for curve in series {
        let label = match curve {
            Some((var, v)) => format!("{}@{}={}", cfg.sweep.name(), var.name(), v),
            None => cfg.sweep.name().to_string(),
        };
        for value in cfg.grid.values() {
            let params = base.clone().and_then(|mut p| {
                if let Some((var, v)) = curve {
                    var.set(&mut p, v);
                }
                cfg.sweep.set(&mut p, value);
                p.validate().map(|_| p)
            });
            points.push(GridPoint {
                label: label.clone(),
                value,
                params,
            });
        }
    }
    points
}

/// One row per grid point (per series curve), in grid order. Failed points
/// yield a row whose `flags` carry `error(..)`.
pub fn run_sweep(cfg: &SweepConfig) -> Vec<ResultRow> {
    grid_points(cfg)
        .into_par_iter()
        .map(|pt| {
            let outcome = match pt.params {
                Ok(p) => evaluate(cfg, &p, pt.label.clone(), pt.value),
                Err(source) => Err(PointError {
                    context: pt.label.clone(),
                    source,
                }),
            };
            outcome.unwrap_or_else(|e| {
                log::warn!("{e}");
                let mut row = ResultRow::empty(pt.label, pt.value);
                row.push_flag(format!("error({e})"));
                row
            })
        })
        .collect()
}

/// Scientific notation with 17 significant digits.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn field(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.sweep_var.clone(),
            format_float(r.value),
            field(r.n),
            field(r.n_cf),
            field(r.g2),
            field(r.g2_cf),
            field(r.g3),
            field(r.dg2),
            field(r.dg3),
            field(r.residual),
            r.flags.clone(),
        ])?;
    }
    w.flush()
}

pub fn write_json<W: Write>(rows: &[ResultRow], mut out: W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut out, rows)?;
    writeln!(out)
}
