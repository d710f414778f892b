//! Command implementations behind the `qeslab` binary: table reproduction,
//! potential profiles, reflection scans, Wronskian reports, critical
//! couplings, and the companion-model summary. Every command produces one
//! rectangular table rendered as human text, CSV, or JSON; csv/json carry
//! full precision, the human view rounds to display precision.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::koleykar::{kk_energy, kk_states, kk_wronskian, KKParams, KkError};
use crate::potential::{eval_potential, in_valley, turning_points, ModelParams, ParamError};
use crate::qes_core::{qes_spectrum, QesError};
use crate::scattering::{transmission_with, ScatteringError, Side, TransmissionOptions};
use crate::semiclassics::{critical_couplings, wkb_levels, SemiclassicsError};
use crate::states::{parity_combine, self_adjoint_check, ParityState, StateError};

/// Default tolerance knob; overridden by the QESLAB_TOL environment variable.
const DEFAULT_TOL: f64 = 1e-6;
/// Matching point for scan transmissions (validity comfortably inside the
/// oscillatory regime for the scanned couplings).
const SCAN_X_MATCH: f64 = 11.5;
/// Default asymptotic probe for Wronskian reports.
const DEFAULT_WRONSKIAN_X: f64 = 14.0;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("numerical regime error: {0}")]
    Numerics(String),
    #[error("reality violation: {0}")]
    Reality(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Numerics(_) => 3,
            CliError::Reality(_) => 4,
        }
    }
}

impl From<ParamError> for CliError {
    fn from(e: ParamError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<QesError> for CliError {
    fn from(e: QesError) -> Self {
        match e {
            QesError::PatternViolation { .. } | QesError::ComplexEigenvalue { .. } => {
                CliError::Reality(e.to_string())
            }
            QesError::Eigen(_) => CliError::Numerics(e.to_string()),
        }
    }
}

impl From<StateError> for CliError {
    fn from(e: StateError) -> Self {
        CliError::Numerics(e.to_string())
    }
}

impl From<ScatteringError> for CliError {
    fn from(e: ScatteringError) -> Self {
        CliError::Numerics(e.to_string())
    }
}

impl From<SemiclassicsError> for CliError {
    fn from(e: SemiclassicsError) -> Self {
        match e {
            SemiclassicsError::BadLevel { .. } => CliError::Usage(e.to_string()),
            SemiclassicsError::Qes(inner) => inner.into(),
            other => CliError::Numerics(other.to_string()),
        }
    }
}

impl From<KkError> for CliError {
    fn from(e: KkError) -> Self {
        match e {
            KkError::NonPositiveA1 { .. } | KkError::NonPositiveNu { .. } => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Numerics(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Human,
    Csv,
    Json,
}

#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub command: String,
    pub version: String,
    pub params: BTreeMap<String, Value>,
    pub tolerances: BTreeMap<String, f64>,
}

/// One rectangular result table plus its human rendering.
#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub meta: Meta,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub human: String,
}

impl CommandOutput {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Human => {
                let mut s = self.human.clone();
                if !s.ends_with('\n') {
                    s.push('\n');
                }
                s
            }
            OutputFormat::Csv => self.render_csv(),
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
                s.push('\n');
                s
            }
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "meta": serde_json::to_value(&self.meta).expect("serializable"),
            "data": {
                "columns": self.columns,
                "rows": self.rows,
            },
        })
    }

    fn render_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// CSV cell with the same shortest-round-trip digits JSON uses.
fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Reads QESLAB_TOL; absence means the default, an unparseable or
/// non-positive value is a usage error.
pub fn tolerance_from_env() -> Result<f64, CliError> {
    match std::env::var("QESLAB_TOL") {
        Ok(s) => s
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|t| *t > 0.0 && t.is_finite())
            .ok_or_else(|| CliError::Usage(format!("QESLAB_TOL = {s:?} is not a positive number"))),
        Err(_) => Ok(DEFAULT_TOL),
    }
}

fn meta(command: &str, params: &[(&str, Value)], tolerances: &[(&str, f64)]) -> Meta {
    Meta {
        command: command.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        params: params
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect(),
        tolerances: tolerances.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
    }
}

fn num(v: f64) -> Value {
    json!(v)
}

/// Rounds half-away-from-zero to `decimals` and prints without a trailing
/// ".0" when `decimals` is 0; kills negative zero.
fn round_display(value: f64, decimals: usize) -> String {
    let scale = 10f64.powi(decimals as i32);
    let mut r = (value * scale).round() / scale;
    if r == 0.0 {
        r = 0.0;
    }
    format!("{r:.decimals$}")
}

pub fn cmd_table1(b: f64, n_max: u32) -> Result<CommandOutput, CliError> {
    if n_max == 0 || n_max > 12 {
        return Err(CliError::Usage(format!("nmax = {n_max} outside 1..=12")));
    }
    let mut rows = Vec::new();
    let mut human = format!("QES energies for b = {b} (valley levels in parentheses)\n");
    for n in 1..=n_max {
        let params = ModelParams::new(b, n)?;
        let spectrum = qes_spectrum(&params)?;
        // The printed table keeps one decimal for the shallow rows and three
        // decimals from n = 3 on; n = 1 is a single integer entry.
        let decimals = match n {
            1 => 0,
            2 => 1,
            _ => 3,
        };
        let mut line = format!("n = {n}:");
        for (i, state) in spectrum.iter().enumerate() {
            let valley = in_valley(&params, state.energy);
            rows.push(vec![
                json!(n),
                json!(i + 1),
                num(state.energy),
                json!(valley),
            ]);
            let shown = round_display(state.energy, decimals);
            if valley {
                line.push_str(&format!(" ({shown})"));
            } else {
                line.push_str(&format!(" {shown}"));
            }
        }
        human.push_str(&line);
        human.push('\n');
    }
    Ok(CommandOutput {
        meta: meta(
            "table1",
            &[("b", num(b)), ("nmax", json!(n_max))],
            &[],
        ),
        columns: vec!["n".into(), "level".into(), "energy".into(), "in_valley".into()],
        rows,
        human,
    })
}

pub fn cmd_table2(b: f64, n_max: u32) -> Result<CommandOutput, CliError> {
    if n_max == 0 || n_max > 12 {
        return Err(CliError::Usage(format!("nmax = {n_max} outside 1..=12")));
    }
    let mut rows = Vec::new();
    let mut human = format!("WKB valley levels for b = {b} (percent error vs exact in parentheses)\n");
    for n in 1..=n_max {
        let params = ModelParams::new(b, n)?;
        let levels = wkb_levels(&params)?;
        if levels.is_empty() {
            continue;
        }
        let mut line = format!("n = {n}:");
        for level in levels {
            rows.push(vec![
                json!(n),
                json!(level.m),
                num(level.e),
                num(level.action),
                level.percent_error_vs_qes.map(num).unwrap_or(Value::Null),
            ]);
            line.push_str(&format!(" {}", round_display(level.e, 3)));
            if let Some(pe) = level.percent_error_vs_qes {
                line.push_str(&format!(" ({}%)", round_display(pe, 1)));
            }
        }
        human.push_str(&line);
        human.push('\n');
    }
    if rows.is_empty() {
        human.push_str("(no valley levels)\n");
    }
    Ok(CommandOutput {
        meta: meta(
            "table2",
            &[("b", num(b)), ("nmax", json!(n_max))],
            &[],
        ),
        columns: vec![
            "n".into(),
            "m".into(),
            "energy".into(),
            "action".into(),
            "percent_error".into(),
        ],
        rows,
        human,
    })
}

pub fn cmd_profile(
    b: f64,
    n: u32,
    x_min: f64,
    x_max: f64,
    samples: usize,
) -> Result<CommandOutput, CliError> {
    if samples < 2 {
        return Err(CliError::Usage(format!("samples = {samples} < 2")));
    }
    if !(x_min < x_max) {
        return Err(CliError::Usage(format!(
            "empty range: xmin = {x_min}, xmax = {x_max}"
        )));
    }
    let params = ModelParams::new(b, n)?;
    let spectrum = qes_spectrum(&params)?;
    let columns: Vec<String> = [
        "kind", "x", "v", "level", "energy", "in_valley", "tp1", "tp2", "tp3", "tp4",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let mut rows = Vec::new();
    for i in 0..samples {
        let x = x_min + (x_max - x_min) * i as f64 / (samples - 1) as f64;
        let mut row = vec![json!("grid"), num(x), num(eval_potential(&params, x))];
        row.extend(std::iter::repeat(Value::Null).take(7));
        rows.push(row);
    }
    let mut human = format!(
        "Potential profile for b = {b}, n = {n}: {samples} samples on [{x_min}, {x_max}]\n"
    );
    for (i, state) in spectrum.iter().enumerate() {
        let tp = turning_points(&params, state.energy);
        let valley = in_valley(&params, state.energy);
        let mut row = vec![
            json!("level"),
            Value::Null,
            Value::Null,
            json!(i + 1),
            num(state.energy),
            json!(valley),
        ];
        for k in 0..4 {
            row.push(tp.points.get(k).copied().map(num).unwrap_or(Value::Null));
        }
        rows.push(row);
        let tps: Vec<String> = tp.points.iter().map(|x| format!("{x:.6}")).collect();
        human.push_str(&format!(
            "E{} = {:.6}{}; turning points: [{}]\n",
            i + 1,
            state.energy,
            if valley { " (valley)" } else { "" },
            tps.join(", ")
        ));
    }
    Ok(CommandOutput {
        meta: meta(
            "profile",
            &[
                ("b", num(b)),
                ("n", json!(n)),
                ("xmin", num(x_min)),
                ("xmax", num(x_max)),
                ("samples", json!(samples)),
            ],
            &[],
        ),
        columns,
        rows,
        human,
    })
}

pub fn cmd_scan(
    b: f64,
    n: u32,
    e_min: f64,
    e_max: f64,
    points: usize,
) -> Result<CommandOutput, CliError> {
    if points < 2 {
        return Err(CliError::Usage(format!("points = {points} < 2")));
    }
    if !(e_min < e_max) {
        return Err(CliError::Usage(format!(
            "empty range: emin = {e_min}, emax = {e_max}"
        )));
    }
    let tol = tolerance_from_env()?;
    let params = ModelParams::new(b, n)?;
    let options = TransmissionOptions {
        x_match: SCAN_X_MATCH,
        rel_tol: tol,
        incident: Side::Left,
    };
    let mut rows = Vec::new();
    let mut human = format!("Reflection scan for b = {b}, n = {n}\n");
    for i in 0..points {
        let e = e_min + (e_max - e_min) * i as f64 / (points - 1) as f64;
        let (refl, flagged) = match transmission_with(&params, e, &options) {
            Ok(res) => (res.refl_prob, res.flagged),
            Err(_) => (f64::NAN, true),
        };
        rows.push(vec![num(e), num(refl), json!(flagged)]);
        human.push_str(&format!(
            "E = {e:>12.6}  |r|^2 = {refl:.3e}{}\n",
            if flagged { "  [flagged]" } else { "" }
        ));
    }
    Ok(CommandOutput {
        meta: meta(
            "scan",
            &[
                ("b", num(b)),
                ("n", json!(n)),
                ("emin", num(e_min)),
                ("emax", num(e_max)),
                ("points", json!(points)),
            ],
            &[("rel_tol", tol), ("x_match", SCAN_X_MATCH)],
        ),
        columns: vec!["e".into(), "refl_prob".into(), "flagged".into()],
        rows,
        human,
    })
}

pub fn cmd_wronskian(b: f64, n: u32, x_probe: Option<f64>) -> Result<CommandOutput, CliError> {
    let x = x_probe.unwrap_or(DEFAULT_WRONSKIAN_X);
    if !(x > 1.0) || !x.is_finite() {
        return Err(CliError::Usage(format!("probe X = {x} must exceed 1")));
    }
    let params = ModelParams::new(b, n)?;
    let spectrum = qes_spectrum(&params)?;
    let mut states: Vec<ParityState> = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    for (i, state) in spectrum.iter().enumerate() {
        let (even, odd) = parity_combine(state)?;
        states.push(even);
        labels.push(format!("{}+", i + 1));
        states.push(odd);
        labels.push(format!("{}-", i + 1));
    }
    let reports = self_adjoint_check(&states, x)?;
    let mut rows = Vec::new();
    let mut human = format!(
        "Asymptotic Wronskians W[a,b] at x = +-{x} for b = {b}, n = {n}\n"
    );
    for r in &reports {
        let (i, j) = r.pair;
        rows.push(vec![
            json!(labels[i]),
            json!(labels[j]),
            num(r.w_plus.re),
            num(r.w_plus.im),
            num(r.w_minus.re),
            num(r.w_minus.im),
            num(r.difference.norm()),
        ]);
        human.push_str(&format!(
            "W[{}, {}]: +X -> {:>12.8}, -X -> {:>12.8}, boundary difference {:.2e}\n",
            labels[i],
            labels[j],
            r.w_plus.re,
            r.w_minus.re,
            r.difference.norm()
        ));
    }
    Ok(CommandOutput {
        meta: meta(
            "wronskian",
            &[("b", num(b)), ("n", json!(n)), ("X", num(x))],
            &[],
        ),
        columns: vec![
            "state_a".into(),
            "state_b".into(),
            "w_plus_re".into(),
            "w_plus_im".into(),
            "w_minus_re".into(),
            "w_minus_im".into(),
            "difference".into(),
        ],
        rows,
        human,
    })
}

pub fn cmd_critical(n: u32) -> Result<CommandOutput, CliError> {
    // Validate through the same gate as the model parameters.
    ModelParams::new(1.0, n)?;
    let c = critical_couplings(n)?;
    let mut rows = Vec::new();
    let mut human = format!("Critical couplings for n = {n}\n");
    for (i, &b) in c.level_exit_b.iter().enumerate() {
        rows.push(vec![json!("level_exit"), json!(i + 1), num(b)]);
        human.push_str(&format!("level {} exits the valley at b = {b:.6}\n", i + 1));
    }
    rows.push(vec![json!("peak_merge"), Value::Null, num(c.peak_merge_b)]);
    human.push_str(&format!("peaks merge at b = {:.6}\n", c.peak_merge_b));
    Ok(CommandOutput {
        meta: meta("critical", &[("n", json!(n))], &[]),
        columns: vec!["quantity".into(), "level".into(), "b".into()],
        rows,
        human,
    })
}

pub fn cmd_kk(a1: f64, nu: f64) -> Result<CommandOutput, CliError> {
    let p = KKParams::new(a1, nu)?;
    let pair = kk_states(&p)?;
    let w = kk_wronskian(&p)?;
    let e = kk_energy(&p);
    let rows = vec![
        vec![json!("energy"), num(e)],
        vec![json!("wronskian"), num(w)],
        vec![json!("safe_window"), num(pair.safe_window())],
    ];
    let human = format!(
        "Companion model A1 = {a1}, nu = {nu}\n\
         degenerate pair energy: {e}\n\
         Wronskian W[psi1, psi2]: {w}\n\
         safe evaluation window: |x| <= {}\n",
        pair.safe_window()
    );
    Ok(CommandOutput {
        meta: meta(
            "kk",
            &[("a1", num(a1)), ("nu", num(nu))],
            &[],
        ),
        columns: vec!["quantity".into(), "value".into()],
        rows,
        human,
    })
}
