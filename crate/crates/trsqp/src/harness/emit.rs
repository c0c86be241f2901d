//! Trace serialization: CSV and JSON, bit-exact and deterministic.
//!
//! Floats are written with 17 significant digits in CSV and as plain JSON
//! numbers (shortest round-trip form) in JSON; non-finite values appear as
//! the strings `"inf"`, `"-inf"`, `"nan"` so a JSON round trip reproduces
//! every value bit for bit.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::NlpProblem;
use crate::solver::{IterationRecord, Trace};

use super::TraceHeader;

/// Column order of the CSV format.
pub const CSV_COLUMNS: &str = "iter,f_noisy,f_true,feas_true,opt_true,feas_stat_true,step_norm,\
delta,nu,rho,accepted,vpred,hpred,pred,ared,cauchy_margin_normal,cauchy_margin_tangential";

/// Output encoding for traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidConfig(format!("unknown format '{other}'"))),
        }
    }
}

/// Serialize non-finite floats as strings so JSON stays lossless.
mod float_repr {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) => match s.as_str() {
                "nan" => Ok(f64::NAN),
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(D::Error::custom(format!("bad float repr '{other}'"))),
            },
        }
    }
}

/// One serialized trace row. Field order fixes both the CSV column order
/// and the JSON key order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    #[serde(with = "float_repr")]
    pub f_noisy: f64,
    #[serde(with = "float_repr")]
    pub f_true: f64,
    #[serde(with = "float_repr")]
    pub feas_true: f64,
    #[serde(with = "float_repr")]
    pub opt_true: f64,
    #[serde(with = "float_repr")]
    pub feas_stat_true: f64,
    #[serde(with = "float_repr")]
    pub step_norm: f64,
    #[serde(with = "float_repr")]
    pub delta: f64,
    #[serde(with = "float_repr")]
    pub nu: f64,
    #[serde(with = "float_repr")]
    pub rho: f64,
    pub accepted: bool,
    #[serde(with = "float_repr")]
    pub vpred: f64,
    #[serde(with = "float_repr")]
    pub hpred: f64,
    #[serde(with = "float_repr")]
    pub pred: f64,
    #[serde(with = "float_repr")]
    pub ared: f64,
    #[serde(with = "float_repr")]
    pub cauchy_margin_normal: f64,
    #[serde(with = "float_repr")]
    pub cauchy_margin_tangential: f64,
}

impl From<&IterationRecord> for TraceRow {
    fn from(r: &IterationRecord) -> Self {
        TraceRow {
            iter: r.k,
            f_noisy: r.f_noisy,
            f_true: r.f_true,
            feas_true: r.feas_true,
            opt_true: r.opt_true,
            feas_stat_true: r.feas_stat_true,
            step_norm: r.step_norm,
            delta: r.delta,
            nu: r.nu,
            rho: r.rho,
            accepted: r.accepted,
            vpred: r.vpred,
            hpred: r.hpred,
            pred: r.pred,
            ared: r.ared,
            cauchy_margin_normal: r.cauchy_margin_normal,
            cauchy_margin_tangential: r.cauchy_margin_tangential,
        }
    }
}

impl TraceRow {
    pub fn into_record(self) -> IterationRecord {
        IterationRecord {
            k: self.iter,
            f_noisy: self.f_noisy,
            f_true: self.f_true,
            feas_true: self.feas_true,
            opt_true: self.opt_true,
            feas_stat_true: self.feas_stat_true,
            step_norm: self.step_norm,
            delta: self.delta,
            nu: self.nu,
            rho: self.rho,
            accepted: self.accepted,
            vpred: self.vpred,
            hpred: self.hpred,
            pred: self.pred,
            ared: self.ared,
            cauchy_margin_normal: self.cauchy_margin_normal,
            cauchy_margin_tangential: self.cauchy_margin_tangential,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct TraceFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    header: Option<TraceHeader>,
    rows: Vec<TraceRow>,
}

/// 17 significant digits, enough to reproduce any f64 exactly.
fn fmt_full(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

fn csv_line(r: &IterationRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.k,
        fmt_full(r.f_noisy),
        fmt_full(r.f_true),
        fmt_full(r.feas_true),
        fmt_full(r.opt_true),
        fmt_full(r.feas_stat_true),
        fmt_full(r.step_norm),
        fmt_full(r.delta),
        fmt_full(r.nu),
        fmt_full(r.rho),
        r.accepted,
        fmt_full(r.vpred),
        fmt_full(r.hpred),
        fmt_full(r.pred),
        fmt_full(r.ared),
        fmt_full(r.cauchy_margin_normal),
        fmt_full(r.cauchy_margin_tangential),
    )
}

/// Write a trace to `path`. JSON output carries the experiment header when
/// one is supplied; CSV is rows only, one line per iteration.
pub fn emit_trace(
    trace: &Trace,
    header: Option<&TraceHeader>,
    format: OutputFormat,
    path: &Path,
) -> Result<()> {
    let bytes = render_trace(trace, header, format)?;
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&bytes).map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Render a trace to bytes without touching the filesystem.
pub fn render_trace(
    trace: &Trace,
    header: Option<&TraceHeader>,
    format: OutputFormat,
) -> Result<Vec<u8>> {
    match format {
        OutputFormat::Csv => {
            let mut out = String::with_capacity(64 * (trace.len() + 1));
            out.push_str(CSV_COLUMNS);
            out.push('\n');
            for r in &trace.records {
                out.push_str(&csv_line(r));
                out.push('\n');
            }
            Ok(out.into_bytes())
        }
        OutputFormat::Json => {
            let file = TraceFile {
                header: header.cloned(),
                rows: trace.records.iter().map(TraceRow::from).collect(),
            };
            let mut bytes = serde_json::to_vec_pretty(&file)
                .map_err(|e| Error::InvalidConfig(format!("trace serialization: {e}")))?;
            bytes.push(b'\n');
            Ok(bytes)
        }
    }
}

/// Read back a JSON trace written by [`emit_trace`].
pub fn read_trace_json(path: &Path) -> Result<(Option<TraceHeader>, Vec<IterationRecord>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: TraceFile = serde_json::from_str(&text).map_err(|e| Error::MalformedTrace {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    Ok((
        file.header,
        file.rows.into_iter().map(TraceRow::into_record).collect(),
    ))
}

/// Fill the `*_true` diagnostic columns by re-evaluating the exact problem
/// at the logged iterates. Harness-side only: the solver never reads these.
pub fn fill_true_columns(trace: &mut Trace, problem: &NlpProblem) {
    for (record, detail) in trace.records.iter_mut().zip(trace.details.iter()) {
        let x = &detail.x;
        let lambda = &detail.lambda;
        let a = problem.jacobian(x);
        let c = problem.c(x);
        record.f_true = problem.f(x);
        record.feas_true = c.norm();
        record.opt_true = (a.transpose() * lambda - problem.g(x)).norm();
        record.feas_stat_true = (a.transpose() * &c).norm();
    }
}
