//! JSON summaries and CSV data files.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use nalgebra::{Matrix2, Vector3};
use rotframe_core::io::{write_series_csv, Series};
use rotframe_core::phases::PhaseResult;
use rotframe_core::C64;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;
pub const SUMMARY_FILE: &str = "summary.json";

/// Significant digits kept for every float in a summary.
const DIGITS: usize = 12;

/// Round every float in `v` to a fixed number of significant digits so that
/// summaries compare byte for byte.
pub fn fix_precision(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            let r: f64 = format!("{:.*e}", DIGITS - 1, x).parse().unwrap_or(x);
            // -0.0 and 0.0 print differently.
            let r = if r == 0.0 { 0.0 } else { r };
            *v = serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number);
        }
        Value::Array(a) => a.iter_mut().for_each(fix_precision),
        Value::Object(o) => o.values_mut().for_each(fix_precision),
        _ => {}
    }
}

pub fn write_summary(dir: &Path, summary: &Value) -> CliResult<PathBuf> {
    let mut v = summary.clone();
    fix_precision(&mut v);
    std::fs::create_dir_all(dir)?;
    let path = dir.join(SUMMARY_FILE);
    let mut text = serde_json::to_string_pretty(&v).map_err(|e| CliError::Config(e.to_string()))?;
    text.push('\n');
    std::fs::write(&path, text)?;
    Ok(path)
}

/// Write a non-empty series as CSV with a header row; values use 17
/// significant digits and read back bit for bit.
pub fn emit_plot_data(series: &Series, path: &Path) -> CliResult<()> {
    if series.is_empty() {
        return Err(CliError::Precondition(format!("refusing to write empty series to {}", path.display())));
    }
    let f = File::create(path).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
    write_series_csv(series, BufWriter::new(f))?;
    Ok(())
}

pub fn vec_json(v: &Vector3<f64>) -> Value {
    json!([v.x, v.y, v.z])
}

fn parts(m: &Matrix2<C64>, f: impl Fn(&C64) -> f64) -> Value {
    json!([[f(&m[(0, 0)]), f(&m[(0, 1)])], [f(&m[(1, 0)]), f(&m[(1, 1)])]])
}

/// `{value_rad, value_mod_2pi, operator_re, operator_im, method, path_summary}`.
pub fn phase_json(r: &PhaseResult, path_summary: Value) -> Value {
    let (re, im) = match r.operator {
        Some(op) => (parts(&op.matrix, |z| z.re), parts(&op.matrix, |z| z.im)),
        None => (Value::Null, Value::Null),
    };
    json!({
        "value_rad": r.value_rad,
        "value_mod_2pi": r.value_mod_2pi,
        "operator_re": re,
        "operator_im": im,
        "method": r.method,
        "path_summary": path_summary,
    })
}
