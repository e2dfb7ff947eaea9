//! Suite configuration, report files and trend tables for the `hardylab` binary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use hardylab::lab::{format_g, CaseResult, Gate, InequalityCase, RunOptions, TrendReport, CSV_HEADER};
use serde::Deserialize;

pub const EXIT_OK: u8 = 0;
pub const EXIT_GATE_FAILED: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub cases: Vec<InequalityCase>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub refine: bool,
    #[serde(default)]
    pub probe: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}:{column}: {message}")]
    Parse { path: PathBuf, line: usize, column: usize, message: String },
    #[error("{path}: case {index}: {source}")]
    Invalid { path: PathBuf, index: usize, source: hardylab::Error },
    #[error("{0}")]
    Other(String),
}

/// Parses a suite file. Validation happens separately, once command-line
/// overrides are known.
pub fn parse_config(path: &Path, text: &str) -> Result<RunConfig, ConfigError> {
    serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: strip_position(&e.to_string()),
    })
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
    parse_config(path, &text)
}

pub fn validate(path: &Path, cfg: &RunConfig, opts: &RunOptions) -> Result<(), ConfigError> {
    if cfg.cases.is_empty() {
        return Err(ConfigError::Other(format!("{}: no cases", path.display())));
    }
    for (index, case) in cfg.cases.iter().enumerate() {
        case.validate(opts).map_err(|source| ConfigError::Invalid { path: path.to_path_buf(), index, source })?;
    }
    Ok(())
}

/// `NNN_<result_id>.json`
pub fn report_file_name(res: &CaseResult, id: &str) -> String {
    format!("{:03}_{id}.json", res.index)
}

/// Aggregate CSV with a header and `\n` line endings.
pub fn summary_csv(results: &[CaseResult]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in results {
        for row in r.csv_rows() {
            out.push_str(&row);
            out.push('\n');
        }
    }
    out
}

/// One line per failed gate, for standard error.
pub fn failures(results: &[CaseResult], ids: &[String]) -> Vec<String> {
    results
        .iter()
        .zip(ids)
        .filter_map(|(r, id)| match &r.gate {
            Gate::Fail(reason) => Some(format!("case {} ({id}): {reason}", r.index)),
            _ => None,
        })
        .collect()
}

/// Two-column `param,ratio` blocks per arm with `#` comment lines carrying
/// monotonicity statistics and, when present, the log fit and target.
pub fn trend_csv(t: &TrendReport) -> String {
    let g = |x: f64| format_g(x, 12);
    let mut out = String::new();
    let _ = writeln!(out, "# result_id={} n={} N={} L={}", t.result_id, t.n, t.pts_per_axis, g(t.box_len));
    for arm in &t.arms {
        let _ = writeln!(out, "# arm={}", arm.label);
        out.push_str("param,ratio\n");
        for (p, v) in arm.params.iter().zip(&arm.values) {
            let _ = writeln!(out, "{},{}", g(*p), g(*v));
        }
        let steps = arm.values.len().saturating_sub(1);
        let ups = arm.values.windows(2).filter(|w| w[1] > w[0]).count();
        let (lo, hi) = arm.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
        let _ = writeln!(
            out,
            "# strictly_increasing={} increases={ups}/{steps} min={} max={}",
            arm.strictly_increasing(),
            g(lo),
            g(hi)
        );
    }
    if let Some(target) = t.target {
        let last = t.arms.first().and_then(|a| a.values.last()).copied().unwrap_or(f64::NAN);
        let _ = writeln!(out, "# target={} last_over_target={}", g(target), g(last / target));
    }
    if let Some(fit) = t.log_fit {
        let _ = writeln!(
            out,
            "# log_fit intercept={} slope={} r_squared={}",
            g(fit.intercept),
            g(fit.slope),
            g(fit.r_squared)
        );
    }
    out
}
