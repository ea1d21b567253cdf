//! Run reports: one row per (instance, check), serialized as JSON with a CSV
//! companion.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use qfig_core::BoundReport;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::io::write_json;

/// CSV header, in order.
pub const CSV_COLUMNS: [&str; 6] = ["instance_id", "check", "lhs", "rhs", "margin", "satisfied"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub instance_id: usize,
    pub check: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub satisfied: bool,
    pub tolerance: f64,
    pub orientation: &'static str,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub components: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Row {
    pub fn from_bound(instance_id: usize, r: &BoundReport) -> Self {
        Row {
            instance_id,
            check: r.check.clone(),
            lhs: r.lhs,
            rhs: r.rhs,
            margin: r.margin(),
            satisfied: r.satisfied,
            tolerance: r.tolerance,
            orientation: r.orientation.symbol(),
            components: r.components.clone(),
            verdict: None,
            error: None,
        }
    }

    /// A check that could not be evaluated; it counts as a violation.
    pub fn failed(instance_id: usize, check: impl Into<String>, error: impl ToString) -> Self {
        Row {
            instance_id,
            check: check.into(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            margin: f64::NAN,
            satisfied: false,
            tolerance: 0.0,
            orientation: "",
            components: BTreeMap::new(),
            verdict: None,
            error: Some(error.to_string()),
        }
    }

    pub fn renamed(mut self, check: impl Into<String>) -> Self {
        self.check = check.into();
        self
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.components.insert(name.to_string(), value);
        self
    }

    pub fn with_verdict(mut self, verdict: &'static str) -> Self {
        self.verdict = Some(verdict);
        self
    }

    /// Overrides the bound's own verdict with a consistency requirement.
    pub fn require(mut self, ok: bool) -> Self {
        self.satisfied = ok;
        self
    }
}

/// Shortest round-trip form, with `NaN`, `inf` and `-inf` spelled out.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        serde_json::Number::from_f64(v).map_or_else(|| v.to_string(), |n| n.to_string())
    } else if v.is_nan() {
        "NaN".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Column-oriented numeric table for plotting.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Environment {
    pub version: &'static str,
    pub seed: u64,
    pub trials: usize,
    pub dims: Vec<usize>,
    pub metrics: Vec<String>,
    pub grid: usize,
    pub tolerances: BTreeMap<&'static str, f64>,
    pub timestamp: u64,
}

impl Environment {
    pub fn new(cfg: &RunConfig) -> Self {
        use qfig_core::recovery::{BOUND_TOL, FALLBACK_RESIDUAL_TOL, NEGATIVE_GAP_TOL};
        let tolerances = BTreeMap::from([
            ("tol", cfg.tol),
            ("bound", BOUND_TOL),
            ("negative_gap", NEGATIVE_GAP_TOL),
            ("fallback_residual", FALLBACK_RESIDUAL_TOL),
            ("dpi", crate::commands::DPI_TOL),
        ]);
        Environment {
            version: env!("CARGO_PKG_VERSION"),
            seed: cfg.seed,
            trials: cfg.trials,
            dims: cfg.dims.clone(),
            metrics: cfg.metric_names(),
            grid: cfg.grid,
            tolerances,
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub checks: usize,
    pub violations: usize,
    pub errors: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub environment: Environment,
    pub summary: Summary,
    pub rows: Vec<Row>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub tables: BTreeMap<String, Table>,
}

impl Report {
    pub fn new(cfg: &RunConfig, rows: Vec<Row>, tables: BTreeMap<String, Table>) -> Self {
        let violations = rows.iter().filter(|r| !r.satisfied).count();
        let errors = rows.iter().filter(|r| r.error.is_some()).count();
        Report {
            command: cfg.command.name(),
            environment: Environment::new(cfg),
            summary: Summary { checks: rows.len(), violations, errors, passed: violations == 0 },
            rows,
            tables,
        }
    }

    /// 0 when every check holds, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        u8::from(!self.summary.passed)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(CSV_COLUMNS)?;
        for r in &self.rows {
            out.write_record([
                r.instance_id.to_string(),
                r.check.clone(),
                format_float(r.lhs),
                format_float(r.rhs),
                format_float(r.margin),
                r.satisfied.to_string(),
            ])?;
        }
        out.flush().map_err(|source| Error::Io { path: PathBuf::from("<csv>"), source })
    }

    /// Writes `path` (JSON), `path` with extension `csv`, and one
    /// `<stem>.<table>.csv` per table. Returns the written paths.
    pub fn write(&self, path: &Path) -> Result<Vec<PathBuf>> {
        write_json(path, self)?;
        let io = |p: &Path| {
            let p = p.to_path_buf();
            move |source| Error::Io { path: p, source }
        };
        let csv_path = path.with_extension("csv");
        self.write_csv(std::fs::File::create(&csv_path).map_err(io(&csv_path))?)?;
        let mut written = vec![path.to_path_buf(), csv_path];
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
        for (name, table) in &self.tables {
            let p = path.with_file_name(format!("{stem}.{name}.csv"));
            let mut w = csv::Writer::from_writer(std::fs::File::create(&p).map_err(io(&p))?);
            w.write_record(&table.columns)?;
            for row in &table.rows {
                w.write_record(row.iter().map(|&v| format_float(v)))?;
            }
            w.flush().map_err(io(&p))?;
            written.push(p);
        }
        Ok(written)
    }
}
