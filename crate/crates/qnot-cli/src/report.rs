//! Record types, CSV rendering/parsing, and the JSON report envelope.
//!
//! CSV files carry exactly the records (header + rows, LF endings); JSON
//! reports wrap the records with the run configuration, a summary, and the
//! tool version. Floats render through `Display`, whose shortest-roundtrip
//! form reparses bit-exactly.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// One run's fully resolved configuration; serialized into JSON reports.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub n_start: usize,
    pub n_end: usize,
    pub seed: u64,
    pub samples: usize,
    pub grid_p: usize,
    pub grid_theta: usize,
    pub tol: f64,
    pub format: OutputFormat,
    pub out_path: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundsRecord {
    pub n: usize,
    pub bound_not_exact: f64,
    pub bound_not_uniform: f64,
    pub bound_cc: f64,
    pub bound_hadamard: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AttainRecord {
    pub n: usize,
    pub predicted: f64,
    pub measured: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditRecord {
    pub n: usize,
    pub seed: u64,
    pub measured_max_distance: f64,
    pub component_bound: f64,
    pub overlap_sum: f64,
    pub fixed_ancilla_bound: f64,
    pub general_bound: f64,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Figure2Record {
    pub n: usize,
    pub a_n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PurifyRecord {
    pub n: usize,
    pub seed: u64,
    pub rank: usize,
    pub n_prime: usize,
    pub max_residual: f64,
    pub commutator: f64,
}

/// JSON report envelope: config, records, summary, tool_version.
#[derive(Debug, Serialize)]
pub struct Report<'a, R: Serialize, S: Serialize> {
    pub config: &'a RunConfig,
    pub records: &'a [R],
    pub summary: &'a S,
    pub tool_version: &'static str,
}

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn render_json<R: Serialize, S: Serialize>(
    config: &RunConfig,
    records: &[R],
    summary: &S,
) -> String {
    let report = Report {
        config,
        records,
        summary,
        tool_version: TOOL_VERSION,
    };
    let mut out = serde_json::to_string_pretty(&report).expect("report serialization");
    out.push('\n');
    out
}

pub const BOUNDS_HEADER: &str = "n,bound_not_exact,bound_not_uniform,bound_cc,bound_hadamard";
pub const ATTAIN_HEADER: &str = "n,predicted,measured,abs_error";
pub const AUDIT_HEADER: &str = "n,seed,measured_max_distance,component_bound,overlap_sum,fixed_ancilla_bound,general_bound,violations";
pub const FIGURE2_HEADER: &str = "n,a_n";
pub const PURIFY_HEADER: &str = "n,seed,rank,n_prime,max_residual,commutator";

pub fn bounds_to_csv(records: &[BoundsRecord]) -> String {
    let mut out = String::from(BOUNDS_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.n, r.bound_not_exact, r.bound_not_uniform, r.bound_cc, r.bound_hadamard
        ));
    }
    out
}

pub fn attain_to_csv(records: &[AttainRecord]) -> String {
    let mut out = String::from(ATTAIN_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.n, r.predicted, r.measured, r.abs_error
        ));
    }
    out
}

pub fn audit_to_csv(records: &[AuditRecord]) -> String {
    let mut out = String::from(AUDIT_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.n,
            r.seed,
            r.measured_max_distance,
            r.component_bound,
            r.overlap_sum,
            r.fixed_ancilla_bound,
            r.general_bound,
            r.violations.join(";")
        ));
    }
    out
}

pub fn figure2_to_csv(records: &[Figure2Record]) -> String {
    let mut out = String::from(FIGURE2_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!("{},{}\n", r.n, r.a_n));
    }
    out
}

pub fn purify_to_csv(records: &[PurifyRecord]) -> String {
    let mut out = String::from(PURIFY_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n, r.seed, r.rank, r.n_prime, r.max_residual, r.commutator
        ));
    }
    out
}

fn split_rows<'a>(text: &'a str, header: &str) -> Result<Vec<&'a str>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == header => {}
        other => return Err(format!("unexpected header {other:?}")),
    }
    Ok(lines.filter(|l| !l.is_empty()).collect())
}

fn field<T: std::str::FromStr>(parts: &[&str], idx: usize) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    parts
        .get(idx)
        .ok_or_else(|| format!("missing column {idx}"))?
        .parse()
        .map_err(|e| format!("column {idx}: {e}"))
}

pub fn parse_bounds_csv(text: &str) -> Result<Vec<BoundsRecord>, String> {
    split_rows(text, BOUNDS_HEADER)?
        .into_iter()
        .map(|line| {
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != 5 {
                return Err(format!("expected 5 columns, got {}", parts.len()));
            }
            Ok(BoundsRecord {
                n: field(&parts, 0)?,
                bound_not_exact: field(&parts, 1)?,
                bound_not_uniform: field(&parts, 2)?,
                bound_cc: field(&parts, 3)?,
                bound_hadamard: field(&parts, 4)?,
            })
        })
        .collect()
}

pub fn parse_attain_csv(text: &str) -> Result<Vec<AttainRecord>, String> {
    split_rows(text, ATTAIN_HEADER)?
        .into_iter()
        .map(|line| {
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != 4 {
                return Err(format!("expected 4 columns, got {}", parts.len()));
            }
            Ok(AttainRecord {
                n: field(&parts, 0)?,
                predicted: field(&parts, 1)?,
                measured: field(&parts, 2)?,
                abs_error: field(&parts, 3)?,
            })
        })
        .collect()
}

pub fn parse_audit_csv(text: &str) -> Result<Vec<AuditRecord>, String> {
    split_rows(text, AUDIT_HEADER)?
        .into_iter()
        .map(|line| {
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != 8 {
                return Err(format!("expected 8 columns, got {}", parts.len()));
            }
            let violations = if parts[7].is_empty() {
                Vec::new()
            } else {
                parts[7].split(';').map(str::to_string).collect()
            };
            Ok(AuditRecord {
                n: field(&parts, 0)?,
                seed: field(&parts, 1)?,
                measured_max_distance: field(&parts, 2)?,
                component_bound: field(&parts, 3)?,
                overlap_sum: field(&parts, 4)?,
                fixed_ancilla_bound: field(&parts, 5)?,
                general_bound: field(&parts, 6)?,
                violations,
            })
        })
        .collect()
}

pub fn parse_figure2_csv(text: &str) -> Result<Vec<Figure2Record>, String> {
    split_rows(text, FIGURE2_HEADER)?
        .into_iter()
        .map(|line| {
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != 2 {
                return Err(format!("expected 2 columns, got {}", parts.len()));
            }
            Ok(Figure2Record {
                n: field(&parts, 0)?,
                a_n: field(&parts, 1)?,
            })
        })
        .collect()
}

pub fn parse_purify_csv(text: &str) -> Result<Vec<PurifyRecord>, String> {
    split_rows(text, PURIFY_HEADER)?
        .into_iter()
        .map(|line| {
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != 6 {
                return Err(format!("expected 6 columns, got {}", parts.len()));
            }
            Ok(PurifyRecord {
                n: field(&parts, 0)?,
                seed: field(&parts, 1)?,
                rank: field(&parts, 2)?,
                n_prime: field(&parts, 3)?,
                max_residual: field(&parts, 4)?,
                commutator: field(&parts, 5)?,
            })
        })
        .collect()
}
