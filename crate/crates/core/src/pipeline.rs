//! Single-pass sieve → scan → histogram → fit pipeline and its report files.
//!
//! Files written to the output directory:
//!
//! | file               | contents                                              |
//! |--------------------|-------------------------------------------------------|
//! | `summary.csv`      | one row per checkpoint: `pi2,slope,stat_error,pi1,N,…` |
//! | `hist_<N>.csv`     | separation histogram and fitted line per checkpoint   |
//! | `slope_model.csv`  | `x = ln π₁` against slope, with the `C/x` model       |
//! | `model_fit.csv`    | fitted `C` (only when at least two slopes exist)      |
//! | `reference.csv`    | analytic estimates per checkpoint                     |
//! | `figure4.csv`      | `m₀` from an external count table (with `--external`) |
//! | `run.json`         | options, π₁ convention report, warnings               |
//!
//! Every output is a deterministic function of the configuration; the worker
//! count never reaches the files and wall time only does on request.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufRead, BufReader, Read};
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::fit::{fit_constrained, FitError, FitOptions, SlopeFit};
use crate::model::{self, fit_inverse_log, ModelFit, ReferenceEstimates, SlopePoint};
use crate::published::{find_row, Pi1Convention};
use crate::scan::{scan_with_checkpoints, CheckpointSnapshot, CheckpointSpec, ScanError};
use crate::sieve::{prime_stream, SieveConfig, SieveError, DEFAULT_SEGMENT_SIZE};
use crate::stats::FrequencyTable;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid run configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Sieve(#[from] SieveError),
    #[error(transparent)]
    Scan(#[from] ScanError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("failed to encode run metadata: {0}")]
    Json(#[from] serde_json::Error),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub limit: u64,
    pub segment_size: u64,
    pub workers: usize,
    pub checkpoints: Vec<CheckpointSpec>,
    pub output_dir: PathBuf,
    pub fit_options: FitOptions,
    /// Adds raw π₁, analyzed π₂ and trailing singleton columns to the summary.
    pub emit_raw_counts: bool,
    /// Determine the π₁ convention from the published slope table.
    pub verify_published: bool,
    pub external: Option<PathBuf>,
    /// Writes wall time into `run.json`, which makes outputs run-dependent.
    pub record_timing: bool,
    pub quad_tol: f64,
}

impl RunConfig {
    pub fn new(limit: u64, output_dir: impl Into<PathBuf>) -> Self {
        RunConfig {
            limit,
            segment_size: DEFAULT_SEGMENT_SIZE,
            workers: 1,
            checkpoints: Vec::new(),
            output_dir: output_dir.into(),
            fit_options: FitOptions::default(),
            emit_raw_counts: false,
            verify_published: false,
            external: None,
            record_timing: false,
            quad_tol: model::DEFAULT_QUAD_TOL,
        }
    }

    pub fn sieve_config(&self) -> Result<SieveConfig, SieveError> {
        SieveConfig::new(self.limit)?
            .with_segment_size(self.segment_size)?
            .with_workers(self.workers)
    }

    /// Checkpoints in canonical order, or an error for duplicates and limits
    /// past the sieve bound. With no checkpoints, the limit itself is one.
    pub fn normalized_checkpoints(&self) -> Result<Vec<CheckpointSpec>, PipelineError> {
        let mut checkpoints = self.checkpoints.clone();
        if checkpoints.is_empty() {
            checkpoints.push(CheckpointSpec::Limit(self.limit));
        }
        checkpoints.sort();
        for pair in checkpoints.windows(2) {
            if pair[0] == pair[1] {
                return Err(PipelineError::Config(format!("duplicate checkpoint {}", pair[0])));
            }
        }
        for c in &checkpoints {
            match *c {
                CheckpointSpec::Limit(n) if n > self.limit => {
                    return Err(PipelineError::Config(format!(
                        "checkpoint {c} lies beyond the limit {}",
                        self.limit
                    )))
                }
                CheckpointSpec::Limit(n) if n < 2 => {
                    return Err(PipelineError::Config(format!("checkpoint {c} is below 2")))
                }
                CheckpointSpec::TwinCount(0) => {
                    return Err(PipelineError::Config("twin checkpoints start at 1".into()))
                }
                _ => {}
            }
        }
        Ok(checkpoints)
    }
}

/// Status of one checkpoint's fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    Failed(String),
}

impl RowStatus {
    pub fn label(&self) -> &str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::Failed(code) => code,
        }
    }
}

/// One line of the slope table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckpointRow {
    pub pi2: u64,
    pub slope: Option<f64>,
    pub stat_error: Option<f64>,
    pub pi1: u64,
    pub n: u64,
    pub bins: usize,
    pub status: RowStatus,
    pub checkpoint: CheckpointSpec,
    pub pi1_raw: u64,
    pub pi2_analyzed: u64,
    pub events: u64,
    pub trailing_singletons: u64,
}

#[derive(Debug, Clone)]
pub struct CheckpointResult {
    pub snapshot: CheckpointSnapshot,
    pub table: Option<FrequencyTable>,
    pub fit: Result<SlopeFit, FitError>,
    pub reference: Option<ReferenceEstimates>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConventionCheck {
    pub pi2: u64,
    pub n: u64,
    pub published_pi1: u64,
    pub reported_pi1: u64,
    pub pi1_raw: u64,
    pub matches: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConventionReport {
    pub convention: Pi1Convention,
    /// `published_table`, `published_table_unmatched` or `default`.
    pub source: &'static str,
    pub checks: Vec<ConventionCheck>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SieveWork {
    pub segments: u64,
    pub candidates: u64,
    pub expected_segments: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExternalPoint {
    pub n: u64,
    pub pi1_published: u64,
    pub pi2_published: u64,
    pub pi1_adjusted: u64,
    pub pi2_adjusted: u64,
    /// `ln(π₁ − 2)`.
    pub x: f64,
    pub m0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExternalIssue {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ExternalData {
    pub points: Vec<ExternalPoint>,
    pub issues: Vec<ExternalIssue>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub rows: Vec<CheckpointRow>,
    pub checkpoints: Vec<CheckpointResult>,
    pub model: Option<ModelFit>,
    pub convention: ConventionReport,
    pub incomplete: Vec<CheckpointSpec>,
    pub external: Option<ExternalData>,
    pub sieve: SieveWork,
    pub pi1_at_limit: u64,
    pub warnings: Vec<String>,
    pub wall_seconds: f64,
}

/// Points for the inverse-log fit: `x = ln π₁` from each successful row.
pub fn model_points(rows: &[CheckpointRow]) -> Vec<SlopePoint> {
    rows.iter()
        .filter_map(|r| match (r.slope, r.stat_error) {
            (Some(m), Some(sigma)) => Some(SlopePoint {
                x: (r.pi1 as f64).ln(),
                m,
                sigma,
            }),
            _ => None,
        })
        .collect()
}

fn analyze(snapshot: CheckpointSnapshot, opts: &FitOptions, quad_tol: f64) -> CheckpointResult {
    let table = snapshot.histogram.to_frequency_table().ok();
    let fit = match &table {
        Some(t) => fit_constrained(t, opts),
        None => Err(FitError::InsufficientData(snapshot.histogram.bins())),
    };
    let reference = ReferenceEstimates::compute(
        snapshot.n_effective,
        snapshot.pi1_adjusted(),
        snapshot.pi2_analyzed,
        quad_tol,
    )
    .ok();
    CheckpointResult {
        snapshot,
        table,
        fit,
        reference,
    }
}

fn resolve_convention(
    results: &[CheckpointResult],
    verify: bool,
    warnings: &mut Vec<String>,
) -> ConventionReport {
    let mut convention = Pi1Convention::default();
    let mut source = "default";
    if verify {
        let first = results.first().map(|r| &r.snapshot);
        match first.and_then(|s| Pi1Convention::detect(s.pi2_total, s.n_effective, s.pi1_raw)) {
            Some(c) => {
                convention = c;
                source = "published_table";
            }
            None => {
                source = "published_table_unmatched";
                warnings.push(
                    "first checkpoint does not match a published row; using the default π₁ convention"
                        .into(),
                );
            }
        }
    }
    let checks = results
        .iter()
        .filter_map(|r| {
            let s = &r.snapshot;
            let row = find_row(s.pi2_total, s.n_effective)?;
            let reported = convention.apply(s.pi1_raw);
            Some(ConventionCheck {
                pi2: s.pi2_total,
                n: s.n_effective,
                published_pi1: row.pi1,
                reported_pi1: reported,
                pi1_raw: s.pi1_raw,
                matches: reported == row.pi1,
            })
        })
        .collect();
    ConventionReport {
        convention,
        source,
        checks,
    }
}

fn to_row(result: &CheckpointResult, convention: Pi1Convention) -> CheckpointRow {
    let s = &result.snapshot;
    let (slope, stat_error, bins, status) = match &result.fit {
        Ok(fit) => (Some(fit.m), Some(fit.std_error), fit.bins_used, RowStatus::Ok),
        Err(e) => (None, None, s.histogram.bins(), RowStatus::Failed(e.code().into())),
    };
    CheckpointRow {
        pi2: s.pi2_total,
        slope,
        stat_error,
        pi1: convention.apply(s.pi1_raw),
        n: s.n_effective,
        bins,
        status,
        checkpoint: s.spec,
        pi1_raw: s.pi1_raw,
        pi2_analyzed: s.pi2_analyzed,
        events: s.histogram.total_events(),
        trailing_singletons: s.trailing_singletons,
    }
}

/// Runs the whole pipeline and writes every report file.
pub fn run(config: &RunConfig) -> Result<RunReport, PipelineError> {
    let started = Instant::now();
    let sieve_config = config.sieve_config()?;
    let checkpoints = config.normalized_checkpoints()?;
    fs::create_dir_all(&config.output_dir).map_err(io_err(&config.output_dir))?;

    let mut warnings = Vec::new();
    let mut stream = prime_stream(sieve_config)?;
    let counters = stream.counters();
    let outcome = scan_with_checkpoints(&mut stream, &checkpoints, config.limit)?;
    if let Some(e) = stream.error() {
        return Err(e.clone().into());
    }
    drop(stream);
    info!(
        "scanned {} primes up to {} ({} segments)",
        outcome.final_state.pi1_raw,
        config.limit,
        counters.segments()
    );
    for c in &outcome.incomplete {
        warnings.push(format!("checkpoint {c} not reached within limit {}", config.limit));
    }

    let results: Vec<CheckpointResult> = outcome
        .snapshots
        .into_par_iter()
        .map(|s| analyze(s, &config.fit_options, config.quad_tol))
        .collect();

    let convention = resolve_convention(&results, config.verify_published, &mut warnings);
    let rows: Vec<CheckpointRow> = results.iter().map(|r| to_row(r, convention.convention)).collect();
    for row in &rows {
        if let RowStatus::Failed(code) = &row.status {
            warnings.push(format!("fit failed at checkpoint {} (N = {}): {code}", row.checkpoint, row.n));
        }
    }

    let points = model_points(&rows);
    let model = match fit_inverse_log(&points) {
        Ok(fit) => Some(fit),
        Err(e) => {
            warnings.push(format!("slope model fit skipped: {e}"));
            None
        }
    };

    let external = match &config.external {
        Some(path) => {
            let data = ingest_external(path)?;
            if data.points.is_empty() && data.issues.is_empty() {
                warnings.push(format!("external file {} has no rows", path.display()));
            }
            for issue in &data.issues {
                warnings.push(format!("{}:{}: {}", path.display(), issue.line, issue.message));
            }
            Some(data)
        }
        None => None,
    };

    for w in &warnings {
        warn!("{w}");
    }

    let report = RunReport {
        rows,
        checkpoints: results,
        model,
        convention,
        incomplete: outcome.incomplete,
        external,
        sieve: SieveWork {
            segments: counters.segments(),
            candidates: counters.candidates(),
            expected_segments: sieve_config.segment_count(),
        },
        pi1_at_limit: outcome.final_state.pi1_raw,
        warnings,
        wall_seconds: started.elapsed().as_secs_f64(),
    };
    write_reports(config, &report)?;
    Ok(report)
}

/// Reals with 17 significant digits, which round-trip exactly.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_real(x: Option<f64>) -> String {
    x.map(fmt_real).unwrap_or_default()
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), PipelineError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(io_err(&path))
}

pub fn summary_csv(rows: &[CheckpointRow], raw_counts: bool) -> String {
    let mut out = String::from("pi2,slope,stat_error,pi1,N,bins,status,checkpoint");
    if raw_counts {
        out.push_str(",pi1_raw,pi2_analyzed,events,trailing_singletons");
    }
    out.push('\n');
    for r in rows {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.pi2,
            opt_real(r.slope),
            opt_real(r.stat_error),
            r.pi1,
            r.n,
            r.bins,
            r.status.label(),
            r.checkpoint
        );
        if raw_counts {
            let _ = write!(
                out,
                ",{},{},{},{}",
                r.pi1_raw, r.pi2_analyzed, r.events, r.trailing_singletons
            );
        }
        out.push('\n');
    }
    out
}

pub fn histogram_csv(result: &CheckpointResult) -> String {
    let mut out = String::from("separation,count,rel_freq,ln_rel_freq,fit_ln_rel_freq\n");
    if let Some(table) = &result.table {
        for row in table.rows() {
            let fitted = result.fit.as_ref().ok().map(|f| f.ln_frequency(row.separation));
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                row.separation,
                row.count,
                fmt_real(row.rel_freq),
                fmt_real(row.ln_rel_freq),
                opt_real(fitted)
            );
        }
    }
    out
}

fn slope_model_csv(rows: &[CheckpointRow], model: Option<&ModelFit>) -> String {
    let mut out = String::from("x,slope,stat_error,model_slope,pi1,N\n");
    for r in rows {
        let (Some(m), Some(sigma)) = (r.slope, r.stat_error) else {
            continue;
        };
        let x = (r.pi1 as f64).ln();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_real(x),
            fmt_real(m),
            fmt_real(sigma),
            opt_real(model.map(|f| f.slope_at(x))),
            r.pi1,
            r.n
        );
    }
    out
}

fn model_fit_csv(model: &ModelFit) -> String {
    format!(
        "C,C_err,points_used,two_c2\n{},{},{},{}\n",
        fmt_real(model.c),
        fmt_real(model.c_err),
        model.points_used,
        fmt_real(model::TWO_C2)
    )
}

fn reference_csv(results: &[CheckpointResult]) -> String {
    let mut out = String::from(
        "N,pi1_adjusted,pi2_analyzed,li1,li2,pi1_simple,pi2_simple,s0,m0,s0_tilde_exact,\
         s0_tilde_simplified,s0_tilde_from_pi1,s0_tilde_from_pi1_loglog,m_tilde,m_tilde_counted,\
         slope,mean_separation\n",
    );
    for result in results {
        let Some(r) = &result.reference else { continue };
        let s = &result.snapshot;
        let fit = result.fit.as_ref().ok();
        let reals = [
            r.li1,
            r.li2,
            r.pi1_simple,
            r.pi2_simple,
            r.s0,
            r.m0,
            r.s0_tilde_exact,
            r.s0_tilde_simplified,
            r.s0_tilde_from_pi1,
            r.s0_tilde_from_pi1_loglog,
            r.m_tilde,
            r.m_tilde_counted,
        ];
        let _ = write!(out, "{},{},{}", r.n, s.pi1_adjusted(), s.pi2_analyzed);
        for v in reals {
            let _ = write!(out, ",{}", fmt_real(v));
        }
        let _ = writeln!(
            out,
            ",{},{}",
            opt_real(fit.map(|f| f.m)),
            opt_real(fit.map(|f| f.mean_separation))
        );
    }
    out
}

pub fn figure4_csv(data: &ExternalData, model: Option<&ModelFit>) -> String {
    let mut out = String::from("N,pi1_adjusted,pi2_adjusted,x,m0,model_slope\n");
    for p in &data.points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            p.n,
            p.pi1_adjusted,
            p.pi2_adjusted,
            fmt_real(p.x),
            fmt_real(p.m0),
            opt_real(model.map(|f| f.slope_at(p.x)))
        );
    }
    out
}

#[derive(Serialize)]
struct RunMetadata<'a> {
    limit: u64,
    segment_size: u64,
    checkpoints: Vec<String>,
    fit_options: &'a FitOptions,
    quad_tol: f64,
    pi1_at_limit: u64,
    pi1_convention: &'a ConventionReport,
    model: Option<&'a ModelFit>,
    incomplete_checkpoints: Vec<String>,
    sieve: &'a SieveWork,
    warnings: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_seconds: Option<f64>,
}

fn write_reports(config: &RunConfig, report: &RunReport) -> Result<(), PipelineError> {
    let dir = &config.output_dir;
    write_file(dir, "summary.csv", &summary_csv(&report.rows, config.emit_raw_counts))?;

    let mut used = std::collections::BTreeSet::new();
    for result in &report.checkpoints {
        let n = result.snapshot.n_effective;
        let mut name = format!("hist_{n}.csv");
        let mut k = 2;
        while !used.insert(name.clone()) {
            name = format!("hist_{n}_{k}.csv");
            k += 1;
        }
        write_file(dir, &name, &histogram_csv(result))?;
    }

    write_file(dir, "slope_model.csv", &slope_model_csv(&report.rows, report.model.as_ref()))?;
    let model_path = dir.join("model_fit.csv");
    match &report.model {
        Some(model) => write_file(dir, "model_fit.csv", &model_fit_csv(model))?,
        None if model_path.exists() => fs::remove_file(&model_path).map_err(io_err(&model_path))?,
        None => {}
    }
    write_file(dir, "reference.csv", &reference_csv(&report.checkpoints))?;
    if let Some(data) = &report.external {
        write_file(dir, "figure4.csv", &figure4_csv(data, report.model.as_ref()))?;
    }

    let metadata = RunMetadata {
        limit: config.limit,
        segment_size: config.segment_size,
        checkpoints: report.rows.iter().map(|r| r.checkpoint.to_string()).collect(),
        fit_options: &config.fit_options,
        quad_tol: config.quad_tol,
        pi1_at_limit: report.pi1_at_limit,
        pi1_convention: &report.convention,
        model: report.model.as_ref(),
        incomplete_checkpoints: report.incomplete.iter().map(|c| c.to_string()).collect(),
        sieve: &report.sieve,
        warnings: &report.warnings,
        wall_seconds: config.record_timing.then_some(report.wall_seconds),
    };
    let mut json = serde_json::to_string_pretty(&metadata)?;
    json.push('\n');
    write_file(dir, "run.json", &json)
}

fn parse_count(field: Option<&str>, name: &str) -> Result<u64, String> {
    let field = field.map(str::trim).filter(|f| !f.is_empty());
    let field = field.ok_or_else(|| format!("missing {name}"))?;
    field
        .parse()
        .map_err(|_| format!("{name} is not a natural number: `{field}`"))
}

/// Parses an `N,pi1,pi2` table. `#` starts a comment; an optional header line
/// is skipped. Malformed or unusable rows become issues, not errors.
pub fn parse_external<R: Read>(reader: R) -> io::Result<ExternalData> {
    let mut data = ExternalData::default();
    let mut previous_n = None;
    let mut seen_data = false;
    for (index, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let number = index + 1;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if !seen_data && !content.starts_with(|c: char| c.is_ascii_digit()) {
            seen_data = true;
            continue;
        }
        seen_data = true;
        let mut fields = content.split(',');
        let parsed = (|| {
            let n = parse_count(fields.next(), "N")?;
            let pi1 = parse_count(fields.next(), "pi1")?;
            let pi2 = parse_count(fields.next(), "pi2")?;
            if fields.next().is_some() {
                return Err("expected exactly three fields".to_string());
            }
            Ok((n, pi1, pi2))
        })();
        let (n, pi1, pi2) = match parsed {
            Ok(v) => v,
            Err(message) => {
                data.issues.push(ExternalIssue { line: number, message });
                continue;
            }
        };
        if previous_n.is_some_and(|p| n <= p) {
            data.issues.push(ExternalIssue {
                line: number,
                message: format!("N = {n} is not increasing"),
            });
            continue;
        }
        previous_n = Some(n);

        let adjusted = pi1.checked_sub(2).zip(pi2.checked_sub(1));
        let point = adjusted.and_then(|(a1, a2)| {
            let m0 = model::m0(a1, a2).ok()?;
            (a2 >= 1).then(|| ExternalPoint {
                n,
                pi1_published: pi1,
                pi2_published: pi2,
                pi1_adjusted: a1,
                pi2_adjusted: a2,
                x: (a1 as f64).ln(),
                m0,
            })
        });
        match point {
            Some(p) => data.points.push(p),
            None => data.issues.push(ExternalIssue {
                line: number,
                message: format!("pi1 = {pi1}, pi2 = {pi2} leave no singletons after adjustment"),
            }),
        }
    }
    Ok(data)
}

/// Reads an external count table, applying the `π₁ − 2`, `π₂ − 1`
/// adjustment that matches the analyzed range starting at (5, 7).
pub fn ingest_external(path: &Path) -> Result<ExternalData, PipelineError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    parse_external(file).map_err(io_err(path))
}

/// A parsed `summary.csv` line.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRecord {
    pub pi2: u64,
    pub slope: Option<f64>,
    pub stat_error: Option<f64>,
    pub pi1: u64,
    pub n: u64,
    pub status: String,
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRecord>, PipelineError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let bad = |line: usize, what: &str| {
        PipelineError::Config(format!("{}:{line}: {what}", path.display()))
    };
    let mut records = Vec::new();
    for (index, line) in text.lines().enumerate().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() < 7 {
            return Err(bad(index + 1, "too few fields"));
        }
        let real = |s: &str| -> Result<Option<f64>, PipelineError> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| bad(index + 1, "bad real"))
            }
        };
        let nat = |s: &str| s.parse::<u64>().map_err(|_| bad(index + 1, "bad count"));
        records.push(SummaryRecord {
            pi2: nat(f[0])?,
            slope: real(f[1])?,
            stat_error: real(f[2])?,
            pi1: nat(f[3])?,
            n: nat(f[4])?,
            status: f[6].to_string(),
        });
    }
    Ok(records)
}

/// Inverse-log points recovered from parsed summary records.
pub fn summary_points(records: &[SummaryRecord]) -> Vec<SlopePoint> {
    records
        .iter()
        .filter_map(|r| match (r.slope, r.stat_error) {
            (Some(m), Some(sigma)) => Some(SlopePoint {
                x: (r.pi1 as f64).ln(),
                m,
                sigma,
            }),
            _ => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn external_parsing() {
        let text = "# published counts\nN,pi1,pi2\n1000000,78498,8169\n10,4,2 # tiny\n2000000,148933,x\n3000000,216816,0\n";
        let data = parse_external(text.as_bytes()).unwrap();
        assert_eq!(data.points.len(), 1);
        let p = &data.points[0];
        assert_eq!((p.pi1_adjusted, p.pi2_adjusted), (78_496, 8_168));
        assert!((p.m0 - 8168.0 / 62160.0).abs() < 1e-15);
        assert!((p.m0 - 0.13140).abs() < 1e-5);
        let lines: Vec<usize> = data.issues.iter().map(|i| i.line).collect();
        assert_eq!(lines, vec![4, 5, 6]);
    }

    #[test]
    fn external_empty_and_invalid() {
        let data = parse_external("# nothing\n\n".as_bytes()).unwrap();
        assert!(data.points.is_empty() && data.issues.is_empty());
        let data = parse_external("100,25,0\n".as_bytes()).unwrap();
        assert!(data.points.is_empty());
        assert_eq!(data.issues[0].line, 1);
        // pi1 - 2 == 2 (pi2 - 1): no singletons left.
        let data = parse_external("7,4,2\n".as_bytes()).unwrap();
        assert!(data.points.is_empty());
        assert_eq!(data.issues.len(), 1);
    }

    #[test]
    fn checkpoint_normalization() {
        let mut config = RunConfig::new(1000, "unused");
        config.checkpoints = vec![
            CheckpointSpec::Limit(500),
            CheckpointSpec::TwinCount(10),
            CheckpointSpec::TwinCount(5),
        ];
        assert_eq!(
            config.normalized_checkpoints().unwrap(),
            vec![
                CheckpointSpec::TwinCount(5),
                CheckpointSpec::TwinCount(10),
                CheckpointSpec::Limit(500)
            ]
        );
        config.checkpoints.push(CheckpointSpec::Limit(500));
        assert!(config.normalized_checkpoints().is_err());
        config.checkpoints = vec![CheckpointSpec::Limit(2000)];
        assert!(config.normalized_checkpoints().is_err());
        config.checkpoints.clear();
        assert_eq!(
            config.normalized_checkpoints().unwrap(),
            vec![CheckpointSpec::Limit(1000)]
        );
    }

    #[test]
    fn reals_round_trip() {
        for x in [0.141667, 1.0 / 3.0, 6.02e23, 5e-324, -0.0] {
            let s = fmt_real(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
    }
}
