//! Run configuration, suite execution, report aggregation, serialization,
//! and counterexample persistence.
//!
//! Cells (one per suite, dimension, and deformation parameter) execute in
//! parallel; every case draws from a stream keyed by its own coordinates, so
//! reports are identical under any scheduling and margins are bitwise-stable
//! across runs with equal configuration.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::harness::{build_case, check_case, CaseConfig, InequalityCase, InequalityId, Verdict};
use crate::{Error, Result, SCHEMA_VERSION, VERSION};

/// Cap on persisted failing cases per run; enough to debug, not a flood.
const MAX_PERSISTED_FAILURES: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            "text" => Ok(Self::Text),
            other => Err(Error::Config(format!("unknown output format: {other}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub suites: Vec<InequalityId>,
    pub dims: Vec<usize>,
    pub trials: u64,
    /// Optional filter applied to each suite's registry grid.
    pub v_grid: Option<Vec<f64>>,
    pub seed: u64,
    pub tol: f64,
    pub quad_nodes: usize,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    /// Mirrors the acceptance configuration: dims {2, 3, 4, 8}, 500 trials
    /// per cell, relative tolerance 1e-9, 32 quadrature nodes.
    fn default() -> Self {
        Self {
            suites: InequalityId::ALL.to_vec(),
            dims: vec![2, 3, 4, 8],
            trials: 500,
            v_grid: None,
            seed: 42,
            tol: 1e-9,
            quad_nodes: 32,
            format: OutputFormat::Json,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.suites.is_empty() {
            return Err(Error::Config("no suites selected".into()));
        }
        if self.dims.is_empty() || self.dims.iter().any(|&d| d < 1) {
            return Err(Error::Config("dims must be a nonempty list of >= 1".into()));
        }
        if self.trials < 1 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if self.tol <= 0.0 || self.tol.is_nan() {
            return Err(Error::Config("tol must be > 0".into()));
        }
        if self.quad_nodes < 2 {
            return Err(Error::Config("quad_nodes must be >= 2".into()));
        }
        if let Some(grid) = &self.v_grid {
            if grid
                .iter()
                .any(|&v| !(-1.0..=1.0).contains(&v) || v == 0.0)
            {
                return Err(Error::Config(
                    "v_grid entries must lie in [-1, 1] and be nonzero".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Whether a cell's verdicts gate the exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AssertClass {
    Asserted,
    Finding,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellRecord {
    pub suite: InequalityId,
    pub class: AssertClass,
    pub dim: usize,
    pub v: f64,
    pub trials: u64,
    pub failures: u64,
    /// Smallest relative link margin seen in the cell.
    pub min_margin: f64,
    /// Median over cases of the per-case smallest relative link margin.
    pub median_margin: f64,
    pub runtime_ms: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub asserted_cells: usize,
    pub finding_cells: usize,
    pub total_trials: u64,
    pub asserted_failures: u64,
    pub finding_failures: u64,
    pub overall_pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub config: RunConfig,
    pub cells: Vec<CellRecord>,
    pub findings: Vec<CellRecord>,
    pub summary: Summary,
    pub runtime_ms: f64,
    /// Paths of persisted failing cases, relative to the report location.
    pub failing_cases: Vec<String>,
}

impl SuiteReport {
    /// Exit code contract: 0 iff no asserted suite failed. Findings never
    /// affect the exit code.
    pub fn exit_code(&self) -> i32 {
        if self.summary.asserted_failures == 0 {
            0
        } else {
            1
        }
    }

    /// Zero the wall-clock fields (the only run-to-run nondeterminism).
    pub fn strip_runtime(&mut self) {
        self.runtime_ms = 0.0;
        for c in self.cells.iter_mut().chain(self.findings.iter_mut()) {
            c.runtime_ms = 0.0;
        }
    }
}

struct CellPlan {
    suite: InequalityId,
    class: AssertClass,
    dim: usize,
    v: f64,
}

fn plan_cells(config: &RunConfig) -> Vec<CellPlan> {
    let keep = |v: f64, suite: InequalityId| -> bool {
        match &config.v_grid {
            // the filter applies to suites with a deformation parameter;
            // limit-form suites keep their single labeled cell
            Some(grid) if suite.uses_v() => grid.contains(&v),
            _ => true,
        }
    };
    let mut cells = Vec::new();
    for &suite in &config.suites {
        for (class, grid) in [
            (AssertClass::Asserted, suite.asserted_v_grid()),
            (AssertClass::Finding, suite.finding_v_grid()),
        ] {
            for &v in grid {
                if !keep(v, suite) {
                    continue;
                }
                for &dim in &config.dims {
                    cells.push(CellPlan {
                        suite,
                        class,
                        dim,
                        v,
                    });
                }
            }
        }
    }
    cells
}

struct CellOutcome {
    record: CellRecord,
    failing: Vec<(InequalityCase, Verdict)>,
}

fn run_cell(plan: &CellPlan, config: &RunConfig) -> Result<CellOutcome> {
    let start = Instant::now();
    let case_cfg = CaseConfig {
        seed: config.seed,
        tol: config.tol,
        quad_nodes: config.quad_nodes,
        cond_max: 1e4,
    };
    let mut failures = 0u64;
    let mut margins = Vec::with_capacity(config.trials as usize);
    let mut failing = Vec::new();
    for trial in 0..config.trials {
        let case = build_case(plan.suite, plan.dim, plan.v, trial, &case_cfg)?;
        let verdict = check_case(&case)?;
        margins.push(verdict.min_rel_margin());
        if !verdict.overall_holds {
            failures += 1;
            if plan.class == AssertClass::Asserted && failing.len() < MAX_PERSISTED_FAILURES {
                failing.push((case, verdict));
            }
        }
    }
    let mut sorted = margins.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite margins"));
    let min_margin = sorted.first().copied().unwrap_or(f64::INFINITY);
    let median_margin = if sorted.len() % 2 == 1 {
        sorted[sorted.len() / 2]
    } else {
        0.5 * (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2])
    };
    Ok(CellOutcome {
        record: CellRecord {
            suite: plan.suite,
            class: plan.class,
            dim: plan.dim,
            v: plan.v,
            trials: config.trials,
            failures,
            min_margin,
            median_margin,
            runtime_ms: start.elapsed().as_secs_f64() * 1e3,
        },
        failing,
    })
}

/// Execute every cell of the configuration and aggregate the report.
/// Failing cases of asserted cells are persisted next to the output path
/// (when one is set) for replay.
pub fn run_suite(config: &RunConfig) -> Result<SuiteReport> {
    config.validate()?;
    let start = Instant::now();
    let plans = plan_cells(config);
    let outcomes: Vec<Result<CellOutcome>> = plans
        .par_iter()
        .map(|p| run_cell(p, config))
        .collect();

    let mut cells = Vec::new();
    let mut findings = Vec::new();
    let mut all_failing = Vec::new();
    for outcome in outcomes {
        let outcome = outcome?;
        match outcome.record.class {
            AssertClass::Asserted => cells.push(outcome.record),
            AssertClass::Finding => findings.push(outcome.record),
        }
        all_failing.extend(outcome.failing);
    }
    // deterministic report order regardless of scheduling
    let key = |c: &CellRecord| (c.suite.name(), c.dim, ordered(c.v));
    cells.sort_by_key(key);
    findings.sort_by_key(key);
    all_failing.truncate(MAX_PERSISTED_FAILURES);

    let mut failing_paths = Vec::new();
    if let Some(out) = &config.out {
        for (i, (case, _)) in all_failing.iter().enumerate() {
            let name = format!(
                "{}-failing-{:03}-{}-d{}.json",
                out.file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "report".into()),
                i,
                case.id.name(),
                case.a.dim()
            );
            let path = out.with_file_name(&name);
            std::fs::write(&path, serde_json::to_vec_pretty(case)?)?;
            failing_paths.push(name);
        }
    }

    let summary = Summary {
        asserted_cells: cells.len(),
        finding_cells: findings.len(),
        total_trials: config.trials * (cells.len() + findings.len()) as u64,
        asserted_failures: cells.iter().map(|c| c.failures).sum(),
        finding_failures: findings.iter().map(|c| c.failures).sum(),
        overall_pass: cells.iter().all(|c| c.failures == 0),
    };
    Ok(SuiteReport {
        schema_version: SCHEMA_VERSION,
        tool_version: VERSION.to_string(),
        config: config.clone(),
        cells,
        findings,
        summary,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
        failing_cases: failing_paths,
    })
}

fn ordered(v: f64) -> i64 {
    // total order for report sorting; v grids are small finite sets
    (v * 1e6) as i64
}

/// Serialize a report in the requested format.
pub fn serialize_report(report: &SuiteReport, format: OutputFormat) -> Result<Vec<u8>> {
    match format {
        OutputFormat::Json => Ok(serde_json::to_vec_pretty(report)?),
        OutputFormat::Csv => {
            let mut out = String::from(
                "suite,class,dim,v,trials,failures,min_margin,median_margin,runtime_ms\n",
            );
            for c in report.cells.iter().chain(report.findings.iter()) {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{:e},{:e},{:.3}",
                    c.suite.name(),
                    match c.class {
                        AssertClass::Asserted => "asserted",
                        AssertClass::Finding => "finding",
                    },
                    c.dim,
                    c.v,
                    c.trials,
                    c.failures,
                    c.min_margin,
                    c.median_margin,
                    c.runtime_ms
                )
                .expect("write to string");
            }
            Ok(out.into_bytes())
        }
        OutputFormat::Text => {
            let mut out = String::new();
            writeln!(
                out,
                "opentropy {} (schema {}) seed={} tol={:e} trials={}",
                report.tool_version,
                report.schema_version,
                report.config.seed,
                report.config.tol,
                report.config.trials
            )
            .expect("write");
            let mut last_suite = None;
            for c in report.cells.iter().chain(report.findings.iter()) {
                if last_suite != Some(c.suite) {
                    writeln!(out, "\n{} - {}", c.suite.name(), c.suite.description())
                        .expect("write");
                    last_suite = Some(c.suite);
                }
                writeln!(
                    out,
                    "  [{}] dim={} v={:+.2} trials={} failures={} min_margin={:+.3e} median={:+.3e}",
                    match c.class {
                        AssertClass::Asserted => "assert",
                        AssertClass::Finding => "report",
                    },
                    c.dim,
                    c.v,
                    c.trials,
                    c.failures,
                    c.min_margin,
                    c.median_margin
                )
                .expect("write");
            }
            writeln!(
                out,
                "\nsummary: {} asserted cells, {} failures; {} finding cells, {} recorded violations; overall {}",
                report.summary.asserted_cells,
                report.summary.asserted_failures,
                report.summary.finding_cells,
                report.summary.finding_failures,
                if report.summary.overall_pass { "PASS" } else { "FAIL" }
            )
            .expect("write");
            Ok(out.into_bytes())
        }
    }
}

/// Load a persisted case and re-evaluate it.
pub fn replay_case(path: &Path) -> Result<(InequalityCase, Verdict)> {
    let bytes = std::fs::read(path)?;
    let case: InequalityCase = serde_json::from_slice(&bytes)?;
    let verdict = check_case(&case)?;
    Ok((case, verdict))
}
