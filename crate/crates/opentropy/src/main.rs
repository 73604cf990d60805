//! Command-line interface: `verify` runs inequality suites and writes
//! reports, `eval` exposes the scalar and operator functions, `gen` emits
//! random instances, and `replay` re-evaluates a persisted case.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use opentropy::entropy::{
    exp_entropy, exp_entropy_limit, natural_mean, relative_entropy, tsallis_entropy, OperatorPair,
};
use opentropy::gen::{
    random_certified_pair, random_ratio_k_instance, random_spd, Constraint, GenSpec,
};
use opentropy::harness::InequalityId;
use opentropy::linalg::{spectral_decompose, SpdMatrix};
use opentropy::report::{run_suite, serialize_report, OutputFormat, RunConfig, SuiteReport};
use opentropy::scalar::{self, SpectralWindow, VParam};
use opentropy::{Error, Result};

const LONG_VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (report schema ", "1", ")");

/// Environment variable overriding the default RNG seed.
const SEED_ENV: &str = "OPENTROPY_SEED";

#[derive(Parser)]
#[command(name = "opentropy", version = LONG_VERSION)]
#[command(about = "Numerical verification of operator-entropy inequalities on SPD matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run inequality suites over random constrained instances.
    Verify(VerifyArgs),
    /// Evaluate a scalar or operator function by name.
    Eval(EvalArgs),
    /// Generate random SPD instances.
    Gen(GenArgs),
    /// Re-evaluate a persisted case file.
    Replay {
        /// Path to a case JSON written by `verify`.
        case: PathBuf,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated inequality ids, or "all".
    #[arg(long, default_value = "all")]
    suite: String,

    /// Matrix dimensions to sweep.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,8")]
    dims: Vec<usize>,

    /// Random instances per (suite, dim, v) cell.
    #[arg(long, default_value_t = 500)]
    trials: u64,

    /// Master seed (default: $OPENTROPY_SEED or 42).
    #[arg(long)]
    seed: Option<u64>,

    /// Relative Loewner tolerance.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,

    /// Gauss-Legendre nodes for the integral middle term.
    #[arg(long = "quad-nodes", default_value_t = 32)]
    quad_nodes: usize,

    /// Restrict suites to these v values (comma-separated).
    #[arg(long = "v-grid", value_delimiter = ',', allow_negative_numbers = true)]
    v_grid: Option<Vec<f64>>,

    /// Output format: json | csv | text.
    #[arg(long, default_value = "text")]
    format: String,

    /// Write the report here instead of stdout; failing cases are persisted
    /// next to it.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Replay a persisted case instead of running suites.
    #[arg(long)]
    replay: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Function name, e.g. ln_v, exp_v, xi, psi, m_v, M_v, kantorovich,
    /// kantorovich_power, generalized_kantorovich, g_aux, hermite_f,
    /// tangent_gap, compare_fv, classical_entropies, natural_mean,
    /// relative_entropy, tsallis, exp_entropy, exp_entropy_limit.
    #[arg(long = "fn")]
    function: String,

    #[arg(long, allow_negative_numbers = true)]
    x: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    v: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    s: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    m: Option<f64>,
    #[arg(long = "M", allow_negative_numbers = true)]
    big_m: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    p: Option<f64>,

    /// Comma-separated weight vectors for classical_entropies.
    #[arg(long = "s-list", value_delimiter = ',')]
    s_list: Option<Vec<f64>>,
    #[arg(long = "t-list", value_delimiter = ',')]
    t_list: Option<Vec<f64>>,

    /// Matrix JSON files ({"dim": n, "data": [...]}) for operator functions.
    #[arg(long = "A")]
    a: Option<PathBuf>,
    #[arg(long = "B")]
    b: Option<PathBuf>,

    /// Output format: text | json.
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    dim: usize,

    #[arg(long)]
    seed: Option<u64>,

    #[arg(long = "cond-max", default_value_t = 1e4)]
    cond_max: f64,

    /// Generate a certified pair with this window, "m,M".
    #[arg(long, value_delimiter = ',')]
    window: Option<Vec<f64>>,

    /// Generate a ratio-comparison triple with hypotheses "v,m,M".
    #[arg(long = "ratio-k", value_delimiter = ',', allow_negative_numbers = true)]
    ratio_k: Option<Vec<f64>>,

    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn resolve_seed(explicit: Option<u64>) -> Result<u64> {
    if let Some(s) = explicit {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(raw) => raw
            .parse::<u64>()
            .map_err(|_| Error::Config(format!("{SEED_ENV} must be a u64, got {raw:?}"))),
        Err(_) => Ok(42),
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Verify(args) => verify(args),
        Command::Eval(args) => eval(args),
        Command::Gen(args) => gen(args),
        Command::Replay { case } => replay(&case),
    }
}

fn parse_suites(raw: &str) -> Result<Vec<InequalityId>> {
    if raw.trim() == "all" {
        return Ok(InequalityId::ALL.to_vec());
    }
    raw.split(',')
        .map(|s| InequalityId::from_str(s.trim()))
        .collect()
}

fn verify(args: VerifyArgs) -> Result<ExitCode> {
    if let Some(case) = &args.replay {
        return replay(case);
    }
    let config = RunConfig {
        suites: parse_suites(&args.suite)?,
        dims: args.dims,
        trials: args.trials,
        v_grid: args.v_grid,
        seed: resolve_seed(args.seed)?,
        tol: args.tol,
        quad_nodes: args.quad_nodes,
        format: OutputFormat::from_str(&args.format)?,
        out: args.out,
    };
    let report = run_suite(&config)?;
    emit_report(&report)?;
    Ok(ExitCode::from(report.exit_code() as u8))
}

fn emit_report(report: &SuiteReport) -> Result<()> {
    let bytes = serialize_report(report, report.config.format)?;
    match &report.config.out {
        Some(path) => {
            std::fs::write(path, &bytes)?;
            println!(
                "wrote {} ({} asserted cells, {} failures; {} finding cells, {} recorded); exit {}",
                path.display(),
                report.summary.asserted_cells,
                report.summary.asserted_failures,
                report.summary.finding_cells,
                report.summary.finding_failures,
                report.exit_code()
            );
        }
        None => {
            use std::io::Write;
            std::io::stdout().lock().write_all(&bytes)?;
        }
    }
    Ok(())
}

fn replay(path: &Path) -> Result<ExitCode> {
    let (case, verdict) = opentropy::report::replay_case(path)?;
    println!("replayed {} ({})", case.id.name(), path.display());
    for (i, link) in verdict.links.iter().enumerate() {
        println!(
            "  link {}: margin {:e} scale {:e} tol {:e} -> {}",
            i,
            link.margin,
            link.scale,
            link.tol,
            if link.holds { "holds" } else { "VIOLATED" }
        );
    }
    println!(
        "overall: {}",
        if verdict.overall_holds {
            "holds"
        } else {
            "VIOLATED"
        }
    );
    Ok(ExitCode::from(if verdict.overall_holds { 0 } else { 1 }))
}

fn read_spd(path: &Path) -> Result<SpdMatrix<f64>> {
    let bytes = std::fs::read(path)?;
    Ok(serde_json::from_slice(&bytes)?)
}

fn require<T: Copy>(opt: Option<T>, name: &str, function: &str) -> Result<T> {
    opt.ok_or_else(|| Error::Config(format!("eval --fn {function} needs --{name}")))
}

enum EvalOutput {
    Scalar(f64),
    Tuple(Vec<(&'static str, f64)>),
    Operator(OperatorResult),
}

struct OperatorResult {
    matrix: opentropy::Matrix64,
    eigenvalues: Vec<f64>,
}

fn eval(args: EvalArgs) -> Result<ExitCode> {
    let f = args.function.as_str();
    let window = || -> Result<SpectralWindow<f64>> {
        SpectralWindow::new(require(args.m, "m", f)?, require(args.big_m, "M", f)?)
    };
    let pair = || -> Result<OperatorPair<f64>> {
        let a = read_spd(
            args.a
                .as_ref()
                .ok_or_else(|| Error::Config(format!("eval --fn {f} needs --A")))?,
        )?;
        let b = read_spd(
            args.b
                .as_ref()
                .ok_or_else(|| Error::Config(format!("eval --fn {f} needs --B")))?,
        )?;
        OperatorPair::new(a, b)
    };
    let vp = || -> Result<VParam<f64>> { VParam::new(require(args.v, "v", f)?) };

    let output = match f {
        "ln_v" => EvalOutput::Scalar(scalar::ln_v(
            require(args.x, "x", f)?,
            require(args.v, "v", f)?,
        )?),
        "exp_v" => EvalOutput::Scalar(scalar::exp_v(
            require(args.x, "x", f)?,
            require(args.v, "v", f)?,
        )?),
        "xi" => EvalOutput::Scalar(scalar::xi(require(args.x, "x", f)?, &window()?)?),
        "psi" => EvalOutput::Scalar(scalar::psi(require(args.x, "x", f)?, &window()?)?),
        "m_v" => EvalOutput::Scalar(scalar::m_v(
            require(args.x, "x", f)?,
            require(args.v, "v", f)?,
        )?),
        "M_v" => EvalOutput::Scalar(scalar::big_m_v(
            require(args.x, "x", f)?,
            require(args.v, "v", f)?,
        )?),
        "kantorovich" => EvalOutput::Scalar(scalar::kantorovich(require(args.x, "x", f)?)?),
        "kantorovich_power" => EvalOutput::Scalar(scalar::kantorovich_power(
            require(args.m, "m", f)?,
            require(args.big_m, "M", f)?,
            require(args.p, "p", f)?,
        )?),
        "generalized_kantorovich" => EvalOutput::Scalar(scalar::generalized_kantorovich(
            &window()?,
            require(args.v, "v", f)?,
        )?),
        "g_aux" => EvalOutput::Scalar(scalar::g_aux(
            require(args.v, "v", f)?,
            require(args.x, "x", f)?,
        )),
        "hermite_f" => EvalOutput::Scalar(scalar::hermite_f(
            require(args.x, "x", f)?,
            require(args.v, "v", f)?,
        )?),
        "tangent_gap" => EvalOutput::Scalar(scalar::tangent_gap(
            require(args.s, "s", f)?,
            require(args.t, "t", f)?,
            require(args.v, "v", f)?,
        )?),
        "compare_fv" => {
            let c = scalar::compare_fv(
                require(args.s, "s", f)?,
                require(args.t, "t", f)?,
                require(args.v, "v", f)?,
            )?;
            EvalOutput::Tuple(vec![("g", c.g), ("h", c.h), ("f", c.f)])
        }
        "classical_entropies" => {
            let s = args
                .s_list
                .clone()
                .ok_or_else(|| Error::Config(format!("eval --fn {f} needs --s-list")))?;
            let t = args
                .t_list
                .clone()
                .ok_or_else(|| Error::Config(format!("eval --fn {f} needs --t-list")))?;
            let e = scalar::classical_entropies(&s, &t, require(args.v, "v", f)?)?;
            EvalOutput::Tuple(vec![
                ("H_exp", e.h_exp),
                ("T_v_exp", e.t_v_exp),
                ("D_exp", e.d_exp),
                ("D_v_exp", e.d_v_exp),
            ])
        }
        "natural_mean" => {
            operator_output(natural_mean(&pair()?, require(args.v, "v", f)?)?.into_matrix())?
        }
        "relative_entropy" => operator_output(relative_entropy(&pair()?)?)?,
        "tsallis" => operator_output(tsallis_entropy(&pair()?, vp()?)?)?,
        "exp_entropy" => operator_output(exp_entropy(&pair()?, vp()?)?.into_matrix())?,
        "exp_entropy_limit" => operator_output(exp_entropy_limit(&pair()?)?.into_matrix())?,
        other => {
            return Err(Error::Config(format!("unknown function: {other}")));
        }
    };

    let as_json = args.format == "json";
    match output {
        EvalOutput::Scalar(value) => {
            if as_json {
                println!("{}", json!({ "fn": f, "value": value }));
            } else {
                println!("{value}");
            }
        }
        EvalOutput::Tuple(fields) => {
            if as_json {
                let map: serde_json::Map<String, serde_json::Value> = fields
                    .iter()
                    .map(|(k, v)| (k.to_string(), json!(v)))
                    .collect();
                println!("{}", json!({ "fn": f, "values": map }));
            } else {
                for (k, v) in fields {
                    println!("{k} = {v}");
                }
            }
        }
        EvalOutput::Operator(out) => {
            if as_json {
                println!(
                    "{}",
                    json!({
                        "fn": f,
                        "result": { "dim": out.matrix.rows(), "data": out.matrix.data() },
                        "eigenvalues": out.eigenvalues,
                    })
                );
            } else {
                let n = out.matrix.rows();
                for i in 0..n {
                    let row: Vec<String> =
                        (0..n).map(|j| format!("{}", out.matrix[(i, j)])).collect();
                    println!("{}", row.join(" "));
                }
                println!("eigenvalues: {:?}", out.eigenvalues);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn operator_output(matrix: opentropy::Matrix64) -> Result<EvalOutput> {
    let eigenvalues = opentropy::linalg::spectral_decompose_symmetric(&matrix)?.eigenvalues;
    Ok(EvalOutput::Operator(OperatorResult {
        matrix,
        eigenvalues,
    }))
}

fn gen(args: GenArgs) -> Result<ExitCode> {
    let seed = resolve_seed(args.seed)?;
    let mut spec = GenSpec::new(args.dim, seed);
    spec.cond_max = args.cond_max;

    let value = if let Some(raw) = &args.ratio_k {
        let [v, m, big_m]: [f64; 3] = raw
            .as_slice()
            .try_into()
            .map_err(|_| Error::Config("--ratio-k needs exactly v,m,M".into()))?;
        let spec = spec.with_constraint(Constraint::RatioK { v, m, big_m });
        let (a, b, c) = random_ratio_k_instance::<f64>(&spec)?;
        json!({ "A": a, "B": b, "C": c, "v": v, "m": m, "M": big_m })
    } else if let Some(raw) = &args.window {
        let [m, big_m]: [f64; 2] = raw
            .as_slice()
            .try_into()
            .map_err(|_| Error::Config("--window needs exactly m,M".into()))?;
        let spec = spec.with_window(SpectralWindow::new(m, big_m)?);
        let pair = random_certified_pair::<f64>(&spec)?;
        json!({ "A": pair.a(), "B": pair.b(), "m": m, "M": big_m })
    } else {
        let a = random_spd::<f64>(&spec)?;
        let d = spectral_decompose(&a)?;
        json!({ "A": a, "eigenvalues": d.eigenvalues })
    };

    let text = serde_json::to_string_pretty(&value)?;
    match &args.out {
        Some(path) => std::fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}
