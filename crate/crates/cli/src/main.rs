mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use cogrowth::estimator::{chain_estimate, errr_estimate, gamma_series, CogrowthEstimate, EstimatorConfig, StopReason};
use cogrowth::io::{self as cio, CoefficientFile, IoError};
use cogrowth::oracle::{OracleGroup, SequenceKind, DEFAULT_DP_STATES};
use cogrowth::presentation::{parse_presentation, Presentation, Preset};
use cogrowth::series::{self, Coefficients, SeriesPoly};
use cogrowth::walker::{diagnose_relator_balance, parameter_grid, run_grid, WalkError, WalkParams, DEFAULT_BALANCE_FLOOR};
use num_rational::BigRational;
use serde_json::json;

use manifest::RunManifest;

/// Exit codes; clap itself exits with 2 on usage errors.
mod code {
    pub const INVALID: u8 = 1;
    pub const PARSE: u8 = 3;
    pub const WRONG_GROUP: u8 = 4;
    pub const DIVERGED: u8 = 5;
    pub const COVERAGE_GAP: u8 = 6;
    pub const IO: u8 = 7;
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

type Outcome = Result<(), Failure>;

trait OrExit<T> {
    fn or_exit(self, code: u8) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> OrExit<T> for Result<T, E> {
    fn or_exit(self, code: u8) -> Result<T, Failure> {
        self.map_err(|e| Failure { code, error: e.into() })
    }
}

fn io_failure(e: IoError) -> Failure {
    let code = match e {
        IoError::Io { .. } => code::IO,
        _ => code::PARSE,
    };
    Failure { code, error: e.into() }
}

#[derive(Parser, Debug)]
#[command(name = "cogrowth", version, about = "Metropolis walks on trivial words and cogrowth estimation")]
struct Cli {
    /// Directory for every output file
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads for walk grids (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Treat wrong-group warnings as errors
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one walk or a grid of walks
    Walk(WalkArgs),
    /// Estimate cogrowth coefficients from walk files
    Estimate(EstimateArgs),
    /// Convert between reduced and full cogrowth series
    Convert(ConvertArgs),
    /// Tabulate R(n) for a coefficient sequence
    Rfun(RfunArgs),
    /// Exact small-length cogrowth by enumeration or dynamic programming
    Oracle(OracleArgs),
    /// The 3^(n - q n^p) cogrowth model and its walk-length curve
    Model(ModelArgs),
    /// Per-relator insertion shares of existing walks
    Diagnose(DiagnoseArgs),
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct Source {
    /// Built-in presentation, e.g. thompson-f, bs:1:7, zk:2, trivial-family:3, surface2, braid3
    #[arg(long)]
    preset: Option<String>,
    /// File holding `gens: ... ; rels: ...`
    #[arg(long)]
    presentation: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct WalkArgs {
    #[command(flatten)]
    source: Source,
    /// One or more values; several values run a grid
    #[arg(long, value_delimiter = ',', default_value = "3", allow_negative_numbers = true)]
    alpha: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.3", allow_negative_numbers = true)]
    beta: Vec<f64>,
    /// Proposals per walk, e.g. 1e8
    #[arg(long, value_parser = parse_count, default_value = "1e6")]
    steps: u64,
    #[arg(long, default_value_t = 10)]
    segments: usize,
    #[arg(long, value_parser = parse_count, default_value = "1")]
    stride: u64,
    #[arg(long, value_parser = parse_count, default_value = "1e6")]
    max_word_len: u64,
    /// Stop each walk after this many accepted insertions (steps become a cap)
    #[arg(long, value_parser = parse_count)]
    until_insertions: Option<u64>,
    /// Record the mean length per block of this many accepted insertions
    #[arg(long, value_parser = parse_count)]
    trace_insertions: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_BALANCE_FLOOR)]
    balance_floor: f64,
    /// File stem; grids append -000, -001, ...
    #[arg(long, default_value = "walk")]
    out: String,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    /// Walk CSV files (each with its JSON sidecar)
    #[arg(required = true)]
    walks: Vec<PathBuf>,
    #[arg(long, default_value_t = 100)]
    window: usize,
    #[arg(long, default_value_t = 0.1)]
    cutoff: f64,
    /// Longest length to estimate (default: longest length visited)
    #[arg(long)]
    max_len: Option<usize>,
    #[arg(long, default_value_t = 1)]
    burn_in_segments: usize,
    /// Known coefficients (`n,value` or `n,log_value`) to anchor on instead of c_0 = 1
    #[arg(long)]
    anchors_file: Option<PathBuf>,
    /// Single-walk chain: each length from the previous one only, no cutoff
    #[arg(long)]
    chain: bool,
    #[arg(long, default_value = "estimates")]
    out: String,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Direction {
    /// reduced c_n to all d_n
    C2d,
    /// all d_n to reduced c_n
    D2c,
}

#[derive(Args, Debug)]
struct ConvertArgs {
    #[arg(long, value_enum)]
    direction: Direction,
    /// Half the number of generators plus inverses
    #[arg(long)]
    p: u32,
    /// Exact coefficient file `n,value`
    #[arg(long)]
    coeffs: PathBuf,
    /// Truncate the input to this order first
    #[arg(long)]
    order: Option<usize>,
    #[arg(long, default_value = "converted")]
    out: String,
}

#[derive(Args, Debug)]
struct RfunArgs {
    #[arg(long)]
    coeffs: PathBuf,
    /// Limiting growth rate; its square is the threshold (integer or fraction)
    #[arg(long)]
    limit_root: String,
    #[arg(long, default_value_t = 50)]
    n_max: usize,
    #[arg(long, default_value = "rfun")]
    out: String,
}

#[derive(Args, Debug)]
struct OracleArgs {
    /// zk:K, free:K, bs:1:N, trivial-family:N or f-table
    #[arg(long)]
    group: String,
    /// c (reduced) or d (all words)
    #[arg(long, default_value = "c")]
    kind: String,
    #[arg(long, default_value_t = 12)]
    max_len: usize,
    #[arg(long, value_parser = parse_count, default_value = "1e8")]
    budget: u64,
    #[arg(long, default_value = "oracle")]
    out: String,
}

#[derive(Args, Debug)]
struct ModelArgs {
    #[arg(long)]
    q: f64,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, default_value_t = 0.335)]
    beta: f64,
    #[arg(long, default_value_t = 300)]
    max_len: usize,
    #[arg(long, default_value = "model")]
    out: String,
}

#[derive(Args, Debug)]
struct DiagnoseArgs {
    #[arg(required = true)]
    walks: Vec<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_BALANCE_FLOOR)]
    floor: f64,
}

/// Accepts plain integers and float notation such as `1e8` or `2.5e6`.
fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s.parse().map_err(|_| format!("'{s}' is not a count"))?;
    if f < 0.0 || f.fract() != 0.0 || f > u64::MAX as f64 {
        return Err(format!("'{s}' is not a whole non-negative count"));
    }
    Ok(f as u64)
}

fn load_presentation(source: &Source, inputs: &mut Vec<PathBuf>) -> Result<Presentation, Failure> {
    if let Some(name) = &source.preset {
        let preset: Preset = name.parse().or_exit(code::PARSE)?;
        return preset.presentation().or_exit(code::PARSE);
    }
    let path = source.presentation.as_ref().expect("clap enforces one source");
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .or_exit(code::IO)?;
    inputs.push(path.clone());
    parse_presentation(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .or_exit(code::PARSE)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(code::INVALID);
        }
    }
    if let Err(e) = std::fs::create_dir_all(&cli.out_dir) {
        eprintln!("error: creating {}: {e}", cli.out_dir.display());
        return ExitCode::from(code::IO);
    }
    let result = match &cli.command {
        Command::Walk(a) => cmd_walk(&cli, a),
        Command::Estimate(a) => cmd_estimate(&cli, a),
        Command::Convert(a) => cmd_convert(&cli, a),
        Command::Rfun(a) => cmd_rfun(&cli, a),
        Command::Oracle(a) => cmd_oracle(&cli, a),
        Command::Model(a) => cmd_model(&cli, a),
        Command::Diagnose(a) => cmd_diagnose(&cli, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn finish(manifest: RunManifest, out_dir: &Path, stem: &str) -> Outcome {
    manifest.write(&out_dir.join(format!("{stem}.manifest.json"))).map_err(io_failure)
}

fn cmd_walk(cli: &Cli, a: &WalkArgs) -> Outcome {
    let started = Instant::now();
    let mut inputs = Vec::new();
    let presentation = load_presentation(&a.source, &mut inputs)?;
    let template = WalkParams {
        segments: a.segments,
        seed: cli.seed,
        stride: a.stride,
        max_word_len: a.max_word_len as usize,
        until_insertions: a.until_insertions,
        trace_insertions: a.trace_insertions,
        ..WalkParams::new(a.alpha[0], a.beta[0], a.steps, cli.seed)
    };
    let grid = parameter_grid(&a.alpha, &a.beta, &template);
    for p in &grid {
        p.validate().or_exit(code::INVALID)?;
    }
    let results = run_grid(&presentation, &grid);

    let mut outputs = Vec::new();
    let mut walks = Vec::new();
    let mut diverged = Vec::new();
    let mut wrong_group = false;
    let mut total_steps = 0u64;
    for (i, (params, result)) in grid.iter().zip(results).enumerate() {
        let stem = if grid.len() == 1 { a.out.clone() } else { format!("{}-{i:03}", a.out) };
        match result {
            Ok(rec) => {
                let (csv, json) = cio::write_walk(&cli.out_dir, &stem, &rec, &presentation).map_err(io_failure)?;
                let balance = diagnose_relator_balance(&rec, a.balance_floor);
                wrong_group |= balance.wrong_group_warning();
                total_steps += rec.steps_taken;
                println!(
                    "{stem}: alpha={} beta={} steps={} mean length {:.3}, insertions accepted {}",
                    params.alpha,
                    params.beta,
                    rec.steps_taken,
                    rec.mean_length(),
                    rec.stats.insertions_accepted
                );
                print!("{balance}");
                walks.push(json!({
                    "stem": stem,
                    "alpha": params.alpha,
                    "beta": params.beta,
                    "stream": params.stream,
                    "steps_taken": rec.steps_taken,
                    "runtime_secs": rec.runtime_secs,
                    "wrong_group_warning": balance.wrong_group_warning(),
                }));
                outputs.extend([csv, json]);
            }
            Err(e) => {
                eprintln!("{stem}: alpha={} beta={}: {e}", params.alpha, params.beta);
                if matches!(e, WalkError::Diverged { .. }) {
                    diverged.push(stem.clone());
                }
                walks.push(json!({ "stem": stem, "alpha": params.alpha, "beta": params.beta, "error": e.to_string() }));
            }
        }
    }

    let mut manifest = RunManifest::start("walk", &inputs).map_err(io_failure)?;
    manifest.parameters = json!({
        "presentation": presentation.render(),
        "digest": presentation.digest(),
        "template": template,
        "alpha": a.alpha,
        "beta": a.beta,
        "balance_floor": a.balance_floor,
        "walks": walks,
    });
    manifest.seeds = vec![cli.seed];
    manifest.outputs = outputs;
    manifest.finish(started, Some(total_steps));
    finish(manifest, &cli.out_dir, &a.out)?;

    if !diverged.is_empty() {
        return Err(Failure {
            code: code::DIVERGED,
            error: anyhow!(
                "{} walk(s) exceeded the word-length cap ({}); beta is likely above the critical value",
                diverged.len(),
                diverged.join(", ")
            ),
        });
    }
    if wrong_group && cli.strict {
        return Err(Failure {
            code: code::WRONG_GROUP,
            error: anyhow!("wrong-group warning: some relator was (almost) never inserted"),
        });
    }
    Ok(())
}

fn cmd_estimate(cli: &Cli, a: &EstimateArgs) -> Outcome {
    let started = Instant::now();
    let records = a
        .walks
        .iter()
        .map(|p| cio::read_walk(p))
        .collect::<Result<Vec<_>, _>>()
        .map_err(io_failure)?;
    let mut inputs = a.walks.clone();
    let anchors = match &a.anchors_file {
        Some(path) => {
            inputs.push(path.clone());
            let mut anchors = cio::read_anchors(path).map_err(io_failure)?;
            if !anchors.iter().any(|e| e.n == 0) {
                anchors.insert(0, CogrowthEstimate::exact(0, 1.0));
            }
            anchors
        }
        None => vec![CogrowthEstimate::exact(0, 1.0)],
    };
    let longest = records.iter().map(|r| r.len_bins().saturating_sub(1)).max().unwrap_or(0);
    let max_len = a.max_len.unwrap_or(longest);

    let (estimates, stop) = if a.chain {
        if records.len() != 1 {
            return Err(Failure {
                code: code::INVALID,
                error: anyhow!("--chain takes exactly one walk"),
            });
        }
        let start = anchors.into_iter().next().expect("c_0 is always present");
        let ests = chain_estimate(&records[0], a.burn_in_segments, max_len, start).or_exit(code::INVALID)?;
        (ests, StopReason::MaxLen)
    } else {
        let config = EstimatorConfig {
            window: a.window,
            cutoff: a.cutoff,
            max_len,
            burn_in_segments: a.burn_in_segments,
            anchors,
        };
        let run = errr_estimate(&records, &config).or_exit(code::INVALID)?;
        (run.estimates, run.stop)
    };

    let est_path = cli.out_dir.join(format!("{}.csv", a.out));
    let gamma_path = cli.out_dir.join(format!("{}_gamma.csv", a.out));
    cio::write_estimates_csv(&est_path, &estimates).map_err(io_failure)?;
    cio::write_gamma_csv(&gamma_path, &gamma_series(&estimates)).map_err(io_failure)?;
    let last = estimates.last().map_or(0, |e| e.n);
    println!("{} estimates up to n = {last}; {:?}", estimates.len(), stop);

    let mut manifest = RunManifest::start("estimate", &inputs).map_err(io_failure)?;
    manifest.parameters = json!({
        "window": a.window,
        "cutoff": a.cutoff,
        "max_len": max_len,
        "burn_in_segments": a.burn_in_segments,
        "chain": a.chain,
        "stop": stop,
    });
    manifest.seeds = records.iter().map(|r| r.params.seed).collect();
    manifest.outputs = vec![est_path, gamma_path];
    manifest.finish(started, None);
    finish(manifest, &cli.out_dir, &a.out)?;

    if let StopReason::CoverageGap { last_completed } = stop {
        let msg = format!("coverage gap: no walk visits lengths near {last_completed}; last completed length {last_completed}");
        if a.max_len.is_some() {
            return Err(Failure {
                code: code::COVERAGE_GAP,
                error: anyhow!(msg),
            });
        }
        eprintln!("warning: {msg}");
    }
    Ok(())
}

fn cmd_convert(cli: &Cli, a: &ConvertArgs) -> Outcome {
    let started = Instant::now();
    let mut coeffs = match cio::read_coefficients(&a.coeffs).map_err(io_failure)? {
        CoefficientFile::Exact(v) => v,
        CoefficientFile::Log(_) => {
            return Err(Failure {
                code: code::PARSE,
                error: anyhow!("{}: conversion needs exact coefficients (header n,value)", a.coeffs.display()),
            })
        }
    };
    if let Some(order) = a.order {
        coeffs.truncate(order + 1);
    }
    let input = SeriesPoly::new(coeffs, a.p).or_exit(code::INVALID)?;
    let output = match a.direction {
        Direction::C2d => series::cogrowth_from_reduced(&input),
        Direction::D2c => series::reduced_from_cogrowth(&input),
    };
    if output.to_integers().is_none() {
        eprintln!("note: some output coefficients are not integers; the input is not a genuine cogrowth sequence");
    }
    let path = cli.out_dir.join(format!("{}.csv", a.out));
    cio::write_exact_coefficients(&path, &output.coeffs).map_err(io_failure)?;
    println!("wrote {} coefficients to {}", output.coeffs.len(), path.display());

    let mut manifest = RunManifest::start("convert", std::slice::from_ref(&a.coeffs)).map_err(io_failure)?;
    manifest.parameters = json!({ "direction": format!("{:?}", a.direction), "p": a.p, "order": a.order });
    manifest.outputs = vec![path];
    manifest.finish(started, None);
    finish(manifest, &cli.out_dir, &a.out)
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let d: num_bigint::BigInt = d.trim().parse().ok()?;
    if d == 0.into() {
        return None;
    }
    Some(BigRational::new(n.trim().parse().ok()?, d))
}

fn cmd_rfun(cli: &Cli, a: &RfunArgs) -> Outcome {
    let started = Instant::now();
    let root = parse_rational(&a.limit_root)
        .ok_or_else(|| anyhow!("--limit-root '{}' is not an integer or fraction", a.limit_root))
        .or_exit(code::PARSE)?;
    let coeffs = match cio::read_coefficients(&a.coeffs).map_err(io_failure)? {
        CoefficientFile::Exact(v) => Coefficients::Exact(v),
        CoefficientFile::Log(v) => Coefficients::Log(v),
    };
    let table = series::r_function(&coeffs, &(&root * &root), a.n_max).or_exit(code::INVALID)?;
    for note in &table.notes {
        eprintln!("note: {note}");
    }
    let path = cli.out_dir.join(format!("{}.csv", a.out));
    cio::write_r_table(&path, &table).map_err(io_failure)?;
    println!("wrote R(n) for n = 1..={} to {}", a.n_max, path.display());

    let mut manifest = RunManifest::start("rfun", std::slice::from_ref(&a.coeffs)).map_err(io_failure)?;
    manifest.parameters = json!({ "limit_root": a.limit_root, "n_max": a.n_max, "notes": table.notes });
    manifest.outputs = vec![path];
    manifest.finish(started, None);
    finish(manifest, &cli.out_dir, &a.out)
}

fn cmd_oracle(cli: &Cli, a: &OracleArgs) -> Outcome {
    let started = Instant::now();
    let group: OracleGroup = a.group.parse().or_exit(code::PARSE)?;
    let kind: SequenceKind = a.kind.parse().map_err(|e: String| anyhow!(e)).or_exit(code::PARSE)?;
    let table = group
        .table(kind, a.max_len, a.budget, DEFAULT_DP_STATES)
        .or_exit(code::INVALID)?;
    if table.horizon < a.max_len && group != OracleGroup::ThompsonTable {
        eprintln!("note: budget exhausted; table is complete only up to n = {}", table.horizon);
    }
    let path = cli.out_dir.join(format!("{}.csv", a.out));
    cio::write_exact_table(&path, &table).map_err(io_failure)?;
    for (n, v) in &table.values {
        println!("{}_{n} = {v}", kind.symbol());
    }

    let mut manifest = RunManifest::start("oracle", &[]).map_err(io_failure)?;
    manifest.parameters = json!({
        "group": a.group,
        "kind": a.kind,
        "max_len": a.max_len,
        "budget": a.budget,
        "horizon": table.horizon,
    });
    manifest.outputs = vec![path];
    manifest.finish(started, None);
    finish(manifest, &cli.out_dir, &a.out)
}

fn cmd_model(cli: &Cli, a: &ModelArgs) -> Outcome {
    let started = Instant::now();
    if !(a.beta > 0.0 && a.beta < 1.0) {
        return Err(Failure {
            code: code::INVALID,
            error: anyhow!("beta must lie in (0, 1)"),
        });
    }
    let log_c = series::model_cogrowth(a.q, a.p, a.max_len).or_exit(code::INVALID)?;
    let curve = series::model_curve(&log_c, a.alpha, a.beta);
    let humps = series::local_maxima(&curve);
    let path = cli.out_dir.join(format!("{}.csv", a.out));
    cio::write_model_csv(&path, &log_c, &curve).map_err(io_failure)?;
    if humps.is_empty() {
        println!("no interior local maximum up to n = {}", a.max_len);
    } else {
        println!("interior local maxima at n = {humps:?}");
    }

    let mut manifest = RunManifest::start("model", &[]).map_err(io_failure)?;
    manifest.parameters = json!({
        "q": a.q,
        "p": a.p,
        "alpha": a.alpha,
        "beta": a.beta,
        "max_len": a.max_len,
        "local_maxima": humps,
    });
    manifest.outputs = vec![path];
    manifest.finish(started, None);
    finish(manifest, &cli.out_dir, &a.out)
}

fn cmd_diagnose(cli: &Cli, a: &DiagnoseArgs) -> Outcome {
    let mut flagged = Vec::new();
    for path in &a.walks {
        let rec = cio::read_walk(path).map_err(io_failure)?;
        let balance = diagnose_relator_balance(&rec, a.floor);
        println!("{}:", path.display());
        print!("{balance}");
        if balance.wrong_group_warning() {
            flagged.push(path.display().to_string());
        }
    }
    if cli.strict && !flagged.is_empty() {
        return Err(Failure {
            code: code::WRONG_GROUP,
            error: anyhow!("wrong-group warning in {}", flagged.join(", ")),
        });
    }
    Ok(())
}
