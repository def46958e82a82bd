use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use scma::decoder::{Algorithm, Approximation};
use scma::dfg::parse::{load_dfg, load_folding_spec};
use scma::dfg::{self, report};
use scma::fixed::Quantization;
use scma::metrics::{audit, ComplexityModel, OpCounters, RunShape};
use scma::reference::shipped_system;
use scma::sim::tradeoff::{tradeoff_report, tradeoff_text, ErrorMetric};
use scma::sim::{draw_frame, parse_snr_range, run_sweep, Detector, Fading, SweepConfig};
use scma::system::load_codebook_file;
use scma::tx::{transmit, DistributedMatrix};
use scma::{Decoder, DecoderConfig, Error, Result, ScmaSystem};

#[derive(Parser)]
#[command(
    name = "scma",
    version,
    about = "SCMA decoding, error-rate sweeps and DFG scheduling analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo error-rate sweep over Eb/N0.
    Sweep(SweepArgs),
    /// Folding, lifetime, register allocation and iteration bound of a DFG.
    Dfg(DfgArgs),
    /// Compares measured operation counts with the complexity closed forms.
    Audit(AuditArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(clap::Args)]
struct DecoderArgs {
    /// Codebook JSON; defaults to the shipped reference codebook.
    #[arg(long)]
    codebook: Option<PathBuf>,
    /// Decoder configuration JSON; overrides the flags below.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "maxlog")]
    algorithm: Vec<AlgorithmArg>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "exact")]
    approx: Vec<ApproxArg>,
    #[arg(long, default_value_t = 5)]
    iters: usize,
    /// Stop once messages are stable to within EPS.
    #[arg(long, num_args = 0..=1, default_missing_value = "0.01", value_name = "EPS")]
    early_term: Option<f64>,
    /// Self-adaption `EPS,ALPHA,BETA`.
    #[arg(long, num_args = 0..=1, default_missing_value = "0.01,1.1,0.9", value_name = "EPS,ALPHA,BETA")]
    adapt: Option<String>,
    #[arg(long, value_enum, default_value = "off")]
    quantize: Switch,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Dmpa,
    Maxlog,
}

#[derive(Clone, Copy, ValueEnum)]
enum ApproxArg {
    Exact,
    A1,
    A2,
    A3,
}

#[derive(clap::Args)]
struct SweepArgs {
    #[command(flatten)]
    decoder: DecoderArgs,
    /// Eb/N0 points `A:B:STEP` or a single value, in dB.
    #[arg(long, default_value = "0:12:1")]
    snr_db: String,
    #[arg(long, default_value_t = 10_000)]
    frames: u64,
    /// Stop a point after this many block errors.
    #[arg(long)]
    target_errors: Option<u64>,
    /// Distributed matrix: a JSON file, `hadamard` or `off`.
    #[arg(long, default_value = "off")]
    noise_reduction: String,
    /// Add the exhaustive ML detector.
    #[arg(long, value_enum, default_value = "off")]
    oracle: Switch,
    #[arg(long, value_enum, default_value = "awgn")]
    fading: FadingArg,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the resolved decoder configurations as JSON and exit.
    #[arg(long)]
    dump_config: bool,
    /// Also print the SNR each variant needs for this BLER.
    #[arg(long, value_name = "BLER")]
    tradeoff: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FadingArg {
    Awgn,
    Rayleigh,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum DfgReport {
    Folding,
    Lifetime,
    Alloc,
    Bound,
    All,
}

#[derive(clap::Args)]
struct DfgArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Folding sets; required for every report except `bound`.
    #[arg(long)]
    fold: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "all")]
    report: DfgReport,
    /// Emit CSV instead of text.
    #[arg(long)]
    csv: bool,
}

#[derive(clap::Args)]
struct AuditArgs {
    #[command(flatten)]
    decoder: DecoderArgs,
    #[arg(long, default_value_t = 1000)]
    frames: u64,
    #[arg(long, default_value_t = 10.0)]
    snr_db: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    csv: bool,
}

fn load_system(path: &Option<PathBuf>) -> Result<ScmaSystem> {
    match path {
        Some(p) => load_codebook_file(p),
        None => Ok(shipped_system()),
    }
}

fn decoder_configs(args: &DecoderArgs) -> Result<Vec<DecoderConfig>> {
    if let Some(path) = &args.config {
        return Ok(vec![DecoderConfig::from_json(&std::fs::read_to_string(
            path,
        )?)?]);
    }
    let mut out = Vec::new();
    for alg in &args.algorithm {
        for approx in &args.approx {
            let algorithm = match alg {
                AlgorithmArg::Dmpa => Algorithm::Dmpa,
                AlgorithmArg::Maxlog => Algorithm::MaxLog,
            };
            let approximation = match approx {
                ApproxArg::Exact => Approximation::Exact,
                ApproxArg::A1 => Approximation::A1,
                ApproxArg::A2 => Approximation::A2,
                ApproxArg::A3 => Approximation::A3,
            };
            let mut cfg = DecoderConfig::new(algorithm, approximation, args.iters);
            if let Some(eps) = args.early_term {
                cfg = cfg.with_early_termination(eps);
            }
            if let Some(text) = &args.adapt {
                let parts: Vec<f64> = text
                    .split(',')
                    .map(|s| s.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::Config(format!("bad --adapt value `{text}`")))?;
                if parts.len() != 3 {
                    return Err(Error::Config("--adapt takes EPS,ALPHA,BETA".into()));
                }
                cfg = cfg.with_self_adaption(parts[0], parts[1], parts[2]);
            }
            if matches!(args.quantize, Switch::On) {
                cfg = cfg.with_quantization(Quantization::default());
            }
            cfg.validate()?;
            out.push(cfg);
        }
    }
    Ok(out)
}

fn sweep(args: SweepArgs) -> Result<()> {
    let system = load_system(&args.decoder.codebook)?;
    let configs = decoder_configs(&args.decoder)?;
    if args.dump_config {
        for cfg in &configs {
            println!("{}", cfg.to_json());
        }
        return Ok(());
    }
    let mut detectors: Vec<Detector> = configs.into_iter().map(Detector::Mpa).collect();
    if matches!(args.oracle, Switch::On) {
        detectors.push(Detector::MlOracle);
    }
    let mut cfg = SweepConfig::new(
        parse_snr_range(&args.snr_db)?,
        args.frames,
        detectors,
        args.seed,
    );
    cfg.target_errors = args.target_errors;
    cfg.fading = match args.fading {
        FadingArg::Awgn => Fading::Awgn,
        FadingArg::Rayleigh => Fading::Rayleigh,
    };
    cfg.noise_reduction = match args.noise_reduction.as_str() {
        "off" => None,
        "hadamard" => Some(Arc::new(DistributedMatrix::hadamard(system.k())?)),
        path => Some(Arc::new(DistributedMatrix::load(path)?)),
    };
    cfg.output = args.out.clone();
    let result = run_sweep(&system, &cfg)?;
    if args.out.is_none() {
        print!("{}", result.to_csv());
    } else {
        eprintln!("wrote {} points", result.points.len());
    }
    if let Some(target) = args.tradeoff {
        eprint!(
            "{}",
            tradeoff_text(&tradeoff_report(&result.points, ErrorMetric::Bler, target))
        );
    }
    Ok(())
}

fn dfg_cmd(args: DfgArgs) -> Result<()> {
    let graph = load_dfg(&args.graph)?;
    let wants = |r: DfgReport| args.report == r || args.report == DfgReport::All;
    let needs_fold = args.report != DfgReport::Bound;
    if needs_fold {
        let spec_path = args
            .fold
            .as_ref()
            .ok_or_else(|| Error::Config("--fold is required for this report".into()))?;
        let spec = load_folding_spec(spec_path)?;
        let folded = dfg::fold(&graph, &spec)?;
        if wants(DfgReport::Folding) {
            print!(
                "{}",
                if args.csv {
                    report::folding_csv(&graph, &folded)
                } else {
                    report::folding_text(&graph, &folded)
                }
            );
        }
        if wants(DfgReport::Lifetime) || wants(DfgReport::Alloc) {
            let table = dfg::lifetime_analysis(&graph, &spec, &folded)?;
            if wants(DfgReport::Lifetime) {
                print!(
                    "{}",
                    if args.csv {
                        report::lifetime_csv(&table)
                    } else {
                        report::lifetime_text(&table)
                    }
                );
            }
            if wants(DfgReport::Alloc) {
                let alloc = dfg::allocate_registers(&table)?;
                alloc.replay()?;
                print!(
                    "{}",
                    if args.csv {
                        report::alloc_csv(&alloc)
                    } else {
                        report::alloc_text(&alloc)
                    }
                );
            }
        }
    }
    if wants(DfgReport::Bound) {
        let bound = dfg::iteration_bound(&graph)?;
        print!(
            "{}",
            if args.csv {
                report::bound_csv(&graph, &bound)
            } else {
                report::bound_text(&graph, &bound)
            }
        );
    }
    Ok(())
}

fn model_for(cfg: &DecoderConfig) -> Result<ComplexityModel> {
    match (cfg.algorithm, cfg.approximation) {
        (Algorithm::MaxLog, Approximation::A3) => Ok(ComplexityModel::MaxLogA3),
        (Algorithm::MaxLog, Approximation::Exact) => Ok(ComplexityModel::MaxLog),
        (Algorithm::Dmpa, Approximation::Exact) => Ok(ComplexityModel::Dmpa),
        _ => Err(Error::Config(format!(
            "no complexity column for {}",
            cfg.label()
        ))),
    }
}

fn audit_cmd(args: AuditArgs) -> Result<()> {
    let system = load_system(&args.decoder.codebook)?;
    let n0 = system.noise_density(args.snr_db);
    for cfg in decoder_configs(&args.decoder)? {
        let model = model_for(&cfg)?;
        let decoder = Decoder::new(system.clone(), cfg)?;
        let mut counters = OpCounters::default();
        let mut iterations = 0;
        for i in 0..args.frames {
            let draw = draw_frame(&system, args.seed, i, Fading::Awgn);
            let rx = transmit(&system, &draw.frame, &draw.h, n0, &draw.noise, None)?;
            let result = decoder.decode(&rx)?;
            counters.merge(&result.counters);
            iterations += result.iterations as u64;
        }
        let shape = RunShape {
            m: system.m() as u64,
            resources: system.k() as u64,
            users: system.j() as u64,
            frames: args.frames,
            iterations,
        };
        let report = audit(&counters, model, shape);
        print!(
            "{}",
            if args.csv {
                report.to_csv()
            } else {
                report.to_text()
            }
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Sweep(a) => sweep(a),
        Command::Dfg(a) => dfg_cmd(a),
        Command::Audit(a) => audit_cmd(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
