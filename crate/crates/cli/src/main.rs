use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hardylab::kernel::HomogeneousIntegrand;
use hardylab::lab::{run_suite, CaseOutcome, InequalityCase, ResultId, RunOptions};
use hardylab_cli::*;

#[derive(Parser)]
#[command(name = "hardylab", version, about = "Run numerical checks of L1 Hardy-type inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a suite of cases from a JSON config.
    Run(RunArgs),
    /// Sweep one trend result along a ladder and write a CSV table.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, required_unless_present = "list")]
    config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for cases that carry none.
    #[arg(long)]
    seed: Option<u64>,
    /// Allow critical exponents and the conjecture probe.
    #[arg(long)]
    probe: bool,
    /// Also run every case at twice the resolution.
    #[arg(long)]
    refine: bool,
    /// Print the result ids and what each needs.
    #[arg(long)]
    list: bool,
    #[arg(long, default_value_t = default_jobs())]
    jobs: usize,
}

#[derive(Args)]
struct SweepArgs {
    /// T1_necessity, T3ii_sharpness or CONJ_PROBE
    result_id: String,
    /// Comma-separated, decreasing.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    ladder: Vec<f64>,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 8.0)]
    box_len: f64,
    #[arg(long, default_value_t = 128)]
    points: usize,
    #[arg(long)]
    r_in: Option<f64>,
    #[arg(long)]
    r_out: Option<f64>,
    /// Integrand as JSON, e.g. '{"family":"euclidean_power","scale":1,"q":1}'.
    #[arg(long)]
    phi: Option<String>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    sep: Option<f64>,
    #[arg(long)]
    probe: bool,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run(args) => run(args),
        Command::Sweep(args) => sweep(args),
    };
    ExitCode::from(code)
}

fn config_error(e: impl std::fmt::Display) -> u8 {
    eprintln!("error: {e}");
    EXIT_CONFIG
}

fn run(args: RunArgs) -> u8 {
    if args.list {
        for id in ResultId::ALL {
            println!("{:<16} {}", id.as_str(), id.requirements());
        }
        return EXIT_OK;
    }
    let path = args.config.expect("required by clap");
    let cfg = match load_config(&path) {
        Ok(c) => c,
        Err(e) => return config_error(e),
    };
    let opts = RunOptions {
        refine: args.refine || cfg.refine,
        probe: args.probe || cfg.probe,
        seed: args.seed.or(cfg.seed).unwrap_or(0),
    };
    if let Err(e) = validate(&path, &cfg, &opts) {
        return config_error(e);
    }
    let out = args.out.or(cfg.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
    if let Err(e) = fs::create_dir_all(&out) {
        return config_error(format!("cannot create {}: {e}", out.display()));
    }

    let results = run_suite(&cfg.cases, &opts, args.jobs.max(1));
    let mut done = Vec::new();
    let mut ids = Vec::new();
    let mut errors = Vec::new();
    for (case, res) in cfg.cases.iter().zip(results) {
        match res {
            Ok(r) => {
                let id = case.result_id.as_str().to_string();
                let file = out.join(report_file_name(&r, &id));
                let json = serde_json::to_string_pretty(&r).expect("reports serialize");
                if let Err(e) = fs::write(&file, json + "\n") {
                    return config_error(format!("cannot write {}: {e}", file.display()));
                }
                done.push(r);
                ids.push(id);
            }
            Err(e) => errors.push(format!("case {} ({}): {e}", done.len() + errors.len(), case.result_id)),
        }
    }
    let csv = out.join("summary.csv");
    if let Err(e) = fs::write(&csv, summary_csv(&done)) {
        return config_error(format!("cannot write {}: {e}", csv.display()));
    }
    errors.extend(failures(&done, &ids));
    println!("{} cases, {} failed; reports in {}", cfg.cases.len(), errors.len(), out.display());
    if errors.is_empty() {
        EXIT_OK
    } else {
        for e in &errors {
            eprintln!("FAIL {e}");
        }
        EXIT_GATE_FAILED
    }
}

fn sweep(args: SweepArgs) -> u8 {
    let id: ResultId = match args.result_id.parse() {
        Ok(id) => id,
        Err(e) => return config_error(e),
    };
    if !matches!(id, ResultId::T1Necessity | ResultId::T3iiSharpness | ResultId::ConjProbe) {
        return config_error(format!("{id} is not a sweep; use T1_necessity, T3ii_sharpness or CONJ_PROBE"));
    }
    if args.ladder.is_empty() {
        return config_error("ladder is empty");
    }
    let mut case = InequalityCase::new(id, args.n, args.box_len, args.points);
    case.ladder = Some(args.ladder);
    case.sep = args.sep;
    let phi = match args.phi.as_deref().map(serde_json::from_str::<HomogeneousIntegrand>) {
        Some(Ok(p)) => Some(p),
        Some(Err(e)) => return config_error(format!("--phi: {e}")),
        None => None,
    };
    match id {
        ResultId::T3iiSharpness => {
            case.r_in = Some(args.r_in.unwrap_or(0.1));
            case.r_out = Some(args.r_out.unwrap_or(1.85));
        }
        ResultId::T1Necessity => {
            case.phi = Some(phi.unwrap_or(HomogeneousIntegrand::EuclideanPower { scale: 1.0, q: 1.0 }));
            case.q = Some(args.q.unwrap_or(1.0));
        }
        _ => {
            // trace-zero quadratic form in the first two coordinates
            let mut trace_zero = vec![0.0; args.n * args.n];
            trace_zero[0] = 1.0;
            if args.n > 1 {
                trace_zero[args.n + 1] = -1.0;
            }
            case.phi = Some(phi.unwrap_or(HomogeneousIntegrand::QuadraticForm { coeffs: trace_zero }));
        }
    }
    let opts = RunOptions { probe: args.probe || id == ResultId::ConjProbe, ..Default::default() };
    let res = match case.run(0, &opts) {
        Ok(r) => r,
        Err(e) => return config_error(e),
    };
    let CaseOutcome::Trend(t) = &res.outcome else { unreachable!("sweep ids produce trends") };
    let text = trend_csv(t);
    match args.out {
        Some(path) => {
            if let Err(e) = fs::write(&path, text) {
                return config_error(format!("cannot write {}: {e}", path.display()));
            }
        }
        None => print!("{text}"),
    }
    EXIT_OK
}
