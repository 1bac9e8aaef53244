use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tlsrand::bench::{self, Experiment, ExperimentConfig, OutputFormat, Table};
use tlsrand::dense::io::{load_matrix, save_csv};
use tlsrand::dense::{Mat, DEFAULT_SIZE_CAP};
use tlsrand::problems::{add_noise, example1, example2, ill_posed, prony, NoiseSpec, PronySpec};
use tlsrand::randomized::{arttls, rtls, rttls, select_truncation_gcv, AdaptiveConfig, RandConfig};
use tlsrand::tls::{tls_closed, tls_svd, ttls, TlsProblem, TlsSolution};
use tlsrand::{Error, Result, RngSeed};

const SIZE_CAP_VAR: &str = "TLSRAND_SIZE_CAP";

#[derive(Parser)]
#[command(name = "tlsrand", version, about = "Classical and randomized total least squares")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a TLS problem read from files
    Solve(SolveArgs),
    /// Generate a test problem and write A, b and the true solution as CSV
    Problems(ProblemArgs),
    /// Run an experiment described by a config file and/or flags
    Bench(BenchArgs),
    /// Perturbation study on a synthetic example
    Perturb(PerturbArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Tls,
    TlsClosed,
    Ttls,
    Rtls,
    Rttls,
    Arttls,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    method: MethodArg,
    /// coefficient matrix (CSV, or Matrix Market with `.mtx`)
    #[arg(long = "A", value_name = "FILE")]
    a: PathBuf,
    /// right-hand side as a single row or column
    #[arg(long = "b", value_name = "FILE")]
    b: PathBuf,
    /// truncation index; GCV picks it for rttls when omitted
    #[arg(long)]
    k: Option<usize>,
    /// sketch width
    #[arg(long, default_value_t = 10)]
    l: usize,
    /// adaptive tolerance
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, default_value_t = 7)]
    probes: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// write x as a CSV column instead of printing it
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProblemArgs {
    #[arg(long)]
    name: String,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: Option<usize>,
    /// relative noise level for the ill-posed problems
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// gap parameter of example1
    #[arg(long, default_value_t = 0.999976032)]
    eps_p: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    experiment: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    repetitions: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// extra `key=value` settings, applied after the config file
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct PerturbArgs {
    #[arg(long)]
    problem: String,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 1e-10)]
    scale: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    repetitions: usize,
    #[arg(long)]
    eps_p: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(args) => solve(args),
        Command::Problems(args) => problems(args),
        Command::Bench(args) => run_bench(args),
        Command::Perturb(args) => perturb(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { 3 } else { 2 })
        }
    }
}

fn load(path: &PathBuf) -> Result<Mat> {
    load_matrix(path).inspect_err(|_| eprintln!("while reading {}", path.display()))
}

fn load_vector(path: &PathBuf) -> Result<Vec<f64>> {
    let m = load(path)?;
    if m.cols() == 1 || m.rows() == 1 {
        Ok(m.into_vec())
    } else {
        Err(Error::Parse { line: 0, msg: format!("right-hand side must be a vector, got {}x{}", m.rows(), m.cols()) })
    }
}

fn solve(args: SolveArgs) -> Result<()> {
    let p = TlsProblem::new(load(&args.a)?, load_vector(&args.b)?)?;
    let seed = RngSeed(args.seed);
    let sol: TlsSolution = match args.method {
        MethodArg::Tls => tls_svd(&p)?,
        MethodArg::TlsClosed => tls_closed(&p)?,
        MethodArg::Ttls => {
            let k = args.k.ok_or_else(|| Error::InvalidArgument("ttls needs --k".into()))?;
            ttls(&p, k)?
        }
        MethodArg::Rtls => {
            let l = args.l.min(p.n() + 1);
            rtls(&p, &RandConfig { samples_l: l, trunc_k: l, oversample_p: 0, seed })?
        }
        MethodArg::Rttls => {
            let k = match args.k {
                Some(k) => k,
                None => select_truncation_gcv(
                    &p,
                    &RandConfig { samples_l: args.l, trunc_k: 1, oversample_p: args.l.saturating_sub(1), seed },
                )?,
            };
            let l = args.l.max(k);
            rttls(&p, &RandConfig::new(k, l - k, seed))?
        }
        MethodArg::Arttls => {
            let eps = args.eps.ok_or_else(|| Error::InvalidArgument("arttls needs --eps".into()))?;
            arttls(&p, &AdaptiveConfig::new(eps, args.probes, seed))?
        }
    };
    eprintln!(
        "method {} sigma {:.6e} residual {:.6e} time {:.4}s",
        sol.method,
        sol.sigma_small,
        tlsrand::dense::norm2(&sol.residual),
        sol.elapsed_seconds
    );
    match args.out {
        Some(path) => save_csv(&Mat::column(&sol.x), path),
        None => {
            for v in &sol.x {
                println!("{v:.16e}");
            }
            Ok(())
        }
    }
}

fn problems(args: ProblemArgs) -> Result<()> {
    let p = match args.name.as_str() {
        "example1" => {
            let n = args.n.ok_or_else(|| Error::InvalidArgument("example1 needs --n".into()))?;
            example1(args.m, n, args.eps_p, RngSeed(args.seed))?
        }
        "example2" => example2(args.m)?,
        "prony" => prony(&PronySpec::standard(args.m, args.n.unwrap_or(args.m / 2)))?,
        name => add_noise(&ill_posed(name, args.m)?, &NoiseSpec { level: args.noise, seed: RngSeed(args.seed) }),
    };
    std::fs::create_dir_all(&args.out)?;
    save_csv(&p.a, args.out.join("A.csv"))?;
    save_csv(&Mat::column(&p.b), args.out.join("b.csv"))?;
    if let Some(x) = &p.x_true {
        save_csv(&Mat::column(x), args.out.join("x_true.csv"))?;
    }
    eprintln!("wrote {}x{} problem to {}", p.m(), p.n(), args.out.display());
    Ok(())
}

fn size_cap() -> Result<usize> {
    match std::env::var(SIZE_CAP_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Parse { line: 0, msg: format!("{SIZE_CAP_VAR} must be a count, got `{v}`") }),
        Err(_) => Ok(DEFAULT_SIZE_CAP),
    }
}

fn run_bench(args: BenchArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.size_cap = size_cap()?;
    let flags = [
        ("experiment", args.experiment),
        ("problem", args.problem),
        ("m", args.m.map(|v| v.to_string())),
        ("n", args.n.map(|v| v.to_string())),
        ("repetitions", args.repetitions.map(|v| v.to_string())),
        ("seed", args.seed.map(|v| v.to_string())),
        ("format", args.format),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, &v, 0)?;
        }
    }
    for kv in &args.set {
        let (key, value) = kv
            .split_once('=')
            .ok_or_else(|| Error::Parse { line: 0, msg: format!("expected KEY=VALUE, got `{kv}`") })?;
        cfg.set(key.trim(), value.trim(), 0)?;
    }
    if let Some(out) = args.out {
        cfg.output_path = Some(out);
    }
    let table = bench::run(&cfg)?;
    write_table(&table, &cfg)
}

fn write_table(table: &Table, cfg: &ExperimentConfig) -> Result<()> {
    match &cfg.output_path {
        Some(path) => {
            table.emit(path, cfg.output_format)?;
            eprintln!("wrote {} rows to {}", table.len(), path.display());
        }
        None => print!("{}", table.render(cfg.output_format)),
    }
    Ok(())
}

fn perturb(args: PerturbArgs) -> Result<()> {
    let mut cfg = ExperimentConfig {
        experiment: Experiment::Perturb,
        problem: args.problem,
        m: args.m,
        n: args.n,
        scale: args.scale,
        seed: RngSeed(args.seed),
        repetitions: args.repetitions,
        size_cap: size_cap()?,
        output_path: args.out,
        ..ExperimentConfig::default()
    };
    if let Some(e) = args.eps_p {
        cfg.eps_p = e;
    }
    if let Some(f) = args.format {
        cfg.output_format = f.parse::<OutputFormat>()?;
    }
    let table = bench::run(&cfg)?;
    write_table(&table, &cfg)
}
