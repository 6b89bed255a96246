use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use resolvability::codebook;
use resolvability::error::Error;
use resolvability::experiments::{self, ExperimentConfig, ExperimentKind, Format, Output};
use resolvability::info::{self, EvalConfig, InfoStats};

#[derive(Parser)]
#[command(name = "resolvability", version, about = "Random-codebook resolvability experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distance of random codebooks to the target output law over (n, R).
    Sweep(Common),
    /// First-order concentration of the distance over codebooks.
    Concentrate(Common),
    /// Second-order rate schedule, μ(n) and the matching bound.
    SecondOrder(Common),
    /// Converse audit of drawn codebooks.
    Converse(Common),
    /// Bound table only, no simulation.
    Bounds(Common),
    /// Information-density statistics of the configured channel and input.
    Stats(Common),
    /// Draw one codebook (first n and rate of the config) and print it as CSV.
    Draw(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output file; defaults to the config's `output`, else stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: Format,
    /// Overrides the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } => 2,
        Error::NoValidParams(_) => 3,
        Error::HypothesisViolation(_) => 4,
        _ => 1,
    }
}

fn write_out(path: Option<&PathBuf>, bytes: &[u8]) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|source| Error::Io {
            path: p.clone(),
            source,
        }),
        None => std::io::stdout().write_all(bytes).map_err(|source| Error::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

fn run(command: Command) -> Result<u8, Error> {
    let (kind, args) = match command {
        Command::Sweep(a) => (Some(ExperimentKind::TvSweep), a),
        Command::Concentrate(a) => (Some(ExperimentKind::Concentration), a),
        Command::SecondOrder(a) => (Some(ExperimentKind::SecondOrder), a),
        Command::Converse(a) => (Some(ExperimentKind::ConverseAudit), a),
        Command::Bounds(a) => (Some(ExperimentKind::BoundsTable), a),
        Command::Stats(a) => (None, a),
        Command::Draw(a) => return draw(a),
    };
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if args.seed.is_some() {
        cfg.seed = args.seed;
    }
    let out = args.out.clone().or_else(|| cfg.output.clone());
    let pool = thread_pool(args.threads)?;
    let Some(kind) = kind else {
        let ch = cfg.channel.build()?;
        let qx = cfg.input.build(&ch)?;
        let eval = EvalConfig {
            seed: cfg.seed.unwrap_or(EvalConfig::default().seed),
            ..EvalConfig::default()
        };
        let stats = pool.install(|| InfoStats::compute(&ch, &qx, &[0.5, 1.0], &info::default_renyi_orders(), &eval))?;
        let mut bytes = serde_json::to_vec_pretty(&stats).map_err(|e| Error::Serialization(e.to_string()))?;
        bytes.push(b'\n');
        write_out(out.as_ref(), &bytes)?;
        return Ok(0);
    };
    let output: Output = pool.install(|| experiments::run(kind, &cfg))?;
    write_out(out.as_ref(), &output.render(args.format)?)?;
    Ok(if output.hypothesis_violation_only() { 4 } else { 0 })
}

fn draw(args: Common) -> Result<u8, Error> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if args.seed.is_some() {
        cfg.seed = args.seed;
    }
    let ch = cfg.channel.build()?;
    let qx = cfg.input.build(&ch)?;
    let n = *cfg.n.first().ok_or_else(|| Error::Config {
        field: "n".into(),
        message: "block length list is empty".into(),
    })?;
    let rate = match (cfg.rates.first(), cfg.rate_factors.first()) {
        (Some(r), _) => *r,
        (None, Some(f)) => f * info::mutual_information(&ch, &qx)?.value,
        (None, None) => {
            return Err(Error::Config {
                field: "rates".into(),
                message: "give `rates` or `rate_factors`".into(),
            })
        }
    };
    let seed = cfg.seed.ok_or_else(|| Error::Config {
        field: "seed".into(),
        message: "a master seed is required (config `seed` or --seed)".into(),
    })?;
    let cb = codebook::draw_codebook(&qx, n, rate, seed)?;
    let mut buf = Vec::new();
    cb.write_csv(&mut buf)
        .map_err(|e| Error::Serialization(e.to_string()))?;
    write_out(args.out.as_ref(), &buf)?;
    Ok(0)
}

fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool, Error> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(Error::Config {
                field: "--threads".into(),
                message: "must be positive".into(),
            });
        }
        b = b.num_threads(t);
    }
    b.build().map_err(|e| Error::Estimation(format!("thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
