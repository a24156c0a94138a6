mod commands;
mod config;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Failure;
use config::RunConfig;

/// Counting closed geodesics on compact hyperbolic surfaces.
#[derive(Parser, Debug)]
#[command(name = "geocount", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Flat `key = value` file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    genus: Option<usize>,
    #[arg(long, global = true)]
    tmax: Option<f64>,
    #[arg(long, global = true)]
    eps: Option<f64>,
    #[arg(long, global = true)]
    theta: Option<f64>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Grid step for t.
    #[arg(long, global = true)]
    step: Option<f64>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Maximum number of enumerated group elements.
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Enforce eps <= min(1/8, inj/4).
    #[arg(long, global = true)]
    paper_regime: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Primitive and non-primitive classes up to tmax.
    Spectrum,
    /// Counting ratio #P(t) t e^{-t} and the Riemann sandwich.
    Margulis {
        /// Use injected counts e^t/t instead of a spectrum.
        #[arg(long)]
        synthetic: bool,
    },
    /// Flow-box sweep: Gamma sets, lemma checks, mixing ratios.
    Flowbox,
    /// Endpoint-pair distance to the normalized boundary measure.
    Equidist,
    /// Orbit-growth entropy estimate.
    Entropy,
    /// Randomized invariant suite.
    Selftest {
        /// Perturb a generator so the relation fails.
        #[arg(long)]
        corrupt_generator: bool,
    },
}

fn build_config(c: &Common) -> Result<RunConfig, Failure> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &c.config {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        cfg.apply_file(&text).map_err(|e| Failure::Config(e.0))?;
    }
    let eps_given = c.eps.is_some();
    if let Some(v) = c.genus {
        cfg.genus = v;
    }
    if let Some(v) = c.tmax {
        cfg.t_max = v;
    }
    if let Some(v) = c.eps {
        cfg.eps = v;
    }
    if let Some(v) = c.theta {
        cfg.theta = v;
    }
    match c.alpha {
        Some(v) => cfg.alpha = v,
        // alpha follows eps unless set
        None if eps_given => cfg.alpha = cfg.eps,
        None => {}
    }
    if let Some(v) = c.step {
        cfg.step = v;
    }
    if let Some(v) = c.workers {
        cfg.workers = v;
    }
    if c.cap.is_some() {
        cfg.cap = c.cap;
    }
    if let Some(v) = &c.out {
        cfg.out = v.clone();
    }
    if let Some(v) = c.seed {
        cfg.seed = v;
    }
    cfg.paper_regime |= c.paper_regime;
    cfg.validate().map_err(|e| Failure::Config(e.0))?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let cfg = build_config(&cli.common)?;
    match &cli.command {
        Command::Spectrum => commands::cmd_spectrum(&cfg),
        Command::Margulis { synthetic } => commands::cmd_margulis(&cfg, *synthetic),
        Command::Flowbox => commands::cmd_flowbox(&cfg),
        Command::Equidist => commands::cmd_equidist(&cfg),
        Command::Entropy => commands::cmd_entropy(&cfg),
        Command::Selftest { corrupt_generator } => {
            let checks = selftest::run(cfg.genus, cfg.seed, *corrupt_generator);
            let mut failed = Vec::new();
            for c in &checks {
                match &c.result {
                    Ok(()) => println!("PASS {}", c.name),
                    Err(m) => {
                        println!("FAIL {}: {m}", c.name);
                        failed.push(c.name);
                    }
                }
            }
            if failed.is_empty() {
                Ok(())
            } else {
                Err(Failure::Violation(format!("failed: {}", failed.join(", "))))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
