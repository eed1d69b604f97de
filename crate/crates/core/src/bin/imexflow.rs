use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use imexflow::cases::{CaseKind, DecayConfig, MmsLadder};
use imexflow::io::{error_table, execute, parse_pairs, RunConfig};
use imexflow::linsolve::SolverSettings;
use imexflow::stepper::{Scheme, StepperSettings};

#[derive(Parser)]
#[command(name = "imexflow", version, about = "Variable-density incompressible flow solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one case and write snapshots and time series.
    Run(RunArgs),
    /// Refinement study against the manufactured solution.
    Rates(RatesArgs),
    /// Energy-decay stability checks over a sweep of step sizes.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct RunArgs {
    /// `key = value` file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    case: Option<CaseKind>,
    #[arg(long)]
    scheme: Option<Scheme>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    snapshot_every: Option<usize>,
    #[arg(long)]
    paper_scale: bool,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    ls_density: Option<bool>,
    #[arg(long)]
    clamp_density: bool,
    /// Any config key, e.g. `--set droplet.radius=0.2`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct RatesArgs {
    #[arg(long, default_value = "bdf2")]
    scheme: Scheme,
    #[arg(long, default_value_t = 5)]
    levels: usize,
    /// Also write the table as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_delimiter = ',', default_value = "0.001,0.1,1,10")]
    taus: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    steps: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

impl RunArgs {
    fn config(&self) -> imexflow::Result<RunConfig> {
        let mut pairs = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| imexflow::Error::Io {
                    path: path.clone(),
                    source,
                })?;
                parse_pairs(&text)?
            }
            None => Vec::new(),
        };
        let mut add = |k: &str, v: String| pairs.push((k.to_string(), v));
        if let Some(c) = self.case {
            add("case", c.name().to_string());
        }
        if let Some(s) = self.scheme {
            add("scheme", s.to_string());
        }
        if let Some(v) = self.nx {
            add("nx", v.to_string());
        }
        if let Some(v) = self.ny {
            add("ny", v.to_string());
        }
        if let Some(v) = self.dt {
            add("dt", v.to_string());
        }
        if let Some(v) = self.t_end {
            add("t_end", v.to_string());
        }
        if let Some(v) = &self.output {
            add("output", v.display().to_string());
        }
        if let Some(v) = self.snapshot_every {
            add("snapshot_every", v.to_string());
        }
        if self.paper_scale {
            add("paper_scale", "true".into());
        }
        if let Some(v) = self.ls_density {
            add("ls_density", v.to_string());
        }
        if self.clamp_density {
            add("clamp_density", "true".into());
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| imexflow::Error::Config {
                    key: kv.clone(),
                    message: "expected KEY=VALUE".into(),
                })?;
            add(k.trim(), v.trim().to_string());
        }
        RunConfig::from_pairs(&pairs)
    }
}

fn run(args: &RunArgs) -> imexflow::Result<bool> {
    let cfg = args.config()?;
    let summary = execute(&cfg)?;
    println!("{}", summary.verdict);
    if let Some(e) = &summary.errors {
        println!("errors at t = {}: u {:.4e}, p {:.4e}, rho {:.4e}", cfg.t_end, e.u, e.p, e.rho);
    }
    if let Some((t, h)) = summary.bubble.last() {
        println!("bubble height at t = {t:.4}: {:.4}", h.height);
    }
    println!("wrote {} files to {}", summary.files.len(), cfg.output.display());
    Ok(summary.verdict.passed())
}

fn rates(args: &RatesArgs) -> imexflow::Result<bool> {
    let ladder = MmsLadder {
        levels: args.levels,
        ..MmsLadder::default()
    };
    let table = ladder.run(args.scheme, &StepperSettings::default())?;
    print!("{table}");
    if let Some(path) = &args.csv {
        error_table(&table).write(path)?;
    }
    let finest = table.rates()?.finest();
    let ok = match args.scheme {
        Scheme::Bdf2 => finest.iter().all(|r| (1.8..=2.2).contains(r)),
        _ => finest.iter().all(|&r| r >= 0.9),
    };
    println!("finest-pair rates u {:.3} p {:.3} rho {:.3}: {}", finest[0], finest[1], finest[2], verdict(ok));
    Ok(ok)
}

fn verify(args: &VerifyArgs) -> imexflow::Result<bool> {
    let cfg = DecayConfig::default();
    let solver = SolverSettings::default().with_rel_tol(1e-12);
    let mut ok = true;
    for scheme in [Scheme::Bdf1, Scheme::Fs1, Scheme::Bdf2] {
        for &tau in &args.taus {
            let v = cfg.verify(scheme, tau, args.steps, args.tol, solver)?;
            ok &= v.passed();
            println!("{v}");
        }
    }
    Ok(ok)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(a) => run(a),
        Command::Rates(a) => rates(a),
        Command::Verify(a) => verify(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            let mut src = std::error::Error::source(&e);
            while let Some(s) = src {
                eprintln!("  caused by: {s}");
                src = s.source();
            }
            ExitCode::from(2)
        }
    }
}
