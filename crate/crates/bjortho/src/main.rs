use std::path::PathBuf;
use std::process::ExitCode;

use bjortho::{emit_report, load_failures, load_operator, replay, run_suite, HarnessError, Status, Suite, SuiteConfig};
use bjortho_core::approximation::{counterexample_report, dist_subspace};
use bjortho_core::orthogonality::bj_op;
use bjortho_core::Norm;
use clap::{Parser, Subcommand};

const EXIT_FAILURE: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Parser)]
#[command(name = "bjortho", version, about = "Birkhoff-James orthogonality on finite-dimensional normed spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a property suite and emit its JSON report.
    Suite {
        name: String,
        #[arg(long)]
        dim: Option<usize>,
        /// Domain norm: lp:<p> or linf.
        #[arg(long)]
        domain: Option<Norm>,
        /// Codomain norm: lp:<p> or linf.
        #[arg(long)]
        codomain: Option<Norm>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        budget: Option<usize>,
        /// Report path; the report goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Orthogonality certificate for a pair of operator files.
    CheckOp {
        #[arg(long)]
        t: PathBuf,
        #[arg(long)]
        a: PathBuf,
    },
    /// Distance from an operator to the span of others.
    Dist {
        #[arg(long)]
        t: PathBuf,
        #[arg(long, num_args = 1.., required = true)]
        basis: Vec<PathBuf>,
    },
    /// Re-run failed trials from a failure record or a suite report.
    Replay {
        #[arg(long)]
        failure: PathBuf,
    },
    /// The distance counterexample as a table (or JSON).
    Counterexample {
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            let usage = matches!(e, HarnessError::UnknownSuite(_) | HarnessError::Config(_));
            ExitCode::from(if usage { EXIT_USAGE } else { EXIT_FAILURE })
        }
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn run(command: Command) -> Result<u8, HarnessError> {
    match command {
        Command::Suite { name, dim, domain, codomain, trials, seed, tol, eps, budget, out } => {
            let mut config = SuiteConfig::new(name.parse::<Suite>()?);
            if let Some(d) = domain {
                config.domain = d;
                // a lone --domain sets both sides
                config.codomain = codomain.unwrap_or(d);
            } else if let Some(c) = codomain {
                config.codomain = c;
            }
            config.dim = dim.unwrap_or(config.dim);
            config.trials = trials.unwrap_or(config.trials);
            config.seed = seed.unwrap_or(config.seed);
            config.tol = tol.unwrap_or(config.tol);
            config.eps = eps.unwrap_or(config.eps);
            config.budget = budget.unwrap_or(config.budget);
            config.out = out.clone();
            let report = run_suite(&config)?;
            match &out {
                Some(path) => emit_report(&report, path)?,
                None => print!("{}", report.to_json()),
            }
            eprintln!("{}", report.headline());
            for f in &report.failures {
                eprintln!("  trial {} (seed {}): {}", f.trial, f.seed, f.reason);
            }
            Ok(report.exit_code() as u8)
        }
        Command::CheckOp { t, a } => {
            let (t, a) = (load_operator(&t)?, load_operator(&a)?);
            match bj_op(&t, &a) {
                Ok(cert) => {
                    println!("{}", to_json(&cert));
                    Ok(0)
                }
                Err(e @ bjortho_core::Error::Inconclusive { .. }) => {
                    eprintln!("inconclusive: {e}");
                    Ok(EXIT_INCONCLUSIVE)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Dist { t, basis } => {
            let t = load_operator(&t)?;
            let basis = basis.iter().map(|p| load_operator(p)).collect::<Result<Vec<_>, _>>()?;
            println!("{}", to_json(&dist_subspace(&t, &basis)?));
            Ok(0)
        }
        Command::Replay { failure } => {
            let records = load_failures(&failure)?;
            let mut code = 0;
            for r in &records {
                let outcome = replay(r)?;
                println!("{}", to_json(&outcome));
                code = code.max(match outcome.status {
                    Status::Pass => 0,
                    Status::Fail => EXIT_FAILURE,
                    Status::Inconclusive => EXIT_INCONCLUSIVE,
                });
            }
            Ok(code)
        }
        Command::Counterexample { json } => {
            let r = counterexample_report()?;
            if json {
                println!("{}", to_json(&r));
            } else {
                println!("{r}");
            }
            Ok(if r.strict_gap > 0.0 { 0 } else { EXIT_FAILURE })
        }
    }
}
