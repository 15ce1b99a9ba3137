use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use clap::{error::ErrorKind, CommandFactory, Parser, Subcommand};
use serde_json::{json, Value};

use unigate::approx::{find_power, ApproxQuery, DEFAULT_ALPHA, DEFAULT_N_MAX, DEFAULT_THETA};
use unigate::netdsl::{self, RunOutput};
use unigate::synth::{compile_d, convergence_study, Construction, StudyParams};
use unigate::verify::run_verify;
use unigate::{CMat, Complex, GateParams, StateVec};

#[derive(Parser, Debug)]
#[command(
    name = "unigate",
    version,
    about = "Deutsch's gate from replicas of one two-qubit gate"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Seeded randomized check of every exact identity; exits 0 iff all pass.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
    },
    /// Evaluates a `.unet` netlist to its matrix, or to a state with --input.
    Compose {
        file: PathBuf,
        /// Initial basis state, one bit per qubit, qubit 1 first (e.g. 110).
        #[arg(long)]
        input: Option<String>,
    },
    /// Smallest power of A(phi, alpha, theta) within eps of the target angles.
    Approx {
        #[arg(long, default_value_t = 1.0, value_parser = finite)]
        phi: f64,
        #[arg(long, default_value_t = DEFAULT_ALPHA, value_parser = finite)]
        alpha: f64,
        #[arg(long, default_value_t = DEFAULT_THETA, value_parser = finite)]
        theta: f64,
        #[arg(long, value_parser = finite)]
        target_alpha: f64,
        #[arg(long, value_parser = finite)]
        target_theta: f64,
        #[arg(long, value_parser = positive)]
        eps: f64,
        #[arg(long, default_value_t = DEFAULT_N_MAX, value_parser = clap::value_parser!(u64).range(1..))]
        n_max: u64,
    },
    /// CSV of distance against repetition count for one construction.
    Converge {
        #[arg(long)]
        construction: Construction,
        #[arg(long, default_value_t = StudyParams::default().phi, value_parser = finite)]
        phi: f64,
        #[arg(long, default_value_t = StudyParams::default().beta, value_parser = finite)]
        beta: f64,
        #[arg(long, default_value_t = StudyParams::default().theta, value_parser = finite)]
        theta: f64,
        /// Strictly ascending positive counts, comma separated.
        #[arg(long = "n", value_delimiter = ',', required = true)]
        n: Vec<usize>,
    },
    /// Compiles D(target_theta) down to powers of A(phi, alpha, theta).
    CompileD {
        #[arg(long, default_value_t = 1.0, value_parser = finite)]
        phi: f64,
        #[arg(long, default_value_t = DEFAULT_ALPHA, value_parser = finite)]
        alpha: f64,
        #[arg(long, default_value_t = DEFAULT_THETA, value_parser = finite)]
        theta: f64,
        #[arg(long, value_parser = finite)]
        target_theta: f64,
        #[arg(long, default_value_t = 0.3, value_parser = positive)]
        stage_eps: f64,
    },
}

fn finite(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        Ok(_) => Err(format!("`{s}` is not finite")),
        Err(e) => Err(e.to_string()),
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let x = finite(s)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(format!("must be > 0, got {x}"))
    }
}

fn complex(z: Complex) -> Value {
    json!([z.re, z.im])
}

fn matrix_json(m: &CMat) -> Value {
    json!({
        "kind": "matrix",
        "dim": m.dim(),
        "rows": m.rows().map(|r| r.iter().copied().map(complex).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

fn state_json(s: &StateVec) -> Value {
    json!({
        "kind": "state",
        "dim": s.dim(),
        "amplitudes": s.amplitudes().iter().copied().map(complex).collect::<Vec<_>>(),
    })
}

fn print_json(v: &Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Verify { seed, trials } => {
            let mut report = run_verify(seed, trials as usize);
            report.timestamp = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .ok()
                .map(|d| d.as_secs());
            print_json(&serde_json::to_value(&report)?)?;
            Ok(if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Compose { file, input } => {
            let text = std::fs::read_to_string(&file)
                .with_context(|| format!("cannot read {}", file.display()))?;
            let doc =
                netdsl::parse(&text).map_err(|e| anyhow::anyhow!("{}:{e}", file.display()))?;
            let initial = input
                .as_deref()
                .map(StateVec::from_bits)
                .transpose()
                .context("invalid --input")?;
            let out = match netdsl::run(&doc, initial.as_ref())? {
                RunOutput::Matrix(m) => matrix_json(&m),
                RunOutput::State(s) => state_json(&s),
            };
            print_json(&out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Approx {
            phi,
            alpha,
            theta,
            target_alpha,
            target_theta,
            eps,
            n_max,
        } => {
            let base = GateParams::new(phi, alpha, theta);
            let query = ApproxQuery::new(base, target_alpha, target_theta, eps).with_n_max(n_max);
            let result = find_power(&query)?;
            print_json(&json!({
                "base": base,
                "target_alpha": target_alpha,
                "target_theta": target_theta,
                "eps": eps,
                "n_max": n_max,
                "n": result.n,
                "achieved_alpha": result.achieved_alpha,
                "achieved_theta": result.achieved_theta,
                "err": result.err,
                "met": result.met,
            }))?;
            Ok(if result.met {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Converge {
            construction,
            phi,
            beta,
            theta,
            n,
        } => {
            if n.first() == Some(&0) || n.windows(2).any(|w| w[0] >= w[1]) {
                Cli::command()
                    .error(
                        ErrorKind::ValueValidation,
                        "--n must be strictly ascending positive integers",
                    )
                    .exit();
            }
            let samples = convergence_study(construction, StudyParams { phi, beta, theta }, &n)?;
            println!("n,distance");
            for s in samples {
                println!("{},{:e}", s.n, s.distance);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::CompileD {
            phi,
            alpha,
            theta,
            target_theta,
            stage_eps,
        } => {
            let report = compile_d(GateParams::new(phi, alpha, theta), target_theta, stage_eps)?;
            print_json(&serde_json::to_value(&report)?)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
