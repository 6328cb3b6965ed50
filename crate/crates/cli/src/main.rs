use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::{error, info};

use cqednet_cli::{exit_code, parse_values, run_to_dir, selftest, sweep, Scenario, EXIT_NUMERICAL, EXIT_OK};

#[derive(Parser)]
#[command(name = "cqednet", version, about = "Open cavity-QED network simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario, writing series.csv and summary.txt.
    Run {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override time_grid.n_samples.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Run a scenario once per value of a parameter.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        axis: String,
        /// Comma-separated values.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[arg(long, default_value = "sweep")]
        out: PathBuf,
    },
    /// Run the built-in invariant checks.
    Selftest {
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

fn load(config: &Path, samples: Option<usize>) -> anyhow::Result<Scenario> {
    let mut s = Scenario::load(config)?;
    if let Some(n) = samples {
        let mut raw = s.raw.clone();
        raw.time_grid.n_samples = n;
        s = Scenario::from_raw(raw, &s.name)?;
    }
    Ok(s)
}

fn fail(e: anyhow::Error) -> ExitCode {
    error!("{e:#}");
    eprintln!("error: {e:#}");
    ExitCode::from(exit_code(&e) as u8)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out, samples } => {
            let result = load(&config, samples).and_then(|s| run_to_dir(&s, &out));
            match result {
                Ok(r) => {
                    info!("wrote {}", out.display());
                    print!("{}", r.summary.render());
                    ExitCode::from(EXIT_OK as u8)
                }
                Err(e) => fail(e),
            }
        }
        Command::Sweep { config, axis, values, out } => {
            let result = Scenario::load(&config)
                .and_then(|s| Ok((s, parse_values(&values)?)))
                .and_then(|(s, v)| sweep(&s, &axis, &v, &out));
            match result {
                Ok(points) => {
                    let mut code = EXIT_OK;
                    for p in &points {
                        match &p.result {
                            Ok(_) => println!("{} = {}: ok ({})", axis, p.value, p.dir.display()),
                            Err(e) => {
                                println!("{} = {}: failed: {e:#}", axis, p.value);
                                code = code.max(exit_code(e));
                            }
                        }
                    }
                    println!("wrote {}", out.join("sweep.csv").display());
                    ExitCode::from(code as u8)
                }
                Err(e) => fail(e),
            }
        }
        Command::Selftest { seed } => {
            let checks = selftest::run_checks(seed);
            let mut ok = true;
            for c in &checks {
                println!(
                    "{} {}: {} ({:.1}s)",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail,
                    c.seconds
                );
                ok &= c.passed;
            }
            ExitCode::from(if ok { EXIT_OK } else { EXIT_NUMERICAL } as u8)
        }
    }
}
