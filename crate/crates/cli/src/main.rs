use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hdense::coverage::Association;
use hdense::foxh::{self, FoxH};

mod config;
mod figures;
mod run;

use config::{ConfigError, Engine, Overrides};

#[derive(Parser)]
#[command(name = "hdense", version, about = "Coverage and densification scaling laws for dense wireless networks")]
struct Cli {
    /// Master seed of the Monte Carlo streams [default: 0xC0FFEE]
    #[arg(long, global = true, value_parser = parse_seed)]
    seed: Option<u64>,
    /// Monte Carlo trials per simulated point [default: 200000]
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Relative tolerance for eval-foxh
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Config override, e.g. --set network.tier.0.density=1e-3
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate κ·H(c z) for a foxh(...) spec at each z
    EvalFoxh {
        spec: String,
        #[arg(required = true, allow_negative_numbers = true)]
        z: Vec<f64>,
    },
    /// Analytic coverage of the config's network (no sweep)
    Coverage {
        config: PathBuf,
        /// Engines to run [default: chosen by the association rule]
        #[arg(long = "engine")]
        engines: Vec<String>,
    },
    /// Monte Carlo coverage of the config's network (no sweep)
    Simulate { config: PathBuf },
    /// Run the config's parameter sweep
    Sweep {
        config: PathBuf,
        /// Write the CSV here instead of standard output
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate the data behind figure N (1 to 7)
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=7))]
        n: u8,
        /// Directory for figN.csv (default: standard output)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the special-function identity suite
    Selftest,
}

fn parse_seed(s: &str) -> Result<u64, String> {
    match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    }
    .map_err(|e| format!("invalid seed `{s}`: {e}"))
}

enum Failure {
    Config(String),
    Rows(usize),
    Io(io::Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn emit(rows: &[run::Row], with_curve: bool, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => {
            let mut f = io::BufWriter::new(fs::File::create(p)?);
            run::write_csv(&mut f, rows, with_curve)?;
            f.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            run::write_csv(&mut lock, rows, with_curve)?;
        }
    }
    let failed = rows.iter().filter(|r| r.outcome.is_err()).count();
    if failed > 0 {
        Err(Failure::Rows(failed))
    } else {
        Ok(())
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let ov = Overrides { set: cli.set.clone(), seed: cli.seed, trials: cli.trials };
    match cli.command {
        Command::EvalFoxh { spec, z } => {
            let h: FoxH = spec.parse().map_err(|e: hdense::Error| Failure::Config(format!("spec: {e}")))?;
            let mut out = io::stdout().lock();
            writeln!(out, "z,value,residual,nodes,method,error")?;
            let mut failed = 0;
            for x in z {
                match foxh::eval_scaled(&h, h.c * x, h.kappa.ln(), cli.tol) {
                    Ok(ev) => writeln!(out, "{x:.16e},{:.16e},{:.16e},{},{:?},", ev.value, ev.residual, ev.nodes, ev.method)?,
                    Err(e) => {
                        failed += 1;
                        writeln!(out, "{x:.16e},,,,,\"{e}\"")?
                    }
                }
            }
            if failed > 0 {
                return Err(Failure::Rows(failed));
            }
            Ok(())
        }
        Command::Coverage { config, engines } => {
            let mut sweeps = config::load(&read(&config)?, &ov)?;
            let engines = if engines.is_empty() {
                vec![match sweeps[0].base.association {
                    Association::ClosestBs => Engine::Closest,
                    Association::StrongestBs => Engine::Strongest,
                    Association::FixedDistance(_) => Engine::AdHoc,
                }]
            } else {
                engines.iter().map(|e| Engine::parse(e)).collect::<Result<_, _>>()?
            };
            for s in &mut sweeps {
                single_point(s, engines.clone());
            }
            emit(&run::run(&sweeps), sweeps.len() > 1, None)
        }
        Command::Simulate { config } => {
            let mut sweeps = config::load(&read(&config)?, &ov)?;
            for s in &mut sweeps {
                single_point(s, vec![Engine::Simulate]);
            }
            emit(&run::run(&sweeps), sweeps.len() > 1, None)
        }
        Command::Sweep { config, out } => {
            let sweeps = config::load(&read(&config)?, &ov)?;
            if sweeps.iter().any(|s| s.variable.is_none()) {
                return Err(Failure::Config("sweep: the config has no [sweep] section".into()));
            }
            emit(&run::run(&sweeps), sweeps[0].label.is_some(), out.as_deref())
        }
        Command::Figure { n, out } => {
            let sweeps = config::load(figures::recipe(n), &ov)?;
            let rows = run::run(&sweeps);
            match out {
                Some(dir) => {
                    fs::create_dir_all(&dir)?;
                    let path = dir.join(format!("fig{n}.csv"));
                    let res = emit(&rows, true, Some(&path));
                    eprintln!("wrote {}", path.display());
                    res
                }
                None => emit(&rows, true, None),
            }
        }
        Command::Selftest => {
            let mut failed = 0;
            for c in hdense::selftest::identity_suite() {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                failed += usize::from(!c.passed);
            }
            if failed > 0 {
                return Err(Failure::Rows(failed));
            }
            Ok(())
        }
    }
}

/// Drops any sweep: one row per engine for the base network.
fn single_point(s: &mut config::Sweep, engines: Vec<Engine>) {
    s.variable = None;
    s.grid = vec![f64::NAN];
    s.engines = engines;
    s.antennas = None;
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(2);
        }
    }
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Rows(n)) => {
            eprintln!("error: {n} row(s) failed");
            ExitCode::from(1)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
