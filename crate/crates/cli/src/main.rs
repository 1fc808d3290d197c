//! `spinpecd`: scenario-driven spin-resolved photoelectron current scans.
//!
//! Exit codes: 0 success, 1 validation failure, 2 oracle-check failure,
//! 3 I/O error.

mod output;
mod run;
mod scenario;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use scenario::{Format, LoadError, Overrides};

/// Largest oracle deviation accepted by `--check-oracle`.
const ORACLE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "spinpecd", version, about = "Spin-resolved enantio-sensitive photoelectron currents")]
struct Cli {
    /// Scenario file (TOML).
    #[arg(long)]
    scenario: PathBuf,
    /// Output path; overrides `output.path`. Stdout when neither is set.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; overrides `output.format`.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Compare every closed-form current with the brute-force oracle instead of writing output.
    #[arg(long)]
    check_oracle: bool,
    /// Multipole reporting band; enables multipole output.
    #[arg(long)]
    lmax_report: Option<usize>,
    /// Seed for `source = "random"`; overrides `dipole.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads. Results do not depend on this.
    #[arg(long)]
    threads: Option<usize>,
    /// Check the scenario and report every violation without computing.
    #[arg(long)]
    validate: bool,
}

enum Failure {
    Validation(Vec<String>),
    Oracle(f64),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Oracle(_) => 2,
            Failure::Io(_) => 3,
        }
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Io(msg) => Failure::Io(msg),
            LoadError::Invalid(v) => Failure::Validation(v),
        }
    }
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Validation(vec![format!("--threads: {e}")]))?;
    }
    let file = scenario::read(&cli.scenario)?;
    let base = base_dir(&cli.scenario);
    let ov = Overrides {
        out: cli.out.clone(),
        format: cli.format,
        l_report: cli.lmax_report,
        seed: cli.seed,
    };

    if cli.validate {
        let report = scenario::validate(&file, &base, &ov);
        if !report.is_empty() {
            return Err(Failure::Validation(report));
        }
        // dipole files are only parsed while planning
        scenario::plan(&file, &base, &ov)?;
        println!("{}: ok", cli.scenario.display());
        return Ok(());
    }

    let plan = scenario::plan(&file, &base, &ov)?;
    let compute = |e: spinpecd::Error| Failure::Validation(vec![e.to_string()]);

    if cli.check_oracle {
        let report = run::check_oracle(&plan).map_err(compute)?;
        println!(
            "oracle check: {} comparisons, max relative deviation {:.3e} (tolerance {ORACLE_TOLERANCE:.0e})",
            report.comparisons, report.max_deviation
        );
        return if report.max_deviation <= ORACLE_TOLERANCE {
            Ok(())
        } else {
            Err(Failure::Oracle(report.max_deviation))
        };
    }

    let results = run::run(&plan).map_err(compute)?;
    output::write(&plan, &results).map_err(|e| Failure::Io(format!("writing output: {e}")))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // argument errors count as validation failures; 2 is reserved
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Validation(msgs) => {
                    for m in msgs {
                        eprintln!("error: {m}");
                    }
                }
                Failure::Oracle(dev) => {
                    eprintln!("error: oracle check failed, max relative deviation {dev:.3e} exceeds {ORACLE_TOLERANCE:.0e}")
                }
                Failure::Io(msg) => eprintln!("error: {msg}"),
            }
            ExitCode::from(f.code())
        }
    }
}
