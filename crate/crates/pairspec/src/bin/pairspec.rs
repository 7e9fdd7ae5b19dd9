use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pairspec::error::{PairspecError, Result, EXIT_VERIFICATION_FAILED};
use pairspec::io::{write_matrix, write_mesh};
use pairspec::report::to_json;
use pairspec::solve::{count, solve, write_solve_csv, Problem, DEFAULT_DELTA};
use pairspec::sweep::{run_sweep, write_sweep_csv, SweepPlan};
use pairspec::verify::{verify_theorem, VerifyConfig};
use pairspec_core::{DomainKind, EigenOptions, SectorLabel};

#[derive(Parser)]
#[command(
    name = "pairspec",
    version,
    about = "Discrete spectra of the two-particle hard-wall pair domain"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(clap::Args)]
struct DomainArgs {
    /// pair, cross-diag, cross-axis, square or arms
    #[arg(long, default_value = "pair")]
    domain: DomainKind,
    /// full, s or a (pair domain only)
    #[arg(long, default_value = "full")]
    sector: SectorLabel,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    d: f64,
    /// Truncation length [default: 8d]
    #[arg(long = "L")]
    truncation: Option<f64>,
    /// Mesh spacing [default: d/32]
    #[arg(long)]
    h: Option<f64>,
}

impl DomainArgs {
    fn problem(&self) -> Problem {
        Problem {
            domain: self.domain,
            sector: self.sector,
            d: self.d,
            truncation: self.truncation,
            spacing: self.h,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Lowest eigenpairs of one domain and its isolated count.
    Solve {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: f64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Omit the timestamp so repeated runs are byte-identical.
        #[arg(long)]
        deterministic: bool,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Dump the mesh as text.
        #[arg(long)]
        dump_mesh: Option<PathBuf>,
        /// Dump the stiffness matrix (upper triangle) as text.
        #[arg(long)]
        dump_stiffness: Option<PathBuf>,
        /// Dump the mass matrix (upper triangle) as text.
        #[arg(long)]
        dump_mass: Option<PathBuf>,
    },
    /// Exact number of eigenvalues below an energy.
    Count {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long = "E", allow_negative_numbers = true)]
        energy: f64,
    },
    /// Full verification report; exits 1 if any check fails.
    Verify {
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        d: f64,
        #[arg(long)]
        h: Option<f64>,
        #[arg(long = "L")]
        truncation: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        deterministic: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convergence sweep over the spacings and truncations of a JSON plan.
    Sweep {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        deterministic: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    match out {
        Some(path) => {
            let file = File::create(path).map_err(|source| PairspecError::Io {
                path: path.to_owned(),
                source,
            })?;
            let mut w = BufWriter::new(file);
            write(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)?;
        }
    }
    Ok(())
}

fn dump(path: &Path, write: impl FnOnce(BufWriter<File>) -> io::Result<()>) -> Result<()> {
    let file = File::create(path).map_err(|source| PairspecError::Io {
        path: path.to_owned(),
        source,
    })?;
    write(BufWriter::new(file)).map_err(|source| PairspecError::Io {
        path: path.to_owned(),
        source,
    })
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Solve {
            domain,
            k,
            tol,
            seed,
            delta,
            format,
            deterministic,
            out,
            dump_mesh,
            dump_stiffness,
            dump_mass,
        } => {
            let problem = domain.problem();
            if dump_mesh.is_some() || dump_stiffness.is_some() || dump_mass.is_some() {
                let system = problem.assemble()?;
                if let Some(p) = &dump_mesh {
                    dump(p, |w| write_mesh(system.mesh(), w))?;
                }
                if let Some(p) = &dump_stiffness {
                    dump(p, |w| write_matrix(&system.stiffness, w))?;
                }
                if let Some(p) = &dump_mass {
                    dump(p, |w| write_matrix(&system.mass, w))?;
                }
            }
            let options = EigenOptions {
                tolerance: tol,
                seed,
                ..Default::default()
            };
            let report = solve(&problem, k, delta, &options)?;
            match format {
                Format::Json => {
                    let text = to_json(&report, deterministic)?;
                    emit(out.as_deref(), |w| w.write_all(text.as_bytes()))?;
                }
                Format::Csv => emit(out.as_deref(), |w| write_solve_csv(&report, w))?,
            }
            Ok(0)
        }
        Command::Count { domain, energy } => {
            let report = count(&domain.problem(), energy)?;
            let text = to_json(&report, true)?;
            emit(None, |w| w.write_all(text.as_bytes()))?;
            Ok(0)
        }
        Command::Verify {
            d,
            h,
            truncation,
            delta,
            tol,
            seed,
            deterministic,
            out,
        } => {
            let config = VerifyConfig {
                d,
                spacing: h,
                truncation,
                delta,
                tolerance: tol,
                seed,
            };
            let report = verify_theorem(&config)?;
            let text = to_json(&report, deterministic)?;
            emit(out.as_deref(), |w| w.write_all(text.as_bytes()))?;
            for e in &report.errors {
                eprintln!("error: {e}");
            }
            for f in &report.failing_checks {
                eprintln!("failed: {f}");
            }
            Ok(if !report.errors.is_empty() {
                3
            } else if report.pass {
                0
            } else {
                EXIT_VERIFICATION_FAILED
            })
        }
        Command::Sweep {
            plan,
            format,
            deterministic,
            out,
        } => {
            let plan = SweepPlan::load(&plan)?;
            let table = run_sweep(&plan)?;
            match format {
                Format::Json => {
                    let text = to_json(&table, deterministic)?;
                    emit(out.as_deref(), |w| w.write_all(text.as_bytes()))?;
                }
                Format::Csv => emit(out.as_deref(), |w| write_sweep_csv(&table, w))?,
            }
            Ok(if table.failed_cells() > 0 { 3 } else { 0 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
