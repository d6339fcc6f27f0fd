use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use robin_exterior_cli::commands::{self, BoundArgs, BoundMode, EigArgs, SweepInput};
use robin_exterior_cli::resolve_jobs;

#[derive(Parser)]
#[command(name = "robin-ext", version, about = "Robin Laplacian eigenvalues outside planar domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Monotonicity,
    Isoelastic,
}

#[derive(Subcommand)]
enum Command {
    /// Exact negative spectrum outside a disk.
    Disk {
        #[arg(long)]
        radius: f64,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        /// Print a CSV header and row instead of the table.
        #[arg(long)]
        csv: bool,
    },
    /// Geometric summary of a shape file.
    ShapeInfo { shape: PathBuf },
    /// Trial-function upper bound on the second eigenvalue.
    Bound {
        shape: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Comparison radius for the monotonicity bound (default: min rho).
        #[arg(long)]
        radius: Option<f64>,
        /// Check orthogonality against a finite-element ground state.
        #[arg(long)]
        fem_ground_state: bool,
        /// Append a CSV row to this file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Finite-element eigenvalues of the truncated exterior problem.
    Eig {
        shape: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(short, long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 256)]
        n_theta: usize,
        #[arg(long, default_value_t = 128)]
        n_t: usize,
        #[arg(long, default_value_t = 1.05)]
        grading: f64,
        /// Truncation depth past the boundary (default: from the matched disk).
        #[arg(long)]
        depth: Option<f64>,
        /// Refinement study with this many doubling levels (at least 3).
        #[arg(long)]
        study: Option<usize>,
        #[arg(long, default_value_t = 3000)]
        max_iter: usize,
        #[arg(long, default_value_t = 0x5eed_0fea)]
        seed: u64,
        /// Write `row col value` triplets of K + alpha B and M into this directory.
        #[arg(long)]
        dump_matrices: Option<PathBuf>,
    },
    /// Run a parameter sweep from a spec file or a previous manifest.
    Sweep {
        #[arg(required_unless_present = "manifest", conflicts_with = "manifest")]
        spec: Option<PathBuf>,
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Output directory (default: from the sweep file, or `rerun/` next to the manifest).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; ROBIN_EXT_JOBS takes precedence.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run the acceptance scoreboard.
    Verify {
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        jobs: Option<usize>,
        /// Multiply K0 by 1 + this value (negative control for the Bessel checks).
        #[arg(long, hide = true, allow_hyphen_values = true)]
        perturb_bessel: Option<f64>,
    },
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Disk { radius, alpha, csv } => commands::disk(&mut out, radius, alpha, csv).map(|_| true),
        Command::ShapeInfo { shape } => commands::shape_info(&mut out, &shape).map(|_| true),
        Command::Bound {
            shape,
            alpha,
            mode,
            radius,
            fem_ground_state,
            csv,
        } => {
            let mode = match mode {
                Mode::Monotonicity => BoundMode::Monotonicity,
                Mode::Isoelastic => BoundMode::Isoelastic,
            };
            let args = BoundArgs {
                shape,
                alpha,
                mode,
                radius,
                fem_ground_state,
                csv,
            };
            commands::bound(&mut out, &args).map(|_| true)
        }
        Command::Eig {
            shape,
            alpha,
            k,
            n_theta,
            n_t,
            grading,
            depth,
            study,
            max_iter,
            seed,
            dump_matrices,
        } => {
            let args = EigArgs {
                shape,
                alpha,
                k,
                n_theta,
                n_t,
                grading,
                depth,
                study,
                max_iter,
                seed,
                dump_matrices,
            };
            commands::eig(&mut out, &args).map(|_| true)
        }
        Command::Sweep {
            spec,
            manifest,
            out: dir,
            jobs,
        } => {
            let input = match (&spec, &manifest) {
                (_, Some(m)) => SweepInput::Manifest(m),
                (Some(s), None) => SweepInput::Spec(s),
                (None, None) => unreachable!("clap requires one of them"),
            };
            commands::sweep(&mut out, input, dir.as_deref(), resolve_jobs(jobs))
        }
        Command::Verify {
            quick,
            jobs,
            perturb_bessel,
        } => commands::verify(&mut out, quick, resolve_jobs(jobs), perturb_bessel),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            let _ = std::io::stdout().flush();
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
