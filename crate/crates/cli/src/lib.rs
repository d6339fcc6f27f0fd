//! Command-line driver for `robin-exterior`: configuration files, parameter
//! sweeps with CSV/SVG output and manifests, and the acceptance scoreboard.

pub mod commands;
pub mod config;
pub mod manifest;
pub mod output;
pub mod spec;
pub mod sweep;
pub mod verify;

pub use spec::SweepSpec;
pub use sweep::{run_sweep, SweepOutcome, SweepRow};

/// Environment variable that takes precedence over `--jobs`.
pub const JOBS_ENV: &str = "ROBIN_EXT_JOBS";

/// Worker count: `ROBIN_EXT_JOBS` if set and valid, else the flag, else the
/// available parallelism.
pub fn resolve_jobs(flag: Option<usize>) -> usize {
    let env = std::env::var(JOBS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok());
    env.or(flag)
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}
