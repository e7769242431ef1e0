//! Shared plumbing: exit-code policy, seed resolution, unit conversion,
//! and the run manifest written next to every file-producing command.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use chrono::{DateTime, SecondsFormat, Utc};
use qualbound::Error;
use serde_json::Value;

/// Environment variable consulted when no `--seed` flag is given.
pub const SEED_ENV: &str = "QUALBOUND_SEED";

/// Failure modes mapped to process exit codes: usage problems exit 2,
/// runtime/numerical failures exit 3.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Runtime(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Runtime(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            // Problems the caller can fix by changing arguments.
            Error::InvalidParameter { .. }
            | Error::DimensionMismatch(_)
            | Error::DegenerateParams(_)
            | Error::DegenerateWishart { .. }
            | Error::InsufficientObservations { .. }
            | Error::RankDeficient(_) => Failure::Usage(e.to_string()),
            // Numerical trouble discovered mid-run.
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(format!("i/o error: {e}"))
    }
}

/// Seed precedence: `--seed` flag, then `QUALBOUND_SEED`, then 0.
pub fn resolve_seed(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(raw) => raw.trim().parse().map_err(|_| {
            Failure::Usage(format!(
                "{SEED_ENV} must be an unsigned 64-bit integer, got {raw:?}"
            ))
        }),
        Err(_) => Ok(0),
    }
}

/// Per-period signal-noise ratio from an annualized one.
pub fn per_period_snr(zeta_annual: f64, periods_per_year: f64) -> f64 {
    zeta_annual / periods_per_year.sqrt()
}

pub fn check_periods_per_year(ppy: f64) -> Result<(), Failure> {
    if ppy.is_finite() && ppy > 0.0 {
        Ok(())
    } else {
        Err(Failure::Usage(format!(
            "--periods-per-year must be positive and finite, got {ppy}"
        )))
    }
}

pub fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir)
        .map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", dir.display())))
}

pub fn write_text(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents)
        .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))
}

/// Timing context opened at command start; closes into a manifest.
///
/// The manifest carries the timestamps and wall time so that the data
/// outputs themselves stay byte-identical across reruns with the same
/// parameters.
pub struct RunContext {
    started_at: DateTime<Utc>,
    clock: Instant,
}

impl RunContext {
    pub fn start() -> Self {
        RunContext {
            started_at: Utc::now(),
            clock: Instant::now(),
        }
    }

    /// Write `manifest.json` into `dir`, listing the data files produced.
    pub fn write_manifest(
        &self,
        dir: &Path,
        command: &str,
        parameters: Value,
        seed: Option<u64>,
        outputs: &[&str],
    ) -> Result<(), Failure> {
        let manifest = serde_json::json!({
            "command": command,
            "parameters": parameters,
            "seed": seed,
            "tool_version": env!("CARGO_PKG_VERSION"),
            "started_at": self.started_at.to_rfc3339_opts(SecondsFormat::Millis, true),
            "finished_at": Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true),
            "wall_secs": self.clock.elapsed().as_secs_f64(),
            "outputs": outputs,
        });
        write_text(&dir.join("manifest.json"), &format!("{manifest:#}\n"))
    }
}

/// Pretty-printed JSON with a trailing newline, shared by stdout and files.
pub fn render_json(value: &Value) -> String {
    format!("{value:#}\n")
}

/// `PathBuf` to a lossy display string for parameter echoes.
pub fn path_string(p: &PathBuf) -> String {
    p.display().to_string()
}
