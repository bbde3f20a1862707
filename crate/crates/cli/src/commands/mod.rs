//! One thin wrapper per module operation. Each command validates its whole configuration in
//! `prepare` and returns a job that does the computation.

mod chaos;
mod integrable;
mod spectra;

use crate::config::{Format, Key, RunConfig};
use crate::failure::Failure;
use crate::record::Payload;
use serde_json::Value as Json;

pub type Job = Box<dyn FnOnce(&mut Payload) -> Result<Json, Failure>>;

pub struct Prepared {
    pub payload: Payload,
    pub job: Job,
}

pub struct CommandInfo {
    pub name: &'static str,
    pub about: &'static str,
    pub keys: fn() -> Vec<Key>,
    pub default_format: Format,
    pub prepare: fn(&RunConfig) -> Result<Prepared, Failure>,
}

pub const COMMANDS: [CommandInfo; 8] = [
    CommandInfo {
        name: "spectrum",
        about: "Eigenvalues of one mode-class block of the linearised operator",
        keys: spectra::spectrum_keys,
        default_format: Format::Csv,
        prepare: spectra::prepare_spectrum,
    },
    CommandInfo {
        name: "nustar",
        about: "Critical viscosity of the unstable class by bisection",
        keys: spectra::nustar_keys,
        default_format: Format::Jsonl,
        prepare: spectra::prepare_nustar,
    },
    CommandInfo {
        name: "zvtrack",
        about: "Eigenvalue trajectories as the viscosity goes to zero, with their classification",
        keys: spectra::zvtrack_keys,
        default_format: Format::Jsonl,
        prepare: spectra::prepare_zvtrack,
    },
    CommandInfo {
        name: "laxcheck",
        about: "Transported-eigenfield residual of the 2D or 3D Euler Lax pair",
        keys: integrable::laxcheck_keys,
        default_format: Format::Jsonl,
        prepare: integrable::prepare_laxcheck,
    },
    CommandInfo {
        name: "darboux",
        about: "Darboux transformation of a 2D Lax-pair solution and its residuals",
        keys: integrable::darboux_keys,
        default_format: Format::Jsonl,
        prepare: integrable::prepare_darboux,
    },
    CommandInfo {
        name: "simulate",
        about: "Time integration of the sine-Gordon, Ginzburg-Landau or ABC model",
        keys: chaos::simulate_keys,
        default_format: Format::Jsonl,
        prepare: chaos::prepare_simulate,
    },
    CommandInfo {
        name: "poincare",
        about: "Iterates of the period map or section return map",
        keys: chaos::poincare_keys,
        default_format: Format::Csv,
        prepare: chaos::prepare_poincare,
    },
    CommandInfo {
        name: "lyapunov",
        about: "Largest Lyapunov exponent, or a sine-Gordon (eps, a) scan",
        keys: chaos::lyapunov_keys,
        default_format: Format::Csv,
        prepare: chaos::prepare_lyapunov,
    },
];

/// Payload schemas printed by `--version`.
pub const PAYLOAD_SCHEMAS: [&str; 9] = [
    "spectrum-csv/1",
    "critical-viscosity/1",
    "trajectories-jsonl/1",
    "residual-report/1",
    "darboux-report/1",
    "trajectory-record/1",
    "poincare-csv/1",
    "lyapunov-csv/1",
    "scan-csv/1",
];

pub fn info(command: &str) -> Option<&'static CommandInfo> {
    COMMANDS.iter().find(|c| c.name == command)
}

pub fn schema(command: &str) -> Option<Vec<Key>> {
    info(command).map(|c| (c.keys)())
}

pub fn default_format(command: &str) -> Format {
    info(command).map_or(Format::Jsonl, |c| c.default_format)
}

pub fn prepare(config: &RunConfig) -> Result<Prepared, Failure> {
    let info = info(&config.command)
        .ok_or_else(|| Failure::validation(format!("unknown command `{}`", config.command)))?;
    let prepared = (info.prepare)(config)?;
    if !prepared.payload.supports(config.format) {
        return Err(Failure::validation(format!(
            "`{}` writes JSON lines; format `{}` is not available",
            config.command,
            config.format.name()
        )));
    }
    Ok(prepared)
}

fn count(config: &RunConfig, key: &str) -> Result<usize, Failure> {
    let v = config.int(key);
    usize::try_from(v).map_err(|_| Failure::validation(format!("`{key}` must be non-negative, got {v}")))
}

fn positive(config: &RunConfig, key: &str) -> Result<f64, Failure> {
    let v = config.real(key);
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Failure::validation(format!("`{key}` must be positive, got {v}")))
    }
}

fn to_json(value: &impl serde::Serialize) -> Result<Json, Failure> {
    serde_json::to_value(value).map_err(|e| Failure::computation(e.to_string()))
}
