//! Argument parsing and run orchestration behind the `nel` binary.

use crate::commands::{self, COMMANDS, PAYLOAD_SCHEMAS};
use crate::config::{self, Default as D, Key, COMMON_KEYS};
use crate::failure::{Failure, FailureKind};
use crate::record::{self, build_id, Outcome, OUTPUT_SCHEMA_VERSION};
use clap::{Arg, ArgAction, ArgMatches, Command};
use serde_json::json;
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

pub const THREADS_VAR: &str = "NEL_THREADS";

fn key_arg(key: &Key) -> Arg {
    let help = match key.default {
        D::Value(v) => format!("{} [default: {v}]", key.help),
        D::Required => format!("{} [required]", key.help),
        D::Optional => key.help.to_string(),
    };
    Arg::new(key.name).long(key.flag()).value_name("VALUE").allow_negative_numbers(true).help(help)
}

fn cli() -> Command {
    let mut cli = Command::new("nel")
        .about("Numerical experiments on shear-flow spectra, Euler Lax pairs and near-integrable chaos")
        .disable_version_flag(true)
        .arg(Arg::new("version").long("version").short('V').action(ArgAction::SetTrue).help("print version and schema versions"))
        .subcommand(
            Command::new("config")
                .about("Parse a config file naming its command and print its canonical form")
                .arg(Arg::new("file").required(true).value_name("FILE")),
        );
    for info in &COMMANDS {
        let mut sub = Command::new(info.name)
            .about(info.about)
            .arg(Arg::new("config").long("config").value_name("FILE").help("flat key = value file; flags override it"));
        for key in (info.keys)().iter().chain(&COMMON_KEYS) {
            sub = sub.arg(key_arg(key));
        }
        cli = cli.subcommand(sub);
    }
    cli
}

pub fn version_text() -> String {
    format!(
        "nel {}\nbuild {}\noutput-record/{OUTPUT_SCHEMA_VERSION}\n{}\n",
        env!("CARGO_PKG_VERSION"),
        build_id(),
        PAYLOAD_SCHEMAS.join("\n")
    )
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(text) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let n: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::validation(format!("{THREADS_VAR} must be a positive integer, got `{text}`")))?;
    // A second call in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn resolve(command: &str, m: &ArgMatches) -> Result<config::RunConfig, Failure> {
    let schema = commands::schema(command).expect("subcommands come from the command table");
    let file = match m.get_one::<String>("config") {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::io(format!("cannot read config {path}: {e}")))?;
            config::read_entries(&text).map_err(|e| Failure::validation(format!("{path}: {}", e.message)))?
        }
        None => BTreeMap::new(),
    };
    let mut flags = BTreeMap::new();
    for key in schema.iter().chain(&COMMON_KEYS) {
        if let Some(v) = m.get_one::<String>(key.name) {
            flags.insert(key.name.to_string(), v.clone());
        }
    }
    config::resolve(command, &schema, &file, &flags)
}

fn execute(command: &str, m: &ArgMatches) -> Result<(), Failure> {
    configure_threads()?;
    let cfg = resolve(command, m)?;
    if let Some(out) = &cfg.out {
        let dir = out.parent().filter(|p| !p.as_os_str().is_empty()).map_or(PathBuf::from("."), PathBuf::from);
        if !dir.is_dir() {
            return Err(Failure::io(format!("output directory {} does not exist", dir.display())));
        }
    }
    let commands::Prepared { mut payload, job } = commands::prepare(&cfg)?;
    let start = Instant::now();
    let result = job(&mut payload);
    let duration_s = start.elapsed().as_secs_f64();
    match result {
        Ok(summary) => record::persist(&Outcome { config: &cfg, payload: &payload, summary, duration_s, error: None }),
        Err(e) if e.kind == FailureKind::Computation => {
            let outcome = Outcome { config: &cfg, payload: &payload, summary: json!(null), duration_s, error: Some(&e) };
            record::persist(&outcome)?;
            Err(e)
        }
        Err(e) => Err(e),
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match cli().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if matches.get_flag("version") {
        print!("{}", version_text());
        return 0;
    }
    let outcome = match matches.subcommand() {
        Some(("config", m)) => {
            let path = m.get_one::<String>("file").expect("required");
            config::config_roundtrip(path.as_ref()).map(|cfg| print!("{}", cfg.to_text()))
        }
        Some((command, m)) => execute(command, m),
        None => {
            eprintln!("{}", cli().render_help());
            return 2;
        }
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("nel: {e}");
            e.exit_code()
        }
    }
}
