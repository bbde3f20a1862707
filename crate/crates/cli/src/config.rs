//! Flat `key = value` run configuration with typed keys, layered as defaults < file < flags.

use crate::failure::Failure;
use serde_json::{json, Map, Value as Json};
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    Real,
    Int,
    Unsigned,
    Bool,
    Choice(&'static [&'static str]),
    /// Comma-separated reals.
    Reals,
    Path,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Default {
    Required,
    /// Absent unless given; the command picks a value that may depend on other keys.
    Optional,
    Value(&'static str),
}

#[derive(Debug, Clone, Copy)]
pub struct Key {
    pub name: &'static str,
    pub kind: Kind,
    pub default: Default,
    pub help: &'static str,
}

impl Key {
    pub const fn new(name: &'static str, kind: Kind, default: Default, help: &'static str) -> Self {
        Self { name, kind, default, help }
    }

    pub fn flag(&self) -> String {
        self.name.replace('_', "-")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Real(f64),
    Int(i64),
    Unsigned(u64),
    Bool(bool),
    Text(String),
    Reals(Vec<f64>),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Real(x) => write!(f, "{x:?}"),
            Self::Int(i) => write!(f, "{i}"),
            Self::Unsigned(u) => write!(f, "{u}"),
            Self::Bool(b) => write!(f, "{b}"),
            Self::Text(s) => f.write_str(s),
            Self::Reals(v) => {
                let parts: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

impl Value {
    fn to_json(&self) -> Json {
        match self {
            Self::Real(x) => json!(x),
            Self::Int(i) => json!(i),
            Self::Unsigned(u) => json!(u),
            Self::Bool(b) => json!(b),
            Self::Text(s) => json!(s),
            Self::Reals(v) => json!(v),
        }
    }
}

fn parse_real(text: &str) -> Result<f64, String> {
    match text.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(format!("expected a finite real, got `{text}`")),
    }
}

pub fn parse_value(kind: Kind, text: &str) -> Result<Value, String> {
    let text = text.trim();
    match kind {
        Kind::Real => parse_real(text).map(Value::Real),
        Kind::Int => text.parse().map(Value::Int).map_err(|_| format!("expected an integer, got `{text}`")),
        Kind::Unsigned => {
            text.parse().map(Value::Unsigned).map_err(|_| format!("expected a non-negative integer, got `{text}`"))
        }
        Kind::Bool => match text {
            "true" => Ok(Value::Bool(true)),
            "false" => Ok(Value::Bool(false)),
            _ => Err(format!("expected true or false, got `{text}`")),
        },
        Kind::Choice(options) => {
            if options.contains(&text) {
                Ok(Value::Text(text.to_string()))
            } else {
                Err(format!("expected one of {}, got `{text}`", options.join("|")))
            }
        }
        Kind::Reals => {
            if text.is_empty() {
                return Err("expected a comma-separated list of reals, got nothing".into());
            }
            text.split(',').map(|p| parse_real(p.trim())).collect::<Result<_, _>>().map(Value::Reals)
        }
        Kind::Path => {
            if text.is_empty() {
                Err("expected a path, got nothing".into())
            } else {
                Ok(Value::Text(text.to_string()))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Jsonl,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Jsonl => "jsonl",
        }
    }
}

pub const COMMAND_KEY: &str = "command";

/// Keys every command accepts.
pub const COMMON_KEYS: [Key; 3] = [
    Key::new("seed", Kind::Unsigned, Default::Value("0"), "seed of every random draw"),
    Key::new("out", Kind::Path, Default::Optional, "output file; standard output when absent"),
    Key::new("format", Kind::Choice(&["csv", "jsonl"]), Default::Optional, "output format"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: String,
    /// Command parameters, including defaults; excludes `seed`, `out` and `format`.
    pub params: BTreeMap<String, Value>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    fn entries(&self) -> BTreeMap<&str, Value> {
        let mut all: BTreeMap<&str, Value> = self.params.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
        all.insert(COMMAND_KEY, Value::Text(self.command.clone()));
        all.insert("seed", Value::Unsigned(self.seed));
        all.insert("format", Value::Text(self.format.name().into()));
        if let Some(out) = &self.out {
            all.insert("out", Value::Text(out.display().to_string()));
        }
        all
    }

    /// Canonical text form: one `key = value` line per key in alphabetical order.
    pub fn to_text(&self) -> String {
        self.entries().into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn to_json(&self) -> Json {
        Json::Object(self.entries().into_iter().map(|(k, v)| (k.to_string(), v.to_json())).collect::<Map<_, _>>())
    }

    pub fn real(&self, key: &str) -> f64 {
        match self.params.get(key) {
            Some(Value::Real(x)) => *x,
            other => panic!("key `{key}` is not a real: {other:?}"),
        }
    }

    pub fn int(&self, key: &str) -> i64 {
        match self.params.get(key) {
            Some(Value::Int(i)) => *i,
            other => panic!("key `{key}` is not an integer: {other:?}"),
        }
    }

    pub fn opt_int(&self, key: &str) -> Option<i64> {
        self.params.contains_key(key).then(|| self.int(key))
    }

    pub fn opt_real(&self, key: &str) -> Option<f64> {
        self.params.contains_key(key).then(|| self.real(key))
    }

    pub fn flag(&self, key: &str) -> bool {
        match self.params.get(key) {
            Some(Value::Bool(b)) => *b,
            other => panic!("key `{key}` is not a boolean: {other:?}"),
        }
    }

    pub fn text(&self, key: &str) -> &str {
        match self.params.get(key) {
            Some(Value::Text(s)) => s,
            other => panic!("key `{key}` is not text: {other:?}"),
        }
    }

    pub fn opt_reals(&self, key: &str) -> Option<&[f64]> {
        match self.params.get(key) {
            Some(Value::Reals(v)) => Some(v),
            None => None,
            other => panic!("key `{key}` is not a list: {other:?}"),
        }
    }
}

/// Value of one key and the file line it came from.
pub type FileEntries = BTreeMap<String, (String, usize)>;

/// Splits a config file into raw entries, rejecting malformed lines and duplicates.
pub fn read_entries(text: &str) -> Result<FileEntries, Failure> {
    let mut entries = FileEntries::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Failure::validation(format!("line {line_no}: expected `key = value`, got `{}`", raw.trim())));
        };
        let key = key.trim();
        if key.is_empty() {
            return Err(Failure::validation(format!("line {line_no}: missing key before `=`")));
        }
        if let Some((_, first)) = entries.get(key) {
            return Err(Failure::validation(format!(
                "line {line_no}: duplicate key `{key}` (first set on line {first})"
            )));
        }
        entries.insert(key.to_string(), (value.trim().to_string(), line_no));
    }
    Ok(entries)
}

/// Merges defaults, file entries and flag values for `command` and type-checks every key.
pub fn resolve(
    command: &str,
    schema: &[Key],
    file: &FileEntries,
    flags: &BTreeMap<String, String>,
) -> Result<RunConfig, Failure> {
    let lookup = |name: &str| schema.iter().chain(&COMMON_KEYS).find(|k| k.name == name).copied();
    if let Some((named, line)) = file.get(COMMAND_KEY) {
        if named != command {
            return Err(Failure::validation(format!(
                "line {line}: config is for command `{named}`, not `{command}`"
            )));
        }
    }
    let mut values: BTreeMap<&str, Value> = BTreeMap::new();
    for key in schema.iter().chain(&COMMON_KEYS) {
        if let Default::Value(text) = key.default {
            values.insert(key.name, parse_value(key.kind, text).expect("defaults are well typed"));
        }
    }
    for (name, (text, line)) in file {
        if name == COMMAND_KEY {
            continue;
        }
        let key = lookup(name)
            .ok_or_else(|| Failure::validation(format!("line {line}: unknown key `{name}` for command `{command}`")))?;
        let value = parse_value(key.kind, text).map_err(|e| Failure::validation(format!("line {line}: `{name}`: {e}")))?;
        values.insert(key.name, value);
    }
    for (name, text) in flags {
        let key = lookup(name)
            .ok_or_else(|| Failure::validation(format!("unknown parameter `{name}` for command `{command}`")))?;
        let value = parse_value(key.kind, text).map_err(|e| Failure::validation(format!("--{}: {e}", key.flag())))?;
        values.insert(key.name, value);
    }
    for key in schema {
        if key.default == Default::Required && !values.contains_key(key.name) {
            return Err(Failure::validation(format!(
                "missing required parameter `{}` (flag --{} or config key)",
                key.name,
                key.flag()
            )));
        }
    }
    let seed = match values.remove("seed") {
        Some(Value::Unsigned(s)) => s,
        _ => unreachable!("seed has a default"),
    };
    let out = match values.remove("out") {
        Some(Value::Text(p)) => Some(PathBuf::from(p)),
        _ => None,
    };
    let format = match values.remove("format") {
        Some(Value::Text(f)) if f == "csv" => Some(Format::Csv),
        Some(Value::Text(_)) => Some(Format::Jsonl),
        _ => None,
    };
    let params = values.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    Ok(RunConfig {
        command: command.to_string(),
        params,
        seed,
        out,
        format: format.unwrap_or_else(|| crate::commands::default_format(command)),
    })
}

/// Reads a config file naming its command and resolves it against that command's defaults.
pub fn config_roundtrip(path: &Path) -> Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::io(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<RunConfig, Failure> {
    let entries = read_entries(text)?;
    let Some((command, line)) = entries.get(COMMAND_KEY) else {
        return Err(Failure::validation(format!("config has no `{COMMAND_KEY}` key")));
    };
    let schema = crate::commands::schema(command)
        .ok_or_else(|| Failure::validation(format!("line {line}: unknown command `{command}`")))?;
    resolve(command, &schema, &entries, &BTreeMap::new())
}
