//! Output record: one header line (schema version, config echo, build id, duration, summary)
//! followed by the command's payload, written through a `.partial` file.

use crate::config::{Format, RunConfig};
use crate::failure::Failure;
use serde_json::{json, Map, Value as Json};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const OUTPUT_SCHEMA_VERSION: u32 = 1;

pub fn build_id() -> String {
    format!("{}+{}", env!("CARGO_PKG_VERSION"), env!("NEL_BUILD_ID"))
}

#[derive(Debug, Clone, PartialEq)]
enum Body {
    Table { columns: String, rows: Vec<String> },
    Lines(Vec<String>),
    Empty,
}

/// Payload collected while a command runs.
#[derive(Debug, Clone, PartialEq)]
pub struct Payload {
    pub schema: &'static str,
    body: Body,
}

impl Payload {
    pub fn table(schema: &'static str, columns: &str) -> Self {
        Self { schema, body: Body::Table { columns: columns.to_string(), rows: Vec::new() } }
    }

    pub fn lines(schema: &'static str) -> Self {
        Self { schema, body: Body::Lines(Vec::new()) }
    }

    pub fn empty(schema: &'static str) -> Self {
        Self { schema, body: Body::Empty }
    }

    /// Appends CSV text holding one or more complete rows.
    pub fn push_rows(&mut self, text: &str) {
        if let Body::Table { rows, .. } = &mut self.body {
            rows.extend(text.lines().map(str::to_string));
        }
    }

    pub fn push_json(&mut self, value: &impl serde::Serialize) -> Result<(), Failure> {
        if let Body::Lines(lines) = &mut self.body {
            lines.push(serde_json::to_string(value).map_err(|e| Failure::computation(e.to_string()))?);
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        match &self.body {
            Body::Table { rows, .. } => rows.len(),
            Body::Lines(lines) => lines.len(),
            Body::Empty => 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn supports(&self, format: Format) -> bool {
        !matches!((&self.body, format), (Body::Lines(_), Format::Csv))
    }

    fn render(&self, header: &Json, format: Format) -> String {
        let mut text = String::new();
        let header = header.to_string();
        match format {
            Format::Csv => {
                text.push_str(&format!("# {header}\n"));
                if let Body::Table { columns, rows } = &self.body {
                    text.push_str(columns);
                    text.push('\n');
                    for r in rows {
                        text.push_str(r);
                        text.push('\n');
                    }
                }
            }
            Format::Jsonl => {
                text.push_str(&header);
                text.push('\n');
                match &self.body {
                    Body::Table { columns, rows } => {
                        let names: Vec<&str> = columns.split(',').collect();
                        for r in rows {
                            let obj: Map<String, Json> =
                                names.iter().zip(r.split(',')).map(|(k, v)| (k.to_string(), cell(v))).collect();
                            text.push_str(&Json::Object(obj).to_string());
                            text.push('\n');
                        }
                    }
                    Body::Lines(lines) => {
                        for l in lines {
                            text.push_str(l);
                            text.push('\n');
                        }
                    }
                    Body::Empty => {}
                }
            }
        }
        text
    }
}

fn cell(v: &str) -> Json {
    if let Ok(i) = v.parse::<i64>() {
        return json!(i);
    }
    match v {
        "true" => json!(true),
        "false" => json!(false),
        _ => match v.parse::<f64>() {
            Ok(x) if x.is_finite() => json!(x),
            _ => json!(v),
        },
    }
}

pub struct Outcome<'a> {
    pub config: &'a RunConfig,
    pub payload: &'a Payload,
    pub summary: Json,
    pub duration_s: f64,
    pub error: Option<&'a Failure>,
}

impl Outcome<'_> {
    pub fn header(&self) -> Json {
        let mut h = json!({
            "record": "header",
            "schema_version": OUTPUT_SCHEMA_VERSION,
            "command": self.config.command,
            "config": self.config.to_json(),
            "build": build_id(),
            "duration_s": self.duration_s,
            "payload_schema": self.payload.schema,
            "payload_records": self.payload.len(),
            "status": if self.error.is_some() { "failed" } else { "ok" },
            "summary": self.summary,
        });
        if let Some(e) = self.error {
            h["error"] = json!(e.to_string());
        }
        h
    }

    pub fn render(&self) -> String {
        self.payload.render(&self.header(), self.config.format)
    }
}

pub fn partial_path(out: &Path) -> PathBuf {
    let mut name: OsString = out.as_os_str().to_owned();
    name.push(".partial");
    PathBuf::from(name)
}

/// Writes to `<out>.partial`, renaming to `out` only if the run succeeded. Without `out` a
/// successful record goes to standard output.
pub fn persist(outcome: &Outcome) -> Result<(), Failure> {
    let text = outcome.render();
    match &outcome.config.out {
        None => {
            if outcome.error.is_none() {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
                stdout.flush()?;
            }
            Ok(())
        }
        Some(out) => {
            let partial = partial_path(out);
            let io = |e: std::io::Error| Failure::io(format!("cannot write {}: {e}", partial.display()));
            let mut file = std::fs::File::create(&partial).map_err(io)?;
            file.write_all(text.as_bytes()).map_err(io)?;
            file.sync_all().map_err(io)?;
            drop(file);
            if outcome.error.is_none() {
                std::fs::rename(&partial, out)
                    .map_err(|e| Failure::io(format!("cannot move {} to {}: {e}", partial.display(), out.display())))?;
            }
            Ok(())
        }
    }
}

/// Payload part of a rendered record, i.e. everything after the header line.
pub fn payload_of(text: &str) -> &str {
    text.split_once('\n').map_or("", |(_, rest)| rest)
}
