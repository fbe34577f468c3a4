use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

pub const TOOL: &str = "fsbound";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Vacuous,
    Infeasible,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Vacuous | Status::Infeasible => 1,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Vacuous => "vacuous",
            Status::Infeasible => "infeasible",
        }
    }
}

/// Rendered output of one command.
pub struct Outcome {
    pub text: String,
    pub status: Status,
}

pub struct Echo<'a> {
    pub command: &'a str,
    pub config: &'a Value,
}

impl Echo<'_> {
    pub fn json(&self, status: Status, result: impl Serialize) -> Result<Outcome> {
        let doc = json!({
            "tool": TOOL,
            "version": VERSION,
            "command": self.command,
            "config": self.config,
            "status": status.name(),
            "result": serde_json::to_value(result)?,
        });
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        Ok(Outcome { text, status })
    }

    pub fn infeasible(&self, message: &str) -> Result<Outcome> {
        self.json(Status::Infeasible, json!({ "message": message }))
    }

    /// CSV with `#`-prefixed provenance lines ahead of the header.
    pub fn csv(&self, status: Status, header: &[&str], rows: &[Vec<String>], notes: &[String]) -> Result<Outcome> {
        let mut text = format!(
            "# {TOOL} {VERSION} {}\n# status: {}\n# config: {}\n",
            self.command,
            status.name(),
            serde_json::to_string(self.config)?
        );
        for n in notes {
            text.push_str(&format!("# {n}\n"));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        text.push_str(std::str::from_utf8(&w.into_inner()?)?);
        Ok(Outcome { text, status })
    }
}

/// Shortest round-trip decimal; infinities as `inf`/`-inf`.
pub fn num(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x}")
    }
}

/// A JSON number, or `"inf"` / `"-inf"` / `"nan"`.
pub fn value(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else {
        json!(num(x))
    }
}

/// Writes atomically to `path` (or stdout) so a failure never leaves a
/// partial file.
pub fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
        Some(p) => {
            let dir = match p.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)
                .with_context(|| format!("cannot create a file in {}", dir.display()))?;
            tmp.write_all(text.as_bytes())?;
            tmp.persist(p).with_context(|| format!("cannot write {}", p.display()))?;
        }
    }
    Ok(())
}
