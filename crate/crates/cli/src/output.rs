//! JSON-lines records. Every record starts with `schema_version` and
//! `command`; the remaining keys follow the declaration order of the body.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::Context;
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct Record<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

#[derive(Default)]
pub struct Sink {
    lines: Vec<String>,
}

impl Sink {
    pub fn emit<T: Serialize>(&mut self, command: &str, body: &T) -> anyhow::Result<()> {
        let r = Record { schema_version: SCHEMA_VERSION, command, body };
        self.lines.push(serde_json::to_string(&r)?);
        Ok(())
    }

    pub fn text(&self) -> String {
        let mut s = self.lines.join("\n");
        if !s.is_empty() {
            s.push('\n');
        }
        s
    }

    /// Writes to `path` through a temporary sibling, or to stdout.
    pub fn finish(&self, path: Option<&Path>) -> anyhow::Result<()> {
        let text = self.text();
        match path {
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())?;
                out.flush()?;
            }
            Some(p) => write_atomic(p, text.as_bytes())?,
        }
        Ok(())
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().context("output path has no file name")?.to_string_lossy();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming onto {}", path.display()))?;
    Ok(())
}

/// A one-line JSON document for curve and map files.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}
