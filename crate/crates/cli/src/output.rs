//! Output writers: JSON records on stdout (and in `--out`), CSV grids in `--out`.
//!
//! JSON objects are built with sorted keys and numbers in shortest
//! round-trip form, so identical inputs produce byte-identical files.
//! Complex values are written as `{"re", "im"}` objects and states as
//! objects keyed by coordinate name, so every number carries a field name.

use crate::CliError;
use modfront_core::Complex64;
use serde_json::{json, Map, Value};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Destination of a command's files.
#[derive(Debug, Clone)]
pub struct Output {
    dir: Option<PathBuf>,
}

fn io_error(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io { path: path.display().to_string(), source }
}

impl Output {
    /// Creates the output directory if one is given.
    pub fn new(dir: Option<PathBuf>) -> Result<Self, CliError> {
        if let Some(d) = &dir {
            std::fs::create_dir_all(d).map_err(|e| io_error(d, e))?;
        }
        Ok(Self { dir })
    }

    /// Whether files are written at all.
    pub fn has_dir(&self) -> bool {
        self.dir.is_some()
    }

    /// Prints the record on stdout and stores it as `<name>.json` in the output directory.
    pub fn emit_json(&self, name: &str, value: &Value) -> Result<(), CliError> {
        let text = to_json_text(value);
        print!("{text}");
        if let Some(d) = &self.dir {
            let path = d.join(format!("{name}.json"));
            std::fs::write(&path, &text).map_err(|e| io_error(&path, e))?;
        }
        Ok(())
    }

    /// Writes `text` to `file` in the output directory, if any.
    pub fn write_raw(&self, file: &str, text: &str) -> Result<Option<String>, CliError> {
        let Some(d) = &self.dir else { return Ok(None) };
        let path = d.join(file);
        std::fs::write(&path, text).map_err(|e| io_error(&path, e))?;
        Ok(Some(file.to_string()))
    }

    /// Writes `<name>.csv` with a header row; returns the file name, or
    /// `None` when no output directory was given.
    pub fn write_csv(&self, name: &str, header: &[&str], rows: &[String]) -> Result<Option<String>, CliError> {
        let Some(d) = &self.dir else { return Ok(None) };
        let file = format!("{name}.csv");
        let path = d.join(&file);
        let mut text = header.join(",");
        text.push('\n');
        for r in rows {
            text.push_str(r);
            text.push('\n');
        }
        std::fs::write(&path, text).map_err(|e| io_error(&path, e))?;
        Ok(Some(file))
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json_text(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// One CSV row of numbers in shortest round-trip form.
pub fn row(values: &[f64]) -> String {
    let mut s = String::new();
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        write!(s, "{v:?}").expect("writing to a String cannot fail");
    }
    s
}

/// `{"re": .., "im": ..}`.
pub fn complex(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

/// A state as an object keyed by coordinate name.
pub fn state(names: &[&str], x: &[f64]) -> Value {
    let mut m = Map::new();
    for (n, v) in names.iter().zip(x) {
        m.insert((*n).to_string(), json!(v));
    }
    Value::Object(m)
}
