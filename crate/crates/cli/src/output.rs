use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::CliError;

pub const CSV_VERSION_LINE: &str = "# signflip-modal v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Emit {
    Json,
    Csv,
    Both,
}

/// 17 significant digits, so every value round-trips exactly.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn complex(z: Complex64) -> [String; 2] {
    [num(z.re), num(z.im)]
}

/// CSV text with the version line and a header.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = String::new();
        text.push_str(CSV_VERSION_LINE);
        text.push('\n');
        text.push_str(&header.join(","));
        text.push('\n');
        Self { text }
    }

    pub fn row<S: AsRef<str>>(&mut self, fields: impl IntoIterator<Item = S>) {
        let mut first = true;
        for f in fields {
            if !first {
                self.text.push(',');
            }
            first = false;
            let _ = write!(self.text, "{}", f.as_ref());
        }
        self.text.push('\n');
    }
}

pub struct Writer {
    dir: PathBuf,
    emit: Emit,
}

impl Writer {
    pub fn new(dir: &Path, emit: Emit) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            emit,
        })
    }

    fn write(&self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }

    pub fn csv(&self, stem: &str, csv: Csv) -> Result<(), CliError> {
        if self.emit == Emit::Json {
            return Ok(());
        }
        self.write(&format!("{stem}.csv"), &csv.text)
    }

    /// Writes `<stem>.json` and echoes it to stdout.
    pub fn json(&self, stem: &str, value: &impl Serialize) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        if self.emit != Emit::Csv {
            self.write(&format!("{stem}.json"), &text)?;
        }
        print!("{text}");
        Ok(())
    }
}
