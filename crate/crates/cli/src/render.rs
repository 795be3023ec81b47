use std::path::Path;

use thiserror::Error;

use crate::Format;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("residual terms: {0}")]
    Residual(String),
    #[error("{0}")]
    Numerics(String),
    #[error("{0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Output(_) => 1,
            CliError::Residual(_) => 3,
            CliError::Numerics(_) => 4,
        }
    }
}

/// Everything a subcommand produced: the three renderings of its main
/// result, any further files, and the exit status.
pub struct Outcome {
    pub stem: &'static str,
    pub text: String,
    pub csv: Option<String>,
    pub json: serde_json::Value,
    pub extra: Vec<(String, String)>,
    pub exit_code: u8,
}

impl Outcome {
    pub fn new(stem: &'static str, text: String, json: serde_json::Value) -> Self {
        Outcome { stem, text, csv: None, json, extra: Vec::new(), exit_code: 0 }
    }

    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    fn json_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.json).expect("JSON values serialise");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Text => Ok(self.text.clone()),
            Format::Json => Ok(self.json_text()),
            Format::Csv => self
                .csv
                .clone()
                .ok_or_else(|| CliError::Input(format!("no CSV form for `{}` output; use text or json", self.stem))),
        }
    }

    pub fn write_all(&self, dir: &Path) -> Result<(), CliError> {
        let io = |e: std::io::Error| CliError::Output(format!("{}: {e}", dir.display()));
        std::fs::create_dir_all(dir).map_err(io)?;
        let mut files = vec![(format!("{}.txt", self.stem), self.text.clone()), (format!("{}.json", self.stem), self.json_text())];
        if let Some(csv) = &self.csv {
            files.push((format!("{}.csv", self.stem), csv.clone()));
        }
        files.extend(self.extra.iter().cloned());
        for (name, body) in files {
            std::fs::write(dir.join(&name), body).map_err(io)?;
        }
        Ok(())
    }
}

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV document from a header and rows of already formatted fields.
pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory CSV");
    for r in rows {
        w.write_record(r).expect("in-memory CSV");
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV")).expect("CSV is UTF-8")
}
