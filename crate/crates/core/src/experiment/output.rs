use serde::Serialize;

use super::config::ExperimentConfig;

/// Primary output format of tabular commands.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Provenance stamped into every output file.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Meta {
    pub experiment: String,
    pub command: String,
    pub config_sha256: String,
    pub seed: u64,
    pub version: String,
}

impl Meta {
    pub fn new(cfg: &ExperimentConfig, command: &str) -> Self {
        Self {
            experiment: cfg.name.clone(),
            command: command.to_string(),
            config_sha256: cfg.hash(),
            seed: cfg.walk.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    /// Leading CSV comment line.
    pub fn csv_comment(&self) -> String {
        format!(
            "# hypwalk {} experiment={} command={} config_sha256={} seed={}\n",
            self.version, self.experiment, self.command, self.config_sha256, self.seed
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

/// Files to write plus human-readable summary lines.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CommandOutput {
    pub files: Vec<OutputFile>,
    pub summary: Vec<String>,
    /// Set when the command could not produce its main result; files are still written.
    pub failure: Option<String>,
}

/// RFC 4180 CSV with LF line endings, preceded by the metadata comment.
pub fn csv_file<I, R>(meta: &Meta, header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8");
    meta.csv_comment() + &body
}

/// Pretty JSON object `{ "meta": ..., "report": ... }` with a trailing newline.
pub fn json_file<T: Serialize>(meta: &Meta, report: &T) -> String {
    #[derive(Serialize)]
    struct Wrapped<'a, T> {
        meta: &'a Meta,
        report: &'a T,
    }
    serde_json::to_string_pretty(&Wrapped { meta, report }).expect("reports serialize") + "\n"
}

/// Shortest round-trip decimal; non-finite values as `nan`/`inf`/`-inf`.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        x.to_string()
    }
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}
