use std::path::Path;

use serde::Serialize;
use serde_json::Value;

/// Everything needed to reproduce a run: subcommand, input and resolved knobs.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub subcommand: String,
    /// `"inline"` or the input file path.
    pub input_source: String,
    pub input: Value,
    pub output: Option<String>,
    /// Knobs after defaults and input-dependent values are filled in.
    pub knobs: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
}

impl ErrorInfo {
    pub fn from_error(e: &ratcheck_core::Error) -> Self {
        ErrorInfo {
            kind: innermost_variant(&format!("{e:?}")),
            message: e.to_string(),
        }
    }
}

/// `Outer(Inner { .. })` → `Inner`.
fn innermost_variant(debug: &str) -> String {
    let mut rest = debug;
    loop {
        let end = rest.find(|c: char| !(c.is_alphanumeric() || c == '_')).unwrap_or(rest.len());
        let tail = &rest[end..];
        let nested = tail.starts_with('(') && tail[1..].starts_with(|c: char| c.is_ascii_uppercase());
        if !nested {
            return rest[..end].to_string();
        }
        rest = &tail[1..];
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub config: RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
}

/// Rows for the companion CSV.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

/// What a subcommand produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub result: Option<Value>,
    pub error: Option<ratcheck_core::Error>,
    pub table: Option<Table>,
    /// A completed analysis with a negative answer (exit 1 without an error).
    pub negative: bool,
}

impl Outcome {
    pub fn ok(result: Value, table: Table) -> Self {
        Outcome {
            result: Some(result),
            table: Some(table),
            ..Default::default()
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.error.is_some() || self.negative {
            1
        } else {
            0
        }
    }
}

impl From<ratcheck_core::Error> for Outcome {
    fn from(e: ratcheck_core::Error) -> Self {
        Outcome {
            error: Some(e),
            ..Default::default()
        }
    }
}

pub fn to_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn write_csv(path: &Path, table: &Table) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::innermost_variant;

    #[test]
    fn variant_names() {
        assert_eq!(innermost_variant("Contour(NoCertificate { best: 1.0 })"), "NoCertificate");
        assert_eq!(innermost_variant("Hankel(NoRationalFit(8))"), "NoRationalFit");
        assert_eq!(innermost_variant("Input(Schema(\"bad\"))"), "Schema");
        assert_eq!(innermost_variant("Input(DFinite(DegenerateEquation))"), "DegenerateEquation");
    }
}
