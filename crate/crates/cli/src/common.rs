use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use shiftlike_core::{BuiltinSystem, Error, SystemConfig, SystemModel};

use crate::CommonArgs;

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;
pub const EXIT_NOT_FOUND: u8 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_CONFIG, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Config { .. } | Error::Invalid(_) | Error::EpsilonTooLarge { .. } => EXIT_CONFIG,
            Error::NotFound { .. } => EXIT_NOT_FOUND,
            Error::NonIntegrableDensity { .. }
            | Error::ZeroDensity { .. }
            | Error::OutOfRange { .. }
            | Error::WeightOutOfRange { .. }
            | Error::ZeroVector => EXIT_NUMERIC,
        };
        let message = match &e {
            Error::Config { path, message } => format!("invalid config at `{path}`: {message}"),
            other => other.to_string(),
        };
        Self { code, message }
    }
}

/// Where the system came from, echoed into every report.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum SystemSource {
    Builtin { name: String },
    File { path: String, config: SystemConfig },
}

pub struct ResolvedSystem {
    pub id: String,
    pub source: SystemSource,
    pub model: SystemModel,
}

pub fn resolve_system(name_or_path: &str, p: f64) -> Result<ResolvedSystem, CliError> {
    if let Ok(builtin) = name_or_path.parse::<BuiltinSystem>() {
        return Ok(ResolvedSystem {
            id: builtin.name().to_string(),
            source: SystemSource::Builtin { name: builtin.name().to_string() },
            model: builtin.instantiate(p)?,
        });
    }
    let path = Path::new(name_or_path);
    let text = fs::read_to_string(path).map_err(|e| {
        let names: Vec<&str> = BuiltinSystem::ALL.iter().map(|b| b.name()).collect();
        CliError::usage(format!("`{name_or_path}` is neither a built-in system ({}) nor a readable file: {e}", names.join(", ")))
    })?;
    let config = SystemConfig::from_json(&text)?;
    let model = config.build()?;
    Ok(ResolvedSystem { id: name_or_path.to_string(), source: SystemSource::File { path: name_or_path.to_string(), config }, model })
}

pub fn check_p(p: f64) -> Result<(), CliError> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(CliError::usage(format!("--p must be a finite real >= 1, got {p}")))
    }
}

pub fn timestamp(common: &CommonArgs) -> Option<String> {
    (!common.no_timestamp).then(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true))
}

pub fn write_output(out: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::usage(format!("cannot write to stdout: {e}")))
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    text
}

/// CSV with the fixed header `n,log_value`.
pub fn to_csv(rows: impl IntoIterator<Item = (i64, f64)>) -> String {
    let mut text = String::from("n,log_value\n");
    for (n, v) in rows {
        text.push_str(&format!("{n},{}\n", format_real(v)));
    }
    text
}

/// Shortest round-trip form, switching to exponent notation for very small
/// or large magnitudes so values like `1e-300` stay short.
pub fn format_real(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-5..1e16).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

/// Parses `a..=b` (inclusive) or `a..b` (exclusive).
pub fn parse_cell_range(text: &str) -> Result<(i64, i64), String> {
    let (lo, hi, inclusive) = if let Some((lo, hi)) = text.split_once("..=") {
        (lo, hi, true)
    } else if let Some((lo, hi)) = text.split_once("..") {
        (lo, hi, false)
    } else {
        return Err(format!("expected a range like -3..=3, got `{text}`"));
    };
    let lo: i64 = lo.trim().parse().map_err(|e| format!("bad range start `{lo}`: {e}"))?;
    let hi: i64 = hi.trim().parse().map_err(|e| format!("bad range end `{hi}`: {e}"))?;
    let hi = if inclusive { hi } else { hi - 1 };
    if lo > hi {
        return Err(format!("empty range `{text}`"));
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_ranges() {
        assert_eq!(parse_cell_range("-3..=3"), Ok((-3, 3)));
        assert_eq!(parse_cell_range("-3..3"), Ok((-3, 2)));
        assert!(parse_cell_range("3..3").is_err());
        assert!(parse_cell_range("3").is_err());
    }

    #[test]
    fn csv_header_only_when_empty() {
        assert_eq!(to_csv([]), "n,log_value\n");
        assert_eq!(to_csv([(1, -0.5)]), "n,log_value\n1,-0.5\n");
        assert_eq!(format_real(1.1102230246251565e-16), "1.1102230246251565e-16");
        assert_eq!(format_real(-2.5e20), "-2.5e20");
        assert_eq!(format_real(0.0), "0");
        assert_eq!("1.1102230246251565e-16".parse::<f64>().unwrap(), 1.1102230246251565e-16);
    }

    #[test]
    fn error_codes() {
        assert_eq!(CliError::from(Error::NotFound { k_max: 3 }).code, EXIT_NOT_FOUND);
        assert_eq!(CliError::from(Error::OutOfRange { index: 9, lo: 0, hi: 1 }).code, EXIT_NUMERIC);
        assert_eq!(CliError::from(Error::Invalid("x".into())).code, EXIT_CONFIG);
    }
}
