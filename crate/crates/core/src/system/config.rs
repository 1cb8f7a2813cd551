//! JSON system configuration.
//!
//! ```json
//! {"kind": "density", "pieces": [{"from": "-inf", "to": 0, "c": 1, "a": 2}], "quadrature": {"rel_tol": 1e-13}}
//! {"kind": "profile", "log_mass": {"-1": -2.0, "0": 0.0, "1": 1.0}, "extension": "geometric"}
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::density::{DensityLineSystem, ExpPiece, PiecewiseExpDensity, QuadratureConfig};
use super::model::SystemModel;
use super::profile::{ExtensionRule, MeasureProfile};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Bound {
    Finite(f64),
    Named(String),
}

impl Bound {
    fn resolve(&self, path: &str) -> Result<f64> {
        match self {
            Bound::Finite(x) => Ok(*x),
            Bound::Named(s) => match s.as_str() {
                "-inf" => Ok(f64::NEG_INFINITY),
                "inf" | "+inf" => Ok(f64::INFINITY),
                other => Err(Error::Config {
                    path: path.to_string(),
                    message: format!("expected a number, \"-inf\" or \"inf\", got \"{other}\""),
                }),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceConfig {
    pub from: Bound,
    pub to: Bound,
    pub c: f64,
    pub a: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SystemConfig {
    Density {
        pieces: Vec<PieceConfig>,
        #[serde(default)]
        quadrature: QuadratureConfig,
    },
    Profile {
        log_mass: BTreeMap<String, f64>,
        #[serde(default = "default_extension")]
        extension: ExtensionRule,
    },
}

fn default_extension() -> ExtensionRule {
    ExtensionRule::Reject
}

#[derive(Deserialize)]
struct KindProbe {
    kind: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(dead_code)]
struct DensityFile {
    kind: String,
    pieces: Vec<PieceConfig>,
    #[serde(default)]
    quadrature: QuadratureConfig,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(dead_code)]
struct ProfileFile {
    kind: String,
    log_mass: BTreeMap<String, f64>,
    #[serde(default = "default_extension")]
    extension: ExtensionRule,
}

fn parse_with_path<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        // serde_json's message already ends with "at line L column C"
        let path = e.path().to_string();
        Error::Config { path, message: e.into_inner().to_string() }
    })
}

impl SystemConfig {
    /// Parses JSON, reporting the failing field path and line/column.
    pub fn from_json(text: &str) -> Result<Self> {
        // `kind` is read first; a tagged enum would buffer the input and lose the field path.
        let probe: KindProbe = parse_with_path(text)?;
        match probe.kind.as_deref() {
            Some("density") => {
                let f: DensityFile = parse_with_path(text)?;
                Ok(SystemConfig::Density { pieces: f.pieces, quadrature: f.quadrature })
            }
            Some("profile") => {
                let f: ProfileFile = parse_with_path(text)?;
                Ok(SystemConfig::Profile { log_mass: f.log_mass, extension: f.extension })
            }
            Some(other) => Err(Error::Config {
                path: "kind".into(),
                message: format!("unknown system kind \"{other}\", expected \"density\" or \"profile\""),
            }),
            None => Err(Error::Config { path: "kind".into(), message: "missing field `kind`".into() }),
        }
    }

    pub fn build(&self) -> Result<SystemModel> {
        match self {
            SystemConfig::Density { pieces, quadrature } => {
                let pieces = pieces
                    .iter()
                    .enumerate()
                    .map(|(i, pc)| {
                        Ok(ExpPiece::new(
                            pc.from.resolve(&format!("pieces[{i}].from"))?,
                            pc.to.resolve(&format!("pieces[{i}].to"))?,
                            pc.c,
                            pc.a,
                        ))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let density = PiecewiseExpDensity::new(pieces).map_err(|e| config_err("pieces", e))?;
                let sys = DensityLineSystem::new(density, *quadrature).map_err(|e| config_err("pieces", e))?;
                Ok(sys.into())
            }
            SystemConfig::Profile { log_mass, extension } => {
                let mut entries = Vec::with_capacity(log_mass.len());
                for (key, &v) in log_mass {
                    let k: i64 = key.trim().parse().map_err(|_| Error::Config {
                        path: format!("log_mass.{key}"),
                        message: "key is not an integer".into(),
                    })?;
                    entries.push((k, v));
                }
                entries.sort_by_key(|e| e.0);
                let Some(&(k_min, _)) = entries.first() else {
                    return Err(Error::Config { path: "log_mass".into(), message: "no entries".into() });
                };
                if let Some(w) = entries.windows(2).find(|w| w[1].0 != w[0].0 + 1) {
                    return Err(Error::Config {
                        path: format!("log_mass.{}", w[1].0),
                        message: format!("indices must be contiguous; gap after {}", w[0].0),
                    });
                }
                let values = entries.into_iter().map(|e| e.1).collect();
                let profile = MeasureProfile::new(k_min, values, *extension).map_err(|e| config_err("log_mass", e))?;
                Ok(profile.into())
            }
        }
    }
}

fn config_err(path: &str, e: Error) -> Error {
    match e {
        Error::Config { .. } => e,
        other => Error::Config { path: path.to_string(), message: other.to_string() },
    }
}
