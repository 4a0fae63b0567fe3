//! JSON description of a representative.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ClosedSpec, Representative};
use crate::convex::{io::load_gridfn, GridSpec};
use crate::error::{Error, Result};
use crate::operators::{sample_graph, AnalyticOperator, OperatorGraph};

/// `{"form": "fitzpatrick" | "grid" | "closed" | "mix", ...}`.
///
/// A Fitzpatrick entry takes either an explicit `graph` or an `operator`
/// sampled on `sample` (a grid over `ℝⁿ`). Grid files are resolved relative
/// to the directory of the spec file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase")]
pub enum RepresentativeSpec {
    Fitzpatrick {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        graph: Option<OperatorGraph>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        operator: Option<AnalyticOperator>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sample: Option<GridSpec>,
    },
    Grid {
        file: PathBuf,
    },
    Closed(ClosedSpec),
    Mix {
        parts: Vec<(f64, RepresentativeSpec)>,
    },
}

impl RepresentativeSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn build(&self, base_dir: &Path) -> Result<Representative> {
        match self {
            RepresentativeSpec::Fitzpatrick {
                graph,
                operator,
                sample,
            } => {
                let g = match (graph, operator, sample) {
                    (Some(g), None, None) => g.clone(),
                    (None, Some(op), Some(s)) => {
                        s.validate()?;
                        sample_graph(op, s)?
                    }
                    _ => {
                        return Err(Error::InvalidInput(
                            "fitzpatrick: give either \"graph\" or both \"operator\" and \"sample\"".into(),
                        ))
                    }
                };
                Representative::fitzpatrick(g)
            }
            RepresentativeSpec::Grid { file } => {
                let path = if file.is_absolute() { file.clone() } else { base_dir.join(file) };
                let f = load_gridfn(&path).map_err(|e| match e {
                    Error::Io(io) => Error::InvalidInput(format!("grid: cannot read {}: {io}", path.display())),
                    other => other,
                })?;
                Representative::grid(f)
            }
            RepresentativeSpec::Closed(c) => Representative::closed(c),
            RepresentativeSpec::Mix { parts } => {
                let built = parts
                    .iter()
                    .map(|(w, s)| Ok((*w, s.build(base_dir)?)))
                    .collect::<Result<Vec<_>>>()?;
                Representative::mix(built)
            }
        }
    }
}
