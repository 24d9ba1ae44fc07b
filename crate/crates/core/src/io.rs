//! JSON file formats for lattices, set functions and measures.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::lattice::{FiniteLattice, LatticeDescription, LatticeError};
use crate::measure::{Carrier, CarrierKind, DiscreteMeasure};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::setfun::{Direction, SetFunction, SetFunctionError};

/// Carrier id of the adjoined bottom in measure files.
pub const ADJOINED_BOTTOM: &str = "adjoined_bottom";

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    SetFunction(#[from] SetFunctionError),
    #[error("unknown lattice reference {0:?}")]
    UnknownLattice(String),
    #[error("unknown element {0:?}")]
    UnknownElement(String),
    #[error("missing value for element {0:?}")]
    MissingValue(String),
    #[error("bad rational {0:?}")]
    BadRational(String),
}

/// A lattice given inline or by reference: `powerset:N` (subsets of an
/// `N`-point set under reverse inclusion), `boolean:N`, `chain:N`, or a path
/// to a lattice description file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LatticeRef {
    Named(String),
    Inline(LatticeDescription),
}

impl LatticeRef {
    pub fn resolve(&self, base: Option<&Path>) -> Result<FiniteLattice, IoError> {
        match self {
            LatticeRef::Inline(d) => Ok(d.build()?),
            LatticeRef::Named(s) => {
                if let Some((kind, n)) = s.split_once(':') {
                    if let Ok(n) = n.parse::<usize>() {
                        match kind {
                            "powerset" if n <= 16 => return Ok(FiniteLattice::powerset_reverse(n)),
                            "boolean" if n <= 16 => return Ok(FiniteLattice::boolean(n)),
                            "chain" if n >= 1 => return Ok(FiniteLattice::chain(n)),
                            _ => {}
                        }
                    }
                }
                let path = match base {
                    Some(b) => b.join(s),
                    None => PathBuf::from(s),
                };
                if !path.exists() {
                    return Err(IoError::UnknownLattice(s.clone()));
                }
                let d: LatticeDescription = serde_json::from_str(&read(&path)?)?;
                Ok(d.build()?)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetFunctionFile {
    pub lattice: LatticeRef,
    pub direction: Direction,
    pub values: BTreeMap<String, String>,
}

impl SetFunctionFile {
    pub fn from_set_function(f: &SetFunction) -> Self {
        let l = f.lattice();
        SetFunctionFile {
            lattice: LatticeRef::Inline(l.to_description()),
            direction: f.direction(),
            values: l
                .elements()
                .map(|x| (l.label(x).to_string(), format_rational(f.value(x))))
                .collect(),
        }
    }

    pub fn to_set_function(&self, base: Option<&Path>) -> Result<SetFunction, IoError> {
        let l = self.lattice.resolve(base)?;
        if let Some(k) = self.values.keys().find(|k| l.index_of(k).is_none()) {
            return Err(IoError::UnknownElement(k.clone()));
        }
        let values = l
            .elements()
            .map(|x| {
                let label = l.label(x);
                let s = self
                    .values
                    .get(label)
                    .ok_or_else(|| IoError::MissingValue(label.to_string()))?;
                parse_rational(s).map_err(|_| IoError::BadRational(s.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SetFunction::new(Arc::new(l), values, self.direction)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureFile {
    pub carrier_kind: CarrierKind,
    pub weights: BTreeMap<String, String>,
}

impl MeasureFile {
    /// Nonzero weights keyed by the labels of `l`.
    pub fn from_measure(m: &DiscreteMeasure, l: &FiniteLattice) -> Self {
        MeasureFile {
            carrier_kind: m.kind,
            weights: m
                .weights()
                .map(|(c, w)| (carrier_id(c, l), format_rational(w)))
                .collect(),
        }
    }

    pub fn to_measure(&self, l: &FiniteLattice, carrier: Vec<Carrier>) -> Result<DiscreteMeasure, IoError> {
        let weights = self
            .weights
            .iter()
            .map(|(k, v)| {
                let c = if k == ADJOINED_BOTTOM {
                    Carrier::AdjoinedBottom
                } else {
                    Carrier::Index(l.index_of(k).ok_or_else(|| IoError::UnknownElement(k.clone()))?)
                };
                let w: Rational = parse_rational(v).map_err(|_| IoError::BadRational(v.clone()))?;
                Ok((c, w))
            })
            .collect::<Result<Vec<_>, IoError>>()?;
        Ok(DiscreteMeasure::from_weights(self.carrier_kind, carrier, weights))
    }
}

pub fn carrier_id(c: Carrier, l: &FiniteLattice) -> String {
    match c {
        Carrier::AdjoinedBottom => ADJOINED_BOTTOM.to_string(),
        Carrier::Index(i) => l.label(i).to_string(),
    }
}

pub fn read(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_set_function(path: &Path) -> Result<SetFunction, IoError> {
    let file: SetFunctionFile = serde_json::from_str(&read(path)?)?;
    file.to_set_function(path.parent())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choquet::{choquet_represent, Mode};
    use crate::rational::rat;

    #[test]
    fn set_function_round_trip() {
        let text = r#"{"lattice":"chain:3","direction":"inc",
            "values":{"0":"0/1","1":"1/2","2":"1/1"}}"#;
        let file: SetFunctionFile = serde_json::from_str(text).unwrap();
        let f = file.to_set_function(None).unwrap();
        assert_eq!(f.value(1), &rat(1, 2));
        let back = SetFunctionFile::from_set_function(&f);
        let g = back.to_set_function(None).unwrap();
        assert_eq!(f.values(), g.values());
        let json = serde_json::to_string(&back).unwrap();
        assert!(json.contains("\"1/2\""));
    }

    #[test]
    fn missing_and_unknown_labels() {
        let file: SetFunctionFile = serde_json::from_str(
            r#"{"lattice":"chain:2","direction":"inc","values":{"0":"0/1"}}"#,
        )
        .unwrap();
        assert!(matches!(file.to_set_function(None), Err(IoError::MissingValue(_))));
        let file: SetFunctionFile = serde_json::from_str(
            r#"{"lattice":"nowhere.json","direction":"inc","values":{}}"#,
        )
        .unwrap();
        assert!(matches!(file.to_set_function(None), Err(IoError::UnknownLattice(_))));
    }

    #[test]
    fn measure_round_trip() {
        let l = Arc::new(FiniteLattice::chain(3));
        let f = SetFunction::new(l.clone(), vec![rat(1, 4), rat(1, 2), rat(1, 1)], Direction::Increasing)
            .unwrap();
        let m = choquet_represent(&f, Mode::VeeAlternating).unwrap();
        let file = MeasureFile::from_measure(&m, &l);
        assert!(file.weights.contains_key(ADJOINED_BOTTOM));
        let back = file.to_measure(&l, Mode::VeeAlternating.carrier(&l)).unwrap();
        assert_eq!(back, m);
    }
}
