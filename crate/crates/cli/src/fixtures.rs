//! Set-function fixtures with their expected class memberships.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use choquet_core::io::SetFunctionFile;
use choquet_core::setfun::{ClassId, SetFunction};

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
pub struct Fixture {
    pub name: String,
    pub function: SetFunctionFile,
    /// Class id (as in `k_valuation:2`) to expected membership.
    pub expect: BTreeMap<String, bool>,
}

impl Fixture {
    pub fn set_function(&self) -> Result<SetFunction, CliError> {
        self.function
            .to_set_function(None)
            .map_err(|e| CliError::Config(format!("fixture {}: {e}", self.name)))
    }

    pub fn expectations(&self) -> Result<Vec<(ClassId, bool)>, CliError> {
        self.expect
            .iter()
            .map(|(k, v)| {
                let c: ClassId = k.parse().map_err(CliError::Config)?;
                Ok((c, *v))
            })
            .collect()
    }
}

const BUILTIN: [&str; 5] = [
    include_str!("../fixtures/counting3.json"),
    include_str!("../fixtures/hitting_pairs.json"),
    include_str!("../fixtures/pair_grain.json"),
    include_str!("../fixtures/poisson3.json"),
    include_str!("../fixtures/singleton_mixture.json"),
];

pub fn builtin() -> Vec<Fixture> {
    BUILTIN
        .iter()
        .map(|s| serde_json::from_str(s).expect("bundled fixtures parse"))
        .collect()
}

/// A single fixture file, or every `*.json` in a directory (sorted by name).
pub fn load(path: &Path) -> Result<Vec<Fixture>, CliError> {
    let files = if path.is_dir() {
        let mut v: Vec<_> = std::fs::read_dir(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        v.sort();
        v
    } else if path.exists() {
        vec![path.to_path_buf()]
    } else {
        return Err(CliError::Config(format!("fixtures not found: {}", path.display())));
    };
    files
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))
        })
        .collect()
}
