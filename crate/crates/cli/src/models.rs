//! Model, functional and window files shared by the subcommands.

use serde::Deserialize;
use serde_json::Value;

use choquet_core::lattice::ground_name;
use choquet_core::lfv::{
    AvoidanceEvaluator, FiniteMixture, FinitePoisson, IntervalPoisson, SolidGrain,
};
use choquet_core::random_sets::{unit_lebesgue, CompoundSet, MixtureSet, PoissonProcess};
use choquet_core::rational::{parse_rational, rat, Rational};
use choquet_core::space::{IntervalUnion, MeasureModel};

use crate::CliError;

/// Ground points named `a, b, c, ...` unless names are given.
#[derive(Debug, Clone, PartialEq)]
pub struct Ground {
    pub names: Vec<String>,
}

impl Ground {
    pub fn letters(n: usize) -> Self {
        Ground { names: (0..n).map(ground_name).collect() }
    }

    pub fn from_names(names: Vec<String>) -> Self {
        if names.is_empty() {
            Ground::letters(0)
        } else {
            Ground { names }
        }
    }

    pub fn mask(&self, labels: &[String]) -> Result<usize, CliError> {
        labels.iter().try_fold(0usize, |m, l| {
            let i = self
                .names
                .iter()
                .position(|n| n == l)
                .ok_or_else(|| CliError::Config(format!("unknown ground point {l:?}")))?;
            Ok(m | 1 << i)
        })
    }

    pub fn labels(&self, mask: usize) -> Vec<String> {
        (0..self.names.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| self.names[i].clone())
            .collect()
    }
}

pub fn rational(s: &str) -> Result<Rational, CliError> {
    parse_rational(s).map_err(|_| CliError::Config(format!("bad rational {s:?}")))
}

type Weighted = Vec<(Vec<String>, String)>;

fn weighted(ground: &Ground, items: &Weighted) -> Result<Vec<(usize, Rational)>, CliError> {
    items
        .iter()
        .map(|(set, w)| Ok((ground.mask(set)?, rational(w)?)))
        .collect()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Poisson { intensity: MeasureModel, window: IntervalUnion },
    Compound { ground: Vec<String>, grains: Weighted },
    Mixture { ground: Vec<String>, outcomes: Weighted },
}

pub enum SimModel {
    Poisson(PoissonProcess),
    Compound(Ground, CompoundSet),
    Mixture(Ground, MixtureSet),
}

impl ModelSpec {
    pub fn build(&self) -> Result<SimModel, CliError> {
        let sim = |e: choquet_core::random_sets::SimError| CliError::Config(e.to_string());
        Ok(match self {
            ModelSpec::Poisson { intensity, window } => {
                SimModel::Poisson(PoissonProcess::new(intensity.clone(), window.clone()))
            }
            ModelSpec::Compound { ground, grains } => {
                let g = Ground::from_names(ground.clone());
                let set = CompoundSet::new(weighted(&g, grains)?).map_err(sim)?;
                SimModel::Compound(g, set)
            }
            ModelSpec::Mixture { ground, outcomes } => {
                let g = Ground::from_names(ground.clone());
                let set = MixtureSet::new(weighted(&g, outcomes)?).map_err(sim)?;
                SimModel::Mixture(g, set)
            }
        })
    }
}

/// An exactly evaluable avoidance functional for the `lfv` subcommand.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhiSpec {
    FinitePoisson { ground: Vec<String>, p: Vec<String> },
    Mixture { ground: Vec<String>, outcomes: Weighted },
    Solid { ground: Vec<String>, grain: Vec<String> },
    IntervalPoisson { intensity: MeasureModel, base: String, unit: String },
    IntervalSolid { grain: IntervalUnion },
}

pub enum Phi {
    Finite(Ground, Box<dyn AvoidanceEvaluator<usize>>),
    Interval(Box<dyn AvoidanceEvaluator<IntervalUnion>>),
}

pub const BUILTIN_PHI: [&str; 5] = ["poisson5", "solid5", "pairs4", "interval_poisson", "interval_solid"];

impl PhiSpec {
    pub fn builtin(name: &str) -> Option<PhiSpec> {
        let letters = |n: usize| Ground::letters(n).names;
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        Some(match name {
            "poisson5" => PhiSpec::FinitePoisson { ground: letters(5), p: vec!["9/10".into(); 5] },
            "solid5" => PhiSpec::Solid { ground: letters(5), grain: letters(5) },
            "pairs4" => PhiSpec::Mixture {
                ground: letters(4),
                outcomes: vec![(s(&["a", "b"]), "1/2".into()), (s(&["c", "d"]), "1/2".into())],
            },
            "interval_poisson" => PhiSpec::IntervalPoisson {
                intensity: unit_lebesgue(),
                base: "1/2".into(),
                unit: "1/8".into(),
            },
            "interval_solid" => PhiSpec::IntervalSolid {
                grain: IntervalUnion::interval(rat(0, 1), rat(1, 1)).expect("valid"),
            },
            _ => return None,
        })
    }

    pub fn build(&self) -> Result<Phi, CliError> {
        Ok(match self {
            PhiSpec::FinitePoisson { ground, p } => {
                let g = Ground::from_names(ground.clone());
                if p.len() != g.names.len() {
                    return Err(CliError::Config("one p per ground point required".into()));
                }
                let p = p.iter().map(|s| rational(s)).collect::<Result<_, _>>()?;
                Phi::Finite(g, Box::new(FinitePoisson { p }))
            }
            PhiSpec::Mixture { ground, outcomes } => {
                let g = Ground::from_names(ground.clone());
                let outcomes = weighted(&g, outcomes)?;
                Phi::Finite(g, Box::new(FiniteMixture { outcomes }))
            }
            PhiSpec::Solid { ground, grain } => {
                let g = Ground::from_names(ground.clone());
                let grain = g.mask(grain)?;
                Phi::Finite(g, Box::new(SolidGrain { grain }))
            }
            PhiSpec::IntervalPoisson { intensity, base, unit } => Phi::Interval(Box::new(IntervalPoisson {
                intensity: intensity.clone(),
                base: rational(base)?,
                unit: rational(unit)?,
            })),
            PhiSpec::IntervalSolid { grain } => Phi::Interval(Box::new(SolidGrain { grain: grain.clone() })),
        })
    }
}

/// `{"windows": [...]}` with label lists (finite) or interval unions.
pub fn finite_windows(v: &Value, ground: &Ground) -> Result<Vec<usize>, CliError> {
    let list: Vec<Vec<String>> = serde_json::from_value(v["windows"].clone())
        .map_err(|e| CliError::Config(format!("windows: {e}")))?;
    list.iter().map(|w| ground.mask(w)).collect()
}

pub fn interval_windows(v: &Value) -> Result<Vec<IntervalUnion>, CliError> {
    serde_json::from_value(v["windows"].clone()).map_err(|e| CliError::Config(format!("windows: {e}")))
}
