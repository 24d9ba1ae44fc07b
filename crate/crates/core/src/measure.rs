//! Finite (possibly signed) measures on an indexed carrier.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::Rational;

/// What the carrier indices of a [`DiscreteMeasure`] refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CarrierKind {
    /// Lattice elements.
    Elements,
    /// Principal filters `⟨z⟩*`, indexed by `z`.
    Filters,
    /// Closed sets of a finite ground set, indexed by bitmask.
    ClosedSets,
}

/// A carrier point. `AdjoinedBottom` is the extra bottom `0̂` adjoined below
/// a lattice, used by the completely `∨`-alternating representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Carrier {
    Index(usize),
    AdjoinedBottom,
}

/// Nonnegative (or explicitly signed) rational weights on a finite carrier.
#[derive(Debug, Clone)]
pub struct DiscreteMeasure {
    pub kind: CarrierKind,
    /// The full carrier, including points of zero mass.
    pub carrier: Vec<Carrier>,
    /// Nonzero weights only.
    weights: BTreeMap<Carrier, Rational>,
    pub signed: bool,
}

impl PartialEq for DiscreteMeasure {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.weights == other.weights
    }
}

impl DiscreteMeasure {
    pub fn new(kind: CarrierKind, carrier: Vec<Carrier>) -> Self {
        DiscreteMeasure {
            kind,
            carrier,
            weights: BTreeMap::new(),
            signed: false,
        }
    }

    pub fn from_weights(
        kind: CarrierKind,
        carrier: Vec<Carrier>,
        weights: impl IntoIterator<Item = (Carrier, Rational)>,
    ) -> Self {
        let mut m = Self::new(kind, carrier);
        for (c, w) in weights {
            m.add(c, w);
        }
        m
    }

    pub fn add(&mut self, c: Carrier, w: Rational) {
        if w.is_zero() {
            return;
        }
        if !self.carrier.contains(&c) {
            self.carrier.push(c);
        }
        let entry = self.weights.entry(c).or_insert_with(Rational::zero);
        *entry += w;
        if entry.is_zero() {
            self.weights.remove(&c);
        } else if entry.is_negative() {
            self.signed = true;
        }
    }

    pub fn weight(&self, c: Carrier) -> Rational {
        self.weights.get(&c).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn index_weight(&self, i: usize) -> Rational {
        self.weight(Carrier::Index(i))
    }

    /// Nonzero weights in carrier order.
    pub fn weights(&self) -> impl Iterator<Item = (Carrier, &Rational)> {
        self.weights.iter().map(|(c, w)| (*c, w))
    }

    pub fn support(&self) -> Vec<Carrier> {
        self.weights.keys().copied().collect()
    }

    pub fn total(&self) -> Rational {
        self.weights.values().fold(Rational::zero(), |acc, w| acc + w)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.weights.values().all(|w| !w.is_negative())
    }

    pub fn is_zero(&self) -> bool {
        self.weights.is_empty()
    }

    /// Mass of the carrier points selected by `pred`.
    pub fn mass_where(&self, mut pred: impl FnMut(Carrier) -> bool) -> Rational {
        self.weights
            .iter()
            .filter(|(c, _)| pred(**c))
            .fold(Rational::zero(), |acc, (_, w)| acc + w)
    }
}
