//! Set functions on finite lattices and their successive differences.
//!
//! `∇_A f(x) = Σ_{B ⊆ A} (-1)^{|B|} f(⋀B ∧ x)` and dually
//! `Δ_A f(x) = Σ_{B ⊆ A} (-1)^{|B|} f(⋁B ∨ x)`.

mod classify;
mod levy;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::lattice::{Elem, FiniteLattice};
use crate::measure::{Carrier, CarrierKind, DiscreteMeasure};
use crate::rational::Rational;

pub use classify::{
    classify, classify_with, is_exponential_valuation, is_k_valuation, is_valuation,
    pairwise_join_meet, ClassifyOptions,
};
pub use levy::{levy_divisibility, levy_divisibility_with, LevyOptions, LevyReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "inc")]
    Increasing,
    #[serde(rename = "dec")]
    Decreasing,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Increasing => "inc",
            Direction::Decreasing => "dec",
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SetFunctionError {
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("negative value at element {0}")]
    Negative(Elem),
    #[error("not {direction}: elements {x} <= {y} violate monotonicity")]
    NotMonotone { x: Elem, y: Elem, direction: Direction },
    #[error("increasing function vanishes at the top and cannot be normalized")]
    ZeroTop,
    #[error("decreasing function must vanish at the top")]
    TopNotZero,
    #[error("difference operator needs a nonempty index set")]
    EmptyIndexSet,
    #[error("element index {0} out of range")]
    UnknownElement(Elem),
    #[error("class {class} is not defined for {direction} functions")]
    UnsupportedClassForDirection { class: ClassId, direction: Direction },
    #[error("prerequisite class {} failed", .0.class_queried)]
    PrerequisiteClassFailed(Box<ClassReport>),
    #[error("k must be at least 1")]
    InvalidK,
    #[error("full-subset classification is limited to lattices of at most {0} elements")]
    TooLargeForFullSubsets(usize),
}

/// A nonnegative monotone function on a finite lattice, with exact values.
#[derive(Debug, Clone)]
pub struct SetFunction {
    lattice: Arc<FiniteLattice>,
    values: Vec<Rational>,
    direction: Direction,
}

impl SetFunction {
    /// Validates monotonicity and nonnegativity. Increasing functions are
    /// rescaled so that `f(top) = 1`; decreasing functions must have
    /// `f(top) = 0`.
    pub fn new(
        lattice: Arc<FiniteLattice>,
        values: Vec<Rational>,
        direction: Direction,
    ) -> Result<Self, SetFunctionError> {
        let n = lattice.len();
        if values.len() != n {
            return Err(SetFunctionError::LengthMismatch {
                expected: n,
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| v.is_negative()) {
            return Err(SetFunctionError::Negative(i));
        }
        for x in 0..n {
            for y in 0..n {
                if x != y && lattice.leq(x, y) {
                    let ok = match direction {
                        Direction::Increasing => values[x] <= values[y],
                        Direction::Decreasing => values[x] >= values[y],
                    };
                    if !ok {
                        return Err(SetFunctionError::NotMonotone { x, y, direction });
                    }
                }
            }
        }
        let top = lattice.top();
        let values = match direction {
            Direction::Increasing => {
                let t = values[top].clone();
                if t.is_zero() {
                    return Err(SetFunctionError::ZeroTop);
                }
                if t.is_one() {
                    values
                } else {
                    values.into_iter().map(|v| v / &t).collect()
                }
            }
            Direction::Decreasing => {
                if !values[top].is_zero() {
                    return Err(SetFunctionError::TopNotZero);
                }
                values
            }
        };
        Ok(SetFunction {
            lattice,
            values,
            direction,
        })
    }

    pub fn from_fn(
        lattice: Arc<FiniteLattice>,
        direction: Direction,
        f: impl Fn(Elem) -> Rational,
    ) -> Result<Self, SetFunctionError> {
        let values = lattice.elements().map(f).collect();
        Self::new(lattice, values, direction)
    }

    pub fn lattice(&self) -> &FiniteLattice {
        &self.lattice
    }

    pub fn lattice_arc(&self) -> &Arc<FiniteLattice> {
        &self.lattice
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn value(&self, x: Elem) -> &Rational {
        &self.values[x]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    fn check_index_set(&self, a: &[Elem], x: Elem) -> Result<(), SetFunctionError> {
        if a.is_empty() {
            return Err(SetFunctionError::EmptyIndexSet);
        }
        let n = self.lattice.len();
        if let Some(&bad) = a.iter().chain(std::iter::once(&x)).find(|&&e| e >= n) {
            return Err(SetFunctionError::UnknownElement(bad));
        }
        Ok(())
    }

    /// Successive meet-difference `∇_A f(x)`.
    pub fn nabla(&self, a: &[Elem], x: Elem) -> Result<Rational, SetFunctionError> {
        self.check_index_set(a, x)?;
        let l = &*self.lattice;
        Ok(difference(&dedup(a), &x, |p, q| l.meet(*p, *q), |z| {
            self.values[*z].clone()
        }))
    }

    /// Successive join-difference `Δ_A f(x)`.
    pub fn delta(&self, a: &[Elem], x: Elem) -> Result<Rational, SetFunctionError> {
        self.check_index_set(a, x)?;
        let l = &*self.lattice;
        Ok(difference(&dedup(a), &x, |p, q| l.join(*p, *q), |z| {
            self.values[*z].clone()
        }))
    }

    /// Möbius inverse `r` with `Σ_{z ≤ x} r(z) = f(x)` for every `x`:
    /// `r(0̂) = f(0̂)` and `r(x) = ∇_A f(x)` for `A` the elements covered by `x`.
    pub fn mobius_inverse(&self) -> DiscreteMeasure {
        mobius_by_covers(&self.lattice, &self.values, false)
    }

    /// Dual Möbius inverse `r*` with `Σ_{z ≥ x} r*(z) = f(x)`, built from
    /// join-differences over upper covers.
    pub fn dual_mobius_inverse(&self) -> DiscreteMeasure {
        mobius_by_covers(&self.lattice, &self.values, true)
    }
}

fn dedup(a: &[Elem]) -> Vec<Elem> {
    let mut v = a.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

fn mobius_by_covers(l: &FiniteLattice, values: &[Rational], dual: bool) -> DiscreteMeasure {
    let carrier: Vec<Carrier> = l.elements().map(Carrier::Index).collect();
    let mut m = DiscreteMeasure::new(CarrierKind::Elements, carrier);
    for x in l.elements() {
        let covers = if dual { l.upper_covers(x) } else { l.lower_covers(x) };
        let r = if covers.is_empty() {
            values[x].clone()
        } else if dual {
            difference(&covers, &x, |p, q| l.join(*p, *q), |z| values[*z].clone())
        } else {
            difference(&covers, &x, |p, q| l.meet(*p, *q), |z| values[*z].clone())
        };
        m.add(Carrier::Index(x), r);
    }
    m
}

/// Inclusion–exclusion expansion `Σ_{B ⊆ A} (-1)^{|B|} f(op(B) op x)` for any
/// binary operation `op`; with `op = ∧` this is `∇_A f(x)`, with `op = ∨` it
/// is `Δ_A f(x)`.
pub fn difference<T: Clone>(
    a: &[T],
    x: &T,
    op: impl Fn(&T, &T) -> T,
    mut f: impl FnMut(&T) -> Rational,
) -> Rational {
    try_difference::<T, std::convert::Infallible>(a, x, op, |t| Ok(f(t)))
        .unwrap_or_else(|e| match e {})
}

/// Fallible form of [`difference`].
pub fn try_difference<T: Clone, E>(
    a: &[T],
    x: &T,
    op: impl Fn(&T, &T) -> T,
    mut f: impl FnMut(&T) -> Result<Rational, E>,
) -> Result<Rational, E> {
    let k = a.len();
    assert!(k < 31, "index set too large for subset expansion");
    let mut folded: Vec<T> = Vec::with_capacity(1 << k);
    folded.push(x.clone());
    let mut acc = f(x)?;
    for mask in 1usize..(1 << k) {
        let low = mask.trailing_zeros() as usize;
        let v = op(&folded[mask & (mask - 1)], &a[low]);
        let fv = f(&v)?;
        if mask.count_ones() % 2 == 1 {
            acc -= fv;
        } else {
            acc += fv;
        }
        folded.push(v);
    }
    Ok(acc)
}

/// The recursive definition `∇_{z_1..z_n} = ∇_{z_n} ∘ ∇_{z_1..z_{n-1}}`
/// evaluated literally; used to cross-check [`difference`].
pub fn difference_recursive<T: Clone>(
    a: &[T],
    x: &T,
    op: &impl Fn(&T, &T) -> T,
    f: &impl Fn(&T) -> Rational,
) -> Rational {
    match a.split_last() {
        None => f(x),
        Some((last, rest)) => {
            let shifted = op(x, last);
            difference_recursive(rest, x, op, f) - difference_recursive(rest, &shifted, op, f)
        }
    }
}

/// Which monotonicity class to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassId {
    CompletelyMonotone,
    CompletelyAlternating,
    CompletelyVeeMonotone,
    CompletelyVeeAlternating,
    KValuation(usize),
    Valuation,
    ExponentialValuation,
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassId::CompletelyMonotone => f.write_str("completely_monotone"),
            ClassId::CompletelyAlternating => f.write_str("completely_alternating"),
            ClassId::CompletelyVeeMonotone => f.write_str("completely_vee_monotone"),
            ClassId::CompletelyVeeAlternating => f.write_str("completely_vee_alternating"),
            ClassId::KValuation(k) => write!(f, "k_valuation:{k}"),
            ClassId::Valuation => f.write_str("valuation"),
            ClassId::ExponentialValuation => f.write_str("exponential_valuation"),
        }
    }
}

impl FromStr for ClassId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "completely_monotone" => ClassId::CompletelyMonotone,
            "completely_alternating" => ClassId::CompletelyAlternating,
            "completely_vee_monotone" => ClassId::CompletelyVeeMonotone,
            "completely_vee_alternating" => ClassId::CompletelyVeeAlternating,
            "valuation" => ClassId::Valuation,
            "exponential_valuation" => ClassId::ExponentialValuation,
            other => {
                let k = other
                    .strip_prefix("k_valuation:")
                    .and_then(|k| k.parse().ok())
                    .ok_or_else(|| format!("unknown class {other:?}"))?;
                ClassId::KValuation(k)
            }
        })
    }
}

impl Serialize for ClassId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ClassId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Violation found by a class test. For difference-based classes `value` is
/// the offending difference at `(set, x)`; for the pairwise identities `set`
/// is the pair and `value` is the identity's defect (see each test).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub set: Vec<Elem>,
    pub x: Elem,
    #[serde(with = "crate::rational::serde_str")]
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub class_queried: ClassId,
    pub holds: bool,
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strictly_positive: Option<bool>,
}

impl ClassReport {
    fn pass(class: ClassId) -> Self {
        ClassReport {
            class_queried: class,
            holds: true,
            witness: None,
            strictly_positive: None,
        }
    }

    fn fail(class: ClassId, witness: Witness) -> Self {
        ClassReport {
            class_queried: class,
            holds: false,
            witness: Some(witness),
            strictly_positive: None,
        }
    }
}
