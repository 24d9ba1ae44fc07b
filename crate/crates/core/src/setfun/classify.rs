//! Exhaustive class tests over antichains.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use super::{ClassId, ClassReport, Direction, SetFunction, SetFunctionError, Witness};
use crate::lattice::{antichains_of, Elem, FiniteLattice};
use crate::rational::Rational;

/// Largest lattice accepted in full-subset mode.
const FULL_SUBSET_LIMIT: usize = 12;
const CHUNK: usize = 2048;

#[derive(Debug, Clone, Copy, Default)]
pub struct ClassifyOptions {
    /// Test every nonempty subset `A` and every `x` instead of antichains
    /// with non-absorbed `x`. Only for cross-validation on small lattices.
    pub full_subsets: bool,
}

pub fn classify(f: &SetFunction, cls: ClassId) -> Result<ClassReport, SetFunctionError> {
    classify_with(f, cls, ClassifyOptions::default())
}

pub fn classify_with(
    f: &SetFunction,
    cls: ClassId,
    opts: ClassifyOptions,
) -> Result<ClassReport, SetFunctionError> {
    use ClassId::*;
    let needs = match cls {
        CompletelyMonotone | CompletelyVeeAlternating | ExponentialValuation => {
            Some(Direction::Increasing)
        }
        CompletelyAlternating | CompletelyVeeMonotone => Some(Direction::Decreasing),
        KValuation(_) | Valuation => None,
    };
    if let Some(d) = needs {
        if d != f.direction() {
            return Err(SetFunctionError::UnsupportedClassForDirection {
                class: cls,
                direction: f.direction(),
            });
        }
    }
    match cls {
        KValuation(k) => is_k_valuation(f, k),
        Valuation => Ok(is_valuation(f)),
        ExponentialValuation => is_exponential_valuation(f),
        _ => {
            let (dual, want_nonneg) = match cls {
                CompletelyMonotone => (false, true),
                CompletelyAlternating => (false, false),
                CompletelyVeeMonotone => (true, true),
                _ => (true, false),
            };
            let scaled = Scaled::new(f.values());
            let found = if opts.full_subsets {
                scan_full(f, &scaled, dual, want_nonneg)?
            } else {
                scan_antichains(f, &scaled, dual, want_nonneg)
            };
            Ok(match found {
                None => ClassReport::pass(cls),
                Some(w) => ClassReport::fail(cls, w),
            })
        }
    }
}

/// Values over a common denominator, as machine integers when they fit.
pub(crate) struct Scaled {
    denom: BigInt,
    small: Option<Vec<i64>>,
    big: Vec<BigInt>,
}

impl Scaled {
    pub(crate) fn new(values: &[Rational]) -> Self {
        let denom = values
            .iter()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let big: Vec<BigInt> = values
            .iter()
            .map(|v| v.numer() * (&denom / v.denom()))
            .collect();
        let small = big.iter().map(|b| b.to_i64()).collect::<Option<Vec<_>>>();
        Scaled { denom, small, big }
    }

    /// Signed numerator of the difference (same sign as the difference).
    fn sign_of(&self, a: &[Elem], x: Elem, op: &(dyn Fn(Elem, Elem) -> Elem + Sync)) -> i8 {
        match &self.small {
            // |A| < 40 keeps 2^|A| * i64 inside i128
            Some(small) if a.len() < 40 => {
                let v = expand(a, x, op, |z| small[z] as i128, 0i128);
                v.signum() as i8
            }
            _ => {
                let v = expand(a, x, op, |z| self.big[z].clone(), BigInt::zero());
                if v.is_positive() {
                    1
                } else if v.is_negative() {
                    -1
                } else {
                    0
                }
            }
        }
    }

    fn exact(&self, a: &[Elem], x: Elem, op: &(dyn Fn(Elem, Elem) -> Elem + Sync)) -> Rational {
        let v = expand(a, x, op, |z| self.big[z].clone(), BigInt::zero());
        Rational::new(v, self.denom.clone())
    }
}

fn expand<T>(
    a: &[Elem],
    x: Elem,
    op: &(dyn Fn(Elem, Elem) -> Elem + Sync),
    val: impl Fn(Elem) -> T,
    zero: T,
) -> T
where
    T: std::ops::AddAssign + std::ops::SubAssign,
{
    let k = a.len();
    let mut folded: Vec<Elem> = Vec::with_capacity(1 << k);
    folded.push(x);
    let mut acc = zero;
    acc += val(x);
    for mask in 1usize..(1 << k) {
        let low = mask.trailing_zeros() as usize;
        let y = op(folded[mask & (mask - 1)], a[low]);
        if mask.count_ones() % 2 == 1 {
            acc -= val(y);
        } else {
            acc += val(y);
        }
        folded.push(y);
    }
    acc
}

/// First `Some` produced by `probe` over the antichains of `carrier` with at
/// most `k_max` elements, in the stream's deterministic order. Work within a
/// chunk runs in parallel; the earliest hit wins regardless of scheduling.
pub(crate) fn first_over_antichains<T: Send>(
    l: &FiniteLattice,
    carrier: &[Elem],
    k_max: usize,
    keep: impl Fn(&[Elem]) -> bool,
    probe: impl Fn(&[Elem]) -> Option<T> + Sync,
) -> Option<T> {
    let mut stream = antichains_of(l, carrier, k_max).filter(|a| keep(a));
    loop {
        let chunk: Vec<Vec<Elem>> = stream.by_ref().take(CHUNK).collect();
        if chunk.is_empty() {
            return None;
        }
        if let Some(hit) = chunk.par_iter().find_map_first(|a| probe(a)) {
            return Some(hit);
        }
    }
}

fn violates(sign: i8, want_nonneg: bool) -> bool {
    if want_nonneg {
        sign < 0
    } else {
        sign > 0
    }
}

fn scan_antichains(
    f: &SetFunction,
    scaled: &Scaled,
    dual: bool,
    want_nonneg: bool,
) -> Option<Witness> {
    let l = f.lattice();
    let all: Vec<Elem> = l.elements().collect();
    let meet = |p: Elem, q: Elem| l.meet(p, q);
    let join = |p: Elem, q: Elem| l.join(p, q);
    let op: &(dyn Fn(Elem, Elem) -> Elem + Sync) = if dual { &join } else { &meet };
    first_over_antichains(
        l,
        &all,
        l.len(),
        |_| true,
        |a| {
            l.elements().find_map(|x| {
                // ∇_A f(x) = 0 when x ≤ some a; Δ_A f(x) = 0 when x ≥ some a
                let absorbed = a
                    .iter()
                    .any(|&z| if dual { l.leq(z, x) } else { l.leq(x, z) });
                if absorbed || !violates(scaled.sign_of(a, x, op), want_nonneg) {
                    return None;
                }
                Some(Witness {
                    set: a.to_vec(),
                    x,
                    value: scaled.exact(a, x, op),
                })
            })
        },
    )
}

fn scan_full(
    f: &SetFunction,
    scaled: &Scaled,
    dual: bool,
    want_nonneg: bool,
) -> Result<Option<Witness>, SetFunctionError> {
    let l = f.lattice();
    let n = l.len();
    if n > FULL_SUBSET_LIMIT {
        return Err(SetFunctionError::TooLargeForFullSubsets(FULL_SUBSET_LIMIT));
    }
    let meet = |p: Elem, q: Elem| l.meet(p, q);
    let join = |p: Elem, q: Elem| l.join(p, q);
    let op: &(dyn Fn(Elem, Elem) -> Elem + Sync) = if dual { &join } else { &meet };
    Ok((1usize..(1 << n)).into_par_iter().find_map_first(|mask| {
        let a: Vec<Elem> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        l.elements().find_map(|x| {
            if !violates(scaled.sign_of(&a, x, op), want_nonneg) {
                return None;
            }
            Some(Witness {
                value: scaled.exact(&a, x, op),
                set: a.clone(),
                x,
            })
        })
    }))
}

/// Meet of the pairwise joins of `b`.
pub fn pairwise_join_meet(l: &FiniteLattice, b: &[Elem]) -> Elem {
    let mut acc = l.top();
    for (i, &p) in b.iter().enumerate() {
        for &q in &b[i + 1..] {
            acc = l.meet(acc, l.join(p, q));
        }
    }
    acc
}

/// Tests `∇_B f(o_B) = 0` for every `(k+1)`-element antichain `B`, where
/// `o_B` is the meet of the pairwise joins of `B`. Requires `f` to be
/// completely monotone (increasing) or completely alternating (decreasing).
pub fn is_k_valuation(f: &SetFunction, k: usize) -> Result<ClassReport, SetFunctionError> {
    if k == 0 {
        return Err(SetFunctionError::InvalidK);
    }
    let pre = match f.direction() {
        Direction::Increasing => ClassId::CompletelyMonotone,
        Direction::Decreasing => ClassId::CompletelyAlternating,
    };
    let pre_report = classify(f, pre)?;
    if !pre_report.holds {
        return Err(SetFunctionError::PrerequisiteClassFailed(Box::new(pre_report)));
    }
    let cls = ClassId::KValuation(k);
    let l = f.lattice();
    let scaled = Scaled::new(f.values());
    let all: Vec<Elem> = l.elements().collect();
    let meet = |p: Elem, q: Elem| l.meet(p, q);
    let found = first_over_antichains(
        l,
        &all,
        k + 1,
        |b| b.len() == k + 1,
        |b| {
            let o = pairwise_join_meet(l, b);
            (scaled.sign_of(b, o, &meet) != 0).then(|| Witness {
                set: b.to_vec(),
                x: o,
                value: scaled.exact(b, o, &meet),
            })
        },
    );
    Ok(match found {
        None => ClassReport::pass(cls),
        Some(w) => ClassReport::fail(cls, w),
    })
}

fn first_bad_pair(
    l: &FiniteLattice,
    defect: impl Fn(Elem, Elem) -> Rational + Sync,
) -> Option<Witness> {
    (0..l.len()).into_par_iter().find_map_first(|x| {
        ((x + 1)..l.len()).find_map(|y| {
            if l.comparable(x, y) {
                return None;
            }
            let d = defect(x, y);
            (!d.is_zero()).then(|| Witness {
                set: vec![x, y],
                x: l.join(x, y),
                value: d,
            })
        })
    })
}

/// Modular identity `f(x) + f(y) = f(x∧y) + f(x∨y)`. A witness carries the
/// pair, `x∨y`, and the defect `∇_{x,y} f(x∨y)`.
pub fn is_valuation(f: &SetFunction) -> ClassReport {
    let l = f.lattice();
    let v = f.values();
    let found = first_bad_pair(l, |x, y| {
        &v[l.meet(x, y)] + &v[l.join(x, y)] - &v[x] - &v[y]
    });
    match found {
        None => ClassReport::pass(ClassId::Valuation),
        Some(w) => ClassReport::fail(ClassId::Valuation, w),
    }
}

/// Multiplicative identity `f(x) f(y) = f(x∧y) f(x∨y)`. A witness carries
/// the pair, `x∨y`, and the defect `f(x∧y) f(x∨y) − f(x) f(y)`.
pub fn is_exponential_valuation(f: &SetFunction) -> Result<ClassReport, SetFunctionError> {
    if f.direction() != Direction::Increasing {
        return Err(SetFunctionError::UnsupportedClassForDirection {
            class: ClassId::ExponentialValuation,
            direction: f.direction(),
        });
    }
    let l = f.lattice();
    let v = f.values();
    let found = first_bad_pair(l, |x, y| {
        &v[l.meet(x, y)] * &v[l.join(x, y)] - &v[x] * &v[y]
    });
    let mut report = match found {
        None => ClassReport::pass(ClassId::ExponentialValuation),
        Some(w) => ClassReport::fail(ClassId::ExponentialValuation, w),
    };
    report.strictly_positive = Some(v.iter().all(|x| x.is_positive()));
    Ok(report)
}
