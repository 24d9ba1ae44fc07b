//! Subsemilattice coverings, openings and the locally-finite-valuation
//! inequality for avoidance functionals.
//!
//! Differences are taken in the reverse-inclusion order of compact sets, so
//! the meet used by `∇` is the union: `∇_B φ(O) = Σ_{S ⊆ B} (-1)^{|S|} φ(O ∪ ⋃S)`.

use std::collections::{HashMap, HashSet};
use std::fmt::Debug;
use std::hash::Hash;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::random_sets::{count_events, RandomSetModel};
use crate::rational::{pow, Rational};
use crate::setfun::try_difference;
use crate::space::{measure_of, Interval, IntervalUnion, MeasureModel};

/// Finite-model windows with at most this many points get every covering.
pub const EXHAUSTIVE_LIMIT: u32 = 4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LfvError {
    #[error("avoidance functional cannot be evaluated exactly at {0}")]
    EvaluatorNotExact(String),
    #[error("members {0:?} do not form an antichain of G'")]
    NotAnAntichain(Vec<usize>),
    #[error("invalid covering: {0}")]
    InvalidCover(CoverViolation),
    #[error("member index {0} out of range")]
    UnknownMember(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, thiserror::Error)]
#[serde(rename_all = "snake_case")]
pub enum CoverViolation {
    #[error("intersection of members {0} and {1} is missing")]
    MissingIntersection(usize, usize),
    #[error("union of the members differs from the window")]
    UnionMismatch,
    #[error("covering has no members")]
    Empty,
}

/// Compact sets usable in coverings.
pub trait Compact: Clone + Eq + Hash + Ord + Debug + Send + Sync {
    fn empty() -> Self;
    fn union(&self, other: &Self) -> Self;
    fn intersect(&self, other: &Self) -> Self;
    fn is_subset(&self, other: &Self) -> bool;
    /// Deterministic family of coverings of `window`.
    fn cover_family(window: &Self, budget: usize) -> CoverFamily<Self>;

    fn is_empty(&self) -> bool {
        *self == Self::empty()
    }
}

/// Subsets of a finite ground set as bitmasks.
impl Compact for usize {
    fn empty() -> Self {
        0
    }
    fn union(&self, other: &Self) -> Self {
        self | other
    }
    fn intersect(&self, other: &Self) -> Self {
        self & other
    }
    fn is_subset(&self, other: &Self) -> bool {
        self & !other == 0
    }
    fn cover_family(window: &Self, _budget: usize) -> CoverFamily<Self> {
        finite_cover_family(*window)
    }
}

impl Compact for IntervalUnion {
    fn empty() -> Self {
        IntervalUnion::empty()
    }
    fn union(&self, other: &Self) -> Self {
        IntervalUnion::union(self, other)
    }
    fn intersect(&self, other: &Self) -> Self {
        IntervalUnion::intersect(self, other)
    }
    fn is_subset(&self, other: &Self) -> bool {
        IntervalUnion::is_subset(self, other)
    }
    fn cover_family(window: &Self, budget: usize) -> CoverFamily<Self> {
        dyadic_ladder(window, budget)
    }
}

/// A finite intersection-closed family of compacts with union `window`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Covering<C> {
    pub window: C,
    pub members: Vec<C>,
}

impl<C: Compact> Covering<C> {
    /// Members are sorted and deduplicated.
    pub fn new(window: C, mut members: Vec<C>) -> Self {
        members.sort();
        members.dedup();
        Covering { window, members }
    }

    /// `⋂G`, the top of the family under reverse inclusion.
    pub fn core(&self) -> C {
        let mut it = self.members.iter();
        let first = it.next().cloned().unwrap_or_else(C::empty);
        it.fold(first, |acc, q| acc.intersect(q))
    }

    /// Indices of `G' = G ∖ {⋂G}`.
    pub fn reduced(&self) -> Vec<usize> {
        let core = self.core();
        (0..self.members.len())
            .filter(|&i| self.members[i] != core)
            .collect()
    }
}

pub fn validate_cover<C: Compact>(c: &Covering<C>) -> Result<(), CoverViolation> {
    if c.members.is_empty() {
        return Err(CoverViolation::Empty);
    }
    let g = &c.members;
    for i in 0..g.len() {
        for j in (i + 1)..g.len() {
            if !g.contains(&g[i].intersect(&g[j])) {
                return Err(CoverViolation::MissingIntersection(i, j));
            }
        }
    }
    let union = g.iter().fold(C::empty(), |acc, q| acc.union(q));
    if union != c.window {
        return Err(CoverViolation::UnionMismatch);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Opening<C> {
    pub set: C,
    pub is_opening: bool,
}

/// `O_B = ⋃{Q ∈ G : Q_i ⊄ Q for all i}` (empty when nothing qualifies),
/// flagged as an opening when no `Q_i` lies inside it.
pub fn opening_of<C: Compact>(c: &Covering<C>, b: &[usize]) -> Result<Opening<C>, LfvError> {
    let reduced = c.reduced();
    if let Some(&bad) = b.iter().find(|&&i| i >= c.members.len()) {
        return Err(LfvError::UnknownMember(bad));
    }
    let distinct = b.iter().enumerate().all(|(k, i)| !b[..k].contains(i));
    let antichain = distinct
        && b.iter().all(|i| reduced.contains(i))
        && b.iter().all(|&i| {
            b.iter()
                .all(|&j| i == j || !c.members[i].is_subset(&c.members[j]))
        });
    if !antichain {
        return Err(LfvError::NotAnAntichain(b.to_vec()));
    }
    Ok(opening_unchecked(c, b))
}

fn opening_unchecked<C: Compact>(c: &Covering<C>, b: &[usize]) -> Opening<C> {
    let set = c
        .members
        .iter()
        .filter(|q| b.iter().all(|&i| !c.members[i].is_subset(q)))
        .fold(C::empty(), |acc, q| acc.union(q));
    let is_opening = b.iter().all(|&i| !c.members[i].is_subset(&set));
    Opening { set, is_opening }
}

/// Antichains (under inclusion) among `items`, sizes `1..=k_max`, in
/// depth-first lexicographic order of member indices.
fn antichains<C: Compact>(members: &[C], items: &[usize], k_max: usize) -> Vec<Vec<usize>> {
    fn grow<C: Compact>(
        members: &[C],
        items: &[usize],
        from: usize,
        k_max: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        for p in from..items.len() {
            let c = items[p];
            let free = current.iter().all(|&q| {
                !members[q].is_subset(&members[c]) && !members[c].is_subset(&members[q])
            });
            if free {
                current.push(c);
                out.push(current.clone());
                if current.len() < k_max {
                    grow(members, items, p + 1, k_max, current, out);
                }
                current.pop();
            }
        }
    }
    let mut out = Vec::new();
    if k_max > 0 {
        grow(members, items, 0, k_max, &mut Vec::new(), &mut out);
    }
    out
}

/// An avoidance functional that can be evaluated exactly.
pub trait AvoidanceEvaluator<C>: Sync {
    fn avoidance(&self, q: &C) -> Result<Rational, LfvError>;
}

/// `φ(Q) = Π_{a ∈ Q} p_a`: Poisson process on a finite set with
/// `p_a = exp(-λ{a})` given as rationals.
#[derive(Debug, Clone)]
pub struct FinitePoisson {
    pub p: Vec<Rational>,
}

impl AvoidanceEvaluator<usize> for FinitePoisson {
    fn avoidance(&self, q: &usize) -> Result<Rational, LfvError> {
        Ok((0..self.p.len())
            .filter(|i| q >> i & 1 == 1)
            .fold(Rational::one(), |acc, i| acc * &self.p[i]))
    }
}

/// `φ(Q) = base^{λ(Q)/unit}`, exact when `λ(Q)/unit` is an integer.
#[derive(Debug, Clone)]
pub struct IntervalPoisson {
    pub intensity: MeasureModel,
    pub base: Rational,
    pub unit: Rational,
}

impl AvoidanceEvaluator<IntervalUnion> for IntervalPoisson {
    fn avoidance(&self, q: &IntervalUnion) -> Result<Rational, LfvError> {
        let e = measure_of(&self.intensity, q) / &self.unit;
        if !e.is_integer() {
            return Err(LfvError::EvaluatorNotExact(q.to_string()));
        }
        let k: u64 = e
            .to_integer()
            .try_into()
            .map_err(|_| LfvError::EvaluatorNotExact(q.to_string()))?;
        Ok(pow(&self.base, k))
    }
}

/// Random set taking finitely many values: `φ(Q) = 1 − Σ_{g ∩ Q ≠ ∅} p_g`.
#[derive(Debug, Clone)]
pub struct FiniteMixture {
    pub outcomes: Vec<(usize, Rational)>,
}

impl AvoidanceEvaluator<usize> for FiniteMixture {
    fn avoidance(&self, q: &usize) -> Result<Rational, LfvError> {
        Ok(self
            .outcomes
            .iter()
            .filter(|(g, _)| g & q != 0)
            .fold(Rational::one(), |acc, (_, p)| acc - p))
    }
}

/// Deterministic grain: `φ(Q) = 1` if `Q` misses the grain, else 0.
#[derive(Debug, Clone)]
pub struct SolidGrain<C> {
    pub grain: C,
}

impl<C: Compact> AvoidanceEvaluator<C> for SolidGrain<C> {
    fn avoidance(&self, q: &C) -> Result<Rational, LfvError> {
        Ok(if q.intersect(&self.grain).is_empty() {
            Rational::one()
        } else {
            Rational::zero()
        })
    }
}

/// A sampled avoidance functional. It never yields exact values; use it with
/// [`lfv_diagnostic`].
pub struct MonteCarloAvoidance<'a, M>(pub &'a M);

impl<M: RandomSetModel> AvoidanceEvaluator<M::Query> for MonteCarloAvoidance<'_, M>
where
    M::Query: Debug,
{
    fn avoidance(&self, q: &M::Query) -> Result<Rational, LfvError> {
        Err(LfvError::EvaluatorNotExact(format!("{q:?}")))
    }
}

struct Memo<'a, C> {
    phi: &'a dyn AvoidanceEvaluator<C>,
    cache: HashMap<C, Rational>,
}

impl<C: Compact> Memo<'_, C> {
    fn get(&mut self, q: &C) -> Result<Rational, LfvError> {
        if let Some(v) = self.cache.get(q) {
            return Ok(v.clone());
        }
        let v = self.phi.avoidance(q)?;
        self.cache.insert(q.clone(), v.clone());
        Ok(v)
    }

    fn nabla(&mut self, b: &[C], at: &C) -> Result<Rational, LfvError> {
        try_difference(b, at, |x, y| x.union(y), |q| self.get(q))
    }
}

/// Left-hand side of the LFV inequality for each `n = 0..=n_max`:
/// `φ(W) + Σ ∇_B φ(O_B)` over antichains `B` of `G'` with `|B| <= n` whose
/// `O_B` is an opening.
pub fn lfv_lhs_profile<C: Compact>(
    phi: &dyn AvoidanceEvaluator<C>,
    c: &Covering<C>,
    n_max: usize,
) -> Result<Vec<Rational>, LfvError> {
    validate_cover(c).map_err(LfvError::InvalidCover)?;
    let mut memo = Memo {
        phi,
        cache: HashMap::new(),
    };
    let mut by_size = vec![Rational::zero(); n_max + 1];
    by_size[0] = memo.get(&c.window)?;
    for b in antichains(&c.members, &c.reduced(), n_max) {
        let o = opening_unchecked(c, &b);
        if !o.is_opening {
            continue;
        }
        let sets: Vec<C> = b.iter().map(|&i| c.members[i].clone()).collect();
        by_size[b.len()] += memo.nabla(&sets, &o.set)?;
    }
    let mut acc = Rational::zero();
    Ok(by_size
        .into_iter()
        .map(|s| {
            acc += s;
            acc.clone()
        })
        .collect())
}

pub fn lfv_lhs<C: Compact>(
    phi: &dyn AvoidanceEvaluator<C>,
    c: &Covering<C>,
    n: usize,
) -> Result<Rational, LfvError> {
    Ok(lfv_lhs_profile(phi, c, n)?.pop().expect("nonempty profile"))
}

/// The same bound computed on the sublattice `F` generated by the covering:
/// `Σ ∇_{B^x} φ(x)` over `x ∈ F` whose boundary antichain `B^x` has at most
/// `n` elements.
pub fn sublattice_bound<C: Compact>(
    phi: &dyn AvoidanceEvaluator<C>,
    c: &Covering<C>,
    n: usize,
) -> Result<Rational, LfvError> {
    validate_cover(c).map_err(LfvError::InvalidCover)?;
    // close under unions (meets in reverse inclusion)
    let mut items = c.members.clone();
    let mut seen: HashSet<C> = items.iter().cloned().collect();
    let mut i = 0;
    while i < items.len() {
        for j in 0..c.members.len() {
            let u = items[i].union(&c.members[j]);
            if seen.insert(u.clone()) {
                items.push(u);
            }
        }
        i += 1;
    }
    let mut memo = Memo {
        phi,
        cache: HashMap::new(),
    };
    let mut total = Rational::zero();
    for x in &items {
        // the maximal elements of the closure outside the principal filter
        // of x are the minimal generators not contained in x
        let outside: Vec<&C> = c.members.iter().filter(|g| !g.is_subset(x)).collect();
        let b: Vec<C> = outside
            .iter()
            .filter(|g| !outside.iter().any(|h| h != *g && h.is_subset(g)))
            .map(|g| (*g).clone())
            .collect();
        if b.len() <= n {
            total += memo.nabla(&b, x)?;
        }
    }
    Ok(total)
}

/// Checks the two halves of "the pieces `Q_i ∖ O_B` partition `W ∖ O_B`":
/// `(disjoint, covering)`.
pub fn opening_partition<C: Compact>(c: &Covering<C>, b: &[usize], o: &C) -> (bool, bool) {
    let disjoint = b.iter().enumerate().all(|(k, &i)| {
        b[k + 1..]
            .iter()
            .all(|&j| c.members[i].intersect(&c.members[j]).is_subset(o))
    });
    let covered = b
        .iter()
        .fold(o.clone(), |acc, &i| acc.union(&c.members[i]));
    (disjoint, c.window.is_subset(&covered))
}

/// Coverings tried for one window; `exhaustive` when every covering of the
/// window is present.
#[derive(Debug, Clone)]
pub struct CoverFamily<C> {
    pub covers: Vec<Covering<C>>,
    pub exhaustive: bool,
}

/// Every intersection-closed family of subsets of `window` containing `∅`
/// with union `window`, when the window has at most four points; otherwise
/// the power-set covering alone.
pub fn finite_cover_family(window: usize) -> CoverFamily<usize> {
    let subsets: Vec<usize> = submasks(window).filter(|&s| s != 0).collect();
    if window.count_ones() > EXHAUSTIVE_LIMIT {
        let mut all = subsets;
        all.push(0);
        return CoverFamily {
            covers: vec![Covering::new(window, all)],
            exhaustive: false,
        };
    }
    let mut covers = Vec::new();
    for pick in 1u64..(1 << subsets.len()) {
        let mut members: Vec<usize> = vec![0];
        members.extend(
            (0..subsets.len())
                .filter(|i| pick >> i & 1 == 1)
                .map(|i| subsets[i]),
        );
        let union = members.iter().fold(0, |a, m| a | m);
        if union != window {
            continue;
        }
        let closed = members
            .iter()
            .all(|&a| members.iter().all(|&b| members.contains(&(a & b))));
        if closed {
            covers.push(Covering::new(window, members));
        }
    }
    CoverFamily {
        covers,
        exhaustive: true,
    }
}

fn submasks(m: usize) -> impl Iterator<Item = usize> {
    (0..=m).filter(move |s| s & !m == 0)
}

/// Dyadic refinement ladder: level `j` cuts the window's hull into `2^j`
/// closed pieces, keeps their intersections with the window, the shared
/// cut points, and `∅`. Levels are added while the member count stays
/// within `budget`.
pub fn dyadic_ladder(window: &IntervalUnion, budget: usize) -> CoverFamily<IntervalUnion> {
    let Some(hull) = window.hull() else {
        return CoverFamily {
            covers: vec![Covering::new(window.clone(), vec![IntervalUnion::empty()])],
            exhaustive: false,
        };
    };
    let mut covers = Vec::new();
    for level in 0u32.. {
        let cover = ladder_level(window, &hull, level);
        if cover.members.len() > budget.max(2) || level > 24 {
            break;
        }
        covers.push(cover);
    }
    CoverFamily {
        covers,
        exhaustive: false,
    }
}

fn ladder_level(window: &IntervalUnion, hull: &Interval, level: u32) -> Covering<IntervalUnion> {
    let parts = 1i64 << level;
    let step = hull.length() / Rational::from_integer(parts.into());
    let cut = |k: i64| &hull.lo + &step * Rational::from_integer(k.into());
    let mut members = vec![IntervalUnion::empty()];
    for k in 0..parts {
        let piece = IntervalUnion::from_intervals(vec![Interval {
            lo: cut(k),
            hi: cut(k + 1),
        }]);
        members.push(piece.intersect(window));
    }
    // close under intersection (adds shared points and any finer pieces)
    let mut i = 0;
    while i < members.len() {
        for j in 0..i {
            let x = members[i].intersect(&members[j]);
            if !members.contains(&x) {
                members.push(x);
            }
        }
        i += 1;
    }
    Covering::new(window.clone(), members)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LfvVerdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverResult {
    pub window: usize,
    pub cover: usize,
    pub members: usize,
    /// Value at the window's `n` (or at `n_max` when the window fails).
    #[serde(with = "crate::rational::serde_str")]
    pub lhs: Rational,
    pub n: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample<C> {
    pub window: usize,
    pub cover: Covering<C>,
    pub n: usize,
    #[serde(with = "crate::rational::serde_str")]
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LfvCertificate<C> {
    #[serde(with = "crate::rational::serde_str")]
    pub delta: Rational,
    pub n_max: usize,
    /// Smallest `n` working for every window, when one exists.
    pub n_used: Option<usize>,
    pub exhaustive: bool,
    pub per_cover_results: Vec<CoverResult>,
    pub verdict: LfvVerdict,
    pub counterexample: Option<Counterexample<C>>,
}

#[derive(Debug, Clone)]
pub struct LfvOptions {
    pub delta: Rational,
    pub n_max: usize,
    pub cover_budget: usize,
}

impl Default for LfvOptions {
    fn default() -> Self {
        LfvOptions {
            delta: Rational::new(1.into(), 20.into()),
            n_max: 20,
            cover_budget: 16,
        }
    }
}

/// Searches for an `n <= n_max` such that every generated covering of every
/// window satisfies `lhs >= 1 − δ`. The left-hand side is nondecreasing in
/// `n`, so a covering below the bound at `n_max` is a counterexample for
/// every `n`. A pass over a non-exhaustive family is reported as
/// inconclusive.
pub fn lfv_certificate<C: Compact>(
    phi: &dyn AvoidanceEvaluator<C>,
    windows: &[C],
    opts: &LfvOptions,
) -> Result<LfvCertificate<C>, LfvError> {
    let target = Rational::one() - &opts.delta;
    let mut results = Vec::new();
    let mut counterexample = None;
    let mut exhaustive = true;
    let mut n_used = Some(0usize);
    for (w, window) in windows.iter().enumerate() {
        let family = C::cover_family(window, opts.cover_budget);
        exhaustive &= family.exhaustive;
        let profiles = family
            .covers
            .par_iter()
            .map(|c| lfv_lhs_profile(phi, c, opts.n_max))
            .collect::<Result<Vec<_>, _>>()?;
        let failing = profiles.iter().position(|p| p[opts.n_max] < target);
        let n_w = match failing {
            Some(_) => None,
            None => (1..=opts.n_max).find(|&n| profiles.iter().all(|p| p[n] >= target)),
        };
        if let (Some(k), None) = (failing, &counterexample) {
            counterexample = Some(Counterexample {
                window: w,
                cover: family.covers[k].clone(),
                n: opts.n_max,
                value: profiles[k][opts.n_max].clone(),
            });
        }
        n_used = match (n_used, n_w) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        let at = n_w.unwrap_or(opts.n_max);
        for (k, (c, p)) in family.covers.iter().zip(&profiles).enumerate() {
            results.push(CoverResult {
                window: w,
                cover: k,
                members: c.members.len(),
                lhs: p[at].clone(),
                n: at,
                pass: p[at] >= target,
            });
        }
    }
    let verdict = if counterexample.is_some() {
        LfvVerdict::Fail
    } else if exhaustive && n_used.is_some() {
        LfvVerdict::Pass
    } else {
        LfvVerdict::Inconclusive
    };
    Ok(LfvCertificate {
        delta: opts.delta.clone(),
        n_max: opts.n_max,
        n_used: if windows.is_empty() { None } else { n_used },
        exhaustive,
        per_cover_results: results,
        verdict,
        counterexample,
    })
}

/// One sampled term `∇_B φ(O_B) = P(X ∩ O_B = ∅, X ∩ Q_i ≠ ∅ for all i)`
/// (the `B = ∅` term is `φ(W)`).
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticTerm {
    pub antichain: Vec<usize>,
    pub estimate: f64,
    pub std_error: f64,
    pub exact: Option<Rational>,
    pub z: Option<f64>,
}

/// Monte Carlo estimates of every term of the LFV sum with their z-scores
/// against exact values when an evaluator is supplied. No verdict is drawn.
pub fn lfv_diagnostic<M>(
    model: &M,
    exact: Option<&dyn AvoidanceEvaluator<M::Query>>,
    c: &Covering<M::Query>,
    n: usize,
    samples: u64,
    seed: u64,
) -> Result<Vec<DiagnosticTerm>, LfvError>
where
    M: RandomSetModel,
    M::Query: Compact,
{
    validate_cover(c).map_err(LfvError::InvalidCover)?;
    let mut terms: Vec<(Vec<usize>, M::Query)> = vec![(vec![], c.window.clone())];
    for b in antichains(&c.members, &c.reduced(), n) {
        let o = opening_unchecked(c, &b);
        if o.is_opening {
            terms.push((b, o.set));
        }
    }
    let mut memo = exact.map(|phi| Memo {
        phi,
        cache: HashMap::new(),
    });
    let mut out = Vec::with_capacity(terms.len());
    for (t, (b, o)) in terms.into_iter().enumerate() {
        let sets: Vec<M::Query> = b.iter().map(|&i| c.members[i].clone()).collect();
        let count = count_events(model, samples, seed, (t as u64) << 32, |s| {
            !model.hits(s, &o) && sets.iter().all(|q| model.hits(s, q))
        });
        let p = count as f64 / samples as f64;
        let std_error = (p * (1.0 - p) / samples as f64).sqrt();
        let exact = match memo.as_mut() {
            Some(m) => Some(m.nabla(&sets, &o)?),
            None => None,
        };
        let z = exact
            .as_ref()
            .filter(|_| std_error > 0.0)
            .map(|e| (p - crate::rational::to_f64(e)) / std_error);
        out.push(DiagnosticTerm {
            antichain: b,
            estimate: p,
            std_error,
            exact,
            z,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn iu(lo: Rational, hi: Rational) -> IntervalUnion {
        IntervalUnion::interval(lo, hi).unwrap()
    }

    fn thirds() -> Covering<IntervalUnion> {
        Covering::new(
            iu(int(0), int(1)),
            vec![
                iu(int(0), rat(2, 3)),
                iu(rat(1, 3), int(1)),
                iu(rat(1, 3), rat(2, 3)),
            ],
        )
    }

    fn index_of(c: &Covering<IntervalUnion>, q: &IntervalUnion) -> usize {
        c.members.iter().position(|m| m == q).unwrap()
    }

    #[test]
    fn cover_validation() {
        assert_eq!(validate_cover(&thirds()), Ok(()));
        let mut broken = thirds();
        broken.members.retain(|m| *m != iu(rat(1, 3), rat(2, 3)));
        assert!(matches!(
            validate_cover(&broken),
            Err(CoverViolation::MissingIntersection(_, _))
        ));
        let single = Covering::new(iu(int(0), int(1)), vec![iu(int(0), int(1))]);
        assert_eq!(validate_cover(&single), Ok(()));
        let short = Covering::new(iu(int(0), int(2)), vec![iu(int(0), int(1))]);
        assert_eq!(validate_cover(&short), Err(CoverViolation::UnionMismatch));
    }

    #[test]
    fn openings_of_the_thirds_cover() {
        let c = thirds();
        let left = index_of(&c, &iu(int(0), rat(2, 3)));
        let right = index_of(&c, &iu(rat(1, 3), int(1)));
        let o = opening_of(&c, &[left, right]).unwrap();
        assert_eq!(o.set, iu(rat(1, 3), rat(2, 3)));
        assert!(o.is_opening);
        let o = opening_of(&c, &[left]).unwrap();
        assert_eq!(o.set, iu(rat(1, 3), int(1)));
        assert!(o.is_opening);
        // the middle third is ⋂G, so it is not in G'
        let mid = index_of(&c, &iu(rat(1, 3), rat(2, 3)));
        assert_eq!(c.core(), c.members[mid]);
        assert!(matches!(opening_of(&c, &[mid]), Err(LfvError::NotAnAntichain(_))));
        assert!(matches!(
            opening_of(&c, &[left, mid]),
            Err(LfvError::NotAnAntichain(_))
        ));
    }

    #[test]
    fn literal_lhs_examples() {
        let solid = SolidGrain {
            grain: iu(int(0), int(1)),
        };
        assert_eq!(lfv_lhs(&solid, &thirds(), 2).unwrap(), int(0));

        let single = Covering::new(iu(int(0), int(1)), vec![iu(int(0), int(1))]);
        let pois = IntervalPoisson {
            intensity: MeasureModel::uniform(int(0), int(1), int(1)).unwrap(),
            base: rat(1, 2),
            unit: rat(1, 3),
        };
        assert_eq!(lfv_lhs(&pois, &single, 3).unwrap(), rat(1, 8));

        let v = lfv_lhs(&pois, &thirds(), 2).unwrap();
        assert!(v > rat(1, 8) && v < int(1));

        let inexact = IntervalPoisson {
            unit: rat(1, 2),
            ..pois
        };
        assert!(matches!(
            lfv_lhs(&inexact, &thirds(), 2),
            Err(LfvError::EvaluatorNotExact(_))
        ));
    }

    #[test]
    fn both_forms_agree_on_finite_covers() {
        let phi = FinitePoisson {
            p: vec![rat(9, 10), rat(1, 2), rat(2, 3)],
        };
        for c in finite_cover_family(0b111).covers {
            for n in 0..4 {
                assert_eq!(
                    lfv_lhs(&phi, &c, n).unwrap(),
                    sublattice_bound(&phi, &c, n).unwrap(),
                    "{c:?} n={n}"
                );
            }
        }
    }

    #[test]
    fn lhs_is_nondecreasing_and_reaches_one() {
        let phi = FinitePoisson {
            p: vec![rat(9, 10); 4],
        };
        for c in finite_cover_family(0b1111).covers.iter().step_by(37) {
            let p = lfv_lhs_profile(&phi, c, 6).unwrap();
            assert!(p.windows(2).all(|w| w[0] <= w[1]));
            assert_eq!(p[4], int(1));
        }
    }

    #[test]
    fn finite_families() {
        let f = finite_cover_family(0b11);
        assert!(f.exhaustive);
        // {∅,ab}, {∅,a,ab}, {∅,b,ab}, {∅,a,b}, {∅,a,b,ab}
        assert_eq!(f.covers.len(), 5);
        assert!(f.covers.iter().all(|c| validate_cover(c).is_ok()));
        assert!(!finite_cover_family(0b11111).exhaustive);
    }

    #[test]
    fn ladder_sizes() {
        let fam = dyadic_ladder(&iu(int(0), int(1)), 16);
        let sizes: Vec<usize> = fam.covers.iter().map(|c| c.members.len()).collect();
        assert_eq!(sizes, vec![2, 4, 8, 16]);
        assert!(fam.covers.iter().all(|c| validate_cover(c).is_ok()));
    }

    #[test]
    fn certificates() {
        let opts = LfvOptions::default();
        let pois = FinitePoisson {
            p: vec![rat(9, 10); 5],
        };
        let cert = lfv_certificate(&pois, &[0b00011, 0b01111], &opts).unwrap();
        assert_eq!(cert.verdict, LfvVerdict::Pass);
        assert_eq!(cert.n_used, Some(2));

        let solid = SolidGrain { grain: 0b11111usize };
        let opts4 = LfvOptions {
            n_max: 4,
            ..LfvOptions::default()
        };
        let cert = lfv_certificate(&solid, &[0b11111], &opts4).unwrap();
        assert_eq!(cert.verdict, LfvVerdict::Fail);
        let ce = cert.counterexample.unwrap();
        assert_eq!(ce.value, int(0));
        assert_eq!(lfv_lhs(&solid, &ce.cover, 4).unwrap(), int(0));

        let pairs = FiniteMixture {
            outcomes: vec![(0b0011, rat(1, 2)), (0b1100, rat(1, 2))],
        };
        let cert = lfv_certificate(&pairs, &[0b1111], &opts).unwrap();
        assert_eq!(cert.verdict, LfvVerdict::Pass);
    }

    #[test]
    fn opening_pieces_are_disjoint_off_the_opening() {
        let c = thirds();
        for b in antichains(&c.members, &c.reduced(), 3) {
            let o = opening_unchecked(&c, &b);
            if o.is_opening {
                assert!(opening_partition(&c, &b, &o.set).0);
            }
        }
        // covering can fail: G = {∅, {a}, {a,b}}, B = {{a}} leaves b uncovered
        let g = Covering::new(0b11usize, vec![0, 0b01, 0b11]);
        let b = vec![g.members.iter().position(|&m| m == 0b01).unwrap()];
        let o = opening_of(&g, &b).unwrap();
        assert!(o.is_opening);
        assert_eq!(opening_partition(&g, &b, &o.set), (true, false));
    }

    #[test]
    fn hitting_form_matches() {
        struct Hitting<'a>(&'a FinitePoisson);
        impl AvoidanceEvaluator<usize> for Hitting<'_> {
            fn avoidance(&self, q: &usize) -> Result<Rational, LfvError> {
                Ok(Rational::one() - self.0.avoidance(q)?)
            }
        }
        let phi = FinitePoisson {
            p: vec![rat(1, 3), rat(3, 4), rat(1, 2)],
        };
        for c in finite_cover_family(0b111).covers {
            let w = phi.avoidance(&c.window).unwrap();
            let lhs = lfv_lhs(&phi, &c, 3).unwrap();
            // terms of Φ = 1 − φ: the |B| = 0 term is Φ(W), the rest flip sign
            let hit = lfv_lhs(&Hitting(&phi), &c, 3).unwrap();
            let big_phi_w = Rational::one() - &w;
            assert_eq!(lhs - &w, -(hit - big_phi_w));
        }
    }
}
