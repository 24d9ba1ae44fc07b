//! Compact sets on the line and on a product space, with exact measures.
//!
//! An [`IntervalUnion`] is a finite union of closed intervals with rational
//! endpoints. Under reverse inclusion these form a distributive lattice whose
//! meet is the union and whose join is the intersection; the empty union is
//! the top.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{format_rational, parse_rational, Rational};
use crate::setfun::try_difference;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpaceError {
    #[error("interval [{lo}, {hi}] has lo > hi")]
    Reversed { lo: String, hi: String },
    #[error("negative {what} {value}")]
    Negative { what: &'static str, value: String },
    #[error(transparent)]
    Parse(#[from] crate::rational::ParseRationalError),
    #[error("difference operator needs a nonempty index set")]
    EmptyIndexSet,
}

/// Closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self, SpaceError> {
        if lo > hi {
            return Err(SpaceError::Reversed {
                lo: format_rational(&lo),
                hi: format_rational(&hi),
            });
        }
        Ok(Interval { lo, hi })
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains_point(&self, p: &Rational) -> bool {
        &self.lo <= p && p <= &self.hi
    }

    fn overlap(&self, other: &Interval) -> Option<Interval> {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        (lo <= hi).then_some(Interval { lo, hi })
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", format_rational(&self.lo), format_rational(&self.hi))
    }
}

/// Normalized finite union of closed intervals: sorted, pairwise disjoint
/// and with strictly positive gaps.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "IntervalUnionRepr", into = "IntervalUnionRepr")]
pub struct IntervalUnion {
    intervals: Vec<Interval>,
}

#[derive(Serialize, Deserialize)]
struct IntervalUnionRepr {
    intervals: Vec<[String; 2]>,
}

impl TryFrom<IntervalUnionRepr> for IntervalUnion {
    type Error = SpaceError;

    fn try_from(r: IntervalUnionRepr) -> Result<Self, SpaceError> {
        let parts = r
            .intervals
            .iter()
            .map(|[a, b]| Interval::new(parse_rational(a)?, parse_rational(b)?))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(IntervalUnion::from_intervals(parts))
    }
}

impl From<IntervalUnion> for IntervalUnionRepr {
    fn from(u: IntervalUnion) -> Self {
        IntervalUnionRepr {
            intervals: u
                .intervals
                .iter()
                .map(|i| [format_rational(&i.lo), format_rational(&i.hi)])
                .collect(),
        }
    }
}

impl IntervalUnion {
    pub fn empty() -> Self {
        IntervalUnion::default()
    }

    pub fn from_intervals(mut parts: Vec<Interval>) -> Self {
        parts.sort();
        let mut out: Vec<Interval> = Vec::with_capacity(parts.len());
        for p in parts {
            match out.last_mut() {
                // touching intervals merge: gaps must be strictly positive
                Some(last) if p.lo <= last.hi => {
                    if p.hi > last.hi {
                        last.hi = p.hi;
                    }
                }
                _ => out.push(p),
            }
        }
        IntervalUnion { intervals: out }
    }

    pub fn interval(lo: Rational, hi: Rational) -> Result<Self, SpaceError> {
        Ok(IntervalUnion {
            intervals: vec![Interval::new(lo, hi)?],
        })
    }

    /// Convenience constructor from `(lo, hi)` pairs.
    pub fn from_pairs(pairs: &[(Rational, Rational)]) -> Result<Self, SpaceError> {
        let parts = pairs
            .iter()
            .map(|(a, b)| Interval::new(a.clone(), b.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_intervals(parts))
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn union(&self, other: &IntervalUnion) -> IntervalUnion {
        let mut parts = self.intervals.clone();
        parts.extend(other.intervals.iter().cloned());
        Self::from_intervals(parts)
    }

    pub fn intersect(&self, other: &IntervalUnion) -> IntervalUnion {
        let (a, b) = (&self.intervals, &other.intervals);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            if let Some(o) = a[i].overlap(&b[j]) {
                out.push(o);
            }
            if a[i].hi < b[j].hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        // pieces of normalized inputs are already separated
        IntervalUnion { intervals: out }
    }

    /// `self ⊆ other`.
    pub fn is_subset(&self, other: &IntervalUnion) -> bool {
        self.intervals.iter().all(|p| {
            other
                .intervals
                .iter()
                .any(|q| q.lo <= p.lo && p.hi <= q.hi)
        })
    }

    /// Lebesgue measure.
    pub fn length(&self) -> Rational {
        self.intervals
            .iter()
            .fold(Rational::zero(), |acc, i| acc + i.length())
    }

    pub fn contains_point(&self, p: &Rational) -> bool {
        self.intervals.iter().any(|i| i.contains_point(p))
    }

    pub fn hull(&self) -> Option<Interval> {
        Some(Interval {
            lo: self.intervals.first()?.lo.clone(),
            hi: self.intervals.last()?.hi.clone(),
        })
    }
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return f.write_str("∅");
        }
        for (k, i) in self.intervals.iter().enumerate() {
            if k > 0 {
                f.write_str(" ∪ ")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

pub fn iu_union(a: &IntervalUnion, b: &IntervalUnion) -> IntervalUnion {
    a.union(b)
}

pub fn iu_intersect(a: &IntervalUnion, b: &IntervalUnion) -> IntervalUnion {
    a.intersect(b)
}

/// `e ≪ f`: `f` lies in the interior of `e`, taken relative to the ambient
/// segment when one is given (its endpoints then count as interior points).
pub fn iu_way_below(e: &IntervalUnion, f: &IntervalUnion, ambient: Option<&Interval>) -> bool {
    f.intervals.iter().all(|p| {
        e.intervals.iter().any(|q| {
            let left = q.lo < p.lo || ambient.is_some_and(|a| q.lo == a.lo && q.lo == p.lo);
            let right = p.hi < q.hi || ambient.is_some_and(|a| q.hi == a.hi && q.hi == p.hi);
            left && right
        })
    })
}

/// Piecewise-constant density plus point atoms.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "MeasureModelRepr", into = "MeasureModelRepr")]
pub struct MeasureModel {
    pieces: Vec<(Interval, Rational)>,
    atoms: BTreeMap<Rational, Rational>,
}

#[derive(Serialize, Deserialize)]
struct PieceRepr {
    interval: [String; 2],
    height: String,
}

#[derive(Serialize, Deserialize)]
struct MeasureModelRepr {
    #[serde(default)]
    pieces: Vec<PieceRepr>,
    #[serde(default)]
    atoms: BTreeMap<String, String>,
}

impl TryFrom<MeasureModelRepr> for MeasureModel {
    type Error = SpaceError;

    fn try_from(r: MeasureModelRepr) -> Result<Self, SpaceError> {
        let pieces = r
            .pieces
            .iter()
            .map(|p| {
                let iv = Interval::new(
                    parse_rational(&p.interval[0])?,
                    parse_rational(&p.interval[1])?,
                )?;
                Ok((iv, parse_rational(&p.height)?))
            })
            .collect::<Result<Vec<_>, SpaceError>>()?;
        let atoms = r
            .atoms
            .iter()
            .map(|(k, v)| Ok((parse_rational(k)?, parse_rational(v)?)))
            .collect::<Result<Vec<_>, SpaceError>>()?;
        MeasureModel::new(pieces, atoms)
    }
}

impl From<MeasureModel> for MeasureModelRepr {
    fn from(m: MeasureModel) -> Self {
        MeasureModelRepr {
            pieces: m
                .pieces
                .iter()
                .map(|(i, h)| PieceRepr {
                    interval: [format_rational(&i.lo), format_rational(&i.hi)],
                    height: format_rational(h),
                })
                .collect(),
            atoms: m
                .atoms
                .iter()
                .map(|(p, w)| (format_rational(p), format_rational(w)))
                .collect(),
        }
    }
}

impl MeasureModel {
    pub fn new(
        pieces: Vec<(Interval, Rational)>,
        atoms: impl IntoIterator<Item = (Rational, Rational)>,
    ) -> Result<Self, SpaceError> {
        if let Some((_, h)) = pieces.iter().find(|(_, h)| h.is_negative()) {
            return Err(SpaceError::Negative {
                what: "density height",
                value: format_rational(h),
            });
        }
        let mut map = BTreeMap::new();
        for (p, w) in atoms {
            if w.is_negative() {
                return Err(SpaceError::Negative {
                    what: "atom mass",
                    value: format_rational(&w),
                });
            }
            if !w.is_zero() {
                *map.entry(p).or_insert_with(Rational::zero) += w;
            }
        }
        Ok(MeasureModel { pieces, atoms: map })
    }

    /// Lebesgue measure restricted to `[lo, hi]`, scaled by `height`.
    pub fn uniform(lo: Rational, hi: Rational, height: Rational) -> Result<Self, SpaceError> {
        Self::new(vec![(Interval::new(lo, hi)?, height)], [])
    }

    pub fn pieces(&self) -> &[(Interval, Rational)] {
        &self.pieces
    }

    pub fn atoms(&self) -> &BTreeMap<Rational, Rational> {
        &self.atoms
    }

    pub fn is_atomless(&self) -> bool {
        self.atoms.is_empty()
    }
}

/// `m(q)`: density overlaps times heights plus the atoms inside `q`.
pub fn measure_of(m: &MeasureModel, q: &IntervalUnion) -> Rational {
    let mut total = Rational::zero();
    for (piece, h) in &m.pieces {
        for i in &q.intervals {
            if let Some(o) = piece.overlap(i) {
                total += o.length() * h;
            }
        }
    }
    for (p, w) in &m.atoms {
        if q.contains_point(p) {
            total += w;
        }
    }
    total
}

/// A compact subset of `R0 × [0,1]` with `R0` discrete: finitely many
/// nonempty slices indexed by labels of `R0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(from = "BTreeMap<String, IntervalUnion>", into = "BTreeMap<String, IntervalUnion>")]
pub struct ProductCompact {
    slices: BTreeMap<String, IntervalUnion>,
}

impl From<BTreeMap<String, IntervalUnion>> for ProductCompact {
    fn from(mut slices: BTreeMap<String, IntervalUnion>) -> Self {
        slices.retain(|_, s| !s.is_empty());
        ProductCompact { slices }
    }
}

impl From<ProductCompact> for BTreeMap<String, IntervalUnion> {
    fn from(p: ProductCompact) -> Self {
        p.slices
    }
}

impl ProductCompact {
    pub fn new(slices: impl IntoIterator<Item = (String, IntervalUnion)>) -> Self {
        slices.into_iter().collect::<BTreeMap<_, _>>().into()
    }

    pub fn slices(&self) -> &BTreeMap<String, IntervalUnion> {
        &self.slices
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    /// Slice-wise union: the meet under reverse inclusion.
    pub fn union(&self, other: &ProductCompact) -> ProductCompact {
        let mut slices = self.slices.clone();
        for (k, s) in &other.slices {
            let merged = match slices.get(k) {
                Some(t) => t.union(s),
                None => s.clone(),
            };
            slices.insert(k.clone(), merged);
        }
        ProductCompact { slices }
    }

    pub fn intersect(&self, other: &ProductCompact) -> ProductCompact {
        ProductCompact::new(self.slices.iter().filter_map(|(k, s)| {
            other.slices.get(k).map(|t| (k.clone(), s.intersect(t)))
        }))
    }

    /// Projection onto the second factor.
    pub fn project(&self) -> IntervalUnion {
        self.slices
            .values()
            .fold(IntervalUnion::empty(), |acc, s| acc.union(s))
    }
}

/// `Φ(Q) = ν(π1(Q))`.
pub fn projection_capacity(q: &ProductCompact, nu: &MeasureModel) -> Rational {
    measure_of(nu, &q.project())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NablaIdentity {
    #[serde(with = "crate::rational::serde_str")]
    pub lhs: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub rhs: Rational,
}

/// `∇_{Q1..Qn} Φ(Q)` expanded over the product lattice, next to the closed
/// form `ν(π1 Q) − ν(π1 Q ∪ ⋂ π1 Qi)`.
pub fn projection_nabla_identity(
    q: &ProductCompact,
    qs: &[ProductCompact],
    nu: &MeasureModel,
) -> Result<NablaIdentity, SpaceError> {
    if qs.is_empty() {
        return Err(SpaceError::EmptyIndexSet);
    }
    let lhs = try_difference::<_, SpaceError>(
        qs,
        q,
        |a, b| a.union(b),
        |x| Ok(projection_capacity(x, nu)),
    )?;
    let pq = q.project();
    let common = qs[1..]
        .iter()
        .fold(qs[0].project(), |acc, qi| acc.intersect(&qi.project()));
    let rhs = measure_of(nu, &pq) - measure_of(nu, &pq.union(&common));
    Ok(NablaIdentity { lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn iu(pairs: &[(i64, i64, i64, i64)]) -> IntervalUnion {
        IntervalUnion::from_pairs(
            &pairs
                .iter()
                .map(|&(a, b, c, d)| (rat(a, b), rat(c, d)))
                .collect::<Vec<_>>(),
        )
        .unwrap()
    }

    fn unit() -> MeasureModel {
        MeasureModel::uniform(int(0), int(1), int(1)).unwrap()
    }

    #[test]
    fn unions_and_intersections() {
        assert_eq!(iu(&[(0, 1, 1, 1)]).union(&iu(&[(2, 1, 3, 1)])).intervals().len(), 2);
        assert_eq!(iu(&[(0, 1, 1, 1)]).union(&iu(&[(1, 1, 2, 1)])), iu(&[(0, 1, 2, 1)]));
        assert_eq!(IntervalUnion::empty().union(&iu(&[(0, 1, 1, 1)])), iu(&[(0, 1, 1, 1)]));
        assert_eq!(iu(&[(0, 1, 2, 1)]).intersect(&iu(&[(1, 1, 3, 1)])), iu(&[(1, 1, 2, 1)]));
        assert!(iu(&[(0, 1, 1, 1)]).intersect(&iu(&[(2, 1, 3, 1)])).is_empty());
        let a = iu(&[(0, 1, 1, 3), (1, 2, 1, 1)]);
        assert_eq!(a.intersect(&a), a);
    }

    #[test]
    fn way_below_cases() {
        let e = iu(&[(0, 1, 1, 1)]);
        assert!(iu_way_below(&e, &iu(&[(1, 4, 1, 2)]), None));
        let f = iu(&[(0, 1, 1, 2)]);
        let inside = Interval::new(int(-1), int(2)).unwrap();
        let flush = Interval::new(int(0), int(2)).unwrap();
        assert!(!iu_way_below(&e, &f, Some(&inside)));
        // 0 is an endpoint of the ambient segment, so it is interior there
        assert!(iu_way_below(&e, &f, Some(&flush)));
        assert!(iu_way_below(&IntervalUnion::empty(), &IntervalUnion::empty(), None));
    }

    #[test]
    fn measures() {
        assert_eq!(measure_of(&unit(), &iu(&[(1, 4, 3, 4)])), rat(1, 2));
        let m = MeasureModel::new(
            vec![(Interval::new(int(0), int(1)).unwrap(), int(1))],
            [(int(0), rat(1, 2))],
        )
        .unwrap();
        assert_eq!(measure_of(&m, &iu(&[(0, 1, 1, 10)])), rat(1, 2) + rat(1, 10));
        assert_eq!(measure_of(&m, &IntervalUnion::empty()), int(0));
        assert!(MeasureModel::uniform(int(0), int(1), int(-1)).is_err());
    }

    #[test]
    fn projection_examples() {
        let q = ProductCompact::new([
            ("0".to_string(), iu(&[(0, 1, 1, 2)])),
            ("1".to_string(), iu(&[(1, 4, 3, 4)])),
        ]);
        assert_eq!(projection_capacity(&q, &unit()), rat(3, 4));
        assert_eq!(projection_capacity(&ProductCompact::default(), &unit()), int(0));
        let q1 = ProductCompact::new([("0".to_string(), iu(&[(0, 1, 1, 1)]))]);
        assert_eq!(projection_capacity(&q1, &unit()), int(1));

        let r = projection_nabla_identity(&q, &[q1], &unit()).unwrap();
        assert_eq!((r.lhs.clone(), r.rhs.clone()), (rat(-1, 4), rat(-1, 4)));

        let inner = ProductCompact::new([("5".to_string(), iu(&[(1, 8, 1, 4)]))]);
        let r = projection_nabla_identity(&q, &[inner], &unit()).unwrap();
        assert_eq!((r.lhs, r.rhs), (int(0), int(0)));

        let d1 = ProductCompact::new([("a".to_string(), iu(&[(0, 1, 1, 10)]))]);
        let d2 = ProductCompact::new([("b".to_string(), iu(&[(9, 10, 1, 1)]))]);
        let r = projection_nabla_identity(&q, &[d1, d2], &unit()).unwrap();
        assert_eq!((r.lhs, r.rhs), (int(0), int(0)));
    }

    #[test]
    fn json_formats() {
        let a = iu(&[(0, 1, 1, 3), (1, 2, 1, 1)]);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"intervals":[["0/1","1/3"],["1/2","1/1"]]}"#);
        assert_eq!(serde_json::from_str::<IntervalUnion>(&s).unwrap(), a);
        let m: MeasureModel = serde_json::from_str(
            r#"{"pieces":[{"interval":["0","1"],"height":"1"}],"atoms":{"0":"1/2"}}"#,
        )
        .unwrap();
        assert_eq!(measure_of(&m, &iu(&[(0, 1, 0, 1)])), rat(1, 2));
        assert!(serde_json::from_str::<IntervalUnion>(r#"{"intervals":[["1","0"]]}"#).is_err());
    }
}
