//! Exact capacity/measure representations on finite lattices.
//!
//! Every filter of a finite lattice is principal, so a measure on filters is
//! a weight function on elements: `z` stands for `⟨z⟩*`. On the compact sets
//! of a finite discrete space the filter `⟨Q⟩*` corresponds to the closed set
//! `R ∖ Q`.

use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::lattice::{
    antichains_of, boundary_antichain, structure_report, Elem, FiniteLattice, LatticeError,
    Sublattice,
};
use crate::measure::{Carrier, CarrierKind, DiscreteMeasure};
use crate::rational::Rational;
use crate::setfun::{
    classify, difference, ClassId, ClassReport, Direction, SetFunction, SetFunctionError,
};

/// Closed sets are indexed by bitmask; larger ground sets are refused.
pub const MAX_GROUND: usize = 24;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChoquetError {
    #[error("set function is not {}: witness {:?}", .0.class_queried, .0.witness)]
    ClassificationFailed(Box<ClassReport>),
    #[error(transparent)]
    SetFunction(#[from] SetFunctionError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("ground set of {0} points exceeds the limit of {MAX_GROUND}")]
    GroundTooLarge(usize),
    #[error("measure carrier is {found:?}, expected {expected:?}")]
    WrongCarrier {
        expected: CarrierKind,
        found: CarrierKind,
    },
    #[error("{0}")]
    InvalidMeasure(String),
}

/// Which representation to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// `f(x) = μ{V filter : x ∈ V}` for completely monotone `f`; carrier all
    /// filters, the atom at `⟨0̂⟩*` is `f(0̂)`.
    Monotone,
    /// `Φ(x) = λ{V ≠ ⟨0̂⟩* : x ∉ V}` for completely alternating `Φ`.
    Alternating,
    /// `Φ(x) = Λ{z ≠ 1̂ : z ≥ x}` for completely `∨`-monotone decreasing `Φ`.
    Containment,
    /// `φ(x) = Λ(0̂) + Λ{z ≠ 1̂ : z ≱ x}` for completely `∨`-alternating
    /// increasing `φ`, with an extra bottom `0̂` adjoined to the carrier.
    VeeAlternating,
}

impl Mode {
    pub const ALL: [Mode; 4] = [
        Mode::Monotone,
        Mode::Alternating,
        Mode::Containment,
        Mode::VeeAlternating,
    ];

    pub fn required_class(self) -> ClassId {
        match self {
            Mode::Monotone => ClassId::CompletelyMonotone,
            Mode::Alternating => ClassId::CompletelyAlternating,
            Mode::Containment => ClassId::CompletelyVeeMonotone,
            Mode::VeeAlternating => ClassId::CompletelyVeeAlternating,
        }
    }

    pub fn direction(self) -> Direction {
        match self {
            Mode::Monotone | Mode::VeeAlternating => Direction::Increasing,
            Mode::Alternating | Mode::Containment => Direction::Decreasing,
        }
    }

    pub fn carrier_kind(self) -> CarrierKind {
        match self {
            Mode::Monotone | Mode::Alternating => CarrierKind::Filters,
            Mode::Containment | Mode::VeeAlternating => CarrierKind::Elements,
        }
    }

    /// The carrier of the mode's measure on `l`.
    pub fn carrier(self, l: &FiniteLattice) -> Vec<Carrier> {
        match self {
            Mode::Monotone => l.elements().map(Carrier::Index).collect(),
            Mode::Alternating => l
                .elements()
                .filter(|&z| z != l.bottom())
                .map(Carrier::Index)
                .collect(),
            Mode::Containment => l
                .elements()
                .filter(|&z| z != l.top())
                .map(Carrier::Index)
                .collect(),
            Mode::VeeAlternating => std::iter::once(Carrier::AdjoinedBottom)
                .chain(l.elements().filter(|&z| z != l.top()).map(Carrier::Index))
                .collect(),
        }
    }

    /// Whether carrier point `c` is counted in the value at `x`.
    pub fn counts(self, l: &FiniteLattice, c: Carrier, x: Elem) -> bool {
        match (self, c) {
            (Mode::VeeAlternating, Carrier::AdjoinedBottom) => true,
            (_, Carrier::AdjoinedBottom) => false,
            (Mode::Monotone, Carrier::Index(z)) => l.leq(z, x),
            (Mode::Alternating, Carrier::Index(z)) => z != l.bottom() && !l.leq(z, x),
            (Mode::Containment, Carrier::Index(z)) => z != l.top() && l.leq(x, z),
            (Mode::VeeAlternating, Carrier::Index(z)) => z != l.top() && !l.leq(x, z),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Monotone => "monotone",
            Mode::Alternating => "alternating",
            Mode::Containment => "containment",
            Mode::VeeAlternating => "vee_alternating",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Mode::ALL
            .into_iter()
            .find(|m| m.to_string() == s)
            .ok_or_else(|| format!("unknown mode {s:?}"))
    }
}

/// Every filter of `l`, listed as the principal filter `⟨z⟩*` for each `z`.
pub fn enumerate_filters(l: &FiniteLattice) -> Vec<Vec<Elem>> {
    l.elements().map(|z| l.up_set(z)).collect()
}

/// Unique nonnegative measure representing `f` in the given mode.
pub fn choquet_represent(f: &SetFunction, mode: Mode) -> Result<DiscreteMeasure, ChoquetError> {
    let report = classify(f, mode.required_class())?;
    if !report.holds {
        return Err(ChoquetError::ClassificationFailed(Box::new(report)));
    }
    let l = f.lattice();
    let v = f.values();
    let mut m = DiscreteMeasure::new(mode.carrier_kind(), mode.carrier(l));
    match mode {
        Mode::Monotone => {
            for (c, w) in f.mobius_inverse().weights() {
                m.add(c, w.clone());
            }
        }
        Mode::Alternating => {
            let total = &v[l.bottom()];
            let g: Vec<Rational> = v.iter().map(|y| total - y).collect();
            for (x, w) in mobius(l, &g, false) {
                if x != l.bottom() {
                    m.add(Carrier::Index(x), w);
                }
            }
        }
        Mode::Containment => {
            for (x, w) in mobius(l, v, true) {
                if x != l.top() {
                    m.add(Carrier::Index(x), w);
                }
            }
        }
        Mode::VeeAlternating => {
            let total = &v[l.top()];
            let g: Vec<Rational> = v.iter().map(|y| total - y).collect();
            for (x, w) in mobius(l, &g, true) {
                if x != l.top() {
                    m.add(Carrier::Index(x), w);
                }
            }
            m.add(Carrier::AdjoinedBottom, v[l.bottom()].clone());
        }
    }
    debug_assert!(m.is_nonnegative());
    Ok(m)
}

fn mobius(l: &FiniteLattice, values: &[Rational], dual: bool) -> Vec<(Elem, Rational)> {
    l.elements()
        .map(|x| {
            let covers = if dual { l.upper_covers(x) } else { l.lower_covers(x) };
            let w = if dual {
                difference(&covers, &x, |p, q| l.join(*p, *q), |z| values[*z].clone())
            } else {
                difference(&covers, &x, |p, q| l.meet(*p, *q), |z| values[*z].clone())
            };
            (x, w)
        })
        .collect()
}

/// Forward evaluation of a mode identity: the raw value at every element.
pub fn evaluate(m: &DiscreteMeasure, l: &FiniteLattice, mode: Mode) -> Vec<Rational> {
    l.elements()
        .map(|x| m.mass_where(|c| mode.counts(l, c, x)))
        .collect()
}

/// Forward evaluation wrapped as a set function (increasing functions are
/// renormalized by the constructor).
pub fn evaluate_set_function(
    m: &DiscreteMeasure,
    l: Arc<FiniteLattice>,
    mode: Mode,
) -> Result<SetFunction, ChoquetError> {
    if !m.is_nonnegative() {
        return Err(ChoquetError::InvalidMeasure("negative weight".into()));
    }
    let values = evaluate(m, &l, mode);
    Ok(SetFunction::new(l, values, mode.direction())?)
}

/// The compact sets of a finite discrete space `R` under reverse inclusion,
/// with closed sets as the filter dictionary.
#[derive(Debug, Clone)]
pub struct FiniteSpaceModel {
    ground: Vec<String>,
    lattice: Arc<FiniteLattice>,
}

impl FiniteSpaceModel {
    pub fn new(ground_size: usize) -> Result<Self, ChoquetError> {
        let names = (0..ground_size).map(crate::lattice::ground_name).collect();
        Self::with_names(names)
    }

    pub fn with_names(ground: Vec<String>) -> Result<Self, ChoquetError> {
        let m = ground.len();
        if m > MAX_GROUND {
            return Err(ChoquetError::GroundTooLarge(m));
        }
        let size = 1usize << m;
        if size > crate::lattice::DEFAULT_MAX_ELEMENTS {
            return Err(LatticeError::SizeExceeded {
                size,
                cap: crate::lattice::DEFAULT_MAX_ELEMENTS,
            }
            .into());
        }
        Ok(FiniteSpaceModel {
            ground,
            lattice: Arc::new(FiniteLattice::powerset_reverse(m)),
        })
    }

    pub fn ground(&self) -> &[String] {
        &self.ground
    }

    pub fn ground_size(&self) -> usize {
        self.ground.len()
    }

    pub fn lattice(&self) -> &Arc<FiniteLattice> {
        &self.lattice
    }

    pub fn full_mask(&self) -> usize {
        (1usize << self.ground.len()) - 1
    }

    /// Closed set dual to the filter `⟨q⟩*`.
    pub fn closed_set_of_filter(&self, q: usize) -> usize {
        self.full_mask() & !q
    }

    /// Re-indexes a filter measure by closed sets.
    pub fn filters_to_closed_sets(&self, m: &DiscreteMeasure) -> Result<DiscreteMeasure, ChoquetError> {
        if m.kind != CarrierKind::Filters {
            return Err(ChoquetError::WrongCarrier {
                expected: CarrierKind::Filters,
                found: m.kind,
            });
        }
        let map = |c: Carrier| match c {
            Carrier::Index(q) => Carrier::Index(self.closed_set_of_filter(q)),
            other => other,
        };
        Ok(DiscreteMeasure::from_weights(
            CarrierKind::ClosedSets,
            m.carrier.iter().map(|&c| map(c)).collect(),
            m.weights().map(|(c, w)| (map(c), w.clone())),
        ))
    }

    pub fn closed_sets_to_filters(&self, m: &DiscreteMeasure) -> Result<DiscreteMeasure, ChoquetError> {
        if m.kind != CarrierKind::ClosedSets {
            return Err(ChoquetError::WrongCarrier {
                expected: CarrierKind::ClosedSets,
                found: m.kind,
            });
        }
        let map = |c: Carrier| match c {
            Carrier::Index(f) => Carrier::Index(self.full_mask() & !f),
            other => other,
        };
        Ok(DiscreteMeasure::from_weights(
            CarrierKind::Filters,
            m.carrier.iter().map(|&c| map(c)).collect(),
            m.weights().map(|(c, w)| (map(c), w.clone())),
        ))
    }

    /// Avoidance functional `φ(Q) = λ{F : F ∩ Q = ∅}` of a closed-set measure
    /// with total mass 1 (a random closed set).
    pub fn avoidance(&self, m: &DiscreteMeasure) -> Result<SetFunction, ChoquetError> {
        self.closed_set_functional(m, Direction::Increasing, |f, q| f & q == 0)
    }

    /// Hitting functional `Φ(Q) = λ{F ≠ ∅ : F ∩ Q ≠ ∅}`.
    pub fn hitting(&self, m: &DiscreteMeasure) -> Result<SetFunction, ChoquetError> {
        self.closed_set_functional(m, Direction::Decreasing, |f, q| f & q != 0)
    }

    fn closed_set_functional(
        &self,
        m: &DiscreteMeasure,
        dir: Direction,
        hit: impl Fn(usize, usize) -> bool,
    ) -> Result<SetFunction, ChoquetError> {
        if m.kind != CarrierKind::ClosedSets {
            return Err(ChoquetError::WrongCarrier {
                expected: CarrierKind::ClosedSets,
                found: m.kind,
            });
        }
        if !m.is_nonnegative() {
            return Err(ChoquetError::InvalidMeasure("negative weight".into()));
        }
        let values = self
            .lattice
            .elements()
            .map(|q| {
                m.mass_where(|c| match c {
                    Carrier::Index(f) => hit(f, q),
                    Carrier::AdjoinedBottom => false,
                })
            })
            .collect();
        Ok(SetFunction::new(self.lattice.clone(), values, dir)?)
    }
}

/// For each `x`, the filters `⟨z⟩*` containing `x` and missing the boundary
/// antichain of `x`: `z ≤ x` and `z ≰ b` for every `b ∈ B^x`.
pub fn partition_classes(f: &FiniteLattice) -> Result<Vec<Vec<Elem>>, ChoquetError> {
    if !structure_report(f).is_distributive {
        return Err(LatticeError::NotDistributive.into());
    }
    Ok(f.elements()
        .map(|x| {
            let b = boundary_antichain(f, x);
            f.elements()
                .filter(|&z| f.leq(z, x) && !b.iter().any(|&w| f.leq(z, w)))
                .collect()
        })
        .collect())
}

/// `⋀(J ∩ ⟨z⟩*)` with `J` the irreducibles: the class that `⟨z⟩*` falls in.
pub fn class_of_filter(f: &FiniteLattice, irreducibles: &[Elem], z: Elem) -> Elem {
    f.meet_all(irreducibles.iter().copied().filter(|&j| f.leq(z, j)))
}

/// Largest closed-set cardinality carrying positive weight (0 for the zero
/// measure).
pub fn support_order(m: &DiscreteMeasure, model: &FiniteSpaceModel) -> Result<usize, ChoquetError> {
    if m.kind != CarrierKind::ClosedSets {
        return Err(ChoquetError::WrongCarrier {
            expected: CarrierKind::ClosedSets,
            found: m.kind,
        });
    }
    let mut k = 0;
    for (c, w) in m.weights() {
        match c {
            Carrier::Index(s) if s <= model.full_mask() => {
                if w.is_positive() {
                    k = k.max(s.count_ones() as usize);
                }
            }
            _ => return Err(ChoquetError::InvalidMeasure(format!("bad carrier point {c:?}"))),
        }
    }
    Ok(k)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VapproxBound {
    #[serde(with = "crate::rational::serde_str")]
    pub lower: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub upper_defect: Rational,
}

/// Two-sided estimate of the mass of `P_k` from the values on a finite
/// sublattice `F`: `lower` sums the partition classes whose boundary
/// antichain has at most `k` elements, `upper_defect` sums `∇_B f(o_B)` over
/// the `(k+1)`-antichains `B` of the primes of `F`.
pub fn vapprox_bound(f: &SetFunction, sub: &Sublattice, k: usize) -> Result<VapproxBound, ChoquetError> {
    let report = classify(f, ClassId::CompletelyMonotone)?;
    if !report.holds {
        return Err(ChoquetError::ClassificationFailed(Box::new(report)));
    }
    let fl = &sub.lattice;
    let structure = structure_report(fl);
    if !structure.is_distributive {
        return Err(LatticeError::NotDistributive.into());
    }
    let parent = f.lattice();
    let v = f.values();
    let val = |z: &Elem| v[sub.to_parent(*z)].clone();
    let meet = |p: &Elem, q: &Elem| fl.meet(*p, *q);

    let mut lower = Rational::zero();
    for x in fl.elements() {
        let b = boundary_antichain(fl, x);
        if b.len() <= k {
            lower += difference(&b, &x, meet, val);
        }
    }
    let mut upper_defect = Rational::zero();
    for b in antichains_of(fl, &structure.primes, k + 1).filter(|b| b.len() == k + 1) {
        let o = crate::setfun::pairwise_join_meet(fl, &b);
        upper_defect += difference(&b, &o, meet, val);
    }
    debug_assert!(sub.embedding.iter().all(|&e| e < parent.len()));
    Ok(VapproxBound {
        lower,
        upper_defect,
    })
}

/// `m(⟨x⟩ ∖ ⟨A⟩)` for a measure on elements, i.e. the mass of
/// `{z ≤ x : z ≰ a for all a ∈ A}`.
pub fn mass_below_outside(m: &DiscreteMeasure, l: &FiniteLattice, x: Elem, a: &[Elem]) -> Rational {
    m.mass_where(|c| match c {
        Carrier::Index(z) => l.leq(z, x) && !a.iter().any(|&w| l.leq(z, w)),
        Carrier::AdjoinedBottom => false,
    })
}

/// Total mass helper for normalizing random measures.
pub fn normalized(m: &DiscreteMeasure) -> DiscreteMeasure {
    let t = m.total();
    if t.is_zero() || t.is_one() {
        return m.clone();
    }
    DiscreteMeasure::from_weights(m.kind, m.carrier.clone(), m.weights().map(|(c, w)| (c, w / &t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::sublattice_generated;
    use crate::rational::{int, rat};

    fn closed(m: &FiniteSpaceModel, w: &[(usize, Rational)]) -> DiscreteMeasure {
        DiscreteMeasure::from_weights(
            CarrierKind::ClosedSets,
            (1..=m.full_mask()).map(Carrier::Index).collect(),
            w.iter().map(|(c, r)| (Carrier::Index(*c), r.clone())),
        )
    }

    #[test]
    fn filters_of_small_lattices() {
        let c3 = FiniteLattice::chain(3);
        assert_eq!(enumerate_filters(&c3), vec![vec![0, 1, 2], vec![1, 2], vec![2]]);
        assert_eq!(enumerate_filters(&FiniteLattice::boolean(2)).len(), 4);
        let model = FiniteSpaceModel::new(1).unwrap();
        let closed: Vec<usize> = (0..2).map(|q| model.closed_set_of_filter(q)).collect();
        assert_eq!(closed, vec![1, 0]);
    }

    #[test]
    fn alternating_point_hitting() {
        let model = FiniteSpaceModel::new(2).unwrap();
        // Φ(Q) = 1 if a ∈ Q
        let phi = SetFunction::from_fn(model.lattice().clone(), Direction::Decreasing, |q| {
            int((q & 1) as i64)
        })
        .unwrap();
        let lam = choquet_represent(&phi, Mode::Alternating).unwrap();
        let closed = model.filters_to_closed_sets(&lam).unwrap();
        assert_eq!(closed.support(), vec![Carrier::Index(0b01)]);
        assert_eq!(closed.index_weight(0b01), int(1));
    }

    #[test]
    fn monotone_uniform_singleton() {
        let model = FiniteSpaceModel::new(2).unwrap();
        let phi = model
            .avoidance(&closed(&model, &[(0b01, rat(1, 2)), (0b10, rat(1, 2))]))
            .unwrap();
        assert_eq!(phi.values(), &[int(1), rat(1, 2), rat(1, 2), int(0)]);
        let mu = model
            .filters_to_closed_sets(&choquet_represent(&phi, Mode::Monotone).unwrap())
            .unwrap();
        assert_eq!(mu.index_weight(0b01), rat(1, 2));
        assert_eq!(mu.index_weight(0b10), rat(1, 2));
        assert_eq!(mu.total(), int(1));
    }

    #[test]
    fn containment_recovers_two_atoms() {
        let l = FiniteSpaceModel::new(2).unwrap().lattice().clone();
        let phi = SetFunction::new(l.clone(), vec![int(0), int(1), int(0), int(2)], Direction::Decreasing)
            .unwrap();
        let lam = choquet_represent(&phi, Mode::Containment).unwrap();
        let expected = DiscreteMeasure::from_weights(
            CarrierKind::Elements,
            vec![],
            [(Carrier::Index(0b01), int(1)), (Carrier::Index(0b11), int(1))],
        );
        assert_eq!(lam, expected);
        assert_eq!(evaluate(&lam, &l, Mode::Containment), phi.values());
    }

    #[test]
    fn vee_alternating_round_trip() {
        let l = Arc::new(FiniteLattice::chain(3));
        let m = DiscreteMeasure::from_weights(
            CarrierKind::Elements,
            Mode::VeeAlternating.carrier(&l),
            [
                (Carrier::AdjoinedBottom, rat(1, 5)),
                (Carrier::Index(0), rat(1, 2)),
                (Carrier::Index(1), rat(3, 10)),
            ],
        );
        let f = evaluate_set_function(&m, l, Mode::VeeAlternating).unwrap();
        assert_eq!(choquet_represent(&f, Mode::VeeAlternating).unwrap(), m);
    }

    #[test]
    fn wrong_class_is_reported() {
        let f = SetFunction::new(
            Arc::new(FiniteLattice::boolean(2)),
            vec![int(0), int(1), int(1), int(1)],
            Direction::Increasing,
        )
        .unwrap();
        assert!(matches!(
            choquet_represent(&f, Mode::Monotone),
            Err(ChoquetError::ClassificationFailed(_))
        ));
    }

    #[test]
    fn partitions_of_small_lattices() {
        for l in [FiniteLattice::chain(1), FiniteLattice::chain(3), FiniteLattice::boolean(2)] {
            let classes = partition_classes(&l).unwrap();
            let mut seen = vec![0; l.len()];
            for c in &classes {
                for &z in c {
                    seen[z] += 1;
                }
            }
            assert!(seen.iter().all(|&s| s == 1));
            let j = structure_report(&l).irreducibles;
            for (x, c) in classes.iter().enumerate() {
                for &z in c {
                    assert_eq!(class_of_filter(&l, &j, z), x);
                }
            }
        }
        let m3 = FiniteLattice::build(
            ["0", "a", "b", "c", "1"].iter().map(|s| s.to_string()).collect(),
            &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)],
        )
        .unwrap();
        assert!(partition_classes(&m3).is_err());
    }

    #[test]
    fn support_orders() {
        let model = FiniteSpaceModel::new(3).unwrap();
        assert_eq!(support_order(&closed(&model, &[(0b011, int(1))]), &model).unwrap(), 2);
        assert_eq!(
            support_order(&closed(&model, &[(0b001, rat(1, 2)), (0b100, rat(1, 2))]), &model).unwrap(),
            1
        );
        assert_eq!(support_order(&closed(&model, &[]), &model).unwrap(), 0);
    }

    #[test]
    fn vapprox_examples() {
        let model = FiniteSpaceModel::new(2).unwrap();
        let l = model.lattice();
        let full = sublattice_generated(l, &l.elements().collect::<Vec<_>>()).unwrap();

        let uniform = model
            .avoidance(&closed(&model, &[(0b01, rat(1, 2)), (0b10, rat(1, 2))]))
            .unwrap();
        let b = vapprox_bound(&uniform, &full, 1).unwrap();
        assert_eq!(b.lower, int(1));
        assert_eq!(b.upper_defect, int(0));

        let solid = model.avoidance(&closed(&model, &[(0b11, int(1))])).unwrap();
        let b = vapprox_bound(&solid, &full, 1).unwrap();
        assert_eq!(b.lower, int(0));
        assert_eq!(b.upper_defect, int(1));
    }
}
