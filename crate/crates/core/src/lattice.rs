//! Finite posets and lattices described by an explicit order relation.
//!
//! Elements are opaque indices `0..n`; every structural question is
//! answered from the relation and the derived meet/join tables, so the same
//! engine serves abstract lattices, powersets under reverse inclusion and
//! lattices of interval unions.

use serde::{Deserialize, Serialize};

/// Index of an element inside a [`FiniteLattice`].
pub type Elem = usize;

/// Default cap on the number of elements of a lattice.
pub const DEFAULT_MAX_ELEMENTS: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("relation is not a partial order: {a} and {b} are distinct but mutually related")]
    NotAPartialOrder { a: Elem, b: Elem },
    #[error("pair ({a}, {b}) has no {missing}")]
    NotALattice { a: Elem, b: Elem, missing: &'static str },
    #[error("poset has no top element")]
    NoTop,
    #[error("lattice is not distributive")]
    NotDistributive,
    #[error("{size} elements exceed the configured cap of {cap}")]
    SizeExceeded { size: usize, cap: usize },
    #[error("element index {0} out of range")]
    UnknownElement(Elem),
    #[error("empty poset")]
    Empty,
    #[error("unknown element label {0:?}")]
    UnknownLabel(String),
}

#[derive(Clone, PartialEq, Eq)]
struct BitRows {
    words: usize,
    bits: Vec<u64>,
}

impl BitRows {
    fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        BitRows {
            words,
            bits: vec![0; words * n],
        }
    }

    #[inline]
    fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.words + c / 64] >> (c % 64) & 1 == 1
    }

    #[inline]
    fn set(&mut self, r: usize, c: usize) {
        self.bits[r * self.words + c / 64] |= 1 << (c % 64);
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.bits[r * self.words..(r + 1) * self.words]
    }

    fn or_row_into(&mut self, src: usize, dst: usize) {
        let w = self.words;
        for k in 0..w {
            let v = self.bits[src * w + k];
            self.bits[dst * w + k] |= v;
        }
    }
}

/// A validated finite lattice with precomputed meet and join tables.
#[derive(Clone)]
pub struct FiniteLattice {
    labels: Vec<String>,
    /// `up.get(x, y)` iff `x <= y`.
    up: BitRows,
    /// `down.get(y, x)` iff `x <= y`.
    down: BitRows,
    meet: Vec<u32>,
    join: Vec<u32>,
    top: Elem,
    bottom: Elem,
}

impl std::fmt::Debug for FiniteLattice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FiniteLattice")
            .field("labels", &self.labels)
            .field("top", &self.top)
            .field("bottom", &self.bottom)
            .finish()
    }
}

impl PartialEq for FiniteLattice {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.up == other.up
    }
}

impl FiniteLattice {
    /// Builds a lattice from element labels and generating pairs `(i, j)`
    /// meaning `i <= j`. Reflexive and transitive closure are applied.
    pub fn build(labels: Vec<String>, leq_pairs: &[(Elem, Elem)]) -> Result<Self, LatticeError> {
        Self::build_with_cap(labels, leq_pairs, DEFAULT_MAX_ELEMENTS)
    }

    pub fn build_with_cap(
        labels: Vec<String>,
        leq_pairs: &[(Elem, Elem)],
        cap: usize,
    ) -> Result<Self, LatticeError> {
        let n = labels.len();
        if n == 0 {
            return Err(LatticeError::Empty);
        }
        if n > cap {
            return Err(LatticeError::SizeExceeded { size: n, cap });
        }
        let mut up = BitRows::new(n);
        for i in 0..n {
            up.set(i, i);
        }
        for &(i, j) in leq_pairs {
            if i >= n {
                return Err(LatticeError::UnknownElement(i));
            }
            if j >= n {
                return Err(LatticeError::UnknownElement(j));
            }
            up.set(i, j);
        }
        // Warshall on bit rows: if i <= k then everything above k is above i.
        for k in 0..n {
            for i in 0..n {
                if i != k && up.get(i, k) {
                    up.or_row_into(k, i);
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if up.get(i, j) && up.get(j, i) {
                    return Err(LatticeError::NotAPartialOrder { a: i, b: j });
                }
            }
        }
        Self::from_closed_order(labels, up)
    }

    /// Builds from a predicate `leq(i, j)` that is already a partial order.
    /// The predicate is still validated for antisymmetry and transitivity.
    pub fn from_order_fn(
        labels: Vec<String>,
        leq: impl Fn(Elem, Elem) -> bool,
    ) -> Result<Self, LatticeError> {
        let n = labels.len();
        if n == 0 {
            return Err(LatticeError::Empty);
        }
        if n > DEFAULT_MAX_ELEMENTS {
            return Err(LatticeError::SizeExceeded {
                size: n,
                cap: DEFAULT_MAX_ELEMENTS,
            });
        }
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && leq(i, j) {
                    pairs.push((i, j));
                }
            }
        }
        Self::build(labels, &pairs)
    }

    fn from_closed_order(labels: Vec<String>, up: BitRows) -> Result<Self, LatticeError> {
        let n = labels.len();
        let mut down = BitRows::new(n);
        for i in 0..n {
            for j in 0..n {
                if up.get(i, j) {
                    down.set(j, i);
                }
            }
        }
        let top = (0..n)
            .find(|&t| (0..n).all(|x| up.get(x, t)))
            .ok_or(LatticeError::NoTop)?;

        let mut meet = vec![0u32; n * n];
        let mut join = vec![0u32; n * n];
        let words = up.words;
        let mut common = vec![0u64; words];
        for a in 0..n {
            for b in a..n {
                // glb: the common lower bound whose own down-set is the whole
                // common lower set.
                for (c, (x, y)) in common.iter_mut().zip(down.row(a).iter().zip(down.row(b))) {
                    *c = x & y;
                }
                let g = find_generator(&common, &down, n)
                    .ok_or(LatticeError::NotALattice { a, b, missing: "greatest lower bound" })?;
                for (c, (x, y)) in common.iter_mut().zip(up.row(a).iter().zip(up.row(b))) {
                    *c = x & y;
                }
                let l = find_generator(&common, &up, n)
                    .ok_or(LatticeError::NotALattice { a, b, missing: "least upper bound" })?;
                meet[a * n + b] = g as u32;
                meet[b * n + a] = g as u32;
                join[a * n + b] = l as u32;
                join[b * n + a] = l as u32;
            }
        }
        let bottom = (0..n).fold(top, |acc, x| meet[acc * n + x] as usize);
        Ok(FiniteLattice {
            labels,
            up,
            down,
            meet,
            join,
            top,
            bottom,
        })
    }

    /// Chain `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> Self {
        let labels = (0..n).map(|i| i.to_string()).collect();
        Self::from_order_fn(labels, |i, j| i <= j).expect("chains are lattices")
    }

    /// Subsets of an `m`-element set under inclusion; element index = bitmask.
    pub fn boolean(m: usize) -> Self {
        let n = 1usize << m;
        let labels = (0..n).map(|mask| mask_label(mask, m)).collect();
        Self::from_order_fn(labels, |i, j| i & !j == 0).expect("powersets are lattices")
    }

    /// Subsets of an `m`-element set under reverse inclusion (the compact
    /// sets of a finite discrete space); element index = bitmask, top = `∅`.
    pub fn powerset_reverse(m: usize) -> Self {
        let n = 1usize << m;
        let labels = (0..n).map(|mask| mask_label(mask, m)).collect();
        Self::from_order_fn(labels, |i, j| j & !i == 0).expect("powersets are lattices")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: Elem) -> &str {
        &self.labels[x]
    }

    pub fn index_of(&self, label: &str) -> Option<Elem> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn top(&self) -> Elem {
        self.top
    }

    /// Every nonempty finite lattice has a bottom: the meet of all elements.
    pub fn bottom(&self) -> Elem {
        self.bottom
    }

    #[inline]
    pub fn leq(&self, x: Elem, y: Elem) -> bool {
        self.up.get(x, y)
    }

    #[inline]
    pub fn lt(&self, x: Elem, y: Elem) -> bool {
        x != y && self.up.get(x, y)
    }

    #[inline]
    pub fn comparable(&self, x: Elem, y: Elem) -> bool {
        self.leq(x, y) || self.leq(y, x)
    }

    #[inline]
    pub fn meet(&self, x: Elem, y: Elem) -> Elem {
        self.meet[x * self.len() + y] as usize
    }

    #[inline]
    pub fn join(&self, x: Elem, y: Elem) -> Elem {
        self.join[x * self.len() + y] as usize
    }

    /// Meet of a set; the empty meet is the top.
    pub fn meet_all(&self, xs: impl IntoIterator<Item = Elem>) -> Elem {
        xs.into_iter().fold(self.top, |acc, x| self.meet(acc, x))
    }

    /// Join of a set; the empty join is the bottom.
    pub fn join_all(&self, xs: impl IntoIterator<Item = Elem>) -> Elem {
        xs.into_iter().fold(self.bottom, |acc, x| self.join(acc, x))
    }

    /// Principal lower set `⟨x⟩`.
    pub fn down_set(&self, x: Elem) -> Vec<Elem> {
        self.elements().filter(|&z| self.down.get(x, z)).collect()
    }

    /// Principal upper set (principal filter) `⟨x⟩*`.
    pub fn up_set(&self, x: Elem) -> Vec<Elem> {
        self.elements().filter(|&z| self.leq(x, z)).collect()
    }

    /// `z` belongs to the lower set generated by `set` (`⟨∅⟩ = ∅`).
    pub fn in_lower_set(&self, z: Elem, set: &[Elem]) -> bool {
        set.iter().any(|&a| self.leq(z, a))
    }

    pub fn in_upper_set(&self, z: Elem, set: &[Elem]) -> bool {
        set.iter().any(|&a| self.leq(a, z))
    }

    /// Elements covered by `x`.
    pub fn lower_covers(&self, x: Elem) -> Vec<Elem> {
        self.elements()
            .filter(|&z| self.lt(z, x) && !self.elements().any(|w| self.lt(z, w) && self.lt(w, x)))
            .collect()
    }

    /// Elements covering `x`.
    pub fn upper_covers(&self, x: Elem) -> Vec<Elem> {
        self.elements()
            .filter(|&z| self.lt(x, z) && !self.elements().any(|w| self.lt(x, w) && self.lt(w, z)))
            .collect()
    }

    pub fn is_antichain(&self, set: &[Elem]) -> bool {
        set.iter().enumerate().all(|(i, &a)| {
            set[i + 1..]
                .iter()
                .all(|&b| a != b && !self.comparable(a, b))
        })
    }

    /// Elements sorted so that `x < y` implies `x` comes first.
    pub fn linear_extension(&self) -> Vec<Elem> {
        let mut order: Vec<Elem> = self.elements().collect();
        order.sort_by_key(|&x| self.down_set(x).len());
        order
    }

    /// The order-dual lattice (same labels, reversed relation).
    pub fn dual(&self) -> FiniteLattice {
        let n = self.len();
        let mut up = BitRows::new(n);
        for i in 0..n {
            for j in 0..n {
                if self.leq(j, i) {
                    up.set(i, j);
                }
            }
        }
        Self::from_closed_order(self.labels.clone(), up).expect("dual of a lattice is a lattice")
    }

    /// Generating pairs of the order (all strict relations).
    pub fn leq_pairs(&self) -> Vec<(Elem, Elem)> {
        let mut out = Vec::new();
        for i in self.elements() {
            for j in self.elements() {
                if self.lt(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn to_description(&self) -> LatticeDescription {
        LatticeDescription {
            elements: self.labels.clone(),
            leq: self.leq_pairs().into_iter().map(|(i, j)| [i, j]).collect(),
        }
    }
}

fn find_generator(common: &[u64], rows: &BitRows, n: usize) -> Option<Elem> {
    for (k, &w) in common.iter().enumerate() {
        let mut w = w;
        while w != 0 {
            let bit = w.trailing_zeros() as usize;
            let g = k * 64 + bit;
            if g < n && rows.row(g) == common {
                return Some(g);
            }
            w &= w - 1;
        }
    }
    None
}

/// `{a,b}`-style label of a bitmask over ground points `a, b, c, ...`.
pub fn mask_label(mask: usize, m: usize) -> String {
    let names: Vec<String> = (0..m)
        .filter(|i| mask >> i & 1 == 1)
        .map(ground_name)
        .collect();
    format!("{{{}}}", names.join(","))
}

/// Default name of the `i`-th ground point: `a`, `b`, ..., `z`, `p26`, ...
pub fn ground_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("p{i}")
    }
}

/// JSON lattice description `{"elements":[...], "leq":[[i,j],...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeDescription {
    pub elements: Vec<String>,
    pub leq: Vec<[Elem; 2]>,
}

impl LatticeDescription {
    pub fn build(&self) -> Result<FiniteLattice, LatticeError> {
        let pairs: Vec<(Elem, Elem)> = self.leq.iter().map(|p| (p[0], p[1])).collect();
        FiniteLattice::build(self.elements.clone(), &pairs)
    }
}

/// Distributivity, irreducibles and primes of a lattice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub is_distributive: bool,
    /// `∧`-irreducible elements: `z = x ∧ y` implies `z = x` or `z = y`.
    /// Includes the top.
    pub irreducibles: Vec<Elem>,
    /// Elements `z ≠ top` whose complement of `⟨z⟩` is a filter.
    pub primes: Vec<Elem>,
    /// Whether the bottom passed the irreducibility test (it does iff it has
    /// exactly one upper cover, or the lattice is a single point).
    pub bottom_irreducible: bool,
    /// `(x, A)` with `x ∧ ⋁A ≠ ⋁(x ∧ A)`.
    pub distributivity_witness: Option<(Elem, Vec<Elem>)>,
}

pub fn structure_report(l: &FiniteLattice) -> StructureReport {
    let n = l.len();
    let mut witness = None;
    'outer: for x in 0..n {
        for a in 0..n {
            for b in (a + 1)..n {
                let lhs = l.meet(x, l.join(a, b));
                let rhs = l.join(l.meet(x, a), l.meet(x, b));
                if lhs != rhs {
                    witness = Some((x, vec![a, b]));
                    break 'outer;
                }
            }
        }
    }
    let irreducibles: Vec<Elem> = (0..n)
        .filter(|&z| {
            (0..n).all(|x| (0..n).all(|y| l.meet(x, y) != z || x == z || y == z))
        })
        .collect();
    let primes: Vec<Elem> = (0..n)
        .filter(|&z| z != l.top() && complement_of_down_set_is_filter(l, z))
        .collect();
    StructureReport {
        is_distributive: witness.is_none(),
        bottom_irreducible: irreducibles.contains(&l.bottom()),
        irreducibles,
        primes,
        distributivity_witness: witness,
    }
}

fn complement_of_down_set_is_filter(l: &FiniteLattice, z: Elem) -> bool {
    let outside: Vec<Elem> = l.elements().filter(|&x| !l.leq(x, z)).collect();
    if outside.is_empty() {
        return false;
    }
    // Upward closure is automatic for the complement of a lower set.
    outside
        .iter()
        .all(|&x| outside.iter().all(|&y| !l.leq(l.meet(x, y), z)))
}

/// Maximal elements of `{z : z ≱ x}`; empty for the bottom.
pub fn boundary_antichain(l: &FiniteLattice, x: Elem) -> Vec<Elem> {
    let outside: Vec<Elem> = l.elements().filter(|&z| !l.leq(x, z)).collect();
    outside
        .iter()
        .copied()
        .filter(|&z| !outside.iter().any(|&w| l.lt(z, w)))
        .collect()
}

/// A sublattice together with its embedding into the parent lattice.
#[derive(Debug, Clone)]
pub struct Sublattice {
    pub lattice: FiniteLattice,
    /// `embedding[i]` is the parent index of sublattice element `i`.
    pub embedding: Vec<Elem>,
}

impl Sublattice {
    pub fn to_parent(&self, x: Elem) -> Elem {
        self.embedding[x]
    }

    pub fn from_parent(&self, p: Elem) -> Option<Elem> {
        self.embedding.iter().position(|&e| e == p)
    }
}

/// Sublattice generated by `gens`: joins of nonempty subsets of `gens`
/// first, then meets of nonempty subsets of that join-closure.
pub fn sublattice_generated(l: &FiniteLattice, gens: &[Elem]) -> Result<Sublattice, LatticeError> {
    if gens.is_empty() {
        return Err(LatticeError::Empty);
    }
    if let Some(&bad) = gens.iter().find(|&&g| g >= l.len()) {
        return Err(LatticeError::UnknownElement(bad));
    }
    if !structure_report(l).is_distributive {
        return Err(LatticeError::NotDistributive);
    }
    let sup_closed = close_under(l, gens, |a, b| l.join(a, b));
    let members = close_under(l, &sup_closed, |a, b| l.meet(a, b));
    Ok(induced_sublattice(l, &members))
}

/// Restriction of `l` to `members`, which must be closed under meet and join.
pub fn induced_sublattice(l: &FiniteLattice, members: &[Elem]) -> Sublattice {
    let mut embedding: Vec<Elem> = members.to_vec();
    embedding.sort_unstable();
    embedding.dedup();
    let labels = embedding.iter().map(|&e| l.label(e).to_string()).collect();
    let lattice = FiniteLattice::from_order_fn(labels, |i, j| l.leq(embedding[i], embedding[j]))
        .expect("a meet/join closed subset is a lattice");
    Sublattice { lattice, embedding }
}

fn close_under(l: &FiniteLattice, seed: &[Elem], op: impl Fn(Elem, Elem) -> Elem) -> Vec<Elem> {
    let mut inside = vec![false; l.len()];
    let mut items: Vec<Elem> = Vec::new();
    for &g in seed {
        if !inside[g] {
            inside[g] = true;
            items.push(g);
        }
    }
    let mut i = 0;
    while i < items.len() {
        for j in 0..=i {
            let c = op(items[i], items[j]);
            if !inside[c] {
                inside[c] = true;
                items.push(c);
            }
        }
        i += 1;
    }
    items.sort_unstable();
    items
}

/// Every antichain `B ⊆ carrier` with `1 <= |B| <= k_max`, ordered by size
/// and then lexicographically by element index.
pub fn antichains_of<'a>(
    l: &'a FiniteLattice,
    carrier: &[Elem],
    k_max: usize,
) -> impl Iterator<Item = Vec<Elem>> + 'a {
    let mut items = carrier.to_vec();
    items.sort_unstable();
    items.dedup();
    let max = k_max.min(items.len());
    (1..=max).flat_map(move |size| AntichainsOfSize::new(l, items.clone(), size))
}

struct AntichainsOfSize<'a> {
    l: &'a FiniteLattice,
    items: Vec<Elem>,
    size: usize,
    // positions into `items`
    stack: Vec<usize>,
    started: bool,
    done: bool,
}

impl<'a> AntichainsOfSize<'a> {
    fn new(l: &'a FiniteLattice, items: Vec<Elem>, size: usize) -> Self {
        AntichainsOfSize {
            l,
            items,
            size,
            stack: Vec::with_capacity(size),
            started: false,
            done: size == 0,
        }
    }

    fn compatible(&self, pos: usize) -> bool {
        let c = self.items[pos];
        self.stack
            .iter()
            .all(|&p| !self.l.comparable(self.items[p], c))
    }

    /// Extends the stack from candidate position `from`, backtracking as
    /// needed. Returns false when the search space is exhausted.
    fn advance(&mut self, mut from: usize) -> bool {
        let n = self.items.len();
        loop {
            if self.stack.len() == self.size {
                return true;
            }
            let need = self.size - self.stack.len();
            let mut placed = false;
            while from + need <= n {
                if self.compatible(from) {
                    self.stack.push(from);
                    from += 1;
                    placed = true;
                    break;
                }
                from += 1;
            }
            if !placed {
                match self.stack.pop() {
                    Some(p) => from = p + 1,
                    None => return false,
                }
            }
        }
    }
}

impl Iterator for AntichainsOfSize<'_> {
    type Item = Vec<Elem>;

    fn next(&mut self) -> Option<Vec<Elem>> {
        if self.done {
            return None;
        }
        let ok = if !self.started {
            self.started = true;
            self.advance(0)
        } else {
            match self.stack.pop() {
                Some(p) => self.advance(p + 1),
                None => false,
            }
        };
        if !ok {
            self.done = true;
            return None;
        }
        Some(self.stack.iter().map(|&p| self.items[p]).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn diamond_m3() -> FiniteLattice {
        FiniteLattice::build(
            labels(&["0", "a", "b", "c", "1"]),
            &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)],
        )
        .unwrap()
    }

    #[test]
    fn chain_c3() {
        let c3 = FiniteLattice::build(labels(&["0", "1", "2"]), &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(c3.top(), 2);
        assert_eq!(c3.bottom(), 0);
        for x in 0..3 {
            for y in 0..3 {
                assert_eq!(c3.meet(x, y), x.min(y));
                assert_eq!(c3.join(x, y), x.max(y));
            }
        }
    }

    #[test]
    fn boolean_b2_meet_is_intersection() {
        let b2 = FiniteLattice::boolean(2);
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(b2.meet(x, y), x & y);
                assert_eq!(b2.join(x, y), x | y);
            }
        }
        assert_eq!(b2.top(), 3);
        assert_eq!(b2.label(3), "{a,b}");
    }

    #[test]
    fn two_incomparable_points_have_no_top() {
        let err = FiniteLattice::build(labels(&["a", "b"]), &[]).unwrap_err();
        assert_eq!(err, LatticeError::NoTop);
    }

    #[test]
    fn cycles_are_rejected() {
        let err = FiniteLattice::build(labels(&["a", "b"]), &[(0, 1), (1, 0)]).unwrap_err();
        assert!(matches!(err, LatticeError::NotAPartialOrder { .. }));
    }

    #[test]
    fn missing_join_reports_pair() {
        // a, b both below c and d, which are incomparable below top
        let err = FiniteLattice::build(
            labels(&["0", "a", "b", "c", "d", "1"]),
            &[(0, 1), (0, 2), (1, 3), (2, 3), (1, 4), (2, 4), (3, 5), (4, 5)],
        )
        .unwrap_err();
        assert_eq!(
            err,
            LatticeError::NotALattice { a: 1, b: 2, missing: "least upper bound" }
        );
    }

    #[test]
    fn size_cap_fails_fast() {
        let err = FiniteLattice::build_with_cap(labels(&["a", "b", "c"]), &[], 2).unwrap_err();
        assert_eq!(err, LatticeError::SizeExceeded { size: 3, cap: 2 });
    }

    #[test]
    fn b2_structure() {
        let b2 = FiniteLattice::boolean(2);
        let r = structure_report(&b2);
        assert!(r.is_distributive);
        assert_eq!(r.irreducibles, vec![1, 2, 3]);
        assert_eq!(r.primes, vec![1, 2]);
        assert!(!r.bottom_irreducible);
    }

    #[test]
    fn m3_is_not_distributive() {
        let m3 = diamond_m3();
        let r = structure_report(&m3);
        assert!(!r.is_distributive);
        let (x, a) = r.distributivity_witness.clone().unwrap();
        let lhs = m3.meet(x, m3.join_all(a.iter().copied()));
        let rhs = m3.join_all(a.iter().map(|&z| m3.meet(x, z)));
        assert_ne!(lhs, rhs);
        assert!(m3.leq(rhs, lhs));
    }

    #[test]
    fn c3_every_non_top_is_prime() {
        let c3 = FiniteLattice::chain(3);
        let r = structure_report(&c3);
        assert!(r.is_distributive);
        assert_eq!(r.primes, vec![0, 1]);
        assert_eq!(r.irreducibles, vec![0, 1, 2]);
        assert!(r.bottom_irreducible);
    }

    #[test]
    fn boundary_antichains() {
        let b2 = FiniteLattice::boolean(2);
        assert_eq!(boundary_antichain(&b2, 3), vec![1, 2]);
        assert!(boundary_antichain(&b2, b2.bottom()).is_empty());
        let c3 = FiniteLattice::chain(3);
        assert_eq!(boundary_antichain(&c3, 1), vec![0]);
    }

    #[test]
    fn generated_sublattices() {
        let b3 = FiniteLattice::boolean(3);
        let f = sublattice_generated(&b3, &[0b001, 0b010]).unwrap();
        assert_eq!(f.embedding, vec![0b000, 0b001, 0b010, 0b011]);
        let single = sublattice_generated(&b3, &[b3.top()]).unwrap();
        assert_eq!(single.embedding, vec![b3.top()]);
        let all: Vec<Elem> = b3.elements().collect();
        assert_eq!(sublattice_generated(&b3, &all).unwrap().embedding, all);
        assert_eq!(
            sublattice_generated(&diamond_m3(), &[1]).unwrap_err(),
            LatticeError::NotDistributive
        );
    }

    #[test]
    fn antichain_streams() {
        let b2 = FiniteLattice::boolean(2);
        let got: Vec<_> = antichains_of(&b2, &[1, 2], 2).collect();
        assert_eq!(got, vec![vec![1], vec![2], vec![1, 2]]);
        let c3 = FiniteLattice::chain(3);
        let got: Vec<_> = antichains_of(&c3, &[0, 1], 2).collect();
        assert_eq!(got, vec![vec![0], vec![1]]);
        let b3 = FiniteLattice::boolean(3);
        assert_eq!(antichains_of(&b3, &[1, 2, 4], 3).count(), 7);
    }

    #[test]
    fn description_round_trip() {
        let b2 = FiniteLattice::boolean(2);
        let json = serde_json::to_string(&b2.to_description()).unwrap();
        let back: LatticeDescription = serde_json::from_str(&json).unwrap();
        assert_eq!(back.build().unwrap(), b2);
    }
}
