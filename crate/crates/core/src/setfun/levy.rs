//! Infinite divisibility: support check and complete monotonicity of the
//! n-th roots `f^{1/n}`.
//!
//! Signs of `Σ c_i v_i^{1/n}` are decided exactly when possible: terms whose
//! radicands differ by a perfect n-th power are merged, and roots of distinct
//! classes are linearly independent over the rationals, so a single surviving
//! class fixes the sign and none means zero. Otherwise the sum is enclosed in
//! an interval built from integer n-th roots at increasing precision.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::classify::first_over_antichains;
use super::{classify, ClassId, Direction, SetFunction, SetFunctionError};
use crate::lattice::Elem;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy)]
pub struct LevyOptions {
    pub start_bits: u32,
    pub max_bits: u32,
}

impl Default for LevyOptions {
    fn default() -> Self {
        LevyOptions {
            start_bits: 128,
            max_bits: 512,
        }
    }
}

/// Where `f^{1/n}` stopped being completely monotone (or where the sign
/// could not be decided).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootWitness {
    pub n: u32,
    pub set: Vec<Elem>,
    pub x: Elem,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevyReport {
    pub divisible: bool,
    /// Set when some sign stayed undetermined at the precision cap.
    pub indeterminate: bool,
    pub support_is_filter: bool,
    /// `{x : f(x) > 0}`.
    pub support: Vec<Elem>,
    /// `-ln f(x)` on the support, `None` elsewhere; present only when the
    /// support is a filter.
    pub exponent: Option<Vec<Option<f64>>>,
    /// `(x, y)` in the support with `f(x ∧ y) = 0`.
    pub support_witness: Option<(Elem, Elem)>,
    pub root_witness: Option<RootWitness>,
    pub n_max: u32,
}

pub fn levy_divisibility(f: &SetFunction, n_max: u32) -> Result<LevyReport, SetFunctionError> {
    levy_divisibility_with(f, n_max, LevyOptions::default())
}

pub fn levy_divisibility_with(
    f: &SetFunction,
    n_max: u32,
    opts: LevyOptions,
) -> Result<LevyReport, SetFunctionError> {
    if f.direction() != Direction::Increasing {
        return Err(SetFunctionError::UnsupportedClassForDirection {
            class: ClassId::CompletelyMonotone,
            direction: f.direction(),
        });
    }
    let base = classify(f, ClassId::CompletelyMonotone)?;
    if !base.holds {
        return Err(SetFunctionError::PrerequisiteClassFailed(Box::new(base)));
    }
    let l = f.lattice();
    let v = f.values();
    let support: Vec<Elem> = l.elements().filter(|&x| v[x].is_positive()).collect();

    let support_witness = support.iter().enumerate().find_map(|(i, &x)| {
        support[i + 1..]
            .iter()
            .find(|&&y| v[l.meet(x, y)].is_zero())
            .map(|&y| (x, y))
    });
    let mut report = LevyReport {
        divisible: false,
        indeterminate: false,
        support_is_filter: support_witness.is_none(),
        exponent: None,
        support,
        support_witness,
        root_witness: None,
        n_max,
    };
    if !report.support_is_filter {
        return Ok(report);
    }
    report.exponent = Some(
        l.elements()
            .map(|x| v[x].is_positive().then(|| -ln_rational(&v[x])))
            .collect(),
    );

    let all: Vec<Elem> = l.elements().collect();
    let meet = |p: Elem, q: Elem| l.meet(p, q);
    for n in 2..=n_max.max(1) {
        let hit = first_over_antichains(
            l,
            &all,
            l.len(),
            |_| true,
            |a| {
                l.elements().find_map(|x| {
                    if a.iter().any(|&z| l.leq(x, z)) {
                        return None;
                    }
                    let terms = expansion_terms(a, x, &meet, v);
                    match root_sum_sign(&terms, n, opts) {
                        Some(s) if s >= 0 => None,
                        Some(_) => Some((false, a.to_vec(), x)),
                        None => Some((true, a.to_vec(), x)),
                    }
                })
            },
        );
        if let Some((undecided, set, x)) = hit {
            report.indeterminate = undecided;
            report.root_witness = Some(RootWitness { n, set, x });
            return Ok(report);
        }
    }
    report.divisible = true;
    Ok(report)
}

/// `(±1, f(y))` pairs of the inclusion–exclusion expansion of `∇_A f(x)`,
/// zeros dropped.
fn expansion_terms(
    a: &[Elem],
    x: Elem,
    meet: &impl Fn(Elem, Elem) -> Elem,
    v: &[Rational],
) -> Vec<(i64, Rational)> {
    let k = a.len();
    let mut folded = Vec::with_capacity(1 << k);
    folded.push(x);
    let mut terms = vec![(1, v[x].clone())];
    for mask in 1usize..(1 << k) {
        let low = mask.trailing_zeros() as usize;
        let y = meet(folded[mask & (mask - 1)], a[low]);
        folded.push(y);
        let sign = if mask.count_ones() % 2 == 1 { -1 } else { 1 };
        terms.push((sign, v[y].clone()));
    }
    terms.retain(|(_, r)| !r.is_zero());
    terms
}

/// Sign of `Σ c_i r_i^{1/n}` for positive rationals `r_i`, or `None` if the
/// enclosure at the precision cap still straddles zero.
pub(crate) fn root_sum_sign(terms: &[(i64, Rational)], n: u32, opts: LevyOptions) -> Option<i8> {
    // classes: (radicand representative, accumulated rational coefficient)
    let mut classes: Vec<(Rational, Rational)> = Vec::new();
    for (c, r) in terms {
        let c = Rational::from_integer(BigInt::from(*c));
        match classes
            .iter_mut()
            .find_map(|(rep, coef)| exact_root(&(r / &*rep), n).map(|q| (coef, q)))
        {
            Some((coef, q)) => *coef += c * q,
            None => classes.push((r.clone(), c)),
        }
    }
    classes.retain(|(_, c)| !c.is_zero());
    match classes.len() {
        0 => return Some(0),
        1 => return Some(if classes[0].1.is_positive() { 1 } else { -1 }),
        _ => {}
    }
    let mut bits = opts.start_bits;
    loop {
        if let Some(s) = enclose_sign(&classes, n, bits) {
            return Some(s);
        }
        if bits >= opts.max_bits {
            return None;
        }
        bits = (bits * 2).min(opts.max_bits);
    }
}

/// Rational `q` with `q^n = r`, if it exists.
fn exact_root(r: &Rational, n: u32) -> Option<Rational> {
    let p = int_root(r.numer(), n)?;
    let q = int_root(r.denom(), n)?;
    Some(Rational::new(p, q))
}

fn int_root(b: &BigInt, n: u32) -> Option<BigInt> {
    if b.is_negative() {
        return None;
    }
    let r = b.nth_root(n);
    (r.pow(n) == *b).then_some(r)
}

fn enclose_sign(classes: &[(Rational, Rational)], n: u32, bits: u32) -> Option<i8> {
    // common denominator for the coefficients; it does not change the sign
    let d = classes
        .iter()
        .fold(BigInt::one(), |acc, (_, c)| num_integer::lcm(acc, c.denom().clone()));
    let mut lo = BigInt::zero();
    let mut hi = BigInt::zero();
    for (r, c) in classes {
        let coef = c.numer() * (&d / c.denom());
        // floor((r * 2^{bits n})^{1/n}) brackets r^{1/n} * 2^bits
        let scaled: BigInt = (r.numer() << (bits as usize * n as usize)) / r.denom();
        let root = scaled.nth_root(n);
        let root_hi = &root + 1;
        if coef.is_positive() {
            lo += &coef * &root;
            hi += &coef * &root_hi;
        } else {
            lo += &coef * &root_hi;
            hi += &coef * &root;
        }
    }
    if lo.is_positive() {
        Some(1)
    } else if hi.is_negative() {
        Some(-1)
    } else {
        None
    }
}

/// Natural log of a positive rational, robust to numerators and
/// denominators beyond the f64 range.
pub(crate) fn ln_rational(r: &Rational) -> f64 {
    ln_big(r.numer()) - ln_big(r.denom())
}

fn ln_big(b: &BigInt) -> f64 {
    let bits = b.bits();
    if bits < 1000 {
        return b.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top: BigInt = b >> (shift as usize);
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::FiniteLattice;
    use crate::rational::{int, pow, rat};
    use std::sync::Arc;

    fn on_powerset(m: usize, f: impl Fn(usize) -> Rational) -> SetFunction {
        SetFunction::from_fn(
            Arc::new(FiniteLattice::powerset_reverse(m)),
            Direction::Increasing,
            f,
        )
        .unwrap()
    }

    #[test]
    fn poisson_zero_probability_is_divisible() {
        let f = on_powerset(2, |q| pow(&rat(1, 2), q.count_ones() as u64));
        let r = levy_divisibility(&f, 16).unwrap();
        assert!(r.divisible && r.support_is_filter && !r.indeterminate);
        let e = r.exponent.unwrap();
        assert!((e[0b11].unwrap() - 2.0 * 2f64.ln()).abs() < 1e-12);
        assert_eq!(e[0], Some(0.0));
    }

    #[test]
    fn two_point_mixture_support_is_not_a_filter() {
        // avoidance of ½δ_{a} + ½δ_{b}
        let f = on_powerset(2, |q| match q {
            0 => int(1),
            0b11 => int(0),
            _ => rat(1, 2),
        });
        let r = levy_divisibility(&f, 16).unwrap();
        assert!(!r.divisible && !r.support_is_filter);
        assert_eq!(r.support_witness, Some((1, 2)));
        assert!(r.exponent.is_none());
    }

    #[test]
    fn constant_one_has_zero_exponent() {
        let f = on_powerset(2, |_| int(1));
        let r = levy_divisibility(&f, 8).unwrap();
        assert!(r.divisible);
        assert!(r.exponent.unwrap().iter().all(|e| *e == Some(0.0)));
    }

    #[test]
    fn root_signs() {
        let o = LevyOptions::default();
        // sqrt(2) - sqrt(8)/2 = 0 exactly
        assert_eq!(root_sum_sign(&[(1, int(2)), (-1, rat(2, 1) * int(1))], 2, o), Some(0));
        assert_eq!(root_sum_sign(&[(2, int(2)), (-1, int(8))], 2, o), Some(0));
        // sqrt(3) - sqrt(2) > 0 needs the enclosure
        assert_eq!(root_sum_sign(&[(1, int(3)), (-1, int(2))], 2, o), Some(1));
        assert_eq!(root_sum_sign(&[(1, int(2)), (-1, int(3))], 2, o), Some(-1));
        // 1 - 2^{1/3} - ... mixtures
        assert_eq!(root_sum_sign(&[(1, int(1)), (-1, int(2)), (1, int(1))], 3, o), Some(1));
    }

    #[test]
    fn non_divisible_strict_support_is_detected() {
        // completely monotone with full support, but a root fails:
        // mixture of two point masses plus a small atom at the top filter
        let f = on_powerset(2, |q| match q {
            0 => int(1),
            0b11 => rat(11, 100),
            _ => rat(55, 100),
        });
        assert!(classify(&f, ClassId::CompletelyMonotone).unwrap().holds);
        let r = levy_divisibility(&f, 4).unwrap();
        assert!(r.support_is_filter);
        assert!(!r.divisible && !r.indeterminate);
        assert_eq!(r.root_witness.unwrap().n, 2);
    }
}
