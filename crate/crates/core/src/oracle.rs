//! Independent reference computations for tests: brute-force linear solves
//! over the rationals and random generators for lattices, set functions and
//! measures.

use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::choquet::Mode;
use crate::lattice::{Elem, FiniteLattice};
use crate::measure::{Carrier, DiscreteMeasure};
use crate::rational::{rat, Rational};

#[derive(Debug, Clone, PartialEq)]
pub enum Solution {
    Unique(Vec<Rational>),
    NotUnique,
    Inconsistent,
}

/// Gauss–Jordan elimination of `a·w = b` with exact arithmetic.
pub fn solve_exact(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Solution {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        b.swap(r, p);
        let inv = Rational::one() / &a[r][c];
        for v in a[r].iter_mut() {
            *v *= &inv;
        }
        b[r] *= &inv;
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let k = a[i][c].clone();
                let pivot = a[r].clone();
                for (v, pv) in a[i].iter_mut().zip(&pivot) {
                    *v -= &k * pv;
                }
                let d = &k * &b[r];
                b[i] -= d;
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if b[r..].iter().any(|v| !v.is_zero()) {
        return Solution::Inconsistent;
    }
    if pivots.len() < cols {
        return Solution::NotUnique;
    }
    Solution::Unique(b.into_iter().take(cols).collect())
}

/// Incidence system of a mode: one row per element, one column per carrier
/// point.
pub fn mode_system(l: &FiniteLattice, mode: Mode) -> (Vec<Carrier>, Vec<Vec<Rational>>) {
    let carrier = mode.carrier(l);
    let rows = l
        .elements()
        .map(|x| {
            carrier
                .iter()
                .map(|&c| {
                    if mode.counts(l, c, x) {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    (carrier, rows)
}

/// Solves the mode's incidence system for the given values.
pub fn solve_mode(l: &FiniteLattice, mode: Mode, values: &[Rational]) -> Solution {
    let (_, a) = mode_system(l, mode);
    solve_exact(a, values.to_vec())
}

/// Solves `f(x) = Σ_{z ≤ x} r(z)` directly.
pub fn mobius_solve(l: &FiniteLattice, values: &[Rational]) -> Solution {
    let a = l
        .elements()
        .map(|x| {
            l.elements()
                .map(|z| if l.leq(z, x) { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect();
    solve_exact(a, values.to_vec())
}

/// Lattice of down-sets of a random poset with at most four points, kept
/// when it has at most `max_size` elements.
pub fn random_distributive_lattice(rng: &mut ChaCha8Rng, max_size: usize) -> FiniteLattice {
    loop {
        let p = rng.random_range(1..=4usize);
        let mut below = vec![0usize; p];
        for (j, b) in below.iter_mut().enumerate() {
            for i in 0..j {
                if rng.random_bool(0.4) {
                    *b |= 1 << i;
                }
            }
        }
        for j in 0..p {
            for i in 0..j {
                if below[j] >> i & 1 == 1 {
                    below[j] |= below[i];
                }
            }
        }
        let downsets: Vec<usize> = (0..1usize << p)
            .filter(|&s| (0..p).all(|j| s >> j & 1 == 0 || below[j] & !s == 0))
            .collect();
        if downsets.len() > max_size {
            continue;
        }
        let labels = downsets.iter().map(|s| format!("d{s}")).collect();
        return FiniteLattice::from_order_fn(labels, |a, b| downsets[a] & !downsets[b] == 0)
            .expect("down-sets form a lattice");
    }
}

/// Random rational in `[0, 1]` with small denominator; zero about a third of
/// the time.
pub fn random_weight(rng: &mut ChaCha8Rng) -> Rational {
    if rng.random_bool(1.0 / 3.0) {
        Rational::zero()
    } else {
        let q = rng.random_range(1..=12i64);
        rat(rng.random_range(1..=q), q)
    }
}

/// Random nonnegative measure on the carrier of `mode`, with positive mass
/// where the mode needs it to produce a valid set function.
pub fn random_mode_measure(rng: &mut ChaCha8Rng, l: &FiniteLattice, mode: Mode) -> DiscreteMeasure {
    let carrier = mode.carrier(l);
    loop {
        let weights: Vec<(Carrier, Rational)> =
            carrier.iter().map(|&c| (c, random_weight(rng))).collect();
        let m = DiscreteMeasure::from_weights(mode.carrier_kind(), carrier.clone(), weights);
        let top_positive = !m
            .mass_where(|c| mode.counts(l, c, l.top()))
            .is_zero();
        if !m.is_zero() && (mode.direction() == crate::setfun::Direction::Decreasing || top_positive)
        {
            return m;
        }
    }
}

/// Values of a random completely monotone function: forward evaluation of a
/// random nonnegative measure on filters.
pub fn random_cm_values(rng: &mut ChaCha8Rng, l: &FiniteLattice) -> Vec<Rational> {
    let m = random_mode_measure(rng, l, Mode::Monotone);
    crate::choquet::evaluate(&m, l, Mode::Monotone)
}

/// `∇_A f(x)` by recursion `∇_{A∪{a}} f(x) = ∇_A f(x) − ∇_A f(x ∧ a)`.
pub fn nabla_recursive(l: &FiniteLattice, f: &[Rational], a: &[Elem], x: Elem) -> Rational {
    match a.split_last() {
        None => f[x].clone(),
        Some((&last, rest)) => {
            nabla_recursive(l, f, rest, x) - nabla_recursive(l, f, rest, l.meet(x, last))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use rand::SeedableRng;

    #[test]
    fn small_systems() {
        let a = vec![vec![int(1), int(1)], vec![int(1), int(-1)]];
        assert_eq!(
            solve_exact(a.clone(), vec![int(3), int(1)]),
            Solution::Unique(vec![int(2), int(1)])
        );
        let singular = vec![vec![int(1), int(1)], vec![int(2), int(2)]];
        assert_eq!(solve_exact(singular.clone(), vec![int(1), int(2)]), Solution::NotUnique);
        assert_eq!(solve_exact(singular, vec![int(1), int(3)]), Solution::Inconsistent);
    }

    #[test]
    fn generated_lattices_are_distributive() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let l = random_distributive_lattice(&mut rng, 10);
            assert!(l.len() <= 10);
            assert!(crate::lattice::structure_report(&l).is_distributive);
        }
    }
}
