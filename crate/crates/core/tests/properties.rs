use std::sync::Arc;

use choquet_core::choquet::{choquet_represent, evaluate, mass_below_outside, normalized, Mode};
use choquet_core::lattice::antichains_of;
use choquet_core::lfv::{
    finite_cover_family, lfv_lhs_profile, sublattice_bound, FiniteMixture, FinitePoisson,
};
use choquet_core::oracle::{
    mobius_solve, nabla_recursive, random_cm_values, random_distributive_lattice,
    random_mode_measure, solve_mode, Solution,
};
use choquet_core::rational::{rat, Rational};
use choquet_core::setfun::{Direction, SetFunction};
use choquet_core::space::{IntervalUnion, MeasureModel, measure_of};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn interval_union() -> impl Strategy<Value = IntervalUnion> {
    prop::collection::vec((0i64..24, 0i64..6), 0..4).prop_map(|v| {
        let pairs: Vec<(Rational, Rational)> =
            v.into_iter().map(|(a, w)| (rat(a, 4), rat(a + w, 4))).collect();
        IntervalUnion::from_pairs(&pairs).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mobius_inverse_reconstructs(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = Arc::new(random_distributive_lattice(&mut rng, 10));
        let f = SetFunction::new(l.clone(), random_cm_values(&mut rng, &l), Direction::Increasing).unwrap();
        let r = f.mobius_inverse();
        for x in l.elements() {
            let back = r.mass_where(|c| matches!(c, choquet_core::measure::Carrier::Index(z) if l.leq(z, x)));
            prop_assert_eq!(&back, f.value(x));
        }
        let Solution::Unique(w) = mobius_solve(&l, f.values()) else { panic!("singular") };
        for x in l.elements() {
            prop_assert_eq!(&w[x], &r.index_weight(x));
        }
    }

    #[test]
    fn nabla_is_mass_of_difference(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = Arc::new(random_distributive_lattice(&mut rng, 10));
        let f = SetFunction::new(l.clone(), random_cm_values(&mut rng, &l), Direction::Increasing).unwrap();
        let r = f.mobius_inverse();
        let all: Vec<usize> = l.elements().collect();
        for a in antichains_of(&l, &all, 3) {
            for x in l.elements() {
                let d = f.nabla(&a, x).unwrap();
                prop_assert_eq!(&d, &mass_below_outside(&r, &l, x, &a));
                prop_assert_eq!(&d, &nabla_recursive(&l, f.values(), &a, x));
            }
        }
    }

    #[test]
    fn every_mode_round_trips(seed in any::<u64>(), mode in prop::sample::select(Mode::ALL.to_vec())) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = Arc::new(random_distributive_lattice(&mut rng, 10));
        let m = random_mode_measure(&mut rng, &l, mode);
        let raw = evaluate(&m, &l, mode);
        let f = SetFunction::new(l.clone(), raw, mode.direction()).unwrap();
        let back = choquet_represent(&f, mode).unwrap();
        let expected = match mode.direction() {
            Direction::Increasing => normalized(&m),
            Direction::Decreasing => m.clone(),
        };
        prop_assert_eq!(&back, &expected);
        let Solution::Unique(w) = solve_mode(&l, mode, f.values()) else { panic!("not unique") };
        for (c, v) in mode.carrier(&l).into_iter().zip(w) {
            prop_assert_eq!(back.weight(c), v);
        }
    }

    #[test]
    fn interval_algebra(a in interval_union(), b in interval_union(), c in interval_union()) {
        prop_assert_eq!(a.union(&b), b.union(&a));
        prop_assert_eq!(a.intersect(&b.union(&c)), a.intersect(&b).union(&a.intersect(&c)));
        prop_assert_eq!(a.length() + b.length(), a.union(&b).length() + a.intersect(&b).length());
        prop_assert!(a.intersect(&b).is_subset(&a));
        prop_assert!(a.is_subset(&a.union(&b)));
        let renorm = IntervalUnion::from_intervals(a.intervals().to_vec());
        prop_assert_eq!(&renorm, &a);
        let leb = MeasureModel::uniform(rat(0, 1), rat(8, 1), rat(1, 1)).unwrap();
        prop_assert_eq!(measure_of(&leb, &a), a.length());
    }

    #[test]
    fn lfv_forms_agree_and_grow(ps in prop::collection::vec(1i64..10, 3), cover in 0usize..61) {
        let phi = FinitePoisson { p: ps.iter().map(|&p| rat(p, 10)).collect() };
        let family = finite_cover_family(0b111);
        let c = &family.covers[cover % family.covers.len()];
        let profile = lfv_lhs_profile(&phi, c, 4).unwrap();
        prop_assert!(profile.windows(2).all(|w| w[0] <= w[1]));
        for (n, v) in profile.iter().enumerate() {
            prop_assert_eq!(v, &sublattice_bound(&phi, c, n).unwrap());
        }
    }

    #[test]
    fn lfv_mixture_reaches_one(w in prop::collection::vec((1usize..16, 1i64..5), 1..4)) {
        let total: i64 = w.iter().map(|p| p.1).sum();
        let phi = FiniteMixture { outcomes: w.iter().map(|&(g, p)| (g, rat(p, total))).collect() };
        for c in finite_cover_family(0b1111).covers.iter().step_by(97) {
            let profile = lfv_lhs_profile(&phi, c, 4).unwrap();
            prop_assert_eq!(&profile[4], &rat(1, 1));
        }
    }
}
