//! Poisson processes, compound Poisson random sets and Monte Carlo
//! estimates of their hitting and avoidance functionals.

mod poisson;

use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

pub use poisson::{poisson, stream, INVERSION_LIMIT};

use crate::rational::{to_f64, Rational};
use crate::space::{measure_of, Interval, IntervalUnion, MeasureModel};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("negative grain mass")]
    NegativeMass,
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("grain probabilities must be nonnegative and sum to at most 1")]
    BadMixture,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    Hitting,
    Avoidance,
}

impl std::str::FromStr for Functional {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "hitting" => Ok(Functional::Hitting),
            "avoidance" => Ok(Functional::Avoidance),
            _ => Err(format!("unknown functional {s:?}")),
        }
    }
}

/// Closed-form value of a functional: always as a float, and exactly when
/// it is rational.
#[derive(Debug, Clone, PartialEq)]
pub struct Theory {
    pub value: f64,
    pub exact: Option<Rational>,
}

impl Theory {
    pub fn exact(r: Rational) -> Self {
        Theory {
            value: to_f64(&r),
            exact: Some(r),
        }
    }

    /// `exp(-m)`, exact only for `m = 0`.
    pub fn exp_neg(m: &Rational) -> Self {
        if m.is_zero() {
            return Theory::exact(Rational::from_integer(1.into()));
        }
        Theory {
            value: (-to_f64(m)).exp(),
            exact: None,
        }
    }

    fn complement(self) -> Self {
        Theory {
            value: 1.0 - self.value,
            exact: self.exact.map(|r| Rational::from_integer(1.into()) - r),
        }
    }
}

/// A random closed set that can be sampled and queried.
pub trait RandomSetModel: Sync {
    type Sample;
    type Query: Sync;

    fn sample(&self, rng: &mut ChaCha8Rng) -> Self::Sample;
    fn hits(&self, sample: &Self::Sample, q: &Self::Query) -> bool;
    /// Closed-form avoidance probability `P(X ∩ Q = ∅)`, if known.
    fn avoidance_theory(&self, q: &Self::Query) -> Option<Theory>;

    fn theory(&self, functional: Functional, q: &Self::Query) -> Option<Theory> {
        let t = self.avoidance_theory(q)?;
        Some(match functional {
            Functional::Avoidance => t,
            Functional::Hitting => t.complement(),
        })
    }
}

/// Position of a sampled point: an atom of the parameter measure (exact) or
/// a draw from its density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    Atom(usize),
    At(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointSample {
    pub points: Vec<Point>,
}

impl PointSample {
    /// `N(Q)`.
    pub fn count_in(&self, process: &PoissonProcess, q: &IntervalUnion) -> usize {
        self.points.iter().filter(|p| process.point_in(p, q)).count()
    }

    pub fn has_duplicates(&self) -> bool {
        let mut seen: Vec<u64> = Vec::new();
        let mut atoms: Vec<usize> = Vec::new();
        for p in &self.points {
            match *p {
                Point::Atom(i) => atoms.push(i),
                Point::At(x) => seen.push(x.to_bits()),
            }
        }
        seen.sort_unstable();
        atoms.sort_unstable();
        seen.windows(2).any(|w| w[0] == w[1]) || atoms.windows(2).any(|w| w[0] == w[1])
    }
}

/// Poisson process on a window with a given parameter measure.
#[derive(Debug, Clone)]
pub struct PoissonProcess {
    window: IntervalUnion,
    /// density components inside the window: `(lo, hi, weight)`
    pieces: Vec<(f64, f64, f64)>,
    atoms: Vec<(Rational, f64)>,
    /// cumulative weights over pieces then atoms
    cumulative: Vec<f64>,
    mean: f64,
    intensity: MeasureModel,
}

impl PoissonProcess {
    pub fn new(intensity: MeasureModel, window: IntervalUnion) -> Self {
        let mut pieces = Vec::new();
        for (piece, h) in intensity.pieces() {
            let clip = IntervalUnion::from_intervals(vec![piece.clone()]).intersect(&window);
            for i in clip.intervals() {
                let w = to_f64(&(i.length() * h));
                if w > 0.0 {
                    pieces.push((to_f64(&i.lo), to_f64(&i.hi), w));
                }
            }
        }
        let atoms: Vec<(Rational, f64)> = intensity
            .atoms()
            .iter()
            .filter(|(p, _)| window.contains_point(p))
            .map(|(p, w)| (p.clone(), to_f64(w)))
            .collect();
        let mut acc = 0.0;
        let cumulative = pieces
            .iter()
            .map(|p| p.2)
            .chain(atoms.iter().map(|a| a.1))
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        let mean = to_f64(&measure_of(&intensity, &window));
        PoissonProcess {
            window,
            pieces,
            atoms,
            cumulative,
            mean,
            intensity,
        }
    }

    pub fn window(&self) -> &IntervalUnion {
        &self.window
    }

    pub fn intensity(&self) -> &MeasureModel {
        &self.intensity
    }

    /// `λ(Q ∩ W)`.
    pub fn mean_of(&self, q: &IntervalUnion) -> Rational {
        measure_of(&self.intensity, &q.intersect(&self.window))
    }

    fn point_in(&self, p: &Point, q: &IntervalUnion) -> bool {
        match *p {
            Point::Atom(i) => q.contains_point(&self.atoms[i].0),
            Point::At(x) => q
                .intervals()
                .iter()
                .any(|i| to_f64(&i.lo) <= x && x <= to_f64(&i.hi)),
        }
    }

    fn draw_point(&self, rng: &mut ChaCha8Rng) -> Point {
        let total = *self.cumulative.last().expect("positive mass");
        let u = rng.random::<f64>() * total;
        let idx = self
            .cumulative
            .partition_point(|&c| c <= u)
            .min(self.cumulative.len() - 1);
        if idx < self.pieces.len() {
            let (lo, hi, _) = self.pieces[idx];
            Point::At(lo + (hi - lo) * rng.random::<f64>())
        } else {
            Point::Atom(idx - self.pieces.len())
        }
    }
}

impl RandomSetModel for PoissonProcess {
    type Sample = PointSample;
    type Query = IntervalUnion;

    fn sample(&self, rng: &mut ChaCha8Rng) -> PointSample {
        let n = poisson(self.mean, rng);
        let points = (0..n).map(|_| self.draw_point(rng)).collect();
        PointSample { points }
    }

    fn hits(&self, s: &PointSample, q: &IntervalUnion) -> bool {
        s.points.iter().any(|p| self.point_in(p, q))
    }

    fn avoidance_theory(&self, q: &IntervalUnion) -> Option<Theory> {
        Some(Theory::exp_neg(&self.mean_of(q)))
    }
}

pub fn sample_poisson(process: &PoissonProcess, rng: &mut ChaCha8Rng) -> PointSample {
    process.sample(rng)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomSetSample {
    pub grains: Vec<usize>,
    /// Union of the grains, as a bitmask over the ground set.
    pub realized: usize,
}

/// Union of a Poisson number of i.i.d. grains drawn from a finite grain
/// measure on subsets (bitmasks) of a finite ground set.
#[derive(Debug, Clone)]
pub struct CompoundSet {
    grains: Vec<(usize, Rational)>,
    cumulative: Vec<f64>,
    total: Rational,
}

impl CompoundSet {
    pub fn new(grains: impl IntoIterator<Item = (usize, Rational)>) -> Result<Self, SimError> {
        let grains: Vec<(usize, Rational)> =
            grains.into_iter().filter(|(_, w)| !w.is_zero()).collect();
        if grains.iter().any(|(_, w)| w.is_negative()) {
            return Err(SimError::NegativeMass);
        }
        let total = grains.iter().fold(Rational::zero(), |a, (_, w)| a + w);
        let mut acc = 0.0;
        let cumulative = grains
            .iter()
            .map(|(_, w)| {
                acc += to_f64(w);
                acc
            })
            .collect();
        Ok(CompoundSet {
            grains,
            cumulative,
            total,
        })
    }

    pub fn grains(&self) -> &[(usize, Rational)] {
        &self.grains
    }

    pub fn total_mass(&self) -> &Rational {
        &self.total
    }

    /// `Φ(Q) = Σ_{g ∩ Q ≠ ∅} λ(g)`, so that the avoidance is `exp(-Φ(Q))`.
    pub fn exponent(&self, q: usize) -> Rational {
        self.grains
            .iter()
            .filter(|(g, _)| g & q != 0)
            .fold(Rational::zero(), |a, (_, w)| a + w)
    }
}

impl RandomSetModel for CompoundSet {
    type Sample = RandomSetSample;
    type Query = usize;

    fn sample(&self, rng: &mut ChaCha8Rng) -> RandomSetSample {
        let n = poisson(to_f64(&self.total), rng);
        let total = self.cumulative.last().copied().unwrap_or(0.0);
        let grains: Vec<usize> = (0..n)
            .map(|_| {
                let u = rng.random::<f64>() * total;
                let i = self
                    .cumulative
                    .partition_point(|&c| c <= u)
                    .min(self.grains.len() - 1);
                self.grains[i].0
            })
            .collect();
        let realized = grains.iter().fold(0, |a, g| a | g);
        RandomSetSample { grains, realized }
    }

    fn hits(&self, s: &RandomSetSample, q: &usize) -> bool {
        s.realized & q != 0
    }

    fn avoidance_theory(&self, q: &usize) -> Option<Theory> {
        Some(Theory::exp_neg(&self.exponent(*q)))
    }
}

pub fn sample_compound_set(model: &CompoundSet, rng: &mut ChaCha8Rng) -> RandomSetSample {
    model.sample(rng)
}

/// A random set taking finitely many values: grain `g` with probability
/// `p_g`, the empty set with the remaining probability.
#[derive(Debug, Clone)]
pub struct MixtureSet {
    outcomes: Vec<(usize, Rational)>,
    cumulative: Vec<f64>,
}

impl MixtureSet {
    pub fn new(outcomes: impl IntoIterator<Item = (usize, Rational)>) -> Result<Self, SimError> {
        let outcomes: Vec<(usize, Rational)> = outcomes.into_iter().collect();
        let total = outcomes.iter().fold(Rational::zero(), |a, (_, w)| a + w);
        if outcomes.iter().any(|(_, w)| w.is_negative()) || total > Rational::from_integer(1.into())
        {
            return Err(SimError::BadMixture);
        }
        let mut acc = 0.0;
        let cumulative = outcomes
            .iter()
            .map(|(_, w)| {
                acc += to_f64(w);
                acc
            })
            .collect();
        Ok(MixtureSet {
            outcomes,
            cumulative,
        })
    }

    pub fn avoidance_exact(&self, q: usize) -> Rational {
        let miss = self
            .outcomes
            .iter()
            .filter(|(g, _)| g & q != 0)
            .fold(Rational::zero(), |a, (_, w)| a + w);
        Rational::from_integer(1.into()) - miss
    }
}

impl RandomSetModel for MixtureSet {
    type Sample = usize;
    type Query = usize;

    fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        let u: f64 = rng.random();
        let i = self.cumulative.partition_point(|&c| c <= u);
        self.outcomes.get(i).map_or(0, |o| o.0)
    }

    fn hits(&self, s: &usize, q: &usize) -> bool {
        s & q != 0
    }

    fn avoidance_theory(&self, q: &usize) -> Option<Theory> {
        Some(Theory::exact(self.avoidance_exact(*q)))
    }
}

/// Monte Carlo estimate next to its closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub functional: Functional,
    pub estimate: f64,
    pub std_error: f64,
    pub theory: f64,
    pub theory_exact: Option<Rational>,
    pub z: Option<f64>,
    pub count: u64,
    pub n: u64,
    pub seed: u64,
}

/// Number of replications (out of `n`) in which `event` occurs, replication
/// `i` using stream `offset + i`.
pub fn count_events<M: RandomSetModel>(
    model: &M,
    n: u64,
    seed: u64,
    offset: u64,
    event: impl Fn(&M::Sample) -> bool + Sync,
) -> u64 {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, offset + i);
            event(&model.sample(&mut rng)) as u64
        })
        .sum()
}

pub fn estimate_functional<M: RandomSetModel>(
    model: &M,
    functional: Functional,
    q: &M::Query,
    n: u64,
    seed: u64,
) -> Result<SimReport, SimError> {
    estimate_on_streams(model, functional, q, n, seed, 0)
}

fn estimate_on_streams<M: RandomSetModel>(
    model: &M,
    functional: Functional,
    q: &M::Query,
    n: u64,
    seed: u64,
    offset: u64,
) -> Result<SimReport, SimError> {
    if n == 0 {
        return Err(SimError::NoSamples);
    }
    let count = count_events(model, n, seed, offset, |s| {
        model.hits(s, q) == (functional == Functional::Hitting)
    });
    let p = count as f64 / n as f64;
    let std_error = (p * (1.0 - p) / n as f64).sqrt();
    let theory = model
        .theory(functional, q)
        .unwrap_or(Theory { value: f64::NAN, exact: None });
    let z = (std_error > 0.0).then(|| (p - theory.value) / std_error);
    Ok(SimReport {
        functional,
        estimate: p,
        std_error,
        theory: theory.value,
        theory_exact: theory.exact,
        z,
        count,
        n,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

/// `|z| <= threshold`; with zero standard error the estimate must equal the
/// theory exactly.
pub fn z_compare(report: &SimReport, z_threshold: f64) -> Verdict {
    let ok = match report.z {
        Some(z) => z.abs() <= z_threshold,
        None => match &report.theory_exact {
            Some(t) => Rational::from_integer(report.count.into())
                == t * Rational::from_integer(report.n.into()),
            None => report.estimate == report.theory,
        },
    };
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// Per-comparison threshold keeping the family-wise two-sided error of `m`
/// comparisons at the level of a single `base_z` test.
pub fn bonferroni_z(base_z: f64, m: usize) -> f64 {
    let std = Normal::standard();
    let alpha = 2.0 * (1.0 - std.cdf(base_z));
    std.inverse_cdf(1.0 - alpha / (2.0 * m.max(1) as f64))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceReport {
    pub estimate: f64,
    pub std_error: f64,
    pub z: f64,
    pub n: u64,
}

/// Empirical covariance of `N(Q1)` and `N(Q2)`, centred at the known means;
/// independent counts give 0.
pub fn count_covariance(
    process: &PoissonProcess,
    q1: &IntervalUnion,
    q2: &IntervalUnion,
    n: u64,
    seed: u64,
) -> CovarianceReport {
    let m1 = to_f64(&process.mean_of(q1));
    let m2 = to_f64(&process.mean_of(q2));
    let (s, ss) = (0..n)
        .into_par_iter()
        .map(|i| {
            let sample = process.sample(&mut stream(seed, i));
            let a = sample.count_in(process, q1) as f64 - m1;
            let b = sample.count_in(process, q2) as f64 - m2;
            let prod = a * b;
            (prod, prod * prod)
        })
        .reduce(|| (0.0, 0.0), |x, y| (x.0 + y.0, x.1 + y.1));
    let nf = n as f64;
    let mean = s / nf;
    let var = (ss / nf - mean * mean) * nf / (nf - 1.0);
    let std_error = (var / nf).sqrt();
    CovarianceReport {
        estimate: mean,
        std_error,
        z: if std_error > 0.0 { mean / std_error } else { 0.0 },
        n,
    }
}

/// Monte Carlo check of `φ(Q1)φ(Q2) = φ(Q1∪Q2)φ(Q1∩Q2)` for avoidance
/// functionals: four estimates on disjoint stream ranges and a delta-method
/// standard error for the defect `φ̂(Q1)φ̂(Q2) − φ̂(Q1∪Q2)φ̂(Q1∩Q2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpValuationMc {
    pub estimates: [f64; 4],
    pub defect: f64,
    pub std_error: f64,
    /// Closed-form defect when all four avoidance values are known.
    pub theory_defect: Option<f64>,
    pub z: Option<f64>,
}

pub fn exp_valuation_mc<M: RandomSetModel>(
    model: &M,
    queries: [&M::Query; 4],
    n: u64,
    seed: u64,
) -> Result<ExpValuationMc, SimError> {
    let mut est = [0.0; 4];
    let mut var = [0.0; 4];
    let mut theory = Some([0.0; 4]);
    for (j, q) in queries.iter().enumerate() {
        let r = estimate_on_streams(model, Functional::Avoidance, q, n, seed, (j as u64) << 40)?;
        est[j] = r.estimate;
        var[j] = r.std_error * r.std_error;
        match (&mut theory, model.avoidance_theory(q)) {
            (Some(t), Some(v)) => t[j] = v.value,
            _ => theory = None,
        }
    }
    let defect = est[0] * est[1] - est[2] * est[3];
    let std_error = (est[1].powi(2) * var[0]
        + est[0].powi(2) * var[1]
        + est[3].powi(2) * var[2]
        + est[2].powi(2) * var[3])
        .sqrt();
    let theory_defect = theory.map(|t| t[0] * t[1] - t[2] * t[3]);
    let z = match theory_defect {
        Some(t) if std_error > 0.0 => Some((defect - t) / std_error),
        _ => None,
    };
    Ok(ExpValuationMc {
        estimates: est,
        defect,
        std_error,
        theory_defect,
        z,
    })
}

/// Lebesgue measure on `[0, 1]`.
pub fn unit_lebesgue() -> MeasureModel {
    let one = Rational::from_integer(1.into());
    MeasureModel::uniform(Rational::zero(), one.clone(), one).expect("valid")
}

/// The unit window `[0, 1]`.
pub fn unit_window() -> IntervalUnion {
    IntervalUnion::from_intervals(vec![Interval {
        lo: Rational::zero(),
        hi: Rational::from_integer(1.into()),
    }])
}

/// Exact `count / n` as a float, used when comparing counts.
pub fn fraction(count: u64, n: u64) -> f64 {
    (Rational::from_integer(count.into()) / Rational::from_integer(n.into()))
        .to_f64()
        .unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn half() -> IntervalUnion {
        IntervalUnion::interval(int(0), rat(1, 2)).unwrap()
    }

    #[test]
    fn poisson_avoidance_of_half_window() {
        let p = PoissonProcess::new(unit_lebesgue(), unit_window());
        let r = estimate_functional(&p, Functional::Avoidance, &half(), 20_000, 11).unwrap();
        assert!((r.theory - (-0.5f64).exp()).abs() < 1e-15);
        assert_eq!(z_compare(&r, 4.0), Verdict::Pass, "{r:?}");
    }

    #[test]
    fn atoms_are_counted_exactly() {
        let m = MeasureModel::new(vec![], [(int(0), rat(7, 10))]).unwrap();
        let p = PoissonProcess::new(m, unit_window());
        let point = IntervalUnion::interval(int(0), int(0)).unwrap();
        let r = estimate_functional(&p, Functional::Avoidance, &point, 20_000, 5).unwrap();
        assert!((r.theory - (-0.7f64).exp()).abs() < 1e-15);
        assert_eq!(z_compare(&r, 4.0), Verdict::Pass, "{r:?}");
    }

    #[test]
    fn compound_examples() {
        let only_a = CompoundSet::new([(0b01, rat(7, 10))]).unwrap();
        let r = estimate_functional(&only_a, Functional::Avoidance, &0b10, 5_000, 1).unwrap();
        assert_eq!((r.estimate, r.std_error, r.z), (1.0, 0.0, None));
        assert_eq!(z_compare(&r, 3.0), Verdict::Pass);
        let r = estimate_functional(&only_a, Functional::Avoidance, &0b01, 20_000, 1).unwrap();
        assert_eq!(z_compare(&r, 4.0), Verdict::Pass, "{r:?}");

        let none = CompoundSet::new([]).unwrap();
        assert_eq!(none.sample(&mut stream(0, 0)).realized, 0);

        let pair = CompoundSet::new([(0b11, int(1))]).unwrap();
        for i in 0..200 {
            let s = pair.sample(&mut stream(3, i));
            assert!(s.realized == 0 || s.realized == 0b11);
        }
    }

    #[test]
    fn hitting_empty_query_is_exactly_zero() {
        let c = CompoundSet::new([(0b01, rat(7, 10))]).unwrap();
        let r = estimate_functional(&c, Functional::Hitting, &0, 1_000, 9).unwrap();
        assert_eq!(r.estimate, 0.0);
        assert_eq!(r.theory_exact, Some(int(0)));
        assert_eq!(z_compare(&r, 3.0), Verdict::Pass);
    }

    #[test]
    fn z_compare_rules() {
        let mut r = SimReport {
            functional: Functional::Avoidance,
            estimate: 0.5,
            std_error: 0.1,
            theory: 0.5,
            theory_exact: None,
            z: Some(0.0),
            count: 50,
            n: 100,
            seed: 0,
        };
        assert_eq!(z_compare(&r, 3.0), Verdict::Pass);
        r.z = Some(5.0);
        assert_eq!(z_compare(&r, 3.0), Verdict::Fail);
        r.z = None;
        r.std_error = 0.0;
        r.estimate = 1.0;
        r.count = 100;
        r.theory_exact = Some(rat(1, 2));
        assert_eq!(z_compare(&r, 3.0), Verdict::Fail);
    }

    #[test]
    fn bonferroni_raises_the_threshold() {
        assert!((bonferroni_z(3.0, 1) - 3.0).abs() < 1e-6);
        assert!(bonferroni_z(3.0, 12) > 3.5);
    }

    #[test]
    fn determinism() {
        let p = PoissonProcess::new(unit_lebesgue(), unit_window());
        let a = estimate_functional(&p, Functional::Avoidance, &half(), 3_000, 42).unwrap();
        let b = estimate_functional(&p, Functional::Avoidance, &half(), 3_000, 42).unwrap();
        assert_eq!(a, b);
    }
}
