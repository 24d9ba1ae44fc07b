//! Named verification suites. Each suite is deterministic given the seed.

use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use choquet_core::choquet::{
    choquet_represent, class_of_filter, evaluate, mass_below_outside, normalized, partition_classes,
    support_order, FiniteSpaceModel, Mode,
};
use choquet_core::lattice::{antichains_of, structure_report, FiniteLattice};
use choquet_core::lfv::{
    dyadic_ladder, finite_cover_family, lfv_certificate, lfv_lhs, sublattice_bound, AvoidanceEvaluator,
    FiniteMixture, FinitePoisson, IntervalPoisson, LfvOptions, SolidGrain,
};
use choquet_core::measure::{Carrier, CarrierKind, DiscreteMeasure};
use choquet_core::oracle::{
    mobius_solve, random_cm_values, random_distributive_lattice, random_mode_measure, solve_mode, Solution,
};
use choquet_core::random_sets::{
    bonferroni_z, count_covariance, estimate_functional, exp_valuation_mc, stream, z_compare,
    CompoundSet, Functional, MixtureSet, PoissonProcess, RandomSetModel, Verdict,
};
use choquet_core::rational::{format_rational, int, rat, Rational};
use choquet_core::setfun::{
    classify, is_exponential_valuation, is_k_valuation, levy_divisibility, Direction, SetFunction,
};
use choquet_core::space::{projection_nabla_identity, Interval, IntervalUnion, MeasureModel, ProductCompact};

use crate::commands::{labelled_report, sim_report_json};
use crate::fixtures::{self, Fixture};
use crate::report::{Check, Report, SuiteResult};
use crate::CliError;

pub const DEFAULT_SAMPLES: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SuiteId {
    MobiusRoundtrip,
    NablaMeasure,
    ChoquetRoundtrip,
    KvalSupport,
    Partition,
    ProjectionIdentity,
    PoissonMc,
    CompoundMc,
    ExpValuation,
    LevyDivisibility,
    LfvCertificate,
    Fixtures,
}

impl SuiteId {
    pub const ALL: [SuiteId; 12] = [
        SuiteId::MobiusRoundtrip,
        SuiteId::NablaMeasure,
        SuiteId::ChoquetRoundtrip,
        SuiteId::KvalSupport,
        SuiteId::Partition,
        SuiteId::ProjectionIdentity,
        SuiteId::PoissonMc,
        SuiteId::CompoundMc,
        SuiteId::ExpValuation,
        SuiteId::LevyDivisibility,
        SuiteId::LfvCertificate,
        SuiteId::Fixtures,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SuiteId::MobiusRoundtrip => "mobius_roundtrip",
            SuiteId::NablaMeasure => "nabla_measure",
            SuiteId::ChoquetRoundtrip => "choquet_roundtrip",
            SuiteId::KvalSupport => "kval_support",
            SuiteId::Partition => "partition",
            SuiteId::ProjectionIdentity => "projection_identity",
            SuiteId::PoissonMc => "poisson_mc",
            SuiteId::CompoundMc => "compound_mc",
            SuiteId::ExpValuation => "exp_valuation",
            SuiteId::LevyDivisibility => "levy_divisibility",
            SuiteId::LfvCertificate => "lfv_certificate",
            SuiteId::Fixtures => "fixtures",
        }
    }

    /// Suites that sample random sets and so need an explicit seed.
    pub fn is_monte_carlo(self) -> bool {
        matches!(self, SuiteId::PoissonMc | SuiteId::CompoundMc | SuiteId::ExpValuation)
    }
}

impl FromStr for SuiteId {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        SuiteId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| CliError::Config(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

fn default_z() -> f64 {
    3.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default)]
    pub seed: Option<u64>,
    pub suites: Vec<String>,
    /// Per-comparison z threshold.
    #[serde(default = "default_z")]
    pub z: f64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    /// Split the threshold across each suite's comparisons.
    #[serde(default)]
    pub bonferroni: bool,
    /// Fixture file or directory for the `fixtures` and `levy_divisibility`
    /// suites; the bundled corpus when absent.
    #[serde(default)]
    pub fixtures: Option<PathBuf>,
    /// Replications per Monte Carlo estimate.
    #[serde(default)]
    pub samples: Option<u64>,
}

impl SuiteConfig {
    pub fn new(suites: &[&str], seed: Option<u64>) -> Self {
        SuiteConfig {
            seed,
            suites: suites.iter().map(|s| s.to_string()).collect(),
            z: default_z(),
            output: None,
            format: Format::Json,
            bonferroni: false,
            fixtures: None,
            samples: None,
        }
    }

    pub fn validate(&self) -> Result<Vec<SuiteId>, CliError> {
        let ids = self
            .suites
            .iter()
            .map(|s| s.parse())
            .collect::<Result<Vec<SuiteId>, _>>()?;
        if self.seed.is_none() {
            if let Some(id) = ids.iter().find(|id| id.is_monte_carlo()) {
                return Err(CliError::Config(format!("suite {} needs a seed", id.name())));
            }
        }
        if !(self.z.is_finite() && self.z > 0.0) {
            return Err(CliError::Config("z threshold must be positive".into()));
        }
        if self.samples == Some(0) {
            return Err(CliError::Config("samples must be at least 1".into()));
        }
        Ok(ids)
    }
}

struct Ctx {
    seed: u64,
    z: f64,
    bonferroni: bool,
    samples: u64,
    fixtures: Vec<Fixture>,
}

impl Ctx {
    fn rng(&self, id: SuiteId) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(id as u64 + 1);
        r
    }

    fn threshold(&self, comparisons: usize) -> f64 {
        if self.bonferroni {
            bonferroni_z(self.z, comparisons)
        } else {
            self.z
        }
    }
}

/// Runs the configured suites in order. Only configuration problems are
/// errors; failing checks are recorded in the report.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Report, CliError> {
    run_suite_timed(cfg).map(|(r, _)| r)
}

/// As [`run_suite`], also returning per-suite wall times in seconds.
pub fn run_suite_timed(cfg: &SuiteConfig) -> Result<(Report, Vec<(String, f64)>), CliError> {
    let ids = cfg.validate()?;
    let fixtures = match &cfg.fixtures {
        Some(p) => fixtures::load(p)?,
        None => fixtures::builtin(),
    };
    let ctx = Ctx {
        seed: cfg.seed.unwrap_or(0),
        z: cfg.z,
        bonferroni: cfg.bonferroni,
        samples: cfg.samples.unwrap_or(DEFAULT_SAMPLES),
        fixtures,
    };
    let mut results = Vec::new();
    let mut times = Vec::new();
    for id in ids {
        let start = std::time::Instant::now();
        let checks = run_one(&ctx, id).unwrap_or_else(|e| {
            vec![Check::exact("suite_error", json!({}), json!(null), json!(e.to_string()))]
        });
        times.push((id.name().to_string(), start.elapsed().as_secs_f64()));
        results.push(SuiteResult::new(id.name(), checks));
    }
    Ok((Report::new(cfg.seed, results), times))
}

fn run_one(ctx: &Ctx, id: SuiteId) -> Result<Vec<Check>, CliError> {
    match id {
        SuiteId::MobiusRoundtrip => mobius_roundtrip(ctx),
        SuiteId::NablaMeasure => nabla_measure(ctx),
        SuiteId::ChoquetRoundtrip => choquet_roundtrip(ctx),
        SuiteId::KvalSupport => kval_support(ctx),
        SuiteId::Partition => partition(ctx),
        SuiteId::ProjectionIdentity => projection_identity(ctx),
        SuiteId::PoissonMc => poisson_mc(ctx),
        SuiteId::CompoundMc => compound_mc(ctx),
        SuiteId::ExpValuation => exp_valuation(ctx),
        SuiteId::LevyDivisibility => levy(ctx),
        SuiteId::LfvCertificate => lfv_suite(ctx),
        SuiteId::Fixtures => fixture_checks(ctx),
    }
}

fn internal<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Check(e.to_string())
}

fn r(x: &Rational) -> Value {
    json!(format_rational(x))
}

/// The completely monotone corpus shared by the Möbius and `∇` suites.
fn cm_corpus(ctx: &Ctx) -> Result<Vec<SetFunction>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    rng.set_stream(1000);
    (0..200)
        .map(|_| {
            let l = Arc::new(random_distributive_lattice(&mut rng, 10));
            let v = random_cm_values(&mut rng, &l);
            SetFunction::new(l, v, Direction::Increasing).map_err(internal)
        })
        .collect()
}

fn mobius_roundtrip(ctx: &Ctx) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    for (t, f) in cm_corpus(ctx)?.iter().enumerate() {
        let l = f.lattice();
        let m = f.mobius_inverse();
        let reconstructs = l.elements().all(|x| {
            &m.mass_where(|c| matches!(c, Carrier::Index(z) if l.leq(z, x))) == f.value(x)
        });
        let solve = match mobius_solve(l, f.values()) {
            Solution::Unique(w) => l.elements().all(|x| w[x] == m.index_weight(x)),
            _ => false,
        };
        checks.push(Check::exact(
            format!("cm_{t}"),
            json!({"trial": t, "size": l.len()}),
            json!({"reconstructs": true, "nonnegative": true, "matches_linear_solve": true}),
            json!({"reconstructs": reconstructs, "nonnegative": m.is_nonnegative(), "matches_linear_solve": solve}),
        ));
    }
    Ok(checks)
}

fn nabla_measure(ctx: &Ctx) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    for (t, f) in cm_corpus(ctx)?.iter().enumerate() {
        let l = f.lattice();
        let m = f.mobius_inverse();
        let all: Vec<usize> = l.elements().collect();
        let mut compared = 0usize;
        let mut mismatch = Value::Null;
        'scan: for a in antichains_of(l, &all, 3) {
            for x in l.elements() {
                compared += 1;
                let d = f.nabla(&a, x).map_err(internal)?;
                let mass = mass_below_outside(&m, l, x, &a);
                if d != mass {
                    mismatch = json!({"set": a, "x": x, "nabla": r(&d), "mass": r(&mass)});
                    break 'scan;
                }
            }
        }
        checks.push(Check::exact(
            format!("cm_{t}"),
            json!({"trial": t, "size": l.len(), "comparisons": compared}),
            json!({"mismatch": null}),
            json!({"mismatch": mismatch}),
        ));
    }
    Ok(checks)
}

fn choquet_roundtrip(ctx: &Ctx) -> Result<Vec<Check>, CliError> {
    let mut rng = ctx.rng(SuiteId::ChoquetRoundtrip);
    let mut checks = Vec::new();
    for mode in Mode::ALL {
        for t in 0..100 {
            let (l, model) = if t % 2 == 0 {
                (random_distributive_lattice(&mut rng, 10), "lattice")
            } else {
                (FiniteLattice::powerset_reverse(rng.random_range(1..=5)), "finite_space")
            };
            let l = Arc::new(l);
            let m = random_mode_measure(&mut rng, &l, mode);
            let f = SetFunction::new(l.clone(), evaluate(&m, &l, mode), mode.direction()).map_err(internal)?;
            let expected = match mode.direction() {
                Direction::Increasing => normalized(&m),
                Direction::Decreasing => m.clone(),
            };
            let round_trip = match choquet_represent(&f, mode) {
                Ok(back) => json!(back == expected),
                Err(e) => json!(e.to_string()),
            };
            let solve = match solve_mode(&l, mode, f.values()) {
                Solution::Unique(w) => {
                    let same = mode.carrier(&l).into_iter().zip(&w).all(|(c, v)| &expected.weight(c) == v);
                    if same { "unique_match" } else { "unique_mismatch" }
                }
                Solution::NotUnique => "not_unique",
                Solution::Inconsistent => "inconsistent",
            };
            checks.push(Check::exact(
                format!("{mode}_{t}"),
                json!({"mode": mode.to_string(), "trial": t, "model": model, "size": l.len()}),
                json!({"round_trip": true, "linear_solve": "unique_match"}),
                json!({"round_trip": round_trip, "linear_solve": solve}),
            ));
        }
    }
    Ok(checks)
}

fn random_subset(rng: &mut ChaCha8Rng, n: usize, size: usize) -> usize {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..size {
        let j = rng.random_range(i..n);
        idx.swap(i, j);
    }
    idx[..size].iter().fold(0, |m, i| m | 1 << i)
}

fn kval_support(ctx: &Ctx) -> Result<Vec<Check>, CliError> {
    let mut rng = ctx.rng(SuiteId::KvalSupport);
    let mut checks = Vec::new();
    for t in 0..100 {
        let n = rng.random_range(2..=5usize);
        let g = rng.random_range(1..=n);
        let model = FiniteSpaceModel::new(n).map_err(internal)?;
        let count = rng.random_range(1..=4usize);
        let grains: Vec<(usize, Rational)> = (0..count)
            .map(|i| {
                let size = if i == 0 { g } else { rng.random_range(1..=g) };
                let w = rat(rng.random_range(1..=4), 4 * count as i64);
                (random_subset(&mut rng, n, size), w)
            })
            .collect();
        let m = DiscreteMeasure::from_weights(
            CarrierKind::ClosedSets,
            (1..=model.full_mask()).map(Carrier::Index).collect(),
            grains.iter().map(|(s, w)| (Carrier::Index(*s), w.clone())),
        );
        let hit = model.hitting(&m).map_err(internal)?;
        let kval = (1..=n)
            .map(|k| is_k_valuation(&hit, k).map(|rep| rep.holds).map_err(internal))
            .collect::<Result<Vec<_>, _>>()?;
        let order = support_order(&m, &model).map_err(internal)?;
        checks.push(Check::exact(
            format!("grains_{t}"),
            json!({
                "ground": n,
                "grains": grains.iter().map(|(s, w)| json!([model.lattice().label(*s), r(w)])).collect::<Vec<_>>(),
            }),
            json!({"support_order": g, "k_valuation": (1..=n).map(|k| k >= g).collect::<Vec<_>>()}),
            json!({"support_order": order, "k_valuation": kval}),
        ));
    }
    Ok(checks)
}

fn partition(ctx: &Ctx) -> Result<Vec<Check>, CliError> {
    let mut rng = ctx.rng(SuiteId::Partition);
    let mut checks = Vec::new();
    for t in 0..100 {
        let l = random_distributive_lattice(&mut rng, 10);
        let classes = partition_classes(&l).map_err(internal)?;
        let irr = structure_report(&l).irreducibles;
        let mut covered_once = true;
        let mut agrees = true;
        for z in l.elements() {
            let owners: Vec<usize> = (0..classes.len()).filter(|&x| classes[x].contains(&z)).collect();
            covered_once &= owners.len() == 1;
            agrees &= owners.first() == Some(&class_of_filter(&l, &irr, z));
        }
        checks.push(Check::exact(
            format!("lattice_{t}"),
            json!({"trial": t, "size": l.len()}),
            json!({"covered_once": true, "matches_class_of_filter": true}),
            json!({"covered_once": covered_once, "matches_class_of_filter": agrees}),
        ));
    }
    Ok(checks)
}

fn random_union(rng: &mut ChaCha8Rng) -> IntervalUnion {
    let parts = rng.random_range(0..=2);
    let pairs: Vec<(Rational, Rational)> = (0..parts)
        .map(|_| {
            let a = rng.random_range(0..8i64);
            let b = rng.random_range(a..=8);
            (rat(a, 4), rat(b, 4))
        })
        .collect();
    IntervalUnion::from_pairs(&pairs).expect("ordered endpoints")
}

fn random_product(rng: &mut ChaCha8Rng) -> ProductCompact {
    let mut slices = Vec::new();
    for k in ["s0", "s1", "s2"] {
        if rng.random_bool(0.6) {
            slices.push((k.to_string(), random_union(rng)));
        }
    }
    ProductCompact::new(slices)
}

fn random_measure(rng: &mut ChaCha8Rng) -> MeasureModel {
    let cut = rat(rng.random_range(1..8), 4);
    let pieces = vec![
        (Interval::new(int(0), cut.clone()).expect("ordered"), rat(rng.random_range(0..4), 2)),
        (Interval::new(cut, int(2)).expect("ordered"), rat(rng.random_range(0..4), 3)),
    ];
    let atoms: Vec<(Rational, Rational)> = if rng.random_bool(0.5) {
        vec![(rat(rng.random_range(0..=8), 4), rat(rng.random_range(1..4), 5))]
    } else {
        vec![]
    };
    MeasureModel::new(pieces, atoms).expect("nonnegative")
}

fn projection_identity(ctx: &Ctx) -> Result<Vec<Check>, CliError> {
    let mut rng = ctx.rng(SuiteId::ProjectionIdentity);
    let mut checks = Vec::new();
    for t in 0..100 {
        let nu = random_measure(&mut rng);
        let q = random_product(&mut rng);
        let n = rng.random_range(1..=3usize);
        let qs: Vec<ProductCompact> = (0..n).map(|_| random_product(&mut rng)).collect();
        let id = projection_nabla_identity(&q, &qs, &nu).map_err(internal)?;
        let mut max_nabla = None::<Rational>;
        for mask in 1usize..(1 << n) {
            let sub: Vec<ProductCompact> =
                (0..n).filter(|i| mask >> i & 1 == 1).map(|i| qs[i].clone()).collect();
            let v = projection_nabla_identity(&q, &sub, &nu).map_err(internal)?.lhs;
            if max_nabla.as_ref().is_none_or(|m| v > *m) {
                max_nabla = Some(v);
            }
        }
        let nonpositive = max_nabla.is_some_and(|m| m <= Rational::zero());
        checks.push(Check::exact(
            format!("tuple_{t}"),
            json!({
                "q": q.slices(),
                "qs": qs.iter().map(|p| p.slices().clone()).collect::<Vec<_>>(),
                "nu": nu,
            }),
            json!({"lhs": r(&id.rhs), "all_nabla_nonpositive": true}),
            json!({"lhs": r(&id.lhs), "all_nabla_nonpositive": nonpositive}),
        ));
    }
    Ok(checks)
}

fn iu(pairs: &[(i64, i64, i64, i64)]) -> IntervalUnion {
    IntervalUnion::from_pairs(
        &pairs.iter().map(|&(a, b, c, d)| (rat(a, b), rat(c, d))).collect::<Vec<_>>(),
    )
    .expect("ordered endpoints")
}

/// The twelve query sets of the Poisson comparison.
pub fn poisson_windows() -> Vec<IntervalUnion> {
    vec![
        iu(&[(0, 1, 1, 1)]),
        iu(&[(0, 1, 1, 2)]),
        iu(&[(1, 2, 1, 1)]),
        iu(&[(0, 1, 1, 4)]),
        iu(&[(1, 4, 3, 4)]),
        iu(&[(0, 1, 1, 10)]),
        iu(&[(0, 1, 1, 3), (2, 3, 1, 1)]),
        iu(&[(1, 3, 2, 3)]),
        iu(&[(0, 1, 1, 8), (1, 2, 5, 8)]),
        iu(&[(0, 1, 9, 10)]),
        iu(&[(1, 2, 1, 2)]),
        IntervalUnion::empty(),
    ]
}

fn stat_check<M: RandomSetModel>(
    name: String,
    model: &M,
    q: &M::Query,
    inputs: Value,
    ctx: &Ctx,
    threshold: f64,
) -> Result<Check, CliError> {
    let rep = estimate_functional(model, Functional::Avoidance, q, ctx.samples, ctx.seed).map_err(internal)?;
    let pass = z_compare(&rep, threshold) == Verdict::Pass;
    Ok(Check::stat(
        name,
        pass,
        inputs,
        json!({"theory": rep.theory, "theory_exact": rep.theory_exact.as_ref().map(format_rational)}),
        sim_report_json(&rep, threshold),
    ))
}

fn poisson_mc(ctx: &Ctx) -> Result<Vec<Check>, CliError> {
    let windows = poisson_windows();
    let threshold = ctx.threshold(windows.len() + 2);
    let unit = iu(&[(0, 1, 1, 1)]);
    let process = PoissonProcess::new(MeasureModel::uniform(int(0), int(1), int(1)).expect("valid"), unit.clone());
    let mut checks = Vec::new();
    for (i, q) in windows.iter().enumerate() {
        checks.push(stat_check(format!("window_{i}"), &process, q, json!({"q": q, "n": ctx.samples}), ctx, threshold)?);
    }
    let atom = PoissonProcess::new(MeasureModel::new(vec![], [(int(0), rat(7, 10))]).expect("valid"), unit.clone());
    checks.push(stat_check(
        "atom".into(),
        &atom,
        &iu(&[(0, 1, 0, 1)]),
        json!({"atom_at": "0/1", "mass": "7/10", "n": ctx.samples}),
        ctx,
        threshold,
    )?);
    let (q1, q2) = (iu(&[(0, 1, 2, 5)]), iu(&[(1, 2, 1, 1)]));
    let cov = count_covariance(&process, &q1, &q2, ctx.samples, ctx.seed);
    checks.push(Check::stat(
        "disjoint_covariance",
        cov.z.abs() <= threshold,
        json!({"q1": q1, "q2": q2, "n": cov.n}),
        json!({"covariance": 0.0}),
        json!({"estimate": cov.estimate, "std_error": cov.std_error, "z": cov.z, "z_threshold": threshold}),
    ));
    let dupes = (0..1000u64)
        .filter(|&i| process.sample(&mut stream(ctx.seed, i)).has_duplicates())
        .count();
    checks.push(Check::exact(
        "simple_point_process",
        json!({"replications": 1000}),
        json!({"replications_with_duplicates": 0}),
        json!({"replications_with_duplicates": dupes}),
    ));
    Ok(checks)
}

/// Grain measures of the compound-set comparison: `(ground size, grains)`.
pub fn compound_models() -> Vec<(usize, Vec<(usize, Rational)>)> {
    vec![
        (2, vec![(0b1, rat(7, 10))]),
        (3, vec![(0b011, int(1))]),
        (5, vec![(0b00001, rat(1, 2)), (0b00110, rat(1, 3)), (0b11100, rat(1, 4))]),
        (6, (0..6).map(|i| (1usize << i, rat(1, 5))).collect()),
        (6, vec![(0b111111, rat(1, 10)), (0b000101, rat(3, 10)), (0b100000, rat(1, 2)), (0b011010, rat(1, 5))]),
    ]
}

fn compound_mc(ctx: &Ctx) -> Result<Vec<Check>, CliError> {
    let models = compound_models();
    let comparisons: usize = models.iter().map(|(n, _)| 1 << n).sum();
    let threshold = ctx.threshold(comparisons);
    let mut checks = Vec::new();
    for (k, (n, grains)) in models.iter().enumerate() {
        let set = CompoundSet::new(grains.clone()).map_err(internal)?;
        let l = FiniteLattice::powerset_reverse(*n);
        for q in 0..(1usize << n) {
            checks.push(stat_check(
                format!("model_{k}_{}", l.label(q)),
                &set,
                &q,
                json!({
                    "model": k,
                    "grains": grains.iter().map(|(g, w)| json!([l.label(*g), r(w)])).collect::<Vec<_>>(),
                    "q": l.label(q),
                    "exponent": r(&set.exponent(q)),
                    "n": ctx.samples,
                }),
                ctx,
                threshold,
            )?);
        }
    }
    // λ = 0 never produces a grain; δ_{a,b} only ever produces ∅ or {a,b}
    let empty = CompoundSet::new(vec![]).map_err(internal)?;
    let pair = CompoundSet::new(vec![(0b11usize, int(1))]).map_err(internal)?;
    let mut nonempty = 0;
    let mut outside = 0;
    for i in 0..1000u64 {
        nonempty += (empty.sample(&mut stream(ctx.seed, i)).realized != 0) as usize;
        let s = pair.sample(&mut stream(ctx.seed, i)).realized;
        outside += (s != 0 && s != 0b11) as usize;
    }
    checks.push(Check::exact(
        "degenerate_grains",
        json!({"replications": 1000}),
        json!({"zero_measure_nonempty": 0, "pair_other_outcomes": 0}),
        json!({"zero_measure_nonempty": nonempty, "pair_other_outcomes": outside}),
    ));
    Ok(checks)
}

fn product_avoidance(p: &[Rational]) -> Result<SetFunction, CliError> {
    let n = p.len();
    let l = Arc::new(FiniteLattice::powerset_reverse(n));
    let values = l
        .elements()
        .map(|q| (0..n).filter(|i| q >> i & 1 == 1).fold(int(1), |acc, i| acc * &p[i]))
        .collect();
    SetFunction::new(l, values, Direction::Increasing).map_err(internal)
}

fn pair_grain(prob: Rational) -> Result<SetFunction, CliError> {
    let model = FiniteSpaceModel::new(2).map_err(internal)?;
    let m = DiscreteMeasure::from_weights(
        CarrierKind::ClosedSets,
        (0..=3).map(Carrier::Index).collect(),
        [(Carrier::Index(0b11), prob.clone()), (Carrier::Index(0), int(1) - prob)],
    );
    model.avoidance(&m).map_err(internal)
}

fn exp_valuation(ctx: &Ctx) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    let poisson = product_avoidance(&[rat(1, 2), rat(2, 3), rat(3, 4)])?;
    let rep = is_exponential_valuation(&poisson).map_err(internal)?;
    checks.push(Check::exact(
        "poisson_exact",
        json!({"p": ["1/2", "2/3", "3/4"]}),
        json!({"holds": true}),
        json!({"holds": rep.holds}),
    ));
    let grain = pair_grain(rat(1, 2))?;
    let rep = is_exponential_valuation(&grain).map_err(internal)?;
    let l = grain.lattice();
    checks.push(Check::exact(
        "two_point_grain_exact",
        json!({"grain": "{a,b}", "probability": "1/2"}),
        json!({"holds": false, "witness_set": ["{a}", "{b}"], "defect": "1/4"}),
        json!({
            "holds": rep.holds,
            "witness_set": rep.witness.as_ref().map(|w| w.set.iter().map(|&e| l.label(e)).collect::<Vec<_>>()),
            "defect": rep.witness.as_ref().map(|w| r(&w.value)),
        }),
    ));
    let sure = pair_grain(int(1))?;
    checks.push(Check::exact(
        "sure_two_point_grain_exact",
        json!({"grain": "{a,b}", "probability": "1/1"}),
        json!({"holds": true}),
        json!({"holds": is_exponential_valuation(&sure).map_err(internal)?.holds}),
    ));

    let threshold = ctx.threshold(2);
    let singles = CompoundSet::new(vec![(0b001usize, rat(7, 10)), (0b010, rat(1, 5)), (0b100, rat(1, 2))])
        .map_err(internal)?;
    let mc = exp_valuation_mc(&singles, [&0b011, &0b110, &0b111, &0b010], ctx.samples, ctx.seed).map_err(internal)?;
    checks.push(mc_check("poisson_mc", &mc, threshold, json!({"q1": "{a,b}", "q2": "{b,c}"})));
    let mix = MixtureSet::new(vec![(0b11usize, rat(1, 2))]).map_err(internal)?;
    let mc = exp_valuation_mc(&mix, [&0b01, &0b10, &0b11, &0b00], ctx.samples, ctx.seed).map_err(internal)?;
    checks.push(mc_check("two_point_grain_mc", &mc, threshold, json!({"q1": "{a}", "q2": "{b}"})));
    Ok(checks)
}

fn mc_check(name: &str, mc: &choquet_core::random_sets::ExpValuationMc, threshold: f64, inputs: Value) -> Check {
    Check::stat(
        name,
        mc.z.is_some_and(|z| z.abs() <= threshold),
        inputs,
        json!({"defect": mc.theory_defect}),
        json!({
            "estimates": mc.estimates,
            "defect": mc.defect,
            "std_error": mc.std_error,
            "z": mc.z,
            "z_threshold": threshold,
        }),
    )
}

fn levy(ctx: &Ctx) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    let poisson = product_avoidance(&[rat(1, 2), rat(2, 3), rat(3, 4)])?;
    let rep = levy_divisibility(&poisson, 16).map_err(internal)?;
    checks.push(Check::exact(
        "poisson",
        json!({"p": ["1/2", "2/3", "3/4"], "n_max": 16}),
        json!({"divisible": true, "indeterminate": false}),
        json!({"divisible": rep.divisible, "indeterminate": rep.indeterminate}),
    ));
    let l = Arc::new(FiniteLattice::powerset_reverse(2));
    let mixture = SetFunction::new(l.clone(), vec![int(1), rat(1, 2), rat(1, 2), int(0)], Direction::Increasing)
        .map_err(internal)?;
    let rep = levy_divisibility(&mixture, 16).map_err(internal)?;
    checks.push(Check::exact(
        "singleton_mixture",
        json!({"outcomes": [["{a}", "1/2"], ["{b}", "1/2"]]}),
        json!({"divisible": false, "support_is_filter": false, "witness": ["{a}", "{b}"]}),
        json!({
            "divisible": rep.divisible,
            "support_is_filter": rep.support_is_filter,
            "witness": rep.support_witness.map(|(x, y)| vec![l.label(x), l.label(y)]),
        }),
    ));
    for fx in &ctx.fixtures {
        let f = fx.set_function()?;
        if f.direction() != Direction::Increasing
            || !classify(&f, choquet_core::setfun::ClassId::CompletelyMonotone).map_err(internal)?.holds
        {
            continue;
        }
        let rep = levy_divisibility(&f, 16).map_err(internal)?;
        checks.push(Check::exact(
            format!("fixture_{}", fx.name),
            json!({"fixture": fx.name, "n_max": 16}),
            json!({"indeterminate": false}),
            json!({"indeterminate": rep.indeterminate, "divisible": rep.divisible}),
        ));
        // only indeterminacy is asserted for fixtures
        let last = checks.last_mut().expect("just pushed");
        last.pass = !rep.indeterminate;
    }
    Ok(checks)
}

fn lfv_suite(ctx: &Ctx) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    let opts = LfvOptions::default();
    let letters = |m: usize| FiniteLattice::powerset_reverse(5).label(m).to_string();

    let poisson = FinitePoisson { p: vec![rat(9, 10); 5] };
    let windows = [0b00001usize, 0b00011, 0b00111, 0b01111, 0b11110];
    let cert = lfv_certificate(&poisson, &windows, &opts).map_err(internal)?;
    checks.push(Check::exact(
        "poisson_finite",
        json!({"p": "9/10", "windows": windows.iter().map(|&w| letters(w)).collect::<Vec<_>>(), "delta": "1/20"}),
        json!({"verdict": "pass", "exhaustive": true, "n_within_max": true}),
        json!({
            "verdict": cert.verdict,
            "exhaustive": cert.exhaustive,
            "n_within_max": cert.n_used.is_some_and(|n| n <= opts.n_max),
        }),
    ));
    checks.last_mut().expect("pushed").got["n_used"] = json!(cert.n_used);

    let solid = SolidGrain { grain: 0b11111usize };
    let opts4 = LfvOptions { n_max: 4, ..LfvOptions::default() };
    let cert = lfv_certificate(&solid, &[0b11111], &opts4).map_err(internal)?;
    let recheck = match &cert.counterexample {
        Some(c) => Some(r(&lfv_lhs(&solid, &c.cover, 4).map_err(internal)?)),
        None => None,
    };
    checks.push(Check::exact(
        "solid_grain_finite",
        json!({"grain": letters(0b11111), "window": letters(0b11111), "n_max": 4}),
        json!({"verdict": "fail", "counterexample_lhs": "0/1"}),
        json!({"verdict": cert.verdict, "counterexample_lhs": recheck}),
    ));

    let pairs = FiniteMixture { outcomes: vec![(0b0011, rat(1, 2)), (0b1100, rat(1, 2))] };
    let cert = lfv_certificate(&pairs, &[0b1111, 0b0101], &opts).map_err(internal)?;
    checks.push(Check::exact(
        "two_point_grains_finite",
        json!({"outcomes": [["{a,b}", "1/2"], ["{c,d}", "1/2"]]}),
        json!({"verdict": "pass"}),
        json!({"verdict": cert.verdict}),
    ));

    let unit = iu(&[(0, 1, 1, 1)]);
    let solid_iv = SolidGrain { grain: unit.clone() };
    let opts6 = LfvOptions { n_max: 6, ..LfvOptions::default() };
    let cert = lfv_certificate(&solid_iv, std::slice::from_ref(&unit), &opts6).map_err(internal)?;
    checks.push(Check::exact(
        "solid_grain_interval",
        json!({"grain": unit, "n_max": 6, "budget": opts6.cover_budget}),
        json!({"verdict": "fail", "counterexample_lhs": "0/1"}),
        json!({"verdict": cert.verdict, "counterexample_lhs": cert.counterexample.as_ref().map(|c| r(&c.value))}),
    ));

    let pois_iv = IntervalPoisson {
        intensity: MeasureModel::uniform(int(0), int(1), int(1)).expect("valid"),
        base: rat(1, 2),
        unit: rat(1, 8),
    };
    let cert = lfv_certificate(&pois_iv, std::slice::from_ref(&unit), &opts).map_err(internal)?;
    checks.push(Check::exact(
        "poisson_interval",
        json!({"base": "1/2", "unit": "1/8", "budget": opts.cover_budget}),
        json!({"verdict": "inconclusive", "violations": 0}),
        json!({
            "verdict": cert.verdict,
            "violations": cert.per_cover_results.iter().filter(|c| !c.pass).count(),
        }),
    ));

    let mut rng = ctx.rng(SuiteId::LfvCertificate);
    for t in 0..100 {
        let check = if t % 4 == 3 {
            let level = rng.random_range(0..4usize);
            let family = dyadic_ladder(&unit, 16);
            let cover = &family.covers[level.min(family.covers.len() - 1)];
            let phi = IntervalPoisson { base: rat(rng.random_range(1..4), 4), ..pois_iv.clone() };
            let n = rng.random_range(0..=7usize);
            forms_check(t, &phi, cover, n, json!({"ladder_level": level, "base": r(&phi.base), "n": n}))?
        } else {
            let size = rng.random_range(1..=4usize);
            let w = random_subset(&mut rng, 5, size);
            let family = finite_cover_family(w);
            let k = rng.random_range(0..family.covers.len());
            let cover = &family.covers[k];
            let n = rng.random_range(0..=4usize);
            let inputs = |phi: &str| json!({"window": letters(w), "cover": k, "phi": phi, "n": n});
            if rng.random_bool(0.5) {
                let p: Vec<Rational> = (0..5).map(|_| rat(rng.random_range(1..10), 10)).collect();
                forms_check(t, &FinitePoisson { p }, cover, n, inputs("poisson"))?
            } else {
                let outcomes = (0..3)
                    .map(|_| (rng.random_range(1..32usize), rat(rng.random_range(1..4), 10)))
                    .collect();
                forms_check(t, &FiniteMixture { outcomes }, cover, n, inputs("mixture"))?
            }
        };
        checks.push(check);
    }
    Ok(checks)
}

fn forms_check<C: choquet_core::lfv::Compact>(
    t: usize,
    phi: &dyn AvoidanceEvaluator<C>,
    cover: &choquet_core::lfv::Covering<C>,
    n: usize,
    inputs: Value,
) -> Result<Check, CliError> {
    let opening = lfv_lhs(phi, cover, n).map_err(internal)?;
    let bound = sublattice_bound(phi, cover, n).map_err(internal)?;
    Ok(Check::exact(format!("forms_{t}"), inputs, json!({"lhs": r(&opening)}), json!({"lhs": r(&bound)})))
}

fn fixture_checks(ctx: &Ctx) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    for fx in &ctx.fixtures {
        let f = fx.set_function()?;
        for (class, expected) in fx.expectations()? {
            let got = match classify(&f, class) {
                Ok(rep) => labelled_report(&rep, f.lattice()),
                Err(e) => json!({"error": e.to_string()}),
            };
            let pass = got["holds"] == json!(expected);
            checks.push(Check {
                name: format!("{}:{class}", fx.name),
                exact: true,
                pass,
                inputs: json!({"fixture": fx.name, "class": class.to_string()}),
                expected: json!({"holds": expected}),
                got,
            });
        }
    }
    Ok(checks)
}

/// Pass/fail per suite as one line each.
pub fn summary_lines(report: &Report) -> Vec<String> {
    report
        .suites
        .iter()
        .map(|s| {
            let failed = s.failures().count();
            format!(
                "{} {} ({} checks, {} failed)",
                if s.pass { "PASS" } else { "FAIL" },
                s.suite,
                s.checks.len(),
                failed
            )
        })
        .collect()
}
