//! The single-shot subcommands: one JSON file in, one JSON document out.

use std::path::Path;

use serde_json::{json, Value};

use choquet_core::choquet::{choquet_represent, evaluate, ChoquetError, Mode};
use choquet_core::io::{load_set_function, read, MeasureFile};
use choquet_core::lattice::FiniteLattice;
use choquet_core::lfv::{lfv_certificate, Compact, LfvCertificate, LfvOptions, LfvVerdict};
use choquet_core::oracle::{solve_mode, Solution};
use choquet_core::random_sets::{
    count_events, estimate_functional, z_compare, Functional, RandomSetModel, SimReport, Verdict,
};
use choquet_core::rational::format_rational;
use choquet_core::setfun::{classify_with, ClassId, ClassReport, ClassifyOptions, SetFunction};
use choquet_core::space::IntervalUnion;

use crate::models::{finite_windows, interval_windows, Ground, ModelSpec, Phi, PhiSpec, SimModel};
use crate::CliError;

/// Output document and whether the command's own check passed.
pub struct Outcome {
    pub doc: Value,
    pub ok: bool,
}

fn load(path: &Path) -> Result<SetFunction, CliError> {
    load_set_function(path).map_err(|e| CliError::Config(e.to_string()))
}

fn parse_json(path: &Path) -> Result<Value, CliError> {
    let text = read(path).map_err(|e| CliError::Config(e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Class report with element labels next to the indices.
pub fn labelled_report(r: &ClassReport, l: &FiniteLattice) -> Value {
    let mut v = serde_json::to_value(r).expect("serializable");
    if let Some(w) = &r.witness {
        v["witness"]["labels"] = json!({
            "set": w.set.iter().map(|&e| l.label(e)).collect::<Vec<_>>(),
            "x": l.label(w.x),
        });
    }
    v
}

pub fn represent(input: &Path, mode: Mode) -> Result<Outcome, CliError> {
    let f = load(input)?;
    let l = f.lattice();
    let m = match choquet_represent(&f, mode) {
        Ok(m) => m,
        Err(ChoquetError::ClassificationFailed(report)) => {
            return Ok(Outcome {
                doc: json!({
                    "mode": mode.to_string(),
                    "error": "classification_failed",
                    "class": labelled_report(&report, l),
                }),
                ok: false,
            })
        }
        Err(e) => return Err(CliError::Config(e.to_string())),
    };
    let forward = evaluate(&m, l, mode);
    let forward_matches = forward.as_slice() == f.values();
    let solve = match solve_mode(l, mode, f.values()) {
        Solution::Unique(w) => {
            let same = mode.carrier(l).into_iter().zip(&w).all(|(c, v)| &m.weight(c) == v);
            if same { "unique_match" } else { "unique_mismatch" }
        }
        Solution::NotUnique => "not_unique",
        Solution::Inconsistent => "inconsistent",
    };
    let ok = forward_matches && solve == "unique_match";
    Ok(Outcome {
        doc: json!({
            "mode": mode.to_string(),
            "measure": MeasureFile::from_measure(&m, l),
            "transcript": {
                "required_class": mode.required_class().to_string(),
                "forward_matches": forward_matches,
                "linear_solve": solve,
                "total_mass": format_rational(&m.total()),
            },
        }),
        ok,
    })
}

pub fn classify(input: &Path, class: ClassId, full_subsets: bool) -> Result<Outcome, CliError> {
    let f = load(input)?;
    let r = classify_with(&f, class, ClassifyOptions { full_subsets })
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(Outcome {
        doc: labelled_report(&r, f.lattice()),
        ok: true,
    })
}

pub struct SimulateArgs<'a> {
    pub model: &'a Path,
    pub functional: Functional,
    pub q: &'a Path,
    pub n: u64,
    pub seed: u64,
    pub z: f64,
    pub csv: Option<&'a Path>,
}

pub fn sim_report_json(r: &SimReport, z_threshold: f64) -> Value {
    json!({
        "functional": r.functional,
        "estimate": r.estimate,
        "std_error": r.std_error,
        "theory": r.theory,
        "theory_exact": r.theory_exact.as_ref().map(format_rational),
        "z": r.z,
        "count": r.count,
        "n": r.n,
        "seed": r.seed,
        "z_threshold": z_threshold,
        "verdict": z_compare(r, z_threshold),
        "exact": false,
    })
}

pub fn simulate(args: &SimulateArgs) -> Result<Outcome, CliError> {
    if args.n == 0 {
        return Err(CliError::Config("--n must be at least 1".into()));
    }
    let spec: ModelSpec = serde_json::from_value(parse_json(args.model)?)
        .map_err(|e| CliError::Config(format!("model: {e}")))?;
    let q = parse_json(args.q)?;
    let finite_q = |g: &Ground| -> Result<usize, CliError> {
        let labels: Vec<String> =
            serde_json::from_value(q.clone()).map_err(|e| CliError::Config(format!("query: {e}")))?;
        g.mask(&labels)
    };
    match spec.build()? {
        SimModel::Poisson(p) => {
            let q: IntervalUnion =
                serde_json::from_value(q.clone()).map_err(|e| CliError::Config(format!("query: {e}")))?;
            run_sim(&p, &q, args)
        }
        SimModel::Compound(g, m) => run_sim(&m, &finite_q(&g)?, args),
        SimModel::Mixture(g, m) => run_sim(&m, &finite_q(&g)?, args),
    }
}

const BATCH: u64 = 10_000;

fn run_sim<M: RandomSetModel>(model: &M, q: &M::Query, args: &SimulateArgs) -> Result<Outcome, CliError> {
    let r = estimate_functional(model, args.functional, q, args.n, args.seed)
        .map_err(|e| CliError::Config(e.to_string()))?;
    if let Some(path) = args.csv {
        let mut csv = String::from("batch,first,size,count\n");
        let mut first = 0;
        let mut b = 0;
        while first < args.n {
            let size = BATCH.min(args.n - first);
            let c = count_events(model, size, args.seed, first, |s| {
                model.hits(s, q) == (args.functional == Functional::Hitting)
            });
            csv.push_str(&format!("{b},{first},{size},{c}\n"));
            first += size;
            b += 1;
        }
        crate::report::write_file(path, &csv)?;
    }
    let ok = z_compare(&r, args.z) == Verdict::Pass;
    Ok(Outcome { doc: sim_report_json(&r, args.z), ok })
}

pub struct LfvArgs<'a> {
    pub phi: &'a str,
    pub window: &'a Path,
    pub opts: LfvOptions,
}

pub fn lfv(args: &LfvArgs) -> Result<Outcome, CliError> {
    let spec = match PhiSpec::builtin(args.phi) {
        Some(s) => s,
        None => serde_json::from_value(parse_json(Path::new(args.phi))?)
            .map_err(|e| CliError::Config(format!("phi: {e}")))?,
    };
    let windows = parse_json(args.window)?;
    match spec.build()? {
        Phi::Finite(g, phi) => {
            let ws = finite_windows(&windows, &g)?;
            let cert = lfv_certificate(phi.as_ref(), &ws, &args.opts)
                .map_err(|e| CliError::Config(e.to_string()))?;
            Ok(certificate_outcome(&cert, |m| json!(g.labels(*m))))
        }
        Phi::Interval(phi) => {
            let ws = interval_windows(&windows)?;
            let cert = lfv_certificate(phi.as_ref(), &ws, &args.opts)
                .map_err(|e| CliError::Config(e.to_string()))?;
            Ok(certificate_outcome(&cert, |q| serde_json::to_value(q).expect("serializable")))
        }
    }
}

/// Certificate JSON with compact sets rendered by `show`.
pub fn certificate_json<C: Compact>(cert: &LfvCertificate<C>, show: impl Fn(&C) -> Value) -> Value {
    json!({
        "delta": format_rational(&cert.delta),
        "n_max": cert.n_max,
        "n_used": cert.n_used,
        "exhaustive": cert.exhaustive,
        "verdict": cert.verdict,
        "per_cover_results": cert.per_cover_results,
        "counterexample": cert.counterexample.as_ref().map(|c| json!({
            "window": c.window,
            "n": c.n,
            "value": format_rational(&c.value),
            "cover": {
                "window": show(&c.cover.window),
                "members": c.cover.members.iter().map(&show).collect::<Vec<_>>(),
            },
        })),
        "exact": true,
    })
}

fn certificate_outcome<C: Compact>(cert: &LfvCertificate<C>, show: impl Fn(&C) -> Value) -> Outcome {
    Outcome {
        doc: certificate_json(cert, show),
        ok: cert.verdict != LfvVerdict::Fail,
    }
}
