//! One function per experiment. Each returns an [`Outcome`]; nothing here
//! touches the file system.

use std::f64::consts::PI;

use hb_core::counterexamples::divergence_certificate;
use hb_core::norms::{
    coefficient_norm, convolution_bound_check, limit_norm_sweep, series_rows_trace, weighted_tail, Schedule,
    SweepVerdict, TraceVerdict,
};
use hb_core::rational::{
    circle_poles, coefficient_growth_probe, gap_counterexample, rational_membership, rational_pair, CirclePoles,
    RationalFn, TailVerdict,
};
use hb_core::toeplitz::{default_rows, kernel_search, membership_solve};
use hb_core::{Complex64, TaylorSeries};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{Experiment, ExperimentConfig};
use crate::error::{LabError, LabResult};
use crate::output::{complex, series, Outcome, Trace};
use crate::parse::{parse_poles, parse_series, SeriesSpec};

pub fn run(config: &ExperimentConfig) -> LabResult<Outcome> {
    match config.experiment {
        Experiment::Pair => pair(config),
        Experiment::NormCompare => norm_compare(config),
        Experiment::RationalDemo => rational_demo(config),
        Experiment::GapDivergence => gap_divergence(config),
        Experiment::BlaschkeCounterexample => blaschke_counterexample(config),
        Experiment::LimitSweep => limit_sweep(config),
        Experiment::KernelSearch => kernel(config),
        Experiment::SobolevCheck => sobolev_check(config),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn series_trace(name: &str, s: &TaylorSeries) -> Trace {
    let mut t = Trace::new(name);
    for (i, z) in s.coeffs().iter().enumerate() {
        t.push(i, *z, None);
    }
    t
}

fn trace_verdict(v: TraceVerdict) -> Value {
    match v {
        TraceVerdict::Converged(s) => json!({ "converged": complex(s) }),
        TraceVerdict::Divergent => json!("divergent"),
        TraceVerdict::Inconclusive => json!("inconclusive"),
    }
}

fn tail_verdict(v: TailVerdict) -> &'static str {
    match v {
        TailVerdict::SquareSummable => "square_summable",
        TailVerdict::Divergent => "divergent",
        TailVerdict::Inconclusive => "inconclusive",
    }
}

/// Per-case generator, independent of thread scheduling.
fn case_rng(seed: u64, case: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case as u64);
    rng
}

fn random_poly(rng: &mut ChaCha8Rng, deg: usize) -> TaylorSeries {
    let coeffs = (0..=deg).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    TaylorSeries::new(coeffs).expect("finite coefficients")
}

/// `p/q` with `deg p, deg q ≤ 5` and the roots of `q` on the circle (one in
/// five) or at modulus in `[1.2, 3]`.
fn random_rational(rng: &mut ChaCha8Rng) -> RationalFn {
    loop {
        let dp = rng.gen_range(0..=5);
        let p = random_poly(rng, dp);
        let mut q = TaylorSeries::constant(Complex64::new(1.0, 0.0));
        for _ in 0..rng.gen_range(0..=5) {
            let r = if rng.gen_bool(0.2) { 1.0 } else { rng.gen_range(1.2..3.0) };
            let zeta = Complex64::from_polar(r, rng.gen_range(0.0..2.0 * PI));
            let factor = TaylorSeries::new(vec![Complex64::new(1.0, 0.0), -1.0 / zeta]).expect("finite");
            q = q.cauchy_product(&factor, q.degree() + 1);
        }
        if let Ok(phi) = RationalFn::new(p, q) {
            return phi;
        }
    }
}

fn pair(config: &ExperimentConfig) -> LabResult<Outcome> {
    let phi = parse_series(config.require("phi")?)?;
    let n = config.pow2("N", 1024)?;
    let m = config.pow2("M", 4 * n)?;
    let show: usize = config.get("show", 8)?;
    let pair = phi.pair(n, m)?;
    let results = json!({
        "b": series(pair.b(), show),
        "a": series(pair.a(), show),
        "unimodularity_residual": pair.unimodularity_residual(),
        "grid_size": pair.grid_size(),
        "outer_defect": pair.outer_defect(),
    });
    Ok(Outcome {
        success: true,
        summary: format!("pair built, residual {:.2e}", pair.unimodularity_residual()),
        results,
        traces: vec![series_trace("b", pair.b()), series_trace("a", pair.a())],
    })
}

struct Comparison {
    formula: f64,
    oracle: f64,
    residual: f64,
}

fn compare(spec: &SeriesSpec, f: &TaylorSeries, n: usize, m: usize, ng: usize, rows: usize) -> LabResult<Comparison> {
    let pair = spec.pair(n, m)?;
    let oracle = membership_solve(&pair, f, ng, default_rows(ng, f))?;
    let formula = coefficient_norm(&spec.symbol(n)?, f, rows);
    Ok(Comparison { formula: formula.norm_sq, oracle: oracle.hb_norm_sq, residual: oracle.residual })
}

fn norm_compare(config: &ExperimentConfig) -> LabResult<Outcome> {
    let n = config.pow2("N", 4096)?;
    let m = config.pow2("M", 4 * n)?;
    let tol: f64 = config.get("tol", 1e-6)?;
    if let Some(phi) = config.text("phi") {
        let spec = parse_series(phi)?;
        let f = parse_series(config.require("f")?)?.function(n)?;
        let ng: usize = config.get("Ng", f.degree() + 10)?;
        let rows: usize = config.get("rows", f.degree() + 1)?;
        let c = compare(&spec, &f, n, m, ng, rows)?;
        let gap = rel(c.formula, c.oracle);
        return Ok(Outcome {
            success: gap <= tol,
            summary: format!("relative gap {gap:.2e} (tolerance {tol:e})"),
            results: json!({
                "coefficient_norm": c.formula,
                "membership_solve": c.oracle,
                "relative_gap": gap,
                "residual": c.residual,
            }),
            traces: Vec::new(),
        });
    }
    let cases: usize = config.get("cases", 100)?;
    let seed = config.seed;
    let rows: Vec<LabResult<(f64, f64, f64)>> = (0..cases)
        .into_par_iter()
        .map(|i| {
            let mut rng = case_rng(seed, i);
            let phi = random_rational(&mut rng);
            let df = rng.gen_range(0..=10);
            let f = random_poly(&mut rng, df);
            let c = compare(&SeriesSpec::Rational(phi), &f, n, m, df + 10, df + 1)?;
            Ok((c.formula, c.oracle, rel(c.formula, c.oracle)))
        })
        .collect();
    let rows = rows.into_iter().collect::<LabResult<Vec<_>>>()?;
    let worst = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    let mut trace = Trace::new("gaps");
    for (i, r) in rows.iter().enumerate() {
        trace.push(i, Complex64::new(r.2, 0.0), Some(tol));
    }
    Ok(Outcome {
        success: worst <= tol,
        summary: format!("{cases} random cases, largest relative gap {worst:.2e} (tolerance {tol:e})"),
        results: json!({
            "cases": cases,
            "max_relative_gap": worst,
            "coefficient_norm": rows.iter().map(|r| r.0).collect::<Vec<_>>(),
            "membership_solve": rows.iter().map(|r| r.1).collect::<Vec<_>>(),
        }),
        traces: vec![trace],
    })
}

fn rational_of(spec: &SeriesSpec) -> LabResult<RationalFn> {
    spec.rational().ok_or_else(|| LabError::Config("phi must be a polynomial or rational function".into()))
}

fn rational_demo(config: &ExperimentConfig) -> LabResult<Outcome> {
    let phi = rational_of(&parse_series(config.require("phi")?)?)?;
    let n = config.pow2("N", 65536)?;
    let tol: f64 = config.get("pole_tol", 1e-6)?;
    let show: usize = config.get("show", 8)?;
    let f = parse_series(config.require("f")?)?.function(n)?.truncate(n);
    let poles = circle_poles(phi.q(), tol)?;
    let split = rational_membership(&f, &poles);
    let growth = if n >= 64 { Some(coefficient_growth_probe(&phi, n)?) } else { None };
    let trace = series_rows_trace(&phi.taylor(n), &f, 0, &Schedule::Geometric { per_octave: 8 });
    let mut partial = Trace::new("row0_partial_sums");
    for (j, s) in &trace.checkpoints {
        partial.push(*j, *s, None);
    }
    let verdict = tail_verdict(split.tail_verdict);
    Ok(Outcome {
        success: split.tail_verdict != TailVerdict::Inconclusive,
        summary: format!("{} circle poles, g tail {verdict}", poles.total_multiplicity()),
        results: json!({
            "poles": poles.poles().iter().map(|(l, k)| json!([complex(*l), k])).collect::<Vec<_>>(),
            "interp": series(&split.interp, usize::MAX),
            "g": series(&split.g, show),
            "tail_verdict": verdict,
            "hermite_source": format!("{:?}", split.source),
            "derivative_tail": split.derivative_tail,
            "energy_ladder": split.energy_ladder,
            "coefficient_sup": growth.map(|g| g.0),
            "coefficient_slope": growth.map(|g| g.1),
            "row0_trace": trace_verdict(trace.verdict),
        }),
        traces: vec![series_trace("g", &split.g), partial],
    })
}

/// `1/Π(1 − λ̄ z)^m` for the listed poles.
fn pole_symbol(poles: &CirclePoles) -> LabResult<RationalFn> {
    let mut q = TaylorSeries::constant(Complex64::new(1.0, 0.0));
    for &(lambda, mult) in poles.poles() {
        for _ in 0..mult {
            let factor = TaylorSeries::new(vec![Complex64::new(1.0, 0.0), -lambda.conj()])?;
            q = q.cauchy_product(&factor, q.degree() + 1);
        }
    }
    Ok(RationalFn::new(TaylorSeries::from_real(&[1.0]), q)?)
}

fn gap_divergence(config: &ExperimentConfig) -> LabResult<Outcome> {
    let poles = parse_poles(config.text("poles").unwrap_or("1:2"))?;
    let k: usize = config.get("K", 3)?;
    let alpha: f64 = config.get("alpha", 0.75)?;
    let n = config.pow2("N", 1 << 20)?;
    let per_octave: usize = config.get("per_octave", 8)?;
    let blocks: usize = config.get("blocks", 8)?;
    let f = gap_counterexample(&poles, k, alpha, n)?;
    let phi = pole_symbol(&poles)?.taylor(n);
    let trace = series_rows_trace(&phi, &f, 0, &Schedule::Geometric { per_octave });
    let split = rational_membership(&f, &poles);
    let exponent = trace.growth_exponent(blocks);
    let mut sums = Trace::new("partial_sums");
    for (j, s) in &trace.checkpoints {
        sums.push(*j, *s, None);
    }
    let mut amps = Trace::new("block_amplitudes");
    for (b, a) in trace.block_amplitudes.iter().enumerate() {
        amps.push(b, Complex64::new(*a, 0.0), Some(100.0 * trace.roundoff_scale));
    }
    let success = trace.verdict == TraceVerdict::Divergent && split.tail_verdict == TailVerdict::SquareSummable;
    Ok(Outcome {
        success,
        summary: format!(
            "row-0 trace {}, g tail {}, growth exponent {}",
            if trace.verdict == TraceVerdict::Divergent { "divergent" } else { "not divergent" },
            tail_verdict(split.tail_verdict),
            exponent.map(|e| format!("{e:.3}")).unwrap_or_else(|| "n/a".into()),
        ),
        results: json!({
            "trace_verdict": trace_verdict(trace.verdict),
            "growth_exponent": exponent,
            "roundoff_scale": trace.roundoff_scale,
            "tail_verdict": tail_verdict(split.tail_verdict),
            "energy_ladder": split.energy_ladder,
            "hermite_source": format!("{:?}", split.source),
        }),
        traces: vec![sums, amps],
    })
}

fn blaschke_counterexample(config: &ExperimentConfig) -> LabResult<Outcome> {
    let n = config.pow2("N", 1 << 20)?;
    let preset = match parse_series(&format!("preset:{}", config.text("preset").unwrap_or("corollary_6_3")))? {
        SeriesSpec::Preset(p) => p,
        _ => unreachable!("preset prefix"),
    };
    let mut cfg = preset
        .counterexample(n)
        .ok_or_else(|| LabError::Config(format!("preset {} is not a counterexample", preset.name())))?;
    cfg.n_zeros = config.get("n_zeros", cfg.n_zeros)?;
    cfg.c_exponent = config.get("c_exponent", cfg.c_exponent)?;
    cfg.n0 = config.get("n0", cfg.n0)?;
    let cert = divergence_certificate(&cfg)?;
    let mut t = Trace::new("certificate");
    for r in &cert.records {
        t.push(r.n, r.abel_value, Some(r.lower_bound));
    }
    let records: Vec<Value> = cert
        .records
        .iter()
        .map(|r| {
            json!({
                "n": r.n,
                "t": r.t,
                "abel_value": complex(r.abel_value),
                "closed_form": r.closed_form,
                "lower_bound": r.lower_bound,
                "slack": r.slack,
                "blaschke_value": r.blaschke_value,
            })
        })
        .collect();
    Ok(Outcome {
        success: cert.verdict && cert.bound_holds && cert.positive,
        summary: format!(
            "bound {}, positive {}, growth verdict {}",
            cert.bound_holds, cert.positive, cert.verdict
        ),
        results: json!({
            "preset": preset.name(),
            "n_zeros": cfg.n_zeros,
            "c_exponent": cfg.c_exponent,
            "n0": cfg.n0,
            "records": records,
            "growth_ratios": cert.growth_ratios,
            "blaschke_inf": cert.blaschke_inf,
            "bound_holds": cert.bound_holds,
            "positive": cert.positive,
            "verdict": cert.verdict,
        }),
        traces: vec![t],
    })
}

fn limit_sweep(config: &ExperimentConfig) -> LabResult<Outcome> {
    let spec = parse_series(config.require("phi")?)?;
    let n = config.pow2("N", 65536)?;
    let levels: i32 = config.get("levels", 12)?;
    let f_spec = parse_series(config.require("f")?)?;
    let f = f_spec.function(n)?;
    let pair = match spec.rational() {
        Some(r) => rational_pair(&r, n)?,
        None => spec.pair(n, 4 * n)?,
    };
    let eps: Vec<f64> = (1..=levels).map(|j| 0.5f64.powi(j)).collect();
    let table = limit_norm_sweep(&pair, &f, &eps, n)?;
    let oracle = match &f_spec {
        SeriesSpec::Poly(p) => {
            let ng: usize = config.get("Ng", p.degree() + 10)?;
            Some(membership_solve(&pair, p, ng, default_rows(ng, p))?.hb_norm_sq)
        }
        _ => None,
    };
    let mut t = Trace::new("sweep");
    for (j, p) in table.points.iter().enumerate() {
        t.push(j + 1, Complex64::new(p.g_energy, 0.0), None);
    }
    let (verdict, success) = match table.verdict {
        SweepVerdict::Converged(v) => (json!({ "converged": v }), oracle.is_none_or(|o| rel(v, o) <= 1e-3)),
        SweepVerdict::Divergent => (json!("divergent"), true),
        SweepVerdict::Inconclusive => (json!("inconclusive"), false),
    };
    Ok(Outcome {
        success,
        summary: format!("sweep verdict {verdict}"),
        results: json!({
            "epsilon": table.points.iter().map(|p| p.epsilon).collect::<Vec<_>>(),
            "g_energy": table.points.iter().map(|p| p.g_energy).collect::<Vec<_>>(),
            "norm_sq": table.points.iter().map(|p| p.norm_sq).collect::<Vec<_>>(),
            "verdict": verdict,
            "membership_solve": oracle,
        }),
        traces: vec![t],
    })
}

fn kernel(config: &ExperimentConfig) -> LabResult<Outcome> {
    let n = config.pow2("N", 1024)?;
    let phi = parse_series(config.require("phi")?)?.symbol(n)?;
    let nf: usize = config.get("Nf", 32)?;
    let rows: usize = config.get("rows", 4 * (nf + 1))?;
    let (sigma, v) = kernel_search(&phi, nf, rows)?;
    Ok(Outcome {
        success: true,
        summary: format!("smallest singular value {sigma:.3e} of the {rows} x {} section", nf + 1),
        results: json!({ "sigma_min": sigma, "rows": rows, "Nf": nf, "vector": series(&v, usize::MAX) }),
        traces: vec![series_trace("kernel_vector", &v)],
    })
}

fn sobolev_check(config: &ExperimentConfig) -> LabResult<Outcome> {
    let cases: usize = config.get("cases", 1000)?;
    let degree: usize = config.get("degree", 64)?;
    let s_values = config.list("s", &[0.0, 0.5, 1.5])?;
    let seed = config.seed;
    let ratios: Vec<(f64, f64, f64)> = (0..cases)
        .into_par_iter()
        .map(|i| {
            let mut rng = case_rng(seed, i);
            let u = random_poly(&mut rng, degree);
            let v = random_poly(&mut rng, degree);
            let m = rng.gen_range(0..=degree);
            let s = s_values[i % s_values.len()];
            let (lhs, rhs) = convolution_bound_check(&u, &v, s, m);
            (s, lhs, rhs)
        })
        .collect();
    let violations = ratios.iter().filter(|r| r.1 > r.2).count();
    let worst = ratios.iter().map(|r| r.1 / r.2).fold(0.0, f64::max);
    let mut t = Trace::new("ratios");
    for (i, r) in ratios.iter().enumerate() {
        t.push(i, Complex64::new(r.1 / r.2, 0.0), Some(1.0));
    }
    let tail = match config.text("f") {
        Some(text) => {
            let p: f64 = config.get("p", 1.0)?;
            Some(weighted_tail(&parse_series(text)?.function(4096)?, p)?)
        }
        None => None,
    };
    Ok(Outcome {
        success: violations == 0,
        summary: format!("{violations} violations in {cases} cases, largest lhs/rhs {worst:.3}"),
        results: json!({
            "cases": cases,
            "degree": degree,
            "s": s_values,
            "violations": violations,
            "max_ratio": worst,
            "weighted_tail": tail,
        }),
        traces: vec![t],
    })
}
