use hb_core::counterexamples::{blaschke_pair, build_counterexample, CounterexampleConfig};
use hb_core::hardy::{blaschke_series, kernel_series, outer_from_modulus, BlaschkeSpec, PythagoreanPair, DEFAULT_FLOOR};
use hb_core::norms::{abel_trace, coefficient_norm};
use hb_core::rational::{rational_pair, RationalFn};
use hb_core::series::GridFunction;
use hb_core::toeplitz::{coanalytic_apply, default_rows, membership_solve};
use hb_core::{Complex64, TaylorSeries};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn real(v: &[f64]) -> TaylorSeries {
    TaylorSeries::from_real(v)
}

fn pair_of(p: &[f64], q: &[f64], n: usize) -> PythagoreanPair {
    rational_pair(&RationalFn::new(real(p), real(q)).unwrap(), n).unwrap()
}

/// `1 − a/a_ε` with `|a_ε| = max(|a|, ε)`, by grid division.
fn clamp_defect(pair: &PythagoreanPair, eps: f64, n: usize) -> TaylorSeries {
    let m = pair.grid_size();
    let a = pair.a().to_grid(m, 1.0).unwrap();
    let w = GridFunction::new(a.samples().iter().map(|v| c(v.norm().max(eps), 0.0)).collect(), 1.0).unwrap();
    let a_eps = outer_from_modulus(&w, n, DEFAULT_FLOOR).unwrap().to_grid(m, 1.0).unwrap();
    let ratio = a.zip_with(&a_eps, |x, y| c(1.0, 0.0) - x / y).unwrap();
    TaylorSeries::from_grid(&ratio, n).unwrap()
}

fn clamp_norms(pair: &PythagoreanPair, h: &TaylorSeries, n: usize) -> Vec<f64> {
    (1..=12).map(|l| coanalytic_apply(&clamp_defect(pair, 0.5f64.powi(l), n), h, n).h2_norm()).collect()
}

const SUITE: [&[f64]; 3] = [&[1.0], &[0.0, 1.0, -0.5], &[0.3, 0.0, 0.0, 1.0, 0.2]];

#[test]
fn clamped_multiplier_tends_to_zero() {
    let n = 4096;
    let pairs = [
        pair_of(&[1.0, 1.0], &[1.0, -1.0], n),
        pair_of(&[1.0], &[1.0, -1.0], n),
        pair_of(&[1.0, 0.5], &[1.0, 0.0, -1.0], n),
    ];
    for pair in &pairs {
        for h in SUITE {
            let norms = clamp_norms(pair, &real(h), n);
            assert!(norms.windows(2).skip(4).all(|w| w[1] < w[0]), "{norms:?}");
            assert!(norms[11] <= 0.01 * norms[0], "{norms:?}");
        }
    }
}

/// A double zero of `a` on the circle is clamped on an arc of width `ε^{1/2}`,
/// and the defect decays only like `ε^{1/2}`: about 0.03 of its start by ℓ = 12.
#[test]
fn clamped_multiplier_rate_at_double_zero() {
    let n = 4096;
    let pair = pair_of(&[1.0], &[1.0, -2.0, 1.0], n);
    for h in SUITE {
        let norms = clamp_norms(&pair, &real(h), n);
        assert!(norms.windows(2).skip(4).all(|w| w[1] < w[0]), "{norms:?}");
        let slope = (norms[11] / norms[7]).log2() / 4.0;
        assert!((slope + 0.5).abs() <= 0.1, "slope {slope}: {norms:?}");
    }
}

#[test]
fn kernels_at_blaschke_zeros_have_zero_g() {
    let n = 2048;
    let spec = BlaschkeSpec::new(vec![0.5, 0.8]).unwrap();
    let b = blaschke_series(&spec, n).scale(c(0.6, 0.0));
    let pair = PythagoreanPair::new(b, TaylorSeries::constant(c(0.8, 0.0)), 4 * n).unwrap();
    let f = &kernel_series(c(0.5, 0.0), n).unwrap().scale(c(2.0, -1.0)) + &kernel_series(c(0.8, 0.0), n).unwrap();
    let res = membership_solve(&pair, &f, 32, default_rows(32, &f)).unwrap();
    assert!(res.g.h2_norm() <= 1e-5, "{}", res.g.h2_norm());
    let want = f.energy();
    assert!((res.hb_norm_sq - want).abs() <= 1e-5 * want);
}

#[test]
fn counterexample_membership_side() {
    let cfg = CounterexampleConfig { n_zeros: 4, ..CounterexampleConfig::standard(1 << 14) };
    let ce = build_counterexample(&cfg).unwrap();
    let pair = blaschke_pair(&cfg).unwrap();
    let res = membership_solve(&pair, &ce.f, 64, default_rows(64, &ce.f)).unwrap();
    let sum_c: f64 = cfg.indices().map(|n| cfg.c(n)).sum();
    assert!(res.hb_norm_sq <= sum_c * sum_c + ce.f.energy() + 0.01, "{}", res.hb_norm_sq);
}

#[test]
fn abel_value_is_constant_term_of_dilated_solution() {
    let n = 1024;
    let cases = [(&[1.0, 2.0, -1.0][..], &[1.0][..]), (&[0.0, 1.0][..], &[2.0, 1.0][..]), (&[1.0, 1.0][..], &[1.0, -1.0][..])];
    let f = TaylorSeries::new((0..=10).map(|k| c((k as f64).cos(), 0.3 * k as f64)).collect()).unwrap();
    for (p, q) in cases {
        let phi = RationalFn::new(real(p), real(q)).unwrap();
        let pair = rational_pair(&phi, n).unwrap();
        for r in [0.3, 0.7, 0.95] {
            let fr = f.dilate(r);
            let g0 = membership_solve(&pair, &fr, 20, default_rows(20, &fr)).unwrap().g.get(0);
            let abel = abel_trace(&phi.taylor(n), &f, &[r])[0];
            assert!((g0 - abel).norm() <= 1e-8, "{p:?}/{q:?} r={r}: {g0} vs {abel}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn formula_matches_oracle_for_polynomial_symbols(
        phi in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..6),
        f in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..10),
    ) {
        let phi = TaylorSeries::new(phi.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap();
        let f = TaylorSeries::new(f.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap();
        let pair = rational_pair(&RationalFn::new(phi.clone(), real(&[1.0])).unwrap(), 256).unwrap();
        let oracle = membership_solve(&pair, &f, f.degree() + 4, default_rows(f.degree() + 4, &f)).unwrap();
        let formula = coefficient_norm(&phi, &f, f.degree() + 1);
        prop_assert!((formula.norm_sq - oracle.hb_norm_sq).abs() <= 1e-8 * oracle.hb_norm_sq);
    }

    #[test]
    fn eigenvector_identity(
        psi in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..9),
        rho in 0.0f64..0.9,
        theta in 0.0f64..core::f64::consts::TAU,
    ) {
        let n = 512;
        let psi = TaylorSeries::new(psi.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap();
        let w = Complex64::from_polar(rho, theta);
        let k = kernel_series(w, n).unwrap();
        let got = coanalytic_apply(&psi, &k, n - 8);
        let want = k.truncate(n - 9).scale(psi.evaluate(w).conj());
        let bound = 10.0 * rho.powi(n as i32 - 8) * psi.l1_norm() + 64.0 * f64::EPSILON * psi.l1_norm() * k.h2_norm();
        prop_assert!((&got - &want).h2_norm() <= bound);
    }
}
