//! Outer functions, Pythagorean pairs, finite Blaschke products and
//! reproducing kernels.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::fft::{self, Direction};
use crate::series::{GridFunction, TaylorSeries};
use crate::{Error, Result};

/// Default clamp for `log` in [`outer_from_modulus`].
pub const DEFAULT_FLOOR: f64 = 1e-12;
/// Largest `| |b|² + |a|² − 1 |` a pair may carry.
pub const PAIR_TOLERANCE: f64 = 1e-6;
/// The outer-idempotence check only runs where `|a|` stays above this on the grid.
pub const IDEMPOTENCE_MIN_MODULUS: f64 = 1e-3;

const MAX_ZERO_ORDER: usize = 16;

/// Degree-`n` truncation of the outer function with modulus `max(w, floor)`
/// on the unit circle grid and positive value at 0.
///
/// The log-modulus is Fourier transformed, completed to the analytic
/// function `c₀ + 2Σ c_k z^k` (Nyquist mode once), exponentiated on the grid
/// and read back with [`TaylorSeries::from_grid`].
///
/// An isolated sample at or below `floor` whose neighbours are regular is
/// treated as a zero of the modulus sitting on a grid point: its order is
/// read off the neighbours, the factor `(1 − e^{−iθ₀}z)^k` is divided out of
/// the log before the transform and multiplied back into the series. Without
/// this step the clamped sample biases `log |O(0)|` by `(log M + log floor)/M`.
pub fn outer_from_modulus(w: &GridFunction, n: usize, floor: f64) -> Result<TaylorSeries> {
    if w.radius() != 1.0 {
        return Err(Error::InvalidArgument("outer functions need samples on the unit circle".into()));
    }
    if !(floor > 0.0) {
        return Err(Error::InvalidArgument(format!("floor {floor} must be positive")));
    }
    let m = w.size();
    if n >= m {
        return Err(Error::InvalidArgument(format!("degree {n} needs more than {m} grid samples")));
    }
    let mut modulus = Vec::with_capacity(m);
    let mut clamped = 0usize;
    for (index, s) in w.samples().iter().enumerate() {
        if s.im.abs() > 1e-10 {
            return Err(Error::NonRealInput { index, imag: s.im });
        }
        if s.re < floor {
            clamped += 1;
        }
        modulus.push(s.re.max(floor));
    }
    if clamped > 0 {
        log::warn!("outer_from_modulus: clamped {clamped} of {m} samples to {floor:e}");
    }

    let zeros = grid_zeros(&modulus, floor);
    let mut logs: Vec<f64> = modulus.iter().map(|v| v.ln()).collect();
    for &(j0, k) in &zeros {
        for (j, l) in logs.iter_mut().enumerate() {
            if j != j0 {
                *l -= k as f64 * log_chord(j, j0, m);
            }
        }
    }
    for &(j0, _) in &zeros {
        let at = |d: isize| logs[(j0 as isize + d).rem_euclid(m as isize) as usize];
        let near = 0.5 * (at(-1) + at(1));
        let far = 0.5 * (at(-2) + at(2));
        logs[j0] = (4.0 * near - far) / 3.0;
    }

    let mut buf: Vec<Complex64> = logs.iter().map(|&l| Complex64::new(l, 0.0)).collect();
    fft::transform(&mut buf, Direction::Forward);
    let scale = 1.0 / m as f64;
    let c0 = buf[0].re * scale;
    let mut h = vec![Complex64::new(0.0, 0.0); m];
    h[0] = Complex64::new(c0, 0.0);
    let half = m / 2;
    for k in 1..m.div_ceil(2) {
        h[k] = buf[k] * (2.0 * scale);
    }
    if m.is_multiple_of(2) {
        h[half] = buf[half] * scale;
    }
    fft::transform(&mut h, Direction::Inverse);
    for v in h.iter_mut() {
        *v = v.exp();
    }
    let grid = GridFunction::new(h, 1.0)?;
    let mut coeffs = TaylorSeries::from_grid(&grid, n)?.into_coeffs();
    coeffs[0] = Complex64::new(c0.exp(), 0.0);
    for &(j0, k) in &zeros {
        let u = Complex64::from_polar(1.0, -crate::series::angle(j0, m));
        for _ in 0..k {
            for i in (1..coeffs.len()).rev() {
                let prev = coeffs[i - 1];
                coeffs[i] -= u * prev;
            }
        }
    }
    Ok(TaylorSeries::from_vec(coeffs))
}

/// `log |1 − e^{i(θ_j − θ_{j0})}|`.
fn log_chord(j: usize, j0: usize, m: usize) -> f64 {
    let d = (j + m - j0) % m;
    (2.0 * (PI * d as f64 / m as f64).sin()).abs().ln()
}

/// Grid points where the modulus is at the floor while the two neighbours on
/// each side are regular, paired with the zero order estimated from them.
fn grid_zeros(modulus: &[f64], floor: f64) -> Vec<(usize, usize)> {
    let m = modulus.len();
    if m < 8 {
        return Vec::new();
    }
    let at = |j: usize, d: isize| modulus[(j as isize + d).rem_euclid(m as isize) as usize];
    let s1 = log_chord(1, 0, m);
    let s2 = log_chord(2, 0, m);
    let mut out = Vec::new();
    for j in 0..m {
        if modulus[j] > floor {
            continue;
        }
        let ring = [at(j, -2), at(j, -1), at(j, 1), at(j, 2)];
        if ring.iter().any(|&v| v <= floor) {
            continue;
        }
        let l1 = 0.5 * (ring[1].ln() + ring[2].ln());
        let l2 = 0.5 * (ring[0].ln() + ring[3].ln());
        let order = ((l2 - l1) / (s2 - s1)).round();
        let order = if order.is_finite() { order.clamp(1.0, MAX_ZERO_ORDER as f64) as usize } else { 1 };
        out.push((j, order));
    }
    out
}

/// A pair `(b, a)` with `|b|² + |a|² = 1` on the circle, `a` outer and
/// `a(0) > 0`, checked on a grid at construction.
#[derive(Clone, Debug)]
pub struct PythagoreanPair {
    b: TaylorSeries,
    a: TaylorSeries,
    unimodularity_residual: f64,
    grid_size: usize,
    outer_defect: Option<f64>,
}

impl PythagoreanPair {
    /// Validates the pair on an `m`-point grid. The outer-idempotence check
    /// only runs when `min |a| ≥ 1e-3` on the grid; near boundary zeros the
    /// grid quadrature of `log |a|` is not accurate enough to decide it.
    pub fn new(b: TaylorSeries, a: TaylorSeries, m: usize) -> Result<Self> {
        let n = b.degree().max(a.degree());
        if m <= n {
            return Err(Error::InvalidPair(format!("grid size {m} cannot resolve degree {n}")));
        }
        let a0 = a.get(0);
        if a0.im.abs() > 1e-10 || !(a0.re > 0.0) {
            return Err(Error::InvalidPair(format!("a(0) = {a0} is not real positive")));
        }
        let bg = b.to_grid(m, 1.0)?;
        let ag = a.to_grid(m, 1.0)?;
        let residual = bg
            .samples()
            .iter()
            .zip(ag.samples())
            .map(|(x, y)| (x.norm_sqr() + y.norm_sqr() - 1.0).abs())
            .fold(0.0, f64::max);
        if !(residual <= PAIR_TOLERANCE) {
            return Err(Error::InvalidPair(format!("unimodularity residual {residual:e}")));
        }
        let outer_defect = if ag.min_modulus() >= IDEMPOTENCE_MIN_MODULUS {
            let again = outer_from_modulus(&ag.modulus(), a.degree(), DEFAULT_FLOOR)?;
            let defect = again.max_abs_diff(&a);
            if defect > PAIR_TOLERANCE {
                return Err(Error::InvalidPair(format!("a is not outer: idempotence defect {defect:e}")));
            }
            Some(defect)
        } else {
            None
        };
        Ok(Self { b, a, unimodularity_residual: residual, grid_size: m, outer_defect })
    }

    pub fn b(&self) -> &TaylorSeries {
        &self.b
    }

    pub fn a(&self) -> &TaylorSeries {
        &self.a
    }

    pub fn unimodularity_residual(&self) -> f64 {
        self.unimodularity_residual
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    /// Idempotence defect of `a`, when the check applied.
    pub fn outer_defect(&self) -> Option<f64> {
        self.outer_defect
    }
}

/// The mate `a = outer(√(1 − |b|²))` of `b`.
pub fn pythagorean_mate(b: &TaylorSeries, m: usize, n: usize) -> Result<PythagoreanPair> {
    let grid = b.to_grid(m, 1.0)?;
    let max_modulus = grid.max_modulus();
    if max_modulus > 1.0 + 1e-9 {
        return Err(Error::NotInUnitBall { max_modulus });
    }
    let w = grid.map(|s| Complex64::new((1.0 - s.norm_sqr()).max(0.0).sqrt(), 0.0))?;
    let a = outer_from_modulus(&w, n, DEFAULT_FLOOR)?;
    PythagoreanPair::new(b.clone(), a, m)
}

/// The pair with `φ = b/a`: `a = outer(1/√(1 + |φ|²))`, `b = φ·a`.
pub fn pair_from_smirnov(phi: &TaylorSeries, m: usize, n: usize) -> Result<PythagoreanPair> {
    let grid = phi.to_grid(m, 1.0)?;
    let w = grid.map(|s| Complex64::new(1.0 / (1.0 + s.norm_sqr()).sqrt(), 0.0))?;
    let a = outer_from_modulus(&w, n, DEFAULT_FLOOR)?;
    let b = phi.cauchy_product(&a, n);
    PythagoreanPair::new(b, a, m)
}

/// Zeros `0 < t₁ < … < t_K < 1` of a finite Blaschke product with
/// `sup (1 − t_{n+1})/(1 − t_n) < 1/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlaschkeSpec {
    zeros: Vec<f64>,
    ratio_lo: f64,
    ratio_hi: f64,
}

impl BlaschkeSpec {
    pub fn new(zeros: Vec<f64>) -> Result<Self> {
        if let Some(t) = zeros.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
            return Err(Error::InvalidBlaschke(format!("zero {t} is not in (0, 1)")));
        }
        if zeros.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidBlaschke("zeros must be strictly increasing".into()));
        }
        let ratios = zeros.windows(2).map(|w| (1.0 - w[1]) / (1.0 - w[0]));
        let (lo, hi) = ratios.fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r)));
        let (ratio_lo, ratio_hi) = if zeros.len() < 2 { (0.0, 0.0) } else { (lo, hi) };
        if zeros.len() >= 2 && !(ratio_lo > 0.0 && ratio_hi < 0.5) {
            return Err(Error::InvalidBlaschke(format!(
                "gap ratios in [{ratio_lo}, {ratio_hi}] violate the 1/2 separation"
            )));
        }
        Ok(Self { zeros, ratio_lo, ratio_hi })
    }

    /// `t_n = 1 − 4^{−n}` for `n = 1..=count`.
    pub fn quartic(count: usize) -> Self {
        let zeros = (1..=count).map(|n| 1.0 - 0.25f64.powi(n as i32)).collect();
        Self::new(zeros).expect("1 - 4^-n has ratio 1/4")
    }

    pub fn zeros(&self) -> &[f64] {
        &self.zeros
    }

    /// Smallest and largest consecutive gap ratio; both 0 with fewer than two zeros.
    pub fn ratio_lo(&self) -> f64 {
        self.ratio_lo
    }

    pub fn ratio_hi(&self) -> f64 {
        self.ratio_hi
    }

    /// `B(z) = Π (t_k − z)/(1 − t_k z)` from the product itself.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        self.zeros
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, &t| acc * (t - z) / (1.0 - t * z))
    }
}

/// Degree-`n` coefficients of the Blaschke product, one closed-form factor
/// series `t + Σ_{j≥1} t^{j−1}(t² − 1) z^j` at a time.
pub fn blaschke_series(spec: &BlaschkeSpec, n: usize) -> TaylorSeries {
    spec.zeros.iter().fold(TaylorSeries::constant(Complex64::new(1.0, 0.0)), |acc, &t| {
        let factor = TaylorSeries::from_fn(n + 1, |j| {
            if j == 0 {
                Complex64::new(t, 0.0)
            } else {
                Complex64::new(t.powi(j as i32 - 1) * (t * t - 1.0), 0.0)
            }
        });
        acc.cauchy_product(&factor, n)
    })
}

/// `min_n |B(t_n²)|` over the retained zeros; 1 for the empty product.
pub fn blaschke_inf_check(spec: &BlaschkeSpec) -> f64 {
    spec.zeros
        .iter()
        .map(|&t| spec.evaluate(Complex64::new(t * t, 0.0)).norm())
        .fold(1.0, f64::min)
}

/// Reproducing kernel `k_w = 1/(1 − w̄z)` to degree `n`.
pub fn kernel_series(w: Complex64, n: usize) -> Result<TaylorSeries> {
    let r = w.norm();
    if r >= 1.0 {
        return Err(Error::OutsideDisk { modulus: r });
    }
    let theta = w.arg();
    Ok(TaylorSeries::from_fn(n + 1, |k| {
        Complex64::from_polar(r.powi(k as i32), -theta * k as f64)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn modulus_grid(f: &TaylorSeries, m: usize) -> GridFunction {
        f.to_grid(m, 1.0).unwrap().modulus()
    }

    #[test]
    fn outer_of_constant_modulus() {
        let w = GridFunction::new(vec![c(2.0, 0.0); 64], 1.0).unwrap();
        let o = outer_from_modulus(&w, 8, DEFAULT_FLOOR).unwrap();
        assert!(o.approx_eq(&TaylorSeries::from_real(&[2.0]), 1e-14));
    }

    #[test]
    fn outer_of_chord_modulus() {
        let w = modulus_grid(&TaylorSeries::from_real(&[1.0, -1.0]), 4096);
        let o = outer_from_modulus(&w, 64, DEFAULT_FLOOR).unwrap();
        assert!(o.approx_eq(&TaylorSeries::from_real(&[1.0, -1.0]), 1e-8));
    }

    #[test]
    fn outer_handles_double_and_rotated_grid_zeros() {
        let f = TaylorSeries::from_real(&[1.0, -2.0, 1.0]);
        let o = outer_from_modulus(&modulus_grid(&f, 1024), 32, DEFAULT_FLOOR).unwrap();
        assert!(o.approx_eq(&f, 1e-10));
        // (1 - z)(1 + iz)/2: zeros at 1 and at the quarter point i.
        let g = TaylorSeries::from_vec(vec![c(0.5, 0.0), c(-0.5, 0.5), c(0.0, -0.5)]);
        let o = outer_from_modulus(&modulus_grid(&g, 1024), 32, DEFAULT_FLOOR).unwrap();
        assert!(o.approx_eq(&g, 1e-10));
    }

    #[test]
    fn outer_of_inner_times_outer_drops_the_inner_part() {
        // |z (2 + z)| = |2 + z| on the circle.
        let f = TaylorSeries::from_real(&[0.0, 2.0, 1.0]);
        let o = outer_from_modulus(&modulus_grid(&f, 256), 16, DEFAULT_FLOOR).unwrap();
        assert!(o.approx_eq(&TaylorSeries::from_real(&[2.0, 1.0]), 1e-12));
    }

    #[test]
    fn outer_clamps_like_the_clamped_input() {
        let mut s = vec![c(1.0, 0.0); 64];
        for v in s.iter_mut().skip(10).take(5) {
            *v = c(1e-20, 0.0);
        }
        let raw = GridFunction::new(s.clone(), 1.0).unwrap();
        for v in s.iter_mut() {
            v.re = v.re.max(1e-6);
        }
        let clamped = GridFunction::new(s, 1.0).unwrap();
        let a = outer_from_modulus(&raw, 16, 1e-6).unwrap();
        let b = outer_from_modulus(&clamped, 16, 1e-6).unwrap();
        assert!(a.approx_eq(&b, 1e-14));
    }

    #[test]
    fn outer_rejects_complex_samples() {
        let mut s = vec![c(1.0, 0.0); 16];
        s[3] = c(1.0, 1e-6);
        let w = GridFunction::new(s, 1.0).unwrap();
        assert_eq!(
            outer_from_modulus(&w, 4, DEFAULT_FLOOR),
            Err(Error::NonRealInput { index: 3, imag: 1e-6 })
        );
    }

    #[test]
    fn mate_examples() {
        let s = 0.5f64.sqrt();
        let p = pythagorean_mate(&TaylorSeries::from_real(&[0.0, s]), 64, 16).unwrap();
        assert!(p.a().approx_eq(&TaylorSeries::from_real(&[s]), 1e-14));

        let p = pythagorean_mate(&TaylorSeries::from_real(&[0.5, 0.5]), 1024, 32).unwrap();
        assert!(p.a().approx_eq(&TaylorSeries::from_real(&[0.5, -0.5]), 1e-10));
        assert!(p.unimodularity_residual() < 1e-8);
        assert!(p.outer_defect().is_none());

        let p = pythagorean_mate(&TaylorSeries::zero(3), 64, 8).unwrap();
        assert!(p.a().approx_eq(&TaylorSeries::from_real(&[1.0]), 1e-14));
        assert_eq!(p.outer_defect(), Some(0.0));

        assert!(matches!(
            pythagorean_mate(&TaylorSeries::from_real(&[0.6, 0.6]), 64, 8),
            Err(Error::NotInUnitBall { .. })
        ));
    }

    #[test]
    fn smirnov_examples() {
        let s = 0.5f64.sqrt();
        let p = pair_from_smirnov(&TaylorSeries::from_real(&[0.0, 1.0]), 64, 16).unwrap();
        assert!(p.b().approx_eq(&TaylorSeries::from_real(&[0.0, s]), 1e-14));
        assert!(p.a().approx_eq(&TaylorSeries::from_real(&[s]), 1e-14));

        let p = pair_from_smirnov(&TaylorSeries::zero(4), 64, 16).unwrap();
        assert!(p.b().is_zero());
        assert!(p.a().approx_eq(&TaylorSeries::from_real(&[1.0]), 1e-14));
    }

    #[test]
    fn smirnov_pair_reproduces_phi_where_a_is_large() {
        let phi = TaylorSeries::from_vec(vec![c(0.3, 0.1), c(-0.8, 0.0), c(0.0, 0.5), c(0.2, 0.0)]);
        let m = 1024;
        let p = pair_from_smirnov(&phi, m, 256).unwrap();
        let bg = p.b().to_grid(m, 1.0).unwrap();
        let ag = p.a().to_grid(m, 1.0).unwrap();
        let pg = phi.to_grid(m, 1.0).unwrap();
        for j in 0..m {
            let a = ag.samples()[j];
            if a.norm() >= 1e-3 {
                assert!((bg.samples()[j] / a - pg.samples()[j]).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn blaschke_examples() {
        let spec = BlaschkeSpec::new(vec![0.5]).unwrap();
        let b = blaschke_series(&spec, 3);
        assert!(b.approx_eq(&TaylorSeries::from_real(&[0.5, -0.75, -0.375, -0.1875]), 1e-15));
        assert!((blaschke_inf_check(&spec) - 0.25 / 0.875).abs() < 1e-15);

        let empty = BlaschkeSpec::new(vec![]).unwrap();
        assert!(blaschke_series(&empty, 5).approx_eq(&TaylorSeries::from_real(&[1.0]), 0.0));
        assert_eq!(blaschke_inf_check(&empty), 1.0);

        let spec = BlaschkeSpec::quartic(3);
        let b = blaschke_series(&spec, 1024);
        assert!(b.evaluate(c(0.75, 0.0)).norm() < 1e-10);
        assert!((spec.ratio_hi() - 0.25).abs() < 1e-12);
        assert!(blaschke_inf_check(&BlaschkeSpec::quartic(7)) > 0.01);
    }

    #[test]
    fn blaschke_spec_validation() {
        assert!(BlaschkeSpec::new(vec![0.5, 0.4]).is_err());
        assert!(BlaschkeSpec::new(vec![0.0]).is_err());
        // (1 - 0.75)/(1 - 0.5) = 1/2 is not strictly below 1/2.
        assert!(BlaschkeSpec::new(vec![0.5, 0.75]).is_err());
    }

    #[test]
    fn blaschke_boundary_modulus() {
        let spec = BlaschkeSpec::quartic(4);
        // Factor series tail at degree n: t_K^n / (1 - t_K) ≈ 1e-28 for n = 4096.
        let n = 4096;
        let g = blaschke_series(&spec, n).to_grid(2 * n, 1.0).unwrap();
        let dev = g.samples().iter().map(|s| (s.norm() - 1.0).abs()).fold(0.0, f64::max);
        assert!(dev < 1e-6, "{dev}");
    }

    #[test]
    fn kernel_examples() {
        assert!(kernel_series(c(0.0, 0.0), 3).unwrap().approx_eq(&TaylorSeries::from_real(&[1.0]), 0.0));
        assert!(kernel_series(c(0.5, 0.0), 2)
            .unwrap()
            .approx_eq(&TaylorSeries::from_real(&[1.0, 0.5, 0.25]), 1e-15));
        let k = kernel_series(c(0.0, 0.5), 2).unwrap();
        let want = TaylorSeries::from_vec(vec![c(1.0, 0.0), c(0.0, -0.5), c(-0.25, 0.0)]);
        assert!(k.approx_eq(&want, 1e-15));
        assert!(matches!(kernel_series(c(1.0, 0.0), 2), Err(Error::OutsideDisk { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn outer_is_idempotent(re in proptest::collection::vec(-1.0f64..1.0, 1..8),
                               im in proptest::collection::vec(-1.0f64..1.0, 8)) {
            // 3 + small polynomial: zero free on the closed disk, hence outer.
            let mut coeffs: Vec<Complex64> = re.iter().zip(&im).map(|(&x, &y)| c(0.3 * x, 0.3 * y)).collect();
            coeffs[0] = c(3.0, 0.0);
            let f = TaylorSeries::from_vec(coeffs);
            let o = outer_from_modulus(&modulus_grid(&f, 512), 64, DEFAULT_FLOOR).unwrap();
            prop_assert!(o.approx_eq(&f, 1e-7));
            let again = outer_from_modulus(&modulus_grid(&o, 512), 64, DEFAULT_FLOOR).unwrap();
            prop_assert!(again.approx_eq(&o, 1e-7));
        }

        #[test]
        fn kernel_norm(r in 0.0f64..0.95, theta in 0.0f64..core::f64::consts::TAU) {
            let w = Complex64::from_polar(r, theta);
            let n = 400;
            let k = kernel_series(w, n).unwrap();
            let want = 1.0 / (1.0 - r * r);
            let tail = r.powi(2 * (n as i32 + 1)) / (1.0 - r * r);
            prop_assert!((k.energy() - want).abs() <= tail + 1e-12 * want);
        }
    }
}
