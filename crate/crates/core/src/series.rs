//! Truncated Taylor series and circle-grid samples.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::fft::{self, Direction};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Operands at or below this length are multiplied by the direct sum, which
/// is exact to roundoff relative to each output entry.
pub(crate) const DIRECT_LIMIT: usize = 32;

/// Largest `ρ^{-N}` that [`TaylorSeries::from_grid`] will accept.
pub const AMPLIFICATION_LIMIT: f64 = 1e8;

/// Coefficients `f̂(0), …, f̂(d)` of a truncated power series.
///
/// Trailing zeros are kept; equality via [`TaylorSeries::approx_eq`] pads the
/// shorter operand with zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct TaylorSeries {
    coeffs: Vec<Complex64>,
}

impl TaylorSeries {
    /// Fails on NaN or infinite entries. An empty vector becomes the zero series.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if let Some(i) = coeffs.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidArgument(alloc::format!("coefficient {i} is not finite")));
        }
        Ok(Self::from_vec(coeffs))
    }

    pub(crate) fn from_vec(mut coeffs: Vec<Complex64>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(ZERO);
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::from_vec(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn from_fn(len: usize, f: impl FnMut(usize) -> Complex64) -> Self {
        Self::from_vec((0..len).map(f).collect())
    }

    pub fn zero(degree: usize) -> Self {
        Self::from_vec(vec![ZERO; degree + 1])
    }

    pub fn constant(c: Complex64) -> Self {
        Self::from_vec(vec![c])
    }

    /// `z^k`.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![ZERO; k + 1];
        coeffs[k] = Complex64::new(1.0, 0.0);
        Self::from_vec(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coefficient `n`, zero past the truncation.
    pub fn get(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or(ZERO)
    }

    /// Index of the last nonzero coefficient (0 for the zero series).
    pub fn effective_degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| *c != ZERO).unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    /// Resizes to degree `n`, dropping or zero-padding coefficients.
    pub fn truncate(&self, n: usize) -> Self {
        let mut coeffs: Vec<Complex64> = self.coeffs.iter().take(n + 1).copied().collect();
        coeffs.resize(n + 1, ZERO);
        Self::from_vec(coeffs)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_vec(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn conj_coeffs(&self) -> Self {
        Self::from_vec(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    /// Coefficient-wise comparison after zero padding.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let n = self.len().max(other.len());
        (0..n).map(|k| (self.get(k) - other.get(k)).norm()).fold(0.0, f64::max)
    }

    /// `Σ f̂(n) zⁿ` by Horner's rule. Points outside the closed disk are
    /// evaluated but logged, since truncation error is unbounded there.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        if z.norm() > 1.0 + 1e-12 {
            log::warn!("evaluating a truncated series at |z| = {} > 1", z.norm());
        }
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * z + c)
    }

    /// `√Σ|f̂(n)|²`.
    pub fn h2_norm(&self) -> f64 {
        self.energy().sqrt()
    }

    /// `Σ|f̂(n)|²`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `Σ|f̂(n)|`.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// The r-dilation `z ↦ f(rz)`, coefficient `n` scaled by `rⁿ`.
    pub fn dilate(&self, r: f64) -> Self {
        debug_assert!(r > 0.0 && r <= 1.0);
        Self::from_vec(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| c * r.powi(n as i32))
                .collect(),
        )
    }

    /// First `n + 1` coefficients of `f·g`.
    pub fn cauchy_product(&self, other: &Self, n: usize) -> Self {
        let keep = n + 1;
        let a = &self.coeffs[..self.len().min(keep)];
        let b = &other.coeffs[..other.len().min(keep)];
        if a.len().min(b.len()) <= DIRECT_LIMIT {
            return Self::from_vec(direct_product(a, b, keep));
        }
        Self::from_vec(fft::convolve(a, b, keep))
    }

    /// Samples `f(ρ e^{2πij/M})` for `j = 0..M`.
    pub fn to_grid(&self, m: usize, radius: f64) -> Result<GridFunction> {
        if m < 2 || m < self.len() {
            return Err(Error::InvalidArgument(alloc::format!(
                "grid of size {m} cannot resolve degree {}",
                self.degree()
            )));
        }
        check_radius(radius)?;
        let mut buf = vec![ZERO; m];
        for (n, c) in self.coeffs.iter().enumerate() {
            buf[n] = if radius == 1.0 { *c } else { c * radius.powi(n as i32) };
        }
        fft::transform(&mut buf, Direction::Inverse);
        GridFunction::new(buf, radius)
    }

    /// Coefficients `0..=n` recovered from grid samples: the inverse DFT
    /// divided by `ρⁿ`. Exact to roundoff for polynomials of degree `< M` at ρ = 1.
    pub fn from_grid(w: &GridFunction, n: usize) -> Result<Self> {
        let m = w.size();
        if n >= m {
            return Err(Error::InvalidArgument(alloc::format!(
                "degree {n} needs more than {m} grid samples"
            )));
        }
        let rho = w.radius();
        if rho < 1.0 {
            let factor = rho.powi(-(n as i32));
            if !(factor <= AMPLIFICATION_LIMIT) {
                return Err(Error::Amplification { degree: n, factor });
            }
        }
        let mut buf = w.samples().to_vec();
        fft::transform(&mut buf, Direction::Forward);
        let scale = 1.0 / m as f64;
        let coeffs = (0..=n)
            .map(|k| {
                let c = buf[k] * scale;
                if rho == 1.0 {
                    c
                } else {
                    c / rho.powi(k as i32)
                }
            })
            .collect();
        Ok(Self::from_vec(coeffs))
    }
}

fn direct_product(a: &[Complex64], b: &[Complex64], keep: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; keep];
    for (i, x) in a.iter().enumerate() {
        if *x == ZERO {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(keep.saturating_sub(i)) {
            out[i + j] += x * y;
        }
    }
    out
}

fn check_radius(radius: f64) -> Result<()> {
    if radius > 0.0 && radius <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(alloc::format!("radius {radius} not in (0, 1]")))
    }
}

impl Add for &TaylorSeries {
    type Output = TaylorSeries;
    fn add(self, rhs: &TaylorSeries) -> TaylorSeries {
        let n = self.len().max(rhs.len());
        TaylorSeries::from_fn(n, |k| self.get(k) + rhs.get(k))
    }
}

impl Sub for &TaylorSeries {
    type Output = TaylorSeries;
    fn sub(self, rhs: &TaylorSeries) -> TaylorSeries {
        let n = self.len().max(rhs.len());
        TaylorSeries::from_fn(n, |k| self.get(k) - rhs.get(k))
    }
}

impl Neg for &TaylorSeries {
    type Output = TaylorSeries;
    fn neg(self) -> TaylorSeries {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul<Complex64> for &TaylorSeries {
    type Output = TaylorSeries;
    fn mul(self, rhs: Complex64) -> TaylorSeries {
        self.scale(rhs)
    }
}

/// Samples on the circle of radius ρ at angles `2πj/M`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    samples: Vec<Complex64>,
    radius: f64,
}

impl GridFunction {
    pub fn new(samples: Vec<Complex64>, radius: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidArgument("a grid needs at least two samples".into()));
        }
        check_radius(radius)?;
        if let Some(i) = samples.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidArgument(alloc::format!("grid sample {i} is not finite")));
        }
        Ok(Self { samples, radius })
    }

    /// Samples `f(e^{2πij/M})` of a closure on the unit circle.
    pub fn on_circle(m: usize, mut f: impl FnMut(f64) -> Complex64) -> Result<Self> {
        Self::new((0..m).map(|j| f(angle(j, m))).collect(), 1.0)
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn size(&self) -> usize {
        self.samples.len()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn angle(&self, j: usize) -> f64 {
        angle(j, self.size())
    }

    /// Pointwise modulus as a real-valued grid.
    pub fn modulus(&self) -> Self {
        Self {
            samples: self.samples.iter().map(|c| Complex64::new(c.norm(), 0.0)).collect(),
            radius: self.radius,
        }
    }

    pub fn map(&self, mut f: impl FnMut(Complex64) -> Complex64) -> Result<Self> {
        Self::new(self.samples.iter().map(|&c| f(c)).collect(), self.radius)
    }

    pub fn zip_with(&self, other: &Self, mut f: impl FnMut(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.size() != other.size() || self.radius != other.radius {
            return Err(Error::InvalidArgument("grid shapes differ".into()));
        }
        Self::new(
            self.samples.iter().zip(&other.samples).map(|(&a, &b)| f(a, b)).collect(),
            self.radius,
        )
    }

    /// `(1/M) Σ_j |w_j|²`.
    pub fn mean_square(&self) -> f64 {
        self.samples.iter().map(|c| c.norm_sqr()).sum::<f64>() / self.size() as f64
    }

    pub fn max_modulus(&self) -> f64 {
        self.samples.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn min_modulus(&self) -> f64 {
        self.samples.iter().map(|c| c.norm()).fold(f64::INFINITY, f64::min)
    }
}

pub(crate) fn angle(j: usize, m: usize) -> f64 {
    2.0 * PI * j as f64 / m as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn evaluate_examples() {
        let f = TaylorSeries::from_real(&[1.0, -1.0]);
        assert!((f.evaluate(c(0.5, 0.0)) - c(0.5, 0.0)).norm() < 1e-15);

        let ones = TaylorSeries::from_real(&[1.0; 100]);
        assert_eq!(ones.evaluate(c(0.0, 0.0)), c(1.0, 0.0));

        // Truncated kernel at 0.9: tail bound 0.81^201 / 0.19.
        let k = TaylorSeries::from_fn(201, |n| c(0.9f64.powi(n as i32), 0.0));
        let want = 1.0 / (1.0 - 0.81);
        let tail = 0.81f64.powi(201) / 0.19;
        assert!((k.evaluate(c(0.9, 0.0)).re - want).abs() <= tail + 1e-12);
    }

    #[test]
    fn cauchy_product_examples() {
        let f = TaylorSeries::from_real(&[1.0, 1.0]);
        let g = TaylorSeries::from_real(&[1.0, -1.0]);
        assert!(f.cauchy_product(&g, 2).approx_eq(&TaylorSeries::from_real(&[1.0, 0.0, -1.0]), 1e-15));

        let g = TaylorSeries::from_real(&[0.3, -2.0, 7.5, 1.25]);
        let one = TaylorSeries::from_real(&[1.0]);
        assert!(one.cauchy_product(&g, 3).approx_eq(&g, 1e-15));

        // 1/(1-z) squared: coefficient n is n + 1 (direct convolution oracle).
        let geo = TaylorSeries::from_real(&[1.0; 11]);
        let sq = geo.cauchy_product(&geo, 10);
        let want: Vec<f64> = (1..=11).map(|n| n as f64).collect();
        assert!(sq.approx_eq(&TaylorSeries::from_real(&want), 1e-12));
    }

    #[test]
    fn fft_product_matches_direct_for_long_inputs() {
        let f = TaylorSeries::from_fn(200, |n| c((n as f64).sin(), (0.3 * n as f64).cos()));
        let g = TaylorSeries::from_fn(150, |n| c(1.0 / (1.0 + n as f64), -0.5));
        let fast = f.cauchy_product(&g, 300);
        let slow = TaylorSeries::from_vec(direct_product(f.coeffs(), g.coeffs(), 301));
        assert!(fast.approx_eq(&slow, 1e-12));
    }

    #[test]
    fn dilate_examples() {
        let f = TaylorSeries::from_real(&[1.0, 1.0, 1.0]);
        assert_eq!(f.dilate(1.0), f);
        let z = TaylorSeries::from_real(&[0.0, 1.0]);
        assert!(z.dilate(0.5).approx_eq(&TaylorSeries::from_real(&[0.0, 0.5]), 0.0));
        let t: f64 = 0.8;
        let r = 0.6;
        let k = TaylorSeries::from_fn(40, |n| c(t.powi(n as i32), 0.0));
        let krt = TaylorSeries::from_fn(40, |n| c((r * t).powi(n as i32), 0.0));
        assert!(k.dilate(r).approx_eq(&krt, 1e-15));
    }

    #[test]
    fn grid_examples() {
        let one = TaylorSeries::from_real(&[1.0]);
        let w = one.to_grid(6, 1.0).unwrap();
        assert!(w.samples().iter().all(|s| (s - c(1.0, 0.0)).norm() < 1e-15));

        let z = TaylorSeries::from_real(&[0.0, 1.0]);
        let w = z.to_grid(4, 1.0).unwrap();
        let want = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        for (s, e) in w.samples().iter().zip(&want) {
            assert!((s - e).norm() < 1e-15);
        }

        let f = TaylorSeries::from_real(&[1.0, 1.0]);
        let w = f.to_grid(8, 1.0).unwrap();
        for (j, s) in w.samples().iter().enumerate() {
            let zj = Complex64::from_polar(1.0, angle(j, 8));
            assert!((s - f.evaluate(zj)).norm() < 1e-13);
        }
    }

    #[test]
    fn from_grid_examples() {
        let f = TaylorSeries::from_real(&[1.0, 2.0, 3.0]);
        let w = f.to_grid(8, 1.0).unwrap();
        assert!(TaylorSeries::from_grid(&w, 2).unwrap().approx_eq(&f, 1e-12));

        let ones = GridFunction::new(vec![c(1.0, 0.0); 5], 1.0).unwrap();
        assert!(TaylorSeries::from_grid(&ones, 0).unwrap().approx_eq(&TaylorSeries::from_real(&[1.0]), 1e-15));

        let k = TaylorSeries::from_fn(51, |n| c(0.5f64.powi(n as i32), 0.0));
        let w = k.to_grid(256, 1.0).unwrap();
        assert!(TaylorSeries::from_grid(&w, 50).unwrap().approx_eq(&k, 1e-10));
    }

    #[test]
    fn from_grid_guards_amplification() {
        let f = TaylorSeries::from_real(&[1.0, 1.0]);
        let w = f.to_grid(64, 0.5).unwrap();
        assert!(TaylorSeries::from_grid(&w, 20).is_ok());
        assert!(matches!(TaylorSeries::from_grid(&w, 30), Err(Error::Amplification { .. })));
        let back = TaylorSeries::from_grid(&w, 1).unwrap();
        assert!(back.approx_eq(&f, 1e-13));
    }

    #[test]
    fn h2_norm_examples() {
        assert_eq!(TaylorSeries::from_real(&[3.0, 4.0]).h2_norm(), 5.0);
        assert_eq!(TaylorSeries::zero(7).h2_norm(), 0.0);
        assert!((TaylorSeries::from_real(&[1.0; 100]).h2_norm() - 10.0).abs() < 1e-13);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(TaylorSeries::new(vec![c(f64::NAN, 0.0)]).is_err());
        assert!(GridFunction::new(vec![c(1.0, 0.0)], 1.0).is_err());
        assert!(GridFunction::new(vec![c(1.0, 0.0); 4], 1.5).is_err());
    }
}
