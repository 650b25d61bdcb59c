//! Small dense kernels: Householder least squares, a 1-norm condition
//! estimate for triangular factors, and polynomial roots.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Column-major dense matrix.
#[derive(Clone, Debug)]
pub(crate) struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[j * self.rows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[j * self.rows + i] = v;
    }

    fn col(&self, j: usize) -> &[Complex64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    fn col_mut(&mut self, j: usize) -> &mut [Complex64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }
}

pub(crate) struct LeastSquares {
    pub x: Vec<Complex64>,
    /// Norm of the part of the right-hand side outside the column space.
    pub residual: f64,
    /// Estimated 1-norm condition number of the triangular factor.
    pub condition: f64,
}

/// Minimizes `‖A x − b‖` by Householder QR. Requires `rows ≥ cols`.
///
/// Columns already zero below the diagonal are left alone, so triangular and
/// banded inputs cost little more than a back substitution.
pub(crate) fn least_squares(mut a: Matrix, mut b: Vec<Complex64>) -> LeastSquares {
    let (m, n) = (a.rows, a.cols);
    debug_assert!(m >= n && b.len() == m);
    let mut v = vec![ZERO; m];
    for k in 0..n {
        let below: f64 = a.col(k)[k + 1..].iter().map(|c| c.norm_sqr()).sum();
        if below == 0.0 {
            continue;
        }
        let x0 = a.get(k, k);
        let norm = (x0.norm_sqr() + below).sqrt();
        let phase = if x0 == ZERO { ONE } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        v[k] = x0 - alpha;
        v[k + 1..m].copy_from_slice(&a.col(k)[k + 1..]);
        let vnorm2 = v[k].norm_sqr() + below;
        let apply = |col: &mut [Complex64], v: &[Complex64]| {
            let dot: Complex64 = v[k..m].iter().zip(&col[k..m]).map(|(vi, ci)| vi.conj() * ci).sum();
            let s = dot * (2.0 / vnorm2);
            for (ci, vi) in col[k..m].iter_mut().zip(&v[k..m]) {
                *ci -= s * vi;
            }
        };
        for j in k + 1..n {
            apply(a.col_mut(j), &v);
        }
        apply(&mut b, &v);
        let col = a.col_mut(k);
        col[k] = alpha;
        for c in &mut col[k + 1..] {
            *c = ZERO;
        }
    }
    let residual = b[n..].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let r = Triangular { a: &a, n };
    let x = r.solve(&b[..n]);
    let condition = r.condition_estimate();
    LeastSquares { x, residual, condition }
}

/// The leading `n × n` upper triangle of a factored matrix.
struct Triangular<'a> {
    a: &'a Matrix,
    n: usize,
}

impl Triangular<'_> {
    fn solve(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        let mut x = rhs.to_vec();
        for i in (0..self.n).rev() {
            let d = self.a.get(i, i);
            x[i] = if d == ZERO { ZERO } else { x[i] / d };
            let xi = x[i];
            let col = self.a.col(i);
            for (xr, c) in x[..i].iter_mut().zip(&col[..i]) {
                *xr -= c * xi;
            }
        }
        x
    }

    fn solve_adjoint(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        let mut x = rhs.to_vec();
        for i in 0..self.n {
            let col = self.a.col(i);
            let s: Complex64 = col[..i].iter().zip(&x[..i]).map(|(c, xr)| c.conj() * xr).sum();
            let d = self.a.get(i, i).conj();
            x[i] = if d == ZERO { ZERO } else { (x[i] - s) / d };
        }
        x
    }

    fn norm1(&self) -> f64 {
        (0..self.n)
            .map(|j| self.a.col(j)[..=j].iter().map(|c| c.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `‖R‖₁ · est(‖R⁻¹‖₁)` with Hager's iteration plus Higham's
    /// alternating test vector. Infinite for a singular factor.
    fn condition_estimate(&self) -> f64 {
        let n = self.n;
        if n == 0 {
            return 1.0;
        }
        if (0..n).any(|i| self.a.get(i, i) == ZERO) {
            return f64::INFINITY;
        }
        let l1 = |v: &[Complex64]| v.iter().map(|c| c.norm()).sum::<f64>();
        let mut x = vec![Complex64::new(1.0 / n as f64, 0.0); n];
        let mut est = 0.0;
        let mut last = usize::MAX;
        for _ in 0..5 {
            let y = self.solve(&x);
            est = f64::max(est, l1(&y));
            let xi: Vec<Complex64> = y
                .iter()
                .map(|c| if c.norm() == 0.0 { ONE } else { c / c.norm() })
                .collect();
            let z = self.solve_adjoint(&xi);
            let (j, zmax) = z
                .iter()
                .enumerate()
                .map(|(j, c)| (j, c.norm()))
                .fold((0, -1.0), |acc, v| if v.1 > acc.1 { v } else { acc });
            let ztx: f64 = z.iter().zip(&x).map(|(zi, xi)| (zi.conj() * xi).re).sum();
            if zmax <= ztx || j == last {
                break;
            }
            last = j;
            x = vec![ZERO; n];
            x[j] = ONE;
        }
        if n > 1 {
            let alt: Vec<Complex64> = (0..n)
                .map(|i| {
                    let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                    Complex64::new(s * (1.0 + i as f64 / (n - 1) as f64), 0.0)
                })
                .collect();
            let y = self.solve(&alt);
            est = f64::max(est, 2.0 * l1(&y) / (3.0 * n as f64));
        }
        self.norm1() * est
    }
}

/// Roots of `Σ c_k z^k` (ascending coefficients, nonzero leading term) from
/// companion-matrix eigenvalues, each refined by a few Newton steps.
pub(crate) fn poly_roots(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = ONE;
    }
    for i in 0..n {
        m[(i, n - 1)] = -c[i] / lead;
    }
    let eig: Vec<Complex64> = m
        .schur()
        .eigenvalues()
        .map(|v| v.iter().copied().collect())
        .unwrap_or_default();
    eig.into_iter().map(|z| polish(c, z)).collect()
}

fn polish(c: &[Complex64], mut z: Complex64) -> Complex64 {
    for _ in 0..3 {
        let (p, dp) = horner_with_derivative(c, z);
        if dp == ZERO {
            break;
        }
        let step = p / dp;
        let next = z - step;
        let (pn, _) = horner_with_derivative(c, next);
        if !(pn.norm() < p.norm()) {
            break;
        }
        z = next;
    }
    z
}

fn horner_with_derivative(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = ZERO;
    let mut dp = ZERO;
    for coef in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + coef;
    }
    (p, dp)
}

/// Smallest singular value and a matching right singular vector.
pub(crate) fn min_singular(a: &Matrix) -> (f64, Vec<Complex64>) {
    let m = DMatrix::<Complex64>::from_fn(a.rows, a.cols, |i, j| a.get(i, j));
    let svd = m.svd(false, true);
    let (k, s) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (k, &s)| if s < acc.1 { (k, s) } else { acc });
    let v_t = svd.v_t.expect("right singular vectors requested");
    let v = (0..a.cols).map(|j| v_t[(k, j)].conj()).collect();
    (s, v)
}
