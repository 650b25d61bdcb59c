//! Rational symbols: Fejér–Riesz factorization, exact rational pairs, poles
//! on the circle, the Hermite decomposition `f = g·Π(z − λ_j) + p` and the
//! gap-series example for multiple poles.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::hardy::PythagoreanPair;
use crate::linalg::{self, Matrix};
use crate::norms::least_squares_slope;
use crate::series::TaylorSeries;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Roots of the Laurent symbol closer than this to the circle are rejected.
pub const CIRCLE_GAP: f64 = 1e-8;
/// Largest allowed distance between a root and the reflection of its partner.
pub const PAIRING_TOLERANCE: f64 = 1e-6;
/// Derivative sums whose last-quarter spread is below `1e-10 (1 + |value|)` count as converged.
pub const SUM_TOLERANCE: f64 = 1e-10;

fn trimmed(c: &[Complex64]) -> &[Complex64] {
    let n = c.iter().rposition(|v| *v != ZERO).map_or(0, |i| i + 1);
    &c[..n]
}

/// `φ = p/q` with `q` zero free in the open disk and `p`, `q` without
/// common roots.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFn {
    p: TaylorSeries,
    q: TaylorSeries,
}

impl RationalFn {
    pub fn new(p: TaylorSeries, q: TaylorSeries) -> Result<Self> {
        let qc = trimmed(q.coeffs());
        if qc.is_empty() {
            return Err(Error::InvalidRational("zero denominator".into()));
        }
        let q_roots = linalg::poly_roots(qc);
        if let Some(r) = q_roots.iter().find(|r| r.norm() < 1.0 - 1e-10) {
            return Err(Error::InvalidRational(format!("denominator vanishes at {r} inside the disk")));
        }
        let pc = trimmed(p.coeffs());
        if pc.len() > 1 {
            for pr in linalg::poly_roots(pc) {
                if q_roots.iter().any(|qr| (pr - qr).norm() < 1e-8) {
                    return Err(Error::InvalidRational(format!("common root near {pr}")));
                }
            }
        }
        Ok(Self { p, q })
    }

    pub fn p(&self) -> &TaylorSeries {
        &self.p
    }

    pub fn q(&self) -> &TaylorSeries {
        &self.q
    }

    /// Taylor coefficients `0..=n` from the recurrence `q·φ = p`.
    pub fn taylor(&self, n: usize) -> TaylorSeries {
        divide_series(&self.p, trimmed(self.q.coeffs()), n)
    }
}

/// Coefficients `0..=n` of `h/d` for a polynomial `d` with `d(0) ≠ 0`.
fn divide_series(h: &TaylorSeries, d: &[Complex64], n: usize) -> TaylorSeries {
    let mut out = vec![ZERO; n + 1];
    let d0 = d[0];
    for k in 0..=n {
        let mut acc = h.get(k);
        for (j, dj) in d.iter().enumerate().skip(1).take(k) {
            acc -= dj * out[k - j];
        }
        out[k] = acc / d0;
    }
    TaylorSeries::from_vec(out)
}

#[derive(Clone, Debug)]
pub struct FejerRiesz {
    /// `|r|² = |p|² + |q|²` on the circle, roots outside the closed disk, `r(0) > 0`.
    pub r: TaylorSeries,
    /// `min |ζ| − 1` over the roots of `r` (infinite for constant `r`).
    pub delta: f64,
}

/// Factors `|p|² + |q|²` as `|r|²` on the circle.
///
/// The Laurent coefficients `s_k` are turned into the polynomial
/// `z^d s(z)`, whose roots come in pairs `ζ, 1/ζ̄`; the outer root of each
/// pair is kept and the constant is fixed by `Σ|r̂_k|² = s_0` and `r(0) > 0`.
pub fn fejer_riesz(p: &TaylorSeries, q: &TaylorSeries) -> Result<FejerRiesz> {
    let (pc, qc) = (trimmed(p.coeffs()), trimmed(q.coeffs()));
    if pc.is_empty() && qc.is_empty() {
        return Err(Error::InvalidRational("p and q are both zero".into()));
    }
    let span = pc.len().max(qc.len());
    let autocorr = |c: &[Complex64], k: usize| -> Complex64 {
        (0..c.len().saturating_sub(k)).map(|j| c[j + k] * c[j].conj()).sum()
    };
    let s: Vec<Complex64> = (0..span).map(|k| autocorr(pc, k) + autocorr(qc, k)).collect();
    let s0 = s[0].re;
    let d = s.iter().rposition(|v| v.norm() > 4.0 * f64::EPSILON * s0).unwrap_or(0);
    if d == 0 {
        return Ok(FejerRiesz { r: TaylorSeries::from_real(&[s0.sqrt()]), delta: f64::INFINITY });
    }
    // z^d s(z): coefficient of z^i is s_{i-d}, with s_{-k} = conj(s_k).
    let poly: Vec<Complex64> = (0..=2 * d)
        .map(|i| if i >= d { s[i - d] } else { s[d - i].conj() })
        .collect();
    let roots = linalg::poly_roots(&poly);
    if let Some(r) = roots.iter().find(|r| (r.norm() - 1.0).abs() <= CIRCLE_GAP) {
        return Err(Error::DegenerateOnCircle { distance: (r.norm() - 1.0).abs() });
    }
    let (mut outside, mut inside): (Vec<Complex64>, Vec<Complex64>) = roots.into_iter().partition(|r| r.norm() > 1.0);
    if outside.len() != d || inside.len() != d {
        return Err(Error::PairingFailed { distance: f64::INFINITY });
    }
    // Greedy pairing, closest pairs first.
    let mut kept = Vec::with_capacity(d);
    while !outside.is_empty() {
        let mut best = (0, 0, f64::INFINITY);
        for (i, z) in outside.iter().enumerate() {
            let target = ONE / z.conj();
            for (j, w) in inside.iter().enumerate() {
                let dist = (w - target).norm();
                if dist < best.2 {
                    best = (i, j, dist);
                }
            }
        }
        if best.2 > PAIRING_TOLERANCE {
            return Err(Error::PairingFailed { distance: best.2 });
        }
        kept.push(outside.swap_remove(best.0));
        inside.swap_remove(best.1);
    }
    let delta = kept.iter().map(|z| z.norm() - 1.0).fold(f64::INFINITY, f64::min);
    let mut r = vec![ONE];
    for z in &kept {
        r.push(ZERO);
        for i in (1..r.len()).rev() {
            let prev = r[i - 1];
            r[i] = prev - z * r[i];
        }
        r[0] = -z * r[0];
    }
    let energy: f64 = r.iter().map(|c| c.norm_sqr()).sum();
    let phase = r[0].conj() / r[0].norm();
    let scale = phase * (s0 / energy).sqrt();
    let mut r: Vec<Complex64> = r.into_iter().map(|c| c * scale).collect();
    r[0] = Complex64::new(r[0].norm(), 0.0);
    Ok(FejerRiesz { r: TaylorSeries::from_vec(r), delta })
}

/// The pair `b = ω p/r`, `a = ω q/r` to degree `n`, with the unimodular
/// `ω` making `a(0) > 0`. Validated on a grid of size at least `2n + 2`.
pub fn rational_pair(phi: &RationalFn, n: usize) -> Result<PythagoreanPair> {
    let FejerRiesz { r, .. } = fejer_riesz(&phi.p, &phi.q)?;
    let rc = trimmed(r.coeffs());
    let b = divide_series(&phi.p, rc, n);
    let a = divide_series(&phi.q, rc, n);
    let a0 = a.get(0);
    let omega = if a0 == ZERO { ONE } else { a0.conj() / a0.norm() };
    let mut a = a.scale(omega).into_coeffs();
    a[0] = Complex64::new(a[0].norm(), 0.0);
    let m = (2 * n + 2).next_power_of_two();
    PythagoreanPair::new(b.scale(omega), TaylorSeries::from_vec(a), m)
}

/// Poles on the unit circle with multiplicities.
#[derive(Clone, Debug, PartialEq)]
pub struct CirclePoles {
    poles: Vec<(Complex64, usize)>,
}

impl CirclePoles {
    pub fn new(poles: Vec<(Complex64, usize)>) -> Result<Self> {
        for &(l, k) in &poles {
            if (l.norm() - 1.0).abs() > 1e-8 {
                return Err(Error::InvalidArgument(format!("pole {l} is not on the unit circle")));
            }
            if k == 0 {
                return Err(Error::InvalidArgument("multiplicities must be positive".into()));
            }
        }
        Ok(Self { poles: poles.into_iter().map(|(l, k)| (l / l.norm(), k)).collect() })
    }

    pub fn empty() -> Self {
        Self { poles: Vec::new() }
    }

    pub fn poles(&self) -> &[(Complex64, usize)] {
        &self.poles
    }

    pub fn total_multiplicity(&self) -> usize {
        self.poles.iter().map(|p| p.1).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    /// Each pole repeated by multiplicity.
    fn nodes(&self) -> Vec<Complex64> {
        self.poles.iter().flat_map(|&(l, k)| core::iter::repeat_n(l, k)).collect()
    }
}

/// Roots of `q` within `tol` of the circle, clustered.
///
/// A root of multiplicity `k` splits numerically by about `ε^{1/k}`, so roots
/// are grouped within `√tol` of each other; a group is kept when its centroid
/// lies within `tol` of the circle, and reported at the centroid's projection.
pub fn circle_poles(q: &TaylorSeries, tol: f64) -> Result<CirclePoles> {
    if !(tol > 0.0 && tol <= 1e-4) {
        return Err(Error::ParameterOutOfRange(format!("tol = {tol} not in (0, 1e-4]")));
    }
    let qc = trimmed(q.coeffs());
    if qc.len() < 2 {
        return Ok(CirclePoles::empty());
    }
    let mut roots = linalg::poly_roots(qc);
    let radius = tol.sqrt();
    let mut out = Vec::new();
    while let Some(seed) = roots.pop() {
        let mut cluster = vec![seed];
        let mut i = 0;
        while i < roots.len() {
            if cluster.iter().any(|c| (c - roots[i]).norm() <= radius) {
                cluster.push(roots.swap_remove(i));
                i = 0;
            } else {
                i += 1;
            }
        }
        let centroid = cluster.iter().sum::<Complex64>() / cluster.len() as f64;
        if (centroid.norm() - 1.0).abs() <= tol {
            out.push((centroid / centroid.norm(), cluster.len()));
        }
    }
    out.sort_by(|a, b| a.0.arg().partial_cmp(&b.0.arg()).unwrap_or(core::cmp::Ordering::Equal));
    Ok(CirclePoles { poles: out })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailVerdict {
    SquareSummable,
    Divergent,
    Inconclusive,
}

/// How the interpolation constants were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HermiteSource {
    /// Divided differences of converged derivative sums.
    DerivativeSums,
    /// Least squares on the upper half of `g`'s coefficients.
    TailFit,
}

#[derive(Clone, Debug)]
pub struct RationalMembership {
    pub g: TaylorSeries,
    /// The Hermite interpolant of degree `≤ k − 1`.
    pub interp: TaylorSeries,
    pub tail_verdict: TailVerdict,
    pub source: HermiteSource,
    /// Largest last-quarter spread of the derivative sums.
    pub derivative_tail: f64,
    /// `Σ|ĝ|²` at truncations `N/4`, `N/2`, `N`, each refitted.
    pub energy_ladder: [f64; 3],
}

/// Splits `f = g·Π(z − λ_j)^{m_j} + interp`.
///
/// The interpolation data are the derivative sums
/// `Σ f̂(n) n(n−1)…(n−d+1) λ^{n−d}`; when every one has settled over the last
/// quarter of the truncation the interpolant comes from confluent divided
/// differences. Otherwise the sums do not identify the limit and the
/// constants are fitted so that `g` carries the least energy on the upper half
/// of its coefficients. `g` itself is the formal quotient, computed by
/// forward synthetic division. The tail verdict compares `‖g‖²` with `f` cut
/// at `N/4`, `N/2` and `N`: divergent if it grows by 1.5 at both steps,
/// square summable if it grows by at most 5% at the last step with shrinking
/// increments. Below `N = 32` the verdict is square summable exactly when the
/// sums settled. Zero pad a polynomial `f` so that its sums visibly settle.
pub fn rational_membership(f: &TaylorSeries, poles: &CirclePoles) -> RationalMembership {
    let n = f.degree();
    let (g, interp, source, derivative_tail) = decompose(f, poles);
    if poles.is_empty() {
        let e = g.energy();
        return RationalMembership {
            g,
            interp,
            tail_verdict: TailVerdict::SquareSummable,
            source,
            derivative_tail,
            energy_ladder: [e; 3],
        };
    }
    let energy_ladder = if n >= 32 {
        let e1 = decompose(&f.truncate(n / 4), poles).0.energy();
        let e2 = decompose(&f.truncate(n / 2), poles).0.energy();
        [e1, e2, g.energy()]
    } else {
        [g.energy(); 3]
    };
    let tail_verdict = if n < 32 {
        if source == HermiteSource::DerivativeSums {
            TailVerdict::SquareSummable
        } else {
            TailVerdict::Inconclusive
        }
    } else {
        let [e1, e2, e3] = energy_ladder;
        if e2 >= 1.5 * e1 && e3 >= 1.5 * e2 && e2 > 0.0 {
            TailVerdict::Divergent
        } else if e3 <= 1.05 * e2 && (e3 - e2) <= (e2 - e1).max(0.0) + 1e-12 * e3 {
            TailVerdict::SquareSummable
        } else {
            TailVerdict::Inconclusive
        }
    };
    RationalMembership { g, interp, tail_verdict, source, derivative_tail, energy_ladder }
}

type Decomposition = (TaylorSeries, TaylorSeries, HermiteSource, f64);

fn decompose(f: &TaylorSeries, poles: &CirclePoles) -> Decomposition {
    let n = f.degree();
    let nodes = poles.nodes();
    let k = nodes.len();
    if k == 0 {
        return (f.clone(), TaylorSeries::zero(0), HermiteSource::DerivativeSums, 0.0);
    }
    // v_i = 1 / Π_{l ≥ i} (z − x_l), and F = f / Π_l (z − x_l).
    let mut v: Vec<TaylorSeries> = Vec::with_capacity(k);
    let mut acc = TaylorSeries::from_vec(vec![ONE]).truncate(n);
    for i in (0..k).rev() {
        acc = divide_linear(&acc, nodes[i]);
        v.push(acc.clone());
    }
    v.reverse();
    let big_f = nodes.iter().fold(f.clone(), |h, &l| divide_linear(&h, l));

    let (sums, derivative_tail, settled) = derivative_sums(f, poles);
    let (c, source) = if settled {
        (divided_differences(&nodes, poles, &sums), HermiteSource::DerivativeSums)
    } else {
        (tail_fit(&big_f, &v, n), HermiteSource::TailFit)
    };
    let mut g = big_f.into_coeffs();
    for (ci, vi) in c.iter().zip(&v) {
        for (gn, vn) in g.iter_mut().zip(vi.coeffs()) {
            *gn -= ci * vn;
        }
    }
    // interp = Σ c_i Π_{l < i} (z − x_l)
    let mut interp = vec![ZERO; k];
    let mut basis = vec![ONE];
    for (i, ci) in c.iter().enumerate() {
        for (p, b) in interp.iter_mut().zip(&basis) {
            *p += ci * b;
        }
        if i + 1 < k {
            basis.push(ZERO);
            for j in (1..basis.len()).rev() {
                let prev = basis[j - 1];
                basis[j] = prev - nodes[i] * basis[j];
            }
            basis[0] = -nodes[i] * basis[0];
        }
    }
    (TaylorSeries::from_vec(g), TaylorSeries::from_vec(interp), source, derivative_tail)
}

/// Formal power series of `h / (z − λ)`, run forward from coefficient 0.
fn divide_linear(h: &TaylorSeries, lambda: Complex64) -> TaylorSeries {
    let mut out = Vec::with_capacity(h.len());
    let inv = ONE / lambda;
    let mut prev = ZERO;
    for (k, hk) in h.coeffs().iter().enumerate() {
        let q = if k == 0 { -hk * inv } else { (prev - hk) * inv };
        out.push(q);
        prev = q;
    }
    TaylorSeries::from_vec(out)
}

/// `f^{(d)}(λ)/d!` for each pole and `d < m`, the largest last-quarter
/// spread, and whether every sum settled.
fn derivative_sums(f: &TaylorSeries, poles: &CirclePoles) -> (Vec<Vec<Complex64>>, f64, bool) {
    let n = f.degree();
    let from = (3 * n).div_ceil(4);
    let mut worst = 0.0f64;
    let mut settled = true;
    let mut out = Vec::new();
    for &(lambda, mult) in poles.poles() {
        let theta = lambda.arg();
        let mut per = Vec::with_capacity(mult);
        for d in 0..mult {
            let mut s = ZERO;
            let mut partial = Vec::with_capacity(n + 1 - from.min(n + 1));
            for (j, c) in f.coeffs().iter().enumerate().skip(d) {
                // n(n−1)…(n−d+1)/d! = binom(n, d)
                let w = binomial(j, d);
                s += c * w * Complex64::from_polar(1.0, theta * (j - d) as f64);
                if j >= from {
                    partial.push(s);
                }
            }
            let spread = partial.iter().map(|p| (p - s).norm()).fold(0.0, f64::max);
            worst = worst.max(spread);
            if spread > SUM_TOLERANCE * (1.0 + s.norm()) {
                settled = false;
            }
            per.push(s);
        }
        out.push(per);
    }
    (out, worst, settled)
}

fn binomial(n: usize, d: usize) -> f64 {
    (0..d).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Newton coefficients `c_i = f[x_0, …, x_i]` with repeated nodes taking
/// Taylor data `f^{(d)}(λ)/d!`.
fn divided_differences(nodes: &[Complex64], poles: &CirclePoles, taylor: &[Vec<Complex64>]) -> Vec<Complex64> {
    let k = nodes.len();
    let pole_of = |x: Complex64| poles.poles().iter().position(|p| p.0 == x).expect("node is a pole");
    // table[i] holds f[x_i, …, x_{i+level}] for the current level.
    let mut table: Vec<Complex64> = nodes.iter().map(|&x| taylor[pole_of(x)][0]).collect();
    let mut c = vec![table[0]];
    for level in 1..k {
        let mut next = Vec::with_capacity(k - level);
        for i in 0..k - level {
            let (xi, xj) = (nodes[i], nodes[i + level]);
            next.push(if xi == xj {
                taylor[pole_of(xi)][level]
            } else {
                (table[i + 1] - table[i]) / (xj - xi)
            });
        }
        table = next;
        c.push(table[0]);
    }
    c
}

/// Constants minimizing `Σ_{n ≥ N/2} |F̂(n) − Σ c_i v̂_i(n)|²`.
fn tail_fit(big_f: &TaylorSeries, v: &[TaylorSeries], n: usize) -> Vec<Complex64> {
    let lo = n / 2;
    let rows = n + 1 - lo;
    let k = v.len();
    if rows < k {
        return vec![ZERO; k];
    }
    let mut mat = Matrix::zeros(rows, k);
    for (i, vi) in v.iter().enumerate() {
        for r in 0..rows {
            mat.set(r, i, vi.get(lo + r));
        }
    }
    let rhs = (0..rows).map(|r| big_f.get(lo + r)).collect();
    linalg::least_squares(mat, rhs).x
}

/// `g·Π_j (1 − λ̄_j z)^{m_j}` with `g = Σ_{n ≥ 1} z^{Kn} n^{−α}`, to degree `n`.
pub fn gap_counterexample(poles: &CirclePoles, k_gap: usize, alpha: f64, n: usize) -> Result<TaylorSeries> {
    let k = poles.total_multiplicity();
    if k_gap <= k {
        return Err(Error::ParameterOutOfRange(format!("K = {k_gap} must exceed the total multiplicity {k}")));
    }
    if !(alpha > 0.5 && alpha < 1.0) {
        return Err(Error::ParameterOutOfRange(format!("alpha = {alpha} not in (1/2, 1)")));
    }
    if poles.poles().iter().all(|p| p.1 < 2) {
        return Err(Error::ParameterOutOfRange("the gap example needs a pole of multiplicity at least 2".into()));
    }
    let mut c = vec![ZERO; n + 1];
    for j in 1..=n / k_gap {
        c[j * k_gap] = Complex64::new((j as f64).powf(-alpha), 0.0);
    }
    for &(lambda, mult) in poles.poles() {
        let l = lambda.conj();
        for _ in 0..mult {
            for i in (1..=n).rev() {
                let prev = c[i - 1];
                c[i] -= l * prev;
            }
        }
    }
    Ok(TaylorSeries::from_vec(c))
}

/// `sup_j |φ̂(j)|` for `j ≤ n` and the least-squares slope of `log |φ̂(j)|`
/// against `log j` over `j ∈ [n/2, n]`.
pub fn coefficient_growth_probe(phi: &RationalFn, n: usize) -> Result<(f64, f64)> {
    if n < 64 {
        return Err(Error::ParameterOutOfRange(format!("N = {n} must be at least 64")));
    }
    let c = phi.taylor(n);
    let sup = c.coeffs().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let pts: Vec<(f64, f64)> = (n / 2..=n)
        .filter_map(|j| {
            let a = c.get(j).norm();
            (a > 0.0).then(|| ((j as f64).ln(), a.ln()))
        })
        .collect();
    Ok((sup, least_squares_slope(&pts).unwrap_or(0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real(v: &[f64]) -> TaylorSeries {
        TaylorSeries::from_real(v)
    }

    fn grid_defect(p: &TaylorSeries, q: &TaylorSeries, r: &TaylorSeries, m: usize) -> (f64, f64) {
        let (pg, qg, rg) = (p.to_grid(m, 1.0).unwrap(), q.to_grid(m, 1.0).unwrap(), r.to_grid(m, 1.0).unwrap());
        let mut worst: f64 = 0.0;
        let mut peak: f64 = 0.0;
        for j in 0..m {
            let s = pg.samples()[j].norm_sqr() + qg.samples()[j].norm_sqr();
            peak = peak.max(s);
            worst = worst.max((s - rg.samples()[j].norm_sqr()).abs());
        }
        (worst, peak)
    }

    #[test]
    fn fejer_riesz_examples() {
        let fr = fejer_riesz(&real(&[1.0]), &real(&[0.0])).unwrap();
        assert!(fr.r.approx_eq(&real(&[1.0]), 1e-15));

        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        let fr = fejer_riesz(&real(&[1.0]), &real(&[1.0, -1.0])).unwrap();
        assert!(fr.r.approx_eq(&real(&[golden, -1.0 / golden]), 1e-12));
        assert!((fr.delta - (golden * golden - 1.0)).abs() < 1e-12);

        let fr = fejer_riesz(&real(&[0.0, 1.0]), &real(&[1.0])).unwrap();
        assert!(fr.r.approx_eq(&real(&[2f64.sqrt()]), 1e-15));
        assert!(fejer_riesz(&real(&[0.0]), &real(&[0.0])).is_err());
    }

    #[test]
    fn rational_pair_examples() {
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        let phi = RationalFn::new(real(&[1.0]), real(&[1.0, -1.0])).unwrap();
        let pair = rational_pair(&phi, 256).unwrap();
        // 1/(α − z/α) = (1/α) Σ (z/α²)^n.
        let inv = TaylorSeries::from_fn(257, |n| c(golden.powi(-(2 * n as i32 + 1)), 0.0));
        assert!(pair.b().approx_eq(&inv, 1e-12));
        let a = inv.cauchy_product(&real(&[1.0, -1.0]), 256);
        assert!(pair.a().approx_eq(&a, 1e-12));
        assert!(pair.unimodularity_residual() < 1e-9);

        let s = 0.5f64.sqrt();
        let pair = rational_pair(&RationalFn::new(real(&[0.0, 1.0]), real(&[1.0])).unwrap(), 16).unwrap();
        assert!(pair.b().approx_eq(&real(&[0.0, s]), 1e-15));
        assert!(pair.a().approx_eq(&real(&[s]), 1e-15));

        let pair = rational_pair(&RationalFn::new(real(&[0.0]), real(&[1.0])).unwrap(), 8).unwrap();
        assert!(pair.b().is_zero());
        assert!(pair.a().approx_eq(&real(&[1.0]), 1e-15));
    }

    #[test]
    fn rational_pair_fixes_phase_of_a() {
        let phi = RationalFn::new(real(&[0.5]), TaylorSeries::from_vec(vec![c(0.0, -2.0), c(1.0, 0.0)])).unwrap();
        let pair = rational_pair(&phi, 64).unwrap();
        assert!(pair.a().get(0).im == 0.0 && pair.a().get(0).re > 0.0);
        // b/a = p/q at a grid point.
        let z = c(0.6, 0.3);
        let ratio = pair.b().evaluate(z) / pair.a().evaluate(z);
        let want = c(0.5, 0.0) / (z - c(0.0, 2.0));
        assert!((ratio - want).norm() < 1e-12);
    }

    #[test]
    fn rational_validation() {
        assert!(RationalFn::new(real(&[1.0]), real(&[0.0])).is_err());
        assert!(RationalFn::new(real(&[1.0]), real(&[1.0, -2.0])).is_err());
        assert!(RationalFn::new(real(&[1.0, -1.0]), real(&[1.0, -1.0])).is_err());
        assert!(RationalFn::new(real(&[1.0, 1.0]), real(&[1.0, -1.0])).is_ok());
    }

    #[test]
    fn circle_pole_examples() {
        let p = circle_poles(&real(&[1.0, -1.0]), 1e-8).unwrap();
        assert_eq!(p.poles().len(), 1);
        assert!((p.poles()[0].0 - ONE).norm() < 1e-12 && p.poles()[0].1 == 1);

        let p = circle_poles(&real(&[1.0, -2.0, 1.0]), 1e-8).unwrap();
        assert_eq!(p.poles().len(), 1);
        assert!((p.poles()[0].0 - ONE).norm() < 1e-8 && p.poles()[0].1 == 2);

        assert!(circle_poles(&real(&[1.0, 0.0, 0.25]), 1e-8).unwrap().is_empty());
        // (1 − z)^3 (1 + z)
        let q = real(&[1.0, -2.0, 0.0, 2.0, -1.0]);
        let p = circle_poles(&q, 1e-6).unwrap();
        assert_eq!(p.total_multiplicity(), 4);
        assert_eq!(p.poles().len(), 2);
    }

    #[test]
    fn membership_examples() {
        let one = CirclePoles::new(vec![(ONE, 1)]).unwrap();
        let r = rational_membership(&real(&[0.0, 1.0]), &one);
        assert!(r.interp.approx_eq(&real(&[1.0]), 1e-15));
        assert!(r.g.approx_eq(&real(&[1.0]), 1e-15));
        assert_eq!(r.tail_verdict, TailVerdict::SquareSummable);

        let f = real(&[1.0, 2.0, 3.0]);
        let r = rational_membership(&f, &CirclePoles::empty());
        assert!(r.g.approx_eq(&f, 0.0) && r.interp.is_zero());
    }

    #[test]
    fn membership_of_log_is_divergent() {
        let n = 1 << 14;
        let f = TaylorSeries::from_fn(n + 1, |m| c(if m == 0 { 0.0 } else { 1.0 / m as f64 }, 0.0));
        let r = rational_membership(&f, &CirclePoles::new(vec![(ONE, 1)]).unwrap());
        assert_eq!(r.source, HermiteSource::TailFit);
        assert_eq!(r.tail_verdict, TailVerdict::Divergent);
        // g_m = c − H_m: successive differences are −1/m.
        for m in [10usize, 100, 1000] {
            let d = r.g.get(m) - r.g.get(m - 1);
            assert!((d + c(1.0 / m as f64, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn membership_reconstructs_polynomials() {
        // Double pole at i, simple pole at -1; f padded so its sums settle.
        let poles = CirclePoles::new(vec![(c(0.0, 1.0), 2), (c(-1.0, 0.0), 1)]).unwrap();
        let f = TaylorSeries::from_vec(vec![c(1.0, 0.5), c(-2.0, 0.0), c(0.0, 3.0), c(0.7, 0.0), c(0.2, -0.1), c(1.0, 1.0)])
            .truncate(64);
        let r = rational_membership(&f, &poles);
        assert_eq!(r.source, HermiteSource::DerivativeSums);
        let d = real(&[1.0]).cauchy_product(&TaylorSeries::from_vec(vec![c(0.0, -1.0), ONE]), 1);
        let d = d.cauchy_product(&TaylorSeries::from_vec(vec![c(0.0, -1.0), ONE]), 2);
        let d = d.cauchy_product(&real(&[1.0, 1.0]), 3);
        let back = &r.g.cauchy_product(&d, 64) + &r.interp;
        assert!(back.approx_eq(&f, 1e-10));
        assert!(r.g.coeffs()[3..].iter().all(|v| v.norm() < 1e-10));
        assert_eq!(r.tail_verdict, TailVerdict::SquareSummable);
    }

    #[test]
    fn gap_examples() {
        let poles = CirclePoles::new(vec![(ONE, 2)]).unwrap();
        let f = gap_counterexample(&poles, 3, 0.75, 9).unwrap();
        let h = 2f64.powf(-0.75);
        let want = real(&[0.0, 0.0, 0.0, 1.0, -2.0, 1.0, h, -2.0 * h, h, 3f64.powf(-0.75)]);
        assert!(f.approx_eq(&want, 1e-15));

        let f = gap_counterexample(&poles, 3, 0.75, 3000).unwrap();
        for j in 1..=1000 {
            assert!((f.get(3 * j) - c((j as f64).powf(-0.75), 0.0)).norm() < 1e-15);
        }
        let bound = 9.0 * (1..=1000).map(|n| (n as f64).powf(-1.5)).sum::<f64>();
        assert!(f.energy() <= bound);

        assert!(gap_counterexample(&poles, 2, 0.75, 9).is_err());
        assert!(gap_counterexample(&poles, 3, 0.5, 9).is_err());
        assert!(gap_counterexample(&CirclePoles::new(vec![(ONE, 1)]).unwrap(), 3, 0.75, 9).is_err());
    }

    #[test]
    fn growth_probe_examples() {
        let simple = RationalFn::new(real(&[1.0]), real(&[1.0, -1.0])).unwrap();
        let (sup, slope) = coefficient_growth_probe(&simple, 256).unwrap();
        assert!((sup - 1.0).abs() < 1e-15 && slope.abs() < 1e-12);

        let double = RationalFn::new(real(&[1.0]), real(&[1.0, -2.0, 1.0])).unwrap();
        let (_, slope) = coefficient_growth_probe(&double, 4096).unwrap();
        assert!((slope - 1.0).abs() < 0.01, "{slope}");

        let outside = RationalFn::new(real(&[1.0]), real(&[1.0, -0.5])).unwrap();
        let (sup, _) = coefficient_growth_probe(&outside, 64).unwrap();
        assert_eq!(sup, 1.0);
        assert!((outside.taylor(10).get(10).re - 0.5f64.powi(10)).abs() < 1e-18);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn fejer_riesz_residual(
            p in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..7),
            q in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..7),
        ) {
            let p = TaylorSeries::from_vec(p.into_iter().map(|(x, y)| c(x, y)).collect());
            let q = TaylorSeries::from_vec(q.into_iter().map(|(x, y)| c(x, y)).collect());
            prop_assume!(!p.is_zero() || !q.is_zero());
            if let Ok(fr) = fejer_riesz(&p, &q) {
                let (worst, peak) = grid_defect(&p, &q, &fr.r, 4096);
                prop_assert!(worst <= 1e-9 * peak, "{} vs {}", worst, peak);
                prop_assert!(fr.delta > 0.0);
                prop_assert!(fr.r.get(0).re > 0.0 && fr.r.get(0).im == 0.0);
            }
        }
    }
}
