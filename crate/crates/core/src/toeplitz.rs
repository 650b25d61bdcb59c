//! Coanalytic Toeplitz operators on coefficient vectors and the
//! finite-section membership solver.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::fft;
use crate::hardy::PythagoreanPair;
use crate::linalg::{self, Matrix};
use crate::series::{TaylorSeries, DIRECT_LIMIT};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative residual below which a solve can count as a member.
pub const MEMBER_TOLERANCE: f64 = 1e-6;
/// Finite sections with a larger condition estimate are rejected.
pub const CONDITION_LIMIT: f64 = 1e12;
/// Share of `g`'s coefficients, from the top, inspected by the tail test.
pub const TAIL_FRACTION: f64 = 0.1;
/// Largest energy share allowed in that tail for a member verdict.
pub const TAIL_ENERGY_LIMIT: f64 = 0.01;
/// `‖f‖²_{H(b)}` growth from level `Ng` to `2Ng` that marks a non-member.
pub const GROWTH_FACTOR: f64 = 2.0;
/// Extra rows past `Ng + deg f` in the default section.
pub const ROW_BUFFER: usize = 64;

/// Rows `m = 0..rows` of `T_{ψ̄} f`: `Σ_n conj(ψ̂(n)) f̂(m + n)`.
pub fn coanalytic_apply(psi: &TaylorSeries, f: &TaylorSeries, rows: usize) -> TaylorSeries {
    let rows = rows.max(1);
    let fc = f.coeffs();
    let p = psi.len().min(fc.len());
    let live = rows.min(fc.len());
    let mut out = vec![ZERO; rows];
    if p <= DIRECT_LIMIT || live.saturating_mul(p) <= 1 << 14 {
        let pc = psi.coeffs();
        for (m, o) in out.iter_mut().enumerate().take(live) {
            let span = p.min(fc.len() - m);
            *o = pc[..span].iter().zip(&fc[m..m + span]).map(|(a, b)| a.conj() * b).sum();
        }
        return TaylorSeries::from_vec(out);
    }
    let reversed: Vec<Complex64> = psi.coeffs()[..p].iter().rev().map(|c| c.conj()).collect();
    let keep = live + p - 1;
    let conv = fft::convolve(&reversed, fc, keep);
    out[..live].copy_from_slice(&conv[p - 1..p - 1 + live]);
    TaylorSeries::from_vec(out)
}

/// The `rows × cols` section of `T_{ψ̄}`: entry `(m, j)` is `conj(ψ̂(j − m))` for `j ≥ m`.
fn section(psi: &TaylorSeries, rows: usize, cols: usize) -> Matrix {
    let mut mat = Matrix::zeros(rows, cols);
    for j in 0..cols {
        for m in 0..=j.min(rows.saturating_sub(1)) {
            let v = psi.get(j - m);
            if v != ZERO {
                mat.set(m, j, v.conj());
            }
        }
    }
    mat
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Member,
    NonMember,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct MembershipResult {
    pub g: TaylorSeries,
    /// `‖T_{b̄}f − T_{ā}g‖ / ‖T_{b̄}f‖` over the rows used.
    pub residual: f64,
    /// `‖f‖² + ‖g‖²`.
    pub hb_norm_sq: f64,
    pub rows_used: usize,
    pub verdict: Verdict,
    /// 1-norm condition estimate of the triangular factor.
    pub condition: f64,
    /// Share of `‖g‖²` in the top tenth of its coefficients.
    pub tail_share: f64,
    /// `‖f‖²_{H(b)}` at level `2Ng` over the value at `Ng`, when both probes solved.
    pub growth_ratio: Option<f64>,
}

/// `Ng + deg f + 64`.
pub fn default_rows(ng: usize, f: &TaylorSeries) -> usize {
    ng + f.degree() + ROW_BUFFER
}

struct Section {
    g: TaylorSeries,
    residual: f64,
    condition: f64,
}

fn solve_section(pair: &PythagoreanPair, f: &TaylorSeries, ng: usize, rows: usize) -> Result<Section> {
    let rhs = coanalytic_apply(pair.b(), f, rows).into_coeffs();
    let rhs_norm = rhs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let sol = linalg::least_squares(section(pair.a(), rows, ng + 1), rhs);
    if !(sol.condition <= CONDITION_LIMIT) {
        return Err(Error::IllConditioned { condition: sol.condition });
    }
    Ok(Section {
        g: TaylorSeries::from_vec(sol.x),
        residual: sol.residual / rhs_norm.max(1e-300),
        condition: sol.condition,
    })
}

/// Least-squares solution `g` (degree ≤ `ng`) of `T_{b̄} f = T_{ā} g` on the
/// first `rows` output coefficients, by Householder QR.
///
/// The verdict is `NonMember` when the same problem with `f` cut at degree
/// `ng` and `2ng` (sections sized by [`default_rows`]) shows `‖f‖²_{H(b)}`
/// growing at least twofold; `Member` when the residual is within
/// [`MEMBER_TOLERANCE`] and the top tenth of `g` carries at most 1% of its
/// energy; `Inconclusive` otherwise.
pub fn membership_solve(
    pair: &PythagoreanPair,
    f: &TaylorSeries,
    ng: usize,
    rows: usize,
) -> Result<MembershipResult> {
    if rows < ng + 1 {
        return Err(Error::InvalidArgument(format!("rows {rows} must exceed Ng = {ng}")));
    }
    if f.is_zero() {
        return Ok(MembershipResult {
            g: TaylorSeries::zero(ng),
            residual: 0.0,
            hb_norm_sq: 0.0,
            rows_used: rows,
            verdict: Verdict::Member,
            condition: 1.0,
            tail_share: 0.0,
            growth_ratio: Some(1.0),
        });
    }
    let main = solve_section(pair, f, ng, rows)?;
    let f_energy = f.energy();
    let g_energy = main.g.energy();
    let hb_norm_sq = f_energy + g_energy;

    let tail_start = ng + 1 - ((ng + 1) as f64 * TAIL_FRACTION).ceil() as usize;
    let tail_energy: f64 = main.g.coeffs()[tail_start..].iter().map(|c| c.norm_sqr()).sum();
    let tail_share = if g_energy > 0.0 { tail_energy / g_energy } else { 0.0 };

    let growth_ratio = growth_probe(pair, f, ng.max(1));
    let verdict = match growth_ratio {
        Some(r) if r >= GROWTH_FACTOR => Verdict::NonMember,
        _ if main.residual <= MEMBER_TOLERANCE && tail_share <= TAIL_ENERGY_LIMIT => Verdict::Member,
        _ => Verdict::Inconclusive,
    };
    Ok(MembershipResult {
        g: main.g,
        residual: main.residual,
        hb_norm_sq,
        rows_used: rows,
        verdict,
        condition: main.condition,
        tail_share,
        growth_ratio,
    })
}

fn growth_probe(pair: &PythagoreanPair, f: &TaylorSeries, ng: usize) -> Option<f64> {
    let level = |n: usize| -> Option<f64> {
        let fl = f.truncate(n.min(f.degree()));
        let s = solve_section(pair, &fl, n, default_rows(n, &fl)).ok()?;
        Some(fl.energy() + s.g.energy())
    };
    let lo = level(ng)?;
    let hi = level(2 * ng)?;
    if lo > 0.0 {
        Some(hi / lo)
    } else {
        None
    }
}

/// Smallest singular value of the `rows × (nf + 1)` section of `T_{φ̄}` and a
/// unit-norm coefficient vector attaining it.
pub fn kernel_search(phi: &TaylorSeries, nf: usize, rows: usize) -> Result<(f64, TaylorSeries)> {
    if rows < nf + 1 {
        return Err(Error::InvalidArgument(format!("rows {rows} must exceed Nf = {nf}")));
    }
    let (sigma, v) = linalg::min_singular(&section(phi, rows, nf + 1));
    // Fix the phase so the largest entry is real positive.
    let pivot = v.iter().copied().fold(ZERO, |acc, c| if c.norm() > acc.norm() { c } else { acc });
    let rot = if pivot == ZERO { Complex64::new(1.0, 0.0) } else { pivot.conj() / pivot.norm() };
    Ok((sigma, TaylorSeries::from_vec(v.into_iter().map(|c| c * rot).collect())))
}
