//! The coefficient norm formula and its diagnostics: per-row partial-sum
//! traces, weighted and Sobolev sums, the `a_ε` limit sweep and Abel traces.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::hardy::{outer_from_modulus, PythagoreanPair, DEFAULT_FLOOR};
use crate::series::{GridFunction, TaylorSeries};
use crate::toeplitz::coanalytic_apply;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A [`NormEstimate`] whose last dyadic block of rows holds more than this
/// share of `g_energy` is not trusted.
pub const TAIL_RATIO_LIMIT: f64 = 0.05;
/// Consecutive block amplitudes must grow by at least this factor for a
/// divergent trace (a growth exponent of 0.1 per octave).
pub const DIVERGENCE_RATIO: f64 = 1.071_773_462_536_293_2;
/// The final amplitude must exceed this many units of roundoff.
pub const ROUNDOFF_MULTIPLE: f64 = 100.0;
/// Relative (and absolute) oscillation bound for a converged trace.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-9;
/// Relative spread of the last three sweep values for convergence.
pub const SWEEP_TOLERANCE: f64 = 1e-3;
/// Per-step growth of the last three sweep steps for divergence.
pub const SWEEP_GROWTH: f64 = 2.0;

#[derive(Clone, Debug)]
pub struct NormEstimate {
    pub f_energy: f64,
    pub g_energy: f64,
    /// `row_m = Σ_n conj(φ̂(n)) f̂(m + n)`.
    pub rows: TaylorSeries,
    /// Energy of the last dyadic block of rows over `g_energy` (0 when `g_energy` is 0).
    pub tail_ratio: f64,
    pub norm_sq: f64,
}

impl NormEstimate {
    pub fn trusted(&self) -> bool {
        self.tail_ratio <= TAIL_RATIO_LIMIT
    }
}

/// `‖f‖²_{H(b)} = Σ|f̂(m)|² + Σ_m |Σ_n conj(φ̂(n)) f̂(m + n)|²` over `rows` rows.
pub fn coefficient_norm(phi: &TaylorSeries, f: &TaylorSeries, rows: usize) -> NormEstimate {
    let rows_v = coanalytic_apply(phi, f, rows);
    let f_energy = f.energy();
    let g_energy = rows_v.energy();
    let (start, _) = last_block(rows_v.len());
    let tail: f64 = rows_v.coeffs()[start..].iter().map(|c| c.norm_sqr()).sum();
    let tail_ratio = if g_energy > 0.0 { tail / g_energy } else { 0.0 };
    NormEstimate { f_energy, g_energy, rows: rows_v, tail_ratio, norm_sq: f_energy + g_energy }
}

/// `[2^B, len)` with `2^B` the largest power of two below `len`; `[0, 1)` for `len = 1`.
fn last_block(len: usize) -> (usize, usize) {
    if len <= 1 {
        return (0, len);
    }
    let b = usize::BITS - 1 - (len - 1).leading_zeros();
    (1usize << b, len)
}

/// Which partial sums a trace keeps.
#[derive(Clone, Debug, PartialEq)]
pub enum Schedule {
    /// Every index.
    All,
    /// `per_octave` roughly geometric indices per dyadic block, plus the last index.
    Geometric { per_octave: usize },
    /// Exactly these indices (clipped to the available terms); summation stops at the last.
    Explicit(Vec<usize>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TraceVerdict {
    Converged(Complex64),
    Divergent,
    Inconclusive,
}

/// Partial sums of one inner series with dyadic-block amplitudes.
///
/// Block `B` covers `J ∈ [2^B, 2^{B+1})`; its amplitude is `max − min` of
/// `S_J` over the block, taken per component and combined as `hypot`. A final partial block counts only if it
/// holds at least half its nominal length.
#[derive(Clone, Debug)]
pub struct PartialSumTrace {
    pub checkpoints: Vec<(usize, Complex64)>,
    pub block_amplitudes: Vec<f64>,
    /// `ε · max_J Σ_{n ≤ J} |term_n|`.
    pub roundoff_scale: f64,
    pub verdict: TraceVerdict,
}

impl PartialSumTrace {
    /// Least-squares slope of `log₂ A_B` against `B` over the last `blocks`
    /// blocks with positive amplitude: the exponent `γ` in `A ∝ J^γ`.
    pub fn growth_exponent(&self, blocks: usize) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .block_amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| **a > 0.0)
            .map(|(b, a)| (b as f64, a.log2()))
            .collect();
        let pts = &pts[pts.len().saturating_sub(blocks)..];
        least_squares_slope(pts)
    }

    /// The final partial sum.
    pub fn last(&self) -> Complex64 {
        self.checkpoints.last().map(|c| c.1).unwrap_or(ZERO)
    }
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// Partial sums `S_J = Σ_{n ≤ J} conj(φ̂(n)) f̂(m + n)` over the indices
/// present in both truncations.
///
/// Verdicts: divergent when the last three block amplitudes each grow by
/// [`DIVERGENCE_RATIO`] and the last exceeds 100 units of roundoff;
/// converged when the spread over the last two blocks is within
/// `max(1e-9, 1e-9 |S|)`; inconclusive otherwise. A truncated polynomial
/// `f` should be zero padded to the length of `φ` so its zero tail is seen.
pub fn series_rows_trace(phi: &TaylorSeries, f: &TaylorSeries, m: usize, schedule: &Schedule) -> PartialSumTrace {
    let avail = if m < f.len() { phi.len().min(f.len() - m) } else { 0 };
    let mut j_max = avail.saturating_sub(1);
    if let Schedule::Explicit(points) = schedule {
        if let Some(&last) = points.last() {
            j_max = j_max.min(last);
        }
    }
    if avail == 0 {
        return PartialSumTrace {
            checkpoints: Vec::from([(0, ZERO)]),
            block_amplitudes: Vec::new(),
            roundoff_scale: 0.0,
            verdict: TraceVerdict::Converged(ZERO),
        };
    }

    let mut keep = checkpoint_filter(schedule, j_max);
    let mut checkpoints = Vec::new();
    let mut amplitudes: Vec<f64> = Vec::new();
    let (mut lo_re, mut hi_re, mut lo_im, mut hi_im) = (0.0, 0.0, 0.0, 0.0);
    let mut tail_lo = [f64::INFINITY; 2];
    let mut tail_hi = [f64::NEG_INFINITY; 2];
    let tail_start = if j_max >= 2 { 1usize << (usize::BITS - 2 - j_max.leading_zeros()) } else { j_max };
    let pc = phi.coeffs();
    let fc = f.coeffs();
    let mut s = ZERO;
    let mut abs_sum = 0.0;
    let mut block = None;
    for j in 0..=j_max {
        let term = pc[j].conj() * fc[m + j];
        s += term;
        abs_sum += term.norm();
        if keep(j) {
            checkpoints.push((j, s));
        }
        if j >= tail_start {
            tail_lo = [tail_lo[0].min(s.re), tail_lo[1].min(s.im)];
            tail_hi = [tail_hi[0].max(s.re), tail_hi[1].max(s.im)];
        }
        if j == 0 {
            continue;
        }
        let b = (usize::BITS - 1 - j.leading_zeros()) as usize;
        if block != Some(b) {
            if block.is_some() {
                amplitudes.push(spread(lo_re, hi_re, lo_im, hi_im));
            }
            block = Some(b);
            (lo_re, hi_re, lo_im, hi_im) = (s.re, s.re, s.im, s.im);
        } else {
            lo_re = lo_re.min(s.re);
            hi_re = hi_re.max(s.re);
            lo_im = lo_im.min(s.im);
            hi_im = hi_im.max(s.im);
        }
    }
    if let Some(b) = block {
        let len = j_max + 1 - (1usize << b);
        if 2 * len >= 1usize << b {
            amplitudes.push(spread(lo_re, hi_re, lo_im, hi_im));
        }
    }

    let roundoff_scale = f64::EPSILON * abs_sum;
    let tail_spread = spread(tail_lo[0], tail_hi[0], tail_lo[1], tail_hi[1]);
    let verdict = trace_verdict(&amplitudes, roundoff_scale, tail_spread, s);
    PartialSumTrace { checkpoints, block_amplitudes: amplitudes, roundoff_scale, verdict }
}

fn spread(lo_re: f64, hi_re: f64, lo_im: f64, hi_im: f64) -> f64 {
    (hi_re - lo_re).hypot(hi_im - lo_im)
}

fn trace_verdict(amps: &[f64], roundoff: f64, tail_spread: f64, s: Complex64) -> TraceVerdict {
    if amps.len() >= 3 {
        let last = &amps[amps.len() - 3..];
        let growing = last.windows(2).all(|w| w[1] >= DIVERGENCE_RATIO * w[0]);
        if growing && last[2] > ROUNDOFF_MULTIPLE * roundoff {
            return TraceVerdict::Divergent;
        }
    }
    if tail_spread <= CONVERGENCE_TOLERANCE.max(CONVERGENCE_TOLERANCE * s.norm()) {
        TraceVerdict::Converged(s)
    } else {
        TraceVerdict::Inconclusive
    }
}

fn checkpoint_filter(schedule: &Schedule, j_max: usize) -> impl FnMut(usize) -> bool {
    let mut explicit: Vec<usize> = match schedule {
        Schedule::Explicit(p) => p.clone(),
        _ => Vec::new(),
    };
    explicit.sort_unstable();
    explicit.dedup();
    let mode = match schedule {
        Schedule::All => 0,
        Schedule::Geometric { per_octave } => (*per_octave).max(1),
        Schedule::Explicit(_) => usize::MAX,
    };
    let mut next_explicit = 0usize;
    move |j: usize| {
        if j == j_max {
            return true;
        }
        match mode {
            0 => true,
            usize::MAX => {
                while next_explicit < explicit.len() && explicit[next_explicit] < j {
                    next_explicit += 1;
                }
                next_explicit < explicit.len() && explicit[next_explicit] == j
            }
            k => {
                if j < 2 * k {
                    return true;
                }
                let b = usize::BITS - 1 - j.leading_zeros();
                let step = (1usize << b) / k;
                (j - (1usize << b)).is_multiple_of(step.max(1))
            }
        }
    }
}

/// Outcome of the series condition: every traced row converges and the row
/// energy is not concentrated in the last dyadic block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesCondition {
    Holds,
    Fails,
    Inconclusive,
}

/// Evaluates the two-part series condition on the first `rows` rows: each
/// inner series must converge and the row limits must be square summable
/// (judged by [`NormEstimate::tail_ratio`]). Fails on any divergent trace or
/// an untrusted tail.
pub fn series_condition(phi: &TaylorSeries, f: &TaylorSeries, rows: usize) -> (SeriesCondition, NormEstimate) {
    let est = coefficient_norm(phi, f, rows);
    let mut all_converged = true;
    for m in 0..rows {
        match series_rows_trace(phi, f, m, &Schedule::Explicit(Vec::new())).verdict {
            TraceVerdict::Divergent => return (SeriesCondition::Fails, est),
            TraceVerdict::Inconclusive => all_converged = false,
            TraceVerdict::Converged(_) => {}
        }
    }
    let verdict = if !est.trusted() {
        SeriesCondition::Fails
    } else if all_converged {
        SeriesCondition::Holds
    } else {
        SeriesCondition::Inconclusive
    };
    (verdict, est)
}

/// `Σ_{m ≥ 1} m^{2/p − 1} |f̂(m)|²`.
pub fn weighted_tail(f: &TaylorSeries, p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 2.0) {
        return Err(Error::ParameterOutOfRange(alloc::format!("p = {p} not in (0, 2]")));
    }
    let e = 2.0 / p - 1.0;
    Ok(f.coeffs().iter().enumerate().skip(1).map(|(m, c)| (m as f64).powf(e) * c.norm_sqr()).sum())
}

/// `√Σ (1 + n²)^s |û(n)|²`.
pub fn sobolev_norm(u: &TaylorSeries, s: f64) -> f64 {
    u.coeffs()
        .iter()
        .enumerate()
        .map(|(n, c)| (1.0 + (n * n) as f64).powf(s) * c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `lhs = Σ_n |û(n)| |v̂(m + n)|` against
/// `rhs = (1 + m²)^{s/2} ‖u‖_{W^{s,2}} ‖v‖_{W^{−s,2}}`.
///
/// No inequality is enforced here. With the constant 1 the bound can fail
/// for sparse inputs: `u = z`, `v = z²`, `m = 1`, `s = 1/2` gives
/// `lhs = 1 > (4/5)^{1/4}`.
pub fn convolution_bound_check(u: &TaylorSeries, v: &TaylorSeries, s: f64, m: usize) -> (f64, f64) {
    let lhs: f64 = u
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, c)| c.norm() * v.get(m + n).norm())
        .sum();
    let rhs = (1.0 + (m * m) as f64).powf(s / 2.0) * sobolev_norm(u, s) * sobolev_norm(v, -s);
    (lhs, rhs)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    pub epsilon: f64,
    /// `G(ε) = Σ_m |row_m(φ_ε, f)|²`.
    pub g_energy: f64,
    pub norm_sq: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SweepVerdict {
    /// The limiting `‖f‖²_{H(b)}`.
    Converged(f64),
    Divergent,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct SweepTable {
    pub points: Vec<SweepPoint>,
    pub verdict: SweepVerdict,
}

/// `ε_j = 2^{−j}`, `j = 1..=12`.
pub fn default_epsilons() -> Vec<f64> {
    (1..=12).map(|j| 0.5f64.powi(j)).collect()
}

/// Replaces `a` by the outer `a_ε` with `|a_ε| = max(|a|, ε)`, forms
/// `φ_ε = b / a_ε` (grid division, `N` coefficients) and records
/// `G(ε) = ‖T_{φ̄_ε} f‖²` over `N` rows.
///
/// Converged when the last three `G` agree within relative 1e-3; divergent
/// when `G` at least doubles across each of the last three steps.
pub fn limit_norm_sweep(pair: &PythagoreanPair, f: &TaylorSeries, epsilons: &[f64], n: usize) -> Result<SweepTable> {
    if epsilons.is_empty() || epsilons.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
        return Err(Error::InvalidArgument("epsilons must lie in (0, 1)".into()));
    }
    if epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("epsilons must be strictly decreasing".into()));
    }
    if n < f.effective_degree() {
        return Err(Error::InvalidArgument(alloc::format!("N = {n} is below deg f")));
    }
    let m = pair.grid_size().max((2 * (n + 1)).next_power_of_two());
    let a_grid = pair.a().to_grid(m, 1.0)?;
    let modulus: Vec<f64> = a_grid.samples().iter().map(|c| c.norm()).collect();
    let f_energy = f.energy();
    let mut points = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let w = GridFunction::new(modulus.iter().map(|&v| Complex64::new(v.max(eps), 0.0)).collect(), 1.0)?;
        let a_eps = outer_from_modulus(&w, n, DEFAULT_FLOOR)?;
        let inv = a_eps.to_grid(m, 1.0)?.map(|v| Complex64::new(1.0, 0.0) / v)?;
        let inv = TaylorSeries::from_grid(&inv, n)?;
        let phi_eps = pair.b().cauchy_product(&inv, n);
        let g_energy = coanalytic_apply(&phi_eps, f, n.max(1)).energy();
        points.push(SweepPoint { epsilon: eps, g_energy, norm_sq: f_energy + g_energy });
    }
    let verdict = sweep_verdict(&points);
    Ok(SweepTable { points, verdict })
}

fn sweep_verdict(points: &[SweepPoint]) -> SweepVerdict {
    let g: Vec<f64> = points.iter().map(|p| p.g_energy).collect();
    if g.len() >= 4 && g[g.len() - 4..].windows(2).all(|w| w[1] >= SWEEP_GROWTH * w[0] && w[1] > 0.0) {
        return SweepVerdict::Divergent;
    }
    if g.len() >= 3 {
        let last = &g[g.len() - 3..];
        let hi = last.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = last.iter().copied().fold(f64::INFINITY, f64::min);
        let scale = last[2].abs();
        if hi - lo <= SWEEP_TOLERANCE * scale || hi == lo {
            return SweepVerdict::Converged(points[points.len() - 1].norm_sq);
        }
    }
    SweepVerdict::Inconclusive
}

/// `Σ_n conj(φ̂(n)) f̂(n) rⁿ` for each radius.
pub fn abel_trace(phi: &TaylorSeries, f: &TaylorSeries, radii: &[f64]) -> Vec<Complex64> {
    let len = phi.len().min(f.len());
    let terms: Vec<Complex64> = (0..len).map(|n| phi.get(n).conj() * f.get(n)).collect();
    radii
        .iter()
        .map(|&r| {
            // Horner in r keeps the error relative to the summands.
            terms.iter().rev().fold(ZERO, |acc, t| acc * r + t)
        })
        .collect()
}
