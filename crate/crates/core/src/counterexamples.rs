//! Symbols `φ = B²φ₀/(1 − z)^{1/2}` with a finite Blaschke product `B`, the
//! matching `f = Σ c_n (1 − t_n²)^{1/2} k_{t_n}`, and the Abel-sum
//! certificate that `Σ conj(φ̂(m)) f̂(m)` diverges.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::hardy::{blaschke_inf_check, blaschke_series, BlaschkeSpec, PythagoreanPair};
use crate::norms::abel_trace;
use crate::rational::{rational_pair, RationalFn};
use crate::series::TaylorSeries;
use crate::{Error, Result};

/// Largest admissible kernel tail `t_K^N`.
pub const RESOLUTION_LIMIT: f64 = 0.01;
/// Required growth of consecutive Abel values over the last three indices.
pub const GROWTH_RATIO: f64 = 1.5;
/// Largest imaginary part tolerated on an Abel value.
pub const POSITIVITY_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phi0 {
    /// `(1 − z)^{−1/2}`, coefficients `binom(2n, n)/4ⁿ`.
    InvSqrtOneMinusZ,
    /// `−log(1 − z)`, coefficients `1/n`.
    NegLogOneMinusZ,
}

impl Phi0 {
    pub fn series(self, n: usize) -> TaylorSeries {
        match self {
            Phi0::InvSqrtOneMinusZ => central_binomial(n),
            Phi0::NegLogOneMinusZ => TaylorSeries::from_fn(n + 1, |k| {
                Complex64::new(if k == 0 { 0.0 } else { 1.0 / k as f64 }, 0.0)
            }),
        }
    }

    /// Closed-form value on `[0, 1)`.
    pub fn value(self, x: f64) -> f64 {
        match self {
            Phi0::InvSqrtOneMinusZ => 1.0 / (1.0 - x).sqrt(),
            Phi0::NegLogOneMinusZ => -(1.0 - x).ln(),
        }
    }
}

/// `(1 − z)^{−1/2}`: `c₀ = 1`, `c_n = c_{n−1}(2n − 1)/(2n)`.
fn central_binomial(n: usize) -> TaylorSeries {
    let mut c = 1.0;
    TaylorSeries::from_fn(n + 1, |k| {
        if k > 0 {
            c *= (2 * k - 1) as f64 / (2 * k) as f64;
        }
        Complex64::new(c, 0.0)
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CounterexampleConfig {
    /// Number of retained zeros `t_n = 1 − 4^{−n}`.
    pub n_zeros: usize,
    pub phi0: Phi0,
    /// `c_n = 2^{c_exponent · n}`.
    pub c_exponent: f64,
    /// First index of the sum defining `f`.
    pub n0: usize,
    /// Truncation degree.
    pub degree: usize,
    /// When false, `B ≡ 1` while `f` still uses the kernels at `t_n`.
    pub with_blaschke: bool,
}

impl CounterexampleConfig {
    /// Seven zeros, `φ₀ = (1 − z)^{−1/2}`, `c_n = 2^{−n/4}`, `n₀ = 1`.
    pub fn standard(degree: usize) -> Self {
        Self { n_zeros: 7, phi0: Phi0::InvSqrtOneMinusZ, c_exponent: -0.25, n0: 1, degree, with_blaschke: true }
    }

    /// `φ = −B² log(1 − z)/(1 − z)^{1/2}`. The logarithm grows only linearly
    /// in `n` at `t_n²`, so `c_n = 2^{n/2}` grows to keep the Abel values
    /// separating by the certificate's factor on a seven-zero truncation.
    pub fn neg_log(degree: usize) -> Self {
        Self { phi0: Phi0::NegLogOneMinusZ, c_exponent: 0.5, ..Self::standard(degree) }
    }

    pub fn blaschke(&self) -> BlaschkeSpec {
        BlaschkeSpec::quartic(self.n_zeros)
    }

    pub fn zeros(&self) -> Vec<f64> {
        self.blaschke().zeros().to_vec()
    }

    pub fn c(&self, n: usize) -> f64 {
        (self.c_exponent * n as f64).exp2()
    }

    /// Indices `n0..=n_zeros` that enter `f`.
    pub fn indices(&self) -> core::ops::RangeInclusive<usize> {
        self.n0.max(1)..=self.n_zeros
    }

    fn validate(&self) -> Result<()> {
        let zeros = self.zeros();
        if let Some(&t) = self.indices().next().and_then(|n| zeros.get(n - 1)) {
            if !(self.phi0.value(t * t) >= 0.0) {
                return Err(Error::ParameterOutOfRange(format!("phi0 is negative at t_n0^2 = {}", t * t)));
            }
        }
        let mut prev = f64::NEG_INFINITY;
        for n in self.indices() {
            let t = zeros[n - 1];
            let v = self.c(n) * self.phi0.value(t * t);
            if !(v > prev) {
                return Err(Error::ParameterOutOfRange(format!(
                    "c_n phi0(t_n^2) must increase; it drops at n = {n}"
                )));
            }
            prev = v;
        }
        if let Some(&t) = zeros.last() {
            let tail = t.powf(self.degree as f64);
            if tail > RESOLUTION_LIMIT {
                return Err(Error::Resolution { tail });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Counterexample {
    pub phi: TaylorSeries,
    pub f: TaylorSeries,
    pub blaschke: TaylorSeries,
}

/// Builds `φ` from closed-form factor series and `f` from kernels at the zeros.
pub fn build_counterexample(config: &CounterexampleConfig) -> Result<Counterexample> {
    config.validate()?;
    let n = config.degree;
    let spec = config.blaschke();
    let b = if config.with_blaschke {
        blaschke_series(&spec, n)
    } else {
        TaylorSeries::constant(Complex64::new(1.0, 0.0))
    };
    let b2 = b.cauchy_product(&b, n);
    let phi = b2.cauchy_product(&config.phi0.series(n), n).cauchy_product(&central_binomial(n), n);
    let weights: Vec<(f64, f64)> = config
        .indices()
        .map(|k| {
            let t = spec.zeros()[k - 1];
            (t, config.c(k) * (1.0 - t * t).sqrt())
        })
        .collect();
    let mut powers: Vec<f64> = weights.iter().map(|_| 1.0).collect();
    let f = TaylorSeries::from_fn(n + 1, |_| {
        let mut s = 0.0;
        for ((t, w), p) in weights.iter().zip(powers.iter_mut()) {
            s += w * *p;
            *p *= t;
        }
        Complex64::new(s, 0.0)
    });
    Ok(Counterexample { phi, f, blaschke: b })
}

/// The pair `(B² b₀, a₀)` where `(b₀, a₀)` is the exact pair of `1/(1 − z)`;
/// its quotient is `B²/(1 − z)`, the symbol of the `(1 − z)^{−1/2}` preset.
pub fn blaschke_pair(config: &CounterexampleConfig) -> Result<PythagoreanPair> {
    if config.phi0 != Phi0::InvSqrtOneMinusZ {
        return Err(Error::InvalidArgument("the exact pair needs phi0 = (1 - z)^(-1/2)".into()));
    }
    config.validate()?;
    let n = config.degree;
    let base = RationalFn::new(TaylorSeries::from_real(&[1.0]), TaylorSeries::from_real(&[1.0, -1.0]))?;
    let base = rational_pair(&base, n)?;
    let b = if config.with_blaschke {
        blaschke_series(&config.blaschke(), n)
    } else {
        TaylorSeries::constant(Complex64::new(1.0, 0.0))
    };
    let b2 = b.cauchy_product(&b, n);
    PythagoreanPair::new(b2.cauchy_product(base.b(), n), base.a().clone(), base.grid_size())
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertificateRecord {
    pub n: usize,
    pub t: f64,
    /// `S(t_n) = Σ_m conj(φ̂(m)) f̂(m) t_nᵐ` from the truncated series.
    pub abel_value: Complex64,
    /// `Σ_k c_k (1 − t_k²)^{1/2} B(t_n t_k)² φ₀(t_n t_k) (1 − t_n t_k)^{−1/2}` from the product form.
    pub closed_form: f64,
    /// `c_n B(t_n²)² φ₀(t_n²)`.
    pub lower_bound: f64,
    /// Allowance for truncation and roundoff in `abel_value`.
    pub slack: f64,
    /// `|B(t_n²)|`.
    pub blaschke_value: f64,
}

#[derive(Clone, Debug)]
pub struct DivergenceCertificate {
    pub records: Vec<CertificateRecord>,
    /// `min_n |B(t_n²)|` over all retained zeros.
    pub blaschke_inf: f64,
    /// `S(t_{n+1}) / S(t_n)`.
    pub growth_ratios: Vec<f64>,
    /// Every `S(t_n) ≥ lower_bound − slack`.
    pub bound_holds: bool,
    /// Every `S(t_n)` has nonnegative real part and imaginary part within 1e-8.
    pub positive: bool,
    /// The last two growth ratios are at least [`GROWTH_RATIO`].
    pub verdict: bool,
}

/// Evaluates the Abel sums at each retained `t_n` and compares them with the
/// lower bound `c_n B(t_n²)² φ₀(t_n²)` computed from the product form.
///
/// The slack covers the omitted tail `m > N`, estimated with twice the
/// largest `|φ̂(m)|` over `[N/2, N]` against the exact kernel tails, plus
/// `64 ε Σ |terms|` of roundoff.
pub fn divergence_certificate(config: &CounterexampleConfig) -> Result<DivergenceCertificate> {
    let ce = build_counterexample(config)?;
    let n = config.degree;
    let spec = config.blaschke();
    let zeros = spec.zeros();
    let with_b = |x: f64| -> f64 {
        if config.with_blaschke {
            spec.evaluate(Complex64::new(x, 0.0)).re
        } else {
            1.0
        }
    };
    let envelope = (n / 2..=n).map(|m| ce.phi.get(m).norm()).fold(0.0, f64::max);
    let mut records = Vec::new();
    for k in config.indices() {
        let t = zeros[k - 1];
        let abel = abel_trace(&ce.phi, &ce.f, &[t])[0];
        let mut tail = 0.0;
        let mut closed = 0.0;
        let mut abs_terms = 0.0;
        for j in config.indices() {
            let tj = zeros[j - 1];
            let w = config.c(j) * (1.0 - tj * tj).sqrt();
            let x = t * tj;
            tail += w * x.powf((n + 1) as f64) / (1.0 - x);
            closed += w * with_b(x).powi(2) * config.phi0.value(x) / (1.0 - x).sqrt();
        }
        let mut r = 1.0;
        for m in 0..=n {
            abs_terms += ce.phi.get(m).norm() * ce.f.get(m).norm() * r;
            r *= t;
        }
        let slack = 2.0 * envelope * tail + 64.0 * f64::EPSILON * abs_terms;
        let bt = with_b(t * t);
        records.push(CertificateRecord {
            n: k,
            t,
            abel_value: abel,
            closed_form: closed,
            lower_bound: config.c(k) * bt * bt * config.phi0.value(t * t),
            slack,
            blaschke_value: bt.abs(),
        });
    }
    let growth_ratios: Vec<f64> = records.windows(2).map(|w| w[1].abel_value.re / w[0].abel_value.re).collect();
    let bound_holds = records.iter().all(|r| r.abel_value.re >= r.lower_bound - r.slack);
    let positive = records
        .iter()
        .all(|r| r.abel_value.re >= 0.0 && r.abel_value.im.abs() <= POSITIVITY_TOLERANCE);
    let verdict = growth_ratios.len() >= 2
        && growth_ratios[growth_ratios.len() - 2..].iter().all(|g| *g >= GROWTH_RATIO);
    let blaschke_inf = if config.with_blaschke { blaschke_inf_check(&spec) } else { 1.0 };
    Ok(DivergenceCertificate { records, blaschke_inf, growth_ratios, bound_holds, positive, verdict })
}
