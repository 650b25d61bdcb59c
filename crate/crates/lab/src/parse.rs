//! Text forms of series, rational functions, presets and pole lists.
//!
//! ```text
//! poly:1,-0.5+2i,3i          coefficients from degree 0
//! rational:1;1,-1            numerator ; denominator
//! preset:golden_pair         1/(1 - z)
//! preset:neg_log             -log(1 - z)
//! preset:corollary_6_2       -B² log(1 - z)/(1 - z)^{1/2}
//! preset:corollary_6_3       B²/(1 - z)
//! ```
//!
//! Offsets in errors count bytes from the start of the whole text.

use hb_core::counterexamples::{blaschke_pair, build_counterexample, CounterexampleConfig};
use hb_core::hardy::{pair_from_smirnov, PythagoreanPair};
use hb_core::rational::{rational_pair, CirclePoles, RationalFn};
use hb_core::{Complex64, TaylorSeries};

use crate::error::{LabError, LabResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    LogBlaschke,
    BlaschkeRatio,
    GoldenPair,
    NegLog,
}

impl Preset {
    pub const NAMES: [&'static str; 4] = ["corollary_6_2", "corollary_6_3", "golden_pair", "neg_log"];

    pub fn name(self) -> &'static str {
        match self {
            Preset::LogBlaschke => "corollary_6_2",
            Preset::BlaschkeRatio => "corollary_6_3",
            Preset::GoldenPair => "golden_pair",
            Preset::NegLog => "neg_log",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        match s {
            "corollary_6_2" => Some(Preset::LogBlaschke),
            "corollary_6_3" => Some(Preset::BlaschkeRatio),
            "golden_pair" => Some(Preset::GoldenPair),
            "neg_log" => Some(Preset::NegLog),
            _ => None,
        }
    }

    pub fn counterexample(self, n: usize) -> Option<CounterexampleConfig> {
        match self {
            Preset::LogBlaschke => Some(CounterexampleConfig::neg_log(n)),
            Preset::BlaschkeRatio => Some(CounterexampleConfig::standard(n)),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub enum SeriesSpec {
    Poly(TaylorSeries),
    Rational(RationalFn),
    Preset(Preset),
}

impl SeriesSpec {
    /// Taylor coefficients to degree `n` (a polynomial keeps its own length).
    pub fn symbol(&self, n: usize) -> LabResult<TaylorSeries> {
        Ok(match self {
            SeriesSpec::Poly(p) => p.clone(),
            SeriesSpec::Rational(r) => r.taylor(n),
            SeriesSpec::Preset(Preset::GoldenPair) => golden().taylor(n),
            SeriesSpec::Preset(Preset::NegLog) => neg_log(n),
            SeriesSpec::Preset(p) => build_counterexample(&p.counterexample(n).expect("corollary preset"))?.phi,
        })
    }

    /// A test function: presets give `−log(1 − z)` or the counterexample `f`.
    pub fn function(&self, n: usize) -> LabResult<TaylorSeries> {
        match self {
            SeriesSpec::Preset(p @ (Preset::LogBlaschke | Preset::BlaschkeRatio)) => {
                Ok(build_counterexample(&p.counterexample(n).expect("corollary preset"))?.f)
            }
            other => other.symbol(n),
        }
    }

    /// The pair `(b, a)` with `φ = b/a`: exact for polynomials, rational
    /// functions and `corollary_6_3`, from boundary values otherwise.
    /// `neg_log` is cut at degree `N/8` first so that `a` is resolved by `N`
    /// coefficients.
    pub fn pair(&self, n: usize, m: usize) -> LabResult<PythagoreanPair> {
        Ok(match self {
            SeriesSpec::Poly(p) => rational_pair(&RationalFn::new(p.clone(), TaylorSeries::from_real(&[1.0]))?, n)?,
            SeriesSpec::Rational(r) => rational_pair(r, n)?,
            SeriesSpec::Preset(Preset::GoldenPair) => rational_pair(&golden(), n)?,
            SeriesSpec::Preset(Preset::BlaschkeRatio) => blaschke_pair(&CounterexampleConfig::standard(n))?,
            SeriesSpec::Preset(Preset::NegLog) => pair_from_smirnov(&neg_log(n / 8), m, n)?,
            SeriesSpec::Preset(Preset::LogBlaschke) => pair_from_smirnov(&self.symbol(n)?, m, n)?,
        })
    }

    pub fn rational(&self) -> Option<RationalFn> {
        match self {
            SeriesSpec::Poly(p) => RationalFn::new(p.clone(), TaylorSeries::from_real(&[1.0])).ok(),
            SeriesSpec::Rational(r) => Some(r.clone()),
            SeriesSpec::Preset(Preset::GoldenPair) => Some(golden()),
            SeriesSpec::Preset(_) => None,
        }
    }
}

fn golden() -> RationalFn {
    RationalFn::new(TaylorSeries::from_real(&[1.0]), TaylorSeries::from_real(&[1.0, -1.0])).expect("1/(1 - z)")
}

fn neg_log(n: usize) -> TaylorSeries {
    TaylorSeries::from_fn(n + 1, |k| Complex64::new(if k == 0 { 0.0 } else { 1.0 / k as f64 }, 0.0))
}

fn err(text: &str, offset: usize, message: impl Into<String>) -> LabError {
    LabError::Parse { text: text.to_string(), offset, message: message.into() }
}

pub fn parse_series(text: &str) -> LabResult<SeriesSpec> {
    if let Some(body) = text.strip_prefix("poly:") {
        Ok(SeriesSpec::Poly(parse_coeffs(text, body, 5)?))
    } else if let Some(body) = text.strip_prefix("rational:") {
        let Some(split) = body.find(';') else {
            return Err(err(text, text.len(), "expected ';' between numerator and denominator"));
        };
        let p = parse_coeffs(text, &body[..split], 9)?;
        let q = parse_coeffs(text, &body[split + 1..], 9 + split + 1)?;
        Ok(SeriesSpec::Rational(RationalFn::new(p, q)?))
    } else if let Some(name) = text.strip_prefix("preset:") {
        Preset::from_name(name).map(SeriesSpec::Preset).ok_or_else(|| {
            err(text, 7, format!("unknown preset {name:?}; expected one of {}", Preset::NAMES.join(", ")))
        })
    } else {
        Err(err(text, 0, "expected 'poly:', 'rational:' or 'preset:'"))
    }
}

fn parse_coeffs(text: &str, body: &str, base: usize) -> LabResult<TaylorSeries> {
    let mut out = Vec::new();
    let mut offset = base;
    for token in body.split(',') {
        out.push(parse_complex(text, token, offset)?);
        offset += token.len() + 1;
    }
    Ok(TaylorSeries::new(out)?)
}

/// Length of the longest prefix of `s` that reads as an unsigned decimal
/// number with optional fraction and exponent.
fn number_len(s: &[u8]) -> usize {
    let digits = |mut i: usize| {
        while i < s.len() && s[i].is_ascii_digit() {
            i += 1;
        }
        i
    };
    let int_end = digits(0);
    let mut end = int_end;
    if end < s.len() && s[end] == b'.' {
        let frac_end = digits(end + 1);
        if frac_end > end + 1 || int_end > 0 {
            end = frac_end;
        }
    }
    if end == 0 {
        return 0;
    }
    if end < s.len() && (s[end] == b'e' || s[end] == b'E') {
        let mut i = end + 1;
        if i < s.len() && (s[i] == b'+' || s[i] == b'-') {
            i += 1;
        }
        let exp_end = digits(i);
        if exp_end > i {
            end = exp_end;
        }
    }
    end
}

/// A signed number at `pos`; returns the value and the position after it.
fn signed(text: &str, token: &str, pos: usize, offset: usize) -> LabResult<(f64, usize)> {
    let bytes = token.as_bytes();
    let mut i = pos;
    let negative = i < bytes.len() && bytes[i] == b'-';
    if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
        i += 1;
    }
    let len = number_len(&bytes[i..]);
    if len == 0 {
        // An imaginary unit without digits, as in `1+i`.
        if i < bytes.len() && bytes[i] == b'i' && (i > pos || pos == 0) {
            return Ok((if negative { -1.0 } else { 1.0 }, i));
        }
        return Err(err(text, offset + pos, "expected a number"));
    }
    let v: f64 = token[i..i + len].parse().map_err(|_| err(text, offset + i, "malformed number"))?;
    Ok((if negative { -v } else { v }, i + len))
}

/// `re`, `imi`, `re+imi` or `re-imi`.
pub fn parse_complex(text: &str, token: &str, offset: usize) -> LabResult<Complex64> {
    let bytes = token.as_bytes();
    if token.trim().is_empty() {
        return Err(err(text, offset, "empty coefficient"));
    }
    let (first, mut pos) = signed(text, token, 0, offset)?;
    if pos == bytes.len() {
        return Ok(Complex64::new(first, 0.0));
    }
    if bytes[pos] == b'i' {
        if pos + 1 != bytes.len() {
            return Err(err(text, offset + pos + 1, "unexpected text after imaginary part"));
        }
        return Ok(Complex64::new(0.0, first));
    }
    if bytes[pos] != b'+' && bytes[pos] != b'-' {
        return Err(err(text, offset + pos, "unexpected character"));
    }
    if pos + 1 == bytes.len() {
        return Err(err(text, offset + pos, "sign without an imaginary part"));
    }
    let (second, next) = signed(text, token, pos, offset)?;
    pos = next;
    if pos >= bytes.len() || bytes[pos] != b'i' {
        return Err(err(text, offset + pos, "expected 'i' after the imaginary part"));
    }
    if pos + 1 != bytes.len() {
        return Err(err(text, offset + pos + 1, "unexpected text after imaginary part"));
    }
    Ok(Complex64::new(first, second))
}

/// `λ:m` entries separated by commas, e.g. `1:2` or `1:1,-1:1,0+1i:2`.
pub fn parse_poles(text: &str) -> LabResult<CirclePoles> {
    let mut poles = Vec::new();
    let mut offset = 0;
    for entry in text.split(',') {
        let Some(colon) = entry.find(':') else {
            return Err(err(text, offset + entry.len(), "expected ':' before the multiplicity"));
        };
        let lambda = parse_complex(text, &entry[..colon], offset)?;
        let mult: usize = entry[colon + 1..]
            .parse()
            .map_err(|_| err(text, offset + colon + 1, "multiplicity must be a positive integer"))?;
        if mult == 0 {
            return Err(err(text, offset + colon + 1, "multiplicity must be a positive integer"));
        }
        poles.push((lambda, mult));
        offset += entry.len() + 1;
    }
    Ok(CirclePoles::new(poles)?)
}
