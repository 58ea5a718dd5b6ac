//! The counting expansion `p(x) = e^{hx} x^{-3/2} Σ_{n=0}^{N} C_n x^{-n/2}`:
//! evaluation, leading-term ratios, and linear least-squares fitting of the
//! `C_n` from count samples.
//!
//! This is the one floating-point module of the crate.

use std::fmt;

use crate::error::{Error, Result};

/// Default entropy for closed surfaces.
pub const DEFAULT_ENTROPY: f64 = 2.0;

/// Largest `h·x` accepted before `e^{hx}` is treated as out of range.
pub const DEFAULT_EXPONENT_LIMIT: f64 = 700.0;

#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticExpansion {
    pub h: f64,
    /// `C_0, …, C_N`
    pub coeffs: Vec<f64>,
}

impl AsymptoticExpansion {
    pub fn new(h: f64, coeffs: Vec<f64>) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("entropy h must be positive, got {h}")));
        }
        match coeffs.first() {
            Some(&c0) if c0 > 0.0 => {}
            _ => return Err(Error::InvalidArgument("leading coefficient C0 must be positive".into())),
        }
        Ok(AsymptoticExpansion { h, coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        self.coeffs[0]
    }

    /// All odd-index coefficients vanish.
    pub fn odd_zero(&self) -> bool {
        self.coeffs.iter().skip(1).step_by(2).all(|&c| c == 0.0)
    }

    /// `e^{hx} x^{-3/2}`
    fn envelope(&self, x: f64) -> Result<f64> {
        if x <= 0.0 || !x.is_finite() {
            return Err(Error::InvalidArgument(format!("x must be positive, got {x}")));
        }
        let hx = self.h * x;
        if hx > DEFAULT_EXPONENT_LIMIT {
            return Err(Error::Range(format!("h·x = {hx} exceeds {DEFAULT_EXPONENT_LIMIT}")));
        }
        Ok(hx.exp() * x.powf(-1.5))
    }

    pub fn correction(&self, x: f64) -> f64 {
        let step = x.powf(-0.5);
        let mut pw = 1.0;
        let mut sum = 0.0;
        for c in &self.coeffs {
            sum += c * pw;
            pw *= step;
        }
        sum
    }

    /// Partial sum of the expansion at `x`, without the error term.
    pub fn eval(&self, x: f64) -> Result<f64> {
        Ok(self.envelope(x)? * self.correction(x))
    }

    /// `C_0 e^{hx} x^{-3/2}`
    pub fn leading_term(&self, x: f64) -> Result<f64> {
        Ok(self.envelope(x)? * self.leading())
    }

    /// Bound `(Σ_{n≥2} |C_n| / C_0) / x` on `|ratio − 1|` for odd-free
    /// expansions at `x ≥ 1`.
    pub fn ratio_bound(&self, x: f64) -> f64 {
        let tail = self.coeffs.iter().skip(2).fold(0.0, |acc, c| acc + c.abs());
        tail / self.leading() / x
    }
}

impl fmt::Display for AsymptoticExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "h = {}", self.h)?;
        writeln!(f, "N = {}", self.degree())?;
        for (i, c) in self.coeffs.iter().enumerate() {
            writeln!(f, "C{i} = {c:.12e}")?;
        }
        Ok(())
    }
}

/// Counting-function sample `(x, count)`. Counts are real so noiseless
/// synthetic data stays exact.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CountSample {
    pub x: f64,
    pub count: f64,
}

// negated comparisons so that NaN is rejected too
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn check_samples(samples: &[CountSample]) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no samples".into()));
    }
    for s in samples {
        if !(s.x > 0.0) || !(s.count >= 0.0) {
            return Err(Error::InvalidArgument(format!("sample ({}, {}) out of range", s.x, s.count)));
        }
    }
    for w in samples.windows(2) {
        if !(w[1].x > w[0].x) {
            return Err(Error::InvalidArgument(format!(
                "sample x values must be strictly increasing ({} then {})",
                w[0].x, w[1].x
            )));
        }
        if w[1].count < w[0].count {
            return Err(Error::InvalidArgument(format!(
                "counts must be nondecreasing ({} then {})",
                w[0].count, w[1].count
            )));
        }
    }
    Ok(())
}

/// Samples of `e.eval` at each `x`.
pub fn synthesize(e: &AsymptoticExpansion, xs: &[f64]) -> Result<Vec<CountSample>> {
    xs.iter()
        .map(|&x| Ok(CountSample { x, count: e.eval(x)? }))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioReport {
    pub ratios: Vec<f64>,
    /// Set when some ratio is zero or not finite.
    pub non_conforming: bool,
}

/// `count / (C_0 e^{hx} x^{-3/2})` for each sample.
pub fn leading_ratio(e: &AsymptoticExpansion, samples: &[CountSample]) -> Result<RatioReport> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no samples".into()));
    }
    let ratios = samples
        .iter()
        .map(|s| Ok(s.count / e.leading_term(s.x)?))
        .collect::<Result<Vec<f64>>>()?;
    let non_conforming = ratios.iter().any(|r| *r == 0.0 || !r.is_finite());
    Ok(RatioReport { ratios, non_conforming })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitReport {
    pub expansion: AsymptoticExpansion,
    /// `max |predicted − observed| / observed`
    pub max_relative_residual: f64,
}

/// Least-squares fit of `count · x^{3/2} e^{-hx}` on the basis
/// `{x^{-n/2}}_{n ≤ N}`; with `enforce_odd_zero` the odd columns are dropped
/// and their coefficients fixed at exactly 0.
pub fn fit_expansion(samples: &[CountSample], h: f64, n: usize, enforce_odd_zero: bool) -> Result<FitReport> {
    check_samples(samples).map_err(|e| Error::Fit(e.to_string()))?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Fit(format!("entropy h must be positive, got {h}")));
    }
    let free: Vec<usize> = (0..=n).filter(|i| !enforce_odd_zero || i % 2 == 0).collect();
    if samples.len() < free.len() {
        return Err(Error::Fit(format!(
            "{} samples for {} free coefficients",
            samples.len(),
            free.len()
        )));
    }
    let mut design = Vec::with_capacity(samples.len());
    let mut target = Vec::with_capacity(samples.len());
    for s in samples {
        if s.x * h > DEFAULT_EXPONENT_LIMIT {
            return Err(Error::Fit(format!("h·x = {} exceeds {DEFAULT_EXPONENT_LIMIT}", s.x * h)));
        }
        design.push(free.iter().map(|&i| s.x.powf(-(i as f64) / 2.0)).collect::<Vec<f64>>());
        target.push(s.count * s.x.powf(1.5) * (-h * s.x).exp());
    }
    let solved = least_squares(design, target).ok_or_else(|| Error::Fit("rank-deficient design".into()))?;
    let mut coeffs = vec![0.0; n + 1];
    for (&i, c) in free.iter().zip(solved) {
        coeffs[i] = c;
    }
    let expansion = AsymptoticExpansion::new(h, coeffs).map_err(|e| Error::Fit(e.to_string()))?;
    let mut max_rel: f64 = 0.0;
    for s in samples {
        let pred = expansion.eval(s.x)?;
        let rel = if s.count != 0.0 {
            ((pred - s.count) / s.count).abs()
        } else {
            pred.abs()
        };
        max_rel = max_rel.max(rel);
    }
    Ok(FitReport {
        expansion,
        max_relative_residual: max_rel,
    })
}

// Householder QR; None when a column is numerically dependent.
fn least_squares(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let scale: f64 = a.iter().flatten().fold(0.0, |acc: f64, v| acc.max(v.abs()));
    for k in 0..n {
        let norm: f64 = (k..m).map(|i| a[i][k] * a[i][k]).sum::<f64>().sqrt();
        if norm <= 1e-12 * scale.max(1.0) {
            return None;
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..m).map(|i| a[i][k]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for j in k..n {
            let dot: f64 = (k..m).map(|i| v[i - k] * a[i][j]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in k..m {
                a[i][j] -= f * v[i - k];
            }
        }
        let dot: f64 = (k..m).map(|i| v[i - k] * b[i]).sum();
        let f = 2.0 * dot / vnorm2;
        for i in k..m {
            b[i] -= f * v[i - k];
        }
    }
    let rmax = (0..n).fold(0.0f64, |acc, k| acc.max(a[k][k].abs()));
    if (0..n).any(|k| a[k][k].abs() <= 1e-10 * rmax) {
        return None;
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    Some(x)
}

/// Reads whitespace- or comma-separated `x count` lines; `#` starts a
/// comment and a non-numeric first line is taken as a header.
pub fn parse_samples(text: &str) -> Result<Vec<CountSample>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        if fields.len() != 2 {
            return Err(Error::Parse(format!("line {}: expected two columns, got {}", lineno + 1, fields.len())));
        }
        let parsed: std::result::Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(v) => out.push(CountSample { x: v[0], count: v[1] }),
            Err(_) if out.is_empty() => continue,
            Err(e) => return Err(Error::Parse(format!("line {}: {e}", lineno + 1))),
        }
    }
    if out.is_empty() {
        return Err(Error::Parse("no samples found".into()));
    }
    Ok(out)
}
