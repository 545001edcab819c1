//! Exact conversion between the cogrowth series `D(z) = Σ d_n z^n` and the
//! reduced cogrowth series `C(z) = Σ c_n z^n`, for a generating set of size `2p`:
//!
//! ```text
//! C(z) = (1 - z²)/(1 + (2p-1)z²) · D(z / (1 + (2p-1)z²))
//! D(z) = (1 - p + p√(1 - 4(2p-1)z²))/(1 - 4p²z²) · C((1 - √(1 - 4(2p-1)z²)) / (2(2p-1)z))
//! ```
//!
//! Every auxiliary series here has integer coefficients, so composition runs on
//! `BigInt` after clearing the denominators of the outer series once.
//!
//! Also: the `R(n)` threshold functions and the `3^(n - q n^p)` model.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("p must be at least 1")]
    ZeroRank,
    #[error("model needs q > 0 and 0 < p < 1, got q = {q}, p = {p}")]
    ModelParams { q: f64, p: f64 },
    #[error("limit must be positive")]
    BadLimit,
}

/// Truncated power series with exact coefficients, `coeffs[n]` for `n = 0..=order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesPoly {
    pub coeffs: Vec<BigRational>,
    /// Half the size of the generating set.
    pub p: u32,
}

impl SeriesPoly {
    pub fn new(coeffs: Vec<BigRational>, p: u32) -> Result<Self, SeriesError> {
        if p == 0 {
            return Err(SeriesError::ZeroRank);
        }
        Ok(SeriesPoly { coeffs, p })
    }

    pub fn from_integers<I: Into<BigInt>>(coeffs: impl IntoIterator<Item = I>, p: u32) -> Result<Self, SeriesError> {
        Self::new(coeffs.into_iter().map(|c| BigRational::from_integer(c.into())).collect(), p)
    }

    /// Truncation order `N`; the series holds `N + 1` coefficients.
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// `Some` iff every coefficient is an integer.
    pub fn to_integers(&self) -> Option<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }

    fn with_coeffs(&self, coeffs: Vec<BigRational>) -> Self {
        SeriesPoly { coeffs, p: self.p }
    }
}

/// Product truncated to `len` terms, skipping zero coefficients.
fn mul_trunc(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// `outer(inner(z))` to `len` terms; `inner` must have zero constant term.
fn compose(outer: &[BigRational], inner: &[BigInt], len: usize) -> Vec<BigRational> {
    debug_assert!(inner.first().is_none_or(Zero::is_zero));
    let denom = outer.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let scaled: Vec<BigInt> = outer.iter().map(|c| c.numer() * (&denom / c.denom())).collect();
    let mut acc = vec![BigInt::zero(); len];
    // power[k] = inner^k, which vanishes below z^k
    let mut power = vec![BigInt::zero(); len];
    if len > 0 {
        power[0] = BigInt::one();
    }
    for (k, a) in scaled.iter().enumerate().take(len) {
        if k > 0 {
            power = mul_trunc(&power, inner, len);
        }
        if a.is_zero() {
            continue;
        }
        for (slot, x) in acc.iter_mut().zip(&power).skip(k) {
            if !x.is_zero() {
                *slot += a * x;
            }
        }
    }
    acc.into_iter().map(|x| BigRational::new(x, denom.clone())).collect()
}

/// `f · g` where `g` has integer coefficients.
fn scale_by(f: &[BigRational], g: &[BigInt]) -> Vec<BigRational> {
    let denom = f.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let scaled: Vec<BigInt> = f.iter().map(|c| c.numer() * (&denom / c.denom())).collect();
    mul_trunc(&scaled, g, f.len())
        .into_iter()
        .map(|x| BigRational::new(x, denom.clone()))
        .collect()
}

/// `1 / (1 - c z²)` to `len` terms.
fn geometric_even(c: &BigInt, len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    let mut term = BigInt::one();
    for slot in out.iter_mut().step_by(2) {
        *slot = term.clone();
        term *= c;
    }
    out
}

/// Square root of a series with constant term 1, by `s_n = (a_n - Σ_{0<k<n} s_k s_{n-k}) / 2`.
pub fn sqrt_series(a: &[BigRational]) -> Vec<BigRational> {
    assert!(a.first().is_some_and(One::is_one), "square root needs constant term 1");
    let two = BigRational::from_integer(2.into());
    let mut s: Vec<BigRational> = Vec::with_capacity(a.len());
    s.push(BigRational::one());
    for n in 1..a.len() {
        let mut acc = a[n].clone();
        for k in 1..n {
            acc -= &s[k] * &s[n - k];
        }
        s.push(acc / &two);
    }
    s
}

fn integral(v: Vec<BigRational>) -> Vec<BigInt> {
    v.into_iter()
        .map(|c| {
            assert!(c.is_integer(), "expected an integer coefficient, got {c}");
            c.to_integer()
        })
        .collect()
}

/// `√(1 - 4(2p-1)z²)` to `len` terms.
fn root_term(p: u32, len: usize) -> Vec<BigInt> {
    let q = BigInt::from(2 * p as u64 - 1);
    let mut a = vec![BigRational::zero(); len];
    if len > 0 {
        a[0] = BigRational::one();
    }
    if len > 2 {
        a[2] = BigRational::from_integer(-BigInt::from(4) * q);
    }
    integral(sqrt_series(&a))
}

pub fn reduced_from_cogrowth(d: &SeriesPoly) -> SeriesPoly {
    let len = d.coeffs.len();
    let q = BigInt::from(2 * d.p as u64 - 1);
    // 1/(1 + q z²)
    let g = geometric_even(&-q, len);
    // z/(1 + q z²)
    let mut inner = vec![BigInt::zero(); len];
    if len > 1 {
        inner[1..].clone_from_slice(&g[..len - 1]);
    }
    // (1 - z²)/(1 + q z²)
    let mut prefactor = g.clone();
    for i in (2..len).rev() {
        prefactor[i] = &g[i] - &g[i - 2];
    }
    d.with_coeffs(scale_by(&compose(&d.coeffs, &inner, len), &prefactor))
}

pub fn cogrowth_from_reduced(c: &SeriesPoly) -> SeriesPoly {
    let len = c.coeffs.len();
    let p = BigInt::from(c.p);
    let q = BigInt::from(2 * c.p as u64 - 1);
    // one extra term: the inner argument divides (1 - √…) by z
    let root = root_term(c.p, len + 1);
    let mut inner = vec![BigInt::zero(); len];
    for i in 1..len {
        // (1 - √…)_{i+1} / (2q)
        let (quot, rem) = (-&root[i + 1]).div_rem(&(BigInt::from(2) * &q));
        debug_assert!(rem.is_zero());
        inner[i] = quot;
    }
    let mut numer: Vec<BigInt> = root[..len].iter().map(|r| &p * r).collect();
    if len > 0 {
        numer[0] += BigInt::one() - &p;
    }
    let prefactor = mul_trunc(&numer, &geometric_even(&(BigInt::from(4) * &p * &p), len), len);
    c.with_coeffs(scale_by(&compose(&c.coeffs, &inner, len), &prefactor))
}

/// Coefficients fed to [`r_function`], indexed by `n`; only even indices are read.
#[derive(Clone, Debug, PartialEq)]
pub enum Coefficients {
    Exact(Vec<BigRational>),
    /// `ln` of each coefficient; `-inf` marks a zero.
    Log(Vec<f64>),
}

impl Coefficients {
    fn len(&self) -> usize {
        match self {
            Coefficients::Exact(v) => v.len(),
            Coefficients::Log(v) => v.len(),
        }
    }

    fn is_zero(&self, i: usize) -> bool {
        match self {
            Coefficients::Exact(v) => v[i].is_zero(),
            Coefficients::Log(v) => v[i] == f64::NEG_INFINITY,
        }
    }

    /// `c_{j} / c_{i} > limit - 1/n`.
    fn ratio_exceeds(&self, i: usize, j: usize, limit: &BigRational, n: usize) -> bool {
        let threshold = limit - BigRational::new(BigInt::one(), BigInt::from(n));
        match self {
            Coefficients::Exact(v) => {
                if v[i].is_positive() {
                    v[j] > &threshold * &v[i]
                } else {
                    v[j] < &threshold * &v[i]
                }
            }
            Coefficients::Log(v) => {
                let t = threshold.to_f64().unwrap_or(f64::NAN);
                t <= 0.0 || v[j] - v[i] > t.ln()
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RValue {
    K(usize),
    BeyondHorizon,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RFunctionTable {
    /// `(n, R(n))` for `n = 1..=n_max`.
    pub values: Vec<(usize, RValue)>,
    pub limit_root_squared: String,
    /// Largest `k` whose ratio `c_{2k+2}/c_{2k}` the data could answer.
    pub horizon: Option<usize>,
    pub notes: Vec<String>,
}

impl RFunctionTable {
    pub fn get(&self, n: usize) -> Option<RValue> {
        self.values.iter().find(|(m, _)| *m == n).map(|(_, v)| *v)
    }
}

/// `R(n) = min{k : c_{2k+2}/c_{2k} > limit - 1/n}` for `n = 1..=n_max`.
///
/// The threshold rises with `n`, so the scan over `k` resumes where the previous
/// `n` stopped. Pairs involving a zero coefficient are skipped with a note.
pub fn r_function(coeffs: &Coefficients, limit: &BigRational, n_max: usize) -> Result<RFunctionTable, SeriesError> {
    if !limit.is_positive() {
        return Err(SeriesError::BadLimit);
    }
    let pairs = coeffs.len().saturating_sub(1) / 2;
    let mut notes = Vec::new();
    let mut skipped = Vec::new();
    let usable: Vec<bool> = (0..pairs)
        .map(|k| {
            let ok = !coeffs.is_zero(2 * k) && !coeffs.is_zero(2 * k + 2);
            if !ok {
                skipped.push(k);
            }
            ok
        })
        .collect();
    if !skipped.is_empty() {
        notes.push(format!(
            "skipped k = {:?}: zero coefficient in c_(2k+2)/c_(2k)",
            skipped
        ));
    }
    let mut values = Vec::with_capacity(n_max);
    let mut k = 0;
    for n in 1..=n_max {
        while k < pairs && !(usable[k] && coeffs.ratio_exceeds(2 * k, 2 * k + 2, limit, n)) {
            k += 1;
        }
        values.push((n, if k < pairs { RValue::K(k) } else { RValue::BeyondHorizon }));
    }
    Ok(RFunctionTable {
        values,
        limit_root_squared: limit.to_string(),
        horizon: pairs.checked_sub(1),
        notes,
    })
}

/// `ln c_n = (n - q n^p) ln 3` for `n = 0..=max_len`.
pub fn model_cogrowth(q: f64, p: f64, max_len: usize) -> Result<Vec<f64>, SeriesError> {
    if !(q > 0.0 && p > 0.0 && p < 1.0) {
        return Err(SeriesError::ModelParams { q, p });
    }
    let ln3 = 3f64.ln();
    Ok((0..=max_len)
        .map(|n| {
            let n = n as f64;
            (n - q * n.powf(p)) * ln3
        })
        .collect())
}

/// Closed-form `R(n) = (9 ln 3 · q p 2^p n)^(1/(1-p))` for the model.
pub fn model_r_closed_form(q: f64, p: f64, n: usize) -> f64 {
    (9.0 * 3f64.ln() * q * p * 2f64.powf(p) * n as f64).powf(1.0 / (1.0 - p))
}

/// `ln(c_n (n+1)^(1+α) β^n)`, the unnormalised length distribution of a walk.
pub fn model_curve(log_c: &[f64], alpha: f64, beta: f64) -> Vec<f64> {
    log_c
        .iter()
        .enumerate()
        .map(|(n, l)| l + (1.0 + alpha) * (n as f64 + 1.0).ln() + n as f64 * beta.ln())
        .collect()
}

/// Indices of strict interior local maxima.
pub fn local_maxima(curve: &[f64]) -> Vec<usize> {
    (1..curve.len().saturating_sub(1))
        .filter(|&i| curve[i] > curve[i - 1] && curve[i] > curve[i + 1])
        .collect()
}
