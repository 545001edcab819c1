//! Cogrowth coefficients from visit counts.
//!
//! Under the stationary law a walk visits length `n` with weight
//! `c_n (n+1)^(1+α) β^n`, so two lengths of one record give
//!
//! ```text
//! c_m ≈ c_n (W_m / W_n) ((n+1)/(m+1))^(1+α) β^(n-m)
//! ```
//!
//! with relative errors adding: `e_m = e_n + ΔW_m/W_m + ΔW_n/W_n`.
//! Everything is carried as `ln c_n`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::walker::WalkRecord;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error("no walk records supplied")]
    NoRecords,
    #[error("records come from different presentations (digest {0} vs {1})")]
    MixedPresentations(String, String),
    #[error("record has {segments} segments; {burn_in} burn-in segment(s) leave fewer than 2")]
    TooFewSegments { segments: usize, burn_in: usize },
    #[error("invalid estimator configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CogrowthEstimate {
    pub n: usize,
    /// `ln ĉ_n`.
    pub log_value: f64,
    /// `Δc_n / c_n`.
    pub rel_error: f64,
    /// `(record index, anchor length)` of every contributing candidate.
    pub provenance: Vec<(usize, usize)>,
    pub n_candidates: usize,
}

impl CogrowthEstimate {
    /// An exactly known coefficient.
    pub fn exact(n: usize, value: f64) -> Self {
        assert!(value > 0.0, "exact anchors must be positive, got c_{n} = {value}");
        CogrowthEstimate {
            n,
            log_value: value.ln(),
            rel_error: 0.0,
            provenance: Vec::new(),
            n_candidates: 0,
        }
    }

    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaEstimate {
    pub n: usize,
    pub gamma: f64,
    pub gamma_error: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Per-length segment means and their errors for one record.
#[derive(Clone, Debug, PartialEq)]
pub struct Tallies {
    pub alpha: f64,
    pub beta: f64,
    pub means: Vec<f64>,
    pub errors: Vec<f64>,
    pub max_mean: f64,
}

impl Tallies {
    /// Drops the first `burn_in` segments.
    pub fn from_record(rec: &WalkRecord, burn_in: usize) -> Result<Self, EstimateError> {
        let segments = &rec.segment_histograms[burn_in.min(rec.segments())..];
        if segments.len() < 2 {
            return Err(EstimateError::TooFewSegments {
                segments: rec.segments(),
                burn_in,
            });
        }
        let m = segments.len() as f64;
        let bins = rec.len_bins();
        let mut means = Vec::with_capacity(bins);
        let mut errors = Vec::with_capacity(bins);
        for n in 0..bins {
            let mean = segments.iter().map(|s| s[n] as f64).sum::<f64>() / m;
            let pop_var = segments.iter().map(|s| (s[n] as f64 - mean).powi(2)).sum::<f64>() / m;
            means.push(mean);
            errors.push((pop_var / (m - 1.0)).sqrt());
        }
        let max_mean = means.iter().copied().fold(0.0, f64::max);
        Ok(Tallies {
            alpha: rec.params.alpha,
            beta: rec.params.beta,
            means,
            errors,
            max_mean,
        })
    }

    /// `(W_n, ΔW_n)`, or `None` if length `n` was never visited.
    pub fn get(&self, n: usize) -> Option<(f64, f64)> {
        match self.means.get(n) {
            Some(&w) if w > 0.0 => Some((w, self.errors[n])),
            _ => None,
        }
    }

    /// Like [`get`](Self::get) but also requires `W_n ≥ cutoff · max W`.
    pub fn usable(&self, n: usize, cutoff: f64) -> Option<(f64, f64)> {
        self.get(n).filter(|&(w, _)| w >= cutoff * self.max_mean)
    }
}

pub fn wn_with_error(rec: &WalkRecord, n: usize, burn_in: usize) -> Result<Option<(f64, f64)>, EstimateError> {
    Ok(Tallies::from_record(rec, burn_in)?.get(n))
}

/// One step of the recursion: `ĉ_m` from `ĉ_n` and one record's tallies.
pub fn estimate_from_tallies(anchor: &CogrowthEstimate, t: &Tallies, record: usize, m: usize) -> Option<CogrowthEstimate> {
    if m == anchor.n {
        return Some(anchor.clone());
    }
    let n = anchor.n;
    let (wm, dwm) = t.get(m)?;
    let (wn, dwn) = t.get(n)?;
    let log_value = anchor.log_value + wm.ln() - wn.ln()
        + (1.0 + t.alpha) * ((n as f64 + 1.0).ln() - (m as f64 + 1.0).ln())
        + (n as f64 - m as f64) * t.beta.ln();
    let mut provenance = anchor.provenance.clone();
    provenance.push((record, n));
    Some(CogrowthEstimate {
        n: m,
        log_value,
        rel_error: anchor.rel_error + dwm / wm + dwn / wn,
        provenance,
        n_candidates: 1,
    })
}

pub fn estimate_from_anchor(
    anchor: &CogrowthEstimate,
    rec: &WalkRecord,
    m: usize,
    burn_in: usize,
) -> Result<Option<CogrowthEstimate>, EstimateError> {
    Ok(estimate_from_tallies(anchor, &Tallies::from_record(rec, burn_in)?, 0, m))
}

/// Inverse-error weighted average. The combined error is the same weighted
/// average of the candidate errors. Zero-error candidates take all the weight.
pub fn combine(n: usize, candidates: &[CogrowthEstimate]) -> Option<CogrowthEstimate> {
    if candidates.is_empty() {
        return None;
    }
    let exact: Vec<&CogrowthEstimate> = candidates.iter().filter(|c| c.rel_error == 0.0).collect();
    let weighted: Vec<(f64, &CogrowthEstimate)> = if exact.is_empty() {
        candidates.iter().map(|c| (1.0 / c.rel_error, c)).collect()
    } else {
        exact.into_iter().map(|c| (1.0, c)).collect()
    };
    let total: f64 = weighted.iter().map(|(w, _)| w).sum();
    let top = weighted.iter().map(|(_, c)| c.log_value).fold(f64::NEG_INFINITY, f64::max);
    let mix: f64 = weighted.iter().map(|(w, c)| w * (c.log_value - top).exp()).sum();
    let rel_error = weighted.iter().map(|(w, c)| w * c.rel_error).sum::<f64>() / total;
    Some(CogrowthEstimate {
        n,
        log_value: top + (mix / total).ln(),
        rel_error,
        provenance: candidates.iter().flat_map(|c| c.provenance.last().copied()).collect(),
        n_candidates: candidates.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    /// Anchors `n` with `m - window < n < m` feed `ĉ_m`.
    pub window: usize,
    /// Tallies below `cutoff ·` (the record's largest tally) are ignored.
    pub cutoff: f64,
    pub max_len: usize,
    pub burn_in_segments: usize,
    /// Known coefficients; the recursion starts from these.
    pub anchors: Vec<CogrowthEstimate>,
}

impl EstimatorConfig {
    pub fn new(max_len: usize) -> Self {
        EstimatorConfig {
            window: 100,
            cutoff: 0.1,
            max_len,
            burn_in_segments: 1,
            anchors: vec![CogrowthEstimate::exact(0, 1.0)],
        }
    }

    fn validate(&self) -> Result<(), EstimateError> {
        let bad = |m: String| Err(EstimateError::InvalidConfig(m));
        if self.window < 2 {
            return bad(format!("window must be at least 2, got {}", self.window));
        }
        if !(self.cutoff > 0.0 && self.cutoff < 1.0) {
            return bad(format!("cutoff must lie in (0, 1), got {}", self.cutoff));
        }
        if self.anchors.is_empty() {
            return bad("at least one anchor is required".into());
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    MaxLen,
    /// No record covered lengths within the window of any estimated anchor.
    CoverageGap { last_completed: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateRun {
    /// Anchors and estimates in increasing `n`.
    pub estimates: Vec<CogrowthEstimate>,
    pub stop: StopReason,
}

fn tallies_for(records: &[WalkRecord], burn_in: usize) -> Result<(Vec<Tallies>, usize), EstimateError> {
    let first = records.first().ok_or(EstimateError::NoRecords)?;
    if let Some(other) = records.iter().find(|r| r.digest != first.digest) {
        return Err(EstimateError::MixedPresentations(first.digest.clone(), other.digest.clone()));
    }
    let step = if first.parity_even { 2 } else { 1 };
    let tallies = records
        .iter()
        .map(|r| Tallies::from_record(r, burn_in))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((tallies, step))
}

/// The windowed multi-record recursion.
///
/// Lengths with no candidate are skipped while some estimated anchor is still
/// inside the window (so `c_2..c_8 = 0` of a presentation with shortest relator
/// 10 does not stop the run); once the window has moved past every anchor the
/// run stops with a coverage gap.
pub fn errr_estimate(records: &[WalkRecord], config: &EstimatorConfig) -> Result<EstimateRun, EstimateError> {
    config.validate()?;
    let (tallies, step) = tallies_for(records, config.burn_in_segments)?;
    let mut known: BTreeMap<usize, CogrowthEstimate> = config.anchors.iter().map(|a| (a.n, a.clone())).collect();
    let start = *known.keys().next().unwrap();
    let mut last_completed = *known.keys().next_back().unwrap();

    let mut m = start;
    while m + step <= config.max_len {
        m += step;
        if known.contains_key(&m) {
            continue;
        }
        let lowest = (m + 1).saturating_sub(config.window);
        let anchors: Vec<&CogrowthEstimate> = known.range(lowest..m).map(|(_, a)| a).collect();
        if anchors.is_empty() {
            return Ok(EstimateRun {
                estimates: known.into_values().collect(),
                stop: StopReason::CoverageGap { last_completed },
            });
        }
        let mut candidates = Vec::new();
        for (i, t) in tallies.iter().enumerate() {
            if t.usable(m, config.cutoff).is_none() {
                continue;
            }
            for anchor in &anchors {
                if t.usable(anchor.n, config.cutoff).is_some() {
                    candidates.extend(estimate_from_tallies(anchor, t, i, m));
                }
            }
        }
        if let Some(est) = combine(m, &candidates) {
            known.insert(m, est);
            last_completed = m;
        }
    }
    Ok(EstimateRun {
        estimates: known.into_values().collect(),
        stop: StopReason::MaxLen,
    })
}

/// Single-record chain: each `ĉ_m` comes from the previous estimate alone,
/// with no cutoff. Lengths the record never visited are skipped.
pub fn chain_estimate(
    rec: &WalkRecord,
    burn_in: usize,
    max_len: usize,
    start: CogrowthEstimate,
) -> Result<Vec<CogrowthEstimate>, EstimateError> {
    let (tallies, step) = tallies_for(std::slice::from_ref(rec), burn_in)?;
    let t = &tallies[0];
    let mut out = vec![start];
    let mut m = out[0].n;
    while m + step <= max_len {
        m += step;
        if let Some(est) = estimate_from_tallies(out.last().unwrap(), t, 0, m) {
            out.push(est);
        }
    }
    Ok(out)
}

/// `γ_n = ĉ_n^(1/n)` with `Δγ_n = γ_n e_n / n`; `n = 0` is skipped.
pub fn gamma_series(estimates: &[CogrowthEstimate]) -> Vec<GammaEstimate> {
    estimates
        .iter()
        .filter(|e| e.n > 0)
        .map(|e| {
            let gamma = (e.log_value / e.n as f64).exp();
            let gamma_error = gamma * e.rel_error / e.n as f64;
            GammaEstimate {
                n: e.n,
                gamma,
                gamma_error,
                lower: gamma - gamma_error,
                upper: gamma + gamma_error,
            }
        })
        .collect()
}
