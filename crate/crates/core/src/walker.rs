//! The Metropolis walk on trivial words.
//!
//! Each step proposes, with equal probability, a conjugation by a uniform letter
//! of `S` or a left insertion of a uniform relator from the closed relator set at
//! a uniform position `0..=|w|`. Candidates are accepted with
//!
//! ```text
//! conjugation: min{1, ((|w'|+1)/(|w|+1))^(1+α) β^(|w'|-|w|)}
//! insertion:   min{1, ((|w'|+1)/(|w|+1))^α     β^(|w'|-|w|)}
//! ```
//!
//! which makes `π(u) ∝ (|u|+1)^(1+α) β^|u|` stationary. All comparisons are
//! done in log space.

use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::presentation::Presentation;
use crate::words::{Letter, Word};

pub const DEFAULT_MAX_WORD_LEN: usize = 1_000_000;
pub const DEFAULT_SEGMENTS: usize = 10;
/// Share of accepted insertions below which a relator is reported as starved.
pub const DEFAULT_BALANCE_FLOOR: f64 = 0.001;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WalkError {
    #[error("invalid walk parameters: {0}")]
    InvalidParams(String),
    #[error(
        "word length {length} exceeded the cap of {max_word_len} letters at step {step}; \
         beta is probably above the critical value"
    )]
    Diverged { step: u64, length: usize, max_word_len: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkParams {
    pub alpha: f64,
    pub beta: f64,
    /// Total proposals. With `until_insertions` this is only an upper bound.
    pub steps: u64,
    pub segments: usize,
    pub seed: u64,
    /// Record the current length every `stride` steps.
    pub stride: u64,
    /// RNG stream, so that walks of one grid sharing a seed stay independent.
    pub stream: u64,
    pub max_word_len: usize,
    /// Stop once this many insertions have been accepted.
    pub until_insertions: Option<u64>,
    /// Emit the mean length over every block of this many accepted insertions.
    pub trace_insertions: Option<u64>,
}

impl WalkParams {
    pub fn new(alpha: f64, beta: f64, steps: u64, seed: u64) -> Self {
        WalkParams {
            alpha,
            beta,
            steps,
            segments: DEFAULT_SEGMENTS,
            seed,
            stride: 1,
            stream: 0,
            max_word_len: DEFAULT_MAX_WORD_LEN,
            until_insertions: None,
            trace_insertions: None,
        }
    }

    pub fn validate(&self) -> Result<(), WalkError> {
        let bad = |m: String| Err(WalkError::InvalidParams(m));
        if !self.alpha.is_finite() {
            return bad(format!("alpha must be finite, got {}", self.alpha));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return bad(format!("beta must lie in (0, 1), got {}", self.beta));
        }
        if self.segments < 2 {
            return bad(format!("need at least 2 segments, got {}", self.segments));
        }
        if self.stride == 0 || !self.steps.is_multiple_of(self.stride) {
            return bad(format!("stride {} must divide steps {}", self.stride, self.steps));
        }
        if self.steps / self.stride < self.segments as u64 {
            return bad(format!(
                "{} samples cannot fill {} segments",
                self.steps / self.stride,
                self.segments
            ));
        }
        if self.max_word_len == 0 {
            return bad("max word length must be positive".into());
        }
        if self.until_insertions == Some(0) || self.trace_insertions == Some(0) {
            return bad("insertion counts must be positive".into());
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MoveKind {
    Conjugation,
    Insertion,
}

/// What happened in one step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MoveOutcome {
    pub kind: MoveKind,
    /// Index into the closed relator set for insertions.
    pub relator: Option<usize>,
    pub from_len: usize,
    /// Candidate length; equals `from_len` when the proposal was rejected outright.
    pub to_len: usize,
    /// False when a left insertion left an unreduced seam (REJECT).
    pub reversible: bool,
    pub accepted: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProposalStats {
    pub conjugations_proposed: u64,
    pub conjugations_accepted: u64,
    pub insertions_proposed: u64,
    pub insertions_accepted: u64,
    /// Insertions rejected at the proposal stage.
    pub insertions_unreduced: u64,
}

impl ProposalStats {
    fn record(&mut self, out: &MoveOutcome) {
        match out.kind {
            MoveKind::Conjugation => {
                self.conjugations_proposed += 1;
                self.conjugations_accepted += out.accepted as u64;
            }
            MoveKind::Insertion => {
                self.insertions_proposed += 1;
                self.insertions_accepted += out.accepted as u64;
                self.insertions_unreduced += (!out.reversible) as u64;
            }
        }
    }
}

/// Log of the Metropolis acceptance ratio (before clamping at zero).
pub fn acceptance_log_ratio(kind: MoveKind, from_len: usize, to_len: usize, alpha: f64, beta: f64) -> f64 {
    let exponent = match kind {
        MoveKind::Conjugation => 1.0 + alpha,
        MoveKind::Insertion => alpha,
    };
    exponent * ((to_len as f64 + 1.0).ln() - (from_len as f64 + 1.0).ln()) + (to_len as f64 - from_len as f64) * beta.ln()
}

/// Unnormalised log of the stationary weight of a word of length `len`.
pub fn stationary_log_weight(len: usize, alpha: f64, beta: f64) -> f64 {
    (1.0 + alpha) * (len as f64 + 1.0).ln() + len as f64 * beta.ln()
}

/// Generator for walk `stream` under `seed`.
pub fn walk_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Acceptance probabilities indexed by current length and length change.
struct AcceptTable {
    kind: MoveKind,
    alpha: f64,
    beta: f64,
    /// Largest |Δ| a move of this kind can produce.
    reach: usize,
    probs: Vec<f64>,
}

impl AcceptTable {
    fn new(kind: MoveKind, alpha: f64, beta: f64, reach: usize) -> Self {
        let mut t = AcceptTable { kind, alpha, beta, reach, probs: Vec::new() };
        t.grow(64);
        t
    }

    fn width(&self) -> usize {
        2 * self.reach + 1
    }

    fn grow(&mut self, rows: usize) {
        let w = self.width();
        for from in self.probs.len() / w..rows {
            for j in 0..w {
                let to = (from + j).saturating_sub(self.reach);
                let lr = acceptance_log_ratio(self.kind, from, to, self.alpha, self.beta);
                self.probs.push(lr.min(0.0).exp());
            }
        }
    }

    #[inline]
    fn get(&mut self, from: usize, to: usize) -> f64 {
        let w = self.width();
        if (from + 1) * w > self.probs.len() {
            self.grow(2 * from + 2);
        }
        self.probs[from * w + to + self.reach - from]
    }
}

/// A single walk's mutable state.
pub struct Chain<'p> {
    presentation: &'p Presentation,
    word: Word,
    conjugation: AcceptTable,
    insertion: AcceptTable,
    scratch: Vec<Letter>,
}

impl<'p> Chain<'p> {
    pub fn new(presentation: &'p Presentation, alpha: f64, beta: f64) -> Self {
        Self::starting_at(presentation, alpha, beta, Word::empty())
    }

    pub fn starting_at(presentation: &'p Presentation, alpha: f64, beta: f64, word: Word) -> Self {
        Chain {
            presentation,
            word,
            conjugation: AcceptTable::new(MoveKind::Conjugation, alpha, beta, 2),
            insertion: AcceptTable::new(MoveKind::Insertion, alpha, beta, presentation.max_relator_len()),
            scratch: Vec::new(),
        }
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn into_word(self) -> Word {
        self.word
    }

    #[inline]
    fn accept<R: Rng + ?Sized>(prob: f64, rng: &mut R) -> bool {
        prob >= 1.0 || rng.random::<f64>() < prob
    }

    /// One proposal and its accept/reject decision.
    #[inline]
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> MoveOutcome {
        let from_len = self.word.len();
        if rng.random::<bool>() {
            let x = Letter::from_index(rng.random_range(0..self.presentation.alphabet().size()) as u8);
            let to_len = self.word.conjugated_len(x);
            let accepted = Self::accept(self.conjugation.get(from_len, to_len), rng);
            if accepted {
                self.word.conjugate_in_place(x);
            }
            MoveOutcome {
                kind: MoveKind::Conjugation,
                relator: None,
                from_len,
                to_len,
                reversible: true,
                accepted,
            }
        } else {
            let relators = self.presentation.closed_relators();
            let index = rng.random_range(0..relators.len());
            let pos = rng.random_range(0..=from_len);
            let relator = &relators[index].word;
            match self.word.plan_insert(relator, pos) {
                None => MoveOutcome {
                    kind: MoveKind::Insertion,
                    relator: Some(index),
                    from_len,
                    to_len: from_len,
                    reversible: false,
                    accepted: false,
                },
                Some(plan) => {
                    let accepted = Self::accept(self.insertion.get(from_len, plan.new_len), rng);
                    if accepted {
                        self.word.apply_insert(relator, pos, plan, &mut self.scratch);
                    }
                    MoveOutcome {
                        kind: MoveKind::Insertion,
                        relator: Some(index),
                        from_len,
                        to_len: plan.new_len,
                        reversible: true,
                        accepted,
                    }
                }
            }
        }
    }
}

/// Single step from `state`; returns the next state and what happened.
pub fn propose_and_step<R: Rng + ?Sized>(
    state: &Word,
    presentation: &Presentation,
    params: &WalkParams,
    rng: &mut R,
) -> (Word, MoveOutcome) {
    let mut chain = Chain::starting_at(presentation, params.alpha, params.beta, state.clone());
    let out = chain.step(rng);
    (chain.into_word(), out)
}

/// Everything a walk leaves behind.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkRecord {
    pub params: WalkParams,
    /// Canonical rendering of the presentation walked on.
    pub presentation: String,
    pub digest: String,
    pub parity_even: bool,
    /// `x_{i,n}`: visits to length `n` in segment `i`, zero-padded to a common length.
    pub segment_histograms: Vec<Vec<u64>>,
    /// Accepted insertions per user relator.
    pub relator_acceptance: Vec<u64>,
    pub stats: ProposalStats,
    pub steps_taken: u64,
    pub final_word: Word,
    /// Mean word length per block of `trace_insertions` accepted insertions.
    pub trace: Vec<f64>,
    pub runtime_secs: f64,
}

impl WalkRecord {
    pub fn segments(&self) -> usize {
        self.segment_histograms.len()
    }

    /// Number of histogram rows (`0..=max visited length`).
    pub fn len_bins(&self) -> usize {
        self.segment_histograms.first().map_or(0, Vec::len)
    }

    /// `W_n = Σ_i x_{i,n}`.
    pub fn histogram(&self) -> Vec<u64> {
        let mut total = vec![0u64; self.len_bins()];
        for seg in &self.segment_histograms {
            for (t, x) in total.iter_mut().zip(seg) {
                *t += x;
            }
        }
        total
    }

    pub fn samples(&self) -> u64 {
        self.segment_histograms.iter().flatten().sum()
    }

    pub fn mean_length(&self) -> f64 {
        let hist = self.histogram();
        let total: u64 = hist.iter().sum();
        let weighted: f64 = hist.iter().enumerate().map(|(n, &w)| n as f64 * w as f64).sum();
        weighted / total as f64
    }
}

/// Runs a walk from the empty word. Deterministic in `(presentation, params)`.
pub fn run_walk(presentation: &Presentation, params: &WalkParams) -> Result<WalkRecord, WalkError> {
    params.validate()?;
    let started = Instant::now();
    let mut rng = walk_rng(params.seed, params.stream);
    let mut chain = Chain::new(presentation, params.alpha, params.beta);

    let segments = params.segments as u128;
    let samples = (params.steps / params.stride) as u128;
    // Sample s lands in segment floor(s·M/S); segment i starts at ceil(i·S/M).
    let segment_start = |i: u128| -> u64 { (i * samples).div_ceil(segments) as u64 };
    let mut segment = 0usize;
    let mut next_segment_start = segment_start(1);
    let mut hist: Vec<Vec<u64>> = vec![Vec::new(); params.segments];
    let mut sample = 0u64;
    let mut until_sample = params.stride;

    let closed = presentation.closed_relators();
    let mut relator_acceptance = vec![0u64; presentation.user_relators().len()];
    let mut stats = ProposalStats::default();
    let mut trace = Vec::new();
    let (mut trace_sum, mut trace_count) = (0.0f64, 0u64);

    let mut step = 0u64;
    while step < params.steps {
        step += 1;
        let out = chain.step(&mut rng);
        stats.record(&out);
        let len = chain.word().len();
        if out.accepted {
            if len > params.max_word_len {
                return Err(WalkError::Diverged {
                    step,
                    length: len,
                    max_word_len: params.max_word_len,
                });
            }
            if let Some(r) = out.relator {
                relator_acceptance[closed[r].origin] += 1;
            }
        }

        until_sample -= 1;
        if until_sample == 0 {
            until_sample = params.stride;
            while sample >= next_segment_start {
                segment += 1;
                next_segment_start = segment_start(segment as u128 + 1);
            }
            let h = &mut hist[segment];
            if len >= h.len() {
                h.resize(len + 1, 0);
            }
            h[len] += 1;
            sample += 1;
        }

        if let Some(block) = params.trace_insertions {
            trace_sum += len as f64;
            trace_count += 1;
            if out.accepted && out.kind == MoveKind::Insertion && stats.insertions_accepted % block == 0 {
                trace.push(trace_sum / trace_count as f64);
                trace_sum = 0.0;
                trace_count = 0;
            }
        }
        if out.accepted
            && out.kind == MoveKind::Insertion
            && params.until_insertions.is_some_and(|target| stats.insertions_accepted >= target)
        {
            break;
        }
    }

    let bins = hist.iter().map(Vec::len).max().unwrap_or(0);
    for h in &mut hist {
        h.resize(bins, 0);
    }
    Ok(WalkRecord {
        params: params.clone(),
        presentation: presentation.render(),
        digest: presentation.digest(),
        parity_even: presentation.parity_even(),
        segment_histograms: hist,
        relator_acceptance,
        stats,
        steps_taken: step,
        final_word: chain.into_word(),
        trace,
        runtime_secs: started.elapsed().as_secs_f64(),
    })
}

/// Runs independent walks in parallel; output order matches `grid`.
pub fn run_grid(presentation: &Presentation, grid: &[WalkParams]) -> Vec<Result<WalkRecord, WalkError>> {
    grid.par_iter().map(|params| run_walk(presentation, params)).collect()
}

/// Cartesian product of `alphas × betas`, one RNG stream per walk.
pub fn parameter_grid(alphas: &[f64], betas: &[f64], template: &WalkParams) -> Vec<WalkParams> {
    let mut out = Vec::with_capacity(alphas.len() * betas.len());
    for &alpha in alphas {
        for &beta in betas {
            let stream = template.stream + out.len() as u64;
            out.push(WalkParams {
                alpha,
                beta,
                stream,
                ..template.clone()
            });
        }
    }
    out
}

/// Per-relator shares of accepted insertions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelatorBalance {
    pub counts: Vec<u64>,
    pub shares: Vec<f64>,
    pub floor: f64,
    /// User relators whose share is below `floor`.
    pub starved: Vec<usize>,
}

impl RelatorBalance {
    /// The walk has effectively run on a different presentation.
    pub fn wrong_group_warning(&self) -> bool {
        !self.starved.is_empty()
    }
}

impl fmt::Display for RelatorBalance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let total: u64 = self.counts.iter().sum();
        writeln!(f, "accepted insertions: {total}")?;
        for (i, (c, s)) in self.counts.iter().zip(&self.shares).enumerate() {
            writeln!(f, "  relator {i}: {c} ({:.4}%)", 100.0 * s)?;
        }
        if self.wrong_group_warning() {
            let list: Vec<String> = self.starved.iter().map(|i| i.to_string()).collect();
            writeln!(
                f,
                "WRONG-GROUP WARNING: relator(s) {} below {:.3}% of accepted insertions; \
                 the walk is sampling a different presentation",
                list.join(", "),
                100.0 * self.floor
            )?;
        }
        Ok(())
    }
}

pub fn diagnose_relator_balance(record: &WalkRecord, floor: f64) -> RelatorBalance {
    let counts = record.relator_acceptance.clone();
    let total: u64 = counts.iter().sum();
    let shares: Vec<f64> = counts
        .iter()
        .map(|&c| if total == 0 { 0.0 } else { c as f64 / total as f64 })
        .collect();
    let starved = shares
        .iter()
        .enumerate()
        .filter(|(_, &s)| s < floor)
        .map(|(i, _)| i)
        .collect();
    RelatorBalance {
        counts,
        shares,
        floor,
        starved,
    }
}
