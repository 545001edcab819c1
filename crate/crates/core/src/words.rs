//! Free-group words and the two moves of the trivial-word walk.
//!
//! A [`Letter`] encodes generator `g` as `2g` and its inverse as `2g + 1`, so
//! inversion is a single bit flip. Words are kept freely reduced at all times.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A signed generator letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter(u8);

impl Letter {
    pub const fn positive(generator: u8) -> Self {
        Letter(generator << 1)
    }

    pub const fn negative(generator: u8) -> Self {
        Letter((generator << 1) | 1)
    }

    /// Letter from its dense index in `0..2p`.
    pub const fn from_index(index: u8) -> Self {
        Letter(index)
    }

    #[inline]
    pub const fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub const fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    #[inline]
    pub const fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub const fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }

    /// Exponent sign: `+1` for a generator, `-1` for an inverse.
    #[inline]
    pub const fn sign(self) -> i64 {
        if self.is_inverse() {
            -1
        } else {
            1
        }
    }
}

/// Inverse of a letter sequence.
pub fn invert(letters: &[Letter]) -> Vec<Letter> {
    letters.iter().rev().map(|l| l.inverse()).collect()
}

/// True when no adjacent pair cancels.
pub fn is_freely_reduced(letters: &[Letter]) -> bool {
    letters.windows(2).all(|w| w[0] != w[1].inverse())
}

/// A freely reduced word.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word {
    letters: VecDeque<Letter>,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> Option<Letter> {
        self.letters.get(i).copied()
    }

    pub fn letters(&self) -> impl ExactSizeIterator<Item = Letter> + '_ {
        self.letters.iter().copied()
    }

    pub fn to_vec(&self) -> Vec<Letter> {
        self.letters.iter().copied().collect()
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Renders with lowercase generator names and uppercase inverses.
    pub fn render(&self, names: &[char]) -> String {
        render_letters(self.letters.iter().copied(), names)
    }

    /// `x · w · x⁻¹`, freely reduced.
    pub fn conjugate(&self, x: Letter) -> Word {
        let mut out = self.clone();
        out.conjugate_in_place(x);
        out
    }

    /// Length `conjugate(x)` would have, without building it.
    #[inline]
    pub fn conjugated_len(&self, x: Letter) -> usize {
        let n = self.letters.len();
        if n == 0 {
            return 0;
        }
        let left = self.letters[0] == x.inverse();
        let right = self.letters[n - 1] == x;
        match (left, right) {
            (true, true) if n >= 2 => n - 2,
            (true, _) | (_, true) => n,
            (false, false) => n + 2,
        }
    }

    pub(crate) fn conjugate_in_place(&mut self, x: Letter) {
        let n = self.letters.len();
        if n == 0 {
            return;
        }
        let left = self.letters[0] == x.inverse();
        let right = self.letters[n - 1] == x;
        if left && right && n >= 2 {
            self.letters.pop_front();
            self.letters.pop_back();
        } else if left {
            // x · x⁻¹ v · x⁻¹ = v · x⁻¹
            self.letters.pop_front();
            self.letters.push_back(x.inverse());
        } else if right {
            // x · u x · x⁻¹ = x · u
            self.letters.pop_back();
            self.letters.push_front(x);
        } else {
            self.letters.push_front(x);
            self.letters.push_back(x.inverse());
        }
    }

    /// Left insertion of `relator` at `pos`. `None` is the REJECT outcome.
    ///
    /// Panics if `pos > self.len()`.
    pub fn left_insert(&self, relator: &[Letter], pos: usize) -> Option<Word> {
        let plan = self.plan_insert(relator, pos)?;
        let mut out = self.clone();
        let mut scratch = Vec::new();
        out.apply_insert(relator, pos, plan, &mut scratch);
        Some(out)
    }

    /// Works out a left insertion without touching the word.
    #[inline]
    pub fn plan_insert(&self, relator: &[Letter], pos: usize) -> Option<InsertPlan> {
        let n = self.letters.len();
        assert!(pos <= n, "insertion position {pos} out of range for length {n}");
        let r = relator.len();
        debug_assert!(r > 0);
        let mut cancelled = 0;
        while cancelled < r && cancelled < pos && self.letters[pos - 1 - cancelled] == relator[cancelled].inverse() {
            cancelled += 1;
        }
        // The letter that will end up immediately left of the old suffix.
        let left_of_suffix = if cancelled < r {
            Some(relator[r - 1])
        } else if pos > cancelled {
            Some(self.letters[pos - cancelled - 1])
        } else {
            None
        };
        if let (Some(l), Some(&right)) = (left_of_suffix, self.letters.get(pos)) {
            if l == right.inverse() {
                return None;
            }
        }
        Some(InsertPlan {
            cancelled,
            new_len: n + r - 2 * cancelled,
        })
    }

    pub(crate) fn apply_insert(&mut self, relator: &[Letter], pos: usize, plan: InsertPlan, scratch: &mut Vec<Letter>) {
        scratch.clear();
        scratch.extend(self.letters.drain(pos..));
        self.letters.truncate(pos - plan.cancelled);
        self.letters.extend(relator[plan.cancelled..].iter().copied());
        self.letters.extend(scratch.drain(..));
    }
}

/// Outcome of [`Word::plan_insert`] for a move that is not rejected.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InsertPlan {
    /// Letters cancelled across the left boundary of the relator.
    pub cancelled: usize,
    pub new_len: usize,
}

/// Stack-based free reduction; confluent, so the order of cancellation is irrelevant.
pub fn free_reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Word {
    let mut out: VecDeque<Letter> = VecDeque::new();
    for l in letters {
        if out.back() == Some(&l.inverse()) {
            out.pop_back();
        } else {
            out.push_back(l);
        }
    }
    Word { letters: out }
}

/// Removes matching inverse pairs at the two ends after free reduction.
pub fn cyclically_reduce(letters: &[Letter]) -> Vec<Letter> {
    let w = free_reduce(letters.iter().copied()).to_vec();
    let mut lo = 0;
    let mut hi = w.len();
    while hi - lo >= 2 && w[lo] == w[hi - 1].inverse() {
        lo += 1;
        hi -= 1;
    }
    w[lo..hi].to_vec()
}

pub fn render_letters<I: IntoIterator<Item = Letter>>(letters: I, names: &[char]) -> String {
    letters
        .into_iter()
        .map(|l| {
            let c = names[l.generator()];
            if l.is_inverse() {
                c.to_ascii_uppercase()
            } else {
                c
            }
        })
        .collect()
}

impl FromIterator<Letter> for Word {
    /// Collects and freely reduces.
    fn from_iter<T: IntoIterator<Item = Letter>>(iter: T) -> Self {
        free_reduce(iter)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Fallback rendering for debugging: generators a, b, c, ...
        let names: Vec<char> = (b'a'..=b'z').map(char::from).collect();
        f.write_str(&self.render(&names))
    }
}
