//! Finite group presentations `⟨S | R⟩` in symmetric, cyclically closed form.
//!
//! Source format:
//!
//! ```text
//! gens: a b ; rels: abAB, [aB, Aba]
//! ```
//!
//! Lowercase letters are generators and uppercase letters their inverses. `.`
//! and whitespace inside relators are ignored, `[u, v]` expands to the
//! commutator `u v u⁻¹ v⁻¹`, and `#` starts a comment running to end of line.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::words::{cyclically_reduce, invert, render_letters, Letter};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PresentationError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown letter '{letter}' at byte {pos}")]
    UnknownLetter { letter: char, pos: usize },
    #[error("generator '{0}' listed twice")]
    DuplicateGenerator(char),
    #[error("relator {index} is empty after free and cyclic reduction")]
    EmptyRelator { index: usize },
    #[error(
        "no relators: this presents a free group, whose only trivial word is the empty word, \
         so the walk can never leave its starting state"
    )]
    NoRelators,
    #[error("unknown preset '{0}'")]
    UnknownPreset(String),
    #[error("preset parameter out of range: {0}")]
    ParameterOutOfRange(String),
}

/// The symmetric generating set `S = S⁻¹`, `|S| = 2p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorAlphabet {
    names: Vec<char>,
}

impl GeneratorAlphabet {
    /// Generators named by the given lowercase letters, sorted.
    pub fn new(names: &[char]) -> Result<Self, PresentationError> {
        let mut sorted = names.to_vec();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(PresentationError::DuplicateGenerator(w[0]));
            }
        }
        if let Some(&c) = sorted.iter().find(|c| !c.is_ascii_lowercase()) {
            return Err(PresentationError::Syntax {
                pos: 0,
                msg: format!("generator '{c}' is not a lowercase ASCII letter"),
            });
        }
        Ok(GeneratorAlphabet { names: sorted })
    }

    /// First `p` letters of the alphabet.
    pub fn standard(p: usize) -> Self {
        assert!((1..=26).contains(&p));
        GeneratorAlphabet {
            names: (b'a'..b'a' + p as u8).map(char::from).collect(),
        }
    }

    /// Number of generators `p`.
    pub fn rank(&self) -> usize {
        self.names.len()
    }

    /// `|S| = 2p`.
    pub fn size(&self) -> usize {
        2 * self.names.len()
    }

    pub fn names(&self) -> &[char] {
        &self.names
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..self.size() as u8).map(Letter::from_index)
    }

    pub fn letter(&self, c: char) -> Option<Letter> {
        let g = self.names.iter().position(|&n| n == c.to_ascii_lowercase())? as u8;
        Some(if c.is_ascii_uppercase() {
            Letter::negative(g)
        } else {
            Letter::positive(g)
        })
    }

    pub fn render(&self, letters: &[Letter]) -> String {
        render_letters(letters.iter().copied(), &self.names)
    }

    /// Parses a bare word such as `abAB` (no brackets).
    pub fn parse_word(&self, s: &str) -> Result<Vec<Letter>, PresentationError> {
        s.char_indices()
            .filter(|(_, c)| !c.is_whitespace() && *c != '.')
            .map(|(pos, c)| self.letter(c).ok_or(PresentationError::UnknownLetter { letter: c, pos }))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Relator {
    pub word: Vec<Letter>,
    /// Index of the user relator this word derives from.
    pub origin: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    alphabet: GeneratorAlphabet,
    user_relators: Vec<Relator>,
    closed_relators: Vec<Relator>,
    parity_even: bool,
}

impl Presentation {
    /// Builds a presentation from raw relator words, reducing each freely and cyclically.
    pub fn new(alphabet: GeneratorAlphabet, relators: Vec<Vec<Letter>>) -> Result<Self, PresentationError> {
        if relators.is_empty() {
            return Err(PresentationError::NoRelators);
        }
        let mut user_relators = Vec::with_capacity(relators.len());
        for (index, raw) in relators.into_iter().enumerate() {
            let word = cyclically_reduce(&raw);
            if word.is_empty() {
                return Err(PresentationError::EmptyRelator { index });
            }
            user_relators.push(Relator { word, origin: index });
        }
        let closed_relators = close(&user_relators);
        let parity_even = user_relators.iter().all(|r| r.word.len() % 2 == 0);
        Ok(Presentation {
            alphabet,
            user_relators,
            closed_relators,
            parity_even,
        })
    }

    pub fn alphabet(&self) -> &GeneratorAlphabet {
        &self.alphabet
    }

    pub fn user_relators(&self) -> &[Relator] {
        &self.user_relators
    }

    pub fn closed_relators(&self) -> &[Relator] {
        &self.closed_relators
    }

    pub fn max_relator_len(&self) -> usize {
        self.user_relators.iter().map(|r| r.word.len()).max().unwrap_or(0)
    }

    /// True iff every relator has even length, so no odd-length word is trivial.
    pub fn parity_even(&self) -> bool {
        self.parity_even
    }

    /// Step between lengths that can carry trivial words.
    pub fn length_step(&self) -> usize {
        if self.parity_even {
            2
        } else {
            1
        }
    }

    /// Canonical source text; `parse_presentation(p.render()) == p`.
    pub fn render(&self) -> String {
        let gens: Vec<String> = self.alphabet.names.iter().map(|c| c.to_string()).collect();
        let rels: Vec<String> = self.user_relators.iter().map(|r| self.alphabet.render(&r.word)).collect();
        format!("gens: {} ; rels: {}", gens.join(" "), rels.join(", "))
    }

    /// SHA-256 of the canonical rendering, hex encoded.
    pub fn digest(&self) -> String {
        sha256_hex(self.render().as_bytes())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl FromStr for Presentation {
    type Err = PresentationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_presentation(s)
    }
}

/// Closure under inversion and cyclic permutation, first occurrence wins.
fn close(user: &[Relator]) -> Vec<Relator> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for r in user {
        for base in [r.word.clone(), invert(&r.word)] {
            for shift in 0..base.len() {
                let mut rot = base.clone();
                rot.rotate_left(shift);
                if seen.insert(rot.clone()) {
                    out.push(Relator {
                        word: rot,
                        origin: r.origin,
                    });
                }
            }
        }
    }
    out
}

pub fn parse_presentation(text: &str) -> Result<Presentation, PresentationError> {
    Parser::new(text).presentation()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            src: text.as_bytes(),
            pos: 0,
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, PresentationError> {
        Err(PresentationError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while let Some(&c) = self.src.get(self.pos) {
            if c == b'#' {
                while self.pos < self.src.len() && self.src[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if c.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, token: &str) -> Result<(), PresentationError> {
        self.skip_ws();
        if self.src[self.pos..].starts_with(token.as_bytes()) {
            self.pos += token.len();
            Ok(())
        } else {
            self.err(format!("expected '{token}'"))
        }
    }

    fn presentation(mut self) -> Result<Presentation, PresentationError> {
        self.expect("gens")?;
        self.expect(":")?;
        let mut names = Vec::new();
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_lowercase() => {
                    names.push(c as char);
                    self.pos += 1;
                }
                Some(b',') => self.pos += 1,
                Some(b';') => {
                    self.pos += 1;
                    break;
                }
                Some(c) => return self.err(format!("unexpected '{}' in generator list", c as char)),
                None => return self.err("expected ';' after generator list"),
            }
        }
        if names.is_empty() {
            return self.err("at least one generator is required");
        }
        let alphabet = GeneratorAlphabet::new(&names)?;
        self.expect("rels")?;
        self.expect(":")?;

        let mut relators = Vec::new();
        if self.peek().is_some() {
            loop {
                let start = self.pos;
                let word = self.relator(&alphabet)?;
                if word.is_empty() {
                    self.pos = start;
                    return Err(PresentationError::EmptyRelator { index: relators.len() });
                }
                relators.push(word);
                match self.peek() {
                    Some(b',') => self.pos += 1,
                    None => break,
                    Some(c) => return self.err(format!("unexpected '{}'", c as char)),
                }
            }
        }
        Presentation::new(alphabet, relators)
    }

    /// A sequence of letters and commutators, stopping at ',' ']' or end of input.
    fn relator(&mut self, alphabet: &GeneratorAlphabet) -> Result<Vec<Letter>, PresentationError> {
        let mut out = Vec::new();
        while let Some(c) = self.peek() {
            match c {
                b',' | b']' => break,
                b'.' => self.pos += 1,
                b'[' => {
                    self.pos += 1;
                    let x = self.relator(alphabet)?;
                    if self.peek() != Some(b',') {
                        return self.err("expected ',' inside commutator");
                    }
                    self.pos += 1;
                    let y = self.relator(alphabet)?;
                    if self.peek() != Some(b']') {
                        return self.err("expected ']' closing commutator");
                    }
                    self.pos += 1;
                    out.extend_from_slice(&x);
                    out.extend_from_slice(&y);
                    out.extend(invert(&x));
                    out.extend(invert(&y));
                }
                c if c.is_ascii_alphabetic() => {
                    let letter = alphabet.letter(c as char).ok_or(PresentationError::UnknownLetter {
                        letter: c as char,
                        pos: self.pos,
                    })?;
                    out.push(letter);
                    self.pos += 1;
                }
                c => return self.err(format!("unexpected '{}' in relator", c as char)),
            }
        }
        Ok(out)
    }
}

/// Named presentations used throughout the experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// `⟨a,b | aba b⁻¹a⁻¹b⁻¹, aⁿ b^{-n-1}⟩`, the trivial group for every `n ≥ 1`.
    TrivialFamily(u32),
    /// `BS(1,n) = ⟨a,t | t a t⁻¹ a⁻ⁿ⟩`.
    BaumslagSolitar(u32),
    /// `Zᵏ` with all commutators of distinct generators, `k ≥ 2`.
    FreeAbelian(u32),
    /// Thompson's group F with its two-relator presentation.
    ThompsonF,
    /// Genus-two surface group `⟨a,b,c,d | [a,b][c,d]⟩`.
    Surface2,
    /// Three-strand braid group `⟨a,b | aba = bab⟩`.
    Braid3,
}

impl Preset {
    pub fn presentation(self) -> Result<Presentation, PresentationError> {
        let source = match self {
            Preset::TrivialFamily(n) => {
                if n < 1 {
                    return Err(PresentationError::ParameterOutOfRange("trivial-family needs n >= 1".into()));
                }
                format!(
                    "gens: a b ; rels: abaBAB, {}{}",
                    "a".repeat(n as usize),
                    "B".repeat(n as usize + 1)
                )
            }
            Preset::BaumslagSolitar(n) => {
                if n < 1 {
                    return Err(PresentationError::ParameterOutOfRange("bs:1:n needs n >= 1".into()));
                }
                format!("gens: a t ; rels: taT{}", "A".repeat(n as usize))
            }
            Preset::FreeAbelian(k) => {
                if !(2..=26).contains(&k) {
                    return Err(PresentationError::ParameterOutOfRange(
                        "zk needs 2 <= k <= 26 (k = 1 is free and has no relators)".into(),
                    ));
                }
                let alphabet = GeneratorAlphabet::standard(k as usize);
                let names = alphabet.names();
                let mut rels = Vec::new();
                for i in 0..names.len() {
                    for j in i + 1..names.len() {
                        rels.push(format!("[{},{}]", names[i], names[j]));
                    }
                }
                let gens: Vec<String> = names.iter().map(|c| c.to_string()).collect();
                format!("gens: {} ; rels: {}", gens.join(" "), rels.join(", "))
            }
            Preset::ThompsonF => "gens: a b ; rels: [aB, Aba], [aB, AAbaa]".to_string(),
            Preset::Surface2 => "gens: a b c d ; rels: [a,b][c,d]".to_string(),
            Preset::Braid3 => "gens: a b ; rels: abaBAB".to_string(),
        };
        parse_presentation(&source)
    }
}

impl FromStr for Preset {
    type Err = PresentationError;

    /// Accepts `trivial-family:N`, `bs:1:N`, `zk:K`, `thompson-f`, `surface2`, `braid3`
    /// (underscores and hyphens are interchangeable).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        let parts: Vec<&str> = norm.split(':').collect();
        let num = |t: &str| -> Result<u32, PresentationError> {
            t.parse()
                .map_err(|_| PresentationError::ParameterOutOfRange(format!("'{t}' is not a non-negative integer")))
        };
        match parts.as_slice() {
            ["trivial-family", n] => Ok(Preset::TrivialFamily(num(n)?)),
            ["bs", "1", n] => Ok(Preset::BaumslagSolitar(num(n)?)),
            ["zk", k] => Ok(Preset::FreeAbelian(num(k)?)),
            ["thompson-f"] | ["f"] => Ok(Preset::ThompsonF),
            ["surface2"] => Ok(Preset::Surface2),
            ["braid3"] => Ok(Preset::Braid3),
            _ => Err(PresentationError::UnknownPreset(s.to_string())),
        }
    }
}

/// Named preset, as in `builtin_presentation("bs", Some(7))`.
pub fn builtin_presentation(name: &str, n: Option<u32>) -> Result<Presentation, PresentationError> {
    let key = match n {
        Some(n) if name.replace('_', "-") == "bs" => format!("bs:1:{n}"),
        Some(n) => format!("{name}:{n}"),
        None => name.to_string(),
    };
    key.parse::<Preset>()?.presentation()
}
