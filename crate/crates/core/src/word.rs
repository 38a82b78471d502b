//! Freely reduced words in the free generators of a Schottky group.

use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("word is not freely reduced at position {0}")]
    NotReduced(usize),
    #[error("bad word literal {0:?}")]
    BadLiteral(String),
    #[error("generator g{0} out of range (have {1})")]
    GeneratorOutOfRange(usize, usize),
}

/// A generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Letter {
        Letter { generator, inverse }
    }

    pub fn inv(self) -> Letter {
        Letter { inverse: !self.inverse, ..self }
    }

    pub fn exponent(self) -> i8 {
        if self.inverse {
            -1
        } else {
            1
        }
    }
}

/// A freely reduced word; the empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FreeWord {
    letters: Vec<Letter>,
}

impl FreeWord {
    pub fn identity() -> FreeWord {
        FreeWord::default()
    }

    /// Rejects words containing `x x^-1`.
    pub fn new(letters: Vec<Letter>) -> Result<FreeWord, WordError> {
        if let Some(i) = letters.windows(2).position(|w| w[0] == w[1].inv()) {
            return Err(WordError::NotReduced(i));
        }
        Ok(FreeWord { letters })
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn reduce(letters: impl IntoIterator<Item = Letter>) -> FreeWord {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        FreeWord { letters: out }
    }

    pub fn generator(i: usize) -> FreeWord {
        FreeWord { letters: vec![Letter::new(i, false)] }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord { letters: self.letters.iter().rev().map(|l| l.inv()).collect() }
    }

    pub fn mul(&self, other: &FreeWord) -> FreeWord {
        FreeWord::reduce(self.letters.iter().chain(&other.letters).copied())
    }

    pub fn pow(&self, k: u32) -> FreeWord {
        (0..k).fold(FreeWord::identity(), |acc, _| acc.mul(self))
    }

    /// No cancellation between the last and first letter.
    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(a), Some(b)) => self.letters.len() == 1 || *a != b.inv(),
            _ => true,
        }
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.letters.iter().map(|l| l.generator).max()
    }

    /// Parses `"g1 g2^-1 g1^3"` (generators numbered from 1); `"e"` or `""`
    /// is the identity. The result is freely reduced.
    pub fn parse(s: &str) -> Result<FreeWord, WordError> {
        let bad = || WordError::BadLiteral(s.to_string());
        let mut letters = Vec::new();
        for tok in s.split(|c: char| c.is_whitespace() || c == '*' || c == '.').filter(|t| !t.is_empty()) {
            if tok == "e" || tok == "1" {
                continue;
            }
            let body = tok.strip_prefix('g').ok_or_else(bad)?;
            let (idx, exp) = match body.split_once('^') {
                Some((i, e)) => (i, e.trim_matches(|c| c == '(' || c == ')').parse::<i64>().map_err(|_| bad())?),
                None => (body, 1),
            };
            let idx: usize = idx.parse().map_err(|_| bad())?;
            if idx == 0 {
                return Err(bad());
            }
            let letter = Letter::new(idx - 1, exp < 0);
            letters.extend(std::iter::repeat_n(letter, exp.unsigned_abs() as usize));
        }
        Ok(FreeWord::reduce(letters))
    }

    pub fn check_generators(&self, count: usize) -> Result<(), WordError> {
        match self.max_generator() {
            Some(g) if g >= count => Err(WordError::GeneratorOutOfRange(g + 1, count)),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("e");
        }
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.letters.len() {
            let l = self.letters[i];
            let run = self.letters[i..].iter().take_while(|&&x| x == l).count();
            let exp = run as i64 * l.exponent() as i64;
            parts.push(if exp == 1 { format!("g{}", l.generator + 1) } else { format!("g{}^{}", l.generator + 1, exp) });
            i += run;
        }
        f.write_str(&parts.join(" "))
    }
}

impl Serialize for FreeWord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// All reduced words of length at most `max_len` over `generators`
/// generators, in shortlex order (identity first).
pub fn reduced_words(generators: usize, max_len: usize) -> Vec<FreeWord> {
    let mut out = vec![FreeWord::identity()];
    let mut frontier = vec![FreeWord::identity()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for g in 0..generators {
                for inverse in [false, true] {
                    let l = Letter::new(g, inverse);
                    if w.letters.last() == Some(&l.inv()) {
                        continue;
                    }
                    let mut letters = w.letters.clone();
                    letters.push(l);
                    next.push(FreeWord { letters });
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}
