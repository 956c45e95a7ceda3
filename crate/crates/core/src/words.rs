//! Minimally balanced words over `{x, y}` and the Catalan counts behind them.
//!
//! A word is minimally balanced when it is nonempty, has as many `x` as `y`,
//! and every proper nonempty prefix has strictly more `x` than `y`. These are
//! exactly the words `x·d·y` with `d` a Dyck word, so the family is
//! prefix-free.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::ncpoly::Word;

/// How the `n` words of an embedding are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WordMode {
    /// `n` words of the common length `2ℓ`, `ℓ = max(⌈log₂ 4n⌉, 7)`, of the
    /// form `xx·d·yy`.
    Paper,
    /// The `n` shortest minimally balanced words.
    Compact,
}

impl fmt::Display for WordMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WordMode::Paper => "paper",
            WordMode::Compact => "compact",
        })
    }
}

impl FromStr for WordMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(WordMode::Paper),
            "compact" => Ok(WordMode::Compact),
            _ => Err(Error::parse(0, format!("unknown word mode {s:?}"))),
        }
    }
}

/// An ordered list of distinct minimally balanced words.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WordSet {
    words: Vec<Word>,
    mode: Option<WordMode>,
}

impl WordSet {
    /// Validates an explicit list of words.
    pub fn new(words: Vec<Word>) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::Precondition("empty word set".into()));
        }
        for (i, w) in words.iter().enumerate() {
            if !is_minimally_balanced(w) {
                return Err(Error::Precondition(format!(
                    "{} is not minimally balanced",
                    w.to_xy_string()
                )));
            }
            if words[..i].contains(w) {
                return Err(Error::Precondition(format!("duplicate word {}", w.to_xy_string())));
            }
        }
        Ok(WordSet { words, mode: None })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn get(&self, i: usize) -> &Word {
        &self.words[i]
    }

    pub fn mode(&self) -> Option<WordMode> {
        self.mode
    }

    pub fn max_len(&self) -> usize {
        self.words.iter().map(Word::len).max().unwrap_or(0)
    }
}

pub fn is_minimally_balanced(w: &Word) -> bool {
    if w.is_empty() {
        return false;
    }
    let mut level = 0i64;
    for (i, &c) in w.letters().iter().enumerate() {
        level += if c == 0 { 1 } else { -1 };
        if i + 1 < w.len() && level <= 0 {
            return false;
        }
    }
    level == 0
}

/// True if every prefix has at least as many `x` as `y` and the whole word is balanced.
pub fn is_dyck(w: &Word) -> bool {
    let mut level = 0i64;
    for &c in w.letters() {
        level += if c == 0 { 1 } else { -1 };
        if level < 0 {
            return false;
        }
    }
    level == 0
}

/// Dyck words of length `len`, in increasing word order (`y` before `x`
/// at the first difference).
pub fn dyck_words(len: usize) -> impl Iterator<Item = Word> {
    DyckIter::new(len)
}

struct DyckIter {
    len: usize,
    stack: Vec<(Vec<u8>, i64)>,
}

impl DyckIter {
    fn new(len: usize) -> Self {
        let stack = if len.is_multiple_of(2) { vec![(Vec::new(), 0)] } else { Vec::new() };
        DyckIter { len, stack }
    }
}

impl Iterator for DyckIter {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        while let Some((prefix, level)) = self.stack.pop() {
            if prefix.len() == self.len {
                return Some(Word(prefix));
            }
            let remaining = (self.len - prefix.len()) as i64;
            // push x first so that y is explored first
            if level < remaining - 1 {
                let mut p = prefix.clone();
                p.push(0);
                self.stack.push((p, level + 1));
            }
            if level > 0 {
                let mut p = prefix;
                p.push(1);
                self.stack.push((p, level - 1));
            }
        }
        None
    }
}

/// Smallest `ℓ ≥ 7` with `2^ℓ ≥ 4n`.
pub fn paper_half_length(n: usize) -> usize {
    let target = 4 * n as u128;
    let mut ell = 0usize;
    while (1u128 << ell) < target {
        ell += 1;
    }
    ell.max(7)
}

pub fn enumerate_words(n: usize, mode: WordMode) -> Result<WordSet> {
    if n == 0 {
        return Err(Error::Precondition("need at least one word".into()));
    }
    let words: Vec<Word> = match mode {
        WordMode::Paper => {
            let ell = paper_half_length(n);
            let wrap = |d: Word| Word::xy("xx").concat(&d).concat(&Word::xy("yy"));
            let words: Vec<Word> = dyck_words(2 * ell - 4).take(n).map(wrap).collect();
            if words.len() < n {
                return Err(Error::Precondition(format!(
                    "only {} paper-form words of length {}",
                    words.len(),
                    2 * ell
                )));
            }
            words
        }
        WordMode::Compact => {
            let mut out = Vec::with_capacity(n);
            let mut inner = 0;
            while out.len() < n {
                for d in dyck_words(inner) {
                    out.push(Word::letter(0).concat(&d).concat(&Word::letter(1)));
                    if out.len() == n {
                        break;
                    }
                }
                inner += 2;
            }
            out
        }
    };
    Ok(WordSet {
        words,
        mode: Some(mode),
    })
}

/// The `k`-th Catalan number `binom(2k, k) / (k + 1)`.
pub fn catalan(k: usize) -> BigUint {
    let mut c = BigUint::one();
    for i in 0..k {
        // C_{i+1} = C_i · 2(2i+1) / (i+2)
        c = c * BigUint::from(2 * (2 * i + 1)) / BigUint::from(i + 2);
    }
    c
}
