use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const DEFAULT_MAX_GENERATORS: u32 = 16;

/// A single generator `x_j` or its adjoint `x_j*`.
///
/// Ordering is by generator index, then unstarred before starred.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    gen: u32,
    starred: bool,
}

impl Letter {
    pub fn new(gen: u32, starred: bool, max_gen: u32) -> Result<Self> {
        if gen == 0 || gen > max_gen {
            return Err(Error::GeneratorOutOfRange {
                index: gen,
                max: max_gen,
            });
        }
        Ok(Self { gen, starred })
    }

    /// `x_j`. Panics on `j == 0`.
    pub fn x(gen: u32) -> Self {
        assert!(gen >= 1, "generator indices start at 1");
        Self { gen, starred: false }
    }

    /// `x_j*`. Panics on `j == 0`.
    pub fn x_star(gen: u32) -> Self {
        assert!(gen >= 1, "generator indices start at 1");
        Self { gen, starred: true }
    }

    pub fn gen(self) -> u32 {
        self.gen
    }

    pub fn is_starred(self) -> bool {
        self.starred
    }

    pub fn star(self) -> Self {
        Self {
            gen: self.gen,
            starred: !self.starred,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}{}", self.gen, if self.starred { "*" } else { "" })
    }
}

/// A monomial in the free *-monoid. The empty word is the unit `1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn unit() -> Self {
        Self(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Self(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = Vec::with_capacity(self.0.len() + other.0.len());
        letters.extend_from_slice(&self.0);
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    /// `(l_1 … l_d)* = l_d* … l_1*`.
    pub fn adjoint(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.star()).collect())
    }

    pub fn max_gen(&self) -> u32 {
        self.0.iter().map(|l| l.gen).max().unwrap_or(0)
    }

    /// Parses whitespace-separated tokens `x<j>` / `x<j>*`, or the lone token `1`.
    pub fn parse_with_max(text: &str, max_gen: u32) -> Result<Self> {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.is_empty() {
            return Err(Error::MalformedToken(text.to_string()));
        }
        if tokens == ["1"] {
            return Ok(Word::unit());
        }
        tokens
            .into_iter()
            .map(|tok| parse_letter(tok, max_gen))
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

fn parse_letter(tok: &str, max_gen: u32) -> Result<Letter> {
    let malformed = || Error::MalformedToken(tok.to_string());
    let body = tok.strip_prefix('x').ok_or_else(malformed)?;
    let (digits, starred) = match body.strip_suffix('*') {
        Some(d) => (d, true),
        None => (body, false),
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(malformed());
    }
    let gen: u32 = digits.parse().map_err(|_| Error::GeneratorOutOfRange {
        index: u32::MAX,
        max: max_gen,
    })?;
    Letter::new(gen, starred, max_gen)
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Word::parse_with_max(s, DEFAULT_MAX_GENERATORS)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

// Graded lexicographic: shorter words first, then letter by letter.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
