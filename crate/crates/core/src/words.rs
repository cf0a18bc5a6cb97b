//! Free-group words over a named alphabet.
//!
//! A [`Word`] is a flat sequence of [`Letter`]s, each a generator index with a
//! sign. Words do not carry their alphabet; callers that mix words from
//! different sources validate them with [`Alphabet::check_word`].

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("generator name {0:?} is not allowed (empty, contains whitespace or '^', or is \"1\")")]
    InvalidName(String),
    #[error("duplicate generator name {0:?}")]
    DuplicateName(String),
    #[error("letter index {index} is outside an alphabet of rank {rank}")]
    AlphabetMismatch { index: usize, rank: usize },
}

/// Parse failure with a 1-based column into the input text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("column {column}: {message}")]
pub struct WordParseError {
    pub column: usize,
    pub message: String,
}

/// An ordered list of distinct generator names. Position determines the
/// generator index used by [`Letter`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Self, WordError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out: Vec<String> = Vec::new();
        for name in names {
            let name = name.into();
            if name.is_empty() || name == "1" || name.chars().any(|c| c.is_whitespace() || c == '^')
            {
                return Err(WordError::InvalidName(name));
            }
            if out.contains(&name) {
                return Err(WordError::DuplicateName(name));
            }
            out.push(name);
        }
        Ok(Alphabet { names: out })
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn letter(&self, name: &str) -> Option<Letter> {
        self.index_of(name).map(Letter::pos)
    }

    pub fn check_word(&self, w: &Word) -> Result<(), WordError> {
        match w.letters().iter().find(|l| l.generator() >= self.rank()) {
            Some(l) => Err(WordError::AlphabetMismatch {
                index: l.generator(),
                rank: self.rank(),
            }),
            None => Ok(()),
        }
    }

    /// Parses the word grammar: whitespace-separated `NAME` or `NAME^INT`
    /// tokens, with a lone `1` for the empty word. The result is freely
    /// reduced.
    pub fn parse_word(&self, text: &str) -> Result<Word, WordParseError> {
        let mut letters = Vec::new();
        let tokens = tokenize(text);
        if tokens.len() == 1 && tokens[0].1 == "1" {
            return Ok(Word::empty());
        }
        for (column, token) in tokens {
            let (name, exponent) = match token.split_once('^') {
                Some((name, exp)) => {
                    let exp: i64 = exp.parse().map_err(|_| WordParseError {
                        column: column + name.len() + 1,
                        message: format!("malformed exponent {exp:?}"),
                    })?;
                    (name, exp)
                }
                None => (token, 1),
            };
            let gen = self.index_of(name).ok_or_else(|| WordParseError {
                column,
                message: if name.is_empty() {
                    "missing generator name".to_string()
                } else {
                    format!("unknown generator {name:?}")
                },
            })?;
            let letter = Letter::new(gen, exponent < 0);
            for _ in 0..exponent.unsigned_abs() {
                letters.push(letter);
            }
        }
        Ok(Word::from_letters(letters))
    }

    /// Canonical text form: maximal runs of one letter become `NAME^k`,
    /// the empty word prints as `1`.
    pub fn print_word(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        let letters = w.letters();
        let mut i = 0;
        while i < letters.len() {
            let l = letters[i];
            let mut j = i;
            while j < letters.len() && letters[j] == l {
                j += 1;
            }
            let run = (j - i) as i64;
            let exp = if l.is_inverse() { -run } else { run };
            let name = self.name(l.generator());
            if exp == 1 {
                parts.push(name.to_string());
            } else {
                parts.push(format!("{name}^{exp}"));
            }
            i = j;
        }
        parts.join(" ")
    }
}

fn tokenize(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &text[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &text[s..]));
    }
    out
}

/// A generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    // generator index * 2 + (1 if inverse); this ordering puts x before x^-1
    // and both before the next generator.
    code: u32,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter {
            code: (generator as u32) << 1 | inverse as u32,
        }
    }

    pub fn pos(generator: usize) -> Self {
        Letter::new(generator, false)
    }

    pub fn neg(generator: usize) -> Self {
        Letter::new(generator, true)
    }

    /// Letter with the given code; codes run `0..2*rank` in shortlex letter order.
    pub fn from_code(code: usize) -> Self {
        Letter { code: code as u32 }
    }

    pub fn code(self) -> usize {
        self.code as usize
    }

    pub fn generator(self) -> usize {
        (self.code >> 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.code & 1 == 1
    }

    pub fn sign(self) -> i32 {
        if self.is_inverse() {
            -1
        } else {
            1
        }
    }

    pub fn inverse(self) -> Self {
        Letter {
            code: self.code ^ 1,
        }
    }
}

/// An element of a free group, stored as a flat letter sequence.
///
/// Constructors that take arbitrary letter sequences free-reduce them, so
/// every `Word` observed through the public API is reduced.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut stack: Vec<Letter> = Vec::new();
        for l in letters {
            push_reduced(&mut stack, l);
        }
        Word { letters: stack }
    }

    pub fn letter(l: Letter) -> Self {
        Word { letters: vec![l] }
    }

    /// `generator^exponent`.
    pub fn power(generator: usize, exponent: i64) -> Self {
        let l = Letter::new(generator, exponent < 0);
        Word {
            letters: vec![l; exponent.unsigned_abs() as usize],
        }
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

    pub fn inverse(&self) -> Word {
        invert(self)
    }

    pub fn concat(&self, other: &Word) -> Word {
        concat(self, other)
    }

    /// Highest generator index used, plus one.
    pub fn min_rank(&self) -> usize {
        self.letters
            .iter()
            .map(|l| l.generator() + 1)
            .max()
            .unwrap_or(0)
    }

    /// Cyclic reduction: strips matching inverse letters from the two ends.
    pub(crate) fn cyclically_reduced(&self) -> Word {
        let l = &self.letters;
        let (mut i, mut j) = (0, l.len());
        while j - i >= 2 && l[i] == l[j - 1].inverse() {
            i += 1;
            j -= 1;
        }
        Word {
            letters: l[i..j].to_vec(),
        }
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<T: IntoIterator<Item = Letter>>(iter: T) -> Self {
        Word::from_letters(iter)
    }
}

fn push_reduced(stack: &mut Vec<Letter>, l: Letter) {
    if stack.last() == Some(&l.inverse()) {
        stack.pop();
    } else {
        stack.push(l);
    }
}

/// Reduces an arbitrary letter sequence with a single stack scan.
pub fn free_reduce(letters: &[Letter]) -> Word {
    Word::from_letters(letters.iter().copied())
}

pub fn invert(w: &Word) -> Word {
    Word {
        letters: w.letters.iter().rev().map(|l| l.inverse()).collect(),
    }
}

pub fn concat(u: &Word, v: &Word) -> Word {
    let mut stack = u.letters.clone();
    for &l in &v.letters {
        push_reduced(&mut stack, l);
    }
    Word { letters: stack }
}

/// `by · w · by⁻¹`, reduced.
pub fn conjugate(w: &Word, by: &Word) -> Word {
    concat(&concat(by, w), &invert(by))
}

/// Product of any number of words, reduced.
pub fn product<'a, I: IntoIterator<Item = &'a Word>>(words: I) -> Word {
    let mut stack = Vec::new();
    for w in words {
        for &l in &w.letters {
            push_reduced(&mut stack, l);
        }
    }
    Word { letters: stack }
}

pub fn are_freely_equal(u: &Word, v: &Word) -> bool {
    // both sides are reduced by construction
    u == v
}

/// A word paired with its alphabet for display.
pub struct Display<'a> {
    alphabet: &'a Alphabet,
    word: &'a Word,
}

impl Word {
    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> Display<'a> {
        Display {
            alphabet,
            word: self,
        }
    }
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.alphabet.print_word(self.word))
    }
}
