//! Finite presentations, generating sets, and the product constructions:
//! direct products with factor projections, diagonal subgroups, and the
//! fiber-product subgroup `(q×q)⁻¹(Δ)` of a free group over a quotient.

use std::ops::Range;

use thiserror::Error;

use crate::words::{Alphabet, Letter, Word, WordError, WordParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Parse(#[from] WordParseError),
    #[error("relator {0} is freely trivial")]
    TrivialRelator(usize),
    #[error("a direct product needs at least one factor")]
    NoFactors,
    #[error("factor index {index} out of range for {count} factors")]
    FactorIndex { index: usize, count: usize },
    #[error("expected a relator-free presentation")]
    NotFree,
    #[error("generator names differ: {0:?} vs {1:?}")]
    GeneratorMismatch(Vec<String>, Vec<String>),
    #[error("expected two identical factors")]
    FactorMismatch,
}

/// Line-oriented file parse error, 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// `⟨A | R⟩`. Relators are freely reduced and non-empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Presentation {
    alphabet: Alphabet,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(alphabet: Alphabet, relators: Vec<Word>) -> Result<Self, PresentationError> {
        for (i, r) in relators.iter().enumerate() {
            alphabet.check_word(r)?;
            if r.is_empty() {
                return Err(PresentationError::TrivialRelator(i));
            }
        }
        Ok(Presentation { alphabet, relators })
    }

    /// Free group on the given names.
    pub fn free<I, S>(names: I) -> Result<Self, PresentationError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Ok(Presentation {
            alphabet: Alphabet::new(names)?,
            relators: Vec::new(),
        })
    }

    /// Builds a presentation from generator names and relator strings in the
    /// word grammar.
    pub fn from_strs(names: &[&str], relators: &[&str]) -> Result<Self, PresentationError> {
        let alphabet = Alphabet::new(names.iter().copied())?;
        let mut rels = Vec::new();
        for r in relators {
            rels.push(alphabet.parse_word(r)?);
        }
        Presentation::new(alphabet, rels)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn rank(&self) -> usize {
        self.alphabet.rank()
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn is_free(&self) -> bool {
        self.relators.is_empty()
    }

    pub fn parse_word(&self, text: &str) -> Result<Word, WordParseError> {
        self.alphabet.parse_word(text)
    }

    pub fn print_word(&self, w: &Word) -> String {
        self.alphabet.print_word(w)
    }

    /// Reads the presentation file format:
    ///
    /// ```text
    /// # comment
    /// gens a b
    /// rel a^-1 b^2 a b^-3
    /// ```
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let mut alphabet: Option<Alphabet> = None;
        let mut relators = Vec::new();
        for (lineno, line, body) in content_lines(text) {
            let (keyword, rest, rest_col) = split_keyword(line, body);
            match keyword {
                "gens" => {
                    if alphabet.is_some() {
                        return Err(err(lineno, 1, "duplicate 'gens' line"));
                    }
                    let a = Alphabet::new(rest.split_whitespace())
                        .map_err(|e| err(lineno, rest_col, &e.to_string()))?;
                    alphabet = Some(a);
                }
                "rel" => {
                    let a = alphabet
                        .as_ref()
                        .ok_or_else(|| err(lineno, 1, "'rel' before 'gens'"))?;
                    let w = a
                        .parse_word(rest)
                        .map_err(|e| err(lineno, rest_col + e.column - 1, &e.message))?;
                    if w.is_empty() {
                        return Err(err(lineno, rest_col, "relator is freely trivial"));
                    }
                    relators.push(w);
                }
                other => {
                    return Err(err(lineno, 1, &format!("unexpected keyword {other:?}")));
                }
            }
        }
        let alphabet = alphabet.ok_or_else(|| err(1, 1, "missing 'gens' line"))?;
        Ok(Presentation { alphabet, relators })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("gens {}\n", self.alphabet.names().join(" "));
        for r in &self.relators {
            out.push_str(&format!("rel {}\n", self.print_word(r)));
        }
        out
    }
}

/// Iterates non-blank, non-comment lines as (1-based line number, trimmed
/// line, byte offset of the trimmed line within the raw line).
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str, usize)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let trimmed = raw.trim_start();
        let offset = raw.len() - trimmed.len();
        let trimmed = trimmed.trim_end();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            None
        } else {
            Some((i + 1, trimmed, offset))
        }
    })
}

fn split_keyword(line: &str, offset: usize) -> (&str, &str, usize) {
    match line.find(char::is_whitespace) {
        Some(i) => {
            let rest = &line[i..];
            let lead = rest.len() - rest.trim_start().len();
            (&line[..i], rest.trim_start(), offset + i + lead + 1)
        }
        None => (line, "", offset + line.len() + 1),
    }
}

fn err(line: usize, column: usize, message: &str) -> FormatError {
    FormatError {
        line,
        column,
        message: message.to_string(),
    }
}

/// A finite list of words `S` over a presentation's alphabet; `⟨∅⟩` is the
/// trivial subgroup.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct GeneratingSet {
    generators: Vec<Word>,
}

impl GeneratingSet {
    pub fn new(p: &Presentation, generators: Vec<Word>) -> Result<Self, PresentationError> {
        for w in &generators {
            p.alphabet().check_word(w)?;
        }
        Ok(GeneratingSet { generators })
    }

    pub fn from_strs(p: &Presentation, words: &[&str]) -> Result<Self, PresentationError> {
        let mut gens = Vec::new();
        for s in words {
            gens.push(p.parse_word(s)?);
        }
        GeneratingSet::new(p, gens)
    }

    pub fn generators(&self) -> &[Word] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Reads lines of the form `gen WORD` over `p`'s alphabet.
    pub fn parse(p: &Presentation, text: &str) -> Result<Self, FormatError> {
        let mut generators = Vec::new();
        for (lineno, line, body) in content_lines(text) {
            let (keyword, rest, rest_col) = split_keyword(line, body);
            if keyword != "gen" {
                return Err(err(lineno, 1, &format!("unexpected keyword {keyword:?}")));
            }
            let w = p
                .parse_word(rest)
                .map_err(|e| err(lineno, rest_col + e.column - 1, &e.message))?;
            generators.push(w);
        }
        Ok(GeneratingSet { generators })
    }

    pub fn to_text(&self, p: &Presentation) -> String {
        self.generators
            .iter()
            .map(|w| format!("gen {}\n", p.print_word(w)))
            .collect()
    }
}

/// A direct product of presentations with the bookkeeping needed to embed
/// and project factor words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductPresentation {
    factors: Vec<Presentation>,
    combined: Presentation,
    ranges: Vec<Range<usize>>,
}

impl ProductPresentation {
    pub fn factors(&self) -> &[Presentation] {
        &self.factors
    }

    pub fn combined(&self) -> &Presentation {
        &self.combined
    }

    pub fn factor_range(&self, i: usize) -> Range<usize> {
        self.ranges[i].clone()
    }

    /// Maps a word of factor `i` into the combined alphabet.
    pub fn include(&self, i: usize, w: &Word) -> Result<Word, PresentationError> {
        let range = self.range(i)?;
        self.factors[i].alphabet().check_word(w)?;
        Ok(w.letters()
            .iter()
            .map(|l| Letter::new(range.start + l.generator(), l.is_inverse()))
            .collect())
    }

    /// Builds the combined word `(w_1, …, w_n)` from one word per factor.
    pub fn tuple(&self, parts: &[Word]) -> Result<Word, PresentationError> {
        let mut letters = Vec::new();
        for (i, w) in parts.iter().enumerate() {
            letters.extend_from_slice(self.include(i, w)?.letters());
        }
        Ok(Word::from_letters(letters))
    }

    /// Factor `i`'s coordinate of a combined word, in the factor's own alphabet.
    pub fn component(&self, i: usize, w: &Word) -> Result<Word, PresentationError> {
        let range = self.range(i)?;
        self.combined.alphabet().check_word(w)?;
        Ok(w.letters()
            .iter()
            .filter(|l| range.contains(&l.generator()))
            .map(|l| Letter::new(l.generator() - range.start, l.is_inverse()))
            .collect())
    }

    fn range(&self, i: usize) -> Result<&Range<usize>, PresentationError> {
        self.ranges.get(i).ok_or(PresentationError::FactorIndex {
            index: i,
            count: self.ranges.len(),
        })
    }
}

/// Standard presentation of `G_1 × … × G_n`: factor relators plus the
/// commutator `x⁻¹y⁻¹xy` for every `x` in an earlier factor and `y` in a
/// later one. Names that collide with an earlier factor's get `_i` appended
/// (1-based factor index).
pub fn direct_product(factors: &[Presentation]) -> Result<ProductPresentation, PresentationError> {
    if factors.is_empty() {
        return Err(PresentationError::NoFactors);
    }
    let mut names: Vec<String> = Vec::new();
    let mut ranges = Vec::new();
    for (i, f) in factors.iter().enumerate() {
        let start = names.len();
        for name in f.alphabet().names() {
            let mut candidate = name.clone();
            while names.contains(&candidate) {
                candidate = format!("{candidate}_{}", i + 1);
            }
            names.push(candidate);
        }
        ranges.push(start..names.len());
    }
    let alphabet = Alphabet::new(names)?;

    let mut relators = Vec::new();
    for (f, range) in factors.iter().zip(&ranges) {
        for r in f.relators() {
            relators.push(
                r.letters()
                    .iter()
                    .map(|l| Letter::new(range.start + l.generator(), l.is_inverse()))
                    .collect(),
            );
        }
    }
    for i in 0..ranges.len() {
        for j in i + 1..ranges.len() {
            for x in ranges[i].clone() {
                for y in ranges[j].clone() {
                    relators.push(Word::from_letters([
                        Letter::neg(x),
                        Letter::neg(y),
                        Letter::pos(x),
                        Letter::pos(y),
                    ]));
                }
            }
        }
    }
    Ok(ProductPresentation {
        factors: factors.to_vec(),
        combined: Presentation::new(alphabet, relators)?,
        ranges,
    })
}

/// Deletes every letter outside the kept factors. `keep` holds 0-based
/// factor indices.
pub fn project(p: &ProductPresentation, keep: &[usize], w: &Word) -> Result<Word, PresentationError> {
    for &k in keep {
        p.range(k)?;
    }
    p.combined.alphabet().check_word(w)?;
    Ok(w.letters()
        .iter()
        .copied()
        .filter(|l| keep.iter().any(|&k| p.ranges[k].contains(&l.generator())))
        .collect())
}

/// `{(a_i, a_i)}` inside a product of two identical factors.
pub fn diagonal_subgroup(p: &ProductPresentation) -> Result<GeneratingSet, PresentationError> {
    if p.factors.len() != 2 || p.factors[0] != p.factors[1] {
        return Err(PresentationError::FactorMismatch);
    }
    let gens = (0..p.factors[0].rank())
        .map(|i| {
            let x = Word::letter(Letter::pos(i));
            p.tuple(&[x.clone(), x])
        })
        .collect::<Result<Vec<_>, _>>()?;
    GeneratingSet::new(&p.combined, gens)
}

/// For the quotient `q: F → Q` sending each generator of the free group
/// `domain` to the same-named generator of `target`, returns `F × F` and
/// the generators `{(a_i, a_i)} ∪ {(r_j, 1)}` of `(q×q)⁻¹(Δ)`.
pub fn fiber_product_subgroup(
    domain: &Presentation,
    target: &Presentation,
) -> Result<(ProductPresentation, GeneratingSet), PresentationError> {
    if !domain.is_free() {
        return Err(PresentationError::NotFree);
    }
    if domain.alphabet().names() != target.alphabet().names() {
        return Err(PresentationError::GeneratorMismatch(
            domain.alphabet().names().to_vec(),
            target.alphabet().names().to_vec(),
        ));
    }
    let product = direct_product(&[domain.clone(), domain.clone()])?;
    let mut gens = diagonal_subgroup(&product)?.generators;
    for r in target.relators() {
        gens.push(product.tuple(&[r.clone(), Word::empty()])?);
    }
    let set = GeneratingSet::new(&product.combined, gens)?;
    Ok((product, set))
}
