//! The free-group side of the membership search: words in the subgroup
//! generators, products of conjugates of relators, and the free-equality
//! test between them.

use crate::presentations::{GeneratingSet, Presentation};
use crate::words::{concat, conjugate, invert, product, Letter, Word};

/// A product of subgroup generators and their inverses.
///
/// Indices are 1-based and signed: `+i` is the `i`-th generator, `-i` its
/// inverse.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubgroupWord {
    pub indices: Vec<i64>,
    pub value: Word,
}

impl SubgroupWord {
    /// Rebuilds the value from indices, rejecting out-of-range entries.
    pub fn from_indices(s: &GeneratingSet, indices: Vec<i64>) -> Option<Self> {
        let gens = s.generators();
        let mut parts = Vec::with_capacity(indices.len());
        for &i in &indices {
            let k = i.unsigned_abs() as usize;
            if i == 0 || k > gens.len() {
                return None;
            }
            parts.push(if i > 0 {
                gens[k - 1].clone()
            } else {
                invert(&gens[k - 1])
            });
        }
        Some(SubgroupWord {
            value: product(&parts),
            indices,
        })
    }
}

fn symbol_index(symbol: usize) -> i64 {
    let i = (symbol / 2 + 1) as i64;
    if symbol.is_multiple_of(2) {
        i
    } else {
        -i
    }
}

/// Enumerates all sequences over `S ∪ S⁻¹` by length, then
/// lexicographically with `s₁ < s₁⁻¹ < s₂ < …`.
#[derive(Debug, Clone)]
pub struct SubgroupWords {
    generators: GeneratingSet,
    digits: Vec<usize>,
    started: bool,
    done: bool,
}

impl SubgroupWords {
    pub fn new(s: &GeneratingSet) -> Self {
        SubgroupWords {
            generators: s.clone(),
            digits: Vec::new(),
            started: false,
            done: false,
        }
    }

    fn make(&self) -> SubgroupWord {
        let indices = self.digits.iter().map(|&d| symbol_index(d)).collect();
        SubgroupWord::from_indices(&self.generators, indices).expect("indices in range")
    }
}

impl Iterator for SubgroupWords {
    type Item = SubgroupWord;

    fn next(&mut self) -> Option<SubgroupWord> {
        if self.done {
            return None;
        }
        let k = 2 * self.generators.len();
        if !self.started {
            self.started = true;
            if k == 0 {
                self.done = true;
            }
            return Some(self.make());
        }
        let mut i = self.digits.len();
        loop {
            if i == 0 {
                self.digits = vec![0; self.digits.len() + 1];
                break;
            }
            i -= 1;
            self.digits[i] += 1;
            if self.digits[i] < k {
                break;
            }
            self.digits[i] = 0;
        }
        Some(self.make())
    }
}

/// The `n`-th item of [`SubgroupWords`], computed directly.
pub fn subgroup_word_at(s: &GeneratingSet, mut n: u128) -> Option<SubgroupWord> {
    let k = 2 * s.len() as u128;
    if k == 0 {
        return (n == 0).then(|| SubgroupWord::from_indices(s, Vec::new()).unwrap());
    }
    let mut len = 0u32;
    let mut count = 1u128;
    while n >= count {
        n -= count;
        len += 1;
        count = count.checked_mul(k)?;
    }
    let mut digits = vec![0usize; len as usize];
    for d in digits.iter_mut().rev() {
        *d = (n % k) as usize;
        n /= k;
    }
    SubgroupWord::from_indices(s, digits.into_iter().map(symbol_index).collect())
}

pub fn enumerate_subgroup_words(s: &GeneratingSet) -> SubgroupWords {
    SubgroupWords::new(s)
}

/// `conjugator · relator^sign · conjugator⁻¹`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Factor {
    pub conjugator: Word,
    pub relator: usize,
    pub sign: i8,
}

impl Factor {
    pub fn size(&self) -> usize {
        1 + self.conjugator.len()
    }

    pub fn value(&self, p: &Presentation) -> Option<Word> {
        let r = p.relators().get(self.relator)?;
        let r = if self.sign < 0 { invert(r) } else { r.clone() };
        Some(conjugate(&r, &self.conjugator))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ConjugateProduct {
    pub factors: Vec<Factor>,
}

impl ConjugateProduct {
    pub fn empty() -> Self {
        ConjugateProduct::default()
    }

    /// Factor count plus total conjugator length.
    pub fn size(&self) -> usize {
        self.factors.iter().map(Factor::size).sum()
    }

    /// The reduced product, or `None` if a relator index is out of range or
    /// a sign is not ±1.
    pub fn value(&self, p: &Presentation) -> Option<Word> {
        let mut acc = Word::empty();
        for f in &self.factors {
            if f.sign != 1 && f.sign != -1 {
                return None;
            }
            acc = concat(&acc, &f.value(p)?);
        }
        Some(acc)
    }
}

#[derive(Debug, Clone)]
struct FactorCursor {
    conjugator: Vec<usize>,
    relator: usize,
    negative: bool,
}

/// First reduced word of the given length in letter-code order.
fn first_reduced(len: usize, alphabet: usize) -> Option<Vec<usize>> {
    if len > 0 && alphabet == 0 {
        return None;
    }
    let mut digits = Vec::with_capacity(len);
    for j in 0..len {
        digits.push(smallest_after(if j == 0 { None } else { Some(digits[j - 1]) }));
    }
    Some(digits)
}

fn smallest_after(prev: Option<usize>) -> usize {
    match prev {
        Some(p) if p ^ 1 == 0 => 1,
        _ => 0,
    }
}

/// Advances to the next reduced word of the same length.
fn next_reduced(digits: &mut [usize], alphabet: usize) -> bool {
    let mut i = digits.len();
    while i > 0 {
        i -= 1;
        let mut d = digits[i] + 1;
        if i > 0 && d == digits[i - 1] ^ 1 {
            d += 1;
        }
        if d < alphabet {
            digits[i] = d;
            for j in i + 1..digits.len() {
                digits[j] = smallest_after(Some(digits[j - 1]));
            }
            return true;
        }
    }
    false
}

/// Next composition of `sum` into the same number of positive parts, in
/// lexicographic order.
fn next_composition(parts: &mut [usize]) -> bool {
    let k = parts.len();
    if k < 2 {
        return false;
    }
    for i in (0..k - 1).rev() {
        let tail: usize = parts[i + 1..].iter().sum();
        if tail > k - 1 - i {
            parts[i] += 1;
            for p in parts[i + 1..k - 1].iter_mut() {
                *p = 1;
            }
            parts[k - 1] = tail - 1 - (k - 2 - i);
            return true;
        }
    }
    false
}

/// Enumerates products of conjugates of relators and their inverses.
///
/// Order: total size ascending (each factor costs one plus its conjugator
/// length), then factor count, then the factors' sizes as a composition in
/// lexicographic order, then each factor's (conjugator in letter-code
/// order, relator index, `+` before `-`) with the last factor varying
/// fastest. Conjugators are reduced words. With `max_size` set the stream
/// stops after the last product of that size.
#[derive(Debug, Clone)]
pub struct RelatorProducts {
    alphabet: usize,
    relators: usize,
    max_size: Option<usize>,
    size: usize,
    parts: Vec<usize>,
    cursors: Option<Vec<FactorCursor>>,
    started: bool,
    done: bool,
}

impl RelatorProducts {
    pub fn new(p: &Presentation, max_size: Option<usize>) -> Self {
        RelatorProducts {
            alphabet: 2 * p.rank(),
            relators: p.relators().len(),
            max_size,
            size: 0,
            parts: Vec::new(),
            cursors: None,
            started: false,
            done: false,
        }
    }

    fn init_cursors(&self) -> Option<Vec<FactorCursor>> {
        self.parts
            .iter()
            .map(|&t| {
                Some(FactorCursor {
                    conjugator: first_reduced(t - 1, self.alphabet)?,
                    relator: 0,
                    negative: false,
                })
            })
            .collect()
    }

    fn advance_factor(&self, c: &mut FactorCursor) -> bool {
        if !c.negative {
            c.negative = true;
            return true;
        }
        c.negative = false;
        c.relator += 1;
        if c.relator < self.relators {
            return true;
        }
        c.relator = 0;
        next_reduced(&mut c.conjugator, self.alphabet)
    }

    /// Moves to the next composition, factor count, or size. Returns false
    /// once the size cap is passed.
    fn advance_shape(&mut self) -> bool {
        if next_composition(&mut self.parts) {
            return true;
        }
        let k = self.parts.len() + 1;
        if k <= self.size {
            self.parts = vec![1; k];
            self.parts[k - 1] = self.size - (k - 1);
            return true;
        }
        self.size += 1;
        if self.max_size.is_some_and(|m| self.size > m) {
            return false;
        }
        self.parts = vec![self.size];
        true
    }

    fn current(&self, cursors: &[FactorCursor]) -> ConjugateProduct {
        ConjugateProduct {
            factors: cursors
                .iter()
                .map(|c| Factor {
                    conjugator: Word::from_letters(c.conjugator.iter().map(|&d| Letter::from_code(d))),
                    relator: c.relator,
                    sign: if c.negative { -1 } else { 1 },
                })
                .collect(),
        }
    }
}

impl Iterator for RelatorProducts {
    type Item = ConjugateProduct;

    fn next(&mut self) -> Option<ConjugateProduct> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            if self.relators == 0 || self.max_size == Some(0) {
                self.done = true;
            } else {
                self.size = 1;
                self.parts = vec![1];
                self.cursors = self.init_cursors();
            }
            return Some(ConjugateProduct::empty());
        }
        loop {
            if let Some(mut cursors) = self.cursors.take() {
                let out = self.current(&cursors);
                let mut i = cursors.len();
                let mut advanced = false;
                while i > 0 {
                    i -= 1;
                    if self.advance_factor(&mut cursors[i]) {
                        advanced = true;
                        break;
                    }
                    cursors[i] = FactorCursor {
                        conjugator: first_reduced(self.parts[i] - 1, self.alphabet).expect("nonempty"),
                        relator: 0,
                        negative: false,
                    };
                }
                if advanced {
                    self.cursors = Some(cursors);
                }
                return Some(out);
            }
            if !self.advance_shape() {
                self.done = true;
                return None;
            }
            self.cursors = self.init_cursors();
        }
    }
}

pub fn enumerate_relator_products(p: &Presentation, max_size: Option<usize>) -> RelatorProducts {
    RelatorProducts::new(p, max_size)
}

/// Whether `g⁻¹ · u` is freely equal to the product's value.
pub fn witness_check(p: &Presentation, g: &Word, u: &SubgroupWord, pprod: &ConjugateProduct) -> bool {
    match pprod.value(p) {
        Some(v) => concat(&invert(g), &u.value) == v,
        None => false,
    }
}
