//! Word problem for Baumslag-Solitar groups `BS(m,n) = ⟨a, b | a⁻¹bᵐa = bⁿ⟩`
//! by Britton reduction, and the membership oracle it gives for the fiber
//! product `(q×q)⁻¹(Δ) ≤ F(a,b) × F(a,b)`.
//!
//! Words are over the alphabet `{a, b}` with `a` (index 0) the stable letter.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::presentations::Presentation;
use crate::words::{concat, invert, Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BsError {
    #[error("BS(m,n) needs m and n nonzero")]
    ZeroParameter,
    #[error("b-exponent {0} is too large to spell out as a word")]
    ExponentTooLarge(BigInt),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BsGroup {
    m: i64,
    n: i64,
}

/// A syllable of a Britton-reduced form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Syllable {
    /// `a` (`+1`) or `a⁻¹` (`-1`).
    Stable(i8),
    /// `b^k`, `k ≠ 0`.
    Power(BigInt),
}

impl BsGroup {
    pub fn new(m: i64, n: i64) -> Result<Self, BsError> {
        if m == 0 || n == 0 {
            return Err(BsError::ZeroParameter);
        }
        Ok(BsGroup { m, n })
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    /// `⟨a, b | a^-1 b^m a b^-n⟩`.
    pub fn presentation(&self) -> Presentation {
        let mut letters = vec![Letter::neg(0)];
        letters.extend(Word::power(1, self.m).letters().iter().copied());
        letters.push(Letter::pos(0));
        letters.extend(Word::power(1, -self.n).letters().iter().copied());
        Presentation::new(
            crate::words::Alphabet::new(["a", "b"]).expect("valid names"),
            vec![Word::from_letters(letters)],
        )
        .expect("nonempty relator")
    }

    /// Britton-reduced syllable form, computed with a stack: each stable
    /// letter is checked against the innermost pinch `a⁻¹ bᵏ a` (needs
    /// `m | k`) or `a bᵏ a⁻¹` (needs `n | k`) ending at it.
    pub fn britton_form(&self, w: &Word) -> Vec<Syllable> {
        let (m, n) = (BigInt::from(self.m), BigInt::from(self.n));
        let mut stack: Vec<Syllable> = Vec::new();
        for &l in w.letters() {
            if l.generator() == 1 {
                push_power(&mut stack, BigInt::from(l.sign()));
                continue;
            }
            let e = l.sign() as i8;
            // e = +1: a^-1 b^k a -> b^(k n / m); e = -1: a b^k a^-1 -> b^(k m / n)
            let (div, mul) = if e == 1 { (&m, &n) } else { (&n, &m) };
            let pinched = match stack.as_slice() {
                [.., Syllable::Stable(s)] if *s == -e => Some((1, BigInt::zero())),
                [.., Syllable::Stable(s), Syllable::Power(k)] if *s == -e && k.is_multiple_of(div) => {
                    Some((2, k / div * mul))
                }
                _ => None,
            };
            match pinched {
                Some((drop, replaced)) => {
                    stack.truncate(stack.len() - drop);
                    push_power(&mut stack, replaced);
                }
                None => stack.push(Syllable::Stable(e)),
            }
        }
        stack
    }

    /// Britton-reduced word equal to `w` in the group.
    pub fn britton_reduce(&self, w: &Word) -> Result<Word, BsError> {
        let mut letters = Vec::new();
        for syl in self.britton_form(w) {
            match syl {
                Syllable::Stable(e) => letters.push(Letter::new(0, e < 0)),
                Syllable::Power(k) => {
                    let count = k
                        .magnitude()
                        .to_usize()
                        .filter(|&c| c <= 1 << 24)
                        .ok_or_else(|| BsError::ExponentTooLarge(k.clone()))?;
                    let l = Letter::new(1, k < BigInt::zero());
                    letters.extend(std::iter::repeat_n(l, count));
                }
            }
        }
        Ok(Word::from_letters(letters))
    }

    /// Exact: a Britton-reduced form is trivial only when it is empty.
    pub fn is_identity(&self, w: &Word) -> bool {
        self.britton_form(w).is_empty()
    }
}

fn push_power(stack: &mut Vec<Syllable>, k: BigInt) {
    if k.is_zero() {
        return;
    }
    if let Some(Syllable::Power(j)) = stack.last_mut() {
        *j += k;
        if j.is_zero() {
            stack.pop();
        }
    } else {
        stack.push(Syllable::Power(k));
    }
}

pub fn britton_reduce(g: &BsGroup, w: &Word) -> Result<Word, BsError> {
    g.britton_reduce(w)
}

pub fn bs_is_identity(g: &BsGroup, w: &Word) -> bool {
    g.is_identity(w)
}

/// `(w1, w2) ∈ (q×q)⁻¹(Δ)` iff `w1⁻¹w2` is trivial in the group.
pub fn fiber_member_oracle(g: &BsGroup, w1: &Word, w2: &Word) -> bool {
    g.is_identity(&concat(&invert(w1), w2))
}

/// The oracle for a word over the product alphabet `(a, b, a', b')`:
/// generators 0 and 1 form the first coordinate, 2 and 3 the second.
/// `None` if `w` uses a generator beyond the fourth.
pub fn fiber_word_member(g: &BsGroup, w: &Word) -> Option<bool> {
    let mut first = Vec::new();
    let mut second = Vec::new();
    for &l in w.letters() {
        match l.generator() {
            0 | 1 => first.push(l),
            2 | 3 => second.push(Letter::new(l.generator() - 2, l.is_inverse())),
            _ => return None,
        }
    }
    Some(fiber_member_oracle(g, &Word::from_letters(first), &Word::from_letters(second)))
}

/// Whether the syllable form still contains a pinch.
pub fn has_pinch(g: &BsGroup, form: &[Syllable]) -> bool {
    form.windows(3).any(|t| match t {
        [Syllable::Stable(s), Syllable::Power(k), Syllable::Stable(e)] if *s == -*e => {
            let div = if *e == 1 { g.m } else { g.n };
            k.is_multiple_of(&BigInt::from(div))
        }
        _ => false,
    }) || form.windows(2).any(|t| match t {
        [Syllable::Stable(s), Syllable::Stable(e)] => *s == -*e,
        [Syllable::Power(_), Syllable::Power(_)] => true,
        _ => false,
    })
}
