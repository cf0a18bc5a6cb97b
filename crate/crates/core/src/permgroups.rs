//! Permutations, Schreier-Sims, and the search for homomorphisms from a
//! finitely presented group into symmetric groups.
//!
//! Permutations act on the right: `(p * q)(x) = q(p(x))`, so the image of a
//! word is the product of its letters' images from left to right.

use std::fmt;
use std::ops::Mul;

use thiserror::Error;

use crate::presentations::Presentation;
use crate::words::{Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("images do not form a bijection of 0..{0}")]
    NotBijection(usize),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("expected {expected} generator images, got {got}")]
    ImageCount { expected: usize, got: usize },
    #[error("relator {0} does not map to the identity")]
    RelatorViolated(usize),
    #[error("degree must be positive")]
    ZeroDegree,
}

/// A bijection of `0..degree`, stored in one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return Err(PermError::NotBijection(n));
            }
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation from disjoint cycles over 0-based points.
    pub fn from_cycles(degree: usize, cycles: &[&[usize]]) -> Result<Self, PermError> {
        let mut images: Vec<usize> = (0..degree).collect();
        for cycle in cycles {
            for (i, &x) in cycle.iter().enumerate() {
                let y = cycle[(i + 1) % cycle.len()];
                if x >= degree || y >= degree {
                    return Err(PermError::NotBijection(degree));
                }
                images[x] = y;
            }
        }
        Permutation::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x] = i;
        }
        Permutation { images: inv }
    }

    /// `self` first, then `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: self.images.iter().map(|&x| other.images[x]).collect(),
        }
    }

    fn first_moved(&self) -> Option<usize> {
        self.images.iter().enumerate().position(|(i, &x)| i != x)
    }

    /// Disjoint cycle notation with 1-based points; the identity prints as `()`.
    pub fn cycle_notation(&self) -> String {
        let mut seen = vec![false; self.degree()];
        let mut out = String::new();
        for start in 0..self.degree() {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push((x + 1).to_string());
                x = self.images[x];
            }
            out.push_str(&format!("({})", cycle.join(" ")));
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

impl Mul for &Permutation {
    type Output = Permutation;

    fn mul(self, rhs: &Permutation) -> Permutation {
        self.then(rhs)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.cycle_notation())
    }
}

/// A homomorphism from a presentation's group to `Sym(degree)`, given by
/// generator images. Constructed only through checks that every relator
/// maps to the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PermRep {
    degree: usize,
    images: Vec<Permutation>,
    inverses: Vec<Permutation>,
}

impl PermRep {
    pub fn new(p: &Presentation, degree: usize, images: Vec<Permutation>) -> Result<Self, PermError> {
        let rep = PermRep::unchecked(degree, images)?;
        if rep.images.len() != p.rank() {
            return Err(PermError::ImageCount {
                expected: p.rank(),
                got: rep.images.len(),
            });
        }
        for (i, r) in p.relators().iter().enumerate() {
            if !rep.evaluate(r).is_identity() {
                return Err(PermError::RelatorViolated(i));
            }
        }
        Ok(rep)
    }

    /// A representation of the free group on `images.len()` generators.
    pub fn unchecked(degree: usize, images: Vec<Permutation>) -> Result<Self, PermError> {
        if degree == 0 {
            return Err(PermError::ZeroDegree);
        }
        if let Some(bad) = images.iter().find(|p| p.degree() != degree) {
            return Err(PermError::DegreeMismatch(degree, bad.degree()));
        }
        let inverses = images.iter().map(Permutation::inverse).collect();
        Ok(PermRep {
            degree,
            images,
            inverses,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn images(&self) -> &[Permutation] {
        &self.images
    }

    /// Image of a single point under a word, without building the permutation.
    pub fn act(&self, mut x: usize, w: &Word) -> usize {
        for &l in w.letters() {
            x = self.letter_image(l).apply(x);
        }
        x
    }

    fn letter_image(&self, l: Letter) -> &Permutation {
        if l.is_inverse() {
            &self.inverses[l.generator()]
        } else {
            &self.images[l.generator()]
        }
    }

    pub fn evaluate(&self, w: &Word) -> Permutation {
        Permutation {
            images: (0..self.degree).map(|x| self.act(x, w)).collect(),
        }
    }
}

/// `rep(w)`.
pub fn evaluate(rep: &PermRep, w: &Word) -> Permutation {
    rep.evaluate(w)
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Level {
    point: usize,
    // transversal[x] maps `point` to x
    transversal: Vec<Option<Permutation>>,
    orbit: Vec<usize>,
    generators: Vec<Permutation>,
}

/// A permutation group with a base and strong generating set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    strong: Vec<Permutation>,
    levels: Vec<Level>,
}

impl PermGroup {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.point).collect()
    }

    pub fn strong_generators(&self) -> &[Permutation] {
        &self.strong
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    pub fn contains(&self, p: &Permutation) -> Result<bool, PermError> {
        if p.degree() != self.degree {
            return Err(PermError::DegreeMismatch(self.degree, p.degree()));
        }
        Ok(sift(&self.levels, p.clone()).is_identity())
    }
}

fn sift(levels: &[Level], mut h: Permutation) -> Permutation {
    for level in levels {
        let x = h.apply(level.point);
        match &level.transversal[x] {
            Some(u) => h = h.then(&u.inverse()),
            None => return h,
        }
    }
    h
}

fn build_levels(degree: usize, base: &[usize], strong: &[Permutation]) -> Vec<Level> {
    base.iter()
        .enumerate()
        .map(|(i, &point)| {
            let generators: Vec<Permutation> = strong
                .iter()
                .filter(|s| base[..i].iter().all(|&b| s.apply(b) == b))
                .cloned()
                .collect();
            let mut transversal: Vec<Option<Permutation>> = vec![None; degree];
            transversal[point] = Some(Permutation::identity(degree));
            let mut orbit = vec![point];
            let mut next = 0;
            while next < orbit.len() {
                let x = orbit[next];
                next += 1;
                for s in &generators {
                    let y = s.apply(x);
                    if transversal[y].is_none() {
                        let u = transversal[x].as_ref().map(|u| u.then(s));
                        transversal[y] = u;
                        orbit.push(y);
                    }
                }
            }
            Level {
                point,
                transversal,
                orbit,
                generators,
            }
        })
        .collect()
}

/// Schreier-Sims: keeps adjoining non-siftable Schreier generators to the
/// strong generating set until every level's Schreier generators sift
/// through the levels below it.
pub fn schreier_sims(degree: usize, generators: &[Permutation]) -> Result<PermGroup, PermError> {
    if let Some(bad) = generators.iter().find(|p| p.degree() != degree) {
        return Err(PermError::DegreeMismatch(degree, bad.degree()));
    }
    let mut strong: Vec<Permutation> = Vec::new();
    let mut base: Vec<usize> = Vec::new();
    let extend_base = |base: &mut Vec<usize>, s: &Permutation| {
        if base.iter().all(|&b| s.apply(b) == b) {
            if let Some(x) = s.first_moved() {
                base.push(x);
            }
        }
    };
    for g in generators {
        if !g.is_identity() && !strong.contains(g) {
            extend_base(&mut base, g);
            strong.push(g.clone());
        }
    }
    loop {
        let levels = build_levels(degree, &base, &strong);
        let residue = (0..levels.len()).rev().find_map(|i| {
            let level = &levels[i];
            for &x in &level.orbit {
                let ux = level.transversal[x].as_ref().expect("orbit point");
                for s in &level.generators {
                    let y = s.apply(x);
                    let uy = level.transversal[y].as_ref().expect("orbit point");
                    let schreier = ux.then(s).then(&uy.inverse());
                    if schreier.is_identity() {
                        continue;
                    }
                    let h = sift(&levels[i + 1..], schreier);
                    if !h.is_identity() {
                        return Some(h);
                    }
                }
            }
            None
        });
        match residue {
            Some(h) => {
                extend_base(&mut base, &h);
                strong.push(h);
            }
            None => {
                return Ok(PermGroup {
                    degree,
                    generators: generators.to_vec(),
                    strong,
                    levels,
                });
            }
        }
    }
}

pub fn perm_member(group: &PermGroup, p: &Permutation) -> Result<bool, PermError> {
    group.contains(p)
}

/// Outcome of one unit of quotient search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchStep {
    /// A complete, relator-respecting assignment.
    Found(PermRep),
    /// A partial assignment was extended or rejected.
    Searching,
    Exhausted,
}

const UNSET: usize = usize::MAX;

/// Backtracking search over all homomorphisms into `Sym(degree)`.
///
/// Generator images are assigned point by point (generator 0 first, points
/// in increasing order), each position trying unused values in increasing
/// order. Candidates therefore come out in lexicographic order of the
/// image tuples in one-line notation. After each assignment every relator
/// is traced forwards and backwards from every start point; the partial
/// assignment is dropped as soon as a fully traced relator fails to close.
#[derive(Debug, Clone)]
pub struct QuotientSearch {
    degree: usize,
    rank: usize,
    relators: Vec<Vec<Letter>>,
    // relators mentioning each generator
    by_generator: Vec<Vec<usize>>,
    forward: Vec<Vec<usize>>,
    backward: Vec<Vec<usize>>,
    next_value: Vec<usize>,
    pos: usize,
    done: bool,
}

impl QuotientSearch {
    pub fn new(p: &Presentation, degree: usize) -> Result<Self, PermError> {
        if degree == 0 {
            return Err(PermError::ZeroDegree);
        }
        let rank = p.rank();
        let relators: Vec<Vec<Letter>> = p
            .relators()
            .iter()
            .map(|r| r.cyclically_reduced().letters().to_vec())
            .collect();
        let by_generator = (0..rank)
            .map(|g| {
                (0..relators.len())
                    .filter(|&i| relators[i].iter().any(|l| l.generator() == g))
                    .collect()
            })
            .collect();
        Ok(QuotientSearch {
            degree,
            rank,
            relators,
            by_generator,
            forward: vec![vec![UNSET; degree]; rank],
            backward: vec![vec![UNSET; degree]; rank],
            next_value: vec![0; rank * degree + 1],
            pos: 0,
            done: false,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    fn total(&self) -> usize {
        self.rank * self.degree
    }

    fn apply(&self, x: usize, l: Letter) -> usize {
        if l.is_inverse() {
            self.backward[l.generator()][x]
        } else {
            self.forward[l.generator()][x]
        }
    }

    fn relator_consistent(&self, r: &[Letter], start: usize) -> bool {
        let mut p = start;
        let mut i = 0;
        while i < r.len() {
            let q = self.apply(p, r[i]);
            if q == UNSET {
                break;
            }
            p = q;
            i += 1;
        }
        if i == r.len() {
            return p == start;
        }
        let mut z = start;
        let mut j = r.len();
        while j > i {
            let q = self.apply(z, r[j - 1].inverse());
            if q == UNSET {
                break;
            }
            z = q;
            j -= 1;
        }
        j > i || p == z
    }

    fn consistent_after(&self, g: usize) -> bool {
        self.by_generator[g].iter().all(|&ri| {
            let r = &self.relators[ri];
            (0..self.degree).all(|x| self.relator_consistent(r, x))
        })
    }

    fn unassign(&mut self, pos: usize) {
        let (g, x) = (pos / self.degree, pos % self.degree);
        let y = self.forward[g][x];
        if y != UNSET {
            self.forward[g][x] = UNSET;
            self.backward[g][y] = UNSET;
        }
    }

    fn current(&self) -> PermRep {
        let images = self
            .forward
            .iter()
            .map(|f| Permutation { images: f.clone() })
            .collect();
        PermRep::unchecked(self.degree, images).expect("complete assignment")
    }

    /// Performs one trial assignment (or one backtrack).
    pub fn step(&mut self) -> SearchStep {
        if self.done {
            return SearchStep::Exhausted;
        }
        let total = self.total();
        if total == 0 {
            // no generators: only the trivial map
            self.done = true;
            return SearchStep::Found(self.current());
        }
        let (g, x) = (self.pos / self.degree, self.pos % self.degree);
        let start = self.next_value[self.pos];
        let candidate = (start..self.degree).find(|&v| self.backward[g][v] == UNSET);
        let Some(v) = candidate else {
            self.next_value[self.pos] = 0;
            if self.pos == 0 {
                self.done = true;
                return SearchStep::Exhausted;
            }
            self.pos -= 1;
            self.unassign(self.pos);
            return SearchStep::Searching;
        };
        self.next_value[self.pos] = v + 1;
        self.forward[g][x] = v;
        self.backward[g][v] = x;
        if !self.consistent_after(g) {
            self.unassign(self.pos);
            return SearchStep::Searching;
        }
        if self.pos + 1 == total {
            let rep = self.current();
            self.unassign(self.pos);
            return SearchStep::Found(rep);
        }
        self.pos += 1;
        SearchStep::Searching
    }
}

impl Iterator for QuotientSearch {
    type Item = PermRep;

    fn next(&mut self) -> Option<PermRep> {
        loop {
            match self.step() {
                SearchStep::Found(rep) => return Some(rep),
                SearchStep::Searching => continue,
                SearchStep::Exhausted => return None,
            }
        }
    }
}

/// All homomorphisms `p → Sym(degree)` in lexicographic order of their
/// image tuples.
pub fn enumerate_quotients(p: &Presentation, degree: usize) -> Result<QuotientSearch, PermError> {
    QuotientSearch::new(p, degree)
}

/// Runs [`QuotientSearch`] for degrees `1, 2, …, max_degree` in turn.
#[derive(Debug, Clone)]
pub struct QuotientLadder {
    presentation: Presentation,
    max_degree: usize,
    current: QuotientSearch,
}

impl QuotientLadder {
    pub fn new(p: &Presentation, max_degree: usize) -> Result<Self, PermError> {
        Ok(QuotientLadder {
            presentation: p.clone(),
            max_degree,
            current: QuotientSearch::new(p, 1)?,
        })
    }

    pub fn degree(&self) -> usize {
        self.current.degree()
    }

    pub fn step(&mut self) -> SearchStep {
        match self.current.step() {
            SearchStep::Exhausted if self.current.degree() < self.max_degree => {
                let next = self.current.degree() + 1;
                self.current = QuotientSearch::new(&self.presentation, next).expect("positive degree");
                SearchStep::Searching
            }
            other => other,
        }
    }
}

impl Iterator for QuotientLadder {
    type Item = PermRep;

    fn next(&mut self) -> Option<PermRep> {
        loop {
            match self.step() {
                SearchStep::Found(rep) => return Some(rep),
                SearchStep::Searching => continue,
                SearchStep::Exhausted => return None,
            }
        }
    }
}
