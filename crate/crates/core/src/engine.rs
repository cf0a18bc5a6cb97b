//! Dovetailed subgroup membership search and certificate checking.
//!
//! [`solve`] alternates unit steps of two searches:
//!
//! * the quotient search walks homomorphisms into `Sym(1)`, `Sym(2)`, … up
//!   to the degree cap and stops at the first one where the image of `g`
//!   lies outside the image of `⟨S⟩`;
//! * the relator search walks the `(n, m)` grid of subgroup words `u_n` and
//!   relator products `p_m` along anti-diagonals and stops when `g⁻¹u_n`
//!   freely equals `p_m`.
//!
//! Both verdicts are sound for every finite presentation. Whether the
//! search terminates depends on the group: a non-member is only found if
//! some finite quotient separates it.

use std::sync::atomic::{AtomicBool, Ordering};

use thiserror::Error;

pub use crate::certificate::{Budget, Certificate, CertificateError, RepData, Verdict};
use crate::permgroups::{schreier_sims, PermGroup, PermRep, Permutation, QuotientLadder, SearchStep};
use crate::presentations::{direct_product, GeneratingSet, Presentation, PresentationError};
use crate::relator_search::{witness_check, ConjugateProduct, RelatorProducts, SubgroupWord, SubgroupWords};
use crate::words::{concat, invert, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Alphabet(#[from] WordError),
    #[error("budget fields must all be positive")]
    InvalidBudget,
    #[error("the two words are freely equal; nothing separates them")]
    NotSeparable,
    #[error(transparent)]
    Presentation(#[from] PresentationError),
}

impl Budget {
    pub fn new(max_degree: usize, max_steps: u64, max_product_size: usize) -> Result<Self, EngineError> {
        let b = Budget {
            max_degree,
            max_steps,
            max_product_size,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.max_degree == 0 || self.max_steps == 0 || self.max_product_size == 0 {
            return Err(EngineError::InvalidBudget);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Process {
    Quotients,
    Relators,
}

/// Strict alternation: even steps go to the quotient search, odd steps to
/// the relator search. A process that has run out of work idles through
/// its steps, so the step-to-process map never depends on the budget.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Schedule;

impl Schedule {
    pub fn process_at(&self, step: u64) -> Process {
        if step.is_multiple_of(2) {
            Process::Quotients
        } else {
            Process::Relators
        }
    }

    /// Every window of this many consecutive steps serves both processes.
    pub fn period(&self) -> u64 {
        2
    }
}

/// Counters from one [`solve`] run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub steps: u64,
    pub quotient_steps: u64,
    pub relator_steps: u64,
    pub representations_checked: u64,
    pub pairs_tested: u64,
    pub last_degree: usize,
    pub quotients_exhausted: bool,
    pub relators_exhausted: bool,
}

struct QuotientProcess<'a> {
    ladder: QuotientLadder,
    subgroup: &'a GeneratingSet,
    g: &'a Word,
    exhausted: bool,
    checked: u64,
}

impl<'a> QuotientProcess<'a> {
    fn new(p: &Presentation, s: &'a GeneratingSet, g: &'a Word, max_degree: usize) -> Self {
        QuotientProcess {
            ladder: QuotientLadder::new(p, max_degree).expect("positive degree"),
            subgroup: s,
            g,
            exhausted: false,
            checked: 0,
        }
    }

    fn step(&mut self) -> Option<PermRep> {
        if self.exhausted {
            return None;
        }
        match self.ladder.step() {
            SearchStep::Found(rep) => {
                self.checked += 1;
                separates(&rep, self.subgroup, self.g).then_some(rep)
            }
            SearchStep::Searching => None,
            SearchStep::Exhausted => {
                self.exhausted = true;
                None
            }
        }
    }
}

/// Whether `rep(g)` lies outside `⟨rep(s) : s ∈ S⟩`.
fn separates(rep: &PermRep, s: &GeneratingSet, g: &Word) -> bool {
    let image = rep.evaluate(g);
    if image.is_identity() {
        return false;
    }
    let gens: Vec<Permutation> = s.generators().iter().map(|w| rep.evaluate(w)).collect();
    let group: PermGroup = schreier_sims(rep.degree(), &gens).expect("same degree");
    !group.contains(&image).expect("same degree")
}

/// Walks `(n, m)` pairs by anti-diagonal `n + m = d`, `n` ascending.
struct RelatorProcess<'a> {
    p: &'a Presentation,
    g_inv: Word,
    words: SubgroupWords,
    products: RelatorProducts,
    // g⁻¹ u_n for the subgroup words seen so far
    targets: Vec<(SubgroupWord, Word)>,
    values: Vec<(ConjugateProduct, Word)>,
    words_done: bool,
    products_done: bool,
    diagonal: usize,
    n: usize,
    tested: u64,
}

impl<'a> RelatorProcess<'a> {
    fn new(p: &'a Presentation, s: &GeneratingSet, g: &Word, max_size: usize) -> Self {
        RelatorProcess {
            p,
            g_inv: invert(g),
            words: SubgroupWords::new(s),
            products: RelatorProducts::new(p, Some(max_size)),
            targets: Vec::new(),
            values: Vec::new(),
            words_done: false,
            products_done: false,
            diagonal: 0,
            n: 0,
            tested: 0,
        }
    }

    fn has_word(&mut self, n: usize) -> bool {
        while self.targets.len() <= n && !self.words_done {
            match self.words.next() {
                Some(u) => {
                    let t = concat(&self.g_inv, &u.value);
                    self.targets.push((u, t));
                }
                None => self.words_done = true,
            }
        }
        n < self.targets.len()
    }

    fn has_product(&mut self, m: usize) -> bool {
        while self.values.len() <= m && !self.products_done {
            match self.products.next() {
                Some(prod) => {
                    let v = prod.value(self.p).expect("enumerated indices are valid");
                    self.values.push((prod, v));
                }
                None => self.products_done = true,
            }
        }
        m < self.values.len()
    }

    fn exhausted(&self) -> bool {
        self.words_done
            && self.products_done
            && self.diagonal + 2 > self.targets.len() + self.values.len()
    }

    fn step(&mut self) -> Option<(SubgroupWord, ConjugateProduct)> {
        let (n, m) = (self.n, self.diagonal - self.n);
        if self.n == self.diagonal {
            self.diagonal += 1;
            self.n = 0;
        } else {
            self.n += 1;
        }
        if !self.has_word(n) || !self.has_product(m) {
            return None;
        }
        self.tested += 1;
        let (u, target) = &self.targets[n];
        let (prod, value) = &self.values[m];
        (target == value).then(|| (u.clone(), prod.clone()))
    }
}

fn prepare(p: &Presentation, s: &GeneratingSet, g: &Word, budget: &Budget) -> Result<(), EngineError> {
    budget.validate()?;
    p.alphabet().check_word(g)?;
    for w in s.generators() {
        p.alphabet().check_word(w)?;
    }
    Ok(())
}

fn member(u: SubgroupWord, product: ConjugateProduct) -> Certificate {
    Certificate::Member {
        subgroup_word_indices: u.indices,
        product,
    }
}

fn nonmember(rep: &PermRep) -> Certificate {
    Certificate::NonMember {
        perm_rep: RepData::from_rep(rep),
    }
}

/// Decides `g ∈ ⟨S⟩` in `⟨A | R⟩` within the budget, deterministically.
pub fn solve(p: &Presentation, s: &GeneratingSet, g: &Word, budget: &Budget) -> Result<Certificate, EngineError> {
    solve_with_stats(p, s, g, budget).map(|(c, _)| c)
}

pub fn solve_with_stats(
    p: &Presentation,
    s: &GeneratingSet,
    g: &Word,
    budget: &Budget,
) -> Result<(Certificate, SolveStats), EngineError> {
    prepare(p, s, g, budget)?;
    let schedule = Schedule;
    let mut quotients = QuotientProcess::new(p, s, g, budget.max_degree);
    let mut relators = RelatorProcess::new(p, s, g, budget.max_product_size);
    let mut stats = SolveStats::default();
    let finish = |stats: &mut SolveStats, q: &QuotientProcess, r: &RelatorProcess| {
        stats.representations_checked = q.checked;
        stats.pairs_tested = r.tested;
        stats.last_degree = q.ladder.degree();
        stats.quotients_exhausted = q.exhausted;
        stats.relators_exhausted = r.exhausted();
    };
    for step in 0..budget.max_steps {
        stats.steps = step + 1;
        match schedule.process_at(step) {
            Process::Quotients => {
                stats.quotient_steps += 1;
                if let Some(rep) = quotients.step() {
                    finish(&mut stats, &quotients, &relators);
                    return Ok((nonmember(&rep), stats));
                }
            }
            Process::Relators => {
                stats.relator_steps += 1;
                if let Some((u, prod)) = relators.step() {
                    finish(&mut stats, &quotients, &relators);
                    return Ok((member(u, prod), stats));
                }
            }
        }
        if quotients.exhausted && relators.exhausted() {
            break;
        }
    }
    finish(&mut stats, &quotients, &relators);
    Ok((Certificate::Undecided { budget: *budget }, stats))
}

/// Runs the two searches on separate threads, each with half the step
/// budget, and returns whichever verdict arrives first. Sound, but which
/// certificate wins is not deterministic.
pub fn solve_concurrent(
    p: &Presentation,
    s: &GeneratingSet,
    g: &Word,
    budget: &Budget,
) -> Result<Certificate, EngineError> {
    prepare(p, s, g, budget)?;
    let stop = AtomicBool::new(false);
    let steps_each = budget.max_steps.div_ceil(2);
    let (a, b) = std::thread::scope(|scope| {
        let a = scope.spawn(|| {
            let mut q = QuotientProcess::new(p, s, g, budget.max_degree);
            for _ in 0..steps_each {
                if stop.load(Ordering::Relaxed) || q.exhausted {
                    return None;
                }
                if let Some(rep) = q.step() {
                    stop.store(true, Ordering::Relaxed);
                    return Some(nonmember(&rep));
                }
            }
            None
        });
        let b = scope.spawn(|| {
            let mut r = RelatorProcess::new(p, s, g, budget.max_product_size);
            for _ in 0..steps_each {
                if stop.load(Ordering::Relaxed) || r.exhausted() {
                    return None;
                }
                if let Some((u, prod)) = r.step() {
                    stop.store(true, Ordering::Relaxed);
                    return Some(member(u, prod));
                }
            }
            None
        });
        (a.join().expect("quotient thread"), b.join().expect("relator thread"))
    });
    Ok(a.or(b).unwrap_or(Certificate::Undecided { budget: *budget }))
}

/// Re-verifies a certificate from scratch using only word arithmetic and
/// Schreier-Sims. `Undecided` certificates are vacuously valid.
pub fn check_certificate(p: &Presentation, s: &GeneratingSet, g: &Word, cert: &Certificate) -> bool {
    if p.alphabet().check_word(g).is_err() {
        return false;
    }
    match cert {
        Certificate::Member {
            subgroup_word_indices,
            product,
        } => {
            if product
                .factors
                .iter()
                .any(|f| p.alphabet().check_word(&f.conjugator).is_err())
            {
                return false;
            }
            match SubgroupWord::from_indices(s, subgroup_word_indices.clone()) {
                Some(u) => witness_check(p, g, &u, product),
                None => false,
            }
        }
        Certificate::NonMember { perm_rep } => {
            let images: Result<Vec<Permutation>, _> = perm_rep
                .images
                .iter()
                .map(|img| Permutation::from_images(img.clone()))
                .collect();
            let Ok(images) = images else { return false };
            let Ok(rep) = PermRep::new(p, perm_rep.degree, images) else {
                return false;
            };
            separates(&rep, s, g)
        }
        Certificate::Undecided { .. } => true,
    }
}

/// Parses and checks in one go. `Err` means the text is not a certificate;
/// `Ok(false)` means it is one but does not verify.
pub fn check_certificate_text(
    p: &Presentation,
    s: &GeneratingSet,
    g: &Word,
    text: &str,
) -> Result<bool, CertificateError> {
    let cert = Certificate::from_json(text, p)?;
    Ok(check_certificate(p, s, g, &cert))
}

/// Extends each generator's partial injection to a permutation by pairing
/// points without an image with points without a preimage, both in
/// increasing order.
fn complete_partial(partial: &[Option<usize>]) -> Permutation {
    let n = partial.len();
    let mut has_pre = vec![false; n];
    for y in partial.iter().flatten() {
        has_pre[*y] = true;
    }
    let mut free_targets = (0..n).filter(|&y| !has_pre[y]);
    let images = partial
        .iter()
        .map(|t| t.unwrap_or_else(|| free_targets.next().expect("as many gaps as free targets")))
        .collect();
    Permutation::from_images(images).expect("completed injection")
}

/// A representation of the free group `A` in which `alpha1` and `alpha2`
/// have different images: the reduced word `w = alpha1⁻¹alpha2` is laid out
/// along a path `0 → 1 → … → |w|`, each generator's partial map is read off
/// the path, then completed. `w` moves point 0 to `|w|`.
pub fn separate_diagonal(a: &Presentation, alpha1: &Word, alpha2: &Word) -> Result<PermRep, EngineError> {
    if !a.is_free() {
        return Err(PresentationError::NotFree.into());
    }
    a.alphabet().check_word(alpha1)?;
    a.alphabet().check_word(alpha2)?;
    let w = concat(&invert(alpha1), alpha2);
    if w.is_empty() {
        return Err(EngineError::NotSeparable);
    }
    let degree = w.len() + 1;
    let mut partial = vec![vec![None; degree]; a.rank()];
    for (i, l) in w.letters().iter().enumerate() {
        let (src, dst) = if l.is_inverse() { (i + 1, i) } else { (i, i + 1) };
        partial[l.generator()][src] = Some(dst);
    }
    let images = partial.iter().map(|p| complete_partial(p)).collect();
    Ok(PermRep::new(a, degree, images).expect("free presentation"))
}

/// `φ × φ` on `A × A` for the separating `φ` of `g1` and `g2`, acting on
/// two disjoint blocks of points. The image of `(g1, g2)` lies outside the
/// image of the diagonal.
pub fn separate_from_product_diagonal(a: &Presentation, g1: &Word, g2: &Word) -> Result<(Presentation, PermRep), EngineError> {
    let phi = separate_diagonal(a, g1, g2)?;
    let product = direct_product(&[a.clone(), a.clone()])?;
    let d = phi.degree();
    let block = |img: &Permutation, offset: usize| {
        let images = (0..2 * d)
            .map(|x| {
                if (offset..offset + d).contains(&x) {
                    img.apply(x - offset) + offset
                } else {
                    x
                }
            })
            .collect();
        Permutation::from_images(images).expect("block permutation")
    };
    let mut images: Vec<Permutation> = phi.images().iter().map(|img| block(img, 0)).collect();
    images.extend(phi.images().iter().map(|img| block(img, d)));
    let combined = product.combined().clone();
    let rep = PermRep::new(&combined, 2 * d, images).expect("blocks commute");
    Ok((combined, rep))
}
