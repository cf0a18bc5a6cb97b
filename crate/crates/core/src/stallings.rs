//! Stallings subgroup graphs for finitely generated subgroups of free groups.
//!
//! A [`SubgroupGraph`] stores, for every generator, a partial injection on
//! the vertex set (forward and backward tables). Graphs produced here are
//! folded, trimmed to the core, and renumbered breadth-first from the
//! basepoint, so two graphs of the same subgroup compare equal.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::words::{Alphabet, Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StallingsError {
    #[error("word is not in the finite-index completion")]
    NotInCompletion,
    #[error("word uses generator {0} outside the graph's alphabet")]
    AlphabetMismatch(usize),
}

/// Index of a subgroup in the ambient free group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Index {
    Finite(usize),
    Infinite,
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Index::Finite(n) => write!(f, "{n}"),
            Index::Infinite => f.write_str("infinite"),
        }
    }
}

/// Folded core graph with basepoint 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubgroupGraph {
    rank: usize,
    vertices: usize,
    // forward[g][v] = target of the g-edge leaving v
    forward: Vec<Vec<Option<usize>>>,
    backward: Vec<Vec<Option<usize>>>,
}

impl SubgroupGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn basepoint(&self) -> usize {
        0
    }

    pub fn edge_count(&self) -> usize {
        self.forward.iter().flatten().filter(|t| t.is_some()).count()
    }

    /// Edges `(source, generator, target)` in source-then-generator order.
    pub fn edges(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for v in 0..self.vertex_count() {
            for g in 0..self.rank {
                if let Some(t) = self.forward[g][v] {
                    out.push((v, g, t));
                }
            }
        }
        out
    }

    /// Follows a letter from `v`, if the edge exists.
    pub fn step(&self, v: usize, l: Letter) -> Option<usize> {
        let table = if l.is_inverse() {
            &self.backward
        } else {
            &self.forward
        };
        table.get(l.generator())?.get(v).copied().flatten()
    }

    /// Endpoint of the path reading `w` from `start`.
    pub fn trace(&self, start: usize, w: &Word) -> Option<usize> {
        w.letters().iter().try_fold(start, |v, &l| self.step(v, l))
    }

    /// Free rank of the subgroup, `E − V + 1`.
    pub fn subgroup_rank(&self) -> usize {
        self.edge_count() + 1 - self.vertex_count()
    }

    /// One line per edge, `v --letter--> w`, preceded by the basepoint.
    pub fn dump(&self, alphabet: &Alphabet) -> String {
        let mut out = format!("basepoint {}\n", self.basepoint());
        for (v, g, t) in self.edges() {
            out.push_str(&format!("{v} --{}--> {t}\n", alphabet.name(g)));
        }
        out
    }

    fn is_complete(&self) -> bool {
        self.forward.iter().flatten().all(Option::is_some)
    }
}

/// Union-find folding workspace. Edges live only on representative vertices.
struct Folder {
    rank: usize,
    parent: Vec<usize>,
    forward: Vec<Vec<Option<usize>>>,
    backward: Vec<Vec<Option<usize>>>,
    pending: Vec<(usize, usize)>,
}

impl Folder {
    fn new(rank: usize) -> Self {
        Folder {
            rank,
            parent: Vec::new(),
            forward: vec![Vec::new(); rank],
            backward: vec![Vec::new(); rank],
            pending: Vec::new(),
        }
    }

    fn add_vertex(&mut self) -> usize {
        let v = self.parent.len();
        self.parent.push(v);
        for g in 0..self.rank {
            self.forward[g].push(None);
            self.backward[g].push(None);
        }
        v
    }

    fn find(&mut self, v: usize) -> usize {
        let mut root = v;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut v = v;
        while self.parent[v] != root {
            let next = self.parent[v];
            self.parent[v] = root;
            v = next;
        }
        root
    }

    /// Adds `u --g--> v`, queueing identifications instead of duplicating
    /// an edge label at either endpoint.
    fn add_edge(&mut self, u: usize, g: usize, v: usize) {
        let (u, v) = (self.find(u), self.find(v));
        if let Some(w) = self.forward[g][u] {
            self.pending.push((w, v));
        } else if let Some(w) = self.backward[g][v] {
            self.pending.push((w, u));
        } else {
            self.forward[g][u] = Some(v);
            self.backward[g][v] = Some(u);
        }
    }

    fn fold(&mut self) {
        while let Some((a, b)) = self.pending.pop() {
            let (a, b) = (self.find(a), self.find(b));
            if a == b {
                continue;
            }
            let (keep, gone) = (a.min(b), a.max(b));
            self.parent[gone] = keep;
            let mut moved = Vec::new();
            for g in 0..self.rank {
                if let Some(t) = self.forward[g][gone].take() {
                    self.backward[g][t] = None;
                    moved.push((gone, g, t));
                }
                if let Some(s) = self.backward[g][gone].take() {
                    self.forward[g][s] = None;
                    moved.push((s, g, gone));
                }
            }
            for (s, g, t) in moved {
                self.add_edge(s, g, t);
            }
        }
    }

    /// Removes non-basepoint vertices of degree ≤ 1 until none remain, then
    /// renumbers breadth-first from the basepoint.
    fn into_core(mut self, base: usize) -> SubgroupGraph {
        let base = self.find(base);
        let n = self.parent.len();
        let mut alive: Vec<bool> = (0..n).map(|v| self.parent[v] == v).collect();
        let degree = |f: &Folder, v: usize| -> usize {
            (0..f.rank)
                .map(|g| f.forward[g][v].is_some() as usize + f.backward[g][v].is_some() as usize)
                .sum()
        };
        let mut queue: Vec<usize> = (0..n).filter(|&v| alive[v] && v != base).collect();
        while let Some(v) = queue.pop() {
            if !alive[v] || v == base || degree(&self, v) > 1 {
                continue;
            }
            alive[v] = false;
            for g in 0..self.rank {
                if let Some(t) = self.forward[g][v].take() {
                    self.backward[g][t] = None;
                    queue.push(t);
                }
                if let Some(s) = self.backward[g][v].take() {
                    self.forward[g][s] = None;
                    queue.push(s);
                }
            }
        }
        renumber(self.rank, &self.forward, &self.backward, base)
    }
}

/// Breadth-first renumbering from `base`, visiting `g` then `g⁻¹` edges for
/// each generator in order. Unreachable vertices are dropped.
fn renumber(
    rank: usize,
    forward: &[Vec<Option<usize>>],
    backward: &[Vec<Option<usize>>],
    base: usize,
) -> SubgroupGraph {
    let n = forward.first().map_or(base + 1, Vec::len);
    let mut order = vec![usize::MAX; n];
    let mut seen = Vec::new();
    let mut queue = VecDeque::from([base]);
    order[base] = 0;
    seen.push(base);
    while let Some(v) = queue.pop_front() {
        for g in 0..rank {
            for t in [forward[g][v], backward[g][v]].into_iter().flatten() {
                if order[t] == usize::MAX {
                    order[t] = seen.len();
                    seen.push(t);
                    queue.push_back(t);
                }
            }
        }
    }
    let m = seen.len();
    let mut f = vec![vec![None; m]; rank];
    let mut b = vec![vec![None; m]; rank];
    for (new, &old) in seen.iter().enumerate() {
        for g in 0..rank {
            if let Some(t) = forward[g][old] {
                f[g][new] = Some(order[t]);
                b[g][order[t]] = Some(new);
            }
        }
    }
    SubgroupGraph {
        rank,
        vertices: m,
        forward: f,
        backward: b,
    }
}

/// Folds the wedge of generator loops at a basepoint into the core graph of
/// `⟨generators⟩ ≤ F(alphabet)`.
pub fn build_graph(generators: &[Word], alphabet: &Alphabet) -> Result<SubgroupGraph, StallingsError> {
    let rank = alphabet.rank();
    let mut folder = Folder::new(rank);
    let base = folder.add_vertex();
    for w in generators {
        if let Some(l) = w.letters().iter().find(|l| l.generator() >= rank) {
            return Err(StallingsError::AlphabetMismatch(l.generator()));
        }
        let letters = w.letters();
        let mut v = base;
        for (i, &l) in letters.iter().enumerate() {
            let t = if i + 1 == letters.len() {
                base
            } else {
                folder.add_vertex()
            };
            if l.is_inverse() {
                folder.add_edge(t, l.generator(), v);
            } else {
                folder.add_edge(v, l.generator(), t);
            }
            v = t;
        }
    }
    folder.fold();
    Ok(folder.into_core(base))
}

/// Whether `w` reads a closed loop at the basepoint, i.e. `w ∈ H`.
pub fn graph_member(g: &SubgroupGraph, w: &Word) -> bool {
    g.trace(g.basepoint(), w) == Some(g.basepoint())
}

pub fn graph_index(g: &SubgroupGraph) -> Index {
    if g.is_complete() {
        Index::Finite(g.vertex_count())
    } else {
        Index::Infinite
    }
}

/// Result of Marshall Hall completion: a finite-index `V ⊇ H` on the same
/// vertex set, with a free basis of `V` split into a basis of `H` and a
/// complement. Killing the complement gives the retraction `V → H`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HallCompletion {
    core: SubgroupGraph,
    completed: SubgroupGraph,
    // BFS tree path from the basepoint to each vertex
    tree_paths: Vec<Word>,
    tree_edges: Vec<Vec<bool>>,
    subgroup_edges: Vec<Vec<bool>>,
    subgroup_basis: Vec<Word>,
    complement_basis: Vec<Word>,
}

impl HallCompletion {
    pub fn graph(&self) -> &SubgroupGraph {
        &self.completed
    }

    pub fn core(&self) -> &SubgroupGraph {
        &self.core
    }

    pub fn index(&self) -> usize {
        self.completed.vertex_count()
    }

    /// Free basis of `H` read off the core graph.
    pub fn subgroup_basis(&self) -> &[Word] {
        &self.subgroup_basis
    }

    /// Basis elements of `V` added by the completion.
    pub fn complement_basis(&self) -> &[Word] {
        &self.complement_basis
    }

    /// Full basis of `V`: the `H` basis followed by the complement.
    pub fn basis(&self) -> Vec<Word> {
        self.subgroup_basis
            .iter()
            .chain(&self.complement_basis)
            .cloned()
            .collect()
    }

    pub fn contains(&self, w: &Word) -> bool {
        graph_member(&self.completed, w)
    }

    /// The retraction `ρ: V → H`. Reads `w` in the completed graph and keeps
    /// only the basis elements of `H` crossed along the way.
    pub fn retract(&self, w: &Word) -> Result<Word, StallingsError> {
        let mut v = self.completed.basepoint();
        let mut letters = Vec::new();
        for &l in w.letters() {
            let t = self
                .completed
                .step(v, l)
                .ok_or(StallingsError::NotInCompletion)?;
            let (src, dst) = if l.is_inverse() { (t, v) } else { (v, t) };
            let g = l.generator();
            if !self.tree_edges[g][src] && self.subgroup_edges[g][src] {
                let element = self.edge_word(src, g, dst);
                if l.is_inverse() {
                    letters.extend(element.inverse().letters().iter().copied());
                } else {
                    letters.extend(element.letters().iter().copied());
                }
            }
            v = t;
        }
        if v != self.completed.basepoint() {
            return Err(StallingsError::NotInCompletion);
        }
        Ok(Word::from_letters(letters))
    }

    fn edge_word(&self, src: usize, g: usize, dst: usize) -> Word {
        let mut letters = self.tree_paths[src].letters().to_vec();
        letters.push(Letter::pos(g));
        letters.extend(self.tree_paths[dst].inverse().letters().iter().copied());
        Word::from_letters(letters)
    }
}

/// Extends every generator's partial permutation to a total one by pairing
/// vertices missing an outgoing edge with vertices missing an incoming edge,
/// both in increasing vertex order.
pub fn hall_completion(g: &SubgroupGraph) -> HallCompletion {
    let n = g.vertex_count();
    let mut forward = g.forward.clone();
    let mut backward = g.backward.clone();
    for gen in 0..g.rank {
        let sources: Vec<usize> = (0..n).filter(|&v| forward[gen][v].is_none()).collect();
        let targets: Vec<usize> = (0..n).filter(|&v| backward[gen][v].is_none()).collect();
        for (&s, &t) in sources.iter().zip(&targets) {
            forward[gen][s] = Some(t);
            backward[gen][t] = Some(s);
        }
    }
    let completed = SubgroupGraph {
        rank: g.rank,
        vertices: n,
        forward,
        backward,
    };

    // spanning tree of the core; it also spans the completion
    let mut tree_paths = vec![Word::empty(); n];
    let mut tree_edges = vec![vec![false; n]; g.rank];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        #[allow(clippy::needless_range_loop)]
        for gen in 0..g.rank {
            if let Some(t) = g.forward[gen][v] {
                if !seen[t] {
                    seen[t] = true;
                    tree_edges[gen][v] = true;
                    tree_paths[t] = tree_paths[v].concat(&Word::letter(Letter::pos(gen)));
                    queue.push_back(t);
                }
            }
            if let Some(s) = g.backward[gen][v] {
                if !seen[s] {
                    seen[s] = true;
                    tree_edges[gen][s] = true;
                    tree_paths[s] = tree_paths[v].concat(&Word::letter(Letter::neg(gen)));
                    queue.push_back(s);
                }
            }
        }
    }

    let subgroup_edges: Vec<Vec<bool>> = (0..g.rank)
        .map(|gen| (0..n).map(|v| g.forward[gen][v].is_some()).collect())
        .collect();
    let mut completion = HallCompletion {
        core: g.clone(),
        completed,
        tree_paths,
        tree_edges,
        subgroup_edges,
        subgroup_basis: Vec::new(),
        complement_basis: Vec::new(),
    };
    for (src, gen, dst) in completion.completed.edges() {
        if completion.tree_edges[gen][src] {
            continue;
        }
        let w = completion.edge_word(src, gen, dst);
        if completion.subgroup_edges[gen][src] {
            completion.subgroup_basis.push(w);
        } else {
            completion.complement_basis.push(w);
        }
    }
    completion
}

/// `ρ(w)` for the Hall completion of `g`.
pub fn virtual_retraction(g: &SubgroupGraph, w: &Word) -> Result<Word, StallingsError> {
    hall_completion(g).retract(w)
}
