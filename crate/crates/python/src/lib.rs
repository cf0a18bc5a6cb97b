//! Python bindings. Words cross the boundary as strings in the usual word
//! grammar ("a b^-1 a^2", "1" for the identity).

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use fpmember_core::bs_oracle::BsGroup;
use fpmember_core::certificate::Certificate;
use fpmember_core::engine::{check_certificate, solve as core_solve, Budget};
use fpmember_core::permgroups::enumerate_quotients as core_quotients;
use fpmember_core::presentations::fiber_product_subgroup;
use fpmember_core::stallings::{self, graph_index, hall_completion, HallCompletion, Index};
use fpmember_core::{Alphabet, GeneratingSet, Word};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A finite presentation `⟨gens | relators⟩`.
#[pyclass(module = "fpmember", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Presentation {
    inner: fpmember_core::Presentation,
}

impl Presentation {
    fn word(&self, text: &str) -> PyResult<Word> {
        self.inner.parse_word(text).map_err(value_error)
    }

    fn subgroup(&self, gens: Vec<String>) -> PyResult<GeneratingSet> {
        let words = gens.iter().map(|g| self.word(g)).collect::<PyResult<Vec<_>>>()?;
        GeneratingSet::new(&self.inner, words).map_err(value_error)
    }
}

#[pymethods]
impl Presentation {
    #[new]
    #[pyo3(signature = (generators, relators = Vec::new()))]
    fn new(generators: Vec<String>, relators: Vec<String>) -> PyResult<Self> {
        let names: Vec<&str> = generators.iter().map(String::as_str).collect();
        let rels: Vec<&str> = relators.iter().map(String::as_str).collect();
        let inner = fpmember_core::Presentation::from_strs(&names, &rels).map_err(value_error)?;
        Ok(Presentation { inner })
    }

    /// Parses the "gens ... / rel WORD" text format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let inner = fpmember_core::Presentation::parse(text)
            .map_err(|e| value_error(format!("{}:{}: {}", e.line, e.column, e.message)))?;
        Ok(Presentation { inner })
    }

    #[getter]
    fn generators(&self) -> Vec<String> {
        self.inner.alphabet().names().to_vec()
    }

    #[getter]
    fn relators(&self) -> Vec<String> {
        self.inner.relators().iter().map(|r| self.inner.print_word(r)).collect()
    }

    fn is_free(&self) -> bool {
        self.inner.is_free()
    }

    /// Free reduction of a word, printed back.
    fn reduce(&self, word: &str) -> PyResult<String> {
        Ok(self.inner.print_word(&self.word(word)?))
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn __repr__(&self) -> String {
        format!(
            "Presentation(generators={:?}, relators={:?})",
            self.generators(),
            self.relators()
        )
    }
}

/// The folded Stallings graph of a subgroup of a free group, with its
/// Marshall Hall completion.
#[pyclass(module = "fpmember", frozen)]
struct SubgroupGraph {
    alphabet: Alphabet,
    graph: stallings::SubgroupGraph,
    hall: HallCompletion,
}

#[pymethods]
impl SubgroupGraph {
    #[new]
    fn new(presentation: &Presentation, generators: Vec<String>) -> PyResult<Self> {
        if !presentation.inner.is_free() {
            return Err(value_error("free groups only"));
        }
        let words = generators
            .iter()
            .map(|g| presentation.word(g))
            .collect::<PyResult<Vec<_>>>()?;
        let alphabet = presentation.inner.alphabet().clone();
        let graph = stallings::build_graph(&words, &alphabet).map_err(value_error)?;
        let hall = hall_completion(&graph);
        Ok(SubgroupGraph { alphabet, graph, hall })
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.graph.subgroup_rank()
    }

    /// Index in the free group, or `None` when infinite.
    #[getter]
    fn index(&self) -> Option<usize> {
        match graph_index(&self.graph) {
            Index::Finite(n) => Some(n),
            Index::Infinite => None,
        }
    }

    #[getter]
    fn completion_index(&self) -> usize {
        self.hall.index()
    }

    fn contains(&self, word: &str) -> PyResult<bool> {
        let w = self.alphabet.parse_word(word).map_err(value_error)?;
        Ok(stallings::graph_member(&self.graph, &w))
    }

    /// Image under the retraction of the completion onto the subgroup.
    fn retract(&self, word: &str) -> PyResult<String> {
        let w = self.alphabet.parse_word(word).map_err(value_error)?;
        let image = self.hall.retract(&w).map_err(value_error)?;
        Ok(self.alphabet.print_word(&image))
    }

    fn dump(&self) -> String {
        self.graph.dump(&self.alphabet)
    }
}

/// Returns `(verdict, certificate_json)`; verdict is "member",
/// "nonmember" or "undecided".
#[pyfunction]
#[pyo3(signature = (presentation, subgroup, word, max_degree = 4, max_steps = 1_000_000, max_product_size = 12))]
fn solve(
    py: Python<'_>,
    presentation: &Presentation,
    subgroup: Vec<String>,
    word: &str,
    max_degree: usize,
    max_steps: u64,
    max_product_size: usize,
) -> PyResult<(String, String)> {
    let s = presentation.subgroup(subgroup)?;
    let g = presentation.word(word)?;
    let budget = Budget::new(max_degree, max_steps, max_product_size).map_err(value_error)?;
    let p = &presentation.inner;
    let cert = py
        .detach(|| core_solve(p, &s, &g, &budget))
        .map_err(value_error)?;
    Ok((cert.verdict().as_str().to_string(), cert.to_json(p)))
}

/// Whether a certificate verifies; raises ValueError if it does not parse.
#[pyfunction]
fn check(presentation: &Presentation, subgroup: Vec<String>, word: &str, certificate: &str) -> PyResult<bool> {
    let s = presentation.subgroup(subgroup)?;
    let g = presentation.word(word)?;
    let cert = Certificate::from_json(certificate, &presentation.inner).map_err(value_error)?;
    Ok(check_certificate(&presentation.inner, &s, &g, &cert))
}

/// `(F × F, generators)` for the preimage of the diagonal under the
/// quotient `domain → target` taken in each coordinate.
#[pyfunction]
fn fiber_product(domain: &Presentation, target: &Presentation) -> PyResult<(Presentation, Vec<String>)> {
    let (product, s) = fiber_product_subgroup(&domain.inner, &target.inner).map_err(value_error)?;
    let combined = product.combined().clone();
    let gens = s.generators().iter().map(|w| combined.print_word(w)).collect();
    Ok((Presentation { inner: combined }, gens))
}

/// Word problem in `BS(m, n) = ⟨a, b | a^-1 b^m a = b^n⟩`.
#[pyfunction]
fn bs_is_identity(m: i64, n: i64, word: &str) -> PyResult<bool> {
    let group = BsGroup::new(m, n).map_err(value_error)?;
    let w = Alphabet::new(["a", "b"])
        .expect("valid names")
        .parse_word(word)
        .map_err(value_error)?;
    Ok(group.is_identity(&w))
}

/// Homomorphisms into `Sym(degree)` as lists of 0-based image lists, in
/// search order; at most `limit` of them when given.
#[pyfunction]
#[pyo3(signature = (presentation, degree, limit = None))]
fn enumerate_quotients(presentation: &Presentation, degree: usize, limit: Option<usize>) -> PyResult<Vec<Vec<Vec<usize>>>> {
    let search = core_quotients(&presentation.inner, degree).map_err(value_error)?;
    Ok(search
        .take(limit.unwrap_or(usize::MAX))
        .map(|rep| rep.images().iter().map(|p| p.images().to_vec()).collect())
        .collect())
}

#[pymodule]
fn fpmember(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Presentation>()?;
    m.add_class::<SubgroupGraph>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(fiber_product, m)?)?;
    m.add_function(wrap_pyfunction!(bs_is_identity, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_quotients, m)?)?;
    Ok(())
}
