//! Subgroup membership in finitely presented groups.
//!
//! The [`engine`] dovetails two semi-deciders: a search through finite
//! quotients for a permutation representation separating `g` from `⟨S⟩`,
//! and a search for `u ∈ ⟨S⟩` with `g⁻¹u` a product of conjugates of
//! relators. Either outcome is emitted as a [`certificate::Certificate`]
//! that [`engine::check_certificate`] re-verifies from scratch.
//!
//! Supporting modules cover free-group words, presentations and product
//! constructions, Stallings graphs with Marshall Hall completion,
//! Schreier-Sims, and an exact word-problem oracle for Baumslag-Solitar
//! groups.

pub mod bs_oracle;
pub mod certificate;
pub mod engine;
pub mod permgroups;
pub mod presentations;
pub mod relator_search;
pub mod stallings;
pub mod words;

pub use engine::{check_certificate, solve, Budget};
pub use presentations::{GeneratingSet, Presentation, ProductPresentation};
pub use words::{Alphabet, Letter, Word};
