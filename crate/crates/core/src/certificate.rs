//! Verdict certificates and their JSON wire format.
//!
//! ```json
//! {
//!   "verdict": "member",
//!   "subgroup_word_indices": [-1],
//!   "product_factors": [{ "conjugator": "1", "relator_index": 0, "sign": -1 }],
//!   "perm_rep": null,
//!   "budget": null
//! }
//! ```
//!
//! Field order is fixed. Subgroup word indices are 1-based and signed,
//! relator indices 0-based, conjugators use the word grammar, and
//! permutation images are 0-based one-line notation. Exactly one of the
//! member payload (indices plus factors), `perm_rep`, or `budget` is
//! present, matching the verdict.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::permgroups::PermRep;
use crate::presentations::Presentation;
use crate::relator_search::{ConjugateProduct, Factor};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("malformed certificate: {0}")]
    Malformed(String),
}

fn malformed(msg: impl Into<String>) -> CertificateError {
    CertificateError::Malformed(msg.into())
}

/// Work limits for [`crate::engine::solve`]. All fields are positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budget {
    pub max_degree: usize,
    pub max_steps: u64,
    pub max_product_size: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_degree: 4,
            max_steps: 1_000_000,
            max_product_size: 12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Member,
    NonMember,
    Undecided,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Member => "member",
            Verdict::NonMember => "nonmember",
            Verdict::Undecided => "undecided",
        }
    }
}

/// Degree and 0-based one-line images of each generator, unverified.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepData {
    pub degree: usize,
    pub images: Vec<Vec<usize>>,
}

impl RepData {
    pub fn from_rep(rep: &PermRep) -> Self {
        RepData {
            degree: rep.degree(),
            images: rep.images().iter().map(|p| p.images().to_vec()).collect(),
        }
    }

    /// Pretty JSON object `{"degree": .., "images": [..]}` with a trailing
    /// newline.
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("serializable");
        text.push('\n');
        text
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Certificate {
    Member {
        subgroup_word_indices: Vec<i64>,
        product: ConjugateProduct,
    },
    NonMember {
        perm_rep: RepData,
    },
    Undecided {
        budget: Budget,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Wire {
    verdict: String,
    subgroup_word_indices: Option<Vec<i64>>,
    product_factors: Option<Vec<WireFactor>>,
    perm_rep: Option<RepData>,
    budget: Option<Budget>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireFactor {
    conjugator: String,
    relator_index: usize,
    sign: i8,
}

impl Certificate {
    pub fn verdict(&self) -> Verdict {
        match self {
            Certificate::Member { .. } => Verdict::Member,
            Certificate::NonMember { .. } => Verdict::NonMember,
            Certificate::Undecided { .. } => Verdict::Undecided,
        }
    }

    /// Canonical text: pretty-printed JSON with a trailing newline.
    pub fn to_json(&self, p: &Presentation) -> String {
        let mut wire = Wire {
            verdict: self.verdict().as_str().to_string(),
            subgroup_word_indices: None,
            product_factors: None,
            perm_rep: None,
            budget: None,
        };
        match self {
            Certificate::Member {
                subgroup_word_indices,
                product,
            } => {
                wire.subgroup_word_indices = Some(subgroup_word_indices.clone());
                wire.product_factors = Some(
                    product
                        .factors
                        .iter()
                        .map(|f| WireFactor {
                            conjugator: p.print_word(&f.conjugator),
                            relator_index: f.relator,
                            sign: f.sign,
                        })
                        .collect(),
                );
            }
            Certificate::NonMember { perm_rep } => wire.perm_rep = Some(perm_rep.clone()),
            Certificate::Undecided { budget } => wire.budget = Some(*budget),
        }
        let mut text = serde_json::to_string_pretty(&wire).expect("serializable");
        text.push('\n');
        text
    }

    /// Parses the wire format. Conjugators are read with `p`'s alphabet.
    /// Structural problems (unknown verdict, payload not matching the
    /// verdict, bad signs, non-bijective images) are errors; semantic ones
    /// are left to the checker.
    pub fn from_json(text: &str, p: &Presentation) -> Result<Certificate, CertificateError> {
        let wire: Wire = serde_json::from_str(text).map_err(|e| malformed(e.to_string()))?;
        let Wire {
            verdict,
            subgroup_word_indices,
            product_factors,
            perm_rep,
            budget,
        } = wire;
        match verdict.as_str() {
            "member" => {
                let (Some(indices), Some(factors), None, None) =
                    (subgroup_word_indices, product_factors, &perm_rep, &budget)
                else {
                    return Err(malformed("member verdict needs exactly the member payload"));
                };
                let factors = factors
                    .into_iter()
                    .map(|f| {
                        if f.sign != 1 && f.sign != -1 {
                            return Err(malformed(format!("sign {} is not ±1", f.sign)));
                        }
                        let conjugator = p
                            .parse_word(&f.conjugator)
                            .map_err(|e| malformed(format!("conjugator {:?}: {e}", f.conjugator)))?;
                        Ok(Factor {
                            conjugator,
                            relator: f.relator_index,
                            sign: f.sign,
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Certificate::Member {
                    subgroup_word_indices: indices,
                    product: ConjugateProduct { factors },
                })
            }
            "nonmember" => {
                let (None, None, Some(rep), None) =
                    (&subgroup_word_indices, &product_factors, perm_rep, &budget)
                else {
                    return Err(malformed("nonmember verdict needs exactly perm_rep"));
                };
                if rep.degree == 0 {
                    return Err(malformed("degree must be positive"));
                }
                for img in &rep.images {
                    let mut seen = vec![false; rep.degree];
                    if img.len() != rep.degree
                        || img
                            .iter()
                            .any(|&x| x >= rep.degree || std::mem::replace(&mut seen[x], true))
                    {
                        return Err(malformed("image is not a permutation of the stated degree"));
                    }
                }
                Ok(Certificate::NonMember { perm_rep: rep })
            }
            "undecided" => {
                let (None, None, None, Some(budget)) =
                    (&subgroup_word_indices, &product_factors, &perm_rep, budget)
                else {
                    return Err(malformed("undecided verdict needs exactly budget"));
                };
                Ok(Certificate::Undecided { budget })
            }
            other => Err(malformed(format!("unknown verdict {other:?}"))),
        }
    }
}
