//! Report structures shared by the CLI and the C API. Everything here
//! serializes deterministically: fixed field order, sorted collections,
//! no timestamps.

use serde::{Deserialize, Serialize};

use crate::engine::Representation;
use crate::error::{Error, Result};
use crate::interaction::Witness;
use crate::outcome::{LiteralSet, Population};

/// Decision rules a finding can cite.
pub mod rules {
    pub const IRREDUCIBILITY_WITNESS: &str = "irreducibility-witness";
    pub const AVOIDANCE_CONSTRUCTION: &str = "avoidance-construction";
    pub const SINGULARITY_EXACT_TABLE: &str = "singularity-exact-table";
    pub const MSC_AT_BASELINE_CONTEXT: &str = "msc-at-baseline-context";
    pub const PNS_POSITIVE: &str = "pns-positive";
}

/// The outcome of one counterfactual query.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Finding {
    pub claim: String,
    /// Variable labels the claim is relative to.
    pub relative_to: Vec<String>,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub rule: String,
    pub assumptions: Vec<String>,
}

impl Finding {
    pub fn new(claim: impl Into<String>, relative_to: Vec<String>, holds: bool, rule: &str) -> Self {
        Finding {
            claim: claim.into(),
            relative_to,
            holds,
            witness: None,
            rule: rule.to_string(),
            assumptions: Vec::new(),
        }
    }

    pub fn with_witness(mut self, witness: Option<Witness>) -> Self {
        self.witness = witness;
        self
    }

    pub fn with_assumption(mut self, assumption: impl Into<String>) -> Self {
        self.assumptions.push(assumption.into());
        self
    }
}

/// Extends a finding to a larger cause set under the caller-declared
/// assertion that the added variables are not causally influenced by the
/// modelled ones. The assertion cannot be checked from the outcome
/// tables, so it is recorded verbatim; singularity findings additionally
/// carry an unchecked monotonicity side condition.
pub fn extend_cause_set(finding: &Finding, extra_vars: &[String]) -> Finding {
    if extra_vars.is_empty() {
        return finding.clone();
    }
    let mut extended = finding.clone();
    extended.relative_to.extend_from_slice(extra_vars);
    extended.assumptions.push(format!(
        "declared: {} not causally influenced by {} (not verifiable from outcome tables)",
        extra_vars.join(","),
        finding.relative_to.join(",")
    ));
    if finding.rule == rules::SINGULARITY_EXACT_TABLE {
        extended.assumptions.push(
            "warning: extension of a singularity finding also needs the monotonicity \
             side condition on the enlarged set; not checked"
                .to_string(),
        );
    }
    extended
}

/// JSON form of a representation: conjuncts as signed literal arrays,
/// membership as the ids with indicator 1 per conjunct.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepresentationExport {
    pub conjuncts: Vec<Vec<String>>,
    pub membership: Vec<Vec<String>>,
}

impl RepresentationExport {
    pub fn from_representation(rep: &Representation, pop: &Population) -> Self {
        let ids: Vec<&str> = pop.members().iter().map(|m| m.id.as_str()).collect();
        let mut conjuncts = Vec::with_capacity(rep.len());
        let mut membership = Vec::with_capacity(rep.len());
        for (bits, conjunct) in rep.pairs() {
            conjuncts.push(conjunct.labels());
            membership.push(
                bits.iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .map(|(i, _)| ids[i].to_string())
                    .collect(),
            );
        }
        RepresentationExport { conjuncts, membership }
    }

    /// Rebuilds the representation against a population (ids must match).
    pub fn to_representation(&self, pop: &Population) -> Result<Representation> {
        if self.conjuncts.len() != self.membership.len() {
            return Err(Error::contract(
                "conjuncts and membership arrays must have equal length",
            ));
        }
        let mut pairs = Vec::with_capacity(self.conjuncts.len());
        for (labels, ids) in self.conjuncts.iter().zip(&self.membership) {
            let conjunct = LiteralSet::parse(&labels.join(","))?;
            let mut bits = vec![false; pop.len()];
            for id in ids {
                let pos = pop
                    .members()
                    .iter()
                    .position(|m| &m.id == id)
                    .ok_or_else(|| Error::contract(format!("unknown individual id {id}")))?;
                bits[pos] = true;
            }
            pairs.push((bits, conjunct));
        }
        Ok(Representation::new(pairs))
    }
}
