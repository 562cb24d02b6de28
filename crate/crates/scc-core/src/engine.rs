//! Sufficient-cause representations and implicant machinery.
//!
//! A representation pairs per-individual membership indicators with
//! conjunctions so that the disjunction of active conjunctions reproduces
//! every potential outcome. The canonical construction uses all 2^k
//! full-width conjunctions ordered all-positive first; the avoidance
//! construction builds a representation avoiding a given conjunction
//! whenever one exists.
//!
//! Minimal sufficient causes of a single table coincide with its prime
//! implicants, computed here by Quine-McCluskey merging.

use crate::error::{Error, Result};
use crate::interaction::{compose_assignment, CausePartition};
use crate::outcome::{Assignment, LiteralSet, OutcomeTable, Population};

/// A sufficient-cause representation: ordered (membership, conjunct)
/// pairs over a loaded population. Membership vectors are explicit bits,
/// so the indicators are trivially unaffected by interventions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Representation {
    pairs: Vec<(Vec<bool>, LiteralSet)>,
}

impl Representation {
    pub fn new(pairs: Vec<(Vec<bool>, LiteralSet)>) -> Self {
        Representation { pairs }
    }

    pub fn pairs(&self) -> &[(Vec<bool>, LiteralSet)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The construction that always exists: one conjunct per full-width
    /// literal set, membership = the outcome at the induced assignment.
    /// Conjuncts are ordered all-positive first (assignment index
    /// descending), so membership vectors line up with the textbook
    /// listing.
    pub fn canonical(pop: &Population) -> Result<Self> {
        let k = pop.k();
        let mut pairs = Vec::with_capacity(1 << k);
        for idx in (0..1usize << k).rev() {
            let c = Assignment::from_index(k, idx)?;
            let conjunct = c.to_literals();
            let membership = pop
                .members()
                .iter()
                .map(|m| m.table.get_index(idx))
                .collect::<Result<Vec<bool>>>()?;
            pairs.push((membership, conjunct));
        }
        Ok(Representation { pairs })
    }

    /// Checks the defining equivalence: for every individual and every
    /// assignment, the outcome is 1 iff some pair has membership 1 and a
    /// conjunction satisfied by the assignment.
    pub fn verify(&self, pop: &Population) -> Result<bool> {
        let k = pop.k();
        for (membership, conjunct) in &self.pairs {
            if membership.len() != pop.len() {
                return Err(Error::contract(format!(
                    "membership vector has {} entries, population has {}",
                    membership.len(),
                    pop.len()
                )));
            }
            if let Some(lit) = conjunct.literals().iter().find(|l| l.var >= k) {
                return Err(Error::contract(format!(
                    "conjunct literal {lit} outside the {k} modelled causes"
                )));
            }
        }
        for (w, member) in pop.members().iter().enumerate() {
            for idx in 0..1usize << k {
                let c = Assignment::from_index(k, idx)?;
                let mut fired = false;
                for (membership, conjunct) in &self.pairs {
                    if membership[w] && conjunct.eval(&c)? {
                        fired = true;
                        break;
                    }
                }
                if fired != member.table.get_index(idx)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Whether any conjunct contains `b` as a subset.
    pub fn any_conjunct_contains(&self, b: &LiteralSet) -> bool {
        self.pairs.iter().any(|(_, c)| b.is_subset_of(c))
    }
}

/// Result of attempting to build a representation that avoids a
/// conjunction: impossible exactly when the conjunction is irreducible.
#[derive(Debug, Clone)]
pub enum Avoidance {
    Constructed(Representation),
    NotConstructible,
}

impl Avoidance {
    pub fn representation(&self) -> Option<&Representation> {
        match self {
            Avoidance::Constructed(r) => Some(r),
            Avoidance::NotConstructible => None,
        }
    }
}

/// Attempts the avoidance construction for `p.b` over the population:
/// all full-width conjuncts not containing b, plus width k-1 conjuncts
/// missing exactly one literal of b (membership = product of outcomes with
/// the missing literal set each way). The combined representation is
/// returned when it verifies; verification fails exactly when b is
/// irreducible.
pub fn avoidance_representation(pop: &Population, p: &CausePartition) -> Result<Avoidance> {
    let k = pop.k();
    p.check_dims(k)?;
    let b = p.b();
    let mut pairs: Vec<(Vec<bool>, LiteralSet)> = Vec::new();

    // Full-width conjuncts avoiding b.
    for idx in (0..1usize << k).rev() {
        let c = Assignment::from_index(k, idx)?;
        let conjunct = c.to_literals();
        if b.is_subset_of(&conjunct) {
            continue;
        }
        let membership = pop
            .members()
            .iter()
            .map(|m| m.table.get_index(idx))
            .collect::<Result<Vec<bool>>>()?;
        pairs.push((membership, conjunct));
    }

    // Width k-1 conjuncts: b minus one literal, joined with every full
    // assignment of the remaining variables. Membership requires the
    // outcome with the missing literal set both ways.
    for lit in b.literals() {
        let rest = b.without(lit);
        for ctx_idx in 0..p.context_count() {
            let ctx = p.c2_assignment(ctx_idx)?;
            let conjunct = rest.union(&ctx.to_literals())?;
            let mut base: Vec<(usize, bool)> = conjunct
                .literals()
                .iter()
                .map(|l| (l.var, !l.negated))
                .collect();
            base.push((lit.var, false));
            let lo_assign = compose_assignment(k, &base)?;
            *base.last_mut().expect("just pushed") = (lit.var, true);
            let hi_assign = compose_assignment(k, &base)?;
            let mut membership = Vec::with_capacity(pop.len());
            for m in pop.members() {
                membership.push(m.table.get(&lo_assign)? && m.table.get(&hi_assign)?);
            }
            pairs.push((membership, conjunct));
        }
    }

    pairs.sort_by(|a, b| a.1.cmp(&b.1));
    let rep = Representation { pairs };
    if rep.verify(pop)? {
        Ok(Avoidance::Constructed(rep))
    } else {
        Ok(Avoidance::NotConstructible)
    }
}

/// Prime implicants of a table together with the tautology marker set for
/// the constant-one table, whose only implicant would be the empty
/// conjunction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImplicantSet {
    pub implicants: Vec<LiteralSet>,
    pub tautology: bool,
}

/// A cube during Quine-McCluskey merging: `free` marks assignment-index
/// bits left unspecified, `values` fixes the rest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Cube {
    free: usize,
    values: usize,
}

impl Cube {
    fn to_literal_set(self, k: usize) -> LiteralSet {
        let mut lits = Vec::new();
        for var in 0..k {
            let bit = 1usize << (k - 1 - var);
            if self.free & bit == 0 {
                if self.values & bit != 0 {
                    lits.push(crate::outcome::Literal::pos(var));
                } else {
                    lits.push(crate::outcome::Literal::neg(var));
                }
            }
        }
        LiteralSet::new(lits).expect("cube produces one polarity per variable")
    }
}

/// Quine-McCluskey over the minterms of `t`: returns exactly the maximal
/// merged cubes, which equal the set of minimal sufficient causes. The
/// constant-zero table has no implicants; the constant-one table returns
/// an empty set with the tautology flag.
pub fn prime_implicants(t: &OutcomeTable) -> ImplicantSet {
    let k = t.k();
    let minterms: Vec<usize> = (0..1usize << k).filter(|&i| t.outcomes()[i]).collect();
    if minterms.is_empty() {
        return ImplicantSet { implicants: Vec::new(), tautology: false };
    }
    if minterms.len() == 1 << k {
        return ImplicantSet { implicants: Vec::new(), tautology: true };
    }

    let mut layer: Vec<Cube> = minterms
        .iter()
        .map(|&m| Cube { free: 0, values: m })
        .collect();
    let mut primes: Vec<Cube> = Vec::new();
    while !layer.is_empty() {
        let mut merged_flags = vec![false; layer.len()];
        let mut next: Vec<Cube> = Vec::new();
        for i in 0..layer.len() {
            for j in i + 1..layer.len() {
                let (a, b) = (layer[i], layer[j]);
                if a.free != b.free {
                    continue;
                }
                let diff = a.values ^ b.values;
                if diff.count_ones() == 1 {
                    merged_flags[i] = true;
                    merged_flags[j] = true;
                    next.push(Cube { free: a.free | diff, values: a.values & !diff });
                }
            }
        }
        for (i, cube) in layer.iter().enumerate() {
            if !merged_flags[i] {
                primes.push(*cube);
            }
        }
        next.sort();
        next.dedup();
        layer = next;
    }

    let mut implicants: Vec<LiteralSet> = primes.iter().map(|c| (*c).to_literal_set(k)).collect();
    implicants.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    implicants.dedup();
    ImplicantSet { implicants, tautology: false }
}

/// Prime implicants covering at least one minterm that no other prime
/// implicant covers.
pub fn essential_prime_implicants(t: &OutcomeTable) -> ImplicantSet {
    let all = prime_implicants(t);
    if all.implicants.is_empty() {
        return all;
    }
    let k = t.k();
    let mut essential = Vec::new();
    for (i, imp) in all.implicants.iter().enumerate() {
        let mut is_essential = false;
        'minterms: for idx in 0..1usize << k {
            if !t.outcomes()[idx] {
                continue;
            }
            let c = Assignment::from_index(k, idx).expect("index in range");
            if !imp.eval(&c).expect("vars in range") {
                continue;
            }
            for (j, other) in all.implicants.iter().enumerate() {
                if j != i && other.eval(&c).expect("vars in range") {
                    continue 'minterms;
                }
            }
            is_essential = true;
            break;
        }
        if is_essential {
            essential.push(imp.clone());
        }
    }
    ImplicantSet { implicants: essential, tautology: false }
}

/// PLA-style text dump of a truth table (all 2^k rows).
pub fn pla_dump(t: &OutcomeTable, output_name: &str) -> String {
    let k = t.k();
    let mut out = String::new();
    out.push_str(&format!(".i {k}\n.o 1\n"));
    let labels: Vec<String> = (1..=k).map(|j| format!("X{j}")).collect();
    out.push_str(&format!(".ilb {}\n", labels.join(" ")));
    out.push_str(&format!(".ob {output_name}\n"));
    for idx in 0..1usize << k {
        let c = Assignment::from_index(k, idx).expect("index in range");
        out.push_str(&format!("{c} {}\n", u8::from(t.outcomes()[idx])));
    }
    out.push_str(".e\n");
    out
}
