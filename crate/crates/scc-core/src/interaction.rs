//! Counterfactual-level decision procedures: irreducibility and
//! singularity witnesses, monotone tree conditions, minimal-sufficient-
//! cause inference at the all-zero context, and the probability of
//! necessity and sufficiency.
//!
//! Witness searches are deterministic: individuals in load order,
//! contexts in assignment-index order, so reports are reproducible.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::outcome::{Assignment, Literal, LiteralSet, OutcomeTable, Population, WeightMode};
use crate::trees::LiteralTree;

/// Values for a subset of the causes, e.g. a context over the variables
/// outside the queried conjunction.
///
/// Serializes as a `{"X3": 0, "X4": 1}` map in variable order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PartialAssignment {
    pairs: Vec<(usize, bool)>,
}

impl Serialize for PartialAssignment {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(self.pairs.len()))?;
        for &(var, val) in &self.pairs {
            map.serialize_entry(&format!("X{}", var + 1), &u8::from(val))?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for PartialAssignment {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let raw: std::collections::BTreeMap<String, u8> = Deserialize::deserialize(deserializer)?;
        let mut pairs = Vec::with_capacity(raw.len());
        for (name, value) in raw {
            let lit = Literal::parse(&name).map_err(DeError::custom)?;
            if lit.negated {
                return Err(DeError::custom("context keys are plain variables like X3"));
            }
            let val = match value {
                0 => false,
                1 => true,
                other => return Err(DeError::custom(format!("context value {other} must be 0 or 1"))),
            };
            pairs.push((lit.var, val));
        }
        PartialAssignment::new(pairs).map_err(DeError::custom)
    }
}

impl PartialAssignment {
    pub fn new(mut pairs: Vec<(usize, bool)>) -> Result<Self> {
        pairs.sort();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::contract(format!(
                    "variable X{} assigned twice",
                    w[0].0 + 1
                )));
            }
        }
        Ok(PartialAssignment { pairs })
    }

    pub fn empty() -> Self {
        PartialAssignment { pairs: Vec::new() }
    }

    pub fn pairs(&self) -> &[(usize, bool)] {
        &self.pairs
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn vars(&self) -> Vec<usize> {
        self.pairs.iter().map(|(v, _)| *v).collect()
    }

    /// The literals made true by this partial assignment.
    pub fn to_literals(&self) -> LiteralSet {
        LiteralSet::new(
            self.pairs
                .iter()
                .map(|&(var, val)| Literal { var, negated: !val })
                .collect(),
        )
        .expect("one polarity per variable")
    }

    /// Deterministic label such as `X3=0,X4=1`; `-` when empty.
    pub fn label(&self) -> String {
        if self.pairs.is_empty() {
            return "-".to_string();
        }
        self.pairs
            .iter()
            .map(|&(v, b)| format!("X{}={}", v + 1, u8::from(b)))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Builds a full assignment over k variables from variable/value parts;
/// every variable must be covered exactly once.
pub fn compose_assignment(k: usize, parts: &[(usize, bool)]) -> Result<Assignment> {
    let mut bits = vec![None; k];
    for &(var, val) in parts {
        if var >= k {
            return Err(Error::contract(format!("variable X{} out of range", var + 1)));
        }
        if bits[var].is_some() {
            return Err(Error::contract(format!("variable X{} assigned twice", var + 1)));
        }
        bits[var] = Some(val);
    }
    let bits = bits
        .into_iter()
        .enumerate()
        .map(|(var, b)| b.ok_or_else(|| Error::contract(format!("variable X{} unassigned", var + 1))))
        .collect::<Result<Vec<bool>>>()?;
    Ok(Assignment::new(bits))
}

/// A queried conjunction together with the remaining context variables:
/// `b` covers every variable of its block exactly once, `c2_vars` are the
/// rest in ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausePartition {
    b: LiteralSet,
    c2_vars: Vec<usize>,
    k: usize,
}

impl CausePartition {
    pub fn new(b: LiteralSet, k: usize) -> Result<Self> {
        if b.is_empty() {
            return Err(Error::EmptyConjunction);
        }
        if let Some(lit) = b.literals().iter().find(|l| l.var >= k) {
            return Err(Error::contract(format!(
                "literal {lit} outside the {k} modelled causes"
            )));
        }
        let c2_vars = (0..k).filter(|v| !b.covers_var(*v)).collect();
        Ok(CausePartition { b, c2_vars, k })
    }

    pub fn b(&self) -> &LiteralSet {
        &self.b
    }

    pub fn c2_vars(&self) -> &[usize] {
        &self.c2_vars
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn check_dims(&self, k: usize) -> Result<()> {
        if self.k != k {
            return Err(Error::contract(format!(
                "partition was built for k={}, data has k={k}",
                self.k
            )));
        }
        Ok(())
    }

    /// The idx-th assignment to the context variables, first variable as
    /// the most significant bit.
    pub fn c2_assignment(&self, idx: usize) -> Result<PartialAssignment> {
        let n = self.c2_vars.len();
        if idx >= 1 << n {
            return Err(Error::contract(format!("context index {idx} out of range")));
        }
        PartialAssignment::new(
            self.c2_vars
                .iter()
                .enumerate()
                .map(|(j, &var)| (var, idx >> (n - 1 - j) & 1 == 1))
                .collect(),
        )
    }

    pub fn context_count(&self) -> usize {
        1 << self.c2_vars.len()
    }

    fn check_context(&self, c2: &PartialAssignment) -> Result<()> {
        if c2.vars() != self.c2_vars {
            return Err(Error::contract(format!(
                "context must assign exactly the variables outside {}",
                self.b
            )));
        }
        Ok(())
    }
}

/// A witness for an interaction: the individual and the context values
/// under which the defining conditions hold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub id: String,
    pub context: PartialAssignment,
}

fn ensure_literal_monotone(t: &OutcomeTable, lit: &Literal, who: &str) -> Result<()> {
    if !t.literal_monotone_positive(lit)? {
        return Err(Error::MonotonicityViolation {
            literal: lit.to_string(),
            individual: who.to_string(),
        });
    }
    Ok(())
}

/// Outcome at the assignment where every literal of `b` except those in
/// `zeroed` holds, the `zeroed` literals fail, and the context takes `c2`.
fn outcome_at(
    t: &OutcomeTable,
    b: &LiteralSet,
    zeroed: &[Literal],
    c2: &PartialAssignment,
) -> Result<bool> {
    let mut parts: Vec<(usize, bool)> = Vec::with_capacity(t.k());
    for lit in b.literals() {
        if zeroed.contains(lit) {
            parts.push((lit.var, lit.negated));
        } else {
            parts.push((lit.var, !lit.negated));
        }
    }
    parts.extend_from_slice(c2.pairs());
    t.get(&compose_assignment(t.k(), &parts)?)
}

/// The irreducibility condition value at one context:
/// D[b=1, c2] - sum over literals L of D[b\{L}=1, L=0, c2].
pub fn condition_value_irred(
    t: &OutcomeTable,
    p: &CausePartition,
    c2: &PartialAssignment,
) -> Result<i64> {
    p.check_dims(t.k())?;
    p.check_context(c2)?;
    let b = p.b();
    let mut value = i64::from(outcome_at(t, b, &[], c2)?);
    for lit in b.literals() {
        value -= i64::from(outcome_at(t, b, &[*lit], c2)?);
    }
    Ok(value)
}

/// The tree-form condition value under monotonicity of `bplus`:
/// the leave-one-out value plus, for each tree edge, D[b\E=1, E=0, c2].
/// The monotonicity premise is checked on the table and its failure is an
/// error, since the value is only meaningful when the premise holds.
pub fn condition_value_monotone(
    t: &OutcomeTable,
    p: &CausePartition,
    bplus: &LiteralSet,
    tree: &LiteralTree,
    c2: &PartialAssignment,
) -> Result<i64> {
    p.check_dims(t.k())?;
    if !bplus.is_subset_of(p.b()) {
        return Err(Error::contract("bplus must be a subset of b"));
    }
    if tree.vertices() != bplus.literals() {
        return Err(Error::contract("tree must span exactly the literals of bplus"));
    }
    for lit in bplus.literals() {
        ensure_literal_monotone(t, lit, "table")?;
    }
    let mut value = condition_value_irred(t, p, c2)?;
    for (a, b_lit) in tree.edge_literals() {
        value += i64::from(outcome_at(t, p.b(), &[a, b_lit], c2)?);
    }
    Ok(value)
}

/// The singularity condition value for a full-width conjunction
/// partitioned as bplus (monotone, spanned by the tree) and b' = b\bplus:
/// D[b=1] - sum over L in bplus of D[b\{L}=1, L=0]
///        - sum over nonempty S in b' of D[b\S=1, S=0]
///        + sum over tree edges of D[b\E=1, E=0].
pub fn condition_value_singular(
    t: &OutcomeTable,
    b: &LiteralSet,
    bplus: &LiteralSet,
    tree: &LiteralTree,
) -> Result<i64> {
    if b.len() != t.k() {
        return Err(Error::contract("singularity condition requires |b| = k"));
    }
    if !bplus.is_subset_of(b) {
        return Err(Error::contract("bplus must be a subset of b"));
    }
    if tree.vertices() != bplus.literals() {
        return Err(Error::contract("tree must span exactly the literals of bplus"));
    }
    for lit in bplus.literals() {
        ensure_literal_monotone(t, lit, "table")?;
    }
    let empty = PartialAssignment::empty();
    let mut value = i64::from(outcome_at(t, b, &[], &empty)?);
    for lit in bplus.literals() {
        value -= i64::from(outcome_at(t, b, &[*lit], &empty)?);
    }
    let bprime: Vec<Literal> = b
        .literals()
        .iter()
        .copied()
        .filter(|l| !bplus.contains(l))
        .collect();
    for mask in 1..1usize << bprime.len() {
        let zeroed: Vec<Literal> = bprime
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, l)| *l)
            .collect();
        value -= i64::from(outcome_at(t, b, &zeroed, &empty)?);
    }
    for (a, b_lit) in tree.edge_literals() {
        value += i64::from(outcome_at(t, b, &[a, b_lit], &empty)?);
    }
    Ok(value)
}

/// Searches for an irreducibility witness: an individual and context
/// where the conjunction fires the outcome but every leave-one-out
/// assignment does not. Returns the first witness in (load order,
/// context-index order), or None.
pub fn is_irreducible(pop: &Population, p: &CausePartition) -> Result<Option<Witness>> {
    p.check_dims(pop.k())?;
    for member in pop.members() {
        for idx in 0..p.context_count() {
            let c2 = p.c2_assignment(idx)?;
            if condition_value_irred(&member.table, p, &c2)? > 0 {
                return Ok(Some(Witness { id: member.id.clone(), context: c2 }));
            }
        }
    }
    Ok(None)
}

/// Searches for a singularity witness: an individual whose entire
/// outcome table equals the truth table of the conjunction.
pub fn is_singular(pop: &Population, p: &CausePartition) -> Result<Option<Witness>> {
    p.check_dims(pop.k())?;
    let conj_table = OutcomeTable::of_conjunction(pop.k(), p.b())?;
    for member in pop.members() {
        if member.table == conj_table {
            return Ok(Some(Witness {
                id: member.id.clone(),
                context: PartialAssignment::empty(),
            }));
        }
    }
    Ok(None)
}

/// Witness search for a minimal sufficient cause under positive
/// monotonicity of every context variable, evaluated at the all-zero
/// context. The monotonicity premise is checked on every table.
pub fn msc_under_monotonicity(pop: &Population, p: &CausePartition) -> Result<Option<Witness>> {
    p.check_dims(pop.k())?;
    for member in pop.members() {
        for &var in p.c2_vars() {
            ensure_literal_monotone(&member.table, &Literal::pos(var), &member.id)?;
        }
    }
    let zero = PartialAssignment::new(p.c2_vars().iter().map(|&v| (v, false)).collect())?;
    for member in pop.members() {
        if condition_value_irred(&member.table, p, &zero)? > 0 {
            return Ok(Some(Witness { id: member.id.clone(), context: zero }));
        }
    }
    Ok(None)
}

/// Probability of necessity and sufficiency: the total weight of
/// individuals whose outcome table is exactly the conjunction's truth
/// table. Requires a probability-mode population and |b| = k.
pub fn pns(pop: &Population, b: &LiteralSet) -> Result<f64> {
    if pop.mode() != WeightMode::Probability {
        return Err(Error::WrongWeightMode(
            "pns requires a probability-mode population",
        ));
    }
    if b.len() != pop.k() {
        return Err(Error::contract("pns requires |b| = k"));
    }
    let conj_table = OutcomeTable::of_conjunction(pop.k(), b)?;
    Ok(pop
        .members()
        .iter()
        .filter(|m| m.table == conj_table)
        .map(|m| m.weight)
        .sum())
}

/// Lower bound on PNS from observed cell means: E[D | b=1] minus the sum
/// of E[D | b=v] over every other value vector v of the literals. Keys
/// are assignment indices over b's literal values (all-ones = last). The
/// bound may be negative (vacuous); it is not clamped.
pub fn pns_lower_bound(cell_means: &BTreeMap<usize, f64>, width: usize) -> Result<f64> {
    let cells = 1usize << width;
    for idx in 0..cells {
        let v = cell_means
            .get(&idx)
            .ok_or_else(|| Error::contract(format!("missing cell mean for value index {idx}")))?;
        // tolerate accumulated floating error in caller-computed means
        if !(-1e-9..=1.0 + 1e-9).contains(v) {
            return Err(Error::contract(format!("cell mean {v} outside [0,1]")));
        }
    }
    let top = cells - 1;
    let mut bound = cell_means[&top];
    for idx in 0..top {
        bound -= cell_means[&idx];
    }
    Ok(bound)
}
