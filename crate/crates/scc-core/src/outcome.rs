//! Value types for literals, conjunctions, potential-outcome tables and
//! populations, plus the exact predicates defined on them.
//!
//! Assignments over k binary causes are encoded as indices with X1 as the
//! most significant bit: `index(c) = sum_j c_j * 2^(k-1-j)`. A table column
//! labelled `D010` (k = 3) therefore sits at index 2 and holds the outcome
//! under X1=0, X2=1, X3=0.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A literal event: a cause variable or its complement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    /// 0-based variable index (X1 is index 0).
    pub var: usize,
    /// True encodes the complemented event.
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal { var, negated: false }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, negated: true }
    }

    /// Value of the literal under a full assignment.
    pub fn holds(&self, c: &Assignment) -> Result<bool> {
        let bit = c.get(self.var)?;
        Ok(bit != self.negated)
    }

    /// Parses `X2` / `!X2` (1-based variable numbers).
    pub fn parse(s: &str) -> Result<Self> {
        let (negated, rest) = match s.strip_prefix('!') {
            Some(r) => (true, r),
            None => (false, s),
        };
        let num = rest
            .strip_prefix('X')
            .or_else(|| rest.strip_prefix('x'))
            .ok_or_else(|| Error::contract(format!("bad literal `{s}`: expected X<n> or !X<n>")))?;
        let n: usize = num
            .parse()
            .map_err(|_| Error::contract(format!("bad literal `{s}`: `{num}` is not a number")))?;
        if n == 0 {
            return Err(Error::contract("literal variable numbers are 1-based"));
        }
        Ok(Literal { var: n - 1, negated })
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "!X{}", self.var + 1)
        } else {
            write!(f, "X{}", self.var + 1)
        }
    }
}

/// A full assignment of values to the k causes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    bits: Vec<bool>,
}

impl Assignment {
    pub fn new(bits: Vec<bool>) -> Self {
        Assignment { bits }
    }

    /// Decodes an assignment index (X1 = most significant bit).
    pub fn from_index(k: usize, index: usize) -> Result<Self> {
        if index >= (1 << k) {
            return Err(Error::contract(format!(
                "assignment index {index} out of range for k={k}"
            )));
        }
        let bits = (0..k).map(|j| (index >> (k - 1 - j)) & 1 == 1).collect();
        Ok(Assignment { bits })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, var: usize) -> Result<bool> {
        self.bits
            .get(var)
            .copied()
            .ok_or_else(|| Error::contract(format!("variable X{} out of range", var + 1)))
    }

    /// Index of this assignment, X1 as the most significant bit.
    pub fn index(&self) -> usize {
        self.bits
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | usize::from(b))
    }

    /// The literal set B^[c]: one literal per variable, true under `self`.
    pub fn to_literals(&self) -> LiteralSet {
        let lits = self
            .bits
            .iter()
            .enumerate()
            .map(|(j, &b)| Literal { var: j, negated: !b })
            .collect();
        LiteralSet::new_unchecked(lits)
    }

    /// Pointwise `self <= other`.
    pub fn le(&self, other: &Assignment) -> bool {
        self.bits.len() == other.bits.len()
            && self.bits.iter().zip(&other.bits).all(|(a, b)| *a <= *b)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{}", u8::from(b))?;
        }
        Ok(())
    }
}

/// A conjunction of literals with no variable in both polarities.
///
/// Literals are kept sorted by (variable, polarity) with the positive
/// polarity first, so `Ord` on literal sets matches the conventional
/// ordering of full-width conjunctions (all-positive first).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LiteralSet {
    literals: Vec<Literal>,
}

impl LiteralSet {
    pub fn new(mut literals: Vec<Literal>) -> Result<Self> {
        literals.sort();
        literals.dedup();
        for w in literals.windows(2) {
            if w[0].var == w[1].var {
                return Err(Error::PolarityClash(w[0].var));
            }
        }
        Ok(LiteralSet { literals })
    }

    fn new_unchecked(mut literals: Vec<Literal>) -> Self {
        literals.sort();
        LiteralSet { literals }
    }

    pub fn empty() -> Self {
        LiteralSet { literals: Vec::new() }
    }

    /// Parses a comma-separated list such as `X1,!X3`.
    pub fn parse(s: &str) -> Result<Self> {
        if s.trim().is_empty() {
            return Ok(LiteralSet::empty());
        }
        let lits = s
            .split(',')
            .map(|part| Literal::parse(part.trim()))
            .collect::<Result<Vec<_>>>()?;
        LiteralSet::new(lits)
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn contains(&self, lit: &Literal) -> bool {
        self.literals.binary_search(lit).is_ok()
    }

    pub fn covers_var(&self, var: usize) -> bool {
        self.literals.iter().any(|l| l.var == var)
    }

    pub fn vars(&self) -> Vec<usize> {
        self.literals.iter().map(|l| l.var).collect()
    }

    pub fn is_subset_of(&self, other: &LiteralSet) -> bool {
        self.literals.iter().all(|l| other.contains(l))
    }

    /// Set union; errors if the union would clash polarities.
    pub fn union(&self, other: &LiteralSet) -> Result<LiteralSet> {
        let mut lits = self.literals.clone();
        lits.extend_from_slice(&other.literals);
        LiteralSet::new(lits)
    }

    pub fn without(&self, lit: &Literal) -> LiteralSet {
        LiteralSet::new_unchecked(
            self.literals.iter().copied().filter(|l| l != lit).collect(),
        )
    }

    /// Sub-conjunction selected by a bitmask over this set's sorted
    /// literal positions.
    pub fn subset_by_mask(&self, mask: usize) -> LiteralSet {
        let lits = self
            .literals
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, l)| *l)
            .collect();
        LiteralSet::new_unchecked(lits)
    }

    /// Evaluates the conjunction under a full assignment. The empty
    /// conjunction evaluates to 1 by convention; sufficiency predicates
    /// reject it separately.
    pub fn eval(&self, c: &Assignment) -> Result<bool> {
        for lit in &self.literals {
            if !lit.holds(c)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn labels(&self) -> Vec<String> {
        self.literals.iter().map(|l| l.to_string()).collect()
    }
}

impl fmt::Display for LiteralSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.labels().join(","))
    }
}

/// Per-variable monotonicity classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MonotoneClass {
    Positive,
    Negative,
    Flat,
    NonMonotone,
}

/// One individual's full set of 2^k potential outcomes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OutcomeTable {
    k: usize,
    outcomes: Vec<bool>,
}

impl OutcomeTable {
    pub fn new(k: usize, outcomes: Vec<bool>) -> Result<Self> {
        if outcomes.len() != 1 << k {
            return Err(Error::contract(format!(
                "outcome table for k={k} needs {} entries, got {}",
                1usize << k,
                outcomes.len()
            )));
        }
        Ok(OutcomeTable { k, outcomes })
    }

    /// Builds the table whose minterms are the set bits of `bits`
    /// (bit i of `bits` = outcome at assignment index i).
    pub fn from_bits(k: usize, bits: u64) -> Result<Self> {
        if k > 6 {
            return Err(Error::contract("from_bits supports k <= 6"));
        }
        let outcomes = (0..1usize << k).map(|i| bits >> i & 1 == 1).collect();
        OutcomeTable::new(k, outcomes)
    }

    /// Truth table of a conjunction: 1 exactly where every literal holds.
    pub fn of_conjunction(k: usize, b: &LiteralSet) -> Result<Self> {
        let mut outcomes = Vec::with_capacity(1 << k);
        for i in 0..1usize << k {
            let c = Assignment::from_index(k, i)?;
            outcomes.push(b.eval(&c)?);
        }
        OutcomeTable::new(k, outcomes)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, c: &Assignment) -> Result<bool> {
        if c.len() != self.k {
            return Err(Error::contract(format!(
                "assignment has {} variables, table has {}",
                c.len(),
                self.k
            )));
        }
        Ok(self.outcomes[c.index()])
    }

    pub fn get_index(&self, index: usize) -> Result<bool> {
        self.outcomes
            .get(index)
            .copied()
            .ok_or_else(|| Error::contract(format!("assignment index {index} out of range")))
    }

    pub fn outcomes(&self) -> &[bool] {
        &self.outcomes
    }

    pub fn is_constant(&self, value: bool) -> bool {
        self.outcomes.iter().all(|&b| b == value)
    }

    /// Whether `b` is a sufficient cause for this table: the outcome is 1
    /// at every assignment satisfying the conjunction.
    pub fn is_sufficient_cause(&self, b: &LiteralSet) -> Result<bool> {
        if b.is_empty() {
            return Err(Error::EmptyConjunction);
        }
        for i in 0..1usize << self.k {
            let c = Assignment::from_index(self.k, i)?;
            if b.eval(&c)? && !self.outcomes[i] {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether `b` is sufficient and no proper nonempty subset is.
    pub fn is_minimal_sufficient_cause(&self, b: &LiteralSet) -> Result<bool> {
        if !self.is_sufficient_cause(b)? {
            return Ok(false);
        }
        let n = b.len();
        for mask in 1..(1usize << n) - 1 {
            let sub = b.subset_by_mask(mask);
            if self.is_sufficient_cause(&sub)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether the disjunction of `bs` reproduces the table exactly.
    pub fn is_determinative(&self, bs: &[LiteralSet]) -> Result<bool> {
        for b in bs {
            if b.is_empty() {
                return Err(Error::EmptyConjunction);
            }
        }
        for i in 0..1usize << self.k {
            let c = Assignment::from_index(self.k, i)?;
            let mut any = false;
            for b in bs {
                if b.eval(&c)? {
                    any = true;
                    break;
                }
            }
            if any != self.outcomes[i] {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether raising variable `var` never lowers the outcome. Tables on
    /// which the variable has no effect count as positively monotone.
    pub fn monotone_positive(&self, var: usize) -> Result<bool> {
        if var >= self.k {
            return Err(Error::contract(format!("variable X{} out of range", var + 1)));
        }
        let bit = 1usize << (self.k - 1 - var);
        for i in 0..1usize << self.k {
            if i & bit == 0 && self.outcomes[i] && !self.outcomes[i | bit] {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether setting the literal to 1 never lowers the outcome (for a
    /// complemented literal this is a negative monotonic effect of the
    /// underlying variable).
    pub fn literal_monotone_positive(&self, lit: &Literal) -> Result<bool> {
        if lit.negated {
            let bit = 1usize << (self.k - 1 - lit.var);
            if lit.var >= self.k {
                return Err(Error::contract(format!(
                    "variable X{} out of range",
                    lit.var + 1
                )));
            }
            for i in 0..1usize << self.k {
                if i & bit == 0 && self.outcomes[i | bit] && !self.outcomes[i] {
                    return Ok(false);
                }
            }
            Ok(true)
        } else {
            self.monotone_positive(lit.var)
        }
    }

    /// Classifies each variable as positive, negative, flat or
    /// non-monotone. Flat means both directions hold (no effect).
    pub fn monotone_profile(&self) -> Vec<MonotoneClass> {
        (0..self.k)
            .map(|v| {
                let pos = self.monotone_positive(v).expect("var in range");
                let neg = self
                    .literal_monotone_positive(&Literal::neg(v))
                    .expect("var in range");
                match (pos, neg) {
                    (true, true) => MonotoneClass::Flat,
                    (true, false) => MonotoneClass::Positive,
                    (false, true) => MonotoneClass::Negative,
                    (false, false) => MonotoneClass::NonMonotone,
                }
            })
            .collect()
    }
}

/// Number of outcome tables on k variables in which every variable has a
/// positive monotonic effect, by exhaustive enumeration (the kth Dedekind
/// number). Desk-scale verification only: k <= 4.
pub fn count_monotone_tables(k: usize) -> Result<u64> {
    if k > 4 {
        return Err(Error::UnsupportedSize {
            what: "monotone table enumeration",
            limit: 4,
            got: k,
        });
    }
    let cells = 1usize << k;
    let mut count = 0u64;
    for bits in 0..1u64 << cells {
        let t = OutcomeTable::from_bits(k, bits)?;
        if (0..k).all(|v| t.monotone_positive(v).expect("var in range")) {
            count += 1;
        }
    }
    Ok(count)
}

/// How population weights are interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightMode {
    Count,
    Probability,
}

/// One individual: label, weight and full outcome table.
#[derive(Debug, Clone)]
pub struct Individual {
    pub id: String,
    pub weight: f64,
    pub table: OutcomeTable,
}

/// An ordered population of individuals sharing the same variable count.
#[derive(Debug, Clone)]
pub struct Population {
    k: usize,
    mode: WeightMode,
    members: Vec<Individual>,
}

impl Population {
    pub fn new(members: Vec<Individual>, mode: WeightMode) -> Result<Self> {
        let k = members
            .first()
            .map(|m| m.table.k())
            .ok_or_else(|| Error::contract("population must be nonempty"))?;
        for m in &members {
            if m.table.k() != k {
                return Err(Error::contract(format!(
                    "individual {} has k={}, expected {}",
                    m.id,
                    m.table.k(),
                    k
                )));
            }
            if m.weight < 0.0 || !m.weight.is_finite() {
                return Err(Error::contract(format!(
                    "individual {} has invalid weight {}",
                    m.id, m.weight
                )));
            }
        }
        let total: f64 = members.iter().map(|m| m.weight).sum();
        if total <= 0.0 {
            return Err(Error::contract("population weights must sum to a positive value"));
        }
        if mode == WeightMode::Probability && (total - 1.0).abs() > 1e-9 {
            return Err(Error::contract(format!(
                "probability weights sum to {total}, expected 1"
            )));
        }
        Ok(Population { k, mode, members })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn mode(&self) -> WeightMode {
        self.mode
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn subset(&self, ids: &[String]) -> Result<Population> {
        let members: Vec<Individual> = self
            .members
            .iter()
            .filter(|m| ids.contains(&m.id))
            .cloned()
            .collect();
        Population::new(members, self.mode)
    }
}
