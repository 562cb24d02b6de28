//! Spanning trees on positively-monotone literal sets and the
//! linear-constraint coefficient vectors they induce.
//!
//! Trees on n labelled vertices are enumerated through the Prüfer
//! bijection, so exactly n^(n-2) distinct trees come out in a fixed
//! order. Sizes 0 and 1 yield a single edgeless tree, which makes the
//! tree-form interaction condition degrade to the plain leave-one-out
//! form when no monotonicity is assumed.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::outcome::{Literal, LiteralSet};

/// Enumeration guard: 8^6 = 262,144 trees keeps full sweeps fast.
pub const TREE_ENUMERATION_LIMIT: usize = 8;

/// A spanning tree whose vertices are literals.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LiteralTree {
    vertices: Vec<Literal>,
    /// Vertex-index pairs (i < j), sorted.
    edges: Vec<(usize, usize)>,
}

impl LiteralTree {
    pub fn new(vertices: &LiteralSet, mut edges: Vec<(usize, usize)>) -> Result<Self> {
        let n = vertices.len();
        for e in edges.iter_mut() {
            if e.0 == e.1 {
                return Err(Error::contract("tree edges must join distinct vertices"));
            }
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
            if e.1 >= n {
                return Err(Error::contract(format!("edge ({},{}) out of range", e.0, e.1)));
            }
        }
        edges.sort();
        edges.dedup();
        let expected = n.saturating_sub(1);
        if edges.len() != expected {
            return Err(Error::contract(format!(
                "a tree on {n} vertices has {expected} edges, got {}",
                edges.len()
            )));
        }
        let tree = LiteralTree {
            vertices: vertices.literals().to_vec(),
            edges,
        };
        if n > 1 && !tree.is_connected() {
            return Err(Error::contract("edges do not connect all vertices"));
        }
        Ok(tree)
    }

    fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                let other = if a == v {
                    b
                } else if b == v {
                    a
                } else {
                    continue;
                };
                if !seen[other] {
                    seen[other] = true;
                    stack.push(other);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn vertices(&self) -> &[Literal] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_literals(&self) -> Vec<(Literal, Literal)> {
        self.edges
            .iter()
            .map(|&(a, b)| (self.vertices[a], self.vertices[b]))
            .collect()
    }

    fn vertex_index(&self, lit: &Literal) -> Result<usize> {
        self.vertices
            .iter()
            .position(|v| v == lit)
            .ok_or_else(|| Error::contract(format!("{lit} is not a vertex of the tree")))
    }

    /// Number of incident edges.
    pub fn degree(&self, lit: &Literal) -> Result<usize> {
        let i = self.vertex_index(lit)?;
        Ok(self.edges.iter().filter(|&&(a, b)| a == i || b == i).count())
    }

    /// The bijection L -> last edge on the unique root-to-L path, for
    /// every vertex other than the root.
    #[allow(clippy::needless_range_loop)]
    pub fn edge_bijection(&self, root: &Literal) -> Result<BTreeMap<Literal, (Literal, Literal)>> {
        let r = self.vertex_index(root)?;
        let n = self.vertices.len();
        let mut parent = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        let mut stack = vec![r];
        seen[r] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                let other = if a == v {
                    b
                } else if b == v {
                    a
                } else {
                    continue;
                };
                if !seen[other] {
                    seen[other] = true;
                    parent[other] = v;
                    stack.push(other);
                }
            }
        }
        let mut map = BTreeMap::new();
        for v in 0..n {
            if v == r {
                continue;
            }
            let p = parent[v];
            let (a, b) = if p < v { (p, v) } else { (v, p) };
            map.insert(self.vertices[v], (self.vertices[a], self.vertices[b]));
        }
        Ok(map)
    }

    /// Decodes a Prüfer sequence over the vertex set. The sequence must
    /// have length n-2 with entries in [0, n); sizes 0..=2 take the empty
    /// sequence.
    pub fn from_prufer(vertices: &LiteralSet, seq: &[usize]) -> Result<Self> {
        let n = vertices.len();
        if n <= 1 {
            if !seq.is_empty() {
                return Err(Error::contract("Prüfer sequence must be empty for n <= 1"));
            }
            return LiteralTree::new(vertices, Vec::new());
        }
        if seq.len() != n - 2 {
            return Err(Error::contract(format!(
                "Prüfer sequence for n={n} must have length {}, got {}",
                n - 2,
                seq.len()
            )));
        }
        if let Some(&bad) = seq.iter().find(|&&s| s >= n) {
            return Err(Error::contract(format!("Prüfer entry {bad} out of range for n={n}")));
        }
        let mut degree = vec![1usize; n];
        for &s in seq {
            degree[s] += 1;
        }
        let mut edges = Vec::with_capacity(n - 1);
        for &s in seq {
            let leaf = (0..n)
                .find(|&v| degree[v] == 1)
                .expect("a leaf always exists while decoding");
            edges.push((leaf, s));
            degree[leaf] -= 1;
            degree[s] -= 1;
        }
        let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
        edges.push((rest[0], rest[1]));
        LiteralTree::new(vertices, edges)
    }
}

impl fmt::Display for LiteralTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .edge_literals()
            .iter()
            .map(|(a, b)| format!("{a}-{b}"))
            .collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// All labelled trees on `bplus`, in lexicographic Prüfer-sequence order.
/// Guarded at n = 8; use [`enumerate_trees_unbounded`] to override.
pub fn enumerate_trees(bplus: &LiteralSet) -> Result<Vec<LiteralTree>> {
    if bplus.len() > TREE_ENUMERATION_LIMIT {
        return Err(Error::UnsupportedSize {
            what: "tree enumeration",
            limit: TREE_ENUMERATION_LIMIT,
            got: bplus.len(),
        });
    }
    enumerate_trees_unbounded(bplus)
}

/// Tree enumeration without the size guard.
pub fn enumerate_trees_unbounded(bplus: &LiteralSet) -> Result<Vec<LiteralTree>> {
    let n = bplus.len();
    if n <= 2 {
        return Ok(vec![LiteralTree::from_prufer(bplus, &[])?]);
    }
    let mut seq = vec![0usize; n - 2];
    let mut out = Vec::with_capacity(n.pow(n as u32 - 2));
    loop {
        out.push(LiteralTree::from_prufer(bplus, &seq)?);
        // next sequence in base-n counting order
        let mut pos = seq.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            seq[pos] += 1;
            if seq[pos] < n {
                break;
            }
            seq[pos] = 0;
        }
    }
}

/// Integer coefficients m over the subset lattice of a conjunction `b`,
/// representing the linear restriction sum m_S * beta_S > 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientVector {
    b: LiteralSet,
    /// Indexed by bitmask over b's sorted literal positions; mask 0 is
    /// the intercept.
    entries: Vec<i64>,
}

impl CoefficientVector {
    pub fn b(&self) -> &LiteralSet {
        &self.b
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn get(&self, mask: usize) -> i64 {
        self.entries[mask]
    }

    /// Subset label in the `b0`/`b1`/`b123` style used by reports: the
    /// intercept is `b0`, other subsets concatenate 1-based variable
    /// numbers.
    pub fn subset_label(&self, mask: usize) -> String {
        if mask == 0 {
            return "b0".to_string();
        }
        let mut s = String::from("b");
        for (i, lit) in self.b.literals().iter().enumerate() {
            if mask >> i & 1 == 1 {
                s.push_str(&(lit.var + 1).to_string());
            }
        }
        s
    }

    /// Renders the positivity condition with negative-coefficient terms
    /// moved to the right-hand side, e.g. `b123 > 2*b0 + b1 + b2 + b3`.
    pub fn inequality(&self) -> String {
        let mut lhs = Vec::new();
        let mut rhs = Vec::new();
        for (mask, &m) in self.entries.iter().enumerate() {
            if m == 0 {
                continue;
            }
            let label = self.subset_label(mask);
            let (side, mag) = if m > 0 { (&mut lhs, m) } else { (&mut rhs, -m) };
            if mag == 1 {
                side.push(label);
            } else {
                side.push(format!("{mag}*{label}"));
            }
        }
        let lhs = if lhs.is_empty() { "0".to_string() } else { lhs.join(" + ") };
        let rhs = if rhs.is_empty() { "0".to_string() } else { rhs.join(" + ") };
        format!("{lhs} > {rhs}")
    }
}

fn check_tree_spans(b: &LiteralSet, bplus: &LiteralSet, tree: &LiteralTree) -> Result<()> {
    if !bplus.is_subset_of(b) {
        return Err(Error::contract("bplus must be a subset of b"));
    }
    if tree.vertices() != bplus.literals() {
        return Err(Error::contract("tree must span exactly the literals of bplus"));
    }
    Ok(())
}

/// Coefficients of the irreducibility restriction for conjunction `b`
/// with monotone part `bplus` and a tree on it:
/// m_S = 1 - |b \ S| + |T| - sum of tree degrees over S∩bplus + number of
/// tree edges inside S∩bplus.
pub fn m_irred(b: &LiteralSet, bplus: &LiteralSet, tree: &LiteralTree) -> Result<CoefficientVector> {
    check_tree_spans(b, bplus, tree)?;
    let n = b.len();
    let lits = b.literals();
    // positions of bplus literals within b
    let plus_mask: usize = lits
        .iter()
        .enumerate()
        .filter(|(_, l)| bplus.contains(l))
        .map(|(i, _)| 1usize << i)
        .sum();
    let tree_edges = tree.edge_literals();
    let n_edges = tree_edges.len() as i64;
    let mut entries = Vec::with_capacity(1 << n);
    for mask in 0..1usize << n {
        let missing = (n - mask.count_ones() as usize) as i64;
        let inter = mask & plus_mask;
        let mut deg_sum = 0i64;
        for (i, lit) in lits.iter().enumerate() {
            if inter >> i & 1 == 1 {
                deg_sum += tree.degree(lit)? as i64;
            }
        }
        let mut edges_within = 0i64;
        for (a, bv) in &tree_edges {
            let ia = lits.iter().position(|l| l == a).expect("edge vertex in b");
            let ib = lits.iter().position(|l| l == bv).expect("edge vertex in b");
            if inter >> ia & 1 == 1 && inter >> ib & 1 == 1 {
                edges_within += 1;
            }
        }
        entries.push(1 - missing + n_edges - deg_sum + edges_within);
    }
    Ok(CoefficientVector { b: b.clone(), entries })
}

/// Coefficients of the singularity restriction:
/// m_sing_S = m_irred_S + |b' \ S| - (2^|b' \ S| - 1), with b' = b \ bplus.
pub fn m_sing(b: &LiteralSet, bplus: &LiteralSet, tree: &LiteralTree) -> Result<CoefficientVector> {
    let base = m_irred(b, bplus, tree)?;
    let lits = b.literals();
    let prime_mask: usize = lits
        .iter()
        .enumerate()
        .filter(|(_, l)| !bplus.contains(l))
        .map(|(i, _)| 1usize << i)
        .sum();
    let entries = base
        .entries
        .iter()
        .enumerate()
        .map(|(mask, &m)| {
            let outside = (prime_mask & !mask).count_ones() as i64;
            m + outside - ((1i64 << outside) - 1)
        })
        .collect();
    Ok(CoefficientVector { b: b.clone(), entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lset(s: &str) -> LiteralSet {
        LiteralSet::parse(s).unwrap()
    }

    #[test]
    fn prufer_decode_examples() {
        let b3 = lset("X1,X2,X3");
        // seq=(0): star at vertex 0, i.e. path X2-X1-X3.
        let t = LiteralTree::from_prufer(&b3, &[0]).unwrap();
        assert_eq!(t.edges(), &[(0, 1), (0, 2)]);
        // n=2: the single edge.
        let b2 = lset("X1,X2");
        let t = LiteralTree::from_prufer(&b2, &[]).unwrap();
        assert_eq!(t.edges(), &[(0, 1)]);
        // malformed sequences
        assert!(LiteralTree::from_prufer(&b3, &[]).is_err());
        assert!(LiteralTree::from_prufer(&b3, &[7]).is_err());
    }

    #[test]
    fn prufer_decode_is_injective_at_n4() {
        let b4 = lset("X1,X2,X3,X4");
        let trees = enumerate_trees(&b4).unwrap();
        assert_eq!(trees.len(), 16);
        let mut edge_sets: Vec<_> = trees.iter().map(|t| t.edges().to_vec()).collect();
        edge_sets.sort();
        edge_sets.dedup();
        assert_eq!(edge_sets.len(), 16);
    }

    #[test]
    fn enumeration_counts_and_degenerate_sizes() {
        assert_eq!(enumerate_trees(&lset("X1,X2")).unwrap().len(), 1);
        assert_eq!(enumerate_trees(&lset("X1,X2,X3")).unwrap().len(), 3);
        assert_eq!(enumerate_trees(&LiteralSet::empty()).unwrap().len(), 1);
        let single = enumerate_trees(&lset("X5")).unwrap();
        assert_eq!(single.len(), 1);
        assert!(single[0].edges().is_empty());
        let big = lset("X1,X2,X3,X4,X5,X6,X7,X8,X9");
        assert!(matches!(
            enumerate_trees(&big),
            Err(Error::UnsupportedSize { .. })
        ));
    }

    #[test]
    fn three_trees_on_three_literals() {
        let b3 = lset("X1,X2,X3");
        let trees = enumerate_trees(&b3).unwrap();
        let mut sets: Vec<_> = trees.iter().map(|t| t.edges().to_vec()).collect();
        sets.sort();
        assert_eq!(
            sets,
            vec![
                vec![(0, 1), (0, 2)], // X2-X1-X3
                vec![(0, 1), (1, 2)], // X1-X2-X3
                vec![(0, 2), (1, 2)], // X1-X3-X2
            ]
        );
    }

    #[test]
    fn degree_examples() {
        let b3 = lset("X1,X2,X3");
        let path = LiteralTree::new(&b3, vec![(0, 1), (1, 2)]).unwrap();
        assert_eq!(path.degree(&Literal::pos(1)).unwrap(), 2);
        let total: usize = (0..3).map(|v| path.degree(&Literal::pos(v)).unwrap()).sum();
        assert_eq!(total, 2 * (3 - 1));
        let b4 = lset("X1,X2,X3,X4");
        let star = LiteralTree::new(&b4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(star.degree(&Literal::pos(0)).unwrap(), 3);
        assert!(star.degree(&Literal::pos(9)).is_err());
    }

    #[test]
    fn edge_bijection_examples() {
        let b3 = lset("X1,X2,X3");
        let path = LiteralTree::new(&b3, vec![(0, 1), (1, 2)]).unwrap();
        let map = path.edge_bijection(&Literal::pos(0)).unwrap();
        assert_eq!(map[&Literal::pos(1)], (Literal::pos(0), Literal::pos(1)));
        assert_eq!(map[&Literal::pos(2)], (Literal::pos(1), Literal::pos(2)));

        let b2 = lset("X1,X2");
        let edge = LiteralTree::new(&b2, vec![(0, 1)]).unwrap();
        let map = edge.edge_bijection(&Literal::pos(1)).unwrap();
        assert_eq!(map[&Literal::pos(0)], (Literal::pos(0), Literal::pos(1)));
        assert!(edge.edge_bijection(&Literal::pos(5)).is_err());

        // Star rooted at the center: each leaf maps to its own spoke.
        let b4 = lset("X1,X2,X3,X4");
        let star = LiteralTree::new(&b4, vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        let map = star.edge_bijection(&Literal::pos(0)).unwrap();
        for leaf in 1..4 {
            assert_eq!(map[&Literal::pos(leaf)], (Literal::pos(0), Literal::pos(leaf)));
        }
    }

    #[test]
    fn edge_bijection_is_bijective_up_to_n5() {
        for k in 1..=5usize {
            let b = LiteralSet::new((0..k).map(Literal::pos).collect()).unwrap();
            for tree in enumerate_trees(&b).unwrap() {
                for root in b.literals() {
                    let map = tree.edge_bijection(root).unwrap();
                    assert_eq!(map.len(), k - 1);
                    let mut images: Vec<_> = map.values().cloned().collect();
                    images.sort();
                    images.dedup();
                    assert_eq!(images.len(), tree.edges().len());
                }
            }
        }
    }

    #[test]
    fn m_irred_printed_examples() {
        // k=2 with both literals monotone: condition b12 > 0.
        let b = lset("X1,X2");
        let edge = LiteralTree::new(&b, vec![(0, 1)]).unwrap();
        let m = m_irred(&b, &b, &edge).unwrap();
        assert_eq!(m.entries(), &[0, 0, 0, 1]);
        assert_eq!(m.inequality(), "b12 > 0");

        // k=2 without monotonicity: condition b12 > b0.
        let empty_tree = LiteralTree::new(&LiteralSet::empty(), vec![]).unwrap();
        let m = m_irred(&b, &LiteralSet::empty(), &empty_tree).unwrap();
        assert_eq!(m.entries(), &[-1, 0, 0, 1]);
        assert_eq!(m.inequality(), "b12 > b0");

        // k=3 without monotonicity: b123 > 2*b0 + b1 + b2 + b3.
        let b3 = lset("X1,X2,X3");
        let m = m_irred(&b3, &LiteralSet::empty(), &empty_tree).unwrap();
        assert_eq!(m.get(0), -2);
        assert_eq!(m.get(0b001), -1);
        assert_eq!(m.get(0b011), 0);
        assert_eq!(m.get(0b111), 1);
        assert_eq!(m.inequality(), "b123 > 2*b0 + b1 + b2 + b3");
    }

    #[test]
    fn m_sing_printed_examples() {
        let b = lset("X1,X2");
        let empty_tree = LiteralTree::new(&LiteralSet::empty(), vec![]).unwrap();
        let m = m_sing(&b, &LiteralSet::empty(), &empty_tree).unwrap();
        assert_eq!(m.get(0), -2);
        assert_eq!(m.inequality(), "b12 > 2*b0");

        let b3 = lset("X1,X2,X3");
        let m = m_sing(&b3, &LiteralSet::empty(), &empty_tree).unwrap();
        assert_eq!(m.get(0), -6);
        assert_eq!(m.get(0b001), -2);
        assert_eq!(m.get(0b011), 0);
        assert_eq!(m.get(0b111), 1);
        assert_eq!(m.inequality(), "b123 > 6*b0 + 2*b1 + 2*b2 + 2*b3");

        // With b' empty the correction vanishes for every subset.
        let edge = LiteralTree::new(&b, vec![(0, 1)]).unwrap();
        assert_eq!(
            m_sing(&b, &b, &edge).unwrap().entries(),
            m_irred(&b, &b, &edge).unwrap().entries()
        );
    }

    #[test]
    fn tree_vertex_mismatch_is_error() {
        let b3 = lset("X1,X2,X3");
        let b2 = lset("X1,X2");
        let edge = LiteralTree::new(&b2, vec![(0, 1)]).unwrap();
        assert!(m_irred(&b3, &b2.union(&lset("X9")).unwrap(), &edge).is_err());
        assert!(m_irred(&b3, &lset("X1,X3"), &edge).is_err());
    }
}
