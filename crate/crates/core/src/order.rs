//! Finite partial orders over string identifiers.
//!
//! Edges are always `(lower, higher)`: `higher` sits above `lower` in the
//! Hasse diagram and carries the higher priority. A [`Poset`] stores the
//! reflexive-transitive closure as a dense matrix and exposes the transitive
//! reduction as its canonical edge set, so two posets compare equal exactly
//! when their orders are equal.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("relation is not antisymmetric: cycle {}", .cycle.join(" <= "))]
    InvalidPoset { cycle: Vec<String> },
    #[error("node `{0}` not found")]
    NodeNotFound(String),
    #[error("duplicate node `{0}`")]
    DuplicateNode(String),
    #[error("height of an empty set is undefined")]
    EmptySet,
}

/// A finite poset. Nodes are kept sorted lexicographically by id.
#[derive(Clone, PartialEq, Eq)]
pub struct Poset {
    ids: Vec<String>,
    index: BTreeMap<String, usize>,
    /// `leq[a * n + b]` holds iff `ids[a] <= ids[b]`.
    leq: Vec<bool>,
}

/// JSON literal: `{"nodes": [...], "edges": [[lower, higher], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct PosetLiteral {
    pub nodes: Vec<String>,
    #[serde(default)]
    pub edges: Vec<(String, String)>,
}

impl Poset {
    pub fn empty() -> Self {
        Poset { ids: Vec::new(), index: BTreeMap::new(), leq: Vec::new() }
    }

    /// Builds a poset from nodes and `(lower, higher)` edges. Redundant edges
    /// are accepted; the stored form is canonical.
    pub fn new<N, E, S>(nodes: N, edges: E) -> Result<Self, OrderError>
    where
        N: IntoIterator<Item = S>,
        S: Into<String>,
        E: IntoIterator<Item = (S, S)>,
    {
        let mut ids: Vec<String> = Vec::new();
        let mut seen = BTreeSet::new();
        for node in nodes {
            let node = node.into();
            if !seen.insert(node.clone()) {
                return Err(OrderError::DuplicateNode(node));
            }
            ids.push(node);
        }
        ids.sort();
        let index: BTreeMap<String, usize> =
            ids.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();
        let n = ids.len();
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        let mut raw = Vec::new();
        for (lo, hi) in edges {
            let (lo, hi): (String, String) = (lo.into(), hi.into());
            let a = *index.get(&lo).ok_or_else(|| OrderError::NodeNotFound(lo.clone()))?;
            let b = *index.get(&hi).ok_or_else(|| OrderError::NodeNotFound(hi.clone()))?;
            leq[a * n + b] = true;
            raw.push((lo, hi));
        }
        // Warshall
        for k in 0..n {
            for i in 0..n {
                if !leq[i * n + k] {
                    continue;
                }
                for j in 0..n {
                    if leq[k * n + j] {
                        leq[i * n + j] = true;
                    }
                }
            }
        }
        for a in 0..n {
            for b in (a + 1)..n {
                if leq[a * n + b] && leq[b * n + a] {
                    let cycle = find_cycle(&ids, &raw)
                        .unwrap_or_else(|| vec![ids[a].clone(), ids[b].clone(), ids[a].clone()]);
                    return Err(OrderError::InvalidPoset { cycle });
                }
            }
        }
        Ok(Poset { ids, index, leq })
    }

    pub fn from_literal(lit: &PosetLiteral) -> Result<Self, OrderError> {
        Poset::new(
            lit.nodes.iter().cloned(),
            lit.edges.iter().map(|(a, b)| (a.clone(), b.clone())),
        )
    }

    pub fn to_literal(&self) -> PosetLiteral {
        PosetLiteral { nodes: self.ids.clone(), edges: self.hasse_edges() }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Node ids in lexicographic order.
    pub fn nodes(&self) -> &[String] {
        &self.ids
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn index_of(&self, id: &str) -> Result<usize, OrderError> {
        self.index.get(id).copied().ok_or_else(|| OrderError::NodeNotFound(id.to_string()))
    }

    /// `a <= b` by index.
    #[inline]
    pub fn leq_idx(&self, a: usize, b: usize) -> bool {
        self.leq[a * self.ids.len() + b]
    }

    #[inline]
    pub fn lt_idx(&self, a: usize, b: usize) -> bool {
        a != b && self.leq_idx(a, b)
    }

    pub fn leq(&self, a: &str, b: &str) -> Result<bool, OrderError> {
        Ok(self.leq_idx(self.index_of(a)?, self.index_of(b)?))
    }

    pub fn lt(&self, a: &str, b: &str) -> Result<bool, OrderError> {
        Ok(self.lt_idx(self.index_of(a)?, self.index_of(b)?))
    }

    pub fn comparable(&self, a: &str, b: &str) -> Result<bool, OrderError> {
        let (a, b) = (self.index_of(a)?, self.index_of(b)?);
        Ok(self.leq_idx(a, b) || self.leq_idx(b, a))
    }

    /// The reflexive-transitive closure as `(lower, higher)` pairs.
    pub fn transitive_closure(&self) -> BTreeSet<(String, String)> {
        let n = self.ids.len();
        let mut out = BTreeSet::new();
        for a in 0..n {
            for b in 0..n {
                if self.leq_idx(a, b) {
                    out.insert((self.ids[a].clone(), self.ids[b].clone()));
                }
            }
        }
        out
    }

    /// Hasse edges (covering pairs), sorted.
    pub fn hasse_edges(&self) -> Vec<(String, String)> {
        let n = self.ids.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if !self.lt_idx(a, b) {
                    continue;
                }
                let covered = (0..n).any(|c| self.lt_idx(a, c) && self.lt_idx(c, b));
                if !covered {
                    out.push((self.ids[a].clone(), self.ids[b].clone()));
                }
            }
        }
        out
    }

    /// `{x : n <= x}`, including `n`.
    pub fn upper_closure(&self, id: &str) -> Result<BTreeSet<String>, OrderError> {
        let a = self.index_of(id)?;
        Ok((0..self.ids.len())
            .filter(|&b| self.leq_idx(a, b))
            .map(|b| self.ids[b].clone())
            .collect())
    }

    /// `{x : x <= n}`, including `n`.
    pub fn lower_closure(&self, id: &str) -> Result<BTreeSet<String>, OrderError> {
        let b = self.index_of(id)?;
        Ok((0..self.ids.len())
            .filter(|&a| self.leq_idx(a, b))
            .map(|a| self.ids[a].clone())
            .collect())
    }

    /// Maximum cardinality of a chain fully contained in `subset`.
    pub fn height<I, S>(&self, subset: I) -> Result<usize, OrderError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut idx = BTreeSet::new();
        for s in subset {
            idx.insert(self.index_of(s.as_ref())?);
        }
        if idx.is_empty() {
            return Err(OrderError::EmptySet);
        }
        Ok(self.height_idx(&idx.into_iter().collect::<Vec<_>>()))
    }

    pub(crate) fn height_idx(&self, subset: &[usize]) -> usize {
        // Sorting by the size of the lower closure is a linear extension.
        let mut order: Vec<usize> = subset.to_vec();
        order.sort_by_key(|&a| (0..self.ids.len()).filter(|&b| self.leq_idx(b, a)).count());
        let mut best = vec![1usize; order.len()];
        for i in 0..order.len() {
            for j in 0..i {
                if self.lt_idx(order[j], order[i]) && best[j] + 1 > best[i] {
                    best[i] = best[j] + 1;
                }
            }
        }
        best.into_iter().max().unwrap_or(0)
    }

    /// Height of the full poset (0 when empty).
    pub fn total_height(&self) -> usize {
        let all: Vec<usize> = (0..self.ids.len()).collect();
        self.height_idx(&all)
    }

    /// Rank of a node: the height of its upper closure. Maximal nodes have rank 1.
    pub fn rank_of(&self, id: &str) -> Result<usize, OrderError> {
        Ok(self.rank_idx(self.index_of(id)?))
    }

    pub(crate) fn rank_idx(&self, a: usize) -> usize {
        let up: Vec<usize> = (0..self.ids.len()).filter(|&b| self.leq_idx(a, b)).collect();
        self.height_idx(&up)
    }

    pub fn minimal_elements(&self) -> Vec<String> {
        let n = self.ids.len();
        (0..n)
            .filter(|&a| !(0..n).any(|b| self.lt_idx(b, a)))
            .map(|a| self.ids[a].clone())
            .collect()
    }

    pub fn maximal_elements(&self) -> Vec<String> {
        let n = self.ids.len();
        (0..n)
            .filter(|&a| !(0..n).any(|b| self.lt_idx(a, b)))
            .map(|a| self.ids[a].clone())
            .collect()
    }

    /// Returns a new poset with `lower <= higher` added.
    pub fn with_edge(&self, lower: &str, higher: &str) -> Result<Poset, OrderError> {
        self.index_of(lower)?;
        self.index_of(higher)?;
        let mut edges = self.hasse_edges();
        edges.push((lower.to_string(), higher.to_string()));
        Poset::new(self.ids.iter().cloned(), edges)
    }
}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Poset").field("nodes", &self.ids).field("hasse", &self.hasse_edges()).finish()
    }
}

impl Default for Poset {
    fn default() -> Self {
        Poset::empty()
    }
}

/// True iff the reflexive-transitive closure of `edges` over `nodes` is
/// antisymmetric and every endpoint is a node.
pub fn is_valid_poset<S: AsRef<str>>(nodes: &[S], edges: &[(S, S)]) -> bool {
    Poset::new(
        nodes.iter().map(|s| s.as_ref().to_string()),
        edges.iter().map(|(a, b)| (a.as_ref().to_string(), b.as_ref().to_string())),
    )
    .is_ok()
}

/// Finds a directed cycle among distinct nodes of a raw edge relation, if any.
/// Edges whose endpoints are missing from `nodes` are ignored.
pub fn find_cycle(nodes: &[String], edges: &[(String, String)]) -> Option<Vec<String>> {
    let index: BTreeMap<&str, usize> =
        nodes.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let mut adj = vec![BTreeSet::new(); nodes.len()];
    for (lo, hi) in edges {
        if let (Some(&a), Some(&b)) = (index.get(lo.as_str()), index.get(hi.as_str())) {
            if a != b {
                adj[a].insert(b);
            }
        }
    }
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; nodes.len()];
    let mut stack: Vec<usize> = Vec::new();
    fn dfs(
        v: usize,
        adj: &[BTreeSet<usize>],
        state: &mut [u8],
        stack: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        state[v] = 1;
        stack.push(v);
        for &w in &adj[v] {
            if state[w] == 1 {
                let pos = stack.iter().position(|&x| x == w).unwrap();
                let mut cyc = stack[pos..].to_vec();
                cyc.push(w);
                return Some(cyc);
            }
            if state[w] == 0 {
                if let Some(c) = dfs(w, adj, state, stack) {
                    return Some(c);
                }
            }
        }
        stack.pop();
        state[v] = 2;
        None
    }
    for v in 0..nodes.len() {
        if state[v] == 0 {
            if let Some(c) = dfs(v, &adj, &mut state, &mut stack) {
                return Some(c.into_iter().map(|i| nodes[i].clone()).collect());
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ambulance() -> Poset {
        // collision > time > {rules, comfort}
        Poset::new(
            ["collision", "time", "rules", "comfort"],
            [("time", "collision"), ("rules", "time"), ("comfort", "time")],
        )
        .unwrap()
    }

    fn diamond() -> Poset {
        Poset::new(["a", "b", "c", "d"], [("b", "a"), ("c", "a"), ("d", "b"), ("d", "c")]).unwrap()
    }

    #[test]
    fn closure_of_single_node_is_reflexive() {
        let p = Poset::new(["a"], Vec::<(&str, &str)>::new()).unwrap();
        let expected: BTreeSet<_> = [("a".to_string(), "a".to_string())].into_iter().collect();
        assert_eq!(p.transitive_closure(), expected);
    }

    #[test]
    fn closure_of_chain_adds_transitive_pair() {
        let p = Poset::new(["a", "b", "c"], [("a", "b"), ("b", "c")]).unwrap();
        let c = p.transitive_closure();
        assert!(c.contains(&("a".into(), "c".into())));
        assert_eq!(c.len(), 6);
    }

    #[test]
    fn two_cycle_is_rejected() {
        let err = Poset::new(["a", "b"], [("a", "b"), ("b", "a")]).unwrap_err();
        assert!(matches!(err, OrderError::InvalidPoset { .. }));
    }

    #[test]
    fn validity_checks() {
        let none: [&str; 0] = [];
        let no_edges: [(&str, &str); 0] = [];
        assert!(is_valid_poset(&none, &no_edges));
        assert!(is_valid_poset(&["a", "b", "c", "d"], &[("b", "a"), ("c", "a"), ("d", "b"), ("d", "c")]));
        assert!(!is_valid_poset(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("c", "a")]));
        assert!(!is_valid_poset(&["a"], &[("a", "zz")]));
    }

    #[test]
    fn redundant_edges_reduce_to_hasse() {
        let p = Poset::new(["a", "b", "c"], [("a", "b"), ("b", "c"), ("a", "c")]).unwrap();
        assert_eq!(p.hasse_edges(), vec![("a".into(), "b".into()), ("b".into(), "c".into())]);
        let q = Poset::new(["a", "b", "c"], [("a", "b"), ("b", "c")]).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn upper_closures() {
        let p = ambulance();
        assert_eq!(p.upper_closure("collision").unwrap().len(), 1);
        let up: Vec<_> = p.upper_closure("rules").unwrap().into_iter().collect();
        assert_eq!(up, vec!["collision", "rules", "time"]);
        let anti = Poset::new(["x", "y", "z"], Vec::<(&str, &str)>::new()).unwrap();
        assert_eq!(anti.upper_closure("y").unwrap().len(), 1);
        assert_eq!(p.upper_closure("nope"), Err(OrderError::NodeNotFound("nope".into())));
    }

    #[test]
    fn heights_and_ranks() {
        let p = ambulance();
        assert_eq!(p.height(["time"]).unwrap(), 1);
        assert_eq!(p.height(p.nodes()).unwrap(), 3);
        assert_eq!(p.height(Vec::<String>::new()), Err(OrderError::EmptySet));
        let anti = Poset::new(["a", "b", "c", "d"], Vec::<(&str, &str)>::new()).unwrap();
        assert_eq!(anti.height(anti.nodes()).unwrap(), 1);

        assert_eq!(p.rank_of("collision").unwrap(), 1);
        assert_eq!(p.rank_of("comfort").unwrap(), 3);
        assert_eq!(diamond().rank_of("d").unwrap(), 3);
        assert_eq!(diamond().rank_of("b").unwrap(), 2);
    }

    #[test]
    fn extremal_elements() {
        assert_eq!(ambulance().minimal_elements(), vec!["comfort", "rules"]);
        assert_eq!(ambulance().maximal_elements(), vec!["collision"]);
        let chain = Poset::new(["a", "b", "c"], [("a", "b"), ("b", "c")]).unwrap();
        assert_eq!(chain.minimal_elements(), vec!["a"]);
        let anti = Poset::new(["a", "b"], Vec::<(&str, &str)>::new()).unwrap();
        assert_eq!(anti.minimal_elements(), vec!["a", "b"]);
    }

    #[test]
    fn cycle_finder_reports_loop() {
        let nodes: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let edges = vec![
            ("a".to_string(), "b".to_string()),
            ("b".to_string(), "c".to_string()),
            ("c".to_string(), "a".to_string()),
        ];
        let cyc = find_cycle(&nodes, &edges).unwrap();
        assert_eq!(cyc.first(), cyc.last());
        assert_eq!(cyc.len(), 4);
        assert!(find_cycle(&nodes, &edges[..2]).is_none());
    }
}
