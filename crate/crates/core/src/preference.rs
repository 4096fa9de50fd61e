//! Posetal preferences and the order they induce on outcome vectors.
//!
//! An outcome `x` is at least as good as `y` (`x ≾ y`) when every metric on
//! which `x` is worse is compensated by some strictly higher-priority metric
//! on which `x` is better. On a chain this is the lexicographic order, on an
//! antichain it is weak Pareto dominance.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::order::{OrderError, Poset};

/// Largest carrier a compiled preference supports (one bit per node).
pub const MAX_COMPILED_NODES: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PreferenceError {
    #[error("metric `{0}` not found")]
    NodeNotFound(String),
    #[error("metric `{0}` already present")]
    DuplicateNode(String),
    #[error("adding `{lower}` below `{higher}` would create a cycle")]
    WouldBreakPoset { lower: String, higher: String },
    #[error("`{0}` and `{1}` are comparable; only uncomparable metrics can be aggregated")]
    NotUncomparable(String, String),
    #[error("outcome has no value for metric `{0}`")]
    IncompleteOutcome(String),
    #[error("outcome value for `{0}` is not finite")]
    NonFinite(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("preference has {0} nodes; at most {MAX_COMPILED_NODES} are supported")]
    TooManyMetrics(usize),
    #[error(transparent)]
    Order(#[from] OrderError),
}

/// Metric id to cost. Lower is better.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OutcomeVector(pub BTreeMap<String, f64>);

impl OutcomeVector {
    pub fn new() -> Self {
        OutcomeVector(BTreeMap::new())
    }

    pub fn get(&self, metric: &str) -> Option<f64> {
        self.0.get(metric).copied()
    }

    pub fn insert(&mut self, metric: impl Into<String>, value: f64) {
        self.0.insert(metric.into(), value);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &f64)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Into<String>> FromIterator<(S, f64)> for OutcomeVector {
    fn from_iter<T: IntoIterator<Item = (S, f64)>>(iter: T) -> Self {
        OutcomeVector(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

/// The four possible answers when comparing two outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparisonResult {
    FirstPreferred,
    SecondPreferred,
    Indifferent,
    Uncomparable,
}

impl ComparisonResult {
    /// The answer for the swapped pair.
    pub fn swap(self) -> Self {
        match self {
            ComparisonResult::FirstPreferred => ComparisonResult::SecondPreferred,
            ComparisonResult::SecondPreferred => ComparisonResult::FirstPreferred,
            other => other,
        }
    }

    pub fn is_strict(self) -> bool {
        matches!(self, ComparisonResult::FirstPreferred | ComparisonResult::SecondPreferred)
    }

    /// `x ≾ y` given the answer for `(x, y)`.
    pub fn first_weakly_preferred(self) -> bool {
        matches!(self, ComparisonResult::FirstPreferred | ComparisonResult::Indifferent)
    }

    fn from_weak(x_le_y: bool, y_le_x: bool) -> Self {
        match (x_le_y, y_le_x) {
            (true, false) => ComparisonResult::FirstPreferred,
            (false, true) => ComparisonResult::SecondPreferred,
            (true, true) => ComparisonResult::Indifferent,
            (false, false) => ComparisonResult::Uncomparable,
        }
    }
}

/// Strictly monotone combiner `a·v1 + b·v2` merging two uncomparable metrics
/// into one node. Targets are stored in lexicographic order with their
/// weights kept attached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregationMap {
    pub left: String,
    pub right: String,
    pub weights: [f64; 2],
}

impl AggregationMap {
    /// Unit-weight sum.
    pub fn sum(m1: &str, m2: &str) -> Self {
        Self::weighted(m1, m2, 1.0, 1.0).expect("unit weights are valid")
    }

    pub fn weighted(m1: &str, m2: &str, a: f64, b: f64) -> Result<Self, PreferenceError> {
        if !(a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0) {
            return Err(PreferenceError::InvalidArgument(format!(
                "aggregation coefficients must be positive and finite, got ({a}, {b})"
            )));
        }
        if m1 == m2 {
            return Err(PreferenceError::InvalidArgument(format!("cannot aggregate `{m1}` with itself")));
        }
        Ok(if m1 <= m2 {
            AggregationMap { left: m1.to_string(), right: m2.to_string(), weights: [a, b] }
        } else {
            AggregationMap { left: m2.to_string(), right: m1.to_string(), weights: [b, a] }
        })
    }

    /// Deterministic id of the merged node: `agg(<left>,<right>)`.
    pub fn node_id(&self) -> String {
        format!("agg({},{})", self.left, self.right)
    }

    /// Combines the value of `left` and the value of `right`.
    pub fn apply(&self, left: f64, right: f64) -> f64 {
        self.weights[0] * left + self.weights[1] * right
    }
}

/// `a·v1 + b·v2` for the map's targets in stored order.
pub fn aggregate_value(agg: &AggregationMap, v1: f64, v2: f64) -> f64 {
    agg.apply(v1, v2)
}

/// A preference-refining operation, as it appears in operation logs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum RefinementOp {
    PriorityRefine { lower: String, higher: String },
    Aggregate {
        left: String,
        right: String,
        #[serde(default = "unit_weights")]
        weights: [f64; 2],
    },
    Augment { metric: String },
}

fn unit_weights() -> [f64; 2] {
    [1.0, 1.0]
}

/// A player's preference: a poset over metric ids, some of which may be
/// aggregated nodes whose value derives from other metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct Preference {
    poset: Poset,
    /// Every aggregated id reachable from the carrier, including nested ones
    /// that no longer appear as poset nodes.
    aggregations: BTreeMap<String, AggregationMap>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct PreferenceLiteral {
    pub nodes: Vec<String>,
    #[serde(default)]
    pub edges: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub aggregations: Vec<AggregationLiteral>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregationLiteral {
    pub id: String,
    pub left: String,
    pub right: String,
    #[serde(default = "unit_weights")]
    pub weights: [f64; 2],
}

impl Preference {
    pub fn new(poset: Poset) -> Self {
        Preference { poset, aggregations: BTreeMap::new() }
    }

    /// Convenience constructor from `(lower, higher)` edges.
    pub fn from_edges<S: Into<String> + Clone>(
        nodes: &[S],
        edges: &[(S, S)],
    ) -> Result<Self, PreferenceError> {
        Ok(Preference::new(Poset::new(nodes.iter().cloned(), edges.iter().cloned())?))
    }

    pub fn empty() -> Self {
        Preference::new(Poset::empty())
    }

    pub fn from_literal(lit: &PreferenceLiteral) -> Result<Self, PreferenceError> {
        let poset = Poset::new(
            lit.nodes.iter().cloned(),
            lit.edges.iter().map(|(a, b)| (a.clone(), b.clone())),
        )?;
        let mut aggregations = BTreeMap::new();
        for a in &lit.aggregations {
            let map = AggregationMap::weighted(&a.left, &a.right, a.weights[0], a.weights[1])?;
            // weighted() may reorder; keep the literal's weight attachment
            let map = if map.left == a.left {
                map
            } else {
                AggregationMap::weighted(&a.right, &a.left, a.weights[1], a.weights[0])?
            };
            if map.node_id() != a.id {
                return Err(PreferenceError::InvalidArgument(format!(
                    "aggregation id `{}` should be `{}`",
                    a.id,
                    map.node_id()
                )));
            }
            if aggregations.insert(a.id.clone(), map).is_some() {
                return Err(PreferenceError::DuplicateNode(a.id.clone()));
            }
        }
        let pref = Preference { poset, aggregations };
        pref.leaves()?;
        Ok(pref)
    }

    pub fn to_literal(&self) -> PreferenceLiteral {
        let lit = self.poset.to_literal();
        PreferenceLiteral {
            nodes: lit.nodes,
            edges: lit.edges,
            aggregations: self
                .aggregations
                .iter()
                .map(|(id, m)| AggregationLiteral {
                    id: id.clone(),
                    left: m.left.clone(),
                    right: m.right.clone(),
                    weights: m.weights,
                })
                .collect(),
        }
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    /// Poset node ids (the carrier set), sorted.
    pub fn carrier(&self) -> &[String] {
        self.poset.nodes()
    }

    pub fn aggregations(&self) -> &BTreeMap<String, AggregationMap> {
        &self.aggregations
    }

    pub fn is_aggregated(&self, id: &str) -> bool {
        self.aggregations.contains_key(id)
    }

    /// Raw metric ids an outcome vector must provide for this preference.
    pub fn leaves(&self) -> Result<BTreeSet<String>, PreferenceError> {
        let mut out = BTreeSet::new();
        for node in self.poset.nodes() {
            self.collect_leaves(node, &mut out, 0)?;
        }
        Ok(out)
    }

    /// Raw metric ids underlying one node.
    pub fn leaves_of(&self, node: &str) -> Result<BTreeSet<String>, PreferenceError> {
        let mut out = BTreeSet::new();
        self.collect_leaves(node, &mut out, 0)?;
        Ok(out)
    }

    fn collect_leaves(
        &self,
        id: &str,
        out: &mut BTreeSet<String>,
        depth: usize,
    ) -> Result<(), PreferenceError> {
        if depth > self.aggregations.len() {
            return Err(PreferenceError::InvalidArgument(format!("aggregation `{id}` is recursive")));
        }
        match self.aggregations.get(id) {
            Some(m) => {
                self.collect_leaves(&m.left, out, depth + 1)?;
                self.collect_leaves(&m.right, out, depth + 1)
            }
            None => {
                out.insert(id.to_string());
                Ok(())
            }
        }
    }

    /// Value of a node (raw or aggregated) for an outcome.
    pub fn eval(&self, node: &str, outcome: &OutcomeVector) -> Result<f64, PreferenceError> {
        match self.aggregations.get(node) {
            Some(m) => Ok(m.apply(self.eval(&m.left, outcome)?, self.eval(&m.right, outcome)?)),
            None => {
                let v = outcome
                    .get(node)
                    .ok_or_else(|| PreferenceError::IncompleteOutcome(node.to_string()))?;
                if !v.is_finite() {
                    return Err(PreferenceError::NonFinite(node.to_string()));
                }
                Ok(v)
            }
        }
    }

    /// Value of a node from raw per-metric values (same recursion as [`eval`]).
    ///
    /// [`eval`]: Preference::eval
    pub fn eval_with(&self, node: &str, raw: &dyn Fn(&str) -> f64) -> f64 {
        match self.aggregations.get(node) {
            Some(m) => m.apply(self.eval_with(&m.left, raw), self.eval_with(&m.right, raw)),
            None => raw(node),
        }
    }

    pub fn compile(&self) -> Result<CompiledPreference, PreferenceError> {
        CompiledPreference::new(self)
    }

    /// Adds `lower ⪯ higher`.
    pub fn priority_refine(&self, lower: &str, higher: &str) -> Result<Preference, PreferenceError> {
        for id in [lower, higher] {
            if !self.poset.contains(id) {
                return Err(PreferenceError::NodeNotFound(id.to_string()));
            }
        }
        let poset = self.poset.with_edge(lower, higher).map_err(|e| match e {
            OrderError::InvalidPoset { .. } => PreferenceError::WouldBreakPoset {
                lower: lower.to_string(),
                higher: higher.to_string(),
            },
            other => other.into(),
        })?;
        Ok(Preference { poset, aggregations: self.aggregations.clone() })
    }

    /// Replaces two uncomparable nodes by one aggregated node that inherits
    /// every relation either of them had.
    pub fn aggregate(&self, agg: &AggregationMap) -> Result<Preference, PreferenceError> {
        let (m1, m2) = (agg.left.as_str(), agg.right.as_str());
        for id in [m1, m2] {
            if !self.poset.contains(id) {
                return Err(PreferenceError::NodeNotFound(id.to_string()));
            }
        }
        if self.poset.comparable(m1, m2)? {
            return Err(PreferenceError::NotUncomparable(m1.to_string(), m2.to_string()));
        }
        let new_id = agg.node_id();
        if self.poset.contains(&new_id) || self.leaves()?.contains(&new_id) {
            return Err(PreferenceError::DuplicateNode(new_id));
        }
        let rename = |id: &String| -> String {
            if id == m1 || id == m2 {
                new_id.clone()
            } else {
                id.clone()
            }
        };
        let nodes: BTreeSet<String> = self.poset.nodes().iter().map(rename).collect();
        let edges: Vec<(String, String)> = self
            .poset
            .hasse_edges()
            .iter()
            .map(|(lo, hi)| (rename(lo), rename(hi)))
            .filter(|(lo, hi)| lo != hi)
            .collect();
        let poset = Poset::new(nodes, edges)?;
        let mut aggregations = self.aggregations.clone();
        aggregations.insert(new_id, agg.clone());
        Ok(Preference { poset, aggregations })
    }

    /// Adds a new metric below every existing one.
    pub fn augment(&self, metric: &str) -> Result<Preference, PreferenceError> {
        if self.poset.contains(metric)
            || self.aggregations.contains_key(metric)
            || self.leaves()?.contains(metric)
        {
            return Err(PreferenceError::DuplicateNode(metric.to_string()));
        }
        let mut nodes: Vec<String> = self.poset.nodes().to_vec();
        let mut edges = self.poset.hasse_edges();
        for m in self.poset.minimal_elements() {
            edges.push((metric.to_string(), m));
        }
        nodes.push(metric.to_string());
        Ok(Preference { poset: Poset::new(nodes, edges)?, aggregations: self.aggregations.clone() })
    }

    pub fn apply(&self, op: &RefinementOp) -> Result<Preference, PreferenceError> {
        match op {
            RefinementOp::PriorityRefine { lower, higher } => self.priority_refine(lower, higher),
            RefinementOp::Aggregate { left, right, weights } => {
                self.aggregate(&AggregationMap::weighted(left, right, weights[0], weights[1])?)
            }
            RefinementOp::Augment { metric } => self.augment(metric),
        }
    }

    pub fn apply_all(&self, ops: &[RefinementOp]) -> Result<Preference, PreferenceError> {
        ops.iter().try_fold(self.clone(), |p, op| p.apply(op))
    }

    /// Rank of every carrier node (1 = top priority).
    pub fn metric_ranks(&self) -> BTreeMap<String, usize> {
        self.poset
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), self.poset.rank_idx(i)))
            .collect()
    }
}

impl fmt::Display for Preference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> =
            self.poset.hasse_edges().iter().map(|(lo, hi)| format!("{lo} < {hi}")).collect();
        write!(f, "{{{}}} [{}]", self.poset.nodes().join(", "), edges.join(", "))
    }
}

#[derive(Debug, Clone)]
enum Expr {
    Leaf(usize),
    Sum(f64, Box<Expr>, f64, Box<Expr>),
}

impl Expr {
    fn eval(&self, leaves: &[f64]) -> f64 {
        match self {
            Expr::Leaf(i) => leaves[*i],
            Expr::Sum(a, l, b, r) => a * l.eval(leaves) + b * r.eval(leaves),
        }
    }
}

/// Bitmask form of a preference for tight comparison loops.
#[derive(Debug, Clone)]
pub struct CompiledPreference {
    nodes: Vec<String>,
    /// `above[m]`: nodes strictly above `m`.
    above: Vec<u64>,
    ranks: Vec<usize>,
    height: usize,
    leaves: Vec<String>,
    exprs: Vec<Expr>,
}

impl CompiledPreference {
    fn new(pref: &Preference) -> Result<Self, PreferenceError> {
        let poset = &pref.poset;
        let n = poset.len();
        if n > MAX_COMPILED_NODES {
            return Err(PreferenceError::TooManyMetrics(n));
        }
        let above = (0..n)
            .map(|a| (0..n).filter(|&b| poset.lt_idx(a, b)).fold(0u64, |m, b| m | (1 << b)))
            .collect();
        let leaves: Vec<String> = pref.leaves()?.into_iter().collect();
        let leaf_index: BTreeMap<&str, usize> =
            leaves.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        fn build(pref: &Preference, id: &str, idx: &BTreeMap<&str, usize>) -> Expr {
            match pref.aggregations.get(id) {
                Some(m) => Expr::Sum(
                    m.weights[0],
                    Box::new(build(pref, &m.left, idx)),
                    m.weights[1],
                    Box::new(build(pref, &m.right, idx)),
                ),
                None => Expr::Leaf(idx[id]),
            }
        }
        let exprs = poset.nodes().iter().map(|id| build(pref, id, &leaf_index)).collect();
        Ok(CompiledPreference {
            nodes: poset.nodes().to_vec(),
            above,
            ranks: (0..n).map(|i| poset.rank_idx(i)).collect(),
            height: poset.total_height(),
            leaves,
            exprs,
        })
    }

    /// Bitmask of the nodes strictly above node `m`.
    pub fn above_mask(&self, m: usize) -> u64 {
        self.above[m]
    }

    /// Rank of node `m` (1 = top priority).
    pub fn rank(&self, m: usize) -> usize {
        self.ranks[m]
    }

    /// Height of the whole poset (0 when empty).
    pub fn height(&self) -> usize {
        self.height
    }

    /// Node values from raw leaf values given in [`leaves`] order.
    ///
    /// [`leaves`]: CompiledPreference::leaves
    pub fn values_from_leaves(&self, raw: &[f64]) -> Vec<f64> {
        self.exprs.iter().map(|e| e.eval(raw)).collect()
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn leaves(&self) -> &[String] {
        &self.leaves
    }

    /// Node values (in [`nodes`] order) for an outcome.
    ///
    /// [`nodes`]: CompiledPreference::nodes
    pub fn values(&self, outcome: &OutcomeVector) -> Result<Vec<f64>, PreferenceError> {
        let mut raw = Vec::with_capacity(self.leaves.len());
        for leaf in &self.leaves {
            let v = outcome.get(leaf).ok_or_else(|| PreferenceError::IncompleteOutcome(leaf.clone()))?;
            if !v.is_finite() {
                return Err(PreferenceError::NonFinite(leaf.clone()));
            }
            raw.push(v);
        }
        Ok(self.exprs.iter().map(|e| e.eval(&raw)).collect())
    }

    /// Induced-order comparison of two node-value vectors.
    pub fn compare_values(&self, x: &[f64], y: &[f64]) -> ComparisonResult {
        let mut worse = 0u64; // x worse than y
        let mut better = 0u64;
        for (m, (a, b)) in x.iter().zip(y).enumerate() {
            if a > b {
                worse |= 1 << m;
            } else if a < b {
                better |= 1 << m;
            }
        }
        ComparisonResult::from_weak(self.compensated(worse, better), self.compensated(better, worse))
    }

    /// Every node in `worse` has a strictly higher node in `better`.
    #[inline]
    fn compensated(&self, mut worse: u64, better: u64) -> bool {
        while worse != 0 {
            let m = worse.trailing_zeros() as usize;
            if self.above[m] & better == 0 {
                return false;
            }
            worse &= worse - 1;
        }
        true
    }

    pub fn compare(
        &self,
        x: &OutcomeVector,
        y: &OutcomeVector,
    ) -> Result<ComparisonResult, PreferenceError> {
        Ok(self.compare_values(&self.values(x)?, &self.values(y)?))
    }
}

/// Compares two outcomes under a preference. Metrics outside the
/// preference's carrier are ignored.
pub fn compare_outcomes(
    pref: &Preference,
    x: &OutcomeVector,
    y: &OutcomeVector,
) -> Result<ComparisonResult, PreferenceError> {
    pref.compile()?.compare(x, y)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementWitness {
    pub first: OutcomeVector,
    pub second: OutcomeVector,
    pub under_base: ComparisonResult,
    pub under_candidate: ComparisonResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum RefinementEvidence {
    /// No strict pair of `base` was broken by `candidate` on the searched pairs.
    RefinesSampled { pairs_checked: usize },
    RefutedWithWitness(RefinementWitness),
}

impl RefinementEvidence {
    pub fn is_refuted(&self) -> bool {
        matches!(self, RefinementEvidence::RefutedWithWitness(_))
    }
}

/// Searches for an outcome pair that `base` ranks strictly but `candidate`
/// does not rank the same way. Finding none is evidence that `candidate`
/// refines `base`; finding one refutes it.
///
/// Structured corner cases (all pairs of 0/1 vectors when the metric
/// universe is small) are always searched in addition to `samples` random
/// pairs.
pub fn compare_preferences(
    base: &Preference,
    candidate: &Preference,
    samples: usize,
    seed: u64,
) -> Result<RefinementEvidence, PreferenceError> {
    if samples == 0 {
        return Err(PreferenceError::InvalidArgument("samples must be positive".into()));
    }
    let cb = base.compile()?;
    let cc = candidate.compile()?;
    let universe: Vec<String> = base.leaves()?.union(&candidate.leaves()?).cloned().collect();
    let n = universe.len();
    let mut checked = 0usize;

    let mut check = |x: &[f64], y: &[f64]| -> Result<Option<RefinementWitness>, PreferenceError> {
        let xv: OutcomeVector = universe.iter().cloned().zip(x.iter().copied()).collect();
        let yv: OutcomeVector = universe.iter().cloned().zip(y.iter().copied()).collect();
        checked += 1;
        let rb = cb.compare(&xv, &yv)?;
        if !rb.is_strict() {
            return Ok(None);
        }
        let rc = cc.compare(&xv, &yv)?;
        if rc != rb {
            return Ok(Some(RefinementWitness { first: xv, second: yv, under_base: rb, under_candidate: rc }));
        }
        Ok(None)
    };

    if n <= 8 {
        let total = 1usize << n;
        let bits = |mask: usize| -> Vec<f64> { (0..n).map(|i| ((mask >> i) & 1) as f64).collect() };
        for a in 0..total {
            for b in 0..total {
                if let Some(w) = check(&bits(a), &bits(b))? {
                    return Ok(RefinementEvidence::RefutedWithWitness(w));
                }
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for s in 0..samples {
        let (x, y): (Vec<f64>, Vec<f64>) = match s % 3 {
            0 => (
                (0..n).map(|_| rng.gen_range(0..3) as f64).collect(),
                (0..n).map(|_| rng.gen_range(0..3) as f64).collect(),
            ),
            1 => (
                (0..n).map(|_| rng.gen_range(0.0..10.0)).collect(),
                (0..n).map(|_| rng.gen_range(0.0..10.0)).collect(),
            ),
            _ => {
                let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0..4) as f64).collect();
                let mut y = x.clone();
                for v in y.iter_mut() {
                    if rng.gen_bool(0.4) {
                        *v += rng.gen_range(-2.0..2.0f64).round();
                    }
                }
                (x, y)
            }
        };
        if let Some(w) = check(&x, &y)? {
            return Ok(RefinementEvidence::RefutedWithWitness(w));
        }
    }
    Ok(RefinementEvidence::RefinesSampled { pairs_checked: checked })
}
