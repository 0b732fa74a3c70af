//! Code parameters at the minimum-storage cooperative point, and repair contexts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 1-based storage node index.
pub type NodeId = usize;

/// Validated `{n, k, d, t, α, β, β′, B, q}` at the minimum-storage point:
/// `α = B/k` and `β = β′ = B/(k(d-k+t))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub t: usize,
    pub alpha: usize,
    pub beta: usize,
    pub beta_prime: usize,
    /// File size `B` in symbols.
    pub file_size: usize,
    /// Field order.
    pub q: u64,
}

impl CodeParams {
    /// Derives `α`, `β`, `β′` from `B` and checks every constraint.
    pub fn mscr(n: usize, k: usize, d: usize, t: usize, file_size: usize, q: u64) -> Result<Self> {
        if k == 0 || t == 0 {
            return Err(Error::InvalidParams("k and t must be positive".into()));
        }
        if n < d + t {
            return Err(Error::InvalidParams(format!("n = {n} < d + t = {}", d + t)));
        }
        if d < k {
            return Err(Error::InvalidParams(format!("d = {d} < k = {k}: no minimum-storage code exists")));
        }
        let denom = k * (d - k + t);
        if file_size == 0 || !file_size.is_multiple_of(denom) {
            return Err(Error::NonIntegralParams(format!("B = {file_size} is not a multiple of k(d-k+t) = {denom}")));
        }
        let beta = file_size / denom;
        Ok(CodeParams { n, k, d, t, alpha: file_size / k, beta, beta_prime: beta, file_size, q })
    }

    /// The `d = k`, `β = 1` family: `α = t`, `B = kt`.
    pub fn scalar_d_equals_k(n: usize, k: usize, t: usize, q: u64) -> Result<Self> {
        Self::mscr(n, k, k, t, k * t, q)
    }

    /// Symbols moved to repair one group: `t·d·β` downloads plus `t(t-1)·β′` exchanges.
    pub fn repair_bandwidth(&self) -> usize {
        self.t * self.d * self.beta + self.t * (self.t - 1) * self.beta_prime
    }
}

/// A repair group `C` (the `t` failed nodes) and its helper set `D`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RepairContext {
    group: Vec<NodeId>,
    helpers: Vec<NodeId>,
}

impl RepairContext {
    /// Checks `|C| = t`, `|D| = d`, disjointness and range; both sets are
    /// stored sorted.
    pub fn new(params: &CodeParams, group: &[NodeId], helpers: &[NodeId]) -> Result<Self> {
        let group = sorted_unique(group, params.n, "group")?;
        let helpers = sorted_unique(helpers, params.n, "helper set")?;
        if group.len() != params.t {
            return Err(Error::InvalidContext(format!("group has {} nodes, t = {}", group.len(), params.t)));
        }
        if helpers.len() != params.d {
            return Err(Error::InvalidContext(format!("helper set has {} nodes, d = {}", helpers.len(), params.d)));
        }
        if let Some(x) = group.iter().find(|x| helpers.contains(x)) {
            return Err(Error::InvalidContext(format!("node {x} is both failed and a helper")));
        }
        Ok(RepairContext { group, helpers })
    }

    /// Uses the `d` lowest-numbered nodes outside the group as helpers.
    pub fn with_default_helpers(params: &CodeParams, group: &[NodeId]) -> Result<Self> {
        let helpers: Vec<NodeId> = (1..=params.n).filter(|x| !group.contains(x)).take(params.d).collect();
        Self::new(params, group, &helpers)
    }

    pub fn group(&self) -> &[NodeId] {
        &self.group
    }

    pub fn helpers(&self) -> &[NodeId] {
        &self.helpers
    }

    /// 1-based rank of `node` within the sorted group.
    pub fn position(&self, node: NodeId) -> Option<usize> {
        self.group.iter().position(|&x| x == node).map(|p| p + 1)
    }
}

impl std::fmt::Display for RepairContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "C={:?} D={:?}", self.group, self.helpers)
    }
}

fn sorted_unique(ids: &[NodeId], n: usize, what: &str) -> Result<Vec<NodeId>> {
    let mut v = ids.to_vec();
    v.sort_unstable();
    for w in v.windows(2) {
        if w[0] == w[1] {
            return Err(Error::InvalidContext(format!("{what} repeats node {}", w[0])));
        }
    }
    if let Some(&bad) = v.iter().find(|&&x| x == 0 || x > n) {
        return Err(Error::InvalidContext(format!("{what} node {bad} outside [1, {n}]")));
    }
    Ok(v)
}

/// Every context with `member ∈ C` (or every context when `member` is `None`),
/// groups in lexicographic order and helper sets drawn from the complement.
pub fn enumerate_contexts(params: &CodeParams, member: Option<NodeId>) -> Vec<RepairContext> {
    use itertools::Itertools;
    let mut out = Vec::new();
    for group in (1..=params.n).combinations(params.t) {
        if let Some(m) = member {
            if !group.contains(&m) {
                continue;
            }
        }
        let rest: Vec<NodeId> = (1..=params.n).filter(|x| !group.contains(x)).collect();
        for helpers in rest.into_iter().combinations(params.d) {
            out.push(RepairContext { group: group.clone(), helpers });
        }
    }
    out
}
