//! Code-B: the `d = k` cooperative code without a second generator.
//!
//! Storage is as in [`StableCode`](crate::stable::StableCode): node `j`
//! holds `(m_1ᵀ g_j, …, m_tᵀ g_j)`. To repair the group `f_1 < … < f_t`,
//! each helper `λ` sends `m_jᵀ g_λ` to `f_j`, so `f_j` learns `m_j`; then
//! `f_j` sends `m_jᵀ g_{f_i}` to each `f_i`. What a helper sends a node
//! depends on that node's rank inside the group, which is what makes the
//! code unstable.

use crate::entropy::{entropy_symbols, ObservationSet};
use crate::error::{Error, Result};
use crate::field::{Field, FiniteField};
use crate::matrix::{dot, vandermonde, Mat};
use crate::params::{CodeParams, NodeId, RepairContext};
use crate::scheme::LinearRepairScheme;
use crate::stable::{RepairOutcome, ShardVector};

#[derive(Debug, Clone, PartialEq)]
pub struct CodeB {
    params: CodeParams,
    field: Field,
    generator: Mat,
}

/// Outcome of the sliding-group attack on node `t`.
#[derive(Debug, Clone)]
pub struct CodeBAttack {
    pub groups: Vec<RepairContext>,
    pub recovered: Mat,
    pub observations: ObservationSet,
    pub leaked_entropy: usize,
}

impl CodeB {
    pub fn new(n: usize, k: usize, t: usize, field: Field) -> Result<Self> {
        let params = CodeParams::scalar_d_equals_k(n, k, t, field.order())?;
        if n as u64 >= field.order() {
            return Err(Error::FieldTooSmall { order: field.order(), needed: n as u64 + 1 });
        }
        let points: Vec<u64> = (1..=n as u64).collect();
        let generator = vandermonde(&field, &points, k)?;
        Ok(CodeB { params, field, generator })
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn generator(&self) -> &Mat {
        &self.generator
    }

    pub fn encode(&self, data: &Mat) -> Result<Vec<ShardVector>> {
        let CodeParams { k, t, .. } = self.params;
        if data.rows() != t || data.cols() != k {
            return Err(Error::DimensionMismatch(format!("data matrix must be {t}x{k}")));
        }
        let coded = data.mul(&self.generator)?;
        Ok((0..self.params.n).map(|j| ShardVector { node_id: j + 1, symbols: coded.column(j) }).collect())
    }

    /// Row over `vec(M)` of `m_rowᵀ g_node`.
    fn row_functional(&self, row: usize, node: NodeId) -> Vec<u64> {
        let k = self.params.k;
        let mut out = vec![0; self.params.file_size];
        for c in 0..k {
            out[row * k + c] = *self.generator.get(c, node - 1);
        }
        out
    }

    fn rank_in(&self, ctx: &RepairContext, node: NodeId) -> Result<usize> {
        ctx.position(node).ok_or_else(|| Error::InvalidContext(format!("{node} is not in the group of {ctx}")))
    }

    /// `m_jᵀ g_helper`, where `j` is the rank of `failed` in the group.
    pub fn repair_symbol(&self, ctx: &RepairContext, helper: &ShardVector, failed: NodeId) -> Result<u64> {
        if !ctx.helpers().contains(&helper.node_id) {
            return Err(Error::InvalidContext(format!("{} is not a helper of {ctx}", helper.node_id)));
        }
        let j = self.rank_in(ctx, failed)?;
        helper.symbols.get(j - 1).copied().ok_or(Error::LengthMismatch {
            expected: self.params.alpha,
            got: helper.symbols.len(),
        })
    }

    pub fn cooperative_repair(&self, ctx: &RepairContext, surviving: &[ShardVector]) -> Result<RepairOutcome> {
        let f = &self.field;
        let helpers: Vec<&ShardVector> = ctx
            .helpers()
            .iter()
            .map(|&h| surviving.iter().find(|s| s.node_id == h).ok_or(Error::MissingShard(h)))
            .collect::<Result<_>>()?;
        let cols: Vec<usize> = ctx.helpers().iter().map(|h| h - 1).collect();
        let g_d_inv = self.generator.select_columns(&cols).invert()?;
        let mut rows = Vec::new();
        let mut downloaded = 0;
        for &failed in ctx.group() {
            let s: Vec<u64> = helpers.iter().map(|h| self.repair_symbol(ctx, h, failed)).collect::<Result<_>>()?;
            downloaded += s.len();
            rows.push(g_d_inv.left_mul_vec(&s)?);
        }
        let mut exchanged = 0;
        let shards = ctx
            .group()
            .iter()
            .map(|&to| {
                let g = self.generator.column(to - 1);
                exchanged += ctx.group().len() - 1;
                ShardVector { node_id: to, symbols: rows.iter().map(|m| dot(f, m, &g)).collect() }
            })
            .collect();
        Ok(RepairOutcome { shards, downloaded, exchanged })
    }

    /// Groups `[i, i+t-1]` for `i = 1..=t` with helpers `[2t, 2t+k-1]`:
    /// node `t` sits at every rank once, so its downloads cover all of `M`.
    pub fn attack_contexts(&self) -> Result<Vec<RepairContext>> {
        let CodeParams { n, k, t, .. } = self.params;
        if n < 2 * t + k - 1 {
            return Err(Error::ParameterTooSmall(format!("n = {n} < 2t + k - 1 = {}", 2 * t + k - 1)));
        }
        let helpers: Vec<NodeId> = (2 * t..2 * t + k).collect();
        (1..=t)
            .map(|i| RepairContext::new(&self.params, &(i..i + t).collect::<Vec<_>>(), &helpers))
            .collect()
    }

    pub fn attack(&self, shards: &[ShardVector]) -> Result<CodeBAttack> {
        let CodeParams { k, t, .. } = self.params;
        let groups = self.attack_contexts()?;
        let helpers = groups[0].helpers().to_vec();
        let cols: Vec<usize> = helpers.iter().map(|h| h - 1).collect();
        let g_d_inv = self.generator.select_columns(&cols).invert()?;
        let mut recovered = Mat::zeros(&self.field, t, k);
        let mut observations = ObservationSet::empty(&self.field, self.params.file_size);
        for ctx in &groups {
            let j = self.rank_in(ctx, t)?;
            let mut received = Vec::with_capacity(k);
            for &h in &helpers {
                let shard = shards.iter().find(|s| s.node_id == h).ok_or(Error::MissingShard(h))?;
                received.push(self.repair_symbol(ctx, shard, t)?);
                observations.extend(&self.repair_observations(ctx, h, t)?)?;
            }
            for (c, v) in g_d_inv.left_mul_vec(&received)?.into_iter().enumerate() {
                recovered.set(j - 1, c, v);
            }
        }
        let leaked_entropy = entropy_symbols(&observations);
        Ok(CodeBAttack { groups, recovered, observations, leaked_entropy })
    }
}

impl LinearRepairScheme for CodeB {
    fn params(&self) -> &CodeParams {
        &self.params
    }

    fn field(&self) -> &Field {
        &self.field
    }

    fn name(&self) -> &str {
        "code-b"
    }

    fn storage_observations(&self, node: NodeId) -> Result<ObservationSet> {
        if node == 0 || node > self.params.n {
            return Err(Error::InvalidContext(format!("node {node} outside [1, {}]", self.params.n)));
        }
        let rows = (0..self.params.t).map(|i| self.row_functional(i, node)).collect();
        Ok(ObservationSet::from_mat(Mat::from_rows(&self.field, self.params.file_size, rows)?, &format!("W{node}")))
    }

    fn repair_observations(&self, ctx: &RepairContext, helper: NodeId, failed: NodeId) -> Result<ObservationSet> {
        if !ctx.helpers().contains(&helper) {
            return Err(Error::InvalidContext(format!("{helper} is not a helper of {ctx}")));
        }
        let j = self.rank_in(ctx, failed)?;
        let mut out = ObservationSet::empty(&self.field, self.params.file_size);
        out.push(&self.row_functional(j - 1, helper), format!("S[{helper}->{failed}|{ctx}]"))?;
        Ok(out)
    }

    fn exchange_observations(&self, ctx: &RepairContext, from: NodeId, to: NodeId) -> Result<ObservationSet> {
        let j = self.rank_in(ctx, from)?;
        self.rank_in(ctx, to)?;
        if from == to {
            return Err(Error::SelfRepair(from));
        }
        let mut out = ObservationSet::empty(&self.field, self.params.file_size);
        out.push(&self.row_functional(j - 1, to), format!("X[{from}->{to}|{ctx}]"))?;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::enumerate_contexts;
    use crate::scheme::{stability_certificate, StabilityVerdict};

    fn b1() -> CodeB {
        CodeB::new(6, 3, 2, Field::prime(11).unwrap()).unwrap()
    }

    fn sample() -> Mat {
        Mat::from_rows(&Field::prime(11).unwrap(), 3, vec![vec![4, 7, 1], vec![10, 0, 3]]).unwrap()
    }

    #[test]
    fn rank_decides_payload() {
        let code = b1();
        let shards = code.encode(&sample()).unwrap();
        let p = *code.params();
        let c12 = RepairContext::new(&p, &[1, 2], &[4, 5, 6]).unwrap();
        let c23 = RepairContext::new(&p, &[2, 3], &[4, 5, 6]).unwrap();
        let h = &shards[3];
        // node 1 in [1,2] and node 2 in [2,3] both get m_1ᵀg_4; node 2 in [1,2] gets m_2ᵀg_4
        assert_eq!(code.repair_symbol(&c12, h, 1).unwrap(), h.symbols[0]);
        assert_eq!(code.repair_symbol(&c23, h, 2).unwrap(), h.symbols[0]);
        assert_eq!(code.repair_symbol(&c12, h, 2).unwrap(), h.symbols[1]);
        let zero = code.encode(&Mat::zeros(code.generator().field(), 2, 3)).unwrap();
        assert_eq!(code.repair_symbol(&c12, &zero[4], 2).unwrap(), 0);
    }

    #[test]
    fn repair_is_correct_everywhere() {
        let code = b1();
        let shards = code.encode(&sample()).unwrap();
        for ctx in enumerate_contexts(code.params(), None) {
            let out = code.cooperative_repair(&ctx, &shards).unwrap();
            for s in &out.shards {
                assert_eq!(s, &shards[s.node_id - 1]);
            }
            assert_eq!(out.downloaded + out.exchanged, code.params().repair_bandwidth());
        }
    }

    #[test]
    fn attack_recovers_m() {
        let code = b1();
        let m = sample();
        let out = code.attack(&code.encode(&m).unwrap()).unwrap();
        assert_eq!(out.recovered, m);
        assert_eq!(out.leaked_entropy, 6);
        let groups: Vec<Vec<usize>> = out.groups.iter().map(|g| g.group().to_vec()).collect();
        assert_eq!(groups, vec![vec![1, 2], vec![2, 3]]);
        let small = CodeB::new(5, 3, 2, Field::prime(11).unwrap()).unwrap();
        assert!(matches!(small.attack_contexts(), Err(Error::ParameterTooSmall(_))));
    }

    #[test]
    fn witness_is_explicit() {
        let code = b1();
        match stability_certificate(&code).unwrap() {
            StabilityVerdict::Unstable(w) => {
                assert_ne!(w.first, w.second);
                assert_ne!(w.first_context, w.second_context);
                assert!(w.first_context.group().contains(&w.failed));
                assert!(w.second_context.helpers().contains(&w.helper));
            }
            v => panic!("expected a witness, got {v:?}"),
        }
    }
}
