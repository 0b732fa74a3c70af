//! The stable cooperative code with `d = k`, `α = t`, `β = β′ = 1`.
//!
//! The data matrix `M` is `t × k` with rows `m_1ᵀ … m_tᵀ`. Node `j` stores
//! `(m_1ᵀ g_j, …, m_tᵀ g_j)` where `g_j` is column `j` of the `k × n`
//! Vandermonde generator `G`. A second, systematic `t × n` generator `G′`
//! with every `t × t` column submatrix invertible defines the virtual rows
//! `m′_f = [m_1 … m_t] · g′_f`.
//!
//! Repair of a group `C = {f_1, …, f_t}` from helpers `D`:
//!
//! 1. helper `λ` sends `(m_1ᵀ g_λ, …, m_tᵀ g_λ) · g′_f = m′_fᵀ g_λ` to each
//!    `f ∈ C`, which depends only on `(λ, f)`; `f` inverts `G_D` to get `m′_f`;
//! 2. `f_j` sends `m′_{f_j}ᵀ g_{f_i}` to every other `f_i`;
//! 3. `f_j` now knows `G′_Cᵀ · w_{f_j}` and inverts `G′_C` to recover its
//!    stored vector `w_{f_j}`.
//!
//! Messages are vectorised row-major: coordinate `i·k + c` is `M[i][c]`.

use serde::{Deserialize, Serialize};

use crate::entropy::ObservationSet;
use crate::error::{Error, Result};
use crate::field::{Field, FiniteField};
use crate::matrix::{dot, systematic_superregular, vandermonde, Mat};
use crate::params::{CodeParams, NodeId, RepairContext};
use crate::scheme::LinearRepairScheme;

/// The `α` stored symbols of one node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShardVector {
    pub node_id: NodeId,
    pub symbols: Vec<u64>,
}

/// Regenerated shards plus the number of symbols moved in each phase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairOutcome {
    pub shards: Vec<ShardVector>,
    pub downloaded: usize,
    pub exchanged: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StableCode {
    params: CodeParams,
    field: Field,
    generator: Mat,
    exchange_generator: Mat,
}

impl StableCode {
    /// Code with Vandermonde points `1..=n`.
    pub fn new(n: usize, k: usize, t: usize, field: Field) -> Result<Self> {
        let points: Vec<u64> = (1..=n as u64).collect();
        Self::with_points(n, k, t, field, &points)
    }

    pub fn with_points(n: usize, k: usize, t: usize, field: Field, points: &[u64]) -> Result<Self> {
        let params = CodeParams::scalar_d_equals_k(n, k, t, field.order())?;
        if points.len() != n {
            return Err(Error::InvalidParams(format!("{} evaluation points for n = {n}", points.len())));
        }
        if let Some(&p) = points.iter().find(|&&p| p >= field.order()) {
            return Err(Error::FieldTooSmall { order: field.order(), needed: p + 1 });
        }
        let generator = vandermonde(&field, points, k)?;
        let exchange_generator = systematic_superregular(t, n, &field)?;
        Ok(StableCode { params, field, generator, exchange_generator })
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// `G`, `k × n`.
    pub fn generator(&self) -> &Mat {
        &self.generator
    }

    /// `G′`, `t × n`.
    pub fn exchange_generator(&self) -> &Mat {
        &self.exchange_generator
    }

    fn check_node(&self, node: NodeId) -> Result<()> {
        if node == 0 || node > self.params.n {
            Err(Error::InvalidContext(format!("node {node} outside [1, {}]", self.params.n)))
        } else {
            Ok(())
        }
    }

    /// `M · G`, column `j` read as the shard of node `j + 1`.
    pub fn encode(&self, data: &Mat) -> Result<Vec<ShardVector>> {
        let CodeParams { k, t, .. } = self.params;
        if data.rows() != t || data.cols() != k || data.field() != &self.field {
            return Err(Error::DimensionMismatch(format!(
                "data matrix must be {t}x{k} over {}, got {}x{}",
                self.field,
                data.rows(),
                data.cols()
            )));
        }
        let coded = data.mul(&self.generator)?;
        Ok((0..self.params.n).map(|j| ShardVector { node_id: j + 1, symbols: coded.column(j) }).collect())
    }

    /// Encodes a length-`B` message vector (row-major `M`).
    pub fn encode_message(&self, message: &[u64]) -> Result<Vec<ShardVector>> {
        self.encode(&self.message_matrix(message)?)
    }

    pub fn message_matrix(&self, message: &[u64]) -> Result<Mat> {
        let CodeParams { k, t, file_size, .. } = self.params;
        if message.len() != file_size {
            return Err(Error::LengthMismatch { expected: file_size, got: message.len() });
        }
        Mat::from_rows(&self.field, k, message.chunks(k).map(<[u64]>::to_vec).collect()).inspect(|m| {
            debug_assert_eq!(m.rows(), t);
        })
    }

    /// Symbol sent by `helper` to `failed`: the helper's shard dotted with `g′_failed`.
    pub fn repair_symbol(&self, helper: &ShardVector, failed: NodeId) -> Result<u64> {
        self.check_node(failed)?;
        if helper.node_id == failed {
            return Err(Error::SelfRepair(failed));
        }
        if helper.symbols.len() != self.params.alpha {
            return Err(Error::LengthMismatch { expected: self.params.alpha, got: helper.symbols.len() });
        }
        Ok(dot(&self.field, &helper.symbols, &self.exchange_generator.column(failed - 1)))
    }

    /// The row `r` with `r · vec(M) = m′_failedᵀ g_helper`.
    pub fn repair_functional(&self, helper: NodeId, failed: NodeId) -> Result<Vec<u64>> {
        self.check_node(helper)?;
        self.check_node(failed)?;
        if helper == failed {
            return Err(Error::SelfRepair(failed));
        }
        Ok(self.pair_functional(helper, failed))
    }

    fn pair_functional(&self, column_node: NodeId, virtual_node: NodeId) -> Vec<u64> {
        let CodeParams { k, t, .. } = self.params;
        let f = &self.field;
        let mut row = Vec::with_capacity(k * t);
        for i in 0..t {
            let coeff = self.exchange_generator.get(i, virtual_node - 1);
            for c in 0..k {
                row.push(f.mul(coeff, self.generator.get(c, column_node - 1)));
            }
        }
        row
    }

    /// Row sent from group member `from` to group member `to` in the exchange
    /// phase: `m′_fromᵀ g_to`.
    pub fn exchange_functional(&self, from: NodeId, to: NodeId) -> Result<Vec<u64>> {
        self.check_node(from)?;
        self.check_node(to)?;
        if from == to {
            return Err(Error::SelfRepair(from));
        }
        Ok(self.pair_functional(to, from))
    }

    /// The `α × B` matrix of functionals stored on `node`.
    pub fn storage_functionals(&self, node: NodeId) -> Result<Mat> {
        self.check_node(node)?;
        let CodeParams { k, t, .. } = self.params;
        Ok(Mat::from_fn(&self.field, t, k * t, |i, col| {
            if col / k == i {
                *self.generator.get(col % k, node - 1)
            } else {
                0
            }
        }))
    }

    /// Regenerates every node of `ctx.group()` from the helpers' shards.
    pub fn cooperative_repair(&self, ctx: &RepairContext, surviving: &[ShardVector]) -> Result<RepairOutcome> {
        let CodeParams { k, t, .. } = self.params;
        if ctx.group().len() != t || ctx.helpers().len() != self.params.d {
            return Err(Error::InvalidContext(format!("context {ctx} does not match t={t}, d={}", self.params.d)));
        }
        let f = &self.field;
        let helpers: Vec<&ShardVector> = ctx
            .helpers()
            .iter()
            .map(|&h| surviving.iter().find(|s| s.node_id == h).ok_or(Error::MissingShard(h)))
            .collect::<Result<_>>()?;
        let helper_cols: Vec<usize> = ctx.helpers().iter().map(|h| h - 1).collect();
        let g_d_inv = self.generator.select_columns(&helper_cols).invert()?;

        // phase 1: each failed node recovers m′_f
        let mut virtual_rows = Vec::with_capacity(t);
        let mut downloaded = 0;
        for &failed in ctx.group() {
            let received: Vec<u64> =
                helpers.iter().map(|h| self.repair_symbol(h, failed)).collect::<Result<_>>()?;
            downloaded += received.len();
            virtual_rows.push(g_d_inv.left_mul_vec(&received)?);
        }

        // phase 2: f_j sends m′_{f_j}ᵀ g_{f_i}; exchange[i][j] is what f_i gets from f_j
        let mut exchanged = 0;
        let exchange: Vec<Vec<u64>> = ctx
            .group()
            .iter()
            .map(|&to| {
                let g_to = self.generator.column(to - 1);
                virtual_rows
                    .iter()
                    .zip(ctx.group())
                    .map(|(m_prime, &from)| {
                        if from != to {
                            exchanged += 1;
                        }
                        dot(f, m_prime, &g_to)
                    })
                    .collect()
            })
            .collect();

        // phase 3: invert G′_Cᵀ
        let group_cols: Vec<usize> = ctx.group().iter().map(|c| c - 1).collect();
        let gp_c_t_inv = self.exchange_generator.select_columns(&group_cols).transpose().invert()?;
        let shards = ctx
            .group()
            .iter()
            .zip(&exchange)
            .map(|(&node, v)| Ok(ShardVector { node_id: node, symbols: gp_c_t_inv.mul_vec(v)? }))
            .collect::<Result<Vec<_>>>()?;
        debug_assert_eq!(downloaded, t * k);
        Ok(RepairOutcome { shards, downloaded, exchanged })
    }

    /// Recovers `M` from the first `k` of the given shards.
    pub fn reconstruct(&self, shards: &[ShardVector]) -> Result<Mat> {
        let CodeParams { k, t, alpha, .. } = self.params;
        for (i, s) in shards.iter().enumerate() {
            self.check_node(s.node_id)?;
            if s.symbols.len() != alpha {
                return Err(Error::LengthMismatch { expected: alpha, got: s.symbols.len() });
            }
            if shards[..i].iter().any(|o| o.node_id == s.node_id) {
                return Err(Error::DuplicateNode(s.node_id));
            }
        }
        if shards.len() < k {
            return Err(Error::TooFewShards { needed: k, got: shards.len() });
        }
        let chosen = &shards[..k];
        let cols: Vec<usize> = chosen.iter().map(|s| s.node_id - 1).collect();
        let inv = self.generator.select_columns(&cols).invert()?;
        let observed = Mat::from_fn(&self.field, t, k, |i, l| chosen[l].symbols[i]);
        observed.mul(&inv)
    }
}

impl LinearRepairScheme for StableCode {
    fn params(&self) -> &CodeParams {
        &self.params
    }

    fn field(&self) -> &Field {
        &self.field
    }

    fn name(&self) -> &str {
        "stable"
    }

    fn storage_observations(&self, node: NodeId) -> Result<ObservationSet> {
        Ok(ObservationSet::from_mat(self.storage_functionals(node)?, &format!("W{node}")))
    }

    fn repair_observations(&self, ctx: &RepairContext, helper: NodeId, failed: NodeId) -> Result<ObservationSet> {
        if !ctx.helpers().contains(&helper) || !ctx.group().contains(&failed) {
            return Err(Error::InvalidContext(format!("{helper} -> {failed} is not a transfer of {ctx}")));
        }
        self.repair_data(helper, failed)
    }

    fn exchange_observations(&self, ctx: &RepairContext, from: NodeId, to: NodeId) -> Result<ObservationSet> {
        if !ctx.group().contains(&from) || !ctx.group().contains(&to) {
            return Err(Error::InvalidContext(format!("{from} -> {to} is not an exchange of {ctx}")));
        }
        let row = self.exchange_functional(from, to)?;
        let mut o = ObservationSet::empty(&self.field, self.params.file_size);
        o.push(&row, format!("X[{from}->{to}]"))?;
        Ok(o)
    }

    fn repair_data(&self, helper: NodeId, failed: NodeId) -> Result<ObservationSet> {
        let row = self.repair_functional(helper, failed)?;
        let mut o = ObservationSet::empty(&self.field, self.params.file_size);
        o.push(&row, format!("S[{helper}->{failed}]"))?;
        Ok(o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::stability_certificate;
    use itertools::Itertools;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s1() -> StableCode {
        StableCode::new(6, 3, 2, Field::prime(11).unwrap()).unwrap()
    }

    fn random_data(code: &StableCode, rng: &mut ChaCha8Rng) -> Mat {
        let p = code.params();
        let q = code.field().order();
        Mat::from_fn(code.field(), p.t, p.k, |_, _| rng.gen_range(0..q))
    }

    #[test]
    fn zero_data_encodes_to_zero() {
        let code = s1();
        let shards = code.encode(&Mat::zeros(code.field(), 2, 3)).unwrap();
        assert_eq!(shards.len(), 6);
        assert!(shards.iter().all(|s| s.symbols == vec![0, 0]));
    }

    #[test]
    fn shard_is_column_of_mg() {
        let code = s1();
        let f = *code.field();
        let data = Mat::from_rows(&f, 3, vec![vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        let shards = code.encode(&data).unwrap();
        // m1 = e1, m2 = e2: shard j = (g_j[0], g_j[1]) = (1, a_j)
        for (j, s) in shards.iter().enumerate() {
            assert_eq!(s.symbols, vec![1, j as u64 + 1]);
        }
        assert!(code.encode(&Mat::zeros(&f, 3, 2)).is_err());
    }

    #[test]
    fn reconstruct_from_245() {
        let code = s1();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let data = random_data(&code, &mut rng);
        let shards = code.encode(&data).unwrap();
        let pick = vec![shards[1].clone(), shards[3].clone(), shards[4].clone()];
        assert_eq!(code.reconstruct(&pick).unwrap(), data);
    }

    #[test]
    fn reconstruct_errors() {
        let code = s1();
        let shards = code.encode(&Mat::zeros(code.field(), 2, 3)).unwrap();
        assert_eq!(code.reconstruct(&shards[..2]), Err(Error::TooFewShards { needed: 3, got: 2 }));
        let dup = vec![shards[0].clone(), shards[1].clone(), shards[0].clone()];
        assert_eq!(code.reconstruct(&dup), Err(Error::DuplicateNode(1)));
    }

    #[test]
    fn repair_symbol_systematic_part() {
        let code = s1();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let data = random_data(&code, &mut rng);
        let shards = code.encode(&data).unwrap();
        let f = code.field();
        // failed node 1 is systematic in G′, so m′_1 = m_1
        for helper in &shards[1..] {
            let expected = dot(f, data.row(0), &code.generator().column(helper.node_id - 1));
            assert_eq!(code.repair_symbol(helper, 1).unwrap(), expected);
        }
        let zero = ShardVector { node_id: 4, symbols: vec![0, 0] };
        assert_eq!(code.repair_symbol(&zero, 2).unwrap(), 0);
        assert_eq!(code.repair_symbol(&shards[2], 3), Err(Error::SelfRepair(3)));
    }

    #[test]
    fn repair_functional_matches_symbol() {
        let code = s1();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let data = random_data(&code, &mut rng);
            let shards = code.encode(&data).unwrap();
            let msg: Vec<u64> = data.row_vecs().concat();
            for helper in 1..=6 {
                for failed in (1..=6).filter(|&f| f != helper) {
                    let row = code.repair_functional(helper, failed).unwrap();
                    assert!(row.iter().any(|&x| x != 0));
                    let via_row = dot(code.field(), &row, &msg);
                    assert_eq!(via_row, code.repair_symbol(&shards[helper - 1], failed).unwrap());
                }
            }
        }
    }

    #[test]
    fn repair_symbol_is_context_free() {
        // Any two contexts containing (helper, failed) see the same symbol.
        let code = s1();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let shards = code.encode(&random_data(&code, &mut rng)).unwrap();
        let p = *code.params();
        let c1 = RepairContext::new(&p, &[1, 2], &[3, 4, 5]).unwrap();
        let c2 = RepairContext::new(&p, &[1, 6], &[2, 3, 5]).unwrap();
        for h in [3, 5] {
            assert!(c1.helpers().contains(&h) && c2.helpers().contains(&h));
            assert_eq!(code.repair_symbol(&shards[h - 1], 1), code.repair_symbol(&shards[h - 1], 1));
        }
        assert!(stability_certificate(&code).unwrap().is_stable());
    }

    #[test]
    fn every_group_and_helper_set_regenerates_exactly() {
        let code = s1();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let data = random_data(&code, &mut rng);
        let shards = code.encode(&data).unwrap();
        let p = *code.params();
        let mut cases = 0;
        for group in (1..=6).combinations(2) {
            let rest: Vec<usize> = (1..=6).filter(|x| !group.contains(x)).collect();
            for helpers in rest.into_iter().combinations(3) {
                let ctx = RepairContext::new(&p, &group, &helpers).unwrap();
                let surviving: Vec<ShardVector> =
                    shards.iter().filter(|s| !group.contains(&s.node_id)).cloned().collect();
                let out = code.cooperative_repair(&ctx, &surviving).unwrap();
                for s in &out.shards {
                    assert_eq!(s, &shards[s.node_id - 1]);
                }
                assert_eq!(out.downloaded + out.exchanged, p.repair_bandwidth());
                cases += 1;
            }
        }
        assert_eq!(cases, 60);
    }

    #[test]
    fn single_failure_degenerates_to_mds_repair() {
        let code = StableCode::new(5, 3, 1, Field::prime(11).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let data = random_data(&code, &mut rng);
        let shards = code.encode(&data).unwrap();
        let ctx = RepairContext::with_default_helpers(code.params(), &[4]).unwrap();
        let out = code.cooperative_repair(&ctx, &shards).unwrap();
        assert_eq!(out.shards[0], shards[3]);
        assert_eq!((out.downloaded, out.exchanged), (3, 0));
    }

    #[test]
    fn missing_helper_shard() {
        let code = s1();
        let shards = code.encode(&Mat::zeros(code.field(), 2, 3)).unwrap();
        let ctx = RepairContext::new(code.params(), &[1, 2], &[3, 4, 5]).unwrap();
        let out = code.cooperative_repair(&ctx, &shards[3..]);
        assert_eq!(out, Err(Error::MissingShard(3)));
        let zero = code.cooperative_repair(&ctx, &shards).unwrap();
        assert!(zero.shards.iter().all(|s| s.symbols == vec![0, 0]));
    }
}
