//! Code-A: a `k = t = 2` interference-alignment MSCR code with `n = d + 2`
//! and `α = d`.
//!
//! Node 1 stores `a`, node 2 stores `b` and parity node `i + 2` stores
//! `r_i = a + B_i b`, where `B_i = diag(ω^((i-1+l) mod α))` for `l = 0..α`.
//! Only repairs of groups containing node 1 are modelled, and only at the
//! level of what each helper sends to node 1. The exchange phase is not
//! modelled, so an eavesdropper on node 1 is handed `a` directly; reports
//! flag this.
//!
//! Message coordinates are `(a_0, …, a_{α-1}, b_0, …, b_{α-1})`.

use crate::entropy::{entropy_symbols, ObservationSet};
use crate::error::{Error, Result};
use crate::field::{Field, FiniteField};
use crate::matrix::{dot, Mat};
use crate::params::{CodeParams, NodeId, RepairContext};
use crate::scheme::LinearRepairScheme;
use crate::stable::ShardVector;

/// `n · 1` in the field.
fn integer(field: &Field, n: u64) -> u64 {
    field.reduce(n % field.characteristic())
}

/// Diagonal of `B_i` for `i` in `1..=d` (with `α = d`).
pub fn diagonal(field: &Field, d: usize, omega: u64, i: usize) -> Vec<u64> {
    (0..d).map(|l| field.pow(&omega, ((i - 1 + l) % d) as u64)).collect()
}

/// `(1 + ω + … + ω^(α-1))² · ω^(-(α-1))`; `ω` is admissible when this is
/// neither `0` nor `α²`.
pub fn admissibility_value(field: &Field, alpha: usize, omega: u64) -> Result<u64> {
    let inv = field.inv(&omega).ok_or(Error::NotGenerator(omega))?;
    let sum = (0..alpha).fold(0, |acc, e| field.add(&acc, &field.pow(&omega, e as u64)));
    Ok(field.mul(&field.mul(&sum, &sum), &field.pow(&inv, alpha as u64 - 1)))
}

/// `α²` as a field element.
pub fn alpha_squared(field: &Field, alpha: usize) -> u64 {
    let a = integer(field, alpha as u64);
    field.mul(&a, &a)
}

/// Columns `[z, B_1 z, …, B_d z]` with `B_j z` left out: the leakage matrix
/// relating `B_j⁻¹a + b` to what parity `j` sends node 1 across all groups.
pub fn leakage_matrix(field: &Field, d: usize, omega: u64, parity: usize) -> Mat {
    leakage_columns(field, d, parity, |i| diagonal(field, d, omega, i))
}

/// The same matrix built from `B_i⁻¹ z`.
pub fn inverse_leakage_matrix(field: &Field, d: usize, omega: u64, parity: usize) -> Mat {
    leakage_columns(field, d, parity, |i| {
        diagonal(field, d, omega, i).iter().map(|x| field.inv(x).unwrap_or(0)).collect()
    })
}

fn leakage_columns(field: &Field, d: usize, parity: usize, col: impl Fn(usize) -> Vec<u64>) -> Mat {
    let mut cols = vec![vec![1u64; d]];
    cols.extend((1..=d).filter(|&i| i != parity).map(col));
    Mat::from_fn(field, d, d, |r, c| cols[c][r])
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodeA {
    params: CodeParams,
    field: Field,
    omega: u64,
    diagonals: Vec<Vec<u64>>,
}

/// Outcome of the attack on node 1's repair downloads.
#[derive(Debug, Clone)]
pub struct CodeAAttack {
    pub parity: usize,
    pub a: Vec<u64>,
    pub b: Vec<u64>,
    pub leakage_matrix: Mat,
    /// Everything node 1 downloads, plus its own content `a` (granted).
    pub observations: ObservationSet,
    pub leaked_entropy: usize,
    /// Node 1's content was given to the eavesdropper rather than derived
    /// from the unmodelled exchange phase.
    pub content_granted: bool,
}

impl CodeA {
    pub fn new(d: usize, field: Field, omega: u64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParams(format!("d = {d} < k = 2")));
        }
        let n = d + 2;
        if field.order() <= (n - 1) as u64 {
            return Err(Error::FieldTooSmall { order: field.order(), needed: n as u64 });
        }
        field.element(omega)?;
        if !field.is_generator(omega) {
            return Err(Error::NotGenerator(omega));
        }
        let value = admissibility_value(&field, d, omega)?;
        let alpha_sq = alpha_squared(&field, d);
        if value == 0 || value == alpha_sq {
            return Err(Error::InadmissibleOmega { omega, value, alpha_sq });
        }
        let params = CodeParams::mscr(n, 2, d, 2, 2 * d, field.order())?;
        let diagonals = (1..=d).map(|i| diagonal(&field, d, omega, i)).collect();
        Ok(CodeA { params, field, omega, diagonals })
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn omega(&self) -> u64 {
        self.omega
    }

    fn alpha(&self) -> usize {
        self.params.alpha
    }

    /// Diagonal of `B_i`, `i` in `1..=d`.
    pub fn diag(&self, i: usize) -> &[u64] {
        &self.diagonals[i - 1]
    }

    fn check_vec(&self, v: &[u64]) -> Result<()> {
        if v.len() != self.alpha() {
            return Err(Error::DimensionMismatch(format!("vector of length {}, α = {}", v.len(), self.alpha())));
        }
        Ok(())
    }

    pub fn encode(&self, a: &[u64], b: &[u64]) -> Result<Vec<ShardVector>> {
        self.check_vec(a)?;
        self.check_vec(b)?;
        let f = &self.field;
        let mut out = vec![ShardVector { node_id: 1, symbols: a.to_vec() }, ShardVector { node_id: 2, symbols: b.to_vec() }];
        for i in 1..=self.params.d {
            let r = a.iter().zip(b).zip(self.diag(i)).map(|((x, y), w)| f.add(x, &f.mul(w, y))).collect();
            out.push(ShardVector { node_id: i + 2, symbols: r });
        }
        Ok(out)
    }

    fn check_partner(&self, partner: NodeId) -> Result<()> {
        if partner < 2 || partner > self.params.n {
            return Err(Error::InvalidGroup(format!("group (1, {partner}) outside nodes 1..={}", self.params.n)));
        }
        Ok(())
    }

    /// Row over `(a | b)` of what `sender` transmits to node 1 when the
    /// group is `(1, partner)`.
    pub fn repair_row(&self, partner: NodeId, sender: NodeId) -> Result<Vec<u64>> {
        self.check_partner(partner)?;
        let f = &self.field;
        let alpha = self.alpha();
        if sender == 1 || sender == partner || sender > self.params.n {
            return Err(Error::InvalidContext(format!("node {sender} is not a helper of group (1, {partner})")));
        }
        let inv = |v: &[u64]| -> Vec<u64> { v.iter().map(|x| f.inv(x).expect("powers of a generator")).collect() };
        let row = match (partner, sender) {
            (2, j) => {
                let mut row = inv(self.diag(j - 2));
                row.extend(std::iter::repeat_n(1, alpha));
                row
            }
            (p, 2) => {
                let mut row = vec![0; alpha];
                row.extend_from_slice(self.diag(p - 2));
                row
            }
            (p, j) => {
                let bi = self.diag(p - 2);
                let mut row: Vec<u64> = bi.iter().zip(inv(self.diag(j - 2))).map(|(x, y)| f.mul(x, &y)).collect();
                row.extend_from_slice(bi);
                row
            }
        };
        Ok(row)
    }

    /// Symbol `sender` computes from its own shard and sends to node 1.
    pub fn repair_symbol(&self, partner: NodeId, sender: &ShardVector) -> Result<u64> {
        self.check_vec(&sender.symbols)?;
        let row = self.repair_row(partner, sender.node_id)?;
        let alpha = self.alpha();
        // a sender only ever touches its own content: row restricted to its
        // storage (a for nodes 1, b for node 2, r_j for parities)
        let coeffs: Vec<u64> = if sender.node_id == 2 {
            row[alpha..].to_vec()
        } else {
            // zᵀX B_j⁻¹ r_j: coefficient on r_j equals the a-part of the row
            row[..alpha].to_vec()
        };
        Ok(dot(&self.field, &coeffs, &sender.symbols))
    }

    /// All functionals node 1 downloads under group `(1, partner)`.
    pub fn repair_functionals(&self, partner: NodeId) -> Result<ObservationSet> {
        self.check_partner(partner)?;
        let mut out = ObservationSet::empty(&self.field, self.params.file_size);
        for sender in (2..=self.params.n).filter(|&s| s != partner) {
            out.push(&self.repair_row(partner, sender)?, format!("S[{sender}->1|(1,{partner})]"))?;
        }
        Ok(out)
    }

    /// Recovers `(a, b)` from what parity `j` sends node 1 across every
    /// group, plus node 1's content.
    pub fn attack(&self, shards: &[ShardVector], parity: usize) -> Result<CodeAAttack> {
        let d = self.params.d;
        if parity == 0 || parity > d {
            return Err(Error::InvalidParams(format!("parity index {parity} outside 1..={d}")));
        }
        let find = |id: NodeId| shards.iter().find(|s| s.node_id == id).ok_or(Error::MissingShard(id));
        let a = find(1)?.symbols.clone();
        self.check_vec(&a)?;
        let sender = find(parity + 2)?;
        let f = &self.field;
        // observed[c] pairs with column c of the leakage matrix
        let mut observed = vec![self.repair_symbol(2, sender)?];
        for i in (1..=d).filter(|&i| i != parity) {
            observed.push(self.repair_symbol(i + 2, sender)?);
        }
        let leakage = leakage_matrix(f, d, self.omega, parity);
        let inv = leakage.invert().map_err(|_| Error::SingularLeakageMatrix(parity))?;
        // observedᵀ = uᵀ L with u = B_j⁻¹ a + b
        let u = inv.left_mul_vec(&observed)?;
        let bj = self.diag(parity);
        let b = u
            .iter()
            .zip(&a)
            .zip(bj)
            .map(|((ui, ai), w)| f.sub(ui, &f.mul(ai, &f.inv(w).expect("nonzero"))))
            .collect();
        let observations = self.downloads(1)?;
        let leaked_entropy = entropy_symbols(&observations);
        Ok(CodeAAttack { parity, a, b, leakage_matrix: leakage, observations, leaked_entropy, content_granted: true })
    }

    fn unsupported<T>(&self, what: &str) -> Result<T> {
        Err(Error::Unsupported(format!("code-a {what}")))
    }
}

impl LinearRepairScheme for CodeA {
    fn params(&self) -> &CodeParams {
        &self.params
    }

    fn field(&self) -> &Field {
        &self.field
    }

    fn name(&self) -> &str {
        "code-a"
    }

    fn storage_observations(&self, node: NodeId) -> Result<ObservationSet> {
        let alpha = self.alpha();
        let rows = match node {
            1 => Mat::from_fn(&self.field, alpha, 2 * alpha, |r, c| u64::from(c == r)),
            2 => Mat::from_fn(&self.field, alpha, 2 * alpha, |r, c| u64::from(c == alpha + r)),
            j if j <= self.params.n && j > 2 => {
                let w = self.diag(j - 2).to_vec();
                Mat::from_fn(&self.field, alpha, 2 * alpha, |r, c| {
                    if c == r {
                        1
                    } else if c == alpha + r {
                        w[r]
                    } else {
                        0
                    }
                })
            }
            _ => return Err(Error::InvalidContext(format!("node {node} outside [1, {}]", self.params.n))),
        };
        Ok(ObservationSet::from_mat(rows, &format!("W{node}")))
    }

    fn repair_observations(&self, ctx: &RepairContext, helper: NodeId, failed: NodeId) -> Result<ObservationSet> {
        if failed != 1 || ctx.group()[0] != 1 {
            return self.unsupported("repair outside groups containing node 1");
        }
        if !ctx.helpers().contains(&helper) {
            return Err(Error::InvalidContext(format!("{helper} is not a helper of {ctx}")));
        }
        let partner = ctx.group()[1];
        let mut out = ObservationSet::empty(&self.field, self.params.file_size);
        out.push(&self.repair_row(partner, helper)?, format!("S[{helper}->1|(1,{partner})]"))?;
        Ok(out)
    }

    fn exchange_observations(&self, _: &RepairContext, _: NodeId, _: NodeId) -> Result<ObservationSet> {
        self.unsupported("exchange phase")
    }

    /// Groups `(1, ℓ)`; each has exactly one helper set since `n = d + 2`.
    fn contexts(&self, member: Option<NodeId>) -> Vec<RepairContext> {
        if member.is_some_and(|m| m != 1) {
            return Vec::new();
        }
        (2..=self.params.n)
            .map(|p| RepairContext::with_default_helpers(&self.params, &[1, p]).expect("valid by construction"))
            .collect()
    }

    /// Node 1's downloads over every group, plus its content `a` (granted).
    fn downloads(&self, node: NodeId) -> Result<ObservationSet> {
        if node != 1 {
            return self.unsupported("downloads of nodes other than 1");
        }
        let mut out = ObservationSet::empty(&self.field, self.params.file_size);
        for ctx in self.contexts(Some(1)) {
            for &h in ctx.helpers() {
                out.extend_dedup(&self.repair_observations(&ctx, h, 1)?)?;
            }
        }
        let own = self.storage_observations(1)?;
        for i in 0..own.len() {
            out.push(own.rows().row(i), format!("W1[{i}] (granted)"))?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::stability_certificate;

    fn gf(p: u64) -> Field {
        Field::prime(p).unwrap()
    }

    fn a1() -> CodeA {
        CodeA::new(3, gf(11), 2).unwrap()
    }

    #[test]
    fn init_checks() {
        let f = gf(11);
        // (1+2+4)^2 * 2^-2 = 49 * 3 = 4 mod 11
        assert_eq!(admissibility_value(&f, 3, 2).unwrap(), 4);
        assert_eq!(alpha_squared(&f, 3), 9);
        assert!(CodeA::new(3, f, 2).is_ok());
        assert_eq!(CodeA::new(3, f, 1).unwrap_err(), Error::NotGenerator(1));
        assert_eq!(CodeA::new(3, f, 3).unwrap_err(), Error::NotGenerator(3));
        assert!(matches!(CodeA::new(3, gf(3), 2), Err(Error::FieldTooSmall { .. })));
        // q = n - 1
        assert!(matches!(CodeA::new(3, Field::binary(2).unwrap(), 2), Err(Error::FieldTooSmall { .. })));
        // over GF(13), 1 + 2 + 4 = 7 and 49 * 2^-2 = 9 = α²
        assert_eq!(
            CodeA::new(3, gf(13), 2).unwrap_err(),
            Error::InadmissibleOmega { omega: 2, value: 9, alpha_sq: 9 }
        );
    }

    #[test]
    fn encode_examples() {
        let code = a1();
        let f = gf(11);
        let a = vec![3, 1, 4];
        let shards = code.encode(&a, &[0, 0, 0]).unwrap();
        assert!(shards[2..].iter().all(|s| s.symbols == a));
        let shards = code.encode(&[0, 0, 0], &[1, 0, 0]).unwrap();
        for i in 1..=3 {
            assert_eq!(shards[i + 1].symbols, vec![f.pow(&2, (i - 1) as u64), 0, 0]);
        }
        // r_2 = a + diag(2, 4, 1) b, by hand
        let shards = code.encode(&[1, 2, 3], &[4, 5, 6]).unwrap();
        assert_eq!(shards[3].symbols, vec![(1 + 2 * 4), (2 + 4 * 5) % 11, (3 + 6)]);
        assert!(code.encode(&[1, 2], &[1, 2, 3]).is_err());
    }

    #[test]
    fn repair_rows_have_documented_shape() {
        let code = a1();
        let f = gf(11);
        // group (1,2), parity 1: (zᵀB_1⁻¹ | zᵀ), B_1 = diag(1, 2, 4)
        assert_eq!(code.repair_row(2, 3).unwrap(), vec![1, f.inv(&2).unwrap(), f.inv(&4).unwrap(), 1, 1, 1]);
        // group (1, 4), node 2: (0 | zᵀB_2), B_2 = diag(2, 4, 1)
        assert_eq!(code.repair_row(4, 2).unwrap(), vec![0, 0, 0, 2, 4, 1]);
        // group (1, 4), parity 3: (zᵀB_2B_3⁻¹ | zᵀB_2), B_3 = diag(4, 1, 2)
        let row = code.repair_row(4, 5).unwrap();
        assert_eq!(row, vec![f.mul(&2, &f.inv(&4).unwrap()), 4, f.mul(&1, &f.inv(&2).unwrap()), 2, 4, 1]);
        assert!(matches!(code.repair_functionals(6), Err(Error::InvalidGroup(_))));
        assert!(matches!(code.repair_functionals(1), Err(Error::InvalidGroup(_))));
    }

    #[test]
    fn interference_aligns_under_systematic_group() {
        let code = a1();
        let obs = code.repair_functionals(2).unwrap();
        assert_eq!(obs.len(), 3);
        for r in 0..obs.len() {
            assert_eq!(&obs.rows().row(r)[3..], &[1, 1, 1]);
        }
    }

    #[test]
    fn transmitted_symbols_match_rows() {
        let code = a1();
        let a = vec![7, 0, 9];
        let b = vec![2, 10, 5];
        let msg: Vec<u64> = a.iter().chain(&b).copied().collect();
        let shards = code.encode(&a, &b).unwrap();
        for partner in 2..=5 {
            let obs = code.repair_functionals(partner).unwrap();
            let values = obs.evaluate(&msg).unwrap();
            let senders: Vec<_> = (2..=5).filter(|&s| s != partner).collect();
            for (v, s) in values.iter().zip(senders) {
                assert_eq!(*v, code.repair_symbol(partner, &shards[s - 1]).unwrap());
            }
        }
    }

    #[test]
    fn attack_recovers_everything() {
        let code = a1();
        let a = vec![5, 8, 1];
        let b = vec![9, 3, 6];
        let shards = code.encode(&a, &b).unwrap();
        for j in 1..=3 {
            let out = code.attack(&shards, j).unwrap();
            assert_eq!((out.a.clone(), out.b.clone()), (a.clone(), b.clone()));
            assert_eq!(out.leaked_entropy, 6);
            assert!(out.content_granted);
            assert!(out.leakage_matrix.is_invertible());
        }
        let zero_b = code.encode(&a, &[0, 0, 0]).unwrap();
        assert_eq!(code.attack(&zero_b, 1).unwrap().b, vec![0, 0, 0]);
    }

    #[test]
    fn admissible_generators_give_invertible_leakage() {
        let mut inadmissible_but_invertible = Vec::new();
        for p in [11u64, 13] {
            let f = gf(p);
            for d in 2..=(p as usize - 2) {
                for w in (1..p).filter(|&w| f.is_generator(w)) {
                    let v = admissibility_value(&f, d, w).unwrap();
                    let admissible = v != 0 && v != alpha_squared(&f, d);
                    let invertible = (1..=d).all(|j| {
                        leakage_matrix(&f, d, w, j).is_invertible()
                            && inverse_leakage_matrix(&f, d, w, j).is_invertible()
                    });
                    if admissible {
                        assert!(invertible, "q={p} d={d} ω={w}");
                    } else if invertible {
                        inadmissible_but_invertible.push((p, d, w));
                    }
                }
            }
        }
        // the condition is sufficient, not necessary
        assert!(inadmissible_but_invertible.contains(&(13, 3, 2)));
    }

    #[test]
    fn omega_one_makes_leakage_singular() {
        // every B_i collapses to the identity
        let m = leakage_matrix(&gf(11), 3, 1, 1);
        assert_eq!(m.rank(), 1);
        assert_eq!(admissibility_value(&gf(11), 3, 1).unwrap(), alpha_squared(&gf(11), 3));
    }

    #[test]
    fn code_a_is_unstable() {
        let code = a1();
        assert!(!stability_certificate(&code).unwrap().is_stable());
        assert!(code.contexts(Some(2)).is_empty());
        assert_eq!(code.contexts(None).len(), 4);
    }
}
