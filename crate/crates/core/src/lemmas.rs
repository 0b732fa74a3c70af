//! Structural entropy identities of cooperative codes, checked as exact rank
//! identities over every qualifying choice of node subsets.
//!
//! Notation: `W_i` is node `i`'s content, `S_i^j` everything helper `i`
//! ever sends to `j` (union over contexts), `S_X^Y` the union over
//! `x ∈ X, y ∈ Y`, `S̃^F` every download of the nodes in `F`, and
//! `S^F = S_{[n]∖F}^F`.
//!
//! Instances with `n <= exhaustive_limit` are checked over every subset
//! tuple; larger ones over seeded random draws.

use std::collections::HashMap;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::eavesdropper::{measured_secrecy_capacity, EveModel};
use crate::entropy::{conditional_entropy, entropy_symbols, same_span, ObservationSet};
use crate::error::Result;
use crate::params::{CodeParams, NodeId, RepairContext};
use crate::scheme::LinearRepairScheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Identity {
    /// `H(S_{A∪B}^C) = dtβ`, `H(S_B^C | W_C, S_A^C) = 0` in one repair.
    GroupRepair,
    /// `H(S_{A′∪B′}^i, S̲_{C′}^i) = (d+t-1)β`, `H(S_{B′}^i, S̲_{C′}^i | W_i, S_{A′}^i) = 0`.
    SingleRepair,
    /// `span S̃^F = span(W_F, S^F)` and
    /// `H(S̃^F | W_E, W_F) = H(S^F | W_E, W_F) = H(S_G^F | W_E, W_F) = H(S_G^F)`.
    DownloadReduction,
    /// `H(S_i^F)` is the same for every `i ∉ F`, and equals `|F|β` when `|F| <= t`.
    UniformRepairEntropy,
    /// With `t >= k` and `d = k`, `H(S_i^F) = |F|β` also for `k <= |F| <= t`.
    UniformRepairEntropyWide,
    /// `B^(s) = (k - l1 - l2)(α - H(S_g^F))` for `g ∈ G`.
    SingleHelperCapacity,
    /// Exchange data into `F` spans exactly `W_F`.
    ExchangeSpansStorage,
    /// `H(W_E, S̃^F) = H(W_{E∪F}) + H(S_G^F)` and `H(S_T^F | W_{E∪F}, S_G^F) = 0`.
    LeakageSplit,
    /// `H(W_E, S̃^F) = (l1+l2)α + Σ_g H(S_g^F)` with `H(S_g^F) = min(l2, t)β`.
    LeakageCount,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub statement: String,
    pub witness: String,
    pub expected: usize,
    pub got: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub identity: Identity,
    pub cases: usize,
    pub violations: Vec<Violation>,
    /// Set when the identity does not apply to these parameters.
    pub skipped: Option<String>,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub exhaustive: bool,
    pub checks: Vec<IdentityCheck>,
}

impl LemmaReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(IdentityCheck::passed)
    }

    pub fn check(&self, identity: Identity) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.identity == identity)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteOptions {
    pub exhaustive_limit: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { exhaustive_limit: 8, samples: 200, seed: 0 }
    }
}

/// Tuples of pairwise disjoint subsets of `1..=n` with the given sizes.
fn disjoint_tuples(n: usize, sizes: &[usize], exhaustive: bool, samples: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Vec<NodeId>>> {
    if sizes.iter().sum::<usize>() > n {
        return Vec::new();
    }
    if !exhaustive {
        let mut nodes: Vec<NodeId> = (1..=n).collect();
        return (0..samples)
            .map(|_| {
                nodes.shuffle(rng);
                let mut at = 0;
                sizes
                    .iter()
                    .map(|&s| {
                        let mut part = nodes[at..at + s].to_vec();
                        part.sort_unstable();
                        at += s;
                        part
                    })
                    .collect()
            })
            .collect();
    }
    fn rec(pool: &[NodeId], sizes: &[usize], prefix: &mut Vec<Vec<NodeId>>, out: &mut Vec<Vec<Vec<NodeId>>>) {
        let Some((&s, rest)) = sizes.split_first() else {
            out.push(prefix.clone());
            return;
        };
        for part in pool.iter().copied().combinations(s) {
            let remaining: Vec<NodeId> = pool.iter().copied().filter(|x| !part.contains(x)).collect();
            prefix.push(part);
            rec(&remaining, rest, prefix, out);
            prefix.pop();
        }
    }
    let pool: Vec<NodeId> = (1..=n).collect();
    let mut out = Vec::new();
    rec(&pool, sizes, &mut Vec::new(), &mut out);
    out
}

struct Tables<'a, S: ?Sized> {
    code: &'a S,
    params: CodeParams,
    storage: Vec<ObservationSet>,
    repair: HashMap<(NodeId, NodeId), ObservationSet>,
    downloads: HashMap<NodeId, ObservationSet>,
}

impl<'a, S: LinearRepairScheme + ?Sized> Tables<'a, S> {
    fn new(code: &'a S) -> Result<Self> {
        let params = *code.params();
        let mut storage = vec![ObservationSet::empty(code.field(), params.file_size)];
        for i in 1..=params.n {
            storage.push(code.storage_observations(i)?);
        }
        let mut repair = HashMap::new();
        for i in 1..=params.n {
            for j in (1..=params.n).filter(|&j| j != i) {
                repair.insert((i, j), code.repair_data(i, j)?);
            }
        }
        Ok(Tables { code, params, storage, repair, downloads: HashMap::new() })
    }

    fn empty(&self) -> ObservationSet {
        ObservationSet::empty(self.code.field(), self.params.file_size)
    }

    fn storage_of(&self, nodes: &[NodeId]) -> Result<ObservationSet> {
        let mut out = self.empty();
        for &i in nodes {
            out.extend(&self.storage[i])?;
        }
        Ok(out)
    }

    /// `S_X^Y`.
    fn repair_of(&self, from: &[NodeId], to: &[NodeId]) -> Result<ObservationSet> {
        let mut out = self.empty();
        for &i in from {
            for &j in to {
                if i != j {
                    out.extend_dedup(&self.repair[&(i, j)])?;
                }
            }
        }
        Ok(out)
    }

    /// `S̃^F`.
    fn downloads_of(&mut self, nodes: &[NodeId]) -> Result<ObservationSet> {
        let mut out = self.empty();
        for &f in nodes {
            if !self.downloads.contains_key(&f) {
                self.downloads.insert(f, self.code.downloads(f)?);
            }
            out.extend_dedup(&self.downloads[&f])?;
        }
        Ok(out)
    }

    fn outside(&self, excluded: &[NodeId]) -> Vec<NodeId> {
        (1..=self.params.n).filter(|x| !excluded.contains(x)).collect()
    }
}

struct Recorder {
    check: IdentityCheck,
}

impl Recorder {
    fn new(identity: Identity) -> Self {
        Recorder { check: IdentityCheck { identity, cases: 0, violations: Vec::new(), skipped: None } }
    }

    fn skip(identity: Identity, why: &str) -> IdentityCheck {
        IdentityCheck { identity, cases: 0, violations: Vec::new(), skipped: Some(why.to_string()) }
    }

    fn expect(&mut self, statement: &str, witness: impl FnOnce() -> String, expected: usize, got: usize) {
        self.check.cases += 1;
        if expected != got {
            self.check.violations.push(Violation { statement: statement.to_string(), witness: witness(), expected, got });
        }
    }
}

fn span_flag(x: &ObservationSet, y: &ObservationSet) -> Result<usize> {
    Ok(usize::from(same_span(x, y)?))
}

/// Runs every identity on `code`.
pub fn lemma_suite<S: LinearRepairScheme + ?Sized>(code: &S, opts: SuiteOptions) -> Result<LemmaReport> {
    let mut tables = Tables::new(code)?;
    let p = tables.params;
    let exhaustive = p.n <= opts.exhaustive_limit;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut tuples = |sizes: &[usize]| disjoint_tuples(p.n, sizes, exhaustive, opts.samples, &mut rng);

    let group_tuples = tuples(&[p.t, p.k.saturating_sub(p.t), p.d + p.t - p.k]);
    let single_tuples = tuples(&[1, p.t - 1, p.k - 1, p.d - p.k + 1]);
    let mut eve_tuples = Vec::new();
    for l2 in 1..p.k {
        for l1 in 0..p.k - l2 {
            eve_tuples.extend(tuples(&[l1, l2]));
        }
    }
    let f_sets: Vec<Vec<NodeId>> = (1..=p.t.max(p.k - 1))
        .flat_map(|s| tuples(&[s]).into_iter().map(|mut v| v.remove(0)))
        .collect();

    let checks = vec![
        group_repair(&tables, &group_tuples)?,
        single_repair(&tables, &single_tuples)?,
        download_reduction(&mut tables, &eve_tuples, exhaustive)?,
        uniform_repair_entropy(&tables, &f_sets)?,
        uniform_repair_entropy_wide(&tables, &f_sets)?,
        single_helper_capacity(&tables, &eve_tuples)?,
        exchange_spans_storage(&tables, &f_sets)?,
        leakage_split(&mut tables, &eve_tuples)?,
        leakage_count(&mut tables, &eve_tuples)?,
    ];
    Ok(LemmaReport { exhaustive, checks })
}

fn group_repair<S: LinearRepairScheme + ?Sized>(tb: &Tables<S>, tuples: &[Vec<Vec<NodeId>>]) -> Result<IdentityCheck> {
    let p = tb.params;
    if p.t > p.k {
        return Ok(Recorder::skip(Identity::GroupRepair, "requires t <= k"));
    }
    let mut rec = Recorder::new(Identity::GroupRepair);
    for tuple in tuples {
        let (c, a, b) = (&tuple[0], &tuple[1], &tuple[2]);
        let helpers: Vec<NodeId> = a.iter().chain(b).copied().collect();
        let ctx = RepairContext::new(&p, c, &helpers)?;
        let rows = |from: &[NodeId]| -> Result<ObservationSet> {
            let mut out = tb.empty();
            for &h in from {
                for &f in c {
                    out.extend(&tb.code.repair_observations(&ctx, h, f)?)?;
                }
            }
            Ok(out)
        };
        let all = rows(&helpers)?;
        let w = || format!("C={c:?} A={a:?} B={b:?}");
        rec.expect("H(S_{A∪B}^C) = dtβ", w, p.d * p.t * p.beta, entropy_symbols(&all));
        let given = tb.storage_of(c)?.union(&rows(a)?)?;
        rec.expect("H(S_B^C | W_C, S_A^C) = 0", w, 0, conditional_entropy(&rows(b)?, &given)?);
    }
    Ok(rec.check)
}

fn single_repair<S: LinearRepairScheme + ?Sized>(tb: &Tables<S>, tuples: &[Vec<Vec<NodeId>>]) -> Result<IdentityCheck> {
    let p = tb.params;
    let mut rec = Recorder::new(Identity::SingleRepair);
    for tuple in tuples {
        let (i, cp, ap, bp) = (tuple[0][0], &tuple[1], &tuple[2], &tuple[3]);
        let group: Vec<NodeId> = std::iter::once(i).chain(cp.iter().copied()).collect();
        let helpers: Vec<NodeId> = ap.iter().chain(bp).copied().collect();
        let ctx = RepairContext::new(&p, &group, &helpers)?;
        let mut from_a = tb.empty();
        for &h in ap {
            from_a.extend(&tb.code.repair_observations(&ctx, h, i)?)?;
        }
        let mut rest = tb.empty();
        for &h in bp {
            rest.extend(&tb.code.repair_observations(&ctx, h, i)?)?;
        }
        for &c in cp {
            rest.extend(&tb.code.exchange_observations(&ctx, c, i)?)?;
        }
        let w = || format!("i={i} C'={cp:?} A'={ap:?} B'={bp:?}");
        rec.expect("H(S_{A'∪B'}^i, S_{C'}^i) = (d+t-1)β", w, (p.d + p.t - 1) * p.beta, entropy_symbols(&from_a.union(&rest)?));
        let given = tb.storage[i].union(&from_a)?;
        rec.expect("H(S_{B'}^i, S_{C'}^i | W_i, S_{A'}^i) = 0", w, 0, conditional_entropy(&rest, &given)?);
    }
    Ok(rec.check)
}

fn download_reduction<S: LinearRepairScheme + ?Sized>(
    tb: &mut Tables<S>,
    tuples: &[Vec<Vec<NodeId>>],
    exhaustive: bool,
) -> Result<IdentityCheck> {
    let p = tb.params;
    let mut rec = Recorder::new(Identity::DownloadReduction);
    for tuple in tuples {
        let (e, f) = (&tuple[0], &tuple[1]);
        let w = || format!("E={e:?} F={f:?}");
        let tilde = tb.downloads_of(f)?;
        let w_f = tb.storage_of(f)?;
        let s_f = tb.repair_of(&tb.outside(f), f)?;
        rec.expect("span S̃^F = span(W_F, S^F)", w, 1, span_flag(&tilde, &w_f.union(&s_f)?)?);
        for &i in f {
            let own = tb.downloads_of(&[i])?;
            rec.expect("H(W_i | S̃^i) = 0", || format!("i={i}"), 0, conditional_entropy(&tb.storage[i], &own)?);
        }
        let base = tb.storage_of(e)?.union(&w_f)?;
        let target = conditional_entropy(&tilde, &base)?;
        rec.expect("H(S̃^F | W_E, W_F) = H(S^F | W_E, W_F)", w, target, conditional_entropy(&s_f, &base)?);
        let pool: Vec<NodeId> = tb.outside(&[e.as_slice(), f.as_slice()].concat());
        let gs: Vec<Vec<NodeId>> = if exhaustive {
            pool.iter().copied().combinations(p.k - e.len() - f.len()).collect()
        } else {
            vec![pool[..p.k - e.len() - f.len()].to_vec()]
        };
        for g in gs {
            let s_g = tb.repair_of(&g, f)?;
            let wg = || format!("E={e:?} F={f:?} G={g:?}");
            rec.expect("H(S̃^F | W_E, W_F) = H(S_G^F | W_E, W_F)", wg, target, conditional_entropy(&s_g, &base)?);
            rec.expect("H(S̃^F | W_E, W_F) = H(S_G^F)", wg, target, entropy_symbols(&s_g));
        }
    }
    Ok(rec.check)
}

fn uniform_repair_entropy<S: LinearRepairScheme + ?Sized>(tb: &Tables<S>, f_sets: &[Vec<NodeId>]) -> Result<IdentityCheck> {
    let p = tb.params;
    let mut rec = Recorder::new(Identity::UniformRepairEntropy);
    let closed_form = p.t <= p.k || p.d == p.k;
    for f in f_sets.iter().filter(|f| f.len() < p.k) {
        let outside = tb.outside(f);
        let first = entropy_symbols(&tb.repair_of(&[outside[0]], f)?);
        for &i in &outside {
            let h = entropy_symbols(&tb.repair_of(&[i], f)?);
            let w = || format!("F={f:?} i={i} (vs i={})", outside[0]);
            rec.expect("H(S_i1^F) = H(S_i2^F)", w, first, h);
            if closed_form && f.len() <= p.t {
                rec.expect("H(S_i^F) = |F|β", || format!("F={f:?} i={i}"), f.len() * p.beta, h);
            }
        }
    }
    Ok(rec.check)
}

fn uniform_repair_entropy_wide<S: LinearRepairScheme + ?Sized>(
    tb: &Tables<S>,
    f_sets: &[Vec<NodeId>],
) -> Result<IdentityCheck> {
    let p = tb.params;
    if !(p.t >= p.k && p.d == p.k) {
        return Ok(Recorder::skip(Identity::UniformRepairEntropyWide, "requires t >= k and d = k"));
    }
    let mut rec = Recorder::new(Identity::UniformRepairEntropyWide);
    for f in f_sets.iter().filter(|f| f.len() >= p.k && f.len() <= p.t) {
        for i in tb.outside(f) {
            let h = entropy_symbols(&tb.repair_of(&[i], f)?);
            rec.expect("H(S_i^F) = |F|β", || format!("F={f:?} i={i}"), f.len() * p.beta, h);
        }
    }
    Ok(rec.check)
}

fn single_helper_capacity<S: LinearRepairScheme + ?Sized>(
    tb: &Tables<S>,
    tuples: &[Vec<Vec<NodeId>>],
) -> Result<IdentityCheck> {
    let p = tb.params;
    let mut rec = Recorder::new(Identity::SingleHelperCapacity);
    for tuple in tuples {
        let (e, f) = (&tuple[0], &tuple[1]);
        let eve = EveModel::new(&p, e, f)?;
        let measured = measured_secrecy_capacity(tb.code, &eve)?;
        let g = eve.default_complement(&p)[0];
        let h = entropy_symbols(&tb.repair_of(&[g], f)?);
        let formula = (p.k - e.len() - f.len()) * p.alpha.saturating_sub(h);
        rec.expect("B^(s) = (k-l1-l2)(α - H(S_g^F))", || format!("E={e:?} F={f:?} g={g}"), formula, measured);
    }
    Ok(rec.check)
}

fn exchange_spans_storage<S: LinearRepairScheme + ?Sized>(tb: &Tables<S>, f_sets: &[Vec<NodeId>]) -> Result<IdentityCheck> {
    let p = tb.params;
    let mut rec = Recorder::new(Identity::ExchangeSpansStorage);
    for f in f_sets.iter().filter(|f| f.len() < p.k) {
        let mut exchanged = tb.empty();
        for &i in f {
            for ctx in tb.code.contexts(Some(i)) {
                for &c in ctx.group().iter().filter(|&&c| c != i) {
                    exchanged.extend_dedup(&tb.code.exchange_observations(&ctx, c, i)?)?;
                }
            }
        }
        rec.expect("span S̲^F = span W_F", || format!("F={f:?}"), 1, span_flag(&exchanged, &tb.storage_of(f)?)?);
    }
    Ok(rec.check)
}

fn leakage_split<S: LinearRepairScheme + ?Sized>(tb: &mut Tables<S>, tuples: &[Vec<Vec<NodeId>>]) -> Result<IdentityCheck> {
    let p = tb.params;
    let mut rec = Recorder::new(Identity::LeakageSplit);
    for tuple in tuples {
        let (e, f) = (&tuple[0], &tuple[1]);
        let eve = EveModel::new(&p, e, f)?;
        let g = eve.default_complement(&p);
        let ef: Vec<NodeId> = e.iter().chain(f).copied().collect();
        let t_set = tb.outside(&[ef.as_slice(), g.as_slice()].concat());
        let w_e = tb.storage_of(e)?;
        let leaked = entropy_symbols(&w_e.union(&tb.downloads_of(f)?)?);
        let w_ef = tb.storage_of(&ef)?;
        let s_g = tb.repair_of(&g, f)?;
        let w = || format!("E={e:?} F={f:?} G={g:?}");
        rec.expect("H(W_E, S̃^F) = H(W_{E∪F}) + H(S_G^F)", w, entropy_symbols(&w_ef) + entropy_symbols(&s_g), leaked);
        rec.expect(
            "H(S_T^F | W_{E∪F}, S_G^F) = 0",
            || format!("E={e:?} F={f:?} G={g:?} T={t_set:?}"),
            0,
            conditional_entropy(&tb.repair_of(&t_set, f)?, &w_ef.union(&s_g)?)?,
        );
    }
    Ok(rec.check)
}

fn leakage_count<S: LinearRepairScheme + ?Sized>(tb: &mut Tables<S>, tuples: &[Vec<Vec<NodeId>>]) -> Result<IdentityCheck> {
    let p = tb.params;
    let mut rec = Recorder::new(Identity::LeakageCount);
    for tuple in tuples {
        let (e, f) = (&tuple[0], &tuple[1]);
        let eve = EveModel::new(&p, e, f)?;
        let g = eve.default_complement(&p);
        let leaked = entropy_symbols(&tb.storage_of(e)?.union(&tb.downloads_of(f)?)?);
        let mut sum = 0;
        for &x in &g {
            let h = entropy_symbols(&tb.repair_of(&[x], f)?);
            rec.expect("H(S_g^F) = min(l2, t)β", || format!("F={f:?} g={x}"), f.len().min(p.t) * p.beta, h);
            sum += h;
        }
        let w = || format!("E={e:?} F={f:?} G={g:?}");
        rec.expect("H(W_E, S̃^F) = (l1+l2)α + Σ H(S_g^F)", w, (e.len() + f.len()) * p.alpha + sum, leaked);
    }
    Ok(rec.check)
}
