//! The passive `(l1, l2)` eavesdropper: reads the contents of the nodes in
//! `E` and every repair download of the nodes in `F`, over every repair
//! group and helper set.

use itertools::Itertools;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::entropy::{entropy_symbols, ObservationSet};
use crate::error::{Error, Result};
use crate::params::{CodeParams, NodeId};
use crate::scheme::LinearRepairScheme;

/// Node sets `E` (contents) and `F` (repair downloads).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct EveModel {
    observed: Vec<NodeId>,
    downloads: Vec<NodeId>,
}

impl EveModel {
    pub fn new(params: &CodeParams, observed: &[NodeId], downloads: &[NodeId]) -> Result<Self> {
        let mut all: Vec<NodeId> = observed.iter().chain(downloads).copied().collect();
        if let Some(&bad) = all.iter().find(|&&x| x == 0 || x > params.n) {
            return Err(Error::InvalidEveModel(format!("node {bad} outside [1, {}]", params.n)));
        }
        all.sort_unstable();
        if let Some(w) = all.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidEveModel(format!("node {} listed twice", w[0])));
        }
        let (l1, l2) = (observed.len(), downloads.len());
        if l1 + l2 >= params.k {
            return Err(Error::InvalidL { l1, l2, k: params.k });
        }
        let mut observed = observed.to_vec();
        let mut downloads = downloads.to_vec();
        observed.sort_unstable();
        downloads.sort_unstable();
        Ok(EveModel { observed, downloads })
    }

    /// `E`.
    pub fn observed(&self) -> &[NodeId] {
        &self.observed
    }

    /// `F`.
    pub fn downloads(&self) -> &[NodeId] {
        &self.downloads
    }

    pub fn l1(&self) -> usize {
        self.observed.len()
    }

    pub fn l2(&self) -> usize {
        self.downloads.len()
    }

    /// The `k - l1 - l2` lowest nodes outside `E ∪ F`.
    pub fn default_complement(&self, params: &CodeParams) -> Vec<NodeId> {
        (1..=params.n)
            .filter(|x| !self.observed.contains(x) && !self.downloads.contains(x))
            .take(params.k - self.l1() - self.l2())
            .collect()
    }
}

/// Everything the eavesdropper sees, as functionals of the message.
pub fn leakage_observations<S: LinearRepairScheme + ?Sized>(code: &S, eve: &EveModel) -> Result<ObservationSet> {
    let mut out = ObservationSet::empty(code.field(), code.params().file_size);
    for &e in eve.observed() {
        out.extend(&code.storage_observations(e)?)?;
    }
    for &f in eve.downloads() {
        out.extend_dedup(&code.downloads(f)?)?;
    }
    Ok(out)
}

/// `B` minus the leaked entropy.
pub fn measured_secrecy_capacity<S: LinearRepairScheme + ?Sized>(code: &S, eve: &EveModel) -> Result<usize> {
    let leaked = entropy_symbols(&leakage_observations(code, eve)?);
    Ok(code.params().file_size - leaked)
}

/// Closed-form secrecy capacity of a stable code, where it is known.
pub fn predicted_secrecy_capacity(params: &CodeParams, l1: usize, l2: usize) -> Result<usize> {
    let CodeParams { k, d, t, alpha, beta, .. } = *params;
    if l1 + l2 >= k {
        return Err(Error::InvalidL { l1, l2, k });
    }
    if d == k && l2 >= t {
        return Ok(0);
    }
    if (l2 <= t && t <= k) || (t > k && d == k) {
        return Ok((k - l1 - l2) * (alpha - l2 * beta));
    }
    Err(Error::NotCoveredRegime(l1, l2))
}

/// A capacity prediction, serialised as a number or `"not-covered"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prediction {
    Value(usize),
    NotCovered,
    /// Not computed (the closed form only applies to stable codes).
    Skipped,
}

impl Prediction {
    pub fn for_params(params: &CodeParams, l1: usize, l2: usize) -> Result<Self> {
        match predicted_secrecy_capacity(params, l1, l2) {
            Ok(v) => Ok(Prediction::Value(v)),
            Err(Error::NotCoveredRegime(..)) => Ok(Prediction::NotCovered),
            Err(e) => Err(e),
        }
    }

    pub fn value(&self) -> Option<usize> {
        match self {
            Prediction::Value(v) => Some(*v),
            _ => None,
        }
    }
}

impl std::fmt::Display for Prediction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Prediction::Value(v) => write!(f, "{v}"),
            Prediction::NotCovered => f.write_str("not-covered"),
            Prediction::Skipped => f.write_str("-"),
        }
    }
}

impl Serialize for Prediction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Prediction::Value(v) => s.serialize_u64(*v as u64),
            Prediction::NotCovered => s.serialize_str("not-covered"),
            Prediction::Skipped => s.serialize_none(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ObservedRow {
    pub label: String,
    pub coefficients: Vec<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LeakageReport {
    pub scheme: String,
    pub eve: EveModel,
    pub leaked_symbols: usize,
    pub measured_capacity: usize,
    pub predicted_capacity: Prediction,
    pub observations: Vec<ObservedRow>,
}

impl LeakageReport {
    pub fn matches_prediction(&self) -> Option<bool> {
        self.predicted_capacity.value().map(|p| p == self.measured_capacity)
    }
}

/// Measures one placement; `predict` controls whether the closed form is
/// evaluated (it only applies to stable codes).
pub fn leakage_report<S: LinearRepairScheme + ?Sized>(code: &S, eve: &EveModel, predict: bool) -> Result<LeakageReport> {
    let obs = leakage_observations(code, eve)?;
    let leaked_symbols = entropy_symbols(&obs);
    let predicted_capacity =
        if predict { Prediction::for_params(code.params(), eve.l1(), eve.l2())? } else { Prediction::Skipped };
    let observations = obs
        .labels()
        .iter()
        .enumerate()
        .map(|(i, l)| ObservedRow { label: l.clone(), coefficients: obs.rows().row(i).to_vec() })
        .collect();
    Ok(LeakageReport {
        scheme: code.name().to_string(),
        eve: eve.clone(),
        leaked_symbols,
        measured_capacity: code.params().file_size - leaked_symbols,
        predicted_capacity,
        observations,
    })
}

/// Every `(E, F)` with `|E| = l1`, `|F| = l2`, disjoint.
pub fn placements(params: &CodeParams, l1: usize, l2: usize) -> Result<Vec<EveModel>> {
    if l1 + l2 >= params.k {
        return Err(Error::InvalidL { l1, l2, k: params.k });
    }
    let mut out = Vec::new();
    for e in (1..=params.n).combinations(l1) {
        let rest: Vec<NodeId> = (1..=params.n).filter(|x| !e.contains(x)).collect();
        for f in rest.into_iter().combinations(l2) {
            out.push(EveModel::new(params, &e, &f)?);
        }
    }
    Ok(out)
}

/// Every `(l1, l2)` with `l1 + l2 <= k - 1`.
pub fn all_sizes(params: &CodeParams) -> Vec<(usize, usize)> {
    (0..params.k).flat_map(|s| (0..=s).rev().map(move |l1| (l1, s - l1))).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub l1: usize,
    pub l2: usize,
    pub placements: usize,
    pub measured_min: usize,
    pub measured_max: usize,
    pub predicted: Prediction,
    /// Placements whose measured capacity differs from the prediction.
    pub mismatches: usize,
}

impl SweepRow {
    pub fn passes(&self) -> bool {
        self.mismatches == 0
    }
}

/// Measures every placement for each `(l1, l2)`, in parallel.
pub fn capacity_sweep<S: LinearRepairScheme + ?Sized>(
    code: &S,
    sizes: &[(usize, usize)],
    predict: bool,
) -> Result<Vec<SweepRow>> {
    sizes
        .iter()
        .map(|&(l1, l2)| {
            let models = placements(code.params(), l1, l2)?;
            let measured: Vec<usize> =
                models.par_iter().map(|m| measured_secrecy_capacity(code, m)).collect::<Result<_>>()?;
            let predicted = if predict { Prediction::for_params(code.params(), l1, l2)? } else { Prediction::Skipped };
            let mismatches = match predicted.value() {
                Some(p) => measured.iter().filter(|&&m| m != p).count(),
                None => 0,
            };
            Ok(SweepRow {
                l1,
                l2,
                placements: models.len(),
                measured_min: measured.iter().copied().min().unwrap_or(0),
                measured_max: measured.iter().copied().max().unwrap_or(0),
                predicted,
                mismatches,
            })
        })
        .collect()
}

/// Symbols moved to repair `t` failures: `t` independent MSR repairs versus
/// one cooperative MSCR repair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BandwidthComparison {
    pub msr: Ratio<u64>,
    pub mscr: Ratio<u64>,
}

impl Serialize for BandwidthComparison {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("BandwidthComparison", 2)?;
        st.serialize_field("msr", &self.msr.to_string())?;
        st.serialize_field("mscr", &self.mscr.to_string())?;
        st.end()
    }
}

pub fn bandwidth_comparison(n: usize, k: usize, d: usize, t: usize, file_size: usize) -> Result<BandwidthComparison> {
    if t == 0 || d < k || k == 0 {
        return Err(Error::InvalidParams(format!("need d >= k >= 1 and t >= 1, got k={k} d={d} t={t}")));
    }
    if n < d + t {
        return Err(Error::InvalidParams(format!("n = {n} < d + t = {}", d + t)));
    }
    let (k, d, t, b) = (k as u64, d as u64, t as u64, file_size as u64);
    if b % (k * (d - k + t)) != 0 {
        return Err(Error::NonIntegralParams(format!("B = {b} is not a multiple of k(d-k+t) = {}", k * (d - k + t))));
    }
    let msr = Ratio::new(t * d * b, k * (d - k + 1));
    let mscr = Ratio::new(t * (d + t - 1) * b, k * (d - k + t));
    debug_assert!(t == 1 || mscr < msr);
    Ok(BandwidthComparison { msr, mscr })
}
