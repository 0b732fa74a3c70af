//! Entropy of linear observations of a uniformly random message vector.
//!
//! If `x` is uniform over `GF(q)^B` and `Y = A·x`, then `Y` is uniform over
//! the column space of `A`, so `H(Y) = rank(A)` in units of `log q`. Every
//! conditional entropy and mutual information below is an integer identity
//! on ranks of stacked observation matrices.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Field, FiniteField};
use crate::matrix::Mat;

/// Rows are linear functionals of the message; each row carries a label
/// naming where the observed symbol came from.
#[derive(Clone, PartialEq)]
pub struct ObservationSet {
    rows: Mat,
    labels: Vec<String>,
}

impl ObservationSet {
    pub fn empty(field: &Field, message_len: usize) -> Self {
        ObservationSet { rows: Mat::zeros(field, 0, message_len), labels: Vec::new() }
    }

    /// Wraps a matrix; rows get labels `"{prefix}[i]"`.
    pub fn from_mat(rows: Mat, prefix: &str) -> Self {
        let labels = (0..rows.rows()).map(|i| format!("{prefix}[{i}]")).collect();
        ObservationSet { rows, labels }
    }

    pub fn with_labels(rows: Mat, labels: Vec<String>) -> Result<Self> {
        if labels.len() != rows.rows() {
            return Err(Error::DimensionMismatch(format!("{} labels for {} rows", labels.len(), rows.rows())));
        }
        Ok(ObservationSet { rows, labels })
    }

    pub fn field(&self) -> &Field {
        self.rows.field()
    }

    pub fn message_len(&self) -> usize {
        self.rows.cols()
    }

    pub fn len(&self) -> usize {
        self.rows.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.rows() == 0
    }

    pub fn rows(&self) -> &Mat {
        &self.rows
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn push(&mut self, row: &[u64], label: impl Into<String>) -> Result<()> {
        self.rows.push_row(row)?;
        self.labels.push(label.into());
        Ok(())
    }

    /// Appends every row of `other`.
    pub fn extend(&mut self, other: &ObservationSet) -> Result<()> {
        self.check_compatible(other)?;
        for (i, label) in other.labels.iter().enumerate() {
            self.push(other.rows.row(i), label.clone())?;
        }
        Ok(())
    }

    /// Appends rows of `other` that are not already present verbatim.
    pub fn extend_dedup(&mut self, other: &ObservationSet) -> Result<()> {
        self.check_compatible(other)?;
        for (i, label) in other.labels.iter().enumerate() {
            let row = other.rows.row(i);
            if !(0..self.len()).any(|j| self.rows.row(j) == row) {
                self.push(row, label.clone())?;
            }
        }
        Ok(())
    }

    /// Union of two sets (self first).
    pub fn union(&self, other: &ObservationSet) -> Result<ObservationSet> {
        let mut out = self.clone();
        out.extend(other)?;
        Ok(out)
    }

    fn check_compatible(&self, other: &ObservationSet) -> Result<()> {
        if self.message_len() != other.message_len() {
            return Err(Error::DimensionMismatch(format!(
                "message lengths {} and {}",
                self.message_len(),
                other.message_len()
            )));
        }
        if self.field() != other.field() {
            return Err(Error::DimensionMismatch("observations over different fields".into()));
        }
        Ok(())
    }

    /// Evaluates every functional on a concrete message.
    pub fn evaluate(&self, message: &[u64]) -> Result<Vec<u64>> {
        self.rows.mul_vec(message)
    }

    /// Indices of a maximal independent subset of rows, in order of first appearance.
    pub fn independent_rows(&self) -> Vec<usize> {
        let mut basis = Mat::zeros(self.field(), 0, self.message_len());
        let mut picked = Vec::new();
        for i in 0..self.len() {
            let mut cand = basis.clone();
            cand.push_row(self.rows.row(i)).expect("same width");
            if cand.rank() > basis.rows() {
                basis = cand;
                picked.push(i);
            }
        }
        picked
    }
}

impl fmt::Debug for ObservationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ObservationSet (B = {}) [", self.message_len())?;
        for (i, l) in self.labels.iter().enumerate() {
            writeln!(f, "  {l}: {:?}", self.rows.row(i))?;
        }
        write!(f, "]")
    }
}

/// `H(obs)` in symbols.
pub fn entropy_symbols(obs: &ObservationSet) -> usize {
    obs.rows.rank()
}

/// Joint entropy of several sets.
pub fn joint_entropy(sets: &[&ObservationSet]) -> Result<usize> {
    let Some((first, rest)) = sets.split_first() else {
        return Ok(0);
    };
    let mut acc = (*first).clone();
    for s in rest {
        acc.extend(s)?;
    }
    Ok(entropy_symbols(&acc))
}

/// `H(X | Y) = rank(X; Y) - rank(Y)`.
pub fn conditional_entropy(x: &ObservationSet, y: &ObservationSet) -> Result<usize> {
    let joint = x.union(y)?;
    Ok(entropy_symbols(&joint) - entropy_symbols(y))
}

/// `I(X; Y) = rank(X) + rank(Y) - rank(X; Y)`.
pub fn mutual_information(x: &ObservationSet, y: &ObservationSet) -> Result<usize> {
    let joint = x.union(y)?;
    Ok(entropy_symbols(x) + entropy_symbols(y) - entropy_symbols(&joint))
}

/// True when `x` and `y` span the same subspace of functionals.
pub fn same_span(x: &ObservationSet, y: &ObservationSet) -> Result<bool> {
    let joint = entropy_symbols(&x.union(y)?);
    Ok(joint == entropy_symbols(x) && joint == entropy_symbols(y))
}

/// True when every functional of `x` lies in the span of `y`.
pub fn in_span(x: &ObservationSet, y: &ObservationSet) -> Result<bool> {
    Ok(conditional_entropy(x, y)? == 0)
}

/// Largest message space [`brute_force_entropy`] will enumerate.
pub const BRUTE_FORCE_LIMIT: u64 = 1 << 20;

/// Exact output distribution of an observation set under a uniform message,
/// summarised as `count -> number of outputs with that count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactEntropy {
    pub total: u64,
    pub histogram: BTreeMap<u64, u64>,
}

impl ExactEntropy {
    /// Number of distinct outputs if the distribution is uniform.
    pub fn uniform_support(&self) -> Option<u64> {
        if self.histogram.len() == 1 {
            self.histogram.values().next().copied()
        } else {
            None
        }
    }

    /// Shannon entropy in bits.
    pub fn bits(&self) -> f64 {
        let n = self.total as f64;
        self.histogram
            .iter()
            .map(|(&c, &mult)| {
                let p = c as f64 / n;
                -(mult as f64) * p * p.log2()
            })
            .sum()
    }

    /// Exactly `symbols · log2(q)` bits: uniform over `q^symbols` outputs.
    pub fn equals_symbols(&self, symbols: usize, q: u64) -> bool {
        let target = (q as u128).checked_pow(symbols as u32);
        self.uniform_support().map(u128::from) == target
    }
}

/// Enumerates every message in `GF(q)^B` and tabulates the observed outputs.
pub fn brute_force_entropy(obs: &ObservationSet) -> Result<ExactEntropy> {
    let f = obs.field();
    let q = f.order();
    let b = obs.message_len();
    let total = (q as u128).pow(b as u32);
    if total > BRUTE_FORCE_LIMIT as u128 {
        return Err(Error::InstanceTooLarge(format!("{q}^{b} messages exceeds 2^20")));
    }
    let total = total as u64;
    let mut counts: HashMap<Vec<u64>, u64> = HashMap::new();
    let mut msg = vec![0u64; b];
    for idx in 0..total {
        let mut rest = idx;
        for m in msg.iter_mut() {
            *m = rest % q;
            rest /= q;
        }
        let out: Vec<u64> = (0..obs.len())
            .map(|r| obs.rows.row(r).iter().zip(&msg).fold(0, |acc, (a, x)| f.add(&acc, &f.mul(a, x))))
            .collect();
        *counts.entry(out).or_default() += 1;
    }
    let mut histogram = BTreeMap::new();
    for c in counts.into_values() {
        *histogram.entry(c).or_default() += 1;
    }
    Ok(ExactEntropy { total, histogram })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs(p: u64, b: usize, rows: Vec<Vec<u64>>) -> ObservationSet {
        let f = Field::prime(p).unwrap();
        ObservationSet::from_mat(Mat::from_rows(&f, b, rows).unwrap(), "x")
    }

    #[test]
    fn entropy_examples() {
        let f = Field::prime(5).unwrap();
        assert_eq!(entropy_symbols(&ObservationSet::empty(&f, 4)), 0);
        let id = ObservationSet::from_mat(Mat::identity(&f, 4), "e");
        assert_eq!(entropy_symbols(&id), 4);
        let mut dup = id.clone();
        dup.push(&[1, 0, 0, 0], "dup").unwrap();
        assert_eq!(entropy_symbols(&dup), 4);
    }

    #[test]
    fn conditional_examples() {
        let x = obs(2, 2, vec![vec![1, 0]]);
        let y = obs(2, 2, vec![vec![0, 1]]);
        let empty = ObservationSet::empty(x.field(), 2);
        assert_eq!(conditional_entropy(&x, &x).unwrap(), 0);
        assert_eq!(conditional_entropy(&x, &empty).unwrap(), 1);
        assert_eq!(conditional_entropy(&x, &y).unwrap(), 1);
        // brute force: (x0, x1) over GF(2) -> H(x0, x1) - H(x1) = 2 - 1
        let joint = brute_force_entropy(&x.union(&y).unwrap()).unwrap();
        let marg = brute_force_entropy(&y).unwrap();
        assert_eq!(joint.bits() - marg.bits(), 1.0);
        let wrong = obs(2, 3, vec![vec![1, 0, 0]]);
        assert!(matches!(conditional_entropy(&x, &wrong), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn mutual_information_examples() {
        let x = obs(3, 2, vec![vec![1, 0]]);
        let y = obs(3, 2, vec![vec![0, 2]]);
        let empty = ObservationSet::empty(x.field(), 2);
        assert_eq!(mutual_information(&x, &empty).unwrap(), 0);
        assert_eq!(mutual_information(&x, &x).unwrap(), 1);
        assert_eq!(mutual_information(&x, &y).unwrap(), 0);
        // brute-force joint distribution over the 9 messages
        let hx = brute_force_entropy(&x).unwrap().bits();
        let hy = brute_force_entropy(&y).unwrap().bits();
        let hxy = brute_force_entropy(&x.union(&y).unwrap()).unwrap().bits();
        assert!((hx + hy - hxy).abs() < 1e-12);
    }

    #[test]
    fn brute_force_examples() {
        let id = obs(2, 3, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        let e = brute_force_entropy(&id).unwrap();
        assert_eq!(e.uniform_support(), Some(8));
        assert_eq!(e.bits(), 3.0);
        let zero = obs(2, 3, vec![vec![0, 0, 0]]);
        let z = brute_force_entropy(&zero).unwrap();
        assert_eq!(z.bits(), 0.0);
        assert!(z.equals_symbols(0, 2));
        let big = obs(11, 6, vec![vec![1; 6]]);
        assert!(matches!(brute_force_entropy(&big), Err(Error::InstanceTooLarge(_))));
    }

    #[test]
    fn independent_rows_picks_basis() {
        let o = obs(7, 3, vec![vec![1, 0, 0], vec![2, 0, 0], vec![0, 1, 0], vec![1, 1, 0]]);
        assert_eq!(o.independent_rows(), vec![0, 2]);
    }
}
