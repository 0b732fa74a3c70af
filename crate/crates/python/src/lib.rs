//! Python bindings: encode, repair and reconstruct with the stable code, run
//! the attacks on the unstable codes, and measure secrecy capacity.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use coopstore::eavesdropper::{
    all_sizes, bandwidth_comparison, capacity_sweep, leakage_report, predicted_secrecy_capacity, EveModel,
};
use coopstore::field::{Field, FieldSpec, FiniteField};
use coopstore::legacy::{CodeA, CodeB};
use coopstore::matrix::Mat;
use coopstore::params::{CodeParams, NodeId, RepairContext};
use coopstore::scheme::stability_certificate;
use coopstore::secure::SecureScheme;
use coopstore::stable::{ShardVector, StableCode as Inner};

fn err(e: coopstore::error::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// `p` for GF(p), `m` for GF(2^m); GF(11) when neither is given.
fn field_of(p: Option<u64>, m: Option<u32>) -> PyResult<Field> {
    let spec = match (p, m) {
        (Some(p), None) => FieldSpec::prime(p),
        (None, Some(m)) => FieldSpec::binary(m),
        (None, None) => FieldSpec::prime(11),
        (Some(_), Some(_)) => return Err(PyValueError::new_err("give p or m, not both")),
    };
    Field::new(spec).map_err(err)
}

fn params_dict<'py>(py: Python<'py>, p: &CodeParams) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("n", p.n)?;
    d.set_item("k", p.k)?;
    d.set_item("d", p.d)?;
    d.set_item("t", p.t)?;
    d.set_item("alpha", p.alpha)?;
    d.set_item("beta", p.beta)?;
    d.set_item("file_size", p.file_size)?;
    d.set_item("q", p.q)?;
    Ok(d)
}

fn shards_of(map: BTreeMap<NodeId, Vec<u64>>) -> Vec<ShardVector> {
    map.into_iter().map(|(node_id, symbols)| ShardVector { node_id, symbols }).collect()
}

/// `(l1, l2, placements, measured_min, measured_max, predicted)`.
type CapacityRow = (usize, usize, usize, usize, usize, Option<usize>);

/// The stable `d = k` cooperative code.
#[pyclass(frozen, module = "pycoopstore")]
struct StableCode {
    inner: Inner,
}

#[pymethods]
impl StableCode {
    #[new]
    #[pyo3(signature = (n, k, t, *, p=None, m=None))]
    fn new(n: usize, k: usize, t: usize, p: Option<u64>, m: Option<u32>) -> PyResult<Self> {
        Ok(StableCode { inner: Inner::new(n, k, t, field_of(p, m)?).map_err(err)? })
    }

    #[getter]
    fn params<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        params_dict(py, self.inner.params())
    }

    /// Node id to stored symbols for a message of `B` symbols.
    fn encode(&self, message: Vec<u64>) -> PyResult<BTreeMap<NodeId, Vec<u64>>> {
        let shards = self.inner.encode_message(&message).map_err(err)?;
        Ok(shards.into_iter().map(|s| (s.node_id, s.symbols)).collect())
    }

    /// The message back from any `k` shards.
    fn reconstruct(&self, shards: BTreeMap<NodeId, Vec<u64>>) -> PyResult<Vec<u64>> {
        let m = self.inner.reconstruct(&shards_of(shards)).map_err(err)?;
        Ok(m.row_vecs().concat())
    }

    /// Regenerates `group` from the helpers' shards; returns the new shards
    /// and the symbols downloaded and exchanged.
    #[pyo3(signature = (group, shards, helpers=None))]
    fn repair<'py>(
        &self,
        py: Python<'py>,
        group: Vec<NodeId>,
        shards: BTreeMap<NodeId, Vec<u64>>,
        helpers: Option<Vec<NodeId>>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let p = self.inner.params();
        let ctx = match helpers {
            Some(h) => RepairContext::new(p, &group, &h),
            None => RepairContext::with_default_helpers(p, &group),
        }
        .map_err(err)?;
        let out = self.inner.cooperative_repair(&ctx, &shards_of(shards)).map_err(err)?;
        let d = PyDict::new(py);
        let regenerated: BTreeMap<NodeId, Vec<u64>> = out.shards.into_iter().map(|s| (s.node_id, s.symbols)).collect();
        d.set_item("shards", regenerated)?;
        d.set_item("helpers", ctx.helpers().to_vec())?;
        d.set_item("downloaded", out.downloaded)?;
        d.set_item("exchanged", out.exchanged)?;
        Ok(d)
    }

    fn is_stable(&self) -> PyResult<bool> {
        Ok(stability_certificate(&self.inner).map_err(err)?.is_stable())
    }

    /// Leaked symbols and measured secrecy capacity for one placement.
    #[pyo3(signature = (observed, downloads))]
    fn leakage<'py>(&self, py: Python<'py>, observed: Vec<NodeId>, downloads: Vec<NodeId>) -> PyResult<Bound<'py, PyDict>> {
        let eve = EveModel::new(self.inner.params(), &observed, &downloads).map_err(err)?;
        let r = leakage_report(&self.inner, &eve, true).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("leaked", r.leaked_symbols)?;
        d.set_item("capacity", r.measured_capacity)?;
        d.set_item("predicted", r.predicted_capacity.value())?;
        d.set_item("labels", r.observations.iter().map(|o| o.label.clone()).collect::<Vec<_>>())?;
        Ok(d)
    }

    /// One [`CapacityRow`] per size, every placement measured.
    #[pyo3(signature = (sizes=None))]
    fn capacity_table(&self, sizes: Option<Vec<(usize, usize)>>) -> PyResult<Vec<CapacityRow>> {
        let sizes = sizes.unwrap_or_else(|| all_sizes(self.inner.params()));
        let rows = capacity_sweep(&self.inner, &sizes, true).map_err(err)?;
        Ok(rows
            .into_iter()
            .map(|r| (r.l1, r.l2, r.placements, r.measured_min, r.measured_max, r.predicted.value()))
            .collect())
    }

    fn __repr__(&self) -> String {
        let p = self.inner.params();
        format!("StableCode(n={}, k={}, t={}, q={})", p.n, p.k, p.t, p.q)
    }
}

/// Closed-form secrecy capacity, or `None` outside the covered regimes.
#[pyfunction]
#[pyo3(signature = (n, k, t, l1, l2, *, p=None, m=None))]
fn predicted_capacity(n: usize, k: usize, t: usize, l1: usize, l2: usize, p: Option<u64>, m: Option<u32>) -> PyResult<Option<usize>> {
    let params = CodeParams::scalar_d_equals_k(n, k, t, field_of(p, m)?.order()).map_err(err)?;
    match predicted_secrecy_capacity(&params, l1, l2) {
        Ok(v) => Ok(Some(v)),
        Err(coopstore::error::Error::NotCoveredRegime(..)) => Ok(None),
        Err(e) => Err(err(e)),
    }
}

/// `(msr, mscr)` symbols to repair `t` failures, as exact fraction strings.
#[pyfunction]
fn bandwidth(n: usize, k: usize, d: usize, t: usize, file_size: usize) -> PyResult<(String, String)> {
    let b = bandwidth_comparison(n, k, d, t, file_size).map_err(err)?;
    Ok((b.msr.to_string(), b.mscr.to_string()))
}

/// Attack on Code-A with a seeded random message.
#[pyfunction]
#[pyo3(signature = (d, *, p=11, omega=None, parity=1, seed=0))]
fn code_a_attack<'py>(py: Python<'py>, d: usize, p: u64, omega: Option<u64>, parity: usize, seed: u64) -> PyResult<Bound<'py, PyDict>> {
    let field = field_of(Some(p), None)?;
    let omega = omega.unwrap_or_else(|| field.primitive_element());
    let code = CodeA::new(d, field, omega).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a: Vec<u64> = (0..d).map(|_| rng.gen_range(0..p)).collect();
    let b: Vec<u64> = (0..d).map(|_| rng.gen_range(0..p)).collect();
    let out = code.attack(&code.encode(&a, &b).map_err(err)?, parity).map_err(err)?;
    let r = PyDict::new(py);
    r.set_item("exact", out.a == a && out.b == b)?;
    r.set_item("a", out.a)?;
    r.set_item("b", out.b)?;
    r.set_item("leaked", out.leaked_entropy)?;
    r.set_item("leakage_matrix", out.leakage_matrix.row_vecs())?;
    Ok(r)
}

/// Attack on Code-B with a seeded random message.
#[pyfunction]
#[pyo3(signature = (n, k, t, *, p=11, seed=0))]
fn code_b_attack<'py>(py: Python<'py>, n: usize, k: usize, t: usize, p: u64, seed: u64) -> PyResult<Bound<'py, PyDict>> {
    let field = field_of(Some(p), None)?;
    let code = CodeB::new(n, k, t, field).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = Mat::from_fn(&field, t, k, |_, _| rng.gen_range(0..p));
    let out = code.attack(&code.encode(&m).map_err(err)?).map_err(err)?;
    let r = PyDict::new(py);
    r.set_item("exact", out.recovered == m)?;
    r.set_item("recovered", out.recovered.row_vecs())?;
    r.set_item("leaked", out.leaked_entropy)?;
    r.set_item("groups", out.groups.iter().map(|c| c.to_string()).collect::<Vec<_>>())?;
    r.set_item("stable", stability_certificate(&code).map_err(err)?.is_stable())?;
    Ok(r)
}

/// Checks `I(secret; eavesdropper) = 0` for every placement of size `(l1, l2)`
/// on the precoded stable code over GF(2^m). Returns `(secret_len, placements, passed)`.
#[pyfunction]
#[pyo3(signature = (n, k, t, l1, l2, *, m=4))]
fn verify_secrecy(n: usize, k: usize, t: usize, l1: usize, l2: usize, m: u32) -> PyResult<(usize, usize, usize)> {
    let code = Inner::new(n, k, t, field_of(None, Some(m))?).map_err(err)?;
    let scheme = SecureScheme::new(&code, l1, l2).map_err(err)?;
    let verdicts = scheme.verify_all(l1, l2).map_err(err)?;
    Ok((scheme.secret_len(), verdicts.len(), verdicts.iter().filter(|v| v.passed()).count()))
}

#[pymodule]
fn pycoopstore(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<StableCode>()?;
    m.add_function(wrap_pyfunction!(predicted_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(bandwidth, m)?)?;
    m.add_function(wrap_pyfunction!(code_a_attack, m)?)?;
    m.add_function(wrap_pyfunction!(code_b_attack, m)?)?;
    m.add_function(wrap_pyfunction!(verify_secrecy, m)?)?;
    Ok(())
}
