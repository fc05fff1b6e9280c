//! Python bindings for the `magicstate` engine.

use std::collections::BTreeMap;

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use magicstate::analysis;
use magicstate::bloch::{self, BlochVector};
use magicstate::codes::{self, Bitword, CodewordSet};
use magicstate::distill::{self, DistillationMap};
use magicstate::knownmaps;
use magicstate::oracle::DenseState;
use magicstate::stabreduce;

fn py_err(e: magicstate::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A codeword set `S` (the even subcode spanning `|0_L>`).
#[pyclass(name = "Code", module = "magicstate_py", skip_from_py_object)]
#[derive(Clone)]
struct PyCode(CodewordSet);

#[pymethods]
impl PyCode {
    #[staticmethod]
    fn steane() -> Self {
        Self(codes::steane_s())
    }

    #[staticmethod]
    fn golay() -> Self {
        Self(codes::golay_s())
    }

    #[staticmethod]
    fn rm15() -> Self {
        Self(codes::rm15_s())
    }

    /// Span of generator bitstrings of length `n`.
    #[staticmethod]
    fn from_generators(n: usize, generators: Vec<String>) -> PyResult<Self> {
        let gens = generators.iter().map(|g| Bitword::parse(g)).collect::<Result<Vec<_>, _>>().map_err(py_err)?;
        Ok(Self(codes::span_codewords(&gens, n).map_err(py_err)?))
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Self(codes::parse_code_file(text).map_err(py_err)?))
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn words(&self) -> Vec<String> {
        self.0.words().iter().map(|w| w.to_string()).collect()
    }

    fn is_valid(&self) -> bool {
        codes::validate_s(&self.0).passed()
    }

    fn weight_distribution(&self) -> BTreeMap<u32, u64> {
        codes::weight_distribution(&self.0).0
    }

    fn pair_weight_table(&self) -> PyResult<BTreeMap<(u32, u32, u32), u64>> {
        let t = codes::pair_weight_table(&self.0).map_err(py_err)?;
        Ok(t.entries().collect())
    }
}

/// Exact H-line distillation map of a code.
#[pyclass(name = "DistillationMap", module = "magicstate_py")]
struct PyMap(DistillationMap);

#[pymethods]
impl PyMap {
    #[new]
    fn new(code: &PyCode) -> PyResult<Self> {
        Ok(Self(distill::distillation_map(&code.0).map_err(py_err)?))
    }

    fn accept(&self) -> String {
        self.0.accept.to_factored_string()
    }

    fn x_out(&self) -> String {
        self.0.x_out().to_factored_string()
    }

    /// `(x_out, p_accept)` at H-line coordinate `x`.
    fn evaluate(&self, x: f64) -> PyResult<(f64, f64)> {
        let p = distill::evaluate_map(&self.0, x).map_err(py_err)?;
        Ok((p.x_out, p.p_accept))
    }

    fn iterate(&self, x0: f64, rounds: usize) -> PyResult<Vec<f64>> {
        Ok(distill::iterate_map(&self.0, x0, rounds).map_err(py_err)?.xs)
    }

    /// List of `(x_star, stability, derivative)`.
    fn fixed_points(&self) -> Vec<(f64, String, f64)> {
        analysis::fixed_points(&self.0).into_iter().map(|f| (f.x_star, f.stability.to_string(), f.derivative)).collect()
    }

    /// `(x_star, p_star)` of the threshold, or `None`.
    fn threshold(&self) -> Option<(f64, f64)> {
        analysis::threshold_p(&self.0).map(|r| (r.threshold.x_star, r.p_star))
    }

    /// Rows `(p, p_out, delta, accept)` over the given error rates.
    fn sweep(&self, ps: Vec<f64>) -> PyResult<Vec<(f64, f64, f64, f64)>> {
        let rows = distill::sweep(&self.0, &ps).map_err(py_err)?;
        Ok(rows.iter().map(|r| (r.p, r.p_out, r.delta, r.accept.unwrap_or(f64::NAN))).collect())
    }
}

/// Region report for a Bloch vector as a dict.
#[pyfunction]
fn classify(x: f64, y: f64, z: f64) -> PyResult<BTreeMap<String, PyObjectValue>> {
    let r = bloch::classify_region(&BlochVector::new(x, y, z)).map_err(py_err)?;
    let mut out = BTreeMap::new();
    out.insert("label".into(), PyObjectValue::Str(r.label.to_string()));
    out.insert("simulable".into(), PyObjectValue::Bool(r.simulable));
    out.insert("h_new".into(), PyObjectValue::Bool(r.h_new));
    out.insert("h_bk".into(), PyObjectValue::Bool(r.h_bk));
    out.insert("t".into(), PyObjectValue::Bool(r.t));
    out.insert("h_fidelity".into(), PyObjectValue::Float(r.h_fidelity));
    Ok(out)
}

#[derive(IntoPyObject)]
enum PyObjectValue {
    Str(String),
    Bool(bool),
    Float(f64),
}

#[pyfunction]
fn h_fidelity(x: f64, y: f64, z: f64) -> f64 {
    bloch::h_fidelity(&BlochVector::new(x, y, z))
}

#[pyfunction]
fn bk15_pout(p: f64) -> PyResult<f64> {
    knownmaps::bk15_pout(p).map_err(py_err)
}

#[pyfunction]
fn t5_map(p: f64) -> PyResult<f64> {
    knownmaps::t5_map(p).map_err(py_err)
}

#[pyfunction]
fn known_thresholds() -> BTreeMap<&'static str, f64> {
    let k = knownmaps::known_thresholds();
    BTreeMap::from([
        ("f_h_star", k.f_h_star),
        ("p_h_new", k.p_h_new),
        ("p_h_bk", k.p_h_bk),
        ("p_t", k.p_t),
        ("d_t_plane", k.d_t_plane),
        ("d_o_face", k.d_o_face),
    ])
}

/// Reduces a pure state given as `2^n` complex amplitudes. Returns the
/// script text, the replay probability and the final Bloch vector.
#[pyfunction]
fn reduce_state(amplitudes: Vec<Complex64>) -> PyResult<(String, f64, (f64, f64, f64))> {
    let len = amplitudes.len();
    if !len.is_power_of_two() {
        return Err(PyValueError::new_err(format!("{len} amplitudes is not a power of two")));
    }
    let n = len.trailing_zeros() as usize;
    let psi = DenseState::normalized(n, amplitudes).map_err(py_err)?;
    let (script, _) = stabreduce::reduce_state(&psi).map_err(py_err)?;
    let r = stabreduce::verify_script(&psi, &script).map_err(py_err)?;
    let b = r.final_bloch;
    Ok((script.to_text(), r.probability, (b.x, b.y, b.z)))
}

#[pymodule]
fn magicstate_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCode>()?;
    m.add_class::<PyMap>()?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(h_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(bk15_pout, m)?)?;
    m.add_function(wrap_pyfunction!(t5_map, m)?)?;
    m.add_function(wrap_pyfunction!(known_thresholds, m)?)?;
    m.add_function(wrap_pyfunction!(reduce_state, m)?)?;
    Ok(())
}
