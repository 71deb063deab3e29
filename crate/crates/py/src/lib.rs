//! Python bindings for `wreath-lis`.

use num_rational::BigRational;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use wreath_lis::exact::{self, EnumerationCaps, WreathStatistic};
use wreath_lis::montecarlo::{self, SummaryStats, TrialPlan, DEFAULT_U_GRID};
use wreath_lis::partitions::{self, SamplerConfig, DEFAULT_BURN_IN};
use wreath_lis::{decompose, BlockDecomposition, DistributionTable, Error, RandomSource};

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::InvariantViolation(_) | Error::IdentityViolation { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn fraction<'py>(py: Python<'py>, q: &BigRational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((format!("{}/{}", q.numer(), q.denom()),))
}

fn parse_statistic(name: &str) -> PyResult<WreathStatistic> {
    match name {
        "L" | "l" => Ok(WreathStatistic::L),
        "W" | "w" => Ok(WreathStatistic::W),
        "N" | "n" => Ok(WreathStatistic::N),
        other => Err(PyValueError::new_err(format!(
            "unknown statistic {other:?}; expected L, W or N"
        ))),
    }
}

fn caps(cap: u128) -> EnumerationCaps {
    EnumerationCaps {
        group_order: cap,
        ..EnumerationCaps::default()
    }
}

#[pyclass(module = "wreath_lis", eq, frozen, from_py_object)]
#[derive(Clone, PartialEq)]
struct Permutation(wreath_lis::Permutation);

#[pymethods]
impl Permutation {
    #[new]
    fn new(images: Vec<u32>) -> PyResult<Self> {
        wreath_lis::Permutation::new(images).map(Self).map_err(to_py_err)
    }

    #[staticmethod]
    fn identity(degree: usize) -> Self {
        Self(wreath_lis::Permutation::identity(degree))
    }

    #[staticmethod]
    fn from_cycles(degree: usize, cycles: Vec<Vec<u32>>) -> PyResult<Self> {
        let refs: Vec<&[u32]> = cycles.iter().map(Vec::as_slice).collect();
        wreath_lis::Permutation::from_cycles(degree, &refs)
            .map(Self)
            .map_err(to_py_err)
    }

    #[staticmethod]
    #[pyo3(signature = (degree, seed, stream=0))]
    fn sample(degree: usize, seed: u64, stream: u64) -> Self {
        let mut rng = RandomSource::new(seed, stream);
        Self(wreath_lis::Permutation::sample_uniform(degree, &mut rng))
    }

    #[getter]
    fn degree(&self) -> usize {
        self.0.degree()
    }

    #[getter]
    fn images(&self) -> Vec<u32> {
        self.0.images().to_vec()
    }

    fn compose(&self, other: &Permutation) -> PyResult<Self> {
        self.0.compose(&other.0).map(Self).map_err(to_py_err)
    }

    fn inverse(&self) -> Self {
        Self(self.0.inverse())
    }

    fn cycles(&self) -> Vec<Vec<u32>> {
        self.0.cycles()
    }

    fn lis(&self) -> usize {
        wreath_lis::lis_len(self.0.images())
    }

    fn __len__(&self) -> usize {
        self.0.degree()
    }

    fn __repr__(&self) -> String {
        format!("Permutation({:?})", self.0.images())
    }
}

#[pyclass(module = "wreath_lis", eq, frozen, from_py_object)]
#[derive(Clone, PartialEq)]
struct WreathElement(wreath_lis::WreathElement);

#[pymethods]
impl WreathElement {
    #[new]
    fn new(k: usize, inner: Vec<Permutation>, outer: Permutation) -> PyResult<Self> {
        let inner = inner.into_iter().map(|p| p.0).collect();
        wreath_lis::WreathElement::new(k, inner, outer.0)
            .map(Self)
            .map_err(to_py_err)
    }

    #[staticmethod]
    fn identity(n: usize, k: usize) -> PyResult<Self> {
        wreath_lis::WreathElement::identity(n, k)
            .map(Self)
            .map_err(to_py_err)
    }

    /// Uniform element drawn from stream `stream` of `seed`.
    #[staticmethod]
    #[pyo3(signature = (n, k, seed, stream=0))]
    fn sample(n: usize, k: usize, seed: u64, stream: u64) -> PyResult<Self> {
        let mut rng = RandomSource::new(seed, stream);
        wreath_lis::WreathElement::sample(n, k, &mut rng)
            .map(Self)
            .map_err(to_py_err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.0.k()
    }

    #[getter]
    fn inner(&self) -> Vec<Permutation> {
        self.0.inner().iter().cloned().map(Permutation).collect()
    }

    #[getter]
    fn outer(&self) -> Permutation {
        Permutation(self.0.outer().clone())
    }

    fn word(&self) -> Vec<u32> {
        self.0.to_word()
    }

    fn block_word(&self) -> Vec<u32> {
        self.0.block_word().into_images()
    }

    fn lis(&self) -> usize {
        wreath_lis::lis_len(&self.0.to_word())
    }

    fn decompose<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        decomposition_dict(py, &decompose(&self.0))
    }

    fn __repr__(&self) -> String {
        format!(
            "WreathElement(k={}, inner={:?}, outer={:?})",
            self.0.k(),
            self.0.inner().iter().map(|g| g.images()).collect::<Vec<_>>(),
            self.0.outer().images()
        )
    }
}

fn decomposition_dict<'py>(py: Python<'py>, d: &BlockDecomposition) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    out.set_item("block_word", d.block_word.images())?;
    out.set_item("N", d.block_lis)?;
    out.set_item("chosen_blocks", &d.chosen_blocks)?;
    out.set_item("per_block_lis", &d.per_block_lis)?;
    out.set_item("W", d.w)?;
    Ok(out)
}

fn table_dict<'py>(py: Python<'py>, t: &DistributionTable) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    out.set_item("support", &t.support)?;
    out.set_item("counts", &t.counts)?;
    out.set_item("total", t.total)?;
    out.set_item("mean", fraction(py, &t.exact_mean)?)?;
    out.set_item("var", fraction(py, &t.exact_variance)?)?;
    Ok(out)
}

fn summary_dict<'py>(py: Python<'py>, s: &SummaryStats) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    out.set_item("count", s.count)?;
    out.set_item("mean", s.mean)?;
    out.set_item("variance", s.variance)?;
    out.set_item("std_error", s.std_error)?;
    out.set_item("lower_median", s.lower_median)?;
    out.set_item("quantiles", &s.quantiles)?;
    Ok(out)
}

/// LIS length of a sequence of distinct integers.
#[pyfunction]
fn lis_length(word: Vec<i64>) -> PyResult<usize> {
    wreath_lis::lis_fast(&word)
        .map(|w| w.length)
        .map_err(to_py_err)
}

/// Length and 1-based positions of the canonical LIS witness.
#[pyfunction]
fn lis_witness(word: Vec<i64>) -> PyResult<(usize, Vec<usize>)> {
    wreath_lis::lis_fast(&word)
        .map(|w| (w.length, w.positions))
        .map_err(to_py_err)
}

/// Quadratic reference implementation of `lis_length`.
#[pyfunction]
fn lis_oracle(word: Vec<i64>) -> PyResult<usize> {
    wreath_lis::lis_oracle(&word).map_err(to_py_err)
}

#[pyfunction]
#[pyo3(signature = (n, k, statistic="L", cap=1_000_000))]
fn exact_wreath<'py>(
    py: Python<'py>,
    n: usize,
    k: usize,
    statistic: &str,
    cap: u128,
) -> PyResult<Bound<'py, PyDict>> {
    let stat = parse_statistic(statistic)?;
    let table = py
        .detach(|| exact::enumerate_wreath(n, k, stat, &caps(cap)))
        .map_err(to_py_err)?;
    table_dict(py, &table)
}

#[pyfunction]
#[pyo3(signature = (n, cap=1_000_000))]
fn exact_signed<'py>(py: Python<'py>, n: usize, cap: u128) -> PyResult<Bound<'py, PyDict>> {
    let table = exact::enumerate_signed(n, &caps(cap)).map_err(to_py_err)?;
    table_dict(py, &table)
}

#[pyfunction]
fn exact_sym<'py>(py: Python<'py>, m: usize) -> PyResult<Bound<'py, PyDict>> {
    let table = exact::enumerate_sym_lis(m, &EnumerationCaps::default()).map_err(to_py_err)?;
    table_dict(py, &table)
}

/// Both sides of the exact mean and variance identities for `W`.
#[pyfunction]
#[pyo3(signature = (n, k, cap=1_000_000))]
fn moment_identities<'py>(py: Python<'py>, n: usize, k: usize, cap: u128) -> PyResult<Bound<'py, PyDict>> {
    let r = py
        .detach(|| exact::verify_moment_identities(n, k, &caps(cap)))
        .map_err(to_py_err)?;
    let out = PyDict::new(py);
    out.set_item("n", r.n)?;
    out.set_item("k", r.k)?;
    out.set_item("mean_w", fraction(py, &r.mean_w)?)?;
    out.set_item("mean_rhs", fraction(py, &r.mean_rhs)?)?;
    out.set_item("var_w", fraction(py, &r.var_w)?)?;
    out.set_item("var_rhs", fraction(py, &r.var_rhs)?)?;
    Ok(out)
}

/// Per-trial `L`, `W`, `N` columns for `trials` uniform draws.
#[pyfunction]
fn run_trials<'py>(py: Python<'py>, n: usize, k: usize, trials: u64, seed: u64) -> PyResult<Bound<'py, PyDict>> {
    let run = py
        .detach(|| montecarlo::run_trials(&TrialPlan::new(n, k, trials, seed)))
        .map_err(to_py_err)?;
    let out = PyDict::new(py);
    out.set_item("L", run.records.iter().map(|r| r.l).collect::<Vec<_>>())?;
    out.set_item("W", run.records.iter().map(|r| r.w).collect::<Vec<_>>())?;
    out.set_item("N", run.records.iter().map(|r| r.block_lis).collect::<Vec<_>>())?;
    Ok(out)
}

/// Summary rows of `L / (4 sqrt(nk))` over `(n, k)` cells.
#[pyfunction]
fn scan<'py>(
    py: Python<'py>,
    cells: Vec<(usize, usize)>,
    trials: u64,
    seed: u64,
) -> PyResult<Bound<'py, PyList>> {
    let rows = py
        .detach(|| montecarlo::theorem1_scan(&cells, trials, seed))
        .map_err(to_py_err)?;
    let out = PyList::empty(py);
    for r in &rows {
        let d = PyDict::new(py);
        d.set_item("n", r.n)?;
        d.set_item("k", r.k)?;
        d.set_item("trials", r.trials)?;
        d.set_item("cell_seed", r.cell_seed)?;
        d.set_item("L", summary_dict(py, &r.l)?)?;
        d.set_item("W", summary_dict(py, &r.w)?)?;
        d.set_item("ratio", summary_dict(py, &r.ratio)?)?;
        out.append(d)?;
    }
    Ok(out)
}

/// Summary rows of `L / sqrt(n)` and `W / sqrt(n)` with block size two.
#[pyfunction]
fn conjecture_scan<'py>(
    py: Python<'py>,
    n_grid: Vec<usize>,
    trials: u64,
    seed: u64,
) -> PyResult<Bound<'py, PyList>> {
    let rows = py
        .detach(|| montecarlo::conjecture_scan(&n_grid, trials, seed))
        .map_err(to_py_err)?;
    let out = PyList::empty(py);
    for r in &rows {
        let d = PyDict::new(py);
        d.set_item("n", r.n)?;
        d.set_item("trials", r.trials)?;
        d.set_item("cell_seed", r.cell_seed)?;
        d.set_item("L_over_sqrt_n", summary_dict(py, &r.l_scaled)?)?;
        d.set_item("W_over_sqrt_n", summary_dict(py, &r.w_scaled)?)?;
        out.append(d)?;
    }
    Ok(out)
}

#[pyfunction]
#[pyo3(signature = (k, trials, seed, u_grid=None))]
fn tail_check<'py>(
    py: Python<'py>,
    k: usize,
    trials: u64,
    seed: u64,
    u_grid: Option<Vec<f64>>,
) -> PyResult<Bound<'py, PyDict>> {
    let grid = u_grid.unwrap_or_else(|| DEFAULT_U_GRID.to_vec());
    let r = py
        .detach(|| montecarlo::tail_check(k, trials, &grid, seed))
        .map_err(to_py_err)?;
    let out = PyDict::new(py);
    out.set_item("k", r.k)?;
    out.set_item("trials", r.trials)?;
    out.set_item("f", r.f)?;
    out.set_item("g", r.g)?;
    out.set_item("h", r.h)?;
    out.set_item("h_exact", r.h_exact)?;
    out.set_item("h_std_error", r.h_std_error)?;
    out.set_item("lower_median", r.lower_median)?;
    out.set_item("chebyshev_tail", r.chebyshev_tail)?;
    out.set_item("chebyshev_se", r.chebyshev_se)?;
    out.set_item("u_grid", &r.u_grid)?;
    out.set_item("empirical_tail", &r.empirical_tail)?;
    out.set_item("bound", &r.bound)?;
    out.set_item("binomial_se", &r.binomial_se)?;
    out.set_item("mc_error", &r.mc_error)?;
    Ok(out)
}

/// Visit counts of cycle types along the commuting-graph walk on `S_n`,
/// keyed by descending parts.
#[pyfunction]
#[pyo3(signature = (n, steps, seed, burn_in=DEFAULT_BURN_IN, check=false))]
fn sample_partitions<'py>(
    py: Python<'py>,
    n: usize,
    steps: u64,
    seed: u64,
    burn_in: u64,
    check: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let config = SamplerConfig {
        n,
        steps: burn_in + steps,
        burn_in,
        check,
    };
    let run = py
        .detach(|| {
            let mut rng = RandomSource::new(seed, 0);
            partitions::run_partition_sampler(&config, &mut rng)
        })
        .map_err(to_py_err)?;
    let out = PyDict::new(py);
    for (class, count, _) in run.rows() {
        out.set_item(pyo3::types::PyTuple::new(py, class.parts())?, count)?;
    }
    Ok(out)
}

#[pymodule]
#[pyo3(name = "wreath_lis")]
pub fn wreath_lis_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Permutation>()?;
    m.add_class::<WreathElement>()?;
    m.add_function(wrap_pyfunction!(lis_length, m)?)?;
    m.add_function(wrap_pyfunction!(lis_witness, m)?)?;
    m.add_function(wrap_pyfunction!(lis_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(exact_wreath, m)?)?;
    m.add_function(wrap_pyfunction!(exact_signed, m)?)?;
    m.add_function(wrap_pyfunction!(exact_sym, m)?)?;
    m.add_function(wrap_pyfunction!(moment_identities, m)?)?;
    m.add_function(wrap_pyfunction!(run_trials, m)?)?;
    m.add_function(wrap_pyfunction!(scan, m)?)?;
    m.add_function(wrap_pyfunction!(conjecture_scan, m)?)?;
    m.add_function(wrap_pyfunction!(tail_check, m)?)?;
    m.add_function(wrap_pyfunction!(sample_partitions, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with_module<F: FnOnce(Python<'_>, &Bound<'_, PyModule>)>(f: F) {
        Python::attach(|py| {
            let m = PyModule::new(py, "wreath_lis").unwrap();
            wreath_lis_py(&m).unwrap();
            f(py, &m);
        });
    }

    #[test]
    fn demo_element_from_python() {
        with_module(|py, m| {
            let locals = PyDict::new(py);
            locals.set_item("wl", m).unwrap();
            py.run(
                c"
swap = wl.Permutation([2, 1])
e = wl.WreathElement(2, [swap, wl.Permutation.identity(2), swap], wl.Permutation.from_cycles(3, [[3, 1, 2]]))
assert e.word() == [6, 5, 2, 1, 3, 4]
assert e.lis() == 3
d = e.decompose()
assert (d['W'], d['N'], d['per_block_lis']) == (3, 2, [1, 2, 1])
",
                None,
                Some(&locals),
            )
            .unwrap();
        });
    }

    #[test]
    fn exact_tables_use_fractions() {
        with_module(|py, m| {
            let locals = PyDict::new(py);
            locals.set_item("wl", m).unwrap();
            py.run(
                c"
from fractions import Fraction
t = wl.exact_wreath(2, 2)
assert t['counts'] == [1, 4, 2, 1] and t['mean'] == Fraction(19, 8)
assert wl.exact_signed(2)['counts'] == [1, 5, 1, 1]
r = wl.moment_identities(2, 3)
assert r['mean_w'] == r['mean_rhs'] == 3
",
                None,
                Some(&locals),
            )
            .unwrap();
        });
    }

    #[test]
    fn errors_map_to_python_exceptions() {
        with_module(|py, m| {
            let err = m
                .getattr("exact_wreath")
                .unwrap()
                .call1((4, 4))
                .unwrap_err();
            assert!(err.is_instance_of::<PyValueError>(py));
            let err = m.getattr("lis_length").unwrap().call1((vec![1, 1],)).unwrap_err();
            assert!(err.is_instance_of::<PyValueError>(py));
        });
    }
}
