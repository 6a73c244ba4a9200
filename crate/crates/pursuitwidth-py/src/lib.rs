//! Python bindings: graphs, width measures, the strategy multiplier,
//! graph families, parity games and the verification suites. Reports
//! cross the boundary as JSON and arrive as plain Python objects.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use pursuitwidth::arena::{budget_from_env, solve_search, width as width_of, Measure, SearchConfig, Winner};
use pursuitwidth::error::Error;
use pursuitwidth::families;
use pursuitwidth::multiply::{longest_trace, multiplier_from_solver, verify_multiplier};
use pursuitwidth::parity;
use pursuitwidth::suites::{run_suite, Suite, SuiteParams};

create_exception!(pursuitwidth, BudgetExceeded, PyException);
create_exception!(pursuitwidth, CheckFailed, PyException);

fn to_py(e: Error) -> PyErr {
    match e.exit_code() {
        3 => BudgetExceeded::new_err(e.to_string()),
        1 => CheckFailed::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn from_json<'py>(py: Python<'py>, value: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

#[pyclass(name = "Digraph", module = "pursuitwidth", frozen)]
struct PyDigraph {
    inner: pursuitwidth::Digraph,
}

#[pymethods]
impl PyDigraph {
    #[new]
    #[pyo3(signature = (n, edges=Vec::new()))]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(PyDigraph { inner: pursuitwidth::Digraph::from_edges(n, &edges).map_err(to_py)? })
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyDigraph { inner: pursuitwidth::Digraph::parse_edge_list(text).map_err(to_py)? })
    }

    #[staticmethod]
    fn cycle(n: usize) -> PyResult<Self> {
        Ok(PyDigraph { inner: pursuitwidth::Digraph::cycle(n).map_err(to_py)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges()
    }

    fn labels(&self) -> Option<Vec<String>> {
        self.inner.labels().map(<[String]>::to_vec)
    }

    fn is_strongly_connected(&self) -> bool {
        self.inner.is_strongly_connected()
    }

    fn symmetric_closure(&self) -> Self {
        PyDigraph { inner: self.inner.symmetric_closure() }
    }

    fn to_edge_list(&self) -> String {
        self.inner.emit_edge_list()
    }

    fn to_dot(&self) -> String {
        self.inner.emit_dot()
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }

    fn __repr__(&self) -> String {
        format!("Digraph(n={}, edges={})", self.inner.n(), self.inner.edge_count())
    }
}

fn measure(name: &str) -> PyResult<Measure> {
    name.parse().map_err(PyValueError::new_err)
}

/// Least number of cops for the measure ("dw", "dw_r", "tw", "tw_r", "dpw").
#[pyfunction]
#[pyo3(signature = (g, measure_name="dw", r=1, budget=None))]
fn width(py: Python<'_>, g: &PyDigraph, measure_name: &str, r: usize, budget: Option<usize>) -> PyResult<usize> {
    let m = measure(measure_name)?;
    let budget = budget.unwrap_or_else(budget_from_env);
    py.detach(|| width_of(&g.inner, m, r, budget)).map_err(to_py)
}

/// Whether `k` cops catch `r` visible robbers monotonously.
#[pyfunction]
#[pyo3(signature = (g, k, r=1, budget=None))]
fn cops_win(py: Python<'_>, g: &PyDigraph, k: usize, r: usize, budget: Option<usize>) -> PyResult<bool> {
    let cfg = SearchConfig::visible(k, r).with_budget(budget.unwrap_or_else(budget_from_env));
    let res = py.detach(|| solve_search(&g.inner, &cfg)).map_err(to_py)?;
    Ok(res.winner == Winner::Cops)
}

/// Builds the multiplied strategy for `r` robbers from an optimal
/// single-robber strategy and checks it against every prudent isolating
/// robber; with `trace=True` also returns the longest play.
#[pyfunction]
#[pyo3(signature = (g, r, trace=false, budget=None))]
fn multiply<'py>(py: Python<'py>, g: &PyDigraph, r: usize, trace: bool, budget: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
    let budget = budget.unwrap_or_else(budget_from_env);
    let out = py
        .detach(|| -> pursuitwidth::Result<serde_json::Value> {
            let k = width_of(&g.inner, Measure::Dw, 1, budget)?;
            let m = multiplier_from_solver(&g.inner, k, r, budget)?
                .ok_or_else(|| Error::invariant("width", "no strategy at the computed width"))?;
            let v = verify_multiplier(&g.inner, &m, budget)?;
            let mut out = serde_json::json!({
                "k": k,
                "r": r,
                "bound": m.cop_bound(),
                "passed": v.passed,
                "max_cops": v.max_cops,
                "states": v.states,
                "failure": v.failure,
            });
            if trace && v.passed {
                out["trace"] = serde_json::to_value(longest_trace(&g.inner, &m, budget)?).expect("serializable");
            }
            Ok(out)
        })
        .map_err(to_py)?;
    from_json(py, &out)
}

#[pyfunction]
fn full_tree(branching: usize, height: usize) -> PyResult<PyDigraph> {
    Ok(PyDigraph { inner: families::full_tree(branching, height).map_err(to_py)?.0 })
}

#[pyfunction]
fn two_trees(n: usize) -> PyResult<PyDigraph> {
    Ok(PyDigraph { inner: families::gen_two_trees(n).map_err(to_py)?.0 })
}

#[pyfunction]
fn blown_up_tree(r: usize, k: usize) -> PyResult<PyDigraph> {
    Ok(PyDigraph { inner: families::gen_grk(r, k).map_err(to_py)? })
}

#[pyfunction]
fn lex_product(a: &PyDigraph, b: &PyDigraph) -> PyResult<PyDigraph> {
    Ok(PyDigraph { inner: families::lex_product(&a.inner, &b.inner).map_err(to_py)? })
}

#[pyclass(name = "ParityGame", module = "pursuitwidth", frozen)]
struct PyParityGame {
    game: parity::ParityGame,
    obs: parity::ObservationEquiv,
}

#[pymethods]
impl PyParityGame {
    /// Parses a game file and an optional observation file (identity if absent).
    #[staticmethod]
    #[pyo3(signature = (game, observation=None))]
    fn parse(game: &str, observation: Option<&str>) -> PyResult<Self> {
        let game = parity::ParityGame::parse(game).map_err(to_py)?;
        let obs = match observation {
            Some(t) => parity::ObservationEquiv::parse(game.n(), t).map_err(to_py)?,
            None => parity::ObservationEquiv::identity(game.n()),
        };
        Ok(PyParityGame { game, obs })
    }

    #[getter]
    fn n(&self) -> usize {
        self.game.n()
    }

    fn problems(&self) -> Vec<String> {
        parity::validate(&self.game, &self.obs)
    }

    /// Winner per position with full information.
    fn solve(&self) -> PyResult<Vec<u8>> {
        Ok(parity::zielonka_solve(&self.game).map_err(to_py)?.0.winner)
    }

    /// Winner from the initial position when player 0 only sees classes,
    /// with the verified knowledge strategy when player 0 wins.
    fn solve_imperfect<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let res = parity::solve_imperfect(&self.game, &self.obs).map_err(to_py)?;
        from_json(py, &res)
    }

    /// The knowledge game as a game file.
    fn knowledge_game(&self) -> PyResult<String> {
        Ok(parity::powerset_construct(&self.game, &self.obs).map_err(to_py)?.game.emit())
    }

    fn to_text(&self) -> String {
        self.game.emit()
    }
}

/// Runs a verification suite by name and returns its report.
#[pyfunction]
#[pyo3(signature = (name, nmax=4, random=200, seed=None, r=Vec::new(), n=2, games=200, budget=None))]
#[allow(clippy::too_many_arguments)]
fn verify<'py>(
    py: Python<'py>,
    name: &str,
    nmax: usize,
    random: usize,
    seed: Option<u64>,
    r: Vec<usize>,
    n: usize,
    games: usize,
    budget: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let suite: Suite = name.parse().map_err(PyValueError::new_err)?;
    let defaults = SuiteParams::default();
    let params = SuiteParams {
        nmax,
        random,
        seed: seed.unwrap_or(defaults.seed),
        r,
        n,
        budget: budget.unwrap_or(defaults.budget),
        parity_games: games,
        ..defaults
    };
    let report = py.detach(|| run_suite(suite, &params)).map_err(to_py)?;
    from_json(py, &report)
}

/// Module initialiser; public so tests can register it in an embedded interpreter.
#[pymodule]
#[pyo3(name = "pursuitwidth")]
pub fn pursuitwidth_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDigraph>()?;
    m.add_class::<PyParityGame>()?;
    m.add_function(wrap_pyfunction!(width, m)?)?;
    m.add_function(wrap_pyfunction!(cops_win, m)?)?;
    m.add_function(wrap_pyfunction!(multiply, m)?)?;
    m.add_function(wrap_pyfunction!(full_tree, m)?)?;
    m.add_function(wrap_pyfunction!(two_trees, m)?)?;
    m.add_function(wrap_pyfunction!(blown_up_tree, m)?)?;
    m.add_function(wrap_pyfunction!(lex_product, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add("BudgetExceeded", m.py().get_type::<BudgetExceeded>())?;
    m.add("CheckFailed", m.py().get_type::<CheckFailed>())?;
    Ok(())
}
