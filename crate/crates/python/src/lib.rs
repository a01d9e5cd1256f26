use indexmap::IndexMap;
use inspectra_core::colgen::{refine_with, ColgenOptions};
use inspectra_core::covers::{CoverMode, CoverSummary};
use inspectra_core::decomp::{decompose as decompose_target, MarginalTarget};
use inspectra_core::exact::solve_exact_ne;
use inspectra_core::game::{self, GameParams};
use inspectra_core::generate::{generate as generate_model, GenConfig};
use inspectra_core::model::{DetectionModel as CoreModel, Instance};
use inspectra_core::planner::{plan_approx, plan_certificates, plan_exact};
use inspectra_core::report;
use inspectra_core::strategies::{self, MixedStrategy, Side, StrategyEntry, StrategyFile};
use inspectra_core::target::Alpha;
use inspectra_core::Error;
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde_json::{json, Value};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(io) => PyOSError::new_err(io.to_string()),
        e if e.is_validation() => PyValueError::new_err(e.to_string()),
        e => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Hands a JSON payload to Python as plain dicts and lists.
fn to_object(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    let loads = py.import("json")?.getattr("loads")?;
    Ok(loads.call1((v.to_string(),))?.unbind())
}

fn parse_side(side: &str) -> PyResult<Side> {
    match side {
        "defender" => Ok(Side::Defender),
        "attacker" => Ok(Side::Attacker),
        _ => Err(PyValueError::new_err(format!(
            "side must be `defender` or `attacker`, got `{side}`"
        ))),
    }
}

fn alpha(value: f64) -> PyResult<Alpha> {
    Alpha::new(value).map_err(to_py)
}

/// Detection model: nodes that can host a detector, components that can be
/// attacked, and which components each node monitors.
#[pyclass(module = "inspectra", frozen)]
struct DetectionModel {
    inner: CoreModel,
}

#[pymethods]
impl DetectionModel {
    #[new]
    fn new(nodes: Vec<String>, components: Vec<String>, monitoring: IndexMap<String, Vec<String>>) -> PyResult<Self> {
        let instance = Instance {
            nodes,
            components,
            monitoring,
        };
        Ok(DetectionModel {
            inner: CoreModel::from_instance(&instance).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let instance = Instance::from_json(text).map_err(to_py)?;
        Ok(DetectionModel {
            inner: CoreModel::from_instance(&instance).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn read(path: &str) -> PyResult<Self> {
        Ok(DetectionModel {
            inner: CoreModel::read(path).map_err(to_py)?,
        })
    }

    /// Index-based monitoring sets; ids become `v1..` and `e1..`.
    #[staticmethod]
    fn from_sets(component_count: usize, sets: Vec<Vec<usize>>) -> PyResult<Self> {
        Ok(DetectionModel {
            inner: CoreModel::from_sets(component_count, &sets).map_err(to_py)?,
        })
    }

    #[getter]
    fn nodes(&self) -> Vec<String> {
        self.inner.nodes().to_vec()
    }

    #[getter]
    fn components(&self) -> Vec<String> {
        self.inner.components().to_vec()
    }

    fn to_json(&self) -> String {
        self.inner.to_instance().to_json()
    }

    /// Components of `attack` monitored by a detector in `positioning`.
    fn detect(&self, positioning: Vec<String>, attack: Vec<String>) -> PyResult<usize> {
        let s = self.inner.node_set(&positioning).map_err(to_py)?;
        let t = self.inner.component_set(&attack).map_err(to_py)?;
        self.inner.detect(&s, &t).map_err(to_py)
    }

    fn monitored(&self, positioning: Vec<String>) -> PyResult<Vec<String>> {
        let s = self.inner.node_set(&positioning).map_err(to_py)?;
        let t = self.inner.monitored_set(&s).map_err(to_py)?;
        Ok(self.inner.component_ids(&t))
    }

    fn is_cover(&self, positioning: Vec<String>) -> PyResult<bool> {
        Ok(self.inner.is_cover(&self.inner.node_set(&positioning).map_err(to_py)?))
    }

    fn is_packing(&self, attack: Vec<String>) -> PyResult<bool> {
        Ok(self.inner.is_packing(&self.inner.component_set(&attack).map_err(to_py)?))
    }

    fn __len__(&self) -> usize {
        self.inner.node_count()
    }

    fn __repr__(&self) -> String {
        format!(
            "DetectionModel(nodes={}, components={})",
            self.inner.node_count(),
            self.inner.component_count()
        )
    }
}

/// Mixed strategy over detector positionings or attack plans, keyed by id.
#[pyclass(module = "inspectra", frozen)]
struct Strategy {
    file: StrategyFile,
}

impl Strategy {
    fn resolve(&self, model: &CoreModel) -> PyResult<MixedStrategy> {
        MixedStrategy::from_file(model, &self.file).map_err(to_py)
    }
}

#[pymethods]
impl Strategy {
    #[new]
    fn new(side: &str, budget: usize, support: Vec<(Vec<String>, f64)>) -> PyResult<Self> {
        let side = parse_side(side)?;
        Ok(Strategy {
            file: StrategyFile {
                side,
                budget,
                support: support
                    .into_iter()
                    .map(|(action, prob)| StrategyEntry { action, prob })
                    .collect(),
            },
        })
    }

    /// Accepts the `{"side", "budget", "support"}` layout of strategy files.
    #[staticmethod]
    fn from_dict(py: Python<'_>, d: &Bound<'_, PyAny>) -> PyResult<Self> {
        let text: String = py.import("json")?.call_method1("dumps", (d,))?.extract()?;
        let file: StrategyFile = serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Strategy { file })
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_object(py, &report::to_value(&self.file))
    }

    #[getter]
    fn side(&self) -> &'static str {
        self.file.side.name()
    }

    #[getter]
    fn budget(&self) -> usize {
        self.file.budget
    }

    #[getter]
    fn support(&self) -> Vec<(Vec<String>, f64)> {
        self.file.support.iter().map(|e| (e.action.clone(), e.prob)).collect()
    }

    /// Probability that each id appears in the chosen action, in order of first appearance.
    fn marginals(&self) -> Vec<(String, f64)> {
        let mut out: Vec<(String, f64)> = Vec::new();
        for entry in &self.file.support {
            for id in &entry.action {
                match out.iter_mut().find(|(k, _)| k == id) {
                    Some((_, p)) => *p += entry.prob,
                    None => out.push((id.clone(), entry.prob)),
                }
            }
        }
        out
    }

    fn __len__(&self) -> usize {
        self.file.support.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Strategy(side={}, budget={}, support={})",
            self.file.side.name(),
            self.file.budget,
            self.file.support.len()
        )
    }
}

fn cover_mode(greedy: bool) -> CoverMode {
    if greedy {
        CoverMode::Greedy
    } else {
        CoverMode::Exact
    }
}

/// Minimum set cover and maximum set packing.
#[pyfunction]
#[pyo3(signature = (model, greedy = false))]
fn covers(py: Python<'_>, model: &DetectionModel, greedy: bool) -> PyResult<Py<PyAny>> {
    let c = CoverSummary::compute(&model.inner, cover_mode(greedy)).map_err(to_py)?;
    to_object(py, &report::covers_json(&model.inner, &c))
}

/// Uniform mixture over the wrap-around windows of length `budget` in `base`.
#[pyfunction]
fn cyclic_strategy(side: &str, base: Vec<String>, budget: usize) -> PyResult<Strategy> {
    let side = parse_side(side)?;
    let idx: Vec<usize> = (0..base.len()).collect();
    let s = strategies::cyclic_strategy(side, &idx, budget).map_err(to_py)?;
    Ok(Strategy {
        file: StrategyFile {
            side,
            budget,
            support: s
                .to_f64()
                .iter()
                .map(|(a, &prob)| StrategyEntry {
                    action: a.iter().map(|i| base[i].clone()).collect(),
                    prob,
                })
                .collect(),
        },
    })
}

/// Certificates of the cover-based plan from the cover and packing sizes alone.
#[pyfunction]
fn plan_bounds(py: Python<'_>, n_star: usize, m_star: usize, alpha_value: f64, b2: usize) -> PyResult<Py<PyAny>> {
    let c = plan_certificates(n_star, m_star, alpha(alpha_value)?, b2).map_err(to_py)?;
    let v = json!({
        "b1": c.b1,
        "b1_lower": c.b1_lower,
        "gap": c.gap,
        "epsilon": report::ratio_string(c.epsilon),
        "relative_loss_bound": report::ratio_string(c.relative_loss_bound),
        "guaranteed_rate": report::ratio_string(c.guaranteed_rate),
    });
    to_object(py, &v)
}

/// Detector count and strategies meeting target rate `alpha` against `b2` attacks.
#[pyfunction]
#[pyo3(signature = (model, alpha, b2, exact = false, greedy_covers = false, tol = 1e-9, max_iters = None))]
#[allow(clippy::too_many_arguments)]
fn plan(
    py: Python<'_>,
    model: &DetectionModel,
    alpha: f64,
    b2: usize,
    exact: bool,
    greedy_covers: bool,
    tol: f64,
    max_iters: Option<usize>,
) -> PyResult<Py<PyAny>> {
    if exact && greedy_covers {
        return Err(PyValueError::new_err("exact planning needs exact covers"));
    }
    let a = self::alpha(alpha)?;
    let r = py
        .detach(|| {
            if exact {
                plan_exact(&model.inner, a, b2, tol, ColgenOptions { max_iters })
            } else {
                plan_approx(&model.inner, a, b2, cover_mode(greedy_covers))
            }
        })
        .map_err(to_py)?;
    to_object(py, &report::plan_json(&model.inner, &r))
}

/// Smallest detector count whose equilibrium rate reaches `alpha`.
#[pyfunction]
#[pyo3(signature = (model, alpha, b2, tol = 1e-9, max_iters = None))]
fn refine(
    py: Python<'_>,
    model: &DetectionModel,
    alpha: f64,
    b2: usize,
    tol: f64,
    max_iters: Option<usize>,
) -> PyResult<Py<PyAny>> {
    let a = self::alpha(alpha)?;
    let o = py
        .detach(|| {
            let c = CoverSummary::compute(&model.inner, CoverMode::Exact)?;
            refine_with(&model.inner, a, b2, tol, ColgenOptions { max_iters }, c)
        })
        .map_err(to_py)?;
    to_object(py, &report::refine_json(&model.inner, &o))
}

/// Equilibrium of the game with budgets `b1`, `b2` by full enumeration.
#[pyfunction]
fn solve_exact(py: Python<'_>, model: &DetectionModel, b1: usize, b2: usize) -> PyResult<Py<PyAny>> {
    let ne = py
        .detach(|| solve_exact_ne(&model.inner, GameParams::new(b1, b2)))
        .map_err(to_py)?;
    to_object(py, &report::exact_json(&model.inner, &ne).map_err(to_py)?)
}

/// Payoffs, detection rate, ε and equilibrium bounds of a profile.
#[pyfunction]
fn evaluate(py: Python<'_>, model: &DetectionModel, sigma1: &Strategy, sigma2: &Strategy) -> PyResult<Py<PyAny>> {
    let s1 = sigma1.resolve(&model.inner)?;
    let s2 = sigma2.resolve(&model.inner)?;
    let c = CoverSummary::compute(&model.inner, CoverMode::Exact).map_err(to_py)?;
    let r = game::evaluate_profile(&model.inner, &s1, &s2, c.n_star, c.m_star).map_err(to_py)?;
    to_object(py, &report::eval_json(&r, &c))
}

#[pyfunction]
fn expected_payoffs(model: &DetectionModel, sigma1: &Strategy, sigma2: &Strategy) -> PyResult<(f64, f64)> {
    game::expected_payoffs(&model.inner, &sigma1.resolve(&model.inner)?, &sigma2.resolve(&model.inner)?)
        .map_err(to_py)
}

#[pyfunction]
fn detection_rate(model: &DetectionModel, sigma1: &Strategy, sigma2: &Strategy) -> PyResult<f64> {
    game::detection_rate(&model.inner, &sigma1.resolve(&model.inner)?, &sigma2.resolve(&model.inner)?)
        .map_err(to_py)
}

/// Attack plan of size `b2` with the most undetected components, and that count.
#[pyfunction]
fn best_response_attacker(model: &DetectionModel, sigma1: &Strategy, b2: usize) -> PyResult<(Vec<String>, f64)> {
    let (t, v) = game::best_response_attacker(&model.inner, &sigma1.resolve(&model.inner)?, b2).map_err(to_py)?;
    Ok((model.inner.component_ids(&t), v))
}

/// Positioning of `b1` detectors with the most expected detections, and that value.
#[pyfunction]
fn best_response_defender(model: &DetectionModel, sigma2: &Strategy, b1: usize) -> PyResult<(Vec<String>, f64)> {
    let (s, v) = game::best_response_defender(&model.inner, &sigma2.resolve(&model.inner)?, b1).map_err(to_py)?;
    Ok((model.inner.node_ids(&s), v))
}

/// Attack strategy over plans of exactly `b2` components whose marginals are
/// `marginals` (ids `e1..`). The marginals must sum to `b2`.
#[pyfunction]
fn decompose(marginals: Vec<f64>, b2: usize) -> PyResult<Strategy> {
    let target = MarginalTarget::new(marginals, b2).map_err(to_py)?;
    let s = decompose_target(&target).map_err(to_py)?;
    Ok(Strategy {
        file: StrategyFile {
            side: s.side(),
            budget: s.budget(),
            support: s
                .iter()
                .map(|(t, &prob)| StrategyEntry {
                    action: t.iter().map(|e| format!("e{}", e + 1)).collect(),
                    prob,
                })
                .collect(),
        },
    })
}

/// Seeded synthetic model; `family` is `random-bipartite`, `interval` or
/// `grid-hide-and-seek`.
#[pyfunction]
#[pyo3(signature = (family, nodes, components, mean_size = 2.0, seed = 0))]
fn generate(family: &str, nodes: usize, components: usize, mean_size: f64, seed: u64) -> PyResult<DetectionModel> {
    let config = GenConfig {
        node_count: nodes,
        component_count: components,
        mean_set_size: mean_size,
        seed,
        family: family.parse().map_err(to_py)?,
    };
    Ok(DetectionModel {
        inner: generate_model(&config).map_err(to_py)?,
    })
}

#[pymodule]
fn inspectra(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<DetectionModel>()?;
    m.add_class::<Strategy>()?;
    m.add_function(wrap_pyfunction!(covers, m)?)?;
    m.add_function(wrap_pyfunction!(cyclic_strategy, m)?)?;
    m.add_function(wrap_pyfunction!(plan_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(plan, m)?)?;
    m.add_function(wrap_pyfunction!(refine, m)?)?;
    m.add_function(wrap_pyfunction!(solve_exact, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(expected_payoffs, m)?)?;
    m.add_function(wrap_pyfunction!(detection_rate, m)?)?;
    m.add_function(wrap_pyfunction!(best_response_attacker, m)?)?;
    m.add_function(wrap_pyfunction!(best_response_defender, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
