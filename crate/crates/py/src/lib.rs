//! Python bindings: a `Network` class over the core engine.

use std::fs;

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use qpn_core::oracle::{soundness_report, OracleConfig, OracleError, OracleQuery};
use qpn_core::transforms::{apply, SynergyMode, TransformOp};
use qpn_core::{
    d_separated, explain, load_network, qualitative_influence, serialize, synergy_query, to_dot, D_separated,
    InfluenceQuery, Qpn, QueryError, SeparationQuery, SynergyQuery, TransformError,
};

create_exception!(qpn, QpnError, PyValueError, "A network or request rejected by the engine.");

fn rejected(message: impl ToString, hint: &str) -> PyErr {
    QpnError::new_err(format!("{} (hint: {hint})", message.to_string()))
}

fn query_err(e: QueryError) -> PyErr {
    rejected(&e, e.hint())
}

fn transform_err(e: TransformError) -> PyErr {
    rejected(&e, e.hint())
}

fn oracle_err(e: OracleError) -> PyErr {
    rejected(&e, e.hint())
}

fn parse(text: &str) -> PyResult<Qpn> {
    load_network(text).map_err(|e| {
        let lines: Vec<String> = e.diagnostics.iter().map(ToString::to_string).collect();
        QpnError::new_err(format!("invalid network:\n{}", lines.join("\n")))
    })
}

/// A validated network. Every operation returns a new value.
#[pyclass(frozen, module = "qpn")]
pub struct Network {
    net: Qpn,
}

#[pymethods]
impl Network {
    /// Parse network text.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(Network { net: parse(text)? })
    }

    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| rejected(format!("{path}: {e}"), "check the network path"))?;
        Self::new(&text)
    }

    fn serialize(&self) -> String {
        serialize(&self.net)
    }

    fn to_dot(&self) -> String {
        to_dot(&self.net)
    }

    /// `(name, "prob" | "det")` pairs in name order.
    fn nodes(&self) -> Vec<(String, String)> {
        self.net.nodes().map(|(n, k)| (n.to_string(), k.keyword().to_string())).collect()
    }

    /// `(parent, child, sign)` triples.
    fn edges(&self) -> Vec<(String, String, String)> {
        self.net.edges().map(|(p, c, e)| (p.to_string(), c.to_string(), e.sign.to_string())).collect()
    }

    #[pyo3(signature = (source, target, given = Vec::new()))]
    fn influence(&self, source: &str, target: &str, given: Vec<String>) -> PyResult<String> {
        let r = qualitative_influence(&self.net, &InfluenceQuery::new(source, target, given)).map_err(query_err)?;
        Ok(r.sign.to_string())
    }

    /// The transformation trace behind an influence answer.
    #[pyo3(signature = (source, target, given = Vec::new()))]
    fn explain(&self, source: &str, target: &str, given: Vec<String>) -> PyResult<String> {
        let r = qualitative_influence(&self.net, &InfluenceQuery::new(source, target, given)).map_err(query_err)?;
        Ok(explain(&r))
    }

    #[pyo3(signature = (a, b, child, given = Vec::new()))]
    fn synergy(&self, a: &str, b: &str, child: &str, given: Vec<String>) -> PyResult<String> {
        let r = synergy_query(&self.net, &SynergyQuery::new(a, b, child, given)).map_err(query_err)?;
        Ok(r.sign.to_string())
    }

    /// Separation that accounts for functionally determined nodes.
    #[pyo3(signature = (x, y, given = Vec::new()))]
    fn separated(&self, x: &str, y: &str, given: Vec<String>) -> PyResult<bool> {
        D_separated(&self.net, &SeparationQuery::new(x, y, given.iter())).map_err(query_err)
    }

    #[pyo3(signature = (x, y, given = Vec::new()))]
    fn d_separated(&self, x: &str, y: &str, given: Vec<String>) -> PyResult<bool> {
        d_separated(&self.net, &SeparationQuery::new(x, y, given.iter())).map_err(query_err)
    }

    /// Apply `reverse:c,d`, `dnp:c`, `dnp:c,d`, `reduce:c` or `barren:c`.
    fn transform(&self, op: &str) -> PyResult<Network> {
        let op: TransformOp = op.parse().map_err(PyValueError::new_err)?;
        let (net, _) = apply(&self.net, &op, SynergyMode::Invalidate).map_err(transform_err)?;
        Ok(Network { net })
    }

    /// Numeric soundness check of an influence answer, as a dict.
    #[pyo3(signature = (source, target, given = Vec::new(), trials = 100, seed = 0))]
    fn check_influence<'py>(
        &self,
        py: Python<'py>,
        source: &str,
        target: &str,
        given: Vec<String>,
        trials: usize,
        seed: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let q = OracleQuery::Influence(InfluenceQuery::new(source, target, given));
        self.check(py, &q, trials, seed)
    }

    /// Numeric soundness check of a synergy answer, as a dict.
    #[pyo3(signature = (a, b, child, given = Vec::new(), trials = 100, seed = 0))]
    #[allow(clippy::too_many_arguments)]
    fn check_synergy<'py>(
        &self,
        py: Python<'py>,
        a: &str,
        b: &str,
        child: &str,
        given: Vec<String>,
        trials: usize,
        seed: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let q = OracleQuery::Synergy(SynergyQuery::new(a, b, child, given));
        self.check(py, &q, trials, seed)
    }

    fn __str__(&self) -> String {
        serialize(&self.net)
    }

    fn __repr__(&self) -> String {
        format!("<Network: {} nodes, {} edges>", self.net.node_count(), self.net.edge_count())
    }

    fn __eq__(&self, other: &Network) -> bool {
        self.net == other.net
    }
}

impl Network {
    fn check<'py>(&self, py: Python<'py>, q: &OracleQuery, trials: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let cfg = OracleConfig::default().with_trials(trials).with_seed(seed);
        let verdict = soundness_report(&self.net, q, &cfg).map_err(oracle_err)?;
        let text = serde_json::to_string(&verdict).expect("verdicts serialize");
        py.import("json")?.call_method1("loads", (text,))
    }
}

#[pymodule]
pub fn qpn(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Network>()?;
    m.add("QpnError", m.py().get_type::<QpnError>())?;
    Ok(())
}
