//! Python bindings: `import secrec`.

use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use secrec_core as core;
use secrec_core::{EvalOptions, Format, Mode};

fn to_py(e: core::Error) -> PyErr {
    match e {
        core::Error::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse_mode(s: &str) -> PyResult<Mode> {
    s.parse().map_err(to_py)
}

/// A parsed HTML page.
#[pyclass(frozen, module = "secrec")]
pub struct Document {
    inner: core::Document,
}

#[pymethods]
impl Document {
    /// Parses `html` given as `str` or `bytes`. `encoding` applies to bytes
    /// when the page declares none.
    #[new]
    #[pyo3(signature = (html, encoding = None))]
    fn new(html: &Bound<'_, PyAny>, encoding: Option<&str>) -> PyResult<Self> {
        let inner = if let Ok(text) = html.extract::<String>() {
            core::dom::parse_str(&text)
        } else {
            core::parse_html(&html.extract::<Vec<u8>>()?, encoding)
        }
        .map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn body_id(&self) -> usize {
        self.inner.body_id()
    }

    fn tag(&self, node_id: usize) -> PyResult<String> {
        self.node(node_id).map(|n| n.tag_name.clone())
    }

    /// Visible text of a node's subtree.
    fn text(&self, node_id: usize) -> PyResult<String> {
        self.node(node_id)?;
        Ok(self.inner.text(node_id))
    }

    fn outer_html(&self, node_id: usize) -> PyResult<String> {
        self.node(node_id)?;
        Ok(self.inner.outer_html(node_id))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

impl Document {
    fn node(&self, id: usize) -> PyResult<&core::DomNode> {
        self.inner
            .get(id)
            .ok_or_else(|| PyValueError::new_err(format!("no node with id {id}")))
    }
}

/// Token bags built from a stack trace and the code that raised it.
#[pyclass(frozen, module = "secrec")]
pub struct ExceptionContext {
    inner: core::ExceptionContext,
}

#[pymethods]
impl ExceptionContext {
    /// Distinct context tokens in first-seen order.
    #[getter]
    fn tokens(&self) -> Vec<String> {
        self.inner.combined_list.clone()
    }

    #[getter]
    fn code_sequence(&self) -> Vec<String> {
        self.inner.code_sequence.clone()
    }

    fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }

    fn __repr__(&self) -> String {
        format!("ExceptionContext({} tokens)", self.inner.combined_list.len())
    }
}

#[pyfunction]
#[pyo3(signature = (trace, code = None))]
fn build_context(trace: &str, code: Option<&str>) -> PyResult<ExceptionContext> {
    core::build_context(trace, code)
        .map(|inner| ExceptionContext { inner })
        .map_err(to_py)
}

#[pyclass(get_all, set_all, skip_from_py_object, module = "secrec")]
#[derive(Clone)]
pub struct MetricWeights {
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    eta: f64,
}

impl From<core::MetricWeights> for MetricWeights {
    fn from(w: core::MetricWeights) -> Self {
        Self {
            alpha: w.alpha,
            beta: w.beta,
            gamma: w.gamma,
            delta: w.delta,
            eta: w.eta,
        }
    }
}

impl MetricWeights {
    fn to_core(&self) -> PyResult<core::MetricWeights> {
        let w = core::MetricWeights {
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            delta: self.delta,
            eta: self.eta,
        };
        w.validate().map_err(to_py)?;
        Ok(w)
    }
}

#[pymethods]
impl MetricWeights {
    /// Defaults for any weight not given.
    #[new]
    #[pyo3(signature = (alpha = None, beta = None, gamma = None, delta = None, eta = None))]
    fn new(
        alpha: Option<f64>,
        beta: Option<f64>,
        gamma: Option<f64>,
        delta: Option<f64>,
        eta: Option<f64>,
    ) -> PyResult<Self> {
        let d = core::MetricWeights::default();
        let w = Self {
            alpha: alpha.unwrap_or(d.alpha),
            beta: beta.unwrap_or(d.beta),
            gamma: gamma.unwrap_or(d.gamma),
            delta: delta.unwrap_or(d.delta),
            eta: eta.unwrap_or(d.eta),
        };
        w.to_core()?;
        Ok(w)
    }

    /// Reads a `key=value` weights file.
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        core::MetricWeights::load(&path).map(Self::from).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "MetricWeights(alpha={}, beta={}, gamma={}, delta={}, eta={})",
            self.alpha, self.beta, self.gamma, self.delta, self.eta
        )
    }
}

fn weights_or_default(w: Option<&MetricWeights>) -> PyResult<core::MetricWeights> {
    w.map_or(Ok(core::MetricWeights::default()), MetricWeights::to_core)
}

/// One preserved section with its scores.
#[pyclass(frozen, module = "secrec")]
pub struct Section {
    #[pyo3(get)]
    node_id: usize,
    #[pyo3(get)]
    text: String,
    #[pyo3(get)]
    html: String,
    #[pyo3(get)]
    td: f64,
    #[pyo3(get)]
    ld: f64,
    #[pyo3(get)]
    cd: f64,
    #[pyo3(get)]
    ctd: f64,
    #[pyo3(get)]
    tr: f64,
    #[pyo3(get)]
    cr: f64,
    #[pyo3(get)]
    ctr: f64,
    #[pyo3(get)]
    ctd_norm: f64,
    #[pyo3(get)]
    ctr_norm: f64,
    #[pyo3(get)]
    cts: f64,
    json: String,
}

#[pymethods]
impl Section {
    fn to_json(&self) -> String {
        self.json.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "Section(node_id={}, cts={:.4}, ctr={:.4})",
            self.node_id, self.cts, self.ctr
        )
    }
}

impl From<&core::Section> for Section {
    fn from(s: &core::Section) -> Self {
        let m = &s.metrics;
        Self {
            node_id: s.node_id,
            text: s.text.clone(),
            html: s.html.clone(),
            td: m.td,
            ld: m.ld,
            cd: m.cd,
            ctd: m.ctd,
            tr: m.tr,
            cr: m.cr,
            ctr: m.ctr,
            ctd_norm: m.ctd_norm,
            ctr_norm: m.ctr_norm,
            cts: m.cts,
            json: String::from_utf8(core::render_section(s, Format::Json)).expect("JSON is UTF-8"),
        }
    }
}

#[pyclass(frozen, module = "secrec")]
pub struct ExtractionResult {
    inner: core::ExtractionResult,
}

#[pymethods]
impl ExtractionResult {
    #[getter]
    fn mode(&self) -> &'static str {
        self.inner.mode.as_str()
    }

    /// The body's score that preserved sections had to beat.
    #[getter]
    fn threshold(&self) -> f64 {
        self.inner.threshold
    }

    #[getter]
    fn recommended_id(&self) -> Option<usize> {
        self.inner.recommended
    }

    /// Kept sections in document order.
    #[getter]
    fn sections(&self) -> Vec<Section> {
        self.inner.kept_sections.iter().map(Section::from).collect()
    }

    /// Kept sections, recommended first.
    fn ranked(&self) -> Vec<Section> {
        self.inner.ranked().into_iter().map(Section::from).collect()
    }

    fn recommended(&self) -> Option<Section> {
        self.inner.recommended_section().map(Section::from)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __len__(&self) -> usize {
        self.inner.kept_sections.len()
    }
}

/// Scores `doc` against `context` and recommends a section. `context` may be
/// omitted in density mode.
#[pyfunction]
#[pyo3(signature = (doc, context = None, weights = None, mode = "combined"))]
fn extract(
    doc: &Document,
    context: Option<&ExceptionContext>,
    weights: Option<PyRef<'_, MetricWeights>>,
    mode: &str,
) -> PyResult<ExtractionResult> {
    let mode = parse_mode(mode)?;
    let w = weights_or_default(weights.as_deref())?;
    let empty = core::ExceptionContext::empty();
    let ctx = match (context, mode) {
        (Some(c), _) => &c.inner,
        (None, Mode::Density) => &empty,
        (None, _) => return Err(PyValueError::new_err(format!("{mode} mode needs a context"))),
    };
    Ok(ExtractionResult {
        inner: core::extract(&doc.inner, ctx, &w, mode),
    })
}

/// Word-LCS precision, recall and F1 of an extraction against gold text.
#[pyfunction]
fn score_case(extracted: &str, gold: &str) -> (f64, f64, f64) {
    let p = core::score_case(extracted, gold);
    (p.precision, p.recall, p.f1)
}

#[pyfunction]
fn lcs_length(a: Vec<String>, b: Vec<String>) -> usize {
    core::lcs_length(&a, &b)
}

#[pyfunction]
fn tokenize(text: &str) -> Vec<String> {
    core::token_sequence(text)
}

/// Evaluates a corpus directory and returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (corpus, modes = None, weights = None, workers = 0))]
fn run_corpus<'py>(
    py: Python<'py>,
    corpus: PathBuf,
    modes: Option<Vec<String>>,
    weights: Option<PyRef<'_, MetricWeights>>,
    workers: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let modes = match modes {
        Some(m) => m.iter().map(|s| parse_mode(s)).collect::<PyResult<Vec<_>>>()?,
        None => Mode::ALL.to_vec(),
    };
    let opts = EvalOptions {
        weights: weights_or_default(weights.as_deref())?,
        workers,
        ..EvalOptions::default()
    };
    let report = py.detach(|| core::run_corpus(&corpus, &modes, &opts)).map_err(to_py)?;
    py.import("json")?.call_method1("loads", (report.to_json(),))
}

#[pymodule]
fn secrec(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Document>()?;
    m.add_class::<ExceptionContext>()?;
    m.add_class::<MetricWeights>()?;
    m.add_class::<Section>()?;
    m.add_class::<ExtractionResult>()?;
    m.add_function(wrap_pyfunction!(build_context, m)?)?;
    m.add_function(wrap_pyfunction!(extract, m)?)?;
    m.add_function(wrap_pyfunction!(score_case, m)?)?;
    m.add_function(wrap_pyfunction!(lcs_length, m)?)?;
    m.add_function(wrap_pyfunction!(tokenize, m)?)?;
    m.add_function(wrap_pyfunction!(run_corpus, m)?)?;
    Ok(())
}
