//! Python bindings: the four bundled calculi, transition derivation, format
//! checks, translations and the seeded property suites.

use nrtss::calculi::{bundle, counterpart, CalculusBundle, NAMES};
use nrtss::engine::{format_residual, AtomPool, Engine, ProofTree, Transition as RsTransition, DEFAULT_FRESH_SLACK, DEFAULT_FUEL};
use nrtss::formats::{check_acr, check_ba, check_equivariant, AcrOptions};
use nrtss::freshness::{entails, simplify};
use nrtss::props::{check_roundtrip, check_translation, derived_set};
use nrtss::selftest;
use nrtss::syntax::{parse_env, parse_term};
use nrtss::{interpret, NominalTerm};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: nrtss::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// One derived transition. Abstraction residuals have a binder.
#[pyclass(frozen, get_all, skip_from_py_object, module = "nrtss")]
#[derive(Clone)]
struct Transition {
    source: String,
    style: String,
    binder: Option<String>,
    action: Option<String>,
    target: Option<String>,
    residual: String,
    /// Rule ids of the proof tree, preorder.
    rules: Vec<String>,
    proof: String,
}

#[pymethods]
impl Transition {
    fn __repr__(&self) -> String {
        format!("<Transition {} --> {}>", self.source, self.residual)
    }
}

impl Transition {
    fn new(t: &RsTransition, pt: &ProofTree) -> Self {
        let (binder, body) = match t.residual.as_abs() {
            Some((a, b)) => (Some(a.to_string()), b),
            None => (None, t.residual.clone()),
        };
        let parts = body.components().filter(|cs| cs.len() == 2);
        Transition {
            source: t.source.to_string(),
            style: if binder.is_some() { "abstraction" } else { "plain" }.to_string(),
            binder,
            action: parts.as_ref().map(|cs| cs[0].to_string()),
            target: parts.as_ref().map(|cs| cs[1].to_string()),
            residual: format_residual(&t.residual),
            rules: pt.rule_ids().into_iter().map(String::from).collect(),
            proof: pt.render(),
        }
    }
}

/// Outcome of a format check, one line per obligation.
#[pyclass(frozen, get_all, module = "nrtss")]
struct Report {
    format: String,
    passed: bool,
    lines: Vec<String>,
    failures: Vec<String>,
}

#[pymethods]
impl Report {
    fn __len__(&self) -> usize {
        self.lines.len()
    }

    fn __bool__(&self) -> bool {
        self.passed
    }

    fn __repr__(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        format!("<Report {} {verdict}: {} obligations>", self.format, self.lines.len())
    }
}

/// A bundled calculus: `early`, `late`, `early-abs` or `late-abs`.
#[pyclass(frozen, module = "nrtss")]
struct Calculus {
    inner: CalculusBundle,
}

impl Calculus {
    fn state(&self, term: &str) -> PyResult<NominalTerm> {
        let n = &self.inner.nrtss;
        interpret(&parse_term(&n.signature, term, Some(&n.state_sort)).map_err(err)?).map_err(err)
    }

    fn pool(&self, p: &NominalTerm, extra_fresh: usize) -> AtomPool {
        AtomPool::for_state(&self.inner.nrtss.signature, p, extra_fresh)
    }
}

#[pymethods]
impl Calculus {
    #[new]
    fn py_new(name: &str) -> PyResult<Self> {
        Ok(Calculus { inner: bundle(name).map_err(err)? })
    }

    #[getter]
    fn name(&self) -> &str {
        self.inner.name
    }

    #[getter]
    fn style(&self) -> &str {
        if self.inner.nrtss.is_abstraction() {
            "abstraction"
        } else {
            "plain"
        }
    }

    #[getter]
    fn rule_ids(&self) -> Vec<String> {
        self.inner.nrtss.rules.iter().map(|r| r.id.clone()).collect()
    }

    /// The rule set in the rule-spec syntax.
    fn rules_text(&self) -> String {
        self.inner.nrtss.to_text()
    }

    /// Canonical form of a state.
    fn canonical(&self, term: &str) -> PyResult<String> {
        Ok(self.state(term)?.to_string())
    }

    #[pyo3(signature = (term, extra_fresh = DEFAULT_FRESH_SLACK, fuel = DEFAULT_FUEL))]
    fn step(&self, term: &str, extra_fresh: usize, fuel: usize) -> PyResult<Vec<Transition>> {
        let p = self.state(term)?;
        let d = Engine::new(&self.inner.nrtss).derive(&p, &self.pool(&p, extra_fresh), fuel).map_err(err)?;
        Ok(d.transitions.iter().map(|(t, pt)| Transition::new(t, pt)).collect())
    }

    /// `format` is `equivariant`, `acr` or `ba`.
    #[pyo3(signature = (format, nf_filter = true, all_instances = false))]
    fn check(&self, format: &str, nf_filter: bool, all_instances: bool) -> PyResult<Report> {
        let b = &self.inner;
        let r = match (format, &b.bn) {
            ("equivariant", _) => check_equivariant(&b.nrtss),
            ("acr", Some(bn)) => {
                check_acr(&b.nrtss, bn, &b.strat, &b.inert, AcrOptions { nf_filter, all_instances }).map_err(err)?
            }
            ("ba", None) => check_ba(&b.nrtss, &b.strat).map_err(err)?,
            ("acr" | "ba", _) => {
                return Err(PyValueError::new_err(format!("{format} does not apply to {} residuals", self.style())))
            }
            _ => return Err(PyValueError::new_err(format!("unknown format {format}"))),
        };
        Ok(Report {
            format: r.format.clone(),
            passed: r.passed(),
            lines: r.lines(),
            failures: r.failures().map(|o| o.to_string()).collect(),
        })
    }

    /// Differences between the translated transitions of a plain calculus
    /// and those of its abstraction counterpart; empty when they agree.
    #[pyo3(signature = (term, extra_fresh = DEFAULT_FRESH_SLACK, fuel = DEFAULT_FUEL))]
    fn translate(&self, term: &str, extra_fresh: usize, fuel: usize) -> PyResult<Vec<String>> {
        let (plain, abs) = match &self.inner.bn {
            Some(_) => (self.inner.clone(), bundle(counterpart(self.inner.name).expect("paired")).map_err(err)?),
            None => (bundle(counterpart(self.inner.name).expect("paired")).map_err(err)?, self.inner.clone()),
        };
        let p = self.state(term)?;
        let pool = self.pool(&p, extra_fresh);
        let pt = derived_set(&mut Engine::new(&plain.nrtss), &p, &pool, fuel).map_err(err)?;
        let at = derived_set(&mut Engine::new(&abs.nrtss), &p, &pool, fuel).map_err(err)?;
        check_translation(&pt, plain.bn.as_ref().expect("plain"), &at).map_err(err)
    }

    /// Differences between the derived set of `term` and its round trip.
    #[pyo3(signature = (term, extra_fresh = DEFAULT_FRESH_SLACK, fuel = DEFAULT_FUEL))]
    fn roundtrip(&self, term: &str, extra_fresh: usize, fuel: usize) -> PyResult<Vec<String>> {
        let p = self.state(term)?;
        let pool = self.pool(&p, extra_fresh);
        let ts = derived_set(&mut Engine::new(&self.inner.nrtss), &p, &pool, fuel).map_err(err)?;
        check_roundtrip(&ts, self.inner.bn.as_ref(), &pool).map_err(err)
    }

    /// Whether `{ a # t, ... }` entails another environment, over this
    /// calculus's signature.
    fn entails(&self, env1: &str, env2: &str) -> PyResult<bool> {
        let sig = &self.inner.nrtss.signature;
        Ok(entails(&parse_env(sig, env1).map_err(err)?, &parse_env(sig, env2).map_err(err)?))
    }

    /// Normal form of a freshness environment.
    fn simplify(&self, env: &str) -> PyResult<String> {
        Ok(simplify(&parse_env(&self.inner.nrtss.signature, env).map_err(err)?).to_string())
    }

    fn __repr__(&self) -> String {
        format!("<Calculus {}>", self.inner.name)
    }
}

/// Names of the bundled calculi.
#[pyfunction]
fn calculi() -> Vec<&'static str> {
    NAMES.to_vec()
}

/// Runs property suites; returns `(suite, passed, summary, counterexamples)`
/// tuples.
#[pyfunction]
#[pyo3(signature = (seed = 0, suites = None, cases = None, atoms = None, depth = None, force_failure = false))]
fn run_selftest(
    seed: u64,
    suites: Option<Vec<String>>,
    cases: Option<usize>,
    atoms: Option<u32>,
    depth: Option<usize>,
    force_failure: bool,
) -> PyResult<Vec<(String, bool, String, Vec<String>)>> {
    let cfg = selftest::Config {
        seed,
        cases,
        atoms,
        depth,
        force_failure,
        ..selftest::Config::default()
    };
    let names: Vec<String> = suites.unwrap_or_else(|| selftest::SUITES.iter().map(|s| s.to_string()).collect());
    names
        .iter()
        .map(|s| {
            let o = selftest::run(s, &cfg).map_err(err)?;
            Ok((o.suite.clone(), o.passed(), o.summary.clone(), o.counterexamples))
        })
        .collect()
}

#[pymodule]
#[pyo3(name = "nrtss")]
fn nrtss_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Calculus>()?;
    m.add_class::<Transition>()?;
    m.add_class::<Report>()?;
    m.add_function(wrap_pyfunction!(calculi, m)?)?;
    m.add_function(wrap_pyfunction!(run_selftest, m)?)?;
    Ok(())
}
