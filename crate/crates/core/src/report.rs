//! Residual reports: one line per check, `name: <n> terms`, plus the first nonzero term.

use std::time::Duration;

use crate::hochschild::{DiffAlgebra, PolyDiffOp};
use crate::hseries::HSeries;
use crate::ode::{Carrier, TPoly};
use crate::polyvector::Multi;
use crate::text::{format_hseries, format_weyl};
use crate::weyl::WeylElement;

/// Something whose vanishing is checked.
pub trait Residual {
    fn term_count(&self) -> usize;
    fn first_term(&self) -> Option<String>;
}

impl Residual for HSeries {
    fn term_count(&self) -> usize {
        self.terms().count()
    }
    fn first_term(&self) -> Option<String> {
        let (k, e, c) = self.terms().next()?;
        Some(format_hseries(&HSeries::monomial(
            self.profile(),
            k,
            *e,
            c.clone(),
        )))
    }
}

impl Residual for WeylElement {
    fn term_count(&self) -> usize {
        self.terms().len()
    }
    fn first_term(&self) -> Option<String> {
        let (m, c) = self.terms().iter().next()?;
        Some(format_weyl(&WeylElement::from_terms(
            self.profile(),
            [(*m, c.clone())],
        )))
    }
}

impl<K> Residual for Multi<K> {
    fn term_count(&self) -> usize {
        self.comps().values().map(Residual::term_count).sum()
    }
    fn first_term(&self) -> Option<String> {
        let (s, c) = self.comps().iter().next()?;
        Some(format!("({})[{}]", s.fmt_one_based(), c.first_term()?))
    }
}

impl<C: DiffAlgebra + Residual> Residual for PolyDiffOp<C> {
    fn term_count(&self) -> usize {
        self.terms().values().map(Residual::term_count).sum()
    }
    fn first_term(&self) -> Option<String> {
        let d = self.profile().dim;
        let (k, c) = self.terms().iter().next()?;
        let slots: Vec<String> = k.iter().map(|e| e.fmt_dim(d)).collect();
        Some(format!("D[{}]({})", slots.join(","), c.first_term()?))
    }
}

impl<V: Carrier + Residual> Residual for TPoly<V> {
    fn term_count(&self) -> usize {
        self.coeffs().iter().map(Residual::term_count).sum()
    }
    fn first_term(&self) -> Option<String> {
        self.coeffs()
            .iter()
            .enumerate()
            .find_map(|(n, c)| c.first_term().map(|s| format!("t^{n}: {s}")))
    }
}

impl<R: Residual> Residual for Vec<R> {
    fn term_count(&self) -> usize {
        self.iter().map(Residual::term_count).sum()
    }
    fn first_term(&self) -> Option<String> {
        self.iter().find_map(Residual::first_term)
    }
}

impl<R: Residual> Residual for Option<R> {
    fn term_count(&self) -> usize {
        self.as_ref().map_or(0, Residual::term_count)
    }
    fn first_term(&self) -> Option<String> {
        self.as_ref().and_then(Residual::first_term)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub terms: usize,
    pub first: Option<String>,
    /// The check passes when the residual is nonzero (a witness).
    pub witness: bool,
}

impl Check {
    pub fn zero<R: Residual>(name: impl Into<String>, r: &R) -> Self {
        Check {
            name: name.into(),
            terms: r.term_count(),
            first: r.first_term(),
            witness: false,
        }
    }

    pub fn nonzero<R: Residual>(name: impl Into<String>, r: &R) -> Self {
        Check {
            witness: true,
            ..Check::zero(name, r)
        }
    }

    /// A yes/no condition reported as 0 or 1 terms.
    pub fn holds(name: impl Into<String>, ok: bool, detail: impl FnOnce() -> String) -> Self {
        Check {
            name: name.into(),
            terms: usize::from(!ok),
            first: (!ok).then(detail),
            witness: false,
        }
    }

    pub fn passed(&self) -> bool {
        (self.terms == 0) != self.witness
    }

    pub fn line(&self) -> String {
        let tag = if self.witness { " (witness)" } else { "" };
        match &self.first {
            Some(f) => format!("{}{}: {} terms; first: {}", self.name, tag, self.terms, f),
            None => format!("{}{}: {} terms", self.name, tag, self.terms),
        }
    }
}

/// One scenario section or one selftest suite.
#[derive(Clone, Debug)]
pub struct Section {
    pub name: String,
    pub profile: String,
    pub checks: Vec<Check>,
    pub values: Vec<(String, String)>,
    pub elapsed: Duration,
}

impl Section {
    pub fn new(name: impl Into<String>, profile: impl ToString) -> Self {
        Section {
            name: name.into(),
            profile: profile.to_string(),
            checks: vec![],
            values: vec![],
            elapsed: Duration::ZERO,
        }
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn value(&mut self, key: impl Into<String>, v: impl Into<String>) {
        self.values.push((key.into(), v.into()));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub sections: Vec<Section>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.sections.iter().all(Section::passed)
    }

    /// Deterministic text form; timings are not part of it.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.sections {
            out.push_str(&format!("[{}]\n", s.name));
            out.push_str(&format!("profile: {}\n", s.profile));
            for (k, v) in &s.values {
                out.push_str(&format!("{k}: {v}\n"));
            }
            for c in &s.checks {
                out.push_str(&c.line());
                out.push('\n');
            }
            out.push_str(&format!(
                "status: {}\n\n",
                if s.passed() { "ok" } else { "FAILED" }
            ));
        }
        out.push_str(&format!(
            "overall: {}\n",
            if self.passed() { "ok" } else { "FAILED" }
        ));
        out
    }

    pub fn render_json(&self) -> String {
        let v = serde_json::json!({
            "passed": self.passed(),
            "sections": self.sections.iter().map(|s| serde_json::json!({
                "name": s.name,
                "profile": s.profile,
                "passed": s.passed(),
                "values": s.values.iter().map(|(k, v)| serde_json::json!({"key": k, "value": v})).collect::<Vec<_>>(),
                "checks": s.checks.iter().map(|c| serde_json::json!({
                    "name": c.name,
                    "terms": c.terms,
                    "first": c.first,
                    "witness": c.witness,
                    "passed": c.passed(),
                })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        });
        serde_json::to_string_pretty(&v).expect("json")
    }

    /// Per-section wall time, one line each.
    pub fn timings(&self) -> String {
        self.sections
            .iter()
            .map(|s| format!("time {}: {:.3}s\n", s.name, s.elapsed.as_secs_f64()))
            .collect()
    }
}
