//! Serializable reports for the front-end commands and their text rendering.
//!
//! The text form prints the same numbers as the JSON form; both are built
//! from the structs below and nothing else.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::checks::InvariantCheck;
use crate::config::MonomialSpec;
use crate::construction::{Check, ChoiceReport, FreenessBound, RamificationData};
use crate::structure::{ModuleStructureReport, ScaffoldTables};

/// Echo of the run parameters with the valuations they imply.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parameters {
    pub p: u32,
    pub e0: u32,
    pub unit: i64,
    pub a1: MonomialSpec,
    pub mu: MonomialSpec,
    pub v0_a1: i64,
    pub v0_mu: i64,
    /// `a2 = μ^p·a1`
    pub v0_a2: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionInfo {
    /// requested `v2`-precision of every reported quantity
    pub target: i64,
    pub headroom: i64,
    /// absolute `v0`-precision of the base field
    pub v0_cap: i64,
    pub attempts: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ItemStatus {
    Holds,
    Fails,
    /// the printed evaluation does not match the stated quantities
    InconsistentAsPrinted,
}

/// One of the four bound comparisons of the worked example, evaluated for
/// the current parameters with unreduced fractions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceItem {
    pub name: String,
    pub statement: String,
    pub lhs: String,
    pub relation: String,
    pub rhs: String,
    pub status: ItemStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub printed: Option<String>,
    /// checks that stand in for an inconsistent item
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub replaced_by: Vec<Check>,
}

impl ReferenceItem {
    pub fn comparison(&self) -> String {
        format!("{} {} {}", self.lhs, self.relation, self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub parameters: Parameters,
    pub choice1: ChoiceReport,
    pub choice2: ChoiceReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub freeness_bound: Option<FreenessBound>,
    pub reference_items: Vec<ReferenceItem>,
    pub passed: bool,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaloisSummary {
    /// `v2(σ1 x1 - x1 - 1)`
    pub epsilon_valuation: i64,
    /// `v2(σ2 x2 - x2 - 1)`
    pub delta_valuation: i64,
    /// `v2(D(x1, 1))`
    pub c1_valuation: i64,
    /// `v2`-precision of the lifted images
    pub image_precision: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub parameters: Parameters,
    pub precision: PrecisionInfo,
    pub ramification: RamificationData,
    pub freeness_bound: FreenessBound,
    pub tables: ScaffoldTables,
    pub structure: ModuleStructureReport,
    /// the element `ρ0` of valuation `r(b2)` as a monomial
    pub rho0: String,
    pub galois: GaloisSummary,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<InvariantCheck>,
}

impl SuiteResult {
    pub fn new(name: &str, checks: Vec<InvariantCheck>) -> Self {
        let passed = checks.iter().filter(|c| c.holds).count();
        SuiteResult {
            name: name.into(),
            passed,
            failed: checks.len() - passed,
            checks,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditSummary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    /// failures caused only by insufficient precision
    pub indeterminate: usize,
    pub all_pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub parameters: Parameters,
    pub precision: PrecisionInfo,
    pub sample: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault: Option<String>,
    pub suites: Vec<SuiteResult>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<String>,
    pub summary: AuditSummary,
}

impl AuditReport {
    pub fn failures(&self) -> impl Iterator<Item = &InvariantCheck> {
        self.suites.iter().flat_map(|s| s.checks.iter()).filter(|c| !c.holds)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldenComparison {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReproductionReport {
    pub validation: ValidationReport,
    pub analysis: AnalysisReport,
    pub comparisons: Vec<GoldenComparison>,
    pub all_match: bool,
}

fn list<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(", ")
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

fn write_parameters(out: &mut String, p: &Parameters) {
    let _ = writeln!(out, "parameters");
    let _ = writeln!(out, "  p: {}", p.p);
    let _ = writeln!(out, "  e0: {}", p.e0);
    let _ = writeln!(out, "  unit: {}", p.unit);
    let _ = writeln!(out, "  a1: {}", p.a1);
    let _ = writeln!(out, "  mu: {}", p.mu);
    let _ = writeln!(out, "  v0_a1: {}", p.v0_a1);
    let _ = writeln!(out, "  v0_mu: {}", p.v0_mu);
    let _ = writeln!(out, "  v0_a2: {}", p.v0_a2);
}

fn write_precision(out: &mut String, p: &PrecisionInfo) {
    let _ = writeln!(out, "precision");
    let _ = writeln!(out, "  target: {}", p.target);
    let _ = writeln!(out, "  headroom: {}", p.headroom);
    let _ = writeln!(out, "  v0_cap: {}", p.v0_cap);
    let _ = writeln!(out, "  attempts: {}", p.attempts);
}

fn write_check(out: &mut String, indent: &str, c: &Check) {
    let _ = write!(
        out,
        "{indent}[{}] {}: {}  ({} vs {})",
        mark(c.holds),
        c.name,
        c.statement,
        c.lhs,
        c.rhs
    );
    if let Some(note) = &c.note {
        let _ = write!(out, "  note: {note}");
    }
    out.push('\n');
}

impl ValidationReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        write_parameters(&mut out, &self.parameters);
        let _ = writeln!(out, "choice of a1");
        self.choice1.checks.iter().for_each(|c| write_check(&mut out, "  ", c));
        let _ = writeln!(out, "choice of mu");
        self.choice2.checks.iter().for_each(|c| write_check(&mut out, "  ", c));
        if let Some(fb) = &self.freeness_bound {
            let _ = writeln!(out, "freeness bound");
            let _ = writeln!(out, "  margin: {}", fb.margin);
            fb.checks.iter().for_each(|c| write_check(&mut out, "  ", c));
        }
        let _ = writeln!(out, "reference comparisons");
        for item in &self.reference_items {
            let status = match item.status {
                ItemStatus::Holds => "holds",
                ItemStatus::Fails => "fails",
                ItemStatus::InconsistentAsPrinted => "inconsistent as printed",
            };
            let _ = writeln!(out, "  {}: {}  [{status}]", item.name, item.comparison());
            if let Some(printed) = &item.printed {
                let _ = writeln!(out, "    printed: {printed}");
            }
            for c in &item.replaced_by {
                write_check(&mut out, "    replaced by ", c);
            }
        }
        let _ = writeln!(out, "passed: {}", self.passed);
        for v in &self.violations {
            let _ = writeln!(out, "violation: {v}");
        }
        out
    }
}

impl AnalysisReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        write_parameters(&mut out, &self.parameters);
        write_precision(&mut out, &self.precision);
        let r = &self.ramification;
        let _ = writeln!(out, "ramification");
        let _ = writeln!(out, "  b1: {}", r.b1);
        let _ = writeln!(out, "  m: {}", r.m);
        let _ = writeln!(out, "  b2: {}", r.b2);
        let _ = writeln!(out, "  u1: {}", r.u1);
        let _ = writeln!(out, "  u2: {}", r.u2);
        let _ = writeln!(out, "  depth: {}", r.depth);
        let _ = writeln!(out, "  different_valuation: {}", r.different_valuation);
        let _ = writeln!(out, "  precision_c: {}", r.precision_c);
        let _ = writeln!(out, "  r_b2: {}", r.r_b2);
        let _ = writeln!(out, "  freeness_margin: {}", self.freeness_bound.margin);
        let t = &self.tables;
        let _ = writeln!(out, "scaffold tables");
        let _ = writeln!(out, "  a_map: {}", list(&t.a_map));
        let _ = writeln!(out, "  b_map: {}", list(&t.b_map));
        let _ = writeln!(out, "  d: {}", list(&t.d));
        let _ = writeln!(out, "  w: {}", list(&t.w));
        let s = &self.structure;
        let _ = writeln!(out, "associated order basis");
        for b in &s.assoc_order_basis {
            let _ = writeln!(out, "  {}: {}", b.j, b.label);
        }
        let _ = writeln!(out, "module structure");
        let _ = writeln!(out, "  rho0: {}", self.rho0);
        let _ = writeln!(out, "  valuation_table: {}", list(&s.valuation_table));
        let _ = writeln!(out, "  residue_divides: {}", s.routes.residue_divides);
        let _ = writeln!(out, "  w_matches_d: {}", s.routes.w_matches_d);
        let _ = writeln!(out, "  valuations_complete: {}", s.routes.valuations_complete);
        let _ = writeln!(out, "  free: {}", s.free);
        let _ = writeln!(out, "  generator: {}", s.generator.as_deref().unwrap_or("none"));
        let g = &self.galois;
        let _ = writeln!(out, "galois");
        let _ = writeln!(out, "  epsilon_valuation: {}", g.epsilon_valuation);
        let _ = writeln!(out, "  delta_valuation: {}", g.delta_valuation);
        let _ = writeln!(out, "  c1_valuation: {}", g.c1_valuation);
        let _ = writeln!(out, "  image_precision: {}", g.image_precision);
        out
    }
}

impl AuditReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        write_parameters(&mut out, &self.parameters);
        write_precision(&mut out, &self.precision);
        let _ = writeln!(out, "sample: {}", self.sample);
        let _ = writeln!(out, "seed: {}", self.seed);
        if let Some(f) = &self.fault {
            let _ = writeln!(out, "fault: {f}");
        }
        let _ = writeln!(out, "suites");
        for s in &self.suites {
            let _ = writeln!(out, "  {}: {} passed, {} failed", s.name, s.passed, s.failed);
        }
        for s in &self.skipped {
            let _ = writeln!(out, "skipped: {s}");
        }
        for c in self.failures() {
            let tag = if c.indeterminate { "INDETERMINATE" } else { "FAIL" };
            let _ = writeln!(out, "[{tag}] {}: {}", c.name, c.detail);
        }
        let s = &self.summary;
        let _ = writeln!(out, "total: {}", s.total);
        let _ = writeln!(out, "passed: {}", s.passed);
        let _ = writeln!(out, "failed: {}", s.failed);
        let _ = writeln!(out, "indeterminate: {}", s.indeterminate);
        let _ = writeln!(out, "all_pass: {}", s.all_pass);
        out
    }
}

impl ReproductionReport {
    pub fn render_text(&self) -> String {
        let mut out = self.analysis.render_text();
        out.push_str(&self.validation.render_text());
        let _ = writeln!(out, "golden comparison");
        for c in &self.comparisons {
            let _ = writeln!(out, "  [{}] {}: {}", mark(c.matches), c.name, c.actual);
            if !c.matches {
                let _ = writeln!(out, "    expected: {}", c.expected);
            }
        }
        let _ = writeln!(out, "all_match: {}", self.all_match);
        out
    }
}
