//! End-to-end runs behind the front-end commands.
//!
//! Working precision is chosen from the requested target plus a headroom
//! proportional to the expected loss in the Newton lifts; a run whose
//! results are undecided at the target is repeated with doubled headroom.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Pow;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::checks::InvariantCheck;
use crate::config::JobConfig;
use crate::construction::{
    check_freeness_bound, ramification_data, validate_choice1, validate_choice2, Check, RamificationData,
};
use crate::error::{Error, Result};
use crate::galois::{c1, Fault, GaloisData};
use crate::padic::{BaseField, PadicInt};
use crate::report::{
    AnalysisReport, AuditReport, AuditSummary, GaloisSummary, GoldenComparison, ItemStatus, Parameters, PrecisionInfo,
    ReferenceItem, ReproductionReport, SuiteResult, ValidationReport,
};
use crate::scaffold;
use crate::structure::{
    associated_order_and_freeness, congruence_audit, normal_basis_rank, rho_family, PsiTable, ScaffoldTables,
};
use crate::tower::{lambda, uniformizer_k2, uniformizer_label, Extension};

pub const MAX_ATTEMPTS: u32 = 4;
pub const DEFAULT_SAMPLE: usize = 20;
pub const DEFAULT_SEED: u64 = 0;

/// Per-run options that are not part of the mathematical input.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub sample: Option<usize>,
    pub seed: Option<u64>,
    pub fault: Option<Fault>,
}

fn unit_padic(p: u32, unit: i64) -> PadicInt {
    let mut digits = 1;
    while BigInt::from(p).pow(digits) <= BigInt::from(unit.unsigned_abs()) {
        digits += 1;
    }
    PadicInt::new(p, unit, digits)
}

fn base_field(cfg: &JobConfig, cap: i64) -> Result<Arc<BaseField>> {
    if cfg.unit == 0 {
        return Err(Error::Config("unit must be nonzero".into()));
    }
    BaseField::with_unit(cfg.p, cfg.e0, &unit_padic(cfg.p, cfg.unit), cap)
}

/// Bound on `|v0|` of the input monomials and of `a2 = μ^p·a1`.
fn input_spread(cfg: &JobConfig) -> i64 {
    let e0 = cfg.e0 as i64;
    let p = cfg.p as i64;
    let digits = |c: i64| 64 - c.unsigned_abs().leading_zeros() as i64;
    cfg.a1.exp.abs() + p * cfg.mu.exp.abs() + e0 * (digits(cfg.a1.coeff) + p * digits(cfg.mu.coeff))
}

/// A cap comfortably above the valuation of every input monomial.
fn input_cap(cfg: &JobConfig) -> i64 {
    2 * input_spread(cfg) + 4 * cfg.e0 as i64 + 16
}

fn parameters(cfg: &JobConfig, base: &Arc<BaseField>) -> Result<Parameters> {
    let v0_a1 = cfg.a1.to_k0(base).valuation()?;
    let v0_mu = cfg.mu.to_k0(base).valuation()?;
    Ok(Parameters {
        p: cfg.p,
        e0: cfg.e0,
        unit: cfg.unit,
        a1: cfg.a1,
        mu: cfg.mu,
        v0_a1,
        v0_mu,
        v0_a2: cfg.p as i64 * v0_mu + v0_a1,
    })
}

fn ratio_text(n: i64, d: i64) -> String {
    if d == 1 {
        n.to_string()
    } else {
        format!("{n}/{d}")
    }
}

fn item(name: &str, statement: &str, lhs: String, relation: &str, rhs: String, holds: bool) -> ReferenceItem {
    ReferenceItem {
        name: name.into(),
        statement: statement.into(),
        lhs,
        relation: relation.into(),
        rhs,
        status: if holds { ItemStatus::Holds } else { ItemStatus::Fails },
        printed: None,
        replaced_by: Vec::new(),
    }
}

/// The four comparisons of the worked example, evaluated at `(p, e0, v0(a1), m)`.
/// Fractions are kept unreduced so they read as `p·e0 / (p²-1)` etc.
pub fn reference_items(cfg: &JobConfig, params: &Parameters, choice2: &[Check]) -> Vec<ReferenceItem> {
    let p = params.p as i64;
    let p2 = p * p;
    let e0 = params.e0 as i64;
    let v = params.v0_a1;
    let b1 = -v;
    let m = -params.v0_mu;
    let b2 = p2 * m + b1;
    let u2 = p * m + b1;

    let first = item(
        "a1_lower_bound",
        "-p·e0/(p²-1) < v0(a1)",
        ratio_text(-p * e0, p2 - 1),
        "<",
        v.to_string(),
        -p * e0 < v * (p2 - 1),
    );

    // v0(a1) + (p-1)/p·b1 against v0(a1^p); the left side equals v0(a1)/p
    let lhs_num = p * v + (p - 1) * b1;
    let mut second = item(
        "a1_power_comparison",
        "v0(a1) + (p-1)/p·b1 < v0(a1^p)",
        ratio_text(lhs_num, p),
        "<",
        (p * v).to_string(),
        lhs_num < p * p * v,
    );
    second.status = ItemStatus::InconsistentAsPrinted;
    if is_reference(cfg) {
        second.printed = Some("-10/3 < -3".into());
    }
    second.replaced_by = choice2
        .iter()
        .filter(|c| c.name == "mu_first_bound" || c.name == "mu_second_bound")
        .cloned()
        .collect();

    let lhs3 = p2 * e0;
    let rhs3 = (p + 1) * b2 - (p - 1) * b1;
    let third = item(
        "freeness_bound",
        "p²·e0 > (p+1)·b2 - (p-1)·b1",
        lhs3.to_string(),
        ">",
        rhs3.to_string(),
        lhs3 > rhs3,
    );
    let rhs4 = (u2 + 1) * p2 + b1;
    let fourth = item(
        "upper_number_form",
        "e0 > u2 + b1/p² + 1",
        e0.to_string(),
        ">",
        ratio_text(rhs4, p2),
        e0 * p2 > rhs4,
    );
    vec![first, second, third, fourth]
}

fn is_reference(cfg: &JobConfig) -> bool {
    let r = JobConfig::reference_example();
    (cfg.p, cfg.e0, cfg.a1, cfg.mu, cfg.unit) == (r.p, r.e0, r.a1, r.mu, r.unit)
}

fn reference_config(precision: Option<i64>) -> JobConfig {
    JobConfig {
        precision,
        ..JobConfig::reference_example()
    }
}

/// Choice checks, ramification invariants and the freeness bound.
pub fn validate(cfg: &JobConfig) -> Result<ValidationReport> {
    let base = base_field(cfg, input_cap(cfg))?;
    let params = parameters(cfg, &base)?;
    let a1 = cfg.a1.to_k0(&base);
    let mu = cfg.mu.to_k0(&base);
    let choice1 = validate_choice1(&a1, &base);
    let choice2 = validate_choice2(&mu, &a1, &base);
    let mut violations = choice1.violations();
    violations.extend(choice2.violations());
    let mut freeness_bound = None;
    if violations.is_empty() {
        match Extension::new(&base, a1, mu).and_then(|ext| ramification_data(&ext)) {
            Ok(rd) => {
                let fb = check_freeness_bound(&rd);
                if !fb.holds {
                    violations.push(format!(
                        "freeness_bound: (p+1)·b2 - (p-1)·b1 < p²·e0 fails (margin {})",
                        fb.margin
                    ));
                }
                freeness_bound = Some(fb);
            }
            Err(Error::Validation(v)) => violations.extend(v),
            Err(e) => violations.push(e.to_string()),
        }
    }
    let reference_items = reference_items(cfg, &params, &choice2.checks);
    Ok(ValidationReport {
        parameters: params,
        choice1,
        choice2,
        freeness_bound,
        reference_items,
        passed: violations.is_empty(),
        violations,
    })
}

fn require_valid(cfg: &JobConfig) -> Result<ValidationReport> {
    let report = validate(cfg)?;
    if !report.passed {
        return Err(Error::Validation(report.violations));
    }
    Ok(report)
}

/// Everything computed once per working precision.
struct Workspace {
    ext: Arc<Extension>,
    rd: RamificationData,
    tables: ScaffoldTables,
    galois: GaloisData,
    table: PsiTable,
    precision: PrecisionInfo,
}

/// Headroom for the first attempt: a few multiples of the loss
/// `(p-1)·|v2(x2)|` seen in each Newton lift.
fn initial_headroom(params: &Parameters) -> i64 {
    let p = params.p as i64;
    let b1 = -params.v0_a1;
    let b2 = p * p * (-params.v0_mu) + b1;
    4 * (p - 1) * (b2 + (p - 1) * b1) + 2 * p * p
}

impl Workspace {
    fn build(cfg: &JobConfig, params: &Parameters, fault: Option<Fault>, attempt: u32) -> Result<Workspace> {
        let target = cfg.target_precision();
        if target < 1 {
            return Err(Error::Config(format!("precision must be positive, got {target}")));
        }
        let p2 = (cfg.p as i64).pow(2);
        let headroom = initial_headroom(params) << attempt;
        let v0_cap = Integer::div_ceil(&(target + headroom), &p2).max(input_spread(cfg) + 1);
        let base = base_field(cfg, v0_cap)?;
        let ext = Extension::new(&base, cfg.a1.to_k0(&base), cfg.mu.to_k0(&base))?;
        let rd = ramification_data(&ext)?;
        let tables = ScaffoldTables::build(&rd)?;
        let galois = GaloisData::compute(&ext, target, fault)?;
        let rho = uniformizer_k2(&ext, tables.r_b2).mul_pi_power(tables.d0);
        let table = PsiTable::new(&galois, &rho);
        Ok(Workspace {
            ext,
            rd,
            tables,
            galois,
            table,
            precision: PrecisionInfo {
                target,
                headroom,
                v0_cap,
                attempts: attempt + 1,
            },
        })
    }

    fn generator_label(&self) -> String {
        if self.tables.r_b2 == 1 {
            "π2".into()
        } else {
            "ρ0".into()
        }
    }
}

fn precision_limited(e: &Error) -> bool {
    e.exit_code() == 4
}

fn analysis(ws: &Workspace, params: &Parameters) -> Result<AnalysisReport> {
    let structure = associated_order_and_freeness(&ws.rd, &ws.tables, &ws.table, &ws.generator_label())?;
    let g = &ws.galois;
    let galois = GaloisSummary {
        epsilon_valuation: g.epsilon().valuation()?,
        delta_valuation: g.delta().valuation()?,
        c1_valuation: c1(&ws.ext).valuation()?,
        image_precision: g.sigma1.images_precision().min(g.sigma2.images_precision()),
    };
    let rho0 = uniformizer_label(&ws.ext, ws.tables.r_b2);
    Ok(AnalysisReport {
        parameters: params.clone(),
        precision: ws.precision.clone(),
        freeness_bound: check_freeness_bound(&ws.rd),
        ramification: ws.rd.clone(),
        tables: ws.tables.clone(),
        structure,
        rho0: if ws.tables.r_b2 == 1 {
            format!("π2 = {rho0}")
        } else {
            rho0
        },
        galois,
    })
}

/// Ramification data, scaffold tables, associated order, freeness and generator.
pub fn analyze(cfg: &JobConfig, opts: &RunOptions) -> Result<AnalysisReport> {
    let validation = require_valid(cfg)?;
    let params = validation.parameters;
    let mut last = None;
    for attempt in 0..MAX_ATTEMPTS {
        match Workspace::build(cfg, &params, opts.fault, attempt).and_then(|ws| analysis(&ws, &params)) {
            Err(e) if precision_limited(&e) => last = Some(e),
            other => return other,
        }
    }
    Err(last.expect("at least one attempt"))
}

fn to_invariant(c: &Check) -> InvariantCheck {
    InvariantCheck::new(
        c.name.clone(),
        c.holds,
        format!("{}: {} vs {}", c.statement, c.lhs, c.rhs),
    )
}

fn error_check(name: &str, e: &Error) -> InvariantCheck {
    let mut c = InvariantCheck::new(name, false, e.to_string());
    c.indeterminate = precision_limited(e);
    c
}

fn audit_once(ws: &Workspace, params: &Parameters, opts: &RunOptions) -> AuditReport {
    let target = ws.precision.target;
    let sample = opts.sample.unwrap_or(DEFAULT_SAMPLE);
    let seed = opts.seed.unwrap_or(DEFAULT_SEED);
    let g = &ws.galois;
    let ext = &ws.ext;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alphas = scaffold::sample_alphas(ext, sample, &mut rng);
    let elements = scaffold::sample_elements(ext, sample, &mut rng);
    let mut suites = Vec::new();
    let mut skipped = Vec::new();

    let fb = check_freeness_bound(&ws.rd);
    let construction: Vec<InvariantCheck> = ws.rd.checks.iter().map(to_invariant).collect();
    suites.push(SuiteResult::new("construction", construction));
    suites.push(SuiteResult::new("galois", g.checks(target)));
    suites.push(SuiteResult::new(
        "scaffold_law",
        scaffold::scaffold_law_checks(g, &alphas),
    ));
    suites.push(SuiteResult::new("digit_drop", scaffold::digit_drop_checks(g, &ws.rd)));
    let mut growth = scaffold::psi2_growth_checks(g, &alphas);
    growth.extend(scaffold::psi1_power_checks(g, &ws.rd, &lambda(ext, ws.rd.b2)));
    suites.push(SuiteResult::new("psi_powers", growth));
    suites.push(SuiteResult::new(
        "algebra",
        scaffold::algebra_checks(g, &elements, target),
    ));

    if fb.holds {
        let mut structure = Vec::new();
        let rank = normal_basis_rank(&ws.tables, &ws.table);
        structure.push(InvariantCheck::new(
            "normal_basis_rank",
            rank == ws.tables.size(),
            format!("rank {rank} of {}", ws.tables.size()),
        ));
        match associated_order_and_freeness(&ws.rd, &ws.tables, &ws.table, &ws.generator_label()) {
            Ok(rep) => structure.push(InvariantCheck::new(
                "freeness_routes_agree",
                true,
                format!("free = {}", rep.free),
            )),
            Err(e) => structure.push(error_check("freeness_routes_agree", &e)),
        }
        match rho_family(&ws.tables, &ws.table) {
            Ok(rho) => {
                structure.push(InvariantCheck::new("rho_family", true, "v2(ρ_a) = r(𝔟(a)) for all a"));
                structure.extend(congruence_audit(&ws.rd, &ws.tables, g, &rho, target));
            }
            Err(e) => structure.push(error_check("rho_family", &e)),
        }
        suites.push(SuiteResult::new("structure", structure));
    } else {
        skipped.push(format!("structure: freeness bound fails (margin {})", fb.margin));
    }

    let total: usize = suites.iter().map(|s| s.checks.len()).sum();
    let passed: usize = suites.iter().map(|s| s.passed).sum();
    let indeterminate = suites
        .iter()
        .flat_map(|s| &s.checks)
        .filter(|c| c.indeterminate)
        .count();
    AuditReport {
        parameters: params.clone(),
        precision: ws.precision.clone(),
        sample,
        seed,
        fault: opts.fault.map(|f| f.to_string()),
        suites,
        skipped,
        summary: AuditSummary {
            total,
            passed,
            failed: total - passed,
            indeterminate,
            all_pass: total == passed,
        },
    }
}

/// Galois, scaffold and structure invariant suites on seeded samples.
pub fn audit(cfg: &JobConfig, opts: &RunOptions) -> Result<AuditReport> {
    let validation = require_valid(cfg)?;
    let params = validation.parameters;
    let mut last = None;
    for attempt in 0..MAX_ATTEMPTS {
        match Workspace::build(cfg, &params, opts.fault, attempt) {
            Ok(ws) => {
                let report = audit_once(&ws, &params, opts);
                let s = &report.summary;
                let retry = s.indeterminate > 0 && s.failed == s.indeterminate && attempt + 1 < MAX_ATTEMPTS;
                if !retry {
                    return Ok(report);
                }
            }
            Err(e) if precision_limited(&e) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::PrecisionExhausted("audit undecided at every working precision".into())))
}

/// Expected values for the worked example.
#[derive(Clone, Debug, Deserialize)]
pub struct Golden {
    pub b1: i64,
    pub m: i64,
    pub b2: i64,
    pub u2: i64,
    pub b_map: Vec<i64>,
    pub d: Vec<i64>,
    pub w: Vec<i64>,
    pub assoc_order_basis: Vec<String>,
    pub valuation_table: Vec<i64>,
    pub free: bool,
    pub generator: String,
    pub epsilon_valuation: i64,
    pub reference_items: Vec<String>,
}

const GOLDEN_JSON: &str = include_str!("../golden/reference_example.json");

pub fn golden() -> Golden {
    serde_json::from_str(GOLDEN_JSON).expect("embedded golden file parses")
}

fn compare<T: std::fmt::Debug + PartialEq>(name: &str, expected: T, actual: T) -> GoldenComparison {
    GoldenComparison {
        name: name.into(),
        matches: expected == actual,
        expected: format!("{expected:?}"),
        actual: format!("{actual:?}"),
    }
}

/// Runs the worked example and diffs it against the embedded golden tables.
pub fn reproduce_example(precision: Option<i64>, opts: &RunOptions) -> Result<ReproductionReport> {
    let cfg = reference_config(precision);
    let validation = validate(&cfg)?;
    let analysis = analyze(&cfg, opts)?;
    let gold = golden();
    let r = &analysis.ramification;
    let t = &analysis.tables;
    let s = &analysis.structure;
    let mut sorted = s.valuation_table.clone();
    sorted.sort_unstable();
    let items: Vec<String> = validation
        .reference_items
        .iter()
        .map(|i| match i.status {
            ItemStatus::InconsistentAsPrinted => format!("{}: inconsistent", i.name),
            _ => format!("{}: {}", i.name, i.comparison()),
        })
        .collect();
    let replacement_ok = validation
        .reference_items
        .iter()
        .flat_map(|i| &i.replaced_by)
        .all(|c| c.holds);
    let comparisons = vec![
        compare("b1", gold.b1, r.b1),
        compare("m", gold.m, r.m),
        compare("b2", gold.b2, r.b2),
        compare("u2", gold.u2, r.u2),
        compare("b_map", gold.b_map.clone(), t.b_map.clone()),
        compare("d", gold.d.clone(), t.d.clone()),
        compare("w", gold.w.clone(), t.w.clone()),
        compare(
            "assoc_order_basis",
            gold.assoc_order_basis.clone(),
            s.assoc_order_basis.iter().map(|b| b.label.clone()).collect(),
        ),
        compare(
            "valuation_table",
            gold.valuation_table.clone(),
            s.valuation_table.clone(),
        ),
        compare("valuation_set", (0..9).collect::<Vec<i64>>(), sorted),
        compare("free", gold.free, s.free),
        compare("generator", Some(gold.generator.clone()), s.generator.clone()),
        compare(
            "epsilon_valuation",
            gold.epsilon_valuation,
            analysis.galois.epsilon_valuation,
        ),
        compare("reference_items", gold.reference_items.clone(), items),
        compare("replacement_bounds_hold", true, replacement_ok),
    ];
    let all_match = comparisons.iter().all(|c| c.matches);
    Ok(ReproductionReport {
        validation,
        analysis,
        comparisons,
        all_match,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::MonomialSpec;

    #[test]
    fn reference_validation_items() {
        let rep = validate(&JobConfig::reference_example()).unwrap();
        assert!(rep.passed, "{:?}", rep.violations);
        let cmp: Vec<String> = rep.reference_items.iter().map(|i| i.comparison()).collect();
        assert_eq!(cmp[0], "-18/8 < -1");
        assert_eq!(cmp[1], "-1/3 < -3");
        assert_eq!(cmp[2], "54 > 38");
        assert_eq!(cmp[3], "6 > 46/9");
        assert_eq!(rep.reference_items[1].status, ItemStatus::InconsistentAsPrinted);
        assert_eq!(rep.reference_items[1].printed.as_deref(), Some("-10/3 < -3"));
        assert_eq!(rep.reference_items[1].replaced_by.len(), 2);
        assert!(rep.reference_items[1].replaced_by.iter().all(|c| c.holds));
    }

    #[test]
    fn negative_control_names_the_bound() {
        let mut cfg = JobConfig::reference_example();
        cfg.a1 = MonomialSpec::new(1, -2);
        let rep = validate(&cfg).unwrap();
        assert!(!rep.passed);
        assert!(
            rep.violations.iter().any(|v| v.starts_with("mu_second_bound")),
            "{:?}",
            rep.violations
        );
        let mut cfg = JobConfig::reference_example();
        cfg.mu = MonomialSpec::new(1, 0);
        assert!(!validate(&cfg).unwrap().passed);
    }

    #[test]
    fn coefficient_shifts_valuation() {
        let mut cfg = JobConfig::reference_example();
        cfg.a1 = MonomialSpec::new(3, -7);
        let rep = validate(&cfg).unwrap();
        assert_eq!(rep.parameters.v0_a1, -1);
        assert!(rep.passed, "{:?}", rep.violations);
    }

    #[test]
    fn p2_analysis_is_free() {
        let cfg = JobConfig {
            p: 2,
            e0: 4,
            ..JobConfig::reference_example()
        };
        let rep = analyze(&cfg, &RunOptions::default()).unwrap();
        assert_eq!(rep.ramification.b2, 5);
        assert!(rep.structure.free);
        assert_eq!(rep.structure.generator.as_deref(), Some("π2"));
    }
}
