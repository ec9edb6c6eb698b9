//! End-to-end acceptance criteria. Run with
//! `cargo test -p wittscaffold --test acceptance -- --nocapture` to see the
//! PASS/FAIL table.

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wittscaffold::checks::{failures, InvariantCheck};
use wittscaffold::construction::ramification_data;
use wittscaffold::galois::GaloisData;
use wittscaffold::padic::{BaseField, K0Element, PadicInt};
use wittscaffold::pipeline::{self, RunOptions};
use wittscaffold::report::ItemStatus;
use wittscaffold::scaffold::{digit_drop_checks, sample_alphas, scaffold_law_checks};
use wittscaffold::structure::{congruence_audit, rho_family, PsiTable, ScaffoldTables};
use wittscaffold::tower::{uniformizer_k2, Extension};
use wittscaffold::witt::{Witt2, WittVector2};

use common::{TruncPoly, TRUNC_LEN};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn no_failures(checks: &[InvariantCheck]) -> Result<(), String> {
    let bad = failures(checks);
    ensure(bad.is_empty(), || {
        format!(
            "{} failing: {}",
            bad.len(),
            bad.iter().take(4).cloned().collect::<Vec<_>>().join("; ")
        )
    })
}

/// Reference extension at absolute `v0`-precision `cap`.
fn reference_extension(cap: i64) -> std::sync::Arc<Extension> {
    let base = BaseField::new(3, 6, cap).unwrap();
    Extension::new(&base, K0Element::pi_power(&base, -1), K0Element::pi_power(&base, -1)).unwrap()
}

/// Writes past the test harness capture so the verdicts land in every test log.
fn report(line: String) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

fn golden_reproduction() -> Outcome {
    let rep = pipeline::analyze(&common::reference(), &RunOptions::default()).map_err(|e| e.to_string())?;
    ensure(rep.precision.target == 108, || {
        format!("target precision {}", rep.precision.target)
    })?;
    let r = &rep.ramification;
    ensure((r.b1, r.m, r.b2, r.u2) == (1, 1, 10, 4), || {
        format!("(b1, m, b2, u2) = {:?}", (r.b1, r.m, r.b2, r.u2))
    })?;
    ensure(rep.tables.d == [1, 1, 1, 2, 2, 2, 3, 3, 4], || {
        format!("d = {:?}", rep.tables.d)
    })?;
    ensure(rep.tables.w == [0, 0, 0, 1, 1, 1, 2, 2, 3], || {
        format!("w = {:?}", rep.tables.w)
    })?;
    let labels: Vec<&str> = rep
        .structure
        .assoc_order_basis
        .iter()
        .map(|b| b.label.as_str())
        .collect();
    let expected = [
        "1",
        "Ψ1",
        "Ψ1^2",
        "π0^-1·Ψ2",
        "π0^-1·Ψ1·Ψ2",
        "π0^-1·Ψ1^2·Ψ2",
        "π0^-2·Ψ2^2",
        "π0^-2·Ψ1·Ψ2^2",
        "π0^-3·Ψ1^2·Ψ2^2",
    ];
    ensure(labels == expected, || format!("basis = {labels:?}"))?;
    let table = &rep.structure.valuation_table;
    ensure(*table == [1, 4, 7, 2, 5, 8, 3, 6, 0], || {
        format!("valuations = {table:?}")
    })?;
    let mut sorted = table.clone();
    sorted.sort_unstable();
    ensure(sorted == (0..9).collect::<Vec<_>>(), || {
        format!("valuation set = {sorted:?}")
    })?;
    ensure(
        rep.structure.free && rep.structure.generator.as_deref() == Some("π2"),
        || {
            format!(
                "free = {}, generator = {:?}",
                rep.structure.free, rep.structure.generator
            )
        },
    )?;
    let repro = pipeline::reproduce_example(None, &RunOptions::default()).map_err(|e| e.to_string())?;
    let bad: Vec<&str> = repro
        .comparisons
        .iter()
        .filter(|c| !c.matches)
        .map(|c| c.name.as_str())
        .collect();
    ensure(repro.all_match, || format!("golden mismatches: {bad:?}"))?;
    Ok(format!(
        "b2 = 10, valuations {table:?}, {} golden comparisons",
        repro.comparisons.len()
    ))
}

fn bound_checks() -> Outcome {
    // independent rational oracle
    let q = |n: i64, d: i64| Ratio::new(n, d);
    ensure(
        q(-18, 8) < q(-1, 1) && q(54, 1) > q(38, 1) && q(6, 1) > q(46, 9),
        || "oracle".into(),
    )?;
    let rep = pipeline::validate(&common::reference()).map_err(|e| e.to_string())?;
    ensure(rep.passed, || format!("violations {:?}", rep.violations))?;
    let items = &rep.reference_items;
    for (k, want) in [(0, "-18/8 < -1"), (2, "54 > 38"), (3, "6 > 46/9")] {
        ensure(
            items[k].comparison() == want && items[k].status == ItemStatus::Holds,
            || format!("item {} = {} ({:?})", k + 1, items[k].comparison(), items[k].status),
        )?;
    }
    let second = &items[1];
    ensure(second.status == ItemStatus::InconsistentAsPrinted, || {
        format!("{:?}", second.status)
    })?;
    ensure(second.printed.as_deref() == Some("-10/3 < -3"), || {
        format!("{:?}", second.printed)
    })?;
    ensure(second.comparison() == "-1/3 < -3", || second.comparison())?;
    let names: Vec<&str> = second.replaced_by.iter().map(|c| c.name.as_str()).collect();
    ensure(names == ["mu_first_bound", "mu_second_bound"], || format!("{names:?}"))?;
    ensure(second.replaced_by.iter().all(|c| c.holds), || {
        "replacement bounds fail".into()
    })?;
    Ok("3 comparisons exact, evaluated value -1/3 differs from printed -10/3".into())
}

fn witt_laws() -> Outcome {
    let mut count = 0usize;
    for p in [3u32, 2] {
        let w = Witt2::new(p);
        let n = (p * p) as i64;
        let all: Vec<WittVector2<PadicInt>> = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .map(|(a, b)| WittVector2::new(PadicInt::new(p, a, 2), PadicInt::new(p, b, 2)))
            .collect();
        let zero = WittVector2::new(PadicInt::zero(p, 2), PadicInt::zero(p, 2));
        for x in &all {
            ensure(w.add(x, &zero) == *x, || format!("identity fails at p={p}"))?;
            ensure(w.add(x, &w.neg(x)) == zero, || format!("inverse fails at p={p}"))?;
            for y in &all {
                let xy = w.add(x, y);
                ensure(xy == w.add(y, x), || format!("commutativity fails at p={p}"))?;
                for z in &all {
                    ensure(w.add(&xy, z) == w.add(x, &w.add(y, z)), || {
                        format!("associativity fails at p={p}")
                    })?;
                    count += 1;
                }
            }
        }
        // p-fold sum of (1, 0) over Z, reduced mod p
        let one = WittVector2::new(BigInt::from(1), BigInt::from(0));
        let mut s = one.clone();
        for _ in 1..p {
            s = w.add(&s, &one);
        }
        let red = |x: &BigInt| ((x % p) + p) % p;
        ensure(
            red(&s.first) == BigInt::from(0) && red(&s.second) == BigInt::from(1),
            || format!("p-fold sum at p={p} is ({}, {})", s.first, s.second),
        )?;
    }
    // Frobenius is additive over rings of characteristic p
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut samples = 0;
    for p in [2u64, 3, 5] {
        let w = Witt2::new(p as u32);
        let mut draw = || {
            let mut v = || TruncPoly::new(p, (0..TRUNC_LEN).map(|_| rng.gen_range(0..p)).collect());
            WittVector2::new(v(), v())
        };
        for _ in 0..400 {
            let (x, y) = (draw(), draw());
            let lhs = w.frobenius(&w.add(&x, &y));
            let rhs = w.add(&w.frobenius(&x), &w.frobenius(&y));
            ensure(lhs == rhs, || format!("Frobenius not additive at p={p}"))?;
            samples += 1;
        }
    }
    Ok(format!("{count} associativity triples, {samples} Frobenius samples"))
}

fn galois_correctness() -> Outcome {
    let ext = reference_extension(26);
    let g = GaloisData::compute(&ext, 108, None).map_err(|e| e.to_string())?;
    let checks = g.checks(108);
    no_failures(&checks)?;
    for name in [
        "sigma1_x1_artin_schreier",
        "sigma1_x2_artin_schreier",
        "epsilon_valuation",
        "sigma1_power_p_equals_sigma2",
        "sigma1_order_p_squared",
        "trace_k2_k1_delta",
    ] {
        ensure(checks.iter().any(|c| c.name == name && c.holds), || {
            format!("missing check {name}")
        })?;
    }
    let eps = g.epsilon().valuation().map_err(|e| e.to_string())?;
    ensure(eps == 48, || format!("v2(ε) = {eps}"))?;
    Ok(format!("{} checks at v2-precision 108, v2(ε) = 48", checks.len()))
}

fn scaffold_law() -> Outcome {
    let ext = reference_extension(26);
    let rd = ramification_data(&ext).map_err(|e| e.to_string())?;
    let g = GaloisData::compute(&ext, 108, None).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let alphas = sample_alphas(&ext, 24, &mut rng);
    for a in &alphas {
        let v = a.valuation().map_err(|e| e.to_string())?;
        ensure((v - rd.b2).rem_euclid(9) == 0, || format!("sample valuation {v}"))?;
    }
    let law = scaffold_law_checks(&g, &alphas);
    ensure(law.len() == 24 * 9, || format!("{} law checks", law.len()))?;
    no_failures(&law)?;
    let drop = digit_drop_checks(&g, &rd);
    ensure(drop.len() == 18, || format!("{} digit-drop checks", drop.len()))?;
    no_failures(&drop)?;
    Ok(format!(
        "{} exact valuations on 24 samples, 9 residues x 2 operators",
        law.len()
    ))
}

fn congruences() -> Outcome {
    let ext = reference_extension(30);
    let rd = ramification_data(&ext).map_err(|e| e.to_string())?;
    let tables = ScaffoldTables::build(&rd).map_err(|e| e.to_string())?;
    let g = GaloisData::compute(&ext, 108, None).map_err(|e| e.to_string())?;
    let rho = uniformizer_k2(&ext, tables.r_b2).mul_pi_power(tables.d0);
    let table = PsiTable::new(&g, &rho);
    let family = rho_family(&tables, &table).map_err(|e| e.to_string())?;
    let audit = congruence_audit(&rd, &tables, &g, &family, 108);
    no_failures(&audit)?;
    let n = tables.size();
    let mut exact = 0;
    for j in 0..n {
        for r in 0..n - j {
            if tables.carries(j, r) {
                continue;
            }
            for kind in ["first_congruence", "second_congruence"] {
                let name = format!("{kind}[j={j},r={r}]");
                let c = audit
                    .iter()
                    .find(|c| c.name == name)
                    .ok_or_else(|| format!("missing {name}"))?;
                ensure(c.holds && c.detail.starts_with("zero to"), || {
                    format!("{name}: {}", c.detail)
                })?;
                exact += 1;
            }
        }
    }
    Ok(format!("{} checks, {exact} carry-free equalities", audit.len()))
}

fn second_scenario() -> Outcome {
    let cfg = common::second_scenario();
    let val = pipeline::validate(&cfg).map_err(|e| e.to_string())?;
    let fb = val.freeness_bound.as_ref().ok_or("no freeness bound")?;
    ensure(val.passed && fb.margin == 2, || {
        format!("passed {}, margin {}", val.passed, fb.margin)
    })?;
    let rep = pipeline::analyze(&cfg, &RunOptions::default()).map_err(|e| e.to_string())?;
    let r = &rep.ramification;
    ensure(r.b2 == 5 && r.r_b2 == 1, || {
        format!("b2 = {}, r(b2) = {}", r.b2, r.r_b2)
    })?;
    ensure(rep.structure.routes.residue_divides && rep.structure.free, || {
        "not free".into()
    })?;
    ensure(rep.structure.generator.as_deref() == Some("π2"), || {
        format!("{:?}", rep.structure.generator)
    })?;
    let audit = pipeline::audit(
        &cfg,
        &RunOptions {
            sample: Some(20),
            seed: Some(1),
            fault: None,
        },
    )
    .map_err(|e| e.to_string())?;
    let names: Vec<String> = audit.failures().map(|c| c.name.clone()).take(4).collect();
    ensure(audit.summary.all_pass, || format!("audit failures {names:?}"))?;
    Ok(format!(
        "b2 = 5, margin 2, free via π2, {} audit checks",
        audit.summary.total
    ))
}

fn negative_control() -> Outcome {
    let rep = pipeline::validate(&common::negative_control()).map_err(|e| e.to_string())?;
    ensure(!rep.passed, || "accepted".into())?;
    ensure(rep.violations.iter().any(|v| v.starts_with("mu_second_bound")), || {
        format!("{:?}", rep.violations)
    })?;
    let (_dir, path) = common::write_config(&common::negative_control());
    let out = common::run_cli(&["validate", "--config", path.to_str().unwrap()]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    ensure(out.status.code() == Some(2), || format!("exit {:?}", out.status.code()))?;
    ensure(stdout.contains("violation: mu_second_bound"), || {
        "CLI output does not name the bound".into()
    })?;
    Ok("rejected with mu_second_bound, exit 2".into())
}

struct Criterion {
    id: u32,
    title: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

#[test]
fn acceptance_suite() {
    let criteria = [
        Criterion {
            id: 1,
            title: "worked example golden reproduction",
            budget: Some(Duration::from_secs(120)),
            run: golden_reproduction,
        },
        Criterion {
            id: 2,
            title: "bound comparisons",
            budget: None,
            run: bound_checks,
        },
        Criterion {
            id: 3,
            title: "Witt ring laws",
            budget: None,
            run: witt_laws,
        },
        Criterion {
            id: 4,
            title: "Galois correctness",
            budget: Some(Duration::from_secs(60)),
            run: galois_correctness,
        },
        Criterion {
            id: 5,
            title: "scaffold valuation law",
            budget: None,
            run: scaffold_law,
        },
        Criterion {
            id: 6,
            title: "congruence audit",
            budget: None,
            run: congruences,
        },
        Criterion {
            id: 7,
            title: "second scenario p=2",
            budget: Some(Duration::from_secs(30)),
            run: second_scenario,
        },
        Criterion {
            id: 8,
            title: "negative control",
            budget: None,
            run: negative_control,
        },
    ];
    let mut failed = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let mut outcome = (c.run)();
        let elapsed = start.elapsed();
        if let (Ok(_), Some(budget)) = (&outcome, c.budget) {
            if elapsed > budget {
                outcome = Err(format!("took {elapsed:?}, budget {budget:?}"));
            }
        }
        match &outcome {
            Ok(detail) => report(format!(
                "criterion {} {}: PASS ({detail}; {:.2?})",
                c.id, c.title, elapsed
            )),
            Err(why) => {
                report(format!("criterion {} {}: FAIL ({why}; {:.2?})", c.id, c.title, elapsed));
                failed.push(c.id);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
