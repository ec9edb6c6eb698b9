//! Admissibility of the parameters `a1`, `μ` and the ramification data they
//! determine. All inequalities are checked in exact rational arithmetic.

use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{wp_membership_guard, BaseField, K0Element};
use crate::tower::Extension;

/// Exact rational, serialized as `"n/d"` (or `"n"`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Fraction(pub Ratio<i64>);

impl Fraction {
    pub fn new(n: i64, d: i64) -> Self {
        Fraction(Ratio::new(n, d))
    }
    pub fn int(n: i64) -> Self {
        Fraction(Ratio::from_integer(n))
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl Serialize for Fraction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Fraction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let parse = |t: &str| t.trim().parse::<i64>().map_err(serde::de::Error::custom);
        match s.split_once('/') {
            Some((n, den)) => {
                let den = parse(den)?;
                if den == 0 {
                    return Err(serde::de::Error::custom("zero denominator"));
                }
                Ok(Fraction::new(parse(n)?, den))
            }
            None => Ok(Fraction::int(parse(&s)?)),
        }
    }
}

/// One named inequality `lhs op rhs` with its outcome.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub statement: String,
    pub lhs: Fraction,
    pub rhs: Fraction,
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn less(name: &str, statement: &str, lhs: Fraction, rhs: Fraction) -> Self {
        Check {
            name: name.into(),
            statement: statement.into(),
            lhs,
            rhs,
            holds: lhs < rhs,
            note: None,
        }
    }

    fn flag(name: &str, statement: &str, holds: bool) -> Self {
        Check {
            name: name.into(),
            statement: statement.into(),
            lhs: Fraction::int(holds as i64),
            rhs: Fraction::int(1),
            holds,
            note: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChoiceReport {
    pub checks: Vec<Check>,
}

impl ChoiceReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    /// `"name: statement"` for every failed check.
    pub fn violations(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.holds)
            .map(|c| format!("{}: {}", c.name, c.statement))
            .collect()
    }
}

/// Admissibility of `a1`: negative valuation prime to `p`, above
/// `-p·e0/(p²-1)`, and not of the form `℘(y)`.
pub fn validate_choice1(a1: &K0Element, base: &Arc<BaseField>) -> ChoiceReport {
    let p = base.p() as i64;
    let e0 = base.e0() as i64;
    let mut checks = Vec::new();
    let v = match a1.valuation() {
        Ok(v) => v,
        Err(_) => {
            checks.push(Check::flag("a1_nonzero", "a1 must be nonzero", false));
            return ChoiceReport { checks };
        }
    };
    checks.push(Check::less(
        "a1_negative",
        "v0(a1) < 0",
        Fraction::int(v),
        Fraction::int(0),
    ));
    checks.push(Check::flag(
        "a1_prime_to_p",
        "p does not divide v0(a1)",
        v.rem_euclid(p) != 0,
    ));
    checks.push(Check::less(
        "a1_lower_bound",
        "-p·e0/(p²-1) < v0(a1)",
        Fraction::new(-p * e0, p * p - 1),
        Fraction::int(v),
    ));
    let mut wp = Check::flag(
        "a1_not_artin_schreier",
        "a1 is not of the form y^p - y with y in K0",
        false,
    );
    match wp_membership_guard(a1) {
        Ok(b) => {
            wp.holds = b;
            wp.lhs = Fraction::int(b as i64);
        }
        Err(e) => wp.note = Some(e.to_string()),
    }
    checks.push(wp);
    ChoiceReport { checks }
}

/// Admissibility of `μ` given `a1`, with `m = -v0(μ)`.
pub fn validate_choice2(mu: &K0Element, a1: &K0Element, base: &Arc<BaseField>) -> ChoiceReport {
    let p = base.p() as i64;
    let e0 = base.e0() as i64;
    let mut checks = Vec::new();
    let (m, v) = match (mu.valuation(), a1.valuation()) {
        (Ok(vm), Ok(va)) => (-vm, va),
        _ => {
            checks.push(Check::flag("mu_nonzero", "mu and a1 must be nonzero", false));
            return ChoiceReport { checks };
        }
    };
    checks.push(Check::less(
        "mu_negative",
        "m = -v0(mu) > 0",
        Fraction::int(0),
        Fraction::int(m),
    ));
    // p·m - (2 + 1/(p(p-1)))·v0(a1) < p·e0/(p-1)
    let lhs = Fraction(Ratio::from_integer(p * m) - (Ratio::from_integer(2) + Ratio::new(1, p * (p - 1))) * v);
    checks.push(Check::less(
        "mu_first_bound",
        "p·m - (2 + 1/(p(p-1)))·v0(a1) < p·e0/(p-1)",
        lhs,
        Fraction::new(p * e0, p - 1),
    ));
    checks.push(Check::less(
        "mu_second_bound",
        "-(p²-1)·v0(a1) < p²·m",
        Fraction::int(-(p * p - 1) * v),
        Fraction::int(p * p * m),
    ));
    ChoiceReport { checks }
}

/// Ramification invariants of `K2/K0`. `u1, u2` are upper numbers, `b1, b2`
/// lower numbers; `depth = (p-1)·b2 + p(p-1)·b1` is the `v2`-valuation of
/// the different minus `p² - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamificationData {
    pub p: u32,
    pub e0: u32,
    pub b1: i64,
    pub m: i64,
    pub b2: i64,
    pub u1: i64,
    pub u2: i64,
    pub depth: i64,
    pub different_valuation: i64,
    pub precision_c: i64,
    /// least non-negative residue of `b2` modulo `p²`
    pub r_b2: i64,
    pub checks: Vec<Check>,
}

/// Scaffold precision `𝔠 = min{b2 - p²b1, p²e0 - (p-1)·b2 - p(p-1)·b1}`.
pub fn precision_constant(p: i64, e0: i64, b1: i64, b2: i64) -> i64 {
    (b2 - p * p * b1).min(p * p * e0 - (p - 1) * b2 - p * (p - 1) * b1)
}

pub fn ramification_data(ext: &Extension) -> Result<RamificationData> {
    let p = ext.p() as i64;
    let p2 = p * p;
    let e0 = ext.e0();
    let (b1, b2, m) = (ext.b1(), ext.b2(), ext.m());
    let u1 = b1;
    let u2 = -ext.a2().valuation()?;
    let depth = (p - 1) * b2 + p * (p - 1) * b1;
    let mut checks = vec![
        Check::flag(
            "lower_numbers_congruent",
            "b1 ≡ b2 (mod p²)",
            (b2 - b1).rem_euclid(p2) == 0,
        ),
        Check::flag("upper_number_formula", "u2 = -v0(a2) = p·m + b1", u2 == p * m + b1),
        Check::flag("upper_from_lower", "u2 = u1 + (b2 - b1)/p", p * (u2 - u1) == b2 - b1),
        Check::less(
            "lower_numbers_increase",
            "p²·b1 < b2",
            Fraction::int(p2 * b1),
            Fraction::int(b2),
        ),
        Check::less(
            "depth_bound",
            "(p-1)·b2 + p(p-1)·b1 < (p²+1)/(p²+p) · p²e0",
            Fraction::int(depth),
            Fraction(Ratio::new(p2 + 1, p2 + p) * (p2 * e0)),
        ),
        Check::less(
            "combined_valuation_bound",
            "-p·e0/(p-1) < v0(a1) + v0(a2)",
            Fraction::new(-p * e0, p - 1),
            Fraction::int(-b1 - u2),
        ),
    ];
    let precision_c = precision_constant(p, e0, b1, b2);
    checks.push(Check::less(
        "precision_positive",
        "𝔠 >= 1",
        Fraction::int(0),
        Fraction::int(precision_c),
    ));
    let rd = RamificationData {
        p: ext.p(),
        e0: e0 as u32,
        b1,
        m,
        b2,
        u1,
        u2,
        depth,
        different_valuation: depth + p2 - 1,
        precision_c,
        r_b2: b2.rem_euclid(p2),
        checks,
    };
    if let Some(bad) = rd.checks.iter().find(|c| !c.holds) {
        return Err(Error::InvariantViolation(format!("{}: {}", bad.name, bad.statement)));
    }
    Ok(rd)
}

/// The freeness hypothesis `p²e0 > (p+1)·b2 - (p-1)·b1` and quantities
/// reported alongside it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreenessBound {
    /// `p²e0 - (p+1)·b2 + (p-1)·b1`; the bound holds iff this is positive
    pub margin: i64,
    pub holds: bool,
    /// `p²e0 - p·b2 - (p²-p+1)·b1 > p²`, implied by the bound for `p` odd
    pub scaffold_tolerance: Check,
    /// `e0 > u2 + b1/p² + 1`, the bound in upper-number form
    pub upper_number_form: Check,
    pub checks: Vec<Check>,
}

pub fn check_freeness_bound(rd: &RamificationData) -> FreenessBound {
    let p = rd.p as i64;
    let p2 = p * p;
    let e0 = rd.e0 as i64;
    let margin = p2 * e0 - (p + 1) * rd.b2 + (p - 1) * rd.b1;
    let main = Check::less(
        "freeness_bound",
        "(p+1)·b2 - (p-1)·b1 < p²·e0",
        Fraction::int((p + 1) * rd.b2 - (p - 1) * rd.b1),
        Fraction::int(p2 * e0),
    );
    let scaffold_tolerance = Check::less(
        "scaffold_tolerance",
        "p² < p²e0 - p·b2 - (p²-p+1)·b1",
        Fraction::int(p2),
        Fraction::int(p2 * e0 - p * rd.b2 - (p2 - p + 1) * rd.b1),
    );
    let upper_number_form = Check::less(
        "upper_number_form",
        "u2 + b1/p² + 1 < e0",
        Fraction(Ratio::from_integer(rd.u2 + 1) + Ratio::new(rd.b1, p2)),
        Fraction::int(e0),
    );
    FreenessBound {
        margin,
        holds: margin > 0,
        scaffold_tolerance: scaffold_tolerance.clone(),
        upper_number_form: upper_number_form.clone(),
        checks: vec![main, scaffold_tolerance, upper_number_form],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::BaseField;

    fn base(p: u32, e0: u32) -> Arc<BaseField> {
        BaseField::new(p, e0, 30).unwrap()
    }

    #[test]
    fn fraction_round_trip() {
        for f in [Fraction::new(-10, 3), Fraction::int(7), Fraction::new(4, 8)] {
            let s = serde_json::to_string(&f).unwrap();
            assert_eq!(serde_json::from_str::<Fraction>(&s).unwrap(), f);
        }
        assert_eq!(Fraction::new(-1, 3).to_string(), "-1/3");
    }

    #[test]
    fn example_choices_pass() {
        let b = base(3, 6);
        let a1 = K0Element::pi_power(&b, -1);
        let mu = K0Element::pi_power(&b, -1);
        assert!(validate_choice1(&a1, &b).passed());
        assert!(validate_choice2(&mu, &a1, &b).passed());
    }

    #[test]
    fn negative_controls_name_the_inequality() {
        let b = base(3, 6);
        let a1 = K0Element::pi_power(&b, -1);
        // m = 2: p²m = 18 > 8 still, but 3·2 + 7/3 = 25/3 < 9 holds; m = 3: 9 + 7/3 > 9 fails
        let mu = K0Element::pi_power(&b, -3);
        let r = validate_choice2(&mu, &a1, &b);
        assert_eq!(r.violations().len(), 1);
        assert!(r.violations()[0].starts_with("mu_first_bound"));

        let a1 = K0Element::pi_power(&b, -3);
        let r = validate_choice1(&a1, &b);
        assert!(r.violations().iter().any(|v| v.starts_with("a1_prime_to_p")));
        let a1 = K0Element::pi_power(&b, 2);
        let r = validate_choice1(&a1, &b);
        assert!(r.violations().iter().any(|v| v.starts_with("a1_negative")));
        // -18/8 < v0(a1) fails for v0 = -4 (and p ∤ 4)
        let a1 = K0Element::pi_power(&b, -4);
        assert!(validate_choice1(&a1, &b)
            .violations()
            .iter()
            .any(|v| v.starts_with("a1_lower_bound")));
    }

    #[test]
    fn example_ramification_data() {
        let b = base(3, 6);
        let ext = Extension::new(&b, K0Element::pi_power(&b, -1), K0Element::pi_power(&b, -1)).unwrap();
        let rd = ramification_data(&ext).unwrap();
        assert_eq!((rd.b1, rd.b2, rd.u1, rd.u2), (1, 10, 1, 4));
        assert_eq!(rd.depth, 26);
        assert_eq!(rd.different_valuation, 34);
        assert_eq!(rd.precision_c, 1);
        assert_eq!(rd.r_b2, 1);
        let fb = check_freeness_bound(&rd);
        assert!(fb.holds);
        assert_eq!(fb.margin, 54 - 40 + 2);
        assert!(fb.upper_number_form.holds);
        assert!(fb.scaffold_tolerance.holds);
    }

    #[test]
    fn p2_bound_holds_but_alternate_forms_do_not() {
        let b = base(2, 4);
        let ext = Extension::new(&b, K0Element::pi_power(&b, -1), K0Element::pi_power(&b, -1)).unwrap();
        let rd = ramification_data(&ext).unwrap();
        assert_eq!((rd.b2, rd.precision_c), (5, 1));
        let fb = check_freeness_bound(&rd);
        assert_eq!(fb.margin, 2);
        assert!(fb.holds);
        assert!(!fb.upper_number_form.holds);
        assert!(!fb.scaffold_tolerance.holds);
    }
}
