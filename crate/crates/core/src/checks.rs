use serde::{Deserialize, Serialize};

use crate::tower::ValuationBound;

/// Outcome of one numerical invariant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantCheck {
    pub name: String,
    pub holds: bool,
    pub detail: String,
    /// failed only because the available precision could not decide it
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub indeterminate: bool,
}

impl InvariantCheck {
    pub fn new(name: impl Into<String>, holds: bool, detail: impl Into<String>) -> Self {
        InvariantCheck {
            name: name.into(),
            holds,
            detail: detail.into(),
            indeterminate: false,
        }
    }

    fn undecided(mut self, flag: bool) -> Self {
        self.indeterminate = !self.holds && flag;
        self
    }

    /// Passes when the difference is zero to its precision and that precision
    /// reaches `min_precision`.
    pub fn vanishes(name: impl Into<String>, diff: ValuationBound, min_precision: i64) -> Self {
        match diff {
            ValuationBound::AtLeast(prec) => InvariantCheck::new(
                name,
                prec >= min_precision,
                format!("zero to v2-precision {prec} (required {min_precision})"),
            )
            .undecided(true),
            ValuationBound::Exact(v) => InvariantCheck::new(name, false, format!("nonzero: difference has v2 = {v}")),
        }
    }

    /// Passes when `v2 >= bound` is certain.
    pub fn at_least(name: impl Into<String>, val: ValuationBound, bound: i64) -> Self {
        let holds = val.lower() >= bound;
        InvariantCheck::new(name, holds, format!("v2 = {val}, required >= {bound}"))
            .undecided(matches!(val, ValuationBound::AtLeast(_)))
    }

    /// Passes when `v2 == expected` exactly.
    pub fn exact(name: impl Into<String>, val: ValuationBound, expected: i64) -> Self {
        let holds = val == ValuationBound::Exact(expected);
        let open = matches!(val, ValuationBound::AtLeast(prec) if prec <= expected);
        InvariantCheck::new(name, holds, format!("v2 = {val}, expected {expected}")).undecided(open)
    }
}

pub fn all_hold(checks: &[InvariantCheck]) -> bool {
    checks.iter().all(|c| c.holds)
}

pub fn failures(checks: &[InvariantCheck]) -> Vec<String> {
    checks
        .iter()
        .filter(|c| !c.holds)
        .map(|c| format!("{}: {}", c.name, c.detail))
        .collect()
}
