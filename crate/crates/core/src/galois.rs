//! The cyclic group `Gal(K2/K0) = <σ1>` of order `p²`, realized by Newton
//! lifting of the generator images, and the group-algebra operators built
//! from it.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::checks::InvariantCheck;
use crate::error::{Error, Result};
use crate::padic::K0Element;
use crate::tower::{hensel_lift, trace_over, Extension, K2Element, ValuationBound};
use crate::witt::Witt2;

/// A `K0`-automorphism of `K2`, given by the images of `x1` and `x2`.
#[derive(Clone)]
pub struct Automorphism {
    label: String,
    image_x1: K2Element,
    image_x2: K2Element,
    /// `(σx1)^i (σx2)^j`, index `i·p + j`
    images: Vec<K2Element>,
}

impl Automorphism {
    pub fn new(label: impl Into<String>, image_x1: K2Element, image_x2: K2Element) -> Self {
        let ext = image_x1.ext().clone();
        let p = ext.p() as usize;
        let mut pow1 = vec![K2Element::one(&ext)];
        let mut pow2 = vec![K2Element::one(&ext)];
        for k in 1..p {
            pow1.push(&pow1[k - 1] * &image_x1);
            pow2.push(&pow2[k - 1] * &image_x2);
        }
        let mut images = Vec::with_capacity(p * p);
        for a in &pow1 {
            for b in &pow2 {
                images.push(a * b);
            }
        }
        Automorphism {
            label: label.into(),
            image_x1,
            image_x2,
            images,
        }
    }

    pub fn identity(ext: &Arc<Extension>) -> Self {
        Automorphism::new("id", K2Element::x1(ext), K2Element::x2(ext))
    }

    pub fn label(&self) -> &str {
        &self.label
    }
    pub fn image_x1(&self) -> &K2Element {
        &self.image_x1
    }
    pub fn image_x2(&self) -> &K2Element {
        &self.image_x2
    }
    pub fn ext(&self) -> &Arc<Extension> {
        self.image_x1.ext()
    }

    /// Substitutes the generator images into `x`; `K0` coefficients are fixed.
    pub fn apply(&self, x: &K2Element) -> K2Element {
        let mut acc = K2Element::zero(self.ext());
        for (c, img) in x.x_coeffs().iter().zip(&self.images) {
            if c.is_zero() && c.precision() >= c.field().cap() {
                continue;
            }
            acc = &acc + &img.scale(c);
        }
        acc
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Automorphism) -> Automorphism {
        Automorphism::new(
            format!("{}∘{}", self.label, other.label),
            self.apply(&other.image_x1),
            self.apply(&other.image_x2),
        )
    }

    pub fn power(&self, n: u32) -> Automorphism {
        let mut acc = Automorphism::identity(self.ext());
        for _ in 0..n {
            acc = self.compose(&acc);
        }
        acc.label = format!("{}^{n}", self.label);
        acc
    }

    /// `min(v2(σx1 - τx1), v2(σx2 - τx2))`.
    pub fn distance(&self, other: &Automorphism) -> ValuationBound {
        let a = self.image_x1.distance(&other.image_x1);
        let b = self.image_x2.distance(&other.image_x2);
        min_bound(a, b)
    }

    /// Least guaranteed precision among the generator images.
    pub fn images_precision(&self) -> i64 {
        self.image_x1.precision().min(self.image_x2.precision())
    }
}

impl fmt::Debug for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: x1 ↦ {}, x2 ↦ {}", self.label, self.image_x1, self.image_x2)
    }
}

/// The smaller of two valuation bounds, keeping indeterminacy.
pub fn min_bound(a: ValuationBound, b: ValuationBound) -> ValuationBound {
    use ValuationBound::*;
    match (a, b) {
        (Exact(x), Exact(y)) => Exact(x.min(y)),
        (Exact(x), AtLeast(y)) | (AtLeast(y), Exact(x)) if x < y => Exact(x),
        (x, y) => AtLeast(x.lower().min(y.lower())),
    }
}

/// Deliberate corruptions used as negative controls.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// adds 1 to the image of `x2` under σ1
    Sigma1X2Shift,
    /// keeps the images of σ1 only to half the requested precision
    Sigma1Truncate,
}

impl FromStr for Fault {
    type Err = Error;
    fn from_str(s: &str) -> Result<Fault> {
        match s {
            "sigma1-x2" => Ok(Fault::Sigma1X2Shift),
            "sigma1-truncate" => Ok(Fault::Sigma1Truncate),
            other => Err(Error::Config(format!(
                "unknown fault '{other}' (available: sigma1-x2, sigma1-truncate)"
            ))),
        }
    }
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fault::Sigma1X2Shift => write!(f, "sigma1-x2"),
            Fault::Sigma1Truncate => write!(f, "sigma1-truncate"),
        }
    }
}

/// `C1 = D(x1, 1)`.
pub fn c1(ext: &Arc<Extension>) -> K2Element {
    Witt2::new(ext.p()).d_poly(&K2Element::x1(ext), &K2Element::one(ext))
}

/// σ1: `x1 ↦` root of `X^p - X = a1` near `x1 + 1`, `x2 ↦` root of
/// `X^p - X = a2 + D(σ1 x1, a1)` near `x2 + C1`.
pub fn compute_sigma1(ext: &Arc<Extension>, target: i64, fault: Option<Fault>) -> Result<Automorphism> {
    let one = K2Element::one(ext);
    let a1 = K2Element::from_k0(ext, ext.a1());
    let a2 = K2Element::from_k0(ext, ext.a2());
    let mut x1_img = hensel_lift(&a1, &(&K2Element::x1(ext) + &one), target)?.root;
    let rhs = &a2 + &Witt2::new(ext.p()).d_poly(&x1_img, &a1);
    let mut x2_img = hensel_lift(&rhs, &(&K2Element::x2(ext) + &c1(ext)), target)?.root;
    match fault {
        Some(Fault::Sigma1X2Shift) => x2_img = &x2_img + &one,
        Some(Fault::Sigma1Truncate) => {
            x1_img = x1_img.with_v2_precision(target / 2);
            x2_img = x2_img.with_v2_precision(target / 2);
        }
        None => {}
    }
    Ok(Automorphism::new("σ1", x1_img, x2_img))
}

/// σ2 lifted directly: `x1 ↦ x1`, `x2 ↦` root near `x2 + 1`.
pub fn compute_sigma2_direct(ext: &Arc<Extension>, target: i64) -> Result<Automorphism> {
    let rhs = &K2Element::from_k0(ext, ext.a2()) + &ext.d1_element();
    let t0 = &K2Element::x2(ext) + &K2Element::one(ext);
    let x2_img = hensel_lift(&rhs, &t0, target)?.root;
    Ok(Automorphism::new("σ2", K2Element::x1(ext), x2_img))
}

/// σ2 as the p-fold composite of σ1.
pub fn compute_sigma2(sigma1: &Automorphism) -> Automorphism {
    let mut s = sigma1.power(sigma1.ext().p());
    s.label = "σ2".into();
    s
}

/// Element of the group algebra `K0[G]`, evaluated structurally.
#[derive(Clone)]
pub enum GroupAlgebraOp {
    Identity,
    Zero,
    Apply(Arc<Automorphism>),
    Scale(K0Element, Box<GroupAlgebraOp>),
    Sum(Box<GroupAlgebraOp>, Box<GroupAlgebraOp>),
    Difference(Box<GroupAlgebraOp>, Box<GroupAlgebraOp>),
    /// `outer ∘ inner`
    Compose(Box<GroupAlgebraOp>, Box<GroupAlgebraOp>),
    Power(Box<GroupAlgebraOp>, u32),
    /// `Σ_i coeffs[i]·base^i`
    Series {
        base: Box<GroupAlgebraOp>,
        coeffs: Vec<K0Element>,
    },
}

impl GroupAlgebraOp {
    pub fn automorphism(s: &Arc<Automorphism>) -> Self {
        GroupAlgebraOp::Apply(s.clone())
    }

    /// `σ - 1`.
    pub fn minus_one(s: &Arc<Automorphism>) -> Self {
        GroupAlgebraOp::Difference(Box::new(Self::automorphism(s)), Box::new(GroupAlgebraOp::Identity))
    }

    pub fn then(self, outer: GroupAlgebraOp) -> Self {
        GroupAlgebraOp::Compose(Box::new(outer), Box::new(self))
    }

    pub fn compose(outer: GroupAlgebraOp, inner: GroupAlgebraOp) -> Self {
        GroupAlgebraOp::Compose(Box::new(outer), Box::new(inner))
    }

    pub fn pow(self, n: u32) -> Self {
        match n {
            0 => GroupAlgebraOp::Identity,
            1 => self,
            _ => GroupAlgebraOp::Power(Box::new(self), n),
        }
    }

    pub fn scaled(self, c: K0Element) -> Self {
        GroupAlgebraOp::Scale(c, Box::new(self))
    }

    pub fn apply(&self, x: &K2Element) -> K2Element {
        use GroupAlgebraOp::*;
        match self {
            Identity => x.clone(),
            Zero => K2Element::zero(x.ext()),
            Apply(s) => s.apply(x),
            Scale(c, op) => op.apply(x).scale(c),
            Sum(a, b) => &a.apply(x) + &b.apply(x),
            Difference(a, b) => &a.apply(x) - &b.apply(x),
            Compose(outer, inner) => outer.apply(&inner.apply(x)),
            Power(op, n) => (0..*n).fold(x.clone(), |acc, _| op.apply(&acc)),
            Series { base, coeffs } => {
                let Some((last, rest)) = coeffs.split_last() else {
                    return K2Element::zero(x.ext());
                };
                let mut acc = x.scale(last);
                for c in rest.iter().rev() {
                    acc = &x.scale(c) + &base.apply(&acc);
                }
                acc
            }
        }
    }

    /// Matrix over `K0` in the basis `x1^i x2^j`; column `k` is the image of
    /// the `k`-th basis monomial.
    pub fn matrix(&self, ext: &Arc<Extension>) -> Vec<Vec<K0Element>> {
        let p = ext.p() as usize;
        let cols: Vec<K2Element> = (0..p * p)
            .map(|k| self.apply(&K2Element::x_monomial(ext, k / p, k % p)))
            .collect();
        (0..p * p)
            .map(|r| cols.iter().map(|c| c.x_coeffs()[r].clone()).collect())
            .collect()
    }
}

/// `(1 + (σ - 1))^{[y]} = Σ_{i<p} C(y, i)·(σ - 1)^i`.
pub fn truncated_exp(base: &Arc<Automorphism>, y: &K0Element) -> Result<GroupAlgebraOp> {
    let p = base.ext().p();
    let coeffs = (0..p).map(|i| y.binomial(i)).collect::<Result<Vec<_>>>()?;
    Ok(GroupAlgebraOp::Series {
        base: Box::new(GroupAlgebraOp::minus_one(base)),
        coeffs,
    })
}

/// `Ψ1 = σ1 σ2^{[μ]} - 1` and `Ψ2 = σ2 - 1`.
pub fn psi_operators(
    ext: &Arc<Extension>,
    sigma1: &Arc<Automorphism>,
    sigma2: &Arc<Automorphism>,
) -> Result<(GroupAlgebraOp, GroupAlgebraOp)> {
    let twisted = GroupAlgebraOp::compose(GroupAlgebraOp::automorphism(sigma1), truncated_exp(sigma2, ext.mu())?);
    let psi1 = GroupAlgebraOp::Difference(Box::new(twisted), Box::new(GroupAlgebraOp::Identity));
    let psi2 = GroupAlgebraOp::minus_one(sigma2);
    Ok((psi1, psi2))
}

/// Automorphisms and the quantities derived from them.
pub struct GaloisData {
    pub sigma1: Arc<Automorphism>,
    /// σ1^p by composition
    pub sigma2_composed: Arc<Automorphism>,
    /// σ2 lifted directly; used for all later evaluation
    pub sigma2: Arc<Automorphism>,
    pub psi1: GroupAlgebraOp,
    pub psi2: GroupAlgebraOp,
}

impl GaloisData {
    pub fn compute(ext: &Arc<Extension>, target: i64, fault: Option<Fault>) -> Result<GaloisData> {
        let sigma1 = Arc::new(compute_sigma1(ext, target, fault)?);
        let sigma2_composed = Arc::new(compute_sigma2(&sigma1));
        let sigma2 = Arc::new(compute_sigma2_direct(ext, target)?);
        let (psi1, psi2) = psi_operators(ext, &sigma1, &sigma2)?;
        Ok(GaloisData {
            sigma1,
            sigma2_composed,
            sigma2,
            psi1,
            psi2,
        })
    }

    pub fn ext(&self) -> &Arc<Extension> {
        self.sigma1.ext()
    }

    /// `ε = σ1 x1 - x1 - 1`.
    pub fn epsilon(&self) -> K2Element {
        let ext = self.ext();
        &(self.sigma1.image_x1() - &K2Element::x1(ext)) - &K2Element::one(ext)
    }

    /// `δ = σ2 x2 - x2 - 1`.
    pub fn delta(&self) -> K2Element {
        let ext = self.ext();
        &(self.sigma2.image_x2() - &K2Element::x2(ext)) - &K2Element::one(ext)
    }

    /// `δ' = σ1 x2 - x2 - C1`.
    pub fn delta_prime(&self) -> K2Element {
        let ext = self.ext();
        &(self.sigma1.image_x2() - &K2Element::x2(ext)) - &c1(ext)
    }

    /// Structural checks on σ1, σ2 at precision `min_precision`.
    pub fn checks(&self, min_precision: i64) -> Vec<InvariantCheck> {
        let ext = self.ext();
        let p = ext.p();
        let p2 = ext.p2();
        let e0 = ext.e0();
        let a1 = K2Element::from_k0(ext, ext.a1());
        let a2 = K2Element::from_k0(ext, ext.a2());
        let w = Witt2::new(p);
        let s1 = &self.sigma1;
        let mut out = Vec::new();

        let f1 = &(&s1.image_x1().pow(p) - s1.image_x1()) - &a1;
        out.push(InvariantCheck::vanishes(
            "sigma1_x1_artin_schreier",
            f1.valuation_bound(),
            min_precision,
        ));
        let rhs = &a2 + &w.d_poly(s1.image_x1(), &a1);
        let f2 = &(&s1.image_x2().pow(p) - s1.image_x2()) - &rhs;
        out.push(InvariantCheck::vanishes(
            "sigma1_x2_artin_schreier",
            f2.valuation_bound(),
            min_precision,
        ));

        let eps = self.epsilon().valuation_bound();
        out.push(InvariantCheck::exact(
            "epsilon_valuation",
            eps,
            p2 * e0 - p2 * ext.b1() + p as i64 * ext.b1(),
        ));
        out.push(InvariantCheck::exact(
            "c1_valuation",
            c1(ext).valuation_bound(),
            -(p as i64) * (p as i64 - 1) * ext.b1(),
        ));
        out.push(InvariantCheck::at_least(
            "witt_congruence_x1",
            self.epsilon().valuation_bound(),
            1,
        ));
        out.push(InvariantCheck::at_least(
            "witt_congruence_x2",
            self.delta_prime().valuation_bound(),
            1,
        ));

        out.push(InvariantCheck::vanishes(
            "sigma2_fixes_x1",
            self.sigma2_composed.image_x1().distance(&K2Element::x1(ext)),
            min_precision,
        ));
        out.push(InvariantCheck::vanishes(
            "sigma1_power_p_equals_sigma2",
            self.sigma2_composed.distance(&self.sigma2),
            min_precision,
        ));
        let delta = self.delta().valuation_bound();
        let v0a2 = -(p as i64 * ext.m() + ext.b1());
        out.push(InvariantCheck::at_least(
            "delta_lower_bound",
            delta,
            p2 * e0 + (p as i64 - 1) * p as i64 * v0a2,
        ));

        let full = self.sigma2_composed.power(p);
        out.push(InvariantCheck::vanishes(
            "sigma1_order_p_squared",
            full.distance(&Automorphism::identity(ext)),
            min_precision,
        ));

        let minus_p = K2Element::from_int(ext, -(p as i64));
        let s1_orbit: Vec<Automorphism> = (0..p).map(|k| s1.power(k)).collect();
        let tr_eps = trace_over(&self.epsilon(), &s1_orbit);
        out.push(InvariantCheck::vanishes(
            "trace_k1_k0_epsilon",
            tr_eps.distance(&minus_p),
            min_precision,
        ));
        let s2_orbit: Vec<Automorphism> = (0..p).map(|k| self.sigma2.power(k)).collect();
        let tr_delta = trace_over(&self.delta(), &s2_orbit);
        out.push(InvariantCheck::vanishes(
            "trace_k2_k1_delta",
            tr_delta.distance(&minus_p),
            min_precision,
        ));
        out
    }

    /// All `p²` group elements `σ1^k`.
    pub fn group(&self) -> Vec<Automorphism> {
        let p2 = self.ext().p2() as u32;
        let mut out = vec![Automorphism::identity(self.ext())];
        for _ in 1..p2 {
            let next = self.sigma1.compose(out.last().unwrap());
            out.push(next);
        }
        out
    }
}
