//! The tower `K0 ⊂ K1 = K0(x1) ⊂ K2 = K0(x1, x2)` with
//! `x1^p - x1 = a1` and `x2^p - x2 = a2 + D(x1, a1)`.
//!
//! Elements of `K2` are stored in the basis `x1^i x2^j` (`0 <= i, j < p`),
//! where multiplication reduces through the two defining relations.
//! Valuations are read off in the basis `x1^i y2^j` with `y2 = x2 - μ x1`:
//! there the `p²` monomial valuations `-i·p·b1 - j·b2` are pairwise distinct
//! modulo `p²`, so the valuation of a sum is the minimum over its terms.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;

use crate::construction;
use crate::error::{Error, Result};
use crate::galois::Automorphism;
use crate::padic::{BaseField, K0Element};
use crate::witt::{reduced_binomial, WittCoefficient};

/// Parameters of one extension `K2/K0`: `a2 = μ^p a1`, `b1 = -v0(a1)`,
/// `m = -v0(μ)`, `b2 = p²m + b1`.
#[derive(Debug)]
pub struct Extension {
    base: Arc<BaseField>,
    p: u32,
    a1: K0Element,
    mu: K0Element,
    a2: K0Element,
    b1: i64,
    m: i64,
    b2: i64,
    /// coefficient of `x1^k` in `D(x1, a1)`
    d1: Vec<K0Element>,
    mu_powers: Vec<K0Element>,
    neg_mu_powers: Vec<K0Element>,
    binom: Vec<Vec<i64>>,
}

impl Extension {
    /// Validates both parameter choices and builds the extension.
    pub fn new(base: &Arc<BaseField>, a1: K0Element, mu: K0Element) -> Result<Arc<Extension>> {
        let c1 = construction::validate_choice1(&a1, base);
        let c2 = construction::validate_choice2(&mu, &a1, base);
        let mut violations = c1.violations();
        violations.extend(c2.violations());
        if !violations.is_empty() {
            return Err(Error::Validation(violations));
        }
        let ext = Self::build(base, a1, mu)?;
        if !ext.residues_are_distinct() {
            return Err(Error::InvariantViolation(
                "monomial valuations of x1^i y2^j are not distinct modulo p²".into(),
            ));
        }
        Ok(Arc::new(ext))
    }

    fn build(base: &Arc<BaseField>, a1: K0Element, mu: K0Element) -> Result<Extension> {
        let p = base.p();
        let b1 = -a1.valuation()?;
        let m = -mu.valuation()?;
        let b2 = (p as i64).pow(2) * m + b1;
        let a2 = &mu.pow(p) * &a1;
        let mut d1 = vec![K0Element::zero(base); p as usize];
        for i in 1..p {
            // -(C(p,i)/p) x1^{p-i} a1^i
            let c = a1.pow(i).mul_int(-reduced_binomial(p, i));
            d1[(p - i) as usize] = c;
        }
        let neg_mu = -&mu;
        let mu_powers = (0..p).map(|k| mu.pow(k)).collect();
        let neg_mu_powers = (0..p).map(|k| neg_mu.pow(k)).collect();
        let mut binom = vec![vec![0i64; p as usize]; p as usize];
        for n in 0..p as usize {
            binom[n][0] = 1;
            for k in 1..=n {
                binom[n][k] = binom[n - 1][k - 1] + if k < n { binom[n - 1][k] } else { 0 };
            }
        }
        Ok(Extension {
            base: base.clone(),
            p,
            a1,
            mu,
            a2,
            b1,
            m,
            b2,
            d1,
            mu_powers,
            neg_mu_powers,
            binom,
        })
    }

    pub fn base(&self) -> &Arc<BaseField> {
        &self.base
    }
    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn p2(&self) -> i64 {
        (self.p as i64).pow(2)
    }
    pub fn e0(&self) -> i64 {
        self.base.e0() as i64
    }
    pub fn a1(&self) -> &K0Element {
        &self.a1
    }
    pub fn a2(&self) -> &K0Element {
        &self.a2
    }
    pub fn mu(&self) -> &K0Element {
        &self.mu
    }
    pub fn b1(&self) -> i64 {
        self.b1
    }
    pub fn m(&self) -> i64 {
        self.m
    }
    pub fn b2(&self) -> i64 {
        self.b2
    }
    /// The field's absolute precision cap, in `v2` units.
    pub fn v2_cap(&self) -> i64 {
        self.p2() * self.base.cap()
    }

    /// `v2(x1^i x2^j)`.
    pub fn x_monomial_valuation(&self, i: usize, j: usize) -> i64 {
        let p = self.p as i64;
        -(i as i64) * p * self.b1 - (j as i64) * ((p - 1) * self.b1 + self.b2)
    }

    /// `v2(x1^i y2^j)`.
    pub fn y_monomial_valuation(&self, i: usize, j: usize) -> i64 {
        -(i as i64) * self.p as i64 * self.b1 - (j as i64) * self.b2
    }

    /// Largest gap between a `y`-basis term and the `x`-basis terms it expands to.
    fn basis_change_loss(&self) -> i64 {
        (self.p as i64 - 1).pow(2) * self.b1
    }

    /// `(i, j) ↦ v2(x1^i y2^j) mod p²` is a bijection onto `Z/p²`.
    pub fn residues_are_distinct(&self) -> bool {
        let p = self.p as usize;
        let p2 = self.p2();
        let mut seen = vec![false; p * p];
        for i in 0..p {
            for j in 0..p {
                let r = self.y_monomial_valuation(i, j).mod_floor(&p2) as usize;
                if seen[r] {
                    return false;
                }
                seen[r] = true;
            }
        }
        true
    }

    /// `D(x1, a1)` as an element of `K2`.
    pub fn d1_element(self: &Arc<Self>) -> K2Element {
        let mut coeffs = K2Element::zero(self).coeffs;
        for k in 0..self.p as usize {
            coeffs[k * self.p as usize] = self.d1[k].clone();
        }
        K2Element {
            ext: self.clone(),
            coeffs,
        }
    }

    fn zero_k0(&self) -> K0Element {
        K0Element::zero(&self.base)
    }
}

/// A `v2`-valuation that is either determined or only bounded below by the
/// available precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValuationBound {
    Exact(i64),
    AtLeast(i64),
}

impl ValuationBound {
    pub fn lower(&self) -> i64 {
        match *self {
            ValuationBound::Exact(v) | ValuationBound::AtLeast(v) => v,
        }
    }

    /// Decides `v >= k`; an indeterminate answer is a precision error.
    pub fn at_least(&self, k: i64) -> Result<bool> {
        match *self {
            ValuationBound::Exact(v) => Ok(v >= k),
            ValuationBound::AtLeast(prec) if prec >= k => Ok(true),
            ValuationBound::AtLeast(prec) => Err(Error::PrecisionExhausted(format!(
                "need v2 >= {k} but element is only known to v2-precision {prec}"
            ))),
        }
    }

    /// Adds `k` to the value or bound.
    pub fn shifted(&self, k: i64) -> ValuationBound {
        match *self {
            ValuationBound::Exact(v) => ValuationBound::Exact(v + k),
            ValuationBound::AtLeast(v) => ValuationBound::AtLeast(v + k),
        }
    }

    pub fn exact(&self) -> Result<i64> {
        match *self {
            ValuationBound::Exact(v) => Ok(v),
            ValuationBound::AtLeast(prec) => Err(Error::IndeterminateValuation { precision: prec }),
        }
    }
}

impl fmt::Display for ValuationBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValuationBound::Exact(v) => write!(f, "{v}"),
            ValuationBound::AtLeast(v) => write!(f, ">={v}"),
        }
    }
}

/// Reduces a grid indexed by `x1`-degree (rows) through `x1^p = x1 + a1`,
/// leaving rows `0..p`.
fn reduce_x1(ext: &Extension, grid: &mut Vec<Vec<K0Element>>) {
    let p = ext.p as usize;
    for i in (p..grid.len()).rev() {
        let row = std::mem::take(&mut grid[i]);
        for (j, c) in row.into_iter().enumerate() {
            grid[i - p + 1][j] = &grid[i - p + 1][j] + &c;
            grid[i - p][j] = &grid[i - p][j] + &(&c * &ext.a1);
        }
    }
    grid.truncate(p);
}

/// Element of `K2` in the basis `x1^i x2^j`.
#[derive(Clone)]
pub struct K2Element {
    ext: Arc<Extension>,
    coeffs: Vec<K0Element>,
}

impl K2Element {
    pub fn zero(ext: &Arc<Extension>) -> Self {
        let n = (ext.p * ext.p) as usize;
        K2Element {
            ext: ext.clone(),
            coeffs: vec![ext.zero_k0(); n],
        }
    }

    pub fn from_k0(ext: &Arc<Extension>, c: &K0Element) -> Self {
        let mut z = Self::zero(ext);
        z.coeffs[0] = c.clone();
        z
    }

    pub fn from_int(ext: &Arc<Extension>, n: i64) -> Self {
        Self::from_k0(ext, &K0Element::from_int(&ext.base, n))
    }

    pub fn one(ext: &Arc<Extension>) -> Self {
        Self::from_int(ext, 1)
    }

    /// `x1^i x2^j` for `i, j < p`.
    pub fn x_monomial(ext: &Arc<Extension>, i: usize, j: usize) -> Self {
        let mut z = Self::zero(ext);
        z.coeffs[i * ext.p as usize + j] = K0Element::one(&ext.base);
        z
    }

    pub fn x1(ext: &Arc<Extension>) -> Self {
        Self::x_monomial(ext, 1.min(ext.p as usize - 1), 0)
    }

    pub fn x2(ext: &Arc<Extension>) -> Self {
        Self::x_monomial(ext, 0, 1)
    }

    /// `y2 = x2 - μ x1`.
    pub fn y2(ext: &Arc<Extension>) -> Self {
        let mut z = Self::x2(ext);
        z.coeffs[ext.p as usize] = -&ext.mu;
        z
    }

    /// Builds an element from its coefficients in the basis `x1^i x2^j`
    /// (index `i·p + j`).
    pub fn from_x_coeffs(ext: &Arc<Extension>, coeffs: Vec<K0Element>) -> Self {
        assert_eq!(coeffs.len(), (ext.p * ext.p) as usize);
        K2Element {
            ext: ext.clone(),
            coeffs,
        }
    }

    pub fn ext(&self) -> &Arc<Extension> {
        &self.ext
    }

    pub fn x_coeffs(&self) -> &[K0Element] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize, j: usize) -> &K0Element {
        &self.coeffs[i * self.ext.p as usize + j]
    }

    /// Coefficients in the basis `x1^i y2^j` (index `i·p + j`).
    pub fn to_y_basis(&self) -> Vec<K0Element> {
        let ext = &*self.ext;
        let p = ext.p as usize;
        let zero = ext.zero_k0();
        let mut grid = vec![vec![zero; p]; 2 * p - 1];
        for i in 0..p {
            for j in 0..p {
                let c = &self.coeffs[i * p + j];
                // x2^j = Σ_k C(j,k) μ^{j-k} x1^{j-k} y2^k
                for k in 0..=j {
                    let t = (c * &ext.mu_powers[j - k]).mul_int(ext.binom[j][k]);
                    let d = i + j - k;
                    grid[d][k] = &grid[d][k] + &t;
                }
            }
        }
        reduce_x1(ext, &mut grid);
        grid.into_iter().flatten().collect()
    }

    /// Inverse of [`Self::to_y_basis`].
    pub fn from_y_basis(ext: &Arc<Extension>, y: &[K0Element]) -> Self {
        let p = ext.p as usize;
        assert_eq!(y.len(), p * p);
        let mut grid = vec![vec![ext.zero_k0(); p]; 2 * p - 1];
        for i in 0..p {
            for k in 0..p {
                let c = &y[i * p + k];
                // y2^k = Σ_l C(k,l) (-μ)^{k-l} x1^{k-l} x2^l
                for l in 0..=k {
                    let t = (c * &ext.neg_mu_powers[k - l]).mul_int(ext.binom[k][l]);
                    let d = i + k - l;
                    grid[d][l] = &grid[d][l] + &t;
                }
            }
        }
        reduce_x1(ext, &mut grid);
        K2Element {
            ext: ext.clone(),
            coeffs: grid.into_iter().flatten().collect(),
        }
    }

    /// Valuation with an explicit indeterminacy marker.
    pub fn valuation_bound(&self) -> ValuationBound {
        let p = self.ext.p as usize;
        let p2 = self.ext.p2();
        let y = self.to_y_basis();
        let mut best: Option<i64> = None;
        let mut prec = i64::MAX;
        for i in 0..p {
            for j in 0..p {
                let c = &y[i * p + j];
                let mono = self.ext.y_monomial_valuation(i, j);
                prec = prec.min(p2 * c.precision() + mono);
                if let Ok(v) = c.valuation() {
                    let t = p2 * v + mono;
                    best = Some(best.map_or(t, |b| b.min(t)));
                }
            }
        }
        match best {
            Some(v) if v < prec => ValuationBound::Exact(v),
            _ => ValuationBound::AtLeast(prec),
        }
    }

    /// Normalized `v2`, with `v2(π0) = p²`.
    pub fn valuation(&self) -> Result<i64> {
        self.valuation_bound().exact()
    }

    /// Guaranteed absolute `v2`-precision.
    pub fn precision(&self) -> i64 {
        let p = self.ext.p as usize;
        let y = self.to_y_basis();
        (0..p * p)
            .map(|k| self.ext.p2() * y[k].precision() + self.ext.y_monomial_valuation(k / p, k % p))
            .min()
            .unwrap_or(i64::MAX)
    }

    /// Treats the stored digits as exact (to the field cap).
    pub fn lifted(&self) -> Self {
        K2Element {
            ext: self.ext.clone(),
            coeffs: self.coeffs.iter().map(K0Element::lifted).collect(),
        }
    }

    /// Declares the element known to `v2`-precision `prec`, adjusting each
    /// stored coefficient so that every element of `v2 >= prec` lies inside
    /// the represented ball.
    pub fn with_v2_precision(&self, prec: i64) -> Self {
        let p = self.ext.p as usize;
        let p2 = self.ext.p2();
        let loss = self.ext.basis_change_loss();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let mono = self.ext.x_monomial_valuation(k / p, k % p);
                let q = Integer::div_ceil(&(prec - loss - mono), &p2);
                c.with_precision(q.min(c.precision()))
            })
            .collect();
        K2Element {
            ext: self.ext.clone(),
            coeffs,
        }
    }

    pub fn scale(&self, c: &K0Element) -> Self {
        K2Element {
            ext: self.ext.clone(),
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn mul_pi_power(&self, k: i64) -> Self {
        K2Element {
            ext: self.ext.clone(),
            coeffs: self.coeffs.iter().map(|x| x.mul_pi_power(k)).collect(),
        }
    }

    pub fn mul_int(&self, n: i64) -> Self {
        K2Element {
            ext: self.ext.clone(),
            coeffs: self.coeffs.iter().map(|x| x.mul_int(n)).collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut result = K2Element::one(&self.ext);
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// True when every non-constant coordinate vanishes at its precision.
    pub fn is_in_k0(&self) -> bool {
        self.coeffs[1..].iter().all(K0Element::is_zero)
    }

    /// True when no `x2` appears (the element lies in `K1`).
    pub fn is_in_k1(&self) -> bool {
        let p = self.ext.p as usize;
        (0..p * p).filter(|k| k % p != 0).all(|k| self.coeffs[k].is_zero())
    }

    pub fn constant_term(&self) -> &K0Element {
        &self.coeffs[0]
    }

    /// `v2(self - other)`.
    pub fn distance(&self, other: &K2Element) -> ValuationBound {
        (self - other).valuation_bound()
    }

    /// Inverse of a unit (`v2 = 0`) by Newton iteration `z ← z(2 - wz)`.
    pub fn unit_inverse(&self) -> Result<K2Element> {
        let ext = &self.ext;
        let y = self.to_y_basis();
        let lead = &y[0];
        if self.valuation_bound() != ValuationBound::Exact(0) || lead.valuation().ok() != Some(0) {
            return Err(Error::Unsupported(format!(
                "unit_inverse needs v2 = 0, got {}",
                self.valuation_bound()
            )));
        }
        let pb = BigInt::from(ext.p);
        let residue = lead.coeffs()[0].mod_floor(&pb);
        let inv = {
            let mut r = BigInt::from(1);
            while (&r * &residue).mod_floor(&pb) != BigInt::from(1) {
                r += 1;
            }
            r
        };
        let one = K2Element::one(ext);
        let mut z = K2Element::from_k0(ext, &K0Element::from_int(&ext.base, inv));
        let mut last = ValuationBound::AtLeast(i64::MIN);
        for _ in 0..200 {
            let err = &one - &(self * &z);
            last = err.valuation_bound();
            if matches!(last, ValuationBound::AtLeast(_)) {
                break;
            }
            z = (&z + &(&z * &err)).lifted();
        }
        Ok(z.with_v2_precision(last.lower()))
    }
}

impl fmt::Debug for K2Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for K2Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.ext.p as usize;
        let mut terms = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (i, j) = (k / p, k % p);
            let mono = match (i, j) {
                (0, 0) => String::new(),
                (i, 0) => format!("·x1^{i}"),
                (0, j) => format!("·x2^{j}"),
                (i, j) => format!("·x1^{i}·x2^{j}"),
            };
            terms.push(format!("[{c}]{mono}"));
        }
        if terms.is_empty() {
            write!(f, "O(v2 >= {})", self.precision())
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

fn check_same(a: &K2Element, b: &K2Element) {
    debug_assert!(Arc::ptr_eq(&a.ext, &b.ext), "operands live in different extensions");
}

impl<'a> Add<&'a K2Element> for &'a K2Element {
    type Output = K2Element;
    fn add(self, rhs: &K2Element) -> K2Element {
        check_same(self, rhs);
        K2Element {
            ext: self.ext.clone(),
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a K2Element> for &'a K2Element {
    type Output = K2Element;
    fn sub(self, rhs: &K2Element) -> K2Element {
        check_same(self, rhs);
        K2Element {
            ext: self.ext.clone(),
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &K2Element {
    type Output = K2Element;
    fn neg(self) -> K2Element {
        K2Element {
            ext: self.ext.clone(),
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }
}

impl<'a> Mul<&'a K2Element> for &'a K2Element {
    type Output = K2Element;
    fn mul(self, rhs: &K2Element) -> K2Element {
        check_same(self, rhs);
        let ext = &*self.ext;
        let p = ext.p as usize;
        let zero = ext.zero_k0();
        // rows: x1-degree up to 3p-3 (after x2 reduction), cols: x2-degree up to 2p-2
        let mut grid = vec![vec![zero; 2 * p - 1]; 3 * p - 2];
        for (ka, a) in self.coeffs.iter().enumerate() {
            for (kb, b) in rhs.coeffs.iter().enumerate() {
                let (i, j) = (ka / p + kb / p, ka % p + kb % p);
                grid[i][j] = &grid[i][j] + &(a * b);
            }
        }
        // x2^l = x2^{l-p} (x2 + a2 + D(x1, a1)) for l >= p
        for l in (p..2 * p - 1).rev() {
            for i in 0..2 * p - 1 {
                let c = std::mem::replace(&mut grid[i][l], ext.zero_k0());
                grid[i][l - p + 1] = &grid[i][l - p + 1] + &c;
                grid[i][l - p] = &grid[i][l - p] + &(&c * &ext.a2);
                for k in 1..p {
                    grid[i + k][l - p] = &grid[i + k][l - p] + &(&c * &ext.d1[k]);
                }
            }
        }
        for row in grid.iter_mut() {
            row.truncate(p);
        }
        reduce_x1(ext, &mut grid);
        K2Element {
            ext: self.ext.clone(),
            coeffs: grid.into_iter().flatten().collect(),
        }
    }
}

impl WittCoefficient for K2Element {
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul_int(&self, n: i64) -> Self {
        K2Element::mul_int(self, n)
    }
    fn zero_like(&self) -> Self {
        K2Element::zero(&self.ext)
    }
    fn one_like(&self) -> Self {
        K2Element::one(&self.ext)
    }
    fn pow(&self, exp: u32) -> Self {
        K2Element::pow(self, exp)
    }
}

/// `(k, i, j)` with `v2(π0^k x1^i y2^j) = r`, where `(i, j)` solves
/// `b1·(i·p + j) ≡ -r (mod p²)`.
pub fn uniformizer_exponents(ext: &Extension, r: i64) -> (i64, usize, usize) {
    let p = ext.p as usize;
    let p2 = ext.p2();
    let (i, j) = (0..p)
        .flat_map(|i| (0..p).map(move |j| (i, j)))
        .find(|&(i, j)| (ext.y_monomial_valuation(i, j) - r).mod_floor(&p2) == 0)
        .expect("monomial valuations cover every residue");
    ((r - ext.y_monomial_valuation(i, j)) / p2, i, j)
}

/// Element of valuation `r` built as a monomial `π0^k x1^i y2^j`.
pub fn uniformizer_k2(ext: &Arc<Extension>, r: i64) -> K2Element {
    let (k, i, j) = uniformizer_exponents(ext, r);
    y_monomial(ext, i, j).mul_pi_power(k)
}

/// Display form of the monomial returned by [`uniformizer_k2`].
pub fn uniformizer_label(ext: &Extension, r: i64) -> String {
    let (k, i, j) = uniformizer_exponents(ext, r);
    let mut parts = Vec::new();
    if k != 0 {
        parts.push(format!("π0^{k}"));
    }
    for (name, e) in [("x1", i), ("y2", j)] {
        match e {
            0 => {}
            1 => parts.push(name.to_string()),
            _ => parts.push(format!("{name}^{e}")),
        }
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("·")
    }
}

/// `x1^i y2^j`.
pub fn y_monomial(ext: &Arc<Extension>, i: usize, j: usize) -> K2Element {
    let p = ext.p as usize;
    let mut y = vec![ext.zero_k0(); p * p];
    y[i * p + j] = K0Element::one(&ext.base);
    K2Element::from_y_basis(ext, &y)
}

/// `λ_t = π0^{(t - r)/p²} · m_r`, `r = t mod p²`, of valuation exactly `t`.
pub fn lambda(ext: &Arc<Extension>, t: i64) -> K2Element {
    uniformizer_k2(ext, t)
}

/// Outcome of a Newton lift, with the residual valuation after each step.
#[derive(Clone, Debug)]
pub struct HenselLift {
    pub root: K2Element,
    pub residuals: Vec<ValuationBound>,
}

/// Newton iteration for a root of `f(X) = X^p - X - c` near `t0`.
///
/// Requires `v2(f(t0)) > 0` and `v2(f'(t0)) = 0`. The returned root is
/// guaranteed to `v2`-precision at least `target`.
pub fn hensel_lift(c: &K2Element, t0: &K2Element, target: i64) -> Result<HenselLift> {
    let ext = c.ext.clone();
    let p = ext.p;
    let f = |t: &K2Element| &(&t.pow(p) - t) - c;
    let fprime = |t: &K2Element| &t.pow(p - 1).mul_int(p as i64) - &K2Element::one(&ext);

    let r0 = f(t0).valuation_bound();
    match r0 {
        ValuationBound::Exact(v) if v <= 0 => {
            return Err(Error::NoConvergence(format!("v2(f(t0)) = {v} is not positive")))
        }
        ValuationBound::AtLeast(prec) if prec <= 0 => {
            return Err(Error::PrecisionExhausted(format!(
                "f(t0) is only known to v2-precision {prec}"
            )))
        }
        _ => {}
    }
    let d0 = fprime(t0).valuation_bound();
    if d0 != ValuationBound::Exact(0) {
        return Err(Error::NoConvergence(format!("v2(f'(t0)) = {d0}, expected 0")));
    }

    let mut t = t0.lifted();
    let mut residuals = vec![r0];
    let mut last = r0;
    for _ in 0..64 {
        let r = f(&t);
        last = r.valuation_bound();
        if residuals.len() > 1 || last != r0 {
            residuals.push(last);
        }
        if let ValuationBound::AtLeast(_) = last {
            break;
        }
        let inv = fprime(&t).unit_inverse()?;
        t = (&t - &(&r * &inv)).lifted();
    }
    let achieved = last.lower();
    if achieved < target {
        return Err(Error::PrecisionExhausted(format!(
            "Hensel lift reached v2-precision {achieved}, target {target}"
        )));
    }
    Ok(HenselLift {
        root: t.with_v2_precision(achieved),
        residuals,
    })
}

/// `Tr(x) = Σ_σ σ(x)` over the full group, returned as an element of `K0`.
pub fn trace_k2_k0(x: &K2Element, gal: &[Automorphism]) -> Result<K0Element> {
    let ext = &x.ext;
    if gal.len() != ext.p2() as usize {
        return Err(Error::InvariantViolation(format!(
            "trace needs all {} automorphisms, got {}",
            ext.p2(),
            gal.len()
        )));
    }
    let sum = trace_over(x, gal);
    if !sum.is_in_k0() {
        return Err(Error::NotRational(format!("{sum}")));
    }
    Ok(sum.constant_term().clone())
}

/// `Σ_σ σ(x)` over the given automorphisms.
pub fn trace_over(x: &K2Element, gal: &[Automorphism]) -> K2Element {
    gal.iter()
        .map(|s| s.apply(x))
        .reduce(|a, b| &a + &b)
        .unwrap_or_else(|| K2Element::zero(&x.ext))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn example_ext(cap: i64) -> Arc<Extension> {
        let base = BaseField::new(3, 6, cap).unwrap();
        let a1 = K0Element::pi_power(&base, -1);
        let mu = K0Element::pi_power(&base, -1);
        Extension::new(&base, a1, mu).unwrap()
    }

    pub(crate) fn p2_ext(cap: i64) -> Arc<Extension> {
        let base = BaseField::new(2, 4, cap).unwrap();
        let a1 = K0Element::pi_power(&base, -1);
        let mu = K0Element::pi_power(&base, -1);
        Extension::new(&base, a1, mu).unwrap()
    }

    #[test]
    fn example_parameters() {
        let ext = example_ext(40);
        assert_eq!((ext.b1(), ext.m(), ext.b2()), (1, 1, 10));
        assert_eq!(ext.a2().valuation().unwrap(), -4);
        assert!(ext.residues_are_distinct());
    }

    #[test]
    fn defining_relations() {
        let ext = example_ext(40);
        let x1 = K2Element::x1(&ext);
        let x2 = K2Element::x2(&ext);
        let x1p = &x1 * &x1.pow(2);
        let expect = &x1 + &K2Element::from_k0(&ext, ext.a1());
        assert!(matches!(x1p.distance(&expect), ValuationBound::AtLeast(_)));
        let x2p = x2.pow(3);
        let expect = &(&x2 + &K2Element::from_k0(&ext, ext.a2())) + &ext.d1_element();
        assert!(matches!(x2p.distance(&expect), ValuationBound::AtLeast(_)));
        let s = &x1 + &x2;
        assert!(matches!(
            (&s * &K2Element::one(&ext)).distance(&s),
            ValuationBound::AtLeast(_)
        ));
    }

    #[test]
    fn d1_matches_explicit_example_form() {
        // p = 3: D(x1, a1) = -a1 x1^2 - a1^2 x1; with a1 = π0^{-1}
        let ext = example_ext(40);
        let base = ext.base().clone();
        let x1 = K2Element::x1(&ext);
        let sum = &x1.pow(2).scale(&K0Element::pi_power(&base, -1)) + &x1.scale(&K0Element::pi_power(&base, -2));
        let expect = &-&sum;
        assert!(matches!(ext.d1_element().distance(expect), ValuationBound::AtLeast(_)));
    }

    #[test]
    fn basis_change() {
        let ext = example_ext(40);
        let y = K2Element::x2(&ext).to_y_basis();
        // x2 = y2 + μ x1
        assert!(y[1].eq_at_precision(&K0Element::one(ext.base())));
        assert!(y[3].eq_at_precision(ext.mu()));
        let x1y = K2Element::x1(&ext).to_y_basis();
        assert!(x1y[3].eq_at_precision(&K0Element::one(ext.base())));
        assert!(x1y
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != 3)
            .all(|(_, c)| c.is_zero()));
    }

    #[test]
    fn monomial_valuations() {
        let ext = example_ext(40);
        assert_eq!(K2Element::x2(&ext).valuation().unwrap(), -(3 - 1) - 10);
        assert_eq!(K2Element::x1(&ext).valuation().unwrap(), -3);
        assert_eq!(K2Element::y2(&ext).valuation().unwrap(), -10);
        assert_eq!(
            K2Element::from_k0(&ext, &K0Element::pi_power(ext.base(), 1))
                .valuation()
                .unwrap(),
            9
        );
        // v1(D1) = -(p²-p+1) b1, so v2 = -p·7
        assert_eq!(ext.d1_element().valuation().unwrap(), -21);
    }

    #[test]
    fn uniformizer_examples() {
        let ext = example_ext(40);
        let u = uniformizer_k2(&ext, 1);
        assert_eq!(u.valuation().unwrap(), 1);
        // π0^3 x1^2 y2^2
        let expect = &y_monomial(&ext, 2, 2).mul_pi_power(3);
        assert!(matches!(u.distance(expect), ValuationBound::AtLeast(_)));
        assert!(matches!(
            uniformizer_k2(&ext, 0).distance(&K2Element::one(&ext)),
            ValuationBound::AtLeast(_)
        ));
        assert_eq!(uniformizer_k2(&ext, 8).valuation().unwrap(), 8);
        for t in -30..30 {
            assert_eq!(lambda(&ext, t).valuation().unwrap(), t);
        }
    }

    #[test]
    fn unit_inverse_works() {
        let ext = example_ext(40);
        let w = &K2Element::from_int(&ext, 2) + &uniformizer_k2(&ext, 1);
        let z = w.unit_inverse().unwrap();
        let prod = &w * &z;
        assert!(prod.distance(&K2Element::one(&ext)).at_least(100).unwrap());
    }

    #[test]
    fn hensel_trivial_root() {
        let ext = example_ext(40);
        let zero = K2Element::zero(&ext);
        let lift = hensel_lift(&zero, &zero, 100).unwrap();
        assert!(matches!(lift.root.valuation_bound(), ValuationBound::AtLeast(_)));
    }

    #[test]
    fn hensel_rejects_bad_start() {
        let ext = example_ext(40);
        let c = K2Element::from_k0(&ext, ext.a1());
        // t0 = 0: f(0) = -a1 has negative valuation
        let r = hensel_lift(&c, &K2Element::zero(&ext), 10);
        assert!(matches!(r, Err(Error::NoConvergence(_))));
    }

    #[test]
    fn p2_tower_relations() {
        let ext = p2_ext(40);
        assert_eq!((ext.b1(), ext.b2()), (1, 5));
        let x2 = K2Element::x2(&ext);
        let x1 = K2Element::x1(&ext);
        // x2^2 = x2 + a2 - a1 x1
        let expect = &(&x2 + &K2Element::from_k0(&ext, ext.a2())) - &x1.scale(ext.a1());
        assert!(matches!(x2.pow(2).distance(&expect), ValuationBound::AtLeast(_)));
        assert_eq!(K2Element::y2(&ext).valuation().unwrap(), -5);
        assert_eq!(x2.valuation().unwrap(), -6);
    }
}
