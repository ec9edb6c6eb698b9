//! Witt vectors of length 2 over an arbitrary commutative coefficient ring.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::padic::{K0Element, PadicInt};

/// Ring operations needed by the length-2 Witt vector formulas.
///
/// Division by `p` is never required: the carry polynomial `D` is evaluated
/// through its integral binomial-sum form.
pub trait WittCoefficient: Clone {
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul_int(&self, n: i64) -> Self;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;

    fn pow(&self, exp: u32) -> Self {
        (0..exp).fold(self.one_like(), |acc, _| acc.mul(self))
    }
}

impl WittCoefficient for BigInt {
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
        self * n
    }
    fn zero_like(&self) -> Self {
        BigInt::zero()
    }
    fn one_like(&self) -> Self {
        BigInt::from(1)
    }
    fn pow(&self, exp: u32) -> Self {
        num_traits::Pow::pow(self, exp)
    }
}

impl WittCoefficient for PadicInt {
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
        PadicInt::new(self.prime(), self.to_bigint() * n, self.precision())
    }
    fn zero_like(&self) -> Self {
        PadicInt::zero(self.prime(), self.precision())
    }
    fn one_like(&self) -> Self {
        PadicInt::one(self.prime(), self.precision())
    }
    fn pow(&self, exp: u32) -> Self {
        PadicInt::pow(self, exp)
    }
}

impl WittCoefficient for K0Element {
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
        K0Element::mul_int(self, n)
    }
    fn zero_like(&self) -> Self {
        K0Element::zero(self.field())
    }
    fn one_like(&self) -> Self {
        K0Element::one(self.field())
    }
    fn pow(&self, exp: u32) -> Self {
        K0Element::pow(self, exp)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittVector2<R> {
    pub first: R,
    pub second: R,
}

impl<R> WittVector2<R> {
    pub fn new(first: R, second: R) -> Self {
        WittVector2 { first, second }
    }
}

/// `C(p, i) / p` for `1 <= i <= p - 1`.
pub fn reduced_binomial(p: u32, i: u32) -> i64 {
    let mut c: i128 = 1;
    for k in 0..i as i128 {
        c = c * (p as i128 - k) / (k + 1);
    }
    (c / p as i128) as i64
}

/// Witt vector arithmetic for a fixed prime `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Witt2 {
    p: u32,
}

impl Witt2 {
    pub fn new(p: u32) -> Self {
        assert!(p >= 2, "p must be a prime");
        Witt2 { p }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// `D(X, Y) = (X^p + Y^p - (X + Y)^p) / p = -Σ_{i=1}^{p-1} (C(p,i)/p) X^{p-i} Y^i`.
    pub fn d_poly<R: WittCoefficient>(&self, x: &R, y: &R) -> R {
        let p = self.p;
        let mut acc = x.zero_like();
        // powers of x and y up to p - 1
        let mut xp = vec![x.one_like()];
        let mut yp = vec![y.one_like()];
        for k in 1..p as usize {
            xp.push(xp[k - 1].mul(x));
            yp.push(yp[k - 1].mul(y));
        }
        for i in 1..p {
            let term = xp[(p - i) as usize]
                .mul(&yp[i as usize])
                .mul_int(reduced_binomial(p, i));
            acc = acc.sub(&term);
        }
        acc
    }

    pub fn add<R: WittCoefficient>(&self, a: &WittVector2<R>, b: &WittVector2<R>) -> WittVector2<R> {
        WittVector2 {
            first: a.first.add(&b.first),
            second: a.second.add(&b.second).add(&self.d_poly(&a.first, &b.first)),
        }
    }

    pub fn neg<R: WittCoefficient>(&self, a: &WittVector2<R>) -> WittVector2<R> {
        let first = a.first.neg();
        let second = a.second.neg().sub(&self.d_poly(&a.first, &first));
        WittVector2 { first, second }
    }

    pub fn sub<R: WittCoefficient>(&self, a: &WittVector2<R>, b: &WittVector2<R>) -> WittVector2<R> {
        self.add(a, &self.neg(b))
    }

    pub fn frobenius<R: WittCoefficient>(&self, a: &WittVector2<R>) -> WittVector2<R> {
        WittVector2 {
            first: a.first.pow(self.p),
            second: a.second.pow(self.p),
        }
    }

    /// `℘ = F - id`, subtraction taken in the Witt ring.
    pub fn artin_schreier<R: WittCoefficient>(&self, a: &WittVector2<R>) -> WittVector2<R> {
        self.sub(&self.frobenius(a), a)
    }
}
