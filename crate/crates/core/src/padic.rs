//! Fixed-precision arithmetic in `Z_p` and in the totally ramified base field
//! `K0 = Q_p(π0)`, `π0^e0 = p·u`.
//!
//! A [`K0Element`] is stored as `π0^shift · Σ_{i<e0} c_i π0^i` with integer
//! coefficients, together with an absolute precision `prec`: the element is
//! known modulo `π0^prec`. Coefficient `c_i` is therefore only meaningful
//! modulo `p^{n_i}` with `n_i = ceil((prec - shift - i) / e0)`, and is kept
//! reduced to `[0, p^{n_i})`.
//!
//! Canonical form: a nonzero element has `shift == v0(x)` and a unit `c_0`;
//! an element that vanishes at its precision has all coefficients zero and
//! `shift == prec`.

use std::cmp::min;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `v_p(n)` for a nonzero integer, `None` for zero.
pub fn p_valuation(n: &BigInt, p: u32) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        n = q;
        v += 1;
    }
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Inverse of `a` modulo `m`, for `gcd(a, m) = 1`.
fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.mod_floor(m).extended_gcd(m);
    if !g.gcd.is_one() {
        return None;
    }
    Some(g.x.mod_floor(m))
}

/// An element of `Z_p` known modulo `p^N`.
///
/// Results of arithmetic carry the smaller of the two input precisions, so a
/// family of values sharing one precision behaves exactly like `Z/p^N`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PadicInt {
    p: u32,
    digits: BigUint,
    precision: u32,
}

impl PadicInt {
    pub fn new(p: u32, value: impl Into<BigInt>, precision: u32) -> Self {
        let modulus = BigInt::from(p).pow(precision);
        let digits = value.into().mod_floor(&modulus);
        PadicInt {
            p,
            digits: digits.to_biguint().expect("reduced value is nonnegative"),
            precision,
        }
    }

    pub fn zero(p: u32, precision: u32) -> Self {
        PadicInt::new(p, 0, precision)
    }

    pub fn one(p: u32, precision: u32) -> Self {
        PadicInt::new(p, 1, precision)
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn digits(&self) -> &BigUint {
        &self.digits
    }

    pub fn to_bigint(&self) -> BigInt {
        BigInt::from_biguint(Sign::Plus, self.digits.clone())
    }

    pub fn modulus(&self) -> BigUint {
        BigUint::from(self.p).pow(self.precision)
    }

    /// `None` when the element is zero modulo `p^N`.
    pub fn valuation(&self) -> Option<u32> {
        p_valuation(&self.to_bigint(), self.p)
    }

    pub fn is_zero(&self) -> bool {
        self.digits.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Some(0)
    }

    pub fn with_precision(&self, precision: u32) -> Self {
        PadicInt::new(self.p, self.to_bigint(), precision)
    }

    pub fn inverse(&self) -> Result<Self> {
        match self.valuation() {
            None => Err(Error::DivisionByIndeterminateZero),
            Some(0) => {
                let m = BigInt::from(self.p).pow(self.precision);
                let inv = mod_inverse(&self.to_bigint(), &m).expect("units are invertible modulo p^N");
                Ok(PadicInt::new(self.p, inv, self.precision))
            }
            Some(v) => Err(Error::Unsupported(format!(
                "inverse of a non-unit of valuation {v} leaves Z_p"
            ))),
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        let m = self.modulus();
        PadicInt {
            p: self.p,
            digits: self.digits.modpow(&BigUint::from(exp), &m),
            precision: self.precision,
        }
    }

    fn combine(&self, rhs: &PadicInt, f: impl Fn(BigInt, BigInt) -> BigInt) -> PadicInt {
        assert_eq!(self.p, rhs.p, "mixing different primes");
        let precision = min(self.precision, rhs.precision);
        PadicInt::new(self.p, f(self.to_bigint(), rhs.to_bigint()), precision)
    }
}

impl fmt::Debug for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O({}^{})", self.digits, self.p, self.precision)
    }
}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl<'a> Add<&'a PadicInt> for &'a PadicInt {
    type Output = PadicInt;
    fn add(self, rhs: &PadicInt) -> PadicInt {
        self.combine(rhs, |a, b| a + b)
    }
}

impl<'a> Sub<&'a PadicInt> for &'a PadicInt {
    type Output = PadicInt;
    fn sub(self, rhs: &PadicInt) -> PadicInt {
        self.combine(rhs, |a, b| a - b)
    }
}

impl<'a> Mul<&'a PadicInt> for &'a PadicInt {
    type Output = PadicInt;
    fn mul(self, rhs: &PadicInt) -> PadicInt {
        self.combine(rhs, |a, b| a * b)
    }
}

impl Neg for &PadicInt {
    type Output = PadicInt;
    fn neg(self) -> PadicInt {
        PadicInt::new(self.p, -self.to_bigint(), self.precision)
    }
}

/// Description of `K0 = Q_p(π0)` with `π0^e0 = p·u`.
///
/// `cap` is the absolute `v0`-precision ceiling: exact inputs are stored to
/// `π0^cap` and no result claims more.
#[derive(Debug)]
pub struct BaseField {
    p: u32,
    e0: u32,
    unit: BigInt,
    p_times_unit: BigInt,
    cap: i64,
    p_powers: Vec<BigInt>,
}

impl BaseField {
    /// `π0^e0 = p`.
    pub fn new(p: u32, e0: u32, cap: i64) -> Result<Arc<Self>> {
        Self::with_unit(p, e0, &PadicInt::one(p, 1), cap)
    }

    /// `π0^e0 = p·u`. The digits of `unit` are used as an exact integer
    /// representative, which fixes one Eisenstein polynomial.
    pub fn with_unit(p: u32, e0: u32, unit: &PadicInt, cap: i64) -> Result<Arc<Self>> {
        if !is_prime(p) {
            return Err(Error::Config(format!("{p} is not prime")));
        }
        if e0 == 0 {
            return Err(Error::Config("e0 must be at least 1".into()));
        }
        if unit.prime() != p || !unit.is_unit() {
            return Err(Error::Config("Eisenstein unit must be a p-adic unit".into()));
        }
        if cap < 1 {
            return Err(Error::Config("precision cap must be positive".into()));
        }
        let unit = unit.to_bigint();
        let max_digits = (cap / e0 as i64 + 8).clamp(8, 512) as u32;
        let pb = BigInt::from(p);
        let mut p_powers = Vec::with_capacity(max_digits as usize + 1);
        let mut acc = BigInt::one();
        for _ in 0..=max_digits {
            p_powers.push(acc.clone());
            acc *= &pb;
        }
        Ok(Arc::new(BaseField {
            p,
            e0,
            p_times_unit: &unit * p,
            unit,
            cap,
            p_powers,
        }))
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn e0(&self) -> u32 {
        self.e0
    }

    pub fn cap(&self) -> i64 {
        self.cap
    }

    pub fn unit(&self) -> &BigInt {
        &self.unit
    }

    pub fn unit_is_one(&self) -> bool {
        self.unit.is_one()
    }

    pub(crate) fn p_pow(&self, n: u32) -> BigInt {
        match self.p_powers.get(n as usize) {
            Some(v) => v.clone(),
            None => BigInt::from(self.p).pow(n),
        }
    }

    fn unit_inverse_mod(&self, digits: u32) -> BigInt {
        let m = self.p_pow(digits.max(1));
        mod_inverse(&self.unit, &m).expect("Eisenstein unit is invertible")
    }

    /// Number of p-adic digits of coefficient `i` that are meaningful when
    /// the element has the given shift and absolute precision.
    fn digits_for(&self, precision: i64, shift: i64, i: usize) -> i64 {
        let rel = precision - shift - i as i64;
        if rel <= 0 {
            0
        } else {
            (rel + self.e0 as i64 - 1) / self.e0 as i64
        }
    }

    /// Multiplies the coefficient vector of `Σ c_i π0^i` by `π0^d`, `d >= 0`,
    /// folding `π0^e0 = p·u`.
    fn shift_poly(&self, coeffs: &[BigInt], d: i64) -> Vec<BigInt> {
        debug_assert!(d >= 0);
        let e = self.e0 as usize;
        let q = (d / e as i64) as u32;
        let r = (d % e as i64) as usize;
        let factor = if q == 0 {
            BigInt::one()
        } else {
            self.p_times_unit.pow(q)
        };
        let mut out = vec![BigInt::zero(); e];
        for (i, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let t = c * &factor;
            let k = i + r;
            if k < e {
                out[k] += t;
            } else {
                out[k - e] += t * &self.p_times_unit;
            }
        }
        out
    }
}

/// Element of `K0` with tracked absolute `v0`-precision.
#[derive(Clone)]
pub struct K0Element {
    field: Arc<BaseField>,
    shift: i64,
    coeffs: Vec<BigInt>,
    precision: i64,
}

impl K0Element {
    pub fn from_parts(field: &Arc<BaseField>, shift: i64, coeffs: Vec<BigInt>, precision: i64) -> Self {
        assert_eq!(coeffs.len(), field.e0 as usize, "need exactly e0 coefficients");
        normalize(field, shift, coeffs, precision.min(field.cap))
    }

    /// Builds `π0^shift · Σ c_i π0^i` from p-adic coefficients; the result's
    /// precision is limited by the least precise coefficient.
    pub fn from_padic_coeffs(field: &Arc<BaseField>, shift: i64, coeffs: &[PadicInt]) -> Self {
        assert_eq!(coeffs.len(), field.e0 as usize, "need exactly e0 coefficients");
        let precision = coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| shift + i as i64 + field.e0 as i64 * c.precision() as i64)
            .min()
            .unwrap_or(field.cap);
        let coeffs = coeffs.iter().map(PadicInt::to_bigint).collect();
        Self::from_parts(field, shift, coeffs, precision)
    }

    pub fn zero(field: &Arc<BaseField>) -> Self {
        Self::zero_with_precision(field, field.cap)
    }

    pub fn zero_with_precision(field: &Arc<BaseField>, precision: i64) -> Self {
        K0Element {
            field: field.clone(),
            shift: precision,
            coeffs: vec![BigInt::zero(); field.e0 as usize],
            precision,
        }
    }

    pub fn from_int(field: &Arc<BaseField>, n: impl Into<BigInt>) -> Self {
        let mut coeffs = vec![BigInt::zero(); field.e0 as usize];
        coeffs[0] = n.into();
        Self::from_parts(field, 0, coeffs, field.cap)
    }

    pub fn one(field: &Arc<BaseField>) -> Self {
        Self::from_int(field, 1)
    }

    /// `c · π0^k`, exact to the field cap.
    pub fn monomial(field: &Arc<BaseField>, c: impl Into<BigInt>, k: i64) -> Self {
        let mut coeffs = vec![BigInt::zero(); field.e0 as usize];
        coeffs[0] = c.into();
        Self::from_parts(field, k, coeffs, field.cap)
    }

    pub fn pi_power(field: &Arc<BaseField>, k: i64) -> Self {
        Self::monomial(field, 1, k)
    }

    pub fn field(&self) -> &Arc<BaseField> {
        &self.field
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Normalized `v0`, with `v0(π0) = 1` and `v0(p) = e0`.
    pub fn valuation(&self) -> Result<i64> {
        if self.is_zero() {
            Err(Error::IndeterminateValuation {
                precision: self.precision,
            })
        } else {
            Ok(self.shift)
        }
    }

    /// The valuation if determinate, otherwise the precision (a lower bound).
    pub fn valuation_lower_bound(&self) -> i64 {
        self.shift
    }

    /// Coefficient `c_i` as a p-adic integer, relative to [`Self::shift`].
    pub fn coefficient(&self, i: usize) -> PadicInt {
        let n = self.field.digits_for(self.precision, self.shift, i).max(0) as u32;
        PadicInt::new(self.field.p, self.coeffs[i].clone(), n)
    }

    /// Re-reads the stored digits at a different absolute precision. Raising
    /// the precision treats the stored representative as exact.
    pub fn with_precision(&self, precision: i64) -> Self {
        normalize(
            &self.field,
            self.shift,
            self.coeffs.clone(),
            precision.min(self.field.cap),
        )
    }

    pub fn lifted(&self) -> Self {
        self.with_precision(self.field.cap)
    }

    fn check_field(&self, rhs: &K0Element) {
        debug_assert!(
            Arc::ptr_eq(&self.field, &rhs.field)
                || (self.field.p == rhs.field.p && self.field.e0 == rhs.field.e0 && self.field.unit == rhs.field.unit),
            "operands live in different base fields"
        );
    }

    fn aligned(&self, shift: i64) -> Vec<BigInt> {
        if self.is_zero() {
            return vec![BigInt::zero(); self.field.e0 as usize];
        }
        self.field.shift_poly(&self.coeffs, self.shift - shift)
    }

    fn add_impl(&self, rhs: &K0Element, negate: bool) -> K0Element {
        self.check_field(rhs);
        let precision = min(self.precision, rhs.precision);
        let shift = min(min(self.shift, rhs.shift), precision);
        let mut a = self.aligned(shift);
        let b = rhs.aligned(shift);
        for (x, y) in a.iter_mut().zip(b) {
            if negate {
                *x -= y;
            } else {
                *x += y;
            }
        }
        normalize(&self.field, shift, a, precision)
    }

    /// `π0^k · self`, exact.
    pub fn mul_pi_power(&self, k: i64) -> K0Element {
        normalize(
            &self.field,
            self.shift + k,
            self.coeffs.clone(),
            (self.precision + k).min(self.field.cap),
        )
    }

    pub fn mul_int(&self, n: impl Into<BigInt>) -> K0Element {
        let n = n.into();
        let c = K0Element::from_int(&self.field, n);
        self * &c
    }

    /// Multiplies by `1/n` for an integer `n` prime to `p`.
    pub fn div_unit_int(&self, n: i64) -> Result<K0Element> {
        let n = BigInt::from(n);
        if n.is_zero() || (&n % self.field.p).is_zero() {
            return Err(Error::Unsupported(format!("{n} is not a p-adic unit")));
        }
        let digits = self.field.digits_for(self.precision, self.shift, 0).max(1) as u32 + 1;
        let m = self.field.p_pow(digits);
        let inv = mod_inverse(&n, &m).expect("unit");
        let c = K0Element::from_int(&self.field, inv).with_precision(self.field.e0 as i64 * digits as i64);
        Ok(self * &c)
    }

    pub fn pow(&self, exp: u32) -> K0Element {
        let mut result = K0Element::one(&self.field);
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

    /// Multiplicative inverse to the precision justified by `self`.
    pub fn inverse(&self) -> Result<K0Element> {
        if self.is_zero() {
            return Err(Error::DivisionByIndeterminateZero);
        }
        let v = self.shift;
        let rel = self.precision - v;
        // unit part w = self · π0^{-v}, known to absolute precision `rel`
        let w = normalize(&self.field, 0, self.coeffs.clone(), rel);
        let c0 = &self.coeffs[0];
        let pb = BigInt::from(self.field.p);
        let z0 = mod_inverse(c0, &pb).expect("leading coefficient is a unit");
        let mut z = K0Element::from_int(&self.field, z0);
        let one = K0Element::one(&self.field);
        for _ in 0..128 {
            let err = &one - &(&w * &z);
            if err.is_zero() {
                break;
            }
            z = (&z + &(&z * &err)).lifted();
        }
        let z = z.with_precision(rel);
        Ok(z.mul_pi_power(-v).with_precision(rel - v))
    }

    pub fn div(&self, rhs: &K0Element) -> Result<K0Element> {
        Ok(self * &rhs.inverse()?)
    }

    /// Equality modulo `π0^min(prec)`.
    pub fn eq_at_precision(&self, rhs: &K0Element) -> bool {
        (self - rhs).is_zero()
    }

    /// Falling-factorial binomial `y(y-1)...(y-i+1)/i!`; requires `i < p`.
    pub fn binomial(&self, i: u32) -> Result<K0Element> {
        let mut acc = K0Element::one(&self.field);
        let mut fact: i64 = 1;
        for k in 0..i {
            let term = self - &K0Element::from_int(&self.field, k);
            acc = &acc * &term;
            fact *= (k + 1) as i64;
        }
        if fact == 1 {
            Ok(acc)
        } else {
            acc.div_unit_int(fact)
        }
    }

    /// Integer value, when the element is an exact rational integer below the cap.
    pub fn to_i64(&self) -> Option<i64> {
        if self.is_zero() {
            return Some(0);
        }
        if self.shift % self.field.e0 as i64 != 0 || self.shift < 0 {
            return None;
        }
        if self.coeffs[1..].iter().any(|c| !c.is_zero()) {
            return None;
        }
        let k = (self.shift / self.field.e0 as i64) as u32;
        let base = &self.coeffs[0] * self.field.unit.pow(k) * self.field.p_pow(k);
        let digits = self.field.digits_for(self.precision, 0, 0).max(0) as u32;
        let m = self.field.p_pow(digits);
        let r = base.mod_floor(&m);
        let half = &m / 2;
        let v = if r > half { r - m } else { r };
        v.to_i64()
    }
}

/// Puts arbitrary `(shift, coeffs, precision)` into canonical form.
fn normalize(field: &Arc<BaseField>, mut shift: i64, mut coeffs: Vec<BigInt>, precision: i64) -> K0Element {
    let e = field.e0 as usize;
    reduce_coeffs(field, shift, &mut coeffs, precision);
    let mut best: Option<(i64, usize)> = None;
    for (i, c) in coeffs.iter().enumerate() {
        if let Some(vp) = p_valuation(c, field.p) {
            let v = field.e0 as i64 * vp as i64 + i as i64;
            if best.is_none_or(|(bv, _)| v < bv) {
                best = Some((v, i));
            }
        }
    }
    let Some((vrel, _)) = best else {
        return K0Element::zero_with_precision(field, precision);
    };
    if vrel == 0 {
        return K0Element {
            field: field.clone(),
            shift,
            coeffs,
            precision,
        };
    }
    let k = (vrel / e as i64) as u32;
    let istar = (vrel % e as i64) as usize;
    if k > 0 {
        // p^k = π0^{e0·k} · u^{-k}
        let pk = field.p_pow(k);
        shift += e as i64 * k as i64;
        let uk = if field.unit_is_one() {
            BigInt::one()
        } else {
            let digits = field.digits_for(precision, shift, 0).max(1) as u32 + 1;
            field.unit_inverse_mod(digits).pow(k)
        };
        for c in coeffs.iter_mut() {
            if !c.is_zero() {
                let q = &*c / &pk;
                *c = q * &uk;
            }
        }
    }
    if istar > 0 {
        let pb = BigInt::from(field.p);
        let digits = field.digits_for(precision, shift, 0).max(1) as u32 + 1;
        let uinv = if field.unit_is_one() {
            BigInt::one()
        } else {
            field.unit_inverse_mod(digits)
        };
        let mut out = vec![BigInt::zero(); e];
        for (i, c) in coeffs.into_iter().enumerate() {
            if i >= istar {
                out[i - istar] = c;
            } else if !c.is_zero() {
                out[e + i - istar] = (c / &pb) * &uinv;
            }
        }
        coeffs = out;
        shift += istar as i64;
    }
    reduce_coeffs(field, shift, &mut coeffs, precision);
    K0Element {
        field: field.clone(),
        shift,
        coeffs,
        precision,
    }
}

fn reduce_coeffs(field: &BaseField, shift: i64, coeffs: &mut [BigInt], precision: i64) {
    for (i, c) in coeffs.iter_mut().enumerate() {
        let n = field.digits_for(precision, shift, i);
        if n <= 0 {
            c.set_zero();
        } else if c.is_negative() || c.bits() as f64 >= n as f64 * (field.p as f64).log2() {
            *c = c.mod_floor(&field.p_pow(n as u32));
        }
    }
}

impl fmt::Debug for K0Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for K0Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "O(π^{})", self.precision);
        }
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            match i {
                0 => terms.push(c.to_string()),
                1 => terms.push(format!("{c}·π")),
                _ => terms.push(format!("{c}·π^{i}")),
            }
        }
        write!(f, "π^{}·({}) + O(π^{})", self.shift, terms.join(" + "), self.precision)
    }
}

impl PartialEq for K0Element {
    fn eq(&self, other: &Self) -> bool {
        self.shift == other.shift && self.precision == other.precision && self.coeffs == other.coeffs
    }
}

impl<'a> Add<&'a K0Element> for &'a K0Element {
    type Output = K0Element;
    fn add(self, rhs: &K0Element) -> K0Element {
        self.add_impl(rhs, false)
    }
}

impl<'a> Sub<&'a K0Element> for &'a K0Element {
    type Output = K0Element;
    fn sub(self, rhs: &K0Element) -> K0Element {
        self.add_impl(rhs, true)
    }
}

impl Neg for &K0Element {
    type Output = K0Element;
    fn neg(self) -> K0Element {
        let coeffs = self.coeffs.iter().map(|c| -c).collect();
        normalize(&self.field, self.shift, coeffs, self.precision)
    }
}

impl<'a> Mul<&'a K0Element> for &'a K0Element {
    type Output = K0Element;
    fn mul(self, rhs: &K0Element) -> K0Element {
        self.check_field(rhs);
        let field = &self.field;
        let precision = min(self.precision + rhs.shift, rhs.precision + self.shift).min(field.cap);
        if self.is_zero() || rhs.is_zero() {
            return K0Element::zero_with_precision(field, precision);
        }
        let e = field.e0 as usize;
        let mut wide = vec![BigInt::zero(); 2 * e - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    wide[i + j] += a * b;
                }
            }
        }
        let mut coeffs: Vec<BigInt> = wide.drain(..e).collect();
        for (k, c) in wide.into_iter().enumerate() {
            if !c.is_zero() {
                coeffs[k] += c * &field.p_times_unit;
            }
        }
        normalize(field, self.shift + rhs.shift, coeffs, precision)
    }
}

/// Certifies `a ∉ ℘(K0)` through the valuation criterion.
///
/// For `v0(y) < 0`, `v0(y^p - y) = p·v0(y)`, while `v0(y^p - y) >= 0` otherwise,
/// so an element of negative valuation prime to `p` is never of the form `℘(y)`.
pub fn wp_membership_guard(a: &K0Element) -> Result<bool> {
    let v = a.valuation()?;
    if v >= 0 {
        return Err(Error::Unsupported(format!(
            "℘-membership is only certified for negative valuation, got v0 = {v}"
        )));
    }
    if v.rem_euclid(a.field.p as i64) == 0 {
        return Err(Error::Unsupported(format!(
            "℘-membership undecided when p divides v0 = {v}"
        )));
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(p: u32, e0: u32) -> Arc<BaseField> {
        BaseField::new(p, e0, 60).unwrap()
    }

    /// Multiplication in `Z[t]/(t^e - p)` on plain integer vectors.
    fn schoolbook(a: &[i128], b: &[i128], p: i128) -> Vec<i128> {
        let e = a.len();
        let mut out = vec![0i128; e];
        for i in 0..e {
            for j in 0..e {
                let k = i + j;
                if k < e {
                    out[k] += a[i] * b[j];
                } else {
                    out[k - e] += p * a[i] * b[j];
                }
            }
        }
        out
    }

    #[test]
    fn eisenstein_relation() {
        let f = field(3, 6);
        let pi = K0Element::pi_power(&f, 1);
        let rest = K0Element::pi_power(&f, 5);
        let prod = &pi * &rest;
        assert!(prod.eq_at_precision(&K0Element::from_int(&f, 3)));
        assert_eq!(prod.valuation().unwrap(), 6);
    }

    #[test]
    fn additive_identity() {
        let f = field(3, 6);
        let x = K0Element::from_parts(&f, -2, (1..=6).map(BigInt::from).collect(), 40);
        let y = &x + &K0Element::zero(&f);
        assert!(y.eq_at_precision(&x));
        assert_eq!(y.precision(), 40);
    }

    #[test]
    fn one_plus_pi_times_one_minus_pi() {
        let f = field(3, 6);
        let one = K0Element::one(&f);
        let pi = K0Element::pi_power(&f, 1);
        let prod = &(&one + &pi) * &(&one - &pi);
        let oracle = schoolbook(&[1, 1, 0, 0, 0, 0], &[1, -1, 0, 0, 0, 0], 3);
        assert_eq!(oracle, vec![1, 0, -1, 0, 0, 0]);
        let expect = K0Element::from_parts(&f, 0, oracle.iter().map(|&c| BigInt::from(c)).collect(), f.cap());
        assert!(prod.eq_at_precision(&expect));
    }

    #[test]
    fn schoolbook_agreement_on_wraparound() {
        let f = field(3, 6);
        let a = [2i128, 0, 1, 0, 5, 1];
        let b = [1i128, 4, 0, 2, 0, 7];
        let oracle = schoolbook(&a, &b, 3);
        let x = K0Element::from_parts(&f, 0, a.iter().map(|&c| BigInt::from(c)).collect(), f.cap());
        let y = K0Element::from_parts(&f, 0, b.iter().map(|&c| BigInt::from(c)).collect(), f.cap());
        let expect = K0Element::from_parts(&f, 0, oracle.iter().map(|&c| BigInt::from(c)).collect(), f.cap());
        assert!((&x * &y).eq_at_precision(&expect));
    }

    #[test]
    fn valuations() {
        let f = field(3, 6);
        assert_eq!(K0Element::from_int(&f, 3).valuation().unwrap(), 6);
        assert_eq!(K0Element::pi_power(&f, -4).valuation().unwrap(), -4);
        assert_eq!(K0Element::one(&f).valuation().unwrap(), 0);
        assert_eq!(K0Element::from_int(&f, 18).valuation().unwrap(), 12);
        assert!(matches!(
            K0Element::zero(&f).valuation(),
            Err(Error::IndeterminateValuation { .. })
        ));
    }

    #[test]
    fn canonical_form_pulls_out_p() {
        let f = field(3, 6);
        // 3 + 9π = π^6 (1 + 3π)
        let x = K0Element::from_parts(
            &f,
            0,
            vec![3.into(), 9.into(), 0.into(), 0.into(), 0.into(), 0.into()],
            40,
        );
        assert_eq!(x.shift(), 6);
        assert_eq!(x.coeffs()[0], BigInt::from(1));
        assert_eq!(x.coeffs()[1], BigInt::from(3));
        // 3 + π^2 has valuation 2
        let y = K0Element::from_parts(
            &f,
            0,
            vec![3.into(), 0.into(), 1.into(), 0.into(), 0.into(), 0.into()],
            40,
        );
        assert_eq!(y.valuation().unwrap(), 2);
    }

    #[test]
    fn nontrivial_unit() {
        let u = PadicInt::new(5, 2, 1);
        let f = BaseField::with_unit(5, 2, &u, 40).unwrap();
        let pi = K0Element::pi_power(&f, 1);
        let sq = &pi * &pi;
        assert!(sq.eq_at_precision(&K0Element::from_int(&f, 10)));
        let inv = pi.inverse().unwrap();
        assert!((&inv * &pi).eq_at_precision(&K0Element::one(&f)));
        // 10 = π^2 exactly, so 10 / π = π
        let q = K0Element::from_int(&f, 10).div(&pi).unwrap();
        assert!(q.eq_at_precision(&pi));
    }

    #[test]
    fn inverse_and_division() {
        let f = field(3, 6);
        let x = K0Element::from_parts(
            &f,
            -3,
            vec![2.into(), 1.into(), 0.into(), 7.into(), 0.into(), 1.into()],
            30,
        );
        let inv = x.inverse().unwrap();
        assert_eq!(inv.valuation().unwrap(), 3);
        let prod = &x * &inv;
        assert!(prod.eq_at_precision(&K0Element::one(&f)));
        assert!(matches!(
            K0Element::one(&f).div(&K0Element::zero_with_precision(&f, 5)),
            Err(Error::DivisionByIndeterminateZero)
        ));
    }

    #[test]
    fn precision_propagation() {
        let f = field(3, 6);
        let a = K0Element::pi_power(&f, -1).with_precision(20);
        let b = K0Element::pi_power(&f, 2).with_precision(25);
        let prod = &a * &b;
        // min(20 + 2, 25 - 1)
        assert_eq!(prod.precision(), 22);
        assert_eq!((&a + &b).precision(), 20);
    }

    #[test]
    fn binomials() {
        let f = field(3, 6);
        let mu = K0Element::pi_power(&f, -1);
        let c2 = mu.binomial(2).unwrap();
        let expect = (&mu * &(&mu - &K0Element::one(&f))).div_unit_int(2).unwrap();
        assert!(c2.eq_at_precision(&expect));
        assert_eq!(c2.valuation().unwrap(), -2);
        assert!(mu.binomial(0).unwrap().eq_at_precision(&K0Element::one(&f)));
    }

    #[test]
    fn to_i64_roundtrip() {
        let f = field(3, 6);
        for n in [-20i64, -3, -1, 0, 1, 2, 9, 27, 54] {
            assert_eq!(K0Element::from_int(&f, n).to_i64(), Some(n));
        }
        assert_eq!(K0Element::pi_power(&f, 1).to_i64(), None);
    }

    #[test]
    fn padic_int_ring() {
        let a = PadicInt::new(3, 5, 2);
        let b = PadicInt::new(3, 7, 3);
        assert_eq!((&a + &b).precision(), 2);
        assert_eq!((&a + &b).to_bigint(), BigInt::from(3));
        assert_eq!((&a * &b).to_bigint(), BigInt::from(35 % 9));
        assert_eq!(a.inverse().unwrap().to_bigint(), BigInt::from(2));
        assert_eq!(PadicInt::new(3, 9, 4).valuation(), Some(2));
        assert_eq!(PadicInt::new(3, 9, 2).valuation(), None);
        assert!(PadicInt::new(3, 3, 2).inverse().is_err());
    }

    #[test]
    fn wp_guard() {
        let f = field(3, 6);
        assert!(wp_membership_guard(&K0Element::pi_power(&f, -1)).unwrap());
        assert!(wp_membership_guard(&K0Element::pi_power(&f, -5)).unwrap());
        assert!(matches!(
            wp_membership_guard(&K0Element::pi_power(&f, -3)),
            Err(Error::Unsupported(_))
        ));
        assert!(wp_membership_guard(&K0Element::pi_power(&f, 2)).is_err());
    }
}
