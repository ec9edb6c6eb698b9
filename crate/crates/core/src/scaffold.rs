//! Valuation-level checks of the scaffold operators `Ψ1`, `Ψ2` on explicit
//! and sampled elements.

use std::sync::Arc;

use num_integer::Integer;
use rand::Rng;

use crate::checks::InvariantCheck;
use crate::construction::RamificationData;
use crate::galois::GaloisData;
use crate::padic::K0Element;
use crate::tower::{lambda, Extension, K2Element};

/// Random elements with `v2(α) ≡ b2 (mod p²)`: a unit multiple of `λ_t`
/// plus a few terms of strictly larger valuation.
pub fn sample_alphas<R: Rng>(ext: &Arc<Extension>, n: usize, rng: &mut R) -> Vec<K2Element> {
    let p = ext.p() as i64;
    let p2 = p * p;
    (0..n)
        .map(|_| {
            let t = ext.b2() + p2 * rng.gen_range(-2..=2);
            let mut unit = rng.gen_range(1..p * p * p);
            if unit % p == 0 {
                unit += 1;
            }
            let mut alpha = lambda(ext, t).mul_int(unit);
            for _ in 0..3 {
                let s = t + rng.gen_range(1..=2 * p2);
                let c = rng.gen_range(-50..=50);
                alpha = &alpha + &lambda(ext, s).mul_int(c);
            }
            alpha
        })
        .collect()
}

/// Random elements with no valuation constraint, for algebraic identities.
pub fn sample_elements<R: Rng>(ext: &Arc<Extension>, n: usize, rng: &mut R) -> Vec<K2Element> {
    let p2 = ext.p2();
    (0..n)
        .map(|_| {
            let mut x = K2Element::zero(ext);
            for _ in 0..4 {
                let t = rng.gen_range(-2 * p2..2 * p2);
                let c = rng.gen_range(-20..=20);
                x = &x + &lambda(ext, t).mul_int(c);
            }
            x
        })
        .collect()
}

/// `v2(Ψ1^i Ψ2^j α) = v2(α) + j·b2 + i·p·b1` for all `i, j < p`.
pub fn scaffold_law_checks(g: &GaloisData, samples: &[K2Element]) -> Vec<InvariantCheck> {
    let ext = g.ext();
    let p = ext.p() as usize;
    let mut out = Vec::new();
    for (k, alpha) in samples.iter().enumerate() {
        let v = match alpha.valuation() {
            Ok(v) => v,
            Err(e) => {
                out.push(InvariantCheck::new(
                    format!("scaffold_law[sample={k}]"),
                    false,
                    e.to_string(),
                ));
                continue;
            }
        };
        let mut col = alpha.clone();
        for j in 0..p {
            let mut x = col.clone();
            for i in 0..p {
                let expected = v + j as i64 * ext.b2() + (i * p) as i64 * ext.b1();
                out.push(InvariantCheck::exact(
                    format!("scaffold_law[sample={k},i={i},j={j}]"),
                    x.valuation_bound(),
                    expected,
                ));
                if i + 1 < p {
                    x = g.psi1.apply(&x);
                }
            }
            if j + 1 < p {
                col = g.psi2.apply(&col);
            }
        }
    }
    out
}

/// For each residue `t mod p²`, `Ψi λ_t` shifts the valuation by exactly
/// `p^{2-i} b_i` when the relevant digit of `𝔞(-t)` is nonzero and by at
/// least `p^{2-i} b_i + 𝔠` when it is zero.
pub fn digit_drop_checks(g: &GaloisData, rd: &RamificationData) -> Vec<InvariantCheck> {
    let ext = g.ext();
    let p = ext.p() as i64;
    let p2 = p * p;
    let inv_b2 = (0..p2)
        .find(|x| (x * rd.b2).mod_floor(&p2) == 1)
        .expect("b2 prime to p");
    let mut out = Vec::new();
    for t in rd.b2..rd.b2 + p2 {
        let a = (-t * inv_b2).mod_floor(&p2);
        let (a0, a1) = (a % p, a / p);
        let lt = lambda(ext, t);
        for (i, op, shift, digit) in [(1, &g.psi1, p * rd.b1, a1), (2, &g.psi2, rd.b2, a0)] {
            let vb = op.apply(&lt).valuation_bound();
            let name = format!("digit_drop[t={t},i={i}]");
            out.push(if digit >= 1 {
                InvariantCheck::exact(name, vb, t + shift)
            } else {
                InvariantCheck::at_least(name, vb, t + shift + rd.precision_c)
            });
        }
    }
    out
}

/// `v2(Ψ2^p x) >= p²e0 + v2(x)`.
pub fn psi2_growth_checks(g: &GaloisData, samples: &[K2Element]) -> Vec<InvariantCheck> {
    let ext = g.ext();
    let p = ext.p();
    samples
        .iter()
        .enumerate()
        .filter_map(|(k, x)| {
            let v = x.valuation().ok()?;
            let y = g.psi2.clone().pow(p).apply(x);
            Some(InvariantCheck::at_least(
                format!("psi2_power_p_growth[sample={k}]"),
                y.valuation_bound(),
                ext.p2() * ext.e0() + v,
            ))
        })
        .collect()
}

/// `Ψ1^p ρ ≡ Ψ2 ρ mod 𝔐2^{p²e0 + p·b1 - (p-1)·b2}` and `v2(Ψ1^p ρ) = 2·b2`.
pub fn psi1_power_checks(g: &GaloisData, rd: &RamificationData, rho: &K2Element) -> Vec<InvariantCheck> {
    let ext = g.ext();
    let p = ext.p();
    let pi = p as i64;
    let lhs = g.psi1.clone().pow(p).apply(rho);
    let rhs = g.psi2.apply(rho);
    let modulus = ext.p2() * ext.e0() + pi * rd.b1 - (pi - 1) * rd.b2;
    vec![
        InvariantCheck::at_least("psi1_power_p_congruence", (&lhs - &rhs).valuation_bound(), modulus),
        InvariantCheck::exact("psi1_power_p_valuation", lhs.valuation_bound(), 2 * rd.b2),
    ]
}

/// σ1 is multiplicative and the scaffold operators are `K0`-linear on samples.
pub fn algebra_checks(g: &GaloisData, samples: &[K2Element], min_precision: i64) -> Vec<InvariantCheck> {
    let ext = g.ext();
    let mut out = Vec::new();
    let c = K0Element::monomial(ext.base(), 2, -1);
    // known only as well as the automorphisms, so nothing rests on the cap
    let known = g.sigma1.images_precision().min(g.sigma2.images_precision());
    let samples: Vec<K2Element> = samples.iter().map(|x| x.with_v2_precision(known)).collect();
    for (k, pair) in samples.chunks(2).enumerate() {
        let [x, y] = pair else { continue };
        let lhs = g.sigma1.apply(&(x * y));
        let rhs = &g.sigma1.apply(x) * &g.sigma1.apply(y);
        out.push(InvariantCheck::vanishes(
            format!("sigma1_multiplicative[pair={k}]"),
            lhs.distance(&rhs)
                .shifted(-(x.valuation_bound().lower() + y.valuation_bound().lower())),
            min_precision,
        ));
        for (name, op) in [("psi1", &g.psi1), ("psi2", &g.psi2)] {
            let lhs = op.apply(&(&x.scale(&c) + y));
            let rhs = &op.apply(x).scale(&c) + &op.apply(y);
            out.push(InvariantCheck::vanishes(
                format!("{name}_linear[pair={k}]"),
                lhs.distance(&rhs),
                min_precision,
            ));
        }
    }
    out
}
