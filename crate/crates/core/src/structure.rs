//! Integer scaffold tables, the basis `ρ_a` of the valuation ring, the
//! associated order and the freeness verdict.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::checks::InvariantCheck;
use crate::construction::{check_freeness_bound, RamificationData};
use crate::error::{Error, Result};
use crate::galois::{GaloisData, GroupAlgebraOp};
use crate::padic::K0Element;
use crate::tower::{K2Element, ValuationBound};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaffoldTables {
    pub p: u32,
    /// `𝔞(j) ≡ j·b2^{-1} mod p²`
    pub a_map: Vec<i64>,
    /// `𝔟(a) = (1 + a1)·b2 + a0·p·b1` for `a < p²`; infinite beyond
    pub b_map: Vec<i64>,
    /// `d_a = ⌊𝔟(a)/p²⌋`
    pub d: Vec<i64>,
    /// `w_j = min{d_{j+a} - d_a : 0 <= a < p² - j}`
    pub w: Vec<i64>,
    /// `(a0, a1)` with `a = a0 + p·a1`
    pub digits: Vec<(u32, u32)>,
    pub r_b2: i64,
    pub d0: i64,
}

fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    let g = a.extended_gcd(&m);
    (g.gcd == 1).then(|| g.x.mod_floor(&m))
}

impl ScaffoldTables {
    pub fn build(rd: &RamificationData) -> Result<ScaffoldTables> {
        let p = rd.p as i64;
        let p2 = p * p;
        let inv = mod_inverse(rd.b2, p2)
            .ok_or_else(|| Error::InvariantViolation(format!("b2 = {} is not prime to p = {p}", rd.b2)))?;
        let n = p2 as usize;
        let digits: Vec<(u32, u32)> = (0..n).map(|a| ((a as i64 % p) as u32, (a as i64 / p) as u32)).collect();
        let a_map = (0..p2).map(|j| (j * inv).mod_floor(&p2)).collect();
        let b_map: Vec<i64> = digits
            .iter()
            .map(|&(a0, a1)| (1 + a1 as i64) * rd.b2 + a0 as i64 * p * rd.b1)
            .collect();
        let d: Vec<i64> = b_map.iter().map(|b| b.div_floor(&p2)).collect();
        let w = (0..n)
            .map(|j| (0..n - j).map(|a| d[j + a] - d[a]).min().unwrap())
            .collect();
        Ok(ScaffoldTables {
            p: rd.p,
            a_map,
            d0: d[0],
            b_map,
            d,
            w,
            digits,
            r_b2: rd.r_b2,
        })
    }

    pub fn size(&self) -> usize {
        self.b_map.len()
    }

    pub fn p2(&self) -> i64 {
        self.size() as i64
    }

    /// `𝔟(a)`, `None` standing for `∞`.
    pub fn b_of(&self, a: usize) -> Option<i64> {
        self.b_map.get(a).copied()
    }

    /// `r(𝔟(a))`, the least non-negative residue modulo `p²`.
    pub fn residue(&self, a: usize) -> i64 {
        self.b_map[a].mod_floor(&self.p2())
    }

    /// True when adding `j` and `r` in base `p` produces a carry.
    pub fn carries(&self, j: usize, r: usize) -> bool {
        let p = self.p;
        let (j0, j1) = self.digits[j];
        let (r0, r1) = self.digits[r];
        let c = (j0 + r0 >= p) as u32;
        c == 1 || j1 + r1 + c >= p
    }

    /// Route 1: `r(b2) | p² - 1`.
    pub fn residue_divides(&self) -> bool {
        self.r_b2 != 0 && (self.p2() - 1) % self.r_b2 == 0
    }

    /// Route 2: `w_j = d_j - d_0` for every `j`.
    pub fn w_matches_d(&self) -> bool {
        (0..self.size()).all(|j| self.w[j] == self.d[j] - self.d0)
    }
}

/// `Ψ^{(a)} = Ψ2^{a1} Ψ1^{a0}` for `a < p²`, zero otherwise.
pub fn psi_power(a: usize, p: u32, psi1: &GroupAlgebraOp, psi2: &GroupAlgebraOp) -> GroupAlgebraOp {
    let p = p as usize;
    if a >= p * p {
        return GroupAlgebraOp::Zero;
    }
    let (a0, a1) = ((a % p) as u32, (a / p) as u32);
    match (a0, a1) {
        (0, 0) => GroupAlgebraOp::Identity,
        (_, 0) => psi1.clone().pow(a0),
        (0, _) => psi2.clone().pow(a1),
        _ => GroupAlgebraOp::compose(psi2.clone().pow(a1), psi1.clone().pow(a0)),
    }
}

/// Display form of `π0^k Ψ1^i Ψ2^j`.
pub fn operator_label(pi_exp: i64, psi1: u32, psi2: u32) -> String {
    let mut parts = Vec::new();
    if pi_exp != 0 {
        parts.push(format!("π0^{pi_exp}"));
    }
    for (name, e) in [("Ψ1", psi1), ("Ψ2", psi2)] {
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

/// `Ψ1^a Ψ2^b ρ` for `a, b < 2p - 1`, each entry one `Ψ` step from a smaller one.
pub struct PsiTable {
    entries: Vec<Vec<K2Element>>,
}

impl PsiTable {
    pub fn new(g: &GaloisData, rho: &K2Element) -> PsiTable {
        let n = 2 * g.ext().p() as usize - 1;
        let mut entries: Vec<Vec<K2Element>> = Vec::with_capacity(n);
        for a in 0..n {
            let mut row: Vec<K2Element> = Vec::with_capacity(n);
            for b in 0..n {
                let x = match (a, b) {
                    (0, 0) => rho.clone(),
                    (_, 0) => g.psi1.apply(&entries[a - 1][0]),
                    _ => g.psi2.apply(&row[b - 1]),
                };
                row.push(x);
            }
            entries.push(row);
        }
        PsiTable { entries }
    }

    pub fn get(&self, psi1: usize, psi2: usize) -> &K2Element {
        &self.entries[psi1][psi2]
    }

    pub fn max_power(&self) -> usize {
        self.entries.len() - 1
    }
}

/// `ρ = π0^{d0} ρ0` and `ρ_a = π0^{-d_a} Ψ^{(a)} ρ`; verifies the valuations
/// `v2(ρ_a) = r(𝔟(a))` form a complete residue system.
pub fn rho_family(tables: &ScaffoldTables, table: &PsiTable) -> Result<Vec<K2Element>> {
    let mut out = Vec::with_capacity(tables.size());
    let mut seen = vec![false; tables.size()];
    for a in 0..tables.size() {
        let (a0, a1) = tables.digits[a];
        let rho_a = table.get(a0 as usize, a1 as usize).mul_pi_power(-tables.d[a]);
        let v = rho_a.valuation()?;
        if v != tables.residue(a) {
            return Err(Error::InvariantViolation(format!(
                "v2(ρ_{a}) = {v}, expected r(𝔟({a})) = {}",
                tables.residue(a)
            )));
        }
        seen[v as usize] = true;
        out.push(rho_a);
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::InvariantViolation("valuations of ρ_a miss a residue".into()));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisElement {
    pub j: usize,
    pub pi_exponent: i64,
    pub psi1_power: u32,
    pub psi2_power: u32,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreenessRoutes {
    pub residue_divides: bool,
    pub w_matches_d: bool,
    pub valuations_complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleStructureReport {
    pub assoc_order_basis: Vec<BasisElement>,
    pub free: bool,
    pub routes: FreenessRoutes,
    pub generator: Option<String>,
    /// `j ↦ v2(π0^{-w_j} Ψ^{(j)} ρ0)`
    pub valuation_table: Vec<i64>,
    pub w_equals_d_minus_d0: bool,
}

/// Basis `{π0^{-w_j} Ψ^{(j)}}` of the associated order and the freeness
/// verdict, decided three ways.
pub fn associated_order_and_freeness(
    rd: &RamificationData,
    tables: &ScaffoldTables,
    table: &PsiTable,
    rho0_label: &str,
) -> Result<ModuleStructureReport> {
    let bound = check_freeness_bound(rd);
    if !bound.holds {
        return Err(Error::BoundNotSatisfied(format!(
            "p²e0 - (p+1)b2 + (p-1)b1 = {} is not positive",
            bound.margin
        )));
    }
    let p2 = tables.p2();
    let mut basis = Vec::new();
    let mut valuation_table = Vec::new();
    for j in 0..tables.size() {
        let (j0, j1) = tables.digits[j];
        basis.push(BasisElement {
            j,
            pi_exponent: -tables.w[j],
            psi1_power: j0,
            psi2_power: j1,
            label: operator_label(-tables.w[j], j0, j1),
        });
        // Ψ^{(j)} ρ0 = π0^{-d0} Ψ^{(j)} ρ
        let x = table.get(j0 as usize, j1 as usize);
        let v = x.valuation()? - p2 * (tables.d0 + tables.w[j]);
        valuation_table.push(v);
    }
    let mut sorted = valuation_table.clone();
    sorted.sort_unstable();
    let routes = FreenessRoutes {
        residue_divides: tables.residue_divides(),
        w_matches_d: tables.w_matches_d(),
        valuations_complete: sorted == (0..p2).collect::<Vec<_>>(),
    };
    if routes.residue_divides != routes.w_matches_d || routes.w_matches_d != routes.valuations_complete {
        return Err(Error::InternalDisagreement(format!(
            "freeness routes disagree: r(b2) | p²-1 is {}, w = d - d0 is {}, valuation table complete is {}",
            routes.residue_divides, routes.w_matches_d, routes.valuations_complete
        )));
    }
    let free = routes.residue_divides;
    Ok(ModuleStructureReport {
        assoc_order_basis: basis,
        free,
        routes,
        generator: free.then(|| rho0_label.to_string()),
        valuation_table,
        w_equals_d_minus_d0: tables.w_matches_d(),
    })
}

/// Membership and congruence claims for every pair `(j, r)`, evaluated by
/// applying `Ψ^{(j)}` to the computed `ρ_r`.
pub fn congruence_audit(
    rd: &RamificationData,
    tables: &ScaffoldTables,
    g: &GaloisData,
    rho: &[K2Element],
    min_precision: i64,
) -> Vec<InvariantCheck> {
    let p = rd.p as i64;
    let p2 = p * p;
    let e0 = rd.e0 as i64;
    let modulus = p2 * e0 - p * rd.b2 - (p2 - p + 1) * rd.b1;
    let n = tables.size();
    let ops: Vec<GroupAlgebraOp> = (0..n).map(|j| psi_power(j, rd.p, &g.psi1, &g.psi2)).collect();
    let mut out = Vec::new();
    for (j, op) in ops.iter().enumerate() {
        for r in 0..n {
            let x = op.apply(&rho[r]);
            let carry = tables.carries(j, r);
            let wj = tables.w[j];
            if j + r < n {
                let target = rho[j + r].mul_pi_power(tables.d[j + r] - tables.d[r]);
                let diff = (&x - &target).mul_pi_power(tables.d0 - tables.d[j]);
                let name = format!("first_congruence[j={j},r={r}]");
                out.push(if carry {
                    InvariantCheck::at_least(name, diff.valuation_bound(), modulus)
                } else {
                    InvariantCheck::vanishes(name, diff.valuation_bound(), min_precision)
                });
            } else {
                let y = x.mul_pi_power(tables.d0 - tables.d[j]);
                out.push(InvariantCheck::at_least(
                    format!("big_valuation[j={j},r={r}]"),
                    y.valuation_bound(),
                    1,
                ));
            }
            let scaled = x.mul_pi_power(-wj);
            out.push(InvariantCheck::at_least(
                format!("integral[j={j},r={r}]"),
                scaled.valuation_bound(),
                0,
            ));
            let target = if j + r < n {
                rho[j + r].mul_pi_power(tables.d[j + r] - tables.d[r] - wj)
            } else {
                K2Element::zero(x.ext())
            };
            let diff = &scaled - &target;
            let name = format!("second_congruence[j={j},r={r}]");
            out.push(if carry {
                InvariantCheck::at_least(name, diff.valuation_bound(), modulus)
            } else {
                InvariantCheck::vanishes(name, diff.valuation_bound(), min_precision)
            });
        }
    }
    // w recovered from the computed valuations: max w with π0^{-w} Ψ^{(j)} ρ_r integral for all r
    for (j, op) in ops.iter().enumerate() {
        let mut w_num = i64::MAX;
        let mut determined = true;
        for rho_r in rho {
            let vb = op.apply(rho_r).valuation_bound();
            if let ValuationBound::AtLeast(_) = vb {
                determined = false;
            }
            w_num = w_num.min(Integer::div_floor(&vb.lower(), &p2));
        }
        let holds = determined && w_num == tables.w[j] || !determined && w_num >= tables.w[j];
        let mut check = InvariantCheck::new(
            format!("associated_order_exponent[j={j}]"),
            holds,
            format!("numeric w = {w_num}, table w = {}", tables.w[j]),
        );
        check.indeterminate = !holds && !determined;
        out.push(check);
    }
    out
}

/// Rank over `K0` by elimination with minimal-valuation pivots; entries
/// that vanish at their precision are treated as zero.
pub fn k0_rank(matrix: &[Vec<K0Element>]) -> usize {
    let mut m: Vec<Vec<K0Element>> = matrix.to_vec();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let pivot = (rank..rows)
            .filter_map(|r| m[r][c].valuation().ok().map(|v| (v, r)))
            .min();
        let Some((_, pr)) = pivot else { continue };
        m.swap(rank, pr);
        let inv = match m[rank][c].inverse() {
            Ok(i) => i,
            Err(_) => continue,
        };
        for r in rank + 1..rows {
            if m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] * &inv;
            for k in c..cols {
                let t = &f * &m[rank][k];
                m[r][k] = &m[r][k] - &t;
            }
        }
        rank += 1;
    }
    rank
}

/// Rank of the coefficient matrix of `{Ψ^{(a)} ρ}`; `p²` certifies that `ρ`
/// generates a normal basis.
pub fn normal_basis_rank(tables: &ScaffoldTables, table: &PsiTable) -> usize {
    let cols: Vec<&K2Element> = tables
        .digits
        .iter()
        .map(|&(a0, a1)| table.get(a0 as usize, a1 as usize))
        .collect();
    let n = tables.size();
    let matrix: Vec<Vec<K0Element>> = (0..n)
        .map(|r| cols.iter().map(|c| c.x_coeffs()[r].clone()).collect())
        .collect();
    k0_rank(&matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checks::failures;
    use crate::construction::ramification_data;
    use crate::padic::BaseField;
    use crate::tower::tests::example_ext;
    use crate::tower::{uniformizer_k2, Extension};

    fn example_tables() -> ScaffoldTables {
        let ext = example_ext(12);
        ScaffoldTables::build(&ramification_data(&ext).unwrap()).unwrap()
    }

    /// `w` from its definition with `d` recomputed digit by digit.
    fn brute_w(p: i64, b1: i64, b2: i64) -> Vec<i64> {
        let n = p * p;
        let d = |a: i64| -> i64 {
            let b = (1 + a / p) * b2 + (a % p) * p * b1;
            let mut q = 0;
            while (q + 1) * n <= b {
                q += 1;
            }
            q
        };
        (0..n)
            .map(|j| {
                let mut best = i64::MAX;
                for a in 0..n {
                    if j + a < n {
                        best = best.min(d(j + a) - d(a));
                    }
                }
                best
            })
            .collect()
    }

    #[test]
    fn example_tables_match() {
        let t = example_tables();
        assert_eq!(t.b_map, vec![10, 13, 16, 20, 23, 26, 30, 33, 36]);
        assert_eq!(t.d, vec![1, 1, 1, 2, 2, 2, 3, 3, 4]);
        assert_eq!(t.w, vec![0, 0, 0, 1, 1, 1, 2, 2, 3]);
        assert_eq!(t.a_map, (0..9).collect::<Vec<_>>());
        assert_eq!((t.r_b2, t.d0), (1, 1));
        assert!(t.residue_divides() && t.w_matches_d());
        assert_eq!(t.w, brute_w(3, 1, 10));
    }

    #[test]
    fn brute_force_w_agrees_across_parameters() {
        for (p, b1, m) in [
            (2, 1, 1),
            (3, 1, 1),
            (3, 2, 1),
            (3, 5, 1),
            (5, 1, 1),
            (5, 3, 2),
            (3, 4, 3),
        ] {
            let b2 = p * p * m + b1;
            let rd = RamificationData {
                p: p as u32,
                e0: 100,
                b1,
                m,
                b2,
                u1: b1,
                u2: p * m + b1,
                depth: 0,
                different_valuation: 0,
                precision_c: 1,
                r_b2: b2 % (p * p),
                checks: vec![],
            };
            let t = ScaffoldTables::build(&rd).unwrap();
            assert_eq!(t.w, brute_w(p, b1, b2), "p={p} b1={b1} m={m}");
            for j in 0..t.size() {
                assert!(t.w[j] <= t.d[j] - t.d0);
            }
            let mut seen: Vec<i64> = t.a_map.clone();
            seen.sort_unstable();
            assert_eq!(seen, (0..p * p).collect::<Vec<_>>());
        }
    }

    #[test]
    fn psi_power_shapes() {
        let t = example_tables();
        assert_eq!(t.digits[5], (2, 1));
        assert!(matches!(
            psi_power(9, 3, &GroupAlgebraOp::Identity, &GroupAlgebraOp::Identity),
            GroupAlgebraOp::Zero
        ));
        assert!(matches!(
            psi_power(0, 3, &GroupAlgebraOp::Zero, &GroupAlgebraOp::Zero),
            GroupAlgebraOp::Identity
        ));
        assert_eq!(operator_label(-1, 2, 1), "π0^-1·Ψ1^2·Ψ2");
        assert_eq!(operator_label(0, 0, 0), "1");
        assert!(t.carries(2, 1));
        assert!(!t.carries(1, 1));
        assert!(t.carries(3, 6));
    }

    #[test]
    fn example_structure() {
        let ext = example_ext(26);
        let rd = ramification_data(&ext).unwrap();
        let tables = ScaffoldTables::build(&rd).unwrap();
        let g = GaloisData::compute(&ext, 120, None).unwrap();
        let rho0 = uniformizer_k2(&ext, tables.r_b2);
        let table = PsiTable::new(&g, &rho0.mul_pi_power(tables.d0));
        let rho = rho_family(&tables, &table).unwrap();
        assert_eq!(rho[8].valuation().unwrap(), 0);
        let rep = associated_order_and_freeness(&rd, &tables, &table, "π2").unwrap();
        assert!(rep.free);
        assert_eq!(rep.valuation_table, vec![1, 4, 7, 2, 5, 8, 3, 6, 0]);
        assert_eq!(normal_basis_rank(&tables, &table), 9);
        let audit = congruence_audit(&rd, &tables, &g, &rho, 40);
        assert!(failures(&audit).is_empty(), "{:#?}", failures(&audit));
    }

    #[test]
    fn non_free_instance_routes_agree() {
        let base = BaseField::new(3, 22, 90).unwrap();
        let a1 = K0Element::pi_power(&base, -5);
        let mu = K0Element::pi_power(&base, -5);
        let ext = Extension::new(&base, a1, mu).unwrap();
        let rd = ramification_data(&ext).unwrap();
        assert_eq!((rd.b1, rd.b2, rd.r_b2), (5, 50, 5));
        let tables = ScaffoldTables::build(&rd).unwrap();
        assert!(!tables.residue_divides());
        assert!(!tables.w_matches_d());
        let g = GaloisData::compute(&ext, 200, None).unwrap();
        let rho0 = uniformizer_k2(&ext, tables.r_b2);
        let table = PsiTable::new(&g, &rho0.mul_pi_power(tables.d0));
        let rep = associated_order_and_freeness(&rd, &tables, &table, "ρ0").unwrap();
        assert!(!rep.free);
        assert!(!rep.routes.valuations_complete);
        assert!(rep.generator.is_none());
    }

    #[test]
    fn rank_of_identity_and_singular() {
        let base = BaseField::new(3, 2, 10).unwrap();
        let one = K0Element::one(&base);
        let z = K0Element::zero(&base);
        let pi = K0Element::pi_power(&base, 1);
        let id = vec![vec![one.clone(), z.clone()], vec![z.clone(), pi.clone()]];
        assert_eq!(k0_rank(&id), 2);
        let sing = vec![vec![one.clone(), pi.clone()], vec![pi.clone(), &pi * &pi]];
        assert_eq!(k0_rank(&sing), 1);
    }
}
