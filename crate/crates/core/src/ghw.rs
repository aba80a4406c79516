//! Generalized Hamming weights of `C_D`.
//!
//! `d_r = n - max |H ∩ D|` over `(2e-r)`-dimensional `H <= F_q^2`, or
//! equivalently `d_r = n + 1 - max N(H_r)` over `r`-dimensional `H_r`, with
//! `N(H_r) = |H_r^perp ∩ D| + 1` and `perp` taken under the trace pairing.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::code::{Code, CodeError};
use crate::cyclotomic::p_star;
use crate::field::Fx;
use crate::qform::{extend_isotropic, hyperbolic_sign, FormSpec, QformError};
use crate::subspaces::{enumerate_subspaces, gaussian_binomial, shards, Budget, BudgetExceeded, Pairing, ShardCursor, Subspace};

/// Largest `q` for which the brute-force addition table is built.
const ADD_TABLE_MAX_Q: usize = 4096;
/// Subspaces per parallel work item.
const SHARD_LEN: u128 = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GhwError {
    #[error("r = {r} is outside 1..={k}")]
    BadRank { r: usize, k: usize },
    #[error("closed-form hierarchy needs e >= 3 (got e = {0})")]
    UnsupportedDegree(usize),
    #[error("brute force needs q <= {ADD_TABLE_MAX_Q} (got q = {0})")]
    FieldTooLarge(usize),
    #[error("explicit construction only covers 1 <= r <= {max} (got r = {r})")]
    OutsideConstruction { r: usize, max: usize },
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("constructed subspace reaches N = {counted}, expected {claimed}")]
    WitnessMismatch { claimed: u64, counted: u64 },
    #[error("character-sum value {num}/{den} is not an integer")]
    NotIntegral { num: i128, den: i128 },
    #[error("subspace must live in F_p^{expected}, got F_p^{got}")]
    AmbientMismatch { expected: usize, got: usize },
    #[error("reference hierarchy hypothesis fails: {0}")]
    Hypothesis(String),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error(transparent)]
    Form(#[from] QformError),
    #[error(transparent)]
    Code(#[from] CodeError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GhwMethod {
    Formula,
    Brute,
}

/// Which family of subspaces a brute-force run enumerates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    /// `r`-dimensional `H_r`, counting on the dual `H_r^perp`.
    Dual,
    /// `(2e-r)`-dimensional `H`, counting on `H` itself.
    Direct,
    /// Whichever side is cheaper; ties go to `Direct`, which needs no duals.
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMethod {
    Count,
    CharSum,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GhwEntry {
    pub r: usize,
    pub d_r: u64,
    pub method: GhwMethod,
    /// `H_r` attaining `max N(H_r)`; brute-force runs only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Subspace>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_n: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GhwTable {
    pub n: u64,
    pub k: usize,
    pub entries: Vec<GhwEntry>,
}

impl GhwTable {
    pub fn get(&self, r: usize) -> Option<u64> {
        self.entries.iter().find(|e| e.r == r).map(|e| e.d_r)
    }

    /// Violated invariants: strict monotonicity over the ranks present,
    /// `d_1` equal to `min_weight` and `d_k = n` when those ranks are present.
    pub fn invariant_violations(&self, min_weight: Option<u64>) -> Vec<String> {
        let mut out = Vec::new();
        let mut sorted: Vec<&GhwEntry> = self.entries.iter().collect();
        sorted.sort_by_key(|e| e.r);
        for w in sorted.windows(2) {
            if w[0].d_r >= w[1].d_r {
                out.push(format!("d_{} = {} is not below d_{} = {}", w[0].r, w[0].d_r, w[1].r, w[1].d_r));
            }
        }
        if let (Some(d1), Some(w)) = (self.get(1), min_weight) {
            if d1 != w {
                out.push(format!("d_1 = {d1} differs from the minimum weight {w}"));
            }
        }
        if let Some(dk) = self.get(self.k) {
            if dk != self.n {
                out.push(format!("d_{} = {dk} differs from the length {}", self.k, self.n));
            }
        }
        out
    }
}

fn check_rank(code: &Code, r: usize) -> Result<(), GhwError> {
    let k = 2 * code.e();
    if r == 0 || r > k {
        return Err(GhwError::BadRank { r, k });
    }
    Ok(())
}

/// Maximal dimension of a subspace of `F_q` on which `f` vanishes.
pub fn e0(code: &Code) -> usize {
    code.form().profile().max_isotropic_dim()
}

/// Closed-form `d_r` for `e >= 3`.
pub fn ghw_formula(code: &Code, r: usize) -> Result<u64, GhwError> {
    check_rank(code, r)?;
    let e = code.e();
    if e < 3 {
        return Err(GhwError::UnsupportedDegree(e));
    }
    let p = code.p() as u64;
    let e32 = e as u32;
    let r32 = r as u32;
    let top = p.pow(2 * e32 - 1);
    if r > e - e0(code) {
        return Ok(top - p.pow(2 * e32 - r32));
    }
    let base = top - p.pow(2 * e32 - r32 - 1);
    Ok(if e % 2 == 1 {
        base - p.pow((3 * e32 - 3) / 2)
    } else if code.even_sign() == 1 {
        base - (p - 1) * p.pow((3 * e32 - 4) / 2)
    } else {
        base - p.pow((3 * e32 - 4) / 2)
    })
}

/// Lookup tables shared by the brute-force inner loops.
struct Quadric<'a> {
    code: &'a Code,
    q: usize,
    add: Vec<u16>,
}

impl<'a> Quadric<'a> {
    fn new(code: &'a Code) -> Result<Self, GhwError> {
        let q = code.q();
        if q > ADD_TABLE_MAX_Q {
            return Err(GhwError::FieldTooLarge(q));
        }
        let f = code.field();
        let mut add = vec![0u16; q * q];
        for a in 0..q {
            for b in 0..q {
                add[a * q + b] = f.add(Fx::from_index(a), Fx::from_index(b)).index() as u16;
            }
        }
        Ok(Quadric { code, q, add })
    }

    fn split(&self, row: &[u32]) -> (usize, usize) {
        let f = self.code.field();
        let e = f.e();
        (f.pack(&row[..e]).index(), f.pack(&row[e..]).index())
    }

    /// Points of the span of `basis` with `f(x) + Tr(alpha y) = 0`, origin included.
    fn count(&self, basis: &[(usize, usize)]) -> u64 {
        let mut total = 0u64;
        self.walk(basis, 0, 0, &mut total);
        total
    }

    fn walk(&self, basis: &[(usize, usize)], x: usize, y: usize, total: &mut u64) {
        match basis.split_first() {
            None => *total += self.code.on_quadric_idx(x, y) as u64,
            Some((&(bx, by), rest)) => {
                let (mut x, mut y) = (x, y);
                for _ in 0..self.code.p() {
                    self.walk(rest, x, y, total);
                    x = self.add[x * self.q + bx] as usize;
                    y = self.add[y * self.q + by] as usize;
                }
            }
        }
    }
}

/// Result of an exhaustive search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BruteResult {
    pub d_r: u64,
    pub max_n: u64,
    /// `H_r` attaining `max_n`: the first maximizer in enumeration order of
    /// the side that was searched.
    pub witness: Subspace,
    pub side: Side,
}

/// Work units (subspaces times points per subspace) for one side.
pub fn brute_cost(code: &Code, r: usize, side: Side) -> u128 {
    let (p, m) = (code.p(), 2 * code.e());
    let points = (p as u128).pow((m - r) as u32);
    let dim = match side {
        Side::Dual => r,
        Side::Direct | Side::Auto => m - r,
    };
    gaussian_binomial(p, m, dim).saturating_mul(points)
}

fn resolve_side(code: &Code, r: usize, side: Side) -> Side {
    match side {
        Side::Auto => {
            if brute_cost(code, r, Side::Dual) < brute_cost(code, r, Side::Direct) {
                Side::Dual
            } else {
                Side::Direct
            }
        }
        s => s,
    }
}

pub fn ghw_brute(code: &Code, r: usize, budget: &Budget) -> Result<BruteResult, GhwError> {
    ghw_brute_side(code, r, Side::Auto, budget)
}

pub fn ghw_brute_side(code: &Code, r: usize, side: Side, budget: &Budget) -> Result<BruteResult, GhwError> {
    check_rank(code, r)?;
    let side = resolve_side(code, r, side);
    let p = code.p();
    let m = 2 * code.e();
    budget.check(brute_cost(code, r, side), format!("brute-force d_{r}"))?;
    let quadric = Quadric::new(code)?;
    let pairing = Pairing::trace(code.field(), 2);
    let dim = if side == Side::Dual { r } else { m - r };

    let per_shard: Vec<Option<(u64, Vec<Vec<u32>>)>> = shards(p, m, dim, SHARD_LEN)
        .par_iter()
        .map(|shard| {
            let mut cursor = ShardCursor::new(p, m, shard);
            let mut best: Option<(u64, Vec<Vec<u32>>)> = None;
            while let Some(rows) = cursor.advance() {
                let counted_on = match side {
                    Side::Dual => Subspace::span(p, m, rows).dual(&pairing).basis().clone(),
                    _ => rows.clone(),
                };
                let pts: Vec<(usize, usize)> = counted_on.iter().map(|row| quadric.split(row)).collect();
                let c = quadric.count(&pts);
                if best.as_ref().map_or(true, |(b, _)| c > *b) {
                    best = Some((c, rows.clone()));
                }
            }
            best
        })
        .collect();

    let (max_count, rows) = per_shard
        .into_iter()
        .flatten()
        .fold(None::<(u64, Vec<Vec<u32>>)>, |acc, cand| match acc {
            Some(a) if a.0 >= cand.0 => Some(a),
            _ => Some(cand),
        })
        .expect("at least one subspace");
    let found = Subspace::span(p, m, &rows);
    let witness = if side == Side::Dual { found } else { found.dual(&pairing) };
    let n = code.length_formula();
    Ok(BruteResult { d_r: n + 1 - max_count, max_n: max_count, witness, side })
}

/// `N(H) = |{(x,y) on the quadric : Tr(x b1 + y b2) = 0 for (b1,b2) in H}|`.
pub fn n_of_subspace(code: &Code, h: &Subspace, method: CountMethod) -> Result<u64, GhwError> {
    let e = code.e();
    if h.ambient_dim() != 2 * e {
        return Err(GhwError::AmbientMismatch { expected: 2 * e, got: h.ambient_dim() });
    }
    match method {
        CountMethod::Count => {
            let quadric = Quadric::new(code)?;
            let dual = h.dual(&Pairing::trace(code.field(), 2));
            let pts: Vec<(usize, usize)> = dual.basis().iter().map(|row| quadric.split(row)).collect();
            Ok(quadric.count(&pts))
        }
        CountMethod::CharSum => n_by_charsum(code, h),
    }
}

/// `p^(2e-r-1)` when `alpha` is not a second coordinate of `H`; otherwise
/// `p^(2e-r-1) (1 + eps_f C / (p*)^k)` summed over `(y1, -alpha) in H`, with
/// `k = e/2, C = sum v(f(x_y1))` for even `e` and
/// `k = (e-1)/2, C = sum eta(f(x_y1))` for odd `e`.
fn n_by_charsum(code: &Code, h: &Subspace) -> Result<u64, GhwError> {
    let f = code.field();
    let e = f.e();
    let p = code.p() as i128;
    let r = h.dim() as i64;
    let prof = code.form().profile();
    let minus_alpha = f.neg(code.alpha());
    let mut c = 0i128;
    let mut hits = 0usize;
    for v in h.elements() {
        if f.pack(&v[e..]) != minus_alpha {
            continue;
        }
        hits += 1;
        let y1 = f.pack(&v[..e]);
        let val = code.form().eval(prof.solve_xb(y1)?);
        c += if e % 2 == 0 {
            if val == 0 {
                p - 1
            } else {
                -1
            }
        } else {
            f.eta(val as i64) as i128
        };
    }
    let a = 2 * e as i64 - r - 1;
    let up = p.pow(a.max(0) as u32);
    let down = p.pow((-a).max(0) as u32);
    if hits == 0 {
        return exact_div(up, down);
    }
    let ps = (p_star(code.p()) as i128).pow((e / 2) as u32);
    exact_div(up * (ps + code.form_sign() as i128 * c), down * ps)
}

fn exact_div(num: i128, den: i128) -> Result<u64, GhwError> {
    if num % den != 0 || num / den < 0 {
        return Err(GhwError::NotIntegral { num, den });
    }
    Ok((num / den) as u64)
}

/// A subspace `H_r` realizing `max N(H_r) = p^(2e-1) - d_r` for
/// `1 <= r <= e - e_0`, built from an isotropic subspace of `F_q` and
/// mapped through `L_f`. The count of the result is checked against the
/// claimed maximum.
pub fn witness_construction(code: &Code, r: usize) -> Result<Witness, GhwError> {
    let e = code.e();
    if e < 3 {
        return Err(GhwError::UnsupportedDegree(e));
    }
    let max = e - e0(code);
    if r == 0 || r > max {
        return Err(GhwError::OutsideConstruction { r, max });
    }
    let form = code.form();
    let mus = if e % 2 == 0 && code.even_sign() == 1 {
        extend_isotropic(form, &[], &[], r).ok_or_else(|| GhwError::Construction(format!("no isotropic {r}-space")))?
    } else if e % 2 == 0 && r == e / 2 + 1 {
        anisotropic_plane_basis(form, r)?
    } else {
        let want = if e % 2 == 1 {
            let unit: i64 = if (e - 1) * (code.p() as usize - 1) % 8 == 0 { 1 } else { -1 };
            Some(code.field().eta(unit) * code.form_sign())
        } else {
            None
        };
        shifted_isotropic_basis(form, r, want)?
    };
    let f = code.field();
    let prof = form.profile();
    let minus_alpha = f.coords(f.neg(code.alpha()));
    let gens: Vec<Vec<u32>> = mus
        .iter()
        .map(|&mu| {
            let mut row = f.coords(prof.eval_lf(mu));
            row.extend_from_slice(&minus_alpha);
            row
        })
        .collect();
    let subspace = Subspace::span(code.p(), 2 * e, &gens);
    let claimed = code.length_formula() + 1 - ghw_formula(code, r)?;
    let counted = n_of_subspace(code, &subspace, CountMethod::Count)?;
    if counted != claimed {
        return Err(GhwError::WitnessMismatch { claimed, counted });
    }
    Ok(Witness { r, subspace, n: counted })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub r: usize,
    pub subspace: Subspace,
    pub n: u64,
}

/// `mu_i = alpha_i + alpha_r` for an isotropic basis `alpha_1..alpha_(r-1)` and
/// an `alpha_r` orthogonal to it with `f(alpha_r) != 0` (and, if requested,
/// `eta(f(alpha_r)) = want`), followed by `mu_r = alpha_r`.
fn shifted_isotropic_basis(form: &FormSpec, r: usize, want: Option<i8>) -> Result<Vec<Fx>, GhwError> {
    let f = form.field();
    let iso = extend_isotropic(form, &[], &[], r - 1).ok_or_else(|| GhwError::Construction(format!("no isotropic {}-space", r - 1)))?;
    let ar = f
        .elements()
        .find(|&x| {
            let v = form.eval(x);
            v != 0 && want.map_or(true, |w| f.eta(v as i64) == w) && iso.iter().all(|&a| form.bilinear(a, x) == 0)
        })
        .ok_or_else(|| GhwError::Construction("no admissible vector orthogonal to the isotropic part".into()))?;
    let mut mus: Vec<Fx> = iso.iter().map(|&a| f.add(a, ar)).collect();
    mus.push(ar);
    Ok(mus)
}

/// `mu_i = alpha_i + gamma_2`, `mu_(r-1) = gamma_1 + gamma_2`, `mu_r = gamma_2`
/// for an anisotropic plane `<gamma_1, gamma_2>` and an isotropic
/// `(r-2)`-space orthogonal to it.
fn anisotropic_plane_basis(form: &FormSpec, r: usize) -> Result<Vec<Fx>, GhwError> {
    let f = form.field();
    for g1 in f.elements().filter(|&x| form.eval(x) != 0) {
        let f1 = form.eval(g1) as i64;
        for g2 in f.elements() {
            let f2 = form.eval(g2) as i64;
            if f2 == 0 || form.bilinear(g1, g2) != 0 || f.eta(-f1 * f2) != -1 {
                continue;
            }
            if let Some(iso) = extend_isotropic(form, &[], &[g1, g2], r - 2) {
                let mut mus: Vec<Fx> = iso.iter().map(|&a| f.add(a, g2)).collect();
                mus.push(f.add(g1, g2));
                mus.push(g2);
                return Ok(mus);
            }
        }
    }
    Err(GhwError::Construction("no anisotropic plane with an isotropic orthogonal complement".into()))
}

/// Full table by one method.
pub fn ghw_table(code: &Code, ranks: &[usize], method: GhwMethod, budget: &Budget) -> Result<GhwTable, GhwError> {
    let entries = ranks
        .iter()
        .map(|&r| match method {
            GhwMethod::Formula => Ok(GhwEntry { r, d_r: ghw_formula(code, r)?, method, witness: None, max_n: None }),
            GhwMethod::Brute => {
                let b = ghw_brute(code, r, budget)?;
                Ok(GhwEntry { r, d_r: b.d_r, method, witness: Some(b.witness), max_n: Some(b.max_n) })
            }
        })
        .collect::<Result<Vec<_>, GhwError>>()?;
    Ok(GhwTable { n: code.length_formula(), k: 2 * code.e(), entries })
}

/// Closed-form `d_r` of the code with defining set `{x in F_q : f(x) = a}`,
/// `a != 0`, for even `e > 2`, or for odd `e >= 3` with
/// `eta(a) = (-1)^((e-1)(p-1)/4) eps_f`.
pub fn ghw_reference_da(form: &FormSpec, a: u32, r: usize) -> Result<u64, GhwError> {
    form.require_nondegenerate()?;
    let f = form.field();
    let (p, e) = (f.p() as i64, f.e());
    let a = a % f.p();
    if a == 0 {
        return Err(GhwError::Hypothesis("a must be nonzero".into()));
    }
    if r == 0 || r > e {
        return Err(GhwError::BadRank { r, k: e });
    }
    let eps = form.profile().sign as i64;
    let (e32, r32) = (e as u32, r as u32);
    let top = p.pow(e32 - 1);
    let val = if e % 2 == 0 {
        if e <= 2 {
            return Err(GhwError::Hypothesis(format!("even e must exceed 2 (got {e})")));
        }
        let sigma = hyperbolic_sign(f.p(), e) as i64 * eps;
        let s = p.pow((e32 - 2) / 2);
        if r <= e / 2 {
            top - p.pow(e32 - r32 - 1) - (sigma + 1) * s
        } else if r < e {
            top - 2 * p.pow(e32 - r32 - 1) - sigma * s
        } else {
            top - sigma * s
        }
    } else {
        if e < 3 {
            return Err(GhwError::Hypothesis(format!("odd e must be at least 3 (got {e})")));
        }
        let unit: i64 = if (e - 1) * (f.p() as usize - 1) % 8 == 0 { 1 } else { -1 };
        let want = f.eta(unit) as i64 * eps;
        if f.eta(a as i64) as i64 != want {
            return Err(GhwError::Hypothesis(format!("eta(a) = {} but the formula needs {want}", f.eta(a as i64))));
        }
        let s = p.pow((e32 - 1) / 2);
        if 2 * r < e {
            top - p.pow(e32 - r32 - 1)
        } else if r < e {
            top + s - 2 * p.pow(e32 - r32 - 1)
        } else {
            top + s
        }
    };
    Ok(val as u64)
}

/// Same quantity by exhaustive search:
/// `|D_a| - max |D_a ∩ H|` over `(e-r)`-dimensional `H <= F_q`.
pub fn ghw_reference_da_brute(form: &FormSpec, a: u32, r: usize, budget: &Budget) -> Result<u64, GhwError> {
    let f = form.field();
    let (p, e) = (f.p(), f.e());
    if r == 0 || r > e {
        return Err(GhwError::BadRank { r, k: e });
    }
    let a = a % p;
    let n = f.elements().filter(|&x| form.eval(x) == a).count() as u64;
    budget.check(gaussian_binomial(p, e, e - r) * (p as u128).pow((e - r) as u32), format!("reference d_{r}"))?;
    let best = enumerate_subspaces(p, e, e - r, budget)?
        .map(|h| h.elements().filter(|v| form.eval(f.pack(v)) == a).count() as u64)
        .max()
        .unwrap_or(0);
    Ok(n - best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::Method;
    use crate::field::Field;
    use std::sync::Arc;

    fn code(p: u32, e: usize, theta_form: bool, alpha_pow: u64) -> Code {
        let f = Arc::new(Field::new(p, e).unwrap());
        let form = if theta_form { FormSpec::tr_theta_x2(f.clone()) } else { FormSpec::tr_x2(f.clone()) };
        Code::new(form, f.primitive_pow(alpha_pow)).unwrap()
    }

    #[test]
    fn formula_values() {
        let c = code(3, 3, false, 0);
        let d: Vec<u64> = (1..=6).map(|r| ghw_formula(&c, r).unwrap()).collect();
        assert_eq!(d, vec![135, 189, 216, 234, 240, 242]);
        let c = code(5, 3, false, 0);
        assert_eq!(ghw_formula(&c, 1).unwrap(), 2375);
        assert_eq!(ghw_formula(&c, 2).unwrap(), 2875);
        assert_eq!(ghw_formula(&c, 3).unwrap(), 3000);
        assert_eq!(ghw_formula(&c, 6).unwrap(), 3124);
        let c = code(3, 4, true, 0);
        assert_eq!(e0(&c), 2);
        assert_eq!((1..=3).map(|r| ghw_formula(&c, r).unwrap()).collect::<Vec<_>>(), vec![1296, 1782, 1944]);
        let c = code(3, 4, false, 1);
        assert_eq!(e0(&c), 1);
        assert_eq!((1..=4).map(|r| ghw_formula(&c, r).unwrap()).collect::<Vec<_>>(), vec![1377, 1863, 2025, 2106]);
        assert_eq!(ghw_formula(&code(3, 2, false, 0), 1), Err(GhwError::UnsupportedDegree(2)));
        assert!(matches!(ghw_formula(&c, 9), Err(GhwError::BadRank { .. })));
    }

    #[test]
    fn brute_matches_formula_f27() {
        for theta in [false, true] {
            let c = code(3, 3, theta, 0);
            let min = c.weight_distribution(Method::Formula, &Budget::unlimited()).unwrap().min_weight();
            let table = ghw_table(&c, &[1, 2, 3, 4, 5, 6], GhwMethod::Brute, &Budget::unlimited()).unwrap();
            for r in 1..=6 {
                assert_eq!(table.get(r).unwrap(), ghw_formula(&c, r).unwrap(), "r={r}");
            }
            assert!(table.invariant_violations(min).is_empty());
        }
    }

    #[test]
    fn both_sides_agree() {
        let c = code(3, 3, false, 2);
        for r in 1..=6 {
            let a = ghw_brute_side(&c, r, Side::Dual, &Budget::unlimited()).unwrap();
            let b = ghw_brute_side(&c, r, Side::Direct, &Budget::unlimited()).unwrap();
            assert_eq!(a.d_r, b.d_r);
            for w in [&a.witness, &b.witness] {
                assert_eq!(w.dim(), r);
                assert_eq!(n_of_subspace(&c, w, CountMethod::Count).unwrap(), a.max_n);
            }
        }
        assert_eq!(resolve_side(&c, 2, Side::Auto), Side::Direct);
    }

    #[test]
    fn brute_is_deterministic_across_pools() {
        let c = code(3, 3, false, 0);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let a = one.install(|| ghw_brute(&c, 2, &Budget::unlimited()).unwrap());
        let b = ghw_brute(&c, 2, &Budget::unlimited()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn brute_budget() {
        let c = code(3, 3, false, 0);
        assert!(matches!(ghw_brute(&c, 3, &Budget::new(10)), Err(GhwError::Budget(_))));
    }

    #[test]
    fn top_rank_is_full_length() {
        let c = code(3, 3, false, 0);
        assert_eq!(ghw_brute(&c, 6, &Budget::unlimited()).unwrap().d_r, 242);
    }

    #[test]
    fn n_count_equals_charsum_small_subspaces() {
        let c = code(3, 3, false, 1);
        assert_eq!(n_of_subspace(&c, &Subspace::zero(3, 6), CountMethod::Count).unwrap(), 243);
        assert_eq!(n_of_subspace(&c, &Subspace::zero(3, 6), CountMethod::CharSum).unwrap(), 243);
        for r in 1..=2 {
            for h in enumerate_subspaces(3, 6, r, &Budget::unlimited()).unwrap() {
                let a = n_of_subspace(&c, &h, CountMethod::Count).unwrap();
                let b = n_of_subspace(&c, &h, CountMethod::CharSum).unwrap();
                assert_eq!(a, b, "{h:?}");
            }
        }
    }

    #[test]
    fn witnesses_attain_the_maximum() {
        for (p, e, theta, ap) in [(3, 3, false, 0), (3, 3, true, 4), (5, 3, false, 0), (3, 4, true, 0), (3, 4, false, 1), (3, 5, false, 0)] {
            let c = code(p, e, theta, ap);
            for r in 1..=e - e0(&c) {
                let w = witness_construction(&c, r).unwrap();
                assert_eq!(w.subspace.dim(), r);
            }
            let max = e - e0(&c);
            assert!(matches!(witness_construction(&c, max + 1), Err(GhwError::OutsideConstruction { .. })));
        }
    }

    #[test]
    fn witness_not_beaten_by_brute_force() {
        let c = code(3, 3, false, 0);
        for r in 1..=2 {
            let w = witness_construction(&c, r).unwrap();
            let b = ghw_brute(&c, r, &Budget::unlimited()).unwrap();
            assert_eq!(w.n, b.max_n);
        }
    }

    #[test]
    fn reference_hierarchies_match_search() {
        let cases = [(3, 3, false), (3, 3, true), (5, 3, false), (3, 4, true), (3, 4, false), (5, 4, false), (3, 5, true)];
        for (p, e, theta) in cases {
            let f = Arc::new(Field::new(p, e).unwrap());
            let form = if theta { FormSpec::tr_theta_x2(f) } else { FormSpec::tr_x2(f) };
            for a in 1..p {
                for r in 1..=e {
                    match ghw_reference_da(&form, a, r) {
                        Ok(d) => assert_eq!(d, ghw_reference_da_brute(&form, a, r, &Budget::unlimited()).unwrap(), "p={p} e={e} a={a} r={r}"),
                        Err(GhwError::Hypothesis(_)) => assert!(e % 2 == 1),
                        Err(other) => panic!("{other}"),
                    }
                }
            }
        }
    }

    #[test]
    fn reference_hypotheses() {
        let f = Arc::new(Field::new(3, 2).unwrap());
        assert!(matches!(ghw_reference_da(&FormSpec::tr_x2(f), 1, 1), Err(GhwError::Hypothesis(_))));
        let f = Arc::new(Field::new(3, 3).unwrap());
        assert!(matches!(ghw_reference_da(&FormSpec::tr_x2(f), 0, 1), Err(GhwError::Hypothesis(_))));
    }
}
