//! The code `C_D = {(Tr(ux + vy))_((x,y) in D) : u, v in F_q}` with
//! defining set `D = {(x,y) != (0,0) : f(x) + Tr(alpha y) = 0}`.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Field, FieldSpec, Fx};
use crate::qform::{hyperbolic_sign, FormCoeffs, FormSpec, QformError};
use crate::subspaces::{Budget, BudgetExceeded};

/// Largest `q` for which the `q x q` table of `Tr(ab)` is materialized.
const TRMUL_MAX_Q: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("alpha must be nonzero")]
    ZeroAlpha,
    #[error(transparent)]
    Form(#[from] QformError),
    #[error("(u, v) = (0, 0) does not index a nonzero codeword")]
    ZeroCodeword,
    #[error("the closed-form weight distribution needs e >= 2 (got e = {0})")]
    UnsupportedDegree(usize),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

/// Serialized description of a code: field, form coefficients, alpha.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSummary {
    pub field: FieldSpec,
    pub form: FormCoeffs,
    pub alpha: Vec<u32>,
    pub form_sign: i8,
}

/// A validated code together with the lookup tables its inner loops use.
#[derive(Clone, Debug)]
pub struct Code {
    form: FormSpec,
    alpha: Fx,
    fvals: Vec<u32>,
    tr_alpha: Vec<u32>,
    trmul: Arc<OnceLock<Vec<u8>>>,
    inject_origin: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Method {
    Formula,
    Enumerate,
}

/// Which branch of the weight formula a codeword falls in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WeightCase {
    /// `v` is not an `F_p*` multiple of alpha.
    OffLine,
    /// `v` in `F_p* alpha`, `u = 0`.
    ZeroU,
    /// `v` in `F_p* alpha`, `u != 0`, `f(x_u) = 0`.
    IsotropicPoint,
    /// `v` in `F_p* alpha`, `f(x_u) != 0`.
    Generic,
}

impl Code {
    pub fn new(form: FormSpec, alpha: Fx) -> Result<Self, CodeError> {
        if alpha.is_zero() {
            return Err(CodeError::ZeroAlpha);
        }
        form.require_nondegenerate()?;
        let field = form.field().clone();
        let fvals = field.elements().map(|x| form.eval(x)).collect();
        let tr_alpha = field.elements().map(|y| field.trace(field.mul(alpha, y))).collect();
        Ok(Code { form, alpha, fvals, tr_alpha, trmul: Arc::new(OnceLock::new()), inject_origin: false })
    }

    /// Fault injection for negative controls: `(0,0)` is added to `D`.
    #[doc(hidden)]
    pub fn with_injected_origin(&self) -> Self {
        Code { inject_origin: true, ..self.clone() }
    }

    pub fn field(&self) -> &Arc<Field> {
        self.form.field()
    }

    pub fn form(&self) -> &FormSpec {
        &self.form
    }

    pub fn alpha(&self) -> Fx {
        self.alpha
    }

    pub fn p(&self) -> u32 {
        self.field().p()
    }

    pub fn e(&self) -> usize {
        self.field().e()
    }

    pub fn q(&self) -> usize {
        self.field().q()
    }

    /// `eps_f`, from the form's diagonalization.
    pub fn form_sign(&self) -> i8 {
        self.form.profile().sign
    }

    /// `(-1)^(e(p-1)/4) eps_f` for even `e`.
    pub fn even_sign(&self) -> i8 {
        hyperbolic_sign(self.p(), self.e()) * self.form_sign()
    }

    pub fn summary(&self) -> CodeSummary {
        CodeSummary {
            field: self.field().spec(),
            form: self.form.to_coeffs(),
            alpha: self.field().coords(self.alpha),
            form_sign: self.form_sign(),
        }
    }

    pub fn f_value(&self, x: Fx) -> u32 {
        self.fvals[x.index()]
    }

    /// `f(x) + Tr(alpha y) = 0`, origin included.
    #[inline]
    pub fn on_quadric(&self, x: Fx, y: Fx) -> bool {
        self.on_quadric_idx(x.index(), y.index())
    }

    #[inline]
    pub(crate) fn on_quadric_idx(&self, x: usize, y: usize) -> bool {
        let s = self.fvals[x] + self.tr_alpha[y];
        s == 0 || s == self.p()
    }

    /// Membership in `D`.
    #[inline]
    pub fn contains(&self, x: Fx, y: Fx) -> bool {
        (self.inject_origin || !(x.is_zero() && y.is_zero())) && self.on_quadric(x, y)
    }

    /// `p^(2e-1) - 1`.
    pub fn length_formula(&self) -> u64 {
        (self.p() as u64).pow(2 * self.e() as u32 - 1) - 1
    }

    /// Elements of `D`, `x`-major in field index order.
    pub fn defining_set(&self) -> Vec<(Fx, Fx)> {
        let q = self.q();
        let mut out = Vec::with_capacity(self.length_formula() as usize + 1);
        for x in 0..q {
            for y in 0..q {
                let (fx, fy) = (Fx::from_index(x), Fx::from_index(y));
                if self.contains(fx, fy) {
                    out.push((fx, fy));
                }
            }
        }
        out
    }

    pub(crate) fn trmul(&self) -> Option<&[u8]> {
        if self.q() > TRMUL_MAX_Q {
            return None;
        }
        let f = self.field();
        Some(self.trmul.get_or_init(|| {
            let q = f.q();
            let mut t = vec![0u8; q * q];
            for a in f.elements() {
                for b in f.elements() {
                    t[a.index() * q + b.index()] = f.trace(f.mul(a, b)) as u8;
                }
            }
            t
        }))
    }

    fn tr_prod(&self, a: Fx, b: Fx) -> u32 {
        match self.trmul() {
            Some(t) => t[a.index() * self.q() + b.index()] as u32,
            None => self.field().trace(self.field().mul(a, b)),
        }
    }

    /// `c` with `v = c alpha`, if `c` lies in `F_p*`.
    pub fn line_multiple(&self, v: Fx) -> Option<u32> {
        let f = self.field();
        let c = f.mul(v, f.inv(self.alpha).expect("alpha != 0"));
        (!c.is_zero() && f.in_prime_subfield(c)).then(|| f.coords(c)[0])
    }

    pub fn weight_case(&self, u: Fx, v: Fx) -> Result<WeightCase, CodeError> {
        if u.is_zero() && v.is_zero() {
            return Err(CodeError::ZeroCodeword);
        }
        if self.line_multiple(v).is_none() {
            return Ok(WeightCase::OffLine);
        }
        if u.is_zero() {
            return Ok(WeightCase::ZeroU);
        }
        let xu = self.form.profile().solve_xb(u)?;
        Ok(if self.form.eval(xu) == 0 { WeightCase::IsotropicPoint } else { WeightCase::Generic })
    }

    /// Weight of `c_(u,v)`.
    pub fn codeword_weight(&self, u: Fx, v: Fx, method: Method) -> Result<u64, CodeError> {
        match method {
            Method::Enumerate => {
                if u.is_zero() && v.is_zero() {
                    return Err(CodeError::ZeroCodeword);
                }
                let p = self.p();
                Ok(self
                    .defining_set()
                    .into_iter()
                    .filter(|&(x, y)| (self.tr_prod(u, x) + self.tr_prod(v, y)) % p != 0)
                    .count() as u64)
            }
            Method::Formula => self.weight_formula(u, v),
        }
    }

    fn weight_formula(&self, u: Fx, v: Fx) -> Result<u64, CodeError> {
        let p = self.p() as i64;
        let e = self.e() as u32;
        let base = (p - 1) * p.pow(2 * e - 2);
        let case = self.weight_case(u, v)?;
        let w = if e % 2 == 1 {
            let shift = p.pow((3 * e - 3) / 2);
            match case {
                WeightCase::OffLine | WeightCase::ZeroU | WeightCase::IsotropicPoint => base,
                WeightCase::Generic => {
                    let f = self.field();
                    let xu = self.form.profile().solve_xb(u)?;
                    let eta = f.eta(-(self.form.eval(xu) as i64)) as i64;
                    // (-1)^((p-1)(e+1)/4)
                    let unit = if (p - 1) * (e as i64 + 1) % 8 == 0 { 1 } else { -1 };
                    let s = self.form_sign() as i64 * eta * unit;
                    base - s * shift
                }
            }
        } else {
            let shift = p.pow((3 * e - 4) / 2);
            let eps = self.even_sign() as i64;
            match case {
                WeightCase::OffLine => base,
                WeightCase::ZeroU | WeightCase::IsotropicPoint => base - (p - 1) * eps * shift,
                WeightCase::Generic => base + eps * shift,
            }
        };
        Ok(w as u64)
    }

    /// Weight distribution of the code.
    pub fn weight_distribution(&self, method: Method, budget: &Budget) -> Result<WeightDistribution, CodeError> {
        match method {
            Method::Formula => self.distribution_formula(),
            Method::Enumerate => self.distribution_enumerate(budget),
        }
    }

    fn distribution_formula(&self) -> Result<WeightDistribution, CodeError> {
        let e = self.e() as u32;
        if e < 2 {
            return Err(CodeError::UnsupportedDegree(e as usize));
        }
        let p = self.p() as i64;
        let n = self.length_formula();
        let base = (p - 1) * p.pow(2 * e - 2);
        let mut hist = BTreeMap::new();
        let mut put = |w: i64, a: i64| {
            if a > 0 {
                *hist.entry(w as u64).or_insert(0u64) += a as u64;
            }
        };
        if e % 2 == 1 {
            let shift = p.pow((3 * e - 3) / 2);
            let half = (p - 1) * (p - 1) / 2;
            let (big, small) = (p.pow(e - 1), p.pow((e - 1) / 2));
            put(base - shift, half * (big + small));
            put(base, p.pow(2 * e) - 1 - (p - 1) * (p.pow(e) - p.pow(e - 1)));
            put(base + shift, half * (big - small));
        } else {
            let shift = p.pow((3 * e - 4) / 2);
            let eps = self.even_sign() as i64;
            let iso = p.pow(e - 1) + eps * (p - 1) * p.pow((e - 2) / 2);
            put(base - (p - 1) * eps * shift, (p - 1) * iso);
            put(base, p.pow(2 * e) - 1 - (p - 1) * p.pow(e));
            put(base + eps * shift, (p - 1) * (p.pow(e) - iso));
        }
        Ok(WeightDistribution::from_histogram(self.p(), n, 2 * e as usize, hist))
    }

    /// Weight of every `c_(u,v)` by counting over `D`, indexed `u * q + v`
    /// (entry 0 is the zero codeword).
    pub fn weights_enumerate(&self, budget: &Budget) -> Result<Vec<u64>, CodeError> {
        let q = self.q();
        let d = self.defining_set();
        let n = d.len() as u64;
        budget.check((q as u128 * q as u128 - 1) * n as u128, "weight enumeration (codewords x length)")?;
        let p = self.p();
        let table;
        let trmul: &[u8] = match self.trmul() {
            Some(t) => t,
            None => {
                let f = self.field();
                table = (0..q * q).map(|i| f.trace(f.mul(Fx::from_index(i / q), Fx::from_index(i % q))) as u8).collect::<Vec<_>>();
                &table
            }
        };
        let rows: Vec<Vec<u64>> = (0..q)
            .into_par_iter()
            .map(|u| {
                let row_u = &trmul[u * q..(u + 1) * q];
                let tu: Vec<u8> = d.iter().map(|&(x, _)| row_u[x.index()]).collect();
                (0..q)
                    .map(|v| {
                        let row_v = &trmul[v * q..(v + 1) * q];
                        let zeros = d
                            .iter()
                            .zip(&tu)
                            .filter(|&(&(_, y), &a)| {
                                let s = a as u32 + row_v[y.index()] as u32;
                                s == 0 || s == p
                            })
                            .count() as u64;
                        n - zeros
                    })
                    .collect()
            })
            .collect();
        Ok(rows.concat())
    }

    fn distribution_enumerate(&self, budget: &Budget) -> Result<WeightDistribution, CodeError> {
        let weights = self.weights_enumerate(budget)?;
        let n = self.defining_set().len() as u64;
        let mut hist: BTreeMap<u64, u64> = BTreeMap::new();
        for &w in &weights[1..] {
            *hist.entry(w).or_insert(0) += 1;
        }
        // zero-weight nonzero codewords shrink the dimension
        let zero_words = hist.remove(&0).unwrap_or(0) + 1;
        let total = weights.len() as u64;
        let p = self.p() as u64;
        let mut k = 0usize;
        while p.pow(k as u32) * zero_words < total {
            k += 1;
        }
        Ok(WeightDistribution::from_histogram(self.p(), n, k, hist))
    }

    /// Every coordinate of the code is a nonzero functional on `(u, v)`:
    /// scanned literally against the basis functionals.
    pub fn dual_distance_at_least_2(&self) -> bool {
        let f = self.field();
        let basis: Vec<Fx> = (0..f.e()).map(|j| f.basis_element(j)).collect();
        self.defining_set()
            .into_iter()
            .all(|(x, y)| basis.iter().any(|&b| self.tr_prod(b, x) != 0 || self.tr_prod(b, y) != 0))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightEntry {
    pub weight: u64,
    pub multiplicity: u64,
}

/// `(weight, multiplicity)` pairs in increasing weight, starting with `(0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightDistribution {
    pub p: u32,
    pub n: u64,
    pub k: usize,
    pub entries: Vec<WeightEntry>,
}

impl WeightDistribution {
    /// `hist` holds the nonzero weights only.
    pub fn from_histogram(p: u32, n: u64, k: usize, hist: BTreeMap<u64, u64>) -> Self {
        let mut entries = vec![WeightEntry { weight: 0, multiplicity: 1 }];
        entries.extend(hist.into_iter().filter(|&(w, m)| w > 0 && m > 0).map(|(weight, multiplicity)| WeightEntry { weight, multiplicity }));
        WeightDistribution { p, n, k, entries }
    }

    pub fn nonzero(&self) -> impl Iterator<Item = &WeightEntry> {
        self.entries.iter().filter(|e| e.weight > 0)
    }

    pub fn min_weight(&self) -> Option<u64> {
        self.nonzero().map(|e| e.weight).min()
    }

    pub fn max_weight(&self) -> Option<u64> {
        self.nonzero().map(|e| e.weight).max()
    }

    pub fn multiplicity(&self, w: u64) -> u64 {
        self.entries.iter().find(|e| e.weight == w).map_or(0, |e| e.multiplicity)
    }

    /// `1 + A_1 x^w_1 + ...`
    pub fn enumerator(&self) -> String {
        let mut s = String::from("1");
        for e in self.nonzero() {
            s.push_str(&format!(" + {}x^{}", e.multiplicity, e.weight));
        }
        s
    }
}

/// Both sides of the first two power-moment identities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlessReport {
    pub count: (u128, u128),
    pub moment: (u128, u128),
}

impl PlessReport {
    pub fn passed(&self) -> bool {
        self.count.0 == self.count.1 && self.moment.0 == self.moment.1
    }
}

/// `sum A_w = p^k - 1` and `sum w A_w = p^(k-1) (p-1) n`.
pub fn pless_check(wd: &WeightDistribution) -> PlessReport {
    let count_lhs: u128 = wd.nonzero().map(|e| e.multiplicity as u128).sum();
    let moment_lhs: u128 = wd.nonzero().map(|e| e.weight as u128 * e.multiplicity as u128).sum();
    let p = wd.p as u128;
    let (count_rhs, moment_rhs) = if wd.k == 0 {
        (0, 0)
    } else {
        (p.pow(wd.k as u32) - 1, p.pow(wd.k as u32 - 1) * (p - 1) * wd.n as u128)
    };
    PlessReport { count: (count_lhs, count_rhs), moment: (moment_lhs, moment_rhs) }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RatioReport {
    pub w_min: u64,
    pub w_max: u64,
    pub ratio_ok: bool,
}

/// `p w_min > (p-1) w_max`; `None` for a distribution without nonzero weights.
pub fn secret_sharing_ratio(wd: &WeightDistribution) -> Option<RatioReport> {
    let (w_min, w_max) = (wd.min_weight()?, wd.max_weight()?);
    let p = wd.p as u128;
    Some(RatioReport { w_min, w_max, ratio_ok: p * w_min as u128 > (p - 1) * w_max as u128 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(p: u32, e: usize, theta_form: bool, alpha_pow: u64) -> Code {
        let f = Arc::new(Field::new(p, e).unwrap());
        let form = if theta_form { FormSpec::tr_theta_x2(f.clone()) } else { FormSpec::tr_x2(f.clone()) };
        Code::new(form, f.primitive_pow(alpha_pow)).unwrap()
    }

    #[test]
    fn rejects_zero_alpha_and_degenerate_forms() {
        let f = Arc::new(Field::new(3, 3).unwrap());
        assert_eq!(Code::new(FormSpec::tr_x2(f.clone()), Fx::ZERO).unwrap_err(), CodeError::ZeroAlpha);
        let err = Code::new(FormSpec::zero(f.clone()), f.one()).unwrap_err();
        assert!(matches!(err, CodeError::Form(QformError::Degenerate { .. })));
    }

    #[test]
    fn lengths() {
        for (p, e) in [(3, 3), (5, 3), (3, 4), (3, 2)] {
            let c = code(p, e, false, 0);
            assert_eq!(c.defining_set().len() as u64, c.length_formula());
            assert!(c.defining_set().iter().all(|&(x, y)| c.contains(x, y)));
        }
        assert_eq!(code(5, 3, false, 0).length_formula(), 3124);
        assert_eq!(code(3, 4, false, 0).length_formula(), 2186);
        assert_eq!(code(3, 3, false, 0).length_formula(), 242);
    }

    #[test]
    fn weight_formula_matches_enumeration_f27() {
        for theta in [false, true] {
            for a in [0, 1, 5] {
                let c = code(3, 3, theta, a);
                let f = c.field().clone();
                for u in f.elements() {
                    for v in f.elements() {
                        if u.is_zero() && v.is_zero() {
                            assert_eq!(c.codeword_weight(u, v, Method::Formula), Err(CodeError::ZeroCodeword));
                            continue;
                        }
                        let fw = c.codeword_weight(u, v, Method::Formula).unwrap();
                        let ew = c.codeword_weight(u, v, Method::Enumerate).unwrap();
                        assert_eq!(fw, ew, "u={u:?} v={v:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn sign_exponent_with_e_minus_one_mispredicts_when_p_is_3_mod_4() {
        // at p = 3, e = 3 the exponents (p-1)(e+1)/4 = 2 and (p-1)(e-1)/4 = 1 differ in parity
        let c = code(3, 3, false, 0);
        let f = c.field().clone();
        let u = f.elements().find(|&u| c.weight_case(u, c.alpha()).unwrap() == WeightCase::Generic).unwrap();
        let xu = c.form().profile().solve_xb(u).unwrap();
        let s_alt = c.form_sign() as i64 * f.eta(-(c.form().eval(xu) as i64)) as i64 * -1;
        let alt = 162 - s_alt * 27;
        assert_ne!(alt as u64, c.codeword_weight(u, c.alpha(), Method::Enumerate).unwrap());
    }

    #[test]
    fn weight_cases_cover_everything() {
        let c = code(3, 3, false, 2);
        let f = c.field().clone();
        let alpha = c.alpha();
        assert_eq!(c.weight_case(f.one(), Fx::ZERO).unwrap(), WeightCase::OffLine);
        assert_eq!(c.weight_case(Fx::ZERO, f.scale(2, alpha)).unwrap(), WeightCase::ZeroU);
        assert_eq!(c.codeword_weight(f.one(), Fx::ZERO, Method::Formula).unwrap(), 162);
        assert_eq!(c.line_multiple(f.scale(2, alpha)), Some(2));
        assert_eq!(c.line_multiple(Fx::ZERO), None);
    }

    #[test]
    fn distribution_formula_matches_enumeration() {
        for (p, e, theta) in [(3, 3, false), (3, 3, true), (3, 2, false), (3, 2, true), (5, 2, false), (3, 4, true), (3, 4, false)] {
            let c = code(p, e, theta, 1);
            let a = c.weight_distribution(Method::Formula, &Budget::unlimited()).unwrap();
            let b = c.weight_distribution(Method::Enumerate, &Budget::unlimited()).unwrap();
            assert_eq!(a, b, "(p,e)=({p},{e}) theta={theta}");
            assert_eq!(a.nonzero().count(), 3);
            assert!(pless_check(&a).passed());
        }
    }

    #[test]
    fn quartic_examples() {
        let c = code(3, 4, true, 0);
        assert_eq!(c.form_sign(), 1);
        let wd = c.weight_distribution(Method::Formula, &Budget::unlimited()).unwrap();
        assert_eq!(wd.enumerator(), "1 + 66x^1296 + 6398x^1458 + 96x^1539");
        let c = code(3, 4, false, 1);
        assert_eq!(c.form_sign(), -1);
        let wd = c.weight_distribution(Method::Formula, &Budget::unlimited()).unwrap();
        assert_eq!(wd.enumerator(), "1 + 120x^1377 + 6398x^1458 + 42x^1620");
        assert_eq!((wd.n, wd.k), (2186, 8));
    }

    #[test]
    fn formula_needs_e_at_least_two() {
        let c = code(5, 1, false, 0);
        assert_eq!(c.weight_distribution(Method::Formula, &Budget::unlimited()), Err(CodeError::UnsupportedDegree(1)));
        let wd = c.weight_distribution(Method::Enumerate, &Budget::unlimited()).unwrap();
        assert!(pless_check(&wd).passed());
    }

    #[test]
    fn enumeration_respects_budget() {
        let c = code(3, 3, false, 0);
        let err = c.weight_distribution(Method::Enumerate, &Budget::new(1000)).unwrap_err();
        assert!(matches!(err, CodeError::Budget(_)));
    }

    #[test]
    fn pless_edge_cases() {
        let empty = WeightDistribution::from_histogram(3, 0, 0, BTreeMap::new());
        assert!(pless_check(&empty).passed());
        assert_eq!(secret_sharing_ratio(&empty), None);
        let single = WeightDistribution::from_histogram(3, 4, 1, BTreeMap::from([(3, 2)]));
        assert!(secret_sharing_ratio(&single).unwrap().ratio_ok);
    }

    #[test]
    fn injected_origin_is_detected() {
        let c = code(3, 3, false, 0);
        assert!(c.dual_distance_at_least_2());
        let bad = c.with_injected_origin();
        assert!(!bad.dual_distance_at_least_2());
        assert_eq!(bad.defining_set().len() as u64, c.length_formula() + 1);
        let wd = bad.weight_distribution(Method::Enumerate, &Budget::unlimited()).unwrap();
        assert!(!pless_check(&wd).passed());
    }

    #[test]
    fn flipped_sign_breaks_weight_formula() {
        let f = Arc::new(Field::new(3, 4).unwrap());
        let form = FormSpec::tr_theta_x2(f.clone()).with_flipped_sign();
        let c = Code::new(form, f.one()).unwrap();
        let a = c.weight_distribution(Method::Formula, &Budget::unlimited()).unwrap();
        let b = c.weight_distribution(Method::Enumerate, &Budget::unlimited()).unwrap();
        assert_ne!(a, b);
    }
}
