//! The quadratic form `f(x) = sum_i Tr(a_i x^(p^i + 1))` on `F_q` viewed as
//! `F_p^e`: its Gram matrix, rank and sign, the polar form `F`, the
//! linearized map `L_f` with `F(x, y) = Tr(y L_f(x))`, solution counts on
//! subspaces, and totally isotropic subspaces.
//!
//! Every `1/2` is the inverse of 2 mod p, which exists because p is odd.

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Field, FieldError, Fx};
use crate::linalg::{self, Matrix};
use crate::subspaces::{enumerate_subspaces, Budget, BudgetExceeded, Subspace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QformError {
    #[error("form needs {expected} coefficients, got {got}")]
    CoefficientCount { expected: usize, got: usize },
    #[error("quadratic form is degenerate (rank {rank} < {e})")]
    Degenerate { rank: usize, e: usize },
    #[error("no totally isotropic subspace of dimension {r}: {reason}")]
    NoIsotropic { r: usize, reason: String },
    #[error("subspace lives in F_p^{got}, expected F_p^{expected}")]
    AmbientMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

/// Serialized form coefficients: `{a: [[coords of a_0], ..., [coords of a_(e-1)]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormCoeffs {
    pub a: Vec<Vec<u32>>,
}

/// The coefficients `a_0, ..., a_(e-1)` of `f` over a fixed field.
#[derive(Clone, Debug)]
pub struct FormSpec {
    field: Arc<Field>,
    coeffs: Vec<Fx>,
    flip_sign: bool,
    profile: OnceLock<FormProfile>,
}

impl FormSpec {
    pub fn new(field: Arc<Field>, coeffs: Vec<Fx>) -> Result<Self, QformError> {
        if coeffs.len() != field.e() {
            return Err(QformError::CoefficientCount { expected: field.e(), got: coeffs.len() });
        }
        Ok(FormSpec { field, coeffs, flip_sign: false, profile: OnceLock::new() })
    }

    pub fn from_coeffs(field: Arc<Field>, c: &FormCoeffs) -> Result<Self, QformError> {
        let coeffs = c.a.iter().map(|v| field.element(v)).collect::<Result<Vec<_>, _>>()?;
        Self::new(field, coeffs)
    }

    /// `f(x) = Tr(c x^2)`.
    pub fn monomial(field: Arc<Field>, c: Fx) -> Self {
        let mut coeffs = vec![Fx::ZERO; field.e()];
        coeffs[0] = c;
        Self::new(field, coeffs).expect("e coefficients")
    }

    /// `f(x) = Tr(x^2)`.
    pub fn tr_x2(field: Arc<Field>) -> Self {
        let one = field.one();
        Self::monomial(field, one)
    }

    /// `f(x) = Tr(theta x^2)` for the field's primitive element.
    pub fn tr_theta_x2(field: Arc<Field>) -> Self {
        let theta = field.primitive();
        Self::monomial(field, theta)
    }

    pub fn zero(field: Arc<Field>) -> Self {
        Self::monomial(field, Fx::ZERO)
    }

    /// Fault injection for negative controls: the profile reports the
    /// opposite sign. Never used outside self-tests.
    #[doc(hidden)]
    pub fn with_flipped_sign(&self) -> Self {
        FormSpec { field: self.field.clone(), coeffs: self.coeffs.clone(), flip_sign: !self.flip_sign, profile: OnceLock::new() }
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn coeffs(&self) -> &[Fx] {
        &self.coeffs
    }

    pub fn to_coeffs(&self) -> FormCoeffs {
        FormCoeffs { a: self.coeffs.iter().map(|&c| self.field.coords(c)).collect() }
    }

    /// `f(x)` straight from the defining sum of traces.
    pub fn eval(&self, x: Fx) -> u32 {
        let f = &*self.field;
        let mut acc = 0u32;
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            acc += f.trace(f.mul(a, f.mul(f.frobenius(x, i), x)));
        }
        acc % f.p()
    }

    /// Polar form `(f(x + y) - f(x) - f(y)) / 2`.
    pub fn bilinear(&self, x: Fx, y: Fx) -> u32 {
        let f = &*self.field;
        let p = f.p() as u64;
        let s = self.eval(f.add(x, y)) as u64 + 2 * p - self.eval(x) as u64 - self.eval(y) as u64;
        (s % p * f.inv2() as u64 % p) as u32
    }

    /// `L_f(x) = a_0 x + 1/2 sum_(i>=1) (a_i + a_(e-i)^(p^i)) x^(p^i)`, evaluated
    /// as a polynomial.
    pub fn eval_lf_poly(&self, x: Fx) -> Fx {
        let f = &*self.field;
        let e = f.e();
        let mut acc = f.mul(self.coeffs[0], x);
        for i in 1..e {
            let c = f.add(self.coeffs[i], f.frobenius(self.coeffs[e - i], i));
            let term = f.scale(f.inv2(), f.mul(c, f.frobenius(x, i)));
            acc = f.add(acc, term);
        }
        acc
    }

    /// `B[j][k] = 1/2 sum_i Tr(a_i (v_j^(p^i) v_k + v_j v_k^(p^i)))` on the
    /// polynomial basis `v_j = t^j`.
    pub fn gram(&self) -> Matrix {
        let f = &*self.field;
        let e = f.e();
        let p = f.p() as u64;
        let v: Vec<Fx> = (0..e).map(|j| f.basis_element(j)).collect();
        (0..e)
            .map(|j| {
                (0..e)
                    .map(|k| {
                        let mut acc = 0u64;
                        for (i, &a) in self.coeffs.iter().enumerate() {
                            let s = f.add(f.mul(f.frobenius(v[j], i), v[k]), f.mul(v[j], f.frobenius(v[k], i)));
                            acc += f.trace(f.mul(a, s)) as u64;
                        }
                        (acc % p * f.inv2() as u64 % p) as u32
                    })
                    .collect()
            })
            .collect()
    }

    /// Rank, sign, diagonal and `L_f` matrix; computed once and cached.
    pub fn profile(&self) -> &FormProfile {
        self.profile.get_or_init(|| analyze(self))
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.profile().rank == self.field.e()
    }

    pub(crate) fn require_nondegenerate(&self) -> Result<(), QformError> {
        let rank = self.profile().rank;
        if rank == self.field.e() {
            Ok(())
        } else {
            Err(QformError::Degenerate { rank, e: self.field.e() })
        }
    }
}

impl Serialize for FormSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_coeffs().serialize(s)
    }
}

/// Result of congruent diagonalization `M B M^T = diag(d)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagonalization {
    pub diag: Vec<u32>,
    pub transform: Matrix,
}

/// Symmetric Gaussian elimination by congruence over `F_p`, p odd.
///
/// Pivot rule: first nonzero diagonal entry at or after position k; if none,
/// the first nonzero off-diagonal entry `(i, j)` in row-major order, after
/// replacing `v_i` by `v_i + v_j` (which makes the diagonal entry `2 B_ij`).
pub fn diagonalize(p: u32, gram: &[Vec<u32>]) -> Diagonalization {
    let n = gram.len();
    let pm = p as u64;
    let mut a: Matrix = gram.to_vec();
    let mut m = linalg::identity(n);

    let add_multiple = |a: &mut Matrix, m: &mut Matrix, dst: usize, src: usize, c: u64| {
        // v_dst += c v_src, applied as a congruence
        for j in 0..n {
            a[dst][j] = ((a[dst][j] as u64 + c * a[src][j] as u64) % pm) as u32;
        }
        for i in 0..n {
            a[i][dst] = ((a[i][dst] as u64 + c * a[i][src] as u64) % pm) as u32;
        }
        for j in 0..n {
            m[dst][j] = ((m[dst][j] as u64 + c * m[src][j] as u64) % pm) as u32;
        }
    };
    let swap = |a: &mut Matrix, m: &mut Matrix, i: usize, j: usize| {
        if i == j {
            return;
        }
        a.swap(i, j);
        for row in a.iter_mut() {
            row.swap(i, j);
        }
        m.swap(i, j);
    };

    for k in 0..n {
        if let Some(i) = (k..n).find(|&i| a[i][i] != 0) {
            swap(&mut a, &mut m, i, k);
        } else {
            let hit = (k..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find(|&(i, j)| a[i][j] != 0);
            let Some((i, j)) = hit else { break };
            add_multiple(&mut a, &mut m, i, j, 1);
            swap(&mut a, &mut m, i, k);
        }
        let inv = linalg::inv_mod(a[k][k], p) as u64;
        for l in k + 1..n {
            if a[l][k] != 0 {
                let c = (pm - a[l][k] as u64 * inv % pm) % pm;
                add_multiple(&mut a, &mut m, l, k, c);
            }
        }
    }
    Diagonalization { diag: (0..n).map(|i| a[i][i]).collect(), transform: m }
}

/// Rank and sign (`eta` of the product of nonzero diagonal entries, `+1` for
/// rank 0) of a symmetric matrix.
pub fn rank_and_sign(p: u32, gram: &[Vec<u32>]) -> (usize, i8, Vec<u32>) {
    let d = diagonalize(p, gram);
    let nonzero: Vec<u32> = d.diag.into_iter().filter(|&x| x != 0).collect();
    let prod = nonzero.iter().fold(1u64, |acc, &x| acc * x as u64 % p as u64);
    let sign = crate::field::quadratic_character(p, prod as i64);
    (nonzero.len(), sign, nonzero)
}

#[derive(Clone, Debug, Serialize)]
pub struct FormProfile {
    pub gram: Matrix,
    pub rank: usize,
    pub sign: i8,
    pub diag: Vec<u32>,
    /// Columns are the coordinates of `L_f(t^j)`.
    pub lf_matrix: Matrix,
    #[serde(skip)]
    field: Option<Arc<Field>>,
}

pub fn analyze(spec: &FormSpec) -> FormProfile {
    let f = &spec.field;
    let gram = spec.gram();
    let (rank, mut sign, diag) = rank_and_sign(f.p(), &gram);
    if spec.flip_sign {
        sign = -sign;
    }
    let e = f.e();
    let cols: Vec<Vec<u32>> = (0..e).map(|j| f.coords(spec.eval_lf_poly(f.basis_element(j)))).collect();
    let lf_matrix = linalg::transpose(&cols, e);
    FormProfile { gram, rank, sign, diag, lf_matrix, field: Some(f.clone()) }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormOnSubspace {
    pub subspace: Subspace,
    pub rank: usize,
    pub sign: i8,
}

/// How to count `|H ∩ {f = a}|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMethod {
    /// Closed form in terms of the rank and sign of `f` restricted to `H`.
    Formula,
    /// Iterate over every element of `H`.
    Oracle,
}

impl FormProfile {
    fn field(&self) -> &Field {
        self.field.as_deref().expect("profile built by analyze")
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.rank == self.gram.len()
    }

    /// `L_f(x)` through the matrix.
    pub fn eval_lf(&self, x: Fx) -> Fx {
        let f = self.field();
        let v = linalg::mat_vec(f.p(), &self.lf_matrix, &f.coords(x));
        f.pack(&v)
    }

    /// The unique `x_b` with `L_f(x_b) = -b/2`.
    pub fn solve_xb(&self, b: Fx) -> Result<Fx, QformError> {
        if !self.is_nondegenerate() {
            return Err(QformError::Degenerate { rank: self.rank, e: self.gram.len() });
        }
        let f = self.field();
        let target = f.neg(f.scale(f.inv2(), b));
        let x = linalg::solve(f.p(), &self.lf_matrix, &f.coords(target)).expect("L_f invertible for a non-degenerate form");
        Ok(f.pack(&x))
    }

    /// Some `x` with `L_f(x) = -b/2`, or `None` when `-b/2` is outside the
    /// image. Works for degenerate forms too.
    pub fn preimage_xb(&self, b: Fx) -> Option<Fx> {
        let f = self.field();
        let target = f.neg(f.scale(f.inv2(), b));
        let e = f.e();
        linalg::solve_any(f.p(), &self.lf_matrix, &f.coords(target), e).map(|x| f.pack(&x))
    }

    /// `f` restricted to `H`: rank and sign of the Gram matrix on `H`'s basis.
    pub fn restrict(&self, h: &Subspace) -> Result<FormOnSubspace, QformError> {
        let e = self.gram.len();
        if h.ambient_dim() != e {
            return Err(QformError::AmbientMismatch { expected: e, got: h.ambient_dim() });
        }
        let p = self.field().p();
        let hb = h.basis();
        let g: Matrix = hb
            .iter()
            .map(|x| hb.iter().map(|y| linalg::bilinear(p, &self.gram, x, y)).collect())
            .collect();
        let (rank, sign, _) = rank_and_sign(p, &g);
        Ok(FormOnSubspace { subspace: h.clone(), rank, sign })
    }

    /// Largest dimension of a totally isotropic subspace of a non-degenerate
    /// form: `(e-1)/2` for odd `e`; for even `e`, `e/2` when
    /// `sign = (-1)^(e(p-1)/4)` and `(e-2)/2` otherwise.
    pub fn max_isotropic_dim(&self) -> usize {
        let e = self.gram.len();
        if e % 2 == 1 {
            (e - 1) / 2
        } else if self.sign == hyperbolic_sign(self.field().p(), e) {
            e / 2
        } else {
            (e - 2) / 2
        }
    }
}

/// `(-1)^(e(p-1)/4)` for even `e`: the sign a non-degenerate form in `e`
/// variables must have to split into hyperbolic planes.
pub fn hyperbolic_sign(p: u32, e: usize) -> i8 {
    debug_assert!(e % 2 == 0);
    if (e / 2) % 2 == 1 && p % 4 == 3 {
        -1
    } else {
        1
    }
}

fn pow_i(p: u32, k: i64) -> i128 {
    assert!(k >= 0, "negative exponent {k}");
    (p as i128).pow(k as u32)
}

/// `|H ∩ {x : f(x) = a}|`.
pub fn count_on_subspace(spec: &FormSpec, h: &Subspace, a: u32, method: CountMethod) -> Result<u64, QformError> {
    let field = spec.field();
    let p = field.p();
    let a = a % p;
    match method {
        CountMethod::Oracle => {
            if h.ambient_dim() != field.e() {
                return Err(QformError::AmbientMismatch { expected: field.e(), got: h.ambient_dim() });
            }
            Ok(h.elements().filter(|v| spec.eval(field.pack(v)) == a).count() as u64)
        }
        CountMethod::Formula => {
            spec.require_nondegenerate()?;
            let r = h.dim() as i64;
            if r == 0 {
                return Ok(u64::from(a == 0));
            }
            let on_h = spec.profile().restrict(h)?;
            let rh = on_h.rank as i64;
            let eps = on_h.sign as i128;
            let base = pow_i(p, r - 1);
            let count = if rh % 2 == 0 {
                let v = if a == 0 { p as i128 - 1 } else { -1 };
                let eta = field.eta(if (rh / 2) % 2 == 0 { 1 } else { -1 }) as i128;
                base + v * eta * eps * pow_i(p, r - (rh + 2) / 2)
            } else {
                let unit: i64 = if ((rh - 1) / 2) % 2 == 0 { 1 } else { -1 };
                let eta = field.eta(unit * a as i64) as i128;
                base + eta * eps * pow_i(p, r - (rh + 1) / 2)
            };
            Ok(u64::try_from(count).expect("solution counts are non-negative"))
        }
    }
}

/// Extends the totally isotropic set `start` to `target` independent
/// vectors, each new vector isotropic and `F`-orthogonal to everything in
/// `start`, `orth` and the vectors already chosen. Scans `F_q` in index
/// order, so the result is deterministic. `None` if some step finds nothing.
pub(crate) fn extend_isotropic(spec: &FormSpec, start: &[Fx], orth: &[Fx], target: usize) -> Option<Vec<Fx>> {
    let field = spec.field();
    let p = field.p();
    let gram = &spec.profile().gram;
    let polar_row = |b: Fx| linalg::mat_vec(p, gram, &field.coords(b));
    let mut chosen = start.to_vec();
    let mut rows: Vec<Vec<u32>> = chosen.iter().chain(orth).map(|&b| polar_row(b)).collect();
    while chosen.len() < target {
        let span = Subspace::span(p, field.e(), &chosen.iter().map(|&c| field.coords(c)).collect::<Vec<_>>());
        let next = field.elements().skip(1).find(|&x| {
            let cx = field.coords(x);
            spec.eval(x) == 0 && rows.iter().all(|w| linalg::dot(p, &cx, w) == 0) && !span.contains(&cx)
        })?;
        rows.push(polar_row(next));
        chosen.push(next);
    }
    Some(chosen)
}

fn obstruction(spec: &FormSpec, r: usize) -> String {
    let e = spec.field().e();
    let profile = spec.profile();
    if profile.rank != e {
        return format!("form is degenerate (rank {})", profile.rank);
    }
    let max = profile.max_isotropic_dim();
    if e % 2 == 0 && r == e / 2 && r > max {
        format!(
            "a half-dimensional isotropic subspace needs sign {} but the form has sign {}",
            hyperbolic_sign(spec.field().p(), e),
            profile.sign
        )
    } else {
        format!("requested dimension exceeds the maximal isotropic dimension {max}")
    }
}

/// An `r`-dimensional subspace on which `f` vanishes identically.
///
/// Greedy extension first; for `e <= 4` an exhaustive search over all
/// `r`-dimensional subspaces backs it up. The result is checked element by
/// element before it is returned.
pub fn find_isotropic(spec: &FormSpec, r: usize) -> Result<Subspace, QformError> {
    spec.require_nondegenerate()?;
    let field = spec.field();
    let e = field.e();
    if r > e {
        return Err(QformError::NoIsotropic { r, reason: format!("dimension exceeds {e}") });
    }
    let found = match extend_isotropic(spec, &[], &[], r) {
        Some(vs) => Some(Subspace::span(field.p(), e, &vs.iter().map(|&v| field.coords(v)).collect::<Vec<_>>())),
        None if e <= 4 => find_isotropic_exhaustive(spec, r, &Budget::unlimited())?,
        None => None,
    };
    let Some(j) = found else {
        return Err(QformError::NoIsotropic { r, reason: obstruction(spec, r) });
    };
    assert!(
        j.elements().all(|v| spec.eval(field.pack(&v)) == 0),
        "isotropic search returned a subspace where f does not vanish"
    );
    Ok(j)
}

/// First `r`-dimensional totally isotropic subspace in enumeration order,
/// by checking every subspace.
pub fn find_isotropic_exhaustive(spec: &FormSpec, r: usize, budget: &Budget) -> Result<Option<Subspace>, QformError> {
    let field = spec.field();
    let mut subs = enumerate_subspaces(field.p(), field.e(), r, budget)?;
    Ok(subs.find(|h| h.elements().all(|v| spec.eval(field.pack(&v)) == 0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspaces::enumerate_subspaces;

    fn field(p: u32, e: usize) -> Arc<Field> {
        Arc::new(Field::new(p, e).unwrap())
    }

    fn sample_forms(f: &Arc<Field>) -> Vec<FormSpec> {
        let e = f.e();
        let mut out = vec![FormSpec::tr_x2(f.clone()), FormSpec::tr_theta_x2(f.clone())];
        // a few mixed forms with deterministic coefficients
        for seed in 1..4u64 {
            let coeffs = (0..e).map(|i| f.primitive_pow(seed * 7 + i as u64 * 5)).collect();
            out.push(FormSpec::new(f.clone(), coeffs).unwrap());
        }
        out
    }

    #[test]
    fn form_vanishes_at_zero_and_is_homogeneous() {
        let f = field(3, 3);
        for spec in sample_forms(&f) {
            assert_eq!(spec.eval(Fx::ZERO), 0);
            for x in f.elements() {
                for c in 0..3u32 {
                    let lhs = spec.eval(f.scale(c, x));
                    assert_eq!(lhs, c * c * spec.eval(x) % 3);
                }
            }
        }
    }

    #[test]
    fn tr_x2_is_trace_of_square() {
        let f = field(5, 3);
        let spec = FormSpec::tr_x2(f.clone());
        for x in f.elements() {
            assert_eq!(spec.eval(x), f.trace(f.mul(x, x)));
        }
    }

    #[test]
    fn gram_reproduces_form() {
        for (p, e) in [(3, 3), (5, 3), (3, 4)] {
            let f = field(p, e);
            for spec in sample_forms(&f) {
                let b = spec.gram();
                for i in 0..e {
                    for j in 0..e {
                        assert_eq!(b[i][j], b[j][i]);
                    }
                }
                for x in f.elements() {
                    let c = f.coords(x);
                    assert_eq!(linalg::bilinear(p, &b, &c, &c), spec.eval(x));
                }
            }
        }
    }

    #[test]
    fn zero_form_profile() {
        let f = field(3, 3);
        let pr = analyze(&FormSpec::zero(f));
        assert_eq!(pr.rank, 0);
        assert_eq!(pr.sign, 1);
    }

    #[test]
    fn quartic_signs_over_f3() {
        let f = field(3, 4);
        let theta = analyze(&FormSpec::tr_theta_x2(f.clone()));
        assert_eq!((theta.rank, theta.sign), (4, 1));
        let plain = analyze(&FormSpec::tr_x2(f));
        assert_eq!((plain.rank, plain.sign), (4, -1));
    }

    #[test]
    fn diagonalization_is_congruent() {
        let f = field(3, 4);
        for spec in sample_forms(&f) {
            let b = spec.gram();
            let d = diagonalize(3, &b);
            let mbm = linalg::mat_mul(3, &linalg::mat_mul(3, &d.transform, &b), &linalg::transpose(&d.transform, 4));
            for i in 0..4 {
                for j in 0..4 {
                    let want = if i == j { d.diag[i] } else { 0 };
                    assert_eq!(mbm[i][j], want);
                }
            }
            assert_ne!(linalg::determinant(3, &d.transform), 0);
        }
    }

    #[test]
    fn diagonalization_handles_zero_diagonal() {
        // hyperbolic plane x y
        let b = vec![vec![0, 1], vec![1, 0]];
        let (rank, sign, _) = rank_and_sign(5, &b);
        assert_eq!(rank, 2);
        // -1 is a square mod 5, and the hyperbolic plane has discriminant -1
        assert_eq!(sign, 1);
        let (_, sign3, _) = rank_and_sign(3, &b);
        assert_eq!(sign3, -1);
    }

    #[test]
    fn sign_is_invariant_under_basis_change() {
        let f = field(5, 3);
        for spec in sample_forms(&f) {
            let b = spec.gram();
            let (r0, s0, _) = rank_and_sign(5, &b);
            let perms = [[0, 1, 2], [2, 1, 0], [1, 2, 0], [1, 0, 2]];
            for perm in perms {
                let mut m = vec![vec![0u32; 3]; 3];
                for (i, &j) in perm.iter().enumerate() {
                    m[i][j] = 1;
                }
                m[0][2] = (m[0][2] + 3) % 5;
                let c = linalg::mat_mul(5, &linalg::mat_mul(5, &m, &b), &linalg::transpose(&m, 3));
                let (r1, s1, _) = rank_and_sign(5, &c);
                assert_eq!((r0, s0), (r1, s1));
            }
        }
    }

    #[test]
    fn polar_form_identities() {
        for (p, e) in [(3, 3), (5, 3)] {
            let f = field(p, e);
            for spec in sample_forms(&f) {
                let prof = spec.profile();
                for x in f.elements() {
                    assert_eq!(spec.bilinear(x, Fx::ZERO), 0);
                    assert_eq!(spec.bilinear(x, x), spec.eval(x));
                    let lx = prof.eval_lf(x);
                    for y in f.elements() {
                        assert_eq!(spec.bilinear(x, y), spec.bilinear(y, x));
                        assert_eq!(spec.bilinear(x, y), f.trace(f.mul(y, lx)));
                    }
                }
            }
        }
    }

    #[test]
    fn lf_matrix_matches_polynomial() {
        let f = field(3, 4);
        for spec in sample_forms(&f) {
            let prof = spec.profile();
            assert_eq!(prof.eval_lf(Fx::ZERO), Fx::ZERO);
            for x in f.elements() {
                assert_eq!(prof.eval_lf(x), spec.eval_lf_poly(x));
            }
        }
        let plain = FormSpec::tr_x2(f.clone());
        for x in f.elements() {
            assert_eq!(plain.profile().eval_lf(x), x);
        }
    }

    #[test]
    fn nondegenerate_iff_lf_invertible() {
        for (p, e) in [(3, 3), (3, 4), (5, 2)] {
            let f = field(p, e);
            for spec in sample_forms(&f).into_iter().chain([FormSpec::zero(f.clone())]) {
                let prof = spec.profile();
                let kernel_trivial = f.elements().filter(|&x| prof.eval_lf(x).is_zero()).count() == 1;
                assert_eq!(prof.is_nondegenerate(), kernel_trivial);
                assert_eq!(prof.is_nondegenerate(), linalg::rank(p, &prof.lf_matrix) == e);
            }
        }
    }

    #[test]
    fn solve_xb_round_trips() {
        let f = field(3, 3);
        let plain = FormSpec::tr_x2(f.clone());
        assert_eq!(plain.profile().solve_xb(Fx::ZERO).unwrap(), Fx::ZERO);
        for b in f.elements() {
            assert_eq!(plain.profile().solve_xb(b).unwrap(), f.neg(f.scale(f.inv2(), b)));
        }
        for spec in sample_forms(&f).into_iter().filter(|s| s.is_nondegenerate()) {
            let prof = spec.profile();
            for b in f.elements() {
                let xb = prof.solve_xb(b).unwrap();
                assert_eq!(prof.eval_lf(xb), f.neg(f.scale(f.inv2(), b)));
            }
        }
        let zero = FormSpec::zero(f);
        assert!(matches!(zero.profile().solve_xb(Fx::ZERO), Err(QformError::Degenerate { .. })));
    }

    #[test]
    fn restriction_extremes() {
        let f = field(3, 3);
        let spec = FormSpec::tr_x2(f);
        let prof = spec.profile();
        let z = prof.restrict(&Subspace::zero(3, 3)).unwrap();
        assert_eq!((z.rank, z.sign), (0, 1));
        let full = prof.restrict(&Subspace::full(3, 3)).unwrap();
        assert_eq!((full.rank, full.sign), (prof.rank, prof.sign));
    }

    #[test]
    fn counts_on_trivial_and_full_subspaces() {
        let f = field(3, 3);
        let spec = FormSpec::tr_x2(f.clone());
        for a in 0..3 {
            let want = u64::from(a == 0);
            assert_eq!(count_on_subspace(&spec, &Subspace::zero(3, 3), a, CountMethod::Formula).unwrap(), want);
            assert_eq!(count_on_subspace(&spec, &Subspace::zero(3, 3), a, CountMethod::Oracle).unwrap(), want);
        }
        // odd e: f = 0 has p^(e-1) solutions in all of F_q
        let full = count_on_subspace(&spec, &Subspace::full(3, 3), 0, CountMethod::Formula).unwrap();
        assert_eq!(full, 9);
    }

    #[test]
    fn count_formula_matches_oracle_f27() {
        let f = field(3, 3);
        for spec in sample_forms(&f).into_iter().filter(|s| s.is_nondegenerate()) {
            for r in 0..=3 {
                for h in enumerate_subspaces(3, 3, r, &Budget::unlimited()).unwrap() {
                    for a in 0..3 {
                        let formula = count_on_subspace(&spec, &h, a, CountMethod::Formula).unwrap();
                        let oracle = count_on_subspace(&spec, &h, a, CountMethod::Oracle).unwrap();
                        assert_eq!(formula, oracle, "r={r} a={a} h={h:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn formula_rejects_degenerate_forms() {
        let f = field(3, 3);
        let zero = FormSpec::zero(f);
        let err = count_on_subspace(&zero, &Subspace::full(3, 3), 0, CountMethod::Formula).unwrap_err();
        assert_eq!(err, QformError::Degenerate { rank: 0, e: 3 });
    }

    #[test]
    fn isotropic_subspaces() {
        let f = field(3, 3);
        for spec in sample_forms(&f).into_iter().filter(|s| s.is_nondegenerate()) {
            assert_eq!(find_isotropic(&spec, 0).unwrap().dim(), 0);
            let line = find_isotropic(&spec, 1).unwrap();
            assert_eq!(line.dim(), 1);
            assert!(find_isotropic(&spec, 2).is_err());
        }
    }

    #[test]
    fn half_dimensional_isotropic_depends_on_sign() {
        let f = field(3, 4);
        let split = FormSpec::tr_theta_x2(f.clone());
        assert_eq!(split.profile().sign, hyperbolic_sign(3, 4));
        let plane = find_isotropic(&split, 2).unwrap();
        assert_eq!(plane.dim(), 2);
        assert!(find_isotropic_exhaustive(&split, 2, &Budget::unlimited()).unwrap().is_some());

        let nonsplit = FormSpec::tr_x2(f);
        assert_ne!(nonsplit.profile().sign, hyperbolic_sign(3, 4));
        assert!(find_isotropic_exhaustive(&nonsplit, 2, &Budget::unlimited()).unwrap().is_none());
        match find_isotropic(&nonsplit, 2) {
            Err(QformError::NoIsotropic { r: 2, reason }) => assert!(reason.contains("sign")),
            other => panic!("expected a sign obstruction, got {other:?}"),
        }
        assert_eq!(find_isotropic(&nonsplit, 1).unwrap().dim(), 1);
    }
}
