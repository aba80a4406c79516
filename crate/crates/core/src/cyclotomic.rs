//! Exact arithmetic in `Z[zeta_p]` and the character-sum identities built on
//! the quadratic Gauss sum.
//!
//! Elements are stored on the basis `zeta^0 .. zeta^(p-2)`; the relation
//! `1 + zeta + ... + zeta^(p-1) = 0` removes the top power, so equal numbers
//! have equal coefficient vectors.
//!
//! Half-integer powers of `p* = (-1)^((p-1)/2) p` are never formed. Every
//! identity is multiplied through by powers of the Gauss sum `g` (with
//! `g^2 = p*`) until both sides lie in `Z[zeta_p]`. Which square root of `p*`
//! a formula means is a choice; [`SqrtConvention`] makes it explicit.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;
use thiserror::Error;

use crate::field::{quadratic_character, Field, Fx};
use crate::qform::FormSpec;

/// Coefficient magnitudes are kept below this bound.
pub const COEFF_BOUND: i128 = 1 << 62;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycError {
    #[error("mismatched roots of unity: zeta_{0} vs zeta_{1}")]
    Mismatch(u32, u32),
    #[error("sigma_{z} is not an automorphism of Q(zeta_{p})")]
    NotUnit { z: i64, p: u32 },
    #[error("p = {0} is not an odd prime")]
    BadPrime(u32),
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CycInt {
    p: u32,
    coeffs: Vec<i64>,
}

impl CycInt {
    fn from_full(p: u32, mut full: Vec<i128>) -> Self {
        debug_assert_eq!(full.len(), p as usize);
        let top = full.pop().expect("p >= 3");
        let coeffs = full
            .into_iter()
            .map(|c| {
                let v = c - top;
                assert!(v.abs() < COEFF_BOUND, "cyclotomic coefficient overflow");
                v as i64
            })
            .collect();
        CycInt { p, coeffs }
    }

    pub fn zero(p: u32) -> Self {
        CycInt { p, coeffs: vec![0; p as usize - 1] }
    }

    pub fn from_int(p: u32, n: i64) -> Self {
        let mut c = Self::zero(p);
        c.coeffs[0] = n;
        c
    }

    pub fn one(p: u32) -> Self {
        Self::from_int(p, 1)
    }

    /// `zeta^k`, any integer `k`.
    pub fn zeta_pow(p: u32, k: i64) -> Self {
        Self::from_exponent_counts(p, &{
            let mut h = vec![0i64; p as usize];
            h[k.rem_euclid(p as i64) as usize] = 1;
            h
        })
    }

    /// `sum_k counts[k] zeta^k` for a length-`p` histogram.
    pub fn from_exponent_counts(p: u32, counts: &[i64]) -> Self {
        assert_eq!(counts.len(), p as usize);
        Self::from_full(p, counts.iter().map(|&c| c as i128).collect())
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// The rational integer this element equals, if it is one.
    pub fn as_int(&self) -> Option<i64> {
        self.coeffs[1..].iter().all(|&c| c == 0).then_some(self.coeffs[0])
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self, CycError> {
        self.same_p(o)?;
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.checked_add(*b).expect("overflow")).collect();
        Ok(CycInt { p: self.p, coeffs })
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self, CycError> {
        self.same_p(o)?;
        let p = self.p as usize;
        let mut full = vec![0i128; p];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                full[(i + j) % p] += a as i128 * b as i128;
            }
        }
        Ok(Self::from_full(self.p, full))
    }

    pub fn scale(&self, k: i64) -> Self {
        CycInt { p: self.p, coeffs: self.coeffs.iter().map(|&c| c.checked_mul(k).expect("overflow")).collect() }
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(self.p), |acc, _| &acc * self)
    }

    /// `sigma_z: zeta -> zeta^z`.
    pub fn galois(&self, z: i64) -> Result<Self, CycError> {
        let p = self.p as i64;
        if z.rem_euclid(p) == 0 {
            return Err(CycError::NotUnit { z, p: self.p });
        }
        let mut full = vec![0i128; self.p as usize];
        for (i, &c) in self.coeffs.iter().enumerate() {
            full[(i as i64 * z).rem_euclid(p) as usize] += c as i128;
        }
        Ok(Self::from_full(self.p, full))
    }

    fn same_p(&self, o: &Self) -> Result<(), CycError> {
        if self.p == o.p {
            Ok(())
        } else {
            Err(CycError::Mismatch(self.p, o.p))
        }
    }
}

impl fmt::Debug for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match i {
                0 => format!("{c}"),
                1 => format!("{c}z"),
                _ => format!("{c}z^{i}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl Add for &CycInt {
    type Output = CycInt;
    fn add(self, o: &CycInt) -> CycInt {
        self.checked_add(o).expect("same p")
    }
}

impl Sub for &CycInt {
    type Output = CycInt;
    fn sub(self, o: &CycInt) -> CycInt {
        self.checked_add(&-o).expect("same p")
    }
}

impl Mul for &CycInt {
    type Output = CycInt;
    fn mul(self, o: &CycInt) -> CycInt {
        self.checked_mul(o).expect("same p")
    }
}

impl Neg for &CycInt {
    type Output = CycInt;
    fn neg(self) -> CycInt {
        self.scale(-1)
    }
}

fn require_odd_prime(p: u32) -> Result<(), CycError> {
    if p >= 3 && crate::field::is_prime(p) {
        Ok(())
    } else {
        Err(CycError::BadPrime(p))
    }
}

/// `p* = (-1)^((p-1)/2) p`.
pub fn p_star(p: u32) -> i64 {
    if p % 4 == 1 {
        p as i64
    } else {
        -(p as i64)
    }
}

/// `g = sum_(t=1)^(p-1) eta(t) zeta^t`.
pub fn gauss_sum(p: u32) -> Result<CycInt, CycError> {
    require_odd_prime(p)?;
    let mut h = vec![0i64; p as usize];
    for t in 1..p {
        h[t as usize] = quadratic_character(p, t as i64) as i64;
    }
    Ok(CycInt::from_exponent_counts(p, &h))
}

/// Which root of `p*` the symbol `sqrt(p*)` denotes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SqrtConvention {
    /// `sqrt(p*) = g`.
    Gauss,
    /// `sqrt(p*) = eta(-1) g`, the complex conjugate of `g`.
    Conjugate,
}

impl SqrtConvention {
    pub const ALL: [SqrtConvention; 2] = [SqrtConvention::Gauss, SqrtConvention::Conjugate];

    /// `c` with `sqrt(p*) = c g`.
    pub fn sign(self, p: u32) -> i64 {
        match self {
            SqrtConvention::Gauss => 1,
            SqrtConvention::Conjugate => quadratic_character(p, -1) as i64,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SqrtConvention::Gauss => "sqrt(p*)=g",
            SqrtConvention::Conjugate => "sqrt(p*)=eta(-1)g",
        }
    }
}

/// Outcome of an exhaustive identity sweep.
#[derive(Clone, Debug, Serialize)]
pub struct Sweep {
    pub name: String,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl Sweep {
    fn new(name: impl Into<String>) -> Self {
        Sweep { name: name.into(), cases: 0, failures: Vec::new() }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(detail());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn summary(&self) -> String {
        format!("{}/{} cases hold", self.cases - self.failures.len(), self.cases)
    }
}

/// `sum_x zeta^(f(x) - Tr(bx))` over all of `F_q`.
pub fn weil_sum(spec: &FormSpec, b: Fx) -> CycInt {
    let field: &Field = spec.field();
    let p = field.p();
    let mut hist = vec![0i64; p as usize];
    for x in field.elements() {
        let k = (spec.eval(x) + p - field.trace(field.mul(b, x))) % p;
        hist[k as usize] += 1;
    }
    CycInt::from_exponent_counts(p, &hist)
}

/// Checks, for every `b`, the closed form
/// `sum_x zeta^(f(x) - Tr(bx)) = eps_f q sqrt(p*)^(-R_f) zeta^(-f(x_b))`
/// (zero when `-b/2` is outside the image of `L_f`), cleared by `g^(R_f)`:
/// `g^(R_f) W(b) = c^(R_f) eps_f q zeta^(-f(x_b))` where `sqrt(p*) = c g`.
pub fn weil_identity_sweep(spec: &FormSpec, conv: SqrtConvention) -> Sweep {
    let field = spec.field();
    let p = field.p();
    let prof = spec.profile();
    let g = gauss_sum(p).expect("field characteristic is an odd prime");
    let gr = g.pow(prof.rank as u32);
    let c = conv.sign(p).pow(prof.rank as u32);
    let q = field.q() as i64;
    let mut sweep = Sweep::new(format!("weil sum closed form [{}] at (p,e)=({},{})", conv.label(), p, field.e()));
    for b in field.elements() {
        let lhs = &gr * &weil_sum(spec, b);
        let rhs = match prof.preimage_xb(b) {
            Some(xb) => CycInt::zeta_pow(p, -(spec.eval(xb) as i64)).scale(c * prof.sign as i64 * q),
            None => CycInt::zero(p),
        };
        sweep.record(lhs == rhs, || format!("b={:?}: lhs {lhs}, rhs {rhs}", field.coords(b)));
    }
    sweep
}

/// Left side of the Galois-orbit identity, cleared by `g^r (p*)^r`:
/// `c^r g^r sum_(y in F_p*) sigma_y(g^r zeta^z)`, or without `zeta^z` when
/// `z` is `None`.
pub fn galois_orbit_sum(p: u32, r: u32, z: Option<u32>, conv: SqrtConvention) -> Result<CycInt, CycError> {
    let g = gauss_sum(p)?;
    let gr = g.pow(r);
    let inner = match z {
        Some(z) => &gr * &CycInt::zeta_pow(p, z as i64),
        None => gr.clone(),
    };
    let mut acc = CycInt::zero(p);
    for y in 1..p {
        acc = &acc + &inner.galois(y as i64)?;
    }
    Ok((&gr * &acc).scale(conv.sign(p).pow(r)))
}

/// Claimed value of the orbit sum, cleared the same way:
/// no `z`: `0` (r odd) or `(p-1)(p*)^r` (r even);
/// with `z`: `c^(r-1) eta(z) g^(2r+1)` (r odd) or `-(p*)^r` (r even).
pub fn galois_orbit_claim(p: u32, r: u32, z: Option<u32>, conv: SqrtConvention) -> Result<CycInt, CycError> {
    let g = gauss_sum(p)?;
    let ps = CycInt::from_int(p, p_star(p).pow(r));
    Ok(match (z, r % 2) {
        (None, 1) => CycInt::zero(p),
        (None, _) => ps.scale(p as i64 - 1),
        (Some(z), 1) => g.pow(2 * r + 1).scale(quadratic_character(p, z as i64) as i64 * conv.sign(p).pow(r - 1)),
        (Some(_), _) => -&ps,
    })
}

/// Orbit-sum identity for `1 <= r <= r_max` and every `z`, both cases.
pub fn galois_orbit_sweep(p: u32, r_max: u32, conv: SqrtConvention) -> Result<Sweep, CycError> {
    require_odd_prime(p)?;
    let mut sweep = Sweep::new(format!("galois orbit sums [{}] at p={p}, r<={r_max}", conv.label()));
    for r in 1..=r_max {
        for z in std::iter::once(None).chain((1..p).map(Some)) {
            let lhs = galois_orbit_sum(p, r, z, conv)?;
            let rhs = galois_orbit_claim(p, r, z, conv)?;
            sweep.record(lhs == rhs, || format!("r={r} z={z:?}: lhs {lhs}, rhs {rhs}"));
        }
    }
    Ok(sweep)
}

/// `g^2 = p*` and `sigma_z(g) = eta(z) g` for every `z`.
pub fn gauss_law_sweep(p: u32) -> Result<Sweep, CycError> {
    let g = gauss_sum(p)?;
    let mut sweep = Sweep::new(format!("gauss sum laws at p={p}"));
    let sq = &g * &g;
    sweep.record(sq.as_int() == Some(p_star(p)), || format!("g^2 = {sq}"));
    for z in 1..p as i64 {
        let lhs = g.galois(z)?;
        let rhs = g.scale(quadratic_character(p, z) as i64);
        sweep.record(lhs == rhs, || format!("z={z}: sigma_z(g) = {lhs}"));
    }
    Ok(sweep)
}
