//! Arithmetic in the prime field `F_p` and its extension `F_q`, `q = p^e`.
//!
//! Elements of `F_q` are coordinate vectors over the polynomial basis
//! `1, t, ..., t^(e-1)`, packed into a single integer `sum c_i p^i` so that
//! lookup tables can be indexed directly. The packing is an implementation
//! detail; [`Field::coords`] and [`Field::element`] convert in both
//! directions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Fields larger than this get no log/exp tables.
const LOG_TABLE_LIMIT: usize = 1 << 20;

/// Soft cap on the field size.
pub const MAX_FIELD_SIZE: usize = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic {0} is not a prime")]
    NotPrime(u32),
    #[error("characteristic 2 is not supported (odd p required)")]
    EvenCharacteristic,
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field of size {p}^{e} exceeds the supported size {MAX_FIELD_SIZE}")]
    TooLarge { p: u32, e: usize },
    #[error("modulus must be monic of degree {expected} (got {got} coefficients)")]
    BadModulusShape { expected: usize, got: usize },
    #[error("modulus coefficient {0} is not reduced mod p")]
    UnreducedCoefficient(u32),
    #[error("modulus {0:?} is reducible over F_p")]
    Reducible(Vec<u32>),
    #[error("element has {got} coordinates, expected {expected}")]
    BadCoordinates { expected: usize, got: usize },
    #[error("coordinate {0} is not reduced mod p")]
    UnreducedCoordinate(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("primitive element {0:?} does not have order q - 1")]
    NotPrimitive(Vec<u32>),
}

/// An element of `F_q` as a packed coordinate vector.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fx(u32);

impl Fx {
    pub const ZERO: Fx = Fx(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_index(i: usize) -> Fx {
        Fx(i as u32)
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Serializable description of a field: `{p, e, modulus: [c0..ce], primitive: [..]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub e: usize,
    pub modulus: Vec<u32>,
    pub primitive: Vec<u32>,
}

/// The finite field `F_{p^e}` with a fixed modulus and primitive element.
#[derive(Clone, Debug)]
pub struct Field {
    p: u32,
    e: usize,
    q: usize,
    modulus: Vec<u32>,
    primitive: Fx,
    pow_p: Vec<usize>,
    inv2: u32,
    trace_basis: Vec<u32>,
    log: Vec<u32>,
    exp: Vec<Fx>,
    squares: Vec<bool>,
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `a^n mod p`.
pub fn pow_mod(a: u32, mut n: u64, p: u32) -> u32 {
    let p = p as u64;
    let mut base = a as u64 % p;
    let mut acc = 1u64 % p;
    while n > 0 {
        if n & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        n >>= 1;
    }
    acc as u32
}

/// Inverse in `F_p`; `a` must be nonzero mod `p`.
pub fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(a % p != 0);
    pow_mod(a, (p - 2) as u64, p)
}

/// Quadratic character of `F_p`, extended by zero at zero.
pub fn quadratic_character(p: u32, a: i64) -> i8 {
    let a = a.rem_euclid(p as i64) as u32;
    if a == 0 {
        0
    } else if pow_mod(a, ((p - 1) / 2) as u64, p) == 1 {
        1
    } else {
        -1
    }
}

// Dense polynomials over F_p, constant term first, no trailing zeros.
fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = inv_mod(b[db], p) as u64;
    while r.len() > db {
        let dr = r.len() - 1;
        let c = r[dr] as u64 * lead_inv % p as u64;
        let shift = dr - db;
        for (i, &bi) in b.iter().enumerate() {
            let sub = c * bi as u64 % p as u64;
            r[shift + i] = ((r[shift + i] as u64 + p as u64 - sub) % p as u64) as u32;
        }
        poly_trim(&mut r);
    }
    r
}

/// Irreducibility by trial division against every monic polynomial of
/// degree `1..=deg/2`.
pub fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let deg = modulus.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as usize).pow(d as u32);
        for idx in 0..count {
            let mut div = Vec::with_capacity(d + 1);
            let mut k = idx;
            for _ in 0..d {
                div.push((k % p as usize) as u32);
                k /= p as usize;
            }
            div.push(1);
            if poly_rem(modulus, &div, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Tuples over `0..p` of length `len` in lexicographic order (first
/// coordinate most significant).
fn lex_tuples(p: u32, len: usize) -> impl Iterator<Item = Vec<u32>> {
    let total = (p as usize).pow(len as u32);
    (0..total).map(move |mut k| {
        let mut t = vec![0u32; len];
        for slot in t.iter_mut().rev() {
            *slot = (k % p as usize) as u32;
            k /= p as usize;
        }
        t
    })
}

impl Field {
    /// Builds `F_{p^e}` with the lexicographically smallest monic irreducible
    /// modulus (coefficient tuple `(c_0, ..., c_{e-1})`, `c_0` most
    /// significant) and the lexicographically smallest primitive element.
    pub fn new(p: u32, e: usize) -> Result<Field, FieldError> {
        Self::check_params(p, e)?;
        let modulus = lex_tuples(p, e)
            .map(|mut c| {
                c.push(1);
                c
            })
            .find(|m| is_irreducible(m, p))
            .expect("an irreducible polynomial of every degree exists");
        Self::build(p, e, modulus, None)
    }

    /// Builds `F_{p^e}` from a user-supplied modulus `[c_0, ..., c_e]`.
    pub fn with_modulus(p: u32, modulus: &[u32]) -> Result<Field, FieldError> {
        if modulus.len() < 2 {
            return Err(FieldError::BadModulusShape { expected: 1, got: modulus.len() });
        }
        let e = modulus.len() - 1;
        Self::check_params(p, e)?;
        if let Some(&c) = modulus.iter().find(|&&c| c >= p) {
            return Err(FieldError::UnreducedCoefficient(c));
        }
        if modulus[e] != 1 {
            return Err(FieldError::BadModulusShape { expected: e, got: modulus.len() });
        }
        if !is_irreducible(modulus, p) {
            return Err(FieldError::Reducible(modulus.to_vec()));
        }
        Self::build(p, e, modulus.to_vec(), None)
    }

    /// Rebuilds a field from its serialized description, validating every
    /// invariant (including the order of the primitive element).
    pub fn from_spec(spec: &FieldSpec) -> Result<Field, FieldError> {
        let f = Self::with_modulus(spec.p, &spec.modulus)?;
        if f.e != spec.e {
            return Err(FieldError::BadModulusShape { expected: spec.e, got: spec.modulus.len() });
        }
        let prim = f.element(&spec.primitive)?;
        if !f.has_full_order(prim) {
            return Err(FieldError::NotPrimitive(spec.primitive.clone()));
        }
        Self::build(f.p, f.e, f.modulus, Some(prim))
    }

    fn check_params(p: u32, e: usize) -> Result<(), FieldError> {
        if p == 2 {
            return Err(FieldError::EvenCharacteristic);
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if e == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q = (p as u128).checked_pow(e as u32);
        match q {
            Some(q) if q <= MAX_FIELD_SIZE as u128 => Ok(()),
            _ => Err(FieldError::TooLarge { p, e }),
        }
    }

    fn build(p: u32, e: usize, modulus: Vec<u32>, primitive: Option<Fx>) -> Result<Field, FieldError> {
        let q = (p as usize).pow(e as u32);
        let pow_p = (0..=e).map(|i| (p as usize).pow(i as u32)).collect();
        let squares = {
            let mut s = vec![false; p as usize];
            for x in 1..p as u64 {
                s[(x * x % p as u64) as usize] = true;
            }
            s
        };
        let mut field = Field {
            p,
            e,
            q,
            modulus,
            primitive: Fx(0),
            pow_p,
            inv2: inv_mod(2, p),
            trace_basis: Vec::new(),
            log: Vec::new(),
            exp: Vec::new(),
            squares,
        };
        field.primitive = match primitive {
            Some(g) => g,
            None => field.find_primitive(),
        };
        field.trace_basis = (0..e)
            .map(|j| {
                let tj = field.basis_element(j);
                let mut acc = Fx::ZERO;
                let mut x = tj;
                for _ in 0..e {
                    acc = field.add(acc, x);
                    x = field.pow_slow(x, p as u64);
                }
                debug_assert!(acc.index() < p as usize, "trace must land in F_p");
                acc.0
            })
            .collect();
        if q <= LOG_TABLE_LIMIT {
            let mut log = vec![0u32; q];
            let mut exp = Vec::with_capacity(q - 1);
            let mut x = field.one();
            for k in 0..q - 1 {
                exp.push(x);
                log[x.index()] = k as u32;
                x = field.mul_slow(x, field.primitive);
            }
            field.log = log;
            field.exp = exp;
        }
        Ok(field)
    }

    fn has_full_order(&self, x: Fx) -> bool {
        if x.is_zero() {
            return false;
        }
        let order = (self.q - 1) as u64;
        if order == 1 {
            return x == self.one();
        }
        self.pow_slow(x, order) == self.one()
            && prime_factors(order)
                .into_iter()
                .all(|l| self.pow_slow(x, order / l) != self.one())
    }

    fn find_primitive(&self) -> Fx {
        lex_tuples(self.p, self.e)
            .map(|c| self.element(&c).expect("tuple has e coordinates"))
            .find(|&x| self.has_full_order(x))
            .expect("F_q* is cyclic")
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn e(&self) -> usize {
        self.e
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The fixed primitive element, written `theta` in configs.
    pub fn primitive(&self) -> Fx {
        self.primitive
    }

    pub fn inv2(&self) -> u32 {
        self.inv2
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            p: self.p,
            e: self.e,
            modulus: self.modulus.clone(),
            primitive: self.coords(self.primitive),
        }
    }

    pub fn zero(&self) -> Fx {
        Fx::ZERO
    }

    pub fn one(&self) -> Fx {
        Fx(1)
    }

    /// Embeds `c mod p` as an element of the prime subfield.
    pub fn constant(&self, c: i64) -> Fx {
        Fx(c.rem_euclid(self.p as i64) as u32)
    }

    /// `t^j`, the j-th polynomial basis vector.
    pub fn basis_element(&self, j: usize) -> Fx {
        Fx(self.pow_p[j] as u32)
    }

    pub fn in_prime_subfield(&self, x: Fx) -> bool {
        x.index() < self.p as usize
    }

    pub fn elements(&self) -> impl Iterator<Item = Fx> {
        (0..self.q as u32).map(Fx)
    }

    pub fn coords(&self, x: Fx) -> Vec<u32> {
        let mut k = x.0;
        (0..self.e)
            .map(|_| {
                let c = k % self.p;
                k /= self.p;
                c
            })
            .collect()
    }

    pub fn element(&self, coords: &[u32]) -> Result<Fx, FieldError> {
        if coords.len() != self.e {
            return Err(FieldError::BadCoordinates { expected: self.e, got: coords.len() });
        }
        if let Some(&c) = coords.iter().find(|&&c| c >= self.p) {
            return Err(FieldError::UnreducedCoordinate(c));
        }
        Ok(self.pack(coords))
    }

    /// Packs coordinates, reducing each mod p.
    pub fn pack(&self, coords: &[u32]) -> Fx {
        let mut acc = 0u32;
        for (i, &c) in coords.iter().enumerate().take(self.e) {
            acc += (c % self.p) * self.pow_p[i] as u32;
        }
        Fx(acc)
    }

    pub fn add(&self, x: Fx, y: Fx) -> Fx {
        let (mut a, mut b) = (x.0, y.0);
        let mut acc = 0u32;
        let mut place = 1u32;
        for _ in 0..self.e {
            let s = (a % self.p + b % self.p) % self.p;
            acc += s * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        Fx(acc)
    }

    pub fn neg(&self, x: Fx) -> Fx {
        self.scale(self.p - 1, x)
    }

    pub fn sub(&self, x: Fx, y: Fx) -> Fx {
        self.add(x, self.neg(y))
    }

    /// `c * x` for `c` in the prime field.
    pub fn scale(&self, c: u32, x: Fx) -> Fx {
        let c = c % self.p;
        let mut a = x.0;
        let mut acc = 0u32;
        let mut place = 1u32;
        for _ in 0..self.e {
            acc += (a % self.p * c % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        Fx(acc)
    }

    fn mul_slow(&self, x: Fx, y: Fx) -> Fx {
        let a = self.coords(x);
        let b = self.coords(y);
        let p = self.p as u64;
        let mut prod = vec![0u64; 2 * self.e - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + ai as u64 * bj as u64) % p;
            }
        }
        // reduce by the monic modulus from the top down
        for d in (self.e..prod.len()).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for k in 0..self.e {
                let sub = c * self.modulus[k] as u64 % p;
                prod[d - self.e + k] = (prod[d - self.e + k] + p - sub) % p;
            }
        }
        let coords: Vec<u32> = prod[..self.e].iter().map(|&c| c as u32).collect();
        self.pack(&coords)
    }

    fn pow_slow(&self, x: Fx, mut n: u64) -> Fx {
        let mut base = x;
        let mut acc = self.one();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            n >>= 1;
        }
        acc
    }

    pub fn mul(&self, x: Fx, y: Fx) -> Fx {
        if self.log.is_empty() {
            return self.mul_slow(x, y);
        }
        if x.is_zero() || y.is_zero() {
            return Fx::ZERO;
        }
        let k = (self.log[x.index()] as usize + self.log[y.index()] as usize) % (self.q - 1);
        self.exp[k]
    }

    pub fn inv(&self, x: Fx) -> Result<Fx, FieldError> {
        if x.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if self.log.is_empty() {
            return Ok(self.pow_slow(x, (self.q - 2) as u64));
        }
        let n = self.q - 1;
        Ok(self.exp[(n - self.log[x.index()] as usize) % n])
    }

    pub fn pow(&self, x: Fx, n: u64) -> Fx {
        if self.log.is_empty() {
            return self.pow_slow(x, n);
        }
        if n == 0 {
            return self.one();
        }
        if x.is_zero() {
            return Fx::ZERO;
        }
        let order = (self.q - 1) as u128;
        let k = (self.log[x.index()] as u128 * n as u128) % order;
        self.exp[k as usize]
    }

    /// `theta^k` for the fixed primitive element.
    pub fn primitive_pow(&self, k: u64) -> Fx {
        self.pow(self.primitive, k)
    }

    /// `x^(p^i)`; the exponent is taken mod `e`.
    pub fn frobenius(&self, x: Fx, i: usize) -> Fx {
        let i = i % self.e;
        if i == 0 {
            return x;
        }
        self.pow(x, self.pow_p[i] as u64)
    }

    /// Absolute trace `F_q -> F_p`, as an integer in `[0, p)`.
    pub fn trace(&self, x: Fx) -> u32 {
        let mut k = x.0;
        let mut acc = 0u64;
        for &tb in &self.trace_basis {
            acc += (k % self.p) as u64 * tb as u64;
            k /= self.p;
        }
        (acc % self.p as u64) as u32
    }

    /// Gram matrix of the trace pairing on the polynomial basis:
    /// `T[i][j] = Tr(t^i t^j)`.
    pub fn trace_gram(&self) -> Vec<Vec<u32>> {
        (0..self.e)
            .map(|i| {
                (0..self.e)
                    .map(|j| self.trace(self.mul(self.basis_element(i), self.basis_element(j))))
                    .collect()
            })
            .collect()
    }

    /// Quadratic character of an element of `F_p`.
    pub fn eta(&self, a: i64) -> i8 {
        let a = a.rem_euclid(self.p as i64) as usize;
        if a == 0 {
            0
        } else if self.squares[a] {
            1
        } else {
            -1
        }
    }

    /// `p^k` as `usize`.
    pub fn p_pow(&self, k: usize) -> usize {
        (self.p as usize).pow(k as u32)
    }
}
