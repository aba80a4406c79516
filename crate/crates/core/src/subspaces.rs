//! `F_p`-subspaces of `F_p^m` in canonical reduced row-echelon form, their
//! streamed enumeration, element iteration and annihilators under a
//! bilinear pairing.
//!
//! Enumeration order: pivot-column sets in lexicographic order; within a
//! pivot set the free entries (row-major) run as an odometer with the last
//! entry fastest. That is lexicographic order over the RREF matrices of a
//! fixed pivot set. Enumeration is split into [`Shard`]s so it can be
//! spread over threads and merged deterministically.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::field::Field;
use crate::linalg::{self, Matrix};

/// Default cap on enumeration work units (subspaces times per-subspace work).
pub const DEFAULT_BUDGET: u128 = 100_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{what}: projected cost {cost} work units exceeds the budget of {cap}")]
pub struct BudgetExceeded {
    pub what: String,
    pub cost: u128,
    pub cap: u128,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    cap: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { cap: DEFAULT_BUDGET }
    }
}

impl Budget {
    pub fn new(cap: u128) -> Self {
        Budget { cap }
    }

    pub fn unlimited() -> Self {
        Budget { cap: u128::MAX }
    }

    pub fn cap(&self) -> u128 {
        self.cap
    }

    pub fn check(&self, cost: u128, what: impl Into<String>) -> Result<(), BudgetExceeded> {
        if cost > self.cap {
            Err(BudgetExceeded { what: what.into(), cost, cap: self.cap })
        } else {
            Ok(())
        }
    }
}

/// Gaussian binomial coefficient: the number of `r`-dimensional subspaces
/// of `F_p^m`. Saturates at `u128::MAX`.
pub fn gaussian_binomial(p: u32, m: usize, r: usize) -> u128 {
    if r > m {
        return 0;
    }
    let p = p as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..r {
        let a = p.checked_pow((m - i) as u32).map(|v| v - 1);
        let b = p.checked_pow((i + 1) as u32).map(|v| v - 1);
        match (a.and_then(|a| num.checked_mul(a)), b.and_then(|b| den.checked_mul(b))) {
            (Some(n), Some(d)) => {
                num = n;
                den = d;
                let g = gcd(num, den);
                num /= g;
                den /= g;
            }
            _ => return u128::MAX,
        }
    }
    num / den
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// A subspace of `F_p^m`, stored as its RREF basis (which makes equality
/// of row spaces plain equality).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    p: u32,
    m: usize,
    basis: Matrix,
}

impl Serialize for Subspace {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Subspace", 3)?;
        st.serialize_field("m", &self.m)?;
        st.serialize_field("r", &self.dim())?;
        st.serialize_field("basis", &self.basis)?;
        st.end()
    }
}

impl Subspace {
    pub fn zero(p: u32, m: usize) -> Self {
        Subspace { p, m, basis: Vec::new() }
    }

    pub fn full(p: u32, m: usize) -> Self {
        Subspace { p, m, basis: linalg::identity(m) }
    }

    /// Span of arbitrary generators (entries reduced mod p).
    pub fn span(p: u32, m: usize, generators: &[Vec<u32>]) -> Self {
        let mut rows: Matrix = generators
            .iter()
            .map(|g| {
                assert_eq!(g.len(), m, "generator length must equal the ambient dimension");
                g.iter().map(|&x| x % p).collect()
            })
            .collect();
        linalg::rref(p, &mut rows);
        Subspace { p, m, basis: rows }
    }

    pub(crate) fn from_rref(p: u32, m: usize, basis: Matrix) -> Self {
        Subspace { p, m, basis }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn ambient_dim(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        let mut rows = self.basis.clone();
        rows.push(v.iter().map(|&x| x % self.p).collect());
        linalg::rank(self.p, &rows) == self.dim()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|b| other.contains(b))
    }

    /// Number of elements, `p^r`, saturating.
    pub fn size(&self) -> u128 {
        (self.p as u128).checked_pow(self.dim() as u32).unwrap_or(u128::MAX)
    }

    /// All `p^r` vectors of the subspace, each exactly once.
    pub fn elements(&self) -> Elements<'_> {
        Elements { space: self, coeffs: vec![0; self.dim()], done: false }
    }

    /// Like [`Subspace::elements`] but refuses to start when `p^r` exceeds
    /// the budget.
    pub fn try_elements(&self, budget: &Budget) -> Result<Elements<'_>, BudgetExceeded> {
        budget.check(self.size(), format!("elements of a {}-dimensional subspace", self.dim()))?;
        Ok(self.elements())
    }

    /// Annihilator `{y : <b, y> = 0 for all b in self}`.
    pub fn dual(&self, pairing: &Pairing) -> Subspace {
        assert_eq!(pairing.dim(), self.m, "pairing dimension mismatch");
        let constraints = linalg::mat_mul(self.p, &self.basis, &pairing.gram);
        let basis = linalg::nullspace(self.p, &constraints, self.m);
        Subspace { p: self.p, m: self.m, basis }
    }
}

pub struct Elements<'a> {
    space: &'a Subspace,
    coeffs: Vec<u32>,
    done: bool,
}

impl Iterator for Elements<'_> {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        if self.done {
            return None;
        }
        let p = self.space.p as u64;
        let mut v = vec![0u64; self.space.m];
        for (c, row) in self.coeffs.iter().zip(&self.space.basis) {
            if *c != 0 {
                for (acc, &b) in v.iter_mut().zip(row) {
                    *acc += *c as u64 * b as u64;
                }
            }
        }
        let out = v.into_iter().map(|x| (x % p) as u32).collect();
        // odometer, last coefficient fastest
        let mut i = self.coeffs.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.coeffs[i] += 1;
            if self.coeffs[i] < self.space.p {
                break;
            }
            self.coeffs[i] = 0;
        }
        Some(out)
    }
}

/// A bilinear pairing `<x, y> = x G y^T` on `F_p^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pairing {
    p: u32,
    gram: Matrix,
}

impl Pairing {
    pub fn new(p: u32, gram: Matrix) -> Self {
        Pairing { p, gram }
    }

    /// The trace pairing `Tr(x_1 y_1 + ... + x_s y_s)` on `F_q^s`, viewed as
    /// `F_p^(s e)` with the polynomial-basis coordinates of each component
    /// concatenated.
    pub fn trace(field: &Field, s: usize) -> Self {
        let t = field.trace_gram();
        let e = field.e();
        let mut gram = vec![vec![0u32; s * e]; s * e];
        for block in 0..s {
            for i in 0..e {
                for j in 0..e {
                    gram[block * e + i][block * e + j] = t[i][j];
                }
            }
        }
        Pairing { p: field.p(), gram }
    }

    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn eval(&self, x: &[u32], y: &[u32]) -> u32 {
        linalg::bilinear(self.p, &self.gram, x, y)
    }

    pub fn is_nondegenerate(&self) -> bool {
        linalg::rank(self.p, &self.gram) == self.dim()
    }
}

/// Pivot-column sets of `r`-dimensional RREF matrices in `m` columns, in
/// lexicographic order.
pub fn pivot_sets(m: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn rec(start: usize, m: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for c in start..=m - (r - cur.len()) {
            cur.push(c);
            rec(c + 1, m, r, cur, out);
            cur.pop();
        }
    }
    if r <= m {
        rec(0, m, r, &mut cur, &mut out);
    }
    out
}

/// Free (row, column) positions of an RREF matrix with the given pivots:
/// right of the row's pivot and not in a pivot column.
fn free_positions(m: usize, pivots: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (row, &pc) in pivots.iter().enumerate() {
        for c in pc + 1..m {
            if !pivots.contains(&c) {
                out.push((row, c));
            }
        }
    }
    out
}

/// A contiguous range of free-entry assignments for one pivot set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shard {
    pub pivots: Vec<usize>,
    pub start: u128,
    pub end: u128,
}

impl Shard {
    pub fn len(&self) -> u128 {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }
}

/// Splits the enumeration of `r`-dimensional subspaces into shards of at
/// most `max_len` subspaces each, in enumeration order.
pub fn shards(p: u32, m: usize, r: usize, max_len: u128) -> Vec<Shard> {
    let max_len = max_len.max(1);
    let mut out = Vec::new();
    for pivots in pivot_sets(m, r) {
        let free = free_positions(m, &pivots).len();
        let total = (p as u128).pow(free as u32);
        let mut start = 0;
        while start < total {
            let end = (start + max_len).min(total);
            out.push(Shard { pivots: pivots.clone(), start, end });
            start = end;
        }
    }
    out
}

/// Walks the RREF matrices of one shard, reusing a single row buffer.
pub struct ShardCursor {
    p: u32,
    free: Vec<(usize, usize)>,
    digits: Vec<u32>,
    remaining: u128,
    rows: Matrix,
    started: bool,
}

impl ShardCursor {
    pub fn new(p: u32, m: usize, shard: &Shard) -> Self {
        let free = free_positions(m, &shard.pivots);
        let mut rows = vec![vec![0u32; m]; shard.pivots.len()];
        for (row, &pc) in shard.pivots.iter().enumerate() {
            rows[row][pc] = 1;
        }
        let mut digits = vec![0u32; free.len()];
        let mut k = shard.start;
        for d in digits.iter_mut().rev() {
            *d = (k % p as u128) as u32;
            k /= p as u128;
        }
        for (&(r, c), &d) in free.iter().zip(&digits) {
            rows[r][c] = d;
        }
        ShardCursor { p, free, digits, remaining: shard.len(), rows, started: false }
    }

    /// The next basis matrix, or `None` once the shard is exhausted.
    pub fn advance(&mut self) -> Option<&Matrix> {
        if self.remaining == 0 {
            return None;
        }
        if self.started {
            let mut i = self.digits.len();
            while i > 0 {
                i -= 1;
                let (r, c) = self.free[i];
                self.digits[i] += 1;
                if self.digits[i] < self.p {
                    self.rows[r][c] = self.digits[i];
                    break;
                }
                self.digits[i] = 0;
                self.rows[r][c] = 0;
            }
        }
        self.started = true;
        self.remaining -= 1;
        Some(&self.rows)
    }
}

/// Streams every `r`-dimensional subspace of `F_p^m` exactly once.
pub struct SubspaceIter {
    p: u32,
    m: usize,
    shards: std::vec::IntoIter<Shard>,
    cursor: Option<ShardCursor>,
}

impl Iterator for SubspaceIter {
    type Item = Subspace;

    fn next(&mut self) -> Option<Subspace> {
        loop {
            if let Some(cursor) = self.cursor.as_mut() {
                if let Some(rows) = cursor.advance() {
                    return Some(Subspace::from_rref(self.p, self.m, rows.clone()));
                }
            }
            let shard = self.shards.next()?;
            self.cursor = Some(ShardCursor::new(self.p, self.m, &shard));
        }
    }
}

/// Every `r`-dimensional subspace of `F_p^m`, streamed. Fails up front
/// when the subspace count exceeds the budget.
pub fn enumerate_subspaces(p: u32, m: usize, r: usize, budget: &Budget) -> Result<SubspaceIter, BudgetExceeded> {
    assert!(r <= m, "subspace dimension exceeds ambient dimension");
    budget.check(gaussian_binomial(p, m, r), format!("enumerating {r}-dimensional subspaces of F_{p}^{m}"))?;
    Ok(SubspaceIter { p, m, shards: shards(p, m, r, u128::MAX).into_iter(), cursor: None })
}
