//! Dense matrices over `F_p` (rows of `u32` entries in `[0, p)`).

pub type Matrix = Vec<Vec<u32>>;

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| u32::from(i == j)).collect())
        .collect()
}

pub fn transpose(a: &[Vec<u32>], cols: usize) -> Matrix {
    (0..cols).map(|j| a.iter().map(|row| row[j]).collect()).collect()
}

pub fn mat_mul(p: u32, a: &[Vec<u32>], b: &[Vec<u32>]) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = 0u64;
                    for k in 0..inner {
                        acc += row[k] as u64 * b[k][j] as u64;
                    }
                    (acc % p as u64) as u32
                })
                .collect()
        })
        .collect()
}

/// `a * v` for a column vector `v`.
pub fn mat_vec(p: u32, a: &[Vec<u32>], v: &[u32]) -> Vec<u32> {
    a.iter().map(|row| dot(p, row, v)).collect()
}

pub fn dot(p: u32, x: &[u32], y: &[u32]) -> u32 {
    let acc: u64 = x.iter().zip(y).map(|(&a, &b)| a as u64 * b as u64).sum();
    (acc % p as u64) as u32
}

/// `x G y^T`.
pub fn bilinear(p: u32, gram: &[Vec<u32>], x: &[u32], y: &[u32]) -> u32 {
    let gy = mat_vec(p, gram, y);
    dot(p, x, &gy)
}

pub fn inv_mod(a: u32, p: u32) -> u32 {
    crate::field::inv_mod(a, p)
}

/// Row-reduces in place to reduced row-echelon form, drops zero rows and
/// returns the pivot columns.
pub fn rref(p: u32, rows: &mut Matrix) -> Vec<usize> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(sel) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, sel);
        let inv = inv_mod(rows[r][c], p) as u64;
        for x in rows[r].iter_mut() {
            *x = (*x as u64 * inv % p as u64) as u32;
        }
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let f = rows[i][c] as u64;
                for j in 0..cols {
                    let sub = f * rows[r][j] as u64 % p as u64;
                    rows[i][j] = ((rows[i][j] as u64 + p as u64 - sub) % p as u64) as u32;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

pub fn rank(p: u32, a: &[Vec<u32>]) -> usize {
    let mut m = a.to_vec();
    rref(p, &mut m).len()
}

/// Basis (in RREF) of `{y : a y^T = 0}`.
pub fn nullspace(p: u32, a: &[Vec<u32>], cols: usize) -> Matrix {
    let mut m = a.to_vec();
    let pivots = rref(p, &mut m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut basis: Matrix = free
        .iter()
        .map(|&f| {
            let mut v = vec![0u32; cols];
            v[f] = 1;
            for (row, &pc) in m.iter().zip(&pivots) {
                v[pc] = (p - row[f]) % p;
            }
            v
        })
        .collect();
    rref(p, &mut basis);
    basis
}

/// Solves `a x = b` for square invertible `a`; `None` when singular.
pub fn solve(p: u32, a: &[Vec<u32>], b: &[u32]) -> Option<Vec<u32>> {
    let n = a.len();
    let mut aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    let pivots = rref(p, &mut aug);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
        return None;
    }
    Some(aug.iter().map(|row| row[n]).collect())
}

/// Some solution of `a x = b` (any shape), or `None` when inconsistent.
pub fn solve_any(p: u32, a: &[Vec<u32>], b: &[u32], cols: usize) -> Option<Vec<u32>> {
    let mut aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    let pivots = rref(p, &mut aug);
    if pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![0u32; cols];
    for (row, &pc) in aug.iter().zip(&pivots) {
        x[pc] = row[cols];
    }
    Some(x)
}

pub fn determinant(p: u32, a: &[Vec<u32>]) -> u32 {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = 1u64;
    for c in 0..n {
        let Some(sel) = (c..n).find(|&i| m[i][c] != 0) else {
            return 0;
        };
        if sel != c {
            m.swap(sel, c);
            det = det * (p as u64 - 1) % p as u64;
        }
        det = det * m[c][c] as u64 % p as u64;
        let inv = inv_mod(m[c][c], p) as u64;
        for i in c + 1..n {
            if m[i][c] != 0 {
                let f = m[i][c] as u64 * inv % p as u64;
                for j in c..n {
                    let sub = f * m[c][j] as u64 % p as u64;
                    m[i][j] = ((m[i][j] as u64 + p as u64 - sub) % p as u64) as u32;
                }
            }
        }
    }
    det as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nullspace_annihilates() {
        let a = vec![vec![1, 2, 0, 1], vec![0, 1, 1, 2]];
        let ns = nullspace(3, &a, 4);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert_eq!(mat_vec(3, &a, v), vec![0, 0]);
        }
    }

    #[test]
    fn solve_and_determinant() {
        let a = vec![vec![2, 1], vec![1, 1]];
        assert_eq!(determinant(5, &a), 1);
        let x = solve(5, &a, &[3, 4]).unwrap();
        assert_eq!(mat_vec(5, &a, &x), vec![3, 4]);
        assert!(solve(5, &[vec![1, 2], vec![2, 4]], &[1, 1]).is_none());
    }
}
