//! Exact integer and rational linear algebra on small dense matrices.
//!
//! Everything here works over `BigInt` / `BigRational` with no rounding:
//! Hermite normal form for lattice bases (orders and ideals are row lattices
//! in a fixed power basis), Bareiss fraction-free determinants, rational
//! Gaussian elimination, nullspaces mod p (used by the order-maximalisation
//! radical computation), and Smith normal form (used to read off abelian
//! group structure from a relation matrix).
//!
//! Convention: matrices are `Vec<Vec<BigInt>>` in row-major order, and a
//! lattice is the row span of its matrix. The canonical HNF used throughout
//! is row-echelon with pivot columns strictly increasing, positive pivots,
//! and entries above each pivot reduced into `[0, pivot)`. For a full-rank
//! square lattice this makes the basis upper triangular and unique, so two
//! lattices are equal iff their HNFs are identical.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Mat = Vec<Vec<BigInt>>;

pub fn mat_vec(a: &[Vec<BigInt>], v: &[BigInt]) -> Vec<BigInt> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

pub fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Mat {
    let cols = b[0].len();
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().zip(b).map(|(x, brow)| x * &brow[j]).sum())
                .collect()
        })
        .collect()
}

pub fn transpose(a: &[Vec<BigInt>]) -> Mat {
    if a.is_empty() {
        return vec![];
    }
    (0..a[0].len())
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn identity(n: usize) -> Mat {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

/// Canonical row Hermite normal form; returns only the nonzero rows
/// (one per pivot), so the result has `rank` rows.
pub fn hnf(rows: &[Vec<BigInt>]) -> Mat {
    if rows.is_empty() {
        return vec![];
    }
    let ncols = rows[0].len();
    let mut m: Mat = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut pivot_row = 0usize;
    for col in 0..ncols {
        if pivot_row >= m.len() {
            break;
        }
        // Clear column `col` below `pivot_row` by pairwise gcd elimination.
        let mut any = false;
        for i in pivot_row..m.len() {
            if !m[i][col].is_zero() {
                any = true;
                break;
            }
        }
        if !any {
            continue;
        }
        loop {
            // Find the row with the smallest nonzero |entry| in this column.
            let mut best: Option<usize> = None;
            for i in pivot_row..m.len() {
                if m[i][col].is_zero() {
                    continue;
                }
                best = match best {
                    None => Some(i),
                    Some(b) => {
                        if m[i][col].abs() < m[b][col].abs() {
                            Some(i)
                        } else {
                            Some(b)
                        }
                    }
                };
            }
            let b = best.unwrap();
            m.swap(pivot_row, b);
            // Reduce every other row in the column by the pivot row.
            let mut done = true;
            for i in pivot_row + 1..m.len() {
                if m[i][col].is_zero() {
                    continue;
                }
                let q = m[i][col].div_floor(&m[pivot_row][col]);
                if !q.is_zero() {
                    for j in 0..ncols {
                        let t = &m[i][j] - &q * &m[pivot_row][j];
                        m[i][j] = t;
                    }
                }
                if !m[i][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if m[pivot_row][col].is_negative() {
            for j in 0..ncols {
                m[pivot_row][j] = -m[pivot_row][j].clone();
            }
        }
        // Reduce entries *above* the pivot into [0, pivot).
        let pivot = m[pivot_row][col].clone();
        for i in 0..pivot_row {
            let q = m[i][col].div_floor(&pivot);
            if !q.is_zero() {
                for j in 0..ncols {
                    let t = &m[i][j] - &q * &m[pivot_row][j];
                    m[i][j] = t;
                }
            }
        }
        pivot_row += 1;
    }
    m.truncate(pivot_row);
    m
}

/// Fraction-free determinant (Bareiss). Panics on non-square input.
pub fn det(a: &[Vec<BigInt>]) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    assert!(a.iter().all(|r| r.len() == n), "determinant of non-square matrix");
    let mut m: Mat = a.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            // pivot search
            let mut found = None;
            for i in k + 1..n {
                if !m[i][k].is_zero() {
                    found = Some(i);
                    break;
                }
            }
            match found {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = t;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// Determinant of a square rational matrix by Gaussian elimination.
pub fn det_rational(a: &[Vec<BigRational>]) -> BigRational {
    let n = a.len();
    if n == 0 {
        return BigRational::one();
    }
    let mut m: Vec<Vec<BigRational>> = a.to_vec();
    let mut acc = BigRational::one();
    for k in 0..n {
        let piv = match (k..n).find(|&i| !m[i][k].is_zero()) {
            Some(p) => p,
            None => return BigRational::zero(),
        };
        if piv != k {
            m.swap(k, piv);
            acc = -acc;
        }
        acc *= &m[k][k];
        let inv = m[k][k].recip();
        for i in k + 1..n {
            if m[i][k].is_zero() {
                continue;
            }
            let f = &m[i][k] * &inv;
            for j in k..n {
                let t = &m[i][j] - &f * &m[k][j];
                m[i][j] = t;
            }
        }
    }
    acc
}

/// Solve `A x = b` exactly over the rationals. `None` if `A` is singular.
pub fn solve_rational(a: &[Vec<BigInt>], b: &[BigInt]) -> Option<Vec<BigRational>> {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            row.iter()
                .map(|x| BigRational::from(x.clone()))
                .chain(std::iter::once(BigRational::from(rhs.clone())))
                .collect()
        })
        .collect();
    for k in 0..n {
        let piv = (k..n).find(|&i| !m[i][k].is_zero())?;
        m.swap(k, piv);
        let inv = m[k][k].recip();
        for j in k..=n {
            let t = &m[k][j] * &inv;
            m[k][j] = t;
        }
        for i in 0..n {
            if i != k && !m[i][k].is_zero() {
                let f = m[i][k].clone();
                for j in k..=n {
                    let t = &m[i][j] - &f * &m[k][j];
                    m[i][j] = t;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

/// Exact inverse of a square rational matrix. `None` if singular.
pub fn inverse_rational(a: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            for j in 0..n {
                r.push(if i == j { BigRational::one() } else { BigRational::zero() });
            }
            r
        })
        .collect();
    for k in 0..n {
        let piv = (k..n).find(|&i| !m[i][k].is_zero())?;
        m.swap(k, piv);
        let inv = m[k][k].recip();
        for j in k..2 * n {
            let t = &m[k][j] * &inv;
            m[k][j] = t;
        }
        for i in 0..n {
            if i != k && !m[i][k].is_zero() {
                let f = m[i][k].clone();
                for j in k..2 * n {
                    let t = &m[i][j] - &f * &m[k][j];
                    m[i][j] = t;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Integer coordinates of `v` in the row span of a full-rank square HNF
/// basis `h` (upper triangular, as produced by [`hnf`]); `None` if `v` is
/// not in the lattice.
pub fn coords_in_hnf(h: &[Vec<BigInt>], v: &[BigInt]) -> Option<Vec<BigInt>> {
    let n = h.len();
    assert!(h.iter().all(|r| r.len() == n));
    let mut rem = v.to_vec();
    let mut coords = Vec::with_capacity(n);
    for i in 0..n {
        let (q, r) = rem[i].div_rem(&h[i][i]);
        if !r.is_zero() {
            return None;
        }
        for j in i..n {
            let t = &rem[j] - &q * &h[i][j];
            rem[j] = t;
        }
        coords.push(q);
    }
    if rem.iter().all(|x| x.is_zero()) {
        Some(coords)
    } else {
        None
    }
}

/// Basis of the right kernel `{x : M x = 0 mod p}` over the prime field,
/// entries reduced into `[0, p)`.
pub fn kernel_mod_p(mat: &[Vec<BigInt>], p: &BigInt) -> Vec<Vec<BigInt>> {
    if mat.is_empty() {
        return vec![];
    }
    let rows = mat.len();
    let cols = mat[0].len();
    let mut m: Mat = mat
        .iter()
        .map(|r| r.iter().map(|x| x.mod_floor(p)).collect())
        .collect();
    let mut pivot_col_of_row: Vec<usize> = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        let piv = (r..rows).find(|&i| !m[i][c].is_zero());
        let Some(piv) = piv else { continue };
        m.swap(r, piv);
        let inv = crate::arith::inv_mod(&m[r][c], p).expect("pivot invertible mod p");
        for j in c..cols {
            let t = (&m[r][j] * &inv).mod_floor(p);
            m[r][j] = t;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let t = (&m[i][j] - &f * &m[r][j]).mod_floor(p);
                    m[i][j] = t;
                }
            }
        }
        pivot_col_of_row.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    let pivot_cols: Vec<usize> = pivot_col_of_row.clone();
    let free_cols: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    let mut basis = Vec::with_capacity(free_cols.len());
    for &fc in &free_cols {
        let mut v = vec![BigInt::zero(); cols];
        v[fc] = BigInt::one();
        for (row, &pc) in pivot_cols.iter().enumerate() {
            // x_pc = -m[row][fc]
            v[pc] = (-&m[row][fc]).mod_floor(p);
        }
        basis.push(v);
    }
    basis
}

/// Diagonal of the Smith normal form, padded with zeros for any free part:
/// `d_1 | d_2 | ... | d_r, 0, ..., 0` with `min(rows, cols)` entries.
/// The cokernel of the row lattice of `mat` inside Z^cols is
/// `⊕ Z/d_i ⊕ Z^(cols - entries)`.
pub fn snf_diagonal(mat: &[Vec<BigInt>]) -> Vec<BigInt> {
    let rows = mat.len();
    if rows == 0 {
        return vec![];
    }
    let cols = mat[0].len();
    let mut m: Mat = mat.to_vec();
    let k = rows.min(cols);
    let mut diag = Vec::with_capacity(k);
    let mut top = 0usize;
    while top < k {
        // Find any nonzero entry in the remaining block.
        let mut found = None;
        'outer: for i in top..rows {
            for j in top..cols {
                if !m[i][j].is_zero() {
                    found = Some((i, j));
                    break 'outer;
                }
            }
        }
        let Some((fi, fj)) = found else { break };
        m.swap(top, fi);
        for row in m.iter_mut() {
            row.swap(top, fj);
        }
        // Reduce until m[top][top] divides its whole row and column and
        // the rest of the row/column is zero.
        loop {
            // Clear the column with gcd steps.
            let mut changed = false;
            for i in top + 1..rows {
                if m[i][top].is_zero() {
                    continue;
                }
                if (&m[i][top] % &m[top][top]).is_zero() {
                    let q = &m[i][top] / &m[top][top];
                    for j in top..cols {
                        let t = &m[i][j] - &q * &m[top][j];
                        m[i][j] = t;
                    }
                } else {
                    // Swap in the smaller remainder via a Euclidean step.
                    let q = m[i][top].div_floor(&m[top][top]);
                    for j in top..cols {
                        let t = &m[i][j] - &q * &m[top][j];
                        m[i][j] = t;
                    }
                    m.swap(top, i);
                    changed = true;
                }
            }
            if changed {
                continue;
            }
            // Clear the row with gcd steps (column operations).
            for j in top + 1..cols {
                if m[top][j].is_zero() {
                    continue;
                }
                if (&m[top][j] % &m[top][top]).is_zero() {
                    let q = &m[top][j] / &m[top][top];
                    for i in top..rows {
                        let t = &m[i][j] - &q * &m[i][top];
                        m[i][j] = t;
                    }
                } else {
                    let q = m[top][j].div_floor(&m[top][top]);
                    for i in top..rows {
                        let t = &m[i][j] - &q * &m[i][top];
                        m[i][j] = t;
                    }
                    for row in m.iter_mut() {
                        row.swap(top, j);
                    }
                    changed = true;
                }
            }
            if changed {
                continue;
            }
            // Row and column are clear; ensure the pivot divides the whole
            // remaining block (required for the divisibility chain).
            let mut fixed = true;
            'scan: for i in top + 1..rows {
                for j in top + 1..cols {
                    if !(&m[i][j] % &m[top][top]).is_zero() {
                        // Add row i to row top and restart.
                        for jj in top..cols {
                            let t = &m[top][jj] + &m[i][jj];
                            m[top][jj] = t;
                        }
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            if fixed {
                break;
            }
        }
        diag.push(m[top][top].abs());
        top += 1;
    }
    while diag.len() < k {
        diag.push(BigInt::zero());
    }
    diag
}
