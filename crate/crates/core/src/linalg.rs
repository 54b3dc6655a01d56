//! Small dense linear algebra over [`Scalar`]: row reduction, rank, particular
//! and minimum-norm solutions. Matrices are row-major `Vec<Vec<S>>`.

use crate::scalar::Scalar;

pub type Matrix<S> = Vec<Vec<S>>;

/// Reduced row echelon form in place. Returns the pivot columns.
///
/// Pivots are chosen by largest magnitude; entries within `tol` of zero are
/// treated as zero.
pub fn rref<S: Scalar>(m: &mut Matrix<S>, tol: &S) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let mut best = None;
        let mut best_mag = S::zero();
        for (i, row) in m.iter().enumerate().skip(r) {
            let mag = row[c].magnitude();
            if !mag.is_zero_tol(tol) && (best.is_none() || mag > best_mag) {
                best = Some(i);
                best_mag = mag;
            }
        }
        let Some(p) = best else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero_tol(tol) {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let v = m[r][j].clone();
                    m[i][j] = m[i][j].clone() - f.clone() * v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<S: Scalar>(m: &Matrix<S>, tol: &S) -> usize {
    let mut work = m.clone();
    rref(&mut work, tol).len()
}

pub fn transpose<S: Scalar>(m: &Matrix<S>) -> Matrix<S> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len())
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn mat_vec<S: Scalar>(m: &Matrix<S>, v: &[S]) -> Vec<S> {
    m.iter().map(|row| dot(row, v)).collect()
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Some solution of `a x = b` (free variables set to zero), or `None` if inconsistent.
pub fn solve<S: Scalar>(a: &Matrix<S>, b: &[S], tol: &S) -> Option<Vec<S>> {
    let cols = a.first().map_or(0, Vec::len);
    let mut aug: Matrix<S> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug, tol);
    if pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![S::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][cols].clone();
    }
    Some(x)
}

/// Minimum Euclidean norm solution of `a x = b`, or `None` if inconsistent.
///
/// Computed as `x = aᵀ z` for any `z` with `a aᵀ z = b`; the product is unique
/// even when `a aᵀ` is singular.
pub fn min_norm_solve<S: Scalar>(a: &Matrix<S>, b: &[S], tol: &S) -> Option<Vec<S>> {
    let at = transpose(a);
    let gram: Matrix<S> = a
        .iter()
        .map(|ri| a.iter().map(|rj| dot(ri, rj)).collect())
        .collect();
    let z = solve(&gram, b, tol)?;
    let x = if at.is_empty() {
        Vec::new()
    } else {
        mat_vec(&at, &z)
    };
    let check = mat_vec(a, &x);
    if check.iter().zip(b).all(|(l, r)| l.near(r, tol)) {
        Some(x)
    } else {
        None
    }
}

/// Indices of a maximal set of linearly independent columns (first-come order).
pub fn independent_columns<S: Scalar>(a: &Matrix<S>, tol: &S) -> Vec<usize> {
    let mut work = a.clone();
    rref(&mut work, tol)
}
