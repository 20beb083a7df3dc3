//! Integer-lattice routines: Hermite and Smith normal forms, exact LLL on a
//! Gram matrix, and Fincke–Pohst enumeration of short vectors.
//!
//! Dimensions here are tiny (≤ 6 for ideals of the sextic closure, factor
//! bases of a few dozen for class-group relations), so the implementations
//! favor exactness and clarity over asymptotics.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Euclid, One, Signed, Zero};

/// Hermite normal form of the row lattice of `mat` (m×n, m ≥ rank).
///
/// Returns a full-rank upper-triangular basis with positive diagonal and
/// off-diagonal entries reduced modulo the pivot below them. Zero rows are
/// dropped; for our ideal lattices the result is square n×n.
pub fn hnf_rows(mut mat: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    if mat.is_empty() {
        return mat;
    }
    let n = mat[0].len();
    let mut pivot_row = 0usize;
    for col in 0..n {
        // Eliminate column `col` below pivot_row by gcd row operations.
        loop {
            let mut best: Option<usize> = None;
            for r in pivot_row..mat.len() {
                if !mat[r][col].is_zero() {
                    best = match best {
                        None => Some(r),
                        Some(b) => {
                            if mat[r][col].abs() < mat[b][col].abs() {
                                Some(r)
                            } else {
                                Some(b)
                            }
                        }
                    };
                }
            }
            let Some(b) = best else { break };
            mat.swap(pivot_row, b);
            let mut done = true;
            for r in pivot_row + 1..mat.len() {
                if !mat[r][col].is_zero() {
                    let q = div_round(&mat[r][col], &mat[pivot_row][col]);
                    if !q.is_zero() {
                        for c in 0..n {
                            let t = &mat[pivot_row][c] * &q;
                            mat[r][c] -= t;
                        }
                    }
                    if !mat[r][col].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if pivot_row < mat.len() && !mat[pivot_row][col].is_zero() {
            if mat[pivot_row][col].is_negative() {
                for c in 0..n {
                    mat[pivot_row][c] = -mat[pivot_row][c].clone();
                }
            }
            // Reduce the rows ABOVE the pivot.
            for r in 0..pivot_row {
                let q = mat[r][col].div_euclid(&mat[pivot_row][col]);
                if !q.is_zero() {
                    for c in 0..n {
                        let t = &mat[pivot_row][c] * &q;
                        mat[r][c] -= t;
                    }
                }
            }
            pivot_row += 1;
        }
    }
    mat.truncate(pivot_row);
    mat
}

fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    // Round a/b to nearest; keeps remainders at most |b|/2.
    let fq = a.div_euclid(b);
    let r = a - &fq * b; // 0 ≤ r < |b|
    if &r * 2 > b.abs() {
        if b.is_negative() {
            fq - 1
        } else {
            fq + 1
        }
    } else {
        fq
    }
}

/// Determinant of the HNF basis (product of the diagonal); the lattice index
/// in Z^n for a full-rank integral lattice.
pub fn hnf_determinant(hnf: &[Vec<BigInt>]) -> BigInt {
    let mut det = BigInt::one();
    for (i, row) in hnf.iter().enumerate() {
        det *= &row[i];
    }
    det
}

/// Smith normal form diagonal of an integer matrix. Returns the nonzero
/// invariant factors d₁ | d₂ | …
pub fn snf_diagonal(mut mat: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = mat.len();
    if rows == 0 {
        return vec![];
    }
    let cols = mat[0].len();
    let mut out: Vec<BigInt> = Vec::new();
    let mut top = 0usize;
    while top < rows.min(cols) {
        // Find the smallest nonzero entry in the submatrix.
        let mut best: Option<(usize, usize)> = None;
        for r in top..rows {
            for c in top..cols {
                if !mat[r][c].is_zero() {
                    best = match best {
                        None => Some((r, c)),
                        Some((br, bc)) => {
                            if mat[r][c].abs() < mat[br][bc].abs() {
                                Some((r, c))
                            } else {
                                Some((br, bc))
                            }
                        }
                    };
                }
            }
        }
        let Some((br, bc)) = best else { break };
        mat.swap(top, br);
        for row in mat.iter_mut() {
            row.swap(top, bc);
        }
        // Clear row and column `top`.
        let mut clean = true;
        for r in top + 1..rows {
            if !mat[r][top].is_zero() {
                let q = div_round(&mat[r][top], &mat[top][top]);
                for c in top..cols {
                    let t = &mat[top][c] * &q;
                    mat[r][c] -= t;
                }
                if !mat[r][top].is_zero() {
                    clean = false;
                }
            }
        }
        for c in top + 1..cols {
            if !mat[top][c].is_zero() {
                let q = div_round(&mat[top][c], &mat[top][top]);
                for r in top..rows {
                    let t = &mat[r][top] * &q;
                    mat[r][c] -= t;
                }
                if !mat[top][c].is_zero() {
                    clean = false;
                }
            }
        }
        if !clean {
            continue;
        }
        // Divisibility fix-up: pivot must divide every remaining entry.
        let mut fixed = true;
        'outer: for r in top + 1..rows {
            for c in top + 1..cols {
                if !(&mat[r][c] % &mat[top][top]).is_zero() {
                    // Add row r to row top and restart elimination.
                    for cc in top..cols {
                        let t = mat[r][cc].clone();
                        mat[top][cc] += t;
                    }
                    fixed = false;
                    break 'outer;
                }
            }
        }
        if !fixed {
            continue;
        }
        out.push(mat[top][top].abs());
        top += 1;
    }
    out
}

/// Exact LLL reduction driven by a rational Gram matrix.
///
/// Returns the unimodular transform `u` (rows are the new basis expressed in
/// the old one) with the Lovász condition δ = 0.99.
pub fn lll_gram(gram: &[Vec<BigRational>]) -> Vec<Vec<BigInt>> {
    let n = gram.len();
    let mut u: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    if n <= 1 {
        return u;
    }
    let delta = BigRational::new(BigInt::from(99), BigInt::from(100));
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));

    let inner = |u: &Vec<Vec<BigInt>>, i: usize, j: usize| -> BigRational {
        let mut s = BigRational::zero();
        for a in 0..n {
            if u[i][a].is_zero() {
                continue;
            }
            for b in 0..n {
                if u[j][b].is_zero() {
                    continue;
                }
                s += BigRational::from(&u[i][a] * &u[j][b]) * &gram[a][b];
            }
        }
        s
    };

    // Gram-Schmidt data recomputed from scratch; n ≤ 6 keeps this cheap.
    let gso = |u: &Vec<Vec<BigInt>>| -> (Vec<Vec<BigRational>>, Vec<BigRational>) {
        let mut mu = vec![vec![BigRational::zero(); n]; n];
        let mut bstar = vec![BigRational::zero(); n];
        for i in 0..n {
            let mut bi = inner(u, i, i);
            for j in 0..i {
                let mut m = inner(u, i, j);
                for k in 0..j {
                    let t = mu[i][k].clone() * mu[j][k].clone() * bstar[k].clone();
                    m -= t;
                }
                if !bstar[j].is_zero() {
                    m /= bstar[j].clone();
                }
                mu[i][j] = m;
            }
            for j in 0..i {
                let t = mu[i][j].clone() * mu[i][j].clone() * bstar[j].clone();
                bi -= t;
            }
            bstar[i] = bi;
        }
        (mu, bstar)
    };

    let mut k = 1usize;
    let mut rounds = 0usize;
    while k < n {
        rounds += 1;
        if rounds > 10_000 {
            break; // Safety stop; callers only lose reduction quality.
        }
        let (mu, bstar) = gso(&u);
        // Size-reduce row k against row k-1 … 0.
        let mut changed = false;
        for j in (0..k).rev() {
            let m = &mu[k][j];
            if m.abs() > half {
                let q = rational_round(m);
                if !q.is_zero() {
                    for c in 0..n {
                        let t = &u[j][c] * &q;
                        u[k][c] -= t;
                    }
                    changed = true;
                }
            }
        }
        let (mu, bstar) = if changed { gso(&u) } else { (mu, bstar) };
        let lhs = bstar[k].clone();
        let rhs = (delta.clone() - mu[k][k - 1].clone() * mu[k][k - 1].clone())
            * bstar[k - 1].clone();
        if lhs < rhs {
            u.swap(k, k - 1);
            k = k.max(2) - 1;
        } else {
            k += 1;
        }
    }
    u
}

fn rational_round(x: &BigRational) -> BigInt {
    let fq = x.numer().div_euclid(x.denom());
    let r = x - BigRational::from(fq.clone());
    if r > BigRational::new(BigInt::one(), BigInt::from(2)) {
        fq + 1
    } else {
        fq
    }
}

/// Fincke–Pohst: visit every integer vector x ≠ 0 with xᵀ G x ≤ bound.
///
/// `gram` must be positive definite (f64, with the caller adding margins).
/// The callback returns `false` to abort. Returns the number of lattice nodes
/// visited, or None if the Cholesky factorization failed.
pub fn fincke_pohst<F: FnMut(&[i64]) -> bool>(
    gram: &[Vec<f64>],
    bound: f64,
    node_budget: u64,
    mut callback: F,
) -> Option<u64> {
    let n = gram.len();
    // Cholesky G = Rᵀ R with R upper triangular.
    let mut r = vec![vec![0f64; n]; n];
    for i in 0..n {
        let mut d = gram[i][i];
        for k in 0..i {
            d -= r[k][i] * r[k][i];
        }
        if d <= 0.0 {
            return None;
        }
        r[i][i] = d.sqrt();
        for j in i + 1..n {
            let mut v = gram[i][j];
            for k in 0..i {
                v -= r[k][i] * r[k][j];
            }
            r[i][j] = v / r[i][i];
        }
    }
    let mut x = vec![0i64; n];
    let mut nodes = 0u64;
    // Recursive enumeration from the last coordinate down.
    fn recurse<F: FnMut(&[i64]) -> bool>(
        level: isize,
        n: usize,
        r: &[Vec<f64>],
        x: &mut [i64],
        partial: f64,
        centers: &mut [f64],
        bound: f64,
        nodes: &mut u64,
        budget: u64,
        cb: &mut F,
    ) -> bool {
        if *nodes >= budget {
            return false;
        }
        if level < 0 {
            *nodes += 1;
            if x.iter().all(|&v| v == 0) {
                return true;
            }
            return cb(x);
        }
        let i = level as usize;
        // Center of the allowed interval for x[i].
        let mut c = 0f64;
        for j in i + 1..n {
            c += r[i][j] * x[j] as f64;
        }
        c /= r[i][i];
        centers[i] = c;
        let remain = bound - partial;
        if remain < -1e-9 {
            return true;
        }
        let radius = (remain.max(0.0)).sqrt() / r[i][i] + 1e-9;
        let lo = (-c - radius).ceil() as i64;
        let hi = (-c + radius).floor() as i64;
        for v in lo..=hi {
            x[i] = v;
            let term = r[i][i] * (v as f64 + c);
            let p2 = partial + term * term;
            if p2 <= bound + 1e-9 {
                if !recurse(level - 1, n, r, x, p2, centers, bound, nodes, budget, cb) {
                    return false;
                }
            }
        }
        x[i] = 0;
        true
    }
    let mut centers = vec![0f64; n];
    recurse(
        n as isize - 1,
        n,
        &r,
        &mut x,
        0.0,
        &mut centers,
        bound * (1.0 + 1e-9) + 1e-9,
        &mut nodes,
        node_budget,
        &mut callback,
    );
    Some(nodes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn hnf_simple() {
        let m = vec![
            vec![bi(2), bi(0)],
            vec![bi(1), bi(3)],
            vec![bi(0), bi(6)],
        ];
        let h = hnf_rows(m);
        assert_eq!(h.len(), 2);
        // Lattice {(2,0),(1,3)} has index 6 in Z².
        assert_eq!(hnf_determinant(&h), bi(6));
        assert!(h[0][0] > BigInt::zero() && h[1][1] > BigInt::zero());
        assert!(h[1][0].is_zero());
        assert!(h[0][1] >= BigInt::zero() && h[0][1] < h[1][1]);
    }

    #[test]
    fn snf_invariant_factors() {
        // diag(2,6) ~ SNF (2,6); a classic example with mixing.
        let m = vec![vec![bi(2), bi(4)], vec![bi(-2), bi(8)]];
        let d = snf_diagonal(m);
        assert_eq!(d, vec![bi(2), bi(12)]);
    }

    #[test]
    fn lll_reduces_skewed_basis() {
        // Basis (1, 0), (1000, 1): Gram entries accordingly; LLL must find
        // short vectors with transform determinant ±1.
        let g = |a: (i64, i64), b: (i64, i64)| {
            BigRational::from(bi(a.0 * b.0 + a.1 * b.1))
        };
        let b1 = (1i64, 0i64);
        let b2 = (1000i64, 1i64);
        let gram = vec![vec![g(b1, b1), g(b1, b2)], vec![g(b2, b1), g(b2, b2)]];
        let u = lll_gram(&gram);
        // New second vector should be short: |u21*b1 + u22*b2| small.
        let v2 = (
            u[1][0].clone() * b1.0 + u[1][1].clone() * b2.0,
            u[1][0].clone() * b1.1 + u[1][1].clone() * b2.1,
        );
        let norm: BigInt = &v2.0 * &v2.0 + &v2.1 * &v2.1;
        assert!(norm <= bi(2), "second LLL vector not short: {v2:?}");
    }

    #[test]
    fn fincke_pohst_counts_short_vectors() {
        // Z² with bound 4: vectors with x²+y² ≤ 4, nonzero: 12 of them.
        let gram = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let mut count = 0;
        fincke_pohst(&gram, 4.0, 1 << 20, |_| {
            count += 1;
            true
        })
        .unwrap();
        assert_eq!(count, 12);
    }
}
