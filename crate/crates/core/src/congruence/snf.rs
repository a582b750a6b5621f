use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

type BigMat = Vec<Vec<BigInt>>;

/// `p_mat · S · q_mat = diag(diag)` with unimodular `p_mat`, `q_mat` and
/// `diag[0] | diag[1] | …`. `p_inv` is the exact inverse of `p_mat`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SnfDecomposition {
    pub p_mat: Vec<Vec<i64>>,
    pub q_mat: Vec<Vec<i64>>,
    pub p_inv: Vec<Vec<i64>>,
    pub diag: Vec<i64>,
}

fn identity(n: usize) -> BigMat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

struct Work {
    a: BigMat,
    p: BigMat,
    p_inv: BigMat,
    q: BigMat,
}

impl Work {
    // row_i -= c * row_k
    fn row_sub(&mut self, i: usize, k: usize, c: &BigInt) {
        let n = self.a.len();
        for j in 0..n {
            let t = &self.a[k][j] * c;
            self.a[i][j] -= t;
            let t = &self.p[k][j] * c;
            self.p[i][j] -= t;
        }
        for r in 0..n {
            let t = &self.p_inv[r][i] * c;
            self.p_inv[r][k] += t;
        }
    }

    // col_j -= c * col_k
    fn col_sub(&mut self, j: usize, k: usize, c: &BigInt) {
        let n = self.a.len();
        for i in 0..n {
            let t = &self.a[i][k] * c;
            self.a[i][j] -= t;
            let t = &self.q[i][k] * c;
            self.q[i][j] -= t;
        }
    }

    fn swap_rows(&mut self, i: usize, k: usize) {
        if i == k {
            return;
        }
        self.a.swap(i, k);
        self.p.swap(i, k);
        for row in self.p_inv.iter_mut() {
            row.swap(i, k);
        }
    }

    fn swap_cols(&mut self, j: usize, k: usize) {
        if j == k {
            return;
        }
        for row in self.a.iter_mut() {
            row.swap(j, k);
        }
        for row in self.q.iter_mut() {
            row.swap(j, k);
        }
    }

    fn negate_row(&mut self, k: usize) {
        for x in self.a[k].iter_mut() {
            *x = -&*x;
        }
        for x in self.p[k].iter_mut() {
            *x = -&*x;
        }
        for row in self.p_inv.iter_mut() {
            row[k] = -&row[k];
        }
    }
}

fn to_i64(m: &BigMat) -> Result<Vec<Vec<i64>>> {
    m.iter()
        .map(|row| {
            row.iter()
                .map(|x| x.to_i64().ok_or(Error::Overflow("smith normal form")))
                .collect()
        })
        .collect()
}

/// Smith normal form of a nonsingular square integer matrix.
pub fn smith_normal_form(s: &[Vec<i64>]) -> Result<SnfDecomposition> {
    let n = s.len();
    if n == 0 || s.iter().any(|row| row.len() != n) {
        return Err(Error::NotSquare);
    }
    let mut w = Work {
        a: s.iter().map(|row| row.iter().map(|&x| BigInt::from(x)).collect()).collect(),
        p: identity(n),
        p_inv: identity(n),
        q: identity(n),
    };

    for k in 0..n {
        loop {
            // pivot: smallest nonzero magnitude in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in k..n {
                for j in k..n {
                    if !w.a[i][j].is_zero()
                        && best.map_or(true, |(bi, bj)| w.a[i][j].abs() < w.a[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let (pi, pj) = best.ok_or(Error::Singular)?;
            w.swap_rows(k, pi);
            w.swap_cols(k, pj);

            let mut clean = true;
            for i in k + 1..n {
                if !w.a[i][k].is_zero() {
                    let c = w.a[i][k].div_floor(&w.a[k][k]);
                    w.row_sub(i, k, &c);
                    clean &= w.a[i][k].is_zero();
                }
            }
            for j in k + 1..n {
                if !w.a[k][j].is_zero() {
                    let c = w.a[k][j].div_floor(&w.a[k][k]);
                    w.col_sub(j, k, &c);
                    clean &= w.a[k][j].is_zero();
                }
            }
            if !clean {
                continue;
            }
            // divisibility chain: fold an offending row into the pivot row
            let pivot = w.a[k][k].clone();
            let offender = (k + 1..n).find(|&i| (k + 1..n).any(|j| !w.a[i][j].is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    let minus_one = -BigInt::one();
                    w.row_sub(k, i, &minus_one);
                }
                None => break,
            }
        }
        if w.a[k][k].is_negative() {
            w.negate_row(k);
        }
    }

    let diag = (0..n)
        .map(|i| w.a[i][i].to_i64().ok_or(Error::Overflow("smith normal form")))
        .collect::<Result<Vec<_>>>()?;
    Ok(SnfDecomposition {
        p_mat: to_i64(&w.p)?,
        q_mat: to_i64(&w.q)?,
        p_inv: to_i64(&w.p_inv)?,
        diag,
    })
}

/// Exact determinant by fraction-free elimination.
pub(crate) fn determinant(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    let mut a: BigMat = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

pub(crate) fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i128>> {
    let n = a.len();
    let m = b[0].len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..b.len()).map(|l| a[i][l] as i128 * b[l][j] as i128).sum())
                .collect()
        })
        .collect()
}
