//! Exact linear algebra over the rationals.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

pub fn q_vec(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| q(x)).collect()
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn is_zero_vec(v: &[Q]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Reduced row echelon form of a set of row vectors; zero rows dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct RowEchelon {
    pub rows: Vec<Vec<Q>>,
    pub pivots: Vec<usize>,
    pub width: usize,
}

impl RowEchelon {
    pub fn new(mut rows: Vec<Vec<Q>>, width: usize) -> Self {
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..width {
            let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
                continue;
            };
            rows.swap(r, p);
            let inv = rows[r][col].recip();
            for x in rows[r].iter_mut() {
                *x *= &inv;
            }
            let pivot_row = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && !row[col].is_zero() {
                    let f = row[col].clone();
                    for (x, y) in row.iter_mut().zip(&pivot_row) {
                        *x -= &f * y;
                    }
                }
            }
            pivots.push(col);
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        rows.truncate(r);
        RowEchelon {
            rows,
            pivots,
            width,
        }
    }

    pub fn from_i64(rows: &[Vec<i64>], width: usize) -> Self {
        Self::new(rows.iter().map(|r| q_vec(r)).collect(), width)
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Component of `v` left after eliminating the row space pivots. Zero iff
    /// `v` lies in the row space.
    pub fn reduce(&self, v: &[Q]) -> Vec<Q> {
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let f = v[p].clone();
                for (x, y) in v.iter_mut().zip(row) {
                    *x -= &f * y;
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        is_zero_vec(&self.reduce(v))
    }

    /// Orthogonal projection of `v` onto the row space.
    pub fn project(&self, v: &[Q]) -> Vec<Q> {
        let k = self.rows.len();
        if k == 0 {
            return alloc::vec![Q::zero(); v.len()];
        }
        // Solve (B B^T) c = B v, projection = B^T c.
        let mut gram: Vec<Vec<Q>> = (0..k)
            .map(|i| {
                let mut row: Vec<Q> = (0..k).map(|j| dot(&self.rows[i], &self.rows[j])).collect();
                row.push(dot(&self.rows[i], v));
                row
            })
            .collect();
        let c = solve_square(&mut gram).expect("Gram matrix of independent rows is invertible");
        let mut out = alloc::vec![Q::zero(); v.len()];
        for (ci, row) in c.iter().zip(&self.rows) {
            for (o, x) in out.iter_mut().zip(row) {
                *o += ci * x;
            }
        }
        out
    }
}

/// Solves an augmented square system `[A | b]` in place. `None` if singular.
pub fn solve_square(aug: &mut [Vec<Q>]) -> Option<Vec<Q>> {
    let n = aug.len();
    for col in 0..n {
        let p = (col..n).find(|&i| !aug[i][col].is_zero())?;
        aug.swap(col, p);
        let inv = aug[col][col].recip();
        for x in aug[col].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = aug[col].clone();
        for (i, row) in aug.iter_mut().enumerate() {
            if i != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
    }
    Some(aug.iter().map(|row| row[n].clone()).collect())
}

/// Rank of a list of integer vectors.
pub fn rank_i64(rows: &[Vec<i64>], width: usize) -> usize {
    RowEchelon::from_i64(rows, width).rank()
}

/// Smallest positive multiple of `v` with integer entries of gcd 1. Zero
/// vectors map to zero.
pub fn primitive_integer(v: &[Q]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Q::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub fn primitive_i64(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0i64, |acc, &x| acc.gcd(&x)).abs();
    if g == 0 {
        return v.to_vec();
    }
    v.iter().map(|&x| x / g).collect()
}

pub fn to_i64(v: &[BigInt]) -> Option<Vec<i64>> {
    v.iter().map(|x| i64::try_from(x).ok()).collect()
}

pub fn q_sign(x: &Q) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}
