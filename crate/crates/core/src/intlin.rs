//! Small exact linear algebra over `Z` and `Q` for lattice bookkeeping.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

pub fn rat(x: i64) -> Rat {
    Rat::from_integer(BigInt::from(x))
}

/// Row-reduces `[a | b]` and returns the unique solution of `a x = b`, or
/// `None` when the system is inconsistent or `a` lacks full column rank.
pub fn solve_unique(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut row = r.clone();
            row.push(bi.clone());
            row
        })
        .collect();
    let mut prow = 0;
    for c in 0..cols {
        let Some(p) = (prow..rows).find(|&i| !m[i][c].is_zero()) else {
            return None;
        };
        m.swap(prow, p);
        let inv = m[prow][c].recip();
        for x in m[prow].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != prow && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in 0..=cols {
                    let d = &f * &m[prow][k];
                    m[i][k] -= d;
                }
            }
        }
        prow += 1;
    }
    if m[prow..].iter().any(|r| !r[cols].is_zero()) {
        return None;
    }
    Some((0..cols).map(|c| m[c][cols].clone()).collect())
}

pub fn rank(a: &[Vec<i64>]) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut m: Vec<Vec<Rat>> = a.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect();
    let mut prow = 0;
    for c in 0..cols {
        let Some(p) = (prow..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(prow, p);
        for i in prow + 1..rows {
            if !m[i][c].is_zero() {
                let f = &m[i][c] / &m[prow][c];
                for k in c..cols {
                    let d = &f * &m[prow][k];
                    m[i][k] -= d;
                }
            }
        }
        prow += 1;
    }
    prow
}

/// A basis of the saturated lattice `{x in Z^r : a x = 0}` where `a` has
/// `r` columns, found by unimodular column operations.
pub fn integer_kernel(a: &[Vec<i64>], r: usize) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<i128>> = a.iter().map(|row| row.iter().map(|&x| x as i128).collect()).collect();
    let mut u: Vec<Vec<i128>> = (0..r)
        .map(|i| (0..r).map(|j| i128::from(i == j)).collect())
        .collect();
    let col_op = |m: &mut Vec<Vec<i128>>, u: &mut Vec<Vec<i128>>, dst: usize, src: usize, f: i128| {
        for row in m.iter_mut() {
            row[dst] -= f * row[src];
        }
        for row in u.iter_mut() {
            row[dst] -= f * row[src];
        }
    };
    let swap = |m: &mut Vec<Vec<i128>>, u: &mut Vec<Vec<i128>>, a: usize, b: usize| {
        for row in m.iter_mut() {
            row.swap(a, b);
        }
        for row in u.iter_mut() {
            row.swap(a, b);
        }
    };
    let mut pivot = 0;
    for i in 0..m.len() {
        if pivot == r {
            break;
        }
        loop {
            // Smallest nonzero entry of row i among the free columns.
            let best = (pivot..r)
                .filter(|&j| m[i][j] != 0)
                .min_by_key(|&j| m[i][j].abs());
            let Some(b) = best else { break };
            swap(&mut m, &mut u, pivot, b);
            let mut done = true;
            for j in pivot + 1..r {
                if m[i][j] != 0 {
                    let f = m[i][j].div_euclid(m[i][pivot]);
                    col_op(&mut m, &mut u, j, pivot, f);
                    if m[i][j] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                pivot += 1;
                break;
            }
        }
    }
    (pivot..r)
        .map(|j| u.iter().map(|row| row[j] as i64).collect())
        .collect()
}

pub fn ceil(x: &Rat) -> BigInt {
    x.ceil().to_integer()
}

pub fn floor(x: &Rat) -> BigInt {
    x.floor().to_integer()
}

pub fn is_nonneg(x: &Rat) -> bool {
    !x.is_negative()
}

pub fn is_integral(x: &Rat) -> bool {
    x.denom().is_one()
}
