//! Exact rank and determinant.
//!
//! Over the rationals each row is scaled by the lcm of its denominators and
//! the resulting integer matrix is reduced with fraction-free (Bareiss)
//! elimination, so every division is exact and intermediate entries stay
//! bounded by minors of the input. Over finite fields plain Gaussian
//! elimination with inverses is used.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::field::{denominator_lcm, FieldElement, FieldSpec};

fn integer_rows(rows: &[Vec<FieldElement>]) -> (Vec<Vec<BigInt>>, BigInt) {
    let mut scale = BigInt::one();
    let out = rows
        .iter()
        .map(|row| {
            let qs: Vec<&BigRational> = row
                .iter()
                .map(|x| x.as_rational().expect("rational entries"))
                .collect();
            let l = denominator_lcm(qs.iter().copied());
            let r: Vec<BigInt> = qs.iter().map(|q| q.numer() * (&l / q.denom())).collect();
            scale *= l;
            r
        })
        .collect();
    (out, scale)
}

/// Fraction-free row reduction of an integer matrix; returns the rank.
/// Columns without a pivot are skipped, which keeps every entry an
/// integer minor of the input.
pub fn bareiss_rank(mut m: Vec<Vec<BigInt>>) -> usize {
    let nrows = m.len();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut prev = BigInt::one();
    let mut k = 0;
    for c in 0..ncols {
        if k == nrows {
            break;
        }
        let Some(piv) = (k..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(k, piv);
        for i in k + 1..nrows {
            for j in c + 1..ncols {
                let v = &m[k][c] * &m[i][j] - &m[i][c] * &m[k][j];
                debug_assert!(v.is_multiple_of(&prev));
                m[i][j] = v / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[k][c].clone();
        k += 1;
    }
    k
}

/// Bareiss determinant of a square integer matrix.
pub fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign_flip = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        let Some(piv) = (k..n).find(|&i| !m[i][k].is_zero()) else {
            return BigInt::zero();
        };
        if piv != k {
            m.swap(k, piv);
            sign_flip = !sign_flip;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[k][k] * &m[i][j] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign_flip {
        -d
    } else {
        d
    }
}

#[allow(clippy::needless_range_loop)]
fn gauss(spec: &FieldSpec, rows: &[Vec<FieldElement>]) -> (usize, FieldElement) {
    let mut m: Vec<Vec<FieldElement>> = rows.to_vec();
    let nrows = m.len();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut det = spec.one();
    let mut k = 0;
    for c in 0..ncols {
        if k == nrows {
            break;
        }
        let Some(piv) = (k..nrows).find(|&i| !m[i][c].is_zero()) else {
            det = spec.zero();
            continue;
        };
        if piv != k {
            m.swap(k, piv);
            det = -det;
        }
        det = &det * &m[k][c];
        let inv = m[k][c].invert().expect("pivot is non-zero");
        for i in k + 1..nrows {
            if m[i][c].is_zero() {
                continue;
            }
            let factor = &m[i][c] * &inv;
            for j in c..ncols {
                let sub = &factor * &m[k][j];
                m[i][j] = &m[i][j] - &sub;
            }
        }
        k += 1;
    }
    (k, det)
}

/// Exact rank of a matrix given by rows (all rows of equal length).
pub fn rank(spec: &FieldSpec, rows: &[Vec<FieldElement>]) -> usize {
    if rows.is_empty() || rows[0].is_empty() {
        return 0;
    }
    match spec {
        FieldSpec::Rationals => bareiss_rank(integer_rows(rows).0),
        _ => gauss(spec, rows).0,
    }
}

/// Exact determinant of a square matrix.
pub fn determinant(spec: &FieldSpec, m: &[Vec<FieldElement>]) -> FieldElement {
    assert!(
        m.iter().all(|r| r.len() == m.len()),
        "matrix must be square"
    );
    if m.is_empty() {
        return spec.one();
    }
    match spec {
        FieldSpec::Rationals => {
            let (ints, scale) = integer_rows(m);
            FieldElement::Rational(BigRational::new(bareiss_determinant(ints), scale))
        }
        _ => gauss(spec, m).1,
    }
}
