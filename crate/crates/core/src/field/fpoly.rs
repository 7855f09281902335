//! Dense univariate polynomials over a prime field, stored constant term first.
//!
//! Backs extension-field multiplication, inversion and the irreducibility test.

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

pub(crate) fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

/// Inverse of a non-zero residue via the extended Euclidean algorithm.
pub(crate) fn inv_mod(a: u64, p: u64) -> Option<u64> {
    if a.is_multiple_of(p) {
        return None;
    }
    let (mut old_r, mut r) = (a as i128, p as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(p as i128) as u64)
}

pub(crate) fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

pub(crate) fn degree(v: &[u64]) -> Option<usize> {
    v.iter().rposition(|&c| c != 0)
}

pub(crate) fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out: Vec<u64> = (0..n)
        .map(|i| {
            sub_mod(
                a.get(i).copied().unwrap_or(0),
                b.get(i).copied().unwrap_or(0),
                p,
            )
        })
        .collect();
    trim(&mut out);
    out
}

pub(crate) fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u128; a.len() + b.len() - 1];
    let pp = p as u128;
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u128 * y as u128) % pp;
        }
    }
    let mut out: Vec<u64> = out.into_iter().map(|c| c as u64).collect();
    trim(&mut out);
    out
}

/// Quotient and remainder of `a` by a non-zero `b`.
pub(crate) fn divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let db = degree(b).expect("division by the zero polynomial");
    let lead_inv = inv_mod(b[db], p).expect("leading coefficient is a unit");
    let mut rem: Vec<u64> = a.to_vec();
    trim(&mut rem);
    if rem.len() <= db {
        return (Vec::new(), rem);
    }
    let mut quot = vec![0u64; rem.len() - db];
    while let Some(dr) = degree(&rem) {
        if dr < db {
            break;
        }
        let c = mul_mod(rem[dr], lead_inv, p);
        let shift = dr - db;
        quot[shift] = c;
        for (j, &bj) in b[..=db].iter().enumerate() {
            rem[shift + j] = sub_mod(rem[shift + j], mul_mod(c, bj, p), p);
        }
        trim(&mut rem);
    }
    trim(&mut quot);
    (quot, rem)
}

pub(crate) fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    divrem(a, b, p).1
}

pub(crate) fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Inverse of `a` modulo `m`, if `gcd(a, m)` is a unit.
pub(crate) fn inv_poly(a: &[u64], m: &[u64], p: u64) -> Option<Vec<u64>> {
    let (mut old_r, mut r) = (a.to_vec(), m.to_vec());
    trim(&mut old_r);
    trim(&mut r);
    let (mut old_s, mut s): (Vec<u64>, Vec<u64>) = (vec![1], Vec::new());
    while !r.is_empty() {
        let (q, rr) = divrem(&old_r, &r, p);
        let ns = sub(&old_s, &mul(&q, &s, p), p);
        old_r = std::mem::replace(&mut r, rr);
        old_s = std::mem::replace(&mut s, ns);
    }
    if degree(&old_r) != Some(0) {
        return None;
    }
    let c = inv_mod(old_r[0], p)?;
    let mut out: Vec<u64> = old_s.iter().map(|&x| mul_mod(x, c, p)).collect();
    out = rem(&out, m, p);
    Some(out)
}

/// `base^exp mod m`.
pub(crate) fn pow_poly_mod(base: &[u64], mut exp: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = rem(base, m, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = rem(&mul(&acc, &b, p), m, p);
        }
        b = rem(&mul(&b, &b, p), m, p);
        exp >>= 1;
    }
    acc
}

/// Ben-Or irreducibility test: `f` of degree k is irreducible over F_p iff
/// `gcd(t^(p^i) - t, f) = 1` for every `1 <= i <= k/2`.
pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let k = match degree(f) {
        Some(k) if k >= 1 => k,
        _ => return false,
    };
    let t = vec![0u64, 1];
    let mut h = t.clone();
    for _ in 0..k / 2 {
        h = pow_poly_mod(&h, p, f, p);
        let g = gcd(f, &sub(&h, &t, p), p);
        if degree(&g) != Some(0) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_mod_prime() {
        assert_eq!(inv_mod(3, 7), Some(5));
        assert_eq!(inv_mod(0, 7), None);
        assert_eq!(inv_mod(1, 2), Some(1));
    }

    #[test]
    fn divrem_reconstructs() {
        let p = 7;
        let a = vec![3, 0, 5, 1, 2];
        let b = vec![1, 4, 1];
        let (q, r) = divrem(&a, &b, p);
        let back = {
            let qb = mul(&q, &b, p);
            let n = qb.len().max(r.len());
            let mut v: Vec<u64> = (0..n)
                .map(|i| add_mod(*qb.get(i).unwrap_or(&0), *r.get(i).unwrap_or(&0), p))
                .collect();
            trim(&mut v);
            v
        };
        assert_eq!(back, a);
        assert!(degree(&r).is_none_or(|d| d < 2));
    }

    #[test]
    fn poly_inverse() {
        // F_4 = F_2[t]/(t^2+t+1): t * (t+1) = 1
        let m = vec![1, 1, 1];
        assert_eq!(inv_poly(&[0, 1], &m, 2), Some(vec![1, 1]));
        assert_eq!(inv_poly(&[], &m, 2), None);
    }

    #[test]
    fn ben_or_small_cases() {
        assert!(is_irreducible(&[1, 1, 1], 2));
        assert!(!is_irreducible(&[1, 0, 1], 2));
        assert!(is_irreducible(&[1, 0, 1], 3));
        assert!(is_irreducible(&[1, 1, 0, 1], 2));
        assert!(!is_irreducible(&[1, 1, 1, 1], 2));
    }
}
