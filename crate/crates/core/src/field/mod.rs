//! Exact scalars over the rationals, prime fields F_p and extensions F_{p^k}.
//!
//! Every [`FieldElement`] is kept in canonical form, so structural equality
//! and hashing coincide with equality of field values:
//!
//! * rationals are reduced fractions with a positive denominator,
//! * prime-field residues lie in `[0, p)`,
//! * extension elements are coefficient vectors of length `k` over `[0, p)`,
//!   reduced modulo the stored monic irreducible modulus.

mod embed;
pub(crate) mod fpoly;

pub use embed::Embedding;

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};

/// Largest prime accepted by default.
pub const DEFAULT_PRIME_LIMIT: u64 = 1 << 61;

/// Largest extension degree accepted by default for a user-supplied modulus.
pub const DEFAULT_DEGREE_CAP: usize = 8;

/// Modulus data for F_{p^k}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExtSpec {
    p: u64,
    /// Monic modulus, constant term first; length `k + 1`.
    modulus: Vec<u64>,
}

impl ExtSpec {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Rationals,
    Prime(u64),
    Ext(Arc<ExtSpec>),
}

/// Trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return false;
    }
    let mut d = 5u64;
    while (d as u128) * (d as u128) <= n as u128 {
        if n.is_multiple_of(d) || n.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

/// Decides whether `modulus` (constant term first, monic) is irreducible over F_p.
pub fn irreducible_check(p: u64, modulus: &[u64]) -> Result<bool> {
    irreducible_check_with_cap(p, modulus, DEFAULT_DEGREE_CAP)
}

pub fn irreducible_check_with_cap(p: u64, modulus: &[u64], cap: usize) -> Result<bool> {
    let m = monic_modulus(p, modulus)?;
    let k = m.len() - 1;
    if k > cap {
        return Err(Error::DegreeTooLarge { degree: k, cap });
    }
    Ok(fpoly::is_irreducible(&m, p))
}

fn monic_modulus(p: u64, modulus: &[u64]) -> Result<Vec<u64>> {
    let m: Vec<u64> = modulus.iter().map(|&c| c % p).collect();
    if m.len() < 2 || m.last() != Some(&1) {
        return Err(Error::ModulusNotMonic);
    }
    Ok(m)
}

impl FieldSpec {
    pub fn rationals() -> Self {
        FieldSpec::Rationals
    }

    pub fn prime(p: u64) -> Result<Self> {
        Self::prime_with_limit(p, DEFAULT_PRIME_LIMIT)
    }

    pub fn prime_with_limit(p: u64, limit: u64) -> Result<Self> {
        if p > limit {
            return Err(Error::PrimeTooLarge { p, limit });
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(FieldSpec::Prime(p))
    }

    /// F_p[t]/(modulus), with the modulus given constant term first.
    pub fn extension(p: u64, modulus: &[u64]) -> Result<Self> {
        Self::extension_with_cap(p, modulus, DEFAULT_DEGREE_CAP)
    }

    pub fn extension_with_cap(p: u64, modulus: &[u64], cap: usize) -> Result<Self> {
        if p > DEFAULT_PRIME_LIMIT {
            return Err(Error::PrimeTooLarge {
                p,
                limit: DEFAULT_PRIME_LIMIT,
            });
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let m = monic_modulus(p, modulus)?;
        if !irreducible_check_with_cap(p, &m, cap)? {
            return Err(Error::ModulusReducible(p));
        }
        Ok(FieldSpec::Ext(Arc::new(ExtSpec { p, modulus: m })))
    }

    /// The first irreducible monic polynomial of degree `k` over F_p, scanning
    /// lower coefficients as base-p digits in increasing order.
    pub fn first_extension(p: u64, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidSpec("extension degree must be >= 1".into()));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let mut lower = vec![0u64; k];
        loop {
            let mut m = lower.clone();
            m.push(1);
            if fpoly::is_irreducible(&m, p) {
                return Ok(FieldSpec::Ext(Arc::new(ExtSpec { p, modulus: m })));
            }
            // next base-p digit string; an irreducible exists for every k,
            // so the scan terminates before wrapping
            let mut i = 0;
            loop {
                lower[i] += 1;
                if lower[i] < p {
                    break;
                }
                lower[i] = 0;
                i += 1;
                assert!(i < k, "no irreducible polynomial of degree {k} over F_{p}");
            }
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Rationals => 0,
            FieldSpec::Prime(p) => *p,
            FieldSpec::Ext(e) => e.p,
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, FieldSpec::Rationals)
    }

    /// Degree over the prime field (1 for F_p and for the rationals).
    pub fn degree(&self) -> usize {
        match self {
            FieldSpec::Ext(e) => e.degree(),
            _ => 1,
        }
    }

    /// Whether elements of `self` embed canonically into `target`.
    pub fn embeds_into(&self, target: &FieldSpec) -> bool {
        match (self, target) {
            (a, b) if a == b => true,
            (FieldSpec::Prime(p), FieldSpec::Ext(e)) => *p == e.p,
            _ => false,
        }
    }

    pub fn zero(&self) -> FieldElement {
        match self {
            FieldSpec::Rationals => FieldElement::Rational(BigRational::zero()),
            FieldSpec::Prime(p) => FieldElement::Prime { p: *p, v: 0 },
            FieldSpec::Ext(e) => FieldElement::Ext {
                spec: e.clone(),
                coeffs: vec![0; e.degree()],
            },
        }
    }

    pub fn one(&self) -> FieldElement {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> FieldElement {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> FieldElement {
        match self {
            FieldSpec::Rationals => FieldElement::Rational(BigRational::from_integer(n.clone())),
            FieldSpec::Prime(p) => FieldElement::Prime {
                p: *p,
                v: reduce_bigint(n, *p),
            },
            FieldSpec::Ext(e) => {
                let mut coeffs = vec![0; e.degree()];
                coeffs[0] = reduce_bigint(n, e.p);
                FieldElement::Ext {
                    spec: e.clone(),
                    coeffs,
                }
            }
        }
    }

    /// The generator `t` of an extension field.
    pub fn generator(&self) -> Option<FieldElement> {
        match self {
            FieldSpec::Ext(_) => Some(
                normalize(self, &Raw::Coeffs(vec![BigInt::zero(), BigInt::one()]))
                    .expect("coefficient input is always valid in an extension"),
            ),
            _ => None,
        }
    }
}

fn reduce_bigint(n: &BigInt, p: u64) -> u64 {
    n.mod_floor(&BigInt::from(p))
        .to_u64()
        .expect("residue fits")
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "q"),
            FieldSpec::Prime(p) => write!(f, "fp:{p}"),
            FieldSpec::Ext(e) => {
                let cs: Vec<String> = e.modulus.iter().map(|c| c.to_string()).collect();
                write!(f, "fpk:{}:{}:{}", e.p, e.degree(), cs.join(","))
            }
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    /// Parses `q`, `fp:<p>` or `fpk:<p>:<k>:<c0,...,ck>` with the default
    /// degree cap.
    fn from_str(s: &str) -> Result<Self> {
        FieldSpec::parse_with_cap(s, DEFAULT_DEGREE_CAP)
    }
}

impl FieldSpec {
    /// As `from_str`, accepting extension degrees up to `cap`.
    pub fn parse_with_cap(s: &str, cap: usize) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidSpec(s.to_string());
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["q"] => Ok(FieldSpec::Rationals),
            ["fp", p] => FieldSpec::prime(p.trim().parse().map_err(|_| bad())?),
            ["fpk", p, k, coeffs] => {
                let p: u64 = p.trim().parse().map_err(|_| bad())?;
                let k: usize = k.trim().parse().map_err(|_| bad())?;
                let m = coeffs
                    .split(',')
                    .map(|c| c.trim().parse::<u64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| bad())?;
                if m.len() != k + 1 {
                    return Err(bad());
                }
                FieldSpec::extension_with_cap(p, &m, cap)
            }
            _ => Err(bad()),
        }
    }
}

/// An exact scalar in canonical form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldElement {
    Rational(BigRational),
    Prime {
        p: u64,
        v: u64,
    },
    Ext {
        spec: Arc<ExtSpec>,
        coeffs: Vec<u64>,
    },
}

impl Hash for FieldElement {
    // Only the value is hashed; the field is covered by `Eq`.
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            FieldElement::Rational(q) => q.hash(state),
            FieldElement::Prime { v, .. } => v.hash(state),
            FieldElement::Ext { coeffs, .. } => coeffs.hash(state),
        }
    }
}

/// Unreduced input for [`normalize`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Raw {
    Integer(BigInt),
    Fraction(BigInt, BigInt),
    /// Polynomial in the generator `t`, constant term first, any length.
    Coeffs(Vec<BigInt>),
}

/// Brings a raw value into canonical form in `spec`.
pub fn normalize(spec: &FieldSpec, raw: &Raw) -> Result<FieldElement> {
    match raw {
        Raw::Integer(n) => Ok(spec.from_bigint(n)),
        Raw::Fraction(n, d) => {
            if d.is_zero() {
                return Err(Error::ZeroDenominator);
            }
            match spec {
                FieldSpec::Rationals => Ok(FieldElement::Rational(BigRational::new(
                    n.clone(),
                    d.clone(),
                ))),
                _ => {
                    let den = spec.from_bigint(d);
                    if den.is_zero() {
                        return Err(Error::ZeroDenominator);
                    }
                    Ok(&spec.from_bigint(n) * &den.invert()?)
                }
            }
        }
        Raw::Coeffs(cs) => match spec {
            FieldSpec::Ext(e) => {
                let p = e.p;
                let mut v: Vec<u64> = cs.iter().map(|c| reduce_bigint(c, p)).collect();
                v = fpoly::rem(&v, &e.modulus, p);
                v.resize(e.degree(), 0);
                Ok(FieldElement::Ext {
                    spec: e.clone(),
                    coeffs: v,
                })
            }
            _ => {
                if cs.iter().skip(1).any(|c| !c.is_zero()) {
                    return Err(Error::SpecIncompatible);
                }
                Ok(spec.from_bigint(cs.first().unwrap_or(&BigInt::zero())))
            }
        },
    }
}

/// Draws a scalar: a uniform integer in `[-bound, bound]` over the rationals,
/// a uniform element over a finite field.
pub fn sample<R: Rng + ?Sized>(spec: &FieldSpec, bound: u64, rng: &mut R) -> FieldElement {
    match spec {
        FieldSpec::Rationals => {
            let b = bound.min(i64::MAX as u64) as i64;
            FieldElement::Rational(BigRational::from_integer(BigInt::from(
                rng.gen_range(-b..=b),
            )))
        }
        FieldSpec::Prime(p) => FieldElement::Prime {
            p: *p,
            v: rng.gen_range(0..*p),
        },
        FieldSpec::Ext(e) => FieldElement::Ext {
            spec: e.clone(),
            coeffs: (0..e.degree()).map(|_| rng.gen_range(0..e.p)).collect(),
        },
    }
}

impl FieldElement {
    pub fn spec(&self) -> FieldSpec {
        match self {
            FieldElement::Rational(_) => FieldSpec::Rationals,
            FieldElement::Prime { p, .. } => FieldSpec::Prime(*p),
            FieldElement::Ext { spec, .. } => FieldSpec::Ext(spec.clone()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElement::Rational(q) => q.is_zero(),
            FieldElement::Prime { v, .. } => *v == 0,
            FieldElement::Ext { coeffs, .. } => coeffs.iter().all(|&c| c == 0),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElement::Rational(q) => q.is_one(),
            FieldElement::Prime { v, .. } => *v == 1,
            FieldElement::Ext { coeffs, .. } => {
                coeffs[0] == 1 && coeffs[1..].iter().all(|&c| c == 0)
            }
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            FieldElement::Rational(q) => Some(q),
            _ => None,
        }
    }

    /// Coordinates over the prime field (length = degree).
    pub fn coordinates(&self) -> Option<Vec<u64>> {
        match self {
            FieldElement::Rational(_) => None,
            FieldElement::Prime { v, .. } => Some(vec![*v]),
            FieldElement::Ext { coeffs, .. } => Some(coeffs.clone()),
        }
    }

    pub fn embed_into(&self, target: &FieldSpec) -> Result<FieldElement> {
        match (self, target) {
            (FieldElement::Prime { p, v }, FieldSpec::Ext(e)) if *p == e.p => {
                let mut coeffs = vec![0; e.degree()];
                coeffs[0] = *v;
                Ok(FieldElement::Ext {
                    spec: e.clone(),
                    coeffs,
                })
            }
            _ if &self.spec() == target => Ok(self.clone()),
            _ => Err(Error::SpecIncompatible),
        }
    }

    pub fn invert(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            FieldElement::Rational(q) => FieldElement::Rational(q.recip()),
            FieldElement::Prime { p, v } => FieldElement::Prime {
                p: *p,
                v: fpoly::inv_mod(*v, *p).expect("non-zero residue"),
            },
            FieldElement::Ext { spec, coeffs } => {
                let mut inv =
                    fpoly::inv_poly(coeffs, &spec.modulus, spec.p).expect("modulus is irreducible");
                inv.resize(spec.degree(), 0);
                FieldElement::Ext {
                    spec: spec.clone(),
                    coeffs: inv,
                }
            }
        })
    }

    pub fn checked_div(&self, rhs: &FieldElement) -> Result<FieldElement> {
        Ok(self * &rhs.invert()?)
    }

    pub fn pow(&self, mut exp: u64) -> FieldElement {
        let mut acc = self.spec().one();
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    fn same_field(&self, other: &FieldElement) {
        let ok = match (self, other) {
            (FieldElement::Rational(_), FieldElement::Rational(_)) => true,
            (FieldElement::Prime { p, .. }, FieldElement::Prime { p: q, .. }) => p == q,
            (FieldElement::Ext { spec: a, .. }, FieldElement::Ext { spec: b, .. }) => {
                Arc::ptr_eq(a, b) || a == b
            }
            _ => false,
        };
        assert!(ok, "field mismatch: {} vs {}", self.spec(), other.spec());
    }
}

impl Add for &FieldElement {
    type Output = FieldElement;

    fn add(self, rhs: &FieldElement) -> FieldElement {
        self.same_field(rhs);
        match (self, rhs) {
            (FieldElement::Rational(a), FieldElement::Rational(b)) => FieldElement::Rational(a + b),
            (FieldElement::Prime { p, v }, FieldElement::Prime { v: w, .. }) => {
                FieldElement::Prime {
                    p: *p,
                    v: fpoly::add_mod(*v, *w, *p),
                }
            }
            (FieldElement::Ext { spec, coeffs: a }, FieldElement::Ext { coeffs: b, .. }) => {
                FieldElement::Ext {
                    spec: spec.clone(),
                    coeffs: a
                        .iter()
                        .zip(b)
                        .map(|(&x, &y)| fpoly::add_mod(x, y, spec.p))
                        .collect(),
                }
            }
            _ => unreachable!(),
        }
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;

    fn sub(self, rhs: &FieldElement) -> FieldElement {
        self + &(-rhs)
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;

    fn neg(self) -> FieldElement {
        match self {
            FieldElement::Rational(a) => FieldElement::Rational(-a),
            FieldElement::Prime { p, v } => FieldElement::Prime {
                p: *p,
                v: fpoly::sub_mod(0, *v, *p),
            },
            FieldElement::Ext { spec, coeffs } => FieldElement::Ext {
                spec: spec.clone(),
                coeffs: coeffs
                    .iter()
                    .map(|&c| fpoly::sub_mod(0, c, spec.p))
                    .collect(),
            },
        }
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;

    fn mul(self, rhs: &FieldElement) -> FieldElement {
        self.same_field(rhs);
        match (self, rhs) {
            (FieldElement::Rational(a), FieldElement::Rational(b)) => FieldElement::Rational(a * b),
            (FieldElement::Prime { p, v }, FieldElement::Prime { v: w, .. }) => {
                FieldElement::Prime {
                    p: *p,
                    v: fpoly::mul_mod(*v, *w, *p),
                }
            }
            (FieldElement::Ext { spec, coeffs: a }, FieldElement::Ext { coeffs: b, .. }) => {
                FieldElement::Ext {
                    spec: spec.clone(),
                    coeffs: ext_mul(spec, a, b),
                }
            }
            _ => unreachable!(),
        }
    }
}

fn ext_mul(spec: &ExtSpec, a: &[u64], b: &[u64]) -> Vec<u64> {
    let k = spec.degree();
    let p = spec.p as u128;
    let mut prod = vec![0u128; 2 * k - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u128 * y as u128) % p;
        }
    }
    // t^k = -(m_0 + ... + m_{k-1} t^{k-1})
    for top in (k..prod.len()).rev() {
        let c = prod[top];
        if c == 0 {
            continue;
        }
        prod[top] = 0;
        let neg = p - c;
        for (j, &mj) in spec.modulus[..k].iter().enumerate() {
            let idx = top - k + j;
            prod[idx] = (prod[idx] + neg * mj as u128) % p;
        }
    }
    prod.truncate(k);
    prod.into_iter().map(|c| c as u64).collect()
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: FieldElement) -> FieldElement {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: &FieldElement) -> FieldElement {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

impl fmt::Display for FieldElement {
    /// Rationals as `a/b` (denominator 1 omitted); finite-field elements as
    /// `c0+c1*t+c2*t^2` with zero terms omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElement::Rational(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            FieldElement::Prime { v, .. } => write!(f, "{v}"),
            FieldElement::Ext { coeffs, .. } => {
                let terms: Vec<String> = coeffs
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c != 0)
                    .map(|(i, &c)| match (i, c) {
                        (0, c) => c.to_string(),
                        (1, 1) => "t".to_string(),
                        (1, c) => format!("{c}*t"),
                        (i, 1) => format!("t^{i}"),
                        (i, c) => format!("{c}*t^{i}"),
                    })
                    .collect();
                if terms.is_empty() {
                    write!(f, "0")
                } else {
                    write!(f, "{}", terms.join("+"))
                }
            }
        }
    }
}

/// Parses a scalar string as produced by `Display` (plus signed integers and
/// fractions in any field).
pub fn parse_scalar(spec: &FieldSpec, s: &str) -> Result<FieldElement> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = |m: &str| Error::Parse {
        line: 1,
        column: 1,
        message: format!("{m}: {s:?}"),
    };
    if s.is_empty() {
        return Err(bad("empty scalar"));
    }
    if !s.contains('t') {
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s.as_str(), "1"),
        };
        let n = BigInt::from_str(n).map_err(|_| bad("invalid integer"))?;
        let d = BigInt::from_str(d).map_err(|_| bad("invalid denominator"))?;
        return normalize(spec, &Raw::Fraction(n, d));
    }
    if !matches!(spec, FieldSpec::Ext(_)) {
        return Err(bad("generator t only exists in extension fields"));
    }
    let mut coeffs: Vec<BigInt> = Vec::new();
    for term in s.split('+') {
        let (c, power) = match term.split_once('t') {
            None => (term, 0usize),
            Some((pre, post)) => {
                let c = match pre {
                    "" => "1",
                    _ => pre
                        .strip_suffix('*')
                        .ok_or_else(|| bad("expected '*' before t"))?,
                };
                let power = match post {
                    "" => 1,
                    _ => post
                        .strip_prefix('^')
                        .and_then(|e| e.parse().ok())
                        .ok_or_else(|| bad("invalid exponent"))?,
                };
                (c, power)
            }
        };
        let c = BigInt::from_str(c).map_err(|_| bad("invalid coefficient"))?;
        if coeffs.len() <= power {
            coeffs.resize(power + 1, BigInt::zero());
        }
        coeffs[power] += c;
    }
    normalize(spec, &Raw::Coeffs(coeffs))
}

/// Least common multiple of the denominators of a rational row.
pub(crate) fn denominator_lcm<'a>(values: impl Iterator<Item = &'a BigRational>) -> BigInt {
    values.fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f4() -> FieldSpec {
        FieldSpec::extension(2, &[1, 1, 1]).unwrap()
    }

    fn f9() -> FieldSpec {
        FieldSpec::extension(3, &[1, 0, 1]).unwrap()
    }

    fn q(n: i64, d: i64) -> FieldElement {
        normalize(&FieldSpec::Rationals, &Raw::Fraction(n.into(), d.into())).unwrap()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(q(2, 4), q(1, 2));
        assert_eq!(q(2, 4).to_string(), "1/2");
        let f7 = FieldSpec::prime(7).unwrap();
        assert_eq!(
            normalize(&f7, &Raw::Integer(10.into()))
                .unwrap()
                .to_string(),
            "3"
        );
        let t2 = normalize(&f4(), &Raw::Coeffs(vec![0.into(), 0.into(), 1.into()])).unwrap();
        assert_eq!(t2.to_string(), "1+t");
        assert_eq!(
            normalize(&FieldSpec::Rationals, &Raw::Fraction(1.into(), 0.into())),
            Err(Error::ZeroDenominator)
        );
        assert_eq!(
            normalize(&f7, &Raw::Fraction(1.into(), 14.into())),
            Err(Error::ZeroDenominator)
        );
        assert_eq!(q(3, -6).to_string(), "-1/2");
    }

    #[test]
    fn invert_examples() {
        assert_eq!(q(3, 5).invert().unwrap(), q(5, 3));
        let f7 = FieldSpec::prime(7).unwrap();
        assert_eq!(f7.from_i64(3).invert().unwrap(), f7.from_i64(5));
        let t = f4().generator().unwrap();
        assert_eq!(t.invert().unwrap().to_string(), "1+t");
        assert_eq!(f7.zero().invert(), Err(Error::DivisionByZero));
    }

    #[test]
    fn irreducible_examples() {
        assert_eq!(irreducible_check(2, &[1, 1, 1]), Ok(true));
        assert_eq!(irreducible_check(2, &[1, 0, 1]), Ok(false));
        assert_eq!(irreducible_check(3, &[1, 0, 1]), Ok(true));
        assert!(matches!(
            irreducible_check(2, &[1; 10]),
            Err(Error::DegreeTooLarge { degree: 9, cap: 8 })
        ));
        assert_eq!(
            irreducible_check(2, &[1, 1, 0]),
            Err(Error::ModulusNotMonic)
        );
    }

    #[test]
    fn t_squared_plus_one_over_f3_has_no_root() {
        // brute-force root check, independent of the Ben-Or test
        assert!((0..3u64).all(|x| (x * x + 1) % 3 != 0));
    }

    /// Trial division by every monic polynomial of degree <= k/2.
    fn irreducible_by_trial_division(p: u64, m: &[u64]) -> bool {
        let k = m.len() - 1;
        for d in 1..=k / 2 {
            let count = p.pow(d as u32);
            for n in 0..count {
                let mut div: Vec<u64> = (0..d).map(|i| (n / p.pow(i as u32)) % p).collect();
                div.push(1);
                if fpoly::rem(m, &div, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn ben_or_matches_trial_division() {
        for p in [2u64, 3, 5] {
            for k in 1..=5usize {
                let count = p.pow(k as u32);
                for n in 0..count {
                    let mut m: Vec<u64> = (0..k).map(|i| (n / p.pow(i as u32)) % p).collect();
                    m.push(1);
                    assert_eq!(
                        irreducible_check(p, &m).unwrap(),
                        irreducible_by_trial_division(p, &m),
                        "p={p} m={m:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn spec_strings_round_trip() {
        for s in ["q", "fp:7", "fpk:2:2:1,1,1", "fpk:3:2:1,0,1"] {
            let spec: FieldSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert!(matches!(
            "fp:8".parse::<FieldSpec>(),
            Err(Error::NotPrime(8))
        ));
        assert!(matches!(
            "fpk:2:2:1,0,1".parse::<FieldSpec>(),
            Err(Error::ModulusReducible(2))
        ));
        assert!("fpk:2:3:1,1,1".parse::<FieldSpec>().is_err());
        assert!("r".parse::<FieldSpec>().is_err());
    }

    #[test]
    fn prime_limit_enforced() {
        assert!(matches!(
            FieldSpec::prime_with_limit(101, 100),
            Err(Error::PrimeTooLarge { .. })
        ));
        // 2^61 - 1 is a Mersenne prime
        assert!(FieldSpec::prime((1 << 61) - 1).is_ok());
    }

    #[test]
    fn first_extension_is_irreducible() {
        assert_eq!(FieldSpec::first_extension(2, 2).unwrap(), f4());
        for k in 2..=9 {
            let FieldSpec::Ext(e) = FieldSpec::first_extension(101, k).unwrap() else {
                panic!()
            };
            assert_eq!(e.degree(), k);
            assert!(fpoly::is_irreducible(e.modulus(), 101));
        }
    }

    #[test]
    fn sample_ranges() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let x = sample(&FieldSpec::Rationals, 1, &mut rng);
            let v = x.as_rational().unwrap().to_integer();
            assert!((-1..=1).contains(&v.to_i64().unwrap()));
            let y = sample(&FieldSpec::Prime(2), 100, &mut rng);
            assert!(matches!(y, FieldElement::Prime { v: 0 | 1, .. }));
            let z = sample(&f9(), 1, &mut rng);
            assert!(z.coordinates().unwrap().iter().all(|&c| c < 3));
            assert_eq!(z.coordinates().unwrap().len(), 2);
        }
        let a: Vec<_> = (0..5)
            .map(|_| sample(&f9(), 1, &mut ChaCha8Rng::seed_from_u64(3)))
            .collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn scalar_strings_round_trip() {
        let f = f9();
        for a in 0..3 {
            for b in 0..3 {
                let x = normalize(&f, &Raw::Coeffs(vec![a.into(), b.into()])).unwrap();
                assert_eq!(parse_scalar(&f, &x.to_string()).unwrap(), x);
            }
        }
        assert_eq!(
            parse_scalar(&FieldSpec::Rationals, "-3/6").unwrap(),
            q(-1, 2)
        );
        assert_eq!(parse_scalar(&f4(), "t+1").unwrap().to_string(), "1+t");
        assert_eq!(parse_scalar(&f4(), "t^2").unwrap().to_string(), "1+t");
        assert!(parse_scalar(&FieldSpec::Rationals, "t").is_err());
        assert!(parse_scalar(&FieldSpec::Rationals, "1/0").is_err());
    }

    #[test]
    fn embedding_prime_into_extension() {
        let f = f9();
        let two = FieldSpec::Prime(3).from_i64(2);
        let e = two.embed_into(&f).unwrap();
        assert_eq!(e, f.from_i64(2));
        assert_eq!(
            two.embed_into(&FieldSpec::Prime(5)),
            Err(Error::SpecIncompatible)
        );
        assert_eq!(q(1, 2).embed_into(&f), Err(Error::SpecIncompatible));
    }

    fn arb_spec() -> impl Strategy<Value = FieldSpec> {
        prop_oneof![
            Just(FieldSpec::Rationals),
            Just(FieldSpec::Prime(101)),
            Just(FieldSpec::Prime(2)),
            Just(FieldSpec::extension(2, &[1, 1, 0, 1]).unwrap()),
            Just(FieldSpec::first_extension(5, 4).unwrap()),
        ]
    }

    fn arb_elements() -> impl Strategy<Value = (FieldSpec, FieldElement, FieldElement, FieldElement)>
    {
        (arb_spec(), any::<u64>()).prop_map(|(spec, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut draw = || {
                let n = sample(&spec, 50, &mut rng);
                if let FieldSpec::Rationals = spec {
                    let d = rng.gen_range(1..20i64);
                    n.checked_div(&spec.from_i64(d)).unwrap()
                } else {
                    n
                }
            };
            let (a, b, c) = (draw(), draw(), draw());
            (spec, a, b, c)
        })
    }

    proptest! {
        #[test]
        fn field_axioms((spec, a, b, c) in arb_elements()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a - &a, spec.zero());
            if !a.is_zero() {
                prop_assert!((&a * &a.invert().unwrap()).is_one());
            }
        }

        #[test]
        fn normalize_is_idempotent((spec, a, _b, _c) in arb_elements()) {
            let raw = match &a {
                FieldElement::Rational(q) => Raw::Fraction(q.numer().clone(), q.denom().clone()),
                FieldElement::Prime { v, .. } => Raw::Integer((*v).into()),
                FieldElement::Ext { coeffs, .. } => {
                    Raw::Coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
                }
            };
            prop_assert_eq!(normalize(&spec, &raw).unwrap(), a.clone());
            prop_assert_eq!(parse_scalar(&spec, &a.to_string()).unwrap(), a);
        }

        #[test]
        fn frobenius_is_additive(seed in any::<u64>(), which in 0usize..3) {
            let spec = [f4(), f9(), FieldSpec::first_extension(5, 4).unwrap()][which].clone();
            let p = spec.characteristic();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = sample(&spec, 1, &mut rng);
            let b = sample(&spec, 1, &mut rng);
            prop_assert_eq!((&a + &b).pow(p), &a.pow(p) + &b.pow(p));
        }

        #[test]
        fn canonical_form_is_unique(n in -1000i64..1000, d in 1i64..100, m in 1i64..50) {
            // n/d and (n*m)/(d*m) are the same value and must be structurally identical
            prop_assert_eq!(q(n, d), q(n * m, d * m));
            let f = FieldSpec::Prime(101);
            let x = normalize(&f, &Raw::Fraction(n.into(), d.into()));
            let y = normalize(&f, &Raw::Fraction((n * m).into(), (d * m).into()));
            if d % 101 != 0 && m % 101 != 0 {
                prop_assert_eq!(x.unwrap(), y.unwrap());
            }
        }
    }
}
