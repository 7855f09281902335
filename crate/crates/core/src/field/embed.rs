//! Embeddings `F_{p^k} -> F_{p^n}` for `k | n`, determined by the image of
//! the generator `t`, which must be a root of the source modulus.

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;

use super::{sample, ExtSpec, FieldElement, FieldSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    source: Arc<ExtSpec>,
    target: FieldSpec,
    image: FieldElement,
}

fn ext_pair(source: &FieldSpec, target: &FieldSpec) -> Result<(Arc<ExtSpec>, usize)> {
    match (source, target) {
        (FieldSpec::Ext(s), FieldSpec::Ext(t)) if s.p == t.p && t.degree() % s.degree() == 0 => {
            Ok((s.clone(), t.degree()))
        }
        _ => Err(Error::SpecIncompatible),
    }
}

/// `sum_i c_i * x^i` for F_p coefficients `c_i` (constant first).
fn eval_fp_poly(coeffs: &[u64], x: &FieldElement) -> FieldElement {
    let spec = x.spec();
    coeffs.iter().rev().fold(spec.zero(), |acc, &c| {
        &(&acc * x) + &spec.from_i64(c as i64)
    })
}

impl Embedding {
    /// Checks that `image` lies in `target` and is a root of the source
    /// modulus, so `t -> image` extends to a field homomorphism.
    pub fn new(source: &FieldSpec, target: &FieldSpec, image: FieldElement) -> Result<Self> {
        let (src, _) = ext_pair(source, target)?;
        if &image.spec() != target {
            return Err(Error::SpecMismatch);
        }
        if !eval_fp_poly(src.modulus(), &image).is_zero() {
            return Err(Error::PreconditionViolated(format!(
                "{image} is not a root of the modulus of {source}"
            )));
        }
        Ok(Embedding {
            source: src,
            target: target.clone(),
            image,
        })
    }

    /// Finds a root of the source modulus in `target` by equal-degree
    /// splitting. The modulus is irreducible of degree dividing `[target:F_p]`,
    /// so it splits into distinct linear factors there.
    pub fn find<R: Rng + ?Sized>(
        source: &FieldSpec,
        target: &FieldSpec,
        rng: &mut R,
    ) -> Result<Self> {
        let (src, n) = ext_pair(source, target)?;
        let mut f: Vec<FieldElement> = src
            .modulus()
            .iter()
            .map(|&c| target.from_i64(c as i64))
            .collect();
        let q = BigUint::from(src.p).pow(n as u32);
        while f.len() > 2 {
            let delta = sample(target, 0, rng);
            let h = if src.p == 2 {
                // absolute trace of delta * X modulo f
                let mut term = rem(&[target.zero(), delta], &f);
                let mut acc = term.clone();
                for _ in 1..n {
                    term = mulmod(&term, &term, &f);
                    acc = add(&acc, &term);
                }
                acc
            } else {
                let exp = (&q - BigUint::one()) >> 1;
                let mut h = powmod(&[delta, target.one()], &exp, &f);
                if h.is_empty() {
                    h.push(target.zero());
                }
                h[0] = &h[0] - &target.one();
                trim(h)
            };
            let g = gcd(&f, &h);
            if g.len() > 1 && g.len() < f.len() {
                f = g;
            }
        }
        let root = -&f[0];
        Embedding::new(source, target, root)
    }

    pub fn source(&self) -> FieldSpec {
        FieldSpec::Ext(self.source.clone())
    }

    pub fn target(&self) -> &FieldSpec {
        &self.target
    }

    /// The image of the generator `t`.
    pub fn image(&self) -> &FieldElement {
        &self.image
    }

    /// Maps an element of the source field (or of its prime field).
    pub fn apply(&self, x: &FieldElement) -> Result<FieldElement> {
        match x {
            FieldElement::Ext { spec, coeffs } if *spec == self.source => {
                Ok(eval_fp_poly(coeffs, &self.image))
            }
            FieldElement::Prime { p, .. } if *p == self.source.p => x.embed_into(&self.target),
            _ => Err(Error::SpecIncompatible),
        }
    }
}

// Dense univariate polynomials over a field, constant term first, trimmed.

fn trim(mut a: Vec<FieldElement>) -> Vec<FieldElement> {
    while a.last().is_some_and(FieldElement::is_zero) {
        a.pop();
    }
    a
}

fn add(a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut out = long.to_vec();
    for (o, s) in out.iter_mut().zip(short) {
        *o = &*o + s;
    }
    trim(out)
}

fn rem(a: &[FieldElement], m: &[FieldElement]) -> Vec<FieldElement> {
    let mut r = trim(a.to_vec());
    let dm = m.len() - 1;
    let lead_inv = m[dm].invert().expect("non-zero leading coefficient");
    while r.len() > dm {
        let shift = r.len() - 1 - dm;
        let c = &r[r.len() - 1] * &lead_inv;
        for (i, mi) in m.iter().enumerate() {
            r[shift + i] = &r[shift + i] - &(&c * mi);
        }
        r = trim(r);
    }
    r
}

fn mulmod(a: &[FieldElement], b: &[FieldElement], m: &[FieldElement]) -> Vec<FieldElement> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let spec = a[0].spec();
    let mut out = vec![spec.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    rem(&out, m)
}

fn powmod(base: &[FieldElement], exp: &BigUint, m: &[FieldElement]) -> Vec<FieldElement> {
    let one = vec![m[0].spec().one()];
    let mut acc = rem(&one, m);
    let b = rem(base, m);
    for i in (0..exp.bits()).rev() {
        acc = mulmod(&acc, &acc, m);
        if exp.bit(i) {
            acc = mulmod(&acc, &b, m);
        }
    }
    acc
}

/// Monic gcd.
fn gcd(a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    let (mut x, mut y) = (trim(a.to_vec()), trim(b.to_vec()));
    while !y.is_empty() {
        let r = rem(&x, &y);
        x = y;
        y = r;
    }
    if let Some(lead) = x.last().cloned() {
        let inv = lead.invert().expect("non-zero");
        x = x.iter().map(|c| c * &inv).collect();
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::parse_scalar;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn finds_homomorphic_embeddings() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cases = [
            (2u64, 2usize, 6usize),
            (2, 3, 6),
            (3, 2, 4),
            (5, 2, 6),
            (101, 2, 4),
            (2, 2, 34),
        ];
        for (p, k, n) in cases {
            let src = FieldSpec::first_extension(p, k).unwrap();
            let tgt = FieldSpec::first_extension(p, n).unwrap();
            let emb = Embedding::find(&src, &tgt, &mut rng).unwrap();
            for _ in 0..20 {
                let a = sample(&src, 0, &mut rng);
                let b = sample(&src, 0, &mut rng);
                let (fa, fb) = (emb.apply(&a).unwrap(), emb.apply(&b).unwrap());
                assert_eq!(emb.apply(&(&a * &b)).unwrap(), &fa * &fb);
                assert_eq!(emb.apply(&(&a + &b)).unwrap(), &fa + &fb);
                assert_eq!(fa.is_zero(), a.is_zero());
            }
            assert!(emb.apply(&src.one()).unwrap().is_one());
        }
    }

    #[test]
    fn rejects_non_roots_and_bad_degrees() {
        let f4 = FieldSpec::extension(2, &[1, 1, 1]).unwrap();
        let f8 = FieldSpec::first_extension(2, 3).unwrap();
        let f16 = FieldSpec::first_extension(2, 4).unwrap();
        assert_eq!(
            Embedding::find(&f4, &f8, &mut ChaCha8Rng::seed_from_u64(0)),
            Err(Error::SpecIncompatible)
        );
        let not_root = parse_scalar(&f16, "t").unwrap();
        assert!(matches!(
            Embedding::new(&f4, &f16, not_root),
            Err(Error::PreconditionViolated(_))
        ));
        // the identity is an embedding of F_4 into itself
        let t = parse_scalar(&f4, "t").unwrap();
        let id = Embedding::new(&f4, &f4, t.clone()).unwrap();
        assert_eq!(id.apply(&t).unwrap(), t);
    }
}
