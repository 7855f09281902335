//! Independence certificates for `f_1^e, ..., f_r^e`.
//!
//! Given witness points `x_1, ..., x_r`, the permutation products
//! `c_sigma = f_{sigma(1)}(x_1) ... f_{sigma(r)}(x_r)` are distinct and
//! non-zero, so some `e <= r!` makes `sum_sigma sign(sigma) c_sigma^e`
//! non-zero (invertibility of the Vandermonde matrix `(c_sigma^j)`). That sum
//! is the determinant of `M[i][j] = f_i(x_j)^e`, and a non-singular `M` rules
//! out any linear dependency among the powered polynomials: a dependency
//! would evaluate to a dependency among the rows of `M`.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{parse_scalar, Embedding, FieldElement, FieldSpec};
use crate::linalg;
use crate::perm::{factorial, Permutations, Sign};
use crate::poly::{family_digest, validate_family, Polynomial};
use crate::witness::{find_witness, witness_values, WitnessConfig, WitnessSet, WitnessViolation};

pub const SCHEMA_VERSION: u32 = 1;

/// Default cap on the family size (8! = 40320 permutations).
pub const DEFAULT_MAX_R: usize = 8;

/// Finds the smallest `j` in `1..=t` with `sum_i betas[i] * alphas[i]^j != 0`.
/// Returns `j` and that sum.
pub fn lemma2_witness(
    alphas: &[FieldElement],
    betas: &[FieldElement],
) -> Result<(usize, FieldElement)> {
    let t = alphas.len();
    if t == 0 || betas.len() != t {
        return Err(Error::PreconditionViolated(
            "alphas and betas must be non-empty and of equal length".into(),
        ));
    }
    let spec = alphas[0].spec();
    if alphas.iter().chain(betas).any(|a| a.spec() != spec) {
        return Err(Error::SpecMismatch);
    }
    if alphas.iter().any(FieldElement::is_zero) {
        return Err(Error::PreconditionViolated(
            "alphas must be non-zero".into(),
        ));
    }
    if alphas.iter().collect::<HashSet<_>>().len() != t {
        return Err(Error::PreconditionViolated(
            "alphas must be distinct".into(),
        ));
    }
    if betas.iter().all(FieldElement::is_zero) {
        return Err(Error::PreconditionViolated(
            "betas must not all be zero".into(),
        ));
    }
    let mut powers: Vec<FieldElement> = alphas.to_vec();
    for j in 1..=t {
        let sum = powers
            .iter()
            .zip(betas)
            .fold(spec.zero(), |acc, (a, b)| &acc + &(a * b));
        if !sum.is_zero() {
            return Ok((j, sum));
        }
        for (p, a) in powers.iter_mut().zip(alphas) {
            *p = &*p * a;
        }
    }
    unreachable!("a Vandermonde matrix with distinct non-zero nodes is invertible")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermProduct {
    pub perm: Vec<usize>,
    pub sign: Sign,
    pub value: FieldElement,
}

/// The `r!` products `c_sigma` in lexicographic permutation order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationProducts {
    pub r: usize,
    pub spec: FieldSpec,
    pub entries: Vec<PermProduct>,
}

fn products_from_values(values: &[Vec<FieldElement>]) -> PermutationProducts {
    let r = values.len();
    let spec = values[0][0].spec();
    let entries = Permutations::new(r)
        .map(|(perm, sign)| {
            let value = perm
                .iter()
                .enumerate()
                .fold(spec.one(), |acc, (j, &i)| &acc * &values[i][j]);
            PermProduct { perm, sign, value }
        })
        .collect();
    PermutationProducts { r, spec, entries }
}

/// Computes every `c_sigma` and re-checks that they are non-zero and distinct.
pub fn permutation_products(
    polys: &[Polynomial],
    witness: &WitnessSet,
) -> Result<PermutationProducts> {
    let r = polys.len();
    if witness.points.len() != r {
        return Err(Error::PreconditionViolated(format!(
            "need r = {r} witness points, got {}",
            witness.points.len()
        )));
    }
    let values = witness_values(polys, witness).map_err(Error::WitnessInvalid)?;
    for (i, row) in values.iter().enumerate() {
        if let Some(j) = row.iter().position(FieldElement::is_zero) {
            return Err(Error::WitnessInvalid(WitnessViolation::Vanishing {
                poly: i,
                point: j,
            }));
        }
    }
    let products = products_from_values(&values);
    let mut seen: std::collections::HashMap<&FieldElement, &Vec<usize>> =
        std::collections::HashMap::new();
    for e in &products.entries {
        if let Some(first) = seen.insert(&e.value, &e.perm) {
            return Err(Error::WitnessInvalid(WitnessViolation::Collision {
                first: first.clone(),
                second: e.perm.clone(),
            }));
        }
    }
    Ok(products)
}

pub fn signed_power_sum(products: &PermutationProducts, e: u64) -> FieldElement {
    let spec = &products.spec;
    products.entries.iter().fold(spec.zero(), |acc, p| {
        let term = p.value.pow(e);
        match p.sign {
            Sign::Plus => &acc + &term,
            Sign::Minus => &acc - &term,
        }
    })
}

/// Smallest `e >= 1` with a non-zero signed power sum. Running powers
/// `c_sigma^e` are updated with one multiplication per permutation per step.
pub fn find_certified_exponent(products: &PermutationProducts) -> u64 {
    let bound = factorial(products.r);
    let spec = &products.spec;
    let signs: Vec<FieldElement> = products
        .entries
        .iter()
        .map(|p| p.sign.to_field(spec))
        .collect();
    let mut powers: Vec<FieldElement> = products.entries.iter().map(|p| p.value.clone()).collect();
    for e in 1..=bound {
        let sum = powers
            .iter()
            .zip(&signs)
            .fold(spec.zero(), |acc, (c, s)| &acc + &(c * s));
        if !sum.is_zero() {
            return e;
        }
        for (p, entry) in powers.iter_mut().zip(&products.entries) {
            *p = &*p * &entry.value;
        }
    }
    panic!("no exponent <= r! = {bound}: permutation products are not distinct and non-zero")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub e: u64,
    pub witness: WitnessSet,
    /// `matrix[i][j] = f_i(x_j)^e`.
    pub matrix: Vec<Vec<FieldElement>>,
    pub determinant: FieldElement,
    pub signed_power_sum: FieldElement,
    pub family_digest: String,
    /// `c_sigma` in lexicographic permutation order.
    pub c_values: Vec<FieldElement>,
}

fn powered_matrix(values: &[Vec<FieldElement>], e: u64) -> Vec<Vec<FieldElement>> {
    values
        .iter()
        .map(|row| row.iter().map(|v| v.pow(e)).collect())
        .collect()
}

pub fn build_certificate(
    polys: &[Polynomial],
    witness: &WitnessSet,
    e: u64,
) -> Result<Certificate> {
    if e == 0 {
        return Err(Error::PreconditionViolated("exponent must be >= 1".into()));
    }
    let products = permutation_products(polys, witness)?;
    let values = witness_values(polys, witness).map_err(Error::WitnessInvalid)?;
    let matrix = powered_matrix(&values, e);
    let determinant = linalg::determinant(&witness.eval_spec, &matrix);
    let sps = signed_power_sum(&products, e);
    assert_eq!(
        determinant, sps,
        "determinant must equal the signed power sum"
    );
    if determinant.is_zero() {
        return Err(Error::SingularMatrix);
    }
    Ok(Certificate {
        e,
        witness: witness.clone(),
        matrix,
        determinant,
        signed_power_sum: sps,
        family_digest: family_digest(polys),
        c_values: products.entries.into_iter().map(|p| p.value).collect(),
    })
}

/// Recomputes the matrix and determinant from `(polys, points, e)` alone.
pub fn verify_certificate(polys: &[Polynomial], cert: &Certificate) -> Result<()> {
    validate_family(polys).map_err(Error::FamilyInvalid)?;
    let r = polys.len();
    if cert.family_digest != family_digest(polys) {
        return Err(Error::FamilyMismatch);
    }
    let bound = factorial(r);
    if cert.e == 0 || cert.e > bound {
        return Err(Error::BoundViolated { e: cert.e, bound });
    }
    if cert.witness.points.len() != r
        || cert.matrix.len() != r
        || cert.matrix.iter().any(|row| row.len() != r)
    {
        return Err(Error::DimensionMismatch {
            expected: r,
            got: cert.witness.points.len(),
        });
    }
    let values = witness_values(polys, &cert.witness).map_err(Error::WitnessInvalid)?;
    let matrix = powered_matrix(&values, cert.e);
    for (i, (mine, theirs)) in matrix.iter().zip(&cert.matrix).enumerate() {
        if let Some(j) = mine.iter().zip(theirs).position(|(a, b)| a != b) {
            return Err(Error::MatrixMismatch { row: i, col: j });
        }
    }
    let det = linalg::determinant(&cert.witness.eval_spec, &matrix);
    if det != cert.determinant {
        return Err(Error::DeterminantMismatch);
    }
    if det.is_zero() {
        return Err(Error::SingularMatrix);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CertifyConfig {
    pub witness: WitnessConfig,
    pub max_r: usize,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            witness: WitnessConfig::default(),
            max_r: DEFAULT_MAX_R,
        }
    }
}

/// Witness search, permutation products, smallest certified exponent and
/// the determinant certificate, in that order.
pub fn certify(polys: &[Polynomial], seed: u64, config: &CertifyConfig) -> Result<Certificate> {
    validate_family(polys).map_err(Error::FamilyInvalid)?;
    let r = polys.len();
    if r > config.max_r {
        return Err(Error::TooManyPolynomials {
            r,
            cap: config.max_r,
        });
    }
    if config.max_r > DEFAULT_MAX_R && r > DEFAULT_MAX_R {
        log::warn!("certifying r = {r} polynomials: the exponent scan covers up to r! terms");
    }
    let witness = find_witness(polys, r, seed, &config.witness)?;
    let products = permutation_products(polys, &witness)?;
    let e = find_certified_exponent(&products);
    let cert = build_certificate(polys, &witness, e)?;
    debug_assert!(cert.e <= factorial(r));
    Ok(cert)
}

/// JSON form of a certificate. Scalars are canonical strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub schema_version: u32,
    pub field: String,
    pub eval_field: String,
    pub nvars: usize,
    pub polys: Vec<String>,
    pub family_digest: String,
    pub points: Vec<Vec<String>>,
    pub e: u64,
    pub matrix: Vec<Vec<String>>,
    pub det: String,
    pub r_factorial_bound: u64,
    pub seed: u64,
    pub attempts: u64,
    pub escalations: u32,
    /// Image of the generator `t` of an extension coefficient field in
    /// `eval_field`, when the search had to embed it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_values: Option<Vec<String>>,
}

fn strings(row: &[FieldElement]) -> Vec<String> {
    row.iter().map(ToString::to_string).collect()
}

impl Certificate {
    /// `c_values` are included when `emit_c_values` is set, or by default
    /// for families with fewer than 6 members.
    pub fn to_doc(&self, polys: &[Polynomial], emit_c_values: bool) -> CertificateDoc {
        let r = polys.len();
        CertificateDoc {
            schema_version: SCHEMA_VERSION,
            field: polys[0].spec().to_string(),
            eval_field: self.witness.eval_spec.to_string(),
            nvars: polys[0].nvars(),
            polys: polys.iter().map(ToString::to_string).collect(),
            family_digest: self.family_digest.clone(),
            points: self.witness.points.iter().map(|p| strings(p)).collect(),
            e: self.e,
            matrix: self.matrix.iter().map(|row| strings(row)).collect(),
            det: self.determinant.to_string(),
            r_factorial_bound: factorial(r),
            seed: self.witness.seed,
            attempts: self.witness.attempts,
            escalations: self.witness.escalations,
            embedding: self
                .witness
                .embedding
                .as_ref()
                .map(|e| e.image().to_string()),
            c_values: (emit_c_values || r < 6).then(|| strings(&self.c_values)),
        }
    }

    /// Rebuilds a certificate from its JSON form; nothing is recomputed.
    pub fn from_doc(doc: &CertificateDoc) -> Result<Certificate> {
        // escalated evaluation fields may exceed the user-facing degree cap
        let eval_spec = FieldSpec::parse_with_cap(&doc.eval_field, usize::MAX)?;
        let parse_row = |row: &Vec<String>| -> Result<Vec<FieldElement>> {
            row.iter().map(|s| parse_scalar(&eval_spec, s)).collect()
        };
        let points = doc
            .points
            .iter()
            .map(parse_row)
            .collect::<Result<Vec<_>>>()?;
        let matrix = doc
            .matrix
            .iter()
            .map(parse_row)
            .collect::<Result<Vec<_>>>()?;
        let determinant = parse_scalar(&eval_spec, &doc.det)?;
        let c_values = match &doc.c_values {
            Some(cs) => parse_row(cs)?,
            None => Vec::new(),
        };
        let embedding = match &doc.embedding {
            Some(image) => Some(Embedding::new(
                &doc.field.parse()?,
                &eval_spec,
                parse_scalar(&eval_spec, image)?,
            )?),
            None => None,
        };
        Ok(Certificate {
            e: doc.e,
            witness: WitnessSet {
                embedding,
                product_count: (points.len() as u128).pow(points.len() as u32),
                points,
                eval_spec,
                seed: doc.seed,
                attempts: doc.attempts,
                escalations: doc.escalations,
            },
            matrix,
            signed_power_sum: determinant.clone(),
            determinant,
            family_digest: doc.family_digest.clone(),
            c_values,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomials;

    fn q() -> FieldSpec {
        FieldSpec::Rationals
    }

    fn qs(vals: &[i64]) -> Vec<FieldElement> {
        vals.iter().map(|&v| q().from_i64(v)).collect()
    }

    fn fam(src: &str, spec: &FieldSpec) -> Vec<Polynomial> {
        parse_polynomials(src, spec, None).unwrap()
    }

    fn manual_witness(points: &[i64]) -> WitnessSet {
        WitnessSet {
            points: points.iter().map(|&v| vec![q().from_i64(v)]).collect(),
            eval_spec: q(),
            embedding: None,
            product_count: 0,
            seed: 0,
            attempts: 0,
            escalations: 0,
        }
    }

    #[test]
    fn lemma2_examples() {
        assert_eq!(
            lemma2_witness(&qs(&[1, 2]), &qs(&[1, -1])).unwrap(),
            (1, q().from_i64(-1))
        );
        assert_eq!(
            lemma2_witness(&qs(&[1, -1]), &qs(&[1, 1])).unwrap(),
            (2, q().from_i64(2))
        );
        assert_eq!(lemma2_witness(&qs(&[5]), &qs(&[3])).unwrap().0, 1);
        assert!(matches!(
            lemma2_witness(&qs(&[1, 1]), &qs(&[1, 2])),
            Err(Error::PreconditionViolated(_))
        ));
        assert!(matches!(
            lemma2_witness(&qs(&[0, 1]), &qs(&[1, 2])),
            Err(Error::PreconditionViolated(_))
        ));
        assert!(matches!(
            lemma2_witness(&qs(&[1, 2]), &qs(&[0, 0])),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn permutation_products_example() {
        let f = fam("x0\nx0+1", &q());
        let p = permutation_products(&f, &manual_witness(&[1, 2])).unwrap();
        assert_eq!(p.entries.len(), 2);
        assert_eq!(p.entries[0].perm, vec![0, 1]);
        assert_eq!(p.entries[0].value, q().from_i64(3));
        assert_eq!(p.entries[0].sign, Sign::Plus);
        assert_eq!(p.entries[1].value, q().from_i64(4));
        assert_eq!(p.entries[1].sign, Sign::Minus);
        assert_eq!(find_certified_exponent(&p), 1);

        let single = permutation_products(&fam("x0", &q()), &manual_witness(&[3])).unwrap();
        assert_eq!(single.entries.len(), 1);
        assert_eq!(single.entries[0].value, q().from_i64(3));
        assert_eq!(find_certified_exponent(&single), 1);
    }

    #[test]
    fn exponent_scan_on_explicit_products() {
        // c = (1, -1) with signs (+, -): e = 1 gives 2
        let mk = |signs: [Sign; 2]| PermutationProducts {
            r: 2,
            spec: q(),
            entries: vec![
                PermProduct {
                    perm: vec![0, 1],
                    sign: signs[0],
                    value: q().from_i64(1),
                },
                PermProduct {
                    perm: vec![1, 0],
                    sign: signs[1],
                    value: q().from_i64(-1),
                },
            ],
        };
        assert_eq!(find_certified_exponent(&mk([Sign::Plus, Sign::Minus])), 1);
        // with signs (+, +) e = 1 cancels and e = 2 gives 2
        assert_eq!(find_certified_exponent(&mk([Sign::Plus, Sign::Plus])), 2);
    }

    #[test]
    fn collisions_are_rejected() {
        let f = fam("x0\nx0+1", &q());
        assert!(matches!(
            permutation_products(&f, &manual_witness(&[0, 2])),
            Err(Error::WitnessInvalid(WitnessViolation::Vanishing {
                poly: 0,
                point: 0
            }))
        ));
        // c_id = f0(1) f1(-3) = -2, c_swap = f1(1) f0(-3) = -6; use points
        // giving equal products: c_id = a(b+1), c_swap = (a+1)b, equal iff a = b
        assert!(matches!(
            permutation_products(&f, &manual_witness(&[2, 2])),
            Err(Error::WitnessInvalid(WitnessViolation::Collision { .. }))
        ));
    }

    #[test]
    fn certificate_example() {
        let f = fam("x0\nx0+1", &q());
        let c = build_certificate(&f, &manual_witness(&[1, 2]), 1).unwrap();
        assert_eq!(c.matrix, vec![qs(&[1, 2]), qs(&[2, 3])]);
        assert_eq!(c.determinant, q().from_i64(-1));
        assert_eq!(verify_certificate(&f, &c), Ok(()));

        let g = fam("x0", &q());
        let c = build_certificate(&g, &manual_witness(&[1]), 1).unwrap();
        assert_eq!(c.matrix, vec![qs(&[1])]);
        assert_eq!(c.determinant, q().one());
    }

    #[test]
    fn tampering_is_detected() {
        let f = fam("x0\nx0+1", &q());
        let c = build_certificate(&f, &manual_witness(&[1, 2]), 1).unwrap();
        let mut bumped = c.clone();
        bumped.e += 1;
        assert_eq!(
            verify_certificate(&f, &bumped),
            Err(Error::MatrixMismatch { row: 0, col: 1 })
        );
        let mut big = c.clone();
        big.e = 3;
        assert_eq!(
            verify_certificate(&f, &big),
            Err(Error::BoundViolated { e: 3, bound: 2 })
        );
        let mut det = c.clone();
        det.determinant = q().from_i64(5);
        assert_eq!(
            verify_certificate(&f, &det),
            Err(Error::DeterminantMismatch)
        );
        let other = fam("x0\nx0+2", &q());
        assert_eq!(verify_certificate(&other, &c), Err(Error::FamilyMismatch));
    }

    #[test]
    fn singular_exponent_is_refused() {
        // {x0, x0+1, x0-1}: dependent at e = 1, so det must vanish there
        let f = fam("x0\nx0+1\nx0-1", &q());
        let w = find_witness(&f, 3, 4, &WitnessConfig::default()).unwrap();
        assert_eq!(build_certificate(&f, &w, 1), Err(Error::SingularMatrix));
    }

    #[test]
    fn certify_examples() {
        let cfg = CertifyConfig::default();
        let c = certify(&fam("x0\nx0+1", &q()), 17, &cfg).unwrap();
        assert_eq!(c.e, 1);

        let f = fam("x0\nx0+1\nx0-1", &q());
        let c = certify(&f, 17, &cfg).unwrap();
        assert!(c.e >= 2 && c.e <= 6, "e = {}", c.e);
        assert_eq!(verify_certificate(&f, &c), Ok(()));

        let c = certify(&fam("x0", &q()), 1, &cfg).unwrap();
        assert_eq!(c.e, 1);

        assert!(matches!(
            certify(&fam("x0\n2*x0", &q()), 1, &cfg),
            Err(Error::FamilyInvalid(_))
        ));
        let capped = CertifyConfig { max_r: 1, ..cfg };
        assert!(matches!(
            certify(&fam("x0\nx0+1", &q()), 1, &capped),
            Err(Error::TooManyPolynomials { r: 2, cap: 1 })
        ));
    }

    #[test]
    fn characteristic_two_signs_collapse() {
        let f2 = FieldSpec::Prime(2);
        let f = fam("x0\nx0+1\nx0^2+x0+1", &f2);
        let c = certify(&f, 8, &CertifyConfig::default()).unwrap();
        assert_eq!(c.witness.eval_spec.characteristic(), 2);
        assert!(c.e <= 6);
        assert_eq!(verify_certificate(&f, &c), Ok(()));
        // in characteristic 2 every sign is +1, so det is the plain power sum
        let plain = c
            .c_values
            .iter()
            .fold(c.witness.eval_spec.zero(), |acc, v| &acc + &v.pow(c.e));
        assert_eq!(plain, c.determinant);
    }

    #[test]
    fn embedded_certificate_round_trip() {
        let f9 = FieldSpec::extension(3, &[1, 0, 1]).unwrap();
        let f = fam("x0\nt*x0 + 1\nx0^2\nx0 + t", &f9);
        let c = certify(&f, 2, &CertifyConfig::default()).unwrap();
        assert!(c.witness.embedding.is_some());
        let doc = c.to_doc(&f, false);
        assert!(doc.embedding.is_some());
        let back = Certificate::from_doc(&doc).unwrap();
        assert_eq!(verify_certificate(&f, &back), Ok(()));

        // an image that is not a root of t^2 + 1 is refused outright
        let mut forged = doc.clone();
        forged.embedding = Some("1".into());
        assert!(matches!(
            Certificate::from_doc(&forged),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn doc_round_trip() {
        let f = fam("x0*x1 + 1\nx0 - 2*x1\nx1^2", &q());
        let c = certify(&f, 3, &CertifyConfig::default()).unwrap();
        let doc = c.to_doc(&f, false);
        assert!(doc.c_values.is_some());
        let back = Certificate::from_doc(&doc).unwrap();
        assert_eq!(back.matrix, c.matrix);
        assert_eq!(back.witness.points, c.witness.points);
        assert_eq!(verify_certificate(&f, &back), Ok(()));
        let json = serde_json::to_string(&doc).unwrap();
        let parsed: CertificateDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed, doc);
    }
}
