//! Witness points: `x_1, ..., x_s` where every `f_i` is non-zero and the
//! `r^s` products `f_{i_1}(x_1) ... f_{i_s}(x_s)` are pairwise distinct.
//!
//! Points are found by rejection sampling one coordinate vector at a time,
//! keeping the accepted prefix. Distinctness of the full product set is
//! checked by enumerating the `r^t` tuple products (lexicographic tuple
//! order) and hashing their canonical forms.

use std::collections::{HashMap, HashSet};
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{sample, Embedding, FieldElement, FieldSpec};
use crate::poly::{validate_family, FamilyViolation, Polynomial};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WitnessConfig {
    /// Sampling bound over the rationals; `None` means `4 * r`.
    pub initial_bound: Option<u64>,
    pub max_attempts_per_point: u32,
    pub max_escalations: u32,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        WitnessConfig {
            initial_bound: None,
            max_attempts_per_point: 64,
            max_escalations: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessSet {
    pub points: Vec<Vec<FieldElement>>,
    /// Field of the coordinates; an extension of the coefficient field when
    /// the base field was too small.
    pub eval_spec: FieldSpec,
    /// Embedding of an extension coefficient field into `eval_spec`.
    pub embedding: Option<Embedding>,
    pub product_count: u128,
    pub seed: u64,
    pub attempts: u64,
    pub escalations: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessViolation {
    Family {
        violation: FamilyViolation,
    },
    NoPoints,
    Dimension {
        point: usize,
        expected: usize,
        got: usize,
    },
    Field {
        point: usize,
    },
    /// `f_poly(x_point) = 0`.
    Vanishing {
        poly: usize,
        point: usize,
    },
    /// Two index tuples (0-based) give the same product.
    Collision {
        first: Vec<usize>,
        second: Vec<usize>,
    },
}

impl fmt::Display for WitnessViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessViolation::Family { violation } => write!(f, "{violation}"),
            WitnessViolation::NoPoints => write!(f, "no points"),
            WitnessViolation::Dimension {
                point,
                expected,
                got,
            } => {
                write!(
                    f,
                    "point {point} has {got} coordinates, expected {expected}"
                )
            }
            WitnessViolation::Field { point } => {
                write!(f, "point {point} does not lie in a compatible field")
            }
            WitnessViolation::Vanishing { poly, point } => {
                write!(f, "polynomial {poly} vanishes at point {point}")
            }
            WitnessViolation::Collision { first, second } => {
                write!(f, "tuples {first:?} and {second:?} give equal products")
            }
        }
    }
}

/// `values[i][j] = f_i(x_j)`.
pub(crate) fn value_table(
    polys: &[Polynomial],
    points: &[Vec<FieldElement>],
) -> std::result::Result<Vec<Vec<FieldElement>>, WitnessViolation> {
    let nvars = polys[0].nvars();
    let target = points[0].first().map(|x| x.spec());
    for (j, x) in points.iter().enumerate() {
        if x.len() != nvars {
            return Err(WitnessViolation::Dimension {
                point: j,
                expected: nvars,
                got: x.len(),
            });
        }
        if x.first().map(|c| c.spec()) != target {
            return Err(WitnessViolation::Field { point: j });
        }
    }
    polys
        .iter()
        .map(|f| {
            points
                .iter()
                .enumerate()
                .map(|(j, x)| {
                    f.evaluate(x)
                        .map_err(|_| WitnessViolation::Field { point: j })
                })
                .collect()
        })
        .collect()
}

/// Products for tuples of length `t + 1` from those of length `t`, in
/// lexicographic tuple order: index `a * r + i` extends tuple `a` by `i`.
fn extend_products(prefix: &[FieldElement], column: &[FieldElement]) -> Vec<FieldElement> {
    let mut out = Vec::with_capacity(prefix.len() * column.len());
    for p in prefix {
        for v in column {
            out.push(p * v);
        }
    }
    out
}

fn decode_tuple(mut index: usize, r: usize, len: usize) -> Vec<usize> {
    let mut t = vec![0; len];
    for slot in t.iter_mut().rev() {
        *slot = index % r;
        index /= r;
    }
    t
}

/// Checks both witness conditions for `points` against `polys`.
pub fn validate_witness(
    polys: &[Polynomial],
    points: &[Vec<FieldElement>],
) -> std::result::Result<(), WitnessViolation> {
    validate_family(polys).map_err(|violation| WitnessViolation::Family { violation })?;
    if points.is_empty() {
        return Err(WitnessViolation::NoPoints);
    }
    let values = value_table(polys, points)?;
    let r = polys.len();
    for (i, row) in values.iter().enumerate() {
        if let Some(j) = row.iter().position(FieldElement::is_zero) {
            return Err(WitnessViolation::Vanishing { poly: i, point: j });
        }
    }
    let one = values[0][0].spec().one();
    let mut products = vec![one];
    for j in 0..points.len() {
        let column: Vec<FieldElement> = values.iter().map(|row| row[j].clone()).collect();
        products = extend_products(&products, &column);
    }
    let mut seen: HashMap<&FieldElement, usize> = HashMap::with_capacity(products.len());
    for (idx, v) in products.iter().enumerate() {
        if let Some(&prev) = seen.get(v) {
            return Err(WitnessViolation::Collision {
                first: decode_tuple(prev, r, points.len()),
                second: decode_tuple(idx, r, points.len()),
            });
        }
        seen.insert(v, idx);
    }
    Ok(())
}

fn all_distinct(values: &[FieldElement]) -> bool {
    let mut seen: HashSet<&FieldElement> = HashSet::with_capacity(values.len());
    values.iter().all(|v| seen.insert(v))
}

/// Family to evaluate at the witness points: the polynomials themselves, or
/// their images when the coefficient field was embedded into a larger one.
pub fn evaluation_family(
    polys: &[Polynomial],
    embedding: Option<&Embedding>,
) -> Result<Vec<Polynomial>> {
    match embedding {
        Some(emb) => polys.iter().map(|f| f.lift(emb)).collect(),
        None => Ok(polys.to_vec()),
    }
}

/// `values[i][j] = f_i(x_j)` for a witness set, honouring its embedding.
pub(crate) fn witness_values(
    polys: &[Polynomial],
    witness: &WitnessSet,
) -> std::result::Result<Vec<Vec<FieldElement>>, WitnessViolation> {
    let lifted = evaluation_family(polys, witness.embedding.as_ref())
        .map_err(|_| WitnessViolation::Field { point: 0 })?;
    value_table(&lifted, &witness.points)
}

/// Checks a witness set, lifting the family through its embedding first.
pub fn validate_witness_set(
    polys: &[Polynomial],
    witness: &WitnessSet,
) -> std::result::Result<(), WitnessViolation> {
    validate_family(polys).map_err(|violation| WitnessViolation::Family { violation })?;
    let lifted = evaluation_family(polys, witness.embedding.as_ref())
        .map_err(|_| WitnessViolation::Field { point: 0 })?;
    validate_witness(&lifted, &witness.points)
}

/// Smallest `n` with `p^n >= 4 N^2`, the size at which `N` uniformly random
/// products are expected to be pairwise distinct.
fn birthday_degree(p: u64, products: u128) -> usize {
    let target = products.saturating_mul(products).saturating_mul(4);
    let mut size: u128 = 1;
    let mut n = 0;
    while size < target {
        size = size.saturating_mul(p as u128);
        n += 1;
    }
    n.max(1)
}

/// Draws points one at a time until `s` are accepted, escalating the
/// sampling domain when a single point keeps being rejected. Over the
/// rationals the bound doubles and the accepted prefix is kept. Over a finite
/// field F_{p^k} the search restarts in F_{p^n}: the first escalation jumps to
/// the smallest multiple `n` of `k` with room for `r^s` distinct products,
/// later ones add `k`. An extension base field is embedded into F_{p^n}
/// through a root of its modulus.
pub fn find_witness(
    polys: &[Polynomial],
    s: usize,
    seed: u64,
    config: &WitnessConfig,
) -> Result<WitnessSet> {
    validate_family(polys).map_err(Error::FamilyInvalid)?;
    let r = polys.len();
    if s == 0 || s > r {
        return Err(Error::PreconditionViolated(format!(
            "witness size s = {s} must satisfy 1 <= s <= r = {r}"
        )));
    }
    let base = polys[0].spec().clone();
    let nvars = polys[0].nvars();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bound = config.initial_bound.unwrap_or(4 * r as u64).max(1);
    let mut eval_spec = base.clone();
    let mut embedding: Option<Embedding> = None;
    let mut family: Vec<Polynomial> = polys.to_vec();
    let mut attempts = 0u64;
    let mut escalations = 0u32;

    let mut points: Vec<Vec<FieldElement>> = Vec::with_capacity(s);
    let mut products = vec![eval_spec.one()];
    while points.len() < s {
        let mut accepted = None;
        for _ in 0..config.max_attempts_per_point {
            attempts += 1;
            let candidate: Vec<FieldElement> = (0..nvars)
                .map(|_| sample(&eval_spec, bound, &mut rng))
                .collect();
            let column: Vec<FieldElement> = family
                .iter()
                .map(|f| f.evaluate(&candidate))
                .collect::<Result<_>>()?;
            if column.iter().any(FieldElement::is_zero) {
                continue;
            }
            let extended = extend_products(&products, &column);
            if all_distinct(&extended) {
                accepted = Some((candidate, extended));
                break;
            }
        }
        match accepted {
            Some((x, extended)) => {
                points.push(x);
                products = extended;
            }
            None => {
                if escalations >= config.max_escalations {
                    return Err(Error::SearchExhausted {
                        attempts,
                        escalations,
                    });
                }
                escalations += 1;
                if base.is_finite() {
                    let p = base.characteristic();
                    let k = base.degree();
                    let wanted = birthday_degree(p, (r as u128).pow(s as u32));
                    let n = (eval_spec.degree() + k).max(wanted.div_ceil(k) * k);
                    eval_spec = FieldSpec::first_extension(p, n)?;
                    if let FieldSpec::Ext(_) = base {
                        let emb = Embedding::find(&base, &eval_spec, &mut rng)?;
                        family = evaluation_family(polys, Some(&emb))?;
                        embedding = Some(emb);
                    }
                    // F_{p^k} need not sit inside F_{p^n}; start over
                    points.clear();
                    products = vec![eval_spec.one()];
                } else {
                    bound = bound.saturating_mul(2);
                }
                log::debug!(
                    "witness search escalated to {eval_spec} (bound {bound}) after {attempts} attempts"
                );
            }
        }
    }
    Ok(WitnessSet {
        points,
        eval_spec,
        embedding,
        product_count: products.len() as u128,
        seed,
        attempts,
        escalations,
    })
}
