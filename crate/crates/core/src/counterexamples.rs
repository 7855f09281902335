//! Executable versions of the two situations where powers stay dependent:
//! Fermat quotient rings `k[x_1..x_d]/(x_1^s + ... + x_d^s)`, where
//! `x_1^s + ... + x_d^s = 0` is a dependency at `e = s` (so no bound on `e`
//! can hold uniformly over all domains), and finite extension fields
//! `F_{p^k}`, where any `r > k` elements are F_p-dependent for every `e`.

use serde::Serialize;

use crate::cert::SCHEMA_VERSION;
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::linalg;
use crate::poly::{coefficient_matrix, Monomial, Polynomial};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FermatRing {
    d: usize,
    s: u32,
    spec: FieldSpec,
}

impl FermatRing {
    /// Requires `d >= 3` (for `d = 2` the relation factors) and a
    /// characteristic not dividing `s`.
    pub fn new(d: usize, s: u32, spec: FieldSpec) -> Result<Self> {
        if d < 3 {
            return Err(Error::PreconditionViolated(format!(
                "d = {d} must be at least 3"
            )));
        }
        if s < 2 {
            return Err(Error::PreconditionViolated(format!(
                "s = {s} must be at least 2"
            )));
        }
        let p = spec.characteristic();
        if p != 0 && (s as u64).is_multiple_of(p) {
            return Err(Error::PreconditionViolated(format!(
                "characteristic {p} divides s = {s}"
            )));
        }
        Ok(FermatRing { d, s, spec })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    /// `x_1^s + ... + x_d^s`.
    pub fn relation(&self) -> Polynomial {
        Polynomial::from_terms(
            &self.spec,
            self.d,
            (0..self.d).map(|i| {
                let mut e = vec![0; self.d];
                e[i] = self.s;
                (Monomial::new(e), self.spec.one())
            }),
        )
    }

    /// `-(x_2^s + ... + x_d^s)`, the image of `x_1^s`.
    fn tail(&self) -> Polynomial {
        Polynomial::from_terms(
            &self.spec,
            self.d,
            (1..self.d).map(|i| {
                let mut e = vec![0; self.d];
                e[i] = self.s;
                (Monomial::new(e), -self.spec.one())
            }),
        )
    }
}

/// Reduces `f` by the rewrite `x_1^s -> -(x_2^s + ... + x_d^s)` until every
/// `x_1` exponent is below `s`. A monomial `x_1^(qs + rem) * m` maps to
/// `x_1^rem * m * tail^q` in one step since `tail` is free of `x_1`.
pub fn fermat_normal_form(f: &Polynomial, ring: &FermatRing) -> Result<Polynomial> {
    if f.nvars() != ring.d {
        return Err(Error::DimensionMismatch {
            expected: ring.d,
            got: f.nvars(),
        });
    }
    if f.spec() != &ring.spec {
        return Err(Error::SpecMismatch);
    }
    let tail = ring.tail();
    let mut tail_powers: Vec<Polynomial> =
        vec![Polynomial::constant(&ring.spec, ring.d, ring.spec.one())];
    let mut out = Polynomial::zero(&ring.spec, ring.d);
    for (m, c) in f.terms() {
        let a = m.exponents()[0];
        let (q, rem) = ((a / ring.s) as usize, a % ring.s);
        while tail_powers.len() <= q {
            let next = tail_powers.last().expect("non-empty").mul(&tail)?;
            tail_powers.push(next);
        }
        let mut e = m.exponents().to_vec();
        e[0] = rem;
        let lead = Polynomial::from_terms(&ring.spec, ring.d, [(Monomial::new(e), c.clone())]);
        out = out.add(&lead.mul(&tail_powers[q])?)?;
    }
    Ok(out)
}

fn fermat_power_rank(ring: &FermatRing, e: u64, budget: usize) -> Result<usize> {
    let q = e / ring.s as u64;
    let needed = ring.tail().power_size_bound(q.max(1));
    if needed > budget as u128 {
        return Err(Error::TermBudgetExceeded { needed, budget });
    }
    let forms: Vec<Polynomial> = (0..ring.d)
        .map(|i| {
            let mut ex = vec![0; ring.d];
            ex[i] = u32::try_from(e)
                .map_err(|_| Error::PreconditionViolated(format!("exponent {e} too large")))?;
            let xe =
                Polynomial::from_terms(&ring.spec, ring.d, [(Monomial::new(ex), ring.spec.one())]);
            fermat_normal_form(&xe, ring)
        })
        .collect::<Result<_>>()?;
    Ok(coefficient_matrix(&forms)?.rank())
}

/// Whether the classes of `x_1^e, ..., x_d^e` are independent in the ring.
pub fn fermat_independence(ring: &FermatRing, e: u64, budget: usize) -> Result<bool> {
    if e == 0 {
        return Err(Error::PreconditionViolated("exponent must be >= 1".into()));
    }
    Ok(fermat_power_rank(ring, e, budget)? == ring.d)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DemoRow {
    pub e: u64,
    pub independent: bool,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FermatReport {
    pub schema_version: u32,
    pub d: usize,
    pub s: u32,
    pub field: String,
    pub e_max: u64,
    pub rows: Vec<DemoRow>,
    /// Independent for every `e < s`, dependent at `e = s` (when in range).
    pub checks_pass: bool,
}

pub fn fermat_demo(ring: &FermatRing, e_max: u64, budget: usize) -> Result<FermatReport> {
    let rows = (1..=e_max)
        .map(|e| {
            let rank = fermat_power_rank(ring, e, budget)?;
            Ok(DemoRow {
                e,
                independent: rank == ring.d,
                rank,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let s = ring.s as u64;
    let checks_pass = rows.iter().all(|r| {
        if r.e < s {
            r.independent
        } else {
            r.e != s || !r.independent
        }
    });
    Ok(FermatReport {
        schema_version: SCHEMA_VERSION,
        d: ring.d,
        s: ring.s,
        field: ring.spec.to_string(),
        e_max,
        rows,
        checks_pass,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtRow {
    pub e: u64,
    pub rank: usize,
    pub dependent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtFieldReport {
    pub schema_version: u32,
    pub field: String,
    pub p: u64,
    pub k: usize,
    pub elements: Vec<String>,
    pub e_max: u64,
    pub rows: Vec<ExtRow>,
    pub all_dependent: bool,
}

/// `k x n` matrix over F_p whose columns are coordinates of `elems`.
fn coordinate_matrix(p: u64, k: usize, elems: &[FieldElement]) -> Vec<Vec<FieldElement>> {
    let base = FieldSpec::Prime(p);
    let cols: Vec<Vec<u64>> = elems
        .iter()
        .map(|x| x.coordinates().expect("finite field element"))
        .collect();
    (0..k)
        .map(|i| cols.iter().map(|c| base.from_i64(c[i] as i64)).collect())
        .collect()
}

/// For each `e`, the F_p-rank of the coordinates of `elements[i]^e` in the
/// basis `1, t, ..., t^(k-1)`. With `r > k` elements the rank is at most
/// `k < r`, so every exponent gives a dependency.
pub fn extension_field_demo(
    field: &FieldSpec,
    elements: &[FieldElement],
    e_max: u64,
) -> Result<ExtFieldReport> {
    let FieldSpec::Ext(ext) = field else {
        return Err(Error::PreconditionViolated(
            "an extension field F_p[t]/(m) is required".into(),
        ));
    };
    let (p, k) = (ext.p(), ext.degree());
    let r = elements.len();
    if r <= k {
        return Err(Error::PreconditionViolated(format!(
            "need more elements than the degree: r = {r}, k = {k}"
        )));
    }
    if elements.iter().any(|x| &x.spec() != field) {
        return Err(Error::SpecMismatch);
    }
    if let Some(i) = elements.iter().position(FieldElement::is_zero) {
        return Err(Error::PreconditionViolated(format!("element {i} is zero")));
    }
    let base = FieldSpec::Prime(p);
    for i in 0..r {
        for j in i + 1..r {
            let pair = coordinate_matrix(p, k, &[elements[i].clone(), elements[j].clone()]);
            if linalg::rank(&base, &pair) < 2 {
                return Err(Error::PreconditionViolated(format!(
                    "elements {i} and {j} are F_{p}-proportional"
                )));
            }
        }
    }
    let rows: Vec<ExtRow> = (1..=e_max)
        .map(|e| {
            let powered: Vec<FieldElement> = elements.iter().map(|x| x.pow(e)).collect();
            let rank = linalg::rank(&base, &coordinate_matrix(p, k, &powered));
            ExtRow {
                e,
                rank,
                dependent: rank < r,
            }
        })
        .collect();
    Ok(ExtFieldReport {
        schema_version: SCHEMA_VERSION,
        field: field.to_string(),
        p,
        k,
        elements: elements.iter().map(ToString::to_string).collect(),
        e_max,
        all_dependent: rows.iter().all(|row| row.dependent),
        rows,
    })
}
