//! Sparse multivariate polynomials over a [`FieldSpec`].
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`] in graded
//! lexicographic order, with zero coefficients never stored.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::{normalize, Embedding, FieldElement, FieldSpec, Raw};
use crate::linalg;

/// Exponent vector. Ordered by total degree, then lexicographically with
/// `x0 > x1 > ...`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    spec: FieldSpec,
    nvars: usize,
    terms: BTreeMap<Monomial, FieldElement>,
}

/// Number of monomials of total degree at most `deg` in `n` variables,
/// saturating.
fn monomials_up_to(deg: u64, n: usize) -> u128 {
    // C(deg + n, n)
    let mut acc: u128 = 1;
    for i in 1..=n as u128 {
        acc = match acc.checked_mul(deg as u128 + i) {
            Some(v) => v / i,
            None => return u128::MAX,
        };
    }
    acc
}

impl Polynomial {
    pub fn zero(spec: &FieldSpec, nvars: usize) -> Self {
        Polynomial {
            spec: spec.clone(),
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(spec: &FieldSpec, nvars: usize, c: FieldElement) -> Self {
        Self::from_terms(spec, nvars, [(Monomial::one(nvars), c)])
    }

    pub fn var(spec: &FieldSpec, nvars: usize, index: usize) -> Self {
        Self::from_terms(spec, nvars, [(Monomial::var(nvars, index), spec.one())])
    }

    /// Builds a polynomial, summing repeated monomials and dropping zeros.
    pub fn from_terms(
        spec: &FieldSpec,
        nvars: usize,
        terms: impl IntoIterator<Item = (Monomial, FieldElement)>,
    ) -> Self {
        let mut map: BTreeMap<Monomial, FieldElement> = BTreeMap::new();
        for (m, c) in terms {
            assert_eq!(m.0.len(), nvars, "monomial arity");
            add_term(&mut map, m, c);
        }
        map.retain(|_, c| !c.is_zero());
        Polynomial {
            spec: spec.clone(),
            nvars,
            terms: map,
        }
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, FieldElement> {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> FieldElement {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| self.spec.zero())
    }

    pub fn total_degree(&self) -> u64 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    fn check_compatible(&self, other: &Polynomial) -> Result<()> {
        if self.spec != other.spec || self.nvars != other.nvars {
            return Err(Error::SpecMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_compatible(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            add_term(&mut terms, m.clone(), c.clone());
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(Polynomial {
            spec: self.spec.clone(),
            nvars: self.nvars,
            terms,
        })
    }

    pub fn neg(&self) -> Polynomial {
        self.scale(&-self.spec.one())
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &FieldElement) -> Polynomial {
        Self::from_terms(
            &self.spec,
            self.nvars,
            self.terms.iter().map(|(m, x)| (m.clone(), x * c)),
        )
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_compatible(other)?;
        let mut terms: BTreeMap<Monomial, FieldElement> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                add_term(&mut terms, m1.mul(m2), c1 * c2);
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(Polynomial {
            spec: self.spec.clone(),
            nvars: self.nvars,
            terms,
        })
    }

    /// `self^e` by binary exponentiation, `e >= 1`.
    pub fn pow(&self, e: u64) -> Polynomial {
        assert!(e >= 1, "exponent must be positive");
        let mut acc: Option<Polynomial> = None;
        let mut base = self.clone();
        let mut e = e;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base).expect("same ring"),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul(&base).expect("same ring");
        }
        acc.expect("e >= 1")
    }

    /// Upper bound on the number of terms of `self^e`.
    pub fn power_size_bound(&self, e: u64) -> u128 {
        let by_degree = monomials_up_to(self.total_degree().saturating_mul(e), self.nvars);
        // monomials of degree e in num_terms symbols: C(e + n - 1, n - 1)
        let n = self.num_terms();
        let by_terms = if n == 0 { 1 } else { monomials_up_to(e, n - 1) };
        by_degree.min(by_terms)
    }

    /// `pow`, refusing up front when the result could exceed `budget` terms.
    pub fn pow_with_budget(&self, e: u64, budget: usize) -> Result<Polynomial> {
        let needed = self.power_size_bound(e);
        if needed > budget as u128 {
            return Err(Error::TermBudgetExceeded { needed, budget });
        }
        Ok(self.pow(e))
    }

    /// Exact value at `point`. Coordinates may lie in an extension of the
    /// coefficient field; coefficients are embedded.
    pub fn evaluate(&self, point: &[FieldElement]) -> Result<FieldElement> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: point.len(),
            });
        }
        let target = match point.first() {
            Some(x) => x.spec(),
            None => self.spec.clone(),
        };
        if point.iter().any(|x| x.spec() != target) || !self.spec.embeds_into(&target) {
            return Err(Error::SpecIncompatible);
        }
        let max_exp: Vec<u32> = (0..self.nvars)
            .map(|v| self.terms.keys().map(|m| m.0[v]).max().unwrap_or(0))
            .collect();
        let powers: Vec<Vec<FieldElement>> = point
            .iter()
            .zip(&max_exp)
            .map(|(x, &d)| {
                let mut ps = Vec::with_capacity(d as usize + 1);
                ps.push(target.one());
                for i in 0..d as usize {
                    let next = &ps[i] * x;
                    ps.push(next);
                }
                ps
            })
            .collect();
        let mut acc = target.zero();
        for (m, c) in &self.terms {
            let mut term = c.embed_into(&target)?;
            for (v, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    term = &term * &powers[v][e as usize];
                }
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }

    /// Image under a field embedding applied to every coefficient.
    pub fn lift(&self, embedding: &Embedding) -> Result<Polynomial> {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| Ok((m.clone(), embedding.apply(c)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Polynomial::from_terms(
            embedding.target(),
            self.nvars,
            terms,
        ))
    }

    /// True iff `other = lambda * self` for a non-zero constant, or both are zero.
    pub fn is_proportional(&self, other: &Polynomial) -> Result<bool> {
        self.check_compatible(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(self.is_zero() && other.is_zero());
        }
        if self.terms.len() != other.terms.len() || !self.terms.keys().eq(other.terms.keys()) {
            return Ok(false);
        }
        let (m0, c0) = self.terms.iter().next().expect("non-zero");
        let lambda = other.terms[m0].checked_div(c0)?;
        Ok(self
            .terms
            .iter()
            .all(|(m, c)| other.terms[m] == c * &lambda))
    }
}

fn add_term(map: &mut BTreeMap<Monomial, FieldElement>, m: Monomial, c: FieldElement) {
    match map.get_mut(&m) {
        Some(existing) => *existing = &*existing + &c,
        None => {
            map.insert(m, c);
        }
    }
}

fn fmt_monomial(m: &Monomial) -> String {
    m.0.iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| {
            if e == 1 {
                format!("x{i}")
            } else {
                format!("x{i}^{e}")
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

impl fmt::Display for Polynomial {
    /// Terms in descending graded-lex order, e.g. `x0^2*x1 - 3*x1 + 1/2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let (negative, mag) = match c {
                FieldElement::Rational(q)
                    if q < &num_rational::BigRational::from_integer(0.into()) =>
                {
                    (true, FieldElement::Rational(-q))
                }
                _ => (false, c.clone()),
            };
            match (idx, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mono = fmt_monomial(m);
            let coeff = mag.to_string();
            let coeff = if coeff.contains('+') {
                format!("({coeff})")
            } else {
                coeff
            };
            if mono.is_empty() {
                write!(f, "{coeff}")?;
            } else if mag.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{coeff}*{mono}")?;
            }
        }
        Ok(())
    }
}

/// Why a family fails the hypotheses: every member non-zero, no two proportional.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyViolation {
    Empty,
    Mismatch { index: usize },
    Zero { index: usize },
    Proportional { first: usize, second: usize },
}

impl fmt::Display for FamilyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyViolation::Empty => write!(f, "empty family"),
            FamilyViolation::Mismatch { index } => {
                write!(f, "polynomial {index} lives in a different ring")
            }
            FamilyViolation::Zero { index } => write!(f, "polynomial {index} is zero"),
            FamilyViolation::Proportional { first, second } => {
                write!(f, "polynomials {first} and {second} are proportional")
            }
        }
    }
}

pub fn validate_family(polys: &[Polynomial]) -> std::result::Result<(), FamilyViolation> {
    let first = polys.first().ok_or(FamilyViolation::Empty)?;
    for (i, f) in polys.iter().enumerate() {
        if f.spec != first.spec || f.nvars != first.nvars {
            return Err(FamilyViolation::Mismatch { index: i });
        }
        if f.is_zero() {
            return Err(FamilyViolation::Zero { index: i });
        }
    }
    for i in 0..polys.len() {
        for j in i + 1..polys.len() {
            if polys[i]
                .is_proportional(&polys[j])
                .expect("checked compatible")
            {
                return Err(FamilyViolation::Proportional {
                    first: i,
                    second: j,
                });
            }
        }
    }
    Ok(())
}

/// Content hash of a family: field, arity and canonical term strings.
pub fn family_digest(polys: &[Polynomial]) -> String {
    let mut h = Sha256::new();
    if let Some(f) = polys.first() {
        h.update(format!("{}\n{}\n", f.spec, f.nvars));
    }
    for f in polys {
        h.update(f.to_string());
        h.update("\n");
    }
    hex::encode(h.finalize())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientMatrix {
    pub spec: FieldSpec,
    /// Union of supports, ascending graded-lex.
    pub basis: Vec<Monomial>,
    pub rows: Vec<Vec<FieldElement>>,
}

impl CoefficientMatrix {
    pub fn rank(&self) -> usize {
        linalg::rank(&self.spec, &self.rows)
    }
}

pub fn coefficient_matrix(polys: &[Polynomial]) -> Result<CoefficientMatrix> {
    let first = polys
        .first()
        .ok_or_else(|| Error::PreconditionViolated("empty family".into()))?;
    if polys
        .iter()
        .any(|f| f.spec != first.spec || f.nvars != first.nvars)
    {
        return Err(Error::SpecMismatch);
    }
    let basis: Vec<Monomial> = polys
        .iter()
        .flat_map(|f| f.terms.keys().cloned())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let rows = polys
        .iter()
        .map(|f| basis.iter().map(|m| f.coefficient(m)).collect())
        .collect();
    Ok(CoefficientMatrix {
        spec: first.spec.clone(),
        basis,
        rows,
    })
}

// ---------------------------------------------------------------------------
// Text grammar: variables x0..x{n-1}, integer and a/b literals, + - * ^,
// parentheses, and the generator t in extension fields. No implicit
// multiplication.

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt, BigInt),
    Var(usize),
    Gen,
    Op(char),
}

struct Lexer<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    line: usize,
    _src: &'a str,
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str, line: usize) -> Self {
        Lexer {
            chars: src.chars().enumerate().map(|(i, c)| (i + 1, c)).collect(),
            pos: 0,
            line,
            _src: src,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_whitespace() {
            self.pos += 1;
        }
    }

    fn digits(&mut self) -> Option<String> {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| self.chars[start..self.pos].iter().map(|c| c.1).collect())
    }

    fn tokens(mut self) -> Result<Vec<(usize, Tok)>> {
        let mut out = Vec::new();
        loop {
            self.skip_ws();
            let Some(&(col, c)) = self.chars.get(self.pos) else {
                return Ok(out);
            };
            let tok = if c.is_ascii_digit() {
                let n = self.digits().expect("starts with a digit");
                let save = self.pos;
                self.skip_ws();
                let mut d = "1".to_string();
                if self.chars.get(self.pos).map(|c| c.1) == Some('/') {
                    self.pos += 1;
                    self.skip_ws();
                    let dcol = self.chars.get(self.pos).map_or(col, |c| c.0);
                    d = self
                        .digits()
                        .ok_or_else(|| parse_err(self.line, dcol, "expected denominator"))?;
                } else {
                    self.pos = save;
                }
                Tok::Num(n.parse().expect("digits"), d.parse().expect("digits"))
            } else if c == 'x' {
                self.pos += 1;
                let idx = self.digits().ok_or_else(|| {
                    parse_err(self.line, col, "expected variable index after 'x'")
                })?;
                Tok::Var(
                    idx.parse()
                        .map_err(|_| parse_err(self.line, col, "variable index too large"))?,
                )
            } else if c == 't' {
                self.pos += 1;
                Tok::Gen
            } else if "+-*^()".contains(c) {
                self.pos += 1;
                Tok::Op(c)
            } else {
                return Err(parse_err(
                    self.line,
                    col,
                    format!("unexpected character {c:?}"),
                ));
            };
            out.push((col, tok));
        }
    }
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    line: usize,
    end_col: usize,
    spec: &'a FieldSpec,
    nvars: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |t| t.0)
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = Polynomial::zero(self.spec, self.nvars);
        let mut negate = false;
        match self.peek() {
            Some(Tok::Op('-')) => {
                negate = true;
                self.pos += 1;
            }
            Some(Tok::Op('+')) => self.pos += 1,
            _ => {}
        }
        loop {
            let t = self.term()?;
            acc = if negate { acc.sub(&t)? } else { acc.add(&t)? };
            match self.peek() {
                Some(Tok::Op('+')) => negate = false,
                Some(Tok::Op('-')) => negate = true,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.factor()?;
        while let Some(Tok::Op('*')) = self.peek() {
            self.pos += 1;
            acc = acc.mul(&self.factor()?)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let col = self.col();
            match self.peek().cloned() {
                Some(Tok::Num(n, d)) if d == BigInt::from(1) => {
                    self.pos += 1;
                    let e: u64 = n
                        .try_into()
                        .map_err(|_| parse_err(self.line, col, "exponent too large"))?;
                    return Ok(if e == 0 {
                        Polynomial::constant(self.spec, self.nvars, self.spec.one())
                    } else {
                        base.pow(e)
                    });
                }
                _ => return Err(parse_err(self.line, col, "expected integer exponent")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial> {
        let col = self.col();
        let tok = self
            .peek()
            .cloned()
            .ok_or_else(|| parse_err(self.line, col, "unexpected end of input"))?;
        self.pos += 1;
        match tok {
            Tok::Num(n, d) => {
                let c = normalize(self.spec, &Raw::Fraction(n, d))
                    .map_err(|e| parse_err(self.line, col, e.to_string()))?;
                Ok(Polynomial::constant(self.spec, self.nvars, c))
            }
            Tok::Var(i) => {
                if i >= self.nvars {
                    return Err(Error::UnknownVariable {
                        index: i,
                        nvars: self.nvars,
                        line: self.line,
                    });
                }
                Ok(Polynomial::var(self.spec, self.nvars, i))
            }
            Tok::Gen => {
                let t = self.spec.generator().ok_or_else(|| {
                    parse_err(self.line, col, "t is only defined in extension fields")
                })?;
                Ok(Polynomial::constant(self.spec, self.nvars, t))
            }
            Tok::Op('(') => {
                let inner = self.expr()?;
                match self.peek() {
                    Some(Tok::Op(')')) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(parse_err(self.line, self.col(), "expected ')'")),
                }
            }
            Tok::Op(c) => Err(parse_err(self.line, col, format!("unexpected {c:?}"))),
        }
    }
}

fn max_var_index(src: &str, line: usize) -> Result<Option<usize>> {
    Ok(Lexer::new(src, line)
        .tokens()?
        .into_iter()
        .filter_map(|(_, t)| match t {
            Tok::Var(i) => Some(i),
            _ => None,
        })
        .max())
}

/// Parses a single polynomial.
pub fn parse_polynomial(src: &str, spec: &FieldSpec, nvars: usize) -> Result<Polynomial> {
    parse_line(src, spec, nvars, 1)
}

fn parse_line(src: &str, spec: &FieldSpec, nvars: usize, line: usize) -> Result<Polynomial> {
    let toks = Lexer::new(src, line).tokens()?;
    let mut p = Parser {
        toks,
        pos: 0,
        line,
        end_col: src.chars().count() + 1,
        spec,
        nvars,
    };
    let f = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(parse_err(line, p.col(), "unexpected trailing input"));
    }
    Ok(f)
}

/// Parses one polynomial per line; `#` starts a comment, blank lines are
/// skipped. When `nvars` is `None` it is inferred as one more than the
/// largest variable index seen (at least 1).
pub fn parse_polynomials(
    text: &str,
    spec: &FieldSpec,
    nvars: Option<usize>,
) -> Result<Vec<Polynomial>> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("")))
        .filter(|(_, l)| !l.trim().is_empty())
        .collect();
    let nvars = match nvars {
        Some(n) => n,
        None => {
            let mut max = None;
            for &(no, l) in &lines {
                max = max.max(max_var_index(l, no)?);
            }
            max.map_or(1, |m| m + 1)
        }
    };
    lines
        .into_iter()
        .map(|(no, l)| parse_line(l, spec, nvars, no))
        .collect()
}
