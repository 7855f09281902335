//! Brute-force ground truth: expand `f_i^e` symbolically and take the exact
//! rank of the coefficient matrix. Also hosts the random-family generator and
//! the minimal-exponent experiments.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cert::{certify, CertifyConfig, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::field::{sample, FieldSpec};
use crate::perm::factorial;
use crate::poly::{coefficient_matrix, family_digest, validate_family, Monomial, Polynomial};

pub const DEFAULT_TERM_BUDGET: usize = 200_000;

/// Whether `f_1^e, ..., f_r^e` are linearly independent over the
/// coefficient field.
pub fn independent_at(polys: &[Polynomial], e: u64, budget: usize) -> Result<bool> {
    validate_family(polys).map_err(Error::FamilyInvalid)?;
    if e == 0 {
        return Err(Error::PreconditionViolated("exponent must be >= 1".into()));
    }
    let needed: u128 = polys.iter().map(|f| f.power_size_bound(e)).sum();
    if needed > budget as u128 {
        return Err(Error::TermBudgetExceeded { needed, budget });
    }
    let powered: Vec<Polynomial> = polys.iter().map(|f| f.pow(e)).collect();
    Ok(coefficient_matrix(&powered)?.rank() == polys.len())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExponentProfile {
    pub schema_version: u32,
    pub family_digest: String,
    pub e_max: u64,
    pub good: BTreeSet<u64>,
    pub minimal_good: Option<u64>,
}

pub fn exponent_profile(
    polys: &[Polynomial],
    e_max: u64,
    budget: usize,
) -> Result<ExponentProfile> {
    let mut good = BTreeSet::new();
    for e in 1..=e_max {
        if independent_at(polys, e, budget)? {
            good.insert(e);
        }
    }
    Ok(ExponentProfile {
        schema_version: SCHEMA_VERSION,
        family_digest: family_digest(polys),
        e_max,
        minimal_good: good.first().copied(),
        good,
    })
}

/// Smallest good exponent in `1..=e_max`, scanning upwards.
pub fn minimal_good_exponent(
    polys: &[Polynomial],
    e_max: u64,
    budget: usize,
) -> Result<Option<u64>> {
    for e in 1..=e_max {
        if independent_at(polys, e, budget)? {
            return Ok(Some(e));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyConfig {
    pub r: usize,
    pub nvars: usize,
    pub max_degree: u32,
    pub max_terms: usize,
    pub coefficient_bound: u64,
    pub field: FieldSpec,
}

const GENERATION_ATTEMPTS: usize = 1000;

fn monomials_up_to(nvars: usize, max_degree: u32) -> Vec<Monomial> {
    let mut out = vec![Vec::new()];
    for _ in 0..nvars {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<u32>| {
                let used: u32 = prefix.iter().sum();
                (0..=max_degree - used).map(move |e| {
                    let mut v = prefix.clone();
                    v.push(e);
                    v
                })
            })
            .collect();
    }
    let mut ms: Vec<Monomial> = out.into_iter().map(Monomial::new).collect();
    ms.sort();
    ms
}

/// Rejection-samples a family satisfying the independence hypotheses.
pub fn random_family(config: &FamilyConfig, seed: u64) -> Result<Vec<Polynomial>> {
    if config.r == 0 || config.nvars == 0 || config.max_terms == 0 {
        return Err(Error::PreconditionViolated(
            "r, nvars and max_terms must be positive".into(),
        ));
    }
    let pool = monomials_up_to(config.nvars, config.max_degree);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = &config.field;
    for _ in 0..GENERATION_ATTEMPTS {
        let family: Vec<Polynomial> = (0..config.r)
            .map(|_| {
                let n = rng.gen_range(1..=config.max_terms);
                let terms: Vec<_> = (0..n)
                    .map(|_| {
                        let m = pool[rng.gen_range(0..pool.len())].clone();
                        let c = loop {
                            let c = sample(spec, config.coefficient_bound.max(1), &mut rng);
                            if !c.is_zero() {
                                break c;
                            }
                        };
                        (m, c)
                    })
                    .collect();
                Polynomial::from_terms(spec, config.nvars, terms)
            })
            .collect();
        if validate_family(&family).is_ok() {
            return Ok(family);
        }
    }
    Err(Error::GenerationExhausted {
        attempts: GENERATION_ATTEMPTS,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub family: FamilyConfig,
    pub trials: usize,
    pub seed: u64,
    /// Profiles scan `1..=r! + e_slack`.
    pub e_slack: u64,
    pub term_budget: usize,
    pub certify: CertifyConfig,
    /// Worker threads; results do not depend on it.
    pub jobs: usize,
}

impl ExperimentConfig {
    pub fn new(family: FamilyConfig, trials: usize, seed: u64) -> Self {
        ExperimentConfig {
            family,
            trials,
            seed,
            e_slack: 2,
            term_budget: DEFAULT_TERM_BUDGET,
            certify: CertifyConfig::default(),
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfigEcho {
    pub r: usize,
    pub nvars: usize,
    pub max_degree: u32,
    pub max_terms: usize,
    pub coefficient_bound: u64,
    pub field: String,
    pub trials: usize,
    pub seed: u64,
    pub e_slack: u64,
    pub term_budget: usize,
    pub max_attempts_per_point: u32,
    pub max_escalations: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub family_seed: u64,
    pub certify_seed: u64,
    pub polys: Vec<String>,
    pub minimal_good: Option<u64>,
    pub certified_e: Option<u64>,
    /// Oracle verdict at the certified exponent.
    pub certified_e_independent: Option<bool>,
    /// For r = 3: whether {1, 2} (or {1, 3} in characteristic 2) holds a
    /// good exponent.
    pub small_window_good: Option<bool>,
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Aggregates {
    pub completed: usize,
    pub failed: usize,
    pub max_minimal_good: Option<u64>,
    pub max_certified_e: Option<u64>,
    pub r_factorial: u64,
    pub certified_within_bound: bool,
    pub certificates_confirmed: bool,
    pub minimal_le_certified: bool,
    pub strict_gap_trials: usize,
    pub minimal_good_histogram: BTreeMap<u64, usize>,
    pub certified_e_histogram: BTreeMap<u64, usize>,
    /// Present for r = 3 only.
    pub small_window_holds: Option<bool>,
    pub small_window: Option<[u64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub config: ConfigEcho,
    pub trials: Vec<TrialRecord>,
    pub aggregates: Aggregates,
}

fn trial_seeds(seed: u64, trial: usize) -> (u64, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    (rng.next_u64(), rng.next_u64())
}

fn small_window(field: &FieldSpec) -> [u64; 2] {
    if field.characteristic() == 2 {
        [1, 3]
    } else {
        [1, 2]
    }
}

fn run_trial(config: &ExperimentConfig, trial: usize) -> TrialRecord {
    let (family_seed, certify_seed) = trial_seeds(config.seed, trial);
    let mut rec = TrialRecord {
        trial,
        family_seed,
        certify_seed,
        polys: Vec::new(),
        minimal_good: None,
        certified_e: None,
        certified_e_independent: None,
        small_window_good: None,
        errors: Vec::new(),
    };
    let family = match random_family(&config.family, family_seed) {
        Ok(f) => f,
        Err(e) => {
            rec.errors.push(format!("generation: {e}"));
            return rec;
        }
    };
    rec.polys = family.iter().map(ToString::to_string).collect();
    let r = family.len();
    let budget = config.term_budget;
    let e_max = factorial(r) + config.e_slack;
    match minimal_good_exponent(&family, e_max, budget) {
        Ok(m) => rec.minimal_good = m,
        Err(e) => rec.errors.push(format!("oracle: {e}")),
    }
    if r == 3 {
        let window = small_window(&config.family.field);
        let verdicts: Result<Vec<bool>> = window
            .iter()
            .map(|&e| independent_at(&family, e, budget))
            .collect();
        match verdicts {
            Ok(v) => rec.small_window_good = Some(v.into_iter().any(|b| b)),
            Err(e) => rec.errors.push(format!("window: {e}")),
        }
    }
    match certify(&family, certify_seed, &config.certify) {
        Ok(cert) => {
            rec.certified_e = Some(cert.e);
            match independent_at(&family, cert.e, budget) {
                Ok(b) => rec.certified_e_independent = Some(b),
                Err(e) => rec.errors.push(format!("oracle at certified e: {e}")),
            }
        }
        Err(e) => rec.errors.push(format!("certify: {e}")),
    }
    rec
}

fn aggregate(config: &ExperimentConfig, trials: &[TrialRecord]) -> Aggregates {
    let r_factorial = factorial(config.family.r);
    let mut minimal_hist = BTreeMap::new();
    let mut cert_hist = BTreeMap::new();
    for t in trials {
        if let Some(m) = t.minimal_good {
            *minimal_hist.entry(m).or_insert(0) += 1;
        }
        if let Some(e) = t.certified_e {
            *cert_hist.entry(e).or_insert(0) += 1;
        }
    }
    let with_both: Vec<(u64, u64)> = trials
        .iter()
        .filter_map(|t| Some((t.minimal_good?, t.certified_e?)))
        .collect();
    let windows: Vec<bool> = trials.iter().filter_map(|t| t.small_window_good).collect();
    let failed = trials.iter().filter(|t| !t.errors.is_empty()).count();
    Aggregates {
        completed: trials.len() - failed,
        failed,
        max_minimal_good: trials.iter().filter_map(|t| t.minimal_good).max(),
        max_certified_e: trials.iter().filter_map(|t| t.certified_e).max(),
        r_factorial,
        certified_within_bound: trials
            .iter()
            .filter_map(|t| t.certified_e)
            .all(|e| (1..=r_factorial).contains(&e)),
        certificates_confirmed: trials
            .iter()
            .filter_map(|t| t.certified_e_independent)
            .all(|b| b),
        minimal_le_certified: with_both.iter().all(|(m, c)| m <= c),
        strict_gap_trials: with_both.iter().filter(|(m, c)| m < c).count(),
        minimal_good_histogram: minimal_hist,
        certified_e_histogram: cert_hist,
        small_window_holds: (config.family.r == 3)
            .then(|| windows.len() == trials.len() && windows.iter().all(|&b| b)),
        small_window: (config.family.r == 3).then(|| small_window(&config.family.field)),
    }
}

/// Runs `trials` independent trials. Each trial derives its seeds from
/// `(seed, trial index)`, so the report is identical for any `jobs`.
pub fn bound_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.max(1))
        .build()
        .map_err(|e| Error::PreconditionViolated(e.to_string()))?;
    let trials: Vec<TrialRecord> = pool.install(|| {
        (0..config.trials)
            .into_par_iter()
            .map(|i| run_trial(config, i))
            .collect()
    });
    let aggregates = aggregate(config, &trials);
    // a certified exponent above r! would contradict the exponent scan
    assert!(aggregates.certified_within_bound, "certified e exceeds r!");
    let f = &config.family;
    Ok(ExperimentReport {
        schema_version: SCHEMA_VERSION,
        config: ConfigEcho {
            r: f.r,
            nvars: f.nvars,
            max_degree: f.max_degree,
            max_terms: f.max_terms,
            coefficient_bound: f.coefficient_bound,
            field: f.field.to_string(),
            trials: config.trials,
            seed: config.seed,
            e_slack: config.e_slack,
            term_budget: config.term_budget,
            max_attempts_per_point: config.certify.witness.max_attempts_per_point,
            max_escalations: config.certify.witness.max_escalations,
        },
        trials,
        aggregates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldElement;
    use crate::poly::parse_polynomials;

    fn q() -> FieldSpec {
        FieldSpec::Rationals
    }

    fn fam(src: &str, spec: &FieldSpec) -> Vec<Polynomial> {
        parse_polynomials(src, spec, None).unwrap()
    }

    #[test]
    fn independent_at_examples() {
        let f = fam("x0\nx0+1\nx0-1", &q());
        assert!(!independent_at(&f, 1, DEFAULT_TERM_BUDGET).unwrap());
        assert!(independent_at(&f, 2, DEFAULT_TERM_BUDGET).unwrap());
        let g = fam("x0*x1 - 3", &q());
        for e in 1..5 {
            assert!(independent_at(&g, e, DEFAULT_TERM_BUDGET).unwrap());
        }
        assert!(matches!(
            independent_at(&fam("x0+x1+x2+1", &q()), 300, 1000),
            Err(Error::TermBudgetExceeded { .. })
        ));
    }

    #[test]
    fn profile_examples() {
        let p = exponent_profile(&fam("x0\nx0+1\nx0-1", &q()), 4, DEFAULT_TERM_BUDGET).unwrap();
        assert_eq!(p.good, BTreeSet::from([2, 3, 4]));
        assert_eq!(p.minimal_good, Some(2));
        let p = exponent_profile(&fam("x0\nx0+1", &q()), 3, DEFAULT_TERM_BUDGET).unwrap();
        assert_eq!(p.good, BTreeSet::from([1, 2, 3]));
        let p = exponent_profile(&fam("x0", &q()), 2, DEFAULT_TERM_BUDGET).unwrap();
        assert_eq!(p.good, BTreeSet::from([1, 2]));
    }

    fn cfg(r: usize, max_degree: u32, field: FieldSpec) -> FamilyConfig {
        FamilyConfig {
            r,
            nvars: 1,
            max_degree,
            max_terms: 3,
            coefficient_bound: 5,
            field,
        }
    }

    #[test]
    fn random_family_examples() {
        let one = random_family(&cfg(1, 2, q()), 0).unwrap();
        assert_eq!(one.len(), 1);
        assert!(!one[0].is_zero());
        let three = random_family(&cfg(3, 2, q()), 42).unwrap();
        assert_eq!(validate_family(&three), Ok(()));
        assert_eq!(three, random_family(&cfg(3, 2, q()), 42).unwrap());
        assert!(three.iter().all(|f| f.total_degree() <= 2));
        assert!(matches!(
            random_family(&cfg(2, 0, q()), 0),
            Err(Error::GenerationExhausted { .. })
        ));
    }

    #[test]
    fn oracle_invariant_under_permutation_and_scaling() {
        let spec = FieldSpec::Prime(7);
        for seed in 0..30 {
            let f = random_family(&cfg(3, 2, spec.clone()), seed).unwrap();
            for e in 1..=3 {
                let base = independent_at(&f, e, DEFAULT_TERM_BUDGET).unwrap();
                let mut g = f.clone();
                g.reverse();
                g[0] = g[0].scale(&spec.from_i64(3));
                assert_eq!(independent_at(&g, e, DEFAULT_TERM_BUDGET).unwrap(), base);
            }
        }
    }

    /// Over F_p with p <= 5, enumerate every coefficient vector.
    fn exhaustively_independent(polys: &[Polynomial], e: u64, p: u64) -> bool {
        let spec = polys[0].spec().clone();
        let powered: Vec<Polynomial> = polys.iter().map(|f| f.pow(e)).collect();
        let r = polys.len() as u32;
        (1..p.pow(r)).all(|n| {
            let lambdas: Vec<FieldElement> = (0..r)
                .map(|i| spec.from_i64(((n / p.pow(i)) % p) as i64))
                .collect();
            let combo = powered
                .iter()
                .zip(&lambdas)
                .fold(Polynomial::zero(&spec, polys[0].nvars()), |acc, (f, l)| {
                    acc.add(&f.scale(l)).unwrap()
                });
            !combo.is_zero()
        })
    }

    #[test]
    fn oracle_matches_exhaustive_enumeration() {
        for p in [2u64, 3, 5] {
            let spec = FieldSpec::Prime(p);
            let config = FamilyConfig {
                r: 3,
                nvars: 1,
                max_degree: 3,
                max_terms: 2,
                coefficient_bound: 1,
                field: spec.clone(),
            };
            let mut checked = 0;
            for seed in 0..200 {
                let Ok(f) = random_family(&config, seed) else {
                    continue;
                };
                let support: BTreeSet<&Monomial> =
                    f.iter().flat_map(|g| g.terms().keys()).collect();
                if support.len() > 4 {
                    continue;
                }
                for e in 1..=3 {
                    assert_eq!(
                        independent_at(&f, e, DEFAULT_TERM_BUDGET).unwrap(),
                        exhaustively_independent(&f, e, p),
                        "p={p} seed={seed} e={e}"
                    );
                }
                checked += 1;
            }
            assert!(checked > 20, "only {checked} families checked for p = {p}");
        }
    }

    #[test]
    fn experiment_is_reproducible_and_job_independent() {
        let mut c = ExperimentConfig::new(cfg(3, 2, q()), 12, 5);
        let a = bound_experiment(&c).unwrap();
        c.jobs = 3;
        let b = bound_experiment(&c).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert_eq!(a.aggregates.small_window_holds, Some(true));
        assert!(a.aggregates.minimal_le_certified);
        assert!(a.aggregates.certificates_confirmed);
    }

    #[test]
    fn single_polynomial_experiment() {
        let c = ExperimentConfig::new(cfg(1, 3, q()), 10, 1);
        let rep = bound_experiment(&c).unwrap();
        assert!(rep.trials.iter().all(|t| t.minimal_good == Some(1)));
        assert_eq!(rep.aggregates.small_window_holds, None);
    }
}
