use proptest::prelude::*;

use powind::cert::{certify, find_certified_exponent, permutation_products, CertifyConfig};
use powind::counterexamples::{fermat_independence, FermatRing};
use powind::field::FieldSpec;
use powind::oracle::{
    independent_at, minimal_good_exponent, random_family, FamilyConfig, DEFAULT_TERM_BUDGET,
};
use powind::perm::factorial;
use powind::witness::{find_witness, validate_witness, WitnessConfig};

fn field(choice: u8) -> FieldSpec {
    match choice % 4 {
        0 => FieldSpec::Rationals,
        1 => FieldSpec::Prime(101),
        2 => FieldSpec::Prime(3),
        _ => FieldSpec::Prime(2),
    }
}

fn config(r: usize, nvars: usize, max_degree: u32, spec: FieldSpec) -> FamilyConfig {
    FamilyConfig {
        r,
        nvars,
        max_degree,
        max_terms: 3,
        coefficient_bound: 6,
        field: spec,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn certified_exponents_are_good(
        r in 1usize..=4, nvars in 1usize..=2, degree in 1u32..=3, f in any::<u8>(), seed in any::<u64>()
    ) {
        let spec = field(f);
        let Ok(polys) = random_family(&config(r, nvars, degree, spec), seed) else {
            return Ok(());
        };
        let cert = certify(&polys, seed ^ 0xabcd, &CertifyConfig::default()).unwrap();
        prop_assert!(cert.e >= 1 && cert.e <= factorial(r));
        prop_assert!(independent_at(&polys, cert.e, DEFAULT_TERM_BUDGET).unwrap());
        let minimal = minimal_good_exponent(&polys, cert.e, DEFAULT_TERM_BUDGET).unwrap();
        prop_assert!(minimal.is_some_and(|m| m <= cert.e));
        prop_assert_eq!(validate_witness(&polys, &cert.witness.points), Ok(()));
    }

    #[test]
    fn certified_exponent_is_minimal_for_its_witness(r in 2usize..=4, seed in any::<u64>()) {
        let polys = random_family(&config(r, 2, 2, FieldSpec::Rationals), seed).unwrap();
        let w = find_witness(&polys, r, seed, &WitnessConfig::default()).unwrap();
        let products = permutation_products(&polys, &w).unwrap();
        let e = find_certified_exponent(&products);
        for smaller in 1..e {
            prop_assert!(powind::cert::signed_power_sum(&products, smaller).is_zero());
        }
        prop_assert!(!powind::cert::signed_power_sum(&products, e).is_zero());
    }

    #[test]
    fn partial_witnesses_validate(r in 1usize..=4, s in 1usize..=4, seed in any::<u64>()) {
        let s = s.min(r);
        let polys = random_family(&config(r, 2, 3, FieldSpec::Prime(101)), seed).unwrap();
        let w = find_witness(&polys, s, seed, &WitnessConfig::default()).unwrap();
        prop_assert_eq!(w.points.len(), s);
        prop_assert_eq!(w.product_count, (r as u128).pow(s as u32));
        prop_assert_eq!(validate_witness(&polys, &w.points), Ok(()));
    }
}

#[test]
fn fermat_rings_are_dependent_at_s() {
    for d in 3..=5 {
        for s in 2..=5u32 {
            for spec in [FieldSpec::Rationals, FieldSpec::Prime(7)] {
                if (s as u64).is_multiple_of(spec.characteristic().max(1))
                    && spec.characteristic() != 0
                {
                    continue;
                }
                let ring = FermatRing::new(d, s, spec.clone()).unwrap();
                assert!(!fermat_independence(&ring, s as u64, DEFAULT_TERM_BUDGET).unwrap());
                for e in 1..s as u64 {
                    assert!(
                        fermat_independence(&ring, e, DEFAULT_TERM_BUDGET).unwrap(),
                        "d={d} s={s} e={e} {spec}"
                    );
                }
            }
        }
    }
}

#[test]
fn certificates_over_extension_base_fields() {
    let spec = FieldSpec::first_extension(3, 3).unwrap();
    let polys = powind::poly::parse_polynomials("x0\nt*x0 + 1\nx0^2 + t^2", &spec, None).unwrap();
    let cert = certify(&polys, 17, &CertifyConfig::default()).unwrap();
    assert!(independent_at(&polys, cert.e, DEFAULT_TERM_BUDGET).unwrap());
}
