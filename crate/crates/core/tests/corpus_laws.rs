//! Laws checked over the seeded descriptor corpus.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use nielsen_zeta::corpus;
use nielsen_zeta::document::{descriptor_to_json, parse_descriptor};
use nielsen_zeta::zeta::{periodic_p_values, subshift_zeta, verify_closed_form, zeta_with};
use nielsen_zeta::{verify_zeta, FiberAction, MapDescriptor, ZetaOptions};

fn mixed_corpus(seed: u64) -> Vec<MapDescriptor> {
    let mut rng = corpus::rng(seed);
    let mut out = Vec::new();
    for _ in 0..12 {
        out.push(corpus::periodic(&mut rng, 12, 100));
        out.push(corpus::subshift(&mut rng, 3, 2));
        out.push(corpus::seifert(&mut rng, FiberAction::Reversing));
        out.push(corpus::seifert(&mut rng, FiberAction::Preserving));
        out.push(corpus::decomposition(&mut rng, 3, 4));
    }
    out.extend(corpus::torus_matrices().into_iter().map(|matrix| MapDescriptor::TorusLinear { matrix }));
    out
}

#[test]
fn iterate_law_holds_on_the_corpus() {
    for d in mixed_corpus(corpus::DEFAULT_SEED) {
        let direct = d.nielsen_sequence(6 * 24).unwrap();
        for k in 1..=6u64 {
            let it = d.iterate(k).unwrap();
            for n in 1..=24u64 {
                assert_eq!(
                    it.nielsen_number(n).unwrap(),
                    direct[(k * n - 1) as usize],
                    "{} iterate {k} at n = {n}",
                    d.kind()
                );
            }
        }
    }
}

#[test]
fn sequences_are_nonnegative() {
    for d in mixed_corpus(corpus::DEFAULT_SEED + 1) {
        assert!(d.nielsen_sequence(64).unwrap().iter().all(|v| !v.is_negative()), "{}", d.kind());
    }
}

#[test]
fn every_corpus_descriptor_verifies_at_64() {
    for d in mixed_corpus(corpus::DEFAULT_SEED + 2) {
        let report = verify_zeta(&d, 64).unwrap();
        assert!(report.agrees(), "{}: mismatch at {:?}", d.kind(), report.first_mismatch);
    }
}

#[test]
fn subshift_closed_forms_have_unit_exponents() {
    let mut rng = corpus::rng(corpus::DEFAULT_SEED + 3);
    for _ in 0..30 {
        let d = corpus::subshift(&mut rng, 3, 2);
        let e = subshift_zeta(&d, 64).unwrap();
        assert!(e.factors().all(|(_, x)| x.abs() == nielsen_zeta::Rational::one()), "{e}");
    }
}

#[test]
fn moebius_values_reproduce_the_table() {
    let mut rng = corpus::rng(corpus::DEFAULT_SEED + 4);
    for _ in 0..100 {
        let d = corpus::periodic(&mut rng, 12, 100);
        let MapDescriptor::Periodic { period, nielsen } = &d else { unreachable!() };
        let p = periodic_p_values(*period, nielsen).unwrap();
        for (&k, n_k) in nielsen {
            let total: BigInt = p.iter().filter(|(&j, _)| k % j == 0).map(|(_, v)| v).sum();
            assert_eq!(&total, n_k);
        }
    }
}

#[test]
fn documents_round_trip_and_keep_the_zeta() {
    for d in mixed_corpus(corpus::DEFAULT_SEED + 5) {
        let back = parse_descriptor(&descriptor_to_json(&d)).unwrap();
        assert_eq!(back, d);
    }
}

#[test]
fn torus_pieces_in_decompositions_reconstruct() {
    let cat = MapDescriptor::TorusLinear {
        matrix: corpus::torus_matrices()[0].clone(),
    };
    let d = MapDescriptor::Decomposition {
        pieces: vec![
            nielsen_zeta::Piece { return_time: 3, map: cat },
            nielsen_zeta::Piece {
                return_time: 2,
                map: MapDescriptor::constant(5),
            },
        ],
    };
    let opts = ZetaOptions::default();
    let e = zeta_with(&d, &opts).unwrap();
    assert!(verify_closed_form(&e, &d, 64).unwrap().agrees());
    assert!(!e.is_rational());
    assert!(e.radical_index() > BigInt::zero());
}
