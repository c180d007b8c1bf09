use num::{BigRational, One, Zero};

use qcantor::compression::{
    compress_via_test, part1_test, qc_complexity, solovay_to_machine, LengthFunction,
    StateDictionary, UnitaryMachine, WitnessSource,
};
use qcantor::fixtures;
use qcantor::io::{matrix_from_json, matrix_to_json};
use qcantor::randomness::{evaluate_test, universal_test, verdict, Semantics};
use qcantor::states::{ClassicalSequence, CoherentState};
use qcantor::{DensityMatrix, Real};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[test]
fn universal_test_dominates_its_components_on_fixture_states() {
    let tests = fixtures::qml_tests(7, 6);
    let universal = universal_test(tests.clone(), 3, 6);
    universal.check_mass_bounds(6).unwrap();
    for rho in fixtures::states(6) {
        let u = evaluate_test(&rho, &universal, 6).unwrap();
        for (e, t) in tests.iter().enumerate() {
            let v = evaluate_test(&rho, t, 6).unwrap();
            // level n of the universal test contains level n + e + 1 of test e
            for (n, un) in u.iter().enumerate() {
                let vn = &v[n + e + 1];
                assert!(un.to_f64() >= vn.to_f64() - 1e-9, "{} {} level {n}", rho.label(), t.label);
            }
        }
    }
}

#[test]
fn zero_sequence_is_caught_and_tracial_state_is_not() {
    let prefix = fixtures::prefix_test(6, 7);
    let zeros = CoherentState::from_bits(ClassicalSequence::constant(false, 7));
    let values = evaluate_test(&zeros, &prefix, 7).unwrap();
    assert!(verdict(&values, &q(1, 2), Semantics::MartinLof).unwrap().fails());
    let tracial = CoherentState::tracial(7);
    let values = evaluate_test(&tracial, &prefix, 7).unwrap();
    assert!(!verdict(&values, &q(1, 4), Semantics::MartinLof).unwrap().fails());
}

#[test]
fn qc_complexity_of_basis_strings_under_bit_reversal() {
    let l = UnitaryMachine::bit_reversal(4);
    let dict = StateDictionary::basis_strings(4);
    let x = DensityMatrix::basis(&"1110".parse().unwrap());
    let record = qc_complexity(&l, &x, 0.5, &dict, &[]).unwrap();
    assert_eq!(record.k, 4);
    assert_eq!(record.achieved_distance, 0.0);
    assert!(matches!(record.source, WitnessSource::Dictionary(_)));
    let zeros = DensityMatrix::basis(&"0000".parse().unwrap());
    assert_eq!(qc_complexity(&l, &zeros, 0.5, &dict, &[]).unwrap().k, 0);
    let mixed = DensityMatrix::maximally_mixed(2);
    let record = qc_complexity(&l, &mixed, 0.1, &dict, &[]).unwrap();
    assert_eq!((record.k, record.source), (2, WitnessSource::Inverse));
}

#[test]
fn part1_test_obeys_its_mass_bounds_and_catches_compressible_prefixes() {
    let l = UnitaryMachine::identity(8);
    let dict = StateDictionary::basis_strings(8);
    let test = part1_test(&l, &LengthFunction::TwiceCeilLog, &dict, 3, 8);
    test.check_mass_bounds(8).unwrap();
    let zeros = CoherentState::from_bits(ClassicalSequence::constant(false, 8));
    let values = evaluate_test(&zeros, &test, 8).unwrap();
    assert_eq!(values[0], Real::Exact(BigRational::one()));
    assert!(values[1..].iter().all(|v| *v == Real::Exact(BigRational::zero())));
}

#[test]
fn strong_solovay_compression_round_trip() {
    let test = fixtures::strong_solovay_test(3).unwrap();
    let rho = fixtures::strong_solovay_state(4).unwrap();
    let sm = solovay_to_machine(&test, 4).unwrap();
    for r in 0..3 {
        let c = compress_via_test(&rho, &test, r, 0.1).unwrap();
        assert_eq!(c.alpha, Real::Exact(num::pow(q(97, 100), r + 1)));
        assert!(c.projection_distance <= c.projection_bound + 1e-12);
        assert_eq!(c.record.k, c.n - sm.f(c.n));
        assert!(c.record.achieved_distance <= 0.1f64.sqrt());
    }
}

#[test]
fn matrices_survive_json_round_trip() {
    let mut rng = fixtures::rng(5);
    for n in 0..4 {
        let m = fixtures::random_density(&mut rng, n, 3, 0.7).into_matrix();
        assert_eq!(matrix_from_json(&matrix_to_json(&m)).unwrap(), m);
        let f = m.to_float();
        assert_eq!(matrix_from_json(&matrix_to_json(&f)).unwrap(), f);
    }
}
