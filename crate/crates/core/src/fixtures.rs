//! Deterministic test objects: named tests and states with known behaviour,
//! and seeded generators of random rational projections and densities.

use num::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitString;
use crate::cantor::ClassicalLevel;
use crate::error::Result;
use crate::linalg::scalar::{rational, GaussianRational};
use crate::linalg::{ComplexMatrix, DensityMatrix, Ket, SpecialProjection};
use crate::randomness::{classical_to_quantum, QmlTest, QuantumSigma1Set, StrongSolovayTest};
use crate::states::{biased_qubit, ClassicalSequence, CoherentState, MeasureState};

/// Seeded generator used by every randomized fixture.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `v = (24/25, 7/25)`.
pub fn rotated_qubit() -> Ket {
    Ket::from_exact(1, vec![GaussianRational::ratio(24, 25), GaussianRational::ratio(7, 25)])
        .expect("two amplitudes")
}

/// `v⊥ = (−7/25, 24/25)`.
pub fn rotated_qubit_perp() -> Ket {
    Ket::from_exact(1, vec![GaussianRational::ratio(-7, 25), GaussianRational::ratio(24, 25)])
        .expect("two amplitudes")
}

/// Level `r` is the cylinder `[0^r]`.
pub fn prefix_test(levels: usize, max_depth: usize) -> QmlTest {
    let classical = (0..levels)
        .map(|r| ClassicalLevel::single(r, [BitString::zeros(r)]).expect("single string"))
        .collect();
    let mut t = classical_to_quantum(classical, max_depth).expect("[0^r] has measure 2^-r");
    t.label = "prefix".into();
    t
}

/// Level `r` is `|Z↾r⟩⟨Z↾r| ⊗ u_{Z(r)}` from depth `r + 1` on, with
/// `u_0 = |v⟩⟨v|` and `u_1 = |v⊥⟩⟨v⊥|`. Its mass is `2^{-r-1}` and
/// `ρ_Z` gives it value `576/625`.
pub fn rotated_basis_test(z: &ClassicalSequence, levels: usize, max_depth: usize) -> Result<QmlTest> {
    let prefix = z.prefix(levels.min(max_depth))?;
    let levels = (0..levels)
        .map(|r| {
            let prefix = prefix.clone();
            QuantumSigma1Set::from_fn(format!("rotated level {r}"), max_depth, move |k| {
                if k < r + 1 {
                    return Ok(SpecialProjection::zero(k));
                }
                let last = if prefix.bit(r) { rotated_qubit_perp() } else { rotated_qubit() };
                let ket = Ket::basis(&prefix.prefix(r)).tensor(&last)?;
                SpecialProjection::from_ket(&ket)?.embed_to(k)
            })
        })
        .collect();
    Ok(QmlTest::new("rotated_basis", levels))
}

/// The unnormalized Bell vector `|00⟩ + |11⟩`.
fn bell_ket() -> Ket {
    let one = GaussianRational::from_ints(1, 0);
    let zero = GaussianRational::from_ints(0, 0);
    Ket::from_exact(2, vec![one.clone(), zero.clone(), zero, one]).expect("four amplitudes")
}

/// Level `r` is `β^{⊗⌈r/2⌉} ⊗ I` from depth `2⌈r/2⌉` on.
pub fn epr_test(levels: usize, max_depth: usize) -> QmlTest {
    let levels = (0..levels)
        .map(|r| {
            let pairs = r.div_ceil(2);
            QuantumSigma1Set::from_fn(format!("epr level {r}"), max_depth, move |k| {
                if k < 2 * pairs {
                    return Ok(SpecialProjection::zero(k));
                }
                let mut ket = Ket::basis(&BitString::empty());
                for _ in 0..pairs {
                    ket = ket.tensor(&bell_ket())?;
                }
                SpecialProjection::from_ket(&ket)?.embed_to(k)
            })
        })
        .collect();
    QmlTest::new("epr", levels)
}

/// The bit sequence used with [`rotated_basis_test`].
pub fn rotated_fixture_sequence(max_depth: usize) -> ClassicalSequence {
    ClassicalSequence::periodic(&"011".parse().expect("bit string"), max_depth)
        .expect("nonempty pattern")
}

/// Prefix, rotated-basis and EPR tests.
pub fn qml_tests(levels: usize, max_depth: usize) -> Vec<QmlTest> {
    vec![
        prefix_test(levels, max_depth),
        rotated_basis_test(&rotated_fixture_sequence(max_depth), levels, max_depth)
            .expect("depth is within the sequence"),
        epr_test(levels, max_depth),
    ]
}

/// Tracial, `0^∞`, EPR chain, i.i.d. `diag(2/3, 1/3)` and the Bernoulli(1/3)
/// measure.
pub fn states(max_depth: usize) -> Vec<CoherentState> {
    vec![
        CoherentState::tracial(max_depth),
        CoherentState::from_bits(ClassicalSequence::constant(false, max_depth)),
        CoherentState::epr_chain(max_depth),
        CoherentState::iid_state(biased_qubit(&rational(1, 3)).expect("valid bias"), max_depth)
            .expect("one-qubit density"),
        CoherentState::from_measure(
            MeasureState::bernoulli(rational(1, 3)).expect("valid bias"),
            max_depth,
        ),
    ]
}

/// Items `p_r = P_v^{⊗(n_r − 1)} ⊗ I` on `n_r = r + 2` qubits for
/// `r < items`, each of rank 2 and mass `2^{-r-1}`.
pub fn strong_solovay_test(items: usize) -> Result<StrongSolovayTest> {
    let projections = (0..items)
        .map(|r| {
            let n = r + 2;
            let mut ket = Ket::basis(&BitString::empty());
            for _ in 0..n - 1 {
                ket = ket.tensor(&rotated_qubit())?;
            }
            Ok(SpecialProjection::from_ket(&ket)?.embed())
        })
        .collect::<Result<Vec<_>>>()?;
    StrongSolovayTest::new("rotated_solovay", projections, rational(1, 1))
}

/// i.i.d. state of `(97/100)|v⟩⟨v| + (3/100)|v⊥⟩⟨v⊥|`, whose value on item
/// `r` of [`strong_solovay_test`] is `(97/100)^{r+1}`.
pub fn strong_solovay_state(max_depth: usize) -> Result<CoherentState> {
    let a = DensityMatrix::from_ket(&rotated_qubit())?.into_matrix().scale(&rational(97, 100));
    let b = DensityMatrix::from_ket(&rotated_qubit_perp())?.into_matrix().scale(&rational(3, 100));
    Ok(CoherentState::iid_state(DensityMatrix::new(a.add(&b)?)?, max_depth)?.with_label("rotated_iid"))
}

/// A nonzero vector of small Gaussian integers; each amplitude is nonzero
/// with probability `fill`.
pub fn random_ket(rng: &mut impl Rng, n_qubits: usize, fill: f64) -> Ket {
    let dim = 1usize << n_qubits;
    loop {
        let amps: Vec<GaussianRational> = (0..dim)
            .map(|_| {
                if rng.random_bool(fill) {
                    GaussianRational::from_ints(rng.random_range(-2..=2), rng.random_range(-1..=1))
                } else {
                    GaussianRational::from_ints(0, 0)
                }
            })
            .collect();
        if amps.iter().any(|z| z.norm_sqr() != BigRational::from_integer(0.into())) {
            return Ket::from_exact(n_qubits, amps).expect("dimension matches");
        }
    }
}

/// Exact projection onto the span of up to `max_vectors` random vectors.
pub fn random_projection(rng: &mut impl Rng, n_qubits: usize, max_vectors: usize) -> SpecialProjection {
    let count = rng.random_range(0..=max_vectors);
    let vectors: Vec<Ket> = (0..count).map(|_| random_ket(rng, n_qubits, 0.5)).collect();
    SpecialProjection::onto_span(n_qubits, &vectors).expect("same size vectors")
}

/// `Σ w_i |v_i⟩⟨v_i| / ⟨v_i|v_i⟩` with random rational weights and
/// `1..=max_rank` random vectors.
pub fn random_density(rng: &mut impl Rng, n_qubits: usize, max_rank: usize, fill: f64) -> DensityMatrix {
    let count = rng.random_range(1..=max_rank.max(1));
    let weights: Vec<i64> = (0..count).map(|_| rng.random_range(1..=9)).collect();
    let total: i64 = weights.iter().sum();
    let mut acc = ComplexMatrix::zeros(n_qubits, crate::Backend::Exact);
    for w in weights {
        let v = random_ket(rng, n_qubits, fill);
        let term = v.density().expect("nonzero vector").scale(&rational(w, total));
        acc = acc.add(&term).expect("same size");
    }
    DensityMatrix::new(acc).expect("convex combination of pure states")
}

/// A state given by a random rank `≤ max_rank` density on `depth` qubits and
/// its partial traces.
pub fn random_matrix_sequence(rng: &mut impl Rng, depth: usize, max_rank: usize) -> Result<CoherentState> {
    let fill = (16.0 / (1usize << depth) as f64).min(1.0);
    let top = random_density(rng, depth, max_rank, fill);
    let mut matrices = vec![top.into_matrix()];
    for _ in 0..depth {
        let next = matrices.last().expect("nonempty").partial_trace()?;
        matrices.push(next);
    }
    matrices.reverse();
    CoherentState::from_matrix_sequence(matrices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Real;
    use crate::randomness::{evaluate_test, sigma1_mass};
    use crate::states::check_coherence;

    #[test]
    fn fixture_tests_obey_mass_bounds() {
        for t in qml_tests(7, 8) {
            t.check_mass_bounds(8).unwrap();
            for g in &t.levels {
                g.check_monotone(8).unwrap();
            }
        }
    }

    #[test]
    fn rotated_values() {
        let z = rotated_fixture_sequence(8);
        let t = rotated_basis_test(&z, 6, 8).unwrap();
        let values = evaluate_test(&CoherentState::from_bits(z), &t, 8).unwrap();
        assert!(values.iter().all(|v| *v == Real::Exact(rational(576, 625))));
        let m = sigma1_mass(&t.levels[3], 8).unwrap();
        assert_eq!(m.value, Real::Exact(rational(1, 16)));
    }

    #[test]
    fn solovay_fixture() {
        let t = strong_solovay_test(3).unwrap();
        let rho = strong_solovay_state(4).unwrap();
        for (r, (n, p)) in t.items().iter().enumerate() {
            assert_eq!(*n, r + 2);
            assert_eq!(p.rank(), 2);
            let expected = num::pow(rational(97, 100), r + 1);
            assert_eq!(rho.evaluate(p.matrix()).unwrap(), Real::Exact(expected));
        }
    }

    #[test]
    fn random_fixtures_are_deterministic_and_valid() {
        let a = random_matrix_sequence(&mut rng(7), 5, 3).unwrap();
        let b = random_matrix_sequence(&mut rng(7), 5, 3).unwrap();
        assert_eq!(a.level(5).unwrap(), b.level(5).unwrap());
        assert!(check_coherence(&a, 5).unwrap().holds());
        let mut g = rng(1);
        for _ in 0..10 {
            let p = random_projection(&mut g, 3, 3);
            assert!(SpecialProjection::new(p.matrix().clone()).is_ok());
        }
    }
}
