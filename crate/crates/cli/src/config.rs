//! Experiment configuration: JSON descriptions of states, tests, machines
//! and parameters, and their construction into library objects.

use std::collections::BTreeMap;

use num::BigRational;
use serde::{Deserialize, Serialize};

use qcantor::bits::BitString;
use qcantor::cantor::{ClassicalLevel, ClassicalStage};
use qcantor::compression::{DefaultCircuit, LengthFunction, StateDictionary, UnitaryMachine};
use qcantor::fixtures;
use qcantor::io::{ket_from_json, MatrixDoc};
use qcantor::linalg::scalar::parse_rational;
use qcantor::randomness::{
    classical_to_quantum, universal_test, QmlTest, QuantumSigma1Set, SolovayTest, StrongSolovayTest,
};
use qcantor::states::{biased_qubit, ClassicalSequence, CoherentState, MeasureState};
use qcantor::{DensityMatrix, Error, Result, SpecialProjection};

/// Everything a run needs. Command-line flags override the matching fields.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSpec>,
    /// Second state for the cross-entropy statistic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<StateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test: Option<TestSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub machine: Option<MachineSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dictionary: Option<DictionarySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<LengthSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<CompressMode>,
    /// Single level (or item) to work on; all levels when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    /// Orders `δ` as rational strings.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub deltas: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub seed: u64,
}

/// A state on the qubit chain.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    /// The bit sequence repeating `pattern`.
    Bits { pattern: BitString },
    /// Bernoulli measure with `P(1) = p1`.
    Measure { p1: String },
    /// i.i.d. copies of `diag(1 − p1, p1)` or of an explicit one-qubit matrix.
    Iid {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p1: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        matrix: Option<MatrixDoc>,
    },
    Epr,
    Tracial,
    /// Explicit levels `ρ_0, …, ρ_D`, or a seeded random one.
    MatrixSequence {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        matrices: Option<Vec<MatrixDoc>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        random: Option<RandomSequence>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        perturb: Option<Perturbation>,
    },
    /// A named fixture: `rotated_iid` or `rotated_bits`.
    Fixture { name: String },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomSequence {
    pub depth: usize,
    #[serde(default = "default_rank")]
    pub max_rank: usize,
}

fn default_rank() -> usize {
    3
}

/// Replaces level `level` by `(1 − amount) ρ + amount · I/2^n`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Perturbation {
    pub level: usize,
    pub amount: String,
}

/// A randomness test.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TestSpec {
    /// A named fixture (`prefix`, `rotated_basis`, `epr`, `universal`) or
    /// explicit levels, each a list of projections `p_0, …, p_D`.
    Qml {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        fixture: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        levels: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        projections: Option<Vec<Vec<MatrixDoc>>>,
    },
    /// A classical test: level `r` is a list of clopen stages.
    Classical { levels: Vec<Vec<ClassicalStage>> },
    Solovay {
        projections: Vec<Vec<MatrixDoc>>,
        bound: String,
        #[serde(default = "default_threshold")]
        threshold: usize,
    },
    /// A named fixture (`rotated_solovay`) or explicit projections `p_r`.
    StrongSolovay {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        fixture: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        items: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        projections: Option<Vec<MatrixDoc>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bound: Option<String>,
        #[serde(default = "default_threshold")]
        threshold: usize,
    },
}

fn default_threshold() -> usize {
    1
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitSpec {
    pub n: usize,
    pub matrix: MatrixDoc,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineSpec {
    #[serde(default)]
    pub circuits: Vec<CircuitSpec>,
    #[serde(default)]
    pub default: DefaultCircuit,
}

/// Basis strings up to `max_length`, followed by extra vectors.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DictionarySpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_length: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra: Vec<serde_json::Value>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LengthSpec {
    Identity,
    TwiceCeilLog,
    Grid { values: BTreeMap<usize, usize> },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompressMode {
    /// Witness search for `QC_L^ε(ρ↾n | n)`.
    #[default]
    Qc,
    /// Incompressibility test built from a length bound.
    Part1,
    /// Compression through a strong Solovay test.
    Part2,
}

pub fn rational(text: &str) -> Result<BigRational> {
    parse_rational(text)
}

impl StateSpec {
    /// Builds the state with levels up to `depth` where the kind allows it.
    pub fn build(&self, depth: usize, seed: u64) -> Result<CoherentState> {
        Ok(match self {
            StateSpec::Bits { pattern } => {
                CoherentState::from_bits(ClassicalSequence::periodic(pattern, depth)?)
            }
            StateSpec::Measure { p1 } => {
                CoherentState::from_measure(MeasureState::bernoulli(rational(p1)?)?, depth)
            }
            StateSpec::Iid { p1, matrix } => {
                let sigma = match (p1, matrix) {
                    (Some(p1), None) => biased_qubit(&rational(p1)?)?,
                    (None, Some(m)) => DensityMatrix::new(m.parse()?)?,
                    _ => {
                        return Err(Error::InvalidParameter(
                            "iid state needs exactly one of p1 and matrix".into(),
                        ))
                    }
                };
                CoherentState::iid_state(sigma, depth)?
            }
            StateSpec::Epr => CoherentState::epr_chain(depth),
            StateSpec::Tracial => CoherentState::tracial(depth),
            StateSpec::MatrixSequence { matrices, random, perturb } => {
                let mut levels = match (matrices, random) {
                    (Some(ms), None) => ms.iter().map(MatrixDoc::parse).collect::<Result<Vec<_>>>()?,
                    (None, Some(spec)) => {
                        let state = fixtures::random_matrix_sequence(
                            &mut fixtures::rng(seed),
                            spec.depth,
                            spec.max_rank,
                        )?;
                        (0..=spec.depth)
                            .map(|n| Ok(state.level(n)?.matrix().clone()))
                            .collect::<Result<Vec<_>>>()?
                    }
                    _ => {
                        return Err(Error::InvalidParameter(
                            "matrix_sequence needs exactly one of matrices and random".into(),
                        ))
                    }
                };
                if let Some(p) = perturb {
                    let m = levels.get(p.level).ok_or(Error::DepthExceeded {
                        requested: p.level,
                        max: levels.len().saturating_sub(1),
                    })?;
                    let a = rational(&p.amount)?;
                    let mixed = DensityMatrix::maximally_mixed(m.n_qubits()).into_matrix();
                    let mixed = if m.is_exact() { mixed } else { mixed.to_float() };
                    let one = BigRational::from_integer(1.into());
                    levels[p.level] = m.scale(&(one - &a)).add(&mixed.scale(&a))?;
                }
                CoherentState::from_matrix_sequence(levels)?
            }
            StateSpec::Fixture { name } => match name.as_str() {
                "rotated_iid" => fixtures::strong_solovay_state(depth)?,
                "rotated_bits" => CoherentState::from_bits(fixtures::rotated_fixture_sequence(depth)),
                other => return Err(Error::InvalidParameter(format!("unknown state fixture {other:?}"))),
            },
        })
    }

    /// The underlying bit sequence, for states built from one.
    pub fn sequence(&self, depth: usize) -> Result<Option<ClassicalSequence>> {
        Ok(match self {
            StateSpec::Bits { pattern } => Some(ClassicalSequence::periodic(pattern, depth)?),
            StateSpec::Fixture { name } if name == "rotated_bits" => {
                Some(fixtures::rotated_fixture_sequence(depth))
            }
            _ => None,
        })
    }
}

/// A test ready to evaluate.
pub enum BuiltTest {
    Qml(QmlTest),
    Solovay { test: SolovayTest, threshold: usize },
    Strong { test: StrongSolovayTest, threshold: usize },
}

fn projection_levels(levels: &[Vec<MatrixDoc>]) -> Result<Vec<QuantumSigma1Set>> {
    levels
        .iter()
        .enumerate()
        .map(|(r, ps)| {
            let ps = ps
                .iter()
                .map(|m| SpecialProjection::new(m.parse()?))
                .collect::<Result<Vec<_>>>()?;
            Ok(QuantumSigma1Set::from_projections(ps)?.with_label(format!("level {r}")))
        })
        .collect()
}

fn non_empty<T>(items: &[T]) -> Result<()> {
    if items.is_empty() {
        return Err(Error::MalformedTest("the test has no levels".into()));
    }
    Ok(())
}

impl TestSpec {
    pub fn build(&self, depth: usize) -> Result<BuiltTest> {
        Ok(match self {
            TestSpec::Qml { fixture, levels, projections } => match (fixture, projections) {
                (Some(name), None) => {
                    let levels = levels.unwrap_or(7);
                    if levels == 0 {
                        return Err(Error::MalformedTest("the test has no levels".into()));
                    }
                    BuiltTest::Qml(qml_fixture(name, levels, depth)?)
                }
                (None, Some(ps)) => {
                    non_empty(ps)?;
                    BuiltTest::Qml(QmlTest::new("explicit", projection_levels(ps)?))
                }
                _ => {
                    return Err(Error::InvalidParameter(
                        "qml test needs exactly one of fixture and projections".into(),
                    ))
                }
            },
            TestSpec::Classical { levels } => {
                non_empty(levels)?;
                let levels = levels
                    .iter()
                    .map(|stages| {
                        let stages = stages
                            .iter()
                            .map(|s| ClassicalStage::new(s.k, s.strings.iter().cloned()))
                            .collect::<Result<Vec<_>>>()?;
                        Ok(ClassicalLevel::new(stages))
                    })
                    .collect::<Result<Vec<_>>>()?;
                BuiltTest::Qml(classical_to_quantum(levels, depth)?)
            }
            TestSpec::Solovay { projections, bound, threshold } => {
                non_empty(projections)?;
                BuiltTest::Solovay {
                    test: SolovayTest {
                        label: "explicit".into(),
                        levels: projection_levels(projections)?,
                        declared_mass_bound: rational(bound)?,
                    },
                    threshold: *threshold,
                }
            }
            TestSpec::StrongSolovay { fixture, items, projections, bound, threshold } => {
                let test = match (fixture, projections) {
                    (Some(name), None) if name == "rotated_solovay" => {
                        let items = items.unwrap_or(3);
                        if items == 0 {
                            return Err(Error::MalformedTest("the test has no items".into()));
                        }
                        fixtures::strong_solovay_test(items)?
                    }
                    (Some(name), None) => {
                        return Err(Error::InvalidParameter(format!("unknown test fixture {name:?}")))
                    }
                    (None, Some(ps)) => {
                        non_empty(ps)?;
                        let ps = ps
                            .iter()
                            .map(|m| SpecialProjection::new(m.parse()?))
                            .collect::<Result<Vec<_>>>()?;
                        let bound = rational(bound.as_deref().unwrap_or("1"))?;
                        StrongSolovayTest::new("explicit", ps, bound)?
                    }
                    _ => {
                        return Err(Error::InvalidParameter(
                            "strong_solovay test needs exactly one of fixture and projections".into(),
                        ))
                    }
                };
                BuiltTest::Strong { test, threshold: *threshold }
            }
        })
    }
}

/// Named quantum Martin-Löf tests.
pub fn qml_fixture(name: &str, levels: usize, depth: usize) -> Result<QmlTest> {
    Ok(match name {
        "prefix" => fixtures::prefix_test(levels, depth),
        "rotated_basis" => {
            fixtures::rotated_basis_test(&fixtures::rotated_fixture_sequence(depth), levels, depth)?
        }
        "epr" => fixtures::epr_test(levels, depth),
        "universal" => universal_test(fixtures::qml_tests(levels + depth + 1, depth), levels, depth),
        other => return Err(Error::InvalidParameter(format!("unknown test fixture {other:?}"))),
    })
}

impl MachineSpec {
    pub fn build(&self, max_depth: usize) -> Result<UnitaryMachine> {
        let circuits = self
            .circuits
            .iter()
            .map(|c| Ok((c.n, c.matrix.parse()?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        UnitaryMachine::new("configured", max_depth, circuits, self.default)
    }
}

impl DictionarySpec {
    pub fn build(&self, default_length: usize) -> Result<StateDictionary> {
        let base = StateDictionary::basis_strings(self.max_length.unwrap_or(default_length));
        let extra = self.extra.iter().map(ket_from_json).collect::<Result<Vec<_>>>()?;
        base.extended(extra)
    }
}

impl LengthSpec {
    pub fn build(&self) -> LengthFunction {
        match self {
            LengthSpec::Identity => LengthFunction::Identity,
            LengthSpec::TwiceCeilLog => LengthFunction::TwiceCeilLog,
            LengthSpec::Grid { values } => LengthFunction::Grid(values.clone()),
        }
    }
}
