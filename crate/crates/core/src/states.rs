//! States of the infinite qubit chain, represented by depth-bounded coherent
//! sequences of density matrices `ρ_0, ρ_1, …` with `T(ρ_{n+1}) = ρ_n`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::{BigRational, One, Signed, Zero};
use once_cell::sync::OnceCell;
use serde::Serialize;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::linalg::scalar::GaussianRational;
use crate::linalg::{Backend, ComplexMatrix, DensityMatrix, Real, TOL_EIG};

/// An infinite bit sequence `Z`, known up to `max_depth` bits.
#[derive(Clone)]
pub struct ClassicalSequence {
    label: String,
    max_depth: usize,
    bit: Arc<dyn Fn(usize) -> bool + Send + Sync>,
}

impl fmt::Debug for ClassicalSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClassicalSequence")
            .field("label", &self.label)
            .field("max_depth", &self.max_depth)
            .finish()
    }
}

impl ClassicalSequence {
    pub fn from_fn(
        label: impl Into<String>,
        max_depth: usize,
        bit: impl Fn(usize) -> bool + Send + Sync + 'static,
    ) -> Self {
        Self { label: label.into(), max_depth, bit: Arc::new(bit) }
    }

    /// `bbb…`.
    pub fn constant(bit: bool, max_depth: usize) -> Self {
        Self::from_fn(format!("{}^inf", bit as u8), max_depth, move |_| bit)
    }

    /// The pattern repeated forever.
    pub fn periodic(pattern: &BitString, max_depth: usize) -> Result<Self> {
        if pattern.is_empty() {
            return Err(Error::InvalidParameter("periodic pattern must be nonempty".into()));
        }
        let bits = pattern.bits().to_vec();
        let len = bits.len();
        Ok(Self::from_fn(format!("({pattern})^inf"), max_depth, move |i| bits[i % len]))
    }

    /// A finite prefix used as a sequence up to its length.
    pub fn from_prefix(prefix: &BitString) -> Self {
        let bits = prefix.bits().to_vec();
        Self::from_fn(prefix.to_string(), bits.len(), move |i| bits[i])
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    pub fn bit(&self, i: usize) -> Result<bool> {
        if i >= self.max_depth {
            return Err(Error::DepthExceeded { requested: i + 1, max: self.max_depth });
        }
        Ok((self.bit)(i))
    }

    /// `Z↾n`.
    pub fn prefix(&self, n: usize) -> Result<BitString> {
        if n > self.max_depth {
            return Err(Error::DepthExceeded { requested: n, max: self.max_depth });
        }
        Ok(BitString::new((0..n).map(|i| (self.bit)(i)).collect()))
    }
}

type PrefixProb = Arc<dyn Fn(&BitString) -> Option<BigRational> + Send + Sync>;

/// A probability measure on Cantor space given by its values on cylinders.
#[derive(Clone)]
pub struct MeasureState {
    label: String,
    prob: PrefixProb,
}

impl fmt::Debug for MeasureState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeasureState").field("label", &self.label).finish()
    }
}

impl MeasureState {
    /// `prob(σ)` is the measure of the cylinder `⟦σ⟧`; `None` means the
    /// measure is not defined that deep.
    pub fn from_fn(
        label: impl Into<String>,
        prob: impl Fn(&BitString) -> Option<BigRational> + Send + Sync + 'static,
    ) -> Self {
        Self { label: label.into(), prob: Arc::new(prob) }
    }

    /// The fair-coin measure, `2^{-|σ|}`.
    pub fn uniform() -> Self {
        Self::from_fn("uniform", |s| {
            Some(BigRational::new(1.into(), num::BigInt::one() << s.len()))
        })
    }

    /// Independent bits, each equal to 1 with probability `p1`.
    pub fn bernoulli(p1: BigRational) -> Result<Self> {
        if p1.is_negative() || p1 > BigRational::one() {
            return Err(Error::InvalidParameter(format!("bias {p1} is outside [0,1]")));
        }
        let p0 = BigRational::one() - &p1;
        Ok(Self::from_fn(format!("bernoulli({p1})"), move |s| {
            let ones = s.count_ones() as i32;
            let zeros = s.len() as i32 - ones;
            Some(num::pow::Pow::pow(&p1, ones) * num::pow::Pow::pow(&p0, zeros))
        }))
    }

    /// The point mass on `Z`.
    pub fn dirac(z: ClassicalSequence) -> Self {
        let label = format!("dirac({})", z.label());
        Self::from_fn(label, move |s| {
            let prefix = z.prefix(s.len()).ok()?;
            Some(if &prefix == s { BigRational::one() } else { BigRational::zero() })
        })
    }

    /// An explicit table of cylinder measures; strings missing from the
    /// table are undefined.
    pub fn table(entries: BTreeMap<BitString, BigRational>) -> Self {
        Self::from_fn("table", move |s| {
            if s.is_empty() && !entries.contains_key(s) {
                return Some(BigRational::one());
            }
            entries.get(s).cloned()
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn prefix_prob(&self, sigma: &BitString) -> Result<BigRational> {
        (self.prob)(sigma).ok_or_else(|| Error::MeasureInvariant {
            at: sigma.to_string(),
            detail: "measure undefined on this cylinder".into(),
        })
    }

    /// Cylinder measures of every string of length `n`, in index order,
    /// after checking the additivity condition against length `n − 1`.
    pub fn level_probs(&self, n: usize) -> Result<Vec<BigRational>> {
        let probs: Vec<BigRational> =
            BitString::all(n).map(|s| self.prefix_prob(&s)).collect::<Result<_>>()?;
        for (i, p) in probs.iter().enumerate() {
            if p.is_negative() || p > &BigRational::one() {
                return Err(Error::MeasureInvariant {
                    at: BitString::from_index(i, n).to_string(),
                    detail: format!("value {p} is outside [0,1]"),
                });
            }
        }
        if n == 0 {
            if !probs[0].is_one() {
                return Err(Error::MeasureInvariant {
                    at: "empty string".into(),
                    detail: format!("total mass is {}", probs[0]),
                });
            }
            return Ok(probs);
        }
        let half = probs.len() / 2;
        for i in 0..half {
            let parent = BitString::from_index(i, n - 1);
            let expected = self.prefix_prob(&parent)?;
            let got = &probs[i] + &probs[i + half];
            if got != expected {
                return Err(Error::MeasureInvariant {
                    at: parent.to_string(),
                    detail: format!("children sum to {got}, parent has {expected}"),
                });
            }
        }
        Ok(probs)
    }
}

type Generator = Arc<dyn Fn(usize) -> Result<DensityMatrix> + Send + Sync>;

#[derive(Clone)]
enum Source {
    Bits(ClassicalSequence),
    Measure(MeasureState),
    Iid(DensityMatrix),
    Epr,
    Sequence(Arc<Vec<DensityMatrix>>),
    Custom(Generator),
}

/// A state of the qubit chain, presented by its restrictions `ρ↾n` for
/// `n ≤ max_depth`. Restrictions are computed on demand and memoized.
#[derive(Clone)]
pub struct CoherentState {
    label: String,
    max_depth: usize,
    source: Source,
    levels: Arc<Vec<OnceCell<DensityMatrix>>>,
}

impl fmt::Debug for CoherentState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoherentState")
            .field("label", &self.label)
            .field("max_depth", &self.max_depth)
            .finish()
    }
}

/// The EPR density matrix `β = |ψ⟩⟨ψ|` with `ψ = (|00⟩ + |11⟩)/√2`.
pub fn epr_pair() -> DensityMatrix {
    let h = GaussianRational::ratio(1, 2);
    let m = ComplexMatrix::from_exact_triplets(
        2,
        vec![(0, 0, h.clone()), (0, 3, h.clone()), (3, 0, h.clone()), (3, 3, h)],
    )
    .expect("indices in range");
    DensityMatrix::new(m).expect("β is a density matrix")
}

impl CoherentState {
    fn with_source(label: impl Into<String>, max_depth: usize, source: Source) -> Self {
        let levels = Arc::new((0..=max_depth).map(|_| OnceCell::new()).collect());
        Self { label: label.into(), max_depth, source, levels }
    }

    /// `ρ↾n = |Z↾n⟩⟨Z↾n|`.
    pub fn from_bits(z: ClassicalSequence) -> Self {
        let depth = z.max_depth();
        Self::with_source(format!("bits:{}", z.label()), depth, Source::Bits(z))
    }

    /// Diagonal restrictions carrying the cylinder measures.
    pub fn from_measure(mu: MeasureState, max_depth: usize) -> Self {
        Self::with_source(format!("measure:{}", mu.label()), max_depth, Source::Measure(mu))
    }

    /// `ρ↾n = σ^{⊗n}` for a one-qubit density matrix `σ`.
    pub fn iid_state(sigma: DensityMatrix, max_depth: usize) -> Result<Self> {
        if sigma.n_qubits() != 1 {
            return Err(Error::DimensionMismatch { left: 1, right: sigma.n_qubits() });
        }
        Ok(Self::with_source("iid", max_depth, Source::Iid(sigma)))
    }

    /// The tracial state, `ρ↾n = 2^{-n} I`.
    pub fn tracial(max_depth: usize) -> Self {
        let mut s = Self::iid_state(DensityMatrix::maximally_mixed(1), max_depth)
            .expect("one-qubit state");
        s.label = "tracial".into();
        s
    }

    /// `ρ_{2n} = β^{⊗n}` and `ρ_{2n+1} = ρ_{2n} ⊗ I/2`.
    pub fn epr_chain(max_depth: usize) -> Self {
        Self::with_source("epr", max_depth, Source::Epr)
    }

    /// An explicit list `ρ_0, …, ρ_D`; each entry is validated as a density
    /// matrix on the right number of qubits. Coherence is not enforced here;
    /// [`check_coherence`] reports it.
    pub fn from_matrix_sequence(matrices: Vec<ComplexMatrix>) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::InvalidParameter("matrix sequence is empty".into()));
        }
        let mut out = Vec::with_capacity(matrices.len());
        for (n, m) in matrices.into_iter().enumerate() {
            if m.n_qubits() != n {
                return Err(Error::DimensionMismatch { left: n, right: m.n_qubits() });
            }
            out.push(DensityMatrix::new(m)?);
        }
        let depth = out.len() - 1;
        Ok(Self::with_source("matrix_sequence", depth, Source::Sequence(Arc::new(out))))
    }

    /// A state given by an arbitrary generator `n ↦ ρ↾n`.
    pub fn from_generator(
        label: impl Into<String>,
        max_depth: usize,
        generator: impl Fn(usize) -> Result<DensityMatrix> + Send + Sync + 'static,
    ) -> Self {
        Self::with_source(label, max_depth, Source::Custom(Arc::new(generator)))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    /// `ρ↾n`.
    pub fn level(&self, n: usize) -> Result<&DensityMatrix> {
        if n > self.max_depth {
            return Err(Error::DepthExceeded { requested: n, max: self.max_depth });
        }
        self.levels[n].get_or_try_init(|| self.compute(n))
    }

    fn compute(&self, n: usize) -> Result<DensityMatrix> {
        match &self.source {
            Source::Bits(z) => Ok(DensityMatrix::basis(&z.prefix(n)?)),
            Source::Measure(mu) => {
                let diag = mu.level_probs(n)?.into_iter().map(GaussianRational::real).collect();
                DensityMatrix::new(ComplexMatrix::from_exact_diagonal(n, diag)?)
            }
            Source::Iid(sigma) => {
                if n == 0 {
                    return Ok(scalar_one(sigma.backend()));
                }
                self.level(n - 1)?.tensor(sigma)
            }
            Source::Epr => match n {
                0 => Ok(scalar_one(Backend::Exact)),
                _ if n.is_multiple_of(2) => self.level(n - 2)?.tensor(&epr_pair()),
                _ => self.level(n - 1)?.tensor(&DensityMatrix::maximally_mixed(1)),
            },
            Source::Sequence(seq) => Ok(seq[n].clone()),
            Source::Custom(g) => {
                let rho = g(n)?;
                if rho.n_qubits() != n {
                    return Err(Error::DimensionMismatch { left: n, right: rho.n_qubits() });
                }
                Ok(rho)
            }
        }
    }

    /// `ρ(X) = Tr(ρ↾n X)` for a Hermitian `X` on `n` qubits.
    pub fn evaluate(&self, x: &ComplexMatrix) -> Result<Real> {
        let deviation = x.hermitian_deviation();
        if deviation > TOL_EIG {
            return Err(Error::NotHermitian { deviation });
        }
        self.level(x.n_qubits())?.evaluate(x)
    }
}

fn scalar_one(backend: Backend) -> DensityMatrix {
    DensityMatrix::trusted(ComplexMatrix::identity(0, backend))
}

/// `evaluate(ρ, p) = Tr(ρ↾n p)`.
pub fn evaluate(rho: &CoherentState, p: &ComplexMatrix) -> Result<Real> {
    rho.evaluate(p)
}

/// Deviation `‖T(ρ_{n+1}) − ρ_n‖_∞` at one level.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoherenceLevel {
    pub n: usize,
    pub deviation: f64,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoherenceReport {
    pub label: String,
    pub depth: usize,
    /// Whether `ρ_0` is the `1 × 1` matrix `[1]`.
    pub root_is_unit: bool,
    pub levels: Vec<CoherenceLevel>,
    pub max_deviation: f64,
}

impl CoherenceReport {
    /// Exact levels must match exactly; float levels within [`TOL_EIG`].
    pub fn holds(&self) -> bool {
        self.root_is_unit
            && self.levels.iter().all(|l| if l.exact { l.deviation == 0.0 } else { l.deviation <= TOL_EIG })
    }

    /// The first level whose coherence identity fails.
    pub fn first_violation(&self) -> Option<usize> {
        self.levels
            .iter()
            .find(|l| if l.exact { l.deviation != 0.0 } else { l.deviation > TOL_EIG })
            .map(|l| l.n)
    }
}

/// Checks `T(ρ_{n+1}) = ρ_n` for every `n < depth`.
pub fn check_coherence(rho: &CoherentState, depth: usize) -> Result<CoherenceReport> {
    if depth > rho.max_depth() {
        return Err(Error::DepthExceeded { requested: depth, max: rho.max_depth() });
    }
    let root = rho.level(0)?.matrix();
    let root_is_unit = match root.trace_real() {
        Real::Exact(t) => t.is_one(),
        Real::Approx(t) => (t - 1.0).abs() <= TOL_EIG,
    };
    let mut levels = Vec::with_capacity(depth);
    for n in 0..depth {
        let lower = rho.level(n)?.matrix();
        let traced = rho.level(n + 1)?.matrix().partial_trace()?;
        let exact = lower.is_exact() && traced.is_exact();
        levels.push(CoherenceLevel { n, deviation: traced.max_abs_diff(lower)?, exact });
    }
    let max_deviation = levels.iter().map(|l| l.deviation).fold(0.0, f64::max);
    Ok(CoherenceReport { label: rho.label().to_string(), depth, root_is_unit, levels, max_deviation })
}

/// `diag(1 − p1, p1)`, the one-qubit state of a biased coin.
pub fn biased_qubit(p1: &BigRational) -> Result<DensityMatrix> {
    let p0 = BigRational::one() - p1;
    let m = ComplexMatrix::from_exact_diagonal(
        1,
        vec![GaussianRational::real(p0), GaussianRational::real(p1.clone())],
    )?;
    DensityMatrix::new(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::scalar::rational;

    fn diag(n: usize, entries: &[(i64, i64)]) -> ComplexMatrix {
        ComplexMatrix::from_exact_diagonal(
            n,
            entries.iter().map(|&(a, b)| GaussianRational::ratio(a, b)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn from_bits_examples() {
        let zeros = CoherentState::from_bits(ClassicalSequence::constant(false, 8));
        let m = zeros.level(2).unwrap().matrix();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.exact_entry(0, 0).unwrap(), GaussianRational::ratio(1, 1));

        let ones = CoherentState::from_bits(ClassicalSequence::constant(true, 8));
        assert_eq!(ones.level(1).unwrap(), &DensityMatrix::basis(&"1".parse().unwrap()));

        let z = ClassicalSequence::from_prefix(&"10".parse().unwrap());
        let m = CoherentState::from_bits(z).level(2).unwrap().matrix().clone();
        assert_eq!(m.exact_entry(1, 1).unwrap(), GaussianRational::ratio(1, 1));
    }

    #[test]
    fn from_measure_examples() {
        let tr = CoherentState::from_measure(MeasureState::uniform(), 6);
        assert_eq!(tr.level(3).unwrap().matrix(), DensityMatrix::maximally_mixed(3).matrix());

        let z = ClassicalSequence::periodic(&"011".parse().unwrap(), 8).unwrap();
        let dirac = CoherentState::from_measure(MeasureState::dirac(z.clone()), 8);
        let bits = CoherentState::from_bits(z);
        for n in 0..=8 {
            assert_eq!(dirac.level(n).unwrap(), bits.level(n).unwrap());
        }

        let b = CoherentState::from_measure(MeasureState::bernoulli(rational(1, 3)).unwrap(), 4);
        assert_eq!(b.level(2).unwrap().matrix(), &diag(2, &[(4, 9), (2, 9), (2, 9), (1, 9)]));
    }

    #[test]
    fn from_measure_rejects_non_additive_tables() {
        let mut table = BTreeMap::new();
        table.insert("0".parse().unwrap(), rational(1, 2));
        table.insert("1".parse().unwrap(), rational(1, 3));
        let s = CoherentState::from_measure(MeasureState::table(table), 1);
        assert!(matches!(s.level(1), Err(Error::MeasureInvariant { .. })));
        assert!(s.level(0).is_ok());
    }

    #[test]
    fn iid_examples() {
        let t = CoherentState::iid_state(DensityMatrix::maximally_mixed(1), 4).unwrap();
        assert_eq!(t.level(4).unwrap(), &DensityMatrix::maximally_mixed(4));
        let z = CoherentState::iid_state(DensityMatrix::basis(&"0".parse().unwrap()), 4).unwrap();
        assert_eq!(z.level(3).unwrap(), &DensityMatrix::basis(&BitString::zeros(3)));
        let s = CoherentState::iid_state(biased_qubit(&rational(2, 3)).unwrap(), 4).unwrap();
        assert_eq!(s.level(2).unwrap().matrix(), &diag(2, &[(1, 9), (2, 9), (2, 9), (4, 9)]));
    }

    #[test]
    fn epr_chain_examples() {
        let e = CoherentState::epr_chain(6);
        assert_eq!(e.level(2).unwrap(), &epr_pair());
        let l3 = e.level(3).unwrap();
        assert_eq!(l3, &epr_pair().tensor(&DensityMatrix::maximally_mixed(1)).unwrap());
        assert_eq!(l3.purity(), Real::Exact(rational(1, 2)));
        assert_eq!(e.level(2).unwrap().purity(), Real::Exact(rational(1, 1)));
        assert_eq!(e.level(1).unwrap(), &DensityMatrix::maximally_mixed(1));
        let r = check_coherence(&e, 6).unwrap();
        assert!(r.holds());
        assert_eq!(r.max_deviation, 0.0);
    }

    #[test]
    fn evaluate_examples() {
        let z = ClassicalSequence::periodic(&"01".parse().unwrap(), 8).unwrap();
        let s = CoherentState::from_bits(z.clone());
        let p = ComplexMatrix::basis_projector(&z.prefix(5).unwrap());
        assert_eq!(s.evaluate(&p).unwrap(), Real::Exact(rational(1, 1)));

        // projection onto qubit 0 being |1⟩ among two qubits
        let s20 = diag(2, &[(0, 1), (1, 1), (0, 1), (1, 1)]);
        let e = CoherentState::epr_chain(4);
        assert_eq!(e.evaluate(&s20).unwrap(), Real::Exact(rational(1, 2)));

        let t = CoherentState::tracial(4);
        assert_eq!(t.evaluate(&s20).unwrap(), s20.tracial_value());
        assert!(matches!(
            t.evaluate(&ComplexMatrix::identity(5, Backend::Exact)),
            Err(Error::DepthExceeded { .. })
        ));
    }

    #[test]
    fn corrupted_sequence_is_flagged_at_its_level() {
        let t = CoherentState::tracial(5);
        let mut matrices: Vec<ComplexMatrix> =
            (0..=5).map(|n| t.level(n).unwrap().matrix().to_float()).collect();
        let bump = ComplexMatrix::from_float_diagonal(
            3,
            (0..8)
                .map(|i| match i {
                    0 => 1e-3,
                    1 => -1e-3,
                    _ => 0.0,
                })
                .map(|x| crate::linalg::Complex64::new(x, 0.0))
                .collect(),
        )
        .unwrap();
        matrices[3] = matrices[3].add(&bump).unwrap();
        let s = CoherentState::from_matrix_sequence(matrices).unwrap();
        let r = check_coherence(&s, 5).unwrap();
        assert!(!r.holds());
        assert!((r.max_deviation - 1e-3).abs() < 1e-12);
        assert_eq!(r.first_violation(), Some(2));
    }
}
