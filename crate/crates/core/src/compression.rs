//! Unitary machines, circuit-based quantum Kolmogorov complexity, and the
//! two constructions relating it to randomness tests: a test from a length
//! bound (incompressibility) and a compressor from a strong Solovay test.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num::{BigRational, One};
use once_cell::sync::OnceCell;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::linalg::scalar::{pow2_neg, Complex64, GaussianRational, Scalar};
use crate::linalg::spectral::hermitian_eigen;
use crate::linalg::{
    projection_join, state_project, trace_distance, Backend, ComplexMatrix, DensityMatrix, Ket,
    Real, SpecialProjection, TraceDistanceMode, TOL_EIG,
};
use crate::randomness::{QmlTest, QuantumSigma1Set, StrongSolovayTest};
use crate::states::CoherentState;

/// Circuit used at lengths without an explicit one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DefaultCircuit {
    #[default]
    Identity,
    /// Qubit `j` is swapped with qubit `n − 1 − j`.
    BitReversal,
}

/// A sequence of unitaries `L_n ∈ M_n`, known for `n ≤ max_depth`.
#[derive(Clone)]
pub struct UnitaryMachine {
    label: String,
    max_depth: usize,
    circuits: Arc<BTreeMap<usize, ComplexMatrix>>,
    default: DefaultCircuit,
    cache: Arc<Vec<OnceCell<ComplexMatrix>>>,
}

impl fmt::Debug for UnitaryMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UnitaryMachine")
            .field("label", &self.label)
            .field("max_depth", &self.max_depth)
            .field("explicit", &self.circuits.keys().collect::<Vec<_>>())
            .field("default", &self.default)
            .finish()
    }
}

/// `max |(L L† − I)_ij|`.
pub fn unitarity_deviation(l: &ComplexMatrix) -> f64 {
    let product = l.mul(&l.adjoint()).expect("same size");
    product.max_abs_diff(&ComplexMatrix::identity(l.n_qubits(), l.backend())).expect("same size")
}

fn bit_reversal(n: usize) -> ComplexMatrix {
    let triplets = (0..1usize << n)
        .map(|i| {
            let bits = BitString::from_index(i, n);
            let reversed: BitString = BitString::new(bits.bits().iter().rev().copied().collect());
            (reversed.index(), i, GaussianRational::one())
        })
        .collect();
    ComplexMatrix::from_exact_triplets(n, triplets).expect("permutation indices in range")
}

impl UnitaryMachine {
    /// Explicit circuits are checked for unitarity: exactly on the exact
    /// backend, within [`TOL_EIG`] otherwise.
    pub fn new(
        label: impl Into<String>,
        max_depth: usize,
        circuits: BTreeMap<usize, ComplexMatrix>,
        default: DefaultCircuit,
    ) -> Result<Self> {
        for (&n, l) in &circuits {
            if l.n_qubits() != n {
                return Err(Error::DimensionMismatch { left: n, right: l.n_qubits() });
            }
            let deviation = unitarity_deviation(l);
            let tol = if l.is_exact() { 0.0 } else { TOL_EIG };
            if deviation > tol {
                return Err(Error::NotUnitary { deviation });
            }
        }
        let cache = Arc::new((0..=max_depth).map(|_| OnceCell::new()).collect());
        Ok(Self { label: label.into(), max_depth, circuits: Arc::new(circuits), default, cache })
    }

    pub fn identity(max_depth: usize) -> Self {
        Self::new("identity", max_depth, BTreeMap::new(), DefaultCircuit::Identity)
            .expect("no explicit circuits")
    }

    pub fn bit_reversal(max_depth: usize) -> Self {
        Self::new("bit_reversal", max_depth, BTreeMap::new(), DefaultCircuit::BitReversal)
            .expect("no explicit circuits")
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    /// `L_n`.
    pub fn circuit(&self, n: usize) -> Result<&ComplexMatrix> {
        if n > self.max_depth {
            return Err(Error::DepthExceeded { requested: n, max: self.max_depth });
        }
        Ok(self.cache[n].get_or_init(|| match self.circuits.get(&n) {
            Some(l) => l.clone(),
            None => match self.default {
                DefaultCircuit::Identity => ComplexMatrix::identity(n, Backend::Exact),
                DefaultCircuit::BitReversal => bit_reversal(n),
            },
        }))
    }

    /// `L_n (y ⊗ |0…0⟩)` for a vector `y` on at most `n` qubits.
    pub fn apply_to_ket(&self, y: &Ket, n: usize) -> Result<Ket> {
        y.pad_zeros(n)?.apply(self.circuit(n)?)
    }
}

/// `L_n (y ⊗ |0^{n−k}⟩⟨0^{n−k}|) L_n†` for `y` on `k ≤ n` qubits.
pub fn run_machine(l: &UnitaryMachine, y: &DensityMatrix, n: usize) -> Result<DensityMatrix> {
    let k = y.n_qubits();
    if k > n {
        return Err(Error::DimensionMismatch { left: k, right: n });
    }
    let circuit = l.circuit(n)?;
    let padded = y.tensor(&DensityMatrix::basis(&BitString::zeros(n - k)))?;
    let (lm, pm) = if circuit.backend() == padded.backend() {
        (circuit.clone(), padded.into_matrix())
    } else {
        (circuit.to_float(), padded.into_matrix().to_float())
    };
    let out = lm.mul(&pm)?.mul(&lm.adjoint())?;
    Ok(DensityMatrix::trusted(out))
}

/// The listing `σ_0, σ_1, …` of pure states used as compression inputs.
#[derive(Clone, Debug)]
pub struct StateDictionary {
    items: Vec<Ket>,
}

impl StateDictionary {
    /// All basis strings of length at most `max_len` in length-lexicographic
    /// order: the empty string, `0`, `1`, `00`, `01`, ….
    pub fn basis_strings(max_len: usize) -> Self {
        let items = (0..=max_len)
            .flat_map(|len| {
                (0..1usize << len).map(move |i| {
                    // lexicographic order reads the string left to right
                    let bits: Vec<bool> = (0..len).map(|j| (i >> (len - 1 - j)) & 1 == 1).collect();
                    Ket::basis(&BitString::new(bits))
                })
            })
            .collect();
        Self { items }
    }

    /// Validates `ℓ(σ_i) ≤ i` and unit norm for every item.
    pub fn from_items(items: Vec<Ket>) -> Result<Self> {
        for (i, v) in items.iter().enumerate() {
            if v.n_qubits() > i {
                return Err(Error::InvalidParameter(format!(
                    "dictionary item {i} has length {} > {i}",
                    v.n_qubits()
                )));
            }
            let norm = v.norm_sqr();
            let unit = match &norm {
                Real::Exact(q) => q.is_one(),
                Real::Approx(x) => (x - 1.0).abs() <= TOL_EIG,
            };
            if !unit {
                return Err(Error::InvalidParameter(format!(
                    "dictionary item {i} has squared norm {norm}"
                )));
            }
        }
        Ok(Self { items })
    }

    /// The default listing followed by extra vectors.
    pub fn extended(self, extra: Vec<Ket>) -> Result<Self> {
        let mut items = self.items;
        items.extend(extra);
        Self::from_items(items)
    }

    pub fn items(&self) -> &[Ket] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// `(i, σ_i)` for `i ≤ t` and `ℓ(σ_i) = len`.
    pub fn of_length(&self, len: usize, t: usize) -> impl Iterator<Item = (usize, &Ket)> {
        self.items.iter().enumerate().take(t.saturating_add(1)).filter(move |(_, v)| v.n_qubits() == len)
    }

    /// Largest index whose item has length at most `len`, if any item does.
    pub fn last_index_up_to_length(&self, len: usize) -> Option<usize> {
        self.items.iter().rposition(|v| v.n_qubits() <= len)
    }
}

/// Where a compression witness came from.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "index", rename_all = "snake_case")]
pub enum WitnessSource {
    Dictionary(usize),
    Extra(usize),
    /// `L_n† x L_n` at full length.
    Inverse,
    /// Extracted from the range of a test projection.
    TestRange,
}

/// `QC_L^ε(x | n) ≤ k`, witnessed by `y` with `D(x, L(y ⊗ 0; n)) = achieved_distance`.
#[derive(Clone, Debug, Serialize)]
pub struct CompressionRecord {
    pub n: usize,
    pub k: usize,
    #[serde(skip)]
    pub witness: DensityMatrix,
    pub source: WitnessSource,
    pub achieved_distance: f64,
    /// The `ε` the distance is strictly below.
    pub accuracy: f64,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!("ε = {epsilon} must lie in (0,1)")));
    }
    Ok(())
}

/// Least `k` such that a dictionary state or extra witness of length `k`
/// lands strictly within `ε` of `x`. The search is witness-bounded, so the
/// result is an upper bound on the true complexity. At `k = n` the witness
/// `L_n† x L_n` always succeeds.
pub fn qc_complexity(
    l: &UnitaryMachine,
    x: &DensityMatrix,
    epsilon: f64,
    dict: &StateDictionary,
    extra: &[DensityMatrix],
) -> Result<CompressionRecord> {
    check_epsilon(epsilon)?;
    let n = x.n_qubits();
    if n > l.max_depth() {
        return Err(Error::DepthExceeded { requested: n, max: l.max_depth() });
    }
    let mode = TraceDistanceMode::Standard;
    for k in 0..=n {
        let mut candidates: Vec<(WitnessSource, DensityMatrix)> = Vec::new();
        for (i, v) in dict.items().iter().enumerate().filter(|(_, v)| v.n_qubits() == k) {
            candidates.push((WitnessSource::Dictionary(i), DensityMatrix::from_ket(v)?));
        }
        for (i, y) in extra.iter().enumerate().filter(|(_, y)| y.n_qubits() == k) {
            candidates.push((WitnessSource::Extra(i), y.clone()));
        }
        if k == n {
            let lm = l.circuit(n)?;
            let (lm, xm) = if lm.backend() == x.backend() {
                (lm.clone(), x.matrix().clone())
            } else {
                (lm.to_float(), x.matrix().to_float())
            };
            let back = lm.adjoint().mul(&xm)?.mul(&lm)?;
            candidates.push((WitnessSource::Inverse, DensityMatrix::trusted(back)));
        }
        for (source, y) in candidates {
            let d = trace_distance(x, &run_machine(l, &y, n)?, mode)?;
            if d < epsilon {
                return Ok(CompressionRecord {
                    n,
                    k,
                    witness: y,
                    source,
                    achieved_distance: d,
                    accuracy: epsilon,
                });
            }
        }
    }
    Err(Error::NoWitness { n })
}

/// A length bound `f: ℕ → ℕ`.
#[derive(Clone)]
pub enum LengthFunction {
    /// `f(n) = n`.
    Identity,
    /// `f(n) = 2⌈log₂(n + 2)⌉`.
    TwiceCeilLog,
    /// Explicit values, `f(m) = m` elsewhere.
    Grid(BTreeMap<usize, usize>),
    Custom(Arc<dyn Fn(usize) -> usize + Send + Sync>),
}

impl fmt::Debug for LengthFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LengthFunction::Identity => write!(f, "Identity"),
            LengthFunction::TwiceCeilLog => write!(f, "TwiceCeilLog"),
            LengthFunction::Grid(g) => f.debug_tuple("Grid").field(g).finish(),
            LengthFunction::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// `⌈log₂ m⌉` for `m ≥ 1`.
pub fn ceil_log2(m: usize) -> usize {
    assert!(m >= 1);
    (usize::BITS - (m - 1).leading_zeros()) as usize
}

impl LengthFunction {
    pub fn eval(&self, n: usize) -> usize {
        match self {
            LengthFunction::Identity => n,
            LengthFunction::TwiceCeilLog => 2 * ceil_log2(n + 2),
            LengthFunction::Grid(g) => g.get(&n).copied().unwrap_or(n),
            LengthFunction::Custom(f) => f(n),
        }
    }

    /// `Σ_{n ∈ range} 2^{-f(n)}`, exactly.
    pub fn mass(&self, range: impl IntoIterator<Item = usize>) -> BigRational {
        range.into_iter().map(|n| pow2_neg(self.eval(n) as u32)).sum()
    }
}

/// `p_{r,t}` together with the per-length pieces it is joined from.
#[derive(Clone, Debug)]
pub struct Part1Projection {
    pub r: usize,
    pub t: usize,
    /// Lives on `depth` qubits.
    pub projection: SpecialProjection,
    /// `(n, rank p_{r,t}(n))` for each length with nonempty `S_{r,t}(n)`.
    pub pieces: Vec<(usize, usize)>,
}

/// `S_{r,t}(n)`: dictionary states `x = σ_i` (`i ≤ t`, `ℓ(x) = n`) that the
/// machine outputs on some `y = σ_k` (`k ≤ t`, `ℓ(y) ≤ n − f(n) − r`) padded
/// with zeros.
pub fn part1_strings<'a>(
    l: &UnitaryMachine,
    f: &LengthFunction,
    dict: &'a StateDictionary,
    r: usize,
    t: usize,
    n: usize,
) -> Result<Vec<&'a Ket>> {
    let Some(max_input) = n.checked_sub(f.eval(n) + r) else {
        return Ok(Vec::new());
    };
    let outputs: Vec<Ket> = (0..=max_input)
        .flat_map(|len| dict.of_length(len, t))
        .map(|(_, y)| l.apply_to_ket(y, n))
        .collect::<Result<_>>()?;
    Ok(dict
        .of_length(n, t)
        .filter(|(_, x)| outputs.iter().any(|o| o.same_ray(x, TOL_EIG)))
        .map(|(_, x)| x)
        .collect())
}

/// `p_{r,t} = sup_{n ≤ min(t, depth)} p_{r,t}(n)`, placed in `M_depth`.
///
/// Requires `Σ 2^{-f(n)} ≤ 1/4` over the lengths `n ≤ depth` where
/// `S_{r,t}(n)` can be nonempty (`n ≥ f(n) + r`).
pub fn build_part1_test(
    l: &UnitaryMachine,
    f: &LengthFunction,
    dict: &StateDictionary,
    r: usize,
    t: usize,
    depth: usize,
) -> Result<Part1Projection> {
    if depth > l.max_depth() {
        return Err(Error::DepthExceeded { requested: depth, max: l.max_depth() });
    }
    let active: Vec<usize> = (0..=depth.min(t)).filter(|&n| n >= f.eval(n) + r).collect();
    let mass = f.mass(active.iter().copied());
    if mass > BigRational::new(1.into(), 4.into()) {
        return Err(Error::MassBoundViolated(format!(
            "Σ 2^(-f(n)) = {mass} over lengths {active:?} exceeds 1/4"
        )));
    }
    let mut projection = SpecialProjection::zero(depth);
    let mut pieces = Vec::new();
    for &n in &active {
        let strings = part1_strings(l, f, dict, r, t, n)?;
        if strings.is_empty() {
            continue;
        }
        let owned: Vec<Ket> = strings.into_iter().cloned().collect();
        let exact = owned.iter().all(|k| k.backend() == Backend::Exact);
        let owned = if exact { owned } else { owned.iter().map(Ket::to_float).collect() };
        let piece = SpecialProjection::onto_span(n, &owned)?;
        let bound = 1usize << (n - f.eval(n) - r);
        if piece.rank() > bound {
            return Err(Error::MassBoundViolated(format!(
                "rank {} at length {n} exceeds 2^{}",
                piece.rank(),
                n - f.eval(n) - r
            )));
        }
        pieces.push((n, piece.rank()));
        projection = projection_join(&projection, &piece.embed_to(depth)?)?;
    }
    Ok(Part1Projection { r, t, projection, pieces })
}

/// The test `⟨G_r⟩` whose level `r` has `p_{r,t}` at depth `t`, with the
/// listing bound grown so that every dictionary item of length at most `t`
/// is included.
pub fn part1_test(
    l: &UnitaryMachine,
    f: &LengthFunction,
    dict: &StateDictionary,
    levels: usize,
    max_depth: usize,
) -> QmlTest {
    let levels = (0..levels)
        .map(|r| {
            let (l, f, dict) = (l.clone(), f.clone(), dict.clone());
            QuantumSigma1Set::from_fn(format!("part1 level {r}"), max_depth, move |depth| {
                let t = dict.last_index_up_to_length(depth).unwrap_or(0);
                Ok(build_part1_test(&l, &f, &dict, r, t, depth)?.projection)
            })
        })
        .collect();
    QmlTest::new("part1", levels)
}

/// The length bound and machine built from a strong Solovay test.
#[derive(Clone, Debug)]
pub struct SolovayMachine {
    pub f: LengthFunction,
    pub machine: UnitaryMachine,
    /// `(n_r, f(n_r), g(n_r), rank p_r)` per item.
    pub grid: Vec<(usize, usize, usize, usize)>,
}

impl SolovayMachine {
    pub fn f(&self, n: usize) -> usize {
        self.f.eval(n)
    }

    /// `g(n) = n − f(n)`.
    pub fn g(&self, n: usize) -> usize {
        n - self.f.eval(n)
    }
}

/// Orthonormal basis of `rg(p)` followed by a Gram–Schmidt completion over
/// the standard basis, as the columns of a unitary.
fn range_first_unitary(p: &SpecialProjection) -> Result<ComplexMatrix> {
    let n = p.n_qubits();
    let dim = 1usize << n;
    if p.backend() == Backend::Exact && p.matrix().is_diagonal() {
        let diag = p.matrix().diagonal_real();
        let (inside, outside): (Vec<usize>, Vec<usize>) =
            (0..dim).partition(|&i| !diag[i].as_exact().is_some_and(num::Zero::is_zero));
        let triplets = inside
            .into_iter()
            .chain(outside)
            .enumerate()
            .map(|(col, row)| (row, col, GaussianRational::one()))
            .collect();
        return ComplexMatrix::from_exact_triplets(n, triplets);
    }
    let eig = hermitian_eigen(&p.to_float().matrix().clone());
    let mut columns: Vec<DVector<Complex64>> = eig
        .values
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &v)| v > 0.5)
        .map(|(j, _)| eig.vectors.column(j).into_owned())
        .collect();
    for i in 0..dim {
        if columns.len() == dim {
            break;
        }
        let mut v = DVector::<Complex64>::zeros(dim);
        v[i] = Complex64::new(1.0, 0.0);
        for _ in 0..2 {
            for c in &columns {
                let proj = c.dotc(&v);
                v -= c * proj;
            }
        }
        let norm = v.norm();
        if norm > 1e-6 {
            columns.push(v / Complex64::new(norm, 0.0));
        }
    }
    let u = DMatrix::from_columns(&columns);
    ComplexMatrix::from_nalgebra(n, &u)
}

/// `f(n_r) = n_r − ⌈log₂ rank p_r⌉`, so that `2^{-f} ≥ τ(p_r) > 2^{-f-1}`,
/// and `f(m) = m` elsewhere. `L_{n_r}` maps the first `2^{g(n_r)}` basis
/// vectors onto a space containing `rg(p_r)`; `L_m = I` elsewhere.
pub fn solovay_to_machine(test: &StrongSolovayTest, max_depth: usize) -> Result<SolovayMachine> {
    let mut values = BTreeMap::new();
    let mut circuits = BTreeMap::new();
    let mut grid = Vec::new();
    for (r, (n, p)) in test.items().iter().enumerate() {
        if *n > max_depth {
            break;
        }
        if p.rank() == 0 {
            return Err(Error::InvalidParameter(format!("item {r} has τ = 0, f is undefined")));
        }
        let g = ceil_log2(p.rank());
        if g > *n {
            return Err(Error::MalformedTest(format!("rank of item {r} exceeds 2^{n}")));
        }
        values.insert(*n, n - g);
        circuits.insert(*n, range_first_unitary(p)?);
        grid.push((*n, n - g, g, p.rank()));
    }
    let f = LengthFunction::Grid(values);
    let mass = f.mass(0..=max_depth);
    if mass > BigRational::from_integer(4.into()) {
        return Err(Error::MassBoundViolated(format!("Σ 2^(-f(n)) = {mass} exceeds 4")));
    }
    let machine = UnitaryMachine::new(
        format!("solovay:{}", test.label),
        max_depth,
        circuits,
        DefaultCircuit::Identity,
    )?;
    Ok(SolovayMachine { f, machine, grid })
}

/// Result of compressing `ρ↾n_r` through the machine of a strong Solovay
/// test.
#[derive(Clone, Debug, Serialize)]
pub struct TestCompression {
    pub r: usize,
    pub n: usize,
    pub f_n: usize,
    pub g_n: usize,
    /// `ρ(p_r)`.
    pub alpha: Real,
    pub record: CompressionRecord,
    /// `D(Proj(ρ↾n, p_r), ρ↾n)`.
    pub projection_distance: f64,
    /// `√(1 − α)`.
    pub projection_bound: f64,
}

/// Projects `ρ↾n_r` onto `rg(p_r)`, reads off the `g(n_r)`-qubit witness
/// `y` with `L(y ⊗ 0; n_r) = Proj(ρ↾n_r, p_r)`, and certifies
/// `QC_L^{√ε}(ρ↾n_r | n_r) ≤ g(n_r)`.
pub fn compress_via_test(
    rho: &CoherentState,
    test: &StrongSolovayTest,
    r: usize,
    epsilon: f64,
) -> Result<TestCompression> {
    check_epsilon(epsilon)?;
    let (n, p) = test.item(r)?;
    let n = *n;
    let sm = solovay_to_machine(test, n)?;
    let z = rho.level(n)?;
    let alpha = z.evaluate(p.matrix())?;
    if alpha.to_f64() <= 1.0 - epsilon {
        return Err(Error::StatePasses { value: alpha.to_f64(), threshold: 1.0 - epsilon });
    }
    let projected = state_project(z, p)?;
    let g = sm.g(n);
    let lm = sm.machine.circuit(n)?;
    let (lm, zm) = if lm.backend() == projected.backend() {
        (lm.clone(), projected.matrix().clone())
    } else {
        (lm.to_float(), projected.matrix().to_float())
    };
    let pulled = lm.adjoint().mul(&zm)?.mul(&lm)?;
    let witness = DensityMatrix::trusted(pulled.leading_block(g)?);
    let output = run_machine(&sm.machine, &witness, n)?;
    let reproduction = output.matrix().max_abs_diff(projected.matrix())?;
    if reproduction > TOL_EIG {
        return Err(Error::MalformedTest(format!(
            "range of item {r} is not reproduced by the machine (deviation {reproduction:e})"
        )));
    }
    let mode = TraceDistanceMode::Standard;
    let achieved = trace_distance(&output, z, mode)?;
    let projection_distance = trace_distance(&projected, z, mode)?;
    let accuracy = epsilon.sqrt();
    let projection_bound = (1.0 - alpha.to_f64()).max(0.0).sqrt();
    if achieved >= accuracy {
        return Err(Error::NoWitness { n });
    }
    Ok(TestCompression {
        r,
        n,
        f_n: sm.f(n),
        g_n: g,
        alpha,
        record: CompressionRecord {
            n,
            k: g,
            witness,
            source: WitnessSource::TestRange,
            achieved_distance: achieved,
            accuracy,
        },
        projection_distance,
        projection_bound,
    })
}
