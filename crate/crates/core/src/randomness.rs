//! Quantum Σ₁ sets, quantum Martin-Löf and Solovay tests, their evaluation
//! against states, and the combiner behind the universal test.

use std::fmt;
use std::sync::Arc;

use num::{BigRational, One, Zero};
use once_cell::sync::OnceCell;
use serde::Serialize;

use crate::bits::BitString;
use crate::cantor::ClassicalLevel;
use crate::error::{Error, Result};
use crate::linalg::scalar::{pow2_neg, rational_to_f64};
use crate::linalg::{projection_join, Real, SpecialProjection, TOL_EIG};
use crate::states::CoherentState;

type ProjectionFn = Arc<dyn Fn(usize) -> Result<SpecialProjection> + Send + Sync>;

/// An increasing sequence of projections `p_i ∈ M_i`, known for
/// `i ≤ max_depth`. Levels are computed on demand and memoized.
#[derive(Clone)]
pub struct QuantumSigma1Set {
    label: String,
    max_depth: usize,
    source: ProjectionFn,
    levels: Arc<Vec<OnceCell<SpecialProjection>>>,
}

impl fmt::Debug for QuantumSigma1Set {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuantumSigma1Set")
            .field("label", &self.label)
            .field("max_depth", &self.max_depth)
            .finish()
    }
}

impl QuantumSigma1Set {
    /// `f(i)` must return a projection on `i` qubits.
    pub fn from_fn(
        label: impl Into<String>,
        max_depth: usize,
        f: impl Fn(usize) -> Result<SpecialProjection> + Send + Sync + 'static,
    ) -> Self {
        let levels = Arc::new((0..=max_depth).map(|_| OnceCell::new()).collect());
        Self { label: label.into(), max_depth, source: Arc::new(f), levels }
    }

    /// `p_i = 0` for every `i`.
    pub fn zero(max_depth: usize) -> Self {
        Self::from_fn("zero", max_depth, |i| Ok(SpecialProjection::zero(i)))
    }

    /// `p_i = I` for every `i`.
    pub fn full(max_depth: usize) -> Self {
        Self::from_fn("full", max_depth, |i| Ok(SpecialProjection::identity(i)))
    }

    /// An explicit list `p_0, …, p_D`.
    pub fn from_projections(projections: Vec<SpecialProjection>) -> Result<Self> {
        if projections.is_empty() {
            return Err(Error::MalformedTest("Σ₁ set needs at least one level".into()));
        }
        for (i, p) in projections.iter().enumerate() {
            if p.n_qubits() != i {
                return Err(Error::DimensionMismatch { left: i, right: p.n_qubits() });
            }
        }
        let depth = projections.len() - 1;
        let projections = Arc::new(projections);
        Ok(Self::from_fn("explicit", depth, move |i| Ok(projections[i].clone())))
    }

    /// The set generated by a single projection `p ∈ M_m`: zero below depth
    /// `m`, and `p` embedded from there on.
    pub fn generated_by(p: SpecialProjection, max_depth: usize) -> Self {
        let m = p.n_qubits();
        Self::from_fn("generated", max_depth, move |i| {
            if i < m {
                Ok(SpecialProjection::zero(i))
            } else {
                p.embed_to(i)
            }
        })
    }

    /// A classical effectively open set seen as diagonal projections: `p_i`
    /// projects onto the strings of length `i` covered by stages with `k ≤ i`.
    pub fn from_classical(level: ClassicalLevel, max_depth: usize) -> Self {
        Self::from_fn("classical", max_depth, move |i| {
            SpecialProjection::from_strings(i, &level.strings_at(i))
        })
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

    /// `p_i`.
    pub fn projection(&self, i: usize) -> Result<&SpecialProjection> {
        if i > self.max_depth {
            return Err(Error::DepthExceeded { requested: i, max: self.max_depth });
        }
        self.levels[i].get_or_try_init(|| {
            let p = (self.source)(i)?;
            if p.n_qubits() != i {
                return Err(Error::DimensionMismatch { left: i, right: p.n_qubits() });
            }
            Ok(p)
        })
    }

    /// Verifies `p_i ≤ p_{i+1}` for every `i < depth`.
    pub fn check_monotone(&self, depth: usize) -> Result<()> {
        for i in 0..depth {
            let deviation = self.projection(i)?.order_deviation(self.projection(i + 1)?)?;
            if deviation > TOL_EIG {
                return Err(Error::NotMonotone { depth: i, deviation });
            }
        }
        Ok(())
    }
}

/// `τ(p_depth)` together with whether `τ(p_i)` was nondecreasing up to there.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sigma1Mass {
    pub depth: usize,
    pub value: Real,
    /// The value is a lower bound for `τ(G)` only if this holds.
    pub monotone: bool,
}

/// `τ(p_depth)`, a lower bound for `τ(G) = sup_i τ(p_i)`.
pub fn sigma1_mass(g: &QuantumSigma1Set, depth: usize) -> Result<Sigma1Mass> {
    let mut monotone = true;
    let mut prev = Real::zero();
    for i in 0..=depth {
        let value = g.projection(i)?.tracial_value();
        if value.compare(&prev) == std::cmp::Ordering::Less {
            monotone = false;
        }
        prev = value;
    }
    Ok(Sigma1Mass { depth, value: prev, monotone })
}

/// `G ∨ H = ⟨p_k ∨ q_k⟩`, up to the smaller of the two depths.
pub fn sigma1_join(g: &QuantumSigma1Set, h: &QuantumSigma1Set) -> QuantumSigma1Set {
    let depth = g.max_depth().min(h.max_depth());
    let (g, h) = (g.clone(), h.clone());
    let label = format!("{} ∨ {}", g.label(), h.label());
    QuantumSigma1Set::from_fn(label, depth, move |i| {
        projection_join(g.projection(i)?, h.projection(i)?)
    })
}

/// Anything that presents a list of Σ₁ levels `G_0, G_1, …`.
pub trait Sigma1Levels {
    fn levels(&self) -> &[QuantumSigma1Set];

    /// Largest depth at which every level is known.
    fn max_depth(&self) -> usize {
        self.levels().iter().map(QuantumSigma1Set::max_depth).min().unwrap_or(0)
    }
}

/// A quantum Martin-Löf test: levels with `τ(G_r) ≤ 2^{-r}`.
#[derive(Clone, Debug)]
pub struct QmlTest {
    pub label: String,
    pub levels: Vec<QuantumSigma1Set>,
}

impl Sigma1Levels for QmlTest {
    fn levels(&self) -> &[QuantumSigma1Set] {
        &self.levels
    }
}

impl QmlTest {
    pub fn new(label: impl Into<String>, levels: Vec<QuantumSigma1Set>) -> Self {
        Self { label: label.into(), levels }
    }

    pub fn max_levels(&self) -> usize {
        self.levels.len()
    }

    /// Verifies `τ(p^r_i) ≤ 2^{-r}` exactly for every level and every
    /// `i ≤ depth`.
    pub fn check_mass_bounds(&self, depth: usize) -> Result<()> {
        for (r, g) in self.levels.iter().enumerate() {
            let bound = Real::Exact(pow2_neg(r as u32));
            for i in 0..=depth.min(g.max_depth()) {
                let tau = g.projection(i)?.tracial_value();
                if !tau.at_most(&bound, TOL_EIG) {
                    return Err(Error::MeasureBoundViolated {
                        level: r,
                        measure: tau.to_string(),
                        bound: bound.to_string(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// A quantum Solovay test: levels whose masses sum to at most a declared
/// bound.
#[derive(Clone, Debug)]
pub struct SolovayTest {
    pub label: String,
    pub levels: Vec<QuantumSigma1Set>,
    pub declared_mass_bound: BigRational,
}

impl Sigma1Levels for SolovayTest {
    fn levels(&self) -> &[QuantumSigma1Set] {
        &self.levels
    }
}

impl SolovayTest {
    /// `Σ_r τ(p^r_depth)`, checked against the declared bound.
    pub fn check_mass_bound(&self, depth: usize) -> Result<Real> {
        let mut total = Real::zero();
        for g in &self.levels {
            total = total.add(&g.projection(depth.min(g.max_depth()))?.tracial_value());
        }
        let bound = Real::Exact(self.declared_mass_bound.clone());
        if !total.at_most(&bound, TOL_EIG) {
            return Err(Error::MassBoundViolated(format!(
                "total mass {total} exceeds declared bound {bound}"
            )));
        }
        Ok(total)
    }
}

/// A strong quantum Solovay test: single projections `p_r ∈ M_{n_r}` with
/// `n_r` strictly increasing and summable tracial values.
#[derive(Clone, Debug)]
pub struct StrongSolovayTest {
    pub label: String,
    items: Vec<(usize, SpecialProjection)>,
    pub declared_mass_bound: BigRational,
}

impl StrongSolovayTest {
    pub fn new(
        label: impl Into<String>,
        items: Vec<SpecialProjection>,
        declared_mass_bound: BigRational,
    ) -> Result<Self> {
        let items: Vec<(usize, SpecialProjection)> =
            items.into_iter().map(|p| (p.n_qubits(), p)).collect();
        for w in items.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::MalformedTest(format!(
                    "lengths must increase strictly, got {} then {}",
                    w[0].0, w[1].0
                )));
            }
        }
        let total: BigRational = items
            .iter()
            .map(|(_, p)| p.tracial_value().as_exact().cloned().expect("rank-based value"))
            .sum();
        if total > declared_mass_bound {
            return Err(Error::MassBoundViolated(format!(
                "total mass {total} exceeds declared bound {declared_mass_bound}"
            )));
        }
        Ok(Self { label: label.into(), items, declared_mass_bound })
    }

    pub fn items(&self) -> &[(usize, SpecialProjection)] {
        &self.items
    }

    pub fn item(&self, r: usize) -> Result<&(usize, SpecialProjection)> {
        self.items.get(r).ok_or_else(|| {
            Error::MalformedTest(format!("test has {} items, level {r} requested", self.items.len()))
        })
    }

    pub fn max_levels(&self) -> usize {
        self.items.len()
    }

    /// The same test as a Solovay test with one generated Σ₁ set per item.
    pub fn to_solovay(&self, max_depth: usize) -> SolovayTest {
        SolovayTest {
            label: self.label.clone(),
            levels: self
                .items
                .iter()
                .map(|(_, p)| QuantumSigma1Set::generated_by(p.clone(), max_depth))
                .collect(),
            declared_mass_bound: self.declared_mass_bound.clone(),
        }
    }
}

/// `ρ(p^r_depth)` for every level `r`.
pub fn evaluate_test(
    rho: &CoherentState,
    test: &impl Sigma1Levels,
    depth: usize,
) -> Result<Vec<Real>> {
    if depth > rho.max_depth() {
        return Err(Error::DepthExceeded { requested: depth, max: rho.max_depth() });
    }
    let state = rho.level(depth)?;
    test.levels().iter().map(|g| state.evaluate(g.projection(depth)?.matrix())).collect()
}

/// How a list of level values is turned into a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Semantics {
    /// Fails iff every level exceeds `δ`.
    MartinLof,
    /// Fails iff at least `threshold` levels exceed `δ`.
    Solovay { threshold: usize },
}

/// Verdict at a fixed order `δ`, relative to the computed depth only.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// Every computed level exceeds `δ`.
    FailsUpToDepth { levels: usize },
    /// Level `level` does not exceed `δ`; `strict` when its value is below `δ`.
    PassesWitnessed { level: usize, strict: bool },
    /// At least `threshold` levels exceed `δ`.
    SolovayFails { exceeding: usize, threshold: usize },
    /// Fewer than `threshold` levels exceed `δ`.
    SolovayPasses { exceeding: usize, threshold: usize },
}

impl Verdict {
    pub fn fails(&self) -> bool {
        matches!(self, Verdict::FailsUpToDepth { .. } | Verdict::SolovayFails { .. })
    }
}

fn exceeds(value: &Real, delta: &BigRational) -> bool {
    match value {
        Real::Exact(v) => v > delta,
        Real::Approx(v) => *v > rational_to_f64(delta),
    }
}

fn below(value: &Real, delta: &BigRational) -> bool {
    match value {
        Real::Exact(v) => v < delta,
        Real::Approx(v) => *v < rational_to_f64(delta),
    }
}

/// Reads a list of level values at order `δ`. Under Martin-Löf semantics a
/// passing verdict names the first level strictly below `δ`, or failing
/// that the first level equal to `δ`.
pub fn verdict(values: &[Real], delta: &BigRational, semantics: Semantics) -> Result<Verdict> {
    if values.is_empty() {
        return Err(Error::EmptyValues);
    }
    if *delta <= BigRational::zero() || *delta >= BigRational::one() {
        return Err(Error::InvalidParameter(format!("δ = {delta} must lie in (0,1)")));
    }
    let exceeding = values.iter().filter(|v| exceeds(v, delta)).count();
    Ok(match semantics {
        Semantics::MartinLof => {
            if exceeding == values.len() {
                Verdict::FailsUpToDepth { levels: values.len() }
            } else if let Some(level) = values.iter().position(|v| below(v, delta)) {
                Verdict::PassesWitnessed { level, strict: true }
            } else {
                let level = values.iter().position(|v| !exceeds(v, delta)).expect("some level");
                Verdict::PassesWitnessed { level, strict: false }
            }
        }
        Semantics::Solovay { threshold } => {
            if exceeding >= threshold {
                Verdict::SolovayFails { exceeding, threshold }
            } else {
                Verdict::SolovayPasses { exceeding, threshold }
            }
        }
    })
}

/// `inf_r ρ(G_r)` over the computed levels, the quantity whose vanishing
/// defines passing in the limit.
pub fn infimum(values: &[Real]) -> Result<Real> {
    values
        .iter()
        .cloned()
        .min_by(|a, b| a.compare(b))
        .ok_or(Error::EmptyValues)
}

/// `q^n_k = ⋁_{e+n+1 ≤ k} p^e_{e+n+1,k}` over the listed tests.
pub fn universal_combine(tests: &[QmlTest], n: usize, k: usize) -> Result<SpecialProjection> {
    if k < n + 1 {
        return Err(Error::InvalidParameter(format!("need k ≥ n + 1, got n = {n}, k = {k}")));
    }
    let mut q = SpecialProjection::zero(k);
    for (e, test) in tests.iter().enumerate().take(k - n) {
        let r = e + n + 1;
        let level = test.levels.get(r).ok_or_else(|| {
            Error::MalformedTest(format!(
                "test {e} has {} levels, level {r} is needed",
                test.levels.len()
            ))
        })?;
        q = projection_join(&q, level.projection(k)?)?;
    }
    Ok(q)
}

/// The combined test whose level `n` is the Σ₁ set `k ↦ q^n_k`.
pub fn universal_test(tests: Vec<QmlTest>, max_levels: usize, max_depth: usize) -> QmlTest {
    let tests = Arc::new(tests);
    let levels = (0..max_levels)
        .map(|n| {
            let tests = Arc::clone(&tests);
            QuantumSigma1Set::from_fn(format!("universal level {n}"), max_depth, move |k| {
                if k < n + 1 {
                    Ok(SpecialProjection::zero(k))
                } else {
                    universal_combine(&tests, n, k)
                }
            })
        })
        .collect();
    QmlTest::new("universal", levels)
}

/// Turns a classical Martin-Löf test into a quantum one. Each level's
/// uniform measure is checked exactly against `2^{-r}`.
pub fn classical_to_quantum(levels: Vec<ClassicalLevel>, max_depth: usize) -> Result<QmlTest> {
    let mut out = Vec::with_capacity(levels.len());
    for (r, level) in levels.into_iter().enumerate() {
        let measure = level.measure();
        let bound = pow2_neg(r as u32);
        if measure > bound {
            return Err(Error::MeasureBoundViolated {
                level: r,
                measure: measure.to_string(),
                bound: bound.to_string(),
            });
        }
        out.push(QuantumSigma1Set::from_classical(level, max_depth).with_label(format!("level {r}")));
    }
    Ok(QmlTest::new("classical", out))
}

/// `S_{n,i}`: the diagonal projection onto strings of length `n` with bit
/// `i` set.
pub fn coordinate_projection(n: usize, i: usize) -> Result<SpecialProjection> {
    if i >= n {
        return Err(Error::InvalidParameter(format!("coordinate {i} out of range for {n} qubits")));
    }
    let strings: Vec<BitString> = BitString::all(n).filter(|s| s.bit(i)).collect();
    SpecialProjection::from_strings(n, &strings)
}

/// `(1/n) Σ_{i<n} ρ(S_{n,i})`.
pub fn lln_statistic(rho: &CoherentState, n: usize) -> Result<Real> {
    if n == 0 {
        return Err(Error::InvalidParameter("the statistic needs n ≥ 1".into()));
    }
    let mut total = Real::zero();
    for i in 0..n {
        total = total.add(&rho.evaluate(coordinate_projection(n, i)?.matrix())?);
    }
    Ok(match total {
        Real::Exact(t) => Real::Exact(t / BigRational::from_integer(n.into())),
        Real::Approx(t) => Real::Approx(t / n as f64),
    })
}
