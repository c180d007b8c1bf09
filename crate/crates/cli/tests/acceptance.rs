//! Acceptance suite: twelve end-to-end criteria, each printed as one
//! PASS/FAIL line. Expected values are recomputed here from first principles
//! (hand-derived formulas, dense floating-point linear algebra written out in
//! this file) rather than read back from the library.

use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, SymmetricEigen};
use num::{BigRational, One, Zero};

use qcantor::bits::BitString;
use qcantor::bridge::{check_lifting, coverage, derive_classical_test, select_strings};
use qcantor::compression::{
    build_part1_test, compress_via_test, solovay_to_machine, LengthFunction, StateDictionary,
    UnitaryMachine,
};
use qcantor::entropy::{cross_entropy_statistic, von_neumann_entropy};
use qcantor::fixtures;
use qcantor::linalg::scalar::Complex64;
use qcantor::linalg::{
    fidelity, projection_join, projection_weight, state_project, trace_distance, TraceDistanceMode,
};
use qcantor::randomness::{evaluate_test, lln_statistic, universal_combine, verdict, Semantics};
use qcantor::states::{
    biased_qubit, check_coherence, epr_pair, ClassicalSequence, CoherentState, MeasureState,
};
use qcantor::{ComplexMatrix, DensityMatrix, Real, SpecialProjection};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn two_pow_neg(k: usize) -> BigRational {
    BigRational::new(1.into(), num::BigInt::from(2u8).pow(k as u32))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Dense copy with `f64` entries.
fn dense(m: &ComplexMatrix) -> DMatrix<Complex64> {
    let d = m.dim();
    DMatrix::from_fn(d, d, |i, j| m.entry(i, j))
}

/// `(T ρ)_{ij} = Σ_b ρ_{i + b·2^{n−1}, j + b·2^{n−1}}`: the last qubit is
/// the most significant bit of the index.
fn oracle_partial_trace(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let half = m.nrows() / 2;
    DMatrix::from_fn(half, half, |i, j| m[(i, j)] + m[(i + half, j + half)])
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Hermitian eigenvalues through a real symmetric embedding
/// `[[Re, −Im], [Im, Re]]`, each eigenvalue appearing twice.
fn oracle_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let d = m.nrows();
    let big = DMatrix::from_fn(2 * d, 2 * d, |i, j| {
        let z = m[(i % d, j % d)];
        match (i < d, j < d) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let mut v: Vec<f64> = SymmetricEigen::new(big).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v.into_iter().step_by(2).collect()
}

fn oracle_trace_distance(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    0.5 * oracle_eigenvalues(&(a - b)).iter().map(|x| x.abs()).sum::<f64>()
}

fn oracle_rank(vectors: &DMatrix<Complex64>) -> usize {
    let svd = vectors.clone().svd(false, false);
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    svd.singular_values.iter().filter(|&&s| s > 1e-9 * top.max(1.0)).count()
}

fn binary_entropy(p: f64) -> f64 {
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let depth = 8;
    let mut states = vec![
        CoherentState::from_bits(ClassicalSequence::periodic(&"0110".parse().unwrap(), depth).unwrap()),
        CoherentState::from_measure(MeasureState::bernoulli(q(1, 3)).unwrap(), depth),
        CoherentState::iid_state(biased_qubit(&q(1, 4)).unwrap(), depth).unwrap(),
        CoherentState::epr_chain(depth),
        CoherentState::tracial(depth),
    ];
    let mut rng = fixtures::rng(20);
    for _ in 0..20 {
        states.push(fixtures::random_matrix_sequence(&mut rng, depth, 3).map_err(|e| e.to_string())?);
    }
    for s in &states {
        let report = check_coherence(s, depth).map_err(|e| e.to_string())?;
        for level in &report.levels {
            let allowed = if level.exact { 0.0 } else { 1e-9 };
            ensure(level.deviation <= allowed, || {
                format!("{}: deviation {:e} at n = {}", s.label(), level.deviation, level.n)
            })?;
        }
        for n in 0..depth {
            let upper = dense(s.level(n + 1).unwrap().matrix());
            let lower = dense(s.level(n).unwrap().matrix());
            let gap = max_abs(&(oracle_partial_trace(&upper) - lower));
            ensure(gap <= 1e-12, || format!("{}: oracle partial trace differs by {gap:e}", s.label()))?;
        }
    }
    let bits = &states[0];
    for n in 0..=depth {
        let idx: usize = (0..n).map(|j| [0, 1, 1, 0][j % 4] << j).sum();
        let m = bits.level(n).unwrap().matrix();
        ensure(m.exact_entry(idx, idx).is_some_and(|z| z.re.is_one()) && m.nnz() == 1, || {
            format!("bit state level {n} is not |Z↾n⟩⟨Z↾n|")
        })?;
    }
    let iid = &states[2];
    for n in 1..=4 {
        let m = iid.level(n).unwrap().matrix();
        for i in 0..1usize << n {
            let ones = i.count_ones() as i32;
            let expected = num::pow(q(1, 4), ones as usize) * num::pow(q(3, 4), n - ones as usize);
            ensure(m.exact_entry(i, i).unwrap().re == expected, || format!("iid diagonal at {i}"))?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("{} states to depth {depth}, deviation 0, {elapsed:.2?}", states.len()))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let ten = DensityMatrix::basis(&"10".parse().unwrap());
    // "10" puts bit 1 on qubit 0, the least significant: index 1
    let mut by_hand = DMatrix::<Complex64>::zeros(4, 4);
    by_hand[(1, 1)] = Complex64::new(1.0, 0.0);
    ensure(max_abs(&(dense(ten.matrix()) - &by_hand)) == 0.0, || "|10⟩⟨10| layout".into())?;
    let traced = ten.partial_trace().unwrap();
    ensure(traced == DensityMatrix::basis(&"1".parse().unwrap()), || "T(|10⟩⟨10|) ≠ |1⟩⟨1|".into())?;
    ensure(max_abs(&(oracle_partial_trace(&by_hand) - dense(traced.matrix()))) == 0.0, || {
        "oracle disagrees on |10⟩⟨10|".into()
    })?;
    let beta = epr_pair();
    let half = Complex64::new(0.5, 0.0);
    let mut beta_hand = DMatrix::<Complex64>::zeros(4, 4);
    for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        beta_hand[(i, j)] = half;
    }
    ensure(max_abs(&(dense(beta.matrix()) - &beta_hand)) == 0.0, || "β layout".into())?;
    let traced = beta.partial_trace().unwrap();
    ensure(traced == DensityMatrix::maximally_mixed(1), || "T(β) ≠ I/2".into())?;
    ensure(traced.matrix().exact_entry(0, 0).unwrap().re == q(1, 2), || "T(β) not exact".into())?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("exact, {elapsed:.2?}"))
}

fn criterion_3() -> Outcome {
    let mut checked = 0;
    for t in fixtures::qml_tests(7, 8) {
        for (r, g) in t.levels.iter().enumerate() {
            for k in 0..=8 {
                let p = g.projection(k).unwrap();
                let Real::Exact(trace) = p.matrix().trace_real() else {
                    return Err(format!("{} level {r} is not exact", t.label));
                };
                let tau = trace * two_pow_neg(k);
                ensure(tau <= two_pow_neg(r), || format!("{}: τ(p^{r}_{k}) = {tau}", t.label))?;
                checked += 1;
            }
        }
    }
    let mut rng = fixtures::rng(3);
    let mut worst = f64::NEG_INFINITY;
    for i in 0..100 {
        let n = 1 + i % 4;
        let g = fixtures::random_projection(&mut rng, n, 3);
        let h = fixtures::random_projection(&mut rng, n, 3);
        let join = projection_join(&g, &h).map_err(|e| e.to_string())?;
        let (gd, hd, jd) = (dense(g.matrix()), dense(h.matrix()), dense(join.matrix()));
        let dim = gd.nrows();
        let stacked = DMatrix::from_fn(dim, 2 * dim, |i, j| if j < dim { gd[(i, j)] } else { hd[(i, j - dim)] });
        let rank = oracle_rank(&stacked);
        let tau = |m: &DMatrix<Complex64>| m.trace().re / dim as f64;
        ensure((tau(&jd) - rank as f64 / dim as f64).abs() <= 1e-9, || {
            format!("join mass {} vs oracle rank {rank}/{dim}", tau(&jd))
        })?;
        let (eg, eh) = (max_abs(&(&jd * &gd - &gd)), max_abs(&(&jd * &hd - &hd)));
        ensure(eg <= 1e-9 && eh <= 1e-9, || format!("join misses its arguments by {eg:e}, {eh:e} (n = {n})"))?;
        worst = worst.max(tau(&jd) - tau(&gd) - tau(&hd));
    }
    ensure(worst <= 1e-9, || format!("τ(G∨H) exceeds τ(G)+τ(H) by {worst:e}"))?;
    Ok(format!("{checked} exact level masses, 100 joins (max excess {worst:.1e})"))
}

fn criterion_4() -> Outcome {
    let tests = fixtures::qml_tests(7, 8);
    let states = fixtures::states(8);
    let mut worst = f64::INFINITY;
    for n in 0..=3 {
        for k in n + 1..=8 {
            let qk = universal_combine(&tests, n, k).map_err(|e| e.to_string())?;
            let qd = dense(qk.matrix());
            let tau = qd.trace().re / qd.nrows() as f64;
            ensure(tau <= 2f64.powi(-(n as i32)) + 1e-9, || format!("τ(q^{n}_{k}) = {tau}"))?;
            for rho in &states {
                let rd = dense(rho.level(k).unwrap().matrix());
                let v = (&rd * &qd).trace().re;
                for (e, t) in tests.iter().enumerate().take(k - n) {
                    let p = dense(t.levels[n + e + 1].projection(k).unwrap().matrix());
                    let w = (&rd * &p).trace().re;
                    worst = worst.min(v - w);
                    ensure(v >= w - 1e-9, || {
                        format!("{}: q^{n}_{k} = {v} < p^{e}_{}  = {w}", rho.label(), n + e + 1)
                    })?;
                }
            }
        }
    }
    Ok(format!("3 tests × 5 states, n ≤ 3, k ≤ 8 (min gap {worst:.1e})"))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let zeros = CoherentState::from_bits(ClassicalSequence::constant(false, 8));
    let prefix = fixtures::prefix_test(7, 8);
    let values = evaluate_test(&zeros, &prefix, 8).map_err(|e| e.to_string())?;
    ensure(values.iter().all(|v| *v == Real::Exact(BigRational::one())), || {
        "0^∞ must give value 1 on every level".into()
    })?;
    let v = verdict(&values, &q(99, 100), Semantics::MartinLof).map_err(|e| e.to_string())?;
    ensure(v.fails(), || format!("verdict {v:?}"))?;

    let z = fixtures::rotated_fixture_sequence(8);
    let rotated = fixtures::rotated_basis_test(&z, 6, 8).map_err(|e| e.to_string())?;
    let half = q(1, 2);
    let derived = derive_classical_test(&rotated, &half, 8).map_err(|e| e.to_string())?;
    let cov = coverage(&rotated, &derived, &z, &half, 8).map_err(|e| e.to_string())?;
    let prefix_z = z.prefix(8).unwrap();
    for (level, c) in derived.levels.iter().zip(&cov) {
        let r = level.r;
        let bound = if r == 0 { q(2, 1) } else { two_pow_neg(r - 1) };
        ensure(level.measure <= bound, || format!("level {r} measure {}", level.measure))?;
        // weights are (24/25)² on Z(r) and (7/25)² on the other bit, so exactly
        // the extensions of Z↾(r+1) are selected
        ensure(level.measure == two_pow_neg(r + 1), || format!("level {r} measure {}", level.measure))?;
        let cylinder = prefix_z.prefix(r + 1);
        for stage in &level.stages {
            let expected: std::collections::BTreeSet<BitString> = BitString::all(stage.k)
                .filter(|s| stage.k > r && cylinder.is_prefix_of(s))
                .collect();
            ensure(stage.strings == expected, || format!("level {r} stage {}", stage.k))?;
        }
        ensure(c.covered && c.value == Real::Exact(q(576, 625)), || format!("level {r} coverage"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!("prefix test fails at δ = 0.99; rotated test covers Z at r ≤ 5, {elapsed:.2?}"))
}

fn criterion_6() -> Outcome {
    let mut projections: Vec<SpecialProjection> = Vec::new();
    for t in fixtures::qml_tests(6, 5) {
        for g in &t.levels {
            for k in 0..=5 {
                projections.push(g.projection(k).unwrap().clone());
            }
        }
    }
    let mut rng = fixtures::rng(6);
    for i in 0..40 {
        projections.push(fixtures::random_projection(&mut rng, 1 + i % 5, 3));
    }
    let deltas = [q(1, 4), q(1, 3), q(1, 2), q(3, 4)];
    let mut checked = 0;
    for p in &projections {
        let k = p.n_qubits();
        let Real::Exact(trace) = p.matrix().trace_real() else { unreachable!() };
        let tau = trace * two_pow_neg(k);
        let lifted = p.embed();
        for d in &deltas {
            let s = select_strings(p, d).map_err(|e| e.to_string())?;
            let measure = BigRational::from_integer(s.strings.len().into()) * two_pow_neg(k);
            ensure(s.measure() == measure, || "clopen measure".into())?;
            ensure(measure <= &tau / d, || format!("measure {measure} > τ/δ = {}", &tau / d))?;
            for eta in BitString::all(k + 1) {
                let i = eta.index();
                let w = lifted.matrix().exact_entry(i, i).unwrap().re;
                let in_lift = w >= *d;
                let in_base = s.strings.contains(&eta.prefix(k));
                ensure(in_lift == in_base, || format!("lifting differs at {eta}"))?;
            }
            ensure(check_lifting(p, d).map_err(|e| e.to_string())?, || "check_lifting".into())?;
            checked += 1;
        }
    }
    Ok(format!("{} projections × 4 orders ({checked} cases)", projections.len()))
}

fn criterion_7() -> Outcome {
    let mut rng = fixtures::rng(7);
    let (mut pairs, mut worst_a, mut worst_f) = (0, f64::NEG_INFINITY, f64::NEG_INFINITY);
    while pairs < 200 {
        let n = 1 + pairs % 4;
        let s = fixtures::random_density(&mut rng, n, 3, 0.6);
        let p = fixtures::random_projection(&mut rng, n, 1 << (n - 1));
        let alpha = projection_weight(&s, &p).unwrap().to_f64();
        let (sd, pd) = (dense(s.matrix()), dense(p.matrix()));
        let alpha_oracle = (&pd * &sd).trace().re;
        ensure((alpha - alpha_oracle).abs() <= 1e-12, || "α disagrees".into())?;
        if alpha <= 0.01 {
            continue;
        }
        let proj = state_project(&s, &p).unwrap();
        let proj_oracle = &pd * &sd * &pd / Complex64::new(alpha_oracle, 0.0);
        ensure(max_abs(&(dense(proj.matrix()) - &proj_oracle)) <= 1e-12, || "projected state".into())?;
        let d = trace_distance(&proj, &s, TraceDistanceMode::Standard).unwrap();
        let d_oracle = oracle_trace_distance(&proj_oracle, &sd);
        ensure((d - d_oracle).abs() <= 1e-9, || format!("distance {d} vs oracle {d_oracle}"))?;
        let f = fidelity(&s, &proj).unwrap();
        worst_a = worst_a.max(d - (1.0 - alpha).sqrt());
        worst_f = worst_f.max(d - (1.0 - f * f).max(0.0).sqrt());
        ensure(d <= (1.0 - alpha).sqrt() + 1e-8, || format!("D = {d}, α = {alpha}"))?;
        ensure(d <= (1.0 - f * f).max(0.0).sqrt() + 1e-8, || format!("D = {d}, F = {f}"))?;
        pairs += 1;
    }
    Ok(format!("200 pairs; max excess over √(1−α) {worst_a:.1e}, over √(1−F²) {worst_f:.1e}"))
}

fn criterion_8() -> Outcome {
    let test = fixtures::strong_solovay_test(3).map_err(|e| e.to_string())?;
    let rho = fixtures::strong_solovay_state(4).map_err(|e| e.to_string())?;
    let sm = solovay_to_machine(&test, 4).map_err(|e| e.to_string())?;
    let mut lines = Vec::new();
    for (r, (n, p)) in test.items().iter().enumerate() {
        ensure(*n == r + 2, || format!("n_{r} = {n}"))?;
        let Real::Exact(trace) = p.matrix().trace_real() else { unreachable!() };
        let tau = trace * two_pow_neg(*n);
        ensure(tau == two_pow_neg(r + 1), || format!("τ(p_{r}) = {tau}"))?;
        let f = sm.f(*n);
        ensure(two_pow_neg(f) >= tau && tau > two_pow_neg(f + 1), || format!("sandwich fails at f = {f}"))?;
        let alpha = rho.evaluate(p.matrix()).unwrap();
        // ⟨v|σ|v⟩ = 97/100 on each of the n − 1 rotated qubits
        ensure(alpha == Real::Exact(num::pow(q(97, 100), r + 1)), || format!("α = {alpha}"))?;
        ensure(alpha.to_f64() >= 0.9, || format!("α = {alpha} < 0.9"))?;
        let c = compress_via_test(&rho, &test, r, 0.1).map_err(|e| e.to_string())?;
        ensure(c.record.k == n - f && c.record.k < *n, || format!("k = {}", c.record.k))?;
        let y = c.record.witness.clone();
        let l = dense(sm.machine.circuit(*n).unwrap());
        let mut padded = DMatrix::<Complex64>::zeros(1 << n, 1 << n);
        let yd = dense(y.matrix());
        for i in 0..yd.nrows() {
            for j in 0..yd.ncols() {
                padded[(i, j)] = yd[(i, j)];
            }
        }
        let out = &l * padded * l.adjoint();
        let d = oracle_trace_distance(&out, &dense(rho.level(*n).unwrap().matrix()));
        ensure((d - c.record.achieved_distance).abs() <= 1e-9, || format!("distance {d}"))?;
        ensure(d <= 0.1f64.sqrt() + 1e-8, || format!("D = {d} > √0.1"))?;
        lines.push(format!("r={r}: k={} D={d:.4}", c.record.k));
    }
    Ok(lines.join(", "))
}

fn criterion_9() -> Outcome {
    let f = LengthFunction::TwiceCeilLog;
    let by_hand = |n: usize| 2 * (usize::BITS - (n + 1).leading_zeros()) as usize;
    for n in 0..=20 {
        ensure(f.eval(n) == by_hand(n), || format!("f({n})"))?;
    }
    let sum_from_one: BigRational = (1..=8).map(|n| two_pow_neg(by_hand(n))).sum();
    let sum_from_zero = two_pow_neg(by_hand(0)) + &sum_from_one;
    ensure(sum_from_one <= q(1, 4), || format!("Σ_(1..8) 2^-f = {sum_from_one}"))?;
    let id = UnitaryMachine::identity(8);
    let dict = StateDictionary::basis_strings(8);
    let mut masses = Vec::new();
    for r in 0..=4 {
        let mut prev: Option<SpecialProjection> = None;
        for t in [12, 30, 62, 126, 254, 510] {
            let p = build_part1_test(&id, &f, &dict, r, t, 8).map_err(|e| e.to_string())?.projection;
            let Real::Exact(trace) = p.matrix().trace_real() else { unreachable!() };
            let tau = trace * two_pow_neg(8);
            ensure(tau <= two_pow_neg(r), || format!("τ(p_{{{r},{t}}}) = {tau}"))?;
            if let Some(prev) = &prev {
                let (a, b) = (dense(prev.matrix()), dense(p.matrix()));
                ensure(max_abs(&(&b * &a - &a)) == 0.0, || format!("not monotone in t at r = {r}"))?;
            }
            if t == 12 {
                ensure(tau.is_zero(), || "strings of length ≤ 3 cannot enter".into())?;
            }
            prev = Some(p);
        }
        masses.push(prev.unwrap().tracial_value().to_string());
    }
    let z = CoherentState::from_bits(ClassicalSequence::constant(false, 8));
    // 0^6 is dictionary item 2^6 − 1 and is the padded empty input
    let p = build_part1_test(&id, &f, &dict, 0, 63, 6).map_err(|e| e.to_string())?.projection;
    ensure(z.evaluate(p.matrix()).unwrap() == Real::Exact(BigRational::one()), || "contrapositive".into())?;
    Ok(format!(
        "Σ_(1..8) 2^-f = {sum_from_one} (with n = 0: {sum_from_zero}); masses r=0..4 {masses:?}"
    ))
}

fn criterion_10() -> Outcome {
    let tracial = CoherentState::tracial(10);
    let iid = CoherentState::iid_state(biased_qubit(&q(1, 3)).unwrap(), 10).unwrap();
    let bits: Vec<i64> = vec![1, 0, 1, 1, 0, 0, 0, 1, 1, 1];
    let pattern: BitString = "1011000111".parse().unwrap();
    let z = CoherentState::from_bits(ClassicalSequence::periodic(&pattern, 10).unwrap());
    for n in 1..=10 {
        ensure(lln_statistic(&tracial, n).unwrap() == Real::Exact(q(1, 2)), || format!("tracial n={n}"))?;
        ensure(lln_statistic(&iid, n).unwrap() == Real::Exact(q(1, 3)), || format!("iid n={n}"))?;
        let avg = q(bits[..n].iter().sum(), n as i64);
        ensure(lln_statistic(&z, n).unwrap() == Real::Exact(avg.clone()), || format!("bits n={n}"))?;
    }
    Ok("exact ½, ⅓ and bit averages for n ≤ 10".into())
}

fn criterion_11() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 1..=8 {
        let h = von_neumann_entropy(&DensityMatrix::maximally_mixed(n));
        worst = worst.max((h - n as f64).abs());
        let h_float = von_neumann_entropy(&DensityMatrix::maximally_mixed(n).to_float());
        worst = worst.max((h_float - n as f64).abs());
    }
    ensure(worst <= 1e-9, || format!("H(I/2^n) off by {worst:e}"))?;
    let tracial = CoherentState::tracial(6);
    let mut others = fixtures::states(6);
    others.push(fixtures::strong_solovay_state(6).unwrap());
    for rho in &others {
        for n in 1..=6 {
            let c = cross_entropy_statistic(rho, &tracial, n).map_err(|e| e.to_string())?;
            ensure(c == 1.0, || format!("{} vs tracial at n = {n}: {c}", rho.label()))?;
        }
    }
    let mut worst_iid: f64 = 0.0;
    for (num, den) in [(1, 4), (1, 3), (2, 5)] {
        let iid = CoherentState::iid_state(biased_qubit(&q(num, den)).unwrap(), 6).unwrap();
        let h = binary_entropy(num as f64 / den as f64);
        for n in 1..=6 {
            let c = cross_entropy_statistic(&iid, &iid, n).map_err(|e| e.to_string())?;
            worst_iid = worst_iid.max((c - h).abs());
        }
    }
    ensure(worst_iid <= 1e-9, || format!("iid self-statistic off by {worst_iid:e}"))?;
    Ok(format!("H(I/2^n) error {worst:.1e}; tracial statistic exactly 1; iid error {worst_iid:.1e}"))
}

fn criterion_12() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_qcantor");
    let start = Instant::now();
    let run = || {
        Command::new(exe)
            .args(["demo", "--seed", "12"])
            .env_remove("QCANTOR_MAX_QUBITS")
            .output()
            .map_err(|e| e.to_string())
    };
    let first = run()?;
    let second = run()?;
    let elapsed = start.elapsed();
    ensure(first.status.code() == Some(0), || {
        format!("demo exited with {:?}: {}", first.status, String::from_utf8_lossy(&first.stderr))
    })?;
    ensure(first.stdout == second.stdout, || "reports differ between runs".into())?;
    let report: serde_json::Value = serde_json::from_slice(&first.stdout).map_err(|e| e.to_string())?;
    ensure(report["status"] == "ok", || "demo status".into())?;
    ensure(report["config"]["seed"] == 12, || "config not embedded".into())?;
    ensure(report["tolerances"]["tol_eig"] == 1e-9, || "tolerances not embedded".into())?;
    ensure(elapsed / 2 < Duration::from_secs(120), || format!("demo took {:?}", elapsed / 2))?;
    Ok(format!("{} identical bytes, {:.2?} per run", first.stdout.len(), elapsed / 2))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("coherence suite", criterion_1),
        ("partial-trace oracles", criterion_2),
        ("measure bounds", criterion_3),
        ("universal combiner", criterion_4),
        ("classical and quantum tests", criterion_5),
        ("string selection and lifting", criterion_6),
        ("projection distance bounds", criterion_7),
        ("compression through a strong Solovay test", criterion_8),
        ("incompressibility test masses", criterion_9),
        ("law of large numbers statistic", criterion_10),
        ("entropy statistics", criterion_11),
        ("CLI determinism", criterion_12),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|p| {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panic".into());
                Err(format!("panicked: {msg}"))
            });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(reason) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {reason}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
