//! The scenario suite run by `qcantor demo`: every headline property of the
//! library checked on fixtures and seeded random instances.

use num::{BigRational, One};
use serde::Serialize;
use serde_json::{json, Value};

use qcantor::bits::BitString;
use qcantor::bridge::{check_lifting, coverage, derive_classical_test, select_strings};
use qcantor::compression::{
    build_part1_test, compress_via_test, solovay_to_machine, LengthFunction, StateDictionary,
    UnitaryMachine,
};
use qcantor::entropy::{cross_entropy_statistic, entropy_rate, von_neumann_entropy};
use qcantor::fixtures;
use qcantor::linalg::scalar::pow2_neg;
use qcantor::linalg::{
    fidelity, projection_join, projection_weight, state_project, trace_distance, TraceDistanceMode,
};
use qcantor::randomness::{evaluate_test, lln_statistic, universal_combine, verdict, Semantics};
use qcantor::states::{biased_qubit, check_coherence, epr_pair, ClassicalSequence, CoherentState};
use qcantor::{DensityMatrix, Real, Result, SpecialProjection};

use crate::report::{Outcome, Table};

#[derive(Clone, Debug, Serialize)]
pub struct Scenario {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub details: Value,
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn coherence_suite(seed: u64) -> Result<(bool, Value)> {
    let depth = 8;
    let mut states = fixtures::states(depth);
    let mut rng = fixtures::rng(seed);
    for i in 0..20 {
        states.push(fixtures::random_matrix_sequence(&mut rng, depth, 3)?.with_label(format!("random {i}")));
    }
    let mut rows = Vec::new();
    let mut ok = true;
    for s in &states {
        let r = check_coherence(s, depth)?;
        ok &= r.holds();
        rows.push(json!({ "state": s.label(), "max_deviation": r.max_deviation, "holds": r.holds() }));
    }
    Ok((ok, json!(rows)))
}

fn partial_trace_oracles() -> Result<(bool, Value)> {
    let ten = DensityMatrix::basis(&"10".parse()?).partial_trace()?;
    let a = ten == DensityMatrix::basis(&"1".parse()?);
    let b = epr_pair().partial_trace()? == DensityMatrix::maximally_mixed(1);
    Ok((a && b, json!({ "basis_10": a, "bell_pair": b })))
}

fn mass_bounds(seed: u64) -> Result<(bool, Value)> {
    let mut ok = true;
    let mut tests = Vec::new();
    for t in fixtures::qml_tests(7, 8) {
        let holds = t.check_mass_bounds(8).is_ok();
        ok &= holds;
        tests.push(json!({ "test": t.label, "holds": holds }));
    }
    let mut rng = fixtures::rng(seed ^ 0x3);
    let mut worst = f64::NEG_INFINITY;
    for i in 0..100 {
        let n = 1 + i % 4;
        let g = fixtures::random_projection(&mut rng, n, 3);
        let h = fixtures::random_projection(&mut rng, n, 3);
        let join = projection_join(&g, &h)?;
        let slack = join.tracial_value().to_f64() - g.tracial_value().to_f64() - h.tracial_value().to_f64();
        worst = worst.max(slack);
    }
    ok &= worst <= 1e-9;
    Ok((ok, json!({ "tests": tests, "max_join_excess": worst })))
}

fn universal() -> Result<(bool, Value)> {
    let tests = fixtures::qml_tests(7, 8);
    let states = fixtures::states(8);
    let mut ok = true;
    let mut worst_gap = f64::INFINITY;
    for n in 0..=3 {
        for k in n + 1..=8 {
            let qk = universal_combine(&tests, n, k)?;
            ok &= qk.tracial_value().at_most(&Real::Exact(pow2_neg(n as u32)), 1e-9);
            for rho in &states {
                let v = rho.evaluate(qk.matrix())?.to_f64();
                for (e, t) in tests.iter().enumerate().take(k - n) {
                    let p = t.levels[n + e + 1].projection(k)?;
                    let gap = v - rho.evaluate(p.matrix())?.to_f64();
                    worst_gap = worst_gap.min(gap);
                }
            }
        }
    }
    ok &= worst_gap >= -1e-9;
    Ok((ok, json!({ "min_domination_gap": worst_gap })))
}

fn bridge_suite() -> Result<(bool, Value)> {
    let zeros = CoherentState::from_bits(ClassicalSequence::constant(false, 8));
    let prefix = fixtures::prefix_test(7, 8);
    let values = evaluate_test(&zeros, &prefix, 8)?;
    let v = verdict(&values, &q(99, 100), Semantics::MartinLof)?;
    let a = v.fails();

    let z = fixtures::rotated_fixture_sequence(8);
    let rotated = fixtures::rotated_basis_test(&z, 6, 8)?;
    let half = q(1, 2);
    let derived = derive_classical_test(&rotated, &half, 8)?;
    let cov = coverage(&rotated, &derived, &z, &half, 8)?;
    let b = derived.levels.iter().all(|l| {
        let bound = if l.r == 0 { BigRational::from_integer(2.into()) } else { pow2_neg(l.r as u32 - 1) };
        l.measure <= bound
    }) && cov.iter().all(|c| c.covered);
    let measures: Vec<String> = derived.levels.iter().map(|l| l.measure.to_string()).collect();
    Ok((a && b, json!({ "classical_to_quantum": v, "derived_measures": measures, "covered": b })))
}

fn all_fixture_projections(seed: u64) -> Result<Vec<SpecialProjection>> {
    let mut out = Vec::new();
    for t in fixtures::qml_tests(6, 5) {
        for g in &t.levels {
            for k in 0..=5 {
                out.push(g.projection(k)?.clone());
            }
        }
    }
    let mut rng = fixtures::rng(seed ^ 0x6);
    for i in 0..20 {
        out.push(fixtures::random_projection(&mut rng, 1 + i % 5, 3));
    }
    Ok(out)
}

fn selection_claims(seed: u64) -> Result<(bool, Value)> {
    let deltas = [q(1, 4), q(1, 3), q(1, 2), q(3, 4)];
    let mut checked = 0;
    let mut ok = true;
    for p in all_fixture_projections(seed)? {
        let tau = p.tracial_value().as_exact().cloned().expect("rank-based");
        for d in &deltas {
            let s = select_strings(&p, d)?;
            ok &= s.measure() <= &tau / d;
            ok &= check_lifting(&p, d)?;
            checked += 1;
        }
    }
    Ok((ok, json!({ "checked": checked })))
}

fn projection_bounds(seed: u64) -> Result<(bool, Value)> {
    let mut rng = fixtures::rng(seed ^ 0x7);
    let mut worst_alpha = f64::NEG_INFINITY;
    let mut worst_fid = f64::NEG_INFINITY;
    let mut pairs = 0;
    while pairs < 200 {
        let n = 1 + pairs % 4;
        let s = fixtures::random_density(&mut rng, n, 3, 0.6);
        let p = fixtures::random_projection(&mut rng, n, 1 << (n - 1));
        let alpha = projection_weight(&s, &p)?.to_f64();
        if alpha <= 0.01 {
            continue;
        }
        let proj = state_project(&s, &p)?;
        let d = trace_distance(&proj, &s, TraceDistanceMode::Standard)?;
        let f = fidelity(&s, &proj)?;
        worst_alpha = worst_alpha.max(d - (1.0 - alpha).max(0.0).sqrt());
        worst_fid = worst_fid.max(d - (1.0 - f * f).max(0.0).sqrt());
        pairs += 1;
    }
    let ok = worst_alpha <= 1e-8 && worst_fid <= 1e-8;
    Ok((ok, json!({ "pairs": pairs, "max_excess_alpha": worst_alpha, "max_excess_fidelity": worst_fid })))
}

fn part2() -> Result<(bool, Value)> {
    let test = fixtures::strong_solovay_test(3)?;
    let rho = fixtures::strong_solovay_state(4)?;
    let sm = solovay_to_machine(&test, 4)?;
    let mut ok = true;
    let mut rows = Vec::new();
    for (r, (n, p)) in test.items().iter().enumerate() {
        let tau = p.tracial_value().as_exact().cloned().expect("rank-based");
        let f = sm.f(*n) as u32;
        ok &= pow2_neg(f) >= tau && tau > pow2_neg(f + 1);
        let c = compress_via_test(&rho, &test, r, 0.1)?;
        ok &= c.record.k == sm.g(*n) && c.record.k < *n;
        ok &= c.record.achieved_distance <= 0.1f64.sqrt() + 1e-8;
        rows.push(json!({ "r": r, "n": n, "k": c.record.k, "alpha": c.alpha, "distance": c.record.achieved_distance }));
    }
    Ok((ok, json!(rows)))
}

fn part1() -> Result<(bool, Value)> {
    let f = LengthFunction::TwiceCeilLog;
    let mass_ok = f.mass(1..=8) <= q(1, 4);
    let id = UnitaryMachine::identity(8);
    let dict = StateDictionary::basis_strings(8);
    let mut ok = mass_ok;
    let mut rows = Vec::new();
    for r in 0..=4 {
        let mut prev: Option<SpecialProjection> = None;
        for t in [12, 62, 126, 254, 510] {
            let p = build_part1_test(&id, &f, &dict, r, t, 8)?.projection;
            let tau = p.tracial_value().as_exact().cloned().expect("rank-based");
            ok &= tau <= pow2_neg(r as u32);
            if let Some(prev) = &prev {
                ok &= prev.is_below(&p)?;
            }
            prev = Some(p);
        }
        let last = prev.expect("nonempty");
        rows.push(json!({ "r": r, "mass": last.tracial_value() }));
    }
    let z = CoherentState::from_bits(ClassicalSequence::constant(false, 8));
    let p = build_part1_test(&id, &f, &dict, 0, 63, 6)?.projection;
    let reach = z.evaluate(p.matrix())? == Real::Exact(BigRational::one());
    ok &= reach;
    Ok((ok, json!({ "mass_sum_1_to_8": f.mass(1..=8).to_string(), "levels": rows, "contrapositive": reach })))
}

fn lln() -> Result<(bool, Value)> {
    let tracial = CoherentState::tracial(10);
    let iid = CoherentState::iid_state(biased_qubit(&q(1, 3))?, 10)?;
    let pattern: BitString = "0110100".parse()?;
    let bits = ClassicalSequence::periodic(&pattern, 10)?;
    let z = CoherentState::from_bits(bits.clone());
    let mut ok = true;
    for n in 1..=10 {
        ok &= lln_statistic(&tracial, n)? == Real::Exact(q(1, 2));
        ok &= lln_statistic(&iid, n)? == Real::Exact(q(1, 3));
        let ones = bits.prefix(n)?.count_ones() as i64;
        ok &= lln_statistic(&z, n)? == Real::Exact(q(ones, n as i64));
    }
    Ok((ok, json!({ "max_n": 10 })))
}

fn entropy_suite() -> Result<(bool, Value)> {
    let mut ok = true;
    for n in 1..=6 {
        ok &= (von_neumann_entropy(&DensityMatrix::maximally_mixed(n)) - n as f64).abs() <= 1e-9;
    }
    let tracial = CoherentState::tracial(6);
    for rho in fixtures::states(6) {
        for n in 1..=6 {
            ok &= cross_entropy_statistic(&rho, &tracial, n)? == 1.0;
        }
    }
    let p = 0.25f64;
    let h = -p * p.log2() - (1.0 - p) * (1.0 - p).log2();
    let iid = CoherentState::iid_state(biased_qubit(&q(1, 4))?, 6)?;
    let mut worst: f64 = 0.0;
    for n in 1..=6 {
        worst = worst.max((cross_entropy_statistic(&iid, &iid, n)? - h).abs());
    }
    ok &= worst <= 1e-9;
    let rates: Vec<f64> = entropy_rate(&iid, 6)?.levels.iter().map(|l| l.rate).collect();
    Ok((ok, json!({ "iid_self_max_error": worst, "iid_rates": rates })))
}

/// Runs every scenario. Randomized scenarios draw from streams derived from
/// `seed`.
pub fn run(seed: u64) -> Result<Vec<Scenario>> {
    type Step = Box<dyn Fn() -> Result<(bool, Value)>>;
    let steps: Vec<(&'static str, Step)> = vec![
        ("coherence suite", Box::new(move || coherence_suite(seed))),
        ("partial trace oracles", Box::new(partial_trace_oracles)),
        ("measure bounds and joins", Box::new(move || mass_bounds(seed))),
        ("universal combiner", Box::new(universal)),
        ("classical and quantum tests", Box::new(bridge_suite)),
        ("string selection and lifting", Box::new(move || selection_claims(seed))),
        ("projection distance bounds", Box::new(move || projection_bounds(seed))),
        ("compression through a Solovay test", Box::new(part2)),
        ("incompressibility test masses", Box::new(part1)),
        ("law of large numbers statistic", Box::new(lln)),
        ("entropy statistics", Box::new(entropy_suite)),
    ];
    steps
        .into_iter()
        .enumerate()
        .map(|(i, (name, step))| {
            let (passed, details) = step()?;
            Ok(Scenario { id: i + 1, name, passed, details })
        })
        .collect()
}

pub fn demo(seed: u64) -> Result<Outcome> {
    let scenarios = run(seed)?;
    let mut table = Table::new(&["id", "scenario", "passed"]);
    for s in &scenarios {
        table.push(vec![s.id.to_string(), s.name.to_string(), s.passed.to_string()]);
    }
    let violation = scenarios.iter().any(|s| !s.passed);
    Ok(Outcome::new(json!({ "seed": seed, "scenarios": scenarios }), violation, table))
}
