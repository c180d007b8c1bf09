//! The subcommands. Each returns an [`Outcome`] or a [`CliError`].

use num::BigRational;
use serde::Serialize;
use serde_json::json;

use qcantor::bridge::{coverage, derive_classical_test};
use qcantor::compression::{
    build_part1_test, compress_via_test, qc_complexity, solovay_to_machine, LengthFunction,
    StateDictionary, UnitaryMachine,
};
use qcantor::entropy::{cross_entropy_profile, entropy_rate};
use qcantor::io::matrix_to_json;
use qcantor::linalg::scalar::pow2_neg;
use qcantor::randomness::{
    evaluate_test, infimum, sigma1_mass, verdict, Semantics, Sigma1Levels, Verdict,
};
use qcantor::states::{check_coherence, CoherentState};
use qcantor::{Error, Real};

use crate::config::{rational, BuiltTest, CompressMode, ExperimentConfig, StateSpec};
use crate::report::{Outcome, Table};

/// How a run ends when it does not produce a normal report.
#[derive(Debug)]
pub enum CliError {
    /// Bad input or configuration; exit code 2.
    Usage(String),
    /// A checked property failed; exit code 1 with a report.
    Violation(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::MeasureBoundViolated { .. }
            | Error::MassBoundViolated(_)
            | Error::MeasureInvariant { .. }
            | Error::NotMonotone { .. }
            | Error::StatePasses { .. }
            | Error::StatisticUndefined(_)
            | Error::NoWitness { .. } => CliError::Violation(e.to_string()),
            Error::DepthExceeded { requested, max } => {
                CliError::Usage(format!("depth mismatch: level {requested} requested, {max} available"))
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

pub type CmdResult = std::result::Result<Outcome, CliError>;

/// Parameters resolved from flags, configuration and defaults.
pub struct Params {
    pub depth: usize,
    pub deltas: Vec<BigRational>,
    pub epsilon: f64,
    pub seed: u64,
}

fn state_spec<'a>(config: &'a ExperimentConfig, what: &str) -> Result<&'a StateSpec, CliError> {
    config.state.as_ref().ok_or_else(|| CliError::Usage(format!("{what} needs a state")))
}

fn test_spec(config: &ExperimentConfig, depth: usize) -> Result<BuiltTest, CliError> {
    let spec = config.test.as_ref().ok_or_else(|| CliError::Usage("a test is required".into()))?;
    Ok(spec.build(depth)?)
}

fn real_cell(r: &Real) -> String {
    r.to_string()
}

pub fn coherence(config: &ExperimentConfig, p: &Params) -> CmdResult {
    let rho = state_spec(config, "coherence")?.build(p.depth, p.seed)?;
    let report = check_coherence(&rho, p.depth)?;
    let mut table = Table::new(&["n", "deviation", "exact"]);
    for l in &report.levels {
        table.push(vec![l.n.to_string(), format!("{:e}", l.deviation), l.exact.to_string()]);
    }
    let holds = report.holds();
    let first = report.first_violation();
    let mut out = Outcome::new(
        json!({ "holds": holds, "first_violation": first, "report": report }),
        !holds,
        table,
    );
    if first.is_some() {
        let failing: Vec<String> = report
            .levels
            .iter()
            .filter(|l| if l.exact { l.deviation != 0.0 } else { l.deviation > qcantor::TOL_EIG })
            .map(|l| format!("T(rho_{}) != rho_{}", l.n + 1, l.n))
            .collect();
        out = out.note(format!("coherence fails: {}", failing.join(", ")));
    }
    Ok(out)
}

#[derive(Serialize)]
struct LevelRow {
    r: usize,
    value: Real,
    mass: Real,
    mass_monotone: bool,
}

#[derive(Serialize)]
struct VerdictRow {
    #[serde(serialize_with = "qcantor::io::ser_rational")]
    delta: BigRational,
    verdict: Verdict,
}

fn level_rows(rho: &CoherentState, test: &impl Sigma1Levels, depth: usize) -> Result<Vec<LevelRow>, CliError> {
    let values = evaluate_test(rho, test, depth)?;
    test.levels()
        .iter()
        .zip(values)
        .enumerate()
        .map(|(r, (g, value))| {
            let mass = sigma1_mass(g, depth)?;
            Ok(LevelRow { r, value, mass: mass.value, mass_monotone: mass.monotone })
        })
        .collect()
}

pub fn test_eval(config: &ExperimentConfig, p: &Params) -> CmdResult {
    let rho = state_spec(config, "test-eval")?.build(p.depth, p.seed)?;
    let (rows, semantics, total_mass) = match test_spec(config, p.depth)? {
        BuiltTest::Qml(t) => {
            t.check_mass_bounds(p.depth)?;
            (level_rows(&rho, &t, p.depth)?, Semantics::MartinLof, None)
        }
        BuiltTest::Solovay { test, threshold } => {
            let total = test.check_mass_bound(p.depth)?;
            (level_rows(&rho, &test, p.depth)?, Semantics::Solovay { threshold }, Some(total))
        }
        BuiltTest::Strong { test, threshold } => {
            let solovay = test.to_solovay(p.depth);
            let total = solovay.check_mass_bound(p.depth)?;
            (level_rows(&rho, &solovay, p.depth)?, Semantics::Solovay { threshold }, Some(total))
        }
    };
    let values: Vec<Real> = rows.iter().map(|r| r.value.clone()).collect();
    let verdicts = p
        .deltas
        .iter()
        .map(|d| Ok(VerdictRow { delta: d.clone(), verdict: verdict(&values, d, semantics)? }))
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut table = Table::new(&["r", "value", "mass"]);
    for row in &rows {
        table.push(vec![row.r.to_string(), real_cell(&row.value), real_cell(&row.mass)]);
    }
    let violation = verdicts.iter().any(|v| v.verdict.fails());
    let notes: Vec<String> = verdicts
        .iter()
        .map(|v| format!("delta={}: {}", v.delta, describe(&v.verdict)))
        .collect();
    let mut out = Outcome::new(
        json!({
            "semantics": semantics,
            "levels": rows,
            "infimum": infimum(&values)?,
            "total_mass": total_mass,
            "verdicts": verdicts,
        }),
        violation,
        table,
    );
    for n in notes {
        out = out.note(n);
    }
    Ok(out)
}

fn describe(v: &Verdict) -> String {
    match v {
        Verdict::FailsUpToDepth { levels } => format!("fails up to depth ({levels} levels exceed delta)"),
        Verdict::PassesWitnessed { level, strict } => {
            format!("passes witnessed at r={level}{}", if *strict { "" } else { " (value equals delta)" })
        }
        Verdict::SolovayFails { exceeding, threshold } => {
            format!("fails: {exceeding} levels exceed delta (threshold {threshold})")
        }
        Verdict::SolovayPasses { exceeding, threshold } => {
            format!("passes: {exceeding} levels exceed delta (threshold {threshold})")
        }
    }
}

pub fn bridge(config: &ExperimentConfig, p: &Params) -> CmdResult {
    let BuiltTest::Qml(test) = test_spec(config, p.depth)? else {
        return Err(CliError::Usage("bridge needs a qml or classical test".into()));
    };
    test.check_mass_bounds(p.depth)?;
    let delta = p.deltas.first().expect("at least one delta").clone();
    let derived = derive_classical_test(&test, &delta, p.depth)?;
    let sequence = match &config.state {
        Some(spec) => spec.sequence(p.depth)?,
        None => None,
    };
    let cov = match &sequence {
        Some(z) => Some(coverage(&test, &derived, z, &delta, p.depth)?),
        None => None,
    };
    let mut table = Table::new(&["r", "measure", "bound", "value", "obligation", "covered"]);
    for (i, level) in derived.levels.iter().enumerate() {
        let c = cov.as_ref().map(|c| &c[i]);
        table.push(vec![
            level.r.to_string(),
            level.measure.to_string(),
            level.bound.to_string(),
            c.map(|c| real_cell(&c.value)).unwrap_or_default(),
            c.map(|c| c.obligation.to_string()).unwrap_or_default(),
            c.map(|c| c.covered.to_string()).unwrap_or_default(),
        ]);
    }
    let violation = cov.as_ref().is_some_and(|c| c.iter().any(|l| l.obligation && !l.covered));
    let mut out = Outcome::new(
        json!({
            "delta": delta.to_string(),
            "levels": derived.levels,
            "coverage": cov,
        }),
        violation,
        table,
    );
    match &cov {
        None => out = out.note("state is not a bit sequence; coverage not computed"),
        Some(c) if c.iter().all(|l| !l.obligation) => {
            out = out.note("no coverage obligation: no level reaches delta on this sequence")
        }
        Some(_) => {}
    }
    Ok(out)
}

fn machine(config: &ExperimentConfig, depth: usize) -> Result<UnitaryMachine, CliError> {
    Ok(match &config.machine {
        Some(m) => m.build(depth)?,
        None => UnitaryMachine::identity(depth),
    })
}

fn dictionary(config: &ExperimentConfig, depth: usize) -> Result<StateDictionary, CliError> {
    Ok(match &config.dictionary {
        Some(d) => d.build(depth)?,
        None => StateDictionary::basis_strings(depth),
    })
}

pub fn compress(config: &ExperimentConfig, p: &Params) -> CmdResult {
    if !(p.epsilon > 0.0 && p.epsilon < 1.0) {
        return Err(CliError::Usage(format!("epsilon {} must lie in (0,1)", p.epsilon)));
    }
    match config.mode.unwrap_or_default() {
        CompressMode::Qc => compress_qc(config, p),
        CompressMode::Part1 => compress_part1(config, p),
        CompressMode::Part2 => compress_part2(config, p),
    }
}

fn compress_qc(config: &ExperimentConfig, p: &Params) -> CmdResult {
    let rho = state_spec(config, "compress")?.build(p.depth, p.seed)?;
    let l = machine(config, p.depth)?;
    let dict = dictionary(config, p.depth)?;
    let x = rho.level(p.depth)?;
    let rec = qc_complexity(&l, x, p.epsilon, &dict, &[])?;
    let mut table = Table::new(&["n", "k", "source", "achieved_distance", "accuracy"]);
    table.push(vec![
        rec.n.to_string(),
        rec.k.to_string(),
        serde_json::to_string(&rec.source).expect("serializes"),
        format!("{:e}", rec.achieved_distance),
        rec.accuracy.to_string(),
    ]);
    Ok(Outcome::new(
        json!({ "record": rec, "witness": matrix_to_json(rec.witness.matrix()) }),
        false,
        table,
    ))
}

fn compress_part1(config: &ExperimentConfig, p: &Params) -> CmdResult {
    let l = machine(config, p.depth)?;
    let dict = dictionary(config, p.depth)?;
    let f = config.length.as_ref().map(|s| s.build()).unwrap_or(LengthFunction::TwiceCeilLog);
    let rho = match &config.state {
        Some(s) => Some(s.build(p.depth, p.seed)?),
        None => None,
    };
    let t = dict.last_index_up_to_length(p.depth).unwrap_or(0);
    let max_r = config.level.unwrap_or(4);
    let mut table = Table::new(&["r", "mass", "bound", "within_bound", "value"]);
    let mut rows = Vec::new();
    let mut violation = false;
    for r in 0..=max_r {
        let built = build_part1_test(&l, &f, &dict, r, t, p.depth)?;
        let mass = built.projection.tracial_value();
        let bound = Real::Exact(pow2_neg(r as u32));
        let within = mass.at_most(&bound, qcantor::TOL_EIG);
        violation |= !within;
        let value = match &rho {
            Some(rho) => Some(rho.evaluate(built.projection.matrix())?),
            None => None,
        };
        table.push(vec![
            r.to_string(),
            real_cell(&mass),
            real_cell(&bound),
            within.to_string(),
            value.as_ref().map(real_cell).unwrap_or_default(),
        ]);
        rows.push(json!({
            "r": r,
            "t": t,
            "mass": mass,
            "bound": bound,
            "within_bound": within,
            "pieces": built.pieces,
            "value": value,
        }));
    }
    Ok(Outcome::new(json!({ "levels": rows }), violation, table))
}

fn compress_part2(config: &ExperimentConfig, p: &Params) -> CmdResult {
    let rho = state_spec(config, "compress")?.build(p.depth, p.seed)?;
    let BuiltTest::Strong { test, .. } = test_spec(config, p.depth)? else {
        return Err(CliError::Usage("part2 compression needs a strong_solovay test".into()));
    };
    let sm = solovay_to_machine(&test, p.depth)?;
    let items: Vec<usize> = match config.level {
        Some(r) => vec![r],
        None => (0..test.max_levels()).filter(|&r| test.items()[r].0 <= p.depth).collect(),
    };
    let mut table = Table::new(&[
        "r", "n", "f", "g", "k", "alpha", "achieved_distance", "accuracy", "projection_bound",
    ]);
    let mut rows = Vec::new();
    let mut violation = false;
    for r in items {
        match compress_via_test(&rho, &test, r, p.epsilon) {
            Ok(c) => {
                table.push(vec![
                    r.to_string(),
                    c.n.to_string(),
                    c.f_n.to_string(),
                    c.g_n.to_string(),
                    c.record.k.to_string(),
                    real_cell(&c.alpha),
                    format!("{:e}", c.record.achieved_distance),
                    c.record.accuracy.to_string(),
                    c.projection_bound.to_string(),
                ]);
                rows.push(json!({ "r": r, "compression": c }));
            }
            Err(e @ Error::StatePasses { .. }) => {
                violation = true;
                table.push(vec![r.to_string(), format!("precondition fails: {e}")]);
                rows.push(json!({ "r": r, "error": format!("precondition fails: {e}") }));
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Outcome::new(json!({ "grid": sm.grid, "items": rows }), violation, table))
}

pub fn entropy(config: &ExperimentConfig, p: &Params) -> CmdResult {
    let rho = state_spec(config, "entropy")?.build(p.depth, p.seed)?;
    let report = match &config.reference {
        Some(spec) => cross_entropy_profile(&rho, &spec.build(p.depth, p.seed)?, p.depth)?,
        None => entropy_rate(&rho, p.depth)?,
    };
    let mut table = Table::new(&["n", "H_n", "rate_n", "cross_entropy_n"]);
    for l in &report.levels {
        table.push(vec![
            l.n.to_string(),
            l.entropy.to_string(),
            l.rate.to_string(),
            l.cross_entropy.map(|c| c.to_string()).unwrap_or_default(),
        ]);
    }
    let undefined: Vec<usize> = if config.reference.is_some() {
        report.levels.iter().filter(|l| l.cross_entropy.is_none()).map(|l| l.n).collect()
    } else {
        Vec::new()
    };
    let mut out = Outcome::new(&report, !undefined.is_empty(), table);
    if !undefined.is_empty() {
        out = out.note(format!("statistic undefined at lengths {undefined:?}"));
    }
    Ok(out)
}

/// Parses the `δ` list, defaulting to `1/2`.
pub fn parse_deltas(items: &[String]) -> Result<Vec<BigRational>, CliError> {
    if items.is_empty() {
        return Ok(vec![rational("1/2").expect("literal")]);
    }
    items.iter().map(|d| rational(d).map_err(CliError::from)).collect()
}
