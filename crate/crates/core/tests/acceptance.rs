//! Acceptance criteria, one line per criterion. Runs without the test
//! harness so the lines are always printed; exits nonzero if any fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use ppt_core::depgraph::{enumerate_loops, DepGraph};
use ppt_core::transform::{completion, external_support, simplify};
use ppt_core::verifier::{
    lemma_batch, semantics_batch, target_formulas, theorem_batch, GenConfig, Mode,
};
use ppt_core::{
    enumerate_ltlf_models, enumerate_ts_models, parse_ext_formula, parse_program, Atom, Budget,
    ExtFormula, Program, RuleKind, Trace,
};

const THEOREM_CASES: usize = 500;
const THEOREM_SEED: u64 = 20_240_601;
const LEMMA_CASES: usize = 10_000;
const LEMMA_SEED: u64 = 7;
const SEMANTICS_CASES: usize = 10_000;
const SEMANTICS_SEED: u64 = 11;
const MAX_SKIP_RATE: f64 = 0.8;
const EXAMPLE_TIME_LIMIT: Duration = Duration::from_secs(1);

fn p1() -> Program {
    parse_program(include_str!("../examples/p1.ppt")).unwrap()
}

fn p2() -> Program {
    parse_program(include_str!("../examples/p2.ppt")).unwrap()
}

fn set(names: &[&str]) -> BTreeSet<Atom> {
    names.iter().map(|n| Atom::new(*n).unwrap()).collect()
}

fn shoot_trace() -> Trace {
    Trace::new(vec![set(&["load"]), set(&["shoot", "dead"])]).unwrap()
}

fn ltlf_models(p: &Program, fs: &[ExtFormula], len: usize) -> BTreeSet<Trace> {
    enumerate_ltlf_models(fs, len, p.alphabet(), Budget::default()).unwrap()
}

fn criterion_1() -> (bool, String) {
    let p = p1();
    let start = Instant::now();
    let models = enumerate_ts_models(&p, 2, p.alphabet(), Budget::default()).unwrap();
    let took = start.elapsed();
    let ok = models == BTreeSet::from([shoot_trace()]) && took < EXAMPLE_TIME_LIMIT;
    (
        ok,
        format!("{} stable model(s) in {took:.2?}", models.len()),
    )
}

fn criterion_2() -> (bool, String) {
    let p = p1();
    let start = Instant::now();
    let models = ltlf_models(&p, &completion(&p), 2);
    let took = start.elapsed();
    let ok = models == BTreeSet::from([shoot_trace()]) && took < EXAMPLE_TIME_LIMIT;
    (
        ok,
        format!("{} completion model(s) in {took:.2?}", models.len()),
    )
}

fn criterion_3() -> (bool, String) {
    let p = p2();
    let stable = enumerate_ts_models(&p, 2, p.alphabet(), Budget::default()).unwrap();
    let cf = ltlf_models(&p, &completion(&p), 2);
    let ok = stable.is_empty() && cf.contains(&shoot_trace());
    (
        ok,
        format!("{} stable, {} completion model(s)", stable.len(), cf.len()),
    )
}

fn criterion_4() -> (bool, String) {
    let p = p1();
    let atoms_of = |g: &DepGraph, unitary| -> BTreeSet<BTreeSet<Atom>> {
        enumerate_loops(g, unitary)
            .unwrap()
            .into_iter()
            .map(|l| l.atoms)
            .collect()
    };
    let init = DepGraph::of_section(&p, RuleKind::Initial).unwrap();
    let dynamic = DepGraph::of_section(&p, RuleKind::Dynamic).unwrap();
    let unitary_expected = BTreeSet::from([
        set(&["load"]),
        set(&["unload"]),
        set(&["shoot"]),
        set(&["dead"]),
        set(&["shoot", "dead"]),
    ]);
    let ok = atoms_of(&init, false).is_empty()
        && atoms_of(&dynamic, false) == BTreeSet::from([set(&["shoot", "dead"])])
        && atoms_of(&dynamic, true) == unitary_expected;
    (
        ok,
        format!("{} unitary dynamic loops", atoms_of(&dynamic, true).len()),
    )
}

fn criterion_5() -> (bool, String) {
    let l = set(&["shoot", "dead"]);
    let es = |p: &Program| {
        simplify(&ExtFormula::from(external_support(
            p.section(RuleKind::Dynamic),
            &l,
        )))
    };
    let (es1, es2) = (es(&p1()), es(&p2()));
    let ok = es2 == ExtFormula::Falsum && es1 == parse_ext_formula("not load, not unload").unwrap();
    (ok, format!("ES_P1 = {es1}; ES_P2 = {es2}"))
}

fn criterion_6() -> (bool, String) {
    let (a, b) = (p1(), p2());
    let m1 = ltlf_models(&a, &target_formulas(&a, Mode::CompletionLoops).unwrap(), 2);
    let m2 = ltlf_models(&b, &target_formulas(&b, Mode::CompletionLoops).unwrap(), 2);
    let ok = m1 == BTreeSet::from([shoot_trace()]) && m2.is_empty();
    (ok, format!("{} and {} model(s)", m1.len(), m2.len()))
}

fn criterion_7() -> (bool, String) {
    let p = p1();
    let models = ltlf_models(&p, &target_formulas(&p, Mode::UnitaryLoops).unwrap(), 2);
    let ok = models == BTreeSet::from([shoot_trace()]);
    (ok, format!("{} model(s)", models.len()))
}

fn criterion_8() -> (bool, String) {
    let cfg = GenConfig {
        seed: THEOREM_SEED,
        max_atoms: 3,
        max_rules: 6,
        lengths: (1, 3),
        ..GenConfig::default()
    };
    let stats = theorem_batch(&cfg, THEOREM_CASES, Budget::default());
    for f in stats.failures.iter().take(5) {
        eprintln!("  seed {} failed {}:\n{}", f.seed, f.check, f.detail);
    }
    let n = stats.cases;
    (
        stats.passed(),
        format!(
            "loops {}/{n}, unitary {}/{n}, tight {}/{}, completion sound {}/{n}; \
             {} with stable models, {} completion gaps",
            stats.completion_loops_agree,
            stats.unitary_loops_agree,
            stats.tight_completion_agree,
            stats.tight_cases,
            stats.completion_sound,
            stats.with_stable_models,
            stats.completion_gaps
        ),
    )
}

fn criterion_9() -> (bool, String) {
    let stats = lemma_batch(LEMMA_SEED, LEMMA_CASES);
    for f in stats.failures.iter().take(5) {
        eprintln!("  seed {} failed {}: {}", f.seed, f.check, f.detail);
    }
    let (s, p) = (stats.support, stats.pastocc);
    let ok = stats.failures.is_empty()
        && s.total() == LEMMA_CASES
        && p.total() == LEMMA_CASES
        && s.skip_rate() < MAX_SKIP_RATE
        && p.skip_rate() < MAX_SKIP_RATE;
    (
        ok,
        format!(
            "support {} violated, {:.1}% skipped; pastocc {} violated, {:.1}% skipped",
            s.violated,
            100.0 * s.skip_rate(),
            p.violated,
            100.0 * p.skip_rate()
        ),
    )
}

fn criterion_10() -> (bool, String) {
    let stats = semantics_batch(SEMANTICS_SEED, SEMANTICS_CASES);
    for f in stats.failures.iter().take(5) {
        eprintln!("  seed {}: {}", f.seed, f.detail);
    }
    (
        stats.failures.is_empty(),
        format!(
            "{} pairs, {} point checks, {} failures",
            stats.cases,
            stats.point_checks,
            stats.failures.len()
        ),
    )
}

type Check = fn() -> (bool, String);

fn main() -> ExitCode {
    let criteria: [(&str, Check); 10] = [
        (
            "P1 has the unique stable model {load}.{dead,shoot} at length 2",
            criterion_1,
        ),
        ("completion of P1 has the same unique model", criterion_2),
        (
            "P2 has no stable model but its completion admits {load}.{dead,shoot}",
            criterion_3,
        ),
        ("loop inventories of P1 in both regimes", criterion_4),
        ("external support goldens for P1 and P2", criterion_5),
        ("completion plus loop formulas on P1 and P2", criterion_6),
        ("rules plus unitary loop formulas on P1", criterion_7),
        (
            "500 random programs: loop, unitary and tight completion correspondences",
            criterion_8,
        ),
        ("masking lemma instances", criterion_9),
        (
            "three-valued and since/trigger unfolding cross-checks",
            criterion_10,
        ),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = check();
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {name} [{detail}] ({:.2?})",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            start.elapsed()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
