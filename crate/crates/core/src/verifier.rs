//! Checks that the translations preserve temporal stable models, instance
//! checks of the masking lemmas, and the random generators feeding them.

use std::collections::BTreeSet;
use std::fmt;

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::depgraph::is_tight;
use crate::ltlf::{enumerate_ltlf_models, ExtFormula};
use crate::syntax::{classify_occurrences, Atom, PastFormula, Program, Rule, RuleKind};
use crate::tht::{enumerate_ts_models, ht_sat, valuation, TruthValue};
use crate::trace::{Budget, HtTrace, SemanticsError, Trace};
use crate::transform::{
    completion, loop_formulas, program_as_ltlf, support_transform, TransformError,
};

const MAX_WITNESSES: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

/// Which translation the stable models are compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// The completion alone; exact for tight programs.
    Completion,
    /// Completion plus loop formulas.
    CompletionLoops,
    /// The rules themselves plus loop formulas over unitary cycles.
    UnitaryLoops,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Completion => "completion",
            Mode::CompletionLoops => "completion_loops",
            Mode::UnitaryLoops => "unitary_loops",
        })
    }
}

/// The formulas whose LTLf models should be the stable models of `p`.
pub fn target_formulas(p: &Program, mode: Mode) -> Result<Vec<ExtFormula>, TransformError> {
    Ok(match mode {
        Mode::Completion => completion(p),
        Mode::CompletionLoops => {
            let mut fs = completion(p);
            fs.extend(loop_formulas(p, false)?);
            fs
        }
        Mode::UnitaryLoops => {
            let mut fs = program_as_ltlf(p);
            fs.extend(loop_formulas(p, true)?);
            fs
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// A stable model that the translation misses.
    Lhs,
    /// A model of the translation that is not stable.
    Rhs,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub side: Side,
    pub trace: Trace,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub program: String,
    pub length: usize,
    pub mode: Mode,
    /// Reported in completion mode only, where agreement needs tightness.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tight: Option<bool>,
    pub lhs: Vec<Trace>,
    pub rhs: Vec<Trace>,
    pub equal: bool,
    pub witnesses: Vec<Witness>,
}

/// Compares the stable models of `p` of length `len` with the LTLf models
/// of the translation selected by `mode`, over `p`'s alphabet.
pub fn verify_correspondence(
    p: &Program,
    len: usize,
    mode: Mode,
    budget: Budget,
) -> Result<Report, VerifyError> {
    let lhs = enumerate_ts_models(p, len, p.alphabet(), budget)?;
    let rhs = enumerate_ltlf_models(&target_formulas(p, mode)?, len, p.alphabet(), budget)?;
    let tight = match mode {
        Mode::Completion => Some(is_tight(p).map_err(TransformError::from)?),
        _ => None,
    };
    let witnesses: Vec<Witness> = lhs
        .difference(&rhs)
        .map(|t| Witness {
            side: Side::Lhs,
            trace: t.clone(),
        })
        .chain(rhs.difference(&lhs).map(|t| Witness {
            side: Side::Rhs,
            trace: t.clone(),
        }))
        .take(MAX_WITNESSES)
        .collect();
    Ok(Report {
        program: p.to_string(),
        length: len,
        mode,
        tight,
        equal: lhs == rhs,
        lhs: lhs.into_iter().collect(),
        rhs: rhs.into_iter().collect(),
        witnesses,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MaskError {
    #[error("pivot {pivot} is outside a mask of length {len}")]
    PivotOutOfRange { pivot: usize, len: usize },
    #[error("mask is not empty at point {0}, before the pivot")]
    NonEmptyBeforePivot(usize),
    #[error("the base set is not contained in the mask at the pivot")]
    BaseNotCovered,
}

/// A sequence `X` of atom sets, empty before the pivot `i`, with `L ⊆ X_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceMask {
    base: BTreeSet<Atom>,
    pivot: usize,
    extra: Vec<BTreeSet<Atom>>,
}

impl TraceMask {
    pub fn new(
        base: BTreeSet<Atom>,
        pivot: usize,
        extra: Vec<BTreeSet<Atom>>,
    ) -> Result<Self, MaskError> {
        if pivot >= extra.len() {
            return Err(MaskError::PivotOutOfRange {
                pivot,
                len: extra.len(),
            });
        }
        if let Some(t) = (0..pivot).find(|&t| !extra[t].is_empty()) {
            return Err(MaskError::NonEmptyBeforePivot(t));
        }
        if !base.is_subset(&extra[pivot]) {
            return Err(MaskError::BaseNotCovered);
        }
        Ok(TraceMask { base, pivot, extra })
    }

    pub fn base(&self) -> &BTreeSet<Atom> {
        &self.base
    }

    pub fn pivot(&self) -> usize {
        self.pivot
    }

    pub fn extra(&self) -> &[BTreeSet<Atom>] {
        &self.extra
    }

    pub fn len(&self) -> usize {
        self.extra.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// `⟨H ∖ X, T⟩`.
pub fn mask_trace(m: &HtTrace, mask: &TraceMask) -> Result<HtTrace, SemanticsError> {
    if m.len() != mask.len() {
        return Err(SemanticsError::LengthMismatch {
            here: m.len(),
            there: mask.len(),
        });
    }
    let here = m
        .here()
        .states()
        .iter()
        .zip(mask.extra())
        .map(|(h, x)| h.difference(x).cloned().collect())
        .collect();
    HtTrace::new(Trace::new(here)?, m.there().clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LemmaOutcome {
    Holds,
    Violated,
    /// The instance does not meet the lemma's precondition.
    Skipped,
}

fn outcome(lhs: bool, rhs: bool) -> LemmaOutcome {
    if lhs == rhs {
        LemmaOutcome::Holds
    } else {
        LemmaOutcome::Violated
    }
}

/// `⟨H,T⟩, i ⊨ S_L(f)` iff `⟨H∖X, T⟩, i ⊨ f`, provided every occurrence of
/// an atom of `X_i ∖ L` in `f` is in the scope of negation.
pub fn check_lemma_support(
    f: &PastFormula,
    m: &HtTrace,
    mask: &TraceMask,
) -> Result<LemmaOutcome, SemanticsError> {
    let i = mask.pivot();
    let outside: BTreeSet<&Atom> = mask.extra()[i].difference(mask.base()).collect();
    if classify_occurrences(f)
        .iter()
        .any(|o| outside.contains(&o.atom) && !o.in_scope_of_negation())
    {
        return Ok(LemmaOutcome::Skipped);
    }
    let lhs = ht_sat(m, i, &support_transform(f, mask.base()))?;
    let rhs = ht_sat(&mask_trace(m, mask)?, i, f)?;
    Ok(outcome(lhs, rhs))
}

/// `⟨H,T⟩, i ⊨ f` iff `⟨H∖X, T⟩, i ⊨ f`, provided every present occurrence
/// of an atom of `X_i` in `f` is in the scope of negation.
pub fn check_lemma_pastocc(
    f: &PastFormula,
    m: &HtTrace,
    mask: &TraceMask,
) -> Result<LemmaOutcome, SemanticsError> {
    let i = mask.pivot();
    let masked = &mask.extra()[i];
    if classify_occurrences(f)
        .iter()
        .any(|o| masked.contains(&o.atom) && o.is_present() && !o.in_scope_of_negation())
    {
        return Ok(LemmaOutcome::Skipped);
    }
    let lhs = ht_sat(m, i, f)?;
    let rhs = ht_sat(&mask_trace(m, mask)?, i, f)?;
    Ok(outcome(lhs, rhs))
}

/// Relative weights of the binary and unary connectives in random bodies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Weights {
    pub since: u32,
    pub trigger: u32,
    pub previous: u32,
    pub and: u32,
    pub or: u32,
}

impl Default for Weights {
    fn default() -> Self {
        Weights {
            since: 2,
            trigger: 2,
            previous: 2,
            and: 1,
            or: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    pub seed: u64,
    pub max_atoms: usize,
    pub max_rules: usize,
    pub max_body_depth: usize,
    /// Inclusive bounds for trace lengths.
    pub lengths: (usize, usize),
    pub weights: Weights,
    pub max_negation_depth: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            max_atoms: 3,
            max_rules: 6,
            max_body_depth: 3,
            lengths: (1, 3),
            weights: Weights::default(),
            max_negation_depth: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("max_atoms must be between 1 and 4, got {0}")]
    Atoms(usize),
    #[error("max_rules must be at most 8, got {0}")]
    Rules(usize),
    #[error("max_body_depth must be between 1 and 4, got {0}")]
    Depth(usize),
    #[error("lengths must satisfy 1 <= min <= max <= 4, got {0}..={1}")]
    Lengths(usize, usize),
    #[error("connective weights must not all be zero")]
    Weights,
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), GenError> {
        if !(1..=4).contains(&self.max_atoms) {
            return Err(GenError::Atoms(self.max_atoms));
        }
        if self.max_rules > 8 {
            return Err(GenError::Rules(self.max_rules));
        }
        if !(1..=4).contains(&self.max_body_depth) {
            return Err(GenError::Depth(self.max_body_depth));
        }
        let (lo, hi) = self.lengths;
        if lo == 0 || lo > hi || hi > 4 {
            return Err(GenError::Lengths(lo, hi));
        }
        let w = self.weights;
        if w.since + w.trigger + w.previous + w.and + w.or == 0 {
            return Err(GenError::Weights);
        }
        Ok(())
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        GenConfig {
            seed,
            ..self.clone()
        }
    }
}

const ATOM_POOL: [&str; 4] = ["a", "b", "c", "d"];

fn pool(n: usize) -> Vec<Atom> {
    ATOM_POOL[..n]
        .iter()
        .map(|s| Atom::new(*s).expect("valid name"))
        .collect()
}

/// A random past formula over `atoms` of depth at most `depth`, with at most
/// `negations` nested negations.
pub fn random_formula<R: Rng + ?Sized>(
    rng: &mut R,
    atoms: &[Atom],
    depth: usize,
    negations: usize,
    weights: &Weights,
) -> PastFormula {
    let leaf = |rng: &mut R| match rng.gen_range(0..20) {
        0 => PastFormula::Falsum,
        1 | 2 => PastFormula::verum(),
        _ => PastFormula::Atom(atoms.choose(rng).expect("nonempty alphabet").clone()),
    };
    if depth <= 1 || rng.gen_bool(0.2) {
        return leaf(rng);
    }
    let negate = if negations > 0 { 2 } else { 0 };
    let choice = WeightedIndex::new([
        weights.since,
        weights.trigger,
        weights.previous,
        weights.and,
        weights.or,
        negate,
    ])
    .expect("weights validated");
    let sub = |rng: &mut R, negations| random_formula(rng, atoms, depth - 1, negations, weights);
    match choice.sample(rng) {
        0 => sub(rng, negations).since(sub(rng, negations)),
        1 => sub(rng, negations).trigger(sub(rng, negations)),
        2 => sub(rng, negations).previous(),
        3 => sub(rng, negations).and(sub(rng, negations)),
        4 => sub(rng, negations).or(sub(rng, negations)),
        _ => sub(rng, negations - 1).negate(),
    }
}

fn random_subset<R: Rng + ?Sized>(rng: &mut R, atoms: &[Atom], p: f64) -> BTreeSet<Atom> {
    atoms.iter().filter(|_| rng.gen_bool(p)).cloned().collect()
}

/// A random `⟨H, T⟩` over `atoms` of length `len`.
pub fn random_ht_trace<R: Rng + ?Sized>(rng: &mut R, atoms: &[Atom], len: usize) -> HtTrace {
    let there: Vec<BTreeSet<Atom>> = (0..len).map(|_| random_subset(rng, atoms, 0.5)).collect();
    let here = there
        .iter()
        .map(|t| t.iter().filter(|_| rng.gen_bool(0.6)).cloned().collect())
        .collect();
    HtTrace::new(
        Trace::new(here).expect("len >= 1"),
        Trace::new(there).expect("len >= 1"),
    )
    .expect("here below there")
}

fn random_literals<R: Rng + ?Sized>(rng: &mut R, atoms: &[Atom]) -> PastFormula {
    let n = rng.gen_range(0..=2);
    PastFormula::conjunction((0..n).map(|_| {
        let a = PastFormula::Atom(atoms.choose(rng).expect("nonempty").clone());
        if rng.gen_bool(0.4) {
            a.negate()
        } else {
            a
        }
    }))
}

/// A random program over at most `max_atoms` atoms; the same configuration
/// always yields the same program.
pub fn random_program(cfg: &GenConfig) -> Program {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let atoms = pool(rng.gen_range(1..=cfg.max_atoms.clamp(1, ATOM_POOL.len())));
    let n_rules = rng.gen_range(0..=cfg.max_rules);
    let rules = (0..n_rules)
        .map(|index| {
            let kind = match rng.gen_range(0..6) {
                0 | 1 => RuleKind::Initial,
                5 => RuleKind::Final,
                _ => RuleKind::Dynamic,
            };
            let head: Vec<Atom> = if kind == RuleKind::Final || rng.gen_bool(0.15) {
                vec![]
            } else {
                let n = rng.gen_range(1..=2).min(atoms.len());
                let mut h: Vec<Atom> = atoms.choose_multiple(&mut rng, n).cloned().collect();
                h.sort();
                h
            };
            let body = match kind {
                RuleKind::Dynamic if rng.gen_bool(0.85) => random_formula(
                    &mut rng,
                    &atoms,
                    cfg.max_body_depth,
                    cfg.max_negation_depth,
                    &cfg.weights,
                ),
                RuleKind::Dynamic => PastFormula::verum(),
                _ => random_literals(&mut rng, &atoms),
            };
            Rule::new(kind, head, body, index).expect("generated rules respect the section forms")
        })
        .collect();
    Program::new(rules)
}

/// The trace length paired with `random_program(cfg)`.
pub fn random_length(cfg: &GenConfig) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9_7f4a_7c15);
    rng.gen_range(cfg.lengths.0..=cfg.lengths.1)
}

/// A counterexample found by a batch run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseFailure {
    pub seed: u64,
    pub check: String,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TheoremStats {
    pub cases: usize,
    pub tight_cases: usize,
    pub completion_loops_agree: usize,
    pub unitary_loops_agree: usize,
    pub tight_completion_agree: usize,
    pub completion_sound: usize,
    /// Cases with at least one stable model.
    pub with_stable_models: usize,
    /// Non-tight cases where the completion alone admits extra models.
    pub completion_gaps: usize,
    pub failures: Vec<CaseFailure>,
}

impl TheoremStats {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

enum CaseResult {
    Done {
        tight: bool,
        completion_loops: bool,
        unitary_loops: bool,
        completion_equal: bool,
        completion_sound: bool,
        stable_models: usize,
        program: String,
        length: usize,
    },
    Error(String),
}

fn theorem_case(cfg: &GenConfig, budget: Budget) -> CaseResult {
    let p = random_program(cfg);
    let len = random_length(cfg);
    let run = || -> Result<CaseResult, VerifyError> {
        let cf = verify_correspondence(&p, len, Mode::Completion, budget)?;
        let loops = verify_correspondence(&p, len, Mode::CompletionLoops, budget)?;
        let unitary = verify_correspondence(&p, len, Mode::UnitaryLoops, budget)?;
        let lhs: BTreeSet<&Trace> = cf.lhs.iter().collect();
        let rhs: BTreeSet<&Trace> = cf.rhs.iter().collect();
        Ok(CaseResult::Done {
            tight: cf.tight == Some(true),
            completion_loops: loops.equal,
            unitary_loops: unitary.equal,
            completion_equal: cf.equal,
            completion_sound: lhs.is_subset(&rhs),
            stable_models: lhs.len(),
            program: p.to_string(),
            length: len,
        })
    };
    run().unwrap_or_else(|e| CaseResult::Error(e.to_string()))
}

/// Runs `cases` random programs with seeds `seed, seed+1, ...` through all
/// three correspondences.
pub fn theorem_batch(cfg: &GenConfig, cases: usize, budget: Budget) -> TheoremStats {
    let results: Vec<(u64, CaseResult)> = (0..cases as u64)
        .into_par_iter()
        .map(|i| {
            let seed = cfg.seed.wrapping_add(i);
            (seed, theorem_case(&cfg.with_seed(seed), budget))
        })
        .collect();
    let mut stats = TheoremStats {
        cases,
        ..TheoremStats::default()
    };
    for (seed, result) in results {
        let fail = |check: &str, detail: String| CaseFailure {
            seed,
            check: check.to_string(),
            detail,
        };
        match result {
            CaseResult::Error(e) => stats.failures.push(fail("error", e)),
            CaseResult::Done {
                tight,
                completion_loops,
                unitary_loops,
                completion_equal,
                completion_sound,
                stable_models,
                program,
                length,
            } => {
                if stable_models > 0 {
                    stats.with_stable_models += 1;
                }
                if !tight && !completion_equal {
                    stats.completion_gaps += 1;
                }
                let detail = || format!("length {length}\n{program}");
                if completion_loops {
                    stats.completion_loops_agree += 1;
                } else {
                    stats.failures.push(fail("completion_loops", detail()));
                }
                if unitary_loops {
                    stats.unitary_loops_agree += 1;
                } else {
                    stats.failures.push(fail("unitary_loops", detail()));
                }
                if completion_sound {
                    stats.completion_sound += 1;
                } else {
                    stats.failures.push(fail("completion_sound", detail()));
                }
                if tight {
                    stats.tight_cases += 1;
                    if completion_equal {
                        stats.tight_completion_agree += 1;
                    } else {
                        stats.failures.push(fail("tight_completion", detail()));
                    }
                }
            }
        }
    }
    stats
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct OutcomeCounts {
    pub holds: usize,
    pub violated: usize,
    pub skipped: usize,
}

impl OutcomeCounts {
    fn add(&mut self, o: LemmaOutcome) {
        match o {
            LemmaOutcome::Holds => self.holds += 1,
            LemmaOutcome::Violated => self.violated += 1,
            LemmaOutcome::Skipped => self.skipped += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.holds + self.violated + self.skipped
    }

    pub fn skip_rate(&self) -> f64 {
        if self.total() == 0 {
            0.0
        } else {
            self.skipped as f64 / self.total() as f64
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LemmaStats {
    pub support: OutcomeCounts,
    pub pastocc: OutcomeCounts,
    pub failures: Vec<CaseFailure>,
}

struct LemmaInstance {
    formula: PastFormula,
    trace: HtTrace,
    mask: TraceMask,
}

fn random_lemma_instance(seed: u64) -> LemmaInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let atoms = pool(rng.gen_range(1..=3));
    let len = rng.gen_range(1..=3);
    let formula = random_formula(&mut rng, &atoms, 4, 2, &Weights::default());
    let trace = random_ht_trace(&mut rng, &atoms, len);
    let pivot = rng.gen_range(0..len);
    let base = random_subset(&mut rng, &atoms, 0.5);
    let extra = (0..len)
        .map(|t| match t.cmp(&pivot) {
            std::cmp::Ordering::Less => BTreeSet::new(),
            std::cmp::Ordering::Equal => {
                let mut x = base.clone();
                x.extend(random_subset(&mut rng, &atoms, 0.25));
                x
            }
            std::cmp::Ordering::Greater => random_subset(&mut rng, &atoms, 0.5),
        })
        .collect();
    LemmaInstance {
        formula,
        trace,
        mask: TraceMask::new(base, pivot, extra).expect("constructed to satisfy the invariants"),
    }
}

type LemmaResult = Result<(LemmaOutcome, LemmaOutcome), SemanticsError>;

/// Random instances of both masking lemmas, seeds `seed, seed+1, ...`.
pub fn lemma_batch(seed: u64, cases: usize) -> LemmaStats {
    let results: Vec<(u64, LemmaResult, String)> = (0..cases as u64)
        .into_par_iter()
        .map(|i| {
            let seed = seed.wrapping_add(i);
            let inst = random_lemma_instance(seed);
            let outcome =
                check_lemma_support(&inst.formula, &inst.trace, &inst.mask).and_then(|s| {
                    Ok((
                        s,
                        check_lemma_pastocc(&inst.formula, &inst.trace, &inst.mask)?,
                    ))
                });
            let detail = format!(
                "f = {}, H = {}, T = {}, L = {:?}, i = {}, X = {:?}",
                inst.formula,
                inst.trace.here(),
                inst.trace.there(),
                inst.mask.base(),
                inst.mask.pivot(),
                inst.mask.extra()
            );
            (seed, outcome, detail)
        })
        .collect();
    let mut stats = LemmaStats::default();
    for (seed, outcome, detail) in results {
        match outcome {
            Ok((support, pastocc)) => {
                stats.support.add(support);
                stats.pastocc.add(pastocc);
                for (name, o) in [("lemma_support", support), ("lemma_pastocc", pastocc)] {
                    if o == LemmaOutcome::Violated {
                        stats.failures.push(CaseFailure {
                            seed,
                            check: name.to_string(),
                            detail: detail.clone(),
                        });
                    }
                }
            }
            Err(e) => stats.failures.push(CaseFailure {
                seed,
                check: "error".to_string(),
                detail: e.to_string(),
            }),
        }
    }
    stats
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SemanticsStats {
    pub cases: usize,
    pub point_checks: usize,
    pub failures: Vec<CaseFailure>,
}

/// Per point `k`: `m_k(f) = 2` iff `⟨H,T⟩, k ⊨ f`; `m_k(f) ≠ 0` iff
/// `⟨T,T⟩, k ⊨ f`; the since and trigger unfoldings agree with the
/// operators; and `S_∅(f)` agrees with `f`.
fn semantics_case(seed: u64) -> Result<(usize, Vec<String>), SemanticsError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let atoms = pool(rng.gen_range(1..=3));
    let len = rng.gen_range(1..=4);
    let w = Weights::default();
    let f = random_formula(&mut rng, &atoms, 4, 2, &w);
    let phi = random_formula(&mut rng, &atoms, 3, 2, &w);
    let psi = random_formula(&mut rng, &atoms, 3, 2, &w);
    let m = random_ht_trace(&mut rng, &atoms, len);
    let total = m.there_total();
    let since = phi.clone().since(psi.clone());
    let trigger = phi.clone().trigger(psi.clone());
    let since_step = psi.clone().or(phi.clone().and(since.clone().previous()));
    let trigger_step = psi
        .clone()
        .and(phi.clone().or(trigger.clone().weak_previous()));
    let unfolded = support_transform(&f, &BTreeSet::new());
    let values = valuation(&m, &f);
    let mut failures = Vec::new();
    let mut checks = 0;
    for (k, value) in values.iter().enumerate() {
        let pairs = [
            (
                "three_valued_here",
                *value == TruthValue::True,
                ht_sat(&m, k, &f)?,
            ),
            (
                "three_valued_there",
                *value != TruthValue::False,
                ht_sat(&total, k, &f)?,
            ),
            (
                "since_unfolding",
                ht_sat(&m, k, &since)?,
                ht_sat(&m, k, &since_step)?,
            ),
            (
                "trigger_unfolding",
                ht_sat(&m, k, &trigger)?,
                ht_sat(&m, k, &trigger_step)?,
            ),
            (
                "empty_support",
                ht_sat(&m, k, &f)?,
                ht_sat(&m, k, &unfolded)?,
            ),
        ];
        for (name, lhs, rhs) in pairs {
            checks += 1;
            if lhs != rhs {
                failures.push(format!(
                    "{name} at k = {k}: f = {f}, phi = {phi}, psi = {psi}, H = {}, T = {}",
                    m.here(),
                    m.there()
                ));
            }
        }
    }
    Ok((checks, failures))
}

type SemanticsResult = Result<(usize, Vec<String>), SemanticsError>;

/// Random formula/trace pairs, seeds `seed, seed+1, ...`.
pub fn semantics_batch(seed: u64, cases: usize) -> SemanticsStats {
    let results: Vec<(u64, SemanticsResult)> = (0..cases as u64)
        .into_par_iter()
        .map(|i| {
            let seed = seed.wrapping_add(i);
            (seed, semantics_case(seed))
        })
        .collect();
    let mut stats = SemanticsStats {
        cases,
        ..SemanticsStats::default()
    };
    for (seed, r) in results {
        match r {
            Ok((checks, failures)) => {
                stats.point_checks += checks;
                stats
                    .failures
                    .extend(failures.into_iter().map(|detail| CaseFailure {
                        seed,
                        check: detail.split(' ').next().unwrap_or_default().to_string(),
                        detail,
                    }));
            }
            Err(e) => stats.failures.push(CaseFailure {
                seed,
                check: "error".to_string(),
                detail: e.to_string(),
            }),
        }
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_formula, parse_program};

    const P1: &str = "load.
#dynamic.
shoot | load | unload.
dead :- shoot, (not unload since load).
shoot :- dead.
#final.
:- not dead.
";

    fn set(names: &[&str]) -> BTreeSet<Atom> {
        names.iter().map(|n| Atom::new(*n).unwrap()).collect()
    }

    fn trace(states: &[&[&str]]) -> Trace {
        Trace::new(states.iter().map(|s| set(s)).collect()).unwrap()
    }

    #[test]
    fn p1_completion_agrees_though_not_tight() {
        let p = parse_program(P1).unwrap();
        let r = verify_correspondence(&p, 2, Mode::Completion, Budget::default()).unwrap();
        assert!(r.equal);
        assert_eq!(r.tight, Some(false));
        assert!(r.witnesses.is_empty());
    }

    #[test]
    fn p2_completion_has_unsupported_model() {
        let p = parse_program(&P1.replace("shoot | load | unload.\n", "")).unwrap();
        let r = verify_correspondence(&p, 2, Mode::Completion, Budget::default()).unwrap();
        assert!(!r.equal);
        assert_eq!(
            r.witnesses,
            vec![Witness {
                side: Side::Rhs,
                trace: trace(&[&["load"], &["dead", "shoot"]])
            }]
        );
        let r = verify_correspondence(&p, 2, Mode::CompletionLoops, Budget::default()).unwrap();
        assert!(r.equal && r.lhs.is_empty() && r.rhs.is_empty());
        assert_eq!(r.tight, None);
    }

    #[test]
    fn report_json() {
        let p = parse_program("a.").unwrap();
        let r = verify_correspondence(&p, 1, Mode::UnitaryLoops, Budget::default()).unwrap();
        let doc = serde_json::to_value(&r).unwrap();
        assert_eq!(doc["mode"], "unitary_loops");
        assert_eq!(doc["lhs"], serde_json::json!([[["a"]]]));
        assert!(doc.get("tight").is_none());
    }

    #[test]
    fn mask_examples() {
        let m = HtTrace::total(trace(&[&["a"], &["a", "b"]]));
        let mask = TraceMask::new(set(&["b"]), 1, vec![set(&[]), set(&["b"])]).unwrap();
        let out = mask_trace(&m, &mask).unwrap();
        assert_eq!(out.here(), &trace(&[&["a"], &["a"]]));
        assert_eq!(out.there(), m.there());

        let identity = TraceMask::new(set(&[]), 0, vec![set(&[]), set(&[])]).unwrap();
        assert_eq!(mask_trace(&m, &identity).unwrap(), m);

        let m = HtTrace::new(trace(&[&["a"], &["a"]]), trace(&[&["a"], &["a"]])).unwrap();
        let mask = TraceMask::new(set(&["a"]), 1, vec![set(&[]), set(&["a", "b"])]).unwrap();
        assert_eq!(
            mask_trace(&m, &mask).unwrap().here(),
            &trace(&[&["a"], &[]])
        );
    }

    #[test]
    fn mask_invariants() {
        assert_eq!(
            TraceMask::new(set(&[]), 1, vec![set(&["a"]), set(&[])]),
            Err(MaskError::NonEmptyBeforePivot(0))
        );
        assert_eq!(
            TraceMask::new(set(&["a"]), 0, vec![set(&[])]),
            Err(MaskError::BaseNotCovered)
        );
        assert!(TraceMask::new(set(&[]), 2, vec![set(&[])]).is_err());
        let m = HtTrace::total(trace(&[&[]]));
        let mask = TraceMask::new(set(&[]), 0, vec![set(&[]), set(&[])]).unwrap();
        assert!(matches!(
            mask_trace(&m, &mask),
            Err(SemanticsError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn lemma_examples() {
        let m = HtTrace::total(trace(&[&["a"], &["a"]]));
        let mask = TraceMask::new(set(&["a"]), 1, vec![set(&[]), set(&["a"])]).unwrap();
        let a = parse_formula("a").unwrap();
        assert_eq!(
            check_lemma_support(&a, &m, &mask).unwrap(),
            LemmaOutcome::Holds
        );
        let not_a = parse_formula("not a").unwrap();
        assert_eq!(
            check_lemma_support(&not_a, &m, &mask).unwrap(),
            LemmaOutcome::Holds
        );
        assert_eq!(
            check_lemma_pastocc(&not_a, &m, &mask).unwrap(),
            LemmaOutcome::Holds
        );
        let prev_a = parse_formula("prev a").unwrap();
        assert_eq!(
            check_lemma_pastocc(&prev_a, &m, &mask).unwrap(),
            LemmaOutcome::Holds
        );
        assert_eq!(
            check_lemma_pastocc(&a, &m, &mask).unwrap(),
            LemmaOutcome::Skipped
        );
        let wide = TraceMask::new(set(&[]), 1, vec![set(&[]), set(&["a"])]).unwrap();
        assert_eq!(
            check_lemma_support(&a, &m, &wide).unwrap(),
            LemmaOutcome::Skipped
        );
    }

    #[test]
    fn generator_is_deterministic() {
        let cfg = GenConfig::default();
        assert_eq!(random_program(&cfg), random_program(&cfg));
        assert_eq!(random_length(&cfg), random_length(&cfg));
        let none = GenConfig {
            max_rules: 0,
            ..GenConfig::default()
        };
        assert!(random_program(&none).is_empty());
    }

    #[test]
    fn generator_respects_bounds() {
        for seed in 0..200 {
            let cfg = GenConfig::default().with_seed(seed);
            let p = random_program(&cfg);
            assert!(p.alphabet().len() <= cfg.max_atoms);
            assert!(p.rules().len() <= cfg.max_rules);
            for r in p.rules() {
                assert!(r.body().depth() <= cfg.max_body_depth + 1);
            }
            let len = random_length(&cfg);
            assert!((1..=3).contains(&len));
        }
    }

    #[test]
    fn config_validation() {
        assert!(GenConfig::default().validate().is_ok());
        let bad = GenConfig {
            lengths: (0, 2),
            ..GenConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = GenConfig {
            max_atoms: 5,
            ..GenConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn generated_programs_round_trip() {
        for seed in 0..500 {
            let p = random_program(&GenConfig::default().with_seed(seed));
            assert_eq!(parse_program(&p.to_string()).unwrap(), p, "seed {seed}");
        }
    }

    #[test]
    fn small_batches_pass() {
        let t = theorem_batch(&GenConfig::default(), 40, Budget::default());
        assert!(t.passed(), "{:?}", t.failures);
        let l = lemma_batch(0, 300);
        assert!(l.failures.is_empty(), "{:?}", l.failures);
        let s = semantics_batch(0, 300);
        assert!(s.failures.is_empty(), "{:?}", s.failures);
    }
}
