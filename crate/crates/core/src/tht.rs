//! Here-and-there satisfaction over finite traces, program models and
//! temporal stable models.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::eval::{self, AtomIndex, Node};
use crate::syntax::{Atom, PastFormula, Program, Rule, RuleKind};
use crate::trace::{Budget, HtTrace, SemanticsError, Trace, MAX_TRACE_LEN};

fn check_len(len: usize) -> Result<(), SemanticsError> {
    if len > MAX_TRACE_LEN {
        Err(SemanticsError::TraceTooLong(len))
    } else {
        Ok(())
    }
}

/// `M, k ⊨ f`.
pub fn ht_sat(m: &HtTrace, k: usize, f: &PastFormula) -> Result<bool, SemanticsError> {
    m.here().check_point(k)?;
    check_len(m.len())?;
    let index = AtomIndex::new(f.atoms());
    let node = eval::compile_past(f, &index);
    let here = index.columns(m.here().states())?;
    let there = index.columns(m.there().states())?;
    Ok(eval::ht(&node, &here, &there, m.len()) >> k & 1 == 1)
}

/// A rule compiled against a fixed atom index.
struct CompiledRule {
    kind: RuleKind,
    head: Vec<usize>,
    body: Node,
}

impl CompiledRule {
    fn new(rule: &Rule, index: &AtomIndex) -> Self {
        CompiledRule {
            kind: rule.kind(),
            head: rule
                .head()
                .iter()
                .map(|a| index.position(a).expect("head atom indexed"))
                .collect(),
            body: eval::compile_past(rule.body(), index),
        }
    }

    /// Points where `B → H` fails at the given world pair.
    fn violations(&self, here: &[u64], there: &[u64], len: usize) -> u64 {
        let body = eval::ht(&self.body, here, there, len);
        let head = self.head.iter().fold(0u64, |acc, &i| acc | here[i]);
        body & !head
    }

    /// Rule satisfaction at the here-world only (the there-world is checked
    /// separately by passing `there` twice).
    fn holds(&self, here: &[u64], there: &[u64], len: usize) -> bool {
        match self.kind {
            RuleKind::Initial => self.violations(here, there, len) & 1 == 0,
            RuleKind::Dynamic => self.violations(here, there, len) & eval::full(len) & !1 == 0,
            RuleKind::Final => eval::ht(&self.body, there, there, len) >> (len - 1) & 1 == 0,
        }
    }
}

struct CompiledProgram {
    rules: Vec<CompiledRule>,
}

impl CompiledProgram {
    fn new(rules: &[Rule], index: &AtomIndex) -> Self {
        CompiledProgram {
            rules: rules.iter().map(|r| CompiledRule::new(r, index)).collect(),
        }
    }

    fn is_total_model(&self, there: &[u64], len: usize) -> bool {
        self.rules.iter().all(|r| r.holds(there, there, len))
    }

    /// Whether `⟨H, T⟩` is a model, assuming `⟨T, T⟩` already is one.
    fn is_here_model(&self, here: &[u64], there: &[u64], len: usize) -> bool {
        self.rules
            .iter()
            .filter(|r| r.kind != RuleKind::Final)
            .all(|r| r.holds(here, there, len))
    }
}

/// `M, 0 ⊨ r`, checking both `M` and `⟨T, T⟩` as the rule clauses require.
pub fn rule_sat(m: &HtTrace, r: &Rule) -> Result<bool, SemanticsError> {
    check_len(m.len())?;
    let index = AtomIndex::new(r.atoms());
    let rule = CompiledRule::new(r, &index);
    let here = index.columns(m.here().states())?;
    let there = index.columns(m.there().states())?;
    Ok(rule.holds(&there, &there, m.len()) && rule.holds(&here, &there, m.len()))
}

pub fn is_ht_model(m: &HtTrace, p: &Program) -> Result<bool, SemanticsError> {
    for r in p.rules() {
        if !rule_sat(m, r)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All temporal stable models of `p` with length `len` over `alphabet`, sorted.
///
/// Every total trace within the budget is tried; for each model `⟨T, T⟩`,
/// every `H < T` is tried, stopping at the first `⟨H, T⟩` model.
pub fn enumerate_ts_models(
    p: &Program,
    len: usize,
    alphabet: &BTreeSet<Atom>,
    budget: Budget,
) -> Result<BTreeSet<Trace>, SemanticsError> {
    if let Some(missing) = p.alphabet().difference(alphabet).next() {
        return Err(SemanticsError::AtomOutsideAlphabet(missing.clone()));
    }
    let index = AtomIndex::new(alphabet.iter().cloned());
    let bits = budget.check(index.len(), len)?;
    let program = CompiledProgram::new(p.rules(), &index);
    let width = index.len();
    let stable: Vec<u64> = (0..1u64 << bits)
        .into_par_iter()
        .filter(|&t| {
            let there = eval::unpack(t, width, len);
            if !program.is_total_model(&there, len) {
                return false;
            }
            let mut h = t;
            while h != 0 {
                h = (h - 1) & t;
                let here = eval::unpack(h, width, len);
                if program.is_here_model(&here, &there, len) {
                    return false;
                }
            }
            true
        })
        .collect();
    Ok(stable
        .into_iter()
        .map(|t| index.trace_of(&eval::unpack(t, width, len), len))
        .collect())
}

/// A truth value of the three-valued characterization of here-and-there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TruthValue {
    /// 0: false in both worlds.
    False,
    /// 1: true there but not here.
    ThereOnly,
    /// 2: true here (and so there).
    True,
}

impl TruthValue {
    pub fn as_u8(self) -> u8 {
        match self {
            TruthValue::False => 0,
            TruthValue::ThereOnly => 1,
            TruthValue::True => 2,
        }
    }
}

impl fmt::Display for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

impl Serialize for TruthValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(self.as_u8())
    }
}

/// `m_k(f)`, computed directly from the min/max clauses.
pub fn three_valued(m: &HtTrace, k: usize, f: &PastFormula) -> Result<TruthValue, SemanticsError> {
    m.here().check_point(k)?;
    Ok(valuation(m, f)[k])
}

/// `m_k(f)` for every point `k`.
pub fn valuation(m: &HtTrace, f: &PastFormula) -> Vec<TruthValue> {
    use TruthValue::*;
    let len = m.len();
    match f {
        PastFormula::Falsum => vec![False; len],
        PastFormula::Atom(a) => (0..len)
            .map(|k| {
                if m.here().state(k).contains(a) {
                    True
                } else if m.there().state(k).contains(a) {
                    ThereOnly
                } else {
                    False
                }
            })
            .collect(),
        PastFormula::Not(g) => valuation(m, g)
            .into_iter()
            .map(|v| if v == False { True } else { False })
            .collect(),
        PastFormula::And(l, r) => zip_with(valuation(m, l), valuation(m, r), std::cmp::min),
        PastFormula::Or(l, r) => zip_with(valuation(m, l), valuation(m, r), std::cmp::max),
        PastFormula::Previous(g) => {
            let inner = valuation(m, g);
            (0..len)
                .map(|k| if k == 0 { False } else { inner[k - 1] })
                .collect()
        }
        PastFormula::Since(l, r) => {
            let (phi, psi) = (valuation(m, l), valuation(m, r));
            (0..len)
                .map(|k| {
                    (0..=k)
                        .map(|j| {
                            let guard = phi[j + 1..=k].iter().copied().min().unwrap_or(True);
                            psi[j].min(guard)
                        })
                        .max()
                        .unwrap_or(False)
                })
                .collect()
        }
        PastFormula::Trigger(l, r) => {
            let (phi, psi) = (valuation(m, l), valuation(m, r));
            (0..len)
                .map(|k| {
                    (0..=k)
                        .map(|j| {
                            let release = phi[j + 1..=k].iter().copied().max().unwrap_or(False);
                            psi[j].max(release)
                        })
                        .min()
                        .unwrap_or(True)
                })
                .collect()
        }
    }
}

fn zip_with(
    a: Vec<TruthValue>,
    b: Vec<TruthValue>,
    op: fn(TruthValue, TruthValue) -> TruthValue,
) -> Vec<TruthValue> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_formula, parse_program};

    fn state(names: &[&str]) -> BTreeSet<Atom> {
        names.iter().map(|n| Atom::new(*n).unwrap()).collect()
    }

    fn trace(states: &[&[&str]]) -> Trace {
        Trace::new(states.iter().map(|s| state(s)).collect()).unwrap()
    }

    const P1: &str = "load.
#dynamic.
shoot | load | unload.
dead :- shoot, (not unload since load).
shoot :- dead.
#final.
:- not dead.
";

    #[test]
    fn rule_three_body_at_point_one() {
        let m = HtTrace::total(trace(&[&["load"], &["shoot", "dead"]]));
        let f = parse_formula("shoot, (not unload since load)").unwrap();
        assert!(ht_sat(&m, 1, &f).unwrap());
    }

    #[test]
    fn previous_false_at_origin() {
        let m = HtTrace::total(trace(&[&["a"], &["a"]]));
        assert!(!ht_sat(&m, 0, &PastFormula::verum().previous()).unwrap());
        assert!(ht_sat(&m, 1, &PastFormula::verum().previous()).unwrap());
    }

    #[test]
    fn falsum_never_holds() {
        let m = HtTrace::total(trace(&[&["a"], &[]]));
        for k in 0..2 {
            assert!(!ht_sat(&m, k, &PastFormula::Falsum).unwrap());
        }
    }

    #[test]
    fn point_out_of_range() {
        let m = HtTrace::total(trace(&[&["a"]]));
        assert!(matches!(
            ht_sat(&m, 1, &PastFormula::Falsum),
            Err(SemanticsError::PointOutOfRange { k: 1, len: 1 })
        ));
        assert!(three_valued(&m, 3, &PastFormula::Falsum).is_err());
    }

    #[test]
    fn final_rule_on_models() {
        let p = parse_program(P1).unwrap();
        let r5 = p.final_rules()[0].clone();
        let good = HtTrace::total(trace(&[&["load"], &["shoot", "dead"]]));
        assert!(rule_sat(&good, &r5).unwrap());
        let bad = HtTrace::total(trace(&[&["load"], &["load"]]));
        assert!(!rule_sat(&bad, &r5).unwrap());
    }

    #[test]
    fn dynamic_rules_vacuous_on_single_state() {
        let p = parse_program(P1).unwrap();
        let m = HtTrace::total(trace(&[&[]]));
        for r in p.dynamic() {
            assert!(rule_sat(&m, r).unwrap());
        }
    }

    #[test]
    fn p1_models() {
        let p = parse_program(P1).unwrap();
        let t = trace(&[&["load"], &["shoot", "dead"]]);
        assert!(is_ht_model(&HtTrace::total(t.clone()), &p).unwrap());
        let h = trace(&[&["load"], &["shoot"]]);
        assert!(!is_ht_model(&HtTrace::new(h, t).unwrap(), &p).unwrap());
        assert!(is_ht_model(&HtTrace::total(trace(&[&[]])), &Program::default()).unwrap());
    }

    #[test]
    fn p1_unique_stable_model() {
        let p = parse_program(P1).unwrap();
        let models = enumerate_ts_models(&p, 2, p.alphabet(), Budget::default()).unwrap();
        let expected: BTreeSet<Trace> = [trace(&[&["load"], &["shoot", "dead"]])].into();
        assert_eq!(models, expected);
    }

    #[test]
    fn p2_has_no_stable_model() {
        let p = parse_program(
            "load.
#dynamic.
dead :- shoot, (not unload since load).
shoot :- dead.
#final.
:- not dead.",
        )
        .unwrap();
        let alphabet = p.alphabet().clone();
        assert!(enumerate_ts_models(&p, 2, &alphabet, Budget::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn single_fact() {
        let p = parse_program("a.").unwrap();
        let models = enumerate_ts_models(&p, 1, p.alphabet(), Budget::default()).unwrap();
        assert_eq!(models, [trace(&[&["a"]])].into());
    }

    #[test]
    fn budget_is_enforced() {
        let p = parse_program(P1).unwrap();
        assert!(matches!(
            enumerate_ts_models(&p, 2, p.alphabet(), Budget(16)),
            Err(SemanticsError::BudgetExceeded {
                bits: 8,
                budget: 16
            })
        ));
    }

    #[test]
    fn alphabet_must_cover_program() {
        let p = parse_program("a :- b.").unwrap();
        assert!(enumerate_ts_models(&p, 1, &state(&["a"]), Budget::default()).is_err());
    }

    #[test]
    fn three_valued_atoms_and_negation() {
        let m = HtTrace::new(trace(&[&[]]), trace(&[&["a"]])).unwrap();
        let a = parse_formula("a").unwrap();
        assert_eq!(three_valued(&m, 0, &a).unwrap(), TruthValue::ThereOnly);
        assert_eq!(three_valued(&m, 0, &a.negate()).unwrap(), TruthValue::False);
    }

    #[test]
    fn three_valued_total_is_two_valued() {
        let m = HtTrace::total(trace(&[&["a"], &["b"], &[]]));
        let f = parse_formula("(a since not b) or prev (a trigger b)").unwrap();
        for v in valuation(&m, &f) {
            assert_ne!(v, TruthValue::ThereOnly);
        }
    }
}
