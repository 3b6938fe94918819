//! Supporting transformation, external support, temporal completion, loop
//! formulas and the classical reading of a program as LTLf formulas.
//!
//! Every compiler emits the literal recursive definition; [`simplify`] is the
//! only place where constants are folded away.

use std::collections::BTreeSet;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::depgraph::{enumerate_loops, DepGraph, DepGraphError, Loop};
use crate::ltlf::ExtFormula;
use crate::syntax::{Atom, PastFormula, Program, Rule, RuleKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("atom `{0}` is not in the program's alphabet")]
    UnknownAtom(Atom),
    #[error(transparent)]
    Graph(#[from] DepGraphError),
}

/// `S_L(f)`: removes the support that atoms of `loop_atoms` could give `f`
/// at the current point.
///
/// Since and trigger are unfolded one step so that their present arguments
/// are transformed while the past remains untouched:
/// `φ S ψ ↦ S_L(ψ) ∨ (S_L(φ) ∧ ●(φ S ψ))` and
/// `φ T ψ ↦ S_L(ψ) ∧ (S_L(φ) ∨ ●̂(φ T ψ))`. The trigger step uses the weak
/// previous, since `φ T ψ` at the first point reduces to `ψ`.
pub fn support_transform(f: &PastFormula, loop_atoms: &BTreeSet<Atom>) -> PastFormula {
    let go = |g: &PastFormula| support_transform(g, loop_atoms);
    match f {
        PastFormula::Falsum => PastFormula::Falsum,
        PastFormula::Atom(a) if loop_atoms.contains(a) => PastFormula::Falsum,
        PastFormula::Atom(_) | PastFormula::Not(_) | PastFormula::Previous(_) => f.clone(),
        PastFormula::And(l, r) => go(l).and(go(r)),
        PastFormula::Or(l, r) => go(l).or(go(r)),
        PastFormula::Since(l, r) => go(r).or(go(l).and(f.clone().previous())),
        PastFormula::Trigger(l, r) => go(r).and(go(l).or(f.clone().weak_previous())),
    }
}

/// `ES(L)` over `rules`: one disjunct `S_L(B) ∧ ⋀_{a ∈ H∖L} ¬a` per rule
/// whose head meets `L`, in rule order.
pub fn external_support<'a>(
    rules: impl IntoIterator<Item = &'a Rule>,
    loop_atoms: &BTreeSet<Atom>,
) -> PastFormula {
    PastFormula::disjunction(
        rules
            .into_iter()
            .filter(|r| r.head().iter().any(|a| loop_atoms.contains(a)))
            .map(|r| {
                let outside = r
                    .head()
                    .iter()
                    .filter(|a| !loop_atoms.contains(*a))
                    .map(|a| PastFormula::Atom(a.clone()).negate());
                PastFormula::conjunction(
                    std::iter::once(support_transform(r.body(), loop_atoms)).chain(outside),
                )
            }),
    )
}

/// `S(r, a) = B ∧ ⋀_{p ∈ H∖{a}} ¬p`.
fn support(r: &Rule, a: &Atom) -> ExtFormula {
    let others = r
        .head()
        .iter()
        .filter(|p| *p != a)
        .map(|p| ExtFormula::Atom(p.clone()).negate());
    ExtFormula::conjunction(std::iter::once(ExtFormula::from(r.body())).chain(others))
}

/// `◻(a ↔ ⋁(I ∧ S(r,a)) ∨ ⋁(¬I ∧ S(r,a)))`, initial rules first, each
/// in source order; the empty disjunction is `⊥`.
pub fn completion_atom(p: &Program, a: &Atom) -> Result<ExtFormula, TransformError> {
    if !p.alphabet().contains(a) {
        return Err(TransformError::UnknownAtom(a.clone()));
    }
    let supports = |kind: RuleKind, guard: ExtFormula| {
        p.section(kind)
            .filter(|r| r.head().contains(a))
            .map(move |r| guard.clone().and(support(r, a)))
            .collect::<Vec<_>>()
    };
    let mut disjuncts = supports(RuleKind::Initial, ExtFormula::InitialConst);
    disjuncts.extend(supports(
        RuleKind::Dynamic,
        ExtFormula::InitialConst.negate(),
    ));
    Ok(ExtFormula::Atom(a.clone())
        .iff(ExtFormula::disjunction(disjuncts))
        .always())
}

/// The constraint an empty-head or final rule stands for.
fn constraint(r: &Rule) -> ExtFormula {
    let denial = ExtFormula::from(r.body()).implies(ExtFormula::Falsum);
    match r.kind() {
        RuleKind::Initial => denial,
        RuleKind::Dynamic => denial.wnext_always(),
        RuleKind::Final => ExtFormula::FinalConst.implies(denial).always(),
    }
}

/// Where a compiled formula comes from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Source {
    Atom {
        atom: Atom,
    },
    Rule {
        section: RuleKind,
        index: usize,
    },
    Loop {
        section: RuleKind,
        atoms: BTreeSet<Atom>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Compiled {
    pub formula: ExtFormula,
    pub source: Source,
}

impl Serialize for Compiled {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Compiled", 2)?;
        st.serialize_field("formula", &self.formula.to_string())?;
        st.serialize_field("source", &self.source)?;
        st.end()
    }
}

fn rule_source(r: &Rule) -> Source {
    Source::Rule {
        section: r.kind(),
        index: r.source_index(),
    }
}

/// [`completion`] with the source of each formula.
pub fn completion_entries(p: &Program) -> Vec<Compiled> {
    let mut out: Vec<Compiled> = p
        .alphabet()
        .iter()
        .map(|a| Compiled {
            formula: completion_atom(p, a).expect("alphabet atom"),
            source: Source::Atom { atom: a.clone() },
        })
        .collect();
    for kind in [RuleKind::Initial, RuleKind::Dynamic] {
        out.extend(
            p.section(kind)
                .filter(|r| r.is_constraint())
                .map(|r| Compiled {
                    formula: constraint(r),
                    source: rule_source(r),
                }),
        );
    }
    out.extend(p.section(RuleKind::Final).map(|r| Compiled {
        formula: constraint(r),
        source: rule_source(r),
    }));
    out
}

/// The completion: one biconditional per alphabet atom in name order, then
/// the empty-head initial and dynamic rules, then the final rules.
pub fn completion(p: &Program) -> Vec<ExtFormula> {
    completion_entries(p)
        .into_iter()
        .map(|c| c.formula)
        .collect()
}

/// `⋁_{a ∈ L} a → ES(L)`, under `wnext_always` for dynamic loops.
pub fn loop_formula(p: &Program, l: &Loop) -> ExtFormula {
    let lhs = ExtFormula::disjunction(l.atoms.iter().cloned().map(ExtFormula::Atom));
    let es = ExtFormula::from(external_support(p.section(l.section), &l.atoms));
    let f = lhs.implies(es);
    match l.section {
        RuleKind::Dynamic => f.wnext_always(),
        _ => f,
    }
}

/// [`loop_formulas`] with the loop behind each formula.
pub fn loop_entries(p: &Program, unitary: bool) -> Result<Vec<Compiled>, TransformError> {
    let mut out = Vec::new();
    for kind in [RuleKind::Initial, RuleKind::Dynamic] {
        for l in enumerate_loops(&DepGraph::of_section(p, kind)?, unitary)? {
            out.push(Compiled {
                formula: loop_formula(p, &l),
                source: Source::Loop {
                    section: l.section,
                    atoms: l.atoms,
                },
            });
        }
    }
    Ok(out)
}

/// One loop formula per initial loop, then one per dynamic loop, loops in
/// canonical order. With `unitary`, single atoms count as loops.
pub fn loop_formulas(p: &Program, unitary: bool) -> Result<Vec<ExtFormula>, TransformError> {
    Ok(loop_entries(p, unitary)?
        .into_iter()
        .map(|c| c.formula)
        .collect())
}

fn rule_formula(r: &Rule) -> ExtFormula {
    if r.is_constraint() || r.kind() == RuleKind::Final {
        return constraint(r);
    }
    let head = ExtFormula::disjunction(r.head().iter().cloned().map(ExtFormula::Atom));
    match r.kind() {
        RuleKind::Initial if r.body().is_verum() => head,
        RuleKind::Initial => ExtFormula::from(r.body()).implies(head),
        _ => ExtFormula::from(r.body()).implies(head).wnext_always(),
    }
}

/// The rules read classically: `B → H` for initial rules (facts become `H`),
/// `wnext_always(B → H)` for dynamic rules and `always(F → (B → ⊥))` for final
/// rules. An empty head is `⊥`.
pub fn program_as_ltlf(p: &Program) -> Vec<ExtFormula> {
    p.rules().iter().map(rule_formula).collect()
}

/// [`program_as_ltlf`] with the rule behind each formula.
pub fn program_entries(p: &Program) -> Vec<Compiled> {
    p.rules()
        .iter()
        .map(|r| Compiled {
            formula: rule_formula(r),
            source: rule_source(r),
        })
        .collect()
}

/// Everything the translations produce for one program.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompilationUnit {
    pub completion: Vec<Compiled>,
    pub loop_formulas: Vec<Compiled>,
    pub program_formulas: Vec<Compiled>,
}

impl CompilationUnit {
    pub fn compile(p: &Program, unitary: bool) -> Result<Self, TransformError> {
        Ok(CompilationUnit {
            completion: completion_entries(p),
            loop_formulas: loop_entries(p, unitary)?,
            program_formulas: program_entries(p),
        })
    }
}

/// Folds `⊤`/`⊥` through conjunction, disjunction and negation, bottom up.
/// `¬⊥` becomes `⊤`.
pub fn simplify(f: &ExtFormula) -> ExtFormula {
    use ExtFormula as E;
    let b = |g: &ExtFormula| Box::new(simplify(g));
    match f {
        E::Not(g) => match simplify(g) {
            E::Falsum => E::Verum,
            E::Verum => E::Falsum,
            g => g.negate(),
        },
        E::And(l, r) => match (simplify(l), simplify(r)) {
            (E::Falsum, _) | (_, E::Falsum) => E::Falsum,
            (E::Verum, x) | (x, E::Verum) => x,
            (l, r) => l.and(r),
        },
        E::Or(l, r) => match (simplify(l), simplify(r)) {
            (E::Verum, _) | (_, E::Verum) => E::Verum,
            (E::Falsum, x) | (x, E::Falsum) => x,
            (l, r) => l.or(r),
        },
        E::Previous(g) => E::Previous(b(g)),
        E::Since(l, r) => E::Since(b(l), b(r)),
        E::Trigger(l, r) => E::Trigger(b(l), b(r)),
        E::Implies(l, r) => E::Implies(b(l), b(r)),
        E::Iff(l, r) => E::Iff(b(l), b(r)),
        E::Always(g) => E::Always(b(g)),
        E::WeakNextAlways(g) => E::WeakNextAlways(b(g)),
        E::Falsum | E::Verum | E::Atom(_) | E::InitialConst | E::FinalConst => f.clone(),
    }
}
