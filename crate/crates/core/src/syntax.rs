//! Formulas, rules and programs.
//!
//! The core formula type [`PastFormula`] contains exactly the connectives whose
//! satisfaction is defined directly: atoms, falsum, negation, conjunction,
//! disjunction, previous, since and trigger. Everything else the surface
//! language offers (`true`, `initially`, `wprev`, `always_before`,
//! `eventually_before`) is sugar, carried by [`SurfaceFormula`] and removed by
//! [`expand_derived`].

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Words of the concrete syntax that cannot be used as atom names.
pub const RESERVED_WORDS: &[&str] = &[
    "not",
    "prev",
    "wprev",
    "since",
    "trigger",
    "always_before",
    "eventually_before",
    "initially",
    "true",
    "false",
    "and",
    "or",
    "always",
    "wnext_always",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("invalid atom name `{0}`: expected [a-z][A-Za-z0-9_]* and not a reserved word")]
    InvalidAtom(String),
    #[error("final rules must have an empty head")]
    FinalHead,
    #[error("{0} rule bodies must be conjunctions of atoms and negated atoms")]
    IrregularBody(RuleKind),
}

/// A propositional atom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Atom(String);

impl Atom {
    pub fn new(name: impl Into<String>) -> Result<Self, SyntaxError> {
        let name = name.into();
        if is_identifier(&name) && !RESERVED_WORDS.contains(&name.as_str()) {
            Ok(Atom(name))
        } else {
            Err(SyntaxError::InvalidAtom(name))
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl TryFrom<String> for Atom {
    type Error = SyntaxError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Atom::new(value)
    }
}

impl From<Atom> for String {
    fn from(atom: Atom) -> Self {
        atom.0
    }
}

impl std::str::FromStr for Atom {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Atom::new(s)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A past temporal formula in core syntax.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PastFormula {
    Falsum,
    Atom(Atom),
    Not(Box<PastFormula>),
    And(Box<PastFormula>, Box<PastFormula>),
    Or(Box<PastFormula>, Box<PastFormula>),
    Previous(Box<PastFormula>),
    Since(Box<PastFormula>, Box<PastFormula>),
    Trigger(Box<PastFormula>, Box<PastFormula>),
}

impl PastFormula {
    pub fn atom(atom: Atom) -> Self {
        PastFormula::Atom(atom)
    }

    /// `¬⊥`, the core encoding of truth.
    pub fn verum() -> Self {
        PastFormula::Falsum.negate()
    }

    /// `¬●¬⊥`, true exactly at the first time point.
    pub fn initially() -> Self {
        PastFormula::verum().previous().negate()
    }

    pub fn negate(self) -> Self {
        PastFormula::Not(Box::new(self))
    }

    pub fn and(self, rhs: PastFormula) -> Self {
        PastFormula::And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: PastFormula) -> Self {
        PastFormula::Or(Box::new(self), Box::new(rhs))
    }

    pub fn previous(self) -> Self {
        PastFormula::Previous(Box::new(self))
    }

    pub fn since(self, rhs: PastFormula) -> Self {
        PastFormula::Since(Box::new(self), Box::new(rhs))
    }

    pub fn trigger(self, rhs: PastFormula) -> Self {
        PastFormula::Trigger(Box::new(self), Box::new(rhs))
    }

    /// `●φ ∨ 𝗜`.
    pub fn weak_previous(self) -> Self {
        self.previous().or(PastFormula::initially())
    }

    pub fn is_verum(&self) -> bool {
        matches!(self, PastFormula::Not(inner) if **inner == PastFormula::Falsum)
    }

    /// Left-nested conjunction; the empty conjunction is `¬⊥`.
    pub fn conjunction(items: impl IntoIterator<Item = PastFormula>) -> Self {
        items
            .into_iter()
            .reduce(PastFormula::and)
            .unwrap_or_else(PastFormula::verum)
    }

    /// Left-nested disjunction; the empty disjunction is `⊥`.
    pub fn disjunction(items: impl IntoIterator<Item = PastFormula>) -> Self {
        items
            .into_iter()
            .reduce(PastFormula::or)
            .unwrap_or(PastFormula::Falsum)
    }

    pub fn children(&self) -> Vec<&PastFormula> {
        match self {
            PastFormula::Falsum | PastFormula::Atom(_) => vec![],
            PastFormula::Not(f) | PastFormula::Previous(f) => vec![f],
            PastFormula::And(l, r)
            | PastFormula::Or(l, r)
            | PastFormula::Since(l, r)
            | PastFormula::Trigger(l, r) => vec![l, r],
        }
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    pub(crate) fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            PastFormula::Atom(a) => {
                out.insert(a.clone());
            }
            _ => self
                .children()
                .into_iter()
                .for_each(|c| c.collect_atoms(out)),
        }
    }

    /// Number of nodes in the syntax tree.
    pub fn size(&self) -> usize {
        1 + self
            .children()
            .into_iter()
            .map(PastFormula::size)
            .sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self
            .children()
            .into_iter()
            .map(PastFormula::depth)
            .max()
            .unwrap_or(0)
    }

    /// True for `a` and `¬a`.
    pub fn is_regular_literal(&self) -> bool {
        match self {
            PastFormula::Atom(_) => true,
            PastFormula::Not(inner) => matches!(**inner, PastFormula::Atom(_)),
            _ => false,
        }
    }

    /// True for `¬⊥` and for conjunction trees whose leaves are regular literals.
    pub fn is_literal_conjunction(&self) -> bool {
        fn conj(f: &PastFormula) -> bool {
            match f {
                PastFormula::And(l, r) => conj(l) && conj(r),
                other => other.is_regular_literal(),
            }
        }
        self.is_verum() || conj(self)
    }
}

impl From<Atom> for PastFormula {
    fn from(atom: Atom) -> Self {
        PastFormula::Atom(atom)
    }
}

/// A formula as written by a user: core connectives plus derived operators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SurfaceFormula {
    Falsum,
    Atom(Atom),
    Not(Box<SurfaceFormula>),
    And(Box<SurfaceFormula>, Box<SurfaceFormula>),
    Or(Box<SurfaceFormula>, Box<SurfaceFormula>),
    Previous(Box<SurfaceFormula>),
    Since(Box<SurfaceFormula>, Box<SurfaceFormula>),
    Trigger(Box<SurfaceFormula>, Box<SurfaceFormula>),
    Verum,
    Initially,
    WeakPrevious(Box<SurfaceFormula>),
    AlwaysBefore(Box<SurfaceFormula>),
    EventuallyBefore(Box<SurfaceFormula>),
}

impl From<&PastFormula> for SurfaceFormula {
    fn from(f: &PastFormula) -> Self {
        let b = |g: &PastFormula| Box::new(SurfaceFormula::from(g));
        match f {
            PastFormula::Falsum => SurfaceFormula::Falsum,
            PastFormula::Atom(a) => SurfaceFormula::Atom(a.clone()),
            PastFormula::Not(g) => SurfaceFormula::Not(b(g)),
            PastFormula::And(l, r) => SurfaceFormula::And(b(l), b(r)),
            PastFormula::Or(l, r) => SurfaceFormula::Or(b(l), b(r)),
            PastFormula::Previous(g) => SurfaceFormula::Previous(b(g)),
            PastFormula::Since(l, r) => SurfaceFormula::Since(b(l), b(r)),
            PastFormula::Trigger(l, r) => SurfaceFormula::Trigger(b(l), b(r)),
        }
    }
}

/// Rewrites derived operators into core syntax:
/// `⊤ ↦ ¬⊥`, `𝗜 ↦ ¬●⊤`, `■φ ↦ ⊥ T φ`, `◆φ ↦ ⊤ S φ`, `●̂φ ↦ ●φ ∨ 𝗜`.
pub fn expand_derived(f: &SurfaceFormula) -> PastFormula {
    match f {
        SurfaceFormula::Falsum => PastFormula::Falsum,
        SurfaceFormula::Atom(a) => PastFormula::Atom(a.clone()),
        SurfaceFormula::Not(g) => expand_derived(g).negate(),
        SurfaceFormula::And(l, r) => expand_derived(l).and(expand_derived(r)),
        SurfaceFormula::Or(l, r) => expand_derived(l).or(expand_derived(r)),
        SurfaceFormula::Previous(g) => expand_derived(g).previous(),
        SurfaceFormula::Since(l, r) => expand_derived(l).since(expand_derived(r)),
        SurfaceFormula::Trigger(l, r) => expand_derived(l).trigger(expand_derived(r)),
        SurfaceFormula::Verum => PastFormula::verum(),
        SurfaceFormula::Initially => PastFormula::initially(),
        SurfaceFormula::WeakPrevious(g) => expand_derived(g).weak_previous(),
        SurfaceFormula::AlwaysBefore(g) => PastFormula::Falsum.trigger(expand_derived(g)),
        SurfaceFormula::EventuallyBefore(g) => PastFormula::verum().since(expand_derived(g)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Presentness {
    Present,
    Past,
}

/// One atom leaf of a formula, located by its child-index path from the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occurrence {
    pub atom: Atom,
    pub polarity: Polarity,
    pub presentness: Presentness,
    /// Number of negations enclosing the occurrence.
    pub negation_depth: usize,
    pub path: Vec<usize>,
}

impl Occurrence {
    pub fn in_scope_of_negation(&self) -> bool {
        self.negation_depth > 0
    }

    pub fn is_present(&self) -> bool {
        self.presentness == Presentness::Present
    }

    /// Positive, present and not under any negation: the occurrences that
    /// create positive dependencies.
    pub fn is_positive_dependency(&self) -> bool {
        self.polarity == Polarity::Positive && self.is_present() && !self.in_scope_of_negation()
    }
}

/// Lists every atom occurrence of `f` in left-to-right order.
///
/// `¬φ` is read as `φ → ⊥`, so polarity flips with each enclosing negation.
pub fn classify_occurrences(f: &PastFormula) -> Vec<Occurrence> {
    fn walk(
        f: &PastFormula,
        negations: usize,
        past: bool,
        path: &mut Vec<usize>,
        out: &mut Vec<Occurrence>,
    ) {
        match f {
            PastFormula::Falsum => {}
            PastFormula::Atom(a) => out.push(Occurrence {
                atom: a.clone(),
                polarity: if negations.is_multiple_of(2) {
                    Polarity::Positive
                } else {
                    Polarity::Negative
                },
                presentness: if past {
                    Presentness::Past
                } else {
                    Presentness::Present
                },
                negation_depth: negations,
                path: path.clone(),
            }),
            PastFormula::Not(g) => {
                path.push(0);
                walk(g, negations + 1, past, path, out);
                path.pop();
            }
            PastFormula::Previous(g) => {
                path.push(0);
                walk(g, negations, true, path, out);
                path.pop();
            }
            PastFormula::And(l, r)
            | PastFormula::Or(l, r)
            | PastFormula::Since(l, r)
            | PastFormula::Trigger(l, r) => {
                for (i, child) in [l, r].into_iter().enumerate() {
                    path.push(i);
                    walk(child, negations, past, path, out);
                    path.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    walk(f, 0, false, &mut Vec::new(), &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleKind {
    Initial,
    Dynamic,
    Final,
}

impl RuleKind {
    pub fn directive(self) -> &'static str {
        match self {
            RuleKind::Initial => "#initial",
            RuleKind::Dynamic => "#dynamic",
            RuleKind::Final => "#final",
        }
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleKind::Initial => "initial",
            RuleKind::Dynamic => "dynamic",
            RuleKind::Final => "final",
        })
    }
}

/// `H ← B` in one of the three sections. An empty head stands for `⊥`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    kind: RuleKind,
    head: Vec<Atom>,
    body: PastFormula,
    source_index: usize,
}

impl Rule {
    pub fn new(
        kind: RuleKind,
        head: Vec<Atom>,
        body: PastFormula,
        source_index: usize,
    ) -> Result<Self, SyntaxError> {
        if kind == RuleKind::Final && !head.is_empty() {
            return Err(SyntaxError::FinalHead);
        }
        if kind != RuleKind::Dynamic && !body.is_literal_conjunction() {
            return Err(SyntaxError::IrregularBody(kind));
        }
        Ok(Rule {
            kind,
            head,
            body,
            source_index,
        })
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn head(&self) -> &[Atom] {
        &self.head
    }

    pub fn body(&self) -> &PastFormula {
        &self.body
    }

    pub fn source_index(&self) -> usize {
        self.source_index
    }

    pub fn is_constraint(&self) -> bool {
        self.head.is_empty()
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out: BTreeSet<Atom> = self.head.iter().cloned().collect();
        self.body.collect_atoms(&mut out);
        out
    }
}

/// An ordered list of rules over an alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Program {
    rules: Vec<Rule>,
    alphabet: BTreeSet<Atom>,
}

impl Program {
    /// Builds a program whose alphabet is exactly the atoms occurring in `rules`.
    pub fn new(rules: Vec<Rule>) -> Self {
        let alphabet = rules.iter().flat_map(Rule::atoms).collect();
        Program { rules, alphabet }
    }

    /// Adds atoms to the alphabet that do not occur in any rule.
    pub fn with_alphabet(mut self, extra: impl IntoIterator<Item = Atom>) -> Self {
        self.alphabet.extend(extra);
        self
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn alphabet(&self) -> &BTreeSet<Atom> {
        &self.alphabet
    }

    pub fn section(&self, kind: RuleKind) -> impl Iterator<Item = &Rule> + '_ {
        self.rules.iter().filter(move |r| r.kind == kind)
    }

    pub fn initial(&self) -> Vec<&Rule> {
        self.section(RuleKind::Initial).collect()
    }

    pub fn dynamic(&self) -> Vec<&Rule> {
        self.section(RuleKind::Dynamic).collect()
    }

    pub fn final_rules(&self) -> Vec<&Rule> {
        self.section(RuleKind::Final).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

/// The atoms occurring in heads or bodies of `p`.
pub fn atoms_of(p: &Program) -> BTreeSet<Atom> {
    p.rules.iter().flat_map(Rule::atoms).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(name: &str) -> PastFormula {
        PastFormula::Atom(Atom::new(name).unwrap())
    }

    #[test]
    fn atom_names() {
        assert!(Atom::new("load").is_ok());
        assert!(Atom::new("x_1Y").is_ok());
        assert!(Atom::new("Load").is_err());
        assert!(Atom::new("").is_err());
        assert!(Atom::new("1a").is_err());
        assert!(Atom::new("a-b").is_err());
        assert!(Atom::new("since").is_err());
    }

    #[test]
    fn expand_verum() {
        assert_eq!(
            expand_derived(&SurfaceFormula::Verum),
            PastFormula::Falsum.negate()
        );
    }

    #[test]
    fn expand_initially() {
        let expected = PastFormula::Falsum.negate().previous().negate();
        assert_eq!(expand_derived(&SurfaceFormula::Initially), expected);
    }

    #[test]
    fn expand_temporal_sugar() {
        let x = Box::new(SurfaceFormula::Atom(Atom::new("x").unwrap()));
        assert_eq!(
            expand_derived(&SurfaceFormula::AlwaysBefore(x.clone())),
            PastFormula::Falsum.trigger(a("x"))
        );
        assert_eq!(
            expand_derived(&SurfaceFormula::EventuallyBefore(x.clone())),
            PastFormula::verum().since(a("x"))
        );
        assert_eq!(
            expand_derived(&SurfaceFormula::WeakPrevious(x)),
            a("x").previous().or(PastFormula::initially())
        );
    }

    #[test]
    fn expand_identity_on_core() {
        let f = a("a");
        assert_eq!(expand_derived(&SurfaceFormula::from(&f)), f);
    }

    #[test]
    fn occurrences_of_rule_three_body() {
        let body = a("shoot").and(a("unload").negate().since(a("load")));
        let occ = classify_occurrences(&body);
        assert_eq!(occ.len(), 3);
        let find = |n: &str| occ.iter().find(|o| o.atom.name() == n).unwrap();
        assert_eq!(find("shoot").polarity, Polarity::Positive);
        assert_eq!(find("shoot").presentness, Presentness::Present);
        assert_eq!(find("unload").polarity, Polarity::Negative);
        assert_eq!(find("unload").presentness, Presentness::Present);
        assert_eq!(find("load").polarity, Polarity::Positive);
        assert_eq!(find("load").presentness, Presentness::Present);
        assert_eq!(find("unload").path, vec![1, 0, 0]);
    }

    #[test]
    fn occurrences_under_previous() {
        let occ = classify_occurrences(&a("b").and(a("c").previous()));
        assert_eq!(occ[0].presentness, Presentness::Present);
        assert_eq!(occ[1].presentness, Presentness::Past);
        assert_eq!(occ[1].polarity, Polarity::Positive);
    }

    #[test]
    fn double_negation_is_positive_but_negated() {
        let occ = classify_occurrences(&a("a").negate().negate());
        assert_eq!(occ[0].polarity, Polarity::Positive);
        assert_eq!(occ[0].presentness, Presentness::Present);
        assert!(occ[0].in_scope_of_negation());
        assert!(!occ[0].is_positive_dependency());
    }

    #[test]
    fn rule_restrictions() {
        let head = vec![Atom::new("a").unwrap()];
        assert_eq!(
            Rule::new(RuleKind::Final, head.clone(), PastFormula::verum(), 0),
            Err(SyntaxError::FinalHead)
        );
        assert_eq!(
            Rule::new(RuleKind::Initial, head.clone(), a("b").since(a("c")), 0),
            Err(SyntaxError::IrregularBody(RuleKind::Initial))
        );
        assert!(Rule::new(
            RuleKind::Initial,
            head.clone(),
            a("b").and(a("c").negate()),
            0
        )
        .is_ok());
        assert!(Rule::new(RuleKind::Dynamic, head, a("b").since(a("c")), 0).is_ok());
    }

    #[test]
    fn atoms_of_programs() {
        assert!(atoms_of(&Program::default()).is_empty());
        let fact = Rule::new(
            RuleKind::Initial,
            vec![Atom::new("a").unwrap()],
            PastFormula::verum(),
            0,
        )
        .unwrap();
        let p = Program::new(vec![fact]);
        assert_eq!(
            atoms_of(&p),
            [Atom::new("a").unwrap()].into_iter().collect()
        );
    }
}
