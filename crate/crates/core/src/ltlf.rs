//! Extended temporal formulas and their classical satisfaction over total
//! finite traces.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::eval::{self, AtomIndex, Node};
use crate::syntax::{Atom, PastFormula};
use crate::trace::{Budget, SemanticsError, Trace};

/// Output language of the compilers: past formulas plus implication,
/// biconditional, `always`, `wnext_always` and the `I`/`F` constants.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtFormula {
    Falsum,
    Verum,
    Atom(Atom),
    Not(Box<ExtFormula>),
    And(Box<ExtFormula>, Box<ExtFormula>),
    Or(Box<ExtFormula>, Box<ExtFormula>),
    Previous(Box<ExtFormula>),
    Since(Box<ExtFormula>, Box<ExtFormula>),
    Trigger(Box<ExtFormula>, Box<ExtFormula>),
    Implies(Box<ExtFormula>, Box<ExtFormula>),
    Iff(Box<ExtFormula>, Box<ExtFormula>),
    /// Holds at `k` when the argument holds at every point of `[k, λ)`.
    Always(Box<ExtFormula>),
    /// Holds at `k` when the argument holds at every point of `[k+1, λ)`.
    WeakNextAlways(Box<ExtFormula>),
    InitialConst,
    FinalConst,
}

impl ExtFormula {
    pub fn negate(self) -> Self {
        ExtFormula::Not(Box::new(self))
    }

    pub fn and(self, rhs: ExtFormula) -> Self {
        ExtFormula::And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: ExtFormula) -> Self {
        ExtFormula::Or(Box::new(self), Box::new(rhs))
    }

    pub fn implies(self, rhs: ExtFormula) -> Self {
        ExtFormula::Implies(Box::new(self), Box::new(rhs))
    }

    pub fn iff(self, rhs: ExtFormula) -> Self {
        ExtFormula::Iff(Box::new(self), Box::new(rhs))
    }

    pub fn always(self) -> Self {
        ExtFormula::Always(Box::new(self))
    }

    pub fn wnext_always(self) -> Self {
        ExtFormula::WeakNextAlways(Box::new(self))
    }

    /// Left-nested disjunction; the empty disjunction is `⊥`.
    pub fn disjunction(items: impl IntoIterator<Item = ExtFormula>) -> Self {
        items
            .into_iter()
            .reduce(ExtFormula::or)
            .unwrap_or(ExtFormula::Falsum)
    }

    /// Left-nested conjunction; the empty conjunction is `⊤`.
    pub fn conjunction(items: impl IntoIterator<Item = ExtFormula>) -> Self {
        items
            .into_iter()
            .reduce(ExtFormula::and)
            .unwrap_or(ExtFormula::Verum)
    }

    pub fn children(&self) -> Vec<&ExtFormula> {
        use ExtFormula::*;
        match self {
            Falsum | Verum | Atom(_) | InitialConst | FinalConst => vec![],
            Not(f) | Previous(f) | Always(f) | WeakNextAlways(f) => vec![f],
            And(l, r) | Or(l, r) | Since(l, r) | Trigger(l, r) | Implies(l, r) | Iff(l, r) => {
                vec![l, r]
            }
        }
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            ExtFormula::Atom(a) => {
                out.insert(a.clone());
            }
            _ => self
                .children()
                .into_iter()
                .for_each(|c| c.collect_atoms(out)),
        }
    }

    /// The past formula this is, if it uses only past connectives.
    /// `⊤` is mapped to `¬⊥`.
    pub fn to_past(&self) -> Option<PastFormula> {
        use ExtFormula as E;
        Some(match self {
            E::Falsum => PastFormula::Falsum,
            E::Verum => PastFormula::verum(),
            E::Atom(a) => PastFormula::Atom(a.clone()),
            E::Not(f) => f.to_past()?.negate(),
            E::And(l, r) => l.to_past()?.and(r.to_past()?),
            E::Or(l, r) => l.to_past()?.or(r.to_past()?),
            E::Previous(f) => f.to_past()?.previous(),
            E::Since(l, r) => l.to_past()?.since(r.to_past()?),
            E::Trigger(l, r) => l.to_past()?.trigger(r.to_past()?),
            _ => return None,
        })
    }
}

impl From<&PastFormula> for ExtFormula {
    fn from(f: &PastFormula) -> Self {
        let b = |g: &PastFormula| Box::new(ExtFormula::from(g));
        match f {
            PastFormula::Falsum => ExtFormula::Falsum,
            PastFormula::Atom(a) => ExtFormula::Atom(a.clone()),
            PastFormula::Not(g) => ExtFormula::Not(b(g)),
            PastFormula::And(l, r) => ExtFormula::And(b(l), b(r)),
            PastFormula::Or(l, r) => ExtFormula::Or(b(l), b(r)),
            PastFormula::Previous(g) => ExtFormula::Previous(b(g)),
            PastFormula::Since(l, r) => ExtFormula::Since(b(l), b(r)),
            PastFormula::Trigger(l, r) => ExtFormula::Trigger(b(l), b(r)),
        }
    }
}

impl From<PastFormula> for ExtFormula {
    fn from(f: PastFormula) -> Self {
        ExtFormula::from(&f)
    }
}

impl From<Atom> for ExtFormula {
    fn from(a: Atom) -> Self {
        ExtFormula::Atom(a)
    }
}

/// Classical satisfaction of `f` at point `k` of the total trace `t`.
pub fn ltlf_sat(t: &Trace, k: usize, f: &ExtFormula) -> Result<bool, SemanticsError> {
    t.check_point(k)?;
    let index = AtomIndex::new(f.atoms());
    let node = eval::compile_ext(f, &index);
    let cols = index.columns(t.states())?;
    Ok(eval::total(&node, &cols, t.len()) >> k & 1 == 1)
}

/// All total traces of length `len` over `alphabet` satisfying every formula
/// of `fs` at point 0, in sorted order.
pub fn enumerate_ltlf_models(
    fs: &[ExtFormula],
    len: usize,
    alphabet: &BTreeSet<Atom>,
    budget: Budget,
) -> Result<BTreeSet<Trace>, SemanticsError> {
    let mentioned: BTreeSet<Atom> = fs.iter().flat_map(ExtFormula::atoms).collect();
    if let Some(missing) = mentioned.difference(alphabet).next() {
        return Err(SemanticsError::AtomOutsideAlphabet(missing.clone()));
    }
    let index = AtomIndex::new(alphabet.iter().cloned());
    let bits = budget.check(index.len(), len)?;
    let nodes: Vec<Node> = fs.iter().map(|f| eval::compile_ext(f, &index)).collect();
    let width = index.len();
    let hits: Vec<u64> = (0..1u64 << bits)
        .into_par_iter()
        .filter(|&candidate| {
            let cols = eval::unpack(candidate, width, len);
            nodes.iter().all(|n| eval::total(n, &cols, len) & 1 == 1)
        })
        .collect();
    Ok(hits
        .into_iter()
        .map(|c| index.trace_of(&eval::unpack(c, width, len), len))
        .collect())
}
