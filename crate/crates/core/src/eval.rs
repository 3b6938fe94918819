//! Bit-parallel evaluation over all time points at once.
//!
//! A trace is stored column-wise: for every atom, a `u64` whose bit `k` says
//! whether the atom holds at point `k`. Evaluating a node yields the set of
//! points where it holds, again as a `u64`.

use std::collections::{BTreeSet, HashMap};

use crate::ltlf::ExtFormula;
use crate::syntax::{Atom, PastFormula};
use crate::trace::{SemanticsError, Trace, MAX_TRACE_LEN};

pub(crate) struct AtomIndex {
    atoms: Vec<Atom>,
    positions: HashMap<Atom, usize>,
}

impl AtomIndex {
    pub(crate) fn new(atoms: impl IntoIterator<Item = Atom>) -> Self {
        let atoms: Vec<Atom> = atoms
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let positions = atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        AtomIndex { atoms, positions }
    }

    pub(crate) fn len(&self) -> usize {
        self.atoms.len()
    }

    pub(crate) fn position(&self, atom: &Atom) -> Option<usize> {
        self.positions.get(atom).copied()
    }

    /// Column masks for `states`; atoms outside the index are ignored.
    pub(crate) fn columns(
        &self,
        states: &[std::collections::BTreeSet<Atom>],
    ) -> Result<Vec<u64>, SemanticsError> {
        if states.len() > MAX_TRACE_LEN {
            return Err(SemanticsError::TraceTooLong(states.len()));
        }
        let mut cols = vec![0u64; self.atoms.len()];
        for (k, state) in states.iter().enumerate() {
            for atom in state {
                if let Some(i) = self.position(atom) {
                    cols[i] |= 1 << k;
                }
            }
        }
        Ok(cols)
    }

    pub(crate) fn trace_of(&self, cols: &[u64], len: usize) -> Trace {
        let states = (0..len)
            .map(|k| {
                self.atoms
                    .iter()
                    .zip(cols)
                    .filter(|(_, c)| *c >> k & 1 == 1)
                    .map(|(a, _)| a.clone())
                    .collect()
            })
            .collect();
        Trace::new(states).expect("len >= 1")
    }
}

/// Splits a packed candidate (atom `i` at point `k` is bit `i·len + k`) into columns.
pub(crate) fn unpack(candidate: u64, width: usize, len: usize) -> Vec<u64> {
    let mask = full(len);
    (0..width).map(|i| candidate >> (i * len) & mask).collect()
}

pub(crate) fn full(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Node {
    Falsum,
    Verum,
    Atom(usize),
    /// An atom outside the index; false everywhere.
    Absent,
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Previous(Box<Node>),
    Since(Box<Node>, Box<Node>),
    Trigger(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    Iff(Box<Node>, Box<Node>),
    Always(Box<Node>),
    WeakNextAlways(Box<Node>),
    Initial,
    Final,
}

fn atom_node(a: &Atom, index: &AtomIndex) -> Node {
    index.position(a).map_or(Node::Absent, Node::Atom)
}

pub(crate) fn compile_past(f: &PastFormula, index: &AtomIndex) -> Node {
    let c = |g: &PastFormula| Box::new(compile_past(g, index));
    match f {
        PastFormula::Falsum => Node::Falsum,
        PastFormula::Atom(a) => atom_node(a, index),
        PastFormula::Not(g) => Node::Not(c(g)),
        PastFormula::And(l, r) => Node::And(c(l), c(r)),
        PastFormula::Or(l, r) => Node::Or(c(l), c(r)),
        PastFormula::Previous(g) => Node::Previous(c(g)),
        PastFormula::Since(l, r) => Node::Since(c(l), c(r)),
        PastFormula::Trigger(l, r) => Node::Trigger(c(l), c(r)),
    }
}

pub(crate) fn compile_ext(f: &ExtFormula, index: &AtomIndex) -> Node {
    let c = |g: &ExtFormula| Box::new(compile_ext(g, index));
    match f {
        ExtFormula::Falsum => Node::Falsum,
        ExtFormula::Verum => Node::Verum,
        ExtFormula::Atom(a) => atom_node(a, index),
        ExtFormula::Not(g) => Node::Not(c(g)),
        ExtFormula::And(l, r) => Node::And(c(l), c(r)),
        ExtFormula::Or(l, r) => Node::Or(c(l), c(r)),
        ExtFormula::Previous(g) => Node::Previous(c(g)),
        ExtFormula::Since(l, r) => Node::Since(c(l), c(r)),
        ExtFormula::Trigger(l, r) => Node::Trigger(c(l), c(r)),
        ExtFormula::Implies(l, r) => Node::Implies(c(l), c(r)),
        ExtFormula::Iff(l, r) => Node::Iff(c(l), c(r)),
        ExtFormula::Always(g) => Node::Always(c(g)),
        ExtFormula::WeakNextAlways(g) => Node::WeakNextAlways(c(g)),
        ExtFormula::InitialConst => Node::Initial,
        ExtFormula::FinalConst => Node::Final,
    }
}

// s_k = ψ_k ∨ (φ_k ∧ s_{k-1}), with s_{-1} = false
fn since(lhs: u64, rhs: u64, len: usize) -> u64 {
    let mut out = 0u64;
    let mut prev = false;
    for k in 0..len {
        let cur = rhs >> k & 1 == 1 || (prev && lhs >> k & 1 == 1);
        out |= (cur as u64) << k;
        prev = cur;
    }
    out
}

// t_k = ψ_k ∧ (φ_k ∨ t_{k-1}), with t_{-1} = true
fn trigger(lhs: u64, rhs: u64, len: usize) -> u64 {
    let mut out = 0u64;
    let mut prev = true;
    for k in 0..len {
        let cur = rhs >> k & 1 == 1 && (prev || lhs >> k & 1 == 1);
        out |= (cur as u64) << k;
        prev = cur;
    }
    out
}

// points k such that every i in [k, len) is in `set`
fn suffix_closed(set: u64, len: usize) -> u64 {
    let mut out = 0u64;
    let mut all = true;
    for k in (0..len).rev() {
        all &= set >> k & 1 == 1;
        out |= (all as u64) << k;
    }
    out
}

/// Points of `⟨H, T⟩` (given as here/there columns) satisfying `node`.
pub(crate) fn ht(node: &Node, here: &[u64], there: &[u64], len: usize) -> u64 {
    let all = full(len);
    let go = |n: &Node| ht(n, here, there, len);
    match node {
        Node::Falsum | Node::Absent => 0,
        Node::Verum => all,
        Node::Atom(i) => here[*i],
        Node::Not(g) => !ht(g, there, there, len) & all,
        Node::And(l, r) => go(l) & go(r),
        Node::Or(l, r) => go(l) | go(r),
        Node::Previous(g) => go(g) << 1 & all,
        Node::Since(l, r) => since(go(l), go(r), len),
        Node::Trigger(l, r) => trigger(go(l), go(r), len),
        Node::Implies(l, r) => {
            let at_there = !ht(l, there, there, len) | ht(r, there, there, len);
            (!go(l) | go(r)) & at_there & all
        }
        Node::Iff(l, r) => {
            let fwd = Node::Implies(l.clone(), r.clone());
            let bwd = Node::Implies(r.clone(), l.clone());
            go(&fwd) & go(&bwd)
        }
        Node::Always(g) => suffix_closed(go(g), len),
        Node::WeakNextAlways(g) => suffix_closed(go(g), len) >> 1 | 1 << (len - 1),
        Node::Initial => 1,
        Node::Final => 1 << (len - 1),
    }
}

/// Points of the total trace (given as columns) classically satisfying `node`.
pub(crate) fn total(node: &Node, cols: &[u64], len: usize) -> u64 {
    let all = full(len);
    let go = |n: &Node| total(n, cols, len);
    match node {
        Node::Falsum | Node::Absent => 0,
        Node::Verum => all,
        Node::Atom(i) => cols[*i],
        Node::Not(g) => !go(g) & all,
        Node::And(l, r) => go(l) & go(r),
        Node::Or(l, r) => go(l) | go(r),
        Node::Previous(g) => go(g) << 1 & all,
        Node::Since(l, r) => since(go(l), go(r), len),
        Node::Trigger(l, r) => trigger(go(l), go(r), len),
        Node::Implies(l, r) => (!go(l) | go(r)) & all,
        Node::Iff(l, r) => !(go(l) ^ go(r)) & all,
        Node::Always(g) => suffix_closed(go(g), len),
        Node::WeakNextAlways(g) => {
            let later = suffix_closed(go(g), len);
            // k holds iff k+1 holds, or k is the last point
            (later >> 1) | 1 << (len - 1)
        }
        Node::Initial => 1,
        Node::Final => 1 << (len - 1),
    }
}
