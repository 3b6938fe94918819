//! Positive dependency graphs, loops and tightness.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;
use thiserror::Error;

use crate::syntax::{classify_occurrences, Atom, Program, Rule, RuleKind};

/// Largest strongly connected component whose subsets are enumerated.
pub const DEFAULT_SCC_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DepGraphError {
    #[error("a {found} rule cannot be part of the {expected} dependency graph")]
    MixedSection { expected: RuleKind, found: RuleKind },
    #[error("dependency graphs are built for initial or dynamic rules, not {0}")]
    NoGraphFor(RuleKind),
    #[error("strongly connected component of {size} atoms exceeds the cap of {cap}")]
    SccTooLarge { size: usize, cap: usize },
}

/// `G = (A, E)` for the rules of one section.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DepGraph {
    pub section: RuleKind,
    pub vertices: BTreeSet<Atom>,
    pub edges: BTreeSet<(Atom, Atom)>,
}

impl DepGraph {
    /// A graph with the given edges; edge endpoints are added as vertices.
    pub fn from_edges(
        section: RuleKind,
        vertices: impl IntoIterator<Item = Atom>,
        edges: impl IntoIterator<Item = (Atom, Atom)>,
    ) -> Self {
        let mut vertices: BTreeSet<Atom> = vertices.into_iter().collect();
        let edges: BTreeSet<(Atom, Atom)> = edges.into_iter().collect();
        for (a, b) in &edges {
            vertices.insert(a.clone());
            vertices.insert(b.clone());
        }
        DepGraph {
            section,
            vertices,
            edges,
        }
    }

    /// The graph of `p`'s `section` rules over `p`'s alphabet.
    pub fn of_section(p: &Program, section: RuleKind) -> Result<Self, DepGraphError> {
        dependency_graph(section, p.section(section), p.alphabet())
    }

    pub fn successors(&self, a: &Atom) -> impl Iterator<Item = &Atom> + '_ {
        let a = a.clone();
        self.edges
            .iter()
            .filter(move |(from, _)| *from == a)
            .map(|(_, to)| to)
    }

    pub fn has_edge(&self, a: &Atom, b: &Atom) -> bool {
        self.edges.contains(&(a.clone(), b.clone()))
    }

    /// Strongly connected components, each sorted, in sorted order.
    pub fn sccs(&self) -> Vec<Vec<Atom>> {
        let mut graph = DiGraph::<&Atom, ()>::new();
        let nodes: BTreeMap<&Atom, _> = self
            .vertices
            .iter()
            .map(|a| (a, graph.add_node(a)))
            .collect();
        for (a, b) in &self.edges {
            graph.add_edge(nodes[a], nodes[b], ());
        }
        let mut out: Vec<Vec<Atom>> = tarjan_scc(&graph)
            .into_iter()
            .map(|scc| {
                let mut atoms: Vec<Atom> = scc.into_iter().map(|n| graph[n].clone()).collect();
                atoms.sort();
                atoms
            })
            .collect();
        out.sort();
        out
    }
}

impl fmt::Display for DepGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (a, b) in &self.edges {
            writeln!(f, "{}: {a} -> {b}", self.section)?;
        }
        Ok(())
    }
}

/// Edge `(a, b)` whenever a rule has `a` in its head and a positive, present
/// occurrence of `b` outside the scope of negation in its body.
///
/// Final rules have empty heads and are skipped; rules of the other section
/// are rejected.
pub fn dependency_graph<'a>(
    section: RuleKind,
    rules: impl IntoIterator<Item = &'a Rule>,
    alphabet: &BTreeSet<Atom>,
) -> Result<DepGraph, DepGraphError> {
    if section == RuleKind::Final {
        return Err(DepGraphError::NoGraphFor(section));
    }
    let mut vertices = alphabet.clone();
    let mut edges = BTreeSet::new();
    for rule in rules {
        match rule.kind() {
            RuleKind::Final => continue,
            kind if kind != section => {
                return Err(DepGraphError::MixedSection {
                    expected: section,
                    found: kind,
                })
            }
            _ => {}
        }
        vertices.extend(rule.atoms());
        let positives: Vec<Atom> = classify_occurrences(rule.body())
            .into_iter()
            .filter(|o| o.is_positive_dependency())
            .map(|o| o.atom)
            .collect();
        for a in rule.head() {
            for b in &positives {
                edges.insert((a.clone(), b.clone()));
            }
        }
    }
    Ok(DepGraph {
        section,
        vertices,
        edges,
    })
}

/// A loop of the initial or dynamic graph.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Loop {
    pub section: RuleKind,
    pub atoms: BTreeSet<Atom>,
}

impl fmt::Display for Loop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {{", self.section)?;
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str("}")
    }
}

/// Vertices of `scc` reachable from bit `start` inside `subset`, following
/// `adj` (bit masks over positions in the component).
fn reach(adj: &[u32], subset: u32, start: usize) -> u32 {
    let mut seen = 0u32;
    let mut frontier = adj[start] & subset;
    while frontier & !seen != 0 {
        seen |= frontier;
        let mut next = 0u32;
        let mut bits = frontier;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            next |= adj[i];
            bits &= bits - 1;
        }
        frontier = next & subset;
    }
    seen
}

fn loops_in_scc(g: &DepGraph, scc: &[Atom]) -> Vec<BTreeSet<Atom>> {
    let pos: BTreeMap<&Atom, usize> = scc.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let mut fwd = vec![0u32; scc.len()];
    let mut bwd = vec![0u32; scc.len()];
    for (a, b) in &g.edges {
        if let (Some(&i), Some(&j)) = (pos.get(a), pos.get(b)) {
            fwd[i] |= 1 << j;
            bwd[j] |= 1 << i;
        }
    }
    let mut out = Vec::new();
    for subset in 1u32..(1u64 << scc.len()) as u32 {
        let start = subset.trailing_zeros() as usize;
        // a path of length > 0 back to `start` and to every other member
        if reach(&fwd, subset, start) == subset && reach(&bwd, subset, start) == subset {
            out.push(
                (0..scc.len())
                    .filter(|i| subset >> i & 1 == 1)
                    .map(|i| scc[i].clone())
                    .collect(),
            );
        }
    }
    out
}

/// All loops of `g` in canonical order, with the default component cap.
///
/// With `unitary`, every single atom counts as a loop as well.
pub fn enumerate_loops(g: &DepGraph, unitary: bool) -> Result<Vec<Loop>, DepGraphError> {
    enumerate_loops_capped(g, unitary, DEFAULT_SCC_CAP)
}

pub fn enumerate_loops_capped(
    g: &DepGraph,
    unitary: bool,
    cap: usize,
) -> Result<Vec<Loop>, DepGraphError> {
    let cap = cap.min(31);
    let mut found: BTreeSet<BTreeSet<Atom>> = BTreeSet::new();
    for scc in g.sccs() {
        if scc.len() > cap {
            return Err(DepGraphError::SccTooLarge {
                size: scc.len(),
                cap,
            });
        }
        found.extend(loops_in_scc(g, &scc));
    }
    if unitary {
        found.extend(g.vertices.iter().map(|a| BTreeSet::from([a.clone()])));
    }
    Ok(found
        .into_iter()
        .map(|atoms| Loop {
            section: g.section,
            atoms,
        })
        .collect())
}

/// Initial loops followed by dynamic loops.
pub fn program_loops(p: &Program, unitary: bool) -> Result<Vec<Loop>, DepGraphError> {
    let mut out = enumerate_loops(&DepGraph::of_section(p, RuleKind::Initial)?, unitary)?;
    out.extend(enumerate_loops(
        &DepGraph::of_section(p, RuleKind::Dynamic)?,
        unitary,
    )?);
    Ok(out)
}

/// No loops in either the initial or the dynamic graph.
pub fn is_tight(p: &Program) -> Result<bool, DepGraphError> {
    Ok(program_loops(p, false)?.is_empty())
}
