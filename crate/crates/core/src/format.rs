//! Canonical text for formulas, rules and programs, in the `.ppt` grammar.
//!
//! Precedence levels, loosest first: `<->`, `->`, `or`, `and`, `since` /
//! `trigger`, unary. `since` and `trigger` are always printed inside their own
//! parentheses.

use std::fmt;

use crate::ltlf::ExtFormula;
use crate::syntax::{PastFormula, Program, Rule};

const IFF: u8 = 0;
const IMPLIES: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const SINCE: u8 = 4;
const UNARY: u8 = 5;

fn wrap(
    out: &mut fmt::Formatter<'_>,
    own: u8,
    min: u8,
    body: impl FnOnce(&mut fmt::Formatter<'_>) -> fmt::Result,
) -> fmt::Result {
    if own < min {
        out.write_str("(")?;
        body(out)?;
        out.write_str(")")
    } else {
        body(out)
    }
}

fn past(f: &PastFormula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    match f {
        PastFormula::Falsum => out.write_str("false"),
        PastFormula::Atom(a) => write!(out, "{a}"),
        _ if f.is_verum() => out.write_str("true"),
        PastFormula::Not(g) => wrap(out, UNARY, min, |out| {
            out.write_str("not ")?;
            past(g, UNARY, out)
        }),
        PastFormula::Previous(g) => wrap(out, UNARY, min, |out| {
            out.write_str("prev ")?;
            past(g, UNARY, out)
        }),
        PastFormula::Or(l, r) => wrap(out, OR, min, |out| {
            past(l, OR, out)?;
            out.write_str(" or ")?;
            past(r, AND, out)
        }),
        PastFormula::And(l, r) => wrap(out, AND, min, |out| {
            past(l, AND, out)?;
            out.write_str(", ")?;
            past(r, SINCE, out)
        }),
        PastFormula::Since(l, r) | PastFormula::Trigger(l, r) => {
            let op = if matches!(f, PastFormula::Since(..)) {
                "since"
            } else {
                "trigger"
            };
            out.write_str("(")?;
            past(l, SINCE, out)?;
            write!(out, " {op} ")?;
            past(r, UNARY, out)?;
            out.write_str(")")
        }
    }
}

fn ext(f: &ExtFormula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    use ExtFormula as E;
    match f {
        E::Falsum => out.write_str("false"),
        E::Verum => out.write_str("true"),
        E::InitialConst => out.write_str("I"),
        E::FinalConst => out.write_str("F"),
        E::Atom(a) => write!(out, "{a}"),
        E::Not(g) => wrap(out, UNARY, min, |out| {
            out.write_str("not ")?;
            ext(g, UNARY, out)
        }),
        E::Previous(g) => wrap(out, UNARY, min, |out| {
            out.write_str("prev ")?;
            ext(g, UNARY, out)
        }),
        E::Always(g) => {
            out.write_str("always(")?;
            ext(g, IFF, out)?;
            out.write_str(")")
        }
        E::WeakNextAlways(g) => {
            out.write_str("wnext_always(")?;
            ext(g, IFF, out)?;
            out.write_str(")")
        }
        E::Iff(l, r) => wrap(out, IFF, min, |out| {
            ext(l, IMPLIES, out)?;
            out.write_str(" <-> ")?;
            ext(r, IMPLIES, out)
        }),
        E::Implies(l, r) => wrap(out, IMPLIES, min, |out| {
            ext(l, OR, out)?;
            out.write_str(" -> ")?;
            ext(r, IMPLIES, out)
        }),
        E::Or(l, r) => wrap(out, OR, min, |out| {
            ext(l, OR, out)?;
            out.write_str(" or ")?;
            ext(r, AND, out)
        }),
        E::And(l, r) => wrap(out, AND, min, |out| {
            ext(l, AND, out)?;
            out.write_str(", ")?;
            ext(r, SINCE, out)
        }),
        E::Since(l, r) | E::Trigger(l, r) => {
            let op = if matches!(f, E::Since(..)) {
                "since"
            } else {
                "trigger"
            };
            out.write_str("(")?;
            ext(l, SINCE, out)?;
            write!(out, " {op} ")?;
            ext(r, UNARY, out)?;
            out.write_str(")")
        }
    }
}

impl fmt::Display for PastFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        past(self, IFF, f)
    }
}

impl fmt::Display for ExtFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        ext(self, IFF, f)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, atom) in self.head().iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{atom}")?;
        }
        if self.head().is_empty() || !self.body().is_verum() {
            if !self.head().is_empty() {
                f.write_str(" ")?;
            }
            write!(f, ":- {}", self.body())?;
        }
        f.write_str(".")
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut section = None;
        for rule in self.rules() {
            if section != Some(rule.kind()) {
                writeln!(f, "{}.", rule.kind().directive())?;
                section = Some(rule.kind());
            }
            writeln!(f, "{rule}")?;
        }
        Ok(())
    }
}

/// Canonical text of a formula, rule or program.
pub fn format<T: fmt::Display + ?Sized>(x: &T) -> String {
    x.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{Atom, RuleKind};

    fn a(name: &str) -> PastFormula {
        PastFormula::Atom(Atom::new(name).unwrap())
    }

    #[test]
    fn since_is_parenthesized() {
        let f = a("unload").negate().since(a("load"));
        assert_eq!(f.to_string(), "(not unload since load)");
    }

    #[test]
    fn rule_three() {
        let body = a("shoot").and(a("unload").negate().since(a("load")));
        let r = Rule::new(RuleKind::Dynamic, vec![Atom::new("dead").unwrap()], body, 2).unwrap();
        assert_eq!(r.to_string(), "dead :- shoot, (not unload since load).");
    }

    #[test]
    fn facts_and_constraints() {
        let fact = Rule::new(
            RuleKind::Initial,
            vec![Atom::new("a").unwrap()],
            PastFormula::verum(),
            0,
        )
        .unwrap();
        assert_eq!(fact.to_string(), "a.");
        let c = Rule::new(RuleKind::Final, vec![], a("dead").negate(), 1).unwrap();
        assert_eq!(c.to_string(), ":- not dead.");
        let empty = Rule::new(RuleKind::Initial, vec![], PastFormula::verum(), 2).unwrap();
        assert_eq!(empty.to_string(), ":- true.");
    }

    #[test]
    fn program_sections() {
        let r = |k, h: &str, i| {
            Rule::new(k, vec![Atom::new(h).unwrap()], PastFormula::verum(), i).unwrap()
        };
        let p = Program::new(vec![
            r(RuleKind::Initial, "a", 0),
            r(RuleKind::Dynamic, "b", 1),
            r(RuleKind::Dynamic, "c", 2),
        ]);
        assert_eq!(p.to_string(), "#initial.\na.\n#dynamic.\nb.\nc.\n");
        assert_eq!(Program::default().to_string(), "");
    }

    #[test]
    fn nesting_parentheses() {
        let f = a("a").or(a("b")).and(a("c").and(a("d")));
        assert_eq!(f.to_string(), "(a or b), (c, d)");
        let g = a("a").and(a("b")).negate().previous();
        assert_eq!(g.to_string(), "prev not (a, b)");
        assert_eq!(
            PastFormula::Falsum.negate().negate().to_string(),
            "not true"
        );
    }

    #[test]
    fn ext_operators() {
        let e = |n: &str| ExtFormula::Atom(Atom::new(n).unwrap());
        let f = e("a").iff(ExtFormula::InitialConst.and(e("b"))).always();
        assert_eq!(f.to_string(), "always(a <-> I, b)");
        let g = e("a").implies(e("b").implies(e("c"))).wnext_always();
        assert_eq!(g.to_string(), "wnext_always(a -> b -> c)");
        let h = e("a").implies(e("b")).implies(e("c"));
        assert_eq!(h.to_string(), "(a -> b) -> c");
        assert_eq!(ExtFormula::Falsum.negate().to_string(), "not false");
        assert_eq!(ExtFormula::FinalConst.to_string(), "F");
    }
}
