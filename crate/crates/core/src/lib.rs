//! Past-present temporal programs: syntax, here-and-there and LTLf semantics,
//! positive dependency graphs, completion and loop formulas, and randomized
//! checks that the translations preserve stable models.

mod eval;

pub mod depgraph;
pub mod format;
pub mod ltlf;
pub mod parser;
pub mod syntax;
pub mod tht;
pub mod trace;
pub mod transform;
pub mod verifier;

pub use format::format;
pub use ltlf::{enumerate_ltlf_models, ltlf_sat, ExtFormula};
pub use parser::{parse_ext_formula, parse_formula, parse_program, ParseError, ParseErrorKind};
pub use syntax::{atoms_of, expand_derived, Atom, PastFormula, Program, Rule, RuleKind};
pub use tht::{enumerate_ts_models, ht_sat, is_ht_model, rule_sat, three_valued, TruthValue};
pub use trace::{Budget, HtTrace, ModelSet, SemanticsError, Trace};
