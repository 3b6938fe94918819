//! Finite traces, here-and-there traces and the shared model-set document.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::Atom;

/// Longest trace the evaluator accepts; time points are packed into a `u64`.
pub const MAX_TRACE_LEN: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("traces must have at least one state")]
    EmptyTrace,
    #[error("trace length {0} exceeds the supported maximum of {MAX_TRACE_LEN}")]
    TraceTooLong(usize),
    #[error("here and there traces differ in length ({here} vs {there})")]
    LengthMismatch { here: usize, there: usize },
    #[error("here state at point {0} is not a subset of the there state")]
    NotHereAndThere(usize),
    #[error("time point {k} is outside [0, {len})")]
    PointOutOfRange { k: usize, len: usize },
    #[error("2^{bits} candidate traces exceed the budget of {budget}")]
    BudgetExceeded { bits: usize, budget: u64 },
    #[error("atom `{0}` is not in the alphabet")]
    AtomOutsideAlphabet(Atom),
}

/// Upper bound on the number of candidate total traces an enumeration may visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Budget(pub u64);

impl Budget {
    pub const DEFAULT: Budget = Budget(1 << 24);

    /// Returns the number of candidate bits (`|alphabet|·λ`) when `2^bits`
    /// fits the budget.
    pub(crate) fn check(self, width: usize, len: usize) -> Result<usize, SemanticsError> {
        if len == 0 {
            return Err(SemanticsError::EmptyTrace);
        }
        if len > MAX_TRACE_LEN {
            return Err(SemanticsError::TraceTooLong(len));
        }
        let bits = width * len;
        if bits >= 64 || (1u64 << bits) > self.0 {
            return Err(SemanticsError::BudgetExceeded {
                bits,
                budget: self.0,
            });
        }
        Ok(bits)
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::DEFAULT
    }
}

/// A nonempty sequence of atom sets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<BTreeSet<Atom>>", into = "Vec<BTreeSet<Atom>>")]
pub struct Trace {
    states: Vec<BTreeSet<Atom>>,
}

impl Trace {
    pub fn new(states: Vec<BTreeSet<Atom>>) -> Result<Self, SemanticsError> {
        if states.is_empty() {
            return Err(SemanticsError::EmptyTrace);
        }
        Ok(Trace { states })
    }

    /// The trace of `len` empty states.
    pub fn empty(len: usize) -> Result<Self, SemanticsError> {
        Trace::new(vec![BTreeSet::new(); len])
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn states(&self) -> &[BTreeSet<Atom>] {
        &self.states
    }

    pub fn state(&self, k: usize) -> &BTreeSet<Atom> {
        &self.states[k]
    }

    /// `H ≤ T`: same length and pointwise inclusion.
    pub fn is_below(&self, other: &Trace) -> bool {
        self.len() == other.len()
            && self
                .states
                .iter()
                .zip(&other.states)
                .all(|(h, t)| h.is_subset(t))
    }

    pub(crate) fn check_point(&self, k: usize) -> Result<(), SemanticsError> {
        if k >= self.len() {
            return Err(SemanticsError::PointOutOfRange { k, len: self.len() });
        }
        Ok(())
    }
}

impl TryFrom<Vec<BTreeSet<Atom>>> for Trace {
    type Error = SemanticsError;

    fn try_from(states: Vec<BTreeSet<Atom>>) -> Result<Self, Self::Error> {
        Trace::new(states)
    }
}

impl From<Trace> for Vec<BTreeSet<Atom>> {
    fn from(t: Trace) -> Self {
        t.states
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, state) in self.states.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            f.write_str("{")?;
            for (j, atom) in state.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{atom}")?;
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}

/// A pair `⟨H, T⟩` of equal-length traces with `H_i ⊆ T_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HtTrace {
    here: Trace,
    there: Trace,
}

impl HtTrace {
    pub fn new(here: Trace, there: Trace) -> Result<Self, SemanticsError> {
        if here.len() != there.len() {
            return Err(SemanticsError::LengthMismatch {
                here: here.len(),
                there: there.len(),
            });
        }
        if let Some(i) = (0..here.len()).find(|&i| !here.state(i).is_subset(there.state(i))) {
            return Err(SemanticsError::NotHereAndThere(i));
        }
        Ok(HtTrace { here, there })
    }

    /// `⟨T, T⟩`.
    pub fn total(t: Trace) -> Self {
        HtTrace {
            here: t.clone(),
            there: t,
        }
    }

    pub fn here(&self) -> &Trace {
        &self.here
    }

    pub fn there(&self) -> &Trace {
        &self.there
    }

    pub fn len(&self) -> usize {
        self.here.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_total(&self) -> bool {
        self.here == self.there
    }

    /// `⟨T, T⟩` for this trace's there-component.
    pub fn there_total(&self) -> HtTrace {
        HtTrace::total(self.there.clone())
    }
}

/// `{"length": λ, "models": [[["a"], ["b", "c"]], ...]}`, models sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSet {
    pub length: usize,
    pub models: Vec<Trace>,
}

impl ModelSet {
    pub fn new(length: usize, models: impl IntoIterator<Item = Trace>) -> Self {
        let models: BTreeSet<Trace> = models.into_iter().collect();
        ModelSet {
            length,
            models: models.into_iter().collect(),
        }
    }
}
