//! Reduction traces.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rewrite::{Micro, RuleTag};
use crate::strategies::StepKind;
use crate::term::{Path, Term};

/// What a step was: a calculus rule or a strategy step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Rule(RuleTag),
    Kind(StepKind),
}

impl Label {
    /// Whether the step fires a β-like rule.
    pub fn is_db(self) -> bool {
        matches!(
            self,
            Label::Rule(RuleTag::DB) | Label::Kind(StepKind::NDB) | Label::Kind(StepKind::FL_DB)
        )
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Rule(r) => write!(f, "{r}"),
            Label::Kind(k) => write!(f, "{k}"),
        }
    }
}

/// One step: its label, the position it was fired at, the resulting term
/// and the elementary moves that produced it.
#[derive(Clone, Debug)]
pub struct Step {
    pub label: Label,
    pub path: Path,
    pub term: Term,
    pub micros: Vec<Micro>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    NormalForm,
    FuelExhausted,
}

/// A reduction sequence.
#[derive(Clone, Debug)]
pub struct Trace {
    pub initial: Term,
    pub steps: Vec<Step>,
    pub status: Status,
}

impl Trace {
    pub fn new(initial: Term) -> Trace {
        Trace {
            initial,
            steps: Vec::new(),
            status: Status::FuelExhausted,
        }
    }

    pub fn final_term(&self) -> &Term {
        self.steps.last().map_or(&self.initial, |s| &s.term)
    }

    /// Term before step `i`.
    pub fn before(&self, i: usize) -> &Term {
        if i == 0 {
            &self.initial
        } else {
            &self.steps[i - 1].term
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn db_steps(&self) -> usize {
        self.steps.iter().filter(|s| s.label.is_db()).count()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.steps.iter().map(|s| s.label).collect()
    }
}

/// The end of a run whose intermediate terms were not kept.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub status: Status,
    pub term: Term,
    pub steps: usize,
    pub db_steps: usize,
}

/// A budget for a strategy run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fuel {
    /// At most this many steps of any kind.
    Steps(usize),
    /// At most this many dB steps. Other steps are not counted.
    DbSteps(usize),
}

impl From<usize> for Fuel {
    fn from(n: usize) -> Self {
        Fuel::Steps(n)
    }
}

/// Iterates `step` until the budget runs out, keeping only the current term.
/// `step` consumes the term and hands it back when no step applies.
pub fn run(
    t: &Term,
    fuel: impl Into<Fuel>,
    mut step: impl FnMut(Term) -> crate::Result<std::result::Result<Step, Term>>,
) -> crate::Result<Outcome> {
    let fuel = fuel.into();
    let mut out = Outcome {
        status: Status::FuelExhausted,
        term: t.clone(),
        steps: 0,
        db_steps: 0,
    };
    loop {
        let spent = match fuel {
            Fuel::Steps(n) => out.steps == n,
            Fuel::DbSteps(n) => out.db_steps == n,
        };
        let cur = if spent {
            out.term.clone()
        } else {
            std::mem::replace(&mut out.term, Term::var(""))
        };
        match step(cur)? {
            Err(nf) => {
                out.term = nf;
                out.status = Status::NormalForm;
                return Ok(out);
            }
            Ok(s) => {
                if spent && (matches!(fuel, Fuel::Steps(_)) || s.label.is_db()) {
                    return Ok(out);
                }
                out.steps += 1;
                out.db_steps += s.label.is_db() as usize;
                out.term = s.term;
            }
        }
    }
}
