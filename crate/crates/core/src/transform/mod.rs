//! Syntactic translations between ESO(Q) and dependence/independence logic
//! with generalized quantifiers.

mod definable;
mod flatten;
mod normal_form;
mod to_dq;
mod to_eso;

use std::fmt;

pub use definable::{check_definition, eliminate_definable_q};
pub use flatten::{check_flat, flat_tuples, flatten_functions};
pub use normal_form::to_normal_form;
pub use to_dq::{eso_to_dq, eso_to_dq_total};
pub use to_eso::{dq_to_eso, only_negative, Flavor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolKind {
    Variable,
    Function,
    Relation,
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymbolKind::Variable => "var",
            SymbolKind::Function => "fn",
            SymbolKind::Relation => "rel",
        })
    }
}

/// A symbol a translation introduced.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FreshSymbol {
    pub name: String,
    pub kind: SymbolKind,
    pub arity: usize,
}

impl fmt::Display for FreshSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SymbolKind::Variable => write!(f, "var {}", self.name),
            kind => write!(f, "{kind} {}/{}", self.name, self.arity),
        }
    }
}

/// One rewrite step: the rule applied and where. Paths are dot-separated
/// child indices into the input of the step (binders have a single child 0,
/// connectives children 0 and 1); prefix and matrix positions of a normal
/// form are written `prefix[i]` and `matrix`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Note {
    pub rule: &'static str,
    pub path: String,
}

impl fmt::Display for Note {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}", self.rule, if self.path.is_empty() { "root" } else { &self.path })
    }
}

#[derive(Debug, Clone)]
pub struct TranslationResult<T> {
    pub output: T,
    pub fresh: Vec<FreshSymbol>,
    pub notes: Vec<Note>,
    /// Smallest universe on which the output is guaranteed equivalent to the
    /// input. Eliminating a relation quantifier by two functions needs two
    /// elements.
    pub min_universe: usize,
}

impl<T> TranslationResult<T> {
    fn new(output: T) -> Self {
        TranslationResult {
            output,
            fresh: Vec::new(),
            notes: Vec::new(),
            min_universe: 1,
        }
    }

    fn map<U>(self, f: impl FnOnce(T) -> U) -> TranslationResult<U> {
        TranslationResult {
            output: f(self.output),
            fresh: self.fresh,
            notes: self.notes,
            min_universe: self.min_universe,
        }
    }

    /// Runs a further step on the output, keeping the bookkeeping of both.
    pub fn then<U>(self, step: impl FnOnce(&T) -> crate::Result<TranslationResult<U>>) -> crate::Result<TranslationResult<U>> {
        let next = step(&self.output)?;
        Ok(TranslationResult {
            output: next.output,
            fresh: self.fresh.into_iter().chain(next.fresh).collect(),
            notes: self.notes.into_iter().chain(next.notes).collect(),
            min_universe: self.min_universe.max(next.min_universe),
        })
    }

    fn note(&mut self, rule: &'static str, path: impl Into<String>) {
        self.notes.push(Note { rule, path: path.into() });
    }

    fn fresh(&mut self, name: &str, kind: SymbolKind, arity: usize) {
        self.fresh.push(FreshSymbol {
            name: name.to_string(),
            kind,
            arity,
        });
    }
}

fn child(path: &str, i: usize) -> String {
    if path.is_empty() {
        i.to_string()
    } else {
        format!("{path}.{i}")
    }
}

#[cfg(test)]
mod tests;
