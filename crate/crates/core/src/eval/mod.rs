//! Model checkers: team semantics for D(Q)/I(Q), Tarskian semantics for
//! FO(Q), and exhaustive witness search for ESO(Q).

mod compile;
mod eso;
mod fo;
mod team;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{Assignment, Function, Relation, Structure, Team};
use crate::quantifiers::QuantifierRegistry;
use crate::syntax::{Dialect, Formula};

pub use eso::EsoEvaluator;
pub use team::TeamEvaluator;

/// How the disjunction clause splits a team.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OrMode {
    /// `X = Y ∪ Z`, the parts may overlap.
    #[default]
    Paper,
    /// `X = Y ∪ Z` with `Y ∩ Z = ∅`.
    Strict,
}

/// How the existential clause extends a team.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExistsMode {
    /// A single value per assignment, `f: X → M`.
    #[default]
    Paper,
    /// A nonempty set of values per assignment.
    Lax,
}

/// Which candidate sets the generalized-quantifier clause ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GqSearch {
    /// Every member of `Q_M`.
    #[default]
    Full,
    /// Only the ⊆-minimal members; sound for downward-closed bodies.
    Minimal,
}

#[derive(Debug, Clone)]
pub struct EvalConfig {
    pub or_mode: OrMode,
    pub exists_mode: ExistsMode,
    pub gq_search: GqSearch,
    pub max_universe: usize,
    pub max_team: usize,
    /// Bound on the number of candidates any single search may range over.
    pub max_witness: u128,
    pub memo: bool,
    /// Permits quantifiers that fail the monotonicity check.
    pub allow_non_monotone: bool,
    /// Prunes searches by testing partial teams. Only sound for downward
    /// closed formulas, so it is refused for formulas with independence atoms.
    pub downward_pruning: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            or_mode: OrMode::Paper,
            exists_mode: ExistsMode::Paper,
            gq_search: GqSearch::Full,
            max_universe: 4,
            max_team: 16,
            max_witness: 100_000_000,
            memo: true,
            allow_non_monotone: false,
            downward_pruning: false,
        }
    }
}

impl EvalConfig {
    pub fn with_or_mode(mut self, mode: OrMode) -> Self {
        self.or_mode = mode;
        self
    }

    pub fn with_exists_mode(mut self, mode: ExistsMode) -> Self {
        self.exists_mode = mode;
        self
    }

    pub fn with_gq_search(mut self, mode: GqSearch) -> Self {
        self.gq_search = mode;
        self
    }

    pub fn with_pruning(mut self, yes: bool) -> Self {
        self.downward_pruning = yes;
        self
    }

    pub fn with_max_universe(mut self, n: usize) -> Self {
        self.max_universe = n;
        self
    }

    fn check_universe(&self, m: &Structure) -> Result<()> {
        if m.size() > self.max_universe {
            return Err(Error::cap("universe size", m.size() as u128, self.max_universe as u128));
        }
        Ok(())
    }
}

/// Interpretations for free second-order symbols not in the structure.
#[derive(Debug, Clone, Default)]
pub struct Interpretation {
    pub relations: BTreeMap<String, Relation>,
    pub functions: BTreeMap<String, Function>,
}

impl Interpretation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn relation(mut self, name: impl Into<String>, rel: Relation) -> Self {
        self.relations.insert(name.into(), rel);
        self
    }

    pub fn function(mut self, name: impl Into<String>, f: Function) -> Self {
        self.functions.insert(name.into(), f);
        self
    }
}

/// `M, X ⊨ φ`.
pub fn eval_team(m: &Structure, x: &Team, phi: &Formula, reg: &QuantifierRegistry, cfg: &EvalConfig) -> Result<bool> {
    if x.is_empty() {
        // the empty team over a domain lacking free variables is still the
        // empty team once the domain is widened
        let mut vars = x.vars().to_vec();
        vars.extend(phi.free_vars().into_iter().filter(|v| x.slot(v).is_none()));
        let widened = Team::empty(vars);
        return TeamEvaluator::new(m, phi, widened.vars(), reg, cfg)?.eval(&widened);
    }
    TeamEvaluator::new(m, phi, x.vars(), reg, cfg)?.eval(x)
}

/// `M, {ε} ⊨ σ`.
pub fn eval_sentence(m: &Structure, sigma: &Formula, reg: &QuantifierRegistry, cfg: &EvalConfig) -> Result<bool> {
    if let Some(v) = sigma.free_vars().into_iter().next() {
        return Err(Error::Precondition(format!("`{v}` is free in a sentence")));
    }
    eval_team(m, &Team::unit(), sigma, reg, cfg)
}

/// `M, s ⊨ φ` for first-order φ with generalized quantifiers.
pub fn eval_fo(m: &Structure, s: &Assignment, phi: &Formula, reg: &QuantifierRegistry, cfg: &EvalConfig) -> Result<bool> {
    phi.check_dialect(Dialect::Fo)?;
    cfg.check_universe(m)?;
    let vars: Vec<String> = s.domain().map(str::to_string).collect();
    let compiled = compile::compile_team(m, phi, &vars, reg, cfg)?;
    let row = s
        .iter()
        .enumerate()
        .fold(0, |row, (j, (_, a))| crate::model::row_set(row, j, a));
    fo::FoEvaluator::new(m, &compiled).holds(&compiled.root, row)
}

/// Truth of an ESO(Q) formula; free variables are read from `s`.
pub fn eval_eso(
    m: &Structure,
    phi: &Formula,
    interp: &Interpretation,
    reg: &QuantifierRegistry,
    cfg: &EvalConfig,
) -> Result<bool> {
    EsoEvaluator::new(m, phi, interp, reg, cfg)?.eval(&Assignment::empty())
}

/// Whether team evaluation of a first-order φ agrees with evaluating it on
/// every assignment separately.
pub fn flatness_check(m: &Structure, x: &Team, phi: &Formula, reg: &QuantifierRegistry, cfg: &EvalConfig) -> Result<bool> {
    phi.check_dialect(Dialect::Fo)?;
    let team_side = eval_team(m, x, phi, reg, cfg)?;
    let mut pointwise = true;
    for s in x.assignments() {
        if !eval_fo(m, &s, phi, reg, cfg)? {
            pointwise = false;
            break;
        }
    }
    Ok(team_side == pointwise)
}

#[cfg(test)]
mod tests;
