use crate::error::Result;
use crate::quantifiers::QuantifierRegistry;
use crate::syntax::{replace_function_terms, replace_quantified, Formula, Fresh, NormalFormSentence, PrefixEntry, Term};

use super::{flat_tuples, flatten_functions, to_normal_form, SymbolKind, TranslationResult};

/// `Q′₁x̄₁…Q′ₘx̄ₘ ∃y₁…∃yₙ (dep(x̄¹,y₁) ∧ … ∧ dep(x̄ⁿ,yₙ) ∧ θ)` for a flat normal
/// form, where `θ` is the matrix with each `fᵢ(x̄ⁱ)` replaced by `yᵢ`.
///
/// The output is equivalent to the input on universes where every
/// quantifier of the prefix accepts the full set and rejects the empty one.
pub fn eso_to_dq(nf: &NormalFormSentence) -> Result<TranslationResult<Formula>> {
    let tuples = flat_tuples(nf)?;
    let mut result = TranslationResult::new(());
    let mut fresh = Fresh::avoiding(&nf.to_formula());
    let mut theta = nf.matrix.clone();
    let mut deps = Vec::new();
    let mut ys = Vec::new();
    for (f, _) in &nf.functions {
        let Some(xs) = tuples.get(f) else { continue };
        let y = fresh.name("y");
        theta = replace_function_terms(&theta, f, &mut |_| Term::var(&y));
        deps.push(Formula::Dep(xs.iter().map(Term::var).chain([Term::var(&y)]).collect()));
        result.fresh(&y, SymbolKind::Variable, 0);
        result.note("function-to-dependence", format!("function {f}"));
        ys.push(y);
    }
    let body = Formula::exists_all(&ys, Formula::and_all(deps.into_iter().chain([theta])));
    let out = nf.prefix.iter().rev().fold(body, |acc, e| match e {
        PrefixEntry::Forall(v) => Formula::forall(v.clone(), acc),
        PrefixEntry::Gq { quant, vars } => Formula::gq(quant.clone(), vars.clone(), acc),
    });
    Ok(result.map(|()| out))
}

/// The D(Q) sentence for an ESO(Q) sentence through normal form and
/// flattening.
fn sentence_to_dq(phi: &Formula) -> Result<TranslationResult<Formula>> {
    to_normal_form(phi)?.then(flatten_functions)?.then(eso_to_dq)
}

/// `(Qx̄⊤ ∧ φ*) ∨ φ₀*`, where `φ*` translates `φ` and `φ₀*` translates `φ` with
/// every `quant`-headed subformula replaced by `⊥`.
///
/// This stays equivalent to `φ` on universes where `quant` accepts nothing,
/// provided it never accepts the empty set.
pub fn eso_to_dq_total(phi: &Formula, quant: &str, reg: &QuantifierRegistry) -> Result<TranslationResult<Formula>> {
    let q = reg.resolve(quant)?;
    if !phi.quantifiers().contains(quant) {
        // φ₀ = φ, so the guard is redundant
        return sentence_to_dq(phi);
    }
    let star = sentence_to_dq(phi)?;
    let zero_src = replace_quantified(phi, quant, &Formula::bot());
    let zero = sentence_to_dq(&zero_src)?;

    let mut fresh = Fresh::avoiding(&Formula::and(star.output.clone(), zero.output.clone()));
    let xs = fresh.names("x", q.arity());
    let guard = Formula::gq(quant, xs.clone(), Formula::top());
    let out = Formula::or(Formula::and(guard, star.output), zero.output);

    let mut result = TranslationResult::new(out);
    result.fresh = star.fresh.into_iter().chain(zero.fresh).collect();
    for x in &xs {
        result.fresh(x, SymbolKind::Variable, 0);
    }
    result.notes = star.notes;
    result.note("replace-by-bottom", format!("every [{quant}] subformula"));
    result.notes.extend(zero.notes);
    result.note("small-trick", "");
    result.min_universe = star.min_universe.max(zero.min_universe);
    // both halves are closed and translated separately, so they may reuse
    // bound names
    let mut seen = std::collections::BTreeSet::new();
    result.fresh.retain(|s| seen.insert(s.name.clone()));
    Ok(result)
}
