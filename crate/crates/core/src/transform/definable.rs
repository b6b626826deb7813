use crate::error::{Error, Result};
use crate::eval::{EsoEvaluator, EvalConfig, Interpretation};
use crate::model::{Assignment, Relation, Structure};
use crate::quantifiers::{cells, QuantifierRegistry};
use crate::syntax::{rename_bound_apart, Atom, Formula, Fresh, Literal, Term};

use super::{SymbolKind, TranslationResult};

/// The single free relation symbol of a defining sentence, with its arity.
fn defined_relation(delta: &Formula) -> Result<(String, usize)> {
    if !delta.is_sentence() {
        return Err(Error::Precondition("the definition must be a sentence".into()));
    }
    let (rels, funs) = delta.free_symbols();
    if rels.len() != 1 || !funs.is_empty() {
        return Err(Error::Precondition(
            "the definition must mention exactly one free symbol, a relation".into(),
        ));
    }
    Ok(rels.into_iter().next().expect("one relation"))
}

/// Replaces every subformula `[quant x̄] θ` by `∃P(δ(P) ∧ ∀x̄(¬P(x̄) ∨ θ))`,
/// where the sentence `δ(R)` defines `quant` in terms of its one free
/// relation `R`. Since `quant` is monotone, some `P ⊆ θ` satisfies `δ` exactly
/// when `θ` itself does.
///
/// The definition is trusted; [`check_definition`] tests it on given
/// universe sizes.
pub fn eliminate_definable_q(
    phi: &Formula,
    quant: &str,
    delta: &Formula,
    reg: &QuantifierRegistry,
) -> Result<TranslationResult<Formula>> {
    let (r, arity) = defined_relation(delta)?;
    let q = reg.resolve(quant)?;
    if q.arity() != arity {
        return Err(Error::Arity {
            symbol: quant.to_string(),
            expected: q.arity(),
            found: arity,
        });
    }
    let mut fresh = Fresh::avoiding(phi);
    fresh.reserve_formula(delta);
    let mut result = TranslationResult::new(());
    let out = eliminate(phi, quant, delta, &r, &mut fresh, &mut result, String::new())?;
    Ok(result.map(|()| out))
}

fn eliminate(
    phi: &Formula,
    quant: &str,
    delta: &Formula,
    r: &str,
    fresh: &mut Fresh,
    result: &mut TranslationResult<()>,
    path: String,
) -> Result<Formula> {
    let rec = |f: &Formula, i: usize, fresh: &mut Fresh, result: &mut TranslationResult<()>| {
        eliminate(f, quant, delta, r, fresh, result, super::child(&path, i))
    };
    Ok(match phi {
        Formula::Gq { quant: q, vars, body } => {
            let body = rec(body, 0, fresh, result)?;
            if q != quant {
                return Ok(Formula::gq(q.clone(), vars.clone(), body));
            }
            if vars.len() != delta_arity(delta, r) {
                return Err(Error::Arity {
                    symbol: quant.to_string(),
                    expected: delta_arity(delta, r),
                    found: vars.len(),
                });
            }
            let p = fresh.name("P");
            result.fresh(&p, SymbolKind::Relation, vars.len());
            result.note("eliminate-quantifier", path);
            let defined = rename_relation(&rename_bound_apart(delta, fresh), r, &p);
            let inside = Formula::forall_all(
                vars,
                Formula::or(Formula::not_rel(&p, vars.iter().map(Term::var).collect()), body),
            );
            Formula::exists_rel(p, vars.len(), Formula::and(defined, inside))
        }
        Formula::And(a, b) => Formula::and(rec(a, 0, fresh, result)?, rec(b, 1, fresh, result)?),
        Formula::Or(a, b) => Formula::or(rec(a, 0, fresh, result)?, rec(b, 1, fresh, result)?),
        Formula::Exists(v, b) => Formula::exists(v.clone(), rec(b, 0, fresh, result)?),
        Formula::Forall(v, b) => Formula::forall(v.clone(), rec(b, 0, fresh, result)?),
        Formula::ExistsFn { name, arity, body } => Formula::exists_fn(name.clone(), *arity, rec(body, 0, fresh, result)?),
        Formula::ExistsRel { name, arity, body } => {
            Formula::exists_rel(name.clone(), *arity, rec(body, 0, fresh, result)?)
        }
        atomic => atomic.clone(),
    })
}

fn delta_arity(delta: &Formula, r: &str) -> usize {
    delta.free_relations().get(r).copied().unwrap_or(0)
}

/// Renames free occurrences of a relation symbol.
fn rename_relation(phi: &Formula, from: &str, to: &str) -> Formula {
    let rec = |f: &Formula| rename_relation(f, from, to);
    match phi {
        Formula::Lit(Literal {
            negated,
            atom: Atom::Rel(r, args),
        }) if r == from => Formula::Lit(Literal {
            negated: *negated,
            atom: Atom::Rel(to.to_string(), args.clone()),
        }),
        Formula::And(a, b) => Formula::and(rec(a), rec(b)),
        Formula::Or(a, b) => Formula::or(rec(a), rec(b)),
        Formula::Exists(v, b) => Formula::exists(v.clone(), rec(b)),
        Formula::Forall(v, b) => Formula::forall(v.clone(), rec(b)),
        Formula::Gq { quant, vars, body } => Formula::gq(quant.clone(), vars.clone(), rec(body)),
        Formula::ExistsFn { name, arity, body } => Formula::exists_fn(name.clone(), *arity, rec(body)),
        Formula::ExistsRel { name, .. } if name == from => phi.clone(),
        Formula::ExistsRel { name, arity, body } => Formula::exists_rel(name.clone(), *arity, rec(body)),
        other => other.clone(),
    }
}

/// Compares a defining sentence with the quantifier's oracle on every subset
/// of `M^k` for each given size. Returns the first disagreement as a size and
/// a subset mask.
pub fn check_definition(
    quant: &str,
    delta: &Formula,
    sizes: &[usize],
    reg: &QuantifierRegistry,
    cfg: &EvalConfig,
) -> Result<Option<(usize, u64)>> {
    let (r, arity) = defined_relation(delta)?;
    let q = reg.resolve(quant)?;
    for &n in sizes {
        let m = Structure::new(n)?;
        let total = cells(n, arity)?;
        if total > 20 {
            return Err(Error::cap("subsets to check", 1u128 << total, 1 << 20));
        }
        let mut ev = EsoEvaluator::new(
            &m,
            delta,
            &Interpretation::new().relation(r.clone(), Relation::empty(n, arity)?),
            reg,
            cfg,
        )?;
        for mask in 0..1u64 << total {
            ev.set_relation(&r, &Relation::from_mask(n, arity, mask)?)?;
            if ev.eval(&Assignment::empty())? != q.accepts(n, mask)? {
                return Ok(Some((n, mask)));
            }
        }
    }
    Ok(None)
}
