use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::syntax::{
    rename_bound_apart, replace_function_terms, substitute_vars, Atom, Formula, Fresh, Literal, NormalFormSentence,
    PrefixEntry, Term,
};

use super::{child, SymbolKind, TranslationResult};

enum Binder {
    Forall(String),
    Gq(String, Vec<String>),
    Exists(String),
    Function(String, usize),
    Relation(String, usize),
}

struct Pulled {
    binder: Binder,
    path: String,
    /// Whether the binder sat below a connective and was moved over it.
    moved: bool,
}

/// Brings an ESO(Q) sentence into the form `∃f̄ Q′₁x̄₁…Q′ₘx̄ₘ ψ` with every
/// `Q′ᵢ` a `∀` or a generalized quantifier and `ψ` quantifier-free.
///
/// Moving a generalized quantifier over a connective is only sound when the
/// quantifier accepts neither the empty set nor nothing at all on the universe
/// at hand. Every quantifier of the input is assumed to be monotone and
/// non-trivial in that sense.
pub fn to_normal_form(phi: &Formula) -> Result<TranslationResult<NormalFormSentence>> {
    if let Some(v) = phi.free_vars().into_iter().next() {
        return Err(Error::Precondition(format!("normal form needs a sentence, `{v}` is free")));
    }
    let mut result = TranslationResult::new(());
    let mut fresh = Fresh::avoiding(phi);
    let renamed = rename_bound_apart(phi, &mut fresh);
    if renamed != *phi {
        result.note("rename-apart", "");
    }

    let mut pulled = Vec::new();
    let mut matrix = prenex(&renamed, String::new(), false, &mut pulled)?;

    let mut prefix: Vec<PrefixEntry> = Vec::new();
    let mut functions: Vec<(String, usize)> = Vec::new();
    for Pulled { binder, path, moved } in pulled {
        let scope: Vec<Term> = prefix.iter().flat_map(PrefixEntry::vars).map(Term::Var).collect();
        match binder {
            Binder::Forall(v) => {
                if moved {
                    result.note("prenex-forall", path);
                }
                prefix.push(PrefixEntry::Forall(v));
            }
            Binder::Gq(quant, vars) => {
                if moved {
                    result.note("prenex-gq", path);
                }
                prefix.push(PrefixEntry::Gq { quant, vars });
            }
            Binder::Exists(y) => {
                let f = fresh.name("f");
                let map = BTreeMap::from([(y, Term::app(f.clone(), scope.clone()))]);
                matrix = substitute_vars(&matrix, &map);
                functions.push((f, scope.len()));
                result.note("skolemize", path);
            }
            Binder::Function(f, k) if scope.is_empty() => functions.push((f, k)),
            Binder::Function(f, k) => {
                let g = fresh.name("g");
                matrix = replace_function_terms(&matrix, &f, &mut |args| {
                    Term::app(g.clone(), scope.iter().cloned().chain(args).collect())
                });
                functions.push((g, scope.len() + k));
                result.note("pull-through", path);
            }
            Binder::Relation(r, k) => {
                let f1 = fresh.name("f");
                let f2 = fresh.name("f");
                matrix = map_literals(&matrix, &mut |lit| match &lit.atom {
                    Atom::Rel(name, args) if *name == r => {
                        let full: Vec<Term> = scope.iter().chain(args).cloned().collect();
                        let a = Term::app(f1.clone(), full.clone());
                        let b = Term::app(f2.clone(), full);
                        if lit.negated {
                            Formula::neq(a, b)
                        } else {
                            Formula::eq(a, b)
                        }
                    }
                    _ => Formula::Lit(lit.clone()),
                });
                functions.push((f1, scope.len() + k));
                functions.push((f2, scope.len() + k));
                result.min_universe = 2;
                result.note("relation-to-functions", path);
            }
        }
    }
    for (f, k) in &functions {
        result.fresh(f, SymbolKind::Function, *k);
    }
    for v in prefix.iter().flat_map(PrefixEntry::vars) {
        result.fresh(&v, SymbolKind::Variable, 0);
    }
    let nf = NormalFormSentence::new(functions, prefix, matrix)?;
    Ok(result.map(|()| nf))
}

/// Pulls every binder of a renamed-apart formula to the front, in the order
/// of a left-to-right traversal, and returns the quantifier-free rest.
fn prenex(phi: &Formula, path: String, under: bool, out: &mut Vec<Pulled>) -> Result<Formula> {
    let mut push = |binder, path: &String| {
        out.push(Pulled {
            binder,
            path: path.clone(),
            moved: under,
        })
    };
    match phi {
        Formula::Lit(_) => Ok(phi.clone()),
        Formula::Dep(_) | Formula::NegDep(_) | Formula::Indep { .. } => Err(Error::Dialect {
            dialect: "ESO(Q)",
            construct: "team atom".into(),
        }),
        Formula::And(a, b) | Formula::Or(a, b) => {
            let l = prenex(a, child(&path, 0), true, out)?;
            let r = prenex(b, child(&path, 1), true, out)?;
            Ok(if matches!(phi, Formula::And(..)) {
                Formula::and(l, r)
            } else {
                Formula::or(l, r)
            })
        }
        Formula::Exists(v, body) => {
            push(Binder::Exists(v.clone()), &path);
            prenex(body, child(&path, 0), under, out)
        }
        Formula::Forall(v, body) => {
            push(Binder::Forall(v.clone()), &path);
            prenex(body, child(&path, 0), under, out)
        }
        Formula::Gq { quant, vars, body } => {
            push(Binder::Gq(quant.clone(), vars.clone()), &path);
            prenex(body, child(&path, 0), under, out)
        }
        Formula::ExistsFn { name, arity, body } => {
            push(Binder::Function(name.clone(), *arity), &path);
            prenex(body, child(&path, 0), under, out)
        }
        Formula::ExistsRel { name, arity, body } => {
            push(Binder::Relation(name.clone(), *arity), &path);
            prenex(body, child(&path, 0), under, out)
        }
    }
}

/// Rewrites every literal of a quantifier-free formula.
pub(super) fn map_literals(phi: &Formula, f: &mut dyn FnMut(&Literal) -> Formula) -> Formula {
    match phi {
        Formula::Lit(l) => f(l),
        Formula::And(a, b) => Formula::and(map_literals(a, f), map_literals(b, f)),
        Formula::Or(a, b) => Formula::or(map_literals(a, f), map_literals(b, f)),
        other => other.clone(),
    }
}
