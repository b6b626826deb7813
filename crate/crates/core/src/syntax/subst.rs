//! Capture-avoiding substitution and the rewrites built on it.

use std::collections::{BTreeMap, BTreeSet};

use super::{is_relation_name, Atom, Formula, Fresh, Literal, Term};
use crate::error::{Error, Result};

fn subst_term(t: &Term, map: &BTreeMap<String, Term>) -> Term {
    match t {
        Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| t.clone()),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| subst_term(a, map)).collect()),
    }
}

fn subst_terms(ts: &[Term], map: &BTreeMap<String, Term>) -> Vec<Term> {
    ts.iter().map(|t| subst_term(t, map)).collect()
}

fn subst_atom(a: &Atom, map: &BTreeMap<String, Term>) -> Atom {
    match a {
        Atom::Rel(r, ts) => Atom::Rel(r.clone(), subst_terms(ts, map)),
        Atom::Eq(x, y) => Atom::Eq(subst_term(x, map), subst_term(y, map)),
        Atom::Top => Atom::Top,
        Atom::Bot => Atom::Bot,
    }
}

/// Simultaneously replaces free occurrences of variables by terms, renaming
/// bound variables that would capture a variable of a replacement term.
pub fn substitute_vars(phi: &Formula, map: &BTreeMap<String, Term>) -> Formula {
    let mut fresh = Fresh::avoiding(phi);
    for t in map.values() {
        t.vars().into_iter().for_each(|v| fresh.reserve(v));
    }
    subst_rec(phi, map, &mut fresh)
}

fn subst_rec(phi: &Formula, map: &BTreeMap<String, Term>, fresh: &mut Fresh) -> Formula {
    if map.is_empty() {
        return phi.clone();
    }
    match phi {
        Formula::Lit(l) => Formula::Lit(Literal {
            negated: l.negated,
            atom: subst_atom(&l.atom, map),
        }),
        Formula::Dep(ts) => Formula::Dep(subst_terms(ts, map)),
        Formula::NegDep(ts) => Formula::NegDep(subst_terms(ts, map)),
        Formula::Indep { left, cond, right } => Formula::Indep {
            left: subst_terms(left, map),
            cond: subst_terms(cond, map),
            right: subst_terms(right, map),
        },
        Formula::And(a, b) => Formula::and(subst_rec(a, map, fresh), subst_rec(b, map, fresh)),
        Formula::Or(a, b) => Formula::or(subst_rec(a, map, fresh), subst_rec(b, map, fresh)),
        Formula::Exists(v, body) | Formula::Forall(v, body) => {
            let (vars, body) = bind(std::slice::from_ref(v), body, map, fresh);
            let v = vars.into_iter().next().expect("one variable");
            if matches!(phi, Formula::Exists(..)) {
                Formula::exists(v, body)
            } else {
                Formula::forall(v, body)
            }
        }
        Formula::Gq { quant, vars, body } => {
            let (vars, body) = bind(vars, body, map, fresh);
            Formula::gq(quant.clone(), vars, body)
        }
        Formula::ExistsFn { name, arity, body } => {
            Formula::exists_fn(name.clone(), *arity, subst_rec(body, map, fresh))
        }
        Formula::ExistsRel { name, arity, body } => {
            Formula::exists_rel(name.clone(), *arity, subst_rec(body, map, fresh))
        }
    }
}

/// Pushes a substitution under a binder of `vars`.
fn bind(
    vars: &[String],
    body: &Formula,
    map: &BTreeMap<String, Term>,
    fresh: &mut Fresh,
) -> (Vec<String>, Formula) {
    let mut inner: BTreeMap<String, Term> = map
        .iter()
        .filter(|(k, _)| !vars.contains(k))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    let body_free = body.free_vars();
    inner.retain(|k, _| body_free.contains(k));
    let captured: BTreeSet<String> = inner.values().flat_map(Term::vars).collect();
    let mut new_vars = Vec::with_capacity(vars.len());
    for v in vars {
        if captured.contains(v) {
            let renamed = fresh.var();
            inner.insert(v.clone(), Term::Var(renamed.clone()));
            new_vars.push(renamed);
        } else {
            new_vars.push(v.clone());
        }
    }
    (new_vars, subst_rec(body, &inner, fresh))
}

fn map_terms_in_term(t: &Term, name: &str, f: &mut dyn FnMut(Vec<Term>) -> Term) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::App(g, args) => {
            let args: Vec<Term> = args.iter().map(|a| map_terms_in_term(a, name, f)).collect();
            if g == name {
                f(args)
            } else {
                Term::App(g.clone(), args)
            }
        }
    }
}

/// Replaces every application `name(t̄)` (innermost first) by `f(t̄′)`, where
/// `t̄′` are the already rewritten arguments. Stops at a binder of `name`.
/// The caller must ensure that variables introduced by `f` are not captured.
pub fn replace_function_terms(
    phi: &Formula,
    name: &str,
    f: &mut dyn FnMut(Vec<Term>) -> Term,
) -> Formula {
    let terms = |ts: &[Term], f: &mut dyn FnMut(Vec<Term>) -> Term| -> Vec<Term> {
        ts.iter().map(|t| map_terms_in_term(t, name, f)).collect()
    };
    match phi {
        Formula::Lit(l) => {
            let atom = match &l.atom {
                Atom::Rel(r, ts) => Atom::Rel(r.clone(), terms(ts, f)),
                Atom::Eq(a, b) => Atom::Eq(map_terms_in_term(a, name, f), map_terms_in_term(b, name, f)),
                other => other.clone(),
            };
            Formula::Lit(Literal {
                negated: l.negated,
                atom,
            })
        }
        Formula::Dep(ts) => Formula::Dep(terms(ts, f)),
        Formula::NegDep(ts) => Formula::NegDep(terms(ts, f)),
        Formula::Indep { left, cond, right } => Formula::Indep {
            left: terms(left, f),
            cond: terms(cond, f),
            right: terms(right, f),
        },
        Formula::And(a, b) => Formula::and(
            replace_function_terms(a, name, f),
            replace_function_terms(b, name, f),
        ),
        Formula::Or(a, b) => Formula::or(
            replace_function_terms(a, name, f),
            replace_function_terms(b, name, f),
        ),
        Formula::Exists(v, b) => Formula::exists(v.clone(), replace_function_terms(b, name, f)),
        Formula::Forall(v, b) => Formula::forall(v.clone(), replace_function_terms(b, name, f)),
        Formula::Gq { quant, vars, body } => Formula::gq(
            quant.clone(),
            vars.clone(),
            replace_function_terms(body, name, f),
        ),
        Formula::ExistsFn { name: g, .. } if g == name => phi.clone(),
        Formula::ExistsFn { name: g, arity, body } => {
            Formula::exists_fn(g.clone(), *arity, replace_function_terms(body, name, f))
        }
        Formula::ExistsRel { name: r, arity, body } => {
            Formula::exists_rel(r.clone(), *arity, replace_function_terms(body, name, f))
        }
    }
}

/// Replaces each positive atom `rel(t̄)` by `theta[params := t̄]`.
/// Negative occurrences of `rel` are rejected since the result would leave
/// negation normal form.
pub fn replace_atom(phi: &Formula, rel: &str, params: &[String], theta: &Formula) -> Result<Formula> {
    Ok(match phi {
        Formula::Lit(Literal {
            negated,
            atom: Atom::Rel(r, args),
        }) if r == rel => {
            if *negated {
                return Err(Error::NotNnf(format!(
                    "`{rel}` occurs negatively and cannot be replaced by a formula"
                )));
            }
            if args.len() != params.len() {
                return Err(Error::Arity {
                    symbol: rel.to_string(),
                    expected: params.len(),
                    found: args.len(),
                });
            }
            let map: BTreeMap<String, Term> = params.iter().cloned().zip(args.iter().cloned()).collect();
            substitute_vars(theta, &map)
        }
        Formula::Lit(_) | Formula::Dep(_) | Formula::NegDep(_) | Formula::Indep { .. } => phi.clone(),
        Formula::And(a, b) => Formula::and(
            replace_atom(a, rel, params, theta)?,
            replace_atom(b, rel, params, theta)?,
        ),
        Formula::Or(a, b) => Formula::or(
            replace_atom(a, rel, params, theta)?,
            replace_atom(b, rel, params, theta)?,
        ),
        Formula::Exists(v, body) | Formula::Forall(v, body) => {
            // a binder of phi must not capture a variable left free in theta
            let theta_free = residual_free(theta, params);
            let (v, body) = if theta_free.contains(v) {
                let mut fresh = Fresh::avoiding(phi);
                fresh.reserve_formula(theta);
                let nv = fresh.var();
                let map = BTreeMap::from([(v.clone(), Term::Var(nv.clone()))]);
                (nv, substitute_vars(body, &map))
            } else {
                (v.clone(), (**body).clone())
            };
            let body = replace_atom(&body, rel, params, theta)?;
            if matches!(phi, Formula::Exists(..)) {
                Formula::exists(v, body)
            } else {
                Formula::forall(v, body)
            }
        }
        Formula::Gq { quant, vars, body } => {
            let theta_free = residual_free(theta, params);
            let mut map = BTreeMap::new();
            let mut fresh = Fresh::avoiding(phi);
            fresh.reserve_formula(theta);
            let vars: Vec<String> = vars
                .iter()
                .map(|v| {
                    if theta_free.contains(v) {
                        let nv = fresh.var();
                        map.insert(v.clone(), Term::Var(nv.clone()));
                        nv
                    } else {
                        v.clone()
                    }
                })
                .collect();
            let body = substitute_vars(body, &map);
            Formula::gq(quant.clone(), vars, replace_atom(&body, rel, params, theta)?)
        }
        Formula::ExistsRel { name, .. } if name == rel => phi.clone(),
        Formula::ExistsRel { name, arity, body } => {
            Formula::exists_rel(name.clone(), *arity, replace_atom(body, rel, params, theta)?)
        }
        Formula::ExistsFn { name, arity, body } => {
            Formula::exists_fn(name.clone(), *arity, replace_atom(body, rel, params, theta)?)
        }
    })
}

fn residual_free(theta: &Formula, params: &[String]) -> BTreeSet<String> {
    let mut free = theta.free_vars();
    free.retain(|v| !params.contains(v));
    free
}

/// Replaces every subformula headed by the generalized quantifier `quant`.
pub fn replace_quantified(phi: &Formula, quant: &str, replacement: &Formula) -> Formula {
    let rec = |f: &Formula| replace_quantified(f, quant, replacement);
    match phi {
        Formula::Gq { quant: q, .. } if q == quant => replacement.clone(),
        Formula::Gq { quant: q, vars, body } => Formula::gq(q.clone(), vars.clone(), rec(body)),
        Formula::And(a, b) => Formula::and(rec(a), rec(b)),
        Formula::Or(a, b) => Formula::or(rec(a), rec(b)),
        Formula::Exists(v, b) => Formula::exists(v.clone(), rec(b)),
        Formula::Forall(v, b) => Formula::forall(v.clone(), rec(b)),
        Formula::ExistsFn { name, arity, body } => Formula::exists_fn(name.clone(), *arity, rec(body)),
        Formula::ExistsRel { name, arity, body } => Formula::exists_rel(name.clone(), *arity, rec(body)),
        atomic => atomic.clone(),
    }
}

/// Renames every bound variable and every second-order bound symbol to a
/// fresh name, so that no name is bound twice and none is both bound and free.
pub fn rename_bound_apart(phi: &Formula, fresh: &mut Fresh) -> Formula {
    rename_rec(phi, &BTreeMap::new(), &BTreeMap::new(), fresh)
}

fn rename_term(t: &Term, vars: &BTreeMap<String, String>, syms: &BTreeMap<String, String>) -> Term {
    match t {
        Term::Var(v) => Term::Var(vars.get(v).cloned().unwrap_or_else(|| v.clone())),
        Term::App(f, args) => Term::App(
            syms.get(f).cloned().unwrap_or_else(|| f.clone()),
            args.iter().map(|a| rename_term(a, vars, syms)).collect(),
        ),
    }
}

fn rename_rec(
    phi: &Formula,
    vars: &BTreeMap<String, String>,
    syms: &BTreeMap<String, String>,
    fresh: &mut Fresh,
) -> Formula {
    let ts = |ts: &[Term]| -> Vec<Term> { ts.iter().map(|t| rename_term(t, vars, syms)).collect() };
    match phi {
        Formula::Lit(l) => {
            let atom = match &l.atom {
                Atom::Rel(r, args) => Atom::Rel(syms.get(r).cloned().unwrap_or_else(|| r.clone()), ts(args)),
                Atom::Eq(a, b) => Atom::Eq(rename_term(a, vars, syms), rename_term(b, vars, syms)),
                other => other.clone(),
            };
            Formula::Lit(Literal {
                negated: l.negated,
                atom,
            })
        }
        Formula::Dep(t) => Formula::Dep(ts(t)),
        Formula::NegDep(t) => Formula::NegDep(ts(t)),
        Formula::Indep { left, cond, right } => Formula::Indep {
            left: ts(left),
            cond: ts(cond),
            right: ts(right),
        },
        Formula::And(a, b) => Formula::and(rename_rec(a, vars, syms, fresh), rename_rec(b, vars, syms, fresh)),
        Formula::Or(a, b) => Formula::or(rename_rec(a, vars, syms, fresh), rename_rec(b, vars, syms, fresh)),
        Formula::Exists(v, body) | Formula::Forall(v, body) => {
            let nv = fresh.var();
            let mut inner = vars.clone();
            inner.insert(v.clone(), nv.clone());
            let body = rename_rec(body, &inner, syms, fresh);
            if matches!(phi, Formula::Exists(..)) {
                Formula::exists(nv, body)
            } else {
                Formula::forall(nv, body)
            }
        }
        Formula::Gq { quant, vars: bound, body } => {
            let mut inner = vars.clone();
            let nvs: Vec<String> = bound
                .iter()
                .map(|v| {
                    let nv = fresh.var();
                    inner.insert(v.clone(), nv.clone());
                    nv
                })
                .collect();
            Formula::gq(quant.clone(), nvs, rename_rec(body, &inner, syms, fresh))
        }
        Formula::ExistsFn { name, arity, body } | Formula::ExistsRel { name, arity, body } => {
            let stem = if is_relation_name(name) { "R" } else { "f" };
            let nn = fresh.name(stem);
            let mut inner = syms.clone();
            inner.insert(name.clone(), nn.clone());
            let body = rename_rec(body, vars, &inner, fresh);
            if matches!(phi, Formula::ExistsFn { .. }) {
                Formula::exists_fn(nn, *arity, body)
            } else {
                Formula::exists_rel(nn, *arity, body)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, Dialect, ParseOptions};

    fn p(text: &str) -> Formula {
        parse_formula(text, &ParseOptions::new(Dialect::Eso).allow_reserved(true)).unwrap()
    }

    fn v(s: &str) -> Term {
        Term::var(s)
    }

    #[test]
    fn function_term_replaced_by_variable() {
        let f = p("P(f(x))");
        let out = replace_function_terms(&f, "f", &mut |_| v("y"));
        assert_eq!(out, p("P(y)"));
    }

    #[test]
    fn substitution_avoids_capture() {
        let f = p("E y. x=y");
        let map = BTreeMap::from([("x".to_string(), v("y"))]);
        let out = substitute_vars(&f, &map);
        match &out {
            Formula::Exists(b, body) => {
                assert_ne!(b, "y");
                assert_eq!(**body, Formula::eq(v("y"), Term::Var(b.clone())));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(out.free_vars(), BTreeSet::from(["y".to_string()]));
    }

    #[test]
    fn bound_occurrences_untouched() {
        let f = p("P(x) & A x. P(x)");
        let map = BTreeMap::from([("x".to_string(), v("z"))]);
        assert_eq!(substitute_vars(&f, &map), p("P(z) & A x. P(x)"));
    }

    #[test]
    fn atom_replacement_builds_elimination_body() {
        // ∃P(∃u P(u) ∧ ∀x(¬P(x) ∨ R(x))) with R(x) := S(x)
        let psi = p("ER P/1. (E u. P(u)) & A x. ~P(x) | R(x)");
        let theta = p("S(x)");
        let out = replace_atom(&psi, "R", &["x".into()], &theta).unwrap();
        assert_eq!(out, p("ER P/1. (E u. P(u)) & A x. ~P(x) | S(x)"));
    }

    #[test]
    fn atom_replacement_rejects_negative_occurrence() {
        let psi = p("~R(x)");
        assert!(replace_atom(&psi, "R", &["x".into()], &p("S(x)")).is_err());
        assert!(matches!(
            replace_atom(&p("R(x,y)"), "R", &["x".into()], &p("S(x)")),
            Err(Error::Arity { .. })
        ));
    }

    #[test]
    fn atom_replacement_renames_capturing_binder() {
        // theta mentions y free; the binder E y must be renamed
        let psi = p("E y. R(y)");
        let theta = p("T(x, y)");
        let out = replace_atom(&psi, "R", &["x".into()], &theta).unwrap();
        assert_eq!(out.free_vars(), BTreeSet::from(["y".to_string()]));
    }

    #[test]
    fn quantified_subformulas_replaced() {
        let f = p("P(x) | [most y] P(y)");
        assert_eq!(replace_quantified(&f, "most", &Formula::bot()), p("P(x) | bot"));
    }

    #[test]
    fn renaming_apart() {
        let f = p("(E x. P(x)) & (E x. ~P(x)) & ER R/1. R(y)");
        let mut fresh = Fresh::avoiding(&f);
        let g = rename_bound_apart(&f, &mut fresh);
        assert_eq!(g.free_vars(), f.free_vars());
        let mut binders = Vec::new();
        g.visit(&mut |h| {
            if let Formula::Exists(v, _) = h {
                binders.push(v.clone())
            }
        });
        assert_eq!(binders.len(), 2);
        assert_ne!(binders[0], binders[1]);
    }
}
