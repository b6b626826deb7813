use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::syntax::{Atom, Formula, Fresh, Literal, NormalFormSentence, PrefixEntry, Term};

use super::normal_form::map_literals;
use super::{SymbolKind, TranslationResult};

/// Rewrites a normal form so that every quantified function symbol occurs
/// with a single tuple of pairwise distinct variables.
///
/// Arguments that are not variables, or repeat a variable, are replaced by
/// fresh universally quantified variables under a disequality guard
/// `u ≠ t ∨ ψ[u]`. A symbol used with several tuples keeps its first tuple;
/// each further tuple gets a fresh clone `g`, tied to the original by the
/// conjunct `w̄ ≠ x̄ ∨ g(w̄) = f(x̄)`. The tuples of such a symbol must consist
/// of universally quantified variables and the clone's tuple must be disjoint
/// from the original's, otherwise the conjunct would not force `g = f`; tuples
/// that fail this are first guarded onto fresh variables. Fresh variables are
/// appended to the end of the prefix.
pub fn flatten_functions(nf: &NormalFormSentence) -> Result<TranslationResult<NormalFormSentence>> {
    nf.validate()?;
    let mut result = TranslationResult::new(());
    let mut fresh = Fresh::avoiding(&nf.to_formula());
    let quantified: BTreeSet<String> = nf.functions.iter().map(|(f, _)| f.clone()).collect();
    let mut functions = nf.functions.clone();
    let mut prefix = nf.prefix.clone();
    let mut matrix = nf.matrix.clone();

    // bad arguments, outermost occurrence first
    while let Some((term, bad)) = applications(&matrix, &quantified)
        .into_iter()
        .find_map(|t| bad_positions(&t).map(|b| (t, b)))
    {
        let Term::App(f, args) = &term else { unreachable!() };
        let mut new_args = args.clone();
        let mut guards = Vec::new();
        for j in bad {
            let u = fresh.var();
            guards.push(Formula::neq(Term::var(&u), args[j].clone()));
            new_args[j] = Term::var(&u);
            prefix.push(PrefixEntry::Forall(u.clone()));
            result.fresh(&u, SymbolKind::Variable, 0);
        }
        let replaced = replace_term(&matrix, &term, &Term::app(f.clone(), new_args));
        matrix = Formula::or(Formula::or_all(guards), replaced);
        result.note("guard-argument", "matrix");
    }

    // several tuples for one symbol
    for (f, _) in nf.functions.clone() {
        let tuples = tuples_of(&matrix, &f);
        if tuples.len() < 2 {
            continue;
        }
        let universal: BTreeSet<String> = prefix
            .iter()
            .filter_map(|e| match e {
                PrefixEntry::Forall(v) => Some(v.clone()),
                PrefixEntry::Gq { .. } => None,
            })
            .collect();
        let mut canonical = tuples[0].clone();
        if !canonical.iter().all(|v| universal.contains(v)) {
            let target = fresh_tuple(&mut fresh, canonical.len(), &mut prefix, &mut result);
            matrix = guard_tuple(&matrix, &f, &canonical, &f, &target);
            canonical = target;
            result.note("guard-tuple", "matrix");
        }
        for v in &tuples[1..] {
            let g = fresh.name("g");
            let w = if v.iter().all(|x| universal.contains(x) && !canonical.contains(x)) {
                matrix = replace_term(&matrix, &app(&f, v), &app(&g, v));
                v.clone()
            } else {
                let target = fresh_tuple(&mut fresh, v.len(), &mut prefix, &mut result);
                matrix = guard_tuple(&matrix, &f, v, &g, &target);
                result.note("guard-tuple", "matrix");
                target
            };
            let tie = Formula::or(
                Formula::or_all(differ(&w, &canonical)),
                Formula::eq(app(&g, &w), app(&f, &canonical)),
            );
            matrix = Formula::and(matrix, tie);
            functions.push((g.clone(), w.len()));
            result.fresh(&g, SymbolKind::Function, w.len());
            result.note("clone", "matrix");
        }
    }

    let used: BTreeSet<String> = applications(&matrix, &functions.iter().map(|(f, _)| f.clone()).collect())
        .into_iter()
        .filter_map(|t| match t {
            Term::App(f, _) => Some(f),
            Term::Var(_) => None,
        })
        .collect();
    let before = functions.len();
    functions.retain(|(f, _)| used.contains(f));
    if functions.len() < before {
        result.note("drop-unused", "functions");
    }
    let out = NormalFormSentence::new(functions, prefix, matrix)?;
    check_flat(&out)?;
    Ok(result.map(|()| out))
}

/// Checks the postcondition of [`flatten_functions`].
pub fn check_flat(nf: &NormalFormSentence) -> Result<()> {
    flat_tuples(nf).map(|_| ())
}

/// The variable tuple of each quantified function symbol of a flat normal
/// form. Symbols that do not occur are absent.
pub fn flat_tuples(nf: &NormalFormSentence) -> Result<BTreeMap<String, Vec<String>>> {
    nf.validate()?;
    let mut out = BTreeMap::new();
    for (f, _) in &nf.functions {
        let tuples = tuples_of(&nf.matrix, f);
        let bad = applications(&nf.matrix, &BTreeSet::from([f.clone()]))
            .iter()
            .any(|t| bad_positions(t).is_some());
        if bad || tuples.len() > 1 {
            return Err(Error::Precondition(format!(
                "`{f}` is not applied to one tuple of distinct variables"
            )));
        }
        if let Some(t) = tuples.into_iter().next() {
            out.insert(f.clone(), t);
        }
    }
    Ok(out)
}

fn app(f: &str, vars: &[String]) -> Term {
    Term::app(f, vars.iter().map(Term::var).collect())
}

fn differ(a: &[String], b: &[String]) -> Vec<Formula> {
    a.iter()
        .zip(b)
        .map(|(x, y)| Formula::neq(Term::var(x), Term::var(y)))
        .collect()
}

fn fresh_tuple(
    fresh: &mut Fresh,
    len: usize,
    prefix: &mut Vec<PrefixEntry>,
    result: &mut TranslationResult<()>,
) -> Vec<String> {
    let vars: Vec<String> = (0..len).map(|_| fresh.var()).collect();
    for u in &vars {
        prefix.push(PrefixEntry::Forall(u.clone()));
        result.fresh(u, SymbolKind::Variable, 0);
    }
    vars
}

/// `target ≠ from ∨ matrix[f(from) := g(target)]`.
fn guard_tuple(matrix: &Formula, f: &str, from: &[String], g: &str, target: &[String]) -> Formula {
    let replaced = replace_term(matrix, &app(f, from), &app(g, target));
    Formula::or(Formula::or_all(differ(target, from)), replaced)
}

/// Positions of arguments that are not variables or repeat a variable, when
/// there are any.
fn bad_positions(t: &Term) -> Option<Vec<usize>> {
    let Term::App(_, args) = t else { return None };
    let mut seen = BTreeSet::new();
    let bad: Vec<usize> = args
        .iter()
        .enumerate()
        .filter(|(_, a)| match a {
            Term::Var(v) => !seen.insert(v.clone()),
            Term::App(..) => true,
        })
        .map(|(j, _)| j)
        .collect();
    (!bad.is_empty()).then_some(bad)
}

/// Distinct variable tuples `f` is applied to, in order of first occurrence.
fn tuples_of(matrix: &Formula, f: &str) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = Vec::new();
    for t in applications(matrix, &BTreeSet::from([f.to_string()])) {
        let Term::App(_, args) = t else { continue };
        if let Some(vars) = args.iter().map(|a| a.as_var().map(str::to_string)).collect::<Option<Vec<_>>>() {
            if !out.contains(&vars) {
                out.push(vars);
            }
        }
    }
    out
}

/// Applications of the given symbols, outer before inner, left to right.
fn applications(phi: &Formula, names: &BTreeSet<String>) -> Vec<Term> {
    fn walk(t: &Term, names: &BTreeSet<String>, out: &mut Vec<Term>) {
        if let Term::App(f, args) = t {
            if names.contains(f) {
                out.push(t.clone());
            }
            args.iter().for_each(|a| walk(a, names, out));
        }
    }
    let mut out = Vec::new();
    let mut visit = |l: &Literal| -> Formula {
        match &l.atom {
            Atom::Rel(_, ts) => ts.iter().for_each(|t| walk(t, names, &mut out)),
            Atom::Eq(a, b) => {
                walk(a, names, &mut out);
                walk(b, names, &mut out);
            }
            Atom::Top | Atom::Bot => {}
        }
        Formula::Lit(l.clone())
    };
    map_literals(phi, &mut visit);
    out
}

/// Replaces every occurrence of the term `from`, also inside other terms.
fn replace_term(phi: &Formula, from: &Term, to: &Term) -> Formula {
    fn rec(t: &Term, from: &Term, to: &Term) -> Term {
        if t == from {
            return to.clone();
        }
        match t {
            Term::Var(_) => t.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| rec(a, from, to)).collect()),
        }
    }
    map_literals(phi, &mut |l| {
        let atom = match &l.atom {
            Atom::Rel(r, ts) => Atom::Rel(r.clone(), ts.iter().map(|t| rec(t, from, to)).collect()),
            Atom::Eq(a, b) => Atom::Eq(rec(a, from, to), rec(b, from, to)),
            other => other.clone(),
        };
        Formula::Lit(Literal {
            negated: l.negated,
            atom,
        })
    })
}
