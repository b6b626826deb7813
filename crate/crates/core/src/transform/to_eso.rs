use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::syntax::{is_relation_name, rename_bound_apart, Atom, Formula, Fresh, Term};

use super::{child, SymbolKind, TranslationResult};

/// Which fragment [`dq_to_eso`] translates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Flavor {
    /// For D(Q): the team relation only occurs negatively, relying on
    /// downward closure to read witnesses as upper bounds.
    #[default]
    DNegative,
    /// For I(Q): every intermediate team is defined exactly, and the team
    /// relation may also occur positively.
    IExact,
}

impl std::str::FromStr for Flavor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "d" | "d-negative" => Ok(Flavor::DNegative),
            "i" | "i-exact" => Ok(Flavor::IExact),
            other => Err(Error::Precondition(format!("unknown flavor `{other}`, expected d or i"))),
        }
    }
}

/// A sentence `ψ(R)` such that `M, X ⊨ φ` iff `(M, rel(X)) ⊨ ψ` for every team
/// `X` with domain `domain`, where `rel(X)` lists values in the order of
/// `domain`.
///
/// Disjunction is read with overlapping parts and existential
/// quantification with a single witness per assignment.
pub fn dq_to_eso(phi: &Formula, domain: &[String], rel: &str, flavor: Flavor) -> Result<TranslationResult<Formula>> {
    let dom_set: BTreeSet<&String> = domain.iter().collect();
    if dom_set.len() != domain.len() {
        return Err(Error::Precondition("team domain lists a variable twice".into()));
    }
    if let Some(v) = phi.free_vars().into_iter().find(|v| !dom_set.contains(v)) {
        return Err(Error::Precondition(format!("free variable `{v}` is not in the team domain")));
    }
    if !is_relation_name(rel) {
        return Err(Error::Precondition(format!("`{rel}` is not a relation name")));
    }
    if phi.all_symbols().contains(rel) {
        return Err(Error::Precondition(format!("`{rel}` already occurs in the formula")));
    }
    if flavor == Flavor::DNegative && phi.contains_indep() {
        return Err(Error::Dialect {
            dialect: "D(Q)",
            construct: "independence atom (use the exact flavor)".into(),
        });
    }
    let mut fresh = Fresh::avoiding(phi);
    domain.iter().for_each(|v| fresh.reserve(v.clone()));
    fresh.reserve(rel);
    let renamed = rename_bound_apart(phi, &mut fresh);
    let mut t = Translator {
        fresh,
        flavor,
        result: TranslationResult::new(()),
    };
    let out = t.tr(&renamed, rel, domain, String::new())?;
    Ok(t.result.map(|()| out))
}

/// Whether every occurrence of `rel` is a negated atom.
pub fn only_negative(phi: &Formula, rel: &str) -> bool {
    let mut ok = true;
    phi.visit(&mut |f| {
        if let Formula::Lit(l) = f {
            if matches!(&l.atom, Atom::Rel(r, _) if r == rel) && !l.negated {
                ok = false;
            }
        }
    });
    ok
}

struct Translator {
    fresh: Fresh,
    flavor: Flavor,
    result: TranslationResult<()>,
}

fn vars(vs: &[String]) -> Vec<Term> {
    vs.iter().map(Term::var).collect()
}

fn holds(rel: &str, vs: &[String]) -> Formula {
    Formula::rel(rel, vars(vs))
}

fn fails(rel: &str, vs: &[String]) -> Formula {
    Formula::not_rel(rel, vars(vs))
}

fn extend(dom: &[String], more: &[String]) -> Vec<String> {
    dom.iter().chain(more).cloned().collect()
}

impl Translator {
    fn copy(&mut self, dom: &[String]) -> (Vec<String>, BTreeMap<String, Term>) {
        let primed: Vec<String> = dom.iter().map(|_| self.fresh.var()).collect();
        let map = dom.iter().cloned().zip(primed.iter().map(Term::var)).collect();
        (primed, map)
    }

    fn relation(&mut self, stem: &str, arity: usize) -> String {
        let name = self.fresh.name(stem);
        self.result.fresh(&name, SymbolKind::Relation, arity);
        name
    }

    /// `∀dom (¬sub(dom) ∨ sup(dom))`.
    fn within(sub: &str, sup: &str, dom: &[String]) -> Formula {
        Formula::forall_all(dom, Formula::or(fails(sub, dom), holds(sup, dom)))
    }

    fn tr(&mut self, phi: &Formula, r: &str, dom: &[String], path: String) -> Result<Formula> {
        let exact = self.flavor == Flavor::IExact;
        Ok(match phi {
            Formula::Lit(_) => Formula::forall_all(dom, Formula::or(fails(r, dom), phi.clone())),
            Formula::Dep(ts) => {
                let (primed, map) = self.copy(dom);
                let (last, init) = ts.split_last().expect("dependence atoms have a term");
                let mut parts = vec![fails(r, dom), fails(r, &primed)];
                parts.extend(init.iter().map(|t| Formula::neq(t.clone(), substitute_term(t, &map))));
                parts.push(Formula::eq(last.clone(), substitute_term(last, &map)));
                Formula::forall_all(&extend(dom, &primed), Formula::or_all(parts))
            }
            Formula::NegDep(_) => Formula::forall_all(dom, fails(r, dom)),
            Formula::Indep { left, cond, right } => {
                let (p1, m1) = self.copy(dom);
                let (p2, m2) = self.copy(dom);
                let mut same = vec![holds(r, &p2)];
                same.extend(cond.iter().chain(left).map(|t| Formula::eq(substitute_term(t, &m2), t.clone())));
                same.extend(right.iter().map(|t| Formula::eq(substitute_term(t, &m2), substitute_term(t, &m1))));
                let mut parts = vec![fails(r, dom), fails(r, &p1)];
                parts.extend(cond.iter().map(|t| Formula::neq(t.clone(), substitute_term(t, &m1))));
                parts.push(Formula::exists_all(&p2, Formula::and_all(same)));
                Formula::forall_all(&extend(dom, &p1), Formula::or_all(parts))
            }
            Formula::And(a, b) => Formula::and(
                self.tr(a, r, dom, child(&path, 0))?,
                self.tr(b, r, dom, child(&path, 1))?,
            ),
            Formula::Or(a, b) => {
                let s = self.relation("S", dom.len());
                let t = self.relation("T", dom.len());
                let cover = Formula::forall_all(dom, Formula::or_all([fails(r, dom), holds(&s, dom), holds(&t, dom)]));
                let mut parts = vec![cover];
                if exact {
                    parts.push(Self::within(&s, r, dom));
                    parts.push(Self::within(&t, r, dom));
                }
                parts.push(self.tr(a, &s, dom, child(&path, 0))?);
                parts.push(self.tr(b, &t, dom, child(&path, 1))?);
                self.result.note("split-disjunction", path);
                Formula::exists_rel(s, dom.len(), Formula::exists_rel(t, dom.len(), Formula::and_all(parts)))
            }
            Formula::Exists(y, body) => {
                let inner = extend(dom, std::slice::from_ref(y));
                let s = self.relation("S", inner.len());
                let sub = self.tr(body, &s, &inner, child(&path, 0))?;
                self.result.note("extend-exists", path);
                if exact {
                    let f = self.fresh.name("f");
                    self.result.fresh(&f, SymbolKind::Function, dom.len());
                    let fx = Term::app(f.clone(), vars(dom));
                    let only = Formula::forall_all(
                        &inner,
                        Formula::or(
                            fails(&s, &inner),
                            Formula::and(holds(r, dom), Formula::eq(Term::var(y), fx.clone())),
                        ),
                    );
                    let mut chosen = vars(dom);
                    chosen.push(fx);
                    let all = Formula::forall_all(dom, Formula::or(fails(r, dom), Formula::rel(&s, chosen)));
                    Formula::exists_fn(
                        f,
                        dom.len(),
                        Formula::exists_rel(s, inner.len(), Formula::and_all([only, all, sub])),
                    )
                } else {
                    let some = Formula::forall_all(
                        dom,
                        Formula::or(fails(r, dom), Formula::exists(y.clone(), holds(&s, &inner))),
                    );
                    Formula::exists_rel(s, inner.len(), Formula::and(some, sub))
                }
            }
            Formula::Forall(y, body) => {
                let inner = extend(dom, std::slice::from_ref(y));
                let s = self.relation("S", inner.len());
                let sub = self.tr(body, &s, &inner, child(&path, 0))?;
                self.result.note("extend-forall", path);
                let every = Formula::forall_all(&inner, Formula::or(fails(r, dom), holds(&s, &inner)));
                let mut parts = vec![every];
                if exact {
                    parts.push(Formula::forall_all(&inner, Formula::or(fails(&s, &inner), holds(r, dom))));
                }
                parts.push(sub);
                Formula::exists_rel(s, inner.len(), Formula::and_all(parts))
            }
            Formula::Gq { quant, vars: ys, body } => {
                let inner = extend(dom, ys);
                let p = self.relation("P", inner.len());
                let sub = self.tr(body, &p, &inner, child(&path, 0))?;
                self.result.note("extend-gq", path);
                let large = Formula::forall_all(
                    dom,
                    Formula::or(fails(r, dom), Formula::gq(quant.clone(), ys.clone(), holds(&p, &inner))),
                );
                let mut parts = vec![large];
                if exact {
                    parts.push(Formula::forall_all(&inner, Formula::or(fails(&p, &inner), holds(r, dom))));
                }
                parts.push(sub);
                Formula::exists_rel(p, inner.len(), Formula::and_all(parts))
            }
            Formula::ExistsFn { .. } | Formula::ExistsRel { .. } => {
                return Err(Error::Dialect {
                    dialect: "team semantics",
                    construct: "second-order quantifier".into(),
                })
            }
        })
    }
}

fn substitute_term(t: &Term, map: &BTreeMap<String, Term>) -> Term {
    match t {
        Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| t.clone()),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| substitute_term(a, map)).collect()),
    }
}

