//! Resolution of a team or FO(Q) formula against a structure: variables
//! become row slots, symbols become table indices, quantifier names become
//! oracles.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{row_get, Function, Relation, Row, Structure, MAX_TEAM_VARS};
use crate::quantifiers::{Quantifier, QuantifierRegistry};
use crate::syntax::{Atom, Formula, Term};

use super::EvalConfig;

#[derive(Debug)]
pub(crate) enum CTerm {
    Slot(usize),
    Fun(usize, Vec<CTerm>),
}

#[derive(Debug)]
pub(crate) enum CAtom {
    Rel(usize, Vec<CTerm>),
    Eq(CTerm, CTerm),
    Top,
    Bot,
}

#[derive(Debug)]
pub(crate) enum Kind {
    Lit { negated: bool, atom: CAtom },
    Dep(Vec<CTerm>),
    NegDep,
    Indep { left: Vec<CTerm>, cond: Vec<CTerm>, right: Vec<CTerm> },
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Exists(usize, Box<Node>),
    Forall(usize, Box<Node>),
    Gq { quant: Arc<Quantifier>, slots: Vec<usize>, body: Box<Node> },
}

#[derive(Debug)]
pub(crate) struct Node {
    pub id: usize,
    pub kind: Kind,
}

pub(crate) struct Compiled<'m> {
    pub root: Node,
    pub rels: Vec<&'m Relation>,
    pub funs: Vec<&'m Function>,
    pub n: usize,
    pub has_indep: bool,
}

impl Compiled<'_> {
    #[inline]
    pub fn term(&self, t: &CTerm, row: Row) -> usize {
        match t {
            CTerm::Slot(j) => row_get(row, *j),
            CTerm::Fun(f, args) => {
                let idx = args.iter().fold(0, |acc, a| acc * self.n + self.term(a, row));
                self.funs[*f].apply_index(idx)
            }
        }
    }

    #[inline]
    pub fn atom(&self, a: &CAtom, row: Row) -> bool {
        match a {
            CAtom::Rel(r, args) => {
                let idx = args.iter().fold(0, |acc, t| acc * self.n + self.term(t, row));
                self.rels[*r].contains_index(idx)
            }
            CAtom::Eq(a, b) => self.term(a, row) == self.term(b, row),
            CAtom::Top => true,
            CAtom::Bot => false,
        }
    }

    /// Values of several terms packed four bits apiece.
    #[inline]
    pub fn pack(&self, ts: &[CTerm], row: Row) -> u64 {
        ts.iter().enumerate().fold(0, |acc, (i, t)| acc | (self.term(t, row) as u64) << (4 * i))
    }
}

struct Compiler<'a, 'm> {
    m: &'m Structure,
    reg: &'a QuantifierRegistry,
    cfg: &'a EvalConfig,
    rel_names: Vec<String>,
    rels: Vec<&'m Relation>,
    fun_names: Vec<String>,
    funs: Vec<&'m Function>,
    nodes: usize,
    has_indep: bool,
}

/// Compiles `phi` for teams (or assignments) over the ordered domain `vars`.
pub(crate) fn compile_team<'m>(
    m: &'m Structure,
    phi: &Formula,
    vars: &[String],
    reg: &QuantifierRegistry,
    cfg: &EvalConfig,
) -> Result<Compiled<'m>> {
    if let Some(bad) = first_so(phi) {
        return Err(Error::Dialect {
            dialect: "team semantics",
            construct: bad.into(),
        });
    }
    let mut c = Compiler {
        m,
        reg,
        cfg,
        rel_names: Vec::new(),
        rels: Vec::new(),
        fun_names: Vec::new(),
        funs: Vec::new(),
        nodes: 0,
        has_indep: false,
    };
    let root = c.node(phi, vars)?;
    Ok(Compiled {
        root,
        rels: c.rels,
        funs: c.funs,
        n: m.size(),
        has_indep: c.has_indep,
    })
}

fn first_so(phi: &Formula) -> Option<&'static str> {
    let mut bad = None;
    phi.visit(&mut |f| {
        if matches!(f, Formula::ExistsFn { .. } | Formula::ExistsRel { .. }) {
            bad = Some("second-order quantifier");
        }
    });
    bad
}

impl<'m> Compiler<'_, 'm> {
    fn term(&mut self, t: &Term, scope: &[String]) -> Result<CTerm> {
        match t {
            Term::Var(v) => scope
                .iter()
                .position(|s| s == v)
                .map(CTerm::Slot)
                .ok_or_else(|| Error::UnboundVariable(v.clone())),
            Term::App(f, args) => {
                let idx = match self.fun_names.iter().position(|g| g == f) {
                    Some(i) => i,
                    None => {
                        let fun = self.m.function(f).ok_or_else(|| Error::UnknownSymbol(f.clone()))?;
                        self.fun_names.push(f.clone());
                        self.funs.push(fun);
                        self.funs.len() - 1
                    }
                };
                if self.funs[idx].arity() != args.len() {
                    return Err(Error::Arity {
                        symbol: f.clone(),
                        expected: self.funs[idx].arity(),
                        found: args.len(),
                    });
                }
                let args = args.iter().map(|a| self.term(a, scope)).collect::<Result<_>>()?;
                Ok(CTerm::Fun(idx, args))
            }
        }
    }

    fn terms(&mut self, ts: &[Term], scope: &[String]) -> Result<Vec<CTerm>> {
        if ts.len() > 16 {
            return Err(Error::cap("terms in one atom", ts.len() as u128, 16));
        }
        ts.iter().map(|t| self.term(t, scope)).collect()
    }

    fn relation(&mut self, r: &str, arity: usize) -> Result<usize> {
        let idx = match self.rel_names.iter().position(|g| g == r) {
            Some(i) => i,
            None => {
                let rel = self.m.relation(r).ok_or_else(|| Error::UnknownSymbol(r.to_string()))?;
                self.rel_names.push(r.to_string());
                self.rels.push(rel);
                self.rels.len() - 1
            }
        };
        if self.rels[idx].arity() != arity {
            return Err(Error::Arity {
                symbol: r.to_string(),
                expected: self.rels[idx].arity(),
                found: arity,
            });
        }
        Ok(idx)
    }

    fn bind(scope: &mut Vec<String>, v: &str) -> Result<usize> {
        if let Some(j) = scope.iter().position(|s| s == v) {
            return Ok(j);
        }
        if scope.len() >= MAX_TEAM_VARS {
            return Err(Error::cap("variables in scope", scope.len() as u128 + 1, MAX_TEAM_VARS as u128));
        }
        scope.push(v.to_string());
        Ok(scope.len() - 1)
    }

    fn node(&mut self, phi: &Formula, scope: &[String]) -> Result<Node> {
        let id = self.nodes;
        self.nodes += 1;
        let kind = match phi {
            Formula::Lit(l) => {
                let atom = match &l.atom {
                    Atom::Rel(r, ts) => {
                        let idx = self.relation(r, ts.len())?;
                        CAtom::Rel(idx, self.terms(ts, scope)?)
                    }
                    Atom::Eq(a, b) => CAtom::Eq(self.term(a, scope)?, self.term(b, scope)?),
                    Atom::Top => CAtom::Top,
                    Atom::Bot => CAtom::Bot,
                };
                Kind::Lit {
                    negated: l.negated,
                    atom,
                }
            }
            Formula::Dep(ts) => {
                if ts.is_empty() {
                    return Err(Error::Precondition("dependence atom needs at least one term".into()));
                }
                Kind::Dep(self.terms(ts, scope)?)
            }
            Formula::NegDep(ts) => {
                self.terms(ts, scope)?;
                Kind::NegDep
            }
            Formula::Indep { left, cond, right } => {
                self.has_indep = true;
                Kind::Indep {
                    left: self.terms(left, scope)?,
                    cond: self.terms(cond, scope)?,
                    right: self.terms(right, scope)?,
                }
            }
            Formula::And(a, b) => Kind::And(
                Box::new(self.node(a, scope)?),
                Box::new(self.node(b, scope)?),
            ),
            Formula::Or(a, b) => Kind::Or(
                Box::new(self.node(a, scope)?),
                Box::new(self.node(b, scope)?),
            ),
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                let mut inner = scope.to_vec();
                let slot = Self::bind(&mut inner, v)?;
                let body = Box::new(self.node(body, &inner)?);
                if matches!(phi, Formula::Exists(..)) {
                    Kind::Exists(slot, body)
                } else {
                    Kind::Forall(slot, body)
                }
            }
            Formula::Gq { quant, vars, body } => {
                let q = self.reg.resolve(quant)?;
                if q.arity() != vars.len() {
                    return Err(Error::Arity {
                        symbol: quant.clone(),
                        expected: q.arity(),
                        found: vars.len(),
                    });
                }
                let n = self.m.size();
                if !self.cfg.allow_non_monotone && !q.is_monotone_on(n)? {
                    return Err(Error::NotMonotone {
                        name: quant.clone(),
                        size: n,
                    });
                }
                let mut inner = scope.to_vec();
                let slots = vars.iter().map(|v| Self::bind(&mut inner, v)).collect::<Result<Vec<_>>>()?;
                Kind::Gq {
                    quant: q,
                    slots,
                    body: Box::new(self.node(body, &inner)?),
                }
            }
            Formula::ExistsFn { .. } | Formula::ExistsRel { .. } => unreachable!("rejected above"),
        };
        Ok(Node { id, kind })
    }
}
