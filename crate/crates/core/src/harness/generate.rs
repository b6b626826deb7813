//! Formula sources for sweeps: an exhaustive space layered by depth, and a
//! seeded random generator.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::quantifiers::QuantifierRegistry;
use crate::syntax::{Dialect, Formula, Signature, Term};

/// A first-order binder applied by the generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Binder {
    Exists(String),
    Forall(String),
    Gq(String, Vec<String>),
}

impl Binder {
    pub fn apply(&self, body: Formula) -> Formula {
        match self {
            Binder::Exists(v) => Formula::exists(v.clone(), body),
            Binder::Forall(v) => Formula::forall(v.clone(), body),
            Binder::Gq(q, vs) => Formula::gq(q.clone(), vs.clone(), body),
        }
    }
}

/// Every formula built from `atoms` by `∧`, `∨` and `binders` up to a depth.
/// Conjunctions and disjunctions take unordered pairs (both connectives are
/// commutative under every semantics here), so `a ∧ b` appears once.
#[derive(Debug, Clone)]
pub struct FormulaSpace {
    pub atoms: Vec<Formula>,
    pub binders: Vec<Binder>,
}

fn pairs(n: u128) -> u128 {
    n * (n + 1) / 2
}

impl FormulaSpace {
    /// Atoms over `vars`: each relation of `sig` on every variable tuple,
    /// positively, plus its negation on the first tuple; `x=y` and `x≠y` for
    /// the first two variables; for team dialects `dep(v)` for the last
    /// variable, `dep(x,y)` for the first two and one negated dependence
    /// atom; for I(Q) additionally `perp(x;;y)` and `perp(y;x;y)`.
    /// Binders: native `∃`/`∀` and `[q v]` for each unary `q`, on each variable.
    pub fn standard(
        sig: &Signature,
        vars: &[String],
        dialect: Dialect,
        quantifiers: &[String],
        reg: &QuantifierRegistry,
    ) -> Result<Self> {
        if vars.is_empty() {
            return Err(Error::Precondition("the formula space needs at least one variable".into()));
        }
        let v = |i: usize| Term::var(&vars[i.min(vars.len() - 1)]);
        let mut atoms = Vec::new();
        for (r, k) in sig.relations() {
            let tuples = tuples(vars, k);
            for (i, t) in tuples.iter().enumerate() {
                atoms.push(Formula::rel(r, t.iter().map(Term::var).collect()));
                if i == 0 {
                    atoms.push(Formula::not_rel(r, t.iter().map(Term::var).collect()));
                }
            }
        }
        if vars.len() >= 2 {
            atoms.push(Formula::eq(v(0), v(1)));
            atoms.push(Formula::neq(v(0), v(1)));
        }
        if matches!(dialect, Dialect::Dq | Dialect::Iq) {
            atoms.push(Formula::Dep(vec![v(vars.len() - 1)]));
            if vars.len() >= 2 {
                atoms.push(Formula::Dep(vec![v(0), v(1)]));
            }
            atoms.push(Formula::NegDep(vec![v(0)]));
        }
        if dialect == Dialect::Iq && vars.len() >= 2 {
            atoms.push(Formula::Indep {
                left: vec![v(0)],
                cond: vec![],
                right: vec![v(1)],
            });
            atoms.push(Formula::Indep {
                left: vec![v(1)],
                cond: vec![v(0)],
                right: vec![v(1)],
            });
        }
        let mut binders = Vec::new();
        for x in vars {
            binders.push(Binder::Exists(x.clone()));
            binders.push(Binder::Forall(x.clone()));
        }
        for q in quantifiers {
            let arity = reg.resolve(q)?.arity();
            if arity == 1 {
                binders.extend(vars.iter().map(|x| Binder::Gq(q.clone(), vec![x.clone()])));
            } else if arity <= vars.len() {
                binders.push(Binder::Gq(q.clone(), vars[..arity].to_vec()));
            } else {
                return Err(Error::Precondition(format!("`{q}` binds more variables than the space has")));
            }
        }
        Ok(FormulaSpace { atoms, binders })
    }

    /// Number of formulas of depth at most `depth`.
    pub fn count(&self, depth: usize) -> u128 {
        let a = self.atoms.len() as u128;
        let b = self.binders.len() as u128;
        let (mut below, mut total) = (0u128, a);
        for _ in 0..depth {
            let new = 2 * (pairs(total) - pairs(below)) + b * (total - below);
            below = total;
            total += new;
        }
        total
    }

    /// The formulas of depth at most `depth`, shallower ones first.
    pub fn formulas(&self, depth: usize, cap: u64) -> Result<Vec<Formula>> {
        let count = self.count(depth);
        if count > cap as u128 {
            return Err(Error::cap("formulas in the space", count, cap as u128));
        }
        let mut all: Vec<Formula> = self.atoms.clone();
        let mut start = 0;
        for _ in 0..depth {
            let end = all.len();
            let mut next = Vec::new();
            for j in start..end {
                for i in 0..=j {
                    next.push(Formula::and(all[i].clone(), all[j].clone()));
                    next.push(Formula::or(all[i].clone(), all[j].clone()));
                }
            }
            for b in &self.binders {
                next.extend(all[start..end].iter().map(|f| b.apply(f.clone())));
            }
            start = end;
            all.extend(next);
        }
        debug_assert_eq!(all.len() as u128, count);
        Ok(all)
    }
}

fn tuples(vars: &[String], k: usize) -> Vec<Vec<String>> {
    (0..k).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter()
            .flat_map(|t| {
                vars.iter().map(move |v| {
                    let mut t = t.clone();
                    t.push(v.clone());
                    t
                })
            })
            .collect()
    })
}

/// The variables random formulas are built over.
pub const RANDOM_VARS: [&str; 2] = ["x", "y"];

/// A random formula of the dialect whose root sits at depth `depth`
/// (depth 0 is an atom), deterministic in `seed`.
///
/// Atoms use the relation symbols of `sig` on the variables `x`, `y`, and
/// equalities; team dialects add dependence atoms, I(Q) independence atoms.
/// ESO(Q) formulas occasionally quantify a fresh unary relation `W<n>`.
pub fn random_formula(
    seed: u64,
    depth: usize,
    sig: &Signature,
    quantifiers: &[String],
    dialect: Dialect,
    reg: &QuantifierRegistry,
) -> Result<Formula> {
    if sig.relations().next().is_none() {
        return Err(Error::Precondition("random formulas need a relation symbol in the signature".into()));
    }
    for q in quantifiers {
        let k = reg.resolve(q)?.arity();
        if k > RANDOM_VARS.len() {
            return Err(Error::Precondition(format!("`{q}` binds more variables than are available")));
        }
    }
    let mut g = RandomGen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        rels: sig.relations().map(|(r, k)| (r.to_string(), k)).collect(),
        quantifiers: quantifiers
            .iter()
            .map(|q| Ok((q.clone(), reg.resolve(q)?.arity())))
            .collect::<Result<_>>()?,
        dialect,
        so_counter: 0,
        so_scope: Vec::new(),
    };
    Ok(g.formula(depth))
}

struct RandomGen {
    rng: ChaCha8Rng,
    rels: Vec<(String, usize)>,
    quantifiers: Vec<(String, usize)>,
    dialect: Dialect,
    so_counter: usize,
    so_scope: Vec<String>,
}

impl RandomGen {
    fn var(&mut self) -> Term {
        Term::var(*RANDOM_VARS.choose(&mut self.rng).expect("nonempty"))
    }

    fn atom(&mut self) -> Formula {
        let team = matches!(self.dialect, Dialect::Dq | Dialect::Iq);
        let iq = self.dialect == Dialect::Iq;
        loop {
            return match self.rng.gen_range(0..10) {
                0..=4 => {
                    let (r, k) = if !self.so_scope.is_empty() && self.rng.gen_bool(0.5) {
                        (self.so_scope.choose(&mut self.rng).expect("nonempty").clone(), 1)
                    } else {
                        self.rels.choose(&mut self.rng).expect("nonempty").clone()
                    };
                    let args = (0..k).map(|_| self.var()).collect();
                    if self.rng.gen_bool(0.5) {
                        Formula::rel(r, args)
                    } else {
                        Formula::not_rel(r, args)
                    }
                }
                5 | 6 => {
                    let (a, b) = (self.var(), self.var());
                    if self.rng.gen_bool(0.5) {
                        Formula::eq(a, b)
                    } else {
                        Formula::neq(a, b)
                    }
                }
                7 if team => {
                    let n = self.rng.gen_range(1..=2);
                    Formula::Dep((0..n).map(|_| self.var()).collect())
                }
                8 if team && self.rng.gen_bool(0.2) => Formula::NegDep(vec![self.var()]),
                9 if iq => {
                    let cond = if self.rng.gen_bool(0.5) { vec![self.var()] } else { vec![] };
                    Formula::Indep {
                        left: vec![self.var()],
                        cond,
                        right: vec![self.var()],
                    }
                }
                _ => continue,
            };
        }
    }

    fn binder(&mut self) -> Binder {
        let choices = 2 + self.quantifiers.len();
        let v = RANDOM_VARS.choose(&mut self.rng).expect("nonempty").to_string();
        match self.rng.gen_range(0..choices) {
            0 => Binder::Exists(v),
            1 => Binder::Forall(v),
            i => {
                let (q, k) = self.quantifiers[i - 2].clone();
                let vars = if k == 1 {
                    vec![v]
                } else {
                    let mut vs: Vec<String> = RANDOM_VARS.iter().map(|s| s.to_string()).collect();
                    vs.shuffle(&mut self.rng);
                    vs.truncate(k);
                    vs
                };
                Binder::Gq(q, vars)
            }
        }
    }

    fn formula(&mut self, depth: usize) -> Formula {
        if depth == 0 {
            return self.atom();
        }
        let sub = |g: &mut Self| {
            let d = g.rng.gen_range(0..depth);
            g.formula(d)
        };
        let so = self.dialect == Dialect::Eso && self.rng.gen_bool(0.15);
        if so {
            let name = format!("W{}", self.so_counter);
            self.so_counter += 1;
            self.so_scope.push(name.clone());
            let body = self.formula(depth - 1);
            self.so_scope.pop();
            return Formula::exists_rel(name, 1, body);
        }
        match self.rng.gen_range(0..4) {
            0 => {
                let (a, b) = (self.formula(depth - 1), sub(self));
                Formula::and(a, b)
            }
            1 => {
                let (a, b) = (self.formula(depth - 1), sub(self));
                Formula::or(a, b)
            }
            _ => {
                let b = self.binder();
                b.apply(self.formula(depth - 1))
            }
        }
    }
}
