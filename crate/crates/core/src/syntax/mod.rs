//! Abstract syntax shared by the team logics D(Q)/I(Q)/FO(Q) and by ESO(Q).
//!
//! A single [`Formula`] type carries every constructor. Which constructors are
//! legal is decided by a [`Dialect`]: team formulas may contain dependence and
//! independence atoms but no second-order quantifiers, ESO formulas the other
//! way around. All formulas are kept in negation normal form: negation only
//! ever sits on a first-order atom or on a dependence atom.

mod parse;
mod print;
mod subst;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

pub use parse::{parse_formula, parse_so_formula, parse_team_formula, ParseOptions};
pub(crate) use parse::is_variable_name;
pub use subst::{
    rename_bound_apart, replace_atom, replace_function_terms, replace_quantified,
    substitute_vars,
};

/// Prefix reserved for symbols invented by transformations.
pub const RESERVED_PREFIX: char = '_';

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    /// Function application; constants are nullary applications `c()`.
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn app(name: impl Into<String>, args: Vec<Term>) -> Self {
        Term::App(name.into(), args)
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::App(..) => None,
        }
    }

    pub fn vars_into(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.vars_into(out)),
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.vars_into(&mut out);
        out
    }

    fn functions_into(&self, out: &mut BTreeMap<String, usize>) {
        if let Term::App(f, args) = self {
            out.insert(f.clone(), args.len());
            args.iter().for_each(|a| a.functions_into(out));
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Atom {
    Rel(String, Vec<Term>),
    Eq(Term, Term),
    Top,
    Bot,
}

impl Atom {
    fn terms(&self) -> Vec<&Term> {
        match self {
            Atom::Rel(_, ts) => ts.iter().collect(),
            Atom::Eq(a, b) => vec![a, b],
            Atom::Top | Atom::Bot => vec![],
        }
    }
}

/// A possibly negated first-order atom.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    pub negated: bool,
    pub atom: Atom,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Lit(Literal),
    /// `dep(t1,…,tn)`: the last term is determined by the others.
    Dep(Vec<Term>),
    /// `~dep(…)`, satisfied only by the empty team.
    NegDep(Vec<Term>),
    /// `left ⊥_cond right`.
    Indep {
        left: Vec<Term>,
        cond: Vec<Term>,
        right: Vec<Term>,
    },
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
    /// Generalized quantifier binding a tuple of pairwise distinct variables.
    Gq {
        quant: String,
        vars: Vec<String>,
        body: Box<Formula>,
    },
    /// Existential second-order function quantifier.
    ExistsFn {
        name: String,
        arity: usize,
        body: Box<Formula>,
    },
    /// Existential second-order relation quantifier.
    ExistsRel {
        name: String,
        arity: usize,
        body: Box<Formula>,
    },
}

/// The fragments the engine distinguishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dialect {
    /// Dependence logic with generalized quantifiers.
    Dq,
    /// Independence logic with generalized quantifiers (dependence atoms allowed too).
    Iq,
    /// First-order logic with generalized quantifiers.
    Fo,
    /// Existential second-order logic with generalized quantifiers.
    Eso,
}

impl Dialect {
    pub fn name(self) -> &'static str {
        match self {
            Dialect::Dq => "D(Q)",
            Dialect::Iq => "I(Q)",
            Dialect::Fo => "FO(Q)",
            Dialect::Eso => "ESO(Q)",
        }
    }

    pub fn is_team(self) -> bool {
        matches!(self, Dialect::Dq | Dialect::Iq | Dialect::Fo)
    }
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

// ---------- constructors ----------

impl Formula {
    pub fn lit(atom: Atom) -> Self {
        Formula::Lit(Literal {
            negated: false,
            atom,
        })
    }

    pub fn neg(atom: Atom) -> Self {
        Formula::Lit(Literal {
            negated: true,
            atom,
        })
    }

    pub fn top() -> Self {
        Formula::lit(Atom::Top)
    }

    pub fn bot() -> Self {
        Formula::lit(Atom::Bot)
    }

    pub fn rel(name: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::lit(Atom::Rel(name.into(), args))
    }

    pub fn not_rel(name: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::neg(Atom::Rel(name.into(), args))
    }

    pub fn eq(a: Term, b: Term) -> Self {
        Formula::lit(Atom::Eq(a, b))
    }

    pub fn neq(a: Term, b: Term) -> Self {
        Formula::neg(Atom::Eq(a, b))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn exists(v: impl Into<String>, body: Formula) -> Self {
        Formula::Exists(v.into(), Box::new(body))
    }

    pub fn forall(v: impl Into<String>, body: Formula) -> Self {
        Formula::Forall(v.into(), Box::new(body))
    }

    pub fn gq(quant: impl Into<String>, vars: Vec<String>, body: Formula) -> Self {
        Formula::Gq {
            quant: quant.into(),
            vars,
            body: Box::new(body),
        }
    }

    pub fn exists_fn(name: impl Into<String>, arity: usize, body: Formula) -> Self {
        Formula::ExistsFn {
            name: name.into(),
            arity,
            body: Box::new(body),
        }
    }

    pub fn exists_rel(name: impl Into<String>, arity: usize, body: Formula) -> Self {
        Formula::ExistsRel {
            name: name.into(),
            arity,
            body: Box::new(body),
        }
    }

    /// Left-nested conjunction; `top` when empty.
    pub fn and_all(parts: impl IntoIterator<Item = Formula>) -> Self {
        parts
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or_else(Formula::top)
    }

    /// Left-nested disjunction; `bot` when empty.
    pub fn or_all(parts: impl IntoIterator<Item = Formula>) -> Self {
        parts
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or_else(Formula::bot)
    }

    /// Universally closes over `vars`, innermost last.
    pub fn forall_all(vars: &[String], body: Formula) -> Self {
        vars.iter()
            .rev()
            .fold(body, |acc, v| Formula::forall(v.clone(), acc))
    }

    pub fn exists_all(vars: &[String], body: Formula) -> Self {
        vars.iter()
            .rev()
            .fold(body, |acc, v| Formula::exists(v.clone(), acc))
    }
}

// ---------- queries ----------

impl Formula {
    pub fn is_quantifier(&self) -> bool {
        matches!(
            self,
            Formula::Exists(..)
                | Formula::Forall(..)
                | Formula::Gq { .. }
                | Formula::ExistsFn { .. }
                | Formula::ExistsRel { .. }
        )
    }

    /// Free first-order variables. All variables of dependence and
    /// independence atoms are free.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.free_vars_into(&mut BTreeSet::new(), &mut out);
        out
    }

    fn free_vars_into(&self, bound: &mut BTreeSet<String>, out: &mut BTreeSet<String>) {
        let add_terms = |ts: &mut dyn Iterator<Item = &Term>, out: &mut BTreeSet<String>| {
            for t in ts {
                for v in t.vars() {
                    if !bound.contains(&v) {
                        out.insert(v);
                    }
                }
            }
        };
        match self {
            Formula::Lit(l) => add_terms(&mut l.atom.terms().into_iter(), out),
            Formula::Dep(ts) | Formula::NegDep(ts) => add_terms(&mut ts.iter(), out),
            Formula::Indep { left, cond, right } => {
                add_terms(&mut left.iter().chain(cond).chain(right), out)
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.free_vars_into(bound, out);
                b.free_vars_into(bound, out);
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                let fresh = bound.insert(v.clone());
                body.free_vars_into(bound, out);
                if fresh {
                    bound.remove(v);
                }
            }
            Formula::Gq { vars, body, .. } => {
                let added: Vec<String> = vars
                    .iter()
                    .filter(|v| bound.insert((*v).clone()))
                    .cloned()
                    .collect();
                body.free_vars_into(bound, out);
                for v in added {
                    bound.remove(&v);
                }
            }
            Formula::ExistsFn { body, .. } | Formula::ExistsRel { body, .. } => {
                body.free_vars_into(bound, out)
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Relation symbols occurring free (not bound by `ER`), with arities.
    pub fn free_relations(&self) -> BTreeMap<String, usize> {
        let (rels, _) = self.free_symbols();
        rels
    }

    /// Function symbols occurring free (not bound by `Ef`), with arities.
    pub fn free_functions(&self) -> BTreeMap<String, usize> {
        let (_, funcs) = self.free_symbols();
        funcs
    }

    /// Free second-order symbols: `(relations, functions)`.
    pub fn free_symbols(&self) -> (BTreeMap<String, usize>, BTreeMap<String, usize>) {
        let mut rels = BTreeMap::new();
        let mut funcs = BTreeMap::new();
        self.free_symbols_into(&mut rels, &mut funcs);
        (rels, funcs)
    }

    fn free_symbols_into(
        &self,
        rels: &mut BTreeMap<String, usize>,
        funcs: &mut BTreeMap<String, usize>,
    ) {
        match self {
            Formula::Lit(l) => {
                if let Atom::Rel(r, ts) = &l.atom {
                    rels.insert(r.clone(), ts.len());
                }
                l.atom.terms().iter().for_each(|t| t.functions_into(funcs));
            }
            Formula::Dep(ts) | Formula::NegDep(ts) => {
                ts.iter().for_each(|t| t.functions_into(funcs))
            }
            Formula::Indep { left, cond, right } => left
                .iter()
                .chain(cond)
                .chain(right)
                .for_each(|t| t.functions_into(funcs)),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.free_symbols_into(rels, funcs);
                b.free_symbols_into(rels, funcs);
            }
            Formula::Exists(_, b) | Formula::Forall(_, b) | Formula::Gq { body: b, .. } => {
                b.free_symbols_into(rels, funcs)
            }
            Formula::ExistsFn { name, body, .. } => {
                let (r, mut f) = body.free_symbols();
                f.remove(name);
                rels.extend(r);
                funcs.extend(f);
            }
            Formula::ExistsRel { name, body, .. } => {
                let (mut r, f) = body.free_symbols();
                r.remove(name);
                rels.extend(r);
                funcs.extend(f);
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Lit(l) => l.atom.terms().iter().for_each(|t| t.vars_into(&mut out)),
            Formula::Dep(ts) | Formula::NegDep(ts) => {
                ts.iter().for_each(|t| t.vars_into(&mut out))
            }
            Formula::Indep { left, cond, right } => left
                .iter()
                .chain(cond)
                .chain(right)
                .for_each(|t| t.vars_into(&mut out)),
            Formula::Exists(v, _) | Formula::Forall(v, _) => {
                out.insert(v.clone());
            }
            Formula::Gq { vars, .. } => out.extend(vars.iter().cloned()),
            _ => {}
        });
        out
    }

    /// Every symbol name (relations, functions, second-order bound symbols).
    pub fn all_symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            let mut funcs = BTreeMap::new();
            match f {
                Formula::Lit(l) => {
                    if let Atom::Rel(r, _) = &l.atom {
                        out.insert(r.clone());
                    }
                    l.atom.terms().iter().for_each(|t| t.functions_into(&mut funcs));
                }
                Formula::Dep(ts) | Formula::NegDep(ts) => {
                    ts.iter().for_each(|t| t.functions_into(&mut funcs))
                }
                Formula::Indep { left, cond, right } => left
                    .iter()
                    .chain(cond)
                    .chain(right)
                    .for_each(|t| t.functions_into(&mut funcs)),
                Formula::ExistsFn { name, .. } | Formula::ExistsRel { name, .. } => {
                    out.insert(name.clone());
                }
                _ => {}
            }
            out.extend(funcs.into_keys());
        });
        out
    }

    /// Names of generalized quantifiers used.
    pub fn quantifiers(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Gq { quant, .. } = f {
                out.insert(quant.clone());
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut dyn FnMut(&'a Formula)) {
        f(self);
        match self {
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Formula::Exists(_, b)
            | Formula::Forall(_, b)
            | Formula::Gq { body: b, .. }
            | Formula::ExistsFn { body: b, .. }
            | Formula::ExistsRel { body: b, .. } => b.visit(f),
            _ => {}
        }
    }

    pub fn contains_indep(&self) -> bool {
        let mut found = false;
        self.visit(&mut |f| found |= matches!(f, Formula::Indep { .. }));
        found
    }

    /// Nesting depth of connectives and quantifiers; atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Lit(_) | Formula::Dep(_) | Formula::NegDep(_) | Formula::Indep { .. } => 0,
            Formula::And(a, b) | Formula::Or(a, b) => 1 + a.depth().max(b.depth()),
            Formula::Exists(_, b)
            | Formula::Forall(_, b)
            | Formula::Gq { body: b, .. }
            | Formula::ExistsFn { body: b, .. }
            | Formula::ExistsRel { body: b, .. } => 1 + b.depth(),
        }
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Checks that only constructors of `dialect` occur and that generalized
    /// quantifier tuples are pairwise distinct.
    pub fn check_dialect(&self, dialect: Dialect) -> Result<()> {
        let mut err = None;
        self.visit(&mut |f| {
            if err.is_some() {
                return;
            }
            let bad = match f {
                Formula::Dep(_) | Formula::NegDep(_) => {
                    matches!(dialect, Dialect::Fo | Dialect::Eso).then_some("dependence atom")
                }
                Formula::Indep { .. } => (dialect != Dialect::Iq).then_some("independence atom"),
                Formula::ExistsFn { .. } => {
                    (dialect != Dialect::Eso).then_some("second-order function quantifier")
                }
                Formula::ExistsRel { .. } => {
                    (dialect != Dialect::Eso).then_some("second-order relation quantifier")
                }
                Formula::Gq { quant, vars, .. } => {
                    let distinct: BTreeSet<_> = vars.iter().collect();
                    if distinct.len() != vars.len() || vars.is_empty() {
                        err = Some(Error::Precondition(format!(
                            "quantifier `{quant}` must bind a nonempty tuple of pairwise distinct variables"
                        )));
                    }
                    None
                }
                _ => None,
            };
            if let Some(construct) = bad {
                err = Some(Error::Dialect {
                    dialect: dialect.name(),
                    construct: construct.to_string(),
                });
            }
        });
        err.map_or(Ok(()), Err)
    }

    /// Smallest dialect containing the formula, preferring team dialects.
    pub fn dialect(&self) -> Dialect {
        let mut dep = false;
        let mut indep = false;
        let mut so = false;
        self.visit(&mut |f| match f {
            Formula::Dep(_) | Formula::NegDep(_) => dep = true,
            Formula::Indep { .. } => indep = true,
            Formula::ExistsFn { .. } | Formula::ExistsRel { .. } => so = true,
            _ => {}
        });
        match (so, indep, dep) {
            (true, _, _) => Dialect::Eso,
            (false, true, _) => Dialect::Iq,
            (false, false, true) => Dialect::Dq,
            (false, false, false) => Dialect::Fo,
        }
    }
}

// ---------- signature ----------

/// Relation and function symbols with arities. Nullary functions are constants.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    relations: BTreeMap<String, usize>,
    functions: BTreeMap<String, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_relation(mut self, name: &str, arity: usize) -> Result<Self> {
        self.add_relation(name, arity)?;
        Ok(self)
    }

    pub fn with_function(mut self, name: &str, arity: usize) -> Result<Self> {
        self.add_function(name, arity)?;
        Ok(self)
    }

    pub fn add_relation(&mut self, name: &str, arity: usize) -> Result<()> {
        if self.functions.contains_key(name) {
            return Err(Error::Precondition(format!(
                "`{name}` is already a function symbol"
            )));
        }
        match self.relations.insert(name.to_string(), arity) {
            Some(old) if old != arity => Err(Error::Arity {
                symbol: name.to_string(),
                expected: old,
                found: arity,
            }),
            _ => Ok(()),
        }
    }

    pub fn add_function(&mut self, name: &str, arity: usize) -> Result<()> {
        if self.relations.contains_key(name) {
            return Err(Error::Precondition(format!(
                "`{name}` is already a relation symbol"
            )));
        }
        match self.functions.insert(name.to_string(), arity) {
            Some(old) if old != arity => Err(Error::Arity {
                symbol: name.to_string(),
                expected: old,
                found: arity,
            }),
            _ => Ok(()),
        }
    }

    pub fn relation_arity(&self, name: &str) -> Option<usize> {
        self.relations.get(name).copied()
    }

    pub fn function_arity(&self, name: &str) -> Option<usize> {
        self.functions.get(name).copied()
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, usize)> {
        self.relations.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn functions(&self) -> impl Iterator<Item = (&str, usize)> {
        self.functions.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.relations.contains_key(name) || self.functions.contains_key(name)
    }

    pub fn merge(&mut self, other: &Signature) -> Result<()> {
        for (r, a) in other.relations() {
            self.add_relation(r, a)?;
        }
        for (f, a) in other.functions() {
            self.add_function(f, a)?;
        }
        Ok(())
    }

    /// Parses `P/1,E/2,c/0`. Uppercase-initial names are relations, others functions.
    pub fn parse_list(text: &str) -> Result<Self> {
        let mut sig = Signature::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, arity) = item.split_once('/').ok_or_else(|| Error::Syntax {
                pos: 0,
                msg: format!("expected NAME/ARITY, found `{item}`"),
            })?;
            let arity: usize = arity.trim().parse().map_err(|_| Error::Syntax {
                pos: 0,
                msg: format!("bad arity in `{item}`"),
            })?;
            let name = name.trim();
            if name.chars().next().is_some_and(|c| c.is_ascii_uppercase()) {
                sig.add_relation(name, arity)?;
            } else {
                sig.add_function(name, arity)?;
            }
        }
        Ok(sig)
    }

    /// The free symbols of `formula`, with the arities used there.
    pub fn infer(formula: &Formula) -> Result<Self> {
        let (rels, funcs) = formula.free_symbols();
        let mut sig = Signature::new();
        for (r, a) in rels {
            sig.add_relation(&r, a)?;
        }
        for (f, a) in funcs {
            sig.add_function(&f, a)?;
        }
        Ok(sig)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self
            .relations
            .iter()
            .chain(self.functions.iter())
            .map(|(n, a)| format!("{n}/{a}"))
            .collect();
        f.write_str(&items.join(","))
    }
}

// ---------- normal form ----------

/// One entry of a normal-form quantifier prefix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PrefixEntry {
    Forall(String),
    Gq { quant: String, vars: Vec<String> },
}

impl PrefixEntry {
    pub fn vars(&self) -> Vec<String> {
        match self {
            PrefixEntry::Forall(v) => vec![v.clone()],
            PrefixEntry::Gq { vars, .. } => vars.clone(),
        }
    }
}

/// `∃f₁…fₙ Q′₁x̄₁…Q′ₘx̄ₘ ψ` with `Q′ᵢ ∈ {∀, Q}` and `ψ` quantifier-free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalFormSentence {
    pub functions: Vec<(String, usize)>,
    pub prefix: Vec<PrefixEntry>,
    pub matrix: Formula,
}

impl NormalFormSentence {
    pub fn new(
        functions: Vec<(String, usize)>,
        prefix: Vec<PrefixEntry>,
        matrix: Formula,
    ) -> Result<Self> {
        let nf = NormalFormSentence {
            functions,
            prefix,
            matrix,
        };
        nf.validate()?;
        Ok(nf)
    }

    pub fn validate(&self) -> Result<()> {
        let mut bad = None;
        self.matrix.visit(&mut |f| {
            if f.is_quantifier() {
                bad = Some("quantifier in matrix");
            }
            if matches!(f, Formula::Dep(_) | Formula::NegDep(_) | Formula::Indep { .. }) {
                bad = Some("team atom in matrix");
            }
        });
        if let Some(msg) = bad {
            return Err(Error::Precondition(format!("not in normal form: {msg}")));
        }
        Ok(())
    }

    /// The ordinary ESO(Q) formula this normal form denotes.
    pub fn to_formula(&self) -> Formula {
        let body = self
            .prefix
            .iter()
            .rev()
            .fold(self.matrix.clone(), |acc, e| match e {
                PrefixEntry::Forall(v) => Formula::forall(v.clone(), acc),
                PrefixEntry::Gq { quant, vars } => Formula::gq(quant.clone(), vars.clone(), acc),
            });
        self.functions
            .iter()
            .rev()
            .fold(body, |acc, (f, k)| Formula::exists_fn(f.clone(), *k, acc))
    }

    /// Reads a formula that already has normal-form shape.
    pub fn from_formula(formula: &Formula) -> Result<Self> {
        let mut functions = Vec::new();
        let mut prefix = Vec::new();
        let mut cur = formula;
        while let Formula::ExistsFn { name, arity, body } = cur {
            functions.push((name.clone(), *arity));
            cur = body;
        }
        loop {
            match cur {
                Formula::Forall(v, body) => {
                    prefix.push(PrefixEntry::Forall(v.clone()));
                    cur = body;
                }
                Formula::Gq { quant, vars, body } => {
                    prefix.push(PrefixEntry::Gq {
                        quant: quant.clone(),
                        vars: vars.clone(),
                    });
                    cur = body;
                }
                _ => break,
            }
        }
        NormalFormSentence::new(functions, prefix, cur.clone())
    }

    pub fn prefix_vars(&self) -> Vec<String> {
        self.prefix.iter().flat_map(PrefixEntry::vars).collect()
    }
}

// ---------- fresh names ----------

/// Generates reserved-prefix names that avoid a given set of used names.
#[derive(Debug, Clone, Default)]
pub struct Fresh {
    used: BTreeSet<String>,
    counter: usize,
}

impl Fresh {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn avoiding(formula: &Formula) -> Self {
        let mut fresh = Fresh::new();
        fresh.reserve_formula(formula);
        fresh
    }

    pub fn reserve(&mut self, name: impl Into<String>) {
        self.used.insert(name.into());
    }

    pub fn reserve_formula(&mut self, formula: &Formula) {
        self.used.extend(formula.all_vars());
        self.used.extend(formula.all_symbols());
    }

    /// A fresh name `_<stem><n>`. Use a lowercase stem for variables and
    /// functions, an uppercase one for relations.
    pub fn name(&mut self, stem: &str) -> String {
        loop {
            let candidate = format!("{RESERVED_PREFIX}{stem}{}", self.counter);
            self.counter += 1;
            if self.used.insert(candidate.clone()) {
                return candidate;
            }
        }
    }

    pub fn var(&mut self) -> String {
        self.name("v")
    }

    pub fn names(&mut self, stem: &str, n: usize) -> Vec<String> {
        (0..n).map(|_| self.name(stem)).collect()
    }
}

pub fn is_reserved(name: &str) -> bool {
    name.starts_with(RESERVED_PREFIX)
}

/// Whether `name` denotes a relation symbol under the lexical convention
/// (first non-underscore character uppercase).
pub fn is_relation_name(name: &str) -> bool {
    name.trim_start_matches(RESERVED_PREFIX)
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_uppercase())
}
