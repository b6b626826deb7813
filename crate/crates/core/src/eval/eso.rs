//! ESO(Q) evaluation by exhaustive witness search over partial tables.
//!
//! Every binder gets its own environment slot, so no shadowing bookkeeping is
//! needed at run time. Second-order quantifier nodes memoize their verdict
//! keyed by the values of everything free in them, and hoist conjuncts that
//! do not mention the quantified symbol out of the witness loop.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{Assignment, Function, Relation, Structure};
use crate::quantifiers::{cells, tuple_at, Quantifier, QuantifierRegistry};
use crate::syntax::{Atom, Formula, Term};

use super::{EvalConfig, Interpretation};

const MEMO_LIMIT: usize = 1 << 21;

#[derive(Debug)]
enum ETerm {
    Var(usize),
    Base(usize, Vec<ETerm>),
    So(usize, Vec<ETerm>),
}

#[derive(Debug)]
enum EAtom {
    Base(usize, Vec<ETerm>),
    So(usize, Vec<ETerm>),
    Eq(ETerm, ETerm),
    Top,
    Bot,
}

#[derive(Debug)]
enum ENode {
    Lit(bool, EAtom),
    And(Vec<ENode>),
    Or(Vec<ENode>),
    Exists(usize, Box<ENode>),
    Forall(usize, Box<ENode>),
    Gq(Arc<Quantifier>, Vec<usize>, Box<ENode>),
    So(Box<SoNode>),
}

#[derive(Debug)]
struct SoNode {
    id: usize,
    slot: usize,
    cells: usize,
    function: bool,
    /// Conjuncts of the body that do not mention the quantified symbol.
    hoisted: Vec<ENode>,
    body: Vec<ENode>,
    free_fo: Vec<usize>,
    free_so: Vec<usize>,
}

/// Marks a function-table entry not yet fixed by the search. Universes have
/// at most 15 elements, so the marker fits the four bits memo keys allot to
/// an entry.
const UNKNOWN: u8 = 15;

/// Largest function table a second-order binder may range over.
const MAX_FUNCTION_CELLS: usize = 1 << 12;

/// Value of a second-order symbol; entries outside `known` (or equal to
/// [`UNKNOWN`]) are still open.
#[derive(Debug, Clone)]
enum SoVal {
    Rel { mask: u64, known: u64 },
    Fun(Vec<u8>),
}

pub struct EsoEvaluator<'m> {
    root: ENode,
    free_vars: Vec<String>,
    interp_slots: BTreeMap<String, (usize, usize, bool)>,
    state: State<'m>,
}

struct State<'m> {
    n: usize,
    rels: Vec<&'m Relation>,
    funs: Vec<&'m Function>,
    so: Vec<SoVal>,
    env: Vec<usize>,
    memo: HashMap<Vec<u64>, bool>,
    steps: u64,
    cfg: EvalConfig,
}

struct Compiler<'a, 'm> {
    m: &'m Structure,
    reg: &'a QuantifierRegistry,
    cfg: &'a EvalConfig,
    rel_names: Vec<String>,
    rels: Vec<&'m Relation>,
    fun_names: Vec<String>,
    funs: Vec<&'m Function>,
    fo_slots: usize,
    so_slots: Vec<(usize, bool)>,
    so_nodes: usize,
    // references recorded while compiling, for free-symbol analysis
    fo_refs: Vec<usize>,
    so_refs: Vec<usize>,
}

type Scope = Vec<(String, usize)>;

fn lookup(scope: &Scope, name: &str) -> Option<usize> {
    scope.iter().rev().find(|(n, _)| n == name).map(|&(_, s)| s)
}

impl<'m> Compiler<'_, 'm> {
    fn base_fun(&mut self, f: &str) -> Option<usize> {
        if let Some(i) = self.fun_names.iter().position(|g| g == f) {
            return Some(i);
        }
        let fun = self.m.function(f)?;
        self.fun_names.push(f.to_string());
        self.funs.push(fun);
        Some(self.funs.len() - 1)
    }

    fn base_rel(&mut self, r: &str) -> Option<usize> {
        if let Some(i) = self.rel_names.iter().position(|g| g == r) {
            return Some(i);
        }
        let rel = self.m.relation(r)?;
        self.rel_names.push(r.to_string());
        self.rels.push(rel);
        Some(self.rels.len() - 1)
    }

    fn arity_error(symbol: &str, expected: usize, found: usize) -> Error {
        Error::Arity {
            symbol: symbol.to_string(),
            expected,
            found,
        }
    }

    fn term(&mut self, t: &Term, fo: &Scope, so: &Scope) -> Result<ETerm> {
        match t {
            Term::Var(v) => {
                let slot = lookup(fo, v).ok_or_else(|| Error::UnboundVariable(v.clone()))?;
                self.fo_refs.push(slot);
                Ok(ETerm::Var(slot))
            }
            Term::App(f, args) => {
                let args: Vec<ETerm> = args.iter().map(|a| self.term(a, fo, so)).collect::<Result<_>>()?;
                if let Some(slot) = lookup(so, f) {
                    let (arity, is_fn) = self.so_slots[slot];
                    if !is_fn {
                        return Err(Error::Precondition(format!("`{f}` is a relation, used as a function")));
                    }
                    if arity != args.len() {
                        return Err(Self::arity_error(f, arity, args.len()));
                    }
                    self.so_refs.push(slot);
                    return Ok(ETerm::So(slot, args));
                }
                let idx = self.base_fun(f).ok_or_else(|| Error::UnknownSymbol(f.clone()))?;
                if self.funs[idx].arity() != args.len() {
                    return Err(Self::arity_error(f, self.funs[idx].arity(), args.len()));
                }
                Ok(ETerm::Base(idx, args))
            }
        }
    }

    fn new_so_slot(&mut self, arity: usize, function: bool) -> Result<usize> {
        table_cells(self.m.size(), arity, function)?;
        self.so_slots.push((arity, function));
        Ok(self.so_slots.len() - 1)
    }

    fn node(&mut self, phi: &Formula, fo: &mut Scope, so: &mut Scope) -> Result<ENode> {
        Ok(match phi {
            Formula::Lit(l) => {
                let atom = match &l.atom {
                    Atom::Rel(r, ts) => {
                        let args: Vec<ETerm> = ts.iter().map(|t| self.term(t, fo, so)).collect::<Result<_>>()?;
                        if let Some(slot) = lookup(so, r) {
                            let (arity, is_fn) = self.so_slots[slot];
                            if is_fn {
                                return Err(Error::Precondition(format!("`{r}` is a function, used as a relation")));
                            }
                            if arity != args.len() {
                                return Err(Self::arity_error(r, arity, args.len()));
                            }
                            self.so_refs.push(slot);
                            EAtom::So(slot, args)
                        } else {
                            let idx = self.base_rel(r).ok_or_else(|| Error::UnknownSymbol(r.clone()))?;
                            if self.rels[idx].arity() != args.len() {
                                return Err(Self::arity_error(r, self.rels[idx].arity(), args.len()));
                            }
                            EAtom::Base(idx, args)
                        }
                    }
                    Atom::Eq(a, b) => EAtom::Eq(self.term(a, fo, so)?, self.term(b, fo, so)?),
                    Atom::Top => EAtom::Top,
                    Atom::Bot => EAtom::Bot,
                };
                ENode::Lit(l.negated, atom)
            }
            Formula::Dep(_) | Formula::NegDep(_) | Formula::Indep { .. } => {
                return Err(Error::Dialect {
                    dialect: "ESO(Q)",
                    construct: "team atom".into(),
                })
            }
            Formula::And(..) => {
                let mut parts = Vec::new();
                flatten(phi, true, &mut parts);
                ENode::And(parts.into_iter().map(|p| self.node(p, fo, so)).collect::<Result<_>>()?)
            }
            Formula::Or(..) => {
                let mut parts = Vec::new();
                flatten(phi, false, &mut parts);
                ENode::Or(parts.into_iter().map(|p| self.node(p, fo, so)).collect::<Result<_>>()?)
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                let slot = self.fo_slots;
                self.fo_slots += 1;
                fo.push((v.clone(), slot));
                let body = self.node(body, fo, so);
                fo.pop();
                if matches!(phi, Formula::Exists(..)) {
                    ENode::Exists(slot, Box::new(body?))
                } else {
                    ENode::Forall(slot, Box::new(body?))
                }
            }
            Formula::Gq { quant, vars, body } => {
                let q = self.reg.resolve(quant)?;
                if q.arity() != vars.len() {
                    return Err(Self::arity_error(quant, q.arity(), vars.len()));
                }
                let n = self.m.size();
                if !self.cfg.allow_non_monotone && !q.is_monotone_on(n)? {
                    return Err(Error::NotMonotone {
                        name: quant.clone(),
                        size: n,
                    });
                }
                let slots: Vec<usize> = (0..vars.len()).map(|i| self.fo_slots + i).collect();
                self.fo_slots += vars.len();
                for (v, &s) in vars.iter().zip(&slots) {
                    fo.push((v.clone(), s));
                }
                let body = self.node(body, fo, so);
                fo.truncate(fo.len() - vars.len());
                ENode::Gq(q, slots, Box::new(body?))
            }
            Formula::ExistsFn { name, arity, body } | Formula::ExistsRel { name, arity, body } => {
                let function = matches!(phi, Formula::ExistsFn { .. });
                let slot = self.new_so_slot(*arity, function)?;
                let fo_mark = self.fo_slots;
                let fo_refs_mark = self.fo_refs.len();
                let so_refs_mark = self.so_refs.len();
                so.push((name.clone(), slot));
                let mut conjuncts = Vec::new();
                flatten(body, true, &mut conjuncts);
                let mut hoisted = Vec::new();
                let mut rest = Vec::new();
                let mut failure = None;
                for c in conjuncts {
                    let before = self.so_refs.len();
                    match self.node(c, fo, so) {
                        Ok(node) => {
                            if self.so_refs[before..].contains(&slot) {
                                rest.push(node);
                            } else {
                                hoisted.push(node);
                            }
                        }
                        Err(e) => {
                            failure = Some(e);
                            break;
                        }
                    }
                }
                so.pop();
                if let Some(e) = failure {
                    return Err(e);
                }
                let mut free_fo: Vec<usize> =
                    self.fo_refs[fo_refs_mark..].iter().copied().filter(|&s| s < fo_mark).collect();
                free_fo.sort_unstable();
                free_fo.dedup();
                let mut free_so: Vec<usize> =
                    self.so_refs[so_refs_mark..].iter().copied().filter(|&s| s < slot).collect();
                free_so.sort_unstable();
                free_so.dedup();
                let id = self.so_nodes;
                self.so_nodes += 1;
                ENode::So(Box::new(SoNode {
                    id,
                    slot,
                    cells: table_cells(self.m.size(), *arity, function)?,
                    function,
                    hoisted,
                    body: rest,
                    free_fo,
                    free_so,
                }))
            }
        })
    }
}

fn table_cells(n: usize, arity: usize, function: bool) -> Result<usize> {
    let limit = if function { MAX_FUNCTION_CELLS } else { 64 };
    let count = (0..arity).fold(1u128, |acc, _| acc.saturating_mul(n as u128));
    if count > limit as u128 {
        return Err(Error::cap(format!("table of a second-order symbol of arity {arity}"), count, limit as u128));
    }
    Ok(count as usize)
}

fn flatten<'f>(phi: &'f Formula, conj: bool, out: &mut Vec<&'f Formula>) {
    match phi {
        Formula::And(a, b) if conj => {
            flatten(a, conj, out);
            flatten(b, conj, out);
        }
        Formula::Or(a, b) if !conj => {
            flatten(a, conj, out);
            flatten(b, conj, out);
        }
        other => out.push(other),
    }
}

impl<'m> EsoEvaluator<'m> {
    /// Compiles `phi`. Symbols are looked up among second-order binders, then
    /// in `interp`, then in the structure. Free first-order variables are
    /// read from the assignment given to [`EsoEvaluator::eval`].
    pub fn new(
        m: &'m Structure,
        phi: &Formula,
        interp: &Interpretation,
        reg: &QuantifierRegistry,
        cfg: &EvalConfig,
    ) -> Result<Self> {
        cfg.check_universe(m)?;
        let mut c = Compiler {
            m,
            reg,
            cfg,
            rel_names: Vec::new(),
            rels: Vec::new(),
            fun_names: Vec::new(),
            funs: Vec::new(),
            fo_slots: 0,
            so_slots: Vec::new(),
            so_nodes: 0,
            fo_refs: Vec::new(),
            so_refs: Vec::new(),
        };
        let n = m.size();
        let mut so_scope: Scope = Vec::new();
        let mut so_vals = Vec::new();
        let mut interp_slots = BTreeMap::new();
        for (name, rel) in &interp.relations {
            let slot = c.new_so_slot(rel.arity(), false)?;
            so_scope.push((name.clone(), slot));
            so_vals.push(SoVal::Rel {
                mask: rel_mask(n, rel)?,
                known: u64::MAX,
            });
            interp_slots.insert(name.clone(), (slot, rel.arity(), false));
        }
        for (name, f) in &interp.functions {
            let slot = c.new_so_slot(f.arity(), true)?;
            so_scope.push((name.clone(), slot));
            so_vals.push(SoVal::Fun(f.values().map(|v| v as u8).collect()));
            interp_slots.insert(name.clone(), (slot, f.arity(), true));
        }
        let free_vars: Vec<String> = phi.free_vars().into_iter().collect();
        let mut fo_scope: Scope = free_vars.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        c.fo_slots = free_vars.len();
        let root = c.node(phi, &mut fo_scope, &mut so_scope)?;
        so_vals.resize(c.so_slots.len(), SoVal::Rel { mask: 0, known: 0 });
        Ok(EsoEvaluator {
            root,
            free_vars,
            interp_slots,
            state: State {
                n,
                rels: c.rels,
                funs: c.funs,
                so: so_vals,
                env: vec![0; c.fo_slots],
                memo: HashMap::new(),
                steps: 0,
                cfg: cfg.clone(),
            },
        })
    }

    /// Replaces the interpretation of a symbol supplied at construction.
    /// Memoized verdicts stay valid since they are keyed by symbol values.
    pub fn set_relation(&mut self, name: &str, rel: &Relation) -> Result<()> {
        let &(slot, arity, function) = self
            .interp_slots
            .get(name)
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))?;
        if function || arity != rel.arity() {
            return Err(Error::Arity {
                symbol: name.to_string(),
                expected: arity,
                found: rel.arity(),
            });
        }
        self.state.so[slot] = SoVal::Rel {
            mask: rel_mask(self.state.n, rel)?,
            known: u64::MAX,
        };
        Ok(())
    }

    pub fn eval(&mut self, s: &Assignment) -> Result<bool> {
        self.state.steps = 0;
        for (i, v) in self.free_vars.iter().enumerate() {
            let a = s.get(v).ok_or_else(|| Error::UnboundVariable(v.clone()))?;
            if a >= self.state.n {
                return Err(Error::Precondition(format!("value {a} of `{v}` outside the universe")));
            }
            self.state.env[i] = a;
        }
        match self.state.holds(&self.root) {
            Ok(v) => Ok(v),
            Err(Halt::Fail(e)) => Err(e),
            Err(Halt::Need(..)) => unreachable!("every table entry read belongs to a binder being searched"),
        }
    }
}

fn rel_mask(n: usize, rel: &Relation) -> Result<u64> {
    let c = cells(n, rel.arity())?;
    Ok((0..c).filter(|&i| rel.contains_index(i)).fold(0, |m, i| m | 1 << i))
}

/// Interrupts evaluation: either a genuine error or a read of a table entry
/// the witness search has not fixed yet.
enum Halt {
    Need(usize, usize),
    Fail(Error),
}

impl From<Error> for Halt {
    fn from(e: Error) -> Self {
        Halt::Fail(e)
    }
}

type Step<T> = std::result::Result<T, Halt>;

impl State<'_> {
    fn index(&self, args: &[ETerm]) -> Step<usize> {
        let mut idx = 0;
        for a in args {
            idx = idx * self.n + self.term(a)?;
        }
        Ok(idx)
    }

    fn term(&self, t: &ETerm) -> Step<usize> {
        match t {
            ETerm::Var(s) => Ok(self.env[*s]),
            ETerm::Base(f, args) => Ok(self.funs[*f].apply_index(self.index(args)?)),
            ETerm::So(s, args) => {
                let idx = self.index(args)?;
                match &self.so[*s] {
                    SoVal::Fun(table) if table[idx] == UNKNOWN => Err(Halt::Need(*s, idx)),
                    SoVal::Fun(table) => Ok(table[idx] as usize),
                    SoVal::Rel { .. } => unreachable!("checked at compile time"),
                }
            }
        }
    }

    fn atom(&self, a: &EAtom) -> Step<bool> {
        match a {
            EAtom::Base(r, args) => Ok(self.rels[*r].contains_index(self.index(args)?)),
            EAtom::So(s, args) => {
                let idx = self.index(args)?;
                match &self.so[*s] {
                    SoVal::Rel { known, .. } if known & (1 << idx) == 0 => Err(Halt::Need(*s, idx)),
                    SoVal::Rel { mask, .. } => Ok(mask & (1 << idx) != 0),
                    SoVal::Fun(_) => unreachable!("checked at compile time"),
                }
            }
            EAtom::Eq(a, b) => Ok(self.term(a)? == self.term(b)?),
            EAtom::Top => Ok(true),
            EAtom::Bot => Ok(false),
        }
    }

    fn holds(&mut self, node: &ENode) -> Step<bool> {
        match node {
            ENode::Lit(neg, a) => Ok(self.atom(a)? != *neg),
            ENode::And(parts) => self.all(parts),
            ENode::Or(parts) => {
                for p in parts {
                    if self.holds(p)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            ENode::Exists(slot, body) => {
                for a in 0..self.n {
                    self.env[*slot] = a;
                    if self.holds(body)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            ENode::Forall(slot, body) => {
                for a in 0..self.n {
                    self.env[*slot] = a;
                    if !self.holds(body)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            ENode::Gq(q, slots, body) => {
                let k = slots.len();
                let total = cells(self.n, k)?;
                let mut mask = 0u64;
                for i in 0..total {
                    for (j, a) in tuple_at(self.n, k, i).into_iter().enumerate() {
                        self.env[slots[j]] = a;
                    }
                    if self.holds(body)? {
                        mask |= 1 << i;
                    }
                }
                Ok(q.accepts(self.n, mask)?)
            }
            ENode::So(so) => self.second_order(so),
        }
    }

    fn all(&mut self, parts: &[ENode]) -> Step<bool> {
        for p in parts {
            if !self.holds(p)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn memo_key(&self, so: &SoNode) -> Vec<u64> {
        let mut key = Vec::with_capacity(1 + so.free_fo.len() + so.free_so.len());
        key.push(so.id as u64);
        key.extend(so.free_fo.iter().map(|&s| self.env[s] as u64));
        for &s in &so.free_so {
            match &self.so[s] {
                SoVal::Rel { mask, known } => key.extend([*mask, *known]),
                SoVal::Fun(table) => {
                    for chunk in table.chunks(16) {
                        key.push(chunk.iter().enumerate().fold(0, |acc, (i, &v)| acc | (v as u64) << (4 * i)));
                    }
                }
            }
        }
        key
    }

    fn second_order(&mut self, so: &SoNode) -> Step<bool> {
        let key = if self.cfg.memo { Some(self.memo_key(so)) } else { None };
        if let Some(v) = key.as_ref().and_then(|k| self.memo.get(k)) {
            return Ok(*v);
        }
        if !self.all(&so.hoisted)? {
            return Ok(false);
        }
        let saved = self.so[so.slot].clone();
        self.so[so.slot] = if so.function {
            SoVal::Fun(vec![UNKNOWN; so.cells])
        } else {
            SoVal::Rel { mask: 0, known: 0 }
        };
        let verdict = self.search(so);
        self.so[so.slot] = saved;
        let verdict = verdict?;
        if let Some(k) = key {
            if self.memo.len() >= MEMO_LIMIT {
                self.memo.clear();
            }
            self.memo.insert(k, verdict);
        }
        Ok(verdict)
    }

    /// Evaluates the body against the partial table of `so`, branching on
    /// each entry the first time it is read. Entries never read are never
    /// enumerated, and a branch is abandoned as soon as the body fails on the
    /// entries fixed so far.
    fn search(&mut self, so: &SoNode) -> Step<bool> {
        self.steps += 1;
        if self.steps as u128 > self.cfg.max_witness {
            return Err(Halt::Fail(Error::cap(
                "second-order search steps",
                self.steps as u128,
                self.cfg.max_witness,
            )));
        }
        match self.all(&so.body) {
            Ok(v) => Ok(v),
            Err(Halt::Need(slot, idx)) if slot == so.slot => {
                let choices = if so.function { self.n } else { 2 };
                for v in 0..choices {
                    self.fix(slot, idx, Some(v));
                    if self.search(so)? {
                        return Ok(true);
                    }
                }
                self.fix(slot, idx, None);
                Ok(false)
            }
            Err(halt) => Err(halt),
        }
    }

    fn fix(&mut self, slot: usize, idx: usize, value: Option<usize>) {
        match &mut self.so[slot] {
            SoVal::Fun(table) => table[idx] = value.map_or(UNKNOWN, |v| v as u8),
            SoVal::Rel { mask, known } => match value {
                None => {
                    *known &= !(1 << idx);
                    *mask &= !(1 << idx);
                }
                Some(v) => {
                    *known |= 1 << idx;
                    if v == 1 {
                        *mask |= 1 << idx;
                    } else {
                        *mask &= !(1 << idx);
                    }
                }
            },
        }
    }
}
