use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::model::{row_set, Row, Structure, Team};
use crate::quantifiers::{cells, tuple_at, QuantifierRegistry};
use crate::syntax::Formula;

use super::compile::{compile_team, Compiled, Kind, Node};
use super::{EvalConfig, ExistsMode, GqSearch, OrMode};

const MEMO_LIMIT: usize = 1 << 21;

/// Per generalized-quantifier node: candidate tuple sets, and whether the
/// quantifier is monotone.
type Witnesses = HashMap<usize, (Vec<Vec<Vec<usize>>>, bool)>;

/// A formula compiled against one structure and team domain. The memo table
/// survives across [`TeamEvaluator::eval`] calls.
pub struct TeamEvaluator<'m> {
    compiled: Compiled<'m>,
    vars: Vec<String>,
    cfg: EvalConfig,
    memo: HashMap<(usize, Vec<Row>), bool>,
    /// Candidate tuples of each generalized-quantifier node.
    witnesses: Witnesses,
}

impl<'m> TeamEvaluator<'m> {
    pub fn new(
        m: &'m Structure,
        phi: &Formula,
        vars: &[String],
        reg: &QuantifierRegistry,
        cfg: &EvalConfig,
    ) -> Result<Self> {
        cfg.check_universe(m)?;
        let compiled = compile_team(m, phi, vars, reg, cfg)?;
        if compiled.has_indep {
            if cfg.gq_search == GqSearch::Minimal {
                return Err(Error::Precondition(
                    "minimal-witness search requires a formula without independence atoms".into(),
                ));
            }
            if cfg.downward_pruning {
                return Err(Error::Precondition(
                    "downward pruning requires a formula without independence atoms".into(),
                ));
            }
        }
        Ok(TeamEvaluator {
            compiled,
            vars: vars.to_vec(),
            cfg: cfg.clone(),
            memo: HashMap::new(),
            witnesses: HashMap::new(),
        })
    }

    pub fn eval(&mut self, x: &Team) -> Result<bool> {
        if x.vars() != self.vars.as_slice() {
            return Err(Error::Precondition(format!(
                "team domain ({}) differs from the compiled domain ({})",
                x.vars().join(" "),
                self.vars.join(" ")
            )));
        }
        let mut search = Search {
            c: &self.compiled,
            cfg: &self.cfg,
            memo: &mut self.memo,
            witnesses: &mut self.witnesses,
        };
        search.sat(&self.compiled.root, x.rows())
    }
}

struct Search<'a, 'm> {
    c: &'a Compiled<'m>,
    cfg: &'a EvalConfig,
    memo: &'a mut HashMap<(usize, Vec<Row>), bool>,
    witnesses: &'a mut Witnesses,
}

fn normalized(rows: &[Row]) -> Vec<Row> {
    let mut v = rows.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Rows that agree outside `slots` extend to the same rows, so each group
/// is replaced by one representative (slots cleared) and its size.
fn merge_rebound(rows: &[Row], slots: &[usize]) -> Vec<(Row, usize)> {
    let mut groups: BTreeMap<Row, usize> = BTreeMap::new();
    for &r in rows {
        *groups.entry(slots.iter().fold(r, |row, &j| row_set(row, j, 0))).or_insert(0) += 1;
    }
    groups.into_iter().collect()
}

/// Nonempty subsets of `0..n` with at most `max` elements, as 1-tuples,
/// smallest first.
fn value_sets(n: usize, max: usize) -> Vec<Vec<Vec<usize>>> {
    let mut sets: Vec<Vec<Vec<usize>>> = (1u64..(1 << n))
        .filter(|m| m.count_ones() as usize <= max)
        .map(|m| (0..n).filter(|a| m & (1 << a) != 0).map(|a| vec![a]).collect())
        .collect();
    sets.sort_by_key(Vec::len);
    sets
}

fn pow_sat(base: u128, exp: usize) -> u128 {
    (0..exp).fold(1u128, |acc, _| acc.saturating_mul(base))
}

impl Search<'_, '_> {
    fn check_witnesses(&self, what: &str, count: u128) -> Result<()> {
        if count > self.cfg.max_witness {
            return Err(Error::cap(what, count, self.cfg.max_witness));
        }
        Ok(())
    }

    fn check_team(&self, len: usize) -> Result<()> {
        if len > self.cfg.max_team {
            return Err(Error::cap("team size", len as u128, self.cfg.max_team as u128));
        }
        Ok(())
    }

    fn sat(&mut self, node: &Node, rows: &[Row]) -> Result<bool> {
        let c = self.c;
        match &node.kind {
            Kind::Lit { negated, atom } => Ok(rows.iter().all(|&r| c.atom(atom, r) != *negated)),
            Kind::Dep(ts) => {
                let (args, last) = ts.split_at(ts.len() - 1);
                let mut seen: HashMap<u64, usize> = HashMap::with_capacity(rows.len());
                for &r in rows {
                    let v = c.term(&last[0], r);
                    if *seen.entry(c.pack(args, r)).or_insert(v) != v {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Kind::NegDep => Ok(rows.is_empty()),
            Kind::Indep { left, cond, right } => {
                let triples: HashSet<(u64, u64, u64)> =
                    rows.iter().map(|&r| (c.pack(cond, r), c.pack(left, r), c.pack(right, r))).collect();
                let mut groups: HashMap<u64, (HashSet<u64>, HashSet<u64>)> = HashMap::new();
                for &(cv, lv, rv) in &triples {
                    let g = groups.entry(cv).or_default();
                    g.0.insert(lv);
                    g.1.insert(rv);
                }
                Ok(groups
                    .iter()
                    .all(|(cv, (ls, rs))| ls.iter().all(|lv| rs.iter().all(|rv| triples.contains(&(*cv, *lv, *rv))))))
            }
            Kind::And(a, b) => Ok(self.sat(a, rows)? && self.sat(b, rows)?),
            _ => {
                self.check_team(rows.len())?;
                if !self.cfg.memo {
                    return self.search(node, rows);
                }
                let key = (node.id, rows.to_vec());
                if let Some(&v) = self.memo.get(&key) {
                    return Ok(v);
                }
                let v = self.search(node, rows)?;
                if self.memo.len() >= MEMO_LIMIT {
                    self.memo.clear();
                }
                self.memo.insert(key, v);
                Ok(v)
            }
        }
    }

    fn search(&mut self, node: &Node, rows: &[Row]) -> Result<bool> {
        match &node.kind {
            Kind::Or(a, b) => self.disjunction(a, b, rows),
            Kind::Exists(slot, body) => {
                let n = self.c.n;
                let groups = merge_rebound(rows, &[*slot]);
                // a group of g rows reaches exactly the value sets of size at
                // most g (paper mode) or any nonempty value set (lax mode)
                let cap = match self.cfg.exists_mode {
                    ExistsMode::Paper => |g: usize| g,
                    ExistsMode::Lax => |_: usize| usize::MAX,
                };
                let by_size: Vec<Vec<Vec<Vec<usize>>>> = (1..=n).map(|g| value_sets(n, cap(g))).collect();
                let bases: Vec<Row> = groups.iter().map(|&(r, _)| r).collect();
                let options: Vec<&[Vec<Vec<usize>>]> =
                    groups.iter().map(|&(_, g)| by_size[g.min(n) - 1].as_slice()).collect();
                self.check_witnesses(
                    "choice functions for an existential",
                    options.iter().fold(1u128, |acc, o| acc.saturating_mul(o.len() as u128)),
                )?;
                self.choose(body, &bases, &[*slot], &options)
            }
            Kind::Forall(slot, body) => {
                let n = self.c.n;
                let ext: Vec<Row> = rows.iter().flat_map(|&r| (0..n).map(move |a| row_set(r, *slot, a))).collect();
                let ext = normalized(&ext);
                self.check_team(ext.len())?;
                self.sat(body, &ext)
            }
            Kind::Gq { quant, slots, body } => {
                let n = self.c.n;
                if !self.witnesses.contains_key(&node.id) {
                    let masks = match self.cfg.gq_search {
                        GqSearch::Full => quant.members(n)?,
                        GqSearch::Minimal => quant.minimal_members(n)?,
                    };
                    let k = quant.arity();
                    let c = cells(n, k)?;
                    let options: Vec<Vec<Vec<usize>>> = masks
                        .iter()
                        .map(|&mask| (0..c).filter(|i| mask & (1 << i) != 0).map(|i| tuple_at(n, k, i)).collect())
                        .collect();
                    self.witnesses.insert(node.id, (options, quant.is_monotone_on(n)?));
                }
                let (options, monotone) = self.witnesses[&node.id].clone();
                // under an upward closed family a union of members is a
                // member, so rows that extend identically act as one
                let bases: Vec<Row> = if monotone {
                    merge_rebound(rows, slots).into_iter().map(|(r, _)| r).collect()
                } else {
                    rows.to_vec()
                };
                self.check_witnesses(
                    &format!("set functions into `{}`", quant.name()),
                    pow_sat(options.len() as u128, bases.len()),
                )?;
                let per_row = vec![options.as_slice(); bases.len()];
                self.choose(body, &bases, slots, &per_row)
            }
            _ => unreachable!("atomic nodes are decided in sat"),
        }
    }

    /// Is there a map sending row `i` to one of `options[i]` (sets of value
    /// tuples for `slots`) whose induced team satisfies `body`?
    fn choose(&mut self, body: &Node, rows: &[Row], slots: &[usize], options: &[&[Vec<Vec<usize>>]]) -> Result<bool> {
        let mut chosen: Vec<Row> = Vec::new();
        if self.cfg.downward_pruning && !self.sat(body, &[])? {
            return Ok(false);
        }
        self.choose_from(body, rows, 0, slots, options, &mut chosen)
    }

    fn choose_from(
        &mut self,
        body: &Node,
        rows: &[Row],
        i: usize,
        slots: &[usize],
        options: &[&[Vec<Vec<usize>>]],
        chosen: &mut Vec<Row>,
    ) -> Result<bool> {
        if i == rows.len() {
            if self.cfg.downward_pruning {
                // the last extension was already checked
                return Ok(true);
            }
            let team = normalized(chosen);
            self.check_team(team.len())?;
            return self.sat(body, &team);
        }
        let base = rows[i];
        for opt in options[i] {
            let before = chosen.len();
            for tuple in opt {
                chosen.push(slots.iter().zip(tuple).fold(base, |row, (&j, &a)| row_set(row, j, a)));
            }
            let keep = if self.cfg.downward_pruning {
                let team = normalized(chosen);
                self.check_team(team.len())?;
                self.sat(body, &team)?
            } else {
                true
            };
            if keep && self.choose_from(body, rows, i + 1, slots, options, chosen)? {
                return Ok(true);
            }
            chosen.truncate(before);
        }
        Ok(false)
    }

    fn disjunction(&mut self, a: &Node, b: &Node, rows: &[Row]) -> Result<bool> {
        // `¬dep` only holds of the empty team, so the other side gets everything
        if matches!(a.kind, Kind::NegDep) {
            return self.sat(b, rows);
        }
        if matches!(b.kind, Kind::NegDep) {
            return self.sat(a, rows);
        }
        if self.cfg.downward_pruning {
            return self.downward_disjunction(a, b, rows);
        }
        let m = rows.len();
        if m > 24 {
            return Err(Error::cap("rows split by a disjunction", m as u128, 24));
        }
        let strict = self.cfg.or_mode == OrMode::Strict;
        let count = if strict || self.cfg.downward_pruning {
            pow_sat(2, m)
        } else {
            pow_sat(3, m)
        };
        self.check_witnesses("covers for a disjunction", count)?;
        let full: u64 = (1u64 << m) - 1;
        let sub = |mask: u64| -> Vec<Row> {
            rows.iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &r)| r)
                .collect()
        };
        let mut left: HashMap<u64, bool> = HashMap::new();
        let mut right: HashMap<u64, bool> = HashMap::new();
        let mut order: Vec<u64> = (0..=full).collect();
        order.sort_by_key(|y| y.count_ones());
        for y in order {
            let ok = match left.get(&y) {
                Some(&v) => v,
                None => {
                    let v = self.sat(a, &sub(y))?;
                    left.insert(y, v);
                    v
                }
            };
            if !ok {
                continue;
            }
            let comp = full & !y;
            // Z ranges over comp ∪ S for S ⊆ Y; under downward closure comp suffices
            let mut s = if strict || self.cfg.downward_pruning { 0 } else { y };
            loop {
                let z = comp | s;
                let v = match right.get(&z) {
                    Some(&v) => v,
                    None => {
                        let v = self.sat(b, &sub(z))?;
                        right.insert(z, v);
                        v
                    }
                };
                if v {
                    return Ok(true);
                }
                if s == 0 {
                    break;
                }
                s = (s - 1) & y;
            }
        }
        Ok(false)
    }

    /// The disjunction clause for downward-closed sides: a literal side takes
    /// every row it accepts, otherwise rows are dealt to either side one at a
    /// time and a branch dies as soon as its partial side fails.
    fn downward_disjunction(&mut self, a: &Node, b: &Node, rows: &[Row]) -> Result<bool> {
        for (lit, other) in [(a, b), (b, a)] {
            if let Kind::Lit { negated, atom } = &lit.kind {
                let c = self.c;
                let rest: Vec<Row> = rows.iter().copied().filter(|&r| c.atom(atom, r) == *negated).collect();
                return self.sat(other, &rest);
            }
        }
        self.deal(a, b, rows, &mut Vec::new(), &mut Vec::new())
    }

    fn deal(&mut self, a: &Node, b: &Node, rows: &[Row], left: &mut Vec<Row>, right: &mut Vec<Row>) -> Result<bool> {
        let Some((&r, rest)) = rows.split_first() else {
            return Ok(true);
        };
        // rows arrive sorted, so both sides stay sorted
        left.push(r);
        if self.sat(a, left)? && self.deal(a, b, rest, left, right)? {
            return Ok(true);
        }
        left.pop();
        right.push(r);
        if self.sat(b, right)? && self.deal(a, b, rest, left, right)? {
            return Ok(true);
        }
        right.pop();
        Ok(false)
    }
}
