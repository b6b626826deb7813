//! Finite structures, assignments and teams.

mod enumerate;
mod io;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::syntax::{Signature, Term};

pub use enumerate::{count_structures, count_teams, enumerate_structures, enumerate_teams, StructureSpace};
pub use io::{parse_structure, parse_team};

/// Largest universe a team row can hold (4 bits per value).
pub const MAX_UNIVERSE: usize = 15;
/// Largest team domain (16 values per packed row).
pub const MAX_TEAM_VARS: usize = 16;
/// Largest number of tuples a single relation or function table may cover.
pub const MAX_TABLE: usize = 1 << 20;

fn table_len(n: usize, arity: usize) -> Result<usize> {
    let len = (n as u128).checked_pow(arity as u32).unwrap_or(u128::MAX);
    if len > MAX_TABLE as u128 {
        return Err(Error::cap(format!("table of arity {arity} over {n} elements"), len, MAX_TABLE as u128));
    }
    Ok(len as usize)
}

fn index_of(n: usize, tuple: &[usize]) -> usize {
    tuple.iter().fold(0, |acc, &a| acc * n + a)
}

/// A relation as a bitset over the lexicographically ordered tuples of `M^k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    arity: usize,
    bits: Vec<u64>,
}

impl Relation {
    pub fn empty(n: usize, arity: usize) -> Result<Self> {
        let len = table_len(n, arity)?;
        Ok(Relation {
            arity,
            bits: vec![0; len.div_ceil(64).max(1)],
        })
    }

    pub fn from_tuples<'a>(n: usize, arity: usize, tuples: impl IntoIterator<Item = &'a [usize]>) -> Result<Self> {
        let mut r = Relation::empty(n, arity)?;
        for t in tuples {
            if t.len() != arity {
                return Err(Error::Arity {
                    symbol: "tuple".into(),
                    expected: arity,
                    found: t.len(),
                });
            }
            if let Some(&bad) = t.iter().find(|&&a| a >= n) {
                return Err(Error::Precondition(format!("element {bad} outside universe of size {n}")));
            }
            r.insert_index(index_of(n, t));
        }
        Ok(r)
    }

    /// Builds a relation whose tuples are the set bits of `mask` (requires `n^k ≤ 64`).
    pub fn from_mask(n: usize, arity: usize, mask: u64) -> Result<Self> {
        let mut r = Relation::empty(n, arity)?;
        let len = table_len(n, arity)?;
        let keep = if len >= 64 { u64::MAX } else { (1u64 << len) - 1 };
        r.bits[0] = mask & keep;
        Ok(r)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn contains_index(&self, idx: usize) -> bool {
        self.bits[idx / 64] & (1 << (idx % 64)) != 0
    }

    pub fn contains(&self, n: usize, tuple: &[usize]) -> bool {
        self.contains_index(index_of(n, tuple))
    }

    pub fn insert_index(&mut self, idx: usize) {
        self.bits[idx / 64] |= 1 << (idx % 64);
    }

    /// The tuples, lexicographically.
    pub fn tuples(&self, n: usize) -> Vec<Vec<usize>> {
        let len = n.pow(self.arity as u32);
        (0..len)
            .filter(|&i| self.contains_index(i))
            .map(|i| crate::quantifiers::tuple_at(n, self.arity, i))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }
}

/// A total function table over the lexicographically ordered tuples of `M^k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Function {
    arity: usize,
    table: Vec<u8>,
}

impl Function {
    pub fn constant_table(n: usize, arity: usize, value: usize) -> Result<Self> {
        let len = table_len(n, arity)?;
        if value >= n {
            return Err(Error::Precondition(format!("element {value} outside universe of size {n}")));
        }
        Ok(Function {
            arity,
            table: vec![value as u8; len],
        })
    }

    /// `values[i]` is the image of the `i`-th tuple in lexicographic order.
    pub fn from_values(n: usize, arity: usize, values: Vec<usize>) -> Result<Self> {
        let len = table_len(n, arity)?;
        if values.len() != len {
            return Err(Error::Precondition(format!(
                "function table of arity {arity} needs {len} entries, found {}",
                values.len()
            )));
        }
        if let Some(&bad) = values.iter().find(|&&v| v >= n) {
            return Err(Error::Precondition(format!("element {bad} outside universe of size {n}")));
        }
        Ok(Function {
            arity,
            table: values.into_iter().map(|v| v as u8).collect(),
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn apply_index(&self, idx: usize) -> usize {
        self.table[idx] as usize
    }

    pub fn apply(&self, n: usize, args: &[usize]) -> usize {
        self.apply_index(index_of(n, args))
    }

    pub fn values(&self) -> impl Iterator<Item = usize> + '_ {
        self.table.iter().map(|&v| v as usize)
    }
}

/// A finite structure over the universe `{0, …, n−1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Structure {
    n: usize,
    relations: BTreeMap<String, Relation>,
    functions: BTreeMap<String, Function>,
}

impl Structure {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_UNIVERSE {
            return Err(Error::Precondition(format!(
                "universe size must be between 1 and {MAX_UNIVERSE}, found {n}"
            )));
        }
        Ok(Structure {
            n,
            relations: BTreeMap::new(),
            functions: BTreeMap::new(),
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    fn check_name(&self, name: &str, relation: bool) -> Result<()> {
        let clash = if relation {
            self.functions.contains_key(name)
        } else {
            self.relations.contains_key(name)
        };
        if clash {
            return Err(Error::Precondition(format!("`{name}` is declared both as relation and function")));
        }
        Ok(())
    }

    pub fn set_relation(&mut self, name: &str, rel: Relation) -> Result<()> {
        self.check_name(name, true)?;
        self.relations.insert(name.to_string(), rel);
        Ok(())
    }

    pub fn set_function(&mut self, name: &str, f: Function) -> Result<()> {
        self.check_name(name, false)?;
        self.functions.insert(name.to_string(), f);
        Ok(())
    }

    /// Adds a relation given by its tuples.
    pub fn with_relation(mut self, name: &str, arity: usize, tuples: &[&[usize]]) -> Result<Self> {
        let rel = Relation::from_tuples(self.n, arity, tuples.iter().copied())?;
        self.set_relation(name, rel)?;
        Ok(self)
    }

    /// Adds a function given by its value table in lexicographic argument order.
    pub fn with_function(mut self, name: &str, arity: usize, values: Vec<usize>) -> Result<Self> {
        let f = Function::from_values(self.n, arity, values)?;
        self.set_function(name, f)?;
        Ok(self)
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.get(name)
    }

    pub fn function(&self, name: &str) -> Option<&Function> {
        self.functions.get(name)
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, &Relation)> {
        self.relations.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn functions(&self) -> impl Iterator<Item = (&str, &Function)> {
        self.functions.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn signature(&self) -> Signature {
        let mut sig = Signature::new();
        for (r, rel) in &self.relations {
            sig.add_relation(r, rel.arity).expect("names are disjoint");
        }
        for (f, fun) in &self.functions {
            sig.add_function(f, fun.arity).expect("names are disjoint");
        }
        sig
    }

    /// `t^{M,s}`.
    pub fn term_value(&self, s: &Assignment, t: &Term) -> Result<usize> {
        match t {
            Term::Var(v) => s.get(v).ok_or_else(|| Error::UnboundVariable(v.clone())),
            Term::App(f, args) => {
                let fun = self.function(f).ok_or_else(|| Error::UnknownSymbol(f.clone()))?;
                if fun.arity != args.len() {
                    return Err(Error::Arity {
                        symbol: f.clone(),
                        expected: fun.arity,
                        found: args.len(),
                    });
                }
                let mut idx = 0;
                for a in args {
                    idx = idx * self.n + self.term_value(s, a)?;
                }
                Ok(fun.apply_index(idx))
            }
        }
    }

    /// Checks that every symbol of `sig` is interpreted with the right arity.
    pub fn covers(&self, sig: &Signature) -> Result<()> {
        for (r, a) in sig.relations() {
            let rel = self.relation(r).ok_or_else(|| Error::UnknownSymbol(r.to_string()))?;
            if rel.arity != a {
                return Err(Error::Arity {
                    symbol: r.to_string(),
                    expected: a,
                    found: rel.arity,
                });
            }
        }
        for (f, a) in sig.functions() {
            let fun = self.function(f).ok_or_else(|| Error::UnknownSymbol(f.to_string()))?;
            if fun.arity != a {
                return Err(Error::Arity {
                    symbol: f.to_string(),
                    expected: a,
                    found: fun.arity,
                });
            }
        }
        Ok(())
    }
}

/// A finite map from variables to universe elements.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(BTreeMap<String, usize>);

impl Assignment {
    /// The empty assignment ε.
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn get(&self, v: &str) -> Option<usize> {
        self.0.get(v).copied()
    }

    pub fn set(&mut self, v: impl Into<String>, a: usize) {
        self.0.insert(v.into(), a);
    }

    /// `s[a/v]`.
    pub fn with(&self, v: impl Into<String>, a: usize) -> Self {
        let mut s = self.clone();
        s.set(v, a);
        s
    }

    pub fn domain(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

impl<S: Into<String>> FromIterator<(S, usize)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (S, usize)>>(iter: I) -> Self {
        Assignment(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

// ---------- teams ----------

/// A packed assignment row: the value of slot `j` sits in bits `4j..4j+4`.
pub type Row = u64;

#[inline]
pub fn row_get(row: Row, slot: usize) -> usize {
    ((row >> (4 * slot)) & 0xF) as usize
}

#[inline]
pub fn row_set(row: Row, slot: usize, value: usize) -> Row {
    (row & !(0xF << (4 * slot))) | ((value as u64) << (4 * slot))
}

/// A set of assignments over a shared ordered variable domain.
///
/// Rows are kept sorted and deduplicated. `{ε}` (no variables, one row) and
/// `∅` (no rows) are distinct values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Team {
    vars: Vec<String>,
    rows: Vec<Row>,
}

impl Team {
    fn check_vars(vars: &[String]) -> Result<()> {
        if vars.len() > MAX_TEAM_VARS {
            return Err(Error::cap("team domain size", vars.len() as u128, MAX_TEAM_VARS as u128));
        }
        let distinct: BTreeSet<&String> = vars.iter().collect();
        if distinct.len() != vars.len() {
            return Err(Error::Precondition("team variables must be distinct".into()));
        }
        Ok(())
    }

    /// Builds a team from explicit rows, each listing values in `vars` order.
    pub fn new(vars: Vec<String>, rows: &[Vec<usize>]) -> Result<Self> {
        Self::check_vars(&vars)?;
        let mut packed = Vec::with_capacity(rows.len());
        for r in rows {
            if r.len() != vars.len() {
                return Err(Error::Precondition(format!(
                    "row of length {} in a team over {} variables",
                    r.len(),
                    vars.len()
                )));
            }
            if let Some(&bad) = r.iter().find(|&&v| v > MAX_UNIVERSE) {
                return Err(Error::Precondition(format!("value {bad} exceeds the largest supported element")));
            }
            packed.push(r.iter().enumerate().fold(0, |row, (j, &v)| row_set(row, j, v)));
        }
        Ok(Team::from_packed(vars, packed))
    }

    /// Builds a team from packed rows; sorts and deduplicates.
    pub fn from_packed(vars: Vec<String>, mut rows: Vec<Row>) -> Self {
        rows.sort_unstable();
        rows.dedup();
        Team { vars, rows }
    }

    pub fn empty(vars: Vec<String>) -> Self {
        Team { vars, rows: Vec::new() }
    }

    /// `{ε}`.
    pub fn unit() -> Self {
        Team {
            vars: Vec::new(),
            rows: vec![0],
        }
    }

    /// All `n^|vars|` assignments.
    pub fn full(n: usize, vars: Vec<String>) -> Result<Self> {
        Self::check_vars(&vars)?;
        let mut rows = vec![0];
        for slot in 0..vars.len() {
            rows = rows
                .into_iter()
                .flat_map(|r| (0..n).map(move |a| row_set(r, slot, a)))
                .collect();
        }
        Ok(Team::from_packed(vars, rows))
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn slot(&self, var: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == var)
    }

    pub fn row_values(&self, row: Row) -> Vec<usize> {
        (0..self.vars.len()).map(|j| row_get(row, j)).collect()
    }

    pub fn assignment(&self, row: Row) -> Assignment {
        self.vars.iter().enumerate().map(|(j, v)| (v.clone(), row_get(row, j))).collect()
    }

    pub fn assignments(&self) -> Vec<Assignment> {
        self.rows.iter().map(|&r| self.assignment(r)).collect()
    }

    /// The subteam of rows whose index bit is set in `mask`.
    pub fn subteam(&self, mask: u64) -> Team {
        Team {
            vars: self.vars.clone(),
            rows: self
                .rows
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &r)| r)
                .collect(),
        }
    }

    pub fn is_subteam_of(&self, other: &Team) -> bool {
        self.vars == other.vars && self.rows.iter().all(|r| other.rows.binary_search(r).is_ok())
    }

    /// Slot for `y`, appending it to the domain when new.
    fn slot_for(&self, y: &str) -> Result<(Vec<String>, usize)> {
        let mut vars = self.vars.clone();
        let slot = match self.slot(y) {
            Some(j) => j,
            None => {
                vars.push(y.to_string());
                Self::check_vars(&vars)?;
                vars.len() - 1
            }
        };
        Ok((vars, slot))
    }

    /// `X[M/y]`.
    pub fn extend_universal(&self, n: usize, y: &str) -> Result<Team> {
        let (vars, slot) = self.slot_for(y)?;
        let rows = self
            .rows
            .iter()
            .flat_map(|&r| (0..n).map(move |a| row_set(r, slot, a)))
            .collect();
        Ok(Team::from_packed(vars, rows))
    }

    /// `X[f/y]`; `f` must be defined on every assignment.
    pub fn extend_function(&self, y: &str, f: impl Fn(&Assignment) -> Option<usize>) -> Result<Team> {
        let (vars, slot) = self.slot_for(y)?;
        let mut rows = Vec::with_capacity(self.rows.len());
        for &r in &self.rows {
            let s = self.assignment(r);
            let a = f(&s).ok_or_else(|| Error::Precondition(format!("choice function undefined on {s}")))?;
            rows.push(row_set(r, slot, a));
        }
        Ok(Team::from_packed(vars, rows))
    }

    /// `X[F/x̄] = {s[ā/x̄] | s ∈ X, ā ∈ F(s)}`.
    pub fn extend_set_function(
        &self,
        xs: &[String],
        f: impl Fn(&Assignment) -> Option<Vec<Vec<usize>>>,
    ) -> Result<Team> {
        let mut vars = self.vars.clone();
        let mut slots = Vec::with_capacity(xs.len());
        for x in xs {
            let slot = match vars.iter().position(|v| v == x) {
                Some(j) => j,
                None => {
                    vars.push(x.clone());
                    vars.len() - 1
                }
            };
            slots.push(slot);
        }
        Self::check_vars(&vars)?;
        let mut rows = Vec::new();
        for &r in &self.rows {
            let s = self.assignment(r);
            let tuples = f(&s).ok_or_else(|| Error::Precondition(format!("set function undefined on {s}")))?;
            for t in tuples {
                if t.len() != xs.len() {
                    return Err(Error::Arity {
                        symbol: "tuple".into(),
                        expected: xs.len(),
                        found: t.len(),
                    });
                }
                rows.push(slots.iter().zip(&t).fold(r, |row, (&j, &a)| row_set(row, j, a)));
            }
        }
        Ok(Team::from_packed(vars, rows))
    }

    /// `{s ↾ keep | s ∈ X}`, keeping the domain order of `X`.
    pub fn restrict<S: AsRef<str>>(&self, keep: &[S]) -> Result<Team> {
        let keep: BTreeSet<&str> = keep.iter().map(AsRef::as_ref).collect();
        if let Some(missing) = keep.iter().find(|v| self.slot(v).is_none()) {
            return Err(Error::Precondition(format!("`{missing}` is not in the team domain")));
        }
        let slots: Vec<usize> = (0..self.vars.len()).filter(|&j| keep.contains(self.vars[j].as_str())).collect();
        let vars = slots.iter().map(|&j| self.vars[j].clone()).collect();
        let rows = self
            .rows
            .iter()
            .map(|&r| slots.iter().enumerate().fold(0, |row, (i, &j)| row_set(row, i, row_get(r, j))))
            .collect();
        Ok(Team::from_packed(vars, rows))
    }

    /// Reorders the domain to `order`, which must be a permutation of it.
    pub fn reorder<S: AsRef<str>>(&self, order: &[S]) -> Result<Team> {
        if order.len() != self.vars.len() {
            return Err(Error::Precondition("reordering must list every team variable once".into()));
        }
        let slots = order
            .iter()
            .map(|v| {
                self.slot(v.as_ref())
                    .ok_or_else(|| Error::Precondition(format!("`{}` is not in the team domain", v.as_ref())))
            })
            .collect::<Result<Vec<_>>>()?;
        let vars: Vec<String> = order.iter().map(|v| v.as_ref().to_string()).collect();
        Self::check_vars(&vars)?;
        let rows = self
            .rows
            .iter()
            .map(|&r| slots.iter().enumerate().fold(0, |row, (i, &j)| row_set(row, i, row_get(r, j))))
            .collect();
        Ok(Team::from_packed(vars, rows))
    }

    /// `rel(X)` in domain order.
    pub fn team_rel(&self) -> BTreeSet<Vec<usize>> {
        self.rows.iter().map(|&r| self.row_values(r)).collect()
    }

    /// `rel(X)` as a [`Relation`] over a universe of size `n`.
    pub fn relation(&self, n: usize) -> Result<Relation> {
        let tuples = self.team_rel();
        Relation::from_tuples(n, self.vars.len(), tuples.iter().map(Vec::as_slice))
    }

    /// Largest value occurring in any row, if any.
    pub fn max_value(&self) -> Option<usize> {
        self.rows.iter().flat_map(|&r| self.row_values(r)).max()
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}->{v}")).collect();
        write!(f, "{{{}}}", items.join(", "))
    }
}

impl fmt::Display for Team {
    /// The team file format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "vars")?;
        for v in &self.vars {
            write!(f, " {v}")?;
        }
        writeln!(f)?;
        if self.vars.is_empty() {
            if !self.rows.is_empty() {
                writeln!(f, "eps")?;
            }
            return Ok(());
        }
        for row in self.team_rel() {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Display for Structure {
    /// The structure file format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "universe {}", self.n)?;
        for (name, rel) in &self.relations {
            let items: Vec<String> = rel
                .tuples(self.n)
                .into_iter()
                .map(|t| {
                    if rel.arity == 1 {
                        t[0].to_string()
                    } else {
                        format!("({})", t.iter().map(ToString::to_string).collect::<Vec<_>>().join(","))
                    }
                })
                .collect();
            writeln!(f, "rel {name}/{} = {{{}}}", rel.arity, items.join(", "))?;
        }
        for (name, fun) in &self.functions {
            let len = self.n.pow(fun.arity as u32);
            let items: Vec<String> = (0..len)
                .map(|i| {
                    let args = crate::quantifiers::tuple_at(self.n, fun.arity, i);
                    let lhs = match fun.arity {
                        0 => "()".to_string(),
                        1 => args[0].to_string(),
                        _ => format!("({})", args.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")),
                    };
                    format!("{lhs}->{}", fun.apply_index(i))
                })
                .collect();
            writeln!(f, "fun {name}/{} = {{{}}}", fun.arity, items.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn team(v: &[&str], rows: &[&[usize]]) -> Team {
        Team::new(vars(v), &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn term_values() {
        let m = Structure::new(3)
            .unwrap()
            .with_function("f", 1, vec![1, 0, 2])
            .unwrap()
            .with_function("c", 0, vec![2])
            .unwrap();
        let s: Assignment = [("x", 1)].into_iter().collect();
        assert_eq!(m.term_value(&s, &Term::var("x")).unwrap(), 1);
        let s0: Assignment = [("x", 0)].into_iter().collect();
        assert_eq!(m.term_value(&s0, &Term::app("f", vec![Term::var("x")])).unwrap(), 1);
        assert_eq!(m.term_value(&s0, &Term::app("c", vec![])).unwrap(), 2);
        assert!(matches!(
            m.term_value(&Assignment::empty(), &Term::var("y")),
            Err(Error::UnboundVariable(_))
        ));
    }

    #[test]
    fn universal_extension() {
        let t = Team::unit().extend_universal(2, "y").unwrap();
        assert_eq!(t, team(&["y"], &[&[0], &[1]]));
        assert!(Team::empty(vec![]).extend_universal(2, "y").unwrap().is_empty());
        let t = team(&["x"], &[&[0]]).extend_universal(2, "y").unwrap();
        assert_eq!(t.team_rel(), BTreeSet::from([vec![0, 0], vec![0, 1]]));
    }

    #[test]
    fn function_extension() {
        let x = team(&["x"], &[&[0], &[1]]);
        let t = x.extend_function("y", |_| Some(0)).unwrap();
        assert_eq!(t.team_rel(), BTreeSet::from([vec![0, 0], vec![1, 0]]));
        let t = x.extend_function("y", |s| s.get("x")).unwrap();
        assert_eq!(t.team_rel(), BTreeSet::from([vec![0, 0], vec![1, 1]]));
        assert!(x.extend_function("y", |_| None).is_err());
        assert!(Team::empty(vars(&["x"])).extend_function("y", |_| Some(0)).unwrap().is_empty());
        // rebinding an existing variable
        let t = x.extend_function("x", |_| Some(1)).unwrap();
        assert_eq!(t, team(&["x"], &[&[1]]));
    }

    #[test]
    fn set_function_extension() {
        let one = Team::unit();
        let t = one
            .extend_set_function(&vars(&["x"]), |_| Some(vec![vec![0], vec![1]]))
            .unwrap();
        assert_eq!(t.len(), 2);
        let x = team(&["z"], &[&[0], &[1]]);
        let t = x
            .extend_set_function(&vars(&["x"]), |s| {
                Some(if s.get("z") == Some(0) { vec![vec![0]] } else { vec![vec![0], vec![1]] })
            })
            .unwrap();
        // rows (0,0), (1,0), (1,1)
        assert_eq!(t.len(), 3);
        assert!(x.extend_set_function(&vars(&["x"]), |_| Some(vec![])).unwrap().is_empty());
        assert!(x.extend_set_function(&vars(&["x"]), |_| Some(vec![vec![0, 1]])).is_err());
    }

    #[test]
    fn restriction() {
        let x = team(&["x", "y"], &[&[0, 0], &[0, 1]]);
        assert_eq!(x.restrict(&["x"]).unwrap(), team(&["x"], &[&[0]]));
        assert_eq!(x.restrict(&["x", "y"]).unwrap(), x);
        let no: [&str; 0] = [];
        assert_eq!(Team::unit().restrict(&no).unwrap(), Team::unit());
        assert_eq!(x.restrict(&no).unwrap(), Team::unit());
        assert!(x.restrict(&["z"]).is_err());
    }

    #[test]
    fn relation_of_team() {
        let x = team(&["x", "y"], &[&[0, 1], &[1, 1]]);
        assert_eq!(x.team_rel(), BTreeSet::from([vec![0, 1], vec![1, 1]]));
        assert_eq!(Team::unit().team_rel(), BTreeSet::from([vec![]]));
        assert!(Team::empty(vars(&["x"])).team_rel().is_empty());
        let one = team(&["x"], &[&[1]]).extend_universal(2, "y").unwrap();
        assert_eq!(one.team_rel(), BTreeSet::from([vec![1, 0], vec![1, 1]]));
    }

    #[test]
    fn unit_and_empty_differ() {
        assert_ne!(Team::unit(), Team::empty(vec![]));
        assert_eq!(Team::unit().len(), 1);
    }

    #[test]
    fn reordering() {
        let x = team(&["x", "y"], &[&[0, 1]]);
        let r = x.reorder(&["y", "x"]).unwrap();
        assert_eq!(r.team_rel(), BTreeSet::from([vec![1, 0]]));
    }

    #[test]
    fn team_display() {
        assert_eq!(Team::unit().to_string(), "vars\neps\n");
        assert_eq!(Team::empty(vec![]).to_string(), "vars\n");
        assert_eq!(team(&["x", "y"], &[&[1, 0], &[0, 1]]).to_string(), "vars x y\n0 1\n1 0\n");
    }
}
