use crate::error::{Error, Result};
use crate::syntax::Signature;

use super::{Function, Relation, Row, Structure, Team};

/// `∏_rel 2^(n^a) · ∏_fun n^(n^a)`, saturating at `u128::MAX`.
pub fn count_structures(sig: &Signature, n: usize) -> u128 {
    let pow = |b: u128, e: u128| -> u128 {
        let mut acc: u128 = 1;
        for _ in 0..e {
            acc = match acc.checked_mul(b) {
                Some(v) => v,
                None => return u128::MAX,
            };
        }
        acc
    };
    let cells = |a: usize| pow(n as u128, a as u128);
    let mut total: u128 = 1;
    for (_, a) in sig.relations() {
        total = total.saturating_mul(pow(2, cells(a)));
    }
    for (_, a) in sig.functions() {
        total = total.saturating_mul(pow(n as u128, cells(a)));
    }
    total
}

/// Number of teams over `vars` variables: `2^(n^vars)`.
pub fn count_teams(n: usize, vars: usize) -> u128 {
    let cells = (n as u128).checked_pow(vars as u32).unwrap_or(u128::MAX);
    if cells >= 128 {
        u128::MAX
    } else {
        1u128 << cells
    }
}

/// Every structure of a signature on a universe of fixed size, addressable by
/// index. Relations vary fastest in name order, then functions.
#[derive(Debug, Clone)]
pub struct StructureSpace {
    n: usize,
    relations: Vec<(String, usize, usize)>,
    functions: Vec<(String, usize, usize)>,
    count: u64,
}

impl StructureSpace {
    pub fn new(sig: &Signature, n: usize, cap: u64) -> Result<Self> {
        Structure::new(n)?;
        let count = count_structures(sig, n);
        if count > cap as u128 {
            return Err(Error::cap(format!("structures of size {n} over {sig}"), count, cap as u128));
        }
        let cells = |a: usize| n.pow(a as u32);
        Ok(StructureSpace {
            n,
            relations: sig.relations().map(|(r, a)| (r.to_string(), a, cells(a))).collect(),
            functions: sig.functions().map(|(f, a)| (f.to_string(), a, cells(a))).collect(),
            count: count as u64,
        })
    }

    pub fn len(&self) -> u64 {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// The structure with the given index (`index < len()`).
    pub fn get(&self, mut index: u64) -> Structure {
        let mut m = Structure::new(self.n).expect("size validated");
        for (name, arity, cells) in &self.relations {
            let mut rel = Relation::empty(self.n, *arity).expect("size validated");
            for i in 0..*cells {
                if index & 1 == 1 {
                    rel.insert_index(i);
                }
                index >>= 1;
            }
            m.set_relation(name, rel).expect("fresh name");
        }
        for (name, arity, cells) in &self.functions {
            let mut values = Vec::with_capacity(*cells);
            for _ in 0..*cells {
                values.push((index % self.n as u64) as usize);
                index /= self.n as u64;
            }
            let f = Function::from_values(self.n, *arity, values).expect("size validated");
            m.set_function(name, f).expect("fresh name");
        }
        m
    }

    pub fn iter(&self) -> impl Iterator<Item = Structure> + '_ {
        (0..self.count).map(move |i| self.get(i))
    }
}

/// All structures over `sig` of size `n`, deterministic order.
pub fn enumerate_structures(sig: &Signature, n: usize, cap: u64) -> Result<impl Iterator<Item = Structure>> {
    let space = StructureSpace::new(sig, n, cap)?;
    Ok((0..space.len()).map(move |i| space.get(i)))
}

/// All subteams of the full team over `vars`, including `∅`, ordered by the
/// bitmask of selected rows of [`Team::full`].
pub fn enumerate_teams(n: usize, vars: &[String], cap: u64) -> Result<impl Iterator<Item = Team>> {
    let full = Team::full(n, vars.to_vec())?;
    let count = count_teams(n, vars.len());
    if count > cap as u128 || full.len() > 63 {
        return Err(Error::cap(format!("teams over {} variables at size {n}", vars.len()), count, cap as u128));
    }
    let vars = vars.to_vec();
    let rows: Vec<Row> = full.rows().to_vec();
    Ok((0..count as u64).map(move |mask| {
        let chosen = rows
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &r)| r)
            .collect();
        Team::from_packed(vars.clone(), chosen)
    }))
}
