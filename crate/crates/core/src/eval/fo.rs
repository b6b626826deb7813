use crate::error::{Error, Result};
use crate::model::{row_set, Row, Structure};
use crate::quantifiers::{cells, tuple_at};

use super::compile::{Compiled, Kind, Node};

/// Single-assignment semantics over a compiled formula.
pub(crate) struct FoEvaluator<'a, 'm> {
    c: &'a Compiled<'m>,
}

impl<'a, 'm> FoEvaluator<'a, 'm> {
    pub fn new(_m: &Structure, c: &'a Compiled<'m>) -> Self {
        FoEvaluator { c }
    }

    pub fn holds(&self, node: &Node, row: Row) -> Result<bool> {
        let c = self.c;
        match &node.kind {
            Kind::Lit { negated, atom } => Ok(c.atom(atom, row) != *negated),
            Kind::Dep(_) | Kind::NegDep | Kind::Indep { .. } => Err(Error::Dialect {
                dialect: "FO(Q)",
                construct: "team atom".into(),
            }),
            Kind::And(a, b) => Ok(self.holds(a, row)? && self.holds(b, row)?),
            Kind::Or(a, b) => Ok(self.holds(a, row)? || self.holds(b, row)?),
            Kind::Exists(slot, body) => {
                for a in 0..c.n {
                    if self.holds(body, row_set(row, *slot, a))? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Kind::Forall(slot, body) => {
                for a in 0..c.n {
                    if !self.holds(body, row_set(row, *slot, a))? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Kind::Gq { quant, slots, body } => {
                let k = slots.len();
                let total = cells(c.n, k)?;
                let mut mask = 0u64;
                for i in 0..total {
                    let tuple = tuple_at(c.n, k, i);
                    let r = slots.iter().zip(&tuple).fold(row, |r, (&j, &a)| row_set(r, j, a));
                    if self.holds(body, r)? {
                        mask |= 1 << i;
                    }
                }
                quant.accepts(c.n, mask)
            }
        }
    }
}
