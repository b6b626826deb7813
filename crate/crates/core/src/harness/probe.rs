//! Team-level checks: one probe per (structure, formula, team domain),
//! reused across all teams over that domain.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::eval::{eval_fo, EsoEvaluator, EvalConfig, GqSearch, Interpretation, TeamEvaluator};
use crate::model::{Assignment, Row, Structure, Team};
use crate::quantifiers::QuantifierRegistry;
use crate::syntax::{Formula, Signature};
use crate::transform::{dq_to_eso, only_negative, Flavor};

use super::Property;

/// A failing team, before it is rendered into a counterexample.
#[derive(Debug)]
pub(super) struct Failure {
    pub team: Team,
    pub other: Option<Team>,
    pub lhs: bool,
    pub rhs: bool,
    pub detail: String,
    pub extra_formula: Option<Formula>,
}

impl Failure {
    fn new(team: &Team, lhs: bool, rhs: bool, detail: impl Into<String>) -> Self {
        Failure {
            team: team.clone(),
            other: None,
            lhs,
            rhs,
            detail: detail.into(),
            extra_formula: None,
        }
    }
}

enum Kind<'a> {
    EmptyTeam(TeamEvaluator<'a>),
    Downward(TeamEvaluator<'a>),
    Local {
        full: TeamEvaluator<'a>,
        restricted: TeamEvaluator<'a>,
        keep: Vec<String>,
    },
    Flat {
        team: TeamEvaluator<'a>,
        phi: Formula,
        rows: HashMap<Row, bool>,
    },
    Equiv {
        lhs: TeamEvaluator<'a>,
        rhs: TeamEvaluator<'a>,
        other: Formula,
    },
    Eso {
        team: TeamEvaluator<'a>,
        eso: EsoEvaluator<'a>,
        rel: String,
        translated: Formula,
        polarity_ok: bool,
    },
}

pub(super) struct Probe<'a> {
    m: &'a Structure,
    reg: &'a QuantifierRegistry,
    cfg: EvalConfig,
    kind: Kind<'a>,
}

/// `[exists v]`/`[forall v]` replaced by the native quantifiers.
pub(super) fn native(phi: &Formula) -> Formula {
    match phi {
        Formula::Gq { quant, vars, body } if vars.len() == 1 && (quant == "exists" || quant == "forall") => {
            if quant == "exists" {
                Formula::exists(vars[0].clone(), native(body))
            } else {
                Formula::forall(vars[0].clone(), native(body))
            }
        }
        Formula::Gq { quant, vars, body } => Formula::gq(quant.clone(), vars.clone(), native(body)),
        Formula::And(a, b) => Formula::and(native(a), native(b)),
        Formula::Or(a, b) => Formula::or(native(a), native(b)),
        Formula::Exists(v, b) => Formula::exists(v.clone(), native(b)),
        Formula::Forall(v, b) => Formula::forall(v.clone(), native(b)),
        other => other.clone(),
    }
}

/// A relation name for `rel(X)` that clashes with nothing in `phi` or `sig`.
pub(super) fn team_relation_name(phi: &Formula, sig: &Signature) -> String {
    let used = phi.all_symbols();
    std::iter::once("R".to_string())
        .chain((0..).map(|i| format!("R{i}")))
        .find(|r| !used.contains(r) && !sig.contains(r))
        .expect("some name is free")
}

impl<'a> Probe<'a> {
    /// `other` is the second formula of [`Property::ConnectiveLemma`] and
    /// [`Property::DepFromIndep`]; other properties derive it.
    pub fn new(
        property: Property,
        m: &'a Structure,
        phi: &Formula,
        other: Option<&Formula>,
        dom: &[String],
        reg: &'a QuantifierRegistry,
        cfg: &EvalConfig,
    ) -> Result<Self> {
        // pruning presumes downward closure, so it stays off where downward
        // closure or one of its consequences is under test
        let testing_closure = matches!(
            property,
            Property::EmptyTeam | Property::DownwardClosure | Property::Locality | Property::Flatness
        );
        let cfg = cfg.clone().with_pruning(cfg.downward_pruning && !testing_closure);
        let team_ev = |f: &Formula, c: &EvalConfig| TeamEvaluator::new(m, f, dom, reg, c);
        let kind = match property {
            Property::EmptyTeam => Kind::EmptyTeam(team_ev(phi, &cfg)?),
            Property::DownwardClosure => Kind::Downward(team_ev(phi, &cfg)?),
            Property::Locality => {
                let fv = phi.free_vars();
                let keep: Vec<String> = dom.iter().filter(|v| fv.contains(*v)).cloned().collect();
                Kind::Local {
                    full: team_ev(phi, &cfg)?,
                    restricted: TeamEvaluator::new(m, phi, &keep, reg, &cfg)?,
                    keep,
                }
            }
            Property::Flatness => Kind::Flat {
                team: team_ev(phi, &cfg)?,
                phi: phi.clone(),
                rows: HashMap::new(),
            },
            Property::GqFaithfulness => {
                let other = native(phi);
                Kind::Equiv {
                    lhs: team_ev(phi, &cfg)?,
                    rhs: team_ev(&other, &cfg)?,
                    other,
                }
            }
            Property::MinimalWitness => Kind::Equiv {
                lhs: team_ev(phi, &cfg.clone().with_gq_search(GqSearch::Full))?,
                rhs: team_ev(phi, &cfg.clone().with_gq_search(GqSearch::Minimal))?,
                other: phi.clone(),
            },
            Property::ConnectiveLemma | Property::DepFromIndep => {
                let other = other
                    .ok_or_else(|| Error::Precondition("the property compares two formulas".into()))?
                    .clone();
                Kind::Equiv {
                    lhs: team_ev(phi, &cfg)?,
                    rhs: team_ev(&other, &cfg)?,
                    other,
                }
            }
            Property::Translation => {
                let rel = team_relation_name(phi, &m.signature());
                let flavor = if phi.contains_indep() { Flavor::IExact } else { Flavor::DNegative };
                let translated = dq_to_eso(phi, dom, &rel, flavor)?.output;
                let polarity_ok = flavor == Flavor::IExact || only_negative(&translated, &rel);
                let empty = Team::empty(dom.to_vec()).relation(m.size())?;
                let eso = EsoEvaluator::new(m, &translated, &Interpretation::new().relation(rel.clone(), empty), reg, &cfg)?;
                Kind::Eso {
                    team: team_ev(phi, &cfg)?,
                    eso,
                    rel,
                    translated,
                    polarity_ok,
                }
            }
            other => {
                return Err(Error::Precondition(format!("`{other}` is not checked team by team")));
            }
        };
        Ok(Probe { m, reg, cfg, kind })
    }

    /// The first failure on `x`, if any.
    pub fn check(&mut self, x: &Team) -> Result<Option<Failure>> {
        let n = self.m.size();
        Ok(match &mut self.kind {
            Kind::EmptyTeam(ev) => {
                let empty = Team::empty(x.vars().to_vec());
                (!ev.eval(&empty)?).then(|| Failure::new(&empty, false, true, "the empty team fails the formula"))
            }
            Kind::Downward(ev) => {
                if !ev.eval(x)? {
                    return Ok(None);
                }
                // every subteam is reachable by removing one row at a time
                for i in 0..x.len() {
                    let y = x.subteam(!(1u64 << i));
                    if !ev.eval(&y)? {
                        let mut f = Failure::new(x, true, false, "a subteam of a satisfying team fails");
                        f.other = Some(y);
                        return Ok(Some(f));
                    }
                }
                None
            }
            Kind::Local { full, restricted, keep } => {
                let y = x.restrict(keep)?;
                let (lhs, rhs) = (full.eval(x)?, restricted.eval(&y)?);
                (lhs != rhs).then(|| {
                    let mut f = Failure::new(x, lhs, rhs, "truth changes under restriction to the free variables");
                    f.other = Some(y);
                    f
                })
            }
            Kind::Flat { team, phi, rows } => {
                let lhs = team.eval(x)?;
                let mut rhs = true;
                for &r in x.rows() {
                    let v = match rows.get(&r) {
                        Some(&v) => v,
                        None => {
                            let v = eval_fo(self.m, &x.assignment(r), phi, self.reg, &self.cfg)?;
                            rows.insert(r, v);
                            v
                        }
                    };
                    if !v {
                        rhs = false;
                        break;
                    }
                }
                (lhs != rhs).then(|| Failure::new(x, lhs, rhs, "team truth differs from truth on every assignment"))
            }
            Kind::Equiv { lhs, rhs, other } => {
                let (l, r) = (lhs.eval(x)?, rhs.eval(x)?);
                (l != r).then(|| {
                    let mut f = Failure::new(x, l, r, "the two sides disagree");
                    f.extra_formula = Some(other.clone());
                    f
                })
            }
            Kind::Eso {
                team,
                eso,
                rel,
                translated,
                polarity_ok,
            } => {
                if !*polarity_ok {
                    let mut f = Failure::new(x, true, false, format!("`{rel}` occurs positively in the translation"));
                    f.extra_formula = Some(translated.clone());
                    return Ok(Some(f));
                }
                eso.set_relation(rel, &x.relation(n)?)?;
                let (l, r) = (team.eval(x)?, eso.eval(&Assignment::empty())?);
                (l != r).then(|| {
                    let mut f = Failure::new(x, l, r, "team truth differs from the translation on rel(X)");
                    f.extra_formula = Some(translated.clone());
                    f
                })
            }
        })
    }
}
