//! Team evaluation against a naive evaluator that follows the satisfaction
//! clauses literally, pruned against unpruned search, and syntactic
//! invariants.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use teamlogic::eval::{eval_team, EvalConfig, ExistsMode, OrMode, TeamEvaluator};
use teamlogic::harness::{random_formula, FormulaSpace};
use teamlogic::model::{enumerate_structures, enumerate_teams, Structure, Team};
use teamlogic::quantifiers::{tuple_at, QuantifierRegistry};
use teamlogic::syntax::{
    parse_formula, substitute_vars, Atom, Dialect, Formula, ParseOptions, Signature, Term,
};

type Row = BTreeMap<String, usize>;
type Rows = BTreeSet<Row>;

struct Naive<'a> {
    m: &'a Structure,
    reg: &'a QuantifierRegistry,
    or_mode: OrMode,
    exists_mode: ExistsMode,
}

impl Naive<'_> {
    fn val(&self, s: &Row, t: &Term) -> usize {
        match t {
            Term::Var(v) => s[v],
            Term::App(f, args) => {
                let args: Vec<usize> = args.iter().map(|a| self.val(s, a)).collect();
                self.m.function(f).unwrap().apply(self.m.size(), &args)
            }
        }
    }

    fn vals(&self, s: &Row, ts: &[Term]) -> Vec<usize> {
        ts.iter().map(|t| self.val(s, t)).collect()
    }

    fn atom(&self, s: &Row, a: &Atom) -> bool {
        match a {
            Atom::Rel(r, ts) => self.m.relation(r).unwrap().contains(self.m.size(), &self.vals(s, ts)),
            Atom::Eq(a, b) => self.val(s, a) == self.val(s, b),
            Atom::Top => true,
            Atom::Bot => false,
        }
    }

    /// Every way of picking one of `choices` per row, applied to the rows.
    fn extensions(&self, x: &Rows, choices: &[Vec<Vec<(String, usize)>>], body: &Formula) -> bool {
        let rows: Vec<&Row> = x.iter().collect();
        let mut idx = vec![0usize; rows.len()];
        loop {
            let mut y = Rows::new();
            for (row, &i) in rows.iter().zip(&idx) {
                for updates in &choices[i] {
                    let mut s = (*row).clone();
                    for (v, a) in updates {
                        s.insert(v.clone(), *a);
                    }
                    y.insert(s);
                }
            }
            if self.holds(&y, body) {
                return true;
            }
            // odometer over choice indices
            let mut k = 0;
            loop {
                if k == idx.len() {
                    return false;
                }
                idx[k] += 1;
                if idx[k] < choices.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    fn holds(&self, x: &Rows, phi: &Formula) -> bool {
        let n = self.m.size();
        match phi {
            Formula::Lit(l) => x.iter().all(|s| self.atom(s, &l.atom) != l.negated),
            Formula::Dep(ts) => {
                let (args, last) = ts.split_at(ts.len() - 1);
                x.iter().all(|s| {
                    x.iter()
                        .all(|t| self.vals(s, args) != self.vals(t, args) || self.vals(s, last) == self.vals(t, last))
                })
            }
            Formula::NegDep(_) => x.is_empty(),
            Formula::Indep { left, cond, right } => x.iter().all(|s| {
                x.iter().all(|t| {
                    self.vals(s, cond) != self.vals(t, cond)
                        || x.iter().any(|u| {
                            self.vals(u, cond) == self.vals(s, cond)
                                && self.vals(u, left) == self.vals(s, left)
                                && self.vals(u, right) == self.vals(t, right)
                        })
                })
            }),
            Formula::And(a, b) => self.holds(x, a) && self.holds(x, b),
            Formula::Or(a, b) => {
                let rows: Vec<&Row> = x.iter().collect();
                let parts = match self.or_mode {
                    OrMode::Paper => 3usize,
                    OrMode::Strict => 2,
                };
                (0..parts.pow(rows.len() as u32)).any(|mut code| {
                    let (mut y, mut z) = (Rows::new(), Rows::new());
                    for row in &rows {
                        match code % parts {
                            0 => y.insert((*row).clone()),
                            1 => z.insert((*row).clone()),
                            _ => y.insert((*row).clone()) && z.insert((*row).clone()),
                        };
                        code /= parts;
                    }
                    self.holds(&y, a) && self.holds(&z, b)
                })
            }
            Formula::Exists(v, body) => {
                let choices: Vec<Vec<Vec<(String, usize)>>> = match self.exists_mode {
                    ExistsMode::Paper => (0..n).map(|a| vec![vec![(v.clone(), a)]]).collect(),
                    ExistsMode::Lax => (1u32..(1 << n))
                        .map(|mask| (0..n).filter(|a| mask & (1 << a) != 0).map(|a| vec![(v.clone(), a)]).collect())
                        .collect(),
                };
                self.extensions(x, &choices, body)
            }
            Formula::Forall(v, body) => {
                let y: Rows = x
                    .iter()
                    .flat_map(|s| {
                        (0..n).map(move |a| {
                            let mut s = s.clone();
                            s.insert(v.clone(), a);
                            s
                        })
                    })
                    .collect();
                self.holds(&y, body)
            }
            Formula::Gq { quant, vars, body } => {
                let q = self.reg.resolve(quant).unwrap();
                let k = vars.len();
                let cells = n.pow(k as u32);
                let choices: Vec<Vec<Vec<(String, usize)>>> = q
                    .members(n)
                    .unwrap()
                    .into_iter()
                    .map(|mask| {
                        (0..cells)
                            .filter(|i| mask & (1 << i) != 0)
                            .map(|i| vars.iter().cloned().zip(tuple_at(n, k, i)).collect())
                            .collect()
                    })
                    .collect();
                if choices.is_empty() {
                    return x.is_empty();
                }
                self.extensions(x, &choices, body)
            }
            other => panic!("no second-order formulas here: {other}"),
        }
    }
}

fn rows_of(x: &Team) -> Rows {
    x.assignments()
        .iter()
        .map(|s| s.iter().map(|(v, a)| (v.to_string(), a)).collect())
        .collect()
}

fn vars() -> Vec<String> {
    vec!["x".into(), "y".into()]
}

fn compare(n: usize, formulas: &[Formula], max_rows: usize, or_mode: OrMode, exists_mode: ExistsMode) {
    let reg = QuantifierRegistry::with_builtins();
    let sig = Signature::parse_list("P/1").unwrap();
    let cfg = EvalConfig::default().with_or_mode(or_mode).with_exists_mode(exists_mode);
    let teams: Vec<Team> = enumerate_teams(n, &vars(), 1 << 16)
        .unwrap()
        .filter(|x| x.len() <= max_rows)
        .collect();
    for m in enumerate_structures(&sig, n, 1 << 16).unwrap() {
        let naive = Naive {
            m: &m,
            reg: &reg,
            or_mode,
            exists_mode,
        };
        for phi in formulas {
            let mut ev = TeamEvaluator::new(&m, phi, &vars(), &reg, &cfg).unwrap();
            for x in &teams {
                let want = naive.holds(&rows_of(x), phi);
                assert_eq!(ev.eval(x).unwrap(), want, "`{phi}` on\n{x}\nin\n{m}");
            }
        }
    }
}

fn random_formulas(count: u64, depth: usize, dialect: Dialect, qs: &[&str]) -> Vec<Formula> {
    let reg = QuantifierRegistry::with_builtins();
    let sig = Signature::parse_list("P/1").unwrap();
    let qs: Vec<String> = qs.iter().map(|s| s.to_string()).collect();
    (0..count)
        .map(|seed| random_formula(seed, depth, &sig, &qs, dialect, &reg).unwrap())
        .collect()
}

#[test]
fn agrees_with_naive_clauses_at_size_two() {
    let qs = ["exists", "forall", "most", "q1"];
    let mut formulas = random_formulas(300, 2, Dialect::Iq, &qs);
    formulas.extend(random_formulas(100, 3, Dialect::Dq, &qs));
    compare(2, &formulas, 4, OrMode::Paper, ExistsMode::Paper);
}

#[test]
fn agrees_with_naive_clauses_at_size_three() {
    let formulas = random_formulas(150, 1, Dialect::Iq, &["exists", "most", "atleast2"]);
    compare(3, &formulas, 3, OrMode::Paper, ExistsMode::Paper);
}

#[test]
fn agrees_with_naive_clauses_in_other_modes() {
    let formulas = random_formulas(150, 2, Dialect::Dq, &["exists", "most"]);
    compare(2, &formulas, 4, OrMode::Strict, ExistsMode::Lax);
    compare(2, &formulas, 4, OrMode::Paper, ExistsMode::Lax);
    compare(2, &formulas, 4, OrMode::Strict, ExistsMode::Paper);
}

#[test]
fn pruning_changes_no_verdict_on_the_depth_two_space() {
    let reg = QuantifierRegistry::with_builtins();
    let sig = Signature::parse_list("P/1").unwrap();
    let qs: Vec<String> = ["exists", "forall", "most"].iter().map(|s| s.to_string()).collect();
    let space = FormulaSpace::standard(&sig, &vars(), Dialect::Dq, &qs, &reg).unwrap();
    let formulas = space.formulas(2, 1 << 20).unwrap();
    let teams: Vec<Team> = enumerate_teams(2, &vars(), 1 << 16).unwrap().collect();
    let plain = EvalConfig::default();
    let pruned = EvalConfig::default().with_pruning(true);
    for m in enumerate_structures(&sig, 2, 1 << 16).unwrap() {
        for phi in &formulas {
            let mut a = TeamEvaluator::new(&m, phi, &vars(), &reg, &plain).unwrap();
            let mut b = TeamEvaluator::new(&m, phi, &vars(), &reg, &pruned).unwrap();
            for x in &teams {
                assert_eq!(a.eval(x).unwrap(), b.eval(x).unwrap(), "`{phi}` on\n{x}\nin\n{m}");
            }
        }
    }
}

#[test]
fn pruning_is_refused_for_independence() {
    let reg = QuantifierRegistry::with_builtins();
    let m = Structure::new(2).unwrap();
    let phi = Formula::Indep {
        left: vec![Term::var("x")],
        cond: vec![],
        right: vec![Term::var("y")],
    };
    let x = Team::full(2, vars()).unwrap();
    assert!(eval_team(&m, &x, &phi, &reg, &EvalConfig::default().with_pruning(true)).is_err());
}

fn dialect(i: usize) -> Dialect {
    [Dialect::Fo, Dialect::Dq, Dialect::Iq, Dialect::Eso][i]
}

proptest! {
    #[test]
    fn printing_then_parsing_is_identity(seed in any::<u64>(), depth in 0usize..5, d in 0usize..4) {
        let reg = QuantifierRegistry::with_builtins();
        let sig = Signature::parse_list("P/1,E/2").unwrap();
        let qs = vec!["most".to_string(), "forall2".to_string()];
        let phi = random_formula(seed, depth, &sig, &qs, dialect(d), &reg).unwrap();
        let opts = ParseOptions::new(dialect(d)).signature(&sig).registry(&reg);
        let back = parse_formula(&phi.to_string(), &opts).unwrap();
        prop_assert_eq!(back, phi);
    }

    #[test]
    fn substitution_updates_free_variables(seed in any::<u64>(), depth in 0usize..5, d in 0usize..4, t in 0usize..3) {
        let reg = QuantifierRegistry::with_builtins();
        let sig = Signature::parse_list("P/1").unwrap();
        let phi = random_formula(seed, depth, &sig, &["most".to_string()], dialect(d), &reg).unwrap();
        let fv = phi.free_vars();
        let Some(x) = fv.iter().next().cloned() else { return Ok(()); };
        // `y` may be bound inside, so this also exercises capture avoidance
        let term = [Term::var("z"), Term::var("y"), Term::app("g", vec![Term::var("y")])][t].clone();
        let out = substitute_vars(&phi, &BTreeMap::from([(x.clone(), term.clone())]));
        let mut want = fv.clone();
        want.remove(&x);
        want.extend(term.vars());
        prop_assert_eq!(out.free_vars(), want);
    }
}
