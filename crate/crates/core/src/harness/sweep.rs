use std::collections::HashMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::eval::{eval_eso, eval_fo, eval_sentence, EvalConfig, Interpretation};
use crate::model::{count_teams, Assignment, Structure, StructureSpace, Team};
use crate::quantifiers::{cells, format_subset, full_mask, QuantifierRegistry};
use crate::syntax::{parse_formula, Dialect, Formula, ParseOptions, Signature, Term};
use crate::transform::{check_flat, eso_to_dq, eso_to_dq_total, flatten_functions, to_normal_form};

use super::generate::{random_formula, FormulaSpace};
use super::probe::{Failure, Probe};
use super::{Counterexample, FormulaSource, Property, SweepReport, SweepSpec, Verdict};

/// Quantifiers the dual checks cover when the sweep names none.
const DUAL_DEFAULTS: [&str; 9] = [
    "exists", "forall", "most", "q1", "never", "atleast2", "forall2", "qs_2", "qsnot_2",
];

/// Runs a sweep to its first counterexample (or through the whole space when
/// `collect_all` is set). Every counterexample is confirmed by a fresh
/// evaluation without memoization before it is reported, and a passing sweep
/// must have checked exactly the declared number of instances.
pub fn run_sweep(spec: &SweepSpec, reg: &QuantifierRegistry) -> Result<SweepReport> {
    spec.validate()?;
    let start = Instant::now();
    let mut ctx = Ctx {
        spec,
        reg,
        instances: 0,
        found: Vec::new(),
    };
    let expected = match spec.property {
        Property::EmptyTeam
        | Property::DownwardClosure
        | Property::Locality
        | Property::Flatness
        | Property::GqFaithfulness
        | Property::MinimalWitness
        | Property::Translation => team_property(&mut ctx)?,
        Property::ConnectiveLemma => connective_lemma(&mut ctx)?,
        Property::NormalForm
        | Property::Flattening
        | Property::MainTheorem
        | Property::SmallTrick
        | Property::Equivalence => sentence_property(&mut ctx)?,
        Property::DepFromIndep => dep_from_indep(&mut ctx)?,
        Property::Dual => dual(&mut ctx)?,
    };
    let verdict = if ctx.found.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Counterexample
    };
    if verdict == Verdict::Pass && ctx.instances != expected {
        return Err(Error::Precondition(format!(
            "sweep checked {} instances of a declared space of {expected}",
            ctx.instances
        )));
    }
    Ok(SweepReport {
        property: spec.property,
        instances: ctx.instances,
        expected_instances: expected,
        verdict,
        counterexamples: ctx.found,
        elapsed: start.elapsed(),
        seed: spec.source.seed(),
    })
}

/// Compares two sentences of any dialect on every structure of `sig` with
/// the given sizes. Sentences with dependence or independence atoms are
/// evaluated in team semantics, all others by the ESO(Q) evaluator.
pub fn check_equiv(
    lhs: &str,
    rhs: &str,
    sizes: &[usize],
    sig: &Signature,
    reg: &QuantifierRegistry,
    cfg: &EvalConfig,
) -> Result<SweepReport> {
    let spec = SweepSpec::new(Property::Equivalence)
        .signature(sig.clone())
        .sizes(sizes.iter().copied())
        .config(cfg.clone())
        .explicit([lhs, rhs]);
    run_sweep(&spec, reg)
}

struct Ctx<'s> {
    spec: &'s SweepSpec,
    reg: &'s QuantifierRegistry,
    instances: u64,
    found: Vec<Counterexample>,
}

impl Ctx<'_> {
    fn done(&self) -> bool {
        !self.spec.collect_all && !self.found.is_empty()
    }

    fn budget(&self, expected: u128) -> Result<u64> {
        let cap = self.spec.caps.instances;
        if expected > cap as u128 {
            return Err(Error::cap(format!("{} instances", self.spec.property), expected, cap as u128));
        }
        Ok(expected as u64)
    }

    fn spaces(&self) -> Result<Vec<StructureSpace>> {
        let spec = self.spec;
        spec.sizes
            .iter()
            .map(|&n| StructureSpace::new(&spec.signature, n, spec.caps.structures))
            .collect()
    }

    fn teams(&self, n: usize, dom: &[String]) -> Result<Vec<Team>> {
        Ok(crate::model::enumerate_teams(n, dom, self.spec.caps.teams)?.collect())
    }

    fn team_count(&self, n: usize, vars: usize) -> Result<u128> {
        let count = count_teams(n, vars);
        if count > self.spec.caps.teams as u128 {
            return Err(Error::cap(format!("teams over {vars} variables at size {n}"), count, self.spec.caps.teams as u128));
        }
        Ok(count)
    }

    /// Confirms a team-level failure on a fresh probe and records it.
    #[allow(clippy::too_many_arguments)]
    fn team_failure(
        &mut self,
        property: Property,
        m: &Structure,
        phi: &Formula,
        other: Option<&Formula>,
        dom: &[String],
        failure: Failure,
    ) -> Result<()> {
        let cfg = EvalConfig {
            memo: false,
            ..self.spec.config.clone()
        };
        let mut fresh = Probe::new(property, m, phi, other, dom, self.reg, &cfg)?;
        if fresh.check(&failure.team)?.is_none() {
            return Err(not_reproduced());
        }
        let mut formulas = vec![phi.to_string()];
        formulas.extend(failure.extra_formula.as_ref().map(Formula::to_string));
        self.found.push(Counterexample {
            structure: Some(m.to_string()),
            team: Some(failure.team.to_string()),
            other_team: failure.other.as_ref().map(Team::to_string),
            formulas,
            lhs: failure.lhs,
            rhs: failure.rhs,
            detail: failure.detail,
        });
        Ok(())
    }
}

fn not_reproduced() -> Error {
    Error::Precondition("a counterexample did not reproduce on a fresh evaluation".into())
}

// ---------- formulas ----------

fn parse_in(text: &str, dialect: Dialect, sig: &Signature, reg: &QuantifierRegistry) -> Result<Formula> {
    parse_formula(text, &ParseOptions::new(dialect).signature(sig).registry(reg))
}

/// The formulas of a non-random-instance source.
fn formula_list(ctx: &Ctx<'_>) -> Result<Vec<Formula>> {
    let spec = ctx.spec;
    let (reg, sig) = (ctx.reg, &spec.signature);
    match &spec.source {
        FormulaSource::Exhaustive { depth } => {
            let space = FormulaSpace::standard(sig, &spec.vars, spec.dialect, &spec.quantifiers, reg)?;
            space.formulas(*depth, spec.caps.formulas)
        }
        FormulaSource::Explicit(texts) => texts.iter().map(|t| parse_in(t, spec.dialect, sig, reg)).collect(),
        FormulaSource::RandomFormulas { seed, count, depth } => {
            if *count > spec.caps.formulas {
                return Err(Error::cap("random formulas", *count as u128, spec.caps.formulas as u128));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            (0..*count)
                .map(|_| random_formula(rng.gen(), *depth, sig, &spec.quantifiers, spec.dialect, reg))
                .collect()
        }
        FormulaSource::RandomInstances { .. } => Err(Error::Precondition(format!(
            "`{}` does not take random instances",
            spec.property
        ))),
    }
}

/// Team domains to check `phi` on: its free variables (ordered as in
/// `vars`, then alphabetically) plus any subset of the remaining `vars`.
fn domains(property: Property, phi: &Formula, vars: &[String]) -> Vec<Vec<String>> {
    let fv = phi.free_vars();
    let outside: Vec<String> = fv.iter().filter(|v| !vars.contains(v)).cloned().collect();
    let extra: Vec<&String> = vars.iter().filter(|v| !fv.contains(*v)).collect();
    let masks: Vec<u64> = match property {
        Property::Translation => vec![0],
        Property::Locality => (1..1u64 << extra.len()).collect(),
        _ => (0..1u64 << extra.len()).collect(),
    };
    masks
        .into_iter()
        .map(|mask| {
            vars.iter()
                .filter(|v| fv.contains(*v) || extra.iter().position(|e| e == v).is_some_and(|i| mask & (1 << i) != 0))
                .cloned()
                .chain(outside.iter().cloned())
                .collect()
        })
        .collect()
}

// ---------- team properties ----------

fn team_property(ctx: &mut Ctx<'_>) -> Result<u64> {
    let spec = ctx.spec;
    let property = spec.property;
    if let FormulaSource::RandomInstances { seed, count, depth } = spec.source {
        return random_instances(ctx, seed, count, depth);
    }
    let formulas = formula_list(ctx)?;
    if property == Property::Flatness {
        for phi in &formulas {
            phi.check_dialect(Dialect::Fo)?;
        }
    }
    let spaces = ctx.spaces()?;
    let plan: Vec<(&Formula, Vec<Vec<String>>)> = formulas
        .iter()
        .map(|phi| (phi, domains(property, phi, &spec.vars)))
        .collect();

    let mut expected: u128 = 0;
    for space in &spaces {
        let mut per_structure: u128 = 0;
        for (_, doms) in &plan {
            for dom in doms {
                per_structure += match property {
                    Property::EmptyTeam => 1,
                    _ => ctx.team_count(space.size(), dom.len())?,
                };
            }
        }
        expected += per_structure * space.len() as u128;
    }
    let expected = ctx.budget(expected)?;

    for space in &spaces {
        let n = space.size();
        let mut teams: HashMap<Vec<String>, Vec<Team>> = HashMap::new();
        for i in 0..space.len() {
            let m = space.get(i);
            for (phi, doms) in &plan {
                for dom in doms {
                    if !teams.contains_key(dom) {
                        teams.insert(dom.clone(), ctx.teams(n, dom)?);
                    }
                    let selected = &teams[dom];
                    let selected = if property == Property::EmptyTeam {
                        &selected[..1]
                    } else {
                        &selected[..]
                    };
                    let mut probe = Probe::new(property, &m, phi, None, dom, ctx.reg, &spec.config)?;
                    for x in selected {
                        ctx.instances += 1;
                        if let Some(f) = probe.check(x)? {
                            ctx.team_failure(property, &m, phi, None, dom, f)?;
                            if ctx.done() {
                                return Ok(expected);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(expected)
}

fn random_instances(ctx: &mut Ctx<'_>, seed: u64, count: u64, depth: usize) -> Result<u64> {
    let spec = ctx.spec;
    let property = spec.property;
    let expected = ctx.budget(count as u128)?;
    let spaces = ctx.spaces()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..count {
        let phi = random_formula(rng.gen(), depth, &spec.signature, &spec.quantifiers, spec.dialect, ctx.reg)?;
        let space = &spaces[rng.gen_range(0..spaces.len())];
        let m = space.get(rng.gen_range(0..space.len()));
        let dom = match property {
            Property::Translation => domains(property, &phi, &spec.vars).remove(0),
            _ => domains(Property::EmptyTeam, &phi, &spec.vars).pop().expect("at least one domain"),
        };
        let full = Team::full(space.size(), dom.clone())?;
        if full.len() > 63 {
            return Err(Error::cap("rows of a random team", full.len() as u128, 63));
        }
        let x = full.subteam(rng.gen::<u64>() & ((1u64 << full.len()) - 1));
        ctx.instances += 1;
        if let Some(f) = Probe::new(property, &m, &phi, None, &dom, ctx.reg, &spec.config)?.check(&x)? {
            ctx.team_failure(property, &m, &phi, None, &dom, f)?;
            if ctx.done() {
                break;
            }
        }
    }
    Ok(expected)
}

// ---------- connective lemma ----------

/// For each quantifier `Q`, each `ψ` and each `φ` without the first variable
/// `x` free: `[Q x](ψ ∨ φ)` against `[Q x]ψ ∨ φ`, and likewise for `∧`, on
/// every team over the remaining variables. The sweep's formula source
/// supplies both `ψ` and `φ`.
fn connective_lemma(ctx: &mut Ctx<'_>) -> Result<u64> {
    let spec = ctx.spec;
    let Some((x, rest)) = spec.vars.split_first() else {
        return Err(Error::Precondition("the connective lemma needs a variable to bind".into()));
    };
    let dom = rest.to_vec();
    for q in &spec.quantifiers {
        if ctx.reg.resolve(q)?.arity() != 1 {
            return Err(Error::Precondition(format!("`{q}` does not bind a single variable")));
        }
    }
    if spec.quantifiers.is_empty() {
        return Err(Error::Precondition("no quantifier to test".into()));
    }
    let formulas = formula_list(ctx)?;
    for phi in &formulas {
        if let Some(v) = phi.free_vars().into_iter().find(|v| v != x && !dom.contains(v)) {
            return Err(Error::Precondition(format!("`{v}` is free but not a sweep variable")));
        }
    }
    let pool: Vec<&Formula> = formulas.iter().filter(|f| !f.free_vars().contains(x)).collect();
    let spaces = ctx.spaces()?;

    let mut expected: u128 = 0;
    for space in &spaces {
        let per = 2 * (spec.quantifiers.len() * formulas.len() * pool.len()) as u128;
        expected += per * space.len() as u128 * ctx.team_count(space.size(), dom.len())?;
    }
    let expected = ctx.budget(expected)?;

    for space in &spaces {
        let teams = ctx.teams(space.size(), &dom)?;
        for i in 0..space.len() {
            let m = space.get(i);
            for q in &spec.quantifiers {
                let bind = |f: Formula| Formula::gq(q.clone(), vec![x.clone()], f);
                for psi in &formulas {
                    for phi in &pool {
                        let pairs = [
                            (
                                bind(Formula::or(psi.clone(), (*phi).clone())),
                                Formula::or(bind(psi.clone()), (*phi).clone()),
                            ),
                            (
                                bind(Formula::and(psi.clone(), (*phi).clone())),
                                Formula::and(bind(psi.clone()), (*phi).clone()),
                            ),
                        ];
                        for (lhs, rhs) in &pairs {
                            let property = Property::ConnectiveLemma;
                            let mut probe = Probe::new(property, &m, lhs, Some(rhs), &dom, ctx.reg, &spec.config)?;
                            for t in &teams {
                                ctx.instances += 1;
                                if let Some(f) = probe.check(t)? {
                                    ctx.team_failure(property, &m, lhs, Some(rhs), &dom, f)?;
                                    if ctx.done() {
                                        return Ok(expected);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(expected)
}

// ---------- sentence properties ----------

enum Side {
    Eso(Formula),
    Team(Formula),
}

impl Side {
    /// Sentences with dependence or independence atoms go to team semantics.
    fn choose(phi: Formula) -> Side {
        let mut team = false;
        phi.visit(&mut |f| {
            team |= matches!(f, Formula::Dep(_) | Formula::NegDep(_) | Formula::Indep { .. });
        });
        if team {
            Side::Team(phi)
        } else {
            Side::Eso(phi)
        }
    }

    fn formula(&self) -> &Formula {
        match self {
            Side::Eso(f) | Side::Team(f) => f,
        }
    }

    fn eval(&self, m: &Structure, reg: &QuantifierRegistry, cfg: &EvalConfig) -> Result<bool> {
        match self {
            Side::Eso(f) => eval_eso(m, f, &Interpretation::new(), reg, cfg),
            // pruning is sound without independence atoms
            Side::Team(f) => eval_sentence(m, f, reg, &cfg.clone().with_pruning(!f.contains_indep())),
        }
    }
}

struct SentencePair {
    lhs: Side,
    rhs: Side,
    /// A violated syntactic postcondition, reported without a structure.
    syntax_error: Option<String>,
}

/// Explicit texts with `[Q ` instantiated, paired with the quantifier that
/// replaced it. The small trick needs a quantifier for every text.
fn instantiate(ctx: &Ctx<'_>, texts: &[String]) -> Result<Vec<(String, Option<String>)>> {
    let qs = &ctx.spec.quantifiers;
    let needs_q = ctx.spec.property == Property::SmallTrick;
    let mut out = Vec::new();
    for t in texts {
        let placeholder = t.contains("[Q ");
        if (placeholder || needs_q) && qs.is_empty() {
            return Err(Error::Precondition(format!("`{t}` needs a quantifier but the sweep names none")));
        }
        if placeholder || needs_q {
            out.extend(qs.iter().map(|q| (t.replace("[Q ", &format!("[{q} ")), Some(q.clone()))));
        } else {
            out.push((t.clone(), None));
        }
    }
    Ok(out)
}

fn parse_sentence(text: &str, sig: &Signature, reg: &QuantifierRegistry) -> Result<Formula> {
    let phi = match parse_in(text, Dialect::Eso, sig, reg) {
        Ok(phi) => phi,
        Err(Error::Dialect { .. }) => parse_in(text, Dialect::Iq, sig, reg)?,
        Err(e) => return Err(e),
    };
    if let Some(v) = phi.free_vars().into_iter().next() {
        return Err(Error::Precondition(format!("`{v}` is free in `{text}`")));
    }
    Ok(phi)
}

fn sentence_pair(ctx: &Ctx<'_>, phi: Formula, quant: Option<&str>) -> Result<SentencePair> {
    let spec = ctx.spec;
    let min_size = spec.sizes.iter().copied().min().unwrap_or(0);
    let check_min = |min: usize| {
        if min_size < min {
            return Err(Error::Precondition(format!(
                "the translation of `{phi}` is only equivalent on universes of size at least {min}"
            )));
        }
        Ok(())
    };
    let pair = |lhs, rhs| SentencePair {
        lhs,
        rhs,
        syntax_error: None,
    };
    Ok(match spec.property {
        Property::NormalForm => {
            let nf = to_normal_form(&phi)?;
            check_min(nf.min_universe)?;
            pair(Side::Eso(phi), Side::Eso(nf.output.to_formula()))
        }
        Property::Flattening => {
            let flat = to_normal_form(&phi)?.then(flatten_functions)?;
            check_min(flat.min_universe)?;
            let syntax_error = check_flat(&flat.output).err().map(|e| e.to_string());
            SentencePair {
                lhs: Side::Eso(phi),
                rhs: Side::Eso(flat.output.to_formula()),
                syntax_error,
            }
        }
        Property::MainTheorem => {
            let dq = to_normal_form(&phi)?.then(flatten_functions)?.then(eso_to_dq)?;
            check_min(dq.min_universe)?;
            pair(Side::Eso(phi), Side::Team(dq.output))
        }
        Property::SmallTrick => {
            let q = quant.expect("instantiated with a quantifier");
            let resolved = ctx.reg.resolve(q)?;
            for &n in &spec.sizes {
                if resolved.accepts(n, 0)? {
                    return Err(Error::Precondition(format!("`{q}` accepts the empty set at size {n}")));
                }
            }
            let dq = eso_to_dq_total(&phi, q, ctx.reg)?;
            check_min(dq.min_universe)?;
            pair(Side::Eso(phi), Side::Team(dq.output))
        }
        other => unreachable!("{other} is not a one-sentence property"),
    })
}

fn sentence_property(ctx: &mut Ctx<'_>) -> Result<u64> {
    let spec = ctx.spec;
    let FormulaSource::Explicit(texts) = &spec.source else {
        return Err(Error::Precondition(format!("`{}` needs explicit sentences", spec.property)));
    };
    let pairs: Vec<SentencePair> = if spec.property == Property::Equivalence {
        let [lhs, rhs] = texts.as_slice() else {
            return Err(Error::Precondition("an equivalence check compares exactly two sentences".into()));
        };
        let side = |t: &String| parse_sentence(t, &spec.signature, ctx.reg).map(Side::choose);
        vec![SentencePair {
            lhs: side(lhs)?,
            rhs: side(rhs)?,
            syntax_error: None,
        }]
    } else {
        instantiate(ctx, texts)?
            .into_iter()
            .map(|(text, q)| {
                let phi = parse_in(&text, Dialect::Eso, &spec.signature, ctx.reg)?;
                if let Some(v) = phi.free_vars().into_iter().next() {
                    return Err(Error::Precondition(format!("`{v}` is free in `{text}`")));
                }
                sentence_pair(ctx, phi, q.as_deref())
            })
            .collect::<Result<_>>()?
    };
    let spaces = ctx.spaces()?;
    let expected = ctx.budget(spaces.iter().map(|s| s.len() as u128).sum::<u128>() * pairs.len() as u128)?;

    for p in &pairs {
        if let Some(msg) = &p.syntax_error {
            ctx.found.push(Counterexample {
                structure: None,
                team: None,
                other_team: None,
                formulas: vec![p.lhs.formula().to_string(), p.rhs.formula().to_string()],
                lhs: true,
                rhs: false,
                detail: format!("syntactic postcondition fails: {msg}"),
            });
            if ctx.done() {
                return Ok(expected);
            }
        }
    }
    let fresh = EvalConfig {
        memo: false,
        ..spec.config.clone()
    };
    for space in &spaces {
        for i in 0..space.len() {
            let m = space.get(i);
            for p in &pairs {
                ctx.instances += 1;
                let (l, r) = (p.lhs.eval(&m, ctx.reg, &spec.config)?, p.rhs.eval(&m, ctx.reg, &spec.config)?);
                if l == r {
                    continue;
                }
                if p.lhs.eval(&m, ctx.reg, &fresh)? != l || p.rhs.eval(&m, ctx.reg, &fresh)? != r {
                    return Err(not_reproduced());
                }
                ctx.found.push(Counterexample {
                    structure: Some(m.to_string()),
                    team: None,
                    other_team: None,
                    formulas: vec![p.lhs.formula().to_string(), p.rhs.formula().to_string()],
                    lhs: l,
                    rhs: r,
                    detail: "the sentences disagree".into(),
                });
                if ctx.done() {
                    return Ok(expected);
                }
            }
        }
    }
    Ok(expected)
}

// ---------- dependence from independence ----------

/// `perp(y;x;y)` against `dep(x,y)` and `perp(y;;y)` against `dep(y)` on
/// every team over the first two variables.
fn dep_from_indep(ctx: &mut Ctx<'_>) -> Result<u64> {
    let spec = ctx.spec;
    let [x, y, ..] = spec.vars.as_slice() else {
        return Err(Error::Precondition("two variables are needed".into()));
    };
    let dom = vec![x.clone(), y.clone()];
    let (tx, ty) = (Term::var(x), Term::var(y));
    let pairs = [
        (
            Formula::Indep {
                left: vec![ty.clone()],
                cond: vec![tx.clone()],
                right: vec![ty.clone()],
            },
            Formula::Dep(vec![tx, ty.clone()]),
        ),
        (
            Formula::Indep {
                left: vec![ty.clone()],
                cond: vec![],
                right: vec![ty.clone()],
            },
            Formula::Dep(vec![ty]),
        ),
    ];
    let mut expected: u128 = 0;
    for &n in &spec.sizes {
        expected += 2 * ctx.team_count(n, 2)?;
    }
    let expected = ctx.budget(expected)?;
    for &n in &spec.sizes {
        let m = Structure::new(n)?;
        let teams = ctx.teams(n, &dom)?;
        for (indep, dep) in &pairs {
            let property = Property::DepFromIndep;
            let mut probe = Probe::new(property, &m, indep, Some(dep), &dom, ctx.reg, &spec.config)?;
            for t in &teams {
                ctx.instances += 1;
                if let Some(f) = probe.check(t)? {
                    ctx.team_failure(property, &m, indep, Some(dep), &dom, f)?;
                    if ctx.done() {
                        return Ok(expected);
                    }
                }
            }
        }
    }
    Ok(expected)
}

// ---------- dual quantifiers ----------

/// For each quantifier and size, on every `A ⊆ M^k`: `Q^d` accepts `A` iff
/// `Q` rejects the complement, `(Q^d)^d` agrees with `Q`, and for `exists`
/// its dual agrees with `forall`; then once per size the first-order check
/// `¬[Q x̄]⊥ ⇔ [Q^d x̄]⊤`.
fn dual(ctx: &mut Ctx<'_>) -> Result<u64> {
    let spec = ctx.spec;
    let names: Vec<String> = if spec.quantifiers.is_empty() {
        DUAL_DEFAULTS.iter().map(|s| s.to_string()).collect()
    } else {
        spec.quantifiers.clone()
    };
    let forall = ctx.reg.resolve("forall")?;
    let mut expected: u128 = 0;
    for name in &names {
        let k = ctx.reg.resolve(name)?.arity();
        for &n in &spec.sizes {
            let c = cells(n, k)?;
            if c > 20 {
                return Err(Error::cap("subsets to check", 1u128 << c.min(127), 1 << 20));
            }
            let checks = if name == "exists" { 3 } else { 2 };
            expected += checks * (1u128 << c) + 1;
        }
    }
    let expected = ctx.budget(expected)?;

    let fail = |ctx: &mut Ctx<'_>, formulas: Vec<String>, lhs: bool, rhs: bool, detail: String| {
        ctx.found.push(Counterexample {
            structure: None,
            team: None,
            other_team: None,
            formulas,
            lhs,
            rhs,
            detail,
        });
    };
    for name in &names {
        let q = ctx.reg.resolve(name)?;
        let d = ctx.reg.resolve(&format!("{name}^d"))?;
        let dd = ctx.reg.resolve(&format!("{name}^d^d"))?;
        let k = q.arity();
        for &n in &spec.sizes {
            let c = cells(n, k)?;
            let full = full_mask(c);
            for a in 0..1u64 << c {
                let set = format_subset(n, k, a);
                let mut checks = vec![
                    (d.accepts(n, a)?, !q.accepts(n, full ^ a)?, format!("{name}^d"), "dual against the complement"),
                    (dd.accepts(n, a)?, q.accepts(n, a)?, format!("{name}^d^d"), "double dual"),
                ];
                if name == "exists" {
                    checks.push((d.accepts(n, a)?, forall.accepts(n, a)?, "exists^d".into(), "dual of exists against forall"));
                }
                for (l, r, shown, what) in checks {
                    ctx.instances += 1;
                    if l != r {
                        fail(ctx, vec![name.clone(), shown], l, r, format!("{what} at size {n} on {set}"));
                        if ctx.done() {
                            return Ok(expected);
                        }
                    }
                }
            }
            let m = Structure::new(n)?;
            let xs: Vec<String> = (1..=k).map(|i| format!("x{i}")).collect();
            let neg = Formula::gq(name.clone(), xs.clone(), Formula::bot());
            let pos = Formula::gq(format!("{name}^d"), xs, Formula::top());
            let l = !eval_fo(&m, &Assignment::empty(), &neg, ctx.reg, &spec.config)?;
            let r = eval_fo(&m, &Assignment::empty(), &pos, ctx.reg, &spec.config)?;
            ctx.instances += 1;
            if l != r {
                let detail = format!("negated [{name}]⊥ against [{name}^d]⊤ at size {n}");
                fail(ctx, vec![format!("~({neg})"), pos.to_string()], l, r, detail);
                if ctx.done() {
                    return Ok(expected);
                }
            }
        }
    }
    Ok(expected)
}
