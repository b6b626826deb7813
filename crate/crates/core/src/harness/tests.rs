use super::*;
use crate::model::count_structures;
use crate::quantifiers::QuantifierRegistry;
use crate::syntax::Formula;

fn reg() -> QuantifierRegistry {
    QuantifierRegistry::with_builtins()
}

fn p1() -> Signature {
    Signature::parse_list("P/1").unwrap()
}

fn vars() -> Vec<String> {
    vec!["x".into(), "y".into()]
}

#[test]
fn space_count_matches_enumeration() {
    let r = reg();
    let space = FormulaSpace::standard(&p1(), &vars(), Dialect::Dq, &["most".to_string()], &r).unwrap();
    for depth in 0..=2 {
        let fs = space.formulas(depth, u64::MAX).unwrap();
        assert_eq!(fs.len() as u128, space.count(depth));
        assert!(fs.iter().all(|f| f.depth() <= depth));
    }
    // hand count at depth 1: a atoms, a(a+1)/2 pairs per connective, b binders
    let (a, b) = (space.atoms.len() as u128, space.binders.len() as u128);
    assert_eq!(space.count(1), a + a * (a + 1) + a * b);
}

#[test]
fn space_respects_the_cap() {
    let r = reg();
    let space = FormulaSpace::standard(&p1(), &vars(), Dialect::Dq, &[], &r).unwrap();
    assert!(matches!(space.formulas(2, 10), Err(Error::CapExceeded { .. })));
}

#[test]
fn first_order_space_has_no_team_atoms() {
    let r = reg();
    let space = FormulaSpace::standard(&p1(), &vars(), Dialect::Fo, &[], &r).unwrap();
    for f in space.formulas(1, u64::MAX).unwrap() {
        f.check_dialect(Dialect::Fo).unwrap();
    }
}

#[test]
fn random_formulas_are_deterministic_and_in_dialect() {
    let r = reg();
    let qs = vec!["most".to_string(), "forall2".to_string()];
    for seed in 0..200 {
        for dialect in [Dialect::Dq, Dialect::Iq, Dialect::Fo, Dialect::Eso] {
            let a = random_formula(seed, 3, &p1(), &qs, dialect, &r).unwrap();
            let b = random_formula(seed, 3, &p1(), &qs, dialect, &r).unwrap();
            assert_eq!(a, b);
            a.check_dialect(dialect).unwrap();
            assert!(a.depth() <= 3);
        }
    }
    let atom = random_formula(1, 0, &p1(), &[], Dialect::Dq, &r).unwrap();
    assert_eq!(atom.depth(), 0);
}

#[test]
fn random_formula_needs_a_relation() {
    let err = random_formula(1, 1, &Signature::new(), &[], Dialect::Fo, &reg()).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)));
}

#[test]
fn property_names_round_trip() {
    for p in Property::ALL {
        assert_eq!(p.name().parse::<Property>().unwrap(), p);
    }
    assert!("no-such".parse::<Property>().is_err());
}

#[test]
fn empty_team_sweep_passes_with_full_count() {
    let r = reg();
    let spec = SweepSpec::new(Property::EmptyTeam)
        .quantifiers(["most"])
        .source(FormulaSource::Exhaustive { depth: 1 });
    let report = run_sweep(&spec, &r).unwrap();
    assert!(report.passed(), "{report}");
    assert!(report.counterexamples.is_empty());
    assert_eq!(report.instances, report.expected_instances);
    assert!(report.instances > 0);
}

#[test]
fn downward_closure_fails_for_independence() {
    let r = reg();
    let spec = SweepSpec::new(Property::DownwardClosure)
        .dialect(Dialect::Iq)
        .explicit(["perp(x;;y)"]);
    let report = run_sweep(&spec, &r).unwrap();
    assert_eq!(report.verdict, Verdict::Counterexample);
    let c = report.first_counterexample().unwrap();
    assert!(c.lhs && !c.rhs);
    let (x, y) = (c.team.as_ref().unwrap(), c.other_team.as_ref().unwrap());
    // the subteam has one row fewer
    assert_eq!(x.lines().count(), y.lines().count() + 1);
    assert_eq!(report.counterexamples.len(), 1);
}

#[test]
fn collect_all_keeps_going() {
    let r = reg();
    let spec = SweepSpec::new(Property::DownwardClosure)
        .dialect(Dialect::Iq)
        .explicit(["perp(x;;y)"])
        .collect_all(true);
    let report = run_sweep(&spec, &r).unwrap();
    assert!(report.counterexamples.len() > 1);
    assert_eq!(report.instances, report.expected_instances);
}

#[test]
fn main_theorem_count_is_structures_times_sentences() {
    let r = reg();
    let sentences = ["[Q x] P(x)", "A x. Ef f/1. P(f(x))", "Ef f/0. [Q x] (P(x) | x=f())"];
    let spec = SweepSpec::new(Property::MainTheorem)
        .sizes([2, 3])
        .quantifiers(["most"])
        .explicit(sentences);
    let report = run_sweep(&spec, &r).unwrap();
    assert!(report.passed(), "{report}");
    let structures: u128 = [2, 3].iter().map(|&n| count_structures(&p1(), n)).sum();
    assert_eq!(report.instances as u128, structures * sentences.len() as u128);
}

#[test]
fn equivalence_examples() {
    let (r, cfg) = (reg(), EvalConfig::default());
    let ok = check_equiv("Ef f/1. A x. P(f(x))", "A x. E y. (dep(x,y) & P(y))", &[2, 3], &p1(), &r, &cfg).unwrap();
    assert!(ok.passed(), "{ok}");
    let native = check_equiv("[exists x] P(x)", "E x. P(x)", &[1, 2, 3], &p1(), &r, &cfg).unwrap();
    assert!(native.passed());

    let bad = check_equiv("top", "bot", &[2, 3], &p1(), &r, &cfg).unwrap();
    assert_eq!(bad.verdict, Verdict::Counterexample);
    assert_eq!(bad.instances, 1);
    let c = bad.first_counterexample().unwrap();
    assert!(c.lhs && !c.rhs);
    assert!(c.structure.is_some());
}

#[test]
fn equivalence_rejects_open_formulas() {
    let (r, cfg) = (reg(), EvalConfig::default());
    assert!(check_equiv("P(x)", "top", &[2], &p1(), &r, &cfg).is_err());
}

#[test]
fn small_trick_refuses_quantifiers_accepting_the_empty_set() {
    let r = reg();
    let spec = SweepSpec::new(Property::SmallTrick)
        .quantifiers(["never^d"])
        .explicit(["[Q x] P(x)"]);
    let err = run_sweep(&spec, &r).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)), "{err}");
}

#[test]
fn dual_sweep_passes_on_builtins() {
    let r = reg();
    let spec = SweepSpec::new(Property::Dual).sizes([1, 2, 3]);
    let report = run_sweep(&spec, &r).unwrap();
    assert!(report.passed(), "{report}");
}

#[test]
fn dep_from_indep_sweep() {
    let r = reg();
    let spec = SweepSpec::new(Property::DepFromIndep).sizes([2]);
    let report = run_sweep(&spec, &r).unwrap();
    assert!(report.passed(), "{report}");
    assert_eq!(report.instances, 2 * 16);
}

#[test]
fn random_instances_replay_identically() {
    let r = reg();
    let spec = SweepSpec::new(Property::DownwardClosure)
        .dialect(Dialect::Iq)
        .sizes([2, 3])
        .collect_all(true)
        .source(FormulaSource::RandomInstances {
            seed: 7,
            count: 300,
            depth: 2,
        });
    let a = run_sweep(&spec, &r).unwrap();
    let b = run_sweep(&spec, &r).unwrap();
    assert_eq!(a.counterexamples, b.counterexamples);
    assert_eq!(a.instances, 300);
    assert_eq!(a.seed, Some(7));
}

#[test]
fn report_serializes_on_one_line() {
    let r = reg();
    let report = run_sweep(&SweepSpec::new(Property::DepFromIndep), &r).unwrap();
    let line = report.to_json_line();
    assert!(!line.contains('\n'));
    let v: serde_json::Value = serde_json::from_str(&line).unwrap();
    assert_eq!(v["property"], "dep-from-indep");
    assert_eq!(v["verdict"], "pass");
}

#[test]
fn gq_faithfulness_rewrites_only_exists_and_forall() {
    let phi = Formula::gq(
        "most",
        vec!["x".into()],
        Formula::gq("exists", vec!["y".into()], Formula::top()),
    );
    let native = super::probe::native(&phi);
    assert_eq!(native.to_string(), "[most x] E y. top");
}
