use super::*;
use crate::model::parse_structure;
use crate::syntax::{parse_formula, ParseOptions};

fn reg() -> QuantifierRegistry {
    QuantifierRegistry::with_builtins()
}

fn f(text: &str) -> Formula {
    let r = reg();
    parse_formula(text, &ParseOptions::new(Dialect::Iq).registry(&r)).unwrap()
}

fn so(text: &str) -> Formula {
    let r = reg();
    parse_formula(text, &ParseOptions::new(Dialect::Eso).registry(&r)).unwrap()
}

fn team(vars: &[&str], rows: &[&[usize]]) -> Team {
    Team::new(
        vars.iter().map(|s| s.to_string()).collect(),
        &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>(),
    )
    .unwrap()
}

fn holds(m: &Structure, x: &Team, text: &str) -> bool {
    eval_team(m, x, &f(text), &reg(), &EvalConfig::default()).unwrap()
}

#[test]
fn literal_clause() {
    let m = parse_structure("universe 2\nrel P/1 = {1}").unwrap();
    assert!(!holds(&m, &team(&["x"], &[&[0], &[1]]), "P(x)"));
    assert!(holds(&m, &team(&["x"], &[&[1]]), "P(x)"));
}

#[test]
fn dependence_clause() {
    let m = Structure::new(2).unwrap();
    assert!(!holds(&m, &team(&["x", "y"], &[&[0, 0], &[0, 1]]), "dep(x,y)"));
    assert!(holds(&m, &team(&["x", "y"], &[&[0, 0], &[1, 1]]), "dep(x,y)"));
    assert!(holds(&m, &team(&["x"], &[&[1]]), "dep(x)"));
    assert!(!holds(&m, &team(&["x"], &[&[0], &[1]]), "dep(x)"));
}

#[test]
fn negated_dependence_only_on_empty_team() {
    let m = Structure::new(2).unwrap();
    assert!(!holds(&m, &team(&["x", "y"], &[&[0, 0]]), "~dep(x,y)"));
    assert!(holds(&m, &Team::empty(vec!["x".into(), "y".into()]), "~dep(x,y)"));
}

#[test]
fn most_over_unit_team() {
    let m = parse_structure("universe 3\nrel P/1 = {1,2}").unwrap();
    assert!(holds(&m, &Team::unit(), "[most y] P(y)"));
    let m = parse_structure("universe 3\nrel P/1 = {2}").unwrap();
    assert!(!holds(&m, &Team::unit(), "[most y] P(y)"));
}

#[test]
fn independence_atom() {
    let m = Structure::new(2).unwrap();
    assert!(!holds(&m, &team(&["x", "y"], &[&[0, 0], &[1, 1]]), "perp(x;;y)"));
    let full = Team::full(2, vec!["x".into(), "y".into()]).unwrap();
    assert!(holds(&m, &full, "perp(x;;y)"));
}

#[test]
fn empty_team_satisfies_everything() {
    let m = Structure::new(2).unwrap();
    for text in ["bot", "dep(x,y)", "x!=x", "[most y] bot", "E y. bot"] {
        assert!(holds(&m, &Team::empty(vec!["x".into(), "y".into()]), text), "{text}");
    }
    // the domain may lack free variables when the team is empty
    assert!(eval_team(&m, &Team::empty(vec![]), &f("dep(z)"), &reg(), &EvalConfig::default()).unwrap());
    assert!(eval_team(&m, &Team::unit(), &f("dep(z)"), &reg(), &EvalConfig::default()).is_err());
}

#[test]
fn sentences() {
    let m = Structure::new(2).unwrap();
    let cfg = EvalConfig::default();
    assert!(eval_sentence(&m, &f("A x. E y. dep(x,y)"), &reg(), &cfg).unwrap());
    assert!(!eval_sentence(&m, &f("bot"), &reg(), &cfg).unwrap());
    assert!(eval_sentence(&m, &f("top"), &reg(), &cfg).unwrap());
    let m3 = Structure::new(3).unwrap();
    assert!(eval_sentence(&m3, &f("[most x] top"), &reg(), &cfg).unwrap());
    assert!(eval_sentence(&m, &f("dep(x)"), &reg(), &cfg).is_err());
}

#[test]
fn disjunction_modes() {
    // X = {0,1} splits as {0} ∪ {1} under either mode
    let m = Structure::new(2).unwrap();
    let x = team(&["x"], &[&[0], &[1]]);
    assert!(holds(&m, &x, "dep(x) | dep(x)"));
    let strict = EvalConfig::default().with_or_mode(OrMode::Strict);
    assert!(eval_team(&m, &x, &f("dep(x) | dep(x)"), &reg(), &strict).unwrap());
    // a cover needing overlap: both halves need the row (0,0) for independence
    let x = team(&["x", "y"], &[&[0, 0], &[0, 1], &[1, 0]]);
    let phi = f("perp(x;;y) | perp(x;;y)");
    assert!(eval_team(&m, &x, &phi, &reg(), &EvalConfig::default()).unwrap());
}

#[test]
fn existential_modes() {
    let m = Structure::new(2).unwrap();
    let x = team(&["x"], &[&[0], &[1]]);
    // y must equal x and be constant: impossible with a function, also with sets
    assert!(!holds(&m, &x, "E y. dep(y) & x=y"));
    assert!(holds(&m, &x, "E y. dep(x,y) & x=y"));
    let lax = EvalConfig::default().with_exists_mode(ExistsMode::Lax);
    assert!(eval_team(&m, &x, &f("E y. dep(x,y) & x=y"), &reg(), &lax).unwrap());
    assert!(!eval_team(&m, &x, &f("E y. dep(y) & x=y"), &reg(), &lax).unwrap());
}

#[test]
fn fo_evaluation() {
    let m = parse_structure("universe 3\nrel P/1 = {1,2}").unwrap();
    let cfg = EvalConfig::default();
    assert!(eval_fo(&m, &Assignment::empty(), &f("[most y] P(y)"), &reg(), &cfg).unwrap());
    let empty = parse_structure("universe 2\nrel P/1 = {}").unwrap();
    assert!(!eval_fo(&empty, &Assignment::empty(), &f("E x. P(x)"), &reg(), &cfg).unwrap());
    assert!(eval_fo(&m, &Assignment::empty(), &f("dep(x)"), &reg(), &cfg).is_err());
}

#[test]
fn eso_evaluation() {
    let cfg = EvalConfig::default();
    let m = parse_structure("universe 2\nrel P/1 = {1}").unwrap();
    let phi = so("Ef f/1. A x. P(f(x))");
    assert!(eval_eso(&m, &phi, &Interpretation::new(), &reg(), &cfg).unwrap());
    let m0 = parse_structure("universe 2\nrel P/1 = {}").unwrap();
    assert!(!eval_eso(&m0, &phi, &Interpretation::new(), &reg(), &cfg).unwrap());
    let elim = so("ER P/1. (E u. P(u)) & A x. ~P(x) | S(x)");
    let s0 = parse_structure("universe 2\nrel S/1 = {0}").unwrap();
    assert!(eval_eso(&s0, &elim, &Interpretation::new(), &reg(), &cfg).unwrap());
    let s_empty = parse_structure("universe 2\nrel S/1 = {}").unwrap();
    assert!(!eval_eso(&s_empty, &elim, &Interpretation::new(), &reg(), &cfg).unwrap());
}

#[test]
fn eso_free_relation_from_team() {
    let cfg = EvalConfig::default();
    let m = Structure::new(2).unwrap();
    let x = team(&["x", "y"], &[&[0, 0], &[0, 1]]);
    let interp = Interpretation::new().relation("R", x.relation(2).unwrap());
    let phi = so("A x. A y. A u. A v. ~R(x,y) | ~R(u,v) | x!=u | y=v");
    assert!(!eval_eso(&m, &phi, &interp, &reg(), &cfg).unwrap());
    assert!(matches!(
        eval_eso(&m, &phi, &Interpretation::new(), &reg(), &cfg),
        Err(Error::UnknownSymbol(_))
    ));
}

#[test]
fn flatness() {
    let m = parse_structure("universe 2\nrel P/1 = {1}").unwrap();
    let cfg = EvalConfig::default();
    let x = team(&["x"], &[&[0], &[1]]);
    assert!(flatness_check(&m, &x, &f("P(x)"), &reg(), &cfg).unwrap());
    assert!(!eval_team(&m, &x, &f("P(x)"), &reg(), &cfg).unwrap());
}

#[test]
fn caps_are_errors() {
    let m = Structure::new(2).unwrap();
    let cfg = EvalConfig {
        max_witness: 3,
        ..EvalConfig::default()
    };
    let x = team(&["x"], &[&[0], &[1]]);
    assert!(matches!(
        eval_team(&m, &x, &f("E y. top"), &reg(), &cfg),
        Err(Error::CapExceeded { count: 4, .. })
    ));
    let big = Structure::new(5).unwrap();
    assert!(matches!(
        eval_sentence(&big, &f("top"), &reg(), &EvalConfig::default()),
        Err(Error::CapExceeded { .. })
    ));
}

#[test]
fn minimal_search_refuses_independence() {
    let m = Structure::new(2).unwrap();
    let cfg = EvalConfig::default().with_gq_search(GqSearch::Minimal);
    let x = team(&["x", "y"], &[&[0, 0]]);
    assert!(eval_team(&m, &x, &f("perp(x;;y)"), &reg(), &cfg).is_err());
}

#[test]
fn non_monotone_refused_by_default() {
    let mut r = reg();
    r.load_extensional("quant only0/1\non 2 = {{0}}").unwrap();
    let m = Structure::new(2).unwrap();
    let phi = parse_formula("[only0 x] top", &ParseOptions::new(Dialect::Fo).registry(&r)).unwrap();
    assert!(matches!(
        eval_sentence(&m, &phi, &r, &EvalConfig::default()),
        Err(Error::NotMonotone { .. })
    ));
    let unsafe_cfg = EvalConfig {
        allow_non_monotone: true,
        ..EvalConfig::default()
    };
    assert!(eval_sentence(&m, &phi, &r, &unsafe_cfg).unwrap());
}
