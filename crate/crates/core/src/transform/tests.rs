use super::*;
use crate::eval::{eval_eso, eval_sentence, eval_team, EsoEvaluator, EvalConfig, Interpretation};
use crate::model::{enumerate_structures, enumerate_teams, Assignment, Structure};
use crate::quantifiers::{Quantifier, QuantifierRegistry};
use crate::syntax::{parse_formula, Dialect, Formula, NormalFormSentence, ParseOptions, PrefixEntry, Signature};

fn reg() -> QuantifierRegistry {
    let mut r = QuantifierRegistry::with_builtins();
    r.register(Quantifier::qs([2], false));
    r
}

fn parse(text: &str, dialect: Dialect) -> Formula {
    let r = reg();
    parse_formula(text, &ParseOptions::new(dialect).registry(&r)).unwrap()
}

fn so(text: &str) -> Formula {
    parse(text, Dialect::Eso)
}

fn sig(text: &str) -> Signature {
    Signature::parse_list(text).unwrap()
}

fn structures(sig: &Signature, sizes: &[usize]) -> Vec<Structure> {
    sizes
        .iter()
        .flat_map(|&n| enumerate_structures(sig, n, 1 << 16).unwrap().collect::<Vec<_>>())
        .collect()
}

fn eso_truth(m: &Structure, phi: &Formula) -> bool {
    eval_eso(m, phi, &Interpretation::new(), &reg(), &EvalConfig::default()).unwrap()
}

/// Asserts that two ESO(Q) sentences agree on every structure.
fn assert_eso_equivalent(a: &Formula, b: &Formula, sig: &Signature, sizes: &[usize]) {
    for m in structures(sig, sizes) {
        assert_eq!(eso_truth(&m, a), eso_truth(&m, b), "{a}\n{b}\non {m:?}");
    }
}

fn assert_dq_matches(source: &Formula, dq: &Formula, sig: &Signature, sizes: &[usize]) {
    for m in structures(sig, sizes) {
        let team_side = eval_sentence(&m, dq, &reg(), &EvalConfig::default()).unwrap();
        assert_eq!(eso_truth(&m, source), team_side, "{source}\n{dq}\non {m:?}");
    }
}

#[test]
fn skolem_constant_for_outer_existential() {
    let nf = to_normal_form(&so("E x. A y. E(x,y)")).unwrap().output;
    assert_eq!(nf.functions.len(), 1);
    assert_eq!(nf.functions[0].1, 0);
    assert_eq!(nf.prefix.len(), 1);
    let f = &nf.functions[0].0;
    let y = &nf.prefix_vars()[0];
    assert_eq!(nf.matrix.to_string(), format!("E({f}(),{y})"));
}

#[test]
fn skolem_function_under_gq() {
    let nf = to_normal_form(&so("[most x] E y. E(x,y)")).unwrap().output;
    assert_eq!(nf.functions.len(), 1);
    assert_eq!(nf.functions[0].1, 1);
    assert!(matches!(&nf.prefix[..], [PrefixEntry::Gq { quant, .. }] if quant == "most"));
    let f = &nf.functions[0].0;
    let x = &nf.prefix_vars()[0];
    assert_eq!(nf.matrix.to_string(), format!("E({x},{f}({x}))"));
}

#[test]
fn normal_form_with_relation_quantifier_under_most() {
    let phi = so("[most x] (P(x) | ER R/2. R(x,x))");
    let result = to_normal_form(&phi).unwrap();
    assert_eq!(result.min_universe, 2);
    assert!(result.notes.iter().any(|n| n.rule == "relation-to-functions"));
    assert_eso_equivalent(&phi, &result.output.to_formula(), &sig("P/1"), &[2, 3]);
}

#[test]
fn normal_form_pulls_through_gq() {
    let phi = so("[most x] Ef f/1. P(f(x)) & ~P(x)");
    let result = to_normal_form(&phi).unwrap();
    assert_eq!(result.output.functions[0].1, 2);
    assert_eso_equivalent(&phi, &result.output.to_formula(), &sig("P/1"), &[2, 3]);
}

#[test]
fn normal_form_rejects_open_formula() {
    assert!(to_normal_form(&so("P(x)")).is_err());
}

#[test]
fn flattening_nested_application() {
    let nf = NormalFormSentence::from_formula(&so("Ef f/1. A x. P(f(f(x)))")).unwrap();
    let flat = flatten_functions(&nf).unwrap().output;
    check_flat(&flat).unwrap();
    assert_eq!(flat.functions.len(), 2);
    assert_eq!(flat.prefix.len(), 2);
    let g = &flat.functions[1].0;
    let u = &flat.prefix_vars()[1];
    assert_eq!(
        flat.matrix.to_string(),
        format!("(({u}!=f(x) | P({g}({u}))) & ({u}!=x | {g}({u})=f(x)))")
    );
    assert_eso_equivalent(&nf.to_formula(), &flat.to_formula(), &sig("P/1"), &[2, 3]);
}

#[test]
fn flattening_leaves_flat_input_alone() {
    let nf = NormalFormSentence::from_formula(&so("Ef f/1. A x. P(f(x))")).unwrap();
    let flat = flatten_functions(&nf).unwrap();
    assert_eq!(flat.output, nf);
    assert!(flat.notes.is_empty());
}

#[test]
fn flattening_constant_argument() {
    let phi = so("Ef f/1. A x. E(f(x), f(c()))");
    let nf = NormalFormSentence::from_formula(&phi).unwrap();
    let flat = flatten_functions(&nf).unwrap().output;
    check_flat(&flat).unwrap();
    assert_eso_equivalent(&phi, &flat.to_formula(), &sig("E/2,c/0"), &[2]);
}

#[test]
fn flattening_repeated_variable_and_gq_bound_tuple() {
    let phi = so("Ef f/2. [most x] A y. P(f(x,x)) | P(f(y,x))");
    let nf = NormalFormSentence::from_formula(&phi).unwrap();
    let flat = flatten_functions(&nf).unwrap().output;
    check_flat(&flat).unwrap();
    assert_eso_equivalent(&phi, &flat.to_formula(), &sig("P/1"), &[2, 3]);
}

#[test]
fn dependence_translation_examples() {
    let nf = NormalFormSentence::from_formula(&so("Ef f/1. A x. P(f(x))")).unwrap();
    let dq = eso_to_dq(&nf).unwrap().output;
    let y = &dq_var(&dq);
    assert_eq!(dq.to_string(), format!("A x. E {y}. (dep(x,{y}) & P({y}))"));
    assert_dq_matches(&nf.to_formula(), &dq, &sig("P/1"), &[2, 3]);

    let nf = NormalFormSentence::from_formula(&so("Ef f/1. [most x] P(f(x))")).unwrap();
    let dq = eso_to_dq(&nf).unwrap().output;
    let y = &dq_var(&dq);
    assert_eq!(dq.to_string(), format!("[most x] E {y}. (dep(x,{y}) & P({y}))"));
    assert_dq_matches(&nf.to_formula(), &dq, &sig("P/1"), &[2, 3]);

    let nf = NormalFormSentence::from_formula(&so("Ef c/0. A x. E(x,c())")).unwrap();
    let dq = eso_to_dq(&nf).unwrap().output;
    let y = &dq_var(&dq);
    assert_eq!(dq.to_string(), format!("A x. E {y}. (dep({y}) & E(x,{y}))"));
    assert_dq_matches(&nf.to_formula(), &dq, &sig("E/2"), &[2]);
}

fn dq_var(dq: &Formula) -> String {
    let mut found = None;
    dq.visit(&mut |f| {
        if let Formula::Exists(v, _) = f {
            found.get_or_insert_with(|| v.clone());
        }
    });
    found.unwrap()
}

#[test]
fn dependence_translation_rejects_unflattened() {
    let nf = NormalFormSentence::from_formula(&so("Ef f/1. A x. P(f(f(x)))")).unwrap();
    assert!(eso_to_dq(&nf).is_err());
}

#[test]
fn small_trick_with_size_restricted_quantifier() {
    let phi = so("[qs_2 x] P(x)");
    let total = eso_to_dq_total(&phi, "qs_2", &reg()).unwrap().output;
    assert_dq_matches(&phi, &total, &sig("P/1"), &[2, 3]);
    let bottom = so("[qs_2 x] bot");
    let total = eso_to_dq_total(&bottom, "qs_2", &reg()).unwrap().output;
    assert_dq_matches(&bottom, &total, &sig("P/1"), &[2, 3]);
    // atleast3 accepts nothing at size 2, where moving it over the
    // disjunction goes wrong unless guarded
    let phi = so("([atleast3 x] P(x)) | A y. P(y)");
    let plain = to_normal_form(&phi).unwrap().then(flatten_functions).unwrap().then(eso_to_dq).unwrap();
    let m = Structure::new(2).unwrap().with_relation("P", 1, &[&[0], &[1]]).unwrap();
    assert!(eso_truth(&m, &phi));
    assert!(!eval_sentence(&m, &plain.output, &reg(), &EvalConfig::default()).unwrap());
    let total = eso_to_dq_total(&phi, "atleast3", &reg()).unwrap().output;
    assert_dq_matches(&phi, &total, &sig("P/1"), &[2, 3]);
}

fn team_agreement(phi: &Formula, domain: &[&str], flavor: Flavor, n: usize) {
    let domain: Vec<String> = domain.iter().map(|s| s.to_string()).collect();
    let psi = dq_to_eso(phi, &domain, "R", flavor).unwrap().output;
    if flavor == Flavor::DNegative {
        assert!(only_negative(&psi, "R"), "{psi}");
    }
    let m = Structure::new(n).unwrap();
    let cfg = EvalConfig::default();
    let empty = Interpretation::new().relation("R", crate::model::Relation::empty(n, domain.len()).unwrap());
    let mut ev = EsoEvaluator::new(&m, &psi, &empty, &reg(), &cfg).unwrap();
    for x in enumerate_teams(n, &domain, 1 << 20).unwrap() {
        ev.set_relation("R", &x.relation(n).unwrap()).unwrap();
        let lhs = eval_team(&m, &x, phi, &reg(), &cfg).unwrap();
        assert_eq!(lhs, ev.eval(&Assignment::empty()).unwrap(), "{phi} on {x:?}\n{psi}");
    }
}

#[test]
fn translation_of_dependence_atom() {
    let phi = parse("dep(x,y)", Dialect::Dq);
    let psi = dq_to_eso(&phi, &["x".into(), "y".into()], "R", Flavor::DNegative).unwrap().output;
    let text = psi.to_string();
    assert!(text.starts_with("A x. A y. A "), "{text}");
    assert!(text.contains("~R(x,y) | ~R("), "{text}");
    team_agreement(&phi, &["x", "y"], Flavor::DNegative, 2);
    team_agreement(&phi, &["x", "y"], Flavor::IExact, 2);
}

#[test]
fn translation_of_gq_clause() {
    let phi = parse("[most z] E(x,z)", Dialect::Dq);
    let psi = dq_to_eso(&phi, &["x".into()], "R", Flavor::DNegative).unwrap().output;
    let text = psi.to_string();
    assert!(text.contains("A x. (~R(x) | ([most "), "{text}");
}

#[test]
fn translation_on_empty_team_is_vacuous() {
    let phi = parse("P(x)", Dialect::Dq);
    let psi = dq_to_eso(&phi, &["x".into()], "R", Flavor::DNegative).unwrap().output;
    let m = Structure::new(2).unwrap().with_relation("P", 1, &[]).unwrap();
    let interp = Interpretation::new().relation("R", crate::model::Relation::empty(2, 1).unwrap());
    assert!(eval_eso(&m, &psi, &interp, &reg(), &EvalConfig::default()).unwrap());
}

#[test]
fn translation_agrees_on_all_teams() {
    for text in [
        "E z. dep(x,z) & x!=z",
        "dep(x) | dep(y)",
        "A z. dep(z,x) | x=y",
        "[most z] z=x | dep(y)",
        "~dep(x,y) | x=y",
    ] {
        let phi = parse(text, Dialect::Dq);
        team_agreement(&phi, &["x", "y"], Flavor::DNegative, 2);
        team_agreement(&phi, &["x", "y"], Flavor::IExact, 2);
    }
    for text in ["perp(x;;y)", "perp(x;;y) | perp(y;;x)", "E z. perp(z;x;y) & z!=x", "A z. perp(x;;z)"] {
        let phi = parse(text, Dialect::Iq);
        team_agreement(&phi, &["x", "y"], Flavor::IExact, 2);
        assert!(dq_to_eso(&phi, &["x".into(), "y".into()], "R", Flavor::DNegative).is_err());
    }
}

#[test]
fn translation_sentence_case_uses_nullary_relation() {
    let phi = parse("A x. E y. dep(x,y) & x!=y", Dialect::Dq);
    team_agreement(&phi, &[], Flavor::DNegative, 2);
}

#[test]
fn eliminating_exists() {
    let phi = so("[exists x] S(x)");
    let delta = so("E u. R(u)");
    let out = eliminate_definable_q(&phi, "exists", &delta, &reg()).unwrap().output;
    let text = out.to_string();
    assert!(text.starts_with("ER _P"), "{text}");
    assert!(text.contains("A x. (~_P"), "{text}");
    assert_eso_equivalent(&phi, &out, &sig("S/1"), &[2, 3]);
}

#[test]
fn eliminating_at_least_two() {
    let delta = so("E u. E v. u!=v & R(u) & R(v)");
    let cfg = EvalConfig::default();
    assert_eq!(check_definition("atleast2", &delta, &[1, 2, 3, 4], &reg(), &cfg).unwrap(), None);
    assert!(check_definition("most", &delta, &[4], &reg(), &cfg).unwrap().is_some());
    let phi = so("[atleast2 x] P(x) | A y. [atleast2 z] z!=y");
    let out = eliminate_definable_q(&phi, "atleast2", &delta, &reg()).unwrap().output;
    assert!(!out.quantifiers().contains("atleast2"));
    assert_eso_equivalent(&phi, &out, &sig("P/1"), &[2, 3]);
}

#[test]
fn eliminating_absent_quantifier_is_identity() {
    let phi = so("A x. P(x)");
    let out = eliminate_definable_q(&phi, "exists", &so("E u. R(u)"), &reg()).unwrap();
    assert_eq!(out.output, phi);
    assert!(out.fresh.is_empty());
}

#[test]
fn eliminating_with_wrong_arity_fails() {
    let delta = so("E u. E v. R(u,v)");
    assert!(matches!(
        eliminate_definable_q(&so("[most x] P(x)"), "most", &delta, &reg()),
        Err(crate::Error::Arity { .. })
    ));
}
