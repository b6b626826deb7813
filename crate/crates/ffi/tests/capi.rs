use std::ffi::{CStr, CString};
use std::ptr;

use teamlogic_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = tl_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

struct Fixture {
    reg: *mut TlRegistry,
    m: *mut TlStructure,
    x: *mut TlTeam,
}

impl Fixture {
    fn new() -> Self {
        let reg = tl_registry_new();
        let (mut m, mut x) = (ptr::null_mut(), ptr::null_mut());
        unsafe {
            assert_eq!(tl_structure_parse(c("universe 2\nrel P/1 = {1}\n").as_ptr(), &mut m), TlStatus::Ok);
            assert_eq!(tl_team_parse(c("vars x y\n0 0\n1 0\n").as_ptr(), &mut x), TlStatus::Ok);
        }
        Fixture { reg, m, x }
    }

    fn formula(&self, text: &str, dialect: TlDialect) -> Result<*mut TlFormula, TlStatus> {
        let mut phi = ptr::null_mut();
        match unsafe { tl_formula_parse(c(text).as_ptr(), dialect, self.m, self.reg, &mut phi) } {
            TlStatus::Ok => Ok(phi),
            status => Err(status),
        }
    }

    fn eval(&self, text: &str) -> bool {
        let phi = self.formula(text, TlDialect::Iq).unwrap();
        let mut out = false;
        unsafe {
            assert_eq!(tl_eval_team(self.m, self.x, phi, self.reg, &mut out), TlStatus::Ok);
            tl_formula_free(phi);
        }
        out
    }
}

impl Drop for Fixture {
    fn drop(&mut self) {
        unsafe {
            tl_team_free(self.x);
            tl_structure_free(self.m);
            tl_registry_free(self.reg);
        }
    }
}

#[test]
fn handles_report_their_contents() {
    let f = Fixture::new();
    unsafe {
        assert_eq!(tl_structure_size(f.m), 2);
        assert_eq!(tl_team_len(f.x), 2);
    }
}

#[test]
fn team_evaluation() {
    let f = Fixture::new();
    assert!(f.eval("dep(y)"));
    assert!(!f.eval("dep(x)"));
    assert!(f.eval("~P(y)"));
    assert!(f.eval("perp(x;;y)"));
}

#[test]
fn sentence_evaluation_in_every_dialect() {
    let f = Fixture::new();
    for (text, dialect, want) in [
        ("E x. P(x)", TlDialect::Fo, true),
        ("A x. P(x)", TlDialect::Fo, false),
        ("[most x] P(x)", TlDialect::Dq, false),
        ("Ef g/0. P(g())", TlDialect::Eso, true),
        ("ER S/1. (A x. S(x) & E x. ~S(x))", TlDialect::Eso, false),
    ] {
        let phi = f.formula(text, dialect).unwrap();
        let mut out = !want;
        unsafe {
            assert_eq!(tl_eval_sentence(f.m, phi, f.reg, &mut out), TlStatus::Ok, "{text}");
            tl_formula_free(phi);
        }
        assert_eq!(out, want, "{text}");
    }
}

#[test]
fn formulas_print_back() {
    let f = Fixture::new();
    let phi = f.formula("A x.  dep(x , y)", TlDialect::Dq).unwrap();
    unsafe {
        let s = tl_formula_to_string(phi);
        assert_eq!(CStr::from_ptr(s).to_str().unwrap(), "A x. dep(x,y)");
        tl_string_free(s);
        tl_formula_free(phi);
    }
}

#[test]
fn errors_map_to_codes_with_messages() {
    let f = Fixture::new();
    assert_eq!(f.formula("P(x", TlDialect::Fo).unwrap_err(), TlStatus::Syntax);
    assert!(last_error().contains("syntax error"));
    assert_eq!(f.formula("Q(x)", TlDialect::Fo).unwrap_err(), TlStatus::UnknownSymbol);
    assert_eq!(f.formula("P(x,y)", TlDialect::Fo).unwrap_err(), TlStatus::Arity);
    assert_eq!(f.formula("[nope x] P(x)", TlDialect::Fo).unwrap_err(), TlStatus::UnknownQuantifier);
    assert_eq!(f.formula("dep(x)", TlDialect::Fo).unwrap_err(), TlStatus::Dialect);
    // success clears the message
    f.formula("P(x)", TlDialect::Fo).map(|p| unsafe { tl_formula_free(p) }).unwrap();
    assert!(tl_last_error().is_null());

    let mut m = ptr::null_mut();
    assert_eq!(unsafe { tl_structure_parse(c("universe 2\nrel P/1 = {7}\n").as_ptr(), &mut m) }, TlStatus::Format);
    assert!(m.is_null());
}

#[test]
fn null_pointers_are_rejected() {
    let f = Fixture::new();
    let mut out = false;
    unsafe {
        assert_eq!(tl_eval_team(f.m, ptr::null(), ptr::null(), f.reg, &mut out), TlStatus::NullPointer);
        assert_eq!(tl_structure_parse(ptr::null(), ptr::null_mut()), TlStatus::NullPointer);
        assert_eq!(tl_structure_parse(c("universe 1").as_ptr(), ptr::null_mut()), TlStatus::NullPointer);
        assert_eq!(tl_registry_load(ptr::null_mut(), c("").as_ptr()), TlStatus::NullPointer);
        tl_string_free(ptr::null_mut());
        tl_formula_free(ptr::null_mut());
    }
    assert!(last_error().contains("null"));
}

#[test]
fn invalid_utf8_is_rejected() {
    let bytes = [0xffu8, 0xfe, 0];
    let mut m = ptr::null_mut();
    let status = unsafe { tl_structure_parse(bytes.as_ptr().cast(), &mut m) };
    assert_eq!(status, TlStatus::InvalidUtf8);
}

#[test]
fn extensional_quantifiers_load() {
    let f = Fixture::new();
    unsafe {
        assert_eq!(tl_registry_load(f.reg, c("quant big/1\non 2 = {{0,1}}\n").as_ptr()), TlStatus::Ok);
        assert_eq!(tl_registry_load(f.reg, c("quant broken").as_ptr()), TlStatus::Format);
    }
    let phi = f.formula("[big x] (P(x) | ~P(x))", TlDialect::Fo).unwrap();
    let mut out = false;
    unsafe {
        assert_eq!(tl_eval_sentence(f.m, phi, f.reg, &mut out), TlStatus::Ok);
        tl_formula_free(phi);
    }
    assert!(out);
}

#[test]
fn translation_and_equivalence() {
    let reg = tl_registry_new();
    let src = "Ef f/1. A x. P(f(x))";
    let mut phi = ptr::null_mut();
    unsafe {
        assert_eq!(tl_formula_parse(c(src).as_ptr(), TlDialect::Eso, ptr::null(), reg, &mut phi), TlStatus::Ok);
        let mut out = ptr::null_mut();
        assert_eq!(tl_translate(phi, TlTarget::Dq, &mut out), TlStatus::Ok);
        let dq = CStr::from_ptr(out).to_str().unwrap().to_string();
        tl_string_free(out);
        assert!(dq.contains("dep("), "{dq}");

        // reserved names cannot be reparsed, so compare a renamed copy
        let renamed = c(&dq.replace('_', "w"));
        let sizes = [2usize, 3];
        let mut same = false;
        let status = tl_check_equiv(c(src).as_ptr(), renamed.as_ptr(), c("P/1").as_ptr(), sizes.as_ptr(), 2, reg, &mut same);
        assert_eq!(status, TlStatus::Ok);
        assert!(same);
        let status = tl_check_equiv(c("top").as_ptr(), c("bot").as_ptr(), c("P/1").as_ptr(), sizes.as_ptr(), 2, reg, &mut same);
        assert_eq!(status, TlStatus::Ok);
        assert!(!same);

        let mut nf = ptr::null_mut();
        assert_eq!(tl_translate(phi, TlTarget::NormalForm, &mut nf), TlStatus::Ok);
        assert!(CStr::from_ptr(nf).to_str().unwrap().starts_with("Ef "));
        tl_string_free(nf);
        tl_formula_free(phi);
        tl_registry_free(reg);
    }
}

#[test]
fn errors_are_per_thread() {
    let f = Fixture::new();
    assert!(f.formula("P(", TlDialect::Fo).is_err());
    let other = std::thread::spawn(|| tl_last_error().is_null()).join().unwrap();
    assert!(other);
    assert!(!tl_last_error().is_null());
}
