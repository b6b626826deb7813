//! C ABI over the `teamlogic` engine.
//!
//! Every object crosses the boundary as an opaque pointer created by a
//! `*_parse`/`*_new` function and released by the matching `*_free`.
//! Functions return a [`TlStatus`]; on failure the message is kept per
//! thread and read with [`tl_last_error`]. Strings returned to the caller
//! are released with [`tl_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use teamlogic::eval::{eval_eso, eval_sentence, eval_team, EvalConfig, Interpretation};
use teamlogic::harness::check_equiv;
use teamlogic::model::{parse_structure, parse_team, Structure, Team};
use teamlogic::quantifiers::QuantifierRegistry;
use teamlogic::syntax::{parse_formula, Dialect, Formula, ParseOptions, Signature};
use teamlogic::transform::{eso_to_dq, flatten_functions, to_normal_form};
use teamlogic::Error;

/// Result codes. Zero is success; everything else has a message in
/// [`tl_last_error`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Syntax = 3,
    UnknownSymbol = 4,
    UnknownQuantifier = 5,
    Arity = 6,
    Dialect = 7,
    UnboundVariable = 8,
    CapExceeded = 9,
    NotMonotone = 10,
    Precondition = 11,
    Format = 12,
    Io = 13,
    Panic = 14,
}

impl From<&Error> for TlStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Syntax { .. } | Error::NotNnf(_) => TlStatus::Syntax,
            Error::UnknownSymbol(_) => TlStatus::UnknownSymbol,
            Error::UnknownQuantifier(_) => TlStatus::UnknownQuantifier,
            Error::Arity { .. } => TlStatus::Arity,
            Error::Dialect { .. } => TlStatus::Dialect,
            Error::UnboundVariable(_) => TlStatus::UnboundVariable,
            Error::CapExceeded { .. } => TlStatus::CapExceeded,
            Error::NotMonotone { .. } | Error::UndefinedSize { .. } => TlStatus::NotMonotone,
            Error::Precondition(_) => TlStatus::Precondition,
            Error::Format { .. } => TlStatus::Format,
            Error::Io(_) => TlStatus::Io,
        }
    }
}

/// Fragment a formula is parsed in.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TlDialect {
    Dq = 0,
    Iq = 1,
    Fo = 2,
    Eso = 3,
}

impl From<TlDialect> for Dialect {
    fn from(d: TlDialect) -> Self {
        match d {
            TlDialect::Dq => Dialect::Dq,
            TlDialect::Iq => Dialect::Iq,
            TlDialect::Fo => Dialect::Fo,
            TlDialect::Eso => Dialect::Eso,
        }
    }
}

/// Translation targets for [`tl_translate`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TlTarget {
    /// Skolem normal form.
    NormalForm = 0,
    /// A D(Q) sentence, through normal form and flattening.
    Dq = 1,
}

/// Quantifier registry, starting with the builtins.
pub struct TlRegistry(QuantifierRegistry);

/// A finite structure.
pub struct TlStructure(Structure);

/// A team.
pub struct TlTeam(Team);

/// A parsed formula.
pub struct TlFormula(Formula);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

struct Fail(TlStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(TlStatus::from(&e), e.to_string())
    }
}

/// Runs `body`, mapping errors and panics to status codes.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> TlStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            TlStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            TlStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(TlStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(TlStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail(TlStatus::NullPointer, format!("{what} is null")))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(TlStatus::NullPointer, "output pointer is null".into()));
    }
    out.write(value);
    Ok(())
}

/// Boxes `value` into `out`, checking `out` first so nothing leaks.
unsafe fn put_boxed<T>(out: *mut *mut T, value: impl FnOnce() -> Result<T, Fail>) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(TlStatus::NullPointer, "output pointer is null".into()));
    }
    out.write(Box::into_raw(Box::new(value()?)));
    Ok(())
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw()
}

/// Message of the most recent call on this thread if it failed, otherwise
/// null. Valid until the next call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn tl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed, or be null.
#[no_mangle]
pub unsafe extern "C" fn tl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// A registry holding the builtin quantifiers. Never null.
#[no_mangle]
pub extern "C" fn tl_registry_new() -> *mut TlRegistry {
    Box::into_raw(Box::new(TlRegistry(QuantifierRegistry::with_builtins())))
}

/// Registers an extensional quantifier given in the `quant name/k` format.
///
/// # Safety
/// `reg` must be a live registry and `text` a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn tl_registry_load(reg: *mut TlRegistry, text: *const c_char) -> TlStatus {
    guard(|| {
        let reg = reg
            .as_mut()
            .ok_or_else(|| Fail(TlStatus::NullPointer, "registry is null".into()))?;
        reg.0.load_extensional(str_arg(text, "text")?)?;
        Ok(())
    })
}

/// # Safety
/// `reg` must come from [`tl_registry_new`] and not have been freed, or be null.
#[no_mangle]
pub unsafe extern "C" fn tl_registry_free(reg: *mut TlRegistry) {
    if !reg.is_null() {
        drop(Box::from_raw(reg));
    }
}

/// Parses a structure file.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tl_structure_parse(text: *const c_char, out: *mut *mut TlStructure) -> TlStatus {
    guard(|| {
        put_boxed(out, || Ok(TlStructure(parse_structure(str_arg(text, "text")?)?)))
    })
}

/// Number of elements.
///
/// # Safety
/// `m` must be a live structure.
#[no_mangle]
pub unsafe extern "C" fn tl_structure_size(m: *const TlStructure) -> usize {
    m.as_ref().map_or(0, |m| m.0.size())
}

/// # Safety
/// `m` must come from [`tl_structure_parse`] and not have been freed, or be null.
#[no_mangle]
pub unsafe extern "C" fn tl_structure_free(m: *mut TlStructure) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Parses a team file.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tl_team_parse(text: *const c_char, out: *mut *mut TlTeam) -> TlStatus {
    guard(|| {
        put_boxed(out, || Ok(TlTeam(parse_team(str_arg(text, "text")?)?)))
    })
}

/// Number of assignments.
///
/// # Safety
/// `x` must be a live team.
#[no_mangle]
pub unsafe extern "C" fn tl_team_len(x: *const TlTeam) -> usize {
    x.as_ref().map_or(0, |x| x.0.len())
}

/// # Safety
/// `x` must come from [`tl_team_parse`] and not have been freed, or be null.
#[no_mangle]
pub unsafe extern "C" fn tl_team_free(x: *mut TlTeam) {
    if !x.is_null() {
        drop(Box::from_raw(x));
    }
}

/// Parses a formula. With a structure, symbols are checked against its
/// signature; with null, arities are inferred from use.
///
/// # Safety
/// `text` must be a nul-terminated string, `m` null or a live structure,
/// `reg` a live registry, and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tl_formula_parse(
    text: *const c_char,
    dialect: TlDialect,
    m: *const TlStructure,
    reg: *const TlRegistry,
    out: *mut *mut TlFormula,
) -> TlStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        let reg = ref_arg(reg, "registry")?;
        let sig: Option<Signature> = m.as_ref().map(|m| m.0.signature());
        let mut opts = ParseOptions::new(dialect.into()).registry(&reg.0);
        if let Some(sig) = &sig {
            opts = opts.signature(sig);
        }
        put_boxed(out, || Ok(TlFormula(parse_formula(text, &opts)?)))
    })
}

/// The formula in concrete syntax; free with [`tl_string_free`].
///
/// # Safety
/// `phi` must be a live formula.
#[no_mangle]
pub unsafe extern "C" fn tl_formula_to_string(phi: *const TlFormula) -> *mut c_char {
    match phi.as_ref() {
        Some(phi) => c_string(phi.0.to_string()),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `phi` must come from [`tl_formula_parse`] and not have been freed, or be null.
#[no_mangle]
pub unsafe extern "C" fn tl_formula_free(phi: *mut TlFormula) {
    if !phi.is_null() {
        drop(Box::from_raw(phi));
    }
}

/// `M, X ⊨ φ` under the default semantics.
///
/// # Safety
/// All handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tl_eval_team(
    m: *const TlStructure,
    x: *const TlTeam,
    phi: *const TlFormula,
    reg: *const TlRegistry,
    out: *mut bool,
) -> TlStatus {
    guard(|| {
        let (m, x, phi, reg) = (ref_arg(m, "structure")?, ref_arg(x, "team")?, ref_arg(phi, "formula")?, ref_arg(reg, "registry")?);
        let v = eval_team(&m.0, &x.0, &phi.0, &reg.0, &EvalConfig::default())?;
        put(out, v)
    })
}

/// Truth of a sentence of any dialect.
///
/// # Safety
/// All handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tl_eval_sentence(
    m: *const TlStructure,
    phi: *const TlFormula,
    reg: *const TlRegistry,
    out: *mut bool,
) -> TlStatus {
    guard(|| {
        let (m, phi, reg) = (ref_arg(m, "structure")?, ref_arg(phi, "formula")?, ref_arg(reg, "registry")?);
        let cfg = EvalConfig::default();
        let v = if phi.0.dialect() == Dialect::Eso {
            eval_eso(&m.0, &phi.0, &Interpretation::new(), &reg.0, &cfg)?
        } else {
            eval_sentence(&m.0, &phi.0, &reg.0, &cfg)?
        };
        put(out, v)
    })
}

/// Translates an ESO(Q) sentence; the result is a string to free with
/// [`tl_string_free`].
///
/// # Safety
/// `phi` must be a live formula and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tl_translate(phi: *const TlFormula, target: TlTarget, out: *mut *mut c_char) -> TlStatus {
    guard(|| {
        let phi = &ref_arg(phi, "formula")?.0;
        let text = match target {
            TlTarget::NormalForm => to_normal_form(phi)?.output.to_string(),
            TlTarget::Dq => to_normal_form(phi)?
                .then(flatten_functions)?
                .then(eso_to_dq)?
                .output
                .to_string(),
        };
        if out.is_null() {
            return Err(Fail(TlStatus::NullPointer, "output pointer is null".into()));
        }
        out.write(c_string(text));
        Ok(())
    })
}

/// Compares two sentences on every structure over `signature` (e.g.
/// `"P/1,E/2"`) with the given universe sizes. `out` is true when they agree
/// everywhere.
///
/// # Safety
/// Strings must be nul-terminated, `sizes` must point to `n_sizes`
/// elements, `reg` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tl_check_equiv(
    lhs: *const c_char,
    rhs: *const c_char,
    signature: *const c_char,
    sizes: *const usize,
    n_sizes: usize,
    reg: *const TlRegistry,
    out: *mut bool,
) -> TlStatus {
    guard(|| {
        let (lhs, rhs) = (str_arg(lhs, "lhs")?, str_arg(rhs, "rhs")?);
        let sig = Signature::parse_list(str_arg(signature, "signature")?)?;
        if sizes.is_null() && n_sizes > 0 {
            return Err(Fail(TlStatus::NullPointer, "sizes is null".into()));
        }
        let sizes: &[usize] = if n_sizes == 0 { &[] } else { std::slice::from_raw_parts(sizes, n_sizes) };
        let reg = ref_arg(reg, "registry")?;
        let report = check_equiv(lhs, rhs, sizes, &sig, &reg.0, &EvalConfig::default())?;
        put(out, report.passed())
    })
}
