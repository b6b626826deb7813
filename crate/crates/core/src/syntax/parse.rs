//! Recursive-descent parser for the ASCII formula grammar.
//!
//! ```text
//! formula  := conj ('|' conj)*
//! conj     := unary ('&' unary)*
//! unary    := quant formula | '(' formula ')' | atom
//! quant    := 'E' var '.' | 'A' var '.' | '[' qname var+ ']'
//!           | 'Ef' fname '/' n '.' | 'ER' Rname '/' n '.'
//! atom     := 'top' | 'bot' | 'dep(' terms ')' | '~dep(' terms ')'
//!           | 'perp(' terms ';' terms ';' terms ')'
//!           | ['~'] Rname '(' terms ')' | term '=' term | term '!=' term
//! ```
//!
//! Quantifier scope extends as far right as possible. Relation names start
//! with an uppercase letter; lowercase identifiers followed by `(` are
//! function applications, bare lowercase identifiers are variables.

use std::collections::BTreeMap;

use super::{is_relation_name, Dialect, Formula, Signature, Term, RESERVED_PREFIX};
use crate::error::{Error, Result};
use crate::quantifiers::QuantifierRegistry;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(usize),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Semi,
    Dot,
    Slash,
    Amp,
    Bar,
    Tilde,
    Eq,
    Neq,
    Eof,
}

fn lex(text: &str, allow_reserved: bool) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBrack,
            ']' => Tok::RBrack,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            '.' => Tok::Dot,
            '/' => Tok::Slash,
            '&' => Tok::Amp,
            '|' => Tok::Bar,
            '~' => Tok::Tilde,
            '=' => Tok::Eq,
            '!' if bytes.get(i + 1) == Some(&b'=') => {
                i += 1;
                Tok::Neq
            }
            c if c.is_ascii_digit() => {
                while i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
                    i += 1;
                }
                let n = text[start..=i].parse().map_err(|_| Error::Syntax {
                    pos: start,
                    msg: "number too large".into(),
                })?;
                Tok::Num(n)
            }
            c if c.is_ascii_alphabetic() || c == RESERVED_PREFIX => {
                while i + 1 < bytes.len()
                    && (bytes[i + 1].is_ascii_alphanumeric()
                        || bytes[i + 1] == b'_'
                        || bytes[i + 1] == b'^')
                {
                    i += 1;
                }
                let word = &text[start..=i];
                if word.starts_with(RESERVED_PREFIX) && !allow_reserved {
                    return Err(Error::Syntax {
                        pos: start,
                        msg: format!("names starting with `{RESERVED_PREFIX}` are reserved"),
                    });
                }
                Tok::Ident(word.to_string())
            }
            other => {
                return Err(Error::Syntax {
                    pos: start,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push((start, tok));
        i += 1;
    }
    out.push((text.len(), Tok::Eof));
    Ok(out)
}

/// Parser configuration.
#[derive(Debug, Clone, Copy)]
pub struct ParseOptions<'a> {
    pub dialect: Dialect,
    /// When present, every free symbol must be declared with matching arity.
    /// When absent, arities only need to be used consistently.
    pub signature: Option<&'a Signature>,
    /// When present, generalized quantifiers must resolve and match arity.
    pub registry: Option<&'a QuantifierRegistry>,
    /// Accept `_`-prefixed names (output of transformations).
    pub allow_reserved: bool,
}

impl<'a> ParseOptions<'a> {
    pub fn new(dialect: Dialect) -> Self {
        ParseOptions {
            dialect,
            signature: None,
            registry: None,
            allow_reserved: false,
        }
    }

    pub fn signature(mut self, sig: &'a Signature) -> Self {
        self.signature = Some(sig);
        self
    }

    pub fn registry(mut self, reg: &'a QuantifierRegistry) -> Self {
        self.registry = Some(reg);
        self
    }

    pub fn allow_reserved(mut self, yes: bool) -> Self {
        self.allow_reserved = yes;
        self
    }
}

/// Parses a D(Q)/I(Q) formula (`Dialect::Iq` admits both atom kinds).
pub fn parse_team_formula(
    text: &str,
    sig: &Signature,
    registry: &QuantifierRegistry,
) -> Result<Formula> {
    parse_formula(
        text,
        &ParseOptions::new(Dialect::Iq)
            .signature(sig)
            .registry(registry),
    )
}

/// Parses an ESO(Q) formula; dependence and independence atoms are rejected.
pub fn parse_so_formula(
    text: &str,
    sig: &Signature,
    registry: &QuantifierRegistry,
) -> Result<Formula> {
    parse_formula(
        text,
        &ParseOptions::new(Dialect::Eso)
            .signature(sig)
            .registry(registry),
    )
}

pub fn parse_formula(text: &str, opts: &ParseOptions<'_>) -> Result<Formula> {
    let toks = lex(text, opts.allow_reserved)?;
    let mut p = Parser {
        toks,
        pos: 0,
        opts,
        scoped: Vec::new(),
        seen: BTreeMap::new(),
    };
    let f = p.formula()?;
    p.expect(&Tok::Eof, "end of input")?;
    f.check_dialect(opts.dialect)?;
    Ok(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SymKind {
    Rel,
    Fun,
}

struct Parser<'a, 'o> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    opts: &'a ParseOptions<'o>,
    /// Second-order symbols bound by enclosing `Ef`/`ER`.
    scoped: Vec<(String, SymKind, usize)>,
    /// Arities of undeclared free symbols seen so far (no-signature mode).
    seen: BTreeMap<String, (SymKind, usize)>,
}

impl Parser<'_, '_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> Result<()> {
        if self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}, found {:?}", self.peek()))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => self.err(format!("expected {what}, found {other:?}")),
        }
    }

    fn variable(&mut self) -> Result<String> {
        let pos = self.offset();
        let name = self.ident("variable")?;
        if !is_variable_name(&name) {
            return Err(Error::Syntax {
                pos,
                msg: format!("`{name}` is not a variable name"),
            });
        }
        Ok(name)
    }

    fn number(&mut self) -> Result<usize> {
        match self.bump() {
            Tok::Num(n) => Ok(n),
            other => self.err(format!("expected arity, found {other:?}")),
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let mut lhs = self.conj()?;
        while self.peek() == &Tok::Bar {
            self.bump();
            let rhs = self.conj()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<Formula> {
        let mut lhs = self.unary()?;
        while self.peek() == &Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::LBrack => self.gq(),
            Tok::Ident(w) if matches!(self.peek_at(1), Tok::Ident(_)) => match w.as_str() {
                "E" | "A" => {
                    self.bump();
                    let v = self.variable()?;
                    self.expect(&Tok::Dot, "`.` after quantified variable")?;
                    let body = self.formula()?;
                    Ok(if w == "E" {
                        Formula::exists(v, body)
                    } else {
                        Formula::forall(v, body)
                    })
                }
                "Ef" | "ER" => self.so_quantifier(w == "ER"),
                _ => self.atom(),
            },
            Tok::Tilde => {
                self.bump();
                let pos = self.offset();
                match self.unary()? {
                    Formula::Lit(mut l) => {
                        l.negated = !l.negated;
                        Ok(Formula::Lit(l))
                    }
                    Formula::Dep(ts) => Ok(Formula::NegDep(ts)),
                    Formula::Indep { .. } => Err(Error::NotNnf(format!(
                        "negated independence atom at {pos} has no defined semantics"
                    ))),
                    _ => Err(Error::NotNnf(format!(
                        "negation at {pos} applied to a non-atomic formula"
                    ))),
                }
            }
            _ => self.atom(),
        }
    }

    fn gq(&mut self) -> Result<Formula> {
        self.expect(&Tok::LBrack, "`[`")?;
        let name_pos = self.offset();
        let quant = self.ident("quantifier name")?;
        let mut vars = Vec::new();
        while self.peek() != &Tok::RBrack {
            vars.push(self.variable()?);
        }
        self.bump();
        if vars.is_empty() {
            return self.err(format!("quantifier `{quant}` binds no variables"));
        }
        if let Some(reg) = self.opts.registry {
            let q = reg.resolve(&quant).map_err(|e| match e {
                Error::UnknownQuantifier(_) => Error::UnknownQuantifier(quant.clone()),
                other => other,
            })?;
            if q.arity() != vars.len() {
                return Err(Error::Arity {
                    symbol: quant,
                    expected: q.arity(),
                    found: vars.len(),
                });
            }
        }
        let mut sorted = vars.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != vars.len() {
            return Err(Error::Syntax {
                pos: name_pos,
                msg: format!("variables bound by `{quant}` must be pairwise distinct"),
            });
        }
        let body = self.formula()?;
        Ok(Formula::gq(quant, vars, body))
    }

    fn so_quantifier(&mut self, relation: bool) -> Result<Formula> {
        self.bump();
        let pos = self.offset();
        let name = self.ident("symbol name")?;
        if relation != is_relation_name(&name) {
            return Err(Error::Syntax {
                pos,
                msg: format!(
                    "`{name}` is not a valid {} name",
                    if relation { "relation" } else { "function" }
                ),
            });
        }
        self.expect(&Tok::Slash, "`/`")?;
        let arity = self.number()?;
        self.expect(&Tok::Dot, "`.`")?;
        let kind = if relation { SymKind::Rel } else { SymKind::Fun };
        self.scoped.push((name.clone(), kind, arity));
        let body = self.formula();
        self.scoped.pop();
        let body = body?;
        Ok(if relation {
            Formula::exists_rel(name, arity, body)
        } else {
            Formula::exists_fn(name, arity, body)
        })
    }

    fn terms_until(&mut self, stops: &[Tok]) -> Result<Vec<Term>> {
        let mut out = Vec::new();
        if stops.contains(self.peek()) {
            return Ok(out);
        }
        loop {
            out.push(self.term()?);
            if self.peek() == &Tok::Comma {
                self.bump();
            } else {
                return Ok(out);
            }
        }
    }

    fn atom(&mut self) -> Result<Formula> {
        let pos = self.offset();
        if let Tok::Ident(w) = self.peek().clone() {
            match w.as_str() {
                "top" => {
                    self.bump();
                    return Ok(Formula::top());
                }
                "bot" => {
                    self.bump();
                    return Ok(Formula::bot());
                }
                "dep" if self.peek_at(1) == &Tok::LParen => {
                    self.bump();
                    self.bump();
                    let ts = self.terms_until(&[Tok::RParen])?;
                    self.expect(&Tok::RParen, "`)`")?;
                    if ts.is_empty() {
                        return Err(Error::Syntax {
                            pos,
                            msg: "dependence atom needs at least one term".into(),
                        });
                    }
                    return Ok(Formula::Dep(ts));
                }
                "perp" if self.peek_at(1) == &Tok::LParen => {
                    self.bump();
                    self.bump();
                    let left = self.terms_until(&[Tok::Semi])?;
                    self.expect(&Tok::Semi, "`;`")?;
                    let cond = self.terms_until(&[Tok::Semi])?;
                    self.expect(&Tok::Semi, "`;`")?;
                    let right = self.terms_until(&[Tok::RParen])?;
                    self.expect(&Tok::RParen, "`)`")?;
                    if left.is_empty() || right.is_empty() {
                        return Err(Error::Syntax {
                            pos,
                            msg: "independence atom needs nonempty outer tuples".into(),
                        });
                    }
                    return Ok(Formula::Indep { left, cond, right });
                }
                _ if is_relation_name(&w) => {
                    self.bump();
                    self.expect(&Tok::LParen, "`(` after relation symbol")?;
                    let args = self.terms_until(&[Tok::RParen])?;
                    self.expect(&Tok::RParen, "`)`")?;
                    self.check_symbol(&w, SymKind::Rel, args.len(), pos)?;
                    return Ok(Formula::rel(w, args));
                }
                _ => {}
            }
        }
        let lhs = self.term()?;
        match self.bump() {
            Tok::Eq => Ok(Formula::eq(lhs, self.term()?)),
            Tok::Neq => Ok(Formula::neq(lhs, self.term()?)),
            other => Err(Error::Syntax {
                pos,
                msg: format!("expected an atom, found term followed by {other:?}"),
            }),
        }
    }

    fn term(&mut self) -> Result<Term> {
        let pos = self.offset();
        let name = self.ident("term")?;
        if is_relation_name(&name) || is_keyword(&name) {
            return Err(Error::Syntax {
                pos,
                msg: format!("`{name}` cannot start a term"),
            });
        }
        if self.peek() == &Tok::LParen {
            self.bump();
            let args = self.terms_until(&[Tok::RParen])?;
            self.expect(&Tok::RParen, "`)`")?;
            self.check_symbol(&name, SymKind::Fun, args.len(), pos)?;
            Ok(Term::App(name, args))
        } else if is_variable_name(&name) {
            Ok(Term::Var(name))
        } else {
            Err(Error::Syntax {
                pos,
                msg: format!("`{name}` is not a variable name"),
            })
        }
    }

    fn check_symbol(&mut self, name: &str, kind: SymKind, arity: usize, pos: usize) -> Result<()> {
        let mismatch = |expected: usize| Error::Arity {
            symbol: name.to_string(),
            expected,
            found: arity,
        };
        if let Some((_, k, a)) = self.scoped.iter().rev().find(|(n, _, _)| n == name) {
            if *k != kind {
                return Err(Error::Syntax {
                    pos,
                    msg: format!("`{name}` used with the wrong kind"),
                });
            }
            return if *a == arity { Ok(()) } else { Err(mismatch(*a)) };
        }
        if let Some(sig) = self.opts.signature {
            let declared = match kind {
                SymKind::Rel => sig.relation_arity(name),
                SymKind::Fun => sig.function_arity(name),
            };
            return match declared {
                Some(a) if a == arity => Ok(()),
                Some(a) => Err(mismatch(a)),
                None => Err(Error::UnknownSymbol(name.to_string())),
            };
        }
        match self.seen.get(name) {
            Some((k, a)) if *k == kind && *a == arity => Ok(()),
            Some((k, _)) if *k != kind => Err(Error::Syntax {
                pos,
                msg: format!("`{name}` used with the wrong kind"),
            }),
            Some((_, a)) => Err(mismatch(*a)),
            None => {
                self.seen.insert(name.to_string(), (kind, arity));
                Ok(())
            }
        }
    }
}

fn is_keyword(w: &str) -> bool {
    matches!(w, "top" | "bot" | "dep" | "perp")
}

/// `[a-z][a-z0-9]*`, optionally behind the reserved prefix.
pub(crate) fn is_variable_name(w: &str) -> bool {
    let core = w.strip_prefix(RESERVED_PREFIX).unwrap_or(w);
    let mut chars = core.chars();
    chars.next().is_some_and(|c| c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit())
        && !is_keyword(w)
}
