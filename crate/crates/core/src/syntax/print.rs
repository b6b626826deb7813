use std::fmt::{self, Display, Formatter, Write};

use super::{Atom, Formula, Literal, NormalFormSentence, PrefixEntry, Term};

fn join(f: &mut Formatter<'_>, items: &[Term], sep: &str) -> fmt::Result {
    for (i, t) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{t}")?;
    }
    Ok(())
}

impl Display for Term {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::App(name, args) => {
                write!(f, "{name}(")?;
                join(f, args, ",")?;
                f.write_char(')')
            }
        }
    }
}

impl Display for Literal {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match (&self.atom, self.negated) {
            (Atom::Eq(a, b), false) => write!(f, "{a}={b}"),
            (Atom::Eq(a, b), true) => write!(f, "{a}!={b}"),
            (atom, neg) => {
                if neg {
                    f.write_char('~')?;
                }
                match atom {
                    Atom::Rel(r, args) => {
                        write!(f, "{r}(")?;
                        join(f, args, ",")?;
                        f.write_char(')')
                    }
                    Atom::Top => f.write_str("top"),
                    Atom::Bot => f.write_str("bot"),
                    Atom::Eq(..) => unreachable!(),
                }
            }
        }
    }
}

/// Operands of a binary connective that are quantified are wrapped in
/// parentheses, since quantifier scope otherwise runs to the right.
struct Operand<'a>(&'a Formula);

impl Display for Operand<'_> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if self.0.is_quantifier() {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Display for Formula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Lit(l) => write!(f, "{l}"),
            Formula::Dep(ts) => {
                f.write_str("dep(")?;
                join(f, ts, ",")?;
                f.write_char(')')
            }
            Formula::NegDep(ts) => {
                f.write_str("~dep(")?;
                join(f, ts, ",")?;
                f.write_char(')')
            }
            Formula::Indep { left, cond, right } => {
                f.write_str("perp(")?;
                join(f, left, ",")?;
                f.write_str("; ")?;
                join(f, cond, ",")?;
                f.write_str("; ")?;
                join(f, right, ",")?;
                f.write_char(')')
            }
            Formula::And(a, b) => write!(f, "({} & {})", Operand(a), Operand(b)),
            Formula::Or(a, b) => write!(f, "({} | {})", Operand(a), Operand(b)),
            Formula::Exists(v, body) => write!(f, "E {v}. {body}"),
            Formula::Forall(v, body) => write!(f, "A {v}. {body}"),
            Formula::Gq { quant, vars, body } => write!(f, "[{quant} {}] {body}", vars.join(" ")),
            Formula::ExistsFn { name, arity, body } => write!(f, "Ef {name}/{arity}. {body}"),
            Formula::ExistsRel { name, arity, body } => write!(f, "ER {name}/{arity}. {body}"),
        }
    }
}

impl Display for PrefixEntry {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            PrefixEntry::Forall(v) => write!(f, "A {v}."),
            PrefixEntry::Gq { quant, vars } => write!(f, "[{quant} {}]", vars.join(" ")),
        }
    }
}

impl NormalFormSentence {
    /// The quantifier prefix alone, e.g. `Ef f/1. A x. [most y]`.
    pub fn prefix_string(&self) -> String {
        let mut parts: Vec<String> = self
            .functions
            .iter()
            .map(|(name, k)| format!("Ef {name}/{k}."))
            .collect();
        parts.extend(self.prefix.iter().map(ToString::to_string));
        parts.join(" ")
    }
}

impl Display for NormalFormSentence {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse_formula, Dialect, ParseOptions};
    use super::*;

    fn v(s: &str) -> Term {
        Term::var(s)
    }

    #[test]
    fn prints_dep_atom() {
        assert_eq!(Formula::Dep(vec![v("x"), v("y")]).to_string(), "dep(x,y)");
    }

    #[test]
    fn prints_conjunction_chain() {
        let f = Formula::and_all([
            Formula::rel("P", vec![v("x")]),
            Formula::not_rel("P", vec![v("y")]),
            Formula::neq(v("x"), v("y")),
        ]);
        assert_eq!(f.to_string(), "((P(x) & ~P(y)) & x!=y)");
    }

    #[test]
    fn prints_normal_form_prefix() {
        let nf = NormalFormSentence::new(
            vec![("f".into(), 1)],
            vec![
                PrefixEntry::Forall("x".into()),
                PrefixEntry::Gq {
                    quant: "most".into(),
                    vars: vec!["y".into()],
                },
            ],
            Formula::top(),
        )
        .unwrap();
        assert_eq!(nf.prefix_string(), "Ef f/1. A x. [most y]");
        assert_eq!(nf.to_string(), "Ef f/1. A x. [most y] top");
    }

    #[test]
    fn quantified_operand_is_parenthesized() {
        let f = Formula::and(
            Formula::exists("x", Formula::rel("P", vec![v("x")])),
            Formula::rel("P", vec![v("y")]),
        );
        let text = f.to_string();
        assert_eq!(text, "((E x. P(x)) & P(y))");
        let back = parse_formula(&text, &ParseOptions::new(Dialect::Fo)).unwrap();
        assert_eq!(back, f);
    }
}
