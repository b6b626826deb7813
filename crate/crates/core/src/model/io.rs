//! Line-oriented structure and team files.
//!
//! ```text
//! universe 3            # or: universe a b c
//! rel P/1 = {1}
//! rel E/2 = {(0,1),(1,0)}
//! fun f/1 = {0->1, 1->0, 2->2}
//! fun c/0 = {() -> 0}
//! ```
//!
//! A team file starts with `vars x y` and lists one row per line. A header
//! with no rows is the empty team; `vars` followed by `eps` is `{ε}`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

use super::{Function, Relation, Structure, Team};

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

struct Elements {
    n: usize,
    names: Option<BTreeMap<String, usize>>,
}

impl Elements {
    fn parse(&self, tok: &str, line: usize) -> Result<usize> {
        let tok = tok.trim();
        if let Some(names) = &self.names {
            if let Some(&i) = names.get(tok) {
                return Ok(i);
            }
        }
        let v: usize = tok
            .parse()
            .map_err(|_| Error::format(line, format!("unknown element `{tok}`")))?;
        if v >= self.n {
            return Err(Error::format(line, format!("element {v} outside universe of size {}", self.n)));
        }
        Ok(v)
    }

    fn tuple(&self, tok: &str, arity: usize, line: usize) -> Result<Vec<usize>> {
        let tok = tok.trim();
        let inner = match tok.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
            Some(inner) => inner,
            None if arity == 1 => tok,
            None => return Err(Error::format(line, format!("expected a tuple, found `{tok}`"))),
        };
        let parts: Vec<&str> = if inner.trim().is_empty() {
            Vec::new()
        } else {
            inner.split(',').collect()
        };
        if parts.len() != arity {
            return Err(Error::format(
                line,
                format!("tuple `{tok}` has length {}, expected {arity}", parts.len()),
            ));
        }
        parts.into_iter().map(|p| self.parse(p, line)).collect()
    }
}

/// Splits the body of `{a, (b,c), ...}` at top-level commas.
fn split_items(body: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, c) in body.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                out.push(&body[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&body[start..]);
    out.into_iter().map(str::trim).filter(|s| !s.is_empty()).collect()
}

fn symbol_header(rest: &str, line: usize) -> Result<(String, usize, String)> {
    let (head, body) = rest
        .split_once('=')
        .ok_or_else(|| Error::format(line, "expected `NAME/ARITY = {...}`"))?;
    let (name, arity) = head
        .trim()
        .split_once('/')
        .ok_or_else(|| Error::format(line, "expected `NAME/ARITY`"))?;
    let arity = arity
        .trim()
        .parse()
        .map_err(|_| Error::format(line, format!("bad arity `{}`", arity.trim())))?;
    let body = body.trim();
    let inner = body
        .strip_prefix('{')
        .and_then(|b| b.strip_suffix('}'))
        .ok_or_else(|| Error::format(line, "expected `{...}`"))?;
    Ok((name.trim().to_string(), arity, inner.to_string()))
}

pub fn parse_structure(text: &str) -> Result<Structure> {
    let mut m: Option<(Structure, Elements)> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = strip_comment(raw);
        if content.is_empty() {
            continue;
        }
        let (kw, rest) = content.split_once(char::is_whitespace).unwrap_or((content, ""));
        match kw {
            "universe" => {
                if m.is_some() {
                    return Err(Error::format(line, "duplicate `universe` line"));
                }
                let words: Vec<&str> = rest.split_whitespace().collect();
                let elems = match words.as_slice() {
                    [n] if n.bytes().all(|b| b.is_ascii_digit()) => Elements {
                        n: n.parse().map_err(|_| Error::format(line, "bad universe size"))?,
                        names: None,
                    },
                    [] => return Err(Error::format(line, "empty universe")),
                    names => {
                        let map: BTreeMap<String, usize> =
                            names.iter().enumerate().map(|(i, s)| (s.to_string(), i)).collect();
                        if map.len() != names.len() {
                            return Err(Error::format(line, "duplicate element name"));
                        }
                        Elements {
                            n: names.len(),
                            names: Some(map),
                        }
                    }
                };
                let s = Structure::new(elems.n).map_err(|e| Error::format(line, e.to_string()))?;
                m = Some((s, elems));
            }
            "rel" | "fun" => {
                let (s, elems) = m
                    .as_mut()
                    .ok_or_else(|| Error::format(line, "`universe` must come first"))?;
                let (name, arity, body) = symbol_header(rest, line)?;
                let wrap = |e: Error| Error::format(line, e.to_string());
                if s.relation(&name).is_some() || s.function(&name).is_some() {
                    return Err(Error::format(line, format!("`{name}` declared twice")));
                }
                if kw == "rel" {
                    let tuples = split_items(&body)
                        .into_iter()
                        .map(|t| elems.tuple(t, arity, line))
                        .collect::<Result<Vec<_>>>()?;
                    let rel = Relation::from_tuples(elems.n, arity, tuples.iter().map(Vec::as_slice)).map_err(wrap)?;
                    s.set_relation(&name, rel).map_err(wrap)?;
                } else {
                    let len = elems.n.pow(arity as u32);
                    let mut values: Vec<Option<usize>> = vec![None; len];
                    for item in split_items(&body) {
                        let (lhs, rhs) = item
                            .split_once("->")
                            .ok_or_else(|| Error::format(line, format!("expected `args -> value`, found `{item}`")))?;
                        let args = elems.tuple(lhs, arity, line)?;
                        let idx = args.iter().fold(0, |acc, &a| acc * elems.n + a);
                        if values[idx].replace(elems.parse(rhs, line)?).is_some() {
                            return Err(Error::format(line, format!("`{name}` defined twice on `{}`", lhs.trim())));
                        }
                    }
                    let values = values
                        .into_iter()
                        .collect::<Option<Vec<_>>>()
                        .ok_or_else(|| Error::format(line, format!("function `{name}` is not total")))?;
                    let f = Function::from_values(elems.n, arity, values).map_err(wrap)?;
                    s.set_function(&name, f).map_err(wrap)?;
                }
            }
            other => return Err(Error::format(line, format!("unknown directive `{other}`"))),
        }
    }
    m.map(|(s, _)| s).ok_or_else(|| Error::format(1, "missing `universe` line"))
}

pub fn parse_team(text: &str) -> Result<Team> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, strip_comment(l)))
        .filter(|(_, l)| !l.is_empty());
    let (_, header) = lines.next().ok_or_else(|| Error::format(1, "missing `vars` header"))?;
    let vars: Vec<String> = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["vars", names @ ..] => names.iter().map(|s| s.to_string()).collect(),
        _ => return Err(Error::format(1, "team file must start with `vars`")),
    };
    if let Some(bad) = vars.iter().find(|v| !crate::syntax::is_variable_name(v)) {
        return Err(Error::format(1, format!("`{bad}` is not a variable name")));
    }
    let mut rows = Vec::new();
    let mut eps = false;
    for (line, content) in lines {
        if content == "eps" {
            if !vars.is_empty() {
                return Err(Error::format(line, "`eps` only allowed for an empty variable list"));
            }
            eps = true;
            continue;
        }
        let row = content
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| Error::format(line, format!("bad value `{t}`"))))
            .collect::<Result<Vec<_>>>()?;
        if row.len() != vars.len() {
            return Err(Error::format(line, format!("row has {} values, expected {}", row.len(), vars.len())));
        }
        rows.push(row);
    }
    if vars.is_empty() {
        return Ok(if eps { Team::unit() } else { Team::empty(vec![]) });
    }
    Team::new(vars, &rows).map_err(|e| Error::format(1, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Assignment;
    use crate::syntax::Term;

    #[test]
    fn structure_round_trip() {
        let text = "universe 2\nrel P/1 = {1}\nrel E/2 = {(0,1),(1,0)}\nfun f/1 = {0->1, 1->0}\nfun c/0 = {() -> 0}\n";
        let m = parse_structure(text).unwrap();
        assert!(m.relation("P").unwrap().contains(2, &[1]));
        assert!(m.relation("E").unwrap().contains(2, &[1, 0]));
        assert_eq!(m.function("c").unwrap().apply(2, &[]), 0);
        assert_eq!(parse_structure(&m.to_string()).unwrap(), m);
        let s: Assignment = [("x", 0)].into_iter().collect();
        assert_eq!(m.term_value(&s, &Term::app("f", vec![Term::var("x")])).unwrap(), 1);
    }

    #[test]
    fn named_elements() {
        let m = parse_structure("universe a b c\nrel P/1 = {b, c}\n").unwrap();
        assert_eq!(m.size(), 3);
        assert_eq!(m.relation("P").unwrap().tuples(3), vec![vec![1], vec![2]]);
    }

    #[test]
    fn structure_errors() {
        assert!(parse_structure("rel P/1 = {1}").is_err());
        assert!(parse_structure("universe 2\nrel P/1 = {2}").is_err());
        assert!(parse_structure("universe 2\nfun f/1 = {0->1}").is_err());
        assert!(matches!(
            parse_structure("universe 2\nrel E/2 = {(0)}"),
            Err(Error::Format { line: 2, .. })
        ));
    }

    #[test]
    fn team_files() {
        let t = parse_team("vars x y\n0 1\n1 1\n").unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(parse_team(&t.to_string()).unwrap(), t);
        assert_eq!(parse_team("vars x\n").unwrap(), Team::empty(vec!["x".into()]));
        assert_eq!(parse_team("vars\neps\n").unwrap(), Team::unit());
        assert_eq!(parse_team("vars\n").unwrap(), Team::empty(vec![]));
        assert!(parse_team("vars x\n0 1\n").is_err());
        assert!(parse_team("vars x\neps\n").is_err());
    }
}
