//! Plain-text `.pvs` and `.bell` files.
//!
//! ```text
//! pvs n=3 m=2,2,2
//! 0:0 0:0 0:0
//! 0:1 1:1 1:0
//! ```
//!
//! ```text
//! bell n=3 m=2,2,2 bound=1/1
//! 1/1 000|000
//! 1/1 110|011
//! ```
//!
//! Blank lines and text after `#` are ignored.

use std::fmt::Write as _;

use thiserror::Error;

use crate::bellgen::{BellError, BellInequality, BellTerm, Scenario};
use crate::pvset::{LocalVector, ProductVector, ProductVectorSet, PvsError};
use crate::rational::{parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing header line")]
    MissingHeader,
    #[error("stated bound {stated} differs from the classical bound {computed}")]
    BoundMismatch { stated: String, computed: String },
    #[error(transparent)]
    Pvs(#[from] PvsError),
    #[error(transparent)]
    Bell(#[from] BellError),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

/// Non-empty lines with comments stripped, numbered from 1.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

struct Header {
    n: usize,
    m: Vec<usize>,
    bound: Option<Rational>,
}

fn parse_header(line: usize, text: &str, kind: &str) -> Result<Header, FormatError> {
    let mut parts = text.split_whitespace();
    if parts.next() != Some(kind) {
        return Err(syntax(line, format!("expected `{kind}` header")));
    }
    let (mut n, mut m, mut bound) = (None, None, None);
    for p in parts {
        let (key, value) = p
            .split_once('=')
            .ok_or_else(|| syntax(line, format!("expected key=value, found {p:?}")))?;
        match key {
            "n" => n = Some(value.parse::<usize>().map_err(|_| syntax(line, "bad party count"))?),
            "m" => {
                m = Some(
                    value
                        .split(',')
                        .map(|v| v.parse::<usize>())
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|_| syntax(line, "bad basis or setting counts"))?,
                )
            }
            "bound" if kind == "bell" => {
                bound = Some(parse_rational(value).map_err(|e| syntax(line, e.to_string()))?)
            }
            _ => return Err(syntax(line, format!("unknown key {key:?}"))),
        }
    }
    let n = n.ok_or_else(|| syntax(line, "missing n="))?;
    let m = m.ok_or_else(|| syntax(line, "missing m="))?;
    if m.len() != n {
        return Err(syntax(line, format!("m lists {} parties, n={n}", m.len())));
    }
    if kind == "bell" && bound.is_none() {
        return Err(syntax(line, "missing bound="));
    }
    Ok(Header { n, m, bound })
}

pub fn read_pvs(text: &str) -> Result<ProductVectorSet, FormatError> {
    let mut lines = content_lines(text);
    let (hl, head) = lines.next().ok_or(FormatError::MissingHeader)?;
    let h = parse_header(hl, head, "pvs")?;
    let mut vectors = Vec::new();
    for (ln, l) in lines {
        let locals = l
            .split_whitespace()
            .map(|tok| {
                let (b, e) = tok
                    .split_once(':')
                    .ok_or_else(|| syntax(ln, format!("expected basis:element, found {tok:?}")))?;
                let b = b.parse::<usize>().map_err(|_| syntax(ln, format!("bad basis in {tok:?}")))?;
                let e = e.parse::<u8>().map_err(|_| syntax(ln, format!("bad element in {tok:?}")))?;
                Ok(LocalVector::new(b, e))
            })
            .collect::<Result<Vec<_>, FormatError>>()?;
        if locals.len() != h.n {
            return Err(syntax(ln, format!("expected {} tokens, found {}", h.n, locals.len())));
        }
        vectors.push(ProductVector::new(locals));
    }
    Ok(ProductVectorSet::new(h.m, vectors)?)
}

pub fn write_pvs(set: &ProductVectorSet) -> String {
    let m: Vec<String> = set.bases_per_party().iter().map(|m| m.to_string()).collect();
    let mut out = format!("pvs n={} m={}\n", set.parties(), m.join(","));
    for v in set.vectors() {
        let toks: Vec<String> = v.locals().iter().map(|l| format!("{}:{}", l.basis, l.element)).collect();
        out.push_str(&toks.join(" "));
        out.push('\n');
    }
    out
}

/// Always `p/q`, including integers.
pub fn fraction(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn digits(line: usize, s: &str, n: usize) -> Result<Vec<u8>, FormatError> {
    if s.len() != n {
        return Err(syntax(line, format!("expected {n} digits, found {s:?}")));
    }
    s.chars()
        .map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(|| syntax(line, format!("bad digit in {s:?}"))))
        .collect()
}

/// Reads a `.bell` file; the stated bound must equal the classical bound.
pub fn read_bell(text: &str) -> Result<BellInequality, FormatError> {
    let mut lines = content_lines(text);
    let (hl, head) = lines.next().ok_or(FormatError::MissingHeader)?;
    let h = parse_header(hl, head, "bell")?;
    let scenario = Scenario::new(h.m)?;
    let mut terms = Vec::new();
    for (ln, l) in lines {
        let mut parts = l.split_whitespace();
        let (Some(w), Some(label), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(syntax(ln, "expected `<weight> <a>|<x>`"));
        };
        let weight = parse_rational(w).map_err(|e| syntax(ln, e.to_string()))?;
        let (a, x) = label
            .split_once('|')
            .ok_or_else(|| syntax(ln, format!("expected a|x, found {label:?}")))?;
        let outcomes = digits(ln, a, h.n)?;
        let settings = digits(ln, x, h.n)?.into_iter().map(usize::from).collect();
        terms.push(BellTerm::new(outcomes, settings, weight));
    }
    let ineq = BellInequality::new(scenario, terms)?;
    let stated = h.bound.expect("header checked");
    if stated != ineq.classical_bound {
        return Err(FormatError::BoundMismatch {
            stated: fraction(&stated),
            computed: fraction(&ineq.classical_bound),
        });
    }
    Ok(ineq)
}

pub fn write_bell(ineq: &BellInequality) -> String {
    let sc = &ineq.scenario;
    let m: Vec<String> = sc.settings().iter().map(|m| m.to_string()).collect();
    let mut out = format!(
        "bell n={} m={} bound={}\n",
        sc.parties(),
        m.join(","),
        fraction(&ineq.classical_bound)
    );
    for t in &ineq.terms {
        let _ = writeln!(out, "{} {}", fraction(&t.weight), t.label());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bellgen::build_inequality;
    use crate::rational::rat;

    const SHIFTS_PVS: &str = "pvs n=3 m=2,2,2\n0:0 0:0 0:0\n0:1 1:1 1:0\n1:0 0:1 1:1\n1:1 1:0 0:1\n";

    #[test]
    fn shifts_file() {
        let s = read_pvs(SHIFTS_PVS).unwrap();
        assert_eq!(s.to_symbols(), vec!["000", "1ēe", "e1ē", "ēe1"]);
        assert_eq!(write_pvs(&s), SHIFTS_PVS);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# Shifts\n\npvs n=3 m=2,2,2  # header\n0:0 0:0 0:0\n\n0:1 1:1 1:0 # second\n";
        assert_eq!(read_pvs(text).unwrap().len(), 2);
    }

    #[test]
    fn bell_round_trip() {
        let s = read_pvs(SHIFTS_PVS).unwrap();
        let b = build_inequality(&s, Some(&[rat(1, 1), rat(1, 2), rat(2, 3), rat(3, 4)])).unwrap();
        let text = write_bell(&b);
        assert!(text.starts_with("bell n=3 m=2,2,2 bound=1/1\n1/1 000|000\n1/2 110|011\n"));
        assert_eq!(read_bell(&text).unwrap(), b);
    }

    #[test]
    fn errors() {
        assert_eq!(read_pvs(""), Err(FormatError::MissingHeader));
        assert!(matches!(read_pvs("pvs n=2 m=2\n"), Err(FormatError::Syntax { line: 1, .. })));
        assert!(matches!(
            read_pvs("pvs n=2 m=2,2\n0:0 0:0\n0:0\n"),
            Err(FormatError::Syntax { line: 3, .. })
        ));
        assert!(matches!(read_pvs("pvs n=2 m=2,2\n0:0 0:0\n0:0 0:0\n"), Err(FormatError::Pvs(_))));
        assert!(matches!(
            read_bell("bell n=2 m=2,2 bound=2/1\n1/1 00|00\n"),
            Err(FormatError::BoundMismatch { .. })
        ));
        assert!(matches!(read_bell("bell n=2 m=2,2 bound=1\n1/1 0|00\n"), Err(FormatError::Syntax { line: 2, .. })));
    }
}
