//! Text format for polynomial maps.
//!
//! ```text
//! # comment
//! field: Q          (or F5, F7, ...)
//! vars: 3           (optional)
//! H1 = 1*x1^2*x3^1
//! H2 = 1*x1^1*x2^1*x3^1
//! H3 = 1*x2^2*x3^1
//! ```
//!
//! Lines `H<i> = ...` give the components of `H`; lines `F<i> = ...` give a
//! full map `F = x + H` instead (missing `F<i>` default to `x_i`). A `;`
//! separates statements like a newline does. The parser accepts optional
//! coefficients, `^1`, rational coefficients `a/b` and any factor order; the
//! printer always emits the canonical form with every coefficient and
//! exponent written out.

use crate::algebra::{Field, Monomial, PolyMap, Polynomial, Scalar};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;

/// Whether the map text listed `H` or the full map `F = x + H`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum MapKind {
    Components,
    Full,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedMap {
    pub field: Field,
    pub kind: MapKind,
    /// The map exactly as written (`H` or `F`).
    pub map: PolyMap,
}

impl ParsedMap {
    /// The nonlinear part `H`, subtracting the identity from a full map.
    pub fn h(&self) -> Result<PolyMap> {
        match self.kind {
            MapKind::Components => Ok(self.map.clone()),
            MapKind::Full => self.map.minus_identity(),
        }
    }

    /// The full map `F = x + H`.
    pub fn f(&self) -> Result<PolyMap> {
        match self.kind {
            MapKind::Components => self.map.plus_identity(),
            MapKind::Full => Ok(self.map.clone()),
        }
    }
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Parse a field name such as `Q`, `F5` or `F5^2`.
pub fn parse_field(s: &str) -> Result<Field> {
    let s = s.trim();
    if s == "Q" {
        return Ok(Field::rational());
    }
    let bad = || err(1, 1, format!("unknown field `{s}`"));
    let rest = s.strip_prefix('F').ok_or_else(bad)?;
    let (p, k) = match rest.split_once('^') {
        Some((p, k)) => (p, k.parse::<usize>().map_err(|_| bad())?),
        None => (rest, 1),
    };
    let p: u64 = p.parse().map_err(|_| bad())?;
    Field::extension(p, k)
}

struct Statement {
    line: usize,
    col: usize,
    text: String,
}

fn statements(text: &str) -> Vec<Statement> {
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let content = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let mut start = 0;
        for piece in content.split(';') {
            let lead = piece.len() - piece.trim_start().len();
            if !piece.trim().is_empty() {
                out.push(Statement {
                    line: ln + 1,
                    col: start + lead + 1,
                    text: piece.trim_end().trim_start().to_string(),
                });
            }
            start += piece.len() + 1;
        }
    }
    out
}

/// Parse a map. `field_override` (from the command line) must agree with a
/// `field:` header when both are present; with neither, the field is `Q`.
pub fn parse_map(text: &str, field_override: Option<&Field>) -> Result<ParsedMap> {
    let stmts = statements(text);
    let mut header_field: Option<Field> = None;
    let mut vars: Option<usize> = None;
    let mut entries: Vec<(usize, usize, usize, char, String)> = Vec::new();
    for st in &stmts {
        let lower = st.text.to_ascii_lowercase();
        if let Some(rest) = lower.strip_prefix("field:") {
            let f = parse_field(&st.text[st.text.len() - rest.len()..]).map_err(|e| match e {
                Error::Parse { message, .. } => err(st.line, st.col, message),
                other => other,
            })?;
            header_field = Some(f);
            continue;
        }
        if let Some(rest) = lower.strip_prefix("vars:") {
            vars = Some(
                rest.trim()
                    .parse()
                    .map_err(|_| err(st.line, st.col, "expected a variable count"))?,
            );
            continue;
        }
        let Some(eq) = st.text.find('=') else {
            return Err(err(
                st.line,
                st.col,
                "expected `H<i> = ...` or `F<i> = ...`",
            ));
        };
        let label = st.text[..eq].trim();
        let mut chars = label.chars();
        let kind = chars.next().unwrap_or(' ');
        if kind != 'H' && kind != 'F' {
            return Err(err(st.line, st.col, format!("unknown label `{label}`")));
        }
        let idx: usize = chars
            .as_str()
            .parse()
            .ok()
            .filter(|&i| i >= 1)
            .ok_or_else(|| err(st.line, st.col, format!("bad component label `{label}`")))?;
        entries.push((
            st.line,
            st.col + eq + 1,
            idx,
            kind,
            st.text[eq + 1..].to_string(),
        ));
    }
    let field = match (header_field, field_override) {
        (Some(h), Some(o)) if h != *o => {
            return Err(err(
                1,
                1,
                format!("field header {h} contradicts requested field {o}"),
            ))
        }
        (Some(h), _) => h,
        (None, Some(o)) => o.clone(),
        (None, None) => Field::rational(),
    };
    if entries.is_empty() {
        return Err(err(1, 1, "no map components"));
    }
    let kind = entries[0].3;
    if let Some(e) = entries.iter().find(|e| e.3 != kind) {
        return Err(err(e.0, e.1, "cannot mix H and F components"));
    }
    let mut parsed: Vec<(usize, usize, usize, Vec<(Vec<u32>, Scalar)>)> = Vec::new();
    let mut max_var = 0;
    let mut max_idx = 0;
    for (line, col, idx, _, body) in &entries {
        if parsed.iter().any(|p| p.2 == *idx) {
            return Err(err(*line, *col, format!("component {idx} given twice")));
        }
        let terms = parse_expression(body, *line, *col, &field)?;
        for (e, _) in &terms {
            max_var = max_var.max(e.len());
        }
        max_idx = max_idx.max(*idx);
        parsed.push((*line, *col, *idx, terms));
    }
    let n = match vars {
        Some(v) => {
            if max_var > v {
                let (line, col, ..) = parsed
                    .iter()
                    .find(|p| p.3.iter().any(|(e, _)| e.len() > v))
                    .expect("some term uses the variable");
                return Err(err(
                    *line,
                    *col,
                    format!("variable x{max_var} beyond vars: {v}"),
                ));
            }
            v
        }
        None => max_var.max(max_idx),
    };
    let m = if kind == 'F' { n } else { max_idx };
    if kind == 'F' && max_idx > n {
        return Err(err(1, 1, format!("F{max_idx} exceeds the {n} variables")));
    }
    let mut comps: Vec<Polynomial> = (0..m)
        .map(|i| {
            if kind == 'F' {
                Polynomial::var(&field, n, i)
            } else {
                Polynomial::zero(&field, n)
            }
        })
        .collect();
    for (_, _, idx, terms) in parsed {
        comps[idx - 1] = Polynomial::from_terms(
            &field,
            n,
            terms.into_iter().map(|(mut e, c)| {
                e.resize(n, 0);
                (Monomial::new(e), c)
            }),
        );
    }
    Ok(ParsedMap {
        field: field.clone(),
        kind: if kind == 'F' {
            MapKind::Full
        } else {
            MapKind::Components
        },
        map: PolyMap::new(&field, n, comps)?,
    })
}

/// Parse a single polynomial in `nvars` variables.
pub fn parse_polynomial(text: &str, field: &Field, nvars: usize) -> Result<Polynomial> {
    let terms = parse_expression(text, 1, 1, field)?;
    let mut out = Vec::new();
    for (mut e, c) in terms {
        if e.len() > nvars {
            return Err(err(1, 1, format!("x{} beyond {nvars} variables", e.len())));
        }
        e.resize(nvars, 0);
        out.push((Monomial::new(e), c));
    }
    Ok(Polynomial::from_terms(field, nvars, out))
}

struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col0: usize,
    field: &'a Field,
}

impl Lexer<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn error(&self, at: usize, msg: impl Into<String>) -> Error {
        err(self.line, self.col0 + at, msg)
    }

    fn number(&mut self) -> Option<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().ok()
    }

    fn small(&mut self, what: &str) -> Result<u32> {
        self.skip_ws();
        let at = self.pos;
        let n = self
            .number()
            .ok_or_else(|| self.error(at, format!("expected {what}")))?;
        u32::try_from(n).map_err(|_| self.error(at, format!("{what} too large")))
    }

    /// One factor: a number (optionally `a/b`) or `x<i>[^e]`.
    fn factor(&mut self, coeff: &mut Scalar, exps: &mut Vec<u32>) -> Result<()> {
        let at = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let num = self.number().unwrap();
                let mut value = BigRational::from_integer(num);
                if self.peek() == Some('/') {
                    let slash = self.pos;
                    self.pos += 1;
                    let den = self
                        .number()
                        .ok_or_else(|| self.error(slash + 1, "expected a denominator"))?;
                    if den == BigInt::from(0) {
                        return Err(self.error(slash + 1, "zero denominator"));
                    }
                    value /= BigRational::from_integer(den);
                }
                let s = self
                    .field
                    .from_rational(&value)
                    .map_err(|e| self.error(at, e.to_string()))?;
                *coeff = &*coeff * &s;
                Ok(())
            }
            Some('x') => {
                self.pos += 1;
                let vat = self.pos;
                let idx = self.small("a variable index")?;
                if idx == 0 {
                    return Err(self.error(vat, "variables are numbered from x1"));
                }
                let mut e = 1;
                if self.peek() == Some('^') {
                    let caret = self.pos;
                    self.pos += 1;
                    e = self
                        .small("an exponent")
                        .map_err(|_| self.error(caret, "expected an exponent after `^`"))?;
                }
                let i = idx as usize;
                if exps.len() < i {
                    exps.resize(i, 0);
                }
                exps[i - 1] = exps[i - 1]
                    .checked_add(e)
                    .ok_or_else(|| self.error(at, "exponent overflow"))?;
                Ok(())
            }
            Some(c) => Err(self.error(self.pos, format!("unexpected `{c}`"))),
            None => Err(self.error(self.pos, "unexpected end of expression")),
        }
    }
}

fn parse_expression(
    text: &str,
    line: usize,
    col0: usize,
    field: &Field,
) -> Result<Vec<(Vec<u32>, Scalar)>> {
    let mut lx = Lexer {
        chars: text.chars().collect(),
        pos: 0,
        line,
        col0,
        field,
    };
    let mut terms = Vec::new();
    let mut first = true;
    loop {
        let mut sign = field.one();
        match lx.peek() {
            None if first => return Err(lx.error(lx.pos, "empty expression")),
            None => return Err(lx.error(lx.pos, "expected a term after the sign")),
            Some('-') => {
                lx.pos += 1;
                sign = -sign;
            }
            Some('+') => {
                lx.pos += 1;
            }
            _ if !first => unreachable!(),
            _ => {}
        }
        let mut coeff = sign;
        let mut exps = Vec::new();
        lx.factor(&mut coeff, &mut exps)?;
        while lx.peek() == Some('*') {
            lx.pos += 1;
            lx.factor(&mut coeff, &mut exps)?;
        }
        terms.push((exps, coeff));
        first = false;
        match lx.peek() {
            None => break,
            Some('+') | Some('-') => continue,
            Some(c) => return Err(lx.error(lx.pos, format!("unexpected `{c}`"))),
        }
    }
    Ok(terms)
}

/// Canonical text for a map: header, variable count and one line per
/// component, labelled `H` or `F`.
pub fn format_map(map: &PolyMap, kind: MapKind) -> String {
    let label = match kind {
        MapKind::Components => 'H',
        MapKind::Full => 'F',
    };
    let mut s = format!("field: {}\nvars: {}\n", map.field(), map.nvars());
    for (i, c) in map.components().iter().enumerate() {
        s.push_str(&format!("{label}{} = {c}\n", i + 1));
    }
    s
}

/// Component strings without header, for JSON reports.
pub fn component_strings(map: &PolyMap) -> Vec<String> {
    map.components().iter().map(ToString::to_string).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn veronese_representative() {
        let p = parse_map(
            "field: Q\nH1 = 1*x3*x1^2\nH2 = 1*x3*x1^1*x2^1\nH3 = 1*x3*x2^2",
            None,
        )
        .unwrap();
        assert_eq!(p.map.nvars(), 3);
        assert_eq!(p.map.ncomponents(), 3);
        assert_eq!(p.map.component(0).to_string(), "1*x1^2*x3^1");
    }

    #[test]
    fn zero_map() {
        let p = parse_map("H1 = 0", None).unwrap();
        assert!(p.map.is_zero());
        assert_eq!(p.map.nvars(), 1);
    }

    #[test]
    fn dangling_caret() {
        let e = parse_map("H1 = x1^", None).unwrap_err();
        assert_eq!(
            e,
            Error::Parse {
                line: 1,
                column: 8,
                message: "expected an exponent after `^`".into()
            }
        );
    }

    #[test]
    fn field_header_conflict() {
        let f5 = Field::prime(5).unwrap();
        assert!(parse_map("field: Q\nH1 = x1^3", Some(&f5)).is_err());
        let p = parse_map("field: F5\nH1 = 7*x1^3", Some(&f5)).unwrap();
        assert_eq!(p.map.component(0).to_string(), "2*x1^3");
    }

    #[test]
    fn full_map_defaults_to_identity() {
        let p = parse_map("F1 = x1 + x2^3; vars: 2", None).unwrap();
        let h = p.h().unwrap();
        assert_eq!(h.component(0).to_string(), "1*x2^3");
        assert!(h.component(1).is_zero());
    }

    #[test]
    fn round_trip() {
        let text = "field: Q\nvars: 4\nH1 = 3/2*x1^1*x3^1*x4^1 - 1*x2^1*x4^2\nH2 = 0\n";
        let p = parse_map(text, None).unwrap();
        assert_eq!(format_map(&p.map, p.kind), text);
    }
}
