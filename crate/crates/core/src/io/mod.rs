//! JSON file formats and the plain-text linear-form format.
//!
//! Text format: forms are separated by `;` or newlines. Within an item,
//! parenthesised factors and bare variables written side by side are separate
//! forms, so a printed defining polynomial such as `x2(x1+x3-x5)(2x1+x2)`
//! parses as three forms. Variables are `x1`, `x_1`, .. and `z`, which is the
//! coordinate after the last `x`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::accuracy::{AccuracyReport, Mode, Verdict};
use crate::arrangement::{Arrangement, ArrangementError, Flat};
use crate::exactmath::{Cyclotomic, ExactError, Field, Rational, Scalar};
use crate::matfree::Evidence;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("scalar {value:?} in hyperplane {index}: {source}")]
    Scalar { index: usize, value: String, source: ExactError },
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrangementFile {
    pub dim: usize,
    pub field: Field,
    pub hyperplanes: Vec<Vec<String>>,
}

/// An arrangement over whichever field the file names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyArrangement {
    Rational(Arrangement<Rational>),
    Cyclotomic(Arrangement<Cyclotomic>),
}

fn strings<S: Scalar>(rows: impl IntoIterator<Item = impl AsRef<[S]>>) -> Vec<Vec<String>> {
    rows.into_iter().map(|r| r.as_ref().iter().map(ToString::to_string).collect()).collect()
}

impl ArrangementFile {
    pub fn from_arrangement<S: Scalar>(a: &Arrangement<S>) -> Self {
        ArrangementFile { dim: a.dim(), field: a.field(), hyperplanes: strings(a.normals()) }
    }

    pub fn parse_scalars<S: Scalar>(&self) -> Result<Arrangement<S>, IoError> {
        let mut rows = Vec::with_capacity(self.hyperplanes.len());
        for (index, h) in self.hyperplanes.iter().enumerate() {
            let row = h
                .iter()
                .map(|v| S::parse_in(v, self.field).map_err(|source| IoError::Scalar { index, value: v.clone(), source }))
                .collect::<Result<Vec<S>, _>>()?;
            rows.push(row);
        }
        Ok(Arrangement::new(self.dim, self.field, rows)?)
    }

    pub fn to_arrangement(&self) -> Result<AnyArrangement, IoError> {
        Ok(match self.field {
            Field::Rational => AnyArrangement::Rational(self.parse_scalars()?),
            Field::Cyclotomic { .. } => AnyArrangement::Cyclotomic(self.parse_scalars()?),
        })
    }
}

/// A flat as its echelon form matrix plus the hyperplanes containing it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatJson {
    pub dim: usize,
    pub forms: Vec<Vec<String>>,
    pub hyperplanes: Vec<usize>,
}

impl FlatJson {
    pub fn new<S: Scalar>(x: &Flat<S>) -> Self {
        FlatJson { dim: x.dim(), forms: strings(x.forms()), hyperplanes: x.contains().ones().collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionJson {
    pub d: usize,
    pub witness: Option<FlatJson>,
    pub exponents: Option<Vec<usize>>,
    pub evidence: Option<Evidence>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportJson {
    pub verdict: Verdict,
    pub mode: Mode,
    pub dimensions: Vec<DimensionJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cap_error: Option<String>,
}

impl ReportJson {
    pub fn new<S: Scalar>(r: &AccuracyReport<S>) -> Self {
        ReportJson {
            verdict: r.verdict,
            mode: r.mode,
            dimensions: r
                .dimensions
                .iter()
                .map(|e| DimensionJson {
                    d: e.d,
                    witness: e.witness.as_ref().map(FlatJson::new),
                    exponents: e.exponents.clone(),
                    evidence: e.evidence,
                })
                .collect(),
            cap_error: r.cap_error.as_ref().map(ToString::to_string),
        }
    }
}

/// Syntax error at a byte offset, with 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

/// Result of parsing linear forms.
#[derive(Debug, Clone)]
pub struct ParsedForms {
    pub arrangement: Arrangement<Rational>,
    /// One message per dropped duplicate.
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Var {
    X(usize),
    Z,
}

type Form = (usize, Vec<(Var, Rational)>);

struct Parser<'a> {
    text: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, offset: usize, message: impl Into<String>) -> ParseError {
        let before = &self.text[..offset.min(self.text.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
        ParseError { offset, line, column, message: message.into() }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    /// Skips spaces and tabs (not newlines, which separate forms).
    fn skip_blank(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\r')) {
            self.pos += 1;
        }
    }

    fn number(&mut self) -> Option<u64> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        (self.pos > start).then(|| self.text[start..self.pos].parse().ok()).flatten()
    }

    fn coefficient(&mut self) -> Result<Option<Rational>, ParseError> {
        let start = self.pos;
        let Some(n) = self.number() else {
            if self.pos > start {
                return Err(self.error(start, "number too large"));
            }
            return Ok(None);
        };
        let mut c = Rational::from_int(n as i64);
        self.skip_blank();
        if self.peek() == Some(b'/') {
            self.pos += 1;
            self.skip_blank();
            let at = self.pos;
            match self.number() {
                Some(0) => return Err(self.error(at, "zero denominator")),
                Some(d) => c = Rational::new(n as i64, d as i64),
                None => return Err(self.error(at, "expected denominator")),
            }
        }
        Ok(Some(c))
    }

    fn variable(&mut self) -> Result<Option<Var>, ParseError> {
        match self.peek() {
            Some(b'z') => {
                self.pos += 1;
                Ok(Some(Var::Z))
            }
            Some(b'x') => {
                let at = self.pos;
                self.pos += 1;
                if self.peek() == Some(b'_') {
                    self.pos += 1;
                }
                let braced = self.peek() == Some(b'{');
                if braced {
                    self.pos += 1;
                }
                let i = match self.number() {
                    Some(i) if i >= 1 => i as usize,
                    _ => return Err(self.error(at, "expected variable index x1, x2, ..")),
                };
                if braced {
                    if self.peek() != Some(b'}') {
                        return Err(self.error(self.pos, "expected '}'"));
                    }
                    self.pos += 1;
                }
                Ok(Some(Var::X(i)))
            }
            _ => Ok(None),
        }
    }

    /// `[+|-] [coef [*]] var` ; `first` allows a missing sign.
    fn term(&mut self, first: bool) -> Result<Option<(Var, Rational)>, ParseError> {
        self.skip_blank();
        let mut sign = Rational::from_int(1);
        match self.peek() {
            Some(b'+') => self.pos += 1,
            Some(b'-') => {
                self.pos += 1;
                sign = -sign;
            }
            _ if !first => return Ok(None),
            _ => {}
        }
        self.skip_blank();
        let at = self.pos;
        let coef = self.coefficient()?;
        self.skip_blank();
        if coef.is_some() && self.peek() == Some(b'*') {
            self.pos += 1;
            self.skip_blank();
        }
        match self.variable()? {
            Some(v) => Ok(Some((v, sign * coef.unwrap_or_else(|| Rational::from_int(1))))),
            None if coef.is_some() => Err(self.error(at, "constant terms are not allowed in linear forms")),
            None => Err(self.error(at, "expected a term")),
        }
    }

    fn form(&mut self) -> Result<Form, ParseError> {
        self.skip_blank();
        let start = self.pos;
        let mut terms = vec![self.term(true)?.expect("first term is mandatory")];
        while let Some(t) = self.term(false)? {
            terms.push(t);
        }
        Ok((start, terms))
    }

    /// One item: a sum, or a product of parenthesised forms and bare
    /// variables.
    fn item(&mut self, out: &mut Vec<Form>) -> Result<(), ParseError> {
        let start = self.pos;
        let rest = &self.text[start..];
        let end = rest.find([';', '\n']).map_or(self.text.len(), |i| start + i);
        if !self.text[start..end].contains('(') {
            out.push(self.form()?);
            return Ok(());
        }
        loop {
            self.skip_blank();
            match self.peek() {
                Some(b'(') => {
                    self.pos += 1;
                    out.push(self.form()?);
                    self.skip_blank();
                    if self.peek() != Some(b')') {
                        return Err(self.error(self.pos, "expected ')'"));
                    }
                    self.pos += 1;
                }
                Some(b'x' | b'z') => {
                    let at = self.pos;
                    let v = self.variable()?.unwrap();
                    out.push((at, vec![(v, Rational::from_int(1))]));
                }
                Some(b'*' | b'.') => self.pos += 1,
                None | Some(b';' | b'\n') => return Ok(()),
                Some(_) => return Err(self.error(self.pos, "expected a factor")),
            }
        }
    }

    fn parse(mut self) -> Result<Vec<Form>, ParseError> {
        let mut out = Vec::new();
        loop {
            self.skip_blank();
            match self.peek() {
                None => return Ok(out),
                Some(b';' | b'\n') => self.pos += 1,
                Some(b'#') => {
                    while !matches!(self.peek(), None | Some(b'\n')) {
                        self.pos += 1;
                    }
                }
                Some(_) => {
                    self.item(&mut out)?;
                    self.skip_blank();
                    match self.peek() {
                        None | Some(b';' | b'\n') => {}
                        Some(_) => return Err(self.error(self.pos, "expected ';' or end of line")),
                    }
                }
            }
        }
    }
}

/// Parse forms in `x1..xl` (and `z`) into a canonical, duplicate-free
/// arrangement. Without `dim` the dimension is the largest `x` index, plus
/// one if `z` occurs.
pub fn parse_linear_forms(text: &str, dim: Option<usize>) -> Result<ParsedForms, IoError> {
    let forms = Parser { text, bytes: text.as_bytes(), pos: 0 }.parse()?;
    let p = Parser { text, bytes: text.as_bytes(), pos: 0 };
    let max_x = forms.iter().flat_map(|(_, t)| t).filter_map(|(v, _)| match v {
        Var::X(i) => Some(*i),
        Var::Z => None,
    });
    let max_x = max_x.max().unwrap_or(0);
    let has_z = forms.iter().flat_map(|(_, t)| t).any(|(v, _)| *v == Var::Z);
    let dim = match dim {
        Some(d) => {
            let need = max_x + usize::from(has_z);
            if d < need {
                return Err(p.error(0, format!("forms need {need} coordinates, got dim {d}")).into());
            }
            d
        }
        None => max_x + usize::from(has_z),
    };
    let z_index = if has_z { dim - 1 } else { dim };
    let mut rows = Vec::with_capacity(forms.len());
    for (at, terms) in &forms {
        let mut v = vec![Rational::from_int(0); dim];
        for (var, c) in terms {
            let i = match var {
                Var::X(i) if *i - 1 < z_index => *i - 1,
                Var::X(i) => return Err(p.error(*at, format!("x{i} collides with z at coordinate {}", z_index + 1)).into()),
                Var::Z => z_index,
            };
            v[i] = &v[i] + c;
        }
        if v.iter().all(|c| *c == Rational::from_int(0)) {
            return Err(p.error(*at, "form is identically zero").into());
        }
        rows.push(v);
    }
    let (arrangement, dropped) = Arrangement::new_reporting_duplicates(dim, Field::Rational, rows)?;
    let warnings = dropped
        .into_iter()
        .map(|i| {
            let e = p.error(forms[i].0, "");
            format!("{}:{}: form {} duplicates an earlier form and was dropped", e.line, e.column, i + 1)
        })
        .collect();
    Ok(ParsedForms { arrangement, warnings })
}

/// One form per line, e.g. `x1 - 1/2*x3`.
pub fn format_linear_forms(a: &Arrangement<Rational>) -> String {
    let mut out = String::new();
    for v in a.normals() {
        let mut first = true;
        for (i, c) in v.iter().enumerate() {
            if *c == Rational::from_int(0) {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if mag != Rational::from_int(1) {
                out.push_str(&format!("{mag}*"));
            }
            out.push_str(&format!("x{}", i + 1));
            first = false;
        }
        out.push('\n');
    }
    out
}
