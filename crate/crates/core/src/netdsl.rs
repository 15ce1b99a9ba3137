//! The `.unet` netlist format.
//!
//! One statement per line, `#` starts a comment, keywords are
//! case-insensitive, and ops are listed in the order they act:
//!
//! ```text
//! register 3
//! a    1 2 1.0 pi/2 pi/2       # control target phi alpha theta
//! ainv 2 3 1.0 0.25 0.125
//! v    1 2 3 1.0 pi/2 0.9      # c1 c2 target phi alpha theta
//! vbar 1 2 3 1.0 pi/2 0.9
//! p    1 2 3 1.0               # c1 c2 target phi
//! q    1 2 3
//! rz   1 2 3 -0.5              # c1 c2 target beta
//! ```
//!
//! Angles are radians: a decimal number, `pi`, a coefficient glued to `pi`
//! (`2pi`, `-pi`), or a chain of those joined by `*` and `/` (`pi/2`,
//! `2pi*0.618`).

use std::f64::consts::PI;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gates::{GateParams, Placement, MAX_WIDTH};
use crate::matcore::{CMat, StateVec};
use crate::synth::{eval_network, eval_on_state, EvalMode, GateKind, NetOp, Network, OpParams};

pub type Document = Network;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ParseErrorKind {
    Syntax,
    BadIndex,
    BadParam,
    DuplicateQubit,
    UnknownGate,
    MissingHeader,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParseErrorKind::Syntax => "SYNTAX",
            ParseErrorKind::BadIndex => "BAD_INDEX",
            ParseErrorKind::BadParam => "BAD_PARAM",
            ParseErrorKind::DuplicateQubit => "DUPLICATE_QUBIT",
            ParseErrorKind::UnknownGate => "UNKNOWN_GATE",
            ParseErrorKind::MissingHeader => "MISSING_HEADER",
        })
    }
}

/// First error in a netlist. `line` and `column` are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("{line}:{column}: {kind}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
}

impl Line<'_> {
    fn error(&self, column: usize, kind: ParseErrorKind, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.number,
            column,
            message: message.into(),
            kind,
        }
    }
}

fn tokenize(text: &str) -> impl Iterator<Item = Line<'_>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start = None;
        for (pos, ch) in body
            .char_indices()
            .chain(std::iter::once((body.len(), ' ')))
        {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(pos),
                (true, Some(s)) => {
                    tokens.push(Token {
                        text: &body[s..pos],
                        column: body[..s].chars().count() + 1,
                    });
                    start = None;
                }
                _ => {}
            }
        }
        (!tokens.is_empty()).then_some(Line {
            number: i + 1,
            tokens,
        })
    })
}

pub fn parse(text: &str) -> Result<Document, ParseError> {
    let mut lines = tokenize(text);
    let header = lines.next().ok_or(ParseError {
        line: 1,
        column: 1,
        message: "expected `register <width>` before any gate".into(),
        kind: ParseErrorKind::MissingHeader,
    })?;
    let width = parse_header(&header)?;
    let mut doc = Network::new(width);
    for line in lines {
        doc.push(parse_op(&line, width)?);
    }
    Ok(doc)
}

fn parse_header(line: &Line<'_>) -> Result<usize, ParseError> {
    let head = line.tokens[0];
    if !head.text.eq_ignore_ascii_case("register") {
        return Err(line.error(
            head.column,
            ParseErrorKind::MissingHeader,
            format!("expected `register <width>`, found `{}`", head.text),
        ));
    }
    if line.tokens.len() != 2 {
        return Err(line.error(
            head.column,
            ParseErrorKind::Syntax,
            "usage: register <width>",
        ));
    }
    let tok = line.tokens[1];
    match tok.text.parse::<usize>() {
        Ok(w) if (1..=MAX_WIDTH).contains(&w) => Ok(w),
        Ok(w) => Err(line.error(
            tok.column,
            ParseErrorKind::BadParam,
            format!("register width {w} outside 1..={MAX_WIDTH}"),
        )),
        Err(_) => Err(line.error(
            tok.column,
            ParseErrorKind::Syntax,
            format!("register width `{}` is not an integer", tok.text),
        )),
    }
}

fn parse_op(line: &Line<'_>, width: usize) -> Result<NetOp, ParseError> {
    let head = line.tokens[0];
    if head.text.eq_ignore_ascii_case("register") {
        return Err(line.error(
            head.column,
            ParseErrorKind::Syntax,
            "duplicate register statement",
        ));
    }
    let kind: GateKind = head
        .text
        .parse()
        .map_err(|msg: String| line.error(head.column, ParseErrorKind::UnknownGate, msg))?;
    let n_qubits = kind.n_controls() + 1;
    let n_angles = match kind {
        GateKind::A | GateKind::AInv | GateKind::V | GateKind::VBar => 3,
        GateKind::P | GateKind::Rz => 1,
        GateKind::Q => 0,
    };
    let args = &line.tokens[1..];
    if args.len() != n_qubits + n_angles {
        return Err(line.error(
            head.column,
            ParseErrorKind::Syntax,
            format!(
                "`{}` takes {n_qubits} qubit indices and {n_angles} angle(s), got {} argument(s)",
                kind,
                args.len()
            ),
        ));
    }

    let mut qubits = Vec::with_capacity(n_qubits);
    for tok in &args[..n_qubits] {
        let q: usize = tok.text.parse().map_err(|_| {
            line.error(
                tok.column,
                ParseErrorKind::Syntax,
                format!("qubit index `{}` is not a positive integer", tok.text),
            )
        })?;
        if q == 0 || q > width {
            return Err(line.error(
                tok.column,
                ParseErrorKind::BadIndex,
                format!("qubit {q} outside register 1..={width}"),
            ));
        }
        if qubits.contains(&q) {
            return Err(line.error(
                tok.column,
                ParseErrorKind::DuplicateQubit,
                format!("qubit {q} appears twice"),
            ));
        }
        qubits.push(q);
    }

    let mut angles = Vec::with_capacity(n_angles);
    for tok in &args[n_qubits..] {
        let x = parse_angle(tok.text).ok_or_else(|| {
            line.error(
                tok.column,
                ParseErrorKind::BadParam,
                format!("`{}` is not a finite angle", tok.text),
            )
        })?;
        angles.push(x);
    }

    let params = match kind {
        GateKind::A | GateKind::AInv | GateKind::V | GateKind::VBar => {
            OpParams::Gate(GateParams::new(angles[0], angles[1], angles[2]))
        }
        GateKind::P | GateKind::Rz => OpParams::Angle(angles[0]),
        GateKind::Q => OpParams::None,
    };
    let target = qubits.pop().expect("at least one qubit");
    let placement = Placement::new(qubits, target, width)
        .map_err(|e| line.error(head.column, ParseErrorKind::BadIndex, e.to_string()))?;
    Ok(NetOp {
        kind,
        placement,
        params,
    })
}

/// Parses an angle expression; `None` for anything malformed or non-finite.
pub fn parse_angle(text: &str) -> Option<f64> {
    let text = text.to_ascii_lowercase();
    let mut value = None::<f64>;
    let mut op = '*';
    let mut rest = text.as_str();
    loop {
        let end = rest.find(['*', '/']).unwrap_or(rest.len());
        let factor = parse_factor(&rest[..end])?;
        value = Some(match (value, op) {
            (None, _) => factor,
            (Some(v), '*') => v * factor,
            (Some(v), _) => v / factor,
        });
        if end == rest.len() {
            break;
        }
        op = rest.as_bytes()[end] as char;
        rest = &rest[end + 1..];
    }
    value.filter(|v| v.is_finite())
}

fn parse_factor(s: &str) -> Option<f64> {
    if s.is_empty() {
        return None;
    }
    if let Some(coef) = s.strip_suffix("pi") {
        let c = match coef {
            "" | "+" => 1.0,
            "-" => -1.0,
            _ => parse_number(coef)?,
        };
        return Some(c * PI);
    }
    parse_number(s)
}

fn parse_number(s: &str) -> Option<f64> {
    // f64::from_str also takes "inf" and "nan"; only plain decimals here
    let ok = s
        .chars()
        .all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e'));
    if !ok {
        return None;
    }
    s.parse().ok().filter(|x: &f64| x.is_finite())
}

/// Canonical text: lowercase keywords, single spaces, angles with 17
/// significant digits so every f64 survives the round trip.
pub fn serialize(doc: &Document) -> String {
    let mut out = format!("register {}\n", doc.width);
    for op in &doc.ops {
        out.push_str(op.kind.keyword());
        for q in op.placement.qubits() {
            write!(out, " {q}").expect("write to String");
        }
        match op.params {
            OpParams::Gate(p) => {
                for x in [p.phi, p.alpha, p.theta] {
                    write!(out, " {}", fmt_angle(x)).expect("write to String");
                }
            }
            OpParams::Angle(x) => write!(out, " {}", fmt_angle(x)).expect("write to String"),
            OpParams::None => {}
        }
        out.push('\n');
    }
    out
}

fn fmt_angle(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RunOutput {
    Matrix(CMat),
    State(StateVec),
}

/// The document's operator, or the final state when an initial state is
/// given. Every gate kind is accepted.
pub fn run(doc: &Document, initial: Option<&StateVec>) -> crate::Result<RunOutput> {
    match initial {
        None => Ok(RunOutput::Matrix(eval_network(doc, EvalMode::Idealized)?)),
        Some(s) => Ok(RunOutput::State(eval_on_state(
            doc,
            EvalMode::Idealized,
            s,
        )?)),
    }
}
