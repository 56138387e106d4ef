//! The composition language.
//!
//! An expression combines named diagrams with `+ - * /` and `norm(...)`:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := IDENT | 'norm' '(' expr ')' | '(' expr ')'
//! ```
//!
//! `*` and `/` bind tighter than `+` and `-`; equal precedence associates to
//! the left. Chains of the associative operators `+` and `*` are flattened
//! into a single [`CalcExpression::Assoc`] node, including chains that were
//! split by parentheses.

use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::algebra::AlgebraError;
use crate::dd::{DdError, Manager, NodeRef};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CalcError {
    #[error("syntax error at column {}: {message}", position + 1)]
    Syntax { position: usize, message: String },
    #[error("unknown operator `{op}` at column {}", position + 1)]
    UnknownOperator { position: usize, op: char },
    #[error("unknown diagram `{0}`")]
    UnknownDiagram(String),
    #[error("division by zero in category `{category}`")]
    DivisionByZero { category: String },
    #[error(transparent)]
    Dd(DdError),
}

impl CalcError {
    /// Zero-based character offset for syntax errors.
    pub fn position(&self) -> Option<usize> {
        match self {
            CalcError::Syntax { position, .. } | CalcError::UnknownOperator { position, .. } => {
                Some(*position)
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssocOp {
    Add,
    Mul,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonAssocOp {
    Sub,
    Div,
}

impl AssocOp {
    pub fn symbol(self) -> &'static str {
        match self {
            AssocOp::Add => "+",
            AssocOp::Mul => "*",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            AssocOp::Add => 1,
            AssocOp::Mul => 2,
        }
    }
}

impl NonAssocOp {
    pub fn symbol(self) -> &'static str {
        match self {
            NonAssocOp::Sub => "-",
            NonAssocOp::Div => "/",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            NonAssocOp::Sub => 1,
            NonAssocOp::Div => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CalcExpression {
    DiagramRef(String),
    /// At least two operands.
    Assoc {
        op: AssocOp,
        operands: Vec<CalcExpression>,
    },
    NonAssoc {
        op: NonAssocOp,
        left: Box<CalcExpression>,
        right: Box<CalcExpression>,
    },
    Norm(Box<CalcExpression>),
}

impl CalcExpression {
    pub fn diagram(name: &str) -> Self {
        CalcExpression::DiagramRef(name.to_owned())
    }

    /// `op(left, right)`, merging operand lists of nested chains of `op`.
    pub fn assoc(op: AssocOp, left: CalcExpression, right: CalcExpression) -> Self {
        let mut operands = Vec::new();
        for side in [left, right] {
            match side {
                CalcExpression::Assoc { op: inner, operands: o } if inner == op => operands.extend(o),
                other => operands.push(other),
            }
        }
        CalcExpression::Assoc { op, operands }
    }

    pub fn non_assoc(op: NonAssocOp, left: CalcExpression, right: CalcExpression) -> Self {
        CalcExpression::NonAssoc {
            op,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn norm(inner: CalcExpression) -> Self {
        CalcExpression::Norm(Box::new(inner))
    }

    /// Referenced diagram names, each once, in order of first occurrence.
    pub fn references(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_refs(&mut out);
        out
    }

    fn collect_refs<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            CalcExpression::DiagramRef(n) => {
                if !out.contains(&n.as_str()) {
                    out.push(n);
                }
            }
            CalcExpression::Assoc { operands, .. } => {
                operands.iter().for_each(|o| o.collect_refs(out))
            }
            CalcExpression::NonAssoc { left, right, .. } => {
                left.collect_refs(out);
                right.collect_refs(out);
            }
            CalcExpression::Norm(e) => e.collect_refs(out),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            CalcExpression::DiagramRef(_) | CalcExpression::Norm(_) => 3,
            CalcExpression::Assoc { op, .. } => op.precedence(),
            CalcExpression::NonAssoc { op, .. } => op.precedence(),
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, parent: u8, leading: bool) -> fmt::Result {
        let p = self.precedence();
        if p < parent || (p == parent && !leading) {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

/// Renders an expression that parses back to the same tree.
impl fmt::Display for CalcExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CalcExpression::DiagramRef(n) => f.write_str(n),
            CalcExpression::Norm(e) => write!(f, "norm({e})"),
            CalcExpression::Assoc { op, operands } => {
                for (i, o) in operands.iter().enumerate() {
                    if i > 0 {
                        write!(f, " {} ", op.symbol())?;
                    }
                    o.fmt_child(f, op.precedence(), i == 0)?;
                }
                Ok(())
            }
            CalcExpression::NonAssoc { op, left, right } => {
                left.fmt_child(f, op.precedence(), true)?;
                write!(f, " {} ", op.symbol())?;
                right.fmt_child(f, op.precedence(), false)
            }
        }
    }
}

/// `[A-Za-z_][A-Za-z0-9_]*`, the names diagrams can be referenced by.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(n) => format!("`{n}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, CalcError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '+' => Tok::Plus,
            '-' | '\u{2212}' => Tok::Minus,
            '*' | '\u{2217}' | '\u{00d7}' => Tok::Star,
            '/' | '\u{00f7}' => Tok::Slash,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(chars[start..i].iter().collect())));
                continue;
            }
            c if c.is_ascii_punctuation() => {
                return Err(CalcError::UnknownOperator { position: i, op: c })
            }
            c => {
                return Err(CalcError::Syntax {
                    position: i,
                    message: format!("unexpected character `{c}`"),
                })
            }
        };
        out.push((i, tok));
        i += 1;
    }
    out.push((chars.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn peek2(&self) -> &Tok {
        self.toks.get(self.pos + 1).map_or(&Tok::End, |t| &t.1)
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> CalcError {
        CalcError::Syntax {
            position: self.offset(),
            message: format!("expected {expected}, found {}", self.peek().describe()),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), CalcError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(what))
        }
    }

    fn expr(&mut self) -> Result<CalcExpression, CalcError> {
        let mut left = self.term()?;
        loop {
            left = match self.peek() {
                Tok::Plus => {
                    self.bump();
                    CalcExpression::assoc(AssocOp::Add, left, self.term()?)
                }
                Tok::Minus => {
                    self.bump();
                    CalcExpression::non_assoc(NonAssocOp::Sub, left, self.term()?)
                }
                _ => return Ok(left),
            };
        }
    }

    fn term(&mut self) -> Result<CalcExpression, CalcError> {
        let mut left = self.factor()?;
        loop {
            left = match self.peek() {
                Tok::Star => {
                    self.bump();
                    CalcExpression::assoc(AssocOp::Mul, left, self.factor()?)
                }
                Tok::Slash => {
                    self.bump();
                    CalcExpression::non_assoc(NonAssocOp::Div, left, self.factor()?)
                }
                _ => return Ok(left),
            };
        }
    }

    fn factor(&mut self) -> Result<CalcExpression, CalcError> {
        match self.peek().clone() {
            Tok::Ident(name) if name == "norm" && *self.peek2() == Tok::LParen => {
                self.bump();
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(CalcExpression::norm(inner))
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(CalcExpression::DiagramRef(name))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(self.error("diagram name, `norm(` or `(`")),
        }
    }
}

pub fn parse_calc(text: &str) -> Result<CalcExpression, CalcError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error("an operator or end of input"));
    }
    Ok(e)
}

fn lift(mgr: &Manager, e: DdError) -> CalcError {
    match e {
        DdError::Algebra(AlgebraError::DivisionByZero { index }) => CalcError::DivisionByZero {
            category: mgr.algebra().label(index),
        },
        other => CalcError::Dd(other),
    }
}

/// Evaluates `expr` over the diagrams bound in `env`. `+`/`*` chains fold
/// left with `apply2`, `norm` maps to the unary `norm` operation.
pub fn eval_calc(
    mgr: &mut Manager,
    expr: &CalcExpression,
    env: &BTreeMap<String, NodeRef>,
) -> Result<NodeRef, CalcError> {
    match expr {
        CalcExpression::DiagramRef(name) => env
            .get(name)
            .copied()
            .ok_or_else(|| CalcError::UnknownDiagram(name.clone())),
        CalcExpression::Norm(inner) => {
            let f = eval_calc(mgr, inner, env)?;
            mgr.apply1("norm", f).map_err(|e| lift(mgr, e))
        }
        CalcExpression::Assoc { op, operands } => {
            let (first, rest) = operands
                .split_first()
                .ok_or_else(|| CalcError::Syntax {
                    position: 0,
                    message: "empty operand list".into(),
                })?;
            let mut acc = eval_calc(mgr, first, env)?;
            for o in rest {
                let g = eval_calc(mgr, o, env)?;
                acc = mgr.apply2(op.symbol(), acc, g).map_err(|e| lift(mgr, e))?;
            }
            Ok(acc)
        }
        CalcExpression::NonAssoc { op, left, right } => {
            let f = eval_calc(mgr, left, env)?;
            let g = eval_calc(mgr, right, env)?;
            mgr.apply2(op.symbol(), f, g).map_err(|e| lift(mgr, e))
        }
    }
}

/// Binds every diagram in `diagrams` by name, for use as an [`eval_calc`]
/// environment.
pub fn environment<'a>(diagrams: impl IntoIterator<Item = (&'a str, NodeRef)>) -> BTreeMap<String, NodeRef> {
    diagrams.into_iter().map(|(n, f)| (n.to_owned(), f)).collect()
}
