//! The CTWedge textual model format.
//!
//! ```text
//! Model example1
//!
//! Parameters:
//! P1 : {V1, V2}
//! P2 : Boolean
//! P4 : [2 .. 5]
//!
//! Constraints:
//! # (P1 = V1 => P2 = false) AND P4 > 2 #
//! ```
//!
//! Operator precedence, loosest first: `<=>`, `=>` (right-associative),
//! `OR`, `AND`, `NOT`/`!`, relations, `+`/`-`, `*`. An enumerative value on
//! one side of a relation is resolved against the domain of the parameter on
//! the other side, so labels may repeat across parameters.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{
    is_identifier, ArithOp, Atom, BinOp, Domain, Expr, Ipm, ParamId, ParamKind, Parameter,
    Relation, Term,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    Semantic,
    Unsupported,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pos {
    line: usize,
    column: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    True,
    False,
    Colon,
    LBrace,
    RBrace,
    Comma,
    LBracket,
    RBracket,
    DotDot,
    Hash,
    LParen,
    RParen,
    Rel(Relation),
    Implies,
    Iff,
    Not,
    And,
    Or,
    Arith(ArithOp),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(i) => format!("integer `{i}`"),
            Tok::True => "`true`".into(),
            Tok::False => "`false`".into(),
            Tok::Colon => "`:`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::DotDot => "`..`".into(),
            Tok::Hash => "`#`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Rel(r) => format!("`{}`", r.symbol()),
            Tok::Implies => "`=>`".into(),
            Tok::Iff => "`<=>`".into(),
            Tok::Not => "`NOT`".into(),
            Tok::And => "`AND`".into(),
            Tok::Or => "`OR`".into(),
            Tok::Arith(op) => format!("`{}`", op.symbol()),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, column, kind, message: String| ParseError {
        line,
        column,
        kind,
        message,
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let next = chars.get(i + 1).copied();
        if c == '/' && next == Some('/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c == '/' && next == Some('*') {
            i += 2;
            col += 2;
            loop {
                match chars.get(i) {
                    None => {
                        return Err(err(
                            pos.line,
                            pos.column,
                            ParseErrorKind::Syntax,
                            "unterminated comment".into(),
                        ))
                    }
                    Some('*') if chars.get(i + 1) == Some(&'/') => {
                        i += 2;
                        col += 2;
                        break;
                    }
                    Some('\n') => {
                        i += 1;
                        line += 1;
                        col = 1;
                    }
                    Some(_) => {
                        i += 1;
                        col += 1;
                    }
                }
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            let tok = match word.as_str() {
                "AND" => Tok::And,
                "OR" => Tok::Or,
                "NOT" => Tok::Not,
                "true" => Tok::True,
                "false" => Tok::False,
                _ => Tok::Ident(word),
            };
            out.push((tok, pos));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            col += i - start;
            let value = digits.parse::<i64>().map_err(|_| {
                err(
                    pos.line,
                    pos.column,
                    ParseErrorKind::Syntax,
                    format!("integer `{digits}` out of range"),
                )
            })?;
            out.push((Tok::Int(value), pos));
            continue;
        }
        let three: String = chars[i..chars.len().min(i + 3)].iter().collect();
        let two: String = chars[i..chars.len().min(i + 2)].iter().collect();
        let (tok, len) = if three == "<=>" {
            (Tok::Iff, 3)
        } else {
            match two.as_str() {
                "=>" => (Tok::Implies, 2),
                "<=" => (Tok::Rel(Relation::Le), 2),
                ">=" => (Tok::Rel(Relation::Ge), 2),
                "!=" => (Tok::Rel(Relation::Ne), 2),
                "==" => (Tok::Rel(Relation::Eq), 2),
                ".." => (Tok::DotDot, 2),
                "&&" => (Tok::And, 2),
                "||" => (Tok::Or, 2),
                _ => match c {
                    ':' => (Tok::Colon, 1),
                    '{' => (Tok::LBrace, 1),
                    '}' => (Tok::RBrace, 1),
                    ',' => (Tok::Comma, 1),
                    '[' => (Tok::LBracket, 1),
                    ']' => (Tok::RBracket, 1),
                    '#' => (Tok::Hash, 1),
                    '(' => (Tok::LParen, 1),
                    ')' => (Tok::RParen, 1),
                    '=' => (Tok::Rel(Relation::Eq), 1),
                    '<' => (Tok::Rel(Relation::Lt), 1),
                    '>' => (Tok::Rel(Relation::Gt), 1),
                    '!' => (Tok::Not, 1),
                    '+' => (Tok::Arith(ArithOp::Add), 1),
                    '-' => (Tok::Arith(ArithOp::Sub), 1),
                    '*' => (Tok::Arith(ArithOp::Mul), 1),
                    '/' | '%' => {
                        return Err(err(
                            pos.line,
                            pos.column,
                            ParseErrorKind::Unsupported,
                            format!("unsupported construct: operator `{c}`"),
                        ))
                    }
                    _ => {
                        return Err(err(
                            pos.line,
                            pos.column,
                            ParseErrorKind::Syntax,
                            format!("unexpected character `{c}`"),
                        ))
                    }
                },
            }
        };
        out.push((tok, pos));
        i += len;
        col += len;
    }
    out.push((Tok::Eof, Pos { line, column: col }));
    Ok(out)
}

/// Untyped expression tree; resolved against the parameter table afterwards.
#[derive(Debug, Clone)]
enum Raw {
    Ident(String, Pos),
    Int(i64, Pos),
    Bool(bool, Pos),
    Not(Box<Raw>, Pos),
    Bin(BinOp, Box<Raw>, Box<Raw>, Pos),
    Rel(Relation, Box<Raw>, Box<Raw>, Pos),
    Arith(ArithOp, Box<Raw>, Box<Raw>, Pos),
}

impl Raw {
    fn pos(&self) -> Pos {
        match self {
            Raw::Ident(_, p)
            | Raw::Int(_, p)
            | Raw::Bool(_, p)
            | Raw::Not(_, p)
            | Raw::Bin(.., p)
            | Raw::Rel(.., p)
            | Raw::Arith(.., p) => *p,
        }
    }
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error(&self, kind: ParseErrorKind, message: String) -> ParseError {
        let p = self.pos();
        ParseError {
            line: p.line,
            column: p.column,
            kind,
            message,
        }
    }

    fn expected(&self, what: &str) -> ParseError {
        self.error(
            ParseErrorKind::Syntax,
            format!("expected {what}, found {}", self.peek().describe()),
        )
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Pos, ParseError> {
        if *self.peek() == tok {
            Ok(self.bump().1)
        } else {
            Err(self.expected(what))
        }
    }

    fn is_keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == word)
    }

    fn expect_keyword(&mut self, word: &str) -> Result<(), ParseError> {
        if self.is_keyword(word) {
            self.bump();
            Ok(())
        } else {
            Err(self.expected(&format!("`{word}`")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Pos), ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let pos = self.bump().1;
                Ok((s, pos))
            }
            _ => Err(self.expected(what)),
        }
    }

    fn signed_int(&mut self) -> Result<i64, ParseError> {
        let negative = if *self.peek() == Tok::Arith(ArithOp::Sub) {
            self.bump();
            true
        } else {
            false
        };
        match *self.peek() {
            Tok::Int(v) => {
                self.bump();
                Ok(if negative { -v } else { v })
            }
            _ => Err(self.expected("an integer")),
        }
    }

    fn parameter(&mut self) -> Result<(Parameter, Pos), ParseError> {
        let (name, pos) = self.ident("a parameter name")?;
        self.expect(Tok::Colon, "`:`")?;
        let domain = match self.peek().clone() {
            Tok::Ident(s) if s == "Boolean" => {
                self.bump();
                Domain::Boolean
            }
            Tok::LBrace => {
                self.bump();
                let mut values = vec![self.ident("an enumerative value")?.0];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    values.push(self.ident("an enumerative value")?.0);
                }
                self.expect(Tok::RBrace, "`,` or `}`")?;
                Domain::Enumerative(values)
            }
            Tok::LBracket => {
                self.bump();
                let lower = self.signed_int()?;
                self.expect(Tok::DotDot, "`..`")?;
                let upper = self.signed_int()?;
                self.expect(Tok::RBracket, "`]`")?;
                Domain::Range { lower, upper }
            }
            Tok::Ident(other) => {
                return Err(self.error(
                    ParseErrorKind::Unsupported,
                    format!("unsupported construct: parameter type `{other}`"),
                ))
            }
            _ => return Err(self.expected("`Boolean`, `{` or `[`")),
        };
        Ok((Parameter { name, domain }, pos))
    }

    fn iff(&mut self) -> Result<Raw, ParseError> {
        let mut left = self.implies()?;
        while *self.peek() == Tok::Iff {
            let pos = self.bump().1;
            let right = self.implies()?;
            left = Raw::Bin(BinOp::Iff, Box::new(left), Box::new(right), pos);
        }
        Ok(left)
    }

    fn implies(&mut self) -> Result<Raw, ParseError> {
        let left = self.or()?;
        if *self.peek() == Tok::Implies {
            let pos = self.bump().1;
            let right = self.implies()?;
            return Ok(Raw::Bin(BinOp::Implies, Box::new(left), Box::new(right), pos));
        }
        Ok(left)
    }

    fn or(&mut self) -> Result<Raw, ParseError> {
        let mut left = self.and()?;
        while *self.peek() == Tok::Or {
            let pos = self.bump().1;
            let right = self.and()?;
            left = Raw::Bin(BinOp::Or, Box::new(left), Box::new(right), pos);
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<Raw, ParseError> {
        let mut left = self.not()?;
        while *self.peek() == Tok::And {
            let pos = self.bump().1;
            let right = self.not()?;
            left = Raw::Bin(BinOp::And, Box::new(left), Box::new(right), pos);
        }
        Ok(left)
    }

    fn not(&mut self) -> Result<Raw, ParseError> {
        if *self.peek() == Tok::Not {
            let pos = self.bump().1;
            return Ok(Raw::Not(Box::new(self.not()?), pos));
        }
        self.relation()
    }

    fn relation(&mut self) -> Result<Raw, ParseError> {
        let left = self.sum()?;
        if let Tok::Rel(rel) = *self.peek() {
            let pos = self.bump().1;
            let right = self.sum()?;
            return Ok(Raw::Rel(rel, Box::new(left), Box::new(right), pos));
        }
        Ok(left)
    }

    fn sum(&mut self) -> Result<Raw, ParseError> {
        let mut left = self.product()?;
        while let Tok::Arith(op @ (ArithOp::Add | ArithOp::Sub)) = *self.peek() {
            let pos = self.bump().1;
            let right = self.product()?;
            left = Raw::Arith(op, Box::new(left), Box::new(right), pos);
        }
        Ok(left)
    }

    fn product(&mut self) -> Result<Raw, ParseError> {
        let mut left = self.unary()?;
        while *self.peek() == Tok::Arith(ArithOp::Mul) {
            let pos = self.bump().1;
            let right = self.unary()?;
            left = Raw::Arith(ArithOp::Mul, Box::new(left), Box::new(right), pos);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Raw, ParseError> {
        if *self.peek() == Tok::Arith(ArithOp::Sub) {
            let pos = self.pos();
            let v = self.signed_int()?;
            return Ok(Raw::Int(v, pos));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Raw, ParseError> {
        let (tok, pos) = self.bump();
        match tok {
            Tok::Ident(s) => Ok(Raw::Ident(s, pos)),
            Tok::Int(v) => Ok(Raw::Int(v, pos)),
            Tok::True => Ok(Raw::Bool(true, pos)),
            Tok::False => Ok(Raw::Bool(false, pos)),
            Tok::LParen => {
                let inner = self.iff()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            other => {
                self.at -= 1;
                let _ = other;
                Err(self.expected("an expression"))
            }
        }
    }
}

struct Resolver<'a> {
    params: &'a [Parameter],
    by_name: HashMap<&'a str, ParamId>,
}

fn semantic(pos: Pos, message: String) -> ParseError {
    ParseError {
        line: pos.line,
        column: pos.column,
        kind: ParseErrorKind::Semantic,
        message,
    }
}

impl Resolver<'_> {
    fn expr(&self, raw: &Raw) -> Result<Expr, ParseError> {
        match raw {
            Raw::Not(inner, _) => Ok(Expr::not(self.expr(inner)?)),
            Raw::Bin(op, l, r, _) => Ok(Expr::binary(*op, self.expr(l)?, self.expr(r)?)),
            Raw::Bool(b, _) => Ok(Expr::Atom(Atom::Constant(*b))),
            Raw::Ident(name, pos) => match self.by_name.get(name.as_str()) {
                Some(&p) if self.params[p].kind() == ParamKind::Boolean => Ok(Expr::literal(p)),
                Some(_) => Err(semantic(
                    *pos,
                    format!("`{name}` is not Boolean and cannot be used as a condition"),
                )),
                None => Err(semantic(*pos, format!("unknown parameter `{name}`"))),
            },
            Raw::Rel(rel, l, r, pos) => {
                let lhs = self.term(l, r)?;
                let rhs = self.term(r, l)?;
                self.check_domain(*rel, &lhs, &rhs, *pos)?;
                Ok(Expr::compare(*rel, lhs, rhs))
            }
            Raw::Int(_, pos) | Raw::Arith(.., pos) => {
                Err(semantic(*pos, "expected a condition, found a number".into()))
            }
        }
    }

    /// The parameter `raw` names, when it is a bare identifier naming one.
    fn named_param(&self, raw: &Raw) -> Option<ParamId> {
        match raw {
            Raw::Ident(name, _) => self.by_name.get(name.as_str()).copied(),
            _ => None,
        }
    }

    fn term(&self, raw: &Raw, other: &Raw) -> Result<Term, ParseError> {
        match raw {
            Raw::Int(v, _) => Ok(Term::Int(*v)),
            Raw::Bool(b, _) => Ok(Term::Bool(*b)),
            Raw::Ident(name, pos) => {
                if let Some(q) = self.named_param(other) {
                    if let Some(index) = self.params[q].label_index(name) {
                        return Ok(Term::Label { param: q, index });
                    }
                }
                if let Some(&p) = self.by_name.get(name.as_str()) {
                    return Ok(Term::Param(p));
                }
                match self.named_param(other) {
                    Some(q) => Err(semantic(
                        *pos,
                        format!("`{name}` is not a value of `{}`", self.params[q].name),
                    )),
                    None => Err(semantic(*pos, format!("unresolved identifier `{name}`"))),
                }
            }
            Raw::Arith(op, a, b, _) => Ok(Term::Arith(
                *op,
                Box::new(self.arith_operand(a)?),
                Box::new(self.arith_operand(b)?),
            )),
            other => Err(semantic(
                other.pos(),
                "expected a value, found a condition".into(),
            )),
        }
    }

    fn arith_operand(&self, raw: &Raw) -> Result<Term, ParseError> {
        match raw {
            Raw::Int(v, _) => Ok(Term::Int(*v)),
            Raw::Ident(name, pos) => self
                .by_name
                .get(name.as_str())
                .map(|&p| Term::Param(p))
                .ok_or_else(|| semantic(*pos, format!("unknown parameter `{name}`"))),
            Raw::Arith(op, a, b, _) => Ok(Term::Arith(
                *op,
                Box::new(self.arith_operand(a)?),
                Box::new(self.arith_operand(b)?),
            )),
            other => Err(semantic(
                other.pos(),
                "expected an arithmetic operand".into(),
            )),
        }
    }

    fn check_domain(&self, rel: Relation, lhs: &Term, rhs: &Term, pos: Pos) -> Result<(), ParseError> {
        if !rel.is_equality() {
            return Ok(());
        }
        let (p, v) = match (lhs, rhs) {
            (Term::Param(p), Term::Int(v)) | (Term::Int(v), Term::Param(p)) => (*p, *v),
            _ => return Ok(()),
        };
        if let Domain::Range { lower, upper } = self.params[p].domain {
            if v < lower || v > upper {
                return Err(semantic(
                    pos,
                    format!(
                        "{v} is outside the domain [{lower} .. {upper}] of `{}`",
                        self.params[p].name
                    ),
                ));
            }
        }
        Ok(())
    }
}

/// Parses a model in CTWedge text format.
pub fn parse_ctwedge(text: &str) -> Result<Ipm, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0 };
    p.expect_keyword("Model")?;
    let (name, name_pos) = p.ident("a model name")?;
    p.expect_keyword("Parameters")?;
    p.expect(Tok::Colon, "`:` after `Parameters`")?;

    let mut params = Vec::new();
    let mut positions = Vec::new();
    while *p.peek() != Tok::Eof && !p.is_keyword("Constraints") {
        let (param, pos) = p.parameter()?;
        params.push(param);
        positions.push(pos);
    }
    if params.is_empty() {
        return Err(p.expected("at least one parameter declaration"));
    }

    let mut raws = Vec::new();
    if p.is_keyword("Constraints") {
        p.bump();
        p.expect(Tok::Colon, "`:` after `Constraints`")?;
        while *p.peek() != Tok::Eof {
            if *p.peek() != Tok::Hash {
                return Err(p.error(
                    ParseErrorKind::Unsupported,
                    format!(
                        "unsupported construct: expected `# constraint #`, found {}",
                        p.peek().describe()
                    ),
                ));
            }
            let start = p.bump().1;
            let raw = p.iff()?;
            p.expect(Tok::Hash, "`#` closing the constraint")?;
            raws.push((raw, start));
        }
    }

    for (param, pos) in params.iter().zip(&positions) {
        if !is_identifier(&param.name) {
            return Err(semantic(*pos, format!("`{}` is a reserved word", param.name)));
        }
    }
    let mut by_name = HashMap::new();
    for (i, (param, pos)) in params.iter().zip(&positions).enumerate() {
        if by_name.insert(param.name.as_str(), i).is_some() {
            return Err(semantic(*pos, format!("duplicate parameter `{}`", param.name)));
        }
    }
    let resolver = Resolver {
        params: &params,
        by_name,
    };
    let mut constraints = Vec::with_capacity(raws.len());
    for (raw, _) in &raws {
        constraints.push(resolver.expr(raw)?);
    }
    let names: Vec<String> = params.iter().map(|p| p.name.clone()).collect();
    Ipm::new(name, params, constraints).map_err(|e| {
        let pos = match &e {
            crate::model::ModelError::IllTyped { constraint, .. }
            | crate::model::ModelError::UnknownParameter { constraint, .. } => raws[*constraint].1,
            crate::model::ModelError::InvalidName(bad) => positions
                .iter()
                .zip(&names)
                .find(|(_, n)| *n == bad)
                .map(|(pos, _)| *pos)
                .unwrap_or(name_pos),
            _ => name_pos,
        };
        semantic(pos, e.to_string())
    })
}

/// Canonical CTWedge rendering of a model; [`parse_ctwedge`] reads it back
/// to an identical model.
pub fn print_ctwedge(ipm: &Ipm) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Model {}", ipm.name());
    out.push('\n');
    out.push_str("Parameters:\n");
    for p in ipm.parameters() {
        match &p.domain {
            Domain::Boolean => {
                let _ = writeln!(out, "{} : Boolean", p.name);
            }
            Domain::Enumerative(values) => {
                let _ = writeln!(out, "{} : {{{}}}", p.name, values.join(", "));
            }
            Domain::Range { lower, upper } => {
                let _ = writeln!(out, "{} : [{lower} .. {upper}]", p.name);
            }
        }
    }
    if ipm.has_constraints() {
        out.push('\n');
        out.push_str("Constraints:\n");
        for c in ipm.constraints() {
            let _ = writeln!(out, "# {} #", expr_to_string(ipm, c));
        }
    }
    out
}

/// Renders one constraint in CTWedge syntax.
pub fn expr_to_string(ipm: &Ipm, e: &Expr) -> String {
    let mut out = String::new();
    write_expr(ipm, e, &mut out);
    out
}

/// Whether a binary child must be parenthesized under a binary parent.
/// Only left-nested AND and OR chains print without parentheses.
pub(crate) fn needs_parens(parent: BinOp, child: &Expr, is_left: bool) -> bool {
    match child {
        Expr::Binary(op, ..) => !(is_left && *op == parent && matches!(op, BinOp::And | BinOp::Or)),
        _ => false,
    }
}

fn write_expr(ipm: &Ipm, e: &Expr, out: &mut String) {
    match e {
        Expr::Not(inner) => {
            out.push_str("NOT ");
            match inner.as_ref() {
                Expr::Binary(..) | Expr::Atom(Atom::Compare { .. }) => {
                    out.push('(');
                    write_expr(ipm, inner, out);
                    out.push(')');
                }
                _ => write_expr(ipm, inner, out),
            }
        }
        Expr::Binary(op, l, r) => {
            write_child(ipm, *op, l, true, out);
            let _ = write!(out, " {op} ");
            write_child(ipm, *op, r, false, out);
        }
        Expr::Atom(Atom::Literal(p)) => out.push_str(&ipm.parameter(*p).name),
        Expr::Atom(Atom::Constant(b)) => {
            let _ = write!(out, "{b}");
        }
        Expr::Atom(Atom::Compare { rel, lhs, rhs }) => {
            write_term(ipm, lhs, out);
            let _ = write!(out, " {} ", rel.symbol());
            write_term(ipm, rhs, out);
        }
    }
}

fn write_child(ipm: &Ipm, parent: BinOp, child: &Expr, is_left: bool, out: &mut String) {
    if needs_parens(parent, child, is_left) {
        out.push('(');
        write_expr(ipm, child, out);
        out.push(')');
    } else {
        write_expr(ipm, child, out);
    }
}

fn write_term(ipm: &Ipm, t: &Term, out: &mut String) {
    match t {
        Term::Param(p) => out.push_str(&ipm.parameter(*p).name),
        Term::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        Term::Int(v) => {
            let _ = write!(out, "{v}");
        }
        Term::Label { param, index } => match &ipm.parameter(*param).domain {
            Domain::Enumerative(values) => out.push_str(&values[*index]),
            _ => unreachable!("labels belong to enumerative parameters"),
        },
        Term::Arith(op, a, b) => {
            write_arith_operand(ipm, a, out);
            let _ = write!(out, " {} ", op.symbol());
            write_arith_operand(ipm, b, out);
        }
    }
}

fn write_arith_operand(ipm: &Ipm, t: &Term, out: &mut String) {
    if t.has_arithmetic() {
        out.push('(');
        write_term(ipm, t, out);
        out.push(')');
    } else {
        write_term(ipm, t, out);
    }
}
