//! Shared helpers for integration tests: random models and configurations,
//! and independent readers for the ACTS and PICT exports.

#![allow(dead_code)]

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;

use ipmbench::generator::{ConstraintForm, GeneratorConfig};
use ipmbench::model::{
    ArithOp, Atom, BinOp, Category, Domain, Expr, Ipm, Parameter, Relation, Term,
};

pub const LISTING1: &str = "Model example1

Parameters:
 P1 : {V1, V2}
 P2 : Boolean
 P3 : {V1, V2, V3}
 P4 : [2 .. 5]

Constraints:
 # P1 != P3 #
 # (P3=V1 => P2=false) AND P1=V2 #
 # (P4=3 <=> P2=true) OR P3=V3 #
";

pub const LISTING3: &str = "Model example2

Parameters:
 a : Boolean
 b : Boolean
 c : {V1, V2, V3}

Constraints:
 # a => b #
";

const LABELS: [&str; 6] = ["A", "B", "C", "D", "E", "F"];

/// A random model with at most `max_tests` tests. `equality_only` keeps to
/// atoms that compare a parameter with a constant by `=` or `!=`.
pub fn random_model(rng: &mut impl Rng, max_tests: u64, equality_only: bool) -> Ipm {
    loop {
        let n = rng.gen_range(1..=7);
        let params: Vec<Parameter> = (0..n)
            .map(|i| {
                let name = format!("x{i}");
                match rng.gen_range(0..3) {
                    0 => Parameter::boolean(name),
                    1 => {
                        let mut labels = LABELS.to_vec();
                        labels.shuffle(rng);
                        labels.truncate(rng.gen_range(1..=5));
                        Parameter::enumerative(name, labels)
                    }
                    _ => {
                        let lower = rng.gen_range(-4..=4);
                        Parameter::range(name, lower, lower + rng.gen_range(0..5))
                    }
                }
            })
            .collect();
        let probe = Ipm::new("m", params.clone(), vec![]).unwrap();
        if probe.total_tests_u64().is_none_or(|t| t > max_tests) {
            continue;
        }
        let constraints = (0..rng.gen_range(0..=4))
            .map(|_| random_expr(rng, &probe, equality_only, 3))
            .collect();
        return Ipm::new("m", params, constraints).unwrap();
    }
}

fn random_expr(rng: &mut impl Rng, ipm: &Ipm, equality_only: bool, depth: usize) -> Expr {
    if depth == 0 || rng.gen_bool(0.35) {
        let atom = random_atom(rng, ipm, equality_only);
        return if rng.gen_bool(0.3) { Expr::not(atom) } else { atom };
    }
    let op = *BinOp::ALL.choose(rng).unwrap();
    let l = random_expr(rng, ipm, equality_only, depth - 1);
    let r = random_expr(rng, ipm, equality_only, depth - 1);
    Expr::binary(op, l, r)
}

fn random_atom(rng: &mut impl Rng, ipm: &Ipm, equality_only: bool) -> Expr {
    let n = ipm.parameters().len();
    let p = rng.gen_range(0..n);
    let param = ipm.parameter(p);
    let eq = if rng.gen() { Relation::Eq } else { Relation::Ne };
    let same: Vec<usize> = (0..n)
        .filter(|&q| q != p && ipm.parameter(q).kind() == param.kind())
        .collect();
    let between = !equality_only && !same.is_empty() && rng.gen_bool(0.3);
    match &param.domain {
        Domain::Boolean if between => {
            Expr::compare(eq, Term::Param(p), Term::Param(*same.choose(rng).unwrap()))
        }
        Domain::Boolean if rng.gen() => Expr::literal(p),
        Domain::Boolean => Expr::compare(eq, Term::Param(p), Term::Bool(rng.gen())),
        Domain::Enumerative(_) if between => {
            Expr::compare(eq, Term::Param(p), Term::Param(*same.choose(rng).unwrap()))
        }
        Domain::Enumerative(values) => Expr::compare(
            eq,
            Term::Param(p),
            Term::Label {
                param: p,
                index: rng.gen_range(0..values.len()),
            },
        ),
        Domain::Range { lower, upper } => {
            if equality_only {
                return Expr::compare(eq, Term::Param(p), Term::Int(rng.gen_range(*lower..=*upper)));
            }
            let rel = *Relation::ALL.choose(rng).unwrap();
            if between && rng.gen() {
                let q = *same.choose(rng).unwrap();
                let op = *ArithOp::ALL.choose(rng).unwrap();
                let lhs = Term::Arith(op, Box::new(Term::Param(p)), Box::new(Term::Param(q)));
                Expr::compare(rel, lhs, Term::Int(rng.gen_range(-8..=8)))
            } else if between {
                Expr::compare(rel, Term::Param(p), Term::Param(*same.choose(rng).unwrap()))
            } else {
                Expr::compare(rel, Term::Param(p), Term::Int(rng.gen_range(lower - 1..=upper + 1)))
            }
        }
    }
}

/// A random, valid generator configuration with small bounds.
pub fn random_config(rng: &mut impl Rng) -> GeneratorConfig {
    loop {
        let c = random_config_unchecked(rng);
        if c.validate().is_ok() {
            return c;
        }
    }
}

fn random_config_unchecked(rng: &mut impl Rng) -> GeneratorConfig {
    let category = *Category::ALL.choose(rng).unwrap();
    let k_min = rng.gen_range(2..=5);
    let v_min = rng.gen_range(2..=4);
    let int_lower = rng.gen_range(-8..=0);
    let c_min = rng.gen_range(1..=3);
    let d_min = rng.gen_range(0..=2);
    let form = *[ConstraintForm::General, ConstraintForm::Cnf, ConstraintForm::Forbidden]
        .choose(rng)
        .unwrap();
    GeneratorConfig {
        category,
        count: rng.gen_range(1..=3),
        k_min,
        k_max: k_min + rng.gen_range(0..=3),
        v_min,
        v_max: v_min + rng.gen_range(0..=3),
        int_lower,
        int_upper: int_lower + rng.gen_range(8..=12),
        c_min,
        c_max: c_min + rng.gen_range(0..=2),
        d_min,
        d_max: d_min + rng.gen_range(0..=3),
        between_params: rng.gen(),
        form,
        seed: rng.gen(),
        ..Default::default()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OTerm {
    Param(String),
    Str(String),
    Num(i128),
    Arith(char, Box<OTerm>, Box<OTerm>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum OExpr {
    Not(Box<OExpr>),
    Bin(BinOp, Box<OExpr>, Box<OExpr>),
    Cmp(Relation, OTerm, OTerm),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleModel {
    pub params: Vec<(String, Vec<String>)>,
    pub int_params: Vec<String>,
    pub constraints: Vec<OExpr>,
}

#[derive(Debug, Clone, PartialEq)]
enum OVal {
    Int(i128),
    Str(String),
}

impl OracleModel {
    fn term(&self, t: &OTerm, env: &HashMap<&str, &str>) -> OVal {
        match t {
            OTerm::Param(p) if self.int_params.contains(p) => OVal::Int(env[p.as_str()].parse().unwrap()),
            OTerm::Param(p) => match env.get(p.as_str()) {
                Some(v) => OVal::Str(v.to_string()),
                None => OVal::Str(p.clone()),
            },
            OTerm::Str(s) => OVal::Str(s.clone()),
            OTerm::Num(n) => OVal::Int(*n),
            OTerm::Arith(op, a, b) => match (self.term(a, env), self.term(b, env)) {
                (OVal::Int(x), OVal::Int(y)) => OVal::Int(match op {
                    '+' => x + y,
                    '-' => x - y,
                    _ => x * y,
                }),
                other => panic!("arithmetic on {other:?}"),
            },
        }
    }

    pub fn eval(&self, e: &OExpr, env: &HashMap<&str, &str>) -> bool {
        match e {
            OExpr::Not(x) => !self.eval(x, env),
            OExpr::Bin(op, l, r) => op.apply(self.eval(l, env), self.eval(r, env)),
            OExpr::Cmp(rel, a, b) => match (self.term(a, env), self.term(b, env)) {
                (OVal::Int(x), OVal::Int(y)) => rel.holds(x, y),
                (OVal::Str(x), OVal::Str(y)) => match rel {
                    Relation::Eq => x == y,
                    Relation::Ne => x != y,
                    _ => panic!("ordering on strings"),
                },
                (x, y) => panic!("mixed comparison {x:?} {y:?}"),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Bracketed(String),
    Str(String),
    Num(i128),
    Sym(&'static str),
}

const SYMBOLS: [&str; 17] = [
    "<=>", "&&", "||", "=>", "!=", "<>", "<=", ">=", "<", ">", "=", "!", "(", ")", "+", "-", "*",
];

fn lex(s: &str) -> Vec<Tok> {
    let b = s.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    'outer: while i < b.len() {
        let c = b[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '"' {
            let end = s[i + 1..].find('"').unwrap() + i + 1;
            out.push(Tok::Str(s[i + 1..end].to_string()));
            i = end + 1;
            continue;
        }
        if c == '[' {
            let end = s[i..].find(']').unwrap() + i;
            out.push(Tok::Bracketed(s[i + 1..end].to_string()));
            i = end + 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < b.len() && (b[i] as char).is_ascii_digit() {
                i += 1;
            }
            out.push(Tok::Num(s[start..i].parse().unwrap()));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < b.len() && ((b[i] as char).is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push(Tok::Ident(s[start..i].to_string()));
            continue;
        }
        for sym in SYMBOLS {
            if s[i..].starts_with(sym) {
                out.push(Tok::Sym(sym));
                i += sym.len();
                continue 'outer;
            }
        }
        panic!("unexpected character {c:?} in {s:?}");
    }
    out
}

/// Precedence climbing over both dialects. Loosest first: iff, implies,
/// or, and, not, relation, additive, multiplicative.
struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat_sym(&mut self, sym: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(s)) if *s == sym) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(x)) if x == w) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_op(&mut self, op: BinOp) -> bool {
        match op {
            BinOp::Iff => self.eat_sym("<=>"),
            BinOp::Implies => self.eat_sym("=>"),
            BinOp::Or => self.eat_sym("||") || self.eat_word("OR"),
            BinOp::And => self.eat_sym("&&") || self.eat_word("AND"),
        }
    }

    fn expr(&mut self, level: usize) -> OExpr {
        const LEVELS: [BinOp; 4] = [BinOp::Iff, BinOp::Implies, BinOp::Or, BinOp::And];
        if level == LEVELS.len() {
            return self.unary();
        }
        let mut lhs = self.expr(level + 1);
        while self.eat_op(LEVELS[level]) {
            let rhs = self.expr(level + 1);
            lhs = OExpr::Bin(LEVELS[level], Box::new(lhs), Box::new(rhs));
        }
        lhs
    }

    fn unary(&mut self) -> OExpr {
        if self.eat_sym("!") || self.eat_word("NOT") {
            return OExpr::Not(Box::new(self.unary()));
        }
        // a parenthesis opens either a formula or an arithmetic operand
        if self.peek() == Some(&Tok::Sym("(")) {
            let save = self.pos;
            self.pos += 1;
            let inner = self.expr(0);
            if self.eat_sym(")") && !self.at_relation() && !self.at_arith() {
                return inner;
            }
            self.pos = save;
        }
        let lhs = self.sum();
        let rel = self.relation().unwrap_or_else(|| panic!("relation expected at {:?}", self.peek()));
        let rhs = self.sum();
        OExpr::Cmp(rel, lhs, rhs)
    }

    fn at_relation(&self) -> bool {
        matches!(self.peek(), Some(Tok::Sym("=" | "!=" | "<>" | "<" | "<=" | ">" | ">=")))
    }

    fn at_arith(&self) -> bool {
        matches!(self.peek(), Some(Tok::Sym("+" | "-" | "*")))
    }

    fn relation(&mut self) -> Option<Relation> {
        let rel = match self.peek()? {
            Tok::Sym("=") => Relation::Eq,
            Tok::Sym("!=" | "<>") => Relation::Ne,
            Tok::Sym("<") => Relation::Lt,
            Tok::Sym("<=") => Relation::Le,
            Tok::Sym(">") => Relation::Gt,
            Tok::Sym(">=") => Relation::Ge,
            _ => return None,
        };
        self.pos += 1;
        Some(rel)
    }

    fn sum(&mut self) -> OTerm {
        let mut lhs = self.product();
        loop {
            let op = if self.eat_sym("+") {
                '+'
            } else if self.eat_sym("-") {
                '-'
            } else {
                return lhs;
            };
            let rhs = self.product();
            lhs = OTerm::Arith(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn product(&mut self) -> OTerm {
        let mut lhs = self.primary();
        while self.eat_sym("*") {
            let rhs = self.primary();
            lhs = OTerm::Arith('*', Box::new(lhs), Box::new(rhs));
        }
        lhs
    }

    fn primary(&mut self) -> OTerm {
        let tok = self.toks[self.pos].clone();
        self.pos += 1;
        match tok {
            Tok::Sym("-") => match self.primary() {
                OTerm::Num(n) => OTerm::Num(-n),
                other => panic!("negation of {other:?}"),
            },
            Tok::Sym("(") => {
                let t = self.sum();
                assert!(self.eat_sym(")"));
                t
            }
            Tok::Ident(s) if s == "true" || s == "false" => OTerm::Str(s),
            Tok::Ident(s) | Tok::Bracketed(s) => OTerm::Param(s),
            Tok::Str(s) => OTerm::Str(s),
            Tok::Num(n) => OTerm::Num(n),
            other => panic!("unexpected {other:?}"),
        }
    }
}

fn parse_formula(s: &str) -> OExpr {
    let mut p = Parser { toks: lex(s), pos: 0 };
    let e = p.expr(0);
    assert_eq!(p.pos, p.toks.len(), "trailing input in {s:?}");
    e
}

/// Reads an ACTS system file.
pub fn read_acts(text: &str) -> OracleModel {
    let mut section = "";
    let mut params = Vec::new();
    let mut int_params = Vec::new();
    let mut constraints = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.starts_with('[') && line.ends_with(']') {
            section = match line {
                "[System]" => "system",
                "[Parameter]" => "parameter",
                "[Constraint]" => "constraint",
                other => panic!("unknown section {other}"),
            };
            continue;
        }
        if line.is_empty() {
            continue;
        }
        match section {
            "system" => assert!(line.starts_with("Name: ")),
            "parameter" => {
                let (head, values) = line.split_once(" : ").unwrap();
                let (name, kind) = head.split_once(" (").unwrap();
                let values: Vec<String> = values.split(", ").map(str::to_string).collect();
                match kind {
                    "boolean)" => assert_eq!(values, ["true", "false"]),
                    "enum)" => {}
                    "int)" => int_params.push(name.to_string()),
                    other => panic!("unknown type {other}"),
                }
                params.push((name.to_string(), values));
            }
            "constraint" => constraints.push(parse_formula(line)),
            _ => panic!("content outside a section: {line}"),
        }
    }
    OracleModel {
        params,
        int_params,
        constraints,
    }
}

/// Reads a PICT model file.
pub fn read_pict(text: &str) -> OracleModel {
    let (decls, rules) = text.split_once("\n\n").unwrap_or((text, ""));
    let mut params = Vec::new();
    let mut int_params = Vec::new();
    for line in decls.lines() {
        let (name, values) = line.split_once(": ").unwrap();
        let values: Vec<String> = values.split(", ").map(str::to_string).collect();
        if values.iter().all(|v| v.parse::<i64>().is_ok()) {
            int_params.push(name.to_string());
        }
        params.push((name.to_string(), values));
    }
    let mut constraints = Vec::new();
    for stmt in rules.split(';') {
        let stmt = stmt.trim();
        if stmt.is_empty() {
            continue;
        }
        let e = match stmt.strip_prefix("IF ") {
            Some(rest) => {
                let (cond, then) = rest.split_once(" THEN ").unwrap();
                OExpr::Bin(
                    BinOp::Implies,
                    Box::new(parse_formula(cond)),
                    Box::new(parse_formula(then)),
                )
            }
            None => parse_formula(stmt),
        };
        constraints.push(e);
    }
    OracleModel {
        params,
        int_params,
        constraints,
    }
}

/// Checks that `oracle` declares the same parameters as `ipm` and that its
/// constraints agree with the model's on every assignment, or on `samples`
/// random ones when the model is larger.
pub fn assert_same_structure(ipm: &Ipm, oracle: &OracleModel, rng: &mut impl Rng, samples: usize) {
    let expected: Vec<(String, Vec<String>)> = ipm
        .parameters()
        .iter()
        .map(|p| {
            (
                p.name.clone(),
                (0..p.cardinality() as usize).map(|i| p.value(i).to_string()).collect(),
            )
        })
        .collect();
    assert_eq!(oracle.params, expected);
    assert_eq!(oracle.constraints.len(), ipm.constraints().len());
    let cards = ipm.cardinalities();
    let total = ipm.total_tests_u64().unwrap_or(u64::MAX);
    let exhaustive = total <= samples as u64;
    let rounds = if exhaustive { total as usize } else { samples };
    for r in 0..rounds {
        let values: Vec<usize> = if exhaustive {
            let mut rest = r as u64;
            cards
                .iter()
                .rev()
                .map(|&c| {
                    let v = rest % c;
                    rest /= c;
                    v as usize
                })
                .collect::<Vec<_>>()
                .into_iter()
                .rev()
                .collect()
        } else {
            cards.iter().map(|&c| rng.gen_range(0..c as usize)).collect()
        };
        let env: HashMap<&str, &str> = oracle
            .params
            .iter()
            .zip(&values)
            .map(|((n, vs), &v)| (n.as_str(), vs[v].as_str()))
            .collect();
        let partial: Vec<Option<usize>> = values.iter().map(|&v| Some(v)).collect();
        for (c, o) in ipm.constraints().iter().zip(&oracle.constraints) {
            assert_eq!(
                c.evaluate_partial(ipm, &partial),
                Some(oracle.eval(o, &env)),
                "constraint {c:?} read back as {o:?} at {values:?}"
            );
        }
    }
}

/// Whether a constraint contains only Boolean atoms.
pub fn boolean_atoms_only(ipm: &Ipm, e: &Expr) -> bool {
    e.atoms().iter().all(|a| match a {
        Atom::Literal(_) | Atom::Constant(_) => true,
        Atom::Compare { lhs, rhs, .. } => [lhs, rhs].iter().all(|t| match t {
            Term::Bool(_) => true,
            Term::Param(p) => ipm.parameter(*p).domain == Domain::Boolean,
            _ => false,
        }),
    })
}
