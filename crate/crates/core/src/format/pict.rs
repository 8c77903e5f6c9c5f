//! PICT model export.
//!
//! PICT has no arithmetic, so atoms containing `+`, `-` or `*` are expanded
//! into the disjunction of value combinations that satisfy them.

use std::fmt::Write as _;

use crate::model::{Atom, BinOp, Domain, Expr, Ipm, ParamId, Term, Value};

/// Renders `ipm` as a PICT model: one `name: values` line per parameter, a
/// blank line, then one constraint per line terminated by `;`.
pub fn export_pict(ipm: &Ipm) -> String {
    let mut out = String::new();
    for p in ipm.parameters() {
        let values: Vec<String> = (0..p.cardinality() as usize)
            .map(|i| p.value(i).to_string())
            .collect();
        let _ = writeln!(out, "{}: {}", p.name, values.join(", "));
    }
    if ipm.has_constraints() {
        out.push('\n');
        for c in ipm.constraints() {
            match c {
                Expr::Binary(BinOp::Implies, l, r) => {
                    let _ = writeln!(out, "IF {} THEN {};", render(ipm, l), render(ipm, r));
                }
                _ => {
                    let _ = writeln!(out, "{};", render(ipm, c));
                }
            }
        }
    }
    out
}

fn render(ipm: &Ipm, e: &Expr) -> String {
    let mut out = String::new();
    write_expr(ipm, e, &mut out);
    out
}

fn value_text(ipm: &Ipm, p: ParamId, index: usize) -> String {
    match ipm.parameter(p).value(index) {
        Value::Int(i) => i.to_string(),
        other => format!("\"{other}\""),
    }
}

fn wrapped(ipm: &Ipm, e: &Expr) -> String {
    match e {
        Expr::Atom(Atom::Literal(_)) => render(ipm, e),
        _ => format!("({})", render(ipm, e)),
    }
}

fn write_expr(ipm: &Ipm, e: &Expr, out: &mut String) {
    match e {
        Expr::Not(inner) => {
            let _ = write!(out, "NOT {}", wrapped(ipm, inner));
        }
        Expr::Binary(op, l, r) => {
            let (l, r) = (wrapped(ipm, l), wrapped(ipm, r));
            let _ = match op {
                BinOp::And => write!(out, "{l} AND {r}"),
                BinOp::Or => write!(out, "{l} OR {r}"),
                BinOp::Implies => write!(out, "NOT {l} OR {r}"),
                BinOp::Iff => write!(out, "({l} AND {r}) OR (NOT {l} AND NOT {r})"),
            };
        }
        Expr::Atom(Atom::Literal(p)) => {
            let _ = write!(out, "[{}] = \"true\"", ipm.parameter(*p).name);
        }
        Expr::Atom(Atom::Constant(b)) => {
            let name = &ipm.parameters()[0].name;
            let v = value_text(ipm, 0, 0);
            let join = if *b { "OR" } else { "AND" };
            let _ = write!(out, "[{name}] = {v} {join} [{name}] <> {v}");
        }
        Expr::Atom(atom @ Atom::Compare { rel, lhs, rhs }) => {
            if atom.has_arithmetic() {
                write_expansion(ipm, atom, out);
            } else {
                let sym = match rel.symbol() {
                    "!=" => "<>",
                    s => s,
                };
                let _ = write!(out, "{} {sym} {}", term_text(ipm, lhs), term_text(ipm, rhs));
            }
        }
    }
}

fn term_text(ipm: &Ipm, t: &Term) -> String {
    match t {
        Term::Param(p) => format!("[{}]", ipm.parameter(*p).name),
        Term::Bool(b) => format!("\"{b}\""),
        Term::Int(i) => i.to_string(),
        Term::Label { param, index } => match &ipm.parameter(*param).domain {
            Domain::Enumerative(values) => format!("\"{}\"", values[*index]),
            _ => unreachable!("labels belong to enumerative parameters"),
        },
        Term::Arith(..) => unreachable!("arithmetic atoms are expanded"),
    }
}

fn write_expansion(ipm: &Ipm, atom: &Atom, out: &mut String) {
    let mut params = Vec::new();
    if let Atom::Compare { lhs, rhs, .. } = atom {
        lhs.visit_params(&mut |p| params.push(p));
        rhs.visit_params(&mut |p| params.push(p));
    }
    params.sort_unstable();
    params.dedup();
    let cards: Vec<usize> = params
        .iter()
        .map(|&p| ipm.parameter(p).cardinality() as usize)
        .collect();
    let expr = Expr::Atom(atom.clone());
    let mut values = vec![0usize; ipm.parameters().len()];
    let mut digits = vec![0usize; params.len()];
    let mut cases = Vec::new();
    loop {
        for (&p, &d) in params.iter().zip(&digits) {
            values[p] = d;
        }
        if expr.eval_indices(ipm, &values) {
            let parts: Vec<String> = params
                .iter()
                .zip(&digits)
                .map(|(&p, &d)| format!("[{}] = {}", ipm.parameter(p).name, value_text(ipm, p, d)))
                .collect();
            cases.push(format!("({})", parts.join(" AND ")));
        }
        let mut i = digits.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < cards[i] {
                break;
            }
            digits[i] = 0;
            if i == 0 {
                digits.clear();
            }
        }
        if digits.is_empty() {
            break;
        }
    }
    if cases.is_empty() {
        write_expr(ipm, &Expr::Atom(Atom::Constant(false)), out);
    } else {
        out.push_str(&cases.join(" OR "));
    }
}
