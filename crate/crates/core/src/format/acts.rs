//! ACTS system file export.

use std::fmt::Write as _;

use super::ctwedge::needs_parens;
use crate::model::{Atom, BinOp, Domain, Expr, Ipm, Term};

/// Renders `ipm` as an ACTS system file with `[System]`, `[Parameter]` and
/// `[Constraint]` sections; the last is empty for unconstrained models.
/// Enumerative values are double-quoted inside
/// constraints.
pub fn export_acts(ipm: &Ipm) -> String {
    let mut out = String::new();
    out.push_str("[System]\n");
    let _ = writeln!(out, "Name: {}", ipm.name());
    out.push('\n');
    out.push_str("[Parameter]\n");
    for p in ipm.parameters() {
        match &p.domain {
            Domain::Boolean => {
                let _ = writeln!(out, "{} (boolean) : true, false", p.name);
            }
            Domain::Enumerative(values) => {
                let _ = writeln!(out, "{} (enum) : {}", p.name, values.join(", "));
            }
            Domain::Range { lower, upper } => {
                let values: Vec<String> = (*lower..=*upper).map(|v| v.to_string()).collect();
                let _ = writeln!(out, "{} (int) : {}", p.name, values.join(", "));
            }
        }
    }
    out.push('\n');
    out.push_str("[Constraint]\n");
    for c in ipm.constraints() {
        write_expr(ipm, c, &mut out);
        out.push('\n');
    }
    out
}

fn op_symbol(op: BinOp) -> &'static str {
    match op {
        BinOp::And => "&&",
        BinOp::Or => "||",
        BinOp::Implies => "=>",
        BinOp::Iff => "<=>",
    }
}

fn write_expr(ipm: &Ipm, e: &Expr, out: &mut String) {
    match e {
        Expr::Not(inner) => {
            out.push('!');
            out.push('(');
            write_expr(ipm, inner, out);
            out.push(')');
        }
        Expr::Binary(op, l, r) => {
            for (child, is_left) in [(l, true), (r, false)] {
                if !is_left {
                    let _ = write!(out, " {} ", op_symbol(*op));
                }
                if needs_parens(*op, child, is_left) {
                    out.push('(');
                    write_expr(ipm, child, out);
                    out.push(')');
                } else {
                    write_expr(ipm, child, out);
                }
            }
        }
        Expr::Atom(Atom::Literal(p)) => {
            let _ = write!(out, "{} = true", ipm.parameter(*p).name);
        }
        Expr::Atom(Atom::Constant(b)) => {
            // ACTS has no Boolean constants; compare the first parameter with itself
            let first = &ipm.parameters()[0].name;
            let rel = if *b { "=" } else { "!=" };
            let _ = write!(out, "{first} {rel} {first}");
        }
        Expr::Atom(Atom::Compare { rel, lhs, rhs }) => {
            write_term(ipm, lhs, out);
            let _ = write!(out, " {} ", rel.symbol());
            write_term(ipm, rhs, out);
        }
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
        Term::Label { param, index } => {
            if let Domain::Enumerative(values) = &ipm.parameter(*param).domain {
                let _ = write!(out, "\"{}\"", values[*index]);
            }
        }
        Term::Arith(op, a, b) => {
            for (i, operand) in [a, b].into_iter().enumerate() {
                if i == 1 {
                    let _ = write!(out, " {} ", op.symbol());
                }
                if operand.has_arithmetic() {
                    out.push('(');
                    write_term(ipm, operand, out);
                    out.push(')');
                } else {
                    write_term(ipm, operand, out);
                }
            }
        }
    }
}
