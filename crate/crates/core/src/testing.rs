//! Fixtures and random small models shared by unit tests.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{ArithOp, Atom, BinOp, Domain, Expr, Ipm, Parameter, Relation, Term};

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

pub const LISTING2: &str = r#"[
	{
		"name": "ScreenSizeInch",
		"type": "Integer",
		"lowerBound": 4,
		"upperBound": 7
	},
	{
		"name": "OS",
		"type": "Enum",
		"values" : [
			"android",
			"ios"
		]
	},
	{
		"name": "WirelessCharge",
		"type": "Boolean"
	}
]"#;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelShape {
    /// Every atom kind, including arithmetic and parameter comparisons.
    Any,
    /// Only atoms comparing a parameter with a constant by `=` or `!=`.
    EqualityOnly,
}

const LABELS: [&str; 4] = ["A", "B", "C", "D"];

/// A model with 1 to 5 parameters of at most 4 values and up to 3
/// constraints of depth at most 3.
pub fn random_ipm(rng: &mut impl Rng, shape: ModelShape) -> Ipm {
    let n = rng.gen_range(1..=5);
    let params: Vec<Parameter> = (0..n)
        .map(|i| {
            let name = format!("p{i}");
            match rng.gen_range(0..3) {
                0 => Parameter::boolean(name),
                1 => {
                    let k = rng.gen_range(1..=4);
                    let mut labels = LABELS.to_vec();
                    labels.shuffle(rng);
                    labels.truncate(k);
                    Parameter::enumerative(name, labels)
                }
                _ => {
                    let lower = rng.gen_range(-2..=2);
                    Parameter::range(name, lower, lower + rng.gen_range(0..4))
                }
            }
        })
        .collect();
    let probe = Ipm::new("m", params.clone(), vec![]).expect("valid parameters");
    let constraints = (0..rng.gen_range(0..=3))
        .map(|_| random_expr(rng, &probe, shape, 3))
        .collect();
    Ipm::new("m", params, constraints).expect("well-typed constraints")
}

fn random_expr(rng: &mut impl Rng, ipm: &Ipm, shape: ModelShape, depth: usize) -> Expr {
    if depth == 0 || rng.gen_bool(0.4) {
        let atom = random_atom(rng, ipm, shape);
        return if rng.gen_bool(0.3) { Expr::not(atom) } else { atom };
    }
    let op = *BinOp::ALL.choose(rng).expect("operators");
    let l = random_expr(rng, ipm, shape, depth - 1);
    let r = random_expr(rng, ipm, shape, depth - 1);
    Expr::binary(op, l, r)
}

fn random_atom(rng: &mut impl Rng, ipm: &Ipm, shape: ModelShape) -> Expr {
    if rng.gen_bool(0.05) {
        return Expr::Atom(Atom::Constant(rng.gen()));
    }
    let n = ipm.parameters().len();
    let p = rng.gen_range(0..n);
    let param = ipm.parameter(p);
    let same_kind: Vec<usize> = (0..n)
        .filter(|&q| q != p && ipm.parameter(q).kind() == param.kind())
        .collect();
    let between = shape == ModelShape::Any && !same_kind.is_empty() && rng.gen_bool(0.3);
    let eq = if rng.gen() { Relation::Eq } else { Relation::Ne };
    match &param.domain {
        Domain::Boolean => {
            if between {
                let q = *same_kind.choose(rng).expect("non-empty");
                Expr::compare(eq, Term::Param(p), Term::Param(q))
            } else if rng.gen() {
                Expr::literal(p)
            } else {
                Expr::compare(eq, Term::Param(p), Term::Bool(rng.gen()))
            }
        }
        Domain::Enumerative(values) => {
            if between {
                let q = *same_kind.choose(rng).expect("non-empty");
                Expr::compare(eq, Term::Param(p), Term::Param(q))
            } else {
                let index = rng.gen_range(0..values.len());
                Expr::compare(eq, Term::Param(p), Term::Label { param: p, index })
            }
        }
        Domain::Range { lower, upper } => {
            if shape == ModelShape::EqualityOnly {
                return Expr::compare(eq, Term::Param(p), Term::Int(rng.gen_range(*lower..=*upper)));
            }
            let rel = *Relation::ALL.choose(rng).expect("relations");
            if between && rng.gen() {
                let q = *same_kind.choose(rng).expect("non-empty");
                let op = *ArithOp::ALL.choose(rng).expect("operators");
                let lhs = Term::Arith(op, Box::new(Term::Param(p)), Box::new(Term::Param(q)));
                Expr::compare(rel, lhs, Term::Int(rng.gen_range(-6..=6)))
            } else if between {
                let q = *same_kind.choose(rng).expect("non-empty");
                Expr::compare(rel, Term::Param(p), Term::Param(q))
            } else {
                let c = rng.gen_range(lower - 1..=upper + 1);
                Expr::compare(rel, Term::Param(p), Term::Int(c))
            }
        }
    }
}
