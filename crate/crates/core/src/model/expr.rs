//! Constraint expression trees and their evaluation.

use std::fmt;

use super::{Assignment, Domain, Ipm, ModelError, ParamId, ParamKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    And,
    Or,
    Implies,
    Iff,
}

impl BinOp {
    pub const ALL: [BinOp; 4] = [BinOp::And, BinOp::Or, BinOp::Implies, BinOp::Iff];

    pub fn apply(self, l: bool, r: bool) -> bool {
        match self {
            BinOp::And => l && r,
            BinOp::Or => l || r,
            BinOp::Implies => !l || r,
            BinOp::Iff => l == r,
        }
    }

    /// Kleene three-valued version of [`BinOp::apply`].
    pub fn apply3(self, l: Option<bool>, r: Option<bool>) -> Option<bool> {
        match self {
            BinOp::And => match (l, r) {
                (Some(false), _) | (_, Some(false)) => Some(false),
                (Some(true), Some(true)) => Some(true),
                _ => None,
            },
            BinOp::Or => match (l, r) {
                (Some(true), _) | (_, Some(true)) => Some(true),
                (Some(false), Some(false)) => Some(false),
                _ => None,
            },
            BinOp::Implies => BinOp::Or.apply3(l.map(|b| !b), r),
            BinOp::Iff => Some(l? == r?),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Relation {
    pub const ALL: [Relation; 6] = [
        Relation::Eq,
        Relation::Ne,
        Relation::Lt,
        Relation::Le,
        Relation::Gt,
        Relation::Ge,
    ];

    pub fn is_equality(self) -> bool {
        matches!(self, Relation::Eq | Relation::Ne)
    }

    pub fn holds<T: Ord>(self, l: T, r: T) -> bool {
        match self {
            Relation::Eq => l == r,
            Relation::Ne => l != r,
            Relation::Lt => l < r,
            Relation::Le => l <= r,
            Relation::Gt => l > r,
            Relation::Ge => l >= r,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Ne => "!=",
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Gt => ">",
            Relation::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

impl ArithOp {
    pub const ALL: [ArithOp; 3] = [ArithOp::Add, ArithOp::Sub, ArithOp::Mul];

    pub fn apply(self, l: i128, r: i128) -> i128 {
        match self {
            ArithOp::Add => l + r,
            ArithOp::Sub => l - r,
            ArithOp::Mul => l * r,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Param(ParamId),
    Bool(bool),
    /// Value `index` of the enumerative parameter `param`.
    Label { param: ParamId, index: usize },
    Int(i64),
    Arith(ArithOp, Box<Term>, Box<Term>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Atom {
    /// A bare Boolean parameter used as a formula.
    Literal(ParamId),
    Constant(bool),
    Compare { rel: Relation, lhs: Term, rhs: Term },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Not(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Atom(Atom),
}

impl Expr {
    pub fn not(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn and(l: Expr, r: Expr) -> Expr {
        Expr::binary(BinOp::And, l, r)
    }

    pub fn or(l: Expr, r: Expr) -> Expr {
        Expr::binary(BinOp::Or, l, r)
    }

    pub fn implies(l: Expr, r: Expr) -> Expr {
        Expr::binary(BinOp::Implies, l, r)
    }

    pub fn iff(l: Expr, r: Expr) -> Expr {
        Expr::binary(BinOp::Iff, l, r)
    }

    pub fn literal(p: ParamId) -> Expr {
        Expr::Atom(Atom::Literal(p))
    }

    pub fn compare(rel: Relation, lhs: Term, rhs: Term) -> Expr {
        Expr::Atom(Atom::Compare { rel, lhs, rhs })
    }

    /// Number of binary connectors (AND, OR, implies, iff). Negations and
    /// atoms count zero.
    pub fn complexity(&self) -> usize {
        match self {
            Expr::Not(e) => e.complexity(),
            Expr::Binary(_, l, r) => 1 + l.complexity() + r.complexity(),
            Expr::Atom(_) => 0,
        }
    }

    /// Evaluates under a total assignment of the model it belongs to.
    pub fn evaluate(&self, ipm: &Ipm, assignment: &Assignment) -> Result<bool, ModelError> {
        let n = ipm.parameters().len();
        if assignment.indices().len() != n {
            return Err(ModelError::AssignmentArity {
                expected: n,
                got: assignment.indices().len(),
            });
        }
        let mut bad = None;
        self.visit_params(&mut |p| {
            if p >= n {
                bad = Some(p);
            }
        });
        if let Some(param) = bad {
            return Err(ModelError::UnknownParameter {
                constraint: 0,
                param,
            });
        }
        Ok(self.eval_indices(ipm, assignment.indices()))
    }

    /// Fast-path evaluation over raw value indices; the expression must
    /// belong to `ipm`.
    pub(crate) fn eval_indices(&self, ipm: &Ipm, values: &[usize]) -> bool {
        match self {
            Expr::Not(e) => !e.eval_indices(ipm, values),
            Expr::Binary(op, l, r) => match op {
                BinOp::And => l.eval_indices(ipm, values) && r.eval_indices(ipm, values),
                BinOp::Or => l.eval_indices(ipm, values) || r.eval_indices(ipm, values),
                BinOp::Implies => !l.eval_indices(ipm, values) || r.eval_indices(ipm, values),
                BinOp::Iff => l.eval_indices(ipm, values) == r.eval_indices(ipm, values),
            },
            Expr::Atom(a) => {
                let lookup = |p: ParamId| Some(values[p]);
                a.eval3(ipm, &lookup).expect("total assignment")
            }
        }
    }

    /// Three-valued evaluation over a partial assignment (`None` = unassigned).
    pub fn evaluate_partial(&self, ipm: &Ipm, values: &[Option<usize>]) -> Option<bool> {
        let lookup = |p: ParamId| values[p];
        self.eval3(ipm, &lookup)
    }

    fn eval3(&self, ipm: &Ipm, lookup: &dyn Fn(ParamId) -> Option<usize>) -> Option<bool> {
        match self {
            Expr::Not(e) => e.eval3(ipm, lookup).map(|b| !b),
            Expr::Binary(op, l, r) => {
                let lv = l.eval3(ipm, lookup);
                match (op, lv) {
                    (BinOp::And, Some(false)) => return Some(false),
                    (BinOp::Or, Some(true)) => return Some(true),
                    (BinOp::Implies, Some(false)) => return Some(true),
                    _ => {}
                }
                op.apply3(lv, r.eval3(ipm, lookup))
            }
            Expr::Atom(a) => a.eval3(ipm, lookup),
        }
    }

    /// Calls `f` on every parameter reference, in left-to-right order.
    pub fn visit_params(&self, f: &mut impl FnMut(ParamId)) {
        match self {
            Expr::Not(e) => e.visit_params(f),
            Expr::Binary(_, l, r) => {
                l.visit_params(f);
                r.visit_params(f);
            }
            Expr::Atom(Atom::Literal(p)) => f(*p),
            Expr::Atom(Atom::Constant(_)) => {}
            Expr::Atom(Atom::Compare { lhs, rhs, .. }) => {
                lhs.visit_params(f);
                rhs.visit_params(f);
            }
        }
    }

    /// Sorted, deduplicated parameters this expression mentions.
    pub fn params(&self) -> Vec<ParamId> {
        let mut out = Vec::new();
        self.visit_params(&mut |p| out.push(p));
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            Expr::Not(e) => e.collect_atoms(out),
            Expr::Binary(_, l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
            Expr::Atom(a) => out.push(a),
        }
    }

    pub(crate) fn type_check(&self, ipm: &Ipm, index: usize) -> Result<(), ModelError> {
        let n = ipm.parameters().len();
        let mut unknown = None;
        self.visit_params(&mut |p| {
            if p >= n && unknown.is_none() {
                unknown = Some(p);
            }
        });
        if let Some(param) = unknown {
            return Err(ModelError::UnknownParameter {
                constraint: index,
                param,
            });
        }
        for atom in self.atoms() {
            atom.type_check(ipm)
                .map_err(|message| ModelError::IllTyped {
                    constraint: index,
                    message,
                })?;
        }
        Ok(())
    }
}

/// Runtime value of a term: Booleans, interned enum labels, or integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Val {
    Bool(bool),
    Label(u32),
    Int(i128),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TermType {
    Bool,
    /// Enumerative term; the parameter whose labels it ranges over, if known.
    Enum(Option<ParamId>),
    Int,
}

impl Atom {
    /// True for atoms built from arithmetic, ordering relations, or a
    /// comparison between two parameters.
    pub fn is_numeric_or_between(&self) -> bool {
        self.has_arithmetic() || self.has_order_relation() || self.is_between_params()
    }

    pub fn has_arithmetic(&self) -> bool {
        match self {
            Atom::Compare { lhs, rhs, .. } => lhs.has_arithmetic() || rhs.has_arithmetic(),
            _ => false,
        }
    }

    pub fn has_order_relation(&self) -> bool {
        matches!(self, Atom::Compare { rel, .. } if !rel.is_equality())
    }

    /// `x = y` style comparison with a parameter on both sides.
    pub fn is_between_params(&self) -> bool {
        match self {
            Atom::Compare { lhs, rhs, .. } => {
                let mut l = Vec::new();
                lhs.visit_params(&mut |p| l.push(p));
                let mut r = Vec::new();
                rhs.visit_params(&mut |p| r.push(p));
                !l.is_empty() && !r.is_empty()
            }
            _ => false,
        }
    }

    fn eval3(&self, ipm: &Ipm, lookup: &dyn Fn(ParamId) -> Option<usize>) -> Option<bool> {
        match self {
            Atom::Literal(p) => lookup(*p).map(|v| v == 0),
            Atom::Constant(b) => Some(*b),
            Atom::Compare { rel, lhs, rhs } => {
                let l = lhs.eval3(ipm, lookup)?;
                let r = rhs.eval3(ipm, lookup)?;
                Some(match (l, r) {
                    (Val::Bool(a), Val::Bool(b)) => rel.holds(a, b),
                    (Val::Label(a), Val::Label(b)) => match rel {
                        Relation::Eq => a == b,
                        Relation::Ne => a != b,
                        _ => false,
                    },
                    (Val::Int(a), Val::Int(b)) => rel.holds(a, b),
                    _ => false,
                })
            }
        }
    }

    fn type_check(&self, ipm: &Ipm) -> Result<(), String> {
        match self {
            Atom::Constant(_) => Ok(()),
            Atom::Literal(p) => match ipm.parameter(*p).kind() {
                ParamKind::Boolean => Ok(()),
                _ => Err(format!(
                    "`{}` is not Boolean and cannot stand alone",
                    ipm.parameter(*p).name
                )),
            },
            Atom::Compare { rel, lhs, rhs } => {
                let lt = lhs.type_of(ipm)?;
                let rt = rhs.type_of(ipm)?;
                match (lt, rt) {
                    (TermType::Bool, TermType::Bool) | (TermType::Enum(_), TermType::Enum(_))
                        if !rel.is_equality() =>
                    {
                        Err(format!("relation `{}` needs integer operands", rel.symbol()))
                    }
                    (TermType::Bool, TermType::Bool) | (TermType::Int, TermType::Int) => Ok(()),
                    (TermType::Enum(_), TermType::Enum(_)) => {
                        let label_owner = |t: &Term| match t {
                            Term::Label { param, .. } => Some(*param),
                            _ => None,
                        };
                        let param_of = |t: &Term| match t {
                            Term::Param(p) => Some(*p),
                            _ => None,
                        };
                        match (label_owner(lhs), label_owner(rhs)) {
                            (Some(_), Some(_)) => {
                                Err("comparison between two constants".to_string())
                            }
                            (Some(owner), None) if param_of(rhs) != Some(owner) => {
                                Err("enumerative value compared with a foreign parameter".into())
                            }
                            (None, Some(owner)) if param_of(lhs) != Some(owner) => {
                                Err("enumerative value compared with a foreign parameter".into())
                            }
                            _ => Ok(()),
                        }
                    }
                    _ => Err(format!("mismatched operand types for `{}`", rel.symbol())),
                }
            }
        }
    }
}

impl Term {
    pub fn has_arithmetic(&self) -> bool {
        matches!(self, Term::Arith(..))
    }

    pub fn visit_params(&self, f: &mut impl FnMut(ParamId)) {
        match self {
            Term::Param(p) => f(*p),
            Term::Arith(_, a, b) => {
                a.visit_params(f);
                b.visit_params(f);
            }
            _ => {}
        }
    }

    fn eval3(&self, ipm: &Ipm, lookup: &dyn Fn(ParamId) -> Option<usize>) -> Option<Val> {
        match self {
            Term::Bool(b) => Some(Val::Bool(*b)),
            Term::Int(i) => Some(Val::Int(*i as i128)),
            Term::Label { param, index } => Some(Val::Label(ipm.label_id(*param, *index))),
            Term::Param(p) => {
                let idx = lookup(*p)?;
                Some(match &ipm.parameter(*p).domain {
                    Domain::Boolean => Val::Bool(idx == 0),
                    Domain::Enumerative(_) => Val::Label(ipm.label_id(*p, idx)),
                    Domain::Range { lower, .. } => Val::Int(*lower as i128 + idx as i128),
                })
            }
            Term::Arith(op, a, b) => {
                let (Val::Int(x), Val::Int(y)) = (a.eval3(ipm, lookup)?, b.eval3(ipm, lookup)?)
                else {
                    return None;
                };
                Some(Val::Int(op.apply(x, y)))
            }
        }
    }

    fn type_of(&self, ipm: &Ipm) -> Result<TermType, String> {
        match self {
            Term::Bool(_) => Ok(TermType::Bool),
            Term::Int(_) => Ok(TermType::Int),
            Term::Label { param, index } => match &ipm.parameter(*param).domain {
                Domain::Enumerative(values) if *index < values.len() => {
                    Ok(TermType::Enum(Some(*param)))
                }
                _ => Err(format!(
                    "value #{index} does not belong to `{}`",
                    ipm.parameter(*param).name
                )),
            },
            Term::Param(p) => Ok(match ipm.parameter(*p).kind() {
                ParamKind::Boolean => TermType::Bool,
                ParamKind::Enumerative => TermType::Enum(Some(*p)),
                ParamKind::IntegerRange => TermType::Int,
            }),
            Term::Arith(op, a, b) => match (a.type_of(ipm)?, b.type_of(ipm)?) {
                (TermType::Int, TermType::Int) => Ok(TermType::Int),
                _ => Err(format!("operator `{}` needs integer operands", op.symbol())),
            },
        }
    }
}

impl fmt::Display for BinOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BinOp::And => "AND",
            BinOp::Or => "OR",
            BinOp::Implies => "=>",
            BinOp::Iff => "<=>",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::{Parameter, Value};
    use super::*;
    use proptest::prelude::*;

    fn listing1() -> Ipm {
        Ipm::new(
            "example1",
            vec![
                Parameter::enumerative("P1", ["V1", "V2"]),
                Parameter::boolean("P2"),
                Parameter::enumerative("P3", ["V1", "V2", "V3"]),
                Parameter::range("P4", 2, 5),
            ],
            vec![],
        )
        .unwrap()
    }

    fn eq(p: ParamId, t: Term) -> Expr {
        Expr::compare(Relation::Eq, Term::Param(p), t)
    }

    #[test]
    fn complexity_examples() {
        // P1 = true AND P2 = false
        let e = Expr::and(eq(0, Term::Bool(true)), eq(1, Term::Bool(false)));
        assert_eq!(e.complexity(), 1);
        // P1 => (P2 AND P3)
        let e = Expr::implies(
            Expr::literal(0),
            Expr::and(Expr::literal(1), Expr::literal(2)),
        );
        assert_eq!(e.complexity(), 2);
        let e = Expr::compare(Relation::Ne, Term::Param(0), Term::Param(2));
        assert_eq!(e.complexity(), 0);
        assert_eq!(Expr::not(e).complexity(), 0);
    }

    #[test]
    fn evaluate_examples() {
        let ipm = listing1();
        // P1 != P3 with P1=V1, P3=V2
        let ne = Expr::compare(Relation::Ne, Term::Param(0), Term::Param(2));
        let a = Assignment::new(&ipm, vec![0, 0, 1, 0]).unwrap();
        assert_eq!(ne.evaluate(&ipm, &a), Ok(true));
        // same label across parameters compares equal
        let a = Assignment::new(&ipm, vec![0, 0, 0, 0]).unwrap();
        assert_eq!(ne.evaluate(&ipm, &a), Ok(false));

        // (P4=3 <=> P2=true) OR P3=V3 with P4=3, P2=false, P3=V1
        let e = Expr::or(
            Expr::iff(eq(3, Term::Int(3)), eq(1, Term::Bool(true))),
            eq(2, Term::Label { param: 2, index: 2 }),
        );
        let a = Assignment::from_values(
            &ipm,
            &[
                ("P1", Value::Label("V1".into())),
                ("P2", Value::Bool(false)),
                ("P3", Value::Label("V1".into())),
                ("P4", Value::Int(3)),
            ],
        )
        .unwrap();
        assert_eq!(e.evaluate(&ipm, &a), Ok(false));
    }

    #[test]
    fn arithmetic_evaluation() {
        let ipm = Ipm::new(
            "m",
            vec![Parameter::range("P1", 0, 5), Parameter::range("P2", 0, 5)],
            vec![],
        )
        .unwrap();
        let e = Expr::compare(
            Relation::Le,
            Term::Arith(ArithOp::Add, Box::new(Term::Param(0)), Box::new(Term::Param(1))),
            Term::Int(5),
        );
        let a = Assignment::new(&ipm, vec![2, 3]).unwrap();
        assert_eq!(e.evaluate(&ipm, &a), Ok(true));
        let a = Assignment::new(&ipm, vec![3, 3]).unwrap();
        assert_eq!(e.evaluate(&ipm, &a), Ok(false));
    }

    #[test]
    fn evaluate_rejects_mismatched_models() {
        let ipm = listing1();
        let small = Ipm::new("s", vec![Parameter::boolean("a")], vec![]).unwrap();
        let a = Assignment::new(&small, vec![0]).unwrap();
        assert!(matches!(
            Expr::literal(1).evaluate(&ipm, &a),
            Err(ModelError::AssignmentArity { .. })
        ));
        assert!(matches!(
            Expr::literal(3).evaluate(&small, &a),
            Err(ModelError::UnknownParameter { .. })
        ));
    }

    #[test]
    fn partial_evaluation_short_circuits() {
        let ipm = listing1();
        let e = Expr::and(eq(1, Term::Bool(true)), eq(3, Term::Int(4)));
        assert_eq!(e.evaluate_partial(&ipm, &[None, Some(1), None, None]), Some(false));
        assert_eq!(e.evaluate_partial(&ipm, &[None, Some(0), None, None]), None);
        assert_eq!(e.evaluate_partial(&ipm, &[None, Some(0), None, Some(2)]), Some(true));
    }

    #[test]
    fn type_checking() {
        let params = listing1().parameters().to_vec();
        let bad = |e: Expr| Ipm::new("m", params.clone(), vec![e]).is_err();
        assert!(bad(Expr::literal(0)));
        assert!(bad(Expr::compare(Relation::Lt, Term::Param(0), Term::Param(2))));
        assert!(bad(Expr::compare(Relation::Eq, Term::Param(1), Term::Int(1))));
        assert!(bad(eq(2, Term::Label { param: 0, index: 0 })));
        assert!(bad(Expr::compare(
            Relation::Eq,
            Term::Arith(ArithOp::Add, Box::new(Term::Param(1)), Box::new(Term::Int(1))),
            Term::Int(2)
        )));
        assert!(bad(Expr::literal(9)));
        assert!(!bad(Expr::compare(Relation::Ge, Term::Param(3), Term::Int(4))));
        assert!(!bad(Expr::compare(Relation::Eq, Term::Param(0), Term::Param(2))));
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0usize..4).prop_map(Expr::literal),
            any::<bool>().prop_map(|b| Expr::Atom(Atom::Constant(b))),
        ];
        leaf.prop_recursive(8, 256, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Expr::not),
                (0usize..4, inner.clone(), inner).prop_map(|(op, l, r)| Expr::binary(
                    BinOp::ALL[op],
                    l,
                    r
                )),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn complexity_is_structurally_recursive(e in arb_expr()) {
            let expected = match &e {
                Expr::Binary(_, l, r) => 1 + l.complexity() + r.complexity(),
                Expr::Not(c) => c.complexity(),
                Expr::Atom(_) => 0,
            };
            prop_assert_eq!(e.complexity(), expected);
        }
    }
}
