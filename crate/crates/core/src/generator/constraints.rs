//! Random constraints of a prescribed complexity.

use rand::seq::{IteratorRandom, SliceRandom};
use rand::Rng;

use super::ConstraintForm;
use crate::model::{ArithOp, Atom, BinOp, Category, Domain, Expr, ParamId, Parameter, Relation, Term};

/// Draws atoms for one model.
pub(crate) struct AtomSource<'a> {
    params: &'a [Parameter],
    category: Category,
    between: bool,
    /// Comparable partners of each parameter.
    partners: Vec<Vec<ParamId>>,
    booleans: Vec<ParamId>,
    ranges: Vec<ParamId>,
}

fn comparable(a: &Parameter, b: &Parameter) -> bool {
    match (&a.domain, &b.domain) {
        (Domain::Boolean, Domain::Boolean) => true,
        (Domain::Enumerative(x), Domain::Enumerative(y)) => x.iter().any(|l| y.contains(l)),
        (Domain::Range { lower: l1, upper: u1 }, Domain::Range { lower: l2, upper: u2 }) => {
            l1.max(l2) <= u1.min(u2)
        }
        _ => false,
    }
}

fn bounds(p: &Parameter) -> (i128, i128) {
    match p.domain {
        Domain::Range { lower, upper } => (lower as i128, upper as i128),
        _ => unreachable!("integer range expected"),
    }
}

fn clamp_i64(v: i128) -> i64 {
    v.clamp(i64::MIN as i128, i64::MAX as i128) as i64
}

impl<'a> AtomSource<'a> {
    pub(crate) fn new(params: &'a [Parameter], category: Category, between: bool) -> Self {
        let partners = (0..params.len())
            .map(|i| {
                (0..params.len())
                    .filter(|&j| j != i && comparable(&params[i], &params[j]))
                    .collect()
            })
            .collect();
        let of_kind = |want: fn(&Domain) -> bool| {
            (0..params.len())
                .filter(|&i| want(&params[i].domain))
                .collect::<Vec<_>>()
        };
        AtomSource {
            params,
            category,
            between,
            partners,
            booleans: of_kind(|d| matches!(d, Domain::Boolean)),
            ranges: of_kind(|d| matches!(d, Domain::Range { .. })),
        }
    }

    /// A random atom, negated with probability 1/2.
    pub(crate) fn literal<R: Rng>(&self, rng: &mut R) -> Expr {
        let atom = Expr::Atom(self.atom(rng));
        if rng.gen_bool(0.5) {
            Expr::not(atom)
        } else {
            atom
        }
    }

    fn atom<R: Rng>(&self, rng: &mut R) -> Atom {
        let x = if self.category == Category::Boolc {
            *self.booleans.choose(rng).expect("Boolean parameters")
        } else {
            rng.gen_range(0..self.params.len())
        };
        let partner = self.between && !self.partners[x].is_empty();
        let numeric = self.category == Category::Numc
            && matches!(self.params[x].domain, Domain::Range { .. });
        // uniform over the atom shapes available for x
        let shapes = 1 + partner as u32 + numeric as u32;
        let shape = rng.gen_range(0..shapes);
        if partner && shape == 1 {
            let y = *self.partners[x].choose(rng).expect("partner");
            let rel = if numeric {
                *Relation::ALL.choose(rng).expect("relations")
            } else {
                *[Relation::Eq, Relation::Ne].choose(rng).expect("relations")
            };
            return Atom::Compare {
                rel,
                lhs: Term::Param(x),
                rhs: Term::Param(y),
            };
        }
        if numeric && shape == shapes - 1 {
            return self.arithmetic(rng, x);
        }
        self.unary(rng, x)
    }

    /// `x` against a constant of its own domain.
    fn unary<R: Rng>(&self, rng: &mut R, x: ParamId) -> Atom {
        match &self.params[x].domain {
            Domain::Boolean => Atom::Literal(x),
            Domain::Enumerative(values) => Atom::Compare {
                rel: *[Relation::Eq, Relation::Ne].choose(rng).expect("relations"),
                lhs: Term::Param(x),
                rhs: Term::Label {
                    param: x,
                    index: rng.gen_range(0..values.len()),
                },
            },
            Domain::Range { lower, upper } => {
                let rel = if self.category == Category::Numc {
                    *Relation::ALL.choose(rng).expect("relations")
                } else {
                    *[Relation::Eq, Relation::Ne].choose(rng).expect("relations")
                };
                Atom::Compare {
                    rel,
                    lhs: Term::Param(x),
                    rhs: Term::Int(rng.gen_range(*lower..=*upper)),
                }
            }
        }
    }

    /// `x op y rel C` with `C` in the interval the left side can reach; a
    /// constant operand stands in for `y` when `x` is the only range.
    fn arithmetic<R: Rng>(&self, rng: &mut R, x: ParamId) -> Atom {
        let op = *ArithOp::ALL.choose(rng).expect("operators");
        let rel = *Relation::ALL.choose(rng).expect("relations");
        let (xl, xu) = bounds(&self.params[x]);
        let (rhs, (yl, yu)) = match self.ranges.iter().filter(|&&y| y != x).choose(rng) {
            Some(&y) => (Term::Param(y), bounds(&self.params[y])),
            None => {
                let k = rng.gen_range(xl..=xu);
                (Term::Int(clamp_i64(k)), (k, k))
            }
        };
        let corners = [
            op.apply(xl, yl),
            op.apply(xl, yu),
            op.apply(xu, yl),
            op.apply(xu, yu),
        ];
        let lo = clamp_i64(*corners.iter().min().expect("corners"));
        let hi = clamp_i64(*corners.iter().max().expect("corners"));
        Atom::Compare {
            rel,
            lhs: Term::Arith(op, Box::new(Term::Param(x)), Box::new(rhs)),
            rhs: Term::Int(rng.gen_range(lo..=hi)),
        }
    }

    /// `P = v` for a random value of parameter `p`.
    fn fixing(&self, rng: &mut impl Rng, p: ParamId, rel: Relation) -> Expr {
        let rhs = match &self.params[p].domain {
            Domain::Boolean => Term::Bool(rng.gen_bool(0.5)),
            Domain::Enumerative(values) => Term::Label {
                param: p,
                index: rng.gen_range(0..values.len()),
            },
            Domain::Range { lower, upper } => Term::Int(rng.gen_range(*lower..=*upper)),
        };
        Expr::compare(rel, Term::Param(p), rhs)
    }
}

fn chain(op: BinOp, items: Vec<Expr>) -> Expr {
    items
        .into_iter()
        .reduce(|acc, e| Expr::binary(op, acc, e))
        .expect("non-empty chain")
}

/// Recursive split: a node of complexity `c` joins children of complexity
/// `ceil((c-1)/2)` and `floor((c-1)/2)`.
pub(crate) fn general<R: Rng>(rng: &mut R, atoms: &AtomSource, complexity: usize) -> Expr {
    if complexity == 0 {
        return atoms.literal(rng);
    }
    let op = *BinOp::ALL.choose(rng).expect("connectors");
    let rest = complexity - 1;
    let left = general(rng, atoms, rest.div_ceil(2));
    let right = general(rng, atoms, rest / 2);
    Expr::binary(op, left, right)
}

/// A conjunction of clauses sharing `complexity + 1` literals.
pub(crate) fn cnf<R: Rng>(rng: &mut R, atoms: &AtomSource, complexity: usize) -> Expr {
    let clauses = rng.gen_range(1..=complexity + 1);
    let mut sizes = vec![1usize; clauses];
    for _ in clauses..complexity + 1 {
        sizes[rng.gen_range(0..clauses)] += 1;
    }
    let clauses = sizes
        .into_iter()
        .map(|n| chain(BinOp::Or, (0..n).map(|_| atoms.literal(rng)).collect()))
        .collect();
    chain(BinOp::And, clauses)
}

/// A forbidden combination of `complexity + 1` distinct parameter values.
/// Callers clamp the complexity to the parameter count minus one.
pub(crate) fn forbidden<R: Rng>(rng: &mut R, atoms: &AtomSource, complexity: usize) -> Expr {
    let n = atoms.params.len();
    debug_assert!(complexity < n);
    let mut chosen: Vec<ParamId> = (0..n).choose_multiple(rng, complexity + 1);
    chosen.shuffle(rng);
    if rng.gen_bool(0.5) {
        let parts = chosen
            .into_iter()
            .map(|p| atoms.fixing(rng, p, Relation::Eq))
            .collect();
        Expr::not(chain(BinOp::And, parts))
    } else {
        let parts = chosen
            .into_iter()
            .map(|p| atoms.fixing(rng, p, Relation::Ne))
            .collect();
        chain(BinOp::Or, parts)
    }
}

/// One constraint of the requested form. Returns the constraint and whether
/// its complexity had to be clamped.
pub(crate) fn define_constraint<R: Rng>(
    rng: &mut R,
    atoms: &AtomSource,
    form: ConstraintForm,
    complexity: usize,
) -> (Expr, bool) {
    match form {
        ConstraintForm::General => (general(rng, atoms, complexity), false),
        ConstraintForm::Cnf => (cnf(rng, atoms, complexity), false),
        ConstraintForm::Forbidden => {
            let max = atoms.params.len() - 1;
            let d = complexity.min(max);
            (forbidden(rng, atoms, d), d < complexity)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzer::{is_cnf, is_forbidden_tuple};
    use crate::model::Ipm;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mixed() -> Vec<Parameter> {
        vec![
            Parameter::boolean("A"),
            Parameter::boolean("B"),
            Parameter::enumerative("E", ["x", "y", "z"]),
            Parameter::enumerative("F", ["z", "w"]),
            Parameter::range("R", -3, 4),
            Parameter::range("S", 2, 9),
        ]
    }

    #[test]
    fn complexity_is_exact_for_every_form() {
        let params = mixed();
        let src = AtomSource::new(&params, Category::Numc, true);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in 0..=15 {
            for form in [ConstraintForm::General, ConstraintForm::Cnf, ConstraintForm::Forbidden] {
                for _ in 0..20 {
                    let (e, clamped) = define_constraint(&mut rng, &src, form, d);
                    let want = if form == ConstraintForm::Forbidden { d.min(5) } else { d };
                    assert_eq!(e.complexity(), want, "{form:?} {e:?}");
                    assert_eq!(clamped, want < d);
                    match form {
                        ConstraintForm::Cnf => assert!(is_cnf(&e)),
                        ConstraintForm::Forbidden => assert!(is_forbidden_tuple(&e)),
                        ConstraintForm::General => {}
                    }
                    Ipm::new("m", params.clone(), vec![e]).expect("well typed");
                }
            }
        }
    }

    #[test]
    fn forbidden_complexity_three_has_four_parameters() {
        let params = mixed();
        let src = AtomSource::new(&params, Category::Mcac, false);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let e = forbidden(&mut rng, &src, 3);
            let atoms = e.atoms();
            assert_eq!(atoms.len(), 4);
            assert_eq!(e.params().len(), 4);
        }
    }

    #[test]
    fn boolean_between_atoms_appear() {
        let params = vec![Parameter::boolean("A"), Parameter::boolean("B")];
        let src = AtomSource::new(&params, Category::Boolc, true);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let found = (0..200).any(|_| {
            general(&mut rng, &src, 2)
                .atoms()
                .iter()
                .any(|a| a.is_between_params())
        });
        assert!(found);
    }

    #[test]
    fn mcac_atoms_are_equalities_without_arithmetic() {
        let params = mixed()[..4].to_vec();
        let src = AtomSource::new(&params, Category::Mcac, true);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let e = general(&mut rng, &src, 4);
            for a in e.atoms() {
                assert!(!a.has_arithmetic() && !a.has_order_relation());
            }
        }
    }

    #[test]
    fn arithmetic_constants_are_reachable() {
        let params = mixed();
        let src = AtomSource::new(&params, Category::Numc, false);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..500 {
            if let Atom::Compare { lhs: Term::Arith(op, x, y), rhs: Term::Int(c), .. } =
                src.arithmetic(&mut rng, 4)
            {
                let xs = -3i128..=4;
                let reachable: Vec<i128> = match *y {
                    Term::Param(5) => xs
                        .flat_map(|a| (2i128..=9).map(move |b| op.apply(a, b)))
                        .collect(),
                    Term::Int(k) => xs.map(|a| op.apply(a, k as i128)).collect(),
                    _ => unreachable!(),
                };
                assert!(matches!(*x, Term::Param(4)));
                let (lo, hi) = (reachable.iter().min().unwrap(), reachable.iter().max().unwrap());
                assert!((*lo..=*hi).contains(&(c as i128)));
            } else {
                panic!("arithmetic atom expected");
            }
        }
    }
}
