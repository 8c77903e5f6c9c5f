//! Finite-domain satisfiability oracle: decides whether a model, optionally
//! extended by a partial assignment, admits a satisfying test.

mod encoding;
mod solver;

pub use encoding::Encoding;
pub use solver::{query_count, BudgetExceeded, SatOutcome, Solver, DEFAULT_NODE_BUDGET};

use crate::model::{Ipm, Tuple};

/// True iff some total assignment satisfies every constraint.
pub fn is_solvable(ipm: &Ipm) -> Result<bool, BudgetExceeded> {
    Solver::new(ipm).is_solvable()
}

/// True iff some total extension of `tuple` satisfies every constraint.
pub fn is_tuple_valid(ipm: &Ipm, tuple: &Tuple) -> Result<bool, BudgetExceeded> {
    Solver::new(ipm).is_tuple_valid(tuple)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_ctwedge;
    use crate::model::{enumerate_tuples, for_each_assignment};
    use crate::testing::{random_ipm, ModelShape, LISTING1};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn brute_valid(ipm: &Ipm, tuple: &Tuple) -> bool {
        let mut found = false;
        for_each_assignment(ipm, |a| {
            if tuple.entries().iter().all(|&(p, v)| a[p] == v) && ipm.satisfies(a) {
                found = true;
            }
            !found
        });
        found
    }

    #[test]
    fn listing1_is_solvable() {
        let ipm = parse_ctwedge(LISTING1).unwrap();
        assert!(is_solvable(&ipm).unwrap());
        let SatOutcome::Sat(a) = Solver::new(&ipm).solve(&[None; 4]) else {
            panic!("expected a solution")
        };
        assert!(ipm.satisfies(&a));
    }

    #[test]
    fn contradictory_units() {
        let ipm = parse_ctwedge(
            "Model m\nParameters:\nP1 : Boolean\nConstraints:\n# P1=true #\n# P1=false #\n",
        )
        .unwrap();
        assert!(!is_solvable(&ipm).unwrap());
    }

    #[test]
    fn unconstrained_is_solvable() {
        let ipm = parse_ctwedge("Model m\nParameters:\na : Boolean\nb : {x, y}\n").unwrap();
        assert!(is_solvable(&ipm).unwrap());
        for tp in enumerate_tuples(&ipm, 2).unwrap() {
            assert!(is_tuple_valid(&ipm, &tp).unwrap());
        }
    }

    #[test]
    fn listing1_tuples() {
        let ipm = parse_ctwedge(LISTING1).unwrap();
        let bad = Tuple::new(&ipm, vec![(0, 0), (2, 0)]).unwrap();
        let good = Tuple::new(&ipm, vec![(0, 1), (2, 0)]).unwrap();
        assert!(!is_tuple_valid(&ipm, &bad).unwrap());
        assert!(is_tuple_valid(&ipm, &good).unwrap());
        assert!(!brute_valid(&ipm, &bad));
        assert!(brute_valid(&ipm, &good));
    }

    #[test]
    fn shared_labels_compare_by_name() {
        let ipm = parse_ctwedge(
            "Model m\nParameters:\nx : {A, B}\ny : {B, C}\nConstraints:\n# x = y #\n",
        )
        .unwrap();
        let SatOutcome::Sat(a) = Solver::new(&ipm).solve(&[None, None]) else {
            panic!("x = y holds for B")
        };
        assert_eq!(a, vec![1, 0]);
    }

    #[test]
    fn budget_exhaustion_is_unknown() {
        let ipm = parse_ctwedge(
            "Model m\nParameters:\na : [0 .. 9]\nb : [0 .. 9]\nc : [0 .. 9]\nd : [0 .. 9]\n\
             Constraints:\n# 2 * a + 2 * b + 2 * c + 2 * d = 31 #\n",
        )
        .unwrap();
        let solver = Solver::new(&ipm).with_budget(5);
        assert_eq!(solver.solve(&[None; 4]), SatOutcome::Unknown);
        assert_eq!(solver.is_solvable(), Err(BudgetExceeded(5)));
        assert_eq!(Solver::new(&ipm).solve(&[None; 4]), SatOutcome::Unsat);
    }

    #[test]
    fn queries_are_counted() {
        let ipm = parse_ctwedge(LISTING1).unwrap();
        let before = query_count();
        is_solvable(&ipm).unwrap();
        assert_eq!(query_count(), before + 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn agrees_with_brute_force(seed in any::<u64>()) {
            let ipm = random_ipm(&mut ChaCha8Rng::seed_from_u64(seed), ModelShape::Any);
            let mut any = false;
            for_each_assignment(&ipm, |a| { any = ipm.satisfies(a); !any });
            let solver = Solver::new(&ipm);
            prop_assert_eq!(solver.is_solvable().unwrap(), any);
            for t in 1..=ipm.parameters().len().min(2) {
                for tp in enumerate_tuples(&ipm, t).unwrap() {
                    prop_assert_eq!(solver.is_tuple_valid(&tp).unwrap(), brute_valid(&ipm, &tp));
                }
            }
        }

        #[test]
        fn invalid_tuples_stay_invalid_when_extended(seed in any::<u64>()) {
            let ipm = random_ipm(&mut ChaCha8Rng::seed_from_u64(seed), ModelShape::Any);
            prop_assume!(ipm.parameters().len() >= 2);
            let solver = Solver::new(&ipm);
            for tp in enumerate_tuples(&ipm, 1).unwrap() {
                if solver.is_tuple_valid(&tp).unwrap() {
                    continue;
                }
                let (p, v) = tp.entries()[0];
                for q in (0..ipm.parameters().len()).filter(|&q| q != p) {
                    for w in 0..ipm.parameter(q).cardinality() as usize {
                        let sup = Tuple::new(&ipm, vec![(p, v), (q, w)]).unwrap();
                        prop_assert!(!solver.is_tuple_valid(&sup).unwrap());
                    }
                }
            }
        }

        #[test]
        fn solvable_iff_some_unit_tuple_is_valid(seed in any::<u64>()) {
            let ipm = random_ipm(&mut ChaCha8Rng::seed_from_u64(seed), ModelShape::Any);
            let solver = Solver::new(&ipm);
            let any_unit = enumerate_tuples(&ipm, 1)
                .unwrap()
                .any(|tp| solver.is_tuple_valid(&tp).unwrap());
            prop_assert_eq!(solver.is_solvable().unwrap(), any_unit);
        }
    }
}
