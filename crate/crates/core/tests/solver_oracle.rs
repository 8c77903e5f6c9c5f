//! The SAT oracle against exhaustive enumeration, on models large enough
//! that propagation falls back from full support checks to bounds.

mod common;

use std::collections::HashSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ipmbench::generator::{generate_one, GeneratorConfig};
use ipmbench::model::{enumerate_tuples, for_each_assignment, Category, Ipm};
use ipmbench::sat::{SatOutcome, Solver};

fn valid_pairs(ipm: &Ipm) -> (bool, HashSet<Vec<(usize, usize)>>) {
    let n = ipm.parameters().len();
    let mut any = false;
    let mut seen = HashSet::new();
    for_each_assignment(ipm, |a| {
        if ipm.satisfies(a) {
            any = true;
            for i in 0..n {
                seen.insert(vec![(i, a[i])]);
                for j in i + 1..n {
                    seen.insert(vec![(i, a[i]), (j, a[j])]);
                }
            }
        }
        true
    });
    (any, seen)
}

fn check(ipm: &Ipm, seed: u64) {
    let solver = Solver::new(ipm);
    let (any, valid) = valid_pairs(ipm);

    match solver.solve(&vec![None; ipm.parameters().len()]) {
        SatOutcome::Sat(a) => assert!(any && ipm.satisfies(&a), "seed {seed}"),
        SatOutcome::Unsat => assert!(!any, "seed {seed}"),
        SatOutcome::Unknown => panic!("budget ran out, seed {seed}"),
    }
    for t in 1..=2.min(ipm.parameters().len()) {
        for tuple in enumerate_tuples(ipm, t).unwrap() {
            let expected = valid.contains(tuple.entries());
            assert_eq!(
                solver.is_tuple_valid(&tuple).unwrap(),
                expected,
                "seed {seed}, tuple {:?}",
                tuple.entries()
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn small_models_agree(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        check(&common::random_model(&mut rng, 1_000, false), seed);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    // wide ranges and arithmetic between parameters
    #[test]
    fn numeric_models_agree(seed in any::<u64>()) {
        let config = GeneratorConfig {
            category: Category::Numc,
            k_min: 4,
            k_max: 5,
            v_min: 5,
            v_max: 9,
            int_lower: -6,
            int_upper: 6,
            c_min: 1,
            c_max: 3,
            d_min: 2,
            d_max: 6,
            between_params: true,
            seed,
            ..Default::default()
        };
        let m = generate_one(&config, 0).unwrap();
        check(&m.ipm, seed);
    }
}
