//! Tuple and test validity ratios.
//!
//! The tuple ratio is always exact. The test ratio is exact through a
//! decision diagram or exhaustive enumeration when either is affordable, and
//! otherwise estimated by Monte Carlo sampling with a sample size taken from
//! the Zero-One Estimator bound.

use std::cell::RefCell;
use std::collections::HashSet;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::mdd::{supports_mdd, Mdd, MddError, DEFAULT_NODE_BUDGET as MDD_NODE_BUDGET};
use crate::model::{enumerate_tuples, for_each_assignment, tuple_count, Ipm, Tuple};
use crate::sat::{BudgetExceeded, SatOutcome, Solver};

/// Largest model enumerated exhaustively for an exact test ratio.
pub const BRUTE_FORCE_LIMIT: u64 = 2_000_000;

const CHUNK: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RatioError {
    #[error("strength {t} is outside 1..={params}")]
    InvalidStrength { t: usize, params: usize },
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error("no exact method applies ({0}); use the Monte Carlo estimate")]
    MethodUnavailable(String),
    #[error("invalid Monte Carlo parameters: {0}")]
    InvalidParams(String),
}

/// Exact fraction of valid t-tuples.
pub fn tuple_validity_ratio(ipm: &Ipm, t: usize) -> Result<BigRational, RatioError> {
    let total = check_strength(ipm, t)?;
    let valid = count_valid_tuples(ipm, t, None)?.expect("no early stop without a cap");
    Ok(BigRational::new(valid.into(), total.into()))
}

/// Whether the tuple ratio is at most `bound`, stopping as soon as the
/// answer is known.
pub fn tuple_ratio_at_most(ipm: &Ipm, t: usize, bound: &BigRational) -> Result<bool, RatioError> {
    Ok(tuple_ratio_within(ipm, t, bound)?.is_some())
}

/// The exact tuple ratio when it is at most `bound`, `None` as soon as the
/// count exceeds it.
pub fn tuple_ratio_within(
    ipm: &Ipm,
    t: usize,
    bound: &BigRational,
) -> Result<Option<BigRational>, RatioError> {
    let total = check_strength(ipm, t)?;
    // floor(bound * total) valid tuples at most
    let cap = (bound * BigRational::from_integer(BigUint::from(total).into()))
        .floor()
        .to_integer();
    if cap < Zero::zero() {
        return Ok(None);
    }
    let cap = cap.to_u128().unwrap_or(u128::MAX);
    Ok(count_valid_tuples(ipm, t, Some(cap))?
        .map(|valid| BigRational::new(valid.into(), total.into())))
}

fn check_strength(ipm: &Ipm, t: usize) -> Result<u128, RatioError> {
    let params = ipm.parameters().len();
    if t == 0 || t > params {
        return Err(RatioError::InvalidStrength { t, params });
    }
    Ok(tuple_count(ipm, t))
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

/// Counts valid t-tuples; `None` once the count exceeds `cap`.
fn count_valid_tuples(ipm: &Ipm, t: usize, cap: Option<u128>) -> Result<Option<u128>, RatioError> {
    let solver = Solver::new(ipm);
    let n = ipm.parameters().len();
    let first = match solver.solve(&vec![None; n]) {
        SatOutcome::Sat(a) => a,
        SatOutcome::Unsat => return Ok(Some(0)),
        SatOutcome::Unknown => return Err(BudgetExceeded(crate::sat::DEFAULT_NODE_BUDGET).into()),
    };
    // a solvable model has at least the C(n, t) tuples of one solution
    if cap.is_some_and(|c| binomial(n, t) > c) {
        return Ok(None);
    }
    let mut covered: HashSet<Tuple> = HashSet::new();
    // values seen in some solution
    let seen: RefCell<Vec<Vec<bool>>> = RefCell::new(
        ipm.cardinalities().iter().map(|&c| vec![false; c as usize]).collect(),
    );
    let mut cover = |a: &[usize], covered: &mut HashSet<Tuple>| {
        for tp in enumerate_subsets(a, t) {
            covered.insert(tp);
        }
        let mut seen = seen.borrow_mut();
        for (p, &v) in a.iter().enumerate() {
            seen[p][v] = true;
        }
    };
    cover(&first, &mut covered);

    let mut unit_ok: Vec<Vec<bool>> = Vec::with_capacity(n);
    for p in 0..n {
        let mut row = Vec::new();
        for v in 0..ipm.parameter(p).cardinality() as usize {
            let tp = Tuple::new(ipm, vec![(p, v)]).expect("in domain");
            let ok = if seen.borrow()[p][v] {
                true
            } else {
                decide(&solver, &tp, &mut covered, &mut cover)?
            };
            row.push(ok);
            // every covered tuple is valid
            if cap.is_some_and(|c| covered.len() as u128 > c) {
                return Ok(None);
            }
        }
        unit_ok.push(row);
    }

    let mut valid = 0u128;
    for tp in enumerate_tuples(ipm, t).expect("strength checked") {
        if !tp.entries().iter().all(|&(p, v)| unit_ok[p][v]) {
            continue;
        }
        let ok = covered.contains(&tp) || decide(&solver, &tp, &mut covered, &mut cover)?;
        if ok {
            valid += 1;
            if cap.is_some_and(|c| valid.max(covered.len() as u128) > c) {
                return Ok(None);
            }
        }
    }
    Ok(Some(valid))
}

fn decide(
    solver: &Solver,
    tp: &Tuple,
    covered: &mut HashSet<Tuple>,
    cover: &mut impl FnMut(&[usize], &mut HashSet<Tuple>),
) -> Result<bool, RatioError> {
    match solver.solve(&tp.to_partial(solver.arity())) {
        SatOutcome::Sat(a) => {
            cover(&a, covered);
            Ok(true)
        }
        SatOutcome::Unsat => Ok(false),
        SatOutcome::Unknown => Err(BudgetExceeded(crate::sat::DEFAULT_NODE_BUDGET).into()),
    }
}

/// The t-tuples contained in a total assignment.
fn enumerate_subsets(a: &[usize], t: usize) -> Vec<Tuple> {
    let n = a.len();
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..t).collect();
    loop {
        out.push(Tuple::from_sorted(idx.iter().map(|&p| (p, a[p])).collect()));
        let mut i = t;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < n - t + i {
                idx[i] += 1;
                for j in i + 1..t {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExactMethod {
    Mdd,
    BruteForce,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactRatio {
    pub value: BigRational,
    pub valid: BigUint,
    pub total: BigUint,
    pub method: ExactMethod,
}

/// Resource limits of the exact test ratio methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactLimits {
    /// Decision diagram node budget.
    pub mdd_nodes: usize,
    /// Largest number of tests enumerated.
    pub tests: u64,
}

impl Default for ExactLimits {
    fn default() -> Self {
        ExactLimits {
            mdd_nodes: MDD_NODE_BUDGET,
            tests: BRUTE_FORCE_LIMIT,
        }
    }
}

/// Exact fraction of valid tests, by decision diagram when the constraints
/// allow it and by enumeration when the model has at most
/// [`BRUTE_FORCE_LIMIT`] tests.
pub fn test_validity_ratio_exact(ipm: &Ipm) -> Result<ExactRatio, RatioError> {
    test_validity_ratio_exact_within(ipm, ExactLimits::default())
}

/// [`test_validity_ratio_exact`] under the given limits.
pub fn test_validity_ratio_exact_within(ipm: &Ipm, limits: ExactLimits) -> Result<ExactRatio, RatioError> {
    let reason = match mdd_ratio(ipm, limits.mdd_nodes) {
        Ok(r) => return Ok(r),
        Err(RatioError::MethodUnavailable(reason)) => reason,
        Err(e) => return Err(e),
    };
    bruteforce_ratio(ipm, limits.tests).map_err(|e| match e {
        RatioError::MethodUnavailable(more) => {
            RatioError::MethodUnavailable(format!("{reason}, and {more}"))
        }
        other => other,
    })
}

/// Exact test ratio from the decision diagram of the constraints.
pub fn test_validity_ratio_mdd(ipm: &Ipm) -> Result<ExactRatio, RatioError> {
    mdd_ratio(ipm, MDD_NODE_BUDGET)
}

fn mdd_ratio(ipm: &Ipm, nodes: usize) -> Result<ExactRatio, RatioError> {
    if !supports_mdd(ipm) {
        return Err(RatioError::MethodUnavailable(
            "constraints use arithmetic, ordering or parameter comparisons".into(),
        ));
    }
    match Mdd::build_with_budget(ipm, true, nodes) {
        Ok(mdd) => {
            let total = ipm.total_tests();
            let valid = mdd.cardinality();
            Ok(ExactRatio {
                value: BigRational::new(valid.clone().into(), total.clone().into()),
                valid,
                total,
                method: ExactMethod::Mdd,
            })
        }
        Err(e @ MddError::NodeBudget(_)) => Err(RatioError::MethodUnavailable(e.to_string())),
        Err(MddError::Unsupported(_)) => unreachable!("support checked"),
    }
}

/// Exact test ratio by evaluating every test, for models with at most
/// [`BRUTE_FORCE_LIMIT`] tests.
pub fn test_validity_ratio_bruteforce(ipm: &Ipm) -> Result<ExactRatio, RatioError> {
    bruteforce_ratio(ipm, BRUTE_FORCE_LIMIT)
}

fn bruteforce_ratio(ipm: &Ipm, limit: u64) -> Result<ExactRatio, RatioError> {
    let total = ipm.total_tests();
    match ipm.total_tests_u64() {
        Some(n) if n <= limit => {
            let mut valid = 0u64;
            for_each_assignment(ipm, |a| {
                valid += ipm.satisfies(a) as u64;
                true
            });
            Ok(ExactRatio {
                value: BigRational::new(BigUint::from(valid).into(), total.clone().into()),
                valid: valid.into(),
                total,
                method: ExactMethod::BruteForce,
            })
        }
        _ => Err(RatioError::MethodUnavailable(format!(
            "{total} tests exceed the enumeration limit of {limit}"
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McParams {
    /// Desired test validity ratio, in (0, 1].
    pub target: f64,
    /// Confidence, in (0, 1).
    pub probability: f64,
    /// Relative error, in (0, 1).
    pub max_error: f64,
}

impl McParams {
    pub fn new(target: f64, probability: f64, max_error: f64) -> Result<Self, RatioError> {
        if !(target > 0.0 && target <= 1.0) {
            return Err(RatioError::InvalidParams(format!("ratio {target} not in (0, 1]")));
        }
        if !(probability > 0.0 && probability < 1.0) {
            return Err(RatioError::InvalidParams(format!(
                "probability {probability} not in (0, 1)"
            )));
        }
        if !(max_error > 0.0 && max_error < 1.0) {
            return Err(RatioError::InvalidParams(format!("error {max_error} not in (0, 1)")));
        }
        Ok(McParams {
            target,
            probability,
            max_error,
        })
    }

    /// `(1/r) * 4 ln(2 / (1 - p)) / eps^2`, before rounding up.
    pub fn sample_bound(&self) -> f64 {
        4.0 * (2.0 / (1.0 - self.probability)).ln()
            / (self.max_error * self.max_error)
            / self.target
    }

    /// Smallest sample count meeting the bound.
    pub fn sample_size(&self) -> u64 {
        self.sample_bound().ceil() as u64
    }

    /// Whether `estimate` lies in `[(1-eps) r, (1+eps) r]`.
    pub fn in_band(&self, estimate: f64) -> bool {
        let (lo, hi) = (
            (1.0 - self.max_error) * self.target,
            (1.0 + self.max_error) * self.target,
        );
        estimate >= lo && estimate <= hi
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McResult {
    pub samples: u64,
    pub valid: u64,
    pub estimate: f64,
    /// The estimate falls in the two-sided band around the target.
    pub accepted: bool,
    pub seed: u64,
}

impl McResult {
    pub fn from_counts(samples: u64, valid: u64, params: &McParams, seed: u64) -> Self {
        assert!(valid <= samples && samples > 0, "invalid sample counts");
        let estimate = valid as f64 / samples as f64;
        McResult {
            samples,
            valid,
            estimate,
            accepted: params.in_band(estimate),
            seed,
        }
    }
}

/// Monte Carlo estimate with the bound's sample size.
pub fn test_validity_ratio_mc(ipm: &Ipm, params: &McParams, seed: u64) -> McResult {
    test_validity_ratio_mc_with(ipm, params, params.sample_size(), seed)
}

/// Monte Carlo estimate over exactly `samples` uniform random tests. Validity
/// is decided by evaluating the constraints; the solver is never involved.
/// Samples are drawn in chunks, each from its own stream of the seeded
/// generator, so the result does not depend on thread scheduling.
pub fn test_validity_ratio_mc_with(ipm: &Ipm, params: &McParams, samples: u64, seed: u64) -> McResult {
    let samples = samples.max(1);
    let cards = ipm.cardinalities();
    let chunks = samples.div_ceil(CHUNK);
    let valid: u64 = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let len = CHUNK.min(samples - chunk * CHUNK);
            let mut values = vec![0usize; cards.len()];
            let mut valid = 0u64;
            for _ in 0..len {
                for (v, &c) in values.iter_mut().zip(&cards) {
                    *v = rng.gen_range(0..c as usize);
                }
                valid += ipm.satisfies(&values) as u64;
            }
            valid
        })
        .sum();
    McResult::from_counts(samples, valid, params, seed)
}
