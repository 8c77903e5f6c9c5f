//! Randomized benchmark synthesis.
//!
//! Each benchmark index draws from its own ChaCha substream of the
//! configured seed, so results do not depend on scheduling. A candidate
//! model is redrawn from scratch until it passes every configured check or
//! the attempt cap runs out.

mod config;
mod constraints;
mod params;

use std::fmt;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use config::{ConfigError, ConstraintForm, GeneratorConfig, RatioMode};

use crate::analyzer::{is_cnf, is_forbidden_tuple, RatioMethod};
use crate::model::{Category, Domain, Ipm};
use crate::ratios::{
    test_validity_ratio_exact_within, test_validity_ratio_mc, tuple_ratio_within, ExactLimits,
    ExactMethod, McParams, RatioError,
};
use crate::sat::Solver;
use constraints::{define_constraint, AtomSource};
use params::define_parameters;

/// Attempts per round.
pub const ATTEMPTS_PER_ROUND: u32 = 10;
/// Rounds per benchmark before giving up.
pub const MAX_ROUNDS: u32 = 100;

/// Exact test ratio limits per candidate. Larger models are sampled.
pub const EXACT_LIMITS: ExactLimits = ExactLimits {
    mdd_nodes: 50_000,
    tests: 50_000,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioCheck {
    pub value: f64,
    /// Reduced fraction when computed exactly.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    pub method: RatioMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelReport {
    pub index: usize,
    pub name: String,
    /// Candidates built, including the accepted one.
    pub attempts: u32,
    #[serde(serialize_with = "millis")]
    pub elapsed: Duration,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tuple_ratio: Option<RatioCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_ratio: Option<RatioCheck>,
    /// Forbidden tuples whose drawn complexity exceeded the parameter count
    /// minus one and was lowered.
    pub clamped: usize,
}

fn millis<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1000.0)
}

#[derive(Debug, Clone)]
pub struct GeneratedModel {
    pub ipm: Ipm,
    pub report: ModelReport,
}

/// Why candidates were rejected.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Rejections {
    pub structure: u32,
    pub category: u32,
    pub unsolvable: u32,
    /// Solver or ratio computation ran out of budget.
    pub undecided: u32,
    pub test_ratio: u32,
    pub tuple_ratio: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Stage {
    Structure,
    Category,
    Solvable,
    TestRatio,
    TupleRatio,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerationFailure {
    pub index: usize,
    pub attempts: u32,
    pub diagnostic: String,
    pub rejections: Rejections,
}

impl fmt::Display for GenerationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "benchmark {}: {}", self.index, self.diagnostic)
    }
}

#[derive(Debug, Clone)]
pub struct GenerationOutcome {
    pub models: Vec<GeneratedModel>,
    pub failures: Vec<GenerationFailure>,
}

impl GenerationOutcome {
    pub fn is_complete(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Generates `config.count` benchmarks in parallel on the current rayon pool.
pub fn generate_benchmarks(config: &GeneratorConfig) -> Result<GenerationOutcome, ConfigError> {
    config.validate()?;
    let results: Vec<Result<GeneratedModel, GenerationFailure>> = (0..config.count)
        .into_par_iter()
        .map(|i| generate_one(config, i))
        .collect();
    let mut models = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(m) => models.push(m),
            Err(f) => failures.push(f),
        }
    }
    Ok(GenerationOutcome { models, failures })
}

/// Generates the benchmark with the given index. The configuration is
/// assumed valid.
pub fn generate_one(config: &GeneratorConfig, index: usize) -> Result<GeneratedModel, GenerationFailure> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64);
    let name = format!("{}_{index}", config.base_name());
    let mut rejections = Rejections::default();
    let mut furthest = Stage::Structure;
    let mut attempts = 0;
    for _round in 0..MAX_ROUNDS {
        for _ in 0..ATTEMPTS_PER_ROUND {
            attempts += 1;
            let (ipm, clamped) = candidate(&mut rng, config, &name);
            let mc_seed: u64 = rng.gen();
            match check(&ipm, config, mc_seed) {
                Ok((tuple_ratio, test_ratio)) => {
                    return Ok(GeneratedModel {
                        ipm,
                        report: ModelReport {
                            index,
                            name,
                            attempts,
                            elapsed: start.elapsed(),
                            tuple_ratio,
                            test_ratio,
                            clamped,
                        },
                    })
                }
                Err((stage, undecided)) => {
                    furthest = furthest.max(stage);
                    let slot = match stage {
                        _ if undecided => &mut rejections.undecided,
                        Stage::Structure => &mut rejections.structure,
                        Stage::Category => &mut rejections.category,
                        Stage::Solvable => &mut rejections.unsolvable,
                        Stage::TestRatio => &mut rejections.test_ratio,
                        Stage::TupleRatio => &mut rejections.tuple_ratio,
                    };
                    *slot += 1;
                }
            }
        }
    }
    Err(GenerationFailure {
        index,
        attempts,
        diagnostic: diagnostic(config, furthest, attempts, &rejections),
        rejections,
    })
}

fn diagnostic(config: &GeneratorConfig, stage: Stage, attempts: u32, r: &Rejections) -> String {
    let requirement = match stage {
        Stage::Structure => "the configured bounds and form".to_string(),
        Stage::Category => format!("category {}", config.category),
        Stage::Solvable => "solvability".to_string(),
        Stage::TestRatio => match config.ratio_mode {
            RatioMode::Max => format!("test ratio <= {}", config.test_ratio.unwrap_or(1.0)),
            RatioMode::Band => format!(
                "test ratio within {} of {}",
                config.max_error,
                config.test_ratio.unwrap_or(1.0)
            ),
        },
        Stage::TupleRatio => format!(
            "tuple ratio <= {} (t = {})",
            config.tuple_ratio.unwrap_or(1.0),
            config.strength
        ),
    };
    format!(
        "{requirement} unreachable in {attempts} attempts (rejected: {} structure, {} category, \
         {} unsolvable, {} undecided, {} test ratio, {} tuple ratio)",
        r.structure, r.category, r.unsolvable, r.undecided, r.test_ratio, r.tuple_ratio
    )
}

fn candidate(rng: &mut ChaCha8Rng, config: &GeneratorConfig, name: &str) -> (Ipm, usize) {
    let k = rng.gen_range(config.k_min..=config.k_max);
    let params = define_parameters(rng, config, k);
    let mut constraints = Vec::new();
    let mut clamped = 0;
    if config.category.has_constraints() {
        let atoms = AtomSource::new(&params, config.category, config.between_params);
        let c = rng.gen_range(config.c_min..=config.c_max);
        for _ in 0..c {
            let d = rng.gen_range(config.d_min..=config.d_max);
            let (e, was_clamped) = define_constraint(rng, &atoms, config.form, d);
            clamped += was_clamped as usize;
            constraints.push(e);
        }
    }
    let ipm = Ipm::new(name, params, constraints).expect("generated models are well formed");
    (ipm, clamped)
}

type Checked = (Option<RatioCheck>, Option<RatioCheck>);

fn check(ipm: &Ipm, config: &GeneratorConfig, mc_seed: u64) -> Result<Checked, (Stage, bool)> {
    let violations = conformance_violations(ipm, config);
    if violations.iter().any(|v| !v.starts_with("category")) {
        return Err((Stage::Structure, false));
    }
    if !violations.is_empty() {
        return Err((Stage::Category, false));
    }
    if !config.category.has_constraints() {
        return Ok((None, None));
    }
    match Solver::new(ipm).is_solvable() {
        Ok(true) => {}
        Ok(false) => return Err((Stage::Solvable, false)),
        Err(_) => return Err((Stage::Solvable, true)),
    }
    let test_ratio = match config.test_ratio {
        None => None,
        Some(target) => {
            let mc = McParams {
                target,
                probability: config.probability,
                max_error: config.max_error,
            };
            let r = measure_test_ratio(ipm, &mc, mc_seed).map_err(|_| (Stage::TestRatio, true))?;
            let ok = match config.ratio_mode {
                RatioMode::Max => r.value <= target,
                RatioMode::Band => mc.in_band(r.value),
            };
            if !ok {
                return Err((Stage::TestRatio, false));
            }
            Some(r)
        }
    };
    let tuple_ratio = match config.tuple_ratio {
        None => None,
        Some(target) => {
            let bound = BigRational::from_float(target).expect("finite ratio");
            match tuple_ratio_within(ipm, config.strength, &bound) {
                Ok(Some(r)) => Some(RatioCheck {
                    value: r.to_f64().unwrap_or(f64::NAN),
                    exact: Some(format!("{}/{}", r.numer(), r.denom())),
                    method: RatioMethod::ExactBruteForce,
                    samples: None,
                }),
                Ok(None) => return Err((Stage::TupleRatio, false)),
                Err(_) => return Err((Stage::TupleRatio, true)),
            }
        }
    };
    Ok((tuple_ratio, test_ratio))
}

fn measure_test_ratio(ipm: &Ipm, mc: &McParams, seed: u64) -> Result<RatioCheck, RatioError> {
    match test_validity_ratio_exact_within(ipm, EXACT_LIMITS) {
        Ok(exact) => Ok(RatioCheck {
            value: exact.value.to_f64().unwrap_or(f64::NAN),
            exact: Some(format!("{}/{}", exact.value.numer(), exact.value.denom())),
            method: match exact.method {
                ExactMethod::Mdd => RatioMethod::ExactMdd,
                ExactMethod::BruteForce => RatioMethod::ExactBruteForce,
            },
            samples: None,
        }),
        Err(RatioError::MethodUnavailable(_)) => {
            let r = test_validity_ratio_mc(ipm, mc, seed);
            Ok(RatioCheck {
                value: r.estimate,
                exact: None,
                method: RatioMethod::MonteCarlo,
                samples: Some(r.samples),
            })
        }
        Err(e) => Err(e),
    }
}

/// Structural requirements of `config` that `ipm` violates: parameter and
/// constraint counts, cardinalities, integer bounds, complexities, form and
/// category. Ratios and solvability are not covered. Category violations
/// start with `category`.
pub fn conformance_violations(ipm: &Ipm, config: &GeneratorConfig) -> Vec<String> {
    let mut out = Vec::new();
    let k = ipm.parameters().len();
    if !(config.k_min..=config.k_max).contains(&k) {
        out.push(format!("{k} parameters outside {}..{}", config.k_min, config.k_max));
    }
    if config.category.has_cardinality() {
        for p in ipm.parameters() {
            let v = p.cardinality();
            if !(config.v_min..=config.v_max).contains(&v) {
                out.push(format!(
                    "`{}` has {v} values outside {}..{}",
                    p.name, config.v_min, config.v_max
                ));
            }
        }
    }
    if config.category == Category::Numc {
        for p in ipm.parameters() {
            if let Domain::Range { lower, upper } = p.domain {
                if lower < config.int_lower || upper > config.int_upper {
                    out.push(format!(
                        "`{}` spans {lower}..{upper} outside {}..{}",
                        p.name, config.int_lower, config.int_upper
                    ));
                }
            }
        }
    }
    let cs = ipm.constraints();
    if config.category.has_constraints() {
        if !(config.c_min..=config.c_max).contains(&cs.len()) {
            out.push(format!(
                "{} constraints outside {}..{}",
                cs.len(),
                config.c_min,
                config.c_max
            ));
        }
        for (i, c) in cs.iter().enumerate() {
            let d = c.complexity();
            if !(config.d_min..=config.d_max).contains(&d) {
                out.push(format!(
                    "constraint {i} has complexity {d} outside {}..{}",
                    config.d_min, config.d_max
                ));
            }
            let form_ok = match config.form {
                ConstraintForm::General => true,
                ConstraintForm::Cnf => is_cnf(c),
                ConstraintForm::Forbidden => is_forbidden_tuple(c),
            };
            if !form_ok {
                out.push(format!("constraint {i} is not in {:?} form", config.form));
            }
            if !config.between_params && c.atoms().iter().any(|a| a.is_between_params()) {
                out.push(format!("constraint {i} compares two parameters"));
            }
        }
    } else if !cs.is_empty() {
        out.push(format!("{} constraints in an unconstrained category", cs.len()));
    }
    let inferred = Category::infer(ipm);
    if inferred != config.category {
        out.push(format!("category {inferred} instead of {}", config.category));
    }
    out
}
