//! Profile extraction from an existing model: category, structural bounds,
//! constraint form and validity ratios.

use std::collections::HashSet;
use std::fmt::{self, Write as _};

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::model::{Atom, BinOp, Category, Domain, Expr, Ipm, Relation, Term};
use crate::ratios::{
    test_validity_ratio_exact, test_validity_ratio_mc_with, tuple_validity_ratio, ExactMethod,
    McParams, McResult, RatioError,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    /// Strength of the tuple ratio.
    pub strength: usize,
    /// Sampling parameters for the test ratio when no exact method applies.
    pub mc: McParams,
    /// Sample count overriding the bound.
    pub fixed_n: Option<u64>,
    pub seed: u64,
    /// Skip both ratio measurements.
    pub skip_ratios: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            strength: 2,
            mc: McParams {
                target: 0.1,
                probability: 0.75,
                max_error: 0.1,
            },
            fixed_n: None,
            seed: 0,
            skip_ratios: false,
        }
    }
}

/// Counts and bounds of a model, without ratios.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Profile {
    pub category: Category,
    pub parameters: usize,
    pub constraints: usize,
    pub cardinality_min: u64,
    pub cardinality_max: u64,
    /// Smallest lower and largest upper bound over integer ranges.
    pub int_lower: Option<i64>,
    pub int_upper: Option<i64>,
    pub complexity_min: Option<usize>,
    pub complexity_max: Option<usize>,
    pub all_cnf: bool,
    pub all_forbidden_tuples: bool,
    pub between_params: bool,
    pub arithmetic: bool,
    pub order_relations: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RatioMethod {
    #[serde(rename = "exact-mdd")]
    ExactMdd,
    #[serde(rename = "exact-bruteforce")]
    ExactBruteForce,
    #[serde(rename = "monte-carlo")]
    MonteCarlo,
}

impl fmt::Display for RatioMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RatioMethod::ExactMdd => "exact-mdd",
            RatioMethod::ExactBruteForce => "exact-bruteforce",
            RatioMethod::MonteCarlo => "monte-carlo",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TupleRatioReport {
    pub strength: usize,
    pub value: f64,
    /// Reduced fraction, e.g. `13/22`.
    pub exact: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestRatioReport {
    pub value: f64,
    pub method: RatioMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<McResult>,
}

/// A measurement that either succeeded or failed on its own.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Measured<T> {
    Value(T),
    Failed { error: String },
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub name: String,
    #[serde(flatten)]
    pub profile: Profile,
    pub tuple_ratio: Measured<TupleRatioReport>,
    pub test_ratio: Measured<TestRatioReport>,
}

/// Structural profile of a model.
pub fn profile(ipm: &Ipm) -> Profile {
    let cards = ipm.cardinalities();
    let ranges: Vec<(i64, i64)> = ipm
        .parameters()
        .iter()
        .filter_map(|p| match p.domain {
            Domain::Range { lower, upper } => Some((lower, upper)),
            _ => None,
        })
        .collect();
    let complexities: Vec<usize> = ipm.constraints().iter().map(Expr::complexity).collect();
    let atoms: Vec<&Atom> = ipm.constraints().iter().flat_map(Expr::atoms).collect();
    Profile {
        category: Category::infer(ipm),
        parameters: cards.len(),
        constraints: complexities.len(),
        cardinality_min: cards.iter().copied().min().unwrap_or(0),
        cardinality_max: cards.iter().copied().max().unwrap_or(0),
        int_lower: ranges.iter().map(|r| r.0).min(),
        int_upper: ranges.iter().map(|r| r.1).max(),
        complexity_min: complexities.iter().copied().min(),
        complexity_max: complexities.iter().copied().max(),
        all_cnf: ipm.constraints().iter().all(is_cnf),
        all_forbidden_tuples: ipm.constraints().iter().all(is_forbidden_tuple),
        between_params: atoms.iter().any(|a| a.is_between_params()),
        arithmetic: atoms.iter().any(|a| a.has_arithmetic()),
        order_relations: atoms.iter().any(|a| a.has_order_relation()),
    }
}

/// Full report. Ratio failures are recorded in their own field.
pub fn analyze(ipm: &Ipm, options: &AnalysisOptions) -> AnalysisReport {
    let (tuple_ratio, test_ratio) = if options.skip_ratios {
        (Measured::Skipped, Measured::Skipped)
    } else {
        (measure_tuple_ratio(ipm, options.strength), measure_test_ratio(ipm, options))
    };
    AnalysisReport {
        name: ipm.name().to_string(),
        profile: profile(ipm),
        tuple_ratio,
        test_ratio,
    }
}

fn fraction(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn measure_tuple_ratio(ipm: &Ipm, t: usize) -> Measured<TupleRatioReport> {
    match tuple_validity_ratio(ipm, t) {
        Ok(r) => Measured::Value(TupleRatioReport {
            strength: t,
            value: r.to_f64().unwrap_or(f64::NAN),
            exact: fraction(&r),
        }),
        Err(e) => Measured::Failed {
            error: e.to_string(),
        },
    }
}

fn measure_test_ratio(ipm: &Ipm, options: &AnalysisOptions) -> Measured<TestRatioReport> {
    match test_validity_ratio_exact(ipm) {
        Ok(exact) => Measured::Value(TestRatioReport {
            value: exact.value.to_f64().unwrap_or(f64::NAN),
            method: match exact.method {
                ExactMethod::Mdd => RatioMethod::ExactMdd,
                ExactMethod::BruteForce => RatioMethod::ExactBruteForce,
            },
            exact: Some(fraction(&exact.value)),
            monte_carlo: None,
        }),
        Err(RatioError::MethodUnavailable(_)) => {
            let n = options.fixed_n.unwrap_or_else(|| options.mc.sample_size());
            let mc = test_validity_ratio_mc_with(ipm, &options.mc, n, options.seed);
            Measured::Value(TestRatioReport {
                value: mc.estimate,
                method: RatioMethod::MonteCarlo,
                exact: None,
                monte_carlo: Some(mc),
            })
        }
        Err(e) => Measured::Failed {
            error: e.to_string(),
        },
    }
}

fn is_literal(e: &Expr) -> bool {
    match e {
        Expr::Atom(_) => true,
        Expr::Not(inner) => matches!(inner.as_ref(), Expr::Atom(_)),
        Expr::Binary(..) => false,
    }
}

fn is_chain(e: &Expr, op: BinOp, leaf: &dyn Fn(&Expr) -> bool) -> bool {
    match e {
        Expr::Binary(o, l, r) if *o == op => is_chain(l, op, leaf) && is_chain(r, op, leaf),
        _ => leaf(e),
    }
}

/// A conjunction of clauses, each a disjunction of possibly negated atoms.
/// A single clause and a single atom both qualify.
pub fn is_cnf(e: &Expr) -> bool {
    is_chain(e, BinOp::And, &|c| is_chain(c, BinOp::Or, &is_literal))
}

fn collect_chain<'a>(e: &'a Expr, op: BinOp, out: &mut Vec<&'a Expr>) {
    match e {
        Expr::Binary(o, l, r) if *o == op => {
            collect_chain(l, op, out);
            collect_chain(r, op, out);
        }
        _ => out.push(e),
    }
}

/// Parameter fixed by a `P = v` style atom (a bare Boolean counts as
/// `P = true`), for `negated = false`; by `P != v` or `NOT P` otherwise.
fn fixed_param(e: &Expr, negated: bool) -> Option<usize> {
    let want = if negated { Relation::Ne } else { Relation::Eq };
    match e {
        Expr::Atom(Atom::Literal(p)) if !negated => Some(*p),
        Expr::Not(inner) if negated => match inner.as_ref() {
            Expr::Atom(Atom::Literal(p)) => Some(*p),
            _ => None,
        },
        Expr::Atom(Atom::Compare { rel, lhs, rhs }) if *rel == want => match (lhs, rhs) {
            (Term::Param(p), c) | (c, Term::Param(p)) if is_constant(c) => Some(*p),
            _ => None,
        },
        _ => None,
    }
}

fn is_constant(t: &Term) -> bool {
    matches!(t, Term::Bool(_) | Term::Int(_) | Term::Label { .. })
}

fn distinct(params: impl Iterator<Item = Option<usize>>) -> bool {
    let mut seen = HashSet::new();
    for p in params {
        match p {
            Some(p) if seen.insert(p) => {}
            _ => return false,
        }
    }
    true
}

/// `NOT (P1 = v1 AND ... AND Pn = vn)` or `P1 != v1 OR ... OR Pn != vn`
/// over distinct parameters.
pub fn is_forbidden_tuple(e: &Expr) -> bool {
    let mut parts = Vec::new();
    match e {
        Expr::Not(inner) => {
            collect_chain(inner, BinOp::And, &mut parts);
            distinct(parts.iter().map(|a| fixed_param(a, false)))
        }
        _ => {
            collect_chain(e, BinOp::Or, &mut parts);
            distinct(parts.iter().map(|a| fixed_param(a, true)))
        }
    }
}

impl AnalysisReport {
    /// Human-readable `key: value` listing.
    pub fn to_table(&self) -> String {
        let p = &self.profile;
        let opt = |v: Option<i64>| v.map_or("-".to_string(), |v| v.to_string());
        let optu = |v: Option<usize>| v.map_or("-".to_string(), |v| v.to_string());
        let mut out = String::new();
        let mut row = |k: &str, v: String| {
            let _ = writeln!(out, "{k:<22}{v}");
        };
        row("model", self.name.clone());
        row("category", format!("{} ({})", p.category, p.category.short_name()));
        row("parameters", p.parameters.to_string());
        row("constraints", p.constraints.to_string());
        row("cardinality", format!("{} .. {}", p.cardinality_min, p.cardinality_max));
        row("integer bounds", format!("{} .. {}", opt(p.int_lower), opt(p.int_upper)));
        row(
            "complexity",
            format!("{} .. {}", optu(p.complexity_min), optu(p.complexity_max)),
        );
        row("all CNF", p.all_cnf.to_string());
        row("all forbidden tuples", p.all_forbidden_tuples.to_string());
        row("between parameters", p.between_params.to_string());
        row("arithmetic", p.arithmetic.to_string());
        row("order relations", p.order_relations.to_string());
        row(
            "tuple ratio",
            match &self.tuple_ratio {
                Measured::Value(r) => format!("{:.6} ({}, t = {})", r.value, r.exact, r.strength),
                Measured::Failed { error } => format!("unavailable: {error}"),
                Measured::Skipped => "skipped".into(),
            },
        );
        row(
            "test ratio",
            match &self.test_ratio {
                Measured::Value(r) => match (&r.exact, &r.monte_carlo) {
                    (Some(e), _) => format!("{:.6} ({e}, {})", r.value, r.method),
                    (None, Some(mc)) => format!(
                        "{:.6} ({}, {} of {} samples)",
                        r.value, r.method, mc.valid, mc.samples
                    ),
                    _ => format!("{:.6} ({})", r.value, r.method),
                },
                Measured::Failed { error } => format!("unavailable: {error}"),
                Measured::Skipped => "skipped".into(),
            },
        );
        out
    }
}
