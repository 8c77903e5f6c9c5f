//! Input parameter models: parameters with finite domains plus constraint
//! expressions over them.

mod expr;
mod tuples;

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use expr::{ArithOp, Atom, BinOp, Expr, Relation, Term};
pub use tuples::{enumerate_tuples, tuple_count, Tuple, TupleIter};

/// Index of a parameter inside its model, in declaration order.
pub type ParamId = usize;

/// Words that the textual format reserves and therefore cannot name anything.
pub const RESERVED_WORDS: &[&str] = &[
    "Model",
    "Parameters",
    "Constraints",
    "Boolean",
    "AND",
    "OR",
    "NOT",
    "true",
    "false",
];

/// `true` for `[A-Za-z_][A-Za-z0-9_]*` words that are not reserved.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !RESERVED_WORDS.contains(&s)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("`{0}` is not a valid identifier")]
    InvalidName(String),
    #[error("duplicate parameter `{0}`")]
    DuplicateParameter(String),
    #[error("enumerative parameter `{0}` has no values")]
    EmptyEnumeration(String),
    #[error("duplicate value `{label}` in parameter `{param}`")]
    DuplicateLabel { param: String, label: String },
    #[error("range of `{name}` has lower bound {lower} above upper bound {upper}")]
    InvalidRange { name: String, lower: i64, upper: i64 },
    #[error("constraint {constraint} references unknown parameter #{param}")]
    UnknownParameter { constraint: usize, param: ParamId },
    #[error("constraint {constraint}: {message}")]
    IllTyped { constraint: usize, message: String },
    #[error("assignment covers {got} parameters but the model has {expected}")]
    AssignmentArity { expected: usize, got: usize },
    #[error("value index {index} is outside the domain of `{param}`")]
    ValueOutOfDomain { param: String, index: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParamKind {
    Boolean,
    Enumerative,
    IntegerRange,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Domain {
    /// Values in domain order: `true`, then `false`.
    Boolean,
    Enumerative(Vec<String>),
    /// Inclusive bounds.
    Range { lower: i64, upper: i64 },
}

/// A concrete domain value, as seen by users of the model.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Bool(bool),
    Label(String),
    Int(i64),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Label(l) => f.write_str(l),
            Value::Int(i) => write!(f, "{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Parameter {
    pub name: String,
    pub domain: Domain,
}

impl Parameter {
    pub fn boolean(name: impl Into<String>) -> Self {
        Parameter {
            name: name.into(),
            domain: Domain::Boolean,
        }
    }

    pub fn enumerative<S: Into<String>>(
        name: impl Into<String>,
        values: impl IntoIterator<Item = S>,
    ) -> Self {
        Parameter {
            name: name.into(),
            domain: Domain::Enumerative(values.into_iter().map(Into::into).collect()),
        }
    }

    pub fn range(name: impl Into<String>, lower: i64, upper: i64) -> Self {
        Parameter {
            name: name.into(),
            domain: Domain::Range { lower, upper },
        }
    }

    pub fn kind(&self) -> ParamKind {
        match self.domain {
            Domain::Boolean => ParamKind::Boolean,
            Domain::Enumerative(_) => ParamKind::Enumerative,
            Domain::Range { .. } => ParamKind::IntegerRange,
        }
    }

    /// Number of values in the domain.
    pub fn cardinality(&self) -> u64 {
        match &self.domain {
            Domain::Boolean => 2,
            Domain::Enumerative(values) => values.len() as u64,
            Domain::Range { lower, upper } => (*upper as i128 - *lower as i128 + 1) as u64,
        }
    }

    /// The value at `index` in domain order. Panics if out of range.
    pub fn value(&self, index: usize) -> Value {
        match &self.domain {
            Domain::Boolean => Value::Bool(index == 0),
            Domain::Enumerative(values) => Value::Label(values[index].clone()),
            Domain::Range { lower, upper } => {
                let v = lower + index as i64;
                assert!(v <= *upper, "index {index} outside range");
                Value::Int(v)
            }
        }
    }

    /// Inverse of [`Parameter::value`].
    pub fn index_of(&self, value: &Value) -> Option<usize> {
        match (&self.domain, value) {
            (Domain::Boolean, Value::Bool(b)) => Some(if *b { 0 } else { 1 }),
            (Domain::Enumerative(values), Value::Label(l)) => values.iter().position(|v| v == l),
            (Domain::Range { lower, upper }, Value::Int(i)) if lower <= i && i <= upper => {
                Some((i - lower) as usize)
            }
            _ => None,
        }
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        match &self.domain {
            Domain::Enumerative(values) => values.iter().position(|v| v == label),
            _ => None,
        }
    }

    fn validate(&self) -> Result<(), ModelError> {
        if !is_identifier(&self.name) {
            return Err(ModelError::InvalidName(self.name.clone()));
        }
        match &self.domain {
            Domain::Boolean => Ok(()),
            Domain::Enumerative(values) => {
                if values.is_empty() {
                    return Err(ModelError::EmptyEnumeration(self.name.clone()));
                }
                let mut seen = HashSet::new();
                for v in values {
                    if !seen.insert(v.as_str()) {
                        return Err(ModelError::DuplicateLabel {
                            param: self.name.clone(),
                            label: v.clone(),
                        });
                    }
                }
                Ok(())
            }
            Domain::Range { lower, upper } => {
                if lower > upper {
                    Err(ModelError::InvalidRange {
                        name: self.name.clone(),
                        lower: *lower,
                        upper: *upper,
                    })
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// An input parameter model. Immutable once built; construct with [`Ipm::new`].
#[derive(Debug, Clone)]
pub struct Ipm {
    name: String,
    parameters: Vec<Parameter>,
    constraints: Vec<Expr>,
    /// Interned label id for each (enumerative parameter, value index);
    /// equal labels share an id across parameters.
    label_ids: Vec<Vec<u32>>,
}

impl PartialEq for Ipm {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.parameters == other.parameters
            && self.constraints == other.constraints
    }
}

impl Eq for Ipm {}

impl Ipm {
    pub fn new(
        name: impl Into<String>,
        parameters: Vec<Parameter>,
        constraints: Vec<Expr>,
    ) -> Result<Self, ModelError> {
        let name = name.into();
        if !is_identifier(&name) {
            return Err(ModelError::InvalidName(name));
        }
        let mut names = HashSet::new();
        for p in &parameters {
            p.validate()?;
            if !names.insert(p.name.as_str()) {
                return Err(ModelError::DuplicateParameter(p.name.clone()));
            }
        }
        let mut interner: HashMap<&str, u32> = HashMap::new();
        let label_ids = parameters
            .iter()
            .map(|p| match &p.domain {
                Domain::Enumerative(values) => values
                    .iter()
                    .map(|v| {
                        let next = interner.len() as u32;
                        *interner.entry(v.as_str()).or_insert(next)
                    })
                    .collect(),
                _ => Vec::new(),
            })
            .collect();
        let ipm = Ipm {
            name,
            parameters,
            constraints,
            label_ids,
        };
        for (i, c) in ipm.constraints.iter().enumerate() {
            c.type_check(&ipm, i)?;
        }
        Ok(ipm)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn parameters(&self) -> &[Parameter] {
        &self.parameters
    }

    pub fn parameter(&self, id: ParamId) -> &Parameter {
        &self.parameters[id]
    }

    pub fn constraints(&self) -> &[Expr] {
        &self.constraints
    }

    pub fn param_id(&self, name: &str) -> Option<ParamId> {
        self.parameters.iter().position(|p| p.name == name)
    }

    pub fn cardinalities(&self) -> Vec<u64> {
        self.parameters.iter().map(Parameter::cardinality).collect()
    }

    /// Same parameters and constraints under a different name.
    pub fn renamed(&self, name: impl Into<String>) -> Result<Self, ModelError> {
        Ipm::new(name, self.parameters.clone(), self.constraints.clone())
    }

    pub(crate) fn label_id(&self, param: ParamId, index: usize) -> u32 {
        self.label_ids[param][index]
    }

    /// Number of full assignments, ignoring constraints.
    pub fn total_tests(&self) -> BigUint {
        self.parameters
            .iter()
            .fold(BigUint::from(1u32), |acc, p| acc * p.cardinality())
    }

    /// Same as [`Ipm::total_tests`] when the product fits in a `u64`.
    pub fn total_tests_u64(&self) -> Option<u64> {
        self.parameters
            .iter()
            .try_fold(1u64, |acc, p| acc.checked_mul(p.cardinality()))
    }

    /// Whether the full assignment given as value indices satisfies every
    /// constraint. `values` must have one in-domain index per parameter.
    pub fn satisfies(&self, values: &[usize]) -> bool {
        debug_assert_eq!(values.len(), self.parameters.len());
        self.constraints.iter().all(|c| c.eval_indices(self, values))
    }

    pub fn has_constraints(&self) -> bool {
        !self.constraints.is_empty()
    }
}

/// Calls `f` on every full assignment (value indices) in mixed-radix order,
/// last parameter varying fastest. Stops early when `f` returns `false`.
pub fn for_each_assignment(ipm: &Ipm, mut f: impl FnMut(&[usize]) -> bool) {
    let cards = ipm.cardinalities();
    if cards.contains(&0) {
        return;
    }
    let mut values = vec![0usize; cards.len()];
    loop {
        if !f(&values) {
            return;
        }
        let mut i = values.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            values[i] += 1;
            if (values[i] as u64) < cards[i] {
                break;
            }
            values[i] = 0;
        }
    }
}

/// A total assignment of domain value indices, one per parameter.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment(Vec<usize>);

impl Assignment {
    pub fn new(ipm: &Ipm, values: Vec<usize>) -> Result<Self, ModelError> {
        if values.len() != ipm.parameters().len() {
            return Err(ModelError::AssignmentArity {
                expected: ipm.parameters().len(),
                got: values.len(),
            });
        }
        for (p, &v) in ipm.parameters().iter().zip(&values) {
            if v as u64 >= p.cardinality() {
                return Err(ModelError::ValueOutOfDomain {
                    param: p.name.clone(),
                    index: v,
                });
            }
        }
        Ok(Assignment(values))
    }

    /// Builds an assignment from `(parameter name, value)` pairs.
    pub fn from_values(ipm: &Ipm, values: &[(&str, Value)]) -> Result<Self, ModelError> {
        let mut indices = vec![usize::MAX; ipm.parameters().len()];
        for (name, value) in values {
            let id = ipm
                .param_id(name)
                .ok_or_else(|| ModelError::InvalidName((*name).to_string()))?;
            let p = ipm.parameter(id);
            indices[id] = p.index_of(value).ok_or(ModelError::ValueOutOfDomain {
                param: p.name.clone(),
                index: usize::MAX,
            })?;
        }
        Assignment::new(ipm, indices)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }
}

/// Benchmark categories, from unconstrained Boolean models up to numeric
/// constraints over integer ranges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Category {
    UniformBoolean,
    UniformAll,
    Mca,
    Boolc,
    Mcac,
    Numc,
}

impl Category {
    pub const ALL: [Category; 6] = [
        Category::UniformBoolean,
        Category::UniformAll,
        Category::Mca,
        Category::Boolc,
        Category::Mcac,
        Category::Numc,
    ];

    pub fn long_name(self) -> &'static str {
        match self {
            Category::UniformBoolean => "UNIFORM_BOOLEAN",
            Category::UniformAll => "UNIFORM_ALL",
            Category::Mca => "MCA",
            Category::Boolc => "BOOLC",
            Category::Mcac => "MCAC",
            Category::Numc => "NUMC",
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Category::UniformBoolean => "UB",
            Category::UniformAll => "UA",
            Category::Mca => "M",
            Category::Boolc => "BC",
            Category::Mcac => "MC",
            Category::Numc => "NC",
        }
    }

    pub fn has_constraints(self) -> bool {
        matches!(self, Category::Boolc | Category::Mcac | Category::Numc)
    }

    /// Whether models of this category carry a cardinality bound.
    pub fn has_cardinality(self) -> bool {
        !matches!(self, Category::UniformBoolean | Category::Boolc)
    }

    /// Classifies a model from its parameter kinds and whether it has
    /// constraints.
    pub fn infer(ipm: &Ipm) -> Category {
        let params = ipm.parameters();
        let all_bool = params.iter().all(|p| p.kind() == ParamKind::Boolean);
        if !ipm.has_constraints() {
            let first = params.first().map(Parameter::cardinality);
            if all_bool {
                Category::UniformBoolean
            } else if params.iter().all(|p| Some(p.cardinality()) == first) {
                Category::UniformAll
            } else {
                Category::Mca
            }
        } else if all_bool {
            Category::Boolc
        } else if params.iter().all(|p| p.kind() != ParamKind::IntegerRange) {
            Category::Mcac
        } else {
            Category::Numc
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.long_name())
    }
}

impl std::str::FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.to_ascii_uppercase();
        Category::ALL
            .into_iter()
            .find(|c| c.long_name() == upper || c.short_name() == upper)
            .ok_or_else(|| {
                format!(
                    "unknown benchmark type `{s}` (expected one of UB, UA, M, BC, MC, NC or \
                     their long names)"
                )
            })
    }
}
