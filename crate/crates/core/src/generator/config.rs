//! Generator configuration.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analyzer::Profile;
use crate::format::Dictionary;
use crate::model::{is_identifier, Category};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintForm {
    #[default]
    General,
    Cnf,
    Forbidden,
}

impl std::str::FromStr for ConstraintForm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "general" | "g" => Ok(ConstraintForm::General),
            "cnf" | "c" => Ok(ConstraintForm::Cnf),
            "forbidden" | "ft" | "f" => Ok(ConstraintForm::Forbidden),
            _ => Err(format!("unknown constraint form `{s}` (general, cnf, forbidden)")),
        }
    }
}

/// How the test ratio target is enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RatioMode {
    /// Accept when the ratio is at most the target.
    #[default]
    Max,
    /// Accept when the ratio lies within `[(1-eps) r, (1+eps) r]`.
    Band,
}

impl std::str::FromStr for RatioMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "max" => Ok(RatioMode::Max),
            "band" => Ok(RatioMode::Band),
            _ => Err(format!("unknown ratio mode `{s}` (max, band)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorConfig {
    pub category: Category,
    /// Number of models to generate.
    pub count: usize,
    /// Base of the model names; defaults to the category's long name.
    pub name: Option<String>,
    pub k_min: usize,
    pub k_max: usize,
    pub v_min: u64,
    pub v_max: u64,
    pub int_lower: i64,
    pub int_upper: i64,
    pub c_min: usize,
    pub c_max: usize,
    pub d_min: usize,
    pub d_max: usize,
    pub between_params: bool,
    pub form: ConstraintForm,
    /// Maximum tuple validity ratio, when checked.
    pub tuple_ratio: Option<f64>,
    pub strength: usize,
    /// Target test validity ratio, when checked.
    pub test_ratio: Option<f64>,
    pub probability: f64,
    pub max_error: f64,
    pub ratio_mode: RatioMode,
    pub seed: u64,
    #[serde(skip)]
    pub dictionary: Option<Dictionary>,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            category: Category::UniformBoolean,
            count: 1,
            name: None,
            k_min: 2,
            k_max: 30,
            v_min: 2,
            v_max: 30,
            int_lower: -50,
            int_upper: 50,
            c_min: 1,
            c_max: 20,
            d_min: 1,
            d_max: 15,
            between_params: false,
            form: ConstraintForm::General,
            tuple_ratio: None,
            strength: 2,
            test_ratio: None,
            probability: 0.75,
            max_error: 0.1,
            ratio_mode: RatioMode::Max,
            seed: 0,
            dictionary: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid configuration: {0}")]
pub struct ConfigError(pub String);

impl GeneratorConfig {
    pub fn base_name(&self) -> String {
        self.name
            .clone()
            .unwrap_or_else(|| self.category.long_name().to_string())
    }

    /// Checks bounds and their mutual feasibility.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let err = |m: String| Err(ConfigError(m));
        if self.count == 0 {
            return err("the number of benchmarks must be at least 1".into());
        }
        if !is_identifier(&format!("{}_0", self.base_name())) {
            return err(format!("`{}` cannot start a model name", self.base_name()));
        }
        if self.k_min == 0 || self.k_min > self.k_max {
            return err(format!(
                "parameter count bounds {}..{} are invalid",
                self.k_min, self.k_max
            ));
        }
        let cat = self.category;
        if cat.has_cardinality() {
            if self.v_min == 0 || self.v_min > self.v_max {
                return err(format!(
                    "cardinality bounds {}..{} are invalid",
                    self.v_min, self.v_max
                ));
            }
        }
        if cat == Category::Mca && (self.k_max < 2 || self.v_min == self.v_max) {
            return err(format!(
                "{cat} models mix cardinalities, which needs at least two parameters and \
                 distinct cardinality bounds"
            ));
        }
        if cat == Category::Numc {
            if self.int_lower > self.int_upper {
                return err(format!(
                    "integer bounds {}..{} are invalid",
                    self.int_lower, self.int_upper
                ));
            }
            let span = (self.int_upper as i128 - self.int_lower as i128 + 1) as u128;
            if self.v_min as u128 > span {
                return err(format!(
                    "minimum cardinality {} exceeds the {span} values between {} and {}",
                    self.v_min, self.int_lower, self.int_upper
                ));
            }
        }
        if cat.has_constraints() {
            if self.c_min == 0 || self.c_min > self.c_max {
                return err(format!(
                    "constraint count bounds {}..{} are invalid (at least one constraint is \
                     needed for a constrained category)",
                    self.c_min, self.c_max
                ));
            }
            if self.d_min > self.d_max {
                return err(format!(
                    "complexity bounds {}..{} are invalid",
                    self.d_min, self.d_max
                ));
            }
            if self.form == ConstraintForm::Forbidden && self.d_min + 1 > self.k_max {
                return err(format!(
                    "a forbidden tuple of complexity {} needs {} distinct parameters but at most \
                     {} are generated",
                    self.d_min,
                    self.d_min + 1,
                    self.k_max
                ));
            }
            for (label, r) in [("tuple", self.tuple_ratio), ("test", self.test_ratio)] {
                if let Some(r) = r {
                    if !(r > 0.0 && r <= 1.0) {
                        return err(format!("{label} validity ratio {r} is not in (0, 1]"));
                    }
                }
            }
            if self.tuple_ratio.is_some() && (self.strength == 0 || self.strength > self.k_min) {
                return err(format!(
                    "strength {} must lie between 1 and the minimum parameter count {}",
                    self.strength, self.k_min
                ));
            }
            if self.test_ratio.is_some() {
                if !(self.probability > 0.0 && self.probability < 1.0) {
                    return err(format!("probability {} is not in (0, 1)", self.probability));
                }
                if !(self.max_error > 0.0 && self.max_error < 1.0) {
                    return err(format!("error {} is not in (0, 1)", self.max_error));
                }
            }
        } else if self.tuple_ratio.is_some() || self.test_ratio.is_some() {
            return err(format!("{} models have no constraints to measure ratios of", cat));
        }
        Ok(())
    }

    /// Seeds category, bounds and form from an analyzed baseline model.
    /// Ratio checks stay off; callers enable them explicitly.
    pub fn from_profile(p: &Profile) -> GeneratorConfig {
        let mut c = GeneratorConfig {
            category: p.category,
            k_min: p.parameters,
            k_max: p.parameters,
            v_min: p.cardinality_min,
            v_max: p.cardinality_max,
            ..GeneratorConfig::default()
        };
        if let (Some(lo), Some(hi)) = (p.int_lower, p.int_upper) {
            c.int_lower = lo;
            c.int_upper = hi;
        }
        if p.category.has_constraints() {
            c.c_min = p.constraints;
            c.c_max = p.constraints;
            c.d_min = p.complexity_min.unwrap_or(0);
            c.d_max = p.complexity_max.unwrap_or(0);
            c.between_params = p.between_params;
            c.form = if p.all_forbidden_tuples {
                ConstraintForm::Forbidden
            } else if p.all_cnf {
                ConstraintForm::Cnf
            } else {
                ConstraintForm::General
            };
        }
        c
    }
}
