//! Generation settings shared by the `generate` flags and `--config` files.

use std::fmt::Display;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Deserializer};

use ipmbench::generator::{ConstraintForm, GeneratorConfig, RatioMode};
use ipmbench::model::Category;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Ctwedge,
    Acts,
    Pict,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Ctwedge => "ctw",
            Format::Acts => "acts.txt",
            Format::Pict => "pict.txt",
        }
    }
}

fn parsed<'de, D, T>(d: D) -> Result<Option<T>, D::Error>
where
    D: Deserializer<'de>,
    T: FromStr,
    T::Err: Display,
{
    match Option::<String>::deserialize(d)? {
        None => Ok(None),
        Some(s) => s.parse().map(Some).map_err(serde::de::Error::custom),
    }
}

/// Every `generate` option. Unset fields fall back to the config file, then
/// to the baseline profile, then to the defaults.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    /// Benchmark type: UB, UA, M, BC, MC, NC or their long names
    #[arg(long = "type", value_name = "TYPE")]
    #[serde(rename = "type", deserialize_with = "parsed")]
    pub category: Option<Category>,
    /// Number of benchmarks
    #[arg(long)]
    pub n: Option<usize>,
    /// Base name of the generated models
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long)]
    pub k_min: Option<usize>,
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long)]
    pub v_min: Option<u64>,
    #[arg(long)]
    pub v_max: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    pub int_lower: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub int_upper: Option<i64>,
    #[arg(long)]
    pub c_min: Option<usize>,
    #[arg(long)]
    pub c_max: Option<usize>,
    #[arg(long)]
    pub d_min: Option<usize>,
    #[arg(long)]
    pub d_max: Option<usize>,
    /// Allow comparisons between parameters
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub between_params: Option<bool>,
    /// Constraint form: general, cnf or forbidden
    #[arg(long)]
    #[serde(deserialize_with = "parsed")]
    pub form: Option<ConstraintForm>,
    /// Maximum tuple validity ratio
    #[arg(long)]
    pub tuple_ratio: Option<f64>,
    /// Tuple strength for the tuple ratio
    #[arg(long)]
    pub strength: Option<usize>,
    /// Target test validity ratio
    #[arg(long)]
    pub test_ratio: Option<f64>,
    /// Monte Carlo confidence
    #[arg(long)]
    pub prob: Option<f64>,
    /// Monte Carlo relative error
    #[arg(long)]
    pub eps: Option<f64>,
    /// Test ratio acceptance: max or band
    #[arg(long)]
    #[serde(deserialize_with = "parsed")]
    pub ratio_mode: Option<RatioMode>,
    /// Output formats, comma separated
    #[arg(long, value_enum, value_delimiter = ',')]
    pub formats: Option<Vec<Format>>,
    /// JSON dictionary of parameter names and domains
    #[arg(long, value_name = "FILE")]
    pub dictionary: Option<PathBuf>,
    /// CTWedge model whose profile seeds the defaults
    #[arg(long, value_name = "FILE")]
    pub baseline: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads
    #[arg(long)]
    pub jobs: Option<usize>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident: $($f:ident),*) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f.clone(); } )*
    };
}

impl Settings {
    /// `self` with every field set in `flags` replaced.
    pub fn overlaid(mut self, flags: &Settings) -> Settings {
        overlay!(self, flags: category, n, name, k_min, k_max, v_min, v_max, int_lower,
            int_upper, c_min, c_max, d_min, d_max, between_params, form, tuple_ratio, strength,
            test_ratio, prob, eps, ratio_mode, formats, dictionary, baseline, seed, out, jobs);
        self
    }

    /// Rejects options that do not apply to `category`.
    pub fn check_conflicts(&self, category: Category) -> Result<(), String> {
        let mut set = Vec::new();
        if !category.has_cardinality() {
            set.extend(self.v_min.map(|_| "--v-min"));
            set.extend(self.v_max.map(|_| "--v-max"));
        }
        if category != Category::Numc {
            set.extend(self.int_lower.map(|_| "--int-lower"));
            set.extend(self.int_upper.map(|_| "--int-upper"));
        }
        if !category.has_constraints() {
            for (flag, on) in [
                ("--c-min", self.c_min.is_some()),
                ("--c-max", self.c_max.is_some()),
                ("--d-min", self.d_min.is_some()),
                ("--d-max", self.d_max.is_some()),
                ("--between-params", self.between_params.is_some()),
                ("--form", self.form.is_some()),
                ("--tuple-ratio", self.tuple_ratio.is_some()),
                ("--test-ratio", self.test_ratio.is_some()),
            ] {
                if on {
                    set.push(flag);
                }
            }
        }
        if let Some(flag) = set.first() {
            let why = match *flag {
                "--v-min" | "--v-max" => "its parameters are all Boolean",
                "--int-lower" | "--int-upper" => "only NUMC models have integer ranges",
                _ => "it has no constraints",
            };
            return Err(format!(
                "{flag} does not apply to type {} ({} only): {why}",
                category.long_name(),
                match *flag {
                    "--int-lower" | "--int-upper" => "NC",
                    "--v-min" | "--v-max" => "UA, M, MC, NC",
                    _ => "BC, MC, NC",
                }
            ));
        }
        if self.tuple_ratio.is_none() && self.strength.is_some() {
            return Err("--strength needs --tuple-ratio".into());
        }
        if self.test_ratio.is_none() {
            for (flag, on) in [
                ("--prob", self.prob.is_some()),
                ("--eps", self.eps.is_some()),
                ("--ratio-mode", self.ratio_mode.is_some()),
            ] {
                if on {
                    return Err(format!("{flag} needs --test-ratio"));
                }
            }
        }
        Ok(())
    }

    /// Applies every set field to `config`.
    pub fn apply(&self, config: &mut GeneratorConfig) {
        macro_rules! copy {
            ($($f:ident => $g:ident),*) => { $( if let Some(v) = self.$f.clone() { config.$g = v; } )* };
        }
        copy!(category => category, n => count, k_min => k_min, k_max => k_max,
            v_min => v_min, v_max => v_max, int_lower => int_lower, int_upper => int_upper,
            c_min => c_min, c_max => c_max, d_min => d_min, d_max => d_max,
            between_params => between_params, form => form, strength => strength,
            prob => probability, eps => max_error, ratio_mode => ratio_mode, seed => seed);
        if self.name.is_some() {
            config.name = self.name.clone();
        }
        if self.tuple_ratio.is_some() {
            config.tuple_ratio = self.tuple_ratio;
        }
        if self.test_ratio.is_some() {
            config.test_ratio = self.test_ratio;
        }
    }
}
