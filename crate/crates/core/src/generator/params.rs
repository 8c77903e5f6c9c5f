//! Random parameter definitions.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use super::GeneratorConfig;
use crate::format::DictionaryEntry;
use crate::model::{Category, Domain, ParamKind, Parameter};

/// Draws `n` parameters for the configured category. Dictionary entries of
/// the chosen kind that fit the bounds are preferred over synthetic ones.
pub(crate) fn define_parameters<R: Rng>(
    rng: &mut R,
    config: &GeneratorConfig,
    n: usize,
) -> Vec<Parameter> {
    let bool_ok = (config.v_min..=config.v_max).contains(&2);
    let kinds: &[ParamKind] = match config.category {
        Category::UniformBoolean | Category::Boolc => &[ParamKind::Boolean],
        Category::UniformAll => &[ParamKind::Enumerative],
        Category::Mca | Category::Mcac if bool_ok => &[ParamKind::Boolean, ParamKind::Enumerative],
        Category::Mca | Category::Mcac => &[ParamKind::Enumerative],
        Category::Numc if bool_ok => &[
            ParamKind::Boolean,
            ParamKind::Enumerative,
            ParamKind::IntegerRange,
        ],
        Category::Numc => &[ParamKind::Enumerative, ParamKind::IntegerRange],
    };
    let uniform = (config.category == Category::UniformAll)
        .then(|| rng.gen_range(config.v_min..=config.v_max));

    let entries: &[DictionaryEntry] = config
        .dictionary
        .as_ref()
        .map_or(&[], |d| d.entries.as_slice());
    let synthetic = |s: &str| {
        s.strip_prefix("PAR")
            .is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit() || b == b'_'))
    };
    let mut used: HashSet<usize> = HashSet::new();
    let mut params = Vec::with_capacity(n);
    for i in 0..n {
        let kind = *kinds.choose(rng).expect("at least one kind");
        let card = uniform.unwrap_or_else(|| rng.gen_range(config.v_min..=config.v_max));
        let fits = |e: &DictionaryEntry| {
            e.kind() == kind
                && !synthetic(&e.name)
                && match &e.domain {
                    Domain::Boolean => true,
                    Domain::Enumerative(values) => match uniform {
                        Some(v) => values.len() as u64 == v,
                        None => (config.v_min..=config.v_max).contains(&(values.len() as u64)),
                    },
                    Domain::Range { lower, upper } => {
                        *lower >= config.int_lower
                            && *upper <= config.int_upper
                            && (config.v_min..=config.v_max).contains(&e.cardinality())
                    }
                }
        };
        let candidates: Vec<usize> = (0..entries.len())
            .filter(|j| !used.contains(j) && fits(&entries[*j]))
            .collect();
        if let Some(&j) = candidates.choose(rng) {
            used.insert(j);
            params.push(entries[j].to_parameter());
            continue;
        }
        let name = format!("PAR{i}");
        params.push(match kind {
            ParamKind::Boolean => Parameter::boolean(name),
            ParamKind::Enumerative => {
                let values: Vec<String> = (0..card).map(|j| format!("PAR{i}_{j}")).collect();
                Parameter::enumerative(name, values)
            }
            ParamKind::IntegerRange => {
                let (lower, upper) = random_range(rng, config);
                Parameter::range(name, lower, upper)
            }
        });
    }
    params
}

/// A range inside the integer bounds whose size lies in the cardinality
/// bounds, as far as the span allows.
fn random_range<R: Rng>(rng: &mut R, config: &GeneratorConfig) -> (i64, i64) {
    let span = (config.int_upper as i128 - config.int_lower as i128 + 1) as u128;
    let max_size = (config.v_max as u128).min(span);
    let min_size = (config.v_min as u128).min(max_size);
    let size = rng.gen_range(min_size..=max_size) as i128;
    let lower = rng.gen_range(config.int_lower as i128..=config.int_upper as i128 - size + 1);
    (lower as i64, (lower + size - 1) as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::Dictionary;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ranges_respect_both_bounds() {
        let config = GeneratorConfig {
            category: Category::Numc,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let (lo, hi) = random_range(&mut rng, &config);
            assert!(lo >= -50 && hi <= 50);
            assert!((2..=30).contains(&(hi - lo + 1)));
        }
    }

    #[test]
    fn uniform_all_shares_one_cardinality() {
        let config = GeneratorConfig {
            category: Category::UniformAll,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let ps = define_parameters(&mut rng, &config, 6);
            let c = ps[0].cardinality();
            assert!(ps.iter().all(|p| p.cardinality() == c && p.kind() == ParamKind::Enumerative));
            assert_eq!(ps[5].name, "PAR5");
        }
    }

    #[test]
    fn dictionary_entries_are_used() {
        let dict = Dictionary::from_json(crate::testing::LISTING2).unwrap();
        let config = GeneratorConfig {
            category: Category::Numc,
            v_min: 2,
            v_max: 5,
            int_lower: 0,
            int_upper: 20,
            dictionary: Some(dict),
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut seen = HashSet::new();
        for _ in 0..100 {
            let ps = define_parameters(&mut rng, &config, 3);
            let names: HashSet<&str> = ps.iter().map(|p| p.name.as_str()).collect();
            assert_eq!(names.len(), 3);
            for p in ps {
                seen.insert(p.name);
            }
        }
        for name in ["ScreenSizeInch", "OS", "WirelessCharge"] {
            assert!(seen.contains(name), "{name} never drawn");
        }
    }
}
