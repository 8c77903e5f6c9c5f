//! Domain dictionaries: JSON lists of named parameter templates that the
//! generator draws parameter names and domains from.
//!
//! ```json
//! [
//!   { "name": "ScreenSizeInch", "type": "Integer", "lowerBound": 4, "upperBound": 7 },
//!   { "name": "OS", "type": "Enum", "values": ["android", "ios"] },
//!   { "name": "WirelessCharge", "type": "Boolean" }
//! ]
//! ```

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{is_identifier, Domain, ParamKind, Parameter};

#[derive(Debug, Error)]
pub enum DictionaryError {
    #[error("malformed dictionary JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("entry `{name}`: unsupported type `{ty}`")]
    UnknownType { name: String, ty: String },
    #[error("entry `{name}`: {message}")]
    Invalid { name: String, message: String },
    #[error("duplicate entry `{0}`")]
    Duplicate(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EntryType {
    Boolean,
    Enum,
    Integer,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DictionaryEntry {
    pub name: String,
    pub domain: Domain,
}

impl DictionaryEntry {
    pub fn entry_type(&self) -> EntryType {
        match self.domain {
            Domain::Boolean => EntryType::Boolean,
            Domain::Enumerative(_) => EntryType::Enum,
            Domain::Range { .. } => EntryType::Integer,
        }
    }

    pub fn kind(&self) -> ParamKind {
        self.to_parameter().kind()
    }

    pub fn cardinality(&self) -> u64 {
        self.to_parameter().cardinality()
    }

    pub fn to_parameter(&self) -> Parameter {
        Parameter {
            name: self.name.clone(),
            domain: self.domain.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dictionary {
    pub entries: Vec<DictionaryEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    name: String,
    #[serde(rename = "type")]
    ty: String,
    values: Option<Vec<String>>,
    #[serde(rename = "lowerBound")]
    lower_bound: Option<i64>,
    #[serde(rename = "upperBound")]
    upper_bound: Option<i64>,
}

impl Dictionary {
    /// Parses a dictionary, keeping entries in file order.
    pub fn from_json(text: &str) -> Result<Self, DictionaryError> {
        let raw: Vec<RawEntry> = serde_json::from_str(text)?;
        let mut seen = HashSet::new();
        let mut entries = Vec::with_capacity(raw.len());
        for e in raw {
            let invalid = |message: &str| DictionaryError::Invalid {
                name: e.name.clone(),
                message: message.to_string(),
            };
            if !is_identifier(&e.name) {
                return Err(invalid("name is not a valid identifier"));
            }
            let has_bounds = e.lower_bound.is_some() || e.upper_bound.is_some();
            let domain = match e.ty.as_str() {
                "Boolean" => {
                    if e.values.is_some() || has_bounds {
                        return Err(invalid("Boolean entries take no values or bounds"));
                    }
                    Domain::Boolean
                }
                "Enum" => {
                    if has_bounds {
                        return Err(invalid("Enum entries take no bounds"));
                    }
                    let values = e.values.clone().ok_or_else(|| invalid("missing `values`"))?;
                    if values.is_empty() {
                        return Err(invalid("`values` is empty"));
                    }
                    if let Some(bad) = values.iter().find(|v| !is_identifier(v)) {
                        return Err(invalid(&format!("value `{bad}` is not a valid identifier")));
                    }
                    let distinct: HashSet<_> = values.iter().collect();
                    if distinct.len() != values.len() {
                        return Err(invalid("duplicate value"));
                    }
                    Domain::Enumerative(values)
                }
                "Integer" => {
                    if e.values.is_some() {
                        return Err(invalid("Integer entries take no values"));
                    }
                    let (Some(lower), Some(upper)) = (e.lower_bound, e.upper_bound) else {
                        return Err(invalid("needs both `lowerBound` and `upperBound`"));
                    };
                    if lower > upper {
                        return Err(invalid("lowerBound exceeds upperBound"));
                    }
                    Domain::Range { lower, upper }
                }
                other => {
                    return Err(DictionaryError::UnknownType {
                        name: e.name.clone(),
                        ty: other.to_string(),
                    })
                }
            };
            if !seen.insert(e.name.clone()) {
                return Err(DictionaryError::Duplicate(e.name));
            }
            entries.push(DictionaryEntry {
                name: e.name,
                domain,
            });
        }
        Ok(Dictionary { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::testing::LISTING2;

    #[test]
    fn loads_smartphone_dictionary() {
        let d = Dictionary::from_json(LISTING2).unwrap();
        assert_eq!(
            d.entries,
            vec![
                DictionaryEntry {
                    name: "ScreenSizeInch".into(),
                    domain: Domain::Range { lower: 4, upper: 7 }
                },
                DictionaryEntry {
                    name: "OS".into(),
                    domain: Domain::Enumerative(vec!["android".into(), "ios".into()])
                },
                DictionaryEntry {
                    name: "WirelessCharge".into(),
                    domain: Domain::Boolean
                },
            ]
        );
        assert_eq!(d.entries[0].cardinality(), 4);
    }

    #[test]
    fn empty_array() {
        assert!(Dictionary::from_json("[]").unwrap().is_empty());
    }

    #[test]
    fn rejections() {
        let float = Dictionary::from_json(r#"[{"name": "x", "type": "Float"}]"#).unwrap_err();
        assert!(matches!(float, DictionaryError::UnknownType { .. }));
        for bad in [
            r#"[{"name": "x", "type": "Enum"}]"#,
            r#"[{"name": "x", "type": "Integer", "lowerBound": 1}]"#,
            r#"[{"name": "x", "type": "Integer", "lowerBound": 3, "upperBound": 1}]"#,
            r#"[{"name": "x", "type": "Boolean", "colour": "red"}]"#,
            r#"[{"name": "x", "type": "Boolean"}, {"name": "x", "type": "Boolean"}]"#,
            r#"[{"name": "not an id", "type": "Boolean"}]"#,
            r#"[{"name": "x", "type": "Enum", "values": ["a", "a"]}]"#,
            r#"{"name": "x"}"#,
            "[",
        ] {
            assert!(Dictionary::from_json(bad).is_err(), "{bad}");
        }
    }
}
