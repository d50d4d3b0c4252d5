//! Reading and writing the three JSON documents: model, observations and
//! valuations. Every document carries `schema_version: 1` and rejects
//! unknown keys.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuzzy::{FuzzyError, MajorityFunction, Scale, SimilarityFunction, ValuationBag};
use crate::ids::compare_ids;
use crate::model::{FramModel, SCHEMA_VERSION};
use crate::scenario::Aggregation;
use crate::variability::ObservationSeries;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{source_name}: {location}: {message}")]
    Schema {
        source_name: String,
        location: String,
        message: String,
    },
    #[error("{source_name}: {message}")]
    Validation { source_name: String, message: String },
}

impl InputError {
    fn schema(source_name: &str, err: serde_json::Error) -> Self {
        InputError::Schema {
            source_name: source_name.to_string(),
            location: format!("line {} column {}", err.line(), err.column()),
            message: err.to_string(),
        }
    }

    fn schema_at(source_name: &str, location: impl Into<String>, message: impl Into<String>) -> Self {
        InputError::Schema {
            source_name: source_name.to_string(),
            location: location.into(),
            message: message.into(),
        }
    }

    fn validation(source_name: &str, message: impl Into<String>) -> Self {
        InputError::Validation {
            source_name: source_name.to_string(),
            message: message.into(),
        }
    }
}

fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn check_version(source_name: &str, version: u32) -> Result<(), InputError> {
    if version != SCHEMA_VERSION {
        return Err(InputError::schema_at(
            source_name,
            "schema_version",
            format!("unsupported schema_version {version} (expected {SCHEMA_VERSION})"),
        ));
    }
    Ok(())
}

/// Parses a model without the referential-integrity check.
pub fn model_from_str_unchecked(text: &str, source_name: &str) -> Result<FramModel, InputError> {
    serde_json::from_str(text).map_err(|e| InputError::schema(source_name, e))
}

/// Parses a model and rejects dangling references.
pub fn model_from_str(text: &str, source_name: &str) -> Result<FramModel, InputError> {
    let model = model_from_str_unchecked(text, source_name)?;
    let report = model.validate();
    if let Some(d) = report.dangling.first() {
        return Err(InputError::validation(
            source_name,
            format!(
                "relationship `{}` references unknown function `{}` ({} dangling reference(s))",
                d.relationship,
                d.function,
                report.dangling.len()
            ),
        ));
    }
    Ok(model)
}

pub fn parse_model(path: &Path) -> Result<FramModel, InputError> {
    model_from_str(&read(path)?, &path.display().to_string())
}

pub fn parse_model_unchecked(path: &Path) -> Result<FramModel, InputError> {
    model_from_str_unchecked(&read(path)?, &path.display().to_string())
}

pub fn emit_model(model: &FramModel) -> String {
    let mut s = serde_json::to_string_pretty(model).expect("model serializes");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObservationDocument {
    schema_version: u32,
    observations: Vec<ObservationSeries>,
}

pub fn observations_from_str(
    text: &str,
    source_name: &str,
) -> Result<Vec<ObservationSeries>, InputError> {
    let doc: ObservationDocument =
        serde_json::from_str(text).map_err(|e| InputError::schema(source_name, e))?;
    check_version(source_name, doc.schema_version)?;
    let mut seen = HashSet::new();
    for (i, s) in doc.observations.iter().enumerate() {
        let location = format!("observations[{i}] ({})", s.function);
        s.check()
            .map_err(|e| InputError::schema_at(source_name, location.clone(), e.to_string()))?;
        if !seen.insert((s.function.clone(), s.dimension)) {
            return Err(InputError::schema_at(
                source_name,
                location,
                format!("duplicate series for function `{}` and dimension {:?}", s.function, s.dimension),
            ));
        }
    }
    Ok(doc.observations)
}

pub fn parse_observations(path: &Path) -> Result<Vec<ObservationSeries>, InputError> {
    observations_from_str(&read(path)?, &path.display().to_string())
}

pub fn emit_observations(series: &[ObservationSeries]) -> String {
    let doc = ObservationDocument {
        schema_version: SCHEMA_VERSION,
        observations: series.to_vec(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("observations serialize");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BagPairDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    gaps: Vec<String>,
    standard: Vec<f64>,
    cc: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ValuationDocument {
    schema_version: u32,
    scale: Scale,
    #[serde(default)]
    similarity: SimilarityFunction,
    #[serde(default)]
    majority: MajorityFunction,
    bags: BTreeMap<String, BagPairDocument>,
}

/// Standard and CC valuation bags for one relationship.
#[derive(Debug, Clone, PartialEq)]
pub struct ValuationEntry {
    pub relationship: String,
    pub label: Option<String>,
    pub gaps: Vec<String>,
    pub standard: ValuationBag,
    pub cc: ValuationBag,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValuationSet {
    pub scale: Scale,
    pub similarity: SimilarityFunction,
    pub majority: MajorityFunction,
    /// Sorted by relationship id.
    pub entries: Vec<ValuationEntry>,
}

impl ValuationSet {
    pub fn entry(&self, relationship: &str) -> Option<&ValuationEntry> {
        self.entries.iter().find(|e| e.relationship == relationship)
    }

    pub fn aggregation(&self) -> Aggregation {
        Aggregation {
            similarity: self.similarity.clone(),
            majority: self.majority,
            ..Default::default()
        }
    }
}

pub fn valuations_from_str(text: &str, source_name: &str) -> Result<ValuationSet, InputError> {
    let doc: ValuationDocument =
        serde_json::from_str(text).map_err(|e| InputError::schema(source_name, e))?;
    check_version(source_name, doc.schema_version)?;
    let scale = Scale::new(doc.scale.lo, doc.scale.hi)
        .map_err(|e| InputError::schema_at(source_name, "scale", e.to_string()))?;
    doc.similarity
        .check()
        .map_err(|e| InputError::schema_at(source_name, "similarity", e.to_string()))?;
    doc.majority
        .check()
        .map_err(|e| InputError::schema_at(source_name, "majority", e.to_string()))?;
    let mut entries = Vec::with_capacity(doc.bags.len());
    for (relationship, pair) in doc.bags {
        let make = |values: Vec<f64>, which: &str| -> Result<ValuationBag, InputError> {
            ValuationBag::new(values, scale).map_err(|e: FuzzyError| {
                InputError::schema_at(source_name, format!("bags.{relationship}.{which}"), e.to_string())
            })
        };
        let standard = make(pair.standard, "standard")?;
        let cc = make(pair.cc, "cc")?;
        entries.push(ValuationEntry {
            relationship,
            label: pair.label,
            gaps: pair.gaps,
            standard,
            cc,
        });
    }
    entries.sort_by(|a, b| compare_ids(&a.relationship, &b.relationship));
    Ok(ValuationSet {
        scale,
        similarity: doc.similarity,
        majority: doc.majority,
        entries,
    })
}

pub fn parse_valuations(path: &Path) -> Result<ValuationSet, InputError> {
    valuations_from_str(&read(path)?, &path.display().to_string())
}

/// Checks that every valuation entry names a relationship of `model`.
pub fn check_valuations_against(
    set: &ValuationSet,
    model: &FramModel,
    source_name: &str,
) -> Result<(), InputError> {
    for e in &set.entries {
        if model.relationship(&e.relationship).is_none() {
            return Err(InputError::validation(
                source_name,
                format!("valuation bags reference unknown relationship `{}`", e.relationship),
            ));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn output_aspect_error_names_the_relationship() {
        let json = r#"{"schema_version":1,
            "functions":[{"id":"F1","label":"a"},{"id":"F2","label":"b"}],
            "relationships":[{"id":"R7","origin":"F1","destination":"F2",
              "aspect":"output","qname":"q","weight":1}]}"#;
        let err = model_from_str(json, "m.json").unwrap_err();
        assert!(matches!(err, InputError::Schema { .. }));
        assert!(err.to_string().contains("R7"), "{err}");
    }

    #[test]
    fn malformed_json_reports_line_and_column() {
        let err = model_from_str("{\n  \"schema_version\": 1,\n  oops\n}", "m.json").unwrap_err();
        match err {
            InputError::Schema { location, .. } => assert!(location.starts_with("line 3"), "{location}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dangling_reference_is_a_validation_error() {
        let json = r#"{"schema_version":1,"functions":[{"id":"F1","label":"a"}],
            "relationships":[{"id":"R1","origin":"F1","destination":"F99",
              "aspect":"input","qname":"q","weight":1}]}"#;
        assert!(matches!(
            model_from_str(json, "m.json"),
            Err(InputError::Validation { .. })
        ));
        assert!(model_from_str_unchecked(json, "m.json").is_ok());
    }

    #[test]
    fn missing_file_is_an_io_error() {
        assert!(matches!(
            parse_model(Path::new("/nonexistent/model.json")),
            Err(InputError::Io { .. })
        ));
    }

    #[test]
    fn observations_reject_unknown_dimension_and_empty_series() {
        let bad_dim = r#"{"schema_version":1,"observations":[
            {"function":"F1","dimension":"mood","unit":"h","values":[1]}]}"#;
        assert!(observations_from_str(bad_dim, "o").is_err());
        let empty = r#"{"schema_version":1,"observations":[
            {"function":"F1","dimension":"timing","unit":"h","values":[]}]}"#;
        let err = observations_from_str(empty, "o").unwrap_err();
        assert!(err.to_string().contains("observations[0]"), "{err}");
    }

    #[test]
    fn valuations_reject_out_of_scale_values() {
        let json = r#"{"schema_version":1,"scale":{"lo":0,"hi":10},
            "bags":{"R1":{"standard":[1,2,11],"cc":[5]}}}"#;
        let err = valuations_from_str(json, "v").unwrap_err();
        assert!(err.to_string().contains("bags.R1.standard"), "{err}");
    }

    #[test]
    fn valuations_default_membership_shapes() {
        let json = r#"{"schema_version":1,"scale":{"lo":0,"hi":10},
            "bags":{"R2":{"standard":[1],"cc":[5]},"R10":{"standard":[1],"cc":[5]}}}"#;
        let set = valuations_from_str(json, "v").unwrap();
        assert_eq!(set.similarity, SimilarityFunction::default());
        assert_eq!(set.majority, MajorityFunction::default());
        let ids: Vec<_> = set.entries.iter().map(|e| e.relationship.as_str()).collect();
        assert_eq!(ids, vec!["R2", "R10"]);
    }

    #[test]
    fn schema_version_is_enforced() {
        let json = r#"{"schema_version":3,"observations":[]}"#;
        assert!(observations_from_str(json, "o").is_err());
    }
}
