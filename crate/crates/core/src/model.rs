//! FRAM model: functions, their six aspects and the qualified relationships
//! coupling an upstream Output to a downstream input-side aspect.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ids::compare_ids;

/// Version tag written to and required from every model document.
pub const SCHEMA_VERSION: u32 = 1;

/// The six coupling points of a FRAM function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aspect {
    Input,
    Precondition,
    Resource,
    Time,
    Control,
    Output,
}

impl Aspect {
    pub const ALL: [Aspect; 6] = [
        Aspect::Input,
        Aspect::Precondition,
        Aspect::Resource,
        Aspect::Time,
        Aspect::Control,
        Aspect::Output,
    ];

    /// The five aspects a relationship may target on its destination.
    pub const RECEIVING: [Aspect; 5] = [
        Aspect::Input,
        Aspect::Precondition,
        Aspect::Resource,
        Aspect::Time,
        Aspect::Control,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Aspect::Input => "input",
            Aspect::Precondition => "precondition",
            Aspect::Resource => "resource",
            Aspect::Time => "time",
            Aspect::Control => "control",
            Aspect::Output => "output",
        }
    }

    pub fn is_receiving(self) -> bool {
        self != Aspect::Output
    }
}

impl fmt::Display for Aspect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FramFunction {
    pub id: String,
    pub label: String,
}

/// A qualified coupling `{origin, destination, aspect, qname}` with an
/// importance weight. The origin side is always the origin's Output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Relationship {
    pub id: String,
    pub origin: String,
    pub destination: String,
    pub aspect: Aspect,
    pub qname: String,
    pub weight: f64,
}

impl Relationship {
    /// The `origin:qname:destination:aspect` rendering used in FRAM tables.
    pub fn qualified_label(&self) -> String {
        format!(
            "{}:{}:{}:{}",
            self.origin, self.qname, self.destination, self.aspect
        )
    }

    fn quadruple(&self) -> (&str, &str, Aspect, &str) {
        (&self.origin, &self.destination, self.aspect, &self.qname)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("function id `{0}` is already present")]
    DuplicateFunctionId(String),
    #[error("function `{0}` has an empty label")]
    EmptyLabel(String),
    #[error("relationship id `{0}` is already present")]
    DuplicateRelationshipId(String),
    #[error("relationship `{relationship}` references unknown function `{function}`")]
    UnknownFunction { relationship: String, function: String },
    #[error("relationship `{0}` targets the output aspect; only input-side aspects can receive")]
    OutputAsDestinationAspect(String),
    #[error("relationship `{relationship}` duplicates the quadruple of `{existing}`")]
    DuplicateQuadruple { relationship: String, existing: String },
    #[error("relationship `{relationship}` has non-positive weight {weight}")]
    NonPositiveWeight { relationship: String, weight: f64 },
    #[error("unsupported schema_version {0} (expected {SCHEMA_VERSION})")]
    SchemaVersion(u32),
}

/// A validated FRAM model.
///
/// Functions and relationships are kept sorted by identifier, so the model
/// built from any permutation of the same valid additions is identical.
/// Referential integrity is enforced by [`FramModel::add_relationship`] but
/// not by deserialization; use [`FramModel::validate`] on loaded documents.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "ModelDocument", into = "ModelDocument")]
pub struct FramModel {
    functions: Vec<FramFunction>,
    relationships: Vec<Relationship>,
}

impl FramModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn functions(&self) -> &[FramFunction] {
        &self.functions
    }

    pub fn relationships(&self) -> &[Relationship] {
        &self.relationships
    }

    pub fn function(&self, id: &str) -> Option<&FramFunction> {
        self.function_index(id).map(|i| &self.functions[i])
    }

    pub fn relationship(&self, id: &str) -> Option<&Relationship> {
        self.relationships
            .binary_search_by(|r| compare_ids(&r.id, id))
            .ok()
            .map(|i| &self.relationships[i])
    }

    pub fn function_index(&self, id: &str) -> Option<usize> {
        self.functions
            .binary_search_by(|f| compare_ids(&f.id, id))
            .ok()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty() && self.relationships.is_empty()
    }

    pub fn add_function(
        &mut self,
        id: impl Into<String>,
        label: impl Into<String>,
    ) -> Result<(), ModelError> {
        let function = FramFunction {
            id: id.into(),
            label: label.into(),
        };
        if function.label.trim().is_empty() {
            return Err(ModelError::EmptyLabel(function.id));
        }
        match self
            .functions
            .binary_search_by(|f| compare_ids(&f.id, &function.id))
        {
            Ok(_) => Err(ModelError::DuplicateFunctionId(function.id)),
            Err(pos) => {
                self.functions.insert(pos, function);
                Ok(())
            }
        }
    }

    pub fn add_relationship(&mut self, relationship: Relationship) -> Result<(), ModelError> {
        for end in [&relationship.origin, &relationship.destination] {
            if self.function_index(end).is_none() {
                return Err(ModelError::UnknownFunction {
                    relationship: relationship.id.clone(),
                    function: end.clone(),
                });
            }
        }
        self.insert_relationship(relationship)
    }

    /// Inserts without the referential check, which deserialized documents
    /// defer to [`FramModel::validate`].
    fn insert_relationship(&mut self, relationship: Relationship) -> Result<(), ModelError> {
        if !relationship.aspect.is_receiving() {
            return Err(ModelError::OutputAsDestinationAspect(relationship.id));
        }
        if !(relationship.weight > 0.0 && relationship.weight.is_finite()) {
            return Err(ModelError::NonPositiveWeight {
                relationship: relationship.id,
                weight: relationship.weight,
            });
        }
        if let Some(existing) = self
            .relationships
            .iter()
            .find(|r| r.quadruple() == relationship.quadruple())
        {
            return Err(ModelError::DuplicateQuadruple {
                relationship: relationship.id,
                existing: existing.id.clone(),
            });
        }
        match self
            .relationships
            .binary_search_by(|r| compare_ids(&r.id, &relationship.id))
        {
            Ok(_) => Err(ModelError::DuplicateRelationshipId(relationship.id)),
            Err(pos) => {
                self.relationships.insert(pos, relationship);
                Ok(())
            }
        }
    }

    /// Functions that originate at least one relationship.
    pub fn origin_set(&self) -> BTreeSet<&str> {
        self.relationships.iter().map(|r| r.origin.as_str()).collect()
    }

    /// Functions that receive at least one relationship.
    pub fn destination_set(&self) -> BTreeSet<&str> {
        self.relationships
            .iter()
            .map(|r| r.destination.as_str())
            .collect()
    }

    /// Structural report: dangling references, functions without inbound
    /// couplings (background candidates), isolated functions and functions
    /// whose Output feeds nothing.
    pub fn validate(&self) -> ValidationReport {
        let known: HashSet<&str> = self.functions.iter().map(|f| f.id.as_str()).collect();
        let mut report = ValidationReport::default();
        for r in &self.relationships {
            for (end, function) in [(End::Origin, &r.origin), (End::Destination, &r.destination)] {
                if !known.contains(function.as_str()) {
                    report.dangling.push(DanglingReference {
                        relationship: r.id.clone(),
                        function: function.clone(),
                        end,
                    });
                }
            }
        }
        let origins = self.origin_set();
        let destinations = self.destination_set();
        for f in &self.functions {
            let id = f.id.as_str();
            let has_in = destinations.contains(id);
            let has_out = origins.contains(id);
            if !has_in {
                report.background.push(f.id.clone());
            }
            if !has_out {
                report.no_output.push(f.id.clone());
            }
            if !has_in && !has_out {
                report.isolated.push(f.id.clone());
            }
        }
        report
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum End {
    Origin,
    Destination,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DanglingReference {
    pub relationship: String,
    pub function: String,
    pub end: End,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub dangling: Vec<DanglingReference>,
    /// No inbound relationships.
    pub background: Vec<String>,
    /// No inbound and no outbound relationships.
    pub isolated: Vec<String>,
    /// Output aspect not coupled to anything.
    pub no_output: Vec<String>,
}

impl ValidationReport {
    /// True when every relationship references an existing function.
    pub fn is_consistent(&self) -> bool {
        self.dangling.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.dangling.is_empty()
            && self.background.is_empty()
            && self.isolated.is_empty()
            && self.no_output.is_empty()
    }
}

/// On-disk shape of a model file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub schema_version: u32,
    pub functions: Vec<FramFunction>,
    pub relationships: Vec<Relationship>,
}

impl TryFrom<ModelDocument> for FramModel {
    type Error = ModelError;

    fn try_from(doc: ModelDocument) -> Result<Self, Self::Error> {
        if doc.schema_version != SCHEMA_VERSION {
            return Err(ModelError::SchemaVersion(doc.schema_version));
        }
        let mut model = FramModel::new();
        for f in doc.functions {
            model.add_function(f.id, f.label)?;
        }
        for r in doc.relationships {
            model.insert_relationship(r)?;
        }
        Ok(model)
    }
}

impl From<FramModel> for ModelDocument {
    fn from(model: FramModel) -> Self {
        ModelDocument {
            schema_version: SCHEMA_VERSION,
            functions: model.functions,
            relationships: model.relationships,
        }
    }
}
