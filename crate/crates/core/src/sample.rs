//! Bundled RESOLUTE urban-transport dataset.
//!
//! The model lists the 25 functions of the RESOLUTE FRAM and the community
//! relationships whose scenarios were assessed by experts (R106 to R111, R130,
//! R131), plus two couplings from F15 to F2 and F6. Every relationship whose
//! qname starts with `Synthetic coupling` is a placeholder: its endpoints were
//! assigned so that the degree prestige profile roughly follows the RESOLUTE
//! function ranking. Weights are the RESOLUTE relationship prestige values
//! expressed in integer units of 5/77.

use crate::io::{model_from_str, observations_from_str, valuations_from_str, ValuationSet};
use crate::model::FramModel;
use crate::variability::ObservationSeries;

pub const MODEL_JSON: &str = include_str!("../data/resolute_model.json");
pub const OBSERVATIONS_JSON: &str = include_str!("../data/observations.json");
pub const VALUATIONS_JSON: &str = include_str!("../data/valuations.json");

pub fn model() -> FramModel {
    model_from_str(MODEL_JSON, "resolute_model.json").expect("bundled model is valid")
}

pub fn observations() -> Vec<ObservationSeries> {
    observations_from_str(OBSERVATIONS_JSON, "observations.json")
        .expect("bundled observations are valid")
}

pub fn valuations() -> ValuationSet {
    valuations_from_str(VALUATIONS_JSON, "valuations.json").expect("bundled valuations are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_documents_load() {
        let m = model();
        assert_eq!(m.functions().len(), 25);
        assert_eq!(m.relationships().len(), 121);
        assert_eq!(m.function("F1").unwrap().label, "Deliver service");
        assert_eq!(observations().len(), 3);
        let v = valuations();
        assert_eq!(v.entries.len(), 7);
        for e in &v.entries {
            assert!(m.relationship(&e.relationship).is_some(), "{}", e.relationship);
            assert_eq!(e.standard.len(), 8);
            assert_eq!(e.cc.len(), 8);
        }
    }

    #[test]
    fn named_community_relationships_present() {
        let m = model();
        for (id, label) in [
            ("R106", "F13:User Behavior:F14:input"),
            ("R107", "F13:User Feedback:F14:input"),
            ("R108", "F14:User Behavior data:F16:resource"),
            ("R109", "F14:User generated critical event detection:F2:input"),
            ("R110", "F14:User generated critical event detection:F6:input"),
            ("R111", "F14:User generated service improvement suggestions:F24:input"),
            ("R130", "F16:Warnings - Alerts:F13:resource"),
            ("R131", "F16:Advice - Recommendation Alert:F13:resource"),
        ] {
            assert_eq!(m.relationship(id).unwrap().qualified_label(), label);
        }
    }
}
