//! Per-relationship comparison of two deployment scenarios (a standard one
//! and a connected-community one) from expert valuation bags.
//!
//! Experts rate the variability rate of a relationship on a `[lo, hi]` scale;
//! the MajOp of each bag is mapped linearly onto a percentage, so on the usual
//! 0..10 scale a MajOp of 1 reads as 10%.

use serde::Serialize;
use thiserror::Error;

use crate::fuzzy::{
    aggregate, Aggregate, FuzzyError, MajorityFunction, NoMajorityFallback, SimilarityFunction,
    ValuationBag,
};
use crate::ids::compare_ids;
use crate::variability::median;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Standard,
    Cc,
}

impl Scenario {
    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Standard => "standard",
            Scenario::Cc => "cc",
        }
    }
}

impl std::str::FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "standard" => Ok(Scenario::Standard),
            "cc" => Ok(Scenario::Cc),
            other => Err(format!("unknown scenario `{other}` (expected standard|cc)")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("relationship `{relationship}`, {} scenario: {source}", .scenario.as_str())]
pub struct ScenarioError {
    pub relationship: String,
    pub scenario: Scenario,
    #[source]
    pub source: FuzzyError,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioAssessment {
    pub relationship: String,
    pub label: Option<String>,
    pub gaps: Vec<String>,
    pub bag_standard: Vec<f64>,
    pub bag_cc: Vec<f64>,
    pub majop_standard: f64,
    pub majop_cc: f64,
    pub vr_standard: f64,
    pub vr_cc: f64,
    /// `vr_cc / vr_standard`, absent when the standard VR is not positive.
    pub improvement_ratio: Option<f64>,
    /// Scenarios whose value came from the no-majority fallback.
    pub fallbacks: Vec<Scenario>,
}

/// Shared membership configuration for a batch of assessments.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Aggregation {
    pub similarity: SimilarityFunction,
    pub majority: MajorityFunction,
    pub fallback: NoMajorityFallback,
}

/// Maps a value on the bag's scale to a percentage of that scale.
pub fn to_percent(value: f64, bag: &ValuationBag) -> f64 {
    let scale = bag.scale();
    let span = scale.hi - scale.lo;
    if span > 0.0 {
        100.0 * (value - scale.lo) / span
    } else {
        0.0
    }
}

pub fn assess_relationship(
    relationship: &str,
    standard: &ValuationBag,
    cc: &ValuationBag,
    config: &Aggregation,
) -> Result<ScenarioAssessment, ScenarioError> {
    let run = |bag: &ValuationBag, scenario: Scenario| -> Result<Aggregate, ScenarioError> {
        aggregate(bag, &config.similarity, &config.majority, config.fallback).map_err(|source| {
            ScenarioError {
                relationship: relationship.to_string(),
                scenario,
                source,
            }
        })
    };
    let std_agg = run(standard, Scenario::Standard)?;
    let cc_agg = run(cc, Scenario::Cc)?;
    let vr_standard = to_percent(std_agg.value, standard);
    let vr_cc = to_percent(cc_agg.value, cc);
    let mut fallbacks = Vec::new();
    if std_agg.fell_back {
        fallbacks.push(Scenario::Standard);
    }
    if cc_agg.fell_back {
        fallbacks.push(Scenario::Cc);
    }
    Ok(ScenarioAssessment {
        relationship: relationship.to_string(),
        label: None,
        gaps: Vec::new(),
        bag_standard: standard.values().to_vec(),
        bag_cc: cc.values().to_vec(),
        majop_standard: std_agg.value,
        majop_cc: cc_agg.value,
        vr_standard,
        vr_cc,
        improvement_ratio: (vr_standard > 0.0).then(|| vr_cc / vr_standard),
        fallbacks,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioSummary {
    pub count: usize,
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

impl RatioSummary {
    pub fn from_ratios(ratios: &[f64]) -> Option<Self> {
        if ratios.is_empty() {
            return None;
        }
        Some(Self {
            count: ratios.len(),
            min: ratios.iter().copied().fold(f64::INFINITY, f64::min),
            median: median(ratios),
            max: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub rows: Vec<ScenarioAssessment>,
    pub ratios: Option<RatioSummary>,
    /// Relationships whose improvement ratio is undefined.
    pub undefined_ratio: Vec<String>,
    /// Relationships where the CC scenario does not exceed the standard one.
    pub not_improved: Vec<String>,
}

pub fn compare_scenarios(mut assessments: Vec<ScenarioAssessment>) -> ComparisonReport {
    assessments.sort_by(|a, b| compare_ids(&a.relationship, &b.relationship));
    let ratios: Vec<f64> = assessments
        .iter()
        .filter_map(|a| a.improvement_ratio)
        .collect();
    ComparisonReport {
        ratios: RatioSummary::from_ratios(&ratios),
        undefined_ratio: assessments
            .iter()
            .filter(|a| a.improvement_ratio.is_none())
            .map(|a| a.relationship.clone())
            .collect(),
        not_improved: assessments
            .iter()
            .filter(|a| a.vr_cc <= a.vr_standard)
            .map(|a| a.relationship.clone())
            .collect(),
        rows: assessments,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzzy::Scale;

    fn bag(v: &[f64]) -> ValuationBag {
        ValuationBag::new(v.to_vec(), Scale::default()).unwrap()
    }

    #[test]
    fn identical_bags_give_unit_ratio() {
        let b = bag(&[5., 6., 5., 4., 5.]);
        let a = assess_relationship("R1", &b, &b, &Aggregation::default()).unwrap();
        assert_eq!(a.improvement_ratio, Some(1.0));
        assert_eq!(a.vr_standard, a.vr_cc);
    }

    #[test]
    fn zero_standard_bag_leaves_ratio_undefined() {
        let a = assess_relationship(
            "R1",
            &bag(&[0.0; 8]),
            &bag(&[9.0; 8]),
            &Aggregation::default(),
        )
        .unwrap();
        assert_eq!(a.majop_standard, 0.0);
        assert_eq!(a.vr_standard, 0.0);
        assert_eq!(a.improvement_ratio, None);
        let report = compare_scenarios(vec![a]);
        assert_eq!(report.undefined_ratio, vec!["R1"]);
        assert!(report.ratios.is_none());
    }

    #[test]
    fn percent_is_ten_times_on_the_0_10_scale() {
        assert!((to_percent(1.15, &bag(&[1.0])) - 11.5).abs() < 1e-12);
        let other = ValuationBag::new(vec![3.0], Scale::new(1.0, 5.0).unwrap()).unwrap();
        assert!((to_percent(3.0, &other) - 50.0).abs() < 1e-12);
    }

    #[test]
    fn no_majority_is_reported_per_scenario() {
        let err = assess_relationship(
            "R9",
            &bag(&[5.0; 4]),
            &bag(&[0.0, 5.0, 10.0]),
            &Aggregation::default(),
        )
        .unwrap_err();
        assert_eq!(err.scenario, Scenario::Cc);
        assert_eq!(err.source, FuzzyError::NoMajority);
        let lenient = Aggregation {
            fallback: NoMajorityFallback::Mean,
            ..Default::default()
        };
        let a = assess_relationship("R9", &bag(&[5.0; 4]), &bag(&[0.0, 5.0, 10.0]), &lenient)
            .unwrap();
        assert_eq!(a.fallbacks, vec![Scenario::Cc]);
        assert_eq!(a.majop_cc, 5.0);
    }

    #[test]
    fn single_ratio_summary() {
        let s = RatioSummary::from_ratios(&[2.0]).unwrap();
        assert_eq!((s.min, s.median, s.max), (2.0, 2.0, 2.0));
    }

    #[test]
    fn rows_sorted_by_relationship_id() {
        let b = bag(&[5.0; 3]);
        let rows = ["R110", "R26", "R106"]
            .iter()
            .map(|r| assess_relationship(r, &b, &b, &Aggregation::default()).unwrap())
            .collect();
        let report = compare_scenarios(rows);
        let ids: Vec<_> = report.rows.iter().map(|r| r.relationship.as_str()).collect();
        assert_eq!(ids, vec!["R26", "R106", "R110"]);
        assert_eq!(report.not_improved.len(), 3);
    }
}
