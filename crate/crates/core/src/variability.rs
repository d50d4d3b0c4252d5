//! Performance variability of coupled functions.
//!
//! Each observation `x` is scored against an expected value `e` and a margin
//! of regular operation `m` as `dev = |(x - e) / m|`; a score of at most 1
//! means the observation stayed inside the margin. From those scores:
//!
//! * FPV sums the out-of-margin deviations of one function,
//! * FDC sums `dev_origin - dev_destination` over the observations where the
//!   origin left its margin, and may be negative (amplification),
//! * VR is `100 * FDC / FPV(origin)`.
//!
//! The FPV threshold is inclusive (`dev >= 1`) while the FDC threshold is
//! strict (`dev > 1`). Both are configurable through [`VariabilityConfig`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VariabilityError {
    #[error("margin of regular operation must be positive, got {0}")]
    ZeroMargin(f64),
    #[error("series for `{0}` has no observations")]
    EmptySeries(String),
    #[error("series for `{function}` has a non-finite value at index {index}")]
    NonFiniteValue { function: String, index: usize },
    #[error("series for `{0}` has zero spread and no zero-margin fallback is configured")]
    DegenerateSeries(String),
    #[error("profiles `{origin}` ({origin_len} observations) and `{destination}` ({destination_len}) are not aligned")]
    MisalignedSeries {
        origin: String,
        origin_len: usize,
        destination: String,
        destination_len: usize,
    },
    #[error("upstream function `{0}` shows no out-of-margin variability; VR is undefined")]
    ZeroUpstreamVariability(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PerformanceDimension {
    Timing,
    Duration,
    Distance,
    Magnitude,
    Speed,
    Force,
    Precision,
    Volume,
    Costs,
}

impl PerformanceDimension {
    pub const ALL: [PerformanceDimension; 9] = [
        PerformanceDimension::Timing,
        PerformanceDimension::Duration,
        PerformanceDimension::Distance,
        PerformanceDimension::Magnitude,
        PerformanceDimension::Speed,
        PerformanceDimension::Force,
        PerformanceDimension::Precision,
        PerformanceDimension::Volume,
        PerformanceDimension::Costs,
    ];
}

/// Measurements of one function's output along one dimension, index-aligned
/// with other series from the same process executions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservationSeries {
    pub function: String,
    pub dimension: PerformanceDimension,
    pub unit: String,
    pub values: Vec<f64>,
}

impl ObservationSeries {
    pub fn new(
        function: impl Into<String>,
        dimension: PerformanceDimension,
        unit: impl Into<String>,
        values: Vec<f64>,
    ) -> Self {
        Self {
            function: function.into(),
            dimension,
            unit: unit.into(),
            values,
        }
    }

    pub fn check(&self) -> Result<(), VariabilityError> {
        if self.values.is_empty() {
            return Err(VariabilityError::EmptySeries(self.function.clone()));
        }
        if let Some(index) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(VariabilityError::NonFiniteValue {
                function: self.function.clone(),
                index,
            });
        }
        Ok(())
    }
}

/// How the expected value and the margin of regular operation are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CenterMarginEstimator {
    /// Median and median absolute deviation.
    MedianMad,
    /// Constants supplied by the analyst.
    Fixed { expected: f64, margin: f64 },
    /// Mean and population standard deviation (absolute z-score).
    MeanStd,
}

impl fmt::Display for CenterMarginEstimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CenterMarginEstimator::MedianMad => f.write_str("median-mad"),
            CenterMarginEstimator::Fixed { expected, margin } => {
                write!(f, "fixed:{expected},{margin}")
            }
            CenterMarginEstimator::MeanStd => f.write_str("mean-std"),
        }
    }
}

impl FromStr for CenterMarginEstimator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "median-mad" => Ok(CenterMarginEstimator::MedianMad),
            "mean-std" => Ok(CenterMarginEstimator::MeanStd),
            _ => {
                let spec = s.strip_prefix("fixed:").ok_or_else(|| {
                    format!("unknown estimator `{s}` (expected median-mad|fixed:E,M|mean-std)")
                })?;
                let (e, m) = spec
                    .split_once(',')
                    .ok_or_else(|| format!("fixed estimator needs `fixed:E,M`, got `{s}`"))?;
                let expected: f64 = e
                    .trim()
                    .parse()
                    .map_err(|_| format!("invalid expected value `{e}`"))?;
                let margin: f64 = m
                    .trim()
                    .parse()
                    .map_err(|_| format!("invalid margin `{m}`"))?;
                if !(margin > 0.0 && margin.is_finite()) || !expected.is_finite() {
                    return Err(format!("fixed estimator needs finite E and M > 0, got `{s}`"));
                }
                Ok(CenterMarginEstimator::Fixed { expected, margin })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Threshold {
    /// `dev >= value`
    Inclusive(f64),
    /// `dev > value`
    Strict(f64),
}

impl Threshold {
    pub fn admits(self, dev: f64) -> bool {
        match self {
            Threshold::Inclusive(t) => dev >= t,
            Threshold::Strict(t) => dev > t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VariabilityConfig {
    pub fpv_threshold: Threshold,
    pub fdc_threshold: Threshold,
    /// Margin substituted when the estimated spread is zero. `None` turns a
    /// zero spread into [`VariabilityError::DegenerateSeries`].
    pub zero_margin_fallback: Option<f64>,
}

impl Default for VariabilityConfig {
    fn default() -> Self {
        Self {
            fpv_threshold: Threshold::Inclusive(1.0),
            fdc_threshold: Threshold::Strict(1.0),
            zero_margin_fallback: Some(1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CenterMargin {
    pub expected: f64,
    pub margin: f64,
    /// Spread before the zero-margin fallback was applied.
    pub raw_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationProfile {
    pub function: String,
    pub estimator: CenterMarginEstimator,
    pub expected: f64,
    pub margin: f64,
    pub devs: Vec<f64>,
}

/// `|(x - e) / m|`
pub fn deviation(x: f64, expected: f64, margin: f64) -> Result<f64, VariabilityError> {
    if !(margin > 0.0) {
        return Err(VariabilityError::ZeroMargin(margin));
    }
    Ok(((x - expected) / margin).abs())
}

pub(crate) fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Median of the absolute deviations from the median.
pub fn median_absolute_deviation(values: &[f64]) -> f64 {
    let center = median(values);
    let spread: Vec<f64> = values.iter().map(|v| (v - center).abs()).collect();
    median(&spread)
}

impl VariabilityConfig {
    pub fn estimate(
        &self,
        series: &ObservationSeries,
        estimator: CenterMarginEstimator,
    ) -> Result<CenterMargin, VariabilityError> {
        series.check()?;
        let values = &series.values;
        let (expected, raw_margin) = match estimator {
            CenterMarginEstimator::Fixed { expected, margin } => {
                if !(margin > 0.0) {
                    return Err(VariabilityError::ZeroMargin(margin));
                }
                return Ok(CenterMargin {
                    expected,
                    margin,
                    raw_margin: margin,
                });
            }
            CenterMarginEstimator::MedianMad => (median(values), median_absolute_deviation(values)),
            CenterMarginEstimator::MeanStd => {
                let n = values.len() as f64;
                let mean = values.iter().sum::<f64>() / n;
                let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
                (mean, var.sqrt())
            }
        };
        let margin = if raw_margin > 0.0 {
            raw_margin
        } else {
            match self.zero_margin_fallback {
                Some(m) if m > 0.0 => m,
                _ => return Err(VariabilityError::DegenerateSeries(series.function.clone())),
            }
        };
        Ok(CenterMargin {
            expected,
            margin,
            raw_margin,
        })
    }

    pub fn profile(
        &self,
        series: &ObservationSeries,
        estimator: CenterMarginEstimator,
    ) -> Result<DeviationProfile, VariabilityError> {
        let cm = self.estimate(series, estimator)?;
        let devs = series
            .values
            .iter()
            .map(|&x| deviation(x, cm.expected, cm.margin))
            .collect::<Result<_, _>>()?;
        Ok(DeviationProfile {
            function: series.function.clone(),
            estimator,
            expected: cm.expected,
            margin: cm.margin,
            devs,
        })
    }

    pub fn fpv(&self, profile: &DeviationProfile) -> f64 {
        profile
            .devs
            .iter()
            .filter(|&&d| self.fpv_threshold.admits(d))
            .sum()
    }

    /// Dampening capacity of `destination` with respect to `origin`.
    pub fn fdc(
        &self,
        origin: &DeviationProfile,
        destination: &DeviationProfile,
    ) -> Result<f64, VariabilityError> {
        if origin.devs.len() != destination.devs.len() {
            return Err(VariabilityError::MisalignedSeries {
                origin: origin.function.clone(),
                origin_len: origin.devs.len(),
                destination: destination.function.clone(),
                destination_len: destination.devs.len(),
            });
        }
        Ok(origin
            .devs
            .iter()
            .zip(&destination.devs)
            .filter(|(o, _)| self.fdc_threshold.admits(**o))
            .map(|(o, d)| o - d)
            .sum())
    }

    pub fn assess(
        &self,
        origin: &DeviationProfile,
        destination: &DeviationProfile,
    ) -> Result<PairVariability, VariabilityError> {
        let fpv = self.fpv(origin);
        let fdc = self.fdc(origin, destination)?;
        if fpv <= 0.0 {
            return Err(VariabilityError::ZeroUpstreamVariability(origin.function.clone()));
        }
        Ok(PairVariability {
            origin: origin.function.clone(),
            destination: destination.function.clone(),
            fpv,
            fdc,
            vr_percent: 100.0 * fdc / fpv,
        })
    }

    pub fn vr(
        &self,
        origin: &DeviationProfile,
        destination: &DeviationProfile,
    ) -> Result<f64, VariabilityError> {
        self.assess(origin, destination).map(|p| p.vr_percent)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairVariability {
    pub origin: String,
    pub destination: String,
    pub fpv: f64,
    pub fdc: f64,
    pub vr_percent: f64,
}

pub fn estimate_center_margin(
    series: &ObservationSeries,
    estimator: CenterMarginEstimator,
) -> Result<CenterMargin, VariabilityError> {
    VariabilityConfig::default().estimate(series, estimator)
}

pub fn deviation_profile(
    series: &ObservationSeries,
    estimator: CenterMarginEstimator,
) -> Result<DeviationProfile, VariabilityError> {
    VariabilityConfig::default().profile(series, estimator)
}

pub fn fpv(profile: &DeviationProfile) -> f64 {
    VariabilityConfig::default().fpv(profile)
}

pub fn fdc(origin: &DeviationProfile, destination: &DeviationProfile) -> Result<f64, VariabilityError> {
    VariabilityConfig::default().fdc(origin, destination)
}

pub fn vr(origin: &DeviationProfile, destination: &DeviationProfile) -> Result<f64, VariabilityError> {
    VariabilityConfig::default().vr(origin, destination)
}
