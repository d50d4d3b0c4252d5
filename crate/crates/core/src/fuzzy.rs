//! Fuzzy-majority aggregation of expert valuations (MajOp).
//!
//! A subset `X` of a bag `E` counts as a majority to the degree
//! `Maj(X) = min(M(|X| / |E|), S(X))`, where `S(X)` is the smallest pairwise
//! similarity inside `X`. Every subset with `Maj(X) > 0` contributes the mean
//! of its elements `Op(X)`, weighted by `Maj(X) / sum(Maj)`; the weighted sum
//! is the representative value `MajOp(E)`.
//!
//! Bags are multisets: equal valuations given by different experts are
//! distinct elements, so `{4, 4, 5, 6}` holds two different `{4, 5, 6}`
//! subsets.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest bag accepted by [`majop`]; enumeration is exponential in bag size.
pub const MAX_BAG_SIZE: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FuzzyError {
    #[error("valuation bag is empty")]
    EmptyBag,
    #[error("valuation {value} at position {index} lies outside the scale [{lo}, {hi}]")]
    OutOfScale {
        index: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("invalid scale [{lo}, {hi}]")]
    InvalidScale { lo: f64, hi: f64 },
    #[error("bag of {0} valuations exceeds the enumeration limit of {MAX_BAG_SIZE}")]
    BagTooLarge(usize),
    #[error("no subset of the bag qualifies as a majority")]
    NoMajority,
    #[error("invalid similarity function: {0}")]
    InvalidSimilarity(String),
    #[error("invalid majority function: {0}")]
    InvalidMajority(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scale {
    pub lo: f64,
    pub hi: f64,
}

impl Scale {
    pub fn new(lo: f64, hi: f64) -> Result<Self, FuzzyError> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(FuzzyError::InvalidScale { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }
}

impl Default for Scale {
    fn default() -> Self {
        Self { lo: 0.0, hi: 10.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValuationBag {
    values: Vec<f64>,
    scale: Scale,
}

impl ValuationBag {
    pub fn new(values: Vec<f64>, scale: Scale) -> Result<Self, FuzzyError> {
        if values.is_empty() {
            return Err(FuzzyError::EmptyBag);
        }
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && scale.contains(**v)))
        {
            return Err(FuzzyError::OutOfScale {
                index,
                value,
                lo: scale.lo,
                hi: scale.hi,
            });
        }
        Ok(Self { values, scale })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// Piecewise-linear similarity over the scaled difference `delta / epsilon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimilarityFunction {
    /// Control points `(scaled difference, membership)`, starting at `(0, 1)`.
    pub points: Vec<[f64; 2]>,
    /// Scaled differences above this bound have zero similarity.
    pub gamma: f64,
    /// Point of realisation dividing the raw difference.
    #[serde(default = "one")]
    pub epsilon: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for SimilarityFunction {
    fn default() -> Self {
        Self {
            points: vec![[0.0, 1.0], [1.0, 0.99], [2.0, 0.66], [3.0, 0.0]],
            gamma: 3.0,
            epsilon: 1.0,
        }
    }
}

impl SimilarityFunction {
    pub fn new(points: Vec<[f64; 2]>, gamma: f64, epsilon: f64) -> Result<Self, FuzzyError> {
        let f = Self {
            points,
            gamma,
            epsilon,
        };
        f.check()?;
        Ok(f)
    }

    pub fn check(&self) -> Result<(), FuzzyError> {
        let bad = |m: &str| Err(FuzzyError::InvalidSimilarity(m.to_string()));
        match self.points.first() {
            Some([x, y]) if *x == 0.0 && *y == 1.0 => {}
            _ => return bad("first control point must be (0, 1)"),
        }
        if self
            .points
            .iter()
            .any(|[x, y]| !x.is_finite() || !(0.0..=1.0).contains(y))
        {
            return bad("memberships must lie in [0, 1]");
        }
        if self
            .points
            .windows(2)
            .any(|w| !(w[1][0] > w[0][0] && w[1][1] <= w[0][1]))
        {
            return bad("control points must have increasing differences and non-increasing memberships");
        }
        if !(self.gamma > 0.0) {
            return bad("gamma must be positive");
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad("epsilon must be positive");
        }
        Ok(())
    }

    pub fn membership(&self, delta: f64) -> f64 {
        let x = delta.abs() / self.epsilon;
        if x > self.gamma {
            return 0.0;
        }
        let last = self.points[self.points.len() - 1];
        if x >= last[0] {
            return last[1];
        }
        for w in self.points.windows(2) {
            let ([x0, y0], [x1, y1]) = (w[0], w[1]);
            if x <= x1 {
                if x == x1 {
                    return y1;
                }
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
            }
        }
        last[1]
    }
}

/// Trapezoidal majority membership over the cardinality fraction `|X| / |E|`:
/// zero up to and including `zeta`, linear up to `knee`, one beyond.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MajorityFunction {
    pub zeta: f64,
    pub knee: f64,
}

impl Default for MajorityFunction {
    fn default() -> Self {
        Self {
            zeta: 0.4,
            knee: 0.7,
        }
    }
}

impl MajorityFunction {
    pub fn new(zeta: f64, knee: f64) -> Result<Self, FuzzyError> {
        let f = Self { zeta, knee };
        f.check()?;
        Ok(f)
    }

    pub fn check(&self) -> Result<(), FuzzyError> {
        if !(0.0 <= self.zeta && self.zeta < self.knee && self.knee <= 1.0) {
            return Err(FuzzyError::InvalidMajority(format!(
                "need 0 <= zeta < knee <= 1, got zeta={} knee={}",
                self.zeta, self.knee
            )));
        }
        Ok(())
    }

    pub fn membership(&self, fraction: f64) -> f64 {
        if fraction <= self.zeta {
            0.0
        } else if fraction >= self.knee {
            1.0
        } else {
            (fraction - self.zeta) / (self.knee - self.zeta)
        }
    }

    /// Smallest subset size of an `n`-bag with nonzero membership.
    pub fn min_cardinality(&self, n: usize) -> usize {
        (1..=n)
            .find(|&k| self.membership(k as f64 / n as f64) > 0.0)
            .unwrap_or(n + 1)
    }
}

/// One qualifying subset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetScore {
    /// Bit `i` set when bag element `i` belongs to the subset.
    pub mask: u32,
    pub values: Vec<f64>,
    pub similarity: f64,
    pub majority: f64,
    pub maj: f64,
    pub op: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MajOpBreakdown {
    pub bag: Vec<f64>,
    /// Qualifying subsets in ascending mask order.
    pub subsets: Vec<SubsetScore>,
    pub majop: f64,
}

impl MajOpBreakdown {
    pub fn weight_sum(&self) -> f64 {
        self.subsets.iter().map(|s| s.weight).sum()
    }
}

pub fn similarity_membership(delta: f64, f: &SimilarityFunction) -> f64 {
    f.membership(delta)
}

pub fn majority_membership(fraction: f64, f: &MajorityFunction) -> f64 {
    f.membership(fraction)
}

/// Smallest pairwise similarity within `values`; 1 for fewer than two values.
pub fn subset_similarity(values: &[f64], sim: &SimilarityFunction) -> f64 {
    let mut s = 1.0_f64;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            s = s.min(sim.membership(a - b));
        }
    }
    s
}

/// `Maj(X) = min(M(|X| / |E|), S(X))`.
pub fn subset_majority_degree(
    subset: &[f64],
    bag_size: usize,
    sim: &SimilarityFunction,
    maj: &MajorityFunction,
) -> f64 {
    let m = maj.membership(subset.len() as f64 / bag_size as f64);
    m.min(subset_similarity(subset, sim))
}

/// Computes MajOp with its full per-subset breakdown.
///
/// Only subsets large enough to be a majority and free of dissimilar pairs
/// are visited; subsets are generated as cliques of the pairwise
/// compatibility graph. Sums are accumulated in ascending mask order, which
/// makes the result identical to a plain scan of the power set.
pub fn majop(
    bag: &ValuationBag,
    sim: &SimilarityFunction,
    maj: &MajorityFunction,
) -> Result<MajOpBreakdown, FuzzyError> {
    let values = bag.values();
    let n = values.len();
    if n > MAX_BAG_SIZE {
        return Err(FuzzyError::BagTooLarge(n));
    }
    let min_size = maj.min_cardinality(n);

    let mut compatible = vec![0u32; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && sim.membership(values[i] - values[j]) > 0.0 {
                compatible[i] |= 1 << j;
            }
        }
    }

    let mut masks = Vec::new();
    // (mask, candidates allowed to extend it, next index)
    let full = if n == 0 { 0 } else { u32::MAX >> (32 - n) };
    let mut stack: Vec<(u32, u32, usize)> = vec![(0, full, 0)];
    while let Some((mask, allowed, start)) = stack.pop() {
        let size = mask.count_ones() as usize;
        if size >= min_size {
            masks.push(mask);
        }
        for i in start..n {
            if allowed & (1 << i) == 0 {
                continue;
            }
            let remaining = (allowed & !((1u32 << i) - 1)).count_ones() as usize;
            if size + remaining < min_size {
                break;
            }
            stack.push((mask | 1 << i, allowed & compatible[i], i + 1));
        }
    }
    masks.sort_unstable();

    let mut subsets: Vec<SubsetScore> = masks
        .into_iter()
        .filter_map(|mask| {
            let members: Vec<f64> = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| values[i])
                .collect();
            let similarity = subset_similarity(&members, sim);
            let majority = maj.membership(members.len() as f64 / n as f64);
            let degree = majority.min(similarity);
            (degree > 0.0).then(|| SubsetScore {
                mask,
                op: members.iter().sum::<f64>() / members.len() as f64,
                values: members,
                similarity,
                majority,
                maj: degree,
                weight: 0.0,
            })
        })
        .collect();

    if subsets.is_empty() {
        return Err(FuzzyError::NoMajority);
    }
    let total: f64 = subsets.iter().map(|s| s.maj).sum();
    let mut majop = 0.0;
    for s in &mut subsets {
        s.weight = s.maj / total;
        majop += s.weight * s.op;
    }
    Ok(MajOpBreakdown {
        bag: values.to_vec(),
        subsets,
        majop,
    })
}

/// What to report when no subset qualifies as a majority.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NoMajorityFallback {
    #[default]
    Error,
    /// Use the plain arithmetic mean of the bag.
    Mean,
}

impl std::str::FromStr for NoMajorityFallback {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "error" => Ok(Self::Error),
            "mean" => Ok(Self::Mean),
            other => Err(format!("unknown fallback `{other}` (expected mean|error)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub value: f64,
    /// `None` when the fallback produced the value.
    pub breakdown: Option<MajOpBreakdown>,
    pub fell_back: bool,
}

pub fn aggregate(
    bag: &ValuationBag,
    sim: &SimilarityFunction,
    maj: &MajorityFunction,
    fallback: NoMajorityFallback,
) -> Result<Aggregate, FuzzyError> {
    match (majop(bag, sim, maj), fallback) {
        (Ok(b), _) => Ok(Aggregate {
            value: b.majop,
            breakdown: Some(b),
            fell_back: false,
        }),
        (Err(FuzzyError::NoMajority), NoMajorityFallback::Mean) => Ok(Aggregate {
            value: bag.mean(),
            breakdown: None,
            fell_back: true,
        }),
        (Err(e), _) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bag(v: &[f64]) -> ValuationBag {
        ValuationBag::new(v.to_vec(), Scale::default()).unwrap()
    }

    #[test]
    fn similarity_examples() {
        let s = SimilarityFunction::default();
        assert_eq!(s.membership(0.0), 1.0);
        assert_eq!(s.membership(1.0), 0.99);
        assert_eq!(s.membership(2.0), 0.66);
        assert_eq!(s.membership(3.0), 0.0);
        assert_eq!(s.membership(7.0), 0.0);
        assert_eq!(s.membership(-1.0), 0.99);
        assert!((s.membership(0.5) - 0.995).abs() < 1e-12);
    }

    #[test]
    fn epsilon_scales_the_difference() {
        let s = SimilarityFunction::new(SimilarityFunction::default().points, 3.0, 2.0).unwrap();
        assert_eq!(s.membership(2.0), 0.99);
        assert_eq!(s.membership(6.0), 0.0);
    }

    #[test]
    fn gamma_cuts_before_the_last_point() {
        let s = SimilarityFunction::new(vec![[0.0, 1.0], [4.0, 0.2]], 2.5, 1.0).unwrap();
        assert!(s.membership(2.5) > 0.0);
        assert_eq!(s.membership(2.6), 0.0);
        assert_eq!(s.membership(4.0), 0.0);
    }

    #[test]
    fn invalid_shapes_rejected() {
        assert!(SimilarityFunction::new(vec![[0.0, 0.9]], 1.0, 1.0).is_err());
        assert!(SimilarityFunction::new(vec![[0.0, 1.0], [1.0, 1.2]], 1.0, 1.0).is_err());
        assert!(SimilarityFunction::new(vec![[0.0, 1.0], [1.0, 0.5], [0.5, 0.2]], 1.0, 1.0).is_err());
        assert!(SimilarityFunction::new(vec![[0.0, 1.0]], 1.0, 0.0).is_err());
        assert!(MajorityFunction::new(0.7, 0.4).is_err());
        assert!(MajorityFunction::new(-0.1, 0.4).is_err());
    }

    #[test]
    fn majority_examples() {
        let m = MajorityFunction::default();
        assert_eq!(m.membership(2.0 / 5.0), 0.0);
        assert!((m.membership(3.0 / 5.0) - 0.66).abs() < 0.01);
        assert_eq!(m.membership(4.0 / 5.0), 1.0);
        assert_eq!(m.min_cardinality(5), 3);
        assert_eq!(m.min_cardinality(8), 4);
    }

    #[test]
    fn subset_degree_examples() {
        let (s, m) = (SimilarityFunction::default(), MajorityFunction::default());
        let d = subset_majority_degree(&[4.0, 4.0, 5.0], 5, &s, &m);
        assert!((d - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(subset_majority_degree(&[4.0], 5, &s, &m), 0.0);
        assert_eq!(subset_majority_degree(&[1.0, 4.0, 4.0], 5, &s, &m), 0.0);
    }

    #[test]
    fn table_example_breakdown() {
        let b = majop(
            &bag(&[1., 4., 4., 5., 6.]),
            &SimilarityFunction::default(),
            &MajorityFunction::default(),
        )
        .unwrap();
        let sets: Vec<Vec<f64>> = b.subsets.iter().map(|s| s.values.clone()).collect();
        assert_eq!(
            sets,
            vec![
                vec![4., 4., 5.],
                vec![4., 4., 6.],
                vec![4., 5., 6.],
                vec![4., 5., 6.],
                vec![4., 4., 5., 6.]
            ]
        );
        assert!((b.majop - 4.75).abs() < 0.005);
        assert!((b.weight_sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_bag_returns_the_constant() {
        let b = majop(
            &bag(&[7.0; 5]),
            &SimilarityFunction::default(),
            &MajorityFunction::default(),
        )
        .unwrap();
        assert!((b.majop - 7.0).abs() < 1e-12);
    }

    #[test]
    fn singleton_bag_is_its_own_majority() {
        let b = majop(
            &bag(&[3.0]),
            &SimilarityFunction::default(),
            &MajorityFunction::default(),
        )
        .unwrap();
        assert_eq!(b.majop, 3.0);
        assert_eq!(b.subsets.len(), 1);
    }

    #[test]
    fn scattered_bag_has_no_majority() {
        let scattered = bag(&[0.0, 5.0, 10.0]);
        let (s, m) = (SimilarityFunction::default(), MajorityFunction::default());
        assert_eq!(majop(&scattered, &s, &m), Err(FuzzyError::NoMajority));
        assert_eq!(
            aggregate(&scattered, &s, &m, NoMajorityFallback::Error),
            Err(FuzzyError::NoMajority)
        );
        let agg = aggregate(&scattered, &s, &m, NoMajorityFallback::Mean).unwrap();
        assert!(agg.fell_back);
        assert_eq!(agg.value, 5.0);
    }

    #[test]
    fn bag_validation() {
        assert_eq!(
            ValuationBag::new(vec![], Scale::default()),
            Err(FuzzyError::EmptyBag)
        );
        assert!(matches!(
            ValuationBag::new(vec![1.0, 11.0], Scale::default()),
            Err(FuzzyError::OutOfScale { index: 1, .. })
        ));
        assert!(Scale::new(5.0, 1.0).is_err());
    }

    #[test]
    fn oversized_bag_rejected() {
        let big = ValuationBag::new(vec![5.0; MAX_BAG_SIZE + 1], Scale::default()).unwrap();
        assert_eq!(
            majop(&big, &SimilarityFunction::default(), &MajorityFunction::default()),
            Err(FuzzyError::BagTooLarge(MAX_BAG_SIZE + 1))
        );
    }
}
