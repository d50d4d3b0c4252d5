#![allow(dead_code)]

use fram_resonance::fuzzy::{MajorityFunction, SimilarityFunction, ValuationBag};
use fram_resonance::model::{Aspect, FramModel, Relationship};
use proptest::prelude::*;

pub type Edge = (usize, usize, usize, usize, u32);

/// Raw material for a random model: function count and candidate edges
/// `(origin, destination, aspect, qname, weight)`; weights are multiples of 0.25.
pub fn model_parts() -> impl Strategy<Value = (usize, Vec<Edge>)> {
    (1usize..=10).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec((0..n, 0..n, 0usize..5, 0usize..3, 1u32..=40), 0..30),
        )
    })
}

/// Builds a valid model, silently skipping candidates that repeat a quadruple.
pub fn build_model(n: usize, edges: &[Edge], scale: f64) -> FramModel {
    let mut m = FramModel::new();
    for i in 0..n {
        m.add_function(format!("F{}", i + 1), format!("function {}", i + 1))
            .unwrap();
    }
    for (k, &(o, d, a, q, w)) in edges.iter().enumerate() {
        let _ = m.add_relationship(Relationship {
            id: format!("R{}", k + 1),
            origin: format!("F{}", o + 1),
            destination: format!("F{}", d + 1),
            aspect: Aspect::RECEIVING[a],
            qname: format!("q{q}"),
            weight: w as f64 * 0.25 * scale,
        });
    }
    m
}

/// Plain scan of all `2^n` subsets in ascending mask order, computing each
/// quantity directly from its definition. Returns `None` when no subset
/// qualifies.
pub fn naive_majop(
    bag: &ValuationBag,
    sim: &SimilarityFunction,
    maj: &MajorityFunction,
) -> Option<f64> {
    let e = bag.values();
    let n = e.len();
    let mut rows: Vec<(f64, f64)> = Vec::new();
    for mask in 1u32..(1u32 << n) {
        let members: Vec<f64> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| e[i]).collect();
        let mut s = 1.0_f64;
        for i in 0..members.len() {
            for j in (i + 1)..members.len() {
                s = s.min(sim.membership(members[i] - members[j]));
            }
        }
        let m = maj.membership(members.len() as f64 / n as f64);
        let degree = m.min(s);
        if degree > 0.0 {
            let op = members.iter().sum::<f64>() / members.len() as f64;
            rows.push((degree, op));
        }
    }
    if rows.is_empty() {
        return None;
    }
    let total: f64 = rows.iter().map(|r| r.0).sum();
    let mut acc = 0.0;
    for (degree, op) in rows {
        acc += (degree / total) * op;
    }
    Some(acc)
}

/// Absolute z-scores with the population standard deviation, two-pass.
pub fn abs_z_scores(values: &[f64]) -> Vec<f64> {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt();
    values.iter().map(|v| ((v - mean) / sd).abs()).collect()
}
