mod common;

use fram_resonance::fuzzy::{MajorityFunction, Scale, SimilarityFunction, ValuationBag};
use fram_resonance::graph::{degree_prestige, encode_bipartite, NodeClass};
use fram_resonance::io::{emit_model, model_from_str};
use fram_resonance::model::FramModel;
use fram_resonance::scenario::{assess_relationship, Aggregation};
use fram_resonance::variability::{
    deviation, fpv, CenterMarginEstimator, DeviationProfile, Threshold, VariabilityConfig,
};
use proptest::prelude::*;

fn profile(devs: Vec<f64>) -> DeviationProfile {
    DeviationProfile {
        function: "X".into(),
        estimator: CenterMarginEstimator::MedianMad,
        expected: 0.0,
        margin: 1.0,
        devs,
    }
}

proptest! {
    #[test]
    fn insertion_order_does_not_change_the_model((n, edges) in common::model_parts()) {
        let forward = common::build_model(n, &edges, 1.0);
        let mut reversed = FramModel::new();
        for f in forward.functions().iter().rev() {
            reversed.add_function(f.id.clone(), f.label.clone()).unwrap();
        }
        for r in forward.relationships().iter().rev() {
            reversed.add_relationship(r.clone()).unwrap();
        }
        prop_assert_eq!(&forward, &reversed);
        prop_assert_eq!(emit_model(&forward), emit_model(&reversed));
    }

    #[test]
    fn emitted_model_parses_back_unchanged((n, edges) in common::model_parts()) {
        let model = common::build_model(n, &edges, 1.0);
        let text = emit_model(&model);
        let back = model_from_str(&text, "generated").unwrap();
        prop_assert_eq!(back, model);
    }

    #[test]
    fn bipartite_encoding_only_links_functions_to_relationships(
        (n, edges) in common::model_parts()
    ) {
        let model = common::build_model(n, &edges, 1.0);
        let m = encode_bipartite(&model).unwrap();
        for (row, col, w) in m.edges() {
            prop_assert!(w > 0.0);
            prop_assert_ne!(m.class_of(row), m.class_of(col));
        }
        // each relationship node carries its weight in and out exactly once
        for r in model.relationships() {
            let k = m.index_of(&r.id).unwrap();
            let o = m.index_of(&r.origin).unwrap();
            let d = m.index_of(&r.destination).unwrap();
            prop_assert_eq!(m.get(o, k), r.weight);
            prop_assert_eq!(m.get(k, d), r.weight);
            prop_assert_eq!(m.in_weight(k), r.weight);
        }
    }

    #[test]
    fn function_prestige_is_the_sum_of_inbound_weights((n, edges) in common::model_parts()) {
        let model = common::build_model(n, &edges, 1.0);
        let table = degree_prestige(&model).unwrap();
        for f in model.functions() {
            let inbound: f64 = model
                .relationships()
                .iter()
                .filter(|r| r.destination == f.id)
                .map(|r| r.weight)
                .sum();
            let entry = table.get(&f.id).unwrap();
            prop_assert_eq!(entry.class, NodeClass::Function);
            prop_assert!((entry.raw - inbound).abs() <= 1e-9);
        }
    }

    #[test]
    fn fpv_grows_with_every_deviation(
        devs in prop::collection::vec(0.0f64..10.0, 1..20),
        bumps in prop::collection::vec(0.0f64..5.0, 20),
    ) {
        let raised: Vec<f64> = devs.iter().zip(&bumps).map(|(d, b)| d + b).collect();
        prop_assert!(fpv(&profile(raised)) >= fpv(&profile(devs)));
    }

    #[test]
    fn strict_fpv_never_exceeds_inclusive(devs in prop::collection::vec(0.0f64..4.0, 1..20)) {
        let strict = VariabilityConfig { fpv_threshold: Threshold::Strict(1.0), ..Default::default() };
        let p = profile(devs);
        prop_assert!(strict.fpv(&p) <= VariabilityConfig::default().fpv(&p));
    }

    #[test]
    fn deviation_is_invariant_under_joint_scaling(
        x in -100.0f64..100.0,
        e in -100.0f64..100.0,
        m in 0.1f64..50.0,
        c in 0.1f64..10.0,
    ) {
        let base = deviation(x, e, m).unwrap();
        let scaled = deviation(c * x, c * e, c * m).unwrap();
        prop_assert!((base - scaled).abs() <= 1e-9 * (1.0 + base));
        prop_assert!(base >= 0.0);
    }

    #[test]
    fn dominated_bags_rank_below(
        standard in prop::collection::vec(0u32..=7, 1..=8),
        lift in prop::collection::vec(0u32..=3, 8),
    ) {
        // every CC value is at least every standard value plus three
        let top = *standard.iter().max().unwrap();
        let cc: Vec<f64> = standard
            .iter()
            .zip(&lift)
            .map(|(_, l)| (top + 3 + l).min(10) as f64)
            .collect();
        let standard: Vec<f64> = standard.iter().map(|&v| v as f64).collect();
        let scale = Scale::default();
        let a = assess_relationship(
            "R1",
            &ValuationBag::new(standard, scale).unwrap(),
            &ValuationBag::new(cc, scale).unwrap(),
            &Aggregation {
                fallback: fram_resonance::fuzzy::NoMajorityFallback::Mean,
                ..Aggregation::default()
            },
        )
        .unwrap();
        prop_assert!(a.vr_cc > a.vr_standard, "{} vs {}", a.vr_cc, a.vr_standard);
    }

    #[test]
    fn majop_ignores_value_order(mut v in prop::collection::vec(0u32..=10, 1..=9), seed in any::<u64>()) {
        let sim = SimilarityFunction::default();
        let maj = MajorityFunction::default();
        let values: Vec<f64> = v.iter().map(|&x| x as f64).collect();
        let a = fram_resonance::fuzzy::majop(&ValuationBag::new(values, Scale::default()).unwrap(), &sim, &maj);
        let len = v.len();
        v.rotate_left((seed as usize) % len);
        let rotated: Vec<f64> = v.iter().map(|&x| x as f64).collect();
        let b = fram_resonance::fuzzy::majop(&ValuationBag::new(rotated, Scale::default()).unwrap(), &sim, &maj);
        match (a, b) {
            (Ok(a), Ok(b)) => prop_assert!((a.majop - b.majop).abs() <= 1e-9),
            (Err(a), Err(b)) => prop_assert_eq!(a, b),
            (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
        }
    }
}
