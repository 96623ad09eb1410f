use proptest::prelude::*;
use xel_core::dataset::{EntityType, MentionRecord};
use xel_core::eval::{
    gold_candidate_recall, linking_accuracy, per_type_accuracy, recall_at_k, EvalReport, LinkResult, Tally,
};

fn result() -> impl Strategy<Value = LinkResult> {
    (
        prop::sample::select(EntityType::ALL.to_vec()),
        prop::option::weighted(0.9, 0u8..8),
        prop::collection::btree_set(0u8..8, 0..6),
        any::<prop::sample::Index>(),
        any::<bool>(),
    )
        .prop_map(|(ty, gold, cands, pick, nil)| {
            let candidates: Vec<String> = cands.into_iter().map(|c| format!("E{c}")).collect();
            let selected = if nil || candidates.is_empty() {
                None
            } else {
                Some(candidates[pick.index(candidates.len())].clone())
            };
            LinkResult {
                mention: MentionRecord {
                    doc_id: "d".into(),
                    surface: "m".into(),
                    sentence: "m".into(),
                    entity_type: ty,
                    gold: gold.map(|g| format!("E{g}")),
                },
                candidates,
                selected,
            }
        })
}

fn linkable_results() -> impl Strategy<Value = Vec<LinkResult>> {
    prop::collection::vec(result(), 1..60).prop_filter("needs a linkable mention", |rs| {
        rs.iter().any(|r| r.mention.gold.is_some())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn accuracy_never_exceeds_recall(rs in linkable_results()) {
        prop_assert!(linking_accuracy(&rs).unwrap() <= gold_candidate_recall(&rs).unwrap());
    }

    #[test]
    fn recall_grows_with_k_up_to_full_recall(rs in linkable_results()) {
        let longest = rs.iter().map(|r| r.candidates.len()).max().unwrap_or(0).max(1);
        let mut prev = 0.0;
        for k in 1..=longest + 2 {
            let r = recall_at_k(&rs, k).unwrap();
            prop_assert!(r >= prev);
            prev = r;
        }
        prop_assert_eq!(recall_at_k(&rs, longest).unwrap(), gold_candidate_recall(&rs).unwrap());
    }

    #[test]
    fn report_fractions_and_type_weights(rs in linkable_results()) {
        let report = EvalReport::compute(&rs, &[1, 5], None).unwrap();
        let fractions = [report.gold_candidate_recall, report.linking_accuracy]
            .into_iter()
            .chain(report.recall_at.values().copied())
            .chain(report.per_type_accuracy.values().copied());
        for f in fractions {
            prop_assert!((0.0..=1.0).contains(&f));
        }
        let weighted: f64 = per_type_accuracy(&rs)
            .iter()
            .map(|(ty, acc)| acc * report.per_type_count[ty] as f64)
            .sum::<f64>()
            / report.n_linkable as f64;
        prop_assert!((weighted - report.linking_accuracy).abs() <= 1e-9);
    }

    #[test]
    fn split_tallies_merge_to_the_whole(rs in linkable_results(), cut in any::<prop::sample::Index>()) {
        let at = cut.index(rs.len() + 1);
        let (a, b) = rs.split_at(at);
        prop_assert_eq!(Tally::of(a).merge(Tally::of(b)), Tally::of(&rs));
    }
}
