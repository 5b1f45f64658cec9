mod support;

use irmsep::analysis::{fractional_ranks, pearson, rank_songs, select_subset, spearman, Criterion};
use irmsep::{Metric, MetricScores, ScoreTable};
use proptest::prelude::*;

fn distinct_pairs() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (3usize..30).prop_flat_map(|n| {
        (
            prop::collection::vec(-100.0f64..100.0, n),
            prop::collection::vec(-100.0f64..100.0, n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pearson_symmetric_and_affine_invariant((x, y) in distinct_pairs(), a in 0.1f64..10.0, b in -50.0f64..50.0) {
        prop_assume!(pearson(&x, &y).is_ok());
        let r = pearson(&x, &y).unwrap();
        prop_assert!((r - pearson(&y, &x).unwrap()).abs() < 1e-12);
        let moved: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        prop_assert!((r - pearson(&moved, &y).unwrap()).abs() < 1e-9);
        prop_assert!((r - support::raw_sum_pearson(&x, &y)).abs() < 1e-9);
    }

    #[test]
    fn spearman_monotone_invariant((x, y) in distinct_pairs()) {
        prop_assume!(spearman(&x, &y).is_ok());
        let r = spearman(&x, &y).unwrap();
        prop_assert!((r - spearman(&y, &x).unwrap()).abs() < 1e-12);
        let warped: Vec<f64> = x.iter().map(|v| (v / 40.0).exp() + v.powi(3)).collect();
        prop_assert!((r - spearman(&warped, &y).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn ranks_match_counting_oracle(x in prop::collection::vec(prop::sample::select(vec![-1.0, 0.0, 2.5, 3.0, 7.0]), 1..25)) {
        prop_assert_eq!(fractional_ranks(&x), support::brute_force_ranks(&x));
    }

    #[test]
    fn top_and_bottom_are_disjoint(n in 2usize..60, f in 0.01f64..0.5, seed in any::<u64>()) {
        let mut t = ScoreTable::new();
        let values = irmsep::synth::uniform(n, seed);
        for (i, v) in values.iter().enumerate() {
            t.insert(&format!("s{i:03}"), "x", MetricScores { si_sdr: Some(*v), ..MetricScores::MISSING }).unwrap();
        }
        let ranking = rank_songs(&t, Metric::SiSdr, "x").unwrap();
        let top = select_subset(&ranking, Criterion::Top, f, 0).unwrap().selected;
        let bottom = select_subset(&ranking, Criterion::Bottom, f, 0).unwrap().selected;
        prop_assert!(top.iter().all(|s| !bottom.contains(s)));
        let best = top.iter().map(|s| t.get(s, "x").unwrap().si_sdr.unwrap()).fold(f64::INFINITY, f64::min);
        let worst = bottom.iter().map(|s| t.get(s, "x").unwrap().si_sdr.unwrap()).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(best >= worst);
    }
}

#[test]
fn spearman_with_one_tie_matches_oracle() {
    let x = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0];
    let y = [2.0, 7.0, 1.0, 8.0, 2.5, 8.5, 0.5];
    let oracle = support::raw_sum_pearson(
        &support::brute_force_ranks(&x),
        &support::brute_force_ranks(&y),
    );
    assert!((spearman(&x, &y).unwrap() - oracle).abs() < 1e-12);
}
