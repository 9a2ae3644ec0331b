mod common;

use std::sync::Arc;

use proptest::prelude::*;

use simsmooth::basemodel::{BaseModel, KatzModel, MleModel};
use simsmooth::corpus::{make_folds, NounId, Pair, PairCorpus, VerbId, Vocabulary};
use simsmooth::evaluation::{error_rate, evaluate_split, Decision, ExperimentConfig, Method, Trial, TrialOutcome};
use simsmooth::similarity::{
    l1_distance, l1_distance_counted, total_divergence_to_average, total_divergence_to_average_counted, Measure,
    SimilarityContext, SparseDistribution, WeightConfig,
};

use common::{generate, BlockSpec};

fn distribution(weights: Vec<(u32, f64)>) -> SparseDistribution<f64> {
    let mut w = weights;
    w.sort_by_key(|&(v, _)| v);
    w.dedup_by_key(|&mut (v, _)| v);
    let total: f64 = w.iter().map(|&(_, x)| x).sum();
    SparseDistribution::new(w.into_iter().map(|(v, x)| (VerbId(v), x / total)).collect()).unwrap()
}

fn sparse() -> impl Strategy<Value = SparseDistribution<f64>> {
    prop::collection::vec((0u32..100, 0.001f64..1.0), 1..50).prop_map(distribution)
}

fn corpus_from(cells: &[(u32, u32, u64)], nouns: u32, verbs: u32) -> PairCorpus {
    let nv = Vocabulary::from_words((0..nouns).map(|i| format!("n{i}"))).unwrap();
    let vv = Vocabulary::from_words((0..verbs).map(|i| format!("v{i}"))).unwrap();
    PairCorpus::from_counts(
        nv,
        vv,
        cells.iter().map(|&(n, v, c)| (Pair::new(NounId(n), VerbId(v)), c)),
    )
}

proptest! {
    #[test]
    fn avg_and_l1_stay_in_range(p in sparse(), q in sparse()) {
        let a = total_divergence_to_average(&p, &q);
        let l = l1_distance(&p, &q);
        prop_assert!((-1e-12..=2.0 * std::f64::consts::LN_2 + 1e-12).contains(&a));
        prop_assert!((-1e-12..=2.0 + 1e-12).contains(&l));
        // L1 bounds the divergence to the average from above (Pinsker-type)
        prop_assert!(a <= l * std::f64::consts::LN_2 + 1e-12);
    }

    #[test]
    fn sparse_measures_visit_each_entry_once(p in sparse(), q in sparse()) {
        let common = p.entries().iter().filter(|&&(v, _)| q.get(v) > 0.0).count();
        let expected = p.len() + q.len() - common;
        prop_assert_eq!(total_divergence_to_average_counted(&p, &q).1, expected);
        prop_assert_eq!(l1_distance_counted(&p, &q).1, expected);
    }

    #[test]
    fn mle_rows_sum_to_one(cells in prop::collection::vec((0u32..6, 0u32..8, 1u64..5), 1..40)) {
        let corpus = Arc::new(corpus_from(&cells, 6, 8));
        let mle = MleModel::<f64>::new(corpus.clone());
        for n in corpus.noun_ids().filter(|&n| corpus.noun_total(n) > 0) {
            let sum: f64 = mle.row(n).unwrap().iter().map(|&(_, p)| p).sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn error_rate_ignores_order(decisions in prop::collection::vec(0u8..3, 2..200), seed in any::<u64>()) {
        let outcomes: Vec<TrialOutcome<f64>> = decisions
            .iter()
            .enumerate()
            .map(|(i, &d)| TrialOutcome {
                trial: Trial { noun: NounId(i as u32), correct: VerbId(0), decoy: VerbId(1) },
                decision: [Decision::Correct, Decision::Incorrect, Decision::Tie][d as usize],
                scores: (0.0, 0.0),
            })
            .collect();
        let shuffled = make_folds(&outcomes, 2, seed).unwrap().concat();
        prop_assert_eq!(error_rate(&outcomes).unwrap(), error_rate(&shuffled).unwrap());
    }

    #[test]
    fn folds_partition_the_items(n in 5usize..300, k in 2usize..6, seed in any::<u64>()) {
        prop_assume!(n >= k);
        let items: Vec<usize> = (0..n).collect();
        let folds = make_folds(&items, k, seed).unwrap();
        prop_assert_eq!(folds.len(), k);
        let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        let mut all = folds.concat();
        all.sort_unstable();
        prop_assert_eq!(all, items);
    }
}

#[test]
fn katz_rows_are_normalized() {
    for seed in 0..5 {
        let data = generate(&BlockSpec::long_tail(20_000), seed);
        let corpus = Arc::new(data.train);
        let katz = KatzModel::<f64>::build(corpus.clone(), 5).unwrap();
        for n in corpus.noun_ids().filter(|&n| corpus.noun_total(n) > 0) {
            let sum: f64 = corpus.verb_ids().map(|v| katz.prob(n, v).unwrap()).sum();
            assert!((sum - 1.0).abs() < 1e-9, "seed {seed} {n:?}: {sum}");
        }
    }
}

#[test]
fn avg_and_l1_weight_self_highest() {
    let data = generate(&BlockSpec::standard(), 1);
    let corpus = Arc::new(data.train);
    let base: Arc<dyn BaseModel<f64>> = Arc::new(MleModel::new(corpus.clone()));
    let ctx = SimilarityContext::new(corpus.clone(), base, None, 0);
    for measure in [Measure::Avg, Measure::L1] {
        for &n in ctx.candidates() {
            let profile = ctx.profile(n, &WeightConfig::new(measure, 2.0)).unwrap();
            let own = profile.neighbors.iter().find(|nb| nb.noun == n).unwrap().weight;
            assert!(profile.neighbors.iter().all(|nb| nb.weight <= own), "{measure} {n:?}");
            assert_eq!(profile.neighbors[0].noun, n);
        }
    }
}

#[test]
fn kl_self_weight_is_maximal_in_practice() {
    // not guaranteed in general, since the candidate side is smoothed
    let data = generate(&BlockSpec::long_tail(20_000), 2);
    let corpus = Arc::new(data.train);
    let katz = Arc::new(KatzModel::<f64>::build(corpus.clone(), 5).unwrap());
    let base: Arc<dyn BaseModel<f64>> = Arc::new(MleModel::new(corpus.clone()));
    let ctx = SimilarityContext::new(corpus.clone(), base, Some(katz), 0);
    let mut self_first = 0;
    for &n in ctx.candidates() {
        let profile = ctx.profile(n, &WeightConfig::new(Measure::Kl, 1.0)).unwrap();
        self_first += usize::from(profile.neighbors[0].noun == n);
    }
    assert!(
        self_first * 10 >= ctx.candidates().len() * 9,
        "{self_first} of {}",
        ctx.candidates().len()
    );
}

#[test]
fn tuning_never_sees_the_test_fold() {
    let data = generate(&BlockSpec::standard(), 4);
    let cfg = ExperimentConfig {
        models: vec![simsmooth::evaluation::BaseModelId::Mle1],
        methods: vec![Method::Avg, Method::L1],
        beta_grid: vec![1.0, 5.0, 10.0],
        ..ExperimentConfig::default()
    };
    let report = evaluate_split(data.train, &data.test, &cfg, Some(2)).unwrap();
    for f in &report.folds {
        assert!(!f.tuned_on.contains(&f.fold));
        assert_eq!(f.tuned_on.len(), cfg.folds - 1);
        assert!(cfg.beta_grid.contains(&f.beta.unwrap()));
    }
}
