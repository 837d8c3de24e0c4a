mod common;

use anonaudit::distance::{emd_equal, emd_ordered, shannon_entropy};
use anonaudit::{
    alpha_k_anonymity, basic_beta_likeness, build_report, delta_disclosure, distribution,
    enhanced_beta_likeness, entropy_l_diversity, global_distribution, infer_kind, k_anonymity,
    l_diversity, parse_delimited, partition_by, recursive_c_l_diversity, t_closeness,
    AttributeSchema, Cell, Dataset, LoadOptions, SaMode,
};
use common::{brute_partition, indices, random_table, RawTable, TableShape};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn table_from_seed(seed: u64) -> (RawTable, Vec<String>, Vec<String>) {
    random_table(&mut ChaCha8Rng::seed_from_u64(seed), TableShape::default())
}

fn sorted_classes(mut classes: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    classes.sort();
    classes
}

fn prob_vector() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0u32..10, 1..7).prop_filter_map("non-zero mass", |w| {
        let total: u32 = w.iter().sum();
        (total > 0).then(|| w.iter().map(|&x| x as f64 / total as f64).collect())
    })
}

fn prob_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..7).prop_flat_map(|m| {
        let v = prop::collection::vec(0u32..10, m).prop_filter_map("mass", |w| {
            let total: u32 = w.iter().sum();
            (total > 0).then(|| {
                w.iter()
                    .map(|&x| x as f64 / total as f64)
                    .collect::<Vec<f64>>()
            })
        });
        (v.clone(), v)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partition_matches_pairwise_oracle(seed in any::<u64>()) {
        let (raw, qi, sa) = table_from_seed(seed);
        let data = raw.dataset();
        let mut cols = qi.clone();
        cols.extend(sa.iter().take(1).cloned());
        let p = partition_by(&data, &cols).unwrap();
        let ours: Vec<Vec<usize>> = p.classes().map(|c| c.rows().to_vec()).collect();
        prop_assert_eq!(sorted_classes(ours.clone()), sorted_classes(brute_partition(&raw, &indices(&raw, &cols))));
        prop_assert_eq!(ours.iter().map(Vec::len).sum::<usize>(), data.row_count());

        // classes come out sorted by key
        let keys: Vec<Vec<Cell>> = p.classes().map(|c| c.key().into_iter().cloned().collect()).collect();
        prop_assert!(keys.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn refining_never_merges_classes(seed in any::<u64>()) {
        let (raw, qi, sa) = table_from_seed(seed);
        let data = raw.dataset();
        let coarse = partition_by(&data, &qi).unwrap();
        let mut finer_cols = qi.clone();
        finer_cols.push(sa[0].clone());
        let fine = partition_by(&data, &finer_cols).unwrap();
        let mut owner = vec![usize::MAX; data.row_count()];
        for (i, class) in coarse.classes().enumerate() {
            for &r in class.rows() {
                owner[r] = i;
            }
        }
        for class in fine.classes() {
            let first = owner[class.rows()[0]];
            prop_assert!(class.rows().iter().all(|&r| owner[r] == first));
        }
    }

    #[test]
    fn row_permutation_keeps_class_keys_and_sizes(seed in any::<u64>()) {
        let (raw, qi, _) = table_from_seed(seed);
        let mut shuffled = raw.clone();
        shuffled.rows.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 0x5eed));
        let a = raw.dataset();
        let b = shuffled.dataset();
        let summary = |d: &Dataset| -> Vec<(Vec<Cell>, usize)> {
            partition_by(d, &qi)
                .unwrap()
                .classes()
                .map(|c| (c.key().into_iter().cloned().collect(), c.len()))
                .collect()
        };
        prop_assert_eq!(summary(&a), summary(&b));
    }

    #[test]
    fn global_distribution_is_mixture_of_classes(seed in any::<u64>()) {
        let (raw, qi, sa) = table_from_seed(seed);
        let data = raw.dataset();
        let global = global_distribution(&data, &sa[0]).unwrap();
        let p = partition_by(&data, &qi).unwrap();
        let n = data.row_count() as f64;
        let mut mixed = vec![0.0; global.support().len()];
        for class in p.classes() {
            let local = distribution(&data, class.rows(), &sa[0]).unwrap();
            let (_, q) = anonaudit::align(&global, &local).unwrap();
            for (m, qi) in mixed.iter_mut().zip(q) {
                *m += qi * class.len() as f64 / n;
            }
        }
        for (a, b) in mixed.iter().zip(global.probs()) {
            prop_assert!((a - b).abs() < 1e-9);
        }
        prop_assert!((global.probs().iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn delimited_round_trip(seed in any::<u64>(), delimiter in prop::sample::select(vec![',', '\t', ';'])) {
        let (raw, _, _) = table_from_seed(seed);
        let data = raw.dataset();
        let options = LoadOptions::default().with_delimiter(delimiter);
        let again = parse_delimited("rt", &data.to_delimited(delimiter), &options).unwrap();
        prop_assert_eq!(data.columns(), again.columns());
    }

    #[test]
    fn loaded_text_preserves_row_order(cells in prop::collection::vec("[a-z ,\"]{0,6}", 1..40)) {
        let header = ["v"];
        let rows: Vec<Vec<String>> = cells.iter().map(|c| vec![c.trim().to_string()]).collect();
        let data = Dataset::from_rows(header, rows.clone(), &LoadOptions::default()).unwrap();
        let reloaded = parse_delimited("o", &data.to_delimited(','), &LoadOptions::default()).unwrap();
        let back: Vec<String> = reloaded.columns()[0].cells().map(|c| c.to_string()).collect();
        let expected: Vec<String> = data.columns()[0].cells().map(|c| c.to_string()).collect();
        prop_assert_eq!(back, expected);
    }

    #[test]
    fn infer_kind_ignores_order(mut cells in prop::collection::vec(prop::sample::select(vec!["1", "2.5", "-3", "x", "?", "1e3"]), 0..12), seed in any::<u64>()) {
        let before = infer_kind(cells.iter().copied(), "?");
        cells.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(before, infer_kind(cells.iter().copied(), "?"));
    }

    #[test]
    fn emd_is_a_symmetric_nonnegative_distance((p, q) in prob_pair()) {
        for f in [emd_equal, emd_ordered] {
            let pq = f(&p, &q).unwrap();
            let qp = f(&q, &p).unwrap();
            prop_assert!((pq - qp).abs() < 1e-12);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&pq));
            prop_assert_eq!(f(&p, &p).unwrap(), 0.0);
            let equal = p.iter().zip(&q).all(|(a, b)| (a - b).abs() < 1e-12);
            prop_assert_eq!(pq < 1e-12, equal);
        }
    }

    #[test]
    fn entropy_is_bounded_by_log_support(weights in prob_vector()) {
        let rows: Vec<[String; 1]> = weights
            .iter()
            .enumerate()
            .flat_map(|(i, w)| std::iter::repeat_n([format!("v{i}")], (w * 60.0).round() as usize))
            .collect();
        prop_assume!(!rows.is_empty());
        let data = Dataset::from_rows(["v"], rows, &LoadOptions::default()).unwrap();
        let d = global_distribution(&data, "v").unwrap();
        let h = shannon_entropy(&d);
        let bound = (d.support().len() as f64).ln();
        prop_assert!(h <= bound + 1e-12);
        let uniform = d.counts().iter().all(|&c| c == d.counts()[0]);
        prop_assert_eq!((h - bound).abs() < 1e-12, uniform);
    }

    #[test]
    fn metric_orderings(seed in any::<u64>()) {
        let (raw, qi, sa) = table_from_seed(seed);
        let data = raw.dataset();
        let sa1 = &sa[..1];
        let gen = SaMode::Generalization;
        let k = k_anonymity(&data, &qi).unwrap();
        let l = l_diversity(&data, &qi, sa1, gen).unwrap();
        let el = entropy_l_diversity(&data, &qi, sa1, gen).unwrap();
        let (alpha, _) = alpha_k_anonymity(&data, &qi, sa1, gen).unwrap();
        prop_assert!(l >= 1 && l <= k);
        prop_assert!(el >= 1 && el <= l);
        prop_assert!(alpha >= 1.0 / l as f64 - 1e-12);
        let t = t_closeness(&data, &qi, &sa, gen).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&t));
        prop_assert!(basic_beta_likeness(&data, &qi, &sa, gen).unwrap() >= 0.0);
        prop_assert!(delta_disclosure(&data, &qi, &sa, gen).unwrap() >= 0.0);
    }

    #[test]
    fn report_equals_individual_operations(seed in any::<u64>(), qi_update in any::<bool>()) {
        let (raw, qi, sa) = table_from_seed(seed);
        let data = raw.dataset();
        let mode = if qi_update { SaMode::QiUpdate } else { SaMode::Generalization };
        let report = build_report(&data, &AttributeSchema::new(qi.clone(), sa.clone()).with_mode(mode)).unwrap();
        let m = &report.metrics;
        prop_assert_eq!(m.k_anonymity, k_anonymity(&data, &qi).unwrap());
        let (alpha, k) = alpha_k_anonymity(&data, &qi, &sa, mode).unwrap();
        prop_assert_eq!(m.alpha_k_anonymity.alpha, alpha);
        prop_assert_eq!(m.alpha_k_anonymity.k, k);
        prop_assert_eq!(m.l_diversity, l_diversity(&data, &qi, &sa, mode).unwrap());
        prop_assert_eq!(m.entropy_l_diversity, entropy_l_diversity(&data, &qi, &sa, mode).unwrap());
        let (c, l) = recursive_c_l_diversity(&data, &qi, &sa, mode).unwrap();
        prop_assert_eq!((m.recursive_c_l_diversity.c, m.recursive_c_l_diversity.l), (c, l));
        prop_assert_eq!(m.basic_beta_likeness.value, basic_beta_likeness(&data, &qi, &sa, mode).unwrap());
        prop_assert_eq!(m.enhanced_beta_likeness.value, enhanced_beta_likeness(&data, &qi, &sa, mode).unwrap());
        prop_assert_eq!(m.t_closeness.value, t_closeness(&data, &qi, &sa, mode).unwrap());
        prop_assert_eq!(m.delta_disclosure.value, delta_disclosure(&data, &qi, &sa, mode).unwrap());
    }

    #[test]
    fn report_totals_aggregate_per_sa_rows(seed in any::<u64>(), qi_update in any::<bool>()) {
        let (raw, qi, sa) = table_from_seed(seed);
        let data = raw.dataset();
        let mode = if qi_update { SaMode::QiUpdate } else { SaMode::Generalization };
        let r = build_report(&data, &AttributeSchema::new(qi, sa).with_mode(mode)).unwrap();
        let per = &r.per_sa;
        let fmax = |f: &dyn Fn(&anonaudit::SaMetrics) -> f64| per.iter().map(f).fold(f64::MIN, f64::max);
        let umin = |f: &dyn Fn(&anonaudit::SaMetrics) -> usize| per.iter().map(f).min().unwrap();
        prop_assert_eq!(r.metrics.alpha_k_anonymity.alpha, fmax(&|m| m.alpha));
        prop_assert_eq!(r.metrics.alpha_k_anonymity.k, umin(&|m| m.k));
        prop_assert_eq!(r.metrics.l_diversity, umin(&|m| m.l));
        prop_assert_eq!(r.metrics.entropy_l_diversity, umin(&|m| m.entropy_l));
        prop_assert_eq!(r.metrics.basic_beta_likeness.value, fmax(&|m| m.basic_beta));
        prop_assert_eq!(r.metrics.enhanced_beta_likeness.value, fmax(&|m| m.enhanced_beta));
        prop_assert_eq!(r.metrics.t_closeness.value, fmax(&|m| m.t));
        prop_assert_eq!(r.metrics.delta_disclosure.value, fmax(&|m| m.delta));
        let c_max = per.iter().filter_map(|m| m.c).max();
        let expected_c = if r.metrics.l_diversity == 1 { None } else { c_max };
        prop_assert_eq!(r.metrics.recursive_c_l_diversity.c, expected_c);
    }
}

#[test]
fn d4_file_matches_in_memory_constructor() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d4.csv");
    std::fs::write(&path, "g,d\nA,x\nA,y\nB,x\nB,x\n").unwrap();
    let loaded = anonaudit::load_delimited(&path, &LoadOptions::default()).unwrap();
    let built = common::d4().dataset();
    assert_eq!(loaded.columns(), built.columns());
    assert_eq!(loaded.row_count(), 4);
    assert_eq!(loaded.source(), path.display().to_string());
}
