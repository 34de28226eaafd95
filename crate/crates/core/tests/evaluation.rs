use std::collections::BTreeSet;

use emolex::eval::{
    coverage_stats, evaluate, min_max_normalize, pearson, read_gold, read_labels, BinaryCounts,
    EmotionMapping, EvalOptions, GoldHeadline, GoldSet, MinMaxMode, UncoveredPolicy,
};
use emolex::format::Metadata;
use emolex::{EmotionLexicon, EmotionSet, LemmaPos};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn lp(s: &str) -> LemmaPos {
    LemmaPos::parse(s).unwrap()
}

/// Three source emotions; rows chosen so every mean is easy to do by hand.
fn small_lexicon() -> EmotionLexicon {
    let rows = vec![
        (lp("storm#n"), vec![0.6, 0.2, 0.2]),
        (lp("win#v"), vec![0.0, 1.0, 0.0]),
        (lp("loss#n"), vec![0.5, 0.0, 0.5]),
        (lp("cat#n"), vec![0.2, 0.4, 0.4]),
    ];
    EmotionLexicon::new(
        EmotionSet::new(["FEARX", "JOYX", "SADX"]).unwrap(),
        rows,
        Metadata::new(),
    )
    .unwrap()
}

fn mapping() -> EmotionMapping {
    EmotionMapping::new(vec![
        ("FEAR".into(), Some("FEARX".into())),
        ("JOY".into(), Some("JOYX".into())),
        ("SADNESS".into(), Some("SADX".into())),
    ])
    .unwrap()
}

const HEADLINES: [(&str, [f64; 3], &str); 10] = [
    ("storm#n", [0.9, 0.1, 0.3], "FEAR"),
    ("win#v", [0.0, 0.8, 0.0], "JOY"),
    ("loss#n", [0.2, 0.0, 0.7], "SADNESS"),
    ("cat#n", [0.1, 0.5, 0.2], ""),
    ("storm#n loss#n", [0.6, 0.0, 0.6], "FEAR,SADNESS"),
    ("win#v cat#n", [0.0, 0.9, 0.1], "JOY"),
    ("storm#n win#v", [0.4, 0.4, 0.1], ""),
    ("dog#n", [0.3, 0.3, 0.3], ""),
    ("loss#n dog#n", [0.1, 0.1, 0.5], "SADNESS"),
    ("storm#n storm#n cat#n", [0.7, 0.2, 0.3], "FEAR"),
];

fn gold_set() -> GoldSet {
    let headlines = HEADLINES
        .iter()
        .enumerate()
        .map(|(i, (text, gold, labels))| GoldHeadline {
            id: format!("h{i}"),
            text: text.to_string(),
            tokens: text.split(' ').map(lp).collect(),
            gold: gold.to_vec(),
            gold_labels: Some(
                labels
                    .split(',')
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect(),
            ),
        })
        .collect();
    GoldSet {
        targets: EmotionSet::new(["FEAR", "JOY", "SADNESS"]).unwrap(),
        headlines,
    }
}

/// Headline means written out by hand from the rows above.
const EXPECTED_SCORES: [[f64; 3]; 10] = [
    [0.6, 0.2, 0.2],
    [0.0, 1.0, 0.0],
    [0.5, 0.0, 0.5],
    [0.2, 0.4, 0.4],
    [0.55, 0.1, 0.35],
    [0.1, 0.7, 0.2],
    [0.3, 0.6, 0.1],
    [0.0, 0.0, 0.0],
    [0.5, 0.0, 0.5],
    [1.4 / 3.0, 0.8 / 3.0, 0.8 / 3.0],
];

/// Textbook one-pass formula, deliberately unlike the library's two-pass one.
fn pearson_one_pass(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (sx, sy) = (xs.iter().sum::<f64>(), ys.iter().sum::<f64>());
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let syy: f64 = ys.iter().map(|y| y * y).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt())
}

#[test]
fn ten_headline_regression_matches_hand_computation() {
    let report = evaluate(
        &gold_set(),
        &small_lexicon(),
        &mapping(),
        &EvalOptions::default(),
    )
    .unwrap();
    for (e, ev) in report.emotions.iter().enumerate() {
        let xs: Vec<f64> = EXPECTED_SCORES.iter().map(|r| r[e]).collect();
        let ys: Vec<f64> = HEADLINES.iter().map(|h| h.1[e]).collect();
        let want = pearson_one_pass(&xs, &ys);
        assert!(
            (ev.pearson - want).abs() <= 1e-12,
            "{}: {} vs {want}",
            ev.target,
            ev.pearson
        );
    }

    // skip policy drops the single uncovered headline (index 7)
    let skip = EvalOptions {
        uncovered: UncoveredPolicy::Skip,
        ..EvalOptions::default()
    };
    let report = evaluate(&gold_set(), &small_lexicon(), &mapping(), &skip).unwrap();
    for (e, ev) in report.emotions.iter().enumerate() {
        let rows: Vec<usize> = (0..10).filter(|i| *i != 7).collect();
        let xs: Vec<f64> = rows.iter().map(|i| EXPECTED_SCORES[*i][e]).collect();
        let ys: Vec<f64> = rows.iter().map(|i| HEADLINES[*i].1[e]).collect();
        assert!((ev.pearson - pearson_one_pass(&xs, &ys)).abs() <= 1e-12);
    }
}

#[test]
fn ten_headline_classification_matches_hand_computation() {
    let report = evaluate(
        &gold_set(),
        &small_lexicon(),
        &mapping(),
        &EvalOptions::default(),
    )
    .unwrap();
    for (e, ev) in report.emotions.iter().enumerate() {
        let col: Vec<f64> = EXPECTED_SCORES.iter().map(|r| r[e]).collect();
        let (lo, hi) = col
            .iter()
            .fold((f64::MAX, f64::MIN), |(a, b), x| (a.min(*x), b.max(*x)));
        let mut c = BinaryCounts::default();
        for (i, x) in col.iter().enumerate() {
            let predicted = (x - lo) / (hi - lo) > 0.5;
            let actual = HEADLINES[i].2.split(',').any(|l| l == ev.target);
            match (predicted, actual) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, true) => c.fn_ += 1,
                (false, false) => c.tn += 1,
            }
        }
        let got = ev.classification.as_ref().unwrap();
        assert_eq!(got.counts, c, "{}", ev.target);
    }
    // FEAR by hand: normalized > 0.5 means raw > 0.3, i.e. headlines 0, 2, 4, 8, 9.
    let fear = report.emotions[0].classification.as_ref().unwrap();
    assert_eq!((fear.counts.tp, fear.counts.fp, fear.counts.fn_), (3, 2, 0));
    assert!((fear.precision - 0.6).abs() < 1e-15);
    assert!((fear.recall - 1.0).abs() < 1e-15);
    assert!((fear.f1 - 0.75).abs() < 1e-15);
}

#[test]
fn coverage_recount_on_five_headlines() {
    let lex = small_lexicon();
    let texts = [
        "storm#n dog#n",
        "win#v",
        "dog#n pig#n",
        "",
        "cat#n loss#n bird#n bird#n",
    ];
    let headlines: Vec<GoldHeadline> = texts
        .iter()
        .enumerate()
        .map(|(i, t)| GoldHeadline {
            id: format!("c{i}"),
            text: t.to_string(),
            tokens: t.split_whitespace().map(lp).collect(),
            gold: vec![0.0; 3],
            gold_labels: None,
        })
        .collect();
    let cov = coverage_stats(&headlines, &lex);
    assert_eq!(cov.headlines_counted, 4);
    assert_eq!(cov.empty_headlines, 1);
    assert_eq!(cov.zero_coverage_headlines, 2);
    assert!((cov.mean - (0.5 + 1.0 + 0.0 + 0.5) / 4.0).abs() < 1e-15);
}

#[test]
fn classification_with_no_positive_prediction_has_zero_f1() {
    let c = BinaryCounts {
        tp: 0,
        fp: 0,
        fn_: 4,
        tn: 6,
    };
    assert_eq!(c.precision(), 0.0);
    assert_eq!(c.recall(), 0.0);
    assert_eq!(c.f1(), 0.0);
    let c = BinaryCounts {
        tp: 3,
        fp: 1,
        fn_: 2,
        tn: 0,
    };
    assert_eq!(c.precision(), 0.75);
    assert_eq!(c.recall(), 0.6);
    assert!((c.f1() - 2.0 / 3.0).abs() < 1e-15);
}

#[test]
fn min_max_on_random_vector() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let v: Vec<f64> = (0..20).map(|_| rng.gen_range(-5.0..5.0)).collect();
    let out = min_max_normalize(&v);
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    for (x, y) in v.iter().zip(&out) {
        assert!((y - (x - lo) / (hi - lo)).abs() <= 1e-15);
    }
    assert_eq!(out.iter().cloned().fold(f64::INFINITY, f64::min), 0.0);
    assert_eq!(out.iter().cloned().fold(f64::NEG_INFINITY, f64::max), 1.0);
    assert_eq!(min_max_normalize(&[0.3; 5]), vec![0.0; 5]);
}

#[test]
fn identity_mapping_and_discarded_targets() {
    let lex = small_lexicon();
    let gold = GoldSet {
        targets: EmotionSet::new(["FEARX", "JOYX", "SADX", "DISGUST"]).unwrap(),
        headlines: gold_set()
            .headlines
            .into_iter()
            .map(|mut h| {
                h.gold.push(0.1 * h.gold[0] + 0.05);
                h.gold_labels = None;
                h
            })
            .collect(),
    };
    let report = evaluate(
        &gold,
        &lex,
        &EmotionMapping::identity(lex.emotions()),
        &EvalOptions::default(),
    )
    .unwrap();
    assert_eq!(report.emotions.len(), 3);
    assert!(report.emotions.iter().all(|e| e.classification.is_none()));
    assert_eq!(report.discarded, vec!["DISGUST".to_string()]);
}

#[test]
fn gold_file_percent_scale_and_mixed_scale() {
    let text = "id\ttext\tFEAR\tJOY\n1\tstorm#n\t80\t0\n2\twin#v\t0\t55\n";
    let gold = read_gold(text.as_bytes(), |t| t.split(' ').map(lp).collect()).unwrap();
    assert_eq!(gold.headlines[0].gold, vec![0.8, 0.0]);
    assert_eq!(gold.headlines[1].gold, vec![0.0, 0.55]);
    let mixed = "id\ttext\tFEAR\tJOY\n1\tstorm#n\t80\t0\n2\twin#v\t0\t0.5\n";
    assert!(read_gold(mixed.as_bytes(), |t| t.split(' ').map(lp).collect()).is_err());

    let mut gold = gold;
    read_labels("1\tFEAR\n2\tJOY,FEAR\n".as_bytes(), &mut gold).unwrap();
    let want: BTreeSet<String> = ["FEAR", "JOY"].map(String::from).into();
    assert_eq!(gold.headlines[1].gold_labels.as_ref().unwrap(), &want);
}

#[test]
fn report_tsv_is_stable() {
    let report = evaluate(
        &gold_set(),
        &small_lexicon(),
        &mapping(),
        &EvalOptions::default(),
    )
    .unwrap();
    let (mut a, mut b) = (Vec::new(), Vec::new());
    report.write_tsv(&Metadata::new(), &mut a).unwrap();
    report.write_tsv(&Metadata::new(), &mut b).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.contains("emotion\tsource\tpearson\tprecision\trecall\tf1\ttp\tfp\tfn\n"));
    assert!(text.contains("\nFEAR\tFEARX\t"));
}

fn affine_strategy() -> impl Strategy<Value = (Vec<(f64, f64)>, f64, f64, f64, f64)> {
    (
        prop::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 3..40),
        0.01f64..50.0,
        -50.0f64..50.0,
        0.01f64..50.0,
        -50.0f64..50.0,
    )
}

proptest! {
    #[test]
    fn pearson_is_symmetric_and_bounded(pairs in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 2..60)) {
        let (xs, ys): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        if let (Ok(a), Ok(b)) = (pearson(&xs, &ys), pearson(&ys, &xs)) {
            prop_assert!((a - b).abs() <= 1e-12);
            prop_assert!((-1.0..=1.0).contains(&a));
        }
    }

    #[test]
    fn pearson_ignores_positive_affine_maps((pairs, a, b, c, d) in affine_strategy()) {
        let (xs, ys): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let Ok(r) = pearson(&xs, &ys) else { return Ok(()) };
        let xs2: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
        let ys2: Vec<f64> = ys.iter().map(|y| c * y + d).collect();
        let r2 = pearson(&xs2, &ys2).unwrap();
        prop_assert!((r - r2).abs() <= 1e-9, "{} vs {}", r, r2);
    }

    #[test]
    fn thresholded_decisions_ignore_positive_affine_maps(
        v in prop::collection::vec(-10.0f64..10.0, 2..40),
        a in 0.1f64..10.0,
        b in -10.0f64..10.0,
    ) {
        // keep values on a coarse grid so the affine map cannot move a value
        // across the threshold through rounding alone
        let v: Vec<f64> = v.iter().map(|x| (x * 8.0).round() / 8.0).collect();
        let w: Vec<f64> = v.iter().map(|x| a * x + b).collect();
        let p: Vec<bool> = min_max_normalize(&v).iter().map(|x| *x > 0.5).collect();
        let q: Vec<bool> = min_max_normalize(&w).iter().map(|x| *x > 0.5).collect();
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mid = (lo + hi) / 2.0;
        for i in 0..v.len() {
            if (v[i] - mid).abs() > 1e-9 {
                prop_assert_eq!(p[i], q[i]);
            }
        }
    }

    #[test]
    fn joint_minmax_keeps_scores_in_unit_interval(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut gold = gold_set();
        for h in &mut gold.headlines {
            for g in &mut h.gold {
                *g = rng.gen_range(0.0..1.0);
            }
        }
        let opts = EvalOptions { minmax: MinMaxMode::Joint, ..EvalOptions::default() };
        let report = evaluate(&gold, &small_lexicon(), &mapping(), &opts).unwrap();
        for e in &report.emotions {
            let c = e.classification.as_ref().unwrap();
            prop_assert_eq!(c.counts.tp + c.counts.fp + c.counts.fn_ + c.counts.tn, 10);
        }
    }
}
