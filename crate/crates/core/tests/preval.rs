mod common;

use common::oracles::{relerr, truth};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slidesynth::critic::{full_critique, CriticThresholds, CritiqueList};
use slidesynth::geom::Rect;
use slidesynth::ldl::Token;
use slidesynth::preval::*;
use slidesynth::refine::{corruption_corpus, CorruptionConfig};
use slidesynth::sir::{SlideDraft, SlideElement};

fn rect_slide(rects: &[Rect]) -> SlideDraft {
    let mut d = SlideDraft::new(Token::lookup("SLIDE_BLANK").unwrap());
    for (i, r) in rects.iter().enumerate() {
        d.push(SlideElement::new(format!("e{i}"), Token::lookup("ELEM_IMAGE").unwrap(), *r)).unwrap();
    }
    d
}

/// Union area by inclusion-exclusion over subsets.
fn union_by_subsets(rects: &[Rect], clip: Rect) -> f64 {
    let n = rects.len();
    let mut total = 0.0;
    for mask in 1u32..(1 << n) {
        let mut acc = Some(clip);
        for (i, r) in rects.iter().enumerate() {
            if mask & (1 << i) != 0 {
                acc = acc.and_then(|a| a.intersection(r));
            }
        }
        let area = acc.map_or(0.0, |a| a.area());
        total += if mask.count_ones() % 2 == 1 { area } else { -area };
    }
    total
}

#[test]
fn empty_and_full_slides() {
    let t = CriticThresholds::default();
    let deck = vec![rect_slide(&[]), rect_slide(&[])];
    let crit = vec![CritiqueList::default(); 2];
    let x = extract_features(&deck, &crit, &t).unwrap();
    assert_eq!(x.0[1], 1.0);
    assert_eq!(x.0[3], 0.0);
    let full = vec![rect_slide(&[Rect::new(0.0, 0.0, 1280.0, 720.0)])];
    assert_eq!(extract_features(&full, &crit[..1], &t).unwrap().0[1], 0.0);
    assert_eq!(extract_features(&[], &[], &t), Err(PrevalError::EmptyDeck));
}

#[test]
fn features_match_straightforward_recomputation() {
    let t = CriticThresholds::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..30 {
        let n = rng.gen_range(0..7);
        let rects: Vec<Rect> = (0..n)
            .map(|_| {
                Rect::new(
                    rng.gen_range(-100.0..1200.0f64).round(),
                    rng.gen_range(-100.0..650.0f64).round(),
                    rng.gen_range(10.0..500.0f64).round(),
                    rng.gen_range(10.0..300.0f64).round(),
                )
            })
            .collect();
        let d = rect_slide(&rects);
        let x = extract_features(std::slice::from_ref(&d), &[CritiqueList::default()], &t).unwrap();
        let canvas = Rect::new(0.0, 0.0, 1280.0, 720.0);
        let ws = 1.0 - union_by_subsets(&rects, canvas) / canvas.area();
        assert!((x.0[1] - ws).abs() < 1e-9);
        let mut cells = vec![];
        for r in 0..4 {
            for c in 0..4 {
                let cell = Rect::new(c as f64 * 320.0, r as f64 * 180.0, 320.0, 180.0);
                cells.push(1.0 - union_by_subsets(&rects, cell) / cell.area());
            }
        }
        let m = cells.iter().sum::<f64>() / 16.0;
        let var = cells.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / 16.0;
        assert!((x.0[2] - var).abs() < 1e-9);
        assert!((x.0[3] - n as f64 / 20.0).abs() < 1e-12);
        let mut ov = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                ov += rects[i].intersection_area(&rects[j]);
            }
        }
        assert!((x.0[6] - ov / canvas.area()).abs() < 1e-9);
        // Averaging over a deck of two copies changes nothing.
        let x2 = extract_features(&[d.clone(), d], &[CritiqueList::default(), CritiqueList::default()], &t).unwrap();
        for (a, b) in x.0.iter().zip(x2.0) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn hand_computed_pipeline() {
    let x = FeatureVector([0.5, 0.4, 0.02, 0.25, 0.8, 0.0, 0.0, 0.3, 0.2, 0.15]);
    let mut model = PrevalModel::zeros();
    model.scorers[0].weights[0] = 2.0; // 1.0
    model.scorers[0].weights[10] = -0.5; // raw 0.5
    model.scorers[0].a = 2.0;
    model.scorers[0].b = 0.5; // score 0.5
    model.scorers[1].weights[4] = 1.0; // raw 0.8
    model.scorers[1].a = 1.0;
    model.scorers[1].b = 0.0;
    model.scorers[2].weights[1] = -1.0;
    model.scorers[2].weights[7] = 2.0; // raw -0.4 + 0.6 = 0.2
    model.scorers[2].a = 5.0;
    model.scorers[2].b = 0.6;
    model.dim_weights = [0.2, 0.3, 0.5];
    let p = model.profile(&x).unwrap();
    let s1 = 1.0 / (1.0 + (-0.8f64).exp());
    let s2 = 1.0 / (1.0 + (2.0f64).exp());
    assert!((p.scores[&Dimension::Content] - 0.5).abs() < 1e-9);
    assert!((p.scores[&Dimension::Coherence] - s1).abs() < 1e-9);
    assert!((p.scores[&Dimension::Design] - s2).abs() < 1e-9);
    assert!((p.aggregate - (0.1 + 0.3 * s1 + 0.5 * s2)).abs() < 1e-9);
}

#[test]
fn evaluate_checks_weights() {
    let deck = vec![rect_slide(&[Rect::new(100.0, 100.0, 200.0, 200.0)])];
    let crit = vec![CritiqueList::default()];
    let t = CriticThresholds::default();
    let p = evaluate(&deck, &crit, &PrevalModel::default(), &t).unwrap();
    assert!(p.scores.values().all(|s| *s > 0.0 && *s < 1.0));
    let bad = PrevalModel { dim_weights: [0.5, 0.5, 0.5], ..PrevalModel::default() };
    assert!(matches!(evaluate(&deck, &crit, &bad, &t), Err(PrevalError::WeightSumError(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]
    #[test]
    // Ranges keep |a·(raw − b)| ≤ 15, where f64 still resolves the sigmoid.
    fn normalisation_preserves_order(r1 in -10.0..10.0f64, r2 in -10.0..10.0f64, a in 0.05..1.0f64, b in -5.0..5.0f64) {
        let s = DimensionScorer { a, b, ..DimensionScorer::zeros(Dimension::Design) };
        prop_assume!((r1 - r2).abs() > 1e-6);
        let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
        prop_assert!(s.normalize(lo) < s.normalize(hi));
        prop_assert!(s.normalize(lo) > 0.0 && s.normalize(hi) < 1.0);
    }
}

#[test]
fn separable_preferences_are_learned() {
    let w = truth(3);
    let train = synthetic_pairs(500, &w, 100);
    let test = synthetic_pairs(200, &w, 200);
    let mut model = PrevalModel::zeros();
    let cfg = TrainConfig { lambda_tag: 0.1, l2: 1e-5, steps: 400, lr: 2.0 };
    let losses = train_preference(&mut model, &train, &cfg).unwrap();
    for w in losses[..11].windows(2) {
        assert!(w[1] < w[0]);
    }
    let acc = pairwise_accuracy(&model, &test);
    assert!(acc >= 0.95, "held-out accuracy {acc}");
}

#[test]
fn gradients_match_finite_differences() {
    let w = truth(5);
    let mut data = synthetic_pairs(40, &w, 9);
    data[0].labels.design = Label::Tie;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut model = PrevalModel::zeros();
    for s in &mut model.scorers {
        s.weights.iter_mut().for_each(|v| *v = rng.gen_range(-1.0..1.0));
    }
    for row in &mut model.tag_head.weights {
        row.iter_mut().for_each(|v| *v = rng.gen_range(-1.0..1.0));
    }
    let cfg = TrainConfig { lambda_tag: 0.7, l2: 1e-2, ..Default::default() };
    let (gs, gt) = preference_gradient(&model, &data, &cfg);
    let h = 1e-5;
    for _ in 0..20 {
        let scorer = rng.gen_bool(0.5);
        let (r, c) = if scorer { (rng.gen_range(0..3), rng.gen_range(0..NUM_INPUTS)) } else { (rng.gen_range(0..16), rng.gen_range(0..NUM_INPUTS)) };
        let at = |delta: f64| {
            let mut m = model.clone();
            if scorer {
                m.scorers[r].weights[c] += delta;
            } else {
                m.tag_head.weights[r][c] += delta;
            }
            preference_objective(&m, &data, &cfg)
        };
        let fd = (at(h) - at(-h)) / (2.0 * h);
        let an = if scorer { gs[r][c] } else { gt[r][c] };
        assert!(relerr(fd, an) < 1e-4, "scorer={scorer} ({r},{c}) fd {fd} analytic {an}");
    }
    // Per-item losses as well.
    let p = &data[3];
    for d in Dimension::ALL {
        let ws = &model.scorer(d).weights;
        let g = ranking_loss_grad(ws, p, d).unwrap();
        for c in 0..NUM_INPUTS {
            let mut a = ws.clone();
            let mut b = ws.clone();
            a[c] += h;
            b[c] -= h;
            let fd = (ranking_loss(&a, p, d).unwrap() - ranking_loss(&b, p, d).unwrap()) / (2.0 * h);
            assert!((fd - g[c]).abs() < 1e-4 * fd.abs().max(1e-6) || (fd - g[c]).abs() < 1e-10);
        }
    }
    let g = tag_loss_grad(&model.tag_head, p);
    for (j, c) in [(0, 0), (5, 3), (15, 10)] {
        let mut a = model.tag_head.clone();
        let mut b = model.tag_head.clone();
        a.weights[j][c] += h;
        b.weights[j][c] -= h;
        let fd = (tag_loss(&a, p) - tag_loss(&b, p)) / (2.0 * h);
        assert!(relerr(fd, g[j][c]) < 1e-4 || (fd - g[j][c]).abs() < 1e-10);
    }
}

#[test]
fn zero_tag_weight_is_pure_ranking() {
    let w = truth(8);
    let data = synthetic_pairs(100, &w, 4);
    let mut a = PrevalModel::zeros();
    let mut b = PrevalModel::zeros();
    let la = train_preference(&mut a, &data, &TrainConfig { lambda_tag: 0.0, l2: 1e-3, steps: 50, lr: 1.0 }).unwrap();
    let lb = train_ranking(&mut b, &data, 1e-3, 50, 1.0).unwrap();
    assert_eq!(la.iter().map(|x| x.to_bits()).collect::<Vec<_>>(), lb.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
    for (sa, sb) in a.scorers.iter().zip(&b.scorers) {
        assert!(sa.weights.iter().zip(&sb.weights).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}

#[test]
fn l2_shrinks_weights() {
    let w = truth(8);
    let data = synthetic_pairs(100, &w, 4);
    let norm = |m: &PrevalModel| m.scorers.iter().flat_map(|s| &s.weights).map(|x| x * x).sum::<f64>();
    let mut a = PrevalModel::zeros();
    let mut b = PrevalModel::zeros();
    train_ranking(&mut a, &data, 0.0, 100, 1.0).unwrap();
    train_ranking(&mut b, &data, 0.05, 100, 1.0).unwrap();
    assert!(norm(&b) < norm(&a));
}

#[test]
fn separable_tags_are_learned() {
    let w = truth(2);
    // Keep only pairs whose tag-driving differences stay clear of the cut.
    let data: Vec<PreferencePair> = synthetic_pairs(3000, &w, 6)
        .into_iter()
        .filter(|p| {
            (0..NUM_FEATURES).all(|k| {
                let z = (p.features_a.0[k] - p.features_b.0[k]).abs();
                (z - 0.5).abs() > 0.05 && (k >= 6 || (z - 0.25).abs() > 0.05)
            })
        })
        .collect();
    assert!(data.len() > 20);
    let mut model = PrevalModel::zeros();
    let cfg = TrainConfig { lambda_tag: 1.0, l2: 0.0, steps: 3000, lr: 5.0 };
    let initial = data.iter().map(|p| tag_loss(&model.tag_head, p)).sum::<f64>() / data.len() as f64;
    train_preference(&mut model, &data, &cfg).unwrap();
    let fin = data.iter().map(|p| tag_loss(&model.tag_head, p)).sum::<f64>() / data.len() as f64;
    assert!(fin < 0.05 * initial, "tag loss {initial} -> {fin}");
}

/// Tau-b straight from its definition over all pairs.
fn tau_oracle(a: &[f64], b: &[f64]) -> f64 {
    let (mut c, mut d, mut ta, mut tb) = (0.0f64, 0.0, 0.0, 0.0);
    for i in 0..a.len() {
        for j in 0..a.len() {
            if i >= j {
                continue;
            }
            let x = (a[i] - a[j]).signum() * if a[i] == a[j] { 0.0 } else { 1.0 };
            let y = (b[i] - b[j]).signum() * if b[i] == b[j] { 0.0 } else { 1.0 };
            if x == 0.0 && y != 0.0 {
                ta += 1.0;
            } else if y == 0.0 && x != 0.0 {
                tb += 1.0;
            } else if x * y > 0.0 {
                c += 1.0;
            } else if x * y < 0.0 {
                d += 1.0;
            }
        }
    }
    (c - d) / ((c + d + ta) * (c + d + tb)).sqrt()
}

#[test]
fn rank_correlations_against_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let n = rng.gen_range(3..12);
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0..5) as f64).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(0..5) as f64).collect();
        let t = kendall_tau_b(&a, &b).unwrap();
        let o = tau_oracle(&a, &b);
        assert!((t.is_nan() && o.is_nan()) || (t - o).abs() < 1e-12);
    }
    // Without ties, rho = 1 - 6 Σd² / (n(n²-1)).
    let a = [3.0, 1.0, 4.0, 1.5, 5.0, 9.0, 2.6];
    let b = [2.0, 7.0, 1.0, 8.0, 2.8, 1.8, 2.84];
    let (ra, rb) = (average_ranks(&a), average_ranks(&b));
    let d2: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - y) * (x - y)).sum();
    let n = a.len() as f64;
    assert!((spearman_rho(&a, &b).unwrap() - (1.0 - 6.0 * d2 / (n * (n * n - 1.0)))).abs() < 1e-12);
}

#[test]
fn correlation_report_on_profiles() {
    let t = CriticThresholds::default();
    let model = PrevalModel::default();
    let corpus = corruption_corpus(6, 3, &CorruptionConfig::default());
    let profiles: Vec<QualityProfile> = corpus
        .iter()
        .map(|(d, c)| {
            let crit = full_critique(d, c.as_ref(), &t);
            evaluate(std::slice::from_ref(d), &[crit], &model, &t).unwrap()
        })
        .collect();
    let same: Vec<RatedScores> = profiles.iter().map(RatedScores::from).collect();
    let r = correlation_report(&profiles, &same).unwrap();
    assert_eq!(r.spearman_rho, [1.0; 4]);
    assert_eq!(r.kendall_tau, [1.0; 4]);
    let rev: Vec<RatedScores> = same
        .iter()
        .map(|s| RatedScores { content: -s.content, coherence: -s.coherence, design: -s.design, overall: -s.overall })
        .collect();
    let r = correlation_report(&profiles, &rev).unwrap();
    assert_eq!(r.spearman_rho, [-1.0; 4]);
    assert_eq!(r.kendall_tau, [-1.0; 4]);
    assert!(matches!(correlation_report(&profiles, &same[..2]), Err(PrevalError::LengthMismatch(6, 2))));
}
