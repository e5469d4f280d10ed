//! Reference implementations and fixtures shared by the suites and the
//! acceptance harness.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slidesynth::geom::Rect;
use slidesynth::ldl::{lex, Token, VOCAB_SIZE};
use slidesynth::preval::{NUM_FEATURES, NUM_INPUTS};
use slidesynth::prototype::{AspectBucket, ConceptFeatures, FunctionalType, LpgModel, PointsBucket, TrainingPair};
use slidesynth::sir::{ContentPayload, SlideDraft, SlideElement, Style};

pub fn toy_corpus() -> Vec<TrainingPair> {
    // Every token has a single successor within its target, so a first-order
    // table can represent each target exactly.
    let rows = [
        (FunctionalType::TitleMain, "<SOS> SLIDE_TITLE <SEP> ELEM_TITLE ATTR_SIZE_PRIMARY POS_MIDDLE POS_CENTER <EOS>"),
        (FunctionalType::Agenda, "<SOS> SLIDE_CONTENT_SINGLE_COL <SEP> ELEM_TEXT_BODY ATTR_TEXT_POINTS_MEDIUM POS_MIDDLE <EOS>"),
        (FunctionalType::SectionHeader, "<SOS> SLIDE_SECTION_HEADER <SEP> ELEM_TITLE POS_CENTER <EOS>"),
        (FunctionalType::ContentImageOnly, "<SOS> SLIDE_IMAGE_CAPTION <SEP> ELEM_IMAGE ATTR_IMAGE_ASPECT_WIDE POS_FULL_WIDTH <EOS>"),
        (FunctionalType::ThankYouContact, "<SOS> SLIDE_BLANK ATTR_STYLE_TAG <SEP> ELEM_FOOTER POS_BOTTOM <EOS>"),
    ];
    rows.iter()
        .map(|(ft, text)| {
            let f = ConceptFeatures::new(*ft, PointsBucket::Few, AspectBucket::None);
            TrainingPair::new(f, lex(text).unwrap()).unwrap()
        })
        .collect()
}

pub fn random_model(rng: &mut ChaCha8Rng, conds: &[usize], scale: f64) -> LpgModel {
    let mut m = LpgModel::default();
    for &c in conds {
        for p in 0..VOCAB_SIZE {
            let row = m.row_mut(c, p);
            for v in row.iter_mut() {
                *v = rng.gen_range(-scale..scale);
            }
        }
    }
    m
}

/// Probability of the whole target as a product of per-step softmax
/// probabilities, computed without any log-space shortcuts.
pub fn brute_force_prob(m: &LpgModel, pair: &TrainingPair) -> f64 {
    let c = pair.features.condition_index();
    let mut prob = 1.0;
    for w in pair.target.windows(2) {
        let row = m.row(c, w[0].id());
        let z: f64 = row.iter().map(|v| v.exp()).sum();
        prob *= row[w[1].id()].exp() / z;
    }
    prob
}


/// DBSCAN from its definition: core points, components of the core graph,
/// borders attached to the earliest-numbered adjacent cluster.
pub fn dbscan_oracle(v: &[Vec<f64>], eps: f64, min_pts: usize) -> Vec<i64> {
    let n = v.len();
    let dist = |i: usize, j: usize| {
        let dot: f64 = v[i].iter().zip(&v[j]).map(|(a, b)| a * b).sum();
        let na: f64 = v[i].iter().map(|a| a * a).sum::<f64>().sqrt();
        let nb: f64 = v[j].iter().map(|a| a * a).sum::<f64>().sqrt();
        if na == 0.0 || nb == 0.0 {
            1.0
        } else {
            (1.0 - dot / (na * nb)).max(0.0)
        }
    };
    let adj = |i: usize, j: usize| i == j || dist(i, j) <= eps;
    let core: Vec<bool> = (0..n).map(|i| (0..n).filter(|&j| adj(i, j)).count() >= min_pts).collect();
    // Union-find over core points.
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for i in 0..n {
        for j in 0..n {
            if core[i] && core[j] && adj(i, j) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut label_of_root = BTreeMap::new();
    let mut labels = vec![-1i64; n];
    for i in 0..n {
        if core[i] {
            let r = find(&mut parent, i);
            let next = label_of_root.len() as i64;
            labels[i] = *label_of_root.entry(r).or_insert(next);
        }
    }
    for i in 0..n {
        if !core[i] {
            labels[i] = (0..n)
                .filter(|&j| core[j] && adj(i, j))
                .map(|j| labels[j])
                .min()
                .unwrap_or(-1);
        }
    }
    labels
}

/// Renumbers labels by first appearance so that label names do not matter.
pub fn canonical(labels: &[i64]) -> Vec<i64> {
    let mut map = BTreeMap::new();
    labels
        .iter()
        .map(|&l| {
            if l < 0 {
                -1
            } else {
                let next = map.len() as i64;
                *map.entry(l).or_insert(next)
            }
        })
        .collect()
}

pub fn blobs(seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centres = [[1.0, 0.0, 0.0, 0.1], [0.0, 1.0, 0.0, 0.1], [0.0, 0.0, 1.0, 0.1]];
    let mut out = Vec::new();
    for i in 0..30 {
        let c = centres[i % 3];
        out.push(c.iter().map(|x| x + rng.gen_range(-0.05..0.05)).collect());
    }
    out
}


/// An off-centre title (centre 6 px right of the canvas centre) and a bullet
/// list whose text needs 19 lines of 26 px in a 260 px box.
pub fn two_defects() -> SlideDraft {
    let mut d = SlideDraft::new(Token::lookup("SLIDE_CONTENT_SINGLE_COL").unwrap());
    d.push(
        SlideElement::new("title", Token::lookup("ELEM_TITLE").unwrap(), Rect::new(246.0, 60.0, 800.0, 80.0))
            .with_content(ContentPayload::Title { text: "Quarterly results".into() }),
    )
    .unwrap();
    let style = Style { font_size: 20.0, ..Style::default() };
    d.push(
        SlideElement::new("bullet_list", Token::lookup("ELEM_TEXT_BODY").unwrap(), Rect::new(100.0, 400.0, 600.0, 260.0))
            .with_content(ContentPayload::TextBody { bullets: (1..=19).map(|i| format!("Point {i}")).collect() })
            .with_style(style),
    )
    .unwrap();
    d
}

pub const GOLDEN: &str = r#"{
  "issues": [
    {
      "element_id": "bullet_list",
      "issue_type": "Overflow",
      "severity": 0.9,
      "suggestion": "Reduce font size or content length"
    },
    {
      "element_id": "title",
      "issue_type": "Misalignment",
      "severity": 0.75,
      "target_element_id": "slide_bounds",
      "suggestion": "Center the title horizontally"
    }
  ]
}
"#;


pub fn truth(seed: u64) -> [[f64; NUM_INPUTS]; 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    std::array::from_fn(|_| std::array::from_fn(|i| if i == NUM_FEATURES { 0.0 } else { rng.gen_range(-2.0..2.0) }))
}


pub fn relerr(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-8)
}

