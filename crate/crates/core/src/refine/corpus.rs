//! Seeded corruption of clean template instantiations, for exercising the
//! refinement loop.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instantiate::instantiate;
use crate::ldl::parse;
use crate::prototype::{rule_prototype, AspectBucket, ConceptFeatures, PointsBucket, SlideConcept};
use crate::sir::{ContentPayload, SlideDraft, MAX_FONT_SIZE};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorruptionConfig {
    /// Probability that an element is displaced.
    pub jitter_p: f64,
    /// Largest displacement per axis, in px.
    pub jitter_px: f64,
    /// Probability that a text element's font is enlarged.
    pub inflate_p: f64,
    pub inflate_range: (f64, f64),
    /// Probability that a text body gets one bullet repeated.
    pub duplicate_p: f64,
}

impl Default for CorruptionConfig {
    fn default() -> Self {
        CorruptionConfig {
            jitter_p: 0.7,
            jitter_px: 48.0,
            inflate_p: 0.5,
            inflate_range: (1.1, 1.5),
            duplicate_p: 0.3,
        }
    }
}

/// Applies random jitter, font inflation and bullet duplication.
pub fn corrupt(draft: &SlideDraft, cfg: &CorruptionConfig, rng: &mut impl Rng) -> SlideDraft {
    let mut out = draft.clone();
    let ids: Vec<String> = out.elements().iter().map(|e| e.id.clone()).collect();
    for id in ids {
        let el = out.element_mut(&id).expect("id taken from the draft");
        if rng.gen_bool(cfg.jitter_p) {
            el.geometry.x += rng.gen_range(-cfg.jitter_px..=cfg.jitter_px).round();
            el.geometry.y += rng.gen_range(-cfg.jitter_px..=cfg.jitter_px).round();
        }
        if el.content.is_text() && rng.gen_bool(cfg.inflate_p) {
            let f = rng.gen_range(cfg.inflate_range.0..=cfg.inflate_range.1);
            el.style.font_size = (el.style.font_size * f).round().min(MAX_FONT_SIZE);
        }
        if let ContentPayload::TextBody { bullets } = &mut el.content {
            if !bullets.is_empty() && rng.gen_bool(cfg.duplicate_p) {
                let i = rng.gen_range(0..bullets.len());
                bullets.push(bullets[i].clone());
            }
        }
    }
    out
}

fn sample_concept(f: &ConceptFeatures, rng: &mut impl Rng) -> SlideConcept {
    let n = match f.points_bucket {
        PointsBucket::Few => rng.gen_range(1..=3),
        PointsBucket::Medium => rng.gen_range(4..=6),
        PointsBucket::Many => rng.gen_range(7..=9),
    };
    let words = ["growth", "margin", "cost", "region", "team", "risk", "plan", "users", "churn"];
    let mut c = SlideConcept::new(format!("Slide about {}", words[rng.gen_range(0..words.len())]), f.functional_type)
        .with_bullets((0..n).map(|i| {
            let len = rng.gen_range(3..=8);
            let mut s = format!("Point {}", i + 1);
            for _ in 0..len {
                s.push(' ');
                s.push_str(words[rng.gen_range(0..words.len())]);
            }
            s
        }));
    c.key_message = "Key result for the quarter".into();
    let aspect = match f.aspect_bucket {
        AspectBucket::Wide => Some(16.0 / 9.0),
        AspectBucket::Square => Some(1.0),
        AspectBucket::Tall => Some(0.6),
        AspectBucket::None => None,
    };
    if let Some(a) = aspect {
        c = c.with_visual("doc_img_001", a);
    }
    c
}

/// `n` corrupted drafts, each from the rule template of a random condition.
pub fn corruption_corpus(n: usize, seed: u64, cfg: &CorruptionConfig) -> Vec<(SlideDraft, Option<SlideConcept>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let cond = rng.gen_range(0..crate::prototype::NUM_CONDITIONS);
            let f = ConceptFeatures::from_condition_index(cond).expect("index in range");
            let concept = sample_concept(&f, &mut rng);
            let layout = parse(&rule_prototype(&f)).expect("templates parse");
            let clean = instantiate(&layout, &concept).draft;
            (corrupt(&clean, cfg, &mut rng), Some(concept))
        })
        .collect()
}
