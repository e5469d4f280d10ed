use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::PrevalError;
use crate::critic::{required_height, CriticThresholds, CritiqueList, IssueType};
use crate::geom::{union_area, Rect};
use crate::render::TextMetrics;
use crate::sir::{canvas_rect, ContentPayload, SlideDraft, CANVAS_HEIGHT, CANVAS_WIDTH, MAX_FONT_SIZE};

/// Number of handcrafted features; the scorers see one more, a constant bias.
pub const NUM_FEATURES: usize = 10;
/// Feature width including the bias slot.
pub const NUM_INPUTS: usize = NUM_FEATURES + 1;

pub const FEATURE_NAMES: [&str; NUM_FEATURES] = [
    "alignment_score",
    "whitespace_ratio",
    "whitespace_variance",
    "element_count",
    "mean_text_fill_rate",
    "overflow_issue_count",
    "overlap_area_ratio",
    "mean_font_size",
    "color_count",
    "bullet_count",
];

const ELEMENT_NORM: f64 = 20.0;
const COLOR_NORM: f64 = 10.0;
const BULLET_NORM: f64 = 20.0;
const FILL_CAP: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct FeatureVector(pub [f64; NUM_FEATURES]);

impl TryFrom<Vec<f64>> for FeatureVector {
    type Error = String;

    fn try_from(v: Vec<f64>) -> Result<Self, String> {
        let arr: [f64; NUM_FEATURES] = v
            .try_into()
            .map_err(|v: Vec<f64>| format!("expected {NUM_FEATURES} features, got {}", v.len()))?;
        if arr.iter().any(|x| !x.is_finite()) {
            return Err("features must be finite".into());
        }
        Ok(FeatureVector(arr))
    }
}

impl From<FeatureVector> for Vec<f64> {
    fn from(f: FeatureVector) -> Vec<f64> {
        f.0.to_vec()
    }
}

impl FeatureVector {
    /// Features followed by the bias input 1.
    pub fn augmented(&self) -> [f64; NUM_INPUTS] {
        let mut out = [1.0; NUM_INPUTS];
        out[..NUM_FEATURES].copy_from_slice(&self.0);
        out
    }
}

fn edges(r: &Rect) -> [f64; 6] {
    [r.left(), r.center_x(), r.right(), r.top(), r.center_y(), r.bottom()]
}

/// Fraction of element pairs sharing at least one guide (an edge or centre
/// line within tolerance); 1 for slides with fewer than two elements.
pub fn alignment_score(draft: &SlideDraft, tol: f64) -> f64 {
    let els = draft.elements();
    let (mut pairs, mut aligned) = (0usize, 0usize);
    for (i, a) in els.iter().enumerate() {
        for b in &els[i + 1..] {
            pairs += 1;
            let (ea, eb) = (edges(&a.geometry), edges(&b.geometry));
            if ea.iter().zip(&eb).any(|(x, y)| (x - y).abs() <= tol) {
                aligned += 1;
            }
        }
    }
    if pairs == 0 {
        1.0
    } else {
        aligned as f64 / pairs as f64
    }
}

/// Population variance of per-cell whitespace over a 4×4 grid.
pub fn whitespace_variance(draft: &SlideDraft) -> f64 {
    let rects: Vec<Rect> = draft.elements().iter().map(|e| e.geometry).collect();
    let (cw, ch) = (CANVAS_WIDTH / 4.0, CANVAS_HEIGHT / 4.0);
    let mut cells = Vec::with_capacity(16);
    for row in 0..4 {
        for col in 0..4 {
            let cell = Rect::new(col as f64 * cw, row as f64 * ch, cw, ch);
            cells.push(1.0 - union_area(&rects, &cell) / cell.area());
        }
    }
    let mean = cells.iter().sum::<f64>() / 16.0;
    cells.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / 16.0
}

fn slide_features(draft: &SlideDraft, critique: &CritiqueList, t: &CriticThresholds) -> [f64; NUM_FEATURES] {
    let els = draft.elements();
    let canvas = canvas_rect();
    let rects: Vec<Rect> = els.iter().map(|e| e.geometry).collect();
    let metrics = TextMetrics::default();

    let text: Vec<_> = els.iter().filter(|e| e.content.is_text()).collect();
    let mean = |v: &mut dyn Iterator<Item = f64>| {
        let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
        if n == 0 {
            0.0
        } else {
            s / n as f64
        }
    };
    let fill = mean(&mut text.iter().map(|e| (required_height(e, &metrics) / e.geometry.h).min(FILL_CAP)));
    let font = mean(&mut text.iter().map(|e| e.style.font_size / MAX_FONT_SIZE));

    let overflows = critique
        .issues
        .iter()
        .filter(|i| i.issue_type == IssueType::Overflow)
        .count();
    let mut overlap = 0.0;
    for (i, a) in rects.iter().enumerate() {
        for b in &rects[i + 1..] {
            overlap += a.intersection_area(b);
        }
    }
    let mut colors = BTreeSet::new();
    for e in els {
        if e.content.is_text() {
            colors.insert(e.style.font_color.as_str().to_ascii_lowercase());
        }
        for c in [&e.style.fill_color, &e.style.border_color].into_iter().flatten() {
            colors.insert(c.as_str().to_ascii_lowercase());
        }
    }
    let bullets: usize = els
        .iter()
        .map(|e| match &e.content {
            ContentPayload::TextBody { bullets } => bullets.len(),
            _ => 0,
        })
        .sum();

    [
        alignment_score(draft, t.align_tolerance_px),
        1.0 - union_area(&rects, &canvas) / canvas.area(),
        whitespace_variance(draft),
        els.len() as f64 / ELEMENT_NORM,
        fill,
        overflows as f64 / els.len().max(1) as f64,
        overlap / canvas.area(),
        font,
        colors.len() as f64 / COLOR_NORM,
        bullets as f64 / BULLET_NORM,
    ]
}

/// Per-slide features averaged over the deck. `critiques[i]` belongs to `deck[i]`.
pub fn extract_features(
    deck: &[SlideDraft],
    critiques: &[CritiqueList],
    thresholds: &CriticThresholds,
) -> Result<FeatureVector, PrevalError> {
    if deck.is_empty() {
        return Err(PrevalError::EmptyDeck);
    }
    if critiques.len() != deck.len() {
        return Err(PrevalError::LengthMismatch(deck.len(), critiques.len()));
    }
    let mut acc = [0.0; NUM_FEATURES];
    for (d, c) in deck.iter().zip(critiques) {
        for (a, v) in acc.iter_mut().zip(slide_features(d, c, thresholds)) {
            *a += v;
        }
    }
    for a in &mut acc {
        *a /= deck.len() as f64;
    }
    Ok(FeatureVector(acc))
}
