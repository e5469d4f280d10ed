use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{dot, sigmoid, softplus, Dimension, FeatureVector, PrevalError, PrevalModel, NUM_FEATURES, NUM_INPUTS};

pub const TAG_VOCABULARY: [&str; 16] = [
    "text_overflow",
    "irrelevant_image",
    "logical_clarity",
    "misalignment",
    "element_overlap",
    "cluttered_layout",
    "excess_whitespace",
    "inconsistent_fonts",
    "poor_contrast",
    "weak_hierarchy",
    "off_topic",
    "redundant_text",
    "missing_visual",
    "good_flow",
    "balanced_layout",
    "readable_text",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "A_better")]
    ABetter,
    #[serde(rename = "B_better")]
    BBetter,
    #[serde(rename = "tie")]
    Tie,
}

impl Label {
    /// +1 when A wins, -1 when B wins.
    pub fn sign(self) -> Option<f64> {
        match self {
            Label::ABetter => Some(1.0),
            Label::BBetter => Some(-1.0),
            Label::Tie => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Labels {
    pub content: Label,
    pub coherence: Label,
    pub design: Label,
}

impl Labels {
    pub fn get(&self, d: Dimension) -> Label {
        match d {
            Dimension::Content => self.content,
            Dimension::Coherence => self.coherence,
            Dimension::Design => self.design,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreferencePair {
    #[serde(rename = "features_A")]
    pub features_a: FeatureVector,
    #[serde(rename = "features_B")]
    pub features_b: FeatureVector,
    pub labels: Labels,
    #[serde(default)]
    pub tags: BTreeSet<String>,
}

impl PreferencePair {
    fn diff(&self) -> [f64; NUM_INPUTS] {
        let (a, b) = (self.features_a.augmented(), self.features_b.augmented());
        std::array::from_fn(|i| a[i] - b[i])
    }

    /// `|x_A − x_B|` with the bias input kept at 1.
    fn tag_input(&self) -> [f64; NUM_INPUTS] {
        let mut z = self.diff().map(f64::abs);
        z[NUM_FEATURES] = 1.0;
        z
    }

    fn tag_targets(&self) -> [f64; 16] {
        std::array::from_fn(|j| if self.tags.contains(TAG_VOCABULARY[j]) { 1.0 } else { 0.0 })
    }
}

/// One logistic classifier per rationale tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TagHead {
    pub weights: Vec<Vec<f64>>,
}

impl Default for TagHead {
    fn default() -> Self {
        TagHead {
            weights: vec![vec![0.0; NUM_INPUTS]; TAG_VOCABULARY.len()],
        }
    }
}

impl TagHead {
    pub fn check(&self) -> Result<(), PrevalError> {
        if self.weights.len() != TAG_VOCABULARY.len() {
            return Err(PrevalError::BadModel(format!("tag head has {} rows", self.weights.len())));
        }
        for row in &self.weights {
            if row.len() != NUM_INPUTS {
                return Err(PrevalError::DimensionMismatch(NUM_INPUTS, row.len()));
            }
            if row.iter().any(|w| !w.is_finite()) {
                return Err(PrevalError::BadModel("tag weights not finite".into()));
            }
        }
        Ok(())
    }

    pub fn sq_norm(&self) -> f64 {
        self.weights.iter().flatten().map(|w| w * w).sum()
    }
}

/// `ln(1 + exp(−y·(s_A − s_B)))` on raw scores.
pub fn ranking_loss(weights: &[f64], pair: &PreferencePair, dim: Dimension) -> Result<f64, PrevalError> {
    let y = pair.labels.get(dim).sign().ok_or(PrevalError::TiePair)?;
    if weights.len() != NUM_INPUTS {
        return Err(PrevalError::DimensionMismatch(NUM_INPUTS, weights.len()));
    }
    Ok(softplus(-y * dot(weights, &pair.diff())))
}

/// Gradient of `ranking_loss` in the scorer weights.
pub fn ranking_loss_grad(weights: &[f64], pair: &PreferencePair, dim: Dimension) -> Result<[f64; NUM_INPUTS], PrevalError> {
    let y = pair.labels.get(dim).sign().ok_or(PrevalError::TiePair)?;
    if weights.len() != NUM_INPUTS {
        return Err(PrevalError::DimensionMismatch(NUM_INPUTS, weights.len()));
    }
    let d = pair.diff();
    let c = -y * sigmoid(-y * dot(weights, &d));
    Ok(d.map(|x| c * x))
}

/// Multi-label logistic loss of the tag head on `|x_A − x_B|`, summed over tags.
pub fn tag_loss(head: &TagHead, pair: &PreferencePair) -> f64 {
    let z = pair.tag_input();
    let t = pair.tag_targets();
    head.weights
        .iter()
        .zip(t)
        .map(|(h, tj)| {
            let u = dot(h, &z);
            softplus(u) - tj * u
        })
        .sum()
}

pub fn tag_loss_grad(head: &TagHead, pair: &PreferencePair) -> Vec<[f64; NUM_INPUTS]> {
    let z = pair.tag_input();
    let t = pair.tag_targets();
    head.weights
        .iter()
        .zip(t)
        .map(|(h, tj)| {
            let c = sigmoid(dot(h, &z)) - tj;
            z.map(|x| c * x)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub lambda_tag: f64,
    pub l2: f64,
    pub steps: usize,
    pub lr: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lambda_tag: 0.1,
            l2: 1e-4,
            steps: 500,
            lr: 0.5,
        }
    }
}

/// Mean ranking loss over untied (pair, dimension) items plus L2 on the
/// scorer weights, and its gradient per scorer.
fn ranking_part(model: &PrevalModel, data: &[PreferencePair], l2: f64) -> (f64, Vec<[f64; NUM_INPUTS]>) {
    let mut grads = vec![[0.0; NUM_INPUTS]; 3];
    let mut loss = 0.0;
    let mut n = 0usize;
    for p in data {
        for d in Dimension::ALL {
            if p.labels.get(d) == Label::Tie {
                continue;
            }
            let w = &model.scorer(d).weights;
            loss += ranking_loss(w, p, d).expect("untied, checked width");
            let g = ranking_loss_grad(w, p, d).expect("untied, checked width");
            for (a, b) in grads[d.index()].iter_mut().zip(g) {
                *a += b;
            }
            n += 1;
        }
    }
    let scale = if n == 0 { 0.0 } else { 1.0 / n as f64 };
    let mut total = loss * scale;
    for (g, s) in grads.iter_mut().zip(&model.scorers) {
        for (gi, wi) in g.iter_mut().zip(&s.weights) {
            *gi = *gi * scale + 2.0 * l2 * wi;
        }
        total += l2 * s.weights.iter().map(|w| w * w).sum::<f64>();
    }
    (total, grads)
}

/// Mean tag loss times λ plus L2 on the tag head, and its gradient.
fn tag_part(model: &PrevalModel, data: &[PreferencePair], lambda: f64, l2: f64) -> (f64, Vec<[f64; NUM_INPUTS]>) {
    let head = &model.tag_head;
    let mut grads = vec![[0.0; NUM_INPUTS]; TAG_VOCABULARY.len()];
    let mut loss = 0.0;
    for p in data {
        loss += tag_loss(head, p);
        for (g, pg) in grads.iter_mut().zip(tag_loss_grad(head, p)) {
            for (a, b) in g.iter_mut().zip(pg) {
                *a += b;
            }
        }
    }
    let scale = lambda / data.len() as f64;
    for (g, h) in grads.iter_mut().zip(&head.weights) {
        for (gi, wi) in g.iter_mut().zip(h) {
            *gi = *gi * scale + 2.0 * l2 * wi;
        }
    }
    (loss * scale + l2 * head.sq_norm(), grads)
}

/// Full training objective.
pub fn preference_objective(model: &PrevalModel, data: &[PreferencePair], cfg: &TrainConfig) -> f64 {
    ranking_part(model, data, cfg.l2).0 + tag_part(model, data, cfg.lambda_tag, cfg.l2).0
}

/// Gradient of `preference_objective`: per-scorer rows then per-tag rows.
pub fn preference_gradient(model: &PrevalModel, data: &[PreferencePair], cfg: &TrainConfig) -> (Vec<[f64; NUM_INPUTS]>, Vec<[f64; NUM_INPUTS]>) {
    (ranking_part(model, data, cfg.l2).1, tag_part(model, data, cfg.lambda_tag, cfg.l2).1)
}

fn step_scorers(model: &mut PrevalModel, grads: &[[f64; NUM_INPUTS]], lr: f64) {
    for (s, g) in model.scorers.iter_mut().zip(grads) {
        for (w, gi) in s.weights.iter_mut().zip(g) {
            *w -= lr * gi;
        }
    }
}

fn validate(model: &PrevalModel, data: &[PreferencePair]) -> Result<(), PrevalError> {
    if data.is_empty() {
        return Err(PrevalError::EmptyData);
    }
    model.check()
}

/// Gradient descent on the ranking term alone; the tag head is untouched.
/// Returns the objective before each step.
pub fn train_ranking(model: &mut PrevalModel, data: &[PreferencePair], l2: f64, steps: usize, lr: f64) -> Result<Vec<f64>, PrevalError> {
    validate(model, data)?;
    let mut losses = Vec::with_capacity(steps);
    for step in 0..steps {
        let (loss, grads) = ranking_part(model, data, l2);
        if !loss.is_finite() {
            return Err(PrevalError::NonFiniteLoss(step));
        }
        losses.push(loss);
        step_scorers(model, &grads, lr);
    }
    Ok(losses)
}

/// Gradient descent on ranking + λ·tag + L2. With `lambda_tag = 0` the
/// scorers follow exactly the `train_ranking` trajectory.
pub fn train_preference(model: &mut PrevalModel, data: &[PreferencePair], cfg: &TrainConfig) -> Result<Vec<f64>, PrevalError> {
    validate(model, data)?;
    let mut losses = Vec::with_capacity(cfg.steps);
    for step in 0..cfg.steps {
        let (mut loss, grads) = ranking_part(model, data, cfg.l2);
        let tag = (cfg.lambda_tag != 0.0 || model.tag_head.sq_norm() != 0.0)
            .then(|| tag_part(model, data, cfg.lambda_tag, cfg.l2));
        if let Some((tl, _)) = &tag {
            loss += tl;
        }
        if !loss.is_finite() {
            return Err(PrevalError::NonFiniteLoss(step));
        }
        losses.push(loss);
        step_scorers(model, &grads, cfg.lr);
        if let Some((_, tg)) = tag {
            for (h, g) in model.tag_head.weights.iter_mut().zip(tg) {
                for (w, gi) in h.iter_mut().zip(g) {
                    *w -= cfg.lr * gi;
                }
            }
        }
    }
    Ok(losses)
}

/// Fraction of untied (pair, dimension) items ordered correctly by raw score.
pub fn pairwise_accuracy(model: &PrevalModel, data: &[PreferencePair]) -> f64 {
    let (mut right, mut n) = (0usize, 0usize);
    for p in data {
        for d in Dimension::ALL {
            if let Some(y) = p.labels.get(d).sign() {
                n += 1;
                if y * dot(&model.scorer(d).weights, &p.diff()) > 0.0 {
                    right += 1;
                }
            }
        }
    }
    if n == 0 {
        0.0
    } else {
        right as f64 / n as f64
    }
}

/// Random pairs labelled by hidden linear scorers `truth`. Tag `j` is set
/// when feature `j mod 10` differs by more than 0.5 (j < 10) or 0.25.
pub fn synthetic_pairs(n: usize, truth: &[[f64; NUM_INPUTS]; 3], seed: u64) -> Vec<PreferencePair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut feats = || FeatureVector(std::array::from_fn(|_| rng.gen::<f64>()));
    (0..n)
        .map(|_| {
            let (a, b) = (feats(), feats());
            let lab = |w: &[f64; NUM_INPUTS]| {
                if dot(w, &a.augmented()) > dot(w, &b.augmented()) {
                    Label::ABetter
                } else {
                    Label::BBetter
                }
            };
            let tags = (0..TAG_VOCABULARY.len())
                .filter(|&j| {
                    let k = j % NUM_FEATURES;
                    let cut = if j < NUM_FEATURES { 0.5 } else { 0.25 };
                    (a.0[k] - b.0[k]).abs() > cut
                })
                .map(|j| TAG_VOCABULARY[j].to_string())
                .collect();
            PreferencePair {
                features_a: a,
                features_b: b,
                labels: Labels {
                    content: lab(&truth[0]),
                    coherence: lab(&truth[1]),
                    design: lab(&truth[2]),
                },
                tags,
            }
        })
        .collect()
}

pub fn pairs_from_jsonl(text: &str) -> Result<Vec<PreferencePair>, PrevalError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |reason: String| PrevalError::BadPair { line: i + 1, reason };
        let p: PreferencePair = serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
        if let Some(t) = p.tags.iter().find(|t| !TAG_VOCABULARY.contains(&t.as_str())) {
            return Err(bad(format!("unknown tag {t:?}")));
        }
        out.push(p);
    }
    Ok(out)
}

pub fn pairs_to_jsonl(pairs: &[PreferencePair]) -> String {
    pairs
        .iter()
        .map(|p| serde_json::to_string(p).expect("pair serialises") + "\n")
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(a: f64, b: f64, label: Label) -> PreferencePair {
        let mut fa = [0.0; NUM_FEATURES];
        let mut fb = [0.0; NUM_FEATURES];
        fa[0] = a;
        fb[0] = b;
        PreferencePair {
            features_a: FeatureVector(fa),
            features_b: FeatureVector(fb),
            labels: Labels { content: label, coherence: label, design: Label::Tie },
            tags: BTreeSet::new(),
        }
    }

    #[test]
    fn logistic_at_zero_and_ties() {
        let w = vec![0.0; NUM_INPUTS];
        let p = pair(0.7, 0.2, Label::ABetter);
        assert!((ranking_loss(&w, &p, Dimension::Content).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(ranking_loss(&w, &p, Dimension::Design), Err(PrevalError::TiePair));
        let mut w = w;
        w[0] = 1e4;
        assert!(ranking_loss(&w, &p, Dimension::Content).unwrap() < 1e-300);
    }

    #[test]
    fn uniform_tag_head() {
        let p = pair(0.7, 0.2, Label::ABetter);
        assert!((tag_loss(&TagHead::default(), &p) - 16.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn jsonl_round_trip() {
        let mut p = pair(0.7, 0.2, Label::BBetter);
        p.tags.insert("text_overflow".into());
        let text = pairs_to_jsonl(&[p.clone()]);
        assert!(text.contains("\"features_A\"") && text.contains("\"B_better\""));
        assert_eq!(pairs_from_jsonl(&text).unwrap(), vec![p]);
        let bad = text.replace("text_overflow", "nope");
        assert!(matches!(pairs_from_jsonl(&bad), Err(PrevalError::BadPair { line: 1, .. })));
    }
}
