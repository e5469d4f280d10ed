//! Automatic deck assessment: handcrafted features, per-dimension scorers
//! with calibrated sigmoid normalisation, weighted aggregation, and a
//! pairwise preference trainer.

mod features;
mod stats;
mod train;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::critic::{CriticThresholds, CritiqueList};
use crate::sir::SlideDraft;

pub use features::{
    alignment_score, extract_features, whitespace_variance, FeatureVector, FEATURE_NAMES, NUM_FEATURES,
    NUM_INPUTS,
};
pub use stats::{average_ranks, correlation_report, kendall_tau_b, spearman_rho, CorrelationReport, RatedScores};
pub use train::{
    pairwise_accuracy, pairs_from_jsonl, pairs_to_jsonl, preference_gradient, preference_objective,
    ranking_loss, ranking_loss_grad, synthetic_pairs, tag_loss, tag_loss_grad, train_preference, train_ranking,
    Label, Labels, PreferencePair, TagHead, TrainConfig, TAG_VOCABULARY,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PrevalError {
    #[error("deck has no slides")]
    EmptyDeck,
    #[error("expected {0} weights, got {1}")]
    DimensionMismatch(usize, usize),
    #[error("dimension weights sum to {0}, not 1")]
    WeightSumError(f64),
    #[error("tied pairs carry no ranking signal")]
    TiePair,
    #[error("loss became non-finite at step {0}")]
    NonFiniteLoss(usize),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least 3 items, got {0}")]
    TooFew(usize),
    #[error("calibration set has no spread")]
    DegenerateCalibration,
    #[error("no training data")]
    EmptyData,
    #[error("bad model: {0}")]
    BadModel(String),
    #[error("line {line}: {reason}")]
    BadPair { line: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Content,
    Coherence,
    Design,
}

impl Dimension {
    pub const ALL: [Dimension; 3] = [Dimension::Content, Dimension::Coherence, Dimension::Design];

    pub fn as_str(self) -> &'static str {
        match self {
            Dimension::Content => "content",
            Dimension::Coherence => "coherence",
            Dimension::Design => "design",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `1/(1+e^{-z})` without overflow.
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1+e^z)` without overflow.
pub fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimensionScorer {
    pub dimension: Dimension,
    pub weights: Vec<f64>,
    /// Sigmoid scale.
    pub a: f64,
    /// Sigmoid offset.
    pub b: f64,
}

impl DimensionScorer {
    pub fn zeros(dimension: Dimension) -> Self {
        DimensionScorer {
            dimension,
            weights: vec![0.0; NUM_INPUTS],
            a: 1.0,
            b: 0.0,
        }
    }

    pub fn check(&self) -> Result<(), PrevalError> {
        if self.weights.len() != NUM_INPUTS {
            return Err(PrevalError::DimensionMismatch(NUM_INPUTS, self.weights.len()));
        }
        if self.weights.iter().any(|w| !w.is_finite()) {
            return Err(PrevalError::BadModel(format!("{} weights not finite", self.dimension)));
        }
        if !(self.a > 0.0 && self.a.is_finite() && self.b.is_finite()) {
            return Err(PrevalError::BadModel(format!("{} sigmoid needs a > 0", self.dimension)));
        }
        Ok(())
    }

    /// Pre-sigmoid score `w·x`.
    pub fn raw(&self, x: &FeatureVector) -> Result<f64, PrevalError> {
        if self.weights.len() != NUM_INPUTS {
            return Err(PrevalError::DimensionMismatch(NUM_INPUTS, self.weights.len()));
        }
        Ok(dot(&self.weights, &x.augmented()))
    }

    pub fn normalize(&self, raw: f64) -> f64 {
        sigmoid(self.a * (raw - self.b))
    }

    /// Sets `(a, b)` so the 10th and 90th percentiles of `raws` map to 0.25 and 0.75.
    pub fn calibrate(&mut self, raws: &[f64]) -> Result<(), PrevalError> {
        let mut v: Vec<f64> = raws.to_vec();
        v.sort_by(f64::total_cmp);
        let (p10, p90) = (percentile(&v, 0.1), percentile(&v, 0.9));
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if v.is_empty() || !(p90 > p10) {
            return Err(PrevalError::DegenerateCalibration);
        }
        self.b = (p10 + p90) / 2.0;
        self.a = 2.0 * 3f64.ln() / (p90 - p10);
        Ok(())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Linear-interpolated quantile of sorted data.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn score_dimension(scorer: &DimensionScorer, x: &FeatureVector) -> Result<f64, PrevalError> {
    Ok(scorer.normalize(scorer.raw(x)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityProfile {
    pub scores: BTreeMap<Dimension, f64>,
    pub aggregate: f64,
    pub dim_weights: BTreeMap<Dimension, f64>,
}

pub const EQUAL_WEIGHTS: [f64; 3] = [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0];

/// Weighted sum of dimension scores; weights must lie on the simplex.
pub fn aggregate(scores: &[f64; 3], weights: &[f64; 3]) -> Result<f64, PrevalError> {
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-9 || weights.iter().any(|w| *w < 0.0) {
        return Err(PrevalError::WeightSumError(sum));
    }
    Ok(scores.iter().zip(weights).map(|(s, w)| s * w).sum())
}

/// Scorers for the three dimensions plus the auxiliary tag head.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrevalModel {
    pub scorers: Vec<DimensionScorer>,
    pub dim_weights: [f64; 3],
    #[serde(default)]
    pub tag_head: TagHead,
}

impl Default for PrevalModel {
    /// Hand-set weights: reward alignment and moderate whitespace, punish
    /// overflow, overlap and clutter.
    fn default() -> Self {
        //          align  ws    wsvar  count  fill  ovfl  ovlap font  color bullet bias
        let content = [0.0, -0.5, 0.0, 0.5, 1.0, -2.0, -1.0, 0.5, 0.0, 1.5, 0.0];
        let coherence = [1.0, 0.0, -1.0, -0.5, 0.5, -1.5, -2.0, 0.0, -0.5, 0.5, 0.0];
        let design = [2.0, 1.0, -2.0, -0.5, -0.5, -3.0, -4.0, 0.5, -1.0, -0.5, 0.0];
        let mk = |d, w: [f64; NUM_INPUTS], b| DimensionScorer {
            dimension: d,
            weights: w.to_vec(),
            a: 4.0,
            b,
        };
        PrevalModel {
            scorers: vec![
                mk(Dimension::Content, content, 0.6),
                mk(Dimension::Coherence, coherence, 0.7),
                mk(Dimension::Design, design, 2.0),
            ],
            dim_weights: EQUAL_WEIGHTS,
            tag_head: TagHead::default(),
        }
    }
}

impl PrevalModel {
    pub fn zeros() -> Self {
        PrevalModel {
            scorers: Dimension::ALL.iter().map(|d| DimensionScorer::zeros(*d)).collect(),
            dim_weights: EQUAL_WEIGHTS,
            tag_head: TagHead::default(),
        }
    }

    pub fn check(&self) -> Result<(), PrevalError> {
        if self.scorers.len() != 3 {
            return Err(PrevalError::BadModel(format!("expected 3 scorers, got {}", self.scorers.len())));
        }
        for (s, d) in self.scorers.iter().zip(Dimension::ALL) {
            if s.dimension != d {
                return Err(PrevalError::BadModel(format!("scorer {} out of order", s.dimension)));
            }
            s.check()?;
        }
        aggregate(&[0.0; 3], &self.dim_weights)?;
        self.tag_head.check()
    }

    pub fn scorer(&self, d: Dimension) -> &DimensionScorer {
        &self.scorers[d.index()]
    }

    pub fn profile(&self, x: &FeatureVector) -> Result<QualityProfile, PrevalError> {
        let mut s = [0.0; 3];
        for d in Dimension::ALL {
            s[d.index()] = score_dimension(self.scorer(d), x)?;
        }
        let agg = aggregate(&s, &self.dim_weights)?;
        Ok(QualityProfile {
            scores: Dimension::ALL.iter().map(|d| (*d, s[d.index()])).collect(),
            aggregate: agg,
            dim_weights: Dimension::ALL.iter().map(|d| (*d, self.dim_weights[d.index()])).collect(),
        })
    }

    /// Calibrates every dimension's sigmoid on a set of feature vectors.
    pub fn calibrate(&mut self, xs: &[FeatureVector]) -> Result<(), PrevalError> {
        for s in &mut self.scorers {
            let raws = xs.iter().map(|x| s.raw(x)).collect::<Result<Vec<_>, _>>()?;
            s.calibrate(&raws)?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serialises") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, PrevalError> {
        let m: PrevalModel = serde_json::from_str(text).map_err(|e| PrevalError::BadModel(e.to_string()))?;
        m.check()?;
        Ok(m)
    }
}

/// Extract → score each dimension → normalise → weighted aggregate.
pub fn evaluate(
    deck: &[SlideDraft],
    critiques: &[CritiqueList],
    model: &PrevalModel,
    thresholds: &CriticThresholds,
) -> Result<QualityProfile, PrevalError> {
    aggregate(&[0.0; 3], &model.dim_weights)?;
    let x = extract_features(deck, critiques, thresholds)?;
    model.profile(&x)
}

/// Report rows: `deck,content,coherence,design,aggregate`.
pub fn report_csv(rows: &[(String, QualityProfile)]) -> String {
    let mut s = String::from("deck,content,coherence,design,aggregate\n");
    for (name, p) in rows {
        let get = |d| p.scores.get(&d).copied().unwrap_or(f64::NAN);
        s.push_str(&format!(
            "{name},{},{},{},{}\n",
            get(Dimension::Content),
            get(Dimension::Coherence),
            get(Dimension::Design),
            p.aggregate
        ));
    }
    s
}
