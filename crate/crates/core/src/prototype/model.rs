use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::concept::{ConceptFeatures, NUM_CONDITIONS};
use crate::ldl::{lex, validate, Token, VOCAB_SIZE};

pub const DEFAULT_L2: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpgError {
    #[error("training loss is not finite at step {step}")]
    NonFiniteLoss { step: usize },
    #[error("no grammatical completion within {max_len} tokens")]
    DecodeFailure { max_len: usize },
    #[error("empty training set")]
    EmptyData,
    #[error("invalid model file: {0}")]
    BadModel(String),
    #[error("invalid training pair on line {line}: {reason}")]
    BadPair { line: usize, reason: String },
}

/// One training example: features and the target token sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingPair {
    pub features: ConceptFeatures,
    pub target: Vec<Token>,
}

impl TrainingPair {
    /// Fails unless `target` is grammatical.
    pub fn new(features: ConceptFeatures, target: Vec<Token>) -> Result<Self, String> {
        if let Some(v) = validate(&target).into_iter().next() {
            return Err(format!("target is not valid: {} at {}", v.reason, v.position));
        }
        Ok(TrainingPair { features, target })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairRepr {
    features: ConceptFeatures,
    target: String,
}

/// Parses a JSONL training corpus; blank lines are skipped.
pub fn pairs_from_jsonl(text: &str) -> Result<Vec<TrainingPair>, LpgError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |reason: String| LpgError::BadPair { line: i + 1, reason };
        let repr: PairRepr = serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
        let target = lex(&repr.target).map_err(|e| bad(e.to_string()))?;
        out.push(TrainingPair::new(repr.features, target).map_err(bad)?);
    }
    Ok(out)
}

pub fn pairs_to_jsonl(pairs: &[TrainingPair]) -> String {
    let mut out = String::new();
    for p in pairs {
        let target: Vec<&str> = p.target.iter().map(|t| t.name()).collect();
        let repr = PairRepr {
            features: p.features,
            target: target.join(" "),
        };
        out.push_str(&serde_json::to_string(&repr).expect("pair serializes"));
        out.push('\n');
    }
    out
}

/// Conditional first-order token model: `logits[c][prev][next]`.
///
/// Rows are stored sparsely; a missing row is all zeros.
#[derive(Debug, Clone)]
pub struct LpgModel {
    pub l2_coeff: f64,
    rows: Vec<Option<Box<[f64]>>>,
}

impl PartialEq for LpgModel {
    fn eq(&self, other: &Self) -> bool {
        self.l2_coeff == other.l2_coeff
            && (0..self.rows.len()).all(|r| self.row_or_zero(r) == other.row_or_zero(r))
    }
}

const ZERO_ROW: [f64; VOCAB_SIZE] = [0.0; VOCAB_SIZE];

fn row_index(cond: usize, prev: usize) -> usize {
    cond * VOCAB_SIZE + prev
}

impl Default for LpgModel {
    fn default() -> Self {
        LpgModel::new(DEFAULT_L2)
    }
}

impl LpgModel {
    /// All-zero model.
    pub fn new(l2_coeff: f64) -> Self {
        LpgModel {
            l2_coeff,
            rows: vec![None; NUM_CONDITIONS * VOCAB_SIZE],
        }
    }

    fn row_or_zero(&self, r: usize) -> &[f64] {
        self.rows[r].as_deref().unwrap_or(&ZERO_ROW)
    }

    pub fn row(&self, cond: usize, prev: usize) -> &[f64] {
        self.row_or_zero(row_index(cond, prev))
    }

    pub fn row_mut(&mut self, cond: usize, prev: usize) -> &mut [f64] {
        self.rows[row_index(cond, prev)].get_or_insert_with(|| ZERO_ROW.into())
    }

    pub fn get(&self, cond: usize, prev: usize, next: usize) -> f64 {
        self.row(cond, prev)[next]
    }

    pub fn set(&mut self, cond: usize, prev: usize, next: usize, v: f64) {
        self.row_mut(cond, prev)[next] = v;
    }

    /// `||θ||²`.
    pub fn sq_norm(&self) -> f64 {
        self.rows
            .iter()
            .flatten()
            .map(|r| r.iter().map(|v| v * v).sum::<f64>())
            .sum()
    }

    /// `log softmax(θ[cond][prev])`.
    pub fn log_probs(&self, cond: usize, prev: Token) -> [f64; VOCAB_SIZE] {
        log_softmax(self.row(cond, prev.id()))
    }

    /// `−Σ_t log P(l_t | l_{t−1}, f)` over every position after `<SOS>`.
    pub fn nll(&self, pair: &TrainingPair) -> f64 {
        let c = pair.features.condition_index();
        pair.target
            .windows(2)
            .map(|w| -self.log_probs(c, w[0])[w[1].id()])
            .sum()
    }

    /// `mean nll + α‖θ‖²`.
    pub fn objective(&self, data: &[TrainingPair]) -> f64 {
        let mean = data.iter().map(|p| self.nll(p)).sum::<f64>() / data.len() as f64;
        mean + self.l2_coeff * self.sq_norm()
    }

    /// Gradient of the mean nll only, keyed by row; the L2 part is `2αθ`.
    fn data_gradient(&self, data: &[TrainingPair]) -> BTreeMap<usize, Box<[f64]>> {
        let scale = 1.0 / data.len() as f64;
        let mut grad: BTreeMap<usize, Box<[f64]>> = BTreeMap::new();
        for p in data {
            let c = p.features.condition_index();
            for w in p.target.windows(2) {
                let r = row_index(c, w[0].id());
                let lp = log_softmax(self.row_or_zero(r));
                let g = grad.entry(r).or_insert_with(|| ZERO_ROW.into());
                for (k, l) in lp.iter().enumerate() {
                    g[k] += scale * l.exp();
                }
                g[w[1].id()] -= scale;
            }
        }
        grad
    }

    /// Gradient of [`LpgModel::objective`] at one coordinate.
    pub fn gradient_at(&self, data: &[TrainingPair], cond: usize, prev: usize, next: usize) -> f64 {
        let r = row_index(cond, prev);
        let d = self.data_gradient(data).get(&r).map_or(0.0, |g| g[next]);
        d + 2.0 * self.l2_coeff * self.get(cond, prev, next)
    }

    /// One plain gradient-descent step on the objective.
    fn step(&mut self, data: &[TrainingPair], lr: f64) {
        let grad = self.data_gradient(data);
        let shrink = 1.0 - 2.0 * lr * self.l2_coeff;
        for (r, row) in self.rows.iter_mut().enumerate() {
            match (row.as_mut(), grad.get(&r)) {
                (Some(row), g) => {
                    for (k, v) in row.iter_mut().enumerate() {
                        *v = *v * shrink - lr * g.map_or(0.0, |g| g[k]);
                    }
                }
                (None, Some(g)) => {
                    *row = Some(g.iter().map(|gk| -lr * gk).collect());
                }
                (None, None) => {}
            }
        }
    }

    /// Runs `steps` gradient-descent steps and returns the objective before
    /// each step followed by the final objective.
    pub fn train(&mut self, data: &[TrainingPair], steps: usize, lr: f64) -> Result<Vec<f64>, LpgError> {
        if data.is_empty() {
            return Err(LpgError::EmptyData);
        }
        let mut losses = Vec::with_capacity(steps + 1);
        for step in 0..=steps {
            let loss = self.objective(data);
            if !loss.is_finite() {
                return Err(LpgError::NonFiniteLoss { step });
            }
            losses.push(loss);
            if step < steps {
                self.step(data, lr);
            }
        }
        Ok(losses)
    }

    pub fn to_json(&self) -> String {
        let logits: Vec<Vec<Option<&[f64]>>> = (0..NUM_CONDITIONS)
            .map(|c| {
                (0..VOCAB_SIZE)
                    .map(|p| {
                        self.rows[row_index(c, p)]
                            .as_deref()
                            .filter(|r| r.iter().any(|v| *v != 0.0))
                    })
                    .collect()
            })
            .collect();
        let repr = serde_json::json!({
            "l2_coeff": self.l2_coeff,
            "conditions": NUM_CONDITIONS,
            "vocab": VOCAB_SIZE,
            "logits": logits,
        });
        let mut s = serde_json::to_string(&repr).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, LpgError> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Repr {
            l2_coeff: f64,
            conditions: usize,
            vocab: usize,
            logits: Vec<Vec<Option<Vec<f64>>>>,
        }
        let bad = |m: String| LpgError::BadModel(m);
        let repr: Repr = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        if repr.conditions != NUM_CONDITIONS || repr.vocab != VOCAB_SIZE {
            return Err(bad(format!(
                "expected {NUM_CONDITIONS} conditions and {VOCAB_SIZE} tokens, got {} and {}",
                repr.conditions, repr.vocab
            )));
        }
        if !repr.l2_coeff.is_finite() || repr.l2_coeff < 0.0 {
            return Err(bad("l2_coeff must be finite and non-negative".into()));
        }
        if repr.logits.len() != NUM_CONDITIONS {
            return Err(bad(format!("logits has {} conditions", repr.logits.len())));
        }
        let mut model = LpgModel::new(repr.l2_coeff);
        for (c, rows) in repr.logits.into_iter().enumerate() {
            if rows.len() != VOCAB_SIZE {
                return Err(bad(format!("logits[{c}] has {} rows", rows.len())));
            }
            for (p, row) in rows.into_iter().enumerate() {
                let Some(row) = row else { continue };
                if row.len() != VOCAB_SIZE {
                    return Err(bad(format!("logits[{c}][{p}] has {} entries", row.len())));
                }
                if row.iter().any(|v| !v.is_finite()) {
                    return Err(bad(format!("logits[{c}][{p}] has a non-finite entry")));
                }
                model.rows[row_index(c, p)] = Some(row.into_boxed_slice());
            }
        }
        Ok(model)
    }
}

pub fn log_softmax(row: &[f64]) -> [f64; VOCAB_SIZE] {
    let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + row.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
    let mut out = [0.0; VOCAB_SIZE];
    for (o, v) in out.iter_mut().zip(row) {
        *o = v - lse;
    }
    out
}
