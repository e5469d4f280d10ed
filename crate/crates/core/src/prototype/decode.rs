use std::cmp::Ordering;

use super::concept::ConceptFeatures;
use super::model::{LpgError, LpgModel};
use super::rules::rule_prototype;
use crate::ldl::{GrammarState, Token, MAX_SEQUENCE_LEN};

pub const DEFAULT_BEAM: usize = 5;

#[derive(Clone)]
struct Hyp {
    tokens: Vec<Token>,
    state: GrammarState,
    logp: f64,
}

impl Hyp {
    /// Mean log-probability per predicted token.
    fn score(&self) -> f64 {
        self.logp / (self.tokens.len() - 1) as f64
    }
}

/// Higher score first; ties go to the lexicographically smaller id sequence.
fn rank(a: &Hyp, b: &Hyp) -> Ordering {
    b.score()
        .total_cmp(&a.score())
        .then_with(|| a.tokens.iter().map(|t| t.id()).cmp(b.tokens.iter().map(|t| t.id())))
}

/// Length-normalised beam search from `<SOS>` under the grammar mask.
pub fn decode(
    model: &LpgModel,
    features: &ConceptFeatures,
    beam_size: usize,
    max_len: usize,
) -> Result<Vec<Token>, LpgError> {
    let beam_size = beam_size.max(1);
    let max_len = max_len.min(MAX_SEQUENCE_LEN);
    let cond = features.condition_index();
    let mut beam = vec![Hyp {
        tokens: vec![Token::SOS],
        state: GrammarState::after_sos(max_len),
        logp: 0.0,
    }];
    loop {
        if beam.iter().all(|h| h.state.is_done()) {
            break;
        }
        let mut cands: Vec<Hyp> = Vec::new();
        for h in &beam {
            if h.state.is_done() {
                cands.push(h.clone());
                continue;
            }
            let prev = *h.tokens.last().expect("non-empty");
            let lp = model.log_probs(cond, prev);
            let mask = h.state.mask();
            for (id, &ok) in mask.iter().enumerate() {
                if !ok {
                    continue;
                }
                let tok = Token::from_id(id).expect("mask covers the vocabulary");
                let mut next = h.clone();
                next.tokens.push(tok);
                next.state.advance(tok);
                next.logp += lp[id];
                cands.push(next);
            }
        }
        if cands.is_empty() {
            return Err(LpgError::DecodeFailure { max_len });
        }
        cands.sort_by(rank);
        cands.truncate(beam_size);
        beam = cands;
    }
    Ok(beam.swap_remove(0).tokens)
}

/// Step-by-step argmax under the grammar mask, lowest id on ties.
pub fn greedy_decode(model: &LpgModel, features: &ConceptFeatures, max_len: usize) -> Result<Vec<Token>, LpgError> {
    let max_len = max_len.min(MAX_SEQUENCE_LEN);
    let cond = features.condition_index();
    let mut state = GrammarState::after_sos(max_len);
    let mut tokens = vec![Token::SOS];
    while !state.is_done() {
        let lp = model.log_probs(cond, *tokens.last().expect("non-empty"));
        let mask = state.mask();
        let best = (0..mask.len())
            .filter(|&i| mask[i])
            .fold(None::<usize>, |b, i| match b {
                Some(j) if lp[j] >= lp[i] => Some(j),
                _ => Some(i),
            })
            .ok_or(LpgError::DecodeFailure { max_len })?;
        let tok = Token::from_id(best).expect("in vocabulary");
        state.advance(tok);
        tokens.push(tok);
    }
    Ok(tokens)
}

/// Beam decode, falling back to the rule template when decoding fails.
pub fn generate_prototype(
    model: &LpgModel,
    features: &ConceptFeatures,
    beam_size: usize,
    max_len: usize,
) -> (Vec<Token>, Option<String>) {
    match decode(model, features, beam_size, max_len) {
        Ok(t) => (t, None),
        Err(e) => (rule_prototype(features), Some(format!("{e}; using the rule template"))),
    }
}
