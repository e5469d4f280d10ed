use serde::{Deserialize, Serialize};

use super::{Dimension, PrevalError, QualityProfile};

/// Scores for one deck along every dimension plus the overall score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatedScores {
    pub content: f64,
    pub coherence: f64,
    pub design: f64,
    pub overall: f64,
}

impl From<&QualityProfile> for RatedScores {
    fn from(p: &QualityProfile) -> Self {
        let get = |d| p.scores.get(&d).copied().unwrap_or(f64::NAN);
        RatedScores {
            content: get(Dimension::Content),
            coherence: get(Dimension::Coherence),
            design: get(Dimension::Design),
            overall: p.aggregate,
        }
    }
}

impl RatedScores {
    fn columns(rows: &[RatedScores]) -> [Vec<f64>; 4] {
        [
            rows.iter().map(|r| r.content).collect(),
            rows.iter().map(|r| r.coherence).collect(),
            rows.iter().map(|r| r.design).collect(),
            rows.iter().map(|r| r.overall).collect(),
        ]
    }
}

/// 1-based ranks, ties receiving the mean of the ranks they span.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        return f64::NAN;
    }
    sab / (saa * sbb).sqrt()
}

fn check_lengths(a: &[f64], b: &[f64]) -> Result<(), PrevalError> {
    if a.len() != b.len() {
        return Err(PrevalError::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 3 {
        return Err(PrevalError::TooFew(a.len()));
    }
    Ok(())
}

/// Pearson correlation of average ranks. NaN when either side is constant.
pub fn spearman_rho(a: &[f64], b: &[f64]) -> Result<f64, PrevalError> {
    check_lengths(a, b)?;
    Ok(pearson(&average_ranks(a), &average_ranks(b)))
}

/// Kendall's tau-b, which corrects for ties on either side.
pub fn kendall_tau_b(a: &[f64], b: &[f64]) -> Result<f64, PrevalError> {
    check_lengths(a, b)?;
    let (mut conc, mut disc, mut tie_a, mut tie_b) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let da = (a[i] - a[j]).partial_cmp(&0.0).map_or(0, |o| o as i64);
            let db = (b[i] - b[j]).partial_cmp(&0.0).map_or(0, |o| o as i64);
            match (da, db) {
                (0, 0) => {}
                (0, _) => tie_a += 1,
                (_, 0) => tie_b += 1,
                _ if da == db => conc += 1,
                _ => disc += 1,
            }
        }
    }
    let n0 = (conc + disc) as f64;
    let denom = ((n0 + tie_a as f64) * (n0 + tie_b as f64)).sqrt();
    Ok(if denom == 0.0 { f64::NAN } else { (conc - disc) as f64 / denom })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationReport {
    /// Per column: content, coherence, design, overall.
    pub spearman_rho: [f64; 4],
    pub kendall_tau: [f64; 4],
}

pub fn correlation_report(profiles: &[QualityProfile], human: &[RatedScores]) -> Result<CorrelationReport, PrevalError> {
    if profiles.len() != human.len() {
        return Err(PrevalError::LengthMismatch(profiles.len(), human.len()));
    }
    let ours: Vec<RatedScores> = profiles.iter().map(RatedScores::from).collect();
    let (a, b) = (RatedScores::columns(&ours), RatedScores::columns(human));
    let mut out = CorrelationReport {
        spearman_rho: [0.0; 4],
        kendall_tau: [0.0; 4],
    };
    for k in 0..4 {
        out.spearman_rho[k] = spearman_rho(&a[k], &b[k])?;
        out.kendall_tau[k] = kendall_tau_b(&a[k], &b[k])?;
    }
    Ok(out)
}
