//! Document front end: Markdown to content units, and thematic clustering
//! of unit embeddings.

mod markdown;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use markdown::{
    image_id, parse_markdown, table_id, units_from_jsonl, units_to_jsonl, DocumentUnit, UnitType, VisualEntry,
    VisualMap,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IngestError {
    #[error("vector {index} has dimension {got}, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, got: usize },
    #[error("invalid cluster config: {0}")]
    BadConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClusterConfig {
    pub max_units_threshold: usize,
    pub min_pts: usize,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        ClusterConfig {
            max_units_threshold: 200,
            min_pts: 2,
        }
    }
}

pub const EPS_MIN: f64 = 0.2;
pub const EPS_MAX: f64 = 0.4;

/// `min(0.2 + 0.2·n/threshold, 0.4)`.
pub fn eps_schedule(num_units: usize, threshold: usize) -> f64 {
    (EPS_MIN + 0.2 * (num_units as f64 / threshold as f64)).min(EPS_MAX)
}

/// `1 − cos θ`. A zero vector is at distance 1 from everything else.
pub fn cosine_distance(a: &[f64], b: &[f64]) -> f64 {
    let (mut ab, mut aa, mut bb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        ab += x * y;
        aa += x * x;
        bb += y * y;
    }
    if aa == 0.0 || bb == 0.0 {
        return 1.0;
    }
    (1.0 - ab / (aa.sqrt() * bb.sqrt())).max(0.0)
}

pub const NOISE: i64 = -1;

/// Density clustering under cosine distance. Points are expanded in index
/// order, so cluster numbers follow each cluster's first core point and a
/// border point joins the earliest cluster that reaches it.
pub fn dbscan(vectors: &[Vec<f64>], eps: f64, min_pts: usize) -> Result<Vec<i64>, IngestError> {
    if let Some(first) = vectors.first() {
        let dim = first.len();
        if let Some((i, v)) = vectors.iter().enumerate().find(|(_, v)| v.len() != dim) {
            return Err(IngestError::DimensionMismatch { index: i, expected: dim, got: v.len() });
        }
    }
    let n = vectors.len();
    let neighbours = |i: usize| -> Vec<usize> {
        (0..n)
            .filter(|&j| j == i || cosine_distance(&vectors[i], &vectors[j]) <= eps)
            .collect()
    };
    let mut labels: Vec<Option<i64>> = vec![None; n];
    let mut next = 0i64;
    for p in 0..n {
        if labels[p].is_some() {
            continue;
        }
        let nb = neighbours(p);
        if nb.len() < min_pts {
            labels[p] = Some(NOISE);
            continue;
        }
        let c = next;
        next += 1;
        labels[p] = Some(c);
        let mut queue: std::collections::VecDeque<usize> = nb.into_iter().filter(|&q| q != p).collect();
        while let Some(q) = queue.pop_front() {
            match labels[q] {
                Some(NOISE) => labels[q] = Some(c),
                None => {
                    labels[q] = Some(c);
                    let nq = neighbours(q);
                    if nq.len() >= min_pts {
                        queue.extend(nq);
                    }
                }
                Some(_) => {}
            }
        }
    }
    Ok(labels.into_iter().map(|l| l.unwrap_or(NOISE)).collect())
}

/// DBSCAN with `eps` taken from the schedule for this many units.
pub fn dbscan_cluster(vectors: &[Vec<f64>], config: &ClusterConfig) -> Result<Vec<i64>, IngestError> {
    if config.max_units_threshold == 0 || config.min_pts == 0 {
        return Err(IngestError::BadConfig("threshold and min_pts must be positive".into()));
    }
    dbscan(vectors, eps_schedule(vectors.len(), config.max_units_threshold), config.min_pts)
}

/// Most frequent non-empty theme, ties to the lexicographically smallest;
/// without themes, the first five words of the first unit.
pub fn representative_theme(units: &[&DocumentUnit]) -> String {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for u in units {
        if let Some(t) = u.concise_theme.as_deref().map(str::trim).filter(|t| !t.is_empty()) {
            *counts.entry(t).or_default() += 1;
        }
    }
    if let Some((t, _)) = counts.iter().max_by_key(|(k, c)| (**c, std::cmp::Reverse(**k))) {
        return t.to_string();
    }
    units
        .first()
        .map(|u| u.text_content.split_whitespace().take(5).collect::<Vec<_>>().join(" "))
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_points() {
        assert_eq!(eps_schedule(0, 200), 0.2);
        assert_eq!(eps_schedule(200, 200), 0.4);
        assert_eq!(eps_schedule(400, 200), 0.4);
        assert!((eps_schedule(100, 200) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn trivial_clusterings() {
        let same = vec![vec![1.0, 2.0], vec![1.0, 2.0]];
        assert_eq!(dbscan(&same, 0.2, 2).unwrap(), vec![0, 0]);
        let ortho = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        assert_eq!(dbscan(&ortho, 0.2, 2).unwrap(), vec![NOISE; 3]);
        assert!(matches!(
            dbscan(&[vec![1.0], vec![1.0, 2.0]], 0.2, 2),
            Err(IngestError::DimensionMismatch { index: 1, .. })
        ));
        assert!(dbscan(&[], 0.2, 2).unwrap().is_empty());
    }

    fn unit(text: &str, theme: Option<&str>) -> DocumentUnit {
        DocumentUnit {
            unit_id: "doc_unit_001".into(),
            text_content: text.into(),
            unit_type: UnitType::Paragraph,
            concise_theme: theme.map(Into::into),
            source_visual_id: None,
        }
    }

    #[test]
    fn themes() {
        let (a, b) = (unit("x", Some("a")), unit("x", Some("b")));
        assert_eq!(representative_theme(&[&a, &a, &b]), "a");
        assert_eq!(representative_theme(&[&b, &a]), "a");
        let e = unit("one two three four five six", None);
        assert_eq!(representative_theme(&[&e]), "one two three four five");
    }
}
