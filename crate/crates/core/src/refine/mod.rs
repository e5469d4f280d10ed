//! Critique → plan → edit refinement loop with severity-weighted priorities,
//! hill-climbing acceptance and a quality-versus-cost trace.

mod corpus;
mod plan;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::critic::{
    Critic, CriticThresholds, CritiqueList, IssueKey, LogicCriticStub, VisualCritic,
};
use crate::edit::{apply_in_place, EditCommand};
use crate::prototype::SlideConcept;
use crate::render::TextMetrics;
use crate::sir::SlideDraft;

pub use corpus::{corrupt, corruption_corpus, CorruptionConfig};
pub use plan::{plan_edits, Plan, Planner, RulebookPlanner, FONT_SHRINK};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RefinementConfig {
    pub severity_threshold: f64,
    pub max_iterations: u32,
    /// Seconds per slide.
    pub time_budget: f64,
    pub escalation_factor: f64,
    pub accept_only_improving: bool,
}

impl Default for RefinementConfig {
    fn default() -> Self {
        RefinementConfig {
            severity_threshold: 0.2,
            max_iterations: 5,
            time_budget: 30.0,
            escalation_factor: 1.5,
            accept_only_improving: true,
        }
    }
}

impl RefinementConfig {
    pub fn check(&self) -> Result<(), String> {
        if !(self.severity_threshold > 0.0 && self.severity_threshold < 1.0) {
            return Err(format!("severity_threshold {} outside (0, 1)", self.severity_threshold));
        }
        if !(self.escalation_factor >= 1.0 && self.escalation_factor.is_finite()) {
            return Err(format!("escalation_factor {} below 1", self.escalation_factor));
        }
        // Written this way so NaN is rejected too.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(self.time_budget >= 0.0) {
            return Err("time_budget must be non-negative".into());
        }
        Ok(())
    }
}

/// Per-issue weights; absent keys weigh 1.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IssueWeightTable {
    weights: BTreeMap<IssueKey, f64>,
}

impl IssueWeightTable {
    pub fn weight(&self, key: &IssueKey) -> f64 {
        self.weights.get(key).copied().unwrap_or(1.0)
    }

    pub fn set(&mut self, key: IssueKey, w: f64) {
        self.weights.insert(key, w);
    }

    /// Weights after a cycle from `before` to `after`: keys present in both
    /// are multiplied by `gamma`; keys gone from `after` are dropped.
    pub fn escalated(&self, before: &CritiqueList, after: &CritiqueList, gamma: f64) -> IssueWeightTable {
        let prev: std::collections::BTreeSet<IssueKey> = before.issues.iter().map(|i| i.key()).collect();
        let mut next = IssueWeightTable::default();
        for issue in &after.issues {
            let k = issue.key();
            if prev.contains(&k) {
                next.weights.insert(k.clone(), self.weight(&k) * gamma);
            }
        }
        next
    }
}

/// `Σ wᵢ·sᵢ`.
pub fn aggregate_severity(critique: &CritiqueList, weights: &IssueWeightTable) -> f64 {
    critique
        .issues
        .iter()
        .map(|i| weights.weight(&i.key()) * i.severity)
        .fold(0.0, |a, b| a + b)
}

/// `Σ sᵢ`, all weights 1.
pub fn raw_severity(critique: &CritiqueList) -> f64 {
    critique.issues.iter().map(|i| i.severity).fold(0.0, |a, b| a + b)
}

fn weighted_max(critique: &CritiqueList, weights: &IssueWeightTable) -> f64 {
    critique
        .issues
        .iter()
        .map(|i| weights.weight(&i.key()) * i.severity)
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub t: u32,
    /// Weighted aggregate under the weights in force at `t`.
    pub aggregate_severity: f64,
    /// Unweighted aggregate.
    pub raw_severity: f64,
    pub issues: usize,
    pub commands: usize,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    BelowThreshold,
    IterationLimit,
    TimeBudget,
    NothingToPlan,
    NoImprovement,
}

#[derive(Debug, Clone)]
pub struct Refinement {
    pub draft: SlideDraft,
    pub trace: Vec<TraceRecord>,
    /// Critique of each accepted draft, index = t.
    pub critiques: Vec<CritiqueList>,
    /// Successfully applied commands of accepted iterations, in order.
    pub commands: Vec<EditCommand>,
    pub stop: StopReason,
    pub notes: Vec<String>,
}

/// The loop's collaborators.
pub struct Refiner<'a> {
    pub critics: Vec<&'a dyn Critic>,
    pub planner: &'a dyn Planner,
    pub config: RefinementConfig,
}

impl Refiner<'_> {
    pub fn critique(&self, draft: &SlideDraft, concept: Option<&SlideConcept>) -> CritiqueList {
        let mut issues = Vec::new();
        for c in &self.critics {
            issues.extend(c.critique(draft, concept));
        }
        CritiqueList::new(issues, draft.iteration())
    }

    pub fn run(&self, initial: &SlideDraft, concept: Option<&SlideConcept>) -> Refinement {
        let start = Instant::now();
        let cfg = &self.config;
        let budget = Duration::from_secs_f64(cfg.time_budget.max(0.0));
        let mut draft = initial.clone();
        let mut crit = self.critique(&draft, concept);
        let mut weights = IssueWeightTable::default();
        let ms = |s: Instant| s.elapsed().as_secs_f64() * 1e3;
        let mut out = Refinement {
            draft: initial.clone(),
            trace: vec![TraceRecord {
                t: draft.iteration(),
                aggregate_severity: aggregate_severity(&crit, &weights),
                raw_severity: raw_severity(&crit),
                issues: crit.len(),
                commands: 0,
                elapsed_ms: ms(start),
            }],
            critiques: vec![crit.clone()],
            commands: Vec::new(),
            stop: StopReason::BelowThreshold,
            notes: Vec::new(),
        };
        let mut t = 0u32;
        let stop = loop {
            if weighted_max(&crit, &weights) < cfg.severity_threshold {
                break StopReason::BelowThreshold;
            }
            if t >= cfg.max_iterations {
                break StopReason::IterationLimit;
            }
            if start.elapsed() > budget {
                break StopReason::TimeBudget;
            }
            let plan = self.planner.plan(&crit, &draft, &weights);
            out.notes.extend(plan.skipped.iter().map(|s| format!("t={t}: skipped {s}")));
            let mut candidate = draft.clone();
            let mut applied = Vec::new();
            for cmd in plan.commands {
                match apply_in_place(&mut candidate, &cmd) {
                    Ok(()) => applied.push(cmd),
                    Err(e) => out.notes.push(format!("t={t}: {} failed: {e}", cmd.primitive())),
                }
            }
            if applied.is_empty() {
                break StopReason::NothingToPlan;
            }
            candidate.set_iteration(draft.iteration() + 1);
            let next_crit = self.critique(&candidate, concept);
            let next_weights = weights.escalated(&crit, &next_crit, cfg.escalation_factor);
            let before = aggregate_severity(&crit, &weights);
            let after = aggregate_severity(&next_crit, &next_weights);
            if cfg.accept_only_improving && !(after < before && raw_severity(&next_crit) <= raw_severity(&crit)) {
                out.notes.push(format!("t={t}: candidate rejected ({after} vs {before})"));
                break StopReason::NoImprovement;
            }
            t += 1;
            draft = candidate;
            crit = next_crit;
            weights = next_weights;
            out.trace.push(TraceRecord {
                t: draft.iteration(),
                aggregate_severity: after,
                raw_severity: raw_severity(&crit),
                issues: crit.len(),
                commands: applied.len(),
                elapsed_ms: ms(start),
            });
            out.critiques.push(crit.clone());
            out.commands.extend(applied);
        };
        out.stop = stop;
        out.draft = draft;
        out
    }
}

/// Refines with the geometric visual critic, the logic stub and the rulebook.
pub fn refine(
    draft: &SlideDraft,
    concept: Option<&SlideConcept>,
    config: &RefinementConfig,
    thresholds: &CriticThresholds,
) -> Refinement {
    let visual = VisualCritic {
        thresholds: *thresholds,
        metrics: TextMetrics::default(),
    };
    let planner = RulebookPlanner {
        thresholds: *thresholds,
        metrics: TextMetrics::default(),
    };
    Refiner {
        critics: vec![&visual, &LogicCriticStub],
        planner: &planner,
        config: *config,
    }
    .run(draft, concept)
}

/// Trace rows as CSV. Timings are written as 0 unless `timings` is set, so
/// that output files stay byte-stable.
pub fn trace_csv(trace: &[TraceRecord], timings: bool) -> String {
    let mut s = String::from("t,aggregate_severity,issues,commands,ms\n");
    for r in trace {
        let ms = if timings { r.elapsed_ms } else { 0.0 };
        let _ = writeln!(s, "{},{},{},{},{}", r.t, r.aggregate_severity, r.issues, r.commands, ms);
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QualityCostRow {
    pub k: u32,
    pub mean_severity: f64,
    pub mean_ms: f64,
}

/// Mean final unweighted severity and elapsed time for every budget
/// `K = 0..=k_max`. Each draft is refined once with `K = k_max` and the
/// row for `K` read off the trace prefix, which is what a separate run
/// with `max_iterations = K` would produce.
pub fn quality_cost_trace(
    corpus: &[(SlideDraft, Option<SlideConcept>)],
    config: &RefinementConfig,
    thresholds: &CriticThresholds,
    k_max: u32,
) -> Vec<QualityCostRow> {
    use rayon::prelude::*;
    let cfg = RefinementConfig {
        max_iterations: k_max,
        ..*config
    };
    let runs: Vec<Refinement> = corpus
        .par_iter()
        .map(|(d, c)| refine(d, c.as_ref(), &cfg, thresholds))
        .collect();
    let n = corpus.len().max(1) as f64;
    (0..=k_max)
        .map(|k| {
            let (mut sev, mut ms) = (0.0, 0.0);
            for r in &runs {
                let rec = &r.trace[(k as usize).min(r.trace.len() - 1)];
                sev += rec.raw_severity;
                ms += rec.elapsed_ms;
            }
            QualityCostRow {
                k,
                mean_severity: sev / n,
                mean_ms: ms / n,
            }
        })
        .collect()
}

pub fn quality_cost_csv(rows: &[QualityCostRow], timings: bool) -> String {
    let mut s = String::from("K,severity,ms\n");
    for r in rows {
        let ms = if timings { r.mean_ms } else { 0.0 };
        let _ = writeln!(s, "{},{},{}", r.k, r.mean_severity, ms);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::critic::{CritiqueIssue, IssueType};

    #[test]
    fn aggregate_is_weighted_sum() {
        let list = CritiqueList::new(
            vec![
                CritiqueIssue::new("title", IssueType::Misalignment, 0.75, Some("slide_bounds"), "x"),
                CritiqueIssue::new("bullet_list", IssueType::Overflow, 0.9, None, "y"),
            ],
            0,
        );
        let w = IssueWeightTable::default();
        assert!((aggregate_severity(&list, &w) - 1.65).abs() < 1e-12);
        assert_eq!(aggregate_severity(&CritiqueList::default(), &w), 0.0);
        let one = CritiqueList::new(vec![CritiqueIssue::new("b", IssueType::Overflow, 0.4, None, "y")], 0);
        let mut w = IssueWeightTable::default();
        w.set(one.issues[0].key(), 1.5);
        assert!((aggregate_severity(&one, &w) - 0.6).abs() < 1e-12);
    }

    #[test]
    fn escalation_compounds_and_resets() {
        let a = CritiqueList::new(vec![CritiqueIssue::new("b", IssueType::Overflow, 0.4, None, "y")], 0);
        let empty = CritiqueList::default();
        let mut w = IssueWeightTable::default();
        for n in 1..=3 {
            w = w.escalated(&a, &a, 1.5);
            assert_eq!(w.weight(&a.issues[0].key()), 1.5f64.powi(n));
        }
        w = w.escalated(&a, &empty, 1.5);
        assert_eq!(w.weight(&a.issues[0].key()), 1.0);
    }

    #[test]
    fn csv_columns() {
        let rows = [QualityCostRow { k: 0, mean_severity: 1.5, mean_ms: 3.0 }];
        assert_eq!(quality_cost_csv(&rows, false), "K,severity,ms\n0,1.5,0\n");
    }
}
