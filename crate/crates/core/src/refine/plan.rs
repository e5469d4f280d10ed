use std::collections::BTreeSet;

use serde_json::json;

use super::IssueWeightTable;
use crate::critic::{near_miss, required_height, CriticThresholds, CritiqueIssue, CritiqueList, IssueType};
use crate::edit::{Alignment, Direction, EditCommand};
use crate::render::TextMetrics;
use crate::sir::{ContentPayload, SlideDraft, CANVAS_HEIGHT, CANVAS_WIDTH, MIN_FONT_SIZE, SLIDE_BOUNDS};

/// Factor applied to the font size of an overflowing element.
pub const FONT_SHRINK: f64 = 0.9;

/// Ordered commands plus the issues that could not be turned into one.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Plan {
    pub commands: Vec<EditCommand>,
    pub skipped: Vec<String>,
}

/// Maps critiques to edits; swap in another implementation to change policy.
pub trait Planner: Send + Sync {
    fn plan(&self, critique: &CritiqueList, draft: &SlideDraft, weights: &IssueWeightTable) -> Plan;
}

/// The fixed issue → primitive rulebook.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RulebookPlanner {
    pub thresholds: CriticThresholds,
    pub metrics: TextMetrics,
}

impl Planner for RulebookPlanner {
    fn plan(&self, critique: &CritiqueList, draft: &SlideDraft, weights: &IssueWeightTable) -> Plan {
        let mut order: Vec<&CritiqueIssue> = critique.issues.iter().collect();
        // Stable: equal priorities keep the critique's own order.
        order.sort_by(|a, b| {
            let pa = weights.weight(&a.key()) * a.severity;
            let pb = weights.weight(&b.key()) * b.severity;
            pb.total_cmp(&pa)
        });
        let mut plan = Plan::default();
        let mut touched = BTreeSet::new();
        for issue in order {
            match self.rule(issue, draft) {
                Ok((cmd, moved)) => {
                    if touched.insert(moved) {
                        plan.commands.push(cmd);
                    } else {
                        plan.skipped.push(format!(
                            "{} on {}: element already edited this iteration",
                            issue.issue_type, issue.element_id
                        ));
                    }
                }
                Err(reason) => plan
                    .skipped
                    .push(format!("{} on {}: {reason}", issue.issue_type, issue.element_id)),
            }
        }
        plan
    }
}

/// Parses the word after `Align the {id} ` in a suggestion.
fn alignment_from_suggestion(issue: &CritiqueIssue) -> Option<Alignment> {
    let s = &issue.suggestion;
    if issue.target_element_id.as_deref() == Some(SLIDE_BOUNDS) {
        if s.ends_with("horizontally") {
            return Some(Alignment::CenterH);
        }
        if s.ends_with("vertically") {
            return Some(Alignment::CenterV);
        }
    }
    let rest = s.strip_prefix(&format!("Align the {} ", issue.element_id))?;
    rest.split_whitespace().next()?.parse().ok()
}

fn direction_from_suggestion(s: &str) -> Option<Direction> {
    s.split_whitespace().find_map(|w| w.parse().ok())
}

impl RulebookPlanner {
    /// Command for one issue and the id of the element it modifies.
    pub fn rule(&self, issue: &CritiqueIssue, draft: &SlideDraft) -> Result<(EditCommand, String), String> {
        let id = issue.element_id.clone();
        let el = draft.element(&id).ok_or("element not in draft")?;
        let target = issue.target_element_id.clone();
        let cmd = match issue.issue_type {
            IssueType::Overflow => {
                let fs = el.style.font_size;
                if fs > MIN_FONT_SIZE {
                    EditCommand::ChangeStyle {
                        id: id.clone(),
                        attribute: "font_size".into(),
                        value: json!((FONT_SHRINK * fs).max(MIN_FONT_SIZE)),
                    }
                } else {
                    match &el.content {
                        ContentPayload::TextBody { bullets } if required_height(el, &self.metrics) > el.geometry.h => {
                            EditCommand::DeleteBulletPoint {
                                id: id.clone(),
                                index: bullets.len() - 1,
                            }
                        }
                        _ => return Err("font already at minimum".into()),
                    }
                }
            }
            IssueType::Misalignment => {
                let target = target.ok_or("no reference element")?;
                let alignment = match alignment_from_suggestion(issue) {
                    Some(a) => a,
                    None => {
                        let other = draft.resolve_box(&target).map_err(|e| e.to_string())?;
                        let g = el.geometry;
                        near_miss(&g, &other, true, &self.thresholds)
                            .or_else(|| near_miss(&g, &other, false, &self.thresholds))
                            .and_then(|(n, _)| n.parse().ok())
                            .ok_or("no alignment relation to fix")?
                    }
                };
                EditCommand::AdjustAlignment {
                    id: id.clone(),
                    reference_id: target,
                    alignment_type: alignment.as_str().into(),
                }
            }
            IssueType::Overlap => {
                let target = target.ok_or("no other element")?;
                let other = draft.element(&target).ok_or("other element not in draft")?;
                let (a, b) = (other.geometry, el.geometry);
                let gap = self.thresholds.spacing_min_px;
                // Motion adjust_spacing(target, id, ..) would need on each axis.
                let motion = |horizontal: bool| {
                    let (la, lb) = if horizontal { (a.left(), b.left()) } else { (a.top(), b.top()) };
                    let (first, second) = if la > lb { (b, a) } else { (a, b) };
                    if horizontal {
                        (first.right() + gap - second.left()).abs()
                    } else {
                        (first.bottom() + gap - second.top()).abs()
                    }
                };
                let horizontal = motion(true) < motion(false);
                let (la, lb) = if horizontal { (a.left(), b.left()) } else { (a.top(), b.top()) };
                let moved = if la > lb { target.clone() } else { id.clone() };
                let cmd = EditCommand::AdjustSpacing {
                    id1: target,
                    id2: id,
                    target_space: gap,
                    direction: if horizontal { "horizontal" } else { "vertical" }.into(),
                };
                return Ok((cmd, moved));
            }
            IssueType::OutOfBounds => {
                let g = el.geometry;
                let axis = |lo: f64, hi: f64, limit: f64| {
                    if lo < 0.0 || hi - lo > limit {
                        -lo
                    } else if hi > limit {
                        limit - hi
                    } else {
                        0.0
                    }
                };
                EditCommand::MoveElement {
                    id: id.clone(),
                    dx: axis(g.left(), g.right(), CANVAS_WIDTH),
                    dy: axis(g.top(), g.bottom(), CANVAS_HEIGHT),
                }
            }
            IssueType::SpacingViolation => {
                let target = target.ok_or("no other element")?;
                let direction = direction_from_suggestion(&issue.suggestion).ok_or("no direction in suggestion")?;
                EditCommand::AdjustSpacing {
                    id1: target,
                    id2: id.clone(),
                    target_space: self.thresholds.spacing_min_px,
                    direction: direction.as_str().into(),
                }
            }
            IssueType::DuplicateContent => {
                let index = issue
                    .suggestion
                    .rsplit(' ')
                    .next()
                    .and_then(|w| w.parse().ok())
                    .ok_or("no bullet index in suggestion")?;
                EditCommand::DeleteBulletPoint { id: id.clone(), index }
            }
            IssueType::VerboseBullet => return Err("rewriting needs an external agent".into()),
        };
        Ok((cmd, id))
    }
}

/// Plans with the default rulebook.
pub fn plan_edits(critique: &CritiqueList, draft: &SlideDraft, weights: &IssueWeightTable) -> Vec<EditCommand> {
    RulebookPlanner::default().plan(critique, draft, weights).commands
}
