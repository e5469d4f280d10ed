//! Structured critiques: a geometric visual critic, a rule-based logic
//! critic and the interface both implement.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geom::Rect;
use crate::prototype::SlideConcept;
use crate::render::{layout_text, TextMetrics};
use crate::sir::{canvas_rect, ContentPayload, SlideDraft, SlideElement, SLIDE_BOUNDS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IssueType {
    Overlap,
    Misalignment,
    Overflow,
    OutOfBounds,
    SpacingViolation,
    #[serde(rename = "verbose_bullet")]
    VerboseBullet,
    #[serde(rename = "duplicate_content")]
    DuplicateContent,
}

impl IssueType {
    pub fn as_str(self) -> &'static str {
        match self {
            IssueType::Overlap => "Overlap",
            IssueType::Misalignment => "Misalignment",
            IssueType::Overflow => "Overflow",
            IssueType::OutOfBounds => "OutOfBounds",
            IssueType::SpacingViolation => "SpacingViolation",
            IssueType::VerboseBullet => "verbose_bullet",
            IssueType::DuplicateContent => "duplicate_content",
        }
    }
}

impl fmt::Display for IssueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CritiqueIssue {
    pub element_id: String,
    pub issue_type: IssueType,
    pub severity: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_element_id: Option<String>,
    pub suggestion: String,
}

impl CritiqueIssue {
    pub fn new(
        element_id: impl Into<String>,
        issue_type: IssueType,
        severity: f64,
        target: Option<&str>,
        suggestion: impl Into<String>,
    ) -> Self {
        CritiqueIssue {
            element_id: element_id.into(),
            issue_type,
            severity: clamp_unit(severity),
            target_element_id: target.map(str::to_string),
            suggestion: suggestion.into(),
        }
    }

    /// Identity of an issue across iterations.
    pub fn key(&self) -> IssueKey {
        IssueKey {
            element_id: self.element_id.clone(),
            issue_type: self.issue_type,
            target: self.target_element_id.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IssueKey {
    pub element_id: String,
    pub issue_type: IssueType,
    pub target: Option<String>,
}

fn clamp_unit(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, 1.0)
    }
}

/// Severity descending, then element id, issue type and target ascending.
pub fn issue_order(a: &CritiqueIssue, b: &CritiqueIssue) -> Ordering {
    b.severity
        .total_cmp(&a.severity)
        .then_with(|| a.element_id.cmp(&b.element_id))
        .then_with(|| a.issue_type.cmp(&b.issue_type))
        .then_with(|| a.target_element_id.cmp(&b.target_element_id))
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CritiqueList {
    pub issues: Vec<CritiqueIssue>,
    #[serde(skip)]
    pub draft_iteration: u32,
}

impl CritiqueList {
    pub fn new(mut issues: Vec<CritiqueIssue>, draft_iteration: u32) -> Self {
        issues.sort_by(issue_order);
        CritiqueList {
            issues,
            draft_iteration,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn len(&self) -> usize {
        self.issues.len()
    }

    /// Union of two lists, re-sorted.
    pub fn merge(mut self, other: CritiqueList) -> CritiqueList {
        self.issues.extend(other.issues);
        CritiqueList::new(self.issues, self.draft_iteration)
    }

    /// Pretty JSON in the `{"issues": [...]}` shape, newline-terminated.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("critique serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<CritiqueList, String> {
        let list: CritiqueList = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if let Some(i) = list.issues.iter().find(|i| !(0.0..=1.0).contains(&i.severity)) {
            return Err(format!("severity {} outside [0, 1]", i.severity));
        }
        Ok(CritiqueList::new(list.issues, 0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CriticThresholds {
    pub overlap_min_area_px2: f64,
    pub align_tolerance_px: f64,
    pub guide_snap_px: f64,
    pub spacing_min_px: f64,
}

impl Default for CriticThresholds {
    fn default() -> Self {
        CriticThresholds {
            overlap_min_area_px2: 64.0,
            align_tolerance_px: 4.0,
            guide_snap_px: 8.0,
            spacing_min_px: 12.0,
        }
    }
}

impl CriticThresholds {
    pub fn check(&self) -> Result<(), String> {
        let all = [
            self.overlap_min_area_px2,
            self.align_tolerance_px,
            self.guide_snap_px,
            self.spacing_min_px,
        ];
        if all.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err("critic thresholds must be positive".into());
        }
        if self.guide_snap_px <= self.align_tolerance_px {
            return Err("guide_snap_px must exceed align_tolerance_px".into());
        }
        Ok(())
    }
}

/// Anything that can critique a draft.
pub trait Critic: Send + Sync {
    fn critique(&self, draft: &SlideDraft, concept: Option<&SlideConcept>) -> Vec<CritiqueIssue>;
}

/// Of two elements, the one painted on top: higher z, then later id.
fn upper<'a>(a: &'a SlideElement, b: &'a SlideElement) -> (&'a SlideElement, &'a SlideElement) {
    if (a.z_order, &a.id) >= (b.z_order, &b.id) {
        (a, b)
    } else {
        (b, a)
    }
}

fn pairs(draft: &SlideDraft) -> impl Iterator<Item = (&SlideElement, &SlideElement)> {
    let els = draft.elements();
    (0..els.len()).flat_map(move |i| (i + 1..els.len()).map(move |j| (&els[i], &els[j])))
}

pub fn detect_overlap(draft: &SlideDraft, t: &CriticThresholds) -> Vec<CritiqueIssue> {
    let mut out = Vec::new();
    for (a, b) in pairs(draft) {
        let inter = a.geometry.intersection_area(&b.geometry);
        if inter > t.overlap_min_area_px2 {
            let denom = a.geometry.area().min(b.geometry.area());
            let (top, other) = upper(a, b);
            out.push(CritiqueIssue::new(
                &top.id,
                IssueType::Overlap,
                inter / denom,
                Some(&other.id),
                format!("Separate the {} from the {}", top.id, other.id),
            ));
        }
    }
    out
}

/// Alignment relations on one axis: (name, coordinate of a, coordinate of b).
fn relations(a: &Rect, b: &Rect, horizontal: bool) -> [(&'static str, f64, f64); 3] {
    if horizontal {
        [
            ("left", a.left(), b.left()),
            ("right", a.right(), b.right()),
            ("center_h", a.center_x(), b.center_x()),
        ]
    } else {
        [
            ("top", a.top(), b.top()),
            ("bottom", a.bottom(), b.bottom()),
            ("center_v", a.center_y(), b.center_y()),
        ]
    }
}

/// Smallest near-miss on an axis: `None` when the pair is already aligned
/// on that axis or no relation falls in `(tolerance, snap]`.
pub fn near_miss(a: &Rect, b: &Rect, horizontal: bool, t: &CriticThresholds) -> Option<(&'static str, f64)> {
    let rels = relations(a, b, horizontal);
    if rels.iter().any(|(_, x, y)| (x - y).abs() <= t.align_tolerance_px) {
        return None;
    }
    rels.iter()
        .map(|(n, x, y)| (*n, (x - y).abs()))
        .filter(|(_, d)| *d <= t.guide_snap_px)
        .min_by(|x, y| x.1.total_cmp(&y.1))
}

fn misalignment_severity(d: f64, t: &CriticThresholds) -> f64 {
    0.5 + 0.5 * (d - t.align_tolerance_px) / (t.guide_snap_px - t.align_tolerance_px)
}

pub fn detect_misalignment(draft: &SlideDraft, t: &CriticThresholds) -> Vec<CritiqueIssue> {
    let mut out = Vec::new();
    let slide = canvas_rect();
    for el in draft.elements() {
        let g = el.geometry;
        for (horizontal, word) in [(true, "horizontally"), (false, "vertically")] {
            let d = if horizontal {
                (g.center_x() - slide.center_x()).abs()
            } else {
                (g.center_y() - slide.center_y()).abs()
            };
            if d > t.align_tolerance_px && d <= t.guide_snap_px {
                out.push(CritiqueIssue::new(
                    &el.id,
                    IssueType::Misalignment,
                    misalignment_severity(d, t),
                    Some(SLIDE_BOUNDS),
                    format!("Center the {} {word}", el.id),
                ));
            }
        }
    }
    for (a, b) in pairs(draft) {
        let (mover, anchor) = upper(a, b);
        let (ga, gb) = (mover.geometry, anchor.geometry);
        for horizontal in [true, false] {
            let shares = if horizontal { ga.shares_column(&gb) } else { ga.shares_band(&gb) };
            if !shares {
                continue;
            }
            if let Some((name, d)) = near_miss(&ga, &gb, horizontal, t) {
                out.push(CritiqueIssue::new(
                    &mover.id,
                    IssueType::Misalignment,
                    misalignment_severity(d, t),
                    Some(&anchor.id),
                    format!("Align the {} {name} with the {}", mover.id, anchor.id),
                ));
            }
        }
    }
    out
}

/// Text height an element needs under `metrics`; zero for non-text content.
pub fn required_height(el: &SlideElement, metrics: &TextMetrics) -> f64 {
    if el.content.is_text() {
        layout_text(el, metrics).required_height
    } else {
        0.0
    }
}

pub const OVERFLOW_SUGGESTION: &str = "Reduce font size or content length";

pub fn detect_overflow(draft: &SlideDraft, metrics: &TextMetrics) -> Vec<CritiqueIssue> {
    let mut out = Vec::new();
    for el in draft.elements() {
        let need = required_height(el, metrics);
        let h = el.geometry.h;
        if need > h {
            out.push(CritiqueIssue::new(
                &el.id,
                IssueType::Overflow,
                ((need - h) / h).min(1.0),
                None,
                OVERFLOW_SUGGESTION,
            ));
        }
    }
    out
}

pub fn detect_out_of_bounds(draft: &SlideDraft) -> Vec<CritiqueIssue> {
    let slide = canvas_rect();
    let mut out = Vec::new();
    for el in draft.elements() {
        let g = el.geometry;
        if slide.contains(&g) {
            continue;
        }
        let area = g.area();
        let outside = area - g.intersection_area(&slide);
        out.push(CritiqueIssue::new(
            &el.id,
            IssueType::OutOfBounds,
            outside / area,
            Some(SLIDE_BOUNDS),
            format!("Move the {} inside the slide", el.id),
        ));
    }
    out
}

/// Pairs that sit side by side (or stacked) closer than the minimum gap
/// without overlapping beyond the overlap threshold.
pub fn detect_spacing(draft: &SlideDraft, t: &CriticThresholds) -> Vec<CritiqueIssue> {
    let mut out = Vec::new();
    for (a, b) in pairs(draft) {
        let (ga, gb) = (a.geometry, b.geometry);
        if ga.intersection_area(&gb) > t.overlap_min_area_px2 {
            continue;
        }
        for horizontal in [true, false] {
            let shares = if horizontal { ga.shares_band(&gb) } else { ga.shares_column(&gb) };
            if !shares {
                continue;
            }
            // The later element along the axis, as adjust_spacing would move it.
            let (lead_a, lead_b) = if horizontal { (ga.left(), gb.left()) } else { (ga.top(), gb.top()) };
            let (first, second) = if lead_a > lead_b { (b, a) } else { (a, b) };
            let gap = if horizontal {
                second.geometry.left() - first.geometry.right()
            } else {
                second.geometry.top() - first.geometry.bottom()
            };
            if gap < t.spacing_min_px {
                let dir = if horizontal { "horizontal" } else { "vertical" };
                out.push(CritiqueIssue::new(
                    &second.id,
                    IssueType::SpacingViolation,
                    (t.spacing_min_px - gap.max(0.0)) / t.spacing_min_px,
                    Some(&first.id),
                    format!("Increase {dir} spacing between the {} and the {}", first.id, second.id),
                ));
            }
        }
    }
    out
}

/// Geometric stand-in for a visual critic.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VisualCritic {
    pub thresholds: CriticThresholds,
    pub metrics: TextMetrics,
}

impl Critic for VisualCritic {
    fn critique(&self, draft: &SlideDraft, _: Option<&SlideConcept>) -> Vec<CritiqueIssue> {
        let mut v = detect_overlap(draft, &self.thresholds);
        v.extend(detect_misalignment(draft, &self.thresholds));
        v.extend(detect_overflow(draft, &self.metrics));
        v.extend(detect_out_of_bounds(draft));
        v.extend(detect_spacing(draft, &self.thresholds));
        v
    }
}

pub fn visual_critic(draft: &SlideDraft, thresholds: &CriticThresholds) -> CritiqueList {
    let c = VisualCritic {
        thresholds: *thresholds,
        metrics: TextMetrics::default(),
    };
    CritiqueList::new(c.critique(draft, None), draft.iteration())
}

pub const VERBOSE_WORDS: usize = 30;

/// Deterministic checks on bullet text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LogicCriticStub;

impl Critic for LogicCriticStub {
    fn critique(&self, draft: &SlideDraft, _: Option<&SlideConcept>) -> Vec<CritiqueIssue> {
        let mut out = Vec::new();
        let mut seen: HashMap<&str, &str> = HashMap::new();
        for el in draft.elements() {
            let ContentPayload::TextBody { bullets } = &el.content else { continue };
            for (i, b) in bullets.iter().enumerate() {
                let words = b.split_whitespace().count();
                if words > VERBOSE_WORDS {
                    out.push(CritiqueIssue::new(
                        &el.id,
                        IssueType::VerboseBullet,
                        0.4,
                        None,
                        format!("Shorten bullet {i} ({words} words)"),
                    ));
                }
                match seen.get(b.as_str()) {
                    Some(first) => out.push(CritiqueIssue::new(
                        &el.id,
                        IssueType::DuplicateContent,
                        0.6,
                        Some(first),
                        format!("Remove duplicate bullet {i}"),
                    )),
                    None => {
                        seen.insert(b, &el.id);
                    }
                }
            }
        }
        out
    }
}

pub fn logic_critic_stub(draft: &SlideDraft, concept: Option<&SlideConcept>) -> CritiqueList {
    CritiqueList::new(LogicCriticStub.critique(draft, concept), draft.iteration())
}

/// Visual and logic critiques merged.
pub fn full_critique(draft: &SlideDraft, concept: Option<&SlideConcept>, t: &CriticThresholds) -> CritiqueList {
    visual_critic(draft, t).merge(logic_critic_stub(draft, concept))
}
