//! Turns a parsed layout plus slide content into an initial draft.

use crate::geom::Rect;
use crate::ldl::{ElementDecl, ParsedLayout, Token};
use crate::prototype::SlideConcept;
use crate::sir::{
    Color, ContentPayload, FontWeight, SlideDraft, SlideElement, Style, TextAlignment,
    CANVAS_HEIGHT, CANVAS_WIDTH,
};

/// Numeric zone grid. All values in canvas pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZoneGrid {
    pub margin: f64,
    pub gutter: f64,
    /// Bottom edge of the top band.
    pub top_band_end: f64,
    /// Bottom edge of the middle band; the bottom band runs to the canvas edge.
    pub middle_band_end: f64,
    /// Half-width of the centre column around the canvas midline.
    pub center_half_width: f64,
}

pub const ZONE_GRID: ZoneGrid = ZoneGrid {
    margin: 32.0,
    gutter: 24.0,
    top_band_end: 130.0,
    middle_band_end: 640.0,
    center_half_width: 400.0,
};

/// A closed interval on one axis.
type Span = (f64, f64);

impl ZoneGrid {
    pub fn top(&self) -> Span {
        (0.0, self.top_band_end)
    }
    pub fn middle(&self) -> Span {
        (self.top_band_end, self.middle_band_end)
    }
    pub fn bottom(&self) -> Span {
        (self.middle_band_end, CANVAS_HEIGHT)
    }
    /// One of three equal slices of the middle band, `i` in 0..3.
    pub fn middle_third(&self, i: usize) -> Span {
        let (a, b) = self.middle();
        let h = (b - a) / 3.0;
        (a + h * i as f64, a + h * (i + 1) as f64)
    }
    pub fn full(&self) -> Span {
        (self.margin, CANVAS_WIDTH - self.margin)
    }
    pub fn left(&self) -> Span {
        let mid = CANVAS_WIDTH / 2.0;
        (self.margin, mid - self.gutter)
    }
    pub fn right(&self) -> Span {
        let mid = CANVAS_WIDTH / 2.0;
        (mid + self.gutter, CANVAS_WIDTH - self.margin)
    }
    pub fn center(&self) -> Span {
        let mid = CANVAS_WIDTH / 2.0;
        (mid - self.center_half_width, mid + self.center_half_width)
    }

    /// Band and column a position token names; `None` leaves an axis free.
    fn spans(&self, pos: Token) -> (Option<Span>, Option<Span>) {
        let (band, col) = match pos.name() {
            "POS_TOP" => (Some(self.top()), None),
            "POS_MIDDLE" | "POS_CENTER_VERTICAL" => (Some(self.middle()), None),
            "POS_BOTTOM" => (Some(self.bottom()), None),
            "POS_LEFT" | "POS_HALF_WIDTH_LEFT" => (None, Some(self.left())),
            "POS_RIGHT" | "POS_HALF_WIDTH_RIGHT" => (None, Some(self.right())),
            "POS_CENTER" | "POS_CENTER_HORIZONTAL" => (None, Some(self.center())),
            "POS_FULL_WIDTH" => (None, Some(self.full())),
            "POS_TOP_LEFT" => (Some(self.top()), Some(self.left())),
            "POS_TOP_RIGHT" => (Some(self.top()), Some(self.right())),
            "POS_BOTTOM_LEFT" => (Some(self.bottom()), Some(self.left())),
            "POS_BOTTOM_RIGHT" => (Some(self.bottom()), Some(self.right())),
            "POS_MIDDLE_LEFT_UPPER" => (Some(self.middle_third(0)), Some(self.left())),
            "POS_MIDDLE_LEFT_CENTER" => (Some(self.middle_third(1)), Some(self.left())),
            "POS_MIDDLE_LEFT_LOWER" => (Some(self.middle_third(2)), Some(self.left())),
            "POS_MIDDLE_RIGHT" => (Some(self.middle()), Some(self.right())),
            "POS_MIDDLE_RIGHT_UPPER" => (Some(self.middle_third(0)), Some(self.right())),
            "POS_MIDDLE_RIGHT_CENTER" => (Some(self.middle_third(1)), Some(self.right())),
            "POS_MIDDLE_RIGHT_LOWER" => (Some(self.middle_third(2)), Some(self.right())),
            "POS_BOTTOM_MIDDLE_SECTION" => (Some(self.middle_third(2)), None),
            _ => (None, None),
        };
        (band, col)
    }

    fn rect(band: Span, col: Span) -> Rect {
        Rect::from_edges(col.0, band.0, col.1, band.1)
    }

    /// Default zones of a slide type, top to bottom and left to right.
    pub fn default_zones(&self, slide_type: Token) -> Vec<Rect> {
        let r = ZoneGrid::rect;
        match slide_type.name() {
            "SLIDE_TITLE" | "SLIDE_SECTION_HEADER" => vec![
                r(self.middle(), self.center()),
                r(self.bottom(), self.center()),
                r(self.top(), self.full()),
            ],
            "SLIDE_CONTENT_TWO_COL" => vec![
                r(self.top(), self.full()),
                r(self.middle(), self.left()),
                r(self.middle(), self.right()),
                r(self.bottom(), self.full()),
            ],
            "SLIDE_IMAGE_CAPTION" => vec![
                r(self.top(), self.full()),
                r(self.middle(), self.center()),
                r(self.bottom(), self.full()),
            ],
            "SLIDE_BLANK" => vec![
                r(self.middle(), self.full()),
                r(self.top(), self.full()),
                r(self.bottom(), self.full()),
            ],
            _ => vec![
                r(self.top(), self.full()),
                r(self.middle(), self.full()),
                r(self.bottom(), self.full()),
            ],
        }
    }
}

fn intersect(a: Span, b: Span) -> Option<Span> {
    let lo = a.0.max(b.0);
    let hi = a.1.min(b.1);
    (hi > lo).then_some((lo, hi))
}

/// Zone named by explicit position tokens, or `None` when there are none.
/// Tokens on the same axis intersect; when they are disjoint the later one
/// wins and a warning is pushed.
fn explicit_zone(positions: &[Token], warnings: &mut Vec<String>) -> Option<Rect> {
    if positions.is_empty() {
        return None;
    }
    let g = ZONE_GRID;
    let mut band: Option<(Span, Token)> = None;
    let mut col: Option<(Span, Token)> = None;
    for &p in positions {
        let (b, c) = g.spans(p);
        for (slot, new, axis) in [(&mut band, b, "vertical"), (&mut col, c, "horizontal")] {
            let Some(new) = new else { continue };
            *slot = Some(match *slot {
                None => (new, p),
                Some((old, prev)) => match intersect(old, new) {
                    Some(s) => (s, p),
                    None => {
                        warnings.push(format!(
                            "conflicting {axis} positions {prev} and {p}; using {p}"
                        ));
                        (new, p)
                    }
                },
            });
        }
    }
    Some(ZoneGrid::rect(
        band.map_or(g.middle(), |b| b.0),
        col.map_or(g.full(), |c| c.0),
    ))
}

/// Zone rectangle for `positions` on a slide of type `slide_type`. An empty
/// position list gives the slide type's first default zone.
pub fn resolve_zone(positions: &[Token], slide_type: Token) -> (Rect, Vec<String>) {
    let mut warnings = Vec::new();
    let zone = explicit_zone(positions, &mut warnings)
        .unwrap_or_else(|| ZONE_GRID.default_zones(slide_type)[0]);
    (zone, warnings)
}

/// Fraction `(w, h)` of its zone an element occupies before modifiers.
fn base_fraction(elem_type: &str) -> (f64, f64) {
    match elem_type {
        "ELEM_TITLE" | "ELEM_HEADER" => (0.9, 0.7),
        "ELEM_SUBTITLE" | "ELEM_FOOTER" => (0.9, 0.6),
        "ELEM_IMAGE" => (0.8, 0.8),
        "ELEM_FOOTER_FEATURED" => (0.95, 0.7),
        "ELEM_CONTENT_BLOCK" => (0.9, 0.8),
        _ => (0.9, 0.85),
    }
}

/// Fraction of the zone granted to `decl` after size and density attributes.
pub fn size_fraction(decl: &ElementDecl) -> (f64, f64) {
    let (mut w, mut h) = base_fraction(decl.elem_type.name());
    let mut scale = 1.0;
    for a in decl.attrs() {
        scale *= match a.name() {
            "ATTR_SIZE_PRIMARY" => 1.1,
            "ATTR_SIZE_SECONDARY" => 0.7,
            "ATTR_CONTENT_DENSE" => 1.15,
            "ATTR_CONTENT_SPARSE" => 0.85,
            _ => 1.0,
        };
    }
    w = (w * scale).min(1.0);
    h = (h * scale).min(1.0);
    (w, h)
}

fn declared_aspect(decl: &ElementDecl) -> Option<f64> {
    decl.attrs().find_map(|a| match a.name() {
        "ATTR_IMAGE_ASPECT_WIDE" => Some(16.0 / 9.0),
        "ATTR_IMAGE_ASPECT_SQUARE" => Some(1.0),
        "ATTR_IMAGE_ASPECT_TALL" => Some(9.0 / 16.0),
        _ => None,
    })
}

/// Largest box of the given aspect inside `w × h`.
fn fit_aspect(w: f64, h: f64, aspect: f64) -> (f64, f64) {
    if w / h > aspect {
        (h * aspect, h)
    } else {
        (w, w / aspect)
    }
}

fn default_style(elem_type: &str) -> Style {
    let mut s = Style::default();
    match elem_type {
        "ELEM_TITLE" => {
            s.font_size = 36.0;
            s.font_weight = FontWeight::Bold;
            s.text_alignment = TextAlignment::Center;
        }
        "ELEM_SUBTITLE" => {
            s.font_size = 24.0;
            s.text_alignment = TextAlignment::Center;
        }
        "ELEM_HEADER" => {
            s.font_size = 20.0;
            s.font_weight = FontWeight::Bold;
        }
        "ELEM_FOOTER" | "ELEM_FOOTER_FEATURED" => {
            s.font_size = 12.0;
            s.text_alignment = TextAlignment::Center;
        }
        "ELEM_TABLE" | "ELEM_CHART" => s.font_size = 14.0,
        "ELEM_CONTENT_BLOCK" => {
            s.border_color = Color::parse("#BDBDBD");
            s.border_width = 1.0;
        }
        _ => {}
    }
    s
}

fn base_id(elem_type: &str) -> &'static str {
    match elem_type {
        "ELEM_TITLE" => "title",
        "ELEM_SUBTITLE" => "subtitle",
        "ELEM_TEXT_BODY" => "body",
        "ELEM_IMAGE" => "image",
        "ELEM_CHART" => "chart",
        "ELEM_TABLE" => "table",
        "ELEM_FOOTER" | "ELEM_FOOTER_FEATURED" => "footer",
        "ELEM_HEADER" => "header",
        _ => "block",
    }
}

fn holds_bullets(elem_type: &str) -> bool {
    matches!(elem_type, "ELEM_TEXT_BODY" | "ELEM_CONTENT_BLOCK")
}

/// Contiguous even split of `n` items into `k` parts, earlier parts taking
/// the remainder. Returns the part sizes.
pub fn partition_sizes(n: usize, k: usize) -> Vec<usize> {
    if k == 0 {
        return Vec::new();
    }
    let (q, r) = (n / k, n % k);
    (0..k).map(|i| q + usize::from(i < r)).collect()
}

/// Result of instantiation: the draft plus non-fatal content and position
/// warnings.
#[derive(Debug, Clone, PartialEq)]
pub struct Instantiation {
    pub draft: SlideDraft,
    pub warnings: Vec<String>,
}

pub fn instantiate(layout: &ParsedLayout, concept: &SlideConcept) -> Instantiation {
    let grid = ZONE_GRID;
    let mut warnings = Vec::new();

    // Zones, with defaults handed out in order among elements without positions.
    let defaults = grid.default_zones(layout.slide_type);
    let mut zones: Vec<Option<Rect>> = Vec::with_capacity(layout.elements.len());
    for decl in &layout.elements {
        let pos: Vec<Token> = decl.positions().collect();
        zones.push(explicit_zone(&pos, &mut warnings));
    }
    let mut used: Vec<Rect> = zones.iter().flatten().copied().collect();
    for z in zones.iter_mut() {
        if z.is_none() {
            let pick = defaults
                .iter()
                .find(|d| !used.contains(d))
                .copied()
                .unwrap_or(defaults[0]);
            used.push(pick);
            *z = Some(pick);
        }
    }
    let zones: Vec<Rect> = zones.into_iter().flatten().collect();

    // Elements sharing an identical zone stack into equal vertical slots.
    let mut slots = zones.clone();
    for (i, z) in zones.iter().enumerate() {
        let peers: Vec<usize> = (0..zones.len()).filter(|&j| zones[j] == *z).collect();
        if peers.len() > 1 {
            let k = peers.iter().position(|&j| j == i).unwrap();
            let h = z.h / peers.len() as f64;
            slots[i] = Rect::new(z.x, z.y + h * k as f64, z.w, h);
        }
    }

    // Content.
    let bullets: Vec<String> = concept
        .bullet_points
        .iter()
        .filter(|b| !b.trim().is_empty())
        .cloned()
        .collect();
    if bullets.len() < concept.bullet_points.len() {
        warnings.push("empty bullet points dropped".to_string());
    }
    let holders = layout
        .elements
        .iter()
        .filter(|d| holds_bullets(d.elem_type.name()))
        .count();
    if holders == 0 && !bullets.is_empty() {
        warnings.push(format!("{} bullet points have no text element", bullets.len()));
    }
    let mut parts = partition_sizes(bullets.len(), holders).into_iter();
    let mut next_bullet = 0usize;
    let mut seen_title = false;
    let mut seen_subtitle = false;
    let mut seen_footer = false;
    let mut seen_image = false;
    let message = concept.key_message.trim();

    let mut draft = SlideDraft::new(layout.slide_type);
    let mut counts = std::collections::BTreeMap::<&str, usize>::new();
    for (i, decl) in layout.elements.iter().enumerate() {
        let ty = decl.elem_type.name();
        let base = base_id(ty);
        let n = counts.entry(base).or_insert(0);
        *n += 1;
        let id = if *n == 1 {
            base.to_string()
        } else {
            format!("{base}_{n}")
        };

        let content = match ty {
            "ELEM_TITLE" if !seen_title => {
                seen_title = true;
                text_or_empty(&concept.slide_title, |t| ContentPayload::Title { text: t })
            }
            "ELEM_SUBTITLE" if !seen_subtitle => {
                seen_subtitle = true;
                text_or_empty(message, |t| ContentPayload::Subtitle { text: t })
            }
            "ELEM_FOOTER" | "ELEM_FOOTER_FEATURED" if !seen_footer => {
                seen_footer = true;
                text_or_empty(message, |t| ContentPayload::Footer { text: t })
            }
            "ELEM_TABLE" => text_or_empty(message, |t| ContentPayload::TableSummary { text: t }),
            t if holds_bullets(t) => {
                let take = parts.next().unwrap_or(0);
                let chunk = bullets[next_bullet..next_bullet + take].to_vec();
                next_bullet += take;
                if chunk.is_empty() {
                    ContentPayload::Empty
                } else {
                    ContentPayload::TextBody { bullets: chunk }
                }
            }
            "ELEM_IMAGE" => match (&concept.primary_visual_id, seen_image) {
                (Some(v), false) => {
                    seen_image = true;
                    let aspect = concept
                        .primary_visual_aspect
                        .filter(|a| a.is_finite() && *a > 0.0)
                        .or_else(|| declared_aspect(decl))
                        .unwrap_or(1.0);
                    ContentPayload::Image {
                        visual_id: v.clone(),
                        aspect,
                    }
                }
                (None, _) => {
                    warnings.push(format!("content mismatch: {id} declared but the concept has no visual"));
                    ContentPayload::Empty
                }
                (Some(_), true) => {
                    warnings.push(format!("content mismatch: {id} has no second visual to show"));
                    ContentPayload::Empty
                }
            },
            _ => ContentPayload::Empty,
        };

        let slot = slots[i];
        let (fw, fh) = size_fraction(decl);
        let (mut w, mut h) = (slot.w * fw, slot.h * fh);
        if ty == "ELEM_IMAGE" {
            if let Some(a) = declared_aspect(decl) {
                (w, h) = fit_aspect(w, h, a);
            }
        }
        let geometry = slot.centered(w, h);
        let el = SlideElement::new(id, decl.elem_type, geometry)
            .with_style(default_style(ty))
            .with_content(content)
            .with_z(i as i64);
        draft
            .push(el)
            .expect("generated element ids are unique");
    }
    if concept.primary_visual_id.is_some() && !seen_image {
        warnings.push("concept visual has no image element".to_string());
    }
    Instantiation { draft, warnings }
}

fn text_or_empty(text: &str, make: impl FnOnce(String) -> ContentPayload) -> ContentPayload {
    let t = text.trim();
    if t.is_empty() {
        ContentPayload::Empty
    } else {
        make(t.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldl::parse_text;
    use crate::prototype::FunctionalType;

    fn tok(s: &str) -> Token {
        Token::lookup(s).unwrap()
    }

    #[test]
    fn grid_partitions_bands() {
        let g = ZONE_GRID;
        assert_eq!(g.top().1, g.middle().0);
        assert_eq!(g.middle().1, g.bottom().0);
        assert_eq!(g.bottom().1, 720.0);
        assert_eq!(g.left(), (32.0, 616.0));
        assert_eq!(g.right(), (664.0, 1248.0));
    }

    #[test]
    fn top_center_zone_is_centered() {
        let (z, w) = resolve_zone(&[tok("POS_TOP"), tok("POS_CENTER")], tok("SLIDE_BLANK"));
        assert_eq!(z.center_x(), 640.0);
        assert_eq!((z.top(), z.bottom()), (0.0, 130.0));
        assert!(w.is_empty());
    }

    #[test]
    fn full_width_spans_margins() {
        let (z, _) = resolve_zone(&[tok("POS_FULL_WIDTH")], tok("SLIDE_CONTENT_SINGLE_COL"));
        assert_eq!((z.left(), z.right()), (32.0, 1248.0));
    }

    #[test]
    fn left_right_conflict_later_wins() {
        let (z, w) = resolve_zone(&[tok("POS_LEFT"), tok("POS_RIGHT")], tok("SLIDE_BLANK"));
        assert_eq!(z.left(), 664.0);
        assert_eq!(w.len(), 1);
    }

    #[test]
    fn empty_positions_use_first_default() {
        let st = tok("SLIDE_CONTENT_TWO_COL");
        let (z, _) = resolve_zone(&[], st);
        assert_eq!(z, ZONE_GRID.default_zones(st)[0]);
    }

    #[test]
    fn blank_slide_has_no_elements() {
        let layout = parse_text("<SOS> SLIDE_BLANK <EOS>").unwrap();
        let out = instantiate(&layout, &SlideConcept::new("", FunctionalType::ContentTextOnly));
        assert!(out.draft.is_empty());
    }

    #[test]
    fn partition_is_contiguous_and_front_loaded() {
        assert_eq!(partition_sizes(7, 3), [3, 2, 2]);
        assert_eq!(partition_sizes(2, 3), [1, 1, 0]);
        assert!(partition_sizes(5, 0).is_empty());
    }

    #[test]
    fn image_without_visual_warns() {
        let layout = parse_text("<SOS> SLIDE_BLANK <SEP> ELEM_IMAGE <EOS>").unwrap();
        let out = instantiate(&layout, &SlideConcept::new("x", FunctionalType::ContentImageOnly));
        assert_eq!(out.draft.elements()[0].content, ContentPayload::Empty);
        assert_eq!(out.warnings.len(), 1);
    }

    #[test]
    fn primary_beats_secondary_in_shared_zone() {
        let layout = parse_text(
            "<SOS> SLIDE_BLANK <SEP> ELEM_TEXT_BODY ATTR_SIZE_PRIMARY POS_TOP <SEP> ELEM_TEXT_BODY ATTR_SIZE_SECONDARY POS_TOP <EOS>",
        )
        .unwrap();
        let out = instantiate(&layout, &SlideConcept::new("x", FunctionalType::ContentTextOnly));
        let e = out.draft.elements();
        assert!(e[0].geometry.area() > e[1].geometry.area());
    }
}
