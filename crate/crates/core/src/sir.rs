//! Structured intermediate representation: the mutable slide draft that the
//! refinement loop edits, with per-element geometry, style and content.

use std::borrow::Cow;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::geom::Rect;
use crate::ldl::{Token, TokenKind};

pub const CANVAS_WIDTH: f64 = 1280.0;
pub const CANVAS_HEIGHT: f64 = 720.0;

/// Reference id resolving to the whole canvas.
pub const SLIDE_BOUNDS: &str = "slide_bounds";
/// Reference id resolving to a zero-size anchor at the canvas centre.
pub const SLIDE_CENTER: &str = "slide_center";

pub const MIN_FONT_SIZE: f64 = 6.0;
pub const MAX_FONT_SIZE: f64 = 96.0;

pub type Geometry = Rect;

pub fn canvas_rect() -> Rect {
    Rect::new(0.0, 0.0, CANVAS_WIDTH, CANVAS_HEIGHT)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SirError {
    #[error("element `{0}` not found")]
    ElementNotFound(String),
    #[error("duplicate element id `{0}`")]
    DuplicateId(String),
    #[error("schema violation at `{path}`: {reason}")]
    SchemaViolation { path: String, reason: String },
    #[error("draft has no elements")]
    EmptyDraft,
}

/// `#RRGGBB`, stored uppercase.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Color(String);

impl Color {
    pub fn parse(s: &str) -> Option<Color> {
        let hex = s.strip_prefix('#')?;
        (hex.len() == 6 && hex.bytes().all(|b| b.is_ascii_hexdigit()))
            .then(|| Color(format!("#{}", hex.to_ascii_uppercase())))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Color {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Color {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Color::parse(&s).ok_or_else(|| serde::de::Error::custom(format!("malformed color `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FontWeight {
    Normal,
    Bold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TextAlignment {
    Left,
    Center,
    Right,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Style {
    pub font_size: f64,
    pub font_weight: FontWeight,
    pub font_color: Color,
    pub fill_color: Option<Color>,
    pub border_color: Option<Color>,
    pub border_width: f64,
    pub text_alignment: TextAlignment,
    pub opacity: f64,
}

impl Default for Style {
    fn default() -> Self {
        Style {
            font_size: 18.0,
            font_weight: FontWeight::Normal,
            font_color: Color("#1A1A1A".into()),
            fill_color: None,
            border_color: None,
            border_width: 0.0,
            text_alignment: TextAlignment::Left,
            opacity: 1.0,
        }
    }
}

impl Style {
    /// First violated invariant as `(field, reason)`.
    pub fn check(&self) -> Result<(), (&'static str, String)> {
        if !(MIN_FONT_SIZE..=MAX_FONT_SIZE).contains(&self.font_size) {
            return Err((
                "font_size",
                format!("{} outside [{MIN_FONT_SIZE}, {MAX_FONT_SIZE}]", self.font_size),
            ));
        }
        if !(0.0..=1.0).contains(&self.opacity) {
            return Err(("opacity", format!("{} outside [0, 1]", self.opacity)));
        }
        if !(self.border_width.is_finite() && self.border_width >= 0.0) {
            return Err(("border_width", format!("{} is not a finite non-negative width", self.border_width)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ContentPayload {
    TextBody { bullets: Vec<String> },
    Image { visual_id: String, aspect: f64 },
    Title { text: String },
    Subtitle { text: String },
    Footer { text: String },
    TableSummary { text: String },
    Empty,
}

impl ContentPayload {
    pub fn check(&self) -> Result<(), String> {
        match self {
            ContentPayload::TextBody { bullets } => {
                if bullets.is_empty() {
                    return Err("text body without bullets must be `empty`".into());
                }
                if let Some(i) = bullets.iter().position(|b| b.trim().is_empty()) {
                    return Err(format!("bullet {i} is blank"));
                }
                Ok(())
            }
            ContentPayload::Image { aspect, .. } if !(aspect.is_finite() && *aspect > 0.0) => {
                Err(format!("aspect {aspect} must be positive"))
            }
            _ => Ok(()),
        }
    }

    /// Plain text blocks of the payload (one per bullet for text bodies).
    pub fn text_parts(&self) -> Vec<&str> {
        match self {
            ContentPayload::TextBody { bullets } => bullets.iter().map(String::as_str).collect(),
            ContentPayload::Title { text }
            | ContentPayload::Subtitle { text }
            | ContentPayload::Footer { text }
            | ContentPayload::TableSummary { text } => vec![text.as_str()],
            ContentPayload::Image { .. } | ContentPayload::Empty => Vec::new(),
        }
    }

    pub fn is_text(&self) -> bool {
        !matches!(self, ContentPayload::Image { .. } | ContentPayload::Empty)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlideElement {
    pub id: String,
    pub elem_type: String,
    pub z_order: i64,
    pub geometry: Geometry,
    pub style: Style,
    pub content: ContentPayload,
}

impl SlideElement {
    pub fn new(id: impl Into<String>, elem_type: Token, geometry: Geometry) -> Self {
        SlideElement {
            id: id.into(),
            elem_type: elem_type.name().to_string(),
            z_order: 0,
            geometry,
            style: Style::default(),
            content: ContentPayload::Empty,
        }
    }

    pub fn with_content(mut self, content: ContentPayload) -> Self {
        self.content = content;
        self
    }

    pub fn with_style(mut self, style: Style) -> Self {
        self.style = style;
        self
    }

    pub fn with_z(mut self, z_order: i64) -> Self {
        self.z_order = z_order;
        self
    }

    /// First violated invariant as `(field path relative to the element, reason)`.
    pub fn check(&self) -> Result<(), (String, String)> {
        if self.id.is_empty() {
            return Err(("id".into(), "empty id".into()));
        }
        if self.id == SLIDE_BOUNDS || self.id == SLIDE_CENTER {
            return Err(("id".into(), format!("`{}` is a reserved reference id", self.id)));
        }
        match Token::lookup(&self.elem_type) {
            Some(t) if t.kind() == TokenKind::ElemType => {}
            _ => {
                return Err((
                    "elem_type".into(),
                    format!("`{}` is not an element type", self.elem_type),
                ))
            }
        }
        let g = &self.geometry;
        if !g.is_finite() {
            return Err(("geometry".into(), "non-finite coordinate".into()));
        }
        if g.w <= 0.0 {
            return Err(("geometry.w".into(), format!("width {} must be positive", g.w)));
        }
        if g.h <= 0.0 {
            return Err(("geometry.h".into(), format!("height {} must be positive", g.h)));
        }
        self.style
            .check()
            .map_err(|(f, r)| (format!("style.{f}"), r))?;
        self.content.check().map_err(|r| ("content".to_string(), r))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Canvas {
    pub width: f64,
    pub height: f64,
}

impl Default for Canvas {
    fn default() -> Self {
        Canvas {
            width: CANVAS_WIDTH,
            height: CANVAS_HEIGHT,
        }
    }
}

/// One slide draft at refinement iteration `iteration`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlideDraft {
    slide_type: String,
    canvas: Canvas,
    iteration: u32,
    elements: Vec<SlideElement>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DraftRepr {
    slide_type: String,
    canvas: Canvas,
    iteration: u32,
    elements: Vec<SlideElement>,
}

impl SlideDraft {
    pub fn new(slide_type: Token) -> Self {
        assert_eq!(slide_type.kind(), TokenKind::SlideType, "{slide_type} is not a slide type");
        SlideDraft {
            slide_type: slide_type.name().to_string(),
            canvas: Canvas::default(),
            iteration: 0,
            elements: Vec::new(),
        }
    }

    pub fn slide_type(&self) -> &str {
        &self.slide_type
    }

    pub fn canvas(&self) -> Canvas {
        self.canvas
    }

    pub fn iteration(&self) -> u32 {
        self.iteration
    }

    /// Moves the iteration counter forward; it never decreases.
    pub fn set_iteration(&mut self, t: u32) {
        self.iteration = self.iteration.max(t);
    }

    pub fn elements(&self) -> &[SlideElement] {
        &self.elements
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn push(&mut self, element: SlideElement) -> Result<(), SirError> {
        let idx = self.elements.len();
        element.check().map_err(|(field, reason)| SirError::SchemaViolation {
            path: format!("elements[{idx}].{field}"),
            reason,
        })?;
        if self.element(&element.id).is_some() {
            return Err(SirError::DuplicateId(element.id));
        }
        self.elements.push(element);
        Ok(())
    }

    pub fn with_element(mut self, element: SlideElement) -> Result<Self, SirError> {
        self.push(element)?;
        Ok(self)
    }

    pub fn element(&self, id: &str) -> Option<&SlideElement> {
        self.elements.iter().find(|e| e.id == id)
    }

    /// Mutable access for editing primitives; ids themselves are not editable
    /// through this path, so uniqueness is preserved.
    pub(crate) fn element_mut(&mut self, id: &str) -> Result<&mut SlideElement, SirError> {
        self.elements
            .iter_mut()
            .find(|e| e.id == id)
            .ok_or_else(|| SirError::ElementNotFound(id.to_string()))
    }

    /// Element by id, with `slide_bounds` and `slide_center` resolving to
    /// synthetic read-only elements.
    pub fn get_element(&self, id: &str) -> Result<Cow<'_, SlideElement>, SirError> {
        if let Some(rect) = reference_rect(id) {
            return Ok(Cow::Owned(SlideElement {
                id: id.to_string(),
                elem_type: id.to_ascii_uppercase(),
                z_order: i64::MIN,
                geometry: rect,
                style: Style::default(),
                content: ContentPayload::Empty,
            }));
        }
        self.element(id)
            .map(Cow::Borrowed)
            .ok_or_else(|| SirError::ElementNotFound(id.to_string()))
    }

    /// Box of an element or reference id.
    pub fn resolve_box(&self, id: &str) -> Result<Rect, SirError> {
        Ok(self.get_element(id)?.geometry)
    }

    /// Smallest box containing every element.
    pub fn bounding_union(&self) -> Result<Rect, SirError> {
        let mut it = self.elements.iter().map(|e| e.geometry);
        let first = it.next().ok_or(SirError::EmptyDraft)?;
        Ok(it.fold(first, |acc, g| acc.union(&g)))
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("draft serialization is infallible");
        out.push(b'\n');
        out
    }

    pub fn from_json(bytes: &[u8]) -> Result<SlideDraft, SirError> {
        let de = &mut serde_json::Deserializer::from_slice(bytes);
        let repr: DraftRepr = serde_path_to_error::deserialize(de).map_err(|e| {
            let mut path = e.path().to_string();
            let reason = e.inner().to_string();
            if let Some(field) = missing_field(&reason) {
                path = if path == "." || path.is_empty() {
                    field.to_string()
                } else {
                    format!("{path}.{field}")
                };
            }
            SirError::SchemaViolation { path, reason }
        })?;

        match Token::lookup(&repr.slide_type) {
            Some(t) if t.kind() == TokenKind::SlideType => {}
            _ => {
                return Err(SirError::SchemaViolation {
                    path: "slide_type".into(),
                    reason: format!("`{}` is not a slide type", repr.slide_type),
                })
            }
        }
        if repr.canvas != Canvas::default() {
            return Err(SirError::SchemaViolation {
                path: "canvas".into(),
                reason: format!("canvas must be {CANVAS_WIDTH}x{CANVAS_HEIGHT}"),
            });
        }
        let mut draft = SlideDraft {
            slide_type: repr.slide_type,
            canvas: repr.canvas,
            iteration: repr.iteration,
            elements: Vec::with_capacity(repr.elements.len()),
        };
        for (idx, el) in repr.elements.into_iter().enumerate() {
            draft.push(el).map_err(|e| match e {
                SirError::DuplicateId(id) => SirError::SchemaViolation {
                    path: format!("elements[{idx}].id"),
                    reason: format!("duplicate id `{id}`"),
                },
                other => other,
            })?;
        }
        Ok(draft)
    }
}

fn missing_field(reason: &str) -> Option<&str> {
    let rest = reason.strip_prefix("missing field `")?;
    rest.split('`').next()
}

pub fn reference_rect(id: &str) -> Option<Rect> {
    match id {
        SLIDE_BOUNDS => Some(canvas_rect()),
        SLIDE_CENTER => Some(Rect::new(CANVAS_WIDTH / 2.0, CANVAS_HEIGHT / 2.0, 0.0, 0.0)),
        _ => None,
    }
}
