//! Editing primitives: deterministic, atomic transformations of a draft.
//!
//! Every primitive validates all of its inputs before touching the draft, so
//! a failed call leaves the draft exactly as it was.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::sir::{
    reference_rect, Color, ContentPayload, FontWeight, SirError, SlideDraft, Style, TextAlignment,
    MAX_FONT_SIZE, MIN_FONT_SIZE,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EditError {
    #[error("element `{0}` not found")]
    ElementNotFound(String),
    #[error("`{0}` is a reference id and cannot be edited")]
    ImmutableTarget(String),
    #[error("unknown alignment type `{0}`")]
    UnknownAlignmentType(String),
    #[error("resize to {w}x{h} leaves a non-positive size")]
    DegenerateSize { w: f64, h: f64 },
    #[error("unknown anchor point `{0}`")]
    UnknownAnchor(String),
    #[error("element `{0}` holds no bullet text")]
    NotTextElement(String),
    #[error("bullet index {index} out of range for {len} bullets")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("unknown style attribute `{0}`")]
    UnknownAttribute(String),
    #[error("invalid value for `{attribute}`: {reason}")]
    InvalidValue { attribute: String, reason: String },
    #[error("unknown color property `{0}`")]
    UnknownProperty(String),
    #[error("malformed color `{0}`; expected #RRGGBB")]
    MalformedColor(String),
    #[error("spacing needs two distinct elements, got `{0}` twice")]
    SameElement(String),
    #[error("target space {0} is negative")]
    NegativeSpace(f64),
    #[error("unknown direction `{0}`")]
    UnknownDirection(String),
    #[error("parameter `{0}` is not finite")]
    NonFinite(&'static str),
    #[error("malformed command: {0}")]
    BadCommand(String),
}

impl From<SirError> for EditError {
    fn from(e: SirError) -> Self {
        match e {
            SirError::ElementNotFound(id) => EditError::ElementNotFound(id),
            other => EditError::BadCommand(other.to_string()),
        }
    }
}

macro_rules! string_enum {
    ($name:ident, $err:ident, { $($variant:ident => $text:literal),* $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum $name { $($variant),* }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),*];
            pub fn as_str(self) -> &'static str {
                match self { $($name::$variant => $text),* }
            }
        }

        impl FromStr for $name {
            type Err = EditError;
            fn from_str(s: &str) -> Result<Self, EditError> {
                match s {
                    $($text => Ok($name::$variant),)*
                    _ => Err(EditError::$err(s.to_string())),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

string_enum!(Alignment, UnknownAlignmentType, {
    Left => "left",
    Right => "right",
    Top => "top",
    Bottom => "bottom",
    CenterH => "center_h",
    CenterV => "center_v",
});

string_enum!(Anchor, UnknownAnchor, {
    Center => "center",
    TopLeft => "top_left",
    TopRight => "top_right",
    BottomLeft => "bottom_left",
    BottomRight => "bottom_right",
    MiddleLeft => "middle_left",
    MiddleRight => "middle_right",
    TopCenter => "top_center",
    BottomCenter => "bottom_center",
});

string_enum!(ColorProperty, UnknownProperty, {
    Fill => "fill",
    Text => "text",
    Border => "border",
});

string_enum!(Direction, UnknownDirection, {
    Horizontal => "horizontal",
    Vertical => "vertical",
});

impl Anchor {
    /// Position of the anchor as fractions of the box's width and height.
    fn fractions(self) -> (f64, f64) {
        match self {
            Anchor::Center => (0.5, 0.5),
            Anchor::TopLeft => (0.0, 0.0),
            Anchor::TopRight => (1.0, 0.0),
            Anchor::BottomLeft => (0.0, 1.0),
            Anchor::BottomRight => (1.0, 1.0),
            Anchor::MiddleLeft => (0.0, 0.5),
            Anchor::MiddleRight => (1.0, 0.5),
            Anchor::TopCenter => (0.5, 0.0),
            Anchor::BottomCenter => (0.5, 1.0),
        }
    }
}

impl ColorProperty {
    pub fn style_attribute(self) -> &'static str {
        match self {
            ColorProperty::Fill => "fill_color",
            ColorProperty::Text => "font_color",
            ColorProperty::Border => "border_color",
        }
    }
}

/// The eight style attributes primitives may change.
pub const STYLE_ATTRIBUTES: [&str; 8] = [
    "font_size",
    "font_weight",
    "font_color",
    "fill_color",
    "border_color",
    "border_width",
    "text_alignment",
    "opacity",
];

fn finite(name: &'static str, v: f64) -> Result<(), EditError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(EditError::NonFinite(name))
    }
}

fn editable<'a>(draft: &'a SlideDraft, id: &str) -> Result<&'a crate::sir::SlideElement, EditError> {
    if reference_rect(id).is_some() {
        return Err(EditError::ImmutableTarget(id.to_string()));
    }
    draft
        .element(id)
        .ok_or_else(|| EditError::ElementNotFound(id.to_string()))
}

/// Translates an element by `(dx, dy)`.
pub fn move_element(draft: &mut SlideDraft, id: &str, dx: f64, dy: f64) -> Result<(), EditError> {
    finite("dx", dx)?;
    finite("dy", dy)?;
    editable(draft, id)?;
    let g = &mut draft.element_mut(id)?.geometry;
    // Adding zero is skipped so that a -0.0 coordinate keeps its sign.
    if dx != 0.0 {
        g.x += dx;
    }
    if dy != 0.0 {
        g.y += dy;
    }
    Ok(())
}

/// Moves `id` so the named edge or centre coincides with the reference's.
pub fn adjust_alignment(
    draft: &mut SlideDraft,
    id: &str,
    reference_id: &str,
    alignment: Alignment,
) -> Result<(), EditError> {
    let g = editable(draft, id)?.geometry;
    let r = draft.resolve_box(reference_id)?;
    let (dx, dy) = match alignment {
        Alignment::Left => (r.left() - g.left(), 0.0),
        Alignment::Right => (r.right() - g.right(), 0.0),
        Alignment::Top => (0.0, r.top() - g.top()),
        Alignment::Bottom => (0.0, r.bottom() - g.bottom()),
        Alignment::CenterH => (r.center_x() - g.center_x(), 0.0),
        Alignment::CenterV => (0.0, r.center_y() - g.center_y()),
    };
    move_element(draft, id, dx, dy)
}

/// Changes the size by `(dw, dh)` keeping the anchor point fixed.
pub fn resize_element(
    draft: &mut SlideDraft,
    id: &str,
    dw: f64,
    dh: f64,
    anchor: Anchor,
) -> Result<(), EditError> {
    finite("dw", dw)?;
    finite("dh", dh)?;
    let g = editable(draft, id)?.geometry;
    let (w, h) = (g.w + dw, g.h + dh);
    if !(w > 0.0 && h > 0.0) {
        return Err(EditError::DegenerateSize { w, h });
    }
    let (ax, ay) = anchor.fractions();
    let geom = &mut draft.element_mut(id)?.geometry;
    if dw != 0.0 {
        geom.w = w;
        if ax != 0.0 {
            geom.x -= ax * dw;
        }
    }
    if dh != 0.0 {
        geom.h = h;
        if ay != 0.0 {
            geom.y -= ay * dh;
        }
    }
    Ok(())
}

fn bullets_of<'a>(draft: &'a SlideDraft, id: &str) -> Result<&'a [String], EditError> {
    match &editable(draft, id)?.content {
        ContentPayload::TextBody { bullets } => Ok(bullets),
        _ => Err(EditError::NotTextElement(id.to_string())),
    }
}

/// Replaces bullet `index` of a text body.
pub fn rewrite_bullet_point(
    draft: &mut SlideDraft,
    id: &str,
    index: usize,
    new_text: &str,
) -> Result<(), EditError> {
    let len = bullets_of(draft, id)?.len();
    if index >= len {
        return Err(EditError::IndexOutOfRange { index, len });
    }
    if new_text.trim().is_empty() {
        return Err(EditError::InvalidValue {
            attribute: "new_text".into(),
            reason: "bullet text must not be empty".into(),
        });
    }
    if let ContentPayload::TextBody { bullets } = &mut draft.element_mut(id)?.content {
        bullets[index] = new_text.to_string();
    }
    Ok(())
}

/// Removes bullet `index`; removing the last one leaves an empty payload.
pub fn delete_bullet_point(draft: &mut SlideDraft, id: &str, index: usize) -> Result<(), EditError> {
    let len = bullets_of(draft, id)?.len();
    if index >= len {
        return Err(EditError::IndexOutOfRange { index, len });
    }
    let el = draft.element_mut(id)?;
    if len == 1 {
        el.content = ContentPayload::Empty;
    } else if let ContentPayload::TextBody { bullets } = &mut el.content {
        bullets.remove(index);
    }
    Ok(())
}

fn invalid(attribute: &str, reason: impl Into<String>) -> EditError {
    EditError::InvalidValue {
        attribute: attribute.to_string(),
        reason: reason.into(),
    }
}

fn color_value(attribute: &str, v: &Value) -> Result<Color, EditError> {
    match v {
        Value::String(s) => Color::parse(s).ok_or_else(|| EditError::MalformedColor(s.clone())),
        other => Err(invalid(attribute, format!("expected a color string, got {other}"))),
    }
}

fn number(attribute: &str, v: &Value) -> Result<f64, EditError> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| invalid(attribute, format!("expected a finite number, got {v}")))
}

/// Sets one attribute on `style` after validating `value`.
pub fn set_style_attribute(style: &mut Style, attribute: &str, value: &Value) -> Result<(), EditError> {
    match attribute {
        "font_size" => {
            let v = number(attribute, value)?;
            if !(MIN_FONT_SIZE..=MAX_FONT_SIZE).contains(&v) {
                return Err(invalid(attribute, format!("{v} outside [{MIN_FONT_SIZE}, {MAX_FONT_SIZE}]")));
            }
            style.font_size = v;
        }
        "font_weight" => {
            style.font_weight = match value.as_str() {
                Some("normal") => FontWeight::Normal,
                Some("bold") => FontWeight::Bold,
                _ => return Err(invalid(attribute, format!("expected \"normal\" or \"bold\", got {value}"))),
            }
        }
        "font_color" => style.font_color = color_value(attribute, value)?,
        "fill_color" => {
            style.fill_color = match value {
                Value::Null => None,
                v => Some(color_value(attribute, v)?),
            }
        }
        "border_color" => {
            style.border_color = match value {
                Value::Null => None,
                v => Some(color_value(attribute, v)?),
            }
        }
        "border_width" => {
            let v = number(attribute, value)?;
            if v < 0.0 {
                return Err(invalid(attribute, format!("{v} is negative")));
            }
            style.border_width = v;
        }
        "text_alignment" => {
            style.text_alignment = match value.as_str() {
                Some("left") => TextAlignment::Left,
                Some("center") => TextAlignment::Center,
                Some("right") => TextAlignment::Right,
                _ => return Err(invalid(attribute, format!("expected left, center or right, got {value}"))),
            }
        }
        "opacity" => {
            let v = number(attribute, value)?;
            if !(0.0..=1.0).contains(&v) {
                return Err(invalid(attribute, format!("{v} outside [0, 1]")));
            }
            style.opacity = v;
        }
        other => return Err(EditError::UnknownAttribute(other.to_string())),
    }
    Ok(())
}

/// Sets a single style attribute.
pub fn change_style(draft: &mut SlideDraft, id: &str, attribute: &str, value: &Value) -> Result<(), EditError> {
    let mut style = editable(draft, id)?.style.clone();
    set_style_attribute(&mut style, attribute, value)?;
    draft.element_mut(id)?.style = style;
    Ok(())
}

/// Sets the fill, text or border colour.
pub fn recolor_element(
    draft: &mut SlideDraft,
    id: &str,
    property: ColorProperty,
    color_value: &str,
) -> Result<(), EditError> {
    if Color::parse(color_value).is_none() {
        return Err(EditError::MalformedColor(color_value.to_string()));
    }
    change_style(draft, id, property.style_attribute(), &Value::String(color_value.to_string()))
}

/// Applies several style changes in sorted key order, all or nothing.
pub fn reformat_text(
    draft: &mut SlideDraft,
    id: &str,
    style_params: &BTreeMap<String, Value>,
) -> Result<(), EditError> {
    let mut style = editable(draft, id)?.style.clone();
    for (k, v) in style_params {
        set_style_attribute(&mut style, k, v)?;
    }
    draft.element_mut(id)?.style = style;
    Ok(())
}

/// Moves the element that comes later along `direction` (by leading edge,
/// `id2` on ties) so the gap between the two boxes equals `target_space`.
pub fn adjust_spacing(
    draft: &mut SlideDraft,
    id1: &str,
    id2: &str,
    target_space: f64,
    direction: Direction,
) -> Result<(), EditError> {
    finite("target_space", target_space)?;
    if target_space < 0.0 {
        return Err(EditError::NegativeSpace(target_space));
    }
    if id1 == id2 {
        return Err(EditError::SameElement(id1.to_string()));
    }
    let a = editable(draft, id1)?.geometry;
    let b = editable(draft, id2)?.geometry;
    let (lead_a, lead_b) = match direction {
        Direction::Horizontal => (a.left(), b.left()),
        Direction::Vertical => (a.top(), b.top()),
    };
    let (earlier, later, later_id) = if lead_a > lead_b { (b, a, id1) } else { (a, b, id2) };
    match direction {
        Direction::Horizontal => {
            let d = earlier.right() + target_space - later.left();
            move_element(draft, later_id, d, 0.0)
        }
        Direction::Vertical => {
            let d = earlier.bottom() + target_space - later.top();
            move_element(draft, later_id, 0.0, d)
        }
    }
}

fn default_anchor() -> String {
    "center".to_string()
}

/// A primitive with its parameters; serialises as `{primitive, params}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "primitive", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum EditCommand {
    MoveElement {
        id: String,
        dx: f64,
        dy: f64,
    },
    AdjustAlignment {
        id: String,
        reference_id: String,
        alignment_type: String,
    },
    ResizeElement {
        id: String,
        dw: f64,
        dh: f64,
        #[serde(default = "default_anchor")]
        anchor_point: String,
    },
    RewriteBulletPoint {
        id: String,
        index: usize,
        new_text: String,
    },
    DeleteBulletPoint {
        id: String,
        index: usize,
    },
    ChangeStyle {
        id: String,
        attribute: String,
        value: Value,
    },
    RecolorElement {
        id: String,
        property: String,
        color_value: String,
    },
    ReformatText {
        id: String,
        style_params: BTreeMap<String, Value>,
    },
    AdjustSpacing {
        id1: String,
        id2: String,
        target_space: f64,
        direction: String,
    },
}

impl EditCommand {
    pub fn primitive(&self) -> &'static str {
        match self {
            EditCommand::MoveElement { .. } => "move_element",
            EditCommand::AdjustAlignment { .. } => "adjust_alignment",
            EditCommand::ResizeElement { .. } => "resize_element",
            EditCommand::RewriteBulletPoint { .. } => "rewrite_bullet_point",
            EditCommand::DeleteBulletPoint { .. } => "delete_bullet_point",
            EditCommand::ChangeStyle { .. } => "change_style",
            EditCommand::RecolorElement { .. } => "recolor_element",
            EditCommand::ReformatText { .. } => "reformat_text",
            EditCommand::AdjustSpacing { .. } => "adjust_spacing",
        }
    }

    /// Element the command modifies. For spacing this is whichever of the
    /// two the primitive would move in `draft`.
    pub fn target(&self) -> &str {
        match self {
            EditCommand::MoveElement { id, .. }
            | EditCommand::AdjustAlignment { id, .. }
            | EditCommand::ResizeElement { id, .. }
            | EditCommand::RewriteBulletPoint { id, .. }
            | EditCommand::DeleteBulletPoint { id, .. }
            | EditCommand::ChangeStyle { id, .. }
            | EditCommand::RecolorElement { id, .. }
            | EditCommand::ReformatText { id, .. } => id,
            EditCommand::AdjustSpacing { id2, .. } => id2,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, EditError> {
        serde_json::from_str(text).map_err(|e| EditError::BadCommand(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("command serializes")
    }
}

/// Applies `cmd` in place. The iteration counter is left alone.
pub fn apply_in_place(draft: &mut SlideDraft, cmd: &EditCommand) -> Result<(), EditError> {
    match cmd {
        EditCommand::MoveElement { id, dx, dy } => move_element(draft, id, *dx, *dy),
        EditCommand::AdjustAlignment {
            id,
            reference_id,
            alignment_type,
        } => adjust_alignment(draft, id, reference_id, alignment_type.parse()?),
        EditCommand::ResizeElement {
            id,
            dw,
            dh,
            anchor_point,
        } => resize_element(draft, id, *dw, *dh, anchor_point.parse()?),
        EditCommand::RewriteBulletPoint { id, index, new_text } => {
            rewrite_bullet_point(draft, id, *index, new_text)
        }
        EditCommand::DeleteBulletPoint { id, index } => delete_bullet_point(draft, id, *index),
        EditCommand::ChangeStyle { id, attribute, value } => change_style(draft, id, attribute, value),
        EditCommand::RecolorElement {
            id,
            property,
            color_value,
        } => recolor_element(draft, id, property.parse()?, color_value),
        EditCommand::ReformatText { id, style_params } => reformat_text(draft, id, style_params),
        EditCommand::AdjustSpacing {
            id1,
            id2,
            target_space,
            direction,
        } => adjust_spacing(draft, id1, id2, *target_space, direction.parse()?),
    }
}

/// Returns the edited copy; `draft` itself is never modified.
pub fn apply(draft: &SlideDraft, cmd: &EditCommand) -> Result<SlideDraft, EditError> {
    let mut out = draft.clone();
    apply_in_place(&mut out, cmd)?;
    Ok(out)
}

/// Parses a JSONL command log; blank lines are skipped.
pub fn commands_from_jsonl(text: &str) -> Result<Vec<EditCommand>, (usize, EditError)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| EditCommand::from_json(l).map_err(|e| (i + 1, e)))
        .collect()
}

pub fn commands_to_jsonl(cmds: &[EditCommand]) -> String {
    cmds.iter().map(|c| c.to_json() + "\n").collect()
}

/// Applies a command log in order, stopping at the first failure.
pub fn replay(draft: &SlideDraft, cmds: &[EditCommand]) -> Result<SlideDraft, (usize, EditError)> {
    let mut out = draft.clone();
    for (i, c) in cmds.iter().enumerate() {
        apply_in_place(&mut out, c).map_err(|e| (i, e))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Rect;
    use crate::ldl::Token;
    use crate::sir::SlideElement;
    use serde_json::json;

    fn draft() -> SlideDraft {
        let body = Token::lookup("ELEM_TEXT_BODY").unwrap();
        SlideDraft::new(Token::lookup("SLIDE_BLANK").unwrap())
            .with_element(SlideElement::new("a", body, Rect::new(0.0, 0.0, 100.0, 50.0)))
            .unwrap()
            .with_element(
                SlideElement::new("b", body, Rect::new(150.0, 100.0, 100.0, 50.0)).with_content(
                    ContentPayload::TextBody {
                        bullets: vec!["x".into(), "y".into(), "z".into()],
                    },
                ),
            )
            .unwrap()
    }

    #[test]
    fn move_and_back() {
        let d0 = draft();
        let mut d = d0.clone();
        move_element(&mut d, "a", 20.0, -10.0).unwrap();
        assert_eq!(d.element("a").unwrap().geometry, Rect::new(20.0, -10.0, 100.0, 50.0));
        move_element(&mut d, "a", -20.0, 10.0).unwrap();
        assert_eq!(d, d0);
        assert_eq!(
            move_element(&mut d, "slide_bounds", 1.0, 0.0),
            Err(EditError::ImmutableTarget("slide_bounds".into()))
        );
    }

    #[test]
    fn alignment_to_slide() {
        let mut d = draft();
        resize_element(&mut d, "a", 300.0, 0.0, Anchor::TopLeft).unwrap();
        adjust_alignment(&mut d, "a", "slide_bounds", Alignment::CenterH).unwrap();
        assert_eq!(d.element("a").unwrap().geometry.x, 440.0);
        adjust_alignment(&mut d, "a", "slide_center", Alignment::CenterV).unwrap();
        let g = d.element("a").unwrap().geometry;
        assert_eq!(g.center_y(), 360.0);
    }

    #[test]
    fn resize_keeps_anchor() {
        let body = Token::lookup("ELEM_TEXT_BODY").unwrap();
        let mut d = SlideDraft::new(Token::lookup("SLIDE_BLANK").unwrap())
            .with_element(SlideElement::new("e", body, Rect::new(100.0, 100.0, 200.0, 100.0)))
            .unwrap();
        resize_element(&mut d, "e", 20.0, -10.0, Anchor::Center).unwrap();
        assert_eq!(d.element("e").unwrap().geometry, Rect::new(90.0, 105.0, 220.0, 90.0));
        assert!(matches!(
            resize_element(&mut d, "e", -220.0, 0.0, Anchor::Center),
            Err(EditError::DegenerateSize { .. })
        ));
    }

    #[test]
    fn bullets() {
        let mut d = draft();
        rewrite_bullet_point(&mut d, "b", 1, "Y").unwrap();
        delete_bullet_point(&mut d, "b", 0).unwrap();
        assert_eq!(
            d.element("b").unwrap().content,
            ContentPayload::TextBody { bullets: vec!["Y".into(), "z".into()] }
        );
        assert_eq!(
            rewrite_bullet_point(&mut d, "b", 5, "q"),
            Err(EditError::IndexOutOfRange { index: 5, len: 2 })
        );
        assert_eq!(delete_bullet_point(&mut d, "a", 0), Err(EditError::NotTextElement("a".into())));
        delete_bullet_point(&mut d, "b", 0).unwrap();
        delete_bullet_point(&mut d, "b", 0).unwrap();
        assert_eq!(d.element("b").unwrap().content, ContentPayload::Empty);
    }

    #[test]
    fn style_changes() {
        let mut d = draft();
        change_style(&mut d, "a", "font_size", &json!(14)).unwrap();
        assert_eq!(d.element("a").unwrap().style.font_size, 14.0);
        assert!(matches!(change_style(&mut d, "a", "font_size", &json!(4)), Err(EditError::InvalidValue { .. })));
        assert_eq!(
            change_style(&mut d, "a", "shadow", &json!(1)),
            Err(EditError::UnknownAttribute("shadow".into()))
        );
        assert_eq!(
            recolor_element(&mut d, "a", ColorProperty::Text, "#000"),
            Err(EditError::MalformedColor("#000".into()))
        );
        let before = d.clone();
        let params: BTreeMap<String, Value> =
            [("font_size".to_string(), json!(16)), ("bogus".to_string(), json!(1))].into();
        assert!(reformat_text(&mut d, "a", &params).is_err());
        assert_eq!(d, before);
    }

    #[test]
    fn spacing_moves_the_later_element() {
        let mut d = draft();
        adjust_spacing(&mut d, "a", "b", 30.0, Direction::Horizontal).unwrap();
        assert_eq!(d.element("b").unwrap().geometry.x, 130.0);
        adjust_spacing(&mut d, "b", "a", 20.0, Direction::Vertical).unwrap();
        assert_eq!(d.element("b").unwrap().geometry.y, 70.0);
        assert_eq!(
            adjust_spacing(&mut d, "a", "a", 1.0, Direction::Vertical),
            Err(EditError::SameElement("a".into()))
        );
    }

    #[test]
    fn command_json_shape() {
        let c = EditCommand::MoveElement { id: "a".into(), dx: 1.0, dy: 2.0 };
        assert_eq!(c.to_json(), r#"{"primitive":"move_element","params":{"id":"a","dx":1.0,"dy":2.0}}"#);
        let r = EditCommand::from_json(r#"{"primitive":"resize_element","params":{"id":"a","dw":1,"dh":2}}"#).unwrap();
        assert_eq!(
            r,
            EditCommand::ResizeElement { id: "a".into(), dw: 1.0, dh: 2.0, anchor_point: "center".into() }
        );
        assert!(EditCommand::from_json(r#"{"primitive":"fly","params":{}}"#).is_err());
        assert!(EditCommand::from_json(r#"{"primitive":"delete_bullet_point","params":{"id":"a","index":0,"x":1}}"#).is_err());
    }
}
