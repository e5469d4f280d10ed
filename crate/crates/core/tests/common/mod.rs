#![allow(dead_code)]

pub mod oracles;

use rand::seq::SliceRandom;
use rand::Rng;
use slidesynth::ldl::vocab::all_tokens;
use slidesynth::ldl::{GrammarState, Token};

/// The infographic example, comments included.
pub const INFOGRAPHIC: &str = "<SOS>
SLIDE_TITLE ATTR_STYLE_MODERN_INFOGRAPHIC <SEP> /* Assuming a new attribute for overall style */

/* Header Section */
ELEM_IMAGE ATTR_IMAGE_ASPECT_SQUARE ATTR_SIZE_SECONDARY POS_TOP_LEFT <SEP> /* Discord Logo */
ELEM_TITLE ATTR_TEXT_LENGTH_SHORT ATTR_SIZE_PRIMARY POS_TOP POS_CENTER <SEP> /* INFOGRAPHIC STYLE */
ELEM_SUBTITLE ATTR_TEXT_LENGTH_MEDIUM POS_TOP POS_CENTER <SEP> /* INSERT YOUR SUBTITLE - below title */
ELEM_TEXT_BODY ATTR_TEXT_LENGTH_SHORT POS_TOP_LEFT ATTR_STYLE_TAG <SEP> 

/* Main Content - Left Column (approximated as two grouped content blocks) */
/* Block 1 & 2 (Top-Left Quadrant) */
ELEM_CONTENT_BLOCK ATTR_LAYOUT_ICON_LEFT ATTR_TEXT_POINTS_FEW ATTR_TEXT_LENGTH_SHORT POS_MIDDLE_LEFT_UPPER <SEP>
ELEM_CONTENT_BLOCK ATTR_LAYOUT_ICON_LEFT ATTR_TEXT_POINTS_FEW ATTR_TEXT_LENGTH_SHORT POS_MIDDLE_LEFT_UPPER <SEP> 
/* Block 3 & 4 (Bottom-Left Quadrant) */
ELEM_CONTENT_BLOCK ATTR_LAYOUT_ICON_LEFT ATTR_TEXT_POINTS_FEW ATTR_TEXT_LENGTH_SHORT POS_MIDDLE_LEFT_LOWER <SEP>
ELEM_CONTENT_BLOCK ATTR_LAYOUT_ICON_LEFT ATTR_TEXT_POINTS_FEW ATTR_TEXT_LENGTH_SHORT POS_MIDDLE_LEFT_LOWER <SEP>

/* Main Content - Right Column */
ELEM_IMAGE ATTR_IMAGE_ASPECT_WIDE ATTR_SIZE_PRIMARY POS_MIDDLE_RIGHT <SEP> /* Robots Image */

/* Middle-Bottom Text */
ELEM_TEXT_BODY ATTR_TEXT_LENGTH_LONG POS_CENTER_HORIZONTAL POS_BOTTOM_MIDDLE_SECTION <SEP> /* ChatGPT Layout text */

/* Footer Section */
ELEM_FOOTER_FEATURED ATTR_LAYOUT_ICON_LEFT ATTR_TEXT_LENGTH_MEDIUM POS_BOTTOM POS_FULL_WIDTH <SEP> /* Bottom bar with icon and text */

<EOS>";

/// The two-column example with a central diagram and six text blocks.
pub const CHARACTERISTICS: &str = "<SOS>
SLIDE_CONTENT_TWO_COL ATTR_CENTER_IMAGE <SEP>
ELEM_TITLE ATTR_TEXT_LENGTH_MEDIUM POS_TOP POS_CENTER <SEP>
ELEM_IMAGE ATTR_IMAGE_ASPECT_TALL ATTR_SIZE_PRIMARY POS_CENTER_HORIZONTAL POS_CENTER_VERTICAL <SEP>
ELEM_TEXT_BODY ATTR_TEXT_POINTS_FEW ATTR_TEXT_LENGTH_MEDIUM POS_MIDDLE_LEFT_UPPER <SEP>
ELEM_TEXT_BODY ATTR_TEXT_POINTS_FEW ATTR_TEXT_LENGTH_SHORT POS_MIDDLE_LEFT_CENTER <SEP>
ELEM_TEXT_BODY ATTR_TEXT_POINTS_FEW ATTR_TEXT_LENGTH_MEDIUM POS_MIDDLE_LEFT_LOWER <SEP>
ELEM_TEXT_BODY ATTR_TEXT_POINTS_FEW ATTR_TEXT_LENGTH_MEDIUM POS_MIDDLE_RIGHT_UPPER <SEP>
ELEM_TEXT_BODY ATTR_TEXT_POINTS_FEW ATTR_TEXT_LENGTH_MEDIUM POS_MIDDLE_RIGHT_CENTER <SEP>
ELEM_TEXT_BODY ATTR_TEXT_POINTS_FEW ATTR_TEXT_LENGTH_MEDIUM POS_MIDDLE_RIGHT_LOWER <SEP>
<EOS>";

/// A random walk through the grammar automaton. Every step picks uniformly
/// among the admissible tokens, so lengths spread over the whole range.
pub fn random_sequence<R: Rng>(rng: &mut R, max_len: usize) -> Vec<Token> {
    let mut g = GrammarState::new(max_len);
    let mut out = Vec::new();
    while !g.is_done() {
        let allowed: Vec<Token> = all_tokens().filter(|t| g.allows(*t)).collect();
        let tok = *allowed.choose(rng).expect("grammar never dead-ends");
        g.advance(tok);
        out.push(tok);
    }
    out
}

use slidesynth::geom::Rect;
use slidesynth::sir::{Color, ContentPayload, FontWeight, SlideDraft, SlideElement, Style, TextAlignment};

fn color<R: Rng>(rng: &mut R) -> Color {
    Color::parse(&format!("#{:06X}", rng.gen_range(0..0x100_0000u32))).unwrap()
}

/// A valid draft with 1–8 elements of mixed kinds, not necessarily inside
/// the canvas.
pub fn random_draft<R: Rng>(rng: &mut R) -> SlideDraft {
    let slide = Token::lookup(["SLIDE_BLANK", "SLIDE_TITLE", "SLIDE_CONTENT_TWO_COL"].choose(rng).unwrap()).unwrap();
    let mut d = SlideDraft::new(slide);
    for i in 0..rng.gen_range(1..=8) {
        let (ty, content) = match rng.gen_range(0..5) {
            0 => ("ELEM_TITLE", ContentPayload::Title { text: format!("Heading {i}") }),
            1 => ("ELEM_IMAGE", ContentPayload::Image { visual_id: format!("doc_img_{:03}", i + 1), aspect: rng.gen_range(0.5..2.0) }),
            2 => ("ELEM_FOOTER", ContentPayload::Empty),
            _ => (
                "ELEM_TEXT_BODY",
                ContentPayload::TextBody {
                    bullets: (0..rng.gen_range(1..6)).map(|b| format!("point {b} of element {i}")).collect(),
                },
            ),
        };
        let style = Style {
            font_size: rng.gen_range(8..60) as f64,
            font_weight: if rng.gen() { FontWeight::Bold } else { FontWeight::Normal },
            font_color: color(rng),
            fill_color: rng.gen::<bool>().then(|| color(rng)),
            border_color: rng.gen::<bool>().then(|| color(rng)),
            border_width: rng.gen_range(0..4) as f64,
            text_alignment: *[TextAlignment::Left, TextAlignment::Center, TextAlignment::Right].choose(rng).unwrap(),
            opacity: rng.gen_range(0.2..=1.0),
        };
        let geom = Rect::new(
            rng.gen_range(-50.0..1200.0),
            rng.gen_range(-50.0..680.0),
            rng.gen_range(10.0..700.0),
            rng.gen_range(10.0..400.0),
        );
        let el = SlideElement::new(format!("el_{i}"), Token::lookup(ty).unwrap(), geom)
            .with_content(content)
            .with_style(style)
            .with_z(i as i64);
        d.push(el).unwrap();
    }
    d
}

use std::collections::BTreeMap;

use serde_json::{json, Value};
use slidesynth::edit::{Alignment, EditCommand, EditError, STYLE_ATTRIBUTES};

const PRIMITIVES: usize = 9;

fn some_id<R: Rng>(rng: &mut R, d: &SlideDraft) -> String {
    match rng.gen_range(0..20) {
        0 => "missing".into(),
        1 => "slide_bounds".into(),
        _ => d.elements().choose(rng).unwrap().id.clone(),
    }
}

fn style_value<R: Rng>(rng: &mut R, attr: &str) -> Value {
    let bad = rng.gen_range(0..8) == 0;
    match (attr, bad) {
        ("font_size", false) => json!(rng.gen_range(6..=96)),
        ("font_size", true) => json!(4),
        ("font_weight", false) => json!(if rng.gen() { "bold" } else { "normal" }),
        ("text_alignment", false) => json!(["left", "center", "right"].choose(rng).unwrap()),
        ("opacity", false) => json!(rng.gen_range(0.0..=1.0)),
        ("opacity", true) => json!(1.5),
        ("border_width", false) => json!(rng.gen_range(0..5)),
        ("border_width", true) => json!(-1),
        ("fill_color" | "border_color", false) if rng.gen_range(0..4) == 0 => Value::Null,
        (_, false) => json!(format!("#{:06X}", rng.gen_range(0..0x100_0000u32))),
        (_, true) => json!("#12"),
    }
}

/// A random command against `d`, valid most of the time.
pub fn random_command<R: Rng>(rng: &mut R, d: &SlideDraft) -> EditCommand {
    let id = some_id(rng, d);
    let small = |rng: &mut R| rng.gen_range(-60..=60) as f64;
    match rng.gen_range(0..PRIMITIVES) {
        0 => EditCommand::MoveElement { id, dx: small(rng), dy: small(rng) },
        1 => {
            let alignment_type = if rng.gen_range(0..15) == 0 {
                "diagonal".to_string()
            } else {
                Alignment::ALL.choose(rng).unwrap().as_str().to_string()
            };
            let reference_id = match rng.gen_range(0..4) {
                0 => "slide_bounds".into(),
                1 => "slide_center".into(),
                _ => some_id(rng, d),
            };
            EditCommand::AdjustAlignment { id, reference_id, alignment_type }
        }
        2 => {
            let anchors = [
                "center", "top_left", "top_right", "bottom_left", "bottom_right", "middle_left", "middle_right",
                "top_center", "bottom_center", "nowhere",
            ];
            let dw = if rng.gen_range(0..10) == 0 { -1000.0 } else { small(rng) };
            EditCommand::ResizeElement { id, dw, dh: small(rng), anchor_point: anchors.choose(rng).unwrap().to_string() }
        }
        3 => EditCommand::RewriteBulletPoint { id, index: rng.gen_range(0..6), new_text: format!("rewritten {}", rng.gen::<u16>()) },
        4 => EditCommand::DeleteBulletPoint { id, index: rng.gen_range(0..6) },
        5 => {
            let attribute = if rng.gen_range(0..10) == 0 { "shadow" } else { STYLE_ATTRIBUTES.choose(rng).unwrap() };
            let value = style_value(rng, attribute);
            EditCommand::ChangeStyle { id, attribute: attribute.into(), value }
        }
        6 => {
            let property = ["fill", "text", "border", "glow"].choose(rng).unwrap().to_string();
            let color_value = if rng.gen_range(0..8) == 0 { "#000".into() } else { format!("#{:06x}", rng.gen_range(0..0x100_0000u32)) };
            EditCommand::RecolorElement { id, property, color_value }
        }
        7 => {
            let mut style_params = BTreeMap::new();
            for _ in 0..rng.gen_range(0..4) {
                let a = if rng.gen_range(0..12) == 0 { "bogus" } else { STYLE_ATTRIBUTES.choose(rng).unwrap() };
                style_params.insert(a.to_string(), style_value(rng, a));
            }
            EditCommand::ReformatText { id, style_params }
        }
        _ => {
            let target_space = if rng.gen_range(0..12) == 0 { -5.0 } else { rng.gen_range(0..80) as f64 };
            EditCommand::AdjustSpacing {
                id1: id,
                id2: some_id(rng, d),
                target_space,
                direction: ["horizontal", "vertical", "diagonal"][rng.gen_range(0..3)].to_string(),
            }
        }
    }
}

/// Names of fields that differ between two versions of one element.
pub fn changed_fields(a: &SlideElement, b: &SlideElement) -> Vec<String> {
    let (ja, jb) = (serde_json::to_value(a).unwrap(), serde_json::to_value(b).unwrap());
    let mut out = Vec::new();
    for (k, va) in ja.as_object().unwrap() {
        let vb = &jb[k];
        match (va, vb) {
            (Value::Object(oa), Value::Object(ob)) if k != "content" => {
                for (kk, x) in oa {
                    if ob.get(kk) != Some(x) {
                        out.push(format!("{k}.{kk}"));
                    }
                }
            }
            _ if va != vb => out.push(k.clone()),
            _ => {}
        }
    }
    out
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

/// Checks the documented effect of a successful command: postcondition on
/// the target and no change anywhere else.
pub fn check_success(before: &SlideDraft, after: &SlideDraft, cmd: &EditCommand) -> Result<(), String> {
    if before.iteration() != after.iteration() || before.slide_type() != after.slide_type() {
        return Err("draft header changed".into());
    }
    let ids: Vec<_> = before.elements().iter().map(|e| &e.id).collect();
    let ids_after: Vec<_> = after.elements().iter().map(|e| &e.id).collect();
    if ids != ids_after {
        return Err("element list changed".into());
    }
    let mut touched: Vec<(String, Vec<String>)> = Vec::new();
    for (a, b) in before.elements().iter().zip(after.elements()) {
        let c = changed_fields(a, b);
        if !c.is_empty() {
            touched.push((a.id.clone(), c));
        }
    }
    let el = |d: &SlideDraft, id: &str| d.element(id).unwrap().clone();
    let only = |id: &str, allowed: &[&str]| -> Result<(), String> {
        for (t, fields) in &touched {
            if t != id {
                return Err(format!("{} touched {t}", cmd.primitive()));
            }
            if let Some(f) = fields.iter().find(|f| !allowed.contains(&f.as_str())) {
                return Err(format!("{} changed {f}", cmd.primitive()));
            }
        }
        Ok(())
    };
    match cmd {
        EditCommand::MoveElement { id, dx, dy } => {
            only(id, &["geometry.x", "geometry.y"])?;
            let (g0, g1) = (el(before, id).geometry, el(after, id).geometry);
            if g1.x != g0.x + dx || g1.y != g0.y + dy {
                return Err("move arithmetic".into());
            }
        }
        EditCommand::AdjustAlignment { id, reference_id, alignment_type } => {
            only(id, &["geometry.x", "geometry.y"])?;
            let r = before.resolve_box(reference_id).unwrap();
            let g = el(after, id).geometry;
            let (x, y) = match alignment_type.as_str() {
                "left" => (g.left(), r.left()),
                "right" => (g.right(), r.right()),
                "top" => (g.top(), r.top()),
                "bottom" => (g.bottom(), r.bottom()),
                "center_h" => (g.center_x(), r.center_x()),
                _ => (g.center_y(), r.center_y()),
            };
            if !close(x, y) {
                return Err(format!("alignment {alignment_type}: {x} vs {y}"));
            }
        }
        EditCommand::ResizeElement { id, dw, dh, anchor_point } => {
            only(id, &["geometry.x", "geometry.y", "geometry.w", "geometry.h"])?;
            let (g0, g1) = (el(before, id).geometry, el(after, id).geometry);
            if !close(g1.w, g0.w + dw) || !close(g1.h, g0.h + dh) || g1.w <= 0.0 || g1.h <= 0.0 {
                return Err("resize size".into());
            }
            let (fx, fy) = match anchor_point.as_str() {
                "center" => (0.5, 0.5),
                "top_left" => (0.0, 0.0),
                "top_right" => (1.0, 0.0),
                "bottom_left" => (0.0, 1.0),
                "bottom_right" => (1.0, 1.0),
                "middle_left" => (0.0, 0.5),
                "middle_right" => (1.0, 0.5),
                "top_center" => (0.5, 0.0),
                _ => (0.5, 1.0),
            };
            if !close(g0.x + fx * g0.w, g1.x + fx * g1.w) || !close(g0.y + fy * g0.h, g1.y + fy * g1.h) {
                return Err("resize anchor moved".into());
            }
        }
        EditCommand::RewriteBulletPoint { id, index, new_text } => {
            only(id, &["content"])?;
            let (ContentPayload::TextBody { bullets: b0 }, ContentPayload::TextBody { bullets: b1 }) =
                (el(before, id).content, el(after, id).content)
            else {
                return Err("rewrite lost the text body".into());
            };
            let mut expect = b0.clone();
            expect[*index] = new_text.clone();
            if b1 != expect {
                return Err("rewrite touched other bullets".into());
            }
        }
        EditCommand::DeleteBulletPoint { id, index } => {
            only(id, &["content"])?;
            let ContentPayload::TextBody { bullets: b0 } = el(before, id).content else {
                return Err("delete on non-text".into());
            };
            let mut expect = b0.clone();
            expect.remove(*index);
            let want = if expect.is_empty() { ContentPayload::Empty } else { ContentPayload::TextBody { bullets: expect } };
            if el(after, id).content != want {
                return Err("delete result".into());
            }
        }
        EditCommand::ChangeStyle { id, attribute, value } => {
            only(id, &[&format!("style.{attribute}")])?;
            let got = serde_json::to_value(&el(after, id).style).unwrap()[attribute.as_str()].clone();
            if !same_value(&got, value) {
                return Err(format!("style {attribute}: {got} vs {value}"));
            }
        }
        EditCommand::RecolorElement { id, property, color_value } => {
            let attr = match property.as_str() {
                "fill" => "fill_color",
                "text" => "font_color",
                _ => "border_color",
            };
            only(id, &[&format!("style.{attr}")])?;
            let got = serde_json::to_value(&el(after, id).style).unwrap()[attr].clone();
            if got != json!(color_value.to_uppercase()) {
                return Err("recolor".into());
            }
        }
        EditCommand::ReformatText { id, style_params } => {
            let allowed: Vec<String> = style_params.keys().map(|k| format!("style.{k}")).collect();
            let allowed: Vec<&str> = allowed.iter().map(String::as_str).collect();
            only(id, &allowed)?;
            let style = serde_json::to_value(&el(after, id).style).unwrap();
            for (k, v) in style_params {
                if !same_value(&style[k.as_str()], v) {
                    return Err(format!("reformat {k}"));
                }
            }
        }
        EditCommand::AdjustSpacing { id1, id2, target_space, direction } => {
            let (a, b) = (el(before, id1).geometry, el(before, id2).geometry);
            let horizontal = direction == "horizontal";
            let (la, lb) = if horizontal { (a.left(), b.left()) } else { (a.top(), b.top()) };
            let (earlier, later) = if la > lb { (id2, id1) } else { (id1, id2) };
            only(later, &[if horizontal { "geometry.x" } else { "geometry.y" }])?;
            let (e, l) = (el(after, earlier).geometry, el(after, later).geometry);
            let gap = if horizontal { l.left() - e.right() } else { l.top() - e.bottom() };
            if !close(gap, *target_space) {
                return Err(format!("gap {gap} != {target_space}"));
            }
        }
    }
    Ok(())
}

fn same_value(got: &Value, want: &Value) -> bool {
    match (got.as_f64(), want.as_f64()) {
        (Some(a), Some(b)) => a == b,
        _ => match (got, want) {
            (Value::String(a), Value::String(b)) => a.eq_ignore_ascii_case(b),
            _ => got == want,
        },
    }
}

/// Whether `err` is the error the command's inputs call for.
pub fn error_is_expected(d: &SlideDraft, cmd: &EditCommand, err: &EditError) -> bool {
    let missing = |id: &str| d.element(id).is_none();
    match err {
        EditError::ElementNotFound(id) => missing(id) && id != "slide_bounds",
        EditError::ImmutableTarget(id) => id == "slide_bounds" || id == "slide_center",
        EditError::NotTextElement(id) => !matches!(d.element(id).unwrap().content, ContentPayload::TextBody { .. }),
        EditError::IndexOutOfRange { index, len } => index >= len,
        EditError::DegenerateSize { w, h } => *w <= 0.0 || *h <= 0.0,
        EditError::SameElement(_) => matches!(cmd, EditCommand::AdjustSpacing { id1, id2, .. } if id1 == id2),
        _ => true,
    }
}
