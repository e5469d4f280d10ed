//! Deterministic SVG rendering and the monospace text-metrics model shared
//! with the overflow critic.

use std::fmt::Write as _;

use crate::sir::{ContentPayload, SlideDraft, SlideElement, TextAlignment, CANVAS_HEIGHT, CANVAS_WIDTH};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TextMetrics {
    /// Advance of one character, as a multiple of the font size.
    pub char_width_factor: f64,
    /// Baseline-to-baseline distance, as a multiple of the font size.
    pub line_height_factor: f64,
    /// Indent of bullet text from the box's left edge, in ems.
    pub bullet_marker_indent: f64,
}

impl Default for TextMetrics {
    fn default() -> Self {
        TextMetrics {
            char_width_factor: 0.6,
            line_height_factor: 1.3,
            bullet_marker_indent: 1.2,
        }
    }
}

impl TextMetrics {
    pub fn line_height(&self, font_size: f64) -> f64 {
        self.line_height_factor * font_size
    }

    /// Characters that fit on one line; never less than one.
    pub fn chars_per_line(&self, font_size: f64, box_width: f64) -> usize {
        let n = (box_width / (self.char_width_factor * font_size)).floor();
        if n.is_finite() && n >= 1.0 {
            n as usize
        } else {
            1
        }
    }

    /// Greedy word wrap; a word longer than a line sits on a line of its own.
    pub fn wrap(&self, text: &str, font_size: f64, box_width: f64) -> Vec<String> {
        let limit = self.chars_per_line(font_size, box_width);
        let mut lines = Vec::new();
        let mut cur = String::new();
        let mut cur_len = 0usize;
        for word in text.split_whitespace() {
            let wlen = word.chars().count();
            if cur_len > 0 && cur_len + 1 + wlen <= limit {
                cur.push(' ');
                cur.push_str(word);
                cur_len += 1 + wlen;
            } else {
                if cur_len > 0 {
                    lines.push(std::mem::take(&mut cur));
                }
                cur.push_str(word);
                cur_len = wlen;
            }
        }
        if cur_len > 0 {
            lines.push(cur);
        }
        lines
    }

    /// Height needed to set `text` at `font_size` inside `box_width`.
    pub fn measure_text(&self, text: &str, font_size: f64, box_width: f64) -> f64 {
        self.wrap(text, font_size, box_width).len() as f64 * self.line_height(font_size)
    }
}

/// Free function form of [`TextMetrics::measure_text`] with default metrics.
pub fn measure_text(text: &str, font_size: f64, box_width: f64) -> f64 {
    TextMetrics::default().measure_text(text, font_size, box_width)
}

/// One laid-out line of an element's text.
#[derive(Debug, Clone, PartialEq)]
pub struct TextLine {
    pub text: String,
    /// Left edge of the text column (after any bullet indent).
    pub column_left: f64,
    pub column_width: f64,
    /// Baseline y.
    pub baseline: f64,
    /// Whether a bullet marker precedes this line.
    pub bullet: bool,
}

/// Text layout of an element under `metrics`: the lines the renderer draws
/// and the total height they need.
#[derive(Debug, Clone, PartialEq)]
pub struct TextLayout {
    pub lines: Vec<TextLine>,
    pub required_height: f64,
}

pub fn layout_text(element: &SlideElement, metrics: &TextMetrics) -> TextLayout {
    let g = element.geometry;
    let fs = element.style.font_size;
    let lh = metrics.line_height(fs);
    let (indent, bulleted) = match element.content {
        ContentPayload::TextBody { .. } => (metrics.bullet_marker_indent * fs, true),
        _ => (0.0, false),
    };
    let column_left = g.x + indent;
    let column_width = (g.w - indent).max(0.0);
    let mut lines = Vec::new();
    for part in element.content.text_parts() {
        for (i, text) in metrics.wrap(part, fs, column_width).into_iter().enumerate() {
            let baseline = g.y + lines.len() as f64 * lh + fs;
            lines.push(TextLine {
                text,
                column_left,
                column_width,
                baseline,
                bullet: bulleted && i == 0,
            });
        }
    }
    let required_height = lines.len() as f64 * lh;
    TextLayout {
        lines,
        required_height,
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            // Control characters other than tab/newline are not legal XML 1.0.
            c if (c as u32) < 0x20 && c != '\t' && c != '\n' && c != '\r' => out.push(' '),
            c => out.push(c),
        }
    }
    out
}

const IMAGE_FILL: &str = "#E0E0E0";
const IMAGE_STROKE: &str = "#9E9E9E";
const BACKGROUND: &str = "#FFFFFF";

/// Renders a draft to SVG. Elements are painted in ascending `z_order`,
/// declaration order breaking ties.
pub fn render_svg(draft: &SlideDraft) -> String {
    render_svg_with(draft, &TextMetrics::default())
}

pub fn render_svg_with(draft: &SlideDraft, metrics: &TextMetrics) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = CANVAS_WIDTH,
        h = CANVAS_HEIGHT
    );
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{}" height="{}" fill="{BACKGROUND}"/>"#,
        CANVAS_WIDTH, CANVAS_HEIGHT
    );
    let mut order: Vec<(usize, &SlideElement)> = draft.elements().iter().enumerate().collect();
    order.sort_by_key(|(i, e)| (e.z_order, *i));
    for (_, el) in order {
        render_element(&mut out, el, metrics);
    }
    out.push_str("</svg>\n");
    out
}

fn render_element(out: &mut String, el: &SlideElement, metrics: &TextMetrics) {
    let g = el.geometry;
    let s = &el.style;
    let opacity = if s.opacity < 1.0 {
        format!(r#" opacity="{}""#, s.opacity)
    } else {
        String::new()
    };
    let _ = writeln!(out, r#"<g id="{}"{opacity}>"#, escape(&el.id));

    if let ContentPayload::Image { visual_id, .. } = &el.content {
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{IMAGE_FILL}" stroke="{IMAGE_STROKE}" stroke-width="1"/>"#,
            g.x, g.y, g.w, g.h
        );
        let _ = writeln!(
            out,
            r##"<text x="{}" y="{}" font-family="monospace" font-size="14" text-anchor="middle" fill="#424242">{}</text>"##,
            g.center_x(),
            g.center_y(),
            escape(visual_id)
        );
    } else if s.fill_color.is_some() || (s.border_color.is_some() && s.border_width > 0.0) {
        let fill = s.fill_color.as_ref().map_or("none", |c| c.as_str());
        let (stroke, width) = match &s.border_color {
            Some(c) if s.border_width > 0.0 => (c.as_str(), s.border_width),
            _ => ("none", 0.0),
        };
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{fill}" stroke="{stroke}" stroke-width="{width}"/>"#,
            g.x, g.y, g.w, g.h
        );
    }

    if el.content.is_text() {
        let layout = layout_text(el, metrics);
        let weight = match s.font_weight {
            crate::sir::FontWeight::Normal => "normal",
            crate::sir::FontWeight::Bold => "bold",
        };
        for line in &layout.lines {
            if line.bullet {
                let _ = writeln!(
                    out,
                    r#"<text x="{}" y="{}" font-family="monospace" font-size="{}" fill="{}">&#8226;</text>"#,
                    g.x,
                    line.baseline,
                    s.font_size,
                    s.font_color
                );
            }
            let (x, anchor) = match s.text_alignment {
                TextAlignment::Left => (line.column_left, "start"),
                TextAlignment::Center => (line.column_left + line.column_width / 2.0, "middle"),
                TextAlignment::Right => (line.column_left + line.column_width, "end"),
            };
            let _ = writeln!(
                out,
                r#"<text x="{x}" y="{}" font-family="monospace" font-size="{}" font-weight="{weight}" text-anchor="{anchor}" fill="{}">{}</text>"#,
                line.baseline,
                s.font_size,
                s.font_color,
                escape(&line.text)
            );
        }
    }
    out.push_str("</g>\n");
}

/// Index page listing rendered slides in order.
pub fn deck_html(svg_files: &[String]) -> String {
    let mut out = String::from(
        "<!DOCTYPE html>\n<html>\n<head><meta charset=\"utf-8\"><title>Deck</title></head>\n<body>\n",
    );
    for (i, f) in svg_files.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<section><h2>Slide {}</h2><img src="{}" width="640" height="360" alt="slide {}"></section>"#,
            i + 1,
            escape(f),
            i + 1
        );
    }
    out.push_str("</body>\n</html>\n");
    out
}
