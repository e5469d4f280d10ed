use std::collections::BTreeMap;

use pulldown_cmark::{Event, HeadingLevel, Options, Parser, Tag, TagEnd};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitType {
    Heading1,
    Heading2,
    Heading3,
    Paragraph,
    ListItem,
    ImageDescriptionPlaceholder,
    TableSummaryPlaceholder,
    CodeBlock,
    Blockquote,
}

impl UnitType {
    pub fn is_placeholder(self) -> bool {
        matches!(self, UnitType::ImageDescriptionPlaceholder | UnitType::TableSummaryPlaceholder)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DocumentUnit {
    pub unit_id: String,
    pub text_content: String,
    pub unit_type: UnitType,
    #[serde(default)]
    pub concise_theme: Option<String>,
    #[serde(default)]
    pub source_visual_id: Option<String>,
}

impl DocumentUnit {
    pub fn check(&self) -> Result<(), String> {
        if self.unit_type.is_placeholder() != self.source_visual_id.is_some() {
            return Err(format!("{}: source_visual_id must be set exactly for placeholders", self.unit_id));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VisualEntry {
    /// Image path, or the table re-serialised as pipe rows.
    pub source: String,
    /// Alt text or table caption.
    pub description: String,
    /// Set for tables: the description is the caption, not a summary.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub caption_only: bool,
}

pub type VisualMap = BTreeMap<String, VisualEntry>;

pub fn image_id(n: usize) -> String {
    format!("doc_img_{n:03}")
}

pub fn table_id(n: usize) -> String {
    format!("doc_table_{n:03}")
}

fn heading_type(level: HeadingLevel) -> UnitType {
    match level {
        HeadingLevel::H1 => UnitType::Heading1,
        HeadingLevel::H2 => UnitType::Heading2,
        _ => UnitType::Heading3,
    }
}

fn collapse(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

const CAPTION_PREFIX: &str = "Table:";

#[derive(Default)]
struct Builder {
    units: Vec<(UnitType, String, Option<String>)>,
    visuals: VisualMap,
    images: usize,
    tables: usize,
    /// Unit being filled and its raw text.
    open: Option<(UnitType, String)>,
    item_depth: usize,
    quote_depth: usize,
    image_alt: Option<(String, String)>,
    table: Option<Vec<Vec<String>>>,
    cell: Option<String>,
}

impl Builder {
    fn flush(&mut self) {
        if let Some((ty, text)) = self.open.take() {
            let text = if ty == UnitType::CodeBlock {
                text.trim_end_matches('\n').to_string()
            } else {
                collapse(&text)
            };
            if !text.is_empty() {
                self.units.push((ty, text, None));
            }
        }
    }

    fn open(&mut self, ty: UnitType) {
        self.flush();
        self.open = Some((ty, String::new()));
    }

    /// The unit type ordinary text belongs to right now.
    fn context(&self) -> UnitType {
        if self.quote_depth > 0 {
            UnitType::Blockquote
        } else if self.item_depth > 0 {
            UnitType::ListItem
        } else {
            UnitType::Paragraph
        }
    }

    fn text(&mut self, s: &str) {
        if let Some(c) = &mut self.cell {
            c.push_str(s);
        } else if let Some((alt, _)) = &mut self.image_alt {
            alt.push_str(s);
        } else {
            if self.open.is_none() {
                self.open = Some((self.context(), String::new()));
            }
            self.open.as_mut().expect("just opened").1.push_str(s);
        }
    }

    fn start(&mut self, tag: Tag<'_>) {
        match tag {
            Tag::Heading { level, .. } => self.open(heading_type(level)),
            Tag::Paragraph => {
                if self.item_depth == 0 && self.quote_depth == 0 {
                    self.open(UnitType::Paragraph);
                } else if let Some((_, t)) = &mut self.open {
                    t.push(' ');
                }
            }
            Tag::Item => {
                self.item_depth += 1;
                if self.quote_depth == 0 {
                    self.open(UnitType::ListItem);
                }
            }
            // A nested list ends the text of its parent item.
            Tag::List(_) if self.quote_depth == 0 => self.flush(),
            Tag::BlockQuote(_) => {
                if self.quote_depth == 0 {
                    self.open(UnitType::Blockquote);
                }
                self.quote_depth += 1;
            }
            Tag::CodeBlock(_) => {
                if self.quote_depth == 0 {
                    self.open(UnitType::CodeBlock);
                }
            }
            Tag::Image { dest_url, .. } => {
                let resume = self.open.as_ref().map(|(t, _)| *t);
                self.flush();
                if let Some(t) = resume {
                    self.open = Some((t, String::new()));
                }
                self.image_alt = Some((String::new(), dest_url.to_string()));
            }
            Tag::Table(_) => {
                self.flush();
                self.table = Some(Vec::new());
            }
            Tag::TableHead | Tag::TableRow => {
                if let Some(t) = &mut self.table {
                    t.push(Vec::new());
                }
            }
            Tag::TableCell => self.cell = Some(String::new()),
            _ => {}
        }
    }

    fn end(&mut self, tag: TagEnd) {
        match tag {
            TagEnd::Heading(_) | TagEnd::CodeBlock if self.quote_depth == 0 => self.flush(),
            TagEnd::Paragraph if self.item_depth == 0 && self.quote_depth == 0 => self.flush(),
            TagEnd::Item => {
                self.item_depth -= 1;
                if self.quote_depth == 0 {
                    self.flush();
                }
            }
            TagEnd::BlockQuote(_) => {
                self.quote_depth -= 1;
                if self.quote_depth == 0 {
                    self.flush();
                }
            }
            TagEnd::Image => {
                let (alt, path) = self.image_alt.take().expect("image was opened");
                let resume = self.open.take();
                self.images += 1;
                let id = image_id(self.images);
                let alt = collapse(&alt);
                self.units.push((
                    UnitType::ImageDescriptionPlaceholder,
                    format!("[IMAGE_DESCRIPTION: {id}: {alt}]"),
                    Some(id.clone()),
                ));
                self.visuals.insert(id, VisualEntry { source: path, description: alt, caption_only: false });
                self.open = resume;
            }
            TagEnd::TableCell => {
                let c = self.cell.take().unwrap_or_default();
                if let Some(row) = self.table.as_mut().and_then(|t| t.last_mut()) {
                    row.push(collapse(&c));
                }
            }
            TagEnd::Table => {
                let rows = self.table.take().unwrap_or_default();
                self.emit_table(rows);
            }
            _ => {}
        }
    }

    fn emit_table(&mut self, rows: Vec<Vec<String>>) {
        // A `Table: caption` paragraph directly before the table names it.
        let caption = match self.units.last() {
            Some((UnitType::Paragraph, text, None)) if text.starts_with(CAPTION_PREFIX) => {
                let c = text[CAPTION_PREFIX.len()..].trim().to_string();
                self.units.pop();
                Some(c)
            }
            _ => None,
        };
        let description = caption.unwrap_or_else(|| rows.first().map(|r| r.join(", ")).unwrap_or_default());
        self.tables += 1;
        let id = table_id(self.tables);
        let source = rows.iter().map(|r| format!("| {} |", r.join(" | "))).collect::<Vec<_>>().join("\n");
        self.units.push((
            UnitType::TableSummaryPlaceholder,
            format!("[TABLE_SUMMARY: {id}: {description}]"),
            Some(id.clone()),
        ));
        self.visuals.insert(id, VisualEntry { source, description, caption_only: true });
    }
}

/// Splits Markdown into content units in document order, replacing images
/// and tables with placeholders that carry their visual ids.
pub fn parse_markdown(doc: &str) -> (Vec<DocumentUnit>, VisualMap) {
    let mut b = Builder::default();
    let mut opts = Options::empty();
    opts.insert(Options::ENABLE_TABLES);
    opts.insert(Options::ENABLE_STRIKETHROUGH);
    for ev in Parser::new_ext(doc, opts) {
        match ev {
            Event::Start(t) => b.start(t),
            Event::End(t) => b.end(t),
            Event::Text(s) | Event::Code(s) => b.text(&s),
            Event::Html(s) | Event::InlineHtml(s) => b.text(&s),
            Event::SoftBreak | Event::HardBreak => {
                if b.open.as_ref().is_some_and(|(t, _)| *t == UnitType::CodeBlock) {
                    b.text("\n")
                } else {
                    b.text(" ")
                }
            }
            _ => {}
        }
    }
    b.flush();
    let units = b
        .units
        .into_iter()
        .enumerate()
        .map(|(i, (unit_type, text_content, source_visual_id))| DocumentUnit {
            unit_id: format!("doc_unit_{:03}", i + 1),
            text_content,
            unit_type,
            concise_theme: None,
            source_visual_id,
        })
        .collect();
    (units, b.visuals)
}

pub fn units_to_jsonl(units: &[DocumentUnit]) -> String {
    units
        .iter()
        .map(|u| serde_json::to_string(u).expect("unit serialises") + "\n")
        .collect()
}

pub fn units_from_jsonl(text: &str) -> Result<Vec<DocumentUnit>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let u: DocumentUnit = serde_json::from_str(line).map_err(|e| format!("line {}: {e}", i + 1))?;
        u.check().map_err(|e| format!("line {}: {e}", i + 1))?;
        out.push(u);
    }
    Ok(out)
}
