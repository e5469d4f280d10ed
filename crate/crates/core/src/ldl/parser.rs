use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::vocab::{Token, TokenKind};
use super::{LdlError, MAX_SEQUENCE_LEN};

/// One `<SEP>`-delimited element declaration.
///
/// `modifiers` keeps attribute and position tokens in their written order so
/// that re-serialising a parsed sequence reproduces it token for token.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementDecl {
    pub elem_type: Token,
    pub modifiers: Vec<Token>,
}

impl ElementDecl {
    pub fn new(elem_type: Token) -> Self {
        ElementDecl {
            elem_type,
            modifiers: Vec::new(),
        }
    }

    pub fn with(mut self, tok: Token) -> Self {
        self.modifiers.push(tok);
        self
    }

    pub fn attrs(&self) -> impl Iterator<Item = Token> + '_ {
        self.modifiers
            .iter()
            .copied()
            .filter(|t| t.kind() == TokenKind::Attr)
    }

    pub fn positions(&self) -> impl Iterator<Item = Token> + '_ {
        self.modifiers
            .iter()
            .copied()
            .filter(|t| t.kind() == TokenKind::Pos)
    }

    pub fn has_attr(&self, name: &str) -> bool {
        self.attrs().any(|t| t.name() == name)
    }
}

/// A grammatically valid layout prototype.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedLayout {
    pub slide_type: Token,
    pub slide_attrs: Vec<Token>,
    pub elements: Vec<ElementDecl>,
    /// Whether the last declaration was followed by a `<SEP>` before `<EOS>`,
    /// as in hand-written listings that terminate every line with `<SEP>`.
    #[serde(default)]
    pub trailing_separator: bool,
}

impl ParsedLayout {
    pub fn new(slide_type: Token) -> Self {
        ParsedLayout {
            slide_type,
            slide_attrs: Vec::new(),
            elements: Vec::new(),
            trailing_separator: false,
        }
    }

    pub fn to_tokens(&self) -> Vec<Token> {
        let mut out = vec![Token::SOS, self.slide_type];
        out.extend(&self.slide_attrs);
        for el in &self.elements {
            out.push(Token::SEP);
            out.push(el.elem_type);
            out.extend(&el.modifiers);
        }
        if self.trailing_separator {
            out.push(Token::SEP);
        }
        out.push(Token::EOS);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ViolationKind {
    LengthExceeded,
    GrammarViolation,
    UnknownId,
}

/// A grammar or invariant violation at a token index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub position: usize,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} at {}: {}", self.kind, self.position, self.reason)
    }
}

impl Violation {
    fn grammar(reason: &str, position: usize) -> Self {
        Violation {
            kind: ViolationKind::GrammarViolation,
            position,
            reason: reason.to_string(),
        }
    }

    fn into_error(self) -> LdlError {
        match self.kind {
            ViolationKind::LengthExceeded => LdlError::LengthExceeded {
                len: self.position + 1,
            },
            _ => LdlError::GrammarViolation {
                reason: self.reason,
                position: self.position,
            },
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum State {
    ExpectSlideType,
    Header,
    AfterSep,
    Element,
}

/// Single pass over the sequence that both builds the layout and collects
/// every violation; `None` entries stand for ids outside the vocabulary.
fn analyze(items: &[Option<Token>]) -> (Option<ParsedLayout>, Vec<Violation>) {
    let mut violations = Vec::new();
    let n = items.len();
    if n > MAX_SEQUENCE_LEN {
        violations.push(Violation {
            kind: ViolationKind::LengthExceeded,
            position: n - 1,
            reason: format!("sequence has {n} tokens, limit is {MAX_SEQUENCE_LEN}"),
        });
    }
    if n == 0 {
        violations.push(Violation::grammar("empty sequence", 0));
        return (None, violations);
    }

    let starts_ok = items[0] == Some(Token::SOS);
    let ends_ok = n > 1 && items[n - 1] == Some(Token::EOS);
    if !starts_ok {
        violations.push(Violation::grammar("missing <SOS>", 0));
    }

    let mut state = State::ExpectSlideType;
    let mut slide_type = None;
    let mut slide_attrs = Vec::new();
    let mut elements: Vec<ElementDecl> = Vec::new();
    let mut seen_attrs: BTreeSet<Token> = BTreeSet::new();
    let mut reported_absent = false;

    let body_start = usize::from(starts_ok);
    let body_end = if ends_ok { n - 1 } else { n };
    for (i, item) in items.iter().enumerate().take(body_end).skip(body_start) {
        let Some(tok) = *item else {
            violations.push(Violation {
                kind: ViolationKind::UnknownId,
                position: i,
                reason: "token id outside the vocabulary".into(),
            });
            continue;
        };
        let mut absent = |violations: &mut Vec<Violation>| {
            if !reported_absent {
                reported_absent = true;
                violations.push(Violation::grammar("slide type absent", i));
            }
        };
        match tok.kind() {
            TokenKind::Reserved => violations.push(Violation::grammar("reserved token", i)),
            TokenKind::Special if tok == Token::SOS => {
                violations.push(Violation::grammar("unexpected <SOS>", i))
            }
            TokenKind::Special if tok == Token::EOS => {
                violations.push(Violation::grammar("unexpected <EOS>", i))
            }
            TokenKind::Special => match state {
                State::ExpectSlideType => {
                    absent(&mut violations);
                    state = State::AfterSep;
                }
                State::AfterSep => violations.push(Violation::grammar(
                    "empty element declaration",
                    i,
                )),
                State::Header | State::Element => state = State::AfterSep,
            },
            TokenKind::SlideType => {
                if state == State::ExpectSlideType {
                    slide_type = Some(tok);
                    state = State::Header;
                } else {
                    violations.push(Violation::grammar("duplicate slide type", i));
                }
            }
            TokenKind::ElemType => {
                match state {
                    State::ExpectSlideType => absent(&mut violations),
                    State::Header | State::Element => violations.push(Violation::grammar(
                        "missing <SEP> before element declaration",
                        i,
                    )),
                    State::AfterSep => {}
                }
                elements.push(ElementDecl::new(tok));
                seen_attrs.clear();
                state = State::Element;
            }
            TokenKind::Attr => match state {
                State::ExpectSlideType => absent(&mut violations),
                State::AfterSep => violations.push(Violation::grammar(
                    "element declaration must start with an element type",
                    i,
                )),
                State::Header => {
                    if slide_attrs.contains(&tok) {
                        violations.push(Violation::grammar("duplicate attribute", i));
                    } else {
                        slide_attrs.push(tok);
                    }
                }
                State::Element => {
                    if !seen_attrs.insert(tok) {
                        violations.push(Violation::grammar("duplicate attribute", i));
                    } else if let Some(el) = elements.last_mut() {
                        el.modifiers.push(tok);
                    }
                }
            },
            TokenKind::Pos => match state {
                State::ExpectSlideType => absent(&mut violations),
                State::Header => {
                    violations.push(Violation::grammar("position token in slide header", i))
                }
                State::AfterSep => violations.push(Violation::grammar(
                    "element declaration must start with an element type",
                    i,
                )),
                State::Element => {
                    if let Some(el) = elements.last_mut() {
                        el.modifiers.push(tok);
                    }
                }
            },
        }
    }

    if slide_type.is_none() && !reported_absent {
        violations.push(Violation::grammar("slide type absent", body_end.min(n - 1)));
    }
    if !ends_ok {
        violations.push(Violation::grammar("missing <EOS>", n - 1));
    }

    let layout = slide_type.map(|slide_type| ParsedLayout {
        slide_type,
        slide_attrs,
        elements,
        trailing_separator: state == State::AfterSep,
    });
    (layout, violations)
}

/// Parses a token list into a layout, failing on the first violation.
pub fn parse(tokens: &[Token]) -> Result<ParsedLayout, LdlError> {
    let items: Vec<_> = tokens.iter().copied().map(Some).collect();
    let (layout, violations) = analyze(&items);
    match violations.into_iter().next() {
        Some(v) => Err(v.into_error()),
        None => Ok(layout.expect("no violations implies a slide type")),
    }
}

/// All violations of a token sequence; empty iff [`parse`] succeeds.
pub fn validate(tokens: &[Token]) -> Vec<Violation> {
    let items: Vec<_> = tokens.iter().copied().map(Some).collect();
    analyze(&items).1
}

/// Validation over raw ids, which may fall outside the vocabulary.
pub fn validate_ids(ids: &[usize]) -> Vec<Violation> {
    let items: Vec<_> = ids.iter().map(|&id| Token::from_id(id)).collect();
    analyze(&items).1
}

/// Canonical text: single spaces, the slide header on the first line, one
/// declaration per following line (each introduced by its `<SEP>`), `<EOS>`
/// closing the last line. No trailing newline.
pub fn serialize(layout: &ParsedLayout) -> String {
    let mut out = String::from("<SOS> ");
    out.push_str(layout.slide_type.name());
    for a in &layout.slide_attrs {
        out.push(' ');
        out.push_str(a.name());
    }
    for el in &layout.elements {
        out.push_str("\n<SEP> ");
        out.push_str(el.elem_type.name());
        for m in &el.modifiers {
            out.push(' ');
            out.push_str(m.name());
        }
    }
    if layout.trailing_separator {
        out.push_str("\n<SEP>");
    }
    out.push_str(" <EOS>");
    out
}

/// Lex and parse in one step.
pub fn parse_text(text: &str) -> Result<ParsedLayout, LdlError> {
    parse(&super::lex(text)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
    Top,
    Bottom,
}

fn sides(tok: Token) -> &'static [Side] {
    use Side::*;
    match tok.name() {
        "POS_LEFT" | "POS_HALF_WIDTH_LEFT" => &[Left],
        "POS_RIGHT" | "POS_HALF_WIDTH_RIGHT" | "POS_MIDDLE_RIGHT" => &[Right],
        "POS_TOP" => &[Top],
        "POS_BOTTOM" | "POS_BOTTOM_MIDDLE_SECTION" => &[Bottom],
        "POS_TOP_LEFT" => &[Top, Left],
        "POS_TOP_RIGHT" => &[Top, Right],
        "POS_BOTTOM_LEFT" => &[Bottom, Left],
        "POS_BOTTOM_RIGHT" => &[Bottom, Right],
        "POS_MIDDLE_LEFT_UPPER" | "POS_MIDDLE_LEFT_CENTER" | "POS_MIDDLE_LEFT_LOWER" => &[Left],
        "POS_MIDDLE_RIGHT_UPPER" | "POS_MIDDLE_RIGHT_CENTER" | "POS_MIDDLE_RIGHT_LOWER" => {
            &[Right]
        }
        _ => &[],
    }
}

/// Non-fatal findings: an element whose position tokens pull to opposite
/// sides (left and right, or top and bottom). Resolution is left to the
/// instantiator, where the later token wins.
pub fn position_conflicts(layout: &ParsedLayout) -> Vec<String> {
    let mut out = Vec::new();
    for (idx, el) in layout.elements.iter().enumerate() {
        let all: Vec<Side> = el.positions().flat_map(|t| sides(t).iter().copied()).collect();
        let has = |s| all.contains(&s);
        if has(Side::Left) && has(Side::Right) {
            out.push(format!("element {idx} ({}) is placed both left and right", el.elem_type));
        }
        if has(Side::Top) && has(Side::Bottom) {
            out.push(format!("element {idx} ({}) is placed both top and bottom", el.elem_type));
        }
    }
    out
}
