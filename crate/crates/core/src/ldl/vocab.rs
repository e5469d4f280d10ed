//! The fixed 200-entry layout token registry.
//!
//! Ids are assigned in table order: special tokens first, then slide types,
//! element types, attributes and positions. Tokens that only show up in the
//! worked listings (rather than the core category lists) live in the
//! [`Tier::Extension`] tier. Every id above the last named token is a
//! reserved padding slot named `<RESERVED_nnn>`.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Number of ids in the vocabulary, padding included.
pub const VOCAB_SIZE: usize = 200;

/// Grammatical category of a token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TokenKind {
    Special,
    SlideType,
    ElemType,
    Attr,
    Pos,
    /// Padding slot; never grammatical.
    Reserved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tier {
    Core,
    Extension,
    Reserved,
}

const NAMED: &[(&str, TokenKind, Tier)] = &[
    ("<SOS>", TokenKind::Special, Tier::Core),
    ("<EOS>", TokenKind::Special, Tier::Core),
    ("<SEP>", TokenKind::Special, Tier::Core),
    ("SLIDE_TITLE", TokenKind::SlideType, Tier::Core),
    ("SLIDE_CONTENT_SINGLE_COL", TokenKind::SlideType, Tier::Core),
    ("SLIDE_CONTENT_TWO_COL", TokenKind::SlideType, Tier::Core),
    ("SLIDE_SECTION_HEADER", TokenKind::SlideType, Tier::Core),
    ("SLIDE_IMAGE_CAPTION", TokenKind::SlideType, Tier::Core),
    ("SLIDE_BLANK", TokenKind::SlideType, Tier::Core),
    ("ELEM_TITLE", TokenKind::ElemType, Tier::Core),
    ("ELEM_SUBTITLE", TokenKind::ElemType, Tier::Core),
    ("ELEM_TEXT_BODY", TokenKind::ElemType, Tier::Core),
    ("ELEM_IMAGE", TokenKind::ElemType, Tier::Core),
    ("ELEM_CHART", TokenKind::ElemType, Tier::Core),
    ("ELEM_TABLE", TokenKind::ElemType, Tier::Core),
    ("ELEM_FOOTER", TokenKind::ElemType, Tier::Core),
    ("ELEM_HEADER", TokenKind::ElemType, Tier::Core),
    ("ELEM_CONTENT_BLOCK", TokenKind::ElemType, Tier::Extension),
    ("ELEM_FOOTER_FEATURED", TokenKind::ElemType, Tier::Extension),
    ("ATTR_TEXT_POINTS_FEW", TokenKind::Attr, Tier::Core),
    ("ATTR_TEXT_POINTS_MEDIUM", TokenKind::Attr, Tier::Core),
    ("ATTR_TEXT_POINTS_MANY", TokenKind::Attr, Tier::Core),
    ("ATTR_TEXT_LENGTH_SHORT", TokenKind::Attr, Tier::Core),
    ("ATTR_TEXT_LENGTH_LONG", TokenKind::Attr, Tier::Core),
    ("ATTR_IMAGE_ASPECT_WIDE", TokenKind::Attr, Tier::Core),
    ("ATTR_IMAGE_ASPECT_SQUARE", TokenKind::Attr, Tier::Core),
    ("ATTR_IMAGE_ASPECT_TALL", TokenKind::Attr, Tier::Core),
    ("ATTR_SIZE_PRIMARY", TokenKind::Attr, Tier::Core),
    ("ATTR_SIZE_SECONDARY", TokenKind::Attr, Tier::Core),
    ("ATTR_CONTENT_DENSE", TokenKind::Attr, Tier::Core),
    ("ATTR_CONTENT_SPARSE", TokenKind::Attr, Tier::Core),
    ("ATTR_TEXT_LENGTH_MEDIUM", TokenKind::Attr, Tier::Extension),
    ("ATTR_STYLE_MODERN_INFOGRAPHIC", TokenKind::Attr, Tier::Extension),
    ("ATTR_STYLE_TAG", TokenKind::Attr, Tier::Extension),
    ("ATTR_LAYOUT_ICON_LEFT", TokenKind::Attr, Tier::Extension),
    ("ATTR_CENTER_IMAGE", TokenKind::Attr, Tier::Extension),
    ("POS_TOP", TokenKind::Pos, Tier::Core),
    ("POS_MIDDLE", TokenKind::Pos, Tier::Core),
    ("POS_BOTTOM", TokenKind::Pos, Tier::Core),
    ("POS_LEFT", TokenKind::Pos, Tier::Core),
    ("POS_CENTER", TokenKind::Pos, Tier::Core),
    ("POS_RIGHT", TokenKind::Pos, Tier::Core),
    ("POS_FULL_WIDTH", TokenKind::Pos, Tier::Core),
    ("POS_HALF_WIDTH_LEFT", TokenKind::Pos, Tier::Core),
    ("POS_HALF_WIDTH_RIGHT", TokenKind::Pos, Tier::Core),
    ("POS_TOP_LEFT", TokenKind::Pos, Tier::Core),
    ("POS_TOP_RIGHT", TokenKind::Pos, Tier::Core),
    ("POS_BOTTOM_LEFT", TokenKind::Pos, Tier::Core),
    ("POS_BOTTOM_RIGHT", TokenKind::Pos, Tier::Core),
    ("POS_MIDDLE_LEFT_UPPER", TokenKind::Pos, Tier::Extension),
    ("POS_MIDDLE_LEFT_CENTER", TokenKind::Pos, Tier::Extension),
    ("POS_MIDDLE_LEFT_LOWER", TokenKind::Pos, Tier::Extension),
    ("POS_MIDDLE_RIGHT", TokenKind::Pos, Tier::Extension),
    ("POS_MIDDLE_RIGHT_UPPER", TokenKind::Pos, Tier::Extension),
    ("POS_MIDDLE_RIGHT_CENTER", TokenKind::Pos, Tier::Extension),
    ("POS_MIDDLE_RIGHT_LOWER", TokenKind::Pos, Tier::Extension),
    ("POS_CENTER_HORIZONTAL", TokenKind::Pos, Tier::Extension),
    ("POS_CENTER_VERTICAL", TokenKind::Pos, Tier::Extension),
    ("POS_BOTTOM_MIDDLE_SECTION", TokenKind::Pos, Tier::Extension),
];

/// Number of named (non-padding) tokens.
pub const NAMED_COUNT: usize = NAMED.len();

struct Registry {
    names: Vec<String>,
    kinds: Vec<TokenKind>,
    tiers: Vec<Tier>,
    by_name: std::collections::HashMap<String, u8>,
}

fn registry() -> &'static Registry {
    static REG: OnceLock<Registry> = OnceLock::new();
    REG.get_or_init(|| {
        let mut names = Vec::with_capacity(VOCAB_SIZE);
        let mut kinds = Vec::with_capacity(VOCAB_SIZE);
        let mut tiers = Vec::with_capacity(VOCAB_SIZE);
        for &(name, kind, tier) in NAMED {
            names.push(name.to_string());
            kinds.push(kind);
            tiers.push(tier);
        }
        for id in NAMED.len()..VOCAB_SIZE {
            names.push(format!("<RESERVED_{id:03}>"));
            kinds.push(TokenKind::Reserved);
            tiers.push(Tier::Reserved);
        }
        let by_name = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i as u8))
            .collect();
        Registry {
            names,
            kinds,
            tiers,
            by_name,
        }
    })
}

/// A registered layout token, identified by its vocabulary id.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Token(u8);

impl Token {
    pub const SOS: Token = Token(0);
    pub const EOS: Token = Token(1);
    pub const SEP: Token = Token(2);

    pub fn from_id(id: usize) -> Option<Token> {
        (id < VOCAB_SIZE).then_some(Token(id as u8))
    }

    pub fn lookup(name: &str) -> Option<Token> {
        registry().by_name.get(name).copied().map(Token)
    }

    /// Lookup for names known to be registered; panics otherwise.
    #[cfg(test)]
    pub(crate) fn named(name: &str) -> Token {
        Token::lookup(name).unwrap_or_else(|| panic!("unregistered token {name}"))
    }

    pub fn id(self) -> usize {
        self.0 as usize
    }

    pub fn name(self) -> &'static str {
        &registry().names[self.id()]
    }

    pub fn kind(self) -> TokenKind {
        registry().kinds[self.id()]
    }

    pub fn tier(self) -> Tier {
        registry().tiers[self.id()]
    }

    pub fn is_special(self) -> bool {
        self.kind() == TokenKind::Special
    }
}

impl fmt::Debug for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Token {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Token {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let name = String::deserialize(d)?;
        Token::lookup(&name)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown layout token `{name}`")))
    }
}

/// Every token in id order.
pub fn all_tokens() -> impl Iterator<Item = Token> {
    (0..VOCAB_SIZE).map(|i| Token(i as u8))
}

/// Tokens of one kind, in id order.
pub fn tokens_of(kind: TokenKind) -> impl Iterator<Item = Token> {
    all_tokens().filter(move |t| t.kind() == kind)
}
