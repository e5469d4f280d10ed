use super::vocab::{all_tokens, Token, TokenKind, VOCAB_SIZE};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Start,
    NeedSlideType,
    Header,
    AfterSep,
    Element,
    Done,
}

/// Incremental next-token automaton used to mask autoregressive decoding.
///
/// It accepts exactly the sequences the parser accepts, and it refuses any
/// prefix that could not be closed with `<EOS>` inside `max_len` tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrammarState {
    phase: Phase,
    len: usize,
    max_len: usize,
    used_attrs: [bool; VOCAB_SIZE],
}

impl GrammarState {
    pub fn new(max_len: usize) -> Self {
        GrammarState {
            phase: Phase::Start,
            len: 0,
            max_len,
            used_attrs: [false; VOCAB_SIZE],
        }
    }

    /// State after `<SOS>`, which is where decoding starts.
    pub fn after_sos(max_len: usize) -> Self {
        let mut s = GrammarState::new(max_len);
        s.advance(Token::SOS);
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_done(&self) -> bool {
        self.phase == Phase::Done
    }

    fn allows_ignoring_length(&self, tok: Token) -> bool {
        let kind = tok.kind();
        match self.phase {
            Phase::Start => tok == Token::SOS,
            Phase::NeedSlideType => kind == TokenKind::SlideType,
            Phase::Header => {
                tok == Token::SEP
                    || tok == Token::EOS
                    || (kind == TokenKind::Attr && !self.used_attrs[tok.id()])
            }
            Phase::AfterSep => kind == TokenKind::ElemType || tok == Token::EOS,
            Phase::Element => {
                tok == Token::SEP
                    || tok == Token::EOS
                    || kind == TokenKind::Pos
                    || (kind == TokenKind::Attr && !self.used_attrs[tok.id()])
            }
            Phase::Done => false,
        }
    }

    pub fn allows(&self, tok: Token) -> bool {
        if !self.allows_ignoring_length(tok) {
            return false;
        }
        let remaining = self.max_len.saturating_sub(self.len);
        match remaining {
            0 => false,
            // The slot being filled is the last one.
            1 => tok == Token::EOS,
            // A slide type must still leave room for <EOS>.
            _ => true,
        }
    }

    /// Boolean mask over the vocabulary, indexed by token id.
    pub fn mask(&self) -> [bool; VOCAB_SIZE] {
        let mut m = [false; VOCAB_SIZE];
        for tok in all_tokens() {
            m[tok.id()] = self.allows(tok);
        }
        m
    }

    /// Applies `tok`; callers must only feed allowed tokens.
    pub fn advance(&mut self, tok: Token) {
        debug_assert!(self.allows_ignoring_length(tok), "{tok} not allowed");
        self.len += 1;
        self.phase = match (self.phase, tok.kind()) {
            (Phase::Start, _) => Phase::NeedSlideType,
            (Phase::NeedSlideType, _) => Phase::Header,
            (_, _) if tok == Token::EOS => Phase::Done,
            (_, _) if tok == Token::SEP => Phase::AfterSep,
            (Phase::AfterSep, TokenKind::ElemType) => {
                self.used_attrs = [false; VOCAB_SIZE];
                Phase::Element
            }
            (phase, TokenKind::Attr) => {
                self.used_attrs[tok.id()] = true;
                phase
            }
            (phase, _) => phase,
        };
    }
}

#[cfg(test)]
mod tests {
    use super::super::{lex, validate};
    use super::*;

    fn accepts(text: &str, max_len: usize) -> bool {
        let mut g = GrammarState::new(max_len);
        for tok in lex(text).unwrap() {
            if !g.allows(tok) {
                return false;
            }
            g.advance(tok);
        }
        g.is_done()
    }

    #[test]
    fn agrees_with_the_parser_on_samples() {
        let cases = [
            "<SOS> SLIDE_BLANK <EOS>",
            "<SOS> SLIDE_BLANK <SEP> <EOS>",
            "<SOS> SLIDE_TITLE ATTR_CENTER_IMAGE <SEP> ELEM_TITLE POS_TOP ATTR_SIZE_PRIMARY POS_TOP <EOS>",
            "<SOS> ELEM_TITLE <EOS>",
            "<SOS> SLIDE_BLANK <SEP> <SEP> <EOS>",
            "<SOS> SLIDE_BLANK POS_TOP <EOS>",
            "<SOS> SLIDE_BLANK <SEP> ELEM_TITLE ATTR_SIZE_PRIMARY ATTR_SIZE_PRIMARY <EOS>",
            "<SOS> SLIDE_BLANK SLIDE_BLANK <EOS>",
        ];
        for text in cases {
            let valid = validate(&lex(text).unwrap()).is_empty();
            assert_eq!(accepts(text, 128), valid, "{text}");
        }
    }

    #[test]
    fn last_slot_only_admits_eos() {
        let mut g = GrammarState::after_sos(4);
        g.advance(Token::named("SLIDE_BLANK"));
        g.advance(Token::SEP);
        assert!(!g.allows(Token::named("ELEM_TITLE")));
        assert!(g.allows(Token::EOS));
        assert_eq!(g.mask().iter().filter(|&&b| b).count(), 1);
    }

    #[test]
    fn too_short_budget_has_no_completion() {
        let g = GrammarState::after_sos(2);
        assert!(g.mask().iter().all(|&b| !b));
    }
}
