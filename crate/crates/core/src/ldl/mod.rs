//! Layout description language: vocabulary, lexer, parser, validator and
//! canonical serializer for symbolic slide layout prototypes.

mod grammar;
mod lexer;
mod parser;
pub mod vocab;

use thiserror::Error;

pub use grammar::GrammarState;
pub use lexer::{lex, lex_spanned};
pub use parser::{
    parse, parse_text, position_conflicts, serialize, validate, validate_ids, ElementDecl,
    ParsedLayout, Violation, ViolationKind,
};
pub use vocab::{Token, TokenKind, VOCAB_SIZE};

/// Longest admissible token sequence, `<SOS>` and `<EOS>` included.
pub const MAX_SEQUENCE_LEN: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LdlError {
    #[error("unknown token `{word}` at byte {offset}")]
    UnknownToken { word: String, offset: usize },
    #[error("unterminated comment starting at byte {offset}")]
    UnterminatedComment { offset: usize },
    #[error("grammar violation at token {position}: {reason}")]
    GrammarViolation { reason: String, position: usize },
    #[error("sequence of {len} tokens exceeds the {MAX_SEQUENCE_LEN}-token limit")]
    LengthExceeded { len: usize },
}
