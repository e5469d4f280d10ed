use super::vocab::Token;
use super::LdlError;

/// Splits layout text into registered tokens.
///
/// Whitespace separates words and `/* ... */` spans are dropped wherever they
/// occur, including glued to a word. Offsets in errors are byte offsets into
/// `text`.
pub fn lex(text: &str) -> Result<Vec<Token>, LdlError> {
    Ok(lex_spanned(text)?.into_iter().map(|(tok, _)| tok).collect())
}

/// Like [`lex`], but keeps the byte offset at which each token starts.
pub fn lex_spanned(text: &str) -> Result<Vec<(Token, usize)>, LdlError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut word_start: Option<usize> = None;
    let mut i = 0;

    let flush = |start: Option<usize>, end: usize, out: &mut Vec<(Token, usize)>| {
        if let Some(s) = start {
            let word = &text[s..end];
            match Token::lookup(word) {
                Some(tok) => out.push((tok, s)),
                None => {
                    return Err(LdlError::UnknownToken {
                        word: word.to_string(),
                        offset: s,
                    })
                }
            }
        }
        Ok(())
    };

    while i < bytes.len() {
        if bytes[i] == b'/' && bytes.get(i + 1) == Some(&b'*') {
            flush(word_start.take(), i, &mut out)?;
            match text[i + 2..].find("*/") {
                Some(rel) => i = i + 2 + rel + 2,
                None => return Err(LdlError::UnterminatedComment { offset: i }),
            }
            continue;
        }
        let ch = text[i..].chars().next().expect("index is on a char boundary");
        if ch.is_whitespace() {
            flush(word_start.take(), i, &mut out)?;
        } else if word_start.is_none() {
            word_start = Some(i);
        }
        i += ch.len_utf8();
    }
    flush(word_start.take(), bytes.len(), &mut out)?;
    Ok(out)
}
