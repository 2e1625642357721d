use super::EmbedError;

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident(String),
    Number(String),
    Str(String),
    Punct(&'static str),
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub col: usize,
}

const PUNCT: &[&str] = &[
    "==", "!=", "<=", ">=", "&&", "||", "+=", "-=", "++", "--", "{", "}", "(", ")", "[", "]", ";",
    ",", ".", "=", "<", ">", "+", "-", "*", "/", "%", "!", ":", "?", "&", "|",
];

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, EmbedError> {
    let mut cur = Cursor {
        src,
        pos: 0,
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    while let Some(c) = cur.peek() {
        let (line, col) = (cur.line, cur.col);
        if c.is_whitespace() {
            cur.bump();
        } else if c == '/' && cur.peek2() == Some('/') {
            while let Some(c) = cur.peek() {
                if c == '\n' {
                    break;
                }
                cur.bump();
            }
        } else if c == '/' && cur.peek2() == Some('*') {
            cur.bump();
            cur.bump();
            loop {
                match cur.peek() {
                    None => return Err(EmbedError::syntax(line, col, "unterminated block comment")),
                    Some('*') if cur.peek2() == Some('/') => {
                        cur.bump();
                        cur.bump();
                        break;
                    }
                    Some(_) => {
                        cur.bump();
                    }
                }
            }
        } else if c.is_alphabetic() || c == '_' || c == '$' {
            let start = cur.pos;
            while matches!(cur.peek(), Some(c) if c.is_alphanumeric() || c == '_' || c == '$') {
                cur.bump();
            }
            out.push(Token {
                kind: TokenKind::Ident(src[start..cur.pos].to_string()),
                line,
                col,
            });
        } else if c.is_ascii_digit() {
            let start = cur.pos;
            while matches!(cur.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '.' || c == '_')
            {
                cur.bump();
            }
            out.push(Token {
                kind: TokenKind::Number(src[start..cur.pos].to_string()),
                line,
                col,
            });
        } else if c == '"' || c == '\'' {
            let quote = c;
            cur.bump();
            let mut text = String::new();
            loop {
                match cur.bump() {
                    None | Some('\n') => {
                        return Err(EmbedError::syntax(line, col, "unterminated string literal"))
                    }
                    Some('\\') => match cur.bump() {
                        Some(e) => {
                            text.push('\\');
                            text.push(e);
                        }
                        None => {
                            return Err(EmbedError::syntax(line, col, "unterminated string literal"))
                        }
                    },
                    Some(q) if q == quote => break,
                    Some(other) => text.push(other),
                }
            }
            out.push(Token {
                kind: TokenKind::Str(text),
                line,
                col,
            });
        } else if let Some(p) = PUNCT.iter().find(|p| cur.rest().starts_with(**p)) {
            for _ in 0..p.len() {
                cur.bump();
            }
            out.push(Token {
                kind: TokenKind::Punct(p),
                line,
                col,
            });
        } else {
            return Err(EmbedError::syntax(
                line,
                col,
                format!("unexpected character {c:?}"),
            ));
        }
    }
    out.push(Token {
        kind: TokenKind::Eof,
        line: cur.line,
        col: cur.col,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_and_comments() {
        let toks = tokenize("a // x\n  /* y */ b(\"s\");").unwrap();
        let kinds: Vec<_> = toks.iter().map(|t| t.kind.clone()).collect();
        assert_eq!(
            kinds,
            vec![
                TokenKind::Ident("a".into()),
                TokenKind::Ident("b".into()),
                TokenKind::Punct("("),
                TokenKind::Str("s".into()),
                TokenKind::Punct(")"),
                TokenKind::Punct(";"),
                TokenKind::Eof,
            ]
        );
        assert_eq!((toks[1].line, toks[1].col), (2, 11));
    }

    #[test]
    fn unterminated_string_reports_location() {
        let err = tokenize("x = \"abc").unwrap_err();
        assert_eq!(err, EmbedError::syntax(1, 5, "unterminated string literal"));
    }

    #[test]
    fn longest_operator_wins() {
        let toks = tokenize("a<=b").unwrap();
        assert_eq!(toks[1].kind, TokenKind::Punct("<="));
    }
}
