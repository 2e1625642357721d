//! Minimal well-formedness XML reader: elements, attributes, comments,
//! processing instructions, doctype, CDATA and the predefined entities.
//! Text content is checked but discarded.

use super::LayoutError;

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub name: String,
    pub attributes: Vec<(String, String)>,
    pub children: Vec<Element>,
    pub line: usize,
    pub col: usize,
}

struct Reader<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':')
}

impl<'a> Reader<'a> {
    fn err(&self, msg: impl Into<String>) -> LayoutError {
        LayoutError::Xml {
            line: self.line,
            col: self.col,
            message: msg.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn starts_with(&self, s: &str) -> bool {
        self.src[self.pos..].starts_with(s)
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

    fn bump_str(&mut self, s: &str) {
        for _ in s.chars() {
            self.bump();
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn skip_until(&mut self, end: &str, what: &str) -> Result<(), LayoutError> {
        let (line, col) = (self.line, self.col);
        while !self.starts_with(end) {
            if self.bump().is_none() {
                return Err(LayoutError::Xml {
                    line,
                    col,
                    message: format!("unterminated {what}"),
                });
            }
        }
        self.bump_str(end);
        Ok(())
    }

    /// Skips comments, processing instructions and doctype declarations.
    fn skip_misc(&mut self) -> Result<bool, LayoutError> {
        if self.starts_with("<!--") {
            self.bump_str("<!--");
            self.skip_until("-->", "comment")?;
        } else if self.starts_with("<?") {
            self.bump_str("<?");
            self.skip_until("?>", "processing instruction")?;
        } else if self.starts_with("<!DOCTYPE") {
            self.bump_str("<!DOCTYPE");
            self.skip_until(">", "doctype")?;
        } else {
            return Ok(false);
        }
        Ok(true)
    }

    fn name(&mut self) -> Result<String, LayoutError> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_alphabetic() || c == '_' || c == ':' => {}
            _ => return Err(self.err("expected a name")),
        }
        while matches!(self.peek(), Some(c) if is_name_char(c)) {
            self.bump();
        }
        Ok(self.src[start..self.pos].to_string())
    }

    fn entity(&mut self) -> Result<char, LayoutError> {
        let (line, col) = (self.line, self.col);
        self.bump();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c != ';' && !c.is_whitespace() && c != '<') {
            self.bump();
        }
        let body = &self.src[start..self.pos];
        if self.peek() != Some(';') {
            return Err(LayoutError::Xml {
                line,
                col,
                message: "unterminated entity reference".into(),
            });
        }
        self.bump();
        let decoded = match body {
            "lt" => Some('<'),
            "gt" => Some('>'),
            "amp" => Some('&'),
            "quot" => Some('"'),
            "apos" => Some('\''),
            _ => body
                .strip_prefix("#x")
                .map(|h| u32::from_str_radix(h, 16).ok())
                .or_else(|| body.strip_prefix('#').map(|d| d.parse::<u32>().ok()))
                .flatten()
                .and_then(char::from_u32),
        };
        decoded.ok_or(LayoutError::Xml {
            line,
            col,
            message: format!("unknown entity '&{body};'"),
        })
    }

    fn attr_value(&mut self) -> Result<String, LayoutError> {
        let quote = match self.peek() {
            Some(q @ ('"' | '\'')) => q,
            _ => return Err(self.err("expected quoted attribute value")),
        };
        self.bump();
        let mut value = String::new();
        loop {
            match self.peek() {
                None => return Err(self.err("unterminated attribute value")),
                Some(c) if c == quote => {
                    self.bump();
                    return Ok(value);
                }
                Some('<') => return Err(self.err("'<' not allowed in attribute value")),
                Some('&') => value.push(self.entity()?),
                Some(c) => {
                    value.push(c);
                    self.bump();
                }
            }
        }
    }

    fn element(&mut self) -> Result<Element, LayoutError> {
        let (line, col) = (self.line, self.col);
        self.bump(); // '<'
        let name = self.name()?;
        let mut attributes: Vec<(String, String)> = Vec::new();
        loop {
            let had_ws = matches!(self.peek(), Some(c) if c.is_whitespace());
            self.skip_ws();
            if self.starts_with("/>") {
                self.bump_str("/>");
                return Ok(Element {
                    name,
                    attributes,
                    children: Vec::new(),
                    line,
                    col,
                });
            }
            if self.peek() == Some('>') {
                self.bump();
                break;
            }
            if !had_ws {
                return Err(self.err("expected whitespace, '>' or '/>'"));
            }
            let (aline, acol) = (self.line, self.col);
            let key = self.name()?;
            self.skip_ws();
            if self.peek() != Some('=') {
                return Err(self.err("expected '='"));
            }
            self.bump();
            self.skip_ws();
            let value = self.attr_value()?;
            if attributes.iter().any(|(k, _)| *k == key) {
                return Err(LayoutError::Xml {
                    line: aline,
                    col: acol,
                    message: format!("duplicate attribute '{key}'"),
                });
            }
            attributes.push((key, value));
        }
        let mut children = Vec::new();
        loop {
            if self.peek().is_none() {
                return Err(LayoutError::Xml {
                    line,
                    col,
                    message: format!("element <{name}> is never closed"),
                });
            }
            if self.starts_with("</") {
                let (cline, ccol) = (self.line, self.col);
                self.bump_str("</");
                let close = self.name()?;
                if close != name {
                    return Err(LayoutError::Xml {
                        line: cline,
                        col: ccol,
                        message: format!("expected </{name}>, found </{close}>"),
                    });
                }
                self.skip_ws();
                if self.peek() != Some('>') {
                    return Err(self.err("expected '>'"));
                }
                self.bump();
                return Ok(Element {
                    name,
                    attributes,
                    children,
                    line,
                    col,
                });
            }
            if self.starts_with("<![CDATA[") {
                self.bump_str("<![CDATA[");
                self.skip_until("]]>", "CDATA section")?;
                continue;
            }
            if self.skip_misc()? {
                continue;
            }
            if self.peek() == Some('<') {
                children.push(self.element()?);
                continue;
            }
            if self.peek() == Some('&') {
                self.entity()?;
                continue;
            }
            self.bump();
        }
    }
}

/// Parses a document and returns its root element.
pub fn parse_document(src: &str) -> Result<Element, LayoutError> {
    let mut r = Reader {
        src,
        pos: 0,
        line: 1,
        col: 1,
    };
    let src_trim = src.strip_prefix('\u{feff}');
    if src_trim.is_some() {
        r.pos = '\u{feff}'.len_utf8();
    }
    let mut root = None;
    loop {
        r.skip_ws();
        if r.peek().is_none() {
            break;
        }
        if r.skip_misc()? {
            continue;
        }
        if r.peek() == Some('<') && root.is_none() {
            root = Some(r.element()?);
            continue;
        }
        if root.is_some() {
            return Err(r.err("content after the root element"));
        }
        return Err(r.err("expected '<'"));
    }
    root.ok_or(LayoutError::Xml {
        line: r.line,
        col: r.col,
        message: "document has no root element".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_document() {
        let doc = parse_document(
            "<?xml version=\"1.0\"?>\n<!-- c -->\n<L a='1'>text &amp; more<B x=\"&lt;&#65;\"/><![CDATA[<raw>]]></L>\n",
        )
        .unwrap();
        assert_eq!(doc.name, "L");
        assert_eq!(doc.attributes, vec![("a".to_string(), "1".to_string())]);
        assert_eq!(doc.children[0].attributes[0].1, "<A");
        assert_eq!((doc.children[0].line, doc.children[0].col), (3, 25));
    }

    #[test]
    fn malformed_inputs() {
        let cases = [
            ("<L><B></L>", 1, 7),
            ("<L a=1/>", 1, 6),
            ("<L a='1' a='2'/>", 1, 10),
            ("<L/><M/>", 1, 5),
            ("", 1, 1),
            ("<L>", 1, 1),
        ];
        for (src, line, col) in cases {
            match parse_document(src) {
                Err(LayoutError::Xml { line: l, col: c, .. }) => {
                    assert_eq!((l, c), (line, col), "{src}")
                }
                other => panic!("{src}: {other:?}"),
            }
        }
    }
}
