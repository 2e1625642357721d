//! Restricted YAML: block maps and lists by indentation, flow `[..]` and
//! `{..}` collections, plain and quoted scalars, `#` comments. Anchors,
//! aliases, tags, block scalars and multiple documents are rejected.

use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct YamlError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, YamlError> {
    Err(YamlError {
        line,
        message: message.into(),
    })
}

#[derive(Debug, Clone)]
enum Content {
    Dash,
    Text(String),
}

#[derive(Debug, Clone)]
struct Line {
    indent: usize,
    content: Content,
    number: usize,
}

/// Drops a trailing comment that is outside quotes.
fn strip_comment(s: &str) -> &str {
    let mut quote: Option<char> = None;
    let mut prev_ws = true;
    for (i, c) in s.char_indices() {
        match quote {
            Some(q) if c == q => quote = None,
            Some(_) => {}
            None if c == '\'' || c == '"' => quote = Some(c),
            None if c == '#' && prev_ws => return &s[..i],
            None => {}
        }
        prev_ws = c == ' ' || c == '\t';
    }
    s
}

fn split_lines(text: &str) -> Result<Vec<Line>, YamlError> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let number = i + 1;
        let body = strip_comment(raw).trim_end();
        if body.trim().is_empty() {
            continue;
        }
        let indent = body.len() - body.trim_start_matches(' ').len();
        let mut rest = &body[indent..];
        if rest.starts_with('\t') {
            return err(number, "tabs are not allowed in indentation");
        }
        if rest == "---" && lines.is_empty() {
            continue;
        }
        if rest == "---" || rest == "..." {
            return err(number, "multiple documents are not supported");
        }
        // "- a: 1" becomes a dash line plus "a: 1" indented past the dash.
        let mut col = indent;
        while rest == "-" || rest.starts_with("- ") {
            lines.push(Line {
                indent: col,
                content: Content::Dash,
                number,
            });
            let after = rest[1..].trim_start_matches(' ');
            col += rest.len() - after.len();
            rest = after;
            if rest.is_empty() {
                break;
            }
        }
        if !rest.is_empty() {
            lines.push(Line {
                indent: col,
                content: Content::Text(rest.to_string()),
                number,
            });
        }
    }
    Ok(lines)
}

pub fn parse(text: &str) -> Result<Value, YamlError> {
    let lines = split_lines(text)?;
    if lines.is_empty() {
        return Ok(Value::Null);
    }
    let mut p = Parser { lines, pos: 0 };
    let indent = p.lines[0].indent;
    let v = p.block(indent)?;
    if let Some(l) = p.lines.get(p.pos) {
        return err(l.number, "unexpected indentation");
    }
    Ok(v)
}

struct Parser {
    lines: Vec<Line>,
    pos: usize,
}

impl Parser {
    fn block(&mut self, indent: usize) -> Result<Value, YamlError> {
        let line = &self.lines[self.pos];
        match &line.content {
            Content::Dash => self.sequence(indent),
            Content::Text(t) if find_colon(t).is_some() => self.mapping(indent),
            Content::Text(t) => {
                let (number, t) = (line.number, t.clone());
                self.pos += 1;
                if let Some(next) = self.lines.get(self.pos) {
                    if next.indent > indent {
                        return err(next.number, "unexpected indentation after scalar");
                    }
                }
                scalar_or_flow(&t, number)
            }
        }
    }

    /// Value after `key:` or `-` with nothing inline.
    fn nested(&mut self, parent_indent: usize, allow_same_indent_seq: bool) -> Result<Value, YamlError> {
        match self.lines.get(self.pos) {
            Some(next) if next.indent > parent_indent => {
                let indent = next.indent;
                self.block(indent)
            }
            Some(next)
                if allow_same_indent_seq
                    && next.indent == parent_indent
                    && matches!(next.content, Content::Dash) =>
            {
                self.sequence(parent_indent)
            }
            _ => Ok(Value::Null),
        }
    }

    fn sequence(&mut self, indent: usize) -> Result<Value, YamlError> {
        let mut items = Vec::new();
        while let Some(line) = self.lines.get(self.pos) {
            if line.indent < indent {
                break;
            }
            if line.indent > indent {
                return err(line.number, "unexpected indentation in list");
            }
            if !matches!(line.content, Content::Dash) {
                break;
            }
            self.pos += 1;
            items.push(self.nested(indent, false)?);
        }
        Ok(Value::Array(items))
    }

    fn mapping(&mut self, indent: usize) -> Result<Value, YamlError> {
        let mut map = Map::new();
        while let Some(line) = self.lines.get(self.pos) {
            if line.indent < indent {
                break;
            }
            let number = line.number;
            if line.indent > indent {
                return err(number, "unexpected indentation in mapping");
            }
            let Content::Text(text) = &line.content else {
                return err(number, "list item where a mapping key was expected");
            };
            let Some(colon) = find_colon(text) else {
                return err(number, format!("expected 'key: value', found '{text}'"));
            };
            let key = parse_key(text[..colon].trim(), number)?;
            let rest = text[colon + 1..].trim().to_string();
            self.pos += 1;
            let value = if rest.is_empty() {
                self.nested(indent, true)?
            } else {
                scalar_or_flow(&rest, number)?
            };
            if map.insert(key.clone(), value).is_some() {
                return err(number, format!("duplicate key '{key}'"));
            }
        }
        Ok(Value::Object(map))
    }
}

/// Byte offset of the `:` separating key and value, outside quotes and
/// flow brackets.
fn find_colon(s: &str) -> Option<usize> {
    let bytes = s.as_bytes();
    let mut quote: Option<u8> = None;
    let mut depth = 0usize;
    for (i, &b) in bytes.iter().enumerate() {
        match quote {
            Some(q) if b == q => quote = None,
            Some(_) => {}
            None => match b {
                b'\'' | b'"' if i == 0 => quote = Some(b),
                b'[' | b'{' if i == 0 || depth > 0 => depth += 1,
                b']' | b'}' if depth > 0 => depth -= 1,
                b':' if depth == 0 && (i + 1 == bytes.len() || bytes[i + 1] == b' ') => {
                    return Some(i)
                }
                _ => {}
            },
        }
    }
    None
}

fn parse_key(raw: &str, line: usize) -> Result<String, YamlError> {
    if raw.is_empty() {
        return err(line, "empty mapping key");
    }
    match scalar_or_flow(raw, line)? {
        Value::String(s) => Ok(s),
        Value::Number(n) => Ok(n.to_string()),
        Value::Bool(b) => Ok(b.to_string()),
        _ => err(line, format!("unsupported mapping key '{raw}'")),
    }
}

fn scalar_or_flow(text: &str, line: usize) -> Result<Value, YamlError> {
    let mut f = Flow {
        chars: text.chars().collect(),
        pos: 0,
        line,
    };
    let v = f.value(false)?;
    f.skip_ws();
    if f.pos != f.chars.len() {
        return err(line, format!("unexpected trailing text in '{text}'"));
    }
    Ok(v)
}

struct Flow {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Flow {
    fn skip_ws(&mut self) {
        while self.chars.get(self.pos) == Some(&' ') {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<(), YamlError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            err(self.line, format!("expected '{c}'"))
        }
    }

    fn value(&mut self, in_flow: bool) -> Result<Value, YamlError> {
        self.skip_ws();
        match self.peek() {
            None => Ok(Value::Null),
            Some('[') => self.list(),
            Some('{') => self.map(),
            Some('"') | Some('\'') => self.quoted().map(Value::String),
            Some(c @ ('&' | '*' | '!' | '|' | '>' | '%' | '@' | '`')) => {
                err(self.line, format!("'{c}' (anchors, aliases, tags, block scalars) is not supported"))
            }
            Some(_) => {
                let start = self.pos;
                while let Some(c) = self.peek() {
                    if in_flow && matches!(c, ',' | ']' | '}') {
                        break;
                    }
                    if in_flow && c == ':' && matches!(self.chars.get(self.pos + 1), Some(' ') | None) {
                        break;
                    }
                    self.pos += 1;
                }
                let s: String = self.chars[start..self.pos].iter().collect();
                Ok(resolve_plain(s.trim()))
            }
        }
    }

    fn list(&mut self) -> Result<Value, YamlError> {
        self.pos += 1;
        let mut items = Vec::new();
        self.skip_ws();
        if self.peek() == Some(']') {
            self.pos += 1;
            return Ok(Value::Array(items));
        }
        loop {
            items.push(self.value(true)?);
            self.skip_ws();
            match self.peek() {
                Some(',') => self.pos += 1,
                Some(']') => {
                    self.pos += 1;
                    return Ok(Value::Array(items));
                }
                _ => return err(self.line, "unterminated flow list"),
            }
        }
    }

    fn map(&mut self) -> Result<Value, YamlError> {
        self.pos += 1;
        let mut map = Map::new();
        self.skip_ws();
        if self.peek() == Some('}') {
            self.pos += 1;
            return Ok(Value::Object(map));
        }
        loop {
            let key = match self.value(true)? {
                Value::String(s) => s,
                Value::Number(n) => n.to_string(),
                Value::Bool(b) => b.to_string(),
                _ => return err(self.line, "unsupported flow mapping key"),
            };
            self.expect(':')?;
            let v = self.value(true)?;
            if map.insert(key.clone(), v).is_some() {
                return err(self.line, format!("duplicate key '{key}'"));
            }
            self.skip_ws();
            match self.peek() {
                Some(',') => self.pos += 1,
                Some('}') => {
                    self.pos += 1;
                    return Ok(Value::Object(map));
                }
                _ => return err(self.line, "unterminated flow mapping"),
            }
        }
    }

    fn quoted(&mut self) -> Result<String, YamlError> {
        let q = self.chars[self.pos];
        self.pos += 1;
        let mut out = String::new();
        while let Some(c) = self.peek() {
            self.pos += 1;
            if c == q {
                // '' is an escaped quote inside single quotes.
                if q == '\'' && self.peek() == Some('\'') {
                    self.pos += 1;
                    out.push('\'');
                    continue;
                }
                return Ok(out);
            }
            if q == '"' && c == '\\' {
                let Some(e) = self.peek() else { break };
                self.pos += 1;
                out.push(match e {
                    'n' => '\n',
                    't' => '\t',
                    '\\' => '\\',
                    '"' => '"',
                    '0' => '\0',
                    other => return err(self.line, format!("unsupported escape '\\{other}'")),
                });
                continue;
            }
            out.push(c);
        }
        err(self.line, "unterminated quoted string")
    }
}

fn resolve_plain(s: &str) -> Value {
    match s {
        "" | "~" | "null" | "Null" | "NULL" => return Value::Null,
        "true" | "True" | "TRUE" => return Value::Bool(true),
        "false" | "False" | "FALSE" => return Value::Bool(false),
        _ => {}
    }
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    let numeric = !digits.is_empty()
        && digits.starts_with(|c: char| c.is_ascii_digit() || c == '.')
        && digits.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '-' | '+' | '_'));
    if numeric {
        let cleaned = s.replace('_', "");
        if let Ok(i) = cleaned.parse::<i64>() {
            return Value::Number(i.into());
        }
        if let Ok(f) = cleaned.parse::<f64>() {
            if let Some(n) = Number::from_f64(f) {
                return Value::Number(n);
            }
        }
    }
    Value::String(s.to_string())
}
