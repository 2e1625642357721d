//! The built-in `mini` parser: a small C/Java-like subset with classes
//! (single inheritance), methods, fields, blocks, `if`/`while`/`return`,
//! calls, member access, identifiers and string/number literals.

use std::collections::BTreeMap;

use super::graph::{CodeGraph, EdgeKind};
use super::lexer::{tokenize, Token, TokenKind};
use super::EmbedError;

const MODIFIERS: &[&str] = &[
    "public", "private", "protected", "static", "final", "abstract", "override", "open",
];
const KEYWORDS: &[&str] = &[
    "class", "extends", "return", "if", "else", "while", "new", "true", "false", "null", "this",
];

#[derive(Debug, Clone)]
struct Ast {
    label: String,
    name: Option<String>,
    children: Vec<Ast>,
}

impl Ast {
    fn leaf(label: &str, name: Option<String>) -> Self {
        Self {
            label: label.to_string(),
            name,
            children: Vec::new(),
        }
    }

    fn node(label: impl Into<String>, name: Option<String>, children: Vec<Ast>) -> Self {
        Self {
            label: label.into(),
            name,
            children,
        }
    }
}

const BINARY_LEVELS: &[&[&str]] = &[
    &["||"],
    &["&&"],
    &["==", "!="],
    &["<", ">", "<=", ">="],
    &["+", "-"],
    &["*", "/", "%"],
];

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s) || MODIFIERS.contains(&s)
}

impl Parser {
    fn peek(&self) -> &TokenKind {
        &self.toks[self.pos].kind
    }

    fn peek_at(&self, offset: usize) -> &TokenKind {
        let i = (self.pos + offset).min(self.toks.len() - 1);
        &self.toks[i].kind
    }

    fn advance(&mut self) -> &Token {
        let t = &self.toks[self.pos];
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn error(&self, msg: impl Into<String>) -> EmbedError {
        let t = &self.toks[self.pos];
        EmbedError::syntax(t.line, t.col, msg)
    }

    fn at_punct(&self, p: &str) -> bool {
        matches!(self.peek(), TokenKind::Punct(q) if *q == p)
    }

    fn at_word(&self, w: &str) -> bool {
        matches!(self.peek(), TokenKind::Ident(s) if s == w)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.at_punct(p) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), EmbedError> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{p}'")))
        }
    }

    fn expect_word(&mut self, w: &str) -> Result<(), EmbedError> {
        if self.at_word(w) {
            self.advance();
            Ok(())
        } else {
            Err(self.error(format!("expected '{w}'")))
        }
    }

    fn ident(&mut self) -> Result<String, EmbedError> {
        match self.peek().clone() {
            TokenKind::Ident(s) if !is_keyword(&s) => {
                self.advance();
                Ok(s)
            }
            _ => Err(self.error("expected identifier")),
        }
    }

    fn skip_modifiers(&mut self) {
        while matches!(self.peek(), TokenKind::Ident(s) if MODIFIERS.contains(&s.as_str())) {
            self.advance();
        }
    }

    /// Length in tokens of a type reference starting `offset` tokens ahead.
    fn type_len_at(&self, offset: usize) -> Option<usize> {
        let mut i = offset;
        match self.peek_at(i) {
            TokenKind::Ident(s) if !is_keyword(s) => i += 1,
            _ => return None,
        }
        loop {
            match (self.peek_at(i), self.peek_at(i + 1)) {
                (TokenKind::Punct("."), TokenKind::Ident(s)) if !is_keyword(s) => i += 2,
                (TokenKind::Punct("["), TokenKind::Punct("]")) => i += 2,
                _ => break,
            }
        }
        Some(i - offset)
    }

    /// If a declaration `Type name` starts here, returns the token that follows the name.
    fn decl_follow(&self) -> Option<&TokenKind> {
        let len = self.type_len_at(0)?;
        match self.peek_at(len) {
            TokenKind::Ident(s) if !is_keyword(s) => Some(self.peek_at(len + 1)),
            _ => None,
        }
    }

    fn parse_type(&mut self) -> Result<Ast, EmbedError> {
        let mut name = self.ident()?;
        loop {
            if self.at_punct(".") {
                self.advance();
                name.push('.');
                name.push_str(&self.ident()?);
            } else if self.at_punct("[") && matches!(self.peek_at(1), TokenKind::Punct("]")) {
                self.advance();
                self.advance();
                name.push_str("[]");
            } else {
                break;
            }
        }
        Ok(Ast::leaf("type", Some(name)))
    }

    fn unit(&mut self) -> Result<Option<Ast>, EmbedError> {
        let mut items = Vec::new();
        while *self.peek() != TokenKind::Eof {
            items.push(self.item()?);
        }
        Ok((!items.is_empty()).then(|| Ast::node("unit", None, items)))
    }

    fn item(&mut self) -> Result<Ast, EmbedError> {
        self.skip_modifiers();
        if self.at_word("class") {
            return self.class_decl();
        }
        match self.decl_follow() {
            Some(TokenKind::Punct("(")) | Some(TokenKind::Punct("=")) | Some(TokenKind::Punct(";")) => {
                self.member_decl("local")
            }
            _ => self.statement(),
        }
    }

    fn class_decl(&mut self) -> Result<Ast, EmbedError> {
        self.expect_word("class")?;
        let name = self.ident()?;
        let mut children = Vec::new();
        if self.at_word("extends") {
            self.advance();
            let sup = self.ident()?;
            children.push(Ast::leaf("superclass", Some(sup)));
        }
        self.expect_punct("{")?;
        while !self.at_punct("}") {
            if *self.peek() == TokenKind::Eof {
                return Err(self.error("unterminated class body"));
            }
            self.skip_modifiers();
            if self.at_word("class") {
                children.push(self.class_decl()?);
            } else if self.decl_follow().is_some() {
                children.push(self.member_decl("field")?);
            } else {
                return Err(self.error("expected member declaration"));
            }
        }
        self.expect_punct("}")?;
        Ok(Ast::node("class", Some(name), children))
    }

    /// `Type name (params) block` or `Type name [= expr];`
    fn member_decl(&mut self, var_label: &str) -> Result<Ast, EmbedError> {
        let ty = self.parse_type()?;
        let name = self.ident()?;
        if self.eat_punct("(") {
            let mut children = vec![ty];
            if !self.at_punct(")") {
                loop {
                    let pty = self.parse_type()?;
                    let pname = self.ident()?;
                    children.push(Ast::node("param", Some(pname), vec![pty]));
                    if !self.eat_punct(",") {
                        break;
                    }
                }
            }
            self.expect_punct(")")?;
            children.push(self.block()?);
            Ok(Ast::node("method", Some(name), children))
        } else {
            let mut children = vec![ty];
            if self.eat_punct("=") {
                children.push(self.expr()?);
            }
            self.expect_punct(";")?;
            Ok(Ast::node(var_label, Some(name), children))
        }
    }

    fn block(&mut self) -> Result<Ast, EmbedError> {
        self.expect_punct("{")?;
        let mut stmts = Vec::new();
        while !self.at_punct("}") {
            if *self.peek() == TokenKind::Eof {
                return Err(self.error("unterminated block"));
            }
            stmts.push(self.statement()?);
        }
        self.expect_punct("}")?;
        Ok(Ast::node("block", None, stmts))
    }

    fn statement(&mut self) -> Result<Ast, EmbedError> {
        if self.at_punct("{") {
            return self.block();
        }
        if self.eat_punct(";") {
            return Ok(Ast::leaf("empty", None));
        }
        if self.at_word("return") {
            self.advance();
            let mut children = Vec::new();
            if !self.at_punct(";") {
                children.push(self.expr()?);
            }
            self.expect_punct(";")?;
            return Ok(Ast::node("return", None, children));
        }
        if self.at_word("if") || self.at_word("while") {
            let label = if self.at_word("if") { "if" } else { "while" };
            self.advance();
            self.expect_punct("(")?;
            let cond = self.expr()?;
            self.expect_punct(")")?;
            let mut children = vec![cond, self.statement()?];
            if label == "if" && self.at_word("else") {
                self.advance();
                children.push(self.statement()?);
            }
            return Ok(Ast::node(label, None, children));
        }
        if matches!(
            self.decl_follow(),
            Some(TokenKind::Punct("=")) | Some(TokenKind::Punct(";"))
        ) {
            return self.member_decl("local");
        }
        let e = self.expr()?;
        self.expect_punct(";")?;
        Ok(Ast::node("expr-stmt", None, vec![e]))
    }

    fn expr(&mut self) -> Result<Ast, EmbedError> {
        let lhs = self.binary(0)?;
        for op in ["=", "+=", "-="] {
            if self.at_punct(op) {
                self.advance();
                let rhs = self.expr()?;
                return Ok(Ast::node(format!("assign:{op}"), None, vec![lhs, rhs]));
            }
        }
        Ok(lhs)
    }

    fn binary(&mut self, level: usize) -> Result<Ast, EmbedError> {
        if level == BINARY_LEVELS.len() {
            return self.unary();
        }
        let mut lhs = self.binary(level + 1)?;
        loop {
            let op = match self.peek() {
                TokenKind::Punct(p) if BINARY_LEVELS[level].contains(p) => *p,
                _ => break,
            };
            self.advance();
            let rhs = self.binary(level + 1)?;
            lhs = Ast::node(format!("binary:{op}"), None, vec![lhs, rhs]);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Ast, EmbedError> {
        for op in ["!", "-", "++", "--"] {
            if self.at_punct(op) {
                self.advance();
                let inner = self.unary()?;
                return Ok(Ast::node(format!("unary:{op}"), None, vec![inner]));
            }
        }
        self.postfix()
    }

    fn args(&mut self) -> Result<Vec<Ast>, EmbedError> {
        let mut args = Vec::new();
        if !self.at_punct(")") {
            loop {
                args.push(self.expr()?);
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        self.expect_punct(")")?;
        Ok(args)
    }

    fn postfix(&mut self) -> Result<Ast, EmbedError> {
        let mut e = self.primary()?;
        loop {
            if self.eat_punct("(") {
                let args = self.args()?;
                e = match e.label.as_str() {
                    "identifier" => Ast::node("call", e.name, args),
                    "member" => {
                        let mut children = e.children;
                        children.extend(args);
                        Ast::node("call", e.name, children)
                    }
                    _ => {
                        let mut children = vec![e];
                        children.extend(args);
                        Ast::node("call", None, children)
                    }
                };
            } else if self.eat_punct(".") {
                let name = self.ident()?;
                e = Ast::node("member", Some(name), vec![e]);
            } else if self.eat_punct("[") {
                let idx = self.expr()?;
                self.expect_punct("]")?;
                e = Ast::node("index", None, vec![e, idx]);
            } else if self.at_punct("++") || self.at_punct("--") {
                let op = if self.at_punct("++") { "++" } else { "--" };
                self.advance();
                e = Ast::node(format!("postfix:{op}"), None, vec![e]);
            } else {
                return Ok(e);
            }
        }
    }

    fn primary(&mut self) -> Result<Ast, EmbedError> {
        match self.peek().clone() {
            TokenKind::Number(n) => {
                self.advance();
                Ok(Ast::leaf("number-literal", Some(n)))
            }
            TokenKind::Str(s) => {
                self.advance();
                Ok(Ast::leaf("string-literal", Some(s)))
            }
            TokenKind::Punct("(") => {
                self.advance();
                let e = self.expr()?;
                self.expect_punct(")")?;
                Ok(e)
            }
            TokenKind::Ident(w) if matches!(w.as_str(), "true" | "false" | "null") => {
                self.advance();
                Ok(Ast::leaf("constant-literal", Some(w)))
            }
            TokenKind::Ident(w) if w == "this" => {
                self.advance();
                Ok(Ast::leaf("this", None))
            }
            TokenKind::Ident(w) if w == "new" => {
                self.advance();
                let ty = self.ident()?;
                self.expect_punct("(")?;
                let args = self.args()?;
                Ok(Ast::node("new", Some(ty), args))
            }
            TokenKind::Ident(w) if !is_keyword(&w) => {
                self.advance();
                Ok(Ast::leaf("identifier", Some(w)))
            }
            _ => Err(self.error("expected expression")),
        }
    }
}

#[derive(Default)]
struct Lowering {
    graph: CodeGraph,
    classes: BTreeMap<String, usize>,
    methods: BTreeMap<String, usize>,
    inherits: Vec<(usize, String)>,
    calls: Vec<(usize, String)>,
}

impl Lowering {
    fn lower(&mut self, ast: Ast, enclosing_method: Option<usize>) -> usize {
        let id = self.graph.add_node(ast.label.clone(), ast.name.clone());
        let mut method = enclosing_method;
        match (ast.label.as_str(), &ast.name) {
            ("class", Some(name)) => {
                self.classes.entry(name.clone()).or_insert(id);
                for c in &ast.children {
                    if c.label == "superclass" {
                        if let Some(sup) = &c.name {
                            self.inherits.push((id, sup.clone()));
                        }
                    }
                }
            }
            ("method", Some(name)) => {
                self.methods.entry(name.clone()).or_insert(id);
                method = Some(id);
            }
            ("call", Some(name)) => {
                if let Some(m) = enclosing_method {
                    self.calls.push((m, name.clone()));
                }
            }
            _ => {}
        }
        let mut prev = None;
        for child in ast.children {
            let cid = self.lower(child, method);
            self.graph.add_edge(id, cid, EdgeKind::Child);
            if let Some(p) = prev {
                self.graph.add_edge(p, cid, EdgeKind::NextSibling);
            }
            prev = Some(cid);
        }
        id
    }

    fn resolve(mut self) -> CodeGraph {
        let mut external: BTreeMap<(&'static str, String), usize> = BTreeMap::new();
        let mut extra = Vec::new();
        for (class, sup) in std::mem::take(&mut self.inherits) {
            let target = match self.classes.get(&sup) {
                Some(t) => *t,
                None => *external
                    .entry(("external-class", sup.clone()))
                    .or_insert_with(|| self.graph.add_node("external-class", Some(sup))),
            };
            extra.push((class, target, EdgeKind::Inherits));
        }
        for (caller, callee) in std::mem::take(&mut self.calls) {
            let target = match self.methods.get(&callee) {
                Some(t) => *t,
                None => *external
                    .entry(("external-call", callee.clone()))
                    .or_insert_with(|| self.graph.add_node("external-call", Some(callee))),
            };
            extra.push((caller, target, EdgeKind::Invokes));
        }
        let mut seen = std::collections::BTreeSet::new();
        for (src, dst, kind) in extra {
            if seen.insert((src, dst, kind)) {
                self.graph.add_edge(src, dst, kind);
            }
        }
        self.graph
    }
}

/// Parses `source` with the mini grammar and lowers it to a [`CodeGraph`].
pub fn parse_mini(source: &str) -> Result<CodeGraph, EmbedError> {
    let toks = tokenize(source)?;
    let mut parser = Parser { toks, pos: 0 };
    let Some(ast) = parser.unit()? else {
        return Ok(CodeGraph::new());
    };
    let mut lowering = Lowering::default();
    lowering.lower(ast, None);
    Ok(lowering.resolve())
}

/// Graph for free text that is not valid source: a `query` root with one
/// child per identifier, number or string token, chained by NextSibling.
pub fn token_graph(text: &str) -> CodeGraph {
    let mut g = CodeGraph::new();
    let mut leaves = Vec::new();
    let mut word = String::new();
    let flush = |word: &mut String, leaves: &mut Vec<(String, String)>| {
        if word.is_empty() {
            return;
        }
        let label = if word.chars().next().is_some_and(|c| c.is_ascii_digit()) {
            "number-literal"
        } else {
            "identifier"
        };
        leaves.push((label.to_string(), std::mem::take(word)));
    };
    for c in text.chars() {
        if c.is_alphanumeric() || c == '_' {
            word.push(c);
        } else {
            flush(&mut word, &mut leaves);
        }
    }
    flush(&mut word, &mut leaves);
    if leaves.is_empty() {
        return g;
    }
    let root = g.add_node("query", None);
    let mut prev = None;
    for (label, name) in leaves {
        let id = g.add_node(label, Some(name));
        g.add_edge(root, id, EdgeKind::Child);
        if let Some(p) = prev {
            g.add_edge(p, id, EdgeKind::NextSibling);
        }
        prev = Some(id);
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::graph::Edge;

    fn labels(g: &CodeGraph) -> Vec<(&str, Option<&str>)> {
        g.nodes
            .iter()
            .map(|n| (n.label.as_str(), n.name.as_deref()))
            .collect()
    }

    #[test]
    fn empty_source_is_empty_graph() {
        assert!(parse_mini("").unwrap().is_empty());
        assert!(parse_mini("  // nothing\n").unwrap().is_empty());
    }

    #[test]
    fn inherits_and_invokes_fixture() {
        let g = parse_mini("class A extends B { void f() { g(); } }").unwrap();
        g.validate().unwrap();
        // Hand-constructed expected graph, preorder ids.
        let expected_nodes = vec![
            ("unit", None),
            ("class", Some("A")),
            ("superclass", Some("B")),
            ("method", Some("f")),
            ("type", Some("void")),
            ("block", None),
            ("expr-stmt", None),
            ("call", Some("g")),
            ("external-class", Some("B")),
            ("external-call", Some("g")),
        ];
        assert_eq!(labels(&g), expected_nodes);
        let e = |src, dst, kind| Edge { src, dst, kind };
        let expected_edges = vec![
            e(0, 1, EdgeKind::Child),
            e(1, 2, EdgeKind::Child),
            e(3, 4, EdgeKind::Child),
            e(6, 7, EdgeKind::Child),
            e(5, 6, EdgeKind::Child),
            e(3, 5, EdgeKind::Child),
            e(4, 5, EdgeKind::NextSibling),
            e(1, 3, EdgeKind::Child),
            e(2, 3, EdgeKind::NextSibling),
            e(1, 8, EdgeKind::Inherits),
            e(3, 9, EdgeKind::Invokes),
        ];
        let mut got = g.edges.clone();
        let mut want = expected_edges;
        got.sort();
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn calls_resolve_within_unit() {
        let src = "class B { void g() { } } class A extends B { void f() { g(); this.h(1, \"x\"); } }";
        let g = parse_mini(src).unwrap();
        g.validate().unwrap();
        let a = g.find("class", "A").unwrap();
        let b = g.find("class", "B").unwrap();
        let f = g.find("method", "f").unwrap();
        let gm = g.find("method", "g").unwrap();
        let h = g.find("external-call", "h").unwrap();
        let has = |src, dst, kind| g.edges.contains(&Edge { src, dst, kind });
        assert!(has(a, b, EdgeKind::Inherits));
        assert!(has(f, gm, EdgeKind::Invokes));
        assert!(has(f, h, EdgeKind::Invokes));
        assert!(g.find("number-literal", "1").is_some());
        assert!(g.find("string-literal", "x").is_some());
    }

    #[test]
    fn statements_and_expressions() {
        let src = r#"
            public class Counter {
                private int count = 0;
                public int bump(int by) {
                    if (by > 0 && enabled()) { count += by; } else { log("skip"); }
                    while (count >= 10) count = count - 10;
                    int[] xs = new Buffer(3);
                    return xs[0] + -count;
                }
                boolean enabled() { return !false; }
            }
        "#;
        let g = parse_mini(src).unwrap();
        g.validate().unwrap();
        assert!(g.find("field", "count").is_some());
        assert!(g.find("local", "xs").is_some());
        assert!(g.find("new", "Buffer").is_some());
        let bump = g.find("method", "bump").unwrap();
        let enabled = g.find("method", "enabled").unwrap();
        assert!(g.edges.contains(&Edge {
            src: bump,
            dst: enabled,
            kind: EdgeKind::Invokes
        }));
    }

    #[test]
    fn syntax_error_has_location() {
        let err = parse_mini("class A {\n  void f() { g( }\n}").unwrap_err();
        match err {
            EmbedError::Syntax { line, col, .. } => assert_eq!((line, col), (2, 17)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parsing_is_deterministic() {
        let src = "class A extends B { void f() { g(); h(); } void h() { f(); } }";
        assert_eq!(parse_mini(src).unwrap(), parse_mini(src).unwrap());
    }

    #[test]
    fn token_graph_shape() {
        let g = token_graph("where is parseLayout 42?");
        g.validate().unwrap();
        assert_eq!(g.nodes.len(), 5);
        assert_eq!(g.nodes[4].label, "number-literal");
        assert!(token_graph(" ?! ").is_empty());
    }
}
