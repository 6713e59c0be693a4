//! Line-oriented ontology language.
//!
//! ```text
//! concept <Name>
//! capability <Name>
//! role <name>
//! attribute <Name> : int | decimal
//! axiom <Expr> SubClassOf <Expr>
//! Expr := <Name> | and(<Expr>, <Expr>, ...) | some(<name>, <Expr>) | attr(<Name>, <op>, <number>)
//! ```
//!
//! Declarations may appear after their first use; references are resolved
//! once every statement of every source has been read.

use super::error::OntologyError;
use super::expr::{is_identifier_continue, CompareOp, ConceptExpression};
use super::tbox::{Axiom, TBox, ValueKind};
use crate::decimal::{is_decimal_literal, Decimal};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Op(CompareOp),
    LParen,
    RParen,
    Comma,
    Colon,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(s) => format!("number {s}"),
            Tok::Op(op) => format!("operator `{op}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> OntologyError {
    OntologyError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn tokenize(text: &str, line: usize) -> Result<Vec<Token>, OntologyError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            ':' => Some(Tok::Colon),
            _ => None,
        };
        if let Some(tok) = single {
            tokens.push(Token { tok, column });
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && is_identifier_continue(chars[i]) {
                i += 1;
            }
            let ident: String = chars[start..i].iter().collect();
            tokens.push(Token {
                tok: Tok::Ident(ident),
                column,
            });
            continue;
        }
        if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()))
        {
            let start = i;
            i += 1;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let lit: String = chars[start..i].iter().collect();
            if !is_decimal_literal(&lit) {
                return Err(syntax(line, column, format!("malformed number `{lit}`")));
            }
            tokens.push(Token {
                tok: Tok::Number(lit),
                column,
            });
            continue;
        }
        if matches!(c, '>' | '<' | '=') {
            let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
            let (op, len) = match two.as_str() {
                ">=" => (CompareOp::Ge, 2),
                "<=" => (CompareOp::Le, 2),
                "==" => (CompareOp::Eq, 2),
                _ if c == '>' => (CompareOp::Gt, 1),
                _ if c == '<' => (CompareOp::Lt, 1),
                _ => return Err(syntax(line, column, "expected `==`")),
            };
            tokens.push(Token {
                tok: Tok::Op(op),
                column,
            });
            i += len;
            continue;
        }
        return Err(syntax(line, column, format!("unexpected character `{c}`")));
    }
    Ok(tokens)
}

struct Cursor<'a> {
    tokens: &'a [Token],
    pos: usize,
    line: usize,
    /// Column just past the end of the line, for end-of-input errors.
    end_column: usize,
}

impl<'a> Cursor<'a> {
    fn new(tokens: &'a [Token], line: usize, end_column: usize) -> Self {
        Cursor {
            tokens,
            pos: 0,
            line,
            end_column,
        }
    }

    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn column(&self) -> usize {
        self.peek().map_or(self.end_column, |t| t.column)
    }

    fn error(&self, message: impl Into<String>) -> OntologyError {
        syntax(self.line, self.column(), message)
    }

    fn next(&mut self, what: &str) -> Result<&'a Token, OntologyError> {
        match self.tokens.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t)
            }
            None => Err(self.error(format!("expected {what}, found end of line"))),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), OntologyError> {
        let what = tok.describe();
        let t = self.next(&what)?;
        if t.tok == tok {
            Ok(())
        } else {
            Err(syntax(
                self.line,
                t.column,
                format!("expected {what}, found {}", t.tok.describe()),
            ))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, OntologyError> {
        let t = self.next(what)?;
        match &t.tok {
            Tok::Ident(s) => Ok(s.clone()),
            other => Err(syntax(
                self.line,
                t.column,
                format!("expected {what}, found {}", other.describe()),
            )),
        }
    }

    fn finish(&self) -> Result<(), OntologyError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(syntax(
                self.line,
                t.column,
                format!("unexpected {} after end of statement", t.tok.describe()),
            )),
        }
    }

    fn expression(&mut self) -> Result<ConceptExpression, OntologyError> {
        let head = self.ident("a class expression")?;
        let is_call = matches!(self.peek(), Some(Token { tok: Tok::LParen, .. }));
        if !is_call {
            return Ok(ConceptExpression::Named(head));
        }
        match head.as_str() {
            "and" => {
                self.expect(Tok::LParen)?;
                let mut parts = vec![self.expression()?];
                loop {
                    let t = self.next("`,` or `)`")?;
                    match t.tok {
                        Tok::Comma => parts.push(self.expression()?),
                        Tok::RParen => break,
                        ref other => {
                            return Err(syntax(
                                self.line,
                                t.column,
                                format!("expected `,` or `)`, found {}", other.describe()),
                            ))
                        }
                    }
                }
                if parts.len() < 2 {
                    return Err(self.error("and(..) needs at least two parts"));
                }
                Ok(ConceptExpression::and(parts))
            }
            "some" => {
                self.expect(Tok::LParen)?;
                let role = self.ident("a role name")?;
                self.expect(Tok::Comma)?;
                let filler = self.expression()?;
                self.expect(Tok::RParen)?;
                Ok(ConceptExpression::some(role, filler))
            }
            "attr" => {
                self.expect(Tok::LParen)?;
                let attribute = self.ident("an attribute name")?;
                self.expect(Tok::Comma)?;
                let t = self.next("a comparison operator")?;
                let Tok::Op(op) = t.tok else {
                    return Err(syntax(
                        self.line,
                        t.column,
                        format!("expected a comparison operator, found {}", t.tok.describe()),
                    ));
                };
                self.expect(Tok::Comma)?;
                let t = self.next("a number")?;
                let value: Decimal = match &t.tok {
                    Tok::Number(lit) => lit
                        .parse()
                        .map_err(|e| syntax(self.line, t.column, format!("`{lit}`: {e}")))?,
                    other => {
                        return Err(syntax(
                            self.line,
                            t.column,
                            format!("expected a number, found {}", other.describe()),
                        ))
                    }
                };
                self.expect(Tok::RParen)?;
                Ok(ConceptExpression::attr(attribute, op, value))
            }
            other => Err(self.error(format!("unknown constructor `{other}`"))),
        }
    }
}

enum Statement {
    Concept(String),
    Capability(String),
    Role(String),
    Attribute(String, ValueKind),
    Axiom(Axiom),
}

fn parse_line(text: &str, line: usize) -> Result<Option<Statement>, OntologyError> {
    let tokens = tokenize(text, line)?;
    if tokens.is_empty() {
        return Ok(None);
    }
    let mut cur = Cursor::new(&tokens, line, text.chars().count() + 1);
    let keyword = cur.ident("a statement keyword")?;
    let stmt = match keyword.as_str() {
        "concept" => Statement::Concept(cur.ident("a concept name")?),
        "capability" => Statement::Capability(cur.ident("a capability name")?),
        "role" => Statement::Role(cur.ident("a role name")?),
        "attribute" => {
            let name = cur.ident("an attribute name")?;
            cur.expect(Tok::Colon)?;
            let column = cur.column();
            let kind = match cur.ident("`int` or `decimal`")?.as_str() {
                "int" => ValueKind::Int,
                "decimal" => ValueKind::Decimal,
                other => {
                    return Err(syntax(
                        line,
                        column,
                        format!("unknown value kind `{other}`, expected `int` or `decimal`"),
                    ))
                }
            };
            Statement::Attribute(name, kind)
        }
        "axiom" => {
            let lhs = cur.expression()?;
            let column = cur.column();
            let kw = cur.ident("`SubClassOf`")?;
            if kw != "SubClassOf" {
                return Err(syntax(line, column, format!("expected `SubClassOf`, found `{kw}`")));
            }
            let rhs = cur.expression()?;
            Statement::Axiom(Axiom::new(lhs, rhs))
        }
        other => {
            return Err(syntax(line, 1, format!("unknown statement `{other}`")));
        }
    };
    cur.finish()?;
    Ok(Some(stmt))
}

fn parse_statements(text: &str) -> Result<Vec<(usize, Statement)>, OntologyError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if let Some(stmt) = parse_line(raw, line)? {
            out.push((line, stmt));
        }
    }
    Ok(out)
}

type SourceStatements<'a> = (Option<&'a str>, Vec<(usize, Statement)>);

fn build(statements: Vec<SourceStatements<'_>>) -> Result<TBox, OntologyError> {
    let wrap = |source: Option<&str>, e: OntologyError| match source {
        Some(name) => OntologyError::InSource {
            source_name: name.to_string(),
            error: Box::new(e),
        },
        None => e,
    };
    let mut tbox = TBox::new();
    for (source, stmts) in &statements {
        for (_, stmt) in stmts {
            let res = match stmt {
                Statement::Concept(n) => tbox.declare_concept(n.clone()),
                Statement::Capability(n) => tbox.declare_capability(n.clone()),
                Statement::Role(n) => tbox.declare_role(n.clone()),
                Statement::Attribute(n, k) => tbox.declare_attribute(n.clone(), *k),
                Statement::Axiom(_) => Ok(()),
            };
            res.map_err(|e| wrap(*source, e))?;
        }
    }
    for (source, stmts) in statements {
        for (line, stmt) in stmts {
            if let Statement::Axiom(ax) = stmt {
                tbox.add_axiom(ax).map_err(|e| wrap(source, e.at_line(line)))?;
            }
        }
    }
    Ok(tbox)
}

/// Parses one ontology document.
pub fn parse_ontology(text: &str) -> Result<TBox, OntologyError> {
    build(vec![(None, parse_statements(text)?)])
}

/// Parses several documents into one TBox; names may be referenced across
/// documents. Errors carry the name of the offending source.
pub fn parse_ontology_sources<S: AsRef<str>, T: AsRef<str>>(
    sources: &[(S, T)],
) -> Result<TBox, OntologyError> {
    let mut statements = Vec::with_capacity(sources.len());
    for (name, text) in sources {
        let stmts = parse_statements(text.as_ref()).map_err(|e| OntologyError::InSource {
            source_name: name.as_ref().to_string(),
            error: Box::new(e),
        })?;
        statements.push((Some(name.as_ref()), stmts));
    }
    build(statements)
}

/// Parses a standalone class expression without resolving names.
pub fn parse_expression(text: &str) -> Result<ConceptExpression, OntologyError> {
    let tokens = tokenize(text, 1)?;
    let mut cur = Cursor::new(&tokens, 1, text.chars().count() + 1);
    let expr = cur.expression()?;
    cur.finish()?;
    Ok(expr)
}

/// Parses a class expression and checks it against `tbox`.
pub fn parse_query(text: &str, tbox: &TBox) -> Result<ConceptExpression, OntologyError> {
    let expr = parse_expression(text)?;
    tbox.check_expression(&expr)?;
    Ok(expr)
}
