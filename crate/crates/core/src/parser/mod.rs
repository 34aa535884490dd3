//! Text formats.
//!
//! All formats share one lexer: `//` line comments, double-quoted strings
//! with `\"`, `\\`, `\n`, `\t`, `\r` escapes, finite decimal doubles and ISO
//! `YYYY-MM-DD` dates. Expressions use call syntax only (`and(a, b)`), so
//! there is no operator precedence to get wrong.
//!
//! | file    | grammar                                                        |
//! |---------|----------------------------------------------------------------|
//! | `.facpl`| `pdp { alg policies: P+ }`, `{ alg target: E policies: P+ }`, `( permit target: E )` |
//! | `.req`  | `(cat/att, value)*`; bare identifiers read as strings          |
//! | `.dom`  | `cat/att : kind in {v, ...} [required]`                         |
//! | `.cfg`  | `levels: a <= b ...` and `roles: child -> parent ...`          |
//! | `.spec` | `[domain: "file.dom"] [config: "file.cfg"] constraint: E`      |

mod lexer;
mod print;

use std::fmt;

use crate::model::{
    AttrDomain, AttrKind, AttrName, Binding, CombAlg, Document, DomainSpec, Effect, EngineConfig,
    Expr, Func, LevelOrder, Pdp, Policy, PolicySet, Request, RoleHierarchy, Rule, Value, ValueSet,
};
use lexer::{tokenize, Tok, Token};

const MAX_DEPTH: usize = 256;

/// A syntax or validation error with a 1-based position.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {message}")]
pub struct SourceError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    /// The offending source line.
    pub snippet: String,
}

impl SourceError {
    pub(crate) fn at(src: &str, line: usize, column: usize, message: impl Into<String>) -> Self {
        let snippet = src.lines().nth(line - 1).unwrap_or("").trim_end().to_owned();
        SourceError { line, column, message: message.into(), snippet }
    }

    /// Multi-line rendering with a caret under the column.
    pub fn render(&self, file: &str) -> String {
        let pad = " ".repeat(self.column.saturating_sub(1));
        format!(
            "{file}:{}:{}: {}\n    {}\n    {pad}^",
            self.line, self.column, self.message, self.snippet
        )
    }
}

/// A parsed `.spec` file. Paths are left unresolved.
#[derive(Debug, Clone, PartialEq)]
pub struct RequestSetText {
    pub domain: Option<String>,
    pub config: Option<String>,
    pub constraint: Expr,
}

pub fn parse_policy(text: &str) -> Result<Document, SourceError> {
    let mut p = Parser::new(text)?;
    let doc = if p.peek_ident("pdp") {
        Document::Pdp(p.pdp()?)
    } else {
        Document::Policy(p.policy(0)?)
    };
    p.expect_eof()?;
    Ok(doc)
}

pub fn parse_expr(text: &str) -> Result<Expr, SourceError> {
    let mut p = Parser::new(text)?;
    let e = p.expr(0)?;
    p.expect_eof()?;
    Ok(e)
}

pub fn parse_request(text: &str) -> Result<Request, SourceError> {
    let mut p = Parser::new(text)?;
    let mut entries = Vec::new();
    let first = p.peek().clone();
    while p.peek().tok != Tok::Eof {
        p.expect(Tok::LParen, "`(` opening a request entry")?;
        let name = p.attr_name()?;
        p.expect(Tok::Comma, "`,`")?;
        let binding = if p.peek().tok == Tok::LBrace {
            Binding::Set(p.set_literal(true)?)
        } else {
            Binding::Value(p.value(true)?)
        };
        p.expect(Tok::RParen, "`)` closing a request entry")?;
        entries.push((name, binding));
    }
    Request::from_entries(entries).map_err(|e| p.error_at(&first, e.to_string()))
}

pub fn parse_domain(text: &str) -> Result<DomainSpec, SourceError> {
    let mut p = Parser::new(text)?;
    let mut spec = DomainSpec::new();
    while p.peek().tok != Tok::Eof {
        let start = p.peek().clone();
        let name = p.attr_name()?;
        p.expect(Tok::Colon, "`:`")?;
        let kind_tok = p.bump();
        let kind = match &kind_tok.tok {
            Tok::Ident(k) => AttrKind::from_name(k).ok_or_else(|| {
                p.error_at(&kind_tok, format!("unknown attribute kind `{k}`"))
            })?,
            other => return Err(p.error_at(&kind_tok, format!("expected attribute kind, found {}", other.describe()))),
        };
        if !p.peek_ident("in") {
            return Err(p.unexpected("`in`"));
        }
        p.bump();
        p.expect(Tok::LBrace, "`{`")?;
        let mut universe = vec![p.value(true)?];
        while p.eat(&Tok::Comma) {
            universe.push(p.value(true)?);
        }
        p.expect(Tok::RBrace, "`}`")?;
        let required = p.peek_ident("required") && p.peek_at(1).tok != Tok::Slash;
        if required {
            p.bump();
        }
        let domain = AttrDomain::new(kind, universe, !required)
            .map_err(|e| p.error_at(&start, format!("`{name}`: {e}")))?;
        spec.declare(name, domain).map_err(|e| p.error_at(&start, e.to_string()))?;
    }
    Ok(spec)
}

pub fn parse_config(text: &str) -> Result<EngineConfig, SourceError> {
    let mut p = Parser::new(text)?;
    let (mut level_names, mut level_pairs) = (Vec::new(), Vec::new());
    let (mut role_names, mut role_edges) = (Vec::new(), Vec::new());
    let mut levels_at: Option<Token> = None;
    let mut roles_at: Option<Token> = None;
    while p.peek().tok != Tok::Eof {
        let header = p.bump();
        let section = match &header.tok {
            Tok::Ident(s) if s == "levels" || s == "roles" => s.clone(),
            _ => return Err(p.error_at(&header, "expected section `levels:` or `roles:`")),
        };
        p.expect(Tok::Colon, "`:`")?;
        let (sep, names, pairs) = if section == "levels" {
            levels_at.get_or_insert(header);
            (Tok::Le, &mut level_names, &mut level_pairs)
        } else {
            roles_at.get_or_insert(header);
            (Tok::Arrow, &mut role_names, &mut role_edges)
        };
        while !p.at_section_header() && p.peek().tok != Tok::Eof {
            let a = p.symbol()?;
            if p.eat(&sep) {
                let b = p.symbol()?;
                pairs.push((a, b));
            } else {
                names.push(a);
            }
            p.eat(&Tok::Comma);
        }
    }
    let origin = |t: &Option<Token>| t.clone().unwrap_or(Token { tok: Tok::Eof, line: 1, col: 1 });
    let levels = LevelOrder::new(level_names, level_pairs)
        .map_err(|e| p.error_at(&origin(&levels_at), e.to_string()))?;
    let roles = RoleHierarchy::new(role_names, role_edges)
        .map_err(|e| p.error_at(&origin(&roles_at), e.to_string()))?;
    Ok(EngineConfig::new(levels, roles))
}

pub fn parse_request_set(text: &str) -> Result<RequestSetText, SourceError> {
    let mut p = Parser::new(text)?;
    let (mut domain, mut config, mut constraint) = (None, None, None);
    while p.peek().tok != Tok::Eof {
        let key = p.bump();
        let Tok::Ident(k) = &key.tok else {
            return Err(p.error_at(&key, "expected `domain:`, `config:` or `constraint:`"));
        };
        let slot_taken = match k.as_str() {
            "domain" => domain.is_some(),
            "config" => config.is_some(),
            "constraint" => constraint.is_some(),
            _ => return Err(p.error_at(&key, format!("unknown key `{k}`"))),
        };
        if slot_taken {
            return Err(p.error_at(&key, format!("duplicate key `{k}`")));
        }
        p.expect(Tok::Colon, "`:`")?;
        match k.as_str() {
            "domain" => domain = Some(p.path()?),
            "config" => config = Some(p.path()?),
            _ => constraint = Some(p.expr(0)?),
        }
    }
    let constraint = constraint.ok_or_else(|| p.unexpected("`constraint:`"))?;
    Ok(RequestSetText { domain, config, constraint })
}

struct Parser<'a> {
    src: &'a str,
    tokens: Vec<Token>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, SourceError> {
        Ok(Parser { src, tokens: tokenize(src)?, pos: 0 })
    }

    fn peek(&self) -> &Token {
        self.peek_at(0)
    }

    fn peek_at(&self, n: usize) -> &Token {
        let last = self.tokens.len() - 1;
        &self.tokens[(self.pos + n).min(last)]
    }

    fn peek_ident(&self, word: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == word)
    }

    fn at_section_header(&self) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == "levels" || s == "roles")
            && self.peek_at(1).tok == Tok::Colon
    }

    fn bump(&mut self) -> Token {
        let t = self.peek().clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if &self.peek().tok == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error_at(&self, tok: &Token, msg: impl Into<String>) -> SourceError {
        SourceError::at(self.src, tok.line, tok.col, msg)
    }

    fn unexpected(&self, wanted: &str) -> SourceError {
        let t = self.peek();
        self.error_at(t, format!("expected {wanted}, found {}", t.tok.describe()))
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Result<Token, SourceError> {
        if self.peek().tok == tok {
            Ok(self.bump())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn expect_eof(&self) -> Result<(), SourceError> {
        if self.peek().tok == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    fn keyword(&mut self, word: &str) -> Result<(), SourceError> {
        if self.peek_ident(word) && self.peek_at(1).tok == Tok::Colon {
            self.bump();
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{word}:`")))
        }
    }

    fn ident(&mut self, wanted: &str) -> Result<(Token, String), SourceError> {
        match self.peek().tok.clone() {
            Tok::Ident(s) => Ok((self.bump(), s)),
            _ => Err(self.unexpected(wanted)),
        }
    }

    fn alg(&mut self) -> Result<CombAlg, SourceError> {
        let (tok, name) = self.ident("combining algorithm")?;
        name.parse()
            .map_err(|_| self.error_at(&tok, format!("unknown combining algorithm `{name}`")))
    }

    fn attr_name(&mut self) -> Result<AttrName, SourceError> {
        let (tok, cat) = self.ident("attribute name")?;
        self.expect(Tok::Slash, "`/` in attribute name")?;
        let (_, att) = self.ident("attribute identifier after `/`")?;
        AttrName::new(cat, att).map_err(|e| self.error_at(&tok, e.to_string()))
    }

    /// A level or role name: identifier or string literal.
    fn symbol(&mut self) -> Result<String, SourceError> {
        match self.peek().tok.clone() {
            Tok::Ident(s) | Tok::Str(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected("name")),
        }
    }

    fn path(&mut self) -> Result<String, SourceError> {
        match self.peek().tok.clone() {
            Tok::Str(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected("quoted path")),
        }
    }

    /// A literal; with `bare_strings`, identifiers other than `true`/`false`
    /// read as strings.
    fn value(&mut self, bare_strings: bool) -> Result<Value, SourceError> {
        let t = self.peek().clone();
        let v = match t.tok {
            Tok::Str(s) => Value::Str(s),
            Tok::Number(d) => Value::Double(d),
            Tok::Date(d) => Value::Date(d),
            Tok::Ident(ref s) if s == "true" => Value::Bool(true),
            Tok::Ident(ref s) if s == "false" => Value::Bool(false),
            Tok::Ident(ref s) if bare_strings => Value::Str(s.clone()),
            _ => return Err(self.unexpected("literal value")),
        };
        self.bump();
        Ok(v)
    }

    fn set_literal(&mut self, bare_strings: bool) -> Result<ValueSet, SourceError> {
        let open = self.expect(Tok::LBrace, "`{`")?;
        if self.peek().tok == Tok::RBrace {
            return Err(self.error_at(&open, "empty set literal"));
        }
        let mut values = vec![self.value(bare_strings)?];
        while self.eat(&Tok::Comma) {
            values.push(self.value(bare_strings)?);
        }
        self.expect(Tok::RBrace, "`,` or `}`")?;
        ValueSet::new(values).map_err(|e| self.error_at(&open, e.to_string()))
    }

    fn expr(&mut self, depth: usize) -> Result<Expr, SourceError> {
        if depth > MAX_DEPTH {
            return Err(self.error_at(&self.peek().clone(), "expression nested too deeply"));
        }
        let t = self.peek().clone();
        match &t.tok {
            Tok::LBrace => Ok(Expr::Set(self.set_literal(false)?)),
            Tok::Str(_) | Tok::Number(_) | Tok::Date(_) => Ok(Expr::Literal(self.value(false)?)),
            Tok::Ident(s) if (s == "true" || s == "false") && self.peek_at(1).tok != Tok::Slash => {
                Ok(Expr::Literal(self.value(false)?))
            }
            Tok::Ident(s) => match self.peek_at(1).tok {
                Tok::Slash => Ok(Expr::Name(self.attr_name()?)),
                Tok::LParen => {
                    let name = s.clone();
                    self.bump();
                    self.bump();
                    let first = self.expr(depth + 1)?;
                    let e = if name == "not" {
                        Expr::Not(Box::new(first))
                    } else {
                        let func = Func::from_name(&name)
                            .ok_or_else(|| self.error_at(&t, format!("unknown function `{name}`")))?;
                        self.expect(Tok::Comma, &format!("`,` ({name} takes two arguments)"))?;
                        let second = self.expr(depth + 1)?;
                        Expr::call(func, first, second)
                    };
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(e)
                }
                _ => Err(self.error_at(
                    &t,
                    format!("bare identifier `{s}` (string literals must be double-quoted)"),
                )),
            },
            _ => Err(self.unexpected("expression")),
        }
    }

    fn policy(&mut self, depth: usize) -> Result<Policy, SourceError> {
        if depth > MAX_DEPTH {
            return Err(self.error_at(&self.peek().clone(), "policy nested too deeply"));
        }
        match self.peek().tok {
            Tok::LParen => self.rule().map(Policy::Rule),
            Tok::LBrace => self.policy_set(depth).map(Policy::Set),
            _ => Err(self.unexpected("`(` or `{` starting a policy")),
        }
    }

    fn rule(&mut self) -> Result<Rule, SourceError> {
        self.expect(Tok::LParen, "`(`")?;
        let (tok, effect) = self.ident("`permit` or `deny`")?;
        let effect = match effect.as_str() {
            "permit" => Effect::Permit,
            "deny" => Effect::Deny,
            other => return Err(self.error_at(&tok, format!("unknown effect `{other}`"))),
        };
        self.keyword("target")?;
        let target = self.expr(0)?;
        self.expect(Tok::RParen, "`)` closing the rule")?;
        Ok(Rule { effect, target })
    }

    fn children(&mut self, depth: usize) -> Result<Vec<Policy>, SourceError> {
        self.keyword("policies")?;
        let mut children = Vec::new();
        while matches!(self.peek().tok, Tok::LParen | Tok::LBrace) {
            children.push(self.policy(depth + 1)?);
        }
        if children.is_empty() {
            let t = self.peek().clone();
            return Err(self.error_at(&t, "empty policy list"));
        }
        self.expect(Tok::RBrace, "`}` closing the policy list")?;
        Ok(children)
    }

    fn policy_set(&mut self, depth: usize) -> Result<PolicySet, SourceError> {
        let open = self.expect(Tok::LBrace, "`{`")?;
        let alg = self.alg()?;
        let target = if self.peek_ident("target") {
            self.keyword("target")?;
            Some(self.expr(0)?)
        } else {
            None
        };
        let children = self.children(depth)?;
        PolicySet::new(alg, target, children).map_err(|e| self.error_at(&open, e.to_string()))
    }

    fn pdp(&mut self) -> Result<Pdp, SourceError> {
        let kw = self.bump();
        self.expect(Tok::LBrace, "`{`")?;
        let alg = self.alg()?;
        let children = self.children(0)?;
        Pdp::new(alg, children).map_err(|e| self.error_at(&kw, e.to_string()))
    }
}

/// Canonical text of any parsed artefact.
pub fn to_canonical(doc: &Document) -> String {
    doc.to_string()
}

impl fmt::Display for RequestSetText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(d) = &self.domain {
            writeln!(f, "domain: {}", Value::Str(d.clone()))?;
        }
        if let Some(c) = &self.config {
            writeln!(f, "config: {}", Value::Str(c.clone()))?;
        }
        writeln!(f, "constraint: {}", self.constraint)
    }
}
