//! Recursive-descent parser producing a [`RawSpec`].
//!
//! Top-level layout, in order:
//!
//! ```text
//! #DEFINE NAME value          (zero or more)
//! server: Name(agents ..; servers ..), services {..}, states {..}, actions {..}
//!                             (zero or more)
//! servers A[2], B;
//! agents R[N];
//! init -> { ... }.
//! ```
//!
//! Commas separate list items and a trailing comma is accepted anywhere a
//! list ends. A single stray `}` after the final `.` is tolerated.

use std::collections::HashSet;

use thiserror::Error;

use super::ast::*;
use super::diag::{Diagnostic, Loc, Pos};
use super::lexer::{tokenize, Token, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {message}")]
pub struct ParseError {
    pub pos: Pos,
    pub message: String,
    /// Human-readable descriptions of the tokens that would have been accepted.
    pub expected: Vec<String>,
}

impl ParseError {
    pub fn to_diagnostic(&self) -> Diagnostic {
        Diagnostic::error(self.pos, self.message.clone())
    }
}

type PResult<T> = Result<T, ParseError>;

pub fn parse_spec(text: &str) -> PResult<RawSpec> {
    let tokens = tokenize(text).map_err(|e| ParseError { pos: e.pos, message: e.message, expected: Vec::new() })?;
    Parser { tokens, pos: 0 }.spec()
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &TokenKind {
        &self.tokens[self.pos].kind
    }

    fn peek_at(&self, offset: usize) -> &TokenKind {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[i].kind
    }

    fn here(&self) -> Pos {
        self.tokens[self.pos].pos
    }

    fn advance(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn fail<T>(&self, expected: &[&str]) -> PResult<T> {
        let found = self.peek().to_string();
        let message = match expected {
            [] => format!("unexpected {found}"),
            [one] => format!("expected {one}, found {found}"),
            many => {
                let (last, init) = many.split_last().unwrap();
                format!("expected {} or {last}, found {found}", init.join(" or "))
            }
        };
        Err(ParseError { pos: self.here(), message, expected: expected.iter().map(|s| s.to_string()).collect() })
    }

    fn error_at<T>(&self, pos: Pos, message: String) -> PResult<T> {
        Err(ParseError { pos, message, expected: Vec::new() })
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek() == kind {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<Pos> {
        if *self.peek() == kind {
            Ok(self.advance().pos)
        } else {
            self.fail(&[&kind.to_string()])
        }
    }

    fn is_keyword(&self, word: &str) -> bool {
        matches!(self.peek(), TokenKind::Ident(s) if s == word)
    }

    fn expect_keyword(&mut self, word: &str) -> PResult<Pos> {
        if self.is_keyword(word) {
            Ok(self.advance().pos)
        } else {
            self.fail(&[word])
        }
    }

    fn ident(&mut self) -> PResult<(String, Pos)> {
        match self.peek().clone() {
            TokenKind::Ident(s) => {
                let pos = self.advance().pos;
                Ok((s, pos))
            }
            _ => self.fail(&["identifier"]),
        }
    }

    fn spec(&mut self) -> PResult<RawSpec> {
        let mut spec = RawSpec::default();
        let mut define_names = HashSet::new();
        while *self.peek() == TokenKind::Define {
            let pos = self.advance().pos;
            let (name, name_pos) = self.ident()?;
            let value = match *self.peek() {
                TokenKind::Int(v) => {
                    self.advance();
                    v
                }
                _ => return self.fail(&["integer"]),
            };
            if !define_names.insert(name.clone()) {
                return self.error_at(name_pos, format!("duplicate #DEFINE `{name}`"));
            }
            spec.defines.push(Define { name, value, loc: Loc(pos) });
        }
        let mut def_names = HashSet::new();
        while self.is_keyword("server") && *self.peek_at(1) == TokenKind::Colon {
            let def = self.server_def()?;
            if !def_names.insert(def.name.clone()) {
                return self.error_at(def.loc.0, format!("duplicate server definition `{}`", def.name));
            }
            spec.server_defs.push(def);
        }
        if !self.is_keyword("servers") {
            return if spec.server_defs.is_empty() {
                self.fail(&["#DEFINE", "server", "servers"])
            } else {
                self.fail(&["server", "servers"])
            };
        }
        self.advance();
        spec.global_servers = self.decl_list()?;
        self.expect(TokenKind::Semi)?;
        self.expect_keyword("agents")?;
        spec.global_agents = self.decl_list()?;
        self.expect(TokenKind::Semi)?;
        self.expect_keyword("init")?;
        self.expect(TokenKind::Arrow)?;
        self.expect(TokenKind::LBrace)?;
        while *self.peek() != TokenKind::RBrace {
            spec.init.push(self.init_item()?);
        }
        self.advance();
        self.expect(TokenKind::Dot)?;
        self.eat(&TokenKind::RBrace);
        if *self.peek() != TokenKind::Eof {
            return self.fail(&["end of input"]);
        }
        Ok(spec)
    }

    fn server_def(&mut self) -> PResult<ServerDef> {
        let pos = self.expect_keyword("server")?;
        self.expect(TokenKind::Colon)?;
        let (name, _) = self.ident()?;
        self.expect(TokenKind::LParen)?;
        let mut formal_agents = Vec::new();
        let mut formal_servers = Vec::new();
        loop {
            if self.is_keyword("agents") {
                self.advance();
                formal_agents.extend(self.decl_list()?);
            } else if self.is_keyword("servers") {
                self.advance();
                formal_servers.extend(self.decl_list()?);
            } else if *self.peek() != TokenKind::RParen {
                return self.fail(&["agents", "servers", "`)`"]);
            }
            if !self.eat(&TokenKind::Semi) {
                break;
            }
        }
        self.expect(TokenKind::RParen)?;
        self.eat(&TokenKind::Comma);

        self.expect_keyword("services")?;
        let services = self.braced_decls()?;
        self.eat(&TokenKind::Comma);
        self.expect_keyword("states")?;
        let states = self.braced_decls()?;
        self.eat(&TokenKind::Comma);
        check_unique(&services, "service")?;
        check_unique(&states, "state")?;

        self.expect_keyword("actions")?;
        self.expect(TokenKind::LBrace)?;
        let mut actions = Vec::new();
        while *self.peek() != TokenKind::RBrace {
            actions.push(self.action()?);
        }
        self.advance();
        self.eat(&TokenKind::Comma);
        Ok(ServerDef { name, formal_agents, formal_servers, services, states, actions, loc: Loc(pos) })
    }

    fn braced_decls(&mut self) -> PResult<Vec<Decl>> {
        self.expect(TokenKind::LBrace)?;
        let decls = if *self.peek() == TokenKind::RBrace { Vec::new() } else { self.decl_list()? };
        self.expect(TokenKind::RBrace)?;
        Ok(decls)
    }

    /// One or more declarations, comma separated, trailing comma allowed.
    fn decl_list(&mut self) -> PResult<Vec<Decl>> {
        let mut out = Vec::new();
        loop {
            let (name, pos) = self.ident()?;
            let size = if self.eat(&TokenKind::LBracket) {
                let e = self.expr()?;
                self.expect(TokenKind::RBracket)?;
                Some(e)
            } else {
                None
            };
            out.push(Decl { name, size, loc: Loc(pos) });
            if !self.eat(&TokenKind::Comma) {
                break;
            }
            if !matches!(self.peek(), TokenKind::Ident(_)) {
                break;
            }
        }
        Ok(out)
    }

    fn quantifiers(&mut self) -> PResult<Vec<Quantifier>> {
        let mut out = Vec::new();
        while *self.peek() == TokenKind::Lt {
            let pos = self.advance().pos;
            let (var, _) = self.ident()?;
            self.expect(TokenKind::Eq)?;
            let lo = self.expr()?;
            self.expect(TokenKind::DotDot)?;
            let hi = self.expr()?;
            self.expect(TokenKind::Gt)?;
            out.push(Quantifier { var, lo, hi, loc: Loc(pos) });
        }
        Ok(out)
    }

    fn action(&mut self) -> PResult<ActionTemplate> {
        let pos = self.here();
        let quantifiers = self.quantifiers()?;
        self.expect(TokenKind::LBrace)?;
        let in_msg = self.msg_ref()?;
        self.expect(TokenKind::Comma)?;
        let in_state = self.state_ref()?;
        self.expect(TokenKind::RBrace)?;
        self.expect(TokenKind::Arrow)?;
        self.expect(TokenKind::LBrace)?;
        let first_pos = self.here();
        let first = self.path()?;
        let (out_msg, out_state) = match first.len() {
            3 => {
                self.expect(TokenKind::Comma)?;
                (Some(path_to_msg(first)), self.state_ref()?)
            }
            2 => (None, path_to_state(first)),
            _ => {
                return self
                    .error_at(first_pos, "expected `agent.server.service, server.state` or `server.state`".into())
            }
        };
        self.expect(TokenKind::RBrace)?;
        self.eat(&TokenKind::Comma);
        Ok(ActionTemplate { quantifiers, in_msg, in_state, out_msg, out_state, loc: Loc(pos) })
    }

    fn reference(&mut self) -> PResult<Ref> {
        let (name, pos) = self.ident()?;
        let index = if self.eat(&TokenKind::LBracket) {
            let e = self.expr()?;
            self.expect(TokenKind::RBracket)?;
            Some(e)
        } else {
            None
        };
        Ok(Ref { name, index, loc: Loc(pos) })
    }

    fn path(&mut self) -> PResult<Vec<Ref>> {
        let mut parts = vec![self.reference()?];
        while self.eat(&TokenKind::Dot) {
            parts.push(self.reference()?);
        }
        Ok(parts)
    }

    fn msg_ref(&mut self) -> PResult<MsgRef> {
        let pos = self.here();
        let parts = self.path()?;
        if parts.len() != 3 {
            return self.error_at(pos, "expected message `agent.server.service`".into());
        }
        Ok(path_to_msg(parts))
    }

    fn state_ref(&mut self) -> PResult<StateRef> {
        let pos = self.here();
        let parts = self.path()?;
        if parts.len() != 2 {
            return self.error_at(pos, "expected server state `server.state`".into());
        }
        Ok(path_to_state(parts))
    }

    fn init_item(&mut self) -> PResult<InitItem> {
        let pos = self.here();
        let quantifiers = self.quantifiers()?;
        let head = self.reference()?;
        let kind = if self.eat(&TokenKind::LParen) {
            let mut actuals = Vec::new();
            if *self.peek() != TokenKind::RParen {
                loop {
                    actuals.push(self.actual()?);
                    if !self.eat(&TokenKind::Comma) {
                        break;
                    }
                }
            }
            self.expect(TokenKind::RParen)?;
            self.expect(TokenKind::Dot)?;
            let state = self.reference()?;
            InitKind::Server(ServerInit { instance: head, actuals, state })
        } else {
            self.expect(TokenKind::Dot)?;
            let server = self.reference()?;
            self.expect(TokenKind::Dot)?;
            let service = self.reference()?;
            InitKind::Message(MsgRef { agent: head, server, service })
        };
        self.eat(&TokenKind::Comma);
        Ok(InitItem { quantifiers, kind, loc: Loc(pos) })
    }

    fn actual(&mut self) -> PResult<Actual> {
        let (name, pos) = self.ident()?;
        let index = if self.eat(&TokenKind::LBracket) {
            let first = self.expr()?;
            let index = if self.eat(&TokenKind::DotDot) {
                ActualIndex::Range(first, self.expr()?)
            } else if *self.peek() == TokenKind::Comma {
                let mut items = vec![first];
                while self.eat(&TokenKind::Comma) {
                    items.push(self.expr()?);
                }
                ActualIndex::List(items)
            } else {
                ActualIndex::Single(first)
            };
            self.expect(TokenKind::RBracket)?;
            index
        } else {
            ActualIndex::None
        };
        Ok(Actual { name, index, loc: Loc(pos) })
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(&TokenKind::Plus) {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(&TokenKind::Minus) {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            TokenKind::Int(v) => {
                self.advance();
                Ok(Expr::Int(v))
            }
            TokenKind::Ident(s) => {
                self.advance();
                Ok(Expr::Var(s))
            }
            _ => self.fail(&["integer", "identifier"]),
        }
    }
}

fn path_to_msg(mut parts: Vec<Ref>) -> MsgRef {
    let service = parts.pop().unwrap();
    let server = parts.pop().unwrap();
    let agent = parts.pop().unwrap();
    MsgRef { agent, server, service }
}

fn path_to_state(mut parts: Vec<Ref>) -> StateRef {
    let state = parts.pop().unwrap();
    let server = parts.pop().unwrap();
    StateRef { server, state }
}

fn check_unique(decls: &[Decl], what: &str) -> PResult<()> {
    let mut seen = HashSet::new();
    for d in decls {
        if !seen.insert(d.name.as_str()) {
            return Err(ParseError {
                pos: d.loc.0,
                message: format!("duplicate {what} `{}`", d.name),
                expected: Vec::new(),
            });
        }
    }
    Ok(())
}
