//! Recursive-descent parser.
//!
//! ```text
//! expr  = term { ("+" | "-") term } ;
//! term  = unary { ("*" | "/") unary } ;
//! unary = "-" unary | power ;
//! power = atom [ "^" unary ] ;
//! atom  = INT | "q" | IDENT | "(" expr ")"
//!       | "poch" "(" expr "," count ")"
//!       | "sum" "(" IDENT "," expr "," count "," expr ")"
//!       | "bsum" "(" IDENT "," expr ")" ;
//! count = "inf" | expr ;
//! ```

use thiserror::Error;

use super::ast::{Bound, Expr};
use super::lexer::{tokenize, LexError, Token, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("expected {expected}, found {found} at line {line}, column {col}")]
pub struct ParseError {
    pub expected: String,
    pub found: String,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Tokenize and parse in one step.
pub fn parse_str(text: &str) -> Result<Expr, SyntaxError> {
    Ok(parse(&tokenize(text)?)?)
}

pub fn parse(tokens: &[Token]) -> Result<Expr, ParseError> {
    let mut p = Parser { tokens, pos: 0 };
    let e = p.expr()?;
    if p.pos < tokens.len() {
        return Err(p.error("end of input"));
    }
    Ok(e)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn error(&self, expected: &str) -> ParseError {
        match self.tokens.get(self.pos) {
            Some(t) => ParseError {
                expected: expected.to_string(),
                found: format!("`{}`", t.kind),
                line: t.line,
                col: t.col,
            },
            None => {
                let (line, col) = self
                    .tokens
                    .last()
                    .map(|t| (t.line, t.col + t.kind.to_string().len()))
                    .unwrap_or((1, 1));
                ParseError {
                    expected: expected.to_string(),
                    found: "end of input".to_string(),
                    line,
                    col,
                }
            }
        }
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek() == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<(), ParseError> {
        if self.eat(&kind) {
            Ok(())
        } else {
            Err(self.error(&format!("`{kind}`")))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(TokenKind::Ident(name)) => {
                let name = name.clone();
                self.pos += 1;
                Ok(name)
            }
            _ => Err(self.error("an index name")),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
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

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(&TokenKind::Star) {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(&TokenKind::Slash) {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(&TokenKind::Minus) {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat(&TokenKind::Caret) {
            return Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn count(&mut self) -> Result<Bound, ParseError> {
        if self.eat(&TokenKind::Inf) {
            Ok(Bound::Inf)
        } else {
            Ok(Bound::Finite(Box::new(self.expr()?)))
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let Some(kind) = self.peek().cloned() else {
            return Err(self.error("an expression"));
        };
        match kind {
            TokenKind::Int(n) => {
                self.pos += 1;
                Ok(Expr::Int(n))
            }
            TokenKind::Q => {
                self.pos += 1;
                Ok(Expr::Q)
            }
            TokenKind::Ident(name) => {
                self.pos += 1;
                Ok(Expr::Param(name))
            }
            TokenKind::LParen => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(e)
            }
            TokenKind::Poch => {
                self.pos += 1;
                self.expect(TokenKind::LParen)?;
                let base = self.expr()?;
                self.expect(TokenKind::Comma)?;
                let n = self.count()?;
                self.expect(TokenKind::RParen)?;
                Ok(Expr::Poch(Box::new(base), n))
            }
            TokenKind::Sum => {
                self.pos += 1;
                self.expect(TokenKind::LParen)?;
                let index = self.ident()?;
                self.expect(TokenKind::Comma)?;
                let lo = self.expr()?;
                self.expect(TokenKind::Comma)?;
                let hi = self.count()?;
                self.expect(TokenKind::Comma)?;
                let body = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(Expr::Sum {
                    index,
                    lo: Box::new(lo),
                    hi,
                    body: Box::new(body),
                })
            }
            TokenKind::Bsum => {
                self.pos += 1;
                self.expect(TokenKind::LParen)?;
                let index = self.ident()?;
                self.expect(TokenKind::Comma)?;
                let body = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(Expr::Bsum {
                    index,
                    body: Box::new(body),
                })
            }
            _ => Err(self.error("an expression")),
        }
    }
}
