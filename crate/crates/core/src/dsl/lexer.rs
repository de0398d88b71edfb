use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Int(BigInt),
    Ident(String),
    Q,
    Caret,
    Star,
    Slash,
    Plus,
    Minus,
    LParen,
    RParen,
    Comma,
    Poch,
    Sum,
    Bsum,
    Inf,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Int(n) => write!(f, "{n}"),
            TokenKind::Ident(s) => f.write_str(s),
            TokenKind::Q => f.write_str("q"),
            TokenKind::Caret => f.write_str("^"),
            TokenKind::Star => f.write_str("*"),
            TokenKind::Slash => f.write_str("/"),
            TokenKind::Plus => f.write_str("+"),
            TokenKind::Minus => f.write_str("-"),
            TokenKind::LParen => f.write_str("("),
            TokenKind::RParen => f.write_str(")"),
            TokenKind::Comma => f.write_str(","),
            TokenKind::Poch => f.write_str("poch"),
            TokenKind::Sum => f.write_str("sum"),
            TokenKind::Bsum => f.write_str("bsum"),
            TokenKind::Inf => f.write_str("inf"),
        }
    }
}

/// A token with its 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unexpected character {ch:?} at line {line}, column {col}")]
pub struct LexError {
    pub ch: char,
    pub line: usize,
    pub col: usize,
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, LexError> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1, 1);
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let single = match c {
            '^' => Some(TokenKind::Caret),
            '*' => Some(TokenKind::Star),
            '/' => Some(TokenKind::Slash),
            '+' => Some(TokenKind::Plus),
            '-' => Some(TokenKind::Minus),
            '(' => Some(TokenKind::LParen),
            ')' => Some(TokenKind::RParen),
            ',' => Some(TokenKind::Comma),
            _ => None,
        };
        if let Some(kind) = single {
            chars.next();
            col += 1;
            tokens.push(Token {
                kind,
                line: tline,
                col: tcol,
            });
            continue;
        }
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            col += 1;
            continue;
        }
        let mut word = String::new();
        if c.is_ascii_digit() {
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                word.push(d);
                chars.next();
            }
            col += word.len();
            let n: BigInt = word.parse().expect("digits");
            tokens.push(Token {
                kind: TokenKind::Int(n),
                line: tline,
                col: tcol,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while let Some(&d) = chars
                .peek()
                .filter(|d| d.is_ascii_alphanumeric() || **d == '_')
            {
                word.push(d);
                chars.next();
            }
            col += word.len();
            let kind = match word.as_str() {
                "q" => TokenKind::Q,
                "poch" => TokenKind::Poch,
                "sum" => TokenKind::Sum,
                "bsum" => TokenKind::Bsum,
                "inf" => TokenKind::Inf,
                _ => TokenKind::Ident(word),
            };
            tokens.push(Token {
                kind,
                line: tline,
                col: tcol,
            });
            continue;
        }
        return Err(LexError { ch: c, line, col });
    }
    Ok(tokens)
}
