//! A small expression language for q-series.
//!
//! ```text
//! sum(n, 0, inf, q^(n^2)/poch(q, n)^2)   // sum_{n>=0} q^{n^2}/(q;q)_n^2
//! bsum(j, (-1)^j*q^(j*(3*j - 1)/2))      // sum over all integers j
//! 1/poch(q^(M + 1), inf)                 // 1/(q^{M+1};q)_inf
//! ```
//!
//! `poch(x, n)` is `(x;q)_n`, with `(x;q)_{-k} = 1/(x q^{-k};q)_k` for
//! negative lengths. Identifiers other than the keywords `q`, `poch`, `sum`,
//! `bsum` and `inf` are parameters or sum indices.

mod ast;
mod eval;
mod lexer;
mod manifest;
mod parser;

pub use ast::{Bound, Expr};
pub use eval::{evaluate, evaluate_with, EvalConfig, EvalError};
pub use lexer::{tokenize, LexError, Token, TokenKind};
pub use manifest::{parse_manifest, parse_range, Check, Manifest, ManifestError};
pub use parser::{parse, parse_str, ParseError, SyntaxError};
