use std::fmt;

use num_bigint::BigInt;

/// Upper limit of a sum or length of a Pochhammer symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bound {
    Finite(Box<Expr>),
    Inf,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    Q,
    Param(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Exponent must evaluate to an integer.
    Pow(Box<Expr>, Box<Expr>),
    Poch(Box<Expr>, Bound),
    Sum {
        index: String,
        lo: Box<Expr>,
        hi: Bound,
        body: Box<Expr>,
    },
    Bsum {
        index: String,
        body: Box<Expr>,
    },
}

// binding strength, loosest first
const ADD: u8 = 1;
const MUL: u8 = 2;
const UNARY: u8 = 3;
const POW: u8 = 4;
const ATOM: u8 = 5;

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => ADD,
            Expr::Mul(..) | Expr::Div(..) => MUL,
            Expr::Neg(_) => UNARY,
            Expr::Int(n) if n.sign() == num_bigint::Sign::Minus => UNARY,
            Expr::Pow(..) => POW,
            _ => ATOM,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            f.write_str("(")?;
            self.write_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Q => f.write_str("q"),
            Expr::Param(p) => f.write_str(p),
            Expr::Neg(e) => {
                f.write_str("-")?;
                e.write_at(f, UNARY)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                a.write_at(f, ADD)?;
                f.write_str(if matches!(self, Expr::Add(..)) {
                    " + "
                } else {
                    " - "
                })?;
                b.write_at(f, MUL)
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.write_at(f, MUL)?;
                f.write_str(if matches!(self, Expr::Mul(..)) {
                    "*"
                } else {
                    "/"
                })?;
                b.write_at(f, UNARY)
            }
            Expr::Pow(a, b) => {
                a.write_at(f, ATOM)?;
                f.write_str("^")?;
                b.write_at(f, UNARY)
            }
            Expr::Poch(base, n) => write!(f, "poch({base}, {n})"),
            Expr::Sum {
                index,
                lo,
                hi,
                body,
            } => write!(f, "sum({index}, {lo}, {hi}, {body})"),
            Expr::Bsum { index, body } => write!(f, "bsum({index}, {body})"),
        }
    }
}

/// Normal form with the fewest parentheses that parse back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(e) => write!(f, "{e}"),
            Bound::Inf => f.write_str("inf"),
        }
    }
}
