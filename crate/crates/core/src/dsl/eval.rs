//! Evaluation of expressions to truncated series.
//!
//! Values are integers, exact Laurent polynomials or truncated series.
//! Exact polynomials (from `q`, finite products and finite sums of them)
//! keep every coefficient, so multiplying by `q^(-k)` later costs no
//! precision. Everything else is computed at a working order, which is
//! raised automatically when the final result comes out short.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use super::ast::{Bound, Expr};
use crate::series::{pochhammer, Count, QMonomial, QSeries, SeriesError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("unbound parameter `{0}`")]
    Unbound(String),
    #[error("{0} must evaluate to an integer")]
    NotAnInteger(&'static str),
    #[error("integer {0} out of range")]
    Overflow(String),
    #[error("poch(x, inf) needs x of positive valuation")]
    InvalidPochBase,
    #[error("infinite sum over `{index}` did not settle within {budget} terms")]
    EvalDivergence { index: String, budget: i64 },
    #[error("could not reach order {0}")]
    InsufficientPrecision(i64),
}

/// Stopping rule for infinite sums: a direction ends after `window`
/// consecutive terms of valuation above the working order, and fails after
/// `budget` terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalConfig {
    pub window: u32,
    pub budget: i64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            window: 4,
            budget: 10_000,
        }
    }
}

#[derive(Debug, Clone)]
enum Value {
    Int(BigInt),
    /// Exact Laurent polynomial; the stored order is only a carrier.
    Poly(QSeries),
    Series(QSeries),
}

impl Value {
    fn negate(self) -> Value {
        match self {
            Value::Int(n) => Value::Int(-n),
            Value::Poly(p) => Value::Poly(-p),
            Value::Series(s) => Value::Series(-s),
        }
    }

    fn into_series(self, w: i64) -> QSeries {
        match self {
            Value::Int(n) => QSeries::monomial(n, 0, w),
            Value::Poly(p) => p,
            Value::Series(s) => s,
        }
    }

    fn valuation_bound(&self) -> i64 {
        match self {
            Value::Int(n) if n.is_zero() => i64::MAX,
            Value::Int(_) => 0,
            Value::Poly(p) => p.valuation().unwrap_or(i64::MAX),
            Value::Series(s) => s.valuation_bound(),
        }
    }
}

fn poly(min_exp: i64, coeffs: Vec<BigInt>, w: i64) -> QSeries {
    let top = min_exp + coeffs.len() as i64 - 1;
    QSeries::from_coeffs(min_exp, coeffs, top.max(w))
}

fn poly_mul(a: &QSeries, b: &QSeries, w: i64) -> QSeries {
    if a.is_zero() || b.is_zero() {
        return QSeries::zero(w);
    }
    let (ac, bc) = (a.coeffs(), b.coeffs());
    let mut out = vec![BigInt::zero(); ac.len() + bc.len() - 1];
    for (i, x) in ac.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in bc.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    poly(a.min_exp() + b.min_exp(), out, w)
}

/// `c q^e` with `c = +-1`, if that is what `s` is.
fn unit_monomial(s: &QSeries) -> Option<(i64, i64)> {
    let mut terms = s.terms().filter(|(_, c)| !c.is_zero());
    let (e, c) = terms.next()?;
    if terms.next().is_some() || c.abs() != BigInt::one() {
        return None;
    }
    Some((if c.is_negative() { -1 } else { 1 }, e))
}

fn to_i64(n: &BigInt) -> Result<i64, EvalError> {
    n.to_i64().ok_or_else(|| EvalError::Overflow(n.to_string()))
}

pub struct Evaluator<'a> {
    config: EvalConfig,
    params: &'a BTreeMap<String, i64>,
    // sum indices in scope, innermost last
    scope: Vec<(String, i64)>,
    w: i64,
    // exact polynomials longer than this are demoted to series at order `w`
    poly_cap: i64,
}

/// Evaluate `e` with the default stopping rule.
pub fn evaluate(
    e: &Expr,
    params: &BTreeMap<String, i64>,
    order: i64,
) -> Result<QSeries, EvalError> {
    evaluate_with(e, params, order, EvalConfig::default())
}

pub fn evaluate_with(
    e: &Expr,
    params: &BTreeMap<String, i64>,
    order: i64,
    config: EvalConfig,
) -> Result<QSeries, EvalError> {
    let mut w = order;
    for _ in 0..16 {
        let mut ev = Evaluator {
            config,
            params,
            scope: Vec::new(),
            w,
            poly_cap: 2 * w + 64,
        };
        let s = match ev.eval(e)? {
            Value::Int(n) => return Ok(QSeries::monomial(n, 0, order)),
            Value::Poly(p) => return Ok(p.lift_exact(p.order().max(order)).truncate(order)),
            Value::Series(s) => s,
        };
        if s.order() >= order {
            return Ok(s.truncate(order));
        }
        w += (order - s.order()).max(1);
    }
    Err(EvalError::InsufficientPrecision(order))
}

impl Evaluator<'_> {
    fn lookup(&self, name: &str) -> Result<i64, EvalError> {
        self.scope
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
            .or_else(|| self.params.get(name).copied())
            .ok_or_else(|| EvalError::Unbound(name.to_string()))
    }

    fn int(&mut self, e: &Expr, what: &'static str) -> Result<i64, EvalError> {
        match self.eval(e)? {
            Value::Int(n) => to_i64(&n),
            _ => Err(EvalError::NotAnInteger(what)),
        }
    }

    fn exact(&self, p: QSeries) -> Value {
        match p.max_exp() {
            Some(top) if top > self.poly_cap => Value::Series(p.truncate(self.w)),
            _ => Value::Poly(p),
        }
    }

    fn eval(&mut self, e: &Expr) -> Result<Value, EvalError> {
        let w = self.w;
        Ok(match e {
            Expr::Int(n) => Value::Int(n.clone()),
            Expr::Q => Value::Poly(QSeries::monomial(1, 1, w)),
            Expr::Param(name) => Value::Int(self.lookup(name)?.into()),
            Expr::Neg(a) => self.eval(a)?.negate(),
            Expr::Add(a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                self.add(a, b)
            }
            Expr::Sub(a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                self.add(a, b.negate())
            }
            Expr::Mul(a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                self.mul(a, b)
            }
            Expr::Div(a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                self.div(a, b)?
            }
            Expr::Pow(a, k) => {
                let base = self.eval(a)?;
                let k = self.int(k, "exponent")?;
                self.pow(base, k)?
            }
            Expr::Poch(x, n) => {
                let x = self.eval(x)?;
                let n = match n {
                    Bound::Inf => None,
                    Bound::Finite(n) => Some(self.int(n, "poch length")?),
                };
                self.poch(x, n)?
            }
            Expr::Sum {
                index,
                lo,
                hi,
                body,
            } => {
                let lo = self.int(lo, "sum bound")?;
                match hi {
                    Bound::Finite(hi) => {
                        let hi = self.int(hi, "sum bound")?;
                        let mut acc = Value::Int(BigInt::zero());
                        for i in lo..=hi {
                            let t = self.with_index(index, i, body)?;
                            acc = self.add(acc, t);
                        }
                        acc
                    }
                    Bound::Inf => {
                        self.infinite_sum(index, lo, 1, body, Value::Int(BigInt::zero()))?
                    }
                }
            }
            Expr::Bsum { index, body } => {
                let up = self.infinite_sum(index, 0, 1, body, Value::Int(BigInt::zero()))?;
                self.infinite_sum(index, -1, -1, body, up)?
            }
        })
    }

    fn with_index(&mut self, index: &str, i: i64, body: &Expr) -> Result<Value, EvalError> {
        self.scope.push((index.to_string(), i));
        let v = self.eval(body);
        self.scope.pop();
        v
    }

    fn infinite_sum(
        &mut self,
        index: &str,
        start: i64,
        step: i64,
        body: &Expr,
        mut acc: Value,
    ) -> Result<Value, EvalError> {
        let mut quiet = 0;
        let mut i = start;
        while quiet < self.config.window {
            if (i - start).abs() >= self.config.budget {
                return Err(EvalError::EvalDivergence {
                    index: index.to_string(),
                    budget: self.config.budget,
                });
            }
            let t = self.with_index(index, i, body)?;
            if t.valuation_bound() > self.w {
                quiet += 1;
            } else {
                quiet = 0;
                acc = self.add(acc, t);
            }
            i += step;
        }
        // the tail is only known to the working order
        Ok(Value::Series(acc.into_series(self.w).truncate(self.w)))
    }

    fn add(&self, a: Value, b: Value) -> Value {
        match (a, b) {
            (Value::Int(x), Value::Int(y)) => Value::Int(x + y),
            (Value::Int(x), Value::Poly(p)) | (Value::Poly(p), Value::Int(x)) => {
                self.exact(&p + &QSeries::monomial(x, 0, p.order()))
            }
            (Value::Poly(p), Value::Poly(r)) => {
                let o = p.order().max(r.order());
                self.exact(&p.lift_exact(o) + &r.lift_exact(o))
            }
            (a, b) => Value::Series(&a.into_series(self.w) + &b.into_series(self.w)),
        }
    }

    fn mul(&self, a: Value, b: Value) -> Value {
        match (a, b) {
            (Value::Int(x), Value::Int(y)) => Value::Int(x * y),
            (Value::Int(x), Value::Poly(p)) | (Value::Poly(p), Value::Int(x)) => {
                Value::Poly(p.scale(&x))
            }
            (Value::Int(x), Value::Series(s)) | (Value::Series(s), Value::Int(x)) => {
                Value::Series(s.scale(&x))
            }
            (Value::Poly(p), Value::Poly(r)) => self.exact(poly_mul(&p, &r, self.w)),
            (a, b) => {
                let (a, b) = (a.into_series(self.w), b.into_series(self.w));
                Value::Series(a.mul_trunc(&b, self.w))
            }
        }
    }

    fn div(&self, a: Value, b: Value) -> Result<Value, EvalError> {
        if let (Value::Int(x), Value::Int(y)) = (&a, &b) {
            if y.is_zero() || !(x % y).is_zero() {
                return Err(SeriesError::NotInvertible.into());
            }
            return Ok(Value::Int(x / y));
        }
        let inv = self.invert(b)?;
        Ok(self.mul(a, inv))
    }

    fn invert(&self, v: Value) -> Result<Value, EvalError> {
        Ok(match v {
            Value::Int(n) if n.abs() == BigInt::one() => Value::Int(n),
            Value::Int(_) => return Err(SeriesError::NotInvertible.into()),
            Value::Poly(p) => match unit_monomial(&p) {
                Some((c, e)) => Value::Poly(QSeries::monomial(c, -e, self.w)),
                None => {
                    // invert() loses twice the valuation
                    let t = self.w + 2 * p.valuation().unwrap_or(0);
                    Value::Series(p.lift_exact(p.order().max(t)).truncate(t).invert()?)
                }
            },
            Value::Series(s) => Value::Series(s.invert()?),
        })
    }

    fn pow(&self, base: Value, k: i64) -> Result<Value, EvalError> {
        if k < 0 {
            let inv = self.invert(base)?;
            return self.pow(inv, -k);
        }
        let k32 = u32::try_from(k).map_err(|_| EvalError::Overflow(k.to_string()))?;
        Ok(match base {
            Value::Int(n) => Value::Int(num_traits::pow(n, k as usize)),
            Value::Poly(p) => match unit_monomial(&p) {
                Some((c, e)) => {
                    let sign = if c < 0 && k % 2 == 1 { -1 } else { 1 };
                    self.exact(QSeries::monomial(sign, e * k, self.w.max(e * k)))
                }
                None => {
                    let mut acc = Value::Int(BigInt::one());
                    for _ in 0..k {
                        acc = self.mul(acc, Value::Poly(p.clone()));
                    }
                    acc
                }
            },
            Value::Series(s) if k == 0 => Value::Series(s.power(0)),
            Value::Series(s) => {
                let mut acc = s.clone();
                for _ in 1..k32 {
                    acc = acc.mul_trunc(&s, self.w);
                }
                Value::Series(acc)
            }
        })
    }

    fn poch(&self, x: Value, n: Option<i64>) -> Result<Value, EvalError> {
        let w = self.w;
        let x_exact = !matches!(x, Value::Series(_));
        let xs = x.into_series(w);
        let mono = if x_exact {
            let mut t = xs.terms().filter(|(_, c)| !c.is_zero());
            match (t.next(), t.next()) {
                (Some((e, c)), None) => c.to_i64().map(|c| QMonomial::new(c, e)),
                _ => None,
            }
        } else {
            None
        };
        match n {
            None => {
                if xs.valuation().is_some_and(|v| v <= 0) || xs.valuation_bound() <= 0 {
                    return Err(EvalError::InvalidPochBase);
                }
                if xs.is_zero() && x_exact {
                    return Ok(Value::Int(BigInt::one()));
                }
                if let Some(m) = mono {
                    return Ok(Value::Series(pochhammer(m, Count::Infinite, w)?));
                }
                let mut acc = QSeries::one(w);
                let v = xs.valuation_bound();
                for i in 0..=(w - v).max(-1) {
                    let f = QSeries::one(w) - xs.shift(i);
                    acc = acc.mul_trunc(&f, w);
                }
                Ok(Value::Series(acc))
            }
            Some(n) if n >= 0 => {
                if xs.is_zero() && x_exact {
                    return Ok(Value::Int(BigInt::one()));
                }
                if let Some(m) = mono {
                    // degree of the exact product
                    let top: i64 = (0..n).map(|i| (m.exp() + i).max(0)).sum();
                    return Ok(self.exact(pochhammer(m, Count::Finite(n as u64), top.max(w))?));
                }
                let mut acc = Value::Int(BigInt::one());
                for i in 0..n {
                    let shifted = if x_exact {
                        Value::Poly(xs.shift(i))
                    } else {
                        Value::Series(xs.shift(i))
                    };
                    let f = self.add(Value::Int(BigInt::one()), shifted.negate());
                    acc = self.mul(acc, f);
                }
                Ok(acc)
            }
            Some(n) => {
                // (x;q)_{-k} = 1 / (x q^{-k}; q)_k
                let k = -n;
                let shifted = if x_exact {
                    Value::Poly(xs.shift(-k))
                } else {
                    Value::Series(xs.shift(-k))
                };
                let p = self.poch(shifted, Some(k))?;
                self.invert(p)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parser::parse_str;
    use super::*;

    fn eval(text: &str, order: i64) -> Result<QSeries, EvalError> {
        evaluate(&parse_str(text).unwrap(), &BTreeMap::new(), order)
    }

    fn eval_with(text: &str, params: &[(&str, i64)], order: i64) -> Result<QSeries, EvalError> {
        let p = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        evaluate(&parse_str(text).unwrap(), &p, order)
    }

    #[test]
    fn finite_pochhammer() {
        assert_eq!(
            eval("poch(q,3)", 10).unwrap(),
            QSeries::from_i64s(0, &[1, -1, -1, 0, 1, 1, -1], 10)
        );
    }

    #[test]
    fn euler_sum_gives_partition_numbers() {
        let s = eval("sum(n,0,inf,q^(n^2)/(poch(q,n)^2))", 10).unwrap();
        assert_eq!(
            s,
            QSeries::from_i64s(0, &[1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42], 10)
        );
    }

    #[test]
    fn parameters() {
        assert_eq!(
            eval_with("q^M", &[("M", 2)], 10).unwrap(),
            QSeries::monomial(1, 2, 10)
        );
        assert_eq!(eval("q^M", 10).unwrap_err(), EvalError::Unbound("M".into()));
    }

    #[test]
    fn cube_of_euler_product() {
        let s = eval("poch(q,inf)^3", 10).unwrap();
        assert_eq!(
            s,
            QSeries::from_i64s(0, &[1, -3, 0, 5, 0, 0, -7, 0, 0, 0, 9], 10)
        );
    }

    #[test]
    fn not_invertible() {
        assert!(matches!(
            eval("1/(2+q)", 10),
            Err(EvalError::Series(SeriesError::NotInvertible))
        ));
        assert!(matches!(
            eval("1/2", 10),
            Err(EvalError::Series(SeriesError::NotInvertible))
        ));
        assert_eq!(eval("6/3", 5).unwrap(), QSeries::monomial(2, 0, 5));
    }

    #[test]
    fn divergence_detected() {
        let e = parse_str("sum(n,0,inf,1)").unwrap();
        let cfg = EvalConfig {
            window: 4,
            budget: 50,
        };
        assert!(matches!(
            evaluate_with(&e, &BTreeMap::new(), 10, cfg),
            Err(EvalError::EvalDivergence { .. })
        ));
    }

    #[test]
    fn bilateral_pentagonal() {
        let theta = eval("bsum(j, (-1)^j*q^(j*(3*j-1)/2))", 30).unwrap();
        assert_eq!(theta, eval("poch(q,inf)", 30).unwrap());
    }

    #[test]
    fn negative_exponents_need_headroom() {
        // (q^-2;q)_3 = (1 - q^-2)(1 - q^-1)(1 - 1) = 0
        assert!(eval("poch(q^(-2),3)", 10).unwrap().is_zero());
        // q^-5 * q^5/(1-q) = 1/(1-q)
        assert_eq!(
            eval("q^(-5)*(q^5/(1-q))", 8).unwrap(),
            eval("1/(1-q)", 8).unwrap()
        );
        // (q;q)_{-1} = 1/(1;q)_1 = 1/0
        assert!(eval("poch(q,-1)", 5).is_err());
        assert_eq!(
            eval("poch(q^2,-1)", 6).unwrap(),
            eval("1/(1-q)", 6).unwrap()
        );
    }

    #[test]
    fn invalid_infinite_base() {
        assert_eq!(
            eval("poch(1,inf)", 5).unwrap_err(),
            EvalError::InvalidPochBase
        );
        assert_eq!(
            eval("poch(q^0,inf)", 5).unwrap_err(),
            EvalError::InvalidPochBase
        );
    }

    #[test]
    fn index_scoping() {
        // inner n shadows the outer one
        let s = eval("sum(n,1,2, sum(n,0,1,q^n))", 5).unwrap();
        assert_eq!(s, QSeries::from_i64s(0, &[2, 2], 5));
        assert!(eval("sum(n,0,1,q) + n", 5).is_err());
    }
}
