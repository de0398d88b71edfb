//! Truncated Laurent series in `q` with arbitrary-precision integer coefficients.
//!
//! A [`QSeries`] is known exactly modulo `q^(order+1)`. Every arithmetic
//! operation propagates that precision, so a result never claims more
//! coefficients than its inputs determine.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error(
        "series is not invertible over the integers (zero, or lowest coefficient is not +1/-1)"
    )]
    NotInvertible,
    #[error("infinite product ({base};q)_inf diverges: base exponent must be at least 1")]
    DivergentProduct { base: QMonomial },
    #[error("coefficient of q^{requested} requested but the series is only known up to q^{order}")]
    OrderExceeded { requested: i64, order: i64 },
}

/// `coeff * q^exp` with a nonzero integer coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QMonomial {
    coeff: i64,
    exp: i64,
}

impl QMonomial {
    /// Panics if `coeff` is zero.
    pub fn new(coeff: i64, exp: i64) -> Self {
        assert!(coeff != 0, "QMonomial coefficient must be nonzero");
        QMonomial { coeff, exp }
    }

    /// `q^exp`.
    pub fn q_pow(exp: i64) -> Self {
        QMonomial { coeff: 1, exp }
    }

    pub fn coeff(&self) -> i64 {
        self.coeff
    }

    pub fn exp(&self) -> i64 {
        self.exp
    }
}

impl fmt::Display for QMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.coeff, self.exp) {
            (c, 0) => write!(f, "{c}"),
            (1, e) => write!(f, "q^{e}"),
            (-1, e) => write!(f, "-q^{e}"),
            (c, e) => write!(f, "{c}*q^{e}"),
        }
    }
}

/// Number of factors in a q-Pochhammer symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Count {
    Finite(u64),
    Infinite,
}

/// A Laurent series `sum c_i q^(min_exp + i)`, exact modulo `q^(order+1)`.
///
/// Stored densely and kept canonical: no leading or trailing zero
/// coefficients, and nothing above `order`. The zero series has no
/// coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QSeries {
    min_exp: i64,
    coeffs: Vec<BigInt>,
    order: i64,
}

impl QSeries {
    pub fn zero(order: i64) -> Self {
        QSeries {
            min_exp: 0.min(order + 1),
            coeffs: Vec::new(),
            order,
        }
    }

    pub fn one(order: i64) -> Self {
        Self::monomial(1, 0, order)
    }

    /// `c * q^e`, truncated at `order`.
    pub fn monomial(c: impl Into<BigInt>, e: i64, order: i64) -> Self {
        Self::from_coeffs(e, vec![c.into()], order)
    }

    /// Builds a series from dense coefficients starting at `min_exp`,
    /// dropping anything above `order` and trimming zeros.
    pub fn from_coeffs(min_exp: i64, coeffs: Vec<BigInt>, order: i64) -> Self {
        let mut s = QSeries {
            min_exp,
            coeffs,
            order,
        };
        s.normalize();
        s
    }

    /// Convenience constructor from machine integers, mostly for tests.
    pub fn from_i64s(min_exp: i64, coeffs: &[i64], order: i64) -> Self {
        Self::from_coeffs(
            min_exp,
            coeffs.iter().map(|&c| BigInt::from(c)).collect(),
            order,
        )
    }

    fn normalize(&mut self) {
        let keep = (self.order + 1 - self.min_exp).max(0) as usize;
        if self.coeffs.len() > keep {
            self.coeffs.truncate(keep);
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == self.coeffs.len() {
            *self = QSeries::zero(self.order);
            return;
        }
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.min_exp += lead as i64;
        }
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn min_exp(&self) -> i64 {
        self.min_exp
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.min_exp)
        }
    }

    /// A lower bound on the true valuation: the valuation if known,
    /// otherwise `order + 1` (every known coefficient is zero).
    pub fn valuation_bound(&self) -> i64 {
        self.valuation().unwrap_or(self.order + 1)
    }

    /// Highest stored exponent, if any.
    pub fn max_exp(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.min_exp + self.coeffs.len() as i64 - 1)
    }

    /// Exact coefficient of `q^n`.
    pub fn coeff(&self, n: i64) -> Result<BigInt, SeriesError> {
        if n > self.order {
            return Err(SeriesError::OrderExceeded {
                requested: n,
                order: self.order,
            });
        }
        Ok(self.coeff_or_zero(n))
    }

    /// Coefficient of `q^n`, zero above the order.
    pub fn coeff_or_zero(&self, n: i64) -> BigInt {
        self.coeff_ref(n).cloned().unwrap_or_default()
    }

    fn coeff_ref(&self, n: i64) -> Option<&BigInt> {
        if n < self.min_exp {
            return None;
        }
        self.coeffs.get((n - self.min_exp) as usize)
    }

    /// Nonzero terms as `(exponent, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.min_exp + i as i64, c))
    }

    /// Forget everything above `order` (no-op if already coarser).
    pub fn truncate(&self, order: i64) -> Self {
        Self::from_coeffs(self.min_exp, self.coeffs.clone(), order.min(self.order))
    }

    /// Multiply by `q^k` exactly; the order moves with the series.
    pub fn shift(&self, k: i64) -> Self {
        QSeries {
            min_exp: self.min_exp + k,
            coeffs: self.coeffs.clone(),
            order: self.order + k,
        }
        .renormalized()
    }

    fn renormalized(mut self) -> Self {
        self.normalize();
        self
    }

    /// Reinterpret an exactly known polynomial at a higher order.
    ///
    /// Only sound when every coefficient above the current order is known to
    /// be zero, e.g. for finite products of binomials.
    pub fn lift_exact(&self, order: i64) -> Self {
        QSeries {
            min_exp: if self.is_zero() {
                0.min(order + 1)
            } else {
                self.min_exp
            },
            coeffs: self.coeffs.clone(),
            order,
        }
        .renormalized()
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::from_coeffs(
            self.min_exp,
            self.coeffs.iter().map(|x| x * c).collect(),
            self.order,
        )
    }

    fn combine(&self, other: &Self, negate_other: bool) -> Self {
        let order = self.order.min(other.order);
        if self.is_zero() && other.is_zero() {
            return QSeries::zero(order);
        }
        let lo = match (self.valuation(), other.valuation()) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => unreachable!(),
        };
        if lo > order {
            return QSeries::zero(order);
        }
        let mut hi = lo - 1;
        for s in [self, other] {
            if let Some(m) = s.max_exp() {
                hi = hi.max(m);
            }
        }
        let hi = hi.min(order);
        let mut out = vec![BigInt::zero(); (hi - lo + 1).max(0) as usize];
        for (e, c) in self.terms() {
            if e <= hi {
                out[(e - lo) as usize] += c;
            }
        }
        for (e, c) in other.terms() {
            if e <= hi {
                if negate_other {
                    out[(e - lo) as usize] -= c;
                } else {
                    out[(e - lo) as usize] += c;
                }
            }
        }
        Self::from_coeffs(lo, out, order)
    }

    /// Product with the valuation-aware order rule
    /// `order = min(T1 + v2, T2 + v1)`.
    pub fn mul_series(&self, other: &Self) -> Self {
        self.mul_capped(other, i64::MAX)
    }

    /// Product truncated to `order`.
    pub fn mul_trunc(&self, other: &Self, order: i64) -> Self {
        self.mul_capped(other, order)
    }

    fn mul_capped(&self, other: &Self, cap: i64) -> Self {
        let v1 = self.valuation_bound();
        let v2 = other.valuation_bound();
        let order = cap
            .min(self.order.saturating_add(v2))
            .min(other.order.saturating_add(v1));
        if self.is_zero() || other.is_zero() {
            return QSeries::zero(order);
        }
        let lo = v1 + v2;
        if lo > order {
            return QSeries::zero(order);
        }
        let len = (order - lo + 1) as usize;
        let mut out = vec![BigInt::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= len {
                break;
            }
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(len - i) {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Self::from_coeffs(lo, out, order)
    }

    /// `self^k`; `power(s, 0)` is 1 at the relative precision of `s`.
    pub fn power(&self, k: u32) -> Self {
        if k == 0 {
            return QSeries::one(self.order - self.valuation_bound());
        }
        let mut result = self.clone();
        for _ in 1..k {
            result = result.mul_series(self);
        }
        result
    }

    /// Multiplicative inverse. Requires the lowest nonzero coefficient to be
    /// `+1` or `-1`; for valuation `v` the result has order `T - 2v`.
    pub fn invert(&self) -> Result<Self, SeriesError> {
        let v = self.valuation().ok_or(SeriesError::NotInvertible)?;
        let lead = &self.coeffs[0];
        if lead.abs() != BigInt::one() {
            return Err(SeriesError::NotInvertible);
        }
        let rel_order = self.order - v;
        let n = (rel_order + 1) as usize;
        let mut inv: Vec<BigInt> = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = if k == 0 {
                BigInt::one()
            } else {
                BigInt::zero()
            };
            for i in 1..=k.min(self.coeffs.len() - 1) {
                let u = &self.coeffs[i];
                if !u.is_zero() {
                    acc -= u * &inv[k - i];
                }
            }
            // lead is +-1, so dividing is multiplying
            if lead.is_negative() {
                acc = -acc;
            }
            inv.push(acc);
        }
        Ok(Self::from_coeffs(-v, inv, rel_order - v))
    }

    /// First exponent `<= order` where the two series differ, with both
    /// coefficients.
    pub fn first_difference(&self, other: &Self, order: i64) -> Option<(i64, BigInt, BigInt)> {
        let lo = self.min_exp.min(other.min_exp);
        (lo..=order).find_map(|e| {
            let a = self.coeff_or_zero(e);
            let b = other.coeff_or_zero(e);
            (a != b).then_some((e, a, b))
        })
    }

    /// Coefficients for exponents `from..=to`, zero-filled.
    pub fn dense_range(&self, from: i64, to: i64) -> Vec<BigInt> {
        (from..=to).map(|e| self.coeff_or_zero(e)).collect()
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let unit = mag.is_one();
            match e {
                0 => write!(f, "{mag}")?,
                1 if unit => write!(f, "q")?,
                1 => write!(f, "{mag}q")?,
                _ if unit => write!(f, "q^{e}")?,
                _ => write!(f, "{mag}q^{e}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.order + 1)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&QSeries> for &QSeries {
            type Output = QSeries;
            fn $method(self, rhs: &QSeries) -> QSeries {
                let f: fn(&QSeries, &QSeries) -> QSeries = $body;
                f(self, rhs)
            }
        }
        impl $tr<QSeries> for QSeries {
            type Output = QSeries;
            fn $method(self, rhs: QSeries) -> QSeries {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&QSeries> for QSeries {
            type Output = QSeries;
            fn $method(self, rhs: &QSeries) -> QSeries {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| a.combine(b, false));
forward_binop!(Sub, sub, |a, b| a.combine(b, true));
forward_binop!(Mul, mul, |a, b| a.mul_series(b));

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries {
            min_exp: self.min_exp,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            order: self.order,
        }
    }
}

impl Neg for QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        -&self
    }
}

// Multiply a dense Laurent polynomial by (1 - c q^k), keeping exponents <= cap.
fn mul_binomial(min_exp: i64, coeffs: &[BigInt], c: i64, k: i64, cap: i64) -> (i64, Vec<BigInt>) {
    if coeffs.is_empty() {
        return (min_exp, Vec::new());
    }
    let lo = min_exp.min(min_exp + k);
    let hi = (min_exp + coeffs.len() as i64 - 1).max(min_exp + coeffs.len() as i64 - 1 + k);
    let hi = hi.min(cap);
    if hi < lo {
        return (lo, Vec::new());
    }
    let mut out = vec![BigInt::zero(); (hi - lo + 1) as usize];
    let c = BigInt::from(c);
    for (i, a) in coeffs.iter().enumerate() {
        let e = min_exp + i as i64;
        if e <= hi {
            out[(e - lo) as usize] += a;
        }
        if e + k <= hi {
            out[(e + k - lo) as usize] -= a * &c;
        }
    }
    (lo, out)
}

/// `(x;q)_n = prod_{i<n} (1 - x q^i)` and `(x;q)_inf`, exact modulo `q^(order+1)`.
pub fn pochhammer(base: QMonomial, count: Count, order: i64) -> Result<QSeries, SeriesError> {
    let (c, e) = (base.coeff, base.exp);
    let n = match count {
        Count::Finite(n) => n as i64,
        Count::Infinite => {
            if e < 1 {
                return Err(SeriesError::DivergentProduct { base });
            }
            // factors with e + i > order are 1 modulo q^(order+1)
            (order - e + 1).max(0)
        }
    };
    // negative exponents can pull high terms back down; keep enough headroom
    let headroom: i64 = (0..n).map(|i| (-(e + i)).max(0)).sum();
    let cap = order + headroom;
    let mut min_exp = 0;
    let mut coeffs = vec![BigInt::one()];
    for i in 0..n {
        let k = e + i;
        if k > cap {
            break;
        }
        if k == 0 {
            // constant factor (1 - c)
            let f = BigInt::from(1 - c);
            if f.is_zero() {
                return Ok(QSeries::zero(order));
            }
            coeffs.iter_mut().for_each(|x| *x *= &f);
            continue;
        }
        let shifted = mul_binomial(min_exp, &coeffs, c, k, cap);
        min_exp = shifted.0;
        coeffs = shifted.1;
    }
    Ok(QSeries::from_coeffs(min_exp, coeffs, order))
}

/// `(q;q)_n` for `n >= 0`.
pub fn qpoch(n: u64, order: i64) -> QSeries {
    pochhammer(QMonomial::q_pow(1), Count::Finite(n), order).expect("finite product")
}

/// `(q;q)_inf`.
pub fn euler_product(order: i64) -> QSeries {
    pochhammer(QMonomial::q_pow(1), Count::Infinite, order).expect("base q converges")
}

/// `1/(q^s;q)_n` for `s >= 1`, with the convention that it vanishes for `n < 0`.
/// Below order 0 there is nothing to compute.
pub fn inv_shifted_qpoch(s: i64, n: i64, order: i64) -> QSeries {
    debug_assert!(s >= 1);
    if n < 0 || order < 0 {
        return QSeries::zero(order);
    }
    pochhammer(QMonomial::q_pow(s), Count::Finite(n as u64), order)
        .and_then(|p| p.invert())
        .expect("(q^s;q)_n has constant term 1")
}

/// `1/(q;q)_n`, zero for `n < 0`.
pub fn inv_qpoch(n: i64, order: i64) -> QSeries {
    inv_shifted_qpoch(1, n, order)
}
