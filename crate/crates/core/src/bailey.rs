//! Bailey pairs, conjugate Bailey pairs and 2-fold pairs.
//!
//! All sequences are lazy: an index function maps `(n, order)` to a series
//! known at least modulo `q^(order+1)`. The kernel is Bailey's choice
//! `u_n = 1/(q)_n`, `v_n = 1/(aq)_n` with `a = q^m`:
//!
//! ```text
//! beta_n  = sum_{j=0}^{n}     alpha_j u_{n-j} v_{n+j}      (Bailey pair)
//! B_n     = sum_{j=-n}^{n}    A_j     u_{n-j} v_{n+j}      (symmetric pair)
//! gamma_n = sum_{j>=|n|}      delta_j u_{j-n} v_{j+n}      (conjugate pair)
//! ```
//!
//! Infinite sums are cut off using valuation lower bounds: a conjugate pair
//! carries a monotone `vlb` with `vlb(j) <= val(delta_j), val(gamma_j)`, and
//! Bailey pairs may carry a floor on the valuation of every `alpha_n`, `beta_n`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use thiserror::Error;

use crate::report::{coefficient_table, Mismatch, VerificationReport};
use crate::series::{
    euler_product, inv_shifted_qpoch, pochhammer, Count, QMonomial, QSeries, SeriesError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaileyError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("truncation failure in {what}: valuation bound did not exceed the order within {budget} terms")]
    TruncationFailure { what: String, budget: i64 },
    #[error("divergent conjugate pair rejected: {0}")]
    DivergenceRejected(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("operation requires a = q^{expected}, got a = q^{found}")]
    KernelMismatch { expected: u32, found: u32 },
    #[error("{0} needs a valuation floor on the pair, but none is known")]
    UnknownValuationFloor(String),
    #[error("negative index {0} is only defined for a = 1")]
    NegativeIndex(i64),
    #[error("could not reach order {0} (precision loss)")]
    InsufficientPrecision(i64),
}

pub type Result<T> = std::result::Result<T, BaileyError>;

/// `(n, order) -> series` for one index.
pub type SeqFn = Arc<dyn Fn(i64, i64) -> Result<QSeries> + Send + Sync>;
/// `(n1, n2, order) -> series` for doubly indexed families.
pub type Seq2Fn = Arc<dyn Fn(i64, i64, i64) -> Result<QSeries> + Send + Sync>;
/// Valuation lower bound as a function of `|j|`.
pub type VlbFn = Arc<dyn Fn(i64) -> i64 + Send + Sync>;

/// Default number of terms an infinite sum may take before giving up.
pub const DEFAULT_TERM_BUDGET: i64 = 10_000;

type PochKey = (i64, i64, i64);

fn poch_cache() -> &'static Mutex<HashMap<PochKey, QSeries>> {
    static CACHE: OnceLock<Mutex<HashMap<PochKey, QSeries>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Memoized `1/(q^s;q)_n` (zero for `n < 0`).
pub fn inv_poch(s: i64, n: i64, order: i64) -> QSeries {
    if n < 0 {
        return QSeries::zero(order);
    }
    let key = (s, n, order);
    if let Some(v) = poch_cache().lock().unwrap().get(&key) {
        return v.clone();
    }
    let v = inv_shifted_qpoch(s, n, order);
    poch_cache().lock().unwrap().insert(key, v.clone());
    v
}

/// Memoized `1/(q;q)_inf`.
pub fn inv_euler(order: i64) -> QSeries {
    let key = (1, -1, order);
    if let Some(v) = poch_cache().lock().unwrap().get(&key) {
        return v.clone();
    }
    let v = euler_product(order).invert().expect("constant term 1");
    poch_cache().lock().unwrap().insert(key, v.clone());
    v
}

/// Evaluate `f` at increasing working orders until the result is known to `order`.
pub fn at_order(order: i64, f: impl Fn(i64) -> Result<QSeries>) -> Result<QSeries> {
    let mut work = order;
    for _ in 0..16 {
        let s = f(work)?;
        if s.order() >= order {
            return Ok(s.truncate(order));
        }
        work += order - s.order();
    }
    Err(BaileyError::InsufficientPrecision(order))
}

/// Product of the given factors, truncated to `order` (may be lower if precision was lost).
pub fn product(factors: &[QSeries], order: i64) -> QSeries {
    let mut it = factors.iter();
    let first = match it.next() {
        Some(f) => f.truncate(order),
        None => return QSeries::one(order),
    };
    it.fold(first, |acc, f| acc.mul_trunc(f, order))
}

/// Sum `term(j)` for `j = start, start + step, ...`.
///
/// Indices whose `bound` exceeds `order` contribute nothing and are skipped;
/// the walk stops at the first such index for which `settled(j)` holds,
/// i.e. from which on `bound` is known to be nondecreasing.
#[allow(clippy::too_many_arguments)]
pub(crate) fn truncated_sum(
    order: i64,
    start: i64,
    step: i64,
    budget: i64,
    what: &str,
    bound: impl Fn(i64) -> i64,
    settled: impl Fn(i64) -> bool,
    mut term: impl FnMut(i64) -> Result<QSeries>,
) -> Result<QSeries> {
    let mut acc = QSeries::zero(order);
    let mut j = start;
    loop {
        if (j - start).abs() > budget {
            return Err(BaileyError::TruncationFailure {
                what: what.to_string(),
                budget,
            });
        }
        let b = bound(j);
        if b > order {
            if settled(j) {
                return Ok(acc);
            }
        } else {
            acc = &acc + &term(j)?;
        }
        j += step;
    }
}

/// The Bailey kernel for `a = q^m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BaileyKernel {
    m: u32,
}

impl BaileyKernel {
    pub fn new(m: u32) -> Self {
        BaileyKernel { m }
    }

    /// `a = 1`.
    pub fn unit() -> Self {
        BaileyKernel { m: 0 }
    }

    /// Exponent `m` of `a = q^m`.
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn a(&self) -> QMonomial {
        QMonomial::q_pow(self.m as i64)
    }

    /// `u_n = 1/(q)_n`.
    pub fn u(&self, n: i64, order: i64) -> QSeries {
        inv_poch(1, n, order)
    }

    /// `v_n = 1/(aq)_n`.
    pub fn v(&self, n: i64, order: i64) -> QSeries {
        inv_poch(self.m as i64 + 1, n, order)
    }

    fn require(&self, m: u32) -> Result<()> {
        if self.m == m {
            Ok(())
        } else {
            Err(BaileyError::KernelMismatch {
                expected: m,
                found: self.m,
            })
        }
    }
}

impl fmt::Display for BaileyKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a=q^{}", self.m)
    }
}

/// A Bailey pair `(alpha_n, beta_n)`, or a symmetric bilateral pair
/// `(A_n, B_n)` when `symmetric` is set.
#[derive(Clone)]
pub struct BaileyPair {
    name: String,
    kernel: BaileyKernel,
    alpha: SeqFn,
    beta: SeqFn,
    symmetric: bool,
    val_floor: Option<i64>,
}

impl fmt::Debug for BaileyPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BaileyPair")
            .field("name", &self.name)
            .field("kernel", &self.kernel)
            .field("symmetric", &self.symmetric)
            .field("val_floor", &self.val_floor)
            .finish()
    }
}

impl BaileyPair {
    /// A pair with valuation floor 0 (every `alpha_n`, `beta_n` is a power series).
    pub fn new(
        name: impl Into<String>,
        kernel: BaileyKernel,
        symmetric: bool,
        alpha: impl Fn(i64, i64) -> Result<QSeries> + Send + Sync + 'static,
        beta: impl Fn(i64, i64) -> Result<QSeries> + Send + Sync + 'static,
    ) -> Self {
        BaileyPair {
            name: name.into(),
            kernel,
            alpha: Arc::new(alpha),
            beta: Arc::new(beta),
            symmetric,
            val_floor: Some(0),
        }
    }

    /// Set (or clear) the valuation floor used to truncate infinite sums.
    pub fn with_val_floor(mut self, floor: Option<i64>) -> Self {
        self.val_floor = floor;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// The unit pair: `alpha = (1, 0, 0, ...)`, `beta_n = u_n v_n`.
    pub fn unit(kernel: BaileyKernel) -> Self {
        BaileyPair::new(
            "unit",
            kernel,
            false,
            |n, order| {
                Ok(if n == 0 {
                    QSeries::one(order)
                } else {
                    QSeries::zero(order)
                })
            },
            move |n, order| Ok(kernel.u(n, order).mul_trunc(&kernel.v(n, order), order)),
        )
    }

    pub fn zero(kernel: BaileyKernel, symmetric: bool) -> Self {
        BaileyPair::new(
            "zero",
            kernel,
            symmetric,
            |_, order| Ok(QSeries::zero(order)),
            |_, order| Ok(QSeries::zero(order)),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kernel(&self) -> BaileyKernel {
        self.kernel
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn val_floor(&self) -> Option<i64> {
        self.val_floor
    }

    /// `alpha_n` (or `A_n`); zero for negative `n` on a one-sided pair.
    pub fn alpha(&self, n: i64, order: i64) -> Result<QSeries> {
        if n < 0 && !self.symmetric {
            return Ok(QSeries::zero(order));
        }
        Ok((self.alpha)(n, order)?.truncate(order))
    }

    /// `beta_n` (or `B_n`); zero for negative `n`.
    pub fn beta(&self, n: i64, order: i64) -> Result<QSeries> {
        if n < 0 {
            return Ok(QSeries::zero(order));
        }
        Ok((self.beta)(n, order)?.truncate(order))
    }

    /// The same pair with `beta_index` changed by `delta`. Useful to check
    /// that verifiers catch corrupted data.
    pub fn perturbed_beta(&self, index: i64, delta: QMonomial) -> Self {
        let beta = self.beta.clone();
        let mut p = self.clone();
        p.name = format!("{}+perturbed", self.name);
        p.beta = Arc::new(move |n, order| {
            let b = beta(n, order)?;
            if n == index {
                Ok(&b + &QSeries::monomial(delta.coeff(), delta.exp(), order))
            } else {
                Ok(b)
            }
        });
        p
    }
}

/// A conjugate Bailey pair `(gamma_n, delta_n)`.
#[derive(Clone)]
pub struct ConjugatePair {
    name: String,
    kernel: BaileyKernel,
    gamma: SeqFn,
    delta: SeqFn,
    vlb: VlbFn,
    budget: i64,
}

impl fmt::Debug for ConjugatePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConjugatePair")
            .field("name", &self.name)
            .field("kernel", &self.kernel)
            .field("budget", &self.budget)
            .finish()
    }
}

impl ConjugatePair {
    /// `gamma` is only consulted for `n >= 0`; at `a = 1` negative indices
    /// use `gamma(-n) = gamma(n)`. `vlb` must be nondecreasing, unbounded and
    /// below the valuations of both `delta_j` and `gamma_j`.
    pub fn new(
        name: impl Into<String>,
        kernel: BaileyKernel,
        gamma: impl Fn(i64, i64) -> Result<QSeries> + Send + Sync + 'static,
        delta: impl Fn(i64, i64) -> Result<QSeries> + Send + Sync + 'static,
        vlb: impl Fn(i64) -> i64 + Send + Sync + 'static,
    ) -> Self {
        ConjugatePair {
            name: name.into(),
            kernel,
            gamma: Arc::new(gamma),
            delta: Arc::new(delta),
            vlb: Arc::new(vlb),
            budget: DEFAULT_TERM_BUDGET,
        }
    }

    /// Limit on the number of terms any vlb-truncated sum may take.
    pub fn with_budget(mut self, budget: i64) -> Self {
        self.budget = budget;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kernel(&self) -> BaileyKernel {
        self.kernel
    }

    pub fn budget(&self) -> i64 {
        self.budget
    }

    pub fn vlb(&self, j: i64) -> i64 {
        (self.vlb)(j.abs())
    }

    pub fn gamma(&self, n: i64, order: i64) -> Result<QSeries> {
        if n < 0 {
            if self.kernel.m != 0 {
                return Err(BaileyError::NegativeIndex(n));
            }
            return self.gamma(-n, order);
        }
        Ok((self.gamma)(n, order)?.truncate(order))
    }

    pub fn delta(&self, n: i64, order: i64) -> Result<QSeries> {
        if n < 0 {
            return Ok(QSeries::zero(order));
        }
        Ok((self.delta)(n, order)?.truncate(order))
    }
}

/// A 2-fold Bailey pair `(A_{n1,n2}, B_{n1,n2})`.
#[derive(Clone)]
pub struct TwoFoldPair {
    name: String,
    kernels: (BaileyKernel, BaileyKernel),
    a: Seq2Fn,
    b: Seq2Fn,
    bilateral: (bool, bool),
    val_floor: Option<i64>,
}

impl fmt::Debug for TwoFoldPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TwoFoldPair")
            .field("name", &self.name)
            .field("kernels", &self.kernels)
            .field("bilateral", &self.bilateral)
            .field("val_floor", &self.val_floor)
            .finish()
    }
}

impl TwoFoldPair {
    /// `bilateral.i` says whether `A` is supported on negative values of index `i`.
    pub fn new(
        name: impl Into<String>,
        kernels: (BaileyKernel, BaileyKernel),
        bilateral: (bool, bool),
        val_floor: Option<i64>,
        a: impl Fn(i64, i64, i64) -> Result<QSeries> + Send + Sync + 'static,
        b: impl Fn(i64, i64, i64) -> Result<QSeries> + Send + Sync + 'static,
    ) -> Self {
        TwoFoldPair {
            name: name.into(),
            kernels,
            a: Arc::new(a),
            b: Arc::new(b),
            bilateral,
            val_floor,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kernels(&self) -> (BaileyKernel, BaileyKernel) {
        self.kernels
    }

    pub fn bilateral(&self) -> (bool, bool) {
        self.bilateral
    }

    pub fn a(&self, n1: i64, n2: i64, order: i64) -> Result<QSeries> {
        if (n1 < 0 && !self.bilateral.0) || (n2 < 0 && !self.bilateral.1) {
            return Ok(QSeries::zero(order));
        }
        Ok((self.a)(n1, n2, order)?.truncate(order))
    }

    pub fn b(&self, n1: i64, n2: i64, order: i64) -> Result<QSeries> {
        if n1 < 0 || n2 < 0 {
            return Ok(QSeries::zero(order));
        }
        Ok((self.b)(n1, n2, order)?.truncate(order))
    }

    pub fn perturbed_b(&self, n1: i64, n2: i64, delta: QMonomial) -> Self {
        let b = self.b.clone();
        let mut p = self.clone();
        p.name = format!("{}+perturbed", self.name);
        p.b = Arc::new(move |i, j, order| {
            let v = b(i, j, order)?;
            if (i, j) == (n1, n2) {
                Ok(&v + &QSeries::monomial(delta.coeff(), delta.exp(), order))
            } else {
                Ok(v)
            }
        });
        p
    }

    fn floor(&self, what: &str) -> Result<i64> {
        self.val_floor
            .ok_or_else(|| BaileyError::UnknownValuationFloor(what.to_string()))
    }
}

fn compare_into(
    report: &mut VerificationReport,
    index: Option<i64>,
    lhs: &QSeries,
    rhs: &QSeries,
    order: i64,
) -> Result<bool> {
    for s in [lhs, rhs] {
        if s.order() < order {
            return Err(BaileyError::InsufficientPrecision(order));
        }
    }
    match lhs.first_difference(rhs, order) {
        None => Ok(true),
        Some((exponent, l, r)) => {
            report.record_mismatch(Mismatch {
                index,
                exponent,
                lhs: l,
                rhs: r,
            });
            Ok(false)
        }
    }
}

fn table_from(lhs: &QSeries, rhs: &QSeries, order: i64) -> Vec<crate::report::CoefficientRow> {
    let lo = lhs.min_exp().min(rhs.min_exp()).min(0);
    coefficient_table(lhs, rhs, lo, order)
}

fn pair_relation_rhs(p: &BaileyPair, n: i64, lo: i64, order: i64) -> Result<QSeries> {
    let k = p.kernel;
    at_order(order, |work| {
        let mut acc = QSeries::zero(work);
        for j in lo..=n {
            let a = p.alpha(j, work)?;
            if a.is_zero() {
                continue;
            }
            acc = &acc + &product(&[a, k.u(n - j, work), k.v(n + j, work)], work);
        }
        Ok(acc)
    })
}

fn check_pair_relation(
    p: &BaileyPair,
    n_max: i64,
    order: i64,
    bilateral: bool,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new(p.name.clone(), order);
    let mut shown = None;
    for n in 0..=n_max {
        let lhs = at_order(order, |w| p.beta(n, w))?;
        let rhs = pair_relation_rhs(p, n, if bilateral { -n } else { 0 }, order)?;
        let ok = compare_into(&mut report, Some(n), &lhs, &rhs, order)?;
        if !ok || n == n_max {
            shown = Some((lhs, rhs));
        }
        if !ok {
            break;
        }
    }
    if let Some((l, r)) = shown {
        report.table = table_from(&l, &r, order);
    }
    Ok(report)
}

/// Check `beta_n = sum_{j=0}^{n} alpha_j u_{n-j} v_{n+j}` for `n <= n_max`.
pub fn verify_pair(p: &BaileyPair, n_max: i64, order: i64) -> Result<VerificationReport> {
    if p.symmetric {
        return Err(BaileyError::InvalidParameter(format!(
            "{} is symmetric; use verify_symmetric_pair",
            p.name
        )));
    }
    check_pair_relation(p, n_max, order, false)
}

/// Check `B_n = sum_{j=-n}^{n} A_j u_{n-j} v_{n+j}` for `n <= n_max`.
pub fn verify_symmetric_pair(p: &BaileyPair, n_max: i64, order: i64) -> Result<VerificationReport> {
    if !p.symmetric {
        return Err(BaileyError::InvalidParameter(format!(
            "{} is one-sided; use verify_pair",
            p.name
        )));
    }
    check_pair_relation(p, n_max, order, true)
}

/// `sum_{j>=|n|} delta_j u_{j-n} v_{j+n}`, cut off once `vlb(j) > order`.
pub fn conjugate_sum(cp: &ConjugatePair, n: i64, order: i64) -> Result<QSeries> {
    let k = cp.kernel;
    at_order(order, |work| {
        truncated_sum(
            work,
            n.abs(),
            1,
            cp.budget,
            &format!("conjugate sum of {} at n={n}", cp.name),
            |j| cp.vlb(j),
            |_| true,
            |j| {
                Ok(product(
                    &[cp.delta(j, work)?, k.u(j - n, work), k.v(j + n, work)],
                    work,
                ))
            },
        )
    })
}

/// Check `gamma_n = sum_{j>=|n|} delta_j u_{j-n} v_{j+n}` for `|n| <= n_max`
/// (only `n >= 0` when `a != 1`).
pub fn verify_conjugate_pair(
    cp: &ConjugatePair,
    n_max: i64,
    order: i64,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new(cp.name.clone(), order);
    let lo = if cp.kernel.m == 0 { -n_max } else { 0 };
    let mut shown = None;
    for n in lo..=n_max {
        let lhs = at_order(order, |w| cp.gamma(n, w))?;
        let rhs = conjugate_sum(cp, n, order)?;
        let ok = compare_into(&mut report, Some(n), &lhs, &rhs, order)?;
        if !ok || n == n_max {
            shown = Some((lhs, rhs));
        }
        if !ok {
            break;
        }
    }
    if let Some((l, r)) = shown {
        report.table = table_from(&l, &r, order);
    }
    Ok(report)
}

/// Parameter of Bailey's conjugate pair: a monomial `+-q^e` or the limit to infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rho {
    Finite(QMonomial),
    Infinite,
}

impl fmt::Display for Rho {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rho::Finite(m) => write!(f, "{m}"),
            Rho::Infinite => write!(f, "inf"),
        }
    }
}

// (c q^e; q)_inf for any integer e, splitting off the finite prefix of
// factors with nonpositive exponent.
fn inf_poch_any(c: i64, e: i64, order: i64) -> Result<QSeries> {
    let k = (1 - e).max(0);
    let tail = pochhammer(QMonomial::new(c, e + k), Count::Infinite, order)?;
    if k == 0 {
        return Ok(tail);
    }
    let headroom = (0..k).map(|i| (-(e + i)).max(0)).sum::<i64>();
    let prefix = pochhammer(
        QMonomial::new(c, e),
        Count::Finite(k as u64),
        order + headroom,
    )?;
    Ok(prefix.mul_trunc(&tail.lift_exact(order + headroom), order))
}

/// Bailey's conjugate pair
///
/// ```text
/// delta_n = (rho1)_n (rho2)_n (aq/rho1 rho2)^n
/// gamma_n = (aq/rho1)_inf (aq/rho2)_inf / ((aq)_inf (aq/rho1 rho2)_inf)
///           * delta_n / ((aq/rho1)_n (aq/rho2)_n)
/// ```
///
/// with each infinite `rho` replaced by its limit, which turns
/// `(rho)_n rho^{-n}` into `(-1)^n q^{n(n-1)/2}`. Finite `rho` must be
/// `+-q^e` with `e >= 0`.
pub fn bailey_conjugate(rho1: Rho, rho2: Rho, kernel: BaileyKernel) -> Result<ConjugatePair> {
    let m = kernel.m as i64;
    let mut finite = Vec::new();
    let mut infinite = 0i64;
    for r in [rho1, rho2] {
        match r {
            Rho::Finite(x) => {
                if x.coeff().abs() != 1 || x.exp() < 0 {
                    return Err(BaileyError::InvalidParameter(format!(
                        "rho = {x}: finite rho must be +-q^e with e >= 0"
                    )));
                }
                finite.push(x);
            }
            Rho::Infinite => infinite += 1,
        }
    }
    // delta_n = sign * q^(lin n + infinite n(n-1)/2) * prod (rho_i)_n
    let lin = m + 1 - finite.iter().map(|x| x.exp()).sum::<i64>();
    if lin < 0 || (lin == 0 && infinite == 0) {
        return Err(BaileyError::DivergenceRejected(format!(
            "aq/(rho1 rho2) has q-exponent {} with rho1 = {rho1}, rho2 = {rho2}, {kernel}",
            lin
        )));
    }
    let vlb = move |j: i64| lin * j + infinite * j * (j - 1) / 2;
    let fin = finite.clone();
    let delta = move |n: i64, order: i64| -> Result<QSeries> {
        let shift = vlb(n);
        let sign_neg = fin.iter().filter(|x| x.coeff() < 0).count() as i64 * n + infinite * n;
        let mut poly = QSeries::one(order - shift);
        for x in &fin {
            let p = pochhammer(*x, Count::Finite(n as u64), order - shift)?;
            poly = poly.mul_trunc(&p, order - shift);
        }
        let d = poly.shift(shift);
        Ok(if sign_neg % 2 != 0 { -d } else { d })
    };
    let delta = Arc::new(delta);
    let d2 = delta.clone();
    let fin = finite.clone();
    let gamma = move |n: i64, order: i64| -> Result<QSeries> {
        let mut factors = vec![d2(n, order)?];
        for x in &fin {
            // (aq^(n+1)/rho; q)_inf, and 1/rho = rho for rho = +-q^e
            factors.push(inf_poch_any(x.coeff(), m + n + 1 - x.exp(), order)?);
        }
        factors.push(pochhammer(QMonomial::q_pow(m + 1), Count::Infinite, order)?.invert()?);
        if fin.len() == 2 {
            let c = fin[0].coeff() * fin[1].coeff();
            factors.push(pochhammer(QMonomial::new(c, lin), Count::Infinite, order)?.invert()?);
        }
        Ok(product(&factors, order))
    };
    Ok(ConjugatePair::new(
        format!("bailey_conjugate(rho1={rho1}, rho2={rho2}, {kernel})"),
        kernel,
        gamma,
        move |n, order| delta(n, order),
        vlb,
    ))
}

/// Turn a conjugate pair at `a = 1` into a Bailey pair at `a = q`:
///
/// ```text
/// alpha_N = (1-q)^{-1} (-1)^N (1 - q^{2N+1}) q^{N(N-1)/2}
///           * sum_{j in Z} gamma_j (-1)^j q^{j(j+1)/2 + jN}
/// beta_N  = delta_N q^{-N} / (q)_{2N}
/// ```
pub fn prop1_transform(cp: &ConjugatePair) -> Result<BaileyPair> {
    cp.kernel.require(0)?;
    let cpa = cp.clone();
    let alpha = move |n: i64, order: i64| -> Result<QSeries> {
        if n < 0 {
            return Ok(QSeries::zero(order));
        }
        let base = n * (n - 1) / 2;
        let expo = move |j: i64| j * (j + 1) / 2 + j * n + base;
        let cp = &cpa;
        at_order(order, |work| {
            let term = |j: i64| -> Result<QSeries> {
                let e = expo(j);
                let g = at_order(work - e, |w| cp.gamma(j, w))?.shift(e);
                Ok(if j.rem_euclid(2) == 1 { -g } else { g })
            };
            let bound = |j: i64| cp.vlb(j) + expo(j);
            let what = format!("theta sum of {}", cp.name);
            let up = truncated_sum(work, 0, 1, cp.budget, &what, bound, |_| true, term)?;
            // j(j+1)/2 + jN is increasing in |j| once j <= -(N+1)
            let down = truncated_sum(
                work,
                -1,
                -1,
                cp.budget,
                &what,
                bound,
                |j| j <= -(n + 1),
                term,
            )?;
            let one_minus = QSeries::from_i64s(0, &[1, -1], work).invert()?;
            let mut f = QSeries::one(work) - QSeries::monomial(1, 2 * n + 1, work);
            if n % 2 != 0 {
                f = -f;
            }
            Ok(product(&[one_minus, f, &up + &down], work))
        })
    };
    let cpb = cp.clone();
    let beta = move |n: i64, order: i64| -> Result<QSeries> {
        at_order(order, |work| {
            let d = cpb.delta(n, work + n)?.shift(-n);
            Ok(d.mul_series(&inv_poch(1, 2 * n, work)))
        })
    };
    Ok(BaileyPair::new(
        format!("theta-transform({})", cp.name),
        BaileyKernel::new(1),
        false,
        alpha,
        beta,
    )
    .with_val_floor(None))
}

/// The 2-fold pair `A = alpha1 x alpha2`, `B = beta1 x beta2`.
pub fn product_two_fold(p1: &BaileyPair, p2: &BaileyPair) -> Result<TwoFoldPair> {
    p1.kernel.require(0)?;
    p2.kernel.require(0)?;
    let floor = match (p1.val_floor, p2.val_floor) {
        (Some(a), Some(b)) => Some(a + b),
        _ => None,
    };
    let (a1, a2) = (p1.clone(), p2.clone());
    let (b1, b2) = (p1.clone(), p2.clone());
    Ok(TwoFoldPair::new(
        format!("{} x {}", p1.name, p2.name),
        (p1.kernel, p2.kernel),
        (p1.symmetric, p2.symmetric),
        floor,
        move |i, j, order| at_order(order, |w| Ok(a1.alpha(i, w)?.mul_series(&a2.alpha(j, w)?))),
        move |i, j, order| at_order(order, |w| Ok(b1.beta(i, w)?.mul_series(&b2.beta(j, w)?))),
    ))
}

fn index_walk(bilateral: bool) -> Vec<(i64, i64)> {
    if bilateral {
        vec![(0, 1), (-1, -1)]
    } else {
        vec![(0, 1)]
    }
}

/// Check the 2-fold Bailey lemma
/// `sum_{n1,n2} A_{n1,n2} gamma_{n1} gamma'_{n2} = sum_{n1,n2>=0} B_{n1,n2} delta_{n1} delta'_{n2}`.
pub fn verify_two_fold_lemma(
    tf: &TwoFoldPair,
    cp1: &ConjugatePair,
    cp2: &ConjugatePair,
    order: i64,
) -> Result<VerificationReport> {
    cp1.kernel.require(0)?;
    cp2.kernel.require(0)?;
    tf.kernels.0.require(0)?;
    tf.kernels.1.require(0)?;
    let floor = tf.floor("verify_two_fold_lemma")?;
    let budget = cp1.budget.min(cp2.budget);
    let what = format!("2-fold lemma for {}", tf.name);

    let side = |use_a: bool| -> Result<QSeries> {
        at_order(order, |work| {
            let walks1 = if use_a {
                index_walk(tf.bilateral.0)
            } else {
                index_walk(false)
            };
            let walks2 = if use_a {
                index_walk(tf.bilateral.1)
            } else {
                index_walk(false)
            };
            let mut total = QSeries::zero(work);
            for &(s1, st1) in &walks1 {
                let outer = truncated_sum(
                    work,
                    s1,
                    st1,
                    budget,
                    &what,
                    |i| floor + cp1.vlb(i) + cp2.vlb(0),
                    |_| true,
                    |i| {
                        let mut inner_total = QSeries::zero(work);
                        for &(s2, st2) in &walks2 {
                            let inner = truncated_sum(
                                work,
                                s2,
                                st2,
                                budget,
                                &what,
                                |j| floor + cp1.vlb(i) + cp2.vlb(j),
                                |_| true,
                                |j| {
                                    let f = if use_a {
                                        [
                                            tf.a(i, j, work)?,
                                            cp1.gamma(i, work)?,
                                            cp2.gamma(j, work)?,
                                        ]
                                    } else {
                                        [
                                            tf.b(i, j, work)?,
                                            cp1.delta(i, work)?,
                                            cp2.delta(j, work)?,
                                        ]
                                    };
                                    Ok(product(&f, work))
                                },
                            )?;
                            inner_total = &inner_total + &inner;
                        }
                        Ok(inner_total)
                    },
                )?;
                total = &total + &outer;
            }
            Ok(total)
        })
    };
    let lhs = side(true)?;
    let rhs = side(false)?;
    let mut report = VerificationReport::new(tf.name.clone(), order);
    compare_into(&mut report, None, &lhs, &rhs, order)?;
    report.table = table_from(&lhs, &rhs, order);
    Ok(report)
}

/// Contract the first index of a 2-fold pair against a conjugate pair:
/// `A_n = sum_{n1} gamma_{n1} A_{n1,n}`, `B_n = sum_{n1>=0} delta_{n1} B_{n1,n}`.
pub fn lemma2_contract(tf: &TwoFoldPair, cp: &ConjugatePair) -> Result<BaileyPair> {
    cp.kernel.require(tf.kernels.0.m)?;
    cp.kernel.require(0)?;
    let floor = tf.floor("lemma2_contract")?;
    let (tfa, cpa) = (tf.clone(), cp.clone());
    let alpha = move |n: i64, order: i64| -> Result<QSeries> {
        at_order(order, |work| {
            let what = format!("contraction of {}", tfa.name);
            let mut acc = QSeries::zero(work);
            for (s, st) in index_walk(tfa.bilateral.0) {
                acc = &acc
                    + &truncated_sum(
                        work,
                        s,
                        st,
                        cpa.budget,
                        &what,
                        |i| floor + cpa.vlb(i),
                        |_| true,
                        |i| Ok(product(&[cpa.gamma(i, work)?, tfa.a(i, n, work)?], work)),
                    )?;
            }
            Ok(acc)
        })
    };
    let (tfb, cpb) = (tf.clone(), cp.clone());
    let beta = move |n: i64, order: i64| -> Result<QSeries> {
        at_order(order, |work| {
            truncated_sum(
                work,
                0,
                1,
                cpb.budget,
                &format!("contraction of {}", tfb.name),
                |i| floor + cpb.vlb(i),
                |_| true,
                |i| Ok(product(&[cpb.delta(i, work)?, tfb.b(i, n, work)?], work)),
            )
        })
    };
    Ok(BaileyPair::new(
        format!("contract({}; {})", tf.name, cp.name),
        tf.kernels.1,
        tf.bilateral.1,
        alpha,
        beta,
    )
    .with_val_floor(Some(floor + cp.vlb(0))))
}

/// One step along the Bailey chain with both parameters sent to infinity:
/// `alpha'_n = a^n q^{n^2} alpha_n`,
/// `beta'_n = sum_{j=0}^{n} a^j q^{j^2} beta_j / (q)_{n-j}`.
pub fn chain_step(p: &BaileyPair) -> BaileyPair {
    let m = p.kernel.m as i64;
    let pa = p.clone();
    let alpha = move |n: i64, order: i64| -> Result<QSeries> {
        let e = n * n + m * n;
        Ok(at_order(order - e, |w| pa.alpha(n, w))?.shift(e))
    };
    let pb = p.clone();
    let beta = move |n: i64, order: i64| -> Result<QSeries> {
        at_order(order, |work| {
            let mut acc = QSeries::zero(work);
            for j in 0..=n {
                let e = j * j + m * j;
                let b = at_order(work - e, |w| pb.beta(j, w))?.shift(e);
                acc = &acc + &b.mul_series(&inv_poch(1, n - j, work));
            }
            Ok(acc)
        })
    };
    // n^2 + mn >= -m^2/4 on negative indices of symmetric pairs
    let floor = p.val_floor.map(|f| {
        if p.symmetric && m > 0 {
            f - m * m / 4 - 1
        } else {
            f
        }
    });
    BaileyPair::new(
        format!("chain({})", p.name),
        p.kernel,
        p.symmetric,
        alpha,
        beta,
    )
    .with_val_floor(floor)
}

/// The terminal Bailey lemma at `a = 1` with both parameters at infinity:
/// returns `(sum_n q^{n^2} beta_n, (1/(q)_inf) sum_n q^{n^2} alpha_n)`.
pub fn limit_identity(p: &BaileyPair, order: i64) -> Result<(QSeries, QSeries)> {
    p.kernel.require(0)?;
    let floor = p
        .val_floor
        .ok_or_else(|| BaileyError::UnknownValuationFloor("limit_identity".into()))?;
    let budget = DEFAULT_TERM_BUDGET;
    let what = format!("limit identity of {}", p.name);
    let weighted = |use_alpha: bool, j: i64, work: i64| -> Result<QSeries> {
        let e = j * j;
        let s = if use_alpha {
            at_order(work - e, |w| p.alpha(j, w))?
        } else {
            at_order(work - e, |w| p.beta(j, w))?
        };
        Ok(s.shift(e))
    };
    let lhs = at_order(order, |work| {
        truncated_sum(
            work,
            0,
            1,
            budget,
            &what,
            |j| j * j + floor,
            |_| true,
            |j| weighted(false, j, work),
        )
    })?;
    let rhs = at_order(order, |work| {
        let mut acc = truncated_sum(
            work,
            0,
            1,
            budget,
            &what,
            |j| j * j + floor,
            |_| true,
            |j| weighted(true, j, work),
        )?;
        if p.symmetric {
            acc = &acc
                + &truncated_sum(
                    work,
                    -1,
                    -1,
                    budget,
                    &what,
                    |j| j * j + floor,
                    |_| true,
                    |j| weighted(true, j, work),
                )?;
        }
        Ok(acc.mul_series(&inv_euler(work)))
    })?;
    Ok((lhs, rhs))
}

/// Bilateral sum `sum_{j in Z} sign(j) q^{e(j)}` for an exponent function
/// that is a convex quadratic in `j` with vertex near `vertex`, truncated at
/// `order`. Returned coefficients are exact.
pub fn quadratic_theta(
    order: i64,
    vertex: i64,
    exponent: impl Fn(i64) -> i64,
    sign: impl Fn(i64) -> i64,
) -> QSeries {
    let mut coeffs: HashMap<i64, i64> = HashMap::new();
    let mut add = |j: i64| {
        let e = exponent(j);
        if e <= order {
            *coeffs.entry(e).or_insert(0) += sign(j);
            true
        } else {
            false
        }
    };
    // exponent is monotone on each side of [vertex-1, vertex+1]
    let mut j = vertex - 1;
    while add(j) || j <= vertex + 1 {
        j += 1;
    }
    let mut j = vertex - 2;
    while add(j) {
        j -= 1;
    }
    let mut out = QSeries::zero(order);
    for (e, c) in coeffs {
        out = &out + &QSeries::monomial(BigInt::from(c), e, order);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rho_inf() -> ConjugatePair {
        bailey_conjugate(Rho::Infinite, Rho::Infinite, BaileyKernel::unit()).unwrap()
    }

    #[test]
    fn unit_pair_verifies() {
        for m in 0..3 {
            let p = BaileyPair::unit(BaileyKernel::new(m));
            assert!(verify_pair(&p, 5, 20).unwrap().passed());
        }
    }

    #[test]
    fn zero_pair_verifies_symmetric() {
        let p = BaileyPair::zero(BaileyKernel::unit(), true);
        assert!(verify_symmetric_pair(&p, 4, 20).unwrap().passed());
    }

    #[test]
    fn rho_infinite_limit_matches_closed_form() {
        let cp = rho_inf();
        for n in 0..5 {
            let d = cp.delta(n, 30).unwrap();
            assert_eq!(d, QSeries::monomial(1, n * n, 30));
            let g = cp.gamma(n, 30).unwrap();
            assert_eq!(
                g,
                QSeries::monomial(1, n * n, 30).mul_trunc(&inv_euler(30), 30)
            );
        }
        assert_eq!(cp.vlb(3), 9);
    }

    #[test]
    fn divergence_is_rejected() {
        let q = Rho::Finite(QMonomial::q_pow(1));
        let err = bailey_conjugate(q, q, BaileyKernel::unit()).unwrap_err();
        assert!(matches!(err, BaileyError::DivergenceRejected(_)));
    }

    #[test]
    fn finite_rho_conjugate_verifies() {
        let cp = bailey_conjugate(
            Rho::Finite(QMonomial::new(-1, 1)),
            Rho::Infinite,
            BaileyKernel::unit(),
        )
        .unwrap();
        assert!(verify_conjugate_pair(&cp, 4, 25).unwrap().passed());
        let cp = bailey_conjugate(
            Rho::Finite(QMonomial::new(-1, 0)),
            Rho::Finite(QMonomial::new(-1, 0)),
            BaileyKernel::new(1),
        )
        .unwrap();
        assert!(verify_conjugate_pair(&cp, 3, 20).unwrap().passed());
    }

    #[test]
    fn truncation_failure_on_tiny_budget() {
        let cp = rho_inf().with_budget(2);
        let err = verify_conjugate_pair(&cp, 0, 40).unwrap_err();
        assert!(matches!(err, BaileyError::TruncationFailure { .. }));
    }

    #[test]
    fn perturbation_is_caught() {
        let p = BaileyPair::unit(BaileyKernel::unit()).perturbed_beta(2, QMonomial::q_pow(5));
        let r = verify_pair(&p, 4, 20).unwrap();
        let m = r.first_mismatch.unwrap();
        assert_eq!((m.index, m.exponent), (Some(2), 5));
    }

    #[test]
    fn chain_step_fixes_unit_pair() {
        let c = chain_step(&BaileyPair::unit(BaileyKernel::unit()));
        for n in 0..4 {
            let u = inv_poch(1, n, 20);
            assert_eq!(c.beta(n, 20).unwrap(), u.mul_trunc(&u, 20));
        }
        assert_eq!(c.alpha(0, 20).unwrap(), QSeries::one(20));
    }

    #[test]
    fn euler_from_unit_pair() {
        let (l, r) = limit_identity(&BaileyPair::unit(BaileyKernel::unit()), 30).unwrap();
        assert_eq!(l, r);
        assert_eq!(r, inv_euler(30));
    }

    #[test]
    fn transform_beta_zero_is_delta_zero() {
        let cp = rho_inf();
        let p = prop1_transform(&cp).unwrap();
        assert_eq!(p.beta(0, 20).unwrap(), cp.delta(0, 20).unwrap());
        assert_eq!(p.kernel(), BaileyKernel::new(1));
    }

    #[test]
    fn transform_requires_unit_kernel() {
        let cp = bailey_conjugate(Rho::Infinite, Rho::Infinite, BaileyKernel::new(1)).unwrap();
        assert!(matches!(
            prop1_transform(&cp),
            Err(BaileyError::KernelMismatch { .. })
        ));
    }

    #[test]
    fn pentagonal_theta() {
        // sum (-1)^j q^{j(3j-1)/2} = (q)_inf
        let t = quadratic_theta(
            30,
            0,
            |j| j * (3 * j - 1) / 2,
            |j| if j % 2 == 0 { 1 } else { -1 },
        );
        assert_eq!(t, euler_product(30));
    }
}
