//! Concrete Bailey pairs and conjugate pairs checked by the catalogue.
//!
//! Each constructor evaluates its closed form directly; none of them is
//! derived from another through the transforms in [`crate::bailey`], so the
//! transforms can be checked against them.

use crate::bailey::{
    at_order, inv_euler, inv_poch, product, quadratic_theta, BaileyKernel, BaileyPair,
    ConjugatePair, Result,
};
use crate::series::{pochhammer, qpoch, Count, QSeries};

fn sign(n: i64) -> i64 {
    if n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// `q^n / (1 - q^n)^2 = q^n + 2 q^{2n} + 3 q^{3n} + ...` for `n >= 1`.
pub fn smallest_part_weight(n: i64, order: i64) -> QSeries {
    let one_minus = QSeries::one(order) - QSeries::monomial(1, n, order);
    let inv = one_minus.invert().expect("constant term 1");
    QSeries::monomial(1, n, order).mul_trunc(&inv.mul_trunc(&inv, order), order)
}

/// `sum_{n>=1} n q^n / (1 - q^n)`.
pub fn divisor_sum_series(order: i64) -> QSeries {
    let mut acc = QSeries::zero(order);
    for n in 1..=order.max(0) {
        let one_minus = QSeries::one(order) - QSeries::monomial(1, n, order);
        let term =
            QSeries::monomial(n, n, order).mul_trunc(&one_minus.invert().expect("unit"), order);
        acc = &acc + &term;
    }
    acc
}

/// `(q)_M (-1)^n (1 + q^n) q^{e} / ((q)_{M-n} (q)_{M+n})` for `n > 0`,
/// `1/(q)_M` for `n = 0`.
fn vandermonde_alpha(m: i64, n: i64, e: i64, order: i64) -> QSeries {
    if n == 0 {
        return inv_poch(1, m, order);
    }
    if n > m {
        return QSeries::zero(order);
    }
    let one_plus = QSeries::one(order) + QSeries::monomial(1, n, order);
    product(
        &[
            qpoch(m as u64, order),
            one_plus,
            QSeries::monomial(sign(n), e, order),
            inv_poch(1, m - n, order),
            inv_poch(1, m + n, order),
        ],
        order,
    )
}

/// The pair relative to `a = 1`
///
/// ```text
/// alpha_n = (q)_M (-1)^n (1 + q^n) q^{n(3n-1)/2} / ((q)_{M-n} (q)_{M+n}),  alpha_0 = 1/(q)_M
/// beta_n  = 1 / ((q)_n (q)_{n+M})
/// ```
pub fn spt_pair(m: u32) -> BaileyPair {
    let m = m as i64;
    BaileyPair::new(
        format!("L3_PAIR(M={m})"),
        BaileyKernel::unit(),
        false,
        move |n, order| Ok(vandermonde_alpha(m, n, n * (3 * n - 1) / 2, order)),
        move |n, order| Ok(inv_poch(1, n, order).mul_trunc(&inv_poch(1, n + m, order), order)),
    )
}

/// Bilateral form of [`spt_pair`]:
/// `A_n = (q)_M (-1)^n q^{n(3n-1)/2} / ((q)_{M-n} (q)_{M+n})` for all `n`, so
/// that `A_n + A_{-n}` recovers the one-sided `alpha_n`.
pub fn spt_symmetric_pair(m: u32) -> BaileyPair {
    let m = m as i64;
    BaileyPair::new(
        format!("L3_SYM(M={m})"),
        BaileyKernel::unit(),
        true,
        move |n, order| {
            Ok(product(
                &[
                    qpoch(m as u64, order),
                    QSeries::monomial(sign(n), n * (3 * n - 1) / 2, order),
                    inv_poch(1, m - n, order),
                    inv_poch(1, m + n, order),
                ],
                order,
            ))
        },
        move |n, order| Ok(inv_poch(1, n, order).mul_trunc(&inv_poch(1, n + m, order), order)),
    )
}

/// The pair relative to `a = 1` built on the restricted spt generating function:
///
/// ```text
/// alpha_0 = sum_{n>=1} n q^n / (1 - q^n)
/// alpha_n = (-1)^n (1 + q^n) q^{n(3n+1)/2} / (1 - q^n)^2
/// beta_n  = (1/(q)_n) sum_{k>=1} (q^k + 2q^{2k} + ...) / ((1 - q^{k+1}) ... (1 - q^{k+n}))
/// ```
pub fn divisor_sum_pair() -> BaileyPair {
    BaileyPair::new(
        "L5_PAIR",
        BaileyKernel::unit(),
        false,
        |n, order| {
            if n == 0 {
                return Ok(divisor_sum_series(order));
            }
            let one_minus = QSeries::one(order) - QSeries::monomial(1, n, order);
            let inv = one_minus.invert()?;
            let one_plus = QSeries::one(order) + QSeries::monomial(1, n, order);
            Ok(product(
                &[
                    QSeries::monomial(sign(n), n * (3 * n + 1) / 2, order),
                    one_plus,
                    inv.clone(),
                    inv,
                ],
                order,
            ))
        },
        |n, order| Ok(restricted_spt_series(n, order).mul_trunc(&inv_poch(1, n, order), order)),
    )
}

/// `sum_{k>=1} q^k/(1-q^k)^2 * 1/(q^{k+1};q)_M`: the generating function of
/// smallest-part appearances over partitions whose parts stay within
/// smallest + M.
pub fn restricted_spt_series(m: i64, order: i64) -> QSeries {
    let mut acc = QSeries::zero(order);
    for k in 1..=order.max(0) {
        acc = &acc + &smallest_part_weight(k, order).mul_trunc(&inv_poch(k + 1, m, order), order);
    }
    acc
}

/// The symmetric pair relative to `a = 1`
///
/// ```text
/// B_n = q^{n^2} / (q)_{2n}
/// A_n = (-1)^n q^{n(n-1)/2} / (q)_inf * sum_{j in Z} (-1)^j q^{j(3j-1)/2 + nj}
/// ```
///
/// with `A_n` evaluated by the same formula at negative `n`.
pub fn pentagonal_symmetric_pair() -> BaileyPair {
    BaileyPair::new(
        "P13_SYM",
        BaileyKernel::unit(),
        true,
        |n, order| {
            // total exponent ((n+j)(n+j-1) + 2j^2)/2 >= 0, vertex at j = (1-2n)/6
            let vertex = ((1 - 2 * n) as f64 / 6.0).round() as i64;
            let theta = quadratic_theta(
                order,
                vertex,
                |j| n * (n - 1) / 2 + j * (3 * j - 1) / 2 + n * j,
                |j| sign(n + j),
            );
            Ok(theta.mul_trunc(&inv_euler(order), order))
        },
        |n, order| {
            Ok(inv_poch(1, 2 * n, order).mul_trunc(&QSeries::monomial(1, n * n, order), order))
        },
    )
}

/// The seed pair relative to `a = 1` for the Durfee-type multisums:
///
/// ```text
/// alpha_n = (q)_M (-1)^n (1 + q^n) q^{n(n-1)/2} / ((q)_{M-n} (q)_{M+n}),  alpha_0 = 1/(q)_M
/// beta_n  = q^{nM} / ((q)_n (q)_{n+M})
/// ```
pub fn durfee_seed_pair(m: u32) -> BaileyPair {
    let m = m as i64;
    BaileyPair::new(
        format!("C6_SEED(M={m})"),
        BaileyKernel::unit(),
        false,
        move |n, order| Ok(vandermonde_alpha(m, n, n * (n - 1) / 2, order)),
        move |n, order| {
            Ok(product(
                &[
                    QSeries::monomial(1, n * m, order),
                    inv_poch(1, n, order),
                    inv_poch(1, n + m, order),
                ],
                order,
            ))
        },
    )
}

/// The k-th Durfee pair relative to `a = 1`, with `beta_n` summed directly:
///
/// ```text
/// alpha_n = (q)_M (-1)^n (1 + q^n) q^{kn^2 + n(n-1)/2} / ((q)_{M-n} (q)_{M+n})
/// beta_n  = sum_{n >= n_1 >= ... >= n_k >= 0}
///             q^{n_1^2 + ... + n_k^2 + M n_k}
///             / ((q)_{n-n_1} (q)_{n_1-n_2} ... (q)_{n_{k-1}-n_k} (q)_{n_k} (q)_{n_k+M})
/// ```
///
/// `k = 0` is the seed pair.
pub fn durfee_pair(k: u32, m: u32) -> BaileyPair {
    if k == 0 {
        return durfee_seed_pair(m);
    }
    let (ki, mi) = (k as i64, m as i64);
    BaileyPair::new(
        format!("P27_PAIR(k={k},M={m})"),
        BaileyKernel::unit(),
        false,
        move |n, order| {
            Ok(vandermonde_alpha(
                mi,
                n,
                ki * n * n + n * (n - 1) / 2,
                order,
            ))
        },
        move |n, order| Ok(durfee_beta(ki, mi, n, order)),
    )
}

fn durfee_beta(k: i64, m: i64, n: i64, order: i64) -> QSeries {
    let mut acc = QSeries::zero(order);
    let mut idx = Vec::with_capacity(k as usize);
    durfee_beta_rec(k, m, n, order, n, 0, &mut idx, &mut acc);
    acc
}

#[allow(clippy::too_many_arguments)]
fn durfee_beta_rec(
    k: i64,
    m: i64,
    n: i64,
    order: i64,
    prev: i64,
    exp: i64,
    idx: &mut Vec<i64>,
    acc: &mut QSeries,
) {
    if idx.len() as i64 == k {
        let last = *idx.last().expect("k >= 1");
        let mut factors = vec![QSeries::monomial(1, exp + m * last, order)];
        let mut upper = n;
        for &i in idx.iter() {
            factors.push(inv_poch(1, upper - i, order));
            upper = i;
        }
        factors.push(inv_poch(1, last, order));
        factors.push(inv_poch(1, last + m, order));
        *acc = &*acc + &product(&factors, order);
        return;
    }
    for next in 0..=prev {
        let e = exp + next * next;
        if e > order {
            break;
        }
        idx.push(next);
        durfee_beta_rec(k, m, n, order, next, e, idx, acc);
        idx.pop();
    }
}

/// `(delta_n, gamma_n) = (q^{n^2}, q^{n^2}/(q)_inf)` at `a = 1`, written out
/// directly rather than through the general constructor.
pub fn rho_infinite_conjugate() -> ConjugatePair {
    ConjugatePair::new(
        "(q^{n^2}, q^{n^2}/(q)_inf)",
        BaileyKernel::unit(),
        |n, order| Ok(QSeries::monomial(1, n * n, order).mul_trunc(&inv_euler(order), order)),
        |n, order| Ok(QSeries::monomial(1, n * n, order)),
        |j| j * j,
    )
}

/// The conjugate pair at `a = 1`
///
/// ```text
/// delta_n = (q)_{n-1}^2 q^n  (n >= 1),   delta_0 = 0
/// gamma_n = q^n / (1 - q^n)^2 (n >= 1),  gamma_0 = sum_{n>=1} n q^n / (1 - q^n)
/// ```
pub fn joshi_vyas_conjugate() -> ConjugatePair {
    ConjugatePair::new(
        "JV_CONJ",
        BaileyKernel::unit(),
        |n, order| {
            Ok(if n == 0 {
                divisor_sum_series(order)
            } else {
                smallest_part_weight(n, order)
            })
        },
        |n, order| {
            if n == 0 {
                return Ok(QSeries::zero(order));
            }
            let p = qpoch((n - 1) as u64, order);
            Ok(product(
                &[p.clone(), p, QSeries::monomial(1, n, order)],
                order,
            ))
        },
        |j| j,
    )
}

/// `(x;q)_n` for `x = q^e`, any integer `e`, as an exact Laurent polynomial
/// known to `order`.
pub(crate) fn qpow_poch(e: i64, n: i64, order: i64) -> Result<QSeries> {
    Ok(pochhammer(
        crate::series::QMonomial::q_pow(e),
        Count::Finite(n as u64),
        order,
    )?)
}

/// `(q)_M sum_{j=0}^{N} (q^N)_j (q^{-N})_j q^{j(1 + s)} / ((q)_j (q)_{j+M})`
/// for `s = 0` (left side of the first q-Chu-Vandermonde evaluation) and
/// `s = M` (the alternative one).
pub fn chu_vandermonde_sum(big_n: i64, m: i64, s: i64, order: i64) -> Result<QSeries> {
    at_order(order, |work| {
        let mut acc = QSeries::zero(work);
        for j in 0..=big_n {
            let num = qpow_poch(big_n, j, work + big_n * big_n)?
                .mul_series(&qpow_poch(-big_n, j, work + big_n * big_n)?)
                .shift(j * (1 + s));
            let term = num
                .mul_series(&inv_poch(1, j, work))
                .mul_series(&inv_poch(1, j + m, work));
            acc = &acc + &term;
        }
        Ok(acc.mul_series(&qpoch(m as u64, work)))
    })
}
