//! Registry of checkable identities.
//!
//! Each entry names its integer parameters with their admissible ranges and
//! builds a [`VerificationTask`] for given parameter values and order `T`.
//! [`run`] executes a task and never fails: errors become report outcomes.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::bailey::{
    inv_euler, inv_poch, product, verify_conjugate_pair, verify_pair, verify_symmetric_pair,
    BaileyError, BaileyPair, ConjugatePair, Result,
};
use crate::dsl::EvalError;
use crate::pairs::{
    chu_vandermonde_sum, divisor_sum_pair, divisor_sum_series, durfee_pair, joshi_vyas_conjugate,
    pentagonal_symmetric_pair, restricted_spt_series, spt_pair,
};
use crate::report::{coefficient_table, Mismatch, Status, VerificationReport};
use crate::series::{euler_product, pochhammer, qpoch, Count, QMonomial, QSeries};

/// Parameter assignment, ordered by name.
pub type Params = BTreeMap<String, i64>;

/// Why a series-equality task could not produce its two sides.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaskError {
    #[error(transparent)]
    Bailey(#[from] BaileyError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl TaskError {
    fn status(&self) -> Status {
        match self {
            TaskError::Bailey(
                BaileyError::TruncationFailure { .. }
                | BaileyError::InsufficientPrecision(_)
                | BaileyError::UnknownValuationFloor(_),
            )
            | TaskError::Eval(
                EvalError::EvalDivergence { .. } | EvalError::InsufficientPrecision(_),
            ) => Status::TruncationFailure,
            _ => Status::Fail,
        }
    }
}

type Sides = std::result::Result<(QSeries, QSeries), TaskError>;

/// Computes `(lhs, rhs)` of a series identity at a given order.
pub type SidesFn = Arc<dyn Fn(i64) -> Sides + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    SeriesEquality,
    PairCheck,
    SymmetricPairCheck,
    ConjugateCheck,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::SeriesEquality => "series-equality",
            Kind::PairCheck => "pair-check",
            Kind::SymmetricPairCheck => "symmetric-pair-check",
            Kind::ConjugateCheck => "conjugate-check",
        })
    }
}

/// An integer parameter with inclusive range `min..=max`. Parameters with a
/// default are optional and are held at the default in the test grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub min: i64,
    pub max: i64,
    pub default: Option<i64>,
}

const fn req(name: &'static str, min: i64, max: i64) -> ParamSpec {
    ParamSpec {
        name,
        min,
        max,
        default: None,
    }
}

const fn opt(name: &'static str, min: i64, max: i64, default: i64) -> ParamSpec {
    ParamSpec {
        name,
        min,
        max,
        default: Some(default),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogueError {
    #[error("unknown identity id `{0}`")]
    UnknownId(String),
    #[error("bad parameters for {id}: {reason}")]
    BadParams { id: String, reason: String },
}

pub struct IdentityEntry {
    pub id: &'static str,
    pub kind: Kind,
    pub description: &'static str,
    pub params: &'static [ParamSpec],
    builder: fn(&Params) -> Job,
}

impl fmt::Debug for IdentityEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IdentityEntry")
            .field("id", &self.id)
            .field("kind", &self.kind)
            .field("params", &self.params)
            .finish()
    }
}

impl IdentityEntry {
    /// Check `params` against the domain and fill in defaults.
    pub fn resolve(&self, params: &Params) -> std::result::Result<Params, CatalogueError> {
        let bad = |reason: String| CatalogueError::BadParams {
            id: self.id.to_string(),
            reason,
        };
        if let Some(unknown) = params
            .keys()
            .find(|k| !self.params.iter().any(|p| p.name == *k))
        {
            return Err(bad(format!("unknown parameter `{unknown}`")));
        }
        let mut out = Params::new();
        for spec in self.params {
            let v = match (params.get(spec.name), spec.default) {
                (Some(&v), _) => v,
                (None, Some(d)) => d,
                (None, None) => return Err(bad(format!("missing parameter `{}`", spec.name))),
            };
            if v < spec.min || v > spec.max {
                return Err(bad(format!(
                    "{} = {v} outside {}..={}",
                    spec.name, spec.min, spec.max
                )));
            }
            out.insert(spec.name.to_string(), v);
        }
        Ok(out)
    }

    /// Every parameter tuple of the declared test grid: required parameters
    /// range over their whole domain, optional ones stay at their default.
    pub fn test_grid(&self) -> Vec<Params> {
        let axes: Vec<(&str, Vec<i64>)> = self
            .params
            .iter()
            .map(|p| match p.default {
                Some(d) => (p.name, vec![d]),
                None => (p.name, (p.min..=p.max).collect()),
            })
            .collect();
        cartesian(&axes)
    }
}

/// All combinations of the given axes, in lexicographic order of values.
pub fn cartesian(axes: &[(&str, Vec<i64>)]) -> Vec<Params> {
    let mut out = vec![Params::new()];
    for (name, values) in axes {
        out = out
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |&v| {
                    let mut p = p.clone();
                    p.insert(name.to_string(), v);
                    p
                })
            })
            .collect();
    }
    out
}

enum Job {
    Series { sides: SidesFn, power_series: bool },
    Pair { pair: BaileyPair, n_max: i64 },
    SymmetricPair { pair: BaileyPair, n_max: i64 },
    Conjugate { pair: ConjugatePair, n_max: i64 },
    PentaCube { cap: i64, confirm: i64 },
}

/// A built check, ready for [`run`].
pub struct VerificationTask {
    id: String,
    params: Params,
    order: i64,
    job: Job,
}

impl fmt::Debug for VerificationTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VerificationTask")
            .field("id", &self.id)
            .field("params", &self.params)
            .field("order", &self.order)
            .finish()
    }
}

impl VerificationTask {
    /// A series equality outside the registry, e.g. from a manifest.
    pub fn series_equality(
        id: impl Into<String>,
        params: Params,
        order: i64,
        sides: impl Fn(i64) -> Sides + Send + Sync + 'static,
    ) -> Self {
        VerificationTask {
            id: id.into(),
            params,
            order,
            job: Job::Series {
                sides: Arc::new(sides),
                power_series: false,
            },
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    /// Both sides of a series-equality task; `None` for the other kinds.
    pub fn sides(&self) -> Option<Sides> {
        match &self.job {
            Job::Series { sides, .. } => Some(sides(self.order)),
            _ => None,
        }
    }
}

fn p(params: &Params, name: &str) -> i64 {
    params[name]
}

pub fn registry() -> &'static [IdentityEntry] {
    &REGISTRY
}

pub fn lookup(id: &str) -> Option<&'static IdentityEntry> {
    REGISTRY.iter().find(|e| e.id == id)
}

pub fn build(
    id: &str,
    params: &Params,
    order: i64,
) -> std::result::Result<VerificationTask, CatalogueError> {
    let entry = lookup(id).ok_or_else(|| CatalogueError::UnknownId(id.to_string()))?;
    if order < 0 {
        return Err(CatalogueError::BadParams {
            id: id.to_string(),
            reason: format!("order {order} is negative"),
        });
    }
    let params = entry.resolve(params)?;
    Ok(VerificationTask {
        id: id.to_string(),
        job: (entry.builder)(&params),
        params,
        order,
    })
}

fn series_job(f: impl Fn(i64) -> Result<(QSeries, QSeries)> + Send + Sync + 'static) -> Job {
    Job::Series {
        sides: Arc::new(move |t| Ok(f(t)?)),
        power_series: true,
    }
}

static REGISTRY: [IdentityEntry; 13] = [
    IdentityEntry {
        id: "E8_PENTA_CUBE",
        kind: Kind::SeriesEquality,
        description: "(q)_inf^3 = sum_{N in Z, n >= 0, 2|j| <= n} (-1)^{N+n+j} q^{N(N-1)/2 + n(n+1)/2 - j(3j-1)/2 + jN}, N-sum taken last over |N| <= K",
        params: &[opt("K", 0, 1000, 100), opt("confirm", 1, 64, 8)],
        builder: |ps| Job::PentaCube {
            cap: p(ps, "K"),
            confirm: p(ps, "confirm"),
        },
    },
    IdentityEntry {
        id: "P13_SYM",
        kind: Kind::SymmetricPairCheck,
        description: "symmetric pair at a = 1: B_n = q^{n^2}/(q)_{2n}, A_n = (-1)^n q^{n(n-1)/2}/(q)_inf sum_j (-1)^j q^{j(3j-1)/2 + nj}",
        params: &[opt("n_max", 0, 10, 5)],
        builder: |ps| Job::SymmetricPair {
            pair: pentagonal_symmetric_pair(),
            n_max: p(ps, "n_max"),
        },
    },
    IdentityEntry {
        id: "L3_PAIR",
        kind: Kind::PairCheck,
        description: "pair at a = 1: alpha_n = (q)_M (-1)^n (1+q^n) q^{n(3n-1)/2}/((q)_{M-n}(q)_{M+n}), beta_n = 1/((q)_n (q)_{n+M})",
        params: &[req("M", 0, 8), opt("n_max", 0, 10, 6)],
        builder: |ps| Job::Pair {
            pair: spt_pair(p(ps, "M") as u32),
            n_max: p(ps, "n_max"),
        },
    },
    IdentityEntry {
        id: "QCHU",
        kind: Kind::SeriesEquality,
        description: "(q)_M sum_{j=0}^{N} (q^N)_j (q^{-N})_j q^j/((q)_j (q)_{j+M}) = (q)_M^2 q^{N^2}/((q)_{M-N}(q)_{M+N})",
        params: &[req("N", 0, 10), req("M", 0, 8)],
        builder: |ps| {
            let (n, m) = (p(ps, "N"), p(ps, "M"));
            series_job(move |t| {
                let lhs = chu_vandermonde_sum(n, m, 0, t)?;
                let pm = qpoch(m as u64, t);
                let rhs = product(
                    &[
                        pm.clone(),
                        pm,
                        QSeries::monomial(1, n * n, t),
                        inv_poch(1, m - n, t),
                        inv_poch(1, m + n, t),
                    ],
                    t,
                );
                Ok((lhs, rhs))
            })
        },
    },
    IdentityEntry {
        id: "C4_SPT",
        kind: Kind::SeriesEquality,
        description: "sum_{n>=1} q^n/(1-q^n)^2 / (q^{n+1})_M = (1/(q)_M) sum_{n>=1} n q^n/(1-q^n) + (q)_M sum_{n=1}^{M} (-1)^n (1+q^n) q^{n(3n+1)/2}/((q)_{M-n}(q)_{M+n}(1-q^n)^2)",
        params: &[req("M", 0, 8)],
        builder: |ps| {
            let m = p(ps, "M");
            series_job(move |t| Ok((restricted_spt_series(m, t), spt_star_closed_form(m, t)?)))
        },
    },
    IdentityEntry {
        id: "L5_PAIR",
        kind: Kind::PairCheck,
        description: "pair at a = 1: alpha_0 = sum n q^n/(1-q^n), alpha_n = (-1)^n (1+q^n) q^{n(3n+1)/2}/(1-q^n)^2, beta_n = (1/(q)_n) sum_{k>=1} q^k/(1-q^k)^2/(q^{k+1})_n",
        params: &[opt("n_max", 0, 10, 6)],
        builder: |ps| Job::Pair {
            pair: divisor_sum_pair(),
            n_max: p(ps, "n_max"),
        },
    },
    IdentityEntry {
        id: "JV_CONJ",
        kind: Kind::ConjugateCheck,
        description: "conjugate pair at a = 1: delta_0 = 0, delta_n = (q)_{n-1}^2 q^n, gamma_0 = sum n q^n/(1-q^n), gamma_n = q^n/(1-q^n)^2",
        params: &[opt("n_max", 0, 10, 6)],
        builder: |ps| Job::Conjugate {
            pair: joshi_vyas_conjugate(),
            n_max: p(ps, "n_max"),
        },
    },
    IdentityEntry {
        id: "A23_DURFEE",
        kind: Kind::SeriesEquality,
        description: "sum_{n_1..n_{k-1} >= 0} q^{N_1^2+...+N_{k-1}^2} z^{N_1+...+N_{k-1}}/((q)_{n_1}...(q)_{n_{k-1}}(zq)_{n_{k-1}}) = 1/(zq)_inf, N_j = n_j+...+n_{k-1}, z = q^m",
        params: &[req("k", 2, 5), req("m", 0, 8)],
        builder: |ps| {
            let (k, m) = (p(ps, "k"), p(ps, "m"));
            series_job(move |t| {
                let rhs = pochhammer(QMonomial::q_pow(m + 1), Count::Infinite, t)?.invert()?;
                Ok((durfee_refinement_sum(k, m, t), rhs))
            })
        },
    },
    IdentityEntry {
        id: "C6_DURFEE",
        kind: Kind::SeriesEquality,
        description: "sum_{n_1>=...>=n_k>=0} q^{n_1^2+...+n_k^2+M n_k}/((q)_{n_1-n_2}...(q)_{n_{k-1}-n_k}(q)_{n_k}(q)_{n_k+M}) = 1/((q)_inf (q)_M) + ((q)_M/(q)_inf) sum_{n=1}^{M} (-1)^n (1+q^n) q^{n((2k+1)n-1)/2}/((q)_{M-n}(q)_{M+n})",
        params: &[req("k", 1, 5), req("M", 0, 8)],
        builder: |ps| {
            let (k, m) = (p(ps, "k"), p(ps, "M"));
            series_job(move |t| Ok((durfee_multisum(k, m, t), durfee_closed_form(k, m, t))))
        },
    },
    IdentityEntry {
        id: "P27_PAIR",
        kind: Kind::PairCheck,
        description: "pair at a = 1: alpha_n = (q)_M (-1)^n (1+q^n) q^{kn^2+n(n-1)/2}/((q)_{M-n}(q)_{M+n}), beta_n = k-fold sum over n >= n_1 >= ... >= n_k >= 0",
        params: &[req("k", 1, 5), req("M", 0, 8), opt("n_max", 0, 10, 5)],
        builder: |ps| Job::Pair {
            pair: durfee_pair(p(ps, "k") as u32, p(ps, "M") as u32),
            n_max: p(ps, "n_max"),
        },
    },
    IdentityEntry {
        id: "C6_ALT_QCHU",
        kind: Kind::SeriesEquality,
        description: "(q)_M sum_{j=0}^{N} (q^N)_j (q^{-N})_j q^{j(M+1)}/((q)_j (q)_{j+M}) = (q)_M^2/((q)_{M-N}(q)_{M+N})",
        params: &[req("N", 0, 10), req("M", 0, 8)],
        builder: |ps| {
            let (n, m) = (p(ps, "N"), p(ps, "M"));
            series_job(move |t| {
                let lhs = chu_vandermonde_sum(n, m, m, t)?;
                let pm = qpoch(m as u64, t);
                let rhs = product(&[pm.clone(), pm, inv_poch(1, m - n, t), inv_poch(1, m + n, t)], t);
                Ok((lhs, rhs))
            })
        },
    },
    IdentityEntry {
        id: "E29_SPLIT",
        kind: Kind::SeriesEquality,
        description: "1/((q)_n (q)_{n+M}) = sum_{j>=0} q^{j^2+jM}/((q)_{n-j}(q)_j(q)_{j+M})",
        params: &[req("n", 0, 10), req("M", 0, 8)],
        builder: |ps| {
            let (n, m) = (p(ps, "n"), p(ps, "M"));
            series_job(move |t| {
                let lhs = inv_poch(1, n, t).mul_trunc(&inv_poch(1, n + m, t), t);
                let mut rhs = QSeries::zero(t);
                for j in 0..=n {
                    let term = product(
                        &[
                            QSeries::monomial(1, j * j + j * m, t),
                            inv_poch(1, n - j, t),
                            inv_poch(1, j, t),
                            inv_poch(1, j + m, t),
                        ],
                        t,
                    );
                    rhs = &rhs + &term;
                }
                Ok((lhs, rhs))
            })
        },
    },
    IdentityEntry {
        id: "EULER",
        kind: Kind::SeriesEquality,
        description: "sum_{n>=0} q^{n^2}/(q)_n^2 = 1/(q)_inf",
        params: &[],
        builder: |_| {
            series_job(|t| {
                let mut lhs = QSeries::zero(t);
                let mut n = 0;
                while n * n <= t {
                    let inv = inv_poch(1, n, t);
                    lhs = &lhs + &product(&[QSeries::monomial(1, n * n, t), inv.clone(), inv], t);
                    n += 1;
                }
                Ok((lhs, inv_euler(t)))
            })
        },
    },
];

/// Closed form of the restricted spt generating function with `M` fixed.
pub fn spt_star_closed_form(m: i64, order: i64) -> Result<QSeries> {
    let mut acc = inv_poch(1, m, order).mul_trunc(&divisor_sum_series(order), order);
    for n in 1..=m {
        let one_minus = QSeries::one(order) - QSeries::monomial(1, n, order);
        let inv = one_minus.invert()?;
        let sign = if n % 2 == 0 { 1 } else { -1 };
        let term = product(
            &[
                qpoch(m as u64, order),
                QSeries::one(order) + QSeries::monomial(1, n, order),
                QSeries::monomial(sign, n * (3 * n + 1) / 2, order),
                inv_poch(1, m - n, order),
                inv_poch(1, m + n, order),
                inv.clone(),
                inv,
            ],
            order,
        );
        acc = &acc + &term;
    }
    Ok(acc)
}

/// Left side of the Durfee refinement of Euler's identity at `z = q^m`.
pub fn durfee_refinement_sum(k: i64, m: i64, order: i64) -> QSeries {
    #[allow(clippy::too_many_arguments)]
    fn walk(
        remaining: i64,
        prev_big: i64,
        exp: i64,
        parts: &mut Vec<i64>,
        m: i64,
        order: i64,
        acc: &mut QSeries,
    ) {
        if remaining == 0 {
            // parts[0] = n_{k-1}, ...; the last factor uses n_{k-1}
            let mut factors = vec![QSeries::monomial(1, exp, order)];
            factors.extend(parts.iter().map(|&n| inv_poch(1, n, order)));
            factors.push(inv_poch(m + 1, parts[0], order));
            *acc = &*acc + &product(&factors, order);
            return;
        }
        for n in 0.. {
            let big = prev_big + n;
            let cost = big * big + m * big;
            // every later N_j is at least `big`
            if exp + remaining * cost > order {
                break;
            }
            parts.push(n);
            walk(remaining - 1, big, exp + cost, parts, m, order, acc);
            parts.pop();
        }
    }
    let mut acc = QSeries::zero(order);
    walk(k - 1, 0, 0, &mut Vec::new(), m, order, &mut acc);
    acc
}

/// Left side of the k-fold Durfee-type multisum with shift `M`.
pub fn durfee_multisum(k: i64, m: i64, order: i64) -> QSeries {
    fn walk(
        remaining: i64,
        prev: Option<i64>,
        exp: i64,
        idx: &mut Vec<i64>,
        m: i64,
        order: i64,
        acc: &mut QSeries,
    ) {
        if remaining == 0 {
            let last = *idx.last().expect("k >= 1");
            let mut factors = vec![QSeries::monomial(1, exp + m * last, order)];
            factors.extend(idx.windows(2).map(|w| inv_poch(1, w[0] - w[1], order)));
            factors.push(inv_poch(1, last, order));
            factors.push(inv_poch(1, last + m, order));
            *acc = &*acc + &product(&factors, order);
            return;
        }
        let mut n = 0;
        while prev.is_none_or(|p| n <= p) {
            let e = exp + n * n;
            if e > order {
                break;
            }
            idx.push(n);
            walk(remaining - 1, Some(n), e, idx, m, order, acc);
            idx.pop();
            n += 1;
        }
    }
    let mut acc = QSeries::zero(order);
    walk(k, None, 0, &mut Vec::new(), m, order, &mut acc);
    acc
}

/// Right side of the k-fold Durfee-type multisum.
pub fn durfee_closed_form(k: i64, m: i64, order: i64) -> QSeries {
    let mut inner = inv_poch(1, m, order);
    for n in 1..=m {
        let sign = if n % 2 == 0 { 1 } else { -1 };
        let term = product(
            &[
                qpoch(m as u64, order),
                QSeries::one(order) + QSeries::monomial(1, n, order),
                QSeries::monomial(sign, n * ((2 * k + 1) * n - 1) / 2, order),
                inv_poch(1, m - n, order),
                inv_poch(1, m + n, order),
            ],
            order,
        );
        inner = &inner + &term;
    }
    inner.mul_trunc(&inv_euler(order), order)
}

/// `((q)_inf)^3` by cubing the truncated product.
pub fn penta_cube_target(order: i64) -> QSeries {
    let e = euler_product(order);
    e.mul_trunc(&e, order).mul_trunc(&e, order)
}

/// The inner `(n, j)` double sum of the triple-sum expansion of
/// `((q)_inf)^3` for one fixed outer index `N`.
pub fn penta_cube_slice(big_n: i64, order: i64) -> QSeries {
    let mut coeffs = vec![0i64; (order.max(-1) + 1) as usize];
    let abs_n = big_n.abs();
    let base = big_n * (big_n - 1) / 2;
    for n in 0.. {
        // 8 * (lower bound of the exponent over |j| <= n/2), increasing once n >= 2|N|
        let low8 = 4 * big_n * (big_n - 1) + n * n + 2 * n - 4 * n * abs_n;
        if n >= 2 * abs_n && low8 > 8 * order {
            break;
        }
        for j in -(n / 2)..=(n / 2) {
            let e = base + n * (n + 1) / 2 - j * (3 * j - 1) / 2 + j * big_n;
            debug_assert!(e >= 0);
            if e <= order {
                let sign = if (big_n + n + j).rem_euclid(2) == 0 {
                    1
                } else {
                    -1
                };
                coeffs[e as usize] += sign;
            }
        }
    }
    QSeries::from_i64s(0, &coeffs, order)
}

/// Partial sum of [`penta_cube_slice`] over `|N| <= k`.
pub fn penta_cube_partial(k: i64, order: i64) -> QSeries {
    let mut acc = penta_cube_slice(0, order);
    for n in 1..=k {
        acc = &acc + &penta_cube_slice(n, order);
        acc = &acc + &penta_cube_slice(-n, order);
    }
    acc
}

fn run_penta_cube(report: &mut VerificationReport, cap: i64, confirm: i64) {
    let order = report.order;
    let target = penta_cube_target(order);
    let mut partial = penta_cube_slice(0, order);
    // first K of the current run of unchanged partial sums
    let mut run_start = 0;
    for k in 1..=cap + 1 {
        if k - run_start > confirm {
            report.stabilized_k = Some(run_start);
            compare_into(report, None, &target, &partial);
            return;
        }
        if k > cap {
            break;
        }
        let next = &(&partial + &penta_cube_slice(k, order)) + &penta_cube_slice(-k, order);
        if next != partial {
            run_start = k;
        }
        partial = next;
    }
    report.status = Status::TruncationFailure;
    report.detail = Some(format!(
        "partial sums over |N| <= K did not stay fixed for {confirm} consecutive K within K <= {cap}"
    ));
    report.table = coefficient_table(&target, &partial, 0, order);
}

fn compare_into(report: &mut VerificationReport, index: Option<i64>, lhs: &QSeries, rhs: &QSeries) {
    let order = report.order;
    if let Some((e, l, r)) = lhs.first_difference(rhs, order) {
        report.record_mismatch(Mismatch {
            index,
            exponent: e,
            lhs: l,
            rhs: r,
        });
    }
    let from = [lhs.valuation(), rhs.valuation()]
        .into_iter()
        .flatten()
        .fold(0, i64::min);
    report.table = coefficient_table(lhs, rhs, from, order);
}

fn error_outcome(report: &mut VerificationReport, err: TaskError) {
    report.status = err.status();
    report.detail = Some(err.to_string());
}

/// Execute a task. Deterministic apart from `elapsed`.
pub fn run(task: &VerificationTask) -> VerificationReport {
    let start = Instant::now();
    let mut report = VerificationReport::new(task.id.clone(), task.order);
    report.params = task.params.clone();
    let order = task.order;
    let delegated = match &task.job {
        Job::Series {
            sides,
            power_series,
        } => {
            match at_order_pair(order, sides) {
                Ok((lhs, rhs)) => {
                    compare_into(&mut report, None, &lhs, &rhs);
                    let negative = [&lhs, &rhs]
                        .iter()
                        .any(|s| s.valuation().is_some_and(|v| v < 0));
                    if *power_series && negative && report.status == Status::Pass {
                        report.status = Status::Fail;
                        report.detail = Some("a side has negative valuation".into());
                    }
                }
                Err(e) => error_outcome(&mut report, e),
            }
            None
        }
        Job::Pair { pair, n_max } => Some(verify_pair(pair, *n_max, order)),
        Job::SymmetricPair { pair, n_max } => Some(verify_symmetric_pair(pair, *n_max, order)),
        Job::Conjugate { pair, n_max } => Some(verify_conjugate_pair(pair, *n_max, order)),
        Job::PentaCube { cap, confirm } => {
            run_penta_cube(&mut report, *cap, *confirm);
            None
        }
    };
    match delegated {
        Some(Ok(r)) => {
            report.status = r.status;
            report.first_mismatch = r.first_mismatch;
            report.detail = r.detail;
            report.table = r.table;
        }
        Some(Err(e)) => error_outcome(&mut report, e.into()),
        None => {}
    }
    report.elapsed = start.elapsed();
    report
}

/// Both sides known to `order`, raising the working order if precision was lost.
fn at_order_pair(order: i64, sides: &SidesFn) -> Sides {
    let mut work = order;
    for _ in 0..16 {
        let (lhs, rhs) = sides(work)?;
        let reached = lhs.order().min(rhs.order());
        if reached >= order {
            return Ok((lhs.truncate(order), rhs.truncate(order)));
        }
        work += order - reached;
    }
    Err(BaileyError::InsufficientPrecision(order).into())
}
