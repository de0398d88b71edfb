use std::collections::BTreeMap;
use std::fmt;
use std::time::Duration;

use num_bigint::BigInt;
use serde::{Serialize, Serializer};

use crate::series::QSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    TruncationFailure,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::TruncationFailure => "truncation-failure",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub(crate) fn decimal<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// First exponent at which the two sides disagree. `index` is the pair
/// index `n` for pair checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub index: Option<i64>,
    pub exponent: i64,
    #[serde(serialize_with = "decimal")]
    pub lhs: BigInt,
    #[serde(serialize_with = "decimal")]
    pub rhs: BigInt,
}

/// One line of a coefficient comparison table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientRow {
    pub n: i64,
    pub lhs: BigInt,
    pub rhs: BigInt,
}

impl CoefficientRow {
    pub fn equal(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Side-by-side coefficients of two series for exponents `from..=to`.
pub fn coefficient_table(lhs: &QSeries, rhs: &QSeries, from: i64, to: i64) -> Vec<CoefficientRow> {
    (from..=to)
        .map(|n| CoefficientRow {
            n,
            lhs: lhs.coeff_or_zero(n),
            rhs: rhs.coeff_or_zero(n),
        })
        .collect()
}

/// Outcome of one verification. `status == Pass` iff `first_mismatch` is
/// `None` and no truncation failure occurred.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub id: String,
    pub params: BTreeMap<String, i64>,
    pub order: i64,
    pub status: Status,
    pub first_mismatch: Option<Mismatch>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stabilized_k: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip)]
    pub elapsed: Duration,
    #[serde(skip)]
    pub table: Vec<CoefficientRow>,
}

impl VerificationReport {
    pub fn new(id: impl Into<String>, order: i64) -> Self {
        VerificationReport {
            id: id.into(),
            params: BTreeMap::new(),
            order,
            status: Status::Pass,
            first_mismatch: None,
            stabilized_k: None,
            detail: None,
            elapsed: Duration::ZERO,
            table: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub(crate) fn record_mismatch(&mut self, m: Mismatch) {
        if self.first_mismatch.is_none() {
            self.first_mismatch = Some(m);
        }
        if self.status == Status::Pass {
            self.status = Status::Fail;
        }
    }
}
