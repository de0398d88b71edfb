//! Brute-force partition enumeration and the statistics built on it.
//!
//! Everything here walks the partitions of `n` one by one. It is meant as an
//! independent oracle for the series side, so it never touches [`QSeries`]
//! arithmetic except to package finished counts in [`gf_from_stat`].
//! Practical for `n <= 40` (p(40) = 37338).

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::series::QSeries;

/// A partition: parts in nonincreasing order, all at least 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// Panics if `parts` is not nonincreasing or contains a zero.
    pub fn new(parts: Vec<u32>) -> Self {
        assert!(
            parts.windows(2).all(|w| w[0] >= w[1]),
            "parts must be nonincreasing"
        );
        assert!(parts.iter().all(|&p| p >= 1), "parts must be positive");
        Partition { parts }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn n(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn largest(&self) -> Option<u32> {
        self.parts.first().copied()
    }

    pub fn smallest(&self) -> Option<u32> {
        self.parts.last().copied()
    }

    /// Number of times the smallest part occurs.
    pub fn smallest_multiplicity(&self) -> u32 {
        match self.smallest() {
            Some(s) => self.parts.iter().rev().take_while(|&&p| p == s).count() as u32,
            None => 0,
        }
    }

    /// Dyson's rank: largest part minus number of parts.
    pub fn rank(&self) -> i64 {
        self.largest().unwrap_or(0) as i64 - self.parts.len() as i64
    }
}

/// Iterator over the partitions of `n` in lexicographically decreasing order,
/// starting from `[n]` and ending at `[1, 1, ..., 1]`.
pub struct Partitions {
    next: Option<Vec<u32>>,
}

impl Iterator for Partitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        let current = self.next.take()?;
        self.next = successor(&current);
        Some(Partition { parts: current })
    }
}

fn successor(parts: &[u32]) -> Option<Vec<u32>> {
    // rightmost part > 1
    let idx = parts.iter().rposition(|&p| p > 1)?;
    let mut next: Vec<u32> = parts[..idx].to_vec();
    let v = parts[idx] - 1;
    let mut remaining: u32 = parts[idx..].iter().sum();
    while remaining > 0 {
        let take = v.min(remaining);
        next.push(take);
        remaining -= take;
    }
    Some(next)
}

pub fn partitions(n: u32) -> Partitions {
    Partitions {
        next: Some(if n == 0 { Vec::new() } else { vec![n] }),
    }
}

/// p(n) by enumeration.
pub fn partition_count(n: u32) -> u64 {
    partitions(n).count() as u64
}

/// Total number of appearances of the smallest part over all partitions of `n`.
pub fn spt(n: u32) -> u64 {
    partitions(n)
        .map(|p| p.smallest_multiplicity() as u64)
        .sum()
}

/// `spt` restricted to partitions whose parts never exceed the smallest part plus `m`.
pub fn spt_star(m: u32, n: u32) -> u64 {
    partitions(n)
        .filter(|p| match (p.largest(), p.smallest()) {
            (Some(l), Some(s)) => l <= s + m,
            _ => false,
        })
        .map(|p| p.smallest_multiplicity() as u64)
        .sum()
}

/// Rank distribution `N(m, n)` for a fixed `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankTable {
    pub n: u32,
    pub counts: BTreeMap<i64, u64>,
}

impl RankTable {
    pub fn get(&self, m: i64) -> u64 {
        self.counts.get(&m).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// `sum_m m^2 N(m, n)`.
    pub fn raw_second_moment(&self) -> u64 {
        self.counts.iter().map(|(&m, &c)| (m * m) as u64 * c).sum()
    }
}

pub fn rank_counts(n: u32) -> RankTable {
    let mut counts = BTreeMap::new();
    for p in partitions(n) {
        *counts.entry(p.rank()).or_insert(0) += 1;
    }
    RankTable { n, counts }
}

/// `N_2(n) = (1/2) sum_m m^2 N(m, n)`, the normalization under which
/// `spt(n) = n p(n) - N_2(n)`.
pub fn second_moment(n: u32) -> u64 {
    let raw = rank_counts(n).raw_second_moment();
    debug_assert!(
        raw.is_multiple_of(2),
        "rank symmetry makes the raw moment even"
    );
    raw / 2
}

/// The statistics [`gf_from_stat`] can package as a generating function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Statistic {
    P,
    Spt,
    SptStar(u32),
}

impl Statistic {
    pub fn eval(&self, n: u32) -> u64 {
        match *self {
            Statistic::P => partition_count(n),
            Statistic::Spt if n == 0 => 0,
            Statistic::Spt => spt(n),
            Statistic::SptStar(_) if n == 0 => 0,
            Statistic::SptStar(m) => spt_star(m, n),
        }
    }
}

/// `sum_{n <= order} stat(n) q^n`.
pub fn gf_from_stat(stat: Statistic, order: u32) -> QSeries {
    let coeffs = (0..=order).map(|n| BigInt::from(stat.eval(n))).collect();
    QSeries::from_coeffs(0, coeffs, order as i64)
}
