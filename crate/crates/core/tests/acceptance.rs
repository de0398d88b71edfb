//! Acceptance suite: one line per criterion, exit status 1 if any fails.
//!
//! Run with `cargo test -p qbailey-core --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use qbailey_core::bailey::{
    chain_step, inv_poch, lemma2_contract, product_two_fold, prop1_transform,
    verify_conjugate_pair, verify_pair, verify_symmetric_pair, verify_two_fold_lemma,
};
use qbailey_core::catalogue::{build, penta_cube_slice, run, Params};
use qbailey_core::dsl::parse_manifest;
use qbailey_core::pairs::{
    divisor_sum_pair, divisor_sum_series, durfee_pair, durfee_seed_pair, joshi_vyas_conjugate,
    pentagonal_symmetric_pair, restricted_spt_series, rho_infinite_conjugate, spt_pair,
};
use qbailey_core::partition::{
    partition_count, partitions, rank_counts, second_moment, spt, spt_star,
};
use qbailey_core::series::{euler_product, pochhammer, Count, QMonomial, QSeries};

const MANIFEST: &str = include_str!("../../../manifests/identities.toml");

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ps(pairs: &[(&str, i64)]) -> Params {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Run a catalogue entry on every grid point; returns the number of tasks.
fn catalogue_grid(id: &str, grid: &[Params], order: i64) -> Result<usize, String> {
    for p in grid {
        let r = run(&build(id, p, order).map_err(|e| e.to_string())?);
        if !r.passed() {
            return Err(format!(
                "{id} {p:?} at T = {order}: {} {:?} {:?}",
                r.status, r.first_mismatch, r.detail
            ));
        }
    }
    Ok(grid.len())
}

fn grid2(
    a: &str,
    ra: std::ops::RangeInclusive<i64>,
    b: &str,
    rb: std::ops::RangeInclusive<i64>,
) -> Vec<Params> {
    let mut out = Vec::new();
    for x in ra {
        for y in rb.clone() {
            out.push(ps(&[(a, x), (b, y)]));
        }
    }
    out
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn coeff(s: &QSeries, n: i64) -> i64 {
    i64::try_from(s.coeff(n).expect("within order")).expect("small coefficient")
}

fn euler_identity() -> Outcome {
    let r = run(&build("EULER", &Params::new(), 80).unwrap());
    ensure(r.passed(), || format!("{:?}", r.first_mismatch))?;
    let (lhs, _) = build("EULER", &Params::new(), 80)
        .unwrap()
        .sides()
        .unwrap()
        .map_err(|e| e.to_string())?;
    for n in 0..=40u32 {
        let c = coeff(&lhs, n as i64) as u64;
        ensure(c == partition_count(n), || {
            format!(
                "coefficient of q^{n} is {c}, p({n}) = {}",
                partition_count(n)
            )
        })?;
    }
    Ok("T = 80, p(n) for n <= 40".into())
}

fn penta_cube() -> Outcome {
    let order = 60;
    let r = run(&build("E8_PENTA_CUBE", &Params::new(), order).unwrap());
    ensure(r.passed(), || {
        format!("{} {:?} {:?}", r.status, r.first_mismatch, r.detail)
    })?;
    let k0 = r.stabilized_k.ok_or("no stabilizing K reported")?;

    let e = euler_product(order);
    let cube = e.mul_trunc(&e, order).mul_trunc(&e, order);
    // Jacobi: (q)_inf^3 = sum_n (-1)^n (2n+1) q^{n(n+1)/2}
    let mut jacobi = QSeries::zero(order);
    for n in 0..=order {
        let sign = if n % 2 == 0 { 1 } else { -1 };
        jacobi = &jacobi + &QSeries::monomial(sign * (2 * n + 1), n * (n + 1) / 2, order);
    }
    ensure(cube == jacobi, || {
        "direct cube disagrees with Jacobi's series".into()
    })?;

    let mut partial = penta_cube_slice(0, order);
    for k in 1..=100 {
        partial = &(&partial + &penta_cube_slice(k, order)) + &penta_cube_slice(-k, order);
        if k >= k0 {
            ensure(partial == cube, || {
                format!("partial sum at K = {k} differs from the cube")
            })?;
        }
    }
    Ok(format!("T = {order}, K0 = {k0}, equal for K0 <= K <= 100"))
}

fn spt_pair_and_chu_vandermonde() -> Outcome {
    for m in 1..=8 {
        let r = verify_pair(&spt_pair(m), 8, 60).map_err(|e| e.to_string())?;
        ensure(r.passed(), || format!("M = {m}: {:?}", r.first_mismatch))?;
    }
    let n = catalogue_grid("QCHU", &grid2("N", 0..=6, "M", 0..=8), 40)?;
    Ok(format!(
        "pair for M 1..8, n <= 8, T = 60; {n} q-Chu-Vandermonde cases at T = 40"
    ))
}

fn restricted_spt() -> Outcome {
    let grid: Vec<Params> = (1..=6).map(|m| ps(&[("M", m)])).collect();
    catalogue_grid("C4_SPT", &grid, 50)?;
    for m in 1..=6u32 {
        let s = restricted_spt_series(m as i64, 50);
        for n in 1..=25u32 {
            let c = coeff(&s, n as i64) as u64;
            ensure(c == spt_star(m, n), || {
                format!("M = {m}, n = {n}: {c} vs {}", spt_star(m, n))
            })?;
        }
    }
    let sigma = divisor_sum_series(50);
    for n in 1..=25i64 {
        let oracle: i64 = (1..=n).filter(|d| n % d == 0).sum();
        ensure(coeff(&sigma, n) == oracle, || format!("sigma({n})"))?;
    }
    Ok("T = 50 for M 1..6, spt_star for n <= 25, sigma(N) for N <= 25".into())
}

fn spt_relation() -> Outcome {
    for n in 1..=25u32 {
        ensure(
            spt(n) + second_moment(n) == n as u64 * partition_count(n),
            || format!("n = {n}"),
        )?;
    }
    let raw = rank_counts(2).raw_second_moment();
    ensure(spt(2) + raw != 2 * partition_count(2), || {
        "raw moment unexpectedly satisfies the relation at n = 2".into()
    })?;
    Ok(format!(
        "n <= 25 with the half moment; raw moment at n = 2 gives {} != {}",
        2 * partition_count(2) - raw,
        spt(2)
    ))
}

fn divisor_pair_check() -> Outcome {
    let p = divisor_sum_pair();
    let r = verify_pair(&p, 6, 50).map_err(|e| e.to_string())?;
    ensure(r.passed(), || format!("{:?}", r.first_mismatch))?;
    ensure(
        p.alpha(0, 50).map_err(|e| e.to_string())? == divisor_sum_series(50),
        || "alpha_0".into(),
    )?;
    Ok("n <= 6, T = 50".into())
}

fn joshi_vyas() -> Outcome {
    let cp = joshi_vyas_conjugate();
    ensure(
        cp.delta(0, 50).map_err(|e| e.to_string())?.is_zero(),
        || "delta_0 != 0".into(),
    )?;
    let r = verify_conjugate_pair(&cp, 6, 50).map_err(|e| e.to_string())?;
    ensure(r.passed(), || format!("{:?}", r.first_mismatch))?;
    Ok("|n| <= 6, T = 50".into())
}

fn conjugate_to_pair_at_a_q() -> Outcome {
    for cp in [rho_infinite_conjugate(), joshi_vyas_conjugate()] {
        let p = prop1_transform(&cp).map_err(|e| e.to_string())?;
        ensure(p.kernel().m() == 1, || "kernel is not a = q".into())?;
        let r = verify_pair(&p, 6, 40).map_err(|e| e.to_string())?;
        ensure(r.passed(), || {
            format!("{}: {:?} {:?}", cp.name(), r.first_mismatch, r.detail)
        })?;
    }
    Ok("both conjugate pairs, a = q, N <= 6, T = 40".into())
}

fn two_fold_contraction() -> Outcome {
    let tf = product_two_fold(&spt_pair(1), &spt_pair(2)).map_err(|e| e.to_string())?;
    let cp = rho_infinite_conjugate();
    let p = lemma2_contract(&tf, &cp).map_err(|e| e.to_string())?;
    let r = verify_pair(&p, 5, 40).map_err(|e| e.to_string())?;
    ensure(r.passed(), || {
        format!("contraction: {:?}", r.first_mismatch)
    })?;
    let r = verify_two_fold_lemma(&tf, &cp, &cp, 30).map_err(|e| e.to_string())?;
    ensure(r.passed(), || {
        format!("2-fold lemma: {:?}", r.first_mismatch)
    })?;
    Ok("contracted pair n <= 5 at T = 40, 2-fold lemma at T = 30".into())
}

fn pentagonal_symmetric() -> Outcome {
    let p = pentagonal_symmetric_pair();
    let r = verify_symmetric_pair(&p, 5, 40).map_err(|e| e.to_string())?;
    ensure(r.passed(), || format!("{:?}", r.first_mismatch))?;
    let a_minus = p.alpha(-1, 40).map_err(|e| e.to_string())?;
    let a_plus = p.alpha(1, 40).map_err(|e| e.to_string())?;
    ensure(a_minus.is_zero(), || format!("A_-1 = {a_minus}"))?;
    ensure(a_plus == QSeries::monomial(-1, 0, 40), || {
        format!("A_1 = {a_plus}")
    })?;
    Ok("n <= 5, T = 40, A_-1 = 0, A_1 = -1".into())
}

fn durfee_multisum() -> Outcome {
    catalogue_grid("C6_DURFEE", &grid2("k", 1..=3, "M", 0..=5), 40)?;
    for k in 1..=3 {
        for m in 0..=4 {
            let r = verify_pair(&durfee_pair(k, m), 5, 40).map_err(|e| e.to_string())?;
            ensure(r.passed(), || {
                format!("pair k = {k}, M = {m}: {:?}", r.first_mismatch)
            })?;
        }
    }
    for m in 0..=4 {
        let mut p = durfee_seed_pair(m);
        for k in 1..=3 {
            p = chain_step(&p);
            let direct = durfee_pair(k, m);
            for n in 0..=5 {
                let same =
                    p.alpha(n, 40) == direct.alpha(n, 40) && p.beta(n, 40) == direct.beta(n, 40);
                ensure(same, || format!("chain^{k} differs at M = {m}, n = {n}"))?;
            }
        }
    }
    for m in 0..=5i64 {
        let (lhs, _) = build("C6_DURFEE", &ps(&[("k", 2), ("M", m)]), 40)
            .unwrap()
            .sides()
            .unwrap()
            .map_err(|e| e.to_string())?;
        let mut single = QSeries::zero(40);
        for n in 0..=7 {
            let t = inv_poch(1, n, 40).mul_trunc(&inv_poch(1, n + m, 40), 40);
            single = &single + &t.mul_trunc(&QSeries::monomial(1, n * n, 40), 40);
        }
        ensure(lhs == single, || format!("k = 2 single sum, M = {m}"))?;
    }
    Ok("identity k 1..3, M 0..5; pairs and chain^k for k <= 3, M <= 4, n <= 5; k = 2 reduction M <= 5".into())
}

fn split_identity() -> Outcome {
    let n = catalogue_grid("E29_SPLIT", &grid2("n", 0..=10, "M", 0..=6), 40)?;
    Ok(format!("{n} cases at T = 40"))
}

fn durfee_refinement() -> Outcome {
    catalogue_grid("A23_DURFEE", &grid2("k", 2..=4, "m", 0..=3), 40)?;
    // independent oracle: partitions with every part > m
    for m in 0..=3u32 {
        let rhs = pochhammer(QMonomial::q_pow(m as i64 + 1), Count::Infinite, 40)
            .and_then(|p| p.invert())
            .map_err(|e| e.to_string())?;
        for n in 0..=25u32 {
            let count = partitions(n)
                .filter(|p| p.smallest().is_none_or(|s| s > m))
                .count() as i64;
            ensure(coeff(&rhs, n as i64) == count, || {
                format!("m = {m}, n = {n}")
            })?;
        }
    }
    let (lhs, _) = build("A23_DURFEE", &ps(&[("k", 3), ("m", 1)]), 40)
        .unwrap()
        .sides()
        .unwrap()
        .map_err(|e| e.to_string())?;
    ensure(coeff(&lhs, 4) == 2, || {
        format!("coefficient of q^4 is {}", coeff(&lhs, 4))
    })?;
    Ok("k 2..4, z = q^m for m 0..3, T = 40; q^4 coefficient 2 at z = q".into())
}

fn dsl_equivalence() -> Outcome {
    let manifest = parse_manifest(MANIFEST).map_err(|e| e.to_string())?;
    let cases = [
        ("EULER", ps(&[])),
        ("C4_SPT", ps(&[("M", 2)])),
        ("C6_DURFEE", ps(&[("k", 2), ("M", 1)])),
        ("E29_SPLIT", ps(&[("n", 4), ("M", 2)])),
    ];
    for (id, p) in cases {
        let check = manifest
            .checks
            .iter()
            .find(|c| c.name == id)
            .ok_or(format!("{id} missing"))?;
        let task = check
            .tasks(Some(30))
            .into_iter()
            .find(|t| t.params() == &p)
            .ok_or(format!("{id} {p:?} not in the grid"))?;
        let dsl = task.sides().unwrap().map_err(|e| e.to_string())?;
        let built = build(id, &p, 30)
            .unwrap()
            .sides()
            .unwrap()
            .map_err(|e| e.to_string())?;
        ensure(dsl == built, || format!("{id} {p:?}"))?;
    }
    Ok("EULER, C4_SPT M = 2, C6_DURFEE k = 2 M = 1, E29_SPLIT n = 4 M = 2 at T = 30".into())
}

fn property_suites() -> Outcome {
    const T: i64 = 15;
    let laurent = (-3i64..4, prop::collection::vec(-20i64..21, 0..14))
        .prop_map(|(m, c)| QSeries::from_i64s(m, &c, T));
    let agree =
        |a: &QSeries, b: &QSeries| a.first_difference(b, a.order().min(b.order())).is_none();
    let config = Config {
        failure_persistence: None,
        ..Config::with_cases(200)
    };
    let mut runner = TestRunner::new(config);
    runner
        .run(&(laurent.clone(), laurent.clone(), laurent), |(a, b, c)| {
            prop_assert!(agree(&(&a + &b), &(&b + &a)));
            prop_assert!(agree(&(&(&a + &b) + &c), &(&a + &(&b + &c))));
            prop_assert!(agree(&(&a * &b), &(&b * &a)));
            prop_assert!(agree(&(&(&a * &b) * &c), &(&a * &(&b * &c))));
            prop_assert!(agree(&(&a * &(&b + &c)), &(&(&a * &b) + &(&a * &c))));
            prop_assert!(agree(&(&a * &QSeries::one(T)), &a));
            Ok(())
        })
        .map_err(|e| format!("ring axioms: {e}"))?;

    let power = (0i64..4, prop::collection::vec(-20i64..21, 0..14))
        .prop_map(|(m, c)| QSeries::from_i64s(m, &c, T));
    runner
        .run(&(power.clone(), power, 0i64..T), |(a, b, k)| {
            prop_assert_eq!(
                (&a * &b).truncate(k),
                (&a.truncate(k) * &b.truncate(k)).truncate(k)
            );
            prop_assert_eq!((&a + &b).truncate(k), &a.truncate(k) + &b.truncate(k));
            Ok(())
        })
        .map_err(|e| format!("truncation coherence: {e}"))?;

    for x in [
        QMonomial::new(1, 1),
        QMonomial::new(-1, 1),
        QMonomial::new(1, 2),
    ] {
        for n in 0..=12u64 {
            let next = pochhammer(x, Count::Finite(n + 1), 40).map_err(|e| e.to_string())?;
            let cur = pochhammer(x, Count::Finite(n), 40).map_err(|e| e.to_string())?;
            let factor = QSeries::one(40) - QSeries::monomial(x.coeff(), x.exp() + n as i64, 40);
            ensure(next == cur.mul_trunc(&factor, 40), || {
                format!("Pochhammer recurrence x = {x}, n = {n}")
            })?;
        }
    }

    for n in 0..=25u32 {
        let table = rank_counts(n);
        ensure(table.total() == partition_count(n), || {
            format!("rank mass at n = {n}")
        })?;
        for (&m, &c) in &table.counts {
            ensure(table.get(-m) == c, || format!("rank symmetry N({m}, {n})"))?;
        }
    }
    Ok(
        "ring axioms (200 triples, T = 15), truncation, Pochhammer recurrence, ranks n <= 25"
            .into(),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 15] = [
        ("Euler identity", euler_identity),
        ("triple sum for (q)_inf^3", penta_cube),
        (
            "Bailey pair with q-Chu-Vandermonde",
            spt_pair_and_chu_vandermonde,
        ),
        ("restricted spt generating function", restricted_spt),
        ("spt relation", spt_relation),
        ("divisor-sum Bailey pair", divisor_pair_check),
        ("Joshi-Vyas conjugate pair", joshi_vyas),
        (
            "conjugate pair to Bailey pair at a = q",
            conjugate_to_pair_at_a_q,
        ),
        ("2-fold contraction", two_fold_contraction),
        ("pentagonal symmetric pair", pentagonal_symmetric),
        ("Durfee multisum and chain", durfee_multisum),
        ("split identity", split_identity),
        ("Durfee refinement of Euler", durfee_refinement),
        ("DSL equivalence", dsl_equivalence),
        ("property suites", property_suites),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panic: {msg}"))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        criteria.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
