use std::collections::BTreeMap;

use qbailey_core::catalogue::{build, lookup, run};
use qbailey_core::dsl::{evaluate, parse_manifest, parse_str};

const MANIFEST: &str = include_str!("../../../manifests/identities.toml");

fn params(pairs: &[(&str, i64)]) -> BTreeMap<String, i64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

#[test]
fn manifest_matches_catalogue_series() {
    let manifest = parse_manifest(MANIFEST).unwrap();
    let mut compared = 0;
    for task in manifest.tasks(Some(30)) {
        let Some(entry) = lookup(task.id()) else {
            continue;
        };
        let built = build(entry.id, task.params(), 30).unwrap();
        let (cl, cr) = built.sides().unwrap().unwrap();
        let (dl, dr) = task.sides().unwrap().unwrap();
        assert_eq!(dl, cl, "{} {:?} lhs", task.id(), task.params());
        assert_eq!(dr, cr, "{} {:?} rhs", task.id(), task.params());
        compared += 1;
    }
    assert!(compared >= 40, "only {compared} tasks compared");
}

#[test]
fn named_fixed_points() {
    let manifest = parse_manifest(MANIFEST).unwrap();
    let cases = [
        ("EULER", params(&[])),
        ("C4_SPT", params(&[("M", 2)])),
        ("C6_DURFEE", params(&[("k", 2), ("M", 1)])),
        ("E29_SPLIT", params(&[("n", 4), ("M", 2)])),
    ];
    for (id, ps) in cases {
        let check = manifest.checks.iter().find(|c| c.name == id).unwrap();
        let task = check
            .tasks(Some(30))
            .into_iter()
            .find(|t| t.params() == &ps)
            .unwrap();
        let built = build(id, &ps, 30).unwrap();
        assert_eq!(
            task.sides().unwrap().unwrap(),
            built.sides().unwrap().unwrap(),
            "{id}"
        );
    }
}

#[test]
fn shipped_manifest_passes_at_order_60() {
    let manifest = parse_manifest(MANIFEST).unwrap();
    for task in manifest.tasks(Some(60)) {
        let r = run(&task);
        assert!(
            r.passed(),
            "{} {:?}: {:?}",
            task.id(),
            task.params(),
            r.detail
        );
    }
}

#[test]
fn printer_normal_form_round_trips_manifest_expressions() {
    let manifest = parse_manifest(MANIFEST).unwrap();
    for check in &manifest.checks {
        for e in [&check.lhs, &check.rhs] {
            let printed = e.to_string();
            assert_eq!(&parse_str(&printed).unwrap(), e, "{printed}");
        }
    }
}

#[test]
fn evaluation_agrees_with_builder_for_durfee_at_higher_k() {
    // the k = 3 multisum written out by hand
    let text = "sum(a, 0, inf, sum(b, 0, a, sum(c, 0, b, \
        q^(a^2 + b^2 + c^2 + M*c)/(poch(q, a - b)*poch(q, b - c)*poch(q, c)*poch(q, c + M)))))";
    let e = parse_str(text).unwrap();
    for m in 0..3 {
        let ps = params(&[("k", 3), ("M", m)]);
        let lhs = evaluate(&e, &ps, 30).unwrap();
        let (cl, _) = build("C6_DURFEE", &ps, 30)
            .unwrap()
            .sides()
            .unwrap()
            .unwrap();
        assert_eq!(lhs, cl);
    }
}
