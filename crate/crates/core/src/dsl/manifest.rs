//! Manifest files: named checks `lhs = rhs` in TOML.
//!
//! ```toml
//! [[check]]
//! name = "spt-star"
//! order = 50
//! params = { M = "0..6" }
//! lhs = "sum(n, 1, inf, q^n/(1 - q^n)^2/poch(q^(n + 1), M))"
//! rhs = "..."
//! ```
//!
//! A parameter is an integer, an inclusive range `"a..b"` or a list of
//! integers. Optional keys `window` and `budget` tune the stopping rule of
//! infinite sums.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;
use toml::{Table, Value};

use super::ast::Expr;
use super::eval::{evaluate_with, EvalConfig};
use super::parser::parse_str;
use crate::catalogue::{cartesian, Params, VerificationTask};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ManifestError {
    #[error("manifest is not valid TOML: {0}")]
    Syntax(String),
    #[error("check #{index}{}: key `{key}`: {reason}", name.as_ref().map(|n| format!(" (`{n}`)")).unwrap_or_default())]
    Key {
        index: usize,
        name: Option<String>,
        key: String,
        reason: String,
    },
    #[error("check name `{0}` is used more than once")]
    Duplicate(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    /// Values per parameter; a grid expands to their cartesian product.
    pub params: BTreeMap<String, Vec<i64>>,
    pub lhs: Expr,
    pub rhs: Expr,
    pub order: i64,
    pub config: EvalConfig,
}

impl Check {
    /// Every parameter assignment of the grid, ordered by value.
    pub fn expand(&self) -> Vec<Params> {
        let axes: Vec<(&str, Vec<i64>)> = self
            .params
            .iter()
            .map(|(k, v)| (k.as_str(), v.clone()))
            .collect();
        cartesian(&axes)
    }

    /// One series-equality task per grid point; `order` overrides the
    /// manifest's order when given.
    pub fn tasks(&self, order: Option<i64>) -> Vec<VerificationTask> {
        let order = order.unwrap_or(self.order);
        self.expand()
            .into_iter()
            .map(|params| {
                let (lhs, rhs, cfg, env) = (
                    self.lhs.clone(),
                    self.rhs.clone(),
                    self.config,
                    params.clone(),
                );
                VerificationTask::series_equality(self.name.clone(), params, order, move |t| {
                    Ok((
                        evaluate_with(&lhs, &env, t, cfg)?,
                        evaluate_with(&rhs, &env, t, cfg)?,
                    ))
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub checks: Vec<Check>,
}

impl Manifest {
    pub fn tasks(&self, order: Option<i64>) -> Vec<VerificationTask> {
        self.checks.iter().flat_map(|c| c.tasks(order)).collect()
    }
}

pub fn parse_manifest(text: &str) -> Result<Manifest, ManifestError> {
    let root: Table = text
        .parse()
        .map_err(|e: toml::de::Error| ManifestError::Syntax(e.message().to_string()))?;
    if let Some(key) = root.keys().find(|k| *k != "check") {
        return Err(ManifestError::Syntax(format!(
            "unexpected top-level key `{key}`"
        )));
    }
    let blocks = match root.get("check") {
        None => return Ok(Manifest { checks: Vec::new() }),
        Some(Value::Array(a)) => a,
        Some(_) => {
            return Err(ManifestError::Syntax(
                "`check` must be an array of tables ([[check]])".into(),
            ))
        }
    };
    let mut seen = BTreeSet::new();
    let mut checks = Vec::with_capacity(blocks.len());
    for (i, block) in blocks.iter().enumerate() {
        let check = parse_check(i + 1, block)?;
        if !seen.insert(check.name.clone()) {
            return Err(ManifestError::Duplicate(check.name));
        }
        checks.push(check);
    }
    Ok(Manifest { checks })
}

fn parse_check(index: usize, block: &Value) -> Result<Check, ManifestError> {
    let err = |name: &Option<String>, key: &str, reason: String| ManifestError::Key {
        index,
        name: name.clone(),
        key: key.to_string(),
        reason,
    };
    let Value::Table(t) = block else {
        return Err(err(&None, "check", "expected a table".into()));
    };
    let name = match t.get("name") {
        Some(Value::String(s)) if !s.is_empty() => Some(s.clone()),
        Some(_) => return Err(err(&None, "name", "expected a nonempty string".into())),
        None => return Err(err(&None, "name", "missing".into())),
    };
    const KEYS: [&str; 7] = ["name", "params", "lhs", "rhs", "order", "window", "budget"];
    if let Some(k) = t.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(err(&name, k, "unknown key".into()));
    }
    let int = |key: &str, required: bool| -> Result<Option<i64>, ManifestError> {
        match t.get(key) {
            Some(Value::Integer(n)) => Ok(Some(*n)),
            Some(_) => Err(err(&name, key, "expected an integer".into())),
            None if required => Err(err(&name, key, "missing".into())),
            None => Ok(None),
        }
    };
    let order = int("order", true)?.expect("required");
    if order < 0 {
        return Err(err(&name, "order", format!("must be >= 0, got {order}")));
    }
    let mut config = EvalConfig::default();
    if let Some(w) = int("window", false)? {
        config.window = u32::try_from(w)
            .ok()
            .filter(|w| *w > 0)
            .ok_or_else(|| err(&name, "window", "must be a positive integer".into()))?;
    }
    if let Some(b) = int("budget", false)? {
        if b <= 0 {
            return Err(err(&name, "budget", "must be a positive integer".into()));
        }
        config.budget = b;
    }
    let expr = |key: &str| -> Result<Expr, ManifestError> {
        match t.get(key) {
            Some(Value::String(s)) => parse_str(s).map_err(|e| err(&name, key, e.to_string())),
            Some(_) => Err(err(&name, key, "expected an expression string".into())),
            None => Err(err(&name, key, "missing".into())),
        }
    };
    let (lhs, rhs) = (expr("lhs")?, expr("rhs")?);
    let mut params = BTreeMap::new();
    match t.get("params") {
        None => {}
        Some(Value::Table(p)) => {
            for (k, v) in p {
                let key = format!("params.{k}");
                let values = param_values(v).map_err(|reason| err(&name, &key, reason))?;
                params.insert(k.clone(), values);
            }
        }
        Some(_) => return Err(err(&name, "params", "expected a table".into())),
    }
    Ok(Check {
        name: name.expect("checked above"),
        params,
        lhs,
        rhs,
        order,
        config,
    })
}

fn param_values(v: &Value) -> Result<Vec<i64>, String> {
    match v {
        Value::Integer(n) => Ok(vec![*n]),
        Value::String(s) => parse_range(s),
        Value::Array(a) => a
            .iter()
            .map(|x| {
                x.as_integer()
                    .ok_or_else(|| "list entries must be integers".to_string())
            })
            .collect(),
        _ => Err("expected an integer, a range \"a..b\" or a list of integers".into()),
    }
}

/// `"a..b"` (inclusive) or a single integer.
pub fn parse_range(s: &str) -> Result<Vec<i64>, String> {
    let bad = || format!("`{s}` is not an integer or a range a..b");
    match s.split_once("..") {
        Some((a, b)) => {
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let b: i64 = b.trim().parse().map_err(|_| bad())?;
            if a > b {
                return Err(format!("empty range `{s}`"));
            }
            Ok((a..=b).collect())
        }
        None => Ok(vec![s.trim().parse().map_err(|_| bad())?]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EULER: &str = r#"
[[check]]
name = "euler"
order = 80
lhs = "sum(n, 0, inf, q^(n^2)/poch(q, n)^2)"
rhs = "1/poch(q, inf)"
"#;

    #[test]
    fn single_check() {
        let m = parse_manifest(EULER).unwrap();
        assert_eq!(m.checks.len(), 1);
        assert_eq!(m.checks[0].order, 80);
        assert_eq!(m.tasks(None).len(), 1);
    }

    #[test]
    fn duplicate_names() {
        let text = format!("{EULER}{EULER}");
        assert_eq!(
            parse_manifest(&text).unwrap_err(),
            ManifestError::Duplicate("euler".into())
        );
    }

    #[test]
    fn grid_expansion() {
        let text = r#"
[[check]]
name = "grid"
order = 10
params = { M = "0..3", k = [1, 2] }
lhs = "q^M"
rhs = "q^M"
"#;
        let m = parse_manifest(text).unwrap();
        assert_eq!(m.checks[0].params["M"], vec![0, 1, 2, 3]);
        assert_eq!(m.checks[0].expand().len(), 8);
        let one = text.replace(", k = [1, 2]", "");
        assert_eq!(parse_manifest(&one).unwrap().tasks(None).len(), 4);
    }

    #[test]
    fn errors_name_block_and_key() {
        let text =
            format!("{EULER}\n[[check]]\nname = \"bad\"\norder = 5\nlhs = \"q$\"\nrhs = \"q\"\n");
        let e = parse_manifest(&text).unwrap_err();
        let ManifestError::Key {
            index, name, key, ..
        } = &e
        else {
            panic!("{e}")
        };
        assert_eq!(
            (*index, name.as_deref(), key.as_str()),
            (2, Some("bad"), "lhs")
        );
        assert!(e.to_string().contains("check #2 (`bad`)"));

        let missing = "[[check]]\nname = \"x\"\nlhs = \"q\"\nrhs = \"q\"\n";
        assert!(
            matches!(parse_manifest(missing), Err(ManifestError::Key { key, .. }) if key == "order")
        );
        let negative = "[[check]]\nname = \"x\"\norder = -1\nlhs = \"q\"\nrhs = \"q\"\n";
        assert!(parse_manifest(negative).is_err());
        assert!(matches!(
            parse_manifest("[[check]\n"),
            Err(ManifestError::Syntax(_))
        ));
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("2..4").unwrap(), vec![2, 3, 4]);
        assert_eq!(parse_range("-1..1").unwrap(), vec![-1, 0, 1]);
        assert_eq!(parse_range("7").unwrap(), vec![7]);
        assert!(parse_range("4..2").is_err());
        assert!(parse_range("a..2").is_err());
    }
}
