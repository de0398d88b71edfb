use std::collections::BTreeMap;

use rayon::prelude::*;

use qbailey_core::catalogue::{build, cartesian, lookup, run, VerificationTask};
use qbailey_core::dsl::{parse_manifest, parse_range};
use qbailey_core::VerificationReport;

use crate::{CliError, RunArgs};

const DEFAULT_ORDER: i64 = 40;

/// `NAME=VALUES` where VALUES is an integer or an inclusive range `a..b`.
pub fn parse_param(text: &str) -> Result<(String, Vec<i64>), CliError> {
    let (name, values) = text.split_once('=').ok_or_else(|| {
        CliError::Usage(format!("--param {text}: expected NAME=VALUE or NAME=A..B"))
    })?;
    let name = name.trim();
    if name.is_empty() {
        return Err(CliError::Usage(format!("--param {text}: empty name")));
    }
    let values =
        parse_range(values).map_err(|e| CliError::Usage(format!("--param {text}: {e}")))?;
    Ok((name.to_string(), values))
}

fn param_grid(raw: &[String]) -> Result<BTreeMap<String, Vec<i64>>, CliError> {
    let mut grid = BTreeMap::new();
    for p in raw {
        let (name, values) = parse_param(p)?;
        if grid.insert(name.clone(), values).is_some() {
            return Err(CliError::Usage(format!("parameter `{name}` given twice")));
        }
    }
    Ok(grid)
}

pub fn build_tasks(args: &RunArgs) -> Result<Vec<VerificationTask>, CliError> {
    if let Some(order) = args.order.filter(|o| *o < 0) {
        return Err(CliError::Usage(format!(
            "--order must be >= 0, got {order}"
        )));
    }
    let mut grid = param_grid(&args.params)?;
    match (&args.id, &args.manifest) {
        (Some(id), None) => {
            let entry =
                lookup(id).ok_or_else(|| CliError::Usage(format!("unknown identity id `{id}`")))?;
            for (flag, name, value) in [
                ("--k-cap", "K", args.k_cap),
                ("--n-max", "n_max", args.n_max),
            ] {
                let Some(v) = value else { continue };
                if !entry.params.iter().any(|p| p.name == name) {
                    return Err(CliError::Usage(format!("{flag} does not apply to {id}")));
                }
                if grid.insert(name.to_string(), vec![v]).is_some() {
                    return Err(CliError::Usage(format!(
                        "{flag} and --param {name} both given"
                    )));
                }
            }
            if let Some(unknown) = grid
                .keys()
                .find(|k| !entry.params.iter().any(|p| p.name == k.as_str()))
            {
                return Err(CliError::Usage(format!(
                    "{id} has no parameter `{unknown}`"
                )));
            }
            // unspecified required parameters range over their whole domain
            let axes: Vec<(&str, Vec<i64>)> = entry
                .params
                .iter()
                .filter_map(|p| match (grid.get(p.name), p.default) {
                    (Some(v), _) => Some((p.name, v.clone())),
                    (None, None) => Some((p.name, (p.min..=p.max).collect())),
                    (None, Some(_)) => None,
                })
                .collect();
            let order = args.order.unwrap_or(DEFAULT_ORDER);
            cartesian(&axes)
                .iter()
                .map(|ps| build(id, ps, order).map_err(|e| CliError::Usage(e.to_string())))
                .collect()
        }
        (None, Some(path)) => {
            if args.k_cap.is_some() || args.n_max.is_some() {
                return Err(CliError::Usage(
                    "--k-cap and --n-max apply to catalogue ids only".into(),
                ));
            }
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
                path: path.clone(),
                source,
            })?;
            let mut manifest = parse_manifest(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            for (name, values) in std::mem::take(&mut grid) {
                let mut used = false;
                for check in manifest
                    .checks
                    .iter_mut()
                    .filter(|c| c.params.contains_key(&name))
                {
                    check.params.insert(name.clone(), values.clone());
                    used = true;
                }
                if !used {
                    return Err(CliError::Usage(format!(
                        "no check in the manifest has parameter `{name}`"
                    )));
                }
            }
            Ok(manifest.tasks(args.order))
        }
        _ => Err(CliError::Usage(
            "give exactly one of --id and --manifest".into(),
        )),
    }
}

/// Run every task on `jobs` threads; reports come back sorted by `(id, params)`.
pub fn run_all(args: &RunArgs) -> Result<Vec<VerificationReport>, CliError> {
    let tasks = build_tasks(args)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = args.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be >= 1".into()));
        }
        pool = pool.num_threads(jobs);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker threads: {e}")))?;
    let mut reports: Vec<VerificationReport> = pool.install(|| tasks.par_iter().map(run).collect());
    reports.sort_by(|a, b| (&a.id, &a.params).cmp(&(&b.id, &b.params)));
    Ok(reports)
}
