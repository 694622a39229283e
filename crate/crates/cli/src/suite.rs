//! Runs every section of a config and writes a summary.

use std::fs;
use std::path::Path;
use std::thread;

use bregprox::numeric::derive_seed;

use crate::config::{Config, Section};
use crate::csv::Table;
use crate::experiment::{self, CliError, Kind, Outcome};
use crate::write_outcome;

fn kind_of(s: &Section) -> Result<Kind, CliError> {
    s.raw("kind")
        .ok_or_else(|| CliError::Config(format!("[{}] missing key `kind`", s.name)))?
        .parse()
}

fn status(r: &Result<Outcome, CliError>) -> &'static str {
    match r {
        Ok(o) => match o.passed {
            Some(true) => "pass",
            Some(false) => "fail",
            None => "done",
        },
        Err(_) => "error",
    }
}

/// Validates every section first, so a config error stops the suite before
/// anything runs. Returns whether every experiment passed.
pub fn run_suite(cfg: &Config, seed: u64, tol: Option<f64>, out: &Path) -> Result<bool, CliError> {
    let mut jobs = Vec::new();
    for s in cfg.experiments() {
        let kind = kind_of(s)?;
        let mut s = s.clone();
        if let Some(t) = tol {
            s.set("tol", t.to_string());
        }
        let sub = derive_seed(seed, &s.name);
        experiment::validate(kind, &s, sub).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("[{}] {m}", s.name)),
            other => other,
        })?;
        jobs.push((kind, s, sub));
    }
    if jobs.is_empty() {
        return Err(CliError::Config("the config has no experiment sections".into()));
    }
    fs::create_dir_all(out)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", out.display())))?;

    let results: Vec<Result<Outcome, CliError>> = thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|(kind, s, sub)| {
                scope.spawn(move || {
                    let r = experiment::run(*kind, s, *sub);
                    if let Ok(o) = &r {
                        write_outcome(o, Some(out), &format!("{}_", s.name))?;
                    }
                    r
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(CliError::Runtime("experiment panicked".into()))))
            .collect()
    });

    let mut summary = Table::new(&["experiment", "kind", "status", "detail"]);
    let mut all = true;
    for ((kind, s, _), r) in jobs.iter().zip(&results) {
        let st = status(r);
        all &= st == "pass" || st == "done";
        let detail = match r {
            Ok(o) => o.detail.clone(),
            Err(e) => e.to_string(),
        };
        println!("{:<30} {:<10} {:<5} {detail}", s.name, kind.as_str(), st);
        summary.push(vec![
            s.name.clone(),
            kind.as_str().to_string(),
            st.to_string(),
            detail.replace([',', '\n'], ";"),
        ]);
    }
    let path = out.join("summary.csv");
    summary
        .write(&path)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
    Ok(all)
}
