//! Scenario fan-out, summary and manifest writing, exit-code policy.

use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::{parse_config, Config, Scenario};
use crate::error::{CliError, EXIT_OK, EXIT_VERIFY};
use crate::report::{Assertion, ScenarioOutcome};
use crate::scenarios::run_scenario;

pub const SUMMARY_FILE: &str = "summary.json";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub verify: bool,
    pub jobs: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioRecord {
    pub id: String,
    pub kind: String,
    pub input_hash: String,
    pub started: String,
    pub finished: String,
    /// `pass`, `fail` or `error`.
    pub status: String,
    pub error: Option<String>,
    pub files: Vec<String>,
    pub assertions: Vec<Assertion>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub config: String,
    pub input_hash: String,
    pub started: String,
    pub finished: String,
    pub verify: bool,
    pub jobs: usize,
    pub exit_code: i32,
    pub scenarios: Vec<ScenarioRecord>,
    /// Every file written by the run, the manifest included.
    pub files: Vec<String>,
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

struct Executed {
    started: String,
    finished: String,
    result: Result<ScenarioOutcome, CliError>,
}

fn execute(scenario: &Scenario, out_dir: &Path) -> Executed {
    let started = now();
    let result = run_scenario(scenario, out_dir);
    Executed {
        started,
        finished: now(),
        result,
    }
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("report values serialize");
    std::fs::write(path, text + "\n").map_err(|e| CliError::io(path.display(), e))
}

/// Parses `config_path` and runs every scenario.
pub fn run_file(config_path: &Path, options: &RunOptions) -> Result<RunManifest, CliError> {
    let config = parse_config(config_path)?;
    run_config(&config, &config_path.display().to_string(), options)
}

/// Runs the scenarios on a pool of `jobs` workers and writes the summary and
/// manifest. The manifest's exit code is 3 on any numerical failure, else 4
/// for a failed assertion under `verify`, else 0.
pub fn run_config(
    config: &Config,
    label: &str,
    options: &RunOptions,
) -> Result<RunManifest, CliError> {
    let out = &options.out_dir;
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out.display(), e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.jobs.max(1))
        .build()
        .map_err(|e| CliError::Io(format!("cannot start worker pool: {e}")))?;
    let started = now();
    let executed: Vec<Executed> = pool.install(|| {
        config
            .scenarios
            .par_iter()
            .map(|s| execute(s, out))
            .collect()
    });
    let finished = now();

    let mut exit_code = EXIT_OK;
    let mut summary = Vec::with_capacity(executed.len());
    let mut records = Vec::with_capacity(executed.len());
    for (scenario, run) in config.scenarios.iter().zip(executed) {
        let (outcome, status, error) = match run.result {
            Ok(outcome) => {
                let status = if outcome.pass { "pass" } else { "fail" };
                if !outcome.pass && options.verify && exit_code == EXIT_OK {
                    exit_code = EXIT_VERIFY;
                }
                (outcome, status, None)
            }
            Err(e) => {
                if exit_code == EXIT_OK || exit_code == EXIT_VERIFY {
                    exit_code = e.exit_code();
                }
                let mut metrics = Map::new();
                metrics.insert("error".into(), Value::String(e.to_string()));
                let outcome = ScenarioOutcome {
                    id: scenario.id.clone(),
                    kind: scenario.kind().to_string(),
                    pass: false,
                    metrics,
                    files: Vec::new(),
                    assertions: Vec::new(),
                };
                (outcome, "error", Some(e.to_string()))
            }
        };
        eprintln!("{:<28} {:<10} {status}", outcome.id, outcome.kind);
        for a in outcome.assertions.iter().filter(|a| !a.pass) {
            eprintln!("    failed {}: {:e} (limit {})", a.name, a.value, a.limit);
        }
        records.push(ScenarioRecord {
            id: outcome.id.clone(),
            kind: outcome.kind.clone(),
            input_hash: scenario.input_hash.clone(),
            started: run.started,
            finished: run.finished,
            status: status.to_string(),
            error,
            files: outcome.files.clone(),
            assertions: outcome.assertions.clone(),
        });
        summary.push(outcome);
    }

    write_json(&out.join(SUMMARY_FILE), &summary)?;
    let mut files: Vec<String> = records
        .iter()
        .flat_map(|r| r.files.iter().cloned())
        .collect();
    files.push(SUMMARY_FILE.into());
    files.push(MANIFEST_FILE.into());
    let manifest = RunManifest {
        config: label.to_string(),
        input_hash: config.input_hash.clone(),
        started,
        finished,
        verify: options.verify,
        jobs: options.jobs.max(1),
        exit_code,
        scenarios: records,
        files,
    };
    write_json(&out.join(MANIFEST_FILE), &manifest)?;
    Ok(manifest)
}
