//! Acceptance suite: one line per criterion, driven by the default config.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use bc_compose::{parse_config, run_config, Config, RunOptions};

struct Criterion {
    number: u32,
    name: &'static str,
    scenarios: &'static [&'static str],
    budget: Duration,
}

const CRITERIA: [Criterion; 7] = [
    Criterion {
        number: 1,
        name: "composition-algebra suite",
        scenarios: &["algebra-suite"],
        budget: Duration::from_secs(5),
    },
    Criterion {
        number: 2,
        name: "spectral oracles",
        scenarios: &[
            "spectrum-dirichlet",
            "spectrum-neumann",
            "spectrum-robin",
            "spectrum-periodic",
        ],
        budget: Duration::from_secs(30),
    },
    Criterion {
        number: 3,
        name: "composition-law operator identity",
        scenarios: &["operator-identity"],
        budget: Duration::from_secs(20),
    },
    Criterion {
        number: 4,
        name: "trotter convergence",
        scenarios: &["trotter-robin"],
        budget: Duration::from_secs(60),
    },
    Criterion {
        number: 5,
        name: "penalty-dirichlet route",
        scenarios: &["penalty-dirichlet"],
        budget: Duration::from_secs(60),
    },
    Criterion {
        number: 6,
        name: "disk mode suite",
        scenarios: &["disk-modes"],
        budget: Duration::from_secs(60),
    },
    Criterion {
        number: 7,
        name: "half-plane distribution demo",
        scenarios: &["halfplane-gaussian"],
        budget: Duration::from_secs(10),
    },
];

const END_TO_END_BUDGET: Duration = Duration::from_secs(300);

fn line(pass: bool, number: u32, name: &str, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[{tag}] {number} {name}: {detail}");
}

fn check(config: &Config, c: &Criterion, out: &Path) -> bool {
    let subset = Config {
        scenarios: config
            .scenarios
            .iter()
            .filter(|s| c.scenarios.contains(&s.id.as_str()))
            .cloned()
            .collect(),
        input_hash: config.input_hash.clone(),
    };
    assert_eq!(
        subset.scenarios.len(),
        c.scenarios.len(),
        "default config lacks a scenario"
    );
    let options = RunOptions {
        out_dir: out.join(format!("criterion-{}", c.number)),
        verify: true,
        jobs: 1,
    };
    let start = Instant::now();
    let manifest = match run_config(&subset, "default", &options) {
        Ok(m) => m,
        Err(e) => {
            line(false, c.number, c.name, &format!("run failed: {e}"));
            return false;
        }
    };
    let elapsed = start.elapsed();
    let mut notes = Vec::new();
    for s in &manifest.scenarios {
        if let Some(e) = &s.error {
            notes.push(format!("{}: {e}", s.id));
        }
        for a in &s.assertions {
            if !a.pass {
                notes.push(format!(
                    "{} {} = {:e} (want {})",
                    s.id, a.name, a.value, a.limit
                ));
            }
        }
    }
    let count: usize = manifest.scenarios.iter().map(|s| s.assertions.len()).sum();
    let in_budget = elapsed < c.budget;
    let pass = manifest.exit_code == 0 && notes.is_empty() && in_budget;
    let mut detail = format!(
        "{count} assertions, {:.2} s (budget {} s)",
        elapsed.as_secs_f64(),
        c.budget.as_secs()
    );
    if !notes.is_empty() {
        detail.push_str("; ");
        detail.push_str(&notes.join("; "));
    }
    line(pass, c.number, c.name, &detail);
    pass
}

fn end_to_end(config: &Path, out: &Path) -> bool {
    let start = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_bc-compose"))
        .arg("run")
        .arg(config)
        .arg("--out")
        .arg(out.join("end-to-end"))
        .arg("--verify")
        .env_remove("BC_COMPOSE_JOBS")
        .output();
    let elapsed = start.elapsed();
    let (pass, detail) = match status {
        Ok(o) => {
            let code = o.status.code().unwrap_or(-1);
            (
                code == 0 && elapsed < END_TO_END_BUDGET,
                format!(
                    "exit {code}, {:.2} s (budget {} s)",
                    elapsed.as_secs_f64(),
                    END_TO_END_BUDGET.as_secs()
                ),
            )
        }
        Err(e) => (false, format!("cannot start binary: {e}")),
    };
    line(pass, 8, "end-to-end default config with --verify", &detail);
    pass
}

fn main() -> ExitCode {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/default.json");
    let config = parse_config(&path).expect("default config parses");
    let out = tempfile::tempdir().expect("temporary directory");
    let mut failed = 0;
    for c in &CRITERIA {
        if !check(&config, c, out.path()) {
            failed += 1;
        }
    }
    if !end_to_end(&path, out.path()) {
        failed += 1;
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
