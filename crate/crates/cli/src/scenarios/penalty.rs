use bc_core::interval_cavity::StateVector;
use bc_core::trotter_engine::{
    penalty_dirichlet, AveragingWindow, PenaltySettings, SweepSettings, DEFAULT_CENTER,
    DEFAULT_WIDTH,
};

use super::numerical;
use super::resolve;
use super::trotter::trotter_rows;
use crate::config::PenaltySpec;
use crate::error::CliError;
use crate::report::{num, Assertion, Recorder, TROTTER_HEADER};

const PENALTY_HEADER: [&str; 6] = [
    "scenario_id",
    "lambda",
    "index",
    "composed",
    "dirichlet",
    "rel_error",
];

pub fn run(rec: &mut Recorder, spec: &PenaltySpec) -> Result<(), CliError> {
    let id = rec.id().to_string();
    let err = numerical(&id);
    let partner = resolve(&spec.partner, "partner", 2)?;
    let psi0 = StateVector::gaussian(spec.grid, DEFAULT_CENTER, DEFAULT_WIDTH);
    let settings = PenaltySettings {
        cells: spec.grid,
        mass: spec.mass,
        eigen_count: spec.count,
        sweep: spec.sweep.as_ref().map(|s| SweepSettings {
            t: s.t,
            n_values: s.n_values.clone(),
            window: AveragingWindow {
                window: s.window.unwrap_or(2.0 * s.t),
                samples: s.samples,
            },
        }),
    };
    let reports = penalty_dirichlet(&spec.lambdas, &partner, &psi0, &settings).map_err(&err)?;

    let rows: Vec<Vec<String>> = reports
        .iter()
        .flat_map(|r| {
            let id = &id;
            (0..r.composed_eigenvalues.len()).map(move |i| {
                vec![
                    id.clone(),
                    num(r.lambda),
                    i.to_string(),
                    num(r.composed_eigenvalues[i]),
                    num(r.dirichlet_eigenvalues[i]),
                    num(r.relative_errors[i]),
                ]
            })
        })
        .collect();
    rec.csv("", &PENALTY_HEADER, &rows)?;
    for (i, r) in reports.iter().enumerate() {
        if let Some(sweep) = &r.sweep {
            rec.csv(
                &format!("_trotter_{i}"),
                &TROTTER_HEADER,
                &trotter_rows(&id, sweep),
            )?;
        }
    }

    let errors: Vec<f64> = reports.iter().map(|r| r.max_relative_error).collect();
    let monotone = errors.windows(2).all(|w| w[1] < w[0]);
    let last = errors.last().copied().unwrap_or(f64::NAN);
    rec.metric("max_relative_errors", &errors);
    rec.metric(
        "dirichlet_eigenvalues",
        reports.first().map(|r| r.dirichlet_eigenvalues.clone()),
    );
    rec.assert(Assertion::holds("monotone_decrease", monotone));
    rec.assert(Assertion::at_most(
        "final_relative_error",
        last,
        spec.final_tol,
    ));
    Ok(())
}
