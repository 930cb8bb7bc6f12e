use bc_core::compose;
use bc_core::interval_cavity::build_cavity;
use bc_core::interval_cavity::StateVector;
use bc_core::trotter_engine::{convergence_sweep, AveragingWindow, TrotterReport};

use super::{max_of, numerical, resolve};
use crate::config::TrotterSpec;
use crate::error::CliError;
use crate::report::{num, Assertion, Recorder, TROTTER_HEADER};

pub(crate) fn trotter_rows(id: &str, report: &TrotterReport<f64>) -> Vec<Vec<String>> {
    let order = report.fitted_order.map(num).unwrap_or_default();
    report
        .n_values
        .iter()
        .zip(
            report
                .pointwise_errors
                .iter()
                .zip(&report.time_averaged_errors),
        )
        .map(|(n, (&p, &a))| {
            vec![
                id.to_string(),
                n.to_string(),
                num(report.t),
                num(p),
                num(a),
                order.clone(),
            ]
        })
        .collect()
}

/// Largest decrease factor of the averaged error, normalised to one
/// doubling of `N`.
pub(crate) fn worst_doubling_ratio(report: &TrotterReport<f64>) -> f64 {
    let e = &report.time_averaged_errors;
    let n = &report.n_values;
    max_of(
        (1..e.len()).map(|i| (e[i] / e[i - 1]).powf(1.0 / (n[i] as f64 / n[i - 1] as f64).log2())),
    )
}

pub fn run(rec: &mut Recorder, spec: &TrotterSpec) -> Result<(), CliError> {
    let id = rec.id().to_string();
    let err = numerical(&id);
    let u1 = resolve(&spec.u1, "u1", 2)?;
    let u2 = resolve(&spec.u2, "u2", 2)?;
    let w = compose(&u1, &u2).map_err(&err)?;
    let c1 = build_cavity(&u1, spec.grid, spec.mass).map_err(&err)?;
    let c2 = build_cavity(&u2, spec.grid, spec.mass).map_err(&err)?;
    let cw = build_cavity(&w, spec.grid, spec.mass).map_err(&err)?;
    let psi0 = StateVector::gaussian(spec.grid, spec.center, spec.width);
    let window = AveragingWindow {
        window: spec.window.unwrap_or(2.0 * spec.t),
        samples: spec.samples,
    };
    let report =
        convergence_sweep(&psi0, spec.t, &spec.n_values, &c1, &c2, &cw, window).map_err(&err)?;
    rec.csv("", &TROTTER_HEADER, &trotter_rows(&id, &report))?;

    let order = report.fitted_order.unwrap_or(f64::NAN);
    let ratio = worst_doubling_ratio(&report);
    rec.metric("fitted_order", report.fitted_order);
    rec.metric("worst_doubling_ratio", ratio);
    rec.metric("pointwise_errors", &report.pointwise_errors);
    rec.metric("time_averaged_errors", &report.time_averaged_errors);
    rec.assert(Assertion::within(
        "fitted_order",
        order,
        spec.order_target,
        spec.order_tol,
    ));
    rec.assert(Assertion::at_most(
        "worst_doubling_ratio",
        ratio,
        spec.avg_ratio_max,
    ));
    if let Some(tol) = spec.tolerance {
        let last = report.pointwise_errors.last().copied().unwrap_or(f64::NAN);
        rec.assert(Assertion::at_most("final_pointwise_error", last, tol));
    }
    Ok(())
}
