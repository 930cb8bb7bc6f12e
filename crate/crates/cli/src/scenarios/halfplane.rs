use bc_core::disk_cavity::halfplane_boundary_demo;

use super::numerical;
use crate::config::HalfplaneSpec;
use crate::error::CliError;
use crate::report::{num, Assertion, Recorder};

const HALFPLANE_HEADER: [&str; 5] = ["scenario_id", "y", "re", "im", "error"];

pub fn run(rec: &mut Recorder, spec: &HalfplaneSpec) -> Result<(), CliError> {
    let id = rec.id().to_string();
    let err = numerical(&id);
    let f = spec.function;
    let demo = halfplane_boundary_demo(move |x: f64| f.eval(x), &spec.y_values, spec.support)
        .map_err(&err)?;
    let rows: Vec<Vec<String>> = demo
        .y_values
        .iter()
        .zip(demo.integrals.iter().zip(&demo.errors))
        .map(|(&y, (z, &e))| vec![id.clone(), num(y), num(z.re), num(z.im), num(e)])
        .collect();
    rec.csv("", &HALFPLANE_HEADER, &rows)?;

    let limit_error = (demo.extrapolated_limit - demo.reference).norm();
    rec.metric("reference", [demo.reference.re, demo.reference.im]);
    rec.metric(
        "extrapolated_limit",
        [demo.extrapolated_limit.re, demo.extrapolated_limit.im],
    );
    rec.metric("limit_error", limit_error);
    rec.metric("observed_slope", demo.observed_slope);
    rec.assert(Assertion::at_most(
        "limit_error",
        limit_error,
        spec.limit_tol,
    ));
    if let Some(slope) = spec.expected_slope {
        let observed = demo.observed_slope.unwrap_or(f64::NAN);
        rec.assert(Assertion::within(
            "observed_slope",
            observed,
            slope,
            spec.slope_tol,
        ));
    }
    Ok(())
}
