//! One runner per scenario kind. Each writes its CSV files through the
//! [`Recorder`] and registers its assertions there.

mod compose;
mod disk;
mod halfplane;
mod penalty;
mod spectrum;
mod trotter;

use std::path::Path;

use bc_core::BoundaryUnitary;

use crate::config::{Scenario, ScenarioBody};
use crate::error::CliError;
use crate::preset::BoundarySpec;
use crate::report::{Recorder, ScenarioOutcome};

pub fn run_scenario(scenario: &Scenario, out_dir: &Path) -> Result<ScenarioOutcome, CliError> {
    let mut rec = Recorder::new(&scenario.id, out_dir);
    match &scenario.body {
        ScenarioBody::Compose(s) => compose::run(&mut rec, s)?,
        ScenarioBody::Spectrum(s) => spectrum::run(&mut rec, s)?,
        ScenarioBody::Trotter(s) => trotter::run(&mut rec, s)?,
        ScenarioBody::Penalty(s) => penalty::run(&mut rec, s)?,
        ScenarioBody::Disk(s) => disk::run(&mut rec, s)?,
        ScenarioBody::Halfplane(s) => halfplane::run(&mut rec, s)?,
    }
    Ok(rec.finish(scenario.kind()))
}

/// Wraps a core error with the scenario id.
pub(crate) fn numerical(id: &str) -> impl Fn(bc_core::Error) -> CliError + '_ {
    move |source| CliError::Numerical {
        id: id.to_string(),
        source,
    }
}

pub(crate) fn resolve(
    spec: &BoundarySpec,
    field: &str,
    dim: usize,
) -> Result<BoundaryUnitary<f64>, CliError> {
    spec.resolve(field, dim).map_err(CliError::Parse)
}

pub(crate) fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values
        .into_iter()
        .fold(0.0, |acc, x| if x > acc || x.is_nan() { x } else { acc })
}
