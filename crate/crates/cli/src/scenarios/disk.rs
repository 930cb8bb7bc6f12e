use bc_core::disk_cavity::{
    dirichlet_decompose, disk_spectrum, harmonic_extension, lambda_lift, laplacian_residual,
    mode_gap_check, modewise_compose, radial_spectrum, sobolev_norm, BoundaryModeVector,
    DiskModeModel, DiskState, ModeCondition,
};
use bc_core::{compose, reference};
use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{max_of, numerical};
use crate::config::DiskSpec;
use crate::error::CliError;
use crate::report::{num, Assertion, Recorder, SPECTRUM_HEADER};

const MODES_HEADER: [&str; 4] = ["scenario_id", "m", "index", "eigenvalue"];
const DECOMPOSITION_MODES: usize = 4;
const RESIDUAL_MODES: usize = 8;

fn model(
    spec: &bc_core::disk_cavity::DiskModelSpec,
    field: &str,
) -> Result<DiskModeModel<f64>, CliError> {
    DiskModeModel::from_spec(spec).map_err(|e| CliError::Parse(format!("field {field}: {e}")))
}

pub fn run(rec: &mut Recorder, spec: &DiskSpec) -> Result<(), CliError> {
    let id = rec.id().to_string();
    let err = numerical(&id);
    let m1 = model(&spec.model1, "model1")?;
    let m2 = model(&spec.model2, "model2")?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed.unwrap_or(0));

    let composed = modewise_compose(&m1, &m2).map_err(&err)?;
    let by_matrix = compose(
        &m1.boundary_unitary().map_err(&err)?,
        &m2.boundary_unitary().map_err(&err)?,
    )
    .map_err(&err)?;
    let compose_defect =
        (composed.boundary_unitary().map_err(&err)?.matrix() - by_matrix.matrix()).norm();
    rec.metric("modes", 2 * composed.m_max() + 1);
    rec.metric("compose_defect", compose_defect);
    rec.metric("gap_model1", mode_gap_check(&m1));
    rec.metric("gap_model2", mode_gap_check(&m2));
    rec.metric("gap_composed", mode_gap_check(&composed));
    rec.assert(Assertion::at_most(
        "compose_defect",
        compose_defect,
        spec.compose_tol,
    ));

    let lift_defect = max_of((0..spec.lift_samples).map(|_| {
        let coefficients = (0..=2 * composed.m_max())
            .map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let g = BoundaryModeVector::<f64>::new(composed.m_max(), coefficients, 0.5)
            .expect("finite coefficients");
        let rhs = sobolev_norm(&g, 0.5);
        (sobolev_norm(&lambda_lift(&g), -0.5) - rhs).abs() / rhs.max(1.0)
    }));
    rec.metric("lift_defect", lift_defect);
    rec.assert(Assertion::at_most(
        "lift_defect",
        lift_defect,
        spec.lift_tol,
    ));

    let phases: Vec<(f64, f64)> = (0..=2 * DECOMPOSITION_MODES)
        .map(|_| (rng.random_range(0.5..3.0), rng.random_range(-1.0..1.0)))
        .collect();
    let psi = DiskState::from_fn(spec.residual_grids[0], DECOMPOSITION_MODES, |m, r: f64| {
        let (a, b) = phases[(m + DECOMPOSITION_MODES as i64) as usize];
        Complex::new((a * r).sin() + b, b * r * r)
    })
    .map_err(&err)?;
    let split = dirichlet_decompose(&psi);
    let trace_zero = split
        .regular
        .trace()
        .coefficients()
        .iter()
        .all(|c| c.re == 0.0 && c.im == 0.0);
    let repeated = dirichlet_decompose(&split.regular).harmonic.max_abs();
    rec.metric("regular_trace_zero", trace_zero);
    rec.metric("repeated_harmonic_part", repeated);
    rec.assert(Assertion::holds("regular_trace_zero", trace_zero));
    rec.assert(Assertion::at_most(
        "repeated_harmonic_part",
        repeated,
        1e-12,
    ));

    let g = BoundaryModeVector::from_fn(RESIDUAL_MODES, 0.5, |m| {
        Complex::new(1.0 / (1.0 + (m * m) as f64), 0.0)
    })
    .map_err(&err)?;
    let [coarse_cells, fine_cells] = spec.residual_grids;
    let coarse = laplacian_residual(&harmonic_extension(&g, coarse_cells).map_err(&err)?);
    let fine = laplacian_residual(&harmonic_extension(&g, fine_cells).map_err(&err)?);
    let expected_ratio = (fine_cells as f64 / coarse_cells as f64).powi(2);
    let h2 = (1.0 / fine_cells as f64).powi(2);
    let mut ratios = Vec::new();
    let mut constants = Vec::new();
    for ((m, rc), (_, rf)) in coarse.iter().zip(&fine) {
        if *rc > 1e-10 {
            ratios.push((*m, rc / rf));
            constants.push((*m, rf / h2));
        }
    }
    rec.metric("residual_ratios", &ratios);
    rec.metric("residual_constants", &constants);
    for (m, r) in &ratios {
        rec.assert(Assertion::within(
            format!("residual_ratio_m{m}"),
            *r,
            expected_ratio,
            expected_ratio * spec.ratio_band,
        ));
    }

    let top = spec.bessel_modes.iter().copied().max().unwrap_or(0) as usize;
    let dirichlet = DiskModeModel::uniform(
        top,
        ModeCondition::Dirichlet,
        spec.bessel_grid,
        composed.mass(),
    )
    .map_err(&err)?;
    let mut bessel_rows = Vec::new();
    for &m in &spec.bessel_modes {
        let e = radial_spectrum(&dirichlet, m as i64, 1).map_err(&err)?[0];
        let r = reference::disk_dirichlet(m, 1, composed.mass()).map_err(&err)?[0];
        let rel = (e - r).abs() / r;
        bessel_rows.push(vec![id.clone(), m.to_string(), num(e), num(r), num(rel)]);
        rec.metric(&format!("bessel_m{m}"), [e, r]);
        rec.assert(Assertion::at_most(
            format!("bessel_rel_error_m{m}"),
            rel,
            spec.rel_tol,
        ));
    }
    rec.csv("", &SPECTRUM_HEADER, &bessel_rows)?;

    let spectrum = disk_spectrum(&composed, 2).map_err(&err)?;
    let mode_rows: Vec<Vec<String>> = spectrum
        .iter()
        .flat_map(|(m, values)| {
            let id = &id;
            values
                .iter()
                .enumerate()
                .map(move |(i, &e)| vec![id.clone(), m.to_string(), i.to_string(), num(e)])
        })
        .collect();
    rec.csv("_modes", &MODES_HEADER, &mode_rows)?;
    Ok(())
}
