use bc_core::boundary_algebra::{classify, BoundaryClass, DEFAULT_CLUSTER_TOL};
use bc_core::interval_cavity::build_cavity;
use bc_core::{decompose, reference, BoundaryUnitary};

use super::{max_of, numerical, resolve};
use crate::config::SpectrumSpec;
use crate::error::CliError;
use crate::report::{num, Assertion, Recorder, SPECTRUM_HEADER};

/// Closed-form or root-finding reference for the classes that have one.
fn reference_for(
    u: &BoundaryUnitary<f64>,
    count: usize,
    mass: f64,
) -> bc_core::Result<Option<Vec<f64>>> {
    Ok(match classify(u)? {
        BoundaryClass::Dirichlet => Some(reference::interval_dirichlet(count, mass)),
        BoundaryClass::Neumann => Some(reference::interval_neumann(count, mass)),
        BoundaryClass::PeriodicType
            if (u.matrix() - BoundaryUnitary::periodic().matrix()).norm() <= 1e-10 =>
        {
            Some(reference::interval_periodic(count, mass))
        }
        BoundaryClass::Robin => {
            let k = decompose(u, DEFAULT_CLUSTER_TOL)?.k;
            let (k0, k1) = (k[(0, 0)].re, k[(1, 1)].re);
            if (k0 - k1).abs() <= 1e-12 * (1.0 + k0.abs()) && k0 >= 0.0 {
                Some(reference::interval_robin_symmetric(k0, count, mass)?)
            } else {
                None
            }
        }
        _ => None,
    })
}

/// Relative error, or absolute error against a zero reference.
fn error_of(e: f64, r: f64) -> f64 {
    if r == 0.0 {
        e.abs()
    } else {
        (e - r).abs() / r.abs()
    }
}

fn rows(id: &str, eigen: &[f64], refs: Option<&[f64]>) -> Vec<Vec<String>> {
    eigen
        .iter()
        .enumerate()
        .map(|(i, &e)| match refs {
            Some(r) => vec![
                id.to_string(),
                i.to_string(),
                num(e),
                num(r[i]),
                num(error_of(e, r[i])),
            ],
            None => vec![
                id.to_string(),
                i.to_string(),
                num(e),
                String::new(),
                String::new(),
            ],
        })
        .collect()
}

pub fn run(rec: &mut Recorder, spec: &SpectrumSpec) -> Result<(), CliError> {
    let id = rec.id().to_string();
    let err = numerical(&id);
    let u = resolve(&spec.u, "u", 2)?;
    let eigen = build_cavity(&u, spec.grid, spec.mass)
        .map_err(&err)?
        .spectrum(spec.count)
        .map_err(&err)?;
    let refs = reference_for(&u, spec.count, spec.mass).map_err(&err)?;
    rec.metric("class", classify(&u).map_err(&err)?.to_string());
    rec.metric("eigenvalues", &eigen);
    rec.csv("", &SPECTRUM_HEADER, &rows(&id, &eigen, refs.as_deref()))?;

    let Some(refs) = refs else {
        return Ok(());
    };
    rec.metric("reference", &refs);
    let pairs = || eigen.iter().zip(&refs);
    let rel = max_of(
        pairs()
            .filter(|(_, &r)| r != 0.0)
            .map(|(&e, &r)| error_of(e, r)),
    );
    rec.metric("max_rel_error", rel);
    rec.assert(Assertion::at_most("max_rel_error", rel, spec.rel_tol));
    if refs.contains(&0.0) {
        let zero = max_of(pairs().filter(|(_, &r)| r == 0.0).map(|(&e, _)| e.abs()));
        rec.metric("zero_mode_error", zero);
        rec.assert(Assertion::at_most("zero_mode_error", zero, spec.zero_tol));
    }
    let doublets: Vec<f64> = (1..refs.len())
        .filter(|&i| refs[i] != 0.0 && refs[i] == refs[i - 1])
        .map(|i| (eigen[i] - eigen[i - 1]).abs() / eigen[i].abs())
        .collect();
    if !doublets.is_empty() {
        let split = max_of(doublets);
        rec.metric("doublet_split", split);
        rec.assert(Assertion::at_most("doublet_split", split, spec.rel_tol));
    }

    if spec.refine {
        let fine = build_cavity(&u, 2 * spec.grid, spec.mass)
            .map_err(&err)?
            .spectrum(spec.count)
            .map_err(&err)?;
        rec.csv("_refined", &SPECTRUM_HEADER, &rows(&id, &fine, Some(&refs)))?;
        let ratios: Vec<f64> = (0..refs.len())
            .filter(|&i| refs[i] != 0.0)
            .map(|i| (eigen[i] - refs[i]).abs() / (fine[i] - refs[i]).abs())
            .collect();
        rec.metric("refinement_ratios", &ratios);
        for (i, &r) in ratios.iter().enumerate() {
            rec.assert(Assertion::within(
                format!("refinement_ratio_{i}"),
                r,
                4.0,
                4.0 * spec.ratio_band,
            ));
        }
    }
    Ok(())
}
