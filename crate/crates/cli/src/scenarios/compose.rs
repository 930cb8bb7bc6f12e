use bc_core::boundary_algebra::{cayley, inverse_cayley, validate_unitary, DEFAULT_CLUSTER_TOL};
use bc_core::interval_cavity::{build_cavity, form_sum, matrix_to_rows, verify_representation};
use bc_core::sampling::{random_gapped_unitary, random_hermitian};
use bc_core::scalar::cx;
use bc_core::{classify, compose, decompose, BoundaryUnitary, CMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{max_of, numerical, resolve};
use crate::config::{ComposeSpec, OperatorCheck, RandomSuite};
use crate::error::CliError;
use crate::report::{num, Assertion, Recorder, COMPOSE_HEADER};

const SUITE_HEADER: [&str; 10] = [
    "scenario_id",
    "sample",
    "dim",
    "rank",
    "cayley",
    "round_trip",
    "commutativity",
    "idempotence",
    "dirichlet_absorption",
    "neumann_halving",
];

pub fn run(rec: &mut Recorder, spec: &ComposeSpec) -> Result<(), CliError> {
    let id = rec.id().to_string();
    let err = numerical(&id);
    let u1 = resolve(&spec.u1, "u1", spec.dim)?;
    let u2 = resolve(&spec.u2, "u2", spec.dim)?;
    let w = compose(&u1, &u2).map_err(&err)?;
    let swapped = compose(&u2, &u1).map_err(&err)?;
    let unitarity = validate_unitary(w.matrix(), 0.0).map_err(&err)?.defect;
    let commutativity = (w.matrix() - swapped.matrix()).norm();

    rec.metric("W", matrix_to_rows(w.matrix()));
    rec.metric("class", classify(&w).map_err(&err)?.to_string());
    rec.metric("unitarity_defect", unitarity);
    rec.metric("commutativity_defect", commutativity);
    rec.assert(Assertion::at_most(
        "unitarity_defect",
        unitarity,
        spec.defect_tol,
    ));
    rec.assert(Assertion::at_most(
        "commutativity_defect",
        commutativity,
        spec.defect_tol,
    ));
    if let Some(expected) = &spec.expected {
        let e = resolve(expected, "expected", spec.dim)?;
        let defect = (w.matrix() - e.matrix()).norm();
        rec.metric("expected_defect", defect);
        rec.assert(Assertion::at_most(
            "expected_defect",
            defect,
            spec.defect_tol,
        ));
    }
    let rows: Vec<Vec<String>> = (0..w.dim())
        .flat_map(|r| (0..w.dim()).map(move |c| (r, c)))
        .map(|(r, c)| {
            let z = w.matrix()[(r, c)];
            vec![
                id.clone(),
                r.to_string(),
                c.to_string(),
                num(z.re),
                num(z.im),
            ]
        })
        .collect();
    rec.csv("", &COMPOSE_HEADER, &rows)?;

    let seed = spec.seed.unwrap_or(0);
    if let Some(suite) = &spec.random {
        random_suite(rec, suite, seed)?;
    }
    if let Some(check) = &spec.operator_check {
        operator_check(rec, check, seed)?;
    }
    Ok(())
}

struct SuiteRow {
    dim: usize,
    rank: usize,
    defects: [f64; 6],
}

fn eye(n: usize) -> CMatrix<f64> {
    CMatrix::identity(n, n)
}

/// Algebraic identities on one seeded sample; K-valued defects are relative
/// to `1 + ‖K‖`.
fn suite_sample(seed: u64, dim: usize, k_scale: f64) -> bc_core::Result<SuiteRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rank = rng.random_range(0..=dim);
    let a = random_gapped_unitary::<f64, _>(&mut rng, dim, rank, k_scale)?;
    let other_rank = rng.random_range(0..=dim);
    let b = random_gapped_unitary::<f64, _>(&mut rng, dim, other_rank, k_scale)?;
    let h = random_hermitian::<f64, _>(&mut rng, dim, k_scale);

    let back = inverse_cayley(&cayley(&h)?, 0.0)?;
    let cayley_defect = (&back - &h).norm() / (1.0 + h.norm());

    let k_scale_norm = 1.0 + a.k.norm();
    let d = decompose(&a.unitary, DEFAULT_CLUSTER_TOL)?;
    let rebuilt = bc_core::reconstruct_unitary(&d.p, &d.k)?;
    let round_trip = max_of([
        (&d.p - &a.p).norm(),
        (&d.k - &a.k).norm() / k_scale_norm,
        (rebuilt.matrix() - a.unitary.matrix()).norm(),
    ]);

    let ab = compose(&a.unitary, &b.unitary)?;
    let ba = compose(&b.unitary, &a.unitary)?;
    let commutativity = (ab.matrix() - ba.matrix()).norm();
    let idempotence = (compose(&a.unitary, &a.unitary)?.matrix() - a.unitary.matrix()).norm();
    let absorbed = compose(&BoundaryUnitary::dirichlet(dim), &a.unitary)?;
    let absorption = (absorbed.matrix() - eye(dim)).norm();
    let halved = decompose(
        &compose(&BoundaryUnitary::neumann(dim), &a.unitary)?,
        DEFAULT_CLUSTER_TOL,
    )?;
    let halving = max_of([
        (&halved.p - &a.p).norm(),
        (&halved.k - &a.k * cx(0.5, 0.0)).norm() / k_scale_norm,
    ]);
    Ok(SuiteRow {
        dim,
        rank,
        defects: [
            cayley_defect,
            round_trip,
            commutativity,
            idempotence,
            absorption,
            halving,
        ],
    })
}

fn random_suite(rec: &mut Recorder, suite: &RandomSuite, seed: u64) -> Result<(), CliError> {
    let id = rec.id().to_string();
    let err = numerical(&id);
    let samples = (0..suite.count)
        .map(|j| {
            let dim = suite.dims[j % suite.dims.len()];
            suite_sample(seed.wrapping_add(j as u64), dim, suite.k_scale)
        })
        .collect::<bc_core::Result<Vec<_>>>()
        .map_err(&err)?;
    let rows: Vec<Vec<String>> = samples
        .iter()
        .enumerate()
        .map(|(j, s)| {
            let mut row = vec![
                id.clone(),
                j.to_string(),
                s.dim.to_string(),
                s.rank.to_string(),
            ];
            row.extend(s.defects.iter().map(|&d| num(d)));
            row
        })
        .collect();
    rec.csv("_suite", &SUITE_HEADER, &rows)?;
    rec.metric("suite_samples", suite.count);
    for (i, name) in SUITE_HEADER[4..].iter().enumerate() {
        let worst = max_of(samples.iter().map(|s| s.defects[i]));
        let key = format!("suite_{name}");
        rec.metric(&key, worst);
        rec.assert(Assertion::at_most(key, worst, suite.tol));
    }
    Ok(())
}

fn operator_check(rec: &mut Recorder, check: &OperatorCheck, seed: u64) -> Result<(), CliError> {
    let id = rec.id().to_string();
    let err = numerical(&id);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (grid, mass) = (check.grid, check.mass);
    let mut identity_defect: f64 = 0.0;
    for _ in 0..check.pairs {
        let u1 = random_gapped_unitary::<f64, _>(&mut rng, 2, 0, 5.0)
            .map_err(&err)?
            .unitary;
        let u2 = random_gapped_unitary::<f64, _>(&mut rng, 2, 0, 5.0)
            .map_err(&err)?
            .unitary;
        let w = compose(&u1, &u2).map_err(&err)?;
        let h1 = build_cavity(&u1, grid, mass)
            .map_err(&err)?
            .full_hamiltonian();
        let h2 = build_cavity(&u2, grid, mass)
            .map_err(&err)?
            .full_hamiltonian();
        let hw = build_cavity(&w, grid, mass)
            .map_err(&err)?
            .full_hamiltonian();
        identity_defect = max_of([identity_defect, ((h1 + h2) * cx(0.5, 0.0) - hw).norm()]);
    }

    let mut pairs = vec![
        (BoundaryUnitary::dirichlet(2), BoundaryUnitary::neumann(2)),
        (BoundaryUnitary::dirichlet(2), BoundaryUnitary::periodic()),
        (
            BoundaryUnitary::periodic(),
            BoundaryUnitary::robin(&[1.0, -0.5]).map_err(&err)?,
        ),
    ];
    for _ in 0..check.pairs {
        let a = random_gapped_unitary::<f64, _>(&mut rng, 2, 1, 5.0)
            .map_err(&err)?
            .unitary;
        let b = random_gapped_unitary::<f64, _>(&mut rng, 2, 0, 5.0)
            .map_err(&err)?
            .unitary;
        pairs.push((a, b));
    }
    let mut representation_defect: f64 = 0.0;
    for (u1, u2) in &pairs {
        let c1 = build_cavity(u1, grid, mass).map_err(&err)?;
        let c2 = build_cavity(u2, grid, mass).map_err(&err)?;
        let w = build_cavity(&compose(u1, u2).map_err(&err)?, grid, mass).map_err(&err)?;
        let c12 = form_sum(&c1, &c2).map_err(&err)?;
        let r = verify_representation(&c12, &w).map_err(&err)?;
        representation_defect = max_of([representation_defect, r.defect]);
    }
    rec.metric("operator_identity_defect", identity_defect);
    rec.metric("representation_defect", representation_defect);
    rec.metric("constrained_pairs", pairs.len());
    rec.assert(Assertion::at_most(
        "operator_identity_defect",
        identity_defect,
        check.identity_tol,
    ));
    rec.assert(Assertion::at_most(
        "representation_defect",
        representation_defect,
        check.representation_tol,
    ));
    Ok(())
}
