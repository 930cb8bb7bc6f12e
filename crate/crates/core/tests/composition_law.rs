use bc_core::interval_cavity::{build_cavity, form_sum, verify_representation};
use bc_core::sampling::random_gapped_unitary;
use bc_core::scalar::cx;
use bc_core::{compose, BoundaryUnitary};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const CELLS: usize = 64;
const MASS: f64 = 0.5;

#[test]
fn unconstrained_pairs_average_their_hamiltonians() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let u1 = random_gapped_unitary::<f64, _>(&mut rng, 2, 0, 3.0)
            .unwrap()
            .unitary;
        let u2 = random_gapped_unitary::<f64, _>(&mut rng, 2, 0, 3.0)
            .unwrap()
            .unitary;
        let w = compose(&u1, &u2).unwrap();
        let h1 = build_cavity(&u1, CELLS, MASS).unwrap().full_hamiltonian();
        let h2 = build_cavity(&u2, CELLS, MASS).unwrap().full_hamiltonian();
        let hw = build_cavity(&w, CELLS, MASS).unwrap().full_hamiltonian();
        let defect = ((h1 + h2) * cx(0.5, 0.0) - hw).norm();
        assert!(defect <= 1e-12, "defect {defect:e}");
    }
}

#[test]
fn constrained_pairs_match_on_the_common_space() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut pairs: Vec<(BoundaryUnitary<f64>, BoundaryUnitary<f64>)> = vec![
        (BoundaryUnitary::dirichlet(2), BoundaryUnitary::neumann(2)),
        (BoundaryUnitary::dirichlet(2), BoundaryUnitary::periodic()),
        (
            BoundaryUnitary::periodic(),
            BoundaryUnitary::robin(&[1.0, -0.5]).unwrap(),
        ),
    ];
    for _ in 0..10 {
        let a = random_gapped_unitary::<f64, _>(&mut rng, 2, 1, 2.0)
            .unwrap()
            .unitary;
        let b = random_gapped_unitary::<f64, _>(&mut rng, 2, 1, 2.0)
            .unwrap()
            .unitary;
        let c = random_gapped_unitary::<f64, _>(&mut rng, 2, 0, 2.0)
            .unwrap()
            .unitary;
        pairs.push((a.clone(), b));
        pairs.push((a, c));
    }
    for (u1, u2) in pairs {
        let c1 = build_cavity(&u1, CELLS, MASS).unwrap();
        let c2 = build_cavity(&u2, CELLS, MASS).unwrap();
        let w = build_cavity(&compose(&u1, &u2).unwrap(), CELLS, MASS).unwrap();
        let check = verify_representation(&form_sum(&c1, &c2).unwrap(), &w).unwrap();
        assert!(check.defect <= 1e-10, "defect {:e}", check.defect);
        assert!(check.passed);
    }
}

#[test]
fn form_sum_spectrum_equals_composed_spectrum() {
    let c1 = build_cavity(
        &BoundaryUnitary::<f64>::robin(&[0.0, 0.0]).unwrap(),
        CELLS,
        MASS,
    )
    .unwrap();
    let c2 = build_cavity(
        &BoundaryUnitary::<f64>::robin(&[2.0, 2.0]).unwrap(),
        CELLS,
        MASS,
    )
    .unwrap();
    let direct = build_cavity(
        &BoundaryUnitary::<f64>::robin(&[1.0, 1.0]).unwrap(),
        CELLS,
        MASS,
    )
    .unwrap();
    let a = form_sum(&c1, &c2).unwrap().spectrum(4).unwrap();
    let b = direct.spectrum(4).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() <= 1e-9 * y.abs().max(1.0));
    }
}
