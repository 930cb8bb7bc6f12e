use bc_core::boundary_algebra::{
    cayley, inverse_cayley, DEFAULT_CLUSTER_TOL, DEFAULT_GAP_THRESHOLD,
};
use bc_core::sampling::{random_gapped_unitary, random_hermitian};
use bc_core::scalar::cx;
use bc_core::{compose, decompose, gap_diagnostics, reconstruct_unitary, BoundaryUnitary, CMatrix};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn eye(n: usize) -> CMatrix<f64> {
    CMatrix::identity(n, n)
}

fn sample(seed: u64, dim: usize, rank: usize, scale: f64) -> bc_core::sampling::GappedSample<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_gapped_unitary(&mut rng, dim, rank.min(dim), scale).unwrap()
}

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 96,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn cayley_round_trip(seed in any::<u64>(), dim in 1usize..9, log_scale in -2.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_hermitian::<f64, _>(&mut rng, dim, 10f64.powf(log_scale) / dim as f64);
        prop_assume!(a.norm() <= 1e3);
        let back = inverse_cayley(&cayley(&a).unwrap(), 0.0).unwrap();
        let tol = 1e-8 * (1.0 + a.norm().powi(2));
        prop_assert!((&back - &a).norm() <= tol, "defect {:e}", (&back - &a).norm());
    }

    #[test]
    fn decompose_reconstruct_round_trip(seed in any::<u64>(), dim in 1usize..9, rank in 0usize..9) {
        let s = sample(seed, dim, rank, 2.0);
        let d = decompose(&s.unitary, DEFAULT_CLUSTER_TOL).unwrap();
        prop_assert!((&d.p - &s.p).norm() <= 1e-9);
        prop_assert!((&d.k - &s.k).norm() <= 1e-9 * (1.0 + s.k.norm()));
        let u = reconstruct_unitary(&d.p, &d.k).unwrap();
        prop_assert!((u.matrix() - s.unitary.matrix()).norm() <= 1e-9);
    }

    #[test]
    fn composition_commutes(seed in any::<u64>(), dim in 1usize..9, r1 in 0usize..9, r2 in 0usize..9) {
        let a = sample(seed, dim, r1, 2.0).unitary;
        let b = sample(seed.wrapping_add(1), dim, r2, 2.0).unitary;
        let ab = compose(&a, &b).unwrap();
        let ba = compose(&b, &a).unwrap();
        prop_assert!((ab.matrix() - ba.matrix()).norm() <= 1e-12);
    }

    #[test]
    fn composition_is_idempotent(seed in any::<u64>(), dim in 1usize..9, rank in 0usize..9) {
        let u = sample(seed, dim, rank, 2.0).unitary;
        let uu = compose(&u, &u).unwrap();
        prop_assert!((uu.matrix() - u.matrix()).norm() <= 1e-10);
    }

    #[test]
    fn dirichlet_absorbs(seed in any::<u64>(), dim in 1usize..9, rank in 0usize..9) {
        let u = sample(seed, dim, rank, 2.0).unitary;
        let w = compose(&BoundaryUnitary::dirichlet(dim), &u).unwrap();
        prop_assert!((w.matrix() - eye(dim)).norm() <= 1e-12);
    }

    #[test]
    fn neumann_halves_k(seed in any::<u64>(), dim in 1usize..9, rank in 0usize..9) {
        let s = sample(seed, dim, rank, 2.0);
        let w = compose(&BoundaryUnitary::neumann(dim), &s.unitary).unwrap();
        let d = decompose(&w, DEFAULT_CLUSTER_TOL).unwrap();
        prop_assert!((&d.p - &s.p).norm() <= 1e-9);
        prop_assert!((&d.k - &s.k * cx(0.5, 0.0)).norm() <= 1e-9 * (1.0 + s.k.norm()));
    }

    #[test]
    fn semigap_bound_is_min_of_k(seed in any::<u64>(), dim in 1usize..9, rank in 0usize..8) {
        let s = sample(seed, dim, rank, 3.0);
        prop_assume!(rank < dim);
        let g = gap_diagnostics(&s.unitary, DEFAULT_GAP_THRESHOLD).unwrap();
        let d = decompose(&s.unitary, DEFAULT_CLUSTER_TOL).unwrap();
        let beta = d.semigap_lower_bound;
        prop_assert!((g.k_lower_bound - beta).abs() <= 1e-9 * (1.0 + beta.abs()));
        prop_assert!(g.is_gapped && g.is_semigapped);
    }
}
