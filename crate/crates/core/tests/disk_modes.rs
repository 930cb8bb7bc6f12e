use std::f64::consts::PI;

use bc_core::compose;
use bc_core::disk_cavity::{
    dirichlet_decompose, harmonic_extension, lambda_lift, laplacian_residual, modewise_compose,
    radial_operator, radial_spectrum, sobolev_norm, BoundaryModeVector, DiskModeModel, DiskState,
    ModeCondition,
};
use nalgebra::Complex;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `J_n(x) = (1/π) ∫₀^π cos(nτ - x sin τ) dτ`; the trapezoid rule is
/// spectrally accurate for this periodic integrand.
fn bessel_integral(n: u32, x: f64) -> f64 {
    let steps = 256;
    let h = PI / steps as f64;
    let f = |t: f64| (n as f64 * t - x * t.sin()).cos();
    let inner: f64 = (1..steps).map(|j| f(j as f64 * h)).sum();
    (inner + 0.5 * (f(0.0) + f(PI))) * h / PI
}

fn first_zero(n: u32) -> f64 {
    let (mut a, mut b) = (0.5 + n as f64, 2.5 + 1.5 * n as f64);
    assert!(bessel_integral(n, a) * bessel_integral(n, b) < 0.0);
    while b - a > 1e-14 {
        let c = 0.5 * (a + b);
        if bessel_integral(n, a) * bessel_integral(n, c) <= 0.0 {
            b = c;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

fn random_model(rng: &mut ChaCha8Rng, m_max: usize) -> DiskModeModel<f64> {
    let modes = (0..=2 * m_max)
        .map(|_| {
            if rng.random_bool(0.2) {
                ModeCondition::Dirichlet
            } else {
                ModeCondition::Robin(rng.random_range(-5.0..5.0))
            }
        })
        .collect();
    DiskModeModel::new(m_max, modes, 16, 0.5).unwrap()
}

#[test]
fn dirichlet_ground_states_match_bessel_zeros() {
    let model = DiskModeModel::uniform(1, ModeCondition::Dirichlet, 512, 0.5).unwrap();
    for m in [0u32, 1] {
        let j = first_zero(m);
        let e = radial_spectrum(&model, m as i64, 1).unwrap()[0];
        assert!(
            (e - j * j).abs() / (j * j) <= 1e-3,
            "m={m}: {e} vs {}",
            j * j
        );
    }
    assert!((first_zero(0) - 2.404_825_557_695_773).abs() < 1e-10);
}

#[test]
fn modewise_matches_matrix_composition() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..3 {
        let a = random_model(&mut rng, 64);
        let b = random_model(&mut rng, 64);
        let by_modes = modewise_compose(&a, &b)
            .unwrap()
            .boundary_unitary()
            .unwrap();
        let by_matrix = compose(
            &a.boundary_unitary().unwrap(),
            &b.boundary_unitary().unwrap(),
        )
        .unwrap();
        let defect = (by_modes.matrix() - by_matrix.matrix()).norm();
        assert!(defect <= 1e-12, "defect {defect:e}");
    }
}

#[test]
fn composed_robin_gives_identical_radial_matrices() {
    for m in [0i64, 2] {
        let r = |k: f64| DiskModeModel::uniform(3, ModeCondition::Robin(k), 32, 0.5).unwrap();
        let w = modewise_compose(&r(0.5), &r(2.5)).unwrap();
        assert_eq!(
            radial_operator(&w, m).unwrap(),
            radial_operator(&r(1.5), m).unwrap()
        );
    }
}

#[test]
fn decomposition_of_generic_states() {
    let psi = DiskState::<f64>::from_fn(64, 4, |m, r| {
        Complex::new((r * (m as f64 + 1.0)).sin() + 0.3, r * r * m as f64)
    })
    .unwrap();
    let split = dirichlet_decompose(&psi);
    assert!(split
        .regular
        .trace()
        .coefficients()
        .iter()
        .all(|c| c.re == 0.0 && c.im == 0.0));
    let again = dirichlet_decompose(&split.regular);
    assert!(again.harmonic.max_abs() <= 1e-12);
    let rebuilt = split
        .regular
        .difference(&psi.difference(&split.harmonic).unwrap())
        .unwrap();
    assert!(rebuilt.max_abs() <= 1e-15);
}

#[test]
fn harmonic_residual_is_second_order() {
    let g = BoundaryModeVector::<f64>::from_fn(8, 0.5, |m| {
        Complex::new(1.0 / (1.0 + (m * m) as f64), 0.0)
    })
    .unwrap();
    let coarse = laplacian_residual(&harmonic_extension(&g, 128).unwrap());
    let fine = laplacian_residual(&harmonic_extension(&g, 256).unwrap());
    for ((m, rc), (_, rf)) in coarse.iter().zip(&fine) {
        if *rc < 1e-10 {
            assert!(*rf < 1e-10);
            continue;
        }
        let ratio = rc / rf;
        assert!((ratio - 4.0).abs() <= 0.8, "m={m}: ratio {ratio}");
    }
}

#[test]
fn radial_spectrum_converges_at_second_order() {
    let cases = [
        (0i64, ModeCondition::Dirichlet),
        (1, ModeCondition::Dirichlet),
        (2, ModeCondition::Robin(1.5)),
    ];
    for (m, cond) in cases {
        let e: Vec<f64> = [32usize, 64, 128]
            .iter()
            .map(|&cells| {
                let model = DiskModeModel::uniform(2, cond, cells, 0.5).unwrap();
                radial_spectrum(&model, m, 1).unwrap()[0]
            })
            .collect();
        let ratio = (e[0] - e[1]) / (e[1] - e[2]);
        assert!((ratio - 4.0).abs() <= 0.8, "m={m}: ratio {ratio}");
    }
}

proptest! {
    #[test]
    fn lift_is_an_isometry(seed in any::<u64>(), m_max in 0usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coefficients = (0..=2 * m_max)
            .map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let g = BoundaryModeVector::<f64>::new(m_max, coefficients, 0.5).unwrap();
        let lhs = sobolev_norm(&lambda_lift(&g), -0.5);
        let rhs = sobolev_norm(&g, 0.5);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
    }
}
