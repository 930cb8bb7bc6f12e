use std::f64::consts::PI;

use bc_core::disk_cavity::halfplane_boundary_demo;
use nalgebra::Complex;

/// `erfc` by its Maclaurin series, accurate for `0 <= y <= 1`.
fn erfc_small(y: f64) -> f64 {
    let mut term = y;
    let mut sum = y;
    for n in 1..60 {
        term *= -y * y / n as f64;
        sum += term / (2 * n + 1) as f64;
    }
    1.0 - 2.0 / PI.sqrt() * sum
}

/// Closed form `∫ e^{-x²}/(x + iy) dx = -iπ e^{y²} erfc(y)`.
fn gaussian_exact(y: f64) -> Complex<f64> {
    Complex::new(0.0, -PI * (y * y).exp() * erfc_small(y))
}

#[test]
fn gaussian_integrals_match_closed_form() {
    let ys = [1e-1, 1e-2, 1e-3, 1e-4];
    let demo = halfplane_boundary_demo(|x: f64| (-x * x).exp(), &ys, 10.0).unwrap();
    for (y, i) in ys.iter().zip(&demo.integrals) {
        assert!((i - gaussian_exact(*y)).norm() < 1e-10, "y={y}");
    }
    assert!((demo.reference - Complex::new(0.0, -PI)).norm() < 1e-13);
    assert!((demo.extrapolated_limit - Complex::new(0.0, -PI)).norm() <= 1e-4);
    let slope = demo.observed_slope.unwrap();
    assert!((slope - 1.0).abs() < 0.05, "slope {slope}");
}

#[test]
fn odd_test_function_has_real_limit() {
    let demo =
        halfplane_boundary_demo(|x: f64| x * (-x * x).exp(), &[1e-2, 1e-3, 1e-4], 10.0).unwrap();
    assert!((demo.extrapolated_limit - Complex::new(PI.sqrt(), 0.0)).norm() < 1e-6);
}
