//! Closed-form and transcendental reference spectra used to validate the
//! lattice models.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Bisection on a bracketing interval `[a, b]` with `f(a) f(b) <= 0`.
pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Numerical(format!("no sign change on [{a}, {b}]")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm == 0.0 || (b - a) < tol {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Sign changes of `f` scanned on `(lo, hi]` with `steps` subintervals,
/// each refined by bisection.
pub fn scan_roots(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    steps: usize,
    count: usize,
) -> Result<Vec<f64>> {
    let mut roots = Vec::with_capacity(count);
    let dx = (hi - lo) / steps as f64;
    let mut x0 = lo;
    let mut f0 = f(x0);
    for i in 1..=steps {
        let x1 = lo + dx * i as f64;
        let f1 = f(x1);
        if f0.signum() != f1.signum() || f1 == 0.0 {
            roots.push(bisect(&f, x0, x1, 1e-14)?);
            if roots.len() == count {
                return Ok(roots);
            }
        }
        x0 = x1;
        f0 = f1;
    }
    Err(Error::Numerical(format!(
        "found {} of {count} roots below {hi}",
        roots.len()
    )))
}

fn energies(omegas: impl IntoIterator<Item = f64>, mass: f64) -> Vec<f64> {
    omegas.into_iter().map(|w| w * w / (2.0 * mass)).collect()
}

/// `(nπ)²/2m`, `n = 1, 2, ...`.
pub fn interval_dirichlet(count: usize, mass: f64) -> Vec<f64> {
    energies((1..=count).map(|n| n as f64 * PI), mass)
}

/// `((n-1)π)²/2m`, starting at the constant mode.
pub fn interval_neumann(count: usize, mass: f64) -> Vec<f64> {
    energies((0..count).map(|n| n as f64 * PI), mass)
}

/// `0, (2π)², (2π)², (4π)², (4π)², ...` divided by `2m`.
pub fn interval_periodic(count: usize, mass: f64) -> Vec<f64> {
    energies((0..count).map(|i| 2.0 * PI * i.div_ceil(2) as f64), mass)
}

/// Spectrum of `ψ'(0) = kψ(0)`, `ψ'(1) = -kψ(1)` with `k >= 0`: roots of
/// `tan ω = 2kω/(ω² - k²)`.
pub fn interval_robin_symmetric(k: f64, count: usize, mass: f64) -> Result<Vec<f64>> {
    if k < 0.0 {
        return Err(Error::Domain(
            "symmetric Robin reference covers k >= 0 only".into(),
        ));
    }
    if k == 0.0 {
        return Ok(interval_neumann(count, mass));
    }
    let f = |w: f64| (w * w - k * k) * w.sin() - 2.0 * k * w * w.cos();
    let hi = (count as f64 + 2.0) * PI;
    let roots = scan_roots(f, 1e-9, hi, 4000 * (count + 2), count)?;
    Ok(energies(roots, mass))
}

/// Bessel function of the first kind by its power series (adequate for
/// moderate arguments, `x <= 30`).
pub fn bessel_j(order: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=order {
        term *= half / k as f64;
    }
    let mut sum = term;
    let q = -half * half;
    for k in 1..300 {
        term *= q / (k as f64 * (k + order) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// `n`-th positive zero of `J_order`.
pub fn bessel_j_zero(order: u32, n: usize) -> Result<f64> {
    let roots = scan_roots(
        |x| bessel_j(order, x),
        1e-6,
        (n as f64 + order as f64 + 2.0) * PI,
        2000 * (n + 2),
        n,
    )?;
    Ok(roots[n - 1])
}

/// Lowest disk eigenvalues of angular mode `m` with Dirichlet boundary:
/// `j²_{m,n}/2m_mass`.
pub fn disk_dirichlet(order: u32, count: usize, mass: f64) -> Result<Vec<f64>> {
    let roots = (1..=count)
        .map(|n| bessel_j_zero(order, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(energies(roots, mass))
}
