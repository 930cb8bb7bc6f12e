use std::cmp::Ordering;

use nalgebra::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_split, QuadratureSettings};
use crate::scalar::{cx, lit, to_f64, Real};

pub const MIN_Y: f64 = 1e-5;

/// `|χ(±L)|` must stay below this fraction of `max |χ|`.
const DECAY_TOL: f64 = 1e-10;
const DECAY_SAMPLES: usize = 2001;

/// Boundary values `∫χ(x)/(x + iy) dx` of the half-plane as `y ↓ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfplaneDemo<T> {
    pub y_values: Vec<T>,
    pub integrals: Vec<Complex<T>>,
    /// Linear Richardson extrapolation to `y = 0` from the last two samples.
    pub extrapolated_limit: Complex<T>,
    /// `P.V.∫χ(x)/x dx − iπχ(0)`.
    pub reference: Complex<T>,
    pub errors: Vec<T>,
    /// Least-squares slope of `log error` against `log y`.
    pub observed_slope: Option<T>,
}

/// Evaluates the half-plane integrals of `χ` over its numerical support
/// `[-support, support]`.
pub fn halfplane_boundary_demo<T: Real>(
    chi: impl Fn(T) -> T + Sync,
    y_values: &[T],
    support: T,
) -> Result<HalfplaneDemo<T>> {
    if y_values.is_empty() {
        return Err(Error::Domain("no y values given".into()));
    }
    if y_values.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(Ordering::Less)) {
        return Err(Error::Domain("y values must be strictly descending".into()));
    }
    if y_values[y_values.len() - 1].partial_cmp(&lit(MIN_Y)).is_none_or(Ordering::is_lt) {
        return Err(Error::Domain(format!("y values must stay above {MIN_Y:e}")));
    }
    check_decay(&chi, support)?;

    let settings = QuadratureSettings::default();
    let integrals = y_values
        .par_iter()
        .map(|&y| integral_at(&chi, y, support, settings))
        .collect::<Result<Vec<_>>>()?;

    let principal = integrate(|x: T| (chi(x) - chi(-x)) / x, T::zero(), support, settings)?;
    let reference = cx(principal, -T::pi() * chi(T::zero()));

    let last = y_values.len() - 1;
    let extrapolated_limit = if last == 0 {
        integrals[0]
    } else {
        let (y1, y2) = (y_values[last - 1], y_values[last]);
        (integrals[last] * y1 - integrals[last - 1] * y2) / (y1 - y2)
    };
    let errors: Vec<T> = integrals
        .iter()
        .map(|i| (*i - reference).norm_sqr().sqrt())
        .collect();
    let observed_slope = log_slope(y_values, &errors);
    Ok(HalfplaneDemo {
        y_values: y_values.to_vec(),
        integrals,
        extrapolated_limit,
        reference,
        errors,
        observed_slope,
    })
}

fn check_decay<T: Real>(chi: &impl Fn(T) -> T, support: T) -> Result<()> {
    if !(support > T::zero() && support.is_finite()) {
        return Err(Error::QuadratureDomain(
            "support half-width must be positive and finite".into(),
        ));
    }
    let step = support * lit::<T>(2.0 / (DECAY_SAMPLES - 1) as f64);
    let peak = (0..DECAY_SAMPLES)
        .map(|j| chi(-support + step * lit::<T>(j as f64)).abs())
        .fold(T::zero(), |a, b| a.max(b));
    if !peak.is_finite() {
        return Err(Error::QuadratureDomain(
            "test function is not finite on its support".into(),
        ));
    }
    let edge = chi(support).abs().max(chi(-support).abs());
    if edge > peak * lit(DECAY_TOL) {
        return Err(Error::QuadratureDomain(format!(
            "test function does not decay: |χ(±L)| = {:e} against peak {:e}",
            to_f64(edge),
            to_f64(peak)
        )));
    }
    Ok(())
}

/// `∫χ x/(x²+y²) dx − i y ∫χ/(x²+y²) dx`.
fn integral_at<T: Real>(
    chi: &impl Fn(T) -> T,
    y: T,
    support: T,
    settings: QuadratureSettings<T>,
) -> Result<Complex<T>> {
    let y2 = y * y;
    let breaks = [-y, T::zero(), y];
    let real = integrate_split(
        |x: T| chi(x) * x / (x * x + y2),
        -support,
        support,
        &breaks,
        settings,
    )?;
    let imag = integrate_split(
        |x: T| chi(x) / (x * x + y2),
        -support,
        support,
        &breaks,
        settings,
    )?;
    Ok(cx(real, -y * imag))
}

fn log_slope<T: Real>(y: &[T], errors: &[T]) -> Option<T> {
    let points: Vec<(f64, f64)> = y
        .iter()
        .zip(errors)
        .filter(|(_, e)| **e > T::zero())
        .map(|(y, e)| (to_f64(*y).ln(), to_f64(*e).ln()))
        .collect();
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| lit(sxy / sxx))
}
