//! Adaptive Gauss–Kronrod (G7/K15) integration on finite intervals.

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];

const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

/// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: usize = 60;

/// Fixed 15-point Kronrod rule on `[a, b]`, exact for polynomials of degree 22.
pub fn kronrod15<T: Real>(f: impl Fn(T) -> T, a: T, b: T) -> T {
    panel(&f, a, b).0
}

#[derive(Debug, Clone, Copy)]
pub struct QuadratureSettings<T> {
    pub abs_tol: T,
    pub rel_tol: T,
}

impl<T: Real> Default for QuadratureSettings<T> {
    fn default() -> Self {
        Self {
            abs_tol: lit(1e-14),
            rel_tol: lit(1e-12),
        }
    }
}

/// One G7/K15 panel: `(kronrod, |kronrod - gauss|)`.
fn panel<T: Real>(f: &impl Fn(T) -> T, a: T, b: T) -> (T, T) {
    let half = (b - a) * lit(0.5);
    let mid = (a + b) * lit(0.5);
    let fc = f(mid);
    let mut kronrod = fc * lit(KRONROD_WEIGHTS[7]);
    let mut gauss = fc * lit(GAUSS_WEIGHTS[3]);
    for j in 0..7 {
        let dx = half * lit(KRONROD_NODES[j]);
        let pair = f(mid - dx) + f(mid + dx);
        kronrod += pair * lit(KRONROD_WEIGHTS[j]);
        if j % 2 == 1 {
            gauss += pair * lit(GAUSS_WEIGHTS[j / 2]);
        }
    }
    (kronrod * half, (kronrod - gauss).abs() * half)
}

/// Integrates `f` over `[a, b]` by recursive bisection until every panel
/// meets its share of the tolerance.
pub fn integrate<T: Real>(
    f: impl Fn(T) -> T,
    a: T,
    b: T,
    settings: QuadratureSettings<T>,
) -> Result<T> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::QuadratureDomain(
            "integration limits must be finite".into(),
        ));
    }
    if a == b {
        return Ok(T::zero());
    }
    let (whole, _) = panel(&f, a, b);
    let target = settings.abs_tol.max(settings.rel_tol * whole.abs());
    let length = (b - a).abs();
    let value = refine(&f, a, b, target, length, 0)?;
    if !value.is_finite() {
        return Err(Error::QuadratureDomain(
            "integrand produced a non-finite value".into(),
        ));
    }
    Ok(value)
}

fn refine<T: Real>(
    f: &impl Fn(T) -> T,
    a: T,
    b: T,
    target: T,
    length: T,
    depth: usize,
) -> Result<T> {
    let (value, error) = panel(f, a, b);
    let share = target * (b - a).abs() / length;
    if error <= share || depth >= MAX_DEPTH {
        if depth >= MAX_DEPTH && error > share * lit(1e3) {
            return Err(Error::QuadratureDomain(format!(
                "no convergence on [{:e}, {:e}]",
                crate::scalar::to_f64(a),
                crate::scalar::to_f64(b)
            )));
        }
        return Ok(value);
    }
    let mid = (a + b) * lit(0.5);
    Ok(refine(f, a, mid, target, length, depth + 1)?
        + refine(f, mid, b, target, length, depth + 1)?)
}

/// Integrates over `[a, b]` split at the given interior breakpoints.
pub fn integrate_split<T: Real>(
    f: impl Fn(T) -> T,
    a: T,
    b: T,
    breakpoints: &[T],
    settings: QuadratureSettings<T>,
) -> Result<T> {
    let mut edges = vec![a];
    edges.extend(breakpoints.iter().copied().filter(|&x| x > a && x < b));
    edges.push(b);
    edges.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    let mut total = T::zero();
    for w in edges.windows(2) {
        total += integrate(&f, w[0], w[1], settings)?;
    }
    Ok(total)
}
