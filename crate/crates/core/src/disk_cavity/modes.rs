use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, re, Real};

/// Position of mode `m` in a `{-m_max..m_max}` coefficient list.
pub(crate) fn mode_index(m_max: usize, m: i64) -> Option<usize> {
    let shifted = m + m_max as i64;
    (shifted >= 0 && shifted <= 2 * m_max as i64).then_some(shifted as usize)
}

pub(crate) fn mode_of(m_max: usize, index: usize) -> i64 {
    index as i64 - m_max as i64
}

/// `(1 + m²)` as the working scalar.
pub(crate) fn weight<T: Real>(m: i64) -> T {
    lit::<T>(1.0 + (m * m) as f64)
}

/// Truncated angular Fourier series on the unit circle, regarded as an
/// element of `H^s(∂D)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryModeVector<T: Real> {
    m_max: usize,
    coefficients: Vec<Complex<T>>,
    sobolev_order: T,
}

impl<T: Real> BoundaryModeVector<T> {
    pub fn new(m_max: usize, coefficients: Vec<Complex<T>>, sobolev_order: T) -> Result<Self> {
        if coefficients.len() != 2 * m_max + 1 {
            return Err(Error::Shape(format!(
                "expected {} mode coefficients for m_max = {m_max}, got {}",
                2 * m_max + 1,
                coefficients.len()
            )));
        }
        if coefficients
            .iter()
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::Domain("mode coefficients must be finite".into()));
        }
        if !sobolev_order.is_finite() {
            return Err(Error::Domain("sobolev order must be finite".into()));
        }
        Ok(Self {
            m_max,
            coefficients,
            sobolev_order,
        })
    }

    pub fn zeros(m_max: usize, sobolev_order: T) -> Self {
        Self {
            m_max,
            coefficients: vec![re(T::zero()); 2 * m_max + 1],
            sobolev_order,
        }
    }

    /// Single Fourier mode `e^{imθ}`.
    pub fn delta(m_max: usize, m: i64, sobolev_order: T) -> Result<Self> {
        let idx = mode_index(m_max, m).ok_or_else(|| {
            Error::Domain(format!("mode {m} outside the truncation |m| <= {m_max}"))
        })?;
        let mut v = Self::zeros(m_max, sobolev_order);
        v.coefficients[idx] = re(T::one());
        Ok(v)
    }

    pub fn from_fn(m_max: usize, sobolev_order: T, f: impl Fn(i64) -> Complex<T>) -> Result<Self> {
        let coefficients = (0..=2 * m_max).map(|i| f(mode_of(m_max, i))).collect();
        Self::new(m_max, coefficients, sobolev_order)
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn sobolev_order(&self) -> T {
        self.sobolev_order
    }

    pub fn coefficients(&self) -> &[Complex<T>] {
        &self.coefficients
    }

    pub fn coefficient(&self, m: i64) -> Option<Complex<T>> {
        mode_index(self.m_max, m).map(|i| self.coefficients[i])
    }

    /// `(m, g_m)` pairs in increasing `m`.
    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex<T>)> + '_ {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(i, &c)| (mode_of(self.m_max, i), c))
    }
}

/// `(Σ (1+m²)^s |g_m|²)^{1/2}`.
pub fn sobolev_norm<T: Real>(g: &BoundaryModeVector<T>, s: T) -> T {
    g.modes()
        .map(|(m, c)| weight::<T>(m).powf(s) * c.norm_sqr())
        .fold(T::zero(), |a, b| a + b)
        .sqrt()
}

/// Spectral multiplier `(1 - Δ_∂D)^{1/2}`: mode `m` scaled by `(1+m²)^{1/2}`,
/// mapping `H^s` onto `H^{s-1}` isometrically.
pub fn lambda_lift<T: Real>(g: &BoundaryModeVector<T>) -> BoundaryModeVector<T> {
    scale_modes(g, |m| weight::<T>(m).sqrt(), g.sobolev_order - T::one())
}

/// Inverse of [`lambda_lift`].
pub fn lambda_unlift<T: Real>(g: &BoundaryModeVector<T>) -> BoundaryModeVector<T> {
    scale_modes(
        g,
        |m| T::one() / weight::<T>(m).sqrt(),
        g.sobolev_order + T::one(),
    )
}

fn scale_modes<T: Real>(
    g: &BoundaryModeVector<T>,
    factor: impl Fn(i64) -> T,
    order: T,
) -> BoundaryModeVector<T> {
    BoundaryModeVector {
        m_max: g.m_max,
        coefficients: g.modes().map(|(m, c)| c * factor(m)).collect(),
        sobolev_order: order,
    }
}
