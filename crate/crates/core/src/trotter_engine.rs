//! Alternating evolution `(e^{-iτH₁} e^{-iτH₂})^N` with `τ = t/N`, its
//! form-sum limit `e^{-2itH_W}`, convergence sweeps, and the penalty route
//! that replaces hard Dirichlet constraints by stiff Robin coupling.

use rayon::prelude::*;

use crate::boundary_algebra::{compose, BoundaryUnitary};
use crate::error::{Error, Result};
use crate::interval_cavity::{build_cavity, Cavity1D, StateVector};
use crate::linalg::real_to_complex;
use crate::scalar::{cx, lit, CMatrix, CVector, Real};

/// Errors below this floor carry no convergence information and are left
/// out of the order fit.
const FIT_FLOOR: f64 = 1e-13;

/// Default test state: Gaussian bump centered off the symmetry point.
pub const DEFAULT_CENTER: f64 = 0.37;
pub const DEFAULT_WIDTH: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct TrotterReport<T> {
    pub n_values: Vec<usize>,
    /// Half-time: the total evolution time is `2t`.
    pub t: T,
    pub pointwise_errors: Vec<T>,
    pub time_averaged_errors: Vec<T>,
    /// Negated least-squares slope of `ln(error)` against `ln(N)`.
    pub fitted_order: Option<T>,
}

/// Averaging window and quadrature resolution for time-averaged errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragingWindow<T> {
    pub window: T,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeAverage<T> {
    pub average: T,
    pub max_pointwise: T,
    pub pointwise_at_end: T,
}

/// Precomputed split-step evolution for a pair of cavities sharing their
/// admissible subspace.
///
/// Coefficients are carried in the eigenbases of the two pencils, linked by
/// `C = X₁†Z₁†BZ₂X₂`, so each half step is a diagonal phase.
pub struct AlternatingEvolution<'a, T: Real> {
    first: &'a Cavity1D<T>,
    second: &'a Cavity1D<T>,
    link: CMatrix<T>,
    link_adjoint: CMatrix<T>,
    full_mass: CMatrix<T>,
}

impl<'a, T: Real> AlternatingEvolution<'a, T> {
    /// `first` is `H₁` (applied last in each period), `second` is `H₂`.
    pub fn new(first: &'a Cavity1D<T>, second: &'a Cavity1D<T>) -> Result<Self> {
        ensure_same_space(first, second)?;
        let (_, x1) = first.spectral_parts()?;
        let (_, x2) = second.spectral_parts()?;
        let full_mass = real_to_complex(first.mass_matrix());
        let link = x1.adjoint()
            * first.reduced_basis().adjoint()
            * &full_mass
            * second.reduced_basis()
            * x2;
        let link_adjoint = link.adjoint();
        Ok(Self {
            first,
            second,
            link,
            link_adjoint,
            full_mass,
        })
    }

    pub fn apply(&self, psi0: &StateVector<T>, t: T, n: usize) -> Result<StateVector<T>> {
        if n == 0 {
            return Err(Error::Domain("number of periods N must be >= 1".into()));
        }
        if !self.second.contains(psi0)? {
            return Err(Error::Domain(
                "initial state violates the shared boundary constraint".into(),
            ));
        }
        if t == T::zero() {
            return Ok(psi0.clone());
        }
        let tau = t / lit::<T>(n as f64);
        let (e1, x1) = self.first.spectral_parts()?;
        let (e2, x2) = self.second.spectral_parts()?;
        let d1 = phases(e1, tau);
        let d2 = phases(e2, tau);
        let z2 = self.second.reduced_basis();
        let mut a: CVector<T> =
            x2.adjoint() * (z2.adjoint() * (&self.full_mass * psi0.coefficients()));
        let mut b = CVector::<T>::zeros(self.link.nrows());
        for step in 0..n {
            a.component_mul_assign(&d2);
            self.link.mul_to(&a, &mut b);
            b.component_mul_assign(&d1);
            if step + 1 < n {
                self.link_adjoint.mul_to(&b, &mut a);
            }
        }
        Ok(StateVector::new(self.first.reduced_basis() * (x1 * b)))
    }

    pub fn b_distance(&self, a: &StateVector<T>, b: &StateVector<T>) -> T {
        let d = a.coefficients() - b.coefficients();
        (d.adjoint() * &self.full_mass * &d)[(0, 0)]
            .re
            .max(T::zero())
            .sqrt()
    }
}

fn phases<T: Real>(energies: &[T], tau: T) -> CVector<T> {
    CVector::from_iterator(
        energies.len(),
        energies.iter().map(|&e| {
            let a = -e * tau;
            cx(a.cos(), a.sin())
        }),
    )
}

fn ensure_same_space<T: Real>(c1: &Cavity1D<T>, c2: &Cavity1D<T>) -> Result<()> {
    if c1.cells() != c2.cells() || c1.mass() != c2.mass() {
        return Err(Error::Domain(
            "alternating cavities must share grid and mass".into(),
        ));
    }
    let gap = (c1.admissible_projector() - c2.admissible_projector()).norm();
    if c1.reduced_dim() != c2.reduced_dim() || gap > lit::<T>(1e-10) {
        return Err(Error::Domain(
            "cavities have different constraint subspaces; hard-constrained pairs are covered by \
             verify_representation and the penalty route (penalty_dirichlet)"
                .into(),
        ));
    }
    Ok(())
}

/// `(e^{-i(t/N)H₁} e^{-i(t/N)H₂})^N ψ0`.
pub fn alternating_product<T: Real>(
    psi0: &StateVector<T>,
    t: T,
    n: usize,
    c1: &Cavity1D<T>,
    c2: &Cavity1D<T>,
) -> Result<StateVector<T>> {
    AlternatingEvolution::new(c1, c2)?.apply(psi0, t, n)
}

/// `e^{-2itH_W} ψ0`.
pub fn limit_reference<T: Real>(
    psi0: &StateVector<T>,
    t: T,
    w_cavity: &Cavity1D<T>,
) -> Result<StateVector<T>> {
    w_cavity.propagate(psi0, lit::<T>(2.0) * t)
}

/// Negated least-squares slope of `ln e` against `ln N` over errors above the
/// fit floor; `None` with fewer than two usable points.
pub fn fit_order<T: Real>(n_values: &[usize], errors: &[T]) -> Option<T> {
    let pts: Vec<(T, T)> = n_values
        .iter()
        .zip(errors)
        .filter(|(_, &e)| e > lit::<T>(FIT_FLOOR))
        .map(|(&n, &e)| (lit::<T>(n as f64).ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let len = lit::<T>(pts.len() as f64);
    let mx = pts.iter().fold(T::zero(), |acc, p| acc + p.0) / len;
    let my = pts.iter().fold(T::zero(), |acc, p| acc + p.1) / len;
    let sxy = pts
        .iter()
        .fold(T::zero(), |acc, p| acc + (p.0 - mx) * (p.1 - my));
    let sxx = pts
        .iter()
        .fold(T::zero(), |acc, p| acc + (p.0 - mx) * (p.0 - mx));
    if sxx == T::zero() {
        return None;
    }
    Some(-(sxy / sxx))
}

fn averaged<T: Real>(
    evo: &AlternatingEvolution<'_, T>,
    psi0: &StateVector<T>,
    window: AveragingWindow<T>,
    n: usize,
    w_cavity: &Cavity1D<T>,
) -> Result<TimeAverage<T>> {
    if window.window <= T::zero() {
        return Err(Error::Domain("averaging window must be positive".into()));
    }
    if window.samples < 4 {
        return Err(Error::Domain(
            "time averaging needs at least 4 samples".into(),
        ));
    }
    let last = window.samples - 1;
    let errors = (0..window.samples)
        .into_par_iter()
        .map(|k| {
            let t = window.window * lit::<T>(k as f64) / lit::<T>(last as f64);
            let approx = evo.apply(psi0, t, n)?;
            let exact = limit_reference(psi0, t, w_cavity)?;
            Ok(evo.b_distance(&approx, &exact))
        })
        .collect::<Result<Vec<T>>>()?;
    let half = lit::<T>(0.5);
    let interior = errors[1..last].iter().fold(T::zero(), |acc, &e| acc + e);
    let average = (half * (errors[0] + errors[last]) + interior) / lit::<T>(last as f64);
    let max_pointwise = errors
        .iter()
        .fold(T::zero(), |acc, &e| if e > acc { e } else { acc });
    Ok(TimeAverage {
        average,
        max_pointwise,
        pointwise_at_end: errors[last],
    })
}

/// Trapezoidal average over `t ∈ [0, window]` of the pointwise error at fixed `N`.
pub fn time_averaged_error<T: Real>(
    psi0: &StateVector<T>,
    window: AveragingWindow<T>,
    n: usize,
    c1: &Cavity1D<T>,
    c2: &Cavity1D<T>,
    w_cavity: &Cavity1D<T>,
) -> Result<TimeAverage<T>> {
    let evo = AlternatingEvolution::new(c1, c2)?;
    averaged(&evo, psi0, window, n, w_cavity)
}

pub fn convergence_sweep<T: Real>(
    psi0: &StateVector<T>,
    t: T,
    n_values: &[usize],
    c1: &Cavity1D<T>,
    c2: &Cavity1D<T>,
    w_cavity: &Cavity1D<T>,
    window: AveragingWindow<T>,
) -> Result<TrotterReport<T>> {
    if n_values.is_empty() || n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain(
            "N values must be non-empty and strictly increasing".into(),
        ));
    }
    let evo = AlternatingEvolution::new(c1, c2)?;
    let exact = limit_reference(psi0, t, w_cavity)?;
    let rows = n_values
        .par_iter()
        .map(|&n| {
            let approx = evo.apply(psi0, t, n)?;
            let pointwise = evo.b_distance(&approx, &exact);
            let avg = averaged(&evo, psi0, window, n, w_cavity)?;
            Ok((pointwise, avg.average))
        })
        .collect::<Result<Vec<(T, T)>>>()?;
    let (pointwise_errors, time_averaged_errors): (Vec<T>, Vec<T>) = rows.into_iter().unzip();
    let fitted_order = fit_order(n_values, &pointwise_errors);
    Ok(TrotterReport {
        n_values: n_values.to_vec(),
        t,
        pointwise_errors,
        time_averaged_errors,
        fitted_order,
    })
}

/// Penalty-route result for one Robin stiffness `λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyReport<T> {
    pub lambda: T,
    /// Lowest eigenvalues of the cavity built from `Robin(λ) * partner`.
    pub composed_eigenvalues: Vec<T>,
    /// Same for the Dirichlet-composed cavity `I * partner`.
    pub dirichlet_eigenvalues: Vec<T>,
    pub relative_errors: Vec<T>,
    pub max_relative_error: T,
    /// Trotter sweep of the Robin/partner pair, if requested and the partner
    /// leaves the boundary unconstrained.
    pub sweep: Option<TrotterReport<T>>,
}

#[derive(Debug, Clone)]
pub struct PenaltySettings<T> {
    pub cells: usize,
    pub mass: T,
    pub eigen_count: usize,
    /// Trotter sweep of each Robin/partner pair, run only when the partner
    /// leaves the boundary unconstrained.
    pub sweep: Option<SweepSettings<T>>,
}

#[derive(Debug, Clone)]
pub struct SweepSettings<T> {
    pub t: T,
    pub n_values: Vec<usize>,
    pub window: AveragingWindow<T>,
}

/// Replaces the Dirichlet member of a pair by Robin coupling `K = λI` and
/// tracks how the composed cavity approaches the Dirichlet composition.
pub fn penalty_dirichlet<T: Real>(
    lambdas: &[T],
    partner: &BoundaryUnitary<T>,
    psi0: &StateVector<T>,
    settings: &PenaltySettings<T>,
) -> Result<Vec<PenaltyReport<T>>> {
    if lambdas.iter().any(|&l| l < T::zero()) || lambdas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain(
            "penalty strengths must be nonnegative and ascending".into(),
        ));
    }
    let dim = partner.dim();
    let target = compose(&BoundaryUnitary::dirichlet(dim), partner)?;
    let target_cavity = build_cavity(&target, settings.cells, settings.mass)?;
    let dirichlet_eigenvalues = target_cavity.spectrum(settings.eigen_count)?;
    let partner_cavity = build_cavity(partner, settings.cells, settings.mass)?;
    let unconstrained = partner_cavity.constraint_rank() == 0;

    lambdas
        .par_iter()
        .map(|&lambda| {
            let robin = BoundaryUnitary::robin(&vec![lambda; dim])?;
            let w = compose(&robin, partner)?;
            let w_cavity = build_cavity(&w, settings.cells, settings.mass)?;
            let composed_eigenvalues = w_cavity.spectrum(settings.eigen_count)?;
            let relative_errors: Vec<T> = composed_eigenvalues
                .iter()
                .zip(&dirichlet_eigenvalues)
                .map(|(&e, &d)| (e - d).abs() / d.abs())
                .collect();
            let max_relative_error =
                relative_errors
                    .iter()
                    .fold(T::zero(), |acc, &e| if e > acc { e } else { acc });
            let sweep = match &settings.sweep {
                Some(sw) if unconstrained => {
                    let robin_cavity = build_cavity(&robin, settings.cells, settings.mass)?;
                    Some(convergence_sweep(
                        psi0,
                        sw.t,
                        &sw.n_values,
                        &robin_cavity,
                        &partner_cavity,
                        &w_cavity,
                        sw.window,
                    )?)
                }
                _ => None,
            };
            Ok(PenaltyReport {
                lambda,
                composed_eigenvalues,
                dirichlet_eigenvalues: dirichlet_eigenvalues.clone(),
                relative_errors,
                max_relative_error,
                sweep,
            })
        })
        .collect()
}
