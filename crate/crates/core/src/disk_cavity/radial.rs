use std::sync::OnceLock;

use nalgebra::{Complex, DMatrix, DVector};
use rayon::prelude::*;

use super::model::{DiskModeModel, ModeCondition, MIN_RADIAL_CELLS};
use super::modes::{mode_index, mode_of, BoundaryModeVector};
use crate::error::{Error, Result};
use crate::linalg::symmetric_pencil_values;
use crate::quadrature::kronrod15;
use crate::scalar::{lit, re, Real};

/// Full nodal matrices of one angular mode on `r_j = j / cells`:
/// `S = ∫u′v′ r dr + m² ∫uv/r dr` and `B = ∫uv r dr`.
///
/// For `m ≠ 0` the `1/r` integrals on the first cell are only valid for
/// node 1, since node 0 is removed by the regularity condition.
pub fn assemble_radial<T: Real>(cells: usize, m: i64) -> (DMatrix<T>, DMatrix<T>) {
    let n = cells + 1;
    let h = T::one() / lit::<T>(cells as f64);
    let (third, sixth, twelfth, quarter, half) = (
        lit::<T>(1.0 / 3.0),
        lit::<T>(1.0 / 6.0),
        lit::<T>(1.0 / 12.0),
        lit::<T>(0.25),
        lit::<T>(0.5),
    );
    let m2 = lit::<T>((m * m) as f64);
    let mut s = DMatrix::<T>::zeros(n, n);
    let mut b = DMatrix::<T>::zeros(n, n);
    for e in 0..cells {
        let a = lit::<T>(e as f64) * h;
        let bb = a + h;
        let grad = (a + bb) * half / h;
        let (l, r) = (e, e + 1);
        s[(l, l)] += grad;
        s[(r, r)] += grad;
        s[(l, r)] -= grad;
        s[(r, l)] -= grad;

        b[(l, l)] += a * h * third + h * h * twelfth;
        b[(r, r)] += a * h * third + h * h * quarter;
        let off = a * h * sixth + h * h * twelfth;
        b[(l, r)] += off;
        b[(r, l)] += off;

        if m != 0 {
            let (ll, rr, lr) = if e == 0 {
                (T::zero(), half, T::zero())
            } else {
                let inv_h2 = T::one() / (h * h);
                let left = |x: T| (bb - x) * (bb - x) / x * inv_h2;
                let right = |x: T| (x - a) * (x - a) / x * inv_h2;
                let cross = |x: T| (bb - x) * (x - a) / x * inv_h2;
                (
                    kronrod15(left, a, bb),
                    kronrod15(right, a, bb),
                    kronrod15(cross, a, bb),
                )
            };
            s[(l, l)] += m2 * ll;
            s[(r, r)] += m2 * rr;
            s[(l, r)] += m2 * lr;
            s[(r, l)] += m2 * lr;
        }
    }
    (s, b)
}

/// Reduced radial pencil of one mode, restricted to its free nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialOperator<T: Real> {
    pub mode: i64,
    pub condition: ModeCondition<T>,
    pub free_nodes: Vec<usize>,
    /// `(S + m²M₁/r + k e_M e_Mᵀ) / 2m` on the free nodes.
    pub hamiltonian: DMatrix<T>,
    pub mass_matrix: DMatrix<T>,
}

pub fn radial_operator<T: Real>(model: &DiskModeModel<T>, m: i64) -> Result<RadialOperator<T>> {
    let condition = model.condition(m).ok_or_else(|| {
        Error::Domain(format!(
            "mode {m} outside the truncation |m| <= {}",
            model.m_max()
        ))
    })?;
    let cells = model.radial_cells();
    let (mut s, b) = assemble_radial::<T>(cells, m);
    if let ModeCondition::Robin(k) = condition {
        s[(cells, cells)] += k;
    }
    let first = usize::from(m != 0);
    let last = if condition.is_dirichlet() {
        cells - 1
    } else {
        cells
    };
    let free_nodes: Vec<usize> = (first..=last).collect();
    let scale = T::one() / (lit::<T>(2.0) * model.mass());
    let hamiltonian = s.select_rows(&free_nodes).select_columns(&free_nodes) * scale;
    let mass_matrix = b.select_rows(&free_nodes).select_columns(&free_nodes);
    Ok(RadialOperator {
        mode: m,
        condition,
        free_nodes,
        hamiltonian,
        mass_matrix,
    })
}

/// Lowest `count` eigenvalues of mode `m` of the disk Hamiltonian.
pub fn radial_spectrum<T: Real>(model: &DiskModeModel<T>, m: i64, count: usize) -> Result<Vec<T>> {
    let op = radial_operator(model, m)?;
    let mut values = symmetric_pencil_values(&op.hamiltonian, &op.mass_matrix)?;
    values.truncate(count);
    Ok(values)
}

/// [`radial_spectrum`] for every mode of the truncation, in parallel.
pub fn disk_spectrum<T: Real>(
    model: &DiskModeModel<T>,
    count: usize,
) -> Result<Vec<(i64, Vec<T>)>> {
    (0..=2 * model.m_max())
        .into_par_iter()
        .map(|i| {
            let m = mode_of(model.m_max(), i);
            radial_spectrum(model, m, count).map(|v| (m, v))
        })
        .collect()
}

/// Disk wave function stored as radial nodal profiles `u_m(r_j)` of each
/// angular mode.
#[derive(Debug, Clone)]
pub struct DiskState<T: Real> {
    radial_cells: usize,
    m_max: usize,
    profiles: Vec<DVector<Complex<T>>>,
    split: OnceLock<Box<DirichletSplit<T>>>,
}

impl<T: Real> PartialEq for DiskState<T> {
    fn eq(&self, other: &Self) -> bool {
        self.radial_cells == other.radial_cells
            && self.m_max == other.m_max
            && self.profiles == other.profiles
    }
}

/// `ψ = ψ_D + ψ₀` with `ψ_D` trace-free and `ψ₀` harmonic.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletSplit<T: Real> {
    pub regular: DiskState<T>,
    pub harmonic: DiskState<T>,
}

impl<T: Real> DiskState<T> {
    pub fn new(
        radial_cells: usize,
        m_max: usize,
        profiles: Vec<DVector<Complex<T>>>,
    ) -> Result<Self> {
        if radial_cells < MIN_RADIAL_CELLS {
            return Err(Error::Domain(format!(
                "radial grid needs at least {MIN_RADIAL_CELLS} cells, got {radial_cells}"
            )));
        }
        if profiles.len() != 2 * m_max + 1 {
            return Err(Error::Shape(format!(
                "expected {} radial profiles, got {}",
                2 * m_max + 1,
                profiles.len()
            )));
        }
        if profiles.iter().any(|p| p.len() != radial_cells + 1) {
            return Err(Error::Shape(format!(
                "radial profiles must have {} nodes",
                radial_cells + 1
            )));
        }
        if profiles
            .iter()
            .flat_map(|p| p.iter())
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::Domain("disk state must be finite".into()));
        }
        Ok(Self {
            radial_cells,
            m_max,
            profiles,
            split: OnceLock::new(),
        })
    }

    /// Samples `f(m, r)` on the radial nodes of every mode.
    pub fn from_fn(
        radial_cells: usize,
        m_max: usize,
        f: impl Fn(i64, T) -> Complex<T>,
    ) -> Result<Self> {
        let h = T::one() / lit::<T>(radial_cells as f64);
        let profiles = (0..=2 * m_max)
            .map(|i| {
                let m = mode_of(m_max, i);
                DVector::from_fn(radial_cells + 1, |j, _| f(m, lit::<T>(j as f64) * h))
            })
            .collect();
        Self::new(radial_cells, m_max, profiles)
    }

    pub fn radial_cells(&self) -> usize {
        self.radial_cells
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn profile(&self, m: i64) -> Option<&DVector<Complex<T>>> {
        mode_index(self.m_max, m).map(|i| &self.profiles[i])
    }

    pub fn profiles(&self) -> &[DVector<Complex<T>>] {
        &self.profiles
    }

    /// Boundary values `u_m(1)` as an `H^{1/2}` mode vector.
    pub fn trace(&self) -> BoundaryModeVector<T> {
        let coefficients = self.profiles.iter().map(|p| p[self.radial_cells]).collect();
        BoundaryModeVector::new(self.m_max, coefficients, lit(0.5))
            .expect("profiles are finite and complete")
    }

    /// Largest nodal modulus over all modes.
    pub fn max_abs(&self) -> T {
        self.profiles
            .iter()
            .flat_map(|p| p.iter())
            .fold(T::zero(), |acc, c| acc.max(c.norm_sqr().sqrt()))
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        if self.radial_cells != other.radial_cells || self.m_max != other.m_max {
            return Err(Error::Shape("disk states live on different grids".into()));
        }
        let profiles = self
            .profiles
            .iter()
            .zip(&other.profiles)
            .map(|(a, b)| a - b)
            .collect();
        Self::new(self.radial_cells, self.m_max, profiles)
    }

    /// Cached Dirichlet decomposition.
    pub fn decomposition(&self) -> &DirichletSplit<T> {
        self.split.get_or_init(|| {
            let harmonic = harmonic_extension(&self.trace(), self.radial_cells)
                .expect("grid already validated");
            let regular = self.difference(&harmonic).expect("same grid");
            Box::new(DirichletSplit { regular, harmonic })
        })
    }
}

/// Disk-harmonic extension: mode `m` gets the profile `g_m r^{|m|}`.
pub fn harmonic_extension<T: Real>(
    g: &BoundaryModeVector<T>,
    radial_cells: usize,
) -> Result<DiskState<T>> {
    DiskState::from_fn(radial_cells, g.m_max(), |m, r: T| {
        let c = g.coefficient(m).unwrap_or_else(|| re(T::zero()));
        c * r.powi(m.unsigned_abs() as i32)
    })
}

pub fn dirichlet_decompose<T: Real>(psi: &DiskState<T>) -> DirichletSplit<T> {
    psi.decomposition().clone()
}

/// Per-mode residual of the centred finite-difference radial Laplacian
/// `u″ + u′/r − m²u/r²` on interior nodes, in the discrete `r dr` norm.
pub fn laplacian_residual<T: Real>(state: &DiskState<T>) -> Vec<(i64, T)> {
    let cells = state.radial_cells;
    let h = T::one() / lit::<T>(cells as f64);
    let two = lit::<T>(2.0);
    state
        .profiles
        .iter()
        .enumerate()
        .map(|(i, u)| {
            let m = mode_of(state.m_max, i);
            let m2 = lit::<T>((m * m) as f64);
            let mut acc = T::zero();
            for j in 1..cells {
                let r = lit::<T>(j as f64) * h;
                let second = (u[j + 1] - u[j] * two + u[j - 1]) / (h * h);
                let first = (u[j + 1] - u[j - 1]) / (two * h * r);
                let res = second + first - u[j] * (m2 / (r * r));
                acc += h * r * res.norm_sqr();
            }
            (m, acc.sqrt())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::bessel_j_zero;

    fn dirichlet(m_max: usize, cells: usize) -> DiskModeModel<f64> {
        DiskModeModel::uniform(m_max, ModeCondition::Dirichlet, cells, 0.5).unwrap()
    }

    #[test]
    fn mass_matrix_integrates_the_area_weight() {
        let (_, b) = assemble_radial::<f64>(16, 0);
        let ones = DVector::from_element(17, 1.0);
        assert!(((ones.transpose() * &b * &ones)[(0, 0)] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn inverse_radius_term_matches_exact_integral() {
        // u = r on [0, 1]: ∫ u²/r dr = 1/2, and ∫u′² r dr = 1/2.
        let cells = 32;
        let (s, _) = assemble_radial::<f64>(cells, 1);
        let u = DVector::from_fn(cells + 1, |j, _| j as f64 / cells as f64);
        let u = u.rows(1, cells).into_owned();
        let s = s.view((1, 1), (cells, cells)).into_owned();
        assert!(((u.transpose() * s * &u)[(0, 0)] - 1.0).abs() < 1e-13);
    }

    #[test]
    fn lowest_dirichlet_modes_match_bessel_zeros() {
        let model = dirichlet(1, 512);
        for m in [0i64, 1] {
            let j = bessel_j_zero(m as u32, 1).unwrap();
            let e = radial_spectrum(&model, m, 1).unwrap()[0];
            assert!(
                (e - j * j).abs() / (j * j) < 1e-3,
                "m={m}: {e} vs {}",
                j * j
            );
        }
    }

    #[test]
    fn neumann_ground_state_is_zero() {
        let model = DiskModeModel::uniform(0, ModeCondition::Robin(0.0), 64, 0.5).unwrap();
        let e: f64 = radial_spectrum(&model, 0, 1).unwrap()[0];
        assert!(e.abs() < 1e-10);
    }

    #[test]
    fn harmonic_extension_of_constant_and_z() {
        let g0 = BoundaryModeVector::<f64>::delta(2, 0, 0.5).unwrap();
        let psi = harmonic_extension(&g0, 16).unwrap();
        assert!(psi.profile(0).unwrap().iter().all(|c| *c == re(1.0)));
        let g1 = BoundaryModeVector::<f64>::delta(2, 1, 0.5).unwrap();
        let psi = harmonic_extension(&g1, 16).unwrap();
        let p = psi.profile(1).unwrap();
        assert!(p
            .iter()
            .enumerate()
            .all(|(j, c)| (c.re - j as f64 / 16.0).abs() < 1e-15));
        assert_eq!(
            psi.trace(),
            BoundaryModeVector::new(2, g1.coefficients().to_vec(), 0.5).unwrap()
        );
    }

    #[test]
    fn zero_trace_input_has_no_harmonic_part() {
        let psi =
            DiskState::<f64>::from_fn(
                16,
                2,
                |m, r| if m == 1 { re(r * (1.0 - r)) } else { re(0.0) },
            )
            .unwrap();
        let split = dirichlet_decompose(&psi);
        assert!(split.harmonic.max_abs() == 0.0);
        assert_eq!(split.regular, psi);
    }

    #[test]
    fn decomposition_traces_and_idempotence() {
        let psi =
            DiskState::<f64>::from_fn(32, 3, |m, r| re((1.0 + m as f64) * (r * 3.0).cos() + r * r))
                .unwrap();
        let split = psi.decomposition();
        assert!(split
            .regular
            .trace()
            .coefficients()
            .iter()
            .all(|c| c.re == 0.0 && c.im == 0.0));
        let again = dirichlet_decompose(&split.regular);
        assert!(again.harmonic.max_abs() == 0.0);
    }

    #[test]
    fn disk_spectrum_covers_every_mode() {
        let model = dirichlet(2, 16);
        let all = disk_spectrum(&model, 2).unwrap();
        assert_eq!(all.len(), 5);
        assert_eq!(all[0].1, all[4].1);
        assert!(all.iter().all(|(_, v)| v.len() == 2));
    }
}
