//! Piecewise-linear finite-element realization of a boundary condition on
//! the interval `(0, 1)`.
//!
//! The discrete kinetic form is `q(ψ) = [ψ†Sψ + φ†Kφ] / 2m` with boundary
//! data `φ = (ψ_0, ψ_M)`. The constraint `Pφ = 0` is imposed by restricting
//! to an orthonormal basis `Z` of the admissible nodal vectors, so the
//! Hamiltonian is the pencil `(Z†ÂZ, Z†BZ)` with `Â = (S + K̂)/2m`.

use std::sync::OnceLock;

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::boundary_algebra::{
    decompose, meet_and_average, BoundaryUnitary, DEFAULT_CLUSTER_TOL, DEFAULT_NULL_TOL,
};
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_defect, hermitian_part, hermitian_pencil, hermitian_pencil_values, identity,
    projector_range, real_to_complex, weighted_norm_sq, BorderedPencil,
};
use crate::scalar::{cx, lit, re, to_f64, CMatrix, CVector, Real};

pub const MIN_CELLS: usize = 8;
pub const DEFAULT_MASS: f64 = 0.5;

/// Relative tolerance used when checking that a state lies in the
/// admissible subspace.
const MEMBERSHIP_TOL: f64 = 1e-10;

#[derive(Debug)]
struct Spectral<T: Real> {
    eigenvalues: Vec<T>,
    /// `B_r`-orthonormal eigenvectors in reduced coordinates.
    eigenvectors: CMatrix<T>,
}

/// Finite-element model of `T_U` on `(0, 1)`.
#[derive(Debug)]
pub struct Cavity1D<T: Real> {
    cells: usize,
    mass: T,
    stiffness: DMatrix<T>,
    mass_matrix: DMatrix<T>,
    boundary_k: CMatrix<T>,
    constraint_p: CMatrix<T>,
    reduced_basis: CMatrix<T>,
    reduced_hamiltonian: CMatrix<T>,
    reduced_mass: CMatrix<T>,
    spectral: OnceLock<Spectral<T>>,
}

impl<T: Real> Clone for Cavity1D<T> {
    fn clone(&self) -> Self {
        Self {
            cells: self.cells,
            mass: self.mass,
            stiffness: self.stiffness.clone(),
            mass_matrix: self.mass_matrix.clone(),
            boundary_k: self.boundary_k.clone(),
            constraint_p: self.constraint_p.clone(),
            reduced_basis: self.reduced_basis.clone(),
            reduced_hamiltonian: self.reduced_hamiltonian.clone(),
            reduced_mass: self.reduced_mass.clone(),
            spectral: OnceLock::new(),
        }
    }
}

/// Assembles the cavity for the boundary unitary `u` (dimension 2).
pub fn build_cavity<T: Real>(u: &BoundaryUnitary<T>, cells: usize, mass: T) -> Result<Cavity1D<T>> {
    if u.dim() != 2 {
        return Err(Error::Shape(format!(
            "interval boundary unitary must be 2x2, got dim {}",
            u.dim()
        )));
    }
    let d = decompose(u, lit(DEFAULT_CLUSTER_TOL))?;
    Cavity1D::from_form(&d.p, &d.k, cells, mass)
}

/// Stiffness `∫φ'_iφ'_j` and consistent mass `∫φ_iφ_j` for linear elements on
/// a uniform grid of `cells` cells.
pub fn assemble_p1<T: Real>(cells: usize) -> (DMatrix<T>, DMatrix<T>) {
    let n = cells + 1;
    let h = T::one() / lit::<T>(cells as f64);
    let mut s = DMatrix::<T>::zeros(n, n);
    let mut b = DMatrix::<T>::zeros(n, n);
    let six = lit::<T>(6.0);
    for e in 0..cells {
        let (i, j) = (e, e + 1);
        s[(i, i)] += T::one() / h;
        s[(j, j)] += T::one() / h;
        s[(i, j)] -= T::one() / h;
        s[(j, i)] -= T::one() / h;
        b[(i, i)] += lit::<T>(2.0) * h / six;
        b[(j, j)] += lit::<T>(2.0) * h / six;
        b[(i, j)] += h / six;
        b[(j, i)] += h / six;
    }
    (s, b)
}

impl<T: Real> Cavity1D<T> {
    /// Builds the cavity from a closed form `(P, K)` with `KP = PK = 0`.
    pub fn from_form(p: &CMatrix<T>, k: &CMatrix<T>, cells: usize, mass: T) -> Result<Self> {
        if cells < MIN_CELLS {
            return Err(Error::Domain(format!(
                "at least {MIN_CELLS} cells required, got {cells}"
            )));
        }
        if mass <= T::zero() {
            return Err(Error::Domain("particle mass must be positive".into()));
        }
        if p.shape() != (2, 2) || k.shape() != (2, 2) {
            return Err(Error::Shape("boundary projection and K must be 2x2".into()));
        }
        let tol = lit::<T>(1e-10);
        if hermitian_defect(k) > tol * (T::one() + k.norm()) {
            return Err(Error::Domain("boundary operator K is not Hermitian".into()));
        }
        if (k * p).norm() > tol * (T::one() + k.norm()) {
            return Err(Error::Domain("K is not supported on Ran(I - P)".into()));
        }
        let (stiffness, mass_matrix) = assemble_p1::<T>(cells);
        let q = identity::<T>(2) - p;
        let boundary_basis = projector_range(&q)?;
        let r_q = boundary_basis.ncols();
        let n = cells + 1;
        let reduced_dim = cells - 1 + r_q;
        let mut z = CMatrix::<T>::zeros(n, reduced_dim);
        for c in 0..r_q {
            z[(0, c)] = boundary_basis[(0, c)];
            z[(cells, c)] = boundary_basis[(1, c)];
        }
        for j in 1..cells {
            z[(j, r_q + j - 1)] = re(T::one());
        }
        let mut cavity = Self {
            cells,
            mass,
            stiffness,
            mass_matrix,
            boundary_k: hermitian_part(k),
            constraint_p: hermitian_part(p),
            reduced_basis: z,
            reduced_hamiltonian: CMatrix::zeros(0, 0),
            reduced_mass: CMatrix::zeros(0, 0),
            spectral: OnceLock::new(),
        };
        cavity.reduced_hamiltonian = cavity.compress(&cavity.full_hamiltonian());
        cavity.reduced_mass = cavity.compress(&real_to_complex(&cavity.mass_matrix));
        Ok(cavity)
    }

    /// `Z†AZ`, using that each column of `Z` has at most two nonzero nodes.
    fn compress(&self, a: &CMatrix<T>) -> CMatrix<T> {
        let z = &self.reduced_basis;
        let columns: Vec<Vec<(usize, Complex<T>)>> = (0..z.ncols())
            .map(|k| {
                (0..z.nrows())
                    .filter(|&r| z[(r, k)] != re(T::zero()))
                    .map(|r| (r, z[(r, k)]))
                    .collect()
            })
            .collect();
        let n = columns.len();
        let mut out = CMatrix::<T>::zeros(n, n);
        for (i, ci) in columns.iter().enumerate() {
            for (j, cj) in columns.iter().enumerate() {
                let mut acc = re(T::zero());
                for &(r, zr) in ci {
                    for &(s, zs) in cj {
                        acc += zr.conj() * a[(r, s)] * zs;
                    }
                }
                out[(i, j)] = acc;
            }
        }
        hermitian_part(&out)
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn mass(&self) -> T {
        self.mass
    }

    pub fn grid_spacing(&self) -> T {
        T::one() / lit::<T>(self.cells as f64)
    }

    pub fn node(&self, j: usize) -> T {
        lit::<T>(j as f64) / lit::<T>(self.cells as f64)
    }

    pub fn stiffness(&self) -> &DMatrix<T> {
        &self.stiffness
    }

    pub fn mass_matrix(&self) -> &DMatrix<T> {
        &self.mass_matrix
    }

    pub fn boundary_k(&self) -> &CMatrix<T> {
        &self.boundary_k
    }

    pub fn constraint_p(&self) -> &CMatrix<T> {
        &self.constraint_p
    }

    pub fn reduced_basis(&self) -> &CMatrix<T> {
        &self.reduced_basis
    }

    pub fn reduced_dim(&self) -> usize {
        self.reduced_basis.ncols()
    }

    /// Number of independent boundary constraints (`rank P`).
    pub fn constraint_rank(&self) -> usize {
        self.cells + 1 - self.reduced_dim()
    }

    /// `Â = (S + K̂)/2m` on the full nodal space, `K` embedded at nodes `0, M`.
    pub fn full_hamiltonian(&self) -> CMatrix<T> {
        let mut a = real_to_complex(&self.stiffness);
        let ends = [0, self.cells];
        for (bi, &ni) in ends.iter().enumerate() {
            for (bj, &nj) in ends.iter().enumerate() {
                a[(ni, nj)] += self.boundary_k[(bi, bj)];
            }
        }
        a * re(T::one() / (lit::<T>(2.0) * self.mass))
    }

    /// `Z†ÂZ`.
    pub fn hamiltonian(&self) -> &CMatrix<T> {
        &self.reduced_hamiltonian
    }

    /// `Z†BZ`.
    pub fn reduced_mass(&self) -> &CMatrix<T> {
        &self.reduced_mass
    }

    /// Orthogonal projector `ZZ†` onto the admissible nodal vectors.
    pub fn admissible_projector(&self) -> CMatrix<T> {
        &self.reduced_basis * self.reduced_basis.adjoint()
    }

    /// `ZZ†ÂZZ†`: the compressed Hamiltonian in nodal coordinates.
    pub fn embedded_hamiltonian(&self) -> CMatrix<T> {
        let z = &self.reduced_basis;
        z * &self.reduced_hamiltonian * z.adjoint()
    }

    /// Euclidean projection of nodal values onto the admissible subspace.
    pub fn project(&self, psi: &StateVector<T>) -> Result<StateVector<T>> {
        self.check_len(psi)?;
        let z = &self.reduced_basis;
        Ok(StateVector::new(z * (z.adjoint() * psi.coefficients())))
    }

    pub fn contains(&self, psi: &StateVector<T>) -> Result<bool> {
        self.check_len(psi)?;
        let z = &self.reduced_basis;
        let c = psi.coefficients();
        let residual = (c - z * (z.adjoint() * c)).norm();
        Ok(residual <= lit::<T>(MEMBERSHIP_TOL) * (T::one() + c.norm()))
    }

    fn check_len(&self, psi: &StateVector<T>) -> Result<()> {
        if psi.len() != self.cells + 1 {
            return Err(Error::Shape(format!(
                "state has {} nodal values, cavity expects {}",
                psi.len(),
                self.cells + 1
            )));
        }
        Ok(())
    }

    fn reduced_coordinates(&self, psi: &StateVector<T>) -> Result<CVector<T>> {
        if !self.contains(psi)? {
            return Err(Error::Domain(
                "state violates the boundary constraint of this cavity".into(),
            ));
        }
        Ok(self.reduced_basis.adjoint() * psi.coefficients())
    }

    fn spectral(&self) -> Result<&Spectral<T>> {
        if let Some(s) = self.spectral.get() {
            return Ok(s);
        }
        let (eigenvalues, eigenvectors) =
            hermitian_pencil(&self.reduced_hamiltonian, &self.reduced_mass)?;
        Ok(self.spectral.get_or_init(|| Spectral {
            eigenvalues,
            eigenvectors,
        }))
    }

    /// Ascending eigenvalues and `B_r`-orthonormal reduced eigenvectors.
    pub(crate) fn spectral_parts(&self) -> Result<(&[T], &CMatrix<T>)> {
        let s = self.spectral()?;
        Ok((&s.eigenvalues, &s.eigenvectors))
    }

    /// Lowest `count` eigenvalues of the pencil, ascending.
    pub fn spectrum(&self, count: usize) -> Result<Vec<T>> {
        if count > self.reduced_dim() {
            return Err(Error::Domain(format!(
                "requested {count} eigenvalues from a {}-dimensional space",
                self.reduced_dim()
            )));
        }
        let values = match self.spectral.get() {
            Some(s) => s.eigenvalues.clone(),
            None => {
                // Nodes 1 and M-1 join the boundary columns in the border so
                // that the remaining path block stays regular at every
                // eigenvalue of the pencil.
                let n = self.reduced_dim();
                let r_q = n + 1 - self.cells;
                let border: Vec<usize> = (0..=r_q).chain([n - 1]).collect();
                let path: Vec<usize> = (r_q + 1..n - 1).collect();
                match BorderedPencil::new(
                    &self.reduced_hamiltonian,
                    &self.reduced_mass,
                    &border,
                    &path,
                ) {
                    Some(pencil) => return Ok(pencil.lowest(count)),
                    None => hermitian_pencil_values(&self.reduced_hamiltonian, &self.reduced_mass)?,
                }
            }
        };
        Ok(values.into_iter().take(count).collect())
    }

    /// Eigenpairs as nodal state vectors, `B`-normalized, ascending energy.
    pub fn eigenstates(&self, count: usize) -> Result<Vec<(T, StateVector<T>)>> {
        let s = self.spectral()?;
        Ok((0..count.min(s.eigenvalues.len()))
            .map(|i| {
                let v = &self.reduced_basis * s.eigenvectors.column(i);
                (s.eigenvalues[i], StateVector::new(v))
            })
            .collect())
    }

    /// `e^{-itH} ψ0` by spectral decomposition of the pencil.
    pub fn propagate(&self, psi0: &StateVector<T>, t: T) -> Result<StateVector<T>> {
        let c0 = self.reduced_coordinates(psi0)?;
        if t == T::zero() {
            return Ok(psi0.clone());
        }
        let s = self.spectral()?;
        let mut a = s.eigenvectors.adjoint() * (&self.reduced_mass * c0);
        for (ai, &e) in a.iter_mut().zip(s.eigenvalues.iter()) {
            *ai *= phase(-e * t);
        }
        Ok(StateVector::new(
            &self.reduced_basis * (&s.eigenvectors * a),
        ))
    }

    /// Full nodal-space matrix of `e^{-iτH}`, acting as zero off the
    /// admissible subspace.
    pub fn step_matrix(&self, tau: T) -> Result<CMatrix<T>> {
        let s = self.spectral()?;
        let mut left = s.eigenvectors.clone();
        for (mut col, &e) in left.column_iter_mut().zip(s.eigenvalues.iter()) {
            col *= phase(-e * tau);
        }
        let right = s.eigenvectors.adjoint() * &self.reduced_mass * self.reduced_basis.adjoint();
        Ok(&self.reduced_basis * (left * right))
    }

    pub fn boundary_trace(&self, psi: &StateVector<T>) -> Result<[Complex<T>; 2]> {
        boundary_trace(psi, self)
    }

    pub fn b_norm(&self, psi: &StateVector<T>) -> Result<T> {
        self.check_len(psi)?;
        Ok(psi.b_norm(&self.mass_matrix))
    }

    pub fn spec(&self) -> CavitySpec {
        CavitySpec {
            cells: self.cells,
            mass: to_f64(self.mass),
            boundary_k: matrix_to_rows(&self.boundary_k),
            constraint_p: matrix_to_rows(&self.constraint_p),
        }
    }

    pub fn from_spec(spec: &CavitySpec) -> Result<Self> {
        let k = rows_to_matrix::<T>(&spec.boundary_k)?;
        let p = rows_to_matrix::<T>(&spec.constraint_p)?;
        Self::from_form(&p, &k, spec.cells, lit(spec.mass))
    }
}

#[inline]
fn phase<T: Real>(angle: T) -> Complex<T> {
    cx(angle.cos(), angle.sin())
}

/// Serializable description of a cavity: grid, mass, `K` and `P`.
///
/// Complex entries are `[re, im]` pairs, matrices are row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CavitySpec {
    pub cells: usize,
    pub mass: f64,
    pub boundary_k: Vec<Vec<[f64; 2]>>,
    pub constraint_p: Vec<Vec<[f64; 2]>>,
}

pub fn matrix_to_rows<T: Real>(m: &CMatrix<T>) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|r| {
            (0..m.ncols())
                .map(|c| [to_f64(m[(r, c)].re), to_f64(m[(r, c)].im)])
                .collect()
        })
        .collect()
}

pub fn rows_to_matrix<T: Real>(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix<T>> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(Error::Shape("ragged matrix rows".into()));
    }
    Ok(CMatrix::from_fn(n, m, |r, c| {
        cx(lit(rows[r][c][0]), lit(rows[r][c][1]))
    }))
}

/// Nodal values of a wave function on the interval grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Real> {
    coefficients: CVector<T>,
}

impl<T: Real> StateVector<T> {
    pub fn new(coefficients: CVector<T>) -> Self {
        Self { coefficients }
    }

    /// Samples `f` at the nodes `x_j = j / cells`.
    pub fn from_fn(cells: usize, f: impl Fn(T) -> Complex<T>) -> Self {
        let m = lit::<T>(cells as f64);
        Self::new(DVector::from_fn(
            cells + 1,
            |j, _| f(lit::<T>(j as f64) / m),
        ))
    }

    /// Gaussian bump `exp(-(x - center)²/(2 width²))`, normalized in the
    /// consistent-mass inner product.
    pub fn gaussian(cells: usize, center: T, width: T) -> Self {
        let two = lit::<T>(2.0);
        let raw = Self::from_fn(cells, |x| {
            let d = (x - center) / width;
            re((-(d * d) / two).exp())
        });
        let (_, b) = assemble_p1::<T>(cells);
        let norm = raw.b_norm(&b);
        Self::new(raw.coefficients / re(norm))
    }

    pub fn coefficients(&self) -> &CVector<T> {
        &self.coefficients
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `√(ψ†Bψ)`.
    pub fn b_norm(&self, mass_matrix: &DMatrix<T>) -> T {
        weighted_norm_sq(&self.coefficients, &real_to_complex(mass_matrix))
            .max(T::zero())
            .sqrt()
    }
}

pub fn boundary_trace<T: Real>(
    psi: &StateVector<T>,
    cavity: &Cavity1D<T>,
) -> Result<[Complex<T>; 2]> {
    cavity.check_len(psi)?;
    let c = psi.coefficients();
    Ok([c[0], c[cavity.cells]])
}

/// Cavity of the half form sum: `K12` averaged on the meet of the `Q`
/// ranges, bulk matrices unchanged.
pub fn form_sum<T: Real>(c1: &Cavity1D<T>, c2: &Cavity1D<T>) -> Result<Cavity1D<T>> {
    if c1.cells != c2.cells {
        return Err(Error::Shape(format!(
            "grid mismatch: {} vs {} cells",
            c1.cells, c2.cells
        )));
    }
    if c1.mass != c2.mass {
        return Err(Error::Shape("particle mass mismatch".into()));
    }
    let eye = identity::<T>(2);
    let q1 = &eye - &c1.constraint_p;
    let q2 = &eye - &c2.constraint_p;
    let (q12, k12) = meet_and_average(
        &q1,
        &c1.boundary_k,
        &q2,
        &c2.boundary_k,
        lit(DEFAULT_NULL_TOL),
    )?;
    Cavity1D::from_form(&(eye - q12), &k12, c1.cells, c1.mass)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepresentationCheck<T> {
    /// Frobenius distance of the compressed Hamiltonians.
    pub defect: T,
    pub reference_norm: T,
    pub passed: bool,
}

/// Compares the form-sum cavity with the cavity built from the composed
/// unitary, through their compressions `ZZ†ÂZZ†` on the nodal space.
pub fn verify_representation<T: Real>(
    c12: &Cavity1D<T>,
    w_cavity: &Cavity1D<T>,
) -> Result<RepresentationCheck<T>> {
    if c12.cells != w_cavity.cells {
        return Err(Error::Shape("grid mismatch".into()));
    }
    if c12.reduced_dim() != w_cavity.reduced_dim() {
        return Err(Error::ConstraintInconsistency(format!(
            "reduced dimensions differ: form sum {} vs composed {}",
            c12.reduced_dim(),
            w_cavity.reduced_dim()
        )));
    }
    let a = c12.embedded_hamiltonian();
    let b = w_cavity.embedded_hamiltonian();
    let defect = (&a - &b).norm();
    let reference_norm = b.norm();
    Ok(RepresentationCheck {
        defect,
        reference_norm,
        passed: defect <= lit::<T>(1e-10) * reference_norm,
    })
}
