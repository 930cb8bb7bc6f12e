//! Finite-dimensional boundary-unitary calculus.
//!
//! A boundary unitary `U` splits into the eigenvalue-1 projection `P`, its
//! complement `Q = I - P` and the reduced unitary `V = QUQ`. The Hermitian
//! boundary operator is `K = -C⁻¹(V) Q` where `C(A) = (A - i)(A + i)⁻¹`, and
//! conversely `U = P + C(-K) Q`. Two boundary conditions compose by meeting
//! their `Q` ranges and averaging their `K` operators.

use std::f64::consts::PI;

use nalgebra::{Complex, ComplexField};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    column_projector, ensure_same_dim, ensure_square, hermitian_defect, hermitian_eigen,
    hermitian_part, identity, normal_eigen,
};
use crate::scalar::{imag_unit, lit, polar, re, to_f64, CMatrix, Real};

pub const DEFAULT_UNITARITY_TOL: f64 = 1e-10;
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;
pub const DEFAULT_NULL_TOL: f64 = 1e-10;
pub const DEFAULT_HERMITIAN_TOL: f64 = 1e-10;
pub const DEFAULT_GAP_THRESHOLD: f64 = 1e-6;

/// Eigenvalues closer to 1 than `AMBIGUITY_FACTOR * cluster_tol` but outside
/// the cluster are reported, never silently absorbed.
pub const AMBIGUITY_FACTOR: f64 = 10.0;

/// Numerical thresholds used by the calculus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    pub unitarity: T,
    pub cluster: T,
    pub null: T,
    pub hermitian: T,
    pub gap_threshold: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self {
            unitarity: lit(DEFAULT_UNITARITY_TOL),
            cluster: lit(DEFAULT_CLUSTER_TOL),
            null: lit(DEFAULT_NULL_TOL),
            hermitian: lit(DEFAULT_HERMITIAN_TOL),
            gap_threshold: lit(DEFAULT_GAP_THRESHOLD),
        }
    }
}

/// A validated unitary on the (truncated) boundary space.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryUnitary<T: Real> {
    matrix: CMatrix<T>,
    unitarity_tol: T,
}

impl<T: Real> BoundaryUnitary<T> {
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        Self::with_tolerance(matrix, lit(DEFAULT_UNITARITY_TOL))
    }

    pub fn with_tolerance(matrix: CMatrix<T>, unitarity_tol: T) -> Result<Self> {
        let diag = validate_unitary(&matrix, unitarity_tol)?;
        if matrix.nrows() == 0 {
            return Err(Error::Shape("boundary unitary must have dim >= 1".into()));
        }
        if !diag.is_unitary {
            return Err(Error::Domain(format!(
                "matrix is not unitary: defect {:.3e} exceeds {:.3e}",
                to_f64(diag.defect),
                to_f64(unitarity_tol) * matrix.nrows() as f64
            )));
        }
        Ok(Self {
            matrix,
            unitarity_tol,
        })
    }

    /// `U = I`: Dirichlet on every boundary direction.
    pub fn dirichlet(dim: usize) -> Self {
        Self {
            matrix: identity(dim),
            unitarity_tol: lit(DEFAULT_UNITARITY_TOL),
        }
    }

    /// `U = -I`: Neumann.
    pub fn neumann(dim: usize) -> Self {
        Self {
            matrix: -identity::<T>(dim),
            unitarity_tol: lit(DEFAULT_UNITARITY_TOL),
        }
    }

    /// Interval periodic conditions `ψ(0) = ψ(1)`, `ψ′(0) = ψ′(1)`:
    /// `U = [[0, -1], [-1, 0]]`, i.e. `P` onto `(1, -1)/√2` and `K = 0`.
    pub fn periodic() -> Self {
        let zero = re(T::zero());
        let m = -re(T::one());
        Self {
            matrix: CMatrix::from_row_slice(2, 2, &[zero, m, m, zero]),
            unitarity_tol: lit(DEFAULT_UNITARITY_TOL),
        }
    }

    /// Diagonal Robin unitary with `K = diag(k)`, i.e. entries `C(-k_j)`.
    pub fn robin(k: &[T]) -> Result<Self> {
        let entries: Vec<Complex<T>> = k.iter().map(|&kj| scalar_cayley(-kj)).collect();
        Self::diagonal(&entries)
    }

    /// Diagonal unitary `diag(-e^{i alpha_j})`.
    pub fn from_alphas(alphas: &[T]) -> Result<Self> {
        let entries: Vec<Complex<T>> = alphas.iter().map(|&a| -polar(T::one(), a)).collect();
        Self::diagonal(&entries)
    }

    pub fn diagonal(entries: &[Complex<T>]) -> Result<Self> {
        let n = entries.len();
        Self::new(CMatrix::from_fn(n, n, |r, c| {
            if r == c {
                entries[r]
            } else {
                Complex::new(T::zero(), T::zero())
            }
        }))
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn unitarity_tol(&self) -> T {
        self.unitarity_tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitarityDiagnostic<T> {
    pub is_unitary: bool,
    /// `‖M†M - I‖_F`.
    pub defect: T,
}

pub fn validate_unitary<T: Real>(m: &CMatrix<T>, tol: T) -> Result<UnitarityDiagnostic<T>> {
    let n = ensure_square(m, "unitary candidate")?;
    let defect = (m.adjoint() * m - identity::<T>(n)).norm();
    let bound = tol * lit::<T>(n.max(1) as f64);
    Ok(UnitarityDiagnostic {
        is_unitary: defect <= bound,
        defect,
    })
}

/// Spectral data of `U` split at the eigenvalue 1.
#[derive(Debug, Clone)]
pub struct EigenProjection<T: Real> {
    pub p: CMatrix<T>,
    pub q: CMatrix<T>,
    pub eigenvalues: Vec<Complex<T>>,
    pub eigenvectors: CMatrix<T>,
    /// Indices (into `eigenvalues`) of the eigenvalue-1 cluster.
    pub one_cluster: Vec<usize>,
    pub warnings: Vec<String>,
}

impl<T: Real> EigenProjection<T> {
    pub fn rank(&self) -> usize {
        self.one_cluster.len()
    }

    /// Indices of the spectrum supported on `Ran Q`.
    pub fn complement(&self) -> Vec<usize> {
        (0..self.eigenvalues.len())
            .filter(|i| !self.one_cluster.contains(i))
            .collect()
    }
}

pub fn eigenprojection_one<T: Real>(
    u: &BoundaryUnitary<T>,
    cluster_tol: T,
) -> Result<EigenProjection<T>> {
    let n = u.dim();
    let (eigenvalues, eigenvectors) = normal_eigen(u.matrix())?;
    let one = re(T::one());
    let mut one_cluster = Vec::new();
    let mut warnings = Vec::new();
    let ambiguity = cluster_tol * lit::<T>(AMBIGUITY_FACTOR);
    for (i, &lambda) in eigenvalues.iter().enumerate() {
        let d = (lambda - one).modulus();
        if d <= cluster_tol {
            one_cluster.push(i);
        } else if d < ambiguity {
            let msg = format!(
                "eigenvalue {:.12}{:+.12}i lies {:.3e} from 1, inside the ambiguity band ({:.1e}, {:.1e})",
                to_f64(lambda.re),
                to_f64(lambda.im),
                to_f64(d),
                to_f64(cluster_tol),
                to_f64(ambiguity)
            );
            log::warn!("{msg}");
            warnings.push(msg);
        }
    }
    let p = column_projector(&eigenvectors, &one_cluster);
    let q = identity::<T>(n) - &p;
    Ok(EigenProjection {
        p,
        q,
        eigenvalues,
        eigenvectors,
        one_cluster,
        warnings,
    })
}

/// `C(a) = (a - i)/(a + i)` for a real scalar.
pub fn scalar_cayley<T: Real>(a: T) -> Complex<T> {
    let i = imag_unit::<T>();
    (re(a) - i) / (re(a) + i)
}

/// `C⁻¹(v) = i(1 + v)/(1 - v)`, real part only (exact for unimodular `v`).
pub fn scalar_inverse_cayley<T: Real>(v: Complex<T>) -> T {
    let one = re(T::one());
    (imag_unit::<T>() * (one + v) / (one - v)).re
}

/// Cayley transform `(A - iI)(A + iI)⁻¹` of a Hermitian matrix.
pub fn cayley<T: Real>(a: &CMatrix<T>) -> Result<CMatrix<T>> {
    cayley_with(a, lit(DEFAULT_HERMITIAN_TOL))
}

pub fn cayley_with<T: Real>(a: &CMatrix<T>, hermitian_tol: T) -> Result<CMatrix<T>> {
    let n = ensure_square(a, "Cayley argument")?;
    check_hermitian(a, hermitian_tol, "Cayley argument")?;
    let i = imag_unit::<T>();
    let eye = identity::<T>(n);
    let plus = a + &eye * i;
    let minus = a - &eye * i;
    // (A + i)⁻¹ and (A - i) commute, so a single solve suffices.
    plus.lu()
        .solve(&minus)
        .ok_or_else(|| Error::Numerical("A + iI is singular".into()))
}

/// Inverse Cayley transform `i(I + V)(I - V)⁻¹` of a gapped unitary.
pub fn inverse_cayley<T: Real>(v: &CMatrix<T>, gap_tol: T) -> Result<CMatrix<T>> {
    let n = ensure_square(v, "inverse Cayley argument")?;
    let diag = validate_unitary(v, lit(DEFAULT_UNITARITY_TOL))?;
    if !diag.is_unitary {
        return Err(Error::Domain(format!(
            "inverse Cayley argument is not unitary (defect {:.3e})",
            to_f64(diag.defect)
        )));
    }
    let (values, _) = normal_eigen(v)?;
    let one = re(T::one());
    let offending: Vec<(f64, f64)> = values
        .iter()
        .filter(|&&l| (l - one).modulus() <= gap_tol)
        .map(|l| (to_f64(l.re), to_f64(l.im)))
        .collect();
    if !offending.is_empty() {
        return Err(Error::NotInvertible {
            reason: format!(
                "I - V is singular within gap tolerance {:.1e}",
                to_f64(gap_tol)
            ),
            eigenvalues: offending,
        });
    }
    raw_inverse_cayley(v, n)
}

fn raw_inverse_cayley<T: Real>(v: &CMatrix<T>, n: usize) -> Result<CMatrix<T>> {
    let eye = identity::<T>(n);
    let plus = &eye + v;
    let minus = &eye - v;
    let out = minus
        .lu()
        .solve(&plus)
        .ok_or_else(|| Error::Numerical("I - V is singular".into()))?;
    Ok(hermitian_part(&(out * imag_unit::<T>())))
}

/// `P`, `Q`, `V`, `K` and gap metrics of a boundary unitary.
#[derive(Debug, Clone)]
pub struct ExtensionDecomposition<T: Real> {
    pub p: CMatrix<T>,
    pub q: CMatrix<T>,
    pub v: CMatrix<T>,
    pub k: CMatrix<T>,
    /// Minimum distance to 1 of the spectrum on `Ran Q`; 2 when `Q = 0`.
    pub gap: T,
    /// Minimum eigenvalue of `K` on `Ran Q`; `+∞` when `Q = 0`.
    pub semigap_lower_bound: T,
    pub rank_p: usize,
    pub warnings: Vec<String>,
}

pub fn decompose<T: Real>(
    u: &BoundaryUnitary<T>,
    cluster_tol: T,
) -> Result<ExtensionDecomposition<T>> {
    let n = u.dim();
    let ep = eigenprojection_one(u, cluster_tol)?;
    let one = re(T::one());
    let ambiguity = cluster_tol * lit::<T>(AMBIGUITY_FACTOR);
    let complement = ep.complement();
    let offending: Vec<(f64, f64)> = complement
        .iter()
        .map(|&i| ep.eigenvalues[i])
        .filter(|&l| (l - one).modulus() < ambiguity)
        .map(|l| (to_f64(l.re), to_f64(l.im)))
        .collect();
    if !offending.is_empty() {
        return Err(Error::NotInvertible {
            reason: "V is not gapped away from 1 on Ran Q".into(),
            eigenvalues: offending,
        });
    }
    let v = &ep.q * u.matrix() * &ep.q;
    let k = hermitian_part(&(-raw_inverse_cayley(&v, n)? * &ep.q));
    let k = hermitian_part(&(&ep.q * k * &ep.q));

    let gap = complement
        .iter()
        .map(|&i| (ep.eigenvalues[i] - one).modulus())
        .fold(lit::<T>(2.0), |acc, d| if d < acc { d } else { acc });

    let semigap_lower_bound = if complement.is_empty() {
        lit(f64::INFINITY)
    } else {
        let basis = CMatrix::from_fn(n, complement.len(), |r, c| {
            ep.eigenvectors[(r, complement[c])]
        });
        let restricted = basis.adjoint() * &k * &basis;
        let (values, _) = hermitian_eigen(&restricted)?;
        values[0]
    };

    Ok(ExtensionDecomposition {
        rank_p: ep.rank(),
        p: ep.p,
        q: ep.q,
        v,
        k,
        gap,
        semigap_lower_bound,
        warnings: ep.warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapDiagnostics<T> {
    pub gap: T,
    pub is_gapped: bool,
    /// Angular width `ε` of the spectrum-free arc `{e^{iα} : α ∈ (-ε, 0)}`.
    pub semigap: T,
    pub is_semigapped: bool,
    /// `β = -cot(ε/2)`, the lower bound of `K` implied by the arc.
    pub k_lower_bound: T,
}

pub fn gap_diagnostics<T: Real>(u: &BoundaryUnitary<T>, threshold: T) -> Result<GapDiagnostics<T>> {
    let ep = eigenprojection_one(u, lit(DEFAULT_CLUSTER_TOL))?;
    let one = re(T::one());
    let two_pi = lit::<T>(2.0 * PI);
    let mut gap = lit::<T>(2.0);
    let mut semigap = two_pi;
    for i in ep.complement() {
        let lambda = ep.eigenvalues[i];
        let d = (lambda - one).modulus();
        if d < gap {
            gap = d;
        }
        let theta = lambda.im.atan2(lambda.re);
        let clockwise = if theta < T::zero() {
            -theta
        } else {
            two_pi - theta
        };
        if clockwise < semigap {
            semigap = clockwise;
        }
    }
    let k_lower_bound = if semigap >= two_pi {
        lit(f64::INFINITY)
    } else {
        let half = semigap / lit(2.0);
        -(half.cos() / half.sin())
    };
    Ok(GapDiagnostics {
        gap,
        is_gapped: gap >= threshold,
        semigap,
        is_semigapped: semigap >= threshold,
        k_lower_bound,
    })
}

/// Orthogonal projection onto `Ran Q1 ∩ Ran Q2`.
pub fn projection_meet<T: Real>(
    q1: &CMatrix<T>,
    q2: &CMatrix<T>,
    null_tol: T,
) -> Result<CMatrix<T>> {
    let n = ensure_square(q1, "meet argument")?;
    ensure_same_dim(q1, q2, "projection_meet")?;
    let eye = identity::<T>(n);
    // positive semidefinite sum vanishes on v iff both complements do
    let sum = (&eye - q1) + (&eye - q2);
    let (values, vectors) = hermitian_eigen(&sum)?;
    let null: Vec<usize> = (0..n).filter(|&i| values[i] < null_tol).collect();
    Ok(column_projector(&vectors, &null))
}

pub fn compose<T: Real>(
    u1: &BoundaryUnitary<T>,
    u2: &BoundaryUnitary<T>,
) -> Result<BoundaryUnitary<T>> {
    compose_with(u1, u2, &Tolerances::default())
}

/// Composition law `U1 * U2 = P12 + C(-K12) Q12`.
pub fn compose_with<T: Real>(
    u1: &BoundaryUnitary<T>,
    u2: &BoundaryUnitary<T>,
    tol: &Tolerances<T>,
) -> Result<BoundaryUnitary<T>> {
    if u1.dim() != u2.dim() {
        return Err(Error::Shape(format!(
            "compose: dimension mismatch {} vs {}",
            u1.dim(),
            u2.dim()
        )));
    }
    let d1 = decompose(u1, tol.cluster)?;
    let d2 = decompose(u2, tol.cluster)?;
    let (q12, k12) = meet_and_average(&d1.q, &d1.k, &d2.q, &d2.k, tol.null)?;
    let w = assemble_unitary(&q12, &k12, tol.hermitian)?;
    BoundaryUnitary::with_tolerance(w, tol.unitarity)
}

/// `Q12 = Q1 ∧ Q2` and `K12 = Q12 (K1 + K2)/2 Q12`.
pub fn meet_and_average<T: Real>(
    q1: &CMatrix<T>,
    k1: &CMatrix<T>,
    q2: &CMatrix<T>,
    k2: &CMatrix<T>,
    null_tol: T,
) -> Result<(CMatrix<T>, CMatrix<T>)> {
    let q12 = projection_meet(q1, q2, null_tol)?;
    let avg = (k1 + k2) * re(lit::<T>(0.5));
    let k12 = hermitian_part(&(&q12 * avg * &q12));
    Ok((q12, k12))
}

// P + C(-K) Q for a K supported on Ran Q.
fn assemble_unitary<T: Real>(
    q: &CMatrix<T>,
    k: &CMatrix<T>,
    hermitian_tol: T,
) -> Result<CMatrix<T>> {
    let n = q.nrows();
    let p = identity::<T>(n) - q;
    Ok(p + cayley_with(&(-k), hermitian_tol)? * q)
}

/// Inverse of [`decompose`]: `U = P + C(-K)(I - P)`.
pub fn reconstruct_unitary<T: Real>(p: &CMatrix<T>, k: &CMatrix<T>) -> Result<BoundaryUnitary<T>> {
    let n = ensure_square(p, "projection")?;
    ensure_same_dim(p, k, "reconstruct_unitary")?;
    let tol = lit::<T>(DEFAULT_HERMITIAN_TOL);
    check_hermitian(p, tol, "projection")?;
    if (p * p - p).norm() > tol * (T::one() + p.norm()) {
        return Err(Error::Domain("P is not idempotent".into()));
    }
    check_hermitian(k, tol, "boundary operator K")?;
    let scale = T::one() + k.norm();
    if (k * p).norm() > tol * scale || (p * k).norm() > tol * scale {
        return Err(Error::Domain("K is not supported on Ran(I - P)".into()));
    }
    let q = identity::<T>(n) - p;
    BoundaryUnitary::new(assemble_unitary(&q, k, tol)?)
}

/// Named classes of boundary conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryClass {
    Dirichlet,
    Neumann,
    Robin,
    Mixed,
    PeriodicType,
    Generic,
}

impl std::fmt::Display for BoundaryClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::Dirichlet => "dirichlet",
            Self::Neumann => "neumann",
            Self::Robin => "robin",
            Self::Mixed => "mixed",
            Self::PeriodicType => "periodic-type",
            Self::Generic => "generic",
        };
        f.write_str(s)
    }
}

pub fn classify<T: Real>(u: &BoundaryUnitary<T>) -> Result<BoundaryClass> {
    let n = u.dim();
    let tol = lit::<T>(1e-10);
    let d = decompose(u, lit(DEFAULT_CLUSTER_TOL))?;
    if d.rank_p == n {
        return Ok(BoundaryClass::Dirichlet);
    }
    if (u.matrix() + identity::<T>(n)).norm() <= tol {
        return Ok(BoundaryClass::Neumann);
    }
    if n == 2 && d.rank_p == 1 && d.k.norm() <= tol {
        let s = lit::<T>(0.5);
        let periodic_p = CMatrix::from_row_slice(2, 2, &[re(s), re(-s), re(-s), re(s)]);
        if (&d.p - periodic_p).norm() <= tol {
            return Ok(BoundaryClass::PeriodicType);
        }
    }
    if d.rank_p > 0 {
        return Ok(BoundaryClass::Mixed);
    }
    let off_diagonal = (0..n)
        .flat_map(|r| (0..n).filter(move |&c| c != r).map(move |c| (r, c)))
        .map(|(r, c)| d.k[(r, c)].modulus())
        .fold(T::zero(), |acc, x| if x > acc { x } else { acc });
    if off_diagonal <= tol {
        Ok(BoundaryClass::Robin)
    } else {
        Ok(BoundaryClass::Generic)
    }
}

fn check_hermitian<T: Real>(m: &CMatrix<T>, tol: T, what: &str) -> Result<()> {
    let defect = hermitian_defect(m);
    if defect > tol * (T::one() + m.norm()) {
        return Err(Error::Domain(format!(
            "{what} is not Hermitian (defect {:.3e})",
            to_f64(defect)
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    type M = CMatrix<f64>;

    fn diag(entries: &[Complex<f64>]) -> M {
        let n = entries.len();
        M::from_fn(n, n, |r, c| if r == c { entries[r] } else { cx(0.0, 0.0) })
    }

    fn close(a: &M, b: &M, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn eye(n: usize) -> M {
        identity::<f64>(n)
    }

    #[test]
    fn validate_unitary_examples() {
        let d = validate_unitary(&eye(2), 1e-10).unwrap();
        assert!(d.is_unitary && d.defect == 0.0);
        let d = validate_unitary(&diag(&[cx(1.0, 0.0), cx(-1.0, 0.0)]), 1e-10).unwrap();
        assert!(d.is_unitary && d.defect == 0.0);
        let d = validate_unitary(&diag(&[cx(1.0, 0.0), cx(0.5, 0.0)]), 1e-10).unwrap();
        assert!(!d.is_unitary && d.defect > 0.0);
    }

    #[test]
    fn validate_unitary_rejects_non_square() {
        let m = M::zeros(2, 3);
        assert!(matches!(validate_unitary(&m, 1e-10), Err(Error::Shape(_))));
        assert!(BoundaryUnitary::new(M::zeros(0, 0)).is_err());
    }

    #[test]
    fn eigenprojection_examples() {
        let ep = eigenprojection_one(&BoundaryUnitary::dirichlet(2), 1e-8).unwrap();
        assert!(close(&ep.p, &eye(2), 1e-12) && ep.q.norm() < 1e-12);
        let ep = eigenprojection_one(&BoundaryUnitary::neumann(2), 1e-8).unwrap();
        assert!(ep.p.norm() < 1e-12 && close(&ep.q, &eye(2), 1e-12));
        let u = BoundaryUnitary::diagonal(&[cx(1.0, 0.0), cx(0.0, -1.0)]).unwrap();
        let ep = eigenprojection_one(&u, 1e-8).unwrap();
        assert!(close(&ep.p, &diag(&[cx(1.0, 0.0), cx(0.0, 0.0)]), 1e-12));
        assert!(close(&ep.q, &diag(&[cx(0.0, 0.0), cx(1.0, 0.0)]), 1e-12));
        assert!(ep.warnings.is_empty());
    }

    #[test]
    fn eigenprojection_warns_in_ambiguity_band() {
        let u = BoundaryUnitary::diagonal(&[cx(1.0, 0.0), polar(1.0, -3e-8)]).unwrap();
        let ep = eigenprojection_one(&u, 1e-8).unwrap();
        assert_eq!(ep.rank(), 1);
        assert_eq!(ep.warnings.len(), 1);
        assert!(matches!(
            decompose(&u, 1e-8),
            Err(Error::NotInvertible { .. })
        ));
    }

    #[test]
    fn cayley_examples() {
        let c = cayley(&M::zeros(2, 2)).unwrap();
        assert!(close(&c, &(-eye(2)), 1e-14));
        let c = cayley(&eye(2)).unwrap();
        assert!(close(&c, &(eye(2) * cx(0.0, -1.0)), 1e-14));
        let c = cayley(&diag(&[cx(1.0, 0.0), cx(-1.0, 0.0)])).unwrap();
        assert!(close(&c, &diag(&[cx(0.0, -1.0), cx(0.0, 1.0)]), 1e-14));
    }

    #[test]
    fn cayley_rejects_non_hermitian() {
        let m = M::from_row_slice(
            2,
            2,
            &[cx(0.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0)],
        );
        assert!(matches!(cayley(&m), Err(Error::Domain(_))));
    }

    #[test]
    fn cayley_spectrum_stays_away_from_one() {
        // |C(a) - 1| = 2 / sqrt(1 + a²)
        for a in [0.0, 0.5, 3.0, -40.0] {
            let c = cayley(&diag(&[cx(a, 0.0)])).unwrap();
            let d = (c[(0, 0)] - cx(1.0, 0.0)).modulus();
            assert!((d - 2.0 / (1.0 + a * a).sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn inverse_cayley_examples() {
        let k = inverse_cayley(&(-eye(2)), 1e-8).unwrap();
        assert!(k.norm() < 1e-14);
        let k = inverse_cayley(&(eye(2) * cx(0.0, -1.0)), 1e-8).unwrap();
        assert!(close(&k, &eye(2), 1e-14));
        assert!(matches!(
            inverse_cayley(&eye(2), 1e-8),
            Err(Error::NotInvertible { .. })
        ));
    }

    #[test]
    fn decompose_neumann() {
        let d = decompose(&BoundaryUnitary::neumann(2), 1e-8).unwrap();
        assert!(d.p.norm() < 1e-14);
        assert!(close(&d.q, &eye(2), 1e-14));
        assert!(close(&d.v, &(-eye(2)), 1e-14));
        assert!(d.k.norm() < 1e-14);
        assert!((d.gap - 2.0).abs() < 1e-14);
    }

    #[test]
    fn decompose_robin_phase() {
        // i(1 - e^{iα})/(1 + e^{iα}) = tan(α/2), so K = -tan(α/2)
        for alpha in [0.3, 1.0, -2.0, std::f64::consts::FRAC_PI_2] {
            let u = BoundaryUnitary::from_alphas(&[alpha, alpha]).unwrap();
            let d = decompose(&u, 1e-8).unwrap();
            let expected = eye(2) * cx(-(alpha / 2.0).tan(), 0.0);
            assert!(close(&d.k, &expected, 1e-12), "alpha={alpha}");
        }
    }

    #[test]
    fn decompose_mixed() {
        let u = BoundaryUnitary::diagonal(&[cx(1.0, 0.0), cx(-1.0, 0.0)]).unwrap();
        let d = decompose(&u, 1e-8).unwrap();
        assert!(close(&d.p, &diag(&[cx(1.0, 0.0), cx(0.0, 0.0)]), 1e-14));
        assert!(d.k.norm() < 1e-14);
        assert_eq!(d.rank_p, 1);
    }

    #[test]
    fn decompose_invariants() {
        let u = BoundaryUnitary::new(M::from_row_slice(
            2,
            2,
            &[cx(0.6, 0.0), cx(0.0, 0.8), cx(0.0, 0.8), cx(0.6, 0.0)],
        ))
        .unwrap();
        let d = decompose(&u, 1e-8).unwrap();
        assert!(close(&(&d.p * &d.p), &d.p, 1e-12));
        assert!(close(&(&d.p + &d.q), &eye(2), 1e-12));
        assert!((&d.p * &d.v).norm() < 1e-12 && (&d.v * &d.p).norm() < 1e-12);
        assert!(close(&(d.v.adjoint() * &d.v), &d.q, 1e-12));
        assert!((&d.k * &d.p).norm() < 1e-12);
        assert!(close(&d.k, &d.k.adjoint(), 1e-14));
        let v_back = cayley(&(-&d.k)).unwrap() * &d.q;
        assert!(close(&v_back, &d.v, 1e-12));
    }

    #[test]
    fn gap_diagnostics_examples() {
        let g = gap_diagnostics(&BoundaryUnitary::<f64>::neumann(2), 0.1).unwrap();
        assert!((g.gap - 2.0).abs() < 1e-14 && g.is_gapped && g.is_semigapped);
        assert!(g.k_lower_bound.abs() < 1e-12);

        let q = std::f64::consts::FRAC_PI_4;
        let u = BoundaryUnitary::diagonal(&[polar(1.0, q), polar(1.0, -q)]).unwrap();
        let g = gap_diagnostics(&u, 0.1).unwrap();
        assert!((g.gap - 2.0 * (q / 2.0).sin()).abs() < 1e-12);
        assert!((g.gap - 0.7654).abs() < 1e-4);
        assert!(g.is_semigapped && (g.semigap - q).abs() < 1e-12);

        let u = BoundaryUnitary::diagonal(&[cx(1.0, 0.0), polar(1.0, -0.01)]).unwrap();
        let g = gap_diagnostics(&u, 0.1).unwrap();
        assert!(!g.is_gapped && !g.is_semigapped);
    }

    #[test]
    fn gap_convention_for_dirichlet() {
        let g = gap_diagnostics(&BoundaryUnitary::<f64>::dirichlet(3), 0.1).unwrap();
        assert_eq!(g.gap, 2.0);
        assert!(g.is_gapped);
        let d = decompose(&BoundaryUnitary::<f64>::dirichlet(3), 1e-8).unwrap();
        assert!(d.semigap_lower_bound.is_infinite() && d.semigap_lower_bound > 0.0);
    }

    #[test]
    fn semigap_bound_matches_minimum_of_k() {
        let u =
            BoundaryUnitary::diagonal(&[polar(1.0, 2.0), polar(1.0, -0.7), cx(-1.0, 0.0)]).unwrap();
        let g = gap_diagnostics(&u, 0.1).unwrap();
        let d = decompose(&u, 1e-8).unwrap();
        assert!((g.semigap - 0.7).abs() < 1e-12);
        assert!((g.k_lower_bound - d.semigap_lower_bound).abs() < 1e-10);
        assert!((g.k_lower_bound + (0.35f64).cos() / (0.35f64).sin()).abs() < 1e-10);
    }

    #[test]
    fn meet_examples() {
        let m = projection_meet(&eye(2), &eye(2), 1e-10).unwrap();
        assert!(close(&m, &eye(2), 1e-12));
        let m = projection_meet(&eye(2), &M::zeros(2, 2), 1e-10).unwrap();
        assert!(m.norm() < 1e-12);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let line = |v: [f64; 2]| {
            let v = crate::scalar::CVector::<f64>::from_vec(vec![cx(v[0], 0.0), cx(v[1], 0.0)]);
            &v * v.adjoint()
        };
        let m = projection_meet(&line([1.0, 0.0]), &line([s, s]), 1e-10).unwrap();
        assert!(m.norm() < 1e-12);
        assert!(matches!(
            projection_meet(&eye(2), &eye(3), 1e-10),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn compose_examples() {
        let n = BoundaryUnitary::<f64>::neumann(2);
        let w = compose(&n, &n).unwrap();
        assert!(close(w.matrix(), &(-eye(2)), 1e-12));

        let robin = BoundaryUnitary::from_alphas(&[0.8, 0.8]).unwrap();
        let w = compose(&BoundaryUnitary::dirichlet(2), &robin).unwrap();
        assert!(close(w.matrix(), &eye(2), 1e-12));

        let half_pi = std::f64::consts::FRAC_PI_2;
        let r = BoundaryUnitary::from_alphas(&[half_pi, half_pi]).unwrap();
        let w = compose(&r, &r).unwrap();
        assert!(close(w.matrix(), &(eye(2) * cx(0.0, -1.0)), 1e-12));
    }

    #[test]
    fn compose_averages_robin_coefficients() {
        let a = BoundaryUnitary::robin(&[1.0, -2.0]).unwrap();
        let b = BoundaryUnitary::robin(&[3.0, 4.0]).unwrap();
        let w = compose(&a, &b).unwrap();
        let expected = BoundaryUnitary::robin(&[2.0, 1.0]).unwrap();
        assert!(close(w.matrix(), expected.matrix(), 1e-12));
    }

    #[test]
    fn compose_rejects_dim_mismatch() {
        let r = compose(
            &BoundaryUnitary::<f64>::neumann(2),
            &BoundaryUnitary::neumann(3),
        );
        assert!(matches!(r, Err(Error::Shape(_))));
    }

    #[test]
    fn reconstruct_examples() {
        let u = reconstruct_unitary(&M::zeros(2, 2), &M::zeros(2, 2)).unwrap();
        assert!(close(u.matrix(), &(-eye(2)), 1e-14));
        let u = reconstruct_unitary(&eye(2), &M::zeros(2, 2)).unwrap();
        assert!(close(u.matrix(), &eye(2), 1e-14));
        let alpha = 1.2f64;
        let k = eye(2) * cx(-(alpha / 2.0).tan(), 0.0);
        let u = reconstruct_unitary(&M::zeros(2, 2), &k).unwrap();
        assert!(close(u.matrix(), &(eye(2) * -polar(1.0, alpha)), 1e-12));
    }

    #[test]
    fn reconstruct_rejects_k_on_p() {
        let p = diag(&[cx(1.0, 0.0), cx(0.0, 0.0)]);
        let k = diag(&[cx(1.0, 0.0), cx(0.0, 0.0)]);
        assert!(matches!(reconstruct_unitary(&p, &k), Err(Error::Domain(_))));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            classify(&BoundaryUnitary::<f64>::dirichlet(2)).unwrap(),
            BoundaryClass::Dirichlet
        );
        assert_eq!(
            classify(&BoundaryUnitary::<f64>::neumann(2)).unwrap(),
            BoundaryClass::Neumann
        );
        let r = BoundaryUnitary::robin(&[1.0, 2.0]).unwrap();
        assert_eq!(classify(&r).unwrap(), BoundaryClass::Robin);
        let mixed = BoundaryUnitary::diagonal(&[cx(1.0, 0.0), -polar(1.0, 0.4)]).unwrap();
        assert_eq!(classify(&mixed).unwrap(), BoundaryClass::Mixed);
        // P onto (1,-1)/√2 minus Q onto (1,1)/√2
        let periodic = M::from_row_slice(
            2,
            2,
            &[cx(0.0, 0.0), cx(-1.0, 0.0), cx(-1.0, 0.0), cx(0.0, 0.0)],
        );
        let periodic = BoundaryUnitary::new(periodic).unwrap();
        assert_eq!(classify(&periodic).unwrap(), BoundaryClass::PeriodicType);
        let generic = reconstruct_unitary(
            &M::zeros(2, 2),
            &M::from_row_slice(
                2,
                2,
                &[cx(1.0, 0.0), cx(0.5, 0.5), cx(0.5, -0.5), cx(0.0, 0.0)],
            ),
        )
        .unwrap();
        assert_eq!(classify(&generic).unwrap(), BoundaryClass::Generic);
    }

    #[test]
    fn works_in_single_precision() {
        let r = BoundaryUnitary::<f32>::robin(&[1.0, 3.0]).unwrap();
        let w = compose(&r, &r).unwrap();
        assert!((w.matrix() - r.matrix()).norm() < 1e-5);
        let d = decompose(&r, 1e-4).unwrap();
        assert!((d.k[(1, 1)].re - 3.0).abs() < 1e-4);
    }
}
