//! Dense complex linear algebra helpers built on nalgebra.

use nalgebra::{Cholesky, Complex, DMatrix, DVector, Schur, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::{lit, CMatrix, Real};

pub fn identity<T: Real>(n: usize) -> CMatrix<T> {
    CMatrix::identity(n, n)
}

pub fn hermitian_part<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    (m + m.adjoint()) * Complex::new(nalgebra::convert::<f64, T>(0.5), T::zero())
}

/// Frobenius norm of `m - m†`.
pub fn hermitian_defect<T: Real>(m: &CMatrix<T>) -> T {
    (m - m.adjoint()).norm()
}

pub fn ensure_square<T: Real>(m: &CMatrix<T>, what: &str) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::Shape(format!(
            "{what} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.nrows())
}

pub fn ensure_same_dim<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>, what: &str) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::Shape(format!(
            "{what}: dimension mismatch {:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(())
}

pub fn real_to_complex<T: Real>(m: &DMatrix<T>) -> CMatrix<T> {
    m.map(|x| Complex::new(x, T::zero()))
}

/// Eigen-decomposition of a normal (here: unitary) matrix through its complex
/// Schur form. For normal input the triangular factor is diagonal up to
/// rounding, so the Schur vectors are orthonormal eigenvectors.
pub fn normal_eigen<T: Real>(m: &CMatrix<T>) -> Result<(Vec<Complex<T>>, CMatrix<T>)> {
    let n = ensure_square(m, "normal_eigen input")?;
    if n == 0 {
        return Ok((Vec::new(), CMatrix::zeros(0, 0)));
    }
    // The deflation test at bare machine epsilon stalls on clustered
    // spectra (e.g. U = I + O(eps)); start a little looser and widen.
    let max_iter = 30 * n + 100;
    let schur = [8.0, 64.0, 512.0, 4096.0]
        .iter()
        .find_map(|&f| Schur::try_new(m.clone(), T::default_epsilon() * lit::<T>(f), max_iter))
        .ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();
    let values = (0..n).map(|i| t[(i, i)]).collect();
    Ok((values, q))
}

/// Hermitian eigen-decomposition with eigenvalues sorted ascending.
pub fn hermitian_eigen<T: Real>(m: &CMatrix<T>) -> Result<(Vec<T>, CMatrix<T>)> {
    let n = ensure_square(m, "hermitian_eigen input")?;
    if n == 0 {
        return Ok((Vec::new(), CMatrix::zeros(0, 0)));
    }
    let eig = SymmetricEigen::try_new(hermitian_part(m), T::default_epsilon(), 0)
        .ok_or_else(|| Error::Numerical("Hermitian eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Orthogonal projector onto the span of the selected columns of an
/// orthonormal (unitary) matrix.
pub fn column_projector<T: Real>(basis: &CMatrix<T>, columns: &[usize]) -> CMatrix<T> {
    let n = basis.nrows();
    let mut p = CMatrix::zeros(n, n);
    for &c in columns {
        let v = basis.column(c);
        p += v * v.adjoint();
    }
    hermitian_part(&p)
}

/// Orthonormal basis of the range of an orthogonal projector.
pub fn projector_range<T: Real>(p: &CMatrix<T>) -> Result<CMatrix<T>> {
    let (values, vectors) = hermitian_eigen(p)?;
    let half = nalgebra::convert::<f64, T>(0.5);
    let cols: Vec<usize> = (0..values.len()).filter(|&i| values[i] > half).collect();
    Ok(CMatrix::from_fn(p.nrows(), cols.len(), |r, c| {
        vectors[(r, cols[c])]
    }))
}

/// Generalized Hermitian-definite eigenproblem `H x = E B x`.
///
/// Returns ascending eigenvalues and `B`-orthonormal eigenvectors.
pub fn hermitian_pencil<T: Real>(h: &CMatrix<T>, b: &CMatrix<T>) -> Result<(Vec<T>, CMatrix<T>)> {
    let n = ensure_square(h, "pencil operator")?;
    ensure_same_dim(h, b, "pencil")?;
    if n == 0 {
        return Ok((Vec::new(), CMatrix::zeros(0, 0)));
    }
    let l = Cholesky::new(hermitian_part(b))
        .ok_or_else(|| Error::Numerical("mass matrix is not positive definite".into()))?
        .unpack();
    let c = whiten(h, &l)?;
    let (values, y) = hermitian_eigen(&c)?;
    let x = l
        .ad_solve_lower_triangular(&y)
        .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;
    Ok((values, x))
}

/// Eigenvalues only of `H x = E B x`, ascending.
pub fn hermitian_pencil_values<T: Real>(h: &CMatrix<T>, b: &CMatrix<T>) -> Result<Vec<T>> {
    let n = ensure_square(h, "pencil operator")?;
    ensure_same_dim(h, b, "pencil")?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let l = Cholesky::new(hermitian_part(b))
        .ok_or_else(|| Error::Numerical("mass matrix is not positive definite".into()))?
        .unpack();
    let c = whiten(h, &l)?;
    let mut values: Vec<T> = c.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(values)
}

// L⁻¹ H L⁻†, Hermitian-symmetrized.
fn whiten<T: Real>(h: &CMatrix<T>, l: &CMatrix<T>) -> Result<CMatrix<T>> {
    let singular = || Error::Numerical("singular Cholesky factor".into());
    let a = l.solve_lower_triangular(h).ok_or_else(singular)?;
    let c = l
        .solve_lower_triangular(&a.adjoint())
        .ok_or_else(singular)?;
    Ok(hermitian_part(&c))
}

/// Real symmetric-definite pencil, eigenvalues ascending.
pub fn symmetric_pencil_values<T: Real>(s: &DMatrix<T>, b: &DMatrix<T>) -> Result<Vec<T>> {
    let n = s.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let l = Cholesky::new(b.clone())
        .ok_or_else(|| Error::Numerical("mass matrix is not positive definite".into()))?
        .unpack();
    let singular = || Error::Numerical("singular Cholesky factor".into());
    let a = l.solve_lower_triangular(s).ok_or_else(singular)?;
    let c = l
        .solve_lower_triangular(&a.transpose())
        .ok_or_else(singular)?;
    let c = (&c + c.transpose()) * nalgebra::convert::<f64, T>(0.5);
    let mut values: Vec<T> = c.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(values)
}

/// `x† B x` for Hermitian `B`.
pub fn weighted_norm_sq<T: Real>(x: &DVector<Complex<T>>, b: &CMatrix<T>) -> T {
    (x.adjoint() * b * x)[(0, 0)].re
}

/// Hermitian matrix split into a tridiagonal block along `path`, a dense
/// border coupling it to the `border` indices, and the dense border corner.
#[derive(Debug, Clone)]
struct Bordered<T: Real> {
    diag: Vec<T>,
    sub: Vec<Complex<T>>,
    border: CMatrix<T>,
    corner: CMatrix<T>,
}

impl<T: Real> Bordered<T> {
    /// `None` when `m` couples path indices that are not neighbours.
    fn from_dense(m: &CMatrix<T>, border: &[usize], path: &[usize]) -> Option<Self> {
        for (i, &r) in path.iter().enumerate() {
            for (j, &c) in path.iter().enumerate() {
                if i.abs_diff(j) > 1 && m[(r, c)] != Complex::new(T::zero(), T::zero()) {
                    return None;
                }
            }
        }
        Some(Self {
            diag: path.iter().map(|&i| m[(i, i)].re).collect(),
            sub: path.windows(2).map(|w| m[(w[1], w[0])]).collect(),
            border: CMatrix::from_fn(path.len(), border.len(), |r, c| m[(path[r], border[c])]),
            corner: CMatrix::from_fn(border.len(), border.len(), |r, c| m[(border[r], border[c])]),
        })
    }
}

/// Solves `T Y = X` for Hermitian tridiagonal `T` (real diagonal, subdiagonal
/// `sub`) by Gaussian elimination with partial pivoting.
fn solve_tridiagonal<T: Real>(
    diag: &[T],
    sub: &[Complex<T>],
    x: &CMatrix<T>,
    tiny: T,
) -> CMatrix<T> {
    let n = diag.len();
    let zero = Complex::new(T::zero(), T::zero());
    let mut d: Vec<Complex<T>> = diag.iter().map(|&v| Complex::new(v, T::zero())).collect();
    let mut dl: Vec<Complex<T>> = sub.to_vec();
    let mut du: Vec<Complex<T>> = sub.iter().map(|z| z.conj()).collect();
    let mut b = x.clone();
    let guard = |z: Complex<T>| {
        if z == zero {
            Complex::new(tiny, T::zero())
        } else {
            z
        }
    };
    for i in 0..n.saturating_sub(1) {
        if d[i].norm_sqr() >= dl[i].norm_sqr() {
            d[i] = guard(d[i]);
            let fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            for j in 0..b.ncols() {
                let top = b[(i, j)];
                b[(i + 1, j)] -= fact * top;
            }
            dl[i] = zero;
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            let temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if i + 2 < n {
                dl[i] = du[i + 1];
                du[i + 1] = -fact * dl[i];
            } else {
                dl[i] = zero;
            }
            du[i] = temp;
            for j in 0..b.ncols() {
                let top = b[(i, j)];
                b[(i, j)] = b[(i + 1, j)];
                b[(i + 1, j)] = top - fact * b[(i + 1, j)];
            }
        }
    }
    d[n - 1] = guard(d[n - 1]);
    for j in 0..b.ncols() {
        for i in (0..n).rev() {
            let mut v = b[(i, j)];
            if i + 1 < n {
                v -= du[i] * b[(i + 1, j)];
            }
            if i + 2 < n {
                v -= dl[i] * b[(i + 2, j)];
            }
            b[(i, j)] = v / guard(d[i]);
        }
    }
    b
}

/// Eigenvalues of `H x = E B x` for bordered-tridiagonal `H`, `B`, by
/// bisection on the Sylvester inertia of `H - λB`.
#[derive(Debug, Clone)]
pub struct BorderedPencil<T: Real> {
    h: Bordered<T>,
    b: Bordered<T>,
    /// Absolute resolution of the bisection.
    floor: T,
    /// Stand-in for an exactly vanishing pivot.
    tiny: T,
}

impl<T: Real> BorderedPencil<T> {
    /// `border` and `path` must partition the index range; `None` when the
    /// matrices do not have the bordered-tridiagonal pattern.
    pub fn new(h: &CMatrix<T>, b: &CMatrix<T>, border: &[usize], path: &[usize]) -> Option<Self> {
        let n = h.nrows();
        if h.shape() != b.shape() || !h.is_square() || border.len() + path.len() != n {
            return None;
        }
        let mut seen = vec![false; n];
        for &i in border.iter().chain(path) {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return None;
            }
        }
        let hb = Bordered::from_dense(h, border, path)?;
        let bb = Bordered::from_dense(b, border, path)?;
        let scale = |m: &CMatrix<T>| {
            m.iter()
                .fold(T::zero(), |acc, z| acc.max(z.norm_sqr().sqrt()))
        };
        let (sh, sb) = (scale(h), scale(b));
        if sb <= T::zero() {
            return None;
        }
        let eps = T::default_epsilon();
        Some(Self {
            h: hb,
            b: bb,
            floor: eps * eps * sh / sb,
            tiny: eps * sh.max(T::one()),
        })
    }

    /// Number of eigenvalues strictly below `lambda`: negative Sturm pivots
    /// of the path block plus negative eigenvalues of its Schur complement.
    pub fn count_below(&self, lambda: T) -> usize {
        let n = self.h.diag.len();
        let diag: Vec<T> = (0..n)
            .map(|i| self.h.diag[i] - lambda * self.b.diag[i])
            .collect();
        let sub: Vec<Complex<T>> = (0..n.saturating_sub(1))
            .map(|i| self.h.sub[i] - self.b.sub[i] * lambda)
            .collect();
        let mut negative = 0;
        let mut prev = T::one();
        for i in 0..n {
            let mut d = if i == 0 {
                diag[0]
            } else {
                diag[i] - sub[i - 1].norm_sqr() / prev
            };
            if d == T::zero() {
                d = self.tiny;
            }
            if d < T::zero() {
                negative += 1;
            }
            prev = d;
        }
        if self.h.corner.nrows() == 0 {
            return negative;
        }
        let shift = Complex::new(lambda, T::zero());
        let x = &self.h.border - &self.b.border * shift;
        let y = solve_tridiagonal(&diag, &sub, &x, self.tiny);
        let corner = &self.h.corner - &self.b.corner * shift;
        let schur = hermitian_part(&(corner - x.adjoint() * y));
        negative
            + schur
                .symmetric_eigenvalues()
                .iter()
                .filter(|&&v| v < T::zero())
                .count()
    }

    /// `index`-th eigenvalue (0-based) in ascending order.
    pub fn eigenvalue(&self, index: usize) -> T {
        let two = lit::<T>(2.0);
        let mut lo = -T::one();
        while self.count_below(lo) > index {
            lo *= two;
        }
        let mut hi = T::one();
        while self.count_below(hi) <= index {
            hi *= two;
        }
        for _ in 0..256 {
            let mid = (lo + hi) / two;
            if hi - lo <= self.floor + T::default_epsilon() * mid.abs() || mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        (lo + hi) / two
    }

    pub fn lowest(&self, count: usize) -> Vec<T> {
        (0..count).map(|i| self.eigenvalue(i)).collect()
    }
}
