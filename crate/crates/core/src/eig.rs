//! Dense Hermitian eigenvalue helpers on top of nalgebra.

use nalgebra::{Cholesky, DMatrix, Dyn};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cast, to_f64, Scalar};

/// Eigenvalues of a Hermitian matrix, ascending. The input is symmetrized
/// first; `defect_tol` (relative) guards against assembling a non-Hermitian
/// matrix by mistake.
pub fn hermitian_eigenvalues<T: Scalar>(
    h: &DMatrix<Complex<T>>,
    defect_tol: f64,
) -> Result<Vec<T>> {
    let defect = hermitian_defect(h);
    let scale = h.norm();
    if to_f64(defect) > defect_tol * to_f64(scale).max(1.0) {
        return Err(Error::Eigensolver(format!(
            "matrix is not Hermitian: defect {} vs norm {}",
            to_f64(defect),
            to_f64(scale)
        )));
    }
    let sym = symmetrize(h);
    let mut ev: Vec<T> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
    Ok(ev)
}

/// Eigenvalues of the Hermitian pencil H u = λ B u with B positive definite,
/// by Cholesky congruence to a standard problem.
pub fn generalized_eigenvalues<T: Scalar>(
    h: &DMatrix<Complex<T>>,
    b: &DMatrix<Complex<T>>,
    defect_tol: f64,
) -> Result<Vec<T>> {
    let chol: Cholesky<Complex<T>, Dyn> = Cholesky::new(symmetrize(b))
        .ok_or_else(|| Error::Eigensolver("weight matrix is not positive definite".into()))?;
    let l = chol.l();
    // C = L⁻¹ H L⁻ᴴ.
    let x = l
        .solve_lower_triangular(h)
        .ok_or_else(|| Error::Eigensolver("singular Cholesky factor".into()))?;
    let y = l
        .solve_lower_triangular(&x.adjoint())
        .ok_or_else(|| Error::Eigensolver("singular Cholesky factor".into()))?;
    hermitian_eigenvalues(&y.adjoint(), defect_tol)
}

pub fn hermitian_defect<T: Scalar>(h: &DMatrix<Complex<T>>) -> T {
    let mut worst = T::zero();
    for i in 0..h.nrows() {
        for j in i..h.ncols() {
            let d = (h[(i, j)] - h[(j, i)].conj()).norm_sqr().sqrt();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

fn symmetrize<T: Scalar>(h: &DMatrix<Complex<T>>) -> DMatrix<Complex<T>> {
    let half = Complex::new(cast::<T>(0.5), T::zero());
    (h + h.adjoint()) * half
}

/// Smallest singular value of a general complex square matrix, by inverse
/// iteration on MᴴM through two LU factorizations. Deterministic start.
pub fn smallest_singular_value<T: Scalar>(m: &DMatrix<Complex<T>>) -> Result<T> {
    let n = m.nrows();
    let lu = m.clone().lu();
    let lu_h = m.adjoint().lu();

    let mut v = DMatrix::<Complex<T>>::from_fn(n, 1, |i, _| {
        let x = 0.7 * (i as f64) + 0.3;
        Complex::new(cast::<T>(x.sin()), cast::<T>((1.3 * x).cos()))
    });
    let nv = v.norm();
    if nv == T::zero() {
        return Err(Error::Eigensolver("zero start vector".into()));
    }
    v /= Complex::new(nv, T::zero());

    let mut last = T::zero();
    for iter in 0..300 {
        // x = (MᴴM)⁻¹ v = M⁻¹ (M⁻ᴴ v).
        let z = match lu_h.solve(&v) {
            Some(z) => z,
            None => return Ok(T::zero()),
        };
        let x = match lu.solve(&z) {
            Some(x) => x,
            None => return Ok(T::zero()),
        };
        let growth = x.norm();
        if growth == T::zero() || !to_f64(growth).is_finite() {
            return Ok(T::zero());
        }
        let s_est = (T::one() / growth).sqrt();
        v = x / Complex::new(growth, T::zero());
        if iter > 3 {
            let denom = if s_est > T::zero() { s_est } else { T::one() };
            if crate::scalar::rabs(s_est - last) / denom < cast::<T>(1e-13) {
                return Ok(s_est);
            }
        }
        last = s_est;
    }
    Ok(last)
}
