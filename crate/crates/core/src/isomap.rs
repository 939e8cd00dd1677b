//! Evaluation, differentiation and inversion of the solved isothermal map,
//! lattice renormalization, and the pointwise identity checks tying the map
//! back to its metric.

use nalgebra::Matrix2;
use num_complex::Complex;

use crate::beltrami::IsothermalMap;
use crate::error::{Error, Result};
use crate::fft::{dz_symbol, dzbar_symbol, pad_coefficients};
use crate::interp::{oversampled_grid, SplineTable};
use crate::grid::TorusGrid;
use crate::metric::MetricField;
use crate::scalar::{cast, cnorm, fmax, rabs, to_f64, Scalar};

/// Fewer targets than this are evaluated by direct Fourier summation;
/// bulk requests go through the oversampled spline tables.
pub const DIRECT_SUMMATION_THRESHOLD: usize = 1000;

// ---------------------------------------------------------------------------
// Map evaluator
// ---------------------------------------------------------------------------

/// Precomputed interpolation tables for one solved map: the periodic
/// correction p and the derivative fields ∂_z f, ∂_z̄ f.
pub struct MapEvaluator<T: Scalar> {
    grid: TorusGrid,
    alpha: Complex<T>,
    beta: Complex<T>,
    p_hat: Vec<Complex<T>>,
    /// p(0) = Σ p̂ (phases are all 1 at the origin).
    p_at_zero: Complex<T>,
    p_table: SplineTable<T>,
    fz_table: SplineTable<T>,
    fzb_table: SplineTable<T>,
}

impl<T: Scalar> MapEvaluator<T> {
    pub fn new(map: &IsothermalMap<T>) -> Self {
        let grid = map.grid();
        let fine = oversampled_grid(grid);

        let p_hat_fine = pad_coefficients(grid, map.p_hat(), fine);
        let mut fz_hat = vec![Complex::new(T::zero(), T::zero()); fine.len()];
        let mut fzb_hat = fz_hat.clone();
        for i in 0..fine.n1() {
            let m = fine.freq1(i);
            for j in 0..fine.n2() {
                let n = fine.freq2(j);
                let s = i * fine.n2() + j;
                fz_hat[s] = dz_symbol::<T>(m, n) * p_hat_fine[s];
                fzb_hat[s] = dzbar_symbol::<T>(m, n) * p_hat_fine[s];
            }
        }
        fz_hat[0] += map.alpha();
        fzb_hat[0] += map.beta();

        let p_at_zero = map
            .p_hat()
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |a, &c| a + c);

        Self {
            grid,
            alpha: map.alpha(),
            beta: map.beta(),
            p_hat: map.p_hat().to_vec(),
            p_at_zero,
            p_table: SplineTable::from_coefficients(fine, p_hat_fine),
            fz_table: SplineTable::from_coefficients(fine, fz_hat),
            fzb_table: SplineTable::from_coefficients(fine, fzb_hat),
        }
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn alpha(&self) -> Complex<T> {
        self.alpha
    }

    pub fn beta(&self) -> Complex<T> {
        self.beta
    }

    pub fn kappa(&self) -> Complex<T> {
        let d = self.alpha - self.beta;
        Complex::new(-d.im, d.re).scale(T::two_pi())
    }

    /// f(z) = αz + βz̄ + p(z) − p(0), interpolated from the tables.
    pub fn evaluate(&self, z: Complex<T>) -> Complex<T> {
        let lin = self.alpha * z + self.beta * z.conj();
        let x1 = wrap_period(z.re);
        let x2 = wrap_period(z.im);
        lin + self.p_table.eval(x1, x2) - self.p_at_zero
    }

    /// f(z) by direct Fourier summation of p at the literal coordinates
    /// (no wrapping), the high-accuracy path.
    pub fn evaluate_direct(&self, z: Complex<T>) -> Complex<T> {
        let lin = self.alpha * z + self.beta * z.conj();
        lin + self.p_direct(z) - self.p_at_zero
    }

    fn p_direct(&self, z: Complex<T>) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for (i, j, s) in self.grid.iter() {
            let c = self.p_hat[s];
            if c.norm_sqr() == T::zero() {
                continue;
            }
            let m = cast::<T>(self.grid.freq1(i) as f64);
            let n = cast::<T>(self.grid.freq2(j) as f64);
            let phase = m * z.re + n * z.im;
            acc += c * Complex::new(phase.cos(), phase.sin());
        }
        acc
    }

    /// Evaluates many points: direct summation below the threshold,
    /// table interpolation above it.
    pub fn evaluate_many(&self, points: &[Complex<T>]) -> Vec<Complex<T>> {
        if points.len() < DIRECT_SUMMATION_THRESHOLD {
            points.iter().map(|&z| self.evaluate_direct(z)).collect()
        } else {
            points.iter().map(|&z| self.evaluate(z)).collect()
        }
    }

    /// (∂_z f, ∂_z̄ f) at an arbitrary point, from the spline tables.
    pub fn derivatives(&self, z: Complex<T>) -> (Complex<T>, Complex<T>) {
        let x1 = wrap_period(z.re);
        let x2 = wrap_period(z.im);
        (self.fz_table.eval(x1, x2), self.fzb_table.eval(x1, x2))
    }

    /// Real 2×2 Jacobian and determinant. The sign conventions:
    /// Df = [[Re(fz+fz̄), −Im(fz−fz̄)], [Im(fz+fz̄), Re(fz−fz̄)]].
    pub fn jacobian_matrix(&self, z: Complex<T>) -> Result<(Matrix2<T>, T)> {
        let (fz, fzb) = self.derivatives(z);
        let jac = fz.norm_sqr() - fzb.norm_sqr();
        if jac <= T::zero() {
            return Err(Error::OrientationError {
                x1: to_f64(z.re),
                x2: to_f64(z.im),
                jac: to_f64(jac),
            });
        }
        Ok((real_jacobian(fz, fzb), jac))
    }

    /// Solves f(z) = w by damped Newton iteration seeded with the inverse
    /// of the linear part.
    pub fn invert(&self, w: Complex<T>, tol: T) -> Result<Complex<T>> {
        let lin = real_jacobian(self.alpha, self.beta);
        let lin_inv = lin
            .try_inverse()
            .ok_or(Error::DegenerateLattice { im_kappa: 0.0 })?;
        let mut z = apply2(&lin_inv, w);
        let mut r = self.evaluate(z) - w;
        let mut best = cnorm(r);
        for _ in 0..60 {
            if best < tol {
                return Ok(z);
            }
            let (fz, fzb) = self.derivatives(z);
            let df = real_jacobian(fz, fzb);
            let step = df
                .try_inverse()
                .map(|m| apply2(&m, r))
                .unwrap_or_else(|| apply2(&lin_inv, r));
            // Backtracking line search on |f(z) − w|.
            let mut scale = T::one();
            let mut accepted = false;
            for _ in 0..30 {
                let cand = z - step.scale(scale);
                let rc = self.evaluate(cand) - w;
                if cnorm(rc) < best {
                    z = cand;
                    r = rc;
                    best = cnorm(rc);
                    accepted = true;
                    break;
                }
                scale *= cast::<T>(0.5);
            }
            if !accepted {
                break;
            }
        }
        if best < tol {
            Ok(z)
        } else {
            Err(Error::InversionFailed {
                re: to_f64(w.re),
                im: to_f64(w.im),
                residual: to_f64(best),
            })
        }
    }
}

#[inline]
fn wrap_period<T: Scalar>(x: T) -> T {
    let tp = T::two_pi();
    let r = x - (x / tp).floor() * tp;
    if r < T::zero() {
        r + tp
    } else {
        r
    }
}

/// The real/complex dictionary for z ↦ a·z + b·z̄.
#[inline]
pub fn real_jacobian<T: Scalar>(a: Complex<T>, b: Complex<T>) -> Matrix2<T> {
    let s = a + b;
    let d = a - b;
    Matrix2::new(s.re, -d.im, s.im, d.re)
}

#[inline]
fn apply2<T: Scalar>(m: &Matrix2<T>, v: Complex<T>) -> Complex<T> {
    Complex::new(
        m[(0, 0)] * v.re + m[(0, 1)] * v.im,
        m[(1, 0)] * v.re + m[(1, 1)] * v.im,
    )
}

// ---------------------------------------------------------------------------
// Lattice renormalization
// ---------------------------------------------------------------------------

/// The composite g = R∘f with R mapping the image lattice {2π, κ} back to
/// the square lattice, and the constant metric A = (det R)⁻¹·R·Rᵀ.
pub struct RenormalizedMap<T: Scalar> {
    evaluator: MapEvaluator<T>,
    r: Matrix2<T>,
    r_inv: Matrix2<T>,
    det_r: T,
    a_mat: Matrix2<T>,
}

impl<T: Scalar> RenormalizedMap<T> {
    pub fn evaluator(&self) -> &MapEvaluator<T> {
        &self.evaluator
    }

    pub fn r(&self) -> Matrix2<T> {
        self.r
    }

    pub fn det_r(&self) -> T {
        self.det_r
    }

    /// Constant symmetric positive matrix A with det A = 1.
    pub fn a_matrix(&self) -> Matrix2<T> {
        self.a_mat
    }

    /// g(z) = R·f(z).
    pub fn g_evaluate(&self, z: Complex<T>) -> Complex<T> {
        apply2(&self.r, self.evaluator.evaluate(z))
    }

    /// g⁻¹(y) = f⁻¹(R⁻¹ y).
    pub fn g_invert(&self, y: Complex<T>, tol: T) -> Result<Complex<T>> {
        self.evaluator.invert(apply2(&self.r_inv, y), tol)
    }

    /// (Dg, J_g) at z.
    pub fn g_jacobian(&self, z: Complex<T>) -> Result<(Matrix2<T>, T)> {
        let (df, jf) = self.evaluator.jacobian_matrix(z)?;
        Ok((self.r * df, self.det_r * jf))
    }
}

/// Builds R from R·(2π,0) = (2π,0), R·(Re κ, Im κ) = (0,2π) and forms
/// A = (det R)⁻¹ R Rᵀ.
pub fn renormalize<T: Scalar>(map: &IsothermalMap<T>) -> Result<RenormalizedMap<T>> {
    let kappa = map.kappa();
    if to_f64(cnorm(Complex::new(kappa.im, T::zero()))) < crate::beltrami::DEGENERATE_KAPPA_TOL {
        return Err(Error::DegenerateLattice {
            im_kappa: to_f64(kappa.im),
        });
    }
    let r = Matrix2::new(
        T::one(),
        -kappa.re / kappa.im,
        T::zero(),
        T::two_pi() / kappa.im,
    );
    let det_r = r[(0, 0)] * r[(1, 1)] - r[(0, 1)] * r[(1, 0)];
    let a_mat = (r * r.transpose()).map(|x| x / det_r);
    let r_inv = r
        .try_inverse()
        .ok_or_else(|| Error::DegenerateLattice {
            im_kappa: to_f64(kappa.im),
        })?;
    Ok(RenormalizedMap {
        evaluator: MapEvaluator::new(map),
        r,
        r_inv,
        det_r,
        a_mat,
    })
}

// ---------------------------------------------------------------------------
// Identity verification
// ---------------------------------------------------------------------------

/// Worst absolute residual of each pointwise identity satisfied by the map
/// and its source metric, measured on the solver grid with spectral
/// derivatives.
#[derive(Clone, Copy, Debug)]
pub struct IdentityReport<T: Scalar> {
    /// ∇f₂ = J G ∇f₁.
    pub beltrami: T,
    /// ∇f₁ = −J G ∇f₂.
    pub laplace2: T,
    /// ⟨F∇f₁, F∇f₂⟩ = 0.
    pub orthog: T,
    /// J_f = |F∇f₁|² = |F∇f₂|².
    pub jacob: T,
    /// J_f⁻¹ · Df G Dfᵀ = I.
    pub changeg: T,
}

impl<T: Scalar> IdentityReport<T> {
    pub fn worst(&self) -> T {
        let mut w = self.beltrami;
        for v in [self.laplace2, self.orthog, self.jacob, self.changeg] {
            w = fmax(w, v);
        }
        w
    }

    pub fn passes(&self, tol: T) -> bool {
        self.worst() <= tol
    }
}

/// Evaluates the five identities samplewise on the map's grid.
pub fn verify_identities<T: Scalar>(
    map: &IsothermalMap<T>,
    metric: &MetricField<T>,
) -> Result<IdentityReport<T>> {
    if metric.grid() != map.grid() {
        return Err(Error::GridMismatch(
            "identity check needs the metric on the solver grid".into(),
        ));
    }
    let sqrt_metric = metric.sqrt()?;
    let (fz, fzb) = map.derivative_fields();
    let grid = map.grid();

    let mut rep = IdentityReport {
        beltrami: T::zero(),
        laplace2: T::zero(),
        orthog: T::zero(),
        jacob: T::zero(),
        changeg: T::zero(),
    };

    for s in 0..grid.len() {
        let (g11, g12, g22) = metric.at(s);
        let (f11, f12, f22) = sqrt_metric.at(s);
        let d1f = fz[s] + fzb[s];
        let d2f = (fz[s] - fzb[s]) * Complex::new(T::zero(), T::one());
        // Gradients of the real components.
        let grad1 = (d1f.re, d2f.re);
        let grad2 = (d1f.im, d2f.im);
        let jac = fz[s].norm_sqr() - fzb[s].norm_sqr();

        // G∇f₁, G∇f₂.
        let gg1 = (g11 * grad1.0 + g12 * grad1.1, g12 * grad1.0 + g22 * grad1.1);
        let gg2 = (g11 * grad2.0 + g12 * grad2.1, g12 * grad2.0 + g22 * grad2.1);
        // J·v = (−v₂, v₁).
        let r_beltrami = fmax(rabs(grad2.0 + gg1.1), rabs(grad2.1 - gg1.0));
        let r_laplace2 = fmax(rabs(grad1.0 - gg2.1), rabs(grad1.1 + gg2.0));

        // F∇f₁, F∇f₂.
        let fg1 = (f11 * grad1.0 + f12 * grad1.1, f12 * grad1.0 + f22 * grad1.1);
        let fg2 = (f11 * grad2.0 + f12 * grad2.1, f12 * grad2.0 + f22 * grad2.1);
        let r_orthog = rabs(fg1.0 * fg2.0 + fg1.1 * fg2.1);
        let n1 = fg1.0 * fg1.0 + fg1.1 * fg1.1;
        let n2 = fg2.0 * fg2.0 + fg2.1 * fg2.1;
        let r_jacob = fmax(rabs(jac - n1), rabs(jac - n2));

        // J⁻¹ Df G Dfᵀ = I with Df rows (∇f₁)ᵀ, (∇f₂)ᵀ.
        let m11 = (grad1.0 * gg1.0 + grad1.1 * gg1.1) / jac - T::one();
        let m12 = (grad1.0 * gg2.0 + grad1.1 * gg2.1) / jac;
        let m22 = (grad2.0 * gg2.0 + grad2.1 * gg2.1) / jac - T::one();
        let r_changeg = fmax(fmax(rabs(m11), rabs(m22)), rabs(m12));

        rep.beltrami = fmax(rep.beltrami, r_beltrami);
        rep.laplace2 = fmax(rep.laplace2, r_laplace2);
        rep.orthog = fmax(rep.orthog, r_orthog);
        rep.jacob = fmax(rep.jacob, r_jacob);
        rep.changeg = fmax(rep.changeg, r_changeg);
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beltrami::{solve_periodic_beltrami, SolverConfig};
    use crate::metric::BeltramiCoefficient;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const PI: f64 = std::f64::consts::PI;

    fn grid(n: usize) -> TorusGrid {
        TorusGrid::new(n, n).unwrap()
    }

    fn solve_const(q: f64) -> IsothermalMap<f64> {
        let qf = BeltramiCoefficient::<f64>::from_fn(grid(16), |_, _| Complex::new(q, 0.0));
        let cfg = SolverConfig {
            tolerance: 1e-14,
            ..SolverConfig::default()
        };
        solve_periodic_beltrami(&qf, &cfg).unwrap()
    }

    fn smooth_map(n: usize, sup: f64) -> (BeltramiCoefficient<f64>, IsothermalMap<f64>) {
        let q = crate::beltrami::tests::smooth_q(grid(n), sup);
        let map = solve_periodic_beltrami(&q, &SolverConfig::default()).unwrap();
        (q, map)
    }

    #[test]
    fn identity_map_evaluates_trivially() {
        let map = solve_const(0.0);
        let ev = MapEvaluator::new(&map);
        let z = Complex::new(1.0, 1.0);
        assert!((ev.evaluate(z) - z).norm() < 1e-12);
        assert!((ev.evaluate_direct(Complex::new(3.0, 2.0)) - Complex::new(3.0, 2.0)).norm() < 1e-12);
        assert!((ev.invert(Complex::new(3.0, 2.0), 1e-12).unwrap() - Complex::new(3.0, 2.0)).norm() < 1e-10);
        let (df, j) = ev.jacobian_matrix(z).unwrap();
        assert!((df - Matrix2::identity()).abs().max() < 1e-12);
        assert!((j - 1.0).abs() < 1e-12);
    }

    #[test]
    fn linear_map_normalization_points() {
        // q ≡ 1/3: f = x₁ + i x₂/2.
        let map = solve_const(1.0 / 3.0);
        let ev = MapEvaluator::new(&map);
        assert!(ev.evaluate(Complex::new(0.0, 0.0)).norm() < 1e-12);
        assert!((ev.evaluate(Complex::new(2.0 * PI, 0.0)) - Complex::new(2.0 * PI, 0.0)).norm() < 1e-11);
        // f(πi) = πi/2 and κ = 2i·Im f(πi) = πi.
        let f_pi_i = ev.evaluate_direct(Complex::new(0.0, PI));
        assert!((f_pi_i - Complex::new(0.0, PI / 2.0)).norm() < 1e-12);
        assert!((map.kappa() - Complex::new(0.0, 2.0 * f_pi_i.im)).norm() < 1e-11);
        // Jacobian [[1,0],[0,1/2]], J = 1/2.
        let (df, j) = ev.jacobian_matrix(Complex::new(1.0, 2.0)).unwrap();
        assert!((df - Matrix2::new(1.0, 0.0, 0.0, 0.5)).abs().max() < 1e-12);
        assert!((j - 0.5).abs() < 1e-12);
        // invert: f(1 + 2i) = 1 + i.
        let z = ev.invert(Complex::new(1.0, 1.0), 1e-12).unwrap();
        assert!((z - Complex::new(1.0, 2.0)).norm() < 1e-10);
    }

    #[test]
    fn round_trip_inversion_on_random_points() {
        let (_, map) = smooth_map(64, 0.5);
        let ev = MapEvaluator::new(&map);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let z = Complex::new(rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI));
            let w = ev.evaluate(z);
            let back = ev.invert(w, 1e-11).unwrap();
            assert!((back - z).norm() < 1e-9, "z = {z}, back = {back}");
            let forward = ev.evaluate(back);
            assert!((forward - w).norm() < 1e-9);
        }
    }

    #[test]
    fn periodicity_of_evaluation() {
        let (_, map) = smooth_map(64, 0.45);
        let ev = MapEvaluator::new(&map);
        let kappa = map.kappa();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut worst1 = 0.0f64;
        let mut worst2 = 0.0f64;
        for _ in 0..200 {
            let z = Complex::new(rng.gen_range(-2.0..8.0), rng.gen_range(-2.0..8.0));
            let f0 = ev.evaluate_direct(z);
            let f1 = ev.evaluate_direct(z + Complex::new(2.0 * PI, 0.0));
            let f2 = ev.evaluate_direct(z + Complex::new(0.0, 2.0 * PI));
            worst1 = worst1.max((f1 - f0 - Complex::new(2.0 * PI, 0.0)).norm());
            worst2 = worst2.max((f2 - f0 - kappa).norm());
        }
        let scale = 1.0 + kappa.norm();
        assert!(worst1 < 1e-8 * scale, "worst1 = {worst1:e}");
        assert!(worst2 < 1e-8 * scale, "worst2 = {worst2:e}");
    }

    #[test]
    fn renormalization_examples() {
        // κ = 2πi → R = I, A = I.
        let map = solve_const(0.0);
        let rn = renormalize(&map).unwrap();
        assert!((rn.r() - Matrix2::identity()).abs().max() < 1e-12);
        assert!((rn.a_matrix() - Matrix2::identity()).abs().max() < 1e-12);

        // κ = πi → R = diag(1, 2), A = diag(1/2, 2).
        let map = solve_const(1.0 / 3.0);
        let rn = renormalize(&map).unwrap();
        assert!((rn.r() - Matrix2::new(1.0, 0.0, 0.0, 2.0)).abs().max() < 1e-12);
        assert!((rn.a_matrix() - Matrix2::new(0.5, 0.0, 0.0, 2.0)).abs().max() < 1e-12);
        let a = rn.a_matrix();
        assert!(((a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn renormalized_map_is_square_periodic() {
        let (_, map) = smooth_map(64, 0.5);
        let rn = renormalize(&map).unwrap();
        let a = rn.a_matrix();
        assert!(((a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)]) - 1.0).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let z = Complex::new(rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI));
            let g0 = rn.g_evaluate(z);
            let g1 = rn.g_evaluate(z + Complex::new(2.0 * PI, 0.0));
            let g2 = rn.g_evaluate(z + Complex::new(0.0, 2.0 * PI));
            assert!((g1 - g0 - Complex::new(2.0 * PI, 0.0)).norm() < 1e-8);
            assert!((g2 - g0 - Complex::new(0.0, 2.0 * PI)).norm() < 1e-8);
        }
    }

    #[test]
    fn identities_vanish_for_constant_metrics() {
        let g = grid(16);
        let metric = MetricField::<f64>::constant(g, 0.5, 0.0, 2.0);
        let q = metric.to_beltrami().unwrap();
        let cfg = SolverConfig {
            tolerance: 1e-14,
            ..SolverConfig::default()
        };
        let map = solve_periodic_beltrami(&q, &cfg).unwrap();
        let rep = verify_identities(&map, &metric).unwrap();
        assert!(rep.worst() < 1e-12, "{rep:?}");
    }

    #[test]
    fn identities_hold_and_halve_under_refinement() {
        let worst_at = |n: usize| {
            let g = grid(n);
            let metric = MetricField::<f64>::from_fn(g, |x1, x2| {
                let lam = (0.35 * (x1 + 0.3 * x2.sin()).sin() + 0.25 * x2.cos()).exp();
                let th = 0.6 * (x2 + 0.4 * (2.0 * x1).cos()).sin();
                let (s, c) = th.sin_cos();
                (
                    lam * c * c + s * s / lam,
                    (lam - 1.0 / lam) * s * c,
                    lam * s * s + c * c / lam,
                )
            });
            let q = metric.to_beltrami().unwrap();
            let map = solve_periodic_beltrami(&q, &SolverConfig::default()).unwrap();
            verify_identities(&map, &metric).unwrap().worst()
        };
        let w32 = worst_at(32);
        let w64 = worst_at(64);
        assert!(w64 < 1e-7, "worst at 64^2 = {w64:e}");
        assert!(w64 * 2.0 <= w32, "refinement must halve: {w32:e} -> {w64:e}");
    }

    #[test]
    fn mirror_symmetric_gives_diagonal_a_and_kappa_identity() {
        let g = grid(64);
        let metric = MetricField::<f64>::from_fn(g, |x1, x2| {
            let lam = (0.4 * x2.cos() + 0.2 * (x1 + 0.7).cos() * x2.cos()).exp();
            let th = 0.5 * x2.sin();
            let (s, c) = th.sin_cos();
            (
                lam * c * c + s * s / lam,
                (lam - 1.0 / lam) * s * c,
                lam * s * s + c * c / lam,
            )
        });
        let q = metric.to_beltrami().unwrap();
        let map = solve_periodic_beltrami(&q, &SolverConfig::default()).unwrap();
        assert!(map.kappa().re.abs() < 1e-8);
        let ev = MapEvaluator::new(&map);
        let f_pi_i = ev.evaluate_direct(Complex::new(0.0, PI));
        assert!((map.kappa() - Complex::new(0.0, 2.0 * f_pi_i.im)).norm() < 1e-8);
        let rn = renormalize(&map).unwrap();
        assert!(rn.a_matrix()[(0, 1)].abs() < 1e-8);
    }
}
