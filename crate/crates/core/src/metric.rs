//! Periodic metric fields on the torus and the Beltrami coefficient.
//!
//! A metric is a symmetric positive 2×2 matrix field G with constant
//! determinant. After normalizing det G = 1, the field is equivalent to a
//! complex dilatation q with sup|q| < 1, and the two directions of that
//! conversion are inverse to each other.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::TorusGrid;
use crate::scalar::{cast, cnorm, fmax, machine_epsilon, rabs, to_f64, Scalar};

/// Relative tolerance for the det-constancy rule.
pub const DET_CONSTANCY_REL_TOL: f64 = 1e-10;

/// sup|q| at or above 1 − this margin is rejected: the fixed-point
/// contraction rate of the Beltrami solver equals sup|q|.
pub const ELLIPTICITY_MARGIN: f64 = 1e-12;

/// Symmetric 2×2 matrix field on a torus grid; only three entries stored.
#[derive(Clone, Debug)]
pub struct MetricField<T: Scalar> {
    grid: TorusGrid,
    g11: Vec<T>,
    g12: Vec<T>,
    g22: Vec<T>,
    /// Smallest eigenvalue over all samples.
    ell_lower: T,
    /// Largest eigenvalue over all samples.
    ell_upper: T,
    /// Determinant at the first sample; constancy is a validation rule.
    det_constant: T,
}

/// One failed validation rule with its worst sample.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Violation {
    pub rule: String,
    /// Grid indices (i, j) of the worst offender.
    pub location: (usize, usize),
    /// Magnitude of the violation at that sample.
    pub worst: f64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn from_violations(violations: Vec<Violation>) -> Self {
        Self {
            passed: violations.is_empty(),
            violations,
        }
    }
}

/// det G = 1 pre-check tolerance, scaled to the working precision.
fn det_one_tol<T: Scalar>() -> T {
    fmax(cast::<T>(1e-8), machine_epsilon::<T>() * cast::<T>(500.0))
}

/// Eigenvalues of a symmetric 2×2 matrix, ascending.
#[inline]
pub fn sym_eigenvalues<T: Scalar>(a11: T, a12: T, a22: T) -> (T, T) {
    let half = cast::<T>(0.5);
    let mean = (a11 + a22) * half;
    let diff = (a11 - a22) * half;
    let r = (diff * diff + a12 * a12).sqrt();
    (mean - r, mean + r)
}

impl<T: Scalar> MetricField<T> {
    /// Builds a metric field from raw component arrays (no pointwise checks;
    /// run [`MetricField::validate`] for those).
    pub fn new(grid: TorusGrid, g11: Vec<T>, g12: Vec<T>, g22: Vec<T>) -> Result<Self> {
        for (name, v) in [("g11", &g11), ("g12", &g12), ("g22", &g22)] {
            if v.len() != grid.len() {
                return Err(Error::GridMismatch(format!(
                    "{name} has {} samples, grid wants {}",
                    v.len(),
                    grid.len()
                )));
            }
        }
        let mut lo = T::max_value().unwrap_or_else(T::one);
        let mut hi = T::zero();
        for s in 0..grid.len() {
            let (emin, emax) = sym_eigenvalues(g11[s], g12[s], g22[s]);
            if emin < lo {
                lo = emin;
            }
            if emax > hi {
                hi = emax;
            }
        }
        let det = g11[0] * g22[0] - g12[0] * g12[0];
        Ok(Self {
            grid,
            g11,
            g12,
            g22,
            ell_lower: lo,
            ell_upper: hi,
            det_constant: det,
        })
    }

    /// Samples a closed-form metric x ↦ (g11, g12, g22) on the grid.
    pub fn from_fn(grid: TorusGrid, mut f: impl FnMut(T, T) -> (T, T, T)) -> Self {
        let mut g11 = Vec::with_capacity(grid.len());
        let mut g12 = Vec::with_capacity(grid.len());
        let mut g22 = Vec::with_capacity(grid.len());
        for i in 0..grid.n1() {
            for j in 0..grid.n2() {
                let (a, b, c) = f(grid.x1::<T>(i), grid.x2::<T>(j));
                g11.push(a);
                g12.push(b);
                g22.push(c);
            }
        }
        Self::new(grid, g11, g12, g22).expect("lengths match by construction")
    }

    pub fn constant(grid: TorusGrid, g11: T, g12: T, g22: T) -> Self {
        Self::from_fn(grid, |_, _| (g11, g12, g22))
    }

    pub fn identity(grid: TorusGrid) -> Self {
        Self::constant(grid, T::one(), T::zero(), T::one())
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn g11(&self) -> &[T] {
        &self.g11
    }

    pub fn g12(&self) -> &[T] {
        &self.g12
    }

    pub fn g22(&self) -> &[T] {
        &self.g22
    }

    /// (g11, g12, g22) at linear sample index.
    #[inline]
    pub fn at(&self, s: usize) -> (T, T, T) {
        (self.g11[s], self.g12[s], self.g22[s])
    }

    pub fn ellipticity_bounds(&self) -> (T, T) {
        (self.ell_lower, self.ell_upper)
    }

    pub fn det_constant(&self) -> T {
        self.det_constant
    }

    /// Checks pointwise positivity (both eigenvalues within the recorded
    /// bounds, in particular positive) and determinant constancy.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();

        // Positivity: worst sample by smallest eigenvalue.
        let mut worst_min = T::max_value().unwrap_or_else(T::one);
        let mut worst_min_at = (0usize, 0usize);
        for (i, j, s) in self.grid.iter() {
            let (emin, _) = sym_eigenvalues(self.g11[s], self.g12[s], self.g22[s]);
            if emin < worst_min {
                worst_min = emin;
                worst_min_at = (i, j);
            }
        }
        if worst_min <= T::zero() {
            violations.push(Violation {
                rule: "positivity".into(),
                location: worst_min_at,
                worst: to_f64(worst_min),
            });
        }

        // Det constancy relative to the recorded constant.
        let tol = cast::<T>(DET_CONSTANCY_REL_TOL) * rabs(self.det_constant);
        let mut worst_dev = T::zero();
        let mut worst_dev_at = (0usize, 0usize);
        for (i, j, s) in self.grid.iter() {
            let det = self.g11[s] * self.g22[s] - self.g12[s] * self.g12[s];
            let dev = rabs(det - self.det_constant);
            if dev > worst_dev {
                worst_dev = dev;
                worst_dev_at = (i, j);
            }
        }
        if self.det_constant <= T::zero() || worst_dev > tol {
            violations.push(Violation {
                rule: "det-constancy".into(),
                location: worst_dev_at,
                worst: to_f64(worst_dev),
            });
        }

        ValidationReport::from_violations(violations)
    }

    /// Rescales to unit determinant: G = s·G' with s = √(det G).
    ///
    /// Returns (G', s). The discarded scalar s belongs to the conformal
    /// factor: ω²G = (ω²s)·G', so callers fold s into the weight ω².
    pub fn normalize_det(&self) -> Result<(MetricField<T>, T)> {
        if self.det_constant <= T::zero() {
            return Err(Error::InvalidMetric(format!(
                "determinant constant must be positive, got {:?}",
                self.det_constant
            )));
        }
        let s = self.det_constant.sqrt();
        let inv = T::one() / s;
        let scale = |v: &[T]| v.iter().map(|&x| x * inv).collect::<Vec<_>>();
        let out = MetricField::new(
            self.grid,
            scale(&self.g11),
            scale(&self.g12),
            scale(&self.g22),
        )?;
        Ok((out, s))
    }

    /// Maximum |det − 1| over samples.
    pub fn det_one_deviation(&self) -> T {
        let mut worst = T::zero();
        for s in 0..self.grid.len() {
            let det = self.g11[s] * self.g22[s] - self.g12[s] * self.g12[s];
            let dev = rabs(det - T::one());
            if dev > worst {
                worst = dev;
            }
        }
        worst
    }

    /// Complex dilatation q = (−g12 + i(1−g22)) / (g12 − i(g22+1)).
    ///
    /// Requires det G = 1 pointwise; sup|q| < 1 then follows from
    /// ellipticity, and values too close to 1 are rejected because they
    /// stall the fixed-point solver.
    pub fn to_beltrami(&self) -> Result<BeltramiCoefficient<T>> {
        let dev = self.det_one_deviation();
        if dev > det_one_tol::<T>() {
            return Err(Error::InvalidMetric(format!(
                "to_beltrami needs det G = 1 pointwise; worst |det - 1| = {:?}",
                dev
            )));
        }
        let mut q = Vec::with_capacity(self.grid.len());
        let mut sup = T::zero();
        for s in 0..self.grid.len() {
            let g12 = self.g12[s];
            let g22 = self.g22[s];
            let num = Complex::new(-g12, T::one() - g22);
            let den = Complex::new(g12, -(g22 + T::one()));
            let v = num / den;
            let a = cnorm(v);
            if a > sup {
                sup = a;
            }
            q.push(v);
        }
        if sup >= T::one() - cast::<T>(ELLIPTICITY_MARGIN) {
            return Err(Error::DegenerateEllipticity {
                sup_norm: to_f64(sup),
            });
        }
        Ok(BeltramiCoefficient {
            grid: self.grid,
            q,
            sup_norm: sup,
        })
    }

    /// Pointwise principal square root F with F·F = G, det F = 1.
    ///
    /// For a 2×2 SPD matrix with unit determinant, (G + I)² = (tr G + 2)·G,
    /// so F = (G + I)/√(tr G + 2).
    pub fn sqrt(&self) -> Result<MetricField<T>> {
        let dev = self.det_one_deviation();
        if dev > det_one_tol::<T>() {
            return Err(Error::InvalidMetric(format!(
                "sqrt needs det G = 1; worst |det - 1| = {:?}",
                dev
            )));
        }
        if self.ell_lower <= T::zero() {
            return Err(Error::InvalidMetric(
                "sqrt needs a positive matrix at every sample".into(),
            ));
        }
        let mut f11 = Vec::with_capacity(self.grid.len());
        let mut f12 = Vec::with_capacity(self.grid.len());
        let mut f22 = Vec::with_capacity(self.grid.len());
        for s in 0..self.grid.len() {
            let tr = self.g11[s] + self.g22[s];
            let scale = T::one() / (tr + cast::<T>(2.0)).sqrt();
            f11.push((self.g11[s] + T::one()) * scale);
            f12.push(self.g12[s] * scale);
            f22.push((self.g22[s] + T::one()) * scale);
        }
        MetricField::new(self.grid, f11, f12, f22)
    }
}

/// Complex dilatation field with its sup norm.
#[derive(Clone, Debug)]
pub struct BeltramiCoefficient<T: Scalar> {
    grid: TorusGrid,
    q: Vec<Complex<T>>,
    sup_norm: T,
}

impl<T: Scalar> BeltramiCoefficient<T> {
    pub fn new(grid: TorusGrid, q: Vec<Complex<T>>) -> Result<Self> {
        if q.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "q has {} samples, grid wants {}",
                q.len(),
                grid.len()
            )));
        }
        let sup = q.iter().map(|&v| cnorm(v)).fold(T::zero(), fmax);
        Ok(Self {
            grid,
            q,
            sup_norm: sup,
        })
    }

    pub fn from_fn(grid: TorusGrid, f: impl FnMut(T, T) -> Complex<T>) -> Self {
        let q = grid.sample(f);
        Self::new(grid, q).expect("lengths match by construction")
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.q
    }

    pub fn sup_norm(&self) -> T {
        self.sup_norm
    }

    /// The unique symmetric det-1 metric mapping to this dilatation:
    /// g11 = |1−q|²/(1−|q|²), g12 = −2 Im q/(1−|q|²), g22 = |1+q|²/(1−|q|²).
    pub fn to_metric(&self) -> Result<MetricField<T>> {
        if self.sup_norm >= T::one() {
            return Err(Error::DegenerateEllipticity {
                sup_norm: to_f64(self.sup_norm),
            });
        }
        let one = Complex::new(T::one(), T::zero());
        let two = cast::<T>(2.0);
        let mut g11 = Vec::with_capacity(self.grid.len());
        let mut g12 = Vec::with_capacity(self.grid.len());
        let mut g22 = Vec::with_capacity(self.grid.len());
        for &qv in &self.q {
            let denom = T::one() - qv.norm_sqr();
            g11.push((one - qv).norm_sqr() / denom);
            g12.push(-two * qv.im / denom);
            g22.push((one + qv).norm_sqr() / denom);
        }
        MetricField::new(self.grid, g11, g12, g22)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> TorusGrid {
        TorusGrid::new(16, 16).unwrap()
    }

    #[test]
    fn identity_metric_validates() {
        let g = MetricField::<f64>::identity(grid());
        let report = g.validate();
        assert!(report.passed, "{:?}", report.violations);
        let (lo, hi) = g.ellipticity_bounds();
        assert!((lo - 1.0).abs() < 1e-15 && (hi - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constant_diagonal_bounds() {
        let g = MetricField::<f64>::constant(grid(), 0.5, 0.0, 2.0);
        let report = g.validate();
        assert!(report.passed);
        let (lo, hi) = g.ellipticity_bounds();
        assert!((lo - 0.5).abs() < 1e-15);
        assert!((hi - 2.0).abs() < 1e-15);
        assert!((g.det_constant() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn varying_determinant_fails_at_worst_sample() {
        let gr = grid();
        let g = MetricField::<f64>::from_fn(gr, |x1, _| (1.0, 0.0, 1.0 + 0.5 * x1.sin()));
        let report = g.validate();
        assert!(!report.passed);
        let v = report
            .violations
            .iter()
            .find(|v| v.rule == "det-constancy")
            .expect("det rule must be flagged");
        // det = 1 + 0.5 sin(x1), det_constant = 1 (first sample, x1 = 0).
        // Worst deviation 0.5 at x1 = π/2 -> i = n1/4.
        assert_eq!(v.location.0, gr.n1() / 4);
        assert!((v.worst - 0.5).abs() < 1e-12);
    }

    #[test]
    fn normalize_det_divides_by_sqrt_det() {
        let g = MetricField::<f64>::constant(grid(), 2.0, 0.0, 2.0);
        let (gn, s) = g.normalize_det().unwrap();
        assert!((s - 2.0).abs() < 1e-15);
        assert!((gn.g11()[0] - 1.0).abs() < 1e-15);
        assert!((gn.g22()[0] - 1.0).abs() < 1e-15);
        assert!(gn.det_one_deviation() < 1e-12);

        // det = 1 inputs are fixed points.
        let g = MetricField::<f64>::constant(grid(), 0.5, 0.0, 2.0);
        let (gn, s) = g.normalize_det().unwrap();
        assert!((s - 1.0).abs() < 1e-15);
        assert!((gn.g11()[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn normalize_det_rejects_nonpositive_determinant() {
        let g = MetricField::<f64>::constant(grid(), 1.0, 2.0, 1.0); // det = -3
        assert!(matches!(
            g.normalize_det(),
            Err(crate::error::Error::InvalidMetric(_))
        ));
    }

    #[test]
    fn beltrami_of_diagonal_metric() {
        let g = MetricField::<f64>::constant(grid(), 0.5, 0.0, 2.0);
        let q = g.to_beltrami().unwrap();
        for v in q.values() {
            assert!((v - Complex::new(1.0 / 3.0, 0.0)).norm() < 1e-15);
        }
        assert!((q.sup_norm() - 1.0 / 3.0).abs() < 1e-15);

        let id = MetricField::<f64>::identity(grid());
        let q0 = id.to_beltrami().unwrap();
        assert!(q0.sup_norm() < 1e-15);
    }

    #[test]
    fn beltrami_inverse_recovers_diagonal() {
        let q = BeltramiCoefficient::<f64>::from_fn(grid(), |_, _| Complex::new(1.0 / 3.0, 0.0));
        let g = q.to_metric().unwrap();
        assert!((g.g11()[0] - 0.5).abs() < 1e-14);
        assert!(g.g12()[0].abs() < 1e-14);
        assert!((g.g22()[0] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_dilatation_has_no_elliptic_preimage() {
        let q = BeltramiCoefficient::<f64>::from_fn(grid(), |x1, _| {
            Complex::new(0.5 + 0.5 * x1.cos().abs(), 0.0)
        });
        assert!(matches!(
            q.to_metric(),
            Err(crate::error::Error::DegenerateEllipticity { .. })
        ));
    }

    #[test]
    fn mirror_symmetric_metric_gives_conjugate_symmetric_q() {
        // g11, g22 even in x2 and g12 odd in x2 <=> q(x̄) = conj q(x).
        let gr = grid();
        let g = MetricField::<f64>::from_fn(gr, |x1, x2| {
            let lam = (0.3 * x1.cos() + 0.2 * x2.cos()).exp();
            let th = 0.4 * x2.sin() * (1.0 + 0.5 * x1.cos());
            rotated(lam, th)
        });
        let q = g.to_beltrami().unwrap();
        for i in 0..gr.n1() {
            for j in 0..gr.n2() {
                let jm = (gr.n2() - j) % gr.n2();
                let a = q.values()[gr.idx(i, j)];
                let b = q.values()[gr.idx(i, jm)];
                assert!((a - b.conj()).norm() < 1e-13, "i={i} j={j}");
            }
        }
    }

    #[test]
    fn sqrt_squares_back_in_rotated_basis() {
        let gr = grid();
        let theta = std::f64::consts::PI / 6.0;
        let g = MetricField::<f64>::from_fn(gr, |_, _| rotated(2.0, theta));
        let f = g.sqrt().unwrap();
        for s in 0..gr.len() {
            let (f11, f12, f22) = f.at(s);
            let (g11, g12, g22) = g.at(s);
            assert!((f11 * f11 + f12 * f12 - g11).abs() < 1e-12);
            assert!((f11 * f12 + f12 * f22 - g12).abs() < 1e-12);
            assert!((f12 * f12 + f22 * f22 - g22).abs() < 1e-12);
            assert!((f11 * f22 - f12 * f12 - 1.0).abs() < 1e-12);
        }
        // Diagonal case from the oracle: diag(1/2, 2) -> diag(1/√2, √2).
        let d = MetricField::<f64>::constant(gr, 0.5, 0.0, 2.0);
        let fd = d.sqrt().unwrap();
        assert!((fd.g11()[0] - 1.0 / 2.0f64.sqrt()).abs() < 1e-15);
        assert!((fd.g22()[0] - 2.0f64.sqrt()).abs() < 1e-15);
    }

    /// R(θ)·diag(λ, 1/λ)·R(θ)ᵀ — det-1 by construction.
    fn rotated(lam: f64, th: f64) -> (f64, f64, f64) {
        let (s, c) = th.sin_cos();
        let g11 = lam * c * c + s * s / lam;
        let g22 = lam * s * s + c * c / lam;
        let g12 = (lam - 1.0 / lam) * s * c;
        (g11, g12, g22)
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]
            #[test]
            fn round_trip_metric_beltrami_metric(
                a0 in -0.6f64..0.6, a1 in -0.5f64..0.5,
                t0 in -2.0f64..2.0, t1 in -1.0f64..1.0,
            ) {
                let gr = TorusGrid::new(16, 16).unwrap();
                let g = MetricField::<f64>::from_fn(gr, |x1, x2| {
                    let lam = (a0 * x1.cos() + a1 * (x2 + 0.3).sin()).exp();
                    let th = t0 * 0.3 + t1 * 0.25 * (x1 + 2.0 * x2).cos();
                    rotated(lam, th)
                });
                let q = g.to_beltrami().unwrap();
                prop_assert!(q.sup_norm() < 1.0);
                let g2 = q.to_metric().unwrap();
                for s in 0..gr.len() {
                    prop_assert!((g.g11()[s] - g2.g11()[s]).abs() < 1e-10);
                    prop_assert!((g.g12()[s] - g2.g12()[s]).abs() < 1e-10);
                    prop_assert!((g.g22()[s] - g2.g22()[s]).abs() < 1e-10);
                }
            }

            #[test]
            fn dilatation_bound_is_monotone_in_anisotropy(t in 1.05f64..6.0) {
                // For diag(t, 1/t) the upper ellipticity bound is C = t and
                // the dilatation saturates (C−1)/(C+1).
                let gr = TorusGrid::new(8, 8).unwrap();
                let g = MetricField::<f64>::constant(gr, t, 0.0, 1.0 / t);
                let q = g.to_beltrami().unwrap();
                let (_, c_up) = g.ellipticity_bounds();
                prop_assert!((c_up - t).abs() < 1e-12);
                let bound = (c_up - 1.0) / (c_up + 1.0);
                prop_assert!(q.sup_norm() >= bound - 1e-12);
                prop_assert!((q.sup_norm() - bound).abs() < 1e-12);
                let g_milder = MetricField::<f64>::constant(gr, t.sqrt(), 0.0, 1.0 / t.sqrt());
                prop_assert!(g_milder.to_beltrami().unwrap().sup_norm() < q.sup_norm());
            }
        }
    }
}
