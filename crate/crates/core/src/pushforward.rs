//! Transport of operator coefficients through the renormalized map g = R∘f,
//! delta-line transport, and the conformal-factor (sandwich) reduction.

use nalgebra::Matrix2;
use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft::Fft2;
use crate::grid::{StripGrid, TorusGrid};
use crate::interp::SplineTable;
use crate::isomap::RenormalizedMap;
use crate::metric::MetricField;
use crate::scalar::{cast, fmin, to_f64, Scalar};

/// Metric entering a fiber assembly: a constant matrix (the reduced problem)
/// or a variable field (the source problem).
#[derive(Clone, Debug)]
pub enum Metric<T: Scalar> {
    Constant(Matrix2<T>),
    Field(MetricField<T>),
}

impl<T: Scalar> Metric<T> {
    pub fn identity() -> Self {
        Metric::Constant(Matrix2::identity())
    }

    pub fn diagonal(b1: T, b2: T) -> Self {
        Metric::Constant(Matrix2::new(b1, T::zero(), T::zero(), b2))
    }
}

/// A delta interaction supported on the horizontal line x₂ = y0, with
/// density σ sampled over x₁ (n1 values).
#[derive(Clone, Debug)]
pub struct DeltaLine<T: Scalar> {
    pub y0: T,
    pub sigma: Vec<T>,
}

/// Electric/magnetic/weight data of one periodic operator on the torus.
#[derive(Clone, Debug)]
pub struct CoefficientSet<T: Scalar> {
    grid: TorusGrid,
    pub metric: Metric<T>,
    pub a1: Vec<T>,
    pub a2: Vec<T>,
    pub v: Vec<T>,
    pub mu: Vec<T>,
    pub delta_lines: Vec<DeltaLine<T>>,
}

impl<T: Scalar> CoefficientSet<T> {
    pub fn new(
        grid: TorusGrid,
        metric: Metric<T>,
        a1: Vec<T>,
        a2: Vec<T>,
        v: Vec<T>,
        mu: Vec<T>,
        delta_lines: Vec<DeltaLine<T>>,
    ) -> Result<Self> {
        for (name, f) in [("a1", &a1), ("a2", &a2), ("V", &v), ("mu", &mu)] {
            if f.len() != grid.len() {
                return Err(Error::GridMismatch(format!(
                    "{name} has {} samples, grid wants {}",
                    f.len(),
                    grid.len()
                )));
            }
        }
        let mu_min = mu.iter().copied().fold(T::max_value().unwrap_or_else(T::one), fmin);
        if mu_min <= T::zero() {
            return Err(Error::NonPositiveWeight {
                min: to_f64(mu_min),
            });
        }
        if let Metric::Field(m) = &metric {
            if m.grid() != grid {
                return Err(Error::GridMismatch(
                    "metric field grid differs from coefficient grid".into(),
                ));
            }
        }
        for line in &delta_lines {
            if line.sigma.len() != grid.n1() {
                return Err(Error::GridMismatch(format!(
                    "delta density has {} samples, grid wants n1 = {}",
                    line.sigma.len(),
                    grid.n1()
                )));
            }
        }
        Ok(Self {
            grid,
            metric,
            a1,
            a2,
            v,
            mu,
            delta_lines,
        })
    }

    /// Free Laplacian data: A = I, a = 0, V = 0, μ = 1.
    pub fn free(grid: TorusGrid) -> Self {
        let zero = vec![T::zero(); grid.len()];
        let one = vec![T::one(); grid.len()];
        Self::new(grid, Metric::identity(), zero.clone(), zero.clone(), zero, one, Vec::new())
            .expect("free data is valid")
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn with_potential(mut self, v: impl FnMut(T, T) -> T) -> Self {
        self.v = self.grid.sample(v);
        self
    }

    pub fn with_magnetic(mut self, a1: impl FnMut(T, T) -> T, a2: impl FnMut(T, T) -> T) -> Self {
        self.a1 = self.grid.sample(a1);
        self.a2 = self.grid.sample(a2);
        self
    }

    pub fn with_weight(mut self, mu: impl FnMut(T, T) -> T) -> Result<Self> {
        self.mu = self.grid.sample(mu);
        let mu_min = self
            .mu
            .iter()
            .copied()
            .fold(T::max_value().unwrap_or_else(T::one), fmin);
        if mu_min <= T::zero() {
            return Err(Error::NonPositiveWeight {
                min: to_f64(mu_min),
            });
        }
        Ok(self)
    }

    pub fn with_metric(mut self, metric: Metric<T>) -> Result<Self> {
        if let Metric::Field(m) = &metric {
            if m.grid() != self.grid {
                return Err(Error::GridMismatch(
                    "metric field grid differs from coefficient grid".into(),
                ));
            }
        }
        self.metric = metric;
        Ok(self)
    }

    pub fn with_delta_line(mut self, y0: T, sigma: impl FnMut(T) -> T) -> Self {
        let mut f = sigma;
        let sigma: Vec<T> = (0..self.grid.n1()).map(|i| f(self.grid.x1(i))).collect();
        self.delta_lines.push(DeltaLine { y0, sigma });
        self
    }
}

/// Newton tolerance for the per-sample pullback.
const PULLBACK_TOL: f64 = 1e-11;

/// Per-sample pushforward values (ã₁, ã₂, Ṽ, μ̃).
type PulledRow<T> = Vec<(T, T, T, T)>;

/// Pushes (a, V, μ) through g: for each target sample y, with x = g⁻¹(y),
///   ã(y) = (Dg(x)ᵀ)⁻¹ a(x),  Ṽ(y) = V(x)/J_g(x),  μ̃(y) = 1/J_g(x),
/// and the metric becomes the constant A of the renormalized map.
pub fn pushforward<T: Scalar>(
    rmap: &RenormalizedMap<T>,
    src: &CoefficientSet<T>,
) -> Result<CoefficientSet<T>> {
    let grid = src.grid;
    if rmap.evaluator().grid() != grid {
        return Err(Error::GridMismatch(
            "pushforward needs the map solved on the coefficient grid".into(),
        ));
    }
    let a1_t = SplineTable::from_real_field(grid, &src.a1);
    let a2_t = SplineTable::from_real_field(grid, &src.a2);
    let v_t = SplineTable::from_real_field(grid, &src.v);
    let tol = cast::<T>(PULLBACK_TOL);

    let rows: Result<Vec<PulledRow<T>>> = (0..grid.n1())
        .into_par_iter()
        .map(|i| {
            let mut row = Vec::with_capacity(grid.n2());
            let mut seed: Option<Complex<T>> = None;
            for j in 0..grid.n2() {
                let y = Complex::new(grid.x1::<T>(i), grid.x2::<T>(j));
                let x = invert_warm(rmap, y, seed, tol).map_err(|e| {
                    Error::Pushforward {
                        x1: to_f64(y.re),
                        x2: to_f64(y.im),
                        reason: e.to_string(),
                    }
                })?;
                seed = Some(x);
                let (dg, jg) = rmap.g_jacobian(x).map_err(|e| Error::Pushforward {
                    x1: to_f64(y.re),
                    x2: to_f64(y.im),
                    reason: e.to_string(),
                })?;
                let a_vec = (a1_t.eval_real(x.re, x.im), a2_t.eval_real(x.re, x.im));
                // (Dgᵀ)⁻¹ a.
                let dgt_inv = dg
                    .transpose()
                    .try_inverse()
                    .ok_or_else(|| Error::Pushforward {
                        x1: to_f64(y.re),
                        x2: to_f64(y.im),
                        reason: "singular Jacobian".into(),
                    })?;
                let at1 = dgt_inv[(0, 0)] * a_vec.0 + dgt_inv[(0, 1)] * a_vec.1;
                let at2 = dgt_inv[(1, 0)] * a_vec.0 + dgt_inv[(1, 1)] * a_vec.1;
                let vt = v_t.eval_real(x.re, x.im) / jg;
                let mt = T::one() / jg;
                row.push((at1, at2, vt, mt));
            }
            Ok(row)
        })
        .collect();
    let rows = rows?;

    let mut a1 = Vec::with_capacity(grid.len());
    let mut a2 = Vec::with_capacity(grid.len());
    let mut v = Vec::with_capacity(grid.len());
    let mut mu = Vec::with_capacity(grid.len());
    for row in rows {
        for (x1, x2, x3, x4) in row {
            a1.push(x1);
            a2.push(x2);
            v.push(x3);
            mu.push(x4);
        }
    }
    CoefficientSet::new(
        grid,
        Metric::Constant(rmap.a_matrix()),
        a1,
        a2,
        v,
        mu,
        Vec::new(),
    )
}

/// Newton with warm start from the neighboring sample, falling back to the
/// linear-part seed.
fn invert_warm<T: Scalar>(
    rmap: &RenormalizedMap<T>,
    y: Complex<T>,
    seed: Option<Complex<T>>,
    tol: T,
) -> Result<Complex<T>> {
    if let Some(s) = seed {
        // One cheap check: reuse the neighbor if Newton converges from it.
        if let Ok(x) = newton_from(rmap, y, s, tol) {
            return Ok(x);
        }
    }
    rmap.g_invert(y, tol)
}

fn newton_from<T: Scalar>(
    rmap: &RenormalizedMap<T>,
    y: Complex<T>,
    start: Complex<T>,
    tol: T,
) -> Result<Complex<T>> {
    let mut z = start;
    let mut best = crate::scalar::cnorm(rmap.g_evaluate(z) - y);
    for _ in 0..30 {
        if best < tol {
            return Ok(z);
        }
        let (dg, _) = rmap.g_jacobian(z)?;
        let r = rmap.g_evaluate(z) - y;
        let step = dg.try_inverse().ok_or(Error::InversionFailed {
            re: to_f64(y.re),
            im: to_f64(y.im),
            residual: to_f64(best),
        })?;
        let d = Complex::new(
            step[(0, 0)] * r.re + step[(0, 1)] * r.im,
            step[(1, 0)] * r.re + step[(1, 1)] * r.im,
        );
        let cand = z - d;
        let rc = crate::scalar::cnorm(rmap.g_evaluate(cand) - y);
        if rc >= best {
            return Err(Error::InversionFailed {
                re: to_f64(y.re),
                im: to_f64(y.im),
                residual: to_f64(rc),
            });
        }
        z = cand;
        best = rc;
    }
    if best < tol {
        Ok(z)
    } else {
        Err(Error::InversionFailed {
            re: to_f64(y.re),
            im: to_f64(y.im),
            residual: to_f64(best),
        })
    }
}

/// Image of a horizontal delta line under g, with the transported density.
#[derive(Clone, Debug)]
pub struct PushedDelta<T: Scalar> {
    /// Image curve samples g(t + i·y0) for t on the x₁ grid.
    pub points: Vec<Complex<T>>,
    /// Transported density σ̃ at the image samples.
    pub sigma_tilde: Vec<T>,
    /// |C'(t)| of the image parametrization (for arc-length quadrature).
    pub speed: Vec<T>,
    /// Quadrature of σ̃ along the image curve.
    pub arc_integral: T,
}

/// σ̃(x) = |(Dg⁻¹)(x)·t̂(x)| · σ(g⁻¹(x)) on the image of {x₂ = y0}.
///
/// Unit tangents are computed spectrally from the sampled image curve, so
/// the arc-length invariance ∫σ̃ ds = ∫σ dt is a genuine cross-check of the
/// map derivatives rather than an algebraic identity.
pub fn pushforward_delta<T: Scalar>(
    rmap: &RenormalizedMap<T>,
    y0: T,
    sigma: &[T],
) -> Result<PushedDelta<T>> {
    let grid = rmap.evaluator().grid();
    let n1 = grid.n1();
    if sigma.len() != n1 {
        return Err(Error::GridMismatch(format!(
            "sigma has {} samples, grid wants n1 = {}",
            sigma.len(),
            n1
        )));
    }

    // Sample the image curve.
    let mut points = Vec::with_capacity(n1);
    for i in 0..n1 {
        let z = Complex::new(grid.x1::<T>(i), y0);
        points.push(rmap.g_evaluate(z));
    }

    // C(t) − t·e₁ is 2π-periodic; differentiate it spectrally.
    let mut per: Vec<Complex<T>> = points
        .iter()
        .enumerate()
        .map(|(i, &c)| c - Complex::new(grid.x1::<T>(i), T::zero()))
        .collect();
    let mut planner = rustfft::FftPlanner::<T>::new();
    planner.plan_fft_forward(n1).process(&mut per);
    let scale = T::one() / cast::<T>(n1 as f64);
    let mut deriv = vec![Complex::new(T::zero(), T::zero()); n1];
    for (idx, c) in per.iter().enumerate() {
        let m = if idx <= n1 / 2 {
            idx as i64
        } else {
            idx as i64 - n1 as i64
        };
        deriv[idx] = c.scale(scale) * Complex::new(T::zero(), cast::<T>(m as f64));
    }
    planner.plan_fft_inverse(n1).process(&mut deriv);
    for d in deriv.iter_mut() {
        *d += Complex::new(T::one(), T::zero());
    }

    let mut sigma_tilde = Vec::with_capacity(n1);
    let mut speed = Vec::with_capacity(n1);
    let mut arc_integral = T::zero();
    let dt = T::two_pi() / cast::<T>(n1 as f64);
    for i in 0..n1 {
        let z = Complex::new(grid.x1::<T>(i), y0);
        let (dg, _) = rmap.g_jacobian(z)?;
        let sp = crate::scalar::cnorm(deriv[i]);
        let that = deriv[i].unscale(sp);
        let dg_inv = dg.try_inverse().ok_or(Error::InversionFailed {
            re: to_f64(z.re),
            im: to_f64(z.im),
            residual: f64::NAN,
        })?;
        let w = Complex::new(
            dg_inv[(0, 0)] * that.re + dg_inv[(0, 1)] * that.im,
            dg_inv[(1, 0)] * that.re + dg_inv[(1, 1)] * that.im,
        );
        let st = crate::scalar::cnorm(w) * sigma[i];
        sigma_tilde.push(st);
        speed.push(sp);
        arc_integral += st * sp * dt;
    }

    Ok(PushedDelta {
        points,
        sigma_tilde,
        speed,
        arc_integral,
    })
}

// ---------------------------------------------------------------------------
// Conformal-factor (sandwich) reduction
// ---------------------------------------------------------------------------

/// Torus case: Ṽ = ω⁻²V + ω⁻¹⟨∇, G∇⟩ω with spectral derivatives.
pub fn sandwich_reduce_torus<T: Scalar>(
    grid: TorusGrid,
    omega: &[T],
    metric: &Metric<T>,
    v: &[T],
) -> Result<Vec<T>> {
    if omega.len() != grid.len() || v.len() != grid.len() {
        return Err(Error::GridMismatch("sandwich fields must live on the grid".into()));
    }
    let om_min = omega
        .iter()
        .copied()
        .fold(T::max_value().unwrap_or_else(T::one), fmin);
    if om_min <= T::zero() {
        return Err(Error::NonPositiveWeight {
            min: to_f64(om_min),
        });
    }
    let fft = Fft2::new(grid);
    let om_hat = fft.forward_real(omega);

    // ∇ω spectrally.
    let mut d1 = vec![Complex::new(T::zero(), T::zero()); grid.len()];
    let mut d2 = d1.clone();
    for (i, j, s) in grid.iter() {
        let m = cast::<T>(grid.freq1(i) as f64);
        let n = cast::<T>(grid.freq2(j) as f64);
        d1[s] = om_hat[s] * Complex::new(T::zero(), m);
        d2[s] = om_hat[s] * Complex::new(T::zero(), n);
    }
    fft.inverse(&mut d1);
    fft.inverse(&mut d2);

    // w = G∇ω pointwise.
    let mut w1 = vec![T::zero(); grid.len()];
    let mut w2 = w1.clone();
    for s in 0..grid.len() {
        let (g11, g12, g22) = match metric {
            Metric::Constant(m) => (m[(0, 0)], m[(0, 1)], m[(1, 1)]),
            Metric::Field(f) => f.at(s),
        };
        w1[s] = g11 * d1[s].re + g12 * d2[s].re;
        w2[s] = g12 * d1[s].re + g22 * d2[s].re;
    }

    // div w spectrally.
    let w1_hat = fft.forward_real(&w1);
    let w2_hat = fft.forward_real(&w2);
    let mut div = vec![Complex::new(T::zero(), T::zero()); grid.len()];
    for (i, j, s) in grid.iter() {
        let m = cast::<T>(grid.freq1(i) as f64);
        let n = cast::<T>(grid.freq2(j) as f64);
        div[s] = w1_hat[s] * Complex::new(T::zero(), m) + w2_hat[s] * Complex::new(T::zero(), n);
    }
    fft.inverse(&mut div);

    Ok((0..grid.len())
        .map(|s| v[s] / (omega[s] * omega[s]) + div[s].re / omega[s])
        .collect())
}

/// Strip case: Ṽ on the strip plus the Robin densities induced on the two
/// edges. ∂₁ is spectral; ∂₂ uses second-order centered differences
/// (one-sided at the edges). With the outward normals n = ∓e₂,
///   σ̃ = −ω⁻¹⟨B∇ω, n⟩  →  +ω⁻¹(B∇ω)₂ at x₂ = 0, −ω⁻¹(B∇ω)₂ at x₂ = π.
pub fn sandwich_reduce_strip<T: Scalar>(
    grid: StripGrid,
    omega: &[T],
    b: Matrix2<T>,
    v: &[T],
) -> Result<(Vec<T>, Vec<T>, Vec<T>)> {
    if omega.len() != grid.len() || v.len() != grid.len() {
        return Err(Error::GridMismatch("sandwich fields must live on the strip grid".into()));
    }
    let om_min = omega
        .iter()
        .copied()
        .fold(T::max_value().unwrap_or_else(T::one), fmin);
    if om_min <= T::zero() {
        return Err(Error::NonPositiveWeight {
            min: to_f64(om_min),
        });
    }
    let (n1, nn2) = (grid.n1(), grid.nodes2());
    let h = grid.h2::<T>();

    // ∂₁ by FFT along each transverse node line.
    let mut planner = rustfft::FftPlanner::<T>::new();
    let fwd = planner.plan_fft_forward(n1);
    let inv = planner.plan_fft_inverse(n1);
    let dx1 = |field: &[T]| -> Vec<T> {
        let mut out = vec![T::zero(); field.len()];
        let mut col = vec![Complex::new(T::zero(), T::zero()); n1];
        for j in 0..nn2 {
            for i in 0..n1 {
                col[i] = Complex::new(field[i * nn2 + j], T::zero());
            }
            fwd.process(&mut col);
            let scale = T::one() / cast::<T>(n1 as f64);
            for (idx, c) in col.iter_mut().enumerate() {
                let m = if idx <= n1 / 2 {
                    idx as i64
                } else {
                    idx as i64 - n1 as i64
                };
                *c = c.scale(scale) * Complex::new(T::zero(), cast::<T>(m as f64));
            }
            inv.process(&mut col);
            for i in 0..n1 {
                out[i * nn2 + j] = col[i].re;
            }
        }
        out
    };

    // ∂₂ by centered differences, second-order one-sided at the edges.
    let dx2 = |field: &[T]| -> Vec<T> {
        let mut out = vec![T::zero(); field.len()];
        let half = cast::<T>(0.5);
        for i in 0..n1 {
            let row = &field[i * nn2..(i + 1) * nn2];
            let o = &mut out[i * nn2..(i + 1) * nn2];
            for j in 1..nn2 - 1 {
                o[j] = (row[j + 1] - row[j - 1]) * half / h;
            }
            o[0] = (-cast::<T>(3.0) * row[0] + cast::<T>(4.0) * row[1] - row[2]) * half / h;
            o[nn2 - 1] = (cast::<T>(3.0) * row[nn2 - 1] - cast::<T>(4.0) * row[nn2 - 2]
                + row[nn2 - 3])
                * half
                / h;
        }
        out
    };

    let d1 = dx1(omega);
    let d2 = dx2(omega);
    let (b11, b12, b22) = (b[(0, 0)], b[(0, 1)], b[(1, 1)]);
    let w1: Vec<T> = (0..grid.len()).map(|s| b11 * d1[s] + b12 * d2[s]).collect();
    let w2: Vec<T> = (0..grid.len()).map(|s| b12 * d1[s] + b22 * d2[s]).collect();
    let div: Vec<T> = {
        let a = dx1(&w1);
        let b2v = dx2(&w2);
        (0..grid.len()).map(|s| a[s] + b2v[s]).collect()
    };

    let vtilde: Vec<T> = (0..grid.len())
        .map(|s| v[s] / (omega[s] * omega[s]) + div[s] / omega[s])
        .collect();
    let mut sigma_bottom = Vec::with_capacity(n1);
    let mut sigma_top = Vec::with_capacity(n1);
    for i in 0..n1 {
        let s0 = i * nn2;
        let s1 = i * nn2 + (nn2 - 1);
        sigma_bottom.push(w2[s0] / omega[s0]);
        sigma_top.push(-w2[s1] / omega[s1]);
    }
    Ok((vtilde, sigma_bottom, sigma_top))
}
