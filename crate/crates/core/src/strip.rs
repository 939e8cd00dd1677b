//! Dirichlet/Neumann strip problems, their reflection to a doubled periodic
//! problem on the cylinder, parity decomposition, and the corner-exponent
//! formula for boundary singularities of the mapping.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::floquet::{solve_bands, Cutoff, FiberOperator};
use crate::grid::{StripGrid, TorusGrid};
use crate::pushforward::{CoefficientSet, DeltaLine, Metric};
use crate::scalar::{cast, cnorm, fmax, rabs, to_f64, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

/// Periodic operator on the strip S₁ = {0 < x₂ < π} with a constant
/// diagonal metric, Dirichlet or natural boundary conditions, optional
/// Robin edge densities and interior delta lines.
#[derive(Clone, Debug)]
pub struct StripProblem<T: Scalar> {
    grid: StripGrid,
    pub bc: BoundaryCondition,
    pub b: Matrix2<T>,
    pub a1: Vec<T>,
    pub a2: Vec<T>,
    pub v: Vec<T>,
    /// Robin density on the edge x₂ = 0, sampled over x₁.
    pub robin_bottom: Option<Vec<T>>,
    /// Robin density on the edge x₂ = π.
    pub robin_top: Option<Vec<T>>,
    pub delta_lines: Vec<DeltaLine<T>>,
    /// Optional weight μ of the underlying L²(μ) problem (defaults to 1).
    pub mu: Option<Vec<T>>,
}

impl<T: Scalar> StripProblem<T> {
    pub fn free(grid: StripGrid, bc: BoundaryCondition) -> Self {
        Self {
            grid,
            bc,
            b: Matrix2::identity(),
            a1: vec![T::zero(); grid.len()],
            a2: vec![T::zero(); grid.len()],
            v: vec![T::zero(); grid.len()],
            robin_bottom: None,
            robin_top: None,
            delta_lines: Vec::new(),
            mu: None,
        }
    }

    pub fn grid(&self) -> StripGrid {
        self.grid
    }

    pub fn with_metric(mut self, b1: T, b2: T) -> Result<Self> {
        if b1 <= T::zero() || b2 <= T::zero() {
            return Err(Error::Problem(
                "strip metric must be diagonal with positive entries".into(),
            ));
        }
        self.b = Matrix2::new(b1, T::zero(), T::zero(), b2);
        Ok(self)
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

    pub fn with_robin(mut self, bottom: impl FnMut(T) -> T, top: impl FnMut(T) -> T) -> Result<Self> {
        if self.bc == BoundaryCondition::Dirichlet {
            return Err(Error::Problem(
                "Robin densities have no effect under Dirichlet conditions".into(),
            ));
        }
        let mut fb = bottom;
        let mut ft = top;
        self.robin_bottom = Some((0..self.grid.n1()).map(|i| fb(self.grid.x1(i))).collect());
        self.robin_top = Some((0..self.grid.n1()).map(|i| ft(self.grid.x1(i))).collect());
        Ok(self)
    }

    pub fn with_weight(mut self, mu: impl FnMut(T, T) -> T) -> Result<Self> {
        let field = self.grid.sample(mu);
        if field.iter().any(|&x| x <= T::zero()) {
            return Err(Error::NonPositiveWeight { min: f64::NAN });
        }
        self.mu = Some(field);
        Ok(self)
    }

    pub fn with_delta_line(mut self, y0: T, sigma: impl FnMut(T) -> T) -> Result<Self> {
        if y0 <= T::zero() || y0 >= T::pi() {
            return Err(Error::Problem(
                "strip delta lines must sit strictly inside (0, π)".into(),
            ));
        }
        let mut f = sigma;
        let sigma: Vec<T> = (0..self.grid.n1()).map(|i| f(self.grid.x1(i))).collect();
        self.delta_lines.push(DeltaLine { y0, sigma });
        Ok(self)
    }
}

/// Coefficients of the doubled periodic problem on the cylinder
/// x₂ ∈ (−π, π], stored on the grid of [`StripGrid::doubled`] (x₂-layout
/// [0, 2π) with the mirror images in the upper half).
#[derive(Clone, Debug)]
pub struct DoubledProblem<T: Scalar> {
    grid: TorusGrid,
    pub b: Matrix2<T>,
    pub b1: Vec<T>,
    pub b2: Vec<T>,
    pub q_pot: Vec<T>,
    pub rho_lines: Vec<DeltaLine<T>>,
    pub mu: Option<Vec<T>>,
}

impl<T: Scalar> DoubledProblem<T> {
    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    /// Worst parity defect: b₁, Q must be even in x₂ and b₂ odd.
    pub fn parity_defect(&self) -> T {
        let g = self.grid;
        let mut worst = T::zero();
        for i in 0..g.n1() {
            for j in 0..g.n2() {
                let jm = (g.n2() - j) % g.n2();
                let (s, sm) = (g.idx(i, j), g.idx(i, jm));
                worst = fmax(worst, rabs(self.b1[s] - self.b1[sm]));
                worst = fmax(worst, rabs(self.q_pot[s] - self.q_pot[sm]));
                worst = fmax(worst, rabs(self.b2[s] + self.b2[sm]));
            }
        }
        worst
    }

    /// View as torus coefficient data for the plane-wave machinery.
    pub fn to_coefficients(&self) -> Result<CoefficientSet<T>> {
        let mu = self
            .mu
            .clone()
            .unwrap_or_else(|| vec![T::one(); self.grid.len()]);
        CoefficientSet::new(
            self.grid,
            Metric::Constant(self.b),
            self.b1.clone(),
            self.b2.clone(),
            self.q_pot.clone(),
            mu,
            self.rho_lines.clone(),
        )
    }
}

/// Even/odd reflection of the strip coefficients onto the cylinder.
///
/// V and a₁ extend evenly, a₂ oddly (forced to zero on the two fixed
/// lines). Interior delta lines acquire mirror copies; Robin edge
/// densities become two coincident copies on each edge line, matching the
/// √2-normalized extension unitaries.
pub fn reflect_coefficients<T: Scalar>(sp: &StripProblem<T>) -> Result<DoubledProblem<T>> {
    let sgrid = sp.grid();
    let grid = sgrid.doubled()?;
    let n1 = sgrid.n1();
    let n2 = sgrid.n2();
    let nn2 = sgrid.nodes2();
    let expected = n1 * nn2;
    for (name, f) in [("a1", &sp.a1), ("a2", &sp.a2), ("V", &sp.v)] {
        if f.len() != expected {
            return Err(Error::NotReflectable(format!(
                "{name} has {} samples, strip grid wants {}",
                f.len(),
                expected
            )));
        }
    }

    let len = grid.len();
    let mut b1 = vec![T::zero(); len];
    let mut b2 = vec![T::zero(); len];
    let mut q_pot = vec![T::zero(); len];
    let mut mu_ext = sp.mu.as_ref().map(|_| vec![T::zero(); len]);
    for i in 0..n1 {
        for j in 0..grid.n2() {
            // Cylinder node j ↔ strip node j for j ≤ n2, mirror 2n2 − j above.
            let (js, odd_sign) = if j <= n2 {
                (j, T::one())
            } else {
                (2 * n2 - j, -T::one())
            };
            let src = i * nn2 + js;
            let dst = grid.idx(i, j);
            b1[dst] = sp.a1[src];
            q_pot[dst] = sp.v[src];
            b2[dst] = if j == 0 || j == n2 {
                T::zero()
            } else {
                odd_sign * sp.a2[src]
            };
            if let (Some(ext), Some(msrc)) = (&mut mu_ext, &sp.mu) {
                ext[dst] = msrc[src];
            }
        }
    }

    let mut rho_lines = Vec::new();
    for line in &sp.delta_lines {
        rho_lines.push(line.clone());
        rho_lines.push(DeltaLine {
            y0: T::two_pi() - line.y0,
            sigma: line.sigma.clone(),
        });
    }
    // Two coincident copies of each boundary piece.
    if let Some(sb) = &sp.robin_bottom {
        for _ in 0..2 {
            rho_lines.push(DeltaLine {
                y0: T::zero(),
                sigma: sb.clone(),
            });
        }
    }
    if let Some(st) = &sp.robin_top {
        for _ in 0..2 {
            rho_lines.push(DeltaLine {
                y0: T::pi(),
                sigma: st.clone(),
            });
        }
    }

    Ok(DoubledProblem {
        grid,
        b: sp.b,
        b1,
        b2,
        q_pot,
        rho_lines,
        mu: mu_ext,
    })
}

/// Even/odd projections ½(u(x₁, x₂) ± u(x₁, −x₂)) of a cylinder field.
pub fn parity_project<T: Scalar>(
    grid: TorusGrid,
    u: &[Complex<T>],
) -> (Vec<Complex<T>>, Vec<Complex<T>>) {
    assert_eq!(u.len(), grid.len());
    let half = cast::<T>(0.5);
    let mut even = vec![Complex::new(T::zero(), T::zero()); u.len()];
    let mut odd = even.clone();
    for i in 0..grid.n1() {
        for j in 0..grid.n2() {
            let jm = (grid.n2() - j) % grid.n2();
            let (s, sm) = (grid.idx(i, j), grid.idx(i, jm));
            even[s] = (u[s] + u[sm]).scale(half);
            odd[s] = (u[s] - u[sm]).scale(half);
        }
    }
    (even, odd)
}

// ---------------------------------------------------------------------------
// Trigonometric-transverse fiber assembly
// ---------------------------------------------------------------------------

/// Which transverse basis a trig fiber uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransverseBasis {
    /// sin(n x₂), n = 1..m2 — Dirichlet on the strip, odd sector doubled.
    Sine,
    /// cos(n x₂), n = 0..m2 — Neumann on the strip, even sector doubled.
    Cosine,
}

/// Transverse quadrature + field data shared by the strip and the
/// parity-resolved doubled assemblies.
struct TrigDomain<T: Scalar> {
    n1: usize,
    /// Transverse nodes and quadrature weights.
    x2: Vec<T>,
    w2: Vec<T>,
    /// ∫ sin²(n x₂) dx₂ over the domain (n ≥ 1).
    sin_norm: T,
    /// ∫ cos²(n x₂) dx₂ for n ≥ 1 and for n = 0.
    cos_norm: T,
    cos0_norm: T,
    b: Matrix2<T>,
    a1: Vec<T>,
    a2: Vec<T>,
    v: Vec<T>,
    /// (y0, density over x₁) — includes Robin edges as y0 ∈ {0, π}.
    deltas: Vec<(T, Vec<T>)>,
    mu: Option<Vec<T>>,
}

impl<T: Scalar> TrigDomain<T> {
    fn from_strip(sp: &StripProblem<T>) -> Self {
        let g = sp.grid();
        let nn2 = g.nodes2();
        let x2: Vec<T> = (0..nn2).map(|j| g.x2::<T>(j)).collect();
        let w2: Vec<T> = (0..nn2).map(|j| g.w2::<T>(j)).collect();
        let mut deltas: Vec<(T, Vec<T>)> = sp
            .delta_lines
            .iter()
            .map(|l| (l.y0, l.sigma.clone()))
            .collect();
        if let Some(sb) = &sp.robin_bottom {
            deltas.push((T::zero(), sb.clone()));
        }
        if let Some(st) = &sp.robin_top {
            deltas.push((T::pi(), st.clone()));
        }
        let half = cast::<T>(0.5);
        Self {
            n1: g.n1(),
            x2,
            w2,
            sin_norm: T::pi() * half,
            cos_norm: T::pi() * half,
            cos0_norm: T::pi(),
            b: sp.b,
            a1: sp.a1.clone(),
            a2: sp.a2.clone(),
            v: sp.v.clone(),
            deltas,
            mu: sp.mu.clone(),
        }
    }

    fn from_doubled(dp: &DoubledProblem<T>) -> Self {
        let g = dp.grid();
        let nn2 = g.n2();
        let x2: Vec<T> = (0..nn2).map(|j| g.x2::<T>(j)).collect();
        let h = T::two_pi() / cast::<T>(nn2 as f64);
        let w2 = vec![h; nn2];
        let deltas = dp
            .rho_lines
            .iter()
            .map(|l| (l.y0, l.sigma.clone()))
            .collect();
        Self {
            n1: g.n1(),
            x2,
            w2,
            sin_norm: T::pi(),
            cos_norm: T::pi(),
            cos0_norm: T::two_pi(),
            b: dp.b,
            a1: dp.b1.clone(),
            a2: dp.b2.clone(),
            v: dp.q_pot.clone(),
            deltas,
            mu: dp.mu.clone(),
        }
    }
}

/// Mixed transforms C[F](Δm, j) = ∬ F e^{−iΔm x₁} cos(j x₂) and the sine
/// analogue, for j = 0..=2·m2 and |Δm| ≤ 2·m1.
struct TrigTransforms<T: Scalar> {
    m1: usize,
    m2: usize,
    cos_t: Vec<Complex<T>>,
    sin_t: Vec<Complex<T>>,
}

impl<T: Scalar> TrigTransforms<T> {
    fn compute(dom: &TrigDomain<T>, field: &[T], cut: Cutoff) -> Self {
        let (m1, m2, n1) = (cut.m1, cut.m2, dom.n1);
        let nn2 = dom.x2.len();
        let width = 2 * m2 + 1;
        let mut cos_t = vec![Complex::new(T::zero(), T::zero()); (4 * m1 + 1) * width];
        let mut sin_t = cos_t.clone();
        let mut planner = rustfft::FftPlanner::<T>::new();
        let fft = planner.plan_fft_forward(n1);
        let scale = T::two_pi() / cast::<T>(n1 as f64);
        let mut buf = vec![Complex::new(T::zero(), T::zero()); n1];
        for j in 0..=2 * m2 {
            for use_cos in [true, false] {
                if !use_cos && j == 0 {
                    continue;
                }
                for (i, slot) in buf.iter_mut().enumerate() {
                    let mut acc = T::zero();
                    for l in 0..nn2 {
                        let arg = cast::<T>(j as f64) * dom.x2[l];
                        let t = if use_cos { arg.cos() } else { arg.sin() };
                        acc += field[i * nn2 + l] * t * dom.w2[l];
                    }
                    *slot = Complex::new(acc, T::zero());
                }
                fft.process(&mut buf);
                for dm in -(2 * m1 as i64)..=(2 * m1 as i64) {
                    let src = crate::fft::storage_index(dm, n1);
                    let dst = (dm + 2 * m1 as i64) as usize * width + j;
                    let val = buf[src].scale(scale);
                    if use_cos {
                        cos_t[dst] = val;
                    } else {
                        sin_t[dst] = val;
                    }
                }
            }
        }
        Self {
            m1,
            m2,
            cos_t,
            sin_t,
        }
    }

    #[inline]
    fn c(&self, dm: i64, j: i64) -> Complex<T> {
        debug_assert!(j.unsigned_abs() as usize <= 2 * self.m2);
        let idx = (dm + 2 * self.m1 as i64) as usize * (2 * self.m2 + 1) + j.unsigned_abs() as usize;
        self.cos_t[idx]
    }

    #[inline]
    fn s(&self, dm: i64, j: i64) -> Complex<T> {
        if j == 0 {
            return Complex::new(T::zero(), T::zero());
        }
        let idx = (dm + 2 * self.m1 as i64) as usize * (2 * self.m2 + 1) + j.unsigned_abs() as usize;
        let v = self.sin_t[idx];
        if j < 0 {
            -v
        } else {
            v
        }
    }

    /// ∬ F e^{−iΔm x₁} cos(n x₂) cos(n' x₂).
    #[inline]
    fn cc(&self, dm: i64, n: i64, np: i64) -> Complex<T> {
        (self.c(dm, n - np) + self.c(dm, n + np)).scale(cast::<T>(0.5))
    }

    /// ∬ F e^{−iΔm x₁} sin(n x₂) sin(n' x₂).
    #[inline]
    fn ss(&self, dm: i64, n: i64, np: i64) -> Complex<T> {
        (self.c(dm, n - np) - self.c(dm, n + np)).scale(cast::<T>(0.5))
    }

    /// ∬ F e^{−iΔm x₁} cos(n x₂) sin(n' x₂).
    #[inline]
    fn cs(&self, dm: i64, n: i64, np: i64) -> Complex<T> {
        (self.s(dm, np + n) + self.s(dm, np - n)).scale(cast::<T>(0.5))
    }

    /// ∬ F e^{−iΔm x₁} sin(n x₂) cos(n' x₂).
    #[inline]
    fn sc(&self, dm: i64, n: i64, np: i64) -> Complex<T> {
        (self.s(dm, n + np) + self.s(dm, n - np)).scale(cast::<T>(0.5))
    }
}

struct TrigBasis {
    m1: usize,
    /// Transverse indices (n values) in order.
    ns: Vec<i64>,
}

impl TrigBasis {
    fn new(basis: TransverseBasis, cut: Cutoff) -> Self {
        let ns: Vec<i64> = match basis {
            TransverseBasis::Sine => (1..=cut.m2 as i64).collect(),
            TransverseBasis::Cosine => (0..=cut.m2 as i64).collect(),
        };
        Self { m1: cut.m1, ns }
    }

    fn dim(&self) -> usize {
        (2 * self.m1 + 1) * self.ns.len()
    }

    fn decode(&self, b: usize) -> (i64, i64) {
        let w = self.ns.len();
        ((b / w) as i64 - self.m1 as i64, self.ns[b % w])
    }
}

/// k-independent matrices of a trig-basis fiber family, mirroring
/// [`crate::floquet::FiberFamily`].
pub struct TrigFiberFamily<T: Scalar> {
    basis: TransverseBasis,
    cutoff: Cutoff,
    dim: usize,
    a0: DMatrix<Complex<T>>,
    a1: DMatrix<Complex<T>>,
    a2: DMatrix<Complex<T>>,
    b_mat: Option<DMatrix<Complex<T>>>,
}

impl<T: Scalar> TrigFiberFamily<T> {
    fn assemble(dom: &TrigDomain<T>, basis_kind: TransverseBasis, cutoff: Cutoff) -> Result<Self> {
        if dom.n1 < 2 * (2 * cutoff.m1 + 1) {
            return Err(Error::AliasingCutoff {
                cutoff: cutoff.m1,
                needed: 2 * (2 * cutoff.m1 + 1),
                actual: dom.n1,
            });
        }
        // Transverse resolution: quadrature must hold cos((2m2+…)x₂).
        let nn2 = dom.x2.len();
        if nn2 < 2 * cutoff.m2 + 2 {
            return Err(Error::AliasingCutoff {
                cutoff: cutoff.m2,
                needed: 2 * cutoff.m2 + 2,
                actual: nn2,
            });
        }

        let b11 = dom.b[(0, 0)];
        let b22 = dom.b[(1, 1)];
        if dom.b[(0, 1)] != T::zero() || dom.b[(1, 0)] != T::zero() {
            return Err(Error::Problem(
                "trig fiber assembly needs a diagonal metric".into(),
            ));
        }

        let a_zero = dom.a1.iter().all(|&x| x == T::zero())
            && dom.a2.iter().all(|&x| x == T::zero());
        let v_zero = dom.v.iter().all(|&x| x == T::zero());

        let t_a1 = (!a_zero).then(|| TrigTransforms::compute(dom, &dom.a1, cutoff));
        let t_a2 = (!a_zero).then(|| TrigTransforms::compute(dom, &dom.a2, cutoff));
        let sq = |f: &[T]| -> Vec<T> { f.iter().map(|&x| x * x).collect() };
        let t_a1sq = (!a_zero).then(|| TrigTransforms::compute(dom, &sq(&dom.a1), cutoff));
        let t_a2sq = (!a_zero).then(|| TrigTransforms::compute(dom, &sq(&dom.a2), cutoff));
        let t_v = (!v_zero).then(|| TrigTransforms::compute(dom, &dom.v, cutoff));
        let t_mu = dom
            .mu
            .as_ref()
            .map(|mu| TrigTransforms::compute(dom, mu, cutoff));

        // Per-delta 1D transforms σ̂(Δm).
        let mut planner = rustfft::FftPlanner::<T>::new();
        let fft1 = planner.plan_fft_forward(dom.n1);
        let deltas: Vec<(T, Vec<Complex<T>>)> = dom
            .deltas
            .iter()
            .map(|(y0, sigma)| {
                let mut buf: Vec<Complex<T>> = sigma
                    .iter()
                    .map(|&x| Complex::new(x, T::zero()))
                    .collect();
                fft1.process(&mut buf);
                let scale = T::two_pi() / cast::<T>(dom.n1 as f64);
                for c in buf.iter_mut() {
                    *c = c.scale(scale);
                }
                (*y0, buf)
            })
            .collect();

        let basis = TrigBasis::new(basis_kind, cutoff);
        let dim = basis.dim();
        let zero = Complex::new(T::zero(), T::zero());
        let mut a0m = DMatrix::from_element(dim, dim, zero);
        let mut a1m = DMatrix::from_element(dim, dim, zero);
        let mut a2m = DMatrix::from_element(dim, dim, zero);
        let mut bm = t_mu
            .as_ref()
            .map(|_| DMatrix::from_element(dim, dim, zero));

        let norm = |n: i64| -> T {
            let tr = match basis_kind {
                TransverseBasis::Sine => dom.sin_norm,
                TransverseBasis::Cosine => {
                    if n == 0 {
                        dom.cos0_norm
                    } else {
                        dom.cos_norm
                    }
                }
            };
            T::one() / (T::two_pi() * tr).sqrt()
        };

        for row in 0..dim {
            let (mr, nr) = basis.decode(row);
            let nnr = norm(nr);
            for col in 0..dim {
                let (mc, nc) = basis.decode(col);
                let nnc = norm(nc);
                let dm = mr - mc;
                let nn = nnr * nnc;
                let mr_t = cast::<T>(mr as f64);
                let mc_t = cast::<T>(mc as f64);
                let nr_t = cast::<T>(nr as f64);
                let nc_t = cast::<T>(nc as f64);
                let diag = row == col;

                // k² and the k-linear/k⁰ diagonal kinetic-11 parts.
                if diag {
                    a2m[(row, col)] = Complex::new(b11, T::zero());
                    a1m[(row, col)] = Complex::new(b11 * (mr_t + mc_t), T::zero());
                    a0m[(row, col)] = Complex::new(b11 * mr_t * mc_t, T::zero());
                }
                if let (Some(ta1), Some(ta1sq)) = (&t_a1, &t_a1sq) {
                    let chi = |t: &TrigTransforms<T>| match basis_kind {
                        TransverseBasis::Sine => t.ss(dm, nr, nc),
                        TransverseBasis::Cosine => t.cc(dm, nr, nc),
                    };
                    let m_a1 = chi(ta1).scale(nn);
                    let m_a1sq = chi(ta1sq).scale(nn);
                    a1m[(row, col)] -= m_a1.scale(cast::<T>(2.0) * b11);
                    a0m[(row, col)] +=
                        m_a1sq.scale(b11) - m_a1.scale(b11 * (mr_t + mc_t));
                }

                // Kinetic-22.
                let mut k22 = zero;
                match basis_kind {
                    TransverseBasis::Sine => {
                        if diag {
                            k22 += Complex::new(nr_t * nc_t, T::zero());
                        }
                        if let (Some(ta2), Some(ta2sq)) = (&t_a2, &t_a2sq) {
                            let i_unit = Complex::new(T::zero(), T::one());
                            k22 += i_unit * ta2.cs(dm, nr, nc).scale(nr_t * nn);
                            k22 -= i_unit * ta2.sc(dm, nr, nc).scale(nc_t * nn);
                            k22 += ta2sq.ss(dm, nr, nc).scale(nn);
                        }
                    }
                    TransverseBasis::Cosine => {
                        if diag {
                            k22 += Complex::new(nr_t * nc_t, T::zero());
                        }
                        if let (Some(ta2), Some(ta2sq)) = (&t_a2, &t_a2sq) {
                            let i_unit = Complex::new(T::zero(), T::one());
                            k22 -= i_unit * ta2.sc(dm, nr, nc).scale(nr_t * nn);
                            k22 += i_unit * ta2.cs(dm, nr, nc).scale(nc_t * nn);
                            k22 += ta2sq.cc(dm, nr, nc).scale(nn);
                        }
                    }
                }
                a0m[(row, col)] += k22.scale(b22);

                // Potential.
                if let Some(tv) = &t_v {
                    let m_v = match basis_kind {
                        TransverseBasis::Sine => tv.ss(dm, nr, nc),
                        TransverseBasis::Cosine => tv.cc(dm, nr, nc),
                    };
                    a0m[(row, col)] += m_v.scale(nn);
                }

                if let (Some(tmu), Some(bmat)) = (&t_mu, &mut bm) {
                    let m_mu = match basis_kind {
                        TransverseBasis::Sine => tmu.ss(dm, nr, nc),
                        TransverseBasis::Cosine => tmu.cc(dm, nr, nc),
                    };
                    bmat[(row, col)] = m_mu.scale(nn);
                }

                // Delta lines and Robin edges via trace values.
                for (y0, sigma_hat) in &deltas {
                    let tr = match basis_kind {
                        TransverseBasis::Sine => {
                            (nr_t * *y0).sin() * (nc_t * *y0).sin()
                        }
                        TransverseBasis::Cosine => {
                            (nr_t * *y0).cos() * (nc_t * *y0).cos()
                        }
                    };
                    if tr != T::zero() {
                        let sv = sigma_hat[crate::fft::storage_index(dm, dom.n1)];
                        a0m[(row, col)] += sv.scale(nn * tr);
                    }
                }
            }
        }

        Ok(Self {
            basis: basis_kind,
            cutoff,
            dim,
            a0: a0m,
            a1: a1m,
            a2: a2m,
            b_mat: bm,
        })
    }

    pub fn basis(&self) -> TransverseBasis {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn fiber(&self, k: Complex<T>) -> FiberOperator<T> {
        let k2 = k * k;
        let mut h = self.a0.clone();
        h.zip_zip_apply(&self.a1, &self.a2, |h0, h1, h2| *h0 += k * h1 + k2 * h2);
        let dim = self.dim;
        let (bmat, b_is_identity) = match &self.b_mat {
            Some(b) => (b.clone(), false),
            None => (DMatrix::identity(dim, dim), true),
        };
        FiberOperator {
            k,
            cutoff: self.cutoff,
            hmat: h,
            bmat,
            b_is_identity,
        }
    }
}

/// Assembles the strip fiber at quasimomentum k in the boundary-adapted
/// basis e^{i(m+k)x₁}·sin(n x₂) (Dirichlet) or cos(n x₂) (Neumann).
pub fn assemble_strip_fiber<T: Scalar>(
    sp: &StripProblem<T>,
    k: Complex<T>,
    cutoff: Cutoff,
) -> Result<FiberOperator<T>> {
    Ok(strip_fiber_family(sp, cutoff)?.fiber(k))
}

pub fn strip_fiber_family<T: Scalar>(
    sp: &StripProblem<T>,
    cutoff: Cutoff,
) -> Result<TrigFiberFamily<T>> {
    let dom = TrigDomain::from_strip(sp);
    let basis = match sp.bc {
        BoundaryCondition::Dirichlet => TransverseBasis::Sine,
        BoundaryCondition::Neumann => TransverseBasis::Cosine,
    };
    TrigFiberFamily::assemble(&dom, basis, cutoff)
}

/// Parity-resolved fiber family of the doubled problem: pure sine or pure
/// cosine transverse subspace of the cylinder.
pub fn doubled_parity_family<T: Scalar>(
    dp: &DoubledProblem<T>,
    basis: TransverseBasis,
    cutoff: Cutoff,
) -> Result<TrigFiberFamily<T>> {
    let dom = TrigDomain::from_doubled(dp);
    TrigFiberFamily::assemble(&dom, basis, cutoff)
}

// ---------------------------------------------------------------------------
// Reflection equivalence
// ---------------------------------------------------------------------------

/// Entrywise comparison results of the reflection reduction at one
/// discretization, maximized over the k-grid.
#[derive(Clone, Debug)]
pub struct ReflectionReport<T: Scalar> {
    /// Dirichlet bands vs odd-sector doubled bands.
    pub dirichlet_vs_odd: T,
    /// Neumann bands vs even-sector doubled bands.
    pub neumann_vs_even: T,
    /// Sorted union of D and N bands vs the full doubled spectrum.
    pub union_vs_full: T,
    pub n_compared: usize,
}

impl<T: Scalar> ReflectionReport<T> {
    pub fn worst(&self) -> T {
        fmax(
            self.dirichlet_vs_odd,
            fmax(self.neumann_vs_even, self.union_vs_full),
        )
    }
}

/// Computes Dirichlet, Neumann, parity-resolved and full doubled spectra on
/// a k-grid and checks the identities of the reflection reduction.
///
/// `n_bands` eigenvalues of the strip problems are compared; the union
/// check uses 2·n_bands + 1 entries of the doubled spectrum.
pub fn verify_reflection_equivalence<T: Scalar>(
    sp: &StripProblem<T>,
    k_grid: &[T],
    n_bands: usize,
    cutoff: Cutoff,
) -> Result<ReflectionReport<T>> {
    // Robin edge densities live on the fixed lines of the reflection: the
    // sine sector's traces vanish there, so the Dirichlet side is the
    // Robin-free problem and the union bookkeeping is unaffected.
    let mut sp_d = sp.clone();
    sp_d.bc = BoundaryCondition::Dirichlet;
    let mut sp_n = sp.clone();
    sp_n.bc = BoundaryCondition::Neumann;

    let fam_d = strip_fiber_family(&sp_d, cutoff)?;
    let fam_n = strip_fiber_family(&sp_n, cutoff)?;
    let doubled = reflect_coefficients(sp)?;
    let fam_odd = doubled_parity_family(&doubled, TransverseBasis::Sine, cutoff)?;
    let fam_even = doubled_parity_family(&doubled, TransverseBasis::Cosine, cutoff)?;
    let coeffs = doubled.to_coefficients()?;
    let fam_full = crate::floquet::FiberFamily::assemble(&coeffs, cutoff)?;

    let per_k: Result<Vec<(T, T, T)>> = k_grid
        .par_iter()
        .map(|&kk| {
            let k = Complex::new(kk, T::zero());
            let ev_d = fam_d.fiber(k).eigenvalues()?;
            let ev_n = fam_n.fiber(k).eigenvalues()?;
            let ev_odd = fam_odd.fiber(k).eigenvalues()?;
            let ev_even = fam_even.fiber(k).eigenvalues()?;
            let ev_full = fam_full.fiber(k).eigenvalues()?;

            let mut w_do = T::zero();
            let mut w_ne = T::zero();
            for j in 0..n_bands.min(ev_d.len().min(ev_odd.len())) {
                w_do = fmax(w_do, rabs(ev_d[j] - ev_odd[j]));
            }
            for j in 0..n_bands.min(ev_n.len().min(ev_even.len())) {
                w_ne = fmax(w_ne, rabs(ev_n[j] - ev_even[j]));
            }

            let mut union: Vec<T> = ev_d.iter().chain(ev_n.iter()).copied().collect();
            union.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
            let take = (2 * n_bands + 1).min(union.len()).min(ev_full.len());
            let mut w_uf = T::zero();
            for j in 0..take {
                w_uf = fmax(w_uf, rabs(union[j] - ev_full[j]));
            }
            Ok((w_do, w_ne, w_uf))
        })
        .collect();

    let mut report = ReflectionReport {
        dirichlet_vs_odd: T::zero(),
        neumann_vs_even: T::zero(),
        union_vs_full: T::zero(),
        n_compared: n_bands,
    };
    for (a, b, c) in per_k? {
        report.dirichlet_vs_odd = fmax(report.dirichlet_vs_odd, a);
        report.neumann_vs_even = fmax(report.neumann_vs_even, b);
        report.union_vs_full = fmax(report.union_vs_full, c);
    }
    Ok(report)
}

/// Strip band structures through the doubled problem, as the pipeline runs
/// them: the requested boundary condition picks the parity sector.
pub fn solve_strip_bands<T: Scalar>(
    sp: &StripProblem<T>,
    k_grid: &[T],
    n_bands: usize,
    cutoff: Cutoff,
) -> Result<crate::floquet::BandStructure<T>> {
    let fam = strip_fiber_family(sp, cutoff)?;
    if n_bands > fam.dim() {
        return Err(Error::Eigensolver(format!(
            "requested {} bands from a {}-dimensional strip basis",
            n_bands,
            fam.dim()
        )));
    }
    let bands: Result<Vec<Vec<T>>> = k_grid
        .par_iter()
        .map(|&kk| {
            let ev = fam.fiber(Complex::new(kk, T::zero())).eigenvalues()?;
            Ok(ev[..n_bands].to_vec())
        })
        .collect();
    Ok(crate::floquet::BandStructure {
        k_grid: k_grid.to_vec(),
        bands: bands?,
    })
}

/// Full doubled-cylinder bands of a strip problem (both parities mixed).
pub fn solve_doubled_bands<T: Scalar>(
    sp: &StripProblem<T>,
    k_grid: &[T],
    n_bands: usize,
    cutoff: Cutoff,
) -> Result<crate::floquet::BandStructure<T>> {
    let doubled = reflect_coefficients(sp)?;
    solve_bands(&doubled.to_coefficients()?, k_grid, n_bands, cutoff)
}

// ---------------------------------------------------------------------------
// Corner exponent
// ---------------------------------------------------------------------------

/// Local Hölder exponent of the mapping at a boundary corner:
/// ν = (1/π)·arg{−(γ'₋ + q₀·conj γ'₋)/(γ'₊ + q₀·conj γ'₊)} with the arg
/// branch in (0, 2π], so ν ∈ (0, 2]. The one-sided tangents follow the
/// positive (interior-on-the-left) boundary parametrization.
pub fn corner_exponent<T: Scalar>(
    gamma_minus: Complex<T>,
    gamma_plus: Complex<T>,
    q0: Complex<T>,
) -> Result<T> {
    if cnorm(q0) >= T::one() {
        return Err(Error::Problem(format!(
            "corner exponent needs |q0| < 1, got {}",
            to_f64(cnorm(q0))
        )));
    }
    if cnorm(gamma_minus) == T::zero() || cnorm(gamma_plus) == T::zero() {
        return Err(Error::Problem("one-sided tangents must be nonzero".into()));
    }
    let num = gamma_minus + q0 * gamma_minus.conj();
    let den = gamma_plus + q0 * gamma_plus.conj();
    if cnorm(den) == T::zero() {
        return Err(Error::Problem(
            "degenerate denominator in the corner formula".into(),
        ));
    }
    let w = -(num / den);
    let mut arg = w.im.atan2(w.re);
    if arg <= T::zero() {
        arg += T::two_pi();
    }
    Ok(arg / T::pi())
}
