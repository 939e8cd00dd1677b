//! Floquet fiber operators on the torus in a plane-wave basis, band
//! structures, delta-line couplings and the complex-quasimomentum
//! (Thomas-type) invertibility diagnostic.
//!
//! Convention: Bloch waves are e^{ikx₁}·(2π-periodic), realized as the
//! fiber shift D₁ → D₁ + k on the basis e^{i(m x₁ + n x₂)}. k has period 1.

use nalgebra::DMatrix;
use num_complex::Complex;
use rayon::prelude::*;

use crate::eig::{generalized_eigenvalues, hermitian_defect, hermitian_eigenvalues, smallest_singular_value};
use crate::error::{Error, Result};
use crate::fft::{storage_index, Fft2};
use crate::grid::TorusGrid;
use crate::pushforward::{CoefficientSet, Metric};

pub use crate::oracles::{circle_delta_oracle, circle_delta_secular};
use crate::scalar::{cast, to_f64, Scalar};

/// Relative Hermiticity tolerance for assembled fibers at real k.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Plane-wave cutoff: basis e^{i(m x₁ + n x₂)} with |m| ≤ m1, |n| ≤ m2.
///
/// A rectangular cutoff keeps the Thomas diagnostic affordable: at large
/// Im k the relevant modes sit near |n| ≈ Im k with small |m|.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cutoff {
    pub m1: usize,
    pub m2: usize,
}

impl Cutoff {
    pub fn square(m: usize) -> Self {
        Self { m1: m, m2: m }
    }

    pub fn dim(&self) -> usize {
        (2 * self.m1 + 1) * (2 * self.m2 + 1)
    }

    #[inline]
    fn decode(&self, b: usize) -> (i64, i64) {
        let w = 2 * self.m2 + 1;
        (
            (b / w) as i64 - self.m1 as i64,
            (b % w) as i64 - self.m2 as i64,
        )
    }
}

/// Fourier table of one coefficient field, indexed by mode differences
/// Δm ∈ [−2m1, 2m1], Δn ∈ [−2m2, 2m2].
struct CoefTable<T: Scalar> {
    m1: usize,
    m2: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> CoefTable<T> {
    fn zeros(cut: Cutoff) -> Self {
        Self {
            m1: cut.m1,
            m2: cut.m2,
            data: vec![Complex::new(T::zero(), T::zero()); (4 * cut.m1 + 1) * (4 * cut.m2 + 1)],
        }
    }

    fn constant(cut: Cutoff, value: T) -> Self {
        let mut t = Self::zeros(cut);
        let center = (2 * t.m1) * (4 * t.m2 + 1) + 2 * t.m2;
        t.data[center] = Complex::new(value, T::zero());
        t
    }

    fn from_field(cut: Cutoff, grid: TorusGrid, hat: &[Complex<T>]) -> Self {
        let mut t = Self::zeros(cut);
        for dm in -(2 * cut.m1 as i64)..=(2 * cut.m1 as i64) {
            for dn in -(2 * cut.m2 as i64)..=(2 * cut.m2 as i64) {
                let si = storage_index(dm, grid.n1()) * grid.n2() + storage_index(dn, grid.n2());
                let ti = (dm + 2 * cut.m1 as i64) as usize * (4 * cut.m2 + 1)
                    + (dn + 2 * cut.m2 as i64) as usize;
                t.data[ti] = hat[si];
            }
        }
        t
    }

    #[inline]
    fn get(&self, dm: i64, dn: i64) -> Complex<T> {
        let ti =
            (dm + 2 * self.m1 as i64) as usize * (4 * self.m2 + 1) + (dn + 2 * self.m2 as i64) as usize;
        self.data[ti]
    }
}

/// k-independent parts of the fiber family: H(k) = A₀ + k·A₁ + k²·A₂ with
/// weight Gram matrix B. All four are Hermitian for real coefficients.
pub struct FiberFamily<T: Scalar> {
    cutoff: Cutoff,
    a0: DMatrix<Complex<T>>,
    a1: DMatrix<Complex<T>>,
    a2: DMatrix<Complex<T>>,
    b: DMatrix<Complex<T>>,
    b_is_identity: bool,
}

/// One assembled fiber H(k) with its weight matrix.
pub struct FiberOperator<T: Scalar> {
    pub k: Complex<T>,
    pub cutoff: Cutoff,
    pub hmat: DMatrix<Complex<T>>,
    pub bmat: DMatrix<Complex<T>>,
    pub b_is_identity: bool,
}

impl<T: Scalar> FiberFamily<T> {
    /// Assembles the k-independent matrices from coefficient fields.
    /// The grid must resolve all mode differences: n ≥ 2(2M+1).
    pub fn assemble(coeffs: &CoefficientSet<T>, cutoff: Cutoff) -> Result<Self> {
        let grid = coeffs.grid();
        for (m, n, name) in [
            (cutoff.m1, grid.n1(), "n1"),
            (cutoff.m2, grid.n2(), "n2"),
        ] {
            if n < 2 * (2 * m + 1) {
                return Err(Error::AliasingCutoff {
                    cutoff: m,
                    needed: 2 * (2 * m + 1),
                    actual: n,
                });
            }
            let _ = name;
        }

        let fft = Fft2::new(grid);
        let hat = |field: &[T]| -> Vec<Complex<T>> { fft.forward_real(field) };

        // Metric tables and the fields G·a, ⟨Ga, a⟩.
        let (t_g11, t_g12, t_g22, ga1, ga2): (_, _, _, Vec<T>, Vec<T>) = match &coeffs.metric {
            Metric::Constant(a) => {
                let ga1 = (0..grid.len())
                    .map(|s| a[(0, 0)] * coeffs.a1[s] + a[(0, 1)] * coeffs.a2[s])
                    .collect();
                let ga2 = (0..grid.len())
                    .map(|s| a[(1, 0)] * coeffs.a1[s] + a[(1, 1)] * coeffs.a2[s])
                    .collect();
                (
                    CoefTable::constant(cutoff, a[(0, 0)]),
                    CoefTable::constant(cutoff, a[(0, 1)]),
                    CoefTable::constant(cutoff, a[(1, 1)]),
                    ga1,
                    ga2,
                )
            }
            Metric::Field(g) => {
                let ga1 = (0..grid.len())
                    .map(|s| g.g11()[s] * coeffs.a1[s] + g.g12()[s] * coeffs.a2[s])
                    .collect();
                let ga2 = (0..grid.len())
                    .map(|s| g.g12()[s] * coeffs.a1[s] + g.g22()[s] * coeffs.a2[s])
                    .collect();
                (
                    CoefTable::from_field(cutoff, grid, &hat(g.g11())),
                    CoefTable::from_field(cutoff, grid, &hat(g.g12())),
                    CoefTable::from_field(cutoff, grid, &hat(g.g22())),
                    ga1,
                    ga2,
                )
            }
        };
        let w0: Vec<T> = (0..grid.len())
            .map(|s| ga1[s] * coeffs.a1[s] + ga2[s] * coeffs.a2[s])
            .collect();
        let a_is_zero = coeffs.a1.iter().all(|&x| x == T::zero())
            && coeffs.a2.iter().all(|&x| x == T::zero());
        let t_p1 = if a_is_zero {
            CoefTable::zeros(cutoff)
        } else {
            CoefTable::from_field(cutoff, grid, &hat(&ga1))
        };
        let t_p2 = if a_is_zero {
            CoefTable::zeros(cutoff)
        } else {
            CoefTable::from_field(cutoff, grid, &hat(&ga2))
        };
        let t_w0 = if a_is_zero {
            CoefTable::zeros(cutoff)
        } else {
            CoefTable::from_field(cutoff, grid, &hat(&w0))
        };
        let v_is_zero = coeffs.v.iter().all(|&x| x == T::zero());
        let t_v = if v_is_zero {
            CoefTable::zeros(cutoff)
        } else {
            CoefTable::from_field(cutoff, grid, &hat(&coeffs.v))
        };

        let mu_is_one = coeffs.mu.iter().all(|&x| x == T::one());
        let t_mu = if mu_is_one {
            CoefTable::constant(cutoff, T::one())
        } else {
            CoefTable::from_field(cutoff, grid, &hat(&coeffs.mu))
        };

        // Delta lines: 1D densities transformed over x₁.
        let mut planner = rustfft::FftPlanner::<T>::new();
        let fft1 = planner.plan_fft_forward(grid.n1());
        let deltas: Vec<(T, Vec<Complex<T>>)> = coeffs
            .delta_lines
            .iter()
            .map(|line| {
                let mut buf: Vec<Complex<T>> = line
                    .sigma
                    .iter()
                    .map(|&v| Complex::new(v, T::zero()))
                    .collect();
                fft1.process(&mut buf);
                let scale = T::one() / cast::<T>(grid.n1() as f64);
                for c in buf.iter_mut() {
                    *c = c.scale(scale);
                }
                (line.y0, buf)
            })
            .collect();

        let dim = cutoff.dim();
        let zero = Complex::new(T::zero(), T::zero());
        let mut a0 = DMatrix::from_element(dim, dim, zero);
        let mut a1 = DMatrix::from_element(dim, dim, zero);
        let mut a2 = DMatrix::from_element(dim, dim, zero);
        let mut b = DMatrix::from_element(dim, dim, zero);
        let inv_two_pi = T::one() / T::two_pi();

        for row in 0..dim {
            let (mr, nr) = cutoff.decode(row);
            for col in 0..dim {
                let (mc, nc) = cutoff.decode(col);
                let dm = mr - mc;
                let dn = nr - nc;
                let g11 = t_g11.get(dm, dn);
                let g12 = t_g12.get(dm, dn);
                let g22 = t_g22.get(dm, dn);
                let (mr_t, nr_t) = (cast::<T>(mr as f64), cast::<T>(nr as f64));
                let (mc_t, nc_t) = (cast::<T>(mc as f64), cast::<T>(nc as f64));

                // Kinetic k⁰: Σ_{jl} p_j(r) p_l(c) g_{jl} − Σ_j (p_j(r)+p_j(c)) P_j + W₀.
                let mut v0 = g11.scale(mr_t * mc_t)
                    + g12.scale(mr_t * nc_t + nr_t * mc_t)
                    + g22.scale(nr_t * nc_t);
                v0 -= t_p1.get(dm, dn).scale(mr_t + mc_t);
                v0 -= t_p2.get(dm, dn).scale(nr_t + nc_t);
                v0 += t_w0.get(dm, dn);
                v0 += t_v.get(dm, dn);
                for (y0, sigma_hat) in &deltas {
                    if dm.unsigned_abs() as usize <= 2 * cutoff.m1 {
                        let s1 = sigma_hat[storage_index(dm, grid.n1())];
                        let phase = -cast::<T>(dn as f64) * *y0;
                        v0 += s1 * Complex::new(phase.cos(), phase.sin()).scale(inv_two_pi);
                    }
                }
                a0[(row, col)] = v0;

                // Kinetic k¹: (m+m')g₁₁ + (n+n')g₁₂ − 2P₁.
                a1[(row, col)] = g11.scale(mr_t + mc_t) + g12.scale(nr_t + nc_t)
                    - t_p1.get(dm, dn).scale(cast::<T>(2.0));

                // Kinetic k²: g₁₁.
                a2[(row, col)] = g11;

                b[(row, col)] = t_mu.get(dm, dn);
            }
        }

        Ok(Self {
            cutoff,
            a0,
            a1,
            a2,
            b,
            b_is_identity: mu_is_one,
        })
    }

    pub fn cutoff(&self) -> Cutoff {
        self.cutoff
    }

    /// H(k) = A₀ + k·A₁ + k²·A₂ for any complex quasimomentum.
    pub fn fiber(&self, k: Complex<T>) -> FiberOperator<T> {
        let k2 = k * k;
        let mut h = self.a0.clone();
        h.zip_zip_apply(&self.a1, &self.a2, |h0, h1, h2| *h0 += k * h1 + k2 * h2);
        FiberOperator {
            k,
            cutoff: self.cutoff,
            hmat: h,
            bmat: self.b.clone(),
            b_is_identity: self.b_is_identity,
        }
    }
}

impl<T: Scalar> FiberOperator<T> {
    /// Worst Hermitian defect of H (absolute).
    pub fn hermitian_defect(&self) -> T {
        hermitian_defect(&self.hmat)
    }

    /// Eigenvalues for real k: generalized Hermitian problem H u = λ B u.
    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        if self.b_is_identity {
            hermitian_eigenvalues(&self.hmat, HERMITICITY_TOL)
        } else {
            generalized_eigenvalues(&self.hmat, &self.bmat, HERMITICITY_TOL)
        }
    }

    /// Smallest singular value of H − λB (complex k allowed).
    pub fn smallest_singular_shifted(&self, lambda: T) -> Result<T> {
        let shifted = &self.hmat - &self.bmat * Complex::new(lambda, T::zero());
        smallest_singular_value(&shifted)
    }
}

/// Band functions λ_j(k_i) on a real quasimomentum grid.
#[derive(Clone, Debug)]
pub struct BandStructure<T: Scalar> {
    pub k_grid: Vec<T>,
    /// `bands[i][j]` = λ_{j+1}(k_i), ascending in j.
    pub bands: Vec<Vec<T>>,
}

impl<T: Scalar> BandStructure<T> {
    pub fn n_bands(&self) -> usize {
        self.bands.first().map_or(0, Vec::len)
    }

    /// Per-band max − min over the k-grid.
    pub fn oscillation(&self) -> Vec<T> {
        let nb = self.n_bands();
        (0..nb)
            .map(|j| {
                let mut lo = self.bands[0][j];
                let mut hi = lo;
                for row in &self.bands {
                    if row[j] < lo {
                        lo = row[j];
                    }
                    if row[j] > hi {
                        hi = row[j];
                    }
                }
                hi - lo
            })
            .collect()
    }

    /// CSV export: header `k,band1,...,bandN`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k");
        for j in 0..self.n_bands() {
            out.push_str(&format!(",band{}", j + 1));
        }
        out.push('\n');
        for (i, &k) in self.k_grid.iter().enumerate() {
            out.push_str(&format!("{:.16e}", to_f64(k)));
            for v in &self.bands[i] {
                out.push_str(&format!(",{:.16e}", to_f64(*v)));
            }
            out.push('\n');
        }
        out
    }
}

/// Assembles one fiber at quasimomentum k.
pub fn assemble_fiber<T: Scalar>(
    coeffs: &CoefficientSet<T>,
    k: Complex<T>,
    cutoff: Cutoff,
) -> Result<FiberOperator<T>> {
    Ok(FiberFamily::assemble(coeffs, cutoff)?.fiber(k))
}

/// Lowest `n_bands` eigenvalues on each point of a real k-grid.
pub fn solve_bands<T: Scalar>(
    coeffs: &CoefficientSet<T>,
    k_grid: &[T],
    n_bands: usize,
    cutoff: Cutoff,
) -> Result<BandStructure<T>> {
    let family = FiberFamily::assemble(coeffs, cutoff)?;
    if n_bands > cutoff.dim() {
        return Err(Error::Eigensolver(format!(
            "requested {} bands from a {}-dimensional basis",
            n_bands,
            cutoff.dim()
        )));
    }
    let bands: Result<Vec<Vec<T>>> = k_grid
        .par_iter()
        .map(|&k| {
            let fiber = family.fiber(Complex::new(k, T::zero()));
            let ev = fiber
                .eigenvalues()
                .map_err(|e| Error::Eigensolver(format!("at k = {}: {e}", to_f64(k))))?;
            Ok(ev[..n_bands].to_vec())
        })
        .collect();
    Ok(BandStructure {
        k_grid: k_grid.to_vec(),
        bands: bands?,
    })
}

/// Smallest singular values of H(β + iy) − λB for each y.
///
/// Confirms the resolvent decay ‖(H_P(β+iy))⁻¹‖ ≤ C/y: the returned
/// s_min(y) should grow linearly in y once y dominates the potential.
pub fn thomas_bound<T: Scalar>(
    coeffs: &CoefficientSet<T>,
    beta_shift: T,
    y_list: &[T],
    lambda: T,
    cutoff: Cutoff,
) -> Result<Vec<T>> {
    let family = FiberFamily::assemble(coeffs, cutoff)?;
    y_list
        .par_iter()
        .map(|&y| {
            let fiber = family.fiber(Complex::new(beta_shift, y));
            fiber.smallest_singular_shifted(lambda)
        })
        .collect()
}

/// Oscillation of each band, with a flag list marking suspiciously flat
/// bands (discrete witness against absolute continuity would be a bug or a
/// degenerate input).
pub fn band_oscillation<T: Scalar>(bs: &BandStructure<T>) -> (Vec<T>, Vec<bool>) {
    let osc = bs.oscillation();
    let flags = osc
        .iter()
        .map(|&o| o < cast::<T>(1e-8))
        .collect();
    (osc, flags)
}

/// Uniform k-grid {i/(n−1)}, i = 0..n, spanning one full period inclusive
/// so symmetric points like k = 1/2 are sampled exactly.
pub fn uniform_k_grid<T: Scalar>(n: usize) -> Vec<T> {
    assert!(n >= 2);
    (0..n)
        .map(|i| cast::<T>(i as f64) / cast::<T>((n - 1) as f64))
        .collect()
}

/// Oracle for the free fiber at complex k: min over modes of
/// |A₁₁(m+k)² + 2A₁₂(m+k)n + A₂₂n² − λ|.
pub fn free_symbol_min<T: Scalar>(
    a11: T,
    a12: T,
    a22: T,
    k: Complex<T>,
    lambda: T,
    cutoff: Cutoff,
) -> T {
    let mut best = T::max_value().unwrap_or_else(T::one);
    for b in 0..cutoff.dim() {
        let (m, n) = cutoff.decode(b);
        let mk = Complex::new(cast::<T>(m as f64), T::zero()) + k;
        let nn = cast::<T>(n as f64);
        let sym = mk * mk * Complex::new(a11, T::zero())
            + mk.scale(cast::<T>(2.0) * a12 * nn)
            + Complex::new(a22 * nn * nn - lambda, T::zero());
        let v = crate::scalar::cnorm(sym);
        if v < best {
            best = v;
        }
    }
    best
}

/// Richardson extrapolation of three values under the model
/// v(h) = v* + c₁h + c₂h², with h = 1/cutoff.
pub fn richardson3<T: Scalar>(h: [T; 3], v: [T; 3]) -> T {
    // Neville's scheme to h = 0.
    let mut p = v;
    for level in 1..3 {
        for i in 0..(3 - level) {
            let num = h[i + level] * p[i] - h[i] * p[i + 1];
            p[i] = num / (h[i + level] - h[i]);
        }
    }
    p[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> TorusGrid {
        TorusGrid::new(n, n).unwrap()
    }

    fn k(x: f64) -> Complex<f64> {
        Complex::new(x, 0.0)
    }

    #[test]
    fn free_fiber_is_diagonal_with_exact_symbol() {
        let coeffs = CoefficientSet::<f64>::free(grid(32));
        let cut = Cutoff::square(3);
        let fiber = assemble_fiber(&coeffs, k(0.3), cut).unwrap();
        for r in 0..cut.dim() {
            let (m, n) = cut.decode(r);
            for c in 0..cut.dim() {
                let want = if r == c {
                    let mk = m as f64 + 0.3;
                    Complex::new(mk * mk + (n * n) as f64, 0.0)
                } else {
                    Complex::new(0.0, 0.0)
                };
                assert!(
                    (fiber.hmat[(r, c)] - want).norm() < 1e-12,
                    "entry ({r},{c})"
                );
            }
        }
    }

    #[test]
    fn free_eigenvalues_match_lattice_norms() {
        let coeffs = CoefficientSet::<f64>::free(grid(32));
        let ev = assemble_fiber(&coeffs, k(0.0), Cutoff::square(4))
            .unwrap()
            .eigenvalues()
            .unwrap();
        let expect = [0.0, 1.0, 1.0, 1.0, 1.0, 2.0, 2.0, 2.0, 2.0, 4.0];
        for (i, &e) in expect.iter().enumerate() {
            assert!((ev[i] - e).abs() < 1e-10, "ev[{i}] = {}", ev[i]);
        }

        let ev_half = assemble_fiber(&coeffs, k(0.5), Cutoff::square(4))
            .unwrap()
            .eigenvalues()
            .unwrap();
        assert!((ev_half[0] - 0.25).abs() < 1e-10);
        assert!((ev_half[1] - 0.25).abs() < 1e-10);
    }

    #[test]
    fn constant_diagonal_metric_scales_symbol() {
        let coeffs = CoefficientSet::<f64>::free(grid(32))
            .with_metric(Metric::diagonal(0.5, 2.0))
            .unwrap();
        let fiber = assemble_fiber(&coeffs, k(0.2), Cutoff::square(3)).unwrap();
        let cut = fiber.cutoff;
        for r in 0..cut.dim() {
            let (m, n) = cut.decode(r);
            let mk = m as f64 + 0.2;
            let want = 0.5 * mk * mk + 2.0 * (n * n) as f64;
            assert!((fiber.hmat[(r, r)] - Complex::new(want, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn cosine_potential_couples_neighbor_modes() {
        // V = 2cos x₁ has V̂(±1, 0) = 1: unit coupling on m → m±1.
        let coeffs = CoefficientSet::<f64>::free(grid(32))
            .with_potential(|x1: f64, _| 2.0 * x1.cos());
        let fiber = assemble_fiber(&coeffs, k(0.0), Cutoff::square(2)).unwrap();
        let cut = fiber.cutoff;
        for r in 0..cut.dim() {
            let (mr, nr) = cut.decode(r);
            for c in 0..cut.dim() {
                let (mc, nc) = cut.decode(c);
                let mut want = if r == c {
                    ((mr * mr + nr * nr) as f64).into()
                } else {
                    Complex::new(0.0, 0.0)
                };
                if nr == nc && (mr - mc).abs() == 1 {
                    want += Complex::new(1.0, 0.0);
                }
                assert!(
                    (fiber.hmat[(r, c)] - want).norm() < 1e-12,
                    "entry ({r},{c}) = {}",
                    fiber.hmat[(r, c)]
                );
            }
        }
        assert!(fiber.hermitian_defect() < 1e-12);
    }

    #[test]
    fn k_periodicity_and_time_reversal() {
        let coeffs = CoefficientSet::<f64>::free(grid(64))
            .with_potential(|x1: f64, x2: f64| x1.cos() + 0.5 * (x1 + x2).cos());
        let cut = Cutoff::square(8);
        let family = FiberFamily::assemble(&coeffs, cut).unwrap();
        let ev = |kk: f64| {
            let f = family.fiber(k(kk));
            f.eigenvalues().unwrap()
        };
        let e1 = ev(0.3);
        let e2 = ev(1.3);
        let e3 = ev(0.7); // 1 − 0.3
        for j in 0..6 {
            assert!((e1[j] - e2[j]).abs() < 1e-10, "period: band {j}");
            assert!((e1[j] - e3[j]).abs() < 1e-10, "time-reversal: band {j}");
        }
    }

    #[test]
    fn cutoff_convergence_is_monotone_from_nesting() {
        let coeffs = CoefficientSet::<f64>::free(grid(256))
            .with_potential(|x1: f64, _| 2.0 * x1.cos());
        let mut per_m: Vec<Vec<f64>> = Vec::new();
        for m in [2usize, 4, 8, 16] {
            let ev = assemble_fiber(&coeffs, k(0.25), Cutoff::square(m))
                .unwrap()
                .eigenvalues()
                .unwrap();
            per_m.push(ev[..4].to_vec());
        }
        for w in per_m.windows(2) {
            for j in 0..4 {
                assert!(
                    w[1][j] <= w[0][j] + 1e-12,
                    "band {j} rose from {} to {}",
                    w[0][j],
                    w[1][j]
                );
            }
        }
        // Increments shrink as the cutoff doubles (down to rounding).
        for j in 0..4 {
            let d1 = (per_m[1][j] - per_m[0][j]).abs();
            let d2 = (per_m[2][j] - per_m[1][j]).abs();
            let d3 = (per_m[3][j] - per_m[2][j]).abs();
            assert!(d2 <= d1 + 1e-12, "band {j}: {d1} -> {d2}");
            assert!(d3 <= d2 + 1e-12, "band {j}: {d2} -> {d3}");
        }
    }

    #[test]
    fn band_oscillation_free_value() {
        let coeffs = CoefficientSet::<f64>::free(grid(32));
        let bs = solve_bands(&coeffs, &uniform_k_grid::<f64>(33), 3, Cutoff::square(4)).unwrap();
        let (osc, flags) = band_oscillation(&bs);
        assert!((osc[0] - 0.25).abs() < 1e-12, "osc = {}", osc[0]);
        assert!(!flags[0]);

        // Degenerate control: a constant-fiber table is flagged.
        let fake = BandStructure {
            k_grid: uniform_k_grid::<f64>(17),
            bands: vec![vec![1.0, 2.0]; 17],
        };
        let (_, flags) = band_oscillation(&fake);
        assert!(flags.iter().all(|&f| f));
    }

    #[test]
    fn scaled_metric_scales_first_band_oscillation() {
        let coeffs = CoefficientSet::<f64>::free(grid(32))
            .with_metric(Metric::diagonal(0.5, 2.0))
            .unwrap();
        let bs = solve_bands(&coeffs, &uniform_k_grid::<f64>(33), 1, Cutoff::square(4)).unwrap();
        let (osc, _) = band_oscillation(&bs);
        assert!((osc[0] - 0.125).abs() < 1e-12, "osc = {}", osc[0]);
    }

    #[test]
    fn thomas_free_matches_symbol_minimization() {
        let coeffs = CoefficientSet::<f64>::free(TorusGrid::new(16, 256).unwrap());
        let cut = Cutoff { m1: 2, m2: 40 };
        let ys = [4.0, 8.0, 16.0, 32.0];
        let smin = thomas_bound(&coeffs, 0.5, &ys, 0.0, cut).unwrap();
        for (i, &y) in ys.iter().enumerate() {
            let oracle = free_symbol_min(1.0, 0.0, 1.0, Complex::new(0.5, y), 0.0, cut);
            assert!(
                (smin[i] - oracle).abs() < 1e-8 * oracle,
                "y = {y}: {} vs {}",
                smin[i],
                oracle
            );
            let ratio = smin[i] / y;
            assert!((0.9..=1.1).contains(&ratio), "y = {y}: ratio {ratio}");
        }
        // Asymptotic linearity: s_min(2y)/s_min(y) → 2.
        let r = smin[3] / smin[2];
        assert!((r - 2.0).abs() < 0.05, "doubling ratio {r}");
    }

    #[test]
    fn thomas_with_bounded_potential_keeps_linear_growth() {
        let coeffs = CoefficientSet::<f64>::free(TorusGrid::new(32, 128).unwrap())
            .with_potential(|x1: f64, _| x1.cos());
        let cut = Cutoff { m1: 4, m2: 24 };
        let ys = [8.0, 16.0];
        let smin = thomas_bound(&coeffs, 0.5, &ys, 0.0, cut).unwrap();
        for (i, &y) in ys.iter().enumerate() {
            assert!(smin[i] >= 0.8 * y, "y = {y}: s_min = {}", smin[i]);
        }
    }

    #[test]
    fn delta_line_matches_circle_oracle() {
        // A = I, V = 0, constant σ on x₂ = π: eigenvalues separate as
        // (m+k)² + η_j with η_j from the 1D circle-delta problem.
        let sigma0 = 1.0;
        let kk = 0.3;
        let g = TorusGrid::new(8, 1024).unwrap();
        let coeffs = CoefficientSet::<f64>::free(g)
            .with_delta_line(std::f64::consts::PI, |_| sigma0);

        let cuts = [32usize, 64, 128];
        let mut per_cut: Vec<Vec<f64>> = Vec::new();
        for &m2 in &cuts {
            let cut = Cutoff { m1: 1, m2 };
            let ev = assemble_fiber(&coeffs, k(kk), cut).unwrap().eigenvalues().unwrap();
            // Extract the m = 0 block: η_j = λ − k² for eigenvalues built on
            // m = 0. The three m-blocks interleave; filter by matching
            // against m ∈ {−1, 0, 1} shifts of the same η ladder.
            per_cut.push(ev);
        }

        let eta_oracle = circle_delta_oracle(sigma0, std::f64::consts::PI, 6);
        // Cross-check the FD oracle against the secular equation for the
        // lowest even-sector eigenvalue.
        let eta0 = circle_delta_secular(sigma0, (1e-6, 0.2401)).unwrap();
        assert!(
            (eta_oracle[0] - eta0).abs() < 1e-8,
            "FD {} vs secular {eta0}",
            eta_oracle[0]
        );

        // Build the expected 2D spectrum from the oracle ladder and compare
        // the lowest eigenvalues after Richardson extrapolation in 1/M₂.
        let mut expect: Vec<f64> = Vec::new();
        for m in -1i64..=1 {
            for &eta in &eta_oracle {
                expect.push((m as f64 + kk).powi(2) + eta);
            }
        }
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());

        let h: Vec<f64> = cuts.iter().map(|&c| 1.0 / c as f64).collect();
        for j in 0..8 {
            let vals = [per_cut[0][j], per_cut[1][j], per_cut[2][j]];
            let extrap = richardson3([h[0], h[1], h[2]], vals);
            assert!(
                (extrap - expect[j]).abs() < 1e-6,
                "band {j}: extrapolated {extrap} vs oracle {}",
                expect[j]
            );
        }
    }

    #[test]
    fn bands_are_continuous_under_k_refinement() {
        // Max jump between adjacent k-samples shrinks with the k-grid.
        let coeffs = CoefficientSet::<f64>::free(grid(64))
            .with_potential(|x1: f64, _| 2.0 * x1.cos());
        let max_jump = |nk: usize| {
            let bs = solve_bands(&coeffs, &uniform_k_grid::<f64>(nk), 4, Cutoff::square(6)).unwrap();
            let mut jump = 0.0f64;
            for w in bs.bands.windows(2) {
                for j in 0..4 {
                    jump = jump.max((w[1][j] - w[0][j]).abs());
                }
            }
            jump
        };
        let j9 = max_jump(9);
        let j17 = max_jump(17);
        let j33 = max_jump(33);
        assert!(j17 < j9 && j33 < j17, "jumps {j9} {j17} {j33}");
        assert!(j33 < 0.1);
    }

    #[test]
    fn cutoff_too_large_for_grid_is_rejected() {
        let coeffs = CoefficientSet::<f64>::free(grid(16));
        let err = assemble_fiber(&coeffs, k(0.0), Cutoff::square(8));
        assert!(matches!(err, Err(crate::error::Error::AliasingCutoff { .. })));
    }

    #[test]
    fn weighted_problem_reduces_to_scaled_free() {
        // μ ≡ 4 with A = I: eigenvalues are symbol/4.
        let coeffs = CoefficientSet::<f64>::free(grid(32))
            .with_weight(|_, _| 4.0f64)
            .unwrap();
        let ev = assemble_fiber(&coeffs, k(0.25), Cutoff::square(3))
            .unwrap()
            .eigenvalues()
            .unwrap();
        assert!((ev[0] - 0.0625 / 4.0).abs() < 1e-12, "ev0 = {}", ev[0]);
    }

    #[test]
    fn csv_has_header_and_17_digits() {
        let bs = BandStructure {
            k_grid: vec![0.0f64, 0.5],
            bands: vec![vec![0.0, 1.0], vec![0.25, 0.25]],
        };
        let csv = bs.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "k,band1,band2");
        let row = lines.next().unwrap();
        assert!(row.starts_with("0.0000000000000000e0,"));
    }
}
