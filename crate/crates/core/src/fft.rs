//! Two-dimensional FFT helpers on torus grids.
//!
//! Forward transforms carry the 1/(n1·n2) normalization, so `forward`
//! returns the coefficients of the trigonometric interpolant
//! f(x) = Σ c(m,n) e^{i(m x₁ + n x₂)} in FFT storage order.

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use crate::grid::TorusGrid;
use crate::scalar::{cast, Scalar};

pub struct Fft2<T: Scalar> {
    grid: TorusGrid,
    fwd1: Arc<dyn Fft<T>>,
    inv1: Arc<dyn Fft<T>>,
    fwd2: Arc<dyn Fft<T>>,
    inv2: Arc<dyn Fft<T>>,
}

impl<T: Scalar> Fft2<T> {
    pub fn new(grid: TorusGrid) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            grid,
            fwd1: planner.plan_fft_forward(grid.n1()),
            inv1: planner.plan_fft_inverse(grid.n1()),
            fwd2: planner.plan_fft_forward(grid.n2()),
            inv2: planner.plan_fft_inverse(grid.n2()),
        }
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    fn pass2(&self, data: &mut [Complex<T>], forward: bool) {
        let plan = if forward { &self.fwd2 } else { &self.inv2 };
        for row in data.chunks_exact_mut(self.grid.n2()) {
            plan.process(row);
        }
    }

    fn pass1(&self, data: &mut [Complex<T>], forward: bool) {
        let (n1, n2) = (self.grid.n1(), self.grid.n2());
        let plan = if forward { &self.fwd1 } else { &self.inv1 };
        let mut col = vec![Complex::new(T::zero(), T::zero()); n1];
        for j in 0..n2 {
            for i in 0..n1 {
                col[i] = data[i * n2 + j];
            }
            plan.process(&mut col);
            for i in 0..n1 {
                data[i * n2 + j] = col[i];
            }
        }
    }

    /// In-place forward transform, normalized by 1/(n1·n2).
    pub fn forward(&self, data: &mut [Complex<T>]) {
        assert_eq!(data.len(), self.grid.len());
        self.pass2(data, true);
        self.pass1(data, true);
        let scale = T::one() / cast::<T>(self.grid.len() as f64);
        for v in data.iter_mut() {
            *v = v.scale(scale);
        }
    }

    /// In-place inverse transform (no scaling; inverse of `forward`).
    pub fn inverse(&self, data: &mut [Complex<T>]) {
        assert_eq!(data.len(), self.grid.len());
        self.pass2(data, false);
        self.pass1(data, false);
    }

    /// Coefficients of a real field.
    pub fn forward_real(&self, field: &[T]) -> Vec<Complex<T>> {
        let mut buf: Vec<Complex<T>> = field.iter().map(|&v| Complex::new(v, T::zero())).collect();
        self.forward(&mut buf);
        buf
    }
}

/// Wirtinger symbol of ∂_z on mode (m, n): (i/2)(m − i n).
#[inline]
pub fn dz_symbol<T: Scalar>(m: i64, n: i64) -> Complex<T> {
    let half = cast::<T>(0.5);
    Complex::new(cast::<T>(n as f64) * half, cast::<T>(m as f64) * half)
}

/// Wirtinger symbol of ∂_z̄ on mode (m, n): (i/2)(m + i n).
#[inline]
pub fn dzbar_symbol<T: Scalar>(m: i64, n: i64) -> Complex<T> {
    let half = cast::<T>(0.5);
    Complex::new(-cast::<T>(n as f64) * half, cast::<T>(m as f64) * half)
}

/// Zero-pads a coefficient table onto a finer grid (spectral interpolation).
///
/// The Nyquist rows of the source are split evenly between ±n/2 on the
/// destination so real fields stay real.
pub fn pad_coefficients<T: Scalar>(
    src_grid: TorusGrid,
    src: &[Complex<T>],
    dst_grid: TorusGrid,
) -> Vec<Complex<T>> {
    assert!(dst_grid.n1() >= src_grid.n1() && dst_grid.n2() >= src_grid.n2());
    let mut dst = vec![Complex::new(T::zero(), T::zero()); dst_grid.len()];
    let half = cast::<T>(0.5);
    let (sn1, sn2) = (src_grid.n1(), src_grid.n2());
    for i in 0..sn1 {
        let m = src_grid.freq1(i);
        for j in 0..sn2 {
            let n = src_grid.freq2(j);
            let mut v = src[i * sn2 + j];
            // Split Nyquist weight when the destination resolves both signs.
            let nyq1 = 2 * m.unsigned_abs() as usize == sn1 && dst_grid.n1() > sn1;
            let nyq2 = 2 * n.unsigned_abs() as usize == sn2 && dst_grid.n2() > sn2;
            if nyq1 {
                v = v.scale(half);
            }
            if nyq2 {
                v = v.scale(half);
            }
            let targets_m: &[i64] = if nyq1 { &[m, -m] } else { &[m] };
            let targets_n: &[i64] = if nyq2 { &[n, -n] } else { &[n] };
            for &tm in targets_m {
                for &tn in targets_n {
                    let di = storage_index(tm, dst_grid.n1());
                    let dj = storage_index(tn, dst_grid.n2());
                    dst[di * dst_grid.n2() + dj] += v;
                }
            }
        }
    }
    dst
}

/// Truncates a coefficient table onto a coarser grid.
pub fn truncate_coefficients<T: Scalar>(
    src_grid: TorusGrid,
    src: &[Complex<T>],
    dst_grid: TorusGrid,
) -> Vec<Complex<T>> {
    assert!(dst_grid.n1() <= src_grid.n1() && dst_grid.n2() <= src_grid.n2());
    let mut dst = vec![Complex::new(T::zero(), T::zero()); dst_grid.len()];
    for i in 0..dst_grid.n1() {
        let m = dst_grid.freq1(i);
        for j in 0..dst_grid.n2() {
            let n = dst_grid.freq2(j);
            let si = storage_index(m, src_grid.n1());
            let sj = storage_index(n, src_grid.n2());
            dst[i * dst_grid.n2() + j] = src[si * src_grid.n2() + sj];
        }
    }
    dst
}

#[inline]
pub fn storage_index(freq: i64, n: usize) -> usize {
    freq.rem_euclid(n as i64) as usize
}

/// Pointwise product of two coefficient tables with 3/2 zero padding.
///
/// Both inputs and the result are coefficient tables on `grid`; the product
/// is formed in physical space on the padded grid so modes beyond the
/// original band cannot alias back.
pub fn dealiased_product<T: Scalar>(
    grid: TorusGrid,
    a_hat: &[Complex<T>],
    b_hat: &[Complex<T>],
) -> Vec<Complex<T>> {
    let big = TorusGrid::internal(3 * grid.n1() / 2, 3 * grid.n2() / 2);
    let fft_big = Fft2::<T>::new(big);
    let mut a = pad_coefficients(grid, a_hat, big);
    let mut b = pad_coefficients(grid, b_hat, big);
    fft_big.inverse(&mut a);
    fft_big.inverse(&mut b);
    for (x, y) in a.iter_mut().zip(b.iter()) {
        *x *= *y;
    }
    fft_big.forward(&mut a);
    truncate_coefficients(big, &a, grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> TorusGrid {
        TorusGrid::new(16, 8).unwrap()
    }

    #[test]
    fn forward_recovers_single_mode() {
        let g = grid();
        let fft = Fft2::<f64>::new(g);
        // f = 3 e^{i(2 x1 - 1 x2)}
        let field: Vec<Complex<f64>> = g.sample(|x1: f64, x2: f64| {
            Complex::from_polar(3.0, 2.0 * x1 - x2)
        });
        let mut buf = field.clone();
        fft.forward(&mut buf);
        for i in 0..g.n1() {
            for j in 0..g.n2() {
                let expect = if g.freq1(i) == 2 && g.freq2(j) == -1 {
                    3.0
                } else {
                    0.0
                };
                let got = buf[g.idx(i, j)];
                assert!(
                    (got - Complex::new(expect, 0.0)).norm() < 1e-12,
                    "mode ({}, {}) = {}",
                    g.freq1(i),
                    g.freq2(j),
                    got
                );
            }
        }
        fft.inverse(&mut buf);
        for (a, b) in buf.iter().zip(field.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn padded_interpolation_matches_closed_form() {
        let g = grid();
        let fine = TorusGrid::new(32, 16).unwrap();
        let f = |x1: f64, x2: f64| (x1.cos() + (2.0 * x2).sin()) * 0.7 + 0.1;
        let fft = Fft2::<f64>::new(g);
        let hat = fft.forward_real(&g.sample::<f64, _, _>(|a, b| f(a, b)));
        let padded = pad_coefficients(g, &hat, fine);
        let fft_fine = Fft2::<f64>::new(fine);
        let mut phys = padded;
        fft_fine.inverse(&mut phys);
        for (i, j, s) in fine.iter() {
            let want = f(fine.x1::<f64>(i), fine.x2::<f64>(j));
            assert!((phys[s].re - want).abs() < 1e-12);
            assert!(phys[s].im.abs() < 1e-12);
        }
    }

    #[test]
    fn dealiased_product_is_exact_for_resolved_band() {
        let g = grid();
        let fft = Fft2::<f64>::new(g);
        let a = |x1: f64, _x2: f64| (2.0 * x1).cos();
        let b = |x1: f64, x2: f64| x1.sin() + x2.cos();
        let a_hat = fft.forward_real(&g.sample::<f64, _, _>(a));
        let b_hat = fft.forward_real(&g.sample::<f64, _, _>(b));
        let prod = dealiased_product(g, &a_hat, &b_hat);
        // Product has modes up to |m| = 3 < 16/2: representable, so the
        // dealiased coefficients must match the analytic product sampled.
        let mut phys = prod;
        fft.inverse(&mut phys);
        for (i, j, s) in g.iter() {
            let x1 = g.x1::<f64>(i);
            let x2 = g.x2::<f64>(j);
            assert!((phys[s].re - a(x1, x2) * b(x1, x2)).abs() < 1e-12);
        }
    }

    #[test]
    fn wirtinger_symbols_differentiate_modes() {
        // ∂_z e^{i(m x1 + n x2)} = (i/2)(m − i n) e^{...}
        let s = dz_symbol::<f64>(3, -2);
        assert!((s - Complex::new(0.5 * -2.0, 0.5 * 3.0)).norm() < 1e-15);
        let sb = dzbar_symbol::<f64>(3, -2);
        assert!((sb - Complex::new(0.5 * 2.0, 0.5 * 3.0)).norm() < 1e-15);
    }
}
