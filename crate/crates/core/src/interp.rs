//! Periodic bicubic B-spline interpolation on oversampled FFT grids.
//!
//! The prefilter (cardinal interpolation through the samples) is a diagonal
//! division in Fourier space; evaluation is a 16-tap tensor-product stencil
//! with O(h⁴) accuracy for smooth periodic data.

use num_complex::Complex;

use crate::fft::{pad_coefficients, Fft2};
use crate::grid::TorusGrid;
use crate::scalar::{cast, to_f64, Scalar};

/// Oversampling factor for interpolation tables, capped so tables stay
/// bounded on large grids.
pub(crate) const TABLE_OVERSAMPLE: usize = 4;
pub(crate) const TABLE_CAP: usize = 1024;

pub(crate) fn oversampled_grid(grid: TorusGrid) -> TorusGrid {
    let os = TABLE_OVERSAMPLE
        .min(TABLE_CAP / grid.n1().max(1))
        .min(TABLE_CAP / grid.n2().max(1))
        .max(1);
    TorusGrid::internal(grid.n1() * os, grid.n2() * os)
}

pub(crate) struct SplineTable<T: Scalar> {
    n1: usize,
    n2: usize,
    coeffs: Vec<Complex<T>>,
}

impl<T: Scalar> SplineTable<T> {
    /// Builds the table from Fourier coefficients laid out on `fine`.
    pub(crate) fn from_coefficients(fine: TorusGrid, mut hat: Vec<Complex<T>>) -> Self {
        let third = cast::<T>(1.0 / 3.0);
        let two = cast::<T>(2.0);
        for i in 0..fine.n1() {
            let s1 = (two + (T::two_pi() * cast::<T>(i as f64) / cast::<T>(fine.n1() as f64)).cos())
                * third;
            for j in 0..fine.n2() {
                let s2 = (two
                    + (T::two_pi() * cast::<T>(j as f64) / cast::<T>(fine.n2() as f64)).cos())
                    * third;
                hat[i * fine.n2() + j] = hat[i * fine.n2() + j].unscale(s1 * s2);
            }
        }
        let fft = Fft2::new(fine);
        fft.inverse(&mut hat);
        Self {
            n1: fine.n1(),
            n2: fine.n2(),
            coeffs: hat,
        }
    }

    /// Spectrally oversamples a field given on `grid` and builds its table.
    pub(crate) fn from_complex_field(grid: TorusGrid, field: &[Complex<T>]) -> Self {
        let fft = Fft2::new(grid);
        let mut hat = field.to_vec();
        fft.forward(&mut hat);
        let fine = oversampled_grid(grid);
        Self::from_coefficients(fine, pad_coefficients(grid, &hat, fine))
    }

    pub(crate) fn from_real_field(grid: TorusGrid, field: &[T]) -> Self {
        let buf: Vec<Complex<T>> = field.iter().map(|&v| Complex::new(v, T::zero())).collect();
        Self::from_complex_field(grid, &buf)
    }

    #[inline]
    fn weights(t: T) -> [T; 4] {
        let one = T::one();
        let t2 = t * t;
        let t3 = t2 * t;
        let sixth = cast::<T>(1.0 / 6.0);
        [
            (one - t) * (one - t) * (one - t) * sixth,
            (cast::<T>(3.0) * t3 - cast::<T>(6.0) * t2 + cast::<T>(4.0)) * sixth,
            (cast::<T>(-3.0) * t3 + cast::<T>(3.0) * t2 + cast::<T>(3.0) * t + one) * sixth,
            t3 * sixth,
        ]
    }

    pub(crate) fn eval(&self, x1: T, x2: T) -> Complex<T> {
        let u = x1 / T::two_pi() * cast::<T>(self.n1 as f64);
        let v = x2 / T::two_pi() * cast::<T>(self.n2 as f64);
        let uf = to_f64(u).floor();
        let vf = to_f64(v).floor();
        let t1 = u - cast::<T>(uf);
        let t2 = v - cast::<T>(vf);
        let k1 = uf as i64;
        let k2 = vf as i64;
        let w1 = Self::weights(t1);
        let w2 = Self::weights(t2);
        let mut acc = Complex::new(T::zero(), T::zero());
        for (a, &wa) in w1.iter().enumerate() {
            let i = (k1 + a as i64 - 1).rem_euclid(self.n1 as i64) as usize;
            let mut row = Complex::new(T::zero(), T::zero());
            for (b, &wb) in w2.iter().enumerate() {
                let j = (k2 + b as i64 - 1).rem_euclid(self.n2 as i64) as usize;
                row += self.coeffs[i * self.n2 + j].scale(wb);
            }
            acc += row.scale(wa);
        }
        acc
    }

    pub(crate) fn eval_real(&self, x1: T, x2: T) -> T {
        self.eval(x1, x2).re
    }
}
