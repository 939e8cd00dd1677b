//! Sample grids on the 2π-periodic torus and on the straight strip.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cast, Scalar};

/// Uniform grid on the fundamental domain (0, 2π) × (0, 2π) of the torus.
///
/// Samples sit at x_{ij} = (2πi/n1, 2πj/n2). Fields over the grid are stored
/// row-major, index `i * n2 + j`, which is also the layout the FFT consumes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusGrid {
    n1: usize,
    n2: usize,
}

impl TorusGrid {
    /// Both counts must be powers of two and at least 8.
    pub fn new(n1: usize, n2: usize) -> Result<Self> {
        for n in [n1, n2] {
            if n < 8 || !n.is_power_of_two() {
                return Err(Error::InvalidGrid(format!(
                    "sample counts must be powers of two >= 8, got {n1} x {n2}"
                )));
            }
        }
        Ok(Self { n1, n2 })
    }

    /// Work grids (dealiasing pads, oversampled tables) skip the
    /// power-of-two rule; rustfft handles composite sizes.
    pub(crate) fn internal(n1: usize, n2: usize) -> Self {
        assert!(n1 >= 2 && n2 >= 2);
        Self { n1, n2 }
    }

    #[inline]
    pub fn n1(&self) -> usize {
        self.n1
    }

    #[inline]
    pub fn n2(&self) -> usize {
        self.n2
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n1 && j < self.n2);
        i * self.n2 + j
    }

    #[inline]
    pub fn x1<T: Scalar>(&self, i: usize) -> T {
        T::two_pi() * cast::<T>(i as f64) / cast::<T>(self.n1 as f64)
    }

    #[inline]
    pub fn x2<T: Scalar>(&self, j: usize) -> T {
        T::two_pi() * cast::<T>(j as f64) / cast::<T>(self.n2 as f64)
    }

    /// Signed FFT frequency along x₁ for storage index `i`.
    #[inline]
    pub fn freq1(&self, i: usize) -> i64 {
        signed_freq(i, self.n1)
    }

    /// Signed FFT frequency along x₂ for storage index `j`.
    #[inline]
    pub fn freq2(&self, j: usize) -> i64 {
        signed_freq(j, self.n2)
    }

    /// Iterates (i, j, linear index) in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let n2 = self.n2;
        (0..self.len()).map(move |s| (s / n2, s % n2, s))
    }

    /// Evaluates a closure at every sample point, in storage order.
    pub fn sample<T: Scalar, F: FnMut(T, T) -> V, V>(&self, mut f: F) -> Vec<V> {
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.n1 {
            let x1 = self.x1::<T>(i);
            for j in 0..self.n2 {
                out.push(f(x1, self.x2::<T>(j)));
            }
        }
        out
    }

    /// Cell area 4π²/(n1·n2) of the quadrature rule on the torus.
    pub fn cell_area<T: Scalar>(&self) -> T {
        T::two_pi() * T::two_pi() / cast::<T>(self.len() as f64)
    }

    pub fn same_shape(&self, other: &TorusGrid) -> bool {
        self == other
    }
}

#[inline]
fn signed_freq(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Grid on the strip S₁ = {0 < x₂ < π}, 2π-periodic in x₁.
///
/// Transverse nodes are the closed set x₂ = jπ/n2 for j = 0..=n2, so the
/// doubled cylinder grid (period 2π, 2·n2 nodes) contains every strip node.
/// Fields are stored row-major with `n2 + 1` values per x₁ row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StripGrid {
    n1: usize,
    n2: usize,
}

impl StripGrid {
    pub fn new(n1: usize, n2: usize) -> Result<Self> {
        if n1 < 8 || !n1.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "strip n1 must be a power of two >= 8, got {n1}"
            )));
        }
        if n2 < 4 || !n2.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "strip n2 must be a power of two >= 4, got {n2}"
            )));
        }
        Ok(Self { n1, n2 })
    }

    #[inline]
    pub fn n1(&self) -> usize {
        self.n1
    }

    /// Number of transverse cells; node count is `n2 + 1`.
    #[inline]
    pub fn n2(&self) -> usize {
        self.n2
    }

    #[inline]
    pub fn nodes2(&self) -> usize {
        self.n2 + 1
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n1 * self.nodes2()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n1 && j <= self.n2);
        i * self.nodes2() + j
    }

    #[inline]
    pub fn x1<T: Scalar>(&self, i: usize) -> T {
        T::two_pi() * cast::<T>(i as f64) / cast::<T>(self.n1 as f64)
    }

    #[inline]
    pub fn x2<T: Scalar>(&self, j: usize) -> T {
        T::pi() * cast::<T>(j as f64) / cast::<T>(self.n2 as f64)
    }

    #[inline]
    pub fn h2<T: Scalar>(&self) -> T {
        T::pi() / cast::<T>(self.n2 as f64)
    }

    pub fn sample<T: Scalar, F: FnMut(T, T) -> V, V>(&self, mut f: F) -> Vec<V> {
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.n1 {
            let x1 = self.x1::<T>(i);
            for j in 0..=self.n2 {
                out.push(f(x1, self.x2::<T>(j)));
            }
        }
        out
    }

    /// Trapezoid weight of transverse node j (half weight at the two edges).
    #[inline]
    pub fn w2<T: Scalar>(&self, j: usize) -> T {
        let h = self.h2::<T>();
        if j == 0 || j == self.n2 {
            h * cast::<T>(0.5)
        } else {
            h
        }
    }

    /// Torus grid of the doubled cylinder (x₂-period 2π, 2·n2 samples).
    pub fn doubled(&self) -> Result<TorusGrid> {
        TorusGrid::new(self.n1, 2 * self.n2)
    }
}
