//! Independent low-dimensional oracles used by the verification suite.
//!
//! Everything here is deliberately built on a different discretization
//! (finite differences, secular equations) than the spectral machinery it
//! checks, and stays in `f64`.

use nalgebra::DMatrix;

const PI: f64 = std::f64::consts::PI;

fn sorted_eigenvalues(m: DMatrix<f64>, keep: usize) -> Vec<f64> {
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    ev.truncate(keep);
    ev
}

/// 1D finite-difference oracle: eigenvalues of −d²/dx² + σ₀·δ(x − y0) on
/// the circle of circumference 2π, Richardson-refined to convergence.
/// `y0` must be a grid point of the internal discretizations.
pub fn circle_delta_oracle(sigma0: f64, y0: f64, count: usize) -> Vec<f64> {
    let solve = |n: usize| -> Vec<f64> {
        let h = 2.0 * PI / n as f64;
        let i0 = (y0 / h).round() as usize % n;
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 2.0 / (h * h);
            m[(i, (i + 1) % n)] = -1.0 / (h * h);
            m[(i, (i + n - 1) % n)] = -1.0 / (h * h);
        }
        m[(i0, i0)] += sigma0 / h;
        sorted_eigenvalues(m, count + 4)
    };
    let coarse = solve(1024);
    let fine = solve(2048);
    // O(h²) leading error: one Richardson level gives O(h⁴).
    let mut out: Vec<f64> = coarse
        .iter()
        .zip(fine.iter())
        .map(|(&c, &f)| (4.0 * f - c) / 3.0)
        .collect();
    out.truncate(count);
    out
}

/// Closed-form check for the even sector of the circle delta: eigenvalues
/// η solve tan(π√η) = σ₀/(2√η); odd-sector eigenvalues are n².
pub fn circle_delta_secular(sigma0: f64, eta_bracket: (f64, f64)) -> Option<f64> {
    let f = |eta: f64| -> f64 {
        let r = eta.sqrt();
        (PI * r).tan() - sigma0 / (2.0 * r)
    };
    let (mut lo, mut hi) = eta_bracket;
    let (flo, fhi) = (f(lo), f(hi));
    if flo * fhi > 0.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) * flo <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Transverse eigenvalues of −u'' + V(x)u on (0, π) with the third boundary
/// condition u'(0) = σ₀u(0), u'(π) = −σ_π u(π), by a cell-centered
/// second-order scheme refined once by Richardson extrapolation.
pub fn robin_interval_oracle(
    v: impl Fn(f64) -> f64 + Copy,
    sigma0: f64,
    sigma_pi: f64,
    count: usize,
) -> Vec<f64> {
    let solve = |n: usize| -> Vec<f64> {
        let h = PI / n as f64;
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            let x = (i as f64 + 0.5) * h;
            let mut diag = v(x);
            if i > 0 {
                diag += 1.0 / (h * h);
                m[(i, i - 1)] = -1.0 / (h * h);
            }
            if i + 1 < n {
                diag += 1.0 / (h * h);
                m[(i, i + 1)] = -1.0 / (h * h);
            }
            // Robin fluxes with the half-cell extrapolation of the trace.
            if i == 0 {
                diag += sigma0 / (h * (1.0 + 0.5 * sigma0 * h));
            }
            if i + 1 == n {
                diag += sigma_pi / (h * (1.0 + 0.5 * sigma_pi * h));
            }
            m[(i, i)] = diag;
        }
        sorted_eigenvalues(m, count + 4)
    };
    let coarse = solve(1024);
    let fine = solve(2048);
    let mut out: Vec<f64> = coarse
        .iter()
        .zip(fine.iter())
        .map(|(&c, &f)| (4.0 * f - c) / 3.0)
        .collect();
    out.truncate(count);
    out
}

/// Secular equation for the Robin(σ₀ at 0)/Neumann(at π) interval:
/// positive eigenvalues η = r² solve r·tan(πr) = σ₀·cos-matched form,
/// concretely u = cos(r(π − x)) gives r·sin(πr) = σ₀·cos(πr).
pub fn robin_interval_secular(sigma0: f64, bracket: (f64, f64)) -> Option<f64> {
    let f = |eta: f64| -> f64 {
        let r = eta.sqrt();
        r * (PI * r).sin() - sigma0 * (PI * r).cos()
    };
    let (mut lo, mut hi) = bracket;
    let (flo, fhi) = (f(lo), f(hi));
    if flo * fhi > 0.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) * flo <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Transverse eigenvalues of the weighted pencil −(ω²χ')' + s·ω²χ = η·ω²χ
/// on (0, π) with natural (zero-flux) boundary conditions: the conjugated
/// form of the conformal-factor reduction. Cell-centered conservative
/// scheme, Richardson-refined.
pub fn weighted_neumann_pencil_oracle(
    omega: impl Fn(f64) -> f64 + Copy,
    shift: f64,
    count: usize,
) -> Vec<f64> {
    let solve = |n: usize| -> Vec<f64> {
        let h = PI / n as f64;
        let w2 = |x: f64| {
            let w = omega(x);
            w * w
        };
        // Symmetrized: B^{-1/2} A B^{-1/2} with B = diag(ω²(x_i)).
        let mut m = DMatrix::<f64>::zeros(n, n);
        let centers: Vec<f64> = (0..n).map(|i| w2((i as f64 + 0.5) * h)).collect();
        for i in 0..n {
            let mut diag = shift * centers[i];
            if i > 0 {
                let face = w2(i as f64 * h);
                diag += face / (h * h);
                m[(i, i - 1)] = -face / (h * h) / (centers[i] * centers[i - 1]).sqrt();
            }
            if i + 1 < n {
                let face = w2((i + 1) as f64 * h);
                diag += face / (h * h);
                m[(i, i + 1)] = -face / (h * h) / (centers[i] * centers[i + 1]).sqrt();
            }
            m[(i, i)] = diag / centers[i];
        }
        sorted_eigenvalues(m, count + 4)
    };
    let coarse = solve(1024);
    let fine = solve(2048);
    let mut out: Vec<f64> = coarse
        .iter()
        .zip(fine.iter())
        .map(|(&c, &f)| (4.0 * f - c) / 3.0)
        .collect();
    out.truncate(count);
    out
}

/// Transverse eigenvalues of −u'' + Ṽ(x)u (+shift) with Robin data at both
/// edges, same scheme as [`robin_interval_oracle`] but with a variable
/// potential and shift.
pub fn robin_pencil_oracle(
    v: impl Fn(f64) -> f64 + Copy,
    sigma0: f64,
    sigma_pi: f64,
    shift: f64,
    count: usize,
) -> Vec<f64> {
    robin_interval_oracle(move |x| v(x) + shift, sigma0, sigma_pi, count)
}
