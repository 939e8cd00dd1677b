//! The numeric core is generic over the working precision; exercise the
//! f32 instantiation end to end at f32-appropriate tolerances.

use num_complex::Complex;

use isoband_core::beltrami::{solve_periodic_beltrami, SolverConfig};
use isoband_core::floquet::{assemble_fiber, Cutoff};
use isoband_core::grid::TorusGrid;
use isoband_core::metric::MetricField;
use isoband_core::pushforward::CoefficientSet;

#[test]
fn f32_beltrami_constant_metric() {
    let grid = TorusGrid::new(16, 16).unwrap();
    let metric = MetricField::<f32>::constant(grid, 0.5, 0.0, 2.0);
    let q = metric.to_beltrami().unwrap();
    assert!((q.sup_norm() - 1.0 / 3.0).abs() < 1e-6);
    let cfg = SolverConfig::<f32> {
        max_iterations: 100,
        tolerance: 1e-6,
        stop_when_stalled: true,
    };
    let map = solve_periodic_beltrami(&q, &cfg).unwrap();
    assert!((map.alpha() - Complex::new(0.75f32, 0.0)).norm() < 1e-5);
    assert!((map.kappa() - Complex::new(0.0, std::f32::consts::PI)).norm() < 1e-4);
}

#[test]
fn f32_free_fiber_eigenvalues() {
    let grid = TorusGrid::new(16, 16).unwrap();
    let coeffs = CoefficientSet::<f32>::free(grid);
    let ev = assemble_fiber(&coeffs, Complex::new(0.5f32, 0.0), Cutoff::square(3))
        .unwrap()
        .eigenvalues()
        .unwrap();
    assert!((ev[0] - 0.25).abs() < 1e-5);
    assert!((ev[1] - 0.25).abs() < 1e-5);
}

#[test]
fn f32_metric_round_trip() {
    let grid = TorusGrid::new(16, 16).unwrap();
    let metric = MetricField::<f32>::from_fn(grid, |x1: f32, x2: f32| {
        let lam = (0.3 * x1.sin() + 0.2 * x2.cos()).exp();
        (lam, 0.0, 1.0 / lam)
    });
    let q = metric.to_beltrami().unwrap();
    let back = q.to_metric().unwrap();
    for s in 0..grid.len() {
        assert!((metric.g11()[s] - back.g11()[s]).abs() < 1e-5);
        assert!((metric.g22()[s] - back.g22()[s]).abs() < 1e-5);
    }
}
