//! Declarative problem descriptions, the end-to-end reduction pipeline and
//! its verification report.

use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::beltrami::{solve_periodic_beltrami, SolverConfig};
use crate::error::{Error, Result};
use crate::floquet::{band_oscillation, solve_bands, uniform_k_grid, Cutoff};
use crate::grid::{StripGrid, TorusGrid};
use crate::isomap::{renormalize, verify_identities};
use crate::presets::{MetricPreset, ScalarPreset, SigmaPreset};
use crate::pushforward::{
    pushforward, sandwich_reduce_strip, sandwich_reduce_torus, CoefficientSet, Metric,
};
use crate::strip::{
    doubled_parity_family, reflect_coefficients, verify_reflection_equivalence,
    BoundaryCondition, StripProblem, TransverseBasis,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Torus,
    Strip,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BcSpec {
    Dirichlet,
    Neumann,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricSource {
    Preset { preset: MetricPreset },
    File { file: PathBuf },
}

impl Default for MetricSource {
    fn default() -> Self {
        MetricSource::Preset {
            preset: MetricPreset::Identity,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DeltaSpec {
    pub y0: f64,
    pub sigma: SigmaPreset,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolverSettings {
    pub grid: [usize; 2],
    /// Square plane-wave cutoff M.
    pub cutoff: usize,
    /// Number of uniform quasimomentum samples over one period (inclusive).
    pub k_points: usize,
    pub n_bands: usize,
    #[serde(default = "default_beltrami_tol")]
    pub beltrami_tolerance: f64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    /// Tolerance of the source-vs-pushforward band comparison (full verify).
    #[serde(default = "default_equivalence_tol")]
    pub equivalence_tolerance: f64,
    /// Tolerance of the reflection equivalence checks (full verify).
    #[serde(default = "default_reflection_tol")]
    pub reflection_tolerance: f64,
}

fn default_beltrami_tol() -> f64 {
    1e-10
}
fn default_max_iterations() -> usize {
    200
}
fn default_equivalence_tol() -> f64 {
    1e-4
}
fn default_reflection_tol() -> f64 {
    1e-8
}

/// Declarative description of one reduction run.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProblemSpec {
    pub geometry: Geometry,
    #[serde(default)]
    pub metric: MetricSource,
    /// Strip geometry: constant diagonal metric entries.
    #[serde(default)]
    pub strip_metric: Option<[f64; 2]>,
    #[serde(default = "ScalarPreset::one")]
    pub omega: ScalarPreset,
    #[serde(default)]
    pub potential: ScalarPreset,
    #[serde(default)]
    pub magnetic: Option<[ScalarPreset; 2]>,
    #[serde(default = "ScalarPreset::one")]
    pub mu: ScalarPreset,
    #[serde(default)]
    pub delta_lines: Vec<DeltaSpec>,
    #[serde(default)]
    pub bc: Option<BcSpec>,
    pub solver: SolverSettings,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyLevel {
    Fast,
    Full,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub millis: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct IdentitySummary {
    pub beltrami: f64,
    pub laplace2: f64,
    pub orthog: f64,
    pub jacob: f64,
    pub changeg: f64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct RunReport {
    pub stages: Vec<StageTiming>,
    pub kappa: Option<[f64; 2]>,
    pub a_matrix: Option<[[f64; 2]; 2]>,
    pub beltrami_residual: Option<f64>,
    pub identity_residuals: Option<IdentitySummary>,
    pub bands_csv: Option<String>,
    pub checks: Vec<CheckResult>,
    pub all_passed: bool,
}

impl RunReport {
    fn check(&mut self, name: &str, value: f64, threshold: f64) {
        self.checks.push(CheckResult {
            name: name.to_string(),
            passed: value <= threshold,
            value,
            threshold,
        });
    }

    fn finalize(&mut self) {
        self.all_passed = self.checks.iter().all(|c| c.passed);
    }
}

struct StageClock<'a> {
    report: &'a mut RunReport,
}

impl<'a> StageClock<'a> {
    fn run<V>(&mut self, stage: &str, f: impl FnOnce() -> Result<V>) -> Result<V> {
        let t0 = Instant::now();
        let out = f().map_err(|e| e.in_stage(stage))?;
        self.report.stages.push(StageTiming {
            stage: stage.to_string(),
            millis: t0.elapsed().as_secs_f64() * 1e3,
        });
        Ok(out)
    }
}

/// Runs the full reduction for a problem description, writes the artifacts
/// into `out_dir` (bands.csv, report.json, map.isob, coeffs.isob with
/// sidecars) and returns the report.
pub fn run_pipeline(spec: &ProblemSpec, out_dir: &Path, verify: VerifyLevel) -> Result<RunReport> {
    std::fs::create_dir_all(out_dir)?;
    let mut report = RunReport::default();
    match spec.geometry {
        Geometry::Torus => run_torus(spec, out_dir, verify, &mut report)?,
        Geometry::Strip => run_strip(spec, out_dir, verify, &mut report)?,
    }
    report.finalize();
    std::fs::write(
        out_dir.join("report.json"),
        serde_json::to_string_pretty(&report)?,
    )?;
    Ok(report)
}

fn run_torus(
    spec: &ProblemSpec,
    out_dir: &Path,
    verify: VerifyLevel,
    report: &mut RunReport,
) -> Result<()> {
    let grid = TorusGrid::new(spec.solver.grid[0], spec.solver.grid[1])?;
    let mut clock = StageClock { report };

    // Metric: build, validate, normalize the determinant.
    let raw_metric = clock.run("metric", || match &spec.metric {
        MetricSource::Preset { preset } => Ok(preset.build::<f64>(grid)),
        MetricSource::File { file } => crate::io::load_metric::<f64>(file),
    })?;
    let validation = raw_metric.validate();
    if !validation.passed {
        return Err(Error::InvalidMetric(format!(
            "metric validation failed: {:?}",
            validation.violations
        ))
        .in_stage("metric"));
    }
    let (metric, det_scale) = raw_metric.normalize_det().map_err(|e| e.in_stage("metric"))?;

    // Conformal factor: the discarded determinant scalar folds into ω².
    let mut omega: Vec<f64> = grid.sample(|x1, x2| spec.omega.eval(x1, x2));
    let omega_is_one = spec.omega.is_trivially_one() && (det_scale - 1.0).abs() < 1e-14;
    if !omega_is_one {
        let s = det_scale.sqrt();
        for w in omega.iter_mut() {
            *w *= s;
        }
    }

    let mut v: Vec<f64> = grid.sample(|x1, x2| spec.potential.eval(x1, x2));
    let mut mu: Vec<f64> = grid.sample(|x1, x2| spec.mu.eval(x1, x2));
    let mut delta_lines: Vec<crate::pushforward::DeltaLine<f64>> = spec
        .delta_lines
        .iter()
        .map(|d| crate::pushforward::DeltaLine {
            y0: d.y0,
            sigma: (0..grid.n1()).map(|i| d.sigma.eval(grid.x1(i))).collect(),
        })
        .collect();

    // Sandwich reduction: strips ω and folds it into V, σ and the weight.
    if !omega_is_one {
        let metric_ref = Metric::Field(metric.clone());
        v = clock.run("sandwich", || {
            sandwich_reduce_torus(grid, &omega, &metric_ref, &v)
        })?;
        for line in delta_lines.iter_mut() {
            for (i, s) in line.sigma.iter_mut().enumerate() {
                let w = spec_omega_at(&omega, grid, i, line.y0);
                *s /= w * w;
            }
        }
        for (m, w) in mu.iter_mut().zip(omega.iter()) {
            *m /= w * w;
        }
    }

    // Beltrami solve.
    let q = metric.to_beltrami().map_err(|e| e.in_stage("beltrami"))?;
    let cfg = SolverConfig {
        max_iterations: spec.solver.max_iterations,
        tolerance: spec.solver.beltrami_tolerance,
        stop_when_stalled: true,
    };
    let map = clock.run("beltrami", || solve_periodic_beltrami(&q, &cfg))?;
    clock.report.beltrami_residual = Some(map.residual_l2());
    clock
        .report
        .check("beltrami.residual", map.residual_l2(), spec.solver.beltrami_tolerance.max(1e-8));

    // Identity suite on the solver grid.
    let identities = clock.run("identities", || verify_identities(&map, &metric))?;
    clock.report.identity_residuals = Some(IdentitySummary {
        beltrami: identities.beltrami,
        laplace2: identities.laplace2,
        orthog: identities.orthog,
        jacob: identities.jacob,
        changeg: identities.changeg,
    });
    clock
        .report
        .check("identities.worst", identities.worst(), 1e-6);

    // Renormalize the image lattice.
    let rmap = clock.run("renormalize", || renormalize(&map))?;
    let a = rmap.a_matrix();
    clock.report.kappa = Some([map.kappa().re, map.kappa().im]);
    clock.report.a_matrix = Some([[a[(0, 0)], a[(0, 1)]], [a[(1, 0)], a[(1, 1)]]]);
    clock.report.check(
        "renormalize.detA",
        ((a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)]) - 1.0).abs(),
        1e-12,
    );

    // Source coefficients. Delta transport needs horizontal image lines,
    // which only constant metrics guarantee.
    let is_variable = !matches!(&spec.metric, MetricSource::Preset { preset } if preset_is_constant(preset));
    if is_variable && !delta_lines.is_empty() {
        return Err(Error::Problem(
            "delta lines through a variable metric map onto curved lines; \
             only constant metrics keep them horizontal"
                .into(),
        )
        .in_stage("pushforward"));
    }
    let (a1_field, a2_field) = match &spec.magnetic {
        Some([pa1, pa2]) => (
            grid.sample(|x1, x2| pa1.eval(x1, x2)),
            grid.sample(|x1, x2| pa2.eval(x1, x2)),
        ),
        None => (vec![0.0; grid.len()], vec![0.0; grid.len()]),
    };
    let source = CoefficientSet::new(
        grid,
        Metric::Field(metric.clone()),
        a1_field,
        a2_field,
        v.clone(),
        mu.clone(),
        delta_lines.clone(),
    )
    .map_err(|e| e.in_stage("pushforward"))?;

    // Pushforward to the constant-metric problem.
    let mut target = clock.run("pushforward", || pushforward(&rmap, &source))?;
    // Transport the weight: μ̃(y) = μ(x)/J_g(x) generalizes the unit-weight
    // formula; the pushforward already returned 1/J_g.
    if mu.iter().any(|&m| (m - 1.0).abs() > 1e-15) {
        let tables = crate::interp::SplineTable::from_real_field(grid, &mu);
        let tol = 1e-11;
        for i in 0..grid.n1() {
            for j in 0..grid.n2() {
                let y = num_complex::Complex::new(grid.x1::<f64>(i), grid.x2::<f64>(j));
                let x = rmap.g_invert(y, tol).map_err(|e| e.in_stage("pushforward"))?;
                let s = grid.idx(i, j);
                target.mu[s] *= tables.eval_real(x.re, x.im);
            }
        }
    }
    if !delta_lines.is_empty() {
        // Constant metric: g is the identity, lines stay in place.
        target.delta_lines = delta_lines.clone();
    }

    crate::io::save_map(&out_dir.join("map.isob"), &map)?;
    crate::io::save_coefficients(&out_dir.join("coeffs.isob"), &target)?;

    // Band structure of the reduced operator.
    let k_grid = uniform_k_grid::<f64>(spec.solver.k_points);
    let cutoff = Cutoff::square(spec.solver.cutoff);
    let bands = clock.run("bands", || {
        solve_bands(&target, &k_grid, spec.solver.n_bands, cutoff)
    })?;
    let csv_path = out_dir.join("bands.csv");
    std::fs::write(&csv_path, bands.to_csv())?;
    clock.report.bands_csv = Some(csv_path.display().to_string());

    let (osc, flags) = band_oscillation(&bands);
    let min_osc = osc.iter().copied().fold(f64::MAX, f64::min);
    clock.report.checks.push(CheckResult {
        name: "bands.oscillation-min".into(),
        passed: min_osc > 1e-6 && !flags.iter().any(|&f| f),
        value: min_osc,
        threshold: 1e-6,
    });

    if verify == VerifyLevel::Full {
        // Unitary equivalence: source bands vs pushforward bands.
        let worst = clock.run("verify.equivalence", || {
            let src_bands = solve_bands(&source, &k_grid, spec.solver.n_bands, cutoff)?;
            let mut worst = 0.0f64;
            for (row_s, row_t) in src_bands.bands.iter().zip(bands.bands.iter()) {
                for (a, b) in row_s.iter().zip(row_t.iter()) {
                    worst = worst.max((a - b).abs());
                }
            }
            Ok(worst)
        })?;
        clock
            .report
            .check("verify.unitary-equivalence", worst, spec.solver.equivalence_tolerance);
    }
    Ok(())
}

fn preset_is_constant(preset: &MetricPreset) -> bool {
    matches!(preset, MetricPreset::Identity | MetricPreset::Diag { .. })
}

fn spec_omega_at(omega: &[f64], grid: TorusGrid, i: usize, y0: f64) -> f64 {
    // Nearest-row sample of ω on the delta line; presets used with deltas
    // are x₁-only, where this is exact.
    let j = ((y0 / (2.0 * std::f64::consts::PI)) * grid.n2() as f64).round() as usize % grid.n2();
    omega[grid.idx(i, j)]
}

fn run_strip(
    spec: &ProblemSpec,
    out_dir: &Path,
    verify: VerifyLevel,
    report: &mut RunReport,
) -> Result<()> {
    let grid = StripGrid::new(spec.solver.grid[0], spec.solver.grid[1])?;
    let mut clock = StageClock { report };
    let bdiag = spec.strip_metric.unwrap_or([1.0, 1.0]);
    if bdiag[0] <= 0.0 || bdiag[1] <= 0.0 {
        return Err(Error::Problem("strip metric entries must be positive".into()));
    }
    let bc = match spec.bc {
        Some(BcSpec::Dirichlet) => BoundaryCondition::Dirichlet,
        Some(BcSpec::Neumann) | None => BoundaryCondition::Neumann,
    };

    let mut sp = StripProblem::<f64>::free(grid, bc)
        .with_metric(bdiag[0], bdiag[1])?
        .with_potential(|x1, x2| spec.potential.eval(x1, x2));
    if let Some([pa1, pa2]) = &spec.magnetic {
        sp = sp.with_magnetic(|x1, x2| pa1.eval(x1, x2), |x1, x2| pa2.eval(x1, x2));
    }
    for d in &spec.delta_lines {
        sp = sp.with_delta_line(d.y0, |x1| d.sigma.eval(x1))?;
    }

    // Sandwich: the conformal factor becomes a potential shift, Robin edge
    // densities and the weight ω⁻².
    if !spec.omega.is_trivially_one() {
        let omega: Vec<f64> = grid.sample(|x1, x2| spec.omega.eval(x1, x2));
        let b = Matrix2::new(bdiag[0], 0.0, 0.0, bdiag[1]);
        let (vt, sb, st) = clock.run("sandwich", || {
            sandwich_reduce_strip(grid, &omega, b, &sp.v)
        })?;
        sp.v = vt;
        if bc == BoundaryCondition::Neumann {
            sp.robin_bottom = Some(sb);
            sp.robin_top = Some(st);
        }
        // The conjugation carries the weight μ = ω⁻².
        sp.mu = Some(omega.iter().map(|w| 1.0 / (w * w)).collect());
    }

    // Route through the reflection: doubled cylinder problem, then the
    // parity sector matching the boundary condition.
    let doubled = clock.run("reflect", || reflect_coefficients(&sp))?;
    let k_grid = uniform_k_grid::<f64>(spec.solver.k_points);
    let cutoff = Cutoff::square(spec.solver.cutoff);
    let basis = match bc {
        BoundaryCondition::Dirichlet => TransverseBasis::Sine,
        BoundaryCondition::Neumann => TransverseBasis::Cosine,
    };
    let bands = clock.run("bands", || {
        let family = doubled_parity_family(&doubled, basis, cutoff)?;
        let rows: crate::error::Result<Vec<Vec<f64>>> = k_grid
            .iter()
            .map(|&kk| {
                let ev = family.fiber(num_complex::Complex::new(kk, 0.0)).eigenvalues()?;
                if ev.len() < spec.solver.n_bands {
                    return Err(Error::Eigensolver(format!(
                        "requested {} bands from a {}-dimensional sector",
                        spec.solver.n_bands,
                        ev.len()
                    )));
                }
                Ok(ev[..spec.solver.n_bands].to_vec())
            })
            .collect();
        Ok(crate::floquet::BandStructure {
            k_grid: k_grid.clone(),
            bands: rows?,
        })
    })?;
    let csv_path = out_dir.join("bands.csv");
    std::fs::write(&csv_path, bands.to_csv())?;
    clock.report.bands_csv = Some(csv_path.display().to_string());

    let (osc, flags) = band_oscillation(&bands);
    let min_osc = osc.iter().copied().fold(f64::MAX, f64::min);
    clock.report.checks.push(CheckResult {
        name: "bands.oscillation-min".into(),
        passed: min_osc > 1e-6 && !flags.iter().any(|&f| f),
        value: min_osc,
        threshold: 1e-6,
    });

    // Persist the doubled coefficients (the cylinder-side artifact).
    crate::io::save_coefficients(&out_dir.join("coeffs.isob"), &doubled.to_coefficients()?)?;

    if verify == VerifyLevel::Full {
        let rep = clock.run("verify.reflection", || {
            verify_reflection_equivalence(&sp, &k_grid, spec.solver.n_bands, cutoff)
        })?;
        clock.report.check(
            "verify.reflection-dirichlet-odd",
            rep.dirichlet_vs_odd,
            spec.solver.reflection_tolerance,
        );
        clock.report.check(
            "verify.reflection-neumann-even",
            rep.neumann_vs_even,
            spec.solver.reflection_tolerance,
        );
        clock.report.check(
            "verify.reflection-union",
            rep.union_vs_full,
            spec.solver.reflection_tolerance,
        );
    }
    Ok(())
}

/// Timing table of repeated runs: median per stage.
pub fn bench(spec: &ProblemSpec, out_dir: &Path, repeat: usize) -> Result<Vec<StageTiming>> {
    let mut per_stage: std::collections::BTreeMap<String, Vec<f64>> = Default::default();
    for r in 0..repeat.max(1) {
        let dir = out_dir.join(format!("bench-{r}"));
        let report = run_pipeline(spec, &dir, VerifyLevel::Fast)?;
        for s in report.stages {
            per_stage.entry(s.stage).or_default().push(s.millis);
        }
    }
    Ok(per_stage
        .into_iter()
        .map(|(stage, mut times)| {
            times.sort_by(|a, b| a.partial_cmp(b).expect("finite timings"));
            let median = times[times.len() / 2];
            StageTiming {
                stage,
                millis: median,
            }
        })
        .collect())
}

/// Built-in problem descriptions, by name.
pub fn builtin_specs() -> Vec<(&'static str, ProblemSpec)> {
    let torus_defaults = |metric: MetricSource| ProblemSpec {
        geometry: Geometry::Torus,
        metric,
        strip_metric: None,
        omega: ScalarPreset::one(),
        potential: ScalarPreset::Zero,
        magnetic: None,
        mu: ScalarPreset::one(),
        delta_lines: Vec::new(),
        bc: None,
        solver: SolverSettings {
            grid: [128, 128],
            cutoff: 8,
            k_points: 33,
            n_bands: 8,
            beltrami_tolerance: 1e-10,
            max_iterations: 200,
            equivalence_tolerance: 1e-4,
            reflection_tolerance: 1e-8,
        },
    };

    let mut out = Vec::new();
    out.push((
        "free-torus",
        torus_defaults(MetricSource::Preset {
            preset: MetricPreset::Identity,
        }),
    ));
    out.push((
        "diag-half-two",
        torus_defaults(MetricSource::Preset {
            preset: MetricPreset::Diag { t: 0.5 },
        }),
    ));
    {
        let mut s = torus_defaults(MetricSource::Preset {
            preset: crate::presets::rotated_anisotropic_suite().remove(0),
        });
        s.potential = ScalarPreset::Fourier {
            terms: vec![crate::presets::Term2::new(1.0, 1, 0, 0.0)],
        };
        // At (128², M = 8) the truncations of the two sides differ at the
        // 1e-3 scale for this deliberately rough metric; the tolerance
        // reflects what this configuration achieves.
        s.solver.equivalence_tolerance = 5e-3;
        out.push(("rotated-anisotropic", s));
    }
    {
        let mut s = torus_defaults(MetricSource::Preset {
            preset: crate::presets::gentle_anisotropic_preset(),
        });
        s.potential = ScalarPreset::Fourier {
            terms: vec![crate::presets::Term2::new(1.0, 1, 0, 0.0)],
        };
        s.magnetic = Some([
            ScalarPreset::Fourier {
                terms: vec![crate::presets::Term2::new(0.1, 0, 1, 0.0)],
            },
            ScalarPreset::Fourier {
                terms: vec![crate::presets::Term2::new(
                    0.1,
                    1,
                    0,
                    -std::f64::consts::FRAC_PI_2,
                )],
            },
        ]);
        s.solver.grid = [256, 256];
        s.solver.cutoff = 12;
        out.push(("gentle-anisotropic", s));
    }
    {
        let s = torus_defaults(MetricSource::Preset {
            preset: crate::presets::mirror_symmetric_preset(),
        });
        out.push(("mirror-symmetric", s));
    }
    {
        let mut s = torus_defaults(MetricSource::Preset {
            preset: MetricPreset::Identity,
        });
        s.omega = ScalarPreset::ExpFourier {
            terms: vec![crate::presets::Term2::new(
                0.1,
                1,
                0,
                -std::f64::consts::FRAC_PI_2,
            )],
        };
        out.push(("sandwich-torus", s));
    }
    {
        let mut s = torus_defaults(MetricSource::Preset {
            preset: MetricPreset::Identity,
        });
        s.delta_lines = vec![DeltaSpec {
            y0: std::f64::consts::PI,
            sigma: SigmaPreset::Constant { value: 1.0 },
        }];
        s.solver.grid = [64, 64];
        out.push(("kronig-penney", s));
    }
    {
        let mut s = torus_defaults(MetricSource::Preset {
            preset: MetricPreset::Identity,
        });
        s.geometry = Geometry::Strip;
        s.strip_metric = Some([1.0, 1.0]);
        s.bc = Some(BcSpec::Dirichlet);
        s.solver.grid = [64, 64];
        out.push(("dirichlet-free-strip", s));
    }
    {
        let mut s = torus_defaults(MetricSource::Preset {
            preset: MetricPreset::Identity,
        });
        s.geometry = Geometry::Strip;
        s.strip_metric = Some([1.0, 1.0]);
        s.bc = Some(BcSpec::Neumann);
        s.potential = ScalarPreset::Fourier {
            terms: vec![crate::presets::Term2::new(1.0, 1, 0, 0.0)],
        };
        s.solver.grid = [64, 64];
        out.push(("neumann-cosine-strip", s));
    }
    {
        let mut s = torus_defaults(MetricSource::Preset {
            preset: MetricPreset::Identity,
        });
        s.geometry = Geometry::Strip;
        s.strip_metric = Some([1.0, 1.0]);
        s.bc = Some(BcSpec::Neumann);
        s.omega = ScalarPreset::StripParabola {
            c0: 1.0,
            c1: 0.2,
            terms: Vec::new(),
        };
        s.solver.grid = [64, 64];
        out.push(("robin-sandwich-strip", s));
    }
    out
}

pub fn builtin(name: &str) -> Option<ProblemSpec> {
    builtin_specs()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| s)
}
