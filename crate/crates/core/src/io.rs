//! Grid-field binary format and JSON sidecars.
//!
//! Layout: magic "ISOB", u32 version = 1, u32 n1, u32 n2,
//! u32 componentCount, then each component as little-endian IEEE-754
//! float64 in row-major grid order. Metric files carry (g11, g12, g22);
//! complex fields carry (re, im).

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::beltrami::IsothermalMap;
use crate::error::{Error, Result};
use crate::grid::TorusGrid;
use crate::metric::{BeltramiCoefficient, MetricField};
use crate::pushforward::{CoefficientSet, DeltaLine, Metric};
use crate::scalar::{cast, to_f64, Scalar};

const MAGIC: &[u8; 4] = b"ISOB";
const VERSION: u32 = 1;

pub struct RawGridFile {
    pub n1: u32,
    pub n2: u32,
    pub components: Vec<Vec<f64>>,
}

pub fn write_raw(path: &Path, n1: u32, n2: u32, components: &[&[f64]]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_u32::<LittleEndian>(VERSION)?;
    w.write_u32::<LittleEndian>(n1)?;
    w.write_u32::<LittleEndian>(n2)?;
    w.write_u32::<LittleEndian>(components.len() as u32)?;
    let expected = (n1 as usize) * (n2 as usize);
    for comp in components {
        if comp.len() != expected {
            return Err(Error::Format(format!(
                "component has {} samples, header says {expected}",
                comp.len()
            )));
        }
        for &v in comp.iter() {
            w.write_f64::<LittleEndian>(v)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_raw(path: &Path) -> Result<RawGridFile> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format(format!(
            "bad magic {:?}, expected {:?}",
            magic, MAGIC
        )));
    }
    let version = r.read_u32::<LittleEndian>()?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let n1 = r.read_u32::<LittleEndian>()?;
    let n2 = r.read_u32::<LittleEndian>()?;
    let count = r.read_u32::<LittleEndian>()?;
    let expected = (n1 as usize) * (n2 as usize);
    let mut components = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let mut comp = Vec::with_capacity(expected);
        for _ in 0..expected {
            comp.push(r.read_f64::<LittleEndian>()?);
        }
        components.push(comp);
    }
    // Trailing bytes mean a corrupt or mislabeled file.
    let mut probe = [0u8; 1];
    if r.read(&mut probe)? != 0 {
        return Err(Error::Format("trailing bytes after declared components".into()));
    }
    Ok(RawGridFile { n1, n2, components })
}

fn fields_to_f64<T: Scalar>(f: &[T]) -> Vec<f64> {
    f.iter().map(|&x| to_f64(x)).collect()
}

fn fields_from_f64<T: Scalar>(f: &[f64]) -> Vec<T> {
    f.iter().map(|&x| cast::<T>(x)).collect()
}

pub fn save_metric<T: Scalar>(path: &Path, metric: &MetricField<T>) -> Result<()> {
    let g = metric.grid();
    write_raw(
        path,
        g.n1() as u32,
        g.n2() as u32,
        &[
            &fields_to_f64(metric.g11()),
            &fields_to_f64(metric.g12()),
            &fields_to_f64(metric.g22()),
        ],
    )
}

pub fn load_metric<T: Scalar>(path: &Path) -> Result<MetricField<T>> {
    let raw = read_raw(path)?;
    if raw.components.len() != 3 {
        return Err(Error::Format(format!(
            "metric file needs 3 components, found {}",
            raw.components.len()
        )));
    }
    let grid = TorusGrid::new(raw.n1 as usize, raw.n2 as usize)?;
    MetricField::new(
        grid,
        fields_from_f64(&raw.components[0]),
        fields_from_f64(&raw.components[1]),
        fields_from_f64(&raw.components[2]),
    )
}

pub fn save_beltrami<T: Scalar>(path: &Path, q: &BeltramiCoefficient<T>) -> Result<()> {
    let g = q.grid();
    let re: Vec<f64> = q.values().iter().map(|c| to_f64(c.re)).collect();
    let im: Vec<f64> = q.values().iter().map(|c| to_f64(c.im)).collect();
    write_raw(path, g.n1() as u32, g.n2() as u32, &[&re, &im])
}

pub fn load_beltrami<T: Scalar>(path: &Path) -> Result<BeltramiCoefficient<T>> {
    let raw = read_raw(path)?;
    if raw.components.len() != 2 {
        return Err(Error::Format(format!(
            "complex field file needs 2 components, found {}",
            raw.components.len()
        )));
    }
    let grid = TorusGrid::new(raw.n1 as usize, raw.n2 as usize)?;
    let q: Vec<Complex<T>> = raw.components[0]
        .iter()
        .zip(raw.components[1].iter())
        .map(|(&re, &im)| Complex::new(cast::<T>(re), cast::<T>(im)))
        .collect();
    BeltramiCoefficient::new(grid, q)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MapSidecar {
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
    pub kappa: [f64; 2],
    pub residual_l2: f64,
    pub grid: [usize; 2],
}

/// Writes the map's Fourier table (Re p̂, Im p̂) plus a JSON sidecar next to
/// it (same stem, `.json` extension).
pub fn save_map<T: Scalar>(path: &Path, map: &IsothermalMap<T>) -> Result<()> {
    let g = map.grid();
    let re: Vec<f64> = map.p_hat().iter().map(|c| to_f64(c.re)).collect();
    let im: Vec<f64> = map.p_hat().iter().map(|c| to_f64(c.im)).collect();
    write_raw(path, g.n1() as u32, g.n2() as u32, &[&re, &im])?;
    let sidecar = MapSidecar {
        alpha: [to_f64(map.alpha().re), to_f64(map.alpha().im)],
        beta: [to_f64(map.beta().re), to_f64(map.beta().im)],
        kappa: [to_f64(map.kappa().re), to_f64(map.kappa().im)],
        residual_l2: to_f64(map.residual_l2()),
        grid: [g.n1(), g.n2()],
    };
    let json = serde_json::to_string_pretty(&sidecar)?;
    std::fs::write(sidecar_path(path), json)?;
    Ok(())
}

pub fn load_map<T: Scalar>(path: &Path) -> Result<IsothermalMap<T>> {
    let raw = read_raw(path)?;
    if raw.components.len() != 2 {
        return Err(Error::Format(format!(
            "map file needs 2 components, found {}",
            raw.components.len()
        )));
    }
    let side: MapSidecar = serde_json::from_str(&std::fs::read_to_string(sidecar_path(path))?)?;
    let grid = TorusGrid::new(raw.n1 as usize, raw.n2 as usize)?;
    let p_hat: Vec<Complex<T>> = raw.components[0]
        .iter()
        .zip(raw.components[1].iter())
        .map(|(&re, &im)| Complex::new(cast::<T>(re), cast::<T>(im)))
        .collect();
    IsothermalMap::from_parts(
        grid,
        Complex::new(cast(side.alpha[0]), cast(side.alpha[1])),
        Complex::new(cast(side.beta[0]), cast(side.beta[1])),
        p_hat,
        cast(side.residual_l2),
    )
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DeltaSidecar {
    pub y0: f64,
    pub sigma: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CoefficientSidecar {
    /// Constant metric [[a11, a12], [a12, a22]]; absent for variable metrics
    /// (those are stored as separate metric files).
    pub a_matrix: Option<[[f64; 2]; 2]>,
    pub delta_lines: Vec<DeltaSidecar>,
}

/// Writes (a1, a2, V, mu) plus the JSON sidecar with the constant metric
/// and delta data.
pub fn save_coefficients<T: Scalar>(path: &Path, coeffs: &CoefficientSet<T>) -> Result<()> {
    let g = coeffs.grid();
    write_raw(
        path,
        g.n1() as u32,
        g.n2() as u32,
        &[
            &fields_to_f64(&coeffs.a1),
            &fields_to_f64(&coeffs.a2),
            &fields_to_f64(&coeffs.v),
            &fields_to_f64(&coeffs.mu),
        ],
    )?;
    let a_matrix = match &coeffs.metric {
        Metric::Constant(a) => Some([
            [to_f64(a[(0, 0)]), to_f64(a[(0, 1)])],
            [to_f64(a[(1, 0)]), to_f64(a[(1, 1)])],
        ]),
        Metric::Field(_) => None,
    };
    let sidecar = CoefficientSidecar {
        a_matrix,
        delta_lines: coeffs
            .delta_lines
            .iter()
            .map(|l| DeltaSidecar {
                y0: to_f64(l.y0),
                sigma: fields_to_f64(&l.sigma),
            })
            .collect(),
    };
    std::fs::write(sidecar_path(path), serde_json::to_string_pretty(&sidecar)?)?;
    Ok(())
}

pub fn load_coefficients<T: Scalar>(path: &Path) -> Result<CoefficientSet<T>> {
    let raw = read_raw(path)?;
    if raw.components.len() != 4 {
        return Err(Error::Format(format!(
            "coefficient file needs 4 components, found {}",
            raw.components.len()
        )));
    }
    let side: CoefficientSidecar =
        serde_json::from_str(&std::fs::read_to_string(sidecar_path(path))?)?;
    let grid = TorusGrid::new(raw.n1 as usize, raw.n2 as usize)?;
    let metric = match side.a_matrix {
        Some(a) => Metric::Constant(nalgebra::Matrix2::new(
            cast::<T>(a[0][0]),
            cast::<T>(a[0][1]),
            cast::<T>(a[1][0]),
            cast::<T>(a[1][1]),
        )),
        None => Metric::identity(),
    };
    let delta_lines = side
        .delta_lines
        .into_iter()
        .map(|l| DeltaLine {
            y0: cast::<T>(l.y0),
            sigma: fields_from_f64(&l.sigma),
        })
        .collect();
    CoefficientSet::new(
        grid,
        metric,
        fields_from_f64(&raw.components[0]),
        fields_from_f64(&raw.components[1]),
        fields_from_f64(&raw.components[2]),
        fields_from_f64(&raw.components[3]),
        delta_lines,
    )
}

fn sidecar_path(path: &Path) -> std::path::PathBuf {
    path.with_extension("json")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_layout_is_stable() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.isob");
        let g = TorusGrid::new(8, 8).unwrap();
        let metric = MetricField::<f64>::constant(g, 0.5, 0.0, 2.0);
        save_metric(&path, &metric).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[0..4], b"ISOB");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 8);
        assert_eq!(u32::from_le_bytes(bytes[12..16].try_into().unwrap()), 8);
        assert_eq!(u32::from_le_bytes(bytes[16..20].try_into().unwrap()), 3);
        assert_eq!(bytes.len(), 20 + 3 * 64 * 8);
        // First value of g11 is 0.5, little-endian f64.
        assert_eq!(
            f64::from_le_bytes(bytes[20..28].try_into().unwrap()),
            0.5
        );
    }

    #[test]
    fn rejects_bad_magic_and_truncation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.isob");
        std::fs::write(&path, b"NOPE").unwrap();
        assert!(read_raw(&path).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]
        #[test]
        fn metric_round_trips_bit_exact(a in 0.2f64..3.0, b in -0.5f64..0.5) {
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("m.isob");
            let g = TorusGrid::new(8, 16).unwrap();
            let metric = MetricField::<f64>::from_fn(g, |x1, x2| {
                (a + 0.1 * x1.sin(), b * x2.cos(), a + 0.2)
            });
            save_metric(&path, &metric).unwrap();
            let back = load_metric::<f64>(&path).unwrap();
            prop_assert_eq!(metric.g11(), back.g11());
            prop_assert_eq!(metric.g12(), back.g12());
            prop_assert_eq!(metric.g22(), back.g22());
        }
    }

    #[test]
    fn map_round_trip_preserves_evaluation() {
        use crate::beltrami::{solve_periodic_beltrami, SolverConfig};
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("map.isob");
        let q = crate::beltrami::tests::smooth_q(TorusGrid::new(16, 16).unwrap(), 0.4);
        let map = solve_periodic_beltrami(&q, &SolverConfig::default()).unwrap();
        save_map(&path, &map).unwrap();
        assert!(dir.path().join("map.json").exists());
        let back = load_map::<f64>(&path).unwrap();
        assert_eq!(map.alpha(), back.alpha());
        let ev_a = crate::isomap::MapEvaluator::new(&map);
        let ev_b = crate::isomap::MapEvaluator::new(&back);
        let z = Complex::new(1.2, 0.7);
        assert!((ev_a.evaluate(z) - ev_b.evaluate(z)).norm() < 1e-15);
    }
}
