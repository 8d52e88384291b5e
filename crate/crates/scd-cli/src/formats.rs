//! File formats: point clouds (XYZ / JSON), spectrum CSV, radial profiles,
//! prediction and certificate reports.
//!
//! Floating-point columns are written with 17 significant digits so every
//! double round-trips exactly through its text form.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use scd::diffraction::{ShellMassProfile, SpectrumSample};
use scd::tiling::{PointCloud, TilingConfig};
use scd::vec::Vec3;

/// 17-significant-digit rendering (round-trip exact for f64).
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

// ---------------------------------------------------------------------------
// Point clouds
// ---------------------------------------------------------------------------

pub fn write_cloud_xyz(path: &Path, cloud: &PointCloud) -> Result<()> {
    let mut out = String::new();
    out.push_str("# scd point cloud schema_version=1\n");
    out.push_str(&format!(
        "# r={} count={} density={}\n",
        fmt(cloud.r),
        cloud.len(),
        fmt(cloud.density())
    ));
    for (p, m) in cloud.points.iter().zip(cloud.layers.iter()) {
        out.push_str(&format!("{} {} {} {}\n", fmt(p.x), fmt(p.y), fmt(p.z), m));
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CloudJson {
    pub schema_version: u32,
    pub r: f64,
    pub count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<TilingConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Rows `[x, y, z, layer]`.
    pub points: Vec<[f64; 4]>,
}

pub fn write_cloud_json(
    path: &Path,
    cloud: &PointCloud,
    config: Option<&TilingConfig>,
    seed: Option<u64>,
) -> Result<()> {
    let doc = CloudJson {
        schema_version: 1,
        r: cloud.r,
        count: cloud.len(),
        config: config.cloned(),
        seed,
        points: cloud
            .points
            .iter()
            .zip(cloud.layers.iter())
            .map(|(p, m)| [p.x, p.y, p.z, *m as f64])
            .collect(),
    };
    let text = serde_json::to_string_pretty(&doc)?;
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Read a cloud from either format (sniffed by leading character).
pub fn read_cloud(path: &Path) -> Result<PointCloud> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.trim_start().starts_with('{') {
        let doc: CloudJson = serde_json::from_str(&text)
            .with_context(|| format!("parsing JSON cloud {}", path.display()))?;
        let mut points = Vec::with_capacity(doc.points.len());
        let mut layers = Vec::with_capacity(doc.points.len());
        for row in &doc.points {
            points.push(Vec3::new(row[0], row[1], row[2]));
            layers.push(row[3] as i64);
        }
        return Ok(PointCloud::from_points(points, layers, doc.r));
    }
    let mut r = None;
    let mut points = Vec::new();
    let mut layers = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            for tok in rest.split_whitespace() {
                if let Some(v) = tok.strip_prefix("r=") {
                    r = Some(v.parse::<f64>().context("parsing r= header")?);
                }
            }
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 4 {
            bail!(
                "{}:{}: expected 4 columns (x y z layer), got {}",
                path.display(),
                lineno + 1,
                cols.len()
            );
        }
        points.push(Vec3::new(
            cols[0].parse()?,
            cols[1].parse()?,
            cols[2].parse()?,
        ));
        layers.push(cols[3].parse()?);
    }
    let r = r.ok_or_else(|| anyhow!("{}: missing '# r=' header line", path.display()))?;
    Ok(PointCloud::from_points(points, layers, r))
}

// ---------------------------------------------------------------------------
// Spectra
// ---------------------------------------------------------------------------

pub fn write_spectrum_csv(path: &Path, samples: &[SpectrumSample]) -> Result<()> {
    let mut out = String::from("kx,ky,kz,re,im,intensity,r\n");
    for s in samples {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fmt(s.k.x),
            fmt(s.k.y),
            fmt(s.k.z),
            fmt(s.re),
            fmt(s.im),
            fmt(s.intensity),
            fmt(s.r)
        ));
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

pub fn write_profile_csv(path: &Path, profile: &ShellMassProfile) -> Result<()> {
    let mut out = String::from("r_bin_lo,r_bin_hi,mass\n");
    for (lo, hi, mass) in &profile.bins {
        out.push_str(&format!("{},{},{}\n", fmt(*lo), fmt(*hi), fmt(*mass)));
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

// ---------------------------------------------------------------------------
// Grid specifications
// ---------------------------------------------------------------------------

/// k-grid specification for `diffract`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GridSpec {
    /// Explicit list of k-vectors.
    Points { points: Vec<[f64; 3]> },
    /// Planar grid at height `k3`: `kx, ky in [-extent, extent]` stepped.
    Slice { k3: f64, extent: f64, step: f64 },
    /// Axis path `k = (0, 0, t)`, `t in [0, max]` stepped.
    Axis { max: f64, step: f64 },
    /// All integer vectors with `|k|_inf <= max`.
    Integer { max: i64 },
}

impl GridSpec {
    pub fn build(&self) -> Vec<Vec3> {
        match self {
            GridSpec::Points { points } => {
                points.iter().map(|p| Vec3::new(p[0], p[1], p[2])).collect()
            }
            GridSpec::Slice { k3, extent, step } => {
                let n = (extent / step).floor() as i64;
                let mut ks = Vec::new();
                for i in -n..=n {
                    for j in -n..=n {
                        ks.push(Vec3::new(i as f64 * step, j as f64 * step, *k3));
                    }
                }
                ks
            }
            GridSpec::Axis { max, step } => {
                let n = (max / step).floor() as i64;
                (0..=n)
                    .map(|i| Vec3::new(0.0, 0.0, i as f64 * step))
                    .collect()
            }
            GridSpec::Integer { max } => {
                let mut ks = Vec::new();
                for x in -max..=*max {
                    for y in -max..=*max {
                        for z in -max..=*max {
                            ks.push(Vec3::new(x as f64, y as f64, z as f64));
                        }
                    }
                }
                ks
            }
        }
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path, what: &str) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {} {}", what, path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
