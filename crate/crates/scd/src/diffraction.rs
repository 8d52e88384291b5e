//! Numerical spectral estimation and analytic predictors.
//!
//! The estimator throughout is the volume-averaged Fourier–Bohr coefficient
//!
//! ```text
//! A_r(k) = r^-3 * sum_{y in Lambda ∩ C_r} exp(-2*pi*i k.y),
//! ```
//!
//! whose squared modulus reproduces the Bragg atoms of the exactly solvable
//! lattice cases. Sums are Neumaier-compensated in a fixed point order, so
//! results are reproducible bit-for-bit and independent of the parallel
//! schedule (parallelism is over `k` only).
//!
//! Analytic predictors cover the cylinder support radii, the pure-point
//! axis spectrum, and the discrete support of fully periodic configurations.
//! The axis peaks carry two weights: `layer_weight = dens2 * dens3` and
//! `estimator_weight = dens3^2`; they agree exactly when `c3 = 1` and the
//! reported spectra keep both so the normalization question stays visible.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::Rotation3;
use crate::lattice::{dual_lattice, Lattice2};
use crate::sum::KahanComplex;
use crate::tiling::{
    detect_full_periodicity, detect_screw_symmetry, PointCloud, ScrewCheck, TilingConfig,
};
use crate::vec::{Mat2, Vec2, Vec3};

#[derive(Debug, Error)]
pub enum DiffractionError {
    #[error("operation requires a nonempty point cloud")]
    EmptyCloud,
    #[error("autocorrelation window {window} exceeds r/2 = {limit}")]
    WindowTooLarge { window: f64, limit: f64 },
    #[error("annulus width {width} is not resolved by grid step {step} (need width >= 2*step)")]
    BinningUnresolved { width: f64, step: f64 },
    #[error("configuration is not fully periodic")]
    NotPeriodic,
}

/// One sampled point of the spectrum estimator.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpectrumSample {
    pub k: Vec3,
    pub re: f64,
    pub im: f64,
    pub intensity: f64,
    pub r: f64,
}

/// Raw compensated exponential sum (no `r^-3` normalization).
fn raw_sum(points: &[Vec3], k: Vec3) -> (f64, f64) {
    let mut acc = KahanComplex::new();
    for p in points {
        let phase = -2.0 * std::f64::consts::PI * k.dot(*p);
        let (s, c) = phase.sin_cos();
        acc.add(c, s);
    }
    acc.total()
}

/// Fourier–Bohr coefficient `A_r(k)`.
pub fn fourier_bohr(cloud: &PointCloud, k: Vec3) -> Result<(f64, f64), DiffractionError> {
    if cloud.is_empty() {
        return Err(DiffractionError::EmptyCloud);
    }
    Ok(amplitude(cloud, k))
}

fn amplitude(cloud: &PointCloud, k: Vec3) -> (f64, f64) {
    let (re, im) = raw_sum(&cloud.points, k);
    let vol = cloud.r * cloud.r * cloud.r;
    (re / vol, im / vol)
}

/// Batch evaluation of `|A_r|^2` over a k-grid, parallel over `k` with
/// results identical to serial evaluation.
pub fn intensity_map(cloud: &PointCloud, ks: &[Vec3]) -> Vec<SpectrumSample> {
    ks.par_iter()
        .map(|&k| {
            let (re, im) = amplitude(cloud, k);
            SpectrumSample {
                k,
                re,
                im,
                intensity: re * re + im * im,
                r: cloud.r,
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Autocorrelation
// ---------------------------------------------------------------------------

/// Difference-vector histogram with volume-normalized weights.
#[derive(Debug, Clone)]
pub struct AutocorrHistogram {
    pub window: f64,
    pub r: f64,
    /// Sorted `(difference, multiplicity / r^3)` entries.
    pub entries: Vec<(Vec3, f64)>,
}

impl AutocorrHistogram {
    /// Weight at a difference vector, zero if absent.
    pub fn weight_at(&self, d: Vec3, tol: f64) -> f64 {
        self.entries
            .iter()
            .filter(|(v, _)| (*v - d).norm() <= tol)
            .map(|(_, w)| w)
            .sum()
    }
}

/// Histogram of difference vectors `x - y` with `|x - y| <= window`.
pub fn autocorr_histogram(
    cloud: &PointCloud,
    window: f64,
) -> Result<AutocorrHistogram, DiffractionError> {
    if window > cloud.r / 2.0 {
        return Err(DiffractionError::WindowTooLarge {
            window,
            limit: cloud.r / 2.0,
        });
    }
    // hash points into cells of the window size; only neighboring cells can
    // hold partners
    let cell = window.max(1e-9);
    let key = |p: Vec3| {
        (
            (p.x / cell).floor() as i64,
            (p.y / cell).floor() as i64,
            (p.z / cell).floor() as i64,
        )
    };
    let mut cells: std::collections::HashMap<(i64, i64, i64), Vec<usize>> =
        std::collections::HashMap::new();
    for (i, p) in cloud.points.iter().enumerate() {
        cells.entry(key(*p)).or_default().push(i);
    }
    let quant = 1e7;
    let mut counts: std::collections::HashMap<(i64, i64, i64), usize> =
        std::collections::HashMap::new();
    for p in &cloud.points {
        let (cx, cy, cz) = key(*p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(others) = cells.get(&(cx + dx, cy + dy, cz + dz)) {
                        for &j in others {
                            let d = *p - cloud.points[j];
                            if d.norm() <= window {
                                let qk = (
                                    (d.x * quant).round() as i64,
                                    (d.y * quant).round() as i64,
                                    (d.z * quant).round() as i64,
                                );
                                *counts.entry(qk).or_insert(0) += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    let vol = cloud.r * cloud.r * cloud.r;
    let mut entries: Vec<(Vec3, f64)> = counts
        .into_iter()
        .map(|((x, y, z), c)| {
            (
                Vec3::new(x as f64 / quant, y as f64 / quant, z as f64 / quant),
                c as f64 / vol,
            )
        })
        .collect();
    entries.sort_by(|a, b| {
        (a.0.x, a.0.y, a.0.z)
            .partial_cmp(&(b.0.x, b.0.y, b.0.z))
            .unwrap()
    });
    Ok(AutocorrHistogram {
        window,
        r: cloud.r,
        entries,
    })
}

// ---------------------------------------------------------------------------
// Analytic predictors
// ---------------------------------------------------------------------------

/// An axis Bragg peak at `x3 = n / c3`.
///
/// Two normalization conventions for the atom are reported side by side:
/// `layer_weight = dens2 * dens3` arises when the vertical sum is counted
/// per layer, `estimator_weight = dens3^2` is what the volume-averaged
/// coefficient converges to. They agree exactly when `c3 = 1`; the bcc
/// oracle arbitrates in favor of the estimator convention (see the `bcc`
/// verify suite).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AxisPeak {
    pub n: i64,
    pub position: f64,
    /// `dens2(Gamma) * dens3(Lambda)`, the per-layer-count normalization.
    pub layer_weight: f64,
    /// `dens3(Lambda)^2`, the atom the volume-averaged estimator converges to.
    pub estimator_weight: f64,
}

/// Planar densities for a parameter set: `(dens2, dens3)`.
pub fn densities(params: &crate::geometry::TileParams) -> (f64, f64) {
    let dens2 = 1.0 / (params.a_len * params.b2());
    (dens2, dens2 / params.c3)
}

/// The dual lattice of the layer lattice `Z a + Z b` (with `a_len` scaling).
pub fn layer_dual(params: &crate::geometry::TileParams) -> Lattice2 {
    let g = Lattice2::from_basis(params.a_planar(), params.b_planar())
        .expect("valid params give a nonsingular lattice");
    dual_lattice(&g).expect("nonsingular").as_lattice()
}

/// All dual-lattice vectors with norm <= cutoff.
pub fn dual_points_within(dual: &Lattice2, cutoff: f64) -> Vec<Vec2> {
    let [u, v] = dual.basis();
    let det = u.perp_dot(v).abs();
    let imax = (cutoff * v.norm() / det).ceil() as i64 + 1;
    let jmax = (cutoff * u.norm() / det).ceil() as i64 + 1;
    let mut out = Vec::new();
    for i in -imax..=imax {
        for j in -jmax..=jmax {
            let w = u * (i as f64) + v * (j as f64);
            if w.norm() <= cutoff + 1e-12 {
                out.push(w);
            }
        }
    }
    out
}

/// Sorted unique cylinder radii: norms of dual-lattice vectors up to cutoff.
pub fn predicted_support(params: &crate::geometry::TileParams, cutoff: f64) -> Vec<f64> {
    let dual = layer_dual(params);
    let mut radii: Vec<f64> = dual_points_within(&dual, cutoff)
        .into_iter()
        .map(|w| w.norm())
        .collect();
    radii.sort_by(|a, b| a.total_cmp(b));
    radii.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    radii
}

/// For commensurate angles the support is a finite union of lines: the
/// planar points `⋃_j R^j Gamma*` up to cutoff.
pub fn predicted_commensurate_lines(
    params: &crate::geometry::TileParams,
    cutoff: f64,
) -> Option<Vec<Vec2>> {
    let order = params.angle.rotation_order()?;
    let dual = layer_dual(params);
    let mut pts: Vec<Vec2> = Vec::new();
    for j in 0..order {
        let rot = crate::geometry::rotation_power(&params.angle, j);
        for w in dual_points_within(&dual, cutoff) {
            let rw = rot.apply_planar(w);
            if !pts.iter().any(|p| (*p - rw).norm() < 1e-9) {
                pts.push(rw);
            }
        }
    }
    pts.sort_by(|a, b| (a.x, a.y).partial_cmp(&(b.x, b.y)).unwrap());
    Some(pts)
}

/// Axis peaks for `n = 0..=n_max`.
pub fn predicted_axis_spectrum(params: &crate::geometry::TileParams, n_max: i64) -> Vec<AxisPeak> {
    let (dens2, dens3) = densities(params);
    (0..=n_max)
        .map(|n| AxisPeak {
            n,
            position: n as f64 / params.c3,
            layer_weight: dens2 * dens3,
            estimator_weight: dens3 * dens3,
        })
        .collect()
}

/// A predicted Bragg peak of a fully periodic configuration.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PeriodicSupportPoint {
    pub k: Vec3,
    pub intensity: f64,
}

/// Discrete support (with structure-factor intensities) of a fully periodic
/// configuration: points of `(⋃_j R^j Gamma*) × (c3 k)^-1 Z` whose phase sum
/// over one period survives.
pub fn predicted_periodic_spectrum(
    config: &TilingConfig,
    planar_cutoff: f64,
    k3_max: f64,
) -> Result<Vec<PeriodicSupportPoint>, DiffractionError> {
    let report = detect_full_periodicity(config);
    if !report.periodic {
        return Err(DiffractionError::NotPeriodic);
    }
    let k = report.k.expect("periodic report carries k");
    let params = &config.params;
    let (dens2, _) = densities(params);
    let c3 = params.c3;
    let z = config.reference_point();
    let offsets = config.shift_offsets(0, k - 1);
    let dual = layer_dual(params);
    // planar support candidates: ⋃_j R^j Gamma*
    let mut planar: Vec<Vec2> = Vec::new();
    for j in 0..k {
        let rot = crate::geometry::rotation_power(&params.angle, j);
        for w in dual_points_within(&dual, planar_cutoff) {
            let rw = rot.apply_planar(w);
            if !planar.iter().any(|p| (*p - rw).norm() < 1e-9) {
                planar.push(rw);
            }
        }
    }
    let n_max = (k3_max * c3 * k as f64).floor() as i64;
    let mut out = Vec::new();
    for w in &planar {
        for n in -n_max..=n_max {
            let x3 = n as f64 / (c3 * k as f64);
            // phase sum over one vertical period; only layers whose rotated
            // dual contains w contribute
            let mut re = 0.0;
            let mut im = 0.0;
            for j in 0..k {
                let rot = crate::geometry::rotation_power(&params.angle, j);
                let basis = Mat2::from_cols(
                    rot.apply_planar(dual.basis()[0]),
                    rot.apply_planar(dual.basis()[1]),
                );
                let c = basis.solve(*w);
                let on_dual = (c.x - c.x.round()).abs() < 1e-9 && (c.y - c.y.round()).abs() < 1e-9;
                if !on_dual {
                    continue;
                }
                let off = offsets[&j] + rot.apply(z).planar();
                let phase = -2.0 * std::f64::consts::PI * (w.dot(off) + x3 * (j as f64 * c3 + z.z));
                re += phase.cos();
                im += phase.sin();
            }
            let amp = dens2 / (c3 * k as f64) * (re * re + im * im).sqrt();
            let intensity = amp * amp;
            if intensity > 1e-12 {
                out.push(PeriodicSupportPoint {
                    k: Vec3::new(w.x, w.y, x3),
                    intensity,
                });
            }
        }
    }
    out.sort_by(|a, b| {
        (a.k.z, a.k.x, a.k.y)
            .partial_cmp(&(b.k.z, b.k.x, b.k.y))
            .unwrap()
    });
    Ok(out)
}

// ---------------------------------------------------------------------------
// Spectral classification
// ---------------------------------------------------------------------------

/// Spectral type of one region of reciprocal space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralClass {
    PurePoint,
    SingularContinuous,
    /// Singular (no absolutely continuous part), finer type undetermined.
    SingularUndetermined,
    PurePointDiscrete,
    Null,
}

/// Classification of the three support regions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SpectralClassification {
    pub axis: SpectralClass,
    pub cylinders_off_axis: SpectralClass,
    pub off_support: SpectralClass,
    pub fully_periodic: bool,
}

/// Classify the diffraction spectrum by region.
///
/// The axis is always pure point. Off-axis cylinder support is singular
/// continuous when the tiling is incommensurate and either screw-invariant
/// for some power, or declared repetitive with `cos(phi) = p/q`, `q` odd;
/// otherwise it is singular of undetermined type. Fully periodic
/// configurations get a uniformly discrete pure point spectrum.
pub fn spectral_classification(config: &TilingConfig) -> SpectralClassification {
    if detect_full_periodicity(config).periodic {
        return SpectralClassification {
            axis: SpectralClass::PurePointDiscrete,
            cylinders_off_axis: SpectralClass::PurePointDiscrete,
            off_support: SpectralClass::Null,
            fully_periodic: true,
        };
    }
    let incommensurate = !config.params.angle.is_commensurate();
    let screw = (1..=12).any(|m| detect_screw_symmetry(config, m) == ScrewCheck::Holds);
    let q_odd_repetitive =
        config.repetitive && matches!(config.params.angle.exact_cos(), Some((_, q)) if q % 2 == 1);
    let cylinders = if incommensurate && (screw || q_odd_repetitive) {
        SpectralClass::SingularContinuous
    } else {
        SpectralClass::SingularUndetermined
    };
    SpectralClassification {
        axis: SpectralClass::PurePoint,
        cylinders_off_axis: cylinders,
        off_support: SpectralClass::Null,
        fully_periodic: false,
    }
}

// ---------------------------------------------------------------------------
// Numerical probes
// ---------------------------------------------------------------------------

/// Intensity decay across box sizes at fixed sample points.
#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    /// `(r, max intensity over samples)` per cloud, in input order.
    pub max_per_r: Vec<(f64, f64)>,
    /// Last max divided by first max.
    pub decay_ratio: f64,
    pub samples: usize,
}

/// Probe for Bragg peaks: evaluate intensities at the same `k` samples on
/// clouds of increasing size. Surviving peaks keep their intensity; the
/// continuous background decays.
pub fn no_bragg_probe(clouds: &[&PointCloud], ks: &[Vec3]) -> DecayReport {
    let mut max_per_r = Vec::with_capacity(clouds.len());
    for cloud in clouds {
        let max = intensity_map(cloud, ks)
            .iter()
            .map(|s| s.intensity)
            .fold(0.0f64, f64::max);
        max_per_r.push((cloud.r, max));
    }
    let decay_ratio = match (max_per_r.first(), max_per_r.last()) {
        (Some((_, first)), Some((_, last))) if *first > 0.0 => last / first,
        _ => f64::NAN,
    };
    DecayReport {
        max_per_r,
        decay_ratio,
        samples: ks.len(),
    }
}

/// Integrated intensity per annulus on the plane at height `k3`.
#[derive(Debug, Clone, Serialize)]
pub struct ShellMassProfile {
    pub k3: f64,
    pub annulus_width: f64,
    pub grid_step: f64,
    /// `(r_bin_lo, r_bin_hi, mass)`.
    pub bins: Vec<(f64, f64, f64)>,
}

impl ShellMassProfile {
    pub fn total_mass(&self) -> f64 {
        self.bins.iter().map(|b| b.2).sum()
    }

    /// Sum of masses of bins containing any of the given radii.
    pub fn mass_on_radii(&self, radii: &[f64]) -> f64 {
        self.bins
            .iter()
            .filter(|(lo, hi, _)| radii.iter().any(|r| *r >= *lo && *r < *hi))
            .map(|b| b.2)
            .sum()
    }
}

/// Integrate `|A_r|^2` over annuli of the given width on a planar grid at
/// height `k3`.
pub fn shell_mass_profile(
    cloud: &PointCloud,
    k3: f64,
    annulus_width: f64,
    max_radius: f64,
    grid_step: f64,
) -> Result<ShellMassProfile, DiffractionError> {
    if annulus_width < 2.0 * grid_step {
        return Err(DiffractionError::BinningUnresolved {
            width: annulus_width,
            step: grid_step,
        });
    }
    let n = (max_radius / grid_step).ceil() as i64;
    let mut ks = Vec::new();
    for i in -n..=n {
        for j in -n..=n {
            let kx = i as f64 * grid_step;
            let ky = j as f64 * grid_step;
            if (kx * kx + ky * ky).sqrt() <= max_radius {
                ks.push(Vec3::new(kx, ky, k3));
            }
        }
    }
    let n_bins = (max_radius / annulus_width).ceil() as usize;
    let mut bins = vec![0.0f64; n_bins];
    if !cloud.is_empty() {
        let samples = intensity_map(cloud, &ks);
        let cell = grid_step * grid_step;
        for s in &samples {
            let rad = s.k.planar().norm();
            let idx = ((rad / annulus_width).floor() as usize).min(n_bins - 1);
            bins[idx] += s.intensity * cell;
        }
    }
    Ok(ShellMassProfile {
        k3,
        annulus_width,
        grid_step,
        bins: bins
            .into_iter()
            .enumerate()
            .map(|(i, m)| (i as f64 * annulus_width, (i + 1) as f64 * annulus_width, m))
            .collect(),
    })
}

/// Max over samples of `|A(R.cloud, k) - A(cloud, R^-1 k)|`: a pure
/// floating-point identity on finite sums, so the deviation stays at
/// rounding level for any orthogonal `R`.
pub fn rotation_equivariance_check(cloud: &PointCloud, rotation: &Rotation3, ks: &[Vec3]) -> f64 {
    let rotated_points: Vec<Vec3> = cloud.points.iter().map(|p| rotation.apply(*p)).collect();
    let rotated = PointCloud::from_points(rotated_points, cloud.layers.clone(), cloud.r);
    let inv = rotation.transpose();
    let mut max_dev = 0.0f64;
    for &k in ks {
        let (re1, im1) = amplitude(&rotated, k);
        let (re2, im2) = amplitude(cloud, inv.apply(k));
        let dev = ((re1 - re2).powi(2) + (im1 - im2).powi(2)).sqrt();
        max_dev = max_dev.max(dev);
    }
    max_dev
}
