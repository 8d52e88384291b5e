//! Named verification suites.
//!
//! Each suite re-derives one of the headline results on a fixed desk-scale
//! configuration and reports pass/fail with its metrics. The CLI `verify`
//! subcommand runs them; the acceptance test target asserts them.

use serde::Serialize;

use crate::angle::AngleSpec;
use crate::diffraction::{
    densities, fourier_bohr, intensity_map, no_bragg_probe, predicted_periodic_spectrum,
    predicted_support, rotation_equivariance_check, shell_mass_profile,
};
use crate::geometry::{build_tile, rotation_power, tile_volume, TileParams};
use crate::lattice::{
    aperiodicity_certificate, coincidence_solve, CoincidenceInput, CoincidenceOutcome,
};
use crate::tiling::{extract_points, ShiftSequence, TilingConfig};
use crate::vec::Vec3;

/// Machine-readable outcome of one suite.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub pass: bool,
    pub metrics: Vec<Metric>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    /// `"<="` or `">="`: how `value` compares against `threshold` to pass.
    pub relation: String,
    pub pass: bool,
}

impl SuiteReport {
    fn new(suite: &str) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            pass: true,
            metrics: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check_le(&mut self, name: &str, value: f64, threshold: f64) -> bool {
        let pass = value <= threshold;
        self.metrics.push(Metric {
            name: name.to_string(),
            value,
            threshold,
            relation: "<=".to_string(),
            pass,
        });
        self.pass &= pass;
        pass
    }

    fn check_ge(&mut self, name: &str, value: f64, threshold: f64) -> bool {
        let pass = value >= threshold;
        self.metrics.push(Metric {
            name: name.to_string(),
            value,
            threshold,
            relation: ">=".to_string(),
            pass,
        });
        self.pass &= pass;
        pass
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

/// Valid suite names, in the order `verify all` runs them.
pub const SUITES: [&str; 7] = [
    "aperiodicity",
    "equivariance",
    "bcc",
    "axis",
    "support",
    "coincidence",
    "periodic",
];

/// Run a named suite.
pub fn run_suite(name: &str) -> Option<SuiteReport> {
    match name {
        "aperiodicity" => Some(suite_aperiodicity()),
        "equivariance" => Some(suite_equivariance()),
        "bcc" => Some(suite_bcc()),
        "axis" => Some(suite_axis()),
        "support" => Some(suite_support()),
        "coincidence" => Some(suite_coincidence()),
        "periodic" => Some(suite_periodic()),
        _ => None,
    }
}

/// The incommensurate reference configuration: `cos(phi) = 3/5`, unit cell
/// heights, zero shifts (screw-invariant).
pub fn config_345() -> TilingConfig {
    let params = TileParams::new(0.5, 1.0, AngleSpec::rational_cos(3, 5).unwrap(), 1.0).unwrap();
    TilingConfig::new(params, ShiftSequence::Zero)
}

/// Quarter-turn unit config whose point set is a translate of `Z^3`.
pub fn config_z3() -> TilingConfig {
    let params = TileParams::new(0.5, 1.0, AngleSpec::rational_pi(1, 2).unwrap(), 1.0).unwrap();
    TilingConfig::new(params, ShiftSequence::Zero)
}

/// Quarter-turn config with nontrivial periodic shifts (period 4 offsets).
pub fn config_periodic_shifted() -> TilingConfig {
    let params = TileParams::new(0.5, 1.0, AngleSpec::rational_pi(1, 2).unwrap(), 1.0).unwrap();
    TilingConfig::new(params, ShiftSequence::Periodic { offsets: vec![0.5] })
}

/// Deterministic unit-ball directions for sampling, from a fixed seed.
pub fn sample_directions(n: usize, seed: u64) -> Vec<f64> {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(0.0..1.0)).collect()
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

/// Exact intersection chains for `cos(phi) = 1/3` and `3/5`, `M = 4`:
/// strictly increasing indices, no nonzero common vector of norm <= 100.
pub fn suite_aperiodicity() -> SuiteReport {
    let mut report = SuiteReport::new("aperiodicity");
    for (p, q) in [(1i64, 3i64), (3, 5)] {
        let angle = AngleSpec::rational_cos(p, q).unwrap();
        let cert = aperiodicity_certificate(&angle, 4, 100.0).unwrap();
        let name = format!("cos={p}/{q}");
        report.check_ge(
            &format!("{name} strictly increasing chain"),
            cert.strictly_increasing as u8 as f64,
            1.0,
        );
        report.check_le(
            &format!("{name} persistent common vector within radius"),
            cert.persistent_vector.is_some() as u8 as f64,
            0.0,
        );
        let chain: Vec<String> = cert
            .chain
            .iter()
            .map(|e| {
                format!(
                    "m={}: {}",
                    e.m,
                    e.index.clone().unwrap_or_else(|| "inf".into())
                )
            })
            .collect();
        report.note(format!("{name} chain: {}", chain.join(", ")));
        if let Some(depth) = cert.absence_certified_depth {
            report.note(format!("{name} absence certified at depth {depth}"));
        }
        if let Some(v) = &cert.chain_shortest_vector {
            report.note(format!(
                "{name} depth-4 chain retains CSL vector of norm {:.6}",
                v.norm
            ));
        }
    }
    report
}

/// Finite-sum rotation equivariance on bcc and random clouds.
pub fn suite_equivariance() -> SuiteReport {
    let mut report = SuiteReport::new("equivariance");
    let ks: Vec<Vec3> = {
        let u = sample_directions(300, 0xE9);
        (0..100)
            .map(|i| {
                Vec3::new(
                    4.0 * u[3 * i] - 2.0,
                    4.0 * u[3 * i + 1] - 2.0,
                    4.0 * u[3 * i + 2] - 2.0,
                )
            })
            .collect()
    };
    let bcc = extract_points(&TilingConfig::bcc(), 10.0).unwrap();
    let quarter = rotation_power(&AngleSpec::rational_pi(1, 2).unwrap(), 1);
    report.check_le(
        "bcc quarter-turn max deviation",
        rotation_equivariance_check(&bcc, &quarter, &ks),
        1e-9,
    );
    // random 100-point cloud, random-angle rotation
    let u = sample_directions(300, 0x51);
    let pts: Vec<Vec3> = (0..100)
        .map(|i| {
            Vec3::new(
                10.0 * u[3 * i] - 5.0,
                10.0 * u[3 * i + 1] - 5.0,
                10.0 * u[3 * i + 2] - 5.0,
            )
        })
        .collect();
    let n = pts.len();
    let random_cloud = crate::tiling::PointCloud::from_points(pts, vec![0; n], 10.0);
    let generic = rotation_power(&AngleSpec::generic(0.8139).unwrap(), 3);
    report.check_le(
        "random cloud generic rotation max deviation",
        rotation_equivariance_check(&random_cloud, &generic, &ks),
        1e-9,
    );
    report
}

/// bcc reproduction at `r = 20`: selection rule over the integer grid
/// `|k|_inf <= 3`, plus the normalization arbitration at `k = (0,0,2)` and
/// density/volume consistency checks.
pub fn suite_bcc() -> SuiteReport {
    let mut report = SuiteReport::new("bcc");
    let config = TilingConfig::bcc();
    let cloud = extract_points(&config, 20.0).unwrap();
    let mut ks = Vec::new();
    for x in -3..=3 {
        for y in -3..=3 {
            for z in -3..=3 {
                ks.push(Vec3::new(x as f64, y as f64, z as f64));
            }
        }
    }
    let samples = intensity_map(&cloud, &ks);
    let mut min_even = f64::INFINITY;
    let mut max_odd = 0.0f64;
    for s in &samples {
        let parity =
            (s.k.x.round() as i64 + s.k.y.round() as i64 + s.k.z.round() as i64).rem_euclid(2);
        if parity == 0 {
            min_even = min_even.min(s.intensity);
        } else {
            max_odd = max_odd.max(s.intensity);
        }
    }
    report.check_ge("min even-sum intensity", min_even, 0.95 * 4.0);
    report.check_le("max odd-sum intensity", max_odd, 0.04);
    // normalization arbitration at (0,0,2): the numerical atom lands on
    // dens3^2 = 4, not the dens2*dens3 = 2 coefficient
    let (re, im) = fourier_bohr(&cloud, Vec3::new(0.0, 0.0, 2.0)).unwrap();
    let atom = re * re + im * im;
    let near4 = (atom - 4.0).abs() / 4.0;
    let near2 = (atom - 2.0).abs() / 2.0;
    report.check_le("axis atom relative distance to 4", near4, 0.05);
    report.check_ge("axis atom relative distance to 2", near2, 0.05);
    report.note(format!(
        "normalization arbitration: measured {atom:.6}, estimator weight dens3^2 = 4 \
         (layer-count coefficient 2 rejected)"
    ));
    // density and tile-volume consistency on three parameter sets
    for (i, config) in [
        TilingConfig::bcc(),
        config_345(),
        TilingConfig::new(
            TileParams::new(0.4, 1.0, AngleSpec::rational_cos(1, 3).unwrap(), 0.7).unwrap(),
            ShiftSequence::Zero,
        ),
    ]
    .iter()
    .enumerate()
    {
        let r = 40.0;
        let cloud = extract_points(config, r).unwrap();
        let mesh = build_tile(&config.params).unwrap();
        let expect = 1.0 / tile_volume(&mesh);
        let rel = (cloud.density() - expect).abs() / expect;
        report.check_le(
            &format!("config {i} density relative error at r=40"),
            rel,
            0.02,
        );
    }
    report
}

/// Axis pure-point check for the `cos = 3/5` configuration at `r = 40`.
pub fn suite_axis() -> SuiteReport {
    let mut report = SuiteReport::new("axis");
    let config = config_345();
    let cloud = extract_points(&config, 40.0).unwrap();
    let expect = 25.0 / 16.0;
    for n in 1..=5 {
        let (re, im) = fourier_bohr(&cloud, Vec3::new(0.0, 0.0, n as f64)).unwrap();
        let i = re * re + im * im;
        report.check_le(
            &format!("axis peak n={n} relative error"),
            (i - expect).abs() / expect,
            0.05,
        );
    }
    for n in 1..=5 {
        let (re, im) = fourier_bohr(&cloud, Vec3::new(0.0, 0.0, n as f64 + 0.5)).unwrap();
        let i = re * re + im * im;
        report.check_le(&format!("between peaks n={n}+1/2"), i, 0.02 * expect);
    }
    report
}

/// Support singularity for the `cos = 3/5` configuration: shell-mass
/// concentration on predicted radii and off-cylinder decay, plus the
/// no-off-axis-Bragg probe with its bcc calibration.
pub fn suite_support() -> SuiteReport {
    let mut report = SuiteReport::new("support");
    let config = config_345();
    let cloud20 = extract_points(&config, 20.0).unwrap();
    let cloud40 = extract_points(&config, 40.0).unwrap();
    let max_radius = 1.6;
    let radii = predicted_support(&config.params, max_radius);
    let profile20 = shell_mass_profile(&cloud20, 0.0, 4.0 / 20.0, max_radius, 1.0 / 20.0).unwrap();
    let profile40 = shell_mass_profile(&cloud40, 0.0, 4.0 / 40.0, max_radius, 1.0 / 40.0).unwrap();
    let on40 = profile40.mass_on_radii(&radii);
    let total40 = profile40.total_mass();
    report.check_ge("on-cylinder mass fraction at r=40", on40 / total40, 0.80);
    let off20 = profile20.total_mass() - profile20.mass_on_radii(&radii);
    let off40 = total40 - on40;
    report.check_le("off-cylinder mass ratio r=40 / r=20", off40 / off20, 0.35);
    report.note(format!("predicted radii up to {max_radius}: {radii:?}"));

    // Theorem-3 probe: 50 on-cylinder off-axis samples shared by both sizes
    let (_, dens3) = densities(&config.params);
    let u = sample_directions(100, 0xBA51);
    let nonzero: Vec<f64> = radii.iter().copied().filter(|r| *r > 1e-9).collect();
    let ks: Vec<Vec3> = (0..50)
        .map(|i| {
            let rho = nonzero[i % nonzero.len()];
            let theta = u[2 * i] * std::f64::consts::TAU;
            let k3 = 4.0 * u[2 * i + 1] - 2.0;
            Vec3::new(rho * theta.cos(), rho * theta.sin(), k3)
        })
        .collect();
    let probe = no_bragg_probe(&[&cloud20, &cloud40], &ks);
    let max20 = probe.max_per_r[0].1;
    let max40 = probe.max_per_r[1].1;
    report.check_le("on-cylinder max intensity decays", max40 / max20, 0.999999);
    report.check_le(
        "on-cylinder max at r=40 vs 0.05*dens3^2",
        max40,
        0.05 * dens3 * dens3,
    );
    // off-support samples: away from every cylinder and from the axis the
    // intensity collapses outright
    let off_ks: Vec<Vec3> = (0..20)
        .map(|i| {
            let rho = 0.55 + 0.015 * (i as f64); // between the 0 and sqrt(5)/2 shells
            let theta = u[i] * std::f64::consts::TAU;
            Vec3::new(rho * theta.cos(), rho * theta.sin(), 0.7 + 0.01 * i as f64)
        })
        .collect();
    let off_max = intensity_map(&cloud40, &off_ks)
        .iter()
        .map(|s| s.intensity)
        .fold(0.0f64, f64::max);
    report.check_le("off-support max intensity at r=40", off_max, 1e-3);
    // calibration: the probe must NOT report decay on true Bragg peaks
    let bcc20 = extract_points(&TilingConfig::bcc(), 20.0).unwrap();
    let bcc40 = extract_points(&TilingConfig::bcc(), 40.0).unwrap();
    let bragg = [
        Vec3::new(1.0, 1.0, 0.0),
        Vec3::new(0.0, 0.0, 2.0),
        Vec3::new(1.0, 0.0, 1.0),
        Vec3::new(2.0, 0.0, 0.0),
    ];
    let calib = no_bragg_probe(&[&bcc20, &bcc40], &bragg);
    report.check_ge("bcc calibration non-decay ratio", calib.decay_ratio, 0.9);
    report
}

/// Coincidence solver versus brute-force search.
pub fn suite_coincidence() -> SuiteReport {
    let mut report = SuiteReport::new("coincidence");
    for (num, den) in [(0i64, 1i64), (1, 3), (2, 5), (3, 5)] {
        let out = coincidence_solve(CoincidenceInput::Rational { num, den }).unwrap();
        let CoincidenceOutcome::Solution(sol) = out else {
            report.check_ge(&format!("b1={num}/{den} has solution"), 0.0, 1.0);
            continue;
        };
        let brute = brute_force_coincidence(num, den, 50);
        let agree = brute == Some((sol.kappa, sol.lambda, sol.mu, sol.nu));
        report.check_ge(
            &format!("b1={num}/{den} matches brute force"),
            agree as u8 as f64,
            1.0,
        );
        report.note(format!(
            "b1={num}/{den}: (kappa,lambda,mu,nu) = ({},{},{},{})",
            sol.kappa, sol.lambda, sol.mu, sol.nu
        ));
    }
    let out = coincidence_solve(CoincidenceInput::Irrational).unwrap();
    report.check_ge(
        "irrational flag yields no-solution certificate",
        matches!(out, CoincidenceOutcome::NoSolution(_)) as u8 as f64,
        1.0,
    );
    report
}

/// Independent brute-force search over `|kappa|,|lambda|,|mu|,|nu| <= bound`
/// for the minimal-`|nu|` coincidence solution (then minimal `|mu|`, then
/// minimal `|lambda|`; sign fixed by `nu > 0`). Exact integer arithmetic:
/// with `b1 = r/s`, the second component (divided by `b2`) reads
/// `(lambda - mu) s = 2 nu r`, and the first reads
/// `kappa s^2 = (mu - lambda) r s + nu (2 r^2 - s^2)`.
pub fn brute_force_coincidence(r: i64, s: i64, bound: i64) -> Option<(i64, i64, i64, i64)> {
    for nu in 1..=bound {
        for mu in 0..=bound {
            for mu_sign in [1i64, -1] {
                let mu = mu * mu_sign;
                // lambda from the second component, if integral
                let num = 2 * nu * r + mu * s;
                if num.rem_euclid(s) != 0 {
                    continue;
                }
                let lambda = num / s;
                if lambda.abs() > bound {
                    continue;
                }
                // kappa from the first component, if integral
                let rhs = (mu - lambda) * r * s + nu * (2 * r * r - s * s);
                if rhs.rem_euclid(s * s) != 0 {
                    continue;
                }
                let kappa = rhs / (s * s);
                if kappa == 0 || kappa.abs() > bound {
                    continue;
                }
                return Some((kappa, lambda, mu, nu));
            }
        }
    }
    None
}

/// Fully periodic case: every strong numerical peak lies on the predicted
/// support, and no low-order predicted peak is missed.
pub fn suite_periodic() -> SuiteReport {
    let mut report = SuiteReport::new("periodic");
    let config = config_periodic_shifted();
    let r = 20.0;
    let cloud = extract_points(&config, r).unwrap();
    let (_, dens3) = densities(&config.params);
    let threshold = 0.1 * dens3 * dens3;
    let predicted = predicted_periodic_spectrum(&config, 1.55, 1.55).unwrap();
    // fine grid slab: step 1/8 covers the (1/4)Z axis grid exactly
    let step = 0.125f64;
    let extent = 1.5f64;
    let n = (extent / step).round() as i64;
    let mut ks = Vec::new();
    for x in -n..=n {
        for y in -n..=n {
            for z in -n..=n {
                ks.push(Vec3::new(x as f64 * step, y as f64 * step, z as f64 * step));
            }
        }
    }
    let samples = intensity_map(&cloud, &ks);
    let mut worst_distance = 0.0f64;
    let mut strong = 0;
    for s in &samples {
        if s.intensity <= threshold {
            continue;
        }
        strong += 1;
        let dist = predicted
            .iter()
            .map(|p| (p.k - s.k).norm())
            .fold(f64::INFINITY, f64::min);
        worst_distance = worst_distance.max(dist);
    }
    report.check_ge("strong peaks found", strong as f64, 1.0);
    report.check_le("max distance from predicted support", worst_distance, 1e-6);
    // no predicted low-order peak with confirmed structure factor is missed
    let mut missed = 0;
    for p in predicted.iter().filter(|p| p.intensity > threshold) {
        let (re, im) = fourier_bohr(&cloud, p.k).unwrap();
        let measured = re * re + im * im;
        if measured <= threshold {
            missed += 1;
            report.note(format!(
                "predicted peak at {:?} (atom {:.4}) measured {:.4}",
                p.k, p.intensity, measured
            ));
        }
    }
    report.check_le("missed predicted peaks", missed as f64, 0.0);
    report
}
