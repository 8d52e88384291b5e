//! Planar lattice algebra: duals, coincidence site lattices, and
//! aperiodicity certificates.
//!
//! A layer lattice and its rotated copies share common vectors only on a
//! coincidence site lattice; the chain of intersections over successive
//! rotation powers is the operative aperiodicity witness. All decisions on
//! rational-cosine angles are made in exact arithmetic; generic angles get
//! an explicitly empirical certificate with a stated radius and tolerance.

use num::{BigInt, BigRational, One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::angle::AngleSpec;
use crate::exact::{
    intersect_quad_modules, is_rational_integer, QuadLattice, QuadMat2, QuadVal, QuadVec2,
};
use crate::geometry::Rotation3;
use crate::vec::{Mat2, Vec2};

/// Tolerance for empirical (float-mode) lattice membership.
pub const EMPIRICAL_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("basis vectors are linearly dependent")]
    SingularBasis,
    #[error("operation requires exact arithmetic (rational-cosine angle)")]
    NotExactMode,
    #[error("b1 must satisfy 0 <= b1 < 1, got {0}")]
    B1OutOfRange(f64),
    #[error("rotation power m must be >= 1, got {0}")]
    BadRotationPower(i64),
    #[error("m_max must be >= 1, got {0}")]
    BadChainLength(i64),
}

/// A planar lattice, float basis plus optional exact backing.
#[derive(Debug, Clone)]
pub struct Lattice2 {
    basis: [Vec2; 2],
    exact: Option<QuadLattice>,
}

/// The dual (reciprocal) lattice of a [`Lattice2`].
#[derive(Debug, Clone)]
pub struct DualLattice2 {
    basis: [Vec2; 2],
    exact: Option<QuadLattice>,
}

impl Lattice2 {
    pub fn from_basis(u: Vec2, v: Vec2) -> Result<Self, LatticeError> {
        if u.perp_dot(v).abs() < 1e-300 {
            return Err(LatticeError::SingularBasis);
        }
        Ok(Lattice2 {
            basis: [u, v],
            exact: None,
        })
    }

    pub fn from_exact(exact: QuadLattice) -> Result<Self, LatticeError> {
        if exact.det().is_zero() {
            return Err(LatticeError::SingularBasis);
        }
        let basis = [exact.basis[0].to_vec2(), exact.basis[1].to_vec2()];
        Ok(Lattice2 {
            basis,
            exact: Some(exact),
        })
    }

    /// The layer lattice `Z a + Z b` for a unit `a` and the given angle:
    /// basis `(1, 0)` and `(cos phi, sin phi)`. Exact when the angle has a
    /// rational cosine.
    pub fn gamma(angle: &AngleSpec) -> Self {
        if let Some((p, q)) = angle.exact_cos() {
            return Lattice2::from_exact(QuadLattice::gamma(p, q)).expect("gamma is nonsingular");
        }
        let (c, s) = angle.cos_sin();
        Lattice2::from_basis(Vec2::new(1.0, 0.0), Vec2::new(c, s)).expect("gamma is nonsingular")
    }

    pub fn basis(&self) -> [Vec2; 2] {
        self.basis
    }

    pub fn exact(&self) -> Option<&QuadLattice> {
        self.exact.as_ref()
    }

    pub fn det(&self) -> f64 {
        self.basis[0].perp_dot(self.basis[1])
    }

    /// Points per unit area.
    pub fn density(&self) -> f64 {
        1.0 / self.det().abs()
    }
}

impl DualLattice2 {
    pub fn basis(&self) -> [Vec2; 2] {
        self.basis
    }

    pub fn exact(&self) -> Option<&QuadLattice> {
        self.exact.as_ref()
    }

    /// Reinterpret the dual as a primal lattice (for dual-of-dual checks).
    pub fn as_lattice(&self) -> Lattice2 {
        Lattice2 {
            basis: self.basis,
            exact: self.exact.clone(),
        }
    }
}

/// Dual lattice via the inverse transpose of the basis matrix.
pub fn dual_lattice(g: &Lattice2) -> Result<DualLattice2, LatticeError> {
    if let Some(exact) = g.exact() {
        let dual = exact.dual();
        let basis = [dual.basis[0].to_vec2(), dual.basis[1].to_vec2()];
        return Ok(DualLattice2 {
            basis,
            exact: Some(dual),
        });
    }
    let [u, v] = g.basis();
    let det = u.perp_dot(v);
    if det.abs() < 1e-300 {
        return Err(LatticeError::SingularBasis);
    }
    // columns of B^-T for B = [u v]
    let du = Vec2::new(v.y / det, -v.x / det);
    let dv = Vec2::new(-u.y / det, u.x / det);
    Ok(DualLattice2 {
        basis: [du, dv],
        exact: None,
    })
}

/// Verify `(R^m Gamma)* = R^m (Gamma*)` by exact basis comparison.
pub fn rotated_dual_identity_check(
    g: &Lattice2,
    rotation: &Rotation3,
    m: i64,
) -> Result<bool, LatticeError> {
    let exact = g.exact().ok_or(LatticeError::NotExactMode)?;
    let block = rotation
        .exact_planar()
        .ok_or(LatticeError::NotExactMode)?
        .pow(m);
    let rotated = exact.transformed(&block);
    let lhs = rotated.dual();
    let rhs = exact.dual().transformed(&block);
    Ok(lhs.same_lattice(&rhs))
}

// ---------------------------------------------------------------------------
// Coincidence equation
// ---------------------------------------------------------------------------

/// Input to the coincidence solver: either an exact rational `b1` or a
/// declared-irrational one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoincidenceInput {
    Rational { num: i64, den: i64 },
    Irrational,
}

/// Integer solution of the coincidence equation
/// `kappa (1,0) + lambda (b1,b2) = mu (b1,b2) + nu (b1^2-b2^2, 2 b1 b2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CoincidenceSolution {
    pub kappa: i64,
    pub lambda: i64,
    pub mu: i64,
    pub nu: i64,
}

/// Witness that no solution with `kappa != 0 != nu` exists for an
/// irrational `b1`: integrality of the second component forces `nu = 0`,
/// after which the first component forces `kappa = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NoSolutionCertificate {
    pub nu_forced_zero: bool,
    pub kappa_forced_zero: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoincidenceOutcome {
    Solution(CoincidenceSolution),
    NoSolution(NoSolutionCertificate),
}

fn gcd64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Solve the coincidence equation with minimal `|nu| > 0` (sign convention
/// `nu > 0`, then minimal `|mu|`).
///
/// Dividing the second component by `b2` gives `lambda - mu = 2 nu b1`;
/// substituting into the first gives `kappa = -nu`. For `b1 = r/s` in lowest
/// terms the integrality constraint is `s | 2 nu r`, so the minimal positive
/// `nu` is `s / gcd(s, 2r)`. For irrational `b1` the same two steps force
/// `nu = 0` and then `kappa = 0`, contradicting `kappa != 0 != nu`.
pub fn coincidence_solve(input: CoincidenceInput) -> Result<CoincidenceOutcome, LatticeError> {
    match input {
        CoincidenceInput::Irrational => Ok(CoincidenceOutcome::NoSolution(NoSolutionCertificate {
            nu_forced_zero: true,
            kappa_forced_zero: true,
        })),
        CoincidenceInput::Rational { num, den } => {
            if den <= 0 || num < 0 || num >= den {
                return Err(LatticeError::B1OutOfRange(if den == 0 {
                    f64::NAN
                } else {
                    num as f64 / den as f64
                }));
            }
            let g = gcd64(num, den);
            let (r, s) = (num / g, den / g);
            let nu = s / gcd64(s, 2 * r);
            let lambda = 2 * nu * r / s;
            let sol = CoincidenceSolution {
                kappa: -nu,
                lambda,
                mu: 0,
                nu,
            };
            debug_assert!(coincidence_residual_is_zero(&sol, r, s));
            Ok(CoincidenceOutcome::Solution(sol))
        }
    }
}

/// Exact check that a solution satisfies both components of the
/// coincidence equation, with `b2^2 = 1 - b1^2` handled symbolically.
pub fn coincidence_residual_is_zero(sol: &CoincidenceSolution, r: i64, s: i64) -> bool {
    let b1 = BigRational::new(BigInt::from(r), BigInt::from(s));
    let one = BigRational::one();
    let kappa = BigRational::from_integer(BigInt::from(sol.kappa));
    let lambda = BigRational::from_integer(BigInt::from(sol.lambda));
    let mu = BigRational::from_integer(BigInt::from(sol.mu));
    let nu = BigRational::from_integer(BigInt::from(sol.nu));
    // second component divided by b2: lambda = mu + 2 nu b1
    let second = &lambda - &mu - BigRational::from_integer(BigInt::from(2)) * &nu * &b1;
    // first component: kappa + lambda b1 = mu b1 + nu (2 b1^2 - 1)
    let two_b1_sq = BigRational::from_integer(BigInt::from(2)) * &b1 * &b1;
    let first = &kappa + &lambda * &b1 - &mu * &b1 - &nu * (two_b1_sq - one);
    second.is_zero() && first.is_zero()
}

// ---------------------------------------------------------------------------
// Coincidence site lattice index
// ---------------------------------------------------------------------------

/// Index of `Gamma ∩ R^m Gamma` in `Gamma`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CslIndex {
    Finite(BigInt),
    Infinite,
}

impl CslIndex {
    pub fn as_u64(&self) -> Option<u64> {
        match self {
            CslIndex::Finite(n) => n.to_u64(),
            CslIndex::Infinite => None,
        }
    }
}

/// Exact index of the coincidence site lattice `Gamma ∩ R^m Gamma`.
pub fn csl_index(angle: &AngleSpec, m: i64) -> Result<CslIndex, LatticeError> {
    let (p, q) = angle.exact_cos().ok_or(LatticeError::NotExactMode)?;
    if m < 1 {
        return Err(LatticeError::BadRotationPower(m));
    }
    let gamma = QuadLattice::gamma(p, q);
    let block = QuadMat2::rotation_minus_phi(p, q).pow(m);
    let rotated = gamma.transformed(&block);
    match gamma.intersect(&rotated) {
        Some(meet) => Ok(CslIndex::Finite(gamma.index_of(&meet))),
        None => Ok(CslIndex::Infinite),
    }
}

// ---------------------------------------------------------------------------
// Aperiodicity certificate
// ---------------------------------------------------------------------------

/// One prefix of the intersection chain `⋂_{0<=j<=m} R^j Gamma`.
#[derive(Debug, Clone, Serialize)]
pub struct ChainEntry {
    pub m: i64,
    pub rank: usize,
    /// Index in `Gamma` as a decimal string; `None` when rank < 2.
    pub index: Option<String>,
}

/// Shortest common vector found within the search radius.
#[derive(Debug, Clone, Serialize)]
pub struct VectorReport {
    pub x: f64,
    pub y: f64,
    pub norm: f64,
    /// Exact component rendering, present in exact mode.
    pub exact: Option<[String; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateMode {
    Exact,
    Empirical,
}

/// Certificate for the aperiodicity argument.
///
/// The finite chain `⋂_{0<=m<=M} R^m Gamma` retains a finite-index
/// coincidence lattice for rational cosines, so its short vectors are
/// reported as they are (`chain_shortest_vector`). Absence of a *persistent*
/// common vector — one lying in `R^m Gamma` for every `m >= 0` — is what
/// aperiodicity needs; it is certified by deepening the intersection until
/// its shortest vector leaves the search radius (`absence_certified_depth`).
/// For commensurate angles the chain stabilizes instead and the surviving
/// vector is reported (`persistent_vector`).
#[derive(Debug, Clone, Serialize)]
pub struct AperiodicityCertificate {
    pub schema_version: u32,
    pub angle: AngleSpec,
    pub m_max: i64,
    pub radius: f64,
    pub mode: CertificateMode,
    /// Membership tolerance, empirical mode only.
    pub tolerance: Option<f64>,
    pub chain: Vec<ChainEntry>,
    pub strictly_increasing: bool,
    /// Shortest nonzero vector of the depth-`m_max` chain within the radius.
    pub chain_shortest_vector: Option<VectorReport>,
    /// A vector within the radius surviving every tested rotation power.
    pub persistent_vector: Option<VectorReport>,
    /// Depth at which the chain's shortest vector first exceeded the radius,
    /// certifying that no persistent vector of that norm exists.
    pub absence_certified_depth: Option<i64>,
}

pub fn aperiodicity_certificate(
    angle: &AngleSpec,
    m_max: i64,
    radius: f64,
) -> Result<AperiodicityCertificate, LatticeError> {
    if m_max < 1 {
        return Err(LatticeError::BadChainLength(m_max));
    }
    match angle.exact_cos() {
        Some((p, q)) => Ok(exact_certificate(angle, p, q, m_max, radius)),
        None => Ok(empirical_certificate(angle, m_max, radius)),
    }
}

/// Depth cap for the absence search; generous compared to the handful of
/// steps real incommensurate angles need to push the shortest common
/// vector past any desk-scale radius.
const ABSENCE_DEPTH_CAP: i64 = 64;

fn exact_certificate(
    angle: &AngleSpec,
    p: i64,
    q: i64,
    m_max: i64,
    radius: f64,
) -> AperiodicityCertificate {
    let gamma = QuadLattice::gamma(p, q);
    let rot = QuadMat2::rotation_minus_phi(p, q);
    let mut chain = vec![ChainEntry {
        m: 0,
        rank: 2,
        index: Some("1".to_string()),
    }];
    let mut current: Vec<QuadVec2> = gamma.basis.to_vec();
    let mut indices: Vec<Option<BigInt>> = vec![Some(BigInt::one())];
    let mut chain_shortest_vector = None;
    let mut persistent_vector = None;
    let mut absence_certified_depth = None;
    let order = angle.rotation_order();
    let depth_cap = match order {
        Some(k) => (k - 1).max(m_max),
        None => ABSENCE_DEPTH_CAP.max(m_max),
    };
    let mut m = 0;
    while m < depth_cap {
        m += 1;
        let rotated = gamma.transformed(&rot.pow(m));
        current = intersect_quad_modules(&current, &rotated.basis);
        if m <= m_max {
            let (rank, index) = if current.len() == 2 {
                let sub = QuadLattice::new(current[0].clone(), current[1].clone());
                (2, Some(gamma.index_of(&sub)))
            } else {
                (current.len(), None)
            };
            indices.push(index.clone());
            chain.push(ChainEntry {
                m,
                rank,
                index: index.map(|n| n.to_string()),
            });
        }
        if m == m_max {
            chain_shortest_vector = shortest_in_module_within(&current, radius);
        }
        if m >= m_max && shortest_in_module_within(&current, radius).is_none() {
            absence_certified_depth = Some(m);
            break;
        }
    }
    if absence_certified_depth.is_none() {
        // commensurate stabilization (or depth cap): whatever survives within
        // the radius is a genuine persistent vector for finite-order
        // rotations, and an honest "not refuted" report otherwise
        persistent_vector = shortest_in_module_within(&current, radius);
    }
    let strictly_increasing = indices.windows(2).all(|w| match (&w[0], &w[1]) {
        (Some(a), Some(b)) => b > a,
        (Some(_), None) => true, // rank dropped: index became infinite
        _ => false,
    });
    AperiodicityCertificate {
        schema_version: 1,
        angle: *angle,
        m_max,
        radius,
        mode: CertificateMode::Exact,
        tolerance: None,
        chain,
        strictly_increasing,
        chain_shortest_vector,
        persistent_vector,
        absence_certified_depth,
    }
}

/// Shortest nonzero vector of a module (rank 0..2) with norm <= radius,
/// decided exactly. Float reduction only guides the search window.
fn shortest_in_module_within(gens: &[QuadVec2], radius: f64) -> Option<VectorReport> {
    if gens.is_empty() {
        return None;
    }
    let radius_sq = QuadVal::from_big_rational(
        BigRational::from_float(radius).expect("finite radius")
            * BigRational::from_float(radius).unwrap(),
    );
    let report = |v: &QuadVec2| -> VectorReport {
        let f = v.to_vec2();
        VectorReport {
            x: f.x,
            y: f.y,
            norm: f.norm(),
            exact: Some([v.x.render(), v.y.render()]),
        }
    };
    if gens.len() == 1 {
        let n = gens[0].norm_sq();
        if !gens[0].is_zero() && n.cmp_val(&radius_sq) != std::cmp::Ordering::Greater {
            return Some(report(&gens[0]));
        }
        return None;
    }
    // Lagrange-Gauss reduction mirrored on the exact vectors.
    let mut u = gens[0].clone();
    let mut v = gens[1].clone();
    let mut uf = u.to_vec2();
    let mut vf = v.to_vec2();
    for _ in 0..64 {
        if uf.norm() > vf.norm() {
            std::mem::swap(&mut u, &mut v);
            std::mem::swap(&mut uf, &mut vf);
        }
        let mu = (vf.dot(uf) / uf.dot(uf)).round();
        if mu == 0.0 || !mu.is_finite() {
            break;
        }
        let mu_exact = QuadVal::from_rational(mu as i64, 1);
        v = v.sub(&u.scale(&mu_exact));
        vf = v.to_vec2();
    }
    // enumerate i*u + j*v within the radius (float bounds, exact decisions)
    let area = uf.perp_dot(vf).abs();
    if area < 1e-300 {
        return None;
    }
    let imax = (radius * vf.norm() / area).ceil() as i64 + 1;
    let jmax = (radius * uf.norm() / area).ceil() as i64 + 1;
    let mut best: Option<(QuadVal, QuadVec2)> = None;
    for i in -imax..=imax {
        for j in -jmax..=jmax {
            if i == 0 && j == 0 {
                continue;
            }
            let cand_f = uf * (i as f64) + vf * (j as f64);
            if cand_f.norm() > radius * 1.001 + 1e-9 {
                continue;
            }
            let cand = u
                .scale(&QuadVal::from_rational(i, 1))
                .add(&v.scale(&QuadVal::from_rational(j, 1)));
            let n = cand.norm_sq();
            if n.cmp_val(&radius_sq) == std::cmp::Ordering::Greater {
                continue;
            }
            match &best {
                Some((bn, _)) if n.cmp_val(bn) != std::cmp::Ordering::Less => {}
                _ => best = Some((n, cand)),
            }
        }
    }
    best.map(|(_, v)| report(&v))
}

fn empirical_certificate(angle: &AngleSpec, m_max: i64, radius: f64) -> AperiodicityCertificate {
    let (c, s) = angle.cos_sin();
    let basis = Mat2::from_cols(Vec2::new(1.0, 0.0), Vec2::new(c, s));
    let rotation = |m: i64| -> Mat2 {
        let t = -(m as f64) * angle.phi();
        Mat2::from_cols(Vec2::new(t.cos(), -t.sin()), Vec2::new(t.sin(), t.cos()))
    };
    // distance from w to R^m Gamma: reduce coordinates mod 1 in that basis
    let dist_to = |w: Vec2, rot: &Mat2| -> f64 {
        let rb = Mat2::from_cols(rot.apply(basis.col0), rot.apply(basis.col1));
        let c = rb.solve(w);
        let frac = Vec2::new(c.x - c.x.round(), c.y - c.y.round());
        rb.apply(frac).norm()
    };
    // candidates: nonzero lattice points within the radius, one per +- pair
    let mut candidates: Vec<Vec2> = Vec::new();
    let imax = (radius / s).ceil() as i64 + 2;
    for i in 0..=imax {
        let j_lo = if i == 0 { 1 } else { -imax };
        for j in j_lo..=imax {
            let w = basis.col0 * (i as f64) + basis.col1 * (j as f64);
            if w.norm() <= radius && w.norm() > 1e-12 {
                candidates.push(w);
            }
        }
    }
    candidates.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    // chain survivors within m <= m_max and refutation sweep beyond
    let mut chain_shortest_vector: Option<VectorReport> = None;
    let mut persistent_vector: Option<VectorReport> = None;
    let mut deepest_refutation = 0i64;
    let cap = 4 * ABSENCE_DEPTH_CAP;
    for w in &candidates {
        let mut refuted_at = None;
        for m in 1..=cap {
            if dist_to(*w, &rotation(m)) > EMPIRICAL_TOL {
                refuted_at = Some(m);
                break;
            }
        }
        match refuted_at {
            Some(m) => {
                if m > m_max && chain_shortest_vector.is_none() {
                    // survived the finite chain window but not all powers
                    chain_shortest_vector = Some(VectorReport {
                        x: w.x,
                        y: w.y,
                        norm: w.norm(),
                        exact: None,
                    });
                }
                deepest_refutation = deepest_refutation.max(m);
            }
            None => {
                persistent_vector = Some(VectorReport {
                    x: w.x,
                    y: w.y,
                    norm: w.norm(),
                    exact: None,
                });
                break;
            }
        }
    }
    let absence_certified_depth = if persistent_vector.is_none() {
        Some(deepest_refutation)
    } else {
        None
    };
    let chain = (0..=m_max)
        .map(|m| ChainEntry {
            m,
            rank: 2,
            index: None,
        })
        .collect();
    AperiodicityCertificate {
        schema_version: 1,
        angle: *angle,
        m_max,
        radius,
        mode: CertificateMode::Empirical,
        tolerance: Some(EMPIRICAL_TOL),
        chain,
        strictly_increasing: false,
        chain_shortest_vector,
        persistent_vector,
        absence_certified_depth,
    }
}

/// Float-mode integrality check used to validate dual bases: every pairwise
/// primal-dual inner product must be an integer within `tol`.
pub fn dual_products_are_integral(g: &Lattice2, dual: &DualLattice2, tol: f64) -> bool {
    if let (Some(ge), Some(de)) = (g.exact(), dual.exact()) {
        for u in &ge.basis {
            for v in &de.basis {
                if !is_rational_integer(&u.dot(v)) {
                    return false;
                }
            }
        }
        return true;
    }
    for u in g.basis() {
        for v in dual.basis() {
            let ip = u.dot(v);
            if (ip - ip.round()).abs() > tol {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::rotation_power;

    #[test]
    fn dual_of_z2_is_z2() {
        let g = Lattice2::from_basis(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)).unwrap();
        let d = dual_lattice(&g).unwrap();
        assert_eq!(d.basis()[0], Vec2::new(1.0, 0.0));
        assert_eq!(d.basis()[1], Vec2::new(0.0, 1.0));
    }

    #[test]
    fn dual_of_rhombic_345_lattice() {
        let angle = AngleSpec::rational_cos(3, 5).unwrap();
        let g = Lattice2::gamma(&angle);
        let d = dual_lattice(&g).unwrap();
        let [du, dv] = d.basis();
        assert!((du - Vec2::new(1.0, -0.75)).norm() < 1e-14);
        assert!((dv - Vec2::new(0.0, 1.25)).norm() < 1e-14);
        assert!(dual_products_are_integral(&g, &d, 1e-12));
    }

    #[test]
    fn dual_scaling_inverse() {
        let g = Lattice2::from_basis(Vec2::new(2.0, 0.0), Vec2::new(0.6, 1.4)).unwrap();
        let gs = Lattice2::from_basis(Vec2::new(4.0, 0.0), Vec2::new(1.2, 2.8)).unwrap();
        let d = dual_lattice(&g).unwrap();
        let ds = dual_lattice(&gs).unwrap();
        for (a, b) in d.basis().iter().zip(ds.basis().iter()) {
            assert!((*a - *b * 2.0).norm() < 1e-14);
        }
    }

    #[test]
    fn singular_basis_rejected() {
        assert!(Lattice2::from_basis(Vec2::new(1.0, 2.0), Vec2::new(2.0, 4.0)).is_err());
    }

    #[test]
    fn rotated_dual_identity_holds() {
        let angle = AngleSpec::rational_cos(3, 5).unwrap();
        let g = Lattice2::gamma(&angle);
        let r = rotation_power(&angle, 1);
        assert!(rotated_dual_identity_check(&g, &r, 1).unwrap());
        assert!(rotated_dual_identity_check(&g, &r, 0).unwrap());

        let quarter = AngleSpec::rational_pi(1, 2).unwrap();
        let z2 = Lattice2::gamma(&quarter);
        let rq = rotation_power(&quarter, 1);
        assert!(rotated_dual_identity_check(&z2, &rq, 1).unwrap());

        let angle13 = AngleSpec::rational_cos(1, 3).unwrap();
        let g13 = Lattice2::gamma(&angle13);
        let r13 = rotation_power(&angle13, 1);
        for m in 0..4 {
            assert!(rotated_dual_identity_check(&g13, &r13, m).unwrap());
        }
    }

    #[test]
    fn coincidence_three_fifths() {
        let out = coincidence_solve(CoincidenceInput::Rational { num: 3, den: 5 }).unwrap();
        assert_eq!(
            out,
            CoincidenceOutcome::Solution(CoincidenceSolution {
                kappa: -5,
                lambda: 6,
                mu: 0,
                nu: 5
            })
        );
    }

    #[test]
    fn coincidence_bcc() {
        let out = coincidence_solve(CoincidenceInput::Rational { num: 0, den: 1 }).unwrap();
        assert_eq!(
            out,
            CoincidenceOutcome::Solution(CoincidenceSolution {
                kappa: -1,
                lambda: 0,
                mu: 0,
                nu: 1
            })
        );
    }

    #[test]
    fn coincidence_irrational_certificate() {
        let out = coincidence_solve(CoincidenceInput::Irrational).unwrap();
        assert_eq!(
            out,
            CoincidenceOutcome::NoSolution(NoSolutionCertificate {
                nu_forced_zero: true,
                kappa_forced_zero: true
            })
        );
    }

    #[test]
    fn coincidence_range_errors() {
        assert!(coincidence_solve(CoincidenceInput::Rational { num: 5, den: 5 }).is_err());
        assert!(coincidence_solve(CoincidenceInput::Rational { num: -1, den: 5 }).is_err());
    }

    #[test]
    fn csl_index_345_is_five() {
        let angle = AngleSpec::rational_cos(3, 5).unwrap();
        let idx = csl_index(&angle, 1).unwrap();
        assert_eq!(idx, CslIndex::Finite(BigInt::from(5)));
    }

    #[test]
    fn csl_index_quarter_turn_is_one() {
        let angle = AngleSpec::rational_pi(1, 2).unwrap();
        assert_eq!(
            csl_index(&angle, 1).unwrap(),
            CslIndex::Finite(BigInt::from(1))
        );
    }

    #[test]
    fn csl_index_345_power_two_exceeds_five() {
        let angle = AngleSpec::rational_cos(3, 5).unwrap();
        match csl_index(&angle, 2).unwrap() {
            CslIndex::Finite(n) => assert!(n > BigInt::from(5), "index {n} too small"),
            CslIndex::Infinite => panic!("expected finite index"),
        }
    }

    #[test]
    fn csl_requires_exact_mode() {
        let angle = AngleSpec::generic(1.0).unwrap();
        assert!(matches!(
            csl_index(&angle, 1),
            Err(LatticeError::NotExactMode)
        ));
        let angle = AngleSpec::rational_cos(3, 5).unwrap();
        assert!(matches!(
            csl_index(&angle, 0),
            Err(LatticeError::BadRotationPower(0))
        ));
    }

    #[test]
    fn certificate_one_third_chain() {
        let angle = AngleSpec::rational_cos(1, 3).unwrap();
        let cert = aperiodicity_certificate(&angle, 4, 100.0).unwrap();
        assert_eq!(cert.mode, CertificateMode::Exact);
        assert!(cert.strictly_increasing, "chain: {:?}", cert.chain);
        // the depth-4 chain still has a finite-index CSL with short vectors
        // (norm 9 = |(3, -6*sqrt(2))|), but no vector survives all powers
        let chain_v = cert
            .chain_shortest_vector
            .expect("finite chain keeps a CSL");
        assert!(
            (chain_v.norm - 9.0).abs() < 1e-9,
            "chain shortest {}",
            chain_v.norm
        );
        assert!(
            cert.persistent_vector.is_none(),
            "found {:?}",
            cert.persistent_vector
        );
        assert!(cert.absence_certified_depth.is_some());
    }

    #[test]
    fn certificate_345_m1_shortest_vector() {
        let angle = AngleSpec::rational_cos(3, 5).unwrap();
        let cert = aperiodicity_certificate(&angle, 1, 100.0).unwrap();
        assert_eq!(cert.chain[1].index.as_deref(), Some("5"));
        let v = cert.chain_shortest_vector.expect("CSL has short vectors");
        // Gamma ∩ R Gamma always contains a = (1, 0)
        assert!((v.norm - 1.0).abs() < 1e-12, "norm {}", v.norm);
        assert!(cert.persistent_vector.is_none());
    }

    #[test]
    fn certificate_quarter_turn_periodic() {
        let angle = AngleSpec::rational_pi(1, 2).unwrap();
        let cert = aperiodicity_certificate(&angle, 3, 10.0).unwrap();
        // R preserves Z^2: every index is 1 and (1,0) persists
        for e in &cert.chain {
            assert_eq!(e.index.as_deref(), Some("1"));
        }
        let v = cert
            .persistent_vector
            .expect("periodic case has common vectors");
        assert!((v.norm - 1.0).abs() < 1e-12);
        assert!(!cert.strictly_increasing);
        assert!(cert.absence_certified_depth.is_none());
    }

    #[test]
    fn certificate_generic_is_empirical() {
        let angle = AngleSpec::generic(1.0).unwrap();
        let cert = aperiodicity_certificate(&angle, 3, 20.0).unwrap();
        assert_eq!(cert.mode, CertificateMode::Empirical);
        assert_eq!(cert.tolerance, Some(EMPIRICAL_TOL));
        assert!(cert.persistent_vector.is_none());
        assert!(cert.absence_certified_depth.is_some());
    }

    #[test]
    fn dual_dual_identity_on_random_rational_lattices() {
        // seeded LCG over small rationals; exact duals both ways
        let mut state = 0x12345678u64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 33) % 17) as i64 - 8
        };
        let mut tested = 0;
        while tested < 100 {
            let (a, b, c, d) = (next(), next(), next(), next());
            let (da, db) = (
                next().unsigned_abs().max(1) as i64,
                next().unsigned_abs().max(1) as i64,
            );
            let u = QuadVec2::new(QuadVal::from_rational(a, da), QuadVal::from_rational(b, da));
            let v = QuadVec2::new(QuadVal::from_rational(c, db), QuadVal::from_rational(d, db));
            let lat = QuadLattice::new(u, v);
            if lat.det().is_zero() {
                continue;
            }
            assert!(lat.dual().dual().same_lattice(&lat));
            tested += 1;
        }
    }
}
