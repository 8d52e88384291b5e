//! Exact arithmetic for lattice algebra.
//!
//! A stacking angle with `cos(phi) = p/q` puts all rotated-lattice entries
//! inside `Q(sqrt(D))` with `D = q^2 - p^2`. Writing `D = f^2 * d` with `d`
//! squarefree, values are kept as `a + b*sqrt(d)` over [`BigRational`]
//! coefficients, so equality, membership and intersections are exact integer
//! linear algebra — no floating-point comparison ever decides a lattice
//! question.
//!
//! Module intersections reduce to integer kernels via the Hermite normal
//! form: a planar vector `((x1 + y1*sqrt(d))/Q, (x2 + y2*sqrt(d))/Q)` is
//! coordinatized as `(x1, y1, x2, y2)` in `Z^4` (or `Z^2` when `d = 1`),
//! and two rank-2 lattices intersect in the kernel of the stacked generator
//! matrix.

use num::rational::BigRational;
use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};

use crate::vec::Vec2;

/// `n = f^2 * d` with `d` squarefree; returns `(f, d)`.
pub fn squarefree_decompose(n: i64) -> (i64, i64) {
    assert!(n > 0, "squarefree_decompose expects a positive integer");
    let mut f = 1i64;
    let mut d = n;
    let mut p = 2i64;
    while p * p <= d {
        while d % (p * p) == 0 {
            d /= p * p;
            f *= p;
        }
        p += 1;
    }
    (f, d)
}

/// An element `a + b*sqrt(d)` of `Q(sqrt(d))`, `d` squarefree.
///
/// `d == 1` encodes a plain rational; the constructor folds `b` into `a`
/// so representations stay unique. A value with `b = 0` is compatible with
/// any ambient `d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadVal {
    pub a: BigRational,
    pub b: BigRational,
    pub d: i64,
}

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl QuadVal {
    pub fn new(a: BigRational, b: BigRational, d: i64) -> Self {
        assert!(d >= 1, "d must be a positive squarefree integer");
        if d == 1 {
            return QuadVal {
                a: a + b,
                b: BigRational::zero(),
                d: 1,
            };
        }
        if b.is_zero() {
            // rational values carry d = 1 so equality is representation-free
            return QuadVal { a, b, d: 1 };
        }
        QuadVal { a, b, d }
    }

    pub fn from_rational(num: i64, den: i64) -> Self {
        QuadVal::new(big(num) / big(den), BigRational::zero(), 1)
    }

    pub fn from_big_rational(a: BigRational) -> Self {
        QuadVal::new(a, BigRational::zero(), 1)
    }

    pub fn zero() -> Self {
        QuadVal::from_rational(0, 1)
    }

    pub fn one() -> Self {
        QuadVal::from_rational(1, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    fn unified_d(&self, other: &QuadVal) -> i64 {
        match (self.b.is_zero(), other.b.is_zero()) {
            (true, true) => 1,
            (true, false) => other.d,
            (false, true) => self.d,
            (false, false) => {
                assert_eq!(self.d, other.d, "mixing incompatible quadratic fields");
                self.d
            }
        }
    }

    pub fn add(&self, other: &QuadVal) -> QuadVal {
        let d = self.unified_d(other);
        QuadVal::new(&self.a + &other.a, &self.b + &other.b, d)
    }

    pub fn sub(&self, other: &QuadVal) -> QuadVal {
        let d = self.unified_d(other);
        QuadVal::new(&self.a - &other.a, &self.b - &other.b, d)
    }

    pub fn neg(&self) -> QuadVal {
        QuadVal::new(-self.a.clone(), -self.b.clone(), self.d)
    }

    pub fn mul(&self, other: &QuadVal) -> QuadVal {
        let d = self.unified_d(other);
        let dd = big(d);
        QuadVal::new(
            &self.a * &other.a + (&self.b * &other.b) * &dd,
            &self.a * &other.b + &self.b * &other.a,
            d,
        )
    }

    pub fn div(&self, other: &QuadVal) -> QuadVal {
        assert!(!other.is_zero(), "division by zero");
        let d = self.unified_d(other);
        let dd = big(other.d);
        // conjugate: (a + b sqrt d)^-1 = (a - b sqrt d) / (a^2 - b^2 d)
        let norm = &other.a * &other.a - (&other.b * &other.b) * &dd;
        let conj = QuadVal::new(other.a.clone(), -other.b.clone(), other.d);
        let prod = self.mul(&conj);
        QuadVal::new(prod.a / &norm, prod.b / &norm, d)
    }

    /// Sign of the real value: -1, 0 or +1.
    pub fn sign(&self) -> i32 {
        let rat_sign = |r: &BigRational| -> i32 {
            if r.is_zero() {
                0
            } else if r.is_positive() {
                1
            } else {
                -1
            }
        };
        if self.b.is_zero() {
            return rat_sign(&self.a);
        }
        let sa = rat_sign(&self.a);
        let sb = rat_sign(&self.b);
        if sa == sb || (sa == 0 && sb != 0) {
            return sb;
        }
        if sb == 0 {
            return sa;
        }
        // opposite signs: compare a^2 against b^2 d
        let lhs = &self.a * &self.a;
        let rhs = (&self.b * &self.b) * big(self.d);
        match lhs.cmp(&rhs) {
            std::cmp::Ordering::Equal => 0,
            std::cmp::Ordering::Greater => sa,
            std::cmp::Ordering::Less => sb,
        }
    }

    pub fn cmp_val(&self, other: &QuadVal) -> std::cmp::Ordering {
        match self.sub(other).sign() {
            -1 => std::cmp::Ordering::Less,
            0 => std::cmp::Ordering::Equal,
            _ => std::cmp::Ordering::Greater,
        }
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        a + b * (self.d as f64).sqrt()
    }

    /// Render as text, e.g. `3/5`, `(1 + 2*sqrt(2))/3`.
    pub fn render(&self) -> String {
        if self.b.is_zero() {
            return format!("{}", self.a);
        }
        format!("{} + {}*sqrt({})", self.a, self.b, self.d)
    }
}

/// A planar vector with [`QuadVal`] components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadVec2 {
    pub x: QuadVal,
    pub y: QuadVal,
}

impl QuadVec2 {
    pub fn new(x: QuadVal, y: QuadVal) -> Self {
        QuadVec2 { x, y }
    }

    pub fn add(&self, o: &QuadVec2) -> QuadVec2 {
        QuadVec2::new(self.x.add(&o.x), self.y.add(&o.y))
    }

    pub fn sub(&self, o: &QuadVec2) -> QuadVec2 {
        QuadVec2::new(self.x.sub(&o.x), self.y.sub(&o.y))
    }

    pub fn scale(&self, s: &QuadVal) -> QuadVec2 {
        QuadVec2::new(self.x.mul(s), self.y.mul(s))
    }

    pub fn dot(&self, o: &QuadVec2) -> QuadVal {
        self.x.mul(&o.x).add(&self.y.mul(&o.y))
    }

    pub fn norm_sq(&self) -> QuadVal {
        self.dot(self)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn to_vec2(&self) -> Vec2 {
        Vec2::new(self.x.to_f64(), self.y.to_f64())
    }
}

/// 2x2 matrix over `Q(sqrt(d))`, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadMat2 {
    pub rows: [[QuadVal; 2]; 2],
}

impl QuadMat2 {
    pub fn identity() -> Self {
        QuadMat2 {
            rows: [
                [QuadVal::one(), QuadVal::zero()],
                [QuadVal::zero(), QuadVal::one()],
            ],
        }
    }

    /// Planar block of the rotation through `-phi` with `cos(phi) = p/q`:
    /// `[[p/q, sin], [-sin, p/q]]` where `sin = f*sqrt(d)/q`.
    pub fn rotation_minus_phi(p: i64, q: i64) -> Self {
        let dd = q * q - p * p;
        let (f, d) = squarefree_decompose(dd.max(1));
        let cos = QuadVal::from_rational(p, q);
        let sin = if dd == 0 {
            QuadVal::zero()
        } else {
            QuadVal::new(BigRational::zero(), big(f) / big(q), d)
        };
        QuadMat2 {
            rows: [[cos.clone(), sin.clone()], [sin.neg(), cos]],
        }
    }

    pub fn mul(&self, o: &QuadMat2) -> QuadMat2 {
        let e = |i: usize, j: usize| {
            self.rows[i][0]
                .mul(&o.rows[0][j])
                .add(&self.rows[i][1].mul(&o.rows[1][j]))
        };
        QuadMat2 {
            rows: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]],
        }
    }

    pub fn transpose(&self) -> QuadMat2 {
        QuadMat2 {
            rows: [
                [self.rows[0][0].clone(), self.rows[1][0].clone()],
                [self.rows[0][1].clone(), self.rows[1][1].clone()],
            ],
        }
    }

    /// Power of a rotation block; negative exponents use orthogonality
    /// (`R^-1 = R^T`).
    pub fn pow(&self, m: i64) -> QuadMat2 {
        let base = if m < 0 {
            self.transpose()
        } else {
            self.clone()
        };
        let mut out = QuadMat2::identity();
        for _ in 0..m.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    pub fn apply(&self, v: &QuadVec2) -> QuadVec2 {
        QuadVec2::new(
            self.rows[0][0].mul(&v.x).add(&self.rows[0][1].mul(&v.y)),
            self.rows[1][0].mul(&v.x).add(&self.rows[1][1].mul(&v.y)),
        )
    }

    pub fn det(&self) -> QuadVal {
        self.rows[0][0]
            .mul(&self.rows[1][1])
            .sub(&self.rows[0][1].mul(&self.rows[1][0]))
    }

    pub fn is_identity(&self) -> bool {
        *self == QuadMat2::identity()
    }

    pub fn to_f64(&self) -> [[f64; 2]; 2] {
        [
            [self.rows[0][0].to_f64(), self.rows[0][1].to_f64()],
            [self.rows[1][0].to_f64(), self.rows[1][1].to_f64()],
        ]
    }
}

// ---------------------------------------------------------------------------
// Integer matrix algebra
// ---------------------------------------------------------------------------

/// Row-style Hermite normal form with transform: returns `(h, u)` with
/// `u * m = h`, `u` unimodular, `h` in row echelon form with positive pivots
/// and reduced entries above each pivot.
pub fn hnf_with_transform(m: &[Vec<BigInt>]) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut h: Vec<Vec<BigInt>> = m.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..rows)
        .map(|i| {
            (0..rows)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect();
    let mut pivot_row = 0usize;
    for col in 0..cols {
        if pivot_row >= rows {
            break;
        }
        loop {
            // smallest nonzero entry in this column at or below pivot_row
            let mut best: Option<usize> = None;
            for r in pivot_row..rows {
                if !h[r][col].is_zero()
                    && best.is_none_or(|b| h[r][col].magnitude() < h[b][col].magnitude())
                {
                    best = Some(r);
                }
            }
            let Some(best) = best else { break };
            h.swap(pivot_row, best);
            u.swap(pivot_row, best);
            let mut done = true;
            let (hp, up) = (h[pivot_row].clone(), u[pivot_row].clone());
            for r in pivot_row + 1..rows {
                if h[r][col].is_zero() {
                    continue;
                }
                let q = h[r][col].div_floor(&hp[col]);
                row_axpy(&mut h[r], &q, &hp);
                row_axpy(&mut u[r], &q, &up);
                if !h[r][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[pivot_row][col].is_zero() {
            continue;
        }
        if h[pivot_row][col].is_negative() {
            for x in h[pivot_row].iter_mut().chain(u[pivot_row].iter_mut()) {
                *x = -x.clone();
            }
        }
        let (hp, up) = (h[pivot_row].clone(), u[pivot_row].clone());
        for r in 0..pivot_row {
            let q = h[r][col].div_floor(&hp[col]);
            if q.is_zero() {
                continue;
            }
            row_axpy(&mut h[r], &q, &hp);
            row_axpy(&mut u[r], &q, &up);
        }
        pivot_row += 1;
    }
    (h, u)
}

/// `row -= q * other`, element-wise.
fn row_axpy(row: &mut [BigInt], q: &BigInt, other: &[BigInt]) {
    for (x, o) in row.iter_mut().zip(other.iter()) {
        *x -= q * o;
    }
}

/// HNF basis (nonzero rows) of the row span of `gens`.
pub fn row_basis(gens: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let (h, _) = hnf_with_transform(gens);
    h.into_iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect()
}

/// Basis of the intersection of two integer row spans.
pub fn intersect_row_spans(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let cols = a[0].len();
    let mut stacked: Vec<Vec<BigInt>> = Vec::with_capacity(a.len() + b.len());
    stacked.extend(a.iter().cloned());
    stacked.extend(b.iter().map(|row| row.iter().map(|x| -x.clone()).collect()));
    let (h, u) = hnf_with_transform(&stacked);
    let mut gens = Vec::new();
    for (i, hrow) in h.iter().enumerate() {
        if hrow.iter().any(|x| !x.is_zero()) {
            continue;
        }
        // kernel row: combination of `a` rows equals combination of `b` rows
        let mut v = vec![BigInt::zero(); cols];
        for (j, arow) in a.iter().enumerate() {
            for c in 0..cols {
                v[c] += &u[i][j] * &arow[c];
            }
        }
        gens.push(v);
    }
    row_basis(&gens)
}

// ---------------------------------------------------------------------------
// Exact planar lattices
// ---------------------------------------------------------------------------

/// A rank-2 planar lattice with basis vectors in `Q(sqrt(d))^2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadLattice {
    pub basis: [QuadVec2; 2],
}

impl QuadLattice {
    pub fn new(u: QuadVec2, v: QuadVec2) -> Self {
        QuadLattice { basis: [u, v] }
    }

    /// The lattice `Z(1,0) + Z(cos phi, sin phi)` for `cos phi = p/q`.
    pub fn gamma(p: i64, q: i64) -> Self {
        let rot = QuadMat2::rotation_minus_phi(p, q);
        // b = (cos, sin) is the first row of R with the sign of sin flipped
        let b = QuadVec2::new(rot.rows[0][0].clone(), rot.rows[0][1].clone());
        QuadLattice::new(QuadVec2::new(QuadVal::one(), QuadVal::zero()), b)
    }

    pub fn transformed(&self, m: &QuadMat2) -> QuadLattice {
        QuadLattice::new(m.apply(&self.basis[0]), m.apply(&self.basis[1]))
    }

    pub fn det(&self) -> QuadVal {
        self.basis[0]
            .x
            .mul(&self.basis[1].y)
            .sub(&self.basis[0].y.mul(&self.basis[1].x))
    }

    /// Solve `x*u + y*v = w` over the field.
    pub fn coords_of(&self, w: &QuadVec2) -> (QuadVal, QuadVal) {
        let det = self.det();
        assert!(!det.is_zero(), "singular lattice basis");
        let x =
            w.x.mul(&self.basis[1].y)
                .sub(&w.y.mul(&self.basis[1].x))
                .div(&det);
        let y = self.basis[0]
            .x
            .mul(&w.y)
            .sub(&self.basis[0].y.mul(&w.x))
            .div(&det);
        (x, y)
    }

    /// Exact membership test.
    pub fn contains(&self, w: &QuadVec2) -> bool {
        let (x, y) = self.coords_of(w);
        is_rational_integer(&x) && is_rational_integer(&y)
    }

    /// Dual lattice: basis columns of the inverse transpose.
    pub fn dual(&self) -> QuadLattice {
        let det = self.det();
        assert!(!det.is_zero(), "singular lattice basis");
        // B = [u v] as columns; B^-T columns are (v_y, -v_x)/det, (-u_y, u_x)/det
        let u = &self.basis[0];
        let v = &self.basis[1];
        QuadLattice::new(
            QuadVec2::new(v.y.div(&det), v.x.neg().div(&det)),
            QuadVec2::new(u.y.neg().div(&det), u.x.div(&det)),
        )
    }

    /// Set equality (mutual containment of bases).
    pub fn same_lattice(&self, other: &QuadLattice) -> bool {
        other.basis.iter().all(|w| self.contains(w)) && self.basis.iter().all(|w| other.contains(w))
    }

    /// Exact intersection; `None` when the intersection has rank < 2.
    pub fn intersect(&self, other: &QuadLattice) -> Option<QuadLattice> {
        let meet = intersect_quad_modules(&self.basis, &other.basis);
        if meet.len() < 2 {
            return None;
        }
        Some(QuadLattice::new(meet[0].clone(), meet[1].clone()))
    }

    /// Index of a full-rank sublattice inside `self`.
    pub fn index_of(&self, sub: &QuadLattice) -> BigInt {
        let mut entries = Vec::with_capacity(4);
        for w in &sub.basis {
            let (x, y) = self.coords_of(w);
            for c in [x, y] {
                assert!(
                    is_rational_integer(&c),
                    "index_of: sublattice basis not integral in ambient coordinates"
                );
                entries.push(c.a.to_integer());
            }
        }
        let det = &entries[0] * &entries[3] - &entries[1] * &entries[2];
        det.abs()
    }
}

/// Basis (possibly of rank < 2) for the intersection of two planar modules
/// given by generator lists over a common quadratic field.
pub fn intersect_quad_modules(gens_a: &[QuadVec2], gens_b: &[QuadVec2]) -> Vec<QuadVec2> {
    if gens_a.is_empty() || gens_b.is_empty() {
        return Vec::new();
    }
    // common denominator across all rational coefficients
    let mut denom = BigInt::one();
    for v in gens_a.iter().chain(gens_b.iter()) {
        for q in [&v.x, &v.y] {
            denom = denom.lcm(q.a.denom());
            denom = denom.lcm(q.b.denom());
        }
    }
    let d_field = gens_a
        .iter()
        .chain(gens_b.iter())
        .flat_map(|v| [&v.x, &v.y])
        .find(|q| !q.b.is_zero())
        .map(|q| q.d)
        .unwrap_or(1);
    let scale = BigRational::from_integer(denom.clone());
    let coords = |v: &QuadVec2| -> Vec<BigInt> {
        let xa = (&v.x.a * &scale).to_integer();
        let xb = (&v.x.b * &scale).to_integer();
        let ya = (&v.y.a * &scale).to_integer();
        let yb = (&v.y.b * &scale).to_integer();
        if d_field == 1 {
            vec![xa, ya]
        } else {
            vec![xa, xb, ya, yb]
        }
    };
    let rows_a: Vec<Vec<BigInt>> = gens_a.iter().map(coords).collect();
    let rows_b: Vec<Vec<BigInt>> = gens_b.iter().map(coords).collect();
    let meet = intersect_row_spans(&rows_a, &rows_b);
    let back = |row: &Vec<BigInt>| -> QuadVec2 {
        let r = |n: &BigInt| BigRational::new(n.clone(), denom.clone());
        if d_field == 1 {
            QuadVec2::new(
                QuadVal::new(r(&row[0]), BigRational::zero(), 1),
                QuadVal::new(r(&row[1]), BigRational::zero(), 1),
            )
        } else {
            QuadVec2::new(
                QuadVal::new(r(&row[0]), r(&row[1]), d_field),
                QuadVal::new(r(&row[2]), r(&row[3]), d_field),
            )
        }
    };
    meet.iter().map(back).collect()
}

pub(crate) fn is_rational_integer(v: &QuadVal) -> bool {
    v.b.is_zero() && v.a.is_integer()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squarefree_parts() {
        assert_eq!(squarefree_decompose(16), (4, 1));
        assert_eq!(squarefree_decompose(8), (2, 2));
        assert_eq!(squarefree_decompose(3), (1, 3));
        assert_eq!(squarefree_decompose(45), (3, 5));
    }

    #[test]
    fn quadval_sign_and_cmp() {
        // 1 - sqrt(2) < 0 < 3 - 2*sqrt(2)
        let v1 = QuadVal::new(big(1), big(-1), 2);
        let v2 = QuadVal::new(big(3), big(-2), 2);
        assert_eq!(v1.sign(), -1);
        assert_eq!(v2.sign(), 1);
        assert_eq!(v1.cmp_val(&v2), std::cmp::Ordering::Less);
    }

    #[test]
    fn quadval_field_ops() {
        // (1 + sqrt(2)) * (1 - sqrt(2)) = -1
        let u = QuadVal::new(big(1), big(1), 2);
        let v = QuadVal::new(big(1), big(-1), 2);
        assert_eq!(u.mul(&v), QuadVal::from_rational(-1, 1));
        // division round-trips
        let w = u.div(&v);
        assert_eq!(w.mul(&v), u);
    }

    #[test]
    fn rotation_block_pythagorean() {
        // 3-4-5: sin = 4/5 rational, so d = 1
        let r = QuadMat2::rotation_minus_phi(3, 5);
        assert_eq!(r.rows[0][0], QuadVal::from_rational(3, 5));
        assert_eq!(r.rows[0][1], QuadVal::from_rational(4, 5));
        assert_eq!(r.rows[1][0], QuadVal::from_rational(-4, 5));
        assert!(r.mul(&r.transpose()).is_identity());
        assert_eq!(r.det(), QuadVal::one());
    }

    #[test]
    fn rotation_block_quadratic() {
        // cos = 1/3, sin = 2*sqrt(2)/3
        let r = QuadMat2::rotation_minus_phi(1, 3);
        assert_eq!(r.rows[0][1].d, 2);
        assert!(r.mul(&r.transpose()).is_identity());
        // power law
        assert_eq!(r.pow(3), r.mul(&r).mul(&r));
        assert!(r.pow(-2).mul(&r.pow(2)).is_identity());
    }

    #[test]
    fn hnf_reduces_and_tracks_transform() {
        let m: Vec<Vec<BigInt>> = vec![
            vec![BigInt::from(4), BigInt::from(6)],
            vec![BigInt::from(6), BigInt::from(9)],
            vec![BigInt::from(2), BigInt::from(3)],
        ];
        let (h, u) = hnf_with_transform(&m);
        // rank 1: single nonzero row (2, 3)
        assert_eq!(h[0], vec![BigInt::from(2), BigInt::from(3)]);
        assert!(h[1].iter().all(|x| x.is_zero()));
        assert!(h[2].iter().all(|x| x.is_zero()));
        // check u * m = h
        for i in 0..3 {
            for c in 0..2 {
                let mut acc = BigInt::zero();
                for j in 0..3 {
                    acc += &u[i][j] * &m[j][c];
                }
                assert_eq!(acc, h[i][c]);
            }
        }
    }

    #[test]
    fn intersect_simple_sublattices() {
        // 2Z^2 and 3Z^2 meet in 6Z^2
        let a = vec![
            vec![BigInt::from(2), BigInt::from(0)],
            vec![BigInt::from(0), BigInt::from(2)],
        ];
        let b = vec![
            vec![BigInt::from(3), BigInt::from(0)],
            vec![BigInt::from(0), BigInt::from(3)],
        ];
        let meet = intersect_row_spans(&a, &b);
        assert_eq!(meet.len(), 2);
        assert_eq!(meet[0], vec![BigInt::from(6), BigInt::from(0)]);
        assert_eq!(meet[1], vec![BigInt::from(0), BigInt::from(6)]);
    }

    #[test]
    fn gamma_intersection_index_three() {
        // cos = 1/3: the lattice meets its rotated copy with index 3
        let gamma = QuadLattice::gamma(1, 3);
        let r = QuadMat2::rotation_minus_phi(1, 3);
        let rotated = gamma.transformed(&r);
        let meet = gamma.intersect(&rotated).expect("rank-2 intersection");
        assert_eq!(gamma.index_of(&meet), BigInt::from(3));
        assert_eq!(rotated.index_of(&meet), BigInt::from(3));
        // a = (1,0) lies in both (R b = a)
        let a = QuadVec2::new(QuadVal::one(), QuadVal::zero());
        assert!(meet.contains(&a));
    }

    #[test]
    fn dual_of_dual_is_identity() {
        let gamma = QuadLattice::gamma(3, 5);
        let dd = gamma.dual().dual();
        assert!(gamma.same_lattice(&dd));
    }

    #[test]
    fn dual_inner_products_are_integers() {
        let gamma = QuadLattice::gamma(1, 3);
        let dual = gamma.dual();
        for u in &gamma.basis {
            for v in &dual.basis {
                let ip = u.dot(v);
                assert!(is_rational_integer(&ip), "non-integer inner product {ip:?}");
            }
        }
    }
}
