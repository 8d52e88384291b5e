//! Stacking-angle specifications.
//!
//! Whether the stacking rotation has finite order, and whether its cosine is
//! rational, are *declared* properties of the input, never inferred from
//! floating point. The three variants keep those declarations explicit:
//!
//! * [`AngleSpec::RationalCos`] — `phi = arccos(p/q)`, exact arithmetic
//!   available in `Q(sqrt(q^2 - p^2))`;
//! * [`AngleSpec::RationalPi`] — `phi = (num/den)·pi`, finite rotation order;
//! * [`AngleSpec::Generic`] — an arbitrary angle in radians, float-only.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AngleError {
    #[error("rational cosine p/q must satisfy 0 <= p < q and gcd(p, q) = 1, got {p}/{q}")]
    BadRationalCos { p: i64, q: i64 },
    #[error("rational multiple of pi must satisfy 0 < num/den <= 1/2, got {num}/{den}")]
    BadRationalPi { num: i64, den: i64 },
    #[error("generic angle must lie in (0, pi/2], got {phi}")]
    BadGeneric { phi: f64 },
}

/// The stacking angle `phi` between consecutive layers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleSpec {
    /// `phi = arccos(p/q)` with `0 <= p < q`, `gcd(p, q) = 1`.
    RationalCos { p: i64, q: i64 },
    /// `phi = (num/den)·pi` with `0 < num/den <= 1/2`.
    RationalPi { num: i64, den: i64 },
    /// `phi` in radians, `0 < phi <= pi/2`.
    Generic { phi: f64 },
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl AngleSpec {
    pub fn rational_cos(p: i64, q: i64) -> Result<Self, AngleError> {
        if q < 1 || p < 0 || p >= q || gcd(p, q) != 1 {
            return Err(AngleError::BadRationalCos { p, q });
        }
        Ok(AngleSpec::RationalCos { p, q })
    }

    pub fn rational_pi(num: i64, den: i64) -> Result<Self, AngleError> {
        if den < 1 || num < 1 || 2 * num > den {
            return Err(AngleError::BadRationalPi { num, den });
        }
        let g = gcd(num, den);
        Ok(AngleSpec::RationalPi {
            num: num / g,
            den: den / g,
        })
    }

    pub fn generic(phi: f64) -> Result<Self, AngleError> {
        if !(phi > 0.0 && phi <= PI / 2.0) {
            return Err(AngleError::BadGeneric { phi });
        }
        Ok(AngleSpec::Generic { phi })
    }

    /// Validate an already-constructed value (e.g. after deserialization).
    pub fn validate(&self) -> Result<(), AngleError> {
        match *self {
            AngleSpec::RationalCos { p, q } => Self::rational_cos(p, q).map(|_| ()),
            AngleSpec::RationalPi { num, den } => {
                if den < 1 || num < 1 || 2 * num > den || gcd(num, den) != 1 {
                    Err(AngleError::BadRationalPi { num, den })
                } else {
                    Ok(())
                }
            }
            AngleSpec::Generic { phi } => Self::generic(phi).map(|_| ()),
        }
    }

    /// The angle in radians.
    pub fn phi(&self) -> f64 {
        match *self {
            AngleSpec::RationalCos { p, q } => (p as f64 / q as f64).acos(),
            AngleSpec::RationalPi { num, den } => PI * num as f64 / den as f64,
            AngleSpec::Generic { phi } => phi,
        }
    }

    /// `(cos phi, sin phi)`, taking exact shortcuts where available.
    pub fn cos_sin(&self) -> (f64, f64) {
        match *self {
            AngleSpec::RationalCos { p, q } => {
                let c = p as f64 / q as f64;
                let d = (q * q - p * p) as f64;
                (c, d.sqrt() / q as f64)
            }
            _ => {
                let phi = self.phi();
                (phi.cos(), phi.sin())
            }
        }
    }

    /// Whether `phi` is a rational multiple of `pi`.
    ///
    /// For a rational cosine this is Niven's theorem: among `0 < phi <= pi/2`
    /// only `cos phi = 0` and `cos phi = 1/2` qualify. `Generic` angles are
    /// treated as incommensurate by declaration.
    pub fn is_commensurate(&self) -> bool {
        match *self {
            AngleSpec::RationalPi { .. } => true,
            AngleSpec::RationalCos { p, q } => (p, q) == (0, 1) || (p, q) == (1, 2),
            AngleSpec::Generic { .. } => false,
        }
    }

    /// Order of the stacking rotation (smallest `k >= 1` with `R^k = id`),
    /// or `None` when the rotation has infinite order.
    pub fn rotation_order(&self) -> Option<i64> {
        match *self {
            AngleSpec::RationalPi { num, den } => {
                // R rotates by phi = pi*num/den; k*phi must be a multiple of 2*pi.
                let g = gcd(num, 2 * den);
                Some(2 * den / g)
            }
            AngleSpec::RationalCos { p, q } => match (p, q) {
                (0, 1) => Some(4),
                (1, 2) => Some(6),
                _ => None,
            },
            AngleSpec::Generic { .. } => None,
        }
    }

    /// The exact rational cosine `(p, q)` when one is available.
    ///
    /// `RationalPi(1,2)` and `RationalPi(1,3)` fold into `(0,1)` and `(1,2)`;
    /// everything else rational-pi or generic has an irrational cosine.
    pub fn exact_cos(&self) -> Option<(i64, i64)> {
        match *self {
            AngleSpec::RationalCos { p, q } => Some((p, q)),
            AngleSpec::RationalPi { num: 1, den: 2 } => Some((0, 1)),
            AngleSpec::RationalPi { num: 1, den: 3 } => Some((1, 2)),
            _ => None,
        }
    }
}

/// Best rational approximation `p/q` to `x` with `q <= max_den`, by
/// continued fractions. Used to probe whether a float is plausibly rational.
pub fn rational_probe(x: f64, max_den: i64) -> (i64, i64) {
    let mut a = x.floor();
    let mut frac = x - a;
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0i64, a as i64, 1i64);
    for _ in 0..64 {
        if frac.abs() < 1e-15 {
            break;
        }
        let inv = 1.0 / frac;
        a = inv.floor();
        frac = inv - a;
        let p2 = (a as i64).saturating_mul(p1).saturating_add(p0);
        let q2 = (a as i64).saturating_mul(q1).saturating_add(q0);
        if q2 > max_den {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    (p1, q1)
}
