//! The biprism prototile and rotations about the stacking axis.
//!
//! The tile is the convex hull of eight vertices built from four vectors
//!
//! ```text
//! a = (a_len, 0, 0)            b = (b1, b2, 0)
//! c = lambda*b + (0, 0, c3)    d = lambda*a - (0, 0, c3)
//! ```
//!
//! with `b1 = a_len*cos(phi)`, `b2 = a_len*sin(phi)`. It is the union of two
//! triangular prisms glued along the rhomb `{0, a, b, a+b}`; the top ridge
//! `{c, a+c}` runs parallel to `a` and the bottom ridge `{d, b+d}` parallel
//! to `b`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angle::{AngleError, AngleSpec};
use crate::exact::QuadMat2;
use crate::vec::{Vec2, Vec3};

/// Relative tolerance for float-mode geometry identities.
pub const GEOM_REL_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("lambda must lie strictly between 0 and 1, got {0}")]
    BadLambda(f64),
    #[error("{name} must be positive, got {value}")]
    NonPositiveLength { name: &'static str, value: f64 },
    #[error("degenerate tile: b2 = a_len*sin(phi) vanished")]
    DegenerateRhomb,
    #[error(transparent)]
    Angle(#[from] AngleError),
}

/// Defining parameters of the tile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TileParams {
    pub lambda: f64,
    pub a_len: f64,
    pub angle: AngleSpec,
    pub c3: f64,
}

impl TileParams {
    pub fn new(lambda: f64, a_len: f64, angle: AngleSpec, c3: f64) -> Result<Self, GeometryError> {
        let p = TileParams {
            lambda,
            a_len,
            angle,
            c3,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        self.angle.validate()?;
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(GeometryError::BadLambda(self.lambda));
        }
        if !self.a_len.is_finite() || self.a_len <= 0.0 {
            return Err(GeometryError::NonPositiveLength {
                name: "a_len",
                value: self.a_len,
            });
        }
        if !self.c3.is_finite() || self.c3 <= 0.0 {
            return Err(GeometryError::NonPositiveLength {
                name: "c3",
                value: self.c3,
            });
        }
        if self.b2() <= 0.0 {
            return Err(GeometryError::DegenerateRhomb);
        }
        Ok(())
    }

    /// `b1 = a_len * cos(phi)`.
    pub fn b1(&self) -> f64 {
        self.a_len * self.angle.cos_sin().0
    }

    /// `b2 = a_len * sin(phi)`.
    pub fn b2(&self) -> f64 {
        self.a_len * self.angle.cos_sin().1
    }

    /// Planar lattice generator `a`.
    pub fn a_planar(&self) -> Vec2 {
        Vec2::new(self.a_len, 0.0)
    }

    /// Planar lattice generator `b`.
    pub fn b_planar(&self) -> Vec2 {
        Vec2::new(self.b1(), self.b2())
    }

    /// The tile parameters of the body-centered-cubic special case:
    /// `lambda = 1/2`, unit `a`, a quarter-turn stacking angle, `c3 = 1/2`.
    pub fn bcc() -> Self {
        TileParams {
            lambda: 0.5,
            a_len: 1.0,
            angle: AngleSpec::RationalCos { p: 0, q: 1 },
            c3: 0.5,
        }
    }
}

/// The eight-vertex biprism mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct TileMesh {
    /// `{0, a, b, a+b, c, a+c, d, b+d}`, in that order.
    pub vertices: [Vec3; 8],
    pub a: Vec3,
    pub b: Vec3,
    pub c: Vec3,
    pub d: Vec3,
}

/// Build the tile mesh from parameters.
pub fn build_tile(params: &TileParams) -> Result<TileMesh, GeometryError> {
    params.validate()?;
    let a = Vec3::new(params.a_len, 0.0, 0.0);
    let b = Vec3::new(params.b1(), params.b2(), 0.0);
    let c = b * params.lambda + Vec3::new(0.0, 0.0, params.c3);
    let d = a * params.lambda - Vec3::new(0.0, 0.0, params.c3);
    Ok(TileMesh {
        vertices: [Vec3::ZERO, a, b, a + b, c, a + c, d, b + d],
        a,
        b,
        c,
        d,
    })
}

/// Volume of the tile: `a_len * b2 * c3`, i.e. rhomb area times height.
pub fn tile_volume(mesh: &TileMesh) -> f64 {
    let rhomb_area = mesh.a.planar().perp_dot(mesh.b.planar()).abs();
    rhomb_area * mesh.c.z
}

/// Facets of the biprism as index quads/triangles into `TileMesh::vertices`.
///
/// Index names: 0:origin 1:a 2:b 3:a+b 4:c 5:a+c 6:d 7:b+d.
const FACET_QUADS: [[usize; 4]; 4] = [
    [0, 1, 5, 4], // front slope of the top prism
    [2, 3, 5, 4], // back slope of the top prism
    [0, 2, 7, 6], // slope of the bottom prism through the origin
    [1, 3, 7, 6], // slope of the bottom prism through a
];
const FACET_TRIS: [[usize; 3]; 4] = [
    [0, 2, 4], // top prism end at the origin
    [1, 3, 5], // top prism end at a
    [0, 1, 6], // bottom prism end along a
    [2, 3, 7], // bottom prism end along b
];

/// Triangulated facets, each wound counterclockwise viewed from outside.
pub fn triangulated_facets(mesh: &TileMesh) -> Vec<[usize; 3]> {
    let centroid = mesh
        .vertices
        .iter()
        .fold(Vec3::ZERO, |acc, &v| acc + v)
        .scale(1.0 / 8.0);
    let mut tris = Vec::with_capacity(12);
    let mut push_oriented = |mut t: [usize; 3]| {
        let (p0, p1, p2) = (
            mesh.vertices[t[0]],
            mesh.vertices[t[1]],
            mesh.vertices[t[2]],
        );
        let n = (p1 - p0).cross(p2 - p0);
        // outward normal: flip if it points towards the centroid
        if n.dot(p0 - centroid) < 0.0 {
            t.swap(1, 2);
        }
        tris.push(t);
    };
    for q in FACET_QUADS {
        push_oriented([q[0], q[1], q[2]]);
        push_oriented([q[0], q[2], q[3]]);
    }
    for t in FACET_TRIS {
        push_oriented(t);
    }
    tris
}

/// Serialize the mesh as a Wavefront OBJ string.
pub fn mesh_to_obj(mesh: &TileMesh) -> String {
    let mut out = String::new();
    out.push_str("# scd tile\n");
    for v in &mesh.vertices {
        out.push_str(&format!("v {:.16e} {:.16e} {:.16e}\n", v.x, v.y, v.z));
    }
    for t in triangulated_facets(mesh) {
        // OBJ indices are 1-based
        out.push_str(&format!("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1));
    }
    out
}

/// Rotation about the `e3` axis by `-m*phi`.
///
/// The float matrix is always present; when the angle has a rational cosine
/// the planar block is additionally carried exactly as a 2x2 matrix over
/// `Q(sqrt(q^2 - p^2))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation3 {
    mat: [[f64; 3]; 3],
    exact: Option<QuadMat2>,
}

impl Rotation3 {
    pub fn identity() -> Self {
        rotation_power(&AngleSpec::RationalCos { p: 0, q: 1 }, 0)
    }

    /// Row-major 3x3 matrix entries.
    pub fn matrix(&self) -> [[f64; 3]; 3] {
        self.mat
    }

    /// Exact planar block, when the angle permits one.
    pub fn exact_planar(&self) -> Option<&QuadMat2> {
        self.exact.as_ref()
    }

    pub fn apply(&self, v: Vec3) -> Vec3 {
        let m = &self.mat;
        Vec3::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }

    pub fn apply_planar(&self, v: Vec2) -> Vec2 {
        let m = &self.mat;
        Vec2::new(m[0][0] * v.x + m[0][1] * v.y, m[1][0] * v.x + m[1][1] * v.y)
    }

    pub fn transpose(&self) -> Self {
        let m = &self.mat;
        Rotation3 {
            mat: [
                [m[0][0], m[1][0], m[2][0]],
                [m[0][1], m[1][1], m[2][1]],
                [m[0][2], m[1][2], m[2][2]],
            ],
            exact: self.exact.as_ref().map(|e| e.transpose()),
        }
    }

    pub fn compose(&self, other: &Rotation3) -> Self {
        let (a, b) = (&self.mat, &other.mat);
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = (0..3).map(|k| a[i][k] * b[k][j]).sum();
            }
        }
        let exact = match (&self.exact, &other.exact) {
            (Some(x), Some(y)) => Some(x.mul(y)),
            _ => None,
        };
        Rotation3 { mat: m, exact }
    }
}

/// `R(m)`: the rotation through `-m*phi` about the `e3` axis.
pub fn rotation_power(angle: &AngleSpec, m: i64) -> Rotation3 {
    if let Some((p, q)) = angle.exact_cos() {
        // float entries derived from the exact block so the two stay consistent
        let powered = QuadMat2::rotation_minus_phi(p, q).pow(m);
        let ents = powered.to_f64();
        return Rotation3 {
            mat: [
                [ents[0][0], ents[0][1], 0.0],
                [ents[1][0], ents[1][1], 0.0],
                [0.0, 0.0, 1.0],
            ],
            exact: Some(powered),
        };
    }
    let t = -(m as f64) * angle.phi();
    let (s, c) = t.sin_cos();
    Rotation3 {
        mat: [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]],
        exact: None,
    }
}
