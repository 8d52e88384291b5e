//! SCD biprism tiles, the layered tilings they admit, and the diffraction
//! spectra of the derived point sets.
//!
//! The crate is organized along the pipeline:
//!
//! * [`angle`] / [`geometry`] — tile parameters, the eight-vertex biprism,
//!   rotations about the stacking axis (exact when the cosine is rational);
//! * [`exact`] — arbitrary-precision arithmetic in `Q(sqrt(D))` and integer
//!   lattice algebra (Hermite normal form, module intersections);
//! * [`lattice`] — planar lattices, duals, coincidence site lattices and
//!   aperiodicity certificates;
//! * [`tiling`] — shift sequences, layer stacking, point-set extraction and
//!   symmetry detection;
//! * [`diffraction`] — Fourier–Bohr sums, autocorrelation, analytic
//!   predictors and spectral classification;
//! * [`verify`] — the named verification suites exposed by the CLI.

pub mod angle;
pub mod diffraction;
pub mod exact;
pub mod geometry;
pub mod lattice;
pub mod sum;
pub mod tiling;
pub mod vec;
pub mod verify;

pub use angle::AngleSpec;
pub use geometry::{Rotation3, TileMesh, TileParams};
pub use lattice::{AperiodicityCertificate, CoincidenceOutcome, Lattice2};
pub use tiling::{PointCloud, ShiftSequence, TilingConfig};
