//! 2D Delaunay triangulation, terrain TINs, horizon surfaces and drilling correction.

mod correction;
mod delaunay;
mod tin;

pub use correction::{apply_drilling_correction, interpolate_z, locate_in_projection, CorrectionError};
pub use delaunay::{delaunay_triangulate, Triangulation2D, TriangulationError, EPS_CIRC, EPS_DUP};
pub use tin::{build_horizon_surface, build_terrain_tin, horizon_picks, SurfaceError};
