use thiserror::Error;

use super::delaunay::{delaunay_triangulate, Triangulation2D, TriangulationError};
use crate::geomodel::Dataset;
use crate::mesh::{Material, TriangleMesh};
use crate::scalar::Real;
use crate::vec3::Vec3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurfaceError {
    #[error("stratum {0} not found")]
    StratumNotFound(String),
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
}

fn lift<T: Real>(tri: &Triangulation2D<T>, z: impl Fn(usize) -> T, material: Material) -> TriangleMesh<T> {
    let positions = tri
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| [p[0], p[1], z(i)])
        .collect();
    let indices = tri
        .triangles
        .iter()
        .flat_map(|t| t.map(|i| i as u32))
        .collect();
    let mut mesh = TriangleMesh::new(positions, indices, material);
    mesh.compute_area_weighted_normals(Some([T::zero(), T::zero(), T::one()]));
    mesh
}

/// TIN through scattered soundings: Delaunay on (x, y), lifted to z, with
/// area-weighted normals oriented +z.
pub fn build_terrain_tin<T: Real>(samples: &[Vec3<T>]) -> Result<TriangleMesh<T>, TriangulationError> {
    let xy: Vec<[T; 2]> = samples.iter().map(|p| [p[0], p[1]]).collect();
    let tri = delaunay_triangulate(&xy)?;
    Ok(lift(
        &tri,
        |i| samples[i][2],
        Material::new("terrain", [0.55, 0.5, 0.42, 1.0]),
    ))
}

/// Horizon of a stratum's top through every borehole that drilled it.
pub fn build_horizon_surface<T: Real>(dataset: &Dataset<T>, stratum_id: &str) -> Result<TriangleMesh<T>, SurfaceError> {
    let color = dataset
        .order
        .color(stratum_id)
        .ok_or_else(|| SurfaceError::StratumNotFound(stratum_id.to_string()))?;
    let picks = horizon_picks(dataset, stratum_id);
    if picks.is_empty() {
        return Err(SurfaceError::StratumNotFound(stratum_id.to_string()));
    }
    if picks.len() < 3 {
        return Err(TriangulationError::TooFewPoints(picks.len()).into());
    }
    let xy: Vec<[T; 2]> = picks.iter().map(|p| [p[0], p[1]]).collect();
    let tri = delaunay_triangulate(&xy)?;
    Ok(lift(&tri, |i| picks[i][2], Material::new(stratum_id, color)))
}

/// World (x, y, z) of the stratum top at each borehole that drilled it.
pub fn horizon_picks<T: Real>(dataset: &Dataset<T>, stratum_id: &str) -> Vec<Vec3<T>> {
    dataset
        .boreholes_with(stratum_id)
        .filter_map(|b| b.stratum_top_z(stratum_id).map(|z| [b.location[0], b.location[1], z]))
        .collect()
}
