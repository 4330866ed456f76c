use super::ExportError;
use crate::mesh::TriangleMesh;
use crate::scalar::Real;

/// Planar UV mapping of an image covering `extent` = (x_min, y_min, x_max, y_max).
///
/// UVs are clamped to [0, 1]; geometry is untouched.
pub fn drape_texture<T: Real>(
    mesh: &TriangleMesh<T>,
    extent: [T; 4],
    texture_name: &str,
) -> Result<TriangleMesh<T>, ExportError> {
    let [x0, y0, x1, y1] = extent;
    if !(x1 > x0) || !(y1 > y0) {
        return Err(ExportError::DegenerateExtent);
    }
    let clamp = |v: T| v.max(T::zero()).min(T::one());
    let mut out = mesh.clone();
    out.uvs = Some(
        mesh.positions
            .iter()
            .map(|p| [clamp((p[0] - x0) / (x1 - x0)), clamp((p[1] - y0) / (y1 - y0))])
            .collect(),
    );
    out.material.texture = Some(texture_name.to_string());
    Ok(out)
}
