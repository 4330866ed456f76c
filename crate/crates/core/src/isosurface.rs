//! Marching Cubes with gradient-interpolated vertex normals and invalid-cell skipping.

use thiserror::Error;

use crate::geomodel::ScalarField3D;
use crate::mc_tables::TRI_TABLE;
use crate::mesh::{Material, TriangleMesh};
use crate::scalar::{lerp, Real};
use crate::vec3::{neg, normalize, Vec3};

/// Norm below which an interpolated gradient is treated as zero.
pub const GRADIENT_EPS: f64 = 1e-12;
/// Edge parameters are kept this far from the cell corners.
pub const EDGE_T_CLAMP: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IsoError {
    #[error("field dims {0:?} must be at least 2 on every axis")]
    FieldTooSmall([usize; 3]),
    #[error("iso value must be finite")]
    NonFiniteIso,
    #[error("point does not lie on an edge between two valid nodes")]
    NotOnGridEdge,
    #[error("gradient vanishes at the requested point")]
    DegenerateGradient,
}

const CORNERS: [[usize; 3]; 8] = [
    [0, 0, 0],
    [1, 0, 0],
    [1, 1, 0],
    [0, 1, 0],
    [0, 0, 1],
    [1, 0, 1],
    [1, 1, 1],
    [0, 1, 1],
];

/// Each cube edge as (lower corner, axis) so shared edges map to one key.
const EDGES: [(usize, usize); 12] = [
    (0, 0),
    (1, 1),
    (3, 0),
    (0, 1),
    (4, 0),
    (5, 1),
    (7, 0),
    (4, 1),
    (0, 2),
    (1, 2),
    (2, 2),
    (3, 2),
];

/// Case table triangles are reversed so faces point toward lower values.
const REVERSE_WINDING: bool = false;

fn node_gradient<T: Real>(field: &ScalarField3D<T>, n: [usize; 3]) -> Vec3<T> {
    let g = &field.grid;
    let v0 = field.at(n[0], n[1], n[2]);
    let mut out = [T::zero(); 3];
    for a in 0..3 {
        let h = g.spacing[a];
        let at = |d: isize| -> Option<T> {
            let i = n[a] as isize + d;
            if i < 0 || i as usize >= g.dims[a] {
                return None;
            }
            let mut m = n;
            m[a] = i as usize;
            field.valid_at(m[0], m[1], m[2])
        };
        out[a] = match (at(-1), at(1)) {
            (Some(lo), Some(hi)) => (hi - lo) / (h + h),
            (None, Some(hi)) => (hi - v0) / h,
            (Some(lo), None) => (v0 - lo) / h,
            (None, None) => T::zero(),
        };
    }
    out
}

fn edge_gradient<T: Real>(field: &ScalarField3D<T>, lo: [usize; 3], axis: usize, t: T) -> Vec3<T> {
    let mut hi = lo;
    hi[axis] += 1;
    let (ga, gb) = (node_gradient(field, lo), node_gradient(field, hi));
    [lerp(ga[0], gb[0], t), lerp(ga[1], gb[1], t), lerp(ga[2], gb[2], t)]
}

/// Unit normal at a point on a grid edge: the negative gradient, estimated by
/// central differences at both edge nodes and interpolated along the edge.
pub fn estimate_gradient_normal<T: Real>(field: &ScalarField3D<T>, p: Vec3<T>) -> Result<Vec3<T>, IsoError> {
    let g = &field.grid;
    let tol = T::lit(1e-9);
    let mut lo = [0usize; 3];
    let mut axis = None;
    let mut t = T::zero();
    for a in 0..3 {
        let u = (p[a] - g.origin[a]) / g.spacing[a];
        let r = u.round();
        let last = T::from_count(g.dims[a] - 1);
        if u < -tol || u > last + tol {
            return Err(IsoError::NotOnGridEdge);
        }
        if (u - r).abs() <= tol {
            lo[a] = r.to_usize().unwrap_or(0);
        } else {
            if axis.is_some() {
                return Err(IsoError::NotOnGridEdge);
            }
            let f = u.floor();
            lo[a] = f.to_usize().unwrap_or(0);
            t = u - f;
            axis = Some(a);
        }
    }
    // a node is treated as the start of an edge along x (or the end, at the last node)
    let axis = axis.unwrap_or_else(|| {
        if lo[0] + 1 == g.dims[0] {
            lo[0] -= 1;
            t = T::one();
        }
        0
    });
    let mut hi = lo;
    hi[axis] += 1;
    if field.valid_at(lo[0], lo[1], lo[2]).is_none() || field.valid_at(hi[0], hi[1], hi[2]).is_none() {
        return Err(IsoError::NotOnGridEdge);
    }
    normalize(neg(edge_gradient(field, lo, axis, t)), T::lit(GRADIENT_EPS)).ok_or(IsoError::DegenerateGradient)
}

/// Extracts the `iso` level set of `field` as a welded triangle mesh.
///
/// Cells with any invalid corner are skipped. Triangles face toward lower
/// field values and vertex normals come from [`estimate_gradient_normal`],
/// falling back to the owning face normal where the gradient vanishes.
pub fn marching_cubes<T: Real>(field: &ScalarField3D<T>, iso: T) -> Result<TriangleMesh<T>, IsoError> {
    let g = &field.grid;
    if g.dims.iter().any(|&n| n < 2) {
        return Err(IsoError::FieldTooSmall(g.dims));
    }
    if !iso.is_finite() {
        return Err(IsoError::NonFiniteIso);
    }
    let [nx, ny, nz] = g.dims;
    let mut cache = vec![u32::MAX; g.node_count() * 3];
    let mut positions: Vec<Vec3<T>> = Vec::new();
    let mut normals: Vec<Option<Vec3<T>>> = Vec::new();
    let mut indices: Vec<u32> = Vec::new();
    let t_lo = T::lit(EDGE_T_CLAMP);
    let t_hi = T::one() - t_lo;

    for k in 0..nz - 1 {
        for j in 0..ny - 1 {
            for i in 0..nx - 1 {
                let mut vals = [T::zero(); 8];
                let mut valid = true;
                for (c, off) in CORNERS.iter().enumerate() {
                    match field.valid_at(i + off[0], j + off[1], k + off[2]) {
                        Some(v) => vals[c] = v,
                        None => {
                            valid = false;
                            break;
                        }
                    }
                }
                if !valid {
                    continue;
                }
                let case = (0..8).fold(0usize, |acc, c| acc | (((vals[c] < iso) as usize) << c));
                let row = &TRI_TABLE[case];
                if row[0] < 0 {
                    continue;
                }
                let mut ids = [u32::MAX; 12];
                for (e, &(corner, axis)) in EDGES.iter().enumerate() {
                    let b = (corner, {
                        let mut o = CORNERS[corner];
                        o[axis] += 1;
                        CORNERS.iter().position(|&c| c == o).unwrap()
                    });
                    if (vals[b.0] < iso) == (vals[b.1] < iso) {
                        continue;
                    }
                    let off = CORNERS[corner];
                    let lo = [i + off[0], j + off[1], k + off[2]];
                    let key = g.index(lo[0], lo[1], lo[2]) * 3 + axis;
                    if cache[key] == u32::MAX {
                        let (va, vb) = (vals[b.0], vals[b.1]);
                        let t = ((iso - va) / (vb - va)).max(t_lo).min(t_hi);
                        let pa = g.node_position(lo[0], lo[1], lo[2]);
                        let mut p = pa;
                        p[axis] = lerp(pa[axis], g.axis_coord(axis, lo[axis] + 1), t);
                        cache[key] = positions.len() as u32;
                        positions.push(p);
                        normals.push(normalize(neg(edge_gradient(field, lo, axis, t)), T::lit(GRADIENT_EPS)));
                    }
                    ids[e] = cache[key];
                }
                for tri in row.chunks_exact(3).take_while(|t| t[0] >= 0) {
                    let [a, b, c] = [tri[0], tri[1], tri[2]].map(|e| ids[e as usize]);
                    if REVERSE_WINDING {
                        indices.extend_from_slice(&[a, c, b]);
                    } else {
                        indices.extend_from_slice(&[a, b, c]);
                    }
                }
            }
        }
    }

    let mut mesh = TriangleMesh::new(positions, indices, Material::new("isosurface", [0.95, 0.55, 0.2, 1.0]));
    let mut fallback: Vec<Option<Vec3<T>>> = vec![None; mesh.positions.len()];
    if normals.iter().any(Option::is_none) {
        for t in mesh.triangles() {
            let n = normalize(mesh.face_normal(t), T::min_positive_value());
            for v in t {
                if fallback[v as usize].is_none() {
                    fallback[v as usize] = n;
                }
            }
        }
    }
    mesh.normals = normals
        .into_iter()
        .zip(fallback)
        .map(|(n, f)| n.or(f).unwrap_or([T::zero(), T::zero(), T::one()]))
        .collect();
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geomodel::{FieldMetadata, Grid};
    use crate::vec3::{dot, sub};

    fn field(n: usize, f: impl Fn([f64; 3]) -> f64) -> ScalarField3D<f64> {
        let g = Grid::new([n, n, n], [0.0; 3], [1.0; 3]).unwrap();
        ScalarField3D::from_fn(g, FieldMetadata::named("f", ""), f)
    }

    #[test]
    fn edges_table_is_consistent() {
        // each edge must join its corner with the neighbor one step along its axis
        let pairs = [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4), (0, 4), (1, 5), (2, 6), (3, 7)];
        for (e, &(c, a)) in EDGES.iter().enumerate() {
            let mut o = CORNERS[c];
            o[a] += 1;
            let d = CORNERS.iter().position(|&x| x == o).unwrap();
            let (p, q) = pairs[e];
            assert!((c, d) == (p, q) || (c, d) == (q, p), "edge {e}");
        }
    }

    #[test]
    fn constant_field_is_empty() {
        let m = marching_cubes(&field(4, |_| 5.0), 20.0).unwrap();
        assert_eq!((m.vertex_count(), m.triangle_count()), (0, 0));
    }

    #[test]
    fn single_low_corner_makes_one_triangle_facing_it() {
        let f = field(2, |p| if p == [0.0; 3] { 0.0 } else { 1.0 });
        let m = marching_cubes(&f, 0.5).unwrap();
        assert_eq!(m.triangle_count(), 1);
        let t = m.triangles().next().unwrap();
        let n = m.face_normal(t);
        let centroid = m.triangle_positions(t).iter().fold([0.0; 3], |a, p| [a[0] + p[0] / 3.0, a[1] + p[1] / 3.0, a[2] + p[2] / 3.0]);
        assert!(dot(n, sub([0.0; 3], centroid)) > 0.0);
        for nv in &m.normals {
            assert!(dot(*nv, n) > 0.0);
        }
    }

    #[test]
    fn linear_field_normal_is_exact() {
        let f = field(3, |p| p[2]);
        assert_eq!(estimate_gradient_normal(&f, [0.5, 1.0, 1.0]).unwrap(), [0.0, 0.0, -1.0]);
        assert_eq!(estimate_gradient_normal(&f, [2.0, 2.0, 1.5]).unwrap(), [0.0, 0.0, -1.0]);
        let m = marching_cubes(&f, 0.7).unwrap();
        assert!(m.normals.iter().all(|n| *n == [0.0, 0.0, -1.0]));
        assert!(estimate_gradient_normal(&f, [0.5, 0.5, 0.0]).is_err());
    }

    #[test]
    fn errors() {
        let g = Grid::new([1, 3, 3], [0.0; 3], [1.0; 3]).unwrap();
        let flat = ScalarField3D::from_fn(g, FieldMetadata::named("f", ""), |_| 0.0);
        assert_eq!(marching_cubes(&flat, 0.0).unwrap_err(), IsoError::FieldTooSmall([1, 3, 3]));
        assert_eq!(marching_cubes(&field(2, |_| 0.0), f64::NAN).unwrap_err(), IsoError::NonFiniteIso);
        assert_eq!(
            estimate_gradient_normal(&field(3, |_| 1.0), [0.5, 0.0, 0.0]).unwrap_err(),
            IsoError::DegenerateGradient
        );
    }

    #[test]
    fn invalid_cells_are_skipped() {
        let c = [3.5; 3];
        let mut f = field(8, |p| ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2) + (p[2] - c[2]).powi(2)).sqrt());
        let full = marching_cubes(&f, 2.5).unwrap();
        for j in 0..8 {
            for i in 0..8 {
                let idx = f.grid.index(i, j, 5);
                f.values[idx] = f64::NAN;
            }
        }
        let holed = marching_cubes(&f, 2.5).unwrap();
        assert!(holed.triangle_count() < full.triangle_count());
        assert!(holed.positions.iter().all(|p| p[2] <= 4.0 || p[2] >= 6.0));
    }

    #[test]
    fn negated_field_flips_normals() {
        let c = [2.3, 2.6, 2.45];
        let f = field(6, |p| ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2) + (p[2] - c[2]).powi(2)).sqrt());
        let a = marching_cubes(&f, 1.7).unwrap();
        let b = marching_cubes(&f.negated(), -1.7).unwrap();
        assert_eq!(a.positions, b.positions);
        for (x, y) in a.normals.iter().zip(&b.normals) {
            assert_eq!(*x, neg(*y));
        }
    }
}
