//! Drilling correction: bend a height-field surface so it honors borehole observations.
//!
//! Each vertex is shifted by an inverse-distance-weighted (power 2, truncated at
//! `radius`) combination of per-borehole corrections. The corrections are
//! solved so that the shifted surface, linearly interpolated at each borehole,
//! reproduces the observed elevation. A vertex coincident with a borehole
//! takes that borehole's correction alone, which equals its residual.

use thiserror::Error;

use super::delaunay::EPS_DUP;
use crate::mesh::TriangleMesh;
use crate::scalar::Real;
use crate::vec3::Vec3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CorrectionError {
    #[error("vertices {0} and {1} share the same (x, y); surface is not a height field")]
    NotAHeightField(usize, usize),
    #[error("correction radius must be positive")]
    NonPositiveRadius,
}

/// Triangle of `mesh` containing `(x, y)` in projection, with barycentric weights.
pub fn locate_in_projection<T: Real>(mesh: &TriangleMesh<T>, x: T, y: T) -> Option<([u32; 3], [T; 3])> {
    let tol = T::lit(1e-12).max(T::epsilon() * T::lit(16.0));
    mesh.triangles().find_map(|t| {
        let [a, b, c] = mesh.triangle_positions(t);
        let det = (b[1] - c[1]) * (a[0] - c[0]) + (c[0] - b[0]) * (a[1] - c[1]);
        if det.abs() <= T::min_positive_value() {
            return None;
        }
        let l0 = ((b[1] - c[1]) * (x - c[0]) + (c[0] - b[0]) * (y - c[1])) / det;
        let l1 = ((c[1] - a[1]) * (x - c[0]) + (a[0] - c[0]) * (y - c[1])) / det;
        let l2 = T::one() - l0 - l1;
        (l0 >= -tol && l1 >= -tol && l2 >= -tol).then_some((t, [l0, l1, l2]))
    })
}

/// Linear interpolation of the surface elevation at `(x, y)`.
pub fn interpolate_z<T: Real>(mesh: &TriangleMesh<T>, x: T, y: T) -> Option<T> {
    locate_in_projection(mesh, x, y).map(|(t, l)| {
        (0..3).fold(T::zero(), |acc, k| acc + l[k] * mesh.positions[t[k] as usize][2])
    })
}

fn check_height_field<T: Real>(mesh: &TriangleMesh<T>) -> Result<(), CorrectionError> {
    let eps = T::lit(EPS_DUP);
    let p = &mesh.positions;
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&i, &j| p[i][0].partial_cmp(&p[j][0]).unwrap_or(std::cmp::Ordering::Equal));
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            if p[j][0] - p[i][0] >= eps {
                break;
            }
            if (p[j][1] - p[i][1]).abs() < eps {
                return Err(CorrectionError::NotAHeightField(i.min(j), i.max(j)));
            }
        }
    }
    Ok(())
}

/// Normalized truncated IDW weights of each borehole at `v`.
fn idw_weights<T: Real>(v: Vec3<T>, holes: &[Vec3<T>], radius: T) -> Vec<T> {
    let eps = T::lit(EPS_DUP);
    let d: Vec<T> = holes
        .iter()
        .map(|h| ((v[0] - h[0]).powi(2) + (v[1] - h[1]).powi(2)).sqrt())
        .collect();
    if let Some(hit) = d.iter().position(|&di| di < eps) {
        let mut w = vec![T::zero(); holes.len()];
        w[hit] = T::one();
        return w;
    }
    let mut w: Vec<T> = d
        .iter()
        .map(|&di| if di <= radius { T::one() / (di * di) } else { T::zero() })
        .collect();
    let sum = w.iter().fold(T::zero(), |a, &b| a + b);
    if sum > T::zero() {
        for x in &mut w {
            *x /= sum;
        }
    }
    w
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve<T: Real>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Option<Vec<T>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[piv][col].abs() < T::lit(1e-12) {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == T::zero() {
                continue;
            }
            for k in col..n {
                let v = a[col][k];
                a[row][k] -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = vec![T::zero(); n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Some(x)
}

/// Corrects `surface` toward borehole observations `(x, y, z_observed)`.
///
/// Boreholes outside the surface footprint are ignored, as are boreholes whose
/// enclosing triangle has no vertex within `radius` of any borehole.
pub fn apply_drilling_correction<T: Real>(
    surface: &TriangleMesh<T>,
    boreholes: &[Vec3<T>],
    radius: T,
) -> Result<TriangleMesh<T>, CorrectionError> {
    if !(radius > T::zero()) {
        return Err(CorrectionError::NonPositiveRadius);
    }
    check_height_field(surface)?;

    struct Obs<T> {
        at: Vec3<T>,
        tri: [u32; 3],
        bary: [T; 3],
        residual: T,
    }
    let mut obs: Vec<Obs<T>> = boreholes
        .iter()
        .filter_map(|&h| {
            let (tri, bary) = locate_in_projection(surface, h[0], h[1])?;
            let z = (0..3).fold(T::zero(), |acc, k| acc + bary[k] * surface.positions[tri[k] as usize][2]);
            Some(Obs { at: h, tri, bary, residual: h[2] - z })
        })
        .collect();
    if obs.iter().all(|o| o.residual == T::zero()) {
        return Ok(surface.clone());
    }

    // drop observations no vertex can honor, until the system has no empty rows
    let weights = loop {
        let holes: Vec<Vec3<T>> = obs.iter().map(|o| o.at).collect();
        let weights: Vec<Vec<T>> = surface
            .positions
            .iter()
            .map(|&v| idw_weights(v, &holes, radius))
            .collect();
        let before = obs.len();
        obs.retain(|o| o.tri.iter().any(|&v| weights[v as usize].iter().any(|&w| w > T::zero())));
        if obs.len() == before {
            break weights;
        }
    };
    if obs.is_empty() {
        return Ok(surface.clone());
    }

    let m = obs.len();
    let mut a = vec![vec![T::zero(); m]; m];
    for (k, o) in obs.iter().enumerate() {
        for (corner, &v) in o.tri.iter().enumerate() {
            for j in 0..m {
                a[k][j] += o.bary[corner] * weights[v as usize][j];
            }
        }
    }
    let residuals: Vec<T> = obs.iter().map(|o| o.residual).collect();
    let coeffs = solve(a, residuals.clone()).unwrap_or(residuals);

    let mut out = surface.clone();
    for (p, w) in out.positions.iter_mut().zip(&weights) {
        let shift = w.iter().zip(&coeffs).fold(T::zero(), |acc, (&wi, &ci)| acc + wi * ci);
        p[2] += shift;
    }
    if !out.normals.is_empty() {
        out.compute_area_weighted_normals(Some([T::zero(), T::zero(), T::one()]));
    }
    Ok(out)
}
