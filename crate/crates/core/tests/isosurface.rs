use std::time::Instant;

use seabedkit_core::geomodel::{FieldMetadata, Grid, ScalarField3D};
use seabedkit_core::isosurface::marching_cubes;
use seabedkit_core::TriangleMesh64;

const C: [f64; 3] = [0.5, 0.5, 0.5];
const R: f64 = 0.3;

fn sphere_field(n: usize) -> ScalarField3D<f64> {
    let h = 1.0 / (n - 1) as f64;
    let g = Grid::new([n; 3], [0.0; 3], [h; 3]).unwrap();
    ScalarField3D::from_fn(g, FieldMetadata::named("d", "m"), |p| {
        ((p[0] - C[0]).powi(2) + (p[1] - C[1]).powi(2) + (p[2] - C[2]).powi(2)).sqrt()
    })
}

fn radial_errors(m: &TriangleMesh64) -> f64 {
    m.positions
        .iter()
        .map(|p| ((p[0] - C[0]).powi(2) + (p[1] - C[1]).powi(2) + (p[2] - C[2]).powi(2)).sqrt() - R)
        .fold(0.0, |a, e| a.max(e.abs()))
}

fn area(m: &TriangleMesh64) -> f64 {
    m.triangles()
        .map(|t| {
            let f = m.face_normal(t);
            0.5 * (f[0] * f[0] + f[1] * f[1] + f[2] * f[2]).sqrt()
        })
        .sum()
}

#[test]
fn sphere_64() {
    let n = 64;
    let f = sphere_field(n);
    let start = Instant::now();
    let m = marching_cubes(&f, R).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 3.0, "{elapsed} s");

    let counts = m.edge_use_counts();
    assert!(!counts.is_empty());
    assert!(counts.values().all(|&c| c == 2), "open or non-manifold edges");

    let want = 4.0 * std::f64::consts::PI * R * R;
    let a = area(&m);
    assert!((a - want).abs() / want < 0.02, "area {a} vs {want}");

    let diag = 3f64.sqrt() / (n - 1) as f64;
    assert!(radial_errors(&m) <= 1.5 * diag);

    let cos2 = 2f64.to_radians().cos();
    for (p, nrm) in m.positions.iter().zip(&m.normals) {
        let r = [p[0] - C[0], p[1] - C[1], p[2] - C[2]];
        let rl = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        // the field grows outward, so the normal points toward the center
        let c = -(r[0] * nrm[0] + r[1] * nrm[1] + r[2] * nrm[2]) / rl;
        assert!(c >= cos2, "normal off by {} deg", c.clamp(-1.0, 1.0).acos().to_degrees());
    }
}

#[test]
fn refinement_reduces_radial_error() {
    let errs: Vec<f64> = [16, 32, 64].iter().map(|&n| radial_errors(&marching_cubes(&sphere_field(n), R).unwrap())).collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
}

#[test]
fn winding_agrees_with_vertex_normals() {
    let m = marching_cubes(&sphere_field(32), R).unwrap();
    for t in m.triangles() {
        let f = m.face_normal(t);
        let n = m.normals[t[0] as usize];
        assert!(f[0] * n[0] + f[1] * n[1] + f[2] * n[2] > 0.0);
    }
}

#[test]
fn negated_field_flips_orientation_only() {
    let f = sphere_field(24);
    let a = marching_cubes(&f, R).unwrap();
    let b = marching_cubes(&f.negated(), -R).unwrap();
    assert_eq!(a.positions.len(), b.positions.len());
    assert_eq!(a.triangle_count(), b.triangle_count());
    for (p, q) in a.positions.iter().zip(&b.positions) {
        for k in 0..3 {
            assert!((p[k] - q[k]).abs() < 1e-12);
        }
    }
    for (n, m) in a.normals.iter().zip(&b.normals) {
        for k in 0..3 {
            assert!((n[k] + m[k]).abs() < 1e-12);
        }
    }
}

#[test]
fn cells_with_invalid_corners_emit_nothing() {
    let n = 24;
    let h = 1.0 / (n - 1) as f64;
    let g = Grid::new([n; 3], [0.0; 3], [h; 3]).unwrap();
    // knock out a block of nodes in the +x half of the sphere
    let bad = |i: usize, j: usize, k: usize| (14..18).contains(&i) && (8..16).contains(&j) && (8..16).contains(&k);
    let mut values = Vec::new();
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let p = [i as f64 * h, j as f64 * h, k as f64 * h];
                let d = ((p[0] - C[0]).powi(2) + (p[1] - C[1]).powi(2) + (p[2] - C[2]).powi(2)).sqrt();
                values.push(if bad(i, j, k) { f64::NAN } else { d });
            }
        }
    }
    let f = ScalarField3D::new(g, values, FieldMetadata::named("d", "m")).unwrap();
    let m = marching_cubes(&f, R).unwrap();
    assert!(m.triangle_count() > 0);
    for t in m.triangles() {
        let [a, b, c] = m.triangle_positions(t);
        let centroid = [0, 1, 2].map(|k| (a[k] + b[k] + c[k]) / 3.0);
        let cell = centroid.map(|v| (v / h).floor() as usize);
        for di in 0..2 {
            for dj in 0..2 {
                for dk in 0..2 {
                    assert!(!bad(cell[0] + di, cell[1] + dj, cell[2] + dk), "triangle from invalid cell {cell:?}");
                }
            }
        }
    }
}
