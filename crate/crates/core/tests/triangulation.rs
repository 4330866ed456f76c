mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use common::{circumcircle_violations, hull_area, tri_area3, Lcg};
use proptest::prelude::*;
use seabedkit_core::triangulation::{build_terrain_tin, delaunay_triangulate};

fn random_points(seed: u64, n: usize) -> Vec<[f64; 2]> {
    let mut rng = Lcg(seed);
    (0..n).map(|_| [rng.range(0.0, 1000.0), rng.range(0.0, 1000.0)]).collect()
}

#[test]
fn fifty_random_sets_pass_brute_force_oracle() {
    let start = Instant::now();
    for seed in 0..50u64 {
        let n = 3 + (seed as usize * 37) % 198;
        let pts = random_points(seed, n);
        let t = delaunay_triangulate(&pts).unwrap();
        assert!(!t.triangles.is_empty());
        let bad = circumcircle_violations(&pts, &t.triangles, 1e-9);
        assert!(bad.is_empty(), "seed {seed}: {} violations", bad.len());
        let (a, h) = (t.total_area(), hull_area(&pts));
        assert!((a - h).abs() <= 1e-9 * h, "seed {seed}: area {a} vs hull {h}");
    }
    assert!(start.elapsed().as_secs_f64() < 5.0);
}

#[test]
fn every_input_point_is_used() {
    let pts = random_points(7, 150);
    let t = delaunay_triangulate(&pts).unwrap();
    let used: BTreeSet<usize> = t.triangles.iter().flatten().copied().collect();
    assert_eq!(used.len(), pts.len());
    // Euler: t = 2n - 2 - h for a triangulated point set
    assert_eq!(t.triangles.len(), 2 * pts.len() - 2 - t.convex_hull.len());
}

#[test]
fn cocircular_grid_is_still_delaunay() {
    let pts: Vec<[f64; 2]> = (0..12).flat_map(|j| (0..12).map(move |i| [i as f64, j as f64])).collect();
    let t = delaunay_triangulate(&pts).unwrap();
    assert_eq!(t.triangles.len(), 2 * 11 * 11);
    assert!(circumcircle_violations(&pts, &t.triangles, 1e-9).is_empty());
}

fn sorted(tris: &[[usize; 3]]) -> Vec<[usize; 3]> {
    let mut v = tris.to_vec();
    v.sort();
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn empty_circumcircle(pts in prop::collection::vec((0.0f64..1000.0, 0.0f64..1000.0), 3..200)) {
        let pts: Vec<[f64; 2]> = pts.into_iter().map(|(x, y)| [x, y]).collect();
        let t = delaunay_triangulate(&pts);
        prop_assume!(t.is_ok());
        let t = t.unwrap();
        prop_assert!(circumcircle_violations(&pts, &t.triangles, 1e-9).is_empty());
        let h = hull_area(&pts);
        prop_assert!((t.total_area() - h).abs() <= 1e-9 * h);
    }

    // Integer inputs keep every predicate exact, so ties resolve identically
    // after translation and power-of-two scaling.
    #[test]
    fn translation_and_scale_invariant(
        pts in prop::collection::btree_set((0i32..60, 0i32..60), 3..120),
        dx in -1000i32..1000,
        dy in -1000i32..1000,
        k in -3i32..4,
    ) {
        let base: Vec<[f64; 2]> = pts.iter().map(|&(x, y)| [x as f64, y as f64]).collect();
        let t = delaunay_triangulate(&base);
        prop_assume!(t.is_ok());
        let t = t.unwrap();
        let s = 2f64.powi(k);
        let moved: Vec<[f64; 2]> = base.iter().map(|p| [(p[0] + dx as f64) * s, (p[1] + dy as f64) * s]).collect();
        let u = delaunay_triangulate(&moved).unwrap();
        prop_assert_eq!(sorted(&t.triangles), sorted(&u.triangles));
    }
}

#[test]
fn sin_cos_surface_area_matches_quadrature() {
    let n = 20;
    let l = 2.0 * std::f64::consts::PI;
    let f = |x: f64, y: f64| x.sin() * y.cos();
    let mut samples = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let (x, y) = (l * i as f64 / (n - 1) as f64, l * j as f64 / (n - 1) as f64);
            samples.push([x, y, f(x, y)]);
        }
    }
    let mesh = build_terrain_tin(&samples).unwrap();
    let area: f64 = mesh
        .triangles()
        .map(|t| {
            let [a, b, c] = mesh.triangle_positions(t);
            tri_area3(a, b, c)
        })
        .sum();
    // midpoint rule on sqrt(1 + fx^2 + fy^2)
    let m = 1000;
    let h = l / m as f64;
    let mut exact = 0.0;
    for j in 0..m {
        for i in 0..m {
            let (x, y) = ((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
            let (fx, fy) = (x.cos() * y.cos(), -x.sin() * y.sin());
            exact += (1.0 + fx * fx + fy * fy).sqrt() * h * h;
        }
    }
    assert!((area - exact).abs() / exact < 0.05, "tin {area} vs {exact}");
}

#[test]
fn planar_samples_have_plane_normals() {
    let mut rng = Lcg(3);
    let samples: Vec<[f64; 3]> = (0..12)
        .map(|_| {
            let (x, y) = (rng.range(0.0, 500.0), rng.range(0.0, 500.0));
            [x, y, 0.1 * x - 0.2 * y - 30.0]
        })
        .collect();
    let mesh = build_terrain_tin(&samples).unwrap();
    let len = (0.01f64 + 0.04 + 1.0).sqrt();
    let want = [-0.1 / len, 0.2 / len, 1.0 / len];
    for t in mesh.triangles() {
        let f = mesh.face_normal(t);
        let l = (f[0] * f[0] + f[1] * f[1] + f[2] * f[2]).sqrt();
        let n = f.map(|c| c / l);
        for a in 0..3 {
            assert!((n[a] - want[a]).abs() < 1e-9);
        }
    }
    for n in &mesh.normals {
        for a in 0..3 {
            assert!((n[a] - want[a]).abs() < 1e-9);
        }
    }
}
