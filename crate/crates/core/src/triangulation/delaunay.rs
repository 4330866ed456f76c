//! Incremental Bowyer–Watson triangulation over ghost triangles.
//!
//! The convex hull is closed by "ghost" triangles that share a vertex at
//! infinity, so no finite super-triangle is needed and hull triangles are never
//! lost. Points are inserted in input order after the first non-degenerate
//! seed triangle. Cocircular configurations are resolved afterwards by keeping,
//! for every cocircular quad, the diagonal incident to its lexicographically
//! smallest vertex.

use std::collections::HashMap;

use thiserror::Error;

use crate::scalar::Real;
use crate::vec3::{orient2d, Vec2};

/// Minimum separation between input points, meters.
pub const EPS_DUP: f64 = 1e-9;
/// Relative tolerance of the in-circle predicate.
pub const EPS_CIRC: f64 = 1e-9;
/// Relative tolerance of the orientation predicate.
const EPS_ORIENT: f64 = 1e-12;

const GHOST: usize = usize::MAX;
const NONE: usize = usize::MAX;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TriangulationError {
    #[error("need at least 3 points, found {0}")]
    TooFewPoints(usize),
    #[error("points {0} and {1} coincide")]
    DuplicatePoints(usize, usize),
    #[error("all points are collinear")]
    CollinearInput,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Triangulation2D<T> {
    pub points: Vec<Vec2<T>>,
    /// Counter-clockwise index triples, smallest index first, sorted.
    pub triangles: Vec<[usize; 3]>,
    /// Counter-clockwise hull, starting at the lexicographically smallest vertex.
    pub convex_hull: Vec<usize>,
}

impl<T: Real> Triangulation2D<T> {
    pub fn triangle_area(&self, t: [usize; 3]) -> T {
        orient2d(self.points[t[0]], self.points[t[1]], self.points[t[2]]) * T::lit(0.5)
    }

    pub fn total_area(&self) -> T {
        self.triangles
            .iter()
            .fold(T::zero(), |acc, &t| acc + self.triangle_area(t))
    }

    /// Shoelace area of the convex hull polygon.
    pub fn hull_area(&self) -> T {
        let n = self.convex_hull.len();
        let mut acc = T::zero();
        for i in 0..n {
            let a = self.points[self.convex_hull[i]];
            let b = self.points[self.convex_hull[(i + 1) % n]];
            acc += a[0] * b[1] - b[0] * a[1];
        }
        acc * T::lit(0.5)
    }
}

/// Orientation with a relative zero band: `1`, `-1` or `0`.
fn orient_sign<T: Real>(a: Vec2<T>, b: Vec2<T>, c: Vec2<T>) -> i8 {
    let det = orient2d(a, b, c);
    let scale = ((b[0] - a[0]).abs() + (b[1] - a[1]).abs()) * ((c[0] - a[0]).abs() + (c[1] - a[1]).abs());
    let tol = T::lit(EPS_ORIENT).max(T::epsilon() * T::lit(8.0)) * scale;
    if det > tol {
        1
    } else if det < -tol {
        -1
    } else {
        0
    }
}

/// In-circle determinant of `d` against counter-clockwise `(a, b, c)` together
/// with its permanent, the magnitude bound used for the relative tolerance.
fn incircle<T: Real>(a: Vec2<T>, b: Vec2<T>, c: Vec2<T>, d: Vec2<T>) -> (T, T) {
    let (adx, ady) = (a[0] - d[0], a[1] - d[1]);
    let (bdx, bdy) = (b[0] - d[0], b[1] - d[1]);
    let (cdx, cdy) = (c[0] - d[0], c[1] - d[1]);
    let alift = adx * adx + ady * ady;
    let blift = bdx * bdx + bdy * bdy;
    let clift = cdx * cdx + cdy * cdy;
    let det = adx * (bdy * clift - cdy * blift) - ady * (bdx * clift - cdx * blift) + alift * (bdx * cdy - cdx * bdy);
    let perm = adx.abs() * (bdy.abs() * clift + cdy.abs() * blift)
        + ady.abs() * (bdx.abs() * clift + cdx.abs() * blift)
        + alift * ((bdx * cdy).abs() + (cdx * bdy).abs());
    (det, perm)
}

fn circ_tol<T: Real>() -> T {
    T::lit(EPS_CIRC).max(T::epsilon() * T::lit(64.0))
}

/// `d` strictly inside the circumcircle of counter-clockwise `(a, b, c)`.
fn in_circle_strict<T: Real>(a: Vec2<T>, b: Vec2<T>, c: Vec2<T>, d: Vec2<T>) -> bool {
    let (det, perm) = incircle(a, b, c, d);
    det > circ_tol::<T>() * perm
}

fn cocircular<T: Real>(a: Vec2<T>, b: Vec2<T>, c: Vec2<T>, d: Vec2<T>) -> bool {
    let (det, perm) = incircle(a, b, c, d);
    det.abs() <= circ_tol::<T>() * perm
}

fn lex_less<T: Real>(p: Vec2<T>, q: Vec2<T>) -> bool {
    p[0] < q[0] || (p[0] == q[0] && p[1] < q[1])
}

#[derive(Debug, Clone)]
struct Tri {
    v: [usize; 3],
    /// `nb[i]` lies across edge `(v[i], v[i+1])`.
    nb: [usize; 3],
    alive: bool,
}

impl Tri {
    fn is_ghost(&self) -> bool {
        self.v[2] == GHOST
    }
}

struct Builder<'a, T> {
    pts: &'a [Vec2<T>],
    tris: Vec<Tri>,
    last: usize,
}

impl<'a, T: Real> Builder<'a, T> {
    fn new(pts: &'a [Vec2<T>], seed: [usize; 3]) -> Self {
        let [a, b, c] = seed;
        // 0: real, 1..=3: ghosts across (a,b), (b,c), (c,a)
        let tris = vec![
            Tri { v: [a, b, c], nb: [1, 2, 3], alive: true },
            Tri { v: [b, a, GHOST], nb: [0, 3, 2], alive: true },
            Tri { v: [c, b, GHOST], nb: [0, 1, 3], alive: true },
            Tri { v: [a, c, GHOST], nb: [0, 2, 1], alive: true },
        ];
        Builder { pts, tris, last: 0 }
    }

    fn is_bad(&self, t: usize, p: usize) -> bool {
        let tri = &self.tris[t];
        let q = self.pts[p];
        if tri.is_ghost() {
            let (a, b) = (self.pts[tri.v[0]], self.pts[tri.v[1]]);
            match orient_sign(a, b, q) {
                1 => true,
                0 => {
                    // on the hull line: only the open segment belongs to this ghost
                    let along_a = (q[0] - a[0]) * (b[0] - a[0]) + (q[1] - a[1]) * (b[1] - a[1]);
                    let along_b = (q[0] - b[0]) * (a[0] - b[0]) + (q[1] - b[1]) * (a[1] - b[1]);
                    along_a > T::zero() && along_b > T::zero()
                }
                _ => false,
            }
        } else {
            let [a, b, c] = tri.v.map(|i| self.pts[i]);
            in_circle_strict(a, b, c, q)
        }
    }

    /// Visibility walk from the last created triangle toward `p`.
    fn locate(&self, p: usize) -> Option<usize> {
        let q = self.pts[p];
        let mut t = self.last;
        let limit = 4 * self.tris.len() + 16;
        'walk: for step in 0..limit {
            let tri = &self.tris[t];
            if tri.is_ghost() {
                return Some(t);
            }
            for k in 0..3 {
                let e = (k + step) % 3;
                let (a, b) = (self.pts[tri.v[e]], self.pts[tri.v[(e + 1) % 3]]);
                if orient2d(a, b, q) < T::zero() {
                    t = tri.nb[e];
                    continue 'walk;
                }
            }
            return Some(t);
        }
        None
    }

    fn insert(&mut self, p: usize) {
        let start = match self.locate(p) {
            Some(t) if self.is_bad(t, p) => t,
            _ => match (0..self.tris.len()).find(|&t| self.tris[t].alive && self.is_bad(t, p)) {
                Some(t) => t,
                None => return,
            },
        };

        let mut bad = vec![start];
        let mut in_cavity = HashMap::new();
        in_cavity.insert(start, ());
        let mut head = 0;
        while head < bad.len() {
            let t = bad[head];
            head += 1;
            for &n in &self.tris[t].nb {
                if n != NONE && !in_cavity.contains_key(&n) && self.is_bad(n, p) {
                    in_cavity.insert(n, ());
                    bad.push(n);
                }
            }
        }

        // cavity boundary: (from, to, outside neighbor)
        let mut boundary = Vec::new();
        for &t in &bad {
            let tri = &self.tris[t];
            for e in 0..3 {
                let n = tri.nb[e];
                if !in_cavity.contains_key(&n) {
                    boundary.push((tri.v[e], tri.v[(e + 1) % 3], n));
                }
            }
        }
        for &t in &bad {
            self.tris[t].alive = false;
        }

        let mut edge_owner: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for (u, w, outside) in boundary {
            let id = self.tris.len();
            // keep the ghost vertex in slot 2; `e0` is the slot of the boundary edge
            let (v, e0) = if u == GHOST {
                ([w, p, GHOST], 2)
            } else if w == GHOST {
                ([p, u, GHOST], 1)
            } else {
                ([u, w, p], 0)
            };
            let mut nb = [NONE; 3];
            nb[e0] = outside;
            let o = &self.tris[outside].v;
            let back = (0..3)
                .find(|&k| o[k] == w && o[(k + 1) % 3] == u)
                .expect("outside neighbor shares the boundary edge");
            self.tris[outside].nb[back] = id;
            self.tris.push(Tri { v, nb, alive: true });
            for e in 0..3 {
                if e == e0 {
                    continue;
                }
                edge_owner.insert((v[e], v[(e + 1) % 3]), (id, e));
            }
            if v[2] != GHOST {
                self.last = id;
            }
        }
        let keys: Vec<_> = edge_owner.keys().copied().collect();
        for (a, b) in keys {
            let (t, e) = edge_owner[&(a, b)];
            if let Some(&(o, _)) = edge_owner.get(&(b, a)) {
                self.tris[t].nb[e] = o;
            }
        }
    }

    fn finish(self) -> (Vec<[usize; 3]>, Vec<usize>) {
        let mut triangles = Vec::new();
        let mut hull_next = HashMap::new();
        for tri in self.tris.iter().filter(|t| t.alive) {
            if tri.is_ghost() {
                // ghost (a, b) closes hull edge b -> a
                hull_next.insert(tri.v[1], tri.v[0]);
            } else {
                triangles.push(tri.v);
            }
        }
        let start = *hull_next
            .keys()
            .min_by(|&&i, &&j| {
                if lex_less(self.pts[i], self.pts[j]) {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Greater
                }
            })
            .expect("hull is non-empty");
        let mut hull = vec![start];
        let mut cur = hull_next[&start];
        while cur != start && hull.len() <= hull_next.len() {
            hull.push(cur);
            cur = hull_next[&cur];
        }
        (triangles, hull)
    }
}

fn check_input<T: Real>(pts: &[Vec2<T>]) -> Result<[usize; 3], TriangulationError> {
    if pts.len() < 3 {
        return Err(TriangulationError::TooFewPoints(pts.len()));
    }
    let eps = T::lit(EPS_DUP);
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&i, &j| pts[i][0].partial_cmp(&pts[j][0]).unwrap_or(std::cmp::Ordering::Equal));
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            if pts[j][0] - pts[i][0] >= eps {
                break;
            }
            let (dx, dy) = (pts[j][0] - pts[i][0], pts[j][1] - pts[i][1]);
            if (dx * dx + dy * dy).sqrt() < eps {
                return Err(TriangulationError::DuplicatePoints(i.min(j), i.max(j)));
            }
        }
    }
    let c = (2..pts.len())
        .find(|&k| orient_sign(pts[0], pts[1], pts[k]) != 0)
        .ok_or(TriangulationError::CollinearInput)?;
    Ok(ccw(pts, [0, 1, c]))
}

fn ccw<T: Real>(pts: &[Vec2<T>], [a, b, c]: [usize; 3]) -> [usize; 3] {
    if orient2d(pts[a], pts[b], pts[c]) > T::zero() {
        [a, b, c]
    } else {
        [a, c, b]
    }
}

/// Flips cocircular diagonals so each cocircular quad keeps the diagonal
/// incident to its lexicographically smallest vertex.
fn resolve_cocircular<T: Real>(pts: &[Vec2<T>], tris: &mut [[usize; 3]]) {
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    let mut edges: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (t, v) in tris.iter().enumerate() {
        for e in 0..3 {
            edges.entry(key(v[e], v[(e + 1) % 3])).or_default().push(t);
        }
    }
    let mut stack: Vec<(usize, usize)> = edges.iter().filter(|(_, ts)| ts.len() == 2).map(|(&k, _)| k).collect();
    stack.sort_unstable();
    let mut budget = 8 * tris.len() * tris.len() + 64;
    while let Some((p, q)) = stack.pop() {
        if budget == 0 {
            break;
        }
        budget -= 1;
        let Some(ts) = edges.get(&(p, q)) else { continue };
        if ts.len() != 2 {
            continue;
        }
        let (t1, t2) = (ts[0], ts[1]);
        // orient so t1 holds a -> b and t2 holds b -> a
        let e1 = (0..3)
            .find(|&e| key(tris[t1][e], tris[t1][(e + 1) % 3]) == (p, q))
            .unwrap();
        let (a, b, c) = (tris[t1][e1], tris[t1][(e1 + 1) % 3], tris[t1][(e1 + 2) % 3]);
        let d = *tris[t2].iter().find(|&&x| x != a && x != b).unwrap();
        if !cocircular(pts[a], pts[b], pts[c], pts[d]) {
            continue;
        }
        let smallest = [a, b, c, d]
            .into_iter()
            .reduce(|m, x| if lex_less(pts[x], pts[m]) { x } else { m })
            .unwrap();
        if smallest == a || smallest == b {
            continue;
        }
        if orient_sign(pts[a], pts[d], pts[c]) <= 0 || orient_sign(pts[d], pts[b], pts[c]) <= 0 {
            continue;
        }
        tris[t1] = [a, d, c];
        tris[t2] = [d, b, c];
        edges.remove(&(p, q));
        edges.insert(key(c, d), vec![t1, t2]);
        for (edge, from, to) in [(key(a, d), t2, t1), (key(b, c), t1, t2)] {
            if let Some(list) = edges.get_mut(&edge) {
                for t in list.iter_mut() {
                    if *t == from {
                        *t = to;
                    }
                }
            }
        }
        stack.extend([key(a, d), key(d, b), key(b, c), key(c, a)]);
    }
}

/// Delaunay triangulation of 2D points.
pub fn delaunay_triangulate<T: Real>(points: &[Vec2<T>]) -> Result<Triangulation2D<T>, TriangulationError> {
    let seed = check_input(points)?;
    let mut builder = Builder::new(points, seed);
    for p in 0..points.len() {
        if !seed.contains(&p) {
            builder.insert(p);
        }
    }
    let (mut triangles, convex_hull) = builder.finish();
    resolve_cocircular(points, &mut triangles);
    for t in &mut triangles {
        let m = (0..3).min_by_key(|&i| t[i]).unwrap();
        t.rotate_left(m);
    }
    triangles.sort_unstable();
    Ok(Triangulation2D {
        points: points.to_vec(),
        triangles,
        convex_hull,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_triangle() {
        let t = delaunay_triangulate(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert_eq!(t.triangles, vec![[0, 1, 2]]);
        assert_eq!(t.convex_hull, vec![0, 1, 2]);
    }

    #[test]
    fn clockwise_input_is_reoriented() {
        let t = delaunay_triangulate(&[[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert_eq!(t.triangles, vec![[0, 2, 1]]);
        assert!(t.triangle_area(t.triangles[0]) > 0.0);
    }

    #[test]
    fn square_uses_diagonal_from_smallest_vertex() {
        // insertion order that naturally produces the other diagonal
        let pts = [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [0.0, 0.0]];
        let t = delaunay_triangulate(&pts).unwrap();
        assert_eq!(t.triangles.len(), 2);
        for tri in &t.triangles {
            assert!(tri.contains(&3), "{:?}", t.triangles);
        }
        let pts = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let t = delaunay_triangulate(&pts).unwrap();
        assert_eq!(t.triangles, vec![[0, 1, 2], [0, 2, 3]]);
    }

    #[test]
    fn interior_point() {
        let t = delaunay_triangulate(&[[0.0, 0.0], [2.0, 0.0], [1.0, 3.0], [1.0, 1.0]]).unwrap();
        assert_eq!(t.triangles.len(), 3);
        assert!(t.triangles.iter().all(|tri| tri.contains(&3)));
        assert_eq!(t.convex_hull, vec![0, 1, 2]);
    }

    #[test]
    fn errors() {
        assert_eq!(
            delaunay_triangulate(&[[0.0, 0.0], [1.0, 0.0]]).unwrap_err(),
            TriangulationError::TooFewPoints(2)
        );
        assert_eq!(
            delaunay_triangulate(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1e-12]]).unwrap_err(),
            TriangulationError::DuplicatePoints(1, 3)
        );
        assert_eq!(
            delaunay_triangulate(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0]]).unwrap_err(),
            TriangulationError::CollinearInput
        );
    }

    #[test]
    fn collinear_prefix_then_offset_point() {
        let pts = [[0.0f64, 0.0], [1.0, 0.0], [2.0, 0.0], [3.0, 0.0], [1.5, 1.0]];
        let t = delaunay_triangulate(&pts).unwrap();
        assert_eq!(t.triangles.len(), 3);
        assert!((t.total_area() - 1.5).abs() < 1e-12);
        assert_eq!(t.convex_hull, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn grid_tiles_hull() {
        let mut pts = Vec::new();
        for j in 0..6 {
            for i in 0..7 {
                pts.push([i as f64, j as f64]);
            }
        }
        let t = delaunay_triangulate(&pts).unwrap();
        assert_eq!(t.triangles.len(), 2 * 6 * 5);
        assert!((t.total_area() - 30.0).abs() < 1e-9);
        assert!((t.hull_area() - 30.0).abs() < 1e-9);
    }
}
