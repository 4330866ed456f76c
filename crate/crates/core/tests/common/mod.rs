//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's geometry kernels.
#![allow(dead_code)]

use std::path::PathBuf;

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// Small deterministic generator for test inputs (64-bit LCG, high bits).
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

/// Circumcenter and squared radius of a 2D triangle.
pub fn circumcircle(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> ([f64; 2], f64) {
    let d = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]));
    let sq = |p: [f64; 2]| p[0] * p[0] + p[1] * p[1];
    let ux = (sq(a) * (b[1] - c[1]) + sq(b) * (c[1] - a[1]) + sq(c) * (a[1] - b[1])) / d;
    let uy = (sq(a) * (c[0] - b[0]) + sq(b) * (a[0] - c[0]) + sq(c) * (b[0] - a[0])) / d;
    let r2 = (a[0] - ux).powi(2) + (a[1] - uy).powi(2);
    ([ux, uy], r2)
}

/// Indices of points strictly inside some triangle's circumcircle (relative tolerance).
pub fn circumcircle_violations(points: &[[f64; 2]], triangles: &[[usize; 3]], rel_tol: f64) -> Vec<(usize, usize)> {
    let mut bad = Vec::new();
    for (t, tri) in triangles.iter().enumerate() {
        let (c, r2) = circumcircle(points[tri[0]], points[tri[1]], points[tri[2]]);
        for (i, p) in points.iter().enumerate() {
            if tri.contains(&i) {
                continue;
            }
            let d2 = (p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2);
            if d2 < r2 * (1.0 - rel_tol) {
                bad.push((t, i));
            }
        }
    }
    bad
}

/// Convex hull area by Andrew's monotone chain.
pub fn hull_area(points: &[[f64; 2]]) -> f64 {
    let mut p = points.to_vec();
    p.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &q in &p {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], q) <= 0.0 {
            lower.pop();
        }
        lower.push(q);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &q in p.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], q) <= 0.0 {
            upper.pop();
        }
        upper.push(q);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    shoelace(&lower).abs()
}

/// Signed polygon area.
pub fn shoelace(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            a[0] * b[1] - b[0] * a[1]
        })
        .sum::<f64>()
        / 2.0
}

pub fn tri_area3(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
    let x = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
    0.5 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

/// Nested-lerp trilinear interpolation written directly from the definition.
pub fn trilinear(values: &[f64], dims: [usize; 3], origin: [f64; 3], spacing: [f64; 3], p: [f64; 3]) -> Option<f64> {
    let mut lo = [0usize; 3];
    let mut t = [0.0; 3];
    for a in 0..3 {
        let u = (p[a] - origin[a]) / spacing[a];
        if u < 0.0 || u > (dims[a] - 1) as f64 {
            return None;
        }
        let i = (u.floor() as usize).min(dims[a] - 2);
        lo[a] = i;
        t[a] = u - i as f64;
    }
    let at = |i: usize, j: usize, k: usize| values[i + dims[0] * (j + dims[1] * k)];
    let l = |a: f64, b: f64, t: f64| a + (b - a) * t;
    let [i, j, k] = lo;
    let c00 = l(at(i, j, k), at(i + 1, j, k), t[0]);
    let c10 = l(at(i, j + 1, k), at(i + 1, j + 1, k), t[0]);
    let c01 = l(at(i, j, k + 1), at(i + 1, j, k + 1), t[0]);
    let c11 = l(at(i, j + 1, k + 1), at(i + 1, j + 1, k + 1), t[0]);
    let v = l(l(c00, c10, t[1]), l(c01, c11, t[1]), t[2]);
    (!v.is_nan()).then_some(v)
}

/// Piecewise-linear interpolation through sorted (t, rgba) stops, clamped.
pub fn piecewise(stops: &[(f64, [f64; 4])], t: f64) -> [f64; 4] {
    if t <= stops[0].0 {
        return stops[0].1;
    }
    for w in stops.windows(2) {
        let ((t0, c0), (t1, c1)) = (w[0], w[1]);
        if t <= t1 {
            let u = (t - t0) / (t1 - t0);
            return [0, 1, 2, 3].map(|k| c0[k] + (c1[k] - c0[k]) * u);
        }
    }
    stops[stops.len() - 1].1
}

/// One primitive as read back from a GLB container.
#[derive(Debug, Default)]
pub struct GlbMesh {
    pub node_name: String,
    pub positions: Vec<[f32; 3]>,
    pub normals: Vec<[f32; 3]>,
    pub uvs: Vec<[f32; 2]>,
    pub indices: Vec<u32>,
}

/// Minimal glTF 2.0 binary reader: header, chunks, accessors, node names.
pub fn read_glb(glb: &[u8]) -> (serde_json::Value, Vec<GlbMesh>) {
    let word = |o: usize| u32::from_le_bytes(glb[o..o + 4].try_into().unwrap()) as usize;
    assert_eq!(&glb[0..4], b"glTF", "magic");
    assert_eq!(word(4), 2, "version");
    assert_eq!(word(8), glb.len(), "declared length");
    let mut chunks = Vec::new();
    let mut off = 12;
    while off < glb.len() {
        let (len, kind) = (word(off), glb[off + 4..off + 8].to_vec());
        assert_eq!(len % 4, 0, "chunk alignment");
        chunks.push((kind, &glb[off + 8..off + 8 + len]));
        off += 8 + len;
    }
    assert_eq!(off, glb.len());
    assert_eq!(chunks[0].0, b"JSON");
    let doc: serde_json::Value = serde_json::from_slice(chunks[0].1).unwrap();
    let bin: &[u8] = chunks.iter().find(|c| c.0 == b"BIN\0").map(|c| c.1).unwrap_or(&[]);

    let read = |acc: usize| -> (Vec<f64>, usize) {
        let a = &doc["accessors"][acc];
        let count = a["count"].as_u64().unwrap() as usize;
        let width = match a["type"].as_str().unwrap() {
            "SCALAR" => 1,
            "VEC2" => 2,
            "VEC3" => 3,
            "VEC4" => 4,
            t => panic!("type {t}"),
        };
        let view = &doc["bufferViews"][a["bufferView"].as_u64().unwrap() as usize];
        let base = view["byteOffset"].as_u64().unwrap_or(0) as usize + a["byteOffset"].as_u64().unwrap_or(0) as usize;
        let comp = a["componentType"].as_u64().unwrap();
        let size = match comp {
            5126 | 5125 => 4,
            5123 => 2,
            5121 => 1,
            c => panic!("component {c}"),
        };
        let stride = view["byteStride"].as_u64().map(|s| s as usize).unwrap_or(size * width);
        let mut out = Vec::with_capacity(count * width);
        for i in 0..count {
            for k in 0..width {
                let o = base + i * stride + k * size;
                let b = &bin[o..o + size];
                out.push(match comp {
                    5126 => f32::from_le_bytes(b.try_into().unwrap()) as f64,
                    5125 => u32::from_le_bytes(b.try_into().unwrap()) as f64,
                    5123 => u16::from_le_bytes(b.try_into().unwrap()) as f64,
                    _ => b[0] as f64,
                });
            }
        }
        (out, width)
    };

    let mut meshes = Vec::new();
    for node in doc["nodes"].as_array().unwrap() {
        let Some(mi) = node["mesh"].as_u64() else { continue };
        for prim in doc["meshes"][mi as usize]["primitives"].as_array().unwrap() {
            assert_eq!(prim["mode"].as_u64().unwrap_or(4), 4, "triangles");
            let mut m = GlbMesh { node_name: node["name"].as_str().unwrap_or("").to_string(), ..Default::default() };
            let attrs = &prim["attributes"];
            let v3 = |v: Vec<f64>| v.chunks(3).map(|c| [c[0] as f32, c[1] as f32, c[2] as f32]).collect::<Vec<_>>();
            m.positions = v3(read(attrs["POSITION"].as_u64().unwrap() as usize).0);
            if let Some(n) = attrs["NORMAL"].as_u64() {
                m.normals = v3(read(n as usize).0);
            }
            if let Some(t) = attrs["TEXCOORD_0"].as_u64() {
                m.uvs = read(t as usize).0.chunks(2).map(|c| [c[0] as f32, c[1] as f32]).collect();
            }
            m.indices = read(prim["indices"].as_u64().unwrap() as usize).0.into_iter().map(|v| v as u32).collect();
            meshes.push(m);
        }
    }
    (doc, meshes)
}

/// Wavefront OBJ reader for `v`, `vn`, `vt` and triangular `f` records.
#[derive(Debug, Default)]
pub struct ObjMesh {
    pub name: String,
    pub positions: Vec<[f64; 3]>,
    pub normals: Vec<[f64; 3]>,
    pub uvs: Vec<[f64; 2]>,
    /// Zero-based position indices per face corner.
    pub faces: Vec<[usize; 3]>,
}

pub fn read_obj(text: &str) -> ObjMesh {
    let mut m = ObjMesh::default();
    for line in text.lines() {
        let mut it = line.split_whitespace();
        let nums = |it: std::str::SplitWhitespace| it.map(|t| t.parse::<f64>().unwrap()).collect::<Vec<_>>();
        match it.next() {
            Some("o") => m.name = it.collect::<Vec<_>>().join(" "),
            Some("v") => {
                let v = nums(it);
                m.positions.push([v[0], v[1], v[2]]);
            }
            Some("vn") => {
                let v = nums(it);
                m.normals.push([v[0], v[1], v[2]]);
            }
            Some("vt") => {
                let v = nums(it);
                m.uvs.push([v[0], v[1]]);
            }
            Some("f") => {
                let c: Vec<usize> = it.map(|t| t.split('/').next().unwrap().parse::<usize>().unwrap() - 1).collect();
                assert_eq!(c.len(), 3, "triangular faces only");
                m.faces.push([c[0], c[1], c[2]]);
            }
            Some(t) if t.starts_with('#') => {}
            None => {}
            Some(t) => panic!("unexpected record {t}"),
        }
    }
    m
}
