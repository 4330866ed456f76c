//! Indexed triangle mesh shared by every surface product.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;
use crate::vec3::{add, cross, norm, normalize, sub, triangle_area, Vec3};

/// Minimum triangle area accepted by [`TriangleMesh::validate`], m².
pub const MIN_TRIANGLE_AREA: f64 = 1e-12;
/// Allowed deviation of normal lengths from one.
pub const NORMAL_LENGTH_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("index count {0} is not a multiple of 3")]
    RaggedIndices(usize),
    #[error("index {index} out of range for {count} vertices")]
    IndexOutOfRange { index: u32, count: usize },
    #[error("triangle {0} is degenerate")]
    DegenerateTriangle(usize),
    #[error("normal count {normals} does not match vertex count {vertices}")]
    NormalCountMismatch { normals: usize, vertices: usize },
    #[error("normal {0} is not unit length")]
    NonUnitNormal(usize),
    #[error("uv count {uvs} does not match vertex count {vertices}")]
    UvCountMismatch { uvs: usize, vertices: usize },
}

/// Stratum id or texture reference plus a base color.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub name: String,
    pub color: [f32; 4],
    pub texture: Option<String>,
}

impl Material {
    pub fn new(name: impl Into<String>, color: [f32; 4]) -> Self {
        Material {
            name: name.into(),
            color,
            texture: None,
        }
    }
}

impl Default for Material {
    fn default() -> Self {
        Material::new("default", [0.8, 0.8, 0.8, 1.0])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh<T> {
    pub positions: Vec<Vec3<T>>,
    /// Empty until normals are computed; otherwise one unit vector per position.
    pub normals: Vec<Vec3<T>>,
    pub uvs: Option<Vec<[T; 2]>>,
    pub indices: Vec<u32>,
    pub material: Material,
}

impl<T: Real> Default for TriangleMesh<T> {
    fn default() -> Self {
        TriangleMesh {
            positions: Vec::new(),
            normals: Vec::new(),
            uvs: None,
            indices: Vec::new(),
            material: Material::default(),
        }
    }
}

impl<T: Real> TriangleMesh<T> {
    pub fn new(positions: Vec<Vec3<T>>, indices: Vec<u32>, material: Material) -> Self {
        TriangleMesh {
            positions,
            normals: Vec::new(),
            uvs: None,
            indices,
            material,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.positions.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.indices.len() / 3
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn triangles(&self) -> impl Iterator<Item = [u32; 3]> + '_ {
        self.indices.chunks_exact(3).map(|c| [c[0], c[1], c[2]])
    }

    pub fn triangle_positions(&self, t: [u32; 3]) -> [Vec3<T>; 3] {
        t.map(|i| self.positions[i as usize])
    }

    /// Unnormalized face normal (length is twice the area).
    pub fn face_normal(&self, t: [u32; 3]) -> Vec3<T> {
        let [a, b, c] = self.triangle_positions(t);
        cross(sub(b, a), sub(c, a))
    }

    pub fn surface_area(&self) -> T {
        self.triangles().fold(T::zero(), |acc, t| {
            let [a, b, c] = self.triangle_positions(t);
            acc + triangle_area(a, b, c)
        })
    }

    /// Per-vertex normals as the area-weighted average of incident face normals.
    /// When `up` is given, each normal is flipped to have a non-negative component along it.
    pub fn compute_area_weighted_normals(&mut self, up: Option<Vec3<T>>) {
        let mut acc = vec![[T::zero(); 3]; self.positions.len()];
        for t in self.indices.chunks_exact(3) {
            let n = self.face_normal([t[0], t[1], t[2]]);
            for &i in t {
                acc[i as usize] = add(acc[i as usize], n);
            }
        }
        let eps = T::lit(1e-300).max(T::min_positive_value());
        self.normals = acc
            .into_iter()
            .map(|n| {
                let mut u = normalize(n, eps).unwrap_or([T::zero(), T::zero(), T::one()]);
                if let Some(up) = up {
                    if crate::vec3::dot(u, up) < T::zero() {
                        u = crate::vec3::neg(u);
                    }
                }
                u
            })
            .collect();
    }

    /// Reverses triangle winding and negates normals.
    pub fn flipped(&self) -> Self {
        let mut out = self.clone();
        for t in out.indices.chunks_exact_mut(3) {
            t.swap(1, 2);
        }
        for n in &mut out.normals {
            *n = crate::vec3::neg(*n);
        }
        out
    }

    /// How many triangles use each undirected edge.
    pub fn edge_use_counts(&self) -> HashMap<(u32, u32), usize> {
        let mut counts = HashMap::new();
        for t in self.triangles() {
            for e in 0..3 {
                let (a, b) = (t[e], t[(e + 1) % 3]);
                *counts.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        counts
    }

    /// Checks the structural invariants, including the minimum triangle area.
    pub fn validate(&self) -> Result<(), MeshError> {
        self.validate_topology()?;
        for (i, t) in self.triangles().enumerate() {
            let [a, b, c] = self.triangle_positions(t);
            if !(triangle_area(a, b, c).as_f64() > MIN_TRIANGLE_AREA) {
                return Err(MeshError::DegenerateTriangle(i));
            }
        }
        Ok(())
    }

    /// Index, normal and UV checks without the area bound.
    pub fn validate_topology(&self) -> Result<(), MeshError> {
        if self.indices.len() % 3 != 0 {
            return Err(MeshError::RaggedIndices(self.indices.len()));
        }
        let count = self.positions.len();
        if let Some(&index) = self.indices.iter().find(|&&i| i as usize >= count) {
            return Err(MeshError::IndexOutOfRange { index, count });
        }
        if !self.normals.is_empty() {
            if self.normals.len() != count {
                return Err(MeshError::NormalCountMismatch {
                    normals: self.normals.len(),
                    vertices: count,
                });
            }
            if let Some(i) = self
                .normals
                .iter()
                .position(|&n| (norm(n).as_f64() - 1.0).abs() > NORMAL_LENGTH_TOL)
            {
                return Err(MeshError::NonUnitNormal(i));
            }
        }
        if let Some(uvs) = &self.uvs {
            if uvs.len() != count {
                return Err(MeshError::UvCountMismatch {
                    uvs: uvs.len(),
                    vertices: count,
                });
            }
        }
        Ok(())
    }
}
