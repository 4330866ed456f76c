//! Fence diagrams: vertical stratum panels between consecutive boreholes of a survey line.
//!
//! Each panel is drafted in a 2D frame (s along the segment, world z) and then
//! mapped to 3D. Contacts between strata run straight from one borehole to the
//! other unless a stratum pinches out, in which case its top and bottom contacts
//! meet at the segment midpoint.

use indexmap::IndexMap;
use thiserror::Error;

use crate::geomodel::{Borehole, Dataset};
use crate::mesh::{Material, TriangleMesh, MIN_TRIANGLE_AREA};
use crate::scalar::Real;
use crate::vec3::{triangle_area, Vec3};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FenceError {
    #[error("survey line {0} not found")]
    SurveyLineNotFound(String),
    #[error("survey line {line} references missing borehole {borehole}")]
    BoreholeMissing { line: String, borehole: String },
    #[error("survey line {0} needs at least two boreholes")]
    LineTooShort(String),
    #[error("boreholes {0} and {1} share a location")]
    DegenerateSegment(String, String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FencePanel<T> {
    pub survey_line_id: String,
    pub segment: (String, String),
    /// Location of the first borehole.
    pub origin: [T; 2],
    /// Unit horizontal direction from the first borehole to the second.
    pub direction: [T; 2],
    pub length: T,
    /// One mesh per stratum present at either end, youngest first. The material
    /// name is the stratum id.
    pub meshes: Vec<TriangleMesh<T>>,
}

impl<T: Real> FencePanel<T> {
    /// World position of panel coordinates (s, z).
    pub fn to_world(&self, s: T, z: T) -> Vec3<T> {
        [
            self.origin[0] + self.direction[0] * s,
            self.origin[1] + self.direction[1] * s,
            z,
        ]
    }

    /// Panel coordinates (s, z) of a world point in the panel plane.
    pub fn to_plane(&self, p: Vec3<T>) -> [T; 2] {
        let s = (p[0] - self.origin[0]) * self.direction[0] + (p[1] - self.origin[1]) * self.direction[1];
        [s, p[2]]
    }
}

/// Elevation of every contact between the strata in `union` at one borehole.
///
/// Contact `i` is the top of `union[i]` and contact `i + 1` its bottom. A stratum
/// missing from the borehole collapses onto the contact where it would sit.
fn contact_elevations<T: Real>(hole: &Borehole<T>, union: &[&str]) -> Vec<T> {
    let m = union.len();
    let mut z: Vec<Option<T>> = vec![None; m + 1];
    for (i, id) in union.iter().enumerate() {
        if let Some(iv) = hole.interval(id) {
            z[i] = Some(hole.world_z(iv.top_depth));
            z[i + 1] = Some(hole.world_z(iv.bottom_depth));
        }
    }
    let fallback = hole.collar_elevation;
    (0..=m)
        .map(|i| {
            z[i].or_else(|| z[i + 1..].iter().find_map(|v| *v))
                .or_else(|| z[..i].iter().rev().find_map(|v| *v))
                .unwrap_or(fallback)
        })
        .collect()
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

struct PanelBuilder<'a, T> {
    panel: &'a FencePanel<T>,
    normal: Vec3<T>,
}

impl<T: Real> PanelBuilder<'_, T> {
    /// Triangulates a stratum polygon given as top and bottom chains of (s, z).
    fn stratum_mesh(&self, top: &[[T; 2]], bottom: &[[T; 2]], material: Material) -> TriangleMesh<T> {
        // triangles in (s, z), counter-clockwise
        let mut tris: Vec<[[T; 2]; 3]> = Vec::new();
        match (top.len(), bottom.len()) {
            (2, 2) => {
                tris.push([top[0], bottom[0], bottom[1]]);
                tris.push([top[0], bottom[1], top[1]]);
            }
            (3, 2) => {
                let m = top[1];
                tris.push([top[0], bottom[0], m]);
                tris.push([m, bottom[0], bottom[1]]);
                tris.push([m, bottom[1], top[2]]);
            }
            (2, 3) => {
                let m = bottom[1];
                tris.push([bottom[0], m, top[0]]);
                tris.push([m, top[1], top[0]]);
                tris.push([m, bottom[2], top[1]]);
            }
            _ => {
                for k in 0..2 {
                    tris.push([top[k], bottom[k], bottom[k + 1]]);
                    tris.push([top[k], bottom[k + 1], top[k + 1]]);
                }
            }
        }
        let mut positions: Vec<Vec3<T>> = Vec::new();
        let mut plane: Vec<[T; 2]> = Vec::new();
        let mut indices = Vec::new();
        let min_area = T::lit(MIN_TRIANGLE_AREA);
        for t in tris {
            let w = t.map(|q| self.panel.to_world(q[0], q[1]));
            if triangle_area(w[0], w[1], w[2]) <= min_area {
                continue;
            }
            for q in t {
                let idx = match plane.iter().position(|&p| p == q) {
                    Some(i) => i,
                    None => {
                        plane.push(q);
                        positions.push(self.panel.to_world(q[0], q[1]));
                        plane.len() - 1
                    }
                };
                indices.push(idx as u32);
            }
        }
        let mut mesh = TriangleMesh::new(positions, indices, material);
        mesh.normals = vec![self.normal; mesh.positions.len()];
        mesh
    }
}

fn build_panel<T: Real>(
    dataset: &Dataset<T>,
    line_id: &str,
    a: &Borehole<T>,
    b: &Borehole<T>,
) -> Result<FencePanel<T>, FenceError> {
    let d = [b.location[0] - a.location[0], b.location[1] - a.location[1]];
    let length = (d[0] * d[0] + d[1] * d[1]).sqrt();
    if length <= T::lit(crate::triangulation::EPS_DUP) {
        return Err(FenceError::DegenerateSegment(a.id.clone(), b.id.clone()));
    }
    let direction = [d[0] / length, d[1] / length];
    let mut panel = FencePanel {
        survey_line_id: line_id.to_string(),
        segment: (a.id.clone(), b.id.clone()),
        origin: a.location,
        direction,
        length,
        meshes: Vec::new(),
    };

    let union: Vec<&str> = dataset
        .order
        .ids()
        .filter(|id| a.interval(id).is_some() || b.interval(id).is_some())
        .collect();
    let m = union.len();
    if m == 0 {
        return Ok(panel);
    }
    let za = contact_elevations(a, &union);
    let zb = contact_elevations(b, &union);

    // contacts joined by a stratum missing at one end meet at mid-segment
    let mut parent: Vec<usize> = (0..=m).collect();
    for (i, id) in union.iter().enumerate() {
        if a.interval(id).is_none() || b.interval(id).is_none() {
            let (r, q) = (find(&mut parent, i), find(&mut parent, i + 1));
            parent[q.max(r)] = q.min(r);
        }
    }
    let two = T::lit(2.0);
    let default_mid: Vec<T> = (0..=m).map(|i| (za[i] + zb[i]) / two).collect();
    let mut mid: Vec<Option<T>> = vec![None; m + 1];
    for root in 0..=m {
        let members: Vec<usize> = (0..=m).filter(|&i| find(&mut parent, i) == root).collect();
        if members.len() < 2 {
            continue;
        }
        // outer contacts stay straight so the panel keeps its column envelope
        let z = if members.contains(&0) {
            default_mid[0]
        } else if members.contains(&m) {
            default_mid[m]
        } else {
            members.iter().fold(T::zero(), |acc, &i| acc + default_mid[i]) / T::from_count(members.len())
        };
        for i in members {
            mid[i] = Some(z);
        }
    }

    let half = length / two;
    let chain = |i: usize| -> Vec<[T; 2]> {
        match mid[i] {
            Some(zm) => vec![[T::zero(), za[i]], [half, zm], [length, zb[i]]],
            None => vec![[T::zero(), za[i]], [length, zb[i]]],
        }
    };
    let builder = PanelBuilder {
        panel: &panel,
        normal: [direction[1], -direction[0], T::zero()],
    };
    let meshes = union
        .iter()
        .enumerate()
        .map(|(i, id)| {
            let color = dataset.order.color(id).unwrap_or([0.5, 0.5, 0.5, 1.0]);
            builder.stratum_mesh(&chain(i), &chain(i + 1), Material::new(*id, color))
        })
        .filter(|mesh| !mesh.is_empty())
        .collect();
    panel.meshes = meshes;
    Ok(panel)
}

/// One panel per consecutive borehole pair of `survey_line_id`.
pub fn build_fence_diagram<T: Real>(dataset: &Dataset<T>, survey_line_id: &str) -> Result<Vec<FencePanel<T>>, FenceError> {
    let line = dataset
        .survey_lines
        .get(survey_line_id)
        .ok_or_else(|| FenceError::SurveyLineNotFound(survey_line_id.to_string()))?;
    if line.borehole_ids.len() < 2 {
        return Err(FenceError::LineTooShort(survey_line_id.to_string()));
    }
    let hole = |id: &String| {
        dataset.boreholes.get(id).ok_or_else(|| FenceError::BoreholeMissing {
            line: survey_line_id.to_string(),
            borehole: id.clone(),
        })
    };
    line.borehole_ids
        .windows(2)
        .map(|w| build_panel(dataset, survey_line_id, hole(&w[0])?, hole(&w[1])?))
        .collect()
}

/// Planar area of each stratum in the panel, in panel order.
pub fn panel_cross_section_area<T: Real>(panel: &FencePanel<T>) -> IndexMap<String, T> {
    panel
        .meshes
        .iter()
        .map(|m| (m.material.name.clone(), m.surface_area()))
        .collect()
}
