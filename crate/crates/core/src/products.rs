//! Byte-level products shared by the HTTP service and the command line, so both
//! emit identical artifacts for identical requests.

use serde_json::json;
use thiserror::Error;

use crate::export::{drape_texture, export_gltf, ExportError, Scene, Texture};
use crate::fence::{build_fence_diagram, FenceError};
use crate::geomodel::{Dataset, ScalarField3D};
use crate::isosurface::{marching_cubes, IsoError};
use crate::particles::{emit_frame, step, ParticleSystemState, SpillConfig};
use crate::scalar::Real;
use crate::triangulation::{
    apply_drilling_correction, build_horizon_surface, build_terrain_tin, horizon_picks, SurfaceError,
};
use crate::volume::{slice_section, Axis, TransferFunction, VolumeError};

/// Largest number of spill frames served by one request.
pub const MAX_FRAMES_PER_REQUEST: u64 = 2000;

/// Failure of a product request, classified by cause.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProductError {
    /// A referenced entity (field, stratum, line, ...) does not exist.
    #[error("{0}")]
    NotFound(String),
    /// A parameter could not be parsed or is invalid.
    #[error("{0}")]
    BadRequest(String),
    /// A parameter lies outside the data's range.
    #[error("{0}")]
    OutOfRange(String),
    /// The request is well-formed but produces nothing.
    #[error("{0}")]
    Empty(String),
}

impl From<ExportError> for ProductError {
    fn from(e: ExportError) -> Self {
        match e {
            ExportError::EmptyScene | ExportError::EmptyMesh(_) => ProductError::Empty(e.to_string()),
            other => ProductError::BadRequest(other.to_string()),
        }
    }
}

/// Parses a float parameter and renders it canonically, so `20`, `20.0` and
/// `2e1` share one cache key.
pub fn canonical_float(raw: &str) -> Result<(f64, String), ProductError> {
    let v: f64 = raw
        .trim()
        .parse()
        .map_err(|_| ProductError::BadRequest(format!("not a number: {raw:?}")))?;
    if !v.is_finite() {
        return Err(ProductError::BadRequest(format!("not a finite number: {raw:?}")));
    }
    let v = if v == 0.0 { 0.0 } else { v };
    Ok((v, format!("{v}")))
}

fn field<'a, T: Real>(ds: &'a Dataset<T>, name: &str) -> Result<&'a ScalarField3D<T>, ProductError> {
    ds.scalar_fields
        .get(name)
        .ok_or_else(|| ProductError::NotFound(format!("unknown field {name:?}")))
}

/// JSON description of the dataset for clients.
pub fn dataset_summary<T: Real>(ds: &Dataset<T>) -> Vec<u8> {
    let boreholes: Vec<_> = ds
        .boreholes
        .values()
        .map(|b| {
            json!({
                "id": b.id,
                "location": [b.location[0].as_f64(), b.location[1].as_f64()],
                "collar_elevation": b.collar_elevation.as_f64(),
                "intervals": b.intervals.iter().map(|iv| json!({
                    "stratum": iv.stratum_id,
                    "top_depth": iv.top_depth.as_f64(),
                    "bottom_depth": iv.bottom_depth.as_f64(),
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    let strata: Vec<_> = ds
        .order
        .strata
        .iter()
        .map(|s| {
            json!({
                "id": s.id,
                "color": s.color,
                "boreholes": ds.boreholes_with(&s.id).count(),
            })
        })
        .collect();
    let lines: Vec<_> = ds
        .survey_lines
        .values()
        .map(|l| json!({ "id": l.id, "boreholes": l.borehole_ids }))
        .collect();
    let grid_json = |g: &crate::geomodel::Grid<T>, meta: &crate::geomodel::FieldMetadata| {
        let (lo, hi) = g.bounds();
        json!({
            "name": meta.name,
            "unit": meta.unit,
            "axes": meta.axes,
            "dims": g.dims,
            "origin": g.origin.map(T::as_f64),
            "spacing": g.spacing.map(T::as_f64),
            "extent": { "min": lo.map(T::as_f64), "max": hi.map(T::as_f64) },
        })
    };
    let mut fields = Vec::new();
    for f in ds.scalar_fields.values() {
        let mut j = grid_json(&f.grid, &f.meta);
        j["components"] = json!(1);
        j["value_range"] = json!(f.value_range().map(|(a, b)| [a.as_f64(), b.as_f64()]));
        fields.push(j);
    }
    for f in ds.vector_fields.values() {
        let mut j = grid_json(&f.grid, &f.meta);
        j["components"] = json!(3);
        fields.push(j);
    }
    let doc = json!({
        "boreholes": boreholes,
        "strata": strata,
        "survey_lines": lines,
        "fields": fields,
        "terrain": { "source": if ds.terrain_samples.is_some() { "bathymetry" } else { "collars" },
                     "drape": ds.drape.as_ref().map(|d| &d.name) },
        "spill": ds.spill.as_ref().map(|c| serde_json::to_value(c).expect("config serializes")),
    });
    serde_json::to_vec_pretty(&doc).expect("summary serializes")
}

/// Terrain TIN from the bathymetry soundings (borehole collars when absent),
/// draped with the sonar image when the dataset provides one.
pub fn terrain_glb<T: Real>(ds: &Dataset<T>) -> Result<Vec<u8>, ProductError> {
    let samples: Vec<[T; 3]> = match &ds.terrain_samples {
        Some(s) => s.clone(),
        None => ds
            .boreholes
            .values()
            .map(|b| [b.location[0], b.location[1], b.collar_elevation])
            .collect(),
    };
    let mut mesh = build_terrain_tin(&samples).map_err(|e| ProductError::Empty(format!("terrain: {e}")))?;
    let mut scene = Scene::new("terrain");
    if let Some(d) = &ds.drape {
        mesh = drape_texture(&mesh, d.extent, &d.name)?;
        scene.textures.push(Texture { name: d.name.clone(), png: d.png.clone() });
    }
    scene.push(mesh, "terrain", "terrain");
    Ok(export_gltf(&scene)?)
}

/// Radius for horizon drilling correction: the diagonal of the borehole footprint.
fn correction_radius<T: Real>(picks: &[[T; 3]]) -> T {
    let (mut lo, mut hi) = ([T::infinity(); 2], [T::neg_infinity(); 2]);
    for p in picks {
        for a in 0..2 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let d = ((hi[0] - lo[0]).powi(2) + (hi[1] - lo[1]).powi(2)).sqrt();
    d.max(T::one())
}

fn horizon_node<T: Real>(ds: &Dataset<T>, stratum: &str) -> Result<crate::mesh::TriangleMesh<T>, SurfaceError> {
    let surface = build_horizon_surface(ds, stratum)?;
    let picks = horizon_picks(ds, stratum);
    Ok(apply_drilling_correction(&surface, &picks, correction_radius(&picks)).unwrap_or(surface))
}

/// Horizon (top surface) of one stratum, corrected to its borehole picks.
pub fn horizon_glb<T: Real>(ds: &Dataset<T>, stratum: &str) -> Result<Vec<u8>, ProductError> {
    let mesh = horizon_node(ds, stratum).map_err(|e| match e {
        SurfaceError::StratumNotFound(_) => ProductError::NotFound(e.to_string()),
        SurfaceError::Triangulation(_) => ProductError::Empty(format!("horizon {stratum}: {e}")),
    })?;
    let mut scene = Scene::new(format!("horizon {stratum}"));
    scene.push(mesh, stratum, stratum);
    Ok(export_gltf(&scene)?)
}

/// Layer diagram: every horizon that can be built (at least three boreholes).
pub fn horizons_glb<T: Real>(ds: &Dataset<T>) -> Result<Vec<u8>, ProductError> {
    let mut scene = Scene::new("horizons");
    for id in ds.order.ids() {
        if let Ok(mesh) = horizon_node(ds, id) {
            scene.push(mesh, id, id);
        }
    }
    if scene.nodes.is_empty() {
        return Err(ProductError::Empty("no stratum is drilled by three or more boreholes".into()));
    }
    Ok(export_gltf(&scene)?)
}

/// Fence diagram along a survey line: one node per stratum per segment.
pub fn fence_glb<T: Real>(ds: &Dataset<T>, line: &str) -> Result<Vec<u8>, ProductError> {
    let panels = build_fence_diagram(ds, line).map_err(|e| match e {
        FenceError::SurveyLineNotFound(_) => ProductError::NotFound(e.to_string()),
        other => ProductError::BadRequest(other.to_string()),
    })?;
    let mut scene = Scene::new(format!("fence {line}"));
    for p in panels {
        for mesh in p.meshes {
            let stratum = mesh.material.name.clone();
            let label = format!("{}:{}-{}:{}", line, p.segment.0, p.segment.1, stratum);
            scene.push(mesh, label, stratum);
        }
    }
    Ok(export_gltf(&scene)?)
}

/// Isosurface of a scalar field.
pub fn isosurface_glb<T: Real>(ds: &Dataset<T>, field_name: &str, iso: f64) -> Result<Vec<u8>, ProductError> {
    let f = field(ds, field_name)?;
    let mesh = marching_cubes(f, T::lit(iso)).map_err(|e| match e {
        IsoError::NonFiniteIso => ProductError::BadRequest(e.to_string()),
        other => ProductError::Empty(other.to_string()),
    })?;
    if mesh.is_empty() {
        return Err(ProductError::Empty(format!("{field_name} never crosses {iso}")));
    }
    let mut scene = Scene::new(format!("{field_name} = {iso}"));
    scene.push(mesh, "isosurface", "isosurface");
    Ok(export_gltf(&scene)?)
}

/// A slice image and its extent description.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceProduct {
    pub png: Vec<u8>,
    /// Compact JSON of the slice rectangle, also sent as `X-Geo-Extent`.
    pub extent_json: String,
}

/// Axis-aligned section through a scalar field with the thermal transfer function.
pub fn slice_png<T: Real>(ds: &Dataset<T>, field_name: &str, axis: Axis, coord: f64) -> Result<SliceProduct, ProductError> {
    let f = field(ds, field_name)?;
    let tf = TransferFunction::thermal_for(f);
    let img = slice_section(f, axis, T::lit(coord), &tf).map_err(|e| match e {
        VolumeError::CoordinateOutOfRange { .. } => ProductError::OutOfRange(e.to_string()),
        other => ProductError::BadRequest(other.to_string()),
    })?;
    let png = img.to_png().map_err(|e| ProductError::BadRequest(e.to_string()))?;
    Ok(SliceProduct {
        png,
        extent_json: String::from_utf8(img.sidecar_json()).expect("json is utf-8"),
    })
}

/// Spill run that advances lazily; frame `k` is the state after
/// `(k + 1) * steps_per_frame` steps.
#[derive(Debug, Clone)]
pub struct SpillSimulation<T> {
    pub config: SpillConfig<T>,
    state: ParticleSystemState<T>,
}

impl<T: Real> SpillSimulation<T> {
    pub fn new(config: SpillConfig<T>) -> Result<Self, ProductError> {
        config.validate().map_err(|e| ProductError::BadRequest(e.to_string()))?;
        let state = ParticleSystemState::new(&config);
        Ok(SpillSimulation { config, state })
    }

    pub fn state(&self) -> &ParticleSystemState<T> {
        &self.state
    }

    /// Binary frames `from .. from + count`, concatenated.
    pub fn frames(&mut self, ds: &Dataset<T>, from: u64, count: u64) -> Result<Vec<u8>, ProductError> {
        if count > MAX_FRAMES_PER_REQUEST {
            return Err(ProductError::BadRequest(format!(
                "at most {MAX_FRAMES_PER_REQUEST} frames per request"
            )));
        }
        let current = ds
            .vector_fields
            .get(&self.config.current)
            .ok_or_else(|| ProductError::NotFound(format!("unknown vector field {:?}", self.config.current)))?;
        let per = u64::from(self.config.steps_per_frame);
        let mut out = Vec::new();
        for k in from..from.saturating_add(count) {
            let target = (k + 1)
                .checked_mul(per)
                .ok_or_else(|| ProductError::OutOfRange(format!("frame {k} too far")))?;
            if self.state.steps > target {
                self.state = ParticleSystemState::new(&self.config);
            }
            while self.state.steps < target {
                step(&mut self.state, &self.config, current);
            }
            let index = u32::try_from(k).map_err(|_| ProductError::OutOfRange(format!("frame {k} too far")))?;
            out.extend(emit_frame(&self.state).to_binary(index));
        }
        Ok(out)
    }
}

/// Spill configuration of the dataset, or a not-found error.
pub fn dataset_spill<T: Real>(ds: &Dataset<T>) -> Result<SpillConfig<T>, ProductError> {
    ds.spill
        .clone()
        .ok_or_else(|| ProductError::NotFound("dataset has no spill configuration".into()))
}
