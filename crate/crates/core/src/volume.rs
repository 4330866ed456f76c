//! Sectional maps with invalid-data masking and a reference CPU ray-march compositor.

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geomodel::ScalarField3D;
use crate::scalar::{lerp, Real};
use crate::vec3::{add, cross, normalize, scale, sub, Vec3};

/// Accumulated opacity at which a ray stops marching.
pub const EARLY_EXIT_ALPHA: f64 = 0.99;

pub type Rgba = [f64; 4];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VolumeError {
    #[error("invalid transfer function: {0}")]
    BadTransferFunction(String),
    #[error("axis must be one of x, y, z (got {0:?})")]
    BadAxis(String),
    #[error("coordinate {coordinate} outside [{min}, {max}] on axis {axis}")]
    CoordinateOutOfRange { axis: Axis, coordinate: f64, min: f64, max: f64 },
    #[error("ray-march step must be positive and finite")]
    BadStep,
    #[error("degenerate camera")]
    DegenerateCamera,
    #[error("png encoding failed: {0}")]
    Png(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn name(self) -> &'static str {
        ["x", "y", "z"][self.index()]
    }

    /// The two remaining axes, horizontal first.
    pub fn others(self) -> (usize, usize) {
        match self {
            Axis::X => (1, 2),
            Axis::Y => (0, 2),
            Axis::Z => (0, 1),
        }
    }
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = VolumeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            "z" | "Z" => Ok(Axis::Z),
            _ => Err(VolumeError::BadAxis(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColorStop {
    pub t: f64,
    pub rgba: Rgba,
}

/// Piecewise-linear color and opacity map, clamped outside its stops.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferFunction {
    pub stops: Vec<ColorStop>,
}

impl TransferFunction {
    pub fn new(stops: Vec<ColorStop>) -> Result<Self, VolumeError> {
        let bad = |m: &str| Err(VolumeError::BadTransferFunction(m.to_string()));
        if stops.len() < 2 {
            return bad("need at least two stops");
        }
        if stops.iter().any(|s| !s.t.is_finite()) {
            return bad("stop positions must be finite");
        }
        if stops.windows(2).any(|w| w[1].t < w[0].t) {
            return bad("stops must be sorted");
        }
        if stops[0].t >= stops[stops.len() - 1].t {
            return bad("domain must have t_min < t_max");
        }
        if stops.iter().flat_map(|s| s.rgba).any(|c| !(0.0..=1.0).contains(&c)) {
            return bad("color components must lie in [0, 1]");
        }
        Ok(TransferFunction { stops })
    }

    /// Blue at `t_min`, white at the midpoint, red at `t_max`, alpha 0.6 throughout.
    pub fn thermal(t_min: f64, t_max: f64) -> Self {
        let mid = 0.5 * (t_min + t_max);
        TransferFunction {
            stops: vec![
                ColorStop { t: t_min, rgba: [0.0, 0.0, 1.0, 0.6] },
                ColorStop { t: mid, rgba: [1.0, 1.0, 1.0, 0.6] },
                ColorStop { t: t_max, rgba: [1.0, 0.0, 0.0, 0.6] },
            ],
        }
    }

    /// [`thermal`](Self::thermal) over the valid value range of `field`.
    pub fn thermal_for<T: Real>(field: &ScalarField3D<T>) -> Self {
        match field.value_range() {
            Some((lo, hi)) if hi > lo => Self::thermal(lo.as_f64(), hi.as_f64()),
            Some((lo, _)) => Self::thermal(lo.as_f64() - 0.5, lo.as_f64() + 0.5),
            None => Self::thermal(0.0, 1.0),
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.stops[0].t, self.stops[self.stops.len() - 1].t)
    }

    pub fn apply(&self, t: f64) -> Rgba {
        let first = &self.stops[0];
        let last = &self.stops[self.stops.len() - 1];
        if t <= first.t {
            return first.rgba;
        }
        if t >= last.t {
            return last.rgba;
        }
        let k = self.stops.partition_point(|s| s.t <= t);
        let (a, b) = (&self.stops[k - 1], &self.stops[k]);
        if t == a.t {
            return a.rgba;
        }
        let u = (t - a.t) / (b.t - a.t);
        [0, 1, 2, 3].map(|c| lerp(a.rgba[c], b.rgba[c], u))
    }
}

/// Rectangle covered by a slice, in field coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceExtent {
    pub axis: Axis,
    pub axis_label: String,
    pub coordinate: f64,
    pub width: usize,
    pub height: usize,
    /// Label and (left, right) coordinates of the horizontal image axis.
    pub u_axis: String,
    pub u_range: [f64; 2],
    /// Label and (top, bottom) coordinates of the vertical image axis.
    pub v_axis: String,
    pub v_range: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectionImage {
    pub width: usize,
    pub height: usize,
    /// Row-major, top row first.
    pub pixels: Vec<Rgba>,
    /// Present for slices; absent for ray-cast views.
    pub geo_extent: Option<SliceExtent>,
}

fn to_u8(c: f64) -> u8 {
    (c.clamp(0.0, 1.0) * 255.0).round() as u8
}

impl SectionImage {
    pub fn pixel(&self, col: usize, row: usize) -> Rgba {
        self.pixels[row * self.width + col]
    }

    pub fn rgba8(&self) -> Vec<u8> {
        self.pixels.iter().flat_map(|p| p.map(to_u8)).collect()
    }

    /// 8-bit RGBA PNG.
    pub fn to_png(&self) -> Result<Vec<u8>, VolumeError> {
        let mut out = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut out, self.width as u32, self.height as u32);
            enc.set_color(png::ColorType::Rgba);
            enc.set_depth(png::BitDepth::Eight);
            let mut w = enc.write_header().map_err(|e| VolumeError::Png(e.to_string()))?;
            w.write_image_data(&self.rgba8()).map_err(|e| VolumeError::Png(e.to_string()))?;
        }
        Ok(out)
    }

    /// JSON sidecar describing the slice extent (`null` for ray-cast views).
    pub fn sidecar_json(&self) -> Vec<u8> {
        serde_json::to_vec(&self.geo_extent).expect("extent serializes")
    }
}

/// Axis-aligned section at native grid resolution.
///
/// Pixels whose sample touches an invalid node are RGBA (0, 0, 0, 0). The image
/// top is the highest coordinate of the vertical axis, except for an axis
/// labelled `depth`, which grows downward.
pub fn slice_section<T: Real>(
    field: &ScalarField3D<T>,
    axis: Axis,
    coordinate: T,
    tf: &TransferFunction,
) -> Result<SectionImage, VolumeError> {
    let g = &field.grid;
    let a = axis.index();
    let stencil = g.axis_stencil(a, coordinate).ok_or_else(|| {
        let (lo, hi) = g.bounds();
        VolumeError::CoordinateOutOfRange {
            axis,
            coordinate: coordinate.as_f64(),
            min: lo[a].as_f64(),
            max: hi[a].as_f64(),
        }
    })?;
    let (ua, va) = axis.others();
    let (width, height) = (g.dims[ua], g.dims[va]);
    let depth_down = field.meta.axes[va].eq_ignore_ascii_case("depth");
    let v_index = |row: usize| if depth_down { row } else { height - 1 - row };

    let mut pixels = Vec::with_capacity(width * height);
    for row in 0..height {
        for col in 0..width {
            let mut node = [0usize; 3];
            node[ua] = col;
            node[va] = v_index(row);
            let at = |i: usize| {
                let mut n = node;
                n[a] = i;
                field.valid_at(n[0], n[1], n[2])
            };
            let value = if stencil.t == T::zero() {
                at(stencil.lo)
            } else if stencil.t == T::one() {
                at(stencil.hi)
            } else {
                match (at(stencil.lo), at(stencil.hi)) {
                    (Some(x), Some(y)) => Some(lerp(x, y, stencil.t)),
                    _ => None,
                }
            };
            pixels.push(value.map_or([0.0; 4], |v| tf.apply(v.as_f64())));
        }
    }
    let coord = |ax: usize, i: usize| g.axis_coord(ax, i).as_f64();
    let extent = SliceExtent {
        axis,
        axis_label: field.meta.axes[a].clone(),
        coordinate: coordinate.as_f64(),
        width,
        height,
        u_axis: field.meta.axes[ua].clone(),
        u_range: [coord(ua, 0), coord(ua, width - 1)],
        v_axis: field.meta.axes[va].clone(),
        v_range: [coord(va, v_index(0)), coord(va, v_index(height - 1))],
    };
    Ok(SectionImage { width, height, pixels, geo_extent: Some(extent) })
}

/// Front-to-back compositing of (r, g, b, a) samples over an opaque background.
pub fn composite_front_to_back(samples: &[Rgba], background: [f64; 3], early_exit: bool) -> [f64; 3] {
    let mut c = [0.0; 3];
    let mut acc = 0.0;
    for s in samples {
        if early_exit && acc >= EARLY_EXIT_ALPHA {
            break;
        }
        let w = (1.0 - acc) * s[3];
        for k in 0..3 {
            c[k] += w * s[k];
        }
        acc += w;
    }
    for k in 0..3 {
        c[k] += (1.0 - acc) * background[k];
    }
    c
}

/// Back-to-front (painter's) compositing of the same samples, given front first.
pub fn composite_back_to_front(samples: &[Rgba], background: [f64; 3]) -> [f64; 3] {
    let mut c = background;
    for s in samples.iter().rev() {
        for k in 0..3 {
            c[k] = s[3] * s[k] + (1.0 - s[3]) * c[k];
        }
    }
    c
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Camera<T> {
    pub eye: Vec3<T>,
    pub target: Vec3<T>,
    pub up: Vec3<T>,
    /// Vertical field of view in degrees.
    pub vfov_deg: T,
    pub width: usize,
    pub height: usize,
}

/// Half the smallest grid spacing.
pub fn default_step<T: Real>(field: &ScalarField3D<T>) -> T {
    field.grid.min_spacing() * T::lit(0.5)
}

/// Parametric interval where the ray meets the box, clipped to t >= 0.
fn clip_ray<T: Real>(o: Vec3<T>, d: Vec3<T>, lo: Vec3<T>, hi: Vec3<T>) -> Option<(T, T)> {
    let mut t0 = T::zero();
    let mut t1 = T::infinity();
    for a in 0..3 {
        if d[a] == T::zero() {
            if o[a] < lo[a] || o[a] > hi[a] {
                return None;
            }
            continue;
        }
        let (mut ta, mut tb) = ((lo[a] - o[a]) / d[a], (hi[a] - o[a]) / d[a]);
        if ta > tb {
            std::mem::swap(&mut ta, &mut tb);
        }
        t0 = t0.max(ta);
        t1 = t1.min(tb);
    }
    (t0 <= t1).then_some((t0, t1))
}

/// Fixed-step front-to-back ray march through the field's bounding box.
///
/// Sample opacity is rescaled from the voxel spacing to `step`, so results
/// converge as the step shrinks. Invalid samples are fully transparent.
pub fn render_volume_raycast<T: Real>(
    field: &ScalarField3D<T>,
    camera: &Camera<T>,
    tf: &TransferFunction,
    step: T,
    background: [f64; 3],
) -> Result<SectionImage, VolumeError> {
    if !(step > T::zero()) || !step.is_finite() {
        return Err(VolumeError::BadStep);
    }
    let finite = camera.eye.iter().chain(&camera.target).chain(&camera.up).all(|v| v.is_finite())
        && camera.vfov_deg.is_finite();
    let fov_ok = camera.vfov_deg > T::zero() && camera.vfov_deg < T::lit(180.0);
    if !finite || !fov_ok || camera.width == 0 || camera.height == 0 {
        return Err(VolumeError::DegenerateCamera);
    }
    let tiny = T::lit(1e-12);
    let fwd = normalize(sub(camera.target, camera.eye), tiny).ok_or(VolumeError::DegenerateCamera)?;
    let right = normalize(cross(fwd, camera.up), tiny).ok_or(VolumeError::DegenerateCamera)?;
    let up = cross(right, fwd);
    let half = (camera.vfov_deg.to_radians() * T::lit(0.5)).tan();
    let aspect = T::from_count(camera.width) / T::from_count(camera.height);
    let (lo, hi) = field.grid.bounds();
    let exponent = (step / field.grid.min_spacing()).as_f64();
    let (w, h) = (camera.width, camera.height);

    let pixels: Vec<Rgba> = (0..w * h)
        .into_par_iter()
        .map(|n| {
            let (px, py) = (n % w, n / w);
            let sx = (T::lit(2.0) * (T::from_count(px) + T::lit(0.5)) / T::from_count(w) - T::one()) * half * aspect;
            let sy = (T::one() - T::lit(2.0) * (T::from_count(py) + T::lit(0.5)) / T::from_count(h)) * half;
            let dir = add(fwd, add(scale(right, sx), scale(up, sy)));
            let dir = normalize(dir, tiny).unwrap_or(fwd);
            let mut samples = Vec::new();
            if let Some((t0, t1)) = clip_ray(camera.eye, dir, lo, hi) {
                let mut acc = 0.0;
                let mut k = 0usize;
                loop {
                    let t = t0 + step * T::from_count(k);
                    if t > t1 || acc >= EARLY_EXIT_ALPHA {
                        break;
                    }
                    if let Some(v) = field.sample(add(camera.eye, scale(dir, t))) {
                        let mut c = tf.apply(v.as_f64());
                        c[3] = 1.0 - (1.0 - c[3]).powf(exponent);
                        acc += (1.0 - acc) * c[3];
                        samples.push(c);
                    }
                    k += 1;
                }
            }
            let c = composite_front_to_back(&samples, background, true);
            [c[0], c[1], c[2], 1.0]
        })
        .collect();
    Ok(SectionImage { width: w, height: h, pixels, geo_extent: None })
}
