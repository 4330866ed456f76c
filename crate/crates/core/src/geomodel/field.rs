use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{lerp, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("bad field header: {0}")]
    BadHeader(String),
    #[error("payload has {actual} bytes, expected {expected}")]
    SizeMismatch { expected: usize, actual: usize },
    #[error("grid spacing must be positive on every axis")]
    BadSpacing,
    #[error("grid dims must be non-zero on every axis")]
    BadDims,
    #[error("value at index {index} is neither finite nor the sentinel")]
    NonFiniteValue { index: usize },
    #[error("header declares {found} components, expected {expected}")]
    ComponentMismatch { expected: u8, found: u8 },
}

/// Regular axis-aligned node lattice. Storage is x-fastest, then y, then z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid<T> {
    pub dims: [usize; 3],
    pub origin: [T; 3],
    pub spacing: [T; 3],
}

/// One axis of a trilinear stencil: the two node indices and the blend weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisStencil<T> {
    pub lo: usize,
    pub hi: usize,
    pub t: T,
}

/// Points within this many grid units of a node snap onto it.
const NODE_SNAP: f64 = 1e-9;

impl<T: Real> Grid<T> {
    pub fn new(dims: [usize; 3], origin: [T; 3], spacing: [T; 3]) -> Result<Self, FieldError> {
        if dims.iter().any(|&n| n == 0) {
            return Err(FieldError::BadDims);
        }
        if spacing.iter().any(|&s| !(s > T::zero()) || !s.is_finite()) {
            return Err(FieldError::BadSpacing);
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(FieldError::BadHeader("origin must be finite".into()));
        }
        Ok(Grid { dims, origin, spacing })
    }

    pub fn node_count(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    #[inline]
    pub fn node_position(&self, i: usize, j: usize, k: usize) -> [T; 3] {
        [
            self.axis_coord(0, i),
            self.axis_coord(1, j),
            self.axis_coord(2, k),
        ]
    }

    #[inline]
    pub fn axis_coord(&self, axis: usize, i: usize) -> T {
        self.origin[axis] + T::from_count(i) * self.spacing[axis]
    }

    /// Lower and upper corner of the node lattice.
    pub fn bounds(&self) -> ([T; 3], [T; 3]) {
        let hi = [
            self.axis_coord(0, self.dims[0] - 1),
            self.axis_coord(1, self.dims[1] - 1),
            self.axis_coord(2, self.dims[2] - 1),
        ];
        (self.origin, hi)
    }

    pub fn min_spacing(&self) -> T {
        self.spacing[0].min(self.spacing[1]).min(self.spacing[2])
    }

    /// Continuous grid coordinate of `x` on `axis`, snapped to a node when within rounding noise.
    pub fn grid_coord(&self, axis: usize, x: T) -> T {
        let u = (x - self.origin[axis]) / self.spacing[axis];
        let r = u.round();
        if (u - r).abs() <= T::lit(NODE_SNAP) {
            r
        } else {
            u
        }
    }

    /// Stencil along one axis, or `None` outside the lattice.
    pub fn axis_stencil(&self, axis: usize, x: T) -> Option<AxisStencil<T>> {
        let n = self.dims[axis];
        let u = self.grid_coord(axis, x);
        if !(u >= T::zero()) || u > T::from_count(n - 1) {
            return None;
        }
        if n == 1 {
            return Some(AxisStencil { lo: 0, hi: 0, t: T::zero() });
        }
        let lo = u.floor().to_usize()?.min(n - 2);
        Some(AxisStencil {
            lo,
            hi: lo + 1,
            t: u - T::from_count(lo),
        })
    }

    pub fn stencil(&self, p: [T; 3]) -> Option<[AxisStencil<T>; 3]> {
        Some([
            self.axis_stencil(0, p[0])?,
            self.axis_stencil(1, p[1])?,
            self.axis_stencil(2, p[2])?,
        ])
    }

    pub fn contains(&self, p: [T; 3]) -> bool {
        self.stencil(p).is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldMetadata {
    pub name: String,
    pub unit: String,
    pub axes: [String; 3],
    /// Numeric sentinel used by the on-disk payload; `None` means NaN.
    pub file_sentinel: Option<f64>,
}

impl FieldMetadata {
    pub fn named(name: impl Into<String>, unit: impl Into<String>) -> Self {
        FieldMetadata {
            name: name.into(),
            unit: unit.into(),
            axes: ["x".into(), "y".into(), "z".into()],
            file_sentinel: None,
        }
    }
}

/// Scalar samples on a [`Grid`]. Invalid samples are stored as NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField3D<T> {
    pub grid: Grid<T>,
    pub values: Vec<T>,
    pub meta: FieldMetadata,
}

/// Three-component velocities (u, v, w in m/s) on a [`Grid`], interleaved per node.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField3D<T> {
    pub grid: Grid<T>,
    pub values: Vec<T>,
    pub meta: FieldMetadata,
}

impl<T: Real> ScalarField3D<T> {
    pub fn new(grid: Grid<T>, values: Vec<T>, meta: FieldMetadata) -> Result<Self, FieldError> {
        if values.len() != grid.node_count() {
            return Err(FieldError::SizeMismatch {
                expected: grid.node_count(),
                actual: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| v.is_infinite()) {
            return Err(FieldError::NonFiniteValue { index });
        }
        Ok(ScalarField3D { grid, values, meta })
    }

    /// Builds a field by evaluating `f` at every node position.
    pub fn from_fn(grid: Grid<T>, meta: FieldMetadata, mut f: impl FnMut([T; 3]) -> T) -> Self {
        let mut values = Vec::with_capacity(grid.node_count());
        for k in 0..grid.dims[2] {
            for j in 0..grid.dims[1] {
                for i in 0..grid.dims[0] {
                    values.push(f(grid.node_position(i, j, k)));
                }
            }
        }
        ScalarField3D { grid, values, meta }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize, k: usize) -> T {
        self.values[self.grid.index(i, j, k)]
    }

    /// Node value, or `None` for the invalid sentinel.
    #[inline]
    pub fn valid_at(&self, i: usize, j: usize, k: usize) -> Option<T> {
        let v = self.at(i, j, k);
        (!v.is_nan()).then_some(v)
    }

    /// Trilinear interpolation; `None` outside the lattice or when any of the
    /// eight surrounding nodes is invalid.
    pub fn sample(&self, p: [T; 3]) -> Option<T> {
        let [sx, sy, sz] = self.grid.stencil(p)?;
        let mut c = [T::zero(); 8];
        for (n, slot) in c.iter_mut().enumerate() {
            let i = if n & 1 == 0 { sx.lo } else { sx.hi };
            let j = if n & 2 == 0 { sy.lo } else { sy.hi };
            let k = if n & 4 == 0 { sz.lo } else { sz.hi };
            *slot = self.valid_at(i, j, k)?;
        }
        let x00 = lerp(c[0], c[1], sx.t);
        let x10 = lerp(c[2], c[3], sx.t);
        let x01 = lerp(c[4], c[5], sx.t);
        let x11 = lerp(c[6], c[7], sx.t);
        let y0 = lerp(x00, x10, sy.t);
        let y1 = lerp(x01, x11, sy.t);
        Some(lerp(y0, y1, sz.t))
    }

    /// Minimum and maximum over valid samples.
    pub fn value_range(&self) -> Option<(T, T)> {
        self.values
            .iter()
            .filter(|v| !v.is_nan())
            .fold(None, |acc, &v| match acc {
                None => Some((v, v)),
                Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
            })
    }

    /// Returns a copy with every value negated (invalid nodes stay invalid).
    pub fn negated(&self) -> Self {
        ScalarField3D {
            grid: self.grid,
            values: self.values.iter().map(|&v| -v).collect(),
            meta: self.meta.clone(),
        }
    }
}

impl<T: Real> VectorField3D<T> {
    pub fn new(grid: Grid<T>, values: Vec<T>, meta: FieldMetadata) -> Result<Self, FieldError> {
        if values.len() != 3 * grid.node_count() {
            return Err(FieldError::SizeMismatch {
                expected: 3 * grid.node_count(),
                actual: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(FieldError::NonFiniteValue { index });
        }
        Ok(VectorField3D { grid, values, meta })
    }

    pub fn from_fn(grid: Grid<T>, meta: FieldMetadata, mut f: impl FnMut([T; 3]) -> [T; 3]) -> Self {
        let mut values = Vec::with_capacity(3 * grid.node_count());
        for k in 0..grid.dims[2] {
            for j in 0..grid.dims[1] {
                for i in 0..grid.dims[0] {
                    values.extend_from_slice(&f(grid.node_position(i, j, k)));
                }
            }
        }
        VectorField3D { grid, values, meta }
    }

    /// Spatially uniform field.
    pub fn constant(grid: Grid<T>, v: [T; 3]) -> Self {
        Self::from_fn(grid, FieldMetadata::named("constant", "m/s"), |_| v)
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize, k: usize) -> [T; 3] {
        let n = 3 * self.grid.index(i, j, k);
        [self.values[n], self.values[n + 1], self.values[n + 2]]
    }

    /// Trilinear interpolation of each component; `None` outside the lattice.
    pub fn sample(&self, p: [T; 3]) -> Option<[T; 3]> {
        let [sx, sy, sz] = self.grid.stencil(p)?;
        let corner = |n: usize| {
            let i = if n & 1 == 0 { sx.lo } else { sx.hi };
            let j = if n & 2 == 0 { sy.lo } else { sy.hi };
            let k = if n & 4 == 0 { sz.lo } else { sz.hi };
            self.at(i, j, k)
        };
        let c: [[T; 3]; 8] = std::array::from_fn(corner);
        Some(std::array::from_fn(|d| {
            let x00 = lerp(c[0][d], c[1][d], sx.t);
            let x10 = lerp(c[2][d], c[3][d], sx.t);
            let x01 = lerp(c[4][d], c[5][d], sx.t);
            let x11 = lerp(c[6][d], c[7][d], sx.t);
            lerp(lerp(x00, x10, sy.t), lerp(x01, x11, sy.t), sz.t)
        }))
    }
}

/// Sidecar JSON header describing a raw float32 payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub name: String,
    pub dims: [usize; 3],
    pub origin: [f64; 3],
    pub spacing: [f64; 3],
    #[serde(default)]
    pub unit: String,
    /// `null` means NaN marks invalid samples.
    #[serde(default)]
    pub sentinel: Option<f64>,
    #[serde(default = "one_component")]
    pub components: u8,
    #[serde(default = "default_axes")]
    pub axes: [String; 3],
}

fn one_component() -> u8 {
    1
}

fn default_axes() -> [String; 3] {
    ["x".into(), "y".into(), "z".into()]
}

impl FieldHeader {
    pub fn from_json(bytes: &[u8]) -> Result<Self, FieldError> {
        serde_json::from_slice(bytes).map_err(|e| FieldError::BadHeader(e.to_string()))
    }

    fn grid<T: Real>(&self) -> Result<Grid<T>, FieldError> {
        Grid::new(
            self.dims,
            self.origin.map(T::lit),
            self.spacing.map(T::lit),
        )
    }

    fn metadata(&self) -> FieldMetadata {
        FieldMetadata {
            name: self.name.clone(),
            unit: self.unit.clone(),
            axes: self.axes.clone(),
            file_sentinel: self.sentinel,
        }
    }

    /// Decodes little-endian float32 values, mapping the declared sentinel to NaN.
    fn decode<T: Real>(&self, payload: &[u8], expected: usize, allow_invalid: bool) -> Result<Vec<T>, FieldError> {
        if payload.len() != 4 * expected {
            return Err(FieldError::SizeMismatch {
                expected: 4 * expected,
                actual: payload.len(),
            });
        }
        let sentinel = self.sentinel.map(|s| s as f32);
        payload
            .chunks_exact(4)
            .enumerate()
            .map(|(index, b)| {
                let v = f32::from_le_bytes([b[0], b[1], b[2], b[3]]);
                let invalid = match sentinel {
                    Some(s) => v == s,
                    None => v.is_nan(),
                };
                if invalid && allow_invalid {
                    Ok(T::nan())
                } else if v.is_finite() {
                    Ok(T::from_f32(v).expect("f32 representable"))
                } else {
                    Err(FieldError::NonFiniteValue { index })
                }
            })
            .collect()
    }
}

/// Parses a scalar field from its JSON header and raw payload.
pub fn parse_scalar_field<T: Real>(header: &[u8], payload: &[u8]) -> Result<ScalarField3D<T>, FieldError> {
    let h = FieldHeader::from_json(header)?;
    if h.components != 1 {
        return Err(FieldError::ComponentMismatch { expected: 1, found: h.components });
    }
    let grid = h.grid()?;
    let values = h.decode(payload, grid.node_count(), true)?;
    Ok(ScalarField3D { grid, values, meta: h.metadata() })
}

/// Parses a vector field (interleaved u, v, w per node).
pub fn parse_vector_field<T: Real>(header: &[u8], payload: &[u8]) -> Result<VectorField3D<T>, FieldError> {
    let h = FieldHeader::from_json(header)?;
    if h.components != 3 {
        return Err(FieldError::ComponentMismatch { expected: 3, found: h.components });
    }
    let grid = h.grid()?;
    let values = h.decode(payload, 3 * grid.node_count(), false)?;
    Ok(VectorField3D { grid, values, meta: h.metadata() })
}

fn header_for<T: Real>(grid: &Grid<T>, meta: &FieldMetadata, components: u8) -> FieldHeader {
    FieldHeader {
        name: meta.name.clone(),
        dims: grid.dims,
        origin: grid.origin.map(T::as_f64),
        spacing: grid.spacing.map(T::as_f64),
        unit: meta.unit.clone(),
        sentinel: meta.file_sentinel,
        components,
        axes: meta.axes.clone(),
    }
}

fn encode<T: Real>(values: &[T], sentinel: Option<f64>) -> Vec<u8> {
    let invalid = sentinel.map(|s| s as f32).unwrap_or(f32::NAN);
    values
        .iter()
        .flat_map(|v| {
            let f = if v.is_nan() { invalid } else { v.as_f32() };
            f.to_le_bytes()
        })
        .collect()
}

impl<T: Real> ScalarField3D<T> {
    /// Header JSON and payload bytes in the on-disk layout.
    pub fn to_files(&self) -> (Vec<u8>, Vec<u8>) {
        let header = header_for(&self.grid, &self.meta, 1);
        (
            serde_json::to_vec_pretty(&header).expect("header serializes"),
            encode(&self.values, self.meta.file_sentinel),
        )
    }
}

impl<T: Real> VectorField3D<T> {
    pub fn to_files(&self) -> (Vec<u8>, Vec<u8>) {
        let header = header_for(&self.grid, &self.meta, 3);
        (
            serde_json::to_vec_pretty(&header).expect("header serializes"),
            encode(&self.values, None),
        )
    }
}
