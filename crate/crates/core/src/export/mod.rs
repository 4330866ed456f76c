//! Scene assembly, texture draping, and GLB / OBJ serialization.

mod drape;
mod glb;
mod obj;

use std::collections::HashSet;

use thiserror::Error;

use crate::mesh::{MeshError, TriangleMesh};
use crate::scalar::Real;

pub use drape::drape_texture;
pub use glb::export_gltf;
pub use obj::{export_obj, format_g9};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExportError {
    #[error("scene has no nodes")]
    EmptyScene,
    #[error("mesh {0:?} has no triangles")]
    EmptyMesh(String),
    #[error("duplicate node label {0:?}")]
    DuplicateLabel(String),
    #[error("texture {0:?} is not embedded in the scene")]
    MissingTexture(String),
    #[error("drape extent must have x_max > x_min and y_max > y_min")]
    DegenerateExtent,
    #[error("invalid mesh {label:?}: {source}")]
    InvalidMesh { label: String, source: MeshError },
}

/// PNG image embedded in an exported scene.
#[derive(Debug, Clone, PartialEq)]
pub struct Texture {
    pub name: String,
    pub png: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneNode<T> {
    pub mesh: TriangleMesh<T>,
    /// Unique node name.
    pub label: String,
    /// Visibility group: a stratum id, "terrain", "isosurface", "fence", ...
    pub group: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene<T> {
    pub name: String,
    pub nodes: Vec<SceneNode<T>>,
    pub textures: Vec<Texture>,
}

impl<T: Real> Scene<T> {
    pub fn new(name: impl Into<String>) -> Self {
        Scene {
            name: name.into(),
            nodes: Vec::new(),
            textures: Vec::new(),
        }
    }

    pub fn push(&mut self, mesh: TriangleMesh<T>, label: impl Into<String>, group: impl Into<String>) {
        self.nodes.push(SceneNode {
            mesh,
            label: label.into(),
            group: group.into(),
        });
    }

    /// Checks the export preconditions.
    pub fn validate(&self) -> Result<(), ExportError> {
        if self.nodes.is_empty() {
            return Err(ExportError::EmptyScene);
        }
        let mut labels = HashSet::new();
        for node in &self.nodes {
            if !labels.insert(node.label.as_str()) {
                return Err(ExportError::DuplicateLabel(node.label.clone()));
            }
            if node.mesh.is_empty() {
                return Err(ExportError::EmptyMesh(node.label.clone()));
            }
            node.mesh.validate_topology().map_err(|source| ExportError::InvalidMesh {
                label: node.label.clone(),
                source,
            })?;
            if let Some(tex) = &node.mesh.material.texture {
                if !self.textures.iter().any(|t| &t.name == tex) {
                    return Err(ExportError::MissingTexture(tex.clone()));
                }
            }
        }
        Ok(())
    }
}
