//! Seabed geo-data modeling: boreholes and strata, TIN surfaces, fence diagrams,
//! isosurfaces, volume sections, spill particles and scene export.
//!
//! Kernels are generic over the scalar type ([`scalar::Real`], implemented for
//! `f32` and `f64`); the aliases below fix the common instantiations.

pub mod export;
pub mod fence;
pub mod geomodel;
pub mod isosurface;
pub(crate) mod mc_tables;
pub mod mesh;
pub mod particles;
pub mod products;
pub mod scalar;
pub mod triangulation;
pub mod vec3;
pub mod volume;

pub use scalar::Real;

pub type Borehole64 = geomodel::Borehole<f64>;
pub type Dataset64 = geomodel::Dataset<f64>;
pub type ScalarField64 = geomodel::ScalarField3D<f64>;
pub type VectorField64 = geomodel::VectorField3D<f64>;
pub type TriangleMesh64 = mesh::TriangleMesh<f64>;
pub type Triangulation64 = triangulation::Triangulation2D<f64>;
pub type FencePanel64 = fence::FencePanel<f64>;
pub type Scene64 = export::Scene<f64>;
pub type SpillConfig64 = particles::SpillConfig<f64>;
pub type ParticleState64 = particles::ParticleSystemState<f64>;

pub type Borehole32 = geomodel::Borehole<f32>;
pub type Dataset32 = geomodel::Dataset<f32>;
pub type ScalarField32 = geomodel::ScalarField3D<f32>;
pub type VectorField32 = geomodel::VectorField3D<f32>;
pub type TriangleMesh32 = mesh::TriangleMesh<f32>;
pub type Triangulation32 = triangulation::Triangulation2D<f32>;
pub type FencePanel32 = fence::FencePanel<f32>;
pub type Scene32 = export::Scene<f32>;
pub type SpillConfig32 = particles::SpillConfig<f32>;
pub type ParticleState32 = particles::ParticleSystemState<f32>;
