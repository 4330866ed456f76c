//! Section-drilling data model: boreholes, survey lines and gridded fields.

mod borehole;
mod dataset;
mod field;
mod store;

pub use borehole::{parse_boreholes, serialize_boreholes, Borehole, BoreholeError, StratumInterval};
pub use dataset::{Dataset, DatasetError, DrapeSource, StratigraphicOrder, Stratum, SurveyLine};
pub use field::{
    parse_scalar_field, parse_vector_field, AxisStencil, FieldError, FieldHeader, FieldMetadata, Grid,
    ScalarField3D, VectorField3D,
};
pub use store::{load_dataset_dir, write_dataset_dir, LoadError};
