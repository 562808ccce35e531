//! Vector fields, one-forms, mixed tensors and coordinate changes on a chart.

mod change;
mod field;
pub mod matrix;
mod tensor;

pub use change::CoordinateChange;
pub use field::{OneForm, VectorField};
pub use tensor::index_tuples;
pub use matrix::PolyMatrix;
pub use tensor::MixedTensor;
