//! Exact symbolic kernel for odd quasi-connections on coordinate superdomains.

pub mod catalog;
pub mod connection;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod grassmann;
pub mod sample;

pub use connection::{
    AffineConnection, Anomalies, BanalTensor, BianchiSides, OddEndomorphism, OddInvolution, OddQuasiConnection,
    Rank2Covariant, Violation,
};
pub use error::{Error, Result};
pub use expr::{parse_expr, ParseError};
pub use geometry::{CoordinateChange, MixedTensor, OneForm, VectorField};
pub use grassmann::{q, qq, Chart, ChartSignature, Coeff, GradedPoly, Monomial, Parity, Substitution};
