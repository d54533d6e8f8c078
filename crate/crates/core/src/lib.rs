//! Exact p-adic linear algebra and power-map analysis for matrix groups over Q_p.

pub mod analyzer;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod lattice;
pub mod matrix;
pub mod modular;
pub mod newton;
pub mod oracle;
pub mod qp;
pub mod roots;
pub mod scale;
pub mod steinitz;

pub use error::{Error, Result};
pub use lattice::Lattice;
pub use matrix::QMatrix;
pub use newton::{newton_polygon, NewtonPolygon};
pub use qp::{ExactScalar, PContext, ResidueScalar, Valuation};
