pub mod cohomology;
pub mod deform;
pub mod error;
pub mod form;
pub mod hodge;
pub mod identities;
pub mod frame;
pub mod jet;
pub mod json;
pub mod linalg;
pub mod model;
pub mod obstruction;
pub mod scalar;
pub mod vform;

pub use error::{Error, Result};
pub use form::Form;
pub use jet::{Direction, Jet, JetRing, Monomial, Point};
pub use model::ComplexModel;
pub use scalar::GaussianRational;
pub use vform::VForm;
