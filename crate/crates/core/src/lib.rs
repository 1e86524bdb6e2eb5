//! Exact computation in the bosonic extension of a quantum unipotent
//! coordinate ring: normal forms, braid symmetries, bilinear forms, PBW bases
//! and their bar-invariant corrections.

pub mod algebra;
pub mod cache;
pub mod cartan;
pub mod error;
pub mod expr;
pub mod forms;
pub mod linalg;
pub mod pbw;
pub mod scalar;
pub mod symmetry;
pub mod verify;

pub use algebra::{Algebra, Element, Gen, Monomial};
pub use cartan::{BraidWord, CartanDatum, RootVector};
pub use error::{Error, Result};
pub use scalar::Scalar;
