//! Exact and numeric toolkit for holomorphic foliations on projective space:
//! Jouanolou-type foliations by curves, their pull-backs by rational maps,
//! and the local structure (Kupka and nilpotent generalized Kupka points) of
//! the resulting foliations by surfaces.

pub mod error;
pub mod exterior;
pub mod foliation;
pub mod graded;
pub mod interchange;
pub mod linalg;
pub mod numeric;
pub mod rational;
pub mod ring;
pub mod upoly;

pub use error::{Error, Result};
pub use exterior::{radial_field, KForm, MultiVector, VectorField};
pub use rational::Q;
pub use ring::{HomogeneousDegree, Monomial, Poly};
