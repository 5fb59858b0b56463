//! Curvature of coordinate-chart metrics through the Bach tensor, computed
//! with order-four Taylor jets, and the pointwise identities of gradient
//! ρ-Einstein solitons built on top of it.

pub mod bryant;
pub mod catalog;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod jets;
pub mod sampling;
pub mod soliton;

pub use error::{Error, Result};
