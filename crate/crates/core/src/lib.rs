//! Exact calculus of Harder-Narasimhan polygons for vector bundles on the
//! Fargues-Fontaine curve.
//!
//! Every bundle is identified with its HN decomposition ([`HNBundle`]). On top
//! of that the crate decides the subbundle criterion ([`criteria`]), computes
//! Hom-space and stratum dimensions ([`degree`]), runs the degenerating
//! sequence behind the key inequality ([`degeneration`]), and checks all of it
//! exhaustively on small universes of bundles ([`verify`]).

pub mod bundle;
pub mod cli;
pub mod criteria;
pub mod degeneration;
pub mod degree;
pub mod error;
pub mod rational;
pub mod render;
mod serde_int;
pub mod verify;

pub use bundle::{HNBundle, PolygonVertex, SegmentVector, SlopeFilter, Summand};
pub use error::{Condition, Error, Result};
pub use rational::Rational;
