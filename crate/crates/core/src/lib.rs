//! Generalized probabilistic theories: convex state spaces, effects and transformations,
//! composites, Bell-scenario analysis, the Sorkin interference hierarchy and qubit
//! Bloch-ball geometry, with every convex decision backed by a small dense LP solver.

pub mod bell;
pub mod bloch;
pub mod composite;
pub mod cone;
pub mod distinguish;
pub mod error;
pub mod interference;
pub mod linalg;
pub mod lp;
pub mod space;

pub use error::{Error, Result};
pub use space::{are_equivalent, Effect, LinearMap, Measurement, SpaceKind, StateSpace};
