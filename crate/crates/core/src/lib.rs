//! Verification engine for point symmetries of one-dimensional
//! Navier–Stokes flow along a space curve.

pub mod expr;
pub mod jet;
pub mod ns_system;
pub mod cases;
pub mod lie;
pub mod thermo;
pub mod invariants;
pub mod curvelift;
pub mod report;
