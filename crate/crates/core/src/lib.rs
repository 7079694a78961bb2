//! Explicit escape-from-subvarieties bounds and finite-step spectral
//! rigidity tests for finitely generated matrix groups.

pub mod bounds;
pub mod matrix;
pub mod poly;
pub mod groups;
pub mod variety;
pub mod spectra;
pub mod rigidity;
