//! Exact verification of quantum and classical monodromy-data algebras on
//! fat graphs of bordered surfaces.

pub mod braid;
pub mod fixtures;
pub mod flip;
pub mod laurent;
pub mod poisson;
pub mod poly;
pub mod qtorus;
pub mod ring;
pub mod relations;
pub mod rmatrix;
pub mod suites;
pub mod surface;
