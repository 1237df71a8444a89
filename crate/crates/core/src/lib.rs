//! Three-way, method-level change analysis for diverging codebases.
//!
//! Given a base version (AO), its upstream successor (AN) and an
//! independently modified variant (CM), every base method's evolution is
//! classified in both directions, the two changesets are mapped onto each
//! other and each overlap is rated for merge-automation feasibility.

pub mod analysis;
pub mod changes;
pub mod corpus;
pub mod feasibility;
pub mod mutagen;
pub mod overlap;
pub mod report;
pub mod srcmodel;
