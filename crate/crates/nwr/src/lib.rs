//! Never-worse relations and monotonicity for parametric Markov chains.

pub mod abp;
pub mod algebra;
pub mod benchgen;
pub mod circuit;
pub mod collapse;
pub mod derivpmc;
pub mod pmc;
pub mod relations;
pub mod valuefn;
