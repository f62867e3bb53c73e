//! Rigidity of pinned subspace-incidence systems and dictionary learning
//! built on it.

pub mod cli;
pub mod dictlearn;
pub mod equations;
pub mod field;
pub mod fixtures;
pub mod generate;
pub mod hypergraph;
pub mod realize;
pub mod rigidity;
pub mod sparsity;
