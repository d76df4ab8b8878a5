#![doc = include_str!("../../../README.md")]

pub mod algebra;
pub mod bfs;
pub mod cli;
pub mod convergence;
pub mod lattice;
pub mod linalg;
pub mod nonsingular;
pub mod norm;
pub mod path;
pub mod pmp;
pub mod space;
pub mod scalar;
