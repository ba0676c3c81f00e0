pub mod dataset_io;
pub mod error;
pub mod fragments;
pub mod geometry;
pub mod metrics;
pub mod par;
pub mod puzzle_gen;
pub mod solver_genetic;
pub mod solver_greedy;

pub use error::{Error, Result};
