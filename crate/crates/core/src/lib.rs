pub mod error;
pub mod circuit2poly;
pub mod f2poly;
pub mod gate_synth;
pub mod gf2;
pub mod pipeline;
pub mod qswe;
pub mod quad_sign;
pub mod quantum_core;
pub mod selftest;

pub use error::{Error, Result};
