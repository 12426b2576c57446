//! Exact machinery for differential kernels, difference-differential kernels
//! and their prolongations over presented towers of fields.

pub mod arith;
pub mod constructions;
pub mod dd;
pub mod dsl;
pub mod kernel;
pub mod ops;
pub mod testkit;
pub mod tower;
