pub mod arith;
pub mod matrix;
pub mod lp;
pub mod error;
pub mod jordan;
pub mod rate;
pub mod cohomology;
pub mod degrees;
pub mod green;
pub mod equilibrium;
pub mod config;
pub mod cli;
