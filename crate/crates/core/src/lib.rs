pub mod acceptance;
pub mod circle;
pub mod cli;
pub mod density;
pub mod error;
pub mod extend;
pub mod kernel;
pub mod trace;
mod sum;
