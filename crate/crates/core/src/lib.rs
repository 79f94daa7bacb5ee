pub mod algkit;
pub mod cache;
pub mod chaincore;
pub mod cli;
pub mod error;
pub mod exactlin;
pub mod fincat;
pub mod funmod;
pub mod theories;
pub mod verify;

pub use error::{Error, Result};
