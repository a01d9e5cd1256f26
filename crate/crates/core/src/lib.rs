pub mod cli;
pub mod colgen;
pub mod covers;
pub mod decomp;
pub mod error;
pub mod exact;
pub mod game;
pub mod generate;
pub mod lp;
pub mod model;
pub mod planner;
pub mod report;
pub mod strategies;
pub mod target;

pub use error::{Error, Result};
