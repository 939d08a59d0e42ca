pub mod cli;
pub mod data;
pub mod dataset;
pub mod glyph;
pub mod inference;
pub mod metrics;
pub mod model;
pub mod scorers;
pub mod temporal;
pub mod workspace;
