pub mod affine;
pub mod candidates;
pub mod cli;
pub mod document;
pub mod error;
pub mod fixtures;
pub mod generator;
pub mod model;
pub mod optimizer;
pub mod oracle;
pub mod projection;
pub mod protective;
pub mod rational;
pub mod realize;
pub mod solver;
