pub mod algebra;
pub mod anomaly;
pub mod classifier;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod jacobian;
pub mod keller;
pub mod normalizer;
pub mod report;
pub mod text;
