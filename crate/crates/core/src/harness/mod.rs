//! Ground truth, baselines, generators and measurement.

pub mod baseline;
pub mod bench;
pub mod oracle;
pub mod profile;
pub mod synth;
