#![allow(dead_code)]

pub mod eye_oracle;
pub mod formula_oracle;
pub mod stats_calibration;
pub mod synth;
