//! Library surface of the verification harness: configuration, suite
//! orchestration, and canonical reporting. The binary in `main.rs` is a
//! thin argument-parsing layer over this.

pub mod config;
pub mod render;
pub mod report;
pub mod suites;
