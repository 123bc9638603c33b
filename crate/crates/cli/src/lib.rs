//! Verification harness: named suites over the `twoproduct-core` checks,
//! deterministic reports and report diffs.

pub mod config;
pub mod report;
pub mod suites;

pub use config::{ConfigError, Format, SuiteConfig};
pub use report::{diff_reports, run, Changeset, RunReport, Verdict};

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const SUITE_FAILURE: i32 = 1;
    pub const CONFIG_ERROR: i32 = 2;
}
