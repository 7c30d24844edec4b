//! The `wy-skew` command-line tool: file formats, property suites and
//! subcommands.

#![forbid(unsafe_code)]
// `!(x <= tol)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod files;
pub mod json;
pub mod suites;

/// Process exit codes. Every run ends in exactly one of these.
pub mod exit {
    /// Success; for `eval` and `search`, the inequality holds.
    pub const OK: i32 = 0;
    /// A published number was not reproduced, or a result failed
    /// re-validation.
    pub const MISMATCH: i32 = 1;
    /// Unreadable or invalid input, or an invalid configuration.
    pub const INVALID: i32 = 2;
    /// A property suite had failing trials.
    pub const CHECK_FAILED: i32 = 3;
    /// The computation succeeded and the inequality is violated.
    pub const VIOLATED: i32 = 10;
}

pub use args::Cli;
pub use commands::run;
