//! End-to-end acceptance checks for `inlet`.
//!
//! The checks live in `tests/acceptance.rs`; this crate has no library
//! code. It is a separate package so that the long-running acceptance
//! target is scheduled after every other test binary in the workspace.
