//! Command-line front end: curve documents in, JSON reports and CSV Gram
//! matrices out.

pub mod commands;
pub mod document;
