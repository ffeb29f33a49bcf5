//! Configuration files, output formats and command implementations for the
//! `graphene-dg` binary.

pub mod commands;
pub mod config;
pub mod export;
