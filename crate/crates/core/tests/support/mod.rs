//! Oracles and fixtures shared by the integration tests.
//!
//! The oracles work on the resolved model directly and never call the
//! crate's semantics, refinement or codegen modules, so they can check them.
#![allow(dead_code)]

pub mod corpus;
pub mod dot;
pub mod inclusion;
pub mod random;
pub mod reference;
pub mod ws1s;
