//! Reference implementations shared by the integration and acceptance tests.
//! They are written from the defining formulas and share no code with the
//! library's solvers.

#![allow(dead_code)]

pub mod discrete_oracle;
pub mod gaussian_oracle;
pub mod info_identities;
