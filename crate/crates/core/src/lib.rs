//! Coset enumeration, modular symbols and hyperbolic Eisenstein series on
//! `Γ₀(N)`, with the summatory and statistical checks built on them.

pub mod config;
pub mod cuspform;
pub mod eisenstein;
pub mod error;
pub mod group_enum;
pub mod halfplane;
pub mod modsym;
pub mod numerics;
pub mod pipeline;
pub mod report;
pub mod stats;
pub mod summatory;
pub mod verify;

pub use error::{Error, Result};
