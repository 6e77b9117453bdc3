//! Exact computations with `SL_n` over truncated polynomial rings
//! `F_q[eps]/(eps^r)`: character tables, tori and their characters, and the
//! finite models of the level-two coverings attached to the tori of `SL_2`.

pub mod charkit;
pub mod dims;
pub mod dlgeom;
pub mod error;
pub mod gfield;
pub mod matgrp;
pub mod torus;
pub mod trunc;

pub use error::{Error, Result};
