//! Concentration of measure on finite metric measure spaces.
//!
//! - [`mmspace`]: finite mm-spaces, weighted clouds, and exact partial
//!   diameter, separation distance and concentration function.
//! - [`lp`]: l^p/l^q geometry, the signed-permutation group, and the
//!   reduction map of the l^p ball onto `k(eps)`-sparse vectors.
//! - [`sphere`]: seeded cone-measure sampling on l^p spheres.
//! - [`certify`]: observable-diameter brackets and inequality checkers.
//! - [`experiment`]: the experiment runner behind the `lpconc` binary.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod error;
pub mod experiment;
pub mod ks;
pub mod lp;
pub mod mmspace;
pub mod rng;
pub mod sphere;

pub use error::{Error, Result};
