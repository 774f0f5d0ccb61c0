//! l^p / l^q geometry: distances, the signed-permutation action, and the
//! reduction map onto finitely many nonzero coordinates.

mod exponent;
mod group;
mod reduction;
mod vector;

pub use exponent::Exponent;
pub use group::{group_apply, group_compose, group_inverse, SignedPermutation};
pub use reduction::{
    canonicalize, check_fundamental_domain, f_trunc, k_eps, project_ak, reduce, reduce_via,
    reduce_with_tolerance, ReductionParams, BALL_TOL, MAX_K_EPS,
};
pub use vector::{lq_dist, lr_dist_slices, lr_norm, LpVector};
