//! The reduction map of the l^p ball onto vectors with few nonzero coordinates.
//!
//! For `1 <= p < q <= inf` and `eps > 0` put `k(eps) = ceil((2/eps)^{pq/(q-p)}) - 1`.
//! A point `x` of the unit l^p ball is first moved by a signed permutation `g`
//! into the fundamental domain (nonnegative, nonincreasing coordinates); there
//! the top `k(eps)` coordinates are lowered by the `(k(eps)+1)`-th one and the
//! rest are cut off; finally `g^{-1}` is applied. The image has at most `k(eps)`
//! nonzero coordinates, lies within l^q distance `eps/2` of `x`, and the map
//! is `(1 + k(eps)^{1/q})`-Lipschitz for `d_q`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{lq_dist, Exponent, LpVector, SignedPermutation};
use crate::error::{Error, Result};

/// Default slack on `‖x‖_p <= 1` accepted by [`reduce`].
pub const BALL_TOL: f64 = 1e-12;

/// Largest `k(eps)` we agree to materialize.
pub const MAX_K_EPS: u64 = 1 << 26;

/// `(p, q, eps)` together with the derived `k(eps)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionParams {
    pub p: Exponent,
    pub q: Exponent,
    pub eps: f64,
    pub k_eps: usize,
}

impl ReductionParams {
    pub fn new(p: Exponent, q: Exponent, eps: f64) -> Result<Self> {
        let k_eps = k_eps(p, q, eps)?;
        Ok(ReductionParams { p, q, eps, k_eps })
    }

    /// Lipschitz constant `1 + k(eps)^{1/q}` of the reduction for `d_q`.
    pub fn lipschitz_constant(&self) -> f64 {
        1.0 + self.q.root_of(self.k_eps)
    }
}

/// `ceil((2/eps)^{pq/(q-p)}) - 1`; for `q = inf` the exponent is its limit `p`.
///
/// Values within a relative `1e-12` of an integer are snapped to it before
/// the ceiling so that exact powers like `4^6` are not pushed up by rounding.
pub fn k_eps(p: Exponent, q: Exponent, eps: f64) -> Result<usize> {
    if p.is_infinite() {
        return Err(Error::invalid("p must be finite"));
    }
    if p >= q {
        return Err(Error::invalid(format!("need p < q, got p = {p}, q = {q}")));
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::invalid(format!(
            "eps must be positive and finite, got {eps}"
        )));
    }
    let (p, q) = (p.get(), q.get());
    let exponent = if q.is_infinite() { p } else { p * q / (q - p) };
    let base = (2.0 / eps).powf(exponent);
    if !base.is_finite() || base > MAX_K_EPS as f64 {
        return Err(Error::invalid(format!(
            "k(eps) = ceil({base:e}) - 1 is too large to materialize"
        )));
    }
    let nearest = base.round();
    let snapped = if (base - nearest).abs() <= 1e-12 * nearest.max(1.0) {
        nearest
    } else {
        base
    };
    Ok((snapped.ceil() as usize).saturating_sub(1))
}

/// Moves `x` into the fundamental domain.
///
/// Signs are `sign(x_i)` with `sign(0) = +1`; the order is a stable sort by
/// decreasing absolute value, so ties keep their original order. Returns
/// `(g, g·x)`.
pub fn canonicalize(x: &LpVector) -> (SignedPermutation, LpVector) {
    let c = x.coords();
    let mut order: Vec<usize> = (0..c.len()).collect();
    order.sort_by(|&a, &b| {
        c[b].abs()
            .partial_cmp(&c[a].abs())
            .unwrap_or(Ordering::Equal)
    });
    let signs: Vec<i8> = order
        .iter()
        .map(|&i| if c[i] < 0.0 { -1 } else { 1 })
        .collect();
    let y = order.iter().map(|&i| c[i].abs()).collect();
    (SignedPermutation::from_sources(signs, &order), LpVector(y))
}

/// Checks that `y` has nonnegative, nonincreasing coordinates.
pub fn check_fundamental_domain(y: &LpVector) -> Result<()> {
    let c = y.coords();
    for (i, &v) in c.iter().enumerate() {
        if !(v >= 0.0) || (i > 0 && v > c[i - 1]) {
            return Err(Error::NotInFundamentalDomain { index: i });
        }
    }
    Ok(())
}

/// On the fundamental domain: `(y_1 - y_{k+1}, ..., y_k - y_{k+1}, 0, 0, ...)`.
///
/// The output has length `max(len(y), k)`; `y` is padded with zeros.
pub fn f_trunc(y: &LpVector, k: usize) -> Result<LpVector> {
    check_fundamental_domain(y)?;
    let cut = y.at(k);
    let len = y.len().max(k);
    let out = (0..len)
        .map(|i| if i < k { y.at(i) - cut } else { 0.0 })
        .collect();
    Ok(LpVector(out))
}

fn check_ball(x: &LpVector, p: Exponent, tol: f64) -> Result<()> {
    let norm = x.norm(p);
    if !(norm <= 1.0 + tol) {
        return Err(Error::OutsideBall {
            norm,
            p: p.to_string(),
        });
    }
    Ok(())
}

/// `F(x) = g^{-1} f(g x)` using the canonical `g` from [`canonicalize`].
pub fn reduce(x: &LpVector, params: &ReductionParams) -> Result<LpVector> {
    reduce_with_tolerance(x, params, BALL_TOL)
}

pub fn reduce_with_tolerance(x: &LpVector, params: &ReductionParams, tol: f64) -> Result<LpVector> {
    check_ball(x, params.p, tol)?;
    let (g, y) = canonicalize(x);
    apply_reduction(&g, &y, params.k_eps)
}

/// `F(x)` computed through a caller-chosen `g` with `g·x` in the fundamental
/// domain. Any admissible `g` gives the same value.
pub fn reduce_via(
    x: &LpVector,
    g: &SignedPermutation,
    params: &ReductionParams,
) -> Result<LpVector> {
    check_ball(x, params.p, BALL_TOL)?;
    let y = g.apply(x)?;
    apply_reduction(g, &y, params.k_eps)
}

fn apply_reduction(g: &SignedPermutation, y: &LpVector, k: usize) -> Result<LpVector> {
    let mut z = f_trunc(y, k)?;
    z.0.truncate(y.len());
    g.inverse().apply(&z)
}

/// Nearest point of `A_k` (vectors with at most `k` nonzeros) in any l^q.
///
/// Keeps the `k` coordinates of largest absolute value (earliest index wins
/// ties) and zeroes the rest. Returns the projection and its l^q distance.
pub fn project_ak(x: &LpVector, k: usize, q: Exponent) -> (LpVector, f64) {
    let c = x.coords();
    let mut y = c.to_vec();
    if x.nonzero_count() > k {
        let mut order: Vec<usize> = (0..c.len()).collect();
        order.sort_by(|&a, &b| {
            c[b].abs()
                .partial_cmp(&c[a].abs())
                .unwrap_or(Ordering::Equal)
        });
        for &i in &order[k..] {
            y[i] = 0.0;
        }
    }
    let y = LpVector(y);
    let d = lq_dist(x, &y, q);
    (y, d)
}
