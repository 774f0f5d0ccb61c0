//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use lpconc::lp::{lq_dist, Exponent, LpVector};
use lpconc::mmspace::MetricMeasure;
use proptest::prelude::*;

pub const TOL: f64 = 1e-12;

fn members(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask >> i & 1 == 1).collect()
}

fn mass<M: MetricMeasure>(x: &M, set: &[usize]) -> f64 {
    set.iter().map(|&i| x.weights()[i]).sum()
}

fn diam<M: MetricMeasure>(x: &M, set: &[usize]) -> f64 {
    let mut d: f64 = 0.0;
    for &i in set {
        for &j in set {
            d = d.max(x.dist(i, j));
        }
    }
    d
}

/// `inf { diam A : μ(A) >= m - κ }` over every subset.
pub fn partial_diameter<M: MetricMeasure>(x: &M, kappa: f64) -> f64 {
    let n = x.len();
    let target = x.total_mass() - kappa;
    (0..1u32 << n)
        .map(|m| members(m, n))
        .filter(|s| mass(x, s) >= target - TOL)
        .map(|s| diam(x, &s))
        .fold(f64::INFINITY, f64::min)
}

/// `sup { d(A, B) : μ(A) >= κ1, μ(B) >= κ2 }` over nonempty pairs, 0 if none.
pub fn sep<M: MetricMeasure>(x: &M, k1: f64, k2: f64) -> f64 {
    let n = x.len();
    let mut best: f64 = 0.0;
    for a in 1..1u32 << n {
        let sa = members(a, n);
        if mass(x, &sa) < k1 - TOL {
            continue;
        }
        for b in 1..1u32 << n {
            let sb = members(b, n);
            if mass(x, &sb) < k2 - TOL {
                continue;
            }
            let mut d = f64::INFINITY;
            for &i in &sa {
                for &j in &sb {
                    d = d.min(x.dist(i, j));
                }
            }
            best = best.max(d);
        }
    }
    best
}

/// `sup { m - μ(U_r(A)) : μ(A) >= m/2 }` with the open neighborhood.
pub fn alpha<M: MetricMeasure>(x: &M, r: f64) -> f64 {
    let n = x.len();
    let m = x.total_mass();
    let mut best: f64 = 0.0;
    for a in 0..1u32 << n {
        let sa = members(a, n);
        if mass(x, &sa) < m / 2.0 - TOL {
            continue;
        }
        let outside: f64 = (0..n)
            .filter(|&i| sa.iter().all(|&j| x.dist(i, j) >= r))
            .map(|i| x.weights()[i])
            .sum();
        best = best.max(outside);
    }
    best
}

/// Every best approximation by a restriction of `x` to `min(k, len)`
/// coordinates, with the optimal distance. Several keep-sets can tie, e.g. in
/// l^inf where only the largest dropped magnitude counts.
pub fn project_ak(x: &LpVector, k: usize, q: Exponent) -> (f64, Vec<LpVector>) {
    let n = x.len();
    let size = k.min(n);
    let mut all = Vec::new();
    for m in 0..1u32 << n {
        if m.count_ones() as usize != size {
            continue;
        }
        let keep = members(m, n);
        let y = LpVector(
            (0..n)
                .map(|i| if keep.contains(&i) { x.at(i) } else { 0.0 })
                .collect(),
        );
        all.push((lq_dist(x, &y, q), y));
    }
    let best = all.iter().map(|(d, _)| *d).fold(f64::INFINITY, f64::min);
    let optimal = all
        .into_iter()
        .filter(|(d, _)| *d <= best + 1e-12 * best.max(1.0))
        .map(|(_, y)| y)
        .collect();
    (best, optimal)
}

pub fn exponent() -> impl Strategy<Value = Exponent> {
    prop_oneof![
        Just(Exponent::ONE),
        Just(Exponent::TWO),
        Just(Exponent::new(3.0).unwrap()),
        Just(Exponent::new(1.5).unwrap()),
        Just(Exponent::INF),
    ]
}

/// Coordinates on a coarse grid (to produce ties) or continuous.
pub fn coordinate() -> impl Strategy<Value = f64> {
    prop_oneof![(-4i32..=4).prop_map(|v| f64::from(v) / 4.0), -1.0f64..1.0]
}

/// Weights with occasional zeros.
pub fn weight() -> impl Strategy<Value = f64> {
    prop_oneof![1 => Just(0.0), 6 => 0.01f64..1.0]
}

/// Points of `R^dim` with weights, at least one weight positive.
pub fn weighted_points(
    max_n: usize,
    dim: usize,
) -> impl Strategy<Value = (Vec<LpVector>, Vec<f64>)> {
    (1..=max_n)
        .prop_flat_map(move |n| {
            (
                prop::collection::vec(
                    prop::collection::vec(coordinate(), dim).prop_map(LpVector),
                    n,
                ),
                prop::collection::vec(weight(), n),
            )
        })
        .prop_filter("some positive weight", |(_, w)| w.iter().any(|v| *v > 0.0))
}

/// A signed permutation carrying `x` into the fundamental domain, breaking
/// magnitude ties by `tie_keys` and choosing the sign of zeros from `zero_signs`.
pub fn admissible_g(
    x: &LpVector,
    tie_keys: &[u32],
    zero_signs: &[bool],
) -> lpconc::lp::SignedPermutation {
    let k = x.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        x.at(b)
            .abs()
            .total_cmp(&x.at(a).abs())
            .then(tie_keys[a % tie_keys.len()].cmp(&tie_keys[b % tie_keys.len()]))
    });
    let mut perm = vec![0; k];
    let mut signs = vec![1i8; k];
    for (n, &src) in order.iter().enumerate() {
        perm[src] = n;
        let v = x.at(src);
        signs[n] = if v > 0.0 || (v == 0.0 && zero_signs[n % zero_signs.len()]) {
            1
        } else {
            -1
        };
    }
    lpconc::lp::SignedPermutation::new(signs, perm).unwrap()
}

pub fn signed_permutation(k: usize) -> impl Strategy<Value = lpconc::lp::SignedPermutation> {
    (
        Just((0..k).collect::<Vec<usize>>()).prop_shuffle(),
        prop::collection::vec(prop::bool::ANY, k),
    )
        .prop_map(|(perm, s)| {
            let signs = s.into_iter().map(|b| if b { 1 } else { -1 }).collect();
            lpconc::lp::SignedPermutation::new(signs, perm).unwrap()
        })
}

/// `x` rescaled into the closed unit l^p ball if it lies outside.
pub fn into_ball(x: Vec<f64>, p: Exponent) -> LpVector {
    let v = LpVector(x);
    let norm = v.norm(p);
    if norm > 1.0 {
        LpVector(v.0.iter().map(|c| c / norm).collect())
    } else {
        v
    }
}

/// Points of the ball, often with tied magnitudes and zeros.
pub fn ball_point(p: Exponent, max_len: usize) -> impl Strategy<Value = LpVector> {
    prop::collection::vec(coordinate(), 1..=max_len).prop_map(move |x| into_ball(x, p))
}
