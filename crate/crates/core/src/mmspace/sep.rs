use serde::{Deserialize, Serialize};

use super::{distance_matrix, distinct_distances, mask_mass, meets, MetricMeasure};
use crate::error::{Error, Result};

/// Default point cap for [`sep_exact`].
pub const SEP_CAP: usize = 14;

/// Mass thresholds `(κ₁, κ₂)` of a separation-distance query.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SepQuery {
    pub kappa1: f64,
    pub kappa2: f64,
}

impl SepQuery {
    pub fn new(kappa1: f64, kappa2: f64) -> Result<Self> {
        if !(kappa1 >= 0.0) || !(kappa2 >= 0.0) || !kappa1.is_finite() || !kappa2.is_finite() {
            return Err(Error::invalid(format!(
                "mass thresholds must be finite and >= 0, got ({kappa1}, {kappa2})"
            )));
        }
        Ok(SepQuery { kappa1, kappa2 })
    }

    pub fn symmetric(kappa: f64) -> Result<Self> {
        Self::new(kappa, kappa)
    }
}

/// `Sep(X; κ₁, κ₂)`: the largest `d(A, B)` over nonempty `A, B` with
/// `μ(A) >= κ₁` and `μ(B) >= κ₂`, or `0` if no such pair exists.
///
/// The optimum is a pairwise distance. Candidates are searched from the top
/// (by bisection, feasibility being monotone in the threshold); each
/// threshold `t` is decided by a branch-and-bound over `B` in which `A` is
/// implicitly every point at distance `>= t` from `B`, pruning on the mass
/// still reachable by either side.
pub fn sep_exact<M: MetricMeasure + ?Sized>(x: &M, q: SepQuery) -> Result<f64> {
    sep_exact_capped(x, q, SEP_CAP)
}

pub fn sep_exact_capped<M: MetricMeasure + ?Sized>(x: &M, q: SepQuery, cap: usize) -> Result<f64> {
    let n = x.len();
    let cap = cap.min(64);
    if n > cap {
        return Err(Error::TooLarge {
            op: "sep_exact",
            size: n,
            cap,
            hint: "use sep_lower_greedy for a lower bound",
        });
    }
    let m = x.total_mass();
    if !meets(m, q.kappa1) || !meets(m, q.kappa2) || n < 2 {
        return Ok(0.0);
    }
    let idx: Vec<usize> = (0..n).collect();
    let d = distance_matrix(x, &idx);
    let w = x.weights();
    let cands: Vec<f64> = distinct_distances(&d, n)
        .into_iter()
        .filter(|v| *v > 0.0)
        .collect();
    if cands.is_empty() {
        return Ok(0.0);
    }

    let feasible = |t: f64| {
        // near[b]: points strictly closer than t to b, b included
        let near: Vec<u64> = (0..n)
            .map(|b| {
                (0..n)
                    .filter(|&a| d[b * n + a] < t)
                    .fold(0u64, |m, a| m | (1 << a))
            })
            .collect();
        let search = SepSearch {
            n,
            near: &near,
            w,
            q,
        };
        let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        search.run(0, 0, 0.0, 0, all)
    };

    // largest feasible candidate; cands ascending
    if !feasible(cands[0]) {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0usize, cands.len() - 1);
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if feasible(cands[mid]) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Ok(cands[lo])
}

struct SepSearch<'a> {
    n: usize,
    near: &'a [u64],
    w: &'a [f64],
    q: SepQuery,
}

impl SepSearch<'_> {
    /// Decide points `i..n` for membership in `B`. `blocked` are the points
    /// within distance `< t` of the current `B`; `A` may use the rest.
    fn run(&self, i: usize, b_mask: u64, b_mass: f64, blocked: u64, all: u64) -> bool {
        let a_avail = all & !blocked;
        if a_avail == 0 && b_mask != 0 {
            return false;
        }
        let a_mass = mask_mass(a_avail, self.w);
        if !meets(a_mass, self.q.kappa1) {
            return false;
        }
        if b_mask != 0 && meets(b_mass, self.q.kappa2) {
            return true;
        }
        if i == self.n {
            return false;
        }
        let rest = all & !((1u64 << i) - 1);
        if !meets(b_mass + mask_mass(rest, self.w), self.q.kappa2) {
            return false;
        }
        let bit = 1u64 << i;
        self.run(
            i + 1,
            b_mask | bit,
            b_mass + self.w[i],
            blocked | self.near[i],
            all,
        ) || self.run(i + 1, b_mask, b_mass, blocked, all)
    }
}

/// A lower bound for [`sep_exact`] that scales past the exact cap.
///
/// For each threshold `t` (largest first) and each seed pair at distance
/// `>= t`, grows `A` and `B` greedily with admissible points (all cross
/// distances stay `>= t`) until both mass thresholds are met. A few fill
/// orders are tried per seed. Returns the first `t` that succeeds.
pub fn sep_lower_greedy<M: MetricMeasure + ?Sized>(x: &M, q: SepQuery) -> f64 {
    let n = x.len();
    let m = x.total_mass();
    if !meets(m, q.kappa1) || !meets(m, q.kappa2) || n < 2 {
        return 0.0;
    }
    let idx: Vec<usize> = (0..n).collect();
    let d = distance_matrix(x, &idx);
    let w = x.weights();
    let cands: Vec<f64> = distinct_distances(&d, n)
        .into_iter()
        .filter(|v| *v > 0.0)
        .collect();

    for &t in cands.iter().rev() {
        for s in 0..n {
            for u in 0..n {
                if s == u || d[s * n + u] < t {
                    continue;
                }
                for order in FillOrder::ALL {
                    if greedy_grow(&d, n, w, q, t, s, u, order) {
                        return t;
                    }
                }
            }
        }
    }
    0.0
}

#[derive(Clone, Copy)]
enum FillOrder {
    AFirstByWeight,
    BFirstByWeight,
    AFirstByDistance,
    BFirstByDistance,
}

impl FillOrder {
    const ALL: [FillOrder; 4] = [
        FillOrder::AFirstByWeight,
        FillOrder::BFirstByWeight,
        FillOrder::AFirstByDistance,
        FillOrder::BFirstByDistance,
    ];
}

#[allow(clippy::too_many_arguments)]
fn greedy_grow(
    d: &[f64],
    n: usize,
    w: &[f64],
    q: SepQuery,
    t: f64,
    seed_a: usize,
    seed_b: usize,
    order: FillOrder,
) -> bool {
    // side[i]: 0 free, 1 in A, 2 in B
    let mut side = vec![0u8; n];
    side[seed_a] = 1;
    side[seed_b] = 2;
    // closest member of the opposite side
    let mut to_a: Vec<f64> = (0..n).map(|i| d[i * n + seed_a]).collect();
    let mut to_b: Vec<f64> = (0..n).map(|i| d[i * n + seed_b]).collect();
    let mut mass = [w[seed_a], w[seed_b]];
    let need = [q.kappa1, q.kappa2];

    let (first, by_distance) = match order {
        FillOrder::AFirstByWeight => (0, false),
        FillOrder::BFirstByWeight => (1, false),
        FillOrder::AFirstByDistance => (0, true),
        FillOrder::BFirstByDistance => (1, true),
    };

    for s in [first, 1 - first] {
        while !meets(mass[s], need[s]) {
            // admissible for side s: far from every point of the other side
            let other = if s == 0 { &to_b } else { &to_a };
            let pick = (0..n)
                .filter(|&i| side[i] == 0 && other[i] >= t)
                .max_by(|&i, &j| {
                    let key = |k: usize| if by_distance { other[k] } else { w[k] };
                    key(i).total_cmp(&key(j)).then(j.cmp(&i))
                });
            let Some(i) = pick else { return false };
            side[i] = s as u8 + 1;
            mass[s] += w[i];
            let row = &d[i * n..(i + 1) * n];
            let own = if s == 0 { &mut to_a } else { &mut to_b };
            for (o, &di) in own.iter_mut().zip(row) {
                *o = o.min(di);
            }
        }
    }
    meets(mass[0], need[0]) && meets(mass[1], need[1])
}
