//! Finite metric measure spaces and the exact functionals on them:
//! partial diameter, separation distance and the concentration function.
//!
//! Every functional is total. The partial diameter of a set of mass at
//! least `m - κ` is `0` when `κ >= m` (the empty set qualifies), and the
//! separation distance is `0` when no pair of nonempty sets meets the mass
//! thresholds.
//!
//! Mass comparisons `μ(S) >= t` are evaluated as `μ(S) >= t - MASS_TOL` so
//! that thresholds hit exactly by sums of weights survive rounding.

mod alpha;
mod cloud;
mod diameter;
mod sep;
mod space;

pub use alpha::{concentration_function, concentration_function_capped, CONCENTRATION_CAP};
pub use cloud::{pushforward, Target, WeightedCloud};
pub use diameter::{partial_diameter_exact, partial_diameter_exact_capped, PARTIAL_DIAMETER_CAP};
pub use sep::{sep_exact, sep_exact_capped, sep_lower_greedy, SepQuery, SEP_CAP};
pub use space::{FiniteMMSpace, METRIC_TOL};

/// Slack on mass comparisons.
pub const MASS_TOL: f64 = 1e-12;

#[inline]
pub(crate) fn meets(mass: f64, threshold: f64) -> bool {
    mass >= threshold - MASS_TOL
}

/// A finite weighted point set with a metric, addressed by index.
pub trait MetricMeasure {
    fn len(&self) -> usize;
    fn weights(&self) -> &[f64];
    fn total_mass(&self) -> f64;
    fn dist(&self, i: usize, j: usize) -> f64;

    /// Coordinates when the points sit on a line with the usual distance.
    fn line_coords(&self) -> Option<Vec<f64>> {
        None
    }

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub(crate) fn distance_matrix<M: MetricMeasure + ?Sized>(m: &M, idx: &[usize]) -> Vec<f64> {
    let n = idx.len();
    let mut d = vec![0.0; n * n];
    for a in 0..n {
        for b in (a + 1)..n {
            let v = m.dist(idx[a], idx[b]);
            d[a * n + b] = v;
            d[b * n + a] = v;
        }
    }
    d
}

/// Sorted, deduplicated off-diagonal distances.
pub(crate) fn distinct_distances(d: &[f64], n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n)
        .flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))
        .map(|(a, b)| d[a * n + b])
        .collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

#[inline]
pub(crate) fn mask_mass(mask: u64, w: &[f64]) -> f64 {
    let mut s = 0.0;
    let mut m = mask;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        s += w[i];
        m &= m - 1;
    }
    s
}
