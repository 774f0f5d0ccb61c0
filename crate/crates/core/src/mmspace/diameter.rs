use super::{distance_matrix, distinct_distances, mask_mass, meets, MetricMeasure, MASS_TOL};
use crate::error::{Error, Result};

/// Default support-size cap for the generic (non-line) branch.
pub const PARTIAL_DIAMETER_CAP: usize = 22;

/// `diam(ν, m - κ)`: the least diameter of a subset of the support carrying
/// mass at least `m - κ`.
///
/// Measures on a line use an `O(n log n)` window scan (an optimal set can be
/// taken to be all atoms inside an interval). Otherwise the support must have
/// at most [`PARTIAL_DIAMETER_CAP`] atoms.
pub fn partial_diameter_exact<M: MetricMeasure + ?Sized>(nu: &M, kappa: f64) -> Result<f64> {
    partial_diameter_exact_capped(nu, kappa, PARTIAL_DIAMETER_CAP)
}

pub fn partial_diameter_exact_capped<M: MetricMeasure + ?Sized>(
    nu: &M,
    kappa: f64,
    cap: usize,
) -> Result<f64> {
    if !(kappa >= 0.0) {
        return Err(Error::invalid(format!("kappa must be >= 0, got {kappa}")));
    }
    let target = nu.total_mass() - kappa;
    if target <= MASS_TOL {
        return Ok(0.0);
    }
    if let Some(xs) = nu.line_coords() {
        return Ok(line_partial_diameter(&xs, nu.weights(), target));
    }

    let w = nu.weights();
    let mut support: Vec<usize> = (0..nu.len()).filter(|&i| w[i] > 0.0).collect();
    let cap = cap.min(64);
    if support.len() > cap {
        return Err(Error::TooLarge {
            op: "partial_diameter_exact",
            size: support.len(),
            cap,
            hint: "subsample the measure or project it to a line",
        });
    }
    support.sort_by(|&a, &b| w[b].total_cmp(&w[a]));
    let n = support.len();
    let ws: Vec<f64> = support.iter().map(|&i| w[i]).collect();
    let d = distance_matrix(nu, &support);

    let mut cands = vec![0.0];
    cands.extend(distinct_distances(&d, n).into_iter().filter(|v| *v > 0.0));

    let feasible = |diam: f64| {
        let adj: Vec<u64> = (0..n)
            .map(|a| {
                (0..n)
                    .filter(|&b| b != a && d[a * n + b] <= diam)
                    .fold(0u64, |m, b| m | (1 << b))
            })
            .collect();
        let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        clique_reaches(all, 0.0, &adj, &ws, target)
    };

    // smallest candidate diameter that admits a heavy enough clique
    let (mut lo, mut hi) = (0usize, cands.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(cands[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(cands[lo])
}

fn line_partial_diameter(xs: &[f64], w: &[f64], target: f64) -> f64 {
    let mut atoms: Vec<(f64, f64)> = xs
        .iter()
        .zip(w)
        .filter(|(_, &w)| w > 0.0)
        .map(|(&x, &w)| (x, w))
        .collect();
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = atoms.len();
    let mut prefix = vec![0.0; n + 1];
    for (i, a) in atoms.iter().enumerate() {
        prefix[i + 1] = prefix[i] + a.1;
    }
    let mut best = f64::INFINITY;
    let mut j = 0;
    for i in 0..n {
        j = j.max(i);
        while j < n && !meets(prefix[j + 1] - prefix[i], target) {
            j += 1;
        }
        if j == n {
            break;
        }
        best = best.min(atoms[j].0 - atoms[i].0);
    }
    // rounding in the prefix sums can hide the full window; fall back to it
    if best.is_infinite() {
        best = atoms.last().map_or(0.0, |l| l.0 - atoms[0].0);
    }
    best
}

/// Whether some clique inside `cand` (plus the `acc` mass already chosen)
/// reaches `target`. Vertices are expected in decreasing weight order.
pub(crate) fn clique_reaches(cand: u64, acc: f64, adj: &[u64], w: &[f64], target: f64) -> bool {
    if meets(acc, target) {
        return true;
    }
    if cand == 0 || !meets(acc + mask_mass(cand, w), target) {
        return false;
    }
    let v = cand.trailing_zeros() as usize;
    let bit = 1u64 << v;
    clique_reaches(cand & adj[v], acc + w[v], adj, w, target)
        || clique_reaches(cand & !bit, acc, adj, w, target)
}
