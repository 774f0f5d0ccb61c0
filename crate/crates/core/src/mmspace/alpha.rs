use super::{distance_matrix, mask_mass, meets, MetricMeasure};
use crate::error::{Error, Result};

/// Default support-size cap for [`concentration_function`].
pub const CONCENTRATION_CAP: usize = 22;

/// `α_X(r)`: the largest mass outside the open `r`-neighborhood
/// `{x : d(x, A) < r}` of a set `A` with `μ(A) >= m/2`.
///
/// Exact, by branch-and-bound over subsets of the support. For large samples
/// use the median profile in [`crate::sphere`].
pub fn concentration_function<M: MetricMeasure + ?Sized>(x: &M, r: f64) -> Result<f64> {
    concentration_function_capped(x, r, CONCENTRATION_CAP)
}

pub fn concentration_function_capped<M: MetricMeasure + ?Sized>(
    x: &M,
    r: f64,
    cap: usize,
) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::invalid(format!("radius must be > 0, got {r}")));
    }
    let w = x.weights();
    let n = x.len();
    let cap = cap.min(64);
    let mut support: Vec<usize> = (0..n).filter(|&i| w[i] > 0.0).collect();
    if support.len() > cap {
        return Err(Error::TooLarge {
            op: "concentration_function",
            size: support.len(),
            cap,
            hint: "use the Monte Carlo median concentration profile instead",
        });
    }
    if support.is_empty() {
        return Ok(0.0);
    }
    // zero-weight points never help as members of A and add nothing outside it
    support.sort_by(|&a, &b| w[b].total_cmp(&w[a]));
    let k = support.len();
    let ws: Vec<f64> = support.iter().map(|&i| w[i]).collect();
    let d = distance_matrix(x, &support);
    let balls: Vec<u64> = (0..k)
        .map(|a| {
            (0..k)
                .filter(|&b| d[a * k + b] < r)
                .fold(0u64, |m, b| m | (1 << b))
        })
        .collect();

    let search = AlphaSearch {
        k,
        balls: &balls,
        w: &ws,
        half: x.total_mass() / 2.0,
        all: if k == 64 { u64::MAX } else { (1u64 << k) - 1 },
    };
    let mut best = 0.0;
    search.run(0, 0.0, 0, &mut best);
    Ok(best)
}

struct AlphaSearch<'a> {
    k: usize,
    balls: &'a [u64],
    w: &'a [f64],
    half: f64,
    all: u64,
}

impl AlphaSearch<'_> {
    fn run(&self, i: usize, a_mass: f64, nbhd: u64, best: &mut f64) {
        // growing A only shrinks what lies outside its neighborhood
        let outside = mask_mass(self.all & !nbhd, self.w);
        if outside <= *best {
            return;
        }
        if meets(a_mass, self.half) {
            *best = outside;
            return;
        }
        if i == self.k {
            return;
        }
        let rest = self.all & !((1u64 << i) - 1);
        if !meets(a_mass + mask_mass(rest, self.w), self.half) {
            return;
        }
        self.run(i + 1, a_mass + self.w[i], nbhd | self.balls[i], best);
        self.run(i + 1, a_mass, nbhd, best);
    }
}
