//! Seeded sampling from the cone measure on l^p spheres.
//!
//! The cone measure of `A ⊆ S^{n-1}_p` is the normalized volume of
//! `{t x : x ∈ A, 0 <= t <= 1}`. If `T_1, ..., T_n` are i.i.d. with density
//! proportional to `exp(-|t|^p)` then `T / ‖T‖_p` has exactly this law. We draw
//! `|T_i| = G^{1/p}` with `G ~ Gamma(1/p, 1)` and an independent fair sign.
//! For `p = inf` the coordinates are uniform on `[-1, 1]` instead.

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{Exponent, LpVector};
use crate::mmspace::FiniteMMSpace;
use crate::rng;

/// Draws generated from one RNG substream.
pub const CHUNK: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereSampleSet {
    pub n: usize,
    pub p: Exponent,
    pub seed: u64,
    /// When set, `points[2i + 1] = -points[2i]`.
    pub symmetrized: bool,
    pub points: Vec<LpVector>,
}

impl SphereSampleSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn draw_point<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    p: Exponent,
    gamma: Option<&Gamma<f64>>,
) -> LpVector {
    loop {
        let raw: Vec<f64> = match gamma {
            None => (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect(),
            Some(g) => {
                let inv_p = 1.0 / p.get();
                (0..n)
                    .map(|_| {
                        let mag = g.sample(rng).powf(inv_p);
                        if rng.random::<bool>() {
                            mag
                        } else {
                            -mag
                        }
                    })
                    .collect()
            }
        };
        let v = LpVector(raw);
        let norm = v.norm(p);
        if norm > 0.0 && norm.is_finite() {
            return LpVector(v.0.iter().map(|c| c / norm).collect());
        }
    }
}

/// A point of the unit l^p ball of `R^k`, uniform for Lebesgue measure.
pub fn sample_ball<R: Rng + ?Sized>(rng: &mut R, k: usize, p: Exponent) -> LpVector {
    let gamma = (!p.is_infinite()).then(|| Gamma::new(1.0 / p.get(), 1.0).expect("p >= 1"));
    let dir = draw_point(rng, k, p, gamma.as_ref());
    let radius = rng.random::<f64>().powf(1.0 / k as f64);
    dir.scaled(radius)
}

/// A point of the unit l^p sphere of `R^k` under the cone measure.
pub fn sample_sphere_point<R: Rng + ?Sized>(rng: &mut R, k: usize, p: Exponent) -> LpVector {
    let gamma = (!p.is_infinite()).then(|| Gamma::new(1.0 / p.get(), 1.0).expect("p >= 1"));
    draw_point(rng, k, p, gamma.as_ref())
}

/// `count` i.i.d. points of `S^{n-1}_p` under the cone measure, plus their
/// antipodes when `symmetrize` is set. Deterministic in `seed`.
pub fn sample_cone(
    n: usize,
    p: Exponent,
    count: usize,
    seed: u64,
    symmetrize: bool,
) -> Result<SphereSampleSet> {
    if n == 0 {
        return Err(Error::invalid("dimension n must be >= 1"));
    }
    if count == 0 {
        return Err(Error::invalid("count must be >= 1"));
    }
    let gamma = if p.is_infinite() {
        None
    } else {
        Some(Gamma::new(1.0 / p.get(), 1.0).map_err(|e| Error::invalid(e.to_string()))?)
    };
    let chunks = count.div_ceil(CHUNK);
    let blocks: Vec<Vec<LpVector>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = rng::stream(seed, c as u64);
            let len = CHUNK.min(count - c * CHUNK);
            let mut out = Vec::with_capacity(if symmetrize { 2 * len } else { len });
            for _ in 0..len {
                let x = draw_point(&mut rng, n, p, gamma.as_ref());
                if symmetrize {
                    let minus = x.neg();
                    out.push(x);
                    out.push(minus);
                } else {
                    out.push(x);
                }
            }
            out
        })
        .collect();
    Ok(SphereSampleSet {
        n,
        p,
        seed,
        symmetrized: symmetrize,
        points: blocks.into_iter().flatten().collect(),
    })
}

/// The sample as a finite mm-space under `d_q` with uniform weights `1/|S|`.
pub fn empirical_mmspace(s: &SphereSampleSet, q: Exponent) -> FiniteMMSpace {
    let w = 1.0 / s.points.len() as f64;
    FiniteMMSpace::from_points(&s.points, vec![w; s.points.len()], q)
        .expect("uniform weights are valid")
}

/// Median with the midpoint convention for even counts.
pub fn median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::invalid("median of an empty sample"));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::invalid("sample contains NaN"));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let h = v.len() / 2;
    Ok(if v.len() % 2 == 1 {
        v[h]
    } else {
        0.5 * (v[h - 1] + v[h])
    })
}

/// For each `r`, the fraction of `values` at distance `>= r` from their median.
pub fn median_concentration_profile(values: &[f64], r_grid: &[f64]) -> Result<Vec<f64>> {
    let med = median(values)?;
    let mut dev: Vec<f64> = values.iter().map(|v| (v - med).abs()).collect();
    dev.sort_by(f64::total_cmp);
    let n = dev.len() as f64;
    Ok(r_grid
        .iter()
        .map(|&r| {
            let below = dev.partition_point(|&d| d < r);
            (dev.len() - below) as f64 / n
        })
        .collect())
}

/// Standard error of an empirical frequency.
pub fn binomial_se(freq: f64, samples: usize) -> f64 {
    (freq * (1.0 - freq) / samples as f64).sqrt()
}
