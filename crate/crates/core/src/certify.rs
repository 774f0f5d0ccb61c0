//! Computable brackets and pass/fail certificates for the inequalities that
//! relate partial diameter, separation distance, and the l^p-ball reduction.
//!
//! The observable diameter `ObsDiam_R(X; -κ')` is a supremum over all
//! 1-Lipschitz functions and is never reported as a point value. Instead
//! [`obsdiam_bracket_r`] returns
//!
//! - a lower bound: the best of `Sep(X; κ, κ)` over grid values `κ > κ'`
//!   and the partial diameters of the distance functions `d(·, A)`;
//! - an upper bound: `Sep(X; κ'/2, κ'/2)`.

use std::io::Write;

use rand::seq::IndexedRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{lq_dist, reduce, Exponent, LpVector, ReductionParams};
use crate::mmspace::{
    partial_diameter_exact, partial_diameter_exact_capped, pushforward, sep_exact,
    sep_lower_greedy, FiniteMMSpace, SepQuery, Target, WeightedCloud, SEP_CAP,
};
use crate::rng;
use crate::sphere::{sample_ball, sample_sphere_point, SphereSampleSet};

/// Slack on every inequality check, except the approximation bound.
pub const CHECK_TOL: f64 = 1e-9;
/// Slack on `d_q(x, F(x)) <= eps/2`.
pub const APPROX_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lower: f64,
    pub upper: f64,
    pub lower_witness: String,
    pub upper_witness: String,
}

impl Bracket {
    pub fn is_valid(&self) -> bool {
        self.lower <= self.upper + CHECK_TOL
    }
}

/// Largest `diam(d(·, A)_* μ, m - κ')` over nonempty `A ⊆ X`, with the
/// maximizing set. Reflecting to `-d(·, A)` gives the same value.
pub fn distance_function_lower(x: &FiniteMMSpace, kappa_prime: f64) -> Result<(f64, Vec<usize>)> {
    let n = x.n();
    if n > SEP_CAP {
        return Err(Error::TooLarge {
            op: "distance_function_lower",
            size: n,
            cap: SEP_CAP,
            hint: "subsample the space",
        });
    }
    let mut best = (0.0, Vec::new());
    let mut dist_to_a = vec![f64::INFINITY; n];
    let mut members = Vec::new();
    walk_subsets(x, kappa_prime, 0, &mut dist_to_a, &mut members, &mut best)?;
    Ok(best)
}

fn walk_subsets(
    x: &FiniteMMSpace,
    kappa_prime: f64,
    i: usize,
    dist_to_a: &mut Vec<f64>,
    members: &mut Vec<usize>,
    best: &mut (f64, Vec<usize>),
) -> Result<()> {
    let n = x.n();
    if i == n {
        if members.is_empty() {
            return Ok(());
        }
        let cloud = WeightedCloud::real_line(dist_to_a.clone(), x.weights().to_vec())?;
        let v = partial_diameter_exact(&cloud, kappa_prime)?;
        if v > best.0 {
            *best = (v, members.clone());
        }
        return Ok(());
    }
    let saved = dist_to_a.clone();
    for (j, d) in dist_to_a.iter_mut().enumerate() {
        *d = d.min(x.dist(i, j));
    }
    members.push(i);
    walk_subsets(x, kappa_prime, i + 1, dist_to_a, members, best)?;
    members.pop();
    *dist_to_a = saved;
    walk_subsets(x, kappa_prime, i + 1, dist_to_a, members, best)
}

/// `min{d(x, A) + a, b}` at every point: a 1-Lipschitz function into `[a, b]`.
pub fn clamped_distance_values(
    x: &FiniteMMSpace,
    set: &[usize],
    a: f64,
    b: f64,
) -> Result<Vec<f64>> {
    if set.is_empty() || !(a < b) {
        return Err(Error::invalid("need a nonempty set and a < b"));
    }
    Ok((0..x.n())
        .map(|i| {
            let d = set
                .iter()
                .map(|&j| x.dist(i, j))
                .fold(f64::INFINITY, f64::min);
            (d + a).min(b)
        })
        .collect())
}

/// Two-sided bracket on `ObsDiam_R(X; -κ')`.
pub fn obsdiam_bracket_r(
    x: &FiniteMMSpace,
    kappa_prime: f64,
    kappa_grid: &[f64],
) -> Result<Bracket> {
    if !(kappa_prime > 0.0) {
        return Err(Error::invalid(format!(
            "kappa' must be > 0, got {kappa_prime}"
        )));
    }
    let upper = sep_exact(x, SepQuery::symmetric(kappa_prime / 2.0)?)?;
    let (mut lower, set) = distance_function_lower(x, kappa_prime)?;
    let mut lower_witness = format!("d(., A) with A = {set:?}");
    for &k in kappa_grid.iter().filter(|&&k| k > kappa_prime) {
        let s = sep_exact(x, SepQuery::symmetric(k)?)?;
        if s > lower {
            lower = s;
            lower_witness = format!("Sep(X; {k}, {k})");
        }
    }
    if x.n() <= 1 {
        lower_witness = "single point".into();
    }
    Ok(Bracket {
        lower,
        upper,
        lower_witness,
        upper_witness: format!("Sep(X; {0}, {0})", kappa_prime / 2.0),
    })
}

/// Outcome of the reduction-chain check `direct <= reduced + eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReduceBound {
    pub direct: f64,
    pub reduced: f64,
    pub bound_ok: bool,
}

fn check_cloud_metric(cloud: &WeightedCloud, params: &ReductionParams) -> Result<()> {
    match cloud.target() {
        Target::RealLine => Ok(()),
        Target::CoordinateSpace { k: 1, .. } => Ok(()),
        Target::CoordinateSpace { r, .. } if r == params.q => Ok(()),
        Target::CoordinateSpace { r, .. } => Err(Error::invalid(format!(
            "cloud carries d_{r} but the reduction is measured in d_{}",
            params.q
        ))),
    }
}

/// The cloud pushed through the reduction map, atom by atom.
pub fn reduce_cloud(cloud: &WeightedCloud, params: &ReductionParams) -> Result<WeightedCloud> {
    check_cloud_metric(cloud, params)?;
    cloud.map_points(cloud.target(), |p| {
        reduce(&LpVector(p.to_vec()), params).map(|v| v.0)
    })
}

/// Partial diameters of a cloud in the unit l^p ball (metric `d_q`) before
/// and after the reduction map, and whether `direct <= reduced + eps`.
pub fn lpball_reduce_bound(
    cloud: &WeightedCloud,
    params: &ReductionParams,
    kappa: f64,
) -> Result<ReduceBound> {
    lpball_reduce_bound_capped(cloud, params, kappa, crate::mmspace::PARTIAL_DIAMETER_CAP)
}

pub fn lpball_reduce_bound_capped(
    cloud: &WeightedCloud,
    params: &ReductionParams,
    kappa: f64,
    cap: usize,
) -> Result<ReduceBound> {
    let reduced_cloud = reduce_cloud(cloud, params)?;
    let direct = partial_diameter_exact_capped(cloud, kappa, cap)?;
    let reduced = partial_diameter_exact_capped(&reduced_cloud, kappa, cap)?;
    Ok(ReduceBound {
        direct,
        reduced,
        bound_ok: direct <= reduced + params.eps + CHECK_TOL,
    })
}

/// Lower bound on the partial diameter at mass `1 - κ` of a symmetrized
/// sample with uniform weights, in `d_q`.
///
/// A set of at least `(1 - κ)·N` of the `N/2` antipodal pairs' points
/// contains at least `⌈(1 - κ)N⌉ - N/2` complete pairs, so its diameter is at
/// least that order statistic of the pair distances `d_q(x, -x)`. Each of
/// those is `>= 2` when `q <= p`.
pub fn antipodal_lower(s: &SphereSampleSet, q: Exponent, kappa: f64) -> Result<f64> {
    if !s.symmetrized {
        return Err(Error::invalid("antipodal bound needs a symmetrized sample"));
    }
    if q > s.p {
        return Err(Error::Hypothesis(format!(
            "antipodal bound needs q <= p, got q = {q}, p = {}",
            s.p
        )));
    }
    if !(0.0..0.5).contains(&kappa) {
        return Err(Error::Hypothesis(format!(
            "need 0 <= kappa < 1/2, got {kappa}"
        )));
    }
    let total = s.points.len();
    let pairs = total / 2;
    if pairs == 0 || !total.is_multiple_of(2) {
        return Err(Error::invalid(
            "symmetrized sample must hold whole antipodal pairs",
        ));
    }
    let mut pair_dist: Vec<f64> = s
        .points
        .chunks(2)
        .map(|c| lq_dist(&c[0], &c[1], q))
        .collect();
    pair_dist.sort_by(f64::total_cmp);
    let need = ((1.0 - kappa) * total as f64 - 1e-9).ceil() as usize;
    let forced = need.saturating_sub(pairs).max(1);
    Ok(pair_dist[forced - 1])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub seed: u64,
    pub trial: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`; the check passes when this is `>= -tolerance`.
    pub margin: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRecord {
    fn new(name: &str, seed: u64, trial: usize, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let margin = rhs - lhs;
        CheckRecord {
            name: name.to_string(),
            seed,
            trial,
            lhs,
            rhs,
            margin,
            tolerance,
            pass: margin >= -tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub trials: usize,
    pub records: Vec<CheckRecord>,
    pub passed: usize,
    pub failed: usize,
    /// Instances on which the greedy separation bound was compared with the exact value.
    pub greedy_instances: usize,
    /// ... and how many of them it matched exactly.
    pub greedy_exact: usize,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn records_named<'a>(
        &'a self,
        name: &'a str,
    ) -> impl Iterator<Item = &'a CheckRecord> + 'a {
        self.records.iter().filter(move |r| r.name == name)
    }

    /// Per-check rows: `name,seed,lhs,rhs,margin,pass`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["name", "seed", "lhs", "rhs", "margin", "pass"])?;
        for r in &self.records {
            w.write_record([
                r.name.clone(),
                r.seed.to_string(),
                r.lhs.to_string(),
                r.rhs.to_string(),
                r.margin.to_string(),
                r.pass.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }
}

/// Knobs for [`run_inequality_suite_with`].
#[derive(Debug, Clone, Copy)]
pub struct SuiteOptions {
    /// Multiplies every Lipschitz constant used as a bound. Values below 1
    /// are a fault injection for testing the reporter.
    pub lipschitz_scale: f64,
    /// Largest ambient dimension for the reduction-map checks.
    pub max_reduction_dim: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            lipschitz_scale: 1.0,
            max_reduction_dim: 64,
        }
    }
}

pub mod names {
    pub const PUSHFORWARD_SEP: &str = "sep_pushforward_lipschitz";
    pub const SEP_BELOW_OBSDIAM: &str = "sep_below_distance_family";
    pub const BRACKET: &str = "obsdiam_bracket_ordered";
    pub const LINE_DIAM_SEP: &str = "line_partial_diameter_le_sep";
    pub const CUBE_DIAM_SEP: &str = "coordinate_partial_diameter_le_scaled_sep";
    pub const GREEDY: &str = "sep_greedy_le_exact";
    pub const APPROX: &str = "reduction_approximation";
    pub const LIPSCHITZ: &str = "reduction_lipschitz";
    pub const SUPPORT: &str = "reduction_support";
}

/// The standard `(p, q)` pairs exercised by the reduction checks.
pub fn standard_exponent_pairs() -> [(Exponent, Exponent); 3] {
    [
        (Exponent::ONE, Exponent::TWO),
        (Exponent::ONE, Exponent::INF),
        (Exponent::TWO, Exponent::new(3.0).expect("3 >= 1")),
    ]
}

pub fn run_inequality_suite(seed: u64, trials: usize) -> Result<SuiteReport> {
    run_inequality_suite_with(seed, trials, SuiteOptions::default())
}

/// Runs every check on `trials` random instances. Trials use independent
/// seed-derived streams and are merged in trial order.
pub fn run_inequality_suite_with(
    seed: u64,
    trials: usize,
    opts: SuiteOptions,
) -> Result<SuiteReport> {
    if trials == 0 {
        return Err(Error::invalid("trials must be >= 1"));
    }
    let per_trial = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(seed, t, &opts))
        .collect::<Result<Vec<_>>>()?;

    let mut records = Vec::new();
    let (mut greedy_instances, mut greedy_exact) = (0, 0);
    for (recs, equal) in per_trial {
        greedy_instances += 1;
        greedy_exact += usize::from(equal);
        records.extend(recs);
    }
    let passed = records.iter().filter(|r| r.pass).count();
    Ok(SuiteReport {
        seed,
        trials,
        failed: records.len() - passed,
        passed,
        records,
        greedy_instances,
        greedy_exact,
    })
}

fn uniform_weights<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| 1.0 - rng.random::<f64>()).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|w| w / s).collect()
}

fn lipschitz_constant(x: &FiniteMMSpace, f: &[f64]) -> f64 {
    let mut a: f64 = 0.0;
    for i in 0..x.n() {
        for j in (i + 1)..x.n() {
            let d = x.dist(i, j);
            let df = (f[i] - f[j]).abs();
            if d > 0.0 {
                a = a.max(df / d);
            } else if df > 0.0 {
                return f64::INFINITY;
            }
        }
    }
    a
}

/// A test point for the reduction map: uniform in the ball, on the sphere,
/// or with many tied coordinates.
fn reduction_point<R: Rng + ?Sized>(rng: &mut R, k: usize, p: Exponent) -> LpVector {
    match rng.random_range(0..3) {
        0 => sample_ball(rng, k, p),
        1 => sample_sphere_point(rng, k, p),
        _ => {
            let levels = [0.0, 1.0, 2.0, 3.0];
            let v = LpVector(
                (0..k)
                    .map(|_| {
                        let m = *levels.choose(rng).expect("nonempty");
                        if rng.random::<bool>() {
                            m
                        } else {
                            -m
                        }
                    })
                    .collect(),
            );
            let norm = v.norm(p);
            if norm == 0.0 {
                v
            } else {
                LpVector(v.0.iter().map(|c| c / norm).collect())
            }
        }
    }
}

/// A point of the ball near `x`.
pub(crate) fn nearby_point<R: Rng + ?Sized>(
    rng: &mut R,
    x: &LpVector,
    p: Exponent,
    scale: f64,
) -> LpVector {
    let y = LpVector(
        x.coords()
            .iter()
            .map(|c| c + scale * (rng.random::<f64>() - 0.5))
            .collect(),
    );
    let norm = y.norm(p);
    if norm > 1.0 {
        LpVector(y.0.iter().map(|c| c / norm).collect())
    } else {
        y
    }
}

fn run_trial(seed: u64, trial: usize, opts: &SuiteOptions) -> Result<(Vec<CheckRecord>, bool)> {
    let inst_seed = rng::derive_seed(seed, trial as u64);
    let mut rng = rng::stream(seed, trial as u64);
    let rec = |name: &str, lhs: f64, rhs: f64, tol: f64| {
        CheckRecord::new(name, inst_seed, trial, lhs, rhs, tol)
    };
    let mut out = Vec::new();

    // a random finite space in the unit cube of R^3 under l^inf
    let n = rng.random_range(2..=10);
    let coords: Vec<LpVector> = (0..n)
        .map(|_| LpVector((0..3).map(|_| rng.random::<f64>()).collect()))
        .collect();
    let x = FiniteMMSpace::from_points(&coords, uniform_weights(&mut rng, n), Exponent::INF)?;

    // Lipschitz images shrink separation by at most the Lipschitz constant
    let f: Vec<f64> = match rng.random_range(0..3) {
        0 => {
            let c = rng.random_range(0..3);
            coords.iter().map(|p| p.at(c)).collect()
        }
        1 => (0..n).map(|_| rng.random::<f64>()).collect(),
        _ => {
            let c = rng.random_range(0..3);
            coords
                .iter()
                .map(|p| (p.at(c) * 3.0).round() / 3.0)
                .collect()
        }
    };
    let alpha = lipschitz_constant(&x, &f);
    let q = SepQuery::new(rng.random_range(0.0..0.6), rng.random_range(0.0..0.6))?;
    let image = pushforward(&x, Target::RealLine, |i| vec![f[i]])?;
    let sep_x = sep_exact(&x, q)?;
    let sep_y = sep_exact(&image, q)?;
    out.push(rec(
        names::PUSHFORWARD_SEP,
        sep_y,
        alpha * opts.lipschitz_scale * sep_x,
        CHECK_TOL,
    ));

    // greedy separation never exceeds the exact value
    let greedy = sep_lower_greedy(&x, q);
    out.push(rec(names::GREEDY, greedy, sep_x, CHECK_TOL));
    let greedy_equal = (greedy - sep_x).abs() <= CHECK_TOL;

    // Sep(X; κ, κ) <= ObsDiam_R(X; -κ') for κ > κ', witnessed by d(·, A)
    let kappa_prime = rng.random_range(0.02..0.45);
    let kappa = kappa_prime + rng.random_range(0.005..0.2);
    let sep_k = sep_exact(&x, SepQuery::symmetric(kappa)?)?;
    let (family, _) = distance_function_lower(&x, kappa_prime)?;
    out.push(rec(names::SEP_BELOW_OBSDIAM, sep_k, family, CHECK_TOL));

    let bracket = obsdiam_bracket_r(&x, kappa_prime, &[kappa])?;
    out.push(rec(names::BRACKET, bracket.lower, bracket.upper, CHECK_TOL));

    // on the line: diam(ν, m - 2κ) <= Sep(ν; κ, κ)
    let len = rng.random_range(1..=10);
    let gridded = rng.random::<bool>();
    let values: Vec<f64> = (0..len)
        .map(|_| {
            if gridded {
                f64::from(rng.random_range(0..5u8)) / 4.0
            } else {
                rng.random::<f64>()
            }
        })
        .collect();
    let line = WeightedCloud::real_line(values, uniform_weights(&mut rng, len))?;
    let k_line = rng.random_range(0.01..0.5);
    out.push(rec(
        names::LINE_DIAM_SEP,
        partial_diameter_exact(&line, 2.0 * k_line)?,
        sep_exact(&line, SepQuery::symmetric(k_line)?)?,
        CHECK_TOL,
    ));

    // in (R^k, d_r): diam(ν, m - κ) <= k^{1/r} Sep(ν; κ/2k, κ/2k)
    let k = rng.random_range(1..=4usize);
    let r = *[
        Exponent::ONE,
        Exponent::TWO,
        Exponent::new(3.0)?,
        Exponent::INF,
    ]
    .choose(&mut rng)
    .expect("nonempty");
    let len = rng.random_range(1..=10);
    let pts: Vec<LpVector> = (0..len)
        .map(|_| LpVector((0..k).map(|_| rng.random_range(-1.0..1.0)).collect()))
        .collect();
    let cloud = WeightedCloud::coordinate(r, pts, uniform_weights(&mut rng, len))?;
    let kc = rng.random_range(0.01..1.0);
    let half = kc / (2.0 * k as f64);
    out.push(rec(
        names::CUBE_DIAM_SEP,
        partial_diameter_exact(&cloud, kc)?,
        r.root_of(k) * sep_exact(&cloud, SepQuery::symmetric(half)?)?,
        CHECK_TOL,
    ));

    // the reduction map: approximation, Lipschitz bound, support
    let (p, qe) = *standard_exponent_pairs()
        .choose(&mut rng)
        .expect("nonempty");
    let eps = *[0.5, 1.0].choose(&mut rng).expect("nonempty");
    let params = ReductionParams::new(p, qe, eps)?;
    let dim_hi = (2 * params.k_eps + 2).min(opts.max_reduction_dim).max(1);
    let dim = rng.random_range(1..=dim_hi);
    let a = reduction_point(&mut rng, dim, p);
    let b = if rng.random::<bool>() {
        nearby_point(&mut rng, &a, p, 0.05)
    } else {
        reduction_point(&mut rng, dim, p)
    };
    let fa = reduce(&a, &params)?;
    let fb = reduce(&b, &params)?;
    out.push(rec(
        names::APPROX,
        lq_dist(&a, &fa, qe),
        eps / 2.0,
        APPROX_TOL,
    ));
    out.push(rec(
        names::LIPSCHITZ,
        lq_dist(&fa, &fb, qe),
        params.lipschitz_constant() * opts.lipschitz_scale * lq_dist(&a, &b, qe),
        CHECK_TOL,
    ));
    out.push(rec(
        names::SUPPORT,
        fa.nonzero_count().max(fb.nonzero_count()) as f64,
        params.k_eps as f64,
        0.0,
    ));

    Ok((out, greedy_equal))
}
