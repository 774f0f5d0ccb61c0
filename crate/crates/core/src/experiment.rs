//! Experiment configuration, execution and emission for the `lpconc` binary.
//!
//! Every command is a pure function of its [`ExperimentConfig`]; the only
//! field of an [`ExperimentRecord`] that varies between identical runs is
//! `wall_time_ms`.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certify::{
    antipodal_lower, lpball_reduce_bound, obsdiam_bracket_r, reduce_cloud, run_inequality_suite,
    SuiteReport,
};
use crate::error::{Error, Result};
use crate::lp::{Exponent, LpVector, ReductionParams};
use crate::mmspace::{
    partial_diameter_exact, sep_exact, FiniteMMSpace, MetricMeasure, SepQuery, WeightedCloud,
    PARTIAL_DIAMETER_CAP, SEP_CAP,
};
use crate::rng;
use crate::sphere::{binomial_se, median_concentration_profile, sample_cone};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    DemoTwoPoint,
    Suite,
    SphereConcentration,
    Prop41,
    Theorem1,
    ObsdiamBracket,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::DemoTwoPoint => "demo-two-point",
            Command::Suite => "suite",
            Command::SphereConcentration => "sphere-concentration",
            Command::Prop41 => "prop41",
            Command::Theorem1 => "theorem1",
            Command::ObsdiamBracket => "obsdiam-bracket",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub p: Exponent,
    pub q: Exponent,
    pub n_list: Vec<usize>,
    /// Sample count; for `suite` the number of trials, for `prop41` the number of antipodal pairs.
    pub samples: usize,
    pub eps: f64,
    pub kappa: f64,
    pub seed: u64,
    pub r_grid: Vec<f64>,
    /// Masses `κ > κ'` tried on the lower side of `obsdiam-bracket`.
    pub kappa_grid: Vec<f64>,
    /// mm-space JSON for `obsdiam-bracket`; random cube spaces otherwise.
    pub input: Option<PathBuf>,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[serde(skip)]
    pub format: Format,
}

impl ExperimentConfig {
    /// The defaults for `command`.
    pub fn for_command(command: Command) -> Self {
        let base = ExperimentConfig {
            command,
            p: Exponent::TWO,
            q: Exponent::TWO,
            n_list: vec![4, 16, 64, 256],
            samples: 1000,
            eps: 0.5,
            kappa: 0.1,
            seed: 0,
            r_grid: vec![0.3],
            kappa_grid: Vec::new(),
            input: None,
            output: None,
            format: Format::Json,
        };
        match command {
            Command::DemoTwoPoint => ExperimentConfig {
                n_list: Vec::new(),
                ..base
            },
            Command::Suite => ExperimentConfig {
                n_list: Vec::new(),
                samples: 500,
                ..base
            },
            Command::SphereConcentration => ExperimentConfig {
                samples: 5000,
                ..base
            },
            Command::Prop41 => ExperimentConfig {
                n_list: vec![30],
                samples: 200,
                kappa: 0.25,
                ..base
            },
            Command::Theorem1 => ExperimentConfig {
                p: Exponent::ONE,
                n_list: vec![16, 256],
                ..base
            },
            Command::ObsdiamBracket => ExperimentConfig {
                n_list: vec![8],
                kappa: 0.2,
                ..base
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub n: Option<usize>,
    pub quantity: String,
    pub value: f64,
}

impl ResultRow {
    fn new(n: Option<usize>, quantity: impl Into<String>, value: f64) -> Self {
        ResultRow {
            n,
            quantity: quantity.into(),
            value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub schema: u32,
    pub command: Command,
    pub params: ExperimentConfig,
    pub seed: u64,
    pub results: Vec<ResultRow>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub suite: Option<SuiteReport>,
    pub wall_time_ms: u64,
}

impl ExperimentRecord {
    /// Rows for one quantity, in emission order.
    pub fn values(&self, quantity: &str) -> Vec<(Option<usize>, f64)> {
        self.results
            .iter()
            .filter(|r| r.quantity == quantity)
            .map(|r| (r.n, r.value))
            .collect()
    }

    pub fn value(&self, n: Option<usize>, quantity: &str) -> Option<f64> {
        self.results
            .iter()
            .find(|r| r.n == n && r.quantity == quantity)
            .map(|r| r.value)
    }
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentRecord> {
    let start = Instant::now();
    let mut suite = None;
    let results = match config.command {
        Command::DemoTwoPoint => demo_two_point()?,
        Command::Suite => {
            let report = run_inequality_suite(config.seed, config.samples)?;
            let rows = suite_rows(&report);
            suite = Some(report);
            rows
        }
        Command::SphereConcentration => sphere_concentration(config)?,
        Command::Prop41 => prop41(config)?,
        Command::Theorem1 => theorem1(config)?,
        Command::ObsdiamBracket => obsdiam_bracket(config)?,
    };
    Ok(ExperimentRecord {
        schema: SCHEMA_VERSION,
        command: config.command,
        params: config.clone(),
        seed: config.seed,
        results,
        suite,
        wall_time_ms: start.elapsed().as_millis() as u64,
    })
}

fn require_n_list(config: &ExperimentConfig) -> Result<()> {
    if config.n_list.is_empty() || config.n_list.contains(&0) {
        return Err(Error::invalid("n_list must be nonempty with every n >= 1"));
    }
    if config.samples == 0 {
        return Err(Error::invalid("samples must be >= 1"));
    }
    Ok(())
}

fn two_point_space() -> FiniteMMSpace {
    FiniteMMSpace::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![0.5, 0.5])
        .expect("valid two-point space")
}

fn demo_two_point() -> Result<Vec<ResultRow>> {
    let x = two_point_space();
    Ok(vec![
        ResultRow::new(None, "partial_diameter", partial_diameter_exact(&x, 0.5)?),
        ResultRow::new(None, "sep", sep_exact(&x, SepQuery::symmetric(0.5)?)?),
    ])
}

fn suite_rows(r: &SuiteReport) -> Vec<ResultRow> {
    vec![
        ResultRow::new(None, "checks", r.records.len() as f64),
        ResultRow::new(None, "passed", r.passed as f64),
        ResultRow::new(None, "failed", r.failed as f64),
        ResultRow::new(None, "greedy_instances", r.greedy_instances as f64),
        ResultRow::new(None, "greedy_exact", r.greedy_exact as f64),
    ]
}

fn sphere_concentration(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    require_n_list(config)?;
    if config.r_grid.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(Error::invalid("r_grid entries must be finite and >= 0"));
    }
    let per_n = config
        .n_list
        .par_iter()
        .map(|&n| {
            let s = sample_cone(
                n,
                config.p,
                config.samples,
                rng::derive_seed(config.seed, n as u64),
                false,
            )?;
            let x1: Vec<f64> = s.points.iter().map(|x| x.at(0)).collect();
            let profile = median_concentration_profile(&x1, &config.r_grid)?;
            let mut rows = Vec::new();
            for (r, f) in config.r_grid.iter().zip(profile) {
                rows.push(ResultRow::new(Some(n), format!("profile_r={r}"), f));
                rows.push(ResultRow::new(
                    Some(n),
                    format!("profile_se_r={r}"),
                    binomial_se(f, config.samples),
                ));
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_n.into_iter().flatten().collect())
}

fn prop41(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    if config.q > config.p {
        return Err(Error::Hypothesis(format!(
            "the antipodal lower bound on the sphere needs 1 <= q <= p, got p = {}, q = {}",
            config.p, config.q
        )));
    }
    require_n_list(config)?;
    let per_n = config
        .n_list
        .par_iter()
        .map(|&n| {
            let s = sample_cone(
                n,
                config.p,
                config.samples,
                rng::derive_seed(config.seed, n as u64),
                true,
            )?;
            Ok(ResultRow::new(
                Some(n),
                "antipodal_lower",
                antipodal_lower(&s, config.q, config.kappa)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_n)
}

/// Scale `s` such that `x ↦ s·x` maps the unit l^2 sphere of `R^n` into the
/// unit l^p ball and is 1-Lipschitz from `d_2` to `d_q`.
pub fn sphere_to_ball_scale(n: usize, p: Exponent, q: Exponent) -> f64 {
    let growth = |r: Exponent| {
        let e = (1.0 / r.get() - 0.5).max(0.0);
        (n as f64).powf(e)
    };
    1.0 / growth(p).max(growth(q))
}

/// The coordinate of largest empirical variance, lowest index on ties.
fn dominant_coordinate(points: &[Vec<f64>]) -> usize {
    let dim = points.first().map_or(0, Vec::len);
    let m = points.len() as f64;
    let mut best = (0, f64::NEG_INFINITY);
    for c in 0..dim {
        let mean = points.iter().map(|p| p[c]).sum::<f64>() / m;
        let var = points.iter().map(|p| (p[c] - mean).powi(2)).sum::<f64>() / m;
        if var > best.1 {
            best = (c, var);
        }
    }
    best.0
}

fn theorem1(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    if !(config.p < config.q) {
        return Err(Error::Hypothesis(format!(
            "the l^p-ball reduction needs 1 <= p < q <= inf, got p = {}, q = {}",
            config.p, config.q
        )));
    }
    require_n_list(config)?;
    let params = ReductionParams::new(config.p, config.q, config.eps)?;
    let kappa = config.kappa;
    let per_n = config
        .n_list
        .par_iter()
        .map(|&n| {
            let s = sample_cone(
                n,
                Exponent::TWO,
                config.samples,
                rng::derive_seed(config.seed, n as u64),
                false,
            )?;
            let scale = sphere_to_ball_scale(n, config.p, config.q);
            let pts: Vec<LpVector> = s.points.iter().map(|x| x.scaled(scale)).collect();
            let w = 1.0 / pts.len() as f64;
            let mut rows = Vec::new();

            // exact partial diameters on the leading subsample
            let head: Vec<LpVector> = pts.iter().take(PARTIAL_DIAMETER_CAP).cloned().collect();
            let hw = vec![1.0 / head.len() as f64; head.len()];
            let cloud = WeightedCloud::coordinate(config.q, head, hw)?;
            let b = lpball_reduce_bound(&cloud, &params, kappa)?;
            rows.push(ResultRow::new(Some(n), "direct_exact_capped", b.direct));
            rows.push(ResultRow::new(Some(n), "reduced_exact_capped", b.reduced));
            rows.push(ResultRow::new(
                Some(n),
                "chain_ok_exact_capped",
                f64::from(u8::from(b.bound_ok)),
            ));

            // every sample, projected to the dominant coordinate of the reduced cloud
            let full = WeightedCloud::coordinate(config.q, pts, vec![w; s.points.len()])?;
            let reduced = reduce_cloud(&full, &params)?;
            let c = dominant_coordinate(reduced.points());
            let line = |cl: &WeightedCloud| {
                WeightedCloud::real_line(
                    cl.points().iter().map(|p| p[c]).collect(),
                    cl.weights().to_vec(),
                )
            };
            let direct = partial_diameter_exact(&line(&full)?, kappa)?;
            let red = partial_diameter_exact(&line(&reduced)?, kappa)?;
            rows.push(ResultRow::new(Some(n), "projected_coordinate", c as f64));
            rows.push(ResultRow::new(Some(n), "direct_projected", direct));
            rows.push(ResultRow::new(Some(n), "reduced_projected", red));
            rows.push(ResultRow::new(
                Some(n),
                "chain_ok_projected",
                f64::from(u8::from(direct <= red + config.eps + 1e-9)),
            ));
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_n.into_iter().flatten().collect())
}

fn obsdiam_bracket(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let grid: Vec<f64> = if config.kappa_grid.is_empty() {
        (1..8)
            .map(|j| config.kappa + (1.0 - config.kappa) * j as f64 / 8.0)
            .collect()
    } else {
        config.kappa_grid.clone()
    };
    let bracket_rows = |n: Option<usize>, x: &FiniteMMSpace| -> Result<Vec<ResultRow>> {
        let b = obsdiam_bracket_r(x, config.kappa, &grid)?;
        Ok(vec![
            ResultRow::new(n, "obsdiam_lower", b.lower),
            ResultRow::new(n, "obsdiam_upper", b.upper),
        ])
    };
    if let Some(path) = &config.input {
        let x = FiniteMMSpace::load_json(path)?;
        return bracket_rows(Some(x.len()), &x);
    }
    if config.n_list.is_empty() || config.n_list.iter().any(|&n| n == 0 || n > SEP_CAP) {
        return Err(Error::invalid(format!(
            "random bracket spaces need 1 <= n <= {SEP_CAP}"
        )));
    }
    let per_n = config
        .n_list
        .par_iter()
        .map(|&n| {
            let mut r = rng::stream(config.seed, n as u64);
            let x = FiniteMMSpace::random_cube(&mut r, n, 3);
            bracket_rows(Some(n), &x)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_n.into_iter().flatten().collect())
}

/// The record as text in `format`.
///
/// CSV is long format with columns `n,quantity,value`; `n` is empty for
/// rows that do not belong to a dimension.
pub fn render(record: &ExperimentRecord, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(record)? + "\n"),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["n", "quantity", "value"])?;
            for r in &record.results {
                let n = r.n.map(|n| n.to_string()).unwrap_or_default();
                w.write_record([n, r.quantity.clone(), r.value.to_string()])?;
            }
            let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}

pub fn emit(record: &ExperimentRecord, format: Format, path: &Path) -> Result<()> {
    let text = render(record, format)?;
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
