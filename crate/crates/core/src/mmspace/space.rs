use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::MetricMeasure;
use crate::error::{Error, Result};
use crate::lp::{lr_dist_slices, Exponent, LpVector};

/// Tolerance used by the constructor-time metric checks.
pub const METRIC_TOL: f64 = 1e-9;

/// A finite metric measure space: `n` points, a full distance matrix and
/// nonnegative weights.
///
/// Distances must be symmetric, vanish on the diagonal and satisfy the
/// triangle inequality up to [`METRIC_TOL`]. Distinct points at distance zero
/// are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMMSpace {
    n: usize,
    dist: Vec<f64>,
    weights: Vec<f64>,
    total_mass: f64,
}

#[derive(Serialize, Deserialize)]
struct SpaceDoc {
    dist: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

fn check_weights(weights: &[f64]) -> Result<f64> {
    for (i, &w) in weights.iter().enumerate() {
        if !(w >= 0.0) || !w.is_finite() {
            return Err(Error::invalid(format!(
                "weight {i} is {w}, must be finite and >= 0"
            )));
        }
    }
    Ok(weights.iter().sum())
}

impl FiniteMMSpace {
    /// Builds a space from a square distance matrix, validating every metric axiom.
    pub fn new(dist: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        let n = weights.len();
        if dist.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: dist.len(),
            });
        }
        let mut flat = Vec::with_capacity(n * n);
        for row in &dist {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            flat.extend_from_slice(row);
        }
        Self::from_flat(n, flat, weights)
    }

    /// Row-major `n × n` distance matrix.
    pub fn from_flat(n: usize, dist: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if dist.len() != n * n || weights.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: dist.len(),
            });
        }
        let total_mass = check_weights(&weights)?;
        let space = FiniteMMSpace {
            n,
            dist,
            weights,
            total_mass,
        };
        space.validate_metric()?;
        Ok(space)
    }

    /// Points of a normed space with the l^r distance. The metric axioms hold
    /// by construction so the cubic triangle check is skipped.
    pub fn from_points(points: &[LpVector], weights: Vec<f64>, r: Exponent) -> Result<Self> {
        let n = points.len();
        if weights.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: weights.len(),
            });
        }
        let total_mass = check_weights(&weights)?;
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = lr_dist_slices(points[i].coords(), points[j].coords(), r);
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        Ok(FiniteMMSpace {
            n,
            dist,
            weights,
            total_mass,
        })
    }

    /// `n` points uniform in the unit cube `[0,1]^dim` with the l^inf distance,
    /// weights uniform in `(0,1]` and normalized to total mass 1.
    pub fn random_cube<R: Rng + ?Sized>(rng: &mut R, n: usize, dim: usize) -> Self {
        let points: Vec<LpVector> = (0..n)
            .map(|_| LpVector((0..dim).map(|_| rng.random::<f64>()).collect()))
            .collect();
        let raw: Vec<f64> = (0..n).map(|_| 1.0 - rng.random::<f64>()).collect();
        let s: f64 = raw.iter().sum();
        let weights = raw.iter().map(|w| w / s).collect();
        Self::from_points(&points, weights, Exponent::INF).expect("generated weights are valid")
    }

    fn validate_metric(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            let dii = self.dist[i * n + i];
            if dii.abs() > METRIC_TOL {
                return Err(Error::invalid(format!("d({i},{i}) = {dii} is not zero")));
            }
            for j in 0..n {
                let d = self.dist[i * n + j];
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::invalid(format!(
                        "d({i},{j}) = {d} is not a finite nonnegative length"
                    )));
                }
                if (d - self.dist[j * n + i]).abs() > METRIC_TOL {
                    return Err(Error::invalid(format!(
                        "distance matrix is not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let dij = self.dist[i * n + j];
                for k in 0..n {
                    if dij > self.dist[i * n + k] + self.dist[k * n + j] + METRIC_TOL {
                        return Err(Error::invalid(format!(
                            "triangle inequality fails: d({i},{j}) > d({i},{k}) + d({k},{j})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Same points and metric with the given weights.
    pub fn reweighted(&self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: weights.len(),
            });
        }
        let total_mass = check_weights(&weights)?;
        Ok(FiniteMMSpace {
            n: self.n,
            dist: self.dist.clone(),
            weights,
            total_mass,
        })
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let doc: SpaceDoc = serde_json::from_str(s)?;
        Self::new(doc.dist, doc.weights)
    }

    pub fn to_json_string(&self) -> Result<String> {
        let dist = self
            .dist
            .chunks(self.n.max(1))
            .take(self.n)
            .map(<[f64]>::to_vec)
            .collect();
        let doc = SpaceDoc {
            dist,
            weights: self.weights.clone(),
        };
        Ok(serde_json::to_string(&doc)?)
    }

    /// Loads `{"dist": [[...]], "weights": [...]}`.
    pub fn load_json(path: &Path) -> Result<Self> {
        let s = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json_str(&s)
    }

    /// Loads a headerless comma-separated square matrix and a weights file
    /// (one weight per line, or a single comma-separated row).
    pub fn load_csv(matrix: &Path, weights: &Path) -> Result<Self> {
        let dist = read_csv_rows(matrix)?;
        let weights: Vec<f64> = read_csv_rows(weights)?.into_iter().flatten().collect();
        Self::new(dist, weights)
    }
}

fn read_csv_rows(path: &Path) -> Result<Vec<Vec<f64>>> {
    let file = fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let row = record
            .iter()
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::invalid(format!("{}: cannot parse {s:?}", path.display())))
            })
            .collect::<Result<Vec<f64>>>()?;
        if !row.is_empty() {
            rows.push(row);
        }
    }
    Ok(rows)
}

impl MetricMeasure for FiniteMMSpace {
    fn len(&self) -> usize {
        self.n
    }

    fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn total_mass(&self) -> f64 {
        self.total_mass
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::io::Write;

    #[test]
    fn rejects_malformed_matrices() {
        let w = vec![0.5, 0.5];
        assert!(FiniteMMSpace::new(vec![vec![0.0, 1.0], vec![2.0, 0.0]], w.clone()).is_err());
        assert!(FiniteMMSpace::new(vec![vec![0.1, 1.0], vec![1.0, 0.0]], w.clone()).is_err());
        assert!(FiniteMMSpace::new(vec![vec![0.0, -1.0], vec![-1.0, 0.0]], w.clone()).is_err());
        assert!(FiniteMMSpace::new(vec![vec![0.0, 1.0]], w.clone()).is_err());
        assert!(FiniteMMSpace::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![0.5, -0.1]).is_err());
        let bad_triangle = vec![
            vec![0.0, 1.0, 3.0],
            vec![1.0, 0.0, 1.0],
            vec![3.0, 1.0, 0.0],
        ];
        assert!(FiniteMMSpace::new(bad_triangle, vec![1.0; 3]).is_err());
    }

    #[test]
    fn triangle_tolerance() {
        let nearly = vec![
            vec![0.0, 1.0, 2.0 + 5e-10],
            vec![1.0, 0.0, 1.0],
            vec![2.0 + 5e-10, 1.0, 0.0],
        ];
        assert!(FiniteMMSpace::new(nearly, vec![1.0; 3]).is_ok());
    }

    #[test]
    fn total_mass_is_stored_sum() {
        let w = vec![0.1, 0.2, 0.3];
        let x = FiniteMMSpace::from_points(
            &[vec![0.0].into(), vec![1.0].into(), vec![2.0].into()],
            w.clone(),
            Exponent::ONE,
        )
        .unwrap();
        assert_eq!(x.total_mass(), w.iter().sum::<f64>());
    }

    #[test]
    fn random_cube_is_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = FiniteMMSpace::random_cube(&mut rng, 7, 3);
        assert!((x.total_mass() - 1.0).abs() < 1e-12);
        assert!(x.validate_metric().is_ok());
        assert!(x.diameter() <= 1.0);
    }

    #[test]
    fn json_and_csv_loading() {
        let json = r#"{"dist": [[0, 1], [1, 0]], "weights": [0.5, 0.5]}"#;
        let x = FiniteMMSpace::from_json_str(json).unwrap();
        assert_eq!(x.dist(0, 1), 1.0);
        let again = FiniteMMSpace::from_json_str(&x.to_json_string().unwrap()).unwrap();
        assert_eq!(again, x);

        let dir = tempfile::tempdir().unwrap();
        let mpath = dir.path().join("d.csv");
        let wpath = dir.path().join("w.csv");
        writeln!(
            fs::File::create(&mpath).unwrap(),
            "0, 2, 3\n2, 0, 1\n3, 1, 0"
        )
        .unwrap();
        writeln!(fs::File::create(&wpath).unwrap(), "0.2\n0.3\n0.5").unwrap();
        let y = FiniteMMSpace::load_csv(&mpath, &wpath).unwrap();
        assert_eq!(y.n(), 3);
        assert_eq!(y.dist(2, 0), 3.0);
        assert_eq!(y.weights(), &[0.2, 0.3, 0.5]);

        let missing = FiniteMMSpace::load_json(&dir.path().join("nope.json"));
        assert!(matches!(missing, Err(Error::Io { .. })));
    }
}
