use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{FiniteMMSpace, MetricMeasure};
use crate::error::{Error, Result};
use crate::lp::{lr_dist_slices, Exponent, LpVector};

/// Where a [`WeightedCloud`] lives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Target {
    RealLine,
    /// `R^k` with the l^r distance.
    CoordinateSpace {
        k: usize,
        r: Exponent,
    },
}

impl Target {
    pub fn dim(&self) -> usize {
        match self {
            Target::RealLine => 1,
            Target::CoordinateSpace { k, .. } => *k,
        }
    }

    fn exponent(&self) -> Exponent {
        match self {
            Target::RealLine => Exponent::ONE,
            Target::CoordinateSpace { r, .. } => *r,
        }
    }
}

/// A finitely supported measure on the real line or on `(R^k, d_r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CloudDoc")]
pub struct WeightedCloud {
    target: Target,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
    total_mass: f64,
}

#[derive(Deserialize)]
struct CloudDoc {
    target: Target,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
    #[serde(default)]
    total_mass: Option<f64>,
}

impl TryFrom<CloudDoc> for WeightedCloud {
    type Error = Error;

    fn try_from(doc: CloudDoc) -> Result<Self> {
        let cloud = WeightedCloud::new(doc.target, doc.points, doc.weights)?;
        if let Some(m) = doc.total_mass {
            if (m - cloud.total_mass).abs() > 1e-9 * m.abs().max(1.0) {
                return Err(Error::invalid(format!(
                    "total_mass {m} disagrees with the weights (sum {})",
                    cloud.total_mass
                )));
            }
        }
        Ok(cloud)
    }
}

impl WeightedCloud {
    pub fn new(target: Target, points: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                found: weights.len(),
            });
        }
        let dim = target.dim();
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid("cloud coordinates must be finite"));
            }
        }
        for (i, &w) in weights.iter().enumerate() {
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::invalid(format!(
                    "weight {i} is {w}, must be finite and >= 0"
                )));
            }
        }
        let total_mass = weights.iter().sum();
        Ok(WeightedCloud {
            target,
            points,
            weights,
            total_mass,
        })
    }

    pub fn real_line(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        Self::new(
            Target::RealLine,
            values.into_iter().map(|v| vec![v]).collect(),
            weights,
        )
    }

    pub fn coordinate(r: Exponent, points: Vec<LpVector>, weights: Vec<f64>) -> Result<Self> {
        let k = points.first().map_or(0, LpVector::len);
        Self::new(
            Target::CoordinateSpace { k, r },
            points.into_iter().map(|p| p.0).collect(),
            weights,
        )
    }

    pub fn target(&self) -> Target {
        self.target
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The cloud as a finite mm-space with its own metric.
    pub fn to_mmspace(&self) -> FiniteMMSpace {
        let pts: Vec<LpVector> = self.points.iter().cloned().map(LpVector).collect();
        FiniteMMSpace::from_points(&pts, self.weights.clone(), self.target.exponent())
            .expect("cloud weights were validated")
    }

    /// Pushes the cloud forward through a pointwise map into `target`.
    pub fn map_points<F>(&self, target: Target, mut f: F) -> Result<WeightedCloud>
    where
        F: FnMut(&[f64]) -> Result<Vec<f64>>,
    {
        let images = self
            .points
            .iter()
            .map(|p| f(p))
            .collect::<Result<Vec<_>>>()?;
        merge_atoms(target, images, &self.weights, self.total_mass)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

impl MetricMeasure for WeightedCloud {
    fn len(&self) -> usize {
        self.points.len()
    }

    fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn total_mass(&self) -> f64 {
        self.total_mass
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        match self.target {
            Target::RealLine => (self.points[i][0] - self.points[j][0]).abs(),
            Target::CoordinateSpace { r, .. } => {
                lr_dist_slices(&self.points[i], &self.points[j], r)
            }
        }
    }

    fn line_coords(&self) -> Option<Vec<f64>> {
        match self.target.dim() {
            1 => Some(self.points.iter().map(|p| p[0]).collect()),
            _ => None,
        }
    }
}

/// Collects images into atoms, merging coincident ones in first-seen order.
/// `total_mass` is carried over from the source measure unchanged.
fn merge_atoms(
    target: Target,
    images: Vec<Vec<f64>>,
    weights: &[f64],
    total_mass: f64,
) -> Result<WeightedCloud> {
    let dim = target.dim();
    let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut points: Vec<Vec<f64>> = Vec::new();
    let mut merged: Vec<f64> = Vec::new();
    for (img, &w) in images.into_iter().zip(weights) {
        if img.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: img.len(),
            });
        }
        if img.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("map produced a non-finite coordinate"));
        }
        // +0.0 and -0.0 are the same point
        let key: Vec<u64> = img.iter().map(|v| (v + 0.0).to_bits()).collect();
        match index.get(&key) {
            Some(&a) => merged[a] += w,
            None => {
                index.insert(key, points.len());
                points.push(img);
                merged.push(w);
            }
        }
    }
    let mut cloud = WeightedCloud::new(target, points, merged)?;
    cloud.total_mass = total_mass;
    Ok(cloud)
}

/// `f_*(μ_X)`: transports the weight of every point of `X` to its image.
///
/// Coincident images are merged into one atom; the total mass of `X` is kept
/// exactly.
pub fn pushforward<F>(x: &FiniteMMSpace, target: Target, f: F) -> Result<WeightedCloud>
where
    F: Fn(usize) -> Vec<f64>,
{
    let images = (0..x.n()).map(f).collect();
    merge_atoms(target, images, x.weights(), x.total_mass())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point() -> FiniteMMSpace {
        FiniteMMSpace::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn identity_embedding_keeps_atoms() {
        let vals = [0.0, 1.5, 4.0];
        let pts: Vec<LpVector> = vals.iter().map(|v| vec![*v].into()).collect();
        let x = FiniteMMSpace::from_points(&pts, vec![0.2, 0.3, 0.5], Exponent::ONE).unwrap();
        let c = pushforward(&x, Target::RealLine, |i| vec![vals[i]]).unwrap();
        assert_eq!(c.points(), &[vec![0.0], vec![1.5], vec![4.0]]);
        assert_eq!(c.weights(), x.weights());
        assert_eq!(c.total_mass(), x.total_mass());
    }

    #[test]
    fn constant_map_single_atom() {
        let x = FiniteMMSpace::from_points(
            &[vec![0.0].into(), vec![1.0].into(), vec![2.0].into()],
            vec![0.1, 0.7, 0.2],
            Exponent::ONE,
        )
        .unwrap();
        let c = pushforward(&x, Target::RealLine, |_| vec![3.0]).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.total_mass(), x.total_mass());
        assert!((c.weights()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_point_transport() {
        let c = pushforward(&two_point(), Target::RealLine, |i| vec![i as f64]).unwrap();
        assert_eq!(c.points(), &[vec![0.0], vec![1.0]]);
        assert_eq!(c.weights(), &[0.5, 0.5]);
    }

    #[test]
    fn dimension_mismatch() {
        let r = pushforward(&two_point(), Target::RealLine, |_| vec![0.0, 1.0]);
        assert!(matches!(
            r,
            Err(Error::DimensionMismatch {
                expected: 1,
                found: 2
            })
        ));
    }

    #[test]
    fn json_with_target_tag() {
        let c = WeightedCloud::coordinate(
            Exponent::INF,
            vec![vec![0.0, 1.0].into(), vec![2.0, 0.5].into()],
            vec![0.25, 0.75],
        )
        .unwrap();
        let s = c.to_json_string().unwrap();
        assert!(s.contains(r#""kind":"coordinate-space""#), "{s}");
        assert!(s.contains(r#""r":"inf""#), "{s}");
        assert_eq!(WeightedCloud::from_json_str(&s).unwrap(), c);

        let line = r#"{"target":{"kind":"real-line"},"points":[[1.0],[2.0]],"weights":[1,1]}"#;
        let c = WeightedCloud::from_json_str(line).unwrap();
        assert_eq!(c.total_mass(), 2.0);
        let bad = r#"{"target":{"kind":"real-line"},"points":[[1.0,2.0]],"weights":[1]}"#;
        assert!(WeightedCloud::from_json_str(bad).is_err());
        let bad_mass =
            r#"{"target":{"kind":"real-line"},"points":[[1.0]],"weights":[1],"total_mass":3}"#;
        assert!(WeightedCloud::from_json_str(bad_mass).is_err());
    }

    #[test]
    fn cloud_metric() {
        let c = WeightedCloud::coordinate(
            Exponent::TWO,
            vec![vec![0.0, 0.0].into(), vec![3.0, 4.0].into()],
            vec![1.0, 1.0],
        )
        .unwrap();
        assert_eq!(c.dist(0, 1), 5.0);
        assert_eq!(c.to_mmspace().dist(1, 0), 5.0);
        assert!(c.line_coords().is_none());
    }
}
