use serde::{Deserialize, Serialize};

use super::Exponent;

/// A finitely supported real sequence.
///
/// `R^k` is identified with the sequences whose coordinates vanish past
/// index `k`, so vectors of different lengths compare as if the shorter one
/// were padded with zeros.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LpVector(pub Vec<f64>);

impl LpVector {
    pub fn new(coords: Vec<f64>) -> Self {
        LpVector(coords)
    }

    pub fn zeros(len: usize) -> Self {
        LpVector(vec![0.0; len])
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// Coordinate `i`, zero past the stored length.
    #[inline]
    pub fn at(&self, i: usize) -> f64 {
        self.0.get(i).copied().unwrap_or(0.0)
    }

    pub fn norm(&self, r: Exponent) -> f64 {
        lr_norm(self.0.iter().copied(), r)
    }

    pub fn nonzero_count(&self) -> usize {
        self.0.iter().filter(|v| **v != 0.0).count()
    }

    pub fn scaled(&self, s: f64) -> LpVector {
        LpVector(self.0.iter().map(|v| v * s).collect())
    }

    pub fn neg(&self) -> LpVector {
        LpVector(self.0.iter().map(|v| -v).collect())
    }
}

impl From<Vec<f64>> for LpVector {
    fn from(v: Vec<f64>) -> Self {
        LpVector(v)
    }
}

/// l^r norm of a sequence of coordinates.
pub fn lr_norm(values: impl Iterator<Item = f64>, r: Exponent) -> f64 {
    let r = r.get();
    if r.is_infinite() {
        values.fold(0.0, |m, v| m.max(v.abs()))
    } else if r == 1.0 {
        values.map(f64::abs).sum()
    } else if r == 2.0 {
        values.map(|v| v * v).sum::<f64>().sqrt()
    } else {
        // factor out the largest magnitude so 1-sparse vectors come out exact
        let v: Vec<f64> = values.map(f64::abs).collect();
        let top = v.iter().copied().fold(0.0, f64::max);
        if top == 0.0 || !top.is_finite() {
            return top;
        }
        top * v
            .iter()
            .map(|a| (a / top).powf(r))
            .sum::<f64>()
            .powf(1.0 / r)
    }
}

/// l^r distance between two coordinate slices, padding the shorter with zeros.
pub fn lr_dist_slices(x: &[f64], y: &[f64], r: Exponent) -> f64 {
    let n = x.len().max(y.len());
    let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    lr_norm((0..n).map(|i| at(x, i) - at(y, i)), r)
}

/// The l^r distance `(sum |x_i - y_i|^r)^{1/r}`, or `max |x_i - y_i|` for `r = inf`.
pub fn lq_dist(x: &LpVector, y: &LpVector, r: Exponent) -> f64 {
    lr_dist_slices(&x.0, &y.0, r)
}
