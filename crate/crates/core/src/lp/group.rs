//! The hyperoctahedral group `{±1}^k ⋊ S_k` of signed coordinate permutations.
//!
//! An element is a pair `(signs, σ)`. It acts on `R^k` by
//! `(g·x)_n = signs_n · x_{σ^{-1}(n)}`, i.e. coordinate `i` of `x` is moved to
//! position `σ(i)` and then multiplied by the sign attached to that position.
//! Every such map is an isometry of every l^r distance.

use serde::{Deserialize, Serialize};

use super::LpVector;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedPermutation {
    /// `signs[n]` multiplies output position `n`.
    signs: Vec<i8>,
    /// `perm[i] = σ(i)`, zero-based.
    perm: Vec<usize>,
}

impl SignedPermutation {
    pub fn new(signs: Vec<i8>, perm: Vec<usize>) -> Result<Self> {
        if signs.len() != perm.len() {
            return Err(Error::DimensionMismatch {
                expected: perm.len(),
                found: signs.len(),
            });
        }
        if let Some(s) = signs.iter().find(|s| **s != 1 && **s != -1) {
            return Err(Error::invalid(format!("sign entries must be ±1, got {s}")));
        }
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || seen[p] {
                return Err(Error::invalid(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        Ok(SignedPermutation { signs, perm })
    }

    pub fn identity(k: usize) -> Self {
        SignedPermutation {
            signs: vec![1; k],
            perm: (0..k).collect(),
        }
    }

    /// Builds `g` from the inverse permutation: `source[n] = σ^{-1}(n)`.
    pub(crate) fn from_sources(signs: Vec<i8>, source: &[usize]) -> Self {
        let mut perm = vec![0; source.len()];
        for (n, &i) in source.iter().enumerate() {
            perm[i] = n;
        }
        SignedPermutation { signs, perm }
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.perm.len()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    fn perm_inverse(&self) -> Vec<usize> {
        let mut inv = vec![0; self.k()];
        for (i, &p) in self.perm.iter().enumerate() {
            inv[p] = i;
        }
        inv
    }

    fn check_k(&self, found: usize) -> Result<()> {
        if found != self.k() {
            return Err(Error::DimensionMismatch {
                expected: self.k(),
                found,
            });
        }
        Ok(())
    }

    /// `(g·x)_n = signs_n · x_{σ^{-1}(n)}`.
    pub fn apply(&self, x: &LpVector) -> Result<LpVector> {
        self.check_k(x.len())?;
        let mut y = vec![0.0; self.k()];
        for (i, &v) in x.coords().iter().enumerate() {
            let n = self.perm[i];
            y[n] = f64::from(self.signs[n]) * v;
        }
        Ok(LpVector(y))
    }

    /// Group product `g·g' = ((signs_n · signs'_{σ^{-1}(n)})_n, σ∘σ')`.
    pub fn compose(&self, other: &SignedPermutation) -> Result<SignedPermutation> {
        self.check_k(other.k())?;
        let inv = self.perm_inverse();
        let signs = (0..self.k())
            .map(|n| self.signs[n] * other.signs[inv[n]])
            .collect();
        let perm = other.perm.iter().map(|&j| self.perm[j]).collect();
        Ok(SignedPermutation { signs, perm })
    }

    /// `g^{-1} = ((signs_{σ(n)})_n, σ^{-1})`.
    pub fn inverse(&self) -> SignedPermutation {
        let signs = self.perm.iter().map(|&p| self.signs[p]).collect();
        SignedPermutation {
            signs,
            perm: self.perm_inverse(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.signs.iter().all(|s| *s == 1) && self.perm.iter().enumerate().all(|(i, p)| i == *p)
    }
}

/// Free-function forms of the group operations.
pub fn group_apply(g: &SignedPermutation, x: &LpVector) -> Result<LpVector> {
    g.apply(x)
}

pub fn group_compose(g: &SignedPermutation, h: &SignedPermutation) -> Result<SignedPermutation> {
    g.compose(h)
}

pub fn group_inverse(g: &SignedPermutation) -> SignedPermutation {
    g.inverse()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn swap_flip() -> SignedPermutation {
        SignedPermutation::new(vec![-1, 1], vec![1, 0]).unwrap()
    }

    #[test]
    fn identity_fixes_vectors() {
        let x: LpVector = vec![0.3, -1.5, 2.0].into();
        assert_eq!(SignedPermutation::identity(3).apply(&x).unwrap(), x);
    }

    #[test]
    fn swap_with_sign() {
        let y = swap_flip().apply(&vec![0.7, 0.2].into()).unwrap();
        assert_eq!(y.coords(), &[-0.2, 0.7]);
    }

    #[test]
    fn inverse_is_two_sided() {
        let g = swap_flip();
        let gi = g.inverse();
        assert!(g.compose(&gi).unwrap().is_identity());
        assert!(gi.compose(&g).unwrap().is_identity());
        // g has order 4 here: applying it twice negates.
        let gg = g.compose(&g).unwrap();
        assert_eq!(
            gg.apply(&vec![1.0, 2.0].into()).unwrap().coords(),
            &[-1.0, -2.0]
        );
    }

    #[test]
    fn compose_with_identity() {
        let g = swap_flip();
        assert_eq!(g.compose(&SignedPermutation::identity(2)).unwrap(), g);
        assert_eq!(SignedPermutation::identity(2).compose(&g).unwrap(), g);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SignedPermutation::new(vec![1, 0], vec![0, 1]).is_err());
        assert!(SignedPermutation::new(vec![1, 1], vec![0, 0]).is_err());
        assert!(SignedPermutation::new(vec![1], vec![0, 1]).is_err());
        assert!(swap_flip().apply(&vec![1.0].into()).is_err());
        assert!(swap_flip()
            .compose(&SignedPermutation::identity(3))
            .is_err());
    }
}
