//! Lattice points of Z_+^n: states, offspring vectors, arrival batches.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of Z_+^n. Doubles as a CTMC state and as the index of a rate
/// entry (offspring vector, arrival batch, resurrection target).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    /// Builds an index from coordinates. Must be non-empty.
    pub fn new(coords: Vec<u32>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::DimensionMismatch("index must have n >= 1".into()));
        }
        Ok(Self(coords))
    }

    /// The origin of Z_+^n.
    pub fn zero(n: usize) -> Self {
        Self(vec![0; n])
    }

    /// The unit vector e_k (0-based k).
    pub fn unit(n: usize, k: usize) -> Self {
        let mut c = vec![0; n];
        c[k] = 1;
        Self(c)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, k: usize) -> u32 {
        self.0[k]
    }

    /// |i| = sum of coordinates.
    pub fn total(&self) -> u64 {
        self.0.iter().map(|&c| u64::from(c)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Coordinatewise i <= j.
    pub fn le(&self, other: &Self) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Coordinatewise sum.
    pub fn plus(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Coordinatewise difference, `None` when it would leave Z_+^n.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        if other.le(self) {
            Some(Self(
                self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
            ))
        } else {
            None
        }
    }

    /// The monomial u^i = prod_k u_k^{i_k}.
    pub fn monomial(&self, u: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(u)
            .map(|(&p, &x)| x.powi(p as i32))
            .product()
    }

    /// Parses `"1,0,2"` into an index.
    pub fn parse(s: &str) -> Result<Self> {
        let coords = s
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<u32>()
                    .map_err(|e| Error::ModelFile(format!("bad state component {part:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(coords)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_and_monomial() {
        let i = MultiIndex::new(vec![1, 2]).unwrap();
        assert_eq!(i.total(), 3);
        let u = [0.5, 2.0];
        assert!((i.monomial(&u) - 0.5 * 4.0).abs() < 1e-15);
    }

    #[test]
    fn zero_monomial_is_one() {
        let z = MultiIndex::zero(3);
        assert_eq!(z.monomial(&[0.3, 0.7, 0.1]), 1.0);
    }

    #[test]
    fn parse_roundtrip() {
        let i = MultiIndex::parse("3, 0,7").unwrap();
        assert_eq!(i.coords(), &[3, 0, 7]);
        assert_eq!(i.to_string(), "3,0,7");
        assert!(MultiIndex::parse("").is_err());
        assert!(MultiIndex::parse("1,-2").is_err());
    }

    #[test]
    fn checked_sub_guards_lattice() {
        let a = MultiIndex::new(vec![2, 1]).unwrap();
        let b = MultiIndex::new(vec![1, 1]).unwrap();
        assert_eq!(a.checked_sub(&b).unwrap().coords(), &[1, 0]);
        assert!(b.checked_sub(&a).is_none());
    }
}
