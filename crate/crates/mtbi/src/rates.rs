//! Sparse rate families and their generating functions.
//!
//! Each of the three rate families (immigration, resurrection, per-type
//! branching) is a finite set of positive off-diagonal rates plus a total
//! exit rate. The exit rate is at least the sum of the entries; equality is
//! the conservative case, a strict surplus encodes killing.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::index::MultiIndex;

/// Which family a distribution belongs to. Determines the diagonal index:
/// the origin for immigration/resurrection, e_k for the type-k branch law.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateKind {
    Immigration,
    Resurrection,
    /// 0-based type index.
    Branch(usize),
}

impl RateKind {
    fn label(self) -> String {
        match self {
            RateKind::Immigration => "immigration".into(),
            RateKind::Resurrection => "resurrection".into(),
            RateKind::Branch(k) => format!("branch({})", k + 1),
        }
    }

    /// The index that carries the negative diagonal entry.
    pub fn diagonal_index(self, n: usize) -> MultiIndex {
        match self {
            RateKind::Immigration | RateKind::Resurrection => MultiIndex::zero(n),
            RateKind::Branch(k) => MultiIndex::unit(n, k),
        }
    }
}

/// One sparse rate family: positive entries indexed by Z_+^n, plus the exit
/// rate (the negated diagonal of the q-matrix block it generates).
#[derive(Debug, Clone, PartialEq)]
pub struct RateDistribution {
    kind: RateKind,
    entries: BTreeMap<MultiIndex, f64>,
    exit_rate: f64,
    conservative: bool,
}

/// Entries may undershoot the exit rate, but a relative overshoot beyond
/// this is a hard error rather than rounding.
const CONSERVATION_SLACK: f64 = 1e-9;

impl RateDistribution {
    /// Builds and validates a family. `exit_rate = None` sets the diagonal
    /// to minus the entry sum (conservative by construction).
    pub fn new(
        kind: RateKind,
        n: usize,
        entries: Vec<(MultiIndex, f64)>,
        exit_rate: Option<f64>,
    ) -> Result<Self> {
        let diag = kind.diagonal_index(n);
        let mut map = BTreeMap::new();
        for (index, rate) in entries {
            if index.dim() != n {
                return Err(Error::DimensionMismatch(format!(
                    "{} entry {} has dimension {}, model has {}",
                    kind.label(),
                    index,
                    index.dim(),
                    n
                )));
            }
            if !(rate > 0.0) || !rate.is_finite() {
                return Err(Error::NegativeRate {
                    index: index.to_string(),
                    rate,
                });
            }
            if index == diag {
                return Err(Error::DimensionMismatch(format!(
                    "{} must not carry an off-diagonal entry at its diagonal index {}",
                    kind.label(),
                    diag
                )));
            }
            *map.entry(index).or_insert(0.0) += rate;
        }
        let sum: f64 = map.values().sum();
        if !(sum > 0.0) {
            return Err(Error::DimensionMismatch(format!(
                "{} needs at least one positive rate",
                kind.label()
            )));
        }
        let exit = exit_rate.unwrap_or(sum);
        if !exit.is_finite() || exit <= 0.0 {
            return Err(Error::NegativeRate {
                index: diag.to_string(),
                rate: -exit,
            });
        }
        if sum > exit * (1.0 + CONSERVATION_SLACK) {
            return Err(Error::DiagonalMismatch {
                kind: kind.label(),
                sum,
                exit,
            });
        }
        let conservative = (sum - exit).abs() <= exit * CONSERVATION_SLACK;
        Ok(Self {
            kind,
            entries: map,
            exit_rate: exit,
            conservative,
        })
    }

    pub fn kind(&self) -> RateKind {
        self.kind
    }

    /// Off-diagonal support with rates, in index order.
    pub fn entries(&self) -> impl Iterator<Item = (&MultiIndex, f64)> {
        self.entries.iter().map(|(i, &r)| (i, r))
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    /// Total off-diagonal rate.
    pub fn total_rate(&self) -> f64 {
        self.entries.values().sum()
    }

    /// The positive exit rate; the q-matrix diagonal entry is its negation.
    pub fn exit_rate(&self) -> f64 {
        self.exit_rate
    }

    /// True when the entries sum to the exit rate.
    pub fn conservative(&self) -> bool {
        self.conservative
    }

    /// Largest |j| in the support.
    pub fn max_degree(&self) -> u64 {
        self.entries.keys().map(MultiIndex::total).max().unwrap_or(0)
    }

    /// Generating function: sum of rate * u^j minus exit * u^{diag index}.
    pub fn gf(&self, u: &[f64]) -> f64 {
        let diag = self.kind.diagonal_index(u.len());
        let mut acc = -self.exit_rate * diag.monomial(u);
        for (j, r) in self.entries() {
            acc += r * j.monomial(u);
        }
        acc
    }

    /// Exact partial derivative of the generating function in coordinate k.
    pub fn gf_partial(&self, u: &[f64], k: usize) -> f64 {
        let diag = self.kind.diagonal_index(u.len());
        let mut acc = -self.exit_rate * monomial_partial(&diag, u, k);
        for (j, r) in self.entries() {
            acc += r * monomial_partial(j, u, k);
        }
        acc
    }

    /// Exact second partial in coordinates (k, l).
    pub fn gf_second_partial(&self, u: &[f64], k: usize, l: usize) -> f64 {
        let diag = self.kind.diagonal_index(u.len());
        let mut acc = -self.exit_rate * monomial_second_partial(&diag, u, k, l);
        for (j, r) in self.entries() {
            acc += r * monomial_second_partial(j, u, k, l);
        }
        acc
    }

    /// A copy with the exit rate increased by `eps` (adds killing).
    pub fn with_extra_exit(&self, eps: f64) -> Self {
        let mut out = self.clone();
        out.exit_rate += eps;
        out.conservative = false;
        out
    }
}

fn monomial_partial(j: &MultiIndex, u: &[f64], k: usize) -> f64 {
    let p = j.get(k);
    if p == 0 {
        return 0.0;
    }
    let mut acc = f64::from(p) * u[k].powi(p as i32 - 1);
    for (m, &x) in u.iter().enumerate() {
        if m != k {
            acc *= x.powi(j.get(m) as i32);
        }
    }
    acc
}

fn monomial_second_partial(j: &MultiIndex, u: &[f64], k: usize, l: usize) -> f64 {
    if k == l {
        let p = j.get(k);
        if p < 2 {
            return 0.0;
        }
        let mut acc = f64::from(p) * f64::from(p - 1) * u[k].powi(p as i32 - 2);
        for (m, &x) in u.iter().enumerate() {
            if m != k {
                acc *= x.powi(j.get(m) as i32);
            }
        }
        acc
    } else {
        let (pk, pl) = (j.get(k), j.get(l));
        if pk == 0 || pl == 0 {
            return 0.0;
        }
        let mut acc =
            f64::from(pk) * f64::from(pl) * u[k].powi(pk as i32 - 1) * u[l].powi(pl as i32 - 1);
        for (m, &x) in u.iter().enumerate() {
            if m != k && m != l {
                acc *= x.powi(j.get(m) as i32);
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(c: &[u32]) -> MultiIndex {
        MultiIndex::new(c.to_vec()).unwrap()
    }

    // The type-1 branch law of fixture M1: B(u) = 2 - 3u + u^2.
    fn m1_branch() -> RateDistribution {
        RateDistribution::new(
            RateKind::Branch(0),
            1,
            vec![(idx(&[0]), 2.0), (idx(&[2]), 1.0)],
            None,
        )
        .unwrap()
    }

    #[test]
    fn conservative_by_default() {
        let b = m1_branch();
        assert!(b.conservative());
        assert_eq!(b.exit_rate(), 3.0);
        assert!(b.gf(&[1.0]).abs() < 1e-15);
    }

    #[test]
    fn gf_matches_polynomial() {
        let b = m1_branch();
        for u in [0.0, 0.3, 0.5, 1.0] {
            let expect = 2.0 - 3.0 * u + u * u;
            assert!((b.gf(&[u]) - expect).abs() < 1e-14);
        }
        // derivative 2u - 3
        assert!((b.gf_partial(&[0.25], 0) - (2.0 * 0.25 - 3.0)).abs() < 1e-14);
        // second derivative 2
        assert!((b.gf_second_partial(&[0.9], 0, 0) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_rates() {
        assert!(matches!(
            RateDistribution::new(RateKind::Immigration, 1, vec![(idx(&[1]), -1.0)], None),
            Err(Error::NegativeRate { .. })
        ));
        // entry on the diagonal index
        assert!(RateDistribution::new(
            RateKind::Branch(0),
            1,
            vec![(idx(&[1]), 1.0), (idx(&[0]), 1.0)],
            None
        )
        .is_err());
        // sum exceeding the exit rate
        assert!(matches!(
            RateDistribution::new(RateKind::Immigration, 1, vec![(idx(&[1]), 2.0)], Some(1.0)),
            Err(Error::DiagonalMismatch { .. })
        ));
    }

    #[test]
    fn killing_variant_is_not_conservative() {
        let b = m1_branch().with_extra_exit(0.1);
        assert!(!b.conservative());
        assert!((b.gf(&[1.0]) + 0.1).abs() < 1e-14);
    }
}
