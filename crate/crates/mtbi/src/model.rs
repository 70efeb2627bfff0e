//! Model data types, standing-assumption validation, and generating-function
//! evaluation.
//!
//! A model is the factored q-matrix of an n-type branching process with
//! immigration: one immigration family `a`, one resurrection family `h`
//! governing jumps out of the empty state, and one branch family per type.
//! Validation checks the rate constraints, nonsingularity (some split must
//! change the particle count), and positive regularity of the mean-offspring
//! type graph, then caches the mean matrix and its dominant eigenvalue.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::index::MultiIndex;
use crate::num::eigen;
use crate::rates::{RateDistribution, RateKind};

/// How the empty state behaves.
#[derive(Debug, Clone, PartialEq)]
pub enum Resurrection {
    /// Jumps out of 0 occur at the immigration rates (h = a).
    SameAsImmigration,
    /// 0 is absorbing (h identically zero).
    Absorbing,
    /// Explicit resurrection family.
    Rates(RateDistribution),
}

/// The raw, unvalidated model description.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    n: usize,
    immigration: RateDistribution,
    resurrection: Resurrection,
    branch: Vec<RateDistribution>,
}

impl ModelSpec {
    pub fn new(
        n: usize,
        immigration: RateDistribution,
        resurrection: Resurrection,
        branch: Vec<RateDistribution>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::DimensionMismatch("n must be >= 1".into()));
        }
        if branch.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "expected {n} branch distributions, got {}",
                branch.len()
            )));
        }
        if immigration.kind() != RateKind::Immigration {
            return Err(Error::DimensionMismatch(
                "immigration distribution has the wrong kind".into(),
            ));
        }
        for (k, b) in branch.iter().enumerate() {
            if b.kind() != RateKind::Branch(k) {
                return Err(Error::DimensionMismatch(format!(
                    "branch distribution {} has the wrong kind",
                    k + 1
                )));
            }
        }
        if let Resurrection::Rates(h) = &resurrection {
            if h.kind() != RateKind::Resurrection {
                return Err(Error::DimensionMismatch(
                    "resurrection distribution has the wrong kind".into(),
                ));
            }
        }
        let spec = Self {
            n,
            immigration,
            resurrection,
            branch,
        };
        spec.check_dims()?;
        Ok(spec)
    }

    fn check_dims(&self) -> Result<()> {
        let check = |d: &RateDistribution| -> Result<()> {
            for (j, _) in d.entries() {
                if j.dim() != self.n {
                    return Err(Error::DimensionMismatch(format!(
                        "index {} has dimension {}, model has {}",
                        j,
                        j.dim(),
                        self.n
                    )));
                }
            }
            Ok(())
        };
        check(&self.immigration)?;
        if let Resurrection::Rates(h) = &self.resurrection {
            check(h)?;
        }
        for b in &self.branch {
            check(b)?;
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn immigration(&self) -> &RateDistribution {
        &self.immigration
    }

    pub fn resurrection(&self) -> &Resurrection {
        &self.resurrection
    }

    pub fn branch(&self) -> &[RateDistribution] {
        &self.branch
    }
}

/// Which generating function to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenFn {
    /// Immigration.
    A,
    /// Resurrection (identically zero in the absorbing encoding).
    H,
    /// Branch law of the given 0-based type.
    B(usize),
}

/// A model that passed validation, with derived quantities cached.
#[derive(Debug, Clone)]
pub struct ValidatedModel {
    spec: ModelSpec,
    mean_matrix: DMatrix<f64>,
    perron_at_one: f64,
    positively_regular: bool,
    nonsingular: bool,
}

/// Checks the standing assumptions and fills in the derived fields.
pub fn validate(spec: ModelSpec) -> Result<ValidatedModel> {
    let n = spec.n;

    // Nonsingular: some branch law must have an offspring vector of size != 1.
    let nonsingular = spec
        .branch
        .iter()
        .any(|b| b.entries().any(|(j, _)| j.total() != 1));
    if !nonsingular {
        return Err(Error::Singular);
    }

    // Mean matrix B_ij(1) and positive regularity of the sign pattern.
    let ones = vec![1.0; n];
    let mut mean = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            mean[(i, j)] = spec.branch[i].gf_partial(&ones, j);
        }
    }
    // G(1) has entries delta_ij + B_ij(1)/exit_i >= 0; its positivity
    // pattern is what matters.
    let mut pattern = vec![vec![false; n]; n];
    for i in 0..n {
        let exit = spec.branch[i].exit_rate();
        for j in 0..n {
            let g = if i == j {
                1.0 + mean[(i, j)] / exit
            } else {
                mean[(i, j)] / exit
            };
            pattern[i][j] = g > 0.0;
        }
    }
    let positively_regular = sign_pattern_primitive(&pattern);
    if !positively_regular {
        return Err(Error::NotPositivelyRegular);
    }

    let perron_at_one = eigen::dominant_eigenvalue(&mean);

    Ok(ValidatedModel {
        spec,
        mean_matrix: mean,
        perron_at_one,
        positively_regular,
        nonsingular,
    })
}

/// Boolean primitivity check: some power up to n^2 of the pattern is all
/// true. Small n makes the crude power loop fine.
fn sign_pattern_primitive(pattern: &[Vec<bool>]) -> bool {
    let n = pattern.len();
    let mut power = pattern.to_vec();
    for _ in 0..n * n {
        if power.iter().all(|row| row.iter().all(|&x| x)) {
            return true;
        }
        let mut next = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                next[i][j] = (0..n).any(|k| power[i][k] && pattern[k][j]);
            }
        }
        power = next;
    }
    power.iter().all(|row| row.iter().all(|&x| x))
}

impl ValidatedModel {
    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn immigration(&self) -> &RateDistribution {
        &self.spec.immigration
    }

    pub fn branch(&self) -> &[RateDistribution] {
        &self.spec.branch
    }

    pub fn resurrection(&self) -> &Resurrection {
        &self.spec.resurrection
    }

    /// Effective resurrection family; `None` in the absorbing encoding.
    pub fn resurrection_rates(&self) -> Option<&RateDistribution> {
        match &self.spec.resurrection {
            Resurrection::SameAsImmigration => Some(&self.spec.immigration),
            Resurrection::Absorbing => None,
            Resurrection::Rates(h) => Some(h),
        }
    }

    pub fn is_absorbing(&self) -> bool {
        matches!(self.spec.resurrection, Resurrection::Absorbing)
    }

    /// True when resurrection is declared identical to immigration.
    pub fn resurrection_equals_immigration(&self) -> bool {
        matches!(self.spec.resurrection, Resurrection::SameAsImmigration)
    }

    pub fn mean_matrix(&self) -> &DMatrix<f64> {
        &self.mean_matrix
    }

    /// rho(1,...,1): maximal real eigenvalue of the mean matrix.
    pub fn perron_at_one(&self) -> f64 {
        self.perron_at_one
    }

    pub fn positively_regular(&self) -> bool {
        self.positively_regular
    }

    pub fn nonsingular(&self) -> bool {
        self.nonsingular
    }

    /// All three families conservative (simulator requirement).
    pub fn fully_conservative(&self) -> bool {
        self.spec.immigration.conservative()
            && self.spec.branch.iter().all(RateDistribution::conservative)
            && match &self.spec.resurrection {
                Resurrection::SameAsImmigration => true,
                Resurrection::Absorbing => true,
                Resurrection::Rates(h) => h.conservative(),
            }
    }

    fn domain_check(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.spec.n {
            return Err(Error::DimensionMismatch(format!(
                "point has dimension {}, model has {}",
                u.len(),
                self.spec.n
            )));
        }
        if u.iter().any(|&x| !(-1.0..=1.0).contains(&x) || !x.is_finite()) {
            return Err(Error::OutOfDomain(u.to_vec()));
        }
        Ok(())
    }

    /// Evaluates a generating function at `u` in [-1, 1]^n.
    pub fn eval_gf(&self, which: GenFn, u: &[f64]) -> Result<f64> {
        self.domain_check(u)?;
        Ok(self.gf_unchecked(which, u))
    }

    /// Same as [`eval_gf`](Self::eval_gf) without the domain check, for the
    /// inner loops that guarantee their arguments.
    pub fn gf_unchecked(&self, which: GenFn, u: &[f64]) -> f64 {
        match which {
            GenFn::A => self.spec.immigration.gf(u),
            GenFn::H => match self.resurrection_rates() {
                Some(h) => h.gf(u),
                None => 0.0,
            },
            GenFn::B(k) => self.spec.branch[k].gf(u),
        }
    }

    /// Partial derivative of a generating function in coordinate `j`.
    pub fn gf_partial(&self, which: GenFn, u: &[f64], j: usize) -> f64 {
        match which {
            GenFn::A => self.spec.immigration.gf_partial(u, j),
            GenFn::H => match self.resurrection_rates() {
                Some(h) => h.gf_partial(u, j),
                None => 0.0,
            },
            GenFn::B(k) => self.spec.branch[k].gf_partial(u, j),
        }
    }

    /// Jacobian matrix B_ij(u) of exact term-by-term partial derivatives.
    pub fn jacobian(&self, u: &[f64]) -> Result<DMatrix<f64>> {
        self.domain_check(u)?;
        Ok(self.jacobian_unchecked(u))
    }

    pub fn jacobian_unchecked(&self, u: &[f64]) -> DMatrix<f64> {
        let n = self.spec.n;
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.spec.branch[i].gf_partial(u, j);
            }
        }
        m
    }

    /// rho(u): maximal real eigenvalue of the Jacobian at `u`.
    pub fn perron_root(&self, u: &[f64]) -> Result<f64> {
        self.domain_check(u)?;
        Ok(eigen::dominant_eigenvalue(&self.jacobian_unchecked(u)))
    }

    /// Dominant eigenpair of the Jacobian at `u` (value, nonnegative vector).
    pub fn perron_pair(&self, u: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.domain_check(u)?;
        Ok(eigen::dominant_eigenpair(&self.jacobian_unchecked(u)))
    }

    /// Companion model with resurrection stripped (0 made absorbing).
    pub fn absorptive_companion(&self) -> ValidatedModel {
        let mut out = self.clone();
        out.spec.resurrection = Resurrection::Absorbing;
        out
    }

    /// Companion with extra exit rate `eps` added to every branch diagonal
    /// (per-particle killing); used by the decay perturbation argument.
    pub fn with_branch_killing(&self, eps: f64) -> Result<ValidatedModel> {
        let branch = self
            .spec
            .branch
            .iter()
            .map(|b| b.with_extra_exit(eps))
            .collect();
        let spec = ModelSpec::new(
            self.spec.n,
            self.spec.immigration.clone(),
            self.spec.resurrection.clone(),
            branch,
        )?;
        validate(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn m1_validates_with_hand_derivatives() {
        // B(u) = 2 - 3u + u^2, so B'(1) = -1; conservative throughout.
        let m = fixtures::m1();
        assert!(m.fully_conservative());
        assert_eq!(m.mean_matrix()[(0, 0)], -1.0);
        assert_eq!(m.perron_at_one(), -1.0);
        assert!(m.positively_regular());
    }

    #[test]
    fn singular_model_rejected() {
        // Every split yields exactly one particle.
        let b = RateDistribution::new(
            RateKind::Branch(0),
            1,
            vec![(MultiIndex::new(vec![1]).unwrap(), 1.0)],
            None,
        );
        // The lone entry sits on the diagonal index e_1, so construction
        // already refuses it; a two-type shuffle shows the Singular error.
        assert!(b.is_err());

        let b1 = RateDistribution::new(
            RateKind::Branch(0),
            2,
            vec![(MultiIndex::new(vec![0, 1]).unwrap(), 1.0)],
            None,
        )
        .unwrap();
        let b2 = RateDistribution::new(
            RateKind::Branch(1),
            2,
            vec![(MultiIndex::new(vec![1, 0]).unwrap(), 1.0)],
            None,
        )
        .unwrap();
        let a = RateDistribution::new(
            RateKind::Immigration,
            2,
            vec![(MultiIndex::new(vec![1, 0]).unwrap(), 1.0)],
            None,
        )
        .unwrap();
        let spec = ModelSpec::new(2, a, Resurrection::SameAsImmigration, vec![b1, b2]).unwrap();
        assert!(matches!(validate(spec), Err(Error::Singular)));
    }

    #[test]
    fn m3_mean_matrix_and_regularity() {
        // B_1 = 0.8 - 2u_1 + 1.2 u_2^2: partials at (1,1) are (-2, 2.4).
        let m = fixtures::m3();
        let mm = m.mean_matrix();
        assert!((mm[(0, 0)] + 2.0).abs() < 1e-12);
        assert!((mm[(0, 1)] - 2.4).abs() < 1e-12);
        assert!((mm[(1, 0)] - 2.4).abs() < 1e-12);
        assert!((mm[(1, 1)] + 2.0).abs() < 1e-12);
        assert!(m.positively_regular());
        assert!((m.perron_at_one() - 0.4).abs() < 1e-11);
    }

    #[test]
    fn eval_gf_fixture_values() {
        let m1 = fixtures::m1();
        // Conservative branch law vanishes at 1; constant term at 0 is b_0.
        assert!(m1.eval_gf(GenFn::A, &[1.0]).unwrap().abs() < 1e-12);
        assert!((m1.eval_gf(GenFn::B(0), &[0.0]).unwrap() - 2.0).abs() < 1e-14);
        // M2: B(u) = 1 - 3u + 2u^2 vanishes at 0.5.
        let m2 = fixtures::m2();
        assert!(m2.eval_gf(GenFn::B(0), &[0.5]).unwrap().abs() < 1e-14);
    }

    #[test]
    fn jacobian_fixture_values() {
        let m1 = fixtures::m1();
        for u in [0.0, 0.4, 1.0] {
            let j = m1.jacobian(&[u]).unwrap();
            assert!((j[(0, 0)] - (2.0 * u - 3.0)).abs() < 1e-14);
        }
        let m3 = fixtures::m3();
        let j = m3.jacobian(&[1.0, 1.0]).unwrap();
        assert!((j[(0, 1)] - 2.4).abs() < 1e-14);
        // At 0 the Jacobian is the matrix of linear-term coefficients.
        let j0 = m3.jacobian(&[0.0, 0.0]).unwrap();
        assert!((j0[(0, 0)] + 2.0).abs() < 1e-14);
        assert!(j0[(0, 1)].abs() < 1e-14);
    }

    #[test]
    fn perron_root_fixture_values() {
        let m1 = fixtures::m1();
        assert!((m1.perron_root(&[1.0]).unwrap() + 1.0).abs() < 1e-11);
        let m2 = fixtures::m2();
        assert!((m2.perron_root(&[1.0]).unwrap() - 1.0).abs() < 1e-11);
        let m3 = fixtures::m3();
        assert!((m3.perron_root(&[1.0, 1.0]).unwrap() - 0.4).abs() < 1e-11);
    }

    #[test]
    fn out_of_domain_rejected() {
        let m1 = fixtures::m1();
        assert!(matches!(
            m1.eval_gf(GenFn::B(0), &[1.5]),
            Err(Error::OutOfDomain(_))
        ));
        assert!(matches!(
            m1.eval_gf(GenFn::B(0), &[0.5, 0.5]),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
