//! Bundled closed-form fixtures used by the test suite, the CLI `fixtures`
//! subcommand, and the cross-validation harness.
//!
//! Derivations (all elementary):
//! - M1: B(u) = 2 - 3u + u^2 = (1-u)(2-u), A(u) = u - 1. Subcritical
//!   (B'(1) = -1), root q = 1, equilibrium generating function 1/(2-s).
//! - M2: B(u) = 1 - 3u + 2u^2 = (1-u)(1-2u), A(u) = u - 1. Supercritical
//!   (B'(1) = 1), root q = 1/2, decay parameter -A(1/2) = 1/2.
//! - M3: B_k(u) = 0.8 - 2u_k + 1.2 u_{3-k}^2 (symmetric two-type),
//!   A(u) = (u_1 + u_2)/2 - 1. Supercritical (rho(1) = 0.4), q = (2/3, 2/3),
//!   decay parameter 1/3.
//! - M4: B(u) = 1 - 2u + u^2 = (1-u)^2, A(u) = 3(u - 1). Critical
//!   (B'(1) = 0), q = 1, extinction integral J = 1/2.

use crate::index::MultiIndex;
use crate::model::{validate, ModelSpec, Resurrection, ValidatedModel};
use crate::rates::{RateDistribution, RateKind};

fn idx(coords: &[u32]) -> MultiIndex {
    MultiIndex::new(coords.to_vec()).expect("fixture index")
}

fn dist(kind: RateKind, n: usize, entries: &[(&[u32], f64)]) -> RateDistribution {
    RateDistribution::new(
        kind,
        n,
        entries.iter().map(|(c, r)| (idx(c), *r)).collect(),
        None,
    )
    .expect("fixture distribution")
}

/// Subcritical single-type model, resurrection equal to immigration.
pub fn m1_spec() -> ModelSpec {
    let b = dist(RateKind::Branch(0), 1, &[(&[0], 2.0), (&[2], 1.0)]);
    let a = dist(RateKind::Immigration, 1, &[(&[1], 1.0)]);
    ModelSpec::new(1, a, Resurrection::SameAsImmigration, vec![b]).expect("fixture M1")
}

pub fn m1() -> ValidatedModel {
    validate(m1_spec()).expect("fixture M1 validates")
}

/// Supercritical single-type model.
pub fn m2_spec() -> ModelSpec {
    let b = dist(RateKind::Branch(0), 1, &[(&[0], 1.0), (&[2], 2.0)]);
    let a = dist(RateKind::Immigration, 1, &[(&[1], 1.0)]);
    ModelSpec::new(1, a, Resurrection::SameAsImmigration, vec![b]).expect("fixture M2")
}

pub fn m2() -> ValidatedModel {
    validate(m2_spec()).expect("fixture M2 validates")
}

/// Symmetric supercritical two-type model.
pub fn m3_spec() -> ModelSpec {
    let b1 = dist(RateKind::Branch(0), 2, &[(&[0, 0], 0.8), (&[0, 2], 1.2)]);
    let b2 = dist(RateKind::Branch(1), 2, &[(&[0, 0], 0.8), (&[2, 0], 1.2)]);
    let a = dist(
        RateKind::Immigration,
        2,
        &[(&[1, 0], 0.5), (&[0, 1], 0.5)],
    );
    ModelSpec::new(2, a, Resurrection::SameAsImmigration, vec![b1, b2]).expect("fixture M3")
}

pub fn m3() -> ValidatedModel {
    validate(m3_spec()).expect("fixture M3 validates")
}

/// Critical single-type model with strong immigration.
pub fn m4_spec() -> ModelSpec {
    let b = dist(RateKind::Branch(0), 1, &[(&[0], 1.0), (&[2], 1.0)]);
    let a = dist(RateKind::Immigration, 1, &[(&[1], 3.0)]);
    ModelSpec::new(1, a, Resurrection::SameAsImmigration, vec![b]).expect("fixture M4")
}

pub fn m4() -> ValidatedModel {
    validate(m4_spec()).expect("fixture M4 validates")
}

/// M4 with the immigration rate replaced; used to probe the recurrence
/// boundary (rate 3 transient, rate 1/2 recurrent).
pub fn m4_with_immigration_rate(rate: f64) -> ValidatedModel {
    let b = dist(RateKind::Branch(0), 1, &[(&[0], 1.0), (&[2], 1.0)]);
    let a = RateDistribution::new(RateKind::Immigration, 1, vec![(idx(&[1]), rate)], None)
        .expect("immigration rate");
    let spec =
        ModelSpec::new(1, a, Resurrection::SameAsImmigration, vec![b]).expect("scaled fixture");
    validate(spec).expect("scaled fixture validates")
}

/// Asymmetric subcritical two-type model with both constant branch terms
/// positive; exercises pivot invariance of the characteristic curve.
///
/// B_1 = 0.5 - 2u_1 + u_2 + 0.5 u_1^2, B_2 = 0.7 - 2.2u_2 + u_1 + 0.5 u_2^2;
/// both vanish at (1,1), mean matrix [[-1, 1], [1, -1.2]] has dominant
/// eigenvalue (-2.2 + sqrt(4.04))/2 < 0.
pub fn asym_spec() -> ModelSpec {
    let b1 = dist(
        RateKind::Branch(0),
        2,
        &[(&[0, 0], 0.5), (&[0, 1], 1.0), (&[2, 0], 0.5)],
    );
    let b2 = dist(
        RateKind::Branch(1),
        2,
        &[(&[0, 0], 0.7), (&[1, 0], 1.0), (&[0, 2], 0.5)],
    );
    let a = dist(
        RateKind::Immigration,
        2,
        &[(&[1, 0], 0.3), (&[0, 1], 0.2)],
    );
    ModelSpec::new(2, a, Resurrection::SameAsImmigration, vec![b1, b2]).expect("fixture asym")
}

pub fn asym() -> ValidatedModel {
    validate(asym_spec()).expect("fixture asym validates")
}

/// The four bundled fixtures by name, as written by `fixtures` and accepted
/// by `check`.
pub fn by_name(name: &str) -> Option<ModelSpec> {
    match name {
        "m1" => Some(m1_spec()),
        "m2" => Some(m2_spec()),
        "m3" => Some(m3_spec()),
        "m4" => Some(m4_spec()),
        _ => None,
    }
}

/// Names of the bundled fixtures in writing order.
pub const NAMES: [&str; 4] = ["m1", "m2", "m3", "m4"];
