//! Closed-form counts for the named lattice families.

use serde::Serialize;

use super::Kind;
use crate::lattice::{Lattice, Shape};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `[n]`.
    Chain,
    /// `[n] x [1]`.
    GridN1,
    /// `M_n`.
    Diamond,
    /// `N_5`; the size parameter is ignored.
    Pentagon,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Chain => "chain",
            Family::GridN1 => "grid_n1",
            Family::Diamond => "diamond",
            Family::Pentagon => "pentagon",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        match s {
            "chain" => Some(Family::Chain),
            "grid_n1" | "grid" => Some(Family::GridN1),
            "diamond" => Some(Family::Diamond),
            "pentagon" => Some(Family::Pentagon),
            _ => None,
        }
    }

    /// Build the member of the family with parameter `n`.
    pub fn lattice(self, n: usize) -> Lattice {
        match self {
            Family::Chain => Lattice::chain(n),
            Family::GridN1 => Lattice::grid(n, 1).expect("grid of chains"),
            Family::Diamond => Lattice::diamond(n.max(1)).expect("diamond with at least one atom"),
            Family::Pentagon => Lattice::pentagon(),
        }
    }

    /// The family and parameter a constructor-built lattice belongs to.
    pub fn of(l: &Lattice) -> Option<(Family, usize)> {
        match *l.shape() {
            Shape::Chain(n) => Some((Family::Chain, n)),
            Shape::Grid(n, 1) => Some((Family::GridN1, n)),
            Shape::Diamond(n) => Some((Family::Diamond, n)),
            Shape::Pentagon => Some((Family::Pentagon, 0)),
            _ => None,
        }
    }
}

fn catalan(n: u64) -> u64 {
    // C_n = binom(2n, n) / (n + 1), built up incrementally to stay exact
    let mut c = 1u64;
    for k in 0..n {
        c = c * 2 * (2 * k + 1) / (k + 2);
    }
    c
}

/// The known closed-form count of `kind` on member `n` of `family`, or
/// `None` when no formula is known.
pub fn expected_count(family: Family, n: usize, kind: Kind) -> Option<u64> {
    let n = n as u64;
    let pow = |b: u64, e: u64| b.checked_pow(u32::try_from(e).ok()?);
    match (family, kind) {
        (Family::Chain, Kind::Transfer | Kind::Cotransfer) => Some(catalan(n + 1)),
        (Family::Chain, Kind::Decomposable | Kind::WeqSet) => pow(2, n),
        (Family::Chain, Kind::ModelStructure) => None,
        (Family::GridN1, Kind::WeqSet) => {
            Some(pow(2, 2 * n + 2)? - pow(2, n + 1)? - pow(2, n)? * n)
        }
        (Family::GridN1, _) => None,
        (Family::Diamond, Kind::Transfer | Kind::Cotransfer) => Some(pow(2, n + 1)? + n),
        (Family::Diamond, Kind::Decomposable | Kind::WeqSet) => Some(pow(3, n)? + 1),
        (Family::Diamond, Kind::ModelStructure) => Some(pow(3, n)? + pow(2, n + 1)? + 3 * n),
        (Family::Pentagon, Kind::Transfer | Kind::Cotransfer) => Some(26),
        (Family::Pentagon, Kind::Decomposable | Kind::WeqSet) => Some(22),
        (Family::Pentagon, Kind::ModelStructure) => Some(70),
    }
}
