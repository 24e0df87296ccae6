//! The table of known counts, recomputed from scratch.

use std::fmt;

use crate::arrows::ArrowSet;
use crate::enumeration::{expected_count, run, EnumerationRequest, Enumerated, Family, Kind};
use crate::error::Result;
use crate::lattice::Lattice;

/// One quantity to recompute.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    Count(Kind),
    /// Weak equivalence sets that are transfer systems but not cotransfer
    /// systems, and so on.
    WeqSplit { transfer: bool, cotransfer: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub family: Family,
    pub n: usize,
    pub quantity: Quantity,
    pub expected: u64,
}

impl Row {
    pub fn lattice_name(&self) -> String {
        match self.family {
            Family::Chain => format!("[{}]", self.n),
            Family::GridN1 => format!("[{}]x[1]", self.n),
            Family::Diamond => format!("M{}", self.n),
            Family::Pentagon => String::from("N5"),
        }
    }

    pub fn quantity_name(&self) -> String {
        match self.quantity {
            Quantity::Count(k) => format!("{} count", k.name()),
            Quantity::WeqSplit { transfer, cotransfer } => {
                let t = if transfer { "transfer" } else { "not transfer" };
                let c = if cotransfer { "cotransfer" } else { "not cotransfer" };
                format!("weq sets: {t}, {c}")
            }
        }
    }
}

impl fmt::Display for Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.lattice_name(), self.quantity_name())
    }
}

fn counted(family: Family, n: usize, kind: Kind) -> Row {
    Row {
        family,
        n,
        quantity: Quantity::Count(kind),
        expected: expected_count(family, n, kind).expect("closed form known"),
    }
}

fn literal(family: Family, n: usize, kind: Kind, expected: u64) -> Row {
    Row {
        family,
        n,
        quantity: Quantity::Count(kind),
        expected,
    }
}

/// Every row of the table, in display order.
pub fn acceptance_table() -> Vec<Row> {
    use Family::*;
    use Kind::*;
    let mut rows = Vec::new();
    rows.extend((0..=5).map(|n| counted(Chain, n, Transfer)));
    rows.push(literal(Chain, 1, ModelStructure, 3));
    rows.push(literal(Chain, 2, ModelStructure, 10));
    rows.push(literal(GridN1, 1, ModelStructure, 23));
    rows.push(literal(GridN1, 2, Transfer, 68));
    rows.push(literal(GridN1, 2, Cotransfer, 68));
    rows.extend((1..=3).map(|n| counted(GridN1, n, WeqSet)));
    rows.extend((1..=6).map(|n| counted(Diamond, n, Transfer)));
    rows.extend((1..=6).map(|n| counted(Diamond, n, WeqSet)));
    rows.extend((1..=5).map(|n| counted(Diamond, n, ModelStructure)));
    for kind in [Transfer, Cotransfer, WeqSet, ModelStructure] {
        rows.push(counted(Pentagon, 0, kind));
    }
    for (transfer, cotransfer, expected) in [(true, false, 8), (false, true, 8), (true, true, 5), (false, false, 1)] {
        rows.push(Row {
            family: Pentagon,
            n: 0,
            quantity: Quantity::WeqSplit { transfer, cotransfer },
            expected,
        });
    }
    rows
}

/// Rows for one family and/or up to a size bound.
pub fn select(rows: Vec<Row>, family: Option<Family>, max_n: Option<usize>) -> Vec<Row> {
    rows.into_iter()
        .filter(|r| family.is_none_or(|f| r.family == f))
        .filter(|r| max_n.is_none_or(|m| r.n <= m))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowResult {
    pub row: Row,
    pub computed: u64,
}

impl RowResult {
    pub fn matches(&self) -> bool {
        self.row.expected == self.computed
    }
}

fn weq_sets(l: &Lattice, jobs: usize) -> Result<Vec<ArrowSet<'_>>> {
    match run(&EnumerationRequest::new(l, Kind::WeqSet), jobs)? {
        Enumerated::Sets(v) => Ok(v),
        _ => unreachable!("set kinds return sets"),
    }
}

pub fn compute(row: &Row, jobs: usize) -> Result<u64> {
    let l = row.family.lattice(row.n);
    match row.quantity {
        Quantity::Count(kind) => Ok(run(&EnumerationRequest::new(&l, kind).count_only(), jobs)?.count()),
        Quantity::WeqSplit { transfer, cotransfer } => Ok(weq_sets(&l, jobs)?
            .iter()
            .filter(|w| w.is_transfer_system() == transfer && w.is_cotransfer_system() == cotransfer)
            .count() as u64),
    }
}

pub fn reproduce(rows: &[Row], jobs: usize) -> Result<Vec<RowResult>> {
    rows.iter()
        .map(|row| {
            Ok(RowResult {
                row: row.clone(),
                computed: compute(row, jobs)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filtering() {
        let rows = select(acceptance_table(), Some(Family::Diamond), Some(4));
        assert!(!rows.is_empty());
        assert!(rows.iter().all(|r| r.family == Family::Diamond && r.n <= 4));
        assert!(rows.len() < acceptance_table().len());
    }

    #[test]
    fn small_rows_match() {
        let rows = select(acceptance_table(), Some(Family::Chain), Some(3));
        for r in reproduce(&rows, 1).unwrap() {
            assert!(r.matches(), "{}: expected {}, computed {}", r.row, r.row.expected, r.computed);
        }
    }
}
