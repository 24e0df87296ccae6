//! Enumeration of transfer systems, cotransfer systems, decomposable
//! subcategories, weak equivalence sets and model structures.
//!
//! Every enumeration has one canonical order: depth-first over arrow
//! indices, exclude branch first. Parallel runs split the search tree at a
//! fixed depth and concatenate the subtrees in that same order, so the
//! output never depends on the number of threads.

pub(crate) mod search;
mod counts;

use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::arrows::{ArrowSet, Closure};
use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::model::{af_interval, assemble_model_structure, is_weak_equivalence_set, ModelStructure};
use search::{cover_prefixes, frontier, CoverSubsets, Node, SystemSearch};

pub use counts::{expected_count, Family};

/// Depth at which parallel runs split the search tree.
const SPLIT_DEPTH: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Transfer,
    Cotransfer,
    Decomposable,
    WeqSet,
    ModelStructure,
}

impl Kind {
    pub const ALL: [Kind; 5] = [
        Kind::Transfer,
        Kind::Cotransfer,
        Kind::Decomposable,
        Kind::WeqSet,
        Kind::ModelStructure,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Transfer => "transfer",
            Kind::Cotransfer => "cotransfer",
            Kind::Decomposable => "decomposable",
            Kind::WeqSet => "weq",
            Kind::ModelStructure => "model",
        }
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Kind> {
        match s {
            "transfer" => Ok(Kind::Transfer),
            "cotransfer" => Ok(Kind::Cotransfer),
            "decomposable" => Ok(Kind::Decomposable),
            "weq" | "weq_set" => Ok(Kind::WeqSet),
            "model" | "model_structure" => Ok(Kind::ModelStructure),
            _ => Err(Error::InvalidArgument(format!("unknown kind {s:?}"))),
        }
    }
}

/// What to enumerate. `within` and `superset_of` bound the emitted arrow
/// set (the weak equivalences, for model structures).
#[derive(Clone, Copy, Debug)]
pub struct EnumerationRequest<'a> {
    pub lattice: &'a Lattice,
    pub kind: Kind,
    pub within: Option<ArrowSet<'a>>,
    pub superset_of: Option<ArrowSet<'a>>,
    pub count_only: bool,
}

impl<'a> EnumerationRequest<'a> {
    pub fn new(lattice: &'a Lattice, kind: Kind) -> Self {
        EnumerationRequest {
            lattice,
            kind,
            within: None,
            superset_of: None,
            count_only: false,
        }
    }

    pub fn within(mut self, s: ArrowSet<'a>) -> Self {
        self.within = Some(s);
        self
    }

    pub fn superset_of(mut self, s: ArrowSet<'a>) -> Self {
        self.superset_of = Some(s);
        self
    }

    pub fn count_only(mut self) -> Self {
        self.count_only = true;
        self
    }

    fn bounds(&self) -> Result<(Bits, Bits)> {
        let l = self.lattice;
        for s in self.within.iter().chain(self.superset_of.iter()) {
            if !crate::arrows::same_lattice(l, s.lattice()) {
                return Err(Error::MixedLattices);
            }
        }
        let lower = self.superset_of.map_or(Bits::empty(), |s| *s.bits());
        let upper = self.within.map_or(Bits::full(l.arrow_count()), |s| *s.bits());
        if !lower.is_subset(&upper) {
            return Err(Error::InvalidArgument(String::from(
                "superset_of bound is not contained in the within bound",
            )));
        }
        Ok((lower, upper))
    }

    fn expect(&self, kinds: &[Kind]) -> Result<()> {
        if kinds.contains(&self.kind) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "request of kind {} passed to the wrong enumerator",
                self.kind.name()
            )))
        }
    }
}

/// Lazy stream of arrow sets on one lattice.
pub struct SetStream<'a> {
    lattice: &'a Lattice,
    inner: Box<dyn Iterator<Item = Bits> + 'a>,
}

impl<'a> Iterator for SetStream<'a> {
    type Item = ArrowSet<'a>;

    fn next(&mut self) -> Option<ArrowSet<'a>> {
        self.inner.next().map(|b| ArrowSet::from_bits(self.lattice, b))
    }
}

fn system_stream<'a>(req: &EnumerationRequest<'a>, closure: Closure) -> Result<SetStream<'a>> {
    let (lower, upper) = req.bounds()?;
    Ok(SetStream {
        lattice: req.lattice,
        inner: Box::new(SystemSearch::new(req.lattice, closure, lower, upper)),
    })
}

/// Transfer systems within the request's bounds, in canonical order.
pub fn enumerate_transfer_systems<'a>(req: &EnumerationRequest<'a>) -> Result<SetStream<'a>> {
    req.expect(&[Kind::Transfer])?;
    system_stream(req, Closure::Pullback)
}

/// Cotransfer systems within the request's bounds, in canonical order.
pub fn enumerate_cotransfer_systems<'a>(req: &EnumerationRequest<'a>) -> Result<SetStream<'a>> {
    req.expect(&[Kind::Cotransfer])?;
    system_stream(req, Closure::Pushout)
}

fn filtered<'a>(
    lattice: &'a Lattice,
    lower: Bits,
    upper: Bits,
    inner: impl Iterator<Item = Bits> + 'a,
) -> SetStream<'a> {
    SetStream {
        lattice,
        inner: Box::new(inner.filter(move |b| lower.is_subset(b) && b.is_subset(&upper))),
    }
}

/// Wide decomposable subcategories, as composition closures of subsets of
/// the cover arrows.
pub fn enumerate_wide_decomposable<'a>(req: &EnumerationRequest<'a>) -> Result<SetStream<'a>> {
    req.expect(&[Kind::Decomposable])?;
    let (lower, upper) = req.bounds()?;
    Ok(filtered(req.lattice, lower, upper, CoverSubsets::new(req.lattice)))
}

fn is_weq_bits(l: &Lattice, b: Bits) -> bool {
    is_weak_equivalence_set(&ArrowSet::from_bits(l, b)).expect("decomposable by construction")
}

/// Wide decomposable subcategories that are weak equivalence sets.
pub fn enumerate_weak_equivalence_sets<'a>(req: &EnumerationRequest<'a>) -> Result<SetStream<'a>> {
    req.expect(&[Kind::WeqSet])?;
    let (lower, upper) = req.bounds()?;
    let l = req.lattice;
    let inner = CoverSubsets::new(l).filter(move |&b| is_weq_bits(l, b));
    Ok(filtered(l, lower, upper, inner))
}

fn models_for(w: ArrowSet<'_>) -> Vec<ModelStructure<'_>> {
    af_interval(&w)
        .expect("weak equivalence set")
        .members
        .iter()
        .map(|t| assemble_model_structure(&w, t).expect("interval member"))
        .collect()
}

/// Model structures, grouped by weak equivalences in canonical order and,
/// within a group, by acyclic fibrations in interval order.
pub fn enumerate_model_structures<'a>(
    req: &EnumerationRequest<'a>,
) -> Result<impl Iterator<Item = ModelStructure<'a>> + 'a> {
    req.expect(&[Kind::ModelStructure])?;
    let mut weq = *req;
    weq.kind = Kind::WeqSet;
    Ok(enumerate_weak_equivalence_sets(&weq)?.flat_map(models_for))
}

/// The result of a (possibly parallel) enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Enumerated<'a> {
    Sets(Vec<ArrowSet<'a>>),
    Models(Vec<ModelStructure<'a>>),
    Count(u64),
}

impl Enumerated<'_> {
    pub fn count(&self) -> u64 {
        match self {
            Enumerated::Sets(v) => v.len() as u64,
            Enumerated::Models(v) => v.len() as u64,
            Enumerated::Count(n) => *n,
        }
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start {jobs} worker threads: {e}")))
}

fn system_bits_parallel(l: &Lattice, closure: Closure, lower: Bits, upper: Bits) -> Vec<Bits> {
    let Some(root) = Node::root(l, closure, lower, upper) else {
        return Vec::new();
    };
    let nodes = frontier(l, closure, root, SPLIT_DEPTH);
    let chunks: Vec<Vec<Bits>> = nodes
        .par_iter()
        .map(|&n| SystemSearch::from_nodes(l, closure, vec![n]).collect())
        .collect();
    chunks.concat()
}

fn decomposable_bits_parallel(l: &Lattice) -> Vec<Bits> {
    let chunks: Vec<Vec<Bits>> = cover_prefixes(l, SPLIT_DEPTH)
        .into_par_iter()
        .map(|p| CoverSubsets::from_prefixes(l, vec![p]).collect())
        .collect();
    chunks.concat()
}

fn sets<'a>(l: &'a Lattice, bits: Vec<Bits>) -> Vec<ArrowSet<'a>> {
    bits.into_iter().map(|b| ArrowSet::from_bits(l, b)).collect()
}

/// Run a request on `jobs` worker threads. With `jobs == 1` everything runs
/// on the calling thread. The result is identical for every `jobs`.
pub fn run<'a>(req: &EnumerationRequest<'a>, jobs: usize) -> Result<Enumerated<'a>> {
    let l = req.lattice;
    let (lower, upper) = req.bounds()?;
    if jobs <= 1 {
        return Ok(match req.kind {
            Kind::Transfer | Kind::Cotransfer | Kind::Decomposable | Kind::WeqSet => {
                let stream = match req.kind {
                    Kind::Transfer => enumerate_transfer_systems(req)?,
                    Kind::Cotransfer => enumerate_cotransfer_systems(req)?,
                    Kind::Decomposable => enumerate_wide_decomposable(req)?,
                    _ => enumerate_weak_equivalence_sets(req)?,
                };
                if req.count_only {
                    Enumerated::Count(stream.count() as u64)
                } else {
                    Enumerated::Sets(stream.collect())
                }
            }
            Kind::ModelStructure => {
                let models = enumerate_model_structures(req)?;
                if req.count_only {
                    Enumerated::Count(models.count() as u64)
                } else {
                    Enumerated::Models(models.collect())
                }
            }
        });
    }
    let in_bounds = |b: &Bits| lower.is_subset(b) && b.is_subset(&upper);
    pool(jobs)?.install(|| {
        let bits = match req.kind {
            Kind::Transfer => system_bits_parallel(l, Closure::Pullback, lower, upper),
            Kind::Cotransfer => system_bits_parallel(l, Closure::Pushout, lower, upper),
            _ => {
                let mut d = decomposable_bits_parallel(l);
                d.retain(in_bounds);
                if req.kind != Kind::Decomposable {
                    d = d.into_par_iter().filter(|&b| is_weq_bits(l, b)).collect();
                }
                d
            }
        };
        Ok(match req.kind {
            Kind::ModelStructure => {
                let groups: Vec<Vec<ModelStructure<'a>>> = bits
                    .into_par_iter()
                    .map(|b| models_for(ArrowSet::from_bits(l, b)))
                    .collect();
                if req.count_only {
                    Enumerated::Count(groups.iter().map(|g| g.len() as u64).sum())
                } else {
                    Enumerated::Models(groups.concat())
                }
            }
            _ if req.count_only => Enumerated::Count(bits.len() as u64),
            _ => Enumerated::Sets(sets(l, bits)),
        })
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KindCount {
    pub kind: Kind,
    pub count: u64,
    /// Closed-form value for this family, when one is known.
    pub expected: Option<u64>,
}

impl KindCount {
    pub fn matches(&self) -> Option<bool> {
        self.expected.map(|e| e == self.count)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CountReport {
    pub lattice: String,
    pub counts: Vec<KindCount>,
    pub wall_time_ms: u128,
}

/// Count each kind on one lattice, comparing with the closed forms when
/// the lattice belongs to a known family.
pub fn count_report(lattice: &Lattice, name: &str, kinds: &[Kind], jobs: usize) -> Result<CountReport> {
    let start = Instant::now();
    let family = Family::of(lattice);
    let mut counts = Vec::with_capacity(kinds.len());
    for &kind in kinds {
        let req = EnumerationRequest::new(lattice, kind).count_only();
        let count = run(&req, jobs)?.count();
        let expected = family.and_then(|(f, n)| expected_count(f, n, kind));
        counts.push(KindCount { kind, count, expected });
    }
    Ok(CountReport {
        lattice: name.to_string(),
        counts,
        wall_time_ms: start.elapsed().as_millis(),
    })
}

/// Brute force over all `2^m` arrow subsets; for cross-checking the
/// searches on small lattices.
pub fn brute_force_filter<'a, P>(lattice: &'a Lattice, predicate: P) -> Result<Vec<ArrowSet<'a>>>
where
    P: Fn(&ArrowSet<'a>) -> bool,
{
    let m = lattice.arrow_count();
    if m > 20 {
        return Err(Error::TooLarge(m));
    }
    Ok((0u32..1 << m)
        .map(|mask| {
            let bits = (0..m).filter(|i| mask >> i & 1 == 1).collect();
            ArrowSet::from_bits(lattice, bits)
        })
        .filter(|s| predicate(s))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn all(l: &Lattice, kind: Kind) -> Vec<ArrowSet<'_>> {
        match run(&EnumerationRequest::new(l, kind), 1).unwrap() {
            Enumerated::Sets(v) => v,
            _ => unreachable!(),
        }
    }

    #[test]
    fn chain_counts() {
        let catalan = [1, 2, 5, 14, 42, 132];
        for n in 0..5 {
            let c = Lattice::chain(n);
            assert_eq!(all(&c, Kind::Transfer).len(), catalan[n]);
            assert_eq!(all(&c, Kind::Cotransfer).len(), catalan[n]);
            assert_eq!(all(&c, Kind::Decomposable).len(), 1 << n);
        }
    }

    #[test]
    fn search_matches_brute_force() {
        for l in [Lattice::chain(3), Lattice::grid(1, 1).unwrap(), Lattice::pentagon(), Lattice::diamond(3).unwrap()] {
            let ts = all(&l, Kind::Transfer);
            let brute = brute_force_filter(&l, |s| s.is_transfer_system()).unwrap();
            assert_eq!(ts.iter().collect::<HashSet<_>>(), brute.iter().collect::<HashSet<_>>());
            assert_eq!(ts.len(), brute.len());
            let dec = all(&l, Kind::Decomposable);
            let brute = brute_force_filter(&l, |s| s.is_decomposable() && s.is_composition_closed()).unwrap();
            assert_eq!(dec.iter().collect::<HashSet<_>>(), brute.iter().collect::<HashSet<_>>());
            assert_eq!(dec.len(), brute.len());
        }
    }

    #[test]
    fn bounds_restrict_output() {
        let l = Lattice::chain(3);
        let within = ArrowSet::from_pairs(&l, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let req = EnumerationRequest::new(&l, Kind::Transfer).within(within);
        let got: Vec<_> = enumerate_transfer_systems(&req).unwrap().collect();
        assert_eq!(got.len(), 5);
        assert!(got.iter().all(|t| t.is_subset(&within)));

        let lower = ArrowSet::from_pairs(&l, &[(0, 1)]).unwrap();
        let req = EnumerationRequest::new(&l, Kind::Transfer).superset_of(lower);
        assert!(enumerate_transfer_systems(&req).unwrap().all(|t| lower.is_subset(&t)));

        let req = EnumerationRequest::new(&l, Kind::Transfer)
            .within(lower)
            .superset_of(within);
        assert!(matches!(enumerate_transfer_systems(&req), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn parallel_equals_sequential() {
        let l = Lattice::grid(2, 1).unwrap();
        for kind in Kind::ALL {
            let req = EnumerationRequest::new(&l, kind);
            assert_eq!(run(&req, 1).unwrap(), run(&req, 4).unwrap(), "{kind:?}");
        }
    }

    #[test]
    fn brute_force_limit() {
        let l = Lattice::grid(2, 2).unwrap();
        assert!(matches!(brute_force_filter(&l, |_| true), Err(Error::TooLarge(_))));
    }

    #[test]
    fn wrong_kind_rejected() {
        let l = Lattice::chain(1);
        let req = EnumerationRequest::new(&l, Kind::Cotransfer);
        assert!(enumerate_transfer_systems(&req).is_err());
    }
}
