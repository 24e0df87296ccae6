//! Model structures on a finite lattice, built from a set of weak
//! equivalences and a transfer system of acyclic fibrations.

use std::fmt;

use crate::arrows::{same_lattice, ArrowSet, Closure};
use crate::bits::Bits;
use crate::enumeration::search::SystemSearch;
use crate::error::{Error, Result};
use crate::lattice::{Arrow, Elem, Lattice, Shape};
use crate::lifting::{left_lift, right_lift, right_lifters_oracle, validate_wfs};

/// The five classes of a model structure. Identities belong to every class
/// implicitly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModelStructure<'a> {
    pub weq: ArrowSet<'a>,
    pub acof: ArrowSet<'a>,
    pub cof: ArrowSet<'a>,
    pub afib: ArrowSet<'a>,
    pub fib: ArrowSet<'a>,
}

impl<'a> ModelStructure<'a> {
    pub fn lattice(&self) -> &'a Lattice {
        self.weq.lattice()
    }
}

/// The transfer systems that occur as acyclic fibrations of a model
/// structure with weak equivalences `weq`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AfInterval<'a> {
    pub weq: ArrowSet<'a>,
    pub af_min: ArrowSet<'a>,
    pub af_max: ArrowSet<'a>,
    /// Sorted by cardinality, then lexicographically by arrow index.
    pub members: Vec<ArrowSet<'a>>,
}

fn check_weq_and_system(w: &ArrowSet<'_>, s: &ArrowSet<'_>, closure: Closure) -> Result<()> {
    if !same_lattice(w.lattice(), s.lattice()) {
        return Err(Error::MixedLattices);
    }
    w.require_wide_decomposable()
        .map_err(|e| Error::PreconditionViolated(format!("weak equivalences: {e}")))?;
    let (name, ok) = match closure {
        Closure::Pullback => ("transfer system", s.is_transfer_system()),
        Closure::Pushout => ("cotransfer system", s.is_cotransfer_system()),
    };
    if !ok {
        return Err(Error::PreconditionViolated(format!("{s} is not a {name}")));
    }
    if !s.is_subset(w) {
        return Err(Error::PreconditionViolated(format!(
            "{s} is not contained in the weak equivalences {w}"
        )));
    }
    Ok(())
}

/// Whether `(W, T)` determines a model structure with `T` as acyclic
/// fibrations: `⊡T ∩ W` must be a cotransfer system.
pub fn check_pair_afw(w: &ArrowSet<'_>, t: &ArrowSet<'_>) -> Result<bool> {
    check_weq_and_system(w, t, Closure::Pullback)?;
    let ac = left_lift(t)?.intersection(w)?;
    Ok(ac.is_cotransfer_system())
}

/// Dual of [`check_pair_afw`]: `K` as acyclic cofibrations works iff
/// `K⊡ ∩ W` is a transfer system.
pub fn check_pair_acw(w: &ArrowSet<'_>, k: &ArrowSet<'_>) -> Result<bool> {
    check_weq_and_system(w, k, Closure::Pushout)?;
    let af = right_lift(k)?.intersection(w)?;
    Ok(af.is_transfer_system())
}

/// Why `s` is not a cotransfer system, as text.
fn cotransfer_witness(s: &ArrowSet<'_>) -> String {
    let l = s.lattice();
    for f in s.iter() {
        for z in 0..l.len() {
            if l.leq(f.src, z) {
                let p = Arrow::new(z, l.join(f.tgt, z));
                if !s.contains(p) {
                    return format!("pushout {} of {} is missing", l.show_arrow(p), l.show_arrow(f));
                }
            }
        }
    }
    if let Some((f, g)) = s.composition_witness() {
        return format!("composite of {} and {} is missing", l.show_arrow(f), l.show_arrow(g));
    }
    String::from("closed")
}

/// Assemble the model structure with weak equivalences `w` and acyclic
/// fibrations `t`.
pub fn assemble_model_structure<'a>(w: &ArrowSet<'a>, t: &ArrowSet<'a>) -> Result<ModelStructure<'a>> {
    check_weq_and_system(w, t, Closure::Pullback)?;
    let cof = left_lift(t)?;
    let acof = cof.intersection(w)?;
    if !acof.is_cotransfer_system() {
        return Err(Error::NotAModelStructure(format!(
            "acyclic cofibrations {acof} are not a cotransfer system: {}",
            cotransfer_witness(&acof)
        )));
    }
    let fib = right_lifters_oracle(&acof);
    debug_assert_eq!(Ok(fib), right_lift(&acof));
    let m = ModelStructure {
        weq: *w,
        acof,
        cof,
        afib: *t,
        fib,
    };
    debug_assert_eq!(verify_model_structure(&m).failure, None);
    Ok(m)
}

/// The axiom a candidate model structure violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axiom {
    SameLattice,
    /// `(AC, F)` is a weak factorization system.
    AcofFibWfs,
    /// `(C, AF)` is a weak factorization system.
    CofAfibWfs,
    AcofInCof,
    AfibInFib,
    /// Every weak equivalence factors as acyclic cofibration then acyclic
    /// fibration, and every such composite is a weak equivalence.
    WeqIsComposite,
    TwoOutOfThree,
    WeqDecomposable,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::SameLattice => "all classes on one lattice",
            Axiom::AcofFibWfs => "(AC, F) is a weak factorization system",
            Axiom::CofAfibWfs => "(C, AF) is a weak factorization system",
            Axiom::AcofInCof => "AC is contained in C",
            Axiom::AfibInFib => "AF is contained in F",
            Axiom::WeqIsComposite => "W = AF o AC",
            Axiom::TwoOutOfThree => "W satisfies 2-out-of-3",
            Axiom::WeqDecomposable => "W is decomposable",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelDiagnosis {
    /// First violated axiom and a witness.
    pub failure: Option<(Axiom, String)>,
}

impl ModelDiagnosis {
    pub fn is_valid(&self) -> bool {
        self.failure.is_none()
    }
}

/// Check every axiom from scratch with the brute-force lifting oracle.
pub fn verify_model_structure(m: &ModelStructure<'_>) -> ModelDiagnosis {
    let fail = |axiom, witness: String| ModelDiagnosis {
        failure: Some((axiom, witness)),
    };
    let l = m.lattice();
    if ![m.acof, m.cof, m.afib, m.fib]
        .iter()
        .all(|s| same_lattice(l, s.lattice()))
    {
        return fail(Axiom::SameLattice, String::from("classes on different lattices"));
    }
    if let Some(f) = validate_wfs(&m.acof, &m.fib).failure {
        return fail(Axiom::AcofFibWfs, f.to_string());
    }
    if let Some(f) = validate_wfs(&m.cof, &m.afib).failure {
        return fail(Axiom::CofAfibWfs, f.to_string());
    }
    if let Some(a) = m.acof.bits().difference(m.cof.bits()).iter().next() {
        return fail(Axiom::AcofInCof, l.show_arrow(l.arrow(a)));
    }
    if let Some(a) = m.afib.bits().difference(m.fib.bits()).iter().next() {
        return fail(Axiom::AfibInFib, l.show_arrow(l.arrow(a)));
    }
    let composite = compose(l, &m.acof, &m.afib);
    if let Some(a) = composite.symmetric_difference(m.weq.bits()).iter().next() {
        return fail(Axiom::WeqIsComposite, l.show_arrow(l.arrow(a)));
    }
    if let Some((x, y, z)) = two_out_of_three_witness(&m.weq) {
        return fail(
            Axiom::TwoOutOfThree,
            format!(
                "{} <= {} <= {}",
                l.display_label(x),
                l.display_label(y),
                l.display_label(z)
            ),
        );
    }
    if let Err(e) = m.weq.require_wide_decomposable() {
        return fail(Axiom::WeqDecomposable, e.to_string());
    }
    ModelDiagnosis { failure: None }
}

/// `{x -> z | x -> y in first, y -> z in second}`, identities allowed on
/// either side.
fn compose(l: &Lattice, first: &ArrowSet<'_>, second: &ArrowSet<'_>) -> Bits {
    let mut out = first.bits().union(second.bits());
    for f in first.iter() {
        for g in second.bits().intersection(l.out_of(f.tgt)).iter() {
            out.insert(l.arrow_id(Arrow::new(f.src, l.arrow(g).tgt)).expect("composite is an arrow"));
        }
    }
    out
}

fn two_out_of_three_witness(w: &ArrowSet<'_>) -> Option<(Elem, Elem, Elem)> {
    let l = w.lattice();
    let n = l.len();
    for x in 0..n {
        for y in (0..n).filter(|&y| l.leq(x, y)) {
            for z in (0..n).filter(|&z| l.leq(y, z)) {
                let held = [w.contains_pair(x, y), w.contains_pair(y, z), w.contains_pair(x, z)];
                if held.iter().filter(|&&b| b).count() == 2 {
                    return Some((x, y, z));
                }
            }
        }
    }
    None
}

/// Covers of `q` all of whose pullbacks (or pushouts) stay in `q`.
fn good_covers(q: &ArrowSet<'_>, closure: Closure) -> Bits {
    let l = q.lattice();
    q.bits()
        .intersection(l.cover_mask())
        .iter()
        .filter(|&i| crate::arrows::closure_mask(l, i, closure).is_subset(q.bits()))
        .collect()
}

/// Elements reachable from `start` along arrows in `edges`, forward or
/// backward.
fn reach(l: &Lattice, edges: &Bits, start: Elem, forward: bool) -> Vec<bool> {
    let mut seen = vec![false; l.len()];
    seen[start] = true;
    let mut todo = vec![start];
    while let Some(u) = todo.pop() {
        let adjacent = if forward { l.out_of(u) } else { l.into(u) };
        for i in edges.intersection(adjacent).iter() {
            let a = l.arrow(i);
            let v = if forward { a.tgt } else { a.src };
            if !seen[v] {
                seen[v] = true;
                todo.push(v);
            }
        }
    }
    seen
}

/// Every `x -> z` in `q` factors as a path of pushout-closed covers of `q`
/// followed by a path of pullback-closed covers of `q`.
pub fn satisfies_factorization_condition(q: &ArrowSet<'_>) -> Result<bool> {
    q.require_wide_decomposable()?;
    let l = q.lattice();
    let up = good_covers(q, Closure::Pushout);
    let down = good_covers(q, Closure::Pullback);
    Ok(q.iter().all(|f| {
        let from_src = reach(l, &up, f.src, true);
        let to_tgt = reach(l, &down, f.tgt, false);
        (0..l.len()).any(|m| from_src[m] && to_tgt[m])
    }))
}

/// The factorization condition on a two-dimensional grid, checked only on
/// arrows inside a single row or column. Such an arrow has a unique cover
/// path, so it suffices that the path is a run of pushout-closed covers
/// followed by a run of pullback-closed ones.
pub fn satisfies_factorization_condition_grid(q: &ArrowSet<'_>) -> Result<bool> {
    let l = q.lattice();
    let cols = match *l.shape() {
        Shape::Grid(_, n) => n + 1,
        _ => {
            return Err(Error::InvalidArgument(String::from(
                "grid factorization check needs a grid lattice",
            )))
        }
    };
    q.require_wide_decomposable()?;
    let up = good_covers(q, Closure::Pushout);
    let down = good_covers(q, Closure::Pullback);
    let coords = |e: Elem| (e / cols, e % cols);
    let at = |i: usize, j: usize| i * cols + j;
    Ok(q.iter().all(|f| {
        let (si, sj) = coords(f.src);
        let (ti, tj) = coords(f.tgt);
        if si != ti && sj != tj {
            return true;
        }
        let path: Vec<usize> = if si == ti {
            (sj..tj).map(|j| l.id_unchecked(at(si, j), at(si, j + 1))).collect()
        } else {
            (si..ti).map(|i| l.id_unchecked(at(i, sj), at(i + 1, sj))).collect()
        };
        let prefix = path.iter().take_while(|&&c| up.contains(c)).count();
        path[prefix..].iter().all(|&c| down.contains(c))
    }))
}

/// Whether `q` is the class of weak equivalences of some model structure.
pub fn is_weak_equivalence_set(q: &ArrowSet<'_>) -> Result<bool> {
    q.require_wide_decomposable()?;
    let t = q.t_max()?;
    let result = check_pair_afw(q, &t)?;
    debug_assert_eq!(Ok(result), satisfies_factorization_condition(q));
    debug_assert!(q.lattice().arrow_count() > 12 || result == some_afw_pair_exists(q));
    Ok(result)
}

/// Exhaustive: some transfer system `T ⊆ q` makes `(q, T)` work.
fn some_afw_pair_exists(q: &ArrowSet<'_>) -> bool {
    let l = q.lattice();
    SystemSearch::new(l, Closure::Pullback, Bits::empty(), *q.bits())
        .any(|t| check_pair_afw(q, &ArrowSet::from_bits(l, t)).unwrap_or(false))
}

fn require_weq(w: &ArrowSet<'_>) -> Result<()> {
    if is_weak_equivalence_set(w)? {
        Ok(())
    } else {
        Err(Error::NotWeakEquivalenceSet)
    }
}

/// Smallest acyclic fibrations among model structures with weak
/// equivalences `w`.
pub fn af_min<'a>(w: &ArrowSet<'a>) -> Result<ArrowSet<'a>> {
    require_weq(w)?;
    right_lift(&w.k_max()?)?.intersection(w)
}

/// Smallest acyclic cofibrations among model structures with weak
/// equivalences `w`.
pub fn ac_min<'a>(w: &ArrowSet<'a>) -> Result<ArrowSet<'a>> {
    require_weq(w)?;
    left_lift(&w.t_max()?)?.intersection(w)
}

fn sort_sets(sets: &mut [ArrowSet<'_>]) {
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.bits().lex_cmp(b.bits())));
}

/// Every transfer system between the minimal and maximal acyclic
/// fibrations for `w`, each confirmed to give a model structure.
pub fn af_interval<'a>(w: &ArrowSet<'a>) -> Result<AfInterval<'a>> {
    let lo = af_min(w)?;
    let hi = w.t_max()?;
    debug_assert!(lo.is_subset(&hi));
    let l = w.lattice();
    let mut members = Vec::new();
    for bits in SystemSearch::new(l, Closure::Pullback, *lo.bits(), *hi.bits()) {
        let t = ArrowSet::from_bits(l, bits);
        let ok = check_pair_afw(w, &t)?;
        debug_assert!(ok, "{t} lies in the interval but fails the pair check");
        if ok {
            members.push(t);
        }
    }
    sort_sets(&mut members);
    Ok(AfInterval {
        weq: *w,
        af_min: lo,
        af_max: hi,
        members,
    })
}

/// Every cotransfer system between the minimal and maximal acyclic
/// cofibrations for `w`, each confirmed to give a model structure.
pub fn ac_interval<'a>(w: &ArrowSet<'a>) -> Result<Vec<ArrowSet<'a>>> {
    let lo = ac_min(w)?;
    let hi = w.k_max()?;
    let l = w.lattice();
    let mut members = Vec::new();
    for bits in SystemSearch::new(l, Closure::Pushout, *lo.bits(), *hi.bits()) {
        let k = ArrowSet::from_bits(l, bits);
        if check_pair_acw(w, &k)? {
            members.push(k);
        }
    }
    sort_sets(&mut members);
    Ok(members)
}

/// Acyclic cofibrations of the model structure with weak equivalences `w`
/// and acyclic fibrations `t`. This is an order-reversing bijection from
/// the acyclic-fibration interval onto the acyclic-cofibration interval.
pub fn dual_map<'a>(w: &ArrowSet<'a>, t: &ArrowSet<'a>) -> Result<ArrowSet<'a>> {
    if !check_pair_afw(w, t)? {
        return Err(Error::NotInAfw);
    }
    left_lift(t)?.intersection(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_set<'a>(l: &'a Lattice, pairs: &[((usize, usize), (usize, usize))]) -> ArrowSet<'a> {
        let cols = match *l.shape() {
            Shape::Grid(_, n) => n + 1,
            _ => unreachable!(),
        };
        let id = |(i, j): (usize, usize)| i * cols + j;
        ArrowSet::from_arrows(l, pairs.iter().map(|&(s, t)| Arrow::new(id(s), id(t)))).unwrap()
    }

    fn worked_w(l: &Lattice) -> ArrowSet<'_> {
        grid_set(
            l,
            &[
                ((0, 0), (0, 1)),
                ((0, 1), (0, 2)),
                ((0, 0), (0, 2)),
                ((1, 1), (1, 2)),
                ((2, 0), (2, 1)),
                ((2, 1), (2, 2)),
                ((2, 0), (2, 2)),
            ],
        )
    }

    #[test]
    fn square_with_both_short_arrows_out_of_bottom() {
        let sq = Lattice::grid(1, 1).unwrap();
        let w = grid_set(&sq, &[((0, 0), (0, 1)), ((0, 0), (1, 0))]);
        let t = grid_set(&sq, &[((0, 0), (1, 0))]);
        assert_eq!(check_pair_afw(&w, &t), Ok(false));
    }

    #[test]
    fn single_arrow_in_middle_row_is_not_weq() {
        let g = Lattice::grid(2, 1).unwrap();
        let q = grid_set(&g, &[((1, 0), (1, 1))]);
        assert_eq!(is_weak_equivalence_set(&q), Ok(false));
        assert_eq!(satisfies_factorization_condition(&q), Ok(false));
        assert_eq!(satisfies_factorization_condition_grid(&q), Ok(false));
    }

    #[test]
    fn empty_afib_versus_empty_acof() {
        let g = Lattice::grid(2, 1).unwrap();
        let q = grid_set(
            &g,
            &[
                ((0, 0), (0, 1)),
                ((0, 0), (1, 0)),
                ((0, 0), (1, 1)),
                ((1, 0), (1, 1)),
                ((0, 1), (1, 1)),
            ],
        );
        let empty = ArrowSet::empty(&g);
        assert_eq!(check_pair_afw(&q, &empty), Ok(false));
        assert_eq!(check_pair_acw(&q, &empty), Ok(true));
    }

    #[test]
    fn long_arrow_factorization_examples() {
        let g = Lattice::grid(2, 2).unwrap();
        let short = [((0, 0), (0, 1)), ((1, 0), (1, 1)), ((1, 1), (1, 2)), ((2, 1), (2, 2))];
        let q = grid_set(&g, &short).with(Arrow::new(3, 5));
        assert_eq!(satisfies_factorization_condition(&q), Ok(false));
        assert_eq!(satisfies_factorization_condition_grid(&q), Ok(false));
        assert_eq!(is_weak_equivalence_set(&q), Ok(false));

        let short = [((0, 1), (0, 2)), ((1, 0), (1, 1)), ((1, 1), (1, 2)), ((2, 0), (2, 1))];
        let q = grid_set(&g, &short).with(Arrow::new(3, 5));
        assert_eq!(satisfies_factorization_condition(&q), Ok(true));
        assert_eq!(satisfies_factorization_condition_grid(&q), Ok(true));
        assert_eq!(is_weak_equivalence_set(&q), Ok(true));
    }

    #[test]
    fn worked_interval_on_three_by_three() {
        let g = Lattice::grid(2, 2).unwrap();
        let w = worked_w(&g);
        assert_eq!(is_weak_equivalence_set(&w), Ok(true));
        let lo = af_min(&w).unwrap();
        assert_eq!(lo, grid_set(&g, &[((0, 0), (0, 1)), ((0, 0), (0, 2))]));
        let iv = af_interval(&w).unwrap();
        assert_eq!(iv.af_max, w.t_max().unwrap());
        assert_eq!(iv.members.len(), 4);
        assert_eq!(iv.members[0], lo);
        assert_eq!(*iv.members.last().unwrap(), iv.af_max);
        let acs = ac_interval(&w).unwrap();
        assert_eq!(acs.len(), 4);
        let mut duals: Vec<_> = iv.members.iter().map(|t| dual_map(&w, t).unwrap()).collect();
        duals.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.bits().lex_cmp(b.bits())));
        assert_eq!(duals, acs);
    }

    #[test]
    fn pentagon_intervals() {
        let p = Lattice::pentagon();
        let w = ArrowSet::from_labels(&p, &[("0", "a"), ("a", "c"), ("0", "c"), ("0", "b")]);
        let lo = ArrowSet::from_labels(&p, &[("0", "a"), ("0", "b"), ("0", "c")]);
        let iv = af_interval(&w).unwrap();
        assert_eq!(iv.af_min, lo);
        assert_eq!(iv.members, vec![lo, w]);

        let w = ArrowSet::from_labels(&p, &[("0", "a"), ("c", "1")]);
        let iv = af_interval(&w).unwrap();
        assert_eq!(iv.members, vec![ArrowSet::from_labels(&p, &[("0", "a")])]);
    }

    #[test]
    fn assembled_structures_verify() {
        let g = Lattice::grid(2, 2).unwrap();
        let w = worked_w(&g);
        for t in af_interval(&w).unwrap().members {
            let m = assemble_model_structure(&w, &t).unwrap();
            assert!(verify_model_structure(&m).is_valid());
            assert_eq!(m.afib, t);
            assert_eq!(m.acof, dual_map(&w, &t).unwrap());
        }
    }

    #[test]
    fn broken_structures_are_diagnosed() {
        let sq = Lattice::grid(1, 1).unwrap();
        let w = ArrowSet::complete(&sq);
        let t = ArrowSet::complete(&sq);
        let m = assemble_model_structure(&w, &t).unwrap();
        let mut broken = m;
        broken.fib = broken.fib.without(Arrow::new(0, 3));
        let d = verify_model_structure(&broken);
        assert_eq!(d.failure.map(|(a, _)| a), Some(Axiom::AcofFibWfs));

        let mut broken = m;
        broken.weq = broken.weq.without(Arrow::new(0, 3));
        assert!(!verify_model_structure(&broken).is_valid());
    }

    #[test]
    fn preconditions() {
        let sq = Lattice::grid(1, 1).unwrap();
        let w = grid_set(&sq, &[((0, 0), (0, 1)), ((0, 0), (1, 0))]);
        let not_ts = grid_set(&sq, &[((0, 0), (1, 1))]);
        assert!(matches!(check_pair_afw(&w, &not_ts), Err(Error::PreconditionViolated(_))));
        let long = grid_set(&sq, &[((0, 0), (1, 1))]);
        assert!(matches!(is_weak_equivalence_set(&long), Err(Error::NotDecomposable(_))));
        let other = Lattice::chain(3);
        assert_eq!(check_pair_afw(&w, &ArrowSet::empty(&other)), Err(Error::MixedLattices));
        let t = grid_set(&sq, &[((0, 0), (1, 0))]);
        assert_eq!(dual_map(&w, &t), Err(Error::NotInAfw));
    }

    #[test]
    fn grid_shortcut_needs_grid() {
        let c = Lattice::chain(2);
        assert!(matches!(
            satisfies_factorization_condition_grid(&ArrowSet::empty(&c)),
            Err(Error::InvalidArgument(_))
        ));
    }
}
