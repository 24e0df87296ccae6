//! Sets of non-identity arrows and the (co)transfer-system algebra on them.
//!
//! Identities are implicitly members of every set (all sets are read as wide
//! subcategories) and are never stored.

use std::fmt;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::lattice::{Arrow, Elem, Lattice};

#[derive(Clone, Copy)]
pub struct ArrowSet<'a> {
    lattice: &'a Lattice,
    bits: Bits,
}

impl PartialEq for ArrowSet<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.bits == other.bits && same_lattice(self.lattice, other.lattice)
    }
}

impl Eq for ArrowSet<'_> {}

impl std::hash::Hash for ArrowSet<'_> {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.bits.hash(state);
    }
}

impl fmt::Debug for ArrowSet<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ArrowSet<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, a) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(&self.lattice.show_arrow(a))?;
        }
        f.write_str("}")
    }
}

pub(crate) fn same_lattice(a: &Lattice, b: &Lattice) -> bool {
    std::ptr::eq(a, b) || a == b
}

/// Which closure a (co)transfer computation uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Closure {
    /// Closed under pullbacks: transfer systems.
    Pullback,
    /// Closed under pushouts: cotransfer systems.
    Pushout,
}

impl<'a> ArrowSet<'a> {
    pub fn empty(lattice: &'a Lattice) -> Self {
        ArrowSet {
            lattice,
            bits: Bits::empty(),
        }
    }

    /// Every non-identity arrow of the lattice.
    pub fn complete(lattice: &'a Lattice) -> Self {
        ArrowSet {
            lattice,
            bits: Bits::full(lattice.arrow_count()),
        }
    }

    pub fn from_bits(lattice: &'a Lattice, bits: Bits) -> Self {
        debug_assert!(bits.is_subset(&Bits::full(lattice.arrow_count())));
        ArrowSet { lattice, bits }
    }

    /// Identity arrows are accepted and dropped.
    pub fn from_arrows<I: IntoIterator<Item = Arrow>>(lattice: &'a Lattice, arrows: I) -> Result<Self> {
        let mut bits = Bits::empty();
        for a in arrows {
            if !lattice.is_arrow(a) {
                return Err(Error::not_comparable(lattice, a.src, a.tgt));
            }
            if let Some(i) = lattice.arrow_id(a) {
                bits.insert(i);
            }
        }
        Ok(ArrowSet { lattice, bits })
    }

    pub fn from_pairs(lattice: &'a Lattice, pairs: &[(Elem, Elem)]) -> Result<Self> {
        Self::from_arrows(lattice, pairs.iter().map(|&(s, t)| Arrow::new(s, t)))
    }

    /// Build from `"src->tgt"` label pairs; panics on unknown labels.
    /// Meant for tests and worked examples.
    pub fn from_labels(lattice: &'a Lattice, pairs: &[(&str, &str)]) -> Self {
        let elem = |s: &str| {
            lattice
                .element(s)
                .unwrap_or_else(|| panic!("no element labelled {s}"))
        };
        Self::from_arrows(lattice, pairs.iter().map(|&(s, t)| Arrow::new(elem(s), elem(t))))
            .expect("labelled arrows must be comparable")
    }

    pub fn lattice(&self) -> &'a Lattice {
        self.lattice
    }

    pub fn bits(&self) -> &Bits {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Membership; identities are always members.
    pub fn contains(&self, a: Arrow) -> bool {
        if a.is_identity() {
            return a.src < self.lattice.len();
        }
        self.lattice.arrow_id(a).is_some_and(|i| self.bits.contains(i))
    }

    pub fn contains_pair(&self, src: Elem, tgt: Elem) -> bool {
        self.contains(Arrow::new(src, tgt))
    }

    pub fn iter(&self) -> impl Iterator<Item = Arrow> + 'a {
        let l = self.lattice;
        self.bits.iter().map(move |i| l.arrow(i))
    }

    pub fn to_pairs(&self) -> Vec<(Elem, Elem)> {
        self.iter().map(|a| (a.src, a.tgt)).collect()
    }

    pub fn with(&self, a: Arrow) -> Self {
        let mut out = *self;
        if let Some(i) = self.lattice.arrow_id(a) {
            out.bits.insert(i);
        }
        out
    }

    pub fn without(&self, a: Arrow) -> Self {
        let mut out = *self;
        if let Some(i) = self.lattice.arrow_id(a) {
            out.bits.remove(i);
        }
        out
    }

    fn check_same(&self, other: &ArrowSet<'_>) -> Result<()> {
        if same_lattice(self.lattice, other.lattice) {
            Ok(())
        } else {
            Err(Error::MixedLattices)
        }
    }

    fn with_bits(&self, bits: Bits) -> Self {
        ArrowSet {
            lattice: self.lattice,
            bits,
        }
    }

    pub fn union(&self, other: &ArrowSet<'_>) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.with_bits(self.bits.union(&other.bits)))
    }

    pub fn intersection(&self, other: &ArrowSet<'_>) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.with_bits(self.bits.intersection(&other.bits)))
    }

    pub fn difference(&self, other: &ArrowSet<'_>) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.with_bits(self.bits.difference(&other.bits)))
    }

    /// Complement within the non-identity arrows.
    pub fn complement(&self) -> Self {
        self.with_bits(Bits::full(self.lattice.arrow_count()).difference(&self.bits))
    }

    pub fn is_subset(&self, other: &ArrowSet<'_>) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn is_composition_closed(&self) -> bool {
        self.composition_witness().is_none()
    }

    pub(crate) fn composition_witness(&self) -> Option<(Arrow, Arrow)> {
        let l = self.lattice;
        for f in self.iter() {
            for gi in self.bits.intersection(l.out_of(f.tgt)).iter() {
                let g = l.arrow(gi);
                if !self.bits.contains(l.id_unchecked(f.src, g.tgt)) {
                    return Some((f, g));
                }
            }
        }
        None
    }

    /// For every member `x -> z` and `x <= y <= z`, both `x -> y` and
    /// `y -> z` are members.
    pub fn is_decomposable(&self) -> bool {
        self.decomposition_witness().is_none()
    }

    fn decomposition_witness(&self) -> Option<(Arrow, Elem)> {
        let l = self.lattice;
        for f in self.iter() {
            for y in 0..l.len() {
                if l.lt(f.src, y) && l.lt(y, f.tgt)
                    && !(self.contains_pair(f.src, y) && self.contains_pair(y, f.tgt))
                {
                    return Some((f, y));
                }
            }
        }
        None
    }

    /// `Err(NotDecomposable)` unless this is a wide decomposable
    /// subcategory (composition-closed and decomposable).
    pub fn require_wide_decomposable(&self) -> Result<()> {
        let l = self.lattice;
        if let Some((f, y)) = self.decomposition_witness() {
            return Err(Error::NotDecomposable(format!(
                "{} contains {} but not both factors through {}",
                self,
                l.show_arrow(f),
                l.display_label(y)
            )));
        }
        if let Some((f, g)) = self.composition_witness() {
            return Err(Error::NotDecomposable(format!(
                "{} contains {} and {} but not their composite",
                self,
                l.show_arrow(f),
                l.show_arrow(g)
            )));
        }
        Ok(())
    }

    pub fn is_closed_under(&self, closure: Closure) -> bool {
        let l = self.lattice;
        self.bits.iter().all(|i| match closure {
            Closure::Pullback => l.pullback_mask(i).is_subset(&self.bits),
            Closure::Pushout => l.pushout_mask(i).is_subset(&self.bits),
        })
    }

    /// Composition-closed and closed under pullbacks.
    pub fn is_transfer_system(&self) -> bool {
        self.is_closed_under(Closure::Pullback) && self.is_composition_closed()
    }

    /// Composition-closed and closed under pushouts.
    pub fn is_cotransfer_system(&self) -> bool {
        self.is_closed_under(Closure::Pushout) && self.is_composition_closed()
    }

    pub fn is_system(&self, closure: Closure) -> bool {
        self.is_closed_under(closure) && self.is_composition_closed()
    }

    /// Transfer systems: `x -> z` forces `y -> z` for `x <= y <= z`.
    /// Cotransfer systems: `x -> z` forces `x -> y`.
    pub fn is_saturated(&self) -> Result<bool> {
        let l = self.lattice;
        let forced: fn(Arrow, Elem) -> Arrow = if self.is_transfer_system() {
            |f: Arrow, y: Elem| Arrow::new(y, f.tgt)
        } else if self.is_cotransfer_system() {
            |f: Arrow, y: Elem| Arrow::new(f.src, y)
        } else {
            return Err(Error::NotTransferOrCotransfer);
        };
        let saturated = self.iter().all(|f| {
            (0..l.len())
                .filter(|&y| l.leq(f.src, y) && l.leq(y, f.tgt))
                .all(|y| self.contains(forced(f, y)))
        });
        debug_assert_eq!(saturated, self.is_decomposable());
        Ok(saturated)
    }

    /// Least composition-closed superset.
    pub fn composition_closure(&self) -> Self {
        self.with_bits(composition_closure(self.lattice, self.bits))
    }

    /// Smallest transfer system containing this set: pullback closure,
    /// then composition closure.
    pub fn generate_transfer(&self) -> Self {
        self.with_bits(generate(self.lattice, self.bits, Closure::Pullback))
    }

    /// Smallest cotransfer system containing this set: pushout closure,
    /// then composition closure.
    pub fn generate_cotransfer(&self) -> Self {
        self.with_bits(generate(self.lattice, self.bits, Closure::Pushout))
    }

    pub fn generate(&self, closure: Closure) -> Self {
        self.with_bits(generate(self.lattice, self.bits, closure))
    }

    fn check_pair(&self, other: &ArrowSet<'_>, closure: Closure) -> Result<()> {
        self.check_same(other)?;
        if self.is_system(closure) && other.is_system(closure) {
            Ok(())
        } else {
            Err(match closure {
                Closure::Pullback => Error::NotTransferSystem,
                Closure::Pushout => Error::NotCotransferSystem,
            })
        }
    }

    fn system_join(&self, other: &ArrowSet<'_>, closure: Closure) -> Result<Self> {
        self.check_pair(other, closure)?;
        let union = self.bits.union(&other.bits);
        let joined = composition_closure(self.lattice, union);
        debug_assert_eq!(joined, generate(self.lattice, union, closure));
        Ok(self.with_bits(joined))
    }

    /// Meet in the lattice of transfer systems: intersection.
    pub fn ts_meet(&self, other: &ArrowSet<'_>) -> Result<Self> {
        self.check_pair(other, Closure::Pullback)?;
        Ok(self.with_bits(self.bits.intersection(&other.bits)))
    }

    /// Join in the lattice of transfer systems: composition closure of the
    /// union, which is already pullback-closed.
    pub fn ts_join(&self, other: &ArrowSet<'_>) -> Result<Self> {
        self.system_join(other, Closure::Pullback)
    }

    pub fn cts_meet(&self, other: &ArrowSet<'_>) -> Result<Self> {
        self.check_pair(other, Closure::Pushout)?;
        Ok(self.with_bits(self.bits.intersection(&other.bits)))
    }

    pub fn cts_join(&self, other: &ArrowSet<'_>) -> Result<Self> {
        self.system_join(other, Closure::Pushout)
    }

    /// Largest transfer system contained in this wide decomposable
    /// subcategory: composites of the short arrows all of whose pullbacks
    /// stay inside.
    pub fn t_max(&self) -> Result<Self> {
        self.max_system(Closure::Pullback)
    }

    /// Largest cotransfer system contained in this wide decomposable
    /// subcategory.
    pub fn k_max(&self) -> Result<Self> {
        self.max_system(Closure::Pushout)
    }

    pub fn max_system(&self, closure: Closure) -> Result<Self> {
        self.require_wide_decomposable()?;
        Ok(self.with_bits(max_system(self.lattice, self.bits, closure)))
    }
}

/// Warshall's transitive closure over the arrow bitset.
pub(crate) fn composition_closure(l: &Lattice, mut bits: Bits) -> Bits {
    for k in 0..l.len() {
        let incoming = bits.intersection(l.into(k));
        if incoming.is_empty() {
            continue;
        }
        let outgoing = bits.intersection(l.out_of(k));
        if outgoing.is_empty() {
            continue;
        }
        for i in incoming.iter() {
            let src = l.arrow(i).src;
            for j in outgoing.iter() {
                bits.insert(l.id_unchecked(src, l.arrow(j).tgt));
            }
        }
    }
    bits
}

pub(crate) fn closure_mask(l: &Lattice, id: usize, closure: Closure) -> &Bits {
    match closure {
        Closure::Pullback => l.pullback_mask(id),
        Closure::Pushout => l.pushout_mask(id),
    }
}

pub(crate) fn generate(l: &Lattice, bits: Bits, closure: Closure) -> Bits {
    let mut closed = bits;
    for i in bits.iter() {
        closed.union_with(closure_mask(l, i, closure));
    }
    composition_closure(l, closed)
}

pub(crate) fn max_system(l: &Lattice, q: Bits, closure: Closure) -> Bits {
    let good: Bits = q
        .intersection(l.cover_mask())
        .iter()
        .filter(|&i| closure_mask(l, i, closure).is_subset(&q))
        .collect();
    composition_closure(l, good)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_set<'a>(l: &'a Lattice, cols: usize, pairs: &[((usize, usize), (usize, usize))]) -> ArrowSet<'a> {
        let id = |(i, j): (usize, usize)| i * (cols + 1) + j;
        ArrowSet::from_arrows(l, pairs.iter().map(|&(s, t)| Arrow::new(id(s), id(t)))).unwrap()
    }

    #[test]
    fn composition_closure_on_chain() {
        let c2 = Lattice::chain(2);
        let s = ArrowSet::from_pairs(&c2, &[(0, 1), (1, 2)]).unwrap();
        assert!(!s.is_composition_closed());
        let closed = s.composition_closure();
        assert_eq!(closed, ArrowSet::complete(&c2));
        assert!(closed.is_composition_closed());
        assert_eq!(closed.composition_closure(), closed);
        assert!(ArrowSet::empty(&c2).is_composition_closed());
    }

    #[test]
    fn decomposability() {
        let c2 = Lattice::chain(2);
        assert!(!ArrowSet::from_pairs(&c2, &[(0, 2)]).unwrap().is_decomposable());
        assert!(ArrowSet::from_pairs(&c2, &[(0, 1)]).unwrap().is_decomposable());
        let c4 = Lattice::chain(4);
        // blocks {0,1,2} {3,4}
        let partition = ArrowSet::from_pairs(&c4, &[(0, 1), (1, 2), (0, 2), (3, 4)]).unwrap();
        assert!(partition.is_decomposable());
        assert!(partition.require_wide_decomposable().is_ok());

        let g = Lattice::grid(2, 1).unwrap();
        let middle = grid_set(&g, 1, &[((1, 0), (1, 1))]);
        assert!(middle.is_decomposable());

        let bad = ArrowSet::from_pairs(&c2, &[(0, 1), (1, 2)]).unwrap();
        assert!(matches!(bad.require_wide_decomposable(), Err(Error::NotDecomposable(_))));
    }

    #[test]
    fn transfer_predicates_on_chain() {
        let c2 = Lattice::chain(2);
        assert!(ArrowSet::from_pairs(&c2, &[(0, 1), (0, 2)]).unwrap().is_transfer_system());
        assert!(!ArrowSet::from_pairs(&c2, &[(0, 2)]).unwrap().is_transfer_system());
        assert!(ArrowSet::empty(&c2).is_transfer_system());
        assert!(ArrowSet::from_pairs(&c2, &[(1, 2), (0, 2)]).unwrap().is_cotransfer_system());
        assert!(!ArrowSet::from_pairs(&c2, &[(0, 2)]).unwrap().is_cotransfer_system());
        assert!(ArrowSet::complete(&c2).is_cotransfer_system());
    }

    #[test]
    fn saturation() {
        let c2 = Lattice::chain(2);
        let t = ArrowSet::from_pairs(&c2, &[(0, 1), (0, 2)]).unwrap();
        assert_eq!(t.is_saturated(), Ok(false));
        assert_eq!(ArrowSet::complete(&c2).is_saturated(), Ok(true));
        let neither = ArrowSet::from_pairs(&c2, &[(0, 2)]).unwrap();
        assert_eq!(neither.is_saturated(), Err(Error::NotTransferOrCotransfer));
    }

    #[test]
    fn generated_transfer_system_on_grid() {
        let g = Lattice::grid(2, 1).unwrap();
        let s = grid_set(&g, 1, &[((1, 0), (2, 0)), ((2, 0), (2, 1))]);
        let t = s.generate_transfer();
        let expected = grid_set(
            &g,
            1,
            &[
                ((0, 0), (0, 1)),
                ((1, 0), (1, 1)),
                ((1, 0), (2, 0)),
                ((1, 0), (2, 1)),
                ((2, 0), (2, 1)),
            ],
        );
        assert_eq!(t, expected);
        assert!(t.is_transfer_system());
        assert!(t.is_composition_closed());
        assert!(ArrowSet::empty(&g).generate_transfer().is_empty());
    }

    #[test]
    fn generated_cotransfer_system_on_chain() {
        let c2 = Lattice::chain(2);
        let short = ArrowSet::from_pairs(&c2, &[(0, 1)]).unwrap();
        assert_eq!(short.generate_cotransfer(), short);
        let k = ArrowSet::from_pairs(&c2, &[(0, 2)]).unwrap().generate_cotransfer();
        assert_eq!(k, ArrowSet::from_pairs(&c2, &[(0, 2), (1, 2)]).unwrap());
        assert!(ArrowSet::empty(&c2).generate_cotransfer().is_empty());
    }

    #[test]
    fn meets_and_joins() {
        let sq = Lattice::grid(1, 1).unwrap();
        let vertical = grid_set(&sq, 1, &[((0, 0), (0, 1)), ((1, 0), (1, 1))]);
        let horizontal = grid_set(&sq, 1, &[((0, 0), (1, 0)), ((0, 1), (1, 1))]);
        assert!(vertical.is_transfer_system() && horizontal.is_transfer_system());
        assert!(vertical.ts_meet(&horizontal).unwrap().is_empty());
        assert_eq!(vertical.ts_join(&ArrowSet::empty(&sq)).unwrap(), vertical);
        assert_eq!(vertical.ts_join(&horizontal).unwrap(), ArrowSet::complete(&sq));

        let not_ts = grid_set(&sq, 1, &[((0, 0), (1, 1))]);
        assert_eq!(vertical.ts_join(&not_ts), Err(Error::NotTransferSystem));
        let other = Lattice::chain(3);
        assert_eq!(
            ArrowSet::empty(&other).ts_meet(&ArrowSet::empty(&sq)),
            Err(Error::MixedLattices)
        );
    }

    #[test]
    fn maximal_systems_in_worked_example() {
        let g = Lattice::grid(2, 2).unwrap();
        let w = grid_set(
            &g,
            2,
            &[
                ((0, 0), (0, 1)),
                ((0, 1), (0, 2)),
                ((0, 0), (0, 2)),
                ((1, 1), (1, 2)),
                ((2, 0), (2, 1)),
                ((2, 1), (2, 2)),
                ((2, 0), (2, 2)),
            ],
        );
        let t_max = grid_set(
            &g,
            2,
            &[
                ((0, 0), (0, 1)),
                ((0, 1), (0, 2)),
                ((0, 0), (0, 2)),
                ((1, 1), (1, 2)),
                ((2, 1), (2, 2)),
            ],
        );
        let k_max = grid_set(
            &g,
            2,
            &[
                ((0, 1), (0, 2)),
                ((1, 1), (1, 2)),
                ((2, 0), (2, 1)),
                ((2, 1), (2, 2)),
                ((2, 0), (2, 2)),
            ],
        );
        assert_eq!(w.t_max().unwrap(), t_max);
        assert_eq!(w.k_max().unwrap(), k_max);
        assert_eq!(t_max.is_saturated(), Ok(true));
        assert_eq!(k_max.is_saturated(), Ok(true));
    }

    #[test]
    fn maximal_systems_edge_cases() {
        let p = Lattice::pentagon();
        let w = ArrowSet::from_labels(&p, &[("0", "a"), ("a", "c"), ("0", "c"), ("0", "b")]);
        assert_eq!(w.k_max().unwrap(), ArrowSet::from_labels(&p, &[("a", "c")]));
        assert!(ArrowSet::empty(&p).k_max().unwrap().is_empty());
        assert_eq!(ArrowSet::complete(&p).t_max().unwrap(), ArrowSet::complete(&p));

        let c2 = Lattice::chain(2);
        let not_decomposable = ArrowSet::from_pairs(&c2, &[(0, 2)]).unwrap();
        assert!(matches!(not_decomposable.t_max(), Err(Error::NotDecomposable(_))));
    }

    #[test]
    fn display_uses_labels() {
        let d = Lattice::diamond(2).unwrap();
        let s = ArrowSet::from_labels(&d, &[("bot", "1"), ("2", "top")]);
        assert_eq!(s.to_string(), "{⊥->1, 2->⊤}");
    }
}
