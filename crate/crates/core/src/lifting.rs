//! Lifting properties and weak factorization systems.
//!
//! In a poset, a square from `i: a -> b` to `p: x -> y` exists iff `a <= x`
//! and `b <= y`, and a diagonal exists iff `b <= x`. The brute-force lifter
//! computations below use only that fact; the closed forms `left_lift` and
//! `right_lift` go through the downward/upward extensions instead.

use std::fmt;

use crate::arrows::{same_lattice, ArrowSet};
use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::lattice::{Arrow, Lattice};

/// `i ⊡ p`: every commutative square from `i` to `p` has a diagonal filler.
pub fn lifts_against(l: &Lattice, i: Arrow, p: Arrow) -> bool {
    let square = l.leq(i.src, p.src) && l.leq(i.tgt, p.tgt);
    !square || l.leq(i.tgt, p.src)
}

/// Every non-identity `f` with `f ⊡ g` for all `g` in `s`.
pub fn left_lifters_oracle<'a>(s: &ArrowSet<'a>) -> ArrowSet<'a> {
    let l = s.lattice();
    let bits = (0..l.arrow_count())
        .filter(|&f| s.iter().all(|g| lifts_against(l, l.arrow(f), g)))
        .collect();
    ArrowSet::from_bits(l, bits)
}

/// Every non-identity `g` with `f ⊡ g` for all `f` in `s`.
pub fn right_lifters_oracle<'a>(s: &ArrowSet<'a>) -> ArrowSet<'a> {
    let l = s.lattice();
    let bits = (0..l.arrow_count())
        .filter(|&g| s.iter().all(|f| lifts_against(l, f, l.arrow(g))))
        .collect();
    ArrowSet::from_bits(l, bits)
}

/// `{z -> y | z <= x < y, x -> y in t}`: sources dragged downward.
pub fn downward_extension<'a>(t: &ArrowSet<'a>) -> ArrowSet<'a> {
    let l = t.lattice();
    let mut bits = Bits::empty();
    for i in t.bits().iter() {
        bits.union_with(l.down_mask(i));
    }
    ArrowSet::from_bits(l, bits)
}

/// `{z -> y | z < x <= y, z -> x in k}`: targets dragged upward.
pub fn upward_extension<'a>(k: &ArrowSet<'a>) -> ArrowSet<'a> {
    let l = k.lattice();
    let mut bits = Bits::empty();
    for i in k.bits().iter() {
        bits.union_with(l.up_mask(i));
    }
    ArrowSet::from_bits(l, bits)
}

/// Left lifting class of a transfer system: the complement of its
/// downward extension.
pub fn left_lift<'a>(t: &ArrowSet<'a>) -> Result<ArrowSet<'a>> {
    if !t.is_transfer_system() {
        return Err(Error::NotTransferSystem);
    }
    let out = downward_extension(t).complement();
    debug_assert_eq!(out, left_lifters_oracle(t));
    Ok(out)
}

/// Right lifting class of a cotransfer system: the complement of its
/// upward extension.
pub fn right_lift<'a>(k: &ArrowSet<'a>) -> Result<ArrowSet<'a>> {
    if !k.is_cotransfer_system() {
        return Err(Error::NotCotransferSystem);
    }
    let out = upward_extension(k).complement();
    debug_assert_eq!(out, right_lifters_oracle(k));
    Ok(out)
}

/// A weak factorization system `(L, R)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Wfs<'a> {
    left: ArrowSet<'a>,
    right: ArrowSet<'a>,
}

impl<'a> Wfs<'a> {
    /// `(⊡T, T)`.
    pub fn from_transfer(t: &ArrowSet<'a>) -> Result<Self> {
        let left = left_lift(t)?;
        Ok(Wfs { left, right: *t })
    }

    /// `(K, K⊡)`.
    pub fn from_cotransfer(k: &ArrowSet<'a>) -> Result<Self> {
        let right = right_lift(k)?;
        Ok(Wfs { left: *k, right })
    }

    /// Checked construction from both classes.
    pub fn new(left: ArrowSet<'a>, right: ArrowSet<'a>) -> Result<Self> {
        match validate_wfs(&left, &right).failure {
            None => Ok(Wfs { left, right }),
            Some(WfsFailure::MixedLattices) => Err(Error::MixedLattices),
            Some(f) => Err(Error::PreconditionViolated(f.to_string())),
        }
    }

    pub fn left(&self) -> &ArrowSet<'a> {
        &self.left
    }

    pub fn right(&self) -> &ArrowSet<'a> {
        &self.right
    }

    pub fn lattice(&self) -> &'a Lattice {
        self.left.lattice()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WfsFailure {
    MixedLattices,
    /// No `z` with `x -> z` in L and `z -> y` in R.
    NoFactorization(String),
    /// L differs from the left lifters of R at this arrow.
    LeftClass(String),
    /// R differs from the right lifters of L at this arrow.
    RightClass(String),
}

impl fmt::Display for WfsFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WfsFailure::MixedLattices => write!(f, "classes live on different lattices"),
            WfsFailure::NoFactorization(a) => write!(f, "{a} has no (L, R) factorization"),
            WfsFailure::LeftClass(a) => write!(f, "left class differs from the left lifters of the right class at {a}"),
            WfsFailure::RightClass(a) => write!(f, "right class differs from the right lifters of the left class at {a}"),
        }
    }
}

/// Outcome of [`validate_wfs`]: `failure` holds the first violated
/// condition with a witness arrow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WfsDiagnosis {
    pub failure: Option<WfsFailure>,
}

impl WfsDiagnosis {
    pub fn is_valid(&self) -> bool {
        self.failure.is_none()
    }
}

/// Check factorization of every arrow and both lifting equalities using the
/// brute-force lifters.
pub fn validate_wfs(left: &ArrowSet<'_>, right: &ArrowSet<'_>) -> WfsDiagnosis {
    let fail = |f| WfsDiagnosis { failure: Some(f) };
    if !same_lattice(left.lattice(), right.lattice()) {
        return fail(WfsFailure::MixedLattices);
    }
    let l = left.lattice();
    for &a in l.arrows() {
        let factors = (0..l.len()).any(|z| {
            l.leq(a.src, z) && l.leq(z, a.tgt) && left.contains_pair(a.src, z) && right.contains_pair(z, a.tgt)
        });
        if !factors {
            return fail(WfsFailure::NoFactorization(l.show_arrow(a)));
        }
    }
    let lifters = left_lifters_oracle(right);
    if let Some(i) = lifters.bits().symmetric_difference(left.bits()).iter().next() {
        return fail(WfsFailure::LeftClass(l.show_arrow(l.arrow(i))));
    }
    let lifters = right_lifters_oracle(left);
    if let Some(i) = lifters.bits().symmetric_difference(right.bits()).iter().next() {
        return fail(WfsFailure::RightClass(l.show_arrow(l.arrow(i))));
    }
    WfsDiagnosis { failure: None }
}
