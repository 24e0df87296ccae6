//! Backtracking search over (co)transfer systems between two bounds.
//!
//! Arrows are decided in index order. Excluding an arrow is always possible;
//! including one replaces the included set by the system it generates, and
//! the branch dies if that touches an excluded arrow. Every surviving leaf
//! is a distinct system, so the walk never revisits a solution.

use crate::arrows::{generate, Closure};
use crate::bits::Bits;
use crate::lattice::Lattice;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Node {
    included: Bits,
    excluded: Bits,
    next: usize,
}

impl Node {
    /// Root node for systems `S` with `lower ⊆ S ⊆ upper`, or `None` when
    /// no such system exists.
    pub(crate) fn root(l: &Lattice, closure: Closure, lower: Bits, upper: Bits) -> Option<Node> {
        let excluded = Bits::full(l.arrow_count()).difference(&upper);
        let included = generate(l, lower, closure);
        if included.intersects(&excluded) {
            return None;
        }
        Some(Node {
            included,
            excluded,
            next: 0,
        })
    }

    fn is_leaf(&self, l: &Lattice) -> bool {
        self.next >= l.arrow_count()
    }

    /// Advance past decided arrows; returns the children in visiting order
    /// (exclude branch first).
    fn expand(mut self, l: &Lattice, closure: Closure) -> (Option<Node>, Option<Node>) {
        while self.next < l.arrow_count()
            && (self.included.contains(self.next) || self.excluded.contains(self.next))
        {
            self.next += 1;
        }
        if self.is_leaf(l) {
            return (Some(self), None);
        }
        let i = self.next;
        let mut out = self;
        out.excluded.insert(i);
        out.next = i + 1;
        let mut with = self.included;
        with.insert(i);
        let grown = generate(l, with, closure);
        let inn = if grown.intersects(&self.excluded) {
            None
        } else {
            Some(Node {
                included: grown,
                excluded: self.excluded,
                next: i + 1,
            })
        };
        (Some(out), inn)
    }
}

/// Depth-first pull iterator over the systems below a node.
pub(crate) struct SystemSearch<'l> {
    lattice: &'l Lattice,
    closure: Closure,
    stack: Vec<Node>,
}

impl<'l> SystemSearch<'l> {
    pub(crate) fn new(lattice: &'l Lattice, closure: Closure, lower: Bits, upper: Bits) -> Self {
        Self::from_nodes(lattice, closure, Node::root(lattice, closure, lower, upper).into_iter().collect())
    }

    pub(crate) fn from_nodes(lattice: &'l Lattice, closure: Closure, mut nodes: Vec<Node>) -> Self {
        nodes.reverse();
        SystemSearch {
            lattice,
            closure,
            stack: nodes,
        }
    }
}

impl Iterator for SystemSearch<'_> {
    type Item = Bits;

    fn next(&mut self) -> Option<Bits> {
        while let Some(node) = self.stack.pop() {
            if node.is_leaf(self.lattice) {
                return Some(node.included);
            }
            match node.expand(self.lattice, self.closure) {
                (Some(out), None) if out.is_leaf(self.lattice) => return Some(out.included),
                (out, inn) => {
                    self.stack.extend(inn);
                    self.stack.extend(out);
                }
            }
        }
        None
    }
}

/// Open nodes `depth` decisions below `root`, in visiting order. Subtrees
/// of the returned nodes partition the solutions, and concatenating their
/// walks reproduces the sequential order.
pub(crate) fn frontier(l: &Lattice, closure: Closure, root: Node, depth: usize) -> Vec<Node> {
    let mut level = vec![root];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(level.len() * 2);
        for node in level {
            if node.is_leaf(l) {
                next.push(node);
                continue;
            }
            let (out, inn) = node.expand(l, closure);
            next.extend(out);
            next.extend(inn);
        }
        level = next;
    }
    level
}

/// Depth-first walk over subsets of the cover arrows, exclude first; yields
/// the composition closure of each subset whose closure is decomposable.
pub(crate) struct CoverSubsets<'l> {
    lattice: &'l Lattice,
    covers: Vec<usize>,
    stack: Vec<(Bits, usize)>,
}

impl<'l> CoverSubsets<'l> {
    pub(crate) fn new(lattice: &'l Lattice) -> Self {
        Self::from_prefixes(lattice, vec![(Bits::empty(), 0)])
    }

    pub(crate) fn covers(lattice: &Lattice) -> Vec<usize> {
        lattice.cover_mask().iter().collect()
    }

    /// Resume from `(chosen covers, number of covers decided)` prefixes.
    pub(crate) fn from_prefixes(lattice: &'l Lattice, mut prefixes: Vec<(Bits, usize)>) -> Self {
        prefixes.reverse();
        CoverSubsets {
            lattice,
            covers: Self::covers(lattice),
            stack: prefixes,
        }
    }
}

/// All `(chosen, decided)` prefixes after `depth` cover decisions.
pub(crate) fn cover_prefixes(l: &Lattice, depth: usize) -> Vec<(Bits, usize)> {
    let covers = CoverSubsets::covers(l);
    let depth = depth.min(covers.len());
    let mut level = vec![(Bits::empty(), 0)];
    for k in 0..depth {
        level = level
            .into_iter()
            .flat_map(|(chosen, _)| {
                let mut with = chosen;
                with.insert(covers[k]);
                [(chosen, k + 1), (with, k + 1)]
            })
            .collect();
    }
    level
}

impl Iterator for CoverSubsets<'_> {
    type Item = Bits;

    fn next(&mut self) -> Option<Bits> {
        while let Some((chosen, k)) = self.stack.pop() {
            if k == self.covers.len() {
                let closed = crate::arrows::composition_closure(self.lattice, chosen);
                if crate::arrows::ArrowSet::from_bits(self.lattice, closed).is_decomposable() {
                    return Some(closed);
                }
                continue;
            }
            let mut with = chosen;
            with.insert(self.covers[k]);
            self.stack.push((with, k + 1));
            self.stack.push((chosen, k + 1));
        }
        None
    }
}
