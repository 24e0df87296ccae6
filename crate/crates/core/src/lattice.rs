//! Finite lattices viewed as thin categories.
//!
//! Elements are dense ids `0..n` with a display label. The order, meet and
//! join are precomputed as tables, and every comparable pair `x < y` gets a
//! stable arrow index (sorted by `(src, tgt)`) that [`crate::ArrowSet`]
//! bitsets are built on. Per-arrow pullback, pushout and extension masks are
//! cached here too, since every closure operation in the crate needs them.

use std::fmt;

use crate::bits::{Bits, MAX_ARROWS};
use crate::error::{Error, Result};

pub type Elem = usize;

const NO_ARROW: u32 = u32::MAX;

/// A morphism `src -> tgt` of the lattice, i.e. a pair with `src <= tgt`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arrow {
    pub src: Elem,
    pub tgt: Elem,
}

impl Arrow {
    pub const fn new(src: Elem, tgt: Elem) -> Self {
        Arrow { src, tgt }
    }

    pub fn is_identity(&self) -> bool {
        self.src == self.tgt
    }
}

/// Which named family a lattice was built as, if any.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    Chain(usize),
    /// `[m] x [n]`; element `(i, j)` has id `i * (n + 1) + j`.
    Grid(usize, usize),
    Diamond(usize),
    Pentagon,
    Other,
}

#[derive(Clone)]
pub struct Lattice {
    labels: Vec<String>,
    leq: Vec<bool>,
    meet: Vec<Elem>,
    join: Vec<Elem>,
    covers: Vec<(Elem, Elem)>,
    bottom: Elem,
    top: Elem,
    shape: Shape,
    arrows: Vec<Arrow>,
    arrow_ids: Vec<u32>,
    cover_mask: Bits,
    pullbacks: Vec<Bits>,
    pushouts: Vec<Bits>,
    down_ext: Vec<Bits>,
    up_ext: Vec<Bits>,
    out_of: Vec<Bits>,
    into: Vec<Bits>,
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.leq == other.leq
    }
}

impl Eq for Lattice {}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let covers: Vec<String> = self
            .covers
            .iter()
            .map(|&(x, y)| format!("{}->{}", self.labels[x], self.labels[y]))
            .collect();
        f.debug_struct("Lattice")
            .field("labels", &self.labels)
            .field("covers", &covers)
            .finish()
    }
}

impl Lattice {
    /// The total order `[n] = {0 < 1 < .. < n}`.
    pub fn chain(n: usize) -> Lattice {
        let labels = (0..=n).map(|i| i.to_string()).collect();
        let covers = (0..n).map(|i| (i, i + 1)).collect::<Vec<_>>();
        let mut l = Lattice::from_cover_relations(labels, &covers)
            .expect("chains are lattices");
        l.shape = Shape::Chain(n);
        l
    }

    /// Cartesian product with the componentwise order. Element `(i, j)` has
    /// id `i * q.len() + j` and label `"(i,j)"`.
    pub fn product(p: &Lattice, q: &Lattice) -> Result<Lattice> {
        let (np, nq) = (p.len(), q.len());
        let id = |i: Elem, j: Elem| i * nq + j;
        let mut labels = Vec::with_capacity(np * nq);
        for i in 0..np {
            for j in 0..nq {
                labels.push(format!("({},{})", p.labels[i], q.labels[j]));
            }
        }
        let mut covers = Vec::new();
        for i in 0..np {
            for j in 0..nq {
                for &(a, b) in &p.covers {
                    if a == i {
                        covers.push((id(i, j), id(b, j)));
                    }
                }
                for &(a, b) in &q.covers {
                    if a == j {
                        covers.push((id(i, j), id(i, b)));
                    }
                }
            }
        }
        let mut l = Lattice::from_cover_relations(labels, &covers)?;
        if let (Shape::Chain(m), Shape::Chain(n)) = (&p.shape, &q.shape) {
            l.shape = Shape::Grid(*m, *n);
        }
        Ok(l)
    }

    /// `[m] x [n]`.
    pub fn grid(m: usize, n: usize) -> Result<Lattice> {
        Lattice::product(&Lattice::chain(m), &Lattice::chain(n))
    }

    /// Glue `p` and `q` along their bottoms and along their tops. Ids run
    /// bottom, the inner elements of `p`, the inner elements of `q`, top.
    pub fn parallel_composition(p: &Lattice, q: &Lattice) -> Result<Lattice> {
        if p.len() < 2 || q.len() < 2 {
            return Err(Error::InvalidArgument(
                "parallel composition needs lattices with at least two elements".into(),
            ));
        }
        let inner = |l: &Lattice| -> Vec<Elem> {
            (0..l.len()).filter(|&x| x != l.bottom && x != l.top).collect()
        };
        let (pi, qi) = (inner(p), inner(q));
        let n = 2 + pi.len() + qi.len();
        let top = n - 1;
        // (side, original id) for each new id
        let mut origin: Vec<Option<(bool, Elem)>> = vec![None];
        origin.extend(pi.iter().map(|&x| Some((false, x))));
        origin.extend(qi.iter().map(|&x| Some((true, x))));
        origin.push(None);

        let mut labels = vec![p.labels[p.bottom].clone()];
        labels.extend(pi.iter().map(|&x| p.labels[x].clone()));
        labels.extend(qi.iter().map(|&x| q.labels[x].clone()));
        labels.push(p.labels[p.top].clone());

        let mut leq = vec![false; n * n];
        for x in 0..n {
            for y in 0..n {
                leq[x * n + y] = match (origin[x], origin[y]) {
                    _ if x == y => true,
                    _ if x == 0 || y == top => true,
                    _ if y == 0 || x == top => false,
                    (Some((sx, a)), Some((sy, b))) => {
                        sx == sy && if sx { q.leq(a, b) } else { p.leq(a, b) }
                    }
                    _ => unreachable!(),
                };
            }
        }
        Lattice::from_order(labels, &leq)
    }

    /// `[2]^{*n}`: bottom, `n` pairwise incomparable elements, top.
    pub fn diamond(n: usize) -> Result<Lattice> {
        if n == 0 {
            return Err(Error::InvalidArgument("diamond(n) needs n >= 1".into()));
        }
        let two = Lattice::chain(2);
        let mut acc = two.clone();
        for _ in 1..n {
            acc = Lattice::parallel_composition(&acc, &two)?;
        }
        let mut labels = vec!["bot".to_string()];
        labels.extend((1..=n).map(|i| i.to_string()));
        labels.push("top".to_string());
        let mut l = Lattice::from_cover_relations(labels, &acc.covers)?;
        l.shape = Shape::Diamond(n);
        Ok(l)
    }

    /// The pentagon `N5`: `0 < a < c < 1` and `0 < b < 1`.
    pub fn pentagon() -> Lattice {
        let labels = ["0", "a", "b", "c", "1"].map(String::from).to_vec();
        let covers = [(0, 1), (1, 3), (3, 4), (0, 2), (2, 4)];
        let mut l = Lattice::from_cover_relations(labels, &covers).expect("N5 is a lattice");
        l.shape = Shape::Pentagon;
        l
    }

    /// The same elements with the order reversed.
    pub fn order_dual(&self) -> Lattice {
        let covers: Vec<_> = self.covers.iter().map(|&(x, y)| (y, x)).collect();
        Lattice::from_cover_relations(self.labels.clone(), &covers)
            .expect("the dual of a lattice is a lattice")
    }

    /// Build from the Hasse diagram, validating every lattice axiom.
    pub fn from_cover_relations(labels: Vec<String>, covers: &[(Elem, Elem)]) -> Result<Lattice> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidArgument("a lattice needs at least one element".into()));
        }
        let mut succ = vec![Vec::new(); n];
        for &(x, y) in covers {
            for e in [x, y] {
                if e >= n {
                    return Err(Error::UnknownElement(e.to_string()));
                }
            }
            if x == y {
                return Err(Error::Cycle(vec![labels[x].clone()]));
            }
            if succ[x].contains(&y) {
                return Err(Error::Parse(format!(
                    "duplicate cover {} -> {}",
                    labels[x], labels[y]
                )));
            }
            succ[x].push(y);
        }
        if let Some(cycle) = find_cycle(&succ) {
            return Err(Error::Cycle(cycle.into_iter().map(|e| labels[e].clone()).collect()));
        }

        // reflexive-transitive closure by DFS from each element
        let mut leq = vec![false; n * n];
        for x in 0..n {
            let mut stack = vec![x];
            leq[x * n + x] = true;
            while let Some(u) = stack.pop() {
                for &v in &succ[u] {
                    if !leq[x * n + v] {
                        leq[x * n + v] = true;
                        stack.push(v);
                    }
                }
            }
        }
        for &(x, y) in covers {
            if (0..n).any(|z| z != x && z != y && leq[x * n + z] && leq[z * n + y]) {
                return Err(Error::NonCover(labels[x].clone(), labels[y].clone()));
            }
        }
        Lattice::build(labels, leq)
    }

    /// Build from a full order table; covers are derived.
    fn from_order(labels: Vec<String>, leq: &[bool]) -> Result<Lattice> {
        let n = labels.len();
        let lt = |x: Elem, y: Elem| x != y && leq[x * n + y];
        let mut covers = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if lt(x, y) && !(0..n).any(|z| lt(x, z) && lt(z, y)) {
                    covers.push((x, y));
                }
            }
        }
        Lattice::from_cover_relations(labels, &covers)
    }

    fn build(labels: Vec<String>, leq: Vec<bool>) -> Result<Lattice> {
        let n = labels.len();
        let le = |x: Elem, y: Elem| leq[x * n + y];
        let mut meet = vec![0; n * n];
        let mut join = vec![0; n * n];
        for x in 0..n {
            for y in x..n {
                let lower: Vec<Elem> = (0..n).filter(|&z| le(z, x) && le(z, y)).collect();
                let glb = lower.iter().copied().find(|&m| lower.iter().all(|&z| le(z, m)));
                let upper: Vec<Elem> = (0..n).filter(|&z| le(x, z) && le(y, z)).collect();
                let lub = upper.iter().copied().find(|&j| upper.iter().all(|&z| le(j, z)));
                let fail = |which| Error::NotALattice {
                    x: labels[x].clone(),
                    y: labels[y].clone(),
                    which,
                };
                let m = glb.ok_or_else(|| fail("meet"))?;
                let j = lub.ok_or_else(|| fail("join"))?;
                meet[x * n + y] = m;
                meet[y * n + x] = m;
                join[x * n + y] = j;
                join[y * n + x] = j;
            }
        }
        let bottom = (0..n).fold(0, |acc, x| meet[acc * n + x]);
        let top = (0..n).fold(0, |acc, x| join[acc * n + x]);

        let mut arrows = Vec::new();
        let mut arrow_ids = vec![NO_ARROW; n * n];
        for x in 0..n {
            for y in 0..n {
                if x != y && le(x, y) {
                    arrow_ids[x * n + y] = arrows.len() as u32;
                    arrows.push(Arrow::new(x, y));
                }
            }
        }
        if arrows.len() > MAX_ARROWS {
            return Err(Error::TooManyArrows(arrows.len()));
        }

        let mut covers = Vec::new();
        let mut cover_mask = Bits::empty();
        for (i, a) in arrows.iter().enumerate() {
            let between = (0..n).any(|z| z != a.src && z != a.tgt && le(a.src, z) && le(z, a.tgt));
            if !between {
                covers.push((a.src, a.tgt));
                cover_mask.insert(i);
            }
        }

        let id = |x: Elem, y: Elem| arrow_ids[x * n + y];
        let mut pullbacks = Vec::with_capacity(arrows.len());
        let mut pushouts = Vec::with_capacity(arrows.len());
        let mut down_ext = Vec::with_capacity(arrows.len());
        let mut up_ext = Vec::with_capacity(arrows.len());
        for a in &arrows {
            let (mut pb, mut po, mut de, mut ue) =
                (Bits::empty(), Bits::empty(), Bits::empty(), Bits::empty());
            for z in 0..n {
                if le(z, a.tgt) {
                    let s = meet[a.src * n + z];
                    if s != z {
                        pb.insert(id(s, z) as usize);
                    }
                }
                if le(a.src, z) {
                    let t = join[a.tgt * n + z];
                    if t != z {
                        po.insert(id(z, t) as usize);
                    }
                }
                if le(z, a.src) {
                    de.insert(id(z, a.tgt) as usize);
                }
                if le(a.tgt, z) {
                    ue.insert(id(a.src, z) as usize);
                }
            }
            pullbacks.push(pb);
            pushouts.push(po);
            down_ext.push(de);
            up_ext.push(ue);
        }
        let mut out_of = vec![Bits::empty(); n];
        let mut into = vec![Bits::empty(); n];
        for (i, a) in arrows.iter().enumerate() {
            out_of[a.src].insert(i);
            into[a.tgt].insert(i);
        }

        Ok(Lattice {
            labels,
            leq,
            meet,
            join,
            covers,
            bottom,
            top,
            shape: Shape::Other,
            arrows,
            arrow_ids,
            cover_mask,
            pullbacks,
            pushouts,
            down_ext,
            up_ext,
            out_of,
            into,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: Elem) -> &str {
        &self.labels[x]
    }

    /// Label for human-facing output: `bot`/`top` render as `⊥`/`⊤`.
    pub fn display_label(&self, x: Elem) -> &str {
        match self.labels[x].as_str() {
            "bot" => "⊥",
            "top" => "⊤",
            s => s,
        }
    }

    pub fn element(&self, label: &str) -> Option<Elem> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn bottom(&self) -> Elem {
        self.bottom
    }

    pub fn top(&self) -> Elem {
        self.top
    }

    #[inline]
    pub fn leq(&self, x: Elem, y: Elem) -> bool {
        self.leq[x * self.len() + y]
    }

    #[inline]
    pub fn lt(&self, x: Elem, y: Elem) -> bool {
        x != y && self.leq(x, y)
    }

    #[inline]
    pub fn meet(&self, x: Elem, y: Elem) -> Elem {
        self.meet[x * self.len() + y]
    }

    #[inline]
    pub fn join(&self, x: Elem, y: Elem) -> Elem {
        self.join[x * self.len() + y]
    }

    /// Cover pairs `(x, y)` with `y` covering `x`, sorted.
    pub fn covers(&self) -> &[(Elem, Elem)] {
        &self.covers
    }

    pub fn is_cover(&self, x: Elem, y: Elem) -> bool {
        self.arrow_id(Arrow::new(x, y))
            .is_some_and(|i| self.cover_mask.contains(i))
    }

    /// All non-identity arrows in index order.
    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn arrow(&self, id: usize) -> Arrow {
        self.arrows[id]
    }

    /// Index of a non-identity arrow; `None` for identities and
    /// incomparable pairs.
    #[inline]
    pub fn arrow_id(&self, a: Arrow) -> Option<usize> {
        let n = self.len();
        if a.src >= n || a.tgt >= n {
            return None;
        }
        match self.arrow_ids[a.src * n + a.tgt] {
            NO_ARROW => None,
            i => Some(i as usize),
        }
    }

    pub(crate) fn id_unchecked(&self, x: Elem, y: Elem) -> usize {
        self.arrow_ids[x * self.len() + y] as usize
    }

    pub fn is_arrow(&self, a: Arrow) -> bool {
        a.src < self.len() && a.tgt < self.len() && self.leq(a.src, a.tgt)
    }

    fn check_arrow(&self, f: Arrow) -> Result<()> {
        if self.is_arrow(f) {
            Ok(())
        } else {
            Err(Error::not_comparable(self, f.src, f.tgt))
        }
    }

    /// Pullback of `f: x -> y` along `z -> y`, namely `(x ∧ z) -> z`.
    pub fn pullback_arrow(&self, f: Arrow, z: Elem) -> Result<Arrow> {
        self.check_arrow(f)?;
        if z >= self.len() || !self.leq(z, f.tgt) {
            return Err(Error::NotBelowTarget {
                arrow: self.show_arrow(f),
                z: self.element_name(z),
            });
        }
        Ok(Arrow::new(self.meet(f.src, z), z))
    }

    /// Pushout of `f: x -> y` along `x -> z`, namely `z -> (y ∨ z)`.
    pub fn pushout_arrow(&self, f: Arrow, z: Elem) -> Result<Arrow> {
        self.check_arrow(f)?;
        if z >= self.len() || !self.leq(f.src, z) {
            return Err(Error::NotAboveSource {
                arrow: self.show_arrow(f),
                z: self.element_name(z),
            });
        }
        Ok(Arrow::new(z, self.join(f.tgt, z)))
    }

    fn element_name(&self, z: Elem) -> String {
        self.labels.get(z).cloned().unwrap_or_else(|| z.to_string())
    }

    pub fn show_arrow(&self, a: Arrow) -> String {
        format!("{}->{}", self.display_label(a.src), self.display_label(a.tgt))
    }

    /// Length of the longest chain from the bottom to `x`.
    pub fn rank(&self, x: Elem) -> usize {
        // elements sorted by number of elements below them are a linear extension
        let mut order: Vec<Elem> = (0..self.len()).collect();
        order.sort_by_key(|&e| (0..self.len()).filter(|&z| self.leq(z, e)).count());
        let mut rank = vec![0; self.len()];
        for &e in &order {
            for &(a, b) in &self.covers {
                if b == e {
                    rank[e] = rank[e].max(rank[a] + 1);
                }
            }
        }
        rank[x]
    }

    /// The order table after renumbering elements by `(rank, label)`.
    /// Two constructor outputs with equal canonical forms are isomorphic.
    pub fn canonical_order(&self) -> Vec<bool> {
        let mut order: Vec<Elem> = (0..self.len()).collect();
        order.sort_by(|&a, &b| (self.rank(a), &self.labels[a]).cmp(&(self.rank(b), &self.labels[b])));
        let n = self.len();
        let mut out = vec![false; n * n];
        for (i, &a) in order.iter().enumerate() {
            for (j, &b) in order.iter().enumerate() {
                out[i * n + j] = self.leq(a, b);
            }
        }
        out
    }

    pub fn same_shape_as(&self, other: &Lattice) -> bool {
        self.len() == other.len() && self.canonical_order() == other.canonical_order()
    }

    pub(crate) fn cover_mask(&self) -> &Bits {
        &self.cover_mask
    }

    /// Non-identity pullbacks of arrow `id` (including itself).
    pub(crate) fn pullback_mask(&self, id: usize) -> &Bits {
        &self.pullbacks[id]
    }

    /// Non-identity pushouts of arrow `id` (including itself).
    pub(crate) fn pushout_mask(&self, id: usize) -> &Bits {
        &self.pushouts[id]
    }

    /// `{z -> y | z <= x}` for arrow `id = x -> y`.
    pub(crate) fn down_mask(&self, id: usize) -> &Bits {
        &self.down_ext[id]
    }

    /// `{x -> w | y <= w}` for arrow `id = x -> y`.
    pub(crate) fn up_mask(&self, id: usize) -> &Bits {
        &self.up_ext[id]
    }

    pub(crate) fn out_of(&self, x: Elem) -> &Bits {
        &self.out_of[x]
    }

    pub(crate) fn into(&self, y: Elem) -> &Bits {
        &self.into[y]
    }
}

fn find_cycle(succ: &[Vec<Elem>]) -> Option<Vec<Elem>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    let n = succ.len();
    let mut mark = vec![Mark::New; n];
    let mut path: Vec<Elem> = Vec::new();
    for root in 0..n {
        if mark[root] != Mark::New {
            continue;
        }
        // (node, next successor position)
        let mut stack = vec![(root, 0usize)];
        mark[root] = Mark::Active;
        path.push(root);
        while let Some(frame) = stack.last_mut() {
            let u = frame.0;
            if frame.1 < succ[u].len() {
                let v = succ[u][frame.1];
                frame.1 += 1;
                match mark[v] {
                    Mark::Active => {
                        let start = path.iter().position(|&e| e == v).unwrap();
                        return Some(path[start..].to_vec());
                    }
                    Mark::New => {
                        mark[v] = Mark::Active;
                        path.push(v);
                        stack.push((v, 0));
                    }
                    Mark::Done => {}
                }
            } else {
                mark[u] = Mark::Done;
                path.pop();
                stack.pop();
            }
        }
    }
    None
}
