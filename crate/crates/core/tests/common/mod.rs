//! Definition-level oracles shared by the integration tests. Nothing here
//! uses the closed forms (extensions, maximal systems, interval bounds) the
//! library computes with; only the order relation of the lattice.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use latmodel::bits::Bits;
use latmodel::model::ModelStructure;
use latmodel::{Arrow, ArrowSet, Lattice};

pub fn catalan(n: u64) -> u64 {
    // binom(2n, n) / (n + 1) via exact u128 products
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for k in 1..=n as u128 {
        num *= n as u128 + k;
        den *= k;
    }
    (num / den / (n as u128 + 1)) as u64
}

pub fn all_subsets(l: &Lattice) -> impl Iterator<Item = ArrowSet<'_>> {
    let m = l.arrow_count();
    assert!(m <= 20, "brute force over {m} arrows");
    (0u32..1 << m).map(move |mask| ArrowSet::from_bits(l, (0..m).filter(|i| mask >> i & 1 == 1).collect()))
}

fn has(l: &Lattice, s: &ArrowSet<'_>, x: usize, y: usize) -> bool {
    x == y || (l.leq(x, y) && s.bits().contains(l.arrow_id(Arrow::new(x, y)).unwrap()))
}

pub fn lifts(l: &Lattice, i: Arrow, p: Arrow) -> bool {
    !(l.leq(i.src, p.src) && l.leq(i.tgt, p.tgt)) || l.leq(i.tgt, p.src)
}

pub fn left_lifters<'a>(s: &ArrowSet<'a>) -> ArrowSet<'a> {
    let l = s.lattice();
    let bits: Bits = (0..l.arrow_count())
        .filter(|&f| s.iter().all(|g| lifts(l, l.arrow(f), g)))
        .collect();
    ArrowSet::from_bits(l, bits)
}

pub fn right_lifters<'a>(s: &ArrowSet<'a>) -> ArrowSet<'a> {
    let l = s.lattice();
    let bits: Bits = (0..l.arrow_count())
        .filter(|&g| s.iter().all(|f| lifts(l, f, l.arrow(g))))
        .collect();
    ArrowSet::from_bits(l, bits)
}

/// Transfer system straight from the definition: contains identities,
/// closed under composition and under pullback along every `z <= y`.
pub fn is_transfer(s: &ArrowSet<'_>) -> bool {
    let l = s.lattice();
    s.iter().all(|f| {
        (0..l.len()).all(|z| !l.leq(z, f.tgt) || has(l, s, l.meet(f.src, z), z))
            && (0..l.len()).all(|w| !has(l, s, f.tgt, w) || !l.leq(f.tgt, w) || has(l, s, f.src, w))
    })
}

pub fn is_cotransfer(s: &ArrowSet<'_>) -> bool {
    let l = s.lattice();
    s.iter().all(|f| {
        (0..l.len()).all(|z| !l.leq(f.src, z) || has(l, s, z, l.join(f.tgt, z)))
            && (0..l.len()).all(|w| !has(l, s, f.tgt, w) || !l.leq(f.tgt, w) || has(l, s, f.src, w))
    })
}

pub fn is_decomposable_subcategory(s: &ArrowSet<'_>) -> bool {
    let l = s.lattice();
    let n = l.len();
    (0..n).all(|x| {
        (0..n).all(|y| {
            (0..n).all(|z| {
                if !(l.leq(x, y) && l.leq(y, z)) {
                    return true;
                }
                let (f, g, h) = (has(l, s, x, y), has(l, s, y, z), has(l, s, x, z));
                (!(f && g) || h) && (!h || (f && g))
            })
        })
    })
}

pub fn two_out_of_three(s: &ArrowSet<'_>) -> bool {
    let l = s.lattice();
    let n = l.len();
    (0..n).all(|x| {
        (0..n).all(|y| {
            (0..n).all(|z| {
                if !(l.leq(x, y) && l.leq(y, z)) {
                    return true;
                }
                let held = [has(l, s, x, y), has(l, s, y, z), has(l, s, x, z)];
                held.iter().filter(|&&b| b).count() != 2
            })
        })
    })
}

/// Every weak factorization system `(L, R)`, found by trying every `R`.
pub fn all_wfs(l: &Lattice) -> Vec<(ArrowSet<'_>, ArrowSet<'_>)> {
    let mut out = Vec::new();
    for r in all_subsets(l) {
        let left = left_lifters(&r);
        if right_lifters(&left) != r {
            continue;
        }
        let factors = l.arrows().iter().all(|a| {
            (0..l.len()).any(|z| l.leq(a.src, z) && l.leq(z, a.tgt) && has(l, &left, a.src, z) && has(l, &r, z, a.tgt))
        });
        if factors {
            out.push((left, r));
        }
    }
    out
}

/// Every model structure: `W` with 2-out-of-3 and cofibrations `C`,
/// fibrations `F` such that `(C, F ∩ W)` and `(C ∩ W, F)` are weak
/// factorization systems.
pub fn all_model_structures(l: &Lattice) -> HashSet<ModelStructure<'_>> {
    let wfs = all_wfs(l);
    let right_of: HashMap<Bits, ArrowSet<'_>> = wfs.iter().map(|(a, b)| (*a.bits(), *b)).collect();
    let mut out = HashSet::new();
    for w in all_subsets(l).filter(two_out_of_three) {
        for &(cof, afib) in &wfs {
            if !afib.is_subset(&w) {
                continue;
            }
            let acof = cof.intersection(&w).unwrap();
            let Some(&fib) = right_of.get(acof.bits()) else {
                continue;
            };
            if fib.intersection(&w).unwrap() == afib {
                out.insert(ModelStructure {
                    weq: w,
                    acof,
                    cof,
                    afib,
                    fib,
                });
            }
        }
    }
    out
}

pub fn weak_equivalence_sets(l: &Lattice) -> HashSet<ArrowSet<'_>> {
    all_model_structures(l).into_iter().map(|m| m.weq).collect()
}

/// Lattices small enough for every brute-force oracle.
pub fn small_lattices() -> Vec<(String, Lattice)> {
    let mut v: Vec<(String, Lattice)> = (0..=4).map(|n| (format!("[{n}]"), Lattice::chain(n))).collect();
    v.push(("[1]x[1]".into(), Lattice::grid(1, 1).unwrap()));
    v.push(("[2]x[1]".into(), Lattice::grid(2, 1).unwrap()));
    for n in 1..=4 {
        v.push((format!("M{n}"), Lattice::diamond(n).unwrap()));
    }
    v.push(("N5".into(), Lattice::pentagon()));
    v
}

pub fn grid_set<'a>(l: &'a Lattice, cols: usize, pairs: &[((usize, usize), (usize, usize))]) -> ArrowSet<'a> {
    let id = |(i, j): (usize, usize)| i * (cols + 1) + j;
    ArrowSet::from_arrows(l, pairs.iter().map(|&(s, t)| Arrow::new(id(s), id(t)))).unwrap()
}
