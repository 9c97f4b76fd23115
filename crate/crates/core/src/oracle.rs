//! Brute-force ground truth computed from the bare order relation.
//!
//! Everything here works on a [`Poset`] (an explicit `n × n` boolean table)
//! and deliberately ignores the embedding, so it can serve as an independent
//! check of the cell-based machinery: lattice, semimodularity, slimness and
//! distributivity tests, a small-lattice enumerator with isomorph rejection,
//! and a constructive planar embedder for slim lattices.

use std::collections::BTreeSet;

use crate::diagram::{Diagram, ElementId, LeqTable};
use crate::error::{Error, Result};
use crate::limits;

/// A finite poset as a full order table. `leq[x*n+y]` iff `x ≤ y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    n: usize,
    leq: Vec<bool>,
}

impl Poset {
    pub fn from_leq(n: usize, leq: Vec<bool>) -> Poset {
        assert_eq!(leq.len(), n * n);
        Poset { n, leq }
    }

    /// The transitive closure of a diagram's cover relation.
    pub fn from_diagram(d: &Diagram) -> Result<Poset> {
        let t = LeqTable::build(d)?;
        let n = d.n();
        let mut leq = vec![false; n * n];
        for x in d.elements() {
            for y in d.elements() {
                leq[x.index() * n + y.index()] = t.leq(x, y);
            }
        }
        Ok(Poset { n, leq })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.leq[x * self.n + y]
    }

    #[inline]
    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.leq(x, y)
    }

    /// Reflexive, antisymmetric and transitive?
    pub fn is_valid(&self) -> bool {
        let n = self.n;
        for x in 0..n {
            if !self.leq(x, x) {
                return false;
            }
            for y in 0..n {
                if x != y && self.leq(x, y) && self.leq(y, x) {
                    return false;
                }
                for z in 0..n {
                    if self.leq(x, y) && self.leq(y, z) && !self.leq(x, z) {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn covers(&self, x: usize, y: usize) -> bool {
        self.lt(x, y) && (0..self.n).all(|z| !(self.lt(x, z) && self.lt(z, y)))
    }

    pub fn lower_cover_count(&self, y: usize) -> usize {
        (0..self.n).filter(|&x| self.covers(x, y)).count()
    }

    pub fn meet(&self, x: usize, y: usize) -> Option<usize> {
        let lower: Vec<usize> =
            (0..self.n).filter(|&z| self.leq(z, x) && self.leq(z, y)).collect();
        lower.iter().copied().find(|&m| lower.iter().all(|&z| self.leq(z, m)))
    }

    pub fn join(&self, x: usize, y: usize) -> Option<usize> {
        let upper: Vec<usize> =
            (0..self.n).filter(|&z| self.leq(x, z) && self.leq(y, z)).collect();
        upper.iter().copied().find(|&j| upper.iter().all(|&z| self.leq(j, z)))
    }

    /// Join-irreducible elements: exactly one lower cover.
    pub fn join_irreducibles(&self) -> Vec<usize> {
        (0..self.n).filter(|&x| self.lower_cover_count(x) == 1).collect()
    }
}

// ---------------------------------------------------------------------------
// Predicates

pub fn is_lattice(p: &Poset) -> bool {
    for x in 0..p.n() {
        for y in x + 1..p.n() {
            if p.meet(x, y).is_none() || p.join(x, y).is_none() {
                return false;
            }
        }
    }
    true
}

/// `a ≻ a∧b` implies `a∨b ≻ b`, for all pairs. Assumes a lattice.
pub fn is_semimodular(p: &Poset) -> bool {
    for a in 0..p.n() {
        for b in 0..p.n() {
            let (Some(m), Some(j)) = (p.meet(a, b), p.join(a, b)) else {
                return false;
            };
            if p.covers(m, a) && !p.covers(b, j) {
                return false;
            }
        }
    }
    true
}

/// The join-irreducible elements contain no three-element antichain.
/// Assumes a (finite) lattice.
pub fn is_slim(p: &Poset) -> bool {
    let ji = p.join_irreducibles();
    for (i, &a) in ji.iter().enumerate() {
        for (k, &b) in ji.iter().enumerate().skip(i + 1) {
            if p.leq(a, b) || p.leq(b, a) {
                continue;
            }
            for &c in ji.iter().skip(k + 1) {
                if !p.leq(a, c) && !p.leq(c, a) && !p.leq(b, c) && !p.leq(c, b) {
                    return false;
                }
            }
        }
    }
    true
}

/// The identity `x∧(y∨z) = (x∧y)∨(x∧z)` for all triples. Assumes a lattice.
pub fn is_distributive(p: &Poset) -> bool {
    let n = p.n();
    let mut meet = vec![0usize; n * n];
    let mut join = vec![0usize; n * n];
    for x in 0..n {
        for y in 0..n {
            let (Some(m), Some(j)) = (p.meet(x, y), p.join(x, y)) else {
                return false;
            };
            meet[x * n + y] = m;
            join[x * n + y] = j;
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let lhs = meet[x * n + join[y * n + z]];
                let rhs = join[meet[x * n + y] * n + meet[x * n + z]];
                if lhs != rhs {
                    return false;
                }
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Canonical form up to isomorphism

fn refine_colors(p: &Poset) -> Vec<usize> {
    let n = p.n();
    let mut data: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            vec![
                (0..n).filter(|&u| p.lt(u, v)).count(),
                (0..n).filter(|&u| p.lt(v, u)).count(),
            ]
        })
        .collect();
    let mut colors = rank_vectors(&data);
    loop {
        data = (0..n)
            .map(|v| {
                let mut below: Vec<usize> =
                    (0..n).filter(|&u| p.lt(u, v)).map(|u| colors[u]).collect();
                let mut above: Vec<usize> =
                    (0..n).filter(|&u| p.lt(v, u)).map(|u| colors[u]).collect();
                below.sort_unstable();
                above.sort_unstable();
                let mut d = vec![colors[v]];
                d.push(usize::MAX); // separator
                d.extend(below);
                d.push(usize::MAX);
                d.extend(above);
                d
            })
            .collect();
        let next = rank_vectors(&data);
        if next == colors {
            return colors;
        }
        colors = next;
    }
}

fn rank_vectors(data: &[Vec<usize>]) -> Vec<usize> {
    let mut sorted: Vec<&Vec<usize>> = data.iter().collect();
    sorted.sort();
    sorted.dedup();
    data.iter().map(|d| sorted.binary_search(&d).unwrap()).collect()
}

fn matrix_bytes(p: &Poset, perm: &[usize]) -> Vec<u8> {
    let n = p.n();
    let mut bytes = vec![n as u8];
    let mut acc = 0u8;
    let mut nbits = 0;
    for &i in perm {
        for &j in perm {
            acc = (acc << 1) | u8::from(p.leq(i, j));
            nbits += 1;
            if nbits == 8 {
                bytes.push(acc);
                acc = 0;
                nbits = 0;
            }
        }
    }
    if nbits > 0 {
        bytes.push(acc << (8 - nbits));
    }
    bytes
}

/// Canonical byte string of a poset up to isomorphism: the lexicographically
/// least relation matrix over all labelings that list vertices in
/// non-decreasing refinement-color order.
pub fn canonical_form(p: &Poset) -> Vec<u8> {
    let n = p.n();
    let colors = refine_colors(p);
    let mut best: Option<Vec<u8>> = None;
    let mut perm: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(
        p: &Poset,
        colors: &[usize],
        perm: &mut Vec<usize>,
        used: &mut [bool],
        best: &mut Option<Vec<u8>>,
    ) {
        let n = p.n();
        if perm.len() == n {
            let cand = matrix_bytes(p, perm);
            if best.as_ref().is_none_or(|b| cand < *b) {
                *best = Some(cand);
            }
            return;
        }
        let min_color = (0..n)
            .filter(|&v| !used[v])
            .map(|v| colors[v])
            .min()
            .unwrap();
        for v in 0..n {
            if !used[v] && colors[v] == min_color {
                used[v] = true;
                perm.push(v);
                rec(p, colors, perm, used, best);
                perm.pop();
                used[v] = false;
            }
        }
    }
    rec(p, &colors, &mut perm, &mut used, &mut best);
    best.unwrap_or_else(|| vec![0])
}

/// Rebuilds the poset encoded by [`canonical_form`] bytes.
pub fn decode_canonical(bytes: &[u8]) -> Poset {
    let n = bytes[0] as usize;
    let mut leq = vec![false; n * n];
    for (k, slot) in leq.iter_mut().enumerate() {
        let byte = bytes[1 + k / 8];
        *slot = byte >> (7 - k % 8) & 1 == 1;
    }
    Poset { n, leq }
}

// ---------------------------------------------------------------------------
// Enumeration

/// Compact poset used only while enumerating: per element, the bitset of
/// elements below it (inclusive).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
struct DownSets {
    down: Vec<u16>,
}

impl DownSets {
    fn n(&self) -> usize {
        self.down.len()
    }

    fn to_poset(&self) -> Poset {
        let n = self.n();
        let mut leq = vec![false; n * n];
        for y in 0..n {
            for x in 0..n {
                leq[x * n + y] = self.down[y] >> x & 1 == 1;
            }
        }
        Poset { n, leq }
    }

    /// Extensions by one new maximal element whose strict down-set is an
    /// order ideal; keeps the meet-semilattice property.
    fn extensions(&self) -> Vec<DownSets> {
        let n = self.n();
        let full: u32 = 1 << n;
        let mut out = Vec::new();
        'mask: for mask in 1..full {
            let mask = mask as u16;
            // down-closed?
            for v in 0..n {
                if mask >> v & 1 == 1 && self.down[v] & !mask != 0 {
                    continue 'mask;
                }
            }
            // meets with every old element must survive: mask ∩ down(y)
            // needs a unique maximum.
            for y in 0..n {
                let t = mask & self.down[y];
                if t == 0 {
                    continue 'mask;
                }
                let has_max = (0..n).any(|m| t >> m & 1 == 1 && t & !self.down[m] == 0);
                if !has_max {
                    continue 'mask;
                }
            }
            let mut down = self.down.clone();
            down.push(mask | 1 << n);
            out.push(DownSets { down });
        }
        out
    }
}

/// Every finite lattice with at most `max_n` elements, one canonically
/// labeled representative per isomorphism class, ordered by size and then by
/// canonical form. Lattices are grown as meet-semilattices with a bottom,
/// adding one maximal element at a time with isomorph rejection.
pub fn enumerate_lattices(max_n: usize) -> Result<Vec<Poset>> {
    let guard = limits::effective(limits::ENUMERATE_MAX);
    if max_n > guard {
        return Err(Error::ResourceLimit(format!(
            "enumerate max_n {} exceeds guard {} (set LATRES_MAX_ELEMENTS to raise)",
            max_n, guard
        )));
    }
    if max_n == 0 {
        return Ok(Vec::new());
    }
    let mut out: Vec<Poset> = Vec::new();
    let mut level: Vec<DownSets> = vec![DownSets { down: vec![1] }];
    let single = level[0].to_poset();
    out.push(single);
    for _size in 2..=max_n {
        let mut seen: BTreeSet<Vec<u8>> = BTreeSet::new();
        let mut next: Vec<DownSets> = Vec::new();
        for sp in &level {
            for ext in sp.extensions() {
                let p = ext.to_poset();
                let key = canonical_form(&p);
                if seen.insert(key) {
                    next.push(ext);
                }
            }
        }
        level = next;
        let mut keys: Vec<Vec<u8>> = level
            .iter()
            .map(|sp| sp.to_poset())
            .filter(|p| {
                // a meet-semilattice with a unique maximal element is a lattice
                let maximals = (0..p.n()).filter(|&x| (0..p.n()).all(|y| !p.lt(x, y))).count();
                maximals == 1
            })
            .map(|p| canonical_form(&p))
            .collect();
        keys.sort();
        out.extend(keys.iter().map(|k| decode_canonical(k)));
    }
    Ok(out)
}

/// One canonically labeled representative per isomorphism class of slim
/// semimodular lattices with at most `max_n` elements, in deterministic
/// order.
pub fn enumerate_slim_semimodular_lattices(max_n: usize) -> Result<Vec<Poset>> {
    Ok(enumerate_lattices(max_n)?
        .into_iter()
        .filter(|p| is_lattice(p) && is_semimodular(p) && is_slim(p))
        .collect())
}

// ---------------------------------------------------------------------------
// Constructive embedding of slim lattices

/// Splits the join-irreducibles into two chains by 2-coloring their
/// incomparability graph; the lexicographically least coloring wins.
fn ji_two_chains(p: &Poset) -> Result<(Vec<usize>, Vec<usize>)> {
    let ji = p.join_irreducibles();
    let mut color: Vec<Option<bool>> = vec![None; ji.len()];
    for start in 0..ji.len() {
        if color[start].is_some() {
            continue;
        }
        color[start] = Some(false);
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            let ci = color[i].unwrap();
            for k in 0..ji.len() {
                if k == i || p.leq(ji[i], ji[k]) || p.leq(ji[k], ji[i]) {
                    continue;
                }
                match color[k] {
                    None => {
                        color[k] = Some(!ci);
                        stack.push(k);
                    }
                    Some(ck) if ck == ci => {
                        return Err(Error::precondition(
                            "not slim: join-irreducibles do not split into two chains",
                        ));
                    }
                    Some(_) => {}
                }
            }
        }
    }
    let left = ji.iter().zip(&color).filter(|(_, c)| **c == Some(false)).map(|(&j, _)| j).collect();
    let right = ji.iter().zip(&color).filter(|(_, c)| **c == Some(true)).map(|(&j, _)| j).collect();
    Ok((left, right))
}

/// Builds a planar diagram of a slim lattice: one join-irreducible chain is
/// assigned to the left, the other to the right, and cover lists are ordered
/// by how much of the left chain sits below each cover.
pub fn embed_slim_lattice(p: &Poset) -> Result<Diagram> {
    if !is_lattice(p) {
        return Err(Error::precondition("not a lattice"));
    }
    if !is_slim(p) {
        return Err(Error::precondition("not slim"));
    }
    let (left_chain, right_chain) = ji_two_chains(p)?;
    let n = p.n();
    let coord = |x: usize| -> (usize, usize) {
        (
            left_chain.iter().filter(|&&j| p.leq(j, x)).count(),
            right_chain.iter().filter(|&&j| p.leq(j, x)).count(),
        )
    };
    let sort_key = |x: usize| {
        let (l, r) = coord(x);
        (usize::MAX - l, r)
    };
    let mut upper = Vec::with_capacity(n);
    let mut lower = Vec::with_capacity(n);
    for x in 0..n {
        let mut ups: Vec<usize> = (0..n).filter(|&y| p.covers(x, y)).collect();
        let mut downs: Vec<usize> = (0..n).filter(|&y| p.covers(y, x)).collect();
        ups.sort_by_key(|&y| sort_key(y));
        downs.sort_by_key(|&y| sort_key(y));
        upper.push(ups.into_iter().map(|y| ElementId(y as u32)).collect());
        lower.push(downs.into_iter().map(|y| ElementId(y as u32)).collect());
    }
    Ok(Diagram::from_cover_lists(upper, lower))
}
