//! The embedded-diagram data model.
//!
//! A [`Diagram`] is a finite poset given by its cover relation, together with
//! a planar embedding recorded combinatorially: for every element the list of
//! upper covers and the list of lower covers, both ordered left to right.
//! Diagrams are compared up to *similarity* (a bijection preserving both
//! left-right orders); no coordinates are stored.

use std::collections::VecDeque;
use std::fmt;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Index of an element within one diagram. Ids are dense `0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementId(pub u32);

impl ElementId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A planar lattice diagram up to similarity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagram {
    upper: Vec<Vec<ElementId>>,
    lower: Vec<Vec<ElementId>>,
}

impl Diagram {
    /// Wraps raw cover lists without validating them; run
    /// [`Diagram::validate_well_formed`] to find out what they are.
    pub fn from_cover_lists(upper: Vec<Vec<ElementId>>, lower: Vec<Vec<ElementId>>) -> Self {
        assert_eq!(upper.len(), lower.len(), "cover list tables differ in length");
        Diagram { upper, lower }
    }

    pub fn n(&self) -> usize {
        self.upper.len()
    }

    pub fn elements(&self) -> impl Iterator<Item = ElementId> {
        (0..self.n() as u32).map(ElementId)
    }

    pub fn upper_covers(&self, x: ElementId) -> &[ElementId] {
        &self.upper[x.index()]
    }

    pub fn lower_covers(&self, x: ElementId) -> &[ElementId] {
        &self.lower[x.index()]
    }

    /// All cover pairs `(x, y)` with `x ≺ y`, in id order.
    pub fn cover_pairs(&self) -> Vec<(ElementId, ElementId)> {
        let mut out = Vec::new();
        for x in self.elements() {
            for &y in self.upper_covers(x) {
                out.push((x, y));
            }
        }
        out
    }

    pub fn cover_count(&self) -> usize {
        self.upper.iter().map(Vec::len).sum()
    }

    /// The unique element without lower covers, if there is exactly one.
    pub fn bottom(&self) -> Option<ElementId> {
        let mut found = None;
        for x in self.elements() {
            if self.lower_covers(x).is_empty() {
                if found.is_some() {
                    return None;
                }
                found = Some(x);
            }
        }
        found
    }

    /// The unique element without upper covers, if there is exactly one.
    pub fn top(&self) -> Option<ElementId> {
        let mut found = None;
        for x in self.elements() {
            if self.upper_covers(x).is_empty() {
                if found.is_some() {
                    return None;
                }
                found = Some(x);
            }
        }
        found
    }

    /// Left-right mirror image: every cover list reversed.
    pub fn mirror(&self) -> Diagram {
        let rev = |lists: &Vec<Vec<ElementId>>| {
            lists
                .iter()
                .map(|l| l.iter().rev().copied().collect())
                .collect()
        };
        Diagram { upper: rev(&self.upper), lower: rev(&self.lower) }
    }
}

// ---------------------------------------------------------------------------
// latdiag text format

impl Diagram {
    /// Serializes in the versioned `latdiag` text format.
    pub fn to_latdiag(&self) -> String {
        let mut s = String::new();
        s.push_str("latdiag 1\n");
        s.push_str(&format!("n {}\n", self.n()));
        for (tag, lists) in [("u", &self.upper), ("l", &self.lower)] {
            for (i, covers) in lists.iter().enumerate() {
                s.push_str(&format!("{} {}:", tag, i));
                for c in covers {
                    s.push_str(&format!(" {}", c));
                }
                s.push('\n');
            }
        }
        s
    }

    /// Parses the `latdiag` format. Rejects unknown versions, duplicate ids
    /// and malformed lines, naming the offending line.
    pub fn parse(text: &str) -> Result<Diagram> {
        let err = |line: usize, msg: String| Error::Parse { line, msg };
        let mut lines = text
            .lines()
            .map(|l| l.trim_end_matches('\r'))
            .enumerate()
            .map(|(i, l)| (i + 1, l));

        let (lno, header) = lines
            .next()
            .ok_or_else(|| err(1, "empty input, expected `latdiag 1`".into()))?;
        let mut toks = header.split_whitespace();
        if toks.next() != Some("latdiag") {
            return Err(err(lno, "expected `latdiag <version>` header".into()));
        }
        match toks.next() {
            Some("1") => {}
            Some(v) => return Err(err(lno, format!("unknown version `{}`", v))),
            None => return Err(err(lno, "missing version".into())),
        }
        if toks.next().is_some() {
            return Err(err(lno, "trailing tokens after version".into()));
        }

        let (lno, count_line) = lines
            .next()
            .ok_or_else(|| err(2, "expected `n <count>`".into()))?;
        let mut toks = count_line.split_whitespace();
        if toks.next() != Some("n") {
            return Err(err(lno, "expected `n <count>`".into()));
        }
        let n: usize = toks
            .next()
            .ok_or_else(|| err(lno, "missing element count".into()))?
            .parse()
            .map_err(|_| err(lno, "element count is not a number".into()))?;
        if toks.next().is_some() {
            return Err(err(lno, "trailing tokens after count".into()));
        }

        let parse_block = |tag: &str, lines: &mut dyn Iterator<Item = (usize, &str)>| {
            let mut lists: Vec<Vec<ElementId>> = Vec::with_capacity(n);
            for i in 0..n {
                let (lno, line) = lines
                    .next()
                    .ok_or_else(|| err(usize::MAX, format!("missing `{} {}:` line", tag, i)))?;
                let (head, tail) = line
                    .split_once(':')
                    .ok_or_else(|| err(lno, format!("expected `{} {}: ...`", tag, i)))?;
                let mut head_toks = head.split_whitespace();
                if head_toks.next() != Some(tag) {
                    return Err(err(lno, format!("expected `{}` line for element {}", tag, i)));
                }
                let id: usize = head_toks
                    .next()
                    .ok_or_else(|| err(lno, "missing element id".into()))?
                    .parse()
                    .map_err(|_| err(lno, "element id is not a number".into()))?;
                if id != i {
                    return Err(err(lno, format!("expected element {} here, found {} (elements must appear once, in order)", i, id)));
                }
                if head_toks.next().is_some() {
                    return Err(err(lno, "trailing tokens before `:`".into()));
                }
                let mut covers = Vec::new();
                for tok in tail.split_whitespace() {
                    let c: u32 = tok
                        .parse()
                        .map_err(|_| err(lno, format!("`{}` is not an element id", tok)))?;
                    if c as usize >= n {
                        return Err(err(lno, format!("element id {} out of range 0..{}", c, n)));
                    }
                    let c = ElementId(c);
                    if covers.contains(&c) {
                        return Err(err(lno, format!("duplicate id {} in cover list", c)));
                    }
                    covers.push(c);
                }
                lists.push(covers);
            }
            Ok(lists)
        };

        let upper = parse_block("u", &mut lines)?;
        let lower = parse_block("l", &mut lines)?;
        for (lno, rest) in lines {
            if !rest.trim().is_empty() {
                return Err(err(lno, "unexpected trailing content".into()));
            }
        }
        Ok(Diagram { upper, lower })
    }
}

// ---------------------------------------------------------------------------
// Order-relation table and lattice operations

/// Dense reachability table over the cover relation, with row bitsets for
/// both directions.
pub struct LeqTable {
    n: usize,
    words: usize,
    up: Vec<u64>,   // up[x] = { y : x <= y }
    down: Vec<u64>, // down[x] = { y : y <= x }
}

impl LeqTable {
    /// Builds the transitive closure. Fails on a cover cycle.
    pub fn build(d: &Diagram) -> Result<LeqTable> {
        let n = d.n();
        let words = n.div_ceil(64);
        let order = topo_order(d).ok_or_else(|| Error::malformed("cover relation has a cycle"))?;
        let mut up = vec![0u64; n * words];
        for &x in order.iter().rev() {
            let xi = x.index();
            set_bit(&mut up[xi * words..(xi + 1) * words], xi);
            for &y in d.upper_covers(x) {
                let (lo, hi) = if xi < y.index() {
                    let (a, b) = up.split_at_mut(y.index() * words);
                    (&mut a[xi * words..(xi + 1) * words], &b[..words])
                } else {
                    let (a, b) = up.split_at_mut(xi * words);
                    (&mut b[..words], &a[y.index() * words..(y.index() + 1) * words])
                };
                for w in 0..words {
                    lo[w] |= hi[w];
                }
            }
        }
        let mut down = vec![0u64; n * words];
        for x in 0..n {
            for y in 0..n {
                if get_bit(&up[x * words..(x + 1) * words], y) {
                    set_bit(&mut down[y * words..(y + 1) * words], x);
                }
            }
        }
        Ok(LeqTable { n, words, up, down })
    }

    #[inline]
    pub fn leq(&self, x: ElementId, y: ElementId) -> bool {
        get_bit(&self.up[x.index() * self.words..], y.index())
    }

    pub fn lt(&self, x: ElementId, y: ElementId) -> bool {
        x != y && self.leq(x, y)
    }

    fn bound(&self, x: ElementId, y: ElementId, rows: &[u64], dominators: &[u64]) -> Option<ElementId> {
        let w = self.words;
        let a = &rows[x.index() * w..(x.index() + 1) * w];
        let b = &rows[y.index() * w..(y.index() + 1) * w];
        let cand: Vec<u64> = (0..w).map(|i| a[i] & b[i]).collect();
        for c in 0..self.n {
            if get_bit(&cand, c) {
                // c is the bound iff it dominates every candidate.
                let dom = &dominators[c * w..(c + 1) * w];
                if (0..w).all(|i| cand[i] & !dom[i] == 0) {
                    return Some(ElementId(c as u32));
                }
            }
        }
        None
    }

    /// Greatest lower bound, if it exists.
    pub fn meet(&self, x: ElementId, y: ElementId) -> Option<ElementId> {
        self.bound(x, y, &self.down, &self.down)
    }

    /// Least upper bound, if it exists.
    pub fn join(&self, x: ElementId, y: ElementId) -> Option<ElementId> {
        self.bound(x, y, &self.up, &self.up)
    }

    /// First pair without a meet or join, if any.
    pub fn lattice_defect(&self) -> Option<(ElementId, ElementId)> {
        for x in 0..self.n as u32 {
            for y in (x + 1)..self.n as u32 {
                let (x, y) = (ElementId(x), ElementId(y));
                if self.meet(x, y).is_none() || self.join(x, y).is_none() {
                    return Some((x, y));
                }
            }
        }
        None
    }
}

#[inline]
fn set_bit(row: &mut [u64], i: usize) {
    row[i / 64] |= 1 << (i % 64);
}

#[inline]
fn get_bit(row: &[u64], i: usize) -> bool {
    row[i / 64] >> (i % 64) & 1 == 1
}

/// Topological order of the cover digraph, `None` on a cycle.
fn topo_order(d: &Diagram) -> Option<Vec<ElementId>> {
    let n = d.n();
    let mut indeg = vec![0usize; n];
    for x in d.elements() {
        for &y in d.upper_covers(x) {
            indeg[y.index()] += 1;
        }
    }
    let mut queue: VecDeque<ElementId> =
        d.elements().filter(|&x| indeg[x.index()] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(x) = queue.pop_front() {
        order.push(x);
        for &y in d.upper_covers(x) {
            indeg[y.index()] -= 1;
            if indeg[y.index()] == 0 {
                queue.push_back(y);
            }
        }
    }
    (order.len() == n).then_some(order)
}

impl Diagram {
    /// Meet and join of a pair. Requires a well-formed diagram.
    pub fn lattice_ops(&self, x: ElementId, y: ElementId) -> Result<(ElementId, ElementId)> {
        let t = LeqTable::build(self)?;
        match (t.meet(x, y), t.join(x, y)) {
            (Some(m), Some(j)) => Ok((m, j)),
            _ => Err(Error::malformed(format!("{} and {} have no meet or join", x, y))),
        }
    }
}

// ---------------------------------------------------------------------------
// Boundary and irreducibles

impl Diagram {
    /// The left and right boundary chains: maximal chains from bottom to top
    /// following the leftmost (resp. rightmost) upper cover at every step.
    pub fn boundary_chains(&self) -> (Vec<ElementId>, Vec<ElementId>) {
        let bottom = match self.bottom() {
            Some(b) => b,
            None => return (Vec::new(), Vec::new()),
        };
        let walk = |leftmost: bool| {
            let mut chain = vec![bottom];
            let mut x = bottom;
            for _ in 0..self.n() {
                let ups = self.upper_covers(x);
                if ups.is_empty() {
                    break;
                }
                x = if leftmost { ups[0] } else { *ups.last().unwrap() };
                chain.push(x);
            }
            chain
        };
        (walk(true), walk(false))
    }

    /// Per-element flag: on the left or right boundary chain.
    pub fn boundary_flags(&self) -> Vec<bool> {
        let mut flags = vec![false; self.n()];
        let (l, r) = self.boundary_chains();
        for x in l.into_iter().chain(r) {
            flags[x.index()] = true;
        }
        flags
    }

    pub fn is_boundary(&self, x: ElementId) -> bool {
        self.boundary_flags()[x.index()]
    }

    /// Elements on neither boundary chain.
    pub fn interior(&self) -> Vec<ElementId> {
        let flags = self.boundary_flags();
        self.elements().filter(|x| !flags[x.index()]).collect()
    }

    /// Join-irreducible, meet-irreducible and doubly irreducible elements.
    pub fn irreducibles(&self) -> Irreducibles {
        let ji: Vec<ElementId> = self
            .elements()
            .filter(|&x| self.lower_covers(x).len() == 1)
            .collect();
        let mi: Vec<ElementId> = self
            .elements()
            .filter(|&x| self.upper_covers(x).len() == 1)
            .collect();
        let doubly = ji.iter().copied().filter(|x| mi.contains(x)).collect();
        Irreducibles { ji, mi, doubly }
    }
}

#[derive(Debug, Clone)]
pub struct Irreducibles {
    /// Elements with exactly one lower cover.
    pub ji: Vec<ElementId>,
    /// Elements with exactly one upper cover.
    pub mi: Vec<ElementId>,
    /// `ji ∩ mi`.
    pub doubly: Vec<ElementId>,
}

// ---------------------------------------------------------------------------
// Canonical form and similarity

/// Canonical serialization of a diagram; equal keys exactly for similar
/// diagrams.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    /// Full SHA-256 of the key, hex encoded; used as a stable file name.
    pub fn hex_hash(&self) -> String {
        let digest = Sha256::digest(&self.0);
        digest.iter().map(|b| format!("{:02x}", b)).collect()
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.hex_hash())
    }
}

impl Diagram {
    /// Visit order of the canonical relabeling: breadth-first from the
    /// bottom, expanding upper covers left to right.
    pub fn canonical_order(&self) -> Vec<ElementId> {
        let n = self.n();
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        let start = self.bottom().unwrap_or(ElementId(0));
        let mut queue = VecDeque::new();
        seen[start.index()] = true;
        queue.push_back(start);
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for &y in self.upper_covers(x) {
                if !seen[y.index()] {
                    seen[y.index()] = true;
                    queue.push_back(y);
                }
            }
        }
        // Unreachable elements only occur in ill-formed diagrams; append them
        // so the relabeling stays a bijection.
        for x in self.elements() {
            if !seen[x.index()] {
                order.push(x);
            }
        }
        order
    }

    /// The canonically relabeled diagram and the old-to-new id map.
    pub fn canonical_form(&self) -> (Diagram, Vec<ElementId>) {
        let order = self.canonical_order();
        let mut old_to_new = vec![ElementId(0); self.n()];
        for (new, &old) in order.iter().enumerate() {
            old_to_new[old.index()] = ElementId(new as u32);
        }
        let relabel = |lists: &Vec<Vec<ElementId>>| -> Vec<Vec<ElementId>> {
            order
                .iter()
                .map(|&old| lists[old.index()].iter().map(|c| old_to_new[c.index()]).collect())
                .collect()
        };
        let d = Diagram { upper: relabel(&self.upper), lower: relabel(&self.lower) };
        (d, old_to_new)
    }

    pub fn canonical_key(&self) -> CanonicalKey {
        let (canon, _) = self.canonical_form();
        CanonicalKey(canon.to_latdiag().into_bytes())
    }

    /// Direct similarity test: constructs the order-preserving bijection
    /// from the bottoms upward instead of comparing canonical keys.
    pub fn is_similar(&self, other: &Diagram) -> bool {
        if self.n() != other.n() {
            return false;
        }
        let (b1, b2) = match (self.bottom(), other.bottom()) {
            (Some(a), Some(b)) => (a, b),
            _ => return false,
        };
        let n = self.n();
        let mut map: Vec<Option<ElementId>> = vec![None; n];
        let mut hit = vec![false; n];
        map[b1.index()] = Some(b2);
        hit[b2.index()] = true;
        let mut queue = VecDeque::from([b1]);
        let mut visited = vec![false; n];
        visited[b1.index()] = true;
        while let Some(x) = queue.pop_front() {
            let y = map[x.index()].unwrap();
            let (ux, uy) = (self.upper_covers(x), other.upper_covers(y));
            if ux.len() != uy.len() {
                return false;
            }
            for (&cx, &cy) in ux.iter().zip(uy) {
                match map[cx.index()] {
                    Some(m) if m != cy => return false,
                    Some(_) => {}
                    None => {
                        if hit[cy.index()] {
                            return false;
                        }
                        map[cx.index()] = Some(cy);
                        hit[cy.index()] = true;
                    }
                }
                if !visited[cx.index()] {
                    visited[cx.index()] = true;
                    queue.push_back(cx);
                }
            }
        }
        if map.iter().any(Option::is_none) {
            return false;
        }
        // The bijection must preserve the lower-cover order as well.
        for x in self.elements() {
            let y = map[x.index()].unwrap();
            let lx: Vec<ElementId> = self
                .lower_covers(x)
                .iter()
                .map(|c| map[c.index()].unwrap())
                .collect();
            if lx != other.lower_covers(y) {
                return false;
            }
        }
        true
    }
}

// ---------------------------------------------------------------------------
// Well-formedness validation

/// One violated diagram invariant.
#[derive(Debug, Clone)]
pub enum Violation {
    Size(String),
    CoverList(String),
    Inconsistent(String),
    Cycle(String),
    UniqueTop(String),
    UniqueBottom(String),
    NotReduced(String),
    NotLattice(String),
    Planarity(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Size(m) => write!(f, "size: {}", m),
            Violation::CoverList(m) => write!(f, "cover list: {}", m),
            Violation::Inconsistent(m) => write!(f, "cover lists inconsistent: {}", m),
            Violation::Cycle(m) => write!(f, "not acyclic: {}", m),
            Violation::UniqueTop(m) => write!(f, "unique top: {}", m),
            Violation::UniqueBottom(m) => write!(f, "unique bottom: {}", m),
            Violation::NotReduced(m) => write!(f, "not transitively reduced: {}", m),
            Violation::NotLattice(m) => write!(f, "not a lattice: {}", m),
            Violation::Planarity(m) => write!(f, "planarity: {}", m),
        }
    }
}

/// Outcome of [`Diagram::validate_well_formed`]; empty iff every invariant
/// holds. Violations are data, not errors.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn contains(&self, needle: &str) -> bool {
        self.violations.iter().any(|v| v.to_string().contains(needle))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            writeln!(f, "well formed")
        } else {
            for v in &self.violations {
                writeln!(f, "violation: {}", v)?;
            }
            Ok(())
        }
    }
}

impl Diagram {
    /// Checks every `Diagram` invariant on an arbitrary candidate structure:
    /// consistent cover lists, acyclic and transitively reduced covers,
    /// unique top and bottom, the lattice property, and an operational
    /// planarity check (the cell decomposition must close up).
    pub fn validate_well_formed(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let n = self.n();
        if n < 2 {
            report.violations.push(Violation::Size(format!(
                "diagram has {} element(s); surgery needs at least 2",
                n
            )));
            return report;
        }

        let mut structural_ok = true;
        for (tag, lists) in [("upper", &self.upper), ("lower", &self.lower)] {
            for (i, covers) in lists.iter().enumerate() {
                for (k, c) in covers.iter().enumerate() {
                    if c.index() >= n {
                        report.violations.push(Violation::CoverList(format!(
                            "{}[{}] contains out-of-range id {}",
                            tag, i, c
                        )));
                        structural_ok = false;
                    } else if c.index() == i {
                        report.violations.push(Violation::CoverList(format!(
                            "{}[{}] lists the element as its own cover",
                            tag, i
                        )));
                        structural_ok = false;
                    }
                    if covers[..k].contains(c) {
                        report.violations.push(Violation::CoverList(format!(
                            "{}[{}] lists {} twice",
                            tag, i, c
                        )));
                        structural_ok = false;
                    }
                }
            }
        }
        if !structural_ok {
            return report;
        }

        for x in self.elements() {
            for &y in self.upper_covers(x) {
                if !self.lower_covers(y).contains(&x) {
                    report.violations.push(Violation::Inconsistent(format!(
                        "{} in upper[{}] but {} not in lower[{}]",
                        y, x, x, y
                    )));
                }
            }
            for &y in self.lower_covers(x) {
                if !self.upper_covers(y).contains(&x) {
                    report.violations.push(Violation::Inconsistent(format!(
                        "{} in lower[{}] but {} not in upper[{}]",
                        y, x, x, y
                    )));
                }
            }
        }
        if !report.is_ok() {
            return report;
        }

        if topo_order(self).is_none() {
            report
                .violations
                .push(Violation::Cycle("the cover relation contains a cycle".into()));
            return report;
        }

        let tops: Vec<ElementId> = self.elements().filter(|&x| self.upper_covers(x).is_empty()).collect();
        if tops.len() != 1 {
            report.violations.push(Violation::UniqueTop(format!(
                "found {} maximal elements, expected exactly one",
                tops.len()
            )));
        }
        let bottoms: Vec<ElementId> =
            self.elements().filter(|&x| self.lower_covers(x).is_empty()).collect();
        if bottoms.len() != 1 {
            report.violations.push(Violation::UniqueBottom(format!(
                "found {} minimal elements, expected exactly one",
                bottoms.len()
            )));
        }
        if !report.is_ok() {
            return report;
        }

        let leq = match LeqTable::build(self) {
            Ok(t) => t,
            Err(e) => {
                report.violations.push(Violation::Cycle(e.to_string()));
                return report;
            }
        };
        for x in self.elements() {
            for &y in self.upper_covers(x) {
                let implied = self
                    .elements()
                    .any(|z| z != x && z != y && leq.lt(x, z) && leq.lt(z, y));
                if implied {
                    report.violations.push(Violation::NotReduced(format!(
                        "cover {} -> {} is implied by a longer chain",
                        x, y
                    )));
                }
            }
        }
        if let Some((x, y)) = leq.lattice_defect() {
            report.violations.push(Violation::NotLattice(format!(
                "{} and {} lack a meet or a join",
                x, y
            )));
        }
        if !report.is_ok() {
            return report;
        }

        for problem in crate::geometry::planarity_problems(self) {
            report.violations.push(Violation::Planarity(problem));
        }
        report
    }

    pub fn is_well_formed(&self) -> bool {
        self.validate_well_formed().is_ok()
    }
}
