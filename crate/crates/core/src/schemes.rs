//! N7 structure theory: tight and cover-preserving N7 sublattices, stacked
//! N7 regions, rank, anchor sets, and C2/C3 scheme construction.

use std::collections::{BTreeSet, HashSet};

use crate::diagram::{Diagram, ElementId, LeqTable};
use crate::error::{Error, Result};
use crate::geometry::{
    c3_trajectory, c2_trajectory, C3Chain, CellIndex, PrimeInterval, StepDir,
};

/// Shared per-diagram context for the scheme machinery.
pub(crate) struct Ctx<'a> {
    pub d: &'a Diagram,
    pub idx: CellIndex<'a>,
    pub leq: LeqTable,
    pub boundary: Vec<bool>,
    boundary_edges: HashSet<(u32, u32)>,
}

impl<'a> Ctx<'a> {
    pub fn new(d: &'a Diagram) -> Result<Ctx<'a>> {
        let idx = CellIndex::build(d)?;
        let leq = LeqTable::build(d)?;
        let boundary = d.boundary_flags();
        let (l, r) = d.boundary_chains();
        let mut boundary_edges = HashSet::new();
        for chain in [l, r] {
            for w in chain.windows(2) {
                boundary_edges.insert((w[0].0, w[1].0));
            }
        }
        Ok(Ctx { d, idx, leq, boundary, boundary_edges })
    }

    pub fn is_interior(&self, x: ElementId) -> bool {
        !self.boundary[x.index()]
    }

    pub fn is_cover(&self, x: ElementId, y: ElementId) -> bool {
        self.d.upper_covers(x).contains(&y)
    }

    fn is_boundary_edge(&self, e: PrimeInterval) -> bool {
        self.boundary_edges.contains(&(e.bottom.0, e.top.0))
    }

    fn chain_on_boundary(&self, c: C3Chain) -> bool {
        self.is_boundary_edge(c.lower_edge()) && self.is_boundary_edge(c.upper_edge())
    }
}

// ---------------------------------------------------------------------------
// Tight N7

/// The tight N7 sublattice determined by an interior meet-irreducible center:
/// `{u, u*, a_l, b_l, a_r, b_r, a_l ∧ a_r}` with `[a_l,b_l]`, `[u,u*]`,
/// `[a_r,b_r]` consecutive prime intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TightN7 {
    pub u: ElementId,
    pub u_star: ElementId,
    pub a_l: ElementId,
    pub b_l: ElementId,
    pub a_r: ElementId,
    pub b_r: ElementId,
    pub bottom: ElementId,
}

impl TightN7 {
    pub fn elements(&self) -> [ElementId; 7] {
        [self.bottom, self.a_l, self.a_r, self.b_l, self.u, self.b_r, self.u_star]
    }

    pub fn element_set(&self) -> BTreeSet<ElementId> {
        self.elements().into_iter().collect()
    }
}

fn tight_n7_with(ctx: &Ctx, u: ElementId) -> Result<TightN7> {
    if ctx.d.upper_covers(u).len() != 1 {
        return Err(Error::precondition(format!("{} is not meet-irreducible", u)));
    }
    if !ctx.is_interior(u) {
        return Err(Error::precondition(format!("{} is on the boundary", u)));
    }
    let u_star = ctx.d.upper_covers(u)[0];
    let e = PrimeInterval { bottom: u, top: u_star };
    let fail = || Error::malformed(format!("no tight N7 around {}", u));
    let lf = ctx.idx.cell_left_of(e).and_then(|c| c.as_four()).ok_or_else(fail)?;
    let rf = ctx.idx.cell_right_of(e).and_then(|c| c.as_four()).ok_or_else(fail)?;
    if lf.right != u || lf.top != u_star || rf.left != u || rf.top != u_star {
        return Err(fail());
    }
    let (a_l, b_l) = (lf.bottom, lf.left);
    let (a_r, b_r) = (rf.bottom, rf.right);
    let bottom = ctx.leq.meet(a_l, a_r).ok_or_else(fail)?;
    Ok(TightN7 { u, u_star, a_l, b_l, a_r, b_r, bottom })
}

/// The unique tight N7 with center `u`, found through the two 4-cells
/// flanking `[u, u*]`. Requires `u` interior and meet-irreducible.
pub fn tight_n7(d: &Diagram, u: ElementId) -> Result<TightN7> {
    tight_n7_with(&Ctx::new(d)?, u)
}

fn is_cover_preserving_n7(ctx: &Ctx, t: &TightN7) -> bool {
    ctx.is_cover(t.bottom, t.a_l) && ctx.is_cover(t.bottom, t.a_r)
}

pub(crate) fn covering_n7_centers_with(ctx: &Ctx) -> Vec<ElementId> {
    ctx.d
        .elements()
        .filter(|&u| ctx.is_interior(u) && ctx.d.upper_covers(u).len() == 1)
        .filter(|&u| {
            tight_n7_with(ctx, u).is_ok_and(|t| is_cover_preserving_n7(ctx, &t))
        })
        .collect()
}

/// Centers of cover-preserving N7 sublattices. Each such sublattice is
/// determined by its center, so this doubles as the covering-N7 count.
pub fn covering_n7_centers(d: &Diagram) -> Result<Vec<ElementId>> {
    Ok(covering_n7_centers_with(&Ctx::new(d)?))
}

// ---------------------------------------------------------------------------
// Rank and stacked regions

/// The chain `x(0) ≺ x(1) ≺ …` above `x`: `x(i+1) = x(i)*` as long as the
/// cover is meet-irreducible, interior, and covers exactly three elements.
fn tower_walk(ctx: &Ctx, x: ElementId) -> Vec<ElementId> {
    let mut tower = vec![x];
    let mut cur = x;
    for _ in 0..ctx.d.n() {
        let ups = ctx.d.upper_covers(cur);
        if ups.len() != 1 {
            break;
        }
        let star = ups[0];
        if ctx.d.upper_covers(star).len() == 1
            && ctx.is_interior(star)
            && ctx.d.lower_covers(star).len() == 3
        {
            tower.push(star);
            cur = star;
        } else {
            break;
        }
    }
    tower
}

fn require_center(ctx: &Ctx, x: ElementId) -> Result<TightN7> {
    let t = tight_n7_with(ctx, x)
        .map_err(|_| Error::precondition(format!("{} is not a covering-N7 center", x)))?;
    if !is_cover_preserving_n7(ctx, &t) {
        return Err(Error::precondition(format!("{} is not a covering-N7 center", x)));
    }
    Ok(t)
}

/// Largest `m` such that `x(m)` is defined. Requires `x` to be a
/// covering-N7 center.
pub fn rank(d: &Diagram, x: ElementId) -> Result<usize> {
    rank_with(&Ctx::new(d)?, x)
}

pub(crate) fn rank_with(ctx: &Ctx, x: ElementId) -> Result<usize> {
    require_center(ctx, x)?;
    Ok(tower_walk(ctx, x).len() - 1)
}

/// A cover-preserving region isomorphic to the `(7+3m)`-element stacked N7
/// diagram. `rows[i]` holds the left element, tower element `x(i)` and right
/// element of level `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StackedN7Region {
    pub m: usize,
    pub bottom: ElementId,
    pub atom_l: ElementId,
    pub atom_r: ElementId,
    pub rows: Vec<(ElementId, ElementId, ElementId)>,
    pub top: ElementId,
}

impl StackedN7Region {
    pub fn elements(&self) -> BTreeSet<ElementId> {
        let mut s: BTreeSet<ElementId> =
            [self.bottom, self.atom_l, self.atom_r, self.top].into_iter().collect();
        for &(l, x, r) in &self.rows {
            s.extend([l, x, r]);
        }
        s
    }

    /// The interior chain `x(0) ≺ … ≺ x(m)`.
    pub fn interior_tower(&self) -> Vec<ElementId> {
        self.rows.iter().map(|&(_, x, _)| x).collect()
    }

    pub fn len(&self) -> usize {
        7 + 3 * self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// The regions `R_0 … R_m` whose interiors are the prefixes of the tower of
/// `u`. `R_0` is the cover-preserving tight N7 of `u`.
pub fn stacked_tower(d: &Diagram, u: ElementId) -> Result<Vec<StackedN7Region>> {
    let ctx = Ctx::new(d)?;
    stacked_tower_with(&ctx, u)
}

fn stacked_tower_with(ctx: &Ctx, u: ElementId) -> Result<Vec<StackedN7Region>> {
    let base = require_center(ctx, u)?;
    let tower = tower_walk(ctx, u);
    let mut regions = Vec::with_capacity(tower.len());
    let mut rows = vec![(base.b_l, base.u, base.b_r)];
    let mut top = base.u_star;
    regions.push(StackedN7Region {
        m: 0,
        bottom: base.bottom,
        atom_l: base.a_l,
        atom_r: base.a_r,
        rows: rows.clone(),
        top,
    });
    for (i, &x_i) in tower.iter().enumerate().skip(1) {
        debug_assert_eq!(x_i, top);
        let x_star = ctx.d.upper_covers(x_i)[0];
        let e = PrimeInterval { bottom: x_i, top: x_star };
        let fail = || Error::malformed(format!("stacked region of {} breaks at level {}", u, i));
        let lf = ctx.idx.cell_left_of(e).and_then(|c| c.as_four()).ok_or_else(fail)?;
        let rf = ctx.idx.cell_right_of(e).and_then(|c| c.as_four()).ok_or_else(fail)?;
        let (prev_l, _, prev_r) = rows[i - 1];
        if lf.bottom != prev_l || lf.right != x_i || rf.bottom != prev_r || rf.left != x_i {
            return Err(fail());
        }
        rows.push((lf.left, x_i, rf.right));
        top = x_star;
        regions.push(StackedN7Region {
            m: i,
            bottom: base.bottom,
            atom_l: base.a_l,
            atom_r: base.a_r,
            rows: rows.clone(),
            top,
        });
    }
    Ok(regions)
}

/// If `t` is an interior element of a stacked N7 region, the maximal such
/// region together with `t`'s tower index, found by descending through
/// middle lower covers until an element with exactly two lower covers.
pub fn locate_in_stack(d: &Diagram, t: ElementId) -> Result<Option<(StackedN7Region, usize)>> {
    let ctx = Ctx::new(d)?;
    let mut cur = t;
    let mut j = 0usize;
    loop {
        match ctx.d.lower_covers(cur).len() {
            2 => break,
            3 => {
                cur = ctx.d.lower_covers(cur)[1];
                j += 1;
                if j > ctx.d.n() {
                    return Ok(None);
                }
            }
            _ => return Ok(None),
        }
    }
    if require_center(&ctx, cur).is_err() {
        return Ok(None);
    }
    let regions = stacked_tower_with(&ctx, cur)?;
    let maximal = regions.last().unwrap();
    if j > maximal.m || maximal.rows[j].1 != t {
        return Ok(None);
    }
    Ok(Some((maximal.clone(), j)))
}

// ---------------------------------------------------------------------------
// Rank by brute-force region search

/// Order relation of the abstract `(7+3k)`-element stacked diagram. Slot
/// layout: 0 bottom, 1 left atom, 2 right atom, then triples
/// `(left, tower, right)` per level, finally the top.
fn stacked_pattern_leq(k: usize) -> Vec<bool> {
    let n = 7 + 3 * k;
    let slot_row = |i: usize| (3 + 3 * i, 4 + 3 * i, 5 + 3 * i);
    let mut covers: Vec<(usize, usize)> = vec![(0, 1), (0, 2)];
    let (l0, x0, r0) = slot_row(0);
    covers.extend([(1, l0), (1, x0), (2, x0), (2, r0)]);
    for i in 0..k {
        let (li, xi, ri) = slot_row(i);
        let (ln, xn, rn) = slot_row(i + 1);
        covers.extend([(li, ln), (li, xn), (xi, xn), (ri, xn), (ri, rn)]);
    }
    let (lk, xk, rk) = slot_row(k);
    let top = n - 1;
    covers.extend([(lk, top), (xk, top), (rk, top)]);
    let mut leq = vec![false; n * n];
    for i in 0..n {
        leq[i * n + i] = true;
    }
    // reflexive-transitive closure; covers point upward so a fixpoint pass works
    let mut changed = true;
    while changed {
        changed = false;
        for &(a, b) in &covers {
            for c in 0..n {
                if leq[b * n + c] && !leq[a * n + c] {
                    leq[a * n + c] = true;
                    changed = true;
                }
            }
        }
    }
    leq
}

fn matches_pattern(ctx: &Ctx, assign: &[ElementId], pattern: &[bool]) -> bool {
    let n = assign.len();
    let distinct: HashSet<ElementId> = assign.iter().copied().collect();
    if distinct.len() != n {
        return false;
    }
    for i in 0..n {
        for j in 0..n {
            if ctx.leq.leq(assign[i], assign[j]) != pattern[i * n + j] {
                return false;
            }
        }
    }
    // sublattice: meets and joins stay inside the set
    for i in 0..n {
        for j in i + 1..n {
            let m = ctx.leq.meet(assign[i], assign[j]);
            let jn = ctx.leq.join(assign[i], assign[j]);
            match (m, jn) {
                (Some(m), Some(jn)) => {
                    if !distinct.contains(&m) || !distinct.contains(&jn) {
                        return false;
                    }
                }
                _ => return false,
            }
        }
    }
    true
}

fn find_stacked_region(ctx: &Ctx, x: ElementId, k: usize) -> bool {
    let pattern = stacked_pattern_leq(k);
    let lows = ctx.d.lower_covers(x);
    if lows.len() != 2 {
        return false;
    }
    // assignments follow the slot layout of `stacked_pattern_leq`
    for (a_l, a_r) in [(lows[0], lows[1]), (lows[1], lows[0])] {
        let Some(w) = ctx.leq.meet(a_l, a_r) else { continue };
        if !ctx.is_cover(w, a_l) || !ctx.is_cover(w, a_r) {
            continue;
        }
        let bl_cands: Vec<ElementId> =
            ctx.d.upper_covers(a_l).iter().copied().filter(|&b| b != x).collect();
        let br_cands: Vec<ElementId> =
            ctx.d.upper_covers(a_r).iter().copied().filter(|&b| b != x).collect();
        for &b_l in &bl_cands {
            for &b_r in &br_cands {
                let mut assign = vec![w, a_l, a_r, b_l, x, b_r];
                if grow_levels(ctx, &mut assign, k, &pattern) {
                    return true;
                }
            }
        }
    }
    false
}

fn grow_levels(ctx: &Ctx, assign: &mut Vec<ElementId>, k: usize, pattern: &[bool]) -> bool {
    let level = (assign.len() - 3) / 3; // completed levels so far
    let base = assign.len() - 3;
    let (l_prev, x_prev, r_prev) = (assign[base], assign[base + 1], assign[base + 2]);
    if level == k + 1 {
        // close with the top
        for &t in ctx.d.upper_covers(x_prev) {
            if ctx.is_cover(l_prev, t) && ctx.is_cover(r_prev, t) {
                assign.push(t);
                if matches_pattern(ctx, assign, pattern) {
                    assign.pop();
                    return true;
                }
                assign.pop();
            }
        }
        return false;
    }
    for &x_next in ctx.d.upper_covers(x_prev) {
        if !ctx.is_cover(l_prev, x_next) || !ctx.is_cover(r_prev, x_next) {
            continue;
        }
        let l_cands: Vec<ElementId> =
            ctx.d.upper_covers(l_prev).iter().copied().filter(|&c| c != x_next).collect();
        let r_cands: Vec<ElementId> =
            ctx.d.upper_covers(r_prev).iter().copied().filter(|&c| c != x_next).collect();
        for &l_next in &l_cands {
            for &r_next in &r_cands {
                assign.extend([l_next, x_next, r_next]);
                if grow_levels(ctx, assign, k, pattern) {
                    assign.truncate(assign.len() - 3);
                    return true;
                }
                assign.truncate(assign.len() - 3);
            }
        }
    }
    false
}

/// Largest `k` such that `x` sits in the tower-bottom slot of a
/// cover-preserving `k`-stacked N7 sublattice, found by exhaustive search
/// over cover lists. Independent of [`rank`]'s tower walk.
pub fn rank_by_regions(d: &Diagram, x: ElementId) -> Result<usize> {
    let ctx = Ctx::new(d)?;
    require_center(&ctx, x)?;
    let max_k = d.n().saturating_sub(7) / 3;
    let mut best = None;
    for k in 0..=max_k {
        if find_stacked_region(&ctx, x, k) {
            best = Some(k);
        }
    }
    best.ok_or_else(|| Error::malformed(format!("no cover-preserving N7 found at {}", x)))
}

// ---------------------------------------------------------------------------
// Schemes

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    C2,
    C3,
}

impl std::fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SchemeKind::C2 => write!(f, "C2"),
            SchemeKind::C3 => write!(f, "C3"),
        }
    }
}

/// A C2-scheme: a cover-preserving N7 base and the trajectory wings of its
/// two upper edges. The interior is the anchor's tower.
#[derive(Debug, Clone)]
pub struct C2Scheme {
    pub anchor: ElementId,
    pub base: TightN7,
    pub left_wing: Vec<PrimeInterval>,
    pub left_steps: Vec<StepDir>,
    pub right_wing: Vec<PrimeInterval>,
    pub right_steps: Vec<StepDir>,
    /// `x(0) ≺ … ≺ x(m)`; equals the scheme interior.
    pub tower: Vec<ElementId>,
    pub interior: BTreeSet<ElementId>,
    pub upper_boundary: BTreeSet<ElementId>,
    pub lower_boundary: BTreeSet<ElementId>,
}

/// The cover-preserving square of chains at the base of a C3-scheme,
/// labeled as drawn: `bottom`, lower-side elements, corners, middle
/// elements of the upper sides, the center, and the top.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct C3Base {
    pub bottom: ElementId,
    pub lower_l: ElementId,
    pub lower_r: ElementId,
    pub corner_l: ElementId,
    pub corner_r: ElementId,
    pub mid_l: ElementId,
    pub mid_r: ElementId,
    pub center: ElementId,
    pub top: ElementId,
}

impl C3Base {
    pub fn elements(&self) -> [ElementId; 9] {
        [
            self.bottom,
            self.lower_l,
            self.lower_r,
            self.corner_l,
            self.corner_r,
            self.mid_l,
            self.mid_r,
            self.center,
            self.top,
        ]
    }

    pub fn element_set(&self) -> BTreeSet<ElementId> {
        self.elements().into_iter().collect()
    }

    pub fn upper_left_chain(&self) -> C3Chain {
        C3Chain { bottom: self.corner_l, middle: self.mid_l, top: self.top }
    }

    pub fn upper_right_chain(&self) -> C3Chain {
        C3Chain { bottom: self.corner_r, middle: self.mid_r, top: self.top }
    }
}

/// A C3-scheme: a cover-preserving C3×C3 base plus the wings of its upper
/// boundary chains, both terminating on the boundary of the diagram.
#[derive(Debug, Clone)]
pub struct C3Scheme {
    pub anchor: ElementId,
    pub base: C3Base,
    pub left_wing: Vec<C3Chain>,
    pub left_steps: Vec<StepDir>,
    pub right_wing: Vec<C3Chain>,
    pub right_steps: Vec<StepDir>,
    pub interior: BTreeSet<ElementId>,
    pub upper_boundary: BTreeSet<ElementId>,
    pub lower_boundary: BTreeSet<ElementId>,
}

#[derive(Debug, Clone)]
pub enum Scheme {
    C2(C2Scheme),
    C3(C3Scheme),
}

impl Scheme {
    pub fn kind(&self) -> SchemeKind {
        match self {
            Scheme::C2(_) => SchemeKind::C2,
            Scheme::C3(_) => SchemeKind::C3,
        }
    }

    pub fn anchor(&self) -> ElementId {
        match self {
            Scheme::C2(s) => s.anchor,
            Scheme::C3(s) => s.anchor,
        }
    }

    pub fn interior(&self) -> &BTreeSet<ElementId> {
        match self {
            Scheme::C2(s) => &s.interior,
            Scheme::C3(s) => &s.interior,
        }
    }

    pub fn upper_boundary(&self) -> &BTreeSet<ElementId> {
        match self {
            Scheme::C2(s) => &s.upper_boundary,
            Scheme::C3(s) => &s.upper_boundary,
        }
    }

    pub fn lower_boundary(&self) -> &BTreeSet<ElementId> {
        match self {
            Scheme::C2(s) => &s.lower_boundary,
            Scheme::C3(s) => &s.lower_boundary,
        }
    }

    pub fn base_set(&self) -> BTreeSet<ElementId> {
        match self {
            Scheme::C2(s) => s.base.element_set(),
            Scheme::C3(s) => s.base.element_set(),
        }
    }

    pub fn elements(&self) -> BTreeSet<ElementId> {
        let mut s = self.base_set();
        match self {
            Scheme::C2(sch) => {
                for l in sch.left_wing.iter().chain(&sch.right_wing) {
                    s.extend([l.bottom, l.top]);
                }
            }
            Scheme::C3(sch) => {
                for l in sch.left_wing.iter().chain(&sch.right_wing) {
                    s.extend(l.elements());
                }
            }
        }
        s
    }
}

pub(crate) fn build_c2_scheme(ctx: &Ctx, u: ElementId) -> Result<C2Scheme> {
    let base = require_center(ctx, u)?;
    let lt = c2_trajectory(&ctx.idx, PrimeInterval { bottom: base.b_l, top: base.u_star })?;
    let lpos = lt.position_of(PrimeInterval { bottom: base.b_l, top: base.u_star }).unwrap();
    let left_wing = lt.links[..=lpos].to_vec();
    let left_steps = lt.steps[..lpos].to_vec();
    let rt = c2_trajectory(&ctx.idx, PrimeInterval { bottom: base.b_r, top: base.u_star })?;
    let rpos = rt.position_of(PrimeInterval { bottom: base.b_r, top: base.u_star }).unwrap();
    let right_wing = rt.links[rpos..].to_vec();
    let right_steps = rt.steps[rpos..].to_vec();

    let base_set = base.element_set();
    // Wings may share elements (they meet along the stacked region when the
    // rank is positive), but insertion subdivides each link once, so the
    // same prime interval must not appear twice.
    let mut seen_links = HashSet::new();
    for l in left_wing.iter().chain(&right_wing) {
        if !seen_links.insert(*l) {
            log::warn!("anchor {} rejected: C2-scheme wings repeat link {}", u, l);
            return Err(Error::precondition(format!(
                "wings of the C2-scheme at {} repeat a link",
                u
            )));
        }
    }

    let tower = tower_walk(ctx, u);
    let mut elements = base_set;
    elements.extend(left_wing.iter().chain(&right_wing).flat_map(|l| [l.bottom, l.top]));
    let interior: BTreeSet<ElementId> = tower.iter().copied().collect();
    if !interior.is_subset(&elements) {
        return Err(Error::malformed(format!(
            "tower of {} leaves its C2-scheme; this contradicts the stacked-region picture",
            u
        )));
    }
    let tops: BTreeSet<ElementId> =
        left_wing.iter().chain(&right_wing).map(|l| l.top).collect();
    let upper_boundary: BTreeSet<ElementId> = tops.difference(&interior).copied().collect();
    let lower_boundary: BTreeSet<ElementId> = elements
        .iter()
        .copied()
        .filter(|x| !interior.contains(x) && !upper_boundary.contains(x))
        .collect();
    Ok(C2Scheme {
        anchor: u,
        base,
        left_wing,
        left_steps,
        right_wing,
        right_steps,
        tower,
        interior,
        upper_boundary,
        lower_boundary,
    })
}

fn c3_base_at(ctx: &Ctx, u: ElementId) -> Option<C3Base> {
    let d = ctx.d;
    let &[m1, m2] = d.upper_covers(u) else { return None };
    let &[l1, l2] = d.lower_covers(u) else { return None };
    let w = ctx.leq.meet(l1, l2)?;
    if !ctx.is_cover(w, l1) || !ctx.is_cover(w, l2) {
        return None;
    }
    let &[bl, u1] = d.upper_covers(l1) else { return None };
    if u1 != u {
        return None;
    }
    let &[u2, br] = d.upper_covers(l2) else { return None };
    if u2 != u {
        return None;
    }
    if !ctx.is_cover(bl, m1) || !ctx.is_cover(br, m2) {
        return None;
    }
    let t = ctx.leq.join(m1, m2)?;
    if !ctx.is_cover(m1, t) || !ctx.is_cover(m2, t) {
        return None;
    }
    let base = C3Base {
        bottom: w,
        lower_l: l1,
        lower_r: l2,
        corner_l: bl,
        corner_r: br,
        mid_l: m1,
        mid_r: m2,
        center: u,
        top: t,
    };
    // the nine elements must be closed under meet and join
    let set = base.element_set();
    for &x in &set {
        for &y in &set {
            let (m, j) = (ctx.leq.meet(x, y)?, ctx.leq.join(x, y)?);
            if !set.contains(&m) || !set.contains(&j) {
                return None;
            }
        }
    }
    // adjacency in the host lists, as drawn
    let pos = |list: &[ElementId], a: ElementId| list.iter().position(|&z| z == a);
    let (pa, pb) = (pos(d.upper_covers(w), l1)?, pos(d.upper_covers(w), l2)?);
    if pb != pa + 1 {
        return None;
    }
    let (pa, pb) = (pos(d.lower_covers(t), m1)?, pos(d.lower_covers(t), m2)?);
    if pb != pa + 1 {
        return None;
    }
    Some(base)
}

pub(crate) fn build_c3_scheme(ctx: &Ctx, u: ElementId) -> Result<C3Scheme> {
    let base = c3_base_at(ctx, u).ok_or_else(|| {
        Error::precondition(format!("{} is not the center of a cover-preserving C3 square", u))
    })?;
    let al = base.upper_left_chain();
    let lt = c3_trajectory(&ctx.idx, al)?;
    let lpos = lt.position_of(al).unwrap();
    let left_wing = lt.links[..=lpos].to_vec();
    let left_steps = lt.steps[..lpos].to_vec();
    let ar = base.upper_right_chain();
    let rt = c3_trajectory(&ctx.idx, ar)?;
    let rpos = rt.position_of(ar).unwrap();
    let right_wing = rt.links[rpos..].to_vec();
    let right_steps = rt.steps[rpos..].to_vec();

    if !ctx.chain_on_boundary(left_wing[0]) {
        return Err(Error::precondition(format!(
            "left wing of the C3-scheme at {} does not terminate on the boundary",
            u
        )));
    }
    if !ctx.chain_on_boundary(*right_wing.last().unwrap()) {
        return Err(Error::precondition(format!(
            "right wing of the C3-scheme at {} does not terminate on the boundary",
            u
        )));
    }

    // Resection deletes exactly the wing-chain middles. Wings may share
    // endpoint elements, but a middle colliding with a kept element (a chain
    // endpoint, the anchor, or the base frame) would make the splice
    // ill-defined, as would two chains sharing one middle.
    let base_set = base.element_set();
    let mut kept: BTreeSet<ElementId> = base_set.clone();
    kept.remove(&base.mid_l);
    kept.remove(&base.mid_r);
    let mut middles = HashSet::new();
    for l in left_wing.iter().chain(&right_wing) {
        kept.insert(l.bottom);
        kept.insert(l.top);
        if !middles.insert(l.middle) {
            log::warn!("anchor {} rejected: C3-scheme wings share middle {}", u, l.middle);
            return Err(Error::precondition(format!(
                "wings of the C3-scheme at {} share a chain middle",
                u
            )));
        }
    }
    if let Some(bad) = middles.iter().find(|m| kept.contains(m)) {
        log::warn!("anchor {} rejected: wing middle {} is also a kept element", u, bad);
        return Err(Error::precondition(format!(
            "a wing middle of the C3-scheme at {} is also a kept element",
            u
        )));
    }

    let mut elements = base_set;
    elements.extend(left_wing.iter().chain(&right_wing).flat_map(|l| l.elements()));
    let mut interior: BTreeSet<ElementId> = BTreeSet::from([u]);
    interior.extend(left_wing.iter().chain(&right_wing).map(|l| l.middle));
    let tops: BTreeSet<ElementId> =
        left_wing.iter().chain(&right_wing).map(|l| l.top).collect();
    let upper_boundary: BTreeSet<ElementId> = tops.difference(&interior).copied().collect();
    let lower_boundary: BTreeSet<ElementId> = elements
        .iter()
        .copied()
        .filter(|x| !interior.contains(x) && !upper_boundary.contains(x))
        .collect();
    Ok(C3Scheme {
        anchor: u,
        base,
        left_wing,
        left_steps,
        right_wing,
        right_steps,
        interior,
        upper_boundary,
        lower_boundary,
    })
}

/// Anchor set of the given scheme kind, in id order.
pub fn anchors(d: &Diagram, kind: SchemeKind) -> Result<Vec<ElementId>> {
    let ctx = Ctx::new(d)?;
    anchors_with(&ctx, kind)
}

pub(crate) fn anchors_with(ctx: &Ctx, kind: SchemeKind) -> Result<Vec<ElementId>> {
    let mut out = Vec::new();
    match kind {
        SchemeKind::C2 => {
            for u in covering_n7_centers_with(ctx) {
                if build_c2_scheme(ctx, u).is_ok() {
                    out.push(u);
                }
            }
        }
        SchemeKind::C3 => {
            for u in ctx.d.elements() {
                if c3_base_at(ctx, u).is_some() && build_c3_scheme(ctx, u).is_ok() {
                    out.push(u);
                }
            }
        }
    }
    Ok(out)
}

/// The unique scheme anchored at `u`, or an error if `u` is not an anchor of
/// that kind.
pub fn scheme(d: &Diagram, u: ElementId, kind: SchemeKind) -> Result<Scheme> {
    let ctx = Ctx::new(d)?;
    match kind {
        SchemeKind::C2 => Ok(Scheme::C2(build_c2_scheme(&ctx, u)?)),
        SchemeKind::C3 => Ok(Scheme::C3(build_c3_scheme(&ctx, u)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::Diagram;
    use crate::oracle;
    use crate::surgery::{grid, stacked_n7};

    fn s7() -> Diagram {
        stacked_n7(0)
    }

    /// grid(3,3) with an extra element hung on the upper-left boundary: it
    /// still has a cover-preserving square of 3-chains, but the left wing of
    /// that square no longer terminates on the boundary.
    fn blocked_wing_fixture() -> Diagram {
        let g = grid(3, 3).unwrap();
        let mut upper: Vec<Vec<ElementId>> =
            (0..9).map(|i| g.upper_covers(ElementId(i)).to_vec()).collect();
        let mut lower: Vec<Vec<ElementId>> =
            (0..9).map(|i| g.lower_covers(ElementId(i)).to_vec()).collect();
        let f = ElementId(9);
        upper[6].insert(0, f); // (2,0) gains f as its new leftmost cover
        lower[8].insert(0, f); // (2,2) gains f as its new leftmost lower cover
        upper.push(vec![ElementId(8)]);
        lower.push(vec![ElementId(6)]);
        Diagram::from_cover_lists(upper, lower)
    }

    #[test]
    fn tight_n7_of_s7_is_the_whole_diagram() {
        let d = s7();
        let t = tight_n7(&d, ElementId(4)).unwrap();
        assert_eq!(t.u, ElementId(4));
        assert_eq!(t.u_star, ElementId(6));
        assert_eq!((t.a_l, t.b_l), (ElementId(1), ElementId(3)));
        assert_eq!((t.a_r, t.b_r), (ElementId(2), ElementId(5)));
        assert_eq!(t.bottom, ElementId(0));
        // the tight N7 recomputed from either side is the same 7-set
        assert_eq!(t.element_set().len(), 7);
        // b_l ∧ b_r ≤ u
        let (m, _) = d.lattice_ops(t.b_l, t.b_r).unwrap();
        let leq = crate::diagram::LeqTable::build(&d).unwrap();
        assert!(leq.leq(m, t.u));
    }

    #[test]
    fn tight_n7_rejects_join_reducible_centers() {
        let g = grid(3, 3).unwrap();
        assert!(tight_n7(&g, ElementId(4)).is_err()); // two upper covers
        let d = s7();
        assert!(tight_n7(&d, ElementId(3)).is_err()); // on the boundary
    }

    /// Independent covering-N7 count: all 7-subsets that are cover-preserving
    /// sublattices isomorphic to the s7 poset.
    fn brute_force_n7_count(d: &Diagram) -> usize {
        let leq = crate::diagram::LeqTable::build(d).unwrap();
        let p7 = oracle::Poset::from_diagram(&s7()).unwrap();
        let target = oracle::canonical_form(&p7);
        let n = d.n();
        let mut count = 0;
        let mut subset = Vec::new();
        fn rec(
            d: &Diagram,
            leq: &crate::diagram::LeqTable,
            target: &[u8],
            start: usize,
            subset: &mut Vec<ElementId>,
            count: &mut usize,
        ) {
            if subset.len() == 7 {
                // sublattice?
                for &a in subset.iter() {
                    for &b in subset.iter() {
                        let (Some(m), Some(j)) = (leq.meet(a, b), leq.join(a, b)) else {
                            return;
                        };
                        if !subset.contains(&m) || !subset.contains(&j) {
                            return;
                        }
                    }
                }
                // cover-preserving: covers inside the subset are covers of d
                for &a in subset.iter() {
                    for &b in subset.iter() {
                        if a == b || !leq.lt(a, b) {
                            continue;
                        }
                        let has_between =
                            subset.iter().any(|&z| z != a && z != b && leq.lt(a, z) && leq.lt(z, b));
                        if !has_between && !d.upper_covers(a).contains(&b) {
                            return;
                        }
                    }
                }
                // isomorphic to the N7 poset?
                let mut sub = vec![false; 49];
                for (i, &a) in subset.iter().enumerate() {
                    for (j, &b) in subset.iter().enumerate() {
                        sub[i * 7 + j] = leq.leq(a, b);
                    }
                }
                let p = oracle::Poset::from_leq(7, sub);
                if oracle::canonical_form(&p) == target {
                    *count += 1;
                }
                return;
            }
            for i in start..d.n() {
                subset.push(ElementId(i as u32));
                rec(d, leq, target, i + 1, subset, count);
                subset.pop();
            }
        }
        rec(d, &leq, &target, 0, &mut subset, &mut count);
        let _ = n;
        count
    }

    #[test]
    fn covering_centers_match_brute_force() {
        for (d, expected) in [
            (grid(3, 3).unwrap(), 0usize),
            (grid(4, 3).unwrap(), 0),
            (s7(), 1),
            (stacked_n7(1), 1),
            (stacked_n7(3), 1),
            (blocked_wing_fixture(), 1),
        ] {
            let centers = covering_n7_centers(&d).unwrap();
            assert_eq!(centers.len(), expected, "centers of a {}-element diagram", d.n());
            assert_eq!(centers.len(), brute_force_n7_count(&d), "brute-force disagreement");
        }
        assert_eq!(covering_n7_centers(&stacked_n7(3)).unwrap(), vec![ElementId(4)]);
    }

    #[test]
    fn locate_in_stack_fixtures() {
        let d = s7();
        let (r, j) = locate_in_stack(&d, ElementId(4)).unwrap().unwrap();
        assert_eq!((r.m, j), (0, 0));

        let d3 = stacked_n7(3);
        // x(2) has id 10 in the standalone tower
        let (r, j) = locate_in_stack(&d3, ElementId(10)).unwrap().unwrap();
        assert_eq!((r.m, j), (3, 2));
        assert_eq!(r.len(), 16);

        let g = grid(3, 3).unwrap();
        assert!(locate_in_stack(&g, ElementId(4)).unwrap().is_none());
        // boundary elements are never tower members
        assert!(locate_in_stack(&d3, ElementId(0)).unwrap().is_none());
    }

    #[test]
    fn rank_fixtures() {
        assert_eq!(rank(&s7(), ElementId(4)).unwrap(), 0);
        for m in 0..=3 {
            let d = stacked_n7(m);
            assert_eq!(rank(&d, ElementId(4)).unwrap(), m);
            assert_eq!(rank_by_regions(&d, ElementId(4)).unwrap(), m);
        }
        assert!(rank(&grid(3, 3).unwrap(), ElementId(4)).is_err());
    }

    #[test]
    fn anchor_fixtures() {
        let g = grid(3, 3).unwrap();
        assert_eq!(anchors(&g, SchemeKind::C3).unwrap(), vec![ElementId(4)]);
        assert!(anchors(&g, SchemeKind::C2).unwrap().is_empty());

        let d = s7();
        assert_eq!(anchors(&d, SchemeKind::C2).unwrap(), vec![ElementId(4)]);
        assert!(anchors(&d, SchemeKind::C3).unwrap().is_empty());
    }

    #[test]
    fn blocked_wing_has_square_but_no_c3_scheme() {
        let d = blocked_wing_fixture();
        assert!(d.validate_well_formed().is_ok(), "{}", d.validate_well_formed());
        assert!(crate::geometry::check_gk_criterion(&d));
        // the cover-preserving square of chains is still there
        let ctx = Ctx::new(&d).unwrap();
        assert!(c3_base_at(&ctx, ElementId(4)).is_some());
        // but its left wing no longer ends on the boundary
        assert!(anchors(&d, SchemeKind::C3).unwrap().is_empty());
        assert!(scheme(&d, ElementId(4), SchemeKind::C3).is_err());
    }

    #[test]
    fn scheme_fixtures() {
        let g = grid(3, 3).unwrap();
        let Scheme::C3(sch) = scheme(&g, ElementId(4), SchemeKind::C3).unwrap() else {
            panic!()
        };
        assert_eq!(sch.base.element_set().len(), 9);
        assert_eq!(sch.left_wing.len(), 1);
        assert_eq!(sch.right_wing.len(), 1);
        let interior: Vec<ElementId> = sch.interior.iter().copied().collect();
        assert_eq!(interior, vec![ElementId(4), ElementId(5), ElementId(7)]);

        let d = s7();
        let Scheme::C2(sch) = scheme(&d, ElementId(4), SchemeKind::C2).unwrap() else {
            panic!()
        };
        assert_eq!(sch.left_wing.len(), 1);
        assert_eq!(sch.right_wing.len(), 1);
        assert_eq!(sch.interior.iter().copied().collect::<Vec<_>>(), vec![ElementId(4)]);
        assert_eq!(sch.tower, vec![ElementId(4)]);

        // anchors have exactly two lower covers
        for m in 0..=2 {
            let d = stacked_n7(m);
            for u in anchors(&d, SchemeKind::C2).unwrap() {
                assert_eq!(d.lower_covers(u).len(), 2);
            }
        }
    }

    #[test]
    fn stacked_interiors_are_towers() {
        for m in 0..=3 {
            let d = stacked_n7(m);
            let regions = stacked_tower(&d, ElementId(4)).unwrap();
            assert_eq!(regions.len(), m + 1);
            for (i, r) in regions.iter().enumerate() {
                assert_eq!(r.interior_tower().len(), i + 1);
                assert_eq!(r.elements().len(), 7 + 3 * i);
            }
            // two stacked regions with intersecting interiors coincide
            let maximal = regions.last().unwrap();
            for (i, r) in regions.iter().enumerate() {
                assert_eq!(&maximal.rows[..=i], &r.rows[..]);
            }
        }
    }
}
