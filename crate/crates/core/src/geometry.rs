//! Planar structure of a diagram: cells, 4-cells, covering squares, and
//! C2/C3 trajectories with their wings.
//!
//! A *cell* is a minimal region: a bottom, a top, and two chains between
//! them with nothing inside. Cells are traced combinatorially: the face above
//! an element `a` between two adjacent upper covers is closed by walking the
//! rightmost chain up from the left cover and the leftmost chain up from the
//! right cover until they meet. For slim semimodular diagrams every cell is a
//! 4-cell and trajectory steps move between opposite sides of 4-cells.

use std::collections::{BTreeSet, HashMap};

use crate::diagram::{Diagram, ElementId, LeqTable};
use crate::error::{Error, Result};

/// An edge of the diagram: `top` covers `bottom`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrimeInterval {
    pub bottom: ElementId,
    pub top: ElementId,
}

impl PrimeInterval {
    pub fn new(d: &Diagram, bottom: ElementId, top: ElementId) -> Result<Self> {
        if d.upper_covers(bottom).contains(&top) {
            Ok(PrimeInterval { bottom, top })
        } else {
            Err(Error::precondition(format!("{} does not cover {}", top, bottom)))
        }
    }
}

impl std::fmt::Display for PrimeInterval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{},{}]", self.bottom, self.top)
    }
}

/// A cover-preserving three-element chain `bottom ≺ middle ≺ top`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct C3Chain {
    pub bottom: ElementId,
    pub middle: ElementId,
    pub top: ElementId,
}

impl C3Chain {
    pub fn new(d: &Diagram, bottom: ElementId, middle: ElementId, top: ElementId) -> Result<Self> {
        if d.upper_covers(bottom).contains(&middle) && d.upper_covers(middle).contains(&top) {
            Ok(C3Chain { bottom, middle, top })
        } else {
            Err(Error::precondition(format!(
                "{} ≺ {} ≺ {} is not a cover-preserving chain",
                bottom, middle, top
            )))
        }
    }

    pub fn lower_edge(&self) -> PrimeInterval {
        PrimeInterval { bottom: self.bottom, top: self.middle }
    }

    pub fn upper_edge(&self) -> PrimeInterval {
        PrimeInterval { bottom: self.middle, top: self.top }
    }

    pub fn elements(&self) -> [ElementId; 3] {
        [self.bottom, self.middle, self.top]
    }
}

impl std::fmt::Display for C3Chain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{},{},{}]", self.bottom, self.middle, self.top)
    }
}

/// A minimal region. Both sides run from `bottom` to `top` inclusive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub bottom: ElementId,
    pub top: ElementId,
    pub left_side: Vec<ElementId>,
    pub right_side: Vec<ElementId>,
}

/// A 4-cell: bottom, one element per side, top.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FourCell {
    pub bottom: ElementId,
    pub left: ElementId,
    pub right: ElementId,
    pub top: ElementId,
}

impl Cell {
    pub fn is_four_cell(&self) -> bool {
        self.left_side.len() == 3 && self.right_side.len() == 3
    }

    pub fn as_four(&self) -> Option<FourCell> {
        if self.is_four_cell() {
            Some(FourCell {
                bottom: self.bottom,
                left: self.left_side[1],
                right: self.right_side[1],
                top: self.top,
            })
        } else {
            None
        }
    }

    pub fn vertex_set(&self) -> BTreeSet<ElementId> {
        self.left_side.iter().chain(&self.right_side).copied().collect()
    }

    fn side_edges(side: &[ElementId]) -> impl Iterator<Item = PrimeInterval> + '_ {
        side.windows(2).map(|w| PrimeInterval { bottom: w[0], top: w[1] })
    }

    pub fn left_edges(&self) -> impl Iterator<Item = PrimeInterval> + '_ {
        Self::side_edges(&self.left_side)
    }

    pub fn right_edges(&self) -> impl Iterator<Item = PrimeInterval> + '_ {
        Self::side_edges(&self.right_side)
    }
}

impl FourCell {
    pub fn vertex_set(&self) -> BTreeSet<ElementId> {
        [self.bottom, self.left, self.right, self.top].into_iter().collect()
    }
}

// ---------------------------------------------------------------------------
// Cell tracing

fn walk_chain(d: &Diagram, start: ElementId, leftmost: bool) -> Vec<ElementId> {
    let mut chain = vec![start];
    let mut x = start;
    for _ in 0..d.n() {
        let ups = d.upper_covers(x);
        if ups.is_empty() {
            break;
        }
        x = if leftmost { ups[0] } else { *ups.last().unwrap() };
        chain.push(x);
    }
    chain
}

fn trace_cell_above(d: &Diagram, a: ElementId, pair: usize) -> Result<Cell> {
    let ups = d.upper_covers(a);
    let lchain = {
        let mut c = vec![a];
        c.extend(walk_chain(d, ups[pair], false));
        c
    };
    let rchain = {
        let mut c = vec![a];
        c.extend(walk_chain(d, ups[pair + 1], true));
        c
    };
    let lset: BTreeSet<ElementId> = lchain[1..].iter().copied().collect();
    let rset: BTreeSet<ElementId> = rchain[1..].iter().copied().collect();
    let lpos = lchain[1..].iter().position(|x| rset.contains(x));
    let rpos = rchain[1..].iter().position(|x| lset.contains(x));
    match (lpos, rpos) {
        (Some(lp), Some(rp)) if lchain[lp + 1] == rchain[rp + 1] => Ok(Cell {
            bottom: a,
            top: lchain[lp + 1],
            left_side: lchain[..lp + 2].to_vec(),
            right_side: rchain[..rp + 2].to_vec(),
        }),
        _ => Err(Error::malformed(format!(
            "cell above {} between covers {} and {} does not close",
            a,
            ups[pair],
            ups[pair + 1]
        ))),
    }
}

fn trace_cell_below(d: &Diagram, t: ElementId, pair: usize) -> Result<Cell> {
    let walk_down = |start: ElementId, rightmost: bool| {
        let mut chain = vec![t, start];
        let mut x = start;
        for _ in 0..d.n() {
            let lows = d.lower_covers(x);
            if lows.is_empty() {
                break;
            }
            x = if rightmost { *lows.last().unwrap() } else { lows[0] };
            chain.push(x);
        }
        chain
    };
    let lows = d.lower_covers(t);
    let lchain = walk_down(lows[pair], true);
    let rchain = walk_down(lows[pair + 1], false);
    let lset: BTreeSet<ElementId> = lchain[1..].iter().copied().collect();
    let rset: BTreeSet<ElementId> = rchain[1..].iter().copied().collect();
    let lpos = lchain[1..].iter().position(|x| rset.contains(x));
    let rpos = rchain[1..].iter().position(|x| lset.contains(x));
    match (lpos, rpos) {
        (Some(lp), Some(rp)) if lchain[lp + 1] == rchain[rp + 1] => {
            let mut left_side = lchain[..lp + 2].to_vec();
            let mut right_side = rchain[..rp + 2].to_vec();
            left_side.reverse();
            right_side.reverse();
            Ok(Cell { bottom: lchain[lp + 1], top: t, left_side, right_side })
        }
        _ => Err(Error::malformed(format!(
            "cell below {} between covers {} and {} does not close",
            t,
            lows[pair],
            lows[pair + 1]
        ))),
    }
}

/// All minimal regions, in deterministic order (by bottom element, then by
/// position of the spanning upper-cover pair).
pub fn cells(d: &Diagram) -> Result<Vec<Cell>> {
    let mut out = Vec::new();
    for a in d.elements() {
        let k = d.upper_covers(a).len();
        for pair in 0..k.saturating_sub(1) {
            let cell = trace_cell_above(d, a, pair)?;
            let inner_l: BTreeSet<_> = cell.left_side[1..cell.left_side.len() - 1].iter().collect();
            let overlap = cell.right_side[1..cell.right_side.len() - 1]
                .iter()
                .any(|x| inner_l.contains(x));
            if overlap {
                return Err(Error::malformed(format!(
                    "cell above {} has intersecting sides",
                    a
                )));
            }
            out.push(cell);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Cell index: which cell lies left/right of each edge

type Edge = (u32, u32);

fn edge_key(e: PrimeInterval) -> Edge {
    (e.bottom.0, e.top.0)
}

/// Cells of a diagram plus, per edge, the incident cell on each side.
pub struct CellIndex<'a> {
    pub diagram: &'a Diagram,
    pub cells: Vec<Cell>,
    right_of: HashMap<Edge, usize>,
    left_of: HashMap<Edge, usize>,
}

impl<'a> CellIndex<'a> {
    pub fn build(d: &'a Diagram) -> Result<CellIndex<'a>> {
        let cells = cells(d)?;
        let mut right_of = HashMap::new();
        let mut left_of = HashMap::new();
        for (i, c) in cells.iter().enumerate() {
            for e in c.left_edges() {
                if right_of.insert(edge_key(e), i).is_some() {
                    return Err(Error::malformed(format!("edge {} borders two cells on its right", e)));
                }
            }
            for e in c.right_edges() {
                if left_of.insert(edge_key(e), i).is_some() {
                    return Err(Error::malformed(format!("edge {} borders two cells on its left", e)));
                }
            }
        }
        Ok(CellIndex { diagram: d, cells, right_of, left_of })
    }

    pub fn cell_right_of(&self, e: PrimeInterval) -> Option<&Cell> {
        self.right_of.get(&edge_key(e)).map(|&i| &self.cells[i])
    }

    pub fn cell_left_of(&self, e: PrimeInterval) -> Option<&Cell> {
        self.left_of.get(&edge_key(e)).map(|&i| &self.cells[i])
    }

    pub fn all_four_cells(&self) -> bool {
        self.cells.iter().all(Cell::is_four_cell)
    }

    pub fn distinct_bottoms(&self) -> bool {
        let bottoms: BTreeSet<ElementId> = self.cells.iter().map(|c| c.bottom).collect();
        bottoms.len() == self.cells.len()
    }
}

/// Combinatorial cell criterion: the diagram is slim and semimodular iff
/// every cell is a 4-cell and no two distinct 4-cells share a bottom.
/// Returns false on diagrams whose cell decomposition does not close up.
pub fn check_gk_criterion(d: &Diagram) -> bool {
    match CellIndex::build(d) {
        Ok(idx) => idx.all_four_cells() && idx.distinct_bottoms(),
        Err(_) => false,
    }
}

/// Operational planarity validation used by `validate_well_formed`: the cell
/// decomposition must close, every edge must see exactly one cell per
/// non-boundary side, and tracing faces downward from tops must reproduce
/// the same decomposition.
pub fn planarity_problems(d: &Diagram) -> Vec<String> {
    let idx = match CellIndex::build(d) {
        Ok(i) => i,
        Err(e) => return vec![e.to_string()],
    };

    let mut problems = Vec::new();
    let (lchain, rchain) = d.boundary_chains();
    let chain_edges = |c: &[ElementId]| -> BTreeSet<Edge> {
        c.windows(2).map(|w| (w[0].0, w[1].0)).collect()
    };
    let left_edges = chain_edges(&lchain);
    let right_edges = chain_edges(&rchain);

    for (x, y) in d.cover_pairs() {
        let key = (x.0, y.0);
        let e = PrimeInterval { bottom: x, top: y };
        let has_right = idx.right_of.contains_key(&key);
        let has_left = idx.left_of.contains_key(&key);
        if has_right == right_edges.contains(&key) {
            problems.push(format!(
                "edge {} {} a cell on its right but {} on the right boundary",
                e,
                if has_right { "has" } else { "lacks" },
                if right_edges.contains(&key) { "lies" } else { "does not lie" }
            ));
        }
        if has_left == left_edges.contains(&key) {
            problems.push(format!(
                "edge {} {} a cell on its left but {} on the left boundary",
                e,
                if has_left { "has" } else { "lacks" },
                if left_edges.contains(&key) { "lies" } else { "does not lie" }
            ));
        }
    }

    // The decomposition must look the same traced downward from tops.
    let mut down_cells = Vec::new();
    for t in d.elements() {
        let k = d.lower_covers(t).len();
        for pair in 0..k.saturating_sub(1) {
            match trace_cell_below(d, t, pair) {
                Ok(c) => down_cells.push(c),
                Err(e) => {
                    problems.push(e.to_string());
                    return problems;
                }
            }
        }
    }
    let as_set = |cs: &[Cell]| -> BTreeSet<(ElementId, ElementId, Vec<ElementId>, Vec<ElementId>)> {
        cs.iter()
            .map(|c| (c.bottom, c.top, c.left_side.clone(), c.right_side.clone()))
            .collect()
    };
    if as_set(&idx.cells) != as_set(&down_cells) {
        problems.push("cells traced from bottoms and from tops disagree".into());
    }

    // Every element lies on the boundary or on some cell side.
    let mut seen = vec![false; d.n()];
    for x in lchain.iter().chain(&rchain) {
        seen[x.index()] = true;
    }
    for c in &idx.cells {
        for x in c.left_side.iter().chain(&c.right_side) {
            seen[x.index()] = true;
        }
    }
    for x in d.elements() {
        if !seen[x.index()] {
            problems.push(format!("element {} lies on no cell and no boundary chain", x));
        }
    }
    problems
}

// ---------------------------------------------------------------------------
// Covering squares

/// All cover-preserving squares `{a∧b, a, b, a∨b}`, computed from the order
/// relation alone (independently of the cell decomposition).
pub fn covering_squares(d: &Diagram) -> Result<Vec<FourCell>> {
    let leq = LeqTable::build(d)?;
    let mut out = Vec::new();
    for a in d.elements() {
        for b in d.elements() {
            if a >= b || leq.leq(a, b) || leq.leq(b, a) {
                continue;
            }
            let (Some(m), Some(j)) = (leq.meet(a, b), leq.join(a, b)) else {
                return Err(Error::malformed("meet or join missing"));
            };
            let covers = |x: ElementId, y: ElementId| d.upper_covers(x).contains(&y);
            if covers(m, a) && covers(m, b) && covers(a, j) && covers(b, j) {
                let ups = d.upper_covers(m);
                let (pa, pb) = (
                    ups.iter().position(|&u| u == a).unwrap(),
                    ups.iter().position(|&u| u == b).unwrap(),
                );
                let (left, right) = if pa < pb { (a, b) } else { (b, a) };
                out.push(FourCell { bottom: m, left, right, top: j });
            }
        }
    }
    out.sort_by_key(|f| (f.bottom, f.left));
    Ok(out)
}

// ---------------------------------------------------------------------------
// Trajectories

/// Direction of one trajectory step, read left to right.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepDir {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// One step to the right: the opposite side of the 4-cell right of `e`.
/// `None` when `e` lies on the right boundary.
pub fn c2_step_right(idx: &CellIndex, e: PrimeInterval) -> Result<Option<(PrimeInterval, StepDir)>> {
    let Some(cell) = idx.cell_right_of(e) else {
        return Ok(None);
    };
    let f = cell
        .as_four()
        .ok_or_else(|| Error::malformed(format!("trajectory step at {} hits a non-4-cell", e)))?;
    if e.bottom == f.bottom && e.top == f.left {
        Ok(Some((PrimeInterval { bottom: f.right, top: f.top }, StepDir::Up)))
    } else if e.bottom == f.left && e.top == f.top {
        Ok(Some((PrimeInterval { bottom: f.bottom, top: f.right }, StepDir::Down)))
    } else {
        Err(Error::malformed(format!("edge {} not on the left side of its right cell", e)))
    }
}

/// One step to the left. The returned direction is the direction of the step
/// from the returned link to `e`, read left to right.
pub fn c2_step_left(idx: &CellIndex, e: PrimeInterval) -> Result<Option<(PrimeInterval, StepDir)>> {
    let Some(cell) = idx.cell_left_of(e) else {
        return Ok(None);
    };
    let f = cell
        .as_four()
        .ok_or_else(|| Error::malformed(format!("trajectory step at {} hits a non-4-cell", e)))?;
    if e.bottom == f.bottom && e.top == f.right {
        Ok(Some((PrimeInterval { bottom: f.left, top: f.top }, StepDir::Down)))
    } else if e.bottom == f.right && e.top == f.top {
        Ok(Some((PrimeInterval { bottom: f.bottom, top: f.left }, StepDir::Up)))
    } else {
        Err(Error::malformed(format!("edge {} not on the right side of its left cell", e)))
    }
}

/// A maximal sequence of consecutive prime intervals, enumerated left to
/// right; `steps[i]` is the direction from `links[i]` to `links[i+1]`.
#[derive(Debug, Clone)]
pub struct C2Trajectory {
    pub links: Vec<PrimeInterval>,
    pub steps: Vec<StepDir>,
    /// Index of the topmost link when the trajectory is a hat; `None` for an
    /// up-trajectory.
    pub turn_index: Option<usize>,
}

impl C2Trajectory {
    pub fn position_of(&self, e: PrimeInterval) -> Option<usize> {
        self.links.iter().position(|&l| l == e)
    }
}

/// A maximal sequence of consecutive cover-preserving 3-chains.
#[derive(Debug, Clone)]
pub struct C3Trajectory {
    pub links: Vec<C3Chain>,
    pub steps: Vec<StepDir>,
    pub turn_index: Option<usize>,
}

impl C3Trajectory {
    pub fn position_of(&self, c: C3Chain) -> Option<usize> {
        self.links.iter().position(|&l| l == c)
    }
}

fn shape_of(steps: &[StepDir]) -> Result<Option<usize>> {
    let first_down = steps.iter().position(|&s| s == StepDir::Down);
    if let Some(i) = first_down {
        if steps[i..].contains(&StepDir::Up) {
            return Err(Error::malformed("trajectory ascends again after descending"));
        }
        Ok(Some(i))
    } else {
        Ok(None)
    }
}

fn assemble<L: Copy + Eq + std::hash::Hash>(
    start: L,
    mut step_left: impl FnMut(L) -> Result<Option<(L, StepDir)>>,
    mut step_right: impl FnMut(L) -> Result<Option<(L, StepDir)>>,
    cap: usize,
) -> Result<(Vec<L>, Vec<StepDir>, Option<usize>)> {
    let mut links = vec![start];
    let mut steps = Vec::new();
    let mut cur = start;
    for i in 0.. {
        if i > cap {
            return Err(Error::malformed("trajectory walk does not terminate"));
        }
        match step_left(cur)? {
            Some((l, dir)) => {
                links.push(l);
                steps.push(dir);
                cur = l;
            }
            None => break,
        }
    }
    links.reverse();
    steps.reverse();
    cur = start;
    for i in 0.. {
        if i > cap {
            return Err(Error::malformed("trajectory walk does not terminate"));
        }
        match step_right(cur)? {
            Some((r, dir)) => {
                links.push(r);
                steps.push(dir);
                cur = r;
            }
            None => break,
        }
    }
    let distinct: std::collections::HashSet<_> = links.iter().collect();
    if distinct.len() != links.len() {
        return Err(Error::malformed("trajectory revisits a link"));
    }
    let turn = shape_of(&steps)?;
    Ok((links, steps, turn))
}

/// The unique maximal C2-trajectory through `start`.
pub fn c2_trajectory(idx: &CellIndex, start: PrimeInterval) -> Result<C2Trajectory> {
    PrimeInterval::new(idx.diagram, start.bottom, start.top)?;
    let cap = 2 * idx.diagram.cover_count() + 2;
    let (links, steps, turn_index) = assemble(
        start,
        |e| c2_step_left(idx, e),
        |e| c2_step_right(idx, e),
        cap,
    )?;
    Ok(C2Trajectory { links, steps, turn_index })
}

fn c3_compose(
    s1: Option<(PrimeInterval, StepDir)>,
    s2: Option<(PrimeInterval, StepDir)>,
) -> Option<(C3Chain, StepDir)> {
    let ((e1, d1), (e2, d2)) = (s1?, s2?);
    if d1 != d2 || e1.top != e2.bottom {
        return None;
    }
    Some((C3Chain { bottom: e1.bottom, middle: e1.top, top: e2.top }, d1))
}

/// One C3 step to the right: the opposite side of the cover-preserving
/// C3×C2 region right of `c` (two stacked 4-cells sharing the middle edge).
pub fn c3_step_right(idx: &CellIndex, c: C3Chain) -> Result<Option<(C3Chain, StepDir)>> {
    let s1 = c2_step_right(idx, c.lower_edge())?;
    let s2 = c2_step_right(idx, c.upper_edge())?;
    Ok(c3_compose(s1, s2))
}

pub fn c3_step_left(idx: &CellIndex, c: C3Chain) -> Result<Option<(C3Chain, StepDir)>> {
    let s1 = c2_step_left(idx, c.lower_edge())?;
    let s2 = c2_step_left(idx, c.upper_edge())?;
    Ok(c3_compose(s1, s2))
}

/// The unique maximal C3-trajectory through `start`.
pub fn c3_trajectory(idx: &CellIndex, start: C3Chain) -> Result<C3Trajectory> {
    C3Chain::new(idx.diagram, start.bottom, start.middle, start.top)?;
    let cap = 2 * idx.diagram.cover_count() + 2;
    let (links, steps, turn_index) = assemble(
        start,
        |c| c3_step_left(idx, c),
        |c| c3_step_right(idx, c),
        cap,
    )?;
    Ok(C3Trajectory { links, steps, turn_index })
}

/// Links of the trajectory through `a` from the leftmost (resp. rightmost)
/// link up to and including `a`, in left-to-right order.
pub fn c2_wing(idx: &CellIndex, a: PrimeInterval, side: Side) -> Result<Vec<PrimeInterval>> {
    let t = c2_trajectory(idx, a)?;
    let pos = t.position_of(a).unwrap();
    Ok(match side {
        Side::Left => t.links[..=pos].to_vec(),
        Side::Right => t.links[pos..].to_vec(),
    })
}

pub fn c3_wing(idx: &CellIndex, a: C3Chain, side: Side) -> Result<Vec<C3Chain>> {
    let t = c3_trajectory(idx, a)?;
    let pos = t.position_of(a).unwrap();
    Ok(match side {
        Side::Left => t.links[..=pos].to_vec(),
        Side::Right => t.links[pos..].to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surgery::{grid, stacked_n7};

    fn s7() -> Diagram {
        stacked_n7(0)
    }

    fn n5() -> Diagram {
        Diagram::parse(
            "latdiag 1\nn 5\nu 0: 1 3\nu 1: 2\nu 2: 4\nu 3: 4\nu 4:\nl 0:\nl 1: 0\nl 2: 1\nl 3: 0\nl 4: 2 3\n",
        )
        .unwrap()
    }

    fn m3() -> Diagram {
        Diagram::parse(
            "latdiag 1\nn 5\nu 0: 1 2 3\nu 1: 4\nu 2: 4\nu 3: 4\nu 4:\nl 0:\nl 1: 0\nl 2: 0\nl 3: 0\nl 4: 1 2 3\n",
        )
        .unwrap()
    }

    /// Independent face oracle: traverse the rotation system dart by dart.
    /// Around a vertex the clockwise dart order is upper covers left to
    /// right followed by lower covers right to left.
    fn rotation_faces(d: &Diagram) -> Vec<BTreeSet<ElementId>> {
        type Dart = (u32, u32);
        let leaving = |v: ElementId| -> Vec<Dart> {
            let mut out: Vec<Dart> = d.upper_covers(v).iter().map(|&u| (v.0, u.0)).collect();
            out.extend(d.lower_covers(v).iter().rev().map(|&l| (v.0, l.0)));
            out
        };
        let next_cw = |dart: Dart| -> Dart {
            let around = leaving(ElementId(dart.0));
            let pos = around.iter().position(|&x| x == dart).unwrap();
            around[(pos + 1) % around.len()]
        };
        let mut seen: BTreeSet<Dart> = BTreeSet::new();
        let mut faces = Vec::new();
        let all_darts: Vec<Dart> = d
            .cover_pairs()
            .into_iter()
            .flat_map(|(x, y)| [(x.0, y.0), (y.0, x.0)])
            .collect();
        for start in all_darts {
            if seen.contains(&start) {
                continue;
            }
            let mut face = BTreeSet::new();
            let mut cur = start;
            loop {
                seen.insert(cur);
                face.insert(ElementId(cur.0));
                cur = next_cw((cur.1, cur.0));
                if cur == start {
                    break;
                }
            }
            faces.push(face);
        }
        faces
    }

    #[test]
    fn cells_match_rotation_faces() {
        for d in [grid(2, 2).unwrap(), grid(3, 3).unwrap(), grid(4, 3).unwrap(), s7(), stacked_n7(2), n5()] {
            let cs = cells(&d).unwrap();
            let mut faces = rotation_faces(&d);
            assert_eq!(faces.len(), cs.len() + 1, "faces = cells + outer");
            // remove the outer face: its vertex set is the boundary
            let boundary: BTreeSet<ElementId> = {
                let (l, r) = d.boundary_chains();
                l.into_iter().chain(r).collect()
            };
            let outer = faces.iter().position(|f| *f == boundary).expect("outer face present");
            faces.remove(outer);
            let mut cell_sets: Vec<BTreeSet<ElementId>> = cs.iter().map(Cell::vertex_set).collect();
            cell_sets.sort();
            faces.sort();
            assert_eq!(cell_sets, faces);
        }
    }

    #[test]
    fn grid_cells_are_faces() {
        for (m, n) in [(2, 2), (3, 3), (4, 2), (5, 4)] {
            let d = grid(m, n).unwrap();
            let cs = cells(&d).unwrap();
            assert_eq!(cs.len(), (m - 1) * (n - 1));
            assert!(cs.iter().all(Cell::is_four_cell));
        }
    }

    #[test]
    fn pentagon_has_a_non_four_cell() {
        let cs = cells(&n5()).unwrap();
        assert_eq!(cs.len(), 1);
        let c = &cs[0];
        assert!(!c.is_four_cell());
        let mut lens = [c.left_side.len(), c.right_side.len()];
        lens.sort();
        assert_eq!(lens, [3, 4]);
    }

    #[test]
    fn gk_criterion_fixtures() {
        assert!(check_gk_criterion(&grid(3, 3).unwrap()));
        assert!(check_gk_criterion(&s7()));
        assert!(check_gk_criterion(&stacked_n7(3)));
        assert!(!check_gk_criterion(&n5()));
        assert!(!check_gk_criterion(&m3()));
    }

    #[test]
    fn covering_squares_counts() {
        assert_eq!(covering_squares(&grid(2, 2).unwrap()).unwrap().len(), 1);
        assert_eq!(covering_squares(&grid(3, 3).unwrap()).unwrap().len(), 4);
        assert_eq!(covering_squares(&s7()).unwrap().len(), 3);
    }

    #[test]
    fn four_cells_equal_covering_squares_on_fixtures() {
        for d in [grid(3, 3).unwrap(), s7(), stacked_n7(2), grid(4, 3).unwrap()] {
            let cellsets: BTreeSet<BTreeSet<ElementId>> =
                cells(&d).unwrap().iter().map(Cell::vertex_set).collect();
            let squares: BTreeSet<BTreeSet<ElementId>> =
                covering_squares(&d).unwrap().iter().map(FourCell::vertex_set).collect();
            assert_eq!(cellsets, squares);
        }
    }

    #[test]
    fn s7_trajectory_is_a_hat() {
        let d = s7();
        let idx = CellIndex::build(&d).unwrap();
        // ids: w=0, a_l=1, a_r=2, b_l=3, u=4, b_r=5, u*=6
        let t = c2_trajectory(&idx, PrimeInterval { bottom: ElementId(4), top: ElementId(6) }).unwrap();
        let link = |b: u32, t: u32| PrimeInterval { bottom: ElementId(b), top: ElementId(t) };
        assert_eq!(t.links, vec![link(1, 3), link(4, 6), link(2, 5)]);
        assert_eq!(t.steps, vec![StepDir::Up, StepDir::Down]);
        assert_eq!(t.turn_index, Some(1));
    }

    #[test]
    fn grid_trajectory_is_straight() {
        let d = grid(3, 3).unwrap();
        let idx = CellIndex::build(&d).unwrap();
        // start at [(0,0),(1,0)] = ids [0,3]
        let t = c2_trajectory(&idx, PrimeInterval { bottom: ElementId(0), top: ElementId(3) }).unwrap();
        assert_eq!(t.links.len(), 3);
        assert_eq!(t.turn_index, None);
        assert!(t.steps.iter().all(|&s| s == StepDir::Up));
    }

    /// Brute-force C3 consecutiveness: two cover-preserving 3-chains are
    /// consecutive iff their union is a cover-preserving sublattice
    /// isomorphic to the product of a 3-chain and a 2-chain.
    fn c3_consecutive_oracle(d: &Diagram, a: C3Chain, b: C3Chain) -> bool {
        use crate::diagram::LeqTable;
        let leq = LeqTable::build(d).unwrap();
        for (x, y) in [(a, b), (b, a)] {
            let cover = |p: ElementId, q: ElementId| d.upper_covers(p).contains(&q);
            let cross = cover(x.bottom, y.bottom) && cover(x.middle, y.middle) && cover(x.top, y.top);
            if !cross {
                continue;
            }
            let set: BTreeSet<ElementId> = x.elements().into_iter().chain(y.elements()).collect();
            if set.len() != 6 {
                continue;
            }
            let closed = set.iter().all(|&p| {
                set.iter().all(|&q| {
                    leq.meet(p, q).map_or(false, |m| set.contains(&m))
                        && leq.join(p, q).map_or(false, |j| set.contains(&j))
                })
            });
            if closed {
                return true;
            }
        }
        false
    }

    #[test]
    fn c3_trajectory_matches_brute_force() {
        let d = grid(4, 3).unwrap();
        let idx = CellIndex::build(&d).unwrap();
        // bottom-left boundary chain (0,0) ≺ (1,0) ≺ (2,0) = ids 0, 3, 6
        let start = C3Chain { bottom: ElementId(0), middle: ElementId(3), top: ElementId(6) };
        let traj = c3_trajectory(&idx, start).unwrap();
        assert_eq!(traj.links.len(), 3);

        // independent closure of the brute-force consecutive relation
        let mut chains = Vec::new();
        for x in d.elements() {
            for &y in d.upper_covers(x) {
                for &z in d.upper_covers(y) {
                    chains.push(C3Chain { bottom: x, middle: y, top: z });
                }
            }
        }
        let mut component = vec![start];
        let mut grew = true;
        while grew {
            grew = false;
            for &c in &chains {
                if !component.contains(&c)
                    && component.iter().any(|&m| c3_consecutive_oracle(&d, m, c))
                {
                    component.push(c);
                    grew = true;
                }
            }
        }
        let mut expected: Vec<C3Chain> = traj.links.clone();
        expected.sort();
        component.sort();
        assert_eq!(component, expected);
    }

    #[test]
    fn trajectories_partition_prime_intervals() {
        for d in [grid(3, 3).unwrap(), grid(4, 3).unwrap(), s7(), stacked_n7(2)] {
            let idx = CellIndex::build(&d).unwrap();
            let mut assigned: BTreeSet<PrimeInterval> = BTreeSet::new();
            for (x, y) in d.cover_pairs() {
                let e = PrimeInterval { bottom: x, top: y };
                if assigned.contains(&e) {
                    continue;
                }
                let t = c2_trajectory(&idx, e).unwrap();
                // end links on the boundary
                let (l, r) = d.boundary_chains();
                let boundary_edges: BTreeSet<(u32, u32)> = l
                    .windows(2)
                    .chain(r.windows(2))
                    .map(|w| (w[0].0, w[1].0))
                    .collect();
                let first = t.links[0];
                let last = *t.links.last().unwrap();
                assert!(boundary_edges.contains(&(first.bottom.0, first.top.0)));
                assert!(boundary_edges.contains(&(last.bottom.0, last.top.0)));
                for link in &t.links {
                    assert!(assigned.insert(*link), "interval {} in two trajectories", link);
                }
            }
            assert_eq!(assigned.len(), d.cover_count());
        }
    }

    #[test]
    fn wings_of_boundary_links() {
        let d = grid(3, 3).unwrap();
        let idx = CellIndex::build(&d).unwrap();
        // upper-left boundary chain (2,0) ≺ (2,1) ≺ (2,2) = ids 6, 7, 8
        let a = C3Chain { bottom: ElementId(6), middle: ElementId(7), top: ElementId(8) };
        assert_eq!(c3_wing(&idx, a, Side::Left).unwrap(), vec![a]);
        // a leftmost prime interval is its own left wing
        let e = PrimeInterval { bottom: ElementId(0), top: ElementId(3) };
        assert_eq!(c2_wing(&idx, e, Side::Left).unwrap(), vec![e]);
    }
}
