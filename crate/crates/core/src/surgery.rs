//! Diagram transformations: grid and stacked-N7 construction, boundary
//! removals, corners and rectangularity, resection and insertion.
//!
//! Retained elements keep their ids across every operation; new elements get
//! fresh ids at the end, deleted ids are compacted away. Similarity, not id
//! equality, is the correctness criterion.

use std::collections::{BTreeSet, HashMap};

use crate::diagram::{Diagram, ElementId, LeqTable};
use crate::error::{Error, Result};
use crate::geometry::{PrimeInterval, StepDir};
use crate::schemes::{self, Ctx};

/// The product of two chains: `m` levels on the left factor, `n` on the
/// right, drawn with the `m`-chain going up-left.
pub fn grid(m: usize, n: usize) -> Result<Diagram> {
    if m < 2 || n < 2 {
        return Err(Error::precondition(format!("grid needs m, n >= 2, got {}x{}", m, n)));
    }
    let id = |i: usize, j: usize| ElementId((i * n + j) as u32);
    let mut upper = Vec::with_capacity(m * n);
    let mut lower = Vec::with_capacity(m * n);
    for i in 0..m {
        for j in 0..n {
            let mut ups = Vec::new();
            if i + 1 < m {
                ups.push(id(i + 1, j));
            }
            if j + 1 < n {
                ups.push(id(i, j + 1));
            }
            let mut downs = Vec::new();
            if j > 0 {
                downs.push(id(i, j - 1));
            }
            if i > 0 {
                downs.push(id(i - 1, j));
            }
            upper.push(ups);
            lower.push(downs);
        }
    }
    Ok(Diagram::from_cover_lists(upper, lower))
}

/// The standalone `(7+3m)`-element stacked N7 diagram. `stacked_n7(0)` is
/// the seven-element semimodular N7 itself.
pub fn stacked_n7(m: usize) -> Diagram {
    let n = 7 + 3 * m;
    let w = ElementId(0);
    let a_l = ElementId(1);
    let a_r = ElementId(2);
    let row = |i: usize| {
        (ElementId((3 + 3 * i) as u32), ElementId((4 + 3 * i) as u32), ElementId((5 + 3 * i) as u32))
    };
    let top = ElementId((n - 1) as u32);
    let mut upper = vec![Vec::new(); n];
    let mut lower = vec![Vec::new(); n];
    let mut cover = |a: ElementId, b: ElementId| {
        upper[a.index()].push(b);
        lower[b.index()].push(a);
    };
    cover(w, a_l);
    cover(w, a_r);
    let (l0, x0, r0) = row(0);
    cover(a_l, l0);
    cover(a_l, x0);
    cover(a_r, x0);
    cover(a_r, r0);
    for i in 0..m {
        let (li, xi, ri) = row(i);
        let (ln, xn, rn) = row(i + 1);
        cover(li, ln);
        cover(li, xn);
        cover(xi, xn);
        cover(ri, xn);
        cover(ri, rn);
    }
    let (lm, xm, rm) = row(m);
    cover(lm, top);
    cover(xm, top);
    cover(rm, top);
    Diagram::from_cover_lists(upper, lower)
}

// ---------------------------------------------------------------------------
// Helpers

fn replace_entry(list: &mut [ElementId], old: ElementId, new: ElementId) {
    let pos = list.iter().position(|&z| z == old).expect("cover entry missing");
    list[pos] = new;
}

fn compact(
    n: usize,
    deleted: &BTreeSet<ElementId>,
    upper: Vec<Vec<ElementId>>,
    lower: Vec<Vec<ElementId>>,
) -> Diagram {
    let mut map = vec![None; n];
    let mut next = 0u32;
    for (i, slot) in map.iter_mut().enumerate() {
        if !deleted.contains(&ElementId(i as u32)) {
            *slot = Some(ElementId(next));
            next += 1;
        }
    }
    let remap = |lists: Vec<Vec<ElementId>>| -> Vec<Vec<ElementId>> {
        lists
            .into_iter()
            .enumerate()
            .filter(|(i, _)| map[*i].is_some())
            .map(|(_, l)| l.into_iter().map(|c| map[c.index()].unwrap()).collect())
            .collect()
    };
    Diagram::from_cover_lists(remap(upper), remap(lower))
}

pub(crate) fn is_slim_distributive(ctx: &Ctx) -> bool {
    ctx.idx.all_four_cells()
        && ctx.idx.distinct_bottoms()
        && schemes::covering_n7_centers_with(ctx).is_empty()
}

// ---------------------------------------------------------------------------
// Boundary removals

/// Removes a doubly irreducible boundary element from a slim distributive
/// diagram; the result stays slim distributive.
pub fn remove_boundary_di(d: &Diagram, x: ElementId) -> Result<Diagram> {
    remove_boundary_di_traced(d, x).map(|(d, _)| d)
}

pub fn remove_boundary_di_traced(d: &Diagram, x: ElementId) -> Result<(Diagram, SurgeryRecord)> {
    let ctx = Ctx::new(d)?;
    if !is_slim_distributive(&ctx) {
        return Err(Error::precondition("diagram is not slim distributive"));
    }
    remove_boundary_di_core(&ctx, x)
}

/// Same splice without re-checking slim distributivity; callers guarantee it.
pub(crate) fn remove_boundary_di_core(ctx: &Ctx, x: ElementId) -> Result<(Diagram, SurgeryRecord)> {
    let d = ctx.d;
    if d.upper_covers(x).len() != 1 || d.lower_covers(x).len() != 1 {
        return Err(Error::precondition(format!("{} is not doubly irreducible", x)));
    }
    if ctx.is_interior(x) {
        return Err(Error::precondition(format!("{} is not on a boundary chain", x)));
    }
    let x_star = d.upper_covers(x)[0];
    let x_low = d.lower_covers(x)[0];
    let mut upper: Vec<Vec<ElementId>> = (0..d.n()).map(|i| d.upper_covers(ElementId(i as u32)).to_vec()).collect();
    let mut lower: Vec<Vec<ElementId>> = (0..d.n()).map(|i| d.lower_covers(ElementId(i as u32)).to_vec()).collect();
    let has_between = d
        .elements()
        .any(|z| z != x && ctx.leq.lt(x_low, z) && ctx.leq.lt(z, x_star));
    if has_between {
        upper[x_low.index()].retain(|&z| z != x);
        lower[x_star.index()].retain(|&z| z != x);
    } else {
        replace_entry(&mut upper[x_low.index()], x, x_star);
        replace_entry(&mut lower[x_star.index()], x, x_low);
    }
    let deleted = BTreeSet::from([x]);
    let out = compact(d.n(), &deleted, upper, lower);
    let record = SurgeryRecord {
        op: SurgeryOp::RemoveDi,
        anchor: x,
        removed: vec![x],
        added: 0,
    };
    Ok((out, record))
}

/// Boundary elements that are doubly irreducible and incomparable to
/// something.
pub fn weak_corners(d: &Diagram) -> Result<Vec<ElementId>> {
    let leq = LeqTable::build(d)?;
    let flags = d.boundary_flags();
    Ok(d.elements()
        .filter(|&x| {
            flags[x.index()]
                && d.upper_covers(x).len() == 1
                && d.lower_covers(x).len() == 1
                && d.elements().any(|y| !leq.leq(x, y) && !leq.leq(y, x))
        })
        .collect())
}

/// Weak corners whose lower cover has exactly two covers and whose upper
/// cover has exactly two lower covers.
pub fn corners(d: &Diagram) -> Result<Vec<ElementId>> {
    Ok(weak_corners(d)?
        .into_iter()
        .filter(|&x| {
            let x_low = d.lower_covers(x)[0];
            let x_star = d.upper_covers(x)[0];
            d.upper_covers(x_low).len() == 2 && d.lower_covers(x_star).len() == 2
        })
        .collect())
}

/// Exactly one weak corner on each boundary chain and the two are
/// complementary.
pub fn is_rectangular(d: &Diagram) -> Result<bool> {
    let wc = weak_corners(d)?;
    let (lchain, rchain) = d.boundary_chains();
    let on = |chain: &[ElementId], x: ElementId| chain.contains(&x);
    let left: Vec<ElementId> = wc.iter().copied().filter(|&x| on(&lchain, x)).collect();
    let right: Vec<ElementId> = wc.iter().copied().filter(|&x| on(&rchain, x)).collect();
    if left.len() != 1 || right.len() != 1 || left[0] == right[0] {
        return Ok(false);
    }
    let leq = LeqTable::build(d)?;
    let (Some(m), Some(j)) = (leq.meet(left[0], right[0]), leq.join(left[0], right[0])) else {
        return Ok(false);
    };
    Ok(Some(m) == d.bottom() && Some(j) == d.top())
}

/// Removes a corner; the result is again slim semimodular.
pub fn remove_corner(d: &Diagram, x: ElementId) -> Result<Diagram> {
    remove_corner_traced(d, x).map(|(d, _)| d)
}

pub fn remove_corner_traced(d: &Diagram, x: ElementId) -> Result<(Diagram, SurgeryRecord)> {
    if !crate::geometry::check_gk_criterion(d) {
        return Err(Error::precondition("diagram is not slim semimodular"));
    }
    if !corners(d)?.contains(&x) {
        return Err(Error::precondition(format!("{} is not a corner", x)));
    }
    let x_star = d.upper_covers(x)[0];
    let x_low = d.lower_covers(x)[0];
    let mut upper: Vec<Vec<ElementId>> = (0..d.n()).map(|i| d.upper_covers(ElementId(i as u32)).to_vec()).collect();
    let mut lower: Vec<Vec<ElementId>> = (0..d.n()).map(|i| d.lower_covers(ElementId(i as u32)).to_vec()).collect();
    upper[x_low.index()].retain(|&z| z != x);
    lower[x_star.index()].retain(|&z| z != x);
    let deleted = BTreeSet::from([x]);
    let out = compact(d.n(), &deleted, upper, lower);
    let record = SurgeryRecord {
        op: SurgeryOp::RemoveCorner,
        anchor: x,
        removed: vec![x],
        added: 0,
    };
    Ok((out, record))
}

// ---------------------------------------------------------------------------
// Resection

/// Deletes the interior of the C3-scheme anchored at `u` except `u` itself:
/// every wing chain collapses to a prime interval and the base square of
/// chains becomes a cover-preserving N7.
pub fn resect(d: &Diagram, u: ElementId) -> Result<Diagram> {
    resect_traced(d, u).map(|(d, _)| d)
}

pub fn resect_traced(d: &Diagram, u: ElementId) -> Result<(Diagram, SurgeryRecord)> {
    let ctx = Ctx::new(d)?;
    resect_core(&ctx, u)
}

pub(crate) fn resect_core(ctx: &Ctx, u: ElementId) -> Result<(Diagram, SurgeryRecord)> {
    let d = ctx.d;
    let sch = schemes::build_c3_scheme(ctx, u)?;
    let mut deleted: BTreeSet<ElementId> = sch.interior.clone();
    deleted.remove(&u);

    let splice = |lists: &dyn Fn(ElementId) -> Vec<ElementId>, x: ElementId| -> Vec<ElementId> {
        let mut out: Vec<ElementId> = Vec::new();
        for z in lists(x) {
            if deleted.contains(&z) {
                // a deleted wing middle is replaced, in place, by its
                // surviving covers in the same direction
                for s in lists(z) {
                    if !deleted.contains(&s) && !out.contains(&s) {
                        out.push(s);
                    }
                }
            } else if !out.contains(&z) {
                out.push(z);
            }
        }
        out
    };
    let n = d.n();
    let mut upper = Vec::with_capacity(n);
    let mut lower = Vec::with_capacity(n);
    let up = |x: ElementId| d.upper_covers(x).to_vec();
    let down = |x: ElementId| d.lower_covers(x).to_vec();
    for i in 0..n {
        let x = ElementId(i as u32);
        if deleted.contains(&x) {
            upper.push(Vec::new());
            lower.push(Vec::new());
        } else {
            upper.push(splice(&up, x));
            lower.push(splice(&down, x));
        }
    }
    let out = compact(n, &deleted, upper, lower);
    let record = SurgeryRecord {
        op: SurgeryOp::Resect,
        anchor: u,
        removed: deleted.iter().copied().collect(),
        added: 0,
    };
    Ok((out, record))
}

// ---------------------------------------------------------------------------
// Insertion

/// Subdivides every wing interval of the C2-scheme anchored at `u` and
/// restores the square-of-chains base: the inverse of [`resect`], up to
/// similarity.
pub fn insert(d: &Diagram, u: ElementId) -> Result<Diagram> {
    insert_traced(d, u).map(|(d, _)| d)
}

pub fn insert_traced(d: &Diagram, u: ElementId) -> Result<(Diagram, SurgeryRecord)> {
    let ctx = Ctx::new(d)?;
    insert_core(&ctx, u)
}

pub(crate) fn insert_core(ctx: &Ctx, u: ElementId) -> Result<(Diagram, SurgeryRecord)> {
    let d = ctx.d;
    let sch = schemes::build_c2_scheme(ctx, u)?;
    let n0 = d.n();
    let mut upper: Vec<Vec<ElementId>> =
        (0..n0).map(|i| d.upper_covers(ElementId(i as u32)).to_vec()).collect();
    let mut lower: Vec<Vec<ElementId>> =
        (0..n0).map(|i| d.lower_covers(ElementId(i as u32)).to_vec()).collect();

    let mut mid: HashMap<PrimeInterval, ElementId> = HashMap::new();
    for link in sch.left_wing.iter().chain(&sch.right_wing) {
        let m = ElementId((n0 + mid.len()) as u32);
        mid.insert(*link, m);
        upper.push(Vec::new());
        lower.push(Vec::new());
    }

    // subdivide every wing interval
    for link in sch.left_wing.iter().chain(&sch.right_wing) {
        let m = mid[link];
        replace_entry(&mut upper[link.bottom.index()], link.top, m);
        replace_entry(&mut lower[link.top.index()], link.bottom, m);
        upper[m.index()] = vec![link.top];
        lower[m.index()] = vec![link.bottom];
    }

    // each former wing 4-cell becomes a region of two stacked 4-cells: the
    // two new middles are joined by a cover oriented along the step
    let mut cross = |links: &[PrimeInterval], steps: &[StepDir]| {
        for (i, step) in steps.iter().enumerate() {
            let m1 = mid[&links[i]];
            let m2 = mid[&links[i + 1]];
            match step {
                StepDir::Up => {
                    upper[m1.index()].push(m2);
                    lower[m2.index()].insert(0, m1);
                }
                StepDir::Down => {
                    lower[m1.index()].push(m2);
                    upper[m2.index()].insert(0, m1);
                }
            }
        }
    };
    cross(&sch.left_wing, &sch.left_steps);
    cross(&sch.right_wing, &sch.right_steps);

    // rewire the base: the anchor now covers the two new middles
    let base = &sch.base;
    let m_l = mid[&PrimeInterval { bottom: base.b_l, top: base.u_star }];
    let m_r = mid[&PrimeInterval { bottom: base.b_r, top: base.u_star }];
    upper[u.index()] = vec![m_l, m_r];
    lower[base.u_star.index()].retain(|&z| z != u);
    lower[m_l.index()].push(u);
    lower[m_r.index()].insert(0, u);

    let out = Diagram::from_cover_lists(upper, lower);
    let record = SurgeryRecord {
        op: SurgeryOp::Insert,
        anchor: u,
        removed: Vec::new(),
        added: mid.len(),
    };
    Ok((out, record))
}

// ---------------------------------------------------------------------------
// Surgery records

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurgeryOp {
    Resect,
    Insert,
    RemoveDi,
    RemoveCorner,
}

impl SurgeryOp {
    fn token(self) -> &'static str {
        match self {
            SurgeryOp::Resect => "resect",
            SurgeryOp::Insert => "insert",
            SurgeryOp::RemoveDi => "remove_di",
            SurgeryOp::RemoveCorner => "remove_corner",
        }
    }
}

/// One replayable surgery step; `removed` and `added` are audit fields.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurgeryRecord {
    pub op: SurgeryOp,
    pub anchor: ElementId,
    pub removed: Vec<ElementId>,
    pub added: usize,
}

impl std::fmt::Display for SurgeryRecord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let ids: Vec<String> = self.removed.iter().map(|x| x.to_string()).collect();
        write!(f, "{} {} removed=[{}] added={}", self.op.token(), self.anchor, ids.join(","), self.added)
    }
}

impl SurgeryRecord {
    /// Where a pre-diagram element ends up after this operation: deletions
    /// renumber the survivors densely, insertions leave old ids alone.
    pub fn survivor(&self, x: ElementId) -> Option<ElementId> {
        if self.removed.contains(&x) {
            return None;
        }
        let shift = self.removed.iter().filter(|r| r.0 < x.0).count() as u32;
        Some(ElementId(x.0 - shift))
    }

    /// Replays the operation on a pre-diagram.
    pub fn apply(&self, d: &Diagram) -> Result<Diagram> {
        match self.op {
            SurgeryOp::Resect => resect(d, self.anchor),
            SurgeryOp::Insert => insert(d, self.anchor),
            SurgeryOp::RemoveDi => remove_boundary_di(d, self.anchor),
            SurgeryOp::RemoveCorner => remove_corner(d, self.anchor),
        }
    }

    pub fn parse_line(line: &str) -> Result<SurgeryRecord> {
        let bad = || Error::Parse { line: 0, msg: format!("bad surgery record `{}`", line) };
        let mut toks = line.split_whitespace();
        let op = match toks.next().ok_or_else(bad)? {
            "resect" => SurgeryOp::Resect,
            "insert" => SurgeryOp::Insert,
            "remove_di" => SurgeryOp::RemoveDi,
            "remove_corner" => SurgeryOp::RemoveCorner,
            _ => return Err(bad()),
        };
        let anchor = ElementId(toks.next().ok_or_else(bad)?.parse().map_err(|_| bad())?);
        let removed_tok = toks.next().ok_or_else(bad)?;
        let removed_body = removed_tok
            .strip_prefix("removed=[")
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(bad)?;
        let removed = if removed_body.is_empty() {
            Vec::new()
        } else {
            removed_body
                .split(',')
                .map(|s| s.parse().map(ElementId).map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?
        };
        let added_tok = toks.next().ok_or_else(bad)?;
        let added = added_tok.strip_prefix("added=").ok_or_else(bad)?.parse().map_err(|_| bad())?;
        Ok(SurgeryRecord { op, anchor, removed, added })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::schemes::{anchors, SchemeKind};

    fn s7() -> Diagram {
        stacked_n7(0)
    }

    fn oracle_triple(d: &Diagram) -> (bool, bool, bool) {
        let p = oracle::Poset::from_diagram(d).unwrap();
        (
            oracle::is_lattice(&p) && oracle::is_semimodular(&p) && oracle::is_slim(&p),
            oracle::is_distributive(&p),
            d.validate_well_formed().is_ok(),
        )
    }

    #[test]
    fn grid_construction() {
        assert_eq!(grid(2, 2).unwrap().n(), 4);
        let g = grid(3, 3).unwrap();
        assert_eq!(g.n(), 9);
        assert_eq!(crate::geometry::cells(&g).unwrap().len(), 4);
        assert!(grid(1, 3).is_err());
        assert!(grid(4, 1).is_err());
        let (slim_sm, distr, wf) = oracle_triple(&grid(4, 2).unwrap());
        assert!(slim_sm && distr && wf);
    }

    #[test]
    fn remove_boundary_di_fixtures() {
        let g = grid(3, 3).unwrap();
        // (2,0) = id 6, the middle of the left boundary chain
        let d = remove_boundary_di(&g, ElementId(6)).unwrap();
        assert_eq!(d.n(), 8);
        let (slim_sm, distr, wf) = oracle_triple(&d);
        assert!(slim_sm && distr && wf);

        // interior element rejected
        assert!(remove_boundary_di(&g, ElementId(4)).is_err());
        // join-reducible boundary element rejected
        assert!(remove_boundary_di(&g, ElementId(8)).is_err());
        // non-distributive host rejected
        assert!(remove_boundary_di(&s7(), ElementId(3)).is_err());

        // grid(2,2) minus an atom is the 3-chain
        let c3 = remove_boundary_di(&grid(2, 2).unwrap(), ElementId(1)).unwrap();
        assert_eq!(c3.n(), 3);
        assert!(c3.elements().all(|x| c3.upper_covers(x).len() <= 1));
    }

    #[test]
    fn corner_fixtures() {
        let g = grid(4, 2).unwrap();
        let mut wc = weak_corners(&g).unwrap();
        wc.sort();
        assert_eq!(wc, vec![ElementId(1), ElementId(6)]); // (0,1) and (3,0)
        assert_eq!(corners(&g).unwrap(), wc);
        assert!(is_rectangular(&g).unwrap());

        // chains have no weak corners and are not rectangular
        let c4 = remove_boundary_di(&grid(2, 2).unwrap(), ElementId(1)).unwrap();
        assert!(weak_corners(&c4).unwrap().is_empty());
        assert!(!is_rectangular(&c4).unwrap());

        // s7 is rectangular with complementary weak corners b_l, b_r
        let d = s7();
        let mut wc = weak_corners(&d).unwrap();
        wc.sort();
        assert_eq!(wc, vec![ElementId(3), ElementId(5)]);
        assert!(is_rectangular(&d).unwrap());
    }

    #[test]
    fn remove_corner_fixtures() {
        let c3 = remove_corner(&grid(2, 2).unwrap(), ElementId(1)).unwrap();
        assert_eq!(c3.n(), 3);

        let g = grid(3, 3).unwrap();
        let d = remove_corner(&g, ElementId(6)).unwrap();
        let corner2 = corners(&d).unwrap().into_iter().max().unwrap();
        let d = remove_corner(&d, corner2).unwrap();
        assert_eq!(d.n(), 7);
        let (slim_sm, distr, wf) = oracle_triple(&d);
        assert!(slim_sm && distr && wf);

        assert!(remove_corner(&s7(), ElementId(4)).is_err()); // interior
        assert!(remove_corner(&g, ElementId(4)).is_err());
    }

    #[test]
    fn resect_and_insert_fixtures() {
        let g = grid(3, 3).unwrap();
        let d = resect(&g, ElementId(4)).unwrap();
        assert!(d.is_similar(&s7()));
        assert!(resect(&s7(), ElementId(4)).is_err()); // no C3-scheme
        assert!(insert(&g, ElementId(4)).is_err()); // no C2-anchor

        let back = insert(&d, ElementId(4)).unwrap();
        assert!(back.is_similar(&g));
    }

    #[test]
    fn round_trips_on_fixtures() {
        for d in [grid(3, 3).unwrap(), grid(4, 3).unwrap(), grid(4, 4).unwrap()] {
            for u in anchors(&d, SchemeKind::C3).unwrap() {
                let r = resect(&d, u).unwrap();
                assert!(r.validate_well_formed().is_ok());
                assert!(crate::geometry::check_gk_criterion(&r));
                let back = insert(&r, u).unwrap();
                assert!(back.is_similar(&d), "insert(resect(D)) at {}", u);
            }
        }
        for d in [s7(), stacked_n7(1), stacked_n7(2)] {
            for u in anchors(&d, SchemeKind::C2).unwrap() {
                let i = insert(&d, u).unwrap();
                assert!(i.validate_well_formed().is_ok());
                assert!(crate::geometry::check_gk_criterion(&i));
                let back = resect(&i, u).unwrap();
                assert!(back.is_similar(&d), "resect(insert(D)) at {}", u);
            }
        }
    }

    #[test]
    fn surgery_size_accounting() {
        // insertion adds one element per wing link
        let d = stacked_n7(1);
        let sch = match crate::schemes::scheme(&d, ElementId(4), SchemeKind::C2).unwrap() {
            crate::schemes::Scheme::C2(s) => s,
            _ => unreachable!(),
        };
        let links = sch.left_wing.len() + sch.right_wing.len();
        let (bigger, record) = insert_traced(&d, ElementId(4)).unwrap();
        assert_eq!(bigger.n(), d.n() + links);
        assert_eq!(record.added, links);

        // resection removes one element per wing chain
        let g = grid(3, 3).unwrap();
        let sch = match crate::schemes::scheme(&g, ElementId(4), SchemeKind::C3).unwrap() {
            crate::schemes::Scheme::C3(s) => s,
            _ => unreachable!(),
        };
        let chains = sch.left_wing.len() + sch.right_wing.len();
        let (smaller, record) = resect_traced(&g, ElementId(4)).unwrap();
        assert_eq!(smaller.n(), g.n() - chains);
        assert_eq!(record.removed.len(), chains);
    }

    #[test]
    fn insertion_preserves_weak_corners_and_bounds() {
        for d in [s7(), stacked_n7(1), stacked_n7(2)] {
            for u in anchors(&d, SchemeKind::C2).unwrap() {
                let i = insert(&d, u).unwrap();
                let mut before = weak_corners(&d).unwrap();
                let mut after = weak_corners(&i).unwrap();
                before.sort();
                after.sort();
                assert_eq!(before, after);
                assert_eq!(d.bottom(), i.bottom());
                assert_eq!(d.top(), i.top());
                assert_eq!(is_rectangular(&d).unwrap(), is_rectangular(&i).unwrap());
            }
        }
    }

    #[test]
    fn record_line_round_trip() {
        let r = SurgeryRecord {
            op: SurgeryOp::Resect,
            anchor: ElementId(4),
            removed: vec![ElementId(5), ElementId(7)],
            added: 0,
        };
        let line = r.to_string();
        assert_eq!(line, "resect 4 removed=[5,7] added=0");
        assert_eq!(SurgeryRecord::parse_line(&line).unwrap(), r);
        let r2 = SurgeryRecord {
            op: SurgeryOp::Insert,
            anchor: ElementId(0),
            removed: vec![],
            added: 3,
        };
        assert_eq!(SurgeryRecord::parse_line(&r2.to_string()).unwrap(), r2);
    }

    #[test]
    fn records_replay() {
        let g = grid(3, 3).unwrap();
        let (d, record) = resect_traced(&g, ElementId(4)).unwrap();
        assert!(record.apply(&g).unwrap().is_similar(&d));
    }
}
