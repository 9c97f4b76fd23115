//! End-to-end algorithms: minimal-rank normalization, the sequence-based
//! slim-semimodularity test, verification of the insertion effect on anchors
//! and ranks, a persistent census of diagram similarity classes, and the
//! search for insertion sequences that never decrease the covering-N7 count.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::path::Path;

use crate::diagram::{CanonicalKey, Diagram, ElementId};
use crate::error::{Error, Result};
use crate::geometry::check_gk_criterion;
use crate::limits;
use crate::oracle::{self, Poset};
use crate::schemes::{self, Ctx, SchemeKind};
use crate::surgery::{self, SurgeryRecord};

fn step_budget(d: &Diagram) -> usize {
    10 * d.n() * d.n() + 10
}

/// Picks the anchor of minimal rank, breaking ties by smallest canonical id.
fn pick_minimal_rank(ctx: &Ctx, anchors: &[ElementId]) -> Result<(ElementId, usize)> {
    let (_, old_to_new) = ctx.d.canonical_form();
    let mut best: Option<(usize, u32, ElementId)> = None;
    for &u in anchors {
        let r = schemes::rank_with(ctx, u)?;
        let key = (r, old_to_new[u.index()].0, u);
        if best.is_none_or(|b| (key.0, key.1) < (b.0, b.1)) {
            best = Some(key);
        }
    }
    let (r, _, u) = best.expect("anchor list is nonempty");
    Ok((u, r))
}

/// One normalization step: the diagram it acted on (by canonical key), the
/// chosen anchor, its rank at the time, and the replayable record.
#[derive(Debug, Clone)]
pub struct NormalizationStep {
    pub key: CanonicalKey,
    pub anchor: ElementId,
    pub rank: usize,
    pub record: SurgeryRecord,
}

#[derive(Debug, Clone)]
pub struct NormalizationTrace {
    pub steps: Vec<NormalizationStep>,
    pub final_diagram: Diagram,
}

/// Repeatedly inserts at an anchor of minimal rank until no anchors remain.
/// The final diagram is slim distributive. A circuit breaker turns a
/// would-be infinite loop into a diagnosable error.
pub fn normalize(d: &Diagram) -> Result<NormalizationTrace> {
    if !check_gk_criterion(d) {
        return Err(Error::precondition("input is not a slim semimodular diagram"));
    }
    let budget = step_budget(d);
    let mut cur = d.clone();
    let mut steps = Vec::new();
    loop {
        let ctx = Ctx::new(&cur)?;
        let anchors = schemes::anchors_with(&ctx, SchemeKind::C2)?;
        if anchors.is_empty() {
            return Ok(NormalizationTrace { steps, final_diagram: cur });
        }
        if steps.len() >= budget {
            return Err(Error::NonTermination { steps: budget });
        }
        let (u, r) = pick_minimal_rank(&ctx, &anchors)?;
        let (next, record) = surgery::insert_core(&ctx, u)?;
        steps.push(NormalizationStep { key: cur.canonical_key(), anchor: u, rank: r, record });
        cur = next;
    }
}

/// The sequence-based test: run the normalize loop defensively and accept
/// iff it terminates in a planar distributive lattice. Structural failures
/// yield `false`, never an error.
pub fn is_slim_semimodular_via_sequence(d: &Diagram) -> bool {
    if !d.validate_well_formed().is_ok() {
        return false;
    }
    let budget = step_budget(d);
    let mut cur = d.clone();
    for _ in 0..=budget {
        let Ok(ctx) = Ctx::new(&cur) else {
            return false;
        };
        let Ok(anchors) = schemes::anchors_with(&ctx, SchemeKind::C2) else {
            return false;
        };
        if anchors.is_empty() {
            let Ok(p) = Poset::from_diagram(&cur) else {
                return false;
            };
            return oracle::is_lattice(&p) && oracle::is_distributive(&p);
        }
        let Ok((u, _)) = pick_minimal_rank(&ctx, &anchors) else {
            return false;
        };
        let Ok((next, _)) = surgery::insert_core(&ctx, u) else {
            return false;
        };
        if !next.validate_well_formed().is_ok() {
            return false;
        }
        cur = next;
    }
    false
}

// ---------------------------------------------------------------------------
// Insertion effect (anchor evolution)

/// Outcome of checking one insertion against the anchor-set and rank laws:
/// after inserting at `u`, anchors may only disappear, except that `u*`
/// becomes an anchor of rank one less when `u` had positive rank.
#[derive(Debug, Clone)]
pub struct InsertionEffect {
    pub anchor: ElementId,
    pub rank_before: usize,
    pub anchors_before: Vec<ElementId>,
    pub anchors_after: Vec<ElementId>,
    /// Violations of the inclusion / rank-decrement laws; empty means pass.
    pub violations: Vec<String>,
    /// True when the allowed anchor set was not fully used (the inclusion
    /// was strict).
    pub inclusion_strict: bool,
}

pub fn verify_insertion_effect(d: &Diagram, u: ElementId) -> Result<InsertionEffect> {
    let ctx = Ctx::new(d)?;
    let anchors_before = schemes::anchors_with(&ctx, SchemeKind::C2)?;
    if !anchors_before.contains(&u) {
        return Err(Error::precondition(format!("{} is not a C2-anchor", u)));
    }
    let rank_before = schemes::rank(d, u)?;
    let u_star = d.upper_covers(u)[0];
    let (after, _) = surgery::insert_core(&ctx, u)?;
    let anchors_after = schemes::anchors(&after, SchemeKind::C2)?;

    let mut allowed: BTreeSet<ElementId> = anchors_before.iter().copied().collect();
    allowed.remove(&u);
    if rank_before > 0 {
        allowed.insert(u_star);
    }
    let mut violations = Vec::new();
    for &a in &anchors_after {
        if !allowed.contains(&a) {
            violations.push(format!("{} is an anchor after insertion but was not allowed", a));
        }
    }
    if rank_before > 0 {
        if !anchors_after.contains(&u_star) {
            violations.push(format!("{} should be an anchor of the inserted diagram", u_star));
        } else {
            let r_after = schemes::rank(&after, u_star)?;
            if r_after != rank_before - 1 {
                violations.push(format!(
                    "rank of {} after insertion is {}, expected {}",
                    u_star,
                    r_after,
                    rank_before - 1
                ));
            }
        }
    }
    let after_set: BTreeSet<ElementId> = anchors_after.iter().copied().collect();
    let inclusion_strict = allowed.difference(&after_set).next().is_some();
    Ok(InsertionEffect {
        anchor: u,
        rank_before,
        anchors_before,
        anchors_after,
        violations,
        inclusion_strict,
    })
}

// ---------------------------------------------------------------------------
// Census

/// How a census member was produced: a grid root followed by replayable
/// surgery steps, each applied to the canonical form of its predecessor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub root_m: usize,
    pub root_n: usize,
    pub ops: Vec<SurgeryRecord>,
}

impl Provenance {
    pub fn replay(&self) -> Result<Diagram> {
        let mut d = surgery::grid(self.root_m, self.root_n)?.canonical_form().0;
        for op in &self.ops {
            d = op.apply(&d)?.canonical_form().0;
        }
        Ok(d)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("grid {} {}\n", self.root_m, self.root_n);
        for op in &self.ops {
            let _ = writeln!(s, "{}", op);
        }
        s
    }

    pub fn parse(text: &str) -> Result<Provenance> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let head = lines.next().ok_or(Error::Parse { line: 1, msg: "empty trace".into() })?;
        let mut toks = head.split_whitespace();
        if toks.next() != Some("grid") {
            return Err(Error::Parse { line: 1, msg: "expected `grid <m> <n>`".into() });
        }
        let bad = || Error::Parse { line: 1, msg: "expected `grid <m> <n>`".into() };
        let root_m = toks.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let root_n = toks.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let ops = lines.map(SurgeryRecord::parse_line).collect::<Result<Vec<_>>>()?;
        Ok(Provenance { root_m, root_n, ops })
    }
}

/// One similarity class: its canonical diagram and bookkeeping.
#[derive(Debug, Clone)]
pub struct CensusRecord {
    pub key: CanonicalKey,
    pub diagram: Diagram,
    pub size: usize,
    pub rectangular: bool,
    pub provenance: Provenance,
}

/// Map from canonical similarity key to census record.
#[derive(Debug, Default)]
pub struct CensusStore {
    records: BTreeMap<CanonicalKey, CensusRecord>,
}

impl CensusStore {
    pub fn new() -> CensusStore {
        CensusStore::default()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn contains(&self, key: &CanonicalKey) -> bool {
        self.records.contains_key(key)
    }

    pub fn get(&self, key: &CanonicalKey) -> Option<&CensusRecord> {
        self.records.get(key)
    }

    pub fn records(&self) -> impl Iterator<Item = &CensusRecord> {
        self.records.values()
    }

    pub fn insert_if_new(&mut self, rec: CensusRecord) -> bool {
        if self.records.contains_key(&rec.key) {
            false
        } else {
            self.records.insert(rec.key.clone(), rec);
            true
        }
    }

    /// Persists as a directory: `index.tsv` plus one `latdiag` file and one
    /// trace file per record, named by the key hash.
    pub fn save_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut rows: Vec<&CensusRecord> = self.records.values().collect();
        rows.sort_by_key(|r| (r.size, r.key.clone()));
        let mut index = String::new();
        for r in rows {
            let hash = r.key.hex_hash();
            let _ = writeln!(
                index,
                "{}\t{}\t{}\t{}.trace",
                hash,
                r.size,
                if r.rectangular { 1 } else { 0 },
                hash
            );
            std::fs::write(dir.join(format!("{}.latdiag", hash)), r.diagram.to_latdiag())?;
            std::fs::write(dir.join(format!("{}.trace", hash)), r.provenance.to_text())?;
        }
        std::fs::write(dir.join("index.tsv"), index)?;
        Ok(())
    }

    pub fn load_dir(dir: &Path) -> Result<CensusStore> {
        let index = std::fs::read_to_string(dir.join("index.tsv"))?;
        let mut store = CensusStore::new();
        for line in index.lines().filter(|l| !l.trim().is_empty()) {
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 4 {
                return Err(Error::Parse { line: 0, msg: format!("bad index row `{}`", line) });
            }
            let diagram = Diagram::parse(&std::fs::read_to_string(
                dir.join(format!("{}.latdiag", cols[0])),
            )?)?;
            let provenance =
                Provenance::parse(&std::fs::read_to_string(dir.join(cols[3]))?)?;
            let key = diagram.canonical_key();
            if key.hex_hash() != cols[0] {
                return Err(Error::Malformed(format!(
                    "census file {} does not match its key hash",
                    cols[0]
                )));
            }
            let size = diagram.n();
            let rectangular = surgery::is_rectangular(&diagram)?;
            store.insert_if_new(CensusRecord { key, diagram, size, rectangular, provenance });
        }
        Ok(store)
    }
}

fn census_record(d: &Diagram, provenance: Provenance) -> Result<CensusRecord> {
    let canon = d.canonical_form().0;
    Ok(CensusRecord {
        key: canon.canonical_key(),
        size: canon.n(),
        rectangular: surgery::is_rectangular(&canon)?,
        diagram: canon,
        provenance,
    })
}

/// Every similarity class of slim distributive diagrams with at most
/// `max_size` elements: grids closed under boundary removals of doubly
/// irreducible elements. Grids larger than `max_size` (up to chain-length
/// `max_size`) are walked but not emitted, since removal sequences pass
/// through them.
fn slim_distributive_seeds(max_size: usize) -> Result<Vec<CensusRecord>> {
    let mut emitted: BTreeMap<CanonicalKey, CensusRecord> = BTreeMap::new();
    let mut visited: BTreeSet<CanonicalKey> = BTreeSet::new();
    let mut queue: VecDeque<(Diagram, Provenance)> = VecDeque::new();
    for m in 2..=max_size {
        for n in 2.. {
            if m + n - 1 > max_size {
                break;
            }
            let g = surgery::grid(m, n)?.canonical_form().0;
            let key = g.canonical_key();
            if visited.insert(key) {
                queue.push_back((g, Provenance { root_m: m, root_n: n, ops: Vec::new() }));
            }
        }
    }
    while let Some((d, provenance)) = queue.pop_front() {
        if d.n() <= max_size {
            let rec = census_record(&d, provenance.clone())?;
            emitted.entry(rec.key.clone()).or_insert(rec);
        }
        if d.n() == 2 {
            continue;
        }
        let ctx = Ctx::new(&d)?;
        let boundary = d.boundary_flags();
        for x in d.elements() {
            if boundary[x.index()]
                && d.upper_covers(x).len() == 1
                && d.lower_covers(x).len() == 1
            {
                let (child, record) = surgery::remove_boundary_di_core(&ctx, x)?;
                let child = child.canonical_form().0;
                let key = child.canonical_key();
                if visited.insert(key) {
                    let mut p = provenance.clone();
                    p.ops.push(record);
                    queue.push_back((child, p));
                }
            }
        }
    }
    Ok(emitted.into_values().collect())
}

/// Builds the census: slim distributive seeds of size at most `max_size`,
/// closed under resection at every C3-anchor, deduplicated by canonical key.
pub fn census(max_size: usize, store: &mut CensusStore) -> Result<()> {
    let guard = limits::effective(limits::CENSUS_MAX);
    if max_size > guard {
        return Err(Error::ResourceLimit(format!(
            "census max_size {} exceeds guard {} (set LATRES_MAX_ELEMENTS to raise)",
            max_size, guard
        )));
    }
    let mut queue: VecDeque<CanonicalKey> = VecDeque::new();
    for rec in slim_distributive_seeds(max_size)? {
        let key = rec.key.clone();
        if store.insert_if_new(rec) {
            queue.push_back(key);
        }
    }
    while let Some(key) = queue.pop_front() {
        let (diagram, provenance) = {
            let rec = store.get(&key).expect("queued key is present");
            (rec.diagram.clone(), rec.provenance.clone())
        };
        let ctx = Ctx::new(&diagram)?;
        for u in schemes::anchors_with(&ctx, SchemeKind::C3)? {
            let (child, record) = surgery::resect_core(&ctx, u)?;
            let mut p = provenance.clone();
            p.ops.push(record);
            let rec = census_record(&child, p)?;
            let child_key = rec.key.clone();
            if store.insert_if_new(rec) {
                queue.push_back(child_key);
            }
        }
    }
    Ok(())
}

/// All similarity classes of slim distributive diagrams with at most
/// `max_size` elements, grown upward from the two-element chain by adding
/// one doubly irreducible boundary element at a time (the inverse of
/// [`surgery::remove_boundary_di`]). Planar lattices are dismantlable
/// through boundary doubly-irreducibles, so the walk never needs diagrams
/// larger than `max_size`, unlike shrinking down from grids.
pub fn grow_slim_distributive(max_size: usize) -> Result<Vec<Diagram>> {
    let c2 = Diagram::from_cover_lists(
        vec![vec![ElementId(1)], vec![]],
        vec![vec![], vec![ElementId(0)]],
    );
    let mut visited: BTreeSet<CanonicalKey> = BTreeSet::from([c2.canonical_key()]);
    let mut queue: VecDeque<Diagram> = VecDeque::from([c2.clone()]);
    let mut out = vec![c2];
    while let Some(d) = queue.pop_front() {
        if d.n() >= max_size {
            continue;
        }
        for child in boundary_di_additions(&d) {
            let Ok(cctx) = Ctx::new(&child) else {
                continue;
            };
            if !surgery::is_slim_distributive(&cctx) {
                continue;
            }
            drop(cctx);
            let canon = child.canonical_form().0;
            let key = canon.canonical_key();
            if visited.insert(key) {
                out.push(canon.clone());
                queue.push_back(canon);
            }
        }
    }
    out.sort_by_key(|d| (d.n(), d.canonical_key()));
    Ok(out)
}

/// Every way to add one new boundary doubly-irreducible element: subdivide a
/// boundary edge, or hang a pendant across two consecutive boundary edges
/// (which closes up into a new 4-cell).
fn boundary_di_additions(d: &Diagram) -> Vec<Diagram> {
    let mut out = Vec::new();
    let (lchain, rchain) = d.boundary_chains();
    let x = ElementId(d.n() as u32);
    let lists = |d: &Diagram| -> (Vec<Vec<ElementId>>, Vec<Vec<ElementId>>) {
        (
            (0..d.n()).map(|i| d.upper_covers(ElementId(i as u32)).to_vec()).collect(),
            (0..d.n()).map(|i| d.lower_covers(ElementId(i as u32)).to_vec()).collect(),
        )
    };
    for (chain, left_side) in [(&lchain, true), (&rchain, false)] {
        // subdivide the chain edge (a, b)
        for w in chain.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (mut upper, mut lower) = lists(d);
            let pos_u = upper[a.index()].iter().position(|&z| z == b).unwrap();
            upper[a.index()][pos_u] = x;
            let pos_l = lower[b.index()].iter().position(|&z| z == a).unwrap();
            lower[b.index()][pos_l] = x;
            upper.push(vec![b]);
            lower.push(vec![a]);
            out.push(Diagram::from_cover_lists(upper, lower));
        }
        // pendant from a to the element two chain steps above
        for w in chain.windows(3) {
            let (a, b) = (w[0], w[2]);
            if d.upper_covers(a).contains(&b) {
                continue;
            }
            let (mut upper, mut lower) = lists(d);
            if left_side {
                upper[a.index()].insert(0, x);
                lower[b.index()].insert(0, x);
            } else {
                upper[a.index()].push(x);
                lower[b.index()].push(x);
            }
            upper.push(vec![b]);
            lower.push(vec![a]);
            out.push(Diagram::from_cover_lists(upper, lower));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Non-diminishing insertion sequences

/// A start diagram and a sequence of insertions along which the number of
/// cover-preserving N7 sublattices never decreases.
#[derive(Debug, Clone)]
pub struct NondimWitness {
    pub start_key: CanonicalKey,
    pub start: Diagram,
    /// Anchors chosen at each step, valid in the successive diagrams
    /// obtained by replaying the insertions in order (ids of retained
    /// elements are stable under insertion).
    pub anchors: Vec<ElementId>,
    /// Covering-N7 counts along the way, one more entry than `anchors`.
    pub n7_counts: Vec<usize>,
}

fn n7_count(d: &Diagram) -> Result<usize> {
    Ok(schemes::covering_n7_centers(d)?.len())
}

fn nondim_dfs(
    d: &Diagram,
    count: usize,
    steps_left: usize,
    anchors_acc: &mut Vec<ElementId>,
    counts_acc: &mut Vec<usize>,
) -> Result<bool> {
    if steps_left == 0 {
        return Ok(true);
    }
    let ctx = Ctx::new(d)?;
    for u in schemes::anchors_with(&ctx, SchemeKind::C2)? {
        // a rank-0 insertion strictly decreases the covering-N7 count
        if schemes::rank_with(&ctx, u)? == 0 {
            continue;
        }
        let (next, _) = surgery::insert_core(&ctx, u)?;
        let next_count = n7_count(&next)?;
        if next_count < count {
            continue;
        }
        anchors_acc.push(u);
        counts_acc.push(next_count);
        if nondim_dfs(&next, next_count, steps_left - 1, anchors_acc, counts_acc)? {
            return Ok(true);
        }
        anchors_acc.pop();
        counts_acc.pop();
    }
    Ok(false)
}

/// Searches diagrams obtained from slim distributive diagrams by resections
/// for a start of size at most `max_size` and a sequence of at least
/// `max_steps` insertions at freely chosen anchors whose covering-N7 count
/// never decreases.
///
/// The candidate pool is the resection closure of (a) every slim
/// distributive diagram with at most `max_size` elements and (b) every grid
/// with at most `((max_size+2)/3)²` elements — the bound covers the grid
/// roots of all standalone stacked-N7 towers of size up to `max_size`, whose
/// normalized forms outgrow `max_size` itself. Starts are explored in
/// (size, key) order and the first witness wins.
pub fn find_nondiminishing_sequence(
    max_size: usize,
    max_steps: usize,
) -> Result<Option<NondimWitness>> {
    let guard = limits::effective(limits::NONDIM_MAX);
    if max_size > guard {
        return Err(Error::ResourceLimit(format!(
            "search max_size {} exceeds guard {} (set LATRES_MAX_ELEMENTS to raise)",
            max_size, guard
        )));
    }
    let mut walk: VecDeque<Diagram> = VecDeque::new();
    let mut visited: BTreeSet<CanonicalKey> = BTreeSet::new();
    let grid_cap = max_size.div_ceil(3) * max_size.div_ceil(3);
    for m in 2..=grid_cap / 2 {
        for n in 2..=grid_cap / m.max(1) {
            if m * n <= grid_cap {
                let g = surgery::grid(m, n)?.canonical_form().0;
                if visited.insert(g.canonical_key()) {
                    walk.push_back(g);
                }
            }
        }
    }
    for d in grow_slim_distributive(max_size)? {
        if visited.insert(d.canonical_key()) {
            walk.push_back(d);
        }
    }
    // close under resection, keeping candidates bounded by max_size
    let mut pool: BTreeMap<(usize, CanonicalKey), Diagram> = BTreeMap::new();
    while let Some(d) = walk.pop_front() {
        if d.n() <= max_size {
            pool.insert((d.n(), d.canonical_key()), d.clone());
        }
        let ctx = Ctx::new(&d)?;
        for u in schemes::anchors_with(&ctx, SchemeKind::C3)? {
            let child = surgery::resect_core(&ctx, u)?.0.canonical_form().0;
            if visited.insert(child.canonical_key()) {
                walk.push_back(child);
            }
        }
    }

    for ((_, key), d) in pool {
        let start_count = n7_count(&d)?;
        if start_count == 0 {
            continue;
        }
        let mut anchors_acc = Vec::new();
        let mut counts_acc = vec![start_count];
        if nondim_dfs(&d, start_count, max_steps, &mut anchors_acc, &mut counts_acc)? {
            return Ok(Some(NondimWitness {
                start_key: key,
                start: d,
                anchors: anchors_acc,
                n7_counts: counts_acc,
            }));
        }
    }
    Ok(None)
}
