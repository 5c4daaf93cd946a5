//! Query pipeline: pattern hierarchy, candidate splits, primary occurrences
//! through the two tries and `R`, then propagation along reversed links.

use std::collections::{HashMap, HashSet};

use crate::fingerprint::{fin, Fingerprint, RowsNav};
use crate::hierarchy::{build_rows, Resolver, Row};
use crate::index::{text_key, Index};
use crate::jiggly::{HView, NONE};
use crate::tries::{FpKey, Locus};
use crate::{Error, Id, Symbol, OVERLAY_BASE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Provenance {
    Primary,
    Secondary,
    Periodic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Occurrence {
    pub pos: usize,
    pub provenance: Provenance,
}

/// Resolves pattern blocks against the index, minting query-local ids for
/// blocks the text does not contain.
struct Overlay<'a> {
    index: &'a Index,
    pairs: HashMap<(Id, u64), Id>,
    seqs: HashMap<Vec<Id>, Id>,
    next: Id,
}

impl Overlay<'_> {
    fn fresh(&mut self) -> Id {
        let id = self.next;
        self.next += 1;
        id
    }
}

impl Resolver for Overlay<'_> {
    fn run_id(&mut self, _level: u32, base: Id, count: u64) -> Id {
        if let Some(id) = self.index.run_id(base, count) {
            return id;
        }
        if let Some(&id) = self.pairs.get(&(base, count)) {
            return id;
        }
        let id = self.fresh();
        self.pairs.insert((base, count), id);
        id
    }

    fn group_id(&mut self, _level: u32, seq: &[Id]) -> Id {
        if let Some(id) = self.index.group_id(seq) {
            return id;
        }
        if let Some(&id) = self.seqs.get(seq) {
            return id;
        }
        let id = self.fresh();
        self.seqs.insert(seq.to_vec(), id);
        id
    }
}

/// A pattern parsed with the index's identifiers.
pub struct PatternContext {
    pub t: Vec<Symbol>,
    pub rows: Vec<Row>,
    /// Number of overlay ids minted for this pattern.
    pub overlay_ids: u64,
    fp: Fingerprint,
}

impl PatternContext {
    pub fn fingerprint(&self) -> &Fingerprint {
        &self.fp
    }

    /// Fingerprint key of `t[p..q)`.
    pub fn key(&self, p: usize, q: usize) -> FpKey {
        fin(&RowsNav { rows: &self.rows }, p, q).key()
    }
}

pub fn build_pattern_context(index: &Index, t: &[Symbol]) -> Result<PatternContext, Error> {
    if t.is_empty() {
        return Err(Error::Empty);
    }
    let mut ov = Overlay { index, pairs: HashMap::new(), seqs: HashMap::new(), next: OVERLAY_BASE };
    let rows = build_rows(t, &mut ov)?;
    let overlay_ids = ov.next - OVERLAY_BASE;
    let fp = fin(&RowsNav { rows: &rows }, 0, t.len());
    Ok(PatternContext { t: t.to_vec(), rows, overlay_ids, fp })
}

/// Split positions of the pattern worth trying.
pub fn candidate_splits(fp: &Fingerprint) -> Vec<usize> {
    let m = fp.span();
    let mut out = Vec::new();
    for (i, e) in fp.elements.iter().enumerate() {
        if i > 0 {
            out.push(e.offset);
        }
        if e.count > 1 {
            out.push(e.offset + e.len() - e.base_len);
        }
    }
    out.retain(|&q| 0 < q && q < m);
    out.sort_unstable();
    out.dedup();
    out
}

/// Occurrences crossing a child boundary of their lowest covering node.
pub fn primary_occurrences(index: &Index, ctx: &PatternContext) -> Vec<Occurrence> {
    let t = &ctx.t;
    let m = t.len();
    if m > index.n() {
        return Vec::new();
    }
    let mut found = HashSet::new();
    if m == 1 {
        for &v in index.letter_leaves(t[0]) {
            found.insert(index.j.node(v).sbeg);
        }
    } else {
        let view = index.j.view();
        for q in candidate_splits(&ctx.fp) {
            for p in split_matches(index, ctx, &view, q) {
                found.insert(p);
            }
        }
    }
    let mut out: Vec<Occurrence> =
        found.into_iter().map(|pos| Occurrence { pos, provenance: Provenance::Primary }).collect();
    out.sort();
    out
}

fn split_matches(index: &Index, ctx: &PatternContext, view: &HView<'_>, q: usize) -> Vec<usize> {
    let t = &ctx.t;
    let m = t.len();
    let Some(right) = index.zf_fwd.locate(
        &index.t_fwd,
        m - q,
        &mut |l| ctx.key(q, q + l),
        &mut |i| t[q + i] as u64,
        &mut |l: Locus| {
            let (pos, _) = index.fwd_keys[index.t_fwd.node(l.node).key as usize];
            text_key(view, pos, pos + l.depth) == ctx.key(q, q + l.depth)
        },
    ) else {
        return Vec::new();
    };
    let Some(left) = index.zf_rev.locate(
        &index.t_rev,
        q,
        &mut |l| ctx.key(q - l, q),
        &mut |i| t[q - 1 - i] as u64,
        &mut |l: Locus| {
            let (end, _) = index.rev_keys[index.t_rev.node(l.node).key as usize];
            text_key(view, end - l.depth, end) == ctx.key(q - l.depth, q)
        },
    ) else {
        return Vec::new();
    };
    let x = index.t_fwd.inorder_interval(right.node).expect("finalized");
    let y = index.t_rev.inorder_interval(left.node).expect("finalized");
    index.r.report(x, y).iter().map(|pt| index.pairs[pt.payload as usize].split - q).collect()
}

/// Closure of `primaries` under copy links, intermediate links and run
/// periodicity; the primaries themselves are not repeated.
pub fn secondary_occurrences(index: &Index, primaries: &[Occurrence], m: usize) -> Vec<Occurrence> {
    let j = &index.j;
    let mut seen: HashSet<usize> = primaries.iter().map(|o| o.pos).collect();
    let mut work: Vec<usize> = seen.iter().copied().collect();
    let mut out = Vec::new();
    while let Some(p) = work.pop() {
        let v = j.lowest_covering(p, p + m - 1);
        let mut a = index.marked_up[v as usize];
        while a != NONE {
            let u = j.node(a);
            let mut emit = |pos: usize, provenance: Provenance| {
                if seen.insert(pos) {
                    work.push(pos);
                    out.push(Occurrence { pos, provenance });
                }
            };
            for &c in index.copy_refs.get(&a).map_or(&[][..], |v| v.as_slice()) {
                emit(p - u.sbeg + j.node(c).sbeg, Provenance::Secondary);
            }
            for &(lo, hi, w) in index.inter_refs.get(&a).map_or(&[][..], |v| v.as_slice()) {
                if lo <= p && p + m <= hi {
                    emit(p - lo + j.node(w).sbeg, Provenance::Secondary);
                }
            }
            if u.kind == crate::jiggly::NodeKind::Run {
                let l = j.node(u.children[0]).len;
                let mut x = u.sbeg + (p - u.sbeg) % l;
                while x + m <= u.sbeg + u.len {
                    emit(x, Provenance::Periodic);
                    x += l;
                }
            }
            a = match u.parent {
                NONE => NONE,
                par => index.marked_up[par as usize],
            };
        }
    }
    out.sort();
    out
}

/// All occurrences of `t` with their provenance, sorted by position.
pub fn search_occurrences(index: &Index, t: &[Symbol]) -> Result<Vec<Occurrence>, Error> {
    let ctx = build_pattern_context(index, t)?;
    let prim = primary_occurrences(index, &ctx);
    let sec = secondary_occurrences(index, &prim, t.len());
    let mut all: Vec<Occurrence> = prim.into_iter().chain(sec).collect();
    all.sort();
    Ok(all)
}

/// Sorted start positions of `t` in the text.
pub fn search(index: &Index, t: &[Symbol]) -> Result<Vec<usize>, Error> {
    if t.is_empty() {
        return Err(Error::Empty);
    }
    if t.len() > index.n() {
        return Ok(Vec::new());
    }
    Ok(search_occurrences(index, t)?.into_iter().map(|o| o.pos).collect())
}

impl Index {
    pub fn search(&self, t: &[Symbol]) -> Result<Vec<usize>, Error> {
        search(self, t)
    }
}
