//! Deterministic fingerprints of substrings, computed bottom-up over any
//! block hierarchy that can answer "which level-`l` block covers `pos`".

use crate::hierarchy::{dct_labels, is_short, local_min_before, Row};
use crate::jiggly::{HView, JigglyTree, VBlock};
use crate::{Error, Id};

/// Positional access to a block hierarchy.
pub trait Nav {
    /// The level-`level` block containing text position `pos`.
    fn block_at(&self, level: u32, pos: usize) -> VBlock;
}

impl Nav for HView<'_> {
    fn block_at(&self, level: u32, pos: usize) -> VBlock {
        HView::block_at(self, level, pos)
    }
}

/// Explicit rows of a hierarchy; levels above the top return the top block.
pub struct RowsNav<'a> {
    pub rows: &'a [Row],
}

impl Nav for RowsNav<'_> {
    fn block_at(&self, level: u32, pos: usize) -> VBlock {
        let row = &self.rows[(level as usize).min(self.rows.len() - 1)];
        let b = &row.blocks[row.block_at(pos)];
        VBlock { id: b.id, sbeg: b.sbeg, len: b.len }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Element {
    pub id: Id,
    pub count: u64,
    pub base_len: usize,
    /// Start relative to the fingerprinted substring.
    pub offset: usize,
}

impl Element {
    pub fn len(&self) -> usize {
        self.count as usize * self.base_len
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn key(&self) -> (Id, u64) {
        (self.id, self.count)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Fingerprint {
    pub elements: Vec<Element>,
}

impl Fingerprint {
    pub fn key(&self) -> Vec<(Id, u64)> {
        self.elements.iter().map(Element::key).collect()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Total length of the substring the fingerprint spells.
    pub fn span(&self) -> usize {
        self.elements.iter().map(Element::len).sum()
    }
}

fn single(b: VBlock, base: usize) -> Element {
    Element { id: b.id, count: 1, base_len: b.len, offset: b.sbeg - base }
}

/// `fin(0, t[p..q))` over the hierarchy seen through `nav`.
pub fn fin<N: Nav + ?Sized>(nav: &N, p: usize, q: usize) -> Fingerprint {
    let mut left = Vec::new();
    let mut right = Vec::new();
    let (mut lo, mut hi) = (p, q);
    let mut level = 0u32;
    while lo < hi {
        let first = nav.block_at(level, lo);
        debug_assert_eq!(first.sbeg, lo);
        if first.sbeg + first.len == hi {
            left.push(single(first, p));
            break;
        }
        let k = level / 2;
        if level.is_multiple_of(2) {
            if is_short(first.len, k) {
                let par = nav.block_at(level + 1, lo);
                let end = (par.sbeg + par.len).min(hi);
                let count = ((end - lo) / first.len) as u64;
                left.push(Element { id: first.id, count, base_len: first.len, offset: lo - p });
                if end == hi {
                    break;
                }
                lo = end;
            }
            let last = nav.block_at(level, hi - 1);
            if is_short(last.len, k) {
                let par = nav.block_at(level + 1, hi - 1);
                let start = par.sbeg.max(lo);
                let count = ((hi - start) / last.len) as u64;
                right.push(Element { id: last.id, count, base_len: last.len, offset: start - p });
                hi = start;
            }
        } else {
            let (bl, i) = scan_left(nav, level, lo, hi);
            left.extend(bl[..i].iter().map(|&b| single(b, p)));
            if i == bl.len() {
                break;
            }
            let (tail, end) = scan_right(nav, level, lo, bl[i].sbeg, hi);
            lo = bl[i].sbeg;
            right.extend(tail.iter().map(|&b| single(b, p)));
            hi = end;
        }
        level += 1;
    }
    right.reverse();
    left.extend(right);
    Fingerprint { elements: left }
}

fn labels(blocks: &[VBlock], k: u32) -> Vec<Option<u64>> {
    let ids: Vec<Id> = blocks.iter().map(|b| b.id).collect();
    let lens: Vec<usize> = blocks.iter().map(|b| b.len).collect();
    dct_labels(&ids, &lens, k).1
}

/// Blocks `B_1..B_{min(i+1, b)}` and the first boundary `i`; `i = b` when
/// no boundary exists.
fn scan_left<N: Nav + ?Sized>(nav: &N, level: u32, lo: usize, hi: usize) -> (Vec<VBlock>, usize) {
    let k = level / 2;
    let mut bl = vec![nav.block_at(level, lo)];
    let mut i = 0;
    loop {
        if i < bl.len() && !is_short(bl[i].len, k) {
            return (bl, i);
        }
        if i >= 3 && local_min_before(&labels(&bl[..i], k), i - 1) {
            return (bl, i);
        }
        if i == bl.len() {
            return (bl, i);
        }
        let next = bl[i].sbeg + bl[i].len;
        if next < hi {
            bl.push(nav.block_at(level, next));
        }
        i += 1;
    }
}

/// Blocks `B_b, .., B_{j+1}` after the last boundary `j` and the end of
/// `B_j`. `first` is the start of `B_1` and `stop` the start of `B_{i+1}`,
/// below which `j` never moves.
fn scan_right<N: Nav + ?Sized>(nav: &N, level: u32, first: usize, stop: usize, hi: usize) -> (Vec<VBlock>, usize) {
    let k = level / 2;
    let mut rev = vec![nav.block_at(level, hi - 1)];
    let mut t = 0;
    loop {
        let bj = rev[t];
        if !is_short(bj.len, k) {
            return (rev[..t].to_vec(), bj.sbeg + bj.len);
        }
        while rev.len() < t + 5 && rev[rev.len() - 1].sbeg > first {
            let b = rev[rev.len() - 1];
            rev.push(nav.block_at(level, b.sbeg - 1));
        }
        let mut window: Vec<VBlock> = rev[t..].iter().take(5).copied().collect();
        window.reverse();
        let w = window.len();
        if w >= 3 && local_min_before(&labels(&window, k), w - 1) {
            return (rev[..t].to_vec(), bj.sbeg + bj.len);
        }
        if bj.sbeg <= stop {
            return (rev[..=t].to_vec(), stop);
        }
        t += 1;
    }
}

/// Fingerprint of `t[p..q)` in a pattern hierarchy given as explicit rows.
pub fn fingerprint_pattern_substring(rows: &[Row], p: usize, q: usize) -> Result<Fingerprint, Error> {
    let m = rows.first().map_or(0, |r| r.blocks.len());
    if p >= q || q > m {
        return Err(Error::BadRange { lo: p, hi: q, len: m });
    }
    Ok(fin(&RowsNav { rows }, p, q))
}

/// Fingerprint of `s[p..=q]` read through the jiggly tree below node `start`.
pub fn fingerprint_text_substring(j: &JigglyTree, start: u32, p: usize, q: usize) -> Result<Fingerprint, Error> {
    let node = j.node(start);
    if p > q || p < node.sbeg || q > node.send() {
        return Err(Error::NotCovering);
    }
    let view = HView::new(j, node.id, node.sbeg, node.len);
    Ok(fin(&view, p, q + 1))
}
