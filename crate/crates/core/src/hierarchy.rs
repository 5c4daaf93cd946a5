//! Offline hierarchy of blocks and the cut deterministic-coin-tossing primitives.
//!
//! Even levels coalesce runs of short equal blocks, odd levels assign the
//! reduced labels `id'` and `id''`, mark blocks, and group marked ranges.

use crate::dict::Dict;
use crate::{Error, Id, Symbol, FIRST_GENERATED};

/// Lowest bit index at which `x` and `y` differ.
pub fn lbit(x: u64, y: u64) -> Result<u32, Error> {
    if x == y {
        return Err(Error::EqualArguments(x));
    }
    Ok((x ^ y).trailing_zeros())
}

/// `2 * lbit(x, y) + bit_{lbit}(x)`.
pub fn vbit(x: u64, y: u64) -> Result<u64, Error> {
    let i = lbit(x, y)?;
    Ok(2 * i as u64 + ((x >> i) & 1))
}

/// Whether a block of length `len` is short on levels `2k` and `2k+1`.
#[inline]
pub fn is_short(len: usize, k: u32) -> bool {
    k >= 63 || (len as u64) <= (1u64 << k)
}

/// Source of identifiers for newly formed run and group blocks; `level` is
/// the level of the row receiving the block.
pub trait Resolver {
    fn run_id(&mut self, level: u32, base: Id, count: u64) -> Id;
    fn group_id(&mut self, level: u32, seq: &[Id]) -> Id;
}

impl Resolver for Registry {
    fn run_id(&mut self, level: u32, base: Id, count: u64) -> Id {
        self.mint_run(level, base, count).0
    }
    fn group_id(&mut self, level: u32, seq: &[Id]) -> Id {
        self.mint_group(level, seq).0
    }
}

/// Bits of a generated id below its level tag.
pub const LEVEL_SHIFT: u32 = 40;

/// Shared identifier dictionaries for runs and groups. Generated ids carry
/// the level they were first minted on, so the order in which levels mint
/// does not change the values.
#[derive(Clone, Debug)]
pub struct Registry {
    pub pairs: Dict<(Id, u64), Id>,
    pub seqs: Dict<Vec<Id>, Id>,
    counters: Vec<u64>,
}

impl Registry {
    pub fn new(deterministic: bool) -> Self {
        Registry { pairs: Dict::new(deterministic), seqs: Dict::new(deterministic), counters: Vec::new() }
    }

    pub fn fresh(&mut self, level: u32) -> Id {
        let l = level as usize;
        if self.counters.len() <= l {
            self.counters.resize(l + 1, 0);
        }
        let id = FIRST_GENERATED + ((level as u64) << LEVEL_SHIFT) + self.counters[l];
        self.counters[l] += 1;
        id
    }

    /// Number of ids minted so far.
    pub fn minted(&self) -> u64 {
        self.counters.iter().sum()
    }

    /// Identifier of the run `<base, count>`; the flag reports a fresh mint.
    pub fn mint_run(&mut self, level: u32, base: Id, count: u64) -> (Id, bool) {
        if let Some(&id) = self.pairs.get(&(base, count)) {
            return (id, false);
        }
        let id = self.fresh(level);
        self.pairs.insert((base, count), id);
        (id, true)
    }

    /// Identifier of the group produced by `seq`; the flag reports a fresh mint.
    pub fn mint_group(&mut self, level: u32, seq: &[Id]) -> (Id, bool) {
        if let Some(&id) = self.seqs.get(seq) {
            return (id, false);
        }
        let id = self.fresh(level);
        self.seqs.insert(seq.to_vec(), id);
        (id, true)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Letter,
    Run,
    Group,
    Copy,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub sbeg: usize,
    pub len: usize,
    pub id: Id,
    pub kind: Kind,
    /// Base id of a run block, otherwise the block's own id.
    pub run_base: Id,
    /// Repetition count of a run block, 1 otherwise.
    pub run_count: u64,
    /// Children as a half-open index range into the row below.
    pub children: (usize, usize),
    /// Index of the parent in the row above, `usize::MAX` on the top row.
    pub parent: usize,
}

impl Block {
    pub fn send(&self) -> usize {
        self.sbeg + self.len - 1
    }
}

#[derive(Clone, Debug, Default)]
pub struct Row {
    pub level: u32,
    pub blocks: Vec<Block>,
    /// Filled on odd levels only.
    pub marks: Vec<bool>,
    pub id1: Vec<Option<u64>>,
    pub id2: Vec<Option<u64>>,
}

impl Row {
    pub fn ids(&self) -> Vec<Id> {
        self.blocks.iter().map(|b| b.id).collect()
    }

    /// Index of the block starting at or covering text position `pos`.
    pub fn block_at(&self, pos: usize) -> usize {
        self.blocks.partition_point(|b| b.sbeg <= pos) - 1
    }
}

#[derive(Clone, Debug)]
pub struct Hierarchy {
    pub rows: Vec<Row>,
    pub reg: Registry,
    pub n: usize,
}

/// Auxiliary labels of one odd-level row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Marks {
    pub id1: Vec<Option<u64>>,
    pub id2: Vec<Option<u64>>,
    pub marks: Vec<bool>,
}

/// `id'` and `id''` of a sequence of level-`2k+1` blocks, computed in isolation.
pub fn dct_labels(ids: &[Id], lens: &[usize], k: u32) -> (Vec<Option<u64>>, Vec<Option<u64>>) {
    let b = ids.len();
    let mut id1 = vec![None; b];
    for i in 1..b {
        if is_short(lens[i], k) && is_short(lens[i - 1], k) {
            id1[i] = Some(vbit(ids[i - 1], ids[i]).expect("adjacent short blocks differ"));
        }
    }
    let mut id2 = vec![None; b];
    for i in 1..b {
        if let (Some(a), Some(c)) = (id1[i - 1], id1[i]) {
            id2[i] = Some(vbit(a, c).expect("adjacent id' differ"));
        }
    }
    (id1, id2)
}

/// Condition (b) at 0-based index `i`: `id''[i-1]` is a local minimum.
#[inline]
pub fn local_min_before(id2: &[Option<u64>], i: usize) -> bool {
    if i < 2 {
        return false;
    }
    match (id2[i - 2], id2[i - 1], id2[i]) {
        (Some(a), Some(m), Some(c)) => a > m && m < c,
        _ => false,
    }
}

pub fn compute_marks(row: &Row) -> Marks {
    let k = row.level / 2;
    let ids: Vec<Id> = row.blocks.iter().map(|b| b.id).collect();
    let lens: Vec<usize> = row.blocks.iter().map(|b| b.len).collect();
    let (id1, id2) = dct_labels(&ids, &lens, k);
    let b = ids.len();
    let marks = (0..b)
        .map(|i| {
            !is_short(lens[i], k) || (i + 1 < b && !is_short(lens[i + 1], k)) || i + 1 == b || local_min_before(&id2, i)
        })
        .collect();
    Marks { id1, id2, marks }
}

pub fn coalesce_runs(row: &Row, reg: &mut dyn Resolver) -> Row {
    let k = row.level / 2;
    let src = &row.blocks;
    let mut out = Vec::new();
    let mut i = 0;
    while i < src.len() {
        let mut j = i + 1;
        if is_short(src[i].len, k) {
            while j < src.len() && src[j].id == src[i].id {
                j += 1;
            }
        }
        let r = (j - i) as u64;
        if r > 1 {
            let id = reg.run_id(row.level + 1, src[i].id, r);
            out.push(Block {
                sbeg: src[i].sbeg,
                len: src[i].len * (j - i),
                id,
                kind: Kind::Run,
                run_base: src[i].id,
                run_count: r,
                children: (i, j),
                parent: usize::MAX,
            });
        } else {
            out.push(copy_of(&src[i], i));
        }
        i = j;
    }
    Row { level: row.level + 1, blocks: out, ..Row::default() }
}

fn copy_of(b: &Block, idx: usize) -> Block {
    Block {
        sbeg: b.sbeg,
        len: b.len,
        id: b.id,
        kind: Kind::Copy,
        run_base: b.id,
        run_count: 1,
        children: (idx, idx + 1),
        parent: usize::MAX,
    }
}

pub fn group_marked(row: &Row, marks: &[bool], reg: &mut dyn Resolver) -> Row {
    let src = &row.blocks;
    let mut out = Vec::new();
    let mut start = 0;
    for (i, &m) in marks.iter().enumerate() {
        if !m {
            continue;
        }
        if i == start {
            out.push(copy_of(&src[i], i));
        } else {
            let seq: Vec<Id> = src[start..=i].iter().map(|b| b.id).collect();
            let id = reg.group_id(row.level + 1, &seq);
            out.push(Block {
                sbeg: src[start].sbeg,
                len: src[i].send() + 1 - src[start].sbeg,
                id,
                kind: Kind::Group,
                run_base: id,
                run_count: 1,
                children: (start, i + 1),
                parent: usize::MAX,
            });
        }
        start = i + 1;
    }
    Row { level: row.level + 1, blocks: out, ..Row::default() }
}

pub fn letter_row(s: &[Symbol]) -> Row {
    let blocks = s
        .iter()
        .enumerate()
        .map(|(i, &c)| Block {
            sbeg: i,
            len: 1,
            id: c as Id,
            kind: Kind::Letter,
            run_base: c as Id,
            run_count: 1,
            children: (0, 0),
            parent: usize::MAX,
        })
        .collect();
    Row { level: 0, blocks, ..Row::default() }
}

/// Advances one level: runs on even levels, marked groups on odd levels.
/// Odd rows get their labels and marks filled in place.
pub fn next_row(row: &mut Row, reg: &mut dyn Resolver) -> Row {
    if row.level.is_multiple_of(2) {
        coalesce_runs(row, reg)
    } else {
        let m = compute_marks(row);
        let next = group_marked(row, &m.marks, reg);
        row.id1 = m.id1;
        row.id2 = m.id2;
        row.marks = m.marks;
        next
    }
}

pub fn build_hierarchy(s: &[Symbol], deterministic: bool) -> Result<Hierarchy, Error> {
    build_with(s, Registry::new(deterministic))
}

pub fn build_with(s: &[Symbol], mut reg: Registry) -> Result<Hierarchy, Error> {
    let rows = build_rows(s, &mut reg)?;
    Ok(Hierarchy { rows, reg, n: s.len() })
}

/// Rows of the hierarchy of `s` with identifiers drawn from `reg`.
pub fn build_rows(s: &[Symbol], reg: &mut dyn Resolver) -> Result<Vec<Row>, Error> {
    if s.is_empty() {
        return Err(Error::Empty);
    }
    let mut rows = vec![letter_row(s)];
    while rows.last().unwrap().blocks.len() > 1 {
        let last = rows.last_mut().unwrap();
        let next = next_row(last, reg);
        rows.push(next);
    }
    link_parents(&mut rows);
    Ok(rows)
}

pub fn link_parents(rows: &mut [Row]) {
    for l in 1..rows.len() {
        let (lo, hi) = rows.split_at_mut(l);
        let below = &mut lo[l - 1];
        for (pi, p) in hi[0].blocks.iter().enumerate() {
            for c in p.children.0..p.children.1 {
                below.blocks[c].parent = pi;
            }
        }
    }
}

impl Hierarchy {
    pub fn top(&self) -> usize {
        self.rows.len() - 1
    }

    /// Letters spelled by a block, read through its descendants.
    pub fn expand(&self, level: usize, idx: usize) -> Vec<Symbol> {
        let mut out = Vec::new();
        self.expand_into(level, idx, &mut out);
        out
    }

    fn expand_into(&self, level: usize, idx: usize, out: &mut Vec<Symbol>) {
        let b = &self.rows[level].blocks[idx];
        if level == 0 {
            out.push(b.id as Symbol);
            return;
        }
        for c in b.children.0..b.children.1 {
            self.expand_into(level - 1, c, out);
        }
    }

    /// The level on which each id was first created.
    pub fn creation_levels(&self) -> std::collections::HashMap<Id, u32> {
        let mut m = std::collections::HashMap::new();
        for row in &self.rows {
            for b in &row.blocks {
                m.entry(b.id).or_insert(row.level);
            }
        }
        m
    }

    /// Block boundaries (start positions other than 0) on a level.
    pub fn boundaries(&self, level: usize) -> Vec<usize> {
        self.rows[level].blocks.iter().skip(1).map(|b| b.sbeg).collect()
    }
}
