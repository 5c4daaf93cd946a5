//! One-pass construction. Letters enter level 0; even levels hold at most one
//! pending run, odd levels hold the blocks since the last mark. A block that
//! carries a new id becomes a jiggly tree node the moment it is finalized.

use std::collections::VecDeque;

use crate::dict::Dict;
use crate::hierarchy::{is_short, local_min_before, vbit, Registry};
use crate::jiggly::{JNode, JigglyTree, NodeKind, NONE};
use crate::{Error, Id, Index, Symbol, LETTER_LIMIT, SENTINEL};

/// A finalized block travelling up the levels.
#[derive(Clone, Copy, Debug)]
struct SBlock {
    sbeg: usize,
    len: usize,
    id: Id,
    /// Level on which the block was formed; 0 for letters.
    bottom: u32,
    /// Node of the block if it is the leftmost occurrence of its id.
    node: u32,
}

#[derive(Debug, Default)]
struct EvenQueue {
    pending: Option<(SBlock, u64)>,
}

#[derive(Debug, Default)]
struct OddQueue {
    /// `(id, len, id', id'')` of the last three blocks.
    hist: VecDeque<(Id, usize, Option<u64>, Option<u64>)>,
    range: Vec<SBlock>,
    /// Row index of `range[0]`.
    start: usize,
    parser: Option<OnlineParser>,
}

#[derive(Debug)]
#[allow(clippy::large_enum_variant)]
enum Queue {
    Even(EvenQueue),
    Odd(OddQueue),
}

type CtxKey = (Vec<Id>, Vec<Id>);

/// Streaming form of the subrange parser. Every context is local to its
/// marked range, so a range's keys are known when it closes. Keys stop
/// changing once `r` exceeds a per-block bound and are then kept in the
/// saturated maps.
#[derive(Debug)]
pub struct OnlineParser {
    ctx: Vec<Dict<CtxKey, usize>>,
    ctx_sat: Dict<CtxKey, usize>,
    right: Vec<Dict<Vec<Id>, usize>>,
    right_sat: Dict<Vec<Id>, usize>,
    /// Enclosing range of blocks that are first occurrences of a right key:
    /// `(id of the range's block, row index of its first block)`.
    hats: Dict<usize, (Id, usize)>,
    deterministic: bool,
}

fn rleft(ids: &[Id], i: usize, ell: usize) -> Vec<Id> {
    let h = i.min(ell);
    let mut out = Vec::with_capacity(h + 1);
    if h < ell {
        out.push(SENTINEL);
    }
    out.extend_from_slice(&ids[i - h..i]);
    out
}

fn rright(ids: &[Id], i: usize, ell: usize) -> Vec<Id> {
    ids[i..(i + ell).min(ids.len())].to_vec()
}

fn ctx_key(ids: &[Id], i: usize, r: usize) -> CtxKey {
    (rleft(ids, i, 4 * r), rright(ids, i, 5 * r))
}

impl OnlineParser {
    pub fn new(deterministic: bool) -> Self {
        OnlineParser {
            ctx: Vec::new(),
            ctx_sat: Dict::new(deterministic),
            right: Vec::new(),
            right_sat: Dict::new(deterministic),
            hats: Dict::new(deterministic),
            deterministic,
        }
    }

    fn level<K: Ord + std::hash::Hash + Eq>(
        maps: &mut Vec<Dict<K, usize>>,
        r: usize,
        det: bool,
    ) -> &mut Dict<K, usize> {
        while maps.len() <= r {
            maps.push(Dict::new(det));
        }
        &mut maps[r]
    }

    /// Records the contexts of one closed range; `hat` is the id of the
    /// block the range forms.
    pub fn insert_range(&mut self, ids: &[Id], start: usize, hat: Id) {
        let w = ids.len();
        let det = self.deterministic;
        for i in 0..w {
            let m = start + i;
            let c = w - i;
            let rmax = (i / 4 + 1).max(c.div_ceil(5)).max(1);
            for r in 1..rmax {
                Self::level(&mut self.ctx, r, det).entry_or_insert(ctx_key(ids, i, r), m);
            }
            self.ctx_sat.entry_or_insert(ctx_key(ids, i, rmax), m);
            let mut first = false;
            for r in 1..c {
                first |= Self::level(&mut self.right, r, det).entry_or_insert(rright(ids, i, r), m);
            }
            first |= self.right_sat.entry_or_insert(ids[i..].to_vec(), m);
            if first {
                self.hats.insert(m, (hat, start));
            }
        }
    }

    fn first_ctx(&self, ids: &[Id], i: usize, r: usize) -> usize {
        let key = ctx_key(ids, i, r);
        let a = self.ctx.get(r).and_then(|d| d.get(&key)).copied().unwrap_or(usize::MAX);
        let b = self.ctx_sat.get(&key).copied().unwrap_or(usize::MAX);
        a.min(b)
    }

    fn first_right(&self, ids: &[Id], i: usize, r: usize) -> usize {
        let key = rright(ids, i, r);
        let a = self.right.get(r).and_then(|d| d.get(&key)).copied().unwrap_or(usize::MAX);
        let b = self.right_sat.get(&key).copied().unwrap_or(usize::MAX);
        a.min(b)
    }

    /// Greedy `(m, r, m'')` parse of the range just inserted.
    pub fn parse(&self, ids: &[Id], start: usize) -> Vec<(usize, usize, usize)> {
        let w = ids.len();
        let mut out = Vec::new();
        let mut i = 0;
        while i < w {
            let mut r = 1;
            while i + r < w && self.first_ctx(ids, i, r + 1) < start + i {
                r += 1;
            }
            let m2 = if r > 1 { self.first_right(ids, i, r) } else { start + i };
            out.push((start + i, r, m2));
            i += r;
        }
        out
    }
}

trait EntryOrInsert<K> {
    /// Inserts if absent; reports whether it did.
    fn entry_or_insert(&mut self, k: K, v: usize) -> bool;
}

impl<K: Ord + std::hash::Hash + Eq> EntryOrInsert<K> for Dict<K, usize> {
    fn entry_or_insert(&mut self, k: K, v: usize) -> bool {
        if self.contains_key(&k) {
            return false;
        }
        self.insert(k, v);
        true
    }
}

/// Queue and structure sizes observed during a build.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BuildStats {
    pub letters: usize,
    /// Blocks per level.
    pub blocks: Vec<usize>,
    /// Largest queue length per level.
    pub max_queue: Vec<usize>,
    /// Nodes created, before dropping any unreachable ones.
    pub nodes_created: usize,
    pub ids_minted: u64,
}

#[derive(Debug)]
pub struct StreamBuilder {
    reg: Registry,
    deterministic: bool,
    levels: Vec<Queue>,
    nodes: Vec<JNode>,
    n: usize,
    stats: BuildStats,
}

fn node(sbeg: usize, len: usize, id: Id, kind: NodeKind, creation: u32, parent: u32) -> JNode {
    JNode {
        sbeg,
        len,
        id,
        kind,
        creation,
        children: Vec::new(),
        run_count: 1,
        target: SENTINEL,
        link: NONE,
        off: 0,
        r: 1,
        parent,
    }
}

impl StreamBuilder {
    pub fn new(deterministic: bool) -> Self {
        StreamBuilder {
            reg: Registry::new(deterministic),
            deterministic,
            levels: Vec::new(),
            nodes: Vec::new(),
            n: 0,
            stats: BuildStats::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn stats(&self) -> &BuildStats {
        &self.stats
    }

    pub fn feed_letter(&mut self, c: Symbol) {
        let b = SBlock { sbeg: self.n, len: 1, id: c as Id, bottom: 0, node: NONE };
        self.n += 1;
        self.stats.letters += 1;
        self.push(0, b);
    }

    /// Feeds an integer token, rejecting values outside the letter namespace.
    pub fn feed_token(&mut self, c: u64) -> Result<(), Error> {
        if c >= LETTER_LIMIT {
            return Err(Error::LetterOutOfRange(c));
        }
        self.feed_letter(c as Symbol);
        Ok(())
    }

    pub fn feed_all(&mut self, s: impl IntoIterator<Item = Symbol>) {
        for c in s {
            self.feed_letter(c);
        }
    }

    fn ensure(&mut self, l: usize) {
        while self.levels.len() <= l {
            let q = if self.levels.len().is_multiple_of(2) {
                Queue::Even(EvenQueue::default())
            } else {
                Queue::Odd(OddQueue { parser: Some(OnlineParser::new(self.deterministic)), ..OddQueue::default() })
            };
            self.levels.push(q);
            self.stats.blocks.push(0);
            self.stats.max_queue.push(0);
        }
    }

    fn push(&mut self, l: usize, b: SBlock) {
        self.ensure(l);
        self.stats.blocks[l] += 1;
        let k = (l / 2) as u32;
        match &mut self.levels[l] {
            Queue::Even(q) => {
                if let Some((p, c)) = &mut q.pending {
                    if is_short(p.len, k) && p.id == b.id {
                        *c += 1;
                        return;
                    }
                }
                let old = q.pending.replace((b, 1));
                self.stats.max_queue[l] = self.stats.max_queue[l].max(1);
                if let Some((p, c)) = old {
                    self.flush_run(l, p, c);
                }
            }
            Queue::Odd(q) => {
                let close = match (q.range.last(), q.hist.len()) {
                    (Some(last), h) => {
                        let id2 = |i: usize| if i < h { q.hist[i].3 } else { None };
                        let labels: Vec<Option<u64>> =
                            (0..3).map(|t| if h >= 3 - t { id2(h + t - 3) } else { None }).collect();
                        !is_short(last.len, k) || !is_short(b.len, k) || local_min_before(&labels, 2)
                    }
                    _ => false,
                };
                if close {
                    self.close_range(l);
                }
                let Queue::Odd(q) = &mut self.levels[l] else { unreachable!() };
                let (id1, id2) = match q.hist.back() {
                    Some(&(pid, plen, pid1, _)) => {
                        let id1 = (is_short(plen, k) && is_short(b.len, k))
                            .then(|| vbit(pid, b.id).expect("adjacent short blocks differ"));
                        let id2 = match (pid1, id1) {
                            (Some(a), Some(c)) => Some(vbit(a, c).expect("adjacent id' differ")),
                            _ => None,
                        };
                        (id1, id2)
                    }
                    None => (None, None),
                };
                q.hist.push_back((b.id, b.len, id1, id2));
                if q.hist.len() > 3 {
                    q.hist.pop_front();
                }
                q.range.push(b);
                self.stats.max_queue[l] = self.stats.max_queue[l].max(q.range.len());
            }
        }
    }

    /// The node standing for `c` below `parent`.
    fn attach(&mut self, c: &SBlock, parent: u32) -> u32 {
        if c.node != NONE {
            self.nodes[c.node as usize].parent = parent;
            return c.node;
        }
        let me = self.nodes.len() as u32;
        if c.bottom == 0 {
            self.nodes.push(node(c.sbeg, 1, c.id, NodeKind::Letter, 0, parent));
        } else {
            let mut v = node(c.sbeg, c.len, c.id, NodeKind::CopyLeaf, c.bottom, parent);
            v.target = c.id;
            self.nodes.push(v);
        }
        me
    }

    fn flush_run(&mut self, l: usize, p: SBlock, c: u64) {
        if c == 1 {
            self.push(l + 1, p);
            return;
        }
        let up = (l + 1) as u32;
        let (id, fresh) = self.reg.mint_run(up, p.id, c);
        let mut b = SBlock { sbeg: p.sbeg, len: p.len * c as usize, id, bottom: up, node: NONE };
        if fresh {
            let me = self.nodes.len() as u32;
            let mut v = node(b.sbeg, b.len, id, NodeKind::Run, up, NONE);
            v.run_count = c;
            self.nodes.push(v);
            let child = self.attach(&p, me);
            self.nodes[me as usize].children = vec![child];
            b.node = me;
        }
        self.push(l + 1, b);
    }

    fn close_range(&mut self, l: usize) {
        let Queue::Odd(q) = &mut self.levels[l] else { unreachable!() };
        let blocks = std::mem::take(&mut q.range);
        let start = q.start;
        q.start += blocks.len();
        let mut parser = q.parser.take().expect("parser present");
        let ids: Vec<Id> = blocks.iter().map(|b| b.id).collect();
        let up = (l + 1) as u32;
        if blocks.len() == 1 {
            parser.insert_range(&ids, start, ids[0]);
            self.put_parser(l, parser);
            self.push(l + 1, blocks[0]);
            return;
        }
        let (id, fresh) = self.reg.mint_group(up, &ids);
        parser.insert_range(&ids, start, id);
        let first = blocks[0];
        let last = blocks[blocks.len() - 1];
        let mut b = SBlock { sbeg: first.sbeg, len: last.sbeg + last.len - first.sbeg, id, bottom: up, node: NONE };
        if fresh {
            let me = self.nodes.len() as u32;
            self.nodes.push(node(b.sbeg, b.len, id, NodeKind::Group, up, NONE));
            let mut kids = Vec::new();
            for (m, r, m2) in parser.parse(&ids, start) {
                let i = m - start;
                if r == 1 {
                    kids.push(self.attach(&blocks[i], me));
                    continue;
                }
                let (hat, hat_start) = *parser.hats.get(&m2).expect("first occurrence recorded");
                let e = blocks[i + r - 1];
                let mut im = node(
                    blocks[i].sbeg,
                    e.sbeg + e.len - blocks[i].sbeg,
                    SENTINEL,
                    NodeKind::Intermediate,
                    l as u32,
                    me,
                );
                im.target = hat;
                im.off = (m2 - hat_start) as u32;
                im.r = r as u32;
                kids.push(self.nodes.len() as u32);
                self.nodes.push(im);
            }
            self.nodes[me as usize].children = kids;
            b.node = me;
        }
        self.put_parser(l, parser);
        self.push(l + 1, b);
    }

    fn put_parser(&mut self, l: usize, p: OnlineParser) {
        let Queue::Odd(q) = &mut self.levels[l] else { unreachable!() };
        q.parser = Some(p);
    }

    /// Flushes every level and returns the finished tree.
    pub fn finish_tree(mut self) -> Result<(JigglyTree, BuildStats), Error> {
        if self.n == 0 {
            return Err(Error::Empty);
        }
        let mut l = 0;
        let top = loop {
            if self.stats.blocks[l] == 1 {
                let b = match &self.levels[l] {
                    Queue::Even(q) => q.pending.expect("single pending block").0,
                    Queue::Odd(q) => q.range[0],
                };
                break (l, b);
            }
            match &mut self.levels[l] {
                Queue::Even(q) => {
                    if let Some((p, c)) = q.pending.take() {
                        self.flush_run(l, p, c);
                    }
                }
                Queue::Odd(q) => {
                    if !q.range.is_empty() {
                        self.close_range(l);
                    }
                }
            }
            l += 1;
        };
        let (level, rb) = top;
        let root = self.attach(&rb, NONE);
        self.stats.nodes_created = self.nodes.len();
        self.stats.ids_minted = self.reg.minted();
        let (nodes, root) = preorder(self.nodes, root);
        Ok((JigglyTree::assemble(nodes, root, self.n, level as u32), self.stats))
    }

    pub fn finish(self) -> Result<Index, Error> {
        let det = self.deterministic;
        let (j, _) = self.finish_tree()?;
        Ok(Index::from_jiggly(j, det))
    }
}

/// Renumbers the nodes reachable from `root` in preorder.
fn preorder(nodes: Vec<JNode>, root: u32) -> (Vec<JNode>, u32) {
    let mut map = vec![NONE; nodes.len()];
    let mut order = Vec::with_capacity(nodes.len());
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        map[v as usize] = order.len() as u32;
        order.push(v);
        stack.extend(nodes[v as usize].children.iter().rev());
    }
    let mut nodes: Vec<Option<JNode>> = nodes.into_iter().map(Some).collect();
    let out = order
        .iter()
        .map(|&v| {
            let mut x = nodes[v as usize].take().expect("visited once");
            x.children = x.children.iter().map(|&c| map[c as usize]).collect();
            x.parent = if x.parent == NONE { NONE } else { map[x.parent as usize] };
            x
        })
        .collect();
    (out, 0)
}

/// Streams `s` through a fresh builder.
pub fn build_streaming(s: &[Symbol], deterministic: bool) -> Result<Index, Error> {
    let mut b = StreamBuilder::new(deterministic);
    b.feed_all(s.iter().copied());
    b.finish()
}
