//! The jiggly block tree: the hierarchy pruned by rules 1-4, with repeated
//! child subranges replaced by intermediate blocks pointing to earlier copies.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use crate::hierarchy::{Hierarchy, Kind, Row};
use crate::{is_letter, Error, Id, Symbol, SENTINEL};

pub const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Letter,
    Run,
    Group,
    CopyLeaf,
    Intermediate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JNode {
    pub sbeg: usize,
    pub len: usize,
    /// `SENTINEL` for intermediate nodes.
    pub id: Id,
    pub kind: NodeKind,
    /// Lowest level on which a block with this id exists; for intermediate
    /// nodes, the odd level of the replaced subrange.
    pub creation: u32,
    pub children: Vec<u32>,
    pub run_count: u64,
    /// Id of the linked block: own id for copy leaves, id of the target group
    /// for intermediate nodes.
    pub target: Id,
    /// Resolved copy link or intermediate link.
    pub link: u32,
    pub off: u32,
    pub r: u32,
    pub parent: u32,
}

impl JNode {
    pub fn send(&self) -> usize {
        self.sbeg + self.len - 1
    }

    pub fn has_children(&self) -> bool {
        !self.children.is_empty()
    }

    fn leaf(sbeg: usize, len: usize, id: Id, kind: NodeKind, creation: u32, parent: u32) -> Self {
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
}

/// One child of a block in the (emulated) hierarchy; `off` is relative to
/// the parent's start and `count > 1` only for the single child of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HChild {
    pub id: Id,
    pub off: usize,
    pub len: usize,
    pub count: u64,
}

/// Binary-lifting table over a forest given by parent links.
#[derive(Clone, Debug, Default)]
pub struct Lifting {
    pub up: Vec<Vec<u32>>,
}

impl Lifting {
    pub fn new(parent: Vec<u32>) -> Self {
        let n = parent.len();
        let mut up = vec![parent];
        let mut j = 0;
        while (1usize << (j + 1)) <= n.max(1) {
            let prev = &up[j];
            let next: Vec<u32> = (0..n)
                .map(|v| match prev[v] {
                    NONE => NONE,
                    u => prev[u as usize],
                })
                .collect();
            up.push(next);
            j += 1;
        }
        Lifting { up }
    }

    pub fn parent(&self, v: u32) -> u32 {
        self.up[0][v as usize]
    }

    /// Farthest ancestor (including `v`) satisfying a predicate that holds on
    /// a prefix of the path from `v`.
    pub fn farthest(&self, v: u32, pred: impl Fn(u32) -> bool) -> Option<u32> {
        if !pred(v) {
            return None;
        }
        let mut v = v;
        for j in (0..self.up.len()).rev() {
            let u = self.up[j][v as usize];
            if u != NONE && pred(u) {
                v = u;
            }
        }
        Some(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Forest {
    Left,
    Right,
}

#[derive(Clone, Debug)]
pub struct JigglyTree {
    pub nodes: Vec<JNode>,
    pub root: u32,
    pub n: usize,
    /// Level of the single top block of the hierarchy.
    pub top_level: u32,
    /// Leftmost node with children per id; for letters, the leftmost leaf.
    pub leftmost: HashMap<Id, u32>,
    pub a_left: Lifting,
    pub a_right: Lifting,
}

type Context = (Vec<Id>, Vec<Id>);

/// Offline greedy subrange parser over one odd level row.
pub struct RowParser<'a> {
    row: &'a Row,
    ctx: HashMap<usize, HashMap<Context, usize>>,
    right: HashMap<usize, HashMap<Vec<Id>, usize>>,
}

impl<'a> RowParser<'a> {
    pub fn new(row: &'a Row) -> Self {
        assert_eq!(row.marks.len(), row.blocks.len(), "row must be marked");
        RowParser { row, ctx: HashMap::new(), right: HashMap::new() }
    }

    /// `$` followed by the unmarked run of ids before `m`, at most `ell` long.
    pub fn rleft(&self, m: usize, ell: usize) -> Vec<Id> {
        let mut h = 0;
        while h < ell && m > h && !self.row.marks[m - h - 1] {
            h += 1;
        }
        let mut out = Vec::with_capacity(h + 1);
        if h < ell {
            out.push(SENTINEL);
        }
        out.extend(self.row.blocks[m - h..m].iter().map(|b| b.id));
        out
    }

    pub fn rright(&self, m: usize, ell: usize) -> Vec<Id> {
        let mut out = Vec::new();
        let b = self.row.blocks.len();
        let mut t = m;
        while out.len() < ell && t < b {
            out.push(self.row.blocks[t].id);
            if self.row.marks[t] {
                break;
            }
            t += 1;
        }
        out
    }

    fn first_with_context(&mut self, r: usize) -> &HashMap<(Vec<Id>, Vec<Id>), usize> {
        if !self.ctx.contains_key(&r) {
            let mut map = HashMap::new();
            for m in 0..self.row.blocks.len() {
                map.entry((self.rleft(m, 4 * r), self.rright(m, 5 * r))).or_insert(m);
            }
            self.ctx.insert(r, map);
        }
        &self.ctx[&r]
    }

    fn first_with_right(&mut self, r: usize) -> &HashMap<Vec<Id>, usize> {
        if !self.right.contains_key(&r) {
            let mut map = HashMap::new();
            for m in 0..self.row.blocks.len() {
                map.entry(self.rright(m, r)).or_insert(m);
            }
            self.right.insert(r, map);
        }
        &self.right[&r]
    }

    fn has_earlier(&mut self, m: usize, r: usize) -> bool {
        let key = (self.rleft(m, 4 * r), self.rright(m, 5 * r));
        self.first_with_context(r).get(&key).is_some_and(|&f| f < m)
    }

    /// Greedy parse of the range `[lo, hi]` into `(m, r, m'')` triples;
    /// `m''` equals `m` when `r = 1`.
    pub fn parse(&mut self, lo: usize, hi: usize) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        let mut m = lo;
        while m <= hi {
            let mut r = 1;
            while m + r <= hi && self.has_earlier(m, r + 1) {
                r += 1;
            }
            let m2 = if r > 1 {
                let key = self.rright(m, r);
                self.first_with_right(r)[&key]
            } else {
                m
            };
            out.push((m, r, m2));
            m += r;
        }
        out
    }
}

/// Offline parse of one marked range; see [`RowParser::parse`].
pub fn parse_subranges(row: &Row, lo: usize, hi: usize) -> Vec<(usize, usize, usize)> {
    RowParser::new(row).parse(lo, hi)
}

/// Applies pruning rules 1-4 to the hierarchy and returns the surviving tree
/// without intermediate nodes; each node has the same fields as in `J`.
pub fn prune(h: &Hierarchy) -> JigglyTree {
    Builder::new(h, false).finish()
}

pub fn build_jiggly(h: &Hierarchy) -> JigglyTree {
    Builder::new(h, true).finish()
}

struct Builder<'a> {
    h: &'a Hierarchy,
    leftmost_sbeg: HashMap<Id, usize>,
    parsers: HashMap<usize, RowParser<'a>>,
    nodes: Vec<JNode>,
    intermediates: bool,
}

impl<'a> Builder<'a> {
    fn new(h: &'a Hierarchy, intermediates: bool) -> Self {
        let mut leftmost_sbeg = HashMap::new();
        for row in &h.rows {
            for b in &row.blocks {
                let e = leftmost_sbeg.entry(b.id).or_insert(b.sbeg);
                *e = (*e).min(b.sbeg);
            }
        }
        Builder { h, leftmost_sbeg, parsers: HashMap::new(), nodes: Vec::new(), intermediates }
    }

    fn bottom(&self, mut level: usize, mut idx: usize) -> (usize, usize) {
        while self.h.rows[level].blocks[idx].kind == Kind::Copy {
            idx = self.h.rows[level].blocks[idx].children.0;
            level -= 1;
        }
        (level, idx)
    }

    fn make(&mut self, level: usize, idx: usize, parent: u32) -> u32 {
        let h = self.h;
        let (lv, bi) = self.bottom(level, idx);
        let b = &h.rows[lv].blocks[bi];
        let me = self.nodes.len() as u32;
        if lv == 0 {
            self.nodes.push(JNode::leaf(b.sbeg, 1, b.id, NodeKind::Letter, 0, parent));
            return me;
        }
        if self.leftmost_sbeg[&b.id] != b.sbeg {
            let mut node = JNode::leaf(b.sbeg, b.len, b.id, NodeKind::CopyLeaf, lv as u32, parent);
            node.target = b.id;
            self.nodes.push(node);
            return me;
        }
        let (kind, count) = match b.kind {
            Kind::Run => (NodeKind::Run, b.run_count),
            Kind::Group => (NodeKind::Group, 1),
            _ => unreachable!("chain bottoms above level 0 are runs or groups"),
        };
        let (c0, c1) = b.children;
        let mut node = JNode::leaf(b.sbeg, b.len, b.id, kind, lv as u32, parent);
        node.run_count = count;
        self.nodes.push(node);
        let mut kids = Vec::new();
        if kind == NodeKind::Run {
            kids.push(self.make(lv - 1, c0, me));
        } else if !self.intermediates {
            for c in c0..c1 {
                kids.push(self.make(lv - 1, c, me));
            }
        } else {
            let row = &h.rows[lv - 1];
            let parse = self.parsers.entry(lv - 1).or_insert_with(|| RowParser::new(row)).parse(c0, c1 - 1);
            for (m, r, m2) in parse {
                if r == 1 {
                    kids.push(self.make(lv - 1, m, me));
                    continue;
                }
                let hat = &h.rows[lv].blocks[row.blocks[m2].parent];
                let first = &row.blocks[m];
                let last = &row.blocks[m + r - 1];
                let mut im = JNode::leaf(
                    first.sbeg,
                    last.send() + 1 - first.sbeg,
                    SENTINEL,
                    NodeKind::Intermediate,
                    (lv - 1) as u32,
                    me,
                );
                im.target = hat.id;
                im.off = (m2 - hat.children.0) as u32;
                im.r = r as u32;
                kids.push(self.nodes.len() as u32);
                self.nodes.push(im);
            }
        }
        self.nodes[me as usize].children = kids;
        me
    }

    fn finish(mut self) -> JigglyTree {
        let top = self.h.top();
        let root = self.make(top, 0, NONE);
        JigglyTree::assemble(self.nodes, root, self.h.n, top as u32)
    }
}

impl JigglyTree {
    /// Resolves links and builds the leftmost map and the lifting forests.
    pub fn assemble(mut nodes: Vec<JNode>, root: u32, n: usize, top_level: u32) -> Self {
        let mut leftmost: HashMap<Id, u32> = HashMap::new();
        for (i, v) in nodes.iter().enumerate() {
            let keep = match v.kind {
                NodeKind::Run | NodeKind::Group => true,
                NodeKind::Letter => leftmost.get(&v.id).is_none_or(|&u| nodes[u as usize].sbeg > v.sbeg),
                _ => false,
            };
            if keep {
                leftmost.insert(v.id, i as u32);
            }
        }
        for v in nodes.iter_mut() {
            if matches!(v.kind, NodeKind::CopyLeaf | NodeKind::Intermediate) {
                v.link = leftmost[&v.target];
            }
        }
        let mut j =
            JigglyTree { nodes, root, n, top_level, leftmost, a_left: Lifting::default(), a_right: Lifting::default() };
        j.build_forests();
        j
    }

    fn build_forests(&mut self) {
        let mut left = vec![NONE; self.nodes.len()];
        let mut right = vec![NONE; self.nodes.len()];
        for v in 0..self.nodes.len() {
            if self.nodes[v].len > 1 {
                let kids = self.h_children_of_node(v as u32);
                left[v] = self.leftmost[&kids[0].id];
                right[v] = self.leftmost[&kids[kids.len() - 1].id];
            }
        }
        self.a_left = Lifting::new(left);
        self.a_right = Lifting::new(right);
    }

    pub fn node(&self, v: u32) -> &JNode {
        &self.nodes[v as usize]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Creation level of an id.
    pub fn creation(&self, id: Id) -> u32 {
        if is_letter(id) {
            0
        } else {
            self.nodes[self.leftmost[&id] as usize].creation
        }
    }

    pub fn id_len(&self, id: Id) -> usize {
        if is_letter(id) {
            1
        } else {
            self.nodes[self.leftmost[&id] as usize].len
        }
    }

    /// Children in the hierarchy of the block represented by `v`, with
    /// offsets relative to `sbeg(v)`.
    pub fn h_children_of_node(&self, v: u32) -> Vec<HChild> {
        let node = self.node(v);
        match node.kind {
            NodeKind::Letter => Vec::new(),
            NodeKind::CopyLeaf => self.h_children_of_node(node.link),
            NodeKind::Run => {
                let c = self.node(node.children[0]);
                vec![HChild { id: c.id, off: 0, len: c.len, count: node.run_count }]
            }
            NodeKind::Group => {
                let mut out = Vec::new();
                for &c in &node.children {
                    let cn = self.node(c);
                    if cn.kind == NodeKind::Intermediate {
                        let shift = cn.sbeg - node.sbeg;
                        out.extend(self.h_children_of_node(c).into_iter().map(|mut h| {
                            h.off += shift;
                            h
                        }));
                    } else {
                        out.push(HChild { id: cn.id, off: cn.sbeg - node.sbeg, len: cn.len, count: 1 });
                    }
                }
                out
            }
            NodeKind::Intermediate => {
                let src = self.h_children_of_node(node.link);
                let lo = node.off as usize;
                let slice = &src[lo..lo + node.r as usize];
                let base = slice[0].off;
                slice.iter().map(|&h| HChild { off: h.off - base, ..h }).collect()
            }
        }
    }

    pub fn h_children(&self, id: Id) -> Vec<HChild> {
        if is_letter(id) {
            return Vec::new();
        }
        self.h_children_of_node(self.leftmost[&id])
    }

    /// Children of `v` in the hierarchy, positioned at `v`'s interval.
    pub fn expand_children(&self, v: u32) -> Result<Vec<(Id, usize, usize, u64)>, Error> {
        let node = self.node(v);
        if node.kind == NodeKind::Letter {
            return Err(Error::NotCovering);
        }
        Ok(self.h_children_of_node(v).into_iter().map(|h| (h.id, node.sbeg + h.off, h.len, h.count)).collect())
    }

    /// Depth of link-following needed to expand an intermediate node.
    pub fn intermediate_depth(&self, v: u32) -> usize {
        let node = self.node(v);
        if node.kind != NodeKind::Intermediate {
            return 0;
        }
        let want = node.off as usize..(node.off + node.r) as usize;
        let mut idx = 0usize;
        let mut deepest = 0;
        for &c in &self.node(node.link).children {
            let cn = self.node(c);
            let count = if cn.kind == NodeKind::Intermediate { cn.r as usize } else { 1 };
            if cn.kind == NodeKind::Intermediate && idx < want.end && want.start < idx + count {
                deepest = deepest.max(self.intermediate_depth(c));
            }
            idx += count;
        }
        deepest + 1
    }

    pub fn letters_of_id(&self, id: Id, out: &mut Vec<Symbol>) {
        if is_letter(id) {
            out.push(id as Symbol);
            return;
        }
        for h in self.h_children(id) {
            for _ in 0..h.count {
                self.letters_of_id(h.id, out);
            }
        }
    }

    pub fn expand_string(&self, v: u32) -> Vec<Symbol> {
        let node = self.node(v);
        let mut out = Vec::with_capacity(node.len);
        match node.kind {
            NodeKind::Letter => out.push(node.id as Symbol),
            _ => {
                for h in self.h_children_of_node(v) {
                    for _ in 0..h.count {
                        self.letters_of_id(h.id, &mut out);
                    }
                }
            }
        }
        out
    }

    /// Farthest ancestor of `v` in `A_L` or `A_R` with length at least `w`.
    pub fn weighted_ancestor(&self, forest: Forest, v: u32, w: usize) -> Option<u32> {
        let lift = match forest {
            Forest::Left => &self.a_left,
            Forest::Right => &self.a_right,
        };
        lift.farthest(v, |u| self.nodes[u as usize].len >= w)
    }

    pub fn view(&self) -> HView<'_> {
        let r = self.node(self.root);
        HView::new(self, r.id, 0, self.n)
    }

    /// Lowest node with `sbeg <= p` and `q <= send`, descending through
    /// children of expanded nodes only.
    pub fn lowest_covering(&self, p: usize, q: usize) -> u32 {
        let mut v = self.root;
        loop {
            let node = self.node(v);
            let i = node.children.partition_point(|&c| self.nodes[c as usize].sbeg <= p);
            if i == 0 {
                return v;
            }
            let c = node.children[i - 1];
            if self.node(c).send() >= q {
                v = c;
            } else {
                return v;
            }
        }
    }
}

/// A block of the emulated hierarchy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VBlock {
    pub id: Id,
    pub sbeg: usize,
    pub len: usize,
}

impl VBlock {
    pub fn send(&self) -> usize {
        self.sbeg + self.len - 1
    }
}

/// Read access to the hierarchy of the text below one block, emulated
/// through the leftmost blocks of the jiggly tree.
pub struct HView<'a> {
    pub j: &'a JigglyTree,
    root: VBlock,
    cache: RefCell<HashMap<Id, Rc<Vec<HChild>>>>,
    /// Number of child expansions performed, for instrumentation.
    pub expansions: RefCell<usize>,
}

impl<'a> HView<'a> {
    pub fn new(j: &'a JigglyTree, id: Id, sbeg: usize, len: usize) -> Self {
        HView { j, root: VBlock { id, sbeg, len }, cache: RefCell::new(HashMap::new()), expansions: RefCell::new(0) }
    }

    pub fn root(&self) -> VBlock {
        self.root
    }

    fn children(&self, id: Id) -> Rc<Vec<HChild>> {
        if let Some(c) = self.cache.borrow().get(&id) {
            return c.clone();
        }
        *self.expansions.borrow_mut() += 1;
        let c = Rc::new(self.j.h_children(id));
        self.cache.borrow_mut().insert(id, c.clone());
        c
    }

    /// The block on `level` that contains `pos`. Levels above the root's
    /// chain return the root itself.
    pub fn block_at(&self, level: u32, pos: usize) -> VBlock {
        debug_assert!(pos >= self.root.sbeg && pos <= self.root.send());
        let j = self.j;
        let mut cur = self.root;
        loop {
            let c = j.creation(cur.id);
            if level >= c {
                return cur;
            }
            let kids = self.children(cur.id);
            let first = kids[0];
            let last = kids[kids.len() - 1];
            let rel = pos - cur.sbeg;
            if rel < first.len && kids.len() > 1 {
                cur = self.skip(Forest::Left, cur, pos, level);
                if j.creation(cur.id) <= level {
                    return cur;
                }
                let kids = self.children(cur.id);
                cur = pick(&kids, cur, pos);
            } else if rel >= cur.len - last.len && kids.len() > 1 {
                cur = self.skip(Forest::Right, cur, pos, level);
                if j.creation(cur.id) <= level {
                    return cur;
                }
                let kids = self.children(cur.id);
                cur = pick(&kids, cur, pos);
            } else {
                cur = pick(&kids, cur, pos);
            }
        }
    }

    /// Follows the chain of first (or last) children of `cur` that still
    /// contain `pos` and lie above `level`, using the lifting tables.
    fn skip(&self, forest: Forest, cur: VBlock, pos: usize, level: u32) -> VBlock {
        let j = self.j;
        let v = j.leftmost[&cur.id];
        let w = match forest {
            Forest::Left => pos - cur.sbeg + 1,
            Forest::Right => cur.send() - pos + 1,
        };
        let lift = match forest {
            Forest::Left => &j.a_left,
            Forest::Right => &j.a_right,
        };
        let ok = |u: u32| {
            let n = &j.nodes[u as usize];
            n.len >= w && n.creation > level
        };
        let mut u = lift.farthest(v, ok).unwrap_or(v);
        let p = lift.parent(u);
        if p != NONE && j.nodes[p as usize].len >= w {
            u = p;
        }
        let n = &j.nodes[u as usize];
        let sbeg = match forest {
            Forest::Left => cur.sbeg,
            Forest::Right => cur.send() + 1 - n.len,
        };
        VBlock { id: n.id, sbeg, len: n.len }
    }

    /// Letter at text position `pos`.
    pub fn letter_at(&self, pos: usize) -> Symbol {
        self.block_at(0, pos).id as Symbol
    }
}

fn pick(kids: &[HChild], cur: VBlock, pos: usize) -> VBlock {
    let rel = pos - cur.sbeg;
    let i = kids.partition_point(|h| h.off <= rel) - 1;
    let h = kids[i];
    let k = (rel - h.off) / h.len;
    VBlock { id: h.id, sbeg: cur.sbeg + h.off + k * h.len, len: h.len }
}
