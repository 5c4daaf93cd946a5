//! The finalized, read-only index: the jiggly tree plus the tries, the pair
//! set `R`, reversed links and the per-letter leaf lists used by queries.

use std::collections::{BTreeMap, HashMap};

use crate::dict::Dict;
use crate::fingerprint::fin;
use crate::geom::{Point, StaticPairSet};
use crate::hierarchy::build_hierarchy;
use crate::jiggly::{build_jiggly, HView, JigglyTree, NodeKind, NONE};
use crate::tries::{FpKey, KeySource, Trie, ZFast};
use crate::{Error, Id, Symbol};

/// One point of `R`: a split of the leftmost node `node` at text position
/// `split`. Runs carry their child length as `period`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pair {
    pub node: u32,
    pub split: usize,
    pub period: usize,
}

/// Keys of the forward trie are `s[pos..pos+len)`; keys of the reversed trie
/// are `s[end-len..end)` read right to left.
struct TextKeys<'a> {
    s: &'a [Symbol],
    keys: &'a [(usize, usize)],
    reversed: bool,
}

impl KeySource for TextKeys<'_> {
    fn unit(&self, key: u32, i: usize) -> u64 {
        let (a, _) = self.keys[key as usize];
        if self.reversed {
            self.s[a - 1 - i] as u64
        } else {
            self.s[a + i] as u64
        }
    }

    fn key_len(&self, key: u32) -> usize {
        self.keys[key as usize].1
    }

    fn common(&self, a: u32, b: u32, from: usize, stop: usize) -> usize {
        let (pa, _) = self.keys[a as usize];
        let (pb, _) = self.keys[b as usize];
        let n = stop.saturating_sub(from);
        let d = if self.reversed {
            let x = &self.s[pa - from - n..pa - from];
            let y = &self.s[pb - from - n..pb - from];
            x.iter().rev().zip(y.iter().rev()).take_while(|(u, v)| u == v).count()
        } else {
            let x = &self.s[pa + from..pa + from + n];
            let y = &self.s[pb + from..pb + from + n];
            x.iter().zip(y).take_while(|(u, v)| u == v).count()
        };
        from + d
    }
}

#[derive(Debug)]
pub struct Index {
    pub j: JigglyTree,
    pub deterministic: bool,
    /// Hierarchy children ids of each leftmost group, keyed in `tid`.
    group_seqs: Vec<Vec<Id>>,
    group_ids: Vec<Id>,
    tid: Trie,
    runs: Dict<(Id, u64), Id>,
    pub(crate) t_fwd: Trie,
    pub(crate) fwd_keys: Vec<(usize, usize)>,
    pub(crate) zf_fwd: ZFast,
    pub(crate) t_rev: Trie,
    pub(crate) rev_keys: Vec<(usize, usize)>,
    pub(crate) zf_rev: ZFast,
    pub(crate) r: StaticPairSet,
    pub(crate) pairs: Vec<Pair>,
    /// Copy leaves per linked node.
    pub(crate) copy_refs: HashMap<u32, Vec<u32>>,
    /// Per linked node: `(lo, hi, w)` where intermediate `w` copies
    /// `s[lo..hi)`.
    pub(crate) inter_refs: HashMap<u32, Vec<(usize, usize, u32)>>,
    /// Nearest marked ancestor of each node, itself included.
    pub(crate) marked_up: Vec<u32>,
    pub(crate) letter_leaves: BTreeMap<Symbol, Vec<u32>>,
}

impl Index {
    /// Offline pipeline: hierarchy, jiggly tree, finalization.
    pub fn build(s: &[Symbol], deterministic: bool) -> Result<Self, Error> {
        let h = build_hierarchy(s, deterministic)?;
        Ok(Self::from_jiggly(build_jiggly(&h), deterministic))
    }

    pub fn from_bytes(s: &[u8], deterministic: bool) -> Result<Self, Error> {
        let v: Vec<Symbol> = s.iter().map(|&b| b as Symbol).collect();
        Self::build(&v, deterministic)
    }

    pub fn n(&self) -> usize {
        self.j.n
    }

    pub fn size(&self) -> usize {
        self.j.len()
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    /// Builds every query structure from a finished jiggly tree.
    pub fn from_jiggly(j: JigglyTree, deterministic: bool) -> Self {
        let s = j.expand_string(j.root);
        let mut group_seqs = Vec::new();
        let mut group_ids = Vec::new();
        let mut runs = Dict::new(deterministic);
        let mut fwd_keys = Vec::new();
        let mut rev_keys = Vec::new();
        let mut pairs = Vec::new();
        let mut copy_refs: HashMap<u32, Vec<u32>> = HashMap::new();
        let mut inter_refs: HashMap<u32, Vec<(usize, usize, u32)>> = HashMap::new();
        let mut letter_leaves: BTreeMap<Symbol, Vec<u32>> = BTreeMap::new();
        for v in 0..j.len() as u32 {
            let node = j.node(v);
            match node.kind {
                NodeKind::Letter => letter_leaves.entry(node.id as Symbol).or_default().push(v),
                NodeKind::CopyLeaf => copy_refs.entry(node.link).or_default().push(v),
                NodeKind::Intermediate => {
                    let hc = j.h_children_of_node(node.link);
                    let t = j.node(node.link).sbeg;
                    let a = &hc[node.off as usize];
                    let b = &hc[(node.off + node.r) as usize - 1];
                    inter_refs.entry(node.link).or_default().push((t + a.off, t + b.off + b.len * b.count as usize, v));
                }
                NodeKind::Run => {
                    let hc = j.h_children_of_node(v);
                    runs.insert((hc[0].id, node.run_count), node.id);
                    let l = hc[0].len;
                    let split = node.sbeg + (node.run_count as usize - 1) * l;
                    fwd_keys.push((split, l));
                    rev_keys.push((split, split - node.sbeg));
                    pairs.push(Pair { node: v, split, period: l });
                }
                NodeKind::Group => {
                    group_seqs.push(j.h_children_of_node(v).iter().map(|h| h.id).collect());
                    group_ids.push(node.id);
                    let end = node.sbeg + node.len;
                    for &c in &node.children[1..] {
                        let split = j.node(c).sbeg;
                        fwd_keys.push((split, end - split));
                        rev_keys.push((split, split - node.sbeg));
                        pairs.push(Pair { node: v, split, period: 0 });
                    }
                }
            }
        }

        let mut tid = Trie::new();
        for k in 0..group_seqs.len() as u32 {
            tid.insert(&group_seqs, k);
        }

        let build_trie = |keys: &[(usize, usize)], reversed: bool| {
            let src = TextKeys { s: &s, keys, reversed };
            let mut t = Trie::new();
            let nodes: Vec<u32> = (0..keys.len() as u32).map(|k| t.insert(&src, k)).collect();
            t.finalize();
            (t, nodes)
        };
        let (t_fwd, fwd_nodes) = build_trie(&fwd_keys, false);
        let (t_rev, rev_nodes) = build_trie(&rev_keys, true);
        let points = (0..pairs.len())
            .map(|i| Point {
                x: t_fwd.preorder(fwd_nodes[i]).expect("finalized"),
                y: t_rev.preorder(rev_nodes[i]).expect("finalized"),
                payload: i as u64,
            })
            .collect();
        let r = StaticPairSet::build(points);

        let view = j.view();
        let zf_fwd = ZFast::build(&t_fwd, &mut |v, h| {
            let (pos, _) = fwd_keys[t_fwd.node(v).key as usize];
            text_key(&view, pos, pos + h)
        });
        let zf_rev = ZFast::build(&t_rev, &mut |v, h| {
            let (end, _) = rev_keys[t_rev.node(v).key as usize];
            text_key(&view, end - h, end)
        });

        let mut marked_up = vec![NONE; j.len()];
        let mut stack = vec![j.root];
        while let Some(v) = stack.pop() {
            let node = j.node(v);
            let marked = node.kind == NodeKind::Run || copy_refs.contains_key(&v) || inter_refs.contains_key(&v);
            marked_up[v as usize] = if marked {
                v
            } else if node.parent == NONE {
                NONE
            } else {
                marked_up[node.parent as usize]
            };
            stack.extend(node.children.iter().copied());
        }

        Index {
            j,
            deterministic,
            group_seqs,
            group_ids,
            tid,
            runs,
            t_fwd,
            fwd_keys,
            zf_fwd,
            t_rev,
            rev_keys,
            zf_rev,
            r,
            pairs,
            copy_refs,
            inter_refs,
            marked_up,
            letter_leaves,
        }
    }

    /// Id of the group whose hierarchy children are `seq`, if the text has one.
    pub fn group_id(&self, seq: &[Id]) -> Option<Id> {
        let l = self.tid.walk(&self.group_seqs, &|i| seq[i], seq.len())?;
        let node = self.tid.node(l.node);
        if node.depth != seq.len() {
            return None;
        }
        node.terminal.first().map(|&k| self.group_ids[k as usize])
    }

    /// Id of the run `<base, count>`, if the text has one.
    pub fn run_id(&self, base: Id, count: u64) -> Option<Id> {
        self.runs.get(&(base, count)).copied()
    }

    /// Letter nodes of `c` in the jiggly tree.
    pub fn letter_leaves(&self, c: Symbol) -> &[u32] {
        self.letter_leaves.get(&c).map_or(&[], |v| v.as_slice())
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }
}

/// Fingerprint key of `s[p..q)` read from the root view.
pub(crate) fn text_key(view: &HView<'_>, p: usize, q: usize) -> FpKey {
    fin(view, p, q).key()
}
