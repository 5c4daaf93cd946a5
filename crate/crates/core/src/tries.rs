//! Compacted tries with implicit edge labels, explicit-label tries, and the
//! z-fast handle index over fingerprint keys.

use std::collections::BTreeMap;

use crate::Error;

/// Access to the units of stored keys; edges keep only lengths and a
/// reference to a key that spells them.
pub trait KeySource {
    fn unit(&self, key: u32, i: usize) -> u64;
    fn key_len(&self, key: u32) -> usize;

    /// First index in `[from, stop)` where keys `a` and `b` differ, or `stop`.
    fn common(&self, a: u32, b: u32, from: usize, stop: usize) -> usize {
        (from..stop).find(|&i| self.unit(a, i) != self.unit(b, i)).unwrap_or(stop)
    }
}

impl<T: AsRef<[u64]>> KeySource for Vec<T> {
    fn unit(&self, key: u32, i: usize) -> u64 {
        self[key as usize].as_ref()[i]
    }

    fn key_len(&self, key: u32) -> usize {
        self[key as usize].as_ref().len()
    }
}

#[derive(Clone, Debug)]
pub struct TrieNode {
    pub parent: u32,
    pub depth: usize,
    pub children: BTreeMap<u64, u32>,
    /// A stored key whose prefix of length `depth` spells this node.
    pub key: u32,
    /// Keys ending exactly here.
    pub terminal: Vec<u32>,
}

/// Point on a trie: the lower node of the edge and the consumed length.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Locus {
    pub node: u32,
    pub depth: usize,
}

pub const ROOT: u32 = 0;
const NIL: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct Trie {
    pub nodes: Vec<TrieNode>,
    pre: Vec<u32>,
    last: Vec<u32>,
    order: Vec<u32>,
}

impl Default for Trie {
    fn default() -> Self {
        Self::new()
    }
}

impl Trie {
    pub fn new() -> Self {
        let root = TrieNode { parent: NIL, depth: 0, children: BTreeMap::new(), key: NIL, terminal: Vec::new() };
        Trie { nodes: vec![root], pre: Vec::new(), last: Vec::new(), order: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.len() == 1
    }

    pub fn node(&self, v: u32) -> &TrieNode {
        &self.nodes[v as usize]
    }

    fn add(&mut self, parent: u32, depth: usize, key: u32) -> u32 {
        let v = self.nodes.len() as u32;
        self.nodes.push(TrieNode { parent, depth, children: BTreeMap::new(), key, terminal: Vec::new() });
        v
    }

    /// Inserts stored key `key` and returns its node.
    pub fn insert(&mut self, src: &dyn KeySource, key: u32) -> u32 {
        self.pre.clear();
        let len = src.key_len(key);
        let mut v = ROOT;
        loop {
            let d = self.nodes[v as usize].depth;
            if d == len {
                self.nodes[v as usize].terminal.push(key);
                return v;
            }
            let c = src.unit(key, d);
            let Some(&w) = self.nodes[v as usize].children.get(&c) else {
                let leaf = self.add(v, len, key);
                self.nodes[leaf as usize].terminal.push(key);
                self.nodes[v as usize].children.insert(c, leaf);
                return leaf;
            };
            let (wd, wk) = (self.nodes[w as usize].depth, self.nodes[w as usize].key);
            let stop = wd.min(len);
            let i = src.common(wk, key, d + 1, stop.max(d + 1));
            if i == wd {
                v = w;
                continue;
            }
            let mid = self.add(v, i, wk);
            self.nodes[v as usize].children.insert(c, mid);
            self.nodes[mid as usize].children.insert(src.unit(wk, i), w);
            self.nodes[w as usize].parent = mid;
            if i == len {
                self.nodes[mid as usize].terminal.push(key);
                return mid;
            }
            let leaf = self.add(mid, len, key);
            self.nodes[leaf as usize].terminal.push(key);
            self.nodes[mid as usize].children.insert(src.unit(key, i), leaf);
            return leaf;
        }
    }

    /// Descent that reads only the first unit of each edge. The result is a
    /// candidate locus of length `len` that the caller must verify.
    pub fn descend_blind(&self, unit: &dyn Fn(usize) -> u64, len: usize) -> Option<Locus> {
        let mut v = ROOT;
        loop {
            let n = &self.nodes[v as usize];
            if n.depth >= len {
                return Some(Locus { node: v, depth: len });
            }
            v = *n.children.get(&unit(n.depth))?;
        }
    }

    /// Blind descent followed by `verify(locus)`.
    pub fn descend(&self, unit: &dyn Fn(usize) -> u64, len: usize, verify: &dyn Fn(Locus) -> bool) -> Option<Locus> {
        self.descend_blind(unit, len).filter(|&l| verify(l))
    }

    /// Descent comparing every unit against the stored labels.
    pub fn walk(&self, src: &dyn KeySource, unit: &dyn Fn(usize) -> u64, len: usize) -> Option<Locus> {
        let l = self.descend_blind(unit, len)?;
        let k = self.nodes[l.node as usize].key;
        (0..len).all(|i| src.unit(k, i) == unit(i)).then_some(l)
    }

    /// Assigns preorder numbers in lexicographic child order.
    pub fn finalize(&mut self) {
        let n = self.nodes.len();
        self.pre = vec![0; n];
        self.last = vec![0; n];
        self.order = Vec::with_capacity(n);
        let mut stack = vec![(ROOT, false)];
        while let Some((v, done)) = stack.pop() {
            if done {
                self.last[v as usize] = self.order.len() as u32 - 1;
                continue;
            }
            self.pre[v as usize] = self.order.len() as u32;
            self.order.push(v);
            stack.push((v, true));
            for &c in self.nodes[v as usize].children.values().rev() {
                stack.push((c, false));
            }
        }
    }

    pub fn is_finalized(&self) -> bool {
        self.pre.len() == self.nodes.len()
    }

    pub fn preorder(&self, v: u32) -> Result<u32, Error> {
        self.pre.get(v as usize).copied().ok_or(Error::NotFinalized)
    }

    /// Interval of preorder numbers of the subtree at `v`.
    pub fn inorder_interval(&self, v: u32) -> Result<(u32, u32), Error> {
        if !self.is_finalized() {
            return Err(Error::NotFinalized);
        }
        Ok((self.pre[v as usize], self.last[v as usize]))
    }

    /// Nodes in preorder.
    pub fn order(&self) -> &[u32] {
        &self.order
    }
}

/// Compacted trie with labels stored on the edges.
#[derive(Clone, Debug)]
pub struct ExplicitTrie<U: Ord + Copy, V: Copy> {
    nodes: Vec<ENode<U, V>>,
}

#[derive(Clone, Debug)]
struct ENode<U, V> {
    label: Vec<U>,
    children: BTreeMap<U, u32>,
    value: Option<V>,
}

impl<U: Ord + Copy, V: Copy> Default for ExplicitTrie<U, V> {
    fn default() -> Self {
        Self::new()
    }
}

impl<U: Ord + Copy, V: Copy> ExplicitTrie<U, V> {
    pub fn new() -> Self {
        ExplicitTrie { nodes: vec![ENode { label: Vec::new(), children: BTreeMap::new(), value: None }] }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Sets the value of `key`, returning the previous one.
    pub fn insert(&mut self, key: &[U], value: V) -> Option<V> {
        let mut v = 0usize;
        let mut i = 0;
        loop {
            if i == key.len() {
                return self.nodes[v].value.replace(value);
            }
            let Some(&w) = self.nodes[v].children.get(&key[i]) else {
                let leaf = self.nodes.len() as u32;
                self.nodes.push(ENode { label: key[i..].to_vec(), children: BTreeMap::new(), value: Some(value) });
                self.nodes[v].children.insert(key[i], leaf);
                return None;
            };
            let w = w as usize;
            let lab = &self.nodes[w].label;
            let mut t = 0;
            while t < lab.len() && i + t < key.len() && lab[t] == key[i + t] {
                t += 1;
            }
            if t == lab.len() {
                v = w;
                i += t;
                continue;
            }
            let rest = self.nodes[w].label.split_off(t);
            let mid = self.nodes.len() as u32;
            let head = std::mem::take(&mut self.nodes[w].label);
            self.nodes[w].label = rest;
            let mut children = BTreeMap::new();
            children.insert(self.nodes[w].label[0], w as u32);
            self.nodes.push(ENode { label: head, children, value: None });
            self.nodes[v].children.insert(key[i], mid);
            v = mid as usize;
            i += t;
        }
    }

    pub fn get(&self, key: &[U]) -> Option<V> {
        let mut v = 0usize;
        let mut i = 0;
        while i < key.len() {
            let w = *self.nodes[v].children.get(&key[i])? as usize;
            let lab = &self.nodes[w].label;
            if key.len() - i < lab.len() || key[i..i + lab.len()] != lab[..] {
                return None;
            }
            i += lab.len();
            v = w;
        }
        self.nodes[v].value
    }

    /// All `(key, value)` pairs in lexicographic order.
    pub fn entries(&self) -> Vec<(Vec<U>, V)> {
        let mut out = Vec::new();
        let mut stack = vec![(0usize, Vec::new())];
        while let Some((v, mut path)) = stack.pop() {
            path.extend_from_slice(&self.nodes[v].label);
            if let Some(x) = self.nodes[v].value {
                out.push((path.clone(), x));
            }
            for &c in self.nodes[v].children.values().rev() {
                stack.push((c as usize, path.clone()));
            }
        }
        out
    }
}

/// The 2-fattest number in `(a, b]`; requires `a < b`.
pub fn fattest(a: usize, b: usize) -> usize {
    debug_assert!(a < b);
    let hb = usize::BITS - 1 - (a ^ b).leading_zeros();
    (b >> hb) << hb
}

pub type FpKey = Vec<(u64, u64)>;

/// Handle index: fingerprint of each node's handle prefix maps to the node.
#[derive(Clone, Debug, Default)]
pub struct ZFast {
    pub tf: ExplicitTrie<(u64, u64), u32>,
}

impl ZFast {
    /// `handle_key(v, h)` returns the fingerprint key of `str(v)[..h]`.
    pub fn build(trie: &Trie, handle_key: &mut dyn FnMut(u32, usize) -> FpKey) -> Self {
        let mut tf = ExplicitTrie::new();
        for v in 1..trie.len() as u32 {
            let n = trie.node(v);
            let h = fattest(trie.node(n.parent).depth, n.depth);
            tf.insert(&handle_key(v, h), v);
        }
        ZFast { tf }
    }

    /// Locus of the query prefix of length `len`. `fp(l)` gives the key of
    /// the query prefix of length `l`, `unit(i)` its `i`-th unit, and
    /// `verify` confirms a candidate locus.
    pub fn locate(
        &self,
        trie: &Trie,
        len: usize,
        fp: &mut dyn FnMut(usize) -> FpKey,
        unit: &mut dyn FnMut(usize) -> u64,
        verify: &mut dyn FnMut(Locus) -> bool,
    ) -> Option<Locus> {
        if len == 0 {
            return Some(Locus { node: ROOT, depth: 0 });
        }
        let (mut a, mut b) = (0usize, len);
        let mut cand = ROOT;
        let mut below = None;
        while a < b {
            let f = fattest(a, b);
            match self.tf.get(&fp(f)) {
                Some(x) if trie.node(trie.node(x).parent).depth < f && f <= trie.node(x).depth => {
                    let d = trie.node(x).depth;
                    if d <= len {
                        cand = x;
                        a = d;
                    } else {
                        cand = trie.node(x).parent;
                        below = Some(x);
                        break;
                    }
                }
                _ => b = f - 1,
            }
        }
        let node = match below {
            Some(x) => x,
            None => {
                let n = trie.node(cand);
                if n.depth == len {
                    cand
                } else {
                    *n.children.get(&unit(n.depth))?
                }
            }
        };
        if trie.node(node).depth < len {
            return None;
        }
        let l = Locus { node, depth: len };
        verify(l).then_some(l)
    }
}
