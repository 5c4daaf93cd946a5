mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use jbt::tries::*;
use proptest::prelude::*;
use rand::Rng;

fn build(keys: &Vec<Vec<u64>>) -> (Trie, Vec<u32>) {
    let mut t = Trie::new();
    let nodes = (0..keys.len() as u32).map(|k| t.insert(keys, k)).collect();
    (t, nodes)
}

fn spell(t: &Trie, keys: &[Vec<u64>], v: u32) -> Vec<u64> {
    let n = t.node(v);
    if v == ROOT {
        return Vec::new();
    }
    keys[n.key as usize][..n.depth].to_vec()
}

fn terminal_keys(t: &Trie, keys: &[Vec<u64>]) -> BTreeSet<Vec<u64>> {
    let mut out = BTreeSet::new();
    let mut stack = vec![ROOT];
    while let Some(v) = stack.pop() {
        for &k in &t.node(v).terminal {
            assert_eq!(keys[k as usize], spell(t, keys, v));
            out.insert(keys[k as usize].clone());
        }
        stack.extend(t.node(v).children.values());
    }
    out
}

#[test]
fn first_insert_makes_one_leaf() {
    let keys = vec![vec![4u64, 5, 6]];
    let (t, nodes) = build(&keys);
    assert_eq!(t.len(), 2);
    assert_eq!(t.node(nodes[0]).depth, 3);
    assert_eq!(t.node(nodes[0]).parent, ROOT);
}

#[test]
fn reinsert_is_idempotent() {
    let keys = vec![vec![1u64, 2, 3], vec![1, 2, 4], vec![1, 2, 3]];
    let mut t = Trie::new();
    let a = t.insert(&keys, 0);
    t.insert(&keys, 1);
    let size = t.len();
    assert_eq!(t.insert(&keys, 2), a);
    assert_eq!(t.len(), size);
}

#[test]
fn random_keys_round_trip() {
    let mut r = rng(1);
    let keys: Vec<Vec<u64>> =
        (0..10_000).map(|_| (0..r.gen_range(1..12)).map(|_| r.gen_range(0..4)).collect()).collect();
    let (t, nodes) = build(&keys);
    let want: BTreeSet<Vec<u64>> = keys.iter().cloned().collect();
    assert_eq!(terminal_keys(&t, &keys), want);
    for (k, &v) in nodes.iter().enumerate() {
        assert_eq!(spell(&t, &keys, v), keys[k]);
    }
}

#[test]
fn descend_exact_and_mid_edge() {
    let keys = vec![vec![1u64, 2, 3, 4, 5], vec![1, 2, 9]];
    let (t, nodes) = build(&keys);
    let q = &keys[0];
    let l = t.descend_blind(&|i| q[i], 5).unwrap();
    assert_eq!(l, Locus { node: nodes[0], depth: 5 });
    let l = t.descend_blind(&|i| q[i], 4).unwrap();
    assert_eq!(l, Locus { node: nodes[0], depth: 4 });
    assert_eq!(t.node(t.node(nodes[0]).parent).depth, 2);
}

#[test]
fn blind_descent_false_accept_is_rejected() {
    let keys = vec![vec![1u64, 2, 3, 4, 5], vec![1, 7, 9]];
    let (t, _) = build(&keys);
    let q = [1u64, 2, 8, 8, 5];
    assert!(t.descend_blind(&|i| q[i], 5).is_some());
    assert!(t.walk(&keys, &|i| q[i], 5).is_none());
    let verify = |l: Locus| (0..l.depth).all(|i| keys[t.node(l.node).key as usize][i] == q[i]);
    assert!(t.descend(&|i| q[i], 5, &verify).is_none());
}

#[test]
fn random_mismatches_never_accepted() {
    let mut r = rng(2);
    let keys: Vec<Vec<u64>> = (0..500).map(|_| (0..r.gen_range(1..20)).map(|_| r.gen_range(0..3)).collect()).collect();
    let (t, _) = build(&keys);
    let set: BTreeSet<Vec<u64>> = keys.iter().flat_map(|k| (0..=k.len()).map(move |l| k[..l].to_vec())).collect();
    for _ in 0..5000 {
        let q: Vec<u64> = (0..r.gen_range(1..20)).map(|_| r.gen_range(0..3)).collect();
        let verify = |l: Locus| (0..l.depth).all(|i| keys[t.node(l.node).key as usize][i] == q[i]);
        let got = t.descend(&|i| q[i], q.len(), &verify);
        assert_eq!(got.is_some(), set.contains(&q));
        assert_eq!(got, t.walk(&keys, &|i| q[i], q.len()));
    }
}

#[test]
fn fattest_numbers() {
    assert_eq!(fattest(4, 7), 6);
    assert_eq!(fattest(0, 7), 4);
    assert_eq!(fattest(3, 4), 4);
    assert_eq!(fattest(0, 1), 1);
    assert_eq!(fattest(5, 6), 6);
    for a in 0..64usize {
        for b in a + 1..80 {
            let f = fattest(a, b);
            let tz = |x: usize| x.trailing_zeros();
            assert!(a < f && f <= b);
            assert!((a + 1..=b).all(|x| tz(x) <= tz(f)));
        }
    }
}

fn exact_key(q: &[u64], l: usize) -> FpKey {
    q[..l].iter().map(|&u| (u, 1)).collect()
}

#[test]
fn zfast_matches_plain_walk() {
    let mut r = rng(3);
    for _ in 0..10 {
        let s: Vec<u64> = (0..400).map(|_| r.gen_range(0..3)).collect();
        let keys: Vec<Vec<u64>> = (0..s.len()).map(|i| s[i..(i + r.gen_range(1..40)).min(s.len())].to_vec()).collect();
        let (t, _) = build(&keys);
        let zf = ZFast::build(&t, &mut |v, h| exact_key(&keys[t.node(v).key as usize], h));
        for v in 1..t.len() as u32 {
            let n = t.node(v);
            let h = fattest(t.node(n.parent).depth, n.depth);
            assert_eq!(zf.tf.get(&exact_key(&keys[n.key as usize], h)), Some(v));
        }
        let pat: Vec<u64> = (0..60).map(|_| r.gen_range(0..3)).collect();
        for i in 0..pat.len() {
            let q = &pat[i..];
            for len in 0..=q.len() {
                let want = t.walk(&keys, &|x| q[x], len);
                let got = zf.locate(&t, len, &mut |l| exact_key(q, l), &mut |x| q[x], &mut |l| {
                    (0..l.depth).all(|x| keys[t.node(l.node).key as usize][x] == q[x])
                });
                assert_eq!(got, want, "len {len}");
            }
        }
    }
}

#[test]
fn zfast_absent_first_unit_fails() {
    let keys = vec![vec![1u64, 2], vec![1, 3]];
    let (t, _) = build(&keys);
    let zf = ZFast::build(&t, &mut |v, h| exact_key(&keys[t.node(v).key as usize], h));
    let q = [9u64, 9];
    assert!(zf.locate(&t, 2, &mut |l| exact_key(&q, l), &mut |x| q[x], &mut |_| true).is_none());
}

#[test]
fn intervals_require_finalize() {
    let keys = vec![vec![1u64]];
    let (mut t, nodes) = build(&keys);
    assert!(t.inorder_interval(ROOT).is_err());
    t.finalize();
    assert_eq!(t.inorder_interval(ROOT).unwrap(), (0, t.len() as u32 - 1));
    assert_eq!(t.inorder_interval(nodes[0]).unwrap(), (1, 1));
}

#[test]
fn intervals_match_dfs_renumbering() {
    let mut r = rng(4);
    let keys: Vec<Vec<u64>> = (0..2000).map(|_| (0..r.gen_range(1..10)).map(|_| r.gen_range(0..5)).collect()).collect();
    let (mut t, _) = build(&keys);
    t.finalize();
    fn dfs(t: &Trie, v: u32, next: &mut u32, out: &mut BTreeMap<u32, (u32, u32)>) {
        let lo = *next;
        *next += 1;
        for &c in t.node(v).children.values() {
            dfs(t, c, next, out);
        }
        out.insert(v, (lo, *next - 1));
    }
    let mut want = BTreeMap::new();
    dfs(&t, ROOT, &mut 0, &mut want);
    for v in 0..t.len() as u32 {
        assert_eq!(t.inorder_interval(v).unwrap(), want[&v]);
    }
    let order = t.order();
    for w in order.windows(2) {
        assert!(spell(&t, &keys, w[0]) < spell(&t, &keys, w[1]));
    }
    for leaf in (0..t.len() as u32).filter(|&v| t.node(v).children.is_empty()) {
        let (a, b) = t.inorder_interval(leaf).unwrap();
        assert_eq!(a, b);
    }
}

proptest! {
    #[test]
    fn explicit_trie_is_a_map(ops in prop::collection::vec((prop::collection::vec(0u8..3, 0..8), 0u32..100), 0..200)) {
        let mut t: ExplicitTrie<u8, u32> = ExplicitTrie::new();
        let mut m = BTreeMap::new();
        for (k, v) in &ops {
            prop_assert_eq!(t.insert(k, *v), m.insert(k.clone(), *v));
        }
        for (k, _) in &ops {
            prop_assert_eq!(t.get(k), m.get(k).copied());
            let mut k2 = k.clone();
            k2.push(7);
            prop_assert_eq!(t.get(&k2), None);
        }
        let entries: Vec<(Vec<u8>, u32)> = m.into_iter().collect();
        prop_assert_eq!(t.entries(), entries);
    }

    #[test]
    fn laminar_intervals(keys in prop::collection::vec(prop::collection::vec(0u64..3, 1..8), 1..60)) {
        let (mut t, _) = build(&keys);
        t.finalize();
        for u in 0..t.len() as u32 {
            for v in 0..t.len() as u32 {
                let (a, b) = t.inorder_interval(u).unwrap();
                let (c, d) = t.inorder_interval(v).unwrap();
                prop_assert!(b < c || d < a || (a <= c && d <= b) || (c <= a && b <= d));
            }
        }
    }
}
