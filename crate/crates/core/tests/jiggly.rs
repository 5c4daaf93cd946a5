mod common;

use std::collections::HashMap;

use common::*;
use jbt::hierarchy::{build_hierarchy, letter_row, Hierarchy, Kind};
use jbt::jiggly::*;
use proptest::prelude::*;
use rand::Rng;

fn tree(s: &[u32]) -> (Hierarchy, JigglyTree) {
    let h = build_hierarchy(s, true).unwrap();
    let j = build_jiggly(&h);
    (h, j)
}

fn check_structure(s: &[u32], h: &Hierarchy, j: &JigglyTree) {
    let mut lefts: HashMap<u64, usize> = HashMap::new();
    for row in &h.rows {
        for b in &row.blocks {
            let e = lefts.entry(b.id).or_insert(b.sbeg);
            *e = (*e).min(b.sbeg);
        }
    }
    for (v, node) in j.nodes.iter().enumerate() {
        let v = v as u32;
        assert_eq!(j.expand_string(v), s[node.sbeg..=node.send()].to_vec(), "node {v}");
        match node.kind {
            NodeKind::Intermediate => {
                assert!(node.children.is_empty());
                assert!(node.r > 1);
                assert!(j.node(node.link).has_children());
                let depth = j.intermediate_depth(v);
                assert!(depth <= (31 - node.r.leading_zeros()) as usize + 1);
            }
            NodeKind::CopyLeaf => {
                assert!(node.children.is_empty());
                let t = j.node(node.link);
                assert!(t.has_children() && t.id == node.id && t.sbeg < node.sbeg);
            }
            NodeKind::Run => {
                assert_eq!(node.children.len(), 1);
                let c = j.node(node.children[0]);
                assert_eq!(node.len, c.len * node.run_count as usize);
            }
            NodeKind::Group => {
                let mut pos = node.sbeg;
                for &c in &node.children {
                    assert_eq!(j.node(c).sbeg, pos);
                    assert_eq!(j.node(c).parent, v);
                    pos += j.node(c).len;
                }
                assert_eq!(pos, node.send() + 1);
            }
            NodeKind::Letter => assert_eq!(node.len, 1),
        }
        if node.kind != NodeKind::Letter && node.kind != NodeKind::Intermediate {
            let row = &h.rows[node.creation as usize];
            let b = &row.blocks[row.block_at(node.sbeg)];
            assert_eq!((b.sbeg, b.id), (node.sbeg, node.id));
            assert_ne!(b.kind, Kind::Copy);
            let want: Vec<(u64, usize, usize)> = h.rows[node.creation as usize - 1].blocks[b.children.0..b.children.1]
                .iter()
                .map(|c| (c.id, c.sbeg, c.len))
                .collect();
            let mut got = Vec::new();
            for (id, sbeg, len, count) in j.expand_children(v).unwrap() {
                for c in 0..count as usize {
                    got.push((id, sbeg + c * len, len));
                }
            }
            assert_eq!(got, want);
        }
    }
    for (id, &sbeg) in &lefts {
        if jbt::is_letter(*id) {
            continue;
        }
        let len = j.id_len(*id);
        if len > 1 {
            let v = j.leftmost[id];
            assert!(j.node(v).has_children());
            assert_eq!(j.node(v).sbeg, sbeg);
        }
    }
}

fn check_view(h: &Hierarchy, j: &JigglyTree) {
    let view = j.view();
    for row in &h.rows {
        for b in &row.blocks {
            for pos in [b.sbeg, b.send(), (b.sbeg + b.send()) / 2] {
                let got = view.block_at(row.level, pos);
                assert_eq!((got.id, got.sbeg, got.len), (b.id, b.sbeg, b.len), "level {} pos {pos}", row.level);
            }
        }
    }
}

#[test]
fn abab_second_group_is_copy() {
    let s = bytes("xabab");
    let (h, j) = tree(&s);
    check_structure(&s, &h, &j);
    let s = bytes("abab");
    let (h, j) = tree(&s);
    check_structure(&s, &h, &j);
    let copies: Vec<_> = j.nodes.iter().filter(|n| n.kind == NodeKind::CopyLeaf).collect();
    assert!(h.rows[1].blocks.len() == 4);
    assert!(j.nodes.iter().all(|n| n.kind != NodeKind::Letter || n.sbeg < 2 || copies.is_empty()));
}

#[test]
fn unary_run() {
    let s = vec![5u32; 16];
    let (h, j) = tree(&s);
    check_structure(&s, &h, &j);
    assert_eq!(j.len(), 2);
    let root = j.node(j.root);
    assert_eq!((root.kind, root.run_count), (NodeKind::Run, 16));
    assert_eq!(j.node(root.children[0]).kind, NodeKind::Letter);
}

#[test]
fn aaaa_keeps_one_letter() {
    let (_, j) = tree(&bytes("aaaa"));
    let root = j.node(j.root);
    assert_eq!(root.children.len(), 1);
    assert_eq!(j.expand_children(j.root).unwrap(), vec![('a' as u64, 0, 1, 4)]);
}

#[test]
fn copy_chain_collapses() {
    let s = bytes("abcdefgh");
    let h = build_hierarchy(&s, true).unwrap();
    let j = prune(&h);
    let total: usize = h.rows.iter().map(|r| r.blocks.len()).sum();
    assert!(j.len() < total);
    for n in &j.nodes {
        if let Some(&p) = Some(&n.parent).filter(|&&p| p != NONE) {
            assert_ne!(j.node(p).id, n.id);
        }
    }
}

#[test]
fn letter_expansion_rejected() {
    let (_, j) = tree(&bytes("ab"));
    let leaf = j.nodes.iter().position(|n| n.kind == NodeKind::Letter).unwrap() as u32;
    assert!(j.expand_children(leaf).is_err());
}

#[test]
fn abracadabra_tree() {
    let s = bytes("abracadabra");
    let (h, j) = tree(&s);
    check_structure(&s, &h, &j);
    check_view(&h, &j);
    let shape: Vec<(NodeKind, usize, usize)> = j.nodes.iter().map(|n| (n.kind, n.sbeg, n.len)).collect();
    assert_eq!(shape, ABRACADABRA_SHAPE);
}

use NodeKind::{Group as G, Letter as L};

const ABRACADABRA_SHAPE: &[(NodeKind, usize, usize)] = &[
    (G, 0, 11),
    (G, 0, 7),
    (L, 0, 1),
    (L, 1, 1),
    (L, 2, 1),
    (L, 3, 1),
    (L, 4, 1),
    (L, 5, 1),
    (L, 6, 1),
    (G, 7, 4),
    (G, 7, 3),
    (L, 7, 1),
    (L, 8, 1),
    (L, 9, 1),
    (L, 10, 1),
];

/// Parsing checked by trying every `m' < m` and every `r` directly.
fn exhaustive_parse(row: &jbt::hierarchy::Row, lo: usize, hi: usize) -> Vec<(usize, usize, usize)> {
    let p = RowParser::new(row);
    let mut out = Vec::new();
    let mut m = lo;
    while m <= hi {
        let mut best = 1;
        for r in 2..=hi - m + 1 {
            if (0..m).any(|m1| p.rleft(m1, 4 * r) == p.rleft(m, 4 * r) && p.rright(m1, 5 * r) == p.rright(m, 5 * r)) {
                best = r;
            }
        }
        let m2 =
            if best > 1 { (0..row.blocks.len()).find(|&x| p.rright(x, best) == p.rright(m, best)).unwrap() } else { m };
        out.push((m, best, m2));
        m += best;
    }
    out
}

fn check_parse(s: &[u32]) {
    let h = build_hierarchy(s, true).unwrap();
    for (lvl, row) in h.rows.iter().enumerate() {
        if lvl % 2 == 0 || lvl + 1 >= h.rows.len() {
            continue;
        }
        for g in &h.rows[lvl + 1].blocks {
            if g.kind == Kind::Group {
                let (lo, hi) = (g.children.0, g.children.1 - 1);
                assert_eq!(parse_subranges(row, lo, hi), exhaustive_parse(row, lo, hi));
            }
        }
    }
}

#[test]
fn parse_distinct_ids_all_singletons() {
    let s: Vec<u32> = (0..40).collect();
    let h = build_hierarchy(&s, true).unwrap();
    let row = &h.rows[1];
    for g in &h.rows[2].blocks {
        if g.kind == Kind::Group {
            assert!(parse_subranges(row, g.children.0, g.children.1 - 1).iter().all(|t| t.1 == 1));
        }
    }
}

fn marked_row(s: &[u32]) -> jbt::hierarchy::Row {
    let mut row = letter_row(s);
    row.marks = vec![false; s.len()];
    row.marks[s.len() - 1] = true;
    row
}

#[test]
fn parse_repeat_forms_one_subrange() {
    let mut r = rng(9);
    let base = random_text(&mut r, 40, 8);
    let mut s = base.clone();
    s.extend_from_slice(&base);
    s.extend_from_slice(&base);
    let row = marked_row(&s);
    let got = parse_subranges(&row, 90, 99);
    assert_eq!(got[0], (90, 6, 10));
    assert_eq!(got, exhaustive_parse(&row, 90, 99));
}

#[test]
fn parse_letter_rows_match_exhaustive_search() {
    let mut r = rng(21);
    for _ in 0..80 {
        let n = r.gen_range(2..120);
        let s = repetitive_text(&mut r, n, 3);
        let mut row = marked_row(&s);
        for m in row.marks.iter_mut() {
            *m |= r.gen_bool(0.05);
        }
        let lo = r.gen_range(0..n);
        let hi = r.gen_range(lo..n);
        assert_eq!(parse_subranges(&row, lo, hi), exhaustive_parse(&row, lo, hi));
    }
}

#[test]
fn parse_matches_exhaustive_search() {
    check_parse(&bytes("abcabcabcabc"));
    let mut r = rng(3);
    for _ in 0..60 {
        let n = r.gen_range(1..300);
        check_parse(&repetitive_text(&mut r, n, 4));
        check_parse(&random_text(&mut r, n, 3));
    }
}

#[test]
fn weighted_ancestor_examples() {
    let s = repetitive_text(&mut rng(4), 300, 3);
    let (_, j) = tree(&s);
    for v in 0..j.len() as u32 {
        let len = j.node(v).len;
        assert_eq!(j.weighted_ancestor(Forest::Left, v, len), Some(v));
        assert_eq!(j.weighted_ancestor(Forest::Right, v, s.len() + 1), None);
    }
}

#[test]
fn weighted_ancestor_matches_linear_walk() {
    let mut r = rng(5);
    for _ in 0..20 {
        let n = r.gen_range(2..500);
        let s = repetitive_text(&mut r, n, 4);
        let (_, j) = tree(&s);
        for forest in [Forest::Left, Forest::Right] {
            let lift = if forest == Forest::Left { &j.a_left } else { &j.a_right };
            for v in 0..j.len() as u32 {
                let mut u = v;
                while lift.parent(u) != NONE {
                    assert!(j.node(lift.parent(u)).len < j.node(u).len);
                    u = lift.parent(u);
                }
                for _ in 0..4 {
                    let w = r.gen_range(1..=n + 1);
                    let mut walk = None;
                    let mut u = v;
                    while u != NONE && j.node(u).len >= w {
                        walk = Some(u);
                        u = lift.parent(u);
                    }
                    assert_eq!(j.weighted_ancestor(forest, v, w), walk);
                }
            }
        }
    }
}

#[test]
fn self_referencing_intermediate_expands() {
    let mut r = rng(11);
    let mut seen = 0;
    for _ in 0..300 {
        let n = r.gen_range(50..400);
        let s = repetitive_text(&mut r, n, 2);
        let (_, j) = tree(&s);
        for (v, node) in j.nodes.iter().enumerate() {
            if node.kind == NodeKind::Intermediate && node.link == node.parent {
                seen += 1;
                assert_eq!(j.expand_string(v as u32), s[node.sbeg..=node.send()].to_vec());
            }
        }
    }
    eprintln!("self-referencing intermediates seen: {seen}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn structure_and_traversal(s in prop::collection::vec(0u32..3, 1..400)) {
        let (h, j) = tree(&s);
        check_structure(&s, &h, &j);
        check_view(&h, &j);
    }

    #[test]
    fn structure_on_repetitive(seed in 0u64..1000, n in 1usize..512, sigma in 1u32..6) {
        let s = repetitive_text(&mut rng(seed), n, sigma);
        let (h, j) = tree(&s);
        check_structure(&s, &h, &j);
        check_view(&h, &j);
    }
}
