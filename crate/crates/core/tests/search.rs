mod common;

use std::collections::BTreeSet;

use common::*;
use jbt::fingerprint::{Element, Fingerprint};
use jbt::hierarchy::build_hierarchy;
use jbt::jiggly::{build_jiggly, NodeKind};
use jbt::oracle::naive_search;
use jbt::search::*;
use jbt::{Error, Index, OVERLAY_BASE};
use proptest::prelude::*;
use rand::Rng;

fn index(s: &[u32]) -> Index {
    Index::build(s, false).unwrap()
}

fn check(idx: &Index, s: &[u32], t: &[u32]) {
    let got = idx.search(t).unwrap();
    assert_eq!(got, naive_search(s, t), "s={s:?} t={t:?}");
}

#[test]
fn abracadabra_abra() {
    let s = bytes("abracadabra");
    assert_eq!(index(&s).search(&bytes("abra")).unwrap(), vec![0, 7]);
}

#[test]
fn absent_letter() {
    assert!(index(&bytes("abracadabra")).search(&bytes("z")).unwrap().is_empty());
}

#[test]
fn unary_single_letter() {
    assert_eq!(index(&bytes("aaaa")).search(&bytes("a")).unwrap(), vec![0, 1, 2, 3]);
}

#[test]
fn abab_single_group_gives_two_primaries() {
    let s = bytes("abab");
    let idx = index(&s);
    assert_eq!(idx.j.node(idx.j.root).children.len(), 4);
    let occ = search_occurrences(&idx, &bytes("ab")).unwrap();
    assert_eq!(occ.iter().map(|o| o.pos).collect::<Vec<_>>(), vec![0, 2]);
    assert!(occ.iter().all(|o| o.provenance == Provenance::Primary));
}

#[test]
fn occurrences_inside_copies_are_secondary() {
    let mut r = rng(10);
    let mut seen = 0;
    for _ in 0..40 {
        let s = repetitive_text(&mut r, 400, 3);
        let idx = index(&s);
        for _ in 0..30 {
            let m = r.gen_range(2..12);
            let p = r.gen_range(0..=s.len() - m);
            let t = &s[p..p + m];
            let occ = search_occurrences(&idx, t).unwrap();
            for o in &occ {
                let v = idx.j.lowest_covering(o.pos, o.pos + m - 1);
                if idx.j.node(v).kind == NodeKind::CopyLeaf {
                    assert_eq!(o.provenance, Provenance::Secondary);
                    seen += 1;
                }
            }
        }
    }
    assert!(seen > 100);
}

#[test]
fn empty_pattern_rejected() {
    assert_eq!(index(&bytes("ab")).search(&[]), Err(Error::Empty));
}

#[test]
fn pattern_longer_than_text() {
    assert!(index(&bytes("ab")).search(&bytes("abc")).unwrap().is_empty());
}

#[test]
fn whole_text_found_at_zero() {
    let mut r = rng(5);
    for n in [1, 2, 7, 100, 513] {
        let s = random_text(&mut r, n, 3);
        assert_eq!(index(&s).search(&s).unwrap(), vec![0]);
    }
}

#[test]
fn candidate_examples() {
    let e = |offset, count, base_len| Element { id: 1, count, base_len, offset };
    assert_eq!(candidate_splits(&Fingerprint { elements: vec![e(0, 3, 1)] }), vec![2]);
    assert_eq!(candidate_splits(&Fingerprint { elements: vec![e(0, 1, 1), e(1, 1, 1)] }), vec![1]);
}

#[test]
fn pattern_equal_to_text_reuses_text_ids() {
    let mut r = rng(6);
    for n in [5, 60, 400] {
        let s = repetitive_text(&mut r, n, 4);
        let h = build_hierarchy(&s, false).unwrap();
        let idx = Index::from_jiggly(build_jiggly(&h), false);
        let ctx = build_pattern_context(&idx, &s).unwrap();
        assert_eq!(ctx.overlay_ids, 0);
        assert_eq!(ctx.rows.len(), h.rows.len());
        for (a, b) in ctx.rows.iter().zip(&h.rows) {
            assert_eq!(a.ids(), b.ids());
        }
    }
}

#[test]
fn foreign_letters_get_overlay_ids() {
    let idx = index(&bytes("abcabc"));
    let ctx = build_pattern_context(&idx, &bytes("xyzxyw")).unwrap();
    for row in &ctx.rows[1..] {
        for b in &row.blocks {
            assert!(b.id >= OVERLAY_BASE || b.id < 256);
        }
    }
    assert!(ctx.overlay_ids > 0);
}

/// Occurrences whose lowest covering node has children; inside a run only
/// those crossing the boundary before its last copy.
fn classified_primaries(idx: &Index, s: &[u32], t: &[u32]) -> BTreeSet<usize> {
    naive_search(s, t)
        .into_iter()
        .filter(|&p| {
            let v = idx.j.node(idx.j.lowest_covering(p, p + t.len() - 1));
            if v.kind == NodeKind::Run {
                let split = v.send() + 1 - idx.j.node(v.children[0]).len;
                return p < split && split < p + t.len();
            }
            v.has_children()
        })
        .collect()
}

#[test]
fn primaries_match_classification() {
    let mut r = rng(7);
    for round in 0..120 {
        let n = r.gen_range(2..=512);
        let s = if round % 2 == 0 { random_text(&mut r, n, 2) } else { repetitive_text(&mut r, n, 4) };
        let idx = index(&s);
        for _ in 0..30 {
            let m = r.gen_range(2..=n.min(40));
            let p = r.gen_range(0..=n - m);
            let t = &s[p..p + m];
            let ctx = build_pattern_context(&idx, t).unwrap();
            let got: BTreeSet<usize> = primary_occurrences(&idx, &ctx).iter().map(|o| o.pos).collect();
            assert_eq!(got, classified_primaries(&idx, &s, t), "s={s:?} t={t:?}");
        }
    }
}

#[test]
fn matches_naive_on_small_texts() {
    let mut r = rng(8);
    for round in 0..200 {
        let sigma = [1, 2, 4, 16, 256][round % 5];
        let n = r.gen_range(1..=300);
        let s = if round % 3 == 0 { repetitive_text(&mut r, n, sigma) } else { random_text(&mut r, n, sigma) };
        let idx = index(&s);
        for _ in 0..20 {
            let m = r.gen_range(1..=n);
            let p = r.gen_range(0..=n - m);
            let mut t = s[p..p + m].to_vec();
            if r.gen_bool(0.3) {
                let i = r.gen_range(0..m);
                t[i] = r.gen_range(0..sigma);
            }
            check(&idx, &s, &t);
        }
        let k = r.gen_range(1..6);
        let t = random_text(&mut r, k, sigma);
        check(&idx, &s, &t);
    }
}

#[test]
fn matches_naive_on_fibonacci() {
    let s = fib(3000);
    let idx = index(&s);
    for m in 1..60 {
        for p in [0, 1, 5, 17, 233, 1000] {
            check(&idx, &s, &s[p..p + m]);
        }
    }
}

#[test]
fn every_reported_position_matches() {
    let mut r = rng(9);
    let s = repetitive_text(&mut r, 2000, 3);
    let idx = index(&s);
    for _ in 0..200 {
        let m = r.gen_range(1..30);
        let p = r.gen_range(0..s.len() - m);
        let t = &s[p..p + m];
        let got = idx.search(t).unwrap();
        let set: BTreeSet<usize> = got.iter().copied().collect();
        assert_eq!(set.len(), got.len());
        for &q in &got {
            assert_eq!(&s[q..q + m], t);
        }
    }
}

proptest! {
    #[test]
    fn exact_on_random_pairs(s in prop::collection::vec(0u32..3, 1..120), t in prop::collection::vec(0u32..3, 1..6)) {
        let idx = index(&s);
        prop_assert_eq!(idx.search(&t).unwrap(), naive_search(&s, &t));
    }
}
