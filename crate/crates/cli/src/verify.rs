use jbt::builder::build_streaming;
use jbt::fingerprint::fingerprint_text_substring;
use jbt::hierarchy::{build_hierarchy, Hierarchy};
use jbt::jiggly::{build_jiggly, NodeKind};
use jbt::serial::canonical_bytes;
use jbt::{Index, Symbol};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub enum Outcome {
    Pass,
    Fail(String),
    Skipped(String),
}

pub struct Suite {
    pub name: &'static str,
    pub outcome: Outcome,
}

fn check(name: &'static str, r: Result<(), String>) -> Suite {
    Suite { name, outcome: r.map_or_else(Outcome::Fail, |_| Outcome::Pass) }
}

/// Runs every suite; the hierarchy-based ones only when `n <= offline_limit`.
pub fn run(index: &Index, s: &[Symbol], offline_limit: usize, samples: usize, seed: u64) -> Vec<Suite> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = vec![check("length", length(index, s))];
    if index.n() != s.len() {
        return out;
    }
    out.push(check("tiling", tiling(index)));
    out.push(check("expand", expand(index, s)));
    out.push(check("fingerprints", fingerprints(index, s, samples, &mut rng)));
    if s.len() > offline_limit {
        for name in ["boundaries", "offline-equality", "streaming-equality"] {
            out.push(Suite { name, outcome: Outcome::Skipped(format!("n > {offline_limit}")) });
        }
        return out;
    }
    match build_hierarchy(s, index.deterministic) {
        Ok(h) => {
            out.push(check("boundaries", boundaries(&h, samples, &mut rng)));
            out.push(check("offline-equality", offline(index, &h)));
        }
        Err(e) => out.push(Suite { name: "boundaries", outcome: Outcome::Fail(e.to_string()) }),
    }
    out.push(check("streaming-equality", streaming(index, s)));
    out
}

fn length(index: &Index, s: &[Symbol]) -> Result<(), String> {
    if index.n() == s.len() {
        Ok(())
    } else {
        Err(format!("index has n = {}, text has {}", index.n(), s.len()))
    }
}

/// Groups are tiled by their children, runs by `run_count` copies of their
/// single child, and the root covers the text.
fn tiling(index: &Index) -> Result<(), String> {
    let j = &index.j;
    let root = j.node(j.root);
    if root.sbeg != 0 || root.len != index.n() {
        return Err("root does not cover the text".into());
    }
    for v in 0..j.len() as u32 {
        let x = j.node(v);
        if x.children.is_empty() {
            if x.kind == NodeKind::Letter && x.len != 1 {
                return Err(format!("letter node {v} has length {}", x.len));
            }
            continue;
        }
        let mut at = x.sbeg;
        for &c in &x.children {
            if j.node(c).sbeg != at || j.node(c).parent != v {
                return Err(format!("children of {v} leave a gap at {at}"));
            }
            at += j.node(c).len;
        }
        let covered = match x.kind {
            NodeKind::Run => (at - x.sbeg) as u64 * x.run_count,
            _ => (at - x.sbeg) as u64,
        };
        if covered != x.len as u64 {
            return Err(format!("children of {v} cover {covered} of {} letters", x.len));
        }
    }
    Ok(())
}

fn expand(index: &Index, s: &[Symbol]) -> Result<(), String> {
    let e = index.j.expand_string(index.j.root);
    match e.iter().zip(s).position(|(a, b)| a != b) {
        Some(p) => Err(format!("first mismatch at {p}")),
        None if e.len() != s.len() => Err(format!("expansion has length {}", e.len())),
        None => Ok(()),
    }
}

/// Random substring pairs, half of them equal by construction.
fn fingerprints(index: &Index, s: &[Symbol], samples: usize, rng: &mut StdRng) -> Result<(), String> {
    let n = s.len();
    let root = index.j.root;
    for _ in 0..samples {
        let m = rng.gen_range(1..=n.min(64));
        let a = rng.gen_range(0..=n - m);
        let b = if rng.gen_bool(0.5) {
            let hits = index.search(&s[a..a + m]).map_err(|e| e.to_string())?;
            if hits.is_empty() {
                return Err(format!("search misses the substring at {a} of length {m}"));
            }
            hits[rng.gen_range(0..hits.len())]
        } else {
            rng.gen_range(0..=n - m)
        };
        let fa = fingerprint_text_substring(&index.j, root, a, a + m - 1).map_err(|e| e.to_string())?;
        let fb = fingerprint_text_substring(&index.j, root, b, b + m - 1).map_err(|e| e.to_string())?;
        if (fa.key() == fb.key()) != (s[a..a + m] == s[b..b + m]) {
            return Err(format!("substrings at {a} and {b} of length {m}"));
        }
        if fa.span() != m {
            return Err(format!("fingerprint at {a} spans {} letters, not {m}", fa.span()));
        }
    }
    Ok(())
}

/// Block ends inside `[i, j)` on levels `2k` and `2k+1` are at most
/// `64 * ceil((j - i) / 2^k)`.
fn boundaries(h: &Hierarchy, samples: usize, rng: &mut StdRng) -> Result<(), String> {
    let n = h.rows[0].blocks.len();
    let ends: Vec<Vec<usize>> = h.rows.iter().map(|r| r.blocks.iter().map(|b| b.send()).collect()).collect();
    for _ in 0..samples {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(i + 1..=n);
        for (lvl, row) in ends.iter().enumerate() {
            let k = (lvl / 2).min(62) as u32;
            let count = (row.partition_point(|&b| b < j) - row.partition_point(|&b| b < i)) as u64;
            let bound = 64 * ((j - i) as u64).div_ceil(1 << k);
            if count > bound {
                return Err(format!("level {lvl}, window ({i}, {j}): {count} > {bound}"));
            }
        }
    }
    Ok(())
}

fn offline(index: &Index, h: &Hierarchy) -> Result<(), String> {
    let j = build_jiggly(h);
    if j.nodes != index.j.nodes || j.top_level != index.j.top_level {
        return Err("jiggly tree differs from the offline construction".into());
    }
    Ok(())
}

fn streaming(index: &Index, s: &[Symbol]) -> Result<(), String> {
    let fresh = build_streaming(s, index.deterministic).map_err(|e| e.to_string())?;
    if canonical_bytes(&fresh) != canonical_bytes(index) {
        return Err("streaming rebuild serializes differently".into());
    }
    Ok(())
}
