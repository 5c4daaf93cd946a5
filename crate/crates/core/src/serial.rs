//! Index files: `JBTX`, a version, a header and the jiggly tree in preorder,
//! all as little-endian varints, followed by a 64-bit checksum. Query
//! structures are rebuilt from the tree on load.

use std::io::{Read, Write};

use crate::jiggly::{JNode, JigglyTree, NodeKind, NONE};
use crate::{Error, Index};

pub const MAGIC: &[u8; 4] = b"JBTX";
pub const VERSION: u64 = 1;
const FLAG_DETERMINISTIC: u64 = 1;

fn put(out: &mut Vec<u8>, mut x: u64) {
    loop {
        let b = (x & 0x7f) as u8;
        x >>= 7;
        if x == 0 {
            out.push(b);
            return;
        }
        out.push(b | 0x80);
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn get(&mut self) -> Result<u64, Error> {
        let mut x = 0u64;
        for shift in (0..64).step_by(7) {
            let b = *self.buf.get(self.pos).ok_or_else(|| Error::Corrupt("truncated varint".into()))?;
            self.pos += 1;
            x |= ((b & 0x7f) as u64) << shift;
            if b & 0x80 == 0 {
                return Ok(x);
            }
        }
        Err(Error::Corrupt("varint too long".into()))
    }

    fn usize(&mut self) -> Result<usize, Error> {
        usize::try_from(self.get()?).map_err(|_| Error::Corrupt("value out of range".into()))
    }
}

/// FNV-1a over the payload.
pub fn checksum(data: &[u8]) -> u64 {
    data.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

fn kind_code(k: NodeKind) -> u64 {
    match k {
        NodeKind::Letter => 0,
        NodeKind::Run => 1,
        NodeKind::Group => 2,
        NodeKind::CopyLeaf => 3,
        NodeKind::Intermediate => 4,
    }
}

fn kind_of(c: u64) -> Result<NodeKind, Error> {
    Ok(match c {
        0 => NodeKind::Letter,
        1 => NodeKind::Run,
        2 => NodeKind::Group,
        3 => NodeKind::CopyLeaf,
        4 => NodeKind::Intermediate,
        _ => return Err(Error::Corrupt(format!("node kind {c}"))),
    })
}

/// Bytes of the index file; equal trees give equal bytes.
pub fn canonical_bytes(index: &Index) -> Vec<u8> {
    let j = &index.j;
    let mut out = MAGIC.to_vec();
    put(&mut out, VERSION);
    put(&mut out, if index.deterministic { FLAG_DETERMINISTIC } else { 0 });
    put(&mut out, j.n as u64);
    put(&mut out, j.top_level as u64);
    let letter_bound = j.nodes.iter().filter(|v| v.kind == NodeKind::Letter).map(|v| v.id + 1).max().unwrap_or(0);
    put(&mut out, letter_bound);
    put(&mut out, j.len() as u64);
    put(&mut out, index.pair_count() as u64);
    let mut stack = vec![j.root];
    while let Some(v) = stack.pop() {
        let x = j.node(v);
        put(&mut out, kind_code(x.kind));
        for f in [x.sbeg as u64, x.len as u64, x.id, x.creation as u64, x.run_count, x.target, x.off as u64, x.r as u64]
        {
            put(&mut out, f);
        }
        put(&mut out, x.children.len() as u64);
        stack.extend(x.children.iter().rev());
    }
    let sum = checksum(&out);
    out.extend_from_slice(&sum.to_le_bytes());
    out
}

pub fn save(index: &Index, w: &mut dyn Write) -> Result<(), Error> {
    w.write_all(&canonical_bytes(index)).map_err(|e| Error::Io(e.to_string()))
}

/// Decodes, rebuilds the query structures and checks that re-encoding
/// reproduces the input.
pub fn load_bytes(data: &[u8]) -> Result<Index, Error> {
    if data.len() < MAGIC.len() + 8 || &data[..4] != MAGIC {
        return Err(Error::Corrupt("bad magic".into()));
    }
    let (body, tail) = data.split_at(data.len() - 8);
    if checksum(body) != u64::from_le_bytes(tail.try_into().expect("8 bytes")) {
        return Err(Error::Corrupt("checksum mismatch".into()));
    }
    let mut r = Reader { buf: body, pos: 4 };
    let version = r.get()?;
    if version != VERSION {
        return Err(Error::Corrupt(format!("unsupported version {version}")));
    }
    let deterministic = r.get()? & FLAG_DETERMINISTIC != 0;
    let n = r.usize()?;
    let top = r.get()? as u32;
    let _letter_bound = r.get()?;
    let count = r.usize()?;
    let _pairs = r.get()?;
    if count == 0 || count > body.len() {
        return Err(Error::Corrupt("node count".into()));
    }
    let mut nodes: Vec<JNode> = Vec::with_capacity(count);
    // (node, children still to read)
    let mut open: Vec<(u32, usize)> = Vec::new();
    for i in 0..count {
        let kind = kind_of(r.get()?)?;
        let sbeg = r.usize()?;
        let len = r.usize()?;
        let id = r.get()?;
        let creation = r.get()? as u32;
        let run_count = r.get()?;
        let target = r.get()?;
        let off = r.get()? as u32;
        let rr = r.get()? as u32;
        let kids = r.usize()?;
        let parent = match open.last_mut() {
            Some((p, left)) => {
                let p = *p;
                *left -= 1;
                if *left == 0 {
                    open.pop();
                }
                nodes[p as usize].children.push(i as u32);
                p
            }
            None if i == 0 => NONE,
            None => return Err(Error::Corrupt("node outside the tree".into())),
        };
        nodes.push(JNode {
            sbeg,
            len,
            id,
            kind,
            creation,
            children: Vec::with_capacity(kids),
            run_count,
            target,
            link: NONE,
            off,
            r: rr,
            parent,
        });
        if kids > 0 {
            open.push((i as u32, kids));
        }
    }
    if !open.is_empty() || r.pos != body.len() {
        return Err(Error::Corrupt("tree shape".into()));
    }
    validate(&nodes, n)?;
    let j = JigglyTree::assemble(nodes, 0, n, top);
    let index = Index::from_jiggly(j, deterministic);
    if canonical_bytes(&index) != data {
        return Err(Error::Corrupt("re-encoding differs".into()));
    }
    Ok(index)
}

/// Structural checks that make the tree safe to assemble.
fn validate(nodes: &[JNode], n: usize) -> Result<(), Error> {
    let bad = |m: &str| Err(Error::Corrupt(m.into()));
    let root = &nodes[0];
    if root.sbeg != 0 || root.len != n {
        return bad("root interval");
    }
    let mut ids = std::collections::HashSet::new();
    for v in nodes {
        if v.len == 0 || v.sbeg + v.len > n {
            return bad("node interval");
        }
        if matches!(v.kind, NodeKind::Run | NodeKind::Group) {
            ids.insert(v.id);
            if v.children.is_empty() {
                return bad("expanded node without children");
            }
        }
        let mut at = v.sbeg;
        for &c in &v.children {
            if nodes[c as usize].sbeg != at {
                return bad("children do not tile");
            }
            at += nodes[c as usize].len;
        }
        match v.kind {
            NodeKind::Group if at != v.sbeg + v.len => return bad("children do not tile"),
            NodeKind::Run if v.run_count < 2 || nodes[v.children[0] as usize].len * v.run_count as usize != v.len => {
                return bad("run length");
            }
            NodeKind::Letter if v.len != 1 || !v.children.is_empty() => return bad("letter node"),
            _ => {}
        }
    }
    for v in nodes {
        if matches!(v.kind, NodeKind::CopyLeaf | NodeKind::Intermediate) && !ids.contains(&v.target) {
            return bad("dangling link");
        }
    }
    Ok(())
}

pub fn load(r: &mut dyn Read) -> Result<Index, Error> {
    let mut data = Vec::new();
    r.read_to_end(&mut data).map_err(|e| Error::Io(e.to_string()))?;
    load_bytes(&data)
}

impl Index {
    pub fn to_bytes(&self) -> Vec<u8> {
        canonical_bytes(self)
    }

    pub fn save_file(&self, path: &std::path::Path) -> Result<(), Error> {
        std::fs::write(path, canonical_bytes(self)).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn load_file(path: &std::path::Path) -> Result<Self, Error> {
        let data = std::fs::read(path).map_err(|e| Error::Io(e.to_string()))?;
        load_bytes(&data)
    }
}
