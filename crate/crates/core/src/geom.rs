//! Order maintenance, static range trees, and a dynamic point set with
//! rectangle reporting and payload minimum.

use std::cmp::Ordering;

const NIL: u32 = u32::MAX;
const TAG_BITS: u32 = 62;

/// Ordered linked list with integer tags that compare in list order.
#[derive(Clone, Debug)]
pub struct OrderList {
    tag: Vec<u64>,
    next: Vec<u32>,
    prev: Vec<u32>,
    /// Number of relabel passes performed.
    pub relabels: usize,
}

impl Default for OrderList {
    fn default() -> Self {
        Self::new()
    }
}

impl OrderList {
    /// A list holding only the head item `0`.
    pub fn new() -> Self {
        OrderList { tag: vec![0], next: vec![NIL], prev: vec![NIL], relabels: 0 }
    }

    pub fn head(&self) -> u32 {
        0
    }

    pub fn len(&self) -> usize {
        self.tag.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn tag(&self, a: u32) -> u64 {
        self.tag[a as usize]
    }

    pub fn next(&self, a: u32) -> Option<u32> {
        Some(self.next[a as usize]).filter(|&x| x != NIL)
    }

    pub fn compare(&self, a: u32, b: u32) -> Ordering {
        self.tag[a as usize].cmp(&self.tag[b as usize])
    }

    pub fn insert_after(&mut self, a: u32) -> u32 {
        let hi = self.upper(a);
        if hi - self.tag(a) < 2 {
            self.relabel(a);
        }
        let lo = self.tag(a);
        let hi = self.upper(a);
        let id = self.tag.len() as u32;
        let nx = self.next[a as usize];
        self.tag.push(lo + (hi - lo) / 2);
        self.next.push(nx);
        self.prev.push(a);
        self.next[a as usize] = id;
        if nx != NIL {
            self.prev[nx as usize] = id;
        }
        id
    }

    fn upper(&self, a: u32) -> u64 {
        match self.next[a as usize] {
            NIL => 1u64 << TAG_BITS,
            x => self.tag[x as usize],
        }
    }

    /// Spreads the smallest aligned tag window around `a` whose density is
    /// at most one half.
    fn relabel(&mut self, a: u32) {
        self.relabels += 1;
        let t = self.tag(a);
        for i in 1..=TAG_BITS {
            let width = 1u64 << i;
            let base = t & !(width - 1);
            let mut first = a;
            while self.prev[first as usize] != NIL && self.tag(self.prev[first as usize]) >= base {
                first = self.prev[first as usize];
            }
            let mut items = Vec::new();
            let mut x = first;
            while x != NIL && self.tag(x) < base + width {
                items.push(x);
                x = self.next[x as usize];
            }
            if ((items.len() as u64) + 1) * 2 <= width {
                let step = width / (items.len() as u64 + 1);
                for (k, &it) in items.iter().enumerate() {
                    self.tag[it as usize] = base + k as u64 * step;
                }
                return;
            }
        }
        panic!("order list overflow");
    }
}

/// One reported point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: u32,
    pub y: u32,
    pub payload: u64,
}

/// Static merge-sort range tree over points, ordered by caller comparators.
#[derive(Clone, Debug, Default)]
pub struct RangeTree {
    /// Points sorted by x.
    pts: Vec<Point>,
    /// Per segment-tree node: indices into `pts` sorted by y.
    ys: Vec<Vec<u32>>,
    /// Per node: min-tree over payloads in `ys` order.
    mins: Vec<Vec<u64>>,
    size: usize,
}

impl RangeTree {
    pub fn build(
        mut pts: Vec<Point>,
        cx: &dyn Fn(u32, u32) -> Ordering,
        cy: &dyn Fn(u32, u32) -> Ordering,
        with_min: bool,
    ) -> Self {
        pts.sort_by(|a, b| cx(a.x, b.x).then(cy(a.y, b.y)));
        let n = pts.len();
        let size = n.next_power_of_two().max(1);
        let mut ys = vec![Vec::new(); 2 * size];
        for (i, _) in pts.iter().enumerate() {
            ys[size + i] = vec![i as u32];
        }
        for v in (1..size).rev() {
            let (l, r) = (&ys[2 * v], &ys[2 * v + 1]);
            let mut m = Vec::with_capacity(l.len() + r.len());
            let (mut i, mut j) = (0, 0);
            while i < l.len() || j < r.len() {
                let take_l = j == r.len()
                    || (i < l.len() && cy(pts[l[i] as usize].y, pts[r[j] as usize].y) != Ordering::Greater);
                if take_l {
                    m.push(l[i]);
                    i += 1;
                } else {
                    m.push(r[j]);
                    j += 1;
                }
            }
            ys[v] = m;
        }
        let mins = if with_min {
            ys.iter()
                .map(|list| {
                    let k = list.len();
                    let mut t = vec![u64::MAX; 2 * k];
                    for (i, &p) in list.iter().enumerate() {
                        t[k + i] = pts[p as usize].payload;
                    }
                    for i in (1..k).rev() {
                        t[i] = t[2 * i].min(t[2 * i + 1]);
                    }
                    t
                })
                .collect()
        } else {
            Vec::new()
        };
        RangeTree { pts, ys, mins, size }
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.pts
    }

    fn x_span(&self, lo: u32, hi: u32, cx: &dyn Fn(u32, u32) -> Ordering) -> (usize, usize) {
        let a = self.pts.partition_point(|p| cx(p.x, lo) == Ordering::Less);
        let b = self.pts.partition_point(|p| cx(p.x, hi) != Ordering::Greater);
        (a, b.max(a))
    }

    fn canonical(&self, a: usize, b: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let (mut l, mut r) = (a + self.size, b + self.size);
        while l < r {
            if l & 1 == 1 {
                out.push(l);
                l += 1;
            }
            if r & 1 == 1 {
                r -= 1;
                out.push(r);
            }
            l >>= 1;
            r >>= 1;
        }
        out
    }

    fn y_span(&self, v: usize, lo: u32, hi: u32, cy: &dyn Fn(u32, u32) -> Ordering) -> (usize, usize) {
        let list = &self.ys[v];
        let a = list.partition_point(|&i| cy(self.pts[i as usize].y, lo) == Ordering::Less);
        let b = list.partition_point(|&i| cy(self.pts[i as usize].y, hi) != Ordering::Greater);
        (a, b.max(a))
    }

    /// Points with `xlo <= x <= xhi` and `ylo <= y <= yhi`.
    pub fn report(
        &self,
        (xlo, xhi): (u32, u32),
        (ylo, yhi): (u32, u32),
        cx: &dyn Fn(u32, u32) -> Ordering,
        cy: &dyn Fn(u32, u32) -> Ordering,
        out: &mut Vec<Point>,
    ) {
        if self.pts.is_empty() {
            return;
        }
        let (a, b) = self.x_span(xlo, xhi, cx);
        for v in self.canonical(a, b) {
            let (l, r) = self.y_span(v, ylo, yhi, cy);
            out.extend(self.ys[v][l..r].iter().map(|&i| self.pts[i as usize]));
        }
    }

    /// Minimum payload in the rectangle; requires a tree built with minima.
    pub fn min(
        &self,
        (xlo, xhi): (u32, u32),
        (ylo, yhi): (u32, u32),
        cx: &dyn Fn(u32, u32) -> Ordering,
        cy: &dyn Fn(u32, u32) -> Ordering,
    ) -> Option<u64> {
        if self.pts.is_empty() {
            return None;
        }
        let (a, b) = self.x_span(xlo, xhi, cx);
        let mut best = u64::MAX;
        for v in self.canonical(a, b) {
            let (l, r) = self.y_span(v, ylo, yhi, cy);
            let t = &self.mins[v];
            let k = self.ys[v].len();
            let (mut l, mut r) = (l + k, r + k);
            while l < r {
                if l & 1 == 1 {
                    best = best.min(t[l]);
                    l += 1;
                }
                if r & 1 == 1 {
                    r -= 1;
                    best = best.min(t[r]);
                }
                l >>= 1;
                r >>= 1;
            }
        }
        (best != u64::MAX).then_some(best)
    }
}

fn natural(a: u32, b: u32) -> Ordering {
    a.cmp(&b)
}

/// Immutable set of `(x, y, payload)` over integer ranks.
#[derive(Clone, Debug, Default)]
pub struct StaticPairSet {
    tree: RangeTree,
}

impl StaticPairSet {
    pub fn build(points: Vec<Point>) -> Self {
        StaticPairSet { tree: RangeTree::build(points, &natural, &natural, false) }
    }

    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        self.tree.points()
    }

    pub fn report(&self, x: (u32, u32), y: (u32, u32)) -> Vec<Point> {
        let mut out = Vec::new();
        self.tree.report(x, y, &natural, &natural, &mut out);
        out
    }
}

/// Insert-only point set keyed by items of two order lists, kept as a
/// logarithmic family of static range trees.
#[derive(Clone, Debug, Default)]
pub struct DynamicPointSet {
    levels: Vec<Option<RangeTree>>,
    len: usize,
}

impl DynamicPointSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn insert(&mut self, p: Point, xs: &OrderList, ys: &OrderList) {
        let mut carry = vec![p];
        let mut i = 0;
        loop {
            if i == self.levels.len() {
                self.levels.push(None);
            }
            match self.levels[i].take() {
                Some(t) => {
                    carry.extend_from_slice(t.points());
                    i += 1;
                }
                None => break,
            }
        }
        let cx = |a: u32, b: u32| xs.compare(a, b);
        let cy = |a: u32, b: u32| ys.compare(a, b);
        self.levels[i] = Some(RangeTree::build(carry, &cx, &cy, true));
        self.len += 1;
    }

    pub fn report(&self, x: (u32, u32), y: (u32, u32), xs: &OrderList, ys: &OrderList) -> Vec<Point> {
        let cx = |a: u32, b: u32| xs.compare(a, b);
        let cy = |a: u32, b: u32| ys.compare(a, b);
        let mut out = Vec::new();
        for t in self.levels.iter().flatten() {
            t.report(x, y, &cx, &cy, &mut out);
        }
        out
    }

    pub fn min_payload(&self, x: (u32, u32), y: (u32, u32), xs: &OrderList, ys: &OrderList) -> Option<u64> {
        let cx = |a: u32, b: u32| xs.compare(a, b);
        let cy = |a: u32, b: u32| ys.compare(a, b);
        self.levels.iter().flatten().filter_map(|t| t.min(x, y, &cx, &cy)).min()
    }
}
