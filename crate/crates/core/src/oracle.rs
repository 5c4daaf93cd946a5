//! Brute-force baselines: naive search, substring complexity, index equality.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use crate::Symbol;

/// Non-negative rational compared by cross-multiplication.
#[derive(Clone, Copy, Debug)]
pub struct Rational {
    pub num: u64,
    pub den: u64,
}

impl Rational {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0);
        let g = gcd(num, den).max(1);
        Rational { num: num / g, den: den / g }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl PartialEq for Rational {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Rational {}
impl PartialOrd for Rational {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Rational {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.num as u128 * o.den as u128).cmp(&(o.num as u128 * self.den as u128))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

pub fn naive_search(s: &[Symbol], t: &[Symbol]) -> Vec<usize> {
    if t.is_empty() || t.len() > s.len() {
        return Vec::new();
    }
    (0..=s.len() - t.len()).filter(|&p| &s[p..p + t.len()] == t).collect()
}

/// Number of distinct length-`k` substrings.
pub fn dk(s: &[Symbol], k: usize) -> usize {
    if k == 0 || k > s.len() {
        return 0;
    }
    s.windows(k).collect::<HashSet<_>>().len()
}

pub fn dk_table(s: &[Symbol]) -> Vec<usize> {
    (1..=s.len()).map(|k| dk(s, k)).collect()
}

/// `max_k d_k(s) / k`.
pub fn delta(s: &[Symbol]) -> Rational {
    let mut best = Rational::new(0, 1);
    for (i, &d) in dk_table(s).iter().enumerate() {
        let r = Rational::new(d as u64, i as u64 + 1);
        if r > best {
            best = r;
        }
    }
    best
}

/// Prefix of the infinite Fibonacci word over `{0, 1}`.
pub fn fibonacci_word(n: usize) -> Vec<Symbol> {
    let (mut a, mut b) = (vec![0 as Symbol], vec![0 as Symbol, 1]);
    while b.len() < n {
        let mut c = b.clone();
        c.extend_from_slice(&a);
        a = b;
        b = c;
    }
    b.truncate(n);
    b
}

/// True iff both indexes serialize to identical canonical bytes.
pub fn reference_equal(a: &crate::Index, b: &crate::Index) -> bool {
    crate::serial::canonical_bytes(a) == crate::serial::canonical_bytes(b)
}
