#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_text(r: &mut ChaCha8Rng, n: usize, sigma: u32) -> Vec<u32> {
    (0..n).map(|_| r.gen_range(0..sigma)).collect()
}

/// Random text built by copying earlier fragments, with occasional fresh letters.
pub fn repetitive_text(r: &mut ChaCha8Rng, n: usize, sigma: u32) -> Vec<u32> {
    let mut s: Vec<u32> = (0..4.min(n)).map(|_| r.gen_range(0..sigma)).collect();
    while s.len() < n {
        if r.gen_bool(0.1) {
            s.push(r.gen_range(0..sigma));
        } else {
            let len = r.gen_range(1..=s.len().min(64));
            let start = r.gen_range(0..=s.len() - len);
            for i in 0..len {
                if s.len() == n {
                    break;
                }
                s.push(s[start + i]);
            }
        }
    }
    s
}

pub fn bytes(s: &str) -> Vec<u32> {
    s.bytes().map(|b| b as u32).collect()
}

pub fn fib(n: usize) -> Vec<u32> {
    jbt::oracle::fibonacci_word(n)
}
