#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random text over the first `sigma` lowercase letters.
pub fn random_text(r: &mut impl Rng, len: usize, sigma: u8) -> Vec<u8> {
    (0..len).map(|_| b'a' + r.random_range(0..sigma)).collect()
}

/// Text built from a few repeated blocks with sparse mutations.
pub fn repetitive_text(r: &mut impl Rng, len: usize) -> Vec<u8> {
    let bl = r.random_range(1..12);
    let block = random_text(r, bl, 3);
    let mut t = Vec::with_capacity(len);
    while t.len() < len {
        if r.random_bool(0.1) {
            t.push(b'a' + r.random_range(0..4));
        } else {
            t.extend_from_slice(&block);
        }
    }
    t.truncate(len);
    t
}

/// Mix of uniform, tiny-alphabet, repetitive and run-heavy texts.
pub fn mixed_text(r: &mut impl Rng, max_len: usize) -> Vec<u8> {
    let len = r.random_range(2..=max_len);
    match r.random_range(0..4) {
        0 => random_text(r, len, 4),
        1 => random_text(r, len, 2),
        2 => repetitive_text(r, len),
        _ => {
            let mut t = Vec::new();
            while t.len() < len {
                let c = b'a' + r.random_range(0..3);
                let k = r.random_range(1..8);
                t.extend(std::iter::repeat_n(c, k));
            }
            t.truncate(len);
            t
        }
    }
}

/// Mostly substrings of `t`, some random strings.
pub fn pattern_for(r: &mut impl Rng, t: &[u8], max_len: usize) -> Vec<u8> {
    let m = r.random_range(1..=max_len.min(t.len()));
    if r.random_bool(0.8) {
        let i = r.random_range(0..=t.len() - m);
        t[i..i + m].to_vec()
    } else {
        random_text(r, m, 4)
    }
}
