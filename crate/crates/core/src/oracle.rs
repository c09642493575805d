//! Brute-force references used by the test suites.
//!
//! Nothing here shares code with the index: occurrences are found by plain
//! scans, expansions by direct recursion, and occurrence offsets by walking
//! the full derivation tree.

use std::collections::{HashMap, HashSet};

use num_rational::Ratio;

use crate::grammar::{Grammar, NodeId, Rule};

/// All 1-based occurrences of `p` in `t`, by checking every window.
pub fn naive_occ(t: &[u8], p: &[u8]) -> Vec<u64> {
    if p.is_empty() || p.len() > t.len() {
        return Vec::new();
    }
    t.windows(p.len()).enumerate().filter(|(_, w)| *w == p).map(|(i, _)| i as u64 + 1).collect()
}

/// Same as [`naive_occ`], via the Knuth-Morris-Pratt automaton.
pub fn kmp_occ(t: &[u8], p: &[u8]) -> Vec<u64> {
    let m = p.len();
    if m == 0 || m > t.len() {
        return Vec::new();
    }
    let mut fail = vec![0usize; m];
    let mut k = 0;
    for i in 1..m {
        while k > 0 && p[i] != p[k] {
            k = fail[k - 1];
        }
        if p[i] == p[k] {
            k += 1;
        }
        fail[i] = k;
    }
    let mut out = Vec::new();
    k = 0;
    for (i, &c) in t.iter().enumerate() {
        while k > 0 && c != p[k] {
            k = fail[k - 1];
        }
        if c == p[k] {
            k += 1;
        }
        if k == m {
            out.push((i + 2 - m) as u64);
            k = fail[k - 1];
        }
    }
    out
}

/// Substring complexity max_k d_k / k, exact.
pub fn naive_delta(t: &[u8]) -> Ratio<u64> {
    let mut best = Ratio::from_integer(0);
    for k in 1..=t.len() {
        let d = t.windows(k).collect::<HashSet<_>>().len() as u64;
        best = best.max(Ratio::new(d, k as u64));
    }
    best
}

/// val(id) by direct recursion.
pub fn expand(g: &Grammar, id: NodeId) -> Vec<u8> {
    let mut out = Vec::new();
    expand_into(g, id, &mut out);
    out
}

fn expand_into(g: &Grammar, id: NodeId, out: &mut Vec<u8>) {
    match g.rule(id) {
        Rule::Char(c) => out.push(c),
        Rule::Pair(a, b) => {
            expand_into(g, a, out);
            expand_into(g, b, out);
        }
        Rule::Single(x) => expand_into(g, x, out),
        Rule::Power(x, d) => {
            for _ in 0..d {
                expand_into(g, x, out);
            }
        }
    }
}

/// Materialized (L, R) grid coordinates of an explicit node.
pub fn coordinates(g: &Grammar, u: NodeId) -> (Vec<u8>, Vec<u8>) {
    match g.rule(u) {
        Rule::Char(c) => (vec![c], Vec::new()),
        Rule::Pair(a, b) => {
            let mut l = expand(g, a);
            l.reverse();
            (l, expand(g, b))
        }
        Rule::Power(c, d) => {
            let v = expand(g, c);
            let mut l = v.clone();
            l.reverse();
            (l, v.repeat(d as usize - 1))
        }
        Rule::Single(_) => panic!("implicit node"),
    }
}

/// Starting positions of every derivation-tree occurrence of `u`, found by
/// visiting the whole tree.
pub fn tree_vocc(g: &Grammar, u: NodeId) -> Vec<u64> {
    let mut out = Vec::new();
    let mut stack = vec![(g.start(), 1u64)];
    while let Some((x, pos)) = stack.pop() {
        if x == u {
            out.push(pos);
        }
        match g.rule(x) {
            Rule::Char(_) => {}
            Rule::Pair(a, b) => {
                stack.push((a, pos));
                stack.push((b, pos + g.len_of(a)));
            }
            Rule::Single(c) => stack.push((c, pos)),
            Rule::Power(c, d) => {
                for j in 0..d {
                    stack.push((c, pos + j * g.len_of(c)));
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// [`tree_vocc`] for every node at once, in a single tree walk.
pub fn tree_vocc_all(g: &Grammar) -> HashMap<NodeId, Vec<u64>> {
    let mut out: HashMap<NodeId, Vec<u64>> = HashMap::new();
    let mut stack = vec![(g.start(), 1u64)];
    while let Some((x, pos)) = stack.pop() {
        out.entry(x).or_default().push(pos);
        match g.rule(x) {
            Rule::Char(_) => {}
            Rule::Pair(a, b) => {
                stack.push((a, pos));
                stack.push((b, pos + g.len_of(a)));
            }
            Rule::Single(c) => stack.push((c, pos)),
            Rule::Power(c, d) => {
                for j in 0..d {
                    stack.push((c, pos + j * g.len_of(c)));
                }
            }
        }
    }
    for v in out.values_mut() {
        v.sort_unstable();
    }
    out
}

/// Nodes reachable from the start symbol.
pub fn reachable(g: &Grammar) -> HashSet<NodeId> {
    let mut seen = HashSet::new();
    let mut stack = vec![g.start()];
    while let Some(x) = stack.pop() {
        if seen.insert(x) {
            stack.extend(g.rule(x).children().map(|c| c.0));
        }
    }
    seen
}

/// Height and explicit-node count derived from the tree.
pub fn tree_facts(g: &Grammar) -> (u32, usize) {
    fn height(g: &Grammar, x: NodeId) -> u32 {
        g.rule(x).children().map(|(c, _)| height(g, c) + 1).max().unwrap_or(0)
    }
    let expl = reachable(g).into_iter().filter(|&x| g.rule(x).is_explicit()).count();
    (height(g, g.start()), expl)
}

/// Plain lcp / lcs scans.
pub fn naive_lce(t: &[u8], i: u64, j: u64) -> u64 {
    let (a, b) = (&t[i as usize - 1..], &t[j as usize - 1..]);
    a.iter().zip(b).take_while(|(x, y)| x == y).count() as u64
}

pub fn naive_rlce(t: &[u8], i: u64, j: u64) -> u64 {
    let (a, b) = (&t[..i as usize], &t[..j as usize]);
    a.iter().rev().zip(b.iter().rev()).take_while(|(x, y)| x == y).count() as u64
}
