//! Streaming access to expansions: extraction, LCE and coordinate
//! comparisons.
//!
//! A [`Stream`] reads the expansion of a sequence of nonterminals forwards
//! or backwards without materializing it. Two streams compute their LCE by
//! descending only where they differ, skipping identical nonterminals whole.

use std::cmp::Ordering;

use crate::dag::{Dag, Prefix};
use crate::grammar::{Grammar, NodeId, Rule};

pub struct Stream<'a> {
    g: &'a Grammar,
    dag: &'a Dag,
    /// Pending (node, copies); the top is read next.
    stack: Vec<(NodeId, u64)>,
    forward: bool,
    budget: u64,
}

impl<'a> Stream<'a> {
    /// Read the concatenation of `items` (in text order), at most `budget` bytes.
    pub fn new(g: &'a Grammar, dag: &'a Dag, items: &[(NodeId, u64)], forward: bool, budget: u64) -> Self {
        let mut stack = Vec::with_capacity(items.len() + 64);
        if forward {
            stack.extend(items.iter().rev().copied());
        } else {
            stack.extend(items.iter().copied());
        }
        Stream { g, dag, stack, forward, budget }
    }

    /// Forward stream over T[pos..pos+len-1] (1-based).
    pub fn text(g: &'a Grammar, dag: &'a Dag, pos: u64, len: u64) -> Self {
        let mut s = Stream::new(g, dag, &[(g.start(), 1)], true, u64::MAX);
        s.skip(pos - 1);
        s.budget = len;
        s
    }

    /// Backward stream over T[1..pos] read from position `pos` down.
    pub fn text_rev(g: &'a Grammar, dag: &'a Dag, pos: u64) -> Self {
        let n = g.text_len();
        let mut s = Stream::new(g, dag, &[(g.start(), 1)], false, u64::MAX);
        s.skip(n - pos);
        s.budget = pos;
        s
    }

    /// The X coordinate (reversed left part) of an explicit node.
    pub fn coord_l(g: &'a Grammar, dag: &'a Dag, u: NodeId, budget: u64) -> Self {
        let item = match g.rule(u) {
            Rule::Char(_) => (u, 1),
            Rule::Pair(a, _) => (a, 1),
            Rule::Power(c, _) => (c, 1),
            Rule::Single(_) => panic!("implicit node has no grid coordinates"),
        };
        Stream::new(g, dag, &[item], false, budget)
    }

    /// The Y coordinate (right part) of an explicit node.
    pub fn coord_r(g: &'a Grammar, dag: &'a Dag, u: NodeId, budget: u64) -> Self {
        let items: &[(NodeId, u64)] = match g.rule(u) {
            Rule::Char(_) => &[],
            Rule::Pair(_, b) => &[(b, 1)],
            Rule::Power(c, d) => &[(c, d - 1)],
            Rule::Single(_) => panic!("implicit node has no grid coordinates"),
        };
        Stream::new(g, dag, items, true, budget)
    }

    /// Cap the number of bytes still to be read.
    pub fn restrict(&mut self, n: u64) {
        self.budget = self.budget.min(n);
    }

    /// Drop empty entries and replace implicit nodes by their endpoint.
    fn normalize(&mut self) {
        while let Some(top) = self.stack.last_mut() {
            if top.1 == 0 {
                self.stack.pop();
                continue;
            }
            if !self.g.rule(top.0).is_explicit() {
                top.0 = self.dag.endpoint(top.0);
            }
            break;
        }
    }

    fn top(&mut self) -> Option<(NodeId, u64)> {
        if self.budget == 0 {
            return None;
        }
        self.normalize();
        self.stack.last().copied()
    }

    fn pop_copies(&mut self, k: u64) {
        let top = self.stack.last_mut().unwrap();
        let l = self.g.len_of(top.0);
        top.1 -= k;
        self.budget -= k * l;
        if top.1 == 0 {
            self.stack.pop();
        }
    }

    /// Replace one copy of the (explicit, non-Char) top by its children.
    fn expand(&mut self) {
        let top = self.stack.last_mut().unwrap();
        let x = top.0;
        top.1 -= 1;
        if top.1 == 0 {
            self.stack.pop();
        }
        match self.g.rule(x) {
            Rule::Pair(a, b) => {
                if self.forward {
                    self.stack.push((b, 1));
                    self.stack.push((a, 1));
                } else {
                    self.stack.push((a, 1));
                    self.stack.push((b, 1));
                }
            }
            Rule::Power(c, d) => self.stack.push((c, d)),
            Rule::Single(c) => self.stack.push((c, 1)),
            Rule::Char(_) => unreachable!("cannot expand a terminal"),
        }
    }

    /// Discard the next `k` bytes.
    pub fn skip(&mut self, k: u64) {
        let mut k = k.min(self.budget);
        while k > 0 {
            let Some((x, r)) = self.top() else { return };
            let l = self.g.len_of(x);
            if r <= k / l {
                self.pop_copies(r);
                k -= r * l;
            } else if l <= k {
                let c = k / l;
                self.pop_copies(c);
                k -= c * l;
            } else {
                self.expand();
            }
        }
    }

    pub fn next_byte(&mut self) -> Option<u8> {
        loop {
            let (x, _) = self.top()?;
            if let Rule::Char(c) = self.g.rule(x) {
                self.pop_copies(1);
                return Some(c);
            }
            self.expand();
        }
    }

    pub fn collect_bytes(mut self) -> Vec<u8> {
        let mut out = Vec::new();
        while let Some(b) = self.next_byte() {
            out.push(b);
        }
        out
    }

    /// Length of the common prefix of two streams; both are advanced past
    /// it. With `shortcut` off every byte is compared individually.
    pub fn lce(a: &mut Stream, b: &mut Stream, shortcut: bool) -> u64 {
        let mut n = 0;
        while let (Some((x, rx)), Some((y, ry))) = (a.top(), b.top()) {
            if shortcut && x == y {
                let l = a.g.len_of(x);
                let k = rx.min(ry).min(a.budget / l).min(b.budget / l);
                if k > 0 {
                    a.pop_copies(k);
                    b.pop_copies(k);
                    n += k * l;
                    continue;
                }
            }
            match (a.g.rule(x), b.g.rule(y)) {
                (Rule::Char(c), Rule::Char(d)) => {
                    if c != d {
                        break;
                    }
                    a.pop_copies(1);
                    b.pop_copies(1);
                    n += 1;
                }
                (Rule::Char(_), _) => b.expand(),
                (_, Rule::Char(_)) => a.expand(),
                _ => {
                    if a.g.height(x) >= b.g.height(y) {
                        a.expand()
                    } else {
                        b.expand()
                    }
                }
            }
        }
        n
    }

    /// Lexicographic comparison of the remaining contents.
    pub fn compare(a: &mut Stream, b: &mut Stream) -> Ordering {
        Stream::lce(a, b, true);
        match (a.next_byte(), b.next_byte()) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            (Some(x), Some(y)) => x.cmp(&y),
        }
    }
}

/// Order decided by truncated prefixes alone, if they suffice.
pub fn prefix_order(a: &[u8], b: &[u8], kappa: usize) -> Option<Ordering> {
    if a != b {
        return Some(a.cmp(b));
    }
    (a.len() < kappa).then_some(Ordering::Equal)
}

/// Compare a pattern part against a stored coordinate: first by cached
/// prefixes, then by streaming LCE.
pub fn compare_with_prefix(
    pat_prefix: &[u8],
    node_prefix: &Prefix,
    kappa: usize,
    pat: impl FnOnce() -> Ordering,
) -> Ordering {
    prefix_order(pat_prefix, &node_prefix.0, kappa).unwrap_or_else(pat)
}

/// T[pos..pos+len-1].
pub fn extract(g: &Grammar, dag: &Dag, pos: u64, len: u64) -> Vec<u8> {
    let mut out = Vec::with_capacity(len as usize);
    let mut s = Stream::text(g, dag, pos, len);
    while let Some(b) = s.next_byte() {
        out.push(b);
    }
    out
}

/// |lcp(T[i..n], T[j..n])|.
pub fn lce(g: &Grammar, dag: &Dag, i: u64, j: u64, shortcut: bool) -> u64 {
    let n = g.text_len();
    let mut a = Stream::text(g, dag, i, n - i + 1);
    let mut b = Stream::text(g, dag, j, n - j + 1);
    Stream::lce(&mut a, &mut b, shortcut)
}

/// |lcs(T[1..i], T[1..j])|.
pub fn rlce(g: &Grammar, dag: &Dag, i: u64, j: u64, shortcut: bool) -> u64 {
    let mut a = Stream::text_rev(g, dag, i);
    let mut b = Stream::text_rev(g, dag, j);
    Stream::lce(&mut a, &mut b, shortcut)
}

/// The node of height `h` in the derivation tree whose span contains
/// position `pos`, with the start of that span.
pub fn node_at(g: &Grammar, dag: &Dag, pos: u64, h: u32) -> (NodeId, u64) {
    let mut x = g.start();
    let mut a = 1;
    loop {
        let hx = g.height(x);
        debug_assert!(hx >= h);
        if hx == h {
            return (x, a);
        }
        match g.rule(x) {
            Rule::Single(_) => {
                let e = dag.endpoint(x);
                if g.height(e) <= h {
                    return (dag.at_height(g, e, h).unwrap(), a);
                }
                x = e;
            }
            Rule::Pair(l, r) => {
                if pos < a + g.len_of(l) {
                    x = l;
                } else {
                    a += g.len_of(l);
                    x = r;
                }
            }
            Rule::Power(c, _) => {
                let lc = g.len_of(c);
                a += (pos - a) / lc * lc;
                x = c;
            }
            Rule::Char(_) => unreachable!("height below zero"),
        }
    }
}
