//! Pattern matching over the index.
//!
//! A pattern of length m >= 2 is reduced to its popped sequence, which
//! yields a handful of candidate split positions. For each split the
//! matching grid rectangle is found by binary search, its points are
//! reported, and each point is expanded through its occurrence offsets.

use std::cmp::Ordering;

use crate::dag::Dag;
use crate::grammar::{popped_sequence, Grammar, NodeId, PoppedSequence, Rule};
use crate::grid::{Axis, Grid};
use crate::text_access::Stream;

#[derive(Clone, Copy, Debug, Default)]
pub struct LocateOptions {
    /// Enumerate occurrence offsets without the cached ancestor walks.
    pub naive_vocc: bool,
    /// Leave the result in discovery order.
    pub unsorted: bool,
}

/// One grid hit: node, split position and how many occurrences it produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Primary {
    pub node: NodeId,
    pub split: u64,
    pub count: u64,
}

#[derive(Clone, Debug, Default)]
pub struct LocateReport {
    pub positions: Vec<u64>,
    pub primaries: Vec<Primary>,
    pub splits: Vec<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// reverse(P[1..l]) against X coordinates.
    Left,
    /// P[l+1..m] against Y coordinates.
    Right,
}

/// Candidate split positions of a popped sequence for a pattern of length `m`.
pub fn split_positions(g: &Grammar, q: &PoppedSequence, m: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(q.runs.len() + 1);
    if let Some(&(x, _)) = q.runs.first() {
        out.push(g.len_of(x));
    }
    let mut acc = 0;
    for &(x, c) in q.runs.iter().take(q.runs.len().saturating_sub(1)) {
        acc += g.len_of(x) * c;
        out.push(acc);
    }
    out.retain(|&l| (1..m).contains(&l));
    out.sort_unstable();
    out.dedup();
    out
}

/// Everything needed to compare one side of a split against coordinates.
pub struct PatternPart<'p> {
    pub pattern: &'p [u8],
    pub q: &'p PoppedSequence,
    pub split: u64,
    pub side: Side,
}

impl PatternPart<'_> {
    fn len(&self) -> u64 {
        match self.side {
            Side::Left => self.split,
            Side::Right => self.pattern.len() as u64 - self.split,
        }
    }

    fn short(&self, kappa: usize) -> Vec<u8> {
        let l = self.split as usize;
        match self.side {
            Side::Left => self.pattern[..l].iter().rev().take(kappa).copied().collect(),
            Side::Right => self.pattern[l..].iter().take(kappa).copied().collect(),
        }
    }

    fn stream<'a>(&self, g: &'a Grammar, dag: &'a Dag) -> Stream<'a> {
        let m = self.pattern.len() as u64;
        let mut s = Stream::new(g, dag, &self.q.runs, self.side == Side::Right, u64::MAX);
        match self.side {
            Side::Left => s.skip(m - self.split),
            Side::Right => s.skip(self.split),
        }
        s.restrict(self.len());
        s
    }

    fn coord<'a>(&self, g: &'a Grammar, dag: &'a Dag, u: NodeId) -> Stream<'a> {
        match self.side {
            Side::Left => Stream::coord_l(g, dag, u, u64::MAX),
            Side::Right => Stream::coord_r(g, dag, u, u64::MAX),
        }
    }

    /// Order of the pattern part relative to the node's coordinate, and
    /// whether the pattern part is a prefix of it.
    pub fn compare(&self, g: &Grammar, dag: &Dag, u: NodeId) -> (Ordering, bool) {
        let kappa = dag.kappa();
        let path = dag.path(u);
        let stored = match self.side {
            Side::Left => &path.prefix_l.0,
            Side::Right => &path.prefix_r.0,
        };
        let short = self.short(kappa);
        let (s_len, c_len) = (self.len(), coord_len(g, u, self.side));
        if let Some(i) = short.iter().zip(stored.iter()).position(|(a, b)| a != b) {
            return (short[i].cmp(&stored[i]), false);
        }
        // one truncated prefix extends the other
        if short.len() < kappa || stored.len() < kappa {
            return (s_len.cmp(&c_len), s_len <= c_len);
        }
        if s_len as usize == kappa {
            return (s_len.cmp(&c_len), true);
        }
        let mut a = self.stream(g, dag);
        let mut b = self.coord(g, dag, u);
        let lcp = Stream::lce(&mut a, &mut b, true);
        if lcp == s_len || lcp == c_len {
            return (s_len.cmp(&c_len), s_len <= c_len);
        }
        let (x, y) = (a.next_byte().unwrap(), b.next_byte().unwrap());
        (x.cmp(&y), false)
    }
}

/// Length of a node's X (left) or Y (right) coordinate.
pub fn coord_len(g: &Grammar, u: NodeId, side: Side) -> u64 {
    match (g.rule(u), side) {
        (Rule::Char(_), Side::Left) => 1,
        (Rule::Char(_), Side::Right) => 0,
        (Rule::Pair(a, _), Side::Left) => g.len_of(a),
        (Rule::Pair(_, b), Side::Right) => g.len_of(b),
        (Rule::Power(c, _), Side::Left) => g.len_of(c),
        (Rule::Power(c, d), Side::Right) => g.len_of(c) * (d - 1),
        (Rule::Single(_), _) => panic!("implicit node has no grid coordinates"),
    }
}

/// Rank interval of coordinates that start with the pattern part.
fn rank_range(g: &Grammar, dag: &Dag, grid: &Grid, part: &PatternPart) -> Option<(usize, usize)> {
    let axis = match part.side {
        Side::Left => Axis::X,
        Side::Right => Axis::Y,
    };
    // coordinate < part  <=>  part > coordinate without being its prefix
    let lo = grid.lower_bound(axis, |v| {
        let (o, pre) = part.compare(g, dag, v);
        o == Ordering::Greater && !pre
    });
    let hi = grid.lower_bound(axis, |v| {
        let (o, pre) = part.compare(g, dag, v);
        pre || o == Ordering::Greater
    });
    (lo < hi).then(|| (lo, hi - 1))
}

fn push_z(g: &Grammar, dag: &Dag, u: NodeId, split: u64, m: u64, naive: bool, out: &mut Vec<u64>) -> u64 {
    let before = out.len();
    let mut vocc = Vec::new();
    let shifts: Vec<u64> = match g.rule(u) {
        Rule::Pair(a, _) => vec![g.len_of(a) - split],
        Rule::Power(c, _) => {
            let lc = g.len_of(c);
            let reps = (g.len_of(u) - (m - split)) / lc;
            (1..=reps).map(|j| j * lc - split).collect()
        }
        _ => Vec::new(),
    };
    if shifts.is_empty() {
        return 0;
    }
    if naive {
        vocc = dag.vocc_naive(g, u);
    } else {
        dag.vocc_fast_into(g, u, 0, &mut vocc);
    }
    for &q in &vocc {
        for &s in &shifts {
            out.push(q + s);
        }
    }
    (out.len() - before) as u64
}

/// Full locate with diagnostics.
pub fn locate(g: &Grammar, dag: &Dag, grid: &Grid, pattern: &[u8], opts: LocateOptions) -> LocateReport {
    let mut rep = LocateReport::default();
    let m = pattern.len() as u64;
    if m == 0 || m > g.text_len() {
        return rep;
    }
    if m == 1 {
        if let Some(c) = g.lookup(&Rule::Char(pattern[0])) {
            rep.positions = if opts.naive_vocc { dag.vocc_naive(g, c) } else { dag.vocc_fast(g, c) };
        }
    } else if let Some(q) = popped_sequence(g, pattern) {
        rep.splits = split_positions(g, &q, m);
        let mut hits = Vec::new();
        for &l in &rep.splits {
            let left = PatternPart { pattern, q: &q, split: l, side: Side::Left };
            let right = PatternPart { pattern, q: &q, split: l, side: Side::Right };
            let Some(xr) = rank_range(g, dag, grid, &left) else { continue };
            let Some(yr) = rank_range(g, dag, grid, &right) else { continue };
            hits.clear();
            grid.report(xr, yr, &mut hits);
            for &u in &hits {
                let count = push_z(g, dag, u, l, m, opts.naive_vocc, &mut rep.positions);
                rep.primaries.push(Primary { node: u, split: l, count });
            }
        }
    }
    if !opts.unsorted {
        rep.positions.sort_unstable();
    }
    rep
}
