use super::{merge_runs, parse_round, Assign, Grammar, NodeId, Rule, Run};
use crate::{Error, Result};

/// True when, in round `round`, a segment boundary must follow `c` no
/// matter what comes next.
pub fn forced_right(g: &Grammar, c: NodeId, round: u32) -> bool {
    let a = g.assign(c);
    if round.is_multiple_of(2) {
        a != Assign::One
    } else {
        a == Assign::Minus
    }
}

/// True when, in round `round`, a segment boundary must precede `c`.
pub fn forced_left(g: &Grammar, c: NodeId, round: u32) -> bool {
    let a = g.assign(c);
    if round.is_multiple_of(2) {
        a != Assign::Zero
    } else {
        a == Assign::Minus
    }
}

/// A pattern's popped sequence, stored as maximal runs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoppedSequence {
    pub runs: Vec<Run>,
}

impl PoppedSequence {
    pub fn total_len(&self, g: &Grammar) -> u64 {
        self.runs.iter().map(|&(x, c)| g.len_of(x) * c).sum()
    }

    /// Number of symbols counted with multiplicity.
    pub fn symbol_count(&self) -> u64 {
        self.runs.iter().map(|r| r.1).sum()
    }
}

fn segment_runs(rule: Rule) -> [Option<Run>; 2] {
    match rule {
        Rule::Pair(a, b) => [Some((a, 1)), Some((b, 1))],
        Rule::Single(x) => [Some((x, 1)), None],
        Rule::Power(x, d) => [Some((x, d)), None],
        Rule::Char(_) => unreachable!("segments never produce Char"),
    }
}

/// Compute the popped sequence of `pattern` against the grammar.
///
/// Rounds parse the current sequence in isolation. The first segment is set
/// aside unless a boundary is forced before it, and likewise the last one;
/// every remaining segment must already exist as a nonterminal. Returns
/// `None` when some segment does not exist, in which case the pattern has
/// no occurrence.
pub fn popped_sequence(g: &Grammar, pattern: &[u8]) -> Option<PoppedSequence> {
    let mut cur: Vec<Run> = Vec::new();
    for &b in pattern {
        let id = g.lookup(&Rule::Char(b))?;
        merge_runs(&mut cur, id, 1);
    }
    let mut left: Vec<Run> = Vec::new();
    let mut right: Vec<Vec<Run>> = Vec::new();
    let mut round = 0;
    while cur.iter().map(|r| r.1).sum::<u64>() >= 2 {
        round += 1;
        let mut segs = parse_round(g, &cur, round);
        let k: u64 = segs.iter().map(|s| s.1).sum();
        let first = cur[0].0;
        let last = cur[cur.len() - 1].0;
        if !forced_left(g, first, round) {
            let (rule, c) = segs[0];
            for r in segment_runs(rule).into_iter().flatten() {
                merge_runs(&mut left, r.0, r.1);
            }
            if c == 1 {
                segs.remove(0);
            } else {
                segs[0].1 -= 1;
            }
        }
        if k >= 2 && !forced_right(g, last, round) {
            let (rule, c) = *segs.last().expect("k >= 2 leaves a last segment");
            right.push(segment_runs(rule).into_iter().flatten().collect());
            if c == 1 {
                segs.pop();
            } else {
                segs.last_mut().unwrap().1 -= 1;
            }
        }
        let mut next = Vec::with_capacity(segs.len());
        for (rule, c) in segs {
            merge_runs(&mut next, g.lookup(&rule)?, c);
        }
        cur = next;
    }
    let mut runs = left;
    for &(x, c) in &cur {
        merge_runs(&mut runs, x, c);
    }
    for seg in right.iter().rev() {
        for &(x, c) in seg {
            merge_runs(&mut runs, x, c);
        }
    }
    Some(PoppedSequence { runs })
}

/// Sibling runs met while descending from the start symbol to position `s`:
/// what lies left of the path (top-down) and right of it (bottom-up).
fn descend(g: &Grammar, s: u64) -> (Vec<Run>, Vec<Run>) {
    let mut left = Vec::new();
    let mut right: Vec<Vec<Run>> = Vec::new();
    let (mut x, mut off) = (g.start(), s - 1);
    loop {
        match g.rule(x) {
            Rule::Char(_) => break,
            Rule::Single(c) => x = c,
            Rule::Pair(a, b) => {
                let la = g.len_of(a);
                if off < la {
                    right.push(vec![(b, 1)]);
                    x = a;
                } else {
                    merge_runs(&mut left, a, 1);
                    off -= la;
                    x = b;
                }
            }
            Rule::Power(c, d) => {
                let lc = g.len_of(c);
                let j = off / lc;
                if j > 0 {
                    merge_runs(&mut left, c, j);
                }
                if j + 1 < d {
                    right.push(vec![(c, d - j - 1)]);
                }
                off -= j * lc;
                x = c;
            }
        }
    }
    let mut suffix = vec![(x, 1)];
    for seg in right.iter().rev() {
        for &(y, c) in seg {
            merge_runs(&mut suffix, y, c);
        }
    }
    (left, suffix)
}

/// Popped sequence of T[1..s-1], embedded at position 1. Empty for `s = 1`.
pub fn pop_prefix(g: &Grammar, s: u64) -> Result<PoppedSequence> {
    let n = g.text_len();
    if s == 0 || s > n + 1 {
        return Err(Error::OutOfRange { pos: s, len: n });
    }
    let runs = if s == n + 1 { vec![(g.start(), 1)] } else { descend(g, s).0 };
    Ok(PoppedSequence { runs })
}

/// Popped sequence of T[s..n], embedded at position `s`. Empty for `s = n+1`.
pub fn pop_suffix(g: &Grammar, s: u64) -> Result<PoppedSequence> {
    let n = g.text_len();
    if s == 0 || s > n + 1 {
        return Err(Error::OutOfRange { pos: s, len: n });
    }
    let runs = match s {
        1 => vec![(g.start(), 1)],
        _ if s == n + 1 => Vec::new(),
        _ => descend(g, s).1,
    };
    Ok(PoppedSequence { runs })
}
