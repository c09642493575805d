use super::{height_threshold, Assign, Grammar, NodeId, Rule};
use crate::{par, Error, Result};

/// `count` consecutive copies of one symbol.
pub type Run = (NodeId, u64);

/// Append a run, merging with the previous one when the symbol repeats.
pub fn merge_runs(out: &mut Vec<Run>, x: NodeId, c: u64) {
    if c == 0 {
        return;
    }
    match out.last_mut() {
        Some(last) if last.0 == x => last.1 += c,
        _ => out.push((x, c)),
    }
}

/// Split a run-length sequence of height-(round-1) symbols into the segments
/// of round `round`. Both ends of the input are treated as segment
/// boundaries. Each output item is `count` consecutive identical segments.
///
/// `runs` must be maximal: adjacent runs carry different symbols.
pub fn parse_round(g: &Grammar, runs: &[Run], round: u32) -> Vec<(Rule, u64)> {
    let mut out = Vec::with_capacity(runs.len());
    if round % 2 == 1 {
        for &(x, c) in runs {
            if g.assign(x) == Assign::Minus || c == 1 {
                out.push((Rule::Single(x), c));
            } else {
                out.push((Rule::Power(x, c), 1));
            }
        }
        return out;
    }
    let mut taken = false;
    for (i, &(x, c)) in runs.iter().enumerate() {
        let rest = c - taken as u64;
        taken = false;
        if rest == 0 {
            continue;
        }
        let pairs = g.assign(x) == Assign::One && runs.get(i + 1).is_some_and(|&(y, _)| g.assign(y) == Assign::Zero);
        if pairs {
            if rest > 1 {
                out.push((Rule::Single(x), rest - 1));
            }
            out.push((Rule::Pair(x, runs[i + 1].0), 1));
            taken = true;
        } else {
            out.push((Rule::Single(x), rest));
        }
    }
    out
}

/// Parse one round and intern every segment. New nodes are reported through
/// `created` in creation order.
pub fn apply_round(g: &mut Grammar, runs: &[Run], round: u32, created: &mut Vec<NodeId>) -> Vec<Run> {
    let segs = parse_round(g, runs, round);
    let found = {
        let g: &Grammar = g;
        par::map(&segs, |(r, _)| g.lookup(r))
    };
    let mut out = Vec::with_capacity(segs.len());
    for ((rule, c), hit) in segs.into_iter().zip(found) {
        let id = match hit {
            Some(id) => id,
            None => {
                let (id, fresh) = g.intern(rule);
                if fresh {
                    created.push(id);
                }
                id
            }
        };
        merge_runs(&mut out, id, c);
    }
    out
}

/// Build the grammar of `text` under `seed`. Fails with
/// [`Error::HeightBound`] when the height exceeds the admissible bound.
pub fn build(text: &[u8], seed: u64, w: u32) -> Result<Grammar> {
    let n = text.len() as u64;
    if n < 2 {
        return Err(Error::TextTooShort(n));
    }
    let bound = height_threshold(n, w);
    let mut g = Grammar::new(seed, w);
    let mut chars = [None; 256];
    let mut runs: Vec<Run> = Vec::new();
    for &b in text {
        let id = *chars[b as usize].get_or_insert_with(|| g.intern(Rule::Char(b)).0);
        merge_runs(&mut runs, id, 1);
    }
    let mut round = 0;
    let mut scratch = Vec::new();
    while !(runs.len() == 1 && runs[0].1 == 1) {
        round += 1;
        if round > bound {
            return Err(Error::HeightBound { height: round, bound });
        }
        runs = apply_round(&mut g, &runs, round, &mut scratch);
        scratch.clear();
    }
    g.set_start(runs[0].0);
    log::debug!("grammar built: n={n} height={round} nodes={}", g.node_count());
    Ok(g)
}
