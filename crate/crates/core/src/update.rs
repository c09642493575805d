//! Insertions and deletions.
//!
//! The new grammar is derived level by level from the old derivation tree.
//! At each level the symbols left of the edit that provably keep their
//! parse stay untouched; the rest of the nodes around the edit are popped
//! into a window that is parsed afresh. Nodes that lose all parents are
//! collected afterwards, and cached walks near the changed region are
//! recomputed. The result equals a from-scratch build under the same seed.

use std::collections::{HashMap, HashSet};

use crate::grammar::{
    apply_round, forced_left, forced_right, height_threshold, merge_runs, Grammar, NodeId, Rule, Run,
};
use crate::index::{reseed, Index, Params};
use crate::text_access::node_at;
use crate::{Error, Result};

/// Summary of one update.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UpdateReport {
    pub created: usize,
    pub removed: usize,
    pub caches_refreshed: usize,
    /// True when the height bound forced a rebuild under a new seed.
    pub rebuilt: bool,
}

enum Edit<'a> {
    Insert(&'a [u8]),
    Delete(u64),
}

impl Index {
    /// Insert `bytes` so that they start at position `pos` (1 <= pos <= n+1).
    pub fn insert(&mut self, pos: u64, bytes: &[u8]) -> Result<UpdateReport> {
        let n = self.len();
        if pos == 0 || pos > n + 1 {
            return Err(Error::OutOfRange { pos, len: n });
        }
        if bytes.is_empty() {
            return Ok(UpdateReport::default());
        }
        self.apply_edit(pos, Edit::Insert(bytes))
    }

    /// Delete T[pos..pos+len-1]. At least two bytes must remain.
    pub fn delete(&mut self, pos: u64, len: u64) -> Result<UpdateReport> {
        let n = self.len();
        if pos == 0 || pos > n || len > n - pos + 1 {
            return Err(Error::OutOfRange { pos, len: n });
        }
        if len == 0 {
            return Ok(UpdateReport::default());
        }
        if n - len < 2 {
            return Err(Error::TextTooShort(n - len));
        }
        self.apply_edit(pos, Edit::Delete(len))
    }

    fn apply_edit(&mut self, s: u64, edit: Edit) -> Result<UpdateReport> {
        let n = self.len();
        let new_n = match edit {
            Edit::Insert(p) => n + p.len() as u64,
            Edit::Delete(m) => n - m,
        };
        let bound = height_threshold(new_n, self.g.w());
        let mut created: Vec<NodeId> = Vec::new();
        let root = self.rebuild_levels(s, &edit, bound, &mut created);
        let Some(new_root) = root else {
            return self.rebuild_after_failure(s, &edit, created);
        };
        let old_root = self.g.start();
        self.g.set_start(new_root);
        let removed = self.collect_garbage(old_root, new_root);
        let refreshed = self.refresh_near(&created, &removed);
        for &u in &created {
            if self.g.contains(u) && self.g.rule(u).is_explicit() {
                self.grid.insert(&self.g, &self.dag, u);
            }
        }
        Ok(UpdateReport { created: created.len(), removed: removed.len(), caches_refreshed: refreshed, rebuilt: false })
    }

    /// Phase 1: build the new levels. Returns the new root, or `None` when
    /// the height bound is exceeded.
    fn rebuild_levels(&mut self, s: u64, edit: &Edit, bound: u32, created: &mut Vec<NodeId>) -> Option<NodeId> {
        let n = self.len();
        let old_h = self.height();
        let (mut k, mut r) = match *edit {
            Edit::Insert(_) => (s - 1, s),
            Edit::Delete(m) => (s - 1, s + m),
        };
        let mut mid: Vec<Run> = Vec::new();
        if let Edit::Insert(p) = *edit {
            for &b in p {
                let (id, fresh) = self.g.intern(Rule::Char(b));
                if fresh {
                    self.dag.attach(&self.g, id);
                    created.push(id);
                }
                merge_runs(&mut mid, id, 1);
            }
        }
        let mut h = 0u32;
        loop {
            if k == 0 && r == n + 1 && mid.len() == 1 && mid[0].1 == 1 {
                return Some(mid[0].0);
            }
            let round = h + 1;
            let mut window: Vec<Run> = Vec::new();
            let mut right: Vec<Run> = Vec::new();
            if k > 0 {
                if h >= old_h {
                    merge_runs(&mut window, self.g.start(), 1);
                    k = 0;
                } else {
                    let (p, a) = node_at(&self.g, &self.dag, k, h + 1);
                    let b = a + self.g.len_of(p) - 1;
                    let last = self.last_child(p);
                    if !(b == k && forced_right(&self.g, last, round)) {
                        self.children_within(p, a, a, k, &mut window);
                        k = a - 1;
                    }
                }
            }
            for &(x, c) in &mid {
                merge_runs(&mut window, x, c);
            }
            if r <= n {
                if h >= old_h {
                    right.push((self.g.start(), 1));
                    r = n + 1;
                } else {
                    let (p, a) = node_at(&self.g, &self.dag, r, h + 1);
                    let b = a + self.g.len_of(p) - 1;
                    let first = self.first_child(p);
                    if !(a == r && forced_left(&self.g, first, round)) {
                        self.children_within(p, a, r, b, &mut right);
                        r = b + 1;
                    }
                }
            }
            for (x, c) in right {
                merge_runs(&mut window, x, c);
            }
            let before = created.len();
            mid = apply_round(&mut self.g, &window, round, created);
            for &id in &created[before..] {
                self.dag.attach(&self.g, id);
            }
            h += 1;
            if h > bound {
                return None;
            }
        }
    }

    fn first_child(&self, p: NodeId) -> NodeId {
        match self.g.rule(p) {
            Rule::Pair(a, _) => a,
            Rule::Single(c) | Rule::Power(c, _) => c,
            Rule::Char(_) => unreachable!(),
        }
    }

    fn last_child(&self, p: NodeId) -> NodeId {
        match self.g.rule(p) {
            Rule::Pair(_, b) => b,
            Rule::Single(c) | Rule::Power(c, _) => c,
            Rule::Char(_) => unreachable!(),
        }
    }

    /// Children of `p` (whose span starts at `a`) lying inside [lo, hi].
    fn children_within(&self, p: NodeId, a: u64, lo: u64, hi: u64, out: &mut Vec<Run>) {
        match self.g.rule(p) {
            Rule::Pair(x, y) => {
                let mid = a + self.g.len_of(x);
                if lo < mid {
                    merge_runs(out, x, 1);
                }
                if hi >= mid {
                    merge_runs(out, y, 1);
                }
            }
            Rule::Single(c) => merge_runs(out, c, 1),
            Rule::Power(c, _) => {
                let lc = self.g.len_of(c);
                merge_runs(out, c, (hi - lo + 1) / lc);
            }
            Rule::Char(_) => unreachable!(),
        }
    }

    /// Phase 2: drop everything no longer reachable, starting from the old
    /// root. Returns the removed nodes with their rules.
    fn collect_garbage(&mut self, old_root: NodeId, new_root: NodeId) -> Vec<(NodeId, Rule)> {
        let mut removed = Vec::new();
        let mut work = vec![old_root];
        while let Some(u) = work.pop() {
            if u == new_root || !self.g.contains(u) || self.g.node(u).in_degree != 0 {
                continue;
            }
            let rule = self.g.rule(u);
            if rule.is_explicit() {
                self.grid.remove(u);
            }
            self.dag.detach(&self.g, u);
            self.g.remove(u);
            removed.push((u, rule));
            for (c, _) in rule.children() {
                work.push(c);
            }
        }
        removed
    }

    /// Phase 3: recompute caches whose upward walk may cross a node whose
    /// parents changed, and prefixes of new explicit nodes.
    fn refresh_near(&mut self, created: &[NodeId], removed: &[(NodeId, Rule)]) -> usize {
        let mut touched: Vec<NodeId> = Vec::new();
        for &u in created {
            if self.g.contains(u) {
                touched.extend(self.g.rule(u).children().map(|c| c.0));
            }
        }
        for (_, rule) in removed {
            touched.extend(rule.children().map(|c| c.0));
        }
        let budget = self.dag.budget();
        let mut seen: HashMap<NodeId, u32> = HashMap::new();
        let mut targets: HashSet<NodeId> = HashSet::new();
        let mut stack: Vec<(NodeId, u32)> =
            touched.into_iter().filter(|&c| self.g.contains(c)).map(|c| (c, 0)).collect();
        for &u in created {
            if self.g.contains(u) {
                stack.push((u, 0));
            }
        }
        while let Some((v, d)) = stack.pop() {
            if seen.get(&v).is_some_and(|&d0| d0 <= d) {
                continue;
            }
            seen.insert(v, d);
            if self.g.rule(v).is_explicit() {
                targets.insert(v);
            }
            if d + 1 < budget.max(1) {
                for (c, _) in self.g.rule(v).children() {
                    stack.push((c, d + 1));
                }
            }
        }
        for &u in &targets {
            self.dag.refresh_cache(&self.g, u);
        }
        for &u in created {
            if self.g.contains(u) && self.g.rule(u).is_explicit() {
                self.dag.refresh_prefixes(&self.g, u);
            }
        }
        targets.len()
    }

    /// Height bound exceeded: rebuild the edited text under a fresh seed.
    fn rebuild_after_failure(&mut self, s: u64, edit: &Edit, created: Vec<NodeId>) -> Result<UpdateReport> {
        let mut text = self.text();
        let s0 = (s - 1) as usize;
        match *edit {
            Edit::Insert(p) => {
                text.splice(s0..s0, p.iter().copied());
            }
            Edit::Delete(m) => {
                text.drain(s0..s0 + m as usize);
            }
        }
        log::info!("update exceeded the height bound; rebuilding {} bytes", text.len());
        let params = Params { seed: reseed(self.params.seed, 1 + self.rebuilds as u32), ..self.params };
        let rebuilds = self.rebuilds;
        let mut fresh = Index::build(&text, params)?;
        fresh.rebuilds += rebuilds + 1;
        *self = fresh;
        Ok(UpdateReport { created: created.len(), removed: 0, caches_refreshed: 0, rebuilt: true })
    }

    /// Debug helper: the grammar alone, rebuilt from the current text.
    pub fn rebuild_grammar(&self) -> Result<Grammar> {
        crate::grammar::build(&self.text(), self.seed(), self.g.w())
    }
}
