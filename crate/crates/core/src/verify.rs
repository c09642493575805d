//! Full invariant sweep over an index.

use std::collections::{HashMap, HashSet};

use crate::grammar::{draw_assign, Assign, Fingerprint, NodeId, Rule};
use crate::grid::{cmp_nodes, Axis};
use crate::Index;

/// One broken invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub invariant: &'static str,
    pub detail: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.invariant, self.detail)
    }
}

impl Index {
    /// Check every structural invariant. Empty means healthy.
    pub fn check_invariants(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut bad = |invariant: &'static str, detail: String| out.push(Violation { invariant, detail });
        let g = &self.g;
        let dag = &self.dag;

        // grammar shape, dedup, assignments, reference counts
        let mut seen_rules = HashSet::new();
        let mut indeg: HashMap<NodeId, u64> = HashMap::new();
        for (id, node) in g.iter() {
            if !seen_rules.insert(node.rule) {
                bad("dedup", format!("rule of node {} appears twice", id.0));
            }
            for (c, k) in node.rule.children() {
                *indeg.entry(c).or_default() += k;
                if g.height(c) + 1 != node.height {
                    bad("height-balance", format!("node {} child {}", id.0, c.0));
                }
            }
            match node.rule {
                Rule::Pair(a, b) if a == b => bad("rule-shape", format!("pair {} repeats a child", id.0)),
                Rule::Power(_, d) if d < 2 => bad("rule-shape", format!("power {} exponent {d}", id.0)),
                _ => {}
            }
            let fp = Fingerprint::of(&node.rule, |c| g.node(c).fp);
            if fp != node.fp {
                bad("fingerprint", format!("node {}", id.0));
            }
            if node.assign != draw_assign(g.seed(), fp, node.len, node.height) {
                bad("assign-legality", format!("node {}", id.0));
            }
            if !crate::grammar::within_mu(node.len, node.height + 1) && node.assign != Assign::Minus {
                bad("assign-legality", format!("node {} long but assigned", id.0));
            }
        }
        for (id, node) in g.iter() {
            let want = indeg.get(&id).copied().unwrap_or(0);
            if node.in_degree != want {
                bad("refcounts", format!("node {} has {} recorded, {} actual", id.0, node.in_degree, want));
            }
            if want == 0 && id != g.start() {
                bad("reachability", format!("node {} unreferenced", id.0));
            }
        }
        let bound = crate::grammar::height_threshold(self.len(), g.w());
        if self.height() > bound {
            bad("height-bound", format!("height {} > {}", self.height(), bound));
        }

        // paths and edges
        let mut on_path = HashSet::new();
        for end in dag.endpoints() {
            if !g.contains(end) || !g.rule(end).is_explicit() {
                bad("path-partition", format!("endpoint {} is not explicit", end.0));
                continue;
            }
            let path = dag.path(end);
            for (k, &u) in path.nodes.iter().enumerate() {
                on_path.insert(u);
                if k > 0 && g.rule(u) != Rule::Single(path.nodes[k - 1]) {
                    bad("path-partition", format!("path {} breaks at {}", end.0, u.0));
                }
                if dag.place(u).end != end || dag.place(u).back as usize != k {
                    bad("path-partition", format!("node {} misplaced", u.0));
                }
            }
            if let Some(&top) = path.nodes.last() {
                if g.node(top).single_parent.is_some() {
                    bad("path-partition", format!("path {} stops below a Single parent", end.0));
                }
            }
            for (&(h, src), &dst) in &path.in_edges {
                let ok = g.contains(src)
                    && g.height(src) == h
                    && g.rule(src).children().any(|(c, _)| c == dst)
                    && dag.endpoint(dst) == end;
                if !ok {
                    bad("inter-edge-completeness", format!("bogus edge {} -> {}", src.0, dst.0));
                }
            }
            let cache = dag.compute_cache(g, end);
            if cache != path.cache {
                bad("cache-legality", format!("node {} cache {:?}, expected {:?}", end.0, path.cache, cache));
            }
            let (l, r) = dag.compute_prefixes(g, end);
            if l != path.prefix_l || r != path.prefix_r {
                bad("prefixes", format!("node {}", end.0));
            }
            let naive = dag.vocc_naive(g, end);
            let mut fast = dag.vocc_fast(g, end);
            fast.sort_unstable();
            if naive != fast {
                bad("vocc-agreement", format!("node {}", end.0));
            }
        }
        for (id, node) in g.iter() {
            if !on_path.contains(&id) {
                bad("path-partition", format!("node {} on no path", id.0));
            }
            if node.rule.is_explicit() {
                for (c, _) in node.rule.children() {
                    let e = dag.endpoint(c);
                    if dag.path(e).in_edges.get(&(node.height, id)) != Some(&c) {
                        bad("inter-edge-completeness", format!("edge {} -> {} missing", id.0, c.0));
                    }
                }
            }
        }

        // grid
        let xs = self.grid.x_order();
        let ys = self.grid.y_order();
        let expl: HashSet<NodeId> = g.iter().filter(|(_, n)| n.rule.is_explicit()).map(|(i, _)| i).collect();
        if xs.len() != expl.len() || !xs.iter().all(|u| expl.contains(u)) || !ys.iter().all(|u| expl.contains(u)) {
            bad("grid-registration", format!("{} points for {} explicit nodes", xs.len(), expl.len()));
        }
        if self.grid.tree_points() != xs {
            bad("grid-registration", "range tree disagrees with X order".into());
        }
        for (axis, order, name) in [(Axis::X, &xs, "x-order"), (Axis::Y, &ys, "y-order")] {
            for w in order.windows(2) {
                if cmp_nodes(g, dag, axis, w[0], w[1]) != std::cmp::Ordering::Less {
                    bad(name, format!("{} before {}", w[0].0, w[1].0));
                }
            }
        }
        out
    }
}
