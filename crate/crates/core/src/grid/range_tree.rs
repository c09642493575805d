//! Dynamic 2-D range reporting over rank space.
//!
//! A weight-balanced tree over X positions; every subtree keeps its live
//! points sorted by Y. Unbalanced subtrees are rebuilt (scapegoat style),
//! deletions leave tombstones until they outnumber live points.

use crate::grammar::NodeId;

const NIL: u32 = u32::MAX;
const ALPHA: f64 = 0.75;

#[derive(Clone, Debug)]
struct RNode {
    point: NodeId,
    alive: bool,
    left: u32,
    right: u32,
    total: u32,
    live: u32,
    ys: Vec<NodeId>,
}

#[derive(Clone, Debug)]
pub struct RangeTree {
    nodes: Vec<RNode>,
    free: Vec<u32>,
    root: u32,
    dead: usize,
}

impl Default for RangeTree {
    fn default() -> Self {
        RangeTree::new()
    }
}

impl RangeTree {
    pub fn new() -> Self {
        RangeTree { nodes: Vec::new(), free: Vec::new(), root: NIL, dead: 0 }
    }

    /// Build from points in X order.
    pub fn build(points: &[NodeId], yrank: &dyn Fn(NodeId) -> usize) -> Self {
        let mut t = RangeTree::new();
        t.root = t.build_subtree(points, yrank);
        t
    }

    pub fn live(&self) -> usize {
        self.live_of(self.root) as usize
    }

    #[inline]
    fn live_of(&self, v: u32) -> u32 {
        if v == NIL {
            0
        } else {
            self.nodes[v as usize].live
        }
    }

    #[inline]
    fn total_of(&self, v: u32) -> u32 {
        if v == NIL {
            0
        } else {
            self.nodes[v as usize].total
        }
    }

    fn alloc(&mut self, n: RNode) -> u32 {
        if let Some(i) = self.free.pop() {
            self.nodes[i as usize] = n;
            i
        } else {
            self.nodes.push(n);
            (self.nodes.len() - 1) as u32
        }
    }

    fn build_subtree(&mut self, points: &[NodeId], yrank: &dyn Fn(NodeId) -> usize) -> u32 {
        let mut by_y: Vec<(usize, usize)> = points.iter().enumerate().map(|(i, &p)| (yrank(p), i)).collect();
        by_y.sort_unstable();
        let by_y: Vec<usize> = by_y.into_iter().map(|(_, i)| i).collect();
        self.build_rec(points, 0, points.len(), by_y)
    }

    /// `by_y` lists the indices in [lo, hi) ordered by Y.
    fn build_rec(&mut self, points: &[NodeId], lo: usize, hi: usize, by_y: Vec<usize>) -> u32 {
        if lo >= hi {
            return NIL;
        }
        let mid = lo + (hi - lo) / 2;
        let ys = by_y.iter().map(|&i| points[i]).collect();
        let (l, r): (Vec<usize>, Vec<usize>) = by_y.into_iter().filter(|&i| i != mid).partition(|&i| i < mid);
        let left = self.build_rec(points, lo, mid, l);
        let right = self.build_rec(points, mid + 1, hi, r);
        let size = (hi - lo) as u32;
        self.alloc(RNode { point: points[mid], alive: true, left, right, total: size, live: size, ys })
    }

    fn collect_live(&mut self, v: u32, out: &mut Vec<NodeId>) {
        if v == NIL {
            return;
        }
        let (l, r) = (self.nodes[v as usize].left, self.nodes[v as usize].right);
        self.collect_live(l, out);
        if self.nodes[v as usize].alive {
            out.push(self.nodes[v as usize].point);
        }
        self.collect_live(r, out);
        self.nodes[v as usize].ys = Vec::new();
        self.free.push(v);
    }

    /// Rebuild the subtree at `v` without tombstones. Returns the new
    /// subtree root and how many tombstones were dropped.
    fn rebuild(&mut self, v: u32, yrank: &dyn Fn(NodeId) -> usize) -> (u32, u32) {
        let mut pts = Vec::with_capacity(self.live_of(v) as usize);
        let dropped = self.total_of(v) - self.live_of(v);
        self.collect_live(v, &mut pts);
        self.dead -= dropped as usize;
        (self.build_subtree(&pts, yrank), dropped)
    }

    fn y_pos(ys: &[NodeId], p: NodeId, yrank: &dyn Fn(NodeId) -> usize) -> usize {
        let r = yrank(p);
        ys.partition_point(|&q| yrank(q) < r)
    }

    /// Insert `p` so that it becomes the `xrank`-th live point.
    pub fn insert(&mut self, xrank: usize, p: NodeId, yrank: &dyn Fn(NodeId) -> usize) {
        let mut r = xrank as u32;
        let mut path: Vec<(u32, bool)> = Vec::new();
        let mut v = self.root;
        while v != NIL {
            let node = &mut self.nodes[v as usize];
            node.total += 1;
            node.live += 1;
            let at = Self::y_pos(&node.ys, p, yrank);
            node.ys.insert(at, p);
            let lv = self.live_of(self.nodes[v as usize].left);
            let node = &self.nodes[v as usize];
            if r <= lv {
                path.push((v, true));
                v = node.left;
            } else {
                r -= lv + node.alive as u32;
                path.push((v, false));
                v = node.right;
            }
        }
        let leaf = self.alloc(RNode { point: p, alive: true, left: NIL, right: NIL, total: 1, live: 1, ys: vec![p] });
        match path.last() {
            None => self.root = leaf,
            Some(&(par, true)) => self.nodes[par as usize].left = leaf,
            Some(&(par, false)) => self.nodes[par as usize].right = leaf,
        }
        // highest unbalanced ancestor
        for (i, &(v, _)) in path.iter().enumerate() {
            let n = &self.nodes[v as usize];
            let heavy = self.total_of(n.left).max(self.total_of(n.right)) as f64;
            if n.total > 4 && heavy > ALPHA * n.total as f64 {
                let (fresh, dropped) = self.rebuild(v, yrank);
                for &(a, _) in &path[..i] {
                    self.nodes[a as usize].total -= dropped;
                }
                match i.checked_sub(1).map(|j| path[j]) {
                    None => self.root = fresh,
                    Some((par, true)) => self.nodes[par as usize].left = fresh,
                    Some((par, false)) => self.nodes[par as usize].right = fresh,
                }
                break;
            }
        }
    }

    /// Remove `p`, currently the `xrank`-th live point.
    pub fn remove(&mut self, xrank: usize, p: NodeId, yrank: &dyn Fn(NodeId) -> usize) {
        let mut r = xrank as u32;
        let mut v = self.root;
        loop {
            assert!(v != NIL, "range tree: point not found");
            let node = &mut self.nodes[v as usize];
            node.live -= 1;
            let at = Self::y_pos(&node.ys, p, yrank);
            debug_assert_eq!(node.ys.get(at), Some(&p));
            node.ys.remove(at);
            let lv = self.live_of(self.nodes[v as usize].left);
            let node = &mut self.nodes[v as usize];
            if r < lv {
                v = node.left;
            } else if node.alive && r == lv {
                debug_assert_eq!(node.point, p);
                node.alive = false;
                break;
            } else {
                r -= lv + node.alive as u32;
                v = node.right;
            }
        }
        self.dead += 1;
        if self.dead > self.live() {
            self.root = self.rebuild(self.root, yrank).0;
        }
    }

    /// Points with X rank in [xlo, xhi] and Y rank in [ylo, yhi].
    pub fn report(
        &self,
        (xlo, xhi): (usize, usize),
        (ylo, yhi): (usize, usize),
        yrank: &dyn Fn(NodeId) -> usize,
        out: &mut Vec<NodeId>,
    ) {
        if xlo > xhi || ylo > yhi {
            return;
        }
        self.report_rec(self.root, 0, (xlo, xhi), (ylo, yhi), yrank, out);
    }

    fn report_rec(
        &self,
        v: u32,
        base: usize,
        x: (usize, usize),
        y: (usize, usize),
        yrank: &dyn Fn(NodeId) -> usize,
        out: &mut Vec<NodeId>,
    ) {
        let live = self.live_of(v) as usize;
        if live == 0 {
            return;
        }
        let (lo, hi) = (base, base + live - 1);
        if x.1 < lo || x.0 > hi {
            return;
        }
        let n = &self.nodes[v as usize];
        if x.0 <= lo && hi <= x.1 {
            let a = n.ys.partition_point(|&q| yrank(q) < y.0);
            let b = n.ys.partition_point(|&q| yrank(q) <= y.1);
            if a < b {
                out.extend_from_slice(&n.ys[a..b]);
            }
            return;
        }
        self.report_rec(n.left, base, x, y, yrank, out);
        let m = base + self.live_of(n.left) as usize;
        if n.alive && x.0 <= m && m <= x.1 {
            let yr = yrank(n.point);
            if y.0 <= yr && yr <= y.1 {
                out.push(n.point);
            }
        }
        self.report_rec(n.right, m + n.alive as usize, x, y, yrank, out);
    }

    /// Live points in X order.
    pub fn points(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.live());
        let mut stack = Vec::new();
        let mut v = self.root;
        while v != NIL || !stack.is_empty() {
            while v != NIL {
                stack.push(v);
                v = self.nodes[v as usize].left;
            }
            let u = stack.pop().unwrap();
            let n = &self.nodes[u as usize];
            if n.alive {
                out.push(n.point);
            }
            v = n.right;
        }
        out
    }
}
