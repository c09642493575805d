//! The grammar DAG partitioned into paths.
//!
//! Each explicit node (Char, Pair, Power) is the bottom endpoint of a path
//! that continues through its chain of `Single` parents. Per path we keep
//! the inter-path edges entering it, a cached ancestor walk `(anchor, W)`
//! used to shortcut occurrence enumeration, and short prefixes of both grid
//! coordinates.

use std::collections::BTreeMap;

use crate::grammar::{Grammar, NodeId, Rule};
use crate::text_access::Stream;

/// Position of a node: the explicit endpoint of its path and the distance
/// above it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Place {
    pub end: NodeId,
    pub back: u32,
}

const NO_PLACE: Place = Place { end: NodeId(u32::MAX), back: u32::MAX };

/// At most `kappa` leading bytes of a coordinate string.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Prefix(pub Vec<u8>);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cache {
    pub anchor: NodeId,
    pub weight: u64,
}

#[derive(Clone, Debug)]
pub struct Path {
    /// `nodes[0]` is the explicit endpoint, `nodes[k]` its k-th Single ancestor.
    pub nodes: Vec<NodeId>,
    /// Inter-path edges entering this path, keyed by (height(src), src).
    /// An edge enters the path node whose height is one less than src's.
    pub in_edges: BTreeMap<(u32, NodeId), NodeId>,
    pub cache: Cache,
    pub prefix_l: Prefix,
    pub prefix_r: Prefix,
}

#[derive(Clone, Debug)]
pub struct Dag {
    place: Vec<Place>,
    paths: Vec<Option<Path>>,
    budget: u32,
    kappa: usize,
}

/// Labels of the edges from `src` to `dst`: the offset of each copy of
/// `dst` inside `val(src)`.
pub fn edge_labels(g: &Grammar, src: NodeId, dst: NodeId) -> impl Iterator<Item = u64> {
    let (first, step, count) = match g.rule(src) {
        Rule::Pair(a, _) if dst == a => (0, 0, 1),
        Rule::Pair(a, b) if dst == b => (g.len_of(a), 0, 1),
        Rule::Single(x) if dst == x => (0, 0, 1),
        Rule::Power(c, d) if dst == c => (0, g.len_of(c), d),
        _ => (0, 0, 0),
    };
    (0..count).map(move |j| first + j * step)
}

/// Cache walk length bound: ceil(alpha + log2 B) with B = 64.
pub fn cache_budget(alpha: u32) -> u32 {
    alpha + 6
}

impl Dag {
    pub fn new(budget: u32, kappa: usize) -> Self {
        Dag { place: Vec::new(), paths: Vec::new(), budget, kappa }
    }

    /// Paths and edges only; caches and prefixes are left empty.
    pub fn build_bare(g: &Grammar, budget: u32, kappa: usize) -> Dag {
        let mut dag = Dag::new(budget, kappa);
        let mut order: Vec<NodeId> = g.iter().map(|(id, _)| id).collect();
        order.sort_by_key(|&id| (g.height(id), id));
        for &id in &order {
            dag.attach(g, id);
        }
        dag
    }

    /// Build paths, edges, caches and prefixes for every node of `g`.
    pub fn build(g: &Grammar, budget: u32, kappa: usize) -> Dag {
        let mut dag = Dag::build_bare(g, budget, kappa);
        let ends: Vec<NodeId> = dag.endpoints().collect();
        let caches = crate::par::map(&ends, |&e| dag.compute_cache(g, e));
        let prefixes = crate::par::map(&ends, |&e| dag.compute_prefixes(g, e));
        for ((e, c), (l, r)) in ends.into_iter().zip(caches).zip(prefixes) {
            let p = dag.paths[e.idx()].as_mut().unwrap();
            p.cache = c;
            p.prefix_l = l;
            p.prefix_r = r;
        }
        dag
    }

    pub fn budget(&self) -> u32 {
        self.budget
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    fn ensure(&mut self, id: NodeId) {
        if self.place.len() <= id.idx() {
            self.place.resize(id.idx() + 1, NO_PLACE);
            self.paths.resize_with(id.idx() + 1, || None);
        }
    }

    /// Register a freshly created node. Its children must already be
    /// registered. Caches and prefixes are left for the caller to refresh.
    pub fn attach(&mut self, g: &Grammar, id: NodeId) {
        self.ensure(id);
        let h = g.height(id);
        match g.rule(id) {
            Rule::Single(x) => {
                let p = self.place[x.idx()];
                let path = self.paths[p.end.idx()].as_mut().expect("child path missing");
                debug_assert_eq!(path.nodes.len() as u32, p.back + 1, "Single parent must extend the path top");
                path.nodes.push(id);
                self.place[id.idx()] = Place { end: p.end, back: p.back + 1 };
            }
            rule => {
                for (c, _) in rule.children() {
                    let end = self.place[c.idx()].end;
                    let path = self.paths[end.idx()].as_mut().expect("child path missing");
                    path.in_edges.insert((h, id), c);
                }
                self.place[id.idx()] = Place { end: id, back: 0 };
                self.paths[id.idx()] = Some(Path {
                    nodes: vec![id],
                    in_edges: BTreeMap::new(),
                    cache: Cache { anchor: id, weight: 0 },
                    prefix_l: Prefix::default(),
                    prefix_r: Prefix::default(),
                });
            }
        }
    }

    /// Unregister a node that is about to be removed from the grammar.
    pub fn detach(&mut self, g: &Grammar, id: NodeId) {
        let h = g.height(id);
        match g.rule(id) {
            Rule::Single(_) => {
                let p = self.place[id.idx()];
                let path = self.paths[p.end.idx()].as_mut().unwrap();
                debug_assert_eq!(path.nodes.last(), Some(&id));
                path.nodes.pop();
            }
            rule => {
                for (c, _) in rule.children() {
                    let end = self.place[c.idx()].end;
                    if let Some(path) = self.paths[end.idx()].as_mut() {
                        path.in_edges.remove(&(h, id));
                    }
                }
                let path = self.paths[id.idx()].take().unwrap();
                debug_assert_eq!(path.nodes.len(), 1, "removing an explicit node that still has Single parents");
            }
        }
        self.place[id.idx()] = NO_PLACE;
    }

    #[inline]
    pub fn place(&self, id: NodeId) -> Place {
        self.place[id.idx()]
    }

    #[inline]
    pub fn endpoint(&self, id: NodeId) -> NodeId {
        self.place[id.idx()].end
    }

    #[inline]
    pub fn path(&self, end: NodeId) -> &Path {
        self.paths[end.idx()].as_ref().expect("not a path endpoint")
    }

    pub fn try_path(&self, end: NodeId) -> Option<&Path> {
        self.paths.get(end.idx()).and_then(|p| p.as_ref())
    }

    pub fn endpoints(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.paths.iter().enumerate().filter(|(_, p)| p.is_some()).map(|(i, _)| NodeId(i as u32))
    }

    pub fn path_count(&self) -> usize {
        self.paths.iter().filter(|p| p.is_some()).count()
    }

    /// The node of height `h` on the same path as `id`, if the path reaches it.
    pub fn at_height(&self, g: &Grammar, id: NodeId, h: u32) -> Option<NodeId> {
        let end = self.endpoint(id);
        let base = g.height(end);
        if h < base {
            return None;
        }
        self.path(end).nodes.get((h - base) as usize).copied()
    }

    /// All inter-path edges entering the path of `end`, as (src, dst, label).
    pub fn incoming<'a>(&'a self, g: &'a Grammar, end: NodeId) -> impl Iterator<Item = (NodeId, NodeId, u64)> + 'a {
        self.path(end)
            .in_edges
            .iter()
            .flat_map(move |(&(_, src), &dst)| edge_labels(g, src, dst).map(move |l| (src, dst, l)))
    }

    /// The unique incoming edge of `u` (with its label), if `u` has in-degree 1.
    fn unique_parent(&self, g: &Grammar, u: NodeId) -> Option<(NodeId, u64)> {
        let node = g.node(u);
        if node.in_degree != 1 {
            return None;
        }
        if let Some(p) = node.single_parent {
            return Some((p, 0));
        }
        let end = self.endpoint(u);
        let h = node.height + 1;
        let path = self.path(end);
        let (&(_, src), _) = path.in_edges.range((h, NodeId(0))..=(h, NodeId(u32::MAX))).next()?;
        Some((src, edge_labels(g, src, u).next()?))
    }

    /// Longest upward walk from `u` of at most `budget` edges in which every
    /// node except the top one has exactly one incoming edge.
    pub fn compute_cache(&self, g: &Grammar, u: NodeId) -> Cache {
        let mut cur = u;
        let mut weight = 0;
        for _ in 0..self.budget {
            match self.unique_parent(g, cur) {
                Some((p, l)) => {
                    cur = p;
                    weight += l;
                }
                None => break,
            }
        }
        Cache { anchor: cur, weight }
    }

    /// Overwrite the cached data of a path (used when loading).
    pub fn set_aux(&mut self, end: NodeId, cache: Cache, l: Prefix, r: Prefix) {
        let p = self.paths[end.idx()].as_mut().expect("not a path endpoint");
        p.cache = cache;
        p.prefix_l = l;
        p.prefix_r = r;
    }

    pub fn refresh_cache(&mut self, g: &Grammar, end: NodeId) {
        let c = self.compute_cache(g, end);
        self.paths[end.idx()].as_mut().unwrap().cache = c;
    }

    pub fn compute_prefixes(&self, g: &Grammar, u: NodeId) -> (Prefix, Prefix) {
        let k = self.kappa as u64;
        let l = Stream::coord_l(g, self, u, k).collect_bytes();
        let r = Stream::coord_r(g, self, u, k).collect_bytes();
        (Prefix(l), Prefix(r))
    }

    pub fn refresh_prefixes(&mut self, g: &Grammar, end: NodeId) {
        let (l, r) = self.compute_prefixes(g, end);
        let p = self.paths[end.idx()].as_mut().unwrap();
        p.prefix_l = l;
        p.prefix_r = r;
    }

    /// Occurrence offsets (1-based) of an explicit node, by plain recursion
    /// over inter-path edges.
    pub fn vocc_naive(&self, g: &Grammar, u: NodeId) -> Vec<u64> {
        let mut out = Vec::new();
        let mut stack = vec![(self.endpoint(u), 0u64)];
        while let Some((e, off)) = stack.pop() {
            let mut any = false;
            for (src, _, l) in self.incoming(g, e) {
                any = true;
                stack.push((src, off + l));
            }
            if !any {
                out.push(off + 1);
            }
        }
        out.sort_unstable();
        out
    }

    /// Same set as [`Dag::vocc_naive`], jumping along cached walks.
    pub fn vocc_fast(&self, g: &Grammar, u: NodeId) -> Vec<u64> {
        let mut out = Vec::new();
        self.vocc_fast_into(g, u, 0, &mut out);
        out
    }

    /// Push `shift + q` for every q in vOcc(u), unsorted.
    pub fn vocc_fast_into(&self, g: &Grammar, u: NodeId, shift: u64, out: &mut Vec<u64>) {
        let mut stack = vec![(u, shift)];
        while let Some((x, off)) = stack.pop() {
            let c = self.path(self.endpoint(x)).cache;
            let base = off + c.weight;
            let e = self.endpoint(c.anchor);
            let mut any = false;
            for (src, _, l) in self.incoming(g, e) {
                any = true;
                stack.push((src, base + l));
            }
            if !any {
                out.push(base + 1);
            }
        }
    }

    /// Number of stored inter-path edges (distinct src/dst pairs).
    pub fn edge_count(&self) -> usize {
        self.paths.iter().flatten().map(|p| p.in_edges.len()).sum()
    }
}
