//! The two-sided grid of explicit nodes.
//!
//! Every explicit node is a point whose X coordinate is the reversed left
//! part of its expansion and whose Y coordinate is the right part. Both
//! orders live in order-maintenance lists; a range tree answers rectangle
//! queries in rank space.

mod range_tree;

use std::cmp::Ordering;

use crate::dag::Dag;
use crate::grammar::{Grammar, NodeId};
use crate::structures::{ListHandle, OrderList};
use crate::text_access::{prefix_order, Stream};

pub use range_tree::RangeTree;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Compare two explicit nodes by one coordinate, ties broken by id.
pub fn cmp_nodes(g: &Grammar, dag: &Dag, axis: Axis, u: NodeId, v: NodeId) -> Ordering {
    if u == v {
        return Ordering::Equal;
    }
    let (pu, pv) = (dag.path(u), dag.path(v));
    let (au, av) = match axis {
        Axis::X => (&pu.prefix_l.0, &pv.prefix_l.0),
        Axis::Y => (&pu.prefix_r.0, &pv.prefix_r.0),
    };
    let o = prefix_order(au, av, dag.kappa()).unwrap_or_else(|| {
        let (mut a, mut b) = match axis {
            Axis::X => (Stream::coord_l(g, dag, u, u64::MAX), Stream::coord_l(g, dag, v, u64::MAX)),
            Axis::Y => (Stream::coord_r(g, dag, u, u64::MAX), Stream::coord_r(g, dag, v, u64::MAX)),
        };
        Stream::compare(&mut a, &mut b)
    });
    o.then(u.cmp(&v))
}

#[derive(Clone, Debug, Default)]
pub struct Grid {
    xs: OrderList<NodeId>,
    ys: OrderList<NodeId>,
    handles: Vec<Option<(ListHandle, ListHandle)>>,
    tree: RangeTree,
}

impl Grid {
    /// Grid over all explicit nodes of the grammar.
    pub fn build(g: &Grammar, dag: &Dag) -> Grid {
        let pts: Vec<NodeId> = dag.endpoints().collect();
        let mut by_x = pts.clone();
        crate::par::sort_by(&mut by_x, |&a, &b| cmp_nodes(g, dag, Axis::X, a, b));
        let mut by_y = pts;
        crate::par::sort_by(&mut by_y, |&a, &b| cmp_nodes(g, dag, Axis::Y, a, b));
        Grid::from_orders(&by_x, &by_y)
    }

    /// Grid from explicit X and Y orders (as stored on disk).
    pub fn from_orders(by_x: &[NodeId], by_y: &[NodeId]) -> Grid {
        let mut grid = Grid::default();
        let cap = by_x.iter().chain(by_y).map(|p| p.idx() + 1).max().unwrap_or(0);
        grid.handles = vec![None; cap];
        let xh: Vec<ListHandle> = by_x.iter().map(|&p| grid.xs.push_back(p)).collect();
        let mut yrank = vec![usize::MAX; cap];
        let mut yh = vec![None; cap];
        for (i, &p) in by_y.iter().enumerate() {
            yh[p.idx()] = Some(grid.ys.push_back(p));
            yrank[p.idx()] = i;
        }
        for (&p, h) in by_x.iter().zip(xh) {
            grid.handles[p.idx()] = Some((h, yh[p.idx()].expect("x and y orders hold the same nodes")));
        }
        grid.tree = RangeTree::build(by_x, &|p| yrank[p.idx()]);
        grid
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn contains(&self, u: NodeId) -> bool {
        matches!(self.handles.get(u.idx()), Some(Some(_)))
    }

    pub fn x_at(&self, k: usize) -> NodeId {
        *self.xs.get(self.xs.access(k).expect("x rank in range"))
    }

    pub fn y_at(&self, k: usize) -> NodeId {
        *self.ys.get(self.ys.access(k).expect("y rank in range"))
    }

    pub fn x_rank(&self, u: NodeId) -> usize {
        self.xs.rank(self.handles[u.idx()].expect("node not on grid").0)
    }

    pub fn y_rank(&self, u: NodeId) -> usize {
        self.ys.rank(self.handles[u.idx()].expect("node not on grid").1)
    }

    pub fn x_order(&self) -> Vec<NodeId> {
        self.xs.iter().copied().collect()
    }

    pub fn y_order(&self) -> Vec<NodeId> {
        self.ys.iter().copied().collect()
    }

    /// First rank in `axis` order whose node is not `Less` than the target.
    pub fn lower_bound(&self, axis: Axis, mut less: impl FnMut(NodeId) -> bool) -> usize {
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            let v = match axis {
                Axis::X => self.x_at(mid),
                Axis::Y => self.y_at(mid),
            };
            if less(v) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Add explicit node `u` at its sorted place in both orders.
    pub fn insert(&mut self, g: &Grammar, dag: &Dag, u: NodeId) {
        let xr = self.lower_bound(Axis::X, |v| cmp_nodes(g, dag, Axis::X, v, u) == Ordering::Less);
        let yr = self.lower_bound(Axis::Y, |v| cmp_nodes(g, dag, Axis::Y, v, u) == Ordering::Less);
        let hx = if xr == 0 {
            self.xs.insert_after(None, u)
        } else {
            self.xs.insert_after(Some(self.xs.access(xr - 1).unwrap()), u)
        };
        let hy = if yr == 0 {
            self.ys.insert_after(None, u)
        } else {
            self.ys.insert_after(Some(self.ys.access(yr - 1).unwrap()), u)
        };
        if self.handles.len() <= u.idx() {
            self.handles.resize(u.idx() + 1, None);
        }
        self.handles[u.idx()] = Some((hx, hy));
        let (ys, handles) = (&self.ys, &self.handles);
        self.tree.insert(xr, u, &|p| ys.rank(handles[p.idx()].unwrap().1));
    }

    pub fn remove(&mut self, u: NodeId) {
        let (hx, hy) = self.handles[u.idx()].expect("node not on grid");
        let xr = self.xs.rank(hx);
        {
            let (ys, handles) = (&self.ys, &self.handles);
            self.tree.remove(xr, u, &|p| ys.rank(handles[p.idx()].unwrap().1));
        }
        self.xs.remove(hx);
        self.ys.remove(hy);
        self.handles[u.idx()] = None;
    }

    /// Points inside the rank rectangle [x.0, x.1] x [y.0, y.1].
    pub fn report(&self, x: (usize, usize), y: (usize, usize), out: &mut Vec<NodeId>) {
        let (ys, handles) = (&self.ys, &self.handles);
        self.tree.report(x, y, &|p| ys.rank(handles[p.idx()].unwrap().1), out);
    }

    /// Points of the range tree in X order (for consistency checks).
    pub fn tree_points(&self) -> Vec<NodeId> {
        self.tree.points()
    }
}
