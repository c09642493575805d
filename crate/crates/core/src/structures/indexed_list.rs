//! Order-maintained list with O(log n) insert, delete, rank and access.
//!
//! Implemented as an implicit treap stored in a [`Slab`] with parent links, so
//! a handle can be ranked without knowing its position.

use super::{splitmix64, Slab};
use crate::{Error, Result};

const NIL: u32 = u32::MAX;

/// Stable reference to a list element. Goes stale when the element is removed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ListHandle {
    idx: u32,
    gen: u32,
}

#[derive(Clone, Debug)]
struct Node<T> {
    item: T,
    prio: u64,
    parent: u32,
    left: u32,
    right: u32,
    size: u32,
}

#[derive(Clone, Debug)]
pub struct IndexedList<T> {
    nodes: Slab<Node<T>>,
    root: u32,
    rng: u64,
}

impl<T> Default for IndexedList<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T> IndexedList<T> {
    pub fn new() -> Self {
        Self::with_seed(0x1d_ea5e)
    }

    pub fn with_seed(seed: u64) -> Self {
        IndexedList { nodes: Slab::new(), root: NIL, rng: seed }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.root == NIL
    }

    fn handle(&self, idx: u32) -> ListHandle {
        ListHandle { idx, gen: self.nodes.generation(idx) }
    }

    fn check(&self, h: ListHandle) -> u32 {
        assert!(
            self.nodes.contains(h.idx) && self.nodes.generation(h.idx) == h.gen,
            "indexed list: use of a removed handle"
        );
        h.idx
    }

    pub fn is_live(&self, h: ListHandle) -> bool {
        self.nodes.contains(h.idx) && self.nodes.generation(h.idx) == h.gen
    }

    pub fn get(&self, h: ListHandle) -> &T {
        &self.nodes[self.check(h)].item
    }

    pub fn get_mut(&mut self, h: ListHandle) -> &mut T {
        let i = self.check(h);
        &mut self.nodes[i].item
    }

    #[inline]
    fn size(&self, i: u32) -> u32 {
        if i == NIL {
            0
        } else {
            self.nodes[i].size
        }
    }

    fn pull(&mut self, i: u32) {
        let s = 1 + self.size(self.nodes[i].left) + self.size(self.nodes[i].right);
        self.nodes[i].size = s;
    }

    fn alloc(&mut self, item: T) -> u32 {
        self.rng = splitmix64(self.rng);
        self.nodes.insert(Node { item, prio: self.rng, parent: NIL, left: NIL, right: NIL, size: 1 })
    }

    fn replace_child(&mut self, parent: u32, old: u32, new: u32) {
        if parent == NIL {
            self.root = new;
        } else if self.nodes[parent].left == old {
            self.nodes[parent].left = new;
        } else {
            self.nodes[parent].right = new;
        }
        if new != NIL {
            self.nodes[new].parent = parent;
        }
    }

    /// Rotate `x` above its parent.
    fn rotate_up(&mut self, x: u32) {
        let p = self.nodes[x].parent;
        let g = self.nodes[p].parent;
        if self.nodes[p].left == x {
            let b = self.nodes[x].right;
            self.nodes[p].left = b;
            if b != NIL {
                self.nodes[b].parent = p;
            }
            self.nodes[x].right = p;
        } else {
            let b = self.nodes[x].left;
            self.nodes[p].right = b;
            if b != NIL {
                self.nodes[b].parent = p;
            }
            self.nodes[x].left = p;
        }
        self.nodes[p].parent = x;
        self.replace_child(g, p, x);
        self.pull(p);
        self.pull(x);
    }

    fn bump_sizes(&mut self, mut i: u32, grow: bool) {
        while i != NIL {
            if grow {
                self.nodes[i].size += 1;
            } else {
                self.nodes[i].size -= 1;
            }
            i = self.nodes[i].parent;
        }
    }

    fn sift_up(&mut self, x: u32) {
        while self.nodes[x].parent != NIL && self.nodes[self.nodes[x].parent].prio < self.nodes[x].prio {
            self.rotate_up(x);
        }
    }

    fn attach(&mut self, parent: u32, left: bool, x: u32) {
        if parent == NIL {
            self.root = x;
        } else {
            if left {
                self.nodes[parent].left = x;
            } else {
                self.nodes[parent].right = x;
            }
            self.nodes[x].parent = parent;
            self.bump_sizes(parent, true);
        }
        self.sift_up(x);
    }

    fn leftmost(&self, mut i: u32) -> u32 {
        while self.nodes[i].left != NIL {
            i = self.nodes[i].left;
        }
        i
    }

    fn rightmost(&self, mut i: u32) -> u32 {
        while self.nodes[i].right != NIL {
            i = self.nodes[i].right;
        }
        i
    }

    pub fn push_back(&mut self, item: T) -> ListHandle {
        let x = self.alloc(item);
        if self.root == NIL {
            self.attach(NIL, false, x);
        } else {
            let r = self.rightmost(self.root);
            self.attach(r, false, x);
        }
        self.handle(x)
    }

    pub fn push_front(&mut self, item: T) -> ListHandle {
        let x = self.alloc(item);
        if self.root == NIL {
            self.attach(NIL, false, x);
        } else {
            let l = self.leftmost(self.root);
            self.attach(l, true, x);
        }
        self.handle(x)
    }

    pub fn insert_after(&mut self, h: ListHandle, item: T) -> ListHandle {
        let at = self.check(h);
        let x = self.alloc(item);
        let r = self.nodes[at].right;
        if r == NIL {
            self.attach(at, false, x);
        } else {
            let l = self.leftmost(r);
            self.attach(l, true, x);
        }
        self.handle(x)
    }

    pub fn insert_before(&mut self, h: ListHandle, item: T) -> ListHandle {
        let at = self.check(h);
        let x = self.alloc(item);
        let l = self.nodes[at].left;
        if l == NIL {
            self.attach(at, true, x);
        } else {
            let r = self.rightmost(l);
            self.attach(r, false, x);
        }
        self.handle(x)
    }

    pub fn remove(&mut self, h: ListHandle) -> T {
        let x = self.check(h);
        loop {
            let (l, r) = (self.nodes[x].left, self.nodes[x].right);
            if l == NIL || r == NIL {
                break;
            }
            let c = if self.nodes[l].prio > self.nodes[r].prio { l } else { r };
            self.rotate_up(c);
        }
        let child = if self.nodes[x].left != NIL { self.nodes[x].left } else { self.nodes[x].right };
        let p = self.nodes[x].parent;
        self.replace_child(p, x, child);
        self.bump_sizes(p, false);
        self.nodes.remove(x).item
    }

    /// 0-based position of `h`.
    pub fn rank(&self, h: ListHandle) -> usize {
        let mut x = self.check(h);
        let mut r = self.size(self.nodes[x].left);
        loop {
            let p = self.nodes[x].parent;
            if p == NIL {
                return r as usize;
            }
            if self.nodes[p].right == x {
                r += self.size(self.nodes[p].left) + 1;
            }
            x = p;
        }
    }

    /// Handle at 0-based position `k`.
    pub fn access(&self, k: usize) -> Result<ListHandle> {
        if k >= self.len() {
            return Err(Error::OutOfRange { pos: k as u64, len: self.len() as u64 });
        }
        let mut k = k as u32;
        let mut x = self.root;
        loop {
            let ls = self.size(self.nodes[x].left);
            if k < ls {
                x = self.nodes[x].left;
            } else if k == ls {
                return Ok(self.handle(x));
            } else {
                k -= ls + 1;
                x = self.nodes[x].right;
            }
        }
    }

    pub fn first(&self) -> Option<ListHandle> {
        (self.root != NIL).then(|| self.handle(self.leftmost(self.root)))
    }

    pub fn next(&self, h: ListHandle) -> Option<ListHandle> {
        let mut x = self.check(h);
        if self.nodes[x].right != NIL {
            return Some(self.handle(self.leftmost(self.nodes[x].right)));
        }
        loop {
            let p = self.nodes[x].parent;
            if p == NIL {
                return None;
            }
            if self.nodes[p].left == x {
                return Some(self.handle(p));
            }
            x = p;
        }
    }

    /// In-order items.
    pub fn iter(&self) -> impl Iterator<Item = &T> + '_ {
        let mut cur = self.first();
        std::iter::from_fn(move || {
            let h = cur?;
            cur = self.next(h);
            Some(self.get(h))
        })
    }
}
