use std::cmp::Ordering;

use super::{IndexedList, ListHandle};

/// Order-maintenance list: insert next to a known element, compare two
/// elements by position. Comparisons go through ranks in the underlying
/// treap, so they cost O(log n) rather than O(1).
#[derive(Clone, Debug)]
pub struct OrderList<T> {
    list: IndexedList<T>,
}

impl<T> Default for OrderList<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T> OrderList<T> {
    pub fn new() -> Self {
        OrderList { list: IndexedList::new() }
    }

    pub fn with_seed(seed: u64) -> Self {
        OrderList { list: IndexedList::with_seed(seed) }
    }

    /// Insert right after `after`, or at the front when `after` is `None`.
    pub fn insert_after(&mut self, after: Option<ListHandle>, item: T) -> ListHandle {
        match after {
            Some(h) => self.list.insert_after(h, item),
            None => self.list.push_front(item),
        }
    }

    pub fn push_back(&mut self, item: T) -> ListHandle {
        self.list.push_back(item)
    }

    pub fn remove(&mut self, h: ListHandle) -> T {
        self.list.remove(h)
    }

    pub fn compare(&self, a: ListHandle, b: ListHandle) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        self.list.rank(a).cmp(&self.list.rank(b))
    }

    pub fn rank(&self, h: ListHandle) -> usize {
        self.list.rank(h)
    }

    pub fn access(&self, k: usize) -> crate::Result<ListHandle> {
        self.list.access(k)
    }

    pub fn get(&self, h: ListHandle) -> &T {
        self.list.get(h)
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> + '_ {
        self.list.iter()
    }
}
