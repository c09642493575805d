/// Arena with stable `u32` slots, a LIFO free list and per-slot generations.
#[derive(Clone, Debug)]
pub struct Slab<T> {
    slots: Vec<Option<T>>,
    gens: Vec<u32>,
    free: Vec<u32>,
    len: usize,
}

impl<T> Default for Slab<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T> Slab<T> {
    pub fn new() -> Self {
        Slab { slots: Vec::new(), gens: Vec::new(), free: Vec::new(), len: 0 }
    }

    /// Rebuild from raw slots and a free list (as stored on disk).
    pub fn from_parts(slots: Vec<Option<T>>, free: Vec<u32>) -> Self {
        let len = slots.iter().filter(|s| s.is_some()).count();
        let gens = vec![0; slots.len()];
        Slab { slots, gens, free, len }
    }

    pub fn insert(&mut self, value: T) -> u32 {
        self.len += 1;
        if let Some(i) = self.free.pop() {
            debug_assert!(self.slots[i as usize].is_none());
            self.slots[i as usize] = Some(value);
            i
        } else {
            self.slots.push(Some(value));
            self.gens.push(0);
            (self.slots.len() - 1) as u32
        }
    }

    /// Fill a vacant slot that is not on the free list (used when loading).
    pub fn put(&mut self, i: u32, value: T) {
        let slot = &mut self.slots[i as usize];
        assert!(slot.is_none(), "slab: slot already occupied");
        *slot = Some(value);
        self.len += 1;
    }

    pub fn remove(&mut self, i: u32) -> T {
        let v = self.slots[i as usize].take().expect("slab: removing vacant slot");
        self.gens[i as usize] = self.gens[i as usize].wrapping_add(1);
        self.free.push(i);
        self.len -= 1;
        v
    }

    #[inline]
    pub fn get(&self, i: u32) -> Option<&T> {
        self.slots.get(i as usize).and_then(|s| s.as_ref())
    }

    #[inline]
    pub fn get_mut(&mut self, i: u32) -> Option<&mut T> {
        self.slots.get_mut(i as usize).and_then(|s| s.as_mut())
    }

    #[inline]
    pub fn generation(&self, i: u32) -> u32 {
        self.gens[i as usize]
    }

    #[inline]
    pub fn contains(&self, i: u32) -> bool {
        self.get(i).is_some()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of slots, live or free.
    pub fn capacity(&self) -> usize {
        self.slots.len()
    }

    pub fn free_list(&self) -> &[u32] {
        &self.free
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &T)> + '_ {
        self.slots.iter().enumerate().filter_map(|(i, s)| s.as_ref().map(|v| (i as u32, v)))
    }
}

impl<T> std::ops::Index<u32> for Slab<T> {
    type Output = T;
    #[inline]
    fn index(&self, i: u32) -> &T {
        self.slots[i as usize].as_ref().expect("slab: vacant slot")
    }
}

impl<T> std::ops::IndexMut<u32> for Slab<T> {
    #[inline]
    fn index_mut(&mut self, i: u32) -> &mut T {
        self.slots[i as usize].as_mut().expect("slab: vacant slot")
    }
}
