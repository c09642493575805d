use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{BuildHasher, Hasher};

/// Canonical encoding of a rule right-hand side: tag, first id, then either a
/// second id, an exponent or a byte.
pub type RuleKey = [u8; 13];

#[derive(Clone, Copy, Debug)]
pub struct SeededState(u64);

impl BuildHasher for SeededState {
    type Hasher = DefaultHasher;
    fn build_hasher(&self) -> DefaultHasher {
        let mut h = DefaultHasher::new();
        h.write_u64(self.0);
        h
    }
}

/// Dictionary from right-hand side to nonterminal id, hashed under a seed so
/// adversarial inputs cannot pick collisions in advance.
#[derive(Clone, Debug)]
pub struct RuleTable<V> {
    map: HashMap<RuleKey, V, SeededState>,
}

impl<V: Copy> RuleTable<V> {
    pub fn new(seed: u64) -> Self {
        RuleTable { map: HashMap::with_hasher(SeededState(seed ^ 0x7ab1e)) }
    }

    pub fn get(&self, k: &RuleKey) -> Option<V> {
        self.map.get(k).copied()
    }

    pub fn insert(&mut self, k: RuleKey, v: V) -> Option<V> {
        self.map.insert(k, v)
    }

    pub fn remove(&mut self, k: &RuleKey) -> Option<V> {
        self.map.remove(k)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}
