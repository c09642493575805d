//! Restricted-recompression run-length SLP.
//!
//! Every nonterminal is one of four rule shapes. Nodes are interned so that
//! a right-hand side occurs at most once, and each carries its height,
//! expansion length, a 128-bit content fingerprint and a random
//! assignment drawn from that fingerprint.

mod popped;
mod recompress;

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use sha2::{Digest, Sha256};

use crate::structures::{splitmix64, RuleKey, RuleTable, Slab};

pub use popped::{forced_left, forced_right, pop_prefix, pop_suffix, popped_sequence, PoppedSequence};
pub use recompress::{apply_round, build, merge_runs, parse_round, Run};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Char(u8),
    Pair(NodeId, NodeId),
    Single(NodeId),
    Power(NodeId, u64),
}

impl Rule {
    pub fn tag(&self) -> u8 {
        match self {
            Rule::Char(_) => 1,
            Rule::Pair(..) => 2,
            Rule::Single(_) => 3,
            Rule::Power(..) => 4,
        }
    }

    pub fn key(&self) -> RuleKey {
        let mut k = [0u8; 13];
        k[0] = self.tag();
        match *self {
            Rule::Char(c) => k[1] = c,
            Rule::Pair(a, b) => {
                k[1..5].copy_from_slice(&a.0.to_le_bytes());
                k[5..9].copy_from_slice(&b.0.to_le_bytes());
            }
            Rule::Single(x) => k[1..5].copy_from_slice(&x.0.to_le_bytes()),
            Rule::Power(x, d) => {
                k[1..5].copy_from_slice(&x.0.to_le_bytes());
                k[5..13].copy_from_slice(&d.to_le_bytes());
            }
        }
        k
    }

    /// Char, Pair and Power nodes are explicit in the DAG; Single nodes are not.
    #[inline]
    pub fn is_explicit(&self) -> bool {
        !matches!(self, Rule::Single(_))
    }

    /// Children with multiplicity, as (child, copies).
    pub fn children(&self) -> impl Iterator<Item = (NodeId, u64)> {
        let (a, b) = match *self {
            Rule::Char(_) => (None, None),
            Rule::Pair(x, y) => (Some((x, 1)), Some((y, 1))),
            Rule::Single(x) => (Some((x, 1)), None),
            Rule::Power(x, d) => (Some((x, d)), None),
        };
        a.into_iter().chain(b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(i8)]
pub enum Assign {
    Minus = -1,
    Zero = 0,
    One = 1,
}

impl Assign {
    pub fn from_i8(v: i8) -> Option<Assign> {
        match v {
            -1 => Some(Assign::Minus),
            0 => Some(Assign::Zero),
            1 => Some(Assign::One),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fingerprint(pub u128);

impl Fingerprint {
    /// Collision-resistant digest of the derived structure.
    pub fn of(rule: &Rule, child_fp: impl Fn(NodeId) -> Fingerprint) -> Fingerprint {
        let mut h = Sha256::new();
        h.update([rule.tag()]);
        match *rule {
            Rule::Char(c) => h.update([c]),
            Rule::Pair(a, b) => {
                h.update(child_fp(a).0.to_le_bytes());
                h.update(child_fp(b).0.to_le_bytes());
            }
            Rule::Single(x) => h.update(child_fp(x).0.to_le_bytes()),
            Rule::Power(x, d) => {
                h.update(child_fp(x).0.to_le_bytes());
                h.update(d.to_le_bytes());
            }
        }
        let d = h.finalize();
        let mut lo = [0u8; 16];
        lo.copy_from_slice(&d[..16]);
        Fingerprint(u128::from_le_bytes(lo))
    }
}

#[derive(Clone, Debug)]
pub struct Node {
    pub rule: Rule,
    pub height: u32,
    pub len: u64,
    pub assign: Assign,
    pub fp: Fingerprint,
    /// Incoming edges counted with multiplicity (a Power parent counts d).
    pub in_degree: u64,
    /// The node whose rule is `Single(self)`, if any.
    pub single_parent: Option<NodeId>,
}

/// floor((8/7)^k) for k = 0.. until it saturates u64.
fn mu_floor_table() -> &'static [u64] {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = Vec::new();
        let (mut num, mut den) = (BigUint::from(1u32), BigUint::from(1u32));
        while let Some(v) = (&num / &den).to_u64() {
            out.push(v);
            num *= 8u32;
            den *= 7u32;
        }
        out
    })
}

/// mu(h) = (8/7)^(ceil(h/2) - 1) as an exact fraction (numerator, denominator).
pub fn mu(h: u32) -> (BigUint, BigUint) {
    let e = h.div_ceil(2) as i64 - 1;
    let (a, b) = if e >= 0 { (8u32, 7u32) } else { (7u32, 8u32) };
    let e = e.unsigned_abs() as u32;
    (BigUint::from(a).pow(e), BigUint::from(b).pow(e))
}

/// Exact test `len <= mu(round)`.
pub fn within_mu(len: u64, round: u32) -> bool {
    if round == 0 {
        // mu(0) = 7/8 < 1 <= len
        return false;
    }
    let k = (round.div_ceil(2) - 1) as usize;
    let t = mu_floor_table();
    k >= t.len() || len <= t[k]
}

/// Largest admissible grammar height for a text of length `n`.
pub fn height_threshold(n: u64, w: u32) -> u32 {
    let l = (4.0 * n as f64).ln() / (8.0f64 / 7.0).ln();
    (2.0 * (w as f64 + 1.0) * l + 2.0).floor() as u32
}

fn prf_bit(seed: u64, fp: Fingerprint) -> bool {
    let lo = fp.0 as u64;
    let hi = (fp.0 >> 64) as u64;
    splitmix64(seed ^ splitmix64(lo ^ splitmix64(hi))) & 1 == 1
}

/// Assignment of a height-`height` node: it takes part in round `height + 1`.
pub fn draw_assign(seed: u64, fp: Fingerprint, len: u64, height: u32) -> Assign {
    if !within_mu(len, height + 1) {
        Assign::Minus
    } else if prf_bit(seed, fp) {
        Assign::One
    } else {
        Assign::Zero
    }
}

#[derive(Clone, Debug)]
pub struct Grammar {
    nodes: Slab<Node>,
    table: RuleTable<NodeId>,
    start: Option<NodeId>,
    seed: u64,
    w: u32,
}

impl Grammar {
    pub fn new(seed: u64, w: u32) -> Self {
        Grammar { nodes: Slab::new(), table: RuleTable::new(seed), start: None, seed, w }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn w(&self) -> u32 {
        self.w
    }

    #[inline]
    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0]
    }

    pub fn try_node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(id.0)
    }

    #[inline]
    pub fn rule(&self, id: NodeId) -> Rule {
        self.nodes[id.0].rule
    }

    #[inline]
    pub fn len_of(&self, id: NodeId) -> u64 {
        self.nodes[id.0].len
    }

    #[inline]
    pub fn height(&self, id: NodeId) -> u32 {
        self.nodes[id.0].height
    }

    #[inline]
    pub fn assign(&self, id: NodeId) -> Assign {
        self.nodes[id.0].assign
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.nodes.contains(id.0)
    }

    pub fn start(&self) -> NodeId {
        self.start.expect("grammar has no start symbol")
    }

    pub fn set_start(&mut self, id: NodeId) {
        self.start = Some(id);
    }

    /// Length of the text derived from the start symbol.
    pub fn text_len(&self) -> u64 {
        self.len_of(self.start())
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn slot_count(&self) -> usize {
        self.nodes.capacity()
    }

    pub fn free_slots(&self) -> &[u32] {
        self.nodes.free_list()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, &Node)> + '_ {
        self.nodes.iter().map(|(i, n)| (NodeId(i), n))
    }

    /// Existing nonterminal with this right-hand side.
    pub fn lookup(&self, rule: &Rule) -> Option<NodeId> {
        match *rule {
            Rule::Single(x) => self.nodes.get(x.0).and_then(|n| n.single_parent),
            _ => self.table.get(&rule.key()),
        }
    }

    fn make_node(&self, rule: Rule) -> Node {
        let (height, len) = match rule {
            Rule::Char(_) => (0, 1),
            Rule::Pair(a, b) => {
                debug_assert!(a != b, "pair children must differ");
                debug_assert_eq!(self.height(a), self.height(b));
                (self.height(a) + 1, self.len_of(a) + self.len_of(b))
            }
            Rule::Single(x) => (self.height(x) + 1, self.len_of(x)),
            Rule::Power(x, d) => {
                debug_assert!(d >= 2);
                (self.height(x) + 1, self.len_of(x).checked_mul(d).expect("length overflow"))
            }
        };
        let fp = Fingerprint::of(&rule, |c| self.nodes[c.0].fp);
        Node {
            rule,
            height,
            len,
            assign: draw_assign(self.seed, fp, len, height),
            fp,
            in_degree: 0,
            single_parent: None,
        }
    }

    /// Return the nonterminal for `rule`, creating it if needed. The flag is
    /// true when a new node was made.
    pub fn intern(&mut self, rule: Rule) -> (NodeId, bool) {
        if let Some(id) = self.lookup(&rule) {
            return (id, false);
        }
        let node = self.make_node(rule);
        let id = NodeId(self.nodes.insert(node));
        self.link(id);
        (id, true)
    }

    fn link(&mut self, id: NodeId) {
        let rule = self.rule(id);
        for (c, k) in rule.children() {
            self.nodes[c.0].in_degree += k;
        }
        match rule {
            Rule::Single(x) => self.nodes[x.0].single_parent = Some(id),
            _ => {
                self.table.insert(rule.key(), id);
            }
        }
    }

    /// Remove a node that nothing references any more.
    pub fn remove(&mut self, id: NodeId) -> Node {
        debug_assert_eq!(self.node(id).in_degree, 0, "removing a referenced node");
        let rule = self.rule(id);
        for (c, k) in rule.children() {
            self.nodes[c.0].in_degree -= k;
        }
        match rule {
            Rule::Single(x) => self.nodes[x.0].single_parent = None,
            _ => {
                self.table.remove(&rule.key());
            }
        }
        self.nodes.remove(id.0)
    }

    /// Reasons a rule could not be added to this grammar.
    fn validate_new(&self, rule: &Rule) -> std::result::Result<(), &'static str> {
        if self.lookup(rule).is_some() {
            return Err("duplicate rule");
        }
        match *rule {
            Rule::Char(_) => {}
            Rule::Pair(a, b) => {
                if a == b || self.height(a) != self.height(b) {
                    return Err("invalid pair");
                }
                self.len_of(a).checked_add(self.len_of(b)).ok_or("length overflow")?;
            }
            Rule::Single(_) => {}
            Rule::Power(x, d) => {
                if d < 2 {
                    return Err("power exponent below 2");
                }
                self.len_of(x).checked_mul(d).ok_or("length overflow")?;
            }
        }
        Ok(())
    }

    /// Rebuild a grammar from stored rules (slot order preserved, `None`
    /// marks a free slot). Children must precede parents in `order`.
    pub fn from_rules(
        seed: u64,
        w: u32,
        slots: Vec<Option<Rule>>,
        free: Vec<u32>,
        start: NodeId,
    ) -> crate::Result<Grammar> {
        use crate::Error;
        let n = slots.len();
        let mut g = Grammar::new(seed, w);
        let mut placeholder: Vec<Option<Node>> = Vec::with_capacity(n);
        for _ in 0..n {
            placeholder.push(None);
        }
        g.nodes = Slab::from_parts(placeholder, free);
        let mut done = vec![false; n];
        let mut stack = Vec::new();
        for root in 0..n {
            if slots[root].is_none() || done[root] {
                continue;
            }
            stack.push((root, false));
            while let Some((i, expanded)) = stack.pop() {
                if done[i] {
                    continue;
                }
                let rule = slots[i].ok_or_else(|| Error::Format(format!("rule refers to free slot {i}")))?;
                if !expanded {
                    stack.push((i, true));
                    for (c, _) in rule.children() {
                        let ci = c.idx();
                        if ci >= n || slots[ci].is_none() {
                            return Err(Error::Format(format!("dangling child {ci}")));
                        }
                        if !done[ci] {
                            stack.push((ci, false));
                        }
                    }
                } else {
                    for (c, _) in rule.children() {
                        if !done[c.idx()] {
                            return Err(Error::Format("cyclic grammar".into()));
                        }
                    }
                    g.validate_new(&rule).map_err(|m| Error::Format(format!("slot {i}: {m}")))?;
                    let node = g.make_node(rule);
                    g.nodes.put(i as u32, node);
                    g.link(NodeId(i as u32));
                    done[i] = true;
                }
            }
        }
        if !g.contains(start) {
            return Err(Error::Format("start symbol missing".into()));
        }
        g.start = Some(start);
        Ok(g)
    }

    /// Number of explicit and implicit nodes.
    pub fn counts(&self) -> (usize, usize) {
        let e = self.nodes.iter().filter(|(_, n)| n.rule.is_explicit()).count();
        (e, self.nodes.len() - e)
    }

    /// Multiset signature used to compare two grammars built under the same
    /// seed: sorted fingerprints plus the start fingerprint.
    pub fn signature(&self) -> (Vec<Fingerprint>, Fingerprint) {
        let mut v: Vec<Fingerprint> = self.nodes.iter().map(|(_, n)| n.fp).collect();
        v.sort_unstable();
        (v, self.node(self.start()).fp)
    }
}
