//! Binary index files.
//!
//! Layout (little-endian, integers after the header are LEB128):
//! magic `RRIX1`, version, seed, w, alpha, kappa, max_retries, n, slot
//! count, start id; then one tagged rule per slot (tag 0 marks a free slot)
//! and the free list; per explicit node its cache and coordinate prefixes;
//! the X and Y orders; finally the first 8 bytes of the SHA-256 of
//! everything before. Fingerprints, assignments, reference counts and the
//! path structure are recomputed when loading.

use std::io::Read;

use sha2::{Digest, Sha256};

use crate::dag::{Cache, Dag, Prefix};
use crate::grammar::{Grammar, NodeId, Rule};
use crate::grid::Grid;
use crate::index::{Index, Params};
use crate::{Error, Result};

const MAGIC: &[u8; 5] = b"RRIX1";
const VERSION: u32 = 1;

fn put(out: &mut Vec<u8>, v: u64) {
    leb128::write::unsigned(out, v).expect("writing to a Vec cannot fail");
}

struct Reader<'a> {
    buf: &'a [u8],
}

impl Reader<'_> {
    fn bytes(&mut self, k: usize) -> Result<&[u8]> {
        if self.buf.len() < k {
            return Err(Error::Format("truncated file".into()));
        }
        let (a, b) = self.buf.split_at(k);
        self.buf = b;
        Ok(a)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.bytes(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes(8)?.try_into().unwrap()))
    }

    fn var(&mut self) -> Result<u64> {
        leb128::read::unsigned(&mut self.buf).map_err(|e| Error::Format(format!("bad varint: {e}")))
    }

    fn id(&mut self, slots: usize) -> Result<NodeId> {
        let v = self.var()?;
        if v >= slots as u64 {
            return Err(Error::Format(format!("node id {v} out of range")));
        }
        Ok(NodeId(v as u32))
    }

    fn prefix(&mut self, kappa: usize) -> Result<Prefix> {
        let k = self.u8()? as usize;
        if k > kappa {
            return Err(Error::Format("prefix longer than kappa".into()));
        }
        Ok(Prefix(self.bytes(k)?.to_vec()))
    }
}

impl Index {
    pub fn to_bytes(&self) -> Vec<u8> {
        let g = &self.g;
        let p = &self.params;
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&g.seed().to_le_bytes());
        out.extend_from_slice(&[g.w() as u8, p.alpha as u8, p.kappa]);
        out.extend_from_slice(&p.max_retries.to_le_bytes());
        out.extend_from_slice(&self.len().to_le_bytes());
        out.extend_from_slice(&(g.slot_count() as u64).to_le_bytes());
        out.extend_from_slice(&g.start().0.to_le_bytes());
        put(&mut out, self.rebuilds);
        for i in 0..g.slot_count() as u32 {
            match g.try_node(NodeId(i)).map(|n| n.rule) {
                None => out.push(0),
                Some(rule) => {
                    out.push(rule.tag());
                    match rule {
                        Rule::Char(c) => out.push(c),
                        Rule::Pair(a, b) => {
                            put(&mut out, a.0 as u64);
                            put(&mut out, b.0 as u64);
                        }
                        Rule::Single(x) => put(&mut out, x.0 as u64),
                        Rule::Power(x, d) => {
                            put(&mut out, x.0 as u64);
                            put(&mut out, d);
                        }
                    }
                }
            }
        }
        let free = g.free_slots();
        put(&mut out, free.len() as u64);
        for &f in free {
            put(&mut out, f as u64);
        }
        for end in self.dag.endpoints() {
            let path = self.dag.path(end);
            put(&mut out, path.cache.anchor.0 as u64);
            put(&mut out, path.cache.weight);
            for pre in [&path.prefix_l, &path.prefix_r] {
                out.push(pre.0.len() as u8);
                out.extend_from_slice(&pre.0);
            }
        }
        for order in [self.grid.x_order(), self.grid.y_order()] {
            put(&mut out, order.len() as u64);
            for u in order {
                put(&mut out, u.0 as u64);
            }
        }
        let sum = Sha256::digest(&out);
        out.extend_from_slice(&sum[..8]);
        out
    }

    pub fn from_bytes(data: &[u8]) -> Result<Index> {
        if data.len() < MAGIC.len() + 8 {
            return Err(Error::Format("file too short".into()));
        }
        let (body, sum) = data.split_at(data.len() - 8);
        if Sha256::digest(body)[..8] != *sum {
            return Err(Error::Format("checksum mismatch".into()));
        }
        let mut r = Reader { buf: body };
        if r.bytes(5)? != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let seed = r.u64()?;
        let (w, alpha, kappa) = (r.u8()? as u32, r.u8()? as u32, r.u8()?);
        let max_retries = r.u32()?;
        let n = r.u64()?;
        let slots = r.u64()? as usize;
        if slots > body.len() {
            return Err(Error::Format("slot count exceeds file size".into()));
        }
        let start = NodeId(r.u32()?);
        let rebuilds = r.var()?;
        let mut rules = Vec::with_capacity(slots);
        for _ in 0..slots {
            let rule = match r.u8()? {
                0 => None,
                1 => Some(Rule::Char(r.u8()?)),
                2 => Some(Rule::Pair(r.id(slots)?, r.id(slots)?)),
                3 => Some(Rule::Single(r.id(slots)?)),
                4 => {
                    let x = r.id(slots)?;
                    let d = r.var()?;
                    if d < 2 {
                        return Err(Error::Format("power exponent below 2".into()));
                    }
                    Some(Rule::Power(x, d))
                }
                t => return Err(Error::Format(format!("unknown rule tag {t}"))),
            };
            rules.push(rule);
        }
        let nfree = r.var()? as usize;
        let mut free = Vec::with_capacity(nfree.min(slots));
        for _ in 0..nfree {
            let f = r.id(slots)?;
            if rules[f.idx()].is_some() {
                return Err(Error::Format("free list names a live slot".into()));
            }
            free.push(f.0);
        }
        let g = Grammar::from_rules(seed, w, rules, free, start)?;
        if g.text_len() != n {
            return Err(Error::Format("stored length disagrees with grammar".into()));
        }
        let params = Params { seed, w, alpha, kappa, max_retries };
        let mut dag = Dag::build_bare(&g, crate::dag::cache_budget(alpha), kappa as usize);
        let ends: Vec<NodeId> = dag.endpoints().collect();
        for &e in &ends {
            let anchor = r.id(slots)?;
            if !g.contains(anchor) {
                return Err(Error::Format("cache anchor missing".into()));
            }
            let weight = r.var()?;
            let l = r.prefix(kappa as usize)?;
            let rr = r.prefix(kappa as usize)?;
            dag.set_aux(e, Cache { anchor, weight }, l, rr);
        }
        let mut orders = Vec::new();
        for _ in 0..2 {
            let k = r.var()? as usize;
            if k != ends.len() {
                return Err(Error::Format("grid order has wrong size".into()));
            }
            let mut seen = vec![false; slots];
            let mut v = Vec::with_capacity(k);
            for _ in 0..k {
                let u = r.id(slots)?;
                if !g.contains(u) || !g.rule(u).is_explicit() || std::mem::replace(&mut seen[u.idx()], true) {
                    return Err(Error::Format("grid order is not a permutation of explicit nodes".into()));
                }
                v.push(u);
            }
            orders.push(v);
        }
        if !r.buf.is_empty() {
            return Err(Error::Format("trailing bytes".into()));
        }
        let grid = Grid::from_orders(&orders[0], &orders[1]);
        Ok(Index { g, dag, grid, params, rebuilds })
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Index> {
        let mut data = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut data)?;
        Index::from_bytes(&data)
    }
}
