use crate::dag::{cache_budget, Dag};
use crate::grammar::{self, Grammar, NodeId};
use crate::grid::Grid;
use crate::locate::{self, LocateOptions, LocateReport};
use crate::structures::splitmix64;
use crate::{text_access, Error, Result};

/// Construction parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Params {
    pub seed: u64,
    /// Height-bound slack: builds above 2(w+1)log_{8/7}(4n)+2 are retried.
    pub w: u32,
    /// Extra edges allowed in a cached ancestor walk.
    pub alpha: u32,
    /// Bytes of each grid coordinate kept inline.
    pub kappa: u8,
    /// Fresh seeds tried after a height failure.
    pub max_retries: u32,
}

impl Default for Params {
    fn default() -> Self {
        Params { seed: 0x5eed_2024, w: 2, alpha: 0, kappa: 8, max_retries: 8 }
    }
}

/// Seed for the `attempt`-th retry.
pub(crate) fn reseed(seed: u64, attempt: u32) -> u64 {
    if attempt == 0 {
        seed
    } else {
        splitmix64(seed ^ (attempt as u64).wrapping_mul(0x9e37_79b9))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexStats {
    pub n: u64,
    pub height: u32,
    pub explicit_nodes: usize,
    pub implicit_nodes: usize,
    pub edges: usize,
    pub sigma: usize,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct Index {
    pub(crate) g: Grammar,
    pub(crate) dag: Dag,
    pub(crate) grid: Grid,
    pub(crate) params: Params,
    pub(crate) rebuilds: u64,
}

impl Index {
    /// Build, retrying with fresh seeds after height failures.
    pub fn build(text: &[u8], params: Params) -> Result<Index> {
        let mut last = None;
        for attempt in 0..=params.max_retries {
            let p = Params { seed: reseed(params.seed, attempt), ..params };
            match Index::build_once(text, p) {
                Ok(mut idx) => {
                    idx.rebuilds = attempt as u64;
                    return Ok(idx);
                }
                Err(e @ Error::HeightBound { .. }) => {
                    log::info!("build attempt {attempt} failed: {e}");
                    last = Some(e);
                }
                Err(e) => return Err(e),
            }
        }
        Err(last.unwrap())
    }

    /// Build with exactly `params.seed`, failing on a height violation.
    pub fn build_once(text: &[u8], params: Params) -> Result<Index> {
        let g = grammar::build(text, params.seed, params.w)?;
        Ok(Index::assemble(g, params))
    }

    pub(crate) fn assemble(g: Grammar, params: Params) -> Index {
        let dag = Dag::build(&g, cache_budget(params.alpha), params.kappa as usize);
        let grid = Grid::build(&g, &dag);
        Index { g, dag, grid, params, rebuilds: 0 }
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn seed(&self) -> u64 {
        self.g.seed()
    }

    pub fn len(&self) -> u64 {
        self.g.text_len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn height(&self) -> u32 {
        self.g.height(self.g.start())
    }

    pub fn root(&self) -> NodeId {
        self.g.start()
    }

    pub fn grammar(&self) -> &Grammar {
        &self.g
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// How many times the index was rebuilt from scratch after a height
    /// failure (including the initial build's retries).
    pub fn rebuild_count(&self) -> u64 {
        self.rebuilds
    }

    fn check_range(&self, pos: u64, len: u64) -> Result<()> {
        let n = self.len();
        if pos == 0 || pos > n || len > n - pos + 1 {
            return Err(Error::OutOfRange { pos, len: n });
        }
        Ok(())
    }

    /// T[pos..pos+len-1], 1-based.
    pub fn extract(&self, pos: u64, len: u64) -> Result<Vec<u8>> {
        if len == 0 && pos >= 1 && pos <= self.len() + 1 {
            return Ok(Vec::new());
        }
        self.check_range(pos, len)?;
        Ok(text_access::extract(&self.g, &self.dag, pos, len))
    }

    pub fn text(&self) -> Vec<u8> {
        text_access::extract(&self.g, &self.dag, 1, self.len())
    }

    pub fn lce(&self, i: u64, j: u64) -> Result<u64> {
        self.check_range(i, 1)?;
        self.check_range(j, 1)?;
        Ok(text_access::lce(&self.g, &self.dag, i, j, true))
    }

    pub fn rlce(&self, i: u64, j: u64) -> Result<u64> {
        self.check_range(i, 1)?;
        self.check_range(j, 1)?;
        Ok(text_access::rlce(&self.g, &self.dag, i, j, true))
    }

    /// Sorted 1-based starting positions of `pattern`.
    pub fn locate(&self, pattern: &[u8]) -> Vec<u64> {
        self.locate_with(pattern, LocateOptions::default()).positions
    }

    pub fn locate_with(&self, pattern: &[u8], opts: LocateOptions) -> LocateReport {
        locate::locate(&self.g, &self.dag, &self.grid, pattern, opts)
    }

    /// Locate many patterns, spread over worker threads when enabled.
    pub fn locate_batch(&self, patterns: &[Vec<u8>]) -> Vec<Vec<u64>> {
        crate::par::map(patterns, |p| self.locate(p))
    }

    pub fn stats(&self) -> IndexStats {
        let (e, i) = self.g.counts();
        let sigma = self.g.iter().filter(|(_, n)| matches!(n.rule, grammar::Rule::Char(_))).count();
        IndexStats {
            n: self.len(),
            height: self.height(),
            explicit_nodes: e,
            implicit_nodes: i,
            edges: self.dag.edge_count(),
            sigma,
            seed: self.seed(),
        }
    }
}
