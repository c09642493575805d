//! Generic containers used by the grammar, DAG and grid layers.

mod indexed_list;
mod order_list;
mod rule_table;
mod slab;

pub use indexed_list::{IndexedList, ListHandle};
pub use order_list::OrderList;
pub use rule_table::{RuleKey, RuleTable};
pub use slab::Slab;

/// splitmix64 step, used for treap priorities and the assignment PRF.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
