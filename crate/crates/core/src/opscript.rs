//! Operation scripts: one edit or query per line.
//!
//! ```text
//! # comment
//! I <pos> <hex bytes>    insert before position pos
//! D <pos> <len>          delete len bytes starting at pos
//! Q <hex bytes>          locate
//! ```

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Op {
    Insert { pos: u64, bytes: Vec<u8> },
    Delete { pos: u64, len: u64 },
    Query { pattern: Vec<u8> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScriptLine {
    /// 1-based line number in the script.
    pub line: usize,
    pub op: Op,
}

pub fn parse(script: &str) -> Result<Vec<ScriptLine>> {
    let mut out = Vec::new();
    for (i, raw) in script.lines().enumerate() {
        let line = i + 1;
        let text = raw.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let err = |msg: &str| Error::Script { line, msg: msg.to_string() };
        let parts: Vec<&str> = text.split_whitespace().collect();
        let num = |s: &str| s.parse::<u64>().map_err(|_| err(&format!("bad number {s:?}")));
        let hex = |s: &str| hex::decode(s).map_err(|_| err(&format!("bad hex {s:?}")));
        let op = match parts.as_slice() {
            ["I", pos, bytes] => Op::Insert { pos: num(pos)?, bytes: hex(bytes)? },
            ["D", pos, len] => Op::Delete { pos: num(pos)?, len: num(len)? },
            ["Q", pat] => Op::Query { pattern: hex(pat)? },
            _ => return Err(err(&format!("unrecognised op {text:?}"))),
        };
        out.push(ScriptLine { line, op });
    }
    Ok(out)
}
