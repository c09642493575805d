use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("n must be ≥ 2 (got {0})")]
    TextTooShort(u64),
    #[error("grammar height {height} exceeds bound {bound}")]
    HeightBound { height: u32, bound: u32 },
    #[error("position {pos} out of range for text of length {len}")]
    OutOfRange { pos: u64, len: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("corrupt index file: {0}")]
    Format(String),
    #[error("op script line {line}: {msg}")]
    Script { line: usize, msg: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
