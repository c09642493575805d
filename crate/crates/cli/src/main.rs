//! `rrindex` command-line tool.
//!
//! Exit codes: 0 success, 2 usage, 3 data error, 4 verification failure.

mod bench;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rrindex::opscript::{self, Op};
use rrindex::{Index, LocateOptions, Params};
use serde_json::json;

#[derive(Parser)]
#[command(name = "rrindex", version, about = "Dynamic grammar-compressed self-index")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build an index from a text file.
    Build {
        #[arg(long)]
        text: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Find all occurrences of a pattern.
    Locate {
        #[arg(long)]
        index: PathBuf,
        #[command(flatten)]
        pattern: PatternArgs,
        /// One pattern per line; prints per-query timing.
        #[arg(long, conflicts_with = "pattern")]
        pattern_file: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        /// Enumerate occurrences without the cached ancestor walks.
        #[arg(long)]
        naive_vocc: bool,
    },
    /// Apply an op script and rewrite the index.
    Apply {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        ops: PathBuf,
        /// Original text; every op is checked against a plain splice model.
        #[arg(long)]
        verify_against: Option<PathBuf>,
        /// Write the result here instead of over the input index.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print size statistics as JSON.
    Stats {
        #[arg(long)]
        index: PathBuf,
        /// Compute the substring complexity only up to this length.
        #[arg(long, default_value_t = 5000)]
        delta_limit: u64,
    },
    /// Check all structural invariants.
    Verify {
        #[arg(long)]
        index: PathBuf,
        /// Also compare against this text.
        #[arg(long)]
        text: Option<PathBuf>,
        /// Run brute-force locate checks when n is at most this.
        #[arg(long, default_value_t = 20_000)]
        oracle_limit: u64,
    },
    /// Print T[pos..pos+len-1].
    Extract {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        pos: u64,
        #[arg(long)]
        len: u64,
        #[arg(long)]
        hex: bool,
    },
    /// Time updates and queries; prints CSV.
    Bench(bench::BenchArgs),
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long, env = "RRINDEX_SEED")]
    seed: Option<u64>,
    #[arg(long, default_value_t = 2)]
    w: u32,
    #[arg(long, default_value_t = 0)]
    alpha: u32,
    #[arg(long, default_value_t = 8)]
    kappa: u8,
    /// Fresh seeds tried after a height failure.
    #[arg(long, default_value_t = 8)]
    retries: u32,
}

impl ParamArgs {
    fn params(&self) -> Params {
        let d = Params::default();
        Params {
            seed: self.seed.unwrap_or(d.seed),
            w: self.w,
            alpha: self.alpha,
            kappa: self.kappa,
            max_retries: self.retries,
        }
    }
}

#[derive(Args)]
struct PatternArgs {
    /// Pattern as hex (or literal text with --raw).
    #[arg(long)]
    pattern: Option<String>,
    #[arg(long)]
    raw: bool,
}

/// Failure with its exit code.
struct Fail(u8, String);

impl From<rrindex::Error> for Fail {
    fn from(e: rrindex::Error) -> Self {
        Fail(3, e.to_string())
    }
}

impl From<std::io::Error> for Fail {
    fn from(e: std::io::Error) -> Self {
        Fail(3, e.to_string())
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Fail> {
    std::fs::read(path).map_err(|e| Fail(3, format!("{}: {e}", path.display())))
}

fn decode(s: &str, raw: bool) -> Result<Vec<u8>, Fail> {
    if raw {
        Ok(s.as_bytes().to_vec())
    } else {
        hex::decode(s.trim()).map_err(|e| Fail(3, format!("bad hex pattern {s:?}: {e}")))
    }
}

fn load(path: &Path) -> Result<Index, Fail> {
    Index::load(path).map_err(|e| Fail(3, format!("{}: {e}", path.display())))
}

fn join(v: &[u64]) -> String {
    v.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" ")
}

fn peak_rss_kb() -> Option<u64> {
    let s = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = s.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

fn run(cli: Cli) -> Result<(), Fail> {
    match cli.cmd {
        Cmd::Build { text, out, params } => {
            let t = read(&text)?;
            let t0 = Instant::now();
            let idx = Index::build(&t, params.params())?;
            let ms = t0.elapsed().as_secs_f64() * 1e3;
            idx.save(&out)?;
            let s = idx.stats();
            let v = json!({
                "n": s.n, "sigma": s.sigma, "H": s.height, "M": s.explicit_nodes,
                "impl_nodes": s.implicit_nodes, "rules": s.explicit_nodes + s.implicit_nodes,
                "seed": s.seed, "build_ms": ms,
            });
            println!("{v}");
        }
        Cmd::Locate { index, pattern, pattern_file, json, naive_vocc } => {
            let idx = load(&index)?;
            let opts = LocateOptions { naive_vocc, ..Default::default() };
            if let Some(f) = pattern_file {
                let body = String::from_utf8_lossy(&read(&f)?).into_owned();
                let pats = body
                    .lines()
                    .filter(|l| !l.trim().is_empty())
                    .map(|l| decode(l, pattern.raw))
                    .collect::<Result<Vec<_>, _>>()?;
                let res = rrindex::par::map(&pats, |p| {
                    let t0 = Instant::now();
                    let occ = idx.locate_with(p, opts).positions;
                    (occ, t0.elapsed().as_secs_f64() * 1e6)
                });
                if json {
                    let rows: Vec<_> = pats
                        .iter()
                        .zip(&res)
                        .map(|(p, (occ, us))| json!({"pattern": hex::encode(p), "count": occ.len(), "us": us, "positions": occ}))
                        .collect();
                    println!("{}", serde_json::Value::Array(rows));
                } else {
                    println!("pattern\tcount\tus");
                    for (p, (occ, us)) in pats.iter().zip(&res) {
                        println!("{}\t{}\t{:.1}", hex::encode(p), occ.len(), us);
                    }
                }
            } else {
                let Some(p) = pattern.pattern.as_deref() else {
                    return Err(Fail(2, "either --pattern or --pattern-file is required".into()));
                };
                let p = decode(p, pattern.raw)?;
                let occ = idx.locate_with(&p, opts).positions;
                if json {
                    println!("{}", json!({"count": occ.len(), "positions": occ}));
                } else if occ.is_empty() {
                    println!("count=0");
                } else {
                    println!("count={}", occ.len());
                    println!("{}", join(&occ));
                }
            }
        }
        Cmd::Apply { index, ops, verify_against, out } => {
            let mut idx = load(&index)?;
            let script = String::from_utf8_lossy(&read(&ops)?).into_owned();
            let lines = opscript::parse(&script)?;
            let mut reference = verify_against.as_deref().map(read).transpose()?;
            if let Some(r) = &reference {
                if idx.text() != *r {
                    return Err(Fail(4, "index text differs from --verify-against before any op".into()));
                }
            }
            for l in &lines {
                let at = |e: rrindex::Error| Fail(3, format!("op at line {}: {e}", l.line));
                match &l.op {
                    Op::Insert { pos, bytes } => {
                        idx.insert(*pos, bytes).map_err(at)?;
                        if let Some(r) = reference.as_mut() {
                            let i = *pos as usize - 1;
                            r.splice(i..i, bytes.iter().copied());
                        }
                    }
                    Op::Delete { pos, len } => {
                        idx.delete(*pos, *len).map_err(at)?;
                        if let Some(r) = reference.as_mut() {
                            let i = *pos as usize - 1;
                            r.drain(i..i + *len as usize);
                        }
                    }
                    Op::Query { pattern } => {
                        let occ = idx.locate(pattern);
                        println!("line {}: count={} {}", l.line, occ.len(), join(&occ));
                        if let Some(r) = &reference {
                            if occ != rrindex::oracle::naive_occ(r, pattern) {
                                return Err(Fail(4, format!("op at line {}: locate disagrees with reference", l.line)));
                            }
                        }
                    }
                }
                if let Some(r) = &reference {
                    if idx.text() != *r {
                        return Err(Fail(4, format!("op at line {}: extracted text differs from reference", l.line)));
                    }
                }
            }
            idx.save(out.as_deref().unwrap_or(&index))?;
        }
        Cmd::Stats { index, delta_limit } => {
            let idx = load(&index)?;
            let s = idx.stats();
            let mut v = json!({
                "n": s.n, "H": s.height, "M": s.explicit_nodes, "impl_nodes": s.implicit_nodes,
                "edges": s.edges, "sigma": s.sigma, "seed": s.seed,
            });
            if s.n <= delta_limit {
                let d = rrindex::oracle::naive_delta(&idx.text());
                v["delta_naive"] = json!(*d.numer() as f64 / *d.denom() as f64);
            }
            if let Some(kb) = peak_rss_kb() {
                v["peak_rss"] = json!(kb * 1024);
            }
            println!("{v}");
        }
        Cmd::Verify { index, text, oracle_limit } => {
            let idx = load(&index)?;
            let mut problems: Vec<String> = idx.check_invariants().iter().map(|v| v.to_string()).collect();
            let t = idx.text();
            if let Some(path) = text {
                if read(&path)? != t {
                    problems.push("text: index does not derive the given file".into());
                }
            }
            if idx.len() <= oracle_limit {
                for m in [1usize, 2, 3, 5, 8, 16] {
                    for i in (0..t.len().saturating_sub(m - 1)).step_by((t.len() / 50).max(1)) {
                        let p = &t[i..i + m];
                        if idx.locate(p) != rrindex::oracle::naive_occ(&t, p) {
                            problems.push(format!("locate: pattern {} disagrees with scan", hex::encode(p)));
                        }
                    }
                }
            }
            if problems.is_empty() {
                println!("OK");
            } else {
                for p in &problems {
                    println!("{p}");
                }
                return Err(Fail(4, format!("{} violation(s)", problems.len())));
            }
        }
        Cmd::Extract { index, pos, len, hex: as_hex } => {
            let idx = load(&index)?;
            let bytes = idx.extract(pos, len)?;
            if as_hex {
                println!("{}", hex::encode(&bytes));
            } else {
                use std::io::Write;
                std::io::stdout().write_all(&bytes)?;
            }
        }
        Cmd::Bench(args) => bench::run(args)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
