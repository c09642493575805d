use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rrindex::{Index, Params};

use crate::Fail;

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long, conflicts_with = "text")]
    index: Option<PathBuf>,
    #[arg(long)]
    text: Option<PathBuf>,
    /// Comma-separated pattern / edit lengths.
    #[arg(long, value_delimiter = ',', default_value = "10,100")]
    m: Vec<u64>,
    #[arg(long, default_value_t = 20)]
    repeats: u32,
    #[arg(long, default_value_t = 3)]
    warmup: u32,
    #[arg(long, value_delimiter = ',', default_value = "insert,delete,locate")]
    ops: Vec<String>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, var.sqrt())
}

fn random_bytes(r: &mut ChaCha8Rng, m: u64, alphabet: &[u8]) -> Vec<u8> {
    (0..m).map(|_| alphabet[r.random_range(0..alphabet.len())]).collect()
}

pub fn run(a: BenchArgs) -> Result<(), Fail> {
    let mut idx = match (&a.index, &a.text) {
        (Some(p), _) => Index::load(p)?,
        (None, Some(t)) => Index::build(&std::fs::read(t)?, Params::default())?,
        (None, None) => return Err(Fail(2, "either --index or --text is required".into())),
    };
    let mut alphabet: Vec<u8> = idx.text().into_iter().collect::<std::collections::BTreeSet<_>>().into_iter().collect();
    if alphabet.is_empty() {
        alphabet.push(b'a');
    }
    eprintln!("# seed={} n={} repeats={} warmup={}", a.seed, idx.len(), a.repeats, a.warmup);
    let mut r = ChaCha8Rng::seed_from_u64(a.seed);
    println!("op,m,mean_ms,stddev_ms");
    for op in &a.ops {
        for &m in &a.m {
            let mut times = Vec::with_capacity(a.repeats as usize);
            for rep in 0..a.warmup + a.repeats {
                let n = idx.len();
                let ms = match op.as_str() {
                    "insert" => {
                        let pos = r.random_range(1..=n + 1);
                        let bytes = random_bytes(&mut r, m, &alphabet);
                        let t0 = Instant::now();
                        idx.insert(pos, &bytes)?;
                        let el = t0.elapsed();
                        idx.delete(pos, m)?;
                        el
                    }
                    "delete" => {
                        if n < m + 2 {
                            return Err(Fail(3, format!("text too short to delete {m} bytes")));
                        }
                        let pos = r.random_range(1..=n - m + 1);
                        let gone = idx.extract(pos, m)?;
                        let t0 = Instant::now();
                        idx.delete(pos, m)?;
                        let el = t0.elapsed();
                        idx.insert(pos, &gone)?;
                        el
                    }
                    "locate" => {
                        let m = m.min(n);
                        let pos = r.random_range(1..=n - m + 1);
                        let p = idx.extract(pos, m)?;
                        let t0 = Instant::now();
                        std::hint::black_box(idx.locate(&p));
                        t0.elapsed()
                    }
                    other => return Err(Fail(2, format!("unknown bench op {other:?}"))),
                };
                if rep >= a.warmup {
                    times.push(ms.as_secs_f64() * 1e3);
                }
            }
            let (mean, sd) = mean_sd(&times);
            println!("{op},{m},{mean:.4},{sd:.4}");
        }
    }
    Ok(())
}
