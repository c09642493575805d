//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::collections::{BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::Rng;
use rrindex::grammar::{self, height_threshold, NodeId};
use rrindex::grid::Grid;
use rrindex::oracle::{coordinates, kmp_occ, naive_occ, reachable, tree_vocc_all};
use rrindex::{Index, LocateOptions, Params};

const STATIC_TEXTS: usize = 500;
const PATTERNS_PER_TEXT: usize = 20;
const MAX_STATIC_N: usize = 2000;
const MAX_PATTERN: usize = 32;
const SESSIONS: usize = 200;
const OPS_PER_SESSION: usize = 50;
const MAX_EDIT: usize = 64;
const SESSION_PATTERNS: usize = 10;
const MIN_REBUILD_CASES: usize = 100;
const COMPLETENESS_CASES: usize = 150;
const HEIGHT_BUILDS: usize = 1000;
const GRID_RECTANGLES: usize = 1000;
const MAX_GRID_M: usize = 5000;
const GROWTH_LIMIT: f64 = 2.5;
const BIG_TEXT: usize = 10 << 20;
const INSERT_LIMIT: Duration = Duration::from_secs(1);
const LOCATE_LIMIT: Duration = Duration::from_millis(250);
const MAX_BIG_OCC: usize = 10_000;

type Outcome = Result<String, String>;
type Check = Result<(), String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn first_err(errs: &[Option<&String>]) -> Option<String> {
    errs.iter().flatten().next().map(|e| e.to_string())
}

fn guarded<T>(f: impl FnOnce() -> Result<T, String>) -> Result<T, String> {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(r) => r,
        Err(p) => Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into())),
    }
}

/// Uniform or block-repetitive text over an alphabet of `sigma` bytes.
fn text_over(r: &mut impl Rng, n: usize, sigma: u16) -> Vec<u8> {
    (0..n)
        .map(|_| {
            let c = r.random_range(0..sigma);
            if sigma == 256 {
                c as u8
            } else {
                b'a' + c as u8
            }
        })
        .collect()
}

fn gen_text(r: &mut impl Rng, n: usize, sigma: u16) -> Vec<u8> {
    if r.random_bool(0.5) {
        return text_over(r, n, sigma);
    }
    let bl = r.random_range(1..=n.clamp(1, 40));
    let block = text_over(r, bl, sigma);
    let mut t = Vec::with_capacity(n + bl);
    while t.len() < n {
        if r.random_bool(0.05) {
            t.extend(text_over(r, 1, sigma));
        } else {
            t.extend_from_slice(&block);
        }
    }
    t.truncate(n);
    t
}

fn gen_pattern(r: &mut impl Rng, t: &[u8], sigma: u16) -> Vec<u8> {
    let m = r.random_range(1..=MAX_PATTERN);
    if m <= t.len() && r.random_bool(0.7) {
        let i = r.random_range(0..=t.len() - m);
        t[i..i + m].to_vec()
    } else {
        text_over(r, m, sigma)
    }
}

fn vocc_agrees(idx: &Index) -> Result<usize, String> {
    let (g, dag) = (idx.grammar(), idx.dag());
    let all = tree_vocc_all(g);
    let mut nodes = 0;
    for u in dag.endpoints() {
        let mut fast = dag.vocc_fast(g, u);
        let mut naive = dag.vocc_naive(g, u);
        fast.sort_unstable();
        naive.sort_unstable();
        let tree = all.get(&u).cloned().unwrap_or_default();
        check(fast == tree && naive == tree, || format!("node {u:?}: fast {fast:?} naive {naive:?} tree {tree:?}"))?;
        nodes += 1;
    }
    Ok(nodes)
}

fn round_trip(idx: &Index, patterns: &[Vec<u8>]) -> Result<(), String> {
    let bytes = idx.to_bytes();
    let back = Index::from_bytes(&bytes).map_err(|e| format!("load: {e}"))?;
    check(back.to_bytes() == bytes, || "re-serialized bytes differ".into())?;
    check(back.text() == idx.text(), || "loaded text differs".into())?;
    for p in patterns {
        check(back.locate(p) == idx.locate(p), || format!("loaded index answers {p:?} differently"))?;
    }
    Ok(())
}

#[derive(Default)]
struct StaticTally {
    texts: usize,
    patterns: usize,
    occurrences: usize,
    vocc_builds: usize,
    vocc_nodes: usize,
    round_trips: usize,
}

/// Criteria 1, 4 and the static halves of 6 and 11.
fn static_suite() -> (Outcome, Outcome, Result<StaticTally, String>) {
    let mut t1 = Ok(());
    let mut t4 = Ok(());
    let tally = guarded(|| {
        let mut r = common::rng(0xacc1);
        let mut s = StaticTally::default();
        for i in 0..STATIC_TEXTS {
            let sigma = [2u16, 4, 26, 256][i % 4];
            let n = r.random_range(2..=MAX_STATIC_N);
            let t = gen_text(&mut r, n, sigma);
            let idx = Index::build(&t, Params { seed: i as u64, ..Params::default() }).map_err(|e| e.to_string())?;
            let pats: Vec<Vec<u8>> = (0..PATTERNS_PER_TEXT).map(|_| gen_pattern(&mut r, &t, sigma)).collect();
            for p in &pats {
                let want = naive_occ(&t, p);
                let rep = idx.locate_with(p, LocateOptions { unsorted: true, ..Default::default() });
                let mut got = rep.positions.clone();
                got.sort_unstable();
                if t1.is_ok() && got != want {
                    t1 = Err(format!("text {i} pattern {p:?}: got {} want {}", got.len(), want.len()));
                }
                let z: u64 = rep.primaries.iter().map(|q| q.count).sum();
                let distinct = got.windows(2).all(|w| w[0] < w[1]);
                if t4.is_ok() && p.len() >= 2 && (z as usize != want.len() || !distinct) {
                    t4 = Err(format!("text {i} pattern {p:?}: sum {z} vs |Occ| {}", want.len()));
                }
                s.patterns += 1;
                s.occurrences += want.len();
            }
            s.vocc_nodes += vocc_agrees(&idx).map_err(|e| format!("vOcc, text {i}: {e}"))?;
            s.vocc_builds += 1;
            round_trip(&idx, &pats).map_err(|e| format!("serialization, text {i}: {e}"))?;
            s.round_trips += 1;
            s.texts += 1;
        }
        Ok(s)
    });
    let c1 = match (&tally, first_err(&[tally.as_ref().err(), t1.as_ref().err()])) {
        (Ok(s), None) => Ok(format!("{} texts, {} patterns, {} occurrences", s.texts, s.patterns, s.occurrences)),
        (_, e) => Err(e.unwrap_or_default()),
    };
    let c4 = match (&tally, first_err(&[tally.as_ref().err(), t4.as_ref().err()])) {
        (Ok(s), None) => Ok(format!("primary counts sum to |Occ| on all {} locates", s.patterns)),
        (_, e) => Err(e.unwrap_or_default()),
    };
    (c1, c4, tally)
}

#[derive(Default)]
struct DynamicTally {
    ops: usize,
    rebuild_cases: usize,
    height_rebuilds: u64,
    vocc_checks: usize,
    round_trips: usize,
}

/// Criterion 2 plus the dynamic halves of 3, 6 and 11.
fn dynamic_suite() -> (Outcome, Result<DynamicTally, String>, Check, Check, Check) {
    let mut c3 = Ok(());
    let mut c6 = Ok(());
    let mut c11 = Ok(());
    let tally = guarded(|| {
        let mut r = common::rng(0xacc2);
        let mut s = DynamicTally::default();
        for sess in 0..SESSIONS {
            let sigma = [2u16, 4, 26, 256][sess % 4];
            let n0 = r.random_range(2..=400);
            let mut t = gen_text(&mut r, n0, sigma);
            let mut idx = Index::build(&t, Params { seed: 5000 + sess as u64, ..Params::default() })
                .map_err(|e| e.to_string())?;
            for op in 0..OPS_PER_SESSION {
                let n = t.len();
                let at = format!("session {sess} op {op}");
                if n <= 2 || r.random_bool(0.55) {
                    let m = r.random_range(1..=MAX_EDIT);
                    let ins = if r.random_bool(0.5) && m <= n {
                        let i = r.random_range(0..=n - m);
                        t[i..i + m].to_vec()
                    } else {
                        text_over(&mut r, m, sigma)
                    };
                    let pos = r.random_range(1..=n + 1);
                    idx.insert(pos as u64, &ins).map_err(|e| format!("{at}: insert: {e}"))?;
                    t.splice(pos - 1..pos - 1, ins);
                } else {
                    let pos = r.random_range(1..=n - 2);
                    let len = r.random_range(1..=(n - pos - 1).min(MAX_EDIT));
                    idx.delete(pos as u64, len as u64).map_err(|e| format!("{at}: delete: {e}"))?;
                    t.drain(pos - 1..pos - 1 + len);
                }
                let got = idx.extract(1, t.len() as u64).map_err(|e| format!("{at}: extract: {e}"))?;
                check(got == t, || format!("{at}: text differs from reference"))?;
                let pats: Vec<Vec<u8>> = (0..SESSION_PATTERNS).map(|_| gen_pattern(&mut r, &t, sigma)).collect();
                for p in &pats {
                    check(idx.locate(p) == naive_occ(&t, p), || format!("{at}: locate {p:?}"))?;
                }
                if c3.is_ok() {
                    let fresh = grammar::build(&t, idx.seed(), idx.params().w).map_err(|e| e.to_string())?;
                    if idx.grammar().signature() != fresh.signature() {
                        c3 = Err(format!("{at}: grammar differs from a fresh build"));
                    }
                    s.rebuild_cases += 1;
                }
                if c6.is_ok() {
                    match vocc_agrees(&idx) {
                        Ok(_) => s.vocc_checks += 1,
                        Err(e) => c6 = Err(format!("{at}: {e}")),
                    }
                }
                if c11.is_ok() {
                    match round_trip(&idx, &pats) {
                        Ok(()) => s.round_trips += 1,
                        Err(e) => c11 = Err(format!("{at}: {e}")),
                    }
                }
                s.ops += 1;
            }
            let v = idx.check_invariants();
            check(v.is_empty(), || format!("session {sess}: {v:?}"))?;
            s.height_rebuilds += idx.rebuild_count();
        }
        Ok(s)
    });
    let c2 = match &tally {
        Ok(s) => Ok(format!("{} sessions, {} edits, {} locates", SESSIONS, s.ops, s.ops * SESSION_PATTERNS)),
        Err(e) => Err(e.clone()),
    };
    (c2, tally, c3, c6, c11)
}

/// Criterion 5: brute force over every split and every explicit node.
fn completeness() -> Outcome {
    guarded(|| {
        let mut r = common::rng(0xacc5);
        let mut primaries = 0;
        let mut patterns = 0;
        for case in 0..COMPLETENESS_CASES {
            let t = common::mixed_text(&mut r, 150);
            let idx = Index::build(&t, Params { seed: 9000 + case as u64, ..Params::default() })
                .map_err(|e| e.to_string())?;
            let g = idx.grammar();
            let live = reachable(g);
            let coords: Vec<(NodeId, Vec<u8>, Vec<u8>)> = idx
                .dag()
                .endpoints()
                .filter(|u| live.contains(u))
                .map(|u| {
                    let (l, rr) = coordinates(g, u);
                    (u, l, rr)
                })
                .collect();
            for _ in 0..10 {
                let mut p = common::pattern_for(&mut r, &t, 12);
                if p.len() < 2 {
                    p.push(b'a');
                }
                let m = p.len();
                let mut brute = BTreeSet::new();
                for l in 1..m {
                    let left: Vec<u8> = p[..l].iter().rev().copied().collect();
                    for (u, lc, rc) in &coords {
                        if lc.starts_with(&left) && rc.starts_with(&p[l..]) {
                            brute.insert((*u, l as u64));
                        }
                    }
                }
                let rep = idx.locate_with(&p, LocateOptions::default());
                for &(u, l) in &brute {
                    check(rep.splits.contains(&l), || {
                        format!("case {case} pattern {p:?}: node {u:?} matches at split {l}, splits {:?}", rep.splits)
                    })?;
                }
                let found: BTreeSet<(NodeId, u64)> = rep.primaries.iter().map(|q| (q.node, q.split)).collect();
                check(found == brute, || {
                    format!("case {case} pattern {p:?}: reported primaries differ from brute force")
                })?;
                primaries += brute.len();
                patterns += 1;
            }
        }
        Ok(format!(
            "{COMPLETENESS_CASES} texts, {patterns} patterns, {primaries} primary occurrences all at candidate splits"
        ))
    })
}

/// Criterion 7.
fn height_bound() -> Outcome {
    guarded(|| {
        let mut r = common::rng(0xacc7);
        let texts: Vec<Vec<u8>> =
            (0..HEIGHT_BUILDS).map(|i| text_over(&mut r, 1024, [2u16, 4, 26, 256][i % 4])).collect();
        let bound2 = height_threshold(1024, 2);
        let mut worst = 0;
        for (i, t) in texts.iter().enumerate() {
            match Index::build_once(t, Params { seed: i as u64, w: 2, ..Params::default() }) {
                Ok(idx) => worst = worst.max(idx.height()),
                Err(e) => return Err(format!("w=2 build {i} failed: {e}")),
            }
        }
        let mut failures = 0;
        let mut recovered = 0;
        for (i, t) in texts.iter().enumerate() {
            let p = Params { seed: i as u64, w: 0, ..Params::default() };
            if grammar::build(t, p.seed, 0).is_ok() {
                continue;
            }
            failures += 1;
            let idx = Index::build(t, p).map_err(|e| format!("w=0 text {i}: retry did not recover: {e}"))?;
            check(idx.rebuild_count() > 0 && idx.text() == *t, || format!("w=0 text {i}: bad recovery"))?;
            check(idx.height() <= height_threshold(1024, 0), || format!("w=0 text {i}: height {}", idx.height()))?;
            check(idx.check_invariants().is_empty(), || format!("w=0 text {i}: invariants"))?;
            for _ in 0..5 {
                let p = common::pattern_for(&mut r, t, 16);
                check(idx.locate(&p) == naive_occ(t, &p), || format!("w=0 text {i}: locate"))?;
            }
            recovered += 1;
        }
        check(failures > 0, || "w=0 produced no height failures".into())?;
        Ok(format!(
            "w=2: 0/{HEIGHT_BUILDS} failures, max H {worst} <= {bound2}; w=0: {failures} failures, {recovered} recovered by retry"
        ))
    })
}

fn sorted_by_coord(g: &rrindex::grammar::Grammar, pts: &[NodeId], x: bool) -> Vec<NodeId> {
    let mut keyed: Vec<(Vec<u8>, NodeId)> = pts
        .iter()
        .map(|&u| {
            let (l, r) = coordinates(g, u);
            (if x { l } else { r }, u)
        })
        .collect();
    keyed.sort();
    keyed.into_iter().map(|(_, u)| u).collect()
}

/// Criterion 8.
fn grid_soundness() -> Outcome {
    guarded(|| {
        let mut r = common::rng(0xacc8);
        let mut rects = 0;
        let mut builds = 0;
        let mut biggest = 0;
        while rects < GRID_RECTANGLES || builds < 20 {
            let n = r.random_range(50..=6000);
            let sigma = [2u16, 4, 26, 256][builds % 4];
            let t = gen_text(&mut r, n, sigma);
            let idx = Index::build(&t, Params { seed: 700 + builds as u64, ..Params::default() })
                .map_err(|e| e.to_string())?;
            let (g, dag) = (idx.grammar(), idx.dag());
            let all: Vec<NodeId> = dag.endpoints().collect();
            if all.len() > MAX_GRID_M {
                continue;
            }
            builds += 1;
            biggest = biggest.max(all.len());
            check(idx.grid().x_order() == sorted_by_coord(g, &all, true), || format!("build {builds}: X order"))?;
            check(idx.grid().y_order() == sorted_by_coord(g, &all, false), || format!("build {builds}: Y order"))?;

            let mut grid = Grid::default();
            let mut on: Vec<NodeId> = Vec::new();
            let mut off = all.clone();
            for _ in 0..8 {
                for _ in 0..r.random_range(0..=off.len().min(200)) {
                    let k = r.random_range(0..off.len());
                    let u = off.swap_remove(k);
                    grid.insert(g, dag, u);
                    on.push(u);
                }
                for _ in 0..r.random_range(0..=on.len() / 3) {
                    let k = r.random_range(0..on.len());
                    let u = on.swap_remove(k);
                    grid.remove(u);
                    off.push(u);
                }
                check(grid.x_order() == sorted_by_coord(g, &on, true), || format!("build {builds}: dynamic X order"))?;
                check(grid.y_order() == sorted_by_coord(g, &on, false), || format!("build {builds}: dynamic Y order"))?;
                if on.is_empty() {
                    continue;
                }
                let ranks: HashMap<NodeId, (usize, usize)> =
                    on.iter().map(|&u| (u, (grid.x_rank(u), grid.y_rank(u)))).collect();
                let len = on.len();
                for _ in 0..8 {
                    let (a, b) = (r.random_range(0..len), r.random_range(0..len));
                    let (c, d) = (r.random_range(0..len), r.random_range(0..len));
                    let (x, y) = ((a.min(b), a.max(b)), (c.min(d), c.max(d)));
                    let mut got = Vec::new();
                    grid.report(x, y, &mut got);
                    got.sort_unstable();
                    let mut want: Vec<NodeId> = ranks
                        .iter()
                        .filter(|(_, &(xr, yr))| x.0 <= xr && xr <= x.1 && y.0 <= yr && yr <= y.1)
                        .map(|(&u, _)| u)
                        .collect();
                    want.sort_unstable();
                    check(got == want, || format!("build {builds}: rectangle {x:?} x {y:?}"))?;
                    rects += 1;
                }
            }
        }
        Ok(format!("{rects} rectangles on {builds} dynamic grids; orders match sorts up to M = {biggest}"))
    })
}

/// Criterion 9.
fn repetitiveness() -> Outcome {
    guarded(|| {
        let mut r = common::rng(0xacc9);
        let base = text_over(&mut r, 1024, 26);
        let mut ms = Vec::new();
        for k in [1usize, 4, 16, 64] {
            let g = grammar::build(&base.repeat(k), 42, 2).map_err(|e| e.to_string())?;
            ms.push((k, g.counts().0));
        }
        let growth = ms[3].1 as f64 / ms[0].1 as f64;
        let line = ms.iter().map(|(k, m)| format!("k={k}: M={m}")).collect::<Vec<_>>().join(", ");
        check(growth < GROWTH_LIMIT, || format!("{line}; growth {growth:.3} >= {GROWTH_LIMIT}"))?;
        Ok(format!("{line}; growth {growth:.3} < {GROWTH_LIMIT}"))
    })
}

/// Criterion 10.
fn performance() -> Outcome {
    guarded(|| {
        let mut r = common::rng(0xacca);
        let base = text_over(&mut r, 10 * 1024, 4);
        let mut t = Vec::with_capacity(BIG_TEXT + 1024);
        while t.len() < BIG_TEXT {
            let mut copy = base.clone();
            for _ in 0..3 {
                let i = r.random_range(0..copy.len());
                copy[i] = b'a' + r.random_range(0..4);
            }
            t.extend_from_slice(&copy);
        }
        t.truncate(BIG_TEXT);
        let t0 = Instant::now();
        let mut idx = Index::build(&t, Params::default()).map_err(|e| e.to_string())?;
        let build = t0.elapsed();

        let ins = text_over(&mut r, 100, 4);
        let pos = BIG_TEXT / 2 + 17;
        let t0 = Instant::now();
        idx.insert(pos as u64, &ins).map_err(|e| e.to_string())?;
        let insert = t0.elapsed();
        t.splice(pos - 1..pos - 1, ins);

        let start = r.random_range(0..base.len() - 100);
        let p = base[start..start + 100].to_vec();
        let t0 = Instant::now();
        let got = idx.locate(&p);
        let locate = t0.elapsed();
        let want = kmp_occ(&t, &p);
        check(got == want, || "10 MB locate differs from scan".into())?;
        check(want.len() <= MAX_BIG_OCC, || format!("pattern has {} occurrences", want.len()))?;
        check(idx.extract(pos as u64 - 5, 110).map_err(|e| e.to_string())? == t[pos - 6..pos + 104], || {
            "extract after insert".into()
        })?;
        let line = format!(
            "build {:.1} s, insert(m'=100) {:.1} ms, locate(m=100, {} occ) {:.1} ms",
            build.as_secs_f64(),
            insert.as_secs_f64() * 1e3,
            want.len(),
            locate.as_secs_f64() * 1e3
        );
        check(insert < INSERT_LIMIT && locate < LOCATE_LIMIT, || {
            format!("{line}; limits {INSERT_LIMIT:?} / {LOCATE_LIMIT:?}")
        })?;
        Ok(line)
    })
}

fn main() {
    let started = Instant::now();
    let (c1, c4, st) = static_suite();
    let (c2, dy, c3d, c6d, c11d) = dynamic_suite();

    let c3 = match first_err(&[c3d.as_ref().err(), dy.as_ref().err()]) {
        Some(e) => Err(e),
        None => {
            let s = dy.as_ref().unwrap();
            if s.rebuild_cases >= MIN_REBUILD_CASES {
                Ok(format!(
                    "{} update cases match a fresh build ({} height rebuilds)",
                    s.rebuild_cases, s.height_rebuilds
                ))
            } else {
                Err(format!("only {} cases", s.rebuild_cases))
            }
        }
    };
    let c6 = match first_err(&[c6d.as_ref().err(), st.as_ref().err(), dy.as_ref().err()]) {
        Some(e) => Err(e),
        None => {
            let (a, b) = (st.as_ref().unwrap(), dy.as_ref().unwrap());
            Ok(format!(
                "{} builds ({} explicit nodes) and {} post-update states",
                a.vocc_builds, a.vocc_nodes, b.vocc_checks
            ))
        }
    };
    let c11 = match first_err(&[c11d.as_ref().err(), st.as_ref().err(), dy.as_ref().err()]) {
        Some(e) => Err(e),
        None => {
            Ok(format!("{} indexes round-tripped", st.as_ref().unwrap().round_trips + dy.as_ref().unwrap().round_trips))
        }
    };
    let c5 = completeness();
    let c7 = height_bound();
    let c8 = grid_soundness();
    let c9 = repetitiveness();
    let c10 = performance();

    let results = [
        ("oracle exactness", c1),
        ("dynamic exactness", c2),
        ("rebuild equivalence", c3),
        ("primary disjointness", c4),
        ("split completeness", c5),
        ("vOcc agreement", c6),
        ("height bound", c7),
        ("grid soundness", c8),
        ("repetitiveness scaling", c9),
        ("performance smoke", c10),
        ("serialization", c11),
    ];
    let mut failed = 0;
    for (i, (name, res)) in results.iter().enumerate() {
        match res {
            Ok(d) => println!("PASS {:>2} {name}: {d}", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {e}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1} s",
        results.len() - failed,
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
