mod common;

use std::collections::HashSet;

use rand::Rng;
use rrindex::dag::edge_labels;
use rrindex::grammar::{
    draw_assign, height_threshold, mu, parse_round, pop_prefix, pop_suffix, popped_sequence, Grammar, PoppedSequence,
};
use rrindex::locate::split_positions;
use rrindex::oracle::{expand, naive_lce, naive_rlce, reachable, tree_facts, tree_vocc};
use rrindex::structures::{IndexedList, OrderList};
use rrindex::{Assign, Error, Fingerprint, Index, NodeId, Params, Rule};

const T: &[u8] = b"abaaacbaaa";

fn small() -> Index {
    Index::build(T, Params::default()).unwrap()
}

fn expand_seq(g: &Grammar, q: &PoppedSequence) -> Vec<u8> {
    q.runs.iter().flat_map(|&(x, c)| expand(g, x).repeat(c as usize)).collect()
}

#[test]
fn list_access_and_order() {
    let mut l = IndexedList::new();
    let a = l.push_back('a');
    assert_eq!(*l.get(l.access(0).unwrap()), 'a');
    l.push_back('b');
    l.push_back('c');
    assert_eq!(*l.get(l.access(2).unwrap()), 'c');
    l.insert_after(a, 'd');
    assert_eq!(*l.get(l.access(1).unwrap()), 'd');
    assert!(l.access(4).is_err());

    let mut o = OrderList::new();
    let a = o.push_back(1);
    let b = o.insert_after(Some(a), 2);
    assert_eq!(o.compare(a, a), std::cmp::Ordering::Equal);
    assert_eq!(o.compare(a, b), std::cmp::Ordering::Less);
}

#[test]
fn fingerprints_and_assign() {
    let mut g = Grammar::new(3, 2);
    let (a, _) = g.intern(Rule::Char(b'a'));
    let (b, _) = g.intern(Rule::Char(b'b'));
    let fp = |x: NodeId| g.node(x).fp;
    assert_eq!(Fingerprint::of(&Rule::Char(b'a'), fp), Fingerprint::of(&Rule::Char(b'a'), fp));
    assert_ne!(Fingerprint::of(&Rule::Pair(a, b), fp), Fingerprint::of(&Rule::Pair(b, a), fp));
    assert_eq!(draw_assign(3, fp(a), 1_000_000, 3), Assign::Minus);
    assert_eq!(draw_assign(3, fp(a), 1, 0), draw_assign(3, fp(a), 1, 0));
    assert_eq!(mu(7), (512u32.into(), 343u32.into()));
    assert_eq!(height_threshold(10, 2), 167);
    assert_eq!(height_threshold(2, 2), 95);
    for n in [2u64, 10, 1000, 1 << 20] {
        assert!(height_threshold(2 * n, 2) > height_threshold(n, 2));
    }
}

/// First letter whose assignment is `want`.
fn assigned(g: &mut Grammar, want: Assign, skip: &[NodeId]) -> NodeId {
    for c in b'a'..=b'z' {
        let x = g.intern(Rule::Char(c)).0;
        if g.assign(x) == want && !skip.contains(&x) {
            return x;
        }
    }
    panic!("no letter with assignment {want:?}");
}

#[test]
fn parse_round_examples() {
    let mut g = Grammar::new(11, 2);
    let one = assigned(&mut g, Assign::One, &[]);
    let zero = assigned(&mut g, Assign::Zero, &[]);
    let zero2 = assigned(&mut g, Assign::Zero, &[zero]);
    let (long, _) = g.intern(Rule::Power(one, 1_000_000));
    assert_eq!(g.assign(long), Assign::Minus);

    let got = parse_round(&g, &[(one, 3), (long, 1)], 1);
    assert_eq!(got, vec![(Rule::Power(one, 3), 1), (Rule::Single(long), 1)]);
    let got = parse_round(&g, &[(one, 1), (zero, 1), (long, 1)], 2);
    assert_eq!(got, vec![(Rule::Pair(one, zero), 1), (Rule::Single(long), 1)]);
    let got = parse_round(&g, &[(zero, 1), (zero2, 1)], 2);
    assert_eq!(got, vec![(Rule::Single(zero), 1), (Rule::Single(zero2), 1)]);
}

#[test]
fn builds_and_rule_queries() {
    let idx = small();
    let g = idx.grammar();
    assert_eq!(expand(g, g.start()), T);
    let aa = Index::build(b"aa", Params::default()).unwrap();
    assert!(aa.height() >= 1);
    assert_eq!(expand(aa.grammar(), aa.root()), b"aa");
    assert!(g.lookup(&Rule::Char(b'a')).is_some());
    assert!(g.lookup(&Rule::Char(b'z')).is_none());
    for (id, node) in g.iter() {
        assert_eq!(g.lookup(&node.rule), Some(id));
    }
    assert_eq!(tree_facts(g).0, idx.height());
}

#[test]
fn popped_sequences() {
    let idx = small();
    let g = idx.grammar();
    let q = popped_sequence(g, b"aa").unwrap();
    assert_eq!(expand_seq(g, &q), b"aa");
    assert!(popped_sequence(g, b"az").is_none());
    let mut r = common::rng(1);
    for _ in 0..100 {
        let t = common::mixed_text(&mut r, 300);
        let idx = Index::build(&t, Params::default()).unwrap();
        let m = r.random_range(1..=t.len().min(40));
        let i = r.random_range(0..=t.len() - m);
        let p = t[i..i + m].to_vec();
        let q = popped_sequence(idx.grammar(), &p).expect("substring has a popped sequence");
        assert_eq!(expand_seq(idx.grammar(), &q), p);
        assert!(q.runs.windows(2).all(|w| w[0].0 != w[1].0));
    }
}

#[test]
fn prefix_and_suffix_pops() {
    let idx = small();
    let g = idx.grammar();
    assert!(pop_prefix(g, 1).unwrap().runs.is_empty());
    assert_eq!(expand_seq(g, &pop_suffix(g, 1).unwrap()), T);
    assert_eq!(expand_seq(g, &pop_prefix(g, 11).unwrap()), T);
    assert!(pop_suffix(g, 11).unwrap().runs.is_empty());
    assert_eq!(expand_seq(g, &pop_prefix(g, 6).unwrap()), b"abaaa");
    assert_eq!(expand_seq(g, &pop_suffix(g, 6).unwrap()), b"cbaaa");
    assert!(matches!(pop_prefix(g, 12), Err(Error::OutOfRange { .. })));
    let mut r = common::rng(2);
    for _ in 0..50 {
        let t = common::mixed_text(&mut r, 400);
        let idx = Index::build(&t, Params::default()).unwrap();
        let g = idx.grammar();
        let s = r.random_range(1..=t.len() + 1);
        let (p, q) = (pop_prefix(g, s as u64).unwrap(), pop_suffix(g, s as u64).unwrap());
        assert_eq!(expand_seq(g, &p), &t[..s - 1]);
        assert_eq!(expand_seq(g, &q), &t[s - 1..]);
        assert!(p.runs.len() <= 2 * idx.height() as usize + 2);
    }
}

#[test]
fn dag_shapes_and_labels() {
    let mut g = Grammar::new(5, 2);
    let (a, _) = g.intern(Rule::Char(b'a'));
    let (b, _) = g.intern(Rule::Char(b'b'));
    let (ab, _) = g.intern(Rule::Pair(a, b));
    let (a1, _) = g.intern(Rule::Single(a));
    let (aba, _) = g.intern(Rule::Pair(ab, a1));
    let (ab2, _) = g.intern(Rule::Single(ab));
    let (x, _) = g.intern(Rule::Pair(aba, ab2));
    assert!(g.rule(a).is_explicit());
    assert!(!Rule::Single(a).is_explicit());
    assert!(Rule::Power(a, 2).is_explicit());
    assert_eq!(edge_labels(&g, x, aba).collect::<Vec<_>>(), vec![0]);
    assert_eq!(edge_labels(&g, x, ab2).collect::<Vec<_>>(), vec![3]);
    let (p, _) = g.intern(Rule::Power(ab, 4));
    assert_eq!(edge_labels(&g, p, ab).collect::<Vec<_>>(), vec![0, 2, 4, 6]);
}

#[test]
fn dag_edges_and_vocc() {
    let idx = small();
    let (g, dag) = (idx.grammar(), idx.dag());
    let root_end = dag.endpoint(g.start());
    assert_eq!(dag.incoming(g, root_end).count(), 0);
    assert_eq!(dag.vocc_naive(g, root_end), vec![1]);
    let c = dag.path(root_end).cache;
    assert_eq!((dag.endpoint(c.anchor), c.weight), (root_end, 0));

    let mut r = common::rng(3);
    for _ in 0..30 {
        let t = common::mixed_text(&mut r, 300);
        let idx = Index::build(&t, Params::default()).unwrap();
        let (g, dag) = (idx.grammar(), idx.dag());
        let live = reachable(g);
        let mut edges = HashSet::new();
        for &x in &live {
            if g.rule(x).is_explicit() {
                for (c, _) in g.rule(x).children() {
                    edges.insert((x, c));
                }
            }
        }
        assert_eq!(dag.edge_count(), edges.len());
    }

    let ab = Index::build(b"ababab", Params::default()).unwrap();
    let (g, dag) = (ab.grammar(), ab.dag());
    for u in dag.endpoints() {
        let want = match expand(g, u).as_slice() {
            b"ababab" => vec![1],
            b"ab" => vec![1, 3, 5],
            _ => tree_vocc(g, u),
        };
        let mut fast = dag.vocc_fast(g, u);
        fast.sort_unstable();
        assert_eq!(fast, want);
        assert_eq!(tree_vocc(g, u), want);
    }
    assert_eq!(ab.locate(b"ba"), vec![2, 4]);
}

#[test]
fn text_access() {
    let idx = small();
    assert_eq!(idx.extract(1, 10).unwrap(), T);
    assert_eq!(idx.extract(4, 0).unwrap(), b"");
    assert_eq!(idx.lce(3, 8).unwrap(), 3);
    assert_eq!(idx.rlce(5, 10).unwrap(), 4);
    assert_eq!(naive_lce(T, 3, 8), 3);
    assert_eq!(naive_rlce(T, 5, 10), 4);
    let mut r = common::rng(4);
    let t = common::mixed_text(&mut r, 3000);
    let idx = Index::build(&t, Params::default()).unwrap();
    for _ in 0..1000 {
        let i = r.random_range(1..=t.len());
        let len = r.random_range(0..=t.len() - i + 1);
        assert_eq!(idx.extract(i as u64, len as u64).unwrap(), &t[i - 1..i - 1 + len]);
    }
}

#[test]
fn locate_examples() {
    let idx = small();
    assert_eq!(idx.locate(b"aa"), vec![3, 4, 8, 9]);
    assert_eq!(idx.locate(b"baaa"), vec![2, 7]);
    assert_eq!(idx.locate(b"z"), Vec::<u64>::new());
    assert_eq!(idx.locate(b"c"), vec![6]);
    assert_eq!(idx.locate(b"a"), vec![1, 3, 4, 5, 8, 9, 10]);
}

#[test]
fn split_position_arithmetic() {
    let mut g = Grammar::new(9, 2);
    let (a, _) = g.intern(Rule::Char(b'a'));
    let (b, _) = g.intern(Rule::Char(b'b'));
    let (c, _) = g.intern(Rule::Char(b'c'));
    let (ab, _) = g.intern(Rule::Pair(a, b));
    let (c1, _) = g.intern(Rule::Single(c));
    let (abc, _) = g.intern(Rule::Pair(ab, c1));
    let q = PoppedSequence { runs: vec![(ab, 1), (abc, 1), (a, 1)] };
    assert_eq!(split_positions(&g, &q, 6), vec![2, 5]);
    let q = PoppedSequence { runs: vec![(abc, 1)] };
    assert_eq!(split_positions(&g, &q, 3), Vec::<u64>::new());
}

#[test]
fn update_examples() {
    let mut idx = small();
    idx.insert(3, b"b").unwrap();
    assert_eq!(idx.extract(1, 11).unwrap(), b"abbaaacbaaa");
    let mut idx = small();
    idx.insert(1, b"xy").unwrap();
    assert_eq!(idx.text(), b"xyabaaacbaaa");
    let mut idx = small();
    idx.delete(2, 1).unwrap();
    assert_eq!(idx.text(), b"aaaacbaaa");

    let mut r = common::rng(5);
    for _ in 0..30 {
        let t = common::mixed_text(&mut r, 200);
        let orig = Index::build(&t, Params::default()).unwrap();
        let mut idx = orig.clone();
        if t.len() < 4 {
            continue;
        }
        let s = r.random_range(1..=t.len() - 2);
        let m = r.random_range(1..=(t.len() - s - 1).min(20));
        idx.delete(s as u64, m as u64).unwrap();
        idx.insert(s as u64, &t[s - 1..s - 1 + m]).unwrap();
        assert_eq!(idx.grammar().signature(), orig.grammar().signature());
        for _ in 0..10 {
            let p = common::pattern_for(&mut r, &t, 10);
            assert_eq!(idx.locate(&p), orig.locate(&p));
        }
    }
}
