//! Built-in example models: the positive-fragment pair, the quantifier pair,
//! the loop model with truncations of its infinite partner, and nominated
//! chains for the finite-orders sentence.

use crate::kripke::{KripkeModel, Relation};
use crate::syntax::{parse_sentence, FragmentConfig, Sentence, Signature};

/// One relation `l`, one prop `p`, no nominals.
pub fn loop_signature() -> Signature {
    Signature::new(Vec::<String>::new(), vec!["l".into()], vec!["p".into()]).unwrap()
}

fn build(sig: Signature, states: &[&str], edges: &[(&str, &str)], props: &[(&str, &[&str])]) -> KripkeModel {
    KripkeModel::from_names(sig, states, &[], &[("l", edges)], props).expect("fixture is well formed")
}

/// `0→1, 0→2` with `p` at 1 and 2, against `0→1` with `p` at 1.
pub fn pos_pair() -> (KripkeModel, KripkeModel) {
    let m = build(loop_signature(), &["0", "1", "2"], &[("0", "1"), ("0", "2")], &[("p", &["1", "2"])]);
    let n = build(loop_signature(), &["0", "1"], &[("0", "1")], &[("p", &["1"])]);
    (m, n)
}

pub fn quant_signature() -> Signature {
    Signature::new(Vec::<String>::new(), vec!["l".into()], vec!["p".into(), "q".into()]).unwrap()
}

/// The positive pair plus an isolated state 3 on the left, and a `q`-labelled
/// edge `3→4` on the right.
pub fn quant_pair() -> (KripkeModel, KripkeModel) {
    let m = build(quant_signature(), &["0", "1", "2", "3"], &[("0", "1"), ("0", "2")], &[("p", &["1", "2"])]);
    let n = build(
        quant_signature(),
        &["0", "1", "2", "3", "4"],
        &[("0", "1"), ("0", "2"), ("3", "4")],
        &[("p", &["1", "2"]), ("q", &["3", "4"])],
    );
    (m, n)
}

/// The two-state loop `0⇄1` with `p`-leaves `a` (below 0) and `b` (below 1).
pub fn loop_left() -> KripkeModel {
    build(
        loop_signature(),
        &["0", "1", "a", "b"],
        &[("0", "1"), ("1", "0"), ("0", "a"), ("1", "b")],
        &[("p", &["a", "b"])],
    )
}

/// The first `depth` chain states `0→1→…` of the infinite unfolding, each with
/// its `p`-leaf (`a<i>` below even `i`, `b<i>` below odd `i`).
pub fn loop_right(depth: usize) -> KripkeModel {
    let depth = depth.max(1);
    let chain: Vec<String> = (0..depth).map(|i| i.to_string()).collect();
    let leaves: Vec<String> = (0..depth).map(|i| format!("{}{i}", if i % 2 == 0 { 'a' } else { 'b' })).collect();
    let states: Vec<&str> = chain.iter().chain(&leaves).map(String::as_str).collect();
    let mut edges: Vec<(&str, &str)> = Vec::new();
    for i in 0..depth {
        if i + 1 < depth {
            edges.push((&chain[i], &chain[i + 1]));
        }
        edges.push((&chain[i], &leaves[i]));
    }
    let leaf_refs: Vec<&str> = leaves.iter().map(String::as_str).collect();
    build(loop_signature(), &states, &edges, &[("p", &leaf_refs)])
}

/// Two nominals `k1`, `k2` and one relation `l`.
pub fn order_signature() -> Signature {
    Signature::new(vec!["k1".to_string(), "k2".into()], vec!["l".into()], Vec::<String>::new()).unwrap()
}

/// `s0→s1→…→s(n-1)` with `k1` at the start and `k2` at the end.
pub fn nominated_chain(n: usize) -> KripkeModel {
    let n = n.max(1);
    let states: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let named = vec![0, n - 1];
    let rel = Relation::from_pairs(n, (1..n).map(|i| (i - 1, i)));
    KripkeModel::new(order_signature(), states, named, vec![rel], vec![0; n]).unwrap()
}

/// `s0⇄s1` with `k1` at `s0` and `k2` at `s1`.
pub fn two_cycle() -> KripkeModel {
    let rel = Relation::from_pairs(2, [(0, 1), (1, 0)]);
    KripkeModel::new(order_signature(), vec!["s0".into(), "s1".into()], vec![0, 1], vec![rel], vec![0; 2]).unwrap()
}

/// The loop model's frame over the order signature, nominals placed at `k1`, `k2`.
pub fn loop_frame_with_nominals(k1: usize, k2: usize) -> KripkeModel {
    let base = loop_left();
    let rel = base.relations()[0].clone();
    KripkeModel::new(order_signature(), base.states().to_vec(), vec![k1, k2], vec![rel], vec![0; base.len()]).unwrap()
}

/// The sentence whose models are exactly the finite `l`-chains from `k1` to `k2`.
pub const FINITE_ORDER_TEXT: &str = "\
(exists x . (@k1 <l>x & forall y . (~@k1 <l>y | @x y))) & (forall y . ~@y <l>k1)
& (exists x . (@x <l>k2 & forall y . (~@y <l>k2 | @x y))) & (forall y . ~@k2 <l>y)
& (forall x . ((@x k1 | @x k2)
    | ((exists y . (@y <l>x & forall w . (~@w <l>x | @y w)))
     & (exists z . (@x <l>z & forall w . (~@x <l>w | @z w))))))
& (forall x . forall y . (@x <l*>y | @y <l*>x))";

pub fn finite_order_sentence() -> Sentence {
    parse_sentence(FINITE_ORDER_TEXT, &order_signature(), &FragmentConfig::full()).expect("fixture sentence parses")
}

/// The gameboard tree `↓ ⟨l⟩ ⟨l⟩` used with the loop pair.
pub const LOOP_TREE_TEXT: &str = "(down (dia l (dia l leaf)))";
