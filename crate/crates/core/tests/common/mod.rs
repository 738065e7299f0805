//! Shared helpers for the integration suites, including an explicit game
//! search over sequence positions that shares no code with the arena solver.

#![allow(dead_code)]

use std::collections::HashMap;

use hdpl_core::kripke::{bits, KripkeModel, PointedModel, Relation};
use hdpl_core::syntax::{Ctor, FragmentConfig, Op};

pub fn pm(m: &KripkeModel, w: usize) -> PointedModel {
    PointedModel::new(m.clone(), w).unwrap()
}

/// The sixteen operator subsets, then the full fragment with every constructor.
pub fn fragments() -> Vec<FragmentConfig> {
    let mut out = FragmentConfig::all_op_subsets();
    out.push(FragmentConfig::full());
    out
}

/// Closure of the base relation pairs under the enabled constructors, by
/// naive saturation over the set of pairs seen so far.
fn closure(m: &KripkeModel, n: &KripkeModel, frag: &FragmentConfig) -> Vec<(Relation, Relation)> {
    let mut pairs: Vec<(Relation, Relation)> = m.relations().iter().cloned().zip(n.relations().iter().cloned()).collect();
    pairs.dedup();
    loop {
        let mut fresh = Vec::new();
        for (a, b) in &pairs {
            if frag.has_ctor(Ctor::Star) {
                fresh.push((a.star(), b.star()));
            }
            for (c, d) in &pairs {
                if frag.has_ctor(Ctor::Union) {
                    fresh.push((a.union(c), b.union(d)));
                }
                if frag.has_ctor(Ctor::Comp) {
                    fresh.push((a.compose(c), b.compose(d)));
                }
            }
        }
        let before = pairs.len();
        for p in fresh {
            if !pairs.contains(&p) {
                pairs.push(p);
            }
        }
        if pairs.len() == before {
            return pairs;
        }
    }
}

/// Depth-bounded game search over full sequence positions `(w̄, w, v̄, v)`.
/// Rounds left, then both sequences with their current points.
type MemoKey = (usize, Vec<usize>, usize, Vec<usize>, usize);

pub struct ExplicitGame<'m> {
    m: &'m KripkeModel,
    n: &'m KripkeModel,
    frag: FragmentConfig,
    closure: Vec<(Relation, Relation)>,
    memo: HashMap<MemoKey, bool>,
}

impl<'m> ExplicitGame<'m> {
    pub fn new(frag: &FragmentConfig, m: &'m KripkeModel, n: &'m KripkeModel) -> Self {
        let closure = if frag.has(Op::Diamond) { closure(m, n, frag) } else { Vec::new() };
        ExplicitGame { m, n, frag: frag.clone(), closure, memo: HashMap::new() }
    }

    fn property(&self, lt: &[usize], w: usize, rt: &[usize], v: usize) -> bool {
        self.m.props_at(w) == self.n.props_at(v)
            && self.m.named().iter().zip(self.n.named()).all(|(&a, &b)| (a == w) == (b == v))
            && lt.iter().zip(rt).all(|(&a, &b)| (a == w) == (b == v))
    }

    /// ∃loise keeps the property for `rounds` more rounds.
    pub fn survives(&mut self, rounds: usize, lt: &[usize], w: usize, rt: &[usize], v: usize) -> bool {
        if !self.property(lt, w, rt, v) {
            return false;
        }
        if rounds == 0 {
            return true;
        }
        let key = (rounds, lt.to_vec(), w, rt.to_vec(), v);
        if let Some(&r) = self.memo.get(&key) {
            return r;
        }
        let r = self.all_challenges_answered(rounds, lt, w, rt, v);
        self.memo.insert(key, r);
        r
    }

    fn all_challenges_answered(&mut self, rounds: usize, lt: &[usize], w: usize, rt: &[usize], v: usize) -> bool {
        let k = rounds - 1;
        let (m, n) = (self.m, self.n);
        if self.frag.has(Op::Diamond) {
            for (a, b) in self.closure.clone() {
                for w2 in bits(a.succ(w)) {
                    if !bits(b.succ(v)).any(|v2| self.survives(k, lt, w2, rt, v2)) {
                        return false;
                    }
                }
                for v2 in bits(b.succ(v)) {
                    if !bits(a.succ(w)).any(|w2| self.survives(k, lt, w2, rt, v2)) {
                        return false;
                    }
                }
            }
        }
        if self.frag.has(Op::At) {
            let named: Vec<(usize, usize)> = m.named().iter().copied().zip(n.named().iter().copied()).collect();
            let vars: Vec<(usize, usize)> = lt.iter().copied().zip(rt.iter().copied()).collect();
            for (a, b) in named.into_iter().chain(vars) {
                if !self.survives(k, lt, a, rt, b) {
                    return false;
                }
            }
        }
        if self.frag.has(Op::Store) {
            let (l2, r2) = ([lt, &[w]].concat(), [rt, &[v]].concat());
            if !self.survives(k, &l2, w, &r2, v) {
                return false;
            }
        }
        if self.frag.has(Op::Exists) {
            for a in 0..m.len() {
                if !(0..n.len()).any(|b| self.survives(k, &[lt, &[a]].concat(), w, &[rt, &[b]].concat(), v)) {
                    return false;
                }
            }
            for b in 0..n.len() {
                if !(0..m.len()).any(|a| self.survives(k, &[lt, &[a]].concat(), w, &[rt, &[b]].concat(), v)) {
                    return false;
                }
            }
        }
        true
    }
}

/// Leaf paths of a tree as label sequences; sibling labels are unique, so a
/// path identifies a node.
pub fn leaf_paths(tr: &hdpl_core::gameboard::GameboardTree) -> Vec<Vec<String>> {
    if tr.is_leaf() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (lb, c) in tr.children() {
        for mut p in leaf_paths(c) {
            p.insert(0, lb.to_string());
            out.push(p);
        }
    }
    out
}
