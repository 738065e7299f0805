//! The countable game as a finite safety game, back-and-forth systems, and
//! bisimulation families.
//!
//! Arena positions abstract the named sequences of the game to the set of
//! name pairs they induce: every rule and every check reads a sequence only
//! through the pairs `(w̄(j), v̄(j))`, so order and repetition are irrelevant.

mod bf;
mod bisim;
mod harness;

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::Serialize;

pub use bf::{bf_related, max_back_and_forth, BackAndForthSystem, BasicPartialIso};
pub use bisim::{
    extract_bisim_witness, partial_iso_from_tuple, shift_family, validate_bisim_family, BisimEntry, BisimReport,
    BisimViolation, LBisimFamily, PartialIsoReport,
};
pub use harness::{hennessy_milner_check, rooted_iso_check, HmReport, RootedIsoReport};

use crate::checker::basic_agree;
use crate::error::{Error, Result};
use crate::kripke::{bits, KripkeModel, PointedModel, Relation};
use crate::syntax::{Action, Ctor, FragmentConfig, Op};

/// Closures larger than this are refused.
pub const CLOSURE_CAP: usize = 4096;
/// Arenas larger than this are refused.
pub const ARENA_CAP: usize = 1 << 21;

/// A denotation pair with one action realizing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionPair {
    pub action: Action,
    pub left: Relation,
    pub right: Relation,
}

/// Denotation pairs of every action over the shared signature, built from
/// the base relations by the enabled constructors.
pub fn action_pair_closure(m: &KripkeModel, n: &KripkeModel, ctors: &BTreeSet<Ctor>) -> Result<Vec<ActionPair>> {
    if !m.sig().same_base(n.sig()) {
        return Err(Error::Mismatch("models are over different signatures".into()));
    }
    let mut out: Vec<ActionPair> = Vec::new();
    let mut seen: HashSet<(Relation, Relation)> = HashSet::new();
    let mut push = |out: &mut Vec<ActionPair>, p: ActionPair| -> Result<()> {
        if seen.insert((p.left.clone(), p.right.clone())) {
            if out.len() == CLOSURE_CAP {
                return Err(Error::CapExceeded { predicted: CLOSURE_CAP as u128 + 1, cap: CLOSURE_CAP as u128 });
            }
            out.push(p);
        }
        Ok(())
    };
    for (i, name) in m.sig().relations().iter().enumerate() {
        let p = ActionPair { action: Action::rel(name.clone()), left: m.relations()[i].clone(), right: n.relations()[i].clone() };
        push(&mut out, p)?;
    }
    let mut next = 0;
    while next < out.len() {
        let p = out[next].clone();
        if ctors.contains(&Ctor::Star) {
            let s = ActionPair { action: Action::star(p.action.clone()), left: p.left.star(), right: p.right.star() };
            push(&mut out, s)?;
        }
        for j in 0..=next {
            let q = out[j].clone();
            if ctors.contains(&Ctor::Union) {
                let u = ActionPair {
                    action: Action::union(p.action.clone(), q.action.clone()),
                    left: p.left.union(&q.left),
                    right: p.right.union(&q.right),
                };
                push(&mut out, u)?;
            }
            if ctors.contains(&Ctor::Comp) {
                for (a, b) in [(&p, &q), (&q, &p)] {
                    let c = ActionPair {
                        action: Action::comp(a.action.clone(), b.action.clone()),
                        left: a.left.compose(&b.left),
                        right: a.right.compose(&b.right),
                    };
                    push(&mut out, c)?;
                }
            }
        }
        next += 1;
    }
    Ok(out)
}

/// An arena position: name pairs as a bit set over `a * |N| + b`, and the current pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArenaPosition {
    pub pairs: u64,
    pub left: usize,
    pub right: usize,
}

impl ArenaPosition {
    pub fn pair_list(&self, right_len: usize) -> Vec<(usize, usize)> {
        bits(self.pairs).map(|i| (i / right_len, i % right_len)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OmegaOutcome {
    pub eloise_wins: bool,
    /// Rounds ∀belard needs to force a violation, when he wins.
    pub rank: Option<usize>,
    /// Refinement rounds until the safe set stabilized, including the last.
    pub iterations: usize,
    pub positions: usize,
}

/// The explored arena with its solved safe set.
pub struct OmegaArena {
    right_len: usize,
    positions: Vec<ArenaPosition>,
    /// Per position, ∀belard's challenges as lists of ∃loise's options.
    challenges: Vec<Vec<Vec<usize>>>,
    safe: Vec<bool>,
    rank: Vec<Option<usize>>,
    iterations: usize,
}

impl OmegaArena {
    /// Explores every position reachable from `(left, right)` and solves it.
    pub fn solve(frag: &FragmentConfig, left: &PointedModel, right: &PointedModel) -> Result<Self> {
        let (m, n) = (&left.model, &right.model);
        if m.sig() != n.sig() {
            return Err(Error::Mismatch("pointed models are over different signatures".into()));
        }
        if m.len() * n.len() > 64 {
            return Err(Error::Precondition("the arena supports at most 64 state pairs".into()));
        }
        let closure = if frag.has(Op::Diamond) { action_pair_closure(m, n, frag.ctors())? } else { Vec::new() };
        let nl = n.len();
        let bit = |a: usize, b: usize| 1u64 << (a * nl + b);
        let property = |p: &ArenaPosition| {
            basic_agree(m, m.named(), p.left, n, n.named(), p.right)
                && bits(p.pairs).all(|i| (p.left == i / nl) == (p.right == i % nl))
        };

        let start = ArenaPosition { pairs: 0, left: left.current, right: right.current };
        let mut index: HashMap<ArenaPosition, usize> = HashMap::new();
        let mut positions = vec![start];
        let mut challenges: Vec<Vec<Vec<usize>>> = Vec::new();
        let mut ok = Vec::new();
        index.insert(start, 0);
        let mut queue = VecDeque::from([0usize]);
        let mut intern = |p: ArenaPosition, positions: &mut Vec<ArenaPosition>, queue: &mut VecDeque<usize>| -> Result<usize> {
            if let Some(&i) = index.get(&p) {
                return Ok(i);
            }
            if positions.len() == ARENA_CAP {
                return Err(Error::CapExceeded { predicted: ARENA_CAP as u128 + 1, cap: ARENA_CAP as u128 });
            }
            let i = positions.len();
            positions.push(p);
            index.insert(p, i);
            queue.push_back(i);
            Ok(i)
        };
        while let Some(i) = queue.pop_front() {
            let p = positions[i];
            let good = property(&p);
            let mut mine: Vec<Vec<ArenaPosition>> = Vec::new();
            if good {
                for ap in &closure {
                    for u in bits(ap.left.succ(p.left)) {
                        mine.push(bits(ap.right.succ(p.right)).map(|v| ArenaPosition { left: u, right: v, ..p }).collect());
                    }
                    for v in bits(ap.right.succ(p.right)) {
                        mine.push(bits(ap.left.succ(p.left)).map(|u| ArenaPosition { left: u, right: v, ..p }).collect());
                    }
                }
                if frag.has(Op::At) {
                    for (&a, &b) in m.named().iter().zip(n.named()) {
                        mine.push(vec![ArenaPosition { left: a, right: b, ..p }]);
                    }
                    for i in bits(p.pairs) {
                        mine.push(vec![ArenaPosition { left: i / nl, right: i % nl, ..p }]);
                    }
                }
                if frag.has(Op::Store) {
                    mine.push(vec![ArenaPosition { pairs: p.pairs | bit(p.left, p.right), ..p }]);
                }
                if frag.has(Op::Exists) {
                    for u in 0..m.len() {
                        mine.push((0..nl).map(|v| ArenaPosition { pairs: p.pairs | bit(u, v), ..p }).collect());
                    }
                    for v in 0..nl {
                        mine.push((0..m.len()).map(|u| ArenaPosition { pairs: p.pairs | bit(u, v), ..p }).collect());
                    }
                }
            }
            let mut ids: Vec<Vec<usize>> = Vec::with_capacity(mine.len());
            for opts in mine {
                let mut o = opts.into_iter().map(|q| intern(q, &mut positions, &mut queue)).collect::<Result<Vec<_>>>()?;
                o.sort_unstable();
                o.dedup();
                ids.push(o);
            }
            ids.sort();
            ids.dedup();
            if challenges.len() <= i {
                challenges.resize(i + 1, Vec::new());
                ok.resize(i + 1, false);
            }
            challenges[i] = ids;
            ok[i] = good;
        }

        let total = positions.len();
        let mut safe = ok.clone();
        let mut rank: Vec<Option<usize>> = ok.iter().map(|&g| if g { None } else { Some(0) }).collect();
        let mut iterations = 0;
        loop {
            iterations += 1;
            let lost: Vec<usize> = (0..total)
                .filter(|&i| safe[i] && challenges[i].iter().any(|opts| opts.iter().all(|&o| !safe[o])))
                .collect();
            if lost.is_empty() {
                break;
            }
            for i in lost {
                safe[i] = false;
                rank[i] = Some(iterations);
            }
        }
        Ok(OmegaArena { right_len: nl, positions, challenges, safe, rank, iterations })
    }

    pub fn outcome(&self) -> OmegaOutcome {
        OmegaOutcome {
            eloise_wins: self.safe[0],
            rank: self.rank[0],
            iterations: self.iterations,
            positions: self.positions.len(),
        }
    }

    /// Safe positions, all reachable from the start.
    pub fn safe_positions(&self) -> impl Iterator<Item = &ArenaPosition> + '_ {
        self.positions.iter().zip(&self.safe).filter(|(_, &s)| s).map(|(p, _)| p)
    }

    pub fn right_len(&self) -> usize {
        self.right_len
    }

    pub fn challenge_count(&self) -> usize {
        self.challenges.iter().map(Vec::len).sum()
    }
}

/// Decides the countable game by solving the safety arena.
pub fn omega_solve(frag: &FragmentConfig, left: &PointedModel, right: &PointedModel) -> Result<OmegaOutcome> {
    Ok(OmegaArena::solve(frag, left, right)?.outcome())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn pm(m: &KripkeModel, w: usize) -> PointedModel {
        PointedModel::new(m.clone(), w).unwrap()
    }

    #[test]
    fn closure_sizes() {
        let (m, n) = fixtures::pos_pair();
        assert_eq!(action_pair_closure(&m, &n, &BTreeSet::new()).unwrap().len(), 1);
        let star = action_pair_closure(&m, &n, &[Ctor::Star].into()).unwrap();
        assert_eq!(star.len(), 2);
        assert_eq!(star[1].action, Action::star(Action::rel("l")));
    }

    #[test]
    fn union_closure_matches_brute_force() {
        let sig = crate::syntax::Signature::new(Vec::<String>::new(), vec!["a".into(), "b".into(), "c".into()], Vec::<String>::new())
            .unwrap();
        let m = crate::kripke::generate_random_model(3, 3, 0.4, &sig);
        let n = crate::kripke::generate_random_model(4, 3, 0.4, &sig);
        let got: HashSet<(Relation, Relation)> = action_pair_closure(&m, &n, &[Ctor::Union].into())
            .unwrap()
            .into_iter()
            .map(|p| (p.left, p.right))
            .collect();
        let mut expected = HashSet::new();
        for mask in 1u32..8 {
            let pick = |model: &KripkeModel| {
                (0..3).filter(|i| mask & (1 << i) != 0).fold(Relation::empty(3), |acc, i| acc.union(&model.relations()[i]))
            };
            expected.insert((pick(&m), pick(&n)));
        }
        assert_eq!(got, expected);
        assert!(got.len() <= 7);
    }

    #[test]
    fn fixture_verdicts() {
        let (m, n) = fixtures::pos_pair();
        let ds = FragmentConfig::ops_only([Op::Diamond, Op::Store]);
        assert!(omega_solve(&ds, &pm(&m, 0), &pm(&n, 0)).unwrap().eloise_wins);
        let all = FragmentConfig::ops_only([Op::Diamond, Op::At, Op::Store, Op::Exists]);
        let out = omega_solve(&all, &pm(&m, 0), &pm(&n, 0)).unwrap();
        assert!(!out.eloise_wins);
        assert!(out.rank.is_some());
        let (mb, nb) = fixtures::quant_pair();
        let dse = FragmentConfig::ops_only([Op::Diamond, Op::Store, Op::Exists]);
        assert!(omega_solve(&dse, &pm(&mb, 0), &pm(&nb, 0)).unwrap().eloise_wins);
    }

    #[test]
    fn identical_models_win() {
        let m = fixtures::loop_left();
        for w in 0..m.len() {
            assert!(omega_solve(&FragmentConfig::full(), &pm(&m, w), &pm(&m, w)).unwrap().eloise_wins);
        }
    }

    #[test]
    fn loop_pair_is_lost_with_store() {
        let l = fixtures::loop_left();
        let r = fixtures::loop_right(4);
        let out = omega_solve(&FragmentConfig::ops_only([Op::Diamond, Op::Store]), &pm(&l, 0), &pm(&r, 0)).unwrap();
        assert!(!out.eloise_wins);
        assert_eq!(out.rank, Some(3));
        // The truncated chain dead-ends, so plain diamonds already separate them.
        assert!(!omega_solve(&FragmentConfig::ops_only([Op::Diamond]), &pm(&l, 0), &pm(&r, 0)).unwrap().eloise_wins);
    }
}
