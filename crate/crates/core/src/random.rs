//! Seeded generators for sentences, actions, gameboard trees and model pairs.
//!
//! Pair generators mix unrelated models with permuted, perturbed and
//! state-cloned copies so that both game verdicts occur often.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::gameboard::{child_signature, EdgeLabel, GameboardTree};
use crate::kripke::{permute_states, random_model, KripkeModel, PointedModel, RandomModelSpec, Relation};
use crate::syntax::{Action, Ctor, FragmentConfig, Op, Sentence, Signature};

/// One nominal `k`, one relation `r`, props `p` and `q`.
pub fn small_signature() -> Signature {
    Signature::new(vec!["k".to_string()], vec!["r".into()], vec!["p".into(), "q".into()]).expect("valid signature")
}

/// A random action of nesting depth at most `depth` using the fragment's constructors.
pub fn random_action<R: Rng>(rng: &mut R, sig: &Signature, frag: &FragmentConfig, depth: usize) -> Action {
    let ctors: Vec<Ctor> = frag.ctors().iter().copied().collect();
    let leaf = |rng: &mut R| Action::rel(sig.relations().choose(rng).expect("signature has a relation").clone());
    if depth == 0 || ctors.is_empty() || rng.gen_bool(0.5) {
        return leaf(rng);
    }
    match ctors.choose(rng).unwrap() {
        Ctor::Union => Action::union(random_action(rng, sig, frag, depth - 1), random_action(rng, sig, frag, depth - 1)),
        Ctor::Comp => Action::comp(random_action(rng, sig, frag, depth - 1), random_action(rng, sig, frag, depth - 1)),
        Ctor::Star => Action::star(random_action(rng, sig, frag, depth - 1)),
    }
}

/// A random sentence of the fragment over `sig`. Binders take fresh names, so
/// the result always passes `check_sentence` against `sig`.
pub fn random_sentence<R: Rng>(rng: &mut R, sig: &Signature, frag: &FragmentConfig, depth: usize) -> Sentence {
    let named: Vec<String> = sig.named().map(str::to_string).collect();
    let atom = |rng: &mut R| {
        let pick = rng.gen_range(0..sig.props().len() + named.len() + 1);
        if pick < sig.props().len() {
            Sentence::prop(sig.props()[pick].clone())
        } else if pick < sig.props().len() + named.len() {
            Sentence::nom(named[pick - sig.props().len()].clone())
        } else {
            Sentence::tt()
        }
    };
    if depth == 0 || rng.gen_bool(0.2) {
        return atom(rng);
    }
    let mut shapes = vec![0u8, 1];
    let has_relations = !sig.relations().is_empty();
    for (op, shape) in [(Op::Diamond, 2), (Op::At, 3), (Op::Store, 4), (Op::Exists, 5)] {
        if frag.has(op) && (op != Op::Diamond || has_relations) && (op != Op::At || !named.is_empty()) {
            shapes.push(shape);
        }
    }
    match *shapes.choose(rng).unwrap() {
        0 => Sentence::neg(random_sentence(rng, sig, frag, depth - 1)),
        1 => Sentence::and2(random_sentence(rng, sig, frag, depth - 1), random_sentence(rng, sig, frag, depth - 1)),
        2 => {
            let a = random_action(rng, sig, frag, 2);
            Sentence::dia(a, random_sentence(rng, sig, frag, depth - 1))
        }
        3 => Sentence::at(named.choose(rng).unwrap().clone(), random_sentence(rng, sig, frag, depth - 1)),
        shape => {
            let (inner, x) = sig.extend();
            let body = random_sentence(rng, &inner, frag, depth - 1);
            if shape == 4 {
                Sentence::store(x, body)
            } else {
                Sentence::exists(x, body)
            }
        }
    }
}

/// Shape parameters for [`random_tree`].
#[derive(Clone, Debug)]
pub struct TreeShape {
    pub height: usize,
    pub max_children: usize,
    /// Every inner node gets an idle child, so the tree is closed.
    pub closed: bool,
}

/// A random valid gameboard tree for the fragment. Diamond edges draw from
/// `actions`; inner nodes may still end up leaves when no edge is drawn.
pub fn random_tree<R: Rng>(rng: &mut R, sig: &Signature, frag: &FragmentConfig, shape: &TreeShape, actions: &[Action]) -> GameboardTree {
    if shape.height == 0 {
        return GameboardTree::leaf(sig.clone());
    }
    let mut pool = vec![EdgeLabel::Idle(0), EdgeLabel::Idle(1)];
    if frag.has(Op::Store) {
        pool.push(EdgeLabel::Store);
    }
    if frag.has(Op::Exists) {
        pool.push(EdgeLabel::Exists);
    }
    if frag.has(Op::At) {
        pool.extend(sig.named().map(|k| EdgeLabel::At(k.to_string())));
    }
    if frag.has(Op::Diamond) {
        let mut acts = actions.to_vec();
        acts.dedup();
        pool.extend(acts.into_iter().map(EdgeLabel::Dia));
    }
    pool.shuffle(rng);
    let count = rng.gen_range(0..=shape.max_children.min(pool.len()));
    let mut labels: Vec<EdgeLabel> = pool.into_iter().take(count).collect();
    if shape.closed && !labels.iter().any(|lb| matches!(lb, EdgeLabel::Idle(_) | EdgeLabel::Store | EdgeLabel::Exists)) {
        if labels.len() == shape.max_children.max(1) {
            labels.pop();
        }
        if !labels.contains(&EdgeLabel::Idle(0)) {
            labels.push(EdgeLabel::Idle(0));
        } else {
            labels.push(EdgeLabel::Idle(1));
        }
    }
    let sub = TreeShape { height: shape.height - 1, ..shape.clone() };
    let children = labels
        .into_iter()
        .map(|lb| {
            let c = random_tree(rng, &child_signature(sig, &lb), frag, &sub, actions);
            (lb, Arc::new(c))
        })
        .collect();
    GameboardTree::node(sig.clone(), children)
}

pub fn random_pointed<R: Rng>(rng: &mut R, sig: &Signature, max_states: usize) -> PointedModel {
    let spec = RandomModelSpec {
        states: rng.gen_range(1..=max_states.max(1)),
        edge_density: rng.gen_range(0.15..0.6),
        prop_density: rng.gen_range(0.2..0.7),
    };
    let m = random_model(rng, &spec, sig);
    let w = rng.gen_range(0..m.len());
    PointedModel::new(m, w).expect("state in range")
}

fn rebuild(m: &KripkeModel, named: Vec<usize>, relations: Vec<Relation>, valuation: Vec<u64>) -> KripkeModel {
    let states: Vec<String> = (0..valuation.len()).map(|i| format!("s{i}")).collect();
    KripkeModel::new(m.sig().clone(), states, named, relations, valuation).expect("rebuilt model is well formed")
}

/// Toggles one edge or one prop membership.
fn perturb<R: Rng>(rng: &mut R, m: &KripkeModel) -> KripkeModel {
    let n = m.len();
    let mut relations = m.relations().to_vec();
    let mut valuation = m.valuation().to_vec();
    if !relations.is_empty() && rng.gen_bool(0.6) {
        let r = rng.gen_range(0..relations.len());
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let pairs = relations[r].pairs().filter(|&p| p != (a, b));
        let toggled: Vec<(usize, usize)> =
            if relations[r].contains(a, b) { pairs.collect() } else { pairs.chain([(a, b)]).collect() };
        relations[r] = Relation::from_pairs(n, toggled);
    } else if !m.sig().props().is_empty() {
        let w = rng.gen_range(0..n);
        valuation[w] ^= 1 << rng.gen_range(0..m.sig().props().len());
    }
    rebuild(m, m.named().to_vec(), relations, valuation)
}

/// Adds a copy of state `w` with the same props and successors; each
/// predecessor edge into `w` is redirected to the copy with probability 1/2.
fn clone_state<R: Rng>(rng: &mut R, m: &KripkeModel, w: usize) -> KripkeModel {
    let n = m.len();
    let c = n;
    let relations = m
        .relations()
        .iter()
        .map(|r| {
            let mut pairs = Vec::new();
            for (a, b) in r.pairs() {
                if b == w && rng.gen_bool(0.5) {
                    pairs.push((a, c));
                } else {
                    pairs.push((a, b));
                }
                if a == w {
                    pairs.push((c, if b == w { c } else { b }));
                }
            }
            Relation::from_pairs(n + 1, pairs)
        })
        .collect();
    let mut valuation = m.valuation().to_vec();
    valuation.push(m.props_at(w));
    rebuild(m, m.named().to_vec(), relations, valuation)
}

/// A pair of pointed models over `sig`, each with at most `max_states` states.
pub fn random_pair<R: Rng>(rng: &mut R, sig: &Signature, max_states: usize) -> (PointedModel, PointedModel) {
    let left = random_pointed(rng, sig, max_states);
    let m = &left.model;
    let right = match rng.gen_range(0..4) {
        0 => random_pointed(rng, sig, max_states),
        1 => {
            let mut perm: Vec<usize> = (0..m.len()).collect();
            perm.shuffle(rng);
            PointedModel::new(permute_states(m, &perm), perm[left.current]).unwrap()
        }
        2 => {
            let p = perturb(rng, m);
            PointedModel::new(p, left.current).unwrap()
        }
        _ if m.len() < max_states => {
            let w = rng.gen_range(0..m.len());
            let c = clone_state(rng, m, w);
            let cur = if left.current == w && rng.gen_bool(0.5) { m.len() } else { left.current };
            PointedModel::new(c, cur).unwrap()
        }
        _ => PointedModel::new(m.clone(), rng.gen_range(0..m.len())).unwrap(),
    };
    if rng.gen_bool(0.5) {
        (left, right)
    } else {
        (right, left)
    }
}

/// Adds edges until every state is reachable from the current one.
pub fn make_rooted<R: Rng>(rng: &mut R, pm: &PointedModel) -> PointedModel {
    let m = &pm.model;
    let n = m.len();
    let mut relations = m.relations().to_vec();
    loop {
        let any = relations.iter().fold(Relation::empty(n), |acc, r| acc.union(r));
        let reach = any.star().succ(pm.current);
        let Some(missing) = (0..n).find(|&v| reach & (1 << v) == 0) else { break };
        let reached: Vec<usize> = (0..n).filter(|&v| reach & (1 << v) != 0).collect();
        let from = *reached.choose(rng).unwrap();
        let r = rng.gen_range(0..relations.len());
        relations[r] = Relation::from_pairs(n, relations[r].pairs().chain([(from, missing)]));
    }
    let states = m.states().to_vec();
    let model = KripkeModel::new(m.sig().clone(), states, m.named().to_vec(), relations, m.valuation().to_vec())
        .expect("adding edges keeps the model well formed");
    PointedModel::new(model, pm.current).unwrap()
}

/// Rooted pairs: about half are relabelled copies, the rest perturbed copies
/// or unrelated models. `sig` must declare a relation.
pub fn random_rooted_pair<R: Rng>(rng: &mut R, sig: &Signature, max_states: usize) -> (PointedModel, PointedModel) {
    let seed = random_pointed(rng, sig, max_states);
    let left = make_rooted(rng, &seed);
    let m = &left.model;
    let right = match rng.gen_range(0..4) {
        0 | 1 => {
            let mut perm: Vec<usize> = (0..m.len()).collect();
            perm.shuffle(rng);
            PointedModel::new(permute_states(m, &perm), perm[left.current]).unwrap()
        }
        2 => {
            let p = PointedModel::new(perturb(rng, m), left.current).unwrap();
            make_rooted(rng, &p)
        }
        _ => {
            let other = random_pointed(rng, sig, max_states);
            make_rooted(rng, &other)
        }
    };
    (left, right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gameboard::validate_tree;
    use crate::kripke::is_rooted;
    use crate::syntax::{check_sentence, validate_in_fragment};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sentences_stay_in_fragment_and_signature() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sig = small_signature();
        for frag in FragmentConfig::all_op_subsets().into_iter().chain([FragmentConfig::full()]) {
            for _ in 0..50 {
                let s = random_sentence(&mut rng, &sig, &frag, 4);
                assert!(validate_in_fragment(&s, &frag).accepted(), "{s:?}");
                check_sentence(&s, &sig).unwrap();
                assert!(s.is_canonical());
            }
        }
    }

    #[test]
    fn trees_validate_and_closed_trees_are_closed() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let sig = small_signature();
        let frag = FragmentConfig::full();
        let actions = vec![Action::rel("r"), Action::star(Action::rel("r"))];
        for closed in [false, true] {
            let shape = TreeShape { height: 3, max_children: 3, closed };
            for _ in 0..50 {
                let tr = random_tree(&mut rng, &sig, &frag, &shape, &actions);
                assert!(validate_tree(&tr, &frag).valid());
                if closed {
                    assert!(tr.is_closed());
                }
            }
        }
    }

    #[test]
    fn rooted_pairs_are_rooted() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sig = small_signature();
        for _ in 0..50 {
            let (l, r) = random_rooted_pair(&mut rng, &sig, 5);
            assert!(is_rooted(&l) && is_rooted(&r));
        }
    }

    #[test]
    fn pairs_respect_the_state_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let sig = small_signature();
        for _ in 0..100 {
            let (l, r) = random_pair(&mut rng, &sig, 4);
            assert!(l.model.len() <= 4 && r.model.len() <= 4);
        }
    }
}
