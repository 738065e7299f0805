//! Finite EF games over gameboard trees and their game sentences.
//!
//! Game sentences are hash-consed in a [`GameStore`]; two sentences built in
//! the same store are equal iff their ids are equal. Set components are
//! sorted by id, so equality never depends on construction order.

mod normal;
mod play;
mod solve;

use std::collections::HashMap;

pub use normal::{normal_form, Membership, NormalForm};
pub use play::{legal_moves, GameState, Move, Player};
pub use solve::{ef_solve, ef_solve_with, EfOutcome, EfSolver, Position, PropertyCheck, Round, Side};

use crate::checker::basic_signs;
use crate::error::{Error, Result};
use crate::gameboard::{EdgeLabel, GameboardTree};
use crate::kripke::{bits, KripkeModel, PointedModel, Relation};
use crate::syntax::{Action, Sentence};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GsId(u32);

impl GsId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GameSentence {
    /// Signs of the node's basic sentences, named states first, then props.
    Leaf(Vec<bool>),
    /// One component per child edge, in child order.
    Node(Vec<Component>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Component {
    /// Under a diamond or exists edge; sorted and duplicate-free.
    Set(Vec<GsId>),
    /// Under an at, store or idle edge.
    Single(GsId),
}

#[derive(Clone, Debug, Default)]
pub struct GameStore {
    items: Vec<GameSentence>,
    index: HashMap<GameSentence, GsId>,
}

impl GameStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, g: GameSentence) -> GsId {
        if let Some(&id) = self.index.get(&g) {
            return id;
        }
        let id = GsId(u32::try_from(self.items.len()).expect("game store overflow"));
        self.items.push(g.clone());
        self.index.insert(g, id);
        id
    }

    pub fn get(&self, id: GsId) -> &GameSentence {
        &self.items[id.index()]
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    fn set(&mut self, mut ids: Vec<GsId>) -> Component {
        ids.sort_unstable();
        ids.dedup();
        Component::Set(ids)
    }
}

fn shape_error() -> Error {
    Error::Tree("game sentence does not match the tree shape".into())
}

/// The sentence a game sentence stands for.
pub fn lower_game_sentence(store: &GameStore, tr: &GameboardTree, id: GsId) -> Result<Sentence> {
    match (store.get(id), tr.is_leaf()) {
        (GameSentence::Leaf(signs), true) => {
            let sig = tr.sig();
            if signs.len() != sig.basic_count() {
                return Err(shape_error());
            }
            let basics = sig.named().map(Sentence::nom).chain(sig.props().iter().map(Sentence::prop));
            Ok(Sentence::and(basics.zip(signs).map(|(b, &pos)| if pos { b } else { Sentence::neg(b) })))
        }
        (GameSentence::Node(comps), false) if comps.len() == tr.children().len() => {
            let mut parts = Vec::with_capacity(comps.len());
            for ((label, child), comp) in tr.children().iter().zip(comps) {
                let var = || child.sig().bound_vars().last().cloned().unwrap_or_default();
                let part = match (label, comp) {
                    (EdgeLabel::Dia(a), Component::Set(ids)) => {
                        let gamma = lower_all(store, child, ids)?;
                        Sentence::and(
                            gamma
                                .iter()
                                .map(|g| Sentence::dia(a.clone(), g.clone()))
                                .chain([Sentence::boxed(a.clone(), Sentence::or(gamma.iter().cloned()))]),
                        )
                    }
                    (EdgeLabel::Exists, Component::Set(ids)) => {
                        let gamma = lower_all(store, child, ids)?;
                        let x = var();
                        Sentence::and(
                            gamma
                                .iter()
                                .map(|g| Sentence::exists(x.clone(), g.clone()))
                                .chain([Sentence::forall(x.clone(), Sentence::or(gamma.iter().cloned()))]),
                        )
                    }
                    (EdgeLabel::At(k), Component::Single(g)) => Sentence::at(k.clone(), lower_game_sentence(store, child, *g)?),
                    (EdgeLabel::Store, Component::Single(g)) => Sentence::store(var(), lower_game_sentence(store, child, *g)?),
                    (EdgeLabel::Idle(_), Component::Single(g)) => lower_game_sentence(store, child, *g)?,
                    _ => return Err(shape_error()),
                };
                parts.push(part);
            }
            Ok(Sentence::and(parts))
        }
        _ => Err(shape_error()),
    }
}

/// The structured form of a game sentence: leaves list the signs of their
/// basic sentences, set components list their members in braces.
pub fn describe_game_sentence(store: &GameStore, tr: &GameboardTree, id: GsId) -> Result<String> {
    match (store.get(id), tr.is_leaf()) {
        (GameSentence::Leaf(signs), true) => {
            let sig = tr.sig();
            if signs.len() != sig.basic_count() {
                return Err(shape_error());
            }
            let basics = sig.named().map(str::to_string).chain(sig.props().iter().cloned());
            let items: Vec<String> =
                basics.zip(signs).map(|(b, &pos)| format!("{}{b}", if pos { '+' } else { '-' })).collect();
            Ok(format!("[{}]", items.join(" ")))
        }
        (GameSentence::Node(comps), false) if comps.len() == tr.children().len() => {
            let mut parts = Vec::with_capacity(comps.len());
            for ((label, child), comp) in tr.children().iter().zip(comps) {
                let body = match comp {
                    Component::Set(ids) => {
                        let members =
                            ids.iter().map(|&g| describe_game_sentence(store, child, g)).collect::<Result<Vec<_>>>()?;
                        format!("{{{}}}", members.join(", "))
                    }
                    Component::Single(g) => describe_game_sentence(store, child, *g)?,
                };
                parts.push(format!("({label} {body})"));
            }
            Ok(parts.join(" "))
        }
        _ => Err(shape_error()),
    }
}

fn lower_all(store: &GameStore, tr: &GameboardTree, ids: &[GsId]) -> Result<Vec<Sentence>> {
    ids.iter().map(|&g| lower_game_sentence(store, tr, g)).collect()
}

/// Builds characteristic game sentences for one model, memoized by
/// (tree node, state, interpretation of the node's names).
pub struct CharBuilder<'m> {
    model: &'m KripkeModel,
    memo: HashMap<(usize, usize, Vec<usize>), GsId>,
    actions: HashMap<Action, Relation>,
}

impl<'m> CharBuilder<'m> {
    pub fn new(model: &'m KripkeModel) -> Self {
        CharBuilder { model, memo: HashMap::new(), actions: HashMap::new() }
    }

    /// `env` interprets `tr.sig().named()`; the tree must be valid over a
    /// signature with the model's base.
    pub fn build(&mut self, store: &mut GameStore, tr: &GameboardTree, w: usize, env: &[usize]) -> GsId {
        let key = (tr as *const GameboardTree as usize, w, env.to_vec());
        if let Some(&id) = self.memo.get(&key) {
            return id;
        }
        let g = if tr.is_leaf() {
            GameSentence::Leaf(basic_signs(self.model, env, w))
        } else {
            let mut comps = Vec::with_capacity(tr.children().len());
            for (label, child) in tr.children() {
                let comp = match label {
                    EdgeLabel::Idle(_) => Component::Single(self.build(store, child, w, env)),
                    EdgeLabel::At(k) => {
                        let u = env[tr.sig().named_index(k).expect("validated tree")];
                        Component::Single(self.build(store, child, u, env))
                    }
                    EdgeLabel::Store => Component::Single(self.build(store, child, w, &pushed(env, w))),
                    EdgeLabel::Dia(a) => {
                        let succ = self.relation(a).succ(w);
                        let ids = bits(succ).map(|u| self.build(store, child, u, env)).collect();
                        store.set(ids)
                    }
                    EdgeLabel::Exists => {
                        let ids = (0..self.model.len()).map(|u| self.build(store, child, w, &pushed(env, u))).collect();
                        store.set(ids)
                    }
                };
                comps.push(comp);
            }
            GameSentence::Node(comps)
        };
        let id = store.intern(g);
        self.memo.insert(key, id);
        id
    }

    fn relation(&mut self, a: &Action) -> &Relation {
        if !self.actions.contains_key(a) {
            let r = self.model.interpret_action(a).expect("validated tree");
            self.actions.insert(a.clone(), r);
        }
        &self.actions[a]
    }
}

fn pushed(env: &[usize], u: usize) -> Vec<usize> {
    let mut out = env.to_vec();
    out.push(u);
    out
}

/// The unique game sentence over `tr` satisfied by `pm`.
pub fn char_formula(store: &mut GameStore, tr: &GameboardTree, pm: &PointedModel) -> Result<GsId> {
    if pm.model.sig() != tr.sig() {
        return Err(Error::Mismatch("model signature differs from the tree root".into()));
    }
    Ok(CharBuilder::new(&pm.model).build(store, tr, pm.current, pm.model.named()))
}

/// Closed-form size of the game sentence set, saturating at `u128::MAX`.
pub fn predicted_theta_size(tr: &GameboardTree) -> u128 {
    if tr.is_leaf() {
        return pow2(tr.sig().basic_count() as u128);
    }
    tr.children().iter().fold(1u128, |acc, (label, child)| {
        let c = predicted_theta_size(child);
        let n = if matches!(label, EdgeLabel::Dia(_) | EdgeLabel::Exists) { pow2(c) } else { c };
        acc.saturating_mul(n)
    })
}

fn pow2(e: u128) -> u128 {
    if e >= 128 {
        u128::MAX
    } else {
        1u128 << e
    }
}

/// Every game sentence over `tr`, in a fixed order.
pub fn enumerate_game_sentences(store: &mut GameStore, tr: &GameboardTree, size_cap: u128) -> Result<Vec<GsId>> {
    let predicted = predicted_theta_size(tr);
    if predicted > size_cap {
        return Err(Error::CapExceeded { predicted, cap: size_cap });
    }
    let mut memo = HashMap::new();
    Ok(enumerate_node(store, tr, &mut memo))
}

fn enumerate_node(store: &mut GameStore, tr: &GameboardTree, memo: &mut HashMap<usize, Vec<GsId>>) -> Vec<GsId> {
    let key = tr as *const GameboardTree as usize;
    if let Some(ids) = memo.get(&key) {
        return ids.clone();
    }
    let out: Vec<GsId> = if tr.is_leaf() {
        let b = tr.sig().basic_count();
        (0..1u64 << b)
            .map(|mask| store.intern(GameSentence::Leaf((0..b).map(|i| mask & (1 << i) == 0).collect())))
            .collect()
    } else {
        let mut options: Vec<Vec<Component>> = Vec::new();
        for (label, child) in tr.children() {
            let theta = enumerate_node(store, child, memo);
            let opts = if matches!(label, EdgeLabel::Dia(_) | EdgeLabel::Exists) {
                (0..1u64 << theta.len())
                    .map(|mask| store.set(bits(mask).map(|i| theta[i]).collect()))
                    .collect()
            } else {
                theta.into_iter().map(Component::Single).collect()
            };
            options.push(opts);
        }
        let mut acc: Vec<Vec<Component>> = vec![Vec::new()];
        for opts in &options {
            acc = acc
                .iter()
                .flat_map(|prefix| {
                    opts.iter().map(move |c| {
                        let mut v = prefix.clone();
                        v.push(c.clone());
                        v
                    })
                })
                .collect();
        }
        acc.into_iter().map(|comps| store.intern(GameSentence::Node(comps))).collect()
    };
    memo.insert(key, out.clone());
    out
}
