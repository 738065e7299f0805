use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gameboard::{EdgeLabel, GameboardTree};
use crate::kripke::{KripkeModel, PointedModel};

use super::solve::{EfSolver, Position, PropertyCheck, Round, Side};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Player {
    Abelard,
    Eloise,
}

/// A half-move. ∀belard opens each round; ∃loise closes it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Move {
    /// Child edge to play, with a side and state for diamond and exists edges.
    Challenge { edge: usize, pick: Option<(Side, usize)> },
    /// A state on the other side, or `None` for forced edges.
    Answer(Option<usize>),
}

/// A game in progress. The models are the starting ones; names introduced by
/// store and exists rounds live in the position.
#[derive(Clone, Debug)]
pub struct GameState {
    left: KripkeModel,
    right: KripkeModel,
    node: Arc<GameboardTree>,
    pos: Position,
    pending: Option<(usize, Option<(Side, usize)>)>,
    history: Vec<Round>,
    winner: Option<Player>,
    mode: PropertyCheck,
}

impl GameState {
    pub fn new(tr: &GameboardTree, left: PointedModel, right: PointedModel, mode: PropertyCheck) -> Result<Self> {
        if left.model.sig() != tr.sig() || right.model.sig() != tr.sig() {
            return Err(Error::Mismatch("pointed models must be over the tree's root signature".into()));
        }
        let pos = Position::start(&left, &right);
        let mut gs = GameState {
            left: left.model,
            right: right.model,
            node: Arc::new(tr.clone()),
            pos,
            pending: None,
            history: Vec::new(),
            winner: None,
            mode,
        };
        gs.settle();
        Ok(gs)
    }

    pub fn node(&self) -> &GameboardTree {
        &self.node
    }

    pub fn position(&self) -> &Position {
        &self.pos
    }

    pub fn history(&self) -> &[Round] {
        &self.history
    }

    pub fn winner(&self) -> Option<Player> {
        self.winner
    }

    pub fn models(&self) -> (&KripkeModel, &KripkeModel) {
        (&self.left, &self.right)
    }

    pub fn to_move(&self) -> Option<Player> {
        match (self.winner, self.pending) {
            (Some(_), _) => None,
            (None, None) => Some(Player::Abelard),
            (None, Some(_)) => Some(Player::Eloise),
        }
    }

    /// The current pointed models, expanded by the names bound so far.
    pub fn pointed(&self) -> Result<(PointedModel, PointedModel)> {
        let expand = |m: &KripkeModel, env: &[usize], cur: usize| -> Result<PointedModel> {
            let mut m = m.clone();
            let base = m.sig().named_count();
            for (x, &w) in self.node.sig().bound_vars().iter().skip(m.sig().bound_vars().len()).zip(&env[base..]) {
                m = m.expand(x, w)?;
            }
            PointedModel::new(m, cur)
        };
        Ok((expand(&self.left, &self.pos.env_left, self.pos.left)?, expand(&self.right, &self.pos.env_right, self.pos.right)?))
    }

    fn solver(&self) -> EfSolver<'_> {
        EfSolver::new(&self.left, &self.right, self.mode)
    }

    /// Decides the game at the current node if it is over.
    fn settle(&mut self) {
        let checked = self.mode == PropertyCheck::EveryPosition || self.node.is_leaf();
        let mut solver = EfSolver::new(&self.left, &self.right, self.mode);
        if checked && !solver.agree(&self.pos) {
            self.winner = Some(Player::Abelard);
        } else if self.node.children().iter().all(|(lb, _)| solver.challenges(lb, &self.pos).is_empty()) {
            self.winner = Some(Player::Eloise);
        }
    }

    /// The strategy move for whoever is to move: a refuting challenge when
    /// one exists, a winning reply when one exists, else the first legal move.
    pub fn suggested_move(&self) -> Option<Move> {
        let player = self.to_move()?;
        let mut solver = self.solver();
        let preferred = match (player, self.pending) {
            (Player::Abelard, _) => {
                solver.refuting_challenge(&self.node, &self.pos).map(|(edge, pick)| Move::Challenge { edge, pick })
            }
            (Player::Eloise, Some((edge, pick))) => solver.best_answer(&self.node, edge, &self.pos, pick).map(Move::Answer),
            (Player::Eloise, None) => None,
        };
        preferred.or_else(|| legal_moves(self, player).into_iter().next())
    }

    pub fn describe_move(&self, mv: &Move) -> String {
        let name = |side: Side, w: usize| match side {
            Side::Left => format!("L:{}", self.left.state_name(w)),
            Side::Right => format!("R:{}", self.right.state_name(w)),
        };
        match mv {
            Move::Challenge { edge, pick } => {
                let label = &self.node.children()[*edge].0;
                match pick {
                    Some((side, w)) => format!("{label} {}", name(*side, *w)),
                    None => label.to_string(),
                }
            }
            Move::Answer(None) => "follow".to_string(),
            Move::Answer(Some(v)) => {
                let side = self.pending.and_then(|(_, p)| p).map_or(Side::Right, |(s, _)| s.other());
                name(side, *v)
            }
        }
    }

    /// Applies one half-move. Illegal moves are rejected with the legal list.
    pub fn step(&self, mv: &Move) -> Result<GameState> {
        let player = self.to_move().ok_or_else(|| Error::Precondition("the game is over".into()))?;
        let legal = legal_moves(self, player);
        if !legal.contains(mv) {
            return Err(Error::IllegalMove {
                mv: format!("{mv:?}"),
                legal: legal.iter().map(|m| self.describe_move(m)).collect(),
            });
        }
        let mut next = self.clone();
        match *mv {
            Move::Challenge { edge, pick } => {
                next.pending = Some((edge, pick));
                if legal_moves(&next, Player::Eloise).is_empty() {
                    let label = self.node.children()[edge].0.clone();
                    next.history.push(Round { edge, label, pick, answer: None });
                    next.pending = None;
                    next.winner = Some(Player::Abelard);
                }
            }
            Move::Answer(answer) => {
                let (edge, pick) = self.pending.expect("eloise moves only with a pending challenge");
                let (label, child) = &self.node.children()[edge];
                next.pos = EfSolver::apply(&self.node, label, &self.pos, pick, answer);
                next.history.push(Round { edge, label: label.clone(), pick, answer });
                next.node = child.clone();
                next.pending = None;
                next.settle();
            }
        }
        Ok(next)
    }
}

/// All legal half-moves for `player`; empty when it is not their turn.
pub fn legal_moves(gs: &GameState, player: Player) -> Vec<Move> {
    if gs.to_move() != Some(player) {
        return Vec::new();
    }
    let mut solver = gs.solver();
    match (player, gs.pending) {
        (Player::Abelard, None) => gs
            .node
            .children()
            .iter()
            .enumerate()
            .flat_map(|(edge, (label, _))| {
                solver.challenges(label, &gs.pos).into_iter().map(move |pick| Move::Challenge { edge, pick })
            })
            .collect(),
        (Player::Eloise, Some((edge, pick))) => {
            let label: &EdgeLabel = &gs.node.children()[edge].0;
            solver.answers(label, &gs.pos, pick).into_iter().map(Move::Answer).collect()
        }
        _ => Vec::new(),
    }
}
