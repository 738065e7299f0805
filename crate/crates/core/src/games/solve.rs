use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::checker::basic_agree;
use crate::error::{Error, Result};
use crate::gameboard::{EdgeLabel, GameboardTree};
use crate::kripke::{bits, KripkeModel, PointedModel, Relation};
use crate::syntax::{print_action, Action};

/// Where the game property is enforced.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub enum PropertyCheck {
    /// After every round and at the start, as in the move rules.
    #[default]
    EveryPosition,
    /// Only at leaves, matching what game sentences record.
    LeavesOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Current states plus the interpretation of the node's names on each side.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Position {
    pub left: usize,
    pub right: usize,
    pub env_left: Vec<usize>,
    pub env_right: Vec<usize>,
}

impl Position {
    pub fn start(left: &PointedModel, right: &PointedModel) -> Self {
        Position {
            left: left.current,
            right: right.current,
            env_left: left.model.named().to_vec(),
            env_right: right.model.named().to_vec(),
        }
    }
}

/// One round: the edge taken, ∀belard's pick for diamond and exists edges,
/// and ∃loise's reply on the other side (`None` if she had none).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Round {
    pub edge: usize,
    #[serde(serialize_with = "label_text")]
    pub label: EdgeLabel,
    pub pick: Option<(Side, usize)>,
    pub answer: Option<usize>,
}

fn label_text<S: serde::Serializer>(label: &EdgeLabel, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&label.to_string())
}

impl Round {
    pub fn describe(&self, left: &KripkeModel, right: &KripkeModel) -> String {
        let head = match &self.label {
            EdgeLabel::Dia(a) => format!("<{}>", print_action(a)),
            EdgeLabel::At(k) => format!("@{k}"),
            other => other.to_string(),
        };
        let Some((side, w)) = self.pick else {
            return head;
        };
        let (mine, theirs) = match side {
            Side::Left => (left, right),
            Side::Right => (right, left),
        };
        let tag = |s: Side| if s == Side::Left { "L" } else { "R" };
        let reply = match self.answer {
            Some(v) => format!("{}:{}", tag(side.other()), theirs.state_name(v)),
            None => format!("{}: no reply", tag(side.other())),
        };
        format!("{head} {}:{} -> {reply}", tag(side), mine.state_name(w))
    }
}

impl fmt::Display for Round {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.pick, self.answer) {
            (None, _) => write!(f, "{}", self.label),
            (Some((s, w)), a) => {
                write!(f, "{} {:?}:{w} -> ", self.label, s)?;
                match a {
                    Some(v) => write!(f, "{v}"),
                    None => write!(f, "none"),
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EfOutcome {
    pub eloise_wins: bool,
    /// A losing line for ∃loise when ∀belard wins; empty otherwise.
    pub trace: Vec<Round>,
}

/// Move rules and a memoized solver over two models with a shared base.
/// Only relations and props of the models are consulted; names come from
/// the position.
pub struct EfSolver<'m> {
    left: &'m KripkeModel,
    right: &'m KripkeModel,
    mode: PropertyCheck,
    memo: HashMap<(usize, Position), bool>,
    rel_left: HashMap<Action, Relation>,
    rel_right: HashMap<Action, Relation>,
}

impl<'m> EfSolver<'m> {
    pub fn new(left: &'m KripkeModel, right: &'m KripkeModel, mode: PropertyCheck) -> Self {
        EfSolver { left, right, mode, memo: HashMap::new(), rel_left: HashMap::new(), rel_right: HashMap::new() }
    }

    fn succ(&mut self, side: Side, a: &Action, w: usize) -> u64 {
        let (model, cache) = match side {
            Side::Left => (self.left, &mut self.rel_left),
            Side::Right => (self.right, &mut self.rel_right),
        };
        cache.entry(a.clone()).or_insert_with(|| model.interpret_action(a).expect("validated tree")).succ(w)
    }

    fn size(&self, side: Side) -> usize {
        match side {
            Side::Left => self.left.len(),
            Side::Right => self.right.len(),
        }
    }

    pub fn agree(&self, pos: &Position) -> bool {
        basic_agree(self.left, &pos.env_left, pos.left, self.right, &pos.env_right, pos.right)
    }

    fn checked_here(&self, node: &GameboardTree) -> bool {
        self.mode == PropertyCheck::EveryPosition || node.is_leaf()
    }

    /// ∀belard's options along `label`: `None` for forced edges; otherwise
    /// a side and a state, left side first, states ascending.
    pub fn challenges(&mut self, label: &EdgeLabel, pos: &Position) -> Vec<Option<(Side, usize)>> {
        let mut out = Vec::new();
        for side in [Side::Left, Side::Right] {
            let cur = if side == Side::Left { pos.left } else { pos.right };
            match label {
                EdgeLabel::Dia(a) => out.extend(bits(self.succ(side, a, cur)).map(|u| Some((side, u)))),
                EdgeLabel::Exists => out.extend((0..self.size(side)).map(|u| Some((side, u)))),
                _ => return vec![None],
            }
        }
        out
    }

    /// ∃loise's replies to `pick`, on the other side.
    pub fn answers(&mut self, label: &EdgeLabel, pos: &Position, pick: Option<(Side, usize)>) -> Vec<Option<usize>> {
        let Some((side, _)) = pick else {
            return vec![None];
        };
        let other = side.other();
        let cur = if other == Side::Left { pos.left } else { pos.right };
        match label {
            EdgeLabel::Dia(a) => bits(self.succ(other, a, cur)).map(Some).collect(),
            EdgeLabel::Exists => (0..self.size(other)).map(Some).collect(),
            _ => vec![None],
        }
    }

    /// The position after a complete round. `node` is the edge's source.
    pub fn apply(
        node: &GameboardTree,
        label: &EdgeLabel,
        pos: &Position,
        pick: Option<(Side, usize)>,
        answer: Option<usize>,
    ) -> Position {
        let mut next = pos.clone();
        match label {
            EdgeLabel::Idle(_) => {}
            EdgeLabel::At(k) => {
                let i = node.sig().named_index(k).expect("validated tree");
                next.left = pos.env_left[i];
                next.right = pos.env_right[i];
            }
            EdgeLabel::Store => {
                next.env_left.push(pos.left);
                next.env_right.push(pos.right);
            }
            EdgeLabel::Dia(_) | EdgeLabel::Exists => {
                let (side, w) = pick.expect("diamond and exists rounds carry a pick");
                let v = answer.expect("a reply exists");
                let (l, r) = if side == Side::Left { (w, v) } else { (v, w) };
                if matches!(label, EdgeLabel::Exists) {
                    next.env_left.push(l);
                    next.env_right.push(r);
                } else {
                    next.left = l;
                    next.right = r;
                }
            }
        }
        next
    }

    /// Whether ∃loise wins from `pos` at `node`.
    pub fn wins(&mut self, node: &GameboardTree, pos: &Position) -> bool {
        let key = (node as *const GameboardTree as usize, pos.clone());
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let v = (!self.checked_here(node) || self.agree(pos)) && self.refuting_challenge(node, pos).is_none();
        self.memo.insert(key, v);
        v
    }

    /// The first (edge, pick) against which every reply loses.
    pub fn refuting_challenge(&mut self, node: &GameboardTree, pos: &Position) -> Option<(usize, Option<(Side, usize)>)> {
        for (i, (label, _)) in node.children().iter().enumerate() {
            for pick in self.challenges(label, pos) {
                if self.best_answer(node, i, pos, pick).is_none() {
                    return Some((i, pick));
                }
            }
        }
        None
    }

    /// A winning reply for ∃loise, if one exists. The outer `Option` is the
    /// existence of a winning reply; the inner one is the reply itself.
    pub fn best_answer(
        &mut self,
        node: &GameboardTree,
        edge: usize,
        pos: &Position,
        pick: Option<(Side, usize)>,
    ) -> Option<Option<usize>> {
        let (label, child) = &node.children()[edge];
        for answer in self.answers(label, pos, pick) {
            let next = Self::apply(node, label, pos, pick, answer);
            if self.wins(child, &next) {
                return Some(answer);
            }
        }
        None
    }

    /// ∃loise's displayed reply on a losing line: the first reply keeping the
    /// game property, else the first reply.
    fn displayed_answer(&mut self, node: &GameboardTree, edge: usize, pos: &Position, pick: Option<(Side, usize)>) -> Option<Option<usize>> {
        let label = &node.children()[edge].0;
        let answers = self.answers(label, pos, pick);
        answers
            .iter()
            .copied()
            .find(|&a| self.agree(&Self::apply(node, label, pos, pick, a)))
            .or(answers.first().copied())
    }

    /// A replayable losing line from a lost position.
    pub fn losing_line(&mut self, node: &GameboardTree, pos: &Position) -> Vec<Round> {
        let mut out = Vec::new();
        let mut node = node;
        let mut pos = pos.clone();
        loop {
            if self.checked_here(node) && !self.agree(&pos) {
                return out;
            }
            let Some((edge, pick)) = self.refuting_challenge(node, &pos) else {
                return out;
            };
            let (label, child) = &node.children()[edge];
            let answer = self.displayed_answer(node, edge, &pos, pick);
            out.push(Round { edge, label: label.clone(), pick, answer: answer.flatten() });
            match answer {
                None => return out,
                Some(a) => {
                    pos = Self::apply(node, label, &pos, pick, a);
                    node = child;
                }
            }
        }
    }
}

fn check_inputs(tr: &GameboardTree, left: &PointedModel, right: &PointedModel) -> Result<()> {
    if left.model.sig() != tr.sig() || right.model.sig() != tr.sig() {
        return Err(Error::Mismatch("pointed models must be over the tree's root signature".into()));
    }
    Ok(())
}

/// Solves the finite game with the game property checked at every position.
pub fn ef_solve(tr: &GameboardTree, left: &PointedModel, right: &PointedModel) -> Result<EfOutcome> {
    ef_solve_with(tr, left, right, PropertyCheck::EveryPosition)
}

pub fn ef_solve_with(tr: &GameboardTree, left: &PointedModel, right: &PointedModel, mode: PropertyCheck) -> Result<EfOutcome> {
    check_inputs(tr, left, right)?;
    let mut solver = EfSolver::new(&left.model, &right.model, mode);
    let pos = Position::start(left, right);
    let eloise_wins = solver.wins(tr, &pos);
    let trace = if eloise_wins { Vec::new() } else { solver.losing_line(tr, &pos) };
    Ok(EfOutcome { eloise_wins, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::gameboard::{complete_tree, parse_tree};
    use crate::syntax::{FragmentConfig, Op};

    #[test]
    fn loop_pair_has_three_round_refutation() {
        let left = PointedModel::new(fixtures::loop_left(), 0).unwrap();
        for depth in 4..7 {
            let right = PointedModel::new(fixtures::loop_right(depth), 0).unwrap();
            let tr = parse_tree(fixtures::LOOP_TREE_TEXT, left.model.sig()).unwrap();
            let out = ef_solve(&tr, &left, &right).unwrap();
            assert!(!out.eloise_wins);
            let lines: Vec<String> = out.trace.iter().map(|r| r.describe(&left.model, &right.model)).collect();
            assert_eq!(lines, ["down", "<l> L:1 -> R:1", "<l> L:0 -> R:2"]);
        }
    }

    #[test]
    fn copycat_wins() {
        let m = fixtures::loop_left();
        let tr = complete_tree(m.sig(), &FragmentConfig::full(), 2, &[Action::rel("l")]).unwrap();
        for w in 0..m.len() {
            let pm = PointedModel::new(m.clone(), w).unwrap();
            assert!(ef_solve(&tr, &pm, &pm).unwrap().eloise_wins);
        }
    }

    #[test]
    fn positive_pair_in_the_store_fragment() {
        let (m, n) = fixtures::pos_pair();
        let frag = FragmentConfig::ops_only([Op::Diamond, Op::Store]);
        let tr = complete_tree(m.sig(), &frag, 2, &[Action::rel("l")]).unwrap();
        let out = ef_solve(&tr, &PointedModel::new(m, 0).unwrap(), &PointedModel::new(n, 0).unwrap()).unwrap();
        assert!(out.eloise_wins);
        assert!(out.trace.is_empty());
    }

    #[test]
    fn modes_differ_on_open_trees() {
        let (m, _) = fixtures::pos_pair();
        let tr = parse_tree("(dia l leaf)", m.sig()).unwrap();
        // Both states 1 and 2 have no successors but differ from 0 on p.
        let a = PointedModel::new(m.clone(), 0).unwrap();
        let b = PointedModel::new(m.clone(), 1).unwrap();
        assert!(!ef_solve(&tr, &a, &b).unwrap().eloise_wins);
        let out = ef_solve_with(&tr, &a, &b, PropertyCheck::LeavesOnly).unwrap();
        assert!(!out.eloise_wins);
        assert_eq!(out.trace.len(), 1);
        assert_eq!(out.trace[0].answer, None);
        let c = PointedModel::new(m, 2).unwrap();
        assert!(ef_solve_with(&tr, &b, &c, PropertyCheck::LeavesOnly).unwrap().eloise_wins);
    }

    #[test]
    fn signature_mismatch_is_an_error() {
        let (m, _) = fixtures::quant_pair();
        let tr = GameboardTree::leaf(fixtures::loop_signature());
        let pm = PointedModel::new(m, 0).unwrap();
        assert!(ef_solve(&tr, &pm, &pm).is_err());
    }
}
