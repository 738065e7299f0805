//! Gameboard trees: signature-labelled trees whose edges name the moves of a round.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::syntax::{
    check_action, parse_action_at, print_action, validate_in_fragment, Action, FragmentConfig, Op, Sentence,
    Signature, SymbolKind,
};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeLabel {
    /// Sibling idle edges are told apart by their tag; plain `idle` is tag 0.
    Idle(u32),
    Store,
    Exists,
    At(String),
    Dia(Action),
}

impl EdgeLabel {
    /// Store and exists edges extend the signature by a fresh variable.
    pub fn binds(&self) -> bool {
        matches!(self, EdgeLabel::Store | EdgeLabel::Exists)
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeLabel::Idle(0) => write!(f, "idle"),
            EdgeLabel::Idle(t) => write!(f, "idle {t}"),
            EdgeLabel::Store => write!(f, "down"),
            EdgeLabel::Exists => write!(f, "exists"),
            EdgeLabel::At(k) => write!(f, "at {k}"),
            EdgeLabel::Dia(a) => write!(f, "dia {}", print_action(a)),
        }
    }
}

/// Children are shared, so complete trees are stored as DAGs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GameboardTree {
    sig: Signature,
    children: Vec<(EdgeLabel, Arc<GameboardTree>)>,
}

/// Signature of the child reached along `label`.
pub fn child_signature(sig: &Signature, label: &EdgeLabel) -> Signature {
    if label.binds() {
        sig.extend().0
    } else {
        sig.clone()
    }
}

impl GameboardTree {
    pub fn leaf(sig: Signature) -> Self {
        GameboardTree { sig, children: Vec::new() }
    }

    /// Unchecked construction; see [`validate_tree`].
    pub fn node(sig: Signature, children: Vec<(EdgeLabel, Arc<GameboardTree>)>) -> Self {
        GameboardTree { sig, children }
    }

    /// Builds a node whose children are produced from their own signatures.
    pub fn with_children(
        sig: Signature,
        labels: Vec<EdgeLabel>,
        mut child: impl FnMut(Signature, &EdgeLabel) -> GameboardTree,
    ) -> Self {
        let children = labels
            .into_iter()
            .map(|lb| {
                let c = child(child_signature(&sig, &lb), &lb);
                (lb, Arc::new(c))
            })
            .collect();
        GameboardTree { sig, children }
    }

    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    pub fn children(&self) -> &[(EdgeLabel, Arc<GameboardTree>)] {
        &self.children
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn height(&self) -> usize {
        self.children.iter().map(|(_, c)| 1 + c.height()).max().unwrap_or(0)
    }

    /// Node count of the unfolded tree.
    pub fn node_count(&self) -> u128 {
        1 + self.children.iter().map(|(_, c)| c.node_count()).sum::<u128>()
    }

    /// Every inner node has an idle, store or exists child.
    ///
    /// On such trees the game property at inner nodes is implied by the
    /// property at the leaves, so both solver check modes agree.
    pub fn is_closed(&self) -> bool {
        self.is_leaf()
            || (self.children.iter().any(|(lb, _)| matches!(lb, EdgeLabel::Idle(_) | EdgeLabel::Store | EdgeLabel::Exists))
                && self.children.iter().all(|(_, c)| c.is_closed()))
    }

    /// All trees obtained by deleting one edge (with its subtree).
    pub fn single_prunings(&self) -> Vec<GameboardTree> {
        let mut out = Vec::new();
        for i in 0..self.children.len() {
            let mut children = self.children.clone();
            children.remove(i);
            out.push(GameboardTree { sig: self.sig.clone(), children });
            for sub in self.children[i].1.single_prunings() {
                let mut children = self.children.clone();
                children[i].1 = Arc::new(sub);
                out.push(GameboardTree { sig: self.sig.clone(), children });
            }
        }
        out
    }

    /// Removes the last level: every node at depth `height - 1` becomes a leaf.
    pub fn truncate(&self, height: usize) -> GameboardTree {
        if height == 0 {
            return GameboardTree::leaf(self.sig.clone());
        }
        let children = self.children.iter().map(|(lb, c)| (lb.clone(), Arc::new(c.truncate(height - 1)))).collect();
        GameboardTree { sig: self.sig.clone(), children }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeProblem {
    pub path: Vec<usize>,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TreeReport {
    pub problems: Vec<TreeProblem>,
}

impl TreeReport {
    pub fn valid(&self) -> bool {
        self.problems.is_empty()
    }
}

/// Checks signature annotations, sibling-label uniqueness and fragment gating.
pub fn validate_tree(tr: &GameboardTree, frag: &FragmentConfig) -> TreeReport {
    let mut report = TreeReport::default();
    let mut path = Vec::new();
    validate_node(tr, frag, &mut path, &mut report.problems);
    report
}

fn validate_node(tr: &GameboardTree, frag: &FragmentConfig, path: &mut Vec<usize>, out: &mut Vec<TreeProblem>) {
    for (i, (lb, child)) in tr.children.iter().enumerate() {
        path.push(i);
        let mut local = Vec::new();
        let mut problem = |message: String| local.push(message);
        if tr.children[..i].iter().any(|(other, _)| other == lb) {
            problem(format!("duplicate sibling label `{lb}`"));
        }
        let gate = match lb {
            EdgeLabel::Idle(_) => None,
            EdgeLabel::Store => Some(Op::Store),
            EdgeLabel::Exists => Some(Op::Exists),
            EdgeLabel::At(_) => Some(Op::At),
            EdgeLabel::Dia(_) => Some(Op::Diamond),
        };
        if let Some(op) = gate.filter(|op| !frag.has(*op)) {
            problem(format!("`{}` edges are not enabled", op.name()));
        }
        match lb {
            EdgeLabel::At(k) => {
                if !matches!(tr.sig.kind_of(k), Some(SymbolKind::Nominal | SymbolKind::Var)) {
                    problem(format!("`{k}` is not a nominal of the node signature"));
                }
            }
            EdgeLabel::Dia(a) => {
                if let Err(e) = check_action(a, &tr.sig) {
                    problem(e.to_string());
                }
                let probe = Sentence::dia(a.clone(), Sentence::tt());
                for v in validate_in_fragment(&probe, frag).violations.iter().filter(|v| v.ctor != "diamond") {
                    problem(format!("action constructor `{}` is not enabled", v.ctor));
                }
            }
            _ => {}
        }
        let sig_ok = if lb.binds() {
            child.sig.same_base(&tr.sig)
                && child.sig.bound_vars().len() == tr.sig.bound_vars().len() + 1
                && child.sig.bound_vars()[..tr.sig.bound_vars().len()] == *tr.sig.bound_vars()
                && !tr.sig.declares(child.sig.bound_vars().last().unwrap())
        } else {
            child.sig == tr.sig
        };
        if !sig_ok {
            problem(
                if lb.binds() {
                    "child signature must extend the parent by one fresh variable".to_string()
                } else {
                    "child signature must equal the parent signature".to_string()
                },
            );
        }
        out.extend(local.into_iter().map(|message| TreeProblem { path: path.clone(), message }));
        validate_node(child, frag, path, out);
        path.pop();
    }
}

/// The complete tree of the given height: every node above the last level has
/// one child per enabled move, in the order idle, store, exists, at-edges
/// (nominals then variables), dia-edges in the supplied order.
pub fn complete_tree(sig: &Signature, frag: &FragmentConfig, height: usize, actions: &[Action]) -> Result<GameboardTree> {
    if frag.has(Op::Diamond) && actions.is_empty() {
        return Err(Error::Precondition("complete trees with diamond edges need at least one action".into()));
    }
    for a in actions {
        check_action(a, sig)?;
    }
    let mut cache = HashMap::new();
    Ok((*complete_shared(sig, frag, height, actions, &mut cache)).clone())
}

fn complete_shared(
    sig: &Signature,
    frag: &FragmentConfig,
    height: usize,
    actions: &[Action],
    cache: &mut HashMap<(usize, usize), Arc<GameboardTree>>,
) -> Arc<GameboardTree> {
    let key = (sig.bound_vars().len(), height);
    if let Some(t) = cache.get(&key) {
        return t.clone();
    }
    let tree = if height == 0 {
        GameboardTree::leaf(sig.clone())
    } else {
        let mut labels = vec![EdgeLabel::Idle(0)];
        if frag.has(Op::Store) {
            labels.push(EdgeLabel::Store);
        }
        if frag.has(Op::Exists) {
            labels.push(EdgeLabel::Exists);
        }
        if frag.has(Op::At) {
            labels.extend(sig.named().map(|k| EdgeLabel::At(k.to_string())));
        }
        if frag.has(Op::Diamond) {
            labels.extend(actions.iter().cloned().map(EdgeLabel::Dia));
        }
        let children = labels
            .into_iter()
            .map(|lb| {
                let c = complete_shared(&child_signature(sig, &lb), frag, height - 1, actions, cache);
                (lb, c)
            })
            .collect();
        GameboardTree::node(sig.clone(), children)
    };
    let tree = Arc::new(tree);
    cache.insert(key, tree.clone());
    tree
}

pub fn print_tree(tr: &GameboardTree) -> String {
    let mut out = String::new();
    print_into(tr, &mut out);
    out
}

fn print_into(tr: &GameboardTree, out: &mut String) {
    let edge = |lb: &EdgeLabel, c: &GameboardTree, out: &mut String| {
        out.push('(');
        out.push_str(&lb.to_string());
        out.push(' ');
        print_into(c, out);
        out.push(')');
    };
    match tr.children.as_slice() {
        [] => out.push_str("leaf"),
        [(lb, c)] => edge(lb, c, out),
        many => {
            out.push_str("(branch");
            for (lb, c) in many {
                out.push(' ');
                edge(lb, c, out);
            }
            out.push(')');
        }
    }
}

impl fmt::Display for GameboardTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_tree(self))
    }
}

/// Parses the s-expression tree format over root signature `sig`. Binding
/// edges introduce the next fresh variable, so `at` edges below them may
/// name `x0`, `x1`, and so on.
pub fn parse_tree(text: &str, sig: &Signature) -> Result<GameboardTree> {
    let mut p = TreeParser { text, pos: 0 };
    let tr = p.tree(sig)?;
    p.skip_ws();
    if p.pos != text.len() {
        return Err(Error::parse(p.pos, "unexpected trailing input"));
    }
    Ok(tr)
}

struct TreeParser<'a> {
    text: &'a str,
    pos: usize,
}

impl TreeParser<'_> {
    fn skip_ws(&mut self) {
        while self.text[self.pos..].starts_with(|c: char| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn word(&mut self) -> Result<String> {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        let len = rest.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).unwrap_or(rest.len());
        if len == 0 {
            return Err(Error::parse(self.pos, "expected a word"));
        }
        self.pos += len;
        Ok(rest[..len].to_string())
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(Error::parse(self.pos, format!("expected `{c}`")))
        }
    }

    fn tag(&mut self) -> Result<u32> {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        let len = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        if len == 0 {
            return Ok(0);
        }
        let tag = rest[..len].parse().map_err(|_| Error::parse(self.pos, "idle tag out of range"))?;
        self.pos += len;
        Ok(tag)
    }

    fn tree(&mut self, sig: &Signature) -> Result<GameboardTree> {
        self.skip_ws();
        let start = self.pos;
        if !self.eat('(') {
            return match self.word()?.as_str() {
                "leaf" => Ok(GameboardTree::leaf(sig.clone())),
                _ => Err(Error::parse(start, "expected `leaf` or `(`")),
            };
        }
        let save = self.pos;
        if self.word().ok().as_deref() == Some("branch") {
            let mut children = Vec::new();
            while self.eat('(') {
                children.push(self.edge(sig)?);
                self.expect(')')?;
            }
            self.expect(')')?;
            if children.is_empty() {
                return Err(Error::parse(start, "`branch` needs at least one edge"));
            }
            return Ok(GameboardTree::node(sig.clone(), children));
        }
        self.pos = save;
        let child = self.edge(sig)?;
        self.expect(')')?;
        Ok(GameboardTree::node(sig.clone(), vec![child]))
    }

    fn edge(&mut self, sig: &Signature) -> Result<(EdgeLabel, Arc<GameboardTree>)> {
        self.skip_ws();
        let start = self.pos;
        let label = match self.word()?.as_str() {
            "idle" => EdgeLabel::Idle(self.tag()?),
            "down" => EdgeLabel::Store,
            "exists" => EdgeLabel::Exists,
            "at" => {
                let k = self.word()?;
                if !matches!(sig.kind_of(&k), Some(SymbolKind::Nominal | SymbolKind::Var)) {
                    return Err(Error::Undeclared { kind: "nominal", name: k });
                }
                EdgeLabel::At(k)
            }
            "dia" => {
                let (a, end) = parse_action_at(self.text, self.pos, sig)?;
                self.pos = end;
                EdgeLabel::Dia(a)
            }
            other => return Err(Error::parse(start, format!("unknown edge kind `{other}`"))),
        };
        let child = self.tree(&child_signature(sig, &label))?;
        Ok((label, Arc::new(child)))
    }
}
