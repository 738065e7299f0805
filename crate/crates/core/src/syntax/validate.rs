use std::fmt;

use serde::Serialize;

use super::term::{Action, Sentence};
use super::{Ctor, FragmentConfig, Op, Signature, SymbolKind};
use crate::error::{Error, Result};

/// A constructor outside the fragment, located by child indices from the root.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub path: Vec<usize>,
    pub ctor: &'static str,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path: Vec<String> = self.path.iter().map(usize::to_string).collect();
        write!(f, "`{}` at /{}", self.ctor, path.join("/"))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FragmentReport {
    pub violations: Vec<Violation>,
}

impl FragmentReport {
    pub fn accepted(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Lists every operator or action constructor of `s` that `frag` does not enable.
pub fn validate_in_fragment(s: &Sentence, frag: &FragmentConfig) -> FragmentReport {
    let mut report = FragmentReport::default();
    let mut path = Vec::new();
    walk(s, frag, &mut path, &mut report.violations);
    report
}

fn walk(s: &Sentence, frag: &FragmentConfig, path: &mut Vec<usize>, out: &mut Vec<Violation>) {
    let mut flag = |op: Op, path: &Vec<usize>| {
        if !frag.has(op) {
            out.push(Violation { path: path.clone(), ctor: op.name() });
        }
    };
    match s {
        Sentence::Prop(_) | Sentence::Nom(_) => return,
        Sentence::And(xs) => {
            for (i, x) in xs.iter().enumerate() {
                path.push(i);
                walk(x, frag, path, out);
                path.pop();
            }
            return;
        }
        Sentence::Neg(_) => {}
        Sentence::Dia(a, _) => {
            flag(Op::Diamond, path);
            action_walk(a, frag, path, out);
        }
        Sentence::At(..) => flag(Op::At, path),
        Sentence::Store(..) => flag(Op::Store, path),
        Sentence::Exists(..) => flag(Op::Exists, path),
    }
    if let Sentence::Neg(inner)
    | Sentence::Dia(_, inner)
    | Sentence::At(_, inner)
    | Sentence::Store(_, inner)
    | Sentence::Exists(_, inner) = s
    {
        path.push(0);
        walk(inner, frag, path, out);
        path.pop();
    }
}

fn action_walk(a: &Action, frag: &FragmentConfig, path: &[usize], out: &mut Vec<Violation>) {
    let ctor = match a {
        Action::Rel(_) => return,
        Action::Union(..) => Ctor::Union,
        Action::Comp(..) => Ctor::Comp,
        Action::Star(..) => Ctor::Star,
    };
    if !frag.has_ctor(ctor) {
        out.push(Violation { path: path.to_vec(), ctor: ctor.name() });
    }
    match a {
        Action::Union(x, y) | Action::Comp(x, y) => {
            action_walk(x, frag, path, out);
            action_walk(y, frag, path, out);
        }
        Action::Star(x) => action_walk(x, frag, path, out),
        Action::Rel(_) => {}
    }
}

/// Checks that every symbol of `s` is declared in the signature of its scope.
pub fn check_sentence(s: &Sentence, sig: &Signature) -> Result<()> {
    match s {
        Sentence::Prop(p) => match sig.kind_of(p) {
            Some(SymbolKind::Prop) => Ok(()),
            _ => Err(Error::Undeclared { kind: "proposition", name: p.clone() }),
        },
        Sentence::Nom(k) => check_named(k, sig),
        Sentence::And(xs) => xs.iter().try_for_each(|x| check_sentence(x, sig)),
        Sentence::Neg(x) => check_sentence(x, sig),
        Sentence::Dia(a, x) => {
            check_action(a, sig)?;
            check_sentence(x, sig)
        }
        Sentence::At(k, x) => {
            check_named(k, sig)?;
            check_sentence(x, sig)
        }
        Sentence::Store(v, x) | Sentence::Exists(v, x) => check_sentence(x, &sig.with_var(v)?),
    }
}

fn check_named(k: &str, sig: &Signature) -> Result<()> {
    match sig.kind_of(k) {
        Some(SymbolKind::Nominal | SymbolKind::Var) => Ok(()),
        _ => Err(Error::Undeclared { kind: "nominal", name: k.to_string() }),
    }
}

pub fn check_action(a: &Action, sig: &Signature) -> Result<()> {
    let mut rels = Vec::new();
    a.relations(&mut rels);
    match rels.into_iter().find(|r| sig.relation_index(r).is_none()) {
        Some(r) => Err(Error::Undeclared { kind: "relation", name: r }),
        None => Ok(()),
    }
}
