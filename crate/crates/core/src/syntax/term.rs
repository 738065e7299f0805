use std::fmt;

use serde::{Deserialize, Serialize};

/// Regular expressions over relation symbols.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Action {
    Rel(String),
    Union(Box<Action>, Box<Action>),
    Comp(Box<Action>, Box<Action>),
    Star(Box<Action>),
}

impl Action {
    pub fn rel(name: impl Into<String>) -> Action {
        Action::Rel(name.into())
    }

    pub fn union(a: Action, b: Action) -> Action {
        Action::Union(Box::new(a), Box::new(b))
    }

    pub fn comp(a: Action, b: Action) -> Action {
        Action::Comp(Box::new(a), Box::new(b))
    }

    pub fn star(a: Action) -> Action {
        Action::Star(Box::new(a))
    }

    pub fn relations(&self, out: &mut Vec<String>) {
        match self {
            Action::Rel(r) => {
                if !out.contains(r) {
                    out.push(r.clone());
                }
            }
            Action::Union(a, b) | Action::Comp(a, b) => {
                a.relations(out);
                b.relations(out);
            }
            Action::Star(a) => a.relations(out),
        }
    }
}

/// Sentences with derived forms already expanded.
///
/// Values built through the smart constructors are canonical: conjunctions are
/// flattened, sorted, duplicate-free and never singletons, and negations never stack.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sentence {
    Prop(String),
    /// A nominal or a bound variable.
    Nom(String),
    And(Vec<Sentence>),
    Neg(Box<Sentence>),
    Dia(Action, Box<Sentence>),
    At(String, Box<Sentence>),
    Store(String, Box<Sentence>),
    Exists(String, Box<Sentence>),
}

impl Sentence {
    pub fn tt() -> Sentence {
        Sentence::And(Vec::new())
    }

    pub fn ff() -> Sentence {
        Sentence::neg(Sentence::tt())
    }

    pub fn prop(p: impl Into<String>) -> Sentence {
        Sentence::Prop(p.into())
    }

    pub fn nom(k: impl Into<String>) -> Sentence {
        Sentence::Nom(k.into())
    }

    /// Cancels a double negation.
    #[allow(clippy::should_implement_trait)]
    pub fn neg(s: Sentence) -> Sentence {
        match s {
            Sentence::Neg(inner) => *inner,
            other => Sentence::Neg(Box::new(other)),
        }
    }

    pub fn and(parts: impl IntoIterator<Item = Sentence>) -> Sentence {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                Sentence::And(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        flat.sort();
        flat.dedup();
        if flat.len() == 1 {
            flat.pop().unwrap()
        } else {
            Sentence::And(flat)
        }
    }

    pub fn and2(a: Sentence, b: Sentence) -> Sentence {
        Sentence::and([a, b])
    }

    /// `⋁Φ` as `¬⋀¬Φ`; the empty disjunction is `false`.
    pub fn or(parts: impl IntoIterator<Item = Sentence>) -> Sentence {
        Sentence::neg(Sentence::and(parts.into_iter().map(Sentence::neg)))
    }

    pub fn implies(a: Sentence, b: Sentence) -> Sentence {
        Sentence::neg(Sentence::and2(a, Sentence::neg(b)))
    }

    pub fn dia(a: Action, s: Sentence) -> Sentence {
        Sentence::Dia(a, Box::new(s))
    }

    /// `[a]φ` as `¬⟨a⟩¬φ`.
    pub fn boxed(a: Action, s: Sentence) -> Sentence {
        Sentence::neg(Sentence::dia(a, Sentence::neg(s)))
    }

    pub fn at(k: impl Into<String>, s: Sentence) -> Sentence {
        Sentence::At(k.into(), Box::new(s))
    }

    pub fn store(x: impl Into<String>, s: Sentence) -> Sentence {
        Sentence::Store(x.into(), Box::new(s))
    }

    pub fn exists(x: impl Into<String>, s: Sentence) -> Sentence {
        Sentence::Exists(x.into(), Box::new(s))
    }

    /// `∀xφ` as `¬∃x¬φ`.
    pub fn forall(x: impl Into<String>, s: Sentence) -> Sentence {
        Sentence::neg(Sentence::exists(x, Sentence::neg(s)))
    }

    /// Whether every conjunction and negation below is in smart-constructor form.
    pub fn is_canonical(&self) -> bool {
        match self {
            Sentence::Prop(_) | Sentence::Nom(_) => true,
            Sentence::And(xs) => {
                xs.len() != 1
                    && xs.windows(2).all(|w| w[0] < w[1])
                    && xs.iter().all(|x| !matches!(x, Sentence::And(_)) && x.is_canonical())
            }
            Sentence::Neg(s) => !matches!(**s, Sentence::Neg(_)) && s.is_canonical(),
            Sentence::Dia(_, s)
            | Sentence::At(_, s)
            | Sentence::Store(_, s)
            | Sentence::Exists(_, s) => s.is_canonical(),
        }
    }

    /// Number of constructor nodes, actions excluded.
    pub fn size(&self) -> usize {
        match self {
            Sentence::Prop(_) | Sentence::Nom(_) => 1,
            Sentence::And(xs) => 1 + xs.iter().map(Sentence::size).sum::<usize>(),
            Sentence::Neg(s)
            | Sentence::Dia(_, s)
            | Sentence::At(_, s)
            | Sentence::Store(_, s)
            | Sentence::Exists(_, s) => 1 + s.size(),
        }
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::print_sentence(self))
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::print_action(self))
    }
}
