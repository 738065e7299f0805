use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gameboard::{child_signature, EdgeLabel, GameboardTree};
use crate::syntax::{check_sentence, validate_in_fragment, FragmentConfig, Sentence, Signature};

use super::{enumerate_game_sentences, Component, GameSentence, GameStore, GsId};

/// A decidable subset of the game sentences over a normal-form tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    /// Every sentence of a leaf tree.
    All,
    /// Leaf sentences giving the basic sentence at this index a positive sign.
    Sign(usize),
    Not(Box<Membership>),
    /// Node with one idle child per conjunct; each child must belong.
    Each(Vec<Membership>),
    /// Node with one diamond or exists child; some member of the set belongs.
    Some(Box<Membership>),
    /// Node with one at or store child; that child belongs.
    Then(Box<Membership>),
}

impl Membership {
    /// `id` must be a game sentence over the tree this predicate was built with.
    pub fn contains(&self, store: &GameStore, id: GsId) -> bool {
        match (self, store.get(id)) {
            (Membership::All, _) => true,
            (Membership::Sign(i), GameSentence::Leaf(signs)) => signs[*i],
            (Membership::Not(m), _) => !m.contains(store, id),
            (Membership::Each(ms), GameSentence::Node(comps)) => {
                ms.iter().zip(comps).all(|(m, c)| matches!(c, Component::Single(g) if m.contains(store, *g)))
            }
            (Membership::Some(m), GameSentence::Node(comps)) => {
                matches!(&comps[0], Component::Set(ids) if ids.iter().any(|&g| m.contains(store, g)))
            }
            (Membership::Then(m), GameSentence::Node(comps)) => {
                matches!(&comps[0], Component::Single(g) if m.contains(store, *g))
            }
            _ => panic!("game sentence does not match the normal-form tree"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct NormalForm {
    pub tree: GameboardTree,
    pub membership: Membership,
}

impl NormalForm {
    /// The member set itself, for trees small enough to enumerate.
    pub fn enumerate(&self, store: &mut GameStore, size_cap: u128) -> Result<Vec<GsId>> {
        let all = enumerate_game_sentences(store, &self.tree, size_cap)?;
        Ok(all.into_iter().filter(|&g| self.membership.contains(store, g)).collect())
    }
}

/// A tree and a member set whose disjunction is equivalent to `s`.
///
/// Binders are renamed to the fresh variables of the tree signatures.
pub fn normal_form(s: &Sentence, sig: &Signature, frag: &FragmentConfig) -> Result<NormalForm> {
    if let Some(v) = validate_in_fragment(s, frag).violations.first() {
        return Err(Error::Fragment { ctor: v.ctor });
    }
    check_sentence(s, sig)?;
    let mut renames = Vec::new();
    let (tree, membership) = build(s, sig, &mut renames);
    Ok(NormalForm { tree, membership })
}

fn build(s: &Sentence, sig: &Signature, renames: &mut Vec<(String, String)>) -> (GameboardTree, Membership) {
    let name = |k: &str, renames: &[(String, String)]| {
        renames.iter().rev().find(|(user, _)| user == k).map(|(_, v)| v.clone()).unwrap_or_else(|| k.to_string())
    };
    let single = |label: EdgeLabel, child: GameboardTree| GameboardTree::node(sig.clone(), vec![(label, Arc::new(child))]);
    match s {
        Sentence::Prop(p) => {
            let i = sig.named_count() + sig.prop_index(p).expect("checked sentence");
            (GameboardTree::leaf(sig.clone()), Membership::Sign(i))
        }
        Sentence::Nom(k) => {
            let i = sig.named_index(&name(k, renames)).expect("checked sentence");
            (GameboardTree::leaf(sig.clone()), Membership::Sign(i))
        }
        Sentence::Neg(x) => {
            let (t, m) = build(x, sig, renames);
            (t, Membership::Not(Box::new(m)))
        }
        Sentence::And(xs) if xs.is_empty() => (GameboardTree::leaf(sig.clone()), Membership::All),
        Sentence::And(xs) => {
            let mut children = Vec::with_capacity(xs.len());
            let mut ms = Vec::with_capacity(xs.len());
            for (i, x) in xs.iter().enumerate() {
                let (t, m) = build(x, sig, renames);
                children.push((EdgeLabel::Idle(i as u32), Arc::new(t)));
                ms.push(m);
            }
            (GameboardTree::node(sig.clone(), children), Membership::Each(ms))
        }
        Sentence::Dia(a, x) => {
            let (t, m) = build(x, sig, renames);
            (single(EdgeLabel::Dia(a.clone()), t), Membership::Some(Box::new(m)))
        }
        Sentence::At(k, x) => {
            let (t, m) = build(x, sig, renames);
            (single(EdgeLabel::At(name(k, renames)), t), Membership::Then(Box::new(m)))
        }
        Sentence::Store(y, x) | Sentence::Exists(y, x) => {
            let label = if matches!(s, Sentence::Store(..)) { EdgeLabel::Store } else { EdgeLabel::Exists };
            let inner = child_signature(sig, &label);
            let fresh = inner.bound_vars().last().expect("binding edge adds a variable").clone();
            renames.push((y.clone(), fresh));
            let (t, m) = build(x, &inner, renames);
            renames.pop();
            let m = Box::new(m);
            (single(label.clone(), t), if label == EdgeLabel::Store { Membership::Then(m) } else { Membership::Some(m) })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::satisfies;
    use crate::fixtures;
    use crate::gameboard::{print_tree, validate_tree};
    use crate::games::char_formula;
    use crate::kripke::PointedModel;
    use crate::syntax::{parse_sentence, Op};

    fn agrees_everywhere(text: &str, models: &[crate::kripke::KripkeModel]) {
        let sig = models[0].sig().clone();
        let s = parse_sentence(text, &sig, &FragmentConfig::full()).unwrap();
        let nf = normal_form(&s, &sig, &FragmentConfig::full()).unwrap();
        assert!(validate_tree(&nf.tree, &FragmentConfig::full()).valid(), "{text}");
        let mut store = GameStore::new();
        for m in models {
            for w in 0..m.len() {
                let pm = PointedModel::new(m.clone(), w).unwrap();
                let c = char_formula(&mut store, &nf.tree, &pm).unwrap();
                assert_eq!(satisfies(&pm, &s).unwrap(), nf.membership.contains(&store, c), "{text} at {w}");
            }
        }
    }

    #[test]
    fn basic_and_modal_cases() {
        let sig = fixtures::loop_signature();
        let nf = normal_form(&Sentence::prop("p"), &sig, &FragmentConfig::full()).unwrap();
        assert!(nf.tree.is_leaf());
        let mut store = GameStore::new();
        assert_eq!(nf.enumerate(&mut store, 16).unwrap().len(), 1);
        let s = parse_sentence("<l>p", &sig, &FragmentConfig::full()).unwrap();
        let nf = normal_form(&s, &sig, &FragmentConfig::full()).unwrap();
        assert_eq!(print_tree(&nf.tree), "(dia l leaf)");
        // Subsets of {p, ~p} meeting {p}.
        assert_eq!(nf.enumerate(&mut store, 16).unwrap().len(), 2);
        let s = parse_sentence("~p & <l>p", &sig, &FragmentConfig::full()).unwrap();
        let nf = normal_form(&s, &sig, &FragmentConfig::full()).unwrap();
        assert_eq!(nf.tree.children().len(), 2);
        assert!(nf.tree.children().iter().all(|(lb, _)| matches!(lb, EdgeLabel::Idle(_))));
    }

    #[test]
    fn fixture_sentences_agree_with_satisfaction() {
        let (m, n) = fixtures::pos_pair();
        let models = [m, n, fixtures::loop_left()];
        for text in ["p", "~p & <l>p", "down x . <l><l>x", "exists y . (@y p & ~y)", "forall z . <l*>z", "true", "false"] {
            agrees_everywhere(text, &models);
        }
    }

    #[test]
    fn finite_order_sentence() {
        let s = fixtures::finite_order_sentence();
        let sig = fixtures::order_signature();
        let nf = normal_form(&s, &sig, &FragmentConfig::full()).unwrap();
        let mut store = GameStore::new();
        for (m, expected) in [(fixtures::nominated_chain(3), true), (fixtures::two_cycle(), false)] {
            let pm = PointedModel::new(m, 0).unwrap();
            let c = char_formula(&mut store, &nf.tree, &pm).unwrap();
            assert_eq!(nf.membership.contains(&store, c), expected);
        }
    }

    #[test]
    fn fragment_is_enforced() {
        let sig = fixtures::loop_signature();
        let s = parse_sentence("down x . x", &sig, &FragmentConfig::full()).unwrap();
        let err = normal_form(&s, &sig, &FragmentConfig::ops_only([Op::Diamond])).unwrap_err();
        assert!(matches!(err, Error::Fragment { ctor: "store" }));
    }
}
