//! Local satisfaction and agreement on basic sentences.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::kripke::{KripkeModel, PointedModel, Relation};
use crate::syntax::{check_sentence, Action, Sentence};

/// Evaluates sentences on one model, caching action denotations.
pub struct Evaluator<'m> {
    model: &'m KripkeModel,
    binders: Vec<(String, usize)>,
    actions: HashMap<Action, Relation>,
}

impl<'m> Evaluator<'m> {
    pub fn new(model: &'m KripkeModel) -> Self {
        Evaluator { model, binders: Vec::new(), actions: HashMap::new() }
    }

    /// `s` must already be well formed over the model's signature.
    pub fn eval(&mut self, s: &Sentence, w: usize) -> bool {
        match s {
            Sentence::Prop(p) => {
                let i = self.model.sig().prop_index(p).expect("checked sentence");
                self.model.props_at(w) & (1 << i) != 0
            }
            Sentence::Nom(k) => self.denote(k) == w,
            Sentence::And(xs) => xs.iter().all(|x| self.eval(x, w)),
            Sentence::Neg(x) => !self.eval(x, w),
            Sentence::Dia(a, x) => {
                let succ = self.relation(a).succ(w);
                crate::kripke::bits(succ).any(|u| self.eval(x, u))
            }
            Sentence::At(k, x) => {
                let u = self.denote(k);
                self.eval(x, u)
            }
            Sentence::Store(v, x) => self.bound(v, w, |ev| ev.eval(x, w)),
            Sentence::Exists(v, x) => (0..self.model.len()).any(|u| self.bound(v, u, |ev| ev.eval(x, w))),
        }
    }

    fn bound<T>(&mut self, var: &str, u: usize, f: impl FnOnce(&mut Self) -> T) -> T {
        self.binders.push((var.to_string(), u));
        let out = f(self);
        self.binders.pop();
        out
    }

    fn denote(&self, k: &str) -> usize {
        self.binders
            .iter()
            .rev()
            .find(|(v, _)| v == k)
            .map(|&(_, u)| u)
            .or_else(|| self.model.denotation(k))
            .expect("checked sentence")
    }

    fn relation(&mut self, a: &Action) -> &Relation {
        if !self.actions.contains_key(a) {
            let r = self.model.interpret_action(a).expect("checked sentence");
            self.actions.insert(a.clone(), r);
        }
        &self.actions[a]
    }
}

/// `(M,w) ⊨ s`.
pub fn satisfies(pm: &PointedModel, s: &Sentence) -> Result<bool> {
    check_sentence(s, pm.model.sig())?;
    Ok(Evaluator::new(&pm.model).eval(s, pm.current))
}

/// Signs of all basic sentences at `w`: named states first, then props.
/// `named` interprets the names of the node signature.
pub fn basic_signs(m: &KripkeModel, named: &[usize], w: usize) -> Vec<bool> {
    named
        .iter()
        .map(|&k| k == w)
        .chain((0..m.sig().props().len()).map(|i| m.props_at(w) & (1 << i) != 0))
        .collect()
}

/// Agreement on props and on every name equation at the two current states.
pub fn basic_agree(m: &KripkeModel, named_m: &[usize], w: usize, n: &KripkeModel, named_n: &[usize], v: usize) -> bool {
    m.props_at(w) == n.props_at(v) && named_m.iter().zip(named_n).all(|(&a, &b)| (a == w) == (b == v))
}

/// The game property: both pointed models satisfy the same basic sentences.
pub fn game_property(left: &PointedModel, right: &PointedModel) -> Result<bool> {
    if left.model.sig() != right.model.sig() {
        return Err(Error::Mismatch("pointed models are over different signatures".into()));
    }
    Ok(basic_agree(&left.model, left.model.named(), left.current, &right.model, right.model.named(), right.current))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::syntax::{parse_sentence, FragmentConfig};

    fn check(m: &KripkeModel, w: &str, text: &str) -> bool {
        let s = parse_sentence(text, m.sig(), &FragmentConfig::full()).unwrap();
        satisfies(&PointedModel::at(m.clone(), w).unwrap(), &s).unwrap()
    }

    #[test]
    fn loop_model_sees_p_two_steps_ahead() {
        assert!(check(&fixtures::loop_left(), "0", "<l><l>p"));
        assert!(!check(&fixtures::loop_left(), "a", "<l>true"));
        assert!(check(&fixtures::loop_left(), "a", "true"));
    }

    #[test]
    fn binders_and_retrieval() {
        let m = fixtures::loop_left();
        assert!(check(&m, "0", "down x . <l><l>x"));
        assert!(!check(&m, "a", "down x . <l*>(~x & p)"));
        assert!(check(&m, "0", "exists y . @y p"));
        assert!(!check(&m, "0", "forall y . @y p"));
    }

    #[test]
    fn finite_order_sentence_on_oracle_fixtures() {
        let phi = fixtures::finite_order_sentence();
        for n in 2..=6 {
            let pm = PointedModel::new(fixtures::nominated_chain(n), 0).unwrap();
            assert!(satisfies(&pm, &phi).unwrap(), "chain of length {n}");
        }
        assert!(!satisfies(&PointedModel::new(fixtures::two_cycle(), 0).unwrap(), &phi).unwrap());
        for k1 in 0..4 {
            for k2 in 0..4 {
                let pm = PointedModel::new(fixtures::loop_frame_with_nominals(k1, k2), 0).unwrap();
                assert!(!satisfies(&pm, &phi).unwrap());
            }
        }
    }

    #[test]
    fn game_property_examples() {
        let (ma, na) = fixtures::pos_pair();
        let at = |m: &KripkeModel, w: &str| PointedModel::at(m.clone(), w).unwrap();
        assert!(game_property(&at(&ma, "1"), &at(&na, "1")).unwrap());
        assert!(!game_property(&at(&ma, "0"), &at(&na, "1")).unwrap());
        assert!(game_property(&at(&ma, "2"), &at(&ma, "2")).unwrap());
        let (mb, _) = fixtures::quant_pair();
        assert!(game_property(&at(&ma, "0"), &at(&mb, "0")).is_err());
    }

    #[test]
    fn undeclared_symbols_error() {
        let pm = PointedModel::new(fixtures::loop_left(), 0).unwrap();
        assert!(satisfies(&pm, &Sentence::prop("q")).is_err());
    }
}
