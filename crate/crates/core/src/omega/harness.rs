use serde::Serialize;

use crate::error::{Error, Result};
use crate::gameboard::complete_tree;
use crate::games::{char_formula, GameStore};
use crate::kripke::{find_isomorphism, is_rooted, PointedModel};
use crate::syntax::{FragmentConfig, Op};

use super::{action_pair_closure, bf_related, OmegaArena};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HmReport {
    /// Characteristic sentences agree on complete trees of heights `1..=heights_checked`.
    pub char_agree: bool,
    /// The arena's stabilization count; heights beyond it cannot change verdicts.
    pub stabilization: usize,
    pub heights_checked: usize,
    pub omega_wins: bool,
    pub bf_related: bool,
    /// Store is enabled, and at is enabled whenever diamond or exists is.
    pub bf_hypotheses: bool,
}

impl HmReport {
    pub fn all_agree(&self) -> bool {
        self.char_agree == self.omega_wins && self.omega_wins == self.bf_related
    }

    /// Every implication between the three verdicts that holds for this fragment is met.
    pub fn as_predicted(&self) -> bool {
        self.char_agree == self.omega_wins && (!self.bf_hypotheses || self.omega_wins == self.bf_related)
    }
}

/// Three equivalences side by side for a quantifier-free fragment:
/// characteristic-sentence agreement (the elementary-equivalence proxy), the
/// countable game, and back-and-forth relatedness.
///
/// Complete trees use one representative action per closure pair. Heights
/// are capped at `max_height`; the report says how far it got.
pub fn hennessy_milner_check(frag: &FragmentConfig, left: &PointedModel, right: &PointedModel, max_height: usize) -> Result<HmReport> {
    if frag.has(Op::Exists) {
        return Err(Error::Precondition("the Hennessy-Milner check needs a fragment without exists".into()));
    }
    let omega = OmegaArena::solve(frag, left, right)?.outcome();
    let actions: Vec<_> = action_pair_closure(&left.model, &right.model, frag.ctors())?.into_iter().map(|p| p.action).collect();
    let heights = omega.iterations.min(max_height);
    let mut store = GameStore::new();
    let mut char_agree = true;
    for h in 1..=heights {
        let tr = complete_tree(left.model.sig(), frag, h, &actions)?;
        if char_formula(&mut store, &tr, left)? != char_formula(&mut store, &tr, right)? {
            char_agree = false;
            break;
        }
    }
    let bf_hypotheses = frag.has(Op::Store) && (frag.has(Op::At) || !frag.has(Op::Diamond));
    Ok(HmReport {
        char_agree,
        stabilization: omega.iterations,
        heights_checked: heights,
        omega_wins: omega.eloise_wins,
        bf_related: bf_related(frag, left, right)?,
        bf_hypotheses,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootedIsoReport {
    pub isomorphic: bool,
    pub omega_wins: bool,
}

impl RootedIsoReport {
    pub fn agree(&self) -> bool {
        self.isomorphic == self.omega_wins
    }
}

/// Compares isomorphism with the countable game on rooted models.
pub fn rooted_iso_check(frag: &FragmentConfig, left: &PointedModel, right: &PointedModel) -> Result<RootedIsoReport> {
    if ![Op::Diamond, Op::At, Op::Store].iter().all(|&op| frag.has(op)) {
        return Err(Error::Precondition("the rooted check needs diamond, at and store".into()));
    }
    if !is_rooted(left) || !is_rooted(right) {
        return Err(Error::Precondition("both pointed models must be rooted".into()));
    }
    Ok(RootedIsoReport {
        isomorphic: find_isomorphism(left, right).is_some(),
        omega_wins: OmegaArena::solve(frag, left, right)?.outcome().eloise_wins,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::kripke::{permute_states, KripkeModel};

    fn pm(m: &KripkeModel, w: usize) -> PointedModel {
        PointedModel::new(m.clone(), w).unwrap()
    }

    #[test]
    fn hm_on_fixtures() {
        let ds = FragmentConfig::ops_only([Op::Diamond, Op::Store]);
        let m = fixtures::loop_left();
        let same = hennessy_milner_check(&ds, &pm(&m, 0), &pm(&m, 0), 6).unwrap();
        assert!(same.all_agree() && same.omega_wins);

        let r = fixtures::loop_right(4);
        let loop_report = hennessy_milner_check(&ds, &pm(&m, 0), &pm(&r, 0), 6).unwrap();
        assert!(loop_report.all_agree() && !loop_report.omega_wins && !loop_report.char_agree);

        let (a, b) = fixtures::pos_pair();
        let pos = hennessy_milner_check(&ds, &pm(&a, 0), &pm(&b, 0), 6).unwrap();
        assert!(pos.char_agree && pos.omega_wins && !pos.bf_related);
        assert!(!pos.bf_hypotheses && pos.as_predicted() && !pos.all_agree());

        assert!(hennessy_milner_check(&FragmentConfig::full(), &pm(&a, 0), &pm(&b, 0), 6).is_err());
    }

    #[test]
    fn rooted_on_fixtures() {
        let full = FragmentConfig::ops_only([Op::Diamond, Op::At, Op::Store]);
        let (a, b) = fixtures::pos_pair();
        let r = rooted_iso_check(&full, &pm(&a, 0), &pm(&b, 0)).unwrap();
        assert!(!r.isomorphic && !r.omega_wins);
        let copy = permute_states(&a, &[2, 0, 1]);
        let r = rooted_iso_check(&full, &pm(&a, 0), &pm(&copy, 2)).unwrap();
        assert!(r.isomorphic && r.omega_wins);
        assert!(rooted_iso_check(&full, &pm(&a, 1), &pm(&b, 1)).is_err());
    }
}
