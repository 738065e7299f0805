use std::collections::HashSet;

use serde::Serialize;

use crate::checker::basic_agree;
use crate::error::{Error, Result};
use crate::kripke::{bits, KripkeModel, PointedModel};
use crate::syntax::{FragmentConfig, Op};

use super::action_pair_closure;

/// An injective partial map `M ⇀ N` preserving basic sentences, stored as
/// `map[w] = Some(h(w))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BasicPartialIso {
    pub map: Vec<Option<usize>>,
}

impl BasicPartialIso {
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.map.iter().enumerate().filter_map(|(w, v)| v.map(|v| (w, v)))
    }

    pub fn len(&self) -> usize {
        self.map.iter().flatten().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn with(&self, w: usize, v: usize) -> BasicPartialIso {
        let mut map = self.map.clone();
        map[w] = Some(v);
        BasicPartialIso { map }
    }

    fn range_has(&self, v: usize) -> bool {
        self.map.contains(&Some(v))
    }

    fn preimage(&self, v: usize) -> Option<usize> {
        self.map.iter().position(|&x| x == Some(v))
    }
}

/// The union of all back-and-forth systems; possibly empty.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BackAndForthSystem {
    pub maps: Vec<BasicPartialIso>,
}

impl BackAndForthSystem {
    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// Some member sends `w` to `v`.
    pub fn relates(&self, w: usize, v: usize) -> bool {
        self.maps.iter().any(|h| h.map[w] == Some(v))
    }
}

fn all_basic_partial_isos(m: &KripkeModel, n: &KripkeModel) -> Vec<BasicPartialIso> {
    let ok: Vec<u64> = (0..m.len())
        .map(|w| (0..n.len()).filter(|&v| basic_agree(m, m.named(), w, n, n.named(), v)).fold(0u64, |acc, v| acc | 1 << v))
        .collect();
    let mut out = Vec::new();
    let mut map = vec![None; m.len()];
    fn go(w: usize, used: u64, ok: &[u64], map: &mut Vec<Option<usize>>, out: &mut Vec<BasicPartialIso>) {
        if w == ok.len() {
            out.push(BasicPartialIso { map: map.clone() });
            return;
        }
        map[w] = None;
        go(w + 1, used, ok, map, out);
        for v in bits(ok[w] & !used) {
            map[w] = Some(v);
            go(w + 1, used | 1 << v, ok, map, out);
        }
        map[w] = None;
    }
    go(0, 0, &ok, &mut map, &mut out);
    out
}

/// Greatest family of basic partial isomorphisms closed under the enabled
/// extension clauses, diamonds ranging over the action-pair closure.
///
/// The greatest family is closed under restriction, so every clause is
/// checked against one-point extensions only.
pub fn max_back_and_forth(frag: &FragmentConfig, m: &KripkeModel, n: &KripkeModel) -> Result<BackAndForthSystem> {
    if m.sig() != n.sig() {
        return Err(Error::Mismatch("models are over different signatures".into()));
    }
    let closure = if frag.has(Op::Diamond) { action_pair_closure(m, n, frag.ctors())? } else { Vec::new() };
    let mut alive: HashSet<BasicPartialIso> = all_basic_partial_isos(m, n).into_iter().collect();
    loop {
        let has = |h: &BasicPartialIso, w: usize, v: usize, alive: &HashSet<BasicPartialIso>| match h.map[w] {
            Some(x) => x == v,
            None => !h.range_has(v) && alive.contains(&h.with(w, v)),
        };
        let doomed: Vec<BasicPartialIso> = alive
            .iter()
            .filter(|h| {
                let at_ok = !frag.has(Op::At)
                    || m.named().iter().all(|&k| (0..n.len()).any(|v| has(h, k, v, &alive)));
                let dia_ok = closure.iter().all(|ap| {
                    h.pairs().all(|(w1, v1)| {
                        bits(ap.left.succ(w1)).all(|w2| bits(ap.right.succ(v1)).any(|v2| has(h, w2, v2, &alive)))
                            && bits(ap.right.succ(v1)).all(|v2| match h.preimage(v2) {
                                Some(w2) => ap.left.contains(w1, w2),
                                None => bits(ap.left.succ(w1)).any(|w2| has(h, w2, v2, &alive)),
                            })
                    })
                });
                let ex_ok = !frag.has(Op::Exists)
                    || ((0..m.len()).all(|w| (0..n.len()).any(|v| has(h, w, v, &alive)))
                        && (0..n.len()).all(|v| match h.preimage(v) {
                            Some(_) => true,
                            None => (0..m.len()).any(|w| has(h, w, v, &alive)),
                        }));
                !(at_ok && dia_ok && ex_ok)
            })
            .cloned()
            .collect();
        if doomed.is_empty() {
            break;
        }
        for h in doomed {
            alive.remove(&h);
        }
    }
    let mut maps: Vec<BasicPartialIso> = alive.into_iter().collect();
    maps.sort();
    Ok(BackAndForthSystem { maps })
}

/// Whether some back-and-forth system maps the left point to the right one.
pub fn bf_related(frag: &FragmentConfig, left: &PointedModel, right: &PointedModel) -> Result<bool> {
    Ok(max_back_and_forth(frag, &left.model, &right.model)?.relates(left.current, right.current))
}
