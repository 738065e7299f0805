use std::collections::BTreeSet;

use serde::Serialize;

use crate::checker::basic_agree;
use crate::error::{Error, Result};
use crate::kripke::{bits, KripkeModel, PointedModel};
use crate::syntax::{FragmentConfig, Op};

use super::{action_pair_closure, OmegaArena};

/// `(w̄, w) B_ℓ (v̄, v)` with `ℓ = left_tuple.len() = right_tuple.len()`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BisimEntry {
    pub left_tuple: Vec<usize>,
    pub left: usize,
    pub right_tuple: Vec<usize>,
    pub right: usize,
}

impl BisimEntry {
    pub fn new(left_tuple: Vec<usize>, left: usize, right_tuple: Vec<usize>, right: usize) -> Self {
        BisimEntry { left_tuple, left, right_tuple, right }
    }

    fn with_current(&self, left: usize, right: usize) -> BisimEntry {
        BisimEntry { left, right, ..self.clone() }
    }

    fn appended(&self, a: usize, b: usize) -> BisimEntry {
        let mut e = self.clone();
        e.left_tuple.push(a);
        e.right_tuple.push(b);
        e
    }
}

/// Levels `0..=ℓ_max` of an ω-bisimulation candidate.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LBisimFamily {
    pub levels: Vec<BTreeSet<BisimEntry>>,
}

impl LBisimFamily {
    pub fn with_levels(max_level: usize) -> Self {
        LBisimFamily { levels: vec![BTreeSet::new(); max_level + 1] }
    }

    pub fn max_level(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    pub fn contains(&self, e: &BisimEntry) -> bool {
        self.levels.get(e.left_tuple.len()).is_some_and(|l| l.contains(e))
    }

    pub fn is_empty(&self) -> bool {
        self.levels.iter().all(BTreeSet::is_empty)
    }

    pub fn len(&self) -> usize {
        self.levels.iter().map(BTreeSet::len).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BisimViolation {
    pub clause: &'static str,
    pub entry: BisimEntry,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BisimReport {
    pub violations: Vec<BisimViolation>,
    /// Store and exists clauses were checked on levels below this bound.
    pub extension_bound: usize,
    pub empty: bool,
}

impl BisimReport {
    pub fn valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn clauses(&self) -> BTreeSet<&'static str> {
        self.violations.iter().map(|v| v.clause).collect()
    }
}

/// Checks every enabled clause on every entry; store and exists clauses only
/// for levels below the top one, since the family is truncated there.
pub fn validate_bisim_family(fam: &LBisimFamily, frag: &FragmentConfig, m: &KripkeModel, n: &KripkeModel) -> Result<BisimReport> {
    if m.sig() != n.sig() {
        return Err(Error::Mismatch("models are over different signatures".into()));
    }
    for (l, level) in fam.levels.iter().enumerate() {
        for e in level {
            if e.left_tuple.len() != l || e.right_tuple.len() != l {
                return Err(Error::Precondition(format!("entry at level {l} has tuples of the wrong length")));
            }
            if e.left_tuple.iter().chain([&e.left]).any(|&w| w >= m.len())
                || e.right_tuple.iter().chain([&e.right]).any(|&v| v >= n.len())
            {
                return Err(Error::Precondition(format!("entry at level {l} names a missing state")));
            }
        }
    }
    let closure = if frag.has(Op::Diamond) { action_pair_closure(m, n, frag.ctors())? } else { Vec::new() };
    let top = fam.max_level();
    let mut violations = Vec::new();
    for (l, level) in fam.levels.iter().enumerate() {
        for e in level {
            let mut bad = |clause: &'static str| violations.push(BisimViolation { clause, entry: e.clone() });
            if m.props_at(e.left) != n.props_at(e.right) {
                bad("prop");
            }
            if m.named().iter().zip(n.named()).any(|(&a, &b)| (a == e.left) != (b == e.right)) {
                bad("nom");
            }
            if e.left_tuple.iter().zip(&e.right_tuple).any(|(&a, &b)| (a == e.left) != (b == e.right)) {
                bad("wvar");
            }
            for ap in &closure {
                let (sl, sr) = (ap.left.succ(e.left), ap.right.succ(e.right));
                if !bits(sl).all(|u| bits(sr).any(|v| fam.contains(&e.with_current(u, v)))) {
                    bad("forth");
                }
                if !bits(sr).all(|v| bits(sl).any(|u| fam.contains(&e.with_current(u, v)))) {
                    bad("back");
                }
            }
            if frag.has(Op::At) {
                if !e.left_tuple.iter().zip(&e.right_tuple).all(|(&a, &b)| fam.contains(&e.with_current(a, b))) {
                    bad("atv");
                }
                if !m.named().iter().zip(n.named()).all(|(&a, &b)| fam.contains(&e.with_current(a, b))) {
                    bad("atn");
                }
            }
            if l < top {
                if frag.has(Op::Store) && !fam.contains(&e.appended(e.left, e.right)) {
                    bad("st");
                }
                if frag.has(Op::Exists) {
                    if !(0..m.len()).all(|u| (0..n.len()).any(|v| fam.contains(&e.appended(u, v)))) {
                        bad("ex-f");
                    }
                    if !(0..n.len()).all(|v| (0..m.len()).any(|u| fam.contains(&e.appended(u, v)))) {
                        bad("ex-b");
                    }
                }
            }
        }
    }
    Ok(BisimReport { violations, extension_bound: top, empty: fam.is_empty() })
}

/// Re-expands the safe arena positions into tuples: a length-`ℓ` entry is
/// included when its tuples induce exactly the pair set of a safe position
/// with the same current pair.
pub fn extract_bisim_witness(frag: &FragmentConfig, left: &PointedModel, right: &PointedModel, max_level: usize) -> Result<LBisimFamily> {
    let arena = OmegaArena::solve(frag, left, right)?;
    if !arena.outcome().eloise_wins {
        return Err(Error::Precondition("∀belard wins, so there is no witness".into()));
    }
    let mut fam = LBisimFamily::with_levels(max_level);
    for p in arena.safe_positions() {
        let pairs = p.pair_list(arena.right_len());
        for l in pairs.len()..=max_level {
            if pairs.is_empty() && l > 0 {
                break;
            }
            let mut seq = vec![0usize; l];
            loop {
                let used = seq.iter().fold(0u64, |acc, &i| acc | 1 << i);
                if used.count_ones() as usize == pairs.len() {
                    let (lt, rt) = seq.iter().map(|&i| pairs[i]).unzip();
                    fam.levels[l].insert(BisimEntry::new(lt, p.left, rt, p.right));
                }
                // Odometer over index sequences.
                let Some(k) = (0..l).rev().find(|&k| seq[k] + 1 < pairs.len()) else { break };
                seq[k] += 1;
                seq[k + 1..].iter_mut().for_each(|x| *x = 0);
            }
        }
    }
    Ok(fam)
}

/// Entries of `fam` behind the anchor prefix, with the prefix dropped.
/// The result is over the models expanded by the anchor's first pair.
pub fn shift_family(fam: &LBisimFamily, anchor: &BisimEntry) -> Result<LBisimFamily> {
    if anchor.left_tuple.len() != 1 || !fam.contains(anchor) {
        return Err(Error::Precondition("the anchor is not a level-1 entry of the family".into()));
    }
    let (mu, nu) = (anchor.left_tuple[0], anchor.right_tuple[0]);
    let mut out = LBisimFamily::with_levels(fam.max_level().saturating_sub(1));
    for level in fam.levels.iter().skip(1) {
        for e in level {
            if e.left_tuple[0] == mu && e.right_tuple[0] == nu {
                let shifted = BisimEntry::new(e.left_tuple[1..].to_vec(), e.left, e.right_tuple[1..].to_vec(), e.right);
                out.levels[shifted.left_tuple.len()].insert(shifted);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartialIsoReport {
    pub map: Vec<(usize, usize)>,
    pub functional: bool,
    pub injective: bool,
    pub basic_preserving: bool,
    pub relation_preserving: bool,
}

impl PartialIsoReport {
    pub fn is_partial_isomorphism(&self) -> bool {
        self.functional && self.injective && self.basic_preserving && self.relation_preserving
    }
}

/// The map `w̄(i) ↦ v̄(i)` of an entry, with each partial-isomorphism
/// property checked.
pub fn partial_iso_from_tuple(m: &KripkeModel, n: &KripkeModel, entry: &BisimEntry) -> Result<PartialIsoReport> {
    if entry.left_tuple.len() != entry.right_tuple.len() {
        return Err(Error::Precondition("tuples differ in length".into()));
    }
    let mut map: Vec<(usize, usize)> = entry.left_tuple.iter().copied().zip(entry.right_tuple.iter().copied()).collect();
    map.sort_unstable();
    map.dedup();
    let functional = map.windows(2).all(|w| w[0].0 != w[1].0);
    let mut ranges: Vec<usize> = map.iter().map(|&(_, b)| b).collect();
    ranges.sort_unstable();
    let injective = ranges.windows(2).all(|w| w[0] != w[1]);
    let basic_preserving = map.iter().all(|&(a, b)| basic_agree(m, m.named(), a, n, n.named(), b));
    let relation_preserving = m.relations().iter().zip(n.relations()).all(|(rm, rn)| {
        map.iter().all(|&(a1, b1)| map.iter().all(|&(a2, b2)| rm.contains(a1, a2) == rn.contains(b1, b2)))
    });
    Ok(PartialIsoReport { map, functional, injective, basic_preserving, relation_preserving })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn pm(m: &KripkeModel, w: usize) -> PointedModel {
        PointedModel::new(m.clone(), w).unwrap()
    }

    fn identity_family(m: &KripkeModel, max_level: usize) -> LBisimFamily {
        let mut fam = LBisimFamily::with_levels(max_level);
        for l in 0..=max_level {
            let mut seq = vec![0usize; l];
            loop {
                for w in 0..m.len() {
                    fam.levels[l].insert(BisimEntry::new(seq.clone(), w, seq.clone(), w));
                }
                let Some(k) = (0..l).rev().find(|&k| seq[k] + 1 < m.len()) else { break };
                seq[k] += 1;
                seq[k + 1..].iter_mut().for_each(|x| *x = 0);
            }
        }
        fam
    }

    #[test]
    fn empty_and_identity_families() {
        let m = fixtures::loop_left();
        let report = validate_bisim_family(&LBisimFamily::with_levels(2), &FragmentConfig::full(), &m, &m).unwrap();
        assert!(report.valid() && report.empty);
        let id = identity_family(&m, 2);
        let report = validate_bisim_family(&id, &FragmentConfig::full(), &m, &m).unwrap();
        assert!(report.valid());
        assert_eq!(report.extension_bound, 2);
        let anchor = BisimEntry::new(vec![1], 1, vec![1], 1);
        assert_eq!(shift_family(&id, &anchor).unwrap(), identity_family(&m, 1));
    }

    #[test]
    fn missing_forth_successor_is_reported() {
        let (m, n) = fixtures::pos_pair();
        let mut fam = LBisimFamily::with_levels(0);
        fam.levels[0].insert(BisimEntry::new(vec![], 0, vec![], 0));
        fam.levels[0].insert(BisimEntry::new(vec![], 1, vec![], 1));
        let report = validate_bisim_family(&fam, &FragmentConfig::full(), &m, &n).unwrap();
        assert!(report.clauses().contains("forth"));
        assert!(!report.clauses().contains("back"));
    }

    #[test]
    fn witnesses_validate() {
        let (m, n) = fixtures::pos_pair();
        let ds = FragmentConfig::ops_only([Op::Diamond, Op::Store]);
        let fam = extract_bisim_witness(&ds, &pm(&m, 0), &pm(&n, 0), 3).unwrap();
        assert!(fam.levels[0].contains(&BisimEntry::new(vec![], 0, vec![], 0)));
        assert!(validate_bisim_family(&fam, &ds, &m, &n).unwrap().valid());

        let anchor = BisimEntry::new(vec![0], 1, vec![0], 1);
        assert!(fam.contains(&anchor));
        let shifted = shift_family(&fam, &anchor).unwrap();
        let (mx, _) = m.expand_fresh(0);
        let (nx, _) = n.expand_fresh(0);
        assert!(validate_bisim_family(&shifted, &ds, &mx, &nx).unwrap().valid());
        assert!(shift_family(&fam, &BisimEntry::new(vec![2], 0, vec![0], 0)).is_err());

        let (mb, nb) = fixtures::quant_pair();
        let dse = FragmentConfig::ops_only([Op::Diamond, Op::Store, Op::Exists]);
        let fam = extract_bisim_witness(&dse, &pm(&mb, 0), &pm(&nb, 0), 2).unwrap();
        assert!(validate_bisim_family(&fam, &dse, &mb, &nb).unwrap().valid());
    }

    #[test]
    fn lost_games_have_no_witness() {
        let (m, n) = fixtures::pos_pair();
        assert!(extract_bisim_witness(&FragmentConfig::full(), &pm(&m, 0), &pm(&n, 0), 2).is_err());
    }

    #[test]
    fn partial_isos_from_entries() {
        let m = fixtures::loop_left();
        let r = partial_iso_from_tuple(&m, &m, &BisimEntry::new(vec![0, 1], 0, vec![0, 1], 0)).unwrap();
        assert_eq!(r.map, [(0, 0), (1, 1)]);
        assert!(r.is_partial_isomorphism());
        let r = partial_iso_from_tuple(&m, &m, &BisimEntry::new(vec![], 0, vec![], 0)).unwrap();
        assert!(r.map.is_empty() && r.is_partial_isomorphism());
        let r = partial_iso_from_tuple(&m, &m, &BisimEntry::new(vec![0, 2], 0, vec![0, 1], 0)).unwrap();
        assert!(!r.basic_preserving && !r.relation_preserving);
    }
}
