//! Finite Kripke structures over a signature.
//!
//! States are indices into an ordered name table. Relations are dense bit
//! matrices, so a model holds at most 64 states and 64 propositions.

use std::collections::{BTreeMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::syntax::{Action, Signature};

pub const MAX_STATES: usize = 64;

/// Iterates the indices of set bits in ascending order.
pub fn bits(mut set: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if set == 0 {
            None
        } else {
            let i = set.trailing_zeros() as usize;
            set &= set - 1;
            Some(i)
        }
    })
}

/// A binary relation on `0..n`; row `a` holds the successors of `a`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    n: usize,
    rows: Vec<u64>,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        Relation { n, rows: vec![0; n] }
    }

    pub fn identity(n: usize) -> Self {
        Relation { n, rows: (0..n).map(|i| 1u64 << i).collect() }
    }

    pub fn full(n: usize) -> Self {
        let row = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        Relation { n, rows: vec![row; n] }
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut r = Relation::empty(n);
        for (a, b) in pairs {
            r.insert(a, b);
        }
        r
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, a: usize, b: usize) {
        self.rows[a] |= 1 << b;
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.rows[a] & (1 << b) != 0
    }

    /// Successor set of `a` as a bit mask.
    pub fn succ(&self, a: usize) -> u64 {
        self.rows[a]
    }

    pub fn successors(&self, a: usize) -> impl Iterator<Item = usize> {
        bits(self.rows[a])
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows.iter().enumerate().flat_map(|(a, &row)| bits(row).map(move |b| (a, b)))
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    pub fn union(&self, other: &Relation) -> Relation {
        Relation { n: self.n, rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a | b).collect() }
    }

    /// Diagrammatic composition: `a (self;other) c` iff `a self b` and `b other c` for some `b`.
    pub fn compose(&self, other: &Relation) -> Relation {
        let rows = self.rows.iter().map(|&row| bits(row).fold(0, |acc, b| acc | other.rows[b])).collect();
        Relation { n: self.n, rows }
    }

    /// Reflexive-transitive closure by iterated squaring.
    pub fn star(&self) -> Relation {
        let mut r = self.union(&Relation::identity(self.n));
        loop {
            let sq = r.compose(&r);
            if sq == r {
                return r;
            }
            r = sq;
        }
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.rows.iter().zip(&other.rows).all(|(a, b)| a & !b == 0)
    }

    pub fn inverse(&self) -> Relation {
        Relation::from_pairs(self.n, self.pairs().map(|(a, b)| (b, a)))
    }
}

/// A finite structure for a signature. `named[i]` interprets the i-th entry of
/// `sig.named()`, so bound variables are interpreted like nominals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KripkeModel {
    sig: Signature,
    states: Vec<String>,
    named: Vec<usize>,
    relations: Vec<Relation>,
    valuation: Vec<u64>,
}

impl KripkeModel {
    /// `relations[r]` and `valuation[w]` (a prop bit mask) follow the signature's order.
    pub fn new(
        sig: Signature,
        states: Vec<String>,
        named: Vec<usize>,
        relations: Vec<Relation>,
        valuation: Vec<u64>,
    ) -> Result<Self> {
        let n = states.len();
        if n == 0 {
            return Err(Error::Model("a model needs at least one state".into()));
        }
        if n > MAX_STATES || sig.props().len() > 64 {
            return Err(Error::Model(format!("at most {MAX_STATES} states and 64 propositions are supported")));
        }
        for (i, s) in states.iter().enumerate() {
            if states[..i].contains(s) {
                return Err(Error::Model(format!("state `{s}` listed twice")));
            }
        }
        if named.len() != sig.named_count() || named.iter().any(|&w| w >= n) {
            return Err(Error::Model("every nominal and variable must denote a state".into()));
        }
        if relations.len() != sig.relations().len() || relations.iter().any(|r| r.size() != n) {
            return Err(Error::Model("one relation over the state set is needed per relation symbol".into()));
        }
        let prop_mask = if sig.props().len() == 64 { u64::MAX } else { (1u64 << sig.props().len()) - 1 };
        if valuation.len() != n || valuation.iter().any(|v| v & !prop_mask != 0) {
            return Err(Error::Model("valuation must list declared propositions per state".into()));
        }
        Ok(KripkeModel { sig, states, named, relations, valuation })
    }

    /// Builds a model from names; unlisted props are false everywhere.
    pub fn from_names(
        sig: Signature,
        states: &[&str],
        named: &[(&str, &str)],
        relations: &[(&str, &[(&str, &str)])],
        props: &[(&str, &[&str])],
    ) -> Result<Self> {
        let file = ModelFile {
            states: states.iter().map(|s| s.to_string()).collect(),
            nominals: named.iter().map(|(k, w)| (k.to_string(), w.to_string())).collect(),
            relations: relations
                .iter()
                .map(|(r, ps)| (r.to_string(), ps.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()))
                .collect(),
            props: props.iter().map(|(p, ws)| (p.to_string(), ws.iter().map(|w| w.to_string()).collect())).collect(),
        };
        file.into_model_with(sig)
    }

    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, w: usize) -> &str {
        &self.states[w]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    /// Interpretations of `sig.named()`, nominals first.
    pub fn named(&self) -> &[usize] {
        &self.named
    }

    pub fn denotation(&self, name: &str) -> Option<usize> {
        self.sig.named_index(name).map(|i| self.named[i])
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.sig.relation_index(name).map(|i| &self.relations[i])
    }

    /// Propositions true at `w` as a bit mask over `sig.props()`.
    pub fn props_at(&self, w: usize) -> u64 {
        self.valuation[w]
    }

    pub fn valuation(&self) -> &[u64] {
        &self.valuation
    }

    pub fn interpret_action(&self, a: &Action) -> Result<Relation> {
        Ok(match a {
            Action::Rel(r) => {
                self.relation(r).cloned().ok_or_else(|| Error::Undeclared { kind: "relation", name: r.clone() })?
            }
            Action::Union(x, y) => self.interpret_action(x)?.union(&self.interpret_action(y)?),
            Action::Comp(x, y) => self.interpret_action(x)?.compose(&self.interpret_action(y)?),
            Action::Star(x) => self.interpret_action(x)?.star(),
        })
    }

    /// `M[x←w]`: the expansion interpreting the new variable `x` as `w`.
    pub fn expand(&self, x: &str, w: usize) -> Result<KripkeModel> {
        if w >= self.len() {
            return Err(Error::Model(format!("state index {w} out of range")));
        }
        let sig = self.sig.with_var(x)?;
        let mut named = self.named.clone();
        named.push(w);
        Ok(KripkeModel { sig, named, ..self.clone() })
    }

    /// Expansion by the signature's next fresh variable.
    pub fn expand_fresh(&self, w: usize) -> (KripkeModel, String) {
        let x = self.sig.fresh_var();
        let m = self.expand(&x, w).expect("fresh variable cannot collide");
        (m, x)
    }

    /// Forgets the most recent variable.
    pub fn reduct(&self) -> Option<KripkeModel> {
        let sig = self.sig.reduct()?;
        let mut named = self.named.clone();
        named.pop();
        Some(KripkeModel { sig, named, ..self.clone() })
    }

    /// Forgets every variable.
    pub fn base(&self) -> KripkeModel {
        let k = self.sig.nominals().len();
        KripkeModel { sig: self.sig.base(), named: self.named[..k].to_vec(), ..self.clone() }
    }

    /// Union of all relations.
    pub fn any_relation(&self) -> Relation {
        self.relations.iter().fold(Relation::empty(self.len()), |acc, r| acc.union(r))
    }

    pub fn to_file(&self) -> ModelFile {
        let name = |w: usize| self.states[w].clone();
        ModelFile {
            states: self.states.clone(),
            nominals: self.sig.named().zip(&self.named).map(|(k, &w)| (k.to_string(), name(w))).collect(),
            relations: self
                .sig
                .relations()
                .iter()
                .zip(&self.relations)
                .map(|(r, rel)| (r.clone(), rel.pairs().map(|(a, b)| (name(a), name(b))).collect()))
                .collect(),
            props: self
                .sig
                .props()
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    (p.clone(), (0..self.len()).filter(|&w| self.valuation[w] & (1 << i) != 0).map(name).collect())
                })
                .collect(),
        }
    }
}

/// The JSON model format. The signature is read off the keys.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelFile {
    pub states: Vec<String>,
    #[serde(default)]
    pub nominals: BTreeMap<String, String>,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<(String, String)>>,
    #[serde(default)]
    pub props: BTreeMap<String, Vec<String>>,
}

impl ModelFile {
    pub fn signature(&self) -> Result<Signature> {
        Signature::new(
            self.nominals.keys().cloned(),
            self.relations.keys().cloned(),
            self.props.keys().cloned(),
        )
    }

    pub fn into_model(self) -> Result<KripkeModel> {
        let sig = self.signature()?;
        self.into_model_with(sig)
    }

    /// Reads the model against a given signature; symbols it omits are empty.
    pub fn into_model_with(self, sig: Signature) -> Result<KripkeModel> {
        let index = |s: &str| {
            self.states.iter().position(|x| x == s).ok_or_else(|| Error::Model(format!("unknown state `{s}`")))
        };
        for k in self.nominals.keys().chain(self.relations.keys()).chain(self.props.keys()) {
            if !sig.declares(k) {
                return Err(Error::Undeclared { kind: "symbol", name: k.clone() });
            }
        }
        let mut named = Vec::new();
        for k in sig.named() {
            let w = self.nominals.get(k).ok_or_else(|| Error::Model(format!("`{k}` has no denotation")))?;
            named.push(index(w)?);
        }
        let n = self.states.len();
        let mut relations = Vec::new();
        for r in sig.relations() {
            let mut rel = Relation::empty(n);
            for (a, b) in self.relations.get(r).map(Vec::as_slice).unwrap_or(&[]) {
                rel.insert(index(a)?, index(b)?);
            }
            relations.push(rel);
        }
        let mut valuation = vec![0u64; n];
        for (i, p) in sig.props().iter().enumerate() {
            for w in self.props.get(p).map(Vec::as_slice).unwrap_or(&[]) {
                valuation[index(w)?] |= 1 << i;
            }
        }
        KripkeModel::new(sig, self.states, named, relations, valuation)
    }
}

/// A model with a designated current state.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PointedModel {
    pub model: KripkeModel,
    pub current: usize,
}

impl PointedModel {
    pub fn new(model: KripkeModel, current: usize) -> Result<Self> {
        if current >= model.len() {
            return Err(Error::Model(format!("state index {current} out of range")));
        }
        Ok(PointedModel { model, current })
    }

    pub fn at(model: KripkeModel, state: &str) -> Result<Self> {
        let w = model.state_index(state).ok_or_else(|| Error::Model(format!("unknown state `{state}`")))?;
        Ok(PointedModel { model, current: w })
    }

    pub fn current_name(&self) -> &str {
        self.model.state_name(self.current)
    }
}

pub fn interpret_action(m: &KripkeModel, a: &Action) -> Result<Relation> {
    m.interpret_action(a)
}

pub fn expand(m: &KripkeModel, x: &str, w: usize) -> Result<KripkeModel> {
    m.expand(x, w)
}

/// Every state is reachable from the current one along the union of all relations.
pub fn is_rooted(pm: &PointedModel) -> bool {
    let reach = pm.model.any_relation().star().succ(pm.current);
    reach.count_ones() as usize == pm.model.len()
}

/// All models are finite, hence image-finite.
pub fn image_finite(_m: &KripkeModel) -> bool {
    true
}

/// Checks that `h` is an isomorphism of pointed models.
pub fn is_isomorphism(m: &PointedModel, n: &PointedModel, h: &[usize]) -> bool {
    let (a, b) = (&m.model, &n.model);
    if a.sig() != b.sig() || a.len() != b.len() || h.len() != a.len() || h[m.current] != n.current {
        return false;
    }
    let mut hit = 0u64;
    for &v in h {
        if v >= b.len() || hit & (1 << v) != 0 {
            return false;
        }
        hit |= 1 << v;
    }
    a.named().iter().zip(b.named()).all(|(&x, &y)| h[x] == y)
        && (0..a.len()).all(|w| a.props_at(w) == b.props_at(h[w]))
        && a.relations().iter().zip(b.relations()).all(|(ra, rb)| {
            (0..a.len()).all(|w| (0..a.len()).all(|u| ra.contains(w, u) == rb.contains(h[w], h[u])))
        })
}

/// Searches for an isomorphism mapping the current state to the current state.
pub fn find_isomorphism(m: &PointedModel, n: &PointedModel) -> Option<Vec<usize>> {
    let (a, b) = (&m.model, &n.model);
    if a.sig() != b.sig() || a.len() != b.len() {
        return None;
    }
    let size = a.len();
    let profile = |k: &KripkeModel, w: usize| {
        let degrees: Vec<(u32, u32, bool)> = k
            .relations()
            .iter()
            .map(|r| {
                let indeg = (0..size).filter(|&u| r.contains(u, w)).count() as u32;
                (r.succ(w).count_ones(), indeg, r.contains(w, w))
            })
            .collect();
        let names: Vec<bool> = k.named().iter().map(|&x| x == w).collect();
        (k.props_at(w), names, degrees)
    };
    let pa: Vec<_> = (0..size).map(|w| profile(a, w)).collect();
    let pb: Vec<_> = (0..size).map(|w| profile(b, w)).collect();
    let mut pa_sorted = pa.clone();
    let mut pb_sorted = pb.clone();
    pa_sorted.sort();
    pb_sorted.sort();
    if pa_sorted != pb_sorted || pa[m.current] != pb[n.current] {
        return None;
    }

    let mut h = vec![usize::MAX; size];
    let mut used = 0u64;
    h[m.current] = n.current;
    used |= 1 << n.current;
    for (&x, &y) in a.named().iter().zip(b.named()) {
        if h[x] == usize::MAX && used & (1 << y) == 0 {
            h[x] = y;
            used |= 1 << y;
        } else if h[x] != y {
            return None;
        }
    }

    // Breadth-first order from the current state keeps constraints local.
    let any = a.any_relation();
    let back = any.inverse();
    let mut order = Vec::new();
    let mut seen = 0u64;
    let mut queue = VecDeque::from([m.current]);
    seen |= 1 << m.current;
    while let Some(w) = queue.pop_front() {
        order.push(w);
        for u in bits(any.succ(w) | back.succ(w)) {
            if seen & (1 << u) == 0 {
                seen |= 1 << u;
                queue.push_back(u);
            }
        }
    }
    order.extend((0..size).filter(|&w| seen & (1 << w) == 0));

    fn consistent(a: &KripkeModel, b: &KripkeModel, h: &[usize], w: usize) -> bool {
        a.relations().iter().zip(b.relations()).all(|(ra, rb)| {
            (0..h.len()).filter(|&u| h[u] != usize::MAX).all(|u| {
                ra.contains(w, u) == rb.contains(h[w], h[u]) && ra.contains(u, w) == rb.contains(h[u], h[w])
            })
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn search<T: PartialEq>(
        a: &KripkeModel,
        b: &KripkeModel,
        pa: &[T],
        pb: &[T],
        order: &[usize],
        i: usize,
        h: &mut Vec<usize>,
        used: &mut u64,
        fixed: u64,
    ) -> bool {
        let Some(&w) = order.get(i) else { return true };
        if fixed & (1 << w) != 0 {
            return consistent(a, b, h, w) && search(a, b, pa, pb, order, i + 1, h, used, fixed);
        }
        for v in 0..b.len() {
            if *used & (1 << v) != 0 || pa[w] != pb[v] {
                continue;
            }
            h[w] = v;
            *used |= 1 << v;
            if consistent(a, b, h, w) && search(a, b, pa, pb, order, i + 1, h, used, fixed) {
                return true;
            }
            *used &= !(1 << v);
            h[w] = usize::MAX;
        }
        false
    }

    let fixed = (0..size).filter(|&w| h[w] != usize::MAX).fold(0u64, |acc, w| acc | 1 << w);
    if (0..size).any(|w| fixed & (1 << w) != 0 && pa[w] != pb[h[w]]) {
        return None;
    }
    if search(a, b, &pa, &pb, &order, 0, &mut h, &mut used, fixed) {
        debug_assert!(is_isomorphism(m, n, &h));
        Some(h)
    } else {
        None
    }
}

/// Parameters for random model generation.
#[derive(Clone, Debug)]
pub struct RandomModelSpec {
    pub states: usize,
    pub edge_density: f64,
    pub prop_density: f64,
}

/// Deterministic in `seed`. Nominals and variables are assigned uniformly; each
/// edge and each (state, prop) membership is included with probability `density`.
pub fn generate_random_model(seed: u64, n_states: usize, density: f64, sig: &Signature) -> KripkeModel {
    let spec = RandomModelSpec { states: n_states, edge_density: density, prop_density: density };
    random_model(&mut ChaCha8Rng::seed_from_u64(seed), &spec, sig)
}

pub fn random_model<R: Rng>(rng: &mut R, spec: &RandomModelSpec, sig: &Signature) -> KripkeModel {
    let n = spec.states.clamp(1, MAX_STATES);
    let states: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let named = (0..sig.named_count()).map(|_| rng.gen_range(0..n)).collect();
    let relations = sig
        .relations()
        .iter()
        .map(|_| {
            let mut r = Relation::empty(n);
            for a in 0..n {
                for b in 0..n {
                    if rng.gen_bool(spec.edge_density.clamp(0.0, 1.0)) {
                        r.insert(a, b);
                    }
                }
            }
            r
        })
        .collect();
    let valuation = (0..n)
        .map(|_| {
            (0..sig.props().len())
                .filter(|_| rng.gen_bool(spec.prop_density.clamp(0.0, 1.0)))
                .fold(0u64, |acc, i| acc | 1 << i)
        })
        .collect();
    KripkeModel::new(sig.clone(), states, named, relations, valuation).expect("generated model is well formed")
}

/// Relabels states by `perm` (old index to new index).
pub fn permute_states(m: &KripkeModel, perm: &[usize]) -> KripkeModel {
    let n = m.len();
    let mut states = vec![String::new(); n];
    let mut valuation = vec![0; n];
    for w in 0..n {
        states[perm[w]] = format!("{}'", m.state_name(w));
        valuation[perm[w]] = m.props_at(w);
    }
    let named = m.named().iter().map(|&w| perm[w]).collect();
    let relations = m.relations().iter().map(|r| Relation::from_pairs(n, r.pairs().map(|(a, b)| (perm[a], perm[b])))).collect();
    KripkeModel::new(m.sig().clone(), states, named, relations, valuation).expect("permutation preserves validity")
}
