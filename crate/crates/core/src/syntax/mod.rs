//! Signatures, fragments, action and sentence terms, and their surface syntax.

mod parse;
mod print;
mod term;
mod validate;

pub(crate) use parse::parse_action_at;
pub use parse::{parse_action, parse_sentence};
pub use print::{print_action, print_sentence};
pub use term::{Action, Sentence};
pub use validate::{check_action, check_sentence, validate_in_fragment, FragmentReport, Violation};

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The symbol pools of a signature. Bound variables behave as nominals of the
/// extended signature and are kept in extension order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    #[serde(default)]
    nominals: Vec<String>,
    #[serde(default)]
    relations: Vec<String>,
    #[serde(default)]
    props: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    bound_vars: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolKind {
    Nominal,
    Relation,
    Prop,
    Var,
}

impl SymbolKind {
    pub fn describe(self) -> &'static str {
        match self {
            SymbolKind::Nominal => "nominal",
            SymbolKind::Relation => "relation",
            SymbolKind::Prop => "proposition",
            SymbolKind::Var => "variable",
        }
    }
}

fn valid_ident(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !parse::is_keyword(name)
}

impl Signature {
    pub fn new<S: Into<String>>(
        nominals: impl IntoIterator<Item = S>,
        relations: impl IntoIterator<Item = S>,
        props: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let sig = Signature {
            nominals: nominals.into_iter().map(Into::into).collect(),
            relations: relations.into_iter().map(Into::into).collect(),
            props: props.into_iter().map(Into::into).collect(),
            bound_vars: Vec::new(),
        };
        sig.check()?;
        Ok(sig)
    }

    /// Re-checks pool disjointness and identifier syntax; used after deserialization.
    pub fn check(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for name in self.all_symbols() {
            if !valid_ident(name) {
                return Err(Error::Signature(format!("`{name}` is not a valid identifier")));
            }
            if !seen.insert(name) {
                return Err(Error::Signature(format!("`{name}` is declared twice")));
            }
        }
        Ok(())
    }

    fn all_symbols(&self) -> impl Iterator<Item = &str> {
        self.nominals
            .iter()
            .chain(&self.relations)
            .chain(&self.props)
            .chain(&self.bound_vars)
            .map(String::as_str)
    }

    pub fn nominals(&self) -> &[String] {
        &self.nominals
    }

    pub fn relations(&self) -> &[String] {
        &self.relations
    }

    pub fn props(&self) -> &[String] {
        &self.props
    }

    pub fn bound_vars(&self) -> &[String] {
        &self.bound_vars
    }

    /// Nominals followed by bound variables: every name that denotes a state.
    pub fn named(&self) -> impl Iterator<Item = &str> + '_ {
        self.nominals.iter().chain(&self.bound_vars).map(String::as_str)
    }

    pub fn named_count(&self) -> usize {
        self.nominals.len() + self.bound_vars.len()
    }

    pub fn named_index(&self, name: &str) -> Option<usize> {
        self.named().position(|n| n == name)
    }

    pub fn prop_index(&self, name: &str) -> Option<usize> {
        self.props.iter().position(|n| n == name)
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|n| n == name)
    }

    /// Size of the basic-sentence set: nominals, bound variables and props.
    pub fn basic_count(&self) -> usize {
        self.named_count() + self.props.len()
    }

    pub fn kind_of(&self, name: &str) -> Option<SymbolKind> {
        if self.nominals.iter().any(|n| n == name) {
            Some(SymbolKind::Nominal)
        } else if self.bound_vars.iter().any(|n| n == name) {
            Some(SymbolKind::Var)
        } else if self.props.iter().any(|n| n == name) {
            Some(SymbolKind::Prop)
        } else if self.relations.iter().any(|n| n == name) {
            Some(SymbolKind::Relation)
        } else {
            None
        }
    }

    pub fn declares(&self, name: &str) -> bool {
        self.kind_of(name).is_some()
    }

    /// The name `extend` would pick next: `x<depth>`, suffixed with `_` until fresh.
    pub fn fresh_var(&self) -> String {
        let mut name = format!("x{}", self.bound_vars.len());
        while self.declares(&name) {
            name.push('_');
        }
        name
    }

    /// Appends a fresh variable.
    pub fn extend(&self) -> (Signature, String) {
        let var = self.fresh_var();
        let mut sig = self.clone();
        sig.bound_vars.push(var.clone());
        (sig, var)
    }

    /// Appends a caller-chosen variable, which must not collide with any symbol.
    pub fn with_var(&self, var: &str) -> Result<Signature> {
        if !valid_ident(var) {
            return Err(Error::Signature(format!("`{var}` is not a valid variable name")));
        }
        if self.declares(var) {
            return Err(Error::Signature(format!("variable `{var}` collides with a declared symbol")));
        }
        let mut sig = self.clone();
        sig.bound_vars.push(var.to_string());
        Ok(sig)
    }

    /// Drops the most recent variable; `None` when there is none.
    pub fn reduct(&self) -> Option<Signature> {
        let mut sig = self.clone();
        sig.bound_vars.pop()?;
        Some(sig)
    }

    /// The signature without any bound variables.
    pub fn base(&self) -> Signature {
        Signature { bound_vars: Vec::new(), ..self.clone() }
    }

    /// Same nominals, relations and props; variables may differ.
    pub fn same_base(&self, other: &Signature) -> bool {
        self.nominals == other.nominals && self.relations == other.relations && self.props == other.props
    }
}

/// Returns `(Δ[x], x)` with `x` fresh.
pub fn extend_signature(sig: &Signature) -> (Signature, String) {
    sig.extend()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Op {
    Diamond,
    At,
    Store,
    Exists,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ctor {
    Union,
    Comp,
    Star,
}

impl Op {
    pub const ALL: [Op; 4] = [Op::Diamond, Op::At, Op::Store, Op::Exists];

    pub fn name(self) -> &'static str {
        match self {
            Op::Diamond => "diamond",
            Op::At => "at",
            Op::Store => "store",
            Op::Exists => "exists",
        }
    }
}

impl Ctor {
    pub const ALL: [Ctor; 3] = [Ctor::Union, Ctor::Comp, Ctor::Star];

    pub fn name(self) -> &'static str {
        match self {
            Ctor::Union => "union",
            Ctor::Comp => "comp",
            Ctor::Star => "star",
        }
    }
}

/// Which sentence operators and action constructors a fragment admits.
/// Action constructors require `diamond`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FragmentConfig {
    ops: BTreeSet<Op>,
    ctors: BTreeSet<Ctor>,
}

impl FragmentConfig {
    pub fn new(ops: impl IntoIterator<Item = Op>, ctors: impl IntoIterator<Item = Ctor>) -> Result<Self> {
        let frag = FragmentConfig { ops: ops.into_iter().collect(), ctors: ctors.into_iter().collect() };
        if !frag.ctors.is_empty() && !frag.has(Op::Diamond) {
            return Err(Error::Precondition(
                "action constructors require `diamond` in the fragment".into(),
            ));
        }
        Ok(frag)
    }

    /// Full hybrid-dynamic logic.
    pub fn full() -> Self {
        FragmentConfig { ops: Op::ALL.into_iter().collect(), ctors: Ctor::ALL.into_iter().collect() }
    }

    pub fn ops_only(ops: impl IntoIterator<Item = Op>) -> Self {
        FragmentConfig { ops: ops.into_iter().collect(), ctors: BTreeSet::new() }
    }

    /// All sixteen operator subsets, without action constructors.
    pub fn all_op_subsets() -> Vec<FragmentConfig> {
        (0u8..16)
            .map(|mask| {
                FragmentConfig::ops_only(
                    Op::ALL.into_iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, o)| o),
                )
            })
            .collect()
    }

    pub fn has(&self, op: Op) -> bool {
        self.ops.contains(&op)
    }

    pub fn has_ctor(&self, c: Ctor) -> bool {
        self.ctors.contains(&c)
    }

    pub fn ops(&self) -> &BTreeSet<Op> {
        &self.ops
    }

    pub fn ctors(&self) -> &BTreeSet<Ctor> {
        &self.ctors
    }

    /// Both the operator and constructor sets are subsets of `other`'s.
    pub fn is_subfragment_of(&self, other: &FragmentConfig) -> bool {
        self.ops.is_subset(&other.ops) && self.ctors.is_subset(&other.ctors)
    }

    pub fn without(&self, op: Op) -> FragmentConfig {
        let mut f = self.clone();
        f.ops.remove(&op);
        if op == Op::Diamond {
            f.ctors.clear();
        }
        f
    }
}

impl FromStr for FragmentConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut ops = Vec::new();
        let mut ctors = Vec::new();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            if let Some(op) = Op::ALL.into_iter().find(|o| o.name() == item) {
                ops.push(op);
            } else if let Some(c) = Ctor::ALL.into_iter().find(|c| c.name() == item) {
                ctors.push(c);
            } else if item == "full" {
                ops.extend(Op::ALL);
                ctors.extend(Ctor::ALL);
            } else if item == "none" {
            } else {
                return Err(Error::Precondition(format!("unknown fragment item `{item}`")));
            }
        }
        FragmentConfig::new(ops, ctors)
    }
}

impl fmt::Display for FragmentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<&str> =
            self.ops.iter().map(|o| o.name()).chain(self.ctors.iter().map(|c| c.name())).collect();
        if items.is_empty() {
            write!(f, "none")
        } else {
            write!(f, "{}", items.join(","))
        }
    }
}
