use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use hdpl_core::checker::satisfies;
use hdpl_core::gameboard::complete_tree;
use hdpl_core::games::{
    char_formula, ef_solve, enumerate_game_sentences, lower_game_sentence, predicted_theta_size, GameStore,
};
use hdpl_core::kripke::PointedModel;
use hdpl_core::omega::{action_pair_closure, bf_related, hennessy_milner_check, omega_solve};
use hdpl_core::random::{random_pair, random_pointed, random_tree, small_signature, TreeShape};
use hdpl_core::syntax::{Action, FragmentConfig, Op, Signature};

use crate::io::write_model;

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Arena rank against finite games on complete trees.
    Omega,
    /// Back-and-forth relatedness against the countable game.
    Bf,
    /// The three-way equivalence report meets its predictions.
    Hm,
    /// Exactly one game sentence holds, and it is the characteristic one.
    Fh,
}

/// Complete-tree heights the omega suite replays against the arena.
const OMEGA_DEPTH: usize = 3;
const FH_THETA_CAP: u128 = 512;

#[derive(Serialize)]
struct Counterexample {
    suite: Suite,
    seed: u64,
    case: usize,
    fragment: String,
    detail: String,
    left: String,
    right: Option<String>,
    replay: String,
}

#[derive(Serialize)]
struct Summary {
    suite: Suite,
    cases: usize,
    seed: u64,
    counterexamples: Vec<Counterexample>,
}

fn pick_fragment(rng: &mut ChaCha8Rng, quantifier_free: bool) -> FragmentConfig {
    let mut all = FragmentConfig::all_op_subsets();
    all.push(FragmentConfig::full());
    if quantifier_free {
        all.retain(|f| !f.has(Op::Exists));
    }
    all[rng.gen_range(0..all.len())].clone()
}

/// A finding about one case, or `None` when the case agrees.
type Check = Option<String>;

fn omega_case(frag: &FragmentConfig, l: &PointedModel, r: &PointedModel) -> Result<Check> {
    let arena = omega_solve(frag, l, r)?;
    let actions: Vec<Action> = action_pair_closure(&l.model, &r.model, frag.ctors())?.into_iter().map(|p| p.action).collect();
    let wins_at = |h: usize| -> Result<bool> {
        let tr = complete_tree(l.model.sig(), frag, h, &actions)?;
        Ok(ef_solve(&tr, l, r)?.eloise_wins)
    };
    let ok = match arena.rank {
        Some(k) if k <= OMEGA_DEPTH => !wins_at(k)? && (k == 0 || wins_at(k - 1)?),
        _ => wins_at(OMEGA_DEPTH)?,
    };
    Ok((!ok).then(|| format!("arena rank {:?} disagrees with complete-tree games", arena.rank)))
}

fn bf_case(frag: &FragmentConfig, l: &PointedModel, r: &PointedModel) -> Result<Check> {
    let bf = bf_related(frag, l, r)?;
    let win = omega_solve(frag, l, r)?.eloise_wins;
    let hypotheses = frag.has(Op::Store) && (frag.has(Op::At) || !(frag.has(Op::Diamond) || frag.has(Op::Exists)));
    Ok(if bf && !win {
        Some("related by back-and-forth, but the countable game is lost".into())
    } else if hypotheses && bf != win {
        Some(format!("hypotheses hold, yet back-and-forth {bf} and game {win} differ"))
    } else {
        None
    })
}

fn hm_case(frag: &FragmentConfig, l: &PointedModel, r: &PointedModel) -> Result<Check> {
    let report = hennessy_milner_check(frag, l, r, 4)?;
    Ok((!report.as_predicted()).then(|| format!("{report:?}")))
}

fn fh_case(rng: &mut ChaCha8Rng, sig: &Signature, frag: &FragmentConfig, max_states: usize) -> Result<(Check, Case)> {
    let actions = vec![Action::rel("r")];
    let tr = loop {
        let shape = TreeShape { height: rng.gen_range(0..=3), max_children: 2, closed: false };
        let tr = random_tree(rng, sig, frag, &shape, &actions);
        if predicted_theta_size(&tr) <= FH_THETA_CAP {
            break tr;
        }
    };
    let p = random_pointed(rng, sig, max_states);
    let mut store = GameStore::new();
    let all = enumerate_game_sentences(&mut store, &tr, FH_THETA_CAP)?;
    let mut satisfied = Vec::new();
    for &id in &all {
        if satisfies(&p, &lower_game_sentence(&store, &tr, id)?)? {
            satisfied.push(id);
        }
    }
    let expected = char_formula(&mut store, &tr, &p)?;
    let check = (satisfied != [expected]).then(|| format!("{} of {} game sentences hold", satisfied.len(), all.len()));
    Ok((check, Case { left: p, right: None, tree: Some(tr.to_string()) }))
}

/// Writes the case's models (and tree) next to each other and returns the
/// pointed-model arguments with a command that replays the case.
fn dump(out: &Path, stem: &str, suite: Suite, frag: &FragmentConfig, case: &Case) -> Result<(String, Option<String>, String)> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let lp = out.join(format!("{stem}.left.json"));
    write_model(&lp, &case.left.model)?;
    let left = format!("{}:{}", lp.display(), case.left.current_name());
    let Some(r) = &case.right else {
        let tp = out.join(format!("{stem}.tree"));
        fs::write(&tp, format!("{}\n", case.tree.as_deref().unwrap_or("leaf")))?;
        let replay =
            format!("hdpl charform --tree @{} --model {} --state {}", tp.display(), lp.display(), case.left.current_name());
        return Ok((left, None, replay));
    };
    let rp = out.join(format!("{stem}.right.json"));
    write_model(&rp, &r.model)?;
    let right = format!("{}:{}", rp.display(), r.current_name());
    let replay = match suite {
        Suite::Bf => format!(
            "hdpl bf --fragment {frag} --modelL {} --modelR {} --pair {} {}",
            lp.display(),
            rp.display(),
            case.left.current_name(),
            r.current_name()
        ),
        Suite::Hm => format!("hdpl hm --fragment {frag} --left {left} --right {right}"),
        _ => format!("hdpl omega --fragment {frag} --left {left} --right {right}"),
    };
    Ok((left, Some(right), replay))
}

struct Case {
    left: PointedModel,
    right: Option<PointedModel>,
    tree: Option<String>,
}

pub fn run(
    json: bool,
    suite: Suite,
    cases: usize,
    seed: u64,
    max_states: usize,
    fixed: Option<&FragmentConfig>,
    out: &Path,
) -> Result<bool> {
    if let Some(f) = fixed {
        if matches!(suite, Suite::Hm) && f.has(Op::Exists) {
            bail!("the hm suite needs a quantifier-free fragment");
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sig = small_signature();
    let lean = Signature::new(vec!["k".to_string()], vec!["r".into()], vec!["p".into()])?;
    let mut found = Vec::new();
    for case in 0..cases {
        let drawn = pick_fragment(&mut rng, matches!(suite, Suite::Hm));
        let frag = fixed.cloned().unwrap_or(drawn);
        let (check, c) = match suite {
            Suite::Fh => fh_case(&mut rng, &lean, &frag, max_states)?,
            _ => {
                let (l, r) = random_pair(&mut rng, &sig, max_states);
                let check = match suite {
                    Suite::Omega => omega_case(&frag, &l, &r)?,
                    Suite::Bf => bf_case(&frag, &l, &r)?,
                    _ => hm_case(&frag, &l, &r)?,
                };
                (check, Case { left: l, right: Some(r), tree: None })
            }
        };
        if let Some(detail) = check {
            let stem = format!("counterexample-{}-{seed}-{case}", format!("{suite:?}").to_lowercase());
            let (l, r, replay) = dump(out, &stem, suite, &frag, &c)?;
            if !json {
                println!("case {case} ({frag}): {detail}\n  replay: {replay}");
            }
            found.push(Counterexample {
                suite,
                seed,
                case,
                fragment: frag.to_string(),
                detail,
                left: l,
                right: r,
                replay,
            });
        }
    }
    let count = found.len();
    if json {
        println!("{}", serde_json::to_string_pretty(&Summary { suite, cases, seed, counterexamples: found })?);
    } else {
        println!("{}: {cases} cases, {count} counterexamples", format!("{suite:?}").to_lowercase());
    }
    Ok(count == 0)
}
