//! `hdpl`: model checking, games and equivalence checks for hybrid-dynamic
//! propositional logic. Exit codes: 0 positive verdict, 1 negative verdict
//! or counterexample, 2 usage or input error.

mod examples;
mod fuzz;
mod io;

use std::collections::BTreeMap;
use std::io::BufRead;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use hdpl_core::checker::satisfies;
use hdpl_core::gameboard::{complete_tree, print_tree, validate_tree};
use hdpl_core::games::{
    char_formula, describe_game_sentence, ef_solve_with, lower_game_sentence, normal_form, GameState, GameStore, Player, PropertyCheck,
};
use hdpl_core::kripke::find_isomorphism;
use hdpl_core::omega::{hennessy_milner_check, max_back_and_forth, omega_solve, rooted_iso_check};
use hdpl_core::syntax::{parse_action, print_sentence, FragmentConfig};

use io::{emit, load_model, load_pointed, load_signature, pointed, sentence_arg, sentence_over, text_arg, tree_arg};

#[derive(Parser)]
#[command(name = "hdpl", version, about = "Hybrid-dynamic propositional logic over finite Kripke models")]
struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Model-check a sentence at a state.
    Check {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        state: String,
        /// Sentence text, or @FILE.
        #[arg(long)]
        formula: String,
        #[arg(long, default_value = "full")]
        fragment: FragmentConfig,
    },
    /// Solve the finite game on a gameboard tree.
    Game {
        /// Tree text, or @FILE.
        #[arg(long)]
        tree: String,
        /// FILE:STATE
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        /// Check the game property at leaves only.
        #[arg(long)]
        leaves_only: bool,
        /// Print the winning line of play.
        #[arg(long)]
        trace: bool,
    },
    /// The characteristic game sentence of a pointed model.
    Charform {
        #[arg(long)]
        tree: String,
        /// FILE:STATE, or FILE together with --state.
        #[arg(long)]
        model: String,
        #[arg(long)]
        state: Option<String>,
        /// Print the sentence it stands for instead of its structure.
        #[arg(long)]
        lower: bool,
    },
    /// Normal-form tree of a sentence, optionally tested at a state.
    Normalform {
        #[arg(long)]
        formula: String,
        /// Supplies the signature; with --state, also the test point.
        #[arg(long, required_unless_present = "signature", conflicts_with = "signature")]
        model: Option<PathBuf>,
        /// A signature file, for when no model is at hand.
        #[arg(long)]
        signature: Option<PathBuf>,
        #[arg(long, requires = "model")]
        state: Option<String>,
        #[arg(long, default_value = "full")]
        fragment: FragmentConfig,
    },
    /// Print a complete tree, or validate one.
    Tree {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value = "full")]
        fragment: FragmentConfig,
        #[arg(long, default_value_t = 2)]
        height: usize,
        /// Comma-separated actions for diamond edges; defaults to the relations.
        #[arg(long)]
        actions: Option<String>,
        /// Print the complete tree of the given height; the default action.
        #[arg(long, conflicts_with = "validate")]
        complete: bool,
        /// Validate this tree (text or @FILE) instead.
        #[arg(long)]
        validate: Option<String>,
    },
    /// Decide the countable game.
    Omega {
        #[arg(long)]
        fragment: FragmentConfig,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// The maximal back-and-forth family.
    Bf {
        #[arg(long)]
        fragment: FragmentConfig,
        #[arg(long = "modelL")]
        model_l: PathBuf,
        #[arg(long = "modelR")]
        model_r: PathBuf,
        /// Report whether these two states are related.
        #[arg(long, num_args = 2, value_names = ["W", "V"])]
        pair: Option<Vec<String>>,
    },
    /// Characteristic agreement, the countable game and back-and-forth, side by side.
    Hm {
        #[arg(long)]
        fragment: FragmentConfig,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long, default_value_t = 5)]
        max_height: usize,
    },
    /// Isomorphism against the countable game on rooted models.
    Rootediso {
        #[arg(long, default_value = "diamond,at,store")]
        fragment: FragmentConfig,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Search for an isomorphism of pointed models.
    Iso {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Play the finite game; moves are read from stdin, `?` takes the suggestion.
    Play {
        #[arg(long)]
        tree: String,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        /// Both players follow the solver.
        #[arg(long, conflicts_with = "as_player")]
        auto: bool,
        /// Play this side; the solver answers for the other.
        #[arg(long = "as", value_enum)]
        as_player: Option<Role>,
        #[arg(long)]
        leaves_only: bool,
    },
    /// Differential suites; counterexamples are written as replayable model files.
    Fuzz {
        #[arg(long, value_enum)]
        suite: fuzz::Suite,
        #[arg(long, default_value_t = 200)]
        cases: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        max_states: usize,
        /// Fix the fragment instead of drawing one per case.
        #[arg(long)]
        fragment: Option<FragmentConfig>,
        /// Directory for counterexample files.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Replay a built-in example and assert its verdict.
    Replay {
        #[arg(long, value_enum)]
        example: examples::Example,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Role {
    Abelard,
    Eloise,
}

impl Role {
    fn player(self) -> Player {
        match self {
            Role::Abelard => Player::Abelard,
            Role::Eloise => Player::Eloise,
        }
    }
}

fn mode(leaves_only: bool) -> PropertyCheck {
    if leaves_only {
        PropertyCheck::LeavesOnly
    } else {
        PropertyCheck::EveryPosition
    }
}

fn run(cli: Cli) -> Result<bool> {
    let json = cli.json;
    match cli.command {
        Command::Check { model, state, formula, fragment } => {
            let m = load_model(&model)?;
            let s = sentence_arg(&formula, &m, &fragment)?;
            let verdict = satisfies(&pointed(m, &state)?, &s)?;
            emit(json, &json!({ "verdict": verdict }), || verdict.to_string())?;
            Ok(verdict)
        }
        Command::Game { tree, left, right, leaves_only, trace } => {
            let (l, r) = (load_pointed(&left)?, load_pointed(&right)?);
            let tr = tree_arg(&tree, &l.model)?;
            let out = ef_solve_with(&tr, &l, &r, mode(leaves_only))?;
            let lines: Vec<String> = out.trace.iter().map(|rd| rd.describe(&l.model, &r.model)).collect();
            emit(json, &json!({ "eloise_wins": out.eloise_wins, "trace": out.trace, "described": lines }), || {
                let verdict = if out.eloise_wins { "eloise wins" } else { "abelard wins" };
                if trace && !lines.is_empty() {
                    format!("{verdict}\n{}", lines.join("\n"))
                } else {
                    verdict.into()
                }
            })?;
            Ok(out.eloise_wins)
        }
        Command::Charform { tree, model, state, lower } => {
            let p = match state {
                Some(state) => pointed(load_model(Path::new(&model))?, &state)?,
                None => load_pointed(&model)?,
            };
            let tr = tree_arg(&tree, &p.model)?;
            let mut store = GameStore::new();
            let id = char_formula(&mut store, &tr, &p)?;
            let sentence = print_sentence(&lower_game_sentence(&store, &tr, id)?);
            let structure = describe_game_sentence(&store, &tr, id)?;
            let value = json!({ "id": id.index(), "structure": structure, "sentence": sentence });
            emit(json, &value, || if lower { sentence.clone() } else { structure.clone() })?;
            Ok(true)
        }
        Command::Normalform { formula, model, signature, state, fragment } => {
            let (model, sig) = match (model, signature) {
                (Some(path), _) => {
                    let m = load_model(&path)?;
                    let sig = m.sig().clone();
                    (Some(m), sig)
                }
                (None, Some(path)) => (None, load_signature(&path)?),
                (None, None) => bail!("normalform needs --model or --signature"),
            };
            let s = sentence_over(&formula, &sig, &fragment)?;
            let nf = normal_form(&s, &sig, &fragment)?;
            let tree = print_tree(&nf.tree);
            let (Some(m), Some(state)) = (model, state) else {
                emit(json, &json!({ "tree": tree }), || tree.clone())?;
                return Ok(true);
            };
            let p = pointed(m, &state)?;
            let mut store = GameStore::new();
            let id = char_formula(&mut store, &nf.tree, &p)?;
            let member = nf.membership.contains(&store, id);
            let truth = satisfies(&p, &s)?;
            emit(json, &json!({ "tree": tree, "member": member, "satisfied": truth }), || {
                format!("{tree}\nmember: {member}\nsatisfied: {truth}")
            })?;
            Ok(member == truth)
        }
        Command::Tree { model, fragment, height, actions, complete: _, validate } => {
            let m = load_model(&model)?;
            if let Some(t) = validate {
                let tr = tree_arg(&t, &m)?;
                let report = validate_tree(&tr, &fragment);
                let problems: Vec<String> =
                    report.problems.iter().map(|p| format!("{:?}: {}", p.path, p.message)).collect();
                emit(json, &json!({ "valid": report.valid(), "problems": problems }), || {
                    if report.valid() {
                        "valid".into()
                    } else {
                        problems.join("\n")
                    }
                })?;
                return Ok(report.valid());
            }
            let acts = match actions {
                Some(text) => text
                    .split(',')
                    .map(|a| parse_action(a.trim(), m.sig(), &fragment))
                    .collect::<hdpl_core::Result<Vec<_>>>()?,
                None => m.sig().relations().iter().map(hdpl_core::syntax::Action::rel).collect(),
            };
            let tr = complete_tree(m.sig(), &fragment, height, &acts)?;
            let text = print_tree(&tr);
            emit(json, &json!({ "tree": text, "nodes": tr.node_count().to_string() }), || text.clone())?;
            Ok(true)
        }
        Command::Omega { fragment, left, right } => {
            let out = omega_solve(&fragment, &load_pointed(&left)?, &load_pointed(&right)?)?;
            emit(json, &out, || match out.rank {
                None => format!("eloise wins ({} positions)", out.positions),
                Some(k) => format!("abelard wins in {k} rounds ({} positions)", out.positions),
            })?;
            Ok(out.eloise_wins)
        }
        Command::Bf { fragment, model_l, model_r, pair } => {
            let (m, n) = (load_model(&model_l)?, load_model(&model_r)?);
            let fam = max_back_and_forth(&fragment, &m, &n)?;
            let mut related = Vec::new();
            for w in 0..m.len() {
                for v in 0..n.len() {
                    if fam.relates(w, v) {
                        related.push((m.state_name(w).to_string(), n.state_name(v).to_string()));
                    }
                }
            }
            let verdict = match &pair {
                Some(p) => {
                    let (Some(w), Some(v)) = (m.state_index(&p[0]), n.state_index(&p[1])) else {
                        bail!("unknown state in --pair");
                    };
                    Some(fam.relates(w, v))
                }
                None => None,
            };
            emit(json, &json!({ "maps": fam.maps.len(), "related": related, "verdict": verdict }), || {
                let pairs: Vec<String> = related.iter().map(|(a, b)| format!("{a}~{b}")).collect();
                let mut s = format!("{} maps; related: {}", fam.maps.len(), pairs.join(" "));
                if let Some(v) = verdict {
                    s.push_str(&format!("\nverdict: {v}"));
                }
                s
            })?;
            Ok(verdict.unwrap_or(!fam.is_empty()))
        }
        Command::Hm { fragment, left, right, max_height } => {
            let report = hennessy_milner_check(&fragment, &load_pointed(&left)?, &load_pointed(&right)?, max_height)?;
            let value = json!({ "report": report, "all_agree": report.all_agree(), "as_predicted": report.as_predicted() });
            emit(json, &value, || {
                format!(
                    "characteristic agreement (heights 1..={}): {}\ncountable game: {}\nback-and-forth: {}\nhypotheses for back-and-forth: {}\nas predicted: {}",
                    report.heights_checked,
                    report.char_agree,
                    report.omega_wins,
                    report.bf_related,
                    report.bf_hypotheses,
                    report.as_predicted()
                )
            })?;
            Ok(report.as_predicted())
        }
        Command::Rootediso { fragment, left, right } => {
            let report = rooted_iso_check(&fragment, &load_pointed(&left)?, &load_pointed(&right)?)?;
            emit(json, &json!({ "report": report, "agree": report.agree() }), || {
                format!("isomorphic: {}\ncountable game: {}\nagree: {}", report.isomorphic, report.omega_wins, report.agree())
            })?;
            Ok(report.agree())
        }
        Command::Iso { left, right } => {
            let (l, r) = (load_pointed(&left)?, load_pointed(&right)?);
            let iso = find_isomorphism(&l, &r);
            let map: Option<BTreeMap<String, String>> = iso.as_ref().map(|h| {
                h.iter()
                    .enumerate()
                    .map(|(w, &v)| (l.model.state_name(w).to_string(), r.model.state_name(v).to_string()))
                    .collect()
            });
            emit(json, &json!({ "isomorphic": iso.is_some(), "map": map }), || match &map {
                Some(m) => m.iter().map(|(a, b)| format!("{a} -> {b}")).collect::<Vec<_>>().join("\n"),
                None => "not isomorphic".into(),
            })?;
            Ok(iso.is_some())
        }
        Command::Play { tree, left, right, auto, as_player, leaves_only } => {
            play(json, &tree, &left, &right, auto, as_player, leaves_only)
        }
        Command::Fuzz { suite, cases, seed, max_states, fragment, out } => {
            fuzz::run(json, suite, cases, seed, max_states, fragment.as_ref(), &out)
        }
        Command::Replay { example } => examples::run(json, example),
    }
}

#[derive(Serialize)]
struct PlayStep {
    player: Player,
    choice: String,
}

/// Stdin drives every move unless `auto` hands all of them to the solver or
/// `human` restricts stdin to one side.
fn play(
    json: bool,
    tree: &str,
    left: &str,
    right: &str,
    auto: bool,
    human: Option<Role>,
    leaves_only: bool,
) -> Result<bool> {
    let (l, r) = (load_pointed(left)?, load_pointed(right)?);
    let tr = hdpl_core::gameboard::parse_tree(&text_arg(tree)?, l.model.sig())?;
    let mut gs = GameState::new(&tr, l, r, mode(leaves_only))?;
    let mut steps = Vec::new();
    let mut lines = std::io::stdin().lock().lines();
    while let Some(player) = gs.to_move() {
        let legal = hdpl_core::games::legal_moves(&gs, player);
        let names: Vec<String> = legal.iter().map(|m| gs.describe_move(m)).collect();
        let machine = auto || human.is_some_and(|role| role.player() != player);
        let mv = if machine {
            gs.suggested_move().expect("a player to move has a move")
        } else {
            if !json {
                println!("{player:?} to move: {}", names.join(" | "));
            }
            let Some(line) = lines.next().transpose()? else {
                bail!("input ended before the game did");
            };
            let choice = line.trim();
            if choice == "?" {
                gs.suggested_move().expect("a player to move has a move")
            } else {
                match names.iter().position(|n| n == choice) {
                    Some(i) => legal[i].clone(),
                    None => bail!("illegal move `{choice}`; legal: {}", names.join(", ")),
                }
            }
        };
        let choice = gs.describe_move(&mv);
        if !json {
            println!("{player:?}: {choice}");
        }
        steps.push(PlayStep { player, choice });
        gs = gs.step(&mv)?;
    }
    let winner = gs.winner().expect("the loop ends when the game is decided");
    if json {
        println!("{}", serde_json::to_string_pretty(&json!({ "winner": winner, "moves": steps }))?);
    } else {
        println!("winner: {winner:?}");
    }
    Ok(winner == Player::Eloise)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
