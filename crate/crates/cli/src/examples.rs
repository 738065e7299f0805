use anyhow::Result;
use clap::ValueEnum;
use serde::Serialize;

use hdpl_core::checker::satisfies;
use hdpl_core::fixtures;
use hdpl_core::gameboard::parse_tree;
use hdpl_core::games::ef_solve;
use hdpl_core::kripke::{KripkeModel, PointedModel};
use hdpl_core::omega::{bf_related, omega_solve};
use hdpl_core::syntax::{FragmentConfig, Op};

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Example {
    /// The two-state loop against its unfolding, truncated at depth 4.
    Loop,
    /// The positive-fragment pair.
    Pos,
    /// The quantifier pair.
    Quant,
    /// The finite-orders sentence on chains and cycles.
    FiniteOrders,
}

#[derive(Serialize)]
struct Claim {
    claim: String,
    expected: serde_json::Value,
    actual: serde_json::Value,
    holds: bool,
}

fn claim<T: Serialize + PartialEq>(claim: impl Into<String>, expected: T, actual: T) -> Result<Claim> {
    Ok(Claim {
        claim: claim.into(),
        holds: expected == actual,
        expected: serde_json::to_value(expected)?,
        actual: serde_json::to_value(actual)?,
    })
}

fn pm(m: &KripkeModel, w: usize) -> PointedModel {
    PointedModel::new(m.clone(), w).expect("fixture state exists")
}

fn claims(example: Example) -> Result<Vec<Claim>> {
    let down_dia = FragmentConfig::ops_only([Op::Diamond, Op::Store]);
    let mut out = Vec::new();
    match example {
        Example::Loop => {
            let (l, r) = (pm(&fixtures::loop_left(), 0), pm(&fixtures::loop_right(4), 0));
            let tr = parse_tree(fixtures::LOOP_TREE_TEXT, l.model.sig())?;
            let game = ef_solve(&tr, &l, &r)?;
            let trace: Vec<String> = game.trace.iter().map(|rd| rd.describe(&l.model, &r.model)).collect();
            out.push(claim(format!("eloise wins on {}", fixtures::LOOP_TREE_TEXT), false, game.eloise_wins)?);
            out.push(claim("abelard's line has three rounds", 3, trace.len())?);
            out.push(claim("abelard's line", vec!["down", "<l> L:1 -> R:1", "<l> L:0 -> R:2"], trace.iter().map(String::as_str).collect())?);
            let omega = omega_solve(&down_dia, &l, &r)?;
            out.push(claim("countable game under diamond,store is lost within 3 rounds", true, omega.rank.is_some_and(|k| k <= 3))?);
        }
        Example::Pos => {
            let (m, n) = fixtures::pos_pair();
            let (l, r) = (pm(&m, 0), pm(&n, 0));
            out.push(claim("eloise wins the countable game under diamond,store", true, omega_solve(&down_dia, &l, &r)?.eloise_wins)?);
            out.push(claim("back-and-forth relates the roots", false, bf_related(&down_dia, &l, &r)?)?);
        }
        Example::Quant => {
            let frag = FragmentConfig::ops_only([Op::Diamond, Op::Store, Op::Exists]);
            let (m, n) = fixtures::quant_pair();
            let (l, r) = (pm(&m, 0), pm(&n, 0));
            out.push(claim("eloise wins the countable game under diamond,store,exists", true, omega_solve(&frag, &l, &r)?.eloise_wins)?);
            out.push(claim("back-and-forth relates the roots", false, bf_related(&frag, &l, &r)?)?);
        }
        Example::FiniteOrders => {
            let phi = fixtures::finite_order_sentence();
            for n in 2..=6 {
                out.push(claim(format!("holds on the nominated chain of length {n}"), true, satisfies(&pm(&fixtures::nominated_chain(n), 0), &phi)?)?);
            }
            out.push(claim("holds on the two-cycle", false, satisfies(&pm(&fixtures::two_cycle(), 0), &phi)?)?);
            out.push(claim("holds on the loop frame", false, satisfies(&pm(&fixtures::loop_frame_with_nominals(0, 1), 0), &phi)?)?);
        }
    }
    Ok(out)
}

pub fn run(json: bool, example: Example) -> Result<bool> {
    let claims = claims(example)?;
    let ok = claims.iter().all(|c| c.holds);
    if json {
        println!("{}", serde_json::to_string_pretty(&serde_json::json!({ "example": format!("{example:?}").to_lowercase(), "claims": claims, "ok": ok }))?);
    } else {
        for c in &claims {
            println!("{} {}: {}", if c.holds { "ok  " } else { "FAIL" }, c.claim, c.actual);
        }
    }
    Ok(ok)
}
