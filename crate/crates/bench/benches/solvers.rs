use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use hdpl_bench::{at_root, random_pairs};
use hdpl_core::checker::satisfies;
use hdpl_core::fixtures;
use hdpl_core::gameboard::{complete_tree, parse_tree};
use hdpl_core::games::{char_formula, ef_solve, GameStore};
use hdpl_core::omega::{action_pair_closure, bf_related, omega_solve};
use hdpl_core::syntax::{Action, FragmentConfig, Op};

fn fragments() -> Vec<(&'static str, FragmentConfig)> {
    vec![
        ("diamond", FragmentConfig::ops_only([Op::Diamond])),
        ("diamond,store", FragmentConfig::ops_only([Op::Diamond, Op::Store])),
        ("full", FragmentConfig::full()),
    ]
}

fn omega(c: &mut Criterion) {
    let pairs = random_pairs(11, 16, 4);
    let mut g = c.benchmark_group("omega_solve");
    for (name, frag) in fragments() {
        g.bench_with_input(BenchmarkId::from_parameter(name), &frag, |b, frag| {
            b.iter(|| {
                for (l, r) in &pairs {
                    black_box(omega_solve(frag, l, r).unwrap().eloise_wins);
                }
            })
        });
    }
    g.finish();
}

fn back_and_forth(c: &mut Criterion) {
    let pairs = random_pairs(13, 16, 4);
    let mut g = c.benchmark_group("bf_related");
    for (name, frag) in fragments() {
        g.bench_with_input(BenchmarkId::from_parameter(name), &frag, |b, frag| {
            b.iter(|| {
                for (l, r) in &pairs {
                    black_box(bf_related(frag, l, r).unwrap());
                }
            })
        });
    }
    g.finish();
}

fn finite_games(c: &mut Criterion) {
    let (l, r) = (at_root(&fixtures::loop_left()), at_root(&fixtures::loop_right(4)));
    let frag = FragmentConfig::ops_only([Op::Diamond, Op::Store]);
    let actions: Vec<Action> =
        action_pair_closure(&l.model, &r.model, frag.ctors()).unwrap().into_iter().map(|p| p.action).collect();
    let mut g = c.benchmark_group("ef_solve");
    for h in 1..=3 {
        let tr = complete_tree(l.model.sig(), &frag, h, &actions).unwrap();
        g.bench_with_input(BenchmarkId::new("complete", h), &tr, |b, tr| {
            b.iter(|| black_box(ef_solve(tr, &l, &r).unwrap().eloise_wins))
        });
    }
    g.finish();
}

fn characteristic(c: &mut Criterion) {
    let l = at_root(&fixtures::loop_left());
    let tr = parse_tree(fixtures::LOOP_TREE_TEXT, l.model.sig()).unwrap();
    c.bench_function("char_formula/loop_tree", |b| {
        b.iter(|| {
            let mut store = GameStore::new();
            black_box(char_formula(&mut store, &tr, &l).unwrap())
        })
    });
}

fn checker(c: &mut Criterion) {
    let phi = fixtures::finite_order_sentence();
    let mut g = c.benchmark_group("satisfies/finite_orders");
    for n in [4, 8, 16] {
        let pm = at_root(&fixtures::nominated_chain(n));
        g.bench_with_input(BenchmarkId::from_parameter(n), &pm, |b, pm| b.iter(|| black_box(satisfies(pm, &phi).unwrap())));
    }
    g.finish();
}

criterion_group!(benches, omega, back_and_forth, finite_games, characteristic, checker);
criterion_main!(benches);
