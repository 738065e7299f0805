//! Invariants as property tests. Each case draws a seed and builds its inputs
//! with the library's generators, so shrinking acts on the seed.

mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{fragments, pm};
use hdpl_core::checker::satisfies;
use hdpl_core::games::{char_formula, ef_solve, GameStore};
use hdpl_core::gameboard::{complete_tree, parse_tree, print_tree, validate_tree};
use hdpl_core::kripke::{find_isomorphism, permute_states};
use hdpl_core::omega::{
    bf_related, extract_bisim_witness, omega_solve, partial_iso_from_tuple, shift_family, validate_bisim_family,
};
use hdpl_core::random::{random_pair, random_pointed, random_sentence, random_tree, small_signature, TreeShape};
use hdpl_core::syntax::{parse_sentence, print_sentence, Action, FragmentConfig, Op, Sentence};

fn frag_of(rng: &mut ChaCha8Rng) -> FragmentConfig {
    let all = fragments();
    all[rng.gen_range(0..all.len())].clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn printed_sentences_parse_back(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sig = small_signature();
        let frag = frag_of(&mut rng);
        let s = random_sentence(&mut rng, &sig, &frag, 4);
        prop_assert_eq!(parse_sentence(&print_sentence(&s), &sig, &frag).unwrap(), s);
    }

    #[test]
    fn printed_trees_parse_back(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sig = small_signature();
        let frag = FragmentConfig::full();
        let shape = TreeShape { height: 3, max_children: 3, closed: rng.gen_bool(0.5) };
        let tr = random_tree(&mut rng, &sig, &frag, &shape, &[Action::rel("r"), Action::star(Action::rel("r"))]);
        prop_assert!(validate_tree(&tr, &frag).valid());
        prop_assert_eq!(parse_tree(&print_tree(&tr), &sig).unwrap(), tr);
    }

    #[test]
    fn conjunction_is_idempotent_and_commutative(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sig = small_signature();
        let frag = FragmentConfig::full();
        let a = random_sentence(&mut rng, &sig, &frag, 3);
        let b = random_sentence(&mut rng, &sig, &frag, 3);
        prop_assert_eq!(Sentence::and2(a.clone(), a.clone()), a.clone());
        prop_assert_eq!(Sentence::and2(a.clone(), b.clone()), Sentence::and2(b, a));
    }

    #[test]
    fn satisfaction_is_invariant_under_relabelling(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sig = small_signature();
        let s = random_sentence(&mut rng, &sig, &FragmentConfig::full(), 4);
        let p = random_pointed(&mut rng, &sig, 4);
        let perm: Vec<usize> = (0..p.model.len()).rev().collect();
        let q = pm(&permute_states(&p.model, &perm), perm[p.current]);
        prop_assert_eq!(satisfies(&p, &s).unwrap(), satisfies(&q, &s).unwrap());
    }

    #[test]
    fn witnesses_and_their_shifts_validate(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sig = small_signature();
        let frag = frag_of(&mut rng);
        let (l, r) = random_pair(&mut rng, &sig, 3);
        prop_assume!(omega_solve(&frag, &l, &r).unwrap().eloise_wins);
        let fam = extract_bisim_witness(&frag, &l, &r, 3).unwrap();
        let report = validate_bisim_family(&fam, &frag, &l.model, &r.model).unwrap();
        prop_assert!(report.valid(), "{:?}", report.clauses());
        if let Some(anchor) = fam.levels[1].iter().next() {
            let shifted = shift_family(&fam, anchor).unwrap();
            let (lx, _) = l.model.expand_fresh(anchor.left_tuple[0]);
            let (rx, _) = r.model.expand_fresh(anchor.right_tuple[0]);
            let report = validate_bisim_family(&shifted, &frag, &lx, &rx).unwrap();
            prop_assert!(report.valid(), "{:?}", report.clauses());
        }
    }

    #[test]
    fn full_fragment_witness_entries_are_partial_isomorphisms(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sig = small_signature();
        let frag = FragmentConfig::full();
        let (l, r) = random_pair(&mut rng, &sig, 3);
        prop_assume!(omega_solve(&frag, &l, &r).unwrap().eloise_wins);
        let fam = extract_bisim_witness(&frag, &l, &r, 2).unwrap();
        for e in fam.levels.iter().flatten() {
            let report = partial_iso_from_tuple(&l.model, &r.model, e).unwrap();
            prop_assert!(report.is_partial_isomorphism(), "{:?}", report);
        }
    }

    #[test]
    fn back_and_forth_implies_a_win(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sig = small_signature();
        let frag = frag_of(&mut rng);
        let (l, r) = random_pair(&mut rng, &sig, 4);
        if bf_related(&frag, &l, &r).unwrap() {
            prop_assert!(omega_solve(&frag, &l, &r).unwrap().eloise_wins);
        }
    }

    #[test]
    fn isomorphism_implies_win_implies_char_agreement(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sig = small_signature();
        let frag = FragmentConfig::ops_only([Op::Diamond, Op::At, Op::Store]);
        let (l, r) = random_pair(&mut rng, &sig, 3);
        let win = omega_solve(&frag, &l, &r).unwrap().eloise_wins;
        if find_isomorphism(&l, &r).is_some() {
            prop_assert!(win);
        }
        if win {
            let mut store = GameStore::new();
            for h in 1..=3 {
                let tr = complete_tree(&sig, &frag, h, &[Action::rel("r")]).unwrap();
                prop_assert_eq!(char_formula(&mut store, &tr, &l).unwrap(), char_formula(&mut store, &tr, &r).unwrap());
                prop_assert!(ef_solve(&tr, &l, &r).unwrap().eloise_wins);
            }
        }
    }
}
