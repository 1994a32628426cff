//! Decisions made through theories agree with brute-force evaluation.

mod common;

use chaincalc::chain::{oracle_eval, parse_chain_expr, Assignment, PosSet, Word};
use chaincalc::formula::{desugar, parse_formula};
use chaincalc::theory::{ColumnMap, TheoryEngine};
use chaincalc::Guards;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random formula text over one predicate. Point variables are `p0, p1, ..`
/// and set variables `S0, S1, ..`, numbered by binding depth; `free_set`
/// adds a free set variable `X`.
fn random_formula(rng: &mut ChaCha8Rng, depth: usize, points: usize, sets: usize, free_set: bool) -> String {
    let mut set_terms: Vec<String> = vec!["A0".into()];
    set_terms.extend((0..sets).map(|i| format!("S{i}")));
    if free_set {
        set_terms.push("X".into());
    }
    let pick = |rng: &mut ChaCha8Rng, v: &[String]| v[rng.random_range(0..v.len())].clone();
    let roll = rng.random_range(0..10);
    if depth > 0 && roll < 4 {
        let body_point = rng.random_bool(0.6);
        let q = if rng.random_bool(0.5) { "ex" } else { "all" };
        return if body_point {
            let body = random_formula(rng, depth - 1, points + 1, sets, free_set);
            format!("{q} p{points}. ({body})")
        } else {
            let body = random_formula(rng, depth - 1, points, sets + 1, free_set);
            format!("{q}2 S{sets}. ({body})")
        };
    }
    if (4..7).contains(&roll) {
        let a = random_formula(rng, depth, points, sets, free_set);
        let b = random_formula(rng, depth, points, sets, free_set);
        let op = ["&", "|", "->", "<->"][rng.random_range(0..4)];
        return format!("({a}) {op} ({b})");
    }
    if roll == 7 || roll < 4 && rng.random_bool(0.3) {
        let a = random_formula(rng, depth, points, sets, free_set);
        return format!("~({a})");
    }
    let pv: Vec<String> = (0..points).map(|i| format!("p{i}")).collect();
    match (pv.is_empty(), rng.random_range(0..4)) {
        (false, 0) => format!("{} < {}", pick(rng, &pv), pick(rng, &pv)),
        (false, 1) => format!("{} = {}", pick(rng, &pv), pick(rng, &pv)),
        (false, _) => format!("{} in {}", pick(rng, &pv), pick(rng, &set_terms)),
        (true, 0) => format!("sing({})", pick(rng, &set_terms)),
        (true, _) => format!("{} sub {}", pick(rng, &set_terms), pick(rng, &set_terms)),
    }
}

#[test]
fn fixed_pool_on_short_words() {
    let pool = common::sentences();
    let mut e = TheoryEngine::default();
    let g = Guards::default();
    for w in Word::all_up_to(1, 5) {
        let t = e.theory_of_word(&w, 2).unwrap();
        for (f, text) in pool.iter().zip(common::SENTENCES) {
            let expected = oracle_eval(&w, f, &Assignment::new(), &g).unwrap();
            assert_eq!(e.decide(f, t).unwrap(), expected, "`{text}` on {w}");
        }
    }
}

#[test]
fn composed_theories_decide_like_the_word() {
    let g = Guards::default();
    let mut e = TheoryEngine::default();
    let pool = common::sentences();
    for text in ["w:0110 + w:10", "w:1 + w:0 + w:0 + w:1 + w:1", "(w:01 + w:1) + w:000"] {
        let expr = parse_chain_expr(text, 1).unwrap();
        let w = expr.as_finite().unwrap();
        let t = e.theory_of_expr(&expr, 2).unwrap();
        for (f, s) in pool.iter().zip(common::SENTENCES) {
            let expected = oracle_eval(&w, f, &Assignment::new(), &g).unwrap();
            assert_eq!(e.decide(f, t).unwrap(), expected, "`{s}` on {text}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn random_sentences(seed in any::<u64>(), bits in "[01]{0,5}", depth in 0usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let text = random_formula(&mut rng, depth, 0, 0, false);
        let f = parse_formula(&text, 1).unwrap();
        let w = Word::from_bits(&bits, 1).unwrap();
        let mut e = TheoryEngine::default();
        let t = e.theory_of_word(&w, f.depth()).unwrap();
        let expected = oracle_eval(&w, &f, &Assignment::new(), &Guards::default()).unwrap();
        prop_assert_eq!(e.decide(&f, t).unwrap(), expected, "{}", text);
    }

    #[test]
    fn random_formulas_with_a_free_set(seed in any::<u64>(), bits in "[01]{1,5}", mask in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let text = random_formula(&mut rng, 1, 0, 0, true);
        let f = parse_formula(&text, 1).unwrap();
        let w = Word::from_bits(&bits, 1).unwrap();
        let x = PosSet(mask & ((1 << w.len()) - 1));
        let mut e = TheoryEngine::default();
        let t = e.theory_of_word_with(&w, &[x], 1).unwrap();
        let columns = ColumnMap { vars: [("X".to_string(), 1)].into(), ..ColumnMap::default() };
        let expected = oracle_eval(&w, &f, &Assignment::new().set("X", x), &Guards::default()).unwrap();
        prop_assert_eq!(e.decide_with(&f, t, &columns).unwrap(), expected, "{}", text);
    }

    #[test]
    fn desugaring_preserves_truth(seed in any::<u64>(), bits in "[01]{0,4}") {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let text = random_formula(&mut rng, 2, 0, 0, false);
        let f = parse_formula(&text, 1).unwrap();
        let w = Word::from_bits(&bits, 1).unwrap();
        let g = Guards::default();
        let direct = oracle_eval(&w, &f, &Assignment::new(), &g).unwrap();
        let core = chaincalc::chain::oracle_eval_core(&w, &desugar(&f), &Assignment::new(), &g).unwrap();
        prop_assert_eq!(direct, core, "{}", text);
    }
}
