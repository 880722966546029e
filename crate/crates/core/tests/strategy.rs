mod common;

use common::{combine, play, random_block, Condition};
use promptdelay::arena::Player;
use promptdelay::logic::{eval, LassoWord, Letter};
use promptdelay::strategy::{decide, verify, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(inputs: &'static [&'static str], outputs: &'static [&'static str], text: &'static str) -> (Condition, Verdict) {
    let c = Condition { inputs, outputs, text };
    let v = decide(&c.formula(), &c.partition()).unwrap();
    (c, v)
}

#[test]
fn replay_is_deterministic() {
    let (_, v) = verdict(&["q"], &["r"], "G (q -> FP r)");
    let m = v.strategy.as_ref().unwrap().strip();
    let d = m.block_length();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let blocks: Vec<Vec<Letter>> = (0..20).map(|_| random_block(&mut rng, m.input_letters(), d)).collect();
    let run = || {
        let mut s = m.initial();
        let mut outs = Vec::new();
        for b in &blocks {
            let (next, out) = m.step(&s, b).unwrap();
            outs.push(out);
            s = next;
        }
        outs
    };
    let first = run();
    assert!(first[0].is_none());
    assert!(first[1..].iter().all(|o| o.as_ref().map(Vec::len) == Some(d)));
    assert_eq!(first, run());
    // output letters never mention the coloring proposition once stripped
    assert!(first[1..].iter().flatten().flatten().all(|b| b.0 < m.output_letters()));
}

#[test]
fn wrong_block_length_is_rejected() {
    let (_, v) = verdict(&["q"], &["r"], "G (q -> X r)");
    let m = v.strategy.unwrap();
    let short = vec![Letter(0); m.block_length() - 1];
    assert!(m.step(&m.initial(), &short).is_err());
}

/// Every play against a random eventually periodic input satisfies the
/// condition with the reported bound.
fn plays_satisfy(inputs: &'static [&'static str], outputs: &'static [&'static str], text: &'static str, seed: u64) {
    let (c, v) = verdict(inputs, outputs, text);
    assert_eq!(v.winner, Player::O, "{text}");
    let m = v.strategy.as_ref().unwrap().strip();
    let alphabet = c.partition().alphabet();
    let f = c.formula();
    let k = v.k.unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..40 {
        let d = m.block_length();
        let prefix: Vec<_> = (0..rng.gen_range(0..3)).map(|_| random_block(&mut rng, m.input_letters(), d)).collect();
        let cycle: Vec<_> = (0..rng.gen_range(1..3)).map(|_| random_block(&mut rng, m.input_letters(), d)).collect();
        let w = play(&m, &prefix, &cycle);
        assert!(eval(&w, &alphabet, 0, k, &f), "{text} fails on {}", w.render(&alphabet));
    }
}

#[test]
fn request_response_plays_are_prompt() {
    plays_satisfy(&["q"], &["r"], "G (q -> FP r)", 1);
}

#[test]
fn prediction_plays_are_correct() {
    plays_satisfy(&["q"], &["r"], "G (r <-> X q)", 2);
    plays_satisfy(&["q", "s"], &["r", "t"], "G (r <-> X s) & G (t <-> X q)", 3);
}

#[test]
fn mixed_plays() {
    plays_satisfy(&["q"], &["r"], "FP r & G (q -> FP !r)", 4);
    plays_satisfy(&["q"], &["r"], "G F q -> G F r", 5);
}

#[test]
fn corrupted_strategy_yields_a_replayable_counterexample() {
    let (_, v) = verdict(&["q"], &["r"], "G (r <-> X q)");
    let m = v.strategy.as_ref().unwrap();
    let dpa = &v.solved.dpa;
    let k = v.internal_k.unwrap();
    let a = m.abstraction();
    let inputs = a.tracking().inputs();

    // answering with the complemented r bit
    let bad = m.with_flipped_outputs(1).unwrap();
    let report = verify(&bad, dpa, k).unwrap();
    assert!(!report.passed);
    assert!(!report.even_cycles);
    let cx = report.counterexample.expect("a failing report carries a counterexample");
    let d = bad.block_length();
    assert_eq!(cx.input_prefix.len() % d, 0);
    assert_eq!(cx.input_cycle.len() % d, 0);
    assert!(!cx.input_cycle.is_empty());
    assert_eq!(cx.input_prefix.len(), cx.output_prefix.len());
    assert_eq!(cx.input_cycle.len(), cx.output_cycle.len());

    // the strategy itself produces the reported outputs
    let to_blocks = |xs: &[u32]| -> Vec<Vec<Letter>> { xs.chunks(d).map(|c| c.iter().map(|&x| Letter(x)).collect()).collect() };
    let replayed = play(&bad, &to_blocks(&cx.input_prefix), &to_blocks(&cx.input_cycle));
    let letters = |ins: &[u32], outs: &[u32]| -> Vec<Letter> {
        ins.iter().zip(outs).map(|(&a, &b)| combine(Letter(a), Letter(b), inputs)).collect()
    };
    let reported = LassoWord::new(
        letters(&cx.input_prefix, &cx.output_prefix),
        letters(&cx.input_cycle, &cx.output_cycle),
    )
    .unwrap();
    assert!(replayed.same_word(&reported));
    // and the automaton rejects the play
    assert!(!dpa.accepts(&reported).unwrap());
    // the original strategy wins against the same inputs
    let good = play(m, &to_blocks(&cx.input_prefix), &to_blocks(&cx.input_cycle));
    assert!(dpa.accepts(&good).unwrap());
}
