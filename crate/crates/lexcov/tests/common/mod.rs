//! Shared fixtures and seeded machine generators for the integration tests.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lexcov::format::{parse_machine, AnyMachine};
use lexcov::machine::{IoLabel, Letter, NAutomaton, NLabel, Transducer, Word};
use lexcov::order::OrderSpec;

pub const TWO_VALUED_TEXT: &str = include_str!("../fixtures/t.trans");
pub const BINARY_COUNTER_TEXT: &str = include_str!("../fixtures/c1.naut");
pub const TWO_LETTER_SOURCE_TEXT: &str = include_str!("../fixtures/s.trans");

/// The 2-valued transducer with ε ↦ ε and aⁿ ↦ {bⁿ, bⁿ⁺¹}.
pub fn two_valued() -> Transducer {
    match parse_machine(TWO_VALUED_TEXT).unwrap() {
        AnyMachine::Transducer(t) => t,
        _ => unreachable!(),
    }
}

/// The ℕ-automaton counting binary values (a = 0, b = 1).
pub fn binary_counter() -> NAutomaton {
    match parse_machine(BINARY_COUNTER_TEXT).unwrap() {
        AnyMachine::NAutomaton(n) => n,
        _ => unreachable!(),
    }
}

/// The source of the morphic fixture: the 2-valued transducer with the
/// p → q output changed to c² over {b, c}.
pub fn two_letter_source() -> Transducer {
    match parse_machine(TWO_LETTER_SOURCE_TEXT).unwrap() {
        AnyMachine::Transducer(t) => t,
        _ => unreachable!(),
    }
}

/// Independent oracle for the counter fixture: the binary value of u.
pub fn binary_value(u: &Word) -> u64 {
    u.letters()
        .iter()
        .fold(0u64, |acc, l| 2 * acc + if l.0 == 'b' { 1 } else { 0 })
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn pick_letters(rng: &mut ChaCha8Rng, pool: &[char], max: usize) -> Vec<Letter> {
    let count = rng.gen_range(1..=max.min(pool.len()));
    pool[..count].iter().map(|&c| Letter(c)).collect()
}

fn pick_initials(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let count = rng.gen_range(1..=2.min(n));
    let first = rng.gen_range(0..n);
    let mut initials = vec![first];
    if count == 2 {
        let second = rng.gen_range(0..n);
        if second != first {
            initials.push(second);
        }
    }
    initials
}

/// A small random ℕ-automaton: up to `max_states` states, up to two input
/// letters, multiplicities in {1, 2}, one or two initial states.
pub fn random_nautomaton(rng: &mut ChaCha8Rng, max_states: usize) -> NAutomaton {
    let n = rng.gen_range(1..=max_states);
    let letters = pick_letters(rng, &['a', 'b'], 2);
    let mut m = NAutomaton::new("R");
    m.alphabet = letters.iter().copied().collect();
    for i in 0..n {
        m.add_state(format!("s{i}"));
    }
    let trans_count = rng.gen_range(0..=n + 3);
    for _ in 0..trans_count {
        let origin = rng.gen_range(0..n);
        let end = rng.gen_range(0..n);
        let letter = letters[rng.gen_range(0..letters.len())];
        let multiplicity = rng.gen_range(1..=2);
        m.add_transition(
            origin,
            NLabel {
                letter,
                multiplicity,
            },
            end,
        );
    }
    m.initials = pick_initials(rng, n);
    for q in 0..n {
        if rng.gen_bool(0.5) {
            m.finals.insert(q);
        }
    }
    m
}

/// A small random real-time transducer: up to `max_states` states, up to two
/// input and two output letters, outputs of length at most `max_out_len`.
pub fn random_transducer(
    rng: &mut ChaCha8Rng,
    max_states: usize,
    max_out_len: usize,
) -> Transducer {
    let n = rng.gen_range(1..=max_states);
    let inputs = pick_letters(rng, &['a', 'b'], 2);
    let outputs = pick_letters(rng, &['x', 'y'], 2);
    let mut m = Transducer::new("R");
    m.alphabet = inputs.iter().copied().collect();
    m.out_alphabet = outputs.iter().copied().collect();
    for i in 0..n {
        m.add_state(format!("s{i}"));
    }
    let trans_count = rng.gen_range(0..=n + 3);
    for _ in 0..trans_count {
        let origin = rng.gen_range(0..n);
        let end = rng.gen_range(0..n);
        let input = inputs[rng.gen_range(0..inputs.len())];
        let len = rng.gen_range(0..=max_out_len);
        let output = Word::from_letters((0..len).map(|_| outputs[rng.gen_range(0..outputs.len())]));
        m.add_transition(origin, IoLabel { input, output }, end);
    }
    m.initials = pick_initials(rng, n);
    for q in 0..n {
        if rng.gen_bool(0.5) {
            m.finals.insert(q);
        }
    }
    m
}

pub fn random_order(rng: &mut ChaCha8Rng) -> OrderSpec {
    if rng.gen_bool(0.5) {
        OrderSpec::File
    } else {
        OrderSpec::Reverse
    }
}
