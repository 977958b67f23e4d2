//! Brute-force ground truth: enumerate computations depth-first, evaluate
//! behaviours through the matrix representation, measure valuedness and
//! ambiguity at a bounded length. Deliberately simple; every construction in
//! the crate is checked against this module.

use std::collections::BTreeSet;

use crate::error::Error;
use crate::machine::{
    count_matrix, output_matrix, Automaton, Computation, Label, Letter, Machine, NAutomaton,
    Transducer, Word,
};
use crate::order::TransitionOrder;

#[derive(Clone, Copy, Debug)]
pub struct OracleOptions {
    /// Hard cap on explored partial computations per enumeration.
    pub computation_cap: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            computation_cap: 1_000_000,
        }
    }
}

/// All computations of `m` labelled by `u` on the input tape, starting at an
/// initial state; `successful_only` restricts to those ending in a final
/// state. Results are in ascending lexicographic order: initial states in
/// initial order, transitions within a class in order rank.
pub fn enumerate_computations<L: Label>(
    m: &Machine<L>,
    u: &Word,
    order: &TransitionOrder,
    successful_only: bool,
    opts: &OracleOptions,
) -> Result<Vec<Computation>, Error> {
    // Out-transitions per (state, position letter), sorted by order rank.
    let mut adj: Vec<Vec<TransStep>> = (0..m.states.len()).map(|_| Vec::new()).collect();
    for (i, t) in m.transitions.iter().enumerate() {
        adj[t.origin].push(TransStep {
            id: i,
            letter: t.label.input(),
            end: t.end,
        });
    }
    for steps in &mut adj {
        steps.sort_by_key(|s| (s.letter, order.rank(s.id)));
    }

    let mut out = Vec::new();
    let mut explored = 0usize;
    let mut stack: Vec<usize> = Vec::new();
    for &start in &m.initials {
        dfs(
            m,
            &adj,
            u,
            0,
            start,
            &mut stack,
            successful_only,
            &mut out,
            &mut explored,
            opts,
        )?;
    }
    return Ok(out);

    struct TransStep {
        id: usize,
        letter: Letter,
        end: usize,
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs<L: Label>(
        m: &Machine<L>,
        adj: &[Vec<TransStep>],
        u: &Word,
        pos: usize,
        at: usize,
        stack: &mut Vec<usize>,
        successful_only: bool,
        out: &mut Vec<Computation>,
        explored: &mut usize,
        opts: &OracleOptions,
    ) -> Result<(), Error> {
        *explored += 1;
        if *explored > opts.computation_cap {
            return Err(Error::ComputationCap {
                cap: opts.computation_cap,
            });
        }
        if pos == u.len() {
            if !successful_only || m.finals.contains(&at) {
                let origin = if stack.is_empty() {
                    at
                } else {
                    m.transitions[stack[0]].origin
                };
                out.push(Computation::new(origin, stack.clone()));
            }
            return Ok(());
        }
        let letter = u.letters()[pos];
        for step in &adj[at] {
            if step.letter != letter {
                continue;
            }
            stack.push(step.id);
            dfs(
                m,
                adj,
                u,
                pos + 1,
                step.end,
                stack,
                successful_only,
                out,
                explored,
                opts,
            )?;
            stack.pop();
        }
        Ok(())
    }
}

/// Exactly the successful computations labelled by `u`, in ascending
/// lexicographic order.
pub fn enumerate_successful<L: Label>(
    m: &Machine<L>,
    u: &Word,
    order: &TransitionOrder,
    opts: &OracleOptions,
) -> Result<Vec<Computation>, Error> {
    enumerate_computations(m, u, order, true, opts)
}

fn indicator_row<L: Label>(m: &Machine<L>) -> Vec<u64> {
    let mut v = vec![0u64; m.states.len()];
    for &i in &m.initials {
        v[i] = 1;
    }
    v
}

/// Value of the realised ℕ-series on `u`: the multiplicities of the
/// successful computations, summed via the matrix representation.
pub fn eval_series(m: &NAutomaton, u: &Word) -> u64 {
    let mut v = indicator_row(m);
    for &letter in u.letters() {
        let mat = count_matrix(m, letter);
        let mut next = vec![0u64; v.len()];
        for (r, &vr) in v.iter().enumerate() {
            if vr == 0 {
                continue;
            }
            for (s, &c) in mat[r].iter().enumerate() {
                next[s] = next[s].saturating_add(vr.saturating_mul(c));
            }
        }
        v = next;
    }
    m.finals
        .iter()
        .map(|&q| v[q])
        .fold(0u64, u64::saturating_add)
}

/// Image of `u` by the transducer: the set of outputs of successful
/// computations reading `u`, computed via the set-matrix representation.
pub fn eval_relation(m: &Transducer, u: &Word) -> BTreeSet<Word> {
    let mut v: Vec<BTreeSet<Word>> = vec![BTreeSet::new(); m.states.len()];
    for &i in &m.initials {
        v[i].insert(Word::empty());
    }
    for &letter in u.letters() {
        let mat = output_matrix(m, letter);
        let mut next: Vec<BTreeSet<Word>> = vec![BTreeSet::new(); v.len()];
        for (r, ws) in v.iter().enumerate() {
            if ws.is_empty() {
                continue;
            }
            for (s, outs) in mat[r].iter().enumerate() {
                for w in ws {
                    for o in outs {
                        next[s].insert(w.concat(o));
                    }
                }
            }
        }
        v = next;
    }
    let mut image = BTreeSet::new();
    for &q in &m.finals {
        image.extend(v[q].iter().cloned());
    }
    image
}

/// Whether the automaton accepts `u` (path counting through the matrices).
pub fn accepts(m: &Automaton, u: &Word) -> bool {
    count_paths(m, u) > 0
}

/// Number of successful computations labelled by `u`. For weighted machines
/// this counts computations of the split form, i.e. multiplicities are
/// summed, which is the same arithmetic.
pub fn count_paths<L: Label>(m: &Machine<L>, u: &Word) -> u64 {
    let mut v = indicator_row(m);
    for &letter in u.letters() {
        let mat = count_matrix(m, letter);
        let mut next = vec![0u64; v.len()];
        for (r, &vr) in v.iter().enumerate() {
            if vr == 0 {
                continue;
            }
            for (s, &c) in mat[r].iter().enumerate() {
                next[s] = next[s].saturating_add(vr.saturating_mul(c));
            }
        }
        v = next;
    }
    m.finals
        .iter()
        .map(|&q| v[q])
        .fold(0u64, u64::saturating_add)
}

/// All words over `alphabet` of length at most `max_len`, in shortlex order.
pub fn words_up_to(alphabet: &BTreeSet<Letter>, max_len: usize) -> Vec<Word> {
    let letters: Vec<Letter> = alphabet.iter().copied().collect();
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &letters {
                let mut w2 = w.clone();
                w2.push(l);
                next.push(w2);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
        if layer.is_empty() {
            break;
        }
    }
    out
}

/// Maximum of a per-word measure with the first word attaining it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxReport {
    pub max: u64,
    pub witness: Word,
}

/// Largest image cardinality over all inputs of length ≤ `max_len`, with the
/// first witness in shortlex order. A bounded measurement, never a proof of
/// a global bound.
pub fn valuedness_up_to(m: &Transducer, max_len: usize) -> MaxReport {
    let mut report = MaxReport {
        max: 0,
        witness: Word::empty(),
    };
    for u in words_up_to(&m.alphabet, max_len) {
        let size = eval_relation(m, &u).len() as u64;
        if size > report.max {
            report = MaxReport {
                max: size,
                witness: u,
            };
        }
    }
    report
}

/// Largest successful-computation count over all inputs of length ≤
/// `max_len`, with the first witness in shortlex order.
pub fn ambiguity_up_to<L: Label>(m: &Machine<L>, max_len: usize) -> MaxReport {
    let mut report = MaxReport {
        max: 0,
        witness: Word::empty(),
    };
    for u in words_up_to(&m.alphabet, max_len) {
        let count = count_paths(m, &u);
        if count > report.max {
            report = MaxReport {
                max: count,
                witness: u,
            };
        }
    }
    report
}

/// Value of the skimmed series s ⊖ k on `u`: s(u) − k when s(u) > k, else 0.
pub fn skim_value(m: &NAutomaton, k: u64, u: &Word) -> u64 {
    eval_series(m, u).saturating_sub(k)
}

/// First word (shortlex, over the union of the alphabets) where the two
/// series differ; `None` when they agree up to `max_len`.
pub fn series_counterexample(a: &NAutomaton, b: &NAutomaton, max_len: usize) -> Option<Word> {
    let alphabet: BTreeSet<Letter> = a.alphabet.union(&b.alphabet).copied().collect();
    words_up_to(&alphabet, max_len)
        .into_iter()
        .find(|u| eval_series(a, u) != eval_series(b, u))
}

/// First input where the two relations differ; `None` when equivalent up to
/// `max_len`.
pub fn relation_counterexample(a: &Transducer, b: &Transducer, max_len: usize) -> Option<Word> {
    let alphabet: BTreeSet<Letter> = a.alphabet.union(&b.alphabet).copied().collect();
    words_up_to(&alphabet, max_len)
        .into_iter()
        .find(|u| eval_relation(a, u) != eval_relation(b, u))
}

/// First word accepted by exactly one of the two automata; `None` when the
/// languages agree up to `max_len`.
pub fn language_counterexample(a: &Automaton, b: &Automaton, max_len: usize) -> Option<Word> {
    let alphabet: BTreeSet<Letter> = a.alphabet.union(&b.alphabet).copied().collect();
    words_up_to(&alphabet, max_len)
        .into_iter()
        .find(|u| accepts(a, u) != accepts(b, u))
}
