//! Acceptance suite: one test per criterion, each printing a pass line with
//! its elapsed time. Run with `cargo test --test acceptance -- --nocapture`.

mod common;

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use lexcov::decompose::{cartesian_power, decompose_k_valued, morphic_decompose, DecomposeOptions};
use lexcov::delay::lag;
use lexcov::lagsep::{ambiguity_certificate, lag_separation, select_psi, LagSepOptions};
use lexcov::machine::{Letter, OutputMorphism, Word};
use lexcov::multiskim::{multi_skim, skim_layers, Count, SkimCovering, SkimOptions};
use lexcov::oracle::{
    self, count_paths, enumerate_computations, enumerate_successful, eval_relation, eval_series,
    relation_counterexample, words_up_to, OracleOptions,
};
use lexcov::order::{lex_compare, CompOrdering, OrderSpec, TransitionOrder};
use lexcov::Computation;

fn finish(criterion: &str, started: Instant, limit: Duration) {
    let elapsed = started.elapsed();
    println!(
        "[acceptance] {criterion}: pass ({} ms, limit {} ms)",
        elapsed.as_millis(),
        limit.as_millis()
    );
    assert!(
        elapsed < limit,
        "{criterion} exceeded its time limit: {elapsed:?} > {limit:?}"
    );
}

#[test]
fn criterion_01_binary_value_series() {
    let started = Instant::now();
    let c1 = binary_counter();
    let words = words_up_to(&c1.alphabet, 10);
    assert_eq!(words.len(), 2047);
    for u in &words {
        assert_eq!(eval_series(&c1, u), binary_value(u), "word {u}");
    }
    finish(
        "criterion 1 (binary-value series)",
        started,
        Duration::from_secs(1),
    );
}

/// The transition table of a skim covering as (origin name, letter,
/// projected base transition, end name) rows, in construction order.
fn skim_rows(cov: &SkimCovering) -> Vec<(String, char, usize, String)> {
    cov.covering
        .transitions
        .iter()
        .enumerate()
        .map(|(i, t)| {
            (
                cov.covering.states[t.origin].clone(),
                t.label.letter.0,
                cov.projection.trans_map[i],
                cov.covering.states[t.end].clone(),
            )
        })
        .collect()
}

fn rows(expected: &[(&str, char, usize, &str)]) -> Vec<(String, char, usize, String)> {
    expected
        .iter()
        .map(|(p, a, e, q)| (p.to_string(), *a, *e, q.to_string()))
        .collect()
}

#[test]
fn criterion_02_multi_skim_fixture() {
    let started = Instant::now();
    let c1 = binary_counter();

    // Loop-first order: 5 reachable states.
    let cov = multi_skim(&c1, 3, &SkimOptions::default()).unwrap();
    assert_eq!(
        cov.covering.states,
        vec!["p__0.0", "q__1.0", "q__1.1", "q__1.2", "q__1.w"]
    );
    // Split transitions: 0 p-a-p, 1 p-b-p, 2 p-b-q, 3/4 q-a-q, 5/6 q-b-q.
    let expected = rows(&[
        ("p__0.0", 'a', 0, "p__0.0"),
        ("p__0.0", 'b', 1, "p__0.0"),
        ("p__0.0", 'b', 2, "q__1.0"),
        ("q__1.0", 'a', 3, "q__1.0"),
        ("q__1.0", 'a', 4, "q__1.1"),
        ("q__1.0", 'b', 5, "q__1.1"),
        ("q__1.0", 'b', 6, "q__1.2"),
        ("q__1.1", 'a', 3, "q__1.2"),
        ("q__1.1", 'a', 4, "q__1.w"),
        ("q__1.1", 'b', 5, "q__1.w"),
        ("q__1.1", 'b', 6, "q__1.w"),
        ("q__1.2", 'a', 3, "q__1.w"),
        ("q__1.2", 'a', 4, "q__1.w"),
        ("q__1.2", 'b', 5, "q__1.w"),
        ("q__1.2", 'b', 6, "q__1.w"),
        ("q__1.w", 'a', 3, "q__1.w"),
        ("q__1.w", 'a', 4, "q__1.w"),
        ("q__1.w", 'b', 5, "q__1.w"),
        ("q__1.w", 'b', 6, "q__1.w"),
    ]);
    assert_eq!(skim_rows(&cov), expected);

    // Opposite order on every class: 8 reachable states.
    let opts = SkimOptions {
        order: OrderSpec::Reverse,
        ..Default::default()
    };
    let cov_rev = multi_skim(&c1, 3, &opts).unwrap();
    assert_eq!(
        cov_rev.covering.states,
        vec!["p__0.0", "p__0.1", "q__0.0", "p__0.2", "p__0.w", "q__0.2", "q__0.1", "q__0.w"]
    );
    let expected_rev = rows(&[
        ("p__0.0", 'a', 0, "p__0.0"),
        ("p__0.0", 'b', 1, "p__0.1"),
        ("p__0.0", 'b', 2, "q__0.0"),
        ("p__0.1", 'a', 0, "p__0.2"),
        ("p__0.1", 'b', 1, "p__0.w"),
        ("p__0.1", 'b', 2, "q__0.2"),
        ("q__0.0", 'a', 3, "q__0.1"),
        ("q__0.0", 'a', 4, "q__0.0"),
        ("q__0.0", 'b', 5, "q__0.1"),
        ("q__0.0", 'b', 6, "q__0.0"),
        ("p__0.2", 'a', 0, "p__0.w"),
        ("p__0.2", 'b', 1, "p__0.w"),
        ("p__0.2", 'b', 2, "q__0.w"),
        ("p__0.w", 'a', 0, "p__0.w"),
        ("p__0.w", 'b', 1, "p__0.w"),
        ("p__0.w", 'b', 2, "q__0.w"),
        ("q__0.2", 'a', 3, "q__0.w"),
        ("q__0.2", 'a', 4, "q__0.w"),
        ("q__0.2", 'b', 5, "q__0.w"),
        ("q__0.2", 'b', 6, "q__0.w"),
        ("q__0.1", 'a', 3, "q__0.w"),
        ("q__0.1", 'a', 4, "q__0.2"),
        ("q__0.1", 'b', 5, "q__0.w"),
        ("q__0.1", 'b', 6, "q__0.2"),
        ("q__0.w", 'a', 3, "q__0.w"),
        ("q__0.w", 'a', 4, "q__0.w"),
        ("q__0.w", 'b', 5, "q__0.w"),
        ("q__0.w", 'b', 6, "q__0.w"),
    ]);
    assert_eq!(skim_rows(&cov_rev), expected_rev);
    finish(
        "criterion 2 (multi-skim fixture)",
        started,
        Duration::from_secs(1),
    );
}

#[test]
fn criterion_03_layers_at_desk_scale() {
    let started = Instant::now();
    let c1 = binary_counter();
    let cov = multi_skim(&c1, 3, &SkimOptions::default()).unwrap();
    let layers = skim_layers(&cov).unwrap();

    // One enumeration of the covering per word, classified by the vector
    // sum of the end state.
    let class_of: Vec<Option<usize>> = cov
        .vectors
        .iter()
        .map(|(base, v)| {
            if !cov.projection.target.finals.contains(base) {
                return None;
            }
            Some(
                match v.sum_at(cov.projection.target.finals.iter().copied(), 3) {
                    Count::Fin(i) => i as usize,
                    Count::Omega => 3,
                },
            )
        })
        .collect();
    for (i, layer) in layers.layers.iter().enumerate() {
        for (q, class) in std::iter::zip(0.., &class_of) {
            assert_eq!(layer.finals.contains(&q), *class == Some(i));
        }
    }

    let order = TransitionOrder::default_order(&cov.covering);
    let opts = OracleOptions::default();
    for u in words_up_to(&c1.alphabet, 10) {
        let mut per_class = [0u64; 4];
        for c in enumerate_successful(&cov.covering, &u, &order, &opts).unwrap() {
            let end = cov.covering.computation_end(&c).unwrap();
            per_class[class_of[end].expect("successful computations end over a final state")] += 1;
        }
        let value = binary_value(&u);
        for (i, &count) in per_class.iter().take(3).enumerate() {
            assert!(count <= 1, "layer {i} is ambiguous on {u}");
            assert_eq!(count == 1, value > i as u64, "layer {i} membership on {u}");
        }
        assert_eq!(
            per_class[3],
            value.saturating_sub(3),
            "remainder count on {u}"
        );
    }
    finish(
        "criterion 3 (layers and remainder)",
        started,
        Duration::from_secs(5),
    );
}

#[test]
fn criterion_04_size_bound_on_random_machines() {
    let started = Instant::now();
    let mut violations = 0;
    for i in 0..200u64 {
        let mut rng = seeded(1000 + i);
        let a = random_nautomaton(&mut rng, 4);
        let k = (i % 4) + 1;
        let opts = SkimOptions {
            order: random_order(&mut rng),
            ..Default::default()
        };
        let cov = multi_skim(&a, k, &opts).unwrap();
        let n = a.states.len() as u64;
        let bound = n * (k + 1).pow(n as u32);
        if cov.covering.states.len() as u64 > bound {
            violations += 1;
            eprintln!(
                "machine {i}: {} states > bound {bound}",
                cov.covering.states.len()
            );
        }
    }
    assert_eq!(violations, 0);
    finish(
        "criterion 4 (size bound, 200 machines)",
        started,
        Duration::from_secs(30),
    );
}

#[test]
fn criterion_05_lag_separation_fixture() {
    let started = Instant::now();
    let t = two_valued();
    let cov = lag_separation(&t, 1, &LagSepOptions::default()).unwrap();
    assert_eq!(
        cov.covering.states,
        vec!["p__{}", "q__{p:~b}", "p__{p:_;q:b}", "q__{p:~b;q:_}"]
    );
    let got: Vec<(usize, usize, usize)> = cov
        .covering
        .transitions
        .iter()
        .enumerate()
        .map(|(i, tr)| (tr.origin, cov.projection.trans_map[i], tr.end))
        .collect();
    assert_eq!(
        got,
        vec![
            (0, 0, 0),
            (0, 1, 1),
            (1, 2, 2),
            (2, 0, 2),
            (2, 1, 3),
            (3, 2, 2)
        ]
    );

    let (psi, _) = select_psi(&cov).unwrap();
    let psi_finals: Vec<&str> = psi.finals.iter().map(|&q| psi.states[q].as_str()).collect();
    assert_eq!(psi_finals, vec!["p__{}", "q__{p:~b}"]);
    let (selected, _, _) = psi.trim_parts();
    assert_eq!(selected.states, vec!["p__{}", "q__{p:~b}"]);

    assert!(ambiguity_certificate(&selected, 2, 12));
    assert_eq!(relation_counterexample(&t, &selected, 12), None);
    finish(
        "criterion 5 (lag-separation fixture)",
        started,
        Duration::from_secs(1),
    );
}

#[test]
fn criterion_06_decomposition_at_desk_scale() {
    let started = Instant::now();
    let t = two_valued();
    let opts = DecomposeOptions {
        lag_bound: Some(1),
        check_len: 12,
        ..Default::default()
    };
    let dec = decompose_k_valued(&t, 2, &opts).unwrap();
    assert_eq!(dec.components.len(), 2);
    for n in 0..=12usize {
        let u = Word::repeated(Letter('a'), n);
        let low = eval_relation(&dec.components[0], &u);
        let high = eval_relation(&dec.components[1], &u);
        assert_eq!(
            low,
            BTreeSet::from([Word::repeated(Letter('b'), n)]),
            "component 0 on n={n}"
        );
        let expected_high: BTreeSet<Word> = if n == 0 {
            BTreeSet::new()
        } else {
            BTreeSet::from([Word::repeated(Letter('b'), n + 1)])
        };
        assert_eq!(high, expected_high, "component 1 on n={n}");
        let union: BTreeSet<Word> = low.union(&high).cloned().collect();
        assert_eq!(union, eval_relation(&t, &u), "union on n={n}");
        assert!(count_paths(&dec.components[0], &u) <= 1);
        assert!(count_paths(&dec.components[1], &u) <= 1);
    }
    finish(
        "criterion 6 (two-component decomposition)",
        started,
        Duration::from_secs(2),
    );
}

fn project(proj: &lexcov::Morphism<lexcov::NLabel>, c: &Computation) -> Computation {
    Computation::new(
        proj.state_map[c.origin],
        c.transitions.iter().map(|&t| proj.trans_map[t]).collect(),
    )
}

/// Sanity-check that an enumeration really is ascending under lex_compare,
/// so list ranks below equal "number of strictly smaller computations".
fn assert_sorted<L: lexcov::machine::Label>(
    m: &lexcov::Machine<L>,
    order: &TransitionOrder,
    comps: &[Computation],
) {
    for pair in comps.windows(2) {
        assert_eq!(
            lex_compare(m, order, &pair[0], &pair[1]).unwrap(),
            CompOrdering::Less,
            "enumeration out of lexicographic order"
        );
    }
}

/// Lag and final lead-or-delay of two same-length step sequences, computed
/// from the cumulative output lengths: all equal-length prefixes of a
/// prefix-comparable pair are prefix-comparable, and the prefix lead-or-
/// delay length is the difference of the cumulative lengths. `None` when the
/// full outputs are not prefixes of a common word.
fn lag_and_ld(
    full_a: &Word,
    cum_a: &[usize],
    full_b: &Word,
    cum_b: &[usize],
) -> Option<(u64, lexcov::delay::Delta)> {
    use lexcov::delay::Delta;
    let min = full_a.len().min(full_b.len());
    if full_a.letters()[..min] != full_b.letters()[..min] {
        return None;
    }
    let mut lag = 0u64;
    for (&a, &b) in cum_a.iter().zip(cum_b) {
        lag = lag.max(a.abs_diff(b) as u64);
    }
    let ld = if full_a.len() <= full_b.len() {
        Delta::Pos(Word::from_letters(
            full_b.letters()[full_a.len()..].iter().copied(),
        ))
    } else {
        Delta::Neg(Word::from_letters(
            full_a.letters()[full_b.len()..].iter().copied(),
        ))
    };
    Some((lag, ld))
}

#[test]
fn criterion_07_vector_semantics_property_suites() {
    let started = Instant::now();
    let opts = OracleOptions::default();

    // Multi-skim: every reachable vector counts the strictly smaller
    // same-label computations into each state, saturated at ω.
    for i in 0..100u64 {
        let mut rng = seeded(2000 + i);
        let a = random_nautomaton(&mut rng, 3);
        let k = (i % 3) + 1;
        let spec = random_order(&mut rng);
        let cov = multi_skim(
            &a,
            k,
            &SkimOptions {
                order: spec.clone(),
                ..Default::default()
            },
        )
        .unwrap();
        let split = &cov.projection.target;
        let split_order = TransitionOrder::new(split, &spec).unwrap();
        let cov_order = TransitionOrder::default_order(&cov.covering);
        let n = split.states.len();
        for u in words_up_to(&a.alphabet, 5) {
            let base_comps = enumerate_computations(split, &u, &split_order, false, &opts).unwrap();
            assert_sorted(split, &split_order, &base_comps);
            // prefix_counts[r][q] = computations among the first r ending at q.
            let mut prefix_counts = Vec::with_capacity(base_comps.len() + 1);
            let mut acc = vec![0u64; n];
            prefix_counts.push(acc.clone());
            let mut rank = std::collections::HashMap::new();
            for (r, d) in base_comps.iter().enumerate() {
                rank.insert(d.clone(), r);
                acc[split.computation_end(d).unwrap()] += 1;
                prefix_counts.push(acc.clone());
            }
            for c in enumerate_computations(&cov.covering, &u, &cov_order, false, &opts).unwrap() {
                let end = cov.covering.computation_end(&c).unwrap();
                let (_, vector) = &cov.vectors[end];
                let image = project(&cov.projection, &c);
                let r = rank[&image];
                for (q, &count) in prefix_counts[r].iter().enumerate() {
                    assert_eq!(
                        vector.entry(q),
                        Count::saturate(count, k),
                        "machine {i}, word {u}, state {q}"
                    );
                }
            }
        }
    }

    // Lag separation: every reachable vector stores the lead-or-delay
    // against the strictly smaller prefix-comparable computations within
    // the lag bound.
    for i in 0..100u64 {
        let mut rng = seeded(3000 + i);
        let t = random_transducer(&mut rng, 3, 2);
        let n_bound = i % 3;
        let spec = random_order(&mut rng);
        let cov = lag_separation(
            &t,
            n_bound,
            &LagSepOptions {
                order: spec.clone(),
                ..Default::default()
            },
        )
        .unwrap();
        let base_order = TransitionOrder::new(&t, &spec).unwrap();
        let cov_order = TransitionOrder::default_order(&cov.covering);
        let n = t.states.len();
        for u in words_up_to(&t.alphabet, 5) {
            let base_comps = enumerate_computations(&t, &u, &base_order, false, &opts).unwrap();
            assert_sorted(&t, &base_order, &base_comps);
            let ends: Vec<usize> = base_comps
                .iter()
                .map(|d| t.computation_end(d).unwrap())
                .collect();
            let outputs: Vec<Word> = base_comps
                .iter()
                .map(|d| t.computation_output(d).unwrap())
                .collect();
            let cumlens: Vec<Vec<usize>> = base_comps
                .iter()
                .map(|d| {
                    let mut acc = 0;
                    t.computation_output_steps(d)
                        .unwrap()
                        .iter()
                        .map(|w| {
                            acc += w.len();
                            acc
                        })
                        .collect()
                })
                .collect();
            let mut rank = std::collections::HashMap::new();
            // expected[r] = vector collected against the computations below r.
            let mut expected: Vec<Vec<lexcov::delay::DeltaSet>> = Vec::new();
            for (r, d) in base_comps.iter().enumerate() {
                rank.insert(d.clone(), r);
                let mut v = vec![lexcov::delay::DeltaSet::new(); n];
                for j in 0..r {
                    if let Some((l, ld)) =
                        lag_and_ld(&outputs[r], &cumlens[r], &outputs[j], &cumlens[j])
                    {
                        if l <= n_bound {
                            v[ends[j]].insert(ld);
                        }
                    }
                }
                expected.push(v);
            }
            for c in enumerate_computations(&cov.covering, &u, &cov_order, false, &opts).unwrap() {
                let end = cov.covering.computation_end(&c).unwrap();
                let (_, vector) = &cov.vectors[end];
                let image = Computation::new(
                    cov.projection.state_map[c.origin],
                    c.transitions
                        .iter()
                        .map(|&x| cov.projection.trans_map[x])
                        .collect(),
                );
                let r = rank[&image];
                for (q, want) in expected[r].iter().enumerate() {
                    assert_eq!(vector.entry(q), want, "machine {i}, word {u}, state {q}");
                }
            }
        }
    }
    finish(
        "criterion 7 (vector semantics, 100+100 machines)",
        started,
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_08_paired_coordinates_in_the_cube() {
    let started = Instant::now();
    let t = two_valued();
    let cube = cartesian_power(&t, 3).unwrap();
    let order = TransitionOrder::default_order(&cube);
    let opts = OracleOptions::default();
    let mut checked = 0u64;
    for n in 0..=6usize {
        let u = Word::repeated(Letter('a'), n);
        for c in enumerate_successful(&cube, &u, &order, &opts).unwrap() {
            let steps: Vec<Vec<Word>> = (0..3)
                .map(|i| cube.computation_output_steps(&c, i).unwrap())
                .collect();
            let found = (0..3).any(|i| {
                (i + 1..3).any(|j| match lag(&steps[i], &steps[j]) {
                    // Equal outputs iff the final lead-or-delay is ε, i.e.
                    // the concatenations agree.
                    Ok(l) => {
                        let full_i: Word =
                            steps[i].iter().fold(Word::empty(), |acc, w| acc.concat(w));
                        let full_j: Word =
                            steps[j].iter().fold(Word::empty(), |acc, w| acc.concat(w));
                        full_i == full_j && l < 16
                    }
                    Err(_) => false,
                })
            });
            assert!(found, "no matching coordinate pair on a^{n}");
            checked += 1;
        }
    }
    assert!(
        checked > 100,
        "expected a nontrivial number of tuples, got {checked}"
    );
    finish(
        "criterion 8 (coordinate pairing in the cube)",
        started,
        Duration::from_secs(10),
    );
}

#[test]
fn criterion_09_morphic_decomposition() {
    let started = Instant::now();
    let s = two_letter_source();
    let theta = OutputMorphism::new(vec![
        (Letter('b'), Word::parse("b")),
        (Letter('c'), Word::parse("b")),
    ]);
    let dec = morphic_decompose(&s, &theta, 2, &DecomposeOptions::default()).unwrap();
    assert_eq!(dec.components.len(), 2);
    for (i, c) in dec.components.iter().enumerate() {
        let (composed, _) = c.apply_output_morphism(&theta).unwrap();
        let report = oracle::valuedness_up_to(&composed, 8);
        assert!(
            report.max <= 1,
            "component {i} composed with θ has {} images",
            report.max
        );
    }
    for u in words_up_to(&s.alphabet, 8) {
        let mut union: BTreeSet<Word> = BTreeSet::new();
        for c in &dec.components {
            union.extend(eval_relation(c, &u));
        }
        assert_eq!(union, eval_relation(&s, &u), "union on {u}");
    }
    finish(
        "criterion 9 (morphic decomposition)",
        started,
        Duration::from_secs(10),
    );
}

#[test]
fn criterion_10_covering_bijections() {
    let started = Instant::now();
    let c1 = binary_counter();
    for spec in [OrderSpec::File, OrderSpec::Reverse] {
        let cov = multi_skim(
            &c1,
            3,
            &SkimOptions {
                order: spec,
                ..Default::default()
            },
        )
        .unwrap();
        for u in words_up_to(&c1.alphabet, 8) {
            assert_eq!(
                count_paths(&cov.covering, &u),
                count_paths(&cov.projection.target, &u),
                "skim covering count on {u}"
            );
        }
    }
    let t = two_valued();
    let cov = lag_separation(&t, 1, &LagSepOptions::default()).unwrap();
    for u in words_up_to(&t.alphabet, 8) {
        assert_eq!(
            count_paths(&cov.covering, &u),
            count_paths(&t, &u),
            "lag-sep count on {u}"
        );
    }
    finish(
        "criterion 10 (covering bijections)",
        started,
        Duration::from_secs(5),
    );
}

#[test]
fn criterion_11_determinism_of_emitted_files() {
    let started = Instant::now();
    let bin = env!("CARGO_BIN_EXE_lexcov");
    let fixtures = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");
    let run = |args: &[&str]| {
        let out = Command::new(bin).args(args).output().expect("binary runs");
        assert!(
            out.status.success(),
            "command {args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        out.stdout
    };
    let collect_dir = |dir: &std::path::Path| {
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (
                    e.file_name().into_string().unwrap(),
                    std::fs::read(e.path()).unwrap(),
                )
            })
            .collect();
        files.sort();
        files
    };

    let c1 = format!("{fixtures}/c1.naut");
    let t = format!("{fixtures}/t.trans");
    let snapshot = || {
        let work = tempfile::tempdir().unwrap();
        let skim_dir = work.path().join("skim");
        run(&[
            "skim",
            "--k",
            "3",
            &c1,
            "--emit-layers",
            skim_dir.to_str().unwrap(),
        ]);
        let skim_rev = run(&["--order", "reverse", "skim", "--k", "3", &c1]);
        let lagsep = run(&["lagsep", "--n", "1", &t, "--select-psi", "--trim"]);
        let dec_dir = work.path().join("dec");
        run(&[
            "--max-len",
            "12",
            "decompose",
            "--k",
            "2",
            "--n",
            "1",
            &t,
            "--out",
            dec_dir.to_str().unwrap(),
        ]);
        (
            collect_dir(&skim_dir),
            skim_rev,
            lagsep,
            collect_dir(&dec_dir),
        )
    };
    let first = snapshot();
    let second = snapshot();
    assert_eq!(first, second, "outputs differ between runs");
    assert!(!first.0.is_empty() && !first.3.is_empty());
    finish(
        "criterion 11 (byte-identical reruns)",
        started,
        Duration::from_secs(30),
    );
}
