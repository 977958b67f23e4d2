//! End-to-end pipelines: the decomposition of a k-valued transducer into k
//! unambiguous functional ones (lag separation, then multi-skimming of the
//! input automaton, then lifting the outputs back), the cartesian power, the
//! lead-or-delay product, and the morphic decomposition that factors through
//! an output morphism.

use std::collections::{BTreeSet, HashMap, VecDeque};

use itertools::Itertools;

use crate::delay::{ld_action, Delta};
use crate::error::Error;
use crate::lagsep::{default_lag_bound, lag_separation, select_psi, LagSepOptions};
use crate::machine::{
    automaton_to_nautomaton, Automaton, IoLabel, OutputMorphism, StateId, TransId, Transducer,
    TupleLabel, TupleTransducer, Word,
};
use crate::morphism::{certify_immersion, Morphism};
use crate::multiskim::{multi_skim, skim_layers, SkimOptions};
use crate::oracle;
use crate::order::OrderSpec;

/// State and transition count of one pipeline stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageMetrics {
    pub stage: String,
    pub states: usize,
    pub transitions: usize,
}

impl StageMetrics {
    fn of<L: crate::machine::Label>(
        stage: impl Into<String>,
        m: &crate::machine::Machine<L>,
    ) -> Self {
        StageMetrics {
            stage: stage.into(),
            states: m.states.len(),
            transitions: m.transitions.len(),
        }
    }
}

/// Copies the outputs of `source` onto the transitions of `layer`, which
/// maps into the underlying input automaton of `source`. `layer_to_input`
/// sends layer transitions to input-automaton transitions and
/// `input_to_source` is the bijection onto the source's transitions.
pub fn lift_outputs(
    layer: &Automaton,
    layer_to_input: &[TransId],
    input_to_source: &[TransId],
    source: &Transducer,
) -> Result<Transducer, Error> {
    if layer_to_input.len() != layer.transitions.len() {
        return Err(Error::Unsupported(
            "lift: the transition map does not cover the layer".into(),
        ));
    }
    let mut lifted = Transducer::new(layer.name.clone());
    lifted.alphabet = layer.alphabet.clone();
    lifted.out_alphabet = source.out_alphabet.clone();
    lifted.states = layer.states.clone();
    lifted.initials = layer.initials.clone();
    lifted.finals = layer.finals.clone();
    for (i, t) in layer.transitions.iter().enumerate() {
        let src = *input_to_source
            .get(layer_to_input[i])
            .ok_or_else(|| Error::Unsupported("lift: transition map out of range".into()))?;
        let image = &source.transitions[src];
        if image.label.input != t.label {
            return Err(Error::Unsupported(format!(
                "lift: layer transition {i} reads `{}` but its image reads `{}`",
                t.label, image.label.input
            )));
        }
        lifted.add_transition(t.origin, image.label.clone(), t.end);
    }
    Ok(lifted)
}

#[derive(Clone, Debug)]
pub struct DecomposeOptions {
    /// Lag bound; defaults to L·n^(k+1).
    pub lag_bound: Option<u64>,
    pub lagsep_order: OrderSpec,
    pub skim_order: OrderSpec,
    /// Length up to which the bounded posts (valuedness, ambiguity,
    /// functionality, equivalence of the union) are checked.
    pub check_len: usize,
    pub state_cap: usize,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions {
            lag_bound: None,
            lagsep_order: OrderSpec::File,
            skim_order: OrderSpec::File,
            check_len: 8,
            state_cap: 100_000,
        }
    }
}

/// A decomposition of a k-valued transducer into k unambiguous functional
/// transducers whose union realises the same relation.
pub struct Decomposition {
    pub components: Vec<Transducer>,
    /// Immersions of the components into the source transducer.
    pub immersions: Vec<Morphism<IoLabel>>,
    pub metrics: Vec<StageMetrics>,
    pub k: u64,
    pub lag_bound: u64,
    pub lagsep_order: String,
    pub skim_order: String,
}

/// Decomposes `t` into k unambiguous functional transducers. The caller
/// asserts k-valuedness; it is checked up to `check_len` and a larger image
/// is a hard error. Every post is verified by the oracle at the same length.
pub fn decompose_k_valued(
    t: &Transducer,
    k: u64,
    opts: &DecomposeOptions,
) -> Result<Decomposition, Error> {
    if k == 0 {
        return Err(Error::Unsupported("decomposition needs k ≥ 1".into()));
    }
    t.require_valid()?;
    let report = oracle::valuedness_up_to(t, opts.check_len);
    if report.max > k {
        return Err(Error::NotKValued {
            k,
            witness: report.witness.to_string(),
            found: report.max,
        });
    }

    let lag_bound = match opts.lag_bound {
        Some(n) => n,
        None => default_lag_bound(t, k)?,
    };
    let mut metrics = vec![StageMetrics::of("source", t)];

    let lagsep_opts = LagSepOptions {
        order: opts.lagsep_order.clone(),
        state_cap: opts.state_cap,
        coordinate_cap: Some(k as usize),
    };
    let cov = lag_separation(t, lag_bound, &lagsep_opts)?;
    metrics.push(StageMetrics::of("lag-separation covering", &cov.covering));

    let (psi, psi_imm) = select_psi(&cov)?;
    metrics.push(StageMetrics::of("selected subtransducer", &psi));

    let (selected, kept_states, kept_trans) = psi.trim_parts();
    metrics.push(StageMetrics::of("trimmed selection", &selected));
    let selected_to_t = Morphism::new(
        selected.clone(),
        t.clone(),
        kept_states.iter().map(|&q| psi_imm.state_map[q]).collect(),
        kept_trans.iter().map(|&e| psi_imm.trans_map[e]).collect(),
    );

    let ambiguity = oracle::ambiguity_up_to(&selected, opts.check_len);
    if ambiguity.max > k {
        return Err(Error::NotKAmbiguous {
            k,
            witness: ambiguity.witness.to_string(),
            found: ambiguity.max,
        });
    }

    let (input_automaton, input_to_selected) = selected.underlying_input_automaton();
    let skim = multi_skim(
        &automaton_to_nautomaton(&input_automaton),
        k,
        &SkimOptions {
            order: opts.skim_order.clone(),
            state_cap: opts.state_cap,
        },
    )?;
    metrics.push(StageMetrics::of("multi-skimming covering", &skim.covering));
    let layers = skim_layers(&skim)?;

    let mut components = Vec::new();
    let mut immersions = Vec::new();
    for (i, (layer, phi)) in layers
        .layers
        .iter()
        .zip(&layers.layer_morphisms)
        .enumerate()
    {
        let layer_automaton = crate::machine::nautomaton_to_automaton(layer)?;
        let mut lifted = lift_outputs(
            &layer_automaton,
            &phi.trans_map,
            &input_to_selected,
            &selected,
        )?;
        lifted.name = format!("{}__asil{}", t.name, i);
        metrics.push(StageMetrics::of(format!("layer {i} lifted"), &lifted));

        let (component, comp_states, comp_trans) = lifted.trim_parts();
        metrics.push(StageMetrics::of(format!("component {i}"), &component));

        // component → lifted layer → selected → t
        let immersion = certify_immersion(Morphism::new(
            component.clone(),
            t.clone(),
            comp_states
                .iter()
                .map(|&q| selected_to_t.state_map[phi.state_map[q]])
                .collect(),
            comp_trans
                .iter()
                .map(|&e| selected_to_t.trans_map[phi.trans_map[e]])
                .collect(),
        ))?;
        components.push(component);
        immersions.push(immersion);
    }

    // Bounded posts: each component unambiguous and functional, the union
    // equivalent to the source.
    for (i, c) in components.iter().enumerate() {
        let amb = oracle::ambiguity_up_to(c, opts.check_len);
        if amb.max > 1 {
            return Err(Error::Unsupported(format!(
                "component {i} is ambiguous on `{}` ({} computations)",
                amb.witness, amb.max
            )));
        }
        let val = oracle::valuedness_up_to(c, opts.check_len);
        if val.max > 1 {
            return Err(Error::Unsupported(format!(
                "component {i} is not functional on `{}`",
                val.witness
            )));
        }
    }
    for u in oracle::words_up_to(&t.alphabet, opts.check_len) {
        let mut union: BTreeSet<Word> = BTreeSet::new();
        for c in &components {
            union.extend(oracle::eval_relation(c, &u));
        }
        if union != oracle::eval_relation(t, &u) {
            return Err(Error::Unsupported(format!(
                "decomposition union differs from the source on `{u}`"
            )));
        }
    }

    Ok(Decomposition {
        components,
        immersions,
        metrics,
        k,
        lag_bound,
        lagsep_order: opts.lagsep_order.to_string(),
        skim_order: opts.skim_order.to_string(),
    })
}

/// The cartesian product of `t` with itself `m` times: states are m-tuples,
/// transitions are m-tuples of same-input transitions carrying the tuple of
/// outputs, initials and finals are componentwise. The full state set Q^m is
/// materialized.
pub fn cartesian_power(t: &Transducer, m: usize) -> Result<TupleTransducer, Error> {
    if m == 0 {
        return Err(Error::Unsupported("cartesian power needs m ≥ 1".into()));
    }
    t.require_valid()?;
    let n = t.states.len();
    let mut power = TupleTransducer::new(format!("{}__pow{}", t.name, m));
    power.alphabet = t.alphabet.clone();
    power.out_alphabet = t.out_alphabet.clone();

    // Tuple id = Σ q_i · n^(m-1-i), names joined by `*`.
    let tuples: Vec<Vec<StateId>> = (0..m).map(|_| 0..n).multi_cartesian_product().collect();
    for tuple in &tuples {
        let name = tuple
            .iter()
            .map(|&q| t.states[q].as_str())
            .collect::<Vec<_>>()
            .join("*");
        power.add_state(name);
        if tuple.iter().all(|q| t.finals.contains(q)) {
            power.finals.insert(power.states.len() - 1);
        }
    }
    let id_of = |tuple: &[StateId]| tuple.iter().fold(0usize, |acc, &q| acc * n + q);

    for inits in (0..m)
        .map(|_| t.initials.iter().copied())
        .multi_cartesian_product()
    {
        power.initials.push(id_of(&inits));
    }

    for letter in t.alphabet.iter().copied() {
        let with_letter: Vec<TransId> = t
            .transitions
            .iter()
            .enumerate()
            .filter(|(_, tr)| tr.label.input == letter)
            .map(|(i, _)| i)
            .collect();
        if with_letter.is_empty() {
            continue;
        }
        for combo in (0..m)
            .map(|_| with_letter.iter().copied())
            .multi_cartesian_product()
        {
            let origin: Vec<StateId> = combo.iter().map(|&e| t.transitions[e].origin).collect();
            let end: Vec<StateId> = combo.iter().map(|&e| t.transitions[e].end).collect();
            let outputs: Vec<Word> = combo
                .iter()
                .map(|&e| t.transitions[e].label.output.clone())
                .collect();
            power.add_transition(
                id_of(&origin),
                TupleLabel {
                    input: letter,
                    outputs,
                },
                id_of(&end),
            );
        }
    }
    Ok(power)
}

/// The product of two transducers over the lead-or-delay action, restricted
/// to deltas of length at most `k_bound`. States are (left state, right
/// state, delta); the start states pair the initials with ε; a transition
/// pairs same-input transitions and acts on the delta with (left output,
/// right output); a state is final iff both components are final and the
/// delta is ε (equal accumulated outputs). Outputs are the left side's.
pub struct LdProduct {
    pub product: Transducer,
    /// Per product transition, the left/right source transitions.
    pub left_trans: Vec<TransId>,
    pub right_trans: Vec<TransId>,
    /// Per product state, the (left, right, delta) key.
    pub keys: Vec<(StateId, StateId, Delta)>,
}

pub fn ld_product(
    left: &Transducer,
    right: &Transducer,
    k_bound: u64,
    state_cap: usize,
) -> Result<LdProduct, Error> {
    left.require_valid()?;
    right.require_valid()?;
    if left.alphabet != right.alphabet {
        return Err(Error::Unsupported(
            "lead-or-delay product needs equal input alphabets".into(),
        ));
    }
    let mut product = Transducer::new(format!("{}__ld__{}", left.name, right.name));
    product.alphabet = left.alphabet.clone();
    product.out_alphabet = left.out_alphabet.clone();

    let mut keys: Vec<(StateId, StateId, Delta)> = Vec::new();
    let mut ids: HashMap<(StateId, StateId, Delta), StateId> = HashMap::new();
    let mut left_trans = Vec::new();
    let mut right_trans = Vec::new();
    let mut queue: VecDeque<StateId> = VecDeque::new();

    let intern = |key: (StateId, StateId, Delta),
                  product: &mut Transducer,
                  keys: &mut Vec<(StateId, StateId, Delta)>,
                  ids: &mut HashMap<(StateId, StateId, Delta), StateId>,
                  queue: &mut VecDeque<StateId>|
     -> Result<StateId, Error> {
        if let Some(&id) = ids.get(&key) {
            return Ok(id);
        }
        if keys.len() >= state_cap {
            return Err(Error::StateCap {
                cap: state_cap,
                construction: "the lead-or-delay product",
                bound: format!("n·M·|Δ_K| with K = {k_bound}"),
            });
        }
        let name = format!(
            "{}*{}*{}",
            left.states[key.0],
            right.states[key.1],
            key.2.render()
        );
        let id = product.add_state(name);
        if left.finals.contains(&key.0) && right.finals.contains(&key.1) && key.2.is_epsilon() {
            product.finals.insert(id);
        }
        ids.insert(key.clone(), id);
        keys.push(key);
        queue.push_back(id);
        Ok(id)
    };

    for &i in &left.initials {
        for &j in &right.initials {
            let id = intern(
                (i, j, Delta::epsilon()),
                &mut product,
                &mut keys,
                &mut ids,
                &mut queue,
            )?;
            if !product.initials.contains(&id) {
                product.initials.push(id);
            }
        }
    }

    let left_adj = left.out_transitions();
    let right_adj = right.out_transitions();
    while let Some(cur) = queue.pop_front() {
        let (p, q, delta) = keys[cur].clone();
        for &e in &left_adj[p] {
            let te = &left.transitions[e];
            for &f in &right_adj[q] {
                let tf = &right.transitions[f];
                if te.label.input != tf.label.input {
                    continue;
                }
                let next = ld_action(&delta, &te.label.output, &tf.label.output);
                match next.len() {
                    Some(len) if len as u64 <= k_bound => {}
                    _ => continue, // zero or out of Δ_K
                }
                let tgt = intern(
                    (te.end, tf.end, next),
                    &mut product,
                    &mut keys,
                    &mut ids,
                    &mut queue,
                )?;
                product.add_transition(cur, te.label.clone(), tgt);
                left_trans.push(e);
                right_trans.push(f);
            }
        }
    }

    Ok(LdProduct {
        product,
        left_trans,
        right_trans,
        keys,
    })
}

/// Result of the morphic decomposition: k transducers decomposing the
/// source, each of whose compositions with the output morphism is
/// functional.
pub struct MorphicDecomposition {
    pub components: Vec<Transducer>,
    pub k: u64,
    /// The delta bound K = 2(k+1)N used by the lead-or-delay products.
    pub delta_bound: u64,
    pub metrics: Vec<StageMetrics>,
}

/// Decomposes `s` into k transducers whose compositions with `theta` are
/// functions, given that s·θ is k-valued (checked up to `check_len`).
///
/// Pipeline: relabel the outputs through θ; decompose the relabelled
/// transducer; glue every computation of it onto each component by the
/// lead-or-delay product at bound K = 2(k+1)N; relabel the product outputs
/// back to the source outputs through the recorded provenance.
pub fn morphic_decompose(
    s: &Transducer,
    theta: &OutputMorphism,
    k: u64,
    opts: &DecomposeOptions,
) -> Result<MorphicDecomposition, Error> {
    s.require_valid()?;
    let (t, _relabel) = s.apply_output_morphism(theta)?;
    let report = oracle::valuedness_up_to(&t, opts.check_len);
    if report.max > k {
        return Err(Error::NotKValued {
            k,
            witness: report.witness.to_string(),
            found: report.max,
        });
    }

    let decomposition = decompose_k_valued(&t, k, opts)?;
    let delta_bound = 2u64
        .checked_mul(k + 1)
        .and_then(|x| x.checked_mul(decomposition.lag_bound))
        .ok_or(Error::Overflow("the delta bound 2(k+1)N"))?;
    let mut metrics = decomposition.metrics.clone();

    let mut components = Vec::new();
    for (i, asil) in decomposition.components.iter().enumerate() {
        let ld = ld_product(&t, asil, delta_bound, opts.state_cap)?;
        metrics.push(StageMetrics::of(format!("ld product {i}"), &ld.product));
        // Step back from θ-images to the source outputs: a product
        // transition projects on a transition of t, which is a relabelled
        // transition of s with the same id.
        let mut glued = ld.product.clone();
        glued.name = format!("{}__w{}", s.name, i);
        glued.out_alphabet = s.out_alphabet.clone();
        for (j, tr) in glued.transitions.iter_mut().enumerate() {
            tr.label.output = s.transitions[ld.left_trans[j]].label.output.clone();
        }
        let (component, _, _) = glued.trim_parts();
        metrics.push(StageMetrics::of(
            format!("morphic component {i}"),
            &component,
        ));
        components.push(component);
    }

    // Bounded posts: each composition with θ is functional; the union is
    // equivalent to the source.
    for (i, c) in components.iter().enumerate() {
        let (composed, _) = c.apply_output_morphism(theta)?;
        let val = oracle::valuedness_up_to(&composed, opts.check_len);
        if val.max > 1 {
            return Err(Error::Unsupported(format!(
                "morphic component {i} composed with θ is not functional on `{}`",
                val.witness
            )));
        }
    }
    for u in oracle::words_up_to(&s.alphabet, opts.check_len) {
        let mut union: BTreeSet<Word> = BTreeSet::new();
        for c in &components {
            union.extend(oracle::eval_relation(c, &u));
        }
        if union != oracle::eval_relation(s, &u) {
            return Err(Error::Unsupported(format!(
                "morphic decomposition union differs from the source on `{u}`"
            )));
        }
    }

    Ok(MorphicDecomposition {
        components,
        k,
        delta_bound,
        metrics,
    })
}
