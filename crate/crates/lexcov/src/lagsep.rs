//! The lag-separation covering of a real-time transducer: states carry
//! vectors of bounded lead-or-delay sets against the strictly smaller
//! same-input computations. Removing the final status of every state whose
//! vector contains ε selects, per output, the least computation within the
//! lag bound; the result is equivalent to the input and, for a large enough
//! bound, input-k-ambiguous.

use std::collections::{HashMap, VecDeque};

use crate::delay::{rho, Delta, DeltaVector, FreeWord, RhoImage};
use crate::error::Error;
use crate::machine::{output_matrix, Letter, StateId, TransId, Transducer, Word};
use crate::morphism::{certify_immersion, Morphism};
use crate::oracle;
use crate::order::{OrderSpec, TransitionOrder};

/// Parameters the construction ran with, recorded for audit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationParams {
    /// The lag bound N.
    pub lag_bound: u64,
    /// State count n of the input.
    pub states: usize,
    /// Largest transition output length L.
    pub max_output_len: u64,
    /// Output alphabet size h.
    pub output_letters: usize,
    /// Valuedness k the caller asserted, when any.
    pub valuedness: Option<u64>,
}

/// The default lag bound L·n^{k+1} that guarantees input-k-ambiguity of the
/// selected subtransducer.
pub fn default_lag_bound(t: &Transducer, k: u64) -> Result<u64, Error> {
    if k == 0 {
        return Err(Error::Unsupported("the lag bound needs k ≥ 1".into()));
    }
    let n = t.states.len() as u64;
    let l = t.max_output_len();
    let exp: u32 = (k + 1)
        .try_into()
        .map_err(|_| Error::Overflow("the lag bound L·n^(k+1)"))?;
    n.checked_pow(exp)
        .and_then(|p| p.checked_mul(l))
        .ok_or(Error::Overflow("the lag bound L·n^(k+1)"))
}

/// Per end state, the bounded lead-or-delay of `e`'s output against each
/// smaller transition of its class: {ρ_N(x̄y) | f: p −a|y→ r, f ≺ e}.
pub fn smaller_delta_vector(
    t: &Transducer,
    order: &TransitionOrder,
    e: TransId,
    bound: usize,
) -> DeltaVector {
    let te = &t.transitions[e];
    let mut v = DeltaVector::empty(t.states.len());
    for (f, tf) in t.transitions.iter().enumerate() {
        if f != e
            && tf.origin == te.origin
            && tf.label.input == te.label.input
            && order.rank(f) < order.rank(e)
        {
            let diff = FreeWord::inverse_of_word(&te.label.output)
                .concat(&FreeWord::from_word(&tf.label.output));
            if let RhoImage::Elem(d) = rho(&diff, Some(bound)) {
                v.entry_mut(tf.end).insert(d);
            }
        }
    }
    v
}

#[derive(Clone, Debug)]
pub struct LagSepOptions {
    pub order: OrderSpec,
    pub state_cap: usize,
    /// When the valuedness k is known, vector coordinates are capped at k
    /// elements: larger coordinates cannot belong to useful states, and the
    /// corresponding successors are pruned from the worklist. Pruning (which
    /// never happens on k-valued inputs' useful parts) is recorded on the
    /// result; a pruned result is no longer a full covering.
    pub coordinate_cap: Option<usize>,
}

impl Default for LagSepOptions {
    fn default() -> Self {
        LagSepOptions {
            order: OrderSpec::File,
            state_cap: 100_000,
            coordinate_cap: None,
        }
    }
}

/// The finite lag-separation covering of a real-time transducer.
pub struct LagSepCovering {
    pub covering: Transducer,
    /// First projection onto the input transducer.
    pub projection: Morphism<crate::machine::IoLabel>,
    /// Per covering state: the base state and the delta vector.
    pub vectors: Vec<(StateId, DeltaVector)>,
    pub params: SeparationParams,
    /// Whether the coordinate cap pruned any successor.
    pub pruned: bool,
}

fn useful_state_bound(t: &Transducer, n_bound: u64, k: Option<u64>) -> String {
    let h = t.out_alphabet.len() as u128;
    let n = t.states.len() as u128;
    let k = k.unwrap_or(1) as u128;
    let exponent = 2u128
        .saturating_mul(h)
        .saturating_mul(n_bound as u128)
        .saturating_mul(k)
        .saturating_mul(k)
        .saturating_mul(n);
    format!("2^(2hNk²n) = 2^{exponent}")
}

/// Builds the reachable part of the lag-separation covering of `t` with lag
/// bound `n_bound`. Multiple initial states are handled by the
/// hidden-initial extension: the start vector of the j-th initial holds {ε}
/// at each earlier initial.
pub fn lag_separation(
    t: &Transducer,
    n_bound: u64,
    opts: &LagSepOptions,
) -> Result<LagSepCovering, Error> {
    t.require_valid()?;
    let order = TransitionOrder::new(t, &opts.order)?;
    let n = t.states.len();
    let bound = n_bound as usize;

    let letters: Vec<Letter> = t.alphabet.iter().copied().collect();
    let matrices: Vec<Vec<Vec<std::collections::BTreeSet<Word>>>> =
        letters.iter().map(|&l| output_matrix(t, l)).collect();
    let matrix_of = |l: Letter| &matrices[letters.binary_search(&l).expect("letter in alphabet")];
    let smaller: Vec<DeltaVector> = (0..t.transitions.len())
        .map(|e| smaller_delta_vector(t, &order, e, bound))
        .collect();
    let out_adj = t.out_transitions();

    let mut covering = Transducer::new(format!("{}__lagsep{}", t.name, n_bound));
    covering.alphabet = t.alphabet.clone();
    covering.out_alphabet = t.out_alphabet.clone();
    let mut keys: Vec<(StateId, DeltaVector)> = Vec::new();
    let mut ids: HashMap<(StateId, DeltaVector), StateId> = HashMap::new();
    let mut state_map: Vec<StateId> = Vec::new();
    let mut trans_map: Vec<TransId> = Vec::new();
    let mut queue: VecDeque<StateId> = VecDeque::new();
    let mut pruned = false;

    let intern = |base: StateId,
                  vector: DeltaVector,
                  covering: &mut Transducer,
                  keys: &mut Vec<(StateId, DeltaVector)>,
                  ids: &mut HashMap<(StateId, DeltaVector), StateId>,
                  state_map: &mut Vec<StateId>,
                  queue: &mut VecDeque<StateId>|
     -> Result<StateId, Error> {
        let key = (base, vector);
        if let Some(&id) = ids.get(&key) {
            return Ok(id);
        }
        if keys.len() >= opts.state_cap {
            return Err(Error::StateCap {
                cap: opts.state_cap,
                construction: "the lag-separation covering",
                bound: useful_state_bound(t, n_bound, opts.coordinate_cap.map(|c| c as u64)),
            });
        }
        let id = covering.add_state(format!("{}__{}", t.states[base], key.1.render(&t.states)));
        if t.finals.contains(&base) {
            covering.finals.insert(id);
        }
        state_map.push(base);
        ids.insert(key.clone(), id);
        keys.push(key);
        queue.push_back(id);
        Ok(id)
    };

    for (j, &i0) in t.initials.iter().enumerate() {
        let mut v = DeltaVector::empty(n);
        for &earlier in &t.initials[..j] {
            v.entry_mut(earlier).insert(Delta::epsilon());
        }
        let id = intern(
            i0,
            v,
            &mut covering,
            &mut keys,
            &mut ids,
            &mut state_map,
            &mut queue,
        )?;
        if !covering.initials.contains(&id) {
            covering.initials.push(id);
        }
    }

    while let Some(cur) = queue.pop_front() {
        let (base, vector) = keys[cur].clone();
        'edges: for &e in &out_adj[base] {
            let te = &t.transitions[e];
            let x_inv = FreeWord::inverse_of_word(&te.label.output);
            let matrix = matrix_of(te.label.input);
            // (x̄ · v · aμ + e#) ρ_N, componentwise.
            let mut next = DeltaVector::empty(n);
            for s in 0..n {
                let entry = next.entry_mut(s);
                for (r, outs) in matrix.iter().enumerate().map(|(r, row)| (r, &row[s])) {
                    if outs.is_empty() {
                        continue;
                    }
                    for w in vector.entry(r).iter() {
                        let free = w.to_free().expect("vector entries are never zero");
                        for y in outs {
                            let product = x_inv.concat(&free).concat(&FreeWord::from_word(y));
                            if let RhoImage::Elem(d) = rho(&product, Some(bound)) {
                                entry.insert(d);
                            }
                        }
                    }
                }
                for d in smaller[e].entry(s).iter() {
                    entry.insert(d.clone());
                }
                if let Some(cap) = opts.coordinate_cap {
                    if entry.len() > cap {
                        pruned = true;
                        continue 'edges;
                    }
                }
            }
            let tgt = intern(
                te.end,
                next,
                &mut covering,
                &mut keys,
                &mut ids,
                &mut state_map,
                &mut queue,
            )?;
            covering.add_transition(cur, te.label.clone(), tgt);
            trans_map.push(e);
        }
    }

    let params = SeparationParams {
        lag_bound: n_bound,
        states: n,
        max_output_len: t.max_output_len(),
        output_letters: t.out_alphabet.len(),
        valuedness: opts.coordinate_cap.map(|c| c as u64),
    };
    let projection = Morphism::new(covering.clone(), t.clone(), state_map, trans_map);
    Ok(LagSepCovering {
        covering,
        projection,
        vectors: keys,
        params,
        pruned,
    })
}

/// Removes the final status of every state whose vector holds ε at some
/// final base state: a surviving successful computation has no smaller
/// same-input same-output successful computation within the lag bound.
/// Returns the subtransducer and its immersion into the base transducer.
pub fn select_psi(
    cov: &LagSepCovering,
) -> Result<(Transducer, Morphism<crate::machine::IoLabel>), Error> {
    let base = &cov.projection.target;
    let mut selected = cov.covering.clone();
    selected.name = format!("{}__psi", cov.covering.name);
    selected.finals = cov
        .covering
        .finals
        .iter()
        .copied()
        .filter(|&id| {
            let (_, v) = &cov.vectors[id];
            !base.finals.iter().any(|&t| v.entry(t).contains_epsilon())
        })
        .collect();
    let morphism = Morphism::new(
        selected.clone(),
        base.clone(),
        cov.projection.state_map.clone(),
        cov.projection.trans_map.clone(),
    );
    Ok((selected, certify_immersion(morphism)?))
}

/// Bounded check that a transducer is input-k-ambiguous: no input of length
/// ≤ `max_len` labels more than k successful computations.
pub fn ambiguity_certificate(t: &Transducer, k: u64, max_len: usize) -> bool {
    oracle::ambiguity_up_to(t, max_len).max <= k
}
