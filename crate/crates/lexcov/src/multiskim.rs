//! The multi-skimming covering of an ℕ-automaton: states carry vectors
//! counting, saturated at ω, the strictly smaller same-label computations
//! into each state. Keeping as final exactly one saturation class per layer
//! extracts unambiguous sub-automata recognising the supports of the skimmed
//! series, plus a remainder realising s ⊖ k.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::error::Error;
use crate::machine::{Letter, NAutomaton, NLabel, StateId, TransId};
use crate::morphism::{certify_immersion, Morphism};
use crate::order::{OrderSpec, TransitionOrder};

/// An element of the quotient semiring {0, …, k−1, ω} of ℕ by k = k+1.
/// ω saturates sums and products, except that 0·ω = 0.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Count {
    Fin(u64),
    Omega,
}

impl Count {
    pub fn saturate(n: u64, k: u64) -> Count {
        if n >= k {
            Count::Omega
        } else {
            Count::Fin(n)
        }
    }

    pub fn add(self, other: Count, k: u64) -> Count {
        match (self, other) {
            (Count::Fin(a), Count::Fin(b)) => Count::saturate(a.saturating_add(b), k),
            _ => Count::Omega,
        }
    }

    pub fn mul_nat(self, n: u64, k: u64) -> Count {
        match self {
            Count::Fin(a) => Count::saturate(a.saturating_mul(n), k),
            Count::Omega => {
                if n == 0 {
                    Count::Fin(0)
                } else {
                    Count::Omega
                }
            }
        }
    }

    pub fn is_zero(self) -> bool {
        self == Count::Fin(0)
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Fin(n) => write!(f, "{n}"),
            Count::Omega => write!(f, "w"),
        }
    }
}

/// State-indexed vector of saturated counts; the multi-skim state payload.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CountVector(Vec<Count>);

impl CountVector {
    pub fn zero(dim: usize) -> Self {
        CountVector(vec![Count::Fin(0); dim])
    }

    pub fn from_counts(counts: &[u64], k: u64) -> Self {
        CountVector(counts.iter().map(|&c| Count::saturate(c, k)).collect())
    }

    pub fn entry(&self, q: StateId) -> Count {
        self.0[q]
    }

    pub fn entries(&self) -> &[Count] {
        &self.0
    }

    /// v·M + e# in the quotient semiring.
    fn step(&self, matrix: &[Vec<u64>], smaller: &[u64], k: u64) -> CountVector {
        let dim = self.0.len();
        let mut out = vec![Count::Fin(0); dim];
        for (r, &vr) in self.0.iter().enumerate() {
            if vr.is_zero() {
                continue;
            }
            for (s, o) in out.iter_mut().enumerate() {
                *o = o.add(vr.mul_nat(matrix[r][s], k), k);
            }
        }
        for (s, o) in out.iter_mut().enumerate() {
            *o = o.add(Count::saturate(smaller[s], k), k);
        }
        CountVector(out)
    }

    /// Canonical state-name suffix: entries joined by `.`, ω as `w`.
    pub fn render(&self) -> String {
        self.0
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(".")
    }

    /// Sum of the entries at `states`, in the quotient semiring.
    pub fn sum_at(&self, states: impl IntoIterator<Item = StateId>, k: u64) -> Count {
        let mut acc = Count::Fin(0);
        for q in states {
            acc = acc.add(self.0[q], k);
        }
        acc
    }
}

/// Per end state, the number of transitions with the same origin and label
/// strictly smaller than `e`. The machine must be characteristic.
pub fn smaller_count_vector(m: &NAutomaton, order: &TransitionOrder, e: TransId) -> Vec<u64> {
    let te = &m.transitions[e];
    let mut v = vec![0u64; m.states.len()];
    for (f, tf) in m.transitions.iter().enumerate() {
        if f != e
            && tf.origin == te.origin
            && tf.label.letter == te.label.letter
            && order.rank(f) < order.rank(e)
        {
            v[tf.end] += 1;
        }
    }
    v
}

#[derive(Clone, Debug)]
pub struct SkimOptions {
    pub order: OrderSpec,
    pub state_cap: usize,
}

impl Default for SkimOptions {
    fn default() -> Self {
        SkimOptions {
            order: OrderSpec::File,
            state_cap: 100_000,
        }
    }
}

/// The finite multi-skimming covering of an ℕ-automaton.
pub struct SkimCovering {
    /// The covering B_k; characteristic, reachable part only.
    pub covering: NAutomaton,
    /// First projection onto the split form of the input.
    pub projection: Morphism<NLabel>,
    /// Per covering state: the base state and the count vector.
    pub vectors: Vec<(StateId, CountVector)>,
    pub k: u64,
    /// For each split transition, its id in the unsplit input.
    pub split_back: Vec<TransId>,
}

fn theoretical_state_bound(n: usize, k: u64) -> String {
    let kn = (k as u128).saturating_add(1);
    let mut bound: u128 = n as u128;
    for _ in 0..n {
        bound = bound.saturating_mul(kn);
    }
    format!("n(k+1)^n = {bound}")
}

/// Builds the reachable part of the multi-skimming covering of `a` at level
/// `k`. The input is split into characteristic form first (a no-op when it
/// already is); the transition order applies to the split form. Multiple
/// initial states are handled by the hidden-initial extension: the start
/// vector of the j-th initial marks the earlier initials.
pub fn multi_skim(a: &NAutomaton, k: u64, opts: &SkimOptions) -> Result<SkimCovering, Error> {
    if k == 0 {
        return Err(Error::Unsupported("multi-skimming needs k ≥ 1".into()));
    }
    a.require_valid()?;
    let (split, split_back) = a.split_parts();
    let order = TransitionOrder::new(&split, &opts.order)?;
    let n = split.states.len();

    let letters: Vec<Letter> = split.alphabet.iter().copied().collect();
    let matrices: Vec<Vec<Vec<u64>>> = letters
        .iter()
        .map(|&l| crate::machine::count_matrix(&split, l))
        .collect();
    let matrix_of = |l: Letter| &matrices[letters.binary_search(&l).expect("letter in alphabet")];
    let smaller: Vec<Vec<u64>> = (0..split.transitions.len())
        .map(|e| smaller_count_vector(&split, &order, e))
        .collect();
    let out_adj = split.out_transitions();

    let mut covering = NAutomaton::new(format!("{}__skim{}", a.name, k));
    covering.alphabet = split.alphabet.clone();
    let mut keys: Vec<(StateId, CountVector)> = Vec::new();
    let mut ids: HashMap<(StateId, CountVector), StateId> = HashMap::new();
    let mut state_map: Vec<StateId> = Vec::new();
    let mut trans_map: Vec<TransId> = Vec::new();
    let mut queue: VecDeque<StateId> = VecDeque::new();

    let intern = |base: StateId,
                  vector: CountVector,
                  covering: &mut NAutomaton,
                  keys: &mut Vec<(StateId, CountVector)>,
                  ids: &mut HashMap<(StateId, CountVector), StateId>,
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
                construction: "the multi-skimming covering",
                bound: theoretical_state_bound(n, k),
            });
        }
        let id = covering.add_state(format!("{}__{}", split.states[base], key.1.render()));
        if split.finals.contains(&base) {
            covering.finals.insert(id);
        }
        state_map.push(base);
        ids.insert(key.clone(), id);
        keys.push(key);
        queue.push_back(id);
        Ok(id)
    };

    for (j, &i0) in split.initials.iter().enumerate() {
        let mut counts = vec![0u64; n];
        for &earlier in &split.initials[..j] {
            counts[earlier] += 1;
        }
        let v = CountVector::from_counts(&counts, k);
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
        for &e in &out_adj[base] {
            let t = &split.transitions[e];
            let next = vector.step(matrix_of(t.label.letter), &smaller[e], k);
            let tgt = intern(
                t.end,
                next,
                &mut covering,
                &mut keys,
                &mut ids,
                &mut state_map,
                &mut queue,
            )?;
            covering.add_transition(
                cur,
                NLabel {
                    letter: t.label.letter,
                    multiplicity: 1,
                },
                tgt,
            );
            trans_map.push(e);
        }
    }

    let projection = Morphism::new(covering.clone(), split, state_map, trans_map);
    Ok(SkimCovering {
        covering,
        projection,
        vectors: keys,
        k,
        split_back,
    })
}

/// The layers and the remainder of a multi-skimming covering. Only final
/// statuses change: layer i keeps final the states whose vector sums to i
/// over the base finals, the remainder keeps those summing to ω.
pub struct SkimLayers {
    pub layers: Vec<NAutomaton>,
    pub remainder: NAutomaton,
    /// Immersions of the layers into the base (split) machine.
    pub layer_morphisms: Vec<Morphism<NLabel>>,
    pub remainder_morphism: Morphism<NLabel>,
}

pub fn skim_layers(cov: &SkimCovering) -> Result<SkimLayers, Error> {
    let base = &cov.projection.target;
    let k = cov.k;
    let mut finals_per_class: Vec<std::collections::BTreeSet<StateId>> =
        vec![Default::default(); k as usize + 1];
    for (id, (b, v)) in cov.vectors.iter().enumerate() {
        if !base.finals.contains(b) {
            continue;
        }
        match v.sum_at(base.finals.iter().copied(), k) {
            Count::Fin(i) => finals_per_class[i as usize].insert(id),
            Count::Omega => finals_per_class[k as usize].insert(id),
        };
    }

    let make = |i: usize, suffix: String| -> Result<(NAutomaton, Morphism<NLabel>), Error> {
        let mut m = cov.covering.clone();
        m.name = format!("{}__{}", cov.covering.name, suffix);
        m.finals = finals_per_class[i].clone();
        let morphism = Morphism::new(
            m.clone(),
            base.clone(),
            cov.projection.state_map.clone(),
            cov.projection.trans_map.clone(),
        );
        Ok((m, certify_immersion(morphism)?))
    };

    let mut layers = Vec::new();
    let mut layer_morphisms = Vec::new();
    for i in 0..k as usize {
        let (m, phi) = make(i, format!("layer{i}"))?;
        layers.push(m);
        layer_morphisms.push(phi);
    }
    let (remainder, remainder_morphism) = make(k as usize, "remainder".into())?;
    Ok(SkimLayers {
        layers,
        remainder,
        layer_morphisms,
        remainder_morphism,
    })
}
