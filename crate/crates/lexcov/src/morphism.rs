//! Morphisms between machines, with verification of the three strengths:
//! plain morphism, covering (out-transitions and initials in bijection,
//! final statuses pulled back exactly) and immersion (a subautomaton of a
//! covering, certified by a recorded completion).

use std::collections::{BTreeMap, BTreeSet};

use crate::error::Error;
use crate::machine::{Label, Machine, StateId, TransId, Transition};

/// A state map and a transition map from `source` to `target`, preserving
/// adjacency and labels. Machines are small immutable values, so the
/// morphism owns copies of both ends.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Morphism<L> {
    pub source: Machine<L>,
    pub target: Machine<L>,
    /// Image of each source state, indexed by state id.
    pub state_map: Vec<StateId>,
    /// Image of each source transition, indexed by transition id.
    pub trans_map: Vec<TransId>,
    /// Witness that the source is a subautomaton of a covering of the
    /// target; recorded by the constructions that produce immersions.
    pub completion: Option<Box<Completion<L>>>,
}

/// A covering `cover → target` containing the immersion's source as a
/// subautomaton via `embedding`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Completion<L> {
    pub embedding: Morphism<L>,
    pub covering: Morphism<L>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MorphismKind {
    Morphism,
    Covering,
    Immersion,
}

impl<L: Label> Morphism<L> {
    pub fn new(
        source: Machine<L>,
        target: Machine<L>,
        state_map: Vec<StateId>,
        trans_map: Vec<TransId>,
    ) -> Self {
        Morphism {
            source,
            target,
            state_map,
            trans_map,
            completion: None,
        }
    }

    /// The identity morphism, certified as an immersion via the identity
    /// completion.
    pub fn identity(m: &Machine<L>) -> Self {
        let state_map: Vec<StateId> = (0..m.states.len()).collect();
        let trans_map: Vec<TransId> = (0..m.transitions.len()).collect();
        let plain = Morphism::new(m.clone(), m.clone(), state_map.clone(), trans_map.clone());
        Morphism {
            completion: Some(Box::new(Completion {
                embedding: plain.clone(),
                covering: plain.clone(),
            })),
            ..plain
        }
    }

    /// Composition `self; then`: a morphism source(self) → target(then).
    pub fn then(&self, then: &Morphism<L>) -> Result<Morphism<L>, Error> {
        if self.target != then.source {
            return Err(Error::Unsupported(
                "morphism composition: the first target is not the second source".into(),
            ));
        }
        Ok(Morphism::new(
            self.source.clone(),
            then.target.clone(),
            self.state_map.iter().map(|&q| then.state_map[q]).collect(),
            self.trans_map.iter().map(|&t| then.trans_map[t]).collect(),
        ))
    }

    fn check_plain(&self) -> bool {
        let src = &self.source;
        let dst = &self.target;
        if self.state_map.len() != src.states.len() || self.trans_map.len() != src.transitions.len()
        {
            return false;
        }
        if self.state_map.iter().any(|&q| q >= dst.states.len())
            || self.trans_map.iter().any(|&t| t >= dst.transitions.len())
        {
            return false;
        }
        for (i, t) in src.transitions.iter().enumerate() {
            let img = &dst.transitions[self.trans_map[i]];
            if img.origin != self.state_map[t.origin]
                || img.end != self.state_map[t.end]
                || !t.label.compatible(&img.label)
            {
                return false;
            }
        }
        // Jφ ⊆ I and Uφ ⊆ T.
        let dst_initials: BTreeSet<StateId> = dst.initials.iter().copied().collect();
        if src
            .initials
            .iter()
            .any(|&q| !dst_initials.contains(&self.state_map[q]))
        {
            return false;
        }
        if src
            .finals
            .iter()
            .any(|&q| !dst.finals.contains(&self.state_map[q]))
        {
            return false;
        }
        true
    }

    fn check_covering(&self) -> bool {
        if !self.check_plain() {
            return false;
        }
        let src = &self.source;
        let dst = &self.target;
        // Out-transitions of every state in bijection with those of its image.
        let src_out = src.out_transitions();
        let dst_out = dst.out_transitions();
        for q in 0..src.states.len() {
            let image_out = &dst_out[self.state_map[q]];
            if src_out[q].len() != image_out.len() {
                return false;
            }
            let mut hit: BTreeSet<TransId> = BTreeSet::new();
            for &t in &src_out[q] {
                if !hit.insert(self.trans_map[t]) {
                    return false;
                }
            }
            if image_out.iter().any(|t| !hit.contains(t)) {
                return false;
            }
        }
        // Initials in bijection.
        if src.initials.len() != dst.initials.len() {
            return false;
        }
        let mut seen = BTreeSet::new();
        for &q in &src.initials {
            if !seen.insert(self.state_map[q]) {
                return false;
            }
        }
        // Final statuses pulled back exactly: Tφ⁻¹ = U.
        for q in 0..src.states.len() {
            if dst.finals.contains(&self.state_map[q]) != src.finals.contains(&q) {
                return false;
            }
        }
        true
    }

    /// Injective subautomaton embedding: a plain morphism whose maps are
    /// injective.
    fn check_embedding(&self) -> bool {
        if !self.check_plain() {
            return false;
        }
        let mut s: BTreeSet<StateId> = BTreeSet::new();
        if self.state_map.iter().any(|&q| !s.insert(q)) {
            return false;
        }
        let mut t: BTreeSet<TransId> = BTreeSet::new();
        if self.trans_map.iter().any(|&x| !t.insert(x)) {
            return false;
        }
        true
    }
}

/// Verifies that a morphism has the requested strength.
///
/// `Immersion` requires a recorded completion (the canonical completion
/// attached by the constructions); without one the morphism is
/// unverifiable and an error is returned.
pub fn verify_morphism<L: Label>(m: &Morphism<L>, kind: MorphismKind) -> Result<bool, Error> {
    match kind {
        MorphismKind::Morphism => Ok(m.check_plain()),
        MorphismKind::Covering => Ok(m.check_covering()),
        MorphismKind::Immersion => {
            let Some(c) = &m.completion else {
                return Err(Error::Unverifiable);
            };
            if c.embedding.source != m.source || c.covering.target != m.target {
                return Ok(false);
            }
            if c.embedding.target != c.covering.source {
                return Ok(false);
            }
            if !c.embedding.check_embedding() || !c.covering.check_covering() {
                return Ok(false);
            }
            // The completion must factor the morphism itself.
            let composed_states: Vec<StateId> = c
                .embedding
                .state_map
                .iter()
                .map(|&q| c.covering.state_map[q])
                .collect();
            let composed_trans: Vec<TransId> = c
                .embedding
                .trans_map
                .iter()
                .map(|&t| c.covering.trans_map[t])
                .collect();
            Ok(composed_states == m.state_map && composed_trans == m.trans_map)
        }
    }
}

/// Builds the canonical completion of an out-injective morphism: the cover
/// keeps every source state, restores the final status of every state lying
/// over a final target state, and adds one copy of each target state; the
/// out-transitions missing at a source state are routed to the copies, which
/// carry a full copy of the target's transition graph. Fails when the
/// morphism is not out-injective or its initials do not embed into the
/// target's.
pub fn canonical_completion<L: Label>(m: &Morphism<L>) -> Result<Morphism<L>, Error> {
    if !m.check_plain() {
        return Err(Error::Unsupported(format!(
            "cannot complete `{}` → `{}`: not a morphism",
            m.source.name, m.target.name
        )));
    }
    let src = &m.source;
    let dst = &m.target;
    let n_src = src.states.len();
    let n_dst = dst.states.len();

    let mut cover = Machine::new(format!("{}__completion", src.name));
    cover.alphabet = dst.alphabet.union(&src.alphabet).copied().collect();
    cover.out_alphabet = dst.out_alphabet.union(&src.out_alphabet).copied().collect();
    cover.states = src.states.clone();
    for name in &dst.states {
        cover.states.push(format!("{name}__copy"));
    }
    let copy_of = |q: StateId| n_src + q;

    let mut cover_to_dst_state: Vec<StateId> = m.state_map.clone();
    cover_to_dst_state.extend(0..n_dst);

    // Source transitions first (the embedding is then the identity on ids).
    cover.transitions = src.transitions.clone();
    let mut cover_to_dst_trans: Vec<TransId> = m.trans_map.clone();

    let src_out = src.out_transitions();
    let dst_out = dst.out_transitions();
    for q in 0..n_src {
        let mut hit: BTreeSet<TransId> = BTreeSet::new();
        for &t in &src_out[q] {
            if !hit.insert(m.trans_map[t]) {
                return Err(Error::Unsupported(format!(
                    "cannot complete `{}`: out-transitions of `{}` do not map injectively",
                    src.name, src.states[q]
                )));
            }
        }
        for &f in &dst_out[m.state_map[q]] {
            if !hit.contains(&f) {
                cover.transitions.push(Transition {
                    origin: q,
                    label: dst.transitions[f].label.clone(),
                    end: copy_of(dst.transitions[f].end),
                });
                cover_to_dst_trans.push(f);
            }
        }
    }
    for (f, t) in dst.transitions.iter().enumerate() {
        cover.transitions.push(Transition {
            origin: copy_of(t.origin),
            label: t.label.clone(),
            end: copy_of(t.end),
        });
        cover_to_dst_trans.push(f);
    }

    // Initials: the source's, then copies of the target initials not hit.
    let mut hit_initials: BTreeSet<StateId> = BTreeSet::new();
    for &q in &src.initials {
        if !hit_initials.insert(m.state_map[q]) {
            return Err(Error::Unsupported(format!(
                "cannot complete `{}`: initial states do not embed into the target's",
                src.name
            )));
        }
    }
    cover.initials = src.initials.clone();
    for &i in &dst.initials {
        if !hit_initials.contains(&i) {
            cover.initials.push(copy_of(i));
        }
    }

    // Finals: the full fibers over the target finals.
    for (q, &image) in cover_to_dst_state.iter().enumerate() {
        if dst.finals.contains(&image) {
            cover.finals.insert(q);
        }
    }

    Ok(Morphism::new(
        cover,
        dst.clone(),
        cover_to_dst_state,
        cover_to_dst_trans,
    ))
}

/// Attaches the canonical completion to a morphism, certifying it as an
/// immersion.
pub fn certify_immersion<L: Label>(mut m: Morphism<L>) -> Result<Morphism<L>, Error> {
    let covering = canonical_completion(&m)?;
    let embedding = Morphism::new(
        m.source.clone(),
        covering.source.clone(),
        (0..m.source.states.len()).collect(),
        (0..m.source.transitions.len()).collect(),
    );
    m.completion = Some(Box::new(Completion {
        embedding,
        covering,
    }));
    Ok(m)
}

/// Trim with provenance: the useful part of `m` together with its embedding
/// into `m`, certified as an immersion. The result may be empty.
pub fn trim<L: Label>(m: &Machine<L>) -> Result<(Machine<L>, Morphism<L>), Error> {
    let (trimmed, states, trans) = m.trim_parts();
    let embedding = certify_immersion(Morphism::new(trimmed.clone(), m.clone(), states, trans))?;
    Ok((trimmed, embedding))
}

/// Splitting with provenance: the characteristic form of `m` together with
/// the morphism sending every copy onto its source transition. The map sums
/// multiplicities, so it is a plain morphism, not a covering.
pub fn split_multiplicities(
    m: &crate::machine::NAutomaton,
) -> (crate::machine::NAutomaton, Morphism<crate::machine::NLabel>) {
    let (split, back) = m.split_parts();
    let state_map = (0..m.states.len()).collect();
    let morphism = Morphism::new(split.clone(), m.clone(), state_map, back);
    (split, morphism)
}

/// Renders a morphism in the text map format (`state`/`trans` lines).
pub fn serialize_morphism<L: Label>(m: &Morphism<L>) -> String {
    let mut out = String::from("morphism\n");
    for (q, &img) in m.state_map.iter().enumerate() {
        out.push_str(&format!(
            "state {} {}\n",
            m.source.states[q], m.target.states[img]
        ));
    }
    for (t, &img) in m.trans_map.iter().enumerate() {
        out.push_str(&format!("trans {t} {img}\n"));
    }
    out
}

/// Parses the text map format against the given machines. Morphisms read
/// from files carry no completion, so they cannot be verified as immersions.
pub fn parse_morphism<L: Label>(
    text: &str,
    source: &Machine<L>,
    target: &Machine<L>,
) -> Result<Morphism<L>, Error> {
    let src_ids: BTreeMap<&str, StateId> = source
        .states
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let dst_ids: BTreeMap<&str, StateId> = target
        .states
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let mut state_map = vec![usize::MAX; source.states.len()];
    let mut trans_map = vec![usize::MAX; source.transitions.len()];
    let mut saw_header = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            line: lineno + 1,
            message,
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if !saw_header {
            if tokens != ["morphism"] {
                return Err(err("expected `morphism` header".into()));
            }
            saw_header = true;
            continue;
        }
        match tokens[0] {
            "state" if tokens.len() == 3 => {
                let s = *src_ids
                    .get(tokens[1])
                    .ok_or_else(|| err(format!("unknown source state `{}`", tokens[1])))?;
                let d = *dst_ids
                    .get(tokens[2])
                    .ok_or_else(|| err(format!("unknown target state `{}`", tokens[2])))?;
                state_map[s] = d;
            }
            "trans" if tokens.len() == 3 => {
                let s: usize = tokens[1]
                    .parse()
                    .map_err(|_| err("bad transition id".into()))?;
                let d: usize = tokens[2]
                    .parse()
                    .map_err(|_| err("bad transition id".into()))?;
                if s >= trans_map.len() || d >= target.transitions.len() {
                    return Err(err(format!("transition id out of range: {s} -> {d}")));
                }
                trans_map[s] = d;
            }
            other => return Err(err(format!("unknown directive `{other}`"))),
        }
    }
    if !saw_header {
        return Err(Error::Parse {
            line: 1,
            message: "missing `morphism` header".into(),
        });
    }
    if state_map.contains(&usize::MAX) || trans_map.contains(&usize::MAX) {
        return Err(Error::Parse {
            line: 1,
            message: "morphism map is not total on the source".into(),
        });
    }
    Ok(Morphism::new(
        source.clone(),
        target.clone(),
        state_map,
        trans_map,
    ))
}
