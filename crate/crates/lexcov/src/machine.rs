//! Machines: classical automata, real-time transducers and ℕ-automata as
//! labelled multigraphs. Distinct parallel transitions with identical
//! (origin, label, end) are first-class: transitions are identified by dense
//! ids, not by their endpoints.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::error::Error;

/// Single symbol drawn from a declared finite alphabet.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(pub char);

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Finite sequence of letters. The empty word is a valid value.
///
/// Ordering is shortlex (length first, then letterwise), which is the
/// canonical order used everywhere words are sorted or serialized.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        Word(letters.into_iter().collect())
    }

    /// Parses a token: `-` is the empty word, anything else is read
    /// letter by letter.
    pub fn parse(token: &str) -> Self {
        if token == "-" {
            Word::empty()
        } else {
            Word(token.chars().map(Letter).collect())
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn repeated(l: Letter, n: usize) -> Word {
        Word(vec![l; n])
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    /// The empty word prints as `-`, matching the text machine format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "-");
        }
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Dense state id assigned at declaration.
pub type StateId = usize;
/// Dense transition id assigned at declaration; declaration order is the
/// default transition order.
pub type TransId = usize;

/// Transition labels. `input` is the letter read on the input tape; it is
/// also the comparison label for the lexicographic transition order.
pub trait Label: Clone + Eq + Ord + std::hash::Hash + fmt::Debug {
    fn input(&self) -> Letter;

    /// Multiplicity carried by the label (1 unless the machine is weighted).
    fn multiplicity(&self) -> u64 {
        1
    }

    /// Label-side validation against the machine's declared alphabets.
    fn check(&self, alphabet: &BTreeSet<Letter>, out_alphabet: &BTreeSet<Letter>) -> Vec<String>;

    /// Whether a morphism may map a transition with this label onto one with
    /// `image`. Weighted labels compare by letter only: coverings are stated
    /// on characteristic (split) forms, where multiplicities are all 1, and
    /// the splitting map itself changes multiplicities.
    fn compatible(&self, image: &Self) -> bool {
        self == image
    }
}

impl Label for Letter {
    fn input(&self) -> Letter {
        *self
    }

    fn check(&self, alphabet: &BTreeSet<Letter>, _out: &BTreeSet<Letter>) -> Vec<String> {
        if alphabet.contains(self) {
            Vec::new()
        } else {
            vec![format!("letter `{self}` not in the declared alphabet")]
        }
    }
}

/// Label of an ℕ-automaton transition: a letter with a positive multiplicity.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NLabel {
    pub letter: Letter,
    pub multiplicity: u64,
}

impl fmt::Debug for NLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.multiplicity == 1 {
            write!(f, "{}", self.letter)
        } else {
            write!(f, "{} *{}", self.letter, self.multiplicity)
        }
    }
}

impl Label for NLabel {
    fn input(&self) -> Letter {
        self.letter
    }

    fn multiplicity(&self) -> u64 {
        self.multiplicity
    }

    fn check(&self, alphabet: &BTreeSet<Letter>, _out: &BTreeSet<Letter>) -> Vec<String> {
        let mut v = Vec::new();
        if !alphabet.contains(&self.letter) {
            v.push(format!(
                "letter `{}` not in the declared alphabet",
                self.letter
            ));
        }
        if self.multiplicity == 0 {
            v.push(format!(
                "transition on `{}` has multiplicity 0",
                self.letter
            ));
        }
        v
    }

    fn compatible(&self, image: &Self) -> bool {
        self.letter == image.letter
    }
}

/// Label of a real-time transducer transition: read one input letter, output
/// one word. Final outputs are implicitly the empty word.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IoLabel {
    pub input: Letter,
    pub output: Word,
}

impl fmt::Debug for IoLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.input, self.output)
    }
}

impl Label for IoLabel {
    fn input(&self) -> Letter {
        self.input
    }

    fn check(&self, alphabet: &BTreeSet<Letter>, out_alphabet: &BTreeSet<Letter>) -> Vec<String> {
        let mut v = Vec::new();
        if !alphabet.contains(&self.input) {
            v.push(format!(
                "input letter `{}` not in the declared alphabet",
                self.input
            ));
        }
        for l in self.output.letters() {
            if !out_alphabet.contains(l) {
                v.push(format!(
                    "output letter `{l}` not in the declared output alphabet"
                ));
                break;
            }
        }
        v
    }
}

/// Label of a cartesian-power transducer: one input letter, a tuple of
/// outputs (one word per coordinate).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TupleLabel {
    pub input: Letter,
    pub outputs: Vec<Word>,
}

impl fmt::Debug for TupleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/(", self.input)?;
        for (i, w) in self.outputs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{w}")?;
        }
        write!(f, ")")
    }
}

impl Label for TupleLabel {
    fn input(&self) -> Letter {
        self.input
    }

    fn check(&self, alphabet: &BTreeSet<Letter>, out_alphabet: &BTreeSet<Letter>) -> Vec<String> {
        let mut v = Vec::new();
        if !alphabet.contains(&self.input) {
            v.push(format!(
                "input letter `{}` not in the declared alphabet",
                self.input
            ));
        }
        for w in &self.outputs {
            for l in w.letters() {
                if !out_alphabet.contains(l) {
                    v.push(format!(
                        "output letter `{l}` not in the declared output alphabet"
                    ));
                }
            }
        }
        v
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Transition<L> {
    pub origin: StateId,
    pub label: L,
    pub end: StateId,
}

/// A labelled multigraph with initial and final states. Immutable once
/// constructed; every operation returns a fresh machine.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Machine<L> {
    pub name: String,
    pub alphabet: BTreeSet<Letter>,
    /// Output alphabet; only meaningful for transducers, empty otherwise.
    pub out_alphabet: BTreeSet<Letter>,
    /// State names; the id of a state is its index here.
    pub states: Vec<String>,
    /// The id of a transition is its index here.
    pub transitions: Vec<Transition<L>>,
    /// Ordered and duplicate-free; the order extends the transition order
    /// across computations starting at distinct initial states.
    pub initials: Vec<StateId>,
    pub finals: BTreeSet<StateId>,
}

pub type Automaton = Machine<Letter>;
pub type NAutomaton = Machine<NLabel>;
pub type Transducer = Machine<IoLabel>;
pub type TupleTransducer = Machine<TupleLabel>;

/// A structural defect reported by [`Machine::validate`]. Violations are
/// data, not errors: an invalid machine is a legal value to inspect.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

fn token_ok(s: &str) -> bool {
    !s.is_empty() && !s.starts_with('*') && !s.contains(|c: char| c.is_whitespace() || c == '#')
}

impl<L: Label> Machine<L> {
    pub fn new(name: impl Into<String>) -> Self {
        Machine {
            name: name.into(),
            alphabet: BTreeSet::new(),
            out_alphabet: BTreeSet::new(),
            states: Vec::new(),
            transitions: Vec::new(),
            initials: Vec::new(),
            finals: BTreeSet::new(),
        }
    }

    pub fn add_state(&mut self, name: impl Into<String>) -> StateId {
        self.states.push(name.into());
        self.states.len() - 1
    }

    pub fn add_transition(&mut self, origin: StateId, label: L, end: StateId) -> TransId {
        self.transitions.push(Transition { origin, label, end });
        self.transitions.len() - 1
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Checks every structural invariant and returns the list of violations;
    /// the machine is valid iff the list is empty.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |m: String| out.push(Violation { message: m });
        let n = self.states.len();
        if !token_ok(&self.name) {
            push(format!("machine name `{}` is not a valid token", self.name));
        }
        let mut seen_names = BTreeSet::new();
        for (i, s) in self.states.iter().enumerate() {
            if !token_ok(s) {
                push(format!("state {i} has invalid name `{s}`"));
            }
            if !seen_names.insert(s) {
                push(format!("duplicate state name `{s}`"));
            }
        }
        for l in self.alphabet.iter().chain(self.out_alphabet.iter()) {
            if l.0.is_whitespace() || l.0 == '#' || l.0 == '/' || l.0 == '*' || l.0 == '-' {
                push(format!("letter `{l}` is not usable in the text format"));
            }
        }
        for (i, t) in self.transitions.iter().enumerate() {
            if t.origin >= n {
                push(format!(
                    "transition {i} starts at undeclared state {}",
                    t.origin
                ));
            }
            if t.end >= n {
                push(format!("transition {i} ends at undeclared state {}", t.end));
            }
            for msg in t.label.check(&self.alphabet, &self.out_alphabet) {
                push(format!("transition {i}: {msg}"));
            }
        }
        let mut seen = BTreeSet::new();
        for &q in &self.initials {
            if q >= n {
                push(format!("initial state {q} is undeclared"));
            } else if !seen.insert(q) {
                push(format!(
                    "initial state `{}` is listed twice",
                    self.states[q]
                ));
            }
        }
        for &q in &self.finals {
            if q >= n {
                push(format!("final state {q} is undeclared"));
            }
        }
        out
    }

    /// Validate and wrap the violations in an error.
    pub fn require_valid(&self) -> Result<(), Error> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid {
                name: self.name.clone(),
                first: v[0].message.clone(),
                count: v.len(),
            })
        }
    }

    /// Outgoing transition ids per state, in transition-id order.
    pub fn out_transitions(&self) -> Vec<Vec<TransId>> {
        let mut adj = vec![Vec::new(); self.states.len()];
        for (i, t) in self.transitions.iter().enumerate() {
            adj[t.origin].push(i);
        }
        adj
    }

    fn accessible(&self) -> Vec<bool> {
        let adj = self.out_transitions();
        let mut seen = vec![false; self.states.len()];
        let mut queue: VecDeque<StateId> = VecDeque::new();
        for &i in &self.initials {
            if i < self.states.len() && !seen[i] {
                seen[i] = true;
                queue.push_back(i);
            }
        }
        while let Some(q) = queue.pop_front() {
            for &t in &adj[q] {
                let e = self.transitions[t].end;
                if !seen[e] {
                    seen[e] = true;
                    queue.push_back(e);
                }
            }
        }
        seen
    }

    fn co_accessible(&self) -> Vec<bool> {
        let mut radj = vec![Vec::new(); self.states.len()];
        for t in &self.transitions {
            radj[t.end].push(t.origin);
        }
        let mut seen = vec![false; self.states.len()];
        let mut queue: VecDeque<StateId> = VecDeque::new();
        for &f in &self.finals {
            if f < self.states.len() && !seen[f] {
                seen[f] = true;
                queue.push_back(f);
            }
        }
        while let Some(q) = queue.pop_front() {
            for &p in &radj[q] {
                if !seen[p] {
                    seen[p] = true;
                    queue.push_back(p);
                }
            }
        }
        seen
    }

    /// Keeps exactly the useful (accessible and co-accessible) states and the
    /// transitions between them. The result may be the empty machine. Also
    /// returns, per kept state and transition, its id in `self`.
    pub fn trim_parts(&self) -> (Machine<L>, Vec<StateId>, Vec<TransId>) {
        let acc = self.accessible();
        let co = self.co_accessible();
        let keep: Vec<bool> = acc.iter().zip(&co).map(|(a, c)| *a && *c).collect();
        let mut new_id = vec![usize::MAX; self.states.len()];
        let mut kept_states = Vec::new();
        for (i, &k) in keep.iter().enumerate() {
            if k {
                new_id[i] = kept_states.len();
                kept_states.push(i);
            }
        }
        let mut m = Machine::new(self.name.clone());
        m.alphabet = self.alphabet.clone();
        m.out_alphabet = self.out_alphabet.clone();
        m.states = kept_states
            .iter()
            .map(|&i| self.states[i].clone())
            .collect();
        let mut kept_trans = Vec::new();
        for (i, t) in self.transitions.iter().enumerate() {
            if keep[t.origin] && keep[t.end] {
                m.transitions.push(Transition {
                    origin: new_id[t.origin],
                    label: t.label.clone(),
                    end: new_id[t.end],
                });
                kept_trans.push(i);
            }
        }
        m.initials = self
            .initials
            .iter()
            .filter(|&&q| keep[q])
            .map(|&q| new_id[q])
            .collect();
        m.finals = self
            .finals
            .iter()
            .filter(|&&q| keep[q])
            .map(|&q| new_id[q])
            .collect();
        (m, kept_states, kept_trans)
    }

    /// Word read on the input tape along a computation.
    pub fn computation_input(&self, c: &Computation) -> Result<Word, Error> {
        self.check_computation(c)?;
        Ok(Word::from_letters(
            c.transitions
                .iter()
                .map(|&t| self.transitions[t].label.input()),
        ))
    }

    /// End state of a computation (its origin when empty).
    pub fn computation_end(&self, c: &Computation) -> Result<StateId, Error> {
        self.check_computation(c)?;
        match c.transitions.last() {
            Some(&t) => Ok(self.transitions[t].end),
            None => Ok(c.origin),
        }
    }

    /// Consecutive transitions must chain end-to-origin, starting at the
    /// computation's origin.
    pub fn check_computation(&self, c: &Computation) -> Result<(), Error> {
        if c.origin >= self.states.len() {
            return Err(Error::BrokenComputation { step: 0 });
        }
        let mut at = c.origin;
        for (i, &t) in c.transitions.iter().enumerate() {
            let tr = self
                .transitions
                .get(t)
                .ok_or(Error::BrokenComputation { step: i })?;
            if tr.origin != at {
                return Err(Error::BrokenComputation { step: i });
            }
            at = tr.end;
        }
        Ok(())
    }
}

impl Transducer {
    /// Word written on the output tape along a computation.
    pub fn computation_output(&self, c: &Computation) -> Result<Word, Error> {
        self.check_computation(c)?;
        let mut w = Word::empty();
        for &t in &c.transitions {
            w = w.concat(&self.transitions[t].label.output);
        }
        Ok(w)
    }

    /// Per-step outputs along a computation; used for lag measurements.
    pub fn computation_output_steps(&self, c: &Computation) -> Result<Vec<Word>, Error> {
        self.check_computation(c)?;
        Ok(c.transitions
            .iter()
            .map(|&t| self.transitions[t].label.output.clone())
            .collect())
    }

    /// Largest transition output length (0 when there are no transitions).
    pub fn max_output_len(&self) -> u64 {
        self.transitions
            .iter()
            .map(|t| t.label.output.len() as u64)
            .max()
            .unwrap_or(0)
    }
}

impl TupleTransducer {
    pub fn computation_output_steps(
        &self,
        c: &Computation,
        coord: usize,
    ) -> Result<Vec<Word>, Error> {
        self.check_computation(c)?;
        Ok(c.transitions
            .iter()
            .map(|&t| self.transitions[t].label.outputs[coord].clone())
            .collect())
    }
}

/// A sequence of transition ids starting at `origin`. The unit compared by
/// the lexicographic order and enumerated by the oracle.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Computation {
    pub origin: StateId,
    pub transitions: Vec<TransId>,
}

impl Computation {
    pub fn new(origin: StateId, transitions: Vec<TransId>) -> Self {
        Computation {
            origin,
            transitions,
        }
    }

    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }
}

/// Conversions between classical automata and characteristic ℕ-automata.
pub fn automaton_to_nautomaton(a: &Automaton) -> NAutomaton {
    NAutomaton {
        name: a.name.clone(),
        alphabet: a.alphabet.clone(),
        out_alphabet: BTreeSet::new(),
        states: a.states.clone(),
        transitions: a
            .transitions
            .iter()
            .map(|t| Transition {
                origin: t.origin,
                label: NLabel {
                    letter: t.label,
                    multiplicity: 1,
                },
                end: t.end,
            })
            .collect(),
        initials: a.initials.clone(),
        finals: a.finals.clone(),
    }
}

/// Inverse of [`automaton_to_nautomaton`]; requires a characteristic machine.
pub fn nautomaton_to_automaton(n: &NAutomaton) -> Result<Automaton, Error> {
    if !n.is_characteristic() {
        return Err(Error::Unsupported(format!(
            "`{}` has multiplicities > 1; split it first",
            n.name
        )));
    }
    Ok(Automaton {
        name: n.name.clone(),
        alphabet: n.alphabet.clone(),
        out_alphabet: BTreeSet::new(),
        states: n.states.clone(),
        transitions: n
            .transitions
            .iter()
            .map(|t| Transition {
                origin: t.origin,
                label: t.label.letter,
                end: t.end,
            })
            .collect(),
        initials: n.initials.clone(),
        finals: n.finals.clone(),
    })
}

impl NAutomaton {
    /// All multiplicities equal to 1.
    pub fn is_characteristic(&self) -> bool {
        self.transitions.iter().all(|t| t.label.multiplicity == 1)
    }

    /// Splits every multiplicity-m transition into m parallel characteristic
    /// copies, preserving the realised series. Copies of one transition are
    /// consecutive, so declaration order is preserved classwise. Also returns,
    /// per split transition, the source transition id.
    pub fn split_parts(&self) -> (NAutomaton, Vec<TransId>) {
        let mut m = NAutomaton::new(self.name.clone());
        m.alphabet = self.alphabet.clone();
        m.states = self.states.clone();
        m.initials = self.initials.clone();
        m.finals = self.finals.clone();
        let mut back = Vec::new();
        for (i, t) in self.transitions.iter().enumerate() {
            for _ in 0..t.label.multiplicity {
                m.transitions.push(Transition {
                    origin: t.origin,
                    label: NLabel {
                        letter: t.label.letter,
                        multiplicity: 1,
                    },
                    end: t.end,
                });
                back.push(i);
            }
        }
        (m, back)
    }
}

impl Transducer {
    /// Forgets the outputs. States and transition ids are preserved, so the
    /// returned vector (transition bijection) is the identity map.
    pub fn underlying_input_automaton(&self) -> (Automaton, Vec<TransId>) {
        let a = Automaton {
            name: self.name.clone(),
            alphabet: self.alphabet.clone(),
            out_alphabet: BTreeSet::new(),
            states: self.states.clone(),
            transitions: self
                .transitions
                .iter()
                .map(|t| Transition {
                    origin: t.origin,
                    label: t.label.input,
                    end: t.end,
                })
                .collect(),
            initials: self.initials.clone(),
            finals: self.finals.clone(),
        };
        let bij = (0..self.transitions.len()).collect();
        (a, bij)
    }

    /// Replaces every output x by xθ. θ must be total on the output alphabet.
    /// Transition ids are preserved; the returned vector records the
    /// bijection onto the source transitions (the identity map).
    pub fn apply_output_morphism(
        &self,
        theta: &OutputMorphism,
    ) -> Result<(Transducer, Vec<TransId>), Error> {
        for l in &self.out_alphabet {
            if !theta.map.iter().any(|(k, _)| k == l) {
                return Err(Error::Unsupported(format!(
                    "output morphism is not total: letter `{l}` has no image"
                )));
            }
        }
        let mut t = self.clone();
        t.out_alphabet = self
            .out_alphabet
            .iter()
            .flat_map(|l| theta.apply_letter(*l).letters().to_vec())
            .collect();
        for tr in &mut t.transitions {
            tr.label.output = theta.apply(&tr.label.output);
        }
        Ok((t, (0..self.transitions.len()).collect()))
    }
}

/// A monoid morphism B* → C* given by the images of the letters of B.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputMorphism {
    /// Letter → image, sorted by letter.
    pub map: Vec<(Letter, Word)>,
}

impl OutputMorphism {
    pub fn new(mut map: Vec<(Letter, Word)>) -> Self {
        map.sort_by_key(|(l, _)| *l);
        OutputMorphism { map }
    }

    pub fn identity(alphabet: &BTreeSet<Letter>) -> Self {
        OutputMorphism {
            map: alphabet
                .iter()
                .map(|&l| (l, Word::from_letters([l])))
                .collect(),
        }
    }

    pub fn apply_letter(&self, l: Letter) -> Word {
        self.map
            .iter()
            .find(|(k, _)| *k == l)
            .map(|(_, w)| w.clone())
            .unwrap_or_else(|| Word::from_letters([l]))
    }

    pub fn apply(&self, w: &Word) -> Word {
        let mut out = Word::empty();
        for &l in w.letters() {
            out = out.concat(&self.apply_letter(l));
        }
        out
    }
}

/// State × state matrix for a fixed letter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LabelMatrix {
    /// Summed multiplicities of the letter's transitions (automata and
    /// ℕ-automata).
    Counts(Vec<Vec<u64>>),
    /// Finite sets of output words (transducers).
    Outputs(Vec<Vec<BTreeSet<Word>>>),
}

/// Summed multiplicities of the `letter`-transitions between each state pair.
pub fn count_matrix<L: Label>(m: &Machine<L>, letter: Letter) -> Vec<Vec<u64>> {
    let n = m.states.len();
    let mut mat = vec![vec![0u64; n]; n];
    for t in &m.transitions {
        if t.label.input() == letter {
            mat[t.origin][t.end] = mat[t.origin][t.end].saturating_add(t.label.multiplicity());
        }
    }
    mat
}

/// Sets of output words of the `letter`-transitions between each state pair.
pub fn output_matrix(m: &Transducer, letter: Letter) -> Vec<Vec<BTreeSet<Word>>> {
    let n = m.states.len();
    let mut mat = vec![vec![BTreeSet::new(); n]; n];
    for t in &m.transitions {
        if t.label.input == letter {
            mat[t.origin][t.end].insert(t.label.output.clone());
        }
    }
    mat
}

impl Automaton {
    pub fn label_matrix(&self, letter: Letter) -> LabelMatrix {
        LabelMatrix::Counts(count_matrix(self, letter))
    }
}

impl NAutomaton {
    pub fn label_matrix(&self, letter: Letter) -> LabelMatrix {
        LabelMatrix::Counts(count_matrix(self, letter))
    }
}

impl Transducer {
    pub fn label_matrix(&self, letter: Letter) -> LabelMatrix {
        LabelMatrix::Outputs(output_matrix(self, letter))
    }
}
