//! Word differences in the free group over the output alphabet: reduced
//! words, the set Δ(B) = B* ∪ B̄* ∪ {0}, the retraction ρ (optionally bounded
//! to Δ_N), the lead-or-delay action and the lag of two output sequences.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::Error;
use crate::machine::{Letter, StateId, Word};

/// A letter of B ∪ B̄.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SignedLetter {
    pub letter: Letter,
    pub barred: bool,
}

impl SignedLetter {
    pub fn plain(letter: Letter) -> Self {
        SignedLetter {
            letter,
            barred: false,
        }
    }

    pub fn barred(letter: Letter) -> Self {
        SignedLetter {
            letter,
            barred: true,
        }
    }

    pub fn inverse(self) -> Self {
        SignedLetter {
            letter: self.letter,
            barred: !self.barred,
        }
    }
}

/// A reduced word of the free group F(B): no adjacent x·x̄ or x̄·x pair.
#[derive(Clone, Default, PartialEq, Eq, Hash, Debug)]
pub struct FreeWord(Vec<SignedLetter>);

impl FreeWord {
    pub fn identity() -> Self {
        FreeWord(Vec::new())
    }

    /// A plain word embedded in the group.
    pub fn from_word(w: &Word) -> Self {
        FreeWord(
            w.letters()
                .iter()
                .map(|&l| SignedLetter::plain(l))
                .collect(),
        )
    }

    /// The inverse x̄ of a plain word: its mirror image with barred letters.
    pub fn inverse_of_word(w: &Word) -> Self {
        FreeWord(
            w.letters()
                .iter()
                .rev()
                .map(|&l| SignedLetter::barred(l))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[SignedLetter] {
        &self.0
    }

    /// Group product; the only cancellations happen at the seam, so pushing
    /// the right factor through a stack keeps the result reduced.
    pub fn concat(&self, other: &FreeWord) -> FreeWord {
        let mut stack = self.0.clone();
        for &l in &other.0 {
            match stack.last() {
                Some(&top) if top == l.inverse() => {
                    stack.pop();
                }
                _ => stack.push(l),
            }
        }
        FreeWord(stack)
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "_");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            if l.barred {
                write!(f, "~{}", l.letter)?;
            } else {
                write!(f, "{}", l.letter)?;
            }
        }
        Ok(())
    }
}

/// Reduces an arbitrary sequence of signed letters. Reduction is confluent,
/// so a single left-to-right stack pass is enough.
pub fn reduce(letters: impl IntoIterator<Item = SignedLetter>) -> FreeWord {
    let mut stack: Vec<SignedLetter> = Vec::new();
    for l in letters {
        match stack.last() {
            Some(&top) if top == l.inverse() => {
                stack.pop();
            }
            _ => stack.push(l),
        }
    }
    FreeWord(stack)
}

/// An element of Δ(B) = B* ∪ B̄* ∪ {0}. `Pos` is a lead (a plain word, with
/// ε = Pos of the empty word), `Neg(u)` is a delay and stands for ū, the
/// mirror image of u with barred letters; `Zero` is the absorbing element
/// marking prefix-incomparable outputs.
///
/// The derived order is the canonical serialization order: all leads before
/// all delays (shortlex within each), `Zero` last.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Delta {
    Pos(Word),
    Neg(Word),
    Zero,
}

#[allow(clippy::len_without_is_empty)] // the neutral element is ε, not an empty container
impl Delta {
    pub fn epsilon() -> Self {
        Delta::Pos(Word::empty())
    }

    pub fn is_epsilon(&self) -> bool {
        matches!(self, Delta::Pos(w) if w.is_empty())
    }

    /// Length of the underlying group element; `None` for `Zero`.
    pub fn len(&self) -> Option<usize> {
        match self {
            Delta::Pos(w) | Delta::Neg(w) => Some(w.len()),
            Delta::Zero => None,
        }
    }

    /// The group element; `None` for `Zero`.
    pub fn to_free(&self) -> Option<FreeWord> {
        match self {
            Delta::Pos(w) => Some(FreeWord::from_word(w)),
            Delta::Neg(w) => Some(FreeWord::inverse_of_word(w)),
            Delta::Zero => None,
        }
    }

    /// Renders `b.b` for a lead, `~b.b` for a delay, `_` for ε, `0` for zero.
    pub fn render(&self) -> String {
        match self {
            Delta::Zero => "0".to_string(),
            Delta::Pos(w) if w.is_empty() => "_".to_string(),
            Delta::Pos(w) => w
                .letters()
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join("."),
            Delta::Neg(w) => {
                format!(
                    "~{}",
                    w.letters()
                        .iter()
                        .map(|l| l.to_string())
                        .collect::<Vec<_>>()
                        .join(".")
                )
            }
        }
    }
}

impl fmt::Display for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl fmt::Debug for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// Image of a reduced word under ρ (or ρ_N when a bound is given).
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RhoImage {
    Elem(Delta),
    /// Bounded mode only: the word falls outside Δ_N and disappears from the
    /// vector entries (empty-set semantics). Distinct from `Elem(Zero)` so
    /// that truncation is never conflated with prefix-incomparability.
    Dropped,
}

impl RhoImage {
    pub fn into_option(self) -> Option<Delta> {
        match self {
            RhoImage::Elem(d) => Some(d),
            RhoImage::Dropped => None,
        }
    }
}

/// The retraction F(B) → Δ(B). Unbounded: mixed-sign words map to `Zero`.
/// Bounded by N: anything outside Δ_N = B^{≤N} ∪ B̄^{≤N} (mixed-sign words
/// included) is `Dropped`.
pub fn rho(w: &FreeWord, bound: Option<usize>) -> RhoImage {
    let mut plain = 0usize;
    let mut barred = 0usize;
    for l in w.letters() {
        if l.barred {
            barred += 1;
        } else {
            plain += 1;
        }
    }
    let elem = if plain > 0 && barred > 0 {
        Delta::Zero
    } else if barred == 0 {
        Delta::Pos(Word::from_letters(w.letters().iter().map(|l| l.letter)))
    } else {
        // Barred words store their plain mirror source.
        Delta::Neg(Word::from_letters(
            w.letters().iter().rev().map(|l| l.letter),
        ))
    };
    match bound {
        None => RhoImage::Elem(elem),
        Some(n) => match elem.len() {
            Some(len) if len <= n && elem != Delta::Zero => RhoImage::Elem(elem),
            _ => RhoImage::Dropped,
        },
    }
}

/// The lead-or-delay action of B* × B* on Δ(B): w·(x, y) = ρ(x̄ w y), with
/// `Zero` absorbing.
pub fn ld_action(w: &Delta, x: &Word, y: &Word) -> Delta {
    let Some(free) = w.to_free() else {
        return Delta::Zero;
    };
    let product = FreeWord::inverse_of_word(x)
        .concat(&free)
        .concat(&FreeWord::from_word(y));
    match rho(&product, None) {
        RhoImage::Elem(d) => d,
        RhoImage::Dropped => unreachable!("unbounded rho never drops"),
    }
}

/// The lead-or-delay of two outputs: ε·(x, y).
pub fn ld_of_outputs(x: &Word, y: &Word) -> Delta {
    ld_action(&Delta::epsilon(), x, y)
}

/// The lag of two same-length output sequences: the maximum |LD| over all
/// equal-length prefixes. Defined only when the lead-or-delay of the full
/// sequences is nonzero.
pub fn lag(xs: &[Word], ys: &[Word]) -> Result<u64, Error> {
    if xs.len() != ys.len() {
        return Err(Error::Unsupported(format!(
            "lag of sequences of different lengths ({} vs {})",
            xs.len(),
            ys.len()
        )));
    }
    let mut w = Delta::epsilon();
    let mut max = 0u64;
    for (x, y) in xs.iter().zip(ys) {
        w = ld_action(&w, x, y);
        match w.len() {
            Some(l) => max = max.max(l as u64),
            // Once zero, the full sequences are prefix-incomparable.
            None => return Err(Error::IncomparableOutputs),
        }
    }
    Ok(max)
}

/// A finite set of nonzero Δ-elements, kept in canonical order.
#[derive(Clone, Default, PartialEq, Eq, Hash, Debug)]
pub struct DeltaSet(BTreeSet<Delta>);

impl DeltaSet {
    pub fn new() -> Self {
        DeltaSet(BTreeSet::new())
    }

    pub fn insert(&mut self, d: Delta) {
        debug_assert!(d != Delta::Zero, "delta sets never contain zero");
        self.0.insert(d);
    }

    pub fn contains(&self, d: &Delta) -> bool {
        self.0.contains(d)
    }

    pub fn contains_epsilon(&self) -> bool {
        self.0.contains(&Delta::epsilon())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Delta> {
        self.0.iter()
    }

    pub fn render(&self) -> String {
        self.0
            .iter()
            .map(Delta::render)
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl FromIterator<Delta> for DeltaSet {
    fn from_iter<I: IntoIterator<Item = Delta>>(iter: I) -> Self {
        let mut s = DeltaSet::new();
        for d in iter {
            s.insert(d);
        }
        s
    }
}

/// A state-indexed vector of Δ-sets (the lag-separation state payload);
/// an absent entry is the empty set.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DeltaVector(Vec<DeltaSet>);

impl DeltaVector {
    pub fn empty(dim: usize) -> Self {
        DeltaVector(vec![DeltaSet::new(); dim])
    }

    pub fn from_entries(entries: Vec<DeltaSet>) -> Self {
        DeltaVector(entries)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entry(&self, q: StateId) -> &DeltaSet {
        &self.0[q]
    }

    pub fn entry_mut(&mut self, q: StateId) -> &mut DeltaSet {
        &mut self.0[q]
    }

    pub fn entries(&self) -> &[DeltaSet] {
        &self.0
    }

    /// Canonical rendering used as a state-name suffix: nonempty entries as
    /// `state:elems`, separated by `;`, inside braces.
    pub fn render(&self, state_names: &[String]) -> String {
        let mut parts = Vec::new();
        for (q, set) in self.0.iter().enumerate() {
            if !set.is_empty() {
                parts.push(format!("{}:{}", state_names[q], set.render()));
            }
        }
        format!("{{{}}}", parts.join(";"))
    }
}
