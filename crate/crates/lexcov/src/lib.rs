//! Lexicographic coverings of automata and the decomposition of k-valued
//! transducers.
//!
//! The crate builds two expansions of a machine driven by a lexicographic
//! order on its transitions: the multi-skimming covering of an ℕ-automaton,
//! whose layers are unambiguous and recognise the supports of the skimmed
//! series, and the lag-separation covering of a real-time transducer, whose
//! selected part is equivalent to the input and input-k-ambiguous for a
//! large enough lag bound. Composing the two decomposes a k-valued
//! transducer into k unambiguous functional ones; a lead-or-delay product
//! extends the decomposition through an output morphism.
//!
//! Everything is validated at desk scale by a brute-force oracle
//! ([`oracle`]) that enumerates computations and evaluates behaviours
//! independently of the constructions.

pub mod decompose;
pub mod delay;
pub mod error;
pub mod format;
pub mod lagsep;
pub mod machine;
pub mod morphism;
pub mod multiskim;
pub mod oracle;
pub mod order;

pub use error::Error;
pub use machine::{
    Automaton, Computation, IoLabel, Letter, Machine, NAutomaton, NLabel, OutputMorphism,
    Transducer, TupleLabel, TupleTransducer, Word,
};
pub use morphism::{split_multiplicities, trim, verify_morphism, Morphism, MorphismKind};
pub use order::{lex_compare, CompOrdering, OrderSpec, TransitionOrder};
