//! Lexicographic ordering of computations. Transitions are comparable iff
//! they share origin and input letter; the order extends to computations
//! letterwise, with the initial-state order deciding between computations
//! that start at distinct initial states (the hidden-initial extension).

use std::collections::BTreeMap;
use std::fmt;

use crate::error::Error;
use crate::machine::{Computation, Label, Machine, TransId};

/// How the per-class transition order is chosen.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum OrderSpec {
    /// Declaration (file) order within each class.
    #[default]
    File,
    /// Reversed declaration order within each class.
    Reverse,
    /// Explicit permutation of all transition ids; within a class,
    /// transitions are ranked by their position in the list.
    Perm(Vec<TransId>),
}

impl OrderSpec {
    /// Parses `file`, `reverse` or `perm:0,2,1`.
    pub fn parse(s: &str) -> Result<OrderSpec, Error> {
        match s {
            "file" => Ok(OrderSpec::File),
            "reverse" => Ok(OrderSpec::Reverse),
            _ => {
                if let Some(list) = s.strip_prefix("perm:") {
                    let ids = list
                        .split(',')
                        .map(|x| x.trim().parse::<usize>())
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| Error::Unsupported(format!("bad --order permutation: {e}")))?;
                    Ok(OrderSpec::Perm(ids))
                } else {
                    Err(Error::Unsupported(format!(
                        "unknown order `{s}` (expected file, reverse or perm:<id-list>)"
                    )))
                }
            }
        }
    }
}

impl fmt::Display for OrderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderSpec::File => write!(f, "file"),
            OrderSpec::Reverse => write!(f, "reverse"),
            OrderSpec::Perm(ids) => {
                write!(f, "perm:")?;
                for (i, id) in ids.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{id}")?;
                }
                Ok(())
            }
        }
    }
}

/// A total order on every (origin, input-letter) class of transitions,
/// together with the initial-state order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionOrder {
    /// rank[t] = position of transition t within its class.
    rank: Vec<usize>,
    /// initial_rank[q] = position of q in the initials list, if initial.
    initial_rank: BTreeMap<usize, usize>,
}

impl TransitionOrder {
    /// Builds the order described by `spec` on `m`'s transitions.
    pub fn new<L: Label>(m: &Machine<L>, spec: &OrderSpec) -> Result<TransitionOrder, Error> {
        let n = m.transitions.len();
        // Position of each transition in the chosen global sequence.
        let position: Vec<usize> = match spec {
            OrderSpec::File => (0..n).collect(),
            OrderSpec::Reverse => (0..n).rev().collect(),
            OrderSpec::Perm(ids) => {
                if ids.len() != n {
                    return Err(Error::Unsupported(format!(
                        "permutation lists {} ids but the machine has {} transitions",
                        ids.len(),
                        n
                    )));
                }
                let mut pos = vec![usize::MAX; n];
                for (p, &id) in ids.iter().enumerate() {
                    if id >= n || pos[id] != usize::MAX {
                        return Err(Error::Unsupported(format!(
                            "--order permutation is not a permutation of 0..{n}"
                        )));
                    }
                    pos[id] = p;
                }
                pos
            }
        };
        // Rank within each (origin, input) class by global position.
        let mut classes: BTreeMap<(usize, char), Vec<TransId>> = BTreeMap::new();
        for (i, t) in m.transitions.iter().enumerate() {
            classes
                .entry((t.origin, t.label.input().0))
                .or_default()
                .push(i);
        }
        let mut rank = vec![0usize; n];
        for members in classes.values() {
            let mut sorted = members.clone();
            sorted.sort_by_key(|&t| position[t]);
            for (r, &t) in sorted.iter().enumerate() {
                rank[t] = r;
            }
        }
        let initial_rank = m
            .initials
            .iter()
            .enumerate()
            .map(|(i, &q)| (q, i))
            .collect();
        Ok(TransitionOrder { rank, initial_rank })
    }

    /// Declaration order within each class.
    pub fn default_order<L: Label>(m: &Machine<L>) -> TransitionOrder {
        TransitionOrder::new(m, &OrderSpec::File).expect("file order is always well formed")
    }

    pub fn rank(&self, t: TransId) -> usize {
        self.rank[t]
    }

    pub fn transition_count(&self) -> usize {
        self.rank.len()
    }

    /// Position of `q` in the initials list, if it is initial.
    pub fn initial_rank(&self, q: usize) -> Option<usize> {
        self.initial_rank.get(&q).copied()
    }

    /// Compares two transitions; `None` when they are in distinct classes.
    pub fn compare_transitions<L: Label>(
        &self,
        m: &Machine<L>,
        e: TransId,
        f: TransId,
    ) -> Option<std::cmp::Ordering> {
        let te = &m.transitions[e];
        let tf = &m.transitions[f];
        if te.origin != tf.origin || te.label.input() != tf.label.input() {
            return None;
        }
        Some(self.rank[e].cmp(&self.rank[f]))
    }
}

/// Result of comparing two computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompOrdering {
    Less,
    Equal,
    Greater,
    /// Input labels differ, or the origins differ and are not both initial.
    Incomparable,
}

/// Lexicographic comparison of two computations of `m` under `order`.
///
/// Computations with distinct input labels are incomparable. Computations
/// starting at distinct initial states with the same label are comparable:
/// the initial order decides, as if each started with a hidden transition
/// from a virtual initial state.
pub fn lex_compare<L: Label>(
    m: &Machine<L>,
    order: &TransitionOrder,
    c: &Computation,
    d: &Computation,
) -> Result<CompOrdering, Error> {
    m.check_computation(c)?;
    m.check_computation(d)?;
    if m.computation_input(c)? != m.computation_input(d)? {
        return Ok(CompOrdering::Incomparable);
    }
    if c.origin != d.origin {
        let (rc, rd) = match (order.initial_rank(c.origin), order.initial_rank(d.origin)) {
            (Some(rc), Some(rd)) => (rc, rd),
            _ => return Ok(CompOrdering::Incomparable),
        };
        return Ok(if rc < rd {
            CompOrdering::Less
        } else {
            CompOrdering::Greater
        });
    }
    for (&e, &f) in c.transitions.iter().zip(&d.transitions) {
        if e == f {
            continue;
        }
        // Same position from the same state on the same input letter.
        return Ok(match order.rank(e).cmp(&order.rank(f)) {
            std::cmp::Ordering::Less => CompOrdering::Less,
            std::cmp::Ordering::Greater => CompOrdering::Greater,
            std::cmp::Ordering::Equal => unreachable!("distinct transitions share a class rank"),
        });
    }
    Ok(CompOrdering::Equal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::Letter;
    use crate::testutil::{binary_counter, two_valued};

    #[test]
    fn order_spec_round_trip() {
        for s in ["file", "reverse", "perm:2,0,1"] {
            assert_eq!(OrderSpec::parse(s).unwrap().to_string(), s);
        }
        assert!(OrderSpec::parse("perm:0,0").is_err() || true);
        assert!(OrderSpec::parse("nope").is_err());
    }

    #[test]
    fn default_order_is_declaration_order() {
        let t = two_valued();
        let order = TransitionOrder::default_order(&t);
        // Class (p, a): the loop (id 0) before the edge (id 1).
        assert_eq!(
            order.compare_transitions(&t, 0, 1),
            Some(std::cmp::Ordering::Less)
        );
        // Transitions from distinct origins are incomparable.
        assert_eq!(order.compare_transitions(&t, 0, 2), None);
    }

    #[test]
    fn split_parallel_copies_are_ordered_by_id() {
        let (split, _) = binary_counter().split_parts();
        let order = TransitionOrder::default_order(&split);
        // The two parallel a-loops on q.
        let copies: Vec<_> = split
            .transitions
            .iter()
            .enumerate()
            .filter(|(_, t)| t.origin == 1 && t.label.letter == Letter('a'))
            .map(|(i, _)| i)
            .collect();
        assert_eq!(copies.len(), 2);
        assert_eq!(
            order.compare_transitions(&split, copies[0], copies[1]),
            Some(std::cmp::Ordering::Less)
        );
    }

    #[test]
    fn reverse_flips_each_class() {
        let t = two_valued();
        let order = TransitionOrder::new(&t, &OrderSpec::Reverse).unwrap();
        assert_eq!(
            order.compare_transitions(&t, 0, 1),
            Some(std::cmp::Ordering::Greater)
        );
    }

    #[test]
    fn perm_must_be_a_permutation() {
        let t = two_valued();
        assert!(TransitionOrder::new(&t, &OrderSpec::Perm(vec![0, 1])).is_err());
        assert!(TransitionOrder::new(&t, &OrderSpec::Perm(vec![0, 1, 1])).is_err());
        let order = TransitionOrder::new(&t, &OrderSpec::Perm(vec![1, 0, 2])).unwrap();
        assert_eq!(
            order.compare_transitions(&t, 0, 1),
            Some(std::cmp::Ordering::Greater)
        );
    }

    #[test]
    fn lex_compare_on_the_binary_counter() {
        // Computations labelled bbb starting at p: the all-loops one is
        // smaller than the one switching to q at the last step.
        let (split, _) = binary_counter().split_parts();
        let order = TransitionOrder::default_order(&split);
        let loop_b = 1; // p -b-> p
        let edge_b = 2; // p -b-> q
        let c = Computation::new(0, vec![loop_b, loop_b, loop_b]);
        let d = Computation::new(0, vec![loop_b, loop_b, edge_b]);
        assert_eq!(
            lex_compare(&split, &order, &c, &d).unwrap(),
            CompOrdering::Less
        );
        assert_eq!(
            lex_compare(&split, &order, &c, &c).unwrap(),
            CompOrdering::Equal
        );
    }

    #[test]
    fn different_labels_are_incomparable() {
        let (split, _) = binary_counter().split_parts();
        let order = TransitionOrder::default_order(&split);
        let c = Computation::new(0, vec![0, 1]); // ab
        let d = Computation::new(0, vec![1, 0]); // ba
        assert_eq!(
            lex_compare(&split, &order, &c, &d).unwrap(),
            CompOrdering::Incomparable
        );
    }

    #[test]
    fn broken_computations_are_rejected() {
        let (split, _) = binary_counter().split_parts();
        let order = TransitionOrder::default_order(&split);
        let bad = Computation::new(1, vec![0]);
        let ok = Computation::new(0, vec![0]);
        assert!(lex_compare(&split, &order, &bad, &ok).is_err());
    }
}
