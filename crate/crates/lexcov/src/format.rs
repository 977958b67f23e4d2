//! The text machine format. One item per line, `#` starts a comment:
//!
//! ```text
//! nautomaton C1
//! alphabet a b
//! states p q
//! initial p
//! final q
//! trans p a p
//! trans p b q
//! trans q a q *2
//! ```
//!
//! Transducers declare `outalphabet` and write labels as `a/xyz` with `-`
//! for the empty output. Transition order in the file is the default
//! lexicographic order. Serialization is canonical: fields in the order
//! above, alphabets sorted, transitions in id order, `*m` only when m > 1;
//! parsing a serialized machine yields an identical machine.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::machine::{
    Automaton, IoLabel, Label, Letter, Machine, NAutomaton, NLabel, StateId, Transducer, Word,
};

/// A machine of any of the three text-format kinds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyMachine {
    Automaton(Automaton),
    NAutomaton(NAutomaton),
    Transducer(Transducer),
}

impl AnyMachine {
    pub fn name(&self) -> &str {
        match self {
            AnyMachine::Automaton(m) => &m.name,
            AnyMachine::NAutomaton(m) => &m.name,
            AnyMachine::Transducer(m) => &m.name,
        }
    }

    pub fn validate(&self) -> Vec<crate::machine::Violation> {
        match self {
            AnyMachine::Automaton(m) => m.validate(),
            AnyMachine::NAutomaton(m) => m.validate(),
            AnyMachine::Transducer(m) => m.validate(),
        }
    }

    pub fn require_valid(&self) -> Result<(), Error> {
        match self {
            AnyMachine::Automaton(m) => m.require_valid(),
            AnyMachine::NAutomaton(m) => m.require_valid(),
            AnyMachine::Transducer(m) => m.require_valid(),
        }
    }
}

fn parse_letter(token: &str, line: usize) -> Result<Letter, Error> {
    let mut chars = token.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Ok(Letter(c)),
        _ => Err(Error::Parse {
            line,
            message: format!("letters are single characters, got `{token}`"),
        }),
    }
}

struct Lines<'a> {
    tokens: Vec<(usize, Vec<&'a str>)>,
}

fn tokenize(text: &str) -> Lines<'_> {
    let tokens = text
        .lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let line = raw.split('#').next().unwrap_or("");
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.is_empty() {
                None
            } else {
                Some((i + 1, t))
            }
        })
        .collect();
    Lines { tokens }
}

/// Parses a machine in the text format, detecting its kind from the header.
pub fn parse_machine(text: &str) -> Result<AnyMachine, Error> {
    let lines = tokenize(text);
    let Some((header_line, header)) = lines.tokens.first() else {
        return Err(Error::Parse {
            line: 1,
            message: "empty input: expected a machine header".into(),
        });
    };
    if header.len() != 2 {
        return Err(Error::Parse {
            line: *header_line,
            message: "expected header `automaton|transducer|nautomaton NAME`".into(),
        });
    }
    let name = header[1].to_string();
    let body = &lines.tokens[1..];
    match header[0] {
        "automaton" => Ok(AnyMachine::Automaton(parse_body(
            name,
            body,
            parse_automaton_trans,
        )?)),
        "nautomaton" => Ok(AnyMachine::NAutomaton(parse_body(
            name,
            body,
            parse_nautomaton_trans,
        )?)),
        "transducer" => Ok(AnyMachine::Transducer(parse_body(
            name,
            body,
            parse_transducer_trans,
        )?)),
        other => Err(Error::Parse {
            line: *header_line,
            message: format!("unknown machine kind `{other}`"),
        }),
    }
}

type TransParser<L> = fn(&[&str], usize) -> Result<(String, L, String), Error>;

fn parse_automaton_trans(tokens: &[&str], line: usize) -> Result<(String, Letter, String), Error> {
    if tokens.len() != 4 {
        return Err(Error::Parse {
            line,
            message: "expected `trans p a q`".into(),
        });
    }
    Ok((
        tokens[1].into(),
        parse_letter(tokens[2], line)?,
        tokens[3].into(),
    ))
}

fn parse_nautomaton_trans(tokens: &[&str], line: usize) -> Result<(String, NLabel, String), Error> {
    let (mult, tokens) = match tokens.last() {
        Some(last) if last.starts_with('*') => {
            let m: u64 = last[1..].parse().map_err(|_| Error::Parse {
                line,
                message: format!("bad multiplicity `{last}`"),
            })?;
            (m, &tokens[..tokens.len() - 1])
        }
        _ => (1, tokens),
    };
    if tokens.len() != 4 {
        return Err(Error::Parse {
            line,
            message: "expected `trans p a q [*m]`".into(),
        });
    }
    let letter = parse_letter(tokens[2], line)?;
    Ok((
        tokens[1].into(),
        NLabel {
            letter,
            multiplicity: mult,
        },
        tokens[3].into(),
    ))
}

fn parse_transducer_trans(
    tokens: &[&str],
    line: usize,
) -> Result<(String, IoLabel, String), Error> {
    if tokens.len() != 4 {
        return Err(Error::Parse {
            line,
            message: "expected `trans p a/xyz q`".into(),
        });
    }
    let Some((input, output)) = tokens[2].split_once('/') else {
        return Err(Error::Parse {
            line,
            message: format!("expected `input/output` label, got `{}`", tokens[2]),
        });
    };
    if input == "-" || input.is_empty() {
        return Err(Error::Parse {
            line,
            message: "transducers are real-time: every transition reads exactly one letter".into(),
        });
    }
    let label = IoLabel {
        input: parse_letter(input, line)?,
        output: Word::parse(output),
    };
    Ok((tokens[1].into(), label, tokens[3].into()))
}

fn parse_body<L: Label>(
    name: String,
    body: &[(usize, Vec<&str>)],
    trans: TransParser<L>,
) -> Result<Machine<L>, Error> {
    let mut m = Machine::new(name);
    let mut ids: BTreeMap<String, StateId> = BTreeMap::new();
    // Two passes: declarations first, so section order is flexible as long
    // as canonical files parse.
    for (line, tokens) in body {
        let line = *line;
        match tokens[0] {
            "alphabet" => {
                for t in &tokens[1..] {
                    m.alphabet.insert(parse_letter(t, line)?);
                }
            }
            "outalphabet" => {
                for t in &tokens[1..] {
                    m.out_alphabet.insert(parse_letter(t, line)?);
                }
            }
            "states" => {
                for t in &tokens[1..] {
                    if ids.contains_key(*t) {
                        return Err(Error::Parse {
                            line,
                            message: format!("state `{t}` declared twice"),
                        });
                    }
                    let id = m.add_state(*t);
                    ids.insert((*t).to_string(), id);
                }
            }
            "initial" | "final" | "trans" => {}
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown directive `{other}`"),
                });
            }
        }
    }
    let resolve = |name: &str, line: usize, ids: &BTreeMap<String, StateId>| {
        ids.get(name).copied().ok_or_else(|| Error::Parse {
            line,
            message: format!("undeclared state `{name}`"),
        })
    };
    for (line, tokens) in body {
        let line = *line;
        match tokens[0] {
            "initial" => {
                for t in &tokens[1..] {
                    m.initials.push(resolve(t, line, &ids)?);
                }
            }
            "final" => {
                for t in &tokens[1..] {
                    m.finals.insert(resolve(t, line, &ids)?);
                }
            }
            "trans" => {
                let (p, label, q) = trans(tokens, line)?;
                let p = resolve(&p, line, &ids)?;
                let q = resolve(&q, line, &ids)?;
                m.add_transition(p, label, q);
            }
            _ => {}
        }
    }
    Ok(m)
}

fn serialize_common<L: Label>(
    kind: &str,
    m: &Machine<L>,
    with_out_alphabet: bool,
    format_label: impl Fn(&L) -> (String, Option<String>),
) -> String {
    let mut out = String::new();
    out.push_str(&format!("{kind} {}\n", m.name));
    let alphabet: Vec<String> = m.alphabet.iter().map(|l| l.to_string()).collect();
    out.push_str(
        &format!("alphabet {}\n", alphabet.join(" ")).replace("alphabet \n", "alphabet\n"),
    );
    if with_out_alphabet {
        let oa: Vec<String> = m.out_alphabet.iter().map(|l| l.to_string()).collect();
        out.push_str(
            &format!("outalphabet {}\n", oa.join(" ")).replace("outalphabet \n", "outalphabet\n"),
        );
    }
    out.push_str(&format!("states {}\n", m.states.join(" ")).replace("states \n", "states\n"));
    let initials: Vec<&str> = m.initials.iter().map(|&q| m.states[q].as_str()).collect();
    out.push_str(&format!("initial {}\n", initials.join(" ")).replace("initial \n", "initial\n"));
    let finals: Vec<&str> = m.finals.iter().map(|&q| m.states[q].as_str()).collect();
    out.push_str(&format!("final {}\n", finals.join(" ")).replace("final \n", "final\n"));
    for t in &m.transitions {
        let (label, suffix) = format_label(&t.label);
        match suffix {
            Some(s) => out.push_str(&format!(
                "trans {} {} {} {}\n",
                m.states[t.origin], label, m.states[t.end], s
            )),
            None => out.push_str(&format!(
                "trans {} {} {}\n",
                m.states[t.origin], label, m.states[t.end]
            )),
        }
    }
    out
}

pub fn serialize_automaton(m: &Automaton) -> String {
    serialize_common("automaton", m, false, |l| (l.to_string(), None))
}

pub fn serialize_nautomaton(m: &NAutomaton) -> String {
    serialize_common("nautomaton", m, false, |l| {
        let suffix = if l.multiplicity == 1 {
            None
        } else {
            Some(format!("*{}", l.multiplicity))
        };
        (l.letter.to_string(), suffix)
    })
}

pub fn serialize_transducer(m: &Transducer) -> String {
    serialize_common("transducer", m, true, |l| {
        (format!("{}/{}", l.input, l.output), None)
    })
}

pub fn serialize_machine(m: &AnyMachine) -> String {
    match m {
        AnyMachine::Automaton(a) => serialize_automaton(a),
        AnyMachine::NAutomaton(n) => serialize_nautomaton(n),
        AnyMachine::Transducer(t) => serialize_transducer(t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{binary_counter, two_valued, BINARY_COUNTER_TEXT, TWO_VALUED_TEXT};

    #[test]
    fn parse_the_fixtures() {
        let AnyMachine::Transducer(t) = parse_machine(TWO_VALUED_TEXT).unwrap() else {
            panic!("expected a transducer");
        };
        assert_eq!(t.states.len(), 2);
        assert_eq!(t.transitions.len(), 3);
        assert_eq!(t, two_valued());

        let AnyMachine::NAutomaton(n) = parse_machine(BINARY_COUNTER_TEXT).unwrap() else {
            panic!("expected an nautomaton");
        };
        assert_eq!(n, binary_counter());
    }

    #[test]
    fn round_trip_is_identity() {
        for text in [TWO_VALUED_TEXT, BINARY_COUNTER_TEXT] {
            let m = parse_machine(text).unwrap();
            let s = serialize_machine(&m);
            assert_eq!(parse_machine(&s).unwrap(), m);
            // A canonical file serializes back to itself.
            assert_eq!(serialize_machine(&parse_machine(&s).unwrap()), s);
        }
        let (split, _) = binary_counter().split_parts();
        let s = serialize_nautomaton(&split);
        assert_eq!(parse_machine(&s).unwrap(), AnyMachine::NAutomaton(split));
    }

    #[test]
    fn empty_machine_round_trip() {
        let text = "automaton empty\nalphabet\nstates\ninitial\nfinal\n";
        let m = parse_machine(text).unwrap();
        let AnyMachine::Automaton(a) = &m else {
            panic!()
        };
        assert!(a.is_empty());
        assert_eq!(serialize_machine(&m), text);
    }

    #[test]
    fn parse_errors() {
        assert!(parse_machine("").is_err());
        assert!(parse_machine("widget W\n").is_err());
        assert!(parse_machine("automaton A\nstates p\ntrans p a q\n").is_err());
        assert!(parse_machine("automaton A\nstates p p\n").is_err());
        // Real-time is enforced at parse time.
        let bad = "transducer T\nalphabet a\noutalphabet b\nstates p\ninitial p\nfinal p\ntrans p -/b p\n";
        assert!(parse_machine(bad).is_err());
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let text = "# the counter\nnautomaton C1\nalphabet a b\n\nstates p q # two states\ninitial p\nfinal q\ntrans p a p\ntrans p b p\ntrans p b q\ntrans q a q *2\ntrans q b q *2\n";
        let AnyMachine::NAutomaton(n) = parse_machine(text).unwrap() else {
            panic!()
        };
        assert_eq!(n, binary_counter());
    }
}
