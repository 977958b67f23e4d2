//! Command-line front end: parse machines, run the coverings and the
//! decomposition pipelines, evaluate behaviours with the brute-force oracle
//! and verify morphisms.
//!
//! Exit codes: 0 success, 1 usage/parse errors, 2 verification failures,
//! 3 cap overflows.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use lexcov::decompose::{decompose_k_valued, morphic_decompose, DecomposeOptions, StageMetrics};
use lexcov::error::Error;
use lexcov::format::{
    parse_machine, serialize_machine, serialize_nautomaton, serialize_transducer, AnyMachine,
};
use lexcov::lagsep::{lag_separation, select_psi, LagSepOptions};
use lexcov::machine::{Letter, OutputMorphism, Word};
use lexcov::morphism::{parse_morphism, verify_morphism, MorphismKind};
use lexcov::multiskim::{multi_skim, skim_layers, SkimOptions};
use lexcov::oracle;
use lexcov::OrderSpec;

#[derive(Parser)]
#[command(
    name = "lexcov",
    version,
    about = "Lexicographic coverings and k-valued transducer decomposition"
)]
struct Cli {
    /// Maximum input length for bounded checks and word enumerations.
    #[arg(long, global = true, default_value_t = 8)]
    max_len: usize,

    /// Hard cap on the number of constructed states.
    #[arg(long, global = true, default_value_t = 100_000)]
    cap_states: usize,

    /// Transition order: `file`, `reverse` or `perm:<id-list>`.
    #[arg(long, global = true, default_value = "file")]
    order: String,

    /// Seed for randomized workflows; recorded in the report. The built-in
    /// commands are deterministic and take no hidden randomness.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a machine on one input word (`-` is the empty word).
    Eval { machine: PathBuf, word: String },

    /// Brute-force measurements over all words up to --max-len.
    Oracle {
        #[command(subcommand)]
        what: OracleCommand,
    },

    /// Build the multi-skimming covering of an (ℕ-)automaton.
    Skim {
        /// The skimming level k ≥ 1.
        #[arg(long)]
        k: u64,
        input: PathBuf,
        /// Write the covering, one file per layer and the remainder here.
        #[arg(long, value_name = "DIR")]
        emit_layers: Option<PathBuf>,
    },

    /// Build the lag-separation covering of a real-time transducer.
    Lagsep {
        /// The lag bound N.
        #[arg(long)]
        n: u64,
        input: PathBuf,
        /// Remove the final status of the states holding ε against a final
        /// base state.
        #[arg(long)]
        select_psi: bool,
        /// Trim the result.
        #[arg(long)]
        trim: bool,
    },

    /// Decompose a k-valued transducer into k transducers.
    Decompose {
        /// The valuedness k asserted by the caller (checked up to --max-len).
        #[arg(long)]
        k: u64,
        /// Lag bound; defaults to L·n^(k+1).
        #[arg(long)]
        n: Option<u64>,
        /// Output morphism file; when given, runs the morphic decomposition
        /// (each component composed with the morphism is functional).
        #[arg(long, value_name = "FILE")]
        morphism: Option<PathBuf>,
        input: PathBuf,
        /// Output directory for component files and metrics.
        #[arg(long, value_name = "DIR", default_value = ".")]
        out: PathBuf,
    },

    /// Verify a state/transition map between two machines.
    Verify {
        /// Check the plain morphism conditions.
        #[arg(long, group = "kind")]
        morphism: bool,
        /// Check the covering conditions.
        #[arg(long, group = "kind")]
        covering: bool,
        /// Check the immersion conditions (file maps carry no completion,
        /// so this reports unverifiable).
        #[arg(long, group = "kind")]
        immersion: bool,
        source: PathBuf,
        target: PathBuf,
        map: PathBuf,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// One line per word: `word <TAB> value`.
    Eval { machine: PathBuf },
    /// One line per word: `word <TAB> image size`; summary on stderr.
    Valuedness { machine: PathBuf },
    /// One line per word: `word <TAB> computation count`; summary on stderr.
    Ambiguity { machine: PathBuf },
    /// Compare two machines of the same kind up to --max-len.
    Equiv { first: PathBuf, second: PathBuf },
}

/// What a run did: parameters, per-stage sizes and verification verdicts.
/// Printed to stderr so stdout stays machine-readable.
#[derive(Default)]
struct RunReport {
    command: String,
    parameters: Vec<(String, String)>,
    stages: Vec<StageMetrics>,
    verdicts: Vec<(String, bool)>,
}

impl RunReport {
    fn new(command: &str) -> Self {
        RunReport {
            command: command.into(),
            ..Default::default()
        }
    }

    fn param(&mut self, key: &str, value: impl ToString) {
        self.parameters.push((key.into(), value.to_string()));
    }

    fn print(&self, started: Instant) {
        let mut line = format!("report: command={}", self.command);
        for (k, v) in &self.parameters {
            let _ = write!(line, " {k}={v}");
        }
        eprintln!("{line}");
        for s in &self.stages {
            eprintln!(
                "report: stage={} states={} transitions={}",
                s.stage, s.states, s.transitions
            );
        }
        for (what, ok) in &self.verdicts {
            eprintln!("report: verified {what}: {ok}");
        }
        eprintln!("report: elapsed_ms={}", started.elapsed().as_millis());
    }
}

fn read_machine(path: &Path) -> Result<AnyMachine, Error> {
    let text = std::fs::read_to_string(path)?;
    let m = parse_machine(&text)?;
    m.require_valid()?;
    Ok(m)
}

fn read_output_morphism(path: &Path) -> Result<OutputMorphism, Error> {
    let text = std::fs::read_to_string(path)?;
    let mut map = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 2 || tokens[0].chars().count() != 1 {
            return Err(Error::Parse {
                line: lineno + 1,
                message: "expected `<letter> <image word>` (with `-` for the empty word)".into(),
            });
        }
        let letter = Letter(tokens[0].chars().next().unwrap());
        map.push((letter, Word::parse(tokens[1])));
    }
    Ok(OutputMorphism::new(map))
}

/// Serializes a machine, checks the round-trip and validity invariants and
/// writes it.
fn write_machine(path: &Path, m: &AnyMachine) -> Result<(), Error> {
    m.require_valid()?;
    let text = serialize_machine(m);
    let back = parse_machine(&text)?;
    if &back != m {
        return Err(Error::Unsupported(format!(
            "emitted file {} does not re-parse to an identical machine",
            path.display()
        )));
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn render_relation(image: &BTreeSet<Word>) -> String {
    let words: Vec<String> = image.iter().map(|w| w.to_string()).collect();
    format!("{{{}}}", words.join(","))
}

fn eval_line(m: &AnyMachine, u: &Word) -> String {
    match m {
        AnyMachine::Automaton(a) => {
            format!("{u}\t{}", if oracle::accepts(a, u) { 1 } else { 0 })
        }
        AnyMachine::NAutomaton(n) => format!("{u}\t{}", oracle::eval_series(n, u)),
        AnyMachine::Transducer(t) => {
            format!("{u}\t{}", render_relation(&oracle::eval_relation(t, u)))
        }
    }
}

fn machine_alphabet(m: &AnyMachine) -> &BTreeSet<Letter> {
    match m {
        AnyMachine::Automaton(a) => &a.alphabet,
        AnyMachine::NAutomaton(n) => &n.alphabet,
        AnyMachine::Transducer(t) => &t.alphabet,
    }
}

fn run(cli: Cli) -> Result<i32, Error> {
    let started = Instant::now();
    let order = OrderSpec::parse(&cli.order)?;
    let mut report = RunReport::new(match &cli.command {
        Command::Eval { .. } => "eval",
        Command::Oracle { .. } => "oracle",
        Command::Skim { .. } => "skim",
        Command::Lagsep { .. } => "lagsep",
        Command::Decompose { .. } => "decompose",
        Command::Verify { .. } => "verify",
    });
    report.param("max-len", cli.max_len);
    report.param("cap-states", cli.cap_states);
    report.param("order", &order);
    if let Some(seed) = cli.seed {
        report.param("seed", seed);
    }

    let code = match cli.command {
        Command::Eval { machine, word } => {
            let m = read_machine(&machine)?;
            println!("{}", eval_line(&m, &Word::parse(&word)));
            0
        }

        Command::Oracle { what } => run_oracle(what, cli.max_len, &mut report)?,

        Command::Skim {
            k,
            input,
            emit_layers,
        } => {
            report.param("k", k);
            let m = read_machine(&input)?;
            let naut = match m {
                AnyMachine::NAutomaton(n) => n,
                AnyMachine::Automaton(a) => lexcov::machine::automaton_to_nautomaton(&a),
                AnyMachine::Transducer(_) => {
                    return Err(Error::Unsupported(
                        "skim expects an automaton or an nautomaton".into(),
                    ))
                }
            };
            let opts = SkimOptions {
                order,
                state_cap: cli.cap_states,
            };
            let cov = multi_skim(&naut, k, &opts)?;
            report.stages.push(StageMetrics {
                stage: "covering".into(),
                states: cov.covering.states.len(),
                transitions: cov.covering.transitions.len(),
            });
            let ok = verify_morphism(&cov.projection, MorphismKind::Covering)?;
            report.verdicts.push(("covering projection".into(), ok));
            if let Some(dir) = emit_layers {
                std::fs::create_dir_all(&dir)?;
                write_machine(
                    &dir.join("covering.naut"),
                    &AnyMachine::NAutomaton(cov.covering.clone()),
                )?;
                let layers = skim_layers(&cov)?;
                for (i, layer) in layers.layers.iter().enumerate() {
                    write_machine(
                        &dir.join(format!("layer_{i}.naut")),
                        &AnyMachine::NAutomaton(layer.clone()),
                    )?;
                }
                write_machine(
                    &dir.join("remainder.naut"),
                    &AnyMachine::NAutomaton(layers.remainder.clone()),
                )?;
            } else {
                print!("{}", serialize_nautomaton(&cov.covering));
            }
            if ok {
                0
            } else {
                2
            }
        }

        Command::Lagsep {
            n,
            input,
            select_psi: do_select,
            trim,
        } => {
            report.param("n", n);
            let AnyMachine::Transducer(t) = read_machine(&input)? else {
                return Err(Error::Unsupported("lagsep expects a transducer".into()));
            };
            let opts = LagSepOptions {
                order,
                state_cap: cli.cap_states,
                coordinate_cap: None,
            };
            let cov = lag_separation(&t, n, &opts)?;
            report.stages.push(StageMetrics {
                stage: "covering".into(),
                states: cov.covering.states.len(),
                transitions: cov.covering.transitions.len(),
            });
            let ok = verify_morphism(&cov.projection, MorphismKind::Covering)?;
            report.verdicts.push(("covering projection".into(), ok));
            let mut out = cov.covering.clone();
            if do_select {
                let (psi, _) = select_psi(&cov)?;
                out = psi;
            }
            if trim {
                let (trimmed, _, _) = out.trim_parts();
                out = trimmed;
            }
            report.stages.push(StageMetrics {
                stage: "emitted".into(),
                states: out.states.len(),
                transitions: out.transitions.len(),
            });
            print!("{}", serialize_transducer(&out));
            if ok {
                0
            } else {
                2
            }
        }

        Command::Decompose {
            k,
            n,
            morphism,
            input,
            out,
        } => {
            report.param("k", k);
            if let Some(n) = n {
                report.param("n", n);
            }
            let AnyMachine::Transducer(t) = read_machine(&input)? else {
                return Err(Error::Unsupported("decompose expects a transducer".into()));
            };
            let opts = DecomposeOptions {
                lag_bound: n,
                lagsep_order: order.clone(),
                skim_order: order,
                check_len: cli.max_len,
                state_cap: cli.cap_states,
            };
            std::fs::create_dir_all(&out)?;
            let (components, metrics) = match morphism {
                None => {
                    let dec = decompose_k_valued(&t, k, &opts)?;
                    report.param("lag-bound", dec.lag_bound);
                    (dec.components, dec.metrics)
                }
                Some(path) => {
                    let theta = read_output_morphism(&path)?;
                    let dec = morphic_decompose(&t, &theta, k, &opts)?;
                    report.param("delta-bound", dec.delta_bound);
                    (dec.components, dec.metrics)
                }
            };
            let mut metrics_text = String::new();
            for s in &metrics {
                let _ = writeln!(metrics_text, "{}\t{}\t{}", s.stage, s.states, s.transitions);
            }
            std::fs::write(out.join("metrics.txt"), metrics_text)?;
            for (i, c) in components.iter().enumerate() {
                write_machine(
                    &out.join(format!("component_{i}.trans")),
                    &AnyMachine::Transducer(c.clone()),
                )?;
            }
            report.stages = metrics;
            report.verdicts.push((
                "bounded posts (unambiguous, functional, union)".into(),
                true,
            ));
            0
        }

        Command::Verify {
            morphism,
            covering,
            immersion,
            source,
            target,
            map,
        } => {
            let kind = match (morphism, covering, immersion) {
                (true, false, false) => MorphismKind::Morphism,
                (false, true, false) => MorphismKind::Covering,
                (false, false, true) => MorphismKind::Immersion,
                _ => {
                    return Err(Error::Unsupported(
                        "verify needs exactly one of --morphism, --covering, --immersion".into(),
                    ))
                }
            };
            let src = read_machine(&source)?;
            let dst = read_machine(&target)?;
            let text = std::fs::read_to_string(&map)?;
            let ok = match (&src, &dst) {
                (AnyMachine::Automaton(s), AnyMachine::Automaton(d)) => {
                    verify_morphism(&parse_morphism(&text, s, d)?, kind)?
                }
                (AnyMachine::NAutomaton(s), AnyMachine::NAutomaton(d)) => {
                    verify_morphism(&parse_morphism(&text, s, d)?, kind)?
                }
                (AnyMachine::Transducer(s), AnyMachine::Transducer(d)) => {
                    verify_morphism(&parse_morphism(&text, s, d)?, kind)?
                }
                _ => {
                    return Err(Error::Unsupported(
                        "verify needs two machines of the same kind".into(),
                    ))
                }
            };
            println!("{}", if ok { "verified" } else { "failed" });
            report
                .verdicts
                .push((format!("{kind:?}").to_lowercase(), ok));
            if ok {
                0
            } else {
                2
            }
        }
    };

    report.print(started);
    Ok(code)
}

fn run_oracle(what: OracleCommand, max_len: usize, report: &mut RunReport) -> Result<i32, Error> {
    match what {
        OracleCommand::Eval { machine } => {
            let m = read_machine(&machine)?;
            for u in oracle::words_up_to(machine_alphabet(&m), max_len) {
                println!("{}", eval_line(&m, &u));
            }
            Ok(0)
        }
        OracleCommand::Valuedness { machine } => {
            let AnyMachine::Transducer(t) = read_machine(&machine)? else {
                return Err(Error::Unsupported("valuedness expects a transducer".into()));
            };
            for u in oracle::words_up_to(&t.alphabet, max_len) {
                println!("{u}\t{}", oracle::eval_relation(&t, &u).len());
            }
            let r = oracle::valuedness_up_to(&t, max_len);
            eprintln!(
                "valuedness up to {max_len}: {} (witness `{}`)",
                r.max, r.witness
            );
            report.param("max", r.max);
            Ok(0)
        }
        OracleCommand::Ambiguity { machine } => {
            type CountFn<'a> = Box<dyn Fn(&Word) -> u64 + 'a>;
            let m = read_machine(&machine)?;
            let (alphabet, counts): (_, CountFn) = match &m {
                AnyMachine::Automaton(a) => {
                    (&a.alphabet, Box::new(move |u| oracle::count_paths(a, u)))
                }
                AnyMachine::NAutomaton(n) => {
                    (&n.alphabet, Box::new(move |u| oracle::count_paths(n, u)))
                }
                AnyMachine::Transducer(t) => {
                    (&t.alphabet, Box::new(move |u| oracle::count_paths(t, u)))
                }
            };
            let mut max = (0u64, Word::empty());
            for u in oracle::words_up_to(alphabet, max_len) {
                let c = counts(&u);
                println!("{u}\t{c}");
                if c > max.0 {
                    max = (c, u);
                }
            }
            eprintln!("ambiguity up to {max_len}: {} (witness `{}`)", max.0, max.1);
            report.param("max", max.0);
            Ok(0)
        }
        OracleCommand::Equiv { first, second } => {
            let a = read_machine(&first)?;
            let b = read_machine(&second)?;
            let witness = match (&a, &b) {
                (AnyMachine::Automaton(a), AnyMachine::Automaton(b)) => {
                    oracle::language_counterexample(a, b, max_len)
                }
                (AnyMachine::NAutomaton(a), AnyMachine::NAutomaton(b)) => {
                    oracle::series_counterexample(a, b, max_len)
                }
                (AnyMachine::Transducer(a), AnyMachine::Transducer(b)) => {
                    oracle::relation_counterexample(a, b, max_len)
                }
                _ => {
                    return Err(Error::Unsupported(
                        "equiv needs two machines of the same kind".into(),
                    ))
                }
            };
            match witness {
                None => {
                    println!("equivalent up to {max_len}");
                    report.verdicts.push(("equivalence".into(), true));
                    Ok(0)
                }
                Some(u) => {
                    println!("not equivalent: witness {u}");
                    report.verdicts.push(("equivalence".into(), false));
                    Ok(2)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
