//! `treeshift`: constructions and decision procedures for sofic tree shifts.
//!
//! Exit codes: 0 when the property holds or the construction succeeded, 1 when the
//! property fails (a witness is printed), 2 on usage, parse or input errors.

mod graph;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use treeshift::{
    codeterminize, complement_of_shift, decide_injective, decide_surjective,
    decide_surjective_sofic, default_choice, detect_kind, equal_shifts, format_pattern,
    full_pattern_fta, glue_blocks, is_full, is_full_brute_force, parse_pattern, parse_pattern_file,
    regular_approximation, xi_machine, Automaton, CellularAutomaton, Error, FiniteTreeAutomaton,
    ObjectKind, Pattern, RegularMachine, SftSpec, Side, Verdict, Witness,
};

#[derive(Parser)]
#[command(
    name = "treeshift",
    version,
    about = "Sofic tree shifts, tree automata and cellular automata"
)]
struct Cli {
    /// Decide emptiness by scanning every pattern up to the state count instead of the
    /// productive-state fixpoint
    #[arg(long, global = true)]
    oracle: bool,

    /// Largest number of patterns an --oracle scan may visit
    #[arg(long, global = true, default_value_t = 1 << 24)]
    limit: u128,

    /// Also print the sizes of intermediate automata
    #[arg(short, long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct PatternArg {
    /// Pattern file (`arity`, `alphabet` and one pattern line)
    pattern: Option<PathBuf>,
    /// Inline pattern such as "(0 (1) (1))", read with the automaton's alphabet
    #[arg(short = 'e', long = "expr")]
    expr: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Whether an automaton (or finite-tree automaton) accepts a pattern
    Accept {
        input: PathBuf,
        #[command(flatten)]
        pattern: PatternArg,
    },
    /// List the blocks on Δ_n of the shift given by an automaton or a shift of finite type
    Blocks {
        input: PathBuf,
        #[arg(short = 'n', long, default_value_t = 2)]
        size: usize,
    },
    /// Remove the states with no outgoing bundle, repeatedly
    Essentialize { automaton: PathBuf },
    /// A co-deterministic essential automaton for the same shift
    Codeterminize { automaton: PathBuf },
    /// The finite-tree automaton of patterns outside the shift, or the complement of a
    /// co-deterministic finite-tree automaton
    Complement { input: PathBuf },
    /// Whether an automaton or finite-tree automaton accepts nothing
    Empty { input: PathBuf },
    /// Whether an automaton presents the full shift
    Full { automaton: PathBuf },
    /// Whether two automata present the same shift
    Equal { first: PathBuf, second: PathBuf },
    /// The automaton presenting the image of a cellular automaton
    Image { ca: PathBuf },
    /// Whether a cellular automaton maps its domain onto the shift of an automaton
    Surjective {
        ca: PathBuf,
        target: PathBuf,
        /// Restrict the domain to the sofic shift of this automaton
        #[arg(long)]
        domain: Option<PathBuf>,
    },
    /// Whether a cellular automaton is injective on its domain
    Injective { ca: PathBuf },
    /// Extend the first block so that the second occurs below every branch tip
    Glue {
        automaton: PathBuf,
        first: PathBuf,
        second: PathBuf,
    },
    /// A regular configuration of the shift extending an accepted pattern
    Regularize {
        automaton: PathBuf,
        #[command(flatten)]
        pattern: PatternArg,
    },
    /// Unroll a regular configuration to a block
    Unroll {
        automaton: PathBuf,
        #[arg(long)]
        height: usize,
        /// Follow the lowest bundle from this state
        #[arg(long, conflicts_with = "pattern")]
        state: Option<String>,
        /// Start from the regular approximation of this pattern file
        #[arg(long)]
        pattern: Option<PathBuf>,
    },
    /// Graphviz description of an automaton or finite-tree automaton
    Graph { input: PathBuf },
}

/// An error ending the run with exit code 2.
struct Failure(String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.to_string())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

type Outcome = Result<bool, Failure>;

/// `writeln!` into the output buffer.
macro_rules! emit {
    ($out:expr, $($arg:tt)*) => {{
        use std::fmt::Write as _;
        writeln!($out, $($arg)*).expect("writing to a string cannot fail")
    }};
}

enum Input {
    Automaton(Automaton),
    Fta(FiniteTreeAutomaton),
    Sft(SftSpec),
    /// A cellular automaton or a pattern file.
    Other,
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn parse<T: std::str::FromStr<Err = Error>>(path: &Path, text: &str) -> Result<T, Failure> {
    text.parse()
        .map_err(|e: Error| Failure(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Input, Failure> {
    let text = read(path)?;
    Ok(match detect_kind(&text) {
        ObjectKind::Automaton => Input::Automaton(parse(path, &text)?),
        ObjectKind::Fta => Input::Fta(parse(path, &text)?),
        ObjectKind::Sft => Input::Sft(parse(path, &text)?),
        ObjectKind::Ca | ObjectKind::Pattern => Input::Other,
    })
}

fn load_automaton(path: &Path) -> Result<Automaton, Failure> {
    parse(path, &read(path)?)
}

fn load_ca(path: &Path) -> Result<CellularAutomaton, Failure> {
    parse(path, &read(path)?)
}

fn wrong_kind(path: &Path, expected: &str) -> Failure {
    Failure(format!("{}: expected {expected}", path.display()))
}

/// Reads a pattern for `a` from a file or an inline expression.
fn load_pattern(a: &Automaton, arg: &PatternArg) -> Result<Pattern, Failure> {
    if let Some(expr) = &arg.expr {
        return parse_pattern(expr, a.alphabet(), a.signature())
            .map_err(|e| Failure(format!("<expr>: {e}")));
    }
    let path = arg.pattern.as_deref().expect("clap requires a pattern");
    pattern_file(a, path)
}

fn pattern_file(a: &Automaton, path: &Path) -> Result<Pattern, Failure> {
    let (sig, alphabet, p) = parse_pattern_file(&read(path)?)
        .map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    if sig != a.signature() {
        return Err(Failure(format!(
            "{}: {}",
            path.display(),
            Error::SignatureMismatch
        )));
    }
    if alphabet != *a.alphabet() {
        return Err(Failure(format!(
            "{}: {}",
            path.display(),
            Error::AlphabetMismatch
        )));
    }
    Ok(p)
}

fn print_stats(out: &mut String, v: &Verdict, verbose: bool) {
    if verbose {
        for (name, n) in &v.stats {
            emit!(out, "# {name}: {n}");
        }
    }
}

fn print_machine(out: &mut String, m: &RegularMachine, a: &Automaton) {
    emit!(out, "root {}", m.root());
    for s in 0..m.num_states() {
        let steps: Vec<String> = (0..m.arity()).map(|d| m.step(s, d).to_string()).collect();
        emit!(
            out,
            "state {s} {} {}",
            a.alphabet().symbol(m.color(s)),
            steps.join(" ")
        );
    }
}

/// The essential part, with the pattern checked against it.
fn approximate(a: &Automaton, p: &Pattern) -> Result<RegularMachine, Failure> {
    let e = a.essentialize();
    let run = e
        .accepting_run(p)?
        .ok_or_else(|| Failure("pattern is not accepted".into()))?;
    Ok(regular_approximation(&e, p, &run, &default_choice(&e)?)?)
}

fn run(cli: &Cli, out: &mut String) -> Outcome {
    match &cli.command {
        Command::Accept { input, pattern } => {
            let (base, run) = match load(input)? {
                Input::Automaton(a) => {
                    let p = load_pattern(&a, pattern)?;
                    let r = a.accepting_run(&p)?;
                    (a, r)
                }
                Input::Fta(f) => {
                    let p = load_pattern(f.base(), pattern)?;
                    let r = f.accepting_run(&p)?;
                    (f.base().clone(), r)
                }
                _ => return Err(wrong_kind(input, "an automaton or a finite-tree automaton")),
            };
            match run {
                Some(r) => {
                    emit!(out, "accepted");
                    emit!(out, "run {}", run_text(&base, &r));
                    Ok(true)
                }
                None => {
                    emit!(out, "rejected");
                    Ok(false)
                }
            }
        }
        Command::Blocks { input, size } => {
            let (alphabet, blocks) = match load(input)? {
                Input::Automaton(a) => (
                    a.alphabet().clone(),
                    a.essentialize().accepted_blocks(*size)?,
                ),
                Input::Sft(x) => (x.alphabet().clone(), x.blocks(*size)?),
                _ => return Err(wrong_kind(input, "an automaton or a shift of finite type")),
            };
            for b in &blocks {
                emit!(out, "{}", format_pattern(b, &alphabet));
            }
            if cli.verbose {
                emit!(out, "# blocks: {}", blocks.len());
            }
            Ok(true)
        }
        Command::Essentialize { automaton } => {
            out.push_str(&load_automaton(automaton)?.essentialize().to_string());
            Ok(true)
        }
        Command::Codeterminize { automaton } => {
            out.push_str(&codeterminize(&load_automaton(automaton)?).to_string());
            Ok(true)
        }
        Command::Complement { input } => {
            let c = match load(input)? {
                Input::Automaton(a) => complement_of_shift(&a),
                Input::Fta(f) => f.complement()?,
                _ => return Err(wrong_kind(input, "an automaton or a finite-tree automaton")),
            };
            out.push_str(&c.to_string());
            Ok(true)
        }
        Command::Empty { input } => {
            let f = match load(input)? {
                Input::Automaton(a) => full_pattern_fta(&a),
                Input::Fta(f) => f,
                _ => return Err(wrong_kind(input, "an automaton or a finite-tree automaton")),
            };
            let witness = if cli.oracle {
                f.brute_force_witness(cli.limit)?
            } else {
                f.witness()
            };
            match witness {
                None => {
                    emit!(out, "yes");
                    Ok(true)
                }
                Some(p) => {
                    emit!(out, "no");
                    emit!(out, "witness {}", format_pattern(&p, f.base().alphabet()));
                    Ok(false)
                }
            }
        }
        Command::Full { automaton } => {
            let a = load_automaton(automaton)?;
            let v = if cli.oracle {
                is_full_brute_force(&a, cli.limit)?
            } else {
                is_full(&a)
            };
            emit!(out, "{v}");
            if let Some(p) = v.pattern() {
                emit!(
                    out,
                    "witness {} is not in the shift",
                    format_pattern(p, a.alphabet())
                );
            }
            print_stats(out, &v, cli.verbose);
            Ok(v.answer)
        }
        Command::Equal { first, second } => {
            let (a1, a2) = (load_automaton(first)?, load_automaton(second)?);
            let v = equal_shifts(&a1, &a2)?;
            emit!(out, "{v}");
            if let Some(Witness::Pattern { pattern, side }) = &v.witness {
                let only = match side {
                    Side::First => first,
                    Side::Second => second,
                };
                emit!(
                    out,
                    "witness {} only in {}",
                    format_pattern(pattern, a1.alphabet()),
                    only.display()
                );
            }
            print_stats(out, &v, cli.verbose);
            Ok(v.answer)
        }
        Command::Image { ca } => {
            out.push_str(&load_ca(ca)?.image_automaton()?.to_string());
            Ok(true)
        }
        Command::Surjective { ca, target, domain } => {
            let tau = load_ca(ca)?;
            let y = load_automaton(target)?;
            let v = match domain {
                Some(d) => decide_surjective_sofic(&tau, &load_automaton(d)?, &y)?,
                None => decide_surjective(&tau, &y)?,
            };
            emit!(out, "{v}");
            if let Some(Witness::Pattern { pattern, side }) = &v.witness {
                let text = format_pattern(pattern, y.alphabet());
                match side {
                    Side::First => emit!(
                        out,
                        "witness {text} in the image but not in {}",
                        target.display()
                    ),
                    Side::Second => emit!(
                        out,
                        "witness {text} in {} but not in the image",
                        target.display()
                    ),
                }
            }
            print_stats(out, &v, cli.verbose);
            Ok(v.answer)
        }
        Command::Injective { ca } => {
            let v = decide_injective(&load_ca(ca)?)?;
            emit!(out, "{v}");
            if let Some(Witness::StatePair(s, t)) = &v.witness {
                emit!(out, "witness states {s} {t}");
            }
            print_stats(out, &v, cli.verbose);
            Ok(v.answer)
        }
        Command::Glue {
            automaton,
            first,
            second,
        } => {
            let a = load_automaton(automaton)?.essentialize();
            let p = pattern_file(&a, first)?;
            let q = pattern_file(&a, second)?;
            let g = glue_blocks(&a, &p, &q)?;
            emit!(out, "{}", format_pattern(&g.pattern, a.alphabet()));
            for w in &g.anchors {
                emit!(out, "anchor {w}");
            }
            Ok(true)
        }
        Command::Regularize { automaton, pattern } => {
            let a = load_automaton(automaton)?;
            let p = load_pattern(&a, pattern)?;
            print_machine(out, &approximate(&a, &p)?, &a);
            Ok(true)
        }
        Command::Unroll {
            automaton,
            height,
            state,
            pattern,
        } => {
            let a = load_automaton(automaton)?;
            let m = match (state, pattern) {
                (Some(name), _) => {
                    let e = a.essentialize();
                    let s = e
                        .state_index(name)
                        .ok_or_else(|| Failure(format!("no essential state named `{name}`")))?;
                    xi_machine(&e, s, &default_choice(&e)?)?
                }
                (None, Some(path)) => approximate(&a, &pattern_file(&a, path)?)?,
                (None, None) => return Err(Failure("give --state or --pattern".into())),
            };
            emit!(out, "{}", format_pattern(&m.unroll(*height)?, a.alphabet()));
            Ok(true)
        }
        Command::Graph { input } => {
            let dot = match load(input)? {
                Input::Automaton(a) => graph::automaton_dot(&a),
                Input::Fta(f) => graph::fta_dot(&f),
                _ => return Err(wrong_kind(input, "an automaton or a finite-tree automaton")),
            };
            out.push_str(&dot);
            Ok(true)
        }
    }
}

/// The states of a run, in preorder.
fn run_text(a: &Automaton, r: &treeshift::Run) -> String {
    fn go(a: &Automaton, r: &treeshift::Run, out: &mut Vec<String>) {
        out.push(a.state_name(r.state).to_string());
        for c in &r.children {
            go(a, c, out);
        }
    }
    let mut out = Vec::new();
    go(a, r, &mut out);
    out.join(" ")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let result = run(&cli, &mut out);
    // a closed pipe (e.g. `| head`) is not an error
    if let Err(e) = std::io::stdout().lock().write_all(out.as_bytes()) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
