//! Line-oriented text formats for patterns, automata, finite-tree automata, shifts of
//! finite type and cellular automata.
//!
//! Every format allows blank lines and `#` comments. Header lines may come in any order.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::cellular::CellularAutomaton;
use crate::error::{Error, Result};
use crate::fta::FiniteTreeAutomaton;
use crate::rabin::{Automaton, Bundle, StateId};
use crate::sft::SftSpec;
use crate::tree::{Alphabet, Letter, Pattern, TreeSignature};

/// A syntax error with its 1-based line number and the offending token.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message} (at `{token}`)")]
pub struct ParseError {
    pub line: usize,
    pub token: String,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, token: impl Into<String>, message: impl Into<String>) -> Self {
        ParseError {
            line,
            token: token.into(),
            message: message.into(),
        }
    }
}

/// The kind of object stored in a file, guessed from its header keywords.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectKind {
    Automaton,
    Fta,
    Sft,
    Ca,
    Pattern,
}

pub fn detect_kind(text: &str) -> ObjectKind {
    let keys: BTreeSet<&str> = lines(text).map(|l| l.key).collect();
    if keys.contains("in_alphabet") || keys.contains("rule") {
        ObjectKind::Ca
    } else if keys.contains("initial") || keys.contains("final") {
        ObjectKind::Fta
    } else if keys.contains("forbid") || keys.contains("memory") {
        ObjectKind::Sft
    } else if keys.iter().any(|k| k.starts_with('(')) {
        ObjectKind::Pattern
    } else {
        ObjectKind::Automaton
    }
}

struct Line<'a> {
    no: usize,
    key: &'a str,
    rest: &'a str,
}

impl<'a> Line<'a> {
    fn tokens(&self) -> Vec<&'a str> {
        self.rest.split_whitespace().collect()
    }

    fn err(&self, token: &str, message: impl Into<String>) -> Error {
        ParseError::new(self.no, token, message).into()
    }

    fn single(&self) -> Result<&'a str> {
        match self.tokens().as_slice() {
            [t] => Ok(t),
            _ => Err(self.err(
                self.rest.trim(),
                format!("`{}` takes exactly one value", self.key),
            )),
        }
    }

    fn number(&self) -> Result<usize> {
        let t = self.single()?;
        t.parse()
            .map_err(|_| self.err(t, "expected a nonnegative integer"))
    }
}

fn lines(text: &str) -> impl Iterator<Item = Line<'_>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            return None;
        }
        let (key, rest) = if content.starts_with('(') {
            (content, "")
        } else {
            match content.split_once(char::is_whitespace) {
                Some((k, r)) => (k, r.trim()),
                None => (content, ""),
            }
        };
        Some(Line {
            no: i + 1,
            key,
            rest,
        })
    })
}

/// Collects header values, rejecting repeated headers.
#[derive(Default)]
struct Headers<'a> {
    seen: Vec<(&'static str, Line<'a>)>,
}

impl<'a> Headers<'a> {
    fn put(&mut self, key: &'static str, line: Line<'a>) -> Result<()> {
        if self.seen.iter().any(|(k, _)| *k == key) {
            return Err(line.err(line.key, format!("duplicate `{key}` header")));
        }
        self.seen.push((key, line));
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&Line<'a>> {
        self.seen.iter().find(|(k, _)| *k == key).map(|(_, l)| l)
    }

    fn require(&self, key: &str) -> Result<&Line<'a>> {
        self.get(key)
            .ok_or_else(|| ParseError::new(0, key, format!("missing `{key}` header")).into())
    }

    fn arity(&self) -> Result<TreeSignature> {
        let l = self.require("arity")?;
        TreeSignature::new(l.number()?).map_err(|e| l.err(l.rest, e.to_string()))
    }

    fn alphabet(&self, key: &str) -> Result<Alphabet> {
        let l = self.require(key)?;
        Alphabet::new(l.tokens()).map_err(|e| l.err(l.rest, e.to_string()))
    }
}

// ---------------------------------------------------------------- patterns

/// Prints `(a (b) (c))`.
pub fn format_pattern(p: &Pattern, alphabet: &Alphabet) -> String {
    let mut out = String::new();
    write_pattern(&mut out, p, alphabet);
    out
}

fn write_pattern(out: &mut String, p: &Pattern, alphabet: &Alphabet) {
    out.push('(');
    out.push_str(alphabet.symbol(p.label()));
    for c in p.children() {
        out.push(' ');
        write_pattern(out, c, alphabet);
    }
    out.push(')');
}

/// A whitespace-free name for a block, used for states built from blocks. Unary blocks
/// are written as words; wider blocks in the compact form `(0(1)(1))`.
pub fn block_name(p: &Pattern, alphabet: &Alphabet, arity: usize) -> String {
    if arity == 1 {
        let sep = if alphabet.symbols().iter().any(|s| s.chars().count() > 1) {
            "."
        } else {
            ""
        };
        return p
            .preorder()
            .iter()
            .map(|&a| alphabet.symbol(a))
            .collect::<Vec<_>>()
            .join(sep);
    }
    fn go(out: &mut String, p: &Pattern, alphabet: &Alphabet) {
        out.push('(');
        out.push_str(alphabet.symbol(p.label()));
        for c in p.children() {
            go(out, c, alphabet);
        }
        out.push(')');
    }
    let mut out = String::new();
    go(&mut out, p, alphabet);
    out
}

/// Parses one pattern. `line` is only used for error positions.
pub fn parse_pattern_at(
    s: &str,
    alphabet: &Alphabet,
    sig: TreeSignature,
    line: usize,
) -> Result<Pattern> {
    let mut tokens = Vec::new();
    let mut cur = String::new();
    for ch in s.chars() {
        if ch == '(' || ch == ')' || ch.is_whitespace() {
            if !cur.is_empty() {
                tokens.push(std::mem::take(&mut cur));
            }
            if !ch.is_whitespace() {
                tokens.push(ch.to_string());
            }
        } else {
            cur.push(ch);
        }
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    let mut pos = 0;
    let p = parse_node(&tokens, &mut pos, alphabet, sig, line)?;
    if let Some(extra) = tokens.get(pos) {
        return Err(ParseError::new(line, extra.as_str(), "unexpected token after pattern").into());
    }
    Ok(p)
}

pub fn parse_pattern(s: &str, alphabet: &Alphabet, sig: TreeSignature) -> Result<Pattern> {
    parse_pattern_at(s, alphabet, sig, 1)
}

fn parse_node(
    tokens: &[String],
    pos: &mut usize,
    alphabet: &Alphabet,
    sig: TreeSignature,
    line: usize,
) -> Result<Pattern> {
    let tok = |i: usize| tokens.get(i).map(String::as_str).unwrap_or("<end>");
    if tok(*pos) != "(" {
        return Err(ParseError::new(line, tok(*pos), "expected `(`").into());
    }
    *pos += 1;
    let letter_tok = tok(*pos);
    let label = alphabet
        .letter(letter_tok)
        .ok_or_else(|| ParseError::new(line, letter_tok, "unknown letter"))?;
    *pos += 1;
    let mut children = Vec::new();
    while tok(*pos) == "(" {
        children.push(parse_node(tokens, pos, alphabet, sig, line)?);
    }
    if tok(*pos) != ")" {
        return Err(ParseError::new(line, tok(*pos), "expected `)`").into());
    }
    *pos += 1;
    if !children.is_empty() && children.len() != sig.arity() {
        return Err(ParseError::new(
            line,
            letter_tok,
            format!(
                "vertex has {} children, arity is {}",
                children.len(),
                sig.arity()
            ),
        )
        .into());
    }
    Ok(Pattern::node(label, children))
}

/// A pattern file: `arity`, `alphabet`, then one pattern line.
pub fn parse_pattern_file(text: &str) -> Result<(TreeSignature, Alphabet, Pattern)> {
    let mut h = Headers::default();
    let mut pattern = None;
    for l in lines(text) {
        match l.key {
            "arity" => h.put("arity", l)?,
            "alphabet" => h.put("alphabet", l)?,
            k if k.starts_with('(') => {
                if pattern.is_some() {
                    return Err(l.err(k, "only one pattern per file"));
                }
                pattern = Some((l.no, k));
            }
            k => return Err(l.err(k, "unknown keyword")),
        }
    }
    let sig = h.arity()?;
    let alphabet = h.alphabet("alphabet")?;
    let (no, s) = pattern.ok_or_else(|| ParseError::new(0, "", "missing pattern line"))?;
    let p = parse_pattern_at(s, &alphabet, sig, no)?;
    Ok((sig, alphabet, p))
}

// ---------------------------------------------------------------- automata

fn write_automaton_body(f: &mut fmt::Formatter<'_>, a: &Automaton) -> fmt::Result {
    writeln!(f, "arity {}", a.arity())?;
    writeln!(f, "alphabet {}", a.alphabet().symbols().join(" "))?;
    writeln!(f, "states {}", a.states().join(" "))?;
    for b in a.bundles() {
        write!(
            f,
            "bundle {} {}",
            a.state_name(b.source),
            a.alphabet().symbol(b.label)
        )?;
        for &t in &b.terminals {
            write!(f, " {}", a.state_name(t))?;
        }
        writeln!(f)?;
    }
    Ok(())
}

impl fmt::Display for Automaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_automaton_body(f, self)
    }
}

fn state_ref(l: &Line<'_>, states: &[&str], name: &str) -> Result<StateId> {
    states
        .iter()
        .position(|s| *s == name)
        .ok_or_else(|| l.err(name, "unknown state"))
}

/// Parses the automaton part; `extra` receives lines with other keywords.
fn parse_automaton_with<'a>(
    text: &'a str,
    mut extra: impl FnMut(Line<'a>) -> Result<()>,
) -> Result<(Automaton, Vec<&'a str>)> {
    let mut h = Headers::default();
    let mut bundle_lines = Vec::new();
    for l in lines(text) {
        match l.key {
            "arity" => h.put("arity", l)?,
            "alphabet" => h.put("alphabet", l)?,
            "states" => h.put("states", l)?,
            "bundle" => bundle_lines.push(l),
            _ => extra(l)?,
        }
    }
    let sig = h.arity()?;
    let alphabet = h.alphabet("alphabet")?;
    let states_line = h.require("states")?;
    let states: Vec<&str> = states_line.tokens();
    let mut seen = BTreeSet::new();
    for s in &states {
        if !seen.insert(*s) {
            return Err(states_line.err(s, "duplicate state"));
        }
    }
    let mut bundles = Vec::new();
    let mut seen_bundles = BTreeSet::new();
    for l in &bundle_lines {
        let t = l.tokens();
        if t.len() != 2 + sig.arity() {
            return Err(l.err(
                l.rest,
                format!(
                    "a bundle needs a source, a letter and {} terminals",
                    sig.arity()
                ),
            ));
        }
        let source = state_ref(l, &states, t[0])?;
        let label = alphabet
            .letter(t[1])
            .ok_or_else(|| l.err(t[1], "unknown letter"))?;
        let terminals = t[2..]
            .iter()
            .map(|n| state_ref(l, &states, n))
            .collect::<Result<Vec<_>>>()?;
        let b = Bundle::new(source, label, terminals);
        if !seen_bundles.insert(b.clone()) {
            return Err(l.err(l.rest, "duplicate bundle"));
        }
        bundles.push(b);
    }
    let a = Automaton::new(
        sig,
        alphabet,
        states.iter().map(|s| s.to_string()).collect(),
        bundles,
    )?;
    Ok((a, states))
}

impl FromStr for Automaton {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let (a, _) = parse_automaton_with(text, |l| Err(l.err(l.key, "unknown keyword")))?;
        Ok(a)
    }
}

impl fmt::Display for FiniteTreeAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self.base();
        write_automaton_body(f, a)?;
        let initial: Vec<&str> = self.initial().iter().map(|&s| a.state_name(s)).collect();
        if initial.is_empty() {
            writeln!(f, "initial")?;
        } else {
            writeln!(f, "initial {}", initial.join(" "))?;
        }
        writeln!(f, "final {}", a.state_name(self.final_state()))
    }
}

impl FromStr for FiniteTreeAutomaton {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut initial_line = None;
        let mut final_line = None;
        let (a, states) = parse_automaton_with(text, |l| {
            let slot = match l.key {
                "initial" => &mut initial_line,
                "final" => &mut final_line,
                k => return Err(l.err(k, "unknown keyword")),
            };
            if slot.is_some() {
                return Err(l.err(l.key, format!("duplicate `{}` header", l.key)));
            }
            *slot = Some(l);
            Ok(())
        })?;
        let il = initial_line
            .ok_or_else(|| ParseError::new(0, "initial", "missing `initial` header"))?;
        let fl = final_line.ok_or_else(|| ParseError::new(0, "final", "missing `final` header"))?;
        let initial = il
            .tokens()
            .iter()
            .map(|n| state_ref(&il, &states, n))
            .collect::<Result<Vec<_>>>()?;
        let fin = state_ref(&fl, &states, fl.single()?)?;
        FiniteTreeAutomaton::new(a, initial, fin)
    }
}

// ---------------------------------------------------------------- shifts of finite type

fn write_forbidden(f: &mut fmt::Formatter<'_>, x: &SftSpec) -> fmt::Result {
    for p in x.forbidden() {
        writeln!(f, "forbid {}", format_pattern(p, x.alphabet()))?;
    }
    Ok(())
}

impl fmt::Display for SftSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "arity {}", self.signature().arity())?;
        writeln!(f, "alphabet {}", self.alphabet().symbols().join(" "))?;
        writeln!(f, "memory {}", self.memory())?;
        write_forbidden(f, self)
    }
}

fn parse_forbids(
    sig: TreeSignature,
    alphabet: &Alphabet,
    forbid: &[Line<'_>],
) -> Result<Vec<Pattern>> {
    forbid
        .iter()
        .map(|l| parse_pattern_at(l.rest, alphabet, sig, l.no))
        .collect()
}

fn build_sft(
    sig: TreeSignature,
    alphabet: Alphabet,
    memory: Option<&Line<'_>>,
    raw: Vec<Pattern>,
) -> Result<SftSpec> {
    let m = match memory {
        Some(l) => {
            let m = l.number()?;
            if m == 0 {
                return Err(l.err(l.rest, "memory must be at least 1"));
            }
            m
        }
        None => 1,
    };
    SftSpec::with_memory(sig, alphabet, m, &raw)
}

impl FromStr for SftSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut h = Headers::default();
        let mut forbid = Vec::new();
        for l in lines(text) {
            match l.key {
                "arity" => h.put("arity", l)?,
                "alphabet" => h.put("alphabet", l)?,
                "memory" => h.put("memory", l)?,
                "forbid" => forbid.push(l),
                k => return Err(l.err(k, "unknown keyword")),
            }
        }
        let sig = h.arity()?;
        let alphabet = h.alphabet("alphabet")?;
        let raw = parse_forbids(sig, &alphabet, &forbid)?;
        build_sft(sig, alphabet, h.get("memory"), raw)
    }
}

// ---------------------------------------------------------------- cellular automata

impl fmt::Display for CellularAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.domain();
        writeln!(f, "arity {}", self.signature().arity())?;
        writeln!(f, "in_alphabet {}", d.alphabet().symbols().join(" "))?;
        writeln!(f, "out_alphabet {}", self.target().symbols().join(" "))?;
        writeln!(f, "memory {}", self.memory())?;
        if d.memory() != 1 || !d.forbidden().is_empty() {
            writeln!(f, "domain_memory {}", d.memory())?;
            write_forbidden(f, d)?;
        }
        for (p, b) in self.table() {
            writeln!(
                f,
                "rule {} {}",
                format_pattern(p, d.alphabet()),
                self.target().symbol(*b)
            )?;
        }
        Ok(())
    }
}

impl FromStr for CellularAutomaton {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut h = Headers::default();
        let mut forbid = Vec::new();
        let mut rules = Vec::new();
        for l in lines(text) {
            match l.key {
                "arity" => h.put("arity", l)?,
                "in_alphabet" => h.put("in_alphabet", l)?,
                "out_alphabet" => h.put("out_alphabet", l)?,
                "memory" => h.put("memory", l)?,
                "domain_memory" => h.put("domain_memory", l)?,
                "forbid" => forbid.push(l),
                "rule" => rules.push(l),
                k => return Err(l.err(k, "unknown keyword")),
            }
        }
        let sig = h.arity()?;
        let input = h.alphabet("in_alphabet")?;
        let output = h.alphabet("out_alphabet")?;
        let ml = h.require("memory")?;
        let memory = ml.number()?;
        if memory == 0 {
            return Err(ml.err(ml.rest, "memory must be at least 1"));
        }
        let raw = parse_forbids(sig, &input, &forbid)?;
        let domain = build_sft(sig, input.clone(), h.get("domain_memory"), raw)?;
        let mut table = Vec::new();
        for l in &rules {
            let (pat, out) = l
                .rest
                .rsplit_once(char::is_whitespace)
                .ok_or_else(|| l.err(l.rest, "a rule needs a pattern and an output letter"))?;
            let p = parse_pattern_at(pat, &input, sig, l.no)?;
            if p.block_size() != Some(memory) {
                return Err(l.err(
                    pat.trim(),
                    format!("rule pattern must be a block of size {memory}"),
                ));
            }
            let b: Letter = output
                .letter(out)
                .ok_or_else(|| l.err(out, "unknown output letter"))?;
            if table
                .iter()
                .any(|(q, c): &(Pattern, Letter)| *q == p && *c != b)
            {
                return Err(l.err(pat.trim(), "conflicting rule"));
            }
            table.push((p, b));
        }
        CellularAutomaton::new(domain, output, memory, table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_round_trip() {
        let sig = TreeSignature::new(2).unwrap();
        let ab = Alphabet::new(["a", "b"]).unwrap();
        let p = parse_pattern("(a (b) (a (b) (b)))", &ab, sig).unwrap();
        assert_eq!(p.size(), 5);
        assert_eq!(format_pattern(&p, &ab), "(a (b) (a (b) (b)))");
        assert_eq!(parse_pattern(" ( a(b)(a(b)(b) ) ) ", &ab, sig).unwrap(), p);
    }

    #[test]
    fn pattern_errors_carry_token() {
        let sig = TreeSignature::new(2).unwrap();
        let ab = Alphabet::new(["a", "b"]).unwrap();
        match parse_pattern("(a (c) (b))", &ab, sig) {
            Err(Error::Parse(e)) => assert_eq!(e.token, "c"),
            other => panic!("{other:?}"),
        }
        assert!(parse_pattern("(a (b))", &ab, sig).is_err());
        assert!(parse_pattern("(a (b) (b)) (a)", &ab, sig).is_err());
    }

    #[test]
    fn automaton_round_trip() {
        let text = "# golden mean\narity 1\nalphabet 0 1\nstates 0 1\nbundle 0 0 0\nbundle 1 1 0\nbundle 0 0 1\n";
        let a: Automaton = text.parse().unwrap();
        assert_eq!(a.bundles().len(), 3);
        let again: Automaton = a.to_string().parse().unwrap();
        assert_eq!(again, a);
    }

    #[test]
    fn duplicate_bundles_rejected() {
        let text = "arity 1\nalphabet 0\nstates s\nbundle s 0 s\nbundle s 0 s\n";
        match text.parse::<Automaton>() {
            Err(Error::Parse(e)) => assert_eq!(e.line, 5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_state_reports_line() {
        let text = "arity 1\nalphabet 0\nstates s\nbundle s 0 t\n";
        match text.parse::<Automaton>() {
            Err(Error::Parse(e)) => {
                assert_eq!(e.line, 4);
                assert_eq!(e.token, "t");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn kinds() {
        assert_eq!(
            detect_kind("arity 1\nalphabet a\nstates s\n"),
            ObjectKind::Automaton
        );
        assert_eq!(
            detect_kind("arity 1\nalphabet a\nmemory 1\n"),
            ObjectKind::Sft
        );
        assert_eq!(detect_kind("arity 1\nfinal s\n"), ObjectKind::Fta);
        assert_eq!(detect_kind("arity 1\nin_alphabet a\n"), ObjectKind::Ca);
        assert_eq!(
            detect_kind("arity 1\nalphabet a\n(a)\n"),
            ObjectKind::Pattern
        );
    }

    #[test]
    fn block_names() {
        let ab = Alphabet::new(["0", "1"]).unwrap();
        let p = Pattern::node(
            Letter(0),
            vec![Pattern::leaf(Letter(1)), Pattern::leaf(Letter(1))],
        );
        assert_eq!(block_name(&p, &ab, 2), "(0(1)(1))");
        let w = Pattern::chain(&[Letter(0), Letter(1)]);
        assert_eq!(block_name(&w, &ab, 1), "01");
        let long = Alphabet::new(["x", "yy"]).unwrap();
        assert_eq!(block_name(&w, &long, 1), "x.yy");
    }
}
